//! Coherent states of bosonic anyons on a truncated Fock space.
//!
//! Single-mode objects live on `|0>, ..., |n_max>`. Two-mode states keep every
//! `|l, k>` with `l + k <= n_max`, a cutoff that passive elements preserve, so
//! evolving a truncated state through a network introduces no further error.
//!
//! Two conventions worth stating:
//!
//! - With `q = (b† + b)/2` and `p = (b† - b)/(2i)` the commutator is
//!   `[q, p] = -i/2` (the sign follows from `p`), and coherent states reach
//!   `dq dp = 1/4`.
//! - `D(g) D(h) = e^{(g h* - g* h)/2} D(g + h)`; [`displacement_product_factor`]
//!   measures the scalar from the matrices rather than assuming it.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::fock::{AnyonSpec, Occupation, StateVector};
use crate::linalg::{self, CMatrix};
use crate::network::{evolve, single_particle_matrix, Element, Network};
use crate::{Error, Result};

/// Fock cutoff `n_max` (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    n_max: u32,
}

impl Truncation {
    pub const DEFAULT_N_MAX: u32 = 40;

    pub fn new(n_max: u32) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max as usize + 1
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self { n_max: Self::DEFAULT_N_MAX }
    }
}

/// Single-mode annihilation matrix `b|n> = sqrt(n)|n-1>`.
pub fn annihilation(trunc: Truncation) -> CMatrix {
    let d = trunc.dim();
    CMatrix::from_fn(
        d,
        d,
        |r, c| if c == r + 1 { Complex64::new((c as f64).sqrt(), 0.0) } else { Complex64::default() },
    )
}

pub fn creation(trunc: Truncation) -> CMatrix {
    annihilation(trunc).adjoint()
}

/// Truncated displacement matrix and whether `|g|^2` comes close to the cutoff.
#[derive(Debug, Clone)]
pub struct Displacement {
    pub matrix: CMatrix,
    /// Set when `|g|^2 > n_max / 4`; amplitudes near the cutoff are then unreliable.
    pub truncation_risk: bool,
}

/// `D(g) = exp(g b† - g* b)` from the truncated generator.
pub fn displacement(g: Complex64, trunc: Truncation) -> Displacement {
    let b = annihilation(trunc);
    let bd = b.adjoint();
    // exp(g b† - g* b) = exp(i H) with H = -i (g b† - g* b) Hermitian
    let h = (bd.map(|z| z * g) - b.map(|z| z * g.conj())).map(|z| z * Complex64::new(0.0, -1.0));
    let mut matrix = linalg::expm_hermitian(&h, 1.0);
    if linalg::unitarity_residual(&matrix) > 1e-10 {
        matrix = linalg::polar_unitary(&matrix);
    }
    Displacement { matrix, truncation_risk: g.norm_sqr() > trunc.n_max() as f64 / 4.0 }
}

/// Unnormalized `g^n / sqrt(n!)` for `n = 0..=n_max`.
fn power_profile(g: Complex64, n_max: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut a = Complex64::new(1.0, 0.0);
    out.push(a);
    for n in 1..=n_max {
        a = a * g / (n as f64).sqrt();
        out.push(a);
    }
    out
}

/// `e^{-|g|^2/2} sum_n e^{i rho_n} g^n / sqrt(n!) |n>` on one mode, renormalized after truncation.
pub fn generalized_coherent_state<F: Fn(u32) -> f64>(g: Complex64, rho: F, trunc: Truncation) -> Result<StateVector> {
    if !(g.re.is_finite() && g.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite amplitude {g}")));
    }
    let terms = power_profile(g, trunc.n_max())
        .into_iter()
        .enumerate()
        .map(|(n, a)| (Occupation::new(vec![n as u32]), a * Complex64::from_polar(1.0, rho(n as u32))));
    StateVector::from_terms(1, terms)?.normalized()
}

/// Single-mode coherent state `|g>`.
pub fn coherent_state(g: Complex64, trunc: Truncation) -> Result<StateVector> {
    generalized_coherent_state(g, |_| 0.0, trunc)
}

/// Dense single-mode vector of a one-mode state.
pub fn single_mode_vector(state: &StateVector, trunc: Truncation) -> Result<DVector<Complex64>> {
    if state.modes() != 1 {
        return Err(Error::ModeMismatch { expected: 1, got: state.modes() });
    }
    let mut v = DVector::zeros(trunc.dim());
    for (occ, &a) in state.iter() {
        let n = occ.get(1) as usize;
        if n >= trunc.dim() {
            return Err(Error::InvalidParameter(format!("occupation {n} exceeds the cutoff {}", trunc.n_max())));
        }
        v[n] = a;
    }
    Ok(v)
}

/// `<(b†)^n b^n> / <n_b>^n` on `mode`.
///
/// The string phases of `b†` and `b` on the same mode cancel, so only the
/// falling factorial moments of the occupation distribution enter.
pub fn coherence_function(state: &StateVector, mode: usize, n: u32) -> Result<f64> {
    let mean = state.number_expectation(mode)?;
    if mean <= 0.0 {
        return Err(Error::DegenerateState("mean occupation is zero"));
    }
    let norm = state.norm_sqr();
    let moment: f64 = state
        .iter()
        .map(|(o, a)| {
            let k = o.get(mode) as f64;
            a.norm_sqr() * (0..n).map(|r| (k - r as f64).max(0.0)).product::<f64>()
        })
        .sum::<f64>()
        / norm;
    Ok(moment / mean.powi(n as i32))
}

/// Quadratures `q = (b† + b)/2`, `p = (b† - b)/(2i)`.
pub fn quadratures(trunc: Truncation) -> (CMatrix, CMatrix) {
    let b = annihilation(trunc);
    let bd = b.adjoint();
    let q = (&bd + &b).map(|z| z * 0.5);
    let p = (&bd - &b).map(|z| z * Complex64::new(0.0, -0.5));
    (q, p)
}

fn expectation(m: &CMatrix, v: &DVector<Complex64>) -> Complex64 {
    (v.adjoint() * m * v)[(0, 0)] / v.norm_squared()
}

/// `dq * dp` for a single-mode state.
pub fn uncertainty_product(state: &StateVector, trunc: Truncation) -> Result<f64> {
    let v = single_mode_vector(state, trunc)?;
    let (q, p) = quadratures(trunc);
    let var = |m: &CMatrix| {
        let mean = expectation(m, &v).re;
        (expectation(&(m * m), &v).re - mean * mean).max(0.0)
    };
    Ok((var(&q) * var(&p)).sqrt())
}

/// `<h|g>` between truncated coherent states.
pub fn overlap(g: Complex64, h: Complex64, trunc: Truncation) -> Result<Complex64> {
    Ok(coherent_state(h, trunc)?.inner(&coherent_state(g, trunc)?))
}

/// The scalar `lambda` best fitting `D(g) D(h) = lambda D(g + h)` on the lower
/// half of the truncated space, where cutoff effects are negligible.
pub fn displacement_product_factor(g: Complex64, h: Complex64, trunc: Truncation) -> Complex64 {
    let prod = displacement(g, trunc).matrix * displacement(h, trunc).matrix;
    let sum = displacement(g + h, trunc).matrix;
    let k = trunc.dim() / 2;
    let (mut num, mut den) = (Complex64::default(), 0.0);
    for r in 0..k {
        for c in 0..k {
            num += sum[(r, c)].conj() * prod[(r, c)];
            den += sum[(r, c)].norm_sqr();
        }
    }
    num / den
}

/// Two-mode coherent families of bosonic anyons, written as
/// `sum_{l,k} c_{l,k} u^l v^k / sqrt(l! k!) |l, k>` with
///
/// - `ExactLess` (`D_1(u) D_2(v)|0>`): `c = 1`
/// - `ExactGreater` (`D_2(v) D_1(u)|0>`): `c = e^{-i phi l k}`
/// - `Type1`: `c = e^{-i phi (l k + k(k-1)/2)}`
/// - `Type2`: `c = e^{i phi l(l-1)/2}`
///
/// `SingleMode { g, mode: 1 }` is `Type1(g, 0)` and `SingleMode { g, mode: 2 }`
/// is `Type2(0, g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherentFamily {
    ExactLess { u: Complex64, v: Complex64 },
    ExactGreater { u: Complex64, v: Complex64 },
    Type1 { u: Complex64, v: Complex64 },
    Type2 { u: Complex64, v: Complex64 },
    SingleMode { g: Complex64, mode: usize },
}

impl CoherentFamily {
    /// `(u, v)` with the single-mode case placed on its mode.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let zero = Complex64::default();
        match *self {
            CoherentFamily::ExactLess { u, v }
            | CoherentFamily::ExactGreater { u, v }
            | CoherentFamily::Type1 { u, v }
            | CoherentFamily::Type2 { u, v } => (u, v),
            CoherentFamily::SingleMode { g, mode: 1 } => (g, zero),
            CoherentFamily::SingleMode { g, .. } => (zero, g),
        }
    }

    /// Single-mode states rewritten as the dynamically coherent family they belong to.
    fn canonical(&self) -> Result<CoherentFamily> {
        match *self {
            CoherentFamily::SingleMode { g, mode: 1 } => Ok(CoherentFamily::Type1 { u: g, v: Complex64::default() }),
            CoherentFamily::SingleMode { g, mode: 2 } => Ok(CoherentFamily::Type2 { u: Complex64::default(), v: g }),
            CoherentFamily::SingleMode { mode, .. } => Err(Error::InvalidMode { mode, modes: 2 }),
            other => Ok(other),
        }
    }

    fn phase(&self, phi: f64, l: u32, k: u32) -> f64 {
        let (l, k) = (l as f64, k as f64);
        match self {
            CoherentFamily::ExactLess { .. } | CoherentFamily::SingleMode { .. } => 0.0,
            CoherentFamily::ExactGreater { .. } => -phi * l * k,
            CoherentFamily::Type1 { .. } => -phi * (l * k + k * (k - 1.0) / 2.0),
            CoherentFamily::Type2 { .. } => phi * l * (l - 1.0) / 2.0,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CoherentFamily::ExactLess { .. } => "exact '<'",
            CoherentFamily::ExactGreater { .. } => "exact '>'",
            CoherentFamily::Type1 { .. } => "type 1",
            CoherentFamily::Type2 { .. } => "type 2",
            CoherentFamily::SingleMode { .. } => "single-mode",
        }
    }
}

fn require_bosonic(spec: &AnyonSpec) -> Result<()> {
    if spec.is_fermionic() {
        Err(Error::InvalidParameter("coherent states need bosonic anyons".into()))
    } else {
        Ok(())
    }
}

/// Normalized truncated two-mode state of a family.
pub fn two_mode_family_state(family: &CoherentFamily, spec: &AnyonSpec, trunc: Truncation) -> Result<StateVector> {
    require_bosonic(spec)?;
    family.canonical()?;
    let (u, v) = family.amplitudes();
    for z in [u, v] {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite amplitude {z}")));
        }
    }
    let n_max = trunc.n_max();
    let pu = power_profile(u, n_max);
    let pv = power_profile(v, n_max);
    let mut terms = Vec::new();
    for l in 0..=n_max {
        for k in 0..=(n_max - l) {
            let ph = Complex64::from_polar(1.0, family.phase(spec.phi(), l, k));
            terms.push((Occupation::new(vec![l, k]), ph * pu[l as usize] * pv[k as usize]));
        }
    }
    StateVector::from_terms(2, terms)?.normalized()
}

/// Family after a two-mode network: `(u, v) -> A (u, v)` with `A` the
/// single-particle matrix. Exact families are not closed under linear optics.
pub fn evolve_family(family: &CoherentFamily, network: &Network, spec: &AnyonSpec) -> Result<CoherentFamily> {
    require_bosonic(spec)?;
    if network.modes() != 2 {
        return Err(Error::ModeMismatch { expected: 2, got: network.modes() });
    }
    let fam = family.canonical()?;
    let a = single_particle_matrix(network);
    let (u, v) = fam.amplitudes();
    let (u2, v2) = (a[(0, 0)] * u + a[(0, 1)] * v, a[(1, 0)] * u + a[(1, 1)] * v);
    match fam {
        CoherentFamily::Type1 { .. } => Ok(CoherentFamily::Type1 { u: u2, v: v2 }),
        CoherentFamily::Type2 { .. } => Ok(CoherentFamily::Type2 { u: u2, v: v2 }),
        other => Err(Error::NotClosedUnderLinearOptics(other.name())),
    }
}

/// `exp(i phi K_ij)` with `K_ij = (n_i + n_j)(n_i + n_j - 1)/2`; maps type 1 states to type 2.
pub fn kerr_interconvert(state: &StateVector, spec: &AnyonSpec, i: usize, j: usize) -> Result<StateVector> {
    crate::fock::check_mode(i, state.modes())?;
    crate::fock::check_mode(j, state.modes())?;
    let phi = spec.phi();
    Ok(state.apply_diagonal_phase(|o| {
        let n = (o.get(i) + o.get(j)) as f64;
        phi * n * (n - 1.0) / 2.0
    }))
}

/// The two-mode mirror: `PS_2(pi/2)`, then `BS_12(pi/2)`, then `PS_1(pi/2)`.
/// Its single-particle matrix is `[[0, -i], [i, 0]]`.
pub fn mirror_network() -> Network {
    use crate::angle::Angle;
    Network::new(
        2,
        vec![Element::ps(2, Angle::HALF_PI), Element::bs(1, 2, Angle::HALF_PI), Element::ps(1, Angle::HALF_PI)],
    )
    .expect("mirror network is well formed")
}

/// Normalized `e^{i pi/4} |-i w> - e^{3i pi/4} |i w>` on `mode` of two modes, the other mode empty.
pub fn cat_state(w: Complex64, mode: usize, trunc: Truncation) -> Result<StateVector> {
    crate::fock::check_mode(mode, 2)?;
    let place = |g: Complex64| -> Result<StateVector> {
        let single = coherent_state(g, trunc)?;
        StateVector::from_terms(
            2,
            single.iter().map(|(o, &a)| {
                let n = o.get(1);
                (Occupation::new(if mode == 1 { vec![n, 0] } else { vec![0, n] }), a)
            }),
        )
    };
    let i = Complex64::i();
    let plus = place(-i * w)?.scaled(Complex64::from_polar(1.0, FRAC_PI_4));
    let minus = place(i * w)?;
    plus.add_scaled(-Complex64::from_polar(1.0, 3.0 * FRAC_PI_4), &minus)?.normalized()
}

/// Mirror output of a single-mode coherent state at `phi = pi`, next to its
/// two-branch closed form.
#[derive(Debug, Clone)]
pub struct MirrorCat {
    pub state: StateVector,
    pub closed_form: StateVector,
    /// Amplitude the mirror carries the input onto, `A_{out,in} u`.
    pub reflected: Complex64,
    pub output_mode: usize,
    pub fidelity: f64,
}

/// Sends `SingleMode { u, input_mode }` through [`mirror_network`] by direct
/// evolution and compares it with [`cat_state`] of the reflected amplitude.
///
/// At `phi = pi` the profile `e^{-i pi k(k-1)/2}` is the sequence
/// `1, 1, -1, -1, ...`, which is exactly the two-branch superposition.
pub fn mirror_cat(u: Complex64, input_mode: usize, spec: &AnyonSpec, trunc: Truncation) -> Result<MirrorCat> {
    require_bosonic(spec)?;
    if (spec.phi() - PI).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("mirror cat needs phi = pi, got {}", spec.phi())));
    }
    let input = two_mode_family_state(&CoherentFamily::SingleMode { g: u, mode: input_mode }, spec, trunc)?;
    let net = mirror_network();
    let state = evolve(spec, &net, &input)?;
    let a = single_particle_matrix(&net);
    let output_mode = 3 - input_mode;
    let reflected = a[(output_mode - 1, input_mode - 1)] * u;
    let closed_form = cat_state(reflected, output_mode, trunc)?;
    let fidelity = state.fidelity(&closed_form);
    Ok(MirrorCat { state, closed_form, reflected, output_mode, fidelity })
}

/// Coefficients of `prod_{k=0}^{n-1} (e^{i k phi} a b†_i + b b†_j) = sum_l C_l (a b†_i)^l (b b†_j)^{n-l}`
/// for `i < j`, the factor with `k = 0` leftmost: `C_l = binom(n, l) e^{i phi l(l-1)/2}`.
pub fn deformed_binomial_coeffs(n: u32, phi: f64) -> Vec<Complex64> {
    let mut binom = 1.0f64;
    (0..=n)
        .map(|l| {
            if l > 0 {
                binom = binom * (n - l + 1) as f64 / l as f64;
            }
            let l = l as f64;
            Complex64::from_polar(binom, phi * l * (l - 1.0) / 2.0)
        })
        .collect()
}

/// `e^{-i phi n(n-1)/2}` relating `prod (a b†_i + e^{-i k phi} b b†_j)` to the product above.
pub fn binomial_prefactor(n: u32, phi: f64) -> Complex64 {
    let n = n as f64;
    Complex64::from_polar(1.0, -phi * n * (n - 1.0) / 2.0)
}
