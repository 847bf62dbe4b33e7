//! Optical networks of phase shifters and beam splitters.
//!
//! Two independent evolution paths live here. [`evolve`] exponentiates each
//! element's generator on the invariant blocks it leaves alone (the occupations
//! of all other modes plus the pair total), and [`propagate_algebraic`] pushes a
//! beam splitter through a string of creation operators with the propagation
//! identities. Agreement between them is the main correctness check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::fock::{check_mode, hop, monomial_state, AnyonSpec, FockSector, Occupation, StateVector};
use crate::linalg::{self, CMatrix};
use crate::operators::{su2_generators, OperatorMatrix};
use crate::{Error, Result};

/// A single optical element. `PS_i(tau) = exp(i tau n_i)`,
/// `BS_ij(theta) = exp(i theta (chi†_i chi_j + chi†_j chi_i))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Element {
    Ps {
        #[serde(rename = "i")]
        mode: usize,
        tau: Angle,
    },
    Bs {
        i: usize,
        j: usize,
        theta: Angle,
    },
}

impl Element {
    pub fn ps(mode: usize, tau: impl Into<Angle>) -> Self {
        Element::Ps { mode, tau: tau.into() }
    }

    pub fn bs(i: usize, j: usize, theta: impl Into<Angle>) -> Self {
        Element::Bs { i, j, theta: theta.into() }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        match *self {
            Element::Ps { mode, tau } => {
                check_mode(mode, modes)?;
                check_angle(tau)
            }
            Element::Bs { i, j, theta } => {
                check_mode(i, modes)?;
                check_mode(j, modes)?;
                if i == j {
                    return Err(Error::DegenerateBeamSplitter(i));
                }
                check_angle(theta)
            }
        }
    }

    /// The same element acting on relabelled modes.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Element {
        match *self {
            Element::Ps { mode, tau } => Element::Ps { mode: map(mode), tau },
            Element::Bs { i, j, theta } => Element::Bs { i: map(i), j: map(j), theta },
        }
    }
}

fn check_angle(a: Angle) -> Result<()> {
    let v = a.value();
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteAngle(v))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Ps { mode, tau } => write!(f, "ps {mode} {tau}"),
            Element::Bs { i, j, theta } => write!(f, "bs {i} {j} {theta}"),
        }
    }
}

/// Elements over `m` modes; element `k` acts before element `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork")]
pub struct Network {
    #[serde(rename = "m")]
    modes: usize,
    elements: Vec<Element>,
}

#[derive(Deserialize)]
struct RawNetwork {
    m: usize,
    elements: Vec<Element>,
}

impl TryFrom<RawNetwork> for Network {
    type Error = Error;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        Network::new(raw.m, raw.elements)
    }
}

impl Network {
    pub fn new(modes: usize, elements: Vec<Element>) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        for e in &elements {
            e.validate(modes)?;
        }
        Ok(Self { modes, elements })
    }

    pub fn empty(modes: usize) -> Result<Self> {
        Self::new(modes, Vec::new())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn push(&mut self, e: Element) -> Result<()> {
        e.validate(self.modes)?;
        self.elements.push(e);
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Network) -> Result<Network> {
        if other.modes != self.modes {
            return Err(Error::ModeMismatch { expected: self.modes, got: other.modes });
        }
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        Ok(Network { modes: self.modes, elements })
    }

    /// Copy of the network on a larger mode set, mode `k` sent to `map(k)`.
    pub fn embed(&self, modes: usize, map: impl Fn(usize) -> usize) -> Result<Network> {
        Network::new(modes, self.elements.iter().map(|e| e.remap(&map)).collect())
    }
}

/// The three-mode braiding network: beam splitters `BS_23, BS_12, BS_13, BS_12`
/// at `pi/2`, then phase shifters `PS_1(pi), PS_2(pi/2), PS_3(pi/2)`.
///
/// It is the identity on every single-particle state, while on
/// `|1,1,0>, |1,0,1>, |0,1,1>, |1,1,1>` it multiplies by
/// `e^{i phi}, e^{-i phi}, 1, 1`.
pub fn build_braiding_network() -> Network {
    let h = Angle::HALF_PI;
    Network::new(
        3,
        vec![
            Element::bs(2, 3, h),
            Element::bs(1, 2, h),
            Element::bs(1, 3, h),
            Element::bs(1, 2, h),
            Element::ps(1, Angle::PI),
            Element::ps(2, h),
            Element::ps(3, h),
        ],
    )
    .expect("braiding network is well formed")
}

/// Basis states reachable from `occ` by moving particles between modes `i0, j0` (0-based).
fn pair_block(spec: &AnyonSpec, occ: &Occupation, i0: usize, j0: usize) -> Vec<Occupation> {
    let total = occ.counts()[i0] + occ.counts()[j0];
    let cap = if spec.is_fermionic() { 1 } else { total };
    let mut out = Vec::new();
    // decreasing n at the lower index keeps the canonical order
    let (lo, hi) = (i0.min(j0), i0.max(j0));
    for n_lo in (0..=total.min(cap)).rev() {
        let n_hi = total - n_lo;
        if n_hi > cap {
            continue;
        }
        let mut o = occ.clone();
        o.set(lo, n_lo);
        o.set(hi, n_hi);
        out.push(o);
    }
    out
}

/// `exp(i theta (chi†_i chi_j + h.c.))` on one pair block.
fn bs_block_unitary(spec: &AnyonSpec, block: &[Occupation], i0: usize, j0: usize, theta: f64) -> CMatrix {
    let d = block.len();
    let mut h = CMatrix::zeros(d, d);
    for (col, occ) in block.iter().enumerate() {
        for (a, b) in [(i0, j0), (j0, i0)] {
            if let Some((out, f)) = hop(spec, occ, a, b) {
                let row = block.iter().position(|o| *o == out).expect("hop stays in its block");
                h[(row, col)] += f;
            }
        }
    }
    linalg::expm_hermitian(&h, theta)
}

/// Key of the block a basis state belongs to: everything except the pair's split.
fn block_key(occ: &Occupation, i0: usize, j0: usize) -> Occupation {
    let mut key = occ.clone();
    let total = occ.counts()[i0] + occ.counts()[j0];
    key.set(i0, total);
    key.set(j0, 0);
    key
}

/// Dense unitary of one element on a sector.
pub fn element_unitary(spec: &AnyonSpec, sector: &Arc<FockSector>, element: &Element) -> Result<OperatorMatrix> {
    element.validate(sector.modes())?;
    let d = sector.dim();
    match *element {
        Element::Ps { mode, tau } => {
            let t = tau.value();
            Ok(OperatorMatrix::square(
                sector.clone(),
                linalg::diag(sector.basis().iter().map(|o| Complex64::from_polar(1.0, t * o.get(mode) as f64))),
            ))
        }
        Element::Bs { i, j, theta } => {
            let (i0, j0) = (i - 1, j - 1);
            let mut groups: BTreeMap<Occupation, ()> = BTreeMap::new();
            for occ in sector.basis() {
                groups.insert(block_key(occ, i0, j0), ());
            }
            let mut u = CMatrix::zeros(d, d);
            for key in groups.keys() {
                let block = pair_block(spec, key, i0, j0);
                let ub = bs_block_unitary(spec, &block, i0, j0, theta.value());
                let idx: Vec<usize> =
                    block.iter().map(|o| sector.index_of(o).expect("block lies inside the sector")).collect();
                for (r, &gr) in idx.iter().enumerate() {
                    for (c, &gc) in idx.iter().enumerate() {
                        u[(gr, gc)] = ub[(r, c)];
                    }
                }
            }
            Ok(OperatorMatrix::square(sector.clone(), u))
        }
    }
}

/// Dense unitary of the whole network (later elements multiply on the left).
pub fn network_unitary(spec: &AnyonSpec, sector: &Arc<FockSector>, network: &Network) -> Result<OperatorMatrix> {
    if network.modes() != sector.modes() {
        return Err(Error::ModeMismatch { expected: sector.modes(), got: network.modes() });
    }
    let mut u = OperatorMatrix::identity(sector.clone());
    for e in network.elements() {
        u = element_unitary(spec, sector, e)?.compose(&u);
    }
    Ok(u)
}

/// The `m x m` matrix `A` with `U chi†_k |0> = sum_l A_lk chi†_l |0>`.
///
/// It does not depend on the particle class or the exchange phase.
pub fn single_particle_matrix(network: &Network) -> CMatrix {
    let spec = AnyonSpec::bosonic(0.0);
    let m = network.modes();
    let mut a = CMatrix::zeros(m, m);
    for k in 1..=m {
        let input = StateVector::basis_state(Occupation::single(m, k).expect("mode in range"));
        let out = evolve(&spec, network, &input).expect("modes match");
        for l in 1..=m {
            a[(l - 1, k - 1)] = out.amplitude(&Occupation::single(m, l).expect("mode in range"));
        }
    }
    a
}

fn apply_element(spec: &AnyonSpec, element: &Element, state: &StateVector) -> StateVector {
    match *element {
        Element::Ps { mode, tau } => {
            let t = tau.value();
            state.apply_diagonal_phase(|o| t * o.get(mode) as f64)
        }
        Element::Bs { i, j, theta } => {
            let (i0, j0) = (i - 1, j - 1);
            let mut groups: BTreeMap<Occupation, Vec<(&Occupation, Complex64)>> = BTreeMap::new();
            for (occ, &a) in state.iter() {
                groups.entry(block_key(occ, i0, j0)).or_default().push((occ, a));
            }
            let mut out = StateVector::zero(state.modes());
            for (key, terms) in groups {
                let block = pair_block(spec, &key, i0, j0);
                let ub = bs_block_unitary(spec, &block, i0, j0, theta.value());
                let mut v = vec![Complex64::default(); block.len()];
                for (occ, a) in terms {
                    let c = block.iter().position(|o| o == occ).expect("term lies in its block");
                    for (r, slot) in v.iter_mut().enumerate() {
                        *slot += ub[(r, c)] * a;
                    }
                }
                for (occ, a) in block.into_iter().zip(v) {
                    out.insert(occ, a);
                }
            }
            out
        }
    }
}

/// Applies the network element by element to a sparse state.
pub fn evolve(spec: &AnyonSpec, network: &Network, state: &StateVector) -> Result<StateVector> {
    if network.modes() != state.modes() {
        return Err(Error::ModeMismatch { expected: network.modes(), got: state.modes() });
    }
    state.validate(spec)?;
    let mut st = state.clone();
    for e in network.elements() {
        st = apply_element(spec, e, &st);
    }
    Ok(st)
}

/// `G^{n phi}_ij(theta) = e^{i n phi J3_ij} BS_ij(theta) e^{-i n phi J3_ij}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GOperator {
    pub i: usize,
    pub j: usize,
    pub n: i64,
    pub theta: Angle,
}

pub fn g_operator_matrix(spec: &AnyonSpec, sector: &Arc<FockSector>, g: &GOperator) -> Result<OperatorMatrix> {
    let bs = element_unitary(spec, sector, &Element::bs(g.i, g.j, g.theta))?;
    let j3 = su2_generators(spec, sector, g.i, g.j)?.j3;
    let angle = g.n as f64 * spec.phi();
    let left = OperatorMatrix::square(sector.clone(), linalg::expm_hermitian(j3.matrix(), angle));
    let right = left.adjoint();
    Ok(left.compose(&bs).compose(&right))
}

/// `BS_ij(theta) chi†_{m_1} ... chi†_{m_k} |0>` through the propagation identities.
///
/// With `i < j` (the generator is symmetric, so the pair is reordered) and
/// `c = cos theta`, `s = sin theta`:
///
/// - `G^n chi†_i = (c chi†_i + i e^{-i n phi} s chi†_j) G^{n+1}`
/// - `G^n chi†_j = (c chi†_j + i e^{i n phi} s chi†_i) G^{n+1}`
/// - `G^n chi†_k = chi†_k G^{n+2}` for `i < k < j`
///
/// - `G^n chi†_k = chi†_k G^n` for `k < i` or `k > j`: the pair keeps
///   `n_i + n_j`, so the string phases on either side cancel
///
/// and `G` leaves the vacuum alone.
pub fn propagate_algebraic(spec: &AnyonSpec, network: &Network, monomial: &[usize]) -> Result<StateVector> {
    let (i, j, theta) = match network.elements() {
        [Element::Bs { i, j, theta }] => ((*i).min(*j), (*i).max(*j), theta.value()),
        _ => return Err(Error::UnsupportedPropagation("network must consist of exactly one beam splitter".into())),
    };
    let m = network.modes();
    for &k in monomial {
        check_mode(k, m)?;
    }
    let (c, s) = (theta.cos(), theta.sin());
    let ic = Complex64::i();
    let mut terms: Vec<(Complex64, Vec<usize>)> = vec![(Complex64::new(1.0, 0.0), Vec::new())];
    let mut n: i64 = 0;
    for &k in monomial {
        let mut next = Vec::with_capacity(terms.len() * 2);
        if k == i || k == j {
            let (other, wind) = if k == i { (j, -n) } else { (i, n) };
            let cross = ic * spec.exchange(wind) * s;
            for (coef, ops) in terms {
                let mut stay = ops.clone();
                stay.push(k);
                next.push((coef * c, stay));
                let mut moved = ops;
                moved.push(other);
                next.push((coef * cross, moved));
            }
            n += 1;
        } else {
            for (coef, mut ops) in terms {
                ops.push(k);
                next.push((coef, ops));
            }
            if i < k && k < j {
                n += 2;
            }
        }
        terms = next;
    }
    let mut out = StateVector::zero(m);
    for (coef, ops) in terms {
        if coef.norm() == 0.0 {
            continue;
        }
        out = out.add_scaled(coef, &monomial_state(spec, m, &ops)?)?;
    }
    Ok(out)
}
