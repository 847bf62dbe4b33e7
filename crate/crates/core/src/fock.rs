//! Occupation-number bases and the anyonic Fock action.
//!
//! A basis state `|n_1,...,n_m>` is the normally ordered product
//! `(chi†_1)^{n_1} ... (chi†_m)^{n_m} |0>` (divided by `sqrt(prod n_i!)` for
//! bosons). Creating a particle on mode `i` has to commute past the particles
//! on modes `k < i`, which is where the exchange phase enters:
//!
//! - bosonic anyons: `beta†_i |n> = e^{-i phi s} sqrt(n_i + 1) |n + e_i>`
//! - fermionic anyons: `xi†_i |n> = (-1)^s e^{-i phi s} |n + e_i>` if `n_i = 0`
//!
//! with `s = sum_{k<i} n_k`. The fermionic rule is the Jordan-Wigner string
//! `exp(-i phi N_{<i})` composed with the standard fermionic sign.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Amplitudes below this magnitude are dropped after every operator application.
pub const PRUNE_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticleClass {
    Bosonic,
    Fermionic,
}

impl fmt::Display for ParticleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticleClass::Bosonic => f.write_str("bosonic"),
            ParticleClass::Fermionic => f.write_str("fermionic"),
        }
    }
}

impl FromStr for ParticleClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bosonic" | "boson" | "b" => Ok(ParticleClass::Bosonic),
            "fermionic" | "fermion" | "f" => Ok(ParticleClass::Fermionic),
            other => Err(Error::InvalidParameter(format!("unknown particle class '{other}'"))),
        }
    }
}

/// Particle class together with the exchange phase `phi`, reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnyonSpec {
    class: ParticleClass,
    phi: f64,
}

impl AnyonSpec {
    /// Panics if `phi` is not finite; see [`AnyonSpec::try_new`].
    pub fn new(class: ParticleClass, phi: f64) -> Self {
        Self::try_new(class, phi).expect("exchange phase must be finite")
    }

    pub fn try_new(class: ParticleClass, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFiniteAngle(phi));
        }
        let mut phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { class, phi })
    }

    pub fn bosonic(phi: f64) -> Self {
        Self::new(ParticleClass::Bosonic, phi)
    }

    pub fn fermionic(phi: f64) -> Self {
        Self::new(ParticleClass::Fermionic, phi)
    }

    pub fn class(&self) -> ParticleClass {
        self.class
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_fermionic(&self) -> bool {
        self.class == ParticleClass::Fermionic
    }

    /// Same class, different exchange phase.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self::new(self.class, phi)
    }

    /// Largest allowed occupation of a single mode in a sector with `particles` particles.
    pub fn mode_cap(&self, particles: u32) -> u32 {
        match self.class {
            ParticleClass::Bosonic => particles,
            ParticleClass::Fermionic => 1,
        }
    }

    /// `e^{i phi k}` for an integer winding `k`.
    pub fn exchange(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, self.phi * k as f64)
    }
}

/// Sign of `j - i`, or 0 when `i == j`.
pub fn sign_eps(i: usize, j: usize) -> i32 {
    match j.cmp(&i) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// Per-mode particle counts labelling a Fock basis state.
///
/// Ordering: fewer modes first, then fewer particles, then lexicographically
/// *decreasing* counts. Inside a fixed-number sector this is the canonical
/// basis order `(2,0) < (1,1) < (0,2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    /// Single particle on `mode` (1-based).
    pub fn single(modes: usize, mode: usize) -> Result<Self> {
        check_mode(mode, modes)?;
        let mut occ = vec![0; modes];
        occ[mode - 1] = 1;
        Ok(Occupation(occ))
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    /// Occupation of `mode` (1-based). Panics when out of range.
    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode - 1]
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Number of particles strictly to the left of 0-based position `idx`.
    pub(crate) fn count_below(&self, idx: usize) -> u32 {
        self.0[..idx].iter().sum()
    }

    pub(crate) fn with_delta(&self, idx: usize, delta: i32) -> Occupation {
        let mut v = self.0.clone();
        v[idx] = (v[idx] as i64 + delta as i64) as u32;
        Occupation(v)
    }

    pub(crate) fn set(&mut self, idx: usize, value: u32) {
        self.0[idx] = value;
    }
}

impl Ord for Occupation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.modes().cmp(&other.modes()).then(self.total().cmp(&other.total())).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Occupation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(v: [u32; N]) -> Self {
        Occupation(v.to_vec())
    }
}

pub(crate) fn check_mode(mode: usize, modes: usize) -> Result<()> {
    if mode == 0 || mode > modes {
        Err(Error::InvalidMode { mode, modes })
    } else {
        Ok(())
    }
}

/// Factor picked up by `chi†` on 0-based mode `idx`, or `None` when the result vanishes.
pub fn create_factor(spec: &AnyonSpec, occ: &Occupation, idx: usize) -> Option<Complex64> {
    let s = occ.count_below(idx) as i64;
    let n = occ.0[idx];
    let string = spec.exchange(-s);
    match spec.class {
        ParticleClass::Bosonic => Some(string * ((n + 1) as f64).sqrt()),
        ParticleClass::Fermionic if n == 0 => Some(if s % 2 == 0 { string } else { -string }),
        ParticleClass::Fermionic => None,
    }
}

/// Factor picked up by `chi` on 0-based mode `idx`, or `None` when the result vanishes.
pub fn annihilate_factor(spec: &AnyonSpec, occ: &Occupation, idx: usize) -> Option<Complex64> {
    let n = occ.0[idx];
    if n == 0 {
        return None;
    }
    let s = occ.count_below(idx) as i64;
    let string = spec.exchange(s);
    match spec.class {
        ParticleClass::Bosonic => Some(string * (n as f64).sqrt()),
        ParticleClass::Fermionic => Some(if s % 2 == 0 { string } else { -string }),
    }
}

/// `chi†_i chi_j` on a single basis state (0-based indices).
pub(crate) fn hop(spec: &AnyonSpec, occ: &Occupation, i: usize, j: usize) -> Option<(Occupation, Complex64)> {
    let a = annihilate_factor(spec, occ, j)?;
    let mid = occ.with_delta(j, -1);
    let c = create_factor(spec, &mid, i)?;
    Some((mid.with_delta(i, 1), a * c))
}

/// Complete basis of `particles` particles in `modes` modes with at most `cap` per mode.
#[derive(Debug, Clone)]
pub struct FockSector {
    modes: usize,
    particles: u32,
    cap: u32,
    basis: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl PartialEq for FockSector {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.particles == other.particles && self.cap == other.cap
    }
}

/// Canonical sector for the particle class: bosons are uncapped, fermions capped at one.
pub fn enumerate_sector(modes: usize, particles: u32, spec: &AnyonSpec) -> Result<FockSector> {
    FockSector::with_cap(modes, particles, spec.mode_cap(particles))
}

impl FockSector {
    pub fn with_cap(modes: usize, particles: u32, cap: u32) -> Result<Self> {
        if modes == 0 {
            return Err(Error::NoModes);
        }
        if particles as u64 > cap as u64 * modes as u64 {
            return Err(Error::EmptySector { modes, particles, cap });
        }
        let mut basis = Vec::new();
        let mut current = vec![0u32; modes];
        fill(&mut basis, &mut current, 0, particles, cap);
        let index = basis.iter().enumerate().map(|(k, b)| (b.clone(), k)).collect();
        Ok(Self { modes, particles, cap, basis, index })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> u32 {
        self.particles
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn contains(&self, occ: &Occupation) -> bool {
        self.index.contains_key(occ)
    }
}

// Depth-first fill with the largest admissible count first, which yields the
// lexicographically decreasing order directly.
fn fill(out: &mut Vec<Occupation>, current: &mut [u32], pos: usize, remaining: u32, cap: u32) {
    let modes = current.len();
    if pos + 1 == modes {
        if remaining <= cap {
            current[pos] = remaining;
            out.push(Occupation(current.to_vec()));
        }
        return;
    }
    let rest_capacity = cap as u64 * (modes - pos - 1) as u64;
    let hi = remaining.min(cap);
    for n in (0..=hi).rev() {
        if ((remaining - n) as u64) > rest_capacity {
            break;
        }
        current[pos] = n;
        fill(out, current, pos + 1, remaining - n, cap);
    }
    current[pos] = 0;
}

/// Sparse pure state over occupation-number basis states of a fixed mode count.
///
/// The state may mix particle numbers (truncated coherent states do); every
/// passive element acts on each fixed-number part separately.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateVector {
    modes: usize,
    amps: BTreeMap<Occupation, Complex64>,
}

impl StateVector {
    pub fn zero(modes: usize) -> Self {
        Self { modes, amps: BTreeMap::new() }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::basis_state(Occupation::vacuum(modes))
    }

    pub fn basis_state(occ: Occupation) -> Self {
        let modes = occ.modes();
        let mut amps = BTreeMap::new();
        amps.insert(occ, Complex64::new(1.0, 0.0));
        Self { modes, amps }
    }

    /// Sum of `(occupation, amplitude)` terms; repeated occupations add up.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut st = Self::zero(modes);
        for (occ, a) in terms {
            if occ.modes() != modes {
                return Err(Error::ModeMismatch { expected: modes, got: occ.modes() });
            }
            *st.amps.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        st.prune();
        Ok(st)
    }

    /// Dense vector over `sector`, in canonical basis order.
    pub fn from_dense(sector: &FockSector, v: &DVector<Complex64>) -> Self {
        let mut st = Self::zero(sector.modes());
        for (occ, &a) in sector.basis().iter().zip(v.iter()) {
            if a.norm() > PRUNE_EPS {
                st.amps.insert(occ.clone(), a);
            }
        }
        st
    }

    pub fn to_dense(&self, sector: &FockSector) -> Result<DVector<Complex64>> {
        let mut v = DVector::zeros(sector.dim());
        for (occ, &a) in &self.amps {
            let k = sector.index_of(occ).ok_or_else(|| Error::NotInSector {
                occ: occ.to_string(),
                modes: sector.modes(),
                particles: sector.particles(),
            })?;
            v[k] = a;
        }
        Ok(v)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < PRUNE_EPS {
            return Err(Error::DegenerateState("cannot normalize the zero vector"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.amps.values_mut() {
            *a *= c;
        }
        out.prune();
        out
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &StateVector) -> Result<Self> {
        if other.modes != self.modes {
            return Err(Error::ModeMismatch { expected: self.modes, got: other.modes });
        }
        let mut out = self.clone();
        for (occ, &a) in &other.amps {
            *out.amps.entry(occ.clone()).or_default() += c * a;
        }
        out.prune();
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().filter_map(|(occ, a)| other.amps.get(occ).map(|b| a.conj() * b)).sum()
    }

    /// `|<a|b>|^2 / (|a|^2 |b|^2)`; zero if either vector vanishes.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let d = self.norm_sqr() * other.norm_sqr();
        if d == 0.0 {
            return 0.0;
        }
        self.inner(other).norm_sqr() / d
    }

    /// Largest amplitude difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut worst: f64 = 0.0;
        for (occ, a) in &self.amps {
            worst = worst.max((a - other.amplitude(occ)).norm());
        }
        for (occ, b) in &other.amps {
            if !self.amps.contains_key(occ) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    /// Particle numbers present in the state, ascending.
    pub fn particle_numbers(&self) -> Vec<u32> {
        let mut ns: Vec<u32> = self.amps.keys().map(Occupation::total).collect();
        ns.dedup();
        ns
    }

    /// The fixed-number component with `particles` particles.
    pub fn project_number(&self, particles: u32) -> StateVector {
        let amps = self.amps.iter().filter(|(o, _)| o.total() == particles).map(|(o, a)| (o.clone(), *a)).collect();
        StateVector { modes: self.modes, amps }
    }

    /// Rejects occupations the particle class cannot hold.
    pub fn validate(&self, spec: &AnyonSpec) -> Result<()> {
        if spec.is_fermionic() {
            if let Some((occ, _)) = self.amps.iter().find(|(o, _)| o.max_count() > 1) {
                return Err(Error::PauliViolation { occ: occ.to_string() });
            }
        }
        Ok(())
    }

    /// `chi†_mode |state>` (1-based mode).
    pub fn apply_create(&self, spec: &AnyonSpec, mode: usize) -> Result<StateVector> {
        check_mode(mode, self.modes)?;
        self.map_terms(|occ| create_factor(spec, occ, mode - 1).map(|f| (occ.with_delta(mode - 1, 1), f)))
    }

    /// `chi_mode |state>` (1-based mode). Annihilating an empty mode gives zero.
    pub fn apply_annihilate(&self, spec: &AnyonSpec, mode: usize) -> Result<StateVector> {
        check_mode(mode, self.modes)?;
        self.map_terms(|occ| annihilate_factor(spec, occ, mode - 1).map(|f| (occ.with_delta(mode - 1, -1), f)))
    }

    /// `chi†_i chi_j |state>` (1-based modes).
    pub fn apply_hop(&self, spec: &AnyonSpec, i: usize, j: usize) -> Result<StateVector> {
        check_mode(i, self.modes)?;
        check_mode(j, self.modes)?;
        self.map_terms(|occ| hop(spec, occ, i - 1, j - 1))
    }

    /// `<n_mode>` normalized by the state's squared norm.
    pub fn number_expectation(&self, mode: usize) -> Result<f64> {
        check_mode(mode, self.modes)?;
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::DegenerateState("zero vector has no expectation values"));
        }
        let s: f64 = self.amps.iter().map(|(o, a)| a.norm_sqr() * o.get(mode) as f64).sum();
        Ok(s / n2)
    }

    /// Applies an occupation-diagonal phase `e^{i f(occ)}`.
    pub fn apply_diagonal_phase<F: Fn(&Occupation) -> f64>(&self, f: F) -> StateVector {
        let mut out = self.clone();
        for (occ, a) in out.amps.iter_mut() {
            *a *= Complex64::from_polar(1.0, f(occ));
        }
        out
    }

    fn map_terms<F>(&self, f: F) -> Result<StateVector>
    where
        F: Fn(&Occupation) -> Option<(Occupation, Complex64)>,
    {
        let mut out = StateVector::zero(self.modes);
        for (occ, &a) in &self.amps {
            if let Some((next, factor)) = f(occ) {
                *out.amps.entry(next).or_default() += a * factor;
            }
        }
        out.prune();
        Ok(out)
    }

    pub(crate) fn insert(&mut self, occ: Occupation, a: Complex64) {
        if a.norm() > PRUNE_EPS {
            self.amps.insert(occ, a);
        } else {
            self.amps.remove(&occ);
        }
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() > PRUNE_EPS);
    }
}

/// `chi†_{m_1} chi†_{m_2} ... chi†_{m_k} |0>`, the rightmost operator acting first.
pub fn monomial_state(spec: &AnyonSpec, modes: usize, monomial: &[usize]) -> Result<StateVector> {
    let mut st = StateVector::vacuum(modes);
    for &mode in monomial.iter().rev() {
        st = st.apply_create(spec, mode)?;
    }
    Ok(st)
}

/// Serialized form of one state-vector term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub occ: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl StateVector {
    pub fn to_entries(&self) -> Vec<AmplitudeEntry> {
        self.amps.iter().map(|(o, a)| AmplitudeEntry { occ: o.counts().to_vec(), re: a.re, im: a.im }).collect()
    }

    pub fn from_entries(modes: usize, entries: &[AmplitudeEntry]) -> Result<Self> {
        Self::from_terms(modes, entries.iter().map(|e| (Occupation::new(e.occ.clone()), Complex64::new(e.re, e.im))))
    }
}
