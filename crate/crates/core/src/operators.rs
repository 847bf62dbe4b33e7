//! Dense matrices of anyonic operators on fixed-number sectors.
//!
//! Every builder here walks the sector basis and applies the Fock-action rules
//! of [`crate::fock`] state by state, so all matrices share one phase
//! convention. [`jw_image`] is the exception: it builds the operator from the
//! standard-particle matrix and a diagonal string phase, and is used to check
//! the direct construction.

use std::sync::Arc;

use num_complex::Complex64;

use crate::fock::{
    annihilate_factor, check_mode, create_factor, enumerate_sector, hop, sign_eps, AnyonSpec, FockSector, Occupation,
    StateVector, PRUNE_EPS,
};
use crate::linalg::{self, CMatrix};
use crate::{Error, Result};

/// A dense matrix mapping one sector into another (usually itself).
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    domain: Arc<FockSector>,
    codomain: Arc<FockSector>,
    mat: CMatrix,
}

impl OperatorMatrix {
    pub fn new(domain: Arc<FockSector>, codomain: Arc<FockSector>, mat: CMatrix) -> Self {
        assert_eq!(mat.ncols(), domain.dim(), "column count must match the domain");
        assert_eq!(mat.nrows(), codomain.dim(), "row count must match the codomain");
        Self { domain, codomain, mat }
    }

    /// Operator from a sector to itself.
    pub fn square(sector: Arc<FockSector>, mat: CMatrix) -> Self {
        Self::new(sector.clone(), sector, mat)
    }

    pub fn zeros(sector: Arc<FockSector>) -> Self {
        let d = sector.dim();
        Self::square(sector, CMatrix::zeros(d, d))
    }

    pub fn identity(sector: Arc<FockSector>) -> Self {
        let d = sector.dim();
        Self::square(sector, CMatrix::identity(d, d))
    }

    /// The domain sector.
    pub fn sector(&self) -> &Arc<FockSector> {
        &self.domain
    }

    pub fn domain(&self) -> &Arc<FockSector> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FockSector> {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, row: &Occupation, col: &Occupation) -> Option<Complex64> {
        Some(self.mat[(self.codomain.index_of(row)?, self.domain.index_of(col)?)])
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        Self::new(self.codomain.clone(), self.domain.clone(), self.mat.adjoint())
    }

    /// `self * rhs`, i.e. `rhs` acts first.
    pub fn compose(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert!(*rhs.codomain == *self.domain, "sector mismatch in operator product");
        Self::new(rhs.domain.clone(), self.codomain.clone(), &self.mat * &rhs.mat)
    }

    pub fn plus(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        Self::new(self.domain.clone(), self.codomain.clone(), &self.mat + &rhs.mat)
    }

    pub fn minus(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        Self::new(self.domain.clone(), self.codomain.clone(), &self.mat - &rhs.mat)
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        Self::new(self.domain.clone(), self.codomain.clone(), self.mat.map(|z| z * c))
    }

    pub fn commutator(&self, rhs: &OperatorMatrix) -> OperatorMatrix {
        Self::square(self.domain.clone(), linalg::commutator(&self.mat, &rhs.mat))
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    /// Largest entry of `self - rhs`.
    pub fn distance(&self, rhs: &OperatorMatrix) -> f64 {
        linalg::max_abs(&(&self.mat - &rhs.mat))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.mat)
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.mat)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let v = state.to_dense(&self.domain)?;
        Ok(StateVector::from_dense(&self.codomain, &(&self.mat * v)))
    }

    /// Row-major `[[re, im], ...]` rows for debugging output.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.mat.nrows())
            .map(|r| (0..self.mat.ncols()).map(|c| [self.mat[(r, c)].re, self.mat[(r, c)].im]).collect())
            .collect()
    }
}

/// Builds a matrix column by column from a basis-state map.
pub(crate) fn from_basis_map<F>(domain: Arc<FockSector>, codomain: Arc<FockSector>, f: F) -> OperatorMatrix
where
    F: Fn(&Occupation) -> Option<(Occupation, Complex64)>,
{
    let mut mat = CMatrix::zeros(codomain.dim(), domain.dim());
    for (col, occ) in domain.basis().iter().enumerate() {
        if let Some((out, a)) = f(occ) {
            if a.norm() <= PRUNE_EPS {
                continue;
            }
            if let Some(row) = codomain.index_of(&out) {
                mat[(row, col)] += a;
            }
        }
    }
    OperatorMatrix::new(domain, codomain, mat)
}

fn neighbour_sector(spec: &AnyonSpec, sector: &FockSector, raise: bool) -> Result<Arc<FockSector>> {
    let n = if raise {
        sector.particles() + 1
    } else {
        sector.particles().checked_sub(1).ok_or_else(|| Error::InvalidParameter("no sector below the vacuum".into()))?
    };
    Ok(Arc::new(enumerate_sector(sector.modes(), n, spec)?))
}

/// Creation (`dagger = true`) or annihilation matrix on `mode`, built from the Fock action.
pub fn ladder_matrix(spec: &AnyonSpec, sector: &Arc<FockSector>, mode: usize, dagger: bool) -> Result<OperatorMatrix> {
    check_mode(mode, sector.modes())?;
    let idx = mode - 1;
    let target = neighbour_sector(spec, sector, dagger)?;
    Ok(if dagger {
        from_basis_map(sector.clone(), target, |occ| create_factor(spec, occ, idx).map(|f| (occ.with_delta(idx, 1), f)))
    } else {
        from_basis_map(sector.clone(), target, |occ| {
            annihilate_factor(spec, occ, idx).map(|f| (occ.with_delta(idx, -1), f))
        })
    })
}

/// `chi†_i chi_j` on the sector.
pub fn quadratic_matrix(spec: &AnyonSpec, sector: &Arc<FockSector>, i: usize, j: usize) -> Result<OperatorMatrix> {
    check_mode(i, sector.modes())?;
    check_mode(j, sector.modes())?;
    Ok(from_basis_map(sector.clone(), sector.clone(), |occ| hop(spec, occ, i - 1, j - 1)))
}

/// `n_i = chi†_i chi_i`.
pub fn number_matrix(sector: &Arc<FockSector>, i: usize) -> Result<OperatorMatrix> {
    check_mode(i, sector.modes())?;
    Ok(OperatorMatrix::square(
        sector.clone(),
        linalg::diag(sector.basis().iter().map(|o| Complex64::new(o.get(i) as f64, 0.0))),
    ))
}

/// `chi†_i chi†_j chi_k chi_l` on the sector.
pub fn quartic_matrix(
    spec: &AnyonSpec,
    sector: &Arc<FockSector>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<OperatorMatrix> {
    for m in [i, j, k, l] {
        check_mode(m, sector.modes())?;
    }
    let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
    Ok(from_basis_map(sector.clone(), sector.clone(), |occ| {
        let a = annihilate_factor(spec, occ, l)?;
        let o1 = occ.with_delta(l, -1);
        let b = annihilate_factor(spec, &o1, k)?;
        let o2 = o1.with_delta(k, -1);
        let c = create_factor(spec, &o2, j)?;
        let o3 = o2.with_delta(j, 1);
        let d = create_factor(spec, &o3, i)?;
        Some((o3.with_delta(i, 1), a * b * c * d))
    }))
}

/// The SU(2) generators of a mode pair.
#[derive(Debug, Clone)]
pub struct Su2Generators {
    pub j1: OperatorMatrix,
    pub j2: OperatorMatrix,
    pub j3: OperatorMatrix,
}

impl Su2Generators {
    /// Largest residual of `[J^k, J^l] = i eps_{klm} J^m` over the three independent pairs.
    pub fn algebra_residual(&self) -> f64 {
        let i = Complex64::i();
        let r12 = self.j1.commutator(&self.j2).distance(&self.j3.scale(i));
        let r23 = self.j2.commutator(&self.j3).distance(&self.j1.scale(i));
        let r31 = self.j3.commutator(&self.j1).distance(&self.j2.scale(i));
        r12.max(r23).max(r31)
    }
}

/// `J^1 = (chi†_i chi_j + chi†_j chi_i)/2`, `J^2 = -i(chi†_i chi_j - chi†_j chi_i)/2`,
/// `J^3 = (n_i - n_j)/2`.
pub fn su2_generators(spec: &AnyonSpec, sector: &Arc<FockSector>, i: usize, j: usize) -> Result<Su2Generators> {
    let ij = quadratic_matrix(spec, sector, i, j)?;
    let ji = quadratic_matrix(spec, sector, j, i)?;
    let ni = number_matrix(sector, i)?;
    let nj = number_matrix(sector, j)?;
    let half = Complex64::new(0.5, 0.0);
    Ok(Su2Generators {
        j1: ij.plus(&ji).scale(half),
        j2: ij.minus(&ji).scale(Complex64::new(0.0, -0.5)),
        j3: ni.minus(&nj).scale(half),
    })
}

/// `[chi†_i chi_j, chi†_k chi_l] - (delta_jk chi†_i chi_l - delta_il chi†_k chi_j)`,
/// the part of the commutator that falls outside the quadratic operators.
pub fn closure_defect(
    spec: &AnyonSpec,
    sector: &Arc<FockSector>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<OperatorMatrix> {
    let a = quadratic_matrix(spec, sector, i, j)?;
    let b = quadratic_matrix(spec, sector, k, l)?;
    let mut out = a.commutator(&b);
    if j == k {
        out = out.minus(&quadratic_matrix(spec, sector, i, l)?);
    }
    if i == l {
        out = out.plus(&quadratic_matrix(spec, sector, k, j)?);
    }
    Ok(out)
}

/// The closed-form coefficient `Delta_{ijkl}` multiplying `chi†_i chi†_j chi_k chi_l`:
/// `e^{-i phi eps_jk} - e^{-i phi (eps_li - eps_ki - eps_lj)}`, negated for fermionic anyons.
///
/// The formula reproduces [`closure_defect`] whenever `j == k`, `i == j`,
/// `k == l`, or the index pattern has no repeated modes and the two hops do not
/// interleave. For patterns that only repeat `i == k`, `i == l` or `j == l`,
/// and for interleaved hops such as `(1,3,2,4)`, the true defect is not this
/// multiple of the quartic operator.
pub fn delta_coefficient(spec: &AnyonSpec, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
    let phi = spec.phi();
    let first = Complex64::from_polar(1.0, -phi * sign_eps(j, k) as f64);
    let e = sign_eps(l, i) - sign_eps(k, i) - sign_eps(l, j);
    let second = Complex64::from_polar(1.0, -phi * e as f64);
    let d = first - second;
    if spec.is_fermionic() {
        -d
    } else {
        d
    }
}

/// `Delta_{ijkl} chi†_i chi†_j chi_k chi_l` as a matrix.
pub fn delta_quartic(
    spec: &AnyonSpec,
    sector: &Arc<FockSector>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<OperatorMatrix> {
    Ok(quartic_matrix(spec, sector, i, j, k, l)?.scale(delta_coefficient(spec, i, j, k, l)))
}

/// Jordan-Wigner image of the standard ladder operator on `mode`:
/// `e^{-i phi N_<i} x†_i` (creation) or `e^{i phi N_<i} x_i` (annihilation).
pub fn jw_image(spec: &AnyonSpec, sector: &Arc<FockSector>, mode: usize, dagger: bool) -> Result<OperatorMatrix> {
    let standard = ladder_matrix(&spec.with_phi(0.0), sector, mode, dagger)?;
    let sign = if dagger { -1.0 } else { 1.0 };
    let phi = spec.phi();
    let string = linalg::diag(
        standard
            .codomain()
            .basis()
            .iter()
            .map(|o| Complex64::from_polar(1.0, sign * phi * o.count_below(mode - 1) as f64)),
    );
    let codomain = standard.codomain().clone();
    let string = OperatorMatrix::square(codomain, string);
    Ok(string.compose(&standard))
}

/// Coefficients of a passive quadratic Hamiltonian `sum a_i n_i + sum_{i != j} b_ij chi†_i chi_j`.
///
/// Only the strict lower triangle of `b` is stored; the upper triangle is its
/// conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoeffs {
    a: Vec<f64>,
    lower: Vec<(usize, usize, Complex64)>,
}

impl QuadraticCoeffs {
    /// From a full `m x m` hopping matrix; rejects a non-zero diagonal or `b_ij != conj(b_ji)`.
    pub fn new(a: Vec<f64>, b: &CMatrix) -> Result<Self> {
        let m = a.len();
        if b.nrows() != m || b.ncols() != m {
            return Err(Error::InvalidCoefficients(format!(
                "hopping matrix is {}x{}, expected {m}x{m}",
                b.nrows(),
                b.ncols()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCoefficients("non-finite on-site energy".into()));
        }
        let mut lower = Vec::new();
        for r in 0..m {
            if b[(r, r)].norm() > crate::ATOL_ALGEBRA {
                return Err(Error::InvalidCoefficients(format!("non-zero diagonal b[{}][{}]", r + 1, r + 1)));
            }
            for c in 0..r {
                if (b[(r, c)] - b[(c, r)].conj()).norm() > crate::ATOL_ALGEBRA {
                    return Err(Error::InvalidCoefficients(format!(
                        "b[{}][{}] is not the conjugate of b[{}][{}]",
                        r + 1,
                        c + 1,
                        c + 1,
                        r + 1
                    )));
                }
                if b[(r, c)] != Complex64::default() {
                    lower.push((r + 1, c + 1, b[(r, c)]));
                }
            }
        }
        Ok(Self { a, lower })
    }

    /// From hopping terms `(i, j, b_ij)` with `i > j`, mirrored on build.
    pub fn from_lower(a: Vec<f64>, terms: &[(usize, usize, Complex64)]) -> Result<Self> {
        let m = a.len();
        for &(i, j, _) in terms {
            check_mode(i, m)?;
            check_mode(j, m)?;
            if i <= j {
                return Err(Error::InvalidCoefficients(format!("term ({i},{j}) is not strictly lower")));
            }
        }
        Ok(Self { a, lower: terms.to_vec() })
    }

    pub fn modes(&self) -> usize {
        self.a.len()
    }

    pub fn onsite(&self) -> &[f64] {
        &self.a
    }

    /// `b_ij` for 1-based modes.
    pub fn hopping(&self, i: usize, j: usize) -> Complex64 {
        self.lower
            .iter()
            .filter_map(|&(r, c, b)| {
                if (r, c) == (i, j) {
                    Some(b)
                } else if (r, c) == (j, i) {
                    Some(b.conj())
                } else {
                    None
                }
            })
            .sum()
    }
}

/// `H = sum a_i n_i + sum_{i != j} b_ij chi†_i chi_j` on the sector.
pub fn hamiltonian(spec: &AnyonSpec, sector: &Arc<FockSector>, coeffs: &QuadraticCoeffs) -> Result<OperatorMatrix> {
    if coeffs.modes() != sector.modes() {
        return Err(Error::ModeMismatch { expected: sector.modes(), got: coeffs.modes() });
    }
    let mut h = OperatorMatrix::zeros(sector.clone());
    for (k, &a) in coeffs.a.iter().enumerate() {
        if a != 0.0 {
            h = h.plus(&number_matrix(sector, k + 1)?.scale(Complex64::new(a, 0.0)));
        }
    }
    for &(i, j, b) in &coeffs.lower {
        h = h.plus(&quadratic_matrix(spec, sector, i, j)?.scale(b));
        h = h.plus(&quadratic_matrix(spec, sector, j, i)?.scale(b.conj()));
    }
    Ok(h)
}

/// `K = (n_i + n_j)(n_i + n_j - 1)/2`, diagonal in the Fock basis.
pub fn kerr_hamiltonian(sector: &Arc<FockSector>, i: usize, j: usize) -> Result<OperatorMatrix> {
    check_mode(i, sector.modes())?;
    check_mode(j, sector.modes())?;
    Ok(OperatorMatrix::square(
        sector.clone(),
        linalg::diag(sector.basis().iter().map(|o| {
            let n = (o.get(i) + o.get(j)) as f64;
            Complex64::new(n * (n - 1.0) / 2.0, 0.0)
        })),
    ))
}
