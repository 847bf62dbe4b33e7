//! Dual-rail qubits on anyonic modes.
//!
//! Qubit `q` occupies modes `3q - 2` and `3q - 1`; `|0_L> = |1,0>`,
//! `|1_L> = |0,1>`. Between consecutive qubits sits one auxiliary mode
//! (`3q`) holding a single particle, which the controlled-phase gate borrows
//! and returns. Logical basis index `b` has qubit 1 as its most significant bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{AnyonSpec, Occupation, StateVector};
use crate::linalg::{self, CMatrix};
use crate::network::{build_braiding_network, evolve, Element, Network};
use crate::{Error, Result};

const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalLayout {
    num_qubits: usize,
    qubit_modes: Vec<(usize, usize)>,
    aux_modes: Vec<usize>,
}

impl LogicalLayout {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidParameter("layout needs at least one qubit".into()));
        }
        let qubit_modes = (0..num_qubits).map(|q| (3 * q + 1, 3 * q + 2)).collect();
        let aux_modes = (1..num_qubits).map(|q| 3 * q).collect();
        Ok(Self { num_qubits, qubit_modes, aux_modes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Total mode count: two per qubit plus one auxiliary between neighbours.
    pub fn modes(&self) -> usize {
        3 * self.num_qubits - 1
    }

    /// Physical particle number, conserved by every compiled network.
    pub fn particles(&self) -> u32 {
        (2 * self.num_qubits - 1) as u32
    }

    pub fn qubit_modes(&self) -> &[(usize, usize)] {
        &self.qubit_modes
    }

    pub fn aux_modes(&self) -> &[usize] {
        &self.aux_modes
    }

    /// Mode pair of a 1-based qubit.
    pub fn pair(&self, qubit: usize) -> Result<(usize, usize)> {
        self.check_qubit(qubit)?;
        Ok(self.qubit_modes[qubit - 1])
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit == 0 || qubit > self.num_qubits {
            Err(Error::Compile(format!("qubit {qubit} out of range 1..={}", self.num_qubits)))
        } else {
            Ok(())
        }
    }

    /// Occupation encoding logical basis index `b`.
    pub fn basis_occupation(&self, b: usize) -> Occupation {
        let mut occ = vec![0u32; self.modes()];
        for q in 0..self.num_qubits {
            let bit = (b >> (self.num_qubits - 1 - q)) & 1;
            let (first, second) = self.qubit_modes[q];
            occ[if bit == 0 { first } else { second } - 1] = 1;
        }
        for &a in &self.aux_modes {
            occ[a - 1] = 1;
        }
        Occupation::new(occ)
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }
}

/// Logical gates. `Rz(b) = e^{-i b Z/2}`, `Rx(g) = e^{-i g X/2}`,
/// `U1 = e^{i a} Rz(b) Rx(g) Rz(d)`, `Cp = diag(1, 1, 1, e^{i phi})` with the
/// exchange phase of the particles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LogicalGate {
    Rz { q: usize, beta: f64 },
    Rx { q: usize, gamma: f64 },
    U1 { q: usize, alpha: f64, beta: f64, gamma: f64, delta: f64 },
    Cp { a: usize, b: usize },
}

/// Product basis state for a bitstring such as `"01"` (qubit 1 first).
pub fn encode(layout: &LogicalLayout, bits: &str) -> Result<StateVector> {
    Ok(StateVector::basis_state(layout.basis_occupation(parse_bits(layout, bits)?)))
}

/// Logical basis index of a bitstring.
pub fn parse_bits(layout: &LogicalLayout, bits: &str) -> Result<usize> {
    if bits.len() != layout.num_qubits() {
        return Err(Error::InvalidBitstring(format!(
            "'{bits}' has {} bits, layout has {} qubits",
            bits.len(),
            layout.num_qubits()
        )));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidBitstring(format!("'{bits}' contains '{ch}'"))),
    })
}

/// Logical amplitudes and the weight lost outside the code space.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub amplitudes: Vec<Complex64>,
    pub leakage: f64,
}

pub fn decode(layout: &LogicalLayout, state: &StateVector) -> Result<Decoded> {
    if state.modes() != layout.modes() {
        return Err(Error::ModeMismatch { expected: layout.modes(), got: state.modes() });
    }
    let amplitudes: Vec<Complex64> = (0..layout.dim()).map(|b| state.amplitude(&layout.basis_occupation(b))).collect();
    let inside: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let leakage = (state.norm_sqr() - inside).max(0.0);
    Ok(Decoded { amplitudes, leakage })
}

/// Angles `(alpha, beta, gamma, delta)` with `U = e^{i alpha} Rz(beta) Rx(gamma) Rz(delta)`.
pub fn euler_zxz(u: &CMatrix) -> Result<(f64, f64, f64, f64)> {
    if u.shape() != (2, 2) || linalg::unitarity_residual(u) > 1e-9 {
        return Err(Error::Compile("target is not a 2x2 unitary".into()));
    }
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let gamma = 2.0 * u10.norm().atan2(u00.norm());
    // diagonal entries fix beta + delta, off-diagonal ones beta - delta
    let sum = if u00.norm() > SINGULAR_EPS { u11.arg() - u00.arg() } else { 0.0 };
    let diff = if u10.norm() > SINGULAR_EPS { u10.arg() - u01.arg() } else { 0.0 };
    let alpha_for = |beta: f64, delta: f64| {
        if u00.norm() >= u10.norm() {
            u00.arg() + (beta + delta) / 2.0
        } else {
            u10.arg() - (beta - delta) / 2.0 + PI / 2.0
        }
    };
    // halving sum and diff leaves a relative sign between the diagonal and
    // off-diagonal entries undetermined; shifting (beta, delta) by (pi, -pi) flips it
    let mut beta = (sum + diff) / 2.0;
    let mut delta = (sum - diff) / 2.0;
    let mut alpha = alpha_for(beta, delta);
    if linalg::max_abs(&(euler_matrix(alpha, beta, gamma, delta) - u)) > 1e-8 {
        beta += PI;
        delta -= PI;
        alpha = alpha_for(beta, delta);
    }
    Ok((alpha, beta, gamma, delta))
}

/// `e^{i alpha} Rz(beta) Rx(gamma) Rz(delta)` on a qubit pair.
///
/// `PS(tau)` on the second mode is `e^{i tau/2} Rz(tau)` and `BS(theta)` on the
/// pair is `Rx(-2 theta)`, so the network is `PS(delta)`, `BS(-gamma/2)`,
/// `PS(beta)` in application order. Its logical action differs from the
/// target by the global phase `e^{i((beta + delta)/2 - alpha)}`.
pub fn compile_single_qubit(
    layout: &LogicalLayout,
    qubit: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<Network> {
    for x in [alpha, beta, gamma, delta] {
        if !x.is_finite() {
            return Err(Error::NonFiniteAngle(x));
        }
    }
    let (first, second) = layout.pair(qubit)?;
    Network::new(
        layout.modes(),
        vec![Element::ps(second, delta), Element::bs(first, second, -gamma / 2.0), Element::ps(second, beta)],
    )
}

/// Network for an arbitrary 2x2 unitary on one qubit.
pub fn compile_unitary(layout: &LogicalLayout, qubit: usize, u: &CMatrix) -> Result<Network> {
    let (alpha, beta, gamma, delta) = euler_zxz(u)?;
    compile_single_qubit(layout, qubit, alpha, beta, gamma, delta)
}

/// Controlled phase on neighbouring qubits: the braiding network on
/// (second mode of the lower qubit, auxiliary, first mode of the upper qubit).
pub fn compile_cp(layout: &LogicalLayout, qubit_a: usize, qubit_b: usize) -> Result<Network> {
    layout.check_qubit(qubit_a)?;
    layout.check_qubit(qubit_b)?;
    let (lo, hi) = (qubit_a.min(qubit_b), qubit_a.max(qubit_b));
    if hi != lo + 1 {
        return Err(Error::Compile(format!("controlled phase needs adjacent qubits, got {qubit_a} and {qubit_b}")));
    }
    let targets = [layout.pair(lo)?.1, layout.aux_modes[lo - 1], layout.pair(hi)?.0];
    build_braiding_network().embed(layout.modes(), |k| targets[k - 1])
}

pub fn compile_gate(layout: &LogicalLayout, gate: &LogicalGate) -> Result<Network> {
    match *gate {
        LogicalGate::Rz { q, beta } => compile_single_qubit(layout, q, 0.0, beta, 0.0, 0.0),
        LogicalGate::Rx { q, gamma } => compile_single_qubit(layout, q, 0.0, 0.0, gamma, 0.0),
        LogicalGate::U1 { q, alpha, beta, gamma, delta } => compile_single_qubit(layout, q, alpha, beta, gamma, delta),
        LogicalGate::Cp { a, b } => compile_cp(layout, a, b),
    }
}

/// Concatenation of the compiled gates.
pub fn compile_circuit(layout: &LogicalLayout, gates: &[LogicalGate]) -> Result<Network> {
    let mut net = Network::empty(layout.modes())?;
    for g in gates {
        net = net.then(&compile_gate(layout, g)?)?;
    }
    Ok(net)
}

/// Compiles, evolves `bits` and decodes.
pub fn simulate_circuit(
    spec: &AnyonSpec,
    layout: &LogicalLayout,
    gates: &[LogicalGate],
    bits: &str,
) -> Result<Decoded> {
    let net = compile_circuit(layout, gates)?;
    decode(layout, &evolve(spec, &net, &encode(layout, bits)?)?)
}

/// `2^q x 2^q` logical matrix of a network together with the worst leakage over basis inputs.
pub fn logical_matrix(spec: &AnyonSpec, layout: &LogicalLayout, network: &Network) -> Result<(CMatrix, f64)> {
    let d = layout.dim();
    let mut m = CMatrix::zeros(d, d);
    let mut leak: f64 = 0.0;
    for b in 0..d {
        let out = evolve(spec, network, &StateVector::basis_state(layout.basis_occupation(b)))?;
        let dec = decode(layout, &out)?;
        leak = leak.max(dec.leakage);
        for (r, a) in dec.amplitudes.into_iter().enumerate() {
            m[(r, b)] = a;
        }
    }
    Ok((m, leak))
}

/// Intended logical matrix of one gate on the full register.
pub fn gate_target(gate: &LogicalGate, num_qubits: usize, phi: f64) -> Result<CMatrix> {
    let d = 1usize << num_qubits;
    let bit = |b: usize, q: usize| (b >> (num_qubits - q)) & 1;
    let check = |q: usize| {
        if q == 0 || q > num_qubits {
            Err(Error::Compile(format!("qubit {q} out of range 1..={num_qubits}")))
        } else {
            Ok(())
        }
    };
    let (q, u) = match *gate {
        LogicalGate::Cp { a, b } => {
            check(a)?;
            check(b)?;
            return Ok(linalg::diag((0..d).map(|k| {
                if bit(k, a) == 1 && bit(k, b) == 1 {
                    Complex64::from_polar(1.0, phi)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })));
        }
        LogicalGate::Rz { q, beta } => (q, euler_matrix(0.0, beta, 0.0, 0.0)),
        LogicalGate::Rx { q, gamma } => (q, euler_matrix(0.0, 0.0, gamma, 0.0)),
        LogicalGate::U1 { q, alpha, beta, gamma, delta } => (q, euler_matrix(alpha, beta, gamma, delta)),
    };
    check(q)?;
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        for r in 0..2 {
            let row = (col & !(1 << (num_qubits - q))) | (r << (num_qubits - q));
            m[(row, col)] = u[(r, bit(col, q))];
        }
    }
    Ok(m)
}

/// `e^{i alpha} Rz(beta) Rx(gamma) Rz(delta)`.
pub fn euler_matrix(alpha: f64, beta: f64, gamma: f64, delta: f64) -> CMatrix {
    let rz = |t: f64| linalg::diag([Complex64::from_polar(1.0, -t / 2.0), Complex64::from_polar(1.0, t / 2.0)]);
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let rx = CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(c, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    );
    (rz(beta) * rx * rz(delta)).map(|z| z * Complex64::from_polar(1.0, alpha))
}

/// Largest entry of `got - e^{i chi} target`, with `chi` chosen on the target's
/// largest-magnitude entry.
pub fn phase_aligned_distance(target: &[Complex64], got: &[Complex64]) -> f64 {
    assert_eq!(target.len(), got.len(), "length mismatch");
    let Some(k) = (0..target.len()).max_by(|&a, &b| target[a].norm().total_cmp(&target[b].norm())) else {
        return 0.0;
    };
    let phase = if got[k].norm() > 0.0 && target[k].norm() > 0.0 {
        let r = got[k] / target[k];
        r / r.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    target.iter().zip(got).map(|(t, g)| (g - t * phase).norm()).fold(0.0, f64::max)
}

/// Operator Schmidt rank of a two-qubit matrix: the rank of its reshuffle
/// `R[(a c), (b d)] = U[(a b), (c d)]`. Product gates have rank 1.
pub fn operator_schmidt_rank(u: &CMatrix, tol: f64) -> usize {
    assert_eq!(u.shape(), (4, 4), "two-qubit matrix expected");
    let r = CMatrix::from_fn(4, 4, |row, col| {
        let (a, c) = (row >> 1, row & 1);
        let (b, d) = (col >> 1, col & 1);
        u[(2 * a + b, 2 * c + d)]
    });
    linalg::numerical_rank(&r, tol)
}
