//! Subcommand implementations. Each returns a [`Report`] or a [`CliError`]
//! whose exit code is 2 for bad input and 3 for a failed self-check.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use anyonlin::coherent::{evolve_family, mirror_cat, two_mode_family_state, CoherentFamily, Truncation};
use anyonlin::dualrail::{
    compile_circuit, compile_unitary, decode, encode, gate_target, logical_matrix, phase_aligned_distance, LogicalGate,
    LogicalLayout,
};
use anyonlin::fock::enumerate_sector;
use anyonlin::linalg::CMatrix;
use anyonlin::network::{build_braiding_network, evolve, network_unitary};
use anyonlin::{Angle, AnyonSpec, Complex64, Element, Network, ParticleClass, StateVector, ATOL_PHYSICS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use thiserror::Error;

use crate::dsl::{parse_network, serialize_network};
use crate::ket::{parse_complex, parse_state};
use crate::output::{LogicalAmplitude, Metric, Report, SectorUnitary};

/// Tolerance for compiled logical gates against their targets.
pub const COMPILE_TOL: f64 = 1e-9;
/// Fidelity shortfall allowed for coherent-state closed forms.
pub const FIDELITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("self-check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl From<anyonlin::Error> for CliError {
    fn from(e: anyonlin::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<crate::dsl::DslError> for CliError {
    fn from(e: crate::dsl::DslError) -> Self {
        CliError::Validation(format!("network: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub spec: AnyonSpec,
    /// Compare against a closed form and fail with exit code 3 on mismatch.
    pub check: bool,
}

impl RunConfig {
    pub fn new(class: ParticleClass, phi: Angle, check: bool) -> CliResult<Self> {
        Ok(Self { spec: AnyonSpec::try_new(class, phi.value())?, check })
    }

    fn report(&self, command: &str, input: String, out: &StateVector) -> Report {
        Report {
            command: command.into(),
            input,
            phi: self.spec.phi(),
            class: self.spec.class(),
            amplitudes: out.to_entries(),
            metrics: Vec::new(),
            logical: None,
            network: None,
            unitaries: None,
        }
    }
}

fn metric(name: &str, value: f64) -> Metric {
    Metric { name: name.into(), value }
}

fn require(ok: bool, what: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Check(what()))
    }
}

fn network_lines(net: &Network) -> Vec<String> {
    serialize_network(net).lines().map(str::to_owned).collect()
}

fn sector_unitaries(spec: &AnyonSpec, net: &Network, state: &StateVector) -> CliResult<Vec<SectorUnitary>> {
    let mut out = Vec::new();
    for n in state.particle_numbers() {
        let s = Arc::new(enumerate_sector(net.modes(), n, spec)?);
        let u = network_unitary(spec, &s, net)?;
        let m = u.matrix();
        out.push(SectorUnitary {
            particles: n,
            basis: s.basis().iter().map(|o| o.counts().to_vec()).collect(),
            matrix: (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect(),
        });
    }
    Ok(out)
}

/// Arbitrary network from DSL text on a ket expression.
pub fn cmd_run(cfg: &RunConfig, network_text: &str, input: &str, normalize: bool, dump: bool) -> CliResult<Report> {
    let net = parse_network(network_text)?;
    let state = parse_state(input, &cfg.spec, normalize).map_err(invalid)?;
    if state.modes() != net.modes() {
        return Err(invalid(format!("input has {} modes, network has {}", state.modes(), net.modes())));
    }
    let out = evolve(&cfg.spec, &net, &state)?;
    let mut r = cfg.report("run", input.into(), &out);
    let drift = (out.norm() - state.norm()).abs();
    r.metrics.push(metric("norm_drift", drift));
    r.network = Some(network_lines(&net));
    if dump {
        r.unitaries = Some(sector_unitaries(&cfg.spec, &net, &state)?);
    }
    if cfg.check {
        require(drift < ATOL_PHYSICS, || format!("norm changed by {drift:e}"))?;
    }
    Ok(r)
}

/// Phase the braiding network imprints on a basis state with at most one
/// particle per mode: `e^{i phi}` on `|1,1,0>`, `e^{-i phi}` on `|1,0,1>`, else 1.
fn braid_phase(counts: &[u32], phi: f64) -> Option<Complex64> {
    match counts {
        [a, b, c] if *a <= 1 && *b <= 1 && *c <= 1 => Some(match (a, b, c) {
            (1, 1, 0) => Complex64::from_polar(1.0, phi),
            (1, 0, 1) => Complex64::from_polar(1.0, -phi),
            _ => Complex64::new(1.0, 0.0),
        }),
        _ => None,
    }
}

pub fn cmd_braid(cfg: &RunConfig, input: &str, normalize: bool) -> CliResult<Report> {
    let net = build_braiding_network();
    let state = parse_state(input, &cfg.spec, normalize).map_err(invalid)?;
    if state.modes() != 3 {
        return Err(invalid(format!("braiding acts on 3 modes, input has {}", state.modes())));
    }
    let out = evolve(&cfg.spec, &net, &state)?;
    let mut r = cfg.report("braid", input.into(), &out);
    r.network = Some(network_lines(&net));
    if cfg.check {
        let mut terms = Vec::new();
        for (occ, a) in state.iter() {
            let ph = braid_phase(occ.counts(), cfg.spec.phi())
                .ok_or_else(|| invalid(format!("no closed form for {occ}: occupations must be at most 1")))?;
            terms.push((occ.clone(), ph * a));
        }
        let want = StateVector::from_terms(3, terms)?;
        let d = want.max_abs_diff(&out);
        r.metrics.push(metric("max_deviation", d));
        require(d < ATOL_PHYSICS, || format!("braiding phases off by {d:e}"))?;
    }
    Ok(r)
}

/// Two particles on `BS_12(theta)`.
pub fn cmd_hom(cfg: &RunConfig, theta: Angle) -> CliResult<Report> {
    let net = Network::new(2, vec![Element::bs(1, 2, theta)])?;
    let input = "|1,1>";
    let state = parse_state(input, &cfg.spec, true).map_err(invalid)?;
    let out = evolve(&cfg.spec, &net, &state)?;
    let mut r = cfg.report("hom", input.into(), &out);
    r.metrics.push(metric("coincidence_probability", out.amplitude(&[1, 1].into()).norm_sqr()));
    r.network = Some(network_lines(&net));
    if cfg.check {
        // closed forms: exclusion for fermionic anyons at any angle, anyonic HOM at pi/4
        let want = if cfg.spec.is_fermionic() {
            Some(state.clone())
        } else if (theta.value() - PI / 4.0).abs() < 1e-15 {
            let i = Complex64::new(0.0, FRAC_1_SQRT_2);
            let terms = [([2, 0].into(), i * Complex64::from_polar(1.0, cfg.spec.phi())), ([0, 2].into(), i)];
            Some(StateVector::from_terms(2, terms)?)
        } else {
            None
        };
        if let Some(want) = want {
            let d = want.max_abs_diff(&out);
            r.metrics.push(metric("max_deviation", d));
            require(d < ATOL_PHYSICS, || format!("output off the closed form by {d:e}"))?;
        }
    }
    Ok(r)
}

/// Circuit file for `compile`. `phi` and `class` may instead come from flags.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub qubits: usize,
    #[serde(default)]
    pub phi: Option<Angle>,
    #[serde(default)]
    pub class: Option<ParticleClass>,
    pub gates: Vec<LogicalGate>,
}

impl CircuitSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("circuit: {e}")))
    }
}

fn bit_label(b: usize, n: usize) -> String {
    format!("{b:0n$b}")
}

/// Compile a logical circuit to a network and simulate it on `bits`.
pub fn cmd_compile(cfg: &RunConfig, circuit: &CircuitSpec, bits: Option<&str>) -> CliResult<Report> {
    let layout = LogicalLayout::new(circuit.qubits)?;
    let nq = circuit.qubits;
    let bits = bits.map(str::to_owned).unwrap_or_else(|| "0".repeat(nq));
    let net = compile_circuit(&layout, &circuit.gates)?;
    let state = encode(&layout, &bits)?;
    let out = evolve(&cfg.spec, &net, &state)?;
    let dec = decode(&layout, &out)?;
    let mut r = cfg.report("compile", bits.clone(), &out);
    r.logical = Some(
        dec.amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| LogicalAmplitude { bits: bit_label(b, nq), re: a.re, im: a.im })
            .collect(),
    );
    r.metrics.push(metric("leakage", dec.leakage));
    r.network = Some(network_lines(&net));
    if cfg.check {
        let mut v = CMatrix::zeros(layout.dim(), 1);
        v[(usize::from_str_radix(&bits, 2).expect("validated by encode"), 0)] = Complex64::new(1.0, 0.0);
        for g in &circuit.gates {
            v = gate_target(g, nq, cfg.spec.phi())? * v;
        }
        let d = phase_aligned_distance(v.as_slice(), &dec.amplitudes);
        r.metrics.push(metric("max_deviation", d));
        require(d < COMPILE_TOL && dec.leakage < ATOL_PHYSICS, || {
            format!("logical output off target by {d:e}, leakage {:e}", dec.leakage)
        })?;
    }
    Ok(r)
}

fn haar_su2(rng: &mut ChaCha8Rng) -> CMatrix {
    let q: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (Complex64::new(q[0] / n, q[1] / n), Complex64::new(q[2] / n, q[3] / n));
    CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// Compile `count` seeded Haar-random single-qubit targets and report the
/// worst deviation up to global phase.
pub fn cmd_compile_haar(cfg: &RunConfig, count: usize, seed: u64) -> CliResult<Report> {
    let layout = LogicalLayout::new(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut worst_leak) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let target = haar_su2(&mut rng);
        let net = compile_unitary(&layout, 1, &target)?;
        let (m, leak) = logical_matrix(&cfg.spec, &layout, &net)?;
        worst = worst.max(phase_aligned_distance(target.as_slice(), m.as_slice()));
        worst_leak = worst_leak.max(leak);
    }
    let mut r = cfg.report("compile", format!("haar:{count}:seed:{seed}"), &StateVector::zero(layout.modes()));
    r.metrics =
        vec![metric("targets", count as f64), metric("max_deviation", worst), metric("max_leakage", worst_leak)];
    if cfg.check {
        require(worst < COMPILE_TOL && worst_leak < ATOL_PHYSICS, || {
            format!("worst target deviation {worst:e}, leakage {worst_leak:e}")
        })?;
    }
    Ok(r)
}

/// Single-mode coherent state `|u>` on `mode` through the anyonic mirror at `phi = pi`.
pub fn cmd_cat(cfg: &RunConfig, u: Complex64, mode: usize, n_max: u32) -> CliResult<Report> {
    let trunc = Truncation::new(n_max)?;
    let m = mirror_cat(u, mode, &cfg.spec, trunc)?;
    let mut r = cfg.report("cat", format!("coherent u={} mode {mode} nmax {n_max}", fmt_complex(u)), &m.state);
    r.metrics = vec![
        metric("fidelity", m.fidelity),
        metric("reflected_re", m.reflected.re),
        metric("reflected_im", m.reflected.im),
        metric("output_mode", m.output_mode as f64),
    ];
    r.network = Some(network_lines(&anyonlin::coherent::mirror_network()));
    if cfg.check {
        require(m.fidelity >= 1.0 - FIDELITY_TOL, || format!("cat fidelity {}", m.fidelity))?;
    }
    Ok(r)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<JsonComplex> for Complex64 {
    fn from(z: JsonComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `{"family":"type1","u":{"re":0.5,"im":0},"v":{"re":0,"im":0.5},"nmax":40}`.
/// Families: `exact_less`, `exact_greater`, `type1`, `type2`, and `single`
/// (which reads `u` and `mode`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentSpec {
    pub family: String,
    pub u: JsonComplex,
    #[serde(default)]
    pub v: Option<JsonComplex>,
    #[serde(default)]
    pub mode: Option<usize>,
    #[serde(default)]
    pub nmax: Option<u32>,
}

impl CoherentSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("coherent spec: {e}")))
    }

    pub fn family(&self) -> CliResult<CoherentFamily> {
        let u = self.u.into();
        let v = || self.v.map(Complex64::from).ok_or_else(|| invalid(format!("family '{}' needs 'v'", self.family)));
        Ok(match self.family.as_str() {
            "exact_less" => CoherentFamily::ExactLess { u, v: v()? },
            "exact_greater" => CoherentFamily::ExactGreater { u, v: v()? },
            "type1" => CoherentFamily::Type1 { u, v: v()? },
            "type2" => CoherentFamily::Type2 { u, v: v()? },
            "single" => CoherentFamily::SingleMode { g: u, mode: self.mode.unwrap_or(1) },
            other => return Err(invalid(format!("unknown coherent family '{other}'"))),
        })
    }
}

/// Truncated two-mode family state, optionally sent through a 2-mode network.
/// With a network, the output is compared with the closed form of the
/// evolved family.
pub fn cmd_coherent(cfg: &RunConfig, spec: &CoherentSpec, network_text: Option<&str>) -> CliResult<Report> {
    let family = spec.family()?;
    let trunc = Truncation::new(spec.nmax.unwrap_or(Truncation::DEFAULT_N_MAX))?;
    let state = two_mode_family_state(&family, &cfg.spec, trunc)?;
    let input = format!("{} nmax {}", spec.family, trunc.n_max());
    let Some(text) = network_text else {
        return Ok(cfg.report("coherent", input, &state));
    };
    let net = parse_network(text)?;
    let out = evolve(&cfg.spec, &net, &state)?;
    let evolved = evolve_family(&family, &net, &cfg.spec)?;
    let closed = two_mode_family_state(&evolved, &cfg.spec, trunc)?;
    let (u, v) = evolved.amplitudes();
    let fidelity = out.fidelity(&closed);
    let mut r = cfg.report("coherent", input, &out);
    r.metrics = vec![
        metric("fidelity", fidelity),
        metric("u_re", u.re),
        metric("u_im", u.im),
        metric("v_re", v.re),
        metric("v_im", v.im),
    ];
    r.network = Some(network_lines(&net));
    if cfg.check {
        require(fidelity >= 1.0 - FIDELITY_TOL, || format!("family fidelity {fidelity}"))?;
    }
    Ok(r)
}

/// Parses `--u` style complex flags.
pub fn complex_arg(text: &str) -> CliResult<Complex64> {
    parse_complex(text).map_err(invalid)
}
