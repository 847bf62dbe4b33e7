use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fs;
use std::path::PathBuf;
use std::process::Command;

use anyonlin::{Angle, Element, Network};
use anyonlin_cli::dsl::{parse_network, serialize_network};
use anyonlin_cli::execute;
use proptest::prelude::*;
use serde_json::Value;

fn run(args: &[&str]) -> anyonlin_cli::Outcome {
    execute(std::iter::once("anyonlin").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn amp(v: &Value, occ: &[u32]) -> (f64, f64) {
    let a = v["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["occ"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as u32).eq(occ.iter().copied()));
    a.map_or((0.0, 0.0), |a| (a["re"].as_f64().unwrap(), a["im"].as_f64().unwrap()))
}

fn close(got: (f64, f64), want: (f64, f64)) -> bool {
    (got.0 - want.0).hypot(got.1 - want.1) < 1e-10
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("anyonlin-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn hom_at_zero_phase() {
    let v = json(&["hom", "--phi", "0"]);
    assert!(close(amp(&v, &[2, 0]), (0.0, FRAC_1_SQRT_2)));
    assert!(close(amp(&v, &[0, 2]), (0.0, FRAC_1_SQRT_2)));
    assert!(close(amp(&v, &[1, 1]), (0.0, 0.0)));
    assert_eq!(v["class"], "bosonic");
    assert_eq!(v["input"], "|1,1>");
}

#[test]
fn braid_imprints_exchange_phase() {
    let v = json(&["braid", "--phi", "1.0", "--input", "|1,1,0>"]);
    assert!(close(amp(&v, &[1, 1, 0]), (1.0f64.cos(), 1.0f64.sin())));
    let v = json(&["braid", "--phi", "1.0", "--class", "fermionic", "--input", "|1,0,1>", "--check"]);
    assert!(close(amp(&v, &[1, 0, 1]), (1.0f64.cos(), -1.0f64.sin())));
}

#[test]
fn fermionic_mirror_reflects_single_particle() {
    let net = temp_file("mirror.net", "modes 2\nps 2 pi/2\nbs 1 2 pi/2\nps 1 pi/2\n");
    let v =
        json(&["run", "--phi", "0", "--class", "fermionic", "--network", net.to_str().unwrap(), "--input", "|1,0>"]);
    // single-particle matrix [[0, -i], [i, 0]]
    assert!(close(amp(&v, &[0, 1]), (0.0, 1.0)));
    assert!(close(amp(&v, &[1, 0]), (0.0, 0.0)));
}

#[test]
fn dumped_unitary_matches_single_particle_matrix() {
    let net = temp_file("bs.net", "modes 2\nbs 1 2 0.3\n");
    let v = json(&["run", "--phi", "0.4", "--network", net.to_str().unwrap(), "--input", "|0,1>", "--dump-unitary"]);
    let u = &v["unitaries"][0];
    assert_eq!(u["particles"], 1);
    let m = |r: usize, c: usize| (u["matrix"][r][c][0].as_f64().unwrap(), u["matrix"][r][c][1].as_f64().unwrap());
    assert!(close(m(0, 0), (0.3f64.cos(), 0.0)));
    assert!(close(m(0, 1), (0.0, 0.3f64.sin())));
}

#[test]
fn superposition_input_is_normalized() {
    let net = temp_file("id.net", "modes 2\n");
    let v = json(&["run", "--network", net.to_str().unwrap(), "--input", "0.7071*|2,0> + 0.7071*|0,2>"]);
    assert!(close(amp(&v, &[2, 0]), (FRAC_1_SQRT_2, 0.0)));
    let v = json(&["run", "--network", net.to_str().unwrap(), "--input", "3*|2,0>", "--no-normalize"]);
    assert!(close(amp(&v, &[2, 0]), (3.0, 0.0)));
}

#[test]
fn exit_codes() {
    let net = temp_file("m2.net", "modes 2\nbs 1 2 pi/4\n");
    let bad_net = temp_file("bad.net", "modes 2\nbs 1 3 pi/4\n");
    let n = net.to_str().unwrap();
    assert_eq!(run(&["run", "--class", "fermionic", "--network", n, "--input", "|1,2>"]).code, 2);
    let out = run(&["run", "--network", bad_net.to_str().unwrap(), "--input", "|1,0>"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2") && out.stderr.contains("mode 3 out of range"), "{}", out.stderr);
    assert_eq!(run(&["run", "--network", n, "--input", "|1,0,0>"]).code, 2);
    assert_eq!(run(&["hom", "--phi", "nan"]).code, 2);
    assert_eq!(run(&["hom", "--class", "anyonic"]).code, 2);
    assert_eq!(run(&["cat", "--phi", "1.0"]).code, 2);
    assert_eq!(run(&["nonsense"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn check_modes_and_error_classes() {
    use anyonlin::ParticleClass;
    use anyonlin_cli::commands::{cmd_compile, CircuitSpec, CliError, RunConfig};
    let circuit = temp_file("rx.json", r#"{"qubits":1,"phi":0.5,"gates":[{"type":"rx","q":1,"gamma":0.7}]}"#);
    let ok = run(&["compile", "--circuit", circuit.to_str().unwrap(), "--check"]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    // no closed form for double occupation
    assert_eq!(run(&["braid", "--input", "|2,0,0>", "--check"]).code, 2);
    // non-adjacent controlled phase is a compile (validation) error
    let cfg = RunConfig::new(ParticleClass::Bosonic, Angle::radians(1.0).unwrap(), true).unwrap();
    let far = CircuitSpec::from_json(r#"{"qubits":3,"gates":[{"type":"cp","a":1,"b":3}]}"#).unwrap();
    assert_eq!(cmd_compile(&cfg, &far, None).unwrap_err().exit_code(), 2);
    assert!(CircuitSpec::from_json(r#"{"qubits":1,"gates":[],"extra":1}"#).is_err());
    assert_eq!(CliError::Check("off".into()).exit_code(), 3);
}

#[test]
fn compile_circuit_matches_cp_phase() {
    let circuit =
        temp_file("cp.json", r#"{"qubits":2,"phi":"pi/2","class":"fermionic","gates":[{"type":"cp","a":1,"b":2}]}"#);
    let v = json(&["compile", "--circuit", circuit.to_str().unwrap(), "--input", "11", "--check"]);
    let l = &v["logical"][3];
    assert_eq!(l["bits"], "11");
    assert!(close((l["re"].as_f64().unwrap(), l["im"].as_f64().unwrap()), (0.0, 1.0)));
    assert_eq!(v["class"], "fermionic");
    // flags override the file
    let v = json(&[
        "compile",
        "--circuit",
        circuit.to_str().unwrap(),
        "--input",
        "11",
        "--phi",
        "pi",
        "--class",
        "bosonic",
    ]);
    let l = &v["logical"][3];
    assert!(close((l["re"].as_f64().unwrap(), l["im"].as_f64().unwrap()), (-1.0, 0.0)));
    assert_eq!(v["class"], "bosonic");
}

#[test]
fn compile_needs_a_phase() {
    let circuit = temp_file("nophi.json", r#"{"qubits":1,"gates":[]}"#);
    let out = run(&["compile", "--circuit", circuit.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--phi"));
}

#[test]
fn haar_harness_is_seeded() {
    let a = run(&["compile", "--haar", "20", "--seed", "3", "--check"]);
    let b = run(&["compile", "--haar", "20", "--seed", "3", "--check"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    let dev = v["metrics"].as_array().unwrap().iter().find(|m| m["name"] == "max_deviation").unwrap();
    assert!(dev["value"].as_f64().unwrap() < 1e-9);
}

#[test]
fn cat_reports_fidelity() {
    let v = json(&["cat", "--u", "0.3-0.8i", "--check"]);
    assert!((v["phi"].as_f64().unwrap() - PI).abs() < 1e-15);
    let m = v["metrics"].as_array().unwrap();
    assert!(m[0]["value"].as_f64().unwrap() > 1.0 - 1e-8);
    // reflected amplitude i u
    assert!((m[1]["value"].as_f64().unwrap() - 0.8).abs() < 1e-15);
    assert!((m[2]["value"].as_f64().unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn coherent_family_through_beam_splitter() {
    let spec = temp_file("t1.json", r#"{"family":"type1","u":{"re":0.5,"im":0},"v":{"re":0,"im":0.5},"nmax":30}"#);
    let net = temp_file("bs2.net", "modes 2\nbs 1 2 0.4\n");
    let v = json(&[
        "coherent",
        "--phi",
        "0.9",
        "--family",
        spec.to_str().unwrap(),
        "--network",
        net.to_str().unwrap(),
        "--check",
    ]);
    assert!(v["metrics"][0]["value"].as_f64().unwrap() > 1.0 - 1e-8);
    let exact = temp_file("ex.json", r#"{"family":"exact_less","u":{"re":0.5,"im":0},"v":{"re":0,"im":0.5}}"#);
    let out =
        run(&["coherent", "--phi", "0.9", "--family", exact.to_str().unwrap(), "--network", net.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not closed"), "{}", out.stderr);
    let v = json(&["coherent", "--family", exact.to_str().unwrap(), "--nmax", "4"]);
    assert_eq!(v["amplitudes"].as_array().unwrap().len(), 15);
}

#[test]
fn table_output() {
    let out = run(&["hom", "--phi", "0", "--table"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("# hom"));
    assert!(out.stdout.contains("|2,0>"));
    assert_eq!(run(&["hom", "--json", "--table"]).code, 2);
}

#[test]
fn binary_matches_library_entry_point() {
    let out = Command::new(env!("CARGO_BIN_EXE_anyonlin")).args(["hom", "--phi", "pi/5"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), run(&["hom", "--phi", "pi/5"]).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_anyonlin")).args(["hom", "--phi", "x"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

fn element(m: usize) -> impl Strategy<Value = Element> {
    let angle = prop_oneof![
        (-PI..PI).prop_map(Angle::Radians),
        (-12i64..12, 1u64..9).prop_map(|(k, d)| Angle::pi_fraction(k, d)),
    ];
    prop_oneof![
        (1..=m, angle.clone()).prop_map(|(i, a)| Element::ps(i, a)),
        (1..=m, 1..=m, angle).prop_filter("distinct", |(i, j, _)| i != j).prop_map(|(i, j, a)| Element::bs(i, j, a)),
    ]
}

proptest! {
    #[test]
    fn dsl_round_trip(m in 2usize..6, elements in proptest::collection::vec(element(5), 0..12)) {
        let elements: Vec<Element> = elements.into_iter().filter(|e| e.validate(m).is_ok()).collect();
        let net = Network::new(m, elements).unwrap();
        prop_assert_eq!(parse_network(&serialize_network(&net)).unwrap(), net);
    }
}
