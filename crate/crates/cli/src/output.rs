//! Deterministic report rendering.
//!
//! Floats are written as `{:.16e}` (17 significant digits), `-0` as `0`, and
//! non-finite values as `null`; field order is the struct order.

use std::fmt::Write as _;
use std::io;

use anyonlin::fock::AmplitudeEntry;
use anyonlin::ParticleClass;
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalAmplitude {
    pub bits: String,
    pub re: f64,
    pub im: f64,
}

/// Unitary on one fixed-number sector, rows and columns in `basis` order,
/// entries as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorUnitary {
    pub particles: u32,
    pub basis: Vec<Vec<u32>>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub phi: f64,
    pub class: ParticleClass,
    pub amplitudes: Vec<AmplitudeEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logical: Option<Vec<LogicalAmplitude>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<SectorUnitary>>,
}

impl Report {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

struct FixedFloat(CompactFormatter);

impl FixedFloat {
    fn write<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
        if !v.is_finite() {
            return w.write_all(b"null");
        }
        let v = if v == 0.0 { 0.0 } else { v };
        write!(w, "{v:.16e}")
    }
}

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        Self::write(w, v)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        Self::write(w, v as f64)
    }
}

/// Compact JSON with fixed float formatting and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(CompactFormatter));
    value.serialize(&mut ser).expect("reports serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn occ_text(occ: &[u32]) -> String {
    let inner: Vec<String> = occ.iter().map(u32::to_string).collect();
    format!("|{}>", inner.join(","))
}

/// Aligned plain-text rendering for people.
pub fn to_table(r: &Report) -> String {
    let mut out = String::new();
    let w = |out: &mut String, s: String| out.push_str(&s);
    w(&mut out, format!("# {}  input {}  phi {:.12}  class {}\n", r.command, r.input, r.phi, r.class));
    let width = r.amplitudes.iter().map(|a| occ_text(&a.occ).len()).max().unwrap_or(5).max(5);
    w(&mut out, format!("{:<width$}  {:>20}  {:>20}  {:>14}\n", "state", "re", "im", "prob"));
    for a in &r.amplitudes {
        let p = a.re * a.re + a.im * a.im;
        writeln!(out, "{:<width$}  {:>20.12e}  {:>20.12e}  {:>14.10}", occ_text(&a.occ), a.re, a.im, p).unwrap();
    }
    if let Some(logical) = &r.logical {
        w(&mut out, "# logical amplitudes\n".into());
        for a in logical {
            writeln!(out, "{:<width$}  {:>20.12e}  {:>20.12e}", a.bits, a.re, a.im).unwrap();
        }
    }
    for m in &r.metrics {
        writeln!(out, "# {} = {:.16e}", m.name, m.value).unwrap();
    }
    if let Some(net) = &r.network {
        w(&mut out, "# network\n".into());
        for line in net {
            writeln!(out, "#   {line}").unwrap();
        }
    }
    out
}
