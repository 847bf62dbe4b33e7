//! Line-oriented network text format.
//!
//! ```text
//! # comment
//! modes 3
//! bs 2 3 pi/2
//! ps 1 -0.25
//! ```
//!
//! `modes` comes first; each later line is one element, applied in order.

use std::fmt::Write as _;

use anyonlin::{Angle, Element, Network};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DslError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DslError {
    DslError { line, message: message.into() }
}

fn parse_mode(tok: &str, line: usize, modes: usize) -> Result<usize, DslError> {
    let m: usize = tok.parse().map_err(|_| err(line, format!("malformed mode index '{tok}'")))?;
    if m == 0 || m > modes {
        return Err(err(line, format!("mode {m} out of range 1..={modes}")));
    }
    Ok(m)
}

fn parse_angle(tok: &str, line: usize) -> Result<Angle, DslError> {
    tok.parse().map_err(|_| err(line, format!("malformed angle '{tok}'")))
}

pub fn parse_network(text: &str) -> Result<Network, DslError> {
    let mut modes: Option<usize> = None;
    let mut elements = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let arity = |n: usize| {
            if toks.len() == n + 1 {
                Ok(())
            } else {
                Err(err(line, format!("'{}' takes {n} argument(s), got {}", toks[0], toks.len() - 1)))
            }
        };
        match (toks[0], modes) {
            ("modes", None) => {
                arity(1)?;
                let m: usize = toks[1].parse().map_err(|_| err(line, format!("malformed mode count '{}'", toks[1])))?;
                if m == 0 {
                    return Err(err(line, "mode count must be at least 1"));
                }
                modes = Some(m);
            }
            ("modes", Some(_)) => return Err(err(line, "duplicate 'modes' line")),
            ("ps" | "bs", None) => return Err(err(line, "'modes' must come before any element")),
            ("ps", Some(m)) => {
                arity(2)?;
                elements.push(Element::ps(parse_mode(toks[1], line, m)?, parse_angle(toks[2], line)?));
            }
            ("bs", Some(m)) => {
                arity(3)?;
                let (i, j) = (parse_mode(toks[1], line, m)?, parse_mode(toks[2], line, m)?);
                if i == j {
                    return Err(err(line, format!("beam splitter needs two distinct modes, got {i} twice")));
                }
                elements.push(Element::bs(i, j, parse_angle(toks[3], line)?));
            }
            (kw, _) => return Err(err(line, format!("unknown keyword '{kw}'"))),
        }
    }
    let m = modes.ok_or_else(|| err(last_line.max(1), "missing 'modes' line"))?;
    Network::new(m, elements).map_err(|e| err(last_line, e.to_string()))
}

/// Text that [`parse_network`] reads back to an equal network.
pub fn serialize_network(net: &Network) -> String {
    let mut out = format!("modes {}\n", net.modes());
    for e in net.elements() {
        writeln!(out, "{e}").expect("writing to a String");
    }
    out
}
