//! Angles that remember when they are rational multiples of pi.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// An angle in radians. `PiFraction { num, den }` is `num * pi / den`, kept
/// exact until a generator is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    PiFraction { num: i64, den: u64 },
    Radians(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::PiFraction { num: 0, den: 1 };
    pub const PI: Angle = Angle::PiFraction { num: 1, den: 1 };
    pub const HALF_PI: Angle = Angle::PiFraction { num: 1, den: 2 };
    pub const QUARTER_PI: Angle = Angle::PiFraction { num: 1, den: 4 };

    /// `num * pi / den`, reduced. Panics if `den == 0`.
    pub fn pi_fraction(num: i64, den: u64) -> Angle {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den).max(1);
        Angle::PiFraction { num: num / g as i64, den: den / g }
    }

    pub fn radians(x: f64) -> Result<Angle> {
        if x.is_finite() {
            Ok(Angle::Radians(x))
        } else {
            Err(Error::NonFiniteAngle(x))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Angle::PiFraction { num, den } => num as f64 * PI / den as f64,
            Angle::Radians(x) => x,
        }
    }

    pub fn neg(&self) -> Angle {
        match *self {
            Angle::PiFraction { num, den } => Angle::PiFraction { num: -num, den },
            Angle::Radians(x) => Angle::Radians(-x),
        }
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Self {
        Angle::Radians(x)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::PiFraction { num: 0, .. } => f.write_str("0*pi"),
            Angle::PiFraction { num, den } => {
                let sign = if num < 0 { "-" } else { "" };
                let k = num.unsigned_abs();
                match (k, den) {
                    (1, 1) => write!(f, "{sign}pi"),
                    (1, d) => write!(f, "{sign}pi/{d}"),
                    (k, 1) => write!(f, "{sign}{k}*pi"),
                    (k, d) => write!(f, "{sign}{k}*pi/{d}"),
                }
            }
            // shortest representation that round-trips
            Angle::Radians(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    /// Accepts decimal radians and `[-][k*]pi[/n]`.
    fn from_str(s: &str) -> Result<Angle> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidParameter(format!("malformed angle '{s}'"));
        if t.is_empty() {
            return Err(bad());
        }
        if !t.contains("pi") {
            let x: f64 = t.parse().map_err(|_| bad())?;
            return Angle::radians(x).map_err(|_| bad());
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(&t)),
        };
        let (numer, den) = match body.split_once('/') {
            Some((a, d)) => (a, d.parse::<u64>().map_err(|_| bad())?),
            None => (body, 1),
        };
        if den == 0 {
            return Err(bad());
        }
        let k: i64 = match numer {
            "pi" => 1,
            _ => {
                let k = numer.strip_suffix("*pi").ok_or_else(bad)?;
                k.parse().map_err(|_| bad())?
            }
        };
        Ok(Angle::pi_fraction(if neg { -k } else { k }, den))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Angle::radians(x).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
