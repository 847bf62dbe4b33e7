//! Ket expressions: `|1,0>`, `0.6*|2,0> - 0.8i*|0,2>`, `(0.5+0.5i)*|1,1>`.

use anyonlin::{AnyonSpec, Complex64, Occupation, StateVector};

/// Parses `re`, `imi`, `re+imi`, `re-imi`, `i`, `-i`, with optional parentheses.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(&t);
    let bad = || format!("malformed complex number '{text}'");
    if t.is_empty() {
        return Err(bad());
    }
    let finite = |z: Complex64| if z.re.is_finite() && z.im.is_finite() { Ok(z) } else { Err(bad()) };
    let Some(body) = t.strip_suffix('i') else {
        return finite(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    finite(Complex64::new(re, im))
}

fn parse_occupation(body: &str) -> Result<Occupation, String> {
    let counts = body
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| format!("malformed occupation '|{body}>'")))
        .collect::<Result<Vec<u32>, String>>()?;
    Ok(Occupation::new(counts))
}

/// Splits `text` into signed terms at top-level `+`/`-` that follow a ket.
fn terms(text: &str) -> Result<Vec<(Complex64, Occupation)>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    let mut sign = 1.0;
    if let Some(r) = rest.strip_prefix('-') {
        (rest, sign) = (r.trim_start(), -1.0);
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    loop {
        let bar = rest.find('|').ok_or_else(|| format!("expected a ket in '{rest}'"))?;
        let close = rest[bar..].find('>').map(|k| bar + k).ok_or_else(|| format!("unterminated ket in '{rest}'"))?;
        let coeff_text = rest[..bar].trim();
        let coeff = if coeff_text.is_empty() {
            Complex64::new(1.0, 0.0)
        } else {
            let c =
                coeff_text.strip_suffix('*').ok_or_else(|| format!("expected '*' after coefficient '{coeff_text}'"))?;
            parse_complex(c)?
        };
        out.push((coeff * sign, parse_occupation(&rest[bar + 1..close])?));
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        sign = match rest.as_bytes()[0] {
            b'+' => 1.0,
            b'-' => -1.0,
            _ => return Err(format!("expected '+' or '-' before '{rest}'")),
        };
        rest = rest[1..].trim_start();
    }
}

/// State for a ket expression. The mode count comes from the first ket.
pub fn parse_state(text: &str, spec: &AnyonSpec, normalize: bool) -> Result<StateVector, String> {
    let ts = terms(text)?;
    let modes = ts[0].1.modes();
    let st = StateVector::from_terms(modes, ts.into_iter().map(|(c, o)| (o, c))).map_err(|e| e.to_string())?;
    st.validate(spec).map_err(|e| e.to_string())?;
    if normalize {
        st.normalized().map_err(|e| e.to_string())
    } else {
        Ok(st)
    }
}
