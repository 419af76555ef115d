//! Parsing of complex scalars given on the command line.

use num_complex::Complex64;

/// Accepts `i`, `-i`, `2.5`, `-0.5i`, `0.6+0.8i`, `1e-3-2i` and `root:k/n`
/// (the root of unity `e^{2πik/n}`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    if let Some(rest) = s.strip_prefix("root:") {
        let (k, n) = rest.split_once('/').ok_or_else(|| format!("expected root:k/n, got {text:?}"))?;
        let k: f64 = k.parse().map_err(|_| format!("bad numerator in {text:?}"))?;
        let n: f64 = n.parse().map_err(|_| format!("bad denominator in {text:?}"))?;
        if n == 0.0 {
            return Err("root of unity with zero denominator".into());
        }
        return Ok(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / n));
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| format!("cannot parse {text:?}"));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| format!("cannot parse real part of {text:?}"))?;
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| format!("cannot parse imaginary part of {text:?}"))?,
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert_eq!(parse_complex("-0.5i").unwrap(), Complex64::new(0.0, -0.5));
        assert_eq!(parse_complex("0.6+0.8i").unwrap(), Complex64::new(0.6, 0.8));
        assert_eq!(parse_complex("1e-3-2i").unwrap(), Complex64::new(1e-3, -2.0));
        assert_eq!(parse_complex("0.6 - i").unwrap(), Complex64::new(0.6, -1.0));
        let r = parse_complex("root:1/4").unwrap();
        assert!((r - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(parse_complex("x").is_err());
        assert!(parse_complex("1+").is_err());
    }
}
