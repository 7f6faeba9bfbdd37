//! Sweep and complex-number syntax shared by the subcommands.

use besselspec_core::Complex64;

use crate::CliError;

/// `1+2i`, `-3.5e2-1e-3i`, `4`, `2i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    let body = s.strip_suffix('i').or_else(|| s.strip_suffix('j'))?;
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let mut cut = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            cut = Some(i);
            break;
        }
    }
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match cut {
        Some(i) => Some(Complex64::new(body[..i].parse().ok()?, imag(&body[i..])?)),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

/// Comma list, `lo:hi:n` (linear) or `lo:hi:n:log` (geometric).
pub fn parse_reals(flag: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("{flag}: {what} in '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let out = match parts.len() {
        1 => s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad("not a number"))).collect::<Result<Vec<_>, _>>()?,
        3 | 4 => {
            let lo: f64 = parts[0].parse().map_err(|_| bad("bad lower end"))?;
            let hi: f64 = parts[1].parse().map_err(|_| bad("bad upper end"))?;
            let n: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
            if n == 0 {
                return Err(bad("empty sweep"));
            }
            let geometric = match parts.get(3) {
                None => false,
                Some(&"log") => true,
                Some(_) => return Err(bad("the fourth field can only be 'log'")),
            };
            if geometric && !(lo > 0.0 && hi > 0.0) {
                return Err(bad("a log sweep needs positive ends"));
            }
            (0..n)
                .map(|i| {
                    let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if geometric {
                        lo * (hi / lo).powf(t)
                    } else {
                        lo + (hi - lo) * t
                    }
                })
                .collect()
        }
        _ => return Err(bad("expected a list or lo:hi:n[:log]")),
    };
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err(bad("sweep must be nonempty and finite"));
    }
    Ok(out)
}

/// Comma list of complex numbers, or `lo:hi:n[:log]` between complex ends
/// (`log` is geometric, lo·(hi/lo)^t).
pub fn parse_complexes(flag: &str, s: &str) -> Result<Vec<Complex64>, CliError> {
    let one = |t: &str| parse_complex(t).ok_or_else(|| CliError::Usage(format!("{flag}: cannot read '{t}' as a complex number")));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 1 {
        return s.split(',').map(one).collect();
    }
    let bad = |what: &str| CliError::Usage(format!("{flag}: {what} in '{s}'"));
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(bad("expected a list or lo:hi:n[:log]"));
    }
    let (lo, hi) = (one(parts[0])?, one(parts[1])?);
    let n: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
    if n == 0 {
        return Err(bad("empty sweep"));
    }
    let geometric = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(_) => return Err(bad("the fourth field can only be 'log'")),
    };
    if geometric && (lo.norm() == 0.0 || hi.norm() == 0.0) {
        return Err(bad("a log sweep needs nonzero ends"));
    }
    let ratio = hi / lo;
    let out: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            if i == n - 1 {
                hi
            } else if geometric {
                lo * ratio.powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect();
    if out.iter().any(|z| !z.is_finite()) {
        return Err(bad("sweep must be finite"));
    }
    Ok(out)
}

pub fn parse_window(flag: &str, s: &str) -> Result<(f64, f64), CliError> {
    let v = parse_reals(flag, s)?;
    match v.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!("{flag}: expected lo,hi with lo < hi, got '{s}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_sweeps() {
        let v = parse_complexes("--z", "10i:1000i:3:log").unwrap();
        assert!((v[1] - Complex64::new(0.0, 100.0)).norm() < 1e-12);
        assert_eq!(v[2], Complex64::new(0.0, 1000.0));
        let v = parse_complexes("--z", "0:2+2i:3").unwrap();
        assert_eq!(v[1], Complex64::new(1.0, 1.0));
        assert!(parse_complexes("--z", "0:1i:3:log").is_err());
        assert!(parse_complexes("--z", "1:2").is_err());
    }

    #[test]
    fn complex_forms() {
        let c = |re, im| Some(Complex64::new(re, im));
        assert_eq!(parse_complex("1+1i"), c(1.0, 1.0));
        assert_eq!(parse_complex("-3.5e2-1e-3i"), c(-350.0, -1e-3));
        assert_eq!(parse_complex("4"), c(4.0, 0.0));
        assert_eq!(parse_complex("2i"), c(0.0, 2.0));
        assert_eq!(parse_complex("-i"), c(0.0, -1.0));
        assert_eq!(parse_complex("1e+2+1e-2i"), c(100.0, 0.01));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn sweeps() {
        assert_eq!(parse_reals("--x", "1,2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_reals("--x", "0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_reals("--x", "1:100:3:log").unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert!(parse_reals("--x", "0:1:0").is_err());
        assert!(parse_reals("--x", "0:1:3:lin").is_err());
        assert!(parse_window("--window", "3,1").is_err());
    }
}
