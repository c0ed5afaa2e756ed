use std::fmt;
use std::str::FromStr;

use crate::args::GridArg;

/// A step count, either absolute or a multiple of the instance size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSpec {
    Absolute(u64),
    PerVariable(f64),
}

impl StepSpec {
    pub fn resolve(self, n: usize) -> u64 {
        match self {
            StepSpec::Absolute(s) => s,
            StepSpec::PerVariable(k) => (k * n as f64).round() as u64,
        }
    }
}

fn parse_count(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v >= 0.0).then_some(v)
}

impl FromStr for StepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected a count like 100000, 1e6 or 200n, got `{s}`");
        match s.strip_suffix('n') {
            Some(k) => parse_count(k).map(StepSpec::PerVariable).ok_or_else(bad),
            None => {
                let v = parse_count(s).ok_or_else(bad)?;
                if v.fract() != 0.0 || v > u64::MAX as f64 {
                    return Err(bad());
                }
                Ok(StepSpec::Absolute(v as u64))
            }
        }
    }
}

impl fmt::Display for StepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepSpec::Absolute(s) => write!(f, "{s}"),
            StepSpec::PerVariable(k) => write!(f, "{k}n"),
        }
    }
}

/// `lo:hi:step` (inclusive) or `a,b,c`.
pub fn parse_grid(s: &str) -> Result<GridArg, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if !(step > 0.0) || hi < lo {
                return Err(format!("range `{s}` needs lo <= hi and step > 0"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            // rounding keeps grid points like 1.1 printable as 1.1
            (0..=count).map(|k| round12(lo + k as f64 * step)).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("expected lo:hi:step or a list, got `{s}`")),
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(GridArg(values))
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_specs() {
        assert_eq!("100000".parse::<StepSpec>().unwrap().resolve(7), 100_000);
        assert_eq!("1e7".parse::<StepSpec>().unwrap().resolve(7), 10_000_000);
        assert_eq!("200n".parse::<StepSpec>().unwrap().resolve(500), 100_000);
        assert_eq!("0.5n".parse::<StepSpec>().unwrap().resolve(10), 5);
        assert!("1.5".parse::<StepSpec>().is_err());
        assert!("-3".parse::<StepSpec>().is_err());
        assert!("n".parse::<StepSpec>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:2:0.5").unwrap().0, vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("0.8:1.1:0.1").unwrap().0, vec![0.8, 0.9, 1.0, 1.1]);
        assert_eq!(parse_grid("1.4").unwrap().0, vec![1.4]);
        assert_eq!(parse_grid("3,4.5").unwrap().0, vec![3.0, 4.5]);
        assert!(parse_grid("2:1:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
