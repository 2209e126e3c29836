//! `lo:hi:count[log]` ranges and `a,b` pairs.

use std::fmt;
use std::str::FromStr;

use qensemble::curve::{linspace, logspace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.log {
            logspace(self.lo, self.hi, self.count)
        } else {
            linspace(self.lo, self.hi, self.count)
        }
    }

    /// Values rounded to whole numbers; fails if rounding merges neighbours.
    pub fn counts(&self) -> Result<Vec<u64>, String> {
        let values: Vec<u64> = self.values().iter().map(|v| v.round() as u64).collect();
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("range {self} does not give distinct whole numbers"));
        }
        Ok(values)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)?;
        if self.log {
            f.write_str("log")?;
        }
        Ok(())
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [single] => {
                let v = number(single)?;
                Range {
                    lo: v,
                    hi: v,
                    count: 1,
                    log: false,
                }
            }
            [lo, hi, count] => {
                let (count, log) = match count.trim().strip_suffix("log") {
                    Some(c) => (c, true),
                    None => (count.trim(), false),
                };
                let count: usize = count
                    .parse()
                    .map_err(|_| format!("{count:?} is not a point count"))?;
                Range {
                    lo: number(lo)?,
                    hi: number(hi)?,
                    count,
                    log,
                }
            }
            _ => {
                return Err(format!(
                    "expected lo:hi:count[log] or a single value, got {s:?}"
                ))
            }
        };
        if range.count == 0 {
            return Err("point count must be at least 1".into());
        }
        if range.lo > range.hi {
            return Err(format!("range {s:?} has lo > hi"));
        }
        if range.count == 1 && range.lo != range.hi {
            return Err(format!("a single point needs lo = hi, got {s:?}"));
        }
        if range.count > 1 && range.lo == range.hi {
            return Err(format!("range {s:?} repeats one value"));
        }
        if range.log && range.lo <= 0.0 {
            return Err(format!("log range {s:?} needs positive bounds"));
        }
        Ok(range)
    }
}

/// `N,F` pair of copy count and fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub n: f64,
    pub f: f64,
}

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split(',').collect::<Vec<_>>().as_slice() {
            [n, f] => Ok(Pair {
                n: number(n)?,
                f: number(f)?,
            }),
            _ => Err(format!("expected N,F, got {s:?}")),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.n, self.f)
    }
}
