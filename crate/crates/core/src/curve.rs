//! Equivalence curves: sampled `(G, M)` loci relative to a reference ensemble.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::Ensemble;

/// Default distance kept from a singular fidelity boundary when sampling.
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Rtp,
    Qcb,
    Purification,
    Qst,
    Simulated,
}

impl Task {
    pub const ANALYTIC: [Task; 4] = [Task::Rtp, Task::Qcb, Task::Purification, Task::Qst];

    pub fn name(self) -> &'static str {
        match self {
            Task::Rtp => "rtp",
            Task::Qcb => "qcb",
            Task::Purification => "purification",
            Task::Qst => "qst",
            Task::Simulated => "simulated",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Required copy count at one sampled fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveValue {
    Finite(f64),
    /// Within the sampling margin of a singular boundary; `M → ∞`.
    Divergent,
    /// No crossing found (simulated contours only).
    Gap,
}

impl CurveValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            CurveValue::Finite(m) => Some(m),
            _ => None,
        }
    }

    /// Divergent points compare as `+∞`; gaps have no value.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            CurveValue::Finite(m) => Some(m),
            CurveValue::Divergent => Some(f64::INFINITY),
            CurveValue::Gap => None,
        }
    }
}

impl std::fmt::Display for CurveValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveValue::Finite(m) => write!(f, "{}", fmt_sig(*m)),
            CurveValue::Divergent => f.write_str("inf"),
            CurveValue::Gap => f.write_str("gap"),
        }
    }
}

impl Serialize for CurveValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurveValue::Finite(m) => s.serialize_f64(*m),
            CurveValue::Divergent => s.serialize_str("inf"),
            CurveValue::Gap => s.serialize_str("gap"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub g: f64,
    pub m: CurveValue,
}

/// Whether curve members are equally resourceful or the curve only separates
/// sufficiency and necessity regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Equivalence,
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMetadata {
    pub reference: Ensemble,
    pub d: usize,
    pub theta: Option<f64>,
    pub margin: f64,
    pub semantics: Semantics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCurve {
    pub task: Task,
    pub points: Vec<CurvePoint>,
    pub metadata: CurveMetadata,
}

impl EquivalenceCurve {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.g).collect()
    }

    pub fn value_at(&self, g: f64) -> Option<CurveValue> {
        self.points.iter().find(|p| p.g == g).map(|p| p.m)
    }

    /// Finite points are strictly decreasing in `m` as `g` increases, with
    /// divergent points only at the low-fidelity end.
    pub fn is_strictly_decreasing(&self) -> bool {
        let values: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter_map(|p| p.m.as_f64().map(|m| (p.g, m)))
            .collect();
        values.windows(2).all(|w| {
            w[0].0 < w[1].0 && (w[0].1 > w[1].1 || (w[0].1.is_infinite() && w[1].1.is_infinite()))
        })
    }
}

/// Evaluates `required` on every grid point, marking points within `margin`
/// of `singular_low` as divergent.
pub(crate) fn sample(
    task: Task,
    metadata: CurveMetadata,
    g_grid: &[f64],
    singular_low: f64,
    required: impl Fn(f64) -> Result<f64>,
) -> Result<EquivalenceCurve> {
    if g_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points = g_grid
        .iter()
        .map(|&g| {
            if g.is_nan() || g > 1.0 {
                return Err(Error::FidelityOutOfDomain {
                    value: g,
                    low: singular_low,
                    high: 1.0,
                });
            }
            let m = if g <= singular_low + metadata.margin {
                CurveValue::Divergent
            } else {
                CurveValue::Finite(required(g)?)
            };
            Ok(CurvePoint { g, m })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceCurve {
        task,
        points,
        metadata,
    })
}

/// `count` evenly spaced values with both endpoints exact.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i == count - 1 => hi,
                    i => (lo * (last - i as f64) + hi * i as f64) / last,
                })
                .collect()
        }
    }
}

/// Geometric spacing with both endpoints exact; `lo` and `hi` must be positive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect();
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if count > 1 {
        out[count - 1] = hi;
    }
    out
}

/// Decimal text with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}
