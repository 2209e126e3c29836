//! Level-set extraction through the reference point.
//!
//! Each fidelity column is first made non-increasing in `n` by isotonic
//! regression on `log(error)`, then crossed with the reference level by
//! interpolating `log(error)` linearly in `log(n)`. Power laws `c/n` are
//! recovered exactly.

use serde::{Deserialize, Serialize};

use super::sim::SimGrid;
use crate::curve::{CurveMetadata, CurvePoint, CurveValue, EquivalenceCurve, Semantics, Task};
use crate::error::{Error, Result};
use crate::state::Ensemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Infidelity,
    BuresSq,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Infidelity => "infidelity",
            Metric::BuresSq => "bures-sq",
        }
    }
}

const LOG_FLOOR: f64 = 1e-300;

fn column_logs(grid: &SimGrid, k: usize, metric: Metric) -> Vec<f64> {
    (0..grid.n_grid.len())
        .map(|j| {
            let c = grid.cell(j, k);
            let v = match metric {
                Metric::Infidelity => c.mean_infidelity,
                Metric::BuresSq => c.mean_bures_sq,
            };
            v.max(LOG_FLOOR).ln()
        })
        .collect()
}

/// Pool-adjacent-violators fit constrained to be non-increasing.
fn isotonic_decreasing(values: &[f64]) -> Vec<f64> {
    // blocks of (mean, weight)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b_mean, b_w) = blocks[blocks.len() - 1];
            let (a_mean, a_w) = blocks[blocks.len() - 2];
            if a_mean >= b_mean {
                break;
            }
            blocks.pop();
            let w = a_w + b_w;
            *blocks.last_mut().unwrap() =
                ((a_mean * a_w as f64 + b_mean * b_w as f64) / w as f64, w);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, w)| std::iter::repeat_n(m, w))
        .collect()
}

/// Fitted log-error at `log_n`, which must lie within the column's range.
fn value_at(log_ns: &[f64], fitted: &[f64], log_n: f64) -> f64 {
    if log_ns.len() == 1 {
        return fitted[0];
    }
    let j = log_ns
        .windows(2)
        .position(|w| log_n <= w[1])
        .unwrap_or(log_ns.len() - 2);
    let t = (log_n - log_ns[j]) / (log_ns[j + 1] - log_ns[j]);
    fitted[j] + t * (fitted[j + 1] - fitted[j])
}

/// `log n` at which a non-increasing column reaches `level`, if it does.
fn crossing(log_ns: &[f64], fitted: &[f64], level: f64) -> Option<f64> {
    let first = fitted[0];
    let last = *fitted.last().unwrap();
    if level > first || level < last {
        return None;
    }
    for j in 0..fitted.len() {
        if fitted[j] == level {
            return Some(log_ns[j]);
        }
        if j + 1 < fitted.len() && fitted[j] > level && level > fitted[j + 1] {
            let t = (fitted[j] - level) / (fitted[j] - fitted[j + 1]);
            return Some(log_ns[j] + t * (log_ns[j + 1] - log_ns[j]));
        }
    }
    None
}

/// Simulated equivalence curve: for every fidelity column, the copy count at
/// which the mean error equals its value at `reference`. Columns that never
/// reach the level yield [`CurveValue::Gap`].
pub fn extract_contour(
    grid: &SimGrid,
    reference: &Ensemble,
    metric: Metric,
) -> Result<EquivalenceCurve> {
    let n_min = grid.n_grid[0] as f64;
    let n_max = *grid.n_grid.last().unwrap() as f64;
    let g_min = grid.g_grid[0];
    let g_max = *grid.g_grid.last().unwrap();
    if !(reference.n >= n_min
        && reference.n <= n_max
        && reference.f >= g_min
        && reference.f <= g_max)
    {
        return Err(Error::ReferenceOutsideGrid {
            n: reference.n,
            f: reference.f,
        });
    }

    let log_ns: Vec<f64> = grid.n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let fitted: Vec<Vec<f64>> = (0..grid.g_grid.len())
        .map(|k| isotonic_decreasing(&column_logs(grid, k, metric)))
        .collect();

    let log_ref_n = reference.n.ln();
    let level = match grid.g_grid.iter().position(|&g| g == reference.f) {
        Some(k) => value_at(&log_ns, &fitted[k], log_ref_n),
        None => {
            let k = grid
                .g_grid
                .windows(2)
                .position(|w| reference.f < w[1])
                .expect("reference inside g range");
            let lo = value_at(&log_ns, &fitted[k], log_ref_n);
            let hi = value_at(&log_ns, &fitted[k + 1], log_ref_n);
            let t = (reference.f - grid.g_grid[k]) / (grid.g_grid[k + 1] - grid.g_grid[k]);
            lo + t * (hi - lo)
        }
    };

    let points = grid
        .g_grid
        .iter()
        .zip(&fitted)
        .map(|(&g, column)| CurvePoint {
            g,
            m: match crossing(&log_ns, column, level) {
                Some(log_n) => CurveValue::Finite(log_n.exp()),
                None => CurveValue::Gap,
            },
        })
        .collect();

    Ok(EquivalenceCurve {
        task: Task::Simulated,
        points,
        metadata: CurveMetadata {
            reference: *reference,
            d: 2,
            theta: None,
            margin: 0.0,
            semantics: Semantics::Equivalence,
        },
    })
}
