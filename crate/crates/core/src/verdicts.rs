//! Cross-task aggregation: all analytic curves for one reference, the band
//! where tasks disagree, and accept/reject recommendations for a trade.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::curve::{CurveValue, EquivalenceCurve, Task};
use crate::error::{Error, Result};
use crate::purification::{
    classify_region, physical_copies, purification_curve, separation_m, Region, RegionVerdict,
    Strength,
};
use crate::qcb::{qcb_curve, qcb_equivalent_m};
use crate::qst::{qst_curve, qst_equivalent_m};
use crate::rtp::{rtp_curve, rtp_equivalent_m};
use crate::state::Ensemble;

/// Relative tolerance under which two copy counts are equal.
pub const EQUIVALENCE_RTOL: f64 = 1e-9;

/// RTP, QCB, purification and QST curves, in that order, on a common grid.
pub fn all_curves(
    reference: &Ensemble,
    g_grid: &[f64],
    theta: f64,
    margin: f64,
) -> Result<Vec<EquivalenceCurve>> {
    Ok(vec![
        rtp_curve(reference, g_grid, margin)?,
        qcb_curve(reference, theta, g_grid, margin)?,
        purification_curve(reference, g_grid, margin)?,
        qst_curve(reference, g_grid, margin)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub g: f64,
    pub m_low: CurveValue,
    pub m_high: CurveValue,
}

impl BandPoint {
    pub fn width(&self) -> Option<f64> {
        Some(self.m_high.as_f64()? - self.m_low.as_f64()?)
    }
}

fn to_value(m: f64) -> CurveValue {
    if m.is_infinite() {
        CurveValue::Divergent
    } else {
        CurveValue::Finite(m)
    }
}

/// Pointwise minimum and maximum over `curves`. Gaps are skipped; a column
/// with no values is a gap on both edges.
pub fn ambiguity_band(curves: &[EquivalenceCurve]) -> Result<Vec<BandPoint>> {
    let first = curves.first().ok_or(Error::EmptyGrid)?;
    let grid = first.grid();
    if curves.iter().any(|c| c.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let values: Vec<f64> = curves
                .iter()
                .filter_map(|c| c.points[i].m.as_f64())
                .collect();
            if values.is_empty() {
                return BandPoint {
                    g,
                    m_low: CurveValue::Gap,
                    m_high: CurveValue::Gap,
                };
            }
            let low = values.iter().copied().fold(f64::INFINITY, f64::min);
            let high = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            BandPoint {
                g,
                m_low: to_value(low),
                m_high: to_value(high),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskVerdict {
    Better,
    Worse,
    Equivalent,
    Indeterminate,
}

impl std::fmt::Display for TaskVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskVerdict::Better => "better",
            TaskVerdict::Worse => "worse",
            TaskVerdict::Equivalent => "equivalent",
            TaskVerdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    Accept,
    Reject,
    TaskDependent,
}

impl std::fmt::Display for Overall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Overall::Accept => "accept",
            Overall::Reject => "reject",
            Overall::TaskDependent => "task-dependent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaskComparison {
    pub verdict: TaskVerdict,
    /// Copies at the offered fidelity matching the reference.
    pub m_required: f64,
    pub m_offered: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeReport {
    pub reference: Ensemble,
    pub offer: Ensemble,
    pub theta: f64,
    pub per_task: BTreeMap<Task, TaskComparison>,
    pub region: RegionVerdict,
    /// Smallest whole number of copies meeting the purification separation.
    pub purification_copies: f64,
    pub overall: Overall,
    /// Every task is equivalent.
    pub indifferent: bool,
}

fn compare(m_offered: f64, m_required: f64) -> TaskVerdict {
    if (m_offered - m_required).abs() <= EQUIVALENCE_RTOL * m_offered.abs().max(m_required.abs()) {
        TaskVerdict::Equivalent
    } else if m_offered > m_required {
        TaskVerdict::Better
    } else {
        TaskVerdict::Worse
    }
}

fn purification_verdict(region: &RegionVerdict) -> TaskVerdict {
    match (region.region, region.strength) {
        (_, Strength::Indeterminate) if region.on_boundary.all() => TaskVerdict::Equivalent,
        (Region::II | Region::III, Strength::Definitive | Strength::Sufficient) => {
            TaskVerdict::Better
        }
        (Region::IV | Region::V, Strength::Definitive | Strength::Sufficient) => TaskVerdict::Worse,
        _ => TaskVerdict::Indeterminate,
    }
}

pub fn overall(verdicts: impl IntoIterator<Item = TaskVerdict>) -> Overall {
    let verdicts: Vec<TaskVerdict> = verdicts.into_iter().collect();
    let all_better = verdicts
        .iter()
        .all(|v| matches!(v, TaskVerdict::Better | TaskVerdict::Equivalent));
    let all_worse = verdicts
        .iter()
        .all(|v| matches!(v, TaskVerdict::Worse | TaskVerdict::Equivalent));
    if all_better {
        Overall::Accept
    } else if all_worse && verdicts.contains(&TaskVerdict::Worse) {
        Overall::Reject
    } else {
        Overall::TaskDependent
    }
}

fn named(task: Task, e: Error) -> Error {
    Error::InvalidConfig(format!("{task}: {e}"))
}

/// Compares `offer` to `reference` on every task. Purification uses the
/// region strength rather than the separation curve alone.
pub fn trade_verdict(reference: &Ensemble, offer: &Ensemble, theta: f64) -> Result<TradeReport> {
    if reference.d != offer.d {
        return Err(Error::DimensionMismatch(reference.d, offer.d));
    }
    let g = offer.f;
    let mut per_task = BTreeMap::new();
    let required = [
        (Task::Rtp, rtp_equivalent_m(reference, g)),
        (Task::Qcb, qcb_equivalent_m(reference, g, theta)),
        (Task::Qst, qst_equivalent_m(reference, g)),
    ];
    for (task, m) in required {
        let m_required = m.map_err(|e| named(task, e))?;
        per_task.insert(
            task,
            TaskComparison {
                verdict: compare(offer.n, m_required),
                m_required,
                m_offered: offer.n,
            },
        );
    }

    let region = classify_region(reference, offer).map_err(|e| named(Task::Purification, e))?;
    let sep = separation_m(reference, g).map_err(|e| named(Task::Purification, e))?;
    per_task.insert(
        Task::Purification,
        TaskComparison {
            verdict: purification_verdict(&region),
            m_required: sep,
            m_offered: offer.n,
        },
    );

    let verdicts: Vec<TaskVerdict> = per_task.values().map(|c| c.verdict).collect();
    Ok(TradeReport {
        reference: *reference,
        offer: *offer,
        theta,
        overall: overall(verdicts.iter().copied()),
        indifferent: verdicts.iter().all(|&v| v == TaskVerdict::Equivalent),
        per_task,
        region,
        purification_copies: physical_copies(sep),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DEFAULT_MARGIN;
    use crate::qcb::DEFAULT_THETA;
    use proptest::prelude::*;

    fn a() -> Ensemble {
        Ensemble::qubit(1000.0, 0.75).unwrap()
    }

    fn close(x: f64, y: f64, rel: f64) -> bool {
        (x - y).abs() <= rel * y.abs().max(1e-300)
    }

    #[test]
    fn endpoints_at_unit_fidelity() {
        let curves = all_curves(&a(), &[0.75, 1.0], DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
        let at1: Vec<f64> = curves
            .iter()
            .map(|c| c.points[1].m.finite().unwrap())
            .collect();
        assert!((at1[0] - 188.72).abs() < 0.01, "rtp {}", at1[0]);
        assert!((at1[1] - 100.03).abs() < 0.01, "qcb {}", at1[1]);
        assert_eq!(at1[2], 0.0);
        assert!((at1[3] - 250.0).abs() < 1e-9);
        assert!(at1[1] < at1[0] && at1[0] < at1[3]);
        for c in &curves {
            assert!((c.points[0].m.finite().unwrap() - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_point_grid_returns_reference() {
        let curves = all_curves(&a(), &[0.75], DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
        assert_eq!(curves.len(), 4);
        for c in curves {
            assert!((c.points[0].m.finite().unwrap() - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn band_examples() {
        let curves = all_curves(&a(), &[0.65, 1.0], DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
        let band = ambiguity_band(&curves).unwrap();
        let low = band[0].m_low.finite().unwrap();
        let high = band[0].m_high.finite().unwrap();
        assert!(close(low, 2777.777777777778, 1e-9), "{low}");
        assert!(close(high, 3888.888888888889, 1e-9), "{high}");
        assert_eq!(band[1].m_low, CurveValue::Finite(0.0));
        assert!(close(band[1].m_high.finite().unwrap(), 250.0, 1e-12));
    }

    #[test]
    fn identical_curves_give_zero_width() {
        let c = qst_curve(&a(), &[0.6, 0.8, 1.0], DEFAULT_MARGIN).unwrap();
        let band = ambiguity_band(&[c.clone(), c]).unwrap();
        assert!(band.iter().all(|b| b.width() == Some(0.0)));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let c1 = qst_curve(&a(), &[0.6, 0.8], DEFAULT_MARGIN).unwrap();
        let c2 = qst_curve(&a(), &[0.6, 0.9], DEFAULT_MARGIN).unwrap();
        assert_eq!(ambiguity_band(&[c1, c2]), Err(Error::GridMismatch));
        assert_eq!(ambiguity_band(&[]), Err(Error::EmptyGrid));
    }

    #[test]
    fn divergent_columns_propagate() {
        let curves = all_curves(&a(), &[0.5005, 0.8], DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
        let band = ambiguity_band(&curves).unwrap();
        assert_eq!(band[0].m_high, CurveValue::Divergent);
        assert_eq!(band[0].m_low, CurveValue::Divergent);
    }

    #[test]
    fn offer_b_is_accepted() {
        let b = Ensemble::qubit(10_000.0, 0.65).unwrap();
        let r = trade_verdict(&a(), &b, DEFAULT_THETA).unwrap();
        assert_eq!(r.overall, Overall::Accept);
        let expect = [
            (Task::Rtp, 2862.4),
            (Task::Qcb, 2975.85),
            (Task::Qst, 2777.8),
            (Task::Purification, 3888.9),
        ];
        for (task, m) in expect {
            let c = r.per_task[&task];
            assert_eq!(c.verdict, TaskVerdict::Better, "{task}");
            assert!((c.m_required - m).abs() < 0.06, "{task}: {}", c.m_required);
        }
        assert_eq!(r.region.region, Region::II);
        assert_eq!(r.region.strength, Strength::Sufficient);
        assert_eq!(r.purification_copies, 3889.0);
        assert!(!r.indifferent);
    }

    #[test]
    fn offer_c_is_rejected() {
        let c = Ensemble::qubit(100.0, 0.90).unwrap();
        let r = trade_verdict(&a(), &c, DEFAULT_THETA).unwrap();
        assert_eq!(r.overall, Overall::Reject);
        let expect = [
            (Task::Rtp, 355.4),
            (Task::Qcb, 310.7),
            (Task::Qst, 390.625),
            (Task::Purification, 156.25),
        ];
        for (task, m) in expect {
            let cmp = r.per_task[&task];
            assert_eq!(cmp.verdict, TaskVerdict::Worse, "{task}");
            assert!(
                (cmp.m_required - m).abs() < 0.06,
                "{task}: {}",
                cmp.m_required
            );
        }
        assert_eq!(r.region.region, Region::V);
    }

    #[test]
    fn offer_equal_to_reference_is_indifferent() {
        let r = trade_verdict(&a(), &a(), DEFAULT_THETA).unwrap();
        assert!(r
            .per_task
            .values()
            .all(|c| c.verdict == TaskVerdict::Equivalent));
        assert_eq!(r.overall, Overall::Accept);
        assert!(r.indifferent);
    }

    #[test]
    fn necessary_only_region_forces_task_dependent() {
        // region VI: fewer copies, higher fidelity, above the separation curve
        let offer = Ensemble::qubit(900.0, 0.8).unwrap();
        let r = trade_verdict(&a(), &offer, DEFAULT_THETA).unwrap();
        assert_eq!(r.region.region, Region::VI);
        assert_eq!(
            r.per_task[&Task::Purification].verdict,
            TaskVerdict::Indeterminate
        );
        assert_eq!(r.overall, Overall::TaskDependent);
    }

    #[test]
    fn domain_errors_name_the_task() {
        let perfect = Ensemble::qubit(1000.0, 1.0).unwrap();
        let offer = Ensemble::qubit(100.0, 0.9).unwrap();
        let err = trade_verdict(&perfect, &offer, DEFAULT_THETA).unwrap_err();
        assert!(err.to_string().contains("purification") || err.to_string().contains("rtp"));
    }

    #[test]
    fn overall_rule() {
        use TaskVerdict::*;
        assert_eq!(overall([Better, Equivalent]), Overall::Accept);
        assert_eq!(overall([Equivalent, Equivalent]), Overall::Accept);
        assert_eq!(overall([Worse, Equivalent]), Overall::Reject);
        assert_eq!(overall([Worse, Better]), Overall::TaskDependent);
        assert_eq!(overall([Better, Indeterminate]), Overall::TaskDependent);
    }

    proptest! {
        #[test]
        fn band_sandwiches_every_curve(n in 10.0f64..1e5, f in 0.55f64..0.99) {
            let reference = Ensemble::qubit(n, f).unwrap();
            let grid: Vec<f64> = (0..20).map(|i| 0.52 + 0.024 * i as f64).collect();
            let curves = all_curves(&reference, &grid, DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
            let band = ambiguity_band(&curves).unwrap();
            for c in &curves {
                for (p, b) in c.points.iter().zip(&band) {
                    let m = p.m.as_f64().unwrap();
                    prop_assert!(b.m_low.as_f64().unwrap() <= m && m <= b.m_high.as_f64().unwrap());
                }
            }
        }

        #[test]
        fn outside_band_is_unambiguous_away_from_necessary_only_regions(
            n in 10.0f64..1e5,
            f in 0.55f64..0.99,
            m in 1.0f64..1e6,
            g in 0.52f64..1.0,
        ) {
            let reference = Ensemble::qubit(n, f).unwrap();
            let offer = Ensemble::qubit(m, g).unwrap();
            let curves = all_curves(&reference, &[g], DEFAULT_THETA, DEFAULT_MARGIN).unwrap();
            let band = ambiguity_band(&curves).unwrap()[0];
            let report = trade_verdict(&reference, &offer, DEFAULT_THETA).unwrap();
            let strength = report.region.strength;
            prop_assume!(!matches!(strength, Strength::NecessaryOnly | Strength::Indeterminate));
            let (low, high) = (band.m_low.as_f64().unwrap(), band.m_high.as_f64().unwrap());
            if m > high * (1.0 + 1e-9) {
                prop_assert_eq!(report.overall, Overall::Accept);
            }
            if m < low * (1.0 - 1e-9) {
                prop_assert_eq!(report.overall, Overall::Reject);
            }
        }

        #[test]
        fn tiny_perturbation_keeps_verdict(
            m in 1.0f64..1e6,
            g in 0.52f64..1.0,
        ) {
            let offer = Ensemble::qubit(m, g).unwrap();
            let nudged = Ensemble::qubit(m * (1.0 + 1e-12), g).unwrap();
            let r1 = trade_verdict(&a(), &offer, DEFAULT_THETA).unwrap();
            let r2 = trade_verdict(&a(), &nudged, DEFAULT_THETA).unwrap();
            let boundary = r1.per_task.values().any(|c| {
                (c.m_offered - c.m_required).abs() <= 1e-6 * c.m_required.abs()
            }) || r1.region.on_boundary.any();
            prop_assume!(!boundary);
            prop_assert_eq!(r1.overall, r2.overall);
            for (t, c) in &r1.per_task {
                prop_assert_eq!(c.verdict, r2.per_task[t].verdict);
            }
        }
    }
}
