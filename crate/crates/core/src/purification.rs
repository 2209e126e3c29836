//! Purification to a single output copy: leading-order output infidelity, the
//! separation curve and the six comparison regions around a reference.
//!
//! Only the leading `1/N` term of the infidelity is computed. The exponentially
//! small correction is not numerically available; its sign is what makes the
//! separation curve a sufficient condition on one side of `M = N` and only a
//! necessary one on the other, and that is encoded in [`Strength`].

use std::cmp::Ordering;

use serde::Serialize;

use crate::curve::{self, CurveMetadata, EquivalenceCurve, Semantics, Task};
use crate::error::{Error, Result};
use crate::state::Ensemble;

const COUNT_RTOL: f64 = 1e-9;
const FIDELITY_ATOL: f64 = 1e-12;

/// `δ = (1/N)(1 − 1/d)(1 − F)/(2F − 1)²`.
pub fn purification_infidelity(ens: &Ensemble) -> Result<f64> {
    if ens.f <= 0.5 {
        return Err(Error::Singular {
            g: ens.f,
            boundary: 0.5,
        });
    }
    let lambda = 2.0 * ens.f - 1.0;
    let d = ens.d as f64;
    Ok((1.0 - 1.0 / d) * (1.0 - ens.f) / (ens.n * lambda * lambda))
}

/// `M = N ((2F−1)/(2G−1))² (1−G)/(1−F)`; zero at `g = 1`.
pub fn separation_m(reference: &Ensemble, g: f64) -> Result<f64> {
    if !(reference.f > 0.5 && reference.f < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "separation curve needs reference fidelity in (0.5, 1), got {}",
            reference.f
        )));
    }
    if g.is_nan() || g > 1.0 {
        return Err(Error::FidelityOutOfDomain {
            value: g,
            low: 0.5,
            high: 1.0,
        });
    }
    if g <= 0.5 {
        return Err(Error::Singular { g, boundary: 0.5 });
    }
    let ratio = (2.0 * reference.f - 1.0) / (2.0 * g - 1.0);
    Ok(reference.n * ratio * ratio * (1.0 - g) / (1.0 - reference.f))
}

/// `ceil(max(m, 1))`: a physical copy count.
pub fn physical_copies(m: f64) -> f64 {
    m.max(1.0).ceil()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::VI => "VI",
        };
        f.write_str(s)
    }
}

/// How strongly the region settles which ensemble purifies better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strength {
    Definitive,
    Sufficient,
    NecessaryOnly,
    Indeterminate,
}

impl std::fmt::Display for Strength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Strength::Definitive => "definitive",
            Strength::Sufficient => "sufficient",
            Strength::NecessaryOnly => "necessary-only",
            Strength::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BoundaryFlags {
    pub m_equals_n: bool,
    pub g_equals_f: bool,
    pub on_separation: bool,
}

impl BoundaryFlags {
    pub fn any(&self) -> bool {
        self.m_equals_n || self.g_equals_f || self.on_separation
    }

    pub fn all(&self) -> bool {
        self.m_equals_n && self.g_equals_f && self.on_separation
    }
}

/// Where `(M, G)` sits relative to the reference `(N, F)`.
///
/// Regions II and III favour the other ensemble, IV and V the reference; I
/// and VI only carry a necessary condition. Points on a boundary get the
/// weaker strength of the adjacent regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub region: Region,
    pub strength: Strength,
    pub on_boundary: BoundaryFlags,
    /// Separation-curve copy count at the other ensemble's fidelity.
    pub separation_m: f64,
}

fn cmp_rel(a: f64, b: f64, rtol: f64) -> Ordering {
    if (a - b).abs() <= rtol * a.abs().max(b.abs()) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

pub fn classify_region(reference: &Ensemble, other: &Ensemble) -> Result<RegionVerdict> {
    if reference.d != other.d {
        return Err(Error::DimensionMismatch(reference.d, other.d));
    }
    if other.f <= 0.5 {
        return Err(Error::FidelityOutOfDomain {
            value: other.f,
            low: 0.5,
            high: 1.0,
        });
    }
    let sep = separation_m(reference, other.f)?;

    let dm = cmp_rel(other.n, reference.n, COUNT_RTOL);
    let dg = if (other.f - reference.f).abs() <= FIDELITY_ATOL {
        Ordering::Equal
    } else {
        other.f.total_cmp(&reference.f)
    };
    let ds = if dg == Ordering::Equal {
        dm
    } else {
        cmp_rel(other.n, sep, COUNT_RTOL)
    };

    use Ordering::{Equal as Eq, Greater as Gt, Less as Lt};
    use Region::*;
    use Strength::*;
    let (region, strength) = match (dm, dg, ds) {
        (Eq, Eq, _) => (III, Indeterminate),
        (Gt, Gt, _) => (III, Definitive),
        (Lt, Lt, _) => (IV, Definitive),
        (Gt, Lt, Gt) => (II, Sufficient),
        (Gt, Lt, Lt) => (I, NecessaryOnly),
        (Gt, Lt, Eq) => (I, Indeterminate),
        (Lt, Gt, Lt) => (V, Sufficient),
        (Lt, Gt, Gt) => (VI, NecessaryOnly),
        (Lt, Gt, Eq) => (VI, Indeterminate),
        // III | VI edge: the separation condition is necessary only
        (Eq, Gt, _) => (VI, NecessaryOnly),
        // IV | I edge
        (Eq, Lt, _) => (I, NecessaryOnly),
        // III | II edge: more copies at equal fidelity
        (Gt, Eq, _) => (II, Sufficient),
        // IV | V edge
        (Lt, Eq, _) => (V, Sufficient),
    };

    Ok(RegionVerdict {
        region,
        strength,
        on_boundary: BoundaryFlags {
            m_equals_n: dm == Eq,
            g_equals_f: dg == Eq,
            on_separation: ds == Eq,
        },
        separation_m: sep,
    })
}

/// Samples the separation curve. Members are only loosely equivalent; see
/// [`classify_region`] for the strict reading.
pub fn purification_curve(
    reference: &Ensemble,
    g_grid: &[f64],
    margin: f64,
) -> Result<EquivalenceCurve> {
    let metadata = CurveMetadata {
        reference: *reference,
        d: reference.d,
        theta: None,
        margin,
        semantics: Semantics::Separation,
    };
    curve::sample(Task::Purification, metadata, g_grid, 0.5, |g| {
        separation_m(reference, g)
    })
}
