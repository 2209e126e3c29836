//! Purity (informational nonequilibrium) monotone and its equivalence curve.
//!
//! An ensemble `(M, G)` matches `(N, F)` when both distill the same number of
//! pure `d`-level systems: `M·I_d(G) = N·I_d(F)`.

use crate::curve::{self, CurveMetadata, EquivalenceCurve, Semantics, Task};
use crate::error::{Error, Result};
use crate::state::{self, DensityOperator, Ensemble, LogBase};

/// `h(x) = −x log₂x − (1−x) log₂(1−x)`, zero at both endpoints.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidProbability(x));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// `(log₂d − S(ρ)) / log₂d`, in pure `d`-level systems per copy.
pub fn nonequilibrium(rho: &DensityOperator) -> Result<f64> {
    let log_d = (rho.dim() as f64).log2();
    let s = state::von_neumann_entropy(rho, LogBase::Two)?;
    Ok(((log_d - s) / log_d).clamp(0.0, 1.0))
}

/// `log₂(d (d−1)^{F−1}) − h(F)`: the unnormalized monotone of a depolarized
/// copy with fidelity `f`. Defined on the closed range `[1/d, 1]`.
pub fn nonequilibrium_closed(f: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let low = 1.0 / d as f64;
    if !(f >= low && f <= 1.0) {
        return Err(Error::FidelityOutOfDomain {
            value: f,
            low,
            high: 1.0,
        });
    }
    let d = d as f64;
    let value = d.log2() + (f - 1.0) * (d - 1.0).log2() - binary_entropy(f)?;
    Ok(value.max(0.0))
}

/// Copies of fidelity `g` carrying the same total nonequilibrium as `reference`.
pub fn rtp_equivalent_m(reference: &Ensemble, g: f64) -> Result<f64> {
    let low = 1.0 / reference.d as f64;
    if g.is_nan() || g > 1.0 {
        return Err(Error::FidelityOutOfDomain {
            value: g,
            low,
            high: 1.0,
        });
    }
    if g <= low {
        return Err(Error::Singular { g, boundary: low });
    }
    let per_copy_ref = nonequilibrium_closed(reference.f, reference.d)?;
    let per_copy = nonequilibrium_closed(g, reference.d)?;
    if per_copy <= 0.0 {
        return Err(Error::Singular { g, boundary: low });
    }
    Ok(reference.n * per_copy_ref / per_copy)
}

pub fn rtp_curve(reference: &Ensemble, g_grid: &[f64], margin: f64) -> Result<EquivalenceCurve> {
    let metadata = CurveMetadata {
        reference: *reference,
        d: reference.d,
        theta: None,
        margin,
        semantics: Semantics::Equivalence,
    };
    curve::sample(Task::Rtp, metadata, g_grid, 1.0 / reference.d as f64, |g| {
        rtp_equivalent_m(reference, g)
    })
}
