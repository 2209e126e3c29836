//! Quantum Fisher information of a depolarized qubit in Bloch angles, the
//! Gill–Massar floor on mean squared Bures error and the tomography
//! equivalence curve.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::curve::{self, CurveMetadata, EquivalenceCurve, Semantics, Task};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{self, Ensemble, PureState};

/// Default central-difference step for [`qfim_numeric`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// 2×2 Fisher information (or metric) in the parameter order `(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qfim2x2 {
    pub matrix: [[f64; 2]; 2],
}

impl Qfim2x2 {
    fn from_matrix(m: Matrix2<f64>) -> Self {
        Self {
            matrix: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
        }
    }

    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(
            self.matrix[0][0],
            self.matrix[0][1],
            self.matrix[1][0],
            self.matrix[1][1],
        )
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_matrix(self.as_matrix() * k)
    }
}

fn check_qubit_fidelity(f: f64) -> Result<f64> {
    state::check_fidelity(f, 2)?;
    Ok(2.0 * f - 1.0)
}

/// `diag(λ², λ² sin²θ)` with `λ = 2F − 1`.
pub fn qfim_closed(theta: f64, f: f64) -> Result<Qfim2x2> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidAngle(theta));
    }
    let l2 = check_qubit_fidelity(f)?.powi(2);
    let s2 = theta.sin().powi(2);
    Ok(Qfim2x2::from_matrix(Matrix2::new(l2, 0.0, 0.0, l2 * s2)))
}

/// Fisher information of the pure target, `𝓕/λ²`.
pub fn qfim_pure(theta: f64, f: f64) -> Result<Qfim2x2> {
    let l2 = check_qubit_fidelity(f)?.powi(2);
    Ok(qfim_closed(theta, f)?.scaled(1.0 / l2))
}

/// Bures metric of the pure target, `𝓕_pure/4`.
pub fn bures_metric_pure(theta: f64, f: f64) -> Result<Qfim2x2> {
    Ok(qfim_pure(theta, f)?.scaled(0.25))
}

/// `tr(g_pure 𝓕⁻¹)/N` assembled from the matrices; needs `sin θ ≠ 0`. Both
/// angles contribute, so this is twice [`gill_massar_bound`].
pub fn bures_trace_bound(theta: f64, ens: &Ensemble) -> Result<f64> {
    let fisher = qfim_closed(theta, ens.f)?.as_matrix();
    let inverse = fisher.try_inverse().ok_or(Error::InvalidAngle(theta))?;
    let metric = bures_metric_pure(theta, ens.f)?.as_matrix();
    Ok((metric * inverse).trace() / ens.n)
}

fn bloch_state(theta: f64, phi: f64, f: f64) -> CMatrix {
    state::depolarized_state(&PureState::bloch(theta, phi), f)
        .expect("fidelity validated by caller")
        .into_matrix()
}

/// Symmetric logarithmic derivative solving `∂ρ = (ρL + Lρ)/2` on a
/// full-rank `ρ`.
fn sld(rho: &CMatrix, derivative: &CMatrix) -> Result<CMatrix> {
    let eig = linalg::hermitian_eig(rho)?;
    let u = &eig.vectors;
    let rotated = u.adjoint() * derivative * u;
    let n = rho.nrows();
    let l = CMatrix::from_fn(n, n, |i, j| {
        let denom = eig.values[i] + eig.values[j];
        if denom > 0.0 {
            rotated[(i, j)] * (2.0 / denom)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(u * l * u.adjoint())
}

/// Finite-difference / Lyapunov oracle for the QFIM. Oracle-only: `f = 1`
/// (rank-deficient `ρ`) and `θ` within `10·step` of a pole are rejected.
pub fn qfim_numeric(theta: f64, phi: f64, f: f64, step: f64) -> Result<Qfim2x2> {
    check_qubit_fidelity(f)?;
    if f >= 1.0 {
        return Err(Error::FidelityOutOfDomain {
            value: f,
            low: 0.5,
            high: 1.0 - f64::EPSILON,
        });
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step {step}"
        )));
    }
    if theta < 10.0 * step || theta > std::f64::consts::PI - 10.0 * step {
        return Err(Error::InvalidAngle(theta));
    }
    let rho = bloch_state(theta, phi, f);
    let d_theta =
        (bloch_state(theta + step, phi, f) - bloch_state(theta - step, phi, f)).unscale(2.0 * step);
    let d_phi =
        (bloch_state(theta, phi + step, f) - bloch_state(theta, phi - step, f)).unscale(2.0 * step);
    let sld_theta = sld(&rho, &d_theta)?;
    let sld_phi = sld(&rho, &d_phi)?;
    let entry = |a: &CMatrix, b: &CMatrix| {
        let anti = a * b + b * a;
        0.5 * linalg::trace(&(&rho * anti)).re
    };
    let off = entry(&sld_theta, &sld_phi);
    Ok(Qfim2x2::from_matrix(Matrix2::new(
        entry(&sld_theta, &sld_theta),
        off,
        off,
        entry(&sld_phi, &sld_phi),
    )))
}

/// `1/(4N(2F − 1)²)`: floor on the mean squared Bures distance of any estimate
/// of the pure target from `N` depolarized qubit copies.
pub fn gill_massar_bound(ens: &Ensemble) -> Result<f64> {
    if ens.d != 2 {
        return Err(Error::DimensionMismatch(ens.d, 2));
    }
    let lambda = check_qubit_fidelity(ens.f)?;
    Ok(1.0 / (4.0 * ens.n * lambda * lambda))
}

/// `M = N((2F − 1)/(2G − 1))²`.
pub fn qst_equivalent_m(reference: &Ensemble, g: f64) -> Result<f64> {
    if reference.d != 2 {
        return Err(Error::DimensionMismatch(reference.d, 2));
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
    Ok(reference.n * ratio * ratio)
}

pub fn qst_curve(reference: &Ensemble, g_grid: &[f64], margin: f64) -> Result<EquivalenceCurve> {
    let metadata = CurveMetadata {
        reference: *reference,
        d: reference.d,
        theta: None,
        margin,
        semantics: Semantics::Equivalence,
    };
    curve::sample(Task::Qst, metadata, g_grid, 0.5, |g| {
        qst_equivalent_m(reference, g)
    })
}
