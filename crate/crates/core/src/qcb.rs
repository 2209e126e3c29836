//! Binary discrimination of two equally depolarized qubit states: closed-form
//! Chernoff quantities, a grid-minimization oracle, exact Helstrom errors and
//! the resulting equivalence curve.
//!
//! All logarithms here are natural; the equivalence ratio is base-invariant.

use serde::Serialize;

use crate::curve::{self, CurveMetadata, EquivalenceCurve, Semantics, Task};
use crate::error::{Error, Result};
use crate::linalg::{self, DIMENSION_CAP};
use crate::state::{self, DensityOperator, Ensemble, PureState};

/// Default separation angle: `α = β = 1/√2`.
pub const DEFAULT_THETA: f64 = std::f64::consts::FRAC_PI_2;

/// `ρ = depolarized(|0⟩, f)` against `σ = depolarized(cos(θ/2)|0⟩ + sin(θ/2)|1⟩, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationPair {
    pub theta: f64,
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub p_plus: f64,
    pub p_minus: f64,
}

impl DiscriminationPair {
    pub fn new(theta: f64, f: f64) -> Result<Self> {
        check_theta(theta)?;
        state::check_fidelity(f, 2)?;
        let (beta, alpha) = (theta / 2.0).sin_cos();
        let lambda = 2.0 * f - 1.0;
        Ok(Self {
            theta,
            f,
            alpha,
            beta,
            lambda,
            p_plus: (1.0 + lambda) / 2.0,
            p_minus: (1.0 - lambda) / 2.0,
        })
    }

    pub fn states(&self) -> (DensityOperator, DensityOperator) {
        let r = PureState::bloch(0.0, 0.0);
        let s = PureState::bloch(self.theta, 0.0);
        // f was validated in `new`
        (
            state::depolarized_state(&r, self.f).expect("validated fidelity"),
            state::depolarized_state(&s, self.f).expect("validated fidelity"),
        )
    }

    /// `α² + 2β²√(F(1−F))`, the minimized Chernoff quantity.
    fn optimal_overlap(&self) -> f64 {
        self.alpha * self.alpha + 2.0 * self.beta * self.beta * (self.f * (1.0 - self.f)).sqrt()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=std::f64::consts::PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidAngle(theta))
    }
}

fn check_exponent(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidExponent(s))
    }
}

/// `tr(ρ^s σ^{1−s}) = α² + β²(p₊^s p₋^{1−s} + p₋^s p₊^{1−s})`.
pub fn chernoff_quantity_closed(pair: &DiscriminationPair, s: f64) -> Result<f64> {
    check_exponent(s)?;
    let (pp, pm) = (pair.p_plus, pair.p_minus);
    let mixed = pp.powf(s) * pm.powf(1.0 - s) + pm.powf(s) * pp.powf(1.0 - s);
    Ok(pair.alpha * pair.alpha + pair.beta * pair.beta * mixed)
}

/// `tr(ρ^s σ^{1−s})` by spectral powers of arbitrary density operators.
pub fn chernoff_quantity_generic(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    s: f64,
) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    check_exponent(s)?;
    let a = linalg::psd_power(rho.matrix(), s)?;
    let b = linalg::psd_power(sigma.matrix(), 1.0 - s)?;
    Ok(linalg::trace(&(a * b)).re)
}

/// Quantum Chernoff exponent in nats, using the minimizer `s = 1/2`.
pub fn xi_qcb(pair: &DiscriminationPair) -> f64 {
    (-pair.optimal_overlap().ln()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffMinimum {
    pub s_star: f64,
    pub xi: f64,
    /// The quantity is flat on the grid so `s_star` is arbitrary.
    pub degenerate: bool,
}

/// Minimizes `tr(ρ^s σ^{1−s})` over `grid_size` equally spaced `s ∈ [0, 1]`.
pub fn xi_qcb_numeric(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    grid_size: usize,
) -> Result<ChernoffMinimum> {
    if grid_size < 3 {
        return Err(Error::InvalidConfig(format!(
            "s grid needs at least 3 points (got {grid_size})"
        )));
    }
    let step = 1.0 / (grid_size - 1) as f64;
    let values = (0..grid_size)
        .map(|k| chernoff_quantity_generic(rho, sigma, (k as f64 * step).min(1.0)))
        .collect::<Result<Vec<f64>>>()?;
    let (k_min, &q_min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    let q_max = values.iter().copied().fold(f64::MIN, f64::max);
    Ok(ChernoffMinimum {
        s_star: k_min as f64 * step,
        xi: (-q_min.ln()).max(0.0),
        degenerate: q_max - q_min <= 1e-12,
    })
}

/// `exp(−n ξ)`: asymptotic minimum error probability from `n` copies.
pub fn error_prob_estimate(n: f64, pair: &DiscriminationPair) -> Result<f64> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::InvalidCount(n));
    }
    Ok((-n * xi_qcb(pair)).exp())
}

/// Exact minimum error `½(1 − ½‖ρ^{⊗n} − σ^{⊗n}‖₁)` for equal priors.
pub fn helstrom_exact(pair: &DiscriminationPair, n: usize) -> Result<f64> {
    let (rho, sigma) = pair.states();
    let a = linalg::kron_power(rho.matrix(), n, DIMENSION_CAP)?;
    let b = linalg::kron_power(sigma.matrix(), n, DIMENSION_CAP)?;
    let norm = linalg::trace_norm(&(a - b))?;
    Ok((0.5 * (1.0 - 0.5 * norm)).clamp(0.0, 0.5))
}

/// Copies of fidelity `g` giving the same asymptotic discrimination error as
/// `reference`, for separation angle `theta`.
pub fn qcb_equivalent_m(reference: &Ensemble, g: f64, theta: f64) -> Result<f64> {
    if reference.d != 2 {
        return Err(Error::DimensionMismatch(reference.d, 2));
    }
    check_theta(theta)?;
    if theta == 0.0 {
        return Err(Error::DegenerateAngle);
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
    let q_ref = DiscriminationPair::new(theta, reference.f)?.optimal_overlap();
    let q_g = DiscriminationPair::new(theta, g)?.optimal_overlap();
    if q_ref <= 0.0 {
        return Err(Error::InvalidConfig(
            "reference ensemble discriminates perfectly; no finite equivalent".into(),
        ));
    }
    if q_g <= 0.0 {
        // a single perfect copy at theta = pi already gives zero error
        return Ok(0.0);
    }
    Ok(reference.n * q_ref.ln() / q_g.ln())
}

pub fn qcb_curve(
    reference: &Ensemble,
    theta: f64,
    g_grid: &[f64],
    margin: f64,
) -> Result<EquivalenceCurve> {
    let metadata = CurveMetadata {
        reference: *reference,
        d: reference.d,
        theta: Some(theta),
        margin,
        semantics: Semantics::Equivalence,
    };
    curve::sample(Task::Qcb, metadata, g_grid, 0.5, |g| {
        qcb_equivalent_m(reference, g, theta)
    })
}
