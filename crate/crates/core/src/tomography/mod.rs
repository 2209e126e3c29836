//! Finite-shot single-qubit tomography of depolarized copies.
//!
//! Each trial splits its `n` copies over Pauli X, Y and Z measurements, forms
//! the linear-inversion estimate `½(I + r̂·σ)`, and takes its top eigenvector
//! as the estimate of the pure target. No knowledge of `F` is used.

mod contour;
mod sim;
mod table;

pub use contour::{extract_contour, Metric};
pub use sim::{simulate_grid, trial_rng, GridCell, SimConfig, SimGrid};
pub use table::{read_table, write_table, TABLE_HEADER};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{self, DensityOperator, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn name(self) -> &'static str {
        match self {
            PauliBasis::X => "X",
            PauliBasis::Y => "Y",
            PauliBasis::Z => "Z",
        }
    }

    pub fn matrix(self) -> Matrix2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliBasis::X => Matrix2::new(o, one, one, o),
            PauliBasis::Y => Matrix2::new(o, -i, i, o),
            PauliBasis::Z => Matrix2::new(one, o, o, -one),
        }
    }
}

/// Bloch component `tr(ρ σ_basis)` of a qubit density operator.
pub fn bloch_component(rho: &DensityOperator, basis: PauliBasis) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let m = rho.matrix();
    let p = basis.matrix();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            tr += m[(i, j)] * p[(j, i)];
        }
    }
    Ok(tr.re)
}

/// `(n₊, n₋)` outcome counts from `shots` projective measurements of `basis`.
pub fn measure_pauli_counts<R: Rng + ?Sized>(
    rho: &DensityOperator,
    basis: PauliBasis,
    shots: u64,
    rng: &mut R,
) -> Result<(u64, u64)> {
    let r = bloch_component(rho, basis)?;
    let p_plus = ((1.0 + r) / 2.0).clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p_plus)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?
        .sample(rng);
    Ok((plus, shots - plus))
}

/// How a trial's copies are divided between the three bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotSplit {
    /// `n = 3q + r`: `q` shots per basis, the remainder going to Z, then X.
    #[default]
    PauliEvenRemainderZx,
}

impl ShotSplit {
    pub fn name(self) -> &'static str {
        match self {
            ShotSplit::PauliEvenRemainderZx => "pauli-even-remainder-zx",
        }
    }

    /// Shots for `[X, Y, Z]`.
    pub fn allocate(self, n: u64) -> [u64; 3] {
        match self {
            ShotSplit::PauliEvenRemainderZx => {
                let q = n / 3;
                let r = n % 3;
                [q + u64::from(r >= 2), q, q + u64::from(r >= 1)]
            }
        }
    }
}

/// Outcome counts per basis, indexed `[X, Y, Z]`, each `(n₊, n₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliCounts(pub [(u64, u64); 3]);

/// Linear-inversion estimate; may lie outside the Bloch ball.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEstimate {
    pub bloch: [f64; 3],
    pub matrix: CMatrix,
}

pub fn bloch_matrix(r: [f64; 3]) -> CMatrix {
    let mut m = CMatrix::identity(2, 2);
    for (basis, rk) in PauliBasis::ALL.iter().zip(r) {
        let p = basis.matrix();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] += p[(i, j)] * rk;
            }
        }
    }
    m.scale(0.5)
}

/// `ρ̂ = ½(I + r̂·σ)` with `r̂_k = (n₊ − n₋)/shots_k`. No positivity is enforced.
pub fn linear_inversion(counts: &PauliCounts) -> Result<LinearEstimate> {
    let mut r = [0.0; 3];
    for (k, (&(plus, minus), basis)) in counts.0.iter().zip(PauliBasis::ALL).enumerate() {
        let shots = plus + minus;
        if shots == 0 {
            return Err(Error::ZeroShots(basis.name()));
        }
        r[k] = (plus as f64 - minus as f64) / shots as f64;
    }
    Ok(LinearEstimate {
        bloch: r,
        matrix: bloch_matrix(r),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mitigated {
    pub state: PureState,
    /// The top eigenvalue was tied; `state` is the first tied eigenvector in
    /// ascending solver order.
    pub degenerate: bool,
}

const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Top eigenvector of a Hermitian estimate.
pub fn mitigate_to_pure(estimate: &CMatrix) -> Result<Mitigated> {
    let eig = linalg::hermitian_eig(estimate)?;
    let top = *eig.values.last().expect("nonempty spectrum");
    let tied: Vec<usize> = (0..eig.values.len())
        .filter(|&j| top - eig.values[j] <= DEGENERACY_TOLERANCE)
        .collect();
    let pick = tied[0];
    let column: Vec<Complex64> = eig.vectors.column(pick).iter().copied().collect();
    Ok(Mitigated {
        state: PureState::normalized(column)?,
        degenerate: tied.len() > 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub infidelity: f64,
    pub bures_sq: f64,
    pub degenerate: bool,
}

/// One tomography run on `n` depolarized copies of `psi`.
pub fn run_trial<R: Rng + ?Sized>(
    psi: &PureState,
    n: u64,
    f: f64,
    split: ShotSplit,
    rng: &mut R,
) -> Result<TrialOutcome> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch(psi.dim(), 2));
    }
    if n < 3 {
        return Err(Error::InvalidCount(n as f64));
    }
    let rho = state::depolarized_state(psi, f)?;
    let shots = split.allocate(n);
    let mut counts = [(0, 0); 3];
    for (k, basis) in PauliBasis::ALL.iter().enumerate() {
        counts[k] = measure_pauli_counts(&rho, *basis, shots[k], rng)?;
    }
    let estimate = linear_inversion(&PauliCounts(counts))?;
    let mitigated = mitigate_to_pure(&estimate.matrix)?;
    let overlap_sq = psi.inner(&mitigated.state)?.norm_sqr().min(1.0);
    Ok(TrialOutcome {
        infidelity: (1.0 - overlap_sq).max(0.0),
        bures_sq: state::bures_distance_sq(psi, &mitigated.state)?,
        degenerate: mitigated.degenerate,
    })
}
