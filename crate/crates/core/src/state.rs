//! Pure states, density operators and the ensemble tuple `(N, F, d)`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen, DIMENSION_CAP, PSD_TOLERANCE};

const NORM_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;

/// A normalized state vector of dimension at least 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let v = DVector::from_vec(amplitudes);
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if k >= d {
            return Err(Error::DimensionMismatch(k, d));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: DVector::from_vec(vec![
                Complex64::new(c, 0.0),
                Complex64::from_polar(s, phi),
            ]),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn with_phase(&self, gamma: f64) -> Self {
        Self {
            amplitudes: self
                .amplitudes
                .map(|a| a * Complex64::from_polar(1.0, gamma)),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        let a = self.amplitudes[0];
        let b = self.amplitudes[1];
        let cross = a.conj() * b;
        Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = linalg::hermitian_eig(&matrix)?;
        if eig.values[0] < -PSD_TOLERANCE {
            return Err(Error::NotPsd(eig.values[0]));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eig(&self) -> Result<HermitianEigen> {
        linalg::hermitian_eig(&self.matrix)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.values)
    }
}

/// `(N, F, d)`: `n` i.i.d. depolarized copies of a pure state, each with
/// fidelity `f` to it. `n` is real so that equivalence curves can be sampled
/// continuously.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub n: f64,
    pub f: f64,
    pub d: usize,
}

impl Ensemble {
    pub fn new(n: f64, f: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidCount(n));
        }
        check_fidelity(f, d)?;
        Ok(Self { n, f, d })
    }

    pub fn qubit(n: f64, f: f64) -> Result<Self> {
        Self::new(n, f, 2)
    }

    /// Depolarizing weight `λ = (dF − 1)/(d − 1)`; `2F − 1` for qubits.
    pub fn lambda(&self) -> f64 {
        depolarizing_weight(self.f, self.d)
    }
}

/// Fails unless `f ∈ (1/d, 1]`.
pub fn check_fidelity(f: f64, d: usize) -> Result<()> {
    let low = 1.0 / d as f64;
    if f > low && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::FidelityOutOfDomain {
            value: f,
            low,
            high: 1.0,
        })
    }
}

pub fn depolarizing_weight(f: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * f - 1.0) / (d - 1.0)
}

/// `λ|ψ⟩⟨ψ| + (1 − λ) I/d` with `λ = (dF − 1)/(d − 1)`.
///
/// The orthogonal complement is filled isotropically, so the spectrum is
/// `{F}` together with `(1 − F)/(d − 1)` repeated `d − 1` times.
pub fn depolarized_state(psi: &PureState, f: f64) -> Result<DensityOperator> {
    let d = psi.dim();
    check_fidelity(f, d)?;
    let lambda = depolarizing_weight(f, d);
    let mixed = CMatrix::identity(d, d).scale((1.0 - lambda) / d as f64);
    Ok(DensityOperator {
        matrix: psi.projector().scale(lambda) + mixed,
    })
}

/// Haar-random pure state: a normalized vector of i.i.d. standard complex
/// Gaussians.
pub fn haar_random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        if v.iter().any(|z| z.norm_sqr() > 0.0) {
            return PureState::normalized(v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Two,
    E,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

/// `−tr(ρ log ρ)` with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator, base: LogBase) -> Result<f64> {
    let values = linalg::clamp_spectrum(&rho.eigenvalues()?)?;
    Ok(values
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * base.log(w))
        .sum::<f64>()
        .max(0.0))
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_with_pure(psi: &PureState, rho: &DensityOperator) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(psi.dim(), rho.dim()));
    }
    let v = psi.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

/// Squared Bures distance between pure states, `2(1 − |⟨a|b⟩|)`.
pub fn bures_distance_sq(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = a.inner(b)?.norm().min(1.0);
    Ok((2.0 * (1.0 - overlap)).clamp(0.0, 2.0))
}

/// `ρ^{⊗n}`, limited to dimension [`DIMENSION_CAP`].
pub fn tensor_power(rho: &DensityOperator, n: usize) -> Result<DensityOperator> {
    Ok(DensityOperator {
        matrix: linalg::kron_power(rho.matrix(), n, DIMENSION_CAP)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binary_entropy_oracle(x: f64) -> f64 {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }

    fn ket0() -> PureState {
        PureState::basis(2, 0).unwrap()
    }

    fn ket1() -> PureState {
        PureState::basis(2, 1).unwrap()
    }

    fn plus() -> PureState {
        PureState::bloch(std::f64::consts::FRAC_PI_2, 0.0)
    }

    #[test]
    fn pure_state_validation() {
        assert!(matches!(
            PureState::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::new(vec![Complex64::new(1.0, 0.0)]),
            Err(Error::InvalidDimension(1))
        ));
        let s = PureState::normalized(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)])
            .unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn depolarized_examples() {
        let rho = depolarized_state(&ket0(), 1.0).unwrap();
        assert!((rho.matrix() - ket0().projector()).norm() < 1e-15);

        let rho = depolarized_state(&ket0(), 0.75).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.75).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 0.25).abs() < 1e-15);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-15);

        let psi = PureState::normalized(vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.1, -0.7),
        ])
        .unwrap();
        let rho = depolarized_state(&psi, 1.0 / 3.0 + 1e-9).unwrap();
        let spectrum = rho.eigenvalues().unwrap();
        assert!(spectrum[2] - spectrum[0] < 1e-8);
        assert!((rho.matrix() - CMatrix::identity(3, 3).unscale(3.0)).norm() < 1e-8);
    }

    #[test]
    fn depolarized_rejects_bad_inputs() {
        assert!(matches!(
            depolarized_state(&ket0(), 0.5),
            Err(Error::FidelityOutOfDomain { .. })
        ));
        assert!(depolarized_state(&ket0(), 1.0 + 1e-9).is_err());
        assert!(PureState::new(vec![Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn depolarized_spectrum_and_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=5 {
            for _ in 0..20 {
                let psi = haar_random_pure(d, &mut rng).unwrap();
                let f = 1.0 / d as f64 + rng.random::<f64>() * (1.0 - 1.0 / d as f64);
                let f = f.max(1.0 / d as f64 + 1e-6);
                let rho = depolarized_state(&psi, f).unwrap();
                assert!((fidelity_with_pure(&psi, &rho).unwrap() - f).abs() < 1e-12);

                let mut expected = vec![(1.0 - f) / (d as f64 - 1.0); d - 1];
                expected.push(f);
                expected.sort_by(f64::total_cmp);
                let got = rho.eigenvalues().unwrap();
                for (a, b) in got.iter().zip(&expected) {
                    assert!(
                        (a - b).abs() < 1e-12,
                        "d={d} f={f}: {got:?} vs {expected:?}"
                    );
                }

                let closed = binary_entropy_oracle(f) + (1.0 - f) * ((d - 1) as f64).log2();
                let s = von_neumann_entropy(&rho, LogBase::Two).unwrap();
                assert!((s - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_is_deterministic_given_seed() {
        let a = haar_random_pure(2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = haar_random_pure(2, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(haar_random_pure(1, &mut ChaCha8Rng::seed_from_u64(5)).is_err());
    }

    #[test]
    fn haar_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let samples = 100_000;
        let mut mean = [0.0; 3];
        let mut pop0 = 0.0;
        for _ in 0..samples {
            let psi = haar_random_pure(2, &mut rng).unwrap();
            let r = psi.bloch_vector().unwrap();
            for k in 0..3 {
                mean[k] += r[k];
            }
            pop0 += psi.amplitudes()[0].norm_sqr();
        }
        let norm = mean
            .iter()
            .map(|m| (m / samples as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(norm <= 0.02, "mean Bloch norm {norm}");
        assert!((pop0 / samples as f64 - 0.5).abs() <= 0.01);
    }

    #[test]
    fn entropy_examples() {
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!((von_neumann_entropy(&mixed, LogBase::Two).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            (von_neumann_entropy(&mixed, LogBase::E).unwrap() - std::f64::consts::LN_2).abs()
                < 1e-12
        );
        let pure = DensityOperator::from_pure(&ket0());
        assert!(von_neumann_entropy(&pure, LogBase::Two).unwrap().abs() < 1e-12);
        let rho = depolarized_state(&ket0(), 0.75).unwrap();
        let s = von_neumann_entropy(&rho, LogBase::Two).unwrap();
        assert!((s - binary_entropy_oracle(0.75)).abs() < 1e-12);
        assert!((s - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn fidelity_examples() {
        let rho = depolarized_state(&ket0(), 0.75).unwrap();
        assert!((fidelity_with_pure(&ket0(), &rho).unwrap() - 0.75).abs() < 1e-12);
        assert!((fidelity_with_pure(&ket1(), &rho).unwrap() - 0.25).abs() < 1e-12);
        let p = plus();
        let pure = DensityOperator::from_pure(&p);
        assert!((fidelity_with_pure(&p, &pure).unwrap() - 1.0).abs() < 1e-12);
        let psi3 = PureState::basis(3, 0).unwrap();
        assert!(matches!(
            fidelity_with_pure(&psi3, &rho),
            Err(Error::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn bures_examples() {
        assert!(bures_distance_sq(&ket0(), &ket0()).unwrap().abs() < 1e-15);
        assert!((bures_distance_sq(&ket0(), &ket1()).unwrap() - 2.0).abs() < 1e-15);
        let d = bures_distance_sq(&ket0(), &plus()).unwrap();
        assert!((d - 2.0 * (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((d - 0.585786).abs() < 1e-6);
    }

    #[test]
    fn bures_symmetric_and_phase_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let a = haar_random_pure(3, &mut rng).unwrap();
            let b = haar_random_pure(3, &mut rng).unwrap();
            let ab = bures_distance_sq(&a, &b).unwrap();
            assert!((ab - bures_distance_sq(&b, &a).unwrap()).abs() < 1e-14);
            let rotated = a.with_phase(rng.random_range(0.0..6.3));
            assert!((ab - bures_distance_sq(&rotated, &b).unwrap()).abs() < 1e-12);
            assert!((0.0..=2.0).contains(&ab));
        }
    }

    #[test]
    fn density_operator_validation() {
        let mut m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityOperator::new(m.clone()),
            Err(Error::InvalidTrace(_))
        ));
        m[(1, 1)] = Complex64::new(0.0, 0.0);
        assert!(DensityOperator::new(m.clone()).is_ok());
        m[(0, 0)] = Complex64::new(1.2, 0.0);
        m[(1, 1)] = Complex64::new(-0.2, 0.0);
        assert!(matches!(DensityOperator::new(m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn tensor_power_examples() {
        let rho = depolarized_state(&ket0(), 0.75).unwrap();
        assert_eq!(tensor_power(&rho, 1).unwrap(), rho);
        let sq = tensor_power(&rho, 2).unwrap();
        let expected = [0.5625, 0.1875, 0.1875, 0.0625];
        for (i, e) in expected.iter().enumerate() {
            assert!((sq.matrix()[(i, i)].re - e).abs() < 1e-15);
        }
        let cube = tensor_power(&depolarized_state(&plus(), 0.8).unwrap(), 3).unwrap();
        assert!((linalg::trace(cube.matrix()).re - 1.0).abs() < 1e-12);
        assert!(matches!(
            tensor_power(&rho, 9),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn tensor_power_spectrum_is_products() {
        let rho = depolarized_state(&plus(), 0.9).unwrap();
        let cube = tensor_power(&rho, 3).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        for a in [0.9, 0.1] {
            for b in [0.9, 0.1] {
                for c in [0.9, 0.1] {
                    expected.push(a * b * c);
                }
            }
        }
        expected.sort_by(f64::total_cmp);
        for (a, b) in cube.eigenvalues().unwrap().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
