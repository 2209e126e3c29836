//! Small dense complex linear algebra: Hermitian eigendecomposition, spectral
//! powers and Kronecker powers.
//!
//! The eigensolver is nalgebra's symmetric/Hermitian QR iteration. Results are
//! re-sorted so that eigenvalues come out in ascending order; the order among
//! exactly tied eigenvalues is whatever the solver produced and is not part of
//! the contract.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest Kronecker-power dimension accepted by [`kron_power`].
pub const DIMENSION_CAP: usize = 256;

/// Eigenvalues within this distance below zero are treated as numerical noise
/// and clamped to zero before powers and logarithms.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V diag(f(w)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            for i in 0..n {
                scaled[(i, j)] *= fw;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|w| w)
    }
}

/// Largest elementwise deviation `|A - A†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian to within `1e-10` relative to its largest
/// entry; it is symmetrized before decomposition.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let defect = hermiticity_defect(m);
    if defect > 1e-10 * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();

    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Clamp eigenvalues in `[-PSD_TOLERANCE, 0)` to zero; anything more negative
/// is an error.
pub(crate) fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&w| {
            if w < -PSD_TOLERANCE {
                Err(Error::NotPsd(w))
            } else {
                Ok(w.max(0.0))
            }
        })
        .collect()
}

/// `M^s` for a positive semidefinite Hermitian `M` and `s ∈ [0, 1]`.
///
/// Eigenvalues are clamped at zero first. The power is taken with `powf`, so
/// `0^s = 0` for `s > 0` and `w^0 = 1` for every eigenvalue including zero:
/// `M^0` is the full identity, not the projector onto the support.
pub fn psd_power(m: &CMatrix, s: f64) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidExponent(s));
    }
    let eig = hermitian_eig(m)?;
    let clamped = clamp_spectrum(&eig.values)?;
    let eig = HermitianEigen {
        values: clamped,
        vectors: eig.vectors,
    };
    Ok(eig.map_spectrum(|w| w.powf(s)))
}

/// `M ⊗ M ⊗ ... ⊗ M` (`n` factors), refusing results larger than `cap`.
pub fn kron_power(m: &CMatrix, n: usize, cap: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidCount(0.0));
    }
    let dim = (m.nrows() as u128).pow(n as u32);
    if dim > cap as u128 {
        return Err(Error::DimensionCapExceeded {
            dim: usize::try_from(dim).unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut out = m.clone();
    for _ in 1..n {
        out = out.kronecker(m);
    }
    Ok(out)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eig(m)?.values.iter().map(|w| w.abs()).sum())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn diagonal_matrix_eigenpairs() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.75), c(0.25)]));
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 0.25).abs() < 1e-15);
        assert!((eig.values[1] - 0.75).abs() < 1e-15);
        assert!((eig.vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((eig.vectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_projector_has_spectrum_zero_one() {
        let m = CMatrix::from_element(2, 2, c(0.5));
        let eig = hermitian_eig(&m).unwrap();
        assert!(eig.values[0].abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 5, 8, 16] {
            for _ in 0..10 {
                let h = random_hermitian(n, &mut rng);
                let eig = hermitian_eig(&h).unwrap();
                assert!(max_diff(&eig.reconstruct(), &h) <= 1e-10);
                let gram = eig.vectors.adjoint() * &eig.vectors;
                assert!(max_diff(&gram, &CMatrix::identity(n, n)) <= 1e-10);
                assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(0.3);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn power_endpoints_and_square_root() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.25), c(0.75)]));
        let half = psd_power(&m, 0.5).unwrap();
        assert!((half[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((half[(1, 1)].re - 0.75f64.sqrt()).abs() < 1e-12);
        assert!(max_diff(&psd_power(&m, 1.0).unwrap(), &m) < 1e-12);
        assert!(max_diff(&(&half * &half), &m) < 1e-10);

        // w^0 = 1 even on the kernel
        let proj = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.0)]));
        let zeroth = psd_power(&proj, 0.0).unwrap();
        assert!(max_diff(&zeroth, &CMatrix::identity(2, 2)) < 1e-12);
        assert!(matches!(psd_power(&m, 1.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn power_rejects_negative_spectrum() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(-0.1)]));
        assert!(matches!(psd_power(&m, 0.5), Err(Error::NotPsd(_))));
        let tiny = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1e-12)]));
        assert!(psd_power(&tiny, 0.5).is_ok());
    }

    #[test]
    fn kron_power_cap() {
        let m = CMatrix::identity(2, 2);
        assert_eq!(kron_power(&m, 8, DIMENSION_CAP).unwrap().nrows(), 256);
        assert!(matches!(
            kron_power(&m, 9, DIMENSION_CAP),
            Err(Error::DimensionCapExceeded { dim: 512, cap: 256 })
        ));
    }
}
