//! Dense complex SVD helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Singular values in descending order with matching right singular vectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// `vectors[i]` is the right singular vector for `values[i]`.
    pub vectors: Vec<DVector<Complex64>>,
}

impl Spectrum {
    pub fn sigma_max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values below `tol * sigma_max`.
    pub fn rank_deficiency(&self, tol: f64) -> usize {
        let cut = tol * self.sigma_max();
        self.values.iter().filter(|&&s| s < cut).count()
    }

    /// Right singular vectors spanning the numeric kernel.
    pub fn kernel(&self, tol: f64) -> Vec<DVector<Complex64>> {
        let d = self.rank_deficiency(tol);
        self.vectors[self.vectors.len() - d..].to_vec()
    }
}

/// Full SVD of a square matrix.
pub fn svd(m: &DMatrix<Complex64>) -> Spectrum {
    debug_assert!(m.is_square());
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors: Vec<DVector<Complex64>> = order.iter().map(|&i| v_t.row(i).adjoint()).collect();
    Spectrum { values, vectors }
}

/// `(sigma_min, sigma_max)` without computing singular vectors.
pub fn sigma_extremes(m: &DMatrix<Complex64>) -> (f64, f64) {
    let s = m.singular_values();
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    (min, max)
}
