//! Machine learning engines for occupancy classification: ordinary and
//! L1-regularized least squares, kernel SVM trained by sequential minimal
//! optimization, and locally linear embedding for manifold-structured
//! features.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub mod classify;
pub mod lle;
pub mod manifold;
pub mod model_io;
pub mod regression;
pub mod svm;

pub use classify::{classify, ClassifierModel, EngineKind};
pub use lle::{lle_embed, Embedding};
pub use manifold::{gen_manifold, trustworthiness, ManifoldKind};
pub use regression::{lasso_fit, ols_fit, RegressionModel};
pub use svm::{gram_matrix, kernel_eval, svm_predict, svm_train, Kernel, SvmModel};

/// Training data: row-major sample matrix `X` (N×d) and targets `y`.
///
/// Targets are regression values, or ±1 labels when used for SVM training.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::invalid(
                "dataset needs N ≥ 1 samples and d ≥ 1 features",
            ));
        }
        if x.nrows() != y.len() {
            return Err(Error::invalid(format!(
                "X has {} rows but y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset entries must be finite"));
        }
        Ok(Self { x, y })
    }

    /// Builds a dataset from sample rows.
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset needs at least one sample"));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::invalid("samples need at least one feature"));
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("all sample rows must share one length"));
        }
        let x = DMatrix::from_row_iterator(rows.len(), d, rows.iter().flatten().cloned());
        Self::new(x, DVector::from_column_slice(y))
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Checks that every target is exactly ±1 and both classes appear.
    pub fn require_binary_labels(&self) -> Result<()> {
        let mut pos = false;
        let mut neg = false;
        for &v in self.y.iter() {
            match v {
                1.0 => pos = true,
                -1.0 => neg = true,
                other => {
                    return Err(Error::invalid(format!("labels must be ±1, found {other}")))
                }
            }
        }
        if !(pos && neg) {
            return Err(Error::invalid(
                "training needs at least one sample per class",
            ));
        }
        Ok(())
    }
}
