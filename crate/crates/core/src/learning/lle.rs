//! Locally linear embedding.
//!
//! Three stages: k nearest neighbors per point (Euclidean), reconstruction
//! weights minimizing `‖x_i − Σ_j W_ij x_j‖²` under `Σ_j W_ij = 1` with the
//! local Gram matrix regularized by `reg·trace`, and finally the eigenvectors
//! of `M = (I−W)ᵀ(I−W)` for the r smallest eigenvalues above the trivial
//! constant mode.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// A low-dimensional embedding of N points.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// N×r embedded coordinates; columns are zero-mean.
    pub points: DMatrix<f64>,
    /// Eigenvalue of `M` for each embedding column, ascending.
    pub eigenvalues: Vec<f64>,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub k_neighbors: usize,
}

/// Indices of the k nearest neighbors of each row, excluding the row itself.
/// Distance ties break toward the lower index.
fn k_nearest(points: &DMatrix<f64>, k: usize) -> Vec<Vec<usize>> {
    let n = points.nrows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let d = (points.row(i) - points.row(j)).norm_squared();
                (d, j)
            })
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        out.push(dists[..k].iter().map(|&(_, j)| j).collect());
    }
    out
}

/// Embeds `points` (N×d) into r dimensions.
///
/// Requires `k < N` and `r < d`. Duplicate neighborhoods are handled by the
/// trace regularization; a fully degenerate neighborhood falls back to
/// uniform weights.
pub fn lle_embed(points: &DMatrix<f64>, k: usize, r: usize, reg: f64) -> Result<Embedding> {
    let n = points.nrows();
    let d = points.ncols();
    if k >= n {
        return Err(Error::invalid(format!("k = {k} must be < N = {n}")));
    }
    if k < 1 {
        return Err(Error::invalid("k must be ≥ 1"));
    }
    if r >= d {
        return Err(Error::invalid(format!("r = {r} must be < d = {d}")));
    }
    if r < 1 {
        return Err(Error::invalid("r must be ≥ 1"));
    }
    if !(reg >= 0.0) {
        return Err(Error::invalid("reg must be ≥ 0"));
    }

    let neighbors = k_nearest(points, k);

    // Stage 2: constrained least-squares reconstruction weights per point.
    let mut weights: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let nbrs = &neighbors[i];
        // Local Gram of neighbor offsets: C_ab = (x_i − x_a)·(x_i − x_b).
        let mut c = DMatrix::zeros(k, k);
        for a in 0..k {
            let da = points.row(i) - points.row(nbrs[a]);
            for b in 0..=a {
                let db = points.row(i) - points.row(nbrs[b]);
                let v = da.dot(&db);
                c[(a, b)] = v;
                c[(b, a)] = v;
            }
        }
        let trace = c.trace();
        if trace > 0.0 {
            let shift = reg * trace;
            for a in 0..k {
                c[(a, a)] += shift;
            }
        } else {
            // All neighbors coincide with x_i: any affine combination works;
            // pick the uniform one.
            c = DMatrix::identity(k, k);
        }
        let ones = DVector::from_element(k, 1.0);
        let w = match c.clone().cholesky() {
            Some(ch) => ch.solve(&ones),
            None => {
                // Escalating jitter for borderline-singular local Gram matrices.
                let mut solved = None;
                let mut jitter = 1e-10 * trace.max(1.0);
                for _ in 0..6 {
                    let mut cj = c.clone();
                    for a in 0..k {
                        cj[(a, a)] += jitter;
                    }
                    if let Some(ch) = cj.cholesky() {
                        solved = Some(ch.solve(&ones));
                        break;
                    }
                    jitter *= 100.0;
                }
                solved.ok_or_else(|| {
                    Error::invalid(format!("neighborhood of point {i} is degenerate"))
                })?
            }
        };
        let sum: f64 = w.sum();
        if sum == 0.0 {
            return Err(Error::invalid(format!(
                "neighborhood of point {i} has zero weight sum"
            )));
        }
        weights.push(w.iter().map(|v| v / sum).collect());
    }

    // Stage 3: M = (I − W)ᵀ(I − W), assembled from the sparse rows of W.
    let mut m: DMatrix<f64> = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] += 1.0;
        let nbrs = &neighbors[i];
        let w = &weights[i];
        for a in 0..k {
            m[(i, nbrs[a])] -= w[a];
            m[(nbrs[a], i)] -= w[a];
            for b in 0..k {
                m[(nbrs[a], nbrs[b])] += w[a] * w[b];
            }
        }
    }

    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb): (f64, f64) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        ea.partial_cmp(&eb).unwrap()
    });

    // Skip the bottom (constant) mode; take the next r eigenvectors.
    let scale = (n as f64).sqrt();
    let mut out = DMatrix::zeros(n, r);
    let mut eigenvalues = Vec::with_capacity(r);
    for (col, &idx) in order[1..=r].iter().enumerate() {
        let v = eig.eigenvectors.column(idx);
        let mean = v.sum() / n as f64;
        for row in 0..n {
            out[(row, col)] = (v[row] - mean) * scale;
        }
        eigenvalues.push(eig.eigenvalues[idx]);
    }

    Ok(Embedding {
        points: out,
        eigenvalues,
        intrinsic_dim: r,
        ambient_dim: d,
        k_neighbors: k,
    })
}

/// Reconstruction weights ready for inspection; used by tests.
pub fn reconstruction_weights(points: &DMatrix<f64>, k: usize, reg: f64) -> Result<DMatrix<f64>> {
    let n = points.nrows();
    if k >= n {
        return Err(Error::invalid(format!("k = {k} must be < N = {n}")));
    }
    let neighbors = k_nearest(points, k);
    let mut w_full = DMatrix::zeros(n, n);
    // Re-run stage 2 via lle_embed's helper path: duplicate the logic cheaply
    // by calling lle_embed would recompute eigenvectors, so rebuild here.
    for i in 0..n {
        let nbrs = &neighbors[i];
        let mut c = DMatrix::zeros(k, k);
        for a in 0..k {
            let da = points.row(i) - points.row(nbrs[a]);
            for b in 0..=a {
                let db = points.row(i) - points.row(nbrs[b]);
                let v = da.dot(&db);
                c[(a, b)] = v;
                c[(b, a)] = v;
            }
        }
        let trace = c.trace();
        if trace > 0.0 {
            let shift = reg * trace;
            for a in 0..k {
                c[(a, a)] += shift;
            }
        } else {
            c = DMatrix::identity(k, k);
        }
        let ones = DVector::from_element(k, 1.0);
        let w = c
            .cholesky()
            .ok_or_else(|| Error::invalid(format!("degenerate neighborhood at {i}")))?
            .solve(&ones);
        let sum: f64 = w.sum();
        for (a, &j) in nbrs.iter().enumerate() {
            w_full[(i, j)] = w[a] / sum;
        }
    }
    Ok(w_full)
}
