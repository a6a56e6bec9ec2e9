//! Synthetic 2-D manifolds embedded in 3-D space, plus embedding-quality
//! metrics (trustworthiness and an affine Procrustes residual).

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// The three demonstration surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    /// A plane `z = x + 2y`, sampled over a rectangle.
    LinearSubspace,
    /// The S-curve `(sin t, h, sign(t)·(cos t − 1))`.
    SCurve,
    /// The Swiss roll `(t·cos t, h, t·sin t)`.
    SwissRoll,
}

impl std::str::FromStr for ManifoldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear_subspace" => Ok(ManifoldKind::LinearSubspace),
            "s_curve" => Ok(ManifoldKind::SCurve),
            "swiss_roll" => Ok(ManifoldKind::SwissRoll),
            other => Err(Error::invalid(format!(
                "unknown manifold kind '{other}' (expected linear_subspace, s_curve, or swiss_roll)"
            ))),
        }
    }
}

impl std::fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ManifoldKind::LinearSubspace => "linear_subspace",
            ManifoldKind::SCurve => "s_curve",
            ManifoldKind::SwissRoll => "swiss_roll",
        };
        write!(f, "{s}")
    }
}

/// Samples `n` points uniformly in parameter space.
///
/// Returns `(ambient N×3, intrinsic N×2)`; the intrinsic coordinates are the
/// sampled parameters, for evaluating embeddings against ground truth.
pub fn gen_manifold(kind: ManifoldKind, n: usize, seed: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if n < 10 {
        return Err(Error::invalid("manifold sampling needs n ≥ 10"));
    }
    let mut rng = rng::seeded(seed);
    let mut ambient = DMatrix::zeros(n, 3);
    let mut intrinsic = DMatrix::zeros(n, 2);
    for i in 0..n {
        let (p, q, x, y, z) = match kind {
            ManifoldKind::LinearSubspace => {
                let u: f64 = rng.random_range(0.0..2.0);
                let v: f64 = rng.random_range(0.0..1.0);
                (u, v, u, v, u + 2.0 * v)
            }
            ManifoldKind::SCurve => {
                let t: f64 = rng.random_range(-1.5 * std::f64::consts::PI..1.5 * std::f64::consts::PI);
                let h: f64 = rng.random_range(0.0..2.0);
                (t, h, t.sin(), h, t.signum() * (t.cos() - 1.0))
            }
            ManifoldKind::SwissRoll => {
                let t: f64 = rng.random_range(1.5 * std::f64::consts::PI..4.5 * std::f64::consts::PI);
                let h: f64 = rng.random_range(0.0..10.0);
                (t, h, t * t.cos(), h, t * t.sin())
            }
        };
        intrinsic[(i, 0)] = p;
        intrinsic[(i, 1)] = q;
        ambient[(i, 0)] = x;
        ambient[(i, 1)] = y;
        ambient[(i, 2)] = z;
    }
    Ok((ambient, intrinsic))
}

fn rank_neighbors(points: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = points.nrows();
    (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| {
                let da = (points.row(i) - points.row(a)).norm_squared();
                let db = (points.row(i) - points.row(b)).norm_squared();
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
            order
        })
        .collect()
}

/// Trustworthiness of an embedding against reference coordinates.
///
/// `T(k) = 1 − 2/(Nk(2N − 3k − 1)) Σ_i Σ_{j∈U_i} (r(i,j) − k)`, where `U_i`
/// holds the k nearest embedded neighbors of `i` that are not among its k
/// nearest reference neighbors, and `r(i,j)` ranks `j` by reference distance
/// from `i`. 1 means every embedded neighborhood is genuine.
pub fn trustworthiness(reference: &DMatrix<f64>, embedded: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = reference.nrows();
    if embedded.nrows() != n {
        return Err(Error::invalid("point counts differ"));
    }
    if k == 0 || 2 * n < 3 * k + 1 {
        return Err(Error::invalid(format!("k = {k} out of range for n = {n}")));
    }
    let ref_order = rank_neighbors(reference);
    let emb_order = rank_neighbors(embedded);

    let mut penalty = 0.0f64;
    for i in 0..n {
        // rank of j in the reference ordering of i (1-based)
        let mut rank = vec![0usize; n];
        for (pos, &j) in ref_order[i].iter().enumerate() {
            rank[j] = pos + 1;
        }
        let ref_knn: std::collections::HashSet<usize> =
            ref_order[i][..k].iter().cloned().collect();
        for &j in &emb_order[i][..k] {
            if !ref_knn.contains(&j) {
                penalty += (rank[j] - k) as f64;
            }
        }
    }
    let norm = 2.0 / (n as f64 * k as f64 * (2.0 * n as f64 - 3.0 * k as f64 - 1.0));
    Ok(1.0 - norm * penalty)
}

/// Relative residual of the best affine map from `embedded` onto `target`.
///
/// Fits `target ≈ embedded·A + 1bᵀ` by least squares and returns
/// `‖target − fit‖_F / ‖target − mean(target)‖_F`.
pub fn affine_procrustes_residual(embedded: &DMatrix<f64>, target: &DMatrix<f64>) -> f64 {
    let n = embedded.nrows();
    let r = embedded.ncols();
    // Augment with a constant column for the offset.
    let mut design = DMatrix::zeros(n, r + 1);
    design.view_mut((0, 0), (n, r)).copy_from(embedded);
    for i in 0..n {
        design[(i, r)] = 1.0;
    }
    let svd = design.svd(true, true);
    let coef = svd
        .solve(target, 1e-12)
        .expect("affine least squares is always solvable via SVD");
    let fit = {
        let mut d = DMatrix::zeros(n, r + 1);
        d.view_mut((0, 0), (n, r)).copy_from(embedded);
        for i in 0..n {
            d[(i, r)] = 1.0;
        }
        d * coef
    };
    let resid = (target - fit).norm();
    let mut centered = target.clone();
    for c in 0..target.ncols() {
        let mean = target.column(c).sum() / n as f64;
        for i in 0..n {
            centered[(i, c)] -= mean;
        }
    }
    let scale = centered.norm();
    if scale == 0.0 {
        resid
    } else {
        resid / scale
    }
}
