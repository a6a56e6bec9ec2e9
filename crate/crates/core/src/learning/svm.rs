//! Kernel SVM trained by sequential minimal optimization.
//!
//! Solves the dual program `min ½αᵀHα − 1ᵀα` s.t. `yᵀα = 0`, `0 ≤ αᵢ ≤ C`
//! with `H_ij = yᵢyⱼK(xᵢ,xⱼ)`, by repeatedly optimizing the maximal violating
//! pair of dual variables analytically. Termination is the KKT certificate:
//! the maximal violation gap drops below `tol`.

use nalgebra::DMatrix;

use super::Dataset;
use crate::error::{Error, Result};

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `K(a,b) = aᵀb`
    Linear,
    /// `K(a,b) = (γ·aᵀb + c)^degree`
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
    /// `K(a,b) = tanh(γ·aᵀb + c)`
    Sigmoid { gamma: f64, coef0: f64 },
    /// `K(a,b) = exp(−γ‖a − b‖²)`
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rbf { gamma } => {
                if !(gamma > 0.0) {
                    return Err(Error::invalid("rbf gamma must be > 0"));
                }
            }
            Kernel::Polynomial { degree, .. } => {
                if degree < 1 {
                    return Err(Error::invalid("polynomial degree must be ≥ 1"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Evaluates `K(a, b)`.
pub fn kernel_eval(kernel: &Kernel, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "kernel arguments have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    kernel.validate()?;
    let dot = || a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    Ok(match *kernel {
        Kernel::Linear => dot(),
        Kernel::Polynomial {
            degree,
            gamma,
            coef0,
        } => (gamma * dot() + coef0).powi(degree as i32),
        Kernel::Sigmoid { gamma, coef0 } => (gamma * dot() + coef0).tanh(),
        Kernel::Rbf { gamma } => {
            let dist_sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
            (-gamma * dist_sq).exp()
        }
    })
}

/// The label-weighted Gram matrix `H_ij = yᵢyⱼK(xᵢ,xⱼ)`.
pub fn gram_matrix(data: &Dataset, kernel: &Kernel) -> Result<DMatrix<f64>> {
    let n = data.n_samples();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| data.x.row(i).iter().cloned().collect())
        .collect();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let k = kernel_eval(kernel, &rows[i], &rows[j])?;
            let v = data.y[i] * data.y[j] * k;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// A trained SVM: dual variables, bias, and the support vectors needed to
/// evaluate the decision function `f(x) = Σ αᵢyᵢK(xᵢ,x) + b`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SvmModel {
    /// Dual variables for every training sample, in training order.
    pub alphas: Vec<f64>,
    pub b: f64,
    pub support_indices: Vec<usize>,
    pub c: f64,
    pub kernel: Kernel,
    /// Support vectors (αᵢ > 0): rows of the training matrix.
    pub support_x: Vec<Vec<f64>>,
    /// Labels of the support vectors.
    pub support_y: Vec<f64>,
    /// Dual variables of the support vectors.
    pub support_alpha: Vec<f64>,
}

impl SvmModel {
    /// Dual objective value `½αᵀHα − 1ᵀα` of the stored solution.
    pub fn dual_objective(&self, data: &Dataset) -> Result<f64> {
        dual_objective(data, &self.kernel, &self.alphas)
    }
}

/// Dual objective `½αᵀHα − 1ᵀα` for an arbitrary multiplier vector.
pub fn dual_objective(data: &Dataset, kernel: &Kernel, alphas: &[f64]) -> Result<f64> {
    if alphas.len() != data.n_samples() {
        return Err(Error::invalid("alpha length must match sample count"));
    }
    let h = gram_matrix(data, kernel)?;
    let a = nalgebra::DVector::from_column_slice(alphas);
    Ok(0.5 * (a.transpose() * &h * &a)[(0, 0)] - a.sum())
}

/// Trains an SVM with sequential minimal optimization.
///
/// `tol` bounds the residual KKT violation; `max_passes` caps the number of
/// pair updates before a convergence error is returned.
pub fn svm_train(
    data: &Dataset,
    c: f64,
    kernel: &Kernel,
    tol: f64,
    max_passes: usize,
) -> Result<SvmModel> {
    data.require_binary_labels()?;
    kernel.validate()?;
    if !(c > 0.0) {
        return Err(Error::invalid("C must be > 0"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be > 0"));
    }

    let n = data.n_samples();
    let y: Vec<f64> = data.y.iter().cloned().collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| data.x.row(i).iter().cloned().collect())
        .collect();

    // Plain kernel Gram matrix (no label weighting); H = (y∘)K(∘y).
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel_eval(kernel, &rows[i], &rows[j])?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }

    let mut alphas = vec![0.0f64; n];
    // f̃_i = Σ_m α_m y_m K(x_m, x_i); −(f̃_i − y_i) drives pair selection.
    let mut f_tilde = vec![0.0f64; n];

    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);

    let mut passes = 0usize;
    loop {
        // Maximal violating pair: i maximizes −Ẽ over I_up, j minimizes over I_low.
        let mut i_best: Option<(usize, f64)> = None;
        let mut j_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let e = -(f_tilde[t] - y[t]);
            if in_up(alphas[t], y[t]) && i_best.map_or(true, |(_, v)| e > v) {
                i_best = Some((t, e));
            }
            if in_low(alphas[t], y[t]) && j_best.map_or(true, |(_, v)| e < v) {
                j_best = Some((t, e));
            }
        }
        let ((i, m_up), (j, m_low)) = match (i_best, j_best) {
            (Some(a), Some(b)) => (a, b),
            _ => break, // no feasible direction remains
        };
        if m_up - m_low <= tol {
            break; // KKT satisfied within tol
        }
        if passes >= max_passes {
            return Err(Error::Convergence {
                what: "svm smo",
                iterations: passes,
                last_iterate: alphas,
            });
        }
        passes += 1;

        if !optimize_pair(i, j, &y, &k, c, &mut alphas, &mut f_tilde) {
            // The maximal pair is numerically stuck; scan I_low for any
            // partner that makes progress before giving up.
            let mut moved = false;
            let mut candidates: Vec<usize> = (0..n)
                .filter(|&t| t != i && in_low(alphas[t], y[t]))
                .collect();
            candidates.sort_by(|&a, &b| {
                let ea = -(f_tilde[a] - y[a]);
                let eb = -(f_tilde[b] - y[b]);
                ea.partial_cmp(&eb).unwrap().then(a.cmp(&b))
            });
            for t in candidates {
                if optimize_pair(i, t, &y, &k, c, &mut alphas, &mut f_tilde) {
                    moved = true;
                    break;
                }
            }
            if !moved {
                // Violation gap remains above tol but no pair can move:
                // the subproblem is numerically stuck, report it.
                return Err(Error::Convergence {
                    what: "svm smo (stalled)",
                    iterations: passes,
                    last_iterate: alphas,
                });
            }
        }
    }

    // Bias from free support vectors, averaged; fall back to the violation
    // gap midpoint when every support vector sits on a box bound.
    let mut b_acc = 0.0;
    let mut b_count = 0usize;
    for t in 0..n {
        if alphas[t] > 0.0 && alphas[t] < c {
            b_acc += y[t] - f_tilde[t];
            b_count += 1;
        }
    }
    let b = if b_count > 0 {
        b_acc / b_count as f64
    } else {
        let mut m_up = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let e = -(f_tilde[t] - y[t]);
            if in_up(alphas[t], y[t]) {
                m_up = m_up.max(e);
            }
            if in_low(alphas[t], y[t]) {
                m_low = m_low.min(e);
            }
        }
        if m_up.is_finite() && m_low.is_finite() {
            (m_up + m_low) / 2.0
        } else {
            0.0
        }
    };

    let support_indices: Vec<usize> = (0..n).filter(|&t| alphas[t] > 0.0).collect();
    let model = SvmModel {
        b,
        support_x: support_indices.iter().map(|&t| rows[t].clone()).collect(),
        support_y: support_indices.iter().map(|&t| y[t]).collect(),
        support_alpha: support_indices.iter().map(|&t| alphas[t]).collect(),
        support_indices,
        alphas,
        c,
        kernel: *kernel,
    };
    Ok(model)
}

/// Analytic two-variable subproblem. Returns false when no progress was made.
fn optimize_pair(
    i: usize,
    j: usize,
    y: &[f64],
    k: &DMatrix<f64>,
    c: f64,
    alphas: &mut [f64],
    f_tilde: &mut [f64],
) -> bool {
    if i == j {
        return false;
    }
    let (ai_old, aj_old) = (alphas[i], alphas[j]);
    let s = y[i] * y[j];
    let (lo, hi) = if s < 0.0 {
        ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
    } else {
        ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
    };
    if lo >= hi {
        return false;
    }
    let e_i = f_tilde[i] - y[i];
    let e_j = f_tilde[j] - y[j];
    let eta = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];

    let mut aj_new = if eta > 1e-12 {
        (aj_old + y[j] * (e_i - e_j) / eta).clamp(lo, hi)
    } else {
        // Flat or indefinite direction: objective is linear (or concave)
        // along the segment, so the best point is an endpoint.
        let slope = y[j] * (e_i - e_j);
        if slope > 0.0 {
            hi
        } else if slope < 0.0 {
            lo
        } else {
            return false;
        }
    };
    // Snap onto the segment ends so bound membership is exact; values an ulp
    // shy of a bound would otherwise linger in the violating sets forever.
    let snap = 1e-12 * c;
    if aj_new - lo <= snap {
        aj_new = lo;
    } else if hi - aj_new <= snap {
        aj_new = hi;
    }
    if aj_new == aj_old {
        return false;
    }
    // α_i is derived from the (snapped) α_j, preserving yᵀα; the residual
    // snap below only clears rounding dust at the box corners.
    let mut ai_new = ai_old + s * (aj_old - aj_new);
    if ai_new.abs() <= snap {
        ai_new = 0.0;
    } else if (c - ai_new).abs() <= snap {
        ai_new = c;
    }
    let ai_new = ai_new.clamp(0.0, c);

    let (di, dj) = (ai_new - ai_old, aj_new - aj_old);
    for t in 0..y.len() {
        f_tilde[t] += di * y[i] * k[(i, t)] + dj * y[j] * k[(j, t)];
    }
    alphas[i] = ai_new;
    alphas[j] = aj_new;
    true
}

/// Evaluates the decision function; the label is the sign of the margin with
/// ties resolved to +1.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<(f64, f64)> {
    let mut margin = model.b;
    for ((sx, sy), sa) in model
        .support_x
        .iter()
        .zip(&model.support_y)
        .zip(&model.support_alpha)
    {
        margin += sa * sy * kernel_eval(&model.kernel, sx, x)?;
    }
    let label = if margin >= 0.0 { 1.0 } else { -1.0 };
    Ok((label, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn two_point_data() -> Dataset {
        Dataset::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[1.0, -1.0]).unwrap()
    }

    #[test]
    fn kernel_values_match_definitions() {
        assert_eq!(
            kernel_eval(&Kernel::Linear, &[3.0, 4.0], &[3.0, 4.0]).unwrap(),
            25.0
        );
        assert_abs_diff_eq!(
            kernel_eval(&Kernel::Rbf { gamma: 0.7 }, &[1.0, 2.0], &[1.0, 2.0]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            kernel_eval(
                &Kernel::Polynomial {
                    degree: 2,
                    gamma: 1.0,
                    coef0: 1.0
                },
                &[1.0, 0.0],
                &[1.0, 0.0]
            )
            .unwrap(),
            4.0,
            epsilon = 1e-15
        );
        assert!(kernel_eval(&Kernel::Linear, &[1.0], &[1.0, 2.0]).is_err());
        assert!(kernel_eval(&Kernel::Rbf { gamma: 0.0 }, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn gram_matrix_single_sample_is_plain_kernel() {
        let data = Dataset::from_rows(&[vec![2.0, 1.0]], &[-1.0]).unwrap();
        let h = gram_matrix(&data, &Kernel::Linear).unwrap();
        assert_eq!(h[(0, 0)], 5.0);
    }

    #[test]
    fn gram_matrix_of_duplicate_points_with_opposite_labels() {
        let data =
            Dataset::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]], &[1.0, -1.0]).unwrap();
        let h = gram_matrix(&data, &Kernel::Rbf { gamma: 1.0 }).unwrap();
        assert_abs_diff_eq!(h[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 1)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 0)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gram_matrix_linear_matches_outer_product_oracle() {
        let mut rng = rng::seeded(8);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..20)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let data = Dataset::from_rows(&rows, &y).unwrap();
        let h = gram_matrix(&data, &Kernel::Linear).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let oracle: f64 = (0..3).map(|d| y[i] * rows[i][d] * y[j] * rows[j][d]).sum();
                let err = (h[(i, j)] - oracle).abs();
                assert!(err <= 1e-12 * oracle.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gram_matrix_is_psd_for_linear_and_rbf() {
        let mut rng = rng::seeded(14);
        let rows: Vec<Vec<f64>> = (0..15)
            .map(|_| (0..4).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..15)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let data = Dataset::from_rows(&rows, &y).unwrap();
        for kernel in [Kernel::Linear, Kernel::Rbf { gamma: 0.5 }] {
            let h = gram_matrix(&data, &kernel).unwrap();
            let eig = nalgebra::SymmetricEigen::new(h);
            let min = eig.eigenvalues.min();
            assert!(min >= -1e-8, "min eigenvalue {min} for {kernel:?}");
        }
    }

    #[test]
    fn two_point_problem_recovers_the_bisector() {
        let data = two_point_data();
        let model = svm_train(&data, 10.0, &Kernel::Linear, 1e-6, 1000).unwrap();
        assert_abs_diff_eq!(model.alphas[0], model.alphas[1], epsilon = 1e-12);
        assert_abs_diff_eq!(model.alphas[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(model.b, 0.0, epsilon = 1e-9);

        let (label, margin) = svm_predict(&model, &[5.0, 0.0]).unwrap();
        assert_eq!(label, 1.0);
        assert!(margin > 0.0);
        let (label0, margin0) = svm_predict(&model, &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(margin0, 0.0, epsilon = 1e-12);
        assert_eq!(label0, 1.0); // tie goes to +1
        let (label_neg, _) = svm_predict(&model, &[-2.0, 1.0]).unwrap();
        assert_eq!(label_neg, -1.0);
    }

    fn blobs(n_per_class: usize, seed: u64) -> Dataset {
        let mut rng = rng::seeded(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for &(cx, label) in &[(2.0, 1.0), (-2.0, -1.0)] {
            for _ in 0..n_per_class {
                let r: f64 = rng.random_range(0.0..0.5);
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                rows.push(vec![cx + r * theta.cos(), r * theta.sin()]);
                labels.push(label);
            }
        }
        Dataset::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn separable_blobs_reach_perfect_training_accuracy() {
        let data = blobs(50, 4);
        let model = svm_train(&data, 10.0, &Kernel::Linear, 1e-4, 100_000).unwrap();
        let correct = (0..data.n_samples())
            .filter(|&i| {
                let x: Vec<f64> = data.x.row(i).iter().cloned().collect();
                svm_predict(&model, &x).unwrap().0 == data.y[i]
            })
            .count();
        assert_eq!(correct, data.n_samples());
    }

    #[test]
    fn constraints_hold_and_dual_beats_random_feasible_points() {
        for seed in 0..5u64 {
            let mut rng = rng::seeded(900 + seed);
            let n = 10;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
                .collect();
            let mut y: Vec<f64> = (0..n)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            y[0] = 1.0;
            y[1] = -1.0;
            let data = Dataset::from_rows(&rows, &y).unwrap();
            let c = 2.0;
            let kernel = Kernel::Rbf { gamma: 0.8 };
            let model = svm_train(&data, c, &kernel, 1e-8, 200_000).unwrap();

            assert!(model.alphas.iter().all(|&a| (0.0..=c).contains(&a)));
            let balance: f64 = model.alphas.iter().zip(&y).map(|(a, yy)| a * yy).sum();
            assert!(balance.abs() <= 1e-9, "yᵀα = {balance}");

            let ours = model.dual_objective(&data).unwrap();
            let mut best_random = f64::INFINITY;
            for _ in 0..10_000 {
                let alphas = random_feasible(&y, c, &mut rng);
                let obj = dual_objective(&data, &kernel, &alphas).unwrap();
                best_random = best_random.min(obj);
            }
            assert!(
                ours <= best_random + 1e-6,
                "seed {seed}: smo {ours} vs best random {best_random}"
            );
        }
    }

    /// Draws a random point in the dual feasible set: box [0, C] with yᵀα = 0.
    pub(crate) fn random_feasible(
        y: &[f64],
        c: f64,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Vec<f64> {
        let n = y.len();
        let mut alphas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..c)).collect();
        // Project onto yᵀα = 0 by shifting the positive and negative groups.
        let pos: f64 = alphas
            .iter()
            .zip(y)
            .filter(|(_, &yy)| yy > 0.0)
            .map(|(a, _)| a)
            .sum();
        let neg: f64 = alphas
            .iter()
            .zip(y)
            .filter(|(_, &yy)| yy < 0.0)
            .map(|(a, _)| a)
            .sum();
        let target = pos.min(neg);
        let (ps, ns) = (
            if pos > 0.0 { target / pos } else { 0.0 },
            if neg > 0.0 { target / neg } else { 0.0 },
        );
        for (a, &yy) in alphas.iter_mut().zip(y) {
            *a *= if yy > 0.0 { ps } else { ns };
        }
        alphas
    }

    #[test]
    fn free_support_vectors_sit_on_the_margin() {
        let data = blobs(30, 6);
        let tol = 1e-6;
        let model = svm_train(&data, 1.0, &Kernel::Rbf { gamma: 0.5 }, tol, 200_000).unwrap();
        let mut checked = 0;
        for (idx, &a) in model.alphas.iter().enumerate() {
            if a > 1e-9 && a < model.c - 1e-9 {
                let x: Vec<f64> = data.x.row(idx).iter().cloned().collect();
                let (_, margin) = svm_predict(&model, &x).unwrap();
                assert_abs_diff_eq!(data.y[idx] * margin, 1.0, epsilon = 1e-3);
                checked += 1;
            }
        }
        assert!(checked > 0, "no free support vectors to check");
    }

    #[test]
    fn single_class_data_is_rejected() {
        let data = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[1.0, 1.0]).unwrap();
        assert!(svm_train(&data, 1.0, &Kernel::Linear, 1e-4, 100).is_err());
        let bad = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[1.0, 0.5]).unwrap();
        assert!(svm_train(&bad, 1.0, &Kernel::Linear, 1e-4, 100).is_err());
    }

    #[test]
    fn rbf_prediction_is_invariant_under_matched_rescaling() {
        // Scaling features by c and γ by 1/c² preserves every ‖a−b‖²γ.
        let data = blobs(20, 9);
        let gamma = 0.7;
        let scale = 3.0;
        let model = svm_train(&data, 5.0, &Kernel::Rbf { gamma }, 1e-6, 200_000).unwrap();

        let scaled_rows: Vec<Vec<f64>> = (0..data.n_samples())
            .map(|i| data.x.row(i).iter().map(|v| v * scale).collect())
            .collect();
        let y: Vec<f64> = data.y.iter().cloned().collect();
        let scaled = Dataset::from_rows(&scaled_rows, &y).unwrap();
        let model_scaled = svm_train(
            &scaled,
            5.0,
            &Kernel::Rbf {
                gamma: gamma / (scale * scale),
            },
            1e-6,
            200_000,
        )
        .unwrap();

        let mut rng = rng::seeded(123);
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
            let (l1, _) = svm_predict(&model, &x).unwrap();
            let (l2, _) = svm_predict(&model_scaled, &xs).unwrap();
            assert_eq!(l1, l2);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kernels_are_symmetric(
            a in proptest::collection::vec(-5.0f64..5.0, 3),
            b in proptest::collection::vec(-5.0f64..5.0, 3),
            gamma in 0.1f64..2.0,
        ) {
            for kernel in [
                Kernel::Linear,
                Kernel::Polynomial { degree: 3, gamma, coef0: 0.5 },
                Kernel::Sigmoid { gamma, coef0: -0.2 },
                Kernel::Rbf { gamma },
            ] {
                let ab = kernel_eval(&kernel, &a, &b).unwrap();
                let ba = kernel_eval(&kernel, &b, &a).unwrap();
                prop_assert_eq!(ab, ba);
            }
        }
    }
}
