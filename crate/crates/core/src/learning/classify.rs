//! Occupancy classification engines over extracted feature vectors.
//!
//! Three engines of increasing cost: a plain threshold on normalized energy,
//! a linear regression thresholded at 0.5 over {0,1} targets, and a kernel
//! SVM whose +1 label maps to `H1`.

use super::regression::RegressionModel;
use super::svm::{svm_predict, svm_train, Kernel, SvmModel};
use super::Dataset;
use crate::error::{Error, Result};
use crate::sensing::{FeatureVector, Hypothesis};

/// Which classification engine a rule set requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    ThresholdOnly,
    Regression,
    Svm,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EngineKind::ThresholdOnly => "threshold_only",
            EngineKind::Regression => "regression",
            EngineKind::Svm => "svm",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold_only" => Ok(EngineKind::ThresholdOnly),
            "regression" => Ok(EngineKind::Regression),
            "svm" => Ok(EngineKind::Svm),
            other => Err(Error::invalid(format!("unknown engine '{other}'"))),
        }
    }
}

/// A trained occupancy classifier, tagged with the feature schema it expects.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum ClassifierModel {
    /// Threshold on normalized energy (energy metric / N).
    ThresholdOnly {
        rho_norm_energy: f64,
        schema_version: u32,
    },
    Regression {
        model: RegressionModel,
        schema_version: u32,
    },
    Svm {
        model: SvmModel,
        schema_version: u32,
    },
}

impl ClassifierModel {
    pub fn engine(&self) -> EngineKind {
        match self {
            ClassifierModel::ThresholdOnly { .. } => EngineKind::ThresholdOnly,
            ClassifierModel::Regression { .. } => EngineKind::Regression,
            ClassifierModel::Svm { .. } => EngineKind::Svm,
        }
    }

    pub fn schema_version(&self) -> u32 {
        match self {
            ClassifierModel::ThresholdOnly { schema_version, .. }
            | ClassifierModel::Regression { schema_version, .. }
            | ClassifierModel::Svm { schema_version, .. } => *schema_version,
        }
    }
}

/// Classifies one feature vector.
///
/// Returns the hypothesis and the engine's decision metric: normalized energy
/// for the threshold engine, the regression score (`H1` above 0.5), or the
/// SVM margin (`H1` on the +1 label).
pub fn classify(model: &ClassifierModel, feature: &FeatureVector) -> Result<(Hypothesis, f64)> {
    if feature.schema_version != model.schema_version() {
        return Err(Error::invalid(format!(
            "feature schema {} does not match model schema {}",
            feature.schema_version,
            model.schema_version()
        )));
    }
    match model {
        ClassifierModel::ThresholdOnly {
            rho_norm_energy, ..
        } => {
            let m = feature.normalized_energy();
            Ok((crate::sensing::decide(m, *rho_norm_energy), m))
        }
        ClassifierModel::Regression { model, .. } => {
            let score = model.predict(&feature.values)?;
            let hyp = if score > 0.5 {
                Hypothesis::H1Occupied
            } else {
                Hypothesis::H0Idle
            };
            Ok((hyp, score))
        }
        ClassifierModel::Svm { model, .. } => {
            let (label, margin) = svm_predict(model, &feature.values)?;
            let hyp = if label > 0.0 {
                Hypothesis::H1Occupied
            } else {
                Hypothesis::H0Idle
            };
            Ok((hyp, margin))
        }
    }
}

/// Fits the regression engine on labeled features.
///
/// Targets are {0, 1}; an explicit constant-1 column carries the intercept,
/// which is split back out of the solution. `lambda = 0` uses the exact OLS
/// path, anything larger the LASSO solver.
pub fn train_regression_classifier(
    features: &[FeatureVector],
    occupied: &[bool],
    lambda: f64,
    schema_version: u32,
) -> Result<ClassifierModel> {
    let rows = feature_rows(features, schema_version)?;
    let d = rows[0].len();
    // Constant columns (tier-masked zeros included) are collinear with the
    // intercept column; drop them and report weight 0.
    let varying: Vec<usize> = (0..d)
        .filter(|&j| rows.iter().any(|r| r[j] != rows[0][j]))
        .collect();
    let augmented: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut a: Vec<f64> = varying.iter().map(|&j| r[j]).collect();
            a.push(1.0);
            a
        })
        .collect();
    let targets: Vec<f64> = occupied.iter().map(|&o| if o { 1.0 } else { 0.0 }).collect();
    let fitted = if varying.is_empty() {
        // Degenerate: nothing varies, predict the class mean.
        RegressionModel {
            weights: Vec::new(),
            lambda,
            intercept: targets.iter().sum::<f64>() / targets.len() as f64,
        }
    } else {
        let data = Dataset::from_rows(&augmented, &targets)?;
        if lambda == 0.0 {
            super::regression::ols_fit(&data)?
        } else {
            super::regression::lasso_fit(&data, lambda, 1e-10, 100_000)?
        }
    };
    let mut packed = fitted.weights;
    let intercept = packed.pop().unwrap_or(fitted.intercept);
    let mut weights = vec![0.0; d];
    for (slot, &j) in varying.iter().enumerate() {
        weights[j] = packed[slot];
    }
    Ok(ClassifierModel::Regression {
        model: RegressionModel {
            weights,
            lambda,
            intercept,
        },
        schema_version,
    })
}

/// Fits the SVM engine on labeled features (occupied ↦ +1).
pub fn train_svm_classifier(
    features: &[FeatureVector],
    occupied: &[bool],
    c: f64,
    kernel: Kernel,
    schema_version: u32,
) -> Result<ClassifierModel> {
    let rows = feature_rows(features, schema_version)?;
    let labels: Vec<f64> = occupied.iter().map(|&o| if o { 1.0 } else { -1.0 }).collect();
    let data = Dataset::from_rows(&rows, &labels)?;
    let model = svm_train(&data, c, &kernel, 1e-4, 500_000)?;
    Ok(ClassifierModel::Svm {
        model,
        schema_version,
    })
}

fn feature_rows(features: &[FeatureVector], schema_version: u32) -> Result<Vec<Vec<f64>>> {
    if features.is_empty() {
        return Err(Error::invalid("training needs at least one feature vector"));
    }
    features
        .iter()
        .map(|f| {
            if f.schema_version != schema_version {
                return Err(Error::invalid(format!(
                    "feature schema {} does not match requested schema {}",
                    f.schema_version, schema_version
                )));
            }
            Ok(f.values.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::FEATURE_SCHEMA_VERSION;

    fn feat(values: [f64; 6]) -> FeatureVector {
        FeatureVector::new(values.to_vec(), FEATURE_SCHEMA_VERSION).unwrap()
    }

    #[test]
    fn threshold_engine_compares_normalized_energy() {
        let model = ClassifierModel::ThresholdOnly {
            rho_norm_energy: 1.2,
            schema_version: FEATURE_SCHEMA_VERSION,
        };
        let (hyp, m) = classify(&model, &feat([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(hyp, Hypothesis::H0Idle);
        assert_eq!(m, 0.0);
        let (hyp, _) = classify(&model, &feat([2.0, 0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(hyp, Hypothesis::H1Occupied);
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let model = ClassifierModel::ThresholdOnly {
            rho_norm_energy: 1.0,
            schema_version: 99,
        };
        assert!(classify(&model, &feat([0.0; 6])).is_err());
    }

    #[test]
    fn svm_engine_maps_positive_side_to_occupied() {
        // Two feature vectors differing in normalized energy only.
        let features = vec![
            feat([2.0, 0.0, 0.0, 0.0, 0.5, 0.1]),
            feat([0.5, 0.0, 0.0, 0.0, 0.5, 0.1]),
        ];
        let model = train_svm_classifier(
            &features,
            &[true, false],
            10.0,
            Kernel::Linear,
            FEATURE_SCHEMA_VERSION,
        )
        .unwrap();
        let (hyp, _) = classify(&model, &feat([2.5, 0.0, 0.0, 0.0, 0.5, 0.1])).unwrap();
        assert_eq!(hyp, Hypothesis::H1Occupied);
        let (hyp, _) = classify(&model, &feat([0.1, 0.0, 0.0, 0.0, 0.5, 0.1])).unwrap();
        assert_eq!(hyp, Hypothesis::H0Idle);
    }

    #[test]
    fn regression_decisions_match_direct_score_thresholding() {
        // 500 labeled synthetic vectors; the engine must agree with an
        // independent w·x + b > 0.5 computation on every one.
        let mut rng = crate::rng::seeded(42);
        use rand::Rng;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..500 {
            let occupied = i % 2 == 0;
            let base = if occupied { 1.8 } else { 0.9 };
            let noise: f64 = rng.random_range(-0.2..0.2);
            features.push(feat([base + noise, 0.0, 0.0, 0.0, 0.5, 0.05]));
            labels.push(occupied);
        }
        let model =
            train_regression_classifier(&features, &labels, 0.0, FEATURE_SCHEMA_VERSION).unwrap();
        let (weights, intercept) = match &model {
            ClassifierModel::Regression { model, .. } => (model.weights.clone(), model.intercept),
            _ => unreachable!(),
        };
        let mut agree = 0usize;
        for f in &features {
            let (hyp, _) = classify(&model, f).unwrap();
            let score: f64 =
                weights.iter().zip(&f.values).map(|(w, v)| w * v).sum::<f64>() + intercept;
            let oracle = if score > 0.5 {
                Hypothesis::H1Occupied
            } else {
                Hypothesis::H0Idle
            };
            if hyp == oracle {
                agree += 1;
            }
        }
        assert_eq!(agree, features.len());
    }
}
