//! Classifier model serialization.
//!
//! Models travel inside rule sets as a self-describing, versioned JSON text
//! document: field names and array shapes are explicit, and floats are
//! printed in shortest-round-trip decimal form, so deserializing reproduces
//! every coefficient bit for bit.

use serde::{Deserialize, Serialize};

use super::classify::ClassifierModel;
use crate::error::{Error, Result};

/// Version of the enclosing model document format.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    #[serde(flatten)]
    model: ClassifierModel,
}

/// Serializes a classifier to the versioned text format.
pub fn serialize_model(model: &ClassifierModel) -> String {
    serde_json::to_string_pretty(&ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    })
    .expect("classifier models always serialize")
}

/// Parses a serialized classifier, validating the format version.
pub fn deserialize_model(text: &str) -> Result<ClassifierModel> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("model parse: {e}")))?;
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported model format version {}",
            doc.format_version
        )));
    }
    Ok(doc.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learning::regression::RegressionModel;
    use crate::learning::svm::{svm_train, Kernel};
    use crate::learning::Dataset;

    #[test]
    fn regression_model_roundtrips_exact_decimals() {
        let model = ClassifierModel::Regression {
            model: RegressionModel {
                weights: vec![0.1 + 0.2, -1.0 / 3.0, 1e-17, f64::MIN_POSITIVE],
                lambda: 0.05,
                intercept: std::f64::consts::PI,
            },
            schema_version: 1,
        };
        let text = serialize_model(&model);
        let back = deserialize_model(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn svm_model_roundtrips() {
        let data =
            Dataset::from_rows(&[vec![1.0, 0.3], vec![-1.0, -0.7]], &[1.0, -1.0]).unwrap();
        let svm = svm_train(&data, 10.0, &Kernel::Rbf { gamma: 0.37 }, 1e-6, 1000).unwrap();
        let model = ClassifierModel::Svm {
            model: svm,
            schema_version: 1,
        };
        let text = serialize_model(&model);
        let back = deserialize_model(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn wrong_version_and_garbage_are_rejected() {
        let model = ClassifierModel::ThresholdOnly {
            rho_norm_energy: 1.5,
            schema_version: 1,
        };
        let text = serialize_model(&model).replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(deserialize_model(&text).is_err());
        assert!(deserialize_model("not a model").is_err());
    }
}
