//! Variational classification and regression on encoded molecules.
//!
//! Each molecule is encoded once into a statevector. A trainable ansatz of
//! Ry layers and CZ or CRX entanglers then acts on it, and the model output
//! is a Z-string expectation value. Training minimizes the mean squared
//! error with [`minimize`] from uniformly random starting angles. Every
//! (fold, restart) job is independent and seeded, so results do not depend on
//! how jobs are scheduled.

mod ansatz;
mod cobyla;
mod kfold;
mod stats;
mod train;

use serde::{Deserialize, Serialize};

use crate::encoder::{EncodeError, EncodingParams, DEFAULT_MAX_PATH, DEFAULT_NBITS};
use crate::molgraph::MolGraph;
use crate::sim::{PauliString, SimError};

pub use ansatz::{build_ansatz, AnsatzConfig, AnsatzRotation, Entanglement, Entangler, ParamCircuit};
pub use cobyla::{minimize, MinimizeOptions, MinimizeResult, OptimizeError};
pub use kfold::{stratified_kfold_labels, stratified_kfold_targets, FoldError, Split};
pub use stats::{accuracy, percentile, r_squared, Band};
pub use train::{run_experiment, train_vqc, train_vqr};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VqmlError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("fold {fold}: training split contains a single class")]
    SingleClass { fold: usize },
    #[error("fold {fold}: training targets are constant, so R² is undefined")]
    ConstantTargets { fold: usize },
    #[error("fold {fold}: test targets are constant, so R² is undefined")]
    ConstantTestTargets { fold: usize },
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Regress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Qmse,
    Fingerprint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintParams {
    pub nbits: usize,
    pub max_path: usize,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        FingerprintParams {
            nbits: DEFAULT_NBITS,
            max_path: DEFAULT_MAX_PATH,
        }
    }
}

fn default_restarts() -> usize {
    100
}

fn default_folds() -> usize {
    5
}

fn default_rho_begin() -> f64 {
    1.0
}

fn default_rho_end() -> f64 {
    1e-6
}

/// One experiment: task, encoding, ansatz, observable and budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub encoding: Encoding,
    #[serde(default)]
    pub gate_1q: AnsatzRotation,
    pub gate_2q: Entangler,
    pub entanglement: Entanglement,
    pub layers: usize,
    /// Z-string read with the leftmost letter on qubit 0; all-Z when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<PauliString>,
    /// Objective evaluations per restart.
    pub max_iters: usize,
    #[serde(default = "default_restarts")]
    pub n_restarts: usize,
    #[serde(default = "default_folds")]
    pub k_folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub encoding_params: EncodingParams,
    #[serde(default)]
    pub fingerprint: FingerprintParams,
    /// Register width; the largest molecule's atom count when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default = "default_rho_begin")]
    pub rho_begin: f64,
    #[serde(default = "default_rho_end")]
    pub rho_end: f64,
}

impl RunConfig {
    pub fn ansatz(&self) -> AnsatzConfig {
        AnsatzConfig {
            gate_1q: self.gate_1q,
            gate_2q: self.gate_2q,
            entanglement: self.entanglement,
            layers: self.layers,
        }
    }

    pub fn validate(&self) -> Result<(), VqmlError> {
        let bad = |m: &str| Err(VqmlError::Config(m.to_string()));
        if self.layers == 0 {
            return bad("layers must be at least 1");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.n_restarts == 0 {
            return bad("n_restarts must be at least 1");
        }
        if self.k_folds < 2 {
            return bad("k_folds must be at least 2");
        }
        if self.n_qubits == Some(0) {
            return bad("n_qubits must be at least 1");
        }
        self.encoding_params.validate()?;
        Ok(())
    }

    fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            max_evals: self.max_iters,
            rho_begin: self.rho_begin,
            rho_end: self.rho_end,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub names: Vec<String>,
    pub molecules: Vec<MolGraph>,
    /// 0 or 1.
    pub labels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetDataset {
    pub names: Vec<String>,
    pub molecules: Vec<MolGraph>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Labeled(LabeledDataset),
    Targets(TargetDataset),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub restart: usize,
    pub seed: u64,
    pub final_loss: f64,
    /// Accuracy for classification, R² for regression.
    pub train_score: f64,
    pub test_score: f64,
    pub n_evals: usize,
    /// Best loss after each objective evaluation.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub restarts: Vec<RestartResult>,
}

/// The run whose final loss is the (lower) median over all folds and
/// restarts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianModel {
    pub fold: usize,
    pub restart: usize,
    pub final_loss: f64,
    pub params: Vec<f64>,
    /// (molecule index, prediction) on that fold's test split: a class for
    /// classification, a de-normalized value for regression.
    pub test_predictions: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub task: Task,
    pub encoding: Encoding,
    pub n_molecules: usize,
    pub n_qubits: usize,
    pub n_params: usize,
    pub folds: Vec<FoldResult>,
    pub train_score: Band,
    pub test_score: Band,
    pub final_loss: Band,
    pub median_model: MedianModel,
}

impl RunResult {
    pub fn runs(&self) -> impl Iterator<Item = (usize, &RestartResult)> {
        self.folds
            .iter()
            .flat_map(|f| f.restarts.iter().map(move |r| (f.fold, r)))
    }

    /// `fold,restart,eval,loss` rows for plotting loss curves.
    pub fn trace_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("fold,restart,eval,loss\n");
        for (fold, r) in self.runs() {
            for (i, v) in r.trace.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{fold},{},{},{}",
                    r.restart,
                    i + 1,
                    crate::similarity::round_sig(*v)
                );
            }
        }
        out
    }
}
