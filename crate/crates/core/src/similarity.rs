//! Tanimoto and fidelity similarity matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::contraction::{contracted_fidelity, direct_fidelity, ContractionError, PairFidelity};
use crate::encoder::{CouplingGate, EncodingParams, Fingerprint, RotationGate};
use crate::exec;
use crate::molgraph::MolGraph;
use crate::sim::Simulator;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimilarityError {
    #[error("fingerprint lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("{labels} labels for {items} items")]
    LabelCount { labels: usize, items: usize },
    #[error("pair ({a}, {b}): {source}")]
    Pair {
        a: String,
        b: String,
        #[source]
        source: ContractionError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Tanimoto,
    Fidelity,
}

/// Symmetric similarity matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub kind: SimilarityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_1q: Option<RotationGate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_2q: Option<CouplingGate>,
    #[serde(default)]
    pub contracted: bool,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Register width used for each pair; present for contracted fidelity
    /// matrices, with the molecule's own atom count on the diagonal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<Vec<usize>>>,
}

/// |a ∧ b| / (|a| + |b| − |a ∧ b|). Two empty fingerprints are identical,
/// so their similarity is 1.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, SimilarityError> {
    if a.len() != b.len() {
        return Err(SimilarityError::LengthMismatch(a.len(), b.len()));
    }
    let union = a.or_count(b);
    if union == 0 {
        return Ok(1.0);
    }
    Ok(a.and_count(b) as f64 / union as f64)
}

pub fn tanimoto_matrix(fps: &[Fingerprint], labels: &[String]) -> Result<SimilarityMatrix, SimilarityError> {
    check_labels(labels, fps.len())?;
    let n = fps.len();
    let mut values = identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let t = tanimoto(&fps[i], &fps[j])?;
            values[i][j] = t;
            values[j][i] = t;
        }
    }
    Ok(SimilarityMatrix {
        kind: SimilarityKind::Tanimoto,
        gate_1q: None,
        gate_2q: None,
        contracted: false,
        labels: labels.to_vec(),
        values,
        qubits: None,
    })
}

/// Fidelities of all pairs, evaluated in parallel. With `contract`, each pair
/// is chain-contracted first and its register width recorded.
pub fn fidelity_matrix(
    mols: &[MolGraph],
    labels: &[String],
    params: &EncodingParams,
    contract: bool,
    sim: &Simulator,
) -> Result<SimilarityMatrix, SimilarityError> {
    check_labels(labels, mols.len())?;
    let n = mols.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<PairFidelity, ContractionError>> = exec::map_slice(&pairs, |&(i, j)| {
        if contract {
            contracted_fidelity(&mols[i], &mols[j], params, sim)
        } else {
            direct_fidelity(&mols[i], &mols[j], params, sim)
        }
    });

    let mut values = identity(n);
    let mut qubits: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut row = vec![0; n];
            row[i] = mols[i].n_atoms();
            row
        })
        .collect();
    for (&(i, j), r) in pairs.iter().zip(results) {
        let pf = r.map_err(|source| SimilarityError::Pair {
            a: labels[i].clone(),
            b: labels[j].clone(),
            source,
        })?;
        values[i][j] = pf.fidelity;
        values[j][i] = pf.fidelity;
        qubits[i][j] = pf.qubits;
        qubits[j][i] = pf.qubits;
    }
    Ok(SimilarityMatrix {
        kind: SimilarityKind::Fidelity,
        gate_1q: Some(params.gate_1q),
        gate_2q: Some(params.gate_2q),
        contracted: contract,
        labels: labels.to_vec(),
        values,
        qubits: contract.then_some(qubits),
    })
}

/// Fidelity matrices for Ry combined with each two-qubit coupling gate, one
/// encoding layer.
pub fn gate_sweep(
    mols: &[MolGraph],
    labels: &[String],
    base: &EncodingParams,
    contract: bool,
    sim: &Simulator,
) -> Result<BTreeMap<CouplingGate, SimilarityMatrix>, SimilarityError> {
    let mut out = BTreeMap::new();
    for gate_2q in [CouplingGate::Rxx, CouplingGate::Ryy, CouplingGate::Rzz] {
        let params = EncodingParams {
            gate_1q: RotationGate::Ry,
            gate_2q,
            layers_x: 1,
            ..*base
        };
        out.insert(gate_2q, fidelity_matrix(mols, labels, &params, contract, sim)?);
    }
    Ok(out)
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn off_diagonal(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.values[i][j])
            .collect()
    }

    /// Sample variance (n − 1 denominator) of the upper-triangle entries.
    pub fn off_diagonal_variance(&self) -> f64 {
        sample_variance(&self.off_diagonal())
    }

    /// Label header followed by one labelled row per molecule.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(&csv_field(l));
            for v in row {
                let _ = write!(out, ",{}", round_sig(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Per-pair register widths in the same layout as [`to_csv`](Self::to_csv).
    pub fn qubits_csv(&self) -> Option<String> {
        let q = self.qubits.as_ref()?;
        let mut out = String::from("label");
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(q) {
            out.push_str(&csv_field(l));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        Some(out)
    }

    /// `i j value` triples with a blank line after each row, which is the
    /// layout gnuplot expects for `splot … with image`/`pm3d`.
    pub fn to_grid(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{i} {j} {}", round_sig(*v));
            }
            out.push('\n');
        }
        out
    }

    /// The same matrix with every value rounded to 12 significant digits.
    pub fn rounded(&self) -> SimilarityMatrix {
        SimilarityMatrix {
            values: self
                .values
                .iter()
                .map(|r| r.iter().map(|v| round_sig(*v)).collect())
                .collect(),
            ..self.clone()
        }
    }
}

/// Rounds to 12 significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect()
}

fn check_labels(labels: &[String], items: usize) -> Result<(), SimilarityError> {
    if labels.len() != items {
        return Err(SimilarityError::LabelCount {
            labels: labels.len(),
            items,
        });
    }
    Ok(())
}
