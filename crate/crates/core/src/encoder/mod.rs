//! Hybrid Coulomb-adjacency encoding and the fingerprint baseline.
//!
//! The coupling matrix of a heavy-atom graph is
//!
//! ```text
//! M_ii = 0.5 · ε_T(i) · Z_i^d
//! M_ij = ε_D(ij) · Z_i · Z_j / b_ij     for bonded i, j
//! ```
//!
//! and is lowered to a circuit with one single-qubit rotation per atom and one
//! two-qubit rotation per bond, using the raw entries as angles in radians.

mod fingerprint;
mod pca;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::molgraph::MolGraph;
use crate::sim::{Circuit, Gate};

pub use fingerprint::{topological_fingerprint, Fingerprint, DEFAULT_MAX_PATH, DEFAULT_NBITS};
pub use pca::{numerical_rank, pca_fit, pca_fit_dense, pca_project, PcaModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EncodeError {
    #[error("invalid encoding parameters: {0}")]
    InvalidParams(String),
    #[error("register of {width} qubits cannot hold {n_atoms} atoms")]
    RegisterTooNarrow { width: usize, n_atoms: usize },
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fingerprint length {0} is not a power of two")]
    BadFingerprintLength(usize),
    #[error("path length must be at least 1")]
    BadPathLength,
    #[error("PCA: {0}")]
    Pca(String),
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationGate {
    Rx,
    Ry,
    Rz,
}

impl RotationGate {
    pub fn gate(self, qubit: usize, theta: f64) -> Gate {
        match self {
            RotationGate::Rx => Gate::Rx { qubit, theta },
            RotationGate::Ry => Gate::Ry { qubit, theta },
            RotationGate::Rz => Gate::Rz { qubit, theta },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingGate {
    Rxx,
    Ryy,
    Rzz,
}

impl CouplingGate {
    pub fn gate(self, a: usize, b: usize, theta: f64) -> Gate {
        match self {
            CouplingGate::Rxx => Gate::Rxx { a, b, theta },
            CouplingGate::Ryy => Gate::Ryy { a, b, theta },
            CouplingGate::Rzz => Gate::Rzz { a, b, theta },
        }
    }
}

impl FromStr for RotationGate {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rx" => Ok(RotationGate::Rx),
            "ry" => Ok(RotationGate::Ry),
            "rz" => Ok(RotationGate::Rz),
            _ => Err(EncodeError::UnknownGate(s.to_string())),
        }
    }
}

impl FromStr for CouplingGate {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rxx" => Ok(CouplingGate::Rxx),
            "ryy" => Ok(CouplingGate::Ryy),
            "rzz" => Ok(CouplingGate::Rzz),
            _ => Err(EncodeError::UnknownGate(s.to_string())),
        }
    }
}

impl fmt::Display for RotationGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationGate::Rx => "Rx",
            RotationGate::Ry => "Ry",
            RotationGate::Rz => "Rz",
        })
    }
}

impl fmt::Display for CouplingGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingGate::Rxx => "Rxx",
            CouplingGate::Ryy => "Ryy",
            CouplingGate::Rzz => "Rzz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingParams {
    /// Exponent on the atomic number in the diagonal term.
    pub d: f64,
    /// Apply the E/Z and tetrahedral signs.
    pub use_stereo: bool,
    pub gate_1q: RotationGate,
    pub gate_2q: CouplingGate,
    pub layers_x: usize,
}

impl Default for EncodingParams {
    fn default() -> Self {
        EncodingParams {
            d: 3.0,
            use_stereo: true,
            gate_1q: RotationGate::Ry,
            gate_2q: CouplingGate::Rxx,
            layers_x: 1,
        }
    }
}

impl EncodingParams {
    pub fn with_gates(gate_1q: RotationGate, gate_2q: CouplingGate) -> Self {
        EncodingParams {
            gate_1q,
            gate_2q,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(EncodeError::InvalidParams(format!(
                "d must be positive, got {}",
                self.d
            )));
        }
        if self.layers_x == 0 {
            return Err(EncodeError::InvalidParams("layers_x must be at least 1".into()));
        }
        Ok(())
    }
}

/// Symmetric coupling matrix with the bond list it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    n: usize,
    entries: Vec<f64>,
    bonds: Vec<(usize, usize)>,
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Bonded pairs `(i, j)` with `i < j`, ascending.
    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .take(self.n)
            .collect()
    }
}

pub fn build_matrix(g: &MolGraph, p: &EncodingParams) -> CouplingMatrix {
    let n = g.n_atoms();
    let mut entries = vec![0.0; n * n];
    for (i, atom) in g.atoms().iter().enumerate() {
        let eps = if p.use_stereo { atom.tetra_parity.sign() } else { 1.0 };
        entries[i * n + i] = 0.5 * eps * f64::from(atom.atomic_number).powf(p.d);
    }
    let mut bonds = Vec::with_capacity(g.n_bonds());
    for b in g.bonds() {
        let eps = if p.use_stereo { b.stereo.sign() } else { 1.0 };
        let zi = f64::from(g.atoms()[b.a].atomic_number);
        let zj = f64::from(g.atoms()[b.b].atomic_number);
        let v = eps * zi * zj / f64::from(b.order);
        entries[b.a * n + b.b] = v;
        entries[b.b * n + b.a] = v;
        bonds.push((b.a, b.b));
    }
    bonds.sort_unstable();
    CouplingMatrix { n, entries, bonds }
}

/// QMSE encoding circuit on exactly `m.n()` qubits.
pub fn build_qmse_circuit(m: &CouplingMatrix, p: &EncodingParams) -> Circuit {
    build_qmse_circuit_on(m, p, m.n()).expect("register matches atom count")
}

/// QMSE encoding circuit on a register of `width ≥ m.n()` qubits. Extra qubits
/// stay idle, which is the identity on them.
pub fn build_qmse_circuit_on(m: &CouplingMatrix, p: &EncodingParams, width: usize) -> Result<Circuit, EncodeError> {
    if width < m.n() {
        return Err(EncodeError::RegisterTooNarrow { width, n_atoms: m.n() });
    }
    let mut c = Circuit::new(width);
    let gates = (0..p.layers_x).flat_map(|_| {
        let atoms = (0..m.n()).map(|i| p.gate_1q.gate(i, m.get(i, i)));
        let bonds = m.bonds().iter().map(|&(i, j)| p.gate_2q.gate(i, j, m.get(i, j)));
        atoms.chain(bonds).collect::<Vec<_>>()
    });
    c.extend(gates).expect("indices are below the register width");
    Ok(c)
}

/// Graph straight to circuit.
pub fn encode(g: &MolGraph, p: &EncodingParams) -> Result<Circuit, EncodeError> {
    p.validate()?;
    Ok(build_qmse_circuit(&build_matrix(g, p), p))
}

/// Maps `x` from `[lo, hi]` onto `[-2π, 2π]`, clamping values outside the
/// range. A degenerate range maps everything to 0.
pub fn scale_to_angle(x: f64, lo: f64, hi: f64) -> f64 {
    use std::f64::consts::PI;
    if lo.is_nan() || hi.is_nan() || hi <= lo {
        return 0.0;
    }
    let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
    -2.0 * PI + 4.0 * PI * t
}

/// Ry angle loading followed by a linear CNOT chain, repeated `layers_x`
/// times. Qubits beyond `angles.len()` get no rotation.
pub fn build_angle_circuit(angles: &[f64], n_qubits: usize, layers_x: usize) -> Result<Circuit, EncodeError> {
    if angles.len() > n_qubits {
        return Err(EncodeError::DimensionMismatch {
            expected: n_qubits,
            got: angles.len(),
        });
    }
    let mut c = Circuit::new(n_qubits);
    for _ in 0..layers_x {
        for (q, &theta) in angles.iter().enumerate() {
            c.push(Gate::Ry { qubit: q, theta }).expect("in range");
        }
        for q in 1..n_qubits {
            c.push(Gate::Cnot {
                control: q - 1,
                target: q,
            })
            .expect("in range");
        }
    }
    Ok(c)
}

/// Scaled angles for PCA coordinates under the model's training ranges.
pub fn fingerprint_angles(coords: &[f64], model: &PcaModel) -> Result<Vec<f64>, EncodeError> {
    if coords.len() != model.k() {
        return Err(EncodeError::DimensionMismatch {
            expected: model.k(),
            got: coords.len(),
        });
    }
    Ok(coords
        .iter()
        .zip(&model.per_feature_range)
        .map(|(&x, &(lo, hi))| scale_to_angle(x, lo, hi))
        .collect())
}

pub fn build_fingerprint_circuit(
    coords: &[f64],
    model: &PcaModel,
    n_qubits: usize,
    layers_x: usize,
) -> Result<Circuit, EncodeError> {
    if coords.len() != n_qubits {
        return Err(EncodeError::DimensionMismatch {
            expected: n_qubits,
            got: coords.len(),
        });
    }
    let angles = fingerprint_angles(coords, model)?;
    build_angle_circuit(&angles, n_qubits, layers_x)
}
