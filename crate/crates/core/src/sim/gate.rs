use std::fmt;

use serde::{Deserialize, Serialize};

use super::SimError;

/// Gate set of the encoders and ansätze. Angles are radians.
///
/// Two-qubit rotations follow `R_PP(θ) = exp(-iθ/2 · P⊗P)`; `Crx` applies
/// `Rx(θ)` to `target` when `control` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Rxx { a: usize, b: usize, theta: f64 },
    Ryy { a: usize, b: usize, theta: f64 },
    Rzz { a: usize, b: usize, theta: f64 },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
    Crx { control: usize, target: usize, theta: f64 },
    X { qubit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rxx,
    Ryy,
    Rzz,
    Cz,
    Cnot,
    Crx,
    X,
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rx { .. } => GateKind::Rx,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Rxx { .. } => GateKind::Rxx,
            Gate::Ryy { .. } => GateKind::Ryy,
            Gate::Rzz { .. } => GateKind::Rzz,
            Gate::Cz { .. } => GateKind::Cz,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Crx { .. } => GateKind::Crx,
            Gate::X { .. } => GateKind::X,
        }
    }

    /// Qubits acted on, in (control, target) order where that matters.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Ry { qubit, .. } | Gate::Rz { qubit, .. } | Gate::X { qubit } => {
                vec![qubit]
            }
            Gate::Rxx { a, b, .. } | Gate::Ryy { a, b, .. } | Gate::Rzz { a, b, .. } | Gate::Cz { a, b } => {
                vec![a, b]
            }
            Gate::Cnot { control, target } | Gate::Crx { control, target, .. } => vec![control, target],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { theta, .. }
            | Gate::Ry { theta, .. }
            | Gate::Rz { theta, .. }
            | Gate::Rxx { theta, .. }
            | Gate::Ryy { theta, .. }
            | Gate::Rzz { theta, .. }
            | Gate::Crx { theta, .. } => Some(theta),
            Gate::Cz { .. } | Gate::Cnot { .. } | Gate::X { .. } => None,
        }
    }

    fn check(&self, n_qubits: usize) -> Result<(), SimError> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n_qubits) {
            return Err(SimError::QubitOutOfRange { qubit: q, n_qubits });
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(SimError::RepeatedQubit(qs[0]));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        match self.angle() {
            Some(t) => write!(f, "{:?}({t}) q[{}]", self.kind(), qs.join(",")),
            None => write!(f, "{:?} q[{}]", self.kind(), qs.join(",")),
        }
    }
}

/// Ordered gate list on a fixed register width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), SimError> {
        gate.check(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), SimError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Same gates on a wider register; the extra qubits stay idle.
    pub fn widened(&self, n_qubits: usize) -> Result<Circuit, SimError> {
        if n_qubits < self.n_qubits {
            return Err(SimError::WidthMismatch {
                left: self.n_qubits,
                right: n_qubits,
            });
        }
        Ok(Circuit {
            n_qubits,
            gates: self.gates.clone(),
        })
    }
}
