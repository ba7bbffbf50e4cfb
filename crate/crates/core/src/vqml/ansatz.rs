use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sim::{Circuit, Gate, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzRotation {
    #[default]
    Ry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    Cz,
    Crx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    Linear,
    Pairwise,
    Full,
}

impl Entanglement {
    /// Qubit pairs of one entangling block, in emission order.
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entanglement::Linear => (1..n).map(|i| (i - 1, i)).collect(),
            Entanglement::Pairwise => {
                let even = (0..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1));
                let odd = (1..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1));
                even.chain(odd).collect()
            }
            Entanglement::Full => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzConfig {
    #[serde(default)]
    pub gate_1q: AnsatzRotation,
    pub gate_2q: Entangler,
    pub entanglement: Entanglement,
    pub layers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    Ry {
        qubit: usize,
        param: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    Crx {
        control: usize,
        target: usize,
        param: usize,
    },
}

/// Gate skeleton whose angles are read from a parameter vector.
///
/// Parameters are numbered in emission order: layer by layer, rotations on
/// qubits 0..n first, then the entanglers of that layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    n_params: usize,
    slots: Vec<Slot>,
}

pub fn build_ansatz(n_qubits: usize, cfg: &AnsatzConfig) -> ParamCircuit {
    let pairs = cfg.entanglement.pairs(n_qubits);
    let mut slots = Vec::new();
    let mut next = 0;
    for _ in 0..cfg.layers {
        for q in 0..n_qubits {
            slots.push(Slot::Ry { qubit: q, param: next });
            next += 1;
        }
        for &(a, b) in &pairs {
            slots.push(match cfg.gate_2q {
                Entangler::Cz => Slot::Cz { a, b },
                Entangler::Crx => {
                    next += 1;
                    Slot::Crx {
                        control: a,
                        target: b,
                        param: next - 1,
                    }
                }
            });
        }
    }
    ParamCircuit {
        n_qubits,
        n_params: next,
        slots,
    }
}

impl ParamCircuit {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_gates(&self) -> usize {
        self.slots.len()
    }

    fn gate(slot: Slot, params: &[f64]) -> Gate {
        match slot {
            Slot::Ry { qubit, param } => Gate::Ry {
                qubit,
                theta: params[param],
            },
            Slot::Cz { a, b } => Gate::Cz { a, b },
            Slot::Crx { control, target, param } => Gate::Crx {
                control,
                target,
                theta: params[param],
            },
        }
    }

    /// Concrete circuit for a parameter vector of length `n_params`.
    pub fn bind(&self, params: &[f64]) -> Circuit {
        assert_eq!(params.len(), self.n_params, "parameter count");
        let mut c = Circuit::new(self.n_qubits);
        c.extend(self.slots.iter().map(|&s| Self::gate(s, params)))
            .expect("slots are in range");
        c
    }

    /// Applies the bound gates to `state` in place.
    pub fn apply(&self, params: &[f64], state: &mut Statevector) {
        assert_eq!(params.len(), self.n_params, "parameter count");
        assert_eq!(state.n_qubits(), self.n_qubits, "register width");
        for &s in &self.slots {
            state.apply_unchecked(&Self::gate(s, params));
        }
    }
}

impl fmt::Display for Entanglement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entanglement::Linear => "linear",
            Entanglement::Pairwise => "pairwise",
            Entanglement::Full => "full",
        })
    }
}
