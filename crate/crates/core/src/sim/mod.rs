//! Dense statevector simulation.
//!
//! Two-qubit gates update amplitude quadruples in place, so every gate costs
//! O(2^n). Registers of [`PAR_MIN_QUBITS`](state) qubits or more are updated
//! on the rayon pool when the `parallel` feature is enabled.

mod gate;
mod pauli;
mod state;

pub use gate::{Circuit, Gate, GateKind};
pub use pauli::PauliString;
pub use state::Statevector;

/// Default register cap: 2^26 complex doubles is 1 GiB.
pub const DEFAULT_MAX_QUBITS: usize = 26;
/// Environment variable that overrides [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QMSE_MAX_QUBITS";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("{n_qubits} qubits exceed the simulator cap of {max} (a statevector would need {bytes} bytes)")]
    TooManyQubits { n_qubits: usize, max: usize, bytes: u128 },
    #[error("qubit {qubit} is outside a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("two-qubit gate uses qubit {0} twice")]
    RepeatedQubit(usize),
    #[error("register widths differ: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("invalid Pauli string `{0}`")]
    BadPauli(String),
    #[error("Pauli letter {0} is not supported; only I and Z observables are implemented")]
    UnsupportedPauli(char),
}

/// Bytes needed for a statevector of `n_qubits` complex doubles.
pub fn statevector_bytes(n_qubits: usize) -> u128 {
    16u128 << n_qubits
}

/// Runs circuits from `|0…0⟩` under a register-width cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulator {
    pub max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Simulator {
    pub fn new(max_qubits: usize) -> Self {
        Simulator { max_qubits }
    }

    /// Cap taken from `QMSE_MAX_QUBITS` when set and valid, else the default.
    pub fn from_env() -> Self {
        let max_qubits = std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_QUBITS);
        Simulator { max_qubits }
    }

    pub fn check_width(&self, n_qubits: usize) -> Result<(), SimError> {
        if n_qubits > self.max_qubits || n_qubits >= usize::BITS as usize - 4 {
            return Err(SimError::TooManyQubits {
                n_qubits,
                max: self.max_qubits,
                bytes: statevector_bytes(n_qubits),
            });
        }
        Ok(())
    }

    pub fn run(&self, circuit: &Circuit) -> Result<Statevector, SimError> {
        self.check_width(circuit.n_qubits())?;
        let mut state = Statevector::zero(circuit.n_qubits());
        for g in circuit.gates() {
            state.apply_unchecked(g);
        }
        Ok(state)
    }

    /// Applies `circuit` to an existing state of the same width.
    pub fn run_from(&self, circuit: &Circuit, mut state: Statevector) -> Result<Statevector, SimError> {
        if circuit.n_qubits() != state.n_qubits() {
            return Err(SimError::WidthMismatch {
                left: circuit.n_qubits(),
                right: state.n_qubits(),
            });
        }
        for g in circuit.gates() {
            state.apply_unchecked(g);
        }
        Ok(state)
    }

    pub fn expectation(&self, circuit: &Circuit, observable: &PauliString) -> Result<f64, SimError> {
        self.run(circuit)?.expectation(observable)
    }

    /// |⟨ψ_q|ψ_p⟩|² of the two circuit outputs.
    pub fn fidelity(&self, p: &Circuit, q: &Circuit) -> Result<f64, SimError> {
        if p.n_qubits() != q.n_qubits() {
            return Err(SimError::WidthMismatch {
                left: p.n_qubits(),
                right: q.n_qubits(),
            });
        }
        let sp = self.run(p)?;
        let sq = self.run(q)?;
        sq.fidelity(&sp)
    }
}
