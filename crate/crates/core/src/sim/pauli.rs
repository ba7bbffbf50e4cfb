use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;

/// A tensor product of `I` and `Z` letters.
///
/// Text form reads left to right starting at qubit 0, so `"ZII"` measures
/// qubit 0 of a three-qubit register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    width: usize,
    mask: u64,
}

impl PauliString {
    /// Global all-Z observable.
    pub fn all_z(width: usize) -> Self {
        assert!(width <= 64, "Z strings are limited to 64 qubits");
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        PauliString { width, mask }
    }

    /// Z on the listed qubits, identity elsewhere.
    pub fn z_on(width: usize, qubits: &[usize]) -> Result<Self, SimError> {
        let mut mask = 0u64;
        for &q in qubits {
            if q >= width {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    n_qubits: width,
                });
            }
            mask |= 1 << q;
        }
        Ok(PauliString { width, mask })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit `q` set when qubit `q` carries a Z.
    pub fn z_mask(&self) -> u64 {
        self.mask
    }

    pub fn z_qubits(&self) -> Vec<usize> {
        (0..self.width).filter(|q| self.mask >> q & 1 == 1).collect()
    }

    /// The same letters placed on a wider register; new qubits get `I`.
    pub fn padded(&self, width: usize) -> Self {
        PauliString {
            width: width.max(self.width),
            mask: self.mask,
        }
    }
}

impl FromStr for PauliString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > 64 {
            return Err(SimError::BadPauli(s.to_string()));
        }
        let mut mask = 0u64;
        for (q, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'Z' => mask |= 1 << q,
                'X' | 'Y' => return Err(SimError::UnsupportedPauli(c)),
                _ => return Err(SimError::BadPauli(s.to_string())),
            }
        }
        Ok(PauliString { width: s.len(), mask })
    }
}

impl TryFrom<String> for PauliString {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.width {
            f.write_str(if self.mask >> q & 1 == 1 { "Z" } else { "I" })?;
        }
        Ok(())
    }
}
