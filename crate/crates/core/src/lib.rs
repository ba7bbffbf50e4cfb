//! Molecular structure encodings for quantum machine learning.
//!
//! The crate is organised as a pipeline:
//!
//! * [`molgraph`] parses SMILES into heavy-atom molecular graphs.
//! * [`encoder`] builds the hybrid Coulomb-adjacency matrix of a graph and
//!   lowers it to a data-encoding circuit (one rotation per atom, one
//!   two-qubit rotation per bond). The fingerprint + PCA angle-encoding
//!   baseline lives there as well.
//! * [`sim`] is a dense statevector simulator with Z-string observables and
//!   state fidelities.
//! * [`contraction`] removes identical chain fragments from a pair of
//!   molecules before a fidelity evaluation without changing its value.
//! * [`similarity`] assembles Tanimoto and fidelity matrices.
//! * [`vqml`] trains variational classifiers and regressors on encoded
//!   molecules with a derivative-free trust-region optimizer.
//!
//! With the default `parallel` feature, pair evaluations, restarts and large
//! statevector updates run on the rayon thread pool. Without it every loop
//! runs sequentially; results are bitwise identical either way.

// Index loops read closer to the linear algebra they implement.
#![allow(clippy::needless_range_loop)]

pub mod contraction;
pub mod encoder;
mod exec;
pub mod molgraph;
pub mod sim;
pub mod similarity;
pub mod vqml;

pub use contraction::{contracted_fidelity, ContractionError, ContractionPlan};
pub use encoder::{CouplingGate, CouplingMatrix, EncodingParams, RotationGate};
pub use molgraph::{parse_smiles, MolGraph, ParseError};
pub use sim::{Circuit, Gate, PauliString, SimError, Simulator, Statevector};
pub use similarity::{SimilarityKind, SimilarityMatrix};
