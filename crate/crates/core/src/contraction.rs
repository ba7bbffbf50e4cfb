//! Fidelity-preserving chain contraction.
//!
//! Take two molecules encoded on the same register with `L_x = 1`. If atom
//! `k` carries the same rotation and the same bond gates to the same
//! neighbours in both circuits, every gate touching qubit `k` cancels in
//! `U_Q† U_P`. This holds because the two-qubit gates of one encoding
//! mutually commute. Qubit `k` can then be dropped from both circuits without
//! changing the fidelity.
//!
//! The plan only removes interior main-chain atoms of degree 2. It works on
//! index-aligned atoms, so the fragment occupies the same qubits in both
//! molecules. Runs of removable atoms form segments. The kept atoms on either
//! side of a segment (`alpha`, `beta`) stay in place with their bonds to the
//! rest of the molecule.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::encoder::{build_matrix, build_qmse_circuit_on, CouplingMatrix, EncodeError, EncodingParams};
use crate::molgraph::{main_chain_atoms, Bond, MolGraph};
use crate::sim::{SimError, Simulator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContractionError {
    #[error("chain contraction is exact only for a single encoding layer (L_x = 1), got L_x = {0}")]
    MultiLayer(usize),
    #[error("the plan was built for different molecules (structure digest mismatch)")]
    StalePlan,
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A removed run of atoms `start..=end` (same indices in both molecules)
/// between the kept boundary atoms `alpha` and `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    /// Longest first, ties by start index.
    pub removed_segments: Vec<Segment>,
    /// Old index to new index for each molecule; `None` for removed atoms.
    pub kept_atoms_p: Vec<Option<usize>>,
    pub kept_atoms_q: Vec<Option<usize>>,
    pub final_width: usize,
    pub original_width: usize,
    digest_p: u64,
    digest_q: u64,
}

impl ContractionPlan {
    pub fn empty(p: &MolGraph, q: &MolGraph) -> Self {
        Self::from_removed(p, q, Vec::new())
    }

    fn from_removed(p: &MolGraph, q: &MolGraph, mut segments: Vec<Segment>) -> Self {
        segments.sort_by(|a, b| b.len().cmp(&a.len()).then(a.start.cmp(&b.start)));
        let removed: BTreeSet<usize> = segments.iter().flat_map(|s| s.start..=s.end).collect();
        let map = |n: usize| {
            let mut next = 0;
            (0..n)
                .map(|i| {
                    if removed.contains(&i) {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect::<Vec<_>>()
        };
        let original_width = p.n_atoms().max(q.n_atoms());
        ContractionPlan {
            removed_segments: segments,
            kept_atoms_p: map(p.n_atoms()),
            kept_atoms_q: map(q.n_atoms()),
            final_width: original_width - removed.len(),
            original_width,
            digest_p: p.structure_digest(),
            digest_q: q.structure_digest(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.removed_segments.is_empty()
    }

    /// Removed atom indices, ascending.
    pub fn removed_atoms(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.removed_segments.iter().flat_map(|s| s.start..=s.end).collect();
        set.into_iter().collect()
    }

    pub fn qubits_saved(&self) -> usize {
        self.original_width - self.final_width
    }
}

/// Marks every atom whose gates are identical in both encodings and which is
/// an interior degree-2 atom on both main chains, then groups consecutive
/// marked atoms into segments.
pub fn find_common_fragments(p: &MolGraph, q: &MolGraph, params: &EncodingParams) -> ContractionPlan {
    let mp = build_matrix(p, params);
    let mq = build_matrix(q, params);
    let chain_p = main_chain_atoms(p);
    let chain_q: BTreeSet<usize> = main_chain_atoms(q).into_iter().collect();
    let on_chain_p: BTreeSet<usize> = chain_p.iter().copied().collect();

    let removable = |k: usize| -> bool {
        if k >= p.n_atoms() || k >= q.n_atoms() || !on_chain_p.contains(&k) || !chain_q.contains(&k) {
            return false;
        }
        if p.atoms()[k] != q.atoms()[k] || !same(&mp, &mq, k, k) {
            return false;
        }
        let nb = p.neighbors(k);
        if nb.len() != 2 || nb != q.neighbors(k) {
            return false;
        }
        nb.iter().all(|&u| {
            let (bp, bq) = (p.bond_between(k, u), q.bond_between(k, u));
            matches!((bp, bq), (Some(x), Some(y)) if x.order == y.order && x.stereo == y.stereo) && same(&mp, &mq, k, u)
        })
    };

    let mut segments = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    let mut flush = |run: &mut Vec<usize>| {
        if let (Some(&first), Some(&last)) = (run.first(), run.last()) {
            let outside = |atom: usize, skip: Option<usize>| {
                p.neighbors(atom)
                    .into_iter()
                    .find(|&u| Some(u) != skip && !run.contains(&u))
            };
            let alpha = outside(first, None);
            let beta = outside(last, alpha);
            if let (Some(alpha), Some(beta)) = (alpha, beta) {
                segments.push(Segment {
                    start: first,
                    end: last,
                    alpha,
                    beta,
                });
            }
        }
        run.clear();
    };
    for &k in &chain_p {
        let extends = run
            .last()
            .is_some_and(|&prev| k == prev + 1 && p.bond_between(prev, k).is_some());
        if removable(k) {
            if !extends {
                flush(&mut run);
            }
            run.push(k);
        } else {
            flush(&mut run);
        }
    }
    flush(&mut run);
    ContractionPlan::from_removed(p, q, segments)
}

fn same(mp: &CouplingMatrix, mq: &CouplingMatrix, i: usize, j: usize) -> bool {
    mp.get(i, j).to_bits() == mq.get(i, j).to_bits()
}

/// Deletes the planned atoms from both graphs. Boundary atoms keep their
/// diagonal terms and their bonds to the retained flanks; the reduced graphs
/// are generally disconnected.
pub fn contract_pair(
    p: &MolGraph,
    q: &MolGraph,
    plan: &ContractionPlan,
) -> Result<(MolGraph, MolGraph), ContractionError> {
    if p.structure_digest() != plan.digest_p || q.structure_digest() != plan.digest_q {
        return Err(ContractionError::StalePlan);
    }
    if plan.is_empty() {
        return Ok((p.clone(), q.clone()));
    }
    Ok((reduce(p, &plan.kept_atoms_p), reduce(q, &plan.kept_atoms_q)))
}

fn reduce(g: &MolGraph, map: &[Option<usize>]) -> MolGraph {
    let atoms = g
        .atoms()
        .iter()
        .zip(map)
        .filter(|(_, m)| m.is_some())
        .map(|(a, _)| *a)
        .collect();
    let bonds = g
        .bonds()
        .iter()
        .filter_map(|b| {
            let (a, c) = (map[b.a]?, map[b.b]?);
            Some(Bond::new(a, c, b.order, b.stereo))
        })
        .collect();
    let parents = g
        .parents()
        .iter()
        .zip(map)
        .filter(|(_, m)| m.is_some())
        .map(|(p, _)| p.and_then(|p| map[p]))
        .collect();
    MolGraph::from_parts(atoms, bonds, parents, g.source().to_string()).expect("a subgraph of a valid graph is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFidelity {
    pub fidelity: f64,
    pub qubits: usize,
}

/// Fidelity of the two encodings on a common register of
/// `max(n_p, n_q)` qubits, without contraction.
pub fn direct_fidelity(
    p: &MolGraph,
    q: &MolGraph,
    params: &EncodingParams,
    sim: &Simulator,
) -> Result<PairFidelity, ContractionError> {
    params.validate()?;
    let width = p.n_atoms().max(q.n_atoms());
    sim.check_width(width)?;
    let cp = build_qmse_circuit_on(&build_matrix(p, params), params, width)?;
    let cq = build_qmse_circuit_on(&build_matrix(q, params), params, width)?;
    Ok(PairFidelity {
        fidelity: sim.fidelity(&cp, &cq)?,
        qubits: width,
    })
}

/// Plans, contracts, encodes and simulates a pair. Returns the fidelity and
/// the register width actually simulated.
pub fn contracted_fidelity(
    p: &MolGraph,
    q: &MolGraph,
    params: &EncodingParams,
    sim: &Simulator,
) -> Result<PairFidelity, ContractionError> {
    params.validate()?;
    if params.layers_x != 1 {
        return Err(ContractionError::MultiLayer(params.layers_x));
    }
    let plan = find_common_fragments(p, q, params);
    let (rp, rq) = contract_pair(p, q, &plan)?;
    let width = plan.final_width;
    sim.check_width(width)?;
    let cp = build_qmse_circuit_on(&build_matrix(&rp, params), params, width)?;
    let cq = build_qmse_circuit_on(&build_matrix(&rq, params), params, width)?;
    Ok(PairFidelity {
        fidelity: sim.fidelity(&cp, &cq)?,
        qubits: width,
    })
}
