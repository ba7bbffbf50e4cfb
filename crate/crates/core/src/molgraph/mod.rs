//! Heavy-atom molecular graphs parsed from SMILES.
//!
//! Atom indices follow the depth-first order in which atoms appear in the
//! SMILES text. That order is the qubit mapping used by the encoder, so it is
//! preserved exactly; the only reordering utility is [`reorder_front`].

mod element;
mod parse;
mod tokens;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use element::{atomic_number, symbol};
pub use parse::{parse_smiles, ParseError};
pub(crate) use tokens::main_chain_atoms;
pub use tokens::{to_token_chain, AtomToken, BondToken, ChainToken};

/// Tetrahedral marker carried over from `@` / `@@`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TetraParity {
    None,
    Plus,
    Minus,
}

impl TetraParity {
    /// Sign used in the diagonal matrix term; unmarked atoms count as `+1`.
    pub fn sign(self) -> f64 {
        match self {
            TetraParity::Minus => -1.0,
            TetraParity::None | TetraParity::Plus => 1.0,
        }
    }
}

/// E/Z geometry of a double bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BondStereo {
    None,
    E,
    Z,
}

impl BondStereo {
    /// Sign used in the off-diagonal matrix term; unspecified bonds count as `+1`.
    pub fn sign(self) -> f64 {
        match self {
            BondStereo::Z => -1.0,
            BondStereo::None | BondStereo::E => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub atomic_number: u8,
    pub tetra_parity: TetraParity,
}

impl Atom {
    pub fn new(atomic_number: u8) -> Self {
        Atom {
            atomic_number,
            tetra_parity: TetraParity::None,
        }
    }

    pub fn symbol(&self) -> &'static str {
        symbol(self.atomic_number)
    }
}

/// Covalent bond between atoms `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u8,
    pub stereo: BondStereo,
}

impl Bond {
    /// Builds a bond with endpoints normalised so that `a < b`.
    pub fn new(i: usize, j: usize, order: u8, stereo: BondStereo) -> Self {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Bond { a, b, order, stereo }
    }

    /// The endpoint opposite to `atom`, if `atom` is an endpoint.
    pub fn other(&self, atom: usize) -> Option<usize> {
        if self.a == atom {
            Some(self.b)
        } else if self.b == atom {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Graph invariant violations for hand-assembled graphs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("atom {0} has atomic number 0")]
    ZeroAtomicNumber(usize),
    #[error("bond ({a}, {b}) references an atom outside 0..{n}")]
    BondOutOfRange { a: usize, b: usize, n: usize },
    #[error("bond ({0}, {0}) is a self loop")]
    SelfLoop(usize),
    #[error("duplicate bond ({0}, {1})")]
    DuplicateBond(usize, usize),
    #[error("bond ({a}, {b}) has order {order}; expected 1, 2 or 3")]
    BadOrder { a: usize, b: usize, order: u8 },
    #[error("bond ({0}, {1}) carries E/Z stereo but is not a double bond")]
    StereoOnNonDouble(usize, usize),
    #[error("parent list has {got} entries for {n} atoms")]
    ParentLength { got: usize, n: usize },
    #[error("element {0} is not present in the molecule")]
    ElementAbsent(String),
}

/// A molecule as an ordered list of heavy atoms plus a bond set.
///
/// `parents` records the depth-first spanning tree implied by the SMILES
/// text (ring-closure bonds are not tree edges); it drives main-chain and
/// branch detection in [`to_token_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    parents: Vec<Option<usize>>,
    source: String,
}

impl MolGraph {
    /// Assembles a graph, checking every structural invariant except
    /// connectivity (contracted graphs are legitimately fragmented).
    pub fn from_parts(
        atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        parents: Vec<Option<usize>>,
        source: impl Into<String>,
    ) -> Result<Self, GraphError> {
        let n = atoms.len();
        if let Some(i) = atoms.iter().position(|a| a.atomic_number == 0) {
            return Err(GraphError::ZeroAtomicNumber(i));
        }
        if parents.len() != n {
            return Err(GraphError::ParentLength { got: parents.len(), n });
        }
        let mut bonds: Vec<Bond> = bonds
            .into_iter()
            .map(|b| Bond::new(b.a, b.b, b.order, b.stereo))
            .collect();
        bonds.sort();
        let mut seen = BTreeSet::new();
        for b in &bonds {
            if b.a == b.b {
                return Err(GraphError::SelfLoop(b.a));
            }
            if b.b >= n {
                return Err(GraphError::BondOutOfRange { a: b.a, b: b.b, n });
            }
            if !(1..=3).contains(&b.order) {
                return Err(GraphError::BadOrder {
                    a: b.a,
                    b: b.b,
                    order: b.order,
                });
            }
            if b.stereo != BondStereo::None && b.order != 2 {
                return Err(GraphError::StereoOnNonDouble(b.a, b.b));
            }
            if !seen.insert((b.a, b.b)) {
                return Err(GraphError::DuplicateBond(b.a, b.b));
            }
        }
        Ok(MolGraph {
            atoms,
            bonds,
            parents,
            source: source.into(),
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Bonds sorted ascending by `(a, b)`.
    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Depth-first tree parent of each atom.
    pub fn parents(&self) -> &[Option<usize>] {
        &self.parents
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<&Bond> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.bonds
            .binary_search_by(|x| (x.a, x.b).cmp(&(a, b)))
            .ok()
            .map(|k| &self.bonds[k])
    }

    /// Neighbours of `atom` in ascending index order.
    pub fn neighbors(&self, atom: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.bonds.iter().filter_map(|b| b.other(atom)).collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.bonds.iter().filter(|b| b.other(atom).is_some()).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.atoms.is_empty() {
            return true;
        }
        let adjacency = self.adjacency();
        let mut seen = vec![false; self.atoms.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for b in &self.bonds {
            adj[b.a].push(b.b);
            adj[b.b].push(b.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Stable 64-bit digest of atoms and bonds, used to detect stale
    /// contraction plans.
    pub fn structure_digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.atoms.len() as u64);
        for a in &self.atoms {
            h.write_u64(a.atomic_number as u64);
            h.write_u64(a.tetra_parity as u64);
        }
        for b in &self.bonds {
            h.write_u64(b.a as u64);
            h.write_u64(b.b as u64);
            h.write_u64(b.order as u64);
            h.write_u64(b.stereo as u64);
        }
        h.finish()
    }
}

impl fmt::Display for MolGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain = to_token_chain(self);
        let parts: Vec<String> = chain.iter().map(|t| t.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// FNV-1a, 64-bit. Used wherever a platform-independent hash is required.
#[derive(Debug, Clone, Copy)]
pub struct Fnv64(u64);

impl Fnv64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn new() -> Self {
        Fnv64(Self::OFFSET)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }

    pub fn hash_bytes(bytes: &[u8]) -> u64 {
        let mut h = Fnv64::new();
        h.write(bytes);
        h.finish()
    }
}

impl Default for Fnv64 {
    fn default() -> Self {
        Self::new()
    }
}

/// Re-roots the depth-first atom order at the first atom of `element`.
///
/// The traversal visits neighbours in ascending original index, so the last
/// visited child of each atom continues the main chain. Atom and bond
/// attributes are carried over unchanged; the source text is kept as given.
/// Returns the graph unchanged when the element is already at index 0.
pub fn reorder_front(g: &MolGraph, element: u8) -> Result<MolGraph, GraphError> {
    let root = g
        .atoms
        .iter()
        .position(|a| a.atomic_number == element)
        .ok_or_else(|| GraphError::ElementAbsent(symbol(element).to_string()))?;
    if root == 0 {
        return Ok(g.clone());
    }

    let adjacency = g.adjacency();
    let n = g.n_atoms();
    let mut new_index = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut parents_old: Vec<Option<usize>> = Vec::with_capacity(n);

    // Iterative DFS that mirrors recursive visitation order.
    let mut starts: Vec<usize> = vec![root];
    starts.extend((0..n).filter(|&v| v != root));
    for start in starts {
        if new_index[start] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
        while let Some((v, parent)) = stack.pop() {
            if new_index[v] != usize::MAX {
                continue;
            }
            new_index[v] = order.len();
            order.push(v);
            parents_old.push(parent);
            for &w in adjacency[v].iter().rev() {
                if new_index[w] == usize::MAX {
                    stack.push((w, Some(v)));
                }
            }
        }
    }

    let atoms = order.iter().map(|&v| g.atoms[v]).collect();
    let parents = parents_old.into_iter().map(|p| p.map(|v| new_index[v])).collect();
    let bonds = g
        .bonds
        .iter()
        .map(|b| Bond::new(new_index[b.a], new_index[b.b], b.order, b.stereo))
        .collect();
    MolGraph::from_parts(atoms, bonds, parents, g.source.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force canonical form: lexicographically smallest relabelled
    /// (atoms, bonds) over all permutations. Only for tiny graphs.
    type Canonical = (Vec<Atom>, Vec<(usize, usize, u8, BondStereo)>);

    fn canonical_form(g: &MolGraph) -> Canonical {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in permutations(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        permutations(g.n_atoms())
            .into_iter()
            .map(|perm| {
                let mut atoms = vec![g.atoms()[0]; g.n_atoms()];
                for (old, &new) in perm.iter().enumerate() {
                    atoms[new] = g.atoms()[old];
                }
                let mut bonds: Vec<_> = g
                    .bonds()
                    .iter()
                    .map(|b| {
                        let nb = Bond::new(perm[b.a], perm[b.b], b.order, b.stereo);
                        (nb.a, nb.b, nb.order, nb.stereo)
                    })
                    .collect();
                bonds.sort();
                (atoms, bonds)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn reorder_moves_oxygen_to_front() {
        let g = parse_smiles("CCO").unwrap();
        let r = reorder_front(&g, 8).unwrap();
        let zs: Vec<u8> = r.atoms().iter().map(|a| a.atomic_number).collect();
        assert_eq!(zs, vec![8, 6, 6]);
        let bonds: Vec<(usize, usize)> = r.bonds().iter().map(|b| (b.a, b.b)).collect();
        assert_eq!(bonds, vec![(0, 1), (1, 2)]);
        assert_eq!(canonical_form(&g), canonical_form(&r));
    }

    #[test]
    fn reorder_is_identity_when_front_most() {
        let g = parse_smiles("OCC").unwrap();
        assert_eq!(reorder_front(&g, 8).unwrap(), g);
    }

    #[test]
    fn reorder_rejects_missing_element() {
        let g = parse_smiles("CCCC").unwrap();
        let err = reorder_front(&g, 8).unwrap_err();
        assert_eq!(err, GraphError::ElementAbsent("O".into()));
        assert!(err.to_string().contains("not present"));
    }

    #[test]
    fn reorder_ether_keeps_topology() {
        let g = parse_smiles("CCOC(C)C").unwrap();
        let r = reorder_front(&g, 8).unwrap();
        assert_eq!(r.atoms()[0].atomic_number, 8);
        assert_eq!(canonical_form(&g), canonical_form(&r));
        assert_eq!(r.parents()[0], None);
        // Every non-root atom has a parent with a smaller index.
        for (i, p) in r.parents().iter().enumerate().skip(1) {
            assert!(p.unwrap() < i);
        }
    }

    #[test]
    fn reorder_preserves_stereo_multiset() {
        let g = parse_smiles("C/C=C/CO").unwrap();
        let r = reorder_front(&g, 8).unwrap();
        let mut before: Vec<_> = g.bonds().iter().map(|b| (b.order, b.stereo)).collect();
        let mut after: Vec<_> = r.bonds().iter().map(|b| (b.order, b.stereo)).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert_eq!(canonical_form(&g), canonical_form(&r));
    }

    #[test]
    fn from_parts_checks_invariants() {
        let atoms = vec![Atom::new(6), Atom::new(6)];
        let parents = vec![None, Some(0)];
        assert!(matches!(
            MolGraph::from_parts(
                atoms.clone(),
                vec![Bond::new(0, 2, 1, BondStereo::None)],
                parents.clone(),
                ""
            ),
            Err(GraphError::BondOutOfRange { .. })
        ));
        assert!(matches!(
            MolGraph::from_parts(
                atoms.clone(),
                vec![Bond::new(0, 1, 1, BondStereo::E)],
                parents.clone(),
                ""
            ),
            Err(GraphError::StereoOnNonDouble(0, 1))
        ));
        assert!(matches!(
            MolGraph::from_parts(
                atoms.clone(),
                vec![
                    Bond::new(0, 1, 1, BondStereo::None),
                    Bond::new(1, 0, 2, BondStereo::None)
                ],
                parents.clone(),
                ""
            ),
            Err(GraphError::DuplicateBond(0, 1))
        ));
        assert!(matches!(
            MolGraph::from_parts(atoms, vec![Bond::new(0, 1, 4, BondStereo::None)], parents, ""),
            Err(GraphError::BadOrder { order: 4, .. })
        ));
    }

    #[test]
    fn digest_tracks_structure() {
        let a = parse_smiles("CC=C").unwrap();
        let b = parse_smiles("CC=C").unwrap();
        let c = parse_smiles("CCC").unwrap();
        assert_eq!(a.structure_digest(), b.structure_digest());
        assert_ne!(a.structure_digest(), c.structure_digest());
    }
}
