use serde::{Deserialize, Serialize};

use super::EncodeError;
use crate::molgraph::{symbol, Fnv64, MolGraph};

pub const DEFAULT_NBITS: usize = 2048;
pub const DEFAULT_MAX_PATH: usize = 7;

/// Fixed-length bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    nbits: usize,
    words: Vec<u64>,
}

impl Fingerprint {
    pub fn zeros(nbits: usize) -> Result<Self, EncodeError> {
        if nbits == 0 || !nbits.is_power_of_two() {
            return Err(EncodeError::BadFingerprintLength(nbits));
        }
        Ok(Fingerprint {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, EncodeError> {
        let mut fp = Fingerprint::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                fp.set(i);
            }
        }
        Ok(fp)
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.n_set() == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.nbits, "bit {i} out of range");
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.nbits && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn n_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(|&i| self.get(i))
    }

    /// 0/1 values as reals, for PCA.
    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.nbits).map(|i| if self.get(i) { 1.0 } else { 0.0 }).collect()
    }

    pub fn and_count(&self, other: &Fingerprint) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn or_count(&self, other: &Fingerprint) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }
}

/// Path-hash fingerprint.
///
/// Every simple path of 0 to `max_path` bonds is written as alternating
/// element symbols and bond characters (`-`, `=`, `#`), e.g. `C-C=O`. The
/// path and its reverse are compared and the lexicographically smaller string
/// is hashed with 64-bit FNV-1a; bit `hash mod nbits` is set. Zero-bond paths
/// are the atoms themselves, so a lone carbon sets exactly one bit.
pub fn topological_fingerprint(g: &MolGraph, nbits: usize, max_path: usize) -> Result<Fingerprint, EncodeError> {
    if max_path == 0 {
        return Err(EncodeError::BadPathLength);
    }
    let mut fp = Fingerprint::zeros(nbits)?;
    let adj = g.adjacency();
    let mut path = Vec::with_capacity(max_path + 1);
    let mut on_path = vec![false; g.n_atoms()];
    for start in 0..g.n_atoms() {
        extend(g, &adj, start, max_path, &mut path, &mut on_path, &mut fp);
    }
    Ok(fp)
}

fn extend(
    g: &MolGraph,
    adj: &[Vec<usize>],
    atom: usize,
    max_path: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    fp: &mut Fingerprint,
) {
    path.push(atom);
    on_path[atom] = true;
    let bit = (Fnv64::hash_bytes(canonical(g, path).as_bytes()) & (fp.nbits as u64 - 1)) as usize;
    fp.set(bit);
    if path.len() <= max_path {
        for &next in &adj[atom] {
            if !on_path[next] {
                extend(g, adj, next, max_path, path, on_path, fp);
            }
        }
    }
    on_path[atom] = false;
    path.pop();
}

fn canonical(g: &MolGraph, path: &[usize]) -> String {
    let forward = render(g, path.iter().copied());
    let backward = render(g, path.iter().rev().copied());
    forward.min(backward)
}

fn render(g: &MolGraph, atoms: impl Iterator<Item = usize>) -> String {
    let mut out = String::new();
    let mut prev: Option<usize> = None;
    for a in atoms {
        if let Some(p) = prev {
            let order = g.bond_between(p, a).map_or(1, |b| b.order);
            out.push(match order {
                2 => '=',
                3 => '#',
                _ => '-',
            });
        }
        out.push_str(symbol(g.atoms()[a].atomic_number));
        prev = Some(a);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn fp(s: &str) -> Fingerprint {
        topological_fingerprint(&parse_smiles(s).unwrap(), DEFAULT_NBITS, DEFAULT_MAX_PATH).unwrap()
    }

    #[test]
    fn single_atom_sets_one_bit() {
        let f = fp("C");
        assert_eq!(f.n_set(), 1);
        assert_eq!(f.len(), 2048);
    }

    #[test]
    fn deterministic() {
        assert_eq!(fp("CC(C)CO"), fp("CC(C)CO"));
    }

    #[test]
    fn ethanol_differs_from_propane() {
        let (a, b) = (fp("CCO"), fp("CCC"));
        assert!(a.or_count(&b) > a.and_count(&b));
    }

    #[test]
    fn path_strings_are_direction_free() {
        let g = parse_smiles("OCC=C").unwrap();
        assert_eq!(canonical(&g, &[0, 1, 2, 3]), canonical(&g, &[3, 2, 1, 0]));
        assert_eq!(canonical(&g, &[0, 1, 2, 3]), "C=C-C-O");
    }

    #[test]
    fn propane_paths() {
        // C, C-C, C-C-C: three distinct strings.
        let mut expected = Fingerprint::zeros(2048).unwrap();
        for s in ["C", "C-C", "C-C-C"] {
            expected.set((Fnv64::hash_bytes(s.as_bytes()) & 2047) as usize);
        }
        assert_eq!(fp("CCC"), expected);
    }

    #[test]
    fn rejects_bad_sizes() {
        let g = parse_smiles("C").unwrap();
        assert!(topological_fingerprint(&g, 1000, 7).is_err());
        assert!(topological_fingerprint(&g, 1024, 0).is_err());
    }
}
