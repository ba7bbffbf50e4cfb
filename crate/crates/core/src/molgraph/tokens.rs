use std::fmt;

use super::{symbol, BondStereo, MolGraph, TetraParity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomToken {
    pub index: usize,
    pub atomic_number: u8,
    pub parity: TetraParity,
    /// Side chains hanging off this atom, each starting with the bond into it.
    pub branches: Vec<Vec<ChainToken>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BondToken {
    pub order: u8,
    pub stereo: BondStereo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainToken {
    Atom(AtomToken),
    Bond(BondToken),
    /// Separates disconnected components (only in contracted graphs).
    Break,
}

impl ChainToken {
    pub fn as_atom(&self) -> Option<&AtomToken> {
        match self {
            ChainToken::Atom(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for BondToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.order {
            1 => "single",
            2 => "double",
            3 => "triple",
            _ => "bond",
        };
        match self.stereo {
            BondStereo::None => write!(f, "{name}"),
            BondStereo::E => write!(f, "{name}-E"),
            BondStereo::Z => write!(f, "{name}-Z"),
        }
    }
}

impl fmt::Display for AtomToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", symbol(self.atomic_number))?;
        match self.parity {
            TetraParity::Minus => write!(f, "@")?,
            TetraParity::Plus => write!(f, "@@")?,
            TetraParity::None => {}
        }
        for branch in &self.branches {
            write!(f, "(branch:{})", smiles_like(branch))?;
        }
        Ok(())
    }
}

impl fmt::Display for ChainToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainToken::Atom(a) => a.fmt(f),
            ChainToken::Bond(b) => b.fmt(f),
            ChainToken::Break => write!(f, "."),
        }
    }
}

/// Compact rendering for branch annotations: single bonds are implicit.
fn smiles_like(tokens: &[ChainToken]) -> String {
    let mut out = String::new();
    for t in tokens {
        match t {
            ChainToken::Atom(a) => out.push_str(&a.to_string()),
            ChainToken::Bond(b) => out.push_str(match (b.order, b.stereo) {
                (2, BondStereo::E) => "=E",
                (2, BondStereo::Z) => "=Z",
                (2, _) => "=",
                (3, _) => "#",
                _ => "",
            }),
            ChainToken::Break => out.push('.'),
        }
    }
    out
}

/// Main-chain token sequence: alternating atom and bond tokens following the
/// depth-first tree from atom 0. At every atom the highest-index child
/// continues the chain; other children become branch annotations.
pub fn to_token_chain(g: &MolGraph) -> Vec<ChainToken> {
    let n = g.n_atoms();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (i, p) in g.parents().iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }

    let mut out = Vec::new();
    for (k, &root) in roots.iter().enumerate() {
        if k > 0 {
            out.push(ChainToken::Break);
        }
        walk(g, &children, root, &mut out);
    }
    out
}

fn walk(g: &MolGraph, children: &[Vec<usize>], start: usize, out: &mut Vec<ChainToken>) {
    let mut current = start;
    loop {
        let kids = &children[current];
        let (main, side) = match kids.split_last() {
            Some((last, rest)) => (Some(*last), rest),
            None => (None, &[][..]),
        };
        let branches = side
            .iter()
            .map(|&c| {
                let mut branch = vec![bond_token(g, current, c)];
                walk(g, children, c, &mut branch);
                branch
            })
            .collect();
        let atom = g.atoms()[current];
        out.push(ChainToken::Atom(AtomToken {
            index: current,
            atomic_number: atom.atomic_number,
            parity: atom.tetra_parity,
            branches,
        }));
        match main {
            Some(next) => {
                out.push(bond_token(g, current, next));
                current = next;
            }
            None => break,
        }
    }
}

fn bond_token(g: &MolGraph, a: usize, b: usize) -> ChainToken {
    let bond = g.bond_between(a, b).expect("tree edges are bonds");
    ChainToken::Bond(BondToken {
        order: bond.order,
        stereo: bond.stereo,
    })
}

/// Atom indices along the main chain of each component, in order.
pub(crate) fn main_chain_atoms(g: &MolGraph) -> Vec<usize> {
    to_token_chain(g)
        .iter()
        .filter_map(|t| t.as_atom().map(|a| a.index))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn render(s: &str) -> Vec<String> {
        to_token_chain(&parse_smiles(s).unwrap())
            .iter()
            .map(|t| t.to_string())
            .collect()
    }

    #[test]
    fn ethane_chain() {
        assert_eq!(render("CC"), vec!["C", "single", "C"]);
    }

    #[test]
    fn butene_chain() {
        assert_eq!(
            render("C/C=C/C"),
            vec!["C", "single", "C", "double-E", "C", "single", "C"]
        );
    }

    #[test]
    fn isobutane_chain_has_branch() {
        assert_eq!(render("CC(C)C"), vec!["C", "single", "C(branch:C)", "single", "C"]);
        let chain = to_token_chain(&parse_smiles("CC(C)C").unwrap());
        let mid = chain[2].as_atom().unwrap();
        assert_eq!(mid.index, 1);
        assert_eq!(mid.branches.len(), 1);
        assert_eq!(chain[4].as_atom().unwrap().index, 3);
    }

    #[test]
    fn acid_head_branch() {
        assert_eq!(
            render("OC(=O)CC"),
            vec!["O", "single", "C(branch:=O)", "single", "C", "single", "C"]
        );
        assert_eq!(main_chain_atoms(&parse_smiles("OC(=O)CC").unwrap()), vec![0, 1, 3, 4]);
    }
}
