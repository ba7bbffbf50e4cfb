//! SMILES subset parser.
//!
//! Accepted: organic-subset atoms (C N O S P F Cl Br I), bracket atoms with an
//! element symbol, optional `@`/`@@` and an optional hydrogen count; bond
//! symbols `-`, `=`, `#`, `/`, `\`; branches; ring-closure digits.
//! Rejected with a named error: aromatic atoms, explicit hydrogen atoms,
//! charges, isotopes, atom classes, dot-separated components.

use super::element::{atomic_number, ORGANIC_SUBSET};
use super::{Atom, Bond, BondStereo, MolGraph, TetraParity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty SMILES string")]
    Empty,
    #[error("non-ASCII character at position {0}")]
    NonAscii(usize),
    #[error("unbalanced parentheses at position {0}")]
    UnbalancedParentheses(usize),
    #[error("unmatched ring-closure digit {digit} opened at position {pos}")]
    UnmatchedRingClosure { digit: u8, pos: usize },
    #[error("unknown atom symbol `{symbol}` at position {pos}")]
    UnknownAtom { symbol: String, pos: usize },
    #[error("directional bond at position {0} is not adjacent to a double bond")]
    DirectionalBondNotAdjacentToDouble(usize),
    #[error("dot-separated components are not supported (position {0})")]
    DisconnectedComponents(usize),
    #[error("aromatic atom `{symbol}` at position {pos}; supply a Kekulé structure")]
    AromaticAtom { symbol: String, pos: usize },
    #[error("explicit hydrogen atom at position {0}; hydrogens are implicit")]
    ExplicitHydrogen(usize),
    #[error("unsupported SMILES feature at position {pos}: {what}")]
    Unsupported { what: &'static str, pos: usize },
    #[error("bond symbol at position {0} is not followed by an atom")]
    DanglingBond(usize),
    #[error("branch or ring closure at position {0} has no preceding atom")]
    MissingAtom(usize),
    #[error("empty branch at position {0}")]
    EmptyBranch(usize),
    #[error("ring closure at position {pos} bonds atom {atom} to itself or duplicates a bond")]
    BadRingClosure { atom: usize, pos: usize },
    #[error("conflicting bond symbols for ring closure {digit} at position {pos}")]
    ConflictingRingBond { digit: u8, pos: usize },
    #[error("unterminated bracket atom starting at position {0}")]
    UnterminatedBracket(usize),
    #[error("unexpected character `{ch}` at position {pos}")]
    UnexpectedCharacter { ch: char, pos: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSym {
    Single,
    Double,
    Triple,
    Up,
    Down,
}

impl BondSym {
    fn order(self) -> u8 {
        match self {
            BondSym::Double => 2,
            BondSym::Triple => 3,
            _ => 1,
        }
    }

    fn direction(self) -> Option<i8> {
        match self {
            BondSym::Up => Some(1),
            BondSym::Down => Some(-1),
            _ => None,
        }
    }
}

/// A `/` or `\` bond as written, from the earlier atom to the later one.
#[derive(Debug, Clone, Copy)]
struct DirectionalMark {
    from: usize,
    to: usize,
    dir: i8,
    pos: usize,
}

struct RingOpen {
    atom: usize,
    bond: Option<(BondSym, usize)>,
    pos: usize,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    parents: Vec<Option<usize>>,
    bonds: Vec<(usize, usize, u8)>,
    marks: Vec<DirectionalMark>,
    prev: Option<usize>,
    branch_stack: Vec<(usize, usize)>,
    pending: Option<(BondSym, usize)>,
    rings: [Option<RingOpen>; 10],
    /// Set right after `(` until the branch gets its first atom.
    branch_open: Option<usize>,
}

/// Parses a SMILES string into a heavy-atom graph in encounter order.
pub fn parse_smiles(text: &str) -> Result<MolGraph, ParseError> {
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(ParseError::NonAscii(pos));
    }
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        parents: Vec::new(),
        bonds: Vec::new(),
        marks: Vec::new(),
        prev: None,
        branch_stack: Vec::new(),
        pending: None,
        rings: Default::default(),
        branch_open: None,
    };
    p.run()?;
    p.finish(text)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while let Some(c) = self.peek() {
            let pos = self.pos;
            match c {
                b'(' => {
                    let atom = self.prev.ok_or(ParseError::MissingAtom(pos))?;
                    if self.pending.is_some() || self.branch_open.is_some() {
                        return Err(ParseError::EmptyBranch(pos));
                    }
                    self.branch_stack.push((atom, pos));
                    self.branch_open = Some(pos);
                    self.pos += 1;
                }
                b')' => {
                    if let Some(open) = self.branch_open {
                        return Err(ParseError::EmptyBranch(open));
                    }
                    if let Some((_, bpos)) = self.pending {
                        return Err(ParseError::DanglingBond(bpos));
                    }
                    let (atom, _) = self.branch_stack.pop().ok_or(ParseError::UnbalancedParentheses(pos))?;
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b'/' | b'\\' => {
                    if self.pending.is_some() {
                        return Err(ParseError::UnexpectedCharacter { ch: c as char, pos });
                    }
                    if self.prev.is_none() {
                        return Err(ParseError::MissingAtom(pos));
                    }
                    let sym = match c {
                        b'-' => BondSym::Single,
                        b'=' => BondSym::Double,
                        b'#' => BondSym::Triple,
                        b'/' => BondSym::Up,
                        _ => BondSym::Down,
                    };
                    self.pending = Some((sym, pos));
                    self.pos += 1;
                }
                b':' | b'$' => {
                    return Err(ParseError::Unsupported {
                        what: "aromatic or quadruple bond symbol",
                        pos,
                    })
                }
                b'.' => return Err(ParseError::DisconnectedComponents(pos)),
                b'%' => {
                    return Err(ParseError::Unsupported {
                        what: "two-digit ring closure",
                        pos,
                    })
                }
                b'0'..=b'9' => self.ring_closure(c - b'0', pos)?,
                b'[' => self.bracket_atom(pos)?,
                b'A'..=b'Z' | b'a'..=b'z' | b'*' => self.organic_atom(pos)?,
                _ => return Err(ParseError::UnexpectedCharacter { ch: c as char, pos }),
            }
        }
        Ok(())
    }

    fn organic_atom(&mut self, pos: usize) -> Result<(), ParseError> {
        let rest = &self.text[pos..];
        for sym in ORGANIC_SUBSET {
            if rest.starts_with(sym.as_bytes()) {
                self.pos += sym.len();
                let z = atomic_number(sym).expect("organic subset symbols are in the table");
                self.add_atom(Atom::new(z));
                return Ok(());
            }
        }
        let c = rest[0];
        let symbol = (c as char).to_string();
        if matches!(c, b'b' | b'c' | b'n' | b'o' | b'p' | b's') {
            return Err(ParseError::AromaticAtom { symbol, pos });
        }
        if c == b'H' {
            return Err(ParseError::ExplicitHydrogen(pos));
        }
        Err(ParseError::UnknownAtom { symbol, pos })
    }

    fn bracket_atom(&mut self, start: usize) -> Result<(), ParseError> {
        let close = self.text[start..]
            .iter()
            .position(|&b| b == b']')
            .map(|i| start + i)
            .ok_or(ParseError::UnterminatedBracket(start))?;
        let body = &self.text[start + 1..close];
        let mut i = 0;
        let at = |i: usize| start + 1 + i;

        if body.first().is_some_and(|b| b.is_ascii_digit()) {
            return Err(ParseError::Unsupported {
                what: "isotope",
                pos: at(0),
            });
        }
        let sym_len = match body.first() {
            Some(b) if b.is_ascii_uppercase() => {
                if body.get(1).is_some_and(|b| b.is_ascii_lowercase()) {
                    2
                } else {
                    1
                }
            }
            Some(b) if b.is_ascii_lowercase() => {
                let symbol = (*b as char).to_string();
                return Err(ParseError::AromaticAtom { symbol, pos: at(0) });
            }
            _ => {
                let symbol = String::from_utf8_lossy(body).into_owned();
                return Err(ParseError::UnknownAtom { symbol, pos: at(0) });
            }
        };
        let symbol = std::str::from_utf8(&body[..sym_len]).expect("ascii");
        let z = match atomic_number(symbol) {
            Some(1) => return Err(ParseError::ExplicitHydrogen(start)),
            Some(z) => z,
            None => {
                return Err(ParseError::UnknownAtom {
                    symbol: symbol.to_string(),
                    pos: at(0),
                });
            }
        };
        i += sym_len;

        let mut parity = TetraParity::None;
        if body.get(i) == Some(&b'@') {
            if body.get(i + 1) == Some(&b'@') {
                parity = TetraParity::Plus;
                i += 2;
            } else {
                parity = TetraParity::Minus;
                i += 1;
            }
            if body.get(i).is_some_and(|b| b.is_ascii_uppercase() && *b != b'H') {
                return Err(ParseError::Unsupported {
                    what: "extended chirality class",
                    pos: at(i),
                });
            }
        }
        if body.get(i) == Some(&b'H') {
            i += 1;
            while body.get(i).is_some_and(|b| b.is_ascii_digit()) {
                i += 1;
            }
        }
        match body.get(i) {
            None => {}
            Some(b'+') | Some(b'-') => {
                return Err(ParseError::Unsupported {
                    what: "formal charge",
                    pos: at(i),
                })
            }
            Some(b':') => {
                return Err(ParseError::Unsupported {
                    what: "atom class",
                    pos: at(i),
                })
            }
            Some(&c) => {
                return Err(ParseError::UnexpectedCharacter {
                    ch: c as char,
                    pos: at(i),
                })
            }
        }

        self.pos = close + 1;
        self.add_atom(Atom {
            atomic_number: z,
            tetra_parity: parity,
        });
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom) {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        self.parents.push(self.prev);
        if let Some(prev) = self.prev {
            let sym = self.pending.take();
            let order = sym.map_or(1, |(s, _)| s.order());
            self.bonds.push((prev, idx, order));
            if let Some((s, pos)) = sym {
                if let Some(dir) = s.direction() {
                    self.marks.push(DirectionalMark {
                        from: prev,
                        to: idx,
                        dir,
                        pos,
                    });
                }
            }
        }
        self.prev = Some(idx);
        self.branch_open = None;
    }

    fn ring_closure(&mut self, digit: u8, pos: usize) -> Result<(), ParseError> {
        let atom = self.prev.ok_or(ParseError::MissingAtom(pos))?;
        if self.branch_open.is_some() {
            return Err(ParseError::MissingAtom(pos));
        }
        let bond = self.pending.take();
        self.pos += 1;
        match self.rings[digit as usize].take() {
            None => {
                self.rings[digit as usize] = Some(RingOpen { atom, bond, pos });
            }
            Some(open) => {
                let sym = match (open.bond, bond) {
                    (Some((a, _)), Some((b, _))) if a != b => {
                        return Err(ParseError::ConflictingRingBond { digit, pos });
                    }
                    (Some(s), _) | (None, Some(s)) => Some(s),
                    (None, None) => None,
                };
                if let Some((s, spos)) = sym {
                    if s.direction().is_some() {
                        return Err(ParseError::Unsupported {
                            what: "directional ring-closure bond",
                            pos: spos,
                        });
                    }
                }
                let (a, b) = (open.atom, atom);
                let duplicate = self
                    .bonds
                    .iter()
                    .any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a));
                if a == b || duplicate {
                    return Err(ParseError::BadRingClosure { atom, pos });
                }
                self.bonds.push((a, b, sym.map_or(1, |(s, _)| s.order())));
            }
        }
        Ok(())
    }

    fn finish(self, text: &str) -> Result<MolGraph, ParseError> {
        if let Some((_, pos)) = self.pending {
            return Err(ParseError::DanglingBond(pos));
        }
        if let Some(&(_, pos)) = self.branch_stack.last() {
            return Err(ParseError::UnbalancedParentheses(pos));
        }
        if let Some(open) = self.rings.iter().flatten().min_by_key(|r| r.pos) {
            let digit = self.text[open.pos] - b'0';
            return Err(ParseError::UnmatchedRingClosure { digit, pos: open.pos });
        }

        // Every directional mark must touch a double bond.
        let in_double = |atom: usize| self.bonds.iter().any(|&(a, b, o)| o == 2 && (a == atom || b == atom));
        for m in &self.marks {
            if !in_double(m.from) && !in_double(m.to) {
                return Err(ParseError::DirectionalBondNotAdjacentToDouble(m.pos));
            }
        }

        // Which side of `atom` the substituent across `mark` sits on.
        let side = |atom: usize, mark: &DirectionalMark| -> i8 {
            if mark.to == atom {
                mark.dir
            } else {
                -mark.dir
            }
        };
        let first_mark = |atom: usize, partner: usize| {
            self.marks
                .iter()
                .find(|m| (m.from == atom && m.to != partner) || (m.to == atom && m.from != partner))
        };

        let bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|&(a, b, order)| {
                let mut stereo = BondStereo::None;
                if order == 2 {
                    if let (Some(ma), Some(mb)) = (first_mark(a, b), first_mark(b, a)) {
                        stereo = if side(a, ma) != side(b, mb) {
                            BondStereo::E
                        } else {
                            BondStereo::Z
                        };
                    }
                }
                Bond::new(a, b, order, stereo)
            })
            .collect();

        let graph = MolGraph::from_parts(self.atoms, bonds, self.parents, text)
            .expect("parser output satisfies graph invariants");
        debug_assert!(graph.is_connected());
        Ok(graph)
    }
}
