#![allow(dead_code)]

use rand::Rng;

pub mod oracle;

pub const FATTY_ACIDS: [(&str, &str); 7] = [
    ("FA1", "OC(=O)CCCCCCCCCCCCCCCCC/C=C\\C/C=C\\C/C=C\\C/C=C\\CCCCC"),
    ("FA2", "OC(=O)CCCCCCCCCCCCCCCCC/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\CC"),
    ("FA3", "OC(=O)CCCCCCCCCCCCCC/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\CC"),
    ("FA4", "OC(=O)CCCCCCCCCCCCCC/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\CCCCC"),
    ("FA5", "OC(=O)CCCCCCCCCCCCCCCCCCCCCCC/C=C\\CCCCCCCC"),
    ("FA6", "OC(=O)CCCCCCCCCCCCCCCCCCCCCCC/C=C\\C/C=C\\C/C=C\\CC"),
    (
        "FA7",
        "OC(=O)CC/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\C/C=C\\CC",
    ),
];

const ELEMENTS: [&str; 4] = ["C", "C", "N", "O"];

/// Random unbranched chain of `len` atoms, mostly carbon, with occasional
/// double and triple bonds and E/Z markers on isolated C=C bonds.
pub fn random_chain<R: Rng>(rng: &mut R, len: usize) -> String {
    let atoms: Vec<&str> = (0..len)
        .map(|_| ELEMENTS[rng.random_range(0..ELEMENTS.len())])
        .collect();
    let mut orders = vec![1u8; len.saturating_sub(1)];
    for o in orders.iter_mut() {
        let r: f64 = rng.random();
        *o = if r < 0.15 {
            2
        } else if r < 0.2 {
            3
        } else {
            1
        };
    }
    chain_smiles(rng, &atoms, &orders)
}

/// Writes a chain, adding `/`/`\` around a C=C bond when both flanking
/// bonds are single and exist.
pub fn chain_smiles<R: Rng>(rng: &mut R, atoms: &[&str], orders: &[u8]) -> String {
    let n = atoms.len();
    let mut marks = vec![""; orders.len()];
    for (i, &o) in orders.iter().enumerate() {
        let flanked = i >= 1 && i + 1 < orders.len() && orders[i - 1] == 1 && orders[i + 1] == 1;
        if o == 2
            && flanked
            && marks[i - 1].is_empty()
            && atoms[i] == "C"
            && atoms[i + 1] == "C"
            && rng.random_bool(0.7)
        {
            marks[i - 1] = "/";
            marks[i + 1] = if rng.random_bool(0.5) { "/" } else { "\\" };
        }
    }
    let mut s = String::new();
    for i in 0..n {
        s.push_str(atoms[i]);
        if i + 1 < n {
            s.push_str(match orders[i] {
                2 => "=",
                3 => "#",
                _ => marks[i],
            });
        }
    }
    s
}

/// Random acyclic SMILES with branches.
pub fn random_tree<R: Rng>(rng: &mut R, max_atoms: usize) -> String {
    let mut count = 0;
    let mut s = String::new();
    branch(rng, &mut s, &mut count, max_atoms, 0);
    s
}

fn branch<R: Rng>(rng: &mut R, s: &mut String, count: &mut usize, max: usize, depth: usize) {
    loop {
        s.push_str(ELEMENTS[rng.random_range(0..ELEMENTS.len())]);
        *count += 1;
        if *count >= max {
            return;
        }
        if depth < 3 && rng.random_bool(0.25) {
            s.push('(');
            if rng.random_bool(0.2) {
                s.push('=');
            }
            branch(rng, s, count, max, depth + 1);
            s.push(')');
            if *count >= max {
                return;
            }
        }
        if rng.random_bool(0.2) {
            return;
        }
        if rng.random_bool(0.15) {
            s.push('=');
        }
    }
}
