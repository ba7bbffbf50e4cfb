//! Dense-unitary reference simulator for small registers.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qmse_core::sim::{Circuit, Gate};
use rand::Rng;

type Mat = Vec<Vec<C>>;

fn zeros(n: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); n]; n]
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn pauli(c: char) -> Mat {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match c {
        'I' => vec![vec![l, o], vec![o, l]],
        'X' => vec![vec![o, l], vec![l, o]],
        'Y' => vec![vec![o, -i], vec![i, o]],
        'Z' => vec![vec![l, o], vec![o, -l]],
        _ => unreachable!(),
    }
}

/// exp(-iθ/2 · P) for a Pauli product P (P² = I).
fn exp_pauli(p: &Mat, theta: f64) -> Mat {
    let n = p.len();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { C::new(c, 0.0) } else { C::new(0.0, 0.0) };
            out[i][j] = id - C::new(0.0, s) * p[i][j];
        }
    }
    out
}

/// Local matrix and the register qubits it acts on; local bit k is the k-th
/// listed qubit.
fn local(g: &Gate) -> (Mat, Vec<usize>) {
    let one = C::new(1.0, 0.0);
    match *g {
        Gate::Rx { qubit, theta } => (exp_pauli(&pauli('X'), theta), vec![qubit]),
        Gate::Ry { qubit, theta } => (exp_pauli(&pauli('Y'), theta), vec![qubit]),
        Gate::Rz { qubit, theta } => (exp_pauli(&pauli('Z'), theta), vec![qubit]),
        Gate::X { qubit } => (pauli('X'), vec![qubit]),
        Gate::Rxx { a, b, theta } => (exp_pauli(&kron(&pauli('X'), &pauli('X')), theta), vec![a, b]),
        Gate::Ryy { a, b, theta } => (exp_pauli(&kron(&pauli('Y'), &pauli('Y')), theta), vec![a, b]),
        Gate::Rzz { a, b, theta } => (exp_pauli(&kron(&pauli('Z'), &pauli('Z')), theta), vec![a, b]),
        Gate::Cz { a, b } => {
            let mut m = zeros(4);
            for (k, row) in m.iter_mut().enumerate() {
                row[k] = if k == 3 { -one } else { one };
            }
            (m, vec![a, b])
        }
        Gate::Cnot { control, target } => {
            // Local index = control + 2·target.
            let mut m = zeros(4);
            m[0][0] = one;
            m[2][2] = one;
            m[3][1] = one;
            m[1][3] = one;
            (m, vec![control, target])
        }
        Gate::Crx { control, target, theta } => {
            let rx = exp_pauli(&pauli('X'), theta);
            let mut m = zeros(4);
            m[0][0] = one;
            m[2][2] = one;
            m[1][1] = rx[0][0];
            m[1][3] = rx[0][1];
            m[3][1] = rx[1][0];
            m[3][3] = rx[1][1];
            (m, vec![control, target])
        }
    }
}

fn embed(g: &Gate, n: usize) -> Mat {
    let (m, qs) = local(g);
    let dim = 1 << n;
    let mask: usize = qs.iter().map(|q| 1 << q).sum();
    let sub = |x: usize| qs.iter().enumerate().map(|(k, &q)| ((x >> q) & 1) << k).sum::<usize>();
    let mut out = zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                out[r][c] = m[sub(r)][sub(c)];
            }
        }
    }
    out
}

pub fn oracle_state(c: &Circuit) -> Vec<C> {
    let dim = 1 << c.n_qubits();
    let mut u = zeros(dim);
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    for g in c.gates() {
        u = matmul(&embed(g, c.n_qubits()), &u);
    }
    u.iter().map(|row| row[0]).collect()
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> Gate {
    let q = rng.random_range(0..n);
    let theta = rng.random_range(-10.0..10.0);
    let kinds = if n >= 2 { 10 } else { 4 };
    let other = (q + rng.random_range(1..n.max(2))) % n;
    let other = || other;
    match rng.random_range(0..kinds) {
        0 => Gate::Rx { qubit: q, theta },
        1 => Gate::Ry { qubit: q, theta },
        2 => Gate::Rz { qubit: q, theta },
        3 => Gate::X { qubit: q },
        4 => Gate::Rxx {
            a: q,
            b: other(),
            theta,
        },
        5 => Gate::Ryy {
            a: q,
            b: other(),
            theta,
        },
        6 => Gate::Rzz {
            a: q,
            b: other(),
            theta,
        },
        7 => Gate::Cz { a: q, b: other() },
        8 => Gate::Cnot {
            control: q,
            target: other(),
        },
        _ => Gate::Crx {
            control: q,
            target: other(),
            theta,
        },
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R) -> Circuit {
    let n = rng.random_range(1..=4);
    let mut c = Circuit::new(n);
    for _ in 0..rng.random_range(0..=6) {
        c.push(random_gate(rng, n)).unwrap();
    }
    c
}
