//! Dense-unitary reference for the statevector kernels.

mod common;

use common::oracle::{oracle_state, random_circuit};
use num_complex::Complex64 as C;
use qmse_core::sim::{Circuit, Gate, Simulator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_circuits_match_dense_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let sim = Simulator::default();
    for case in 0..1000 {
        let c = random_circuit(&mut rng);
        let got = sim.run(&c).unwrap();
        let want = oracle_state(&c);
        let err = got
            .amplitudes()
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "case {case}: {c:?} differs by {err}");
    }
}

#[test]
fn ry_108_closed_form() {
    let mut c = Circuit::new(1);
    c.push(Gate::Ry { qubit: 0, theta: 108.0 }).unwrap();
    let want = oracle_state(&c);
    assert!((want[0].re - 54f64.cos()).abs() < 1e-12);
    assert!((want[1].re - 54f64.sin()).abs() < 1e-12);
    let got = Simulator::default().run(&c).unwrap();
    assert!((got.amplitudes()[0] - want[0]).norm() < 1e-12);
    assert!((got.amplitudes()[1] - want[1]).norm() < 1e-12);
}

#[test]
fn wide_registers_take_the_parallel_path() {
    // 15 qubits crosses the threshold for chunked kernels; compare against a
    // product of independent single-qubit states.
    let n = 15;
    let mut c = Circuit::new(n);
    let mut want = vec![C::new(1.0, 0.0)];
    for q in 0..n {
        let theta = 0.3 + 0.17 * q as f64;
        c.push(Gate::Ry { qubit: q, theta }).unwrap();
        let (a, b) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        want = want.iter().map(|x| x * a).chain(want.iter().map(|x| x * b)).collect();
    }
    let got = Simulator::default().run(&c).unwrap();
    for (g, w) in got.amplitudes().iter().zip(&want) {
        assert!((g - w).norm() < 1e-12);
    }
    // Ry then Rzz then the inverse sequence returns to |0…0⟩.
    let mut round = c.clone();
    round
        .push(Gate::Rzz {
            a: 3,
            b: 12,
            theta: 0.7,
        })
        .unwrap();
    round
        .push(Gate::Crx {
            control: 14,
            target: 0,
            theta: 1.1,
        })
        .unwrap();
    round
        .push(Gate::Crx {
            control: 14,
            target: 0,
            theta: -1.1,
        })
        .unwrap();
    round
        .push(Gate::Rzz {
            a: 12,
            b: 3,
            theta: -0.7,
        })
        .unwrap();
    for q in (0..n).rev() {
        round
            .push(Gate::Ry {
                qubit: q,
                theta: -(0.3 + 0.17 * q as f64),
            })
            .unwrap();
    }
    let s = Simulator::default().run(&round).unwrap();
    assert!((s.amplitudes()[0].re - 1.0).abs() < 1e-10);
}
