mod common;

use proptest::prelude::*;
use qmse_core::contraction::{contracted_fidelity, direct_fidelity, find_common_fragments};
use qmse_core::{parse_smiles, CouplingGate, EncodingParams, MolGraph, RotationGate, Simulator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ELEMENTS: [&str; 4] = ["C", "C", "C", "O"];

/// A random chain and a variant with a few local edits and possibly a
/// different length. Stereo markers use the same stream so they tend to agree.
fn pair(seed: u64, max_len: usize) -> (MolGraph, MolGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_len);
    let atoms: Vec<&str> = (0..n).map(|_| ELEMENTS[rng.random_range(0..4)]).collect();
    let orders: Vec<u8> = (1..n).map(|_| if rng.random_bool(0.2) { 2 } else { 1 }).collect();

    let mut q_atoms = atoms.clone();
    let mut q_orders = orders.clone();
    for _ in 0..rng.random_range(0..3) {
        let i = rng.random_range(0..n);
        q_atoms[i] = ELEMENTS[rng.random_range(0..4)];
        if i < q_orders.len() && rng.random_bool(0.3) {
            q_orders[i] = 3 - q_orders[i];
        }
    }
    let delta = rng.random_range(0..=3);
    if rng.random_bool(0.5) {
        let keep = n.saturating_sub(delta).max(2);
        q_atoms.truncate(keep);
        q_orders.truncate(keep - 1);
    } else {
        for _ in 0..delta.min(max_len - n) {
            q_atoms.push("C");
            q_orders.push(1);
        }
    }
    let mark_seed = rng.random::<u64>();
    let p = common::chain_smiles(&mut ChaCha8Rng::seed_from_u64(mark_seed), &atoms, &orders);
    let q = common::chain_smiles(&mut ChaCha8Rng::seed_from_u64(mark_seed), &q_atoms, &q_orders);
    (parse_smiles(&p).unwrap(), parse_smiles(&q).unwrap())
}

fn params(i: u64) -> EncodingParams {
    let r = [RotationGate::Rx, RotationGate::Ry, RotationGate::Rz][(i % 3) as usize];
    let c = [CouplingGate::Rxx, CouplingGate::Ryy, CouplingGate::Rzz][(i / 3 % 3) as usize];
    EncodingParams::with_gates(r, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contraction_preserves_fidelity(seed in any::<u64>()) {
        let (p, q) = pair(seed, 14);
        let params = params(seed);
        let sim = Simulator::default();
        let direct = direct_fidelity(&p, &q, &params, &sim).unwrap();
        let contracted = contracted_fidelity(&p, &q, &params, &sim).unwrap();
        prop_assert!(
            (direct.fidelity - contracted.fidelity).abs() < 1e-9,
            "{} vs {}: {} != {}", p.source(), q.source(), direct.fidelity, contracted.fidelity
        );
        prop_assert!(contracted.qubits <= p.n_atoms().max(q.n_atoms()));

        let swapped = contracted_fidelity(&q, &p, &params, &sim).unwrap();
        prop_assert!((swapped.fidelity - contracted.fidelity).abs() < 1e-10);
        prop_assert_eq!(swapped.qubits, contracted.qubits);
    }

    #[test]
    fn removed_runs_are_identical(seed in any::<u64>()) {
        let (p, q) = pair(seed, 20);
        let plan = find_common_fragments(&p, &q, &EncodingParams::default());
        prop_assert_eq!(
            plan.final_width + plan.qubits_saved(),
            p.n_atoms().max(q.n_atoms())
        );
        for seg in &plan.removed_segments {
            for k in seg.start..=seg.end {
                prop_assert_eq!(p.atoms()[k], q.atoms()[k]);
                prop_assert_eq!(p.neighbors(k), q.neighbors(k));
                for nb in p.neighbors(k) {
                    prop_assert_eq!(p.bond_between(k, nb), q.bond_between(k, nb));
                }
            }
            prop_assert!(plan.kept_atoms_p[seg.alpha].is_some());
            prop_assert!(plan.kept_atoms_p[seg.beta].is_some());
        }
    }
}

#[test]
fn alkane_pairs_match_direct_fidelity() {
    let sim = Simulator::default();
    let params = EncodingParams::default();
    for a in 2..=12 {
        for b in 2..=12 {
            let p = parse_smiles(&"C".repeat(a)).unwrap();
            let q = parse_smiles(&format!("{}O", "C".repeat(b - 1))).unwrap();
            let d = direct_fidelity(&p, &q, &params, &sim).unwrap();
            let c = contracted_fidelity(&p, &q, &params, &sim).unwrap();
            assert!((d.fidelity - c.fidelity).abs() < 1e-9, "{a},{b}");
        }
    }
}

#[test]
fn contraction_actually_happens() {
    let mut saved = 0;
    for seed in 0..300 {
        let (p, q) = pair(seed, 14);
        saved += find_common_fragments(&p, &q, &EncodingParams::default()).qubits_saved();
    }
    assert!(saved > 300, "random pairs rarely contract ({saved} qubits saved)");
}
