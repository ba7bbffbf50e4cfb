//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed; exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::oracle::{oracle_state, random_circuit};
use qmse_cli::ingest::{self, Format, Need};
use qmse_core::contraction::{contracted_fidelity, direct_fidelity};
use qmse_core::encoder::encode;
use qmse_core::sim::Circuit;
use qmse_core::similarity::{fidelity_matrix, sample_variance};
use qmse_core::vqml::{
    minimize, run_experiment, AnsatzRotation, Encoding, Entanglement, Entangler, FingerprintParams, MinimizeOptions,
    RunConfig, RunResult, Task,
};
use qmse_core::{parse_smiles, CouplingGate, EncodingParams, MolGraph, RotationGate, Simulator};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn load(name: &str, need: Need) -> Vec<ingest::Loaded> {
    ingest::ingest(&data(name), Format::Csv, need).expect("fixture loads")
}

fn max_gap(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn butene_angles() -> Outcome {
    let g = parse_smiles("C/C=C/C").unwrap();
    let p = EncodingParams::default();
    let mut best = Duration::MAX;
    let mut angles = Vec::new();
    for _ in 0..20 {
        let t = Instant::now();
        let c = encode(&g, &p).unwrap();
        best = best.min(t.elapsed());
        angles = c.gates().iter().map(|g| g.angle().unwrap()).collect();
    }
    let want: [f64; 7] = [108.0, 108.0, 108.0, 108.0, 36.0, 18.0, 36.0];
    let exact = angles.len() == want.len() && angles.iter().zip(want).all(|(a, b)| a.to_bits() == b.to_bits());
    let fast = best < Duration::from_millis(1);
    outcome(exact && fast, format!("angles {angles:?}, {best:?}"))
}

/// A random linear chain and an edited copy, both at most `max_len` atoms.
fn chain_pair(rng: &mut ChaCha8Rng, max_len: usize) -> (MolGraph, MolGraph) {
    const ELEMENTS: [&str; 4] = ["C", "C", "C", "O"];
    let n = rng.random_range(2..=max_len);
    let atoms: Vec<&str> = (0..n).map(|_| ELEMENTS[rng.random_range(0..4)]).collect();
    let orders: Vec<u8> = (1..n).map(|_| if rng.random_bool(0.2) { 2 } else { 1 }).collect();
    let mut q_atoms = atoms.clone();
    let mut q_orders = orders.clone();
    for _ in 0..rng.random_range(0..3) {
        let i = rng.random_range(0..n);
        q_atoms[i] = ELEMENTS[rng.random_range(0..4)];
    }
    let m = rng.random_range(2..=max_len);
    q_atoms.resize(m, "C");
    q_orders.resize(m - 1, 1);
    let marks: u64 = rng.random();
    let p = common::chain_smiles(&mut ChaCha8Rng::seed_from_u64(marks), &atoms, &orders);
    let q = common::chain_smiles(&mut ChaCha8Rng::seed_from_u64(marks), &q_atoms, &q_orders);
    (parse_smiles(&p).unwrap(), parse_smiles(&q).unwrap())
}

fn contraction_theorem() -> Outcome {
    let t = Instant::now();
    let sim = Simulator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gates = [CouplingGate::Rxx, CouplingGate::Ryy, CouplingGate::Rzz];
    let (mut worst, mut saved, cases) = (0.0f64, 0, 400);
    for k in 0..cases {
        let (p, q) = chain_pair(&mut rng, 14);
        let params = EncodingParams::with_gates(RotationGate::Ry, gates[k % 3]);
        let direct = direct_fidelity(&p, &q, &params, &sim).unwrap();
        let contracted = contracted_fidelity(&p, &q, &params, &sim).unwrap();
        worst = worst.max((direct.fidelity - contracted.fidelity).abs());
        saved += direct.qubits - contracted.qubits;
    }
    let elapsed = t.elapsed();
    outcome(
        worst < 1e-9 && elapsed < Duration::from_secs(60),
        format!("{cases} pairs, max |ΔF| = {worst:.2e}, {saved} qubits removed, {elapsed:.1?}"),
    )
}

fn commutativity() -> Outcome {
    let sim = Simulator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for m in 0..50 {
        let g = parse_smiles(&common::random_tree(&mut rng, 14)).unwrap();
        let gate_2q = [CouplingGate::Rxx, CouplingGate::Ryy, CouplingGate::Rzz][m % 3];
        let p = EncodingParams::with_gates(RotationGate::Ry, gate_2q);
        let c = encode(&g, &p).unwrap();
        let base = sim.run(&c).unwrap();
        let (rot, bonds) = c.gates().split_at(g.n_atoms());
        for _ in 0..10 {
            let mut shuffled = bonds.to_vec();
            shuffled.shuffle(&mut rng);
            let mut alt = Circuit::new(c.n_qubits());
            alt.extend(rot.iter().copied().chain(shuffled)).unwrap();
            let s = sim.run(&alt).unwrap();
            worst = worst.max(max_gap(base.amplitudes(), s.amplitudes()));
        }
    }
    outcome(worst < 1e-10, format!("500 permutations, max gap {worst:.2e}"))
}

fn gate_spread() -> Outcome {
    let sim = Simulator::default();
    let mut parts = Vec::new();
    let mut pass = true;
    for (file, contract) in [("fattyacids.csv", true), ("alkanes_boiling.csv", false)] {
        let rows = load(file, Need::Nothing);
        let labels: Vec<String> = rows.iter().map(|r| r.record.name.clone()).collect();
        let mols: Vec<MolGraph> = rows.into_iter().map(|r| r.graph).collect();
        let var = |gate_2q| {
            let p = EncodingParams::with_gates(RotationGate::Ry, gate_2q);
            sample_variance(
                &fidelity_matrix(&mols, &labels, &p, contract, &sim)
                    .unwrap()
                    .off_diagonal(),
            )
        };
        let (xx, zz) = (var(CouplingGate::Rxx), var(CouplingGate::Rzz));
        pass &= xx > zz;
        parts.push(format!("{file}: var Rxx {xx:.4} vs Rzz {zz:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn oracle_equivalence() -> Outcome {
    let sim = Simulator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c = random_circuit(&mut rng);
        let got = sim.run(&c).unwrap();
        worst = worst.max(max_gap(got.amplitudes(), &oracle_state(&c)));
    }
    outcome(worst < 1e-10, format!("1000 circuits, max gap {worst:.2e}"))
}

fn run_config(
    task: Task,
    encoding: Encoding,
    gate_2q: Entangler,
    entanglement: Entanglement,
    layers: usize,
    max_iters: usize,
) -> RunConfig {
    RunConfig {
        task,
        encoding,
        gate_1q: AnsatzRotation::Ry,
        gate_2q,
        entanglement,
        layers,
        observable: None,
        max_iters,
        n_restarts: 10,
        k_folds: 5,
        seed: 7,
        encoding_params: EncodingParams::default(),
        fingerprint: FingerprintParams::default(),
        n_qubits: None,
        rho_begin: 1.0,
        rho_end: 1e-6,
    }
}

struct Vqc {
    qmse: RunResult,
    fingerprint: RunResult,
    elapsed: Duration,
}

fn train_vqc_pair() -> Vqc {
    let t = Instant::now();
    let rows = load("alkanes_phase.csv", Need::Label);
    let data = ingest::dataset(&rows, Need::Label);
    let cfg = |e| run_config(Task::Classify, e, Entangler::Cz, Entanglement::Linear, 3, 500);
    let qmse = run_experiment(&cfg(Encoding::Qmse), &data).unwrap();
    let fingerprint = run_experiment(&cfg(Encoding::Fingerprint), &data).unwrap();
    Vqc {
        qmse,
        fingerprint,
        elapsed: t.elapsed(),
    }
}

fn vqc_surrogate(v: &Vqc) -> Outcome {
    let (q, f) = (&v.qmse, &v.fingerprint);
    let pass = q.n_qubits <= 8
        && q.train_score.median >= 0.95
        && q.test_score.median >= 0.8
        && f.test_score.median < q.test_score.median
        && v.elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "QMSE train {:.3} test {:.3}; fingerprint train {:.3} test {:.3}; {} qubits, {:.1?}",
            q.train_score.median, q.test_score.median, f.train_score.median, f.test_score.median, q.n_qubits, v.elapsed
        ),
    )
}

fn train_vqr() -> RunResult {
    let rows = load("alkanes_boiling.csv", Need::Target);
    let data = ingest::dataset(&rows, Need::Target);
    let cfg = run_config(
        Task::Regress,
        Encoding::Qmse,
        Entangler::Crx,
        Entanglement::Full,
        4,
        1000,
    );
    run_experiment(&cfg, &data).unwrap()
}

fn vqr_surrogate(r: &RunResult) -> Outcome {
    outcome(
        r.train_score.median >= 0.9,
        format!(
            "train R² {:.4} [{:.4}, {:.4}], test R² {:.4} (reported only)",
            r.train_score.median, r.train_score.p16, r.train_score.p84, r.test_score.median
        ),
    )
}

fn loss_traces(v: &Vqc, vqr: &RunResult) -> Outcome {
    let results = [&v.qmse, &v.fingerprint, vqr];
    let monotone = results
        .iter()
        .flat_map(|r| r.runs())
        .all(|(_, run)| run.trace.windows(2).all(|w| w[1] <= w[0]) && run.trace.last() == Some(&run.final_loss));
    let n: usize = results.iter().map(|r| r.runs().count()).sum();
    let (lq, lf) = (v.qmse.final_loss.median, v.fingerprint.final_loss.median);
    outcome(
        monotone && lq < lf,
        format!("{n} traces monotone: {monotone}; median final loss QMSE {lq:.4} vs fingerprint {lf:.4}"),
    )
}

fn optimizer_contract() -> Outcome {
    let quad = minimize(|x: &[f64]| (x[0] - 1.0).powi(2), &[0.0], &MinimizeOptions::default()).unwrap();
    let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let opts = MinimizeOptions {
        max_evals: 2000,
        ..Default::default()
    };
    let r = minimize(rosen, &[-1.2, 1.0], &opts).unwrap();
    let pass = (quad.x[0] - 1.0).abs() <= 1e-4 && r.f < 1e-3 && r.n_evals <= 2000;
    outcome(
        pass,
        format!(
            "(x-1)²: x = {:.8}; Rosenbrock: f = {:.2e} after {} evaluations",
            quad.x[0], r.f, r.n_evals
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path, tag: &str, extra: &[(&str, &str)]) -> Result<Vec<Vec<u8>>, String> {
    let out = dir.join(format!("{tag}.out"));
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmse"));
    cmd.args(args).arg("--seed").arg("11").arg("--out").arg(&out);
    let mut files = vec![out];
    for (flag, name) in extra {
        let p = dir.join(format!("{tag}.{name}"));
        cmd.arg(flag).arg(&p);
        files.push(p);
    }
    let status = cmd.output().map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&status.stderr)));
    }
    files
        .iter()
        .map(|p| std::fs::read(p).map_err(|e| e.to_string()))
        .collect()
}

/// Arguments plus `(flag, file suffix)` pairs for extra output files.
type Invocation<'a> = (Vec<&'a str>, Vec<(&'a str, &'a str)>);

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let classify = dir.path().join("classify.json");
    let regress = dir.path().join("regress.json");
    std::fs::write(
        &classify,
        r#"{"task": "classify", "encoding": "qmse", "gate_2q": "cz", "entanglement": "linear", "layers": 2, "max_iters": 80, "n_restarts": 3, "k_folds": 3}"#,
    )
    .unwrap();
    std::fs::write(
        &regress,
        r#"{"task": "regress", "encoding": "fingerprint", "gate_2q": "crx", "entanglement": "full", "layers": 1, "max_iters": 80, "n_restarts": 3, "k_folds": 3}"#,
    )
    .unwrap();
    let fa = data("fattyacids.csv");
    let phase = data("alkanes_phase.csv");
    let boiling = data("alkanes_boiling.csv");
    let (fa, phase, boiling) = (fa.to_str().unwrap(), phase.to_str().unwrap(), boiling.to_str().unwrap());
    let (classify, regress) = (classify.to_str().unwrap(), regress.to_str().unwrap());
    let commands: Vec<Invocation> = vec![
        (vec!["parse", "C/C=C/C"], vec![]),
        (vec!["encode", "C/C=C/C"], vec![]),
        (vec!["fidelity", "CCCCO", "CCCCN", "--contract"], vec![]),
        (vec!["contract", "CCCCCCO", "CCCCCCN"], vec![]),
        (vec!["matrix", fa, "--contract"], vec![]),
        (vec!["matrix", phase, "--kind", "tanimoto", "--format", "json"], vec![]),
        (vec!["ingest", boiling], vec![]),
        (
            vec!["classify", phase, "--config", classify],
            vec![("--trace", "trace.csv")],
        ),
        (
            vec!["regress", boiling, "--config", regress],
            vec![("--trace", "trace.csv")],
        ),
    ];
    let mut same = 0;
    for (k, (args, extra)) in commands.iter().enumerate() {
        let first = run_cli(args, dir.path(), &format!("a{k}"), extra);
        let second = run_cli(args, dir.path(), &format!("b{k}"), extra);
        match (first, second) {
            (Ok(a), Ok(b)) if a == b => same += 1,
            (Ok(_), Ok(_)) => return outcome(false, format!("{} differs between runs", args[0])),
            (Err(e), _) | (_, Err(e)) => return outcome(false, e),
        }
    }
    outcome(true, format!("{same} commands byte-identical across two runs"))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id, name, o: Outcome| {
        println!(
            "[{}] {id:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o));
    };
    record(1, "butene encoding angles", butene_angles());
    record(2, "chain contraction preserves fidelity", contraction_theorem());
    record(3, "bond gate order is irrelevant", commutativity());
    record(4, "Rxx spreads fidelities more than Rzz", gate_spread());
    record(5, "simulator matches dense unitaries", oracle_equivalence());
    let vqc = train_vqc_pair();
    record(6, "VQC surrogate", vqc_surrogate(&vqc));
    let vqr = train_vqr();
    record(7, "VQR surrogate", vqr_surrogate(&vqr));
    record(8, "loss traces", loss_traces(&vqc, &vqr));
    record(9, "optimizer contract", optimizer_contract());
    record(10, "CLI determinism", cli_determinism());

    let failed: Vec<u32> = results
        .iter()
        .filter(|(_, _, o)| !o.pass)
        .map(|(id, _, _)| *id)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::exit(1);
    }
}
