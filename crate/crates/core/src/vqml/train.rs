use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    build_ansatz, minimize, stratified_kfold_labels, stratified_kfold_targets, Band, Dataset, Encoding, FoldResult,
    LabeledDataset, MedianModel, ParamCircuit, RestartResult, RunConfig, RunResult, Split, TargetDataset, Task,
    VqmlError,
};
use crate::encoder::{
    build_angle_circuit, build_matrix, build_qmse_circuit_on, numerical_rank, pca_fit_dense, scale_to_angle,
    topological_fingerprint,
};
use crate::exec;
use crate::molgraph::MolGraph;
use crate::sim::{PauliString, Simulator, Statevector};
use crate::vqml::stats::{accuracy, r_squared};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub fn run_experiment(run: &RunConfig, data: &Dataset) -> Result<RunResult, VqmlError> {
    match (run.task, data) {
        (Task::Classify, Dataset::Labeled(d)) => train_vqc(d, run),
        (Task::Regress, Dataset::Targets(d)) => train_vqr(d, run),
        (Task::Classify, _) => Err(VqmlError::Dataset("classification needs labels".into())),
        (Task::Regress, _) => Err(VqmlError::Dataset("regression needs targets".into())),
    }
}

pub fn train_vqc(data: &LabeledDataset, run: &RunConfig) -> Result<RunResult, VqmlError> {
    check_lengths(&data.names, &data.molecules, data.labels.len())?;
    if let Some(l) = data.labels.iter().find(|&&l| l > 1) {
        return Err(VqmlError::Dataset(format!("label {l} is not 0 or 1")));
    }
    if run.task != Task::Classify {
        return Err(VqmlError::Config("task must be classify".into()));
    }
    run.validate()?;
    let splits = stratified_kfold_labels(&data.labels, run.k_folds, run.seed)?;
    for (fold, s) in splits.iter().enumerate() {
        let first = data.labels[s.train[0]];
        if s.train.iter().all(|&i| data.labels[i] == first) {
            return Err(VqmlError::SingleClass { fold });
        }
    }
    let targets: Vec<f64> = data.labels.iter().map(|&l| 2.0 * f64::from(l) - 1.0).collect();
    let scorer = Scorer::Classify { labels: &data.labels };
    let fold_targets = vec![targets; splits.len()];
    train(&data.molecules, &splits, &fold_targets, run, &scorer)
}

pub fn train_vqr(data: &TargetDataset, run: &RunConfig) -> Result<RunResult, VqmlError> {
    check_lengths(&data.names, &data.molecules, data.targets.len())?;
    if run.task != Task::Regress {
        return Err(VqmlError::Config("task must be regress".into()));
    }
    run.validate()?;
    let splits = stratified_kfold_targets(&data.targets, run.k_folds, run.seed)?;
    let mut ranges = Vec::with_capacity(splits.len());
    let mut fold_targets = Vec::with_capacity(splits.len());
    for (fold, s) in splits.iter().enumerate() {
        let lo = s.train.iter().map(|&i| data.targets[i]).fold(f64::INFINITY, f64::min);
        let hi = s
            .train
            .iter()
            .map(|&i| data.targets[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(VqmlError::ConstantTargets { fold });
        }
        let first = data.targets[s.test[0]];
        if s.test.iter().all(|&i| data.targets[i] == first) {
            return Err(VqmlError::ConstantTestTargets { fold });
        }
        ranges.push((lo, hi));
        fold_targets.push(data.targets.iter().map(|y| (y - lo) / (hi - lo) - 0.5).collect());
    }
    let scorer = Scorer::Regress {
        targets: &data.targets,
        ranges,
    };
    train(&data.molecules, &splits, &fold_targets, run, &scorer)
}

fn check_lengths(names: &[String], mols: &[MolGraph], n: usize) -> Result<(), VqmlError> {
    if names.len() != mols.len() || mols.len() != n {
        return Err(VqmlError::Dataset(format!(
            "{} names, {} molecules and {n} labels or targets",
            names.len(),
            mols.len()
        )));
    }
    if mols.is_empty() {
        return Err(VqmlError::Dataset("no molecules".into()));
    }
    Ok(())
}

enum Scorer<'a> {
    Classify {
        labels: &'a [u8],
    },
    Regress {
        targets: &'a [f64],
        ranges: Vec<(f64, f64)>,
    },
}

impl Scorer<'_> {
    /// Maps a model output to a prediction on the original scale.
    fn predict(&self, fold: usize, e: f64) -> f64 {
        match self {
            Scorer::Classify { .. } => f64::from(u8::from(e > 0.0)),
            Scorer::Regress { ranges, .. } => {
                let (lo, hi) = ranges[fold];
                lo + (e + 0.5) * (hi - lo)
            }
        }
    }

    fn score(&self, fold: usize, idx: &[usize], outputs: &[f64]) -> f64 {
        match self {
            Scorer::Classify { labels } => {
                let pred: Vec<u8> = outputs.iter().map(|&e| u8::from(e > 0.0)).collect();
                let actual: Vec<u8> = idx.iter().map(|&i| labels[i]).collect();
                accuracy(&pred, &actual)
            }
            Scorer::Regress { targets, .. } => {
                let pred: Vec<f64> = outputs.iter().map(|&e| self.predict(fold, e)).collect();
                let actual: Vec<f64> = idx.iter().map(|&i| targets[i]).collect();
                r_squared(&pred, &actual).expect("constant splits are rejected up front")
            }
        }
    }
}

/// Seed for one (fold, restart) job. SplitMix64 keeps distinct jobs on
/// distinct streams, which a plain XOR of the indices would not.
pub(crate) fn job_seed(seed: u64, fold: usize, restart: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((fold as u64) << 32) | restart as u64))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn register_width(mols: &[MolGraph], run: &RunConfig) -> Result<usize, VqmlError> {
    let max_atoms = mols.iter().map(MolGraph::n_atoms).max().unwrap_or(0);
    match run.n_qubits {
        Some(w) if run.encoding == Encoding::Qmse && w < max_atoms => Err(VqmlError::Config(format!(
            "n_qubits = {w} is smaller than the largest molecule ({max_atoms} atoms)"
        ))),
        Some(w) => Ok(w),
        None => Ok(max_atoms),
    }
}

/// Encoded input states for every molecule, one vector per fold.
fn encode_states(
    mols: &[MolGraph],
    splits: &[Split],
    run: &RunConfig,
    width: usize,
    sim: &Simulator,
) -> Result<Vec<Vec<Statevector>>, VqmlError> {
    let p = &run.encoding_params;
    match run.encoding {
        Encoding::Qmse => {
            let states = mols
                .iter()
                .map(|g| Ok(sim.run(&build_qmse_circuit_on(&build_matrix(g, p), p, width)?)?))
                .collect::<Result<Vec<_>, VqmlError>>()?;
            Ok(vec![states; splits.len()])
        }
        Encoding::Fingerprint => {
            let fps = mols
                .iter()
                .map(|g| Ok(topological_fingerprint(g, run.fingerprint.nbits, run.fingerprint.max_path)?.to_f64()))
                .collect::<Result<Vec<_>, VqmlError>>()?;
            splits
                .iter()
                .map(|s| {
                    let rows: Vec<Vec<f64>> = s.train.iter().map(|&i| fps[i].clone()).collect();
                    // Fewer components than qubits when the training rank is
                    // low; the remaining qubits get no rotation.
                    let k = width.min(numerical_rank(&rows));
                    let model = if k > 0 { Some(pca_fit_dense(&rows, k)?) } else { None };
                    fps.iter()
                        .map(|x| {
                            let angles = match &model {
                                Some(m) => m
                                    .project(x)?
                                    .iter()
                                    .zip(&m.per_feature_range)
                                    .map(|(&c, &(lo, hi))| scale_to_angle(c, lo, hi))
                                    .collect(),
                                None => Vec::new(),
                            };
                            Ok(sim.run(&build_angle_circuit(&angles, width, p.layers_x)?)?)
                        })
                        .collect::<Result<Vec<_>, VqmlError>>()
                })
                .collect()
        }
    }
}

fn outputs(
    ansatz: &ParamCircuit,
    params: &[f64],
    states: &[Statevector],
    idx: &[usize],
    obs: &PauliString,
) -> Vec<f64> {
    idx.iter()
        .map(|&i| {
            let mut s = states[i].clone();
            ansatz.apply(params, &mut s);
            s.expectation(obs).expect("observable width is checked")
        })
        .collect()
}

fn mse(out: &[f64], idx: &[usize], targets: &[f64]) -> f64 {
    out.iter().zip(idx).map(|(e, &i)| (e - targets[i]).powi(2)).sum::<f64>() / idx.len() as f64
}

struct Job {
    fold: usize,
    result: RestartResult,
    params: Vec<f64>,
    test_outputs: Vec<f64>,
}

fn train(
    mols: &[MolGraph],
    splits: &[Split],
    fold_targets: &[Vec<f64>],
    run: &RunConfig,
    scorer: &Scorer<'_>,
) -> Result<RunResult, VqmlError> {
    let sim = Simulator::from_env();
    let width = register_width(mols, run)?;
    sim.check_width(width)?;
    let observable = run.observable.clone().unwrap_or_else(|| PauliString::all_z(width));
    if observable.width() != width {
        return Err(VqmlError::Config(format!(
            "observable {observable} has width {}, register has {width} qubits",
            observable.width()
        )));
    }
    let states = encode_states(mols, splits, run, width, &sim)?;
    let ansatz = build_ansatz(width, &run.ansatz());
    let opts = run.minimize_options();

    let n_jobs = splits.len() * run.n_restarts;
    let jobs: Vec<Result<Job, VqmlError>> = exec::map_range(n_jobs, |j| {
        let (fold, restart) = (j / run.n_restarts, j % run.n_restarts);
        let split = &splits[fold];
        let (states, targets) = (&states[fold], &fold_targets[fold]);
        let seed = job_seed(run.seed, fold, restart);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<f64> = (0..ansatz.n_params())
            .map(|_| rng.random_range(-TWO_PI..=TWO_PI))
            .collect();
        let objective = |theta: &[f64]| {
            let out = outputs(&ansatz, theta, states, &split.train, &observable);
            mse(&out, &split.train, targets)
        };
        let r = minimize(objective, &x0, &opts)?;
        let train_out = outputs(&ansatz, &r.x, states, &split.train, &observable);
        let test_out = outputs(&ansatz, &r.x, states, &split.test, &observable);
        Ok(Job {
            fold,
            result: RestartResult {
                restart,
                seed,
                final_loss: r.f,
                train_score: scorer.score(fold, &split.train, &train_out),
                test_score: scorer.score(fold, &split.test, &test_out),
                n_evals: r.n_evals,
                trace: r.trace,
            },
            params: r.x,
            test_outputs: test_out,
        })
    });
    let jobs = jobs.into_iter().collect::<Result<Vec<_>, _>>()?;

    let pooled = |f: fn(&RestartResult) -> f64| Band::of(&jobs.iter().map(|j| f(&j.result)).collect::<Vec<_>>());
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by(|&a, &b| {
        jobs[a]
            .result
            .final_loss
            .total_cmp(&jobs[b].result.final_loss)
            .then(a.cmp(&b))
    });
    let m = &jobs[order[(order.len() - 1) / 2]];
    let median_model = MedianModel {
        fold: m.fold,
        restart: m.result.restart,
        final_loss: m.result.final_loss,
        params: m.params.clone(),
        test_predictions: splits[m.fold]
            .test
            .iter()
            .zip(&m.test_outputs)
            .map(|(&i, &e)| (i, scorer.predict(m.fold, e)))
            .collect(),
    };

    let train_score = pooled(|r| r.train_score);
    let test_score = pooled(|r| r.test_score);
    let final_loss = pooled(|r| r.final_loss);
    let mut folds: Vec<FoldResult> = splits
        .iter()
        .enumerate()
        .map(|(fold, s)| FoldResult {
            fold,
            train: s.train.clone(),
            test: s.test.clone(),
            restarts: Vec::with_capacity(run.n_restarts),
        })
        .collect();
    for j in jobs {
        folds[j.fold].restarts.push(j.result);
    }
    Ok(RunResult {
        task: run.task,
        encoding: run.encoding,
        n_molecules: mols.len(),
        n_qubits: width,
        n_params: ansatz.n_params(),
        folds,
        train_score,
        test_score,
        final_loss,
        median_model,
    })
}
