use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoldError {
    #[error("k must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("{n} samples cannot fill {k} folds")]
    TooFewSamples { n: usize, k: usize },
    #[error("class {class} has {count} sample(s); each class needs at least 2 so every training split contains it")]
    SmallClass { class: u8, count: usize },
    #[error("target {index} is not finite")]
    NonFiniteTarget { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Class-stratified folds. Each class is shuffled, then all classes are
/// dealt round-robin onto the folds with one running counter, which keeps
/// fold sizes within one of each other.
pub fn stratified_kfold_labels(labels: &[u8], k: usize, seed: u64) -> Result<Vec<Split>, FoldError> {
    check(labels.len(), k)?;
    let mut classes: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    if let Some((&class, members)) = classes.iter().find(|(_, m)| m.len() < 2) {
        return Err(FoldError::SmallClass {
            class,
            count: members.len(),
        });
    }
    Ok(deal(classes.into_values().collect(), labels.len(), k, seed))
}

/// Target-stratified folds. Samples sorted by target are cut into
/// `floor(n / k)` consecutive bins of at least `k` members (the last bin
/// takes the remainder); each bin then acts as a class.
pub fn stratified_kfold_targets(targets: &[f64], k: usize, seed: u64) -> Result<Vec<Split>, FoldError> {
    check(targets.len(), k)?;
    if let Some(index) = targets.iter().position(|t| !t.is_finite()) {
        return Err(FoldError::NonFiniteTarget { index });
    }
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| targets[a].total_cmp(&targets[b]).then(a.cmp(&b)));
    let n_bins = targets.len() / k;
    let bins = (0..n_bins)
        .map(|b| {
            let end = if b + 1 == n_bins { order.len() } else { (b + 1) * k };
            order[b * k..end].to_vec()
        })
        .collect();
    Ok(deal(bins, targets.len(), k, seed))
}

fn check(n: usize, k: usize) -> Result<(), FoldError> {
    if k < 2 {
        return Err(FoldError::TooFewFolds(k));
    }
    if n < k {
        return Err(FoldError::TooFewSamples { n, k });
    }
    Ok(())
}

fn deal(strata: Vec<Vec<usize>>, n: usize, k: usize, seed: u64) -> Vec<Split> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; n];
    let mut counter = 0;
    for mut members in strata {
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = counter % k;
            counter += 1;
        }
    }
    (0..k)
        .map(|f| Split {
            train: (0..n).filter(|&i| fold_of[i] != f).collect(),
            test: (0..n).filter(|&i| fold_of[i] == f).collect(),
        })
        .collect()
}
