use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{EncodeError, Fingerprint};

/// Eigenvalues below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Unit-norm principal directions, strongest first. Each is signed so
    /// that its largest-magnitude entry is positive.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    /// (min, max) of each coordinate over the training rows.
    pub per_feature_range: Vec<(f64, f64)>,
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, EncodeError> {
        if x.len() != self.dim() {
            return Err(EncodeError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((c, x), m)| c * (x - m)).sum())
            .collect())
    }
}

/// Number of eigenvalues of the centered data treated as nonzero.
pub fn numerical_rank(rows: &[Vec<f64>]) -> usize {
    match centered_eigen(rows) {
        Some((vals, _, _, _)) => rank_of(&vals),
        None => 0,
    }
}

pub fn pca_fit(rows: &[Fingerprint], k: usize) -> Result<PcaModel, EncodeError> {
    let dense: Vec<Vec<f64>> = rows.iter().map(Fingerprint::to_f64).collect();
    pca_fit_dense(&dense, k)
}

pub fn pca_project(model: &PcaModel, fp: &Fingerprint) -> Result<Vec<f64>, EncodeError> {
    model.project(&fp.to_f64())
}

/// PCA through the eigendecomposition of the M×M Gram matrix of the centered
/// rows, which is cheap when there are far fewer rows than features.
pub fn pca_fit_dense(rows: &[Vec<f64>], k: usize) -> Result<PcaModel, EncodeError> {
    if k == 0 {
        return Err(EncodeError::Pca("k must be at least 1".into()));
    }
    if rows.len() < k {
        return Err(EncodeError::Pca(format!(
            "{} rows cannot give {k} components",
            rows.len()
        )));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(EncodeError::Pca("rows have different lengths".into()));
    }
    let (vals, vecs, x, mean) = centered_eigen(rows).expect("rows are non-empty");
    let rank = rank_of(&vals);
    if k > rank {
        return Err(EncodeError::Pca(format!("k = {k} exceeds the data rank {rank}")));
    }

    let m = rows.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let lambda = vals[i];
        let v = x.tr_mul(&vecs.column(i)) / lambda.sqrt();
        let mut v: Vec<f64> = v.iter().copied().collect();
        let pivot = v
            .iter()
            .enumerate()
            .fold(0, |best, (j, x)| if x.abs() > v[best].abs() { j } else { best });
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        explained_variance.push(lambda / (m as f64 - 1.0));
    }

    let mut model = PcaModel {
        mean,
        components,
        explained_variance,
        per_feature_range: Vec::new(),
    };
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); k];
    for r in rows {
        for (range, c) in ranges.iter_mut().zip(model.project(r)?) {
            range.0 = range.0.min(c);
            range.1 = range.1.max(c);
        }
    }
    model.per_feature_range = ranges;
    Ok(model)
}

type Eigen = (Vec<f64>, DMatrix<f64>, DMatrix<f64>, Vec<f64>);

fn centered_eigen(rows: &[Vec<f64>]) -> Option<Eigen> {
    let m = rows.len();
    if m == 0 {
        return None;
    }
    let dim = rows[0].len();
    let mut mean = vec![0.0; dim];
    for r in rows {
        mean.iter_mut().zip(r).for_each(|(s, x)| *s += x);
    }
    mean.iter_mut().for_each(|s| *s /= m as f64);
    let x = DMatrix::from_fn(m, dim, |i, j| rows[i][j] - mean[j]);
    let gram = &x * x.transpose();
    let eig = SymmetricEigen::new(gram);
    Some((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors, x, mean))
}

fn rank_of(vals: &[f64]) -> usize {
    let max = vals.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    vals.iter().filter(|&&v| v > RANK_TOL * max).count()
}
