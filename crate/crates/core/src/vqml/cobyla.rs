//! Derivative-free minimization with linear models on a simplex.
//!
//! The method follows the unconstrained core of Powell's COBYLA: the
//! objective is interpolated linearly on `d + 1` points. Each step moves a
//! distance `rho` against the model gradient. A step that fails to improve
//! may instead repair the simplex geometry, and `rho` halves once neither
//! kind of step helps. Two additions speed up progress along curved
//! valleys:
//!
//! * after a step that realizes at least 75% of the predicted reduction the
//!   radius doubles (capped at `4 · rho_begin`);
//! * after each successful step the point `x_k + (x_k − x_{k−2})` is tried
//!   and kept when it improves on the step just taken.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeOptions {
    /// Budget of objective evaluations.
    pub max_evals: usize,
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_evals: 1000,
            rho_begin: 1.0,
            rho_end: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub n_evals: usize,
    /// Best value seen after each evaluation, so nonincreasing.
    pub trace: Vec<f64>,
    /// True when the radius reached `rho_end` before the budget ran out.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError {
    #[error("objective returned {value} at evaluation {eval} (x = {x:?})")]
    NonFinite { eval: usize, x: Vec<f64>, value: f64 },
    #[error("invalid optimizer settings: {0}")]
    BadOptions(String),
}

struct Evaluator<F> {
    f: F,
    n: usize,
    max: usize,
    best_x: Vec<f64>,
    best_f: f64,
    trace: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<F> {
    fn exhausted(&self) -> bool {
        self.n >= self.max
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64, OptimizeError> {
        self.n += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(OptimizeError::NonFinite {
                eval: self.n,
                x: x.to_vec(),
                value: v,
            });
        }
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best_f);
        Ok(v)
    }
}

/// Simplex displacements (rows) and their inverse, kept in step.
struct Simplex {
    n: usize,
    /// Row `j` is vertex `j` minus the base point.
    sim: Vec<f64>,
    /// Inverse of `sim` as an n×n matrix.
    simi: Vec<f64>,
    updates: usize,
}

impl Simplex {
    fn new(n: usize, rho: f64) -> Self {
        let mut sim = vec![0.0; n * n];
        let mut simi = vec![0.0; n * n];
        for j in 0..n {
            sim[j * n + j] = rho;
            simi[j * n + j] = 1.0 / rho;
        }
        Simplex {
            n,
            sim,
            simi,
            updates: 0,
        }
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.sim[j * self.n..(j + 1) * self.n]
    }

    fn simi_col(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.simi[i * self.n + j]).collect()
    }

    /// Makes vertex `jb` the base: other rows shift by `-d`, row `jb`
    /// becomes `-d`. The inverse changes in column `jb` only.
    fn rebase(&mut self, jb: usize) {
        let n = self.n;
        let d = self.row(jb).to_vec();
        for j in 0..n {
            for i in 0..n {
                self.sim[j * n + i] -= d[i];
            }
        }
        for i in 0..n {
            self.sim[jb * n + i] = -d[i];
        }
        for i in 0..n {
            let s: f64 = (0..n).map(|k| self.simi[i * n + k]).sum();
            self.simi[i * n + jb] = -s;
        }
    }

    /// Replaces row `j` by `v`, updating the inverse with Sherman-Morrison.
    /// Falls back to a full inversion periodically or when the update is
    /// ill-conditioned. Returns false when the new simplex is singular.
    fn replace(&mut self, j: usize, v: &[f64]) -> bool {
        let n = self.n;
        let u: Vec<f64> = v.iter().zip(self.row(j)).map(|(a, b)| a - b).collect();
        self.sim[j * n..(j + 1) * n].copy_from_slice(v);
        self.updates += 1;
        // uᵀ simi
        let w: Vec<f64> = (0..n)
            .map(|c| (0..n).map(|k| u[k] * self.simi[k * n + c]).sum())
            .collect();
        let denom = 1.0 + w[j];
        if self.updates > n || denom.abs() < 1e-8 {
            return self.reinvert();
        }
        let col = self.simi_col(j);
        for r in 0..n {
            let f = col[r] / denom;
            for c in 0..n {
                self.simi[r * n + c] -= f * w[c];
            }
        }
        true
    }

    fn reinvert(&mut self) -> bool {
        self.updates = 0;
        let m = DMatrix::from_row_slice(self.n, self.n, &self.sim);
        match m.try_inverse() {
            Some(inv) => {
                for r in 0..self.n {
                    for c in 0..self.n {
                        self.simi[r * self.n + c] = inv[(r, c)];
                    }
                }
                true
            }
            None => false,
        }
    }
}

/// Minimizes `f` from `x0`. Returns the best point evaluated.
pub fn minimize<F>(f: F, x0: &[f64], opts: &MinimizeOptions) -> Result<MinimizeResult, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return Err(OptimizeError::BadOptions("empty starting point".into()));
    }
    if !(opts.rho_begin > 0.0 && opts.rho_end > 0.0 && opts.rho_end <= opts.rho_begin) {
        return Err(OptimizeError::BadOptions(format!(
            "need 0 < rho_end <= rho_begin, got {} and {}",
            opts.rho_end, opts.rho_begin
        )));
    }
    if opts.max_evals == 0 {
        return Err(OptimizeError::BadOptions("max_evals must be at least 1".into()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(OptimizeError::BadOptions("starting point is not finite".into()));
    }

    let mut ev = Evaluator {
        f,
        n: 0,
        max: opts.max_evals,
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
        trace: Vec::with_capacity(opts.max_evals),
    };
    let converged = run(&mut ev, x0, opts)?;
    Ok(MinimizeResult {
        x: ev.best_x,
        f: ev.best_f,
        n_evals: ev.n,
        trace: ev.trace,
        converged,
    })
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn run<F: FnMut(&[f64]) -> f64>(
    ev: &mut Evaluator<F>,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> Result<bool, OptimizeError> {
    let n = x0.len();
    let mut rho = opts.rho_begin;
    let mut base = x0.to_vec();
    let mut fb = ev.eval(&base)?;
    let (mut s, mut fs) = match initial_simplex(ev, &mut base, &mut fb, rho)? {
        Some(v) => v,
        None => return Ok(false),
    };

    let mut success = false;
    let mut hist: Vec<Vec<f64>> = Vec::new();
    while !ev.exhausted() {
        let jb = (0..n).fold(None, |best: Option<usize>, j| match best {
            Some(b) if fs[b] <= fs[j] => Some(b),
            _ => Some(j),
        });
        if let Some(jb) = jb.filter(|&j| fs[j] < fb) {
            base = add(&base, s.row(jb));
            s.rebase(jb);
            std::mem::swap(&mut fs[jb], &mut fb);
        }

        let df: Vec<f64> = fs.iter().map(|v| v - fb).collect();
        let g: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|c| s.simi[r * n + c] * df[c]).sum())
            .collect();
        let vsig: Vec<f64> = (0..n).map(|j| 1.0 / norm(&s.simi_col(j))).collect();
        let veta: Vec<f64> = (0..n).map(|j| norm(s.row(j))).collect();
        let too_long = veta.iter().any(|&v| v > BETA * rho);
        let acceptable = !(vsig.iter().any(|&v| v < ALPHA * rho) || too_long);

        if !success && !acceptable {
            let jd = if too_long { argmax(&veta) } else { argmin(&vsig) };
            let mut dx: Vec<f64> = s.simi_col(jd).iter().map(|v| GAMMA * rho * vsig[jd] * v).collect();
            if g.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>() > 0.0 {
                dx.iter_mut().for_each(|v| *v = -*v);
            }
            let fnew = ev.eval(&add(&base, &dx))?;
            if !s.replace(jd, &dx) {
                return restart(ev, opts, rho);
            }
            fs[jd] = fnew;
            continue;
        }

        let gn = norm(&g);
        if gn > 0.0 {
            let dx: Vec<f64> = g.iter().map(|v| -rho * v / gn).collect();
            let xnew = add(&base, &dx);
            let fnew = ev.eval(&xnew)?;
            let trured = fb - fnew;
            let prerem = rho * gn;

            // Barycentric weights of the trial point pick the vertex to drop.
            let coords: Vec<f64> = (0..n)
                .map(|c| (0..n).map(|r| dx[r] * s.simi[r * n + c]).sum())
                .collect();
            let mut ratio = if trured > 0.0 { 0.0 } else { 1.0 };
            let mut jd = None;
            for (j, c) in coords.iter().enumerate() {
                if c.abs() > ratio {
                    jd = Some(j);
                    ratio = c.abs();
                }
            }
            let mut edge = DELTA * rho;
            let mut far = None;
            for j in 0..n {
                let sigbar = coords[j].abs() * vsig[j];
                if sigbar >= ALPHA * rho || sigbar >= vsig[j] {
                    let t = if trured > 0.0 {
                        norm(&dx.iter().zip(s.row(j)).map(|(a, b)| a - b).collect::<Vec<_>>())
                    } else {
                        veta[j]
                    };
                    if t > edge {
                        far = Some(j);
                        edge = t;
                    }
                }
            }
            let jd = far.or(jd);
            if let Some(jd) = jd {
                if !s.replace(jd, &dx) {
                    return restart(ev, opts, rho);
                }
                fs[jd] = fnew;
            }
            if trured > 0.0 && trured >= 0.1 * prerem {
                success = true;
                if trured >= 0.75 * prerem {
                    rho = (2.0 * rho).min(4.0 * opts.rho_begin);
                }
                hist.push(xnew.clone());
                if let (Some(jd), true) = (jd, hist.len() >= 3) {
                    if ev.exhausted() {
                        break;
                    }
                    let back = &hist[hist.len() - 3];
                    let xp: Vec<f64> = xnew.iter().zip(back).map(|(a, b)| 2.0 * a - b).collect();
                    let fp = ev.eval(&xp)?;
                    if fp < fnew {
                        let d: Vec<f64> = xp.iter().zip(&base).map(|(a, b)| a - b).collect();
                        if !s.replace(jd, &d) {
                            return restart(ev, opts, rho);
                        }
                        fs[jd] = fp;
                        hist.push(xp);
                    }
                }
                continue;
            }
        }
        success = false;
        if !acceptable {
            continue;
        }
        if rho <= opts.rho_end {
            return Ok(true);
        }
        rho *= 0.5;
        if rho <= 1.5 * opts.rho_end {
            rho = opts.rho_end;
        }
    }
    Ok(false)
}

type Start = (Simplex, Vec<f64>);

fn initial_simplex<F: FnMut(&[f64]) -> f64>(
    ev: &mut Evaluator<F>,
    base: &mut Vec<f64>,
    fb: &mut f64,
    rho: f64,
) -> Result<Option<Start>, OptimizeError> {
    let n = base.len();
    let mut s = Simplex::new(n, rho);
    let mut fs = vec![0.0; n];
    for j in 0..n {
        if ev.exhausted() {
            return Ok(None);
        }
        let x = add(base, s.row(j));
        fs[j] = ev.eval(&x)?;
        if fs[j] < *fb {
            // The new point becomes the base; earlier rows are re-expressed.
            *base = x;
            std::mem::swap(&mut fs[j], fb);
            for i in 0..n {
                s.sim[j * n + i] = -s.sim[j * n + i];
            }
            let dj = s.row(j).to_vec();
            for r in 0..j {
                for i in 0..n {
                    s.sim[r * n + i] += dj[i];
                }
            }
        }
    }
    if !s.reinvert() {
        unreachable!("initial simplex is a signed, sheared scaled identity");
    }
    Ok(Some((s, fs)))
}

/// Rebuilds the simplex around the best point after a degenerate update.
fn restart<F: FnMut(&[f64]) -> f64>(
    ev: &mut Evaluator<F>,
    opts: &MinimizeOptions,
    rho: f64,
) -> Result<bool, OptimizeError> {
    let x = ev.best_x.clone();
    let opts = MinimizeOptions {
        rho_begin: rho.max(opts.rho_end),
        ..*opts
    };
    run(ev, &x, &opts)
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, j| if v[j] > v[b] { j } else { b })
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, j| if v[j] < v[b] { j } else { b })
}
