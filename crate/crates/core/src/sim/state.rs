use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{Gate, PauliString, SimError};

/// Registers at or above this width update amplitudes on the thread pool.
const PAR_MIN_QUBITS: usize = 14;
/// Fixed reduction block; partial sums are combined in block order so that
/// sequential and parallel reductions agree bit for bit.
const REDUCE_BLOCK: usize = 1 << 12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense state of `n` qubits. Qubit 0 is the least significant bit of the
/// amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Statevector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        chunked_sum(&self.amps, |a| a.norm_sqr()).sqrt()
    }

    fn parallel(&self) -> bool {
        crate::exec::PARALLEL && self.n_qubits >= PAR_MIN_QUBITS
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64, SimError> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::WidthMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let blocks = self.amps.len().div_ceil(REDUCE_BLOCK);
        let block = |k: usize| {
            let lo = k * REDUCE_BLOCK;
            let hi = (lo + REDUCE_BLOCK).min(self.amps.len());
            self.amps[lo..hi]
                .iter()
                .zip(&other.amps[lo..hi])
                .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
        };
        let partials: Vec<Complex64> = if self.parallel() {
            crate::exec::map_range(blocks, block)
        } else {
            (0..blocks).map(block).collect()
        };
        Ok(partials.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b))
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Statevector) -> Result<f64, SimError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Expectation of a Z/I string: Σ_z |a_z|² (−1)^{popcount(z & mask)}.
    pub fn expectation(&self, observable: &PauliString) -> Result<f64, SimError> {
        if observable.width() != self.n_qubits {
            return Err(SimError::WidthMismatch {
                left: self.n_qubits,
                right: observable.width(),
            });
        }
        let mask = observable.z_mask();
        let blocks = self.amps.len().div_ceil(REDUCE_BLOCK);
        let block = |k: usize| {
            let lo = k * REDUCE_BLOCK;
            let hi = (lo + REDUCE_BLOCK).min(self.amps.len());
            (lo..hi).fold(0.0, |acc, z| {
                let p = self.amps[z].norm_sqr();
                if (z as u64 & mask).count_ones().is_multiple_of(2) {
                    acc + p
                } else {
                    acc - p
                }
            })
        };
        let partials: Vec<f64> = if self.parallel() {
            crate::exec::map_range(blocks, block)
        } else {
            (0..blocks).map(block).collect()
        };
        Ok(partials.into_iter().sum())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        let n = self.n_qubits;
        let qs = gate.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(SimError::QubitOutOfRange { qubit: q, n_qubits: n });
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(SimError::RepeatedQubit(qs[0]));
        }
        self.apply_unchecked(gate);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        let par = self.parallel();
        let amps = &mut self.amps;
        match *gate {
            Gate::Rx { qubit, theta } => {
                let (c, s) = half(theta);
                pairs(amps, qubit, par, |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * c - I * s * y;
                    *a1 = y * c - I * s * x;
                });
            }
            Gate::Ry { qubit, theta } => {
                let (c, s) = half(theta);
                pairs(amps, qubit, par, |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * c - y * s;
                    *a1 = x * s + y * c;
                });
            }
            Gate::Rz { qubit, theta } => {
                let (c, s) = half(theta);
                let (p0, p1) = (Complex64::new(c, -s), Complex64::new(c, s));
                pairs(amps, qubit, par, |a0, a1| {
                    *a0 *= p0;
                    *a1 *= p1;
                });
            }
            Gate::X { qubit } => pairs(amps, qubit, par, std::mem::swap),
            Gate::Rxx { a, b, theta } => {
                let (c, s) = half(theta);
                let m = -I * s;
                quads(amps, a, b, par, |q| {
                    let [x00, x01, x10, x11] = [*q[0], *q[1], *q[2], *q[3]];
                    *q[0] = x00 * c + m * x11;
                    *q[3] = x11 * c + m * x00;
                    *q[1] = x01 * c + m * x10;
                    *q[2] = x10 * c + m * x01;
                });
            }
            Gate::Ryy { a, b, theta } => {
                let (c, s) = half(theta);
                let m = I * s;
                quads(amps, a, b, par, |q| {
                    let [x00, x01, x10, x11] = [*q[0], *q[1], *q[2], *q[3]];
                    *q[0] = x00 * c + m * x11;
                    *q[3] = x11 * c + m * x00;
                    *q[1] = x01 * c - m * x10;
                    *q[2] = x10 * c - m * x01;
                });
            }
            Gate::Rzz { a, b, theta } => {
                let (c, s) = half(theta);
                let (even, odd) = (Complex64::new(c, -s), Complex64::new(c, s));
                quads(amps, a, b, par, |q| {
                    *q[0] *= even;
                    *q[3] *= even;
                    *q[1] *= odd;
                    *q[2] *= odd;
                });
            }
            Gate::Cz { a, b } => quads(amps, a, b, par, |q| *q[3] = -*q[3]),
            Gate::Cnot { control, target } => {
                // q[k] has bit (k & 1) on `control` and bit (k >> 1) on `target`.
                quads(amps, control, target, par, |[_, q1, _, q3]| std::mem::swap(q1, q3));
            }
            Gate::Crx { control, target, theta } => {
                let (c, s) = half(theta);
                quads(amps, control, target, par, |q| {
                    let (x, y) = (*q[1], *q[3]);
                    *q[1] = x * c - I * s * y;
                    *q[3] = y * c - I * s * x;
                });
            }
        }
    }
}

fn half(theta: f64) -> (f64, f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    (c, s)
}

fn chunked_sum<F: Fn(&Complex64) -> f64>(amps: &[Complex64], f: F) -> f64 {
    amps.chunks(REDUCE_BLOCK).map(|c| c.iter().map(&f).sum::<f64>()).sum()
}

/// Calls `f(a0, a1)` for every amplitude pair differing only in bit `q`.
fn pairs<F>(amps: &mut [Complex64], q: usize, par: bool, f: F)
where
    F: Fn(&mut Complex64, &mut Complex64) + Sync + Send,
{
    let stride = 1usize << q;
    let body = |chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(stride);
        lo.iter_mut().zip(hi.iter_mut()).for_each(|(a, b)| f(a, b));
    };
    #[cfg(feature = "parallel")]
    if par {
        let n_chunks = amps.len() / (2 * stride);
        if n_chunks >= 64 {
            amps.par_chunks_mut(2 * stride).for_each(body);
        } else {
            for chunk in amps.chunks_mut(2 * stride) {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| f(a, b));
            }
        }
        return;
    }
    let _ = par;
    amps.chunks_mut(2 * stride).for_each(body);
}

/// Calls `f` on every group of four amplitudes that differ only in bits `p`
/// and `q`. `group[k]` has bit `k & 1` on qubit `p` and bit `k >> 1` on `q`.
fn quads<F>(amps: &mut [Complex64], p: usize, q: usize, par: bool, f: F)
where
    F: Fn([&mut Complex64; 4]) + Sync + Send,
{
    let (lo_q, hi_q) = if p < q { (p, q) } else { (q, p) };
    let (sl, sh) = (1usize << lo_q, 1usize << hi_q);
    // Map (bit on lo_q, bit on hi_q) slices back to (bit on p, bit on q).
    let swap = p > q;
    let call = |a00: &mut Complex64, a01: &mut Complex64, a10: &mut Complex64, a11: &mut Complex64| {
        // aXY: X = bit on hi_q, Y = bit on lo_q.
        if swap {
            f([a00, a10, a01, a11]);
        } else {
            f([a00, a01, a10, a11]);
        }
    };
    let inner = |h0: &mut [Complex64], h1: &mut [Complex64]| {
        for (c0, c1) in h0.chunks_mut(2 * sl).zip(h1.chunks_mut(2 * sl)) {
            let (x00, x01) = c0.split_at_mut(sl);
            let (x10, x11) = c1.split_at_mut(sl);
            for k in 0..sl {
                call(&mut x00[k], &mut x01[k], &mut x10[k], &mut x11[k]);
            }
        }
    };
    #[cfg(feature = "parallel")]
    if par {
        let outer = amps.len() / (2 * sh);
        let mid = sh / (2 * sl);
        if outer >= 64 {
            amps.par_chunks_mut(2 * sh).for_each(|chunk| {
                let (h0, h1) = chunk.split_at_mut(sh);
                inner(h0, h1);
            });
        } else if mid >= 64 {
            for chunk in amps.chunks_mut(2 * sh) {
                let (h0, h1) = chunk.split_at_mut(sh);
                h0.par_chunks_mut(2 * sl)
                    .zip(h1.par_chunks_mut(2 * sl))
                    .for_each(|(c0, c1)| {
                        let (x00, x01) = c0.split_at_mut(sl);
                        let (x10, x11) = c1.split_at_mut(sl);
                        for k in 0..sl {
                            call(&mut x00[k], &mut x01[k], &mut x10[k], &mut x11[k]);
                        }
                    });
            }
        } else {
            for chunk in amps.chunks_mut(2 * sh) {
                let (h0, h1) = chunk.split_at_mut(sh);
                for (c0, c1) in h0.chunks_mut(2 * sl).zip(h1.chunks_mut(2 * sl)) {
                    let (x00, x01) = c0.split_at_mut(sl);
                    let (x10, x11) = c1.split_at_mut(sl);
                    x00.par_iter_mut()
                        .zip(x01.par_iter_mut())
                        .zip(x10.par_iter_mut().zip(x11.par_iter_mut()))
                        .for_each(|((a, b), (c, d))| call(a, b, c, d));
                }
            }
        }
        return;
    }
    let _ = par;
    for chunk in amps.chunks_mut(2 * sh) {
        let (h0, h1) = chunk.split_at_mut(sh);
        inner(h0, h1);
    }
}
