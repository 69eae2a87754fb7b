//! Small dense Hermitian eigenvalue routines for Gram spectra.

use num_complex::Complex;

use crate::scalar::Real;

/// A dense Hermitian matrix stored row-major.
#[derive(Clone, Debug)]
pub struct Hermitian<T> {
    n: usize,
    a: Vec<Complex<T>>,
}

impl<T: Real> Hermitian<T> {
    /// Wraps `n x n` row-major entries; only the upper triangle is trusted and
    /// the lower one is rebuilt from it.
    pub fn new(n: usize, mut a: Vec<Complex<T>>) -> Self {
        assert_eq!(a.len(), n * n, "matrix storage does not match its order");
        for i in 0..n {
            a[i * n + i] = Complex::new(a[i * n + i].re, T::zero());
            for j in i + 1..n {
                a[j * n + i] = a[i * n + j].conj();
            }
        }
        Self { n, a }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.a[i * self.n + j]
    }

    fn apply(&self, x: &[Complex<T>], out: &mut [Complex<T>]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.a[i * self.n..(i + 1) * self.n];
            let mut acc = Complex::new(T::zero(), T::zero());
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
    }

    /// Largest eigenvalue by power iteration, stopped once the Rayleigh
    /// quotient changes by less than `rel_tol` relative. The matrix is assumed
    /// positive semidefinite.
    pub fn power_max(&self, rel_tol: T, max_iter: usize) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        // deterministic start with components in every direction
        let mut x: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let t = T::from_usize_lossy(i + 1);
                Complex::new(T::one() + (t * T::from_f64_lossy(0.618_034)).sin() * T::from_f64_lossy(0.5), T::zero())
            })
            .collect();
        normalize(&mut x);
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        let mut lambda = T::zero();
        for _ in 0..max_iter {
            self.apply(&x, &mut y);
            let rq = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a.conj() * b).re)
                .fold(T::zero(), |s, v| s + v);
            let norm = normalize(&mut y);
            if norm == T::zero() {
                return T::zero();
            }
            std::mem::swap(&mut x, &mut y);
            if (rq - lambda).abs() <= rel_tol * rq.abs() {
                return rq;
            }
            lambda = rq;
        }
        lambda
    }

    /// All eigenvalues in increasing order by the cyclic Jacobi method.
    pub fn eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut a = self.a.clone();
        let frob: T = a.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, v| s + v);
        let eps = T::epsilon() * T::epsilon() * frob;
        for _sweep in 0..64 {
            let off: T = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j].norm_sqr())
                .fold(T::zero(), |s, v| s + v);
            if off <= eps {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, n, p, q);
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        ev
    }
}

fn normalize<T: Real>(x: &mut [Complex<T>]) -> T {
    let norm = x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, v| s + v).sqrt();
    if norm > T::zero() {
        for z in x.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// One Jacobi rotation annihilating entry `(p, q)`.
///
/// With `a_pq = |b| e^{i phi}` the unitary `U = diag(1, e^{-i phi}) R(theta)`
/// on the `(p, q)` plane makes the block real and then diagonalizes it.
fn rotate<T: Real>(a: &mut [Complex<T>], n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let mag = b.norm();
    if mag == T::zero() {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let two = T::one() + T::one();
    let theta = (two * mag).atan2(aqq - app) / two;
    let (s, c) = theta.sin_cos();
    let phase = b / mag; // e^{i phi}
    let phase_c = phase.conj();
    // columns: A <- A U
    for r in 0..n {
        let xp = a[r * n + p];
        let xq = a[r * n + q];
        a[r * n + p] = xp * c - xq * phase_c * s;
        a[r * n + q] = xp * s + xq * phase_c * c;
    }
    // rows: A <- U^* A
    for col in 0..n {
        let xp = a[p * n + col];
        let xq = a[q * n + col];
        a[p * n + col] = xp * c - xq * phase * s;
        a[q * n + col] = xp * s + xq * phase * c;
    }
    a[p * n + q] = Complex::new(T::zero(), T::zero());
    a[q * n + p] = Complex::new(T::zero(), T::zero());
    a[p * n + p] = Complex::new(a[p * n + p].re, T::zero());
    a[q * n + q] = Complex::new(a[q * n + q].re, T::zero());
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_and_two_by_two() {
        let d = Hermitian::new(
            3,
            vec![
                Complex::new(3.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(2.0, 0.0),
            ],
        );
        assert_eq!(d.eigenvalues(), vec![1.0, 2.0, 3.0]);
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let h = Hermitian::<f64>::new(
            2,
            vec![Complex::new(2.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0), Complex::new(2.0, 0.0)],
        );
        let ev = h.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        assert!((h.power_max(1e-12, 1000) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn random_gram_matches_trace_and_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, m) = (12, 5);
        let v: Vec<Complex<f64>> = (0..n * m)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut g = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = (0..m).map(|t| v[i * m + t] * v[j * m + t].conj()).sum();
            }
        }
        let h = Hermitian::new(n, g);
        let ev = h.eigenvalues();
        let trace: f64 = (0..n).map(|i| h.get(i, i).re).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
        // rank m: the n - m smallest vanish
        assert!(ev[..n - m].iter().all(|e| e.abs() < 1e-10));
        assert!(ev[n - m] > 1e-3);
        let top = h.power_max(1e-12, 10_000);
        assert!((top - ev[n - 1]).abs() < 1e-6 * ev[n - 1]);
    }
}
