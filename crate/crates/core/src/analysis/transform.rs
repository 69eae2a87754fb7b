//! Exact Fourier transform between the time and frequency sides of a grid.
//!
//! `f^(omega) = q^{-M} sum_x f(x) conj(chi(omega x))` and
//! `f(x) = q^{-N} sum_omega f^(omega) chi(omega x)`.

use num_complex::Complex;

use super::function::SampledFunction;
use super::grid::{unit_root, Domain, Grid};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// How to evaluate the character sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformMethod {
    /// Direct O(n^2) character sum.
    Naive,
    /// Digit-by-digit factorisation over the group (Z/p)^{c(M+N)}.
    #[default]
    Fast,
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

pub fn fourier<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    fourier_with(f, TransformMethod::default())
}

pub fn fourier_with<T: Real>(
    f: &SampledFunction<T>,
    method: TransformMethod,
) -> Result<SampledFunction<T>> {
    if f.domain() != Domain::Time {
        return Err(Error::Usage("fourier expects a time-domain function".into()));
    }
    Ok(apply(f, method, Direction::Forward))
}

pub fn inv_fourier<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    inv_fourier_with(f, TransformMethod::default())
}

pub fn inv_fourier_with<T: Real>(
    f: &SampledFunction<T>,
    method: TransformMethod,
) -> Result<SampledFunction<T>> {
    if f.domain() != Domain::Frequency {
        return Err(Error::Usage("inv_fourier expects a frequency-domain function".into()));
    }
    Ok(apply(f, method, Direction::Inverse))
}

fn apply<T: Real>(
    f: &SampledFunction<T>,
    method: TransformMethod,
    dir: Direction,
) -> SampledFunction<T> {
    let grid = f.grid();
    let values = match method {
        TransformMethod::Naive => naive(grid, f.values(), dir),
        TransformMethod::Fast => fast(grid, f.values(), dir),
    };
    let (scale, out_domain) = match dir {
        Direction::Forward => (f.cell_measure(), Domain::Frequency),
        Direction::Inverse => (f.cell_measure(), Domain::Time),
    };
    let values = values.into_iter().map(|z| z * scale).collect();
    SampledFunction::new(grid, out_domain, values).expect("transform preserves length")
}

fn roots<T: Real>(p: u32, dir: Direction) -> Vec<Complex<T>> {
    (0..p)
        .map(|t| {
            let r = unit_root::<T>(p, t);
            match dir {
                Direction::Forward => r.conj(),
                Direction::Inverse => r,
            }
        })
        .collect()
}

/// Unscaled character sums, one output cell at a time.
fn naive<T: Real>(grid: &Grid, input: &[Complex<T>], dir: Direction) -> Vec<Complex<T>> {
    let roots = roots::<T>(grid.field().p(), dir);
    // pairing is symmetric under swapping the roles of the two sides
    (0..grid.len())
        .map(|out| {
            let mut acc = CompensatedSum::new();
            for (inp, &v) in input.iter().enumerate() {
                let t = match dir {
                    Direction::Forward => grid.pairing(out, inp),
                    Direction::Inverse => grid.pairing(inp, out),
                };
                acc.add(v * roots[t as usize]);
            }
            acc.total()
        })
        .collect()
}

/// Unscaled character sums factored one digit position at a time.
///
/// Input position `t` pairs with output position `M+N-1-t`, so the q-point
/// kernel is applied along every input axis and the digit order is reversed.
fn fast<T: Real>(grid: &Grid, input: &[Complex<T>], dir: Direction) -> Vec<Complex<T>> {
    let field = grid.field();
    let q = grid.q() as usize;
    let roots = roots::<T>(field.p(), dir);
    let kernel: Vec<Complex<T>> = (0..q * q)
        .map(|i| roots[field.pair_idx((i / q) as u32, (i % q) as u32) as usize])
        .collect();
    let mut data = input.to_vec();
    let mut gather = vec![Complex::new(T::zero(), T::zero()); q];
    let len = grid.len();
    for axis in 0..grid.levels() {
        let stride = grid.q_pow(axis);
        let block = stride * q;
        for base in (0..len).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (c, g) in gather.iter_mut().enumerate() {
                    *g = data[start + c * stride];
                }
                for d in 0..q {
                    let row = &kernel[d * q..(d + 1) * q];
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for c in 0..q {
                        acc += row[c] * gather[c];
                    }
                    data[start + d * stride] = acc;
                }
            }
        }
    }
    let l = grid.levels();
    let mut out = vec![Complex::new(T::zero(), T::zero()); len];
    for (idx, v) in data.into_iter().enumerate() {
        let mut rev = 0usize;
        for t in 0..l {
            rev += grid.digit_at(idx, t) as usize * grid.q_pow(l - 1 - t);
        }
        out[rev] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldSpec;
    use crate::analysis::function::point_mass;
    use std::sync::Arc;

    fn grid(p: u32, m: u32, n: u32) -> Grid {
        Grid::new(Arc::new(FieldSpec::prime(p).unwrap()), m, n).unwrap()
    }

    fn close(a: &SampledFunction<f64>, b: &SampledFunction<f64>, tol: f64) -> bool {
        a.domain() == b.domain()
            && a.values().iter().zip(b.values()).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn integer_ring_is_self_dual() {
        for (p, m, n) in [(2, 3, 3), (3, 2, 2), (2, 2, 4), (5, 1, 2)] {
            let g = grid(p, m, n);
            let d_time = SampledFunction::<f64>::ball(&g, Domain::Time, 0).unwrap();
            let d_freq = SampledFunction::<f64>::ball(&g, Domain::Frequency, 0).unwrap();
            for method in [TransformMethod::Naive, TransformMethod::Fast] {
                assert!(close(&fourier_with(&d_time, method).unwrap(), &d_freq, 1e-13));
                assert!(close(&inv_fourier_with(&d_freq, method).unwrap(), &d_time, 1e-13));
            }
        }
    }

    #[test]
    fn zero_and_point_mass() {
        let g = grid(2, 3, 3);
        let z = SampledFunction::<f64>::zeros(&g, Domain::Time);
        assert!(fourier(&z).unwrap().values().iter().all(|v| v.norm() == 0.0));
        let delta = point_mass::<f64>(&g, 0);
        let ones = SampledFunction::from_fn(&g, Domain::Frequency, |_| Complex::new(1.0, 0.0));
        assert!(close(&fourier(&delta).unwrap(), &ones, 1e-14));
    }

    #[test]
    fn wrong_domain_is_rejected() {
        let g = grid(2, 1, 1);
        let f = SampledFunction::<f64>::zeros(&g, Domain::Frequency);
        assert!(fourier(&f).is_err());
        assert!(inv_fourier(&f.to_time()).is_err());
    }

    #[test]
    fn single_precision_roundtrip() {
        let g = grid(3, 2, 2);
        let f = SampledFunction::<f32>::from_fn(&g, Domain::Time, |i| {
            Complex::new((i as f32 * 0.37).sin(), (i as f32 * 0.11).cos())
        });
        let back = inv_fourier(&fourier(&f).unwrap()).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-4);
        }
    }
}
