//! Lattice periodization and bracket products.

use num_complex::Complex;

use super::function::SampledFunction;
use super::grid::{Domain, Grid};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// A function on the frequency cells of the ring of integers `D`, i.e. one
/// period of a lattice-periodic function. Index `r` is the cell
/// [`Grid::integer_cell`]`(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction<T> {
    grid: Grid,
    values: Vec<Complex<T>>,
}

impl<T: Real> PeriodicFunction<T> {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// `integral over D`.
    pub fn integrate(&self) -> Complex<T> {
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        acc.total() * self.grid.cell_measure::<T>(Domain::Frequency)
    }

    /// Extends one period to the whole frequency grid.
    pub fn extend(&self) -> SampledFunction<T> {
        let g = &self.grid;
        let block = g.q_pow(g.m());
        SampledFunction::from_fn(g, Domain::Frequency, |idx| self.values[idx / block])
    }
}

fn lattice_sum<T: Real>(
    grid: &Grid,
    term: impl Fn(usize) -> Complex<T>,
) -> PeriodicFunction<T> {
    let translates = grid.q_pow(grid.m()) as u64;
    let values = (0..grid.integer_cells())
        .map(|r| {
            let base = grid.integer_cell(r);
            let mut acc = CompensatedSum::new();
            for k in 0..translates {
                let cell = grid.freq_translate(base, k).expect("k < q^M stays on the grid");
                acc.add(term(cell));
            }
            acc.total()
        })
        .collect();
    PeriodicFunction {
        grid: grid.clone(),
        values,
    }
}

fn frequency_only<T: Real>(f: &SampledFunction<T>) -> Result<()> {
    if f.domain() != Domain::Frequency {
        return Err(Error::Usage("expected a frequency-domain function".into()));
    }
    Ok(())
}

/// `omega -> sum_k F(omega + u(k))` on `D`, over every translate on the grid.
pub fn periodize<T: Real>(f: &SampledFunction<T>) -> Result<PeriodicFunction<T>> {
    frequency_only(f)?;
    Ok(lattice_sum(f.grid(), |cell| f.value(cell)))
}

/// `[F, G]_s(omega) = sum_k F(omega+u(k)) conj(G(omega+u(k))) (1+|omega+u(k)|^2)^s`.
///
/// Weights are the exact cell averages of [`Grid::sobolev_weight`], so
/// `integral over D of [F, F]_s` equals `||F||_{H^s}^2`.
pub fn bracket<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    s: T,
) -> Result<PeriodicFunction<T>> {
    frequency_only(f)?;
    frequency_only(g)?;
    if f.grid() != g.grid() {
        return Err(Error::Usage("bracket of functions on different grids".into()));
    }
    let grid = f.grid();
    Ok(lattice_sum(grid, |cell| {
        f.value(cell) * g.value(cell).conj() * grid.sobolev_weight(cell, s)
    }))
}
