use num_complex::Complex;

use super::grid::{Domain, Grid};
use super::transform::{self, TransformMethod};
use crate::error::{Error, Result};
use crate::local_field::KNumber;
use crate::scalar::{csum, rsum, Real};

/// A complex function on the cells of one side of a [`Grid`].
///
/// Such a function is locally constant and compactly supported, so it is an
/// exact element of L^2(K), not a sampled approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T> {
    grid: Grid,
    domain: Domain,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: &Grid, domain: Domain, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Range(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            domain,
            values,
        })
    }

    pub fn zeros(grid: &Grid, domain: Domain) -> Self {
        Self {
            grid: grid.clone(),
            domain,
            values: vec![Complex::new(T::zero(), T::zero()); grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid, domain: Domain, f: impl Fn(usize) -> Complex<T>) -> Self {
        Self {
            grid: grid.clone(),
            domain,
            values: (0..grid.len()).map(f).collect(),
        }
    }

    /// Indicator of the cells whose canonical representative satisfies `region`.
    pub fn indicator(grid: &Grid, domain: Domain, region: impl Fn(&KNumber) -> bool) -> Self {
        Self::from_fn(grid, domain, |idx| {
            if region(&grid.point(domain, idx)) {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// `Phi_k`, the indicator of `p^k D = {|x| <= q^{-k}}`.
    ///
    /// Only balls that are unions of cells inside the window are accepted.
    pub fn ball(grid: &Grid, domain: Domain, k: i64) -> Result<Self> {
        let (fine, coarse) = match domain {
            Domain::Time => (grid.m() as i64, -(grid.n() as i64)),
            Domain::Frequency => (grid.n() as i64, -(grid.m() as i64)),
        };
        if k > fine || k < coarse {
            return Err(Error::Range(format!(
                "ball p^{k}D is not a union of {domain:?} cells (powers {coarse}..{fine})"
            )));
        }
        Ok(Self::indicator(grid, domain, |x| {
            x.is_zero() || x.lo() >= k
        }))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn value(&self, idx: usize) -> Complex<T> {
        self.values[idx]
    }

    pub fn cell_measure(&self) -> T {
        self.grid.cell_measure(self.domain)
    }

    pub fn map(&self, f: impl Fn(usize, Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            domain: self.domain,
            values: self.values.iter().enumerate().map(|(i, &z)| f(i, z)).collect(),
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        self.map(|_, z| z * factor)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Usage("functions live on different grids".into()));
        }
        if self.domain != other.domain {
            return Err(Error::Usage(format!(
                "cannot pair a {:?} function with a {:?} function",
                self.domain, other.domain
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.map(|i, z| z + other.values[i]))
    }

    /// Haar integral: cell measure times the compensated sum of values.
    pub fn integrate(&self) -> Complex<T> {
        csum(self.values.iter().copied()) * self.cell_measure()
    }

    /// `integral f conj(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.compatible(other)?;
        let s = csum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b.conj()),
        );
        Ok(s * self.cell_measure())
    }

    pub fn norm_sqr(&self) -> T {
        rsum(self.values.iter().map(|z| z.norm_sqr())) * self.cell_measure()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Transform to the frequency side; frequency-domain input is returned as is.
    pub fn to_frequency(&self) -> Self {
        match self.domain {
            Domain::Frequency => self.clone(),
            Domain::Time => transform::fourier(self).expect("time-domain input"),
        }
    }

    pub fn to_time(&self) -> Self {
        match self.domain {
            Domain::Time => self.clone(),
            Domain::Frequency => transform::inv_fourier(self).expect("frequency-domain input"),
        }
    }

    pub fn fourier(&self) -> Result<Self> {
        transform::fourier(self)
    }

    pub fn fourier_with(&self, method: TransformMethod) -> Result<Self> {
        transform::fourier_with(self, method)
    }

    pub fn inv_fourier(&self) -> Result<Self> {
        transform::inv_fourier(self)
    }

    /// `||f||_{H^s}^2 = integral |f^(omega)|^2 (1 + |omega|^2)^s d omega`.
    pub fn sobolev_norm_sqr(&self, s: T) -> T {
        let spec = self.to_frequency();
        let terms = spec
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| z.norm_sqr() * self.grid.sobolev_weight(i, s));
        rsum(terms) * spec.cell_measure()
    }

    pub fn sobolev_norm(&self, s: T) -> T {
        self.sobolev_norm_sqr(s).sqrt()
    }
}

/// Time-domain point mass `q^M 1_{cell}`, the grid's approximate identity.
pub fn point_mass<T: Real>(grid: &Grid, cell: usize) -> SampledFunction<T> {
    let h = T::one() / grid.cell_measure::<T>(Domain::Time);
    SampledFunction::from_fn(grid, Domain::Time, |i| {
        if i == cell {
            Complex::new(h, T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}
