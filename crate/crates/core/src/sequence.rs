//! Finitely supported sequences on the lattice `{u(n)}` and the translation,
//! modulation and wave packet operators acting on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;

use crate::analysis::{chi_n, unit_root, Domain, Grid, SampledFunction};
use crate::error::{Error, Result};
use crate::finite_field::FieldSpec;
use crate::local_field::{lattice_add, u_of_n};
use crate::scalar::{rsum, CompensatedSum, Real};

/// `z: {u(n)} -> C` with finite support, keyed by `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence<T> {
    field: Arc<FieldSpec>,
    values: BTreeMap<u64, Complex<T>>,
}

impl<T: Real> Sequence<T> {
    pub fn new(field: &Arc<FieldSpec>) -> Self {
        Self {
            field: field.clone(),
            values: BTreeMap::new(),
        }
    }

    pub fn from_pairs(
        field: &Arc<FieldSpec>,
        pairs: impl IntoIterator<Item = (u64, Complex<T>)>,
    ) -> Self {
        let mut z = Self::new(field);
        for (n, v) in pairs {
            z.set(n, v);
        }
        z
    }

    /// The unit sequence at `n`.
    pub fn delta(field: &Arc<FieldSpec>, n: u64) -> Self {
        Self::from_pairs(field, [(n, Complex::new(T::one(), T::zero()))])
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Sets `z(u(n))`; exact zeros are not stored.
    pub fn set(&mut self, n: u64, v: Complex<T>) {
        if v == Complex::new(T::zero(), T::zero()) {
            self.values.remove(&n);
        } else {
            self.values.insert(n, v);
        }
    }

    pub fn get(&self, n: u64) -> Complex<T> {
        self.values
            .get(&n)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Stored entries in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex<T>)> + '_ {
        self.values.iter().map(|(&n, &v)| (n, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.values.keys().next_back().copied()
    }

    pub fn norm_sqr(&self) -> T {
        rsum(self.values.values().map(|z| z.norm_sqr()))
    }

    /// `<z, w> = sum_n z(u(n)) conj(w(u(n)))`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut acc = CompensatedSum::new();
        for (n, v) in &self.values {
            if let Some(w) = other.values.get(n) {
                acc.add(v * w.conj());
            }
        }
        acc.total()
    }

    /// Largest entrywise distance to another sequence.
    pub fn max_distance(&self, other: &Self) -> T {
        let keys: std::collections::BTreeSet<u64> =
            self.values.keys().chain(other.values.keys()).copied().collect();
        keys.into_iter()
            .map(|n| (self.get(n) - other.get(n)).norm())
            .fold(T::zero(), T::max)
    }
}

/// Phase index of `chi(u(n) omega)` for an integer-ring frequency cell.
fn lattice_phase(grid: &Grid, n: u64, cell: usize) -> u32 {
    let field = grid.field();
    let q = field.q() as u64;
    let mut acc = 0u32;
    let mut rest = n;
    let mut t = 0u32;
    while rest > 0 {
        let b = (rest % q) as u32;
        if b != 0 {
            acc += field.pair_idx(b, grid.digit_at(cell, grid.m() + t));
        }
        rest /= q;
        t += 1;
    }
    acc % field.p()
}

/// `z^(omega) = sum_n z(u(n)) chi_{u(n)}(omega)` on the cells of `D`; the
/// result is a frequency-domain function vanishing off `D`.
pub fn seq_fourier<T: Real>(z: &Sequence<T>, grid: &Grid) -> Result<SampledFunction<T>> {
    if **z.field() != **grid.field() {
        return Err(Error::Usage("sequence and grid use different fields".into()));
    }
    let limit = grid.integer_cells() as u64;
    if let Some(n) = z.max_index().filter(|&n| n >= limit) {
        return Err(Error::Range(format!(
            "sequence index {n} exceeds the {limit} characters resolved by the grid"
        )));
    }
    let p = grid.field().p();
    let mut out = SampledFunction::zeros(grid, Domain::Frequency);
    for r in 0..grid.integer_cells() {
        let cell = grid.integer_cell(r);
        let mut acc = CompensatedSum::new();
        for (n, v) in z.iter() {
            acc.add(v * unit_root::<T>(p, lattice_phase(grid, n, cell)));
        }
        out.values_mut()[cell] = acc.total();
    }
    Ok(out)
}

/// `f^vee(u(n)) = integral over D of f conj(chi_{u(n)})` for `n < q^N`.
pub fn seq_inv_fourier<T: Real>(f: &SampledFunction<T>) -> Result<Sequence<T>> {
    if f.domain() != Domain::Frequency {
        return Err(Error::Usage("seq_inv_fourier expects a frequency-domain function".into()));
    }
    let grid = f.grid();
    let p = grid.field().p();
    let h = grid.cell_measure::<T>(Domain::Frequency);
    let mut z = Sequence::new(grid.field());
    for n in 0..grid.integer_cells() as u64 {
        let mut acc = CompensatedSum::new();
        for r in 0..grid.integer_cells() {
            let cell = grid.integer_cell(r);
            acc.add(f.value(cell) * unit_root::<T>(p, lattice_phase(grid, n, cell)).conj());
        }
        z.set(n, acc.total() * h);
    }
    Ok(z)
}

/// `T_{u(m)} z (u(n)) = z(u(n) - u(m))`.
pub fn seq_translate<T: Real>(z: &Sequence<T>, m: u64) -> Sequence<T> {
    let f = z.field().clone();
    Sequence::from_pairs(&f, z.iter().map(|(r, v)| (lattice_add(&f, r, m), v)))
}

/// `M_{u(k)} z (u(n)) = z(u(n)) conj(chi_{u(k)}(u(n)))`.
///
/// The character is trivial on the lattice, so this operator is the identity
/// on every sequence; it is evaluated rather than short-circuited.
pub fn seq_modulate<T: Real>(z: &Sequence<T>, k: u64) -> Sequence<T> {
    let f = z.field().clone();
    Sequence::from_pairs(
        &f,
        z.iter()
            .map(|(n, v)| (n, v * chi_n::<T>(k, &u_of_n(&f, n)).conj())),
    )
}

/// `W^j_{k,m} v = T_{p^j u(m)} M_{u(k)} v`.
///
/// The translation `p^j u(m)` must be a lattice point (always for `j <= 0`,
/// and for `j > 0` exactly when `q^j` divides `m`).
pub fn wave_packet_atom<T: Real>(v: &Sequence<T>, j: i64, k: u64, m: u64) -> Result<Sequence<T>> {
    let shift = u_of_n(v.field(), m).p_shift(j);
    let r = shift.lattice_index().ok_or_else(|| {
        Error::Domain(format!(
            "translation p^{j} u({m}) = {shift} is not a lattice point"
        ))
    })?;
    Ok(seq_translate(&seq_modulate(v, k), r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldSpec> {
        Arc::new(FieldSpec::prime(2).unwrap())
    }

    #[test]
    fn fourier_of_delta_is_constant() {
        let f = f2();
        let g = Grid::new(f.clone(), 3, 3).unwrap();
        let z = Sequence::<f64>::delta(&f, 0);
        let zh = seq_fourier(&z, &g).unwrap();
        for r in 0..g.integer_cells() {
            assert!((zh.value(g.integer_cell(r)) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        }
        let big = Sequence::<f64>::delta(&f, 8);
        assert!(matches!(seq_fourier(&big, &g), Err(Error::Range(_))));
    }

    #[test]
    fn inverse_examples() {
        let f = f2();
        let g = Grid::new(f.clone(), 2, 3).unwrap();
        let ones = SampledFunction::<f64>::ball(&g, Domain::Frequency, 0).unwrap();
        let z = seq_inv_fourier(&ones).unwrap();
        assert!(z.max_distance(&Sequence::delta(&f, 0)) < 1e-15);
        let u3 = u_of_n(&f, 3);
        let char3 = SampledFunction::<f64>::from_fn(&g, Domain::Frequency, |i| {
            let w = g.freq_point(i);
            if w.is_zero() || w.lo() >= 0 {
                crate::analysis::chi(&u3.mul(&w))
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let z3 = seq_inv_fourier(&char3).unwrap();
        assert!(z3.max_distance(&Sequence::delta(&f, 3)) < 1e-15);
    }

    #[test]
    fn translation_examples() {
        let f = f2();
        let d1 = Sequence::<f64>::delta(&f, 1);
        assert_eq!(seq_translate(&d1, 0), d1);
        assert_eq!(seq_translate(&d1, 1), Sequence::delta(&f, 0));
        assert_eq!(seq_translate(&Sequence::<f64>::delta(&f, 2), 1), Sequence::delta(&f, 3));
        let f3 = Arc::new(FieldSpec::prime(3).unwrap());
        // u(1) + u(2) = 3 p^-1 = 0 in characteristic 3
        assert_eq!(seq_translate(&Sequence::<f64>::delta(&f3, 2), 1), Sequence::delta(&f3, 0));
    }

    #[test]
    fn modulation_is_identity_on_the_lattice() {
        let f = Arc::new(FieldSpec::prime(3).unwrap());
        let z = Sequence::<f64>::from_pairs(
            &f,
            (0..20u64).map(|n| (n, Complex::new(n as f64, 1.0 - n as f64))),
        );
        for k in 0..16 {
            let mz = seq_modulate(&z, k);
            assert!(mz.max_distance(&z) < 1e-15);
            assert!((mz.norm_sqr() - z.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn wave_packet_examples() {
        let f = f2();
        let v = Sequence::<f64>::from_pairs(&f, [(0, Complex::new(1.0, 2.0)), (5, Complex::new(-1.0, 0.5))]);
        assert_eq!(wave_packet_atom(&v, 0, 0, 0).unwrap(), v);
        for (k, m) in [(3, 2), (1, 7)] {
            let atom = wave_packet_atom(&v, 0, k, m).unwrap();
            assert!(atom.max_distance(&seq_translate(&v, m)) < 1e-15);
        }
        let atom = wave_packet_atom(&v, 1, 0, 2).unwrap();
        assert_eq!(atom, seq_translate(&v, 1));
        assert_eq!(wave_packet_atom(&v, -1, 0, 1).unwrap(), seq_translate(&v, 2));
        assert!(matches!(wave_packet_atom(&v, 1, 0, 3), Err(Error::Domain(_))));
    }
}
