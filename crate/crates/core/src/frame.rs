//! Nonhomogeneous wavelet systems in Sobolev scale.
//!
//! The atom `psi^s_{l,j,k}(x) = q^{j(1/2-s)} psi_l(p^{-j} x - u(k))` has
//! spectrum `q^{-j(1/2+s)} psi_l^(p^j xi) conj(chi(u(k) p^j xi))`; the
//! translates of `psi_0` carry no dilation. Every pairing is the frequency-side
//! form `<f, g> = integral f^ conj(g^)`.
//!
//! At scale `j` the phases `chi(u(k) p^j xi)` separate `q^{N+j}` translates on
//! the grid, so a translation bound `K` for `psi_0` becomes `K q^j` at scale
//! `j`. Truncating every scale at `K` would drop atoms and break the exact
//! identities the model is built to verify.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{unit_root, Domain, Grid, OmegaSet, SampledFunction};
use crate::eigen::Hermitian;
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// Largest Gram system [`bessel_bounds`] will diagonalize.
pub const MAX_ATOMS: usize = 4096;

/// Whether a generator set is the analysing or the synthesising system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

/// `psi_0^` and `psi_1^ .. psi_L^` on one frequency grid, with the Sobolev
/// exponent of the side.
#[derive(Clone, Debug)]
pub struct GeneratorSet<T> {
    psi0_hat: SampledFunction<T>,
    psis_hat: Vec<SampledFunction<T>>,
    s: T,
    side: Side,
}

impl<T: Real> GeneratorSet<T> {
    /// Generators of the primal system in `H^s`.
    pub fn primal(psi0_hat: SampledFunction<T>, psis_hat: Vec<SampledFunction<T>>, s: T) -> Result<Self> {
        Self::build(psi0_hat, psis_hat, s, Side::Primal)
    }

    /// Generators of the dual system; it lives in `H^{-s}`, so the stored
    /// exponent is `-s`.
    pub fn dual(psi0_hat: SampledFunction<T>, psis_hat: Vec<SampledFunction<T>>, s: T) -> Result<Self> {
        Self::build(psi0_hat, psis_hat, -s, Side::Dual)
    }

    fn build(psi0_hat: SampledFunction<T>, psis_hat: Vec<SampledFunction<T>>, s: T, side: Side) -> Result<Self> {
        let grid = psi0_hat.grid();
        for (l, f) in std::iter::once(&psi0_hat).chain(&psis_hat).enumerate() {
            if f.domain() != Domain::Frequency {
                return Err(Error::Usage(format!("generator {l} must be given by its spectrum")));
            }
            if f.grid() != grid {
                return Err(Error::Usage(format!("generator {l} lives on a different grid")));
            }
        }
        if !s.is_finite() {
            return Err(Error::Domain(format!("Sobolev exponent {s} is not finite")));
        }
        Ok(Self { psi0_hat, psis_hat, s, side })
    }

    /// `psi_0^ = 1_D` and `psi_l^ = 1_{u(l) + D}` for `l = 1 .. q-1`.
    pub fn haar(grid: &Grid, s: T, side: Side) -> Self {
        let psi0 = haar_coset(grid, 0);
        let psis = (1..grid.q() as u64).map(|l| haar_coset(grid, l)).collect();
        let s = match side {
            Side::Primal => s,
            Side::Dual => -s,
        };
        Self { psi0_hat: psi0, psis_hat: psis, s, side }
    }

    pub fn grid(&self) -> &Grid {
        self.psi0_hat.grid()
    }

    pub fn psi0_hat(&self) -> &SampledFunction<T> {
        &self.psi0_hat
    }

    pub fn psis_hat(&self) -> &[SampledFunction<T>] {
        &self.psis_hat
    }

    /// Spectrum of generator `ell` (0 for `psi_0`).
    pub fn generator(&self, ell: usize) -> Option<&SampledFunction<T>> {
        if ell == 0 {
            Some(&self.psi0_hat)
        } else {
            self.psis_hat.get(ell - 1)
        }
    }

    /// Number of wavelet generators `L`.
    pub fn wavelets(&self) -> usize {
        self.psis_hat.len()
    }

    /// The Sobolev exponent of this side (`-s` on the dual side).
    pub fn exponent(&self) -> T {
        self.s
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Replaces generator `ell` by `f(ell's spectrum)`.
    pub fn map_generator(
        &self,
        ell: usize,
        f: impl Fn(&SampledFunction<T>) -> SampledFunction<T>,
    ) -> Result<Self> {
        let mut out = self.clone();
        let target = if ell == 0 {
            &mut out.psi0_hat
        } else {
            out.psis_hat
                .get_mut(ell - 1)
                .ok_or_else(|| Error::Range(format!("no generator {ell}")))?
        };
        let new = f(target);
        if new.grid() != self.grid() || new.domain() != Domain::Frequency {
            return Err(Error::Usage("replacement spectrum must stay on the grid".into()));
        }
        *target = new;
        Ok(out)
    }

    /// The same generators with the stored exponent replaced.
    pub fn with_exponent(&self, s: T) -> Self {
        Self { s, ..self.clone() }
    }
}

fn haar_coset<T: Real>(grid: &Grid, l: u64) -> SampledFunction<T> {
    let offset = grid.lattice_offset(l).expect("u(l) with l < q is on every grid");
    let mut f = SampledFunction::zeros(grid, Domain::Frequency);
    for r in 0..grid.integer_cells() {
        f.values_mut()[grid.cell_add(grid.integer_cell(r), offset)] = Complex::new(T::one(), T::zero());
    }
    f
}

/// Index `(l, j, k)` of an atom; `j = 0` whenever `l = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomIndex {
    pub ell: usize,
    pub j: u32,
    pub k: u64,
}

impl AtomIndex {
    pub fn new(ell: usize, j: u32, k: u64) -> Self {
        Self { ell, j: if ell == 0 { 0 } else { j }, k }
    }
}

/// Truncation of the atom family: scales `0 ..= j_max`, translations of `psi_0`
/// below `k_max` and translations at scale `j` below `k_max q^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranges {
    pub j_max: u32,
    pub k_max: u64,
}

impl Ranges {
    /// Every scale the grid can represent and every translate of `psi_0`.
    pub fn full(grid: &Grid) -> Self {
        Self {
            j_max: grid.m() + grid.n() - 2,
            k_max: grid.integer_cells() as u64,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let mut problems = Vec::new();
        let limit = grid.m() + grid.n() - 2;
        if self.j_max > limit {
            problems.push(format!("j_max = {} exceeds M + N - 2 = {limit}", self.j_max));
        }
        let kq = grid.integer_cells() as u64;
        if self.k_max == 0 || self.k_max > kq {
            problems.push(format!("k_max = {} must lie in 1 ..= q^N = {kq}", self.k_max));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Range(problems.join("; ")))
        }
    }

    /// Translation bound at scale `j` for wavelet generators.
    pub fn translations(&self, grid: &Grid, ell: usize, j: u32) -> u64 {
        if ell == 0 {
            self.k_max
        } else {
            self.k_max * (grid.q() as u64).pow(j)
        }
    }
}

/// Phase index of `chi(u(k) p^j xi)` for a frequency cell `xi`.
///
/// Base-q digit `t` of `k` sits at power `-(t+1)` and meets the digit of `xi`
/// at power `t - j`.
pub(crate) fn atom_phase(grid: &Grid, cell: usize, k: u64, j: u32) -> u32 {
    let field = grid.field();
    let q = field.q() as u64;
    let levels = grid.levels() as i64;
    let mut acc = 0u32;
    let mut rest = k;
    let mut t = 0i64;
    while rest > 0 {
        let b = (rest % q) as u32;
        let pos = grid.m() as i64 + t - j as i64;
        if b != 0 && (0..levels).contains(&pos) {
            acc += field.pair_idx(b, grid.digit_at(cell, pos as u32));
        }
        rest /= q;
        t += 1;
    }
    acc % field.p()
}

/// Nonzero cells of the undilated-and-unphased atom at `(l, j)`, with the
/// amplitude `q^{-j(1/2+s)} psi_l^(p^j xi)`.
fn atom_base<T: Real>(gen: &GeneratorSet<T>, ell: usize, j: u32) -> Vec<(usize, Complex<T>)> {
    let grid = gen.grid();
    let psi = gen.generator(ell).expect("generator index checked by caller");
    let half = T::from_f64_lossy(0.5);
    let amp = if ell == 0 {
        T::one()
    } else {
        T::from_usize_lossy(grid.q() as usize).powf(-T::from_u32(j).unwrap() * (half + gen.exponent()))
    };
    let zero = Complex::new(T::zero(), T::zero());
    (0..grid.len())
        .filter_map(|c| {
            let v = psi.value(grid.freq_dilate(c, j));
            (v != zero).then(|| (c, v * amp))
        })
        .collect()
}

/// One atom as a sparse spectrum.
#[derive(Clone, Debug)]
pub(crate) struct SparseAtom<T> {
    pub index: AtomIndex,
    pub cells: Vec<(usize, Complex<T>)>,
}

fn phased<T: Real>(grid: &Grid, base: &[(usize, Complex<T>)], k: u64, j: u32) -> Vec<(usize, Complex<T>)> {
    let p = grid.field().p();
    base.iter()
        .map(|&(c, v)| (c, v * unit_root::<T>(p, atom_phase(grid, c, k, j)).conj()))
        .collect()
}

/// All atoms with a nonzero spectrum, in index order.
pub(crate) fn sparse_atoms<T: Real>(gen: &GeneratorSet<T>, ranges: &Ranges) -> Result<Vec<SparseAtom<T>>> {
    let grid = gen.grid();
    ranges.validate(grid)?;
    let mut out = Vec::new();
    for ell in 0..=gen.wavelets() {
        let scales = if ell == 0 { 0 } else { ranges.j_max };
        for j in 0..=scales {
            let base = atom_base(gen, ell, j);
            if base.is_empty() {
                continue;
            }
            let count = ranges.translations(grid, ell, j);
            let block: Vec<SparseAtom<T>> = (0..count)
                .into_par_iter()
                .map(|k| SparseAtom {
                    index: AtomIndex::new(ell, j, k),
                    cells: phased(grid, &base, k, j),
                })
                .collect();
            out.extend(block);
        }
    }
    Ok(out)
}

/// Spectrum of the atom `idx`.
pub fn atom_spectrum<T: Real>(gen: &GeneratorSet<T>, idx: AtomIndex) -> Result<SampledFunction<T>> {
    let grid = gen.grid();
    if idx.ell > gen.wavelets() {
        return Err(Error::Range(format!("generator {} of {}", idx.ell, gen.wavelets())));
    }
    if idx.ell == 0 && idx.j != 0 {
        return Err(Error::Range("translates of psi_0 carry no scale".into()));
    }
    let limit = grid.m() + grid.n() - 2;
    if idx.j > limit {
        return Err(Error::Range(format!("scale {} exceeds the window limit {limit}", idx.j)));
    }
    let mut f = SampledFunction::zeros(grid, Domain::Frequency);
    for (c, v) in phased(grid, &atom_base(gen, idx.ell, idx.j), idx.k, idx.j) {
        f.values_mut()[c] = v;
    }
    Ok(f)
}

fn pair_sparse<T: Real>(f_hat: &SampledFunction<T>, atom: &SparseAtom<T>) -> Complex<T> {
    let mut acc = CompensatedSum::new();
    for &(c, v) in &atom.cells {
        acc.add(f_hat.value(c) * v.conj());
    }
    acc.total() * f_hat.cell_measure()
}

/// `<f, psi_a>` for every atom with a nonzero spectrum; atoms that vanish on
/// the grid are omitted.
pub fn analysis_coeffs<T: Real>(
    f: &SampledFunction<T>,
    gen: &GeneratorSet<T>,
    ranges: &Ranges,
) -> Result<BTreeMap<AtomIndex, Complex<T>>> {
    if f.grid() != gen.grid() {
        return Err(Error::Usage("function and generators live on different grids".into()));
    }
    let f_hat = f.to_frequency();
    let atoms = sparse_atoms(gen, ranges)?;
    let coeffs: Vec<Complex<T>> = atoms.par_iter().map(|a| pair_sparse(&f_hat, a)).collect();
    Ok(atoms.into_iter().map(|a| a.index).zip(coeffs).collect())
}

/// `sum_a <f, dual_a> <primal_a, g>` over the truncated index set.
pub fn reconstruction_form<T: Real>(
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    primal: &GeneratorSet<T>,
    dual: &GeneratorSet<T>,
    ranges: &Ranges,
) -> Result<Complex<T>> {
    if primal.wavelets() != dual.wavelets() {
        return Err(Error::Usage(format!(
            "primal has {} wavelet generators, dual has {}",
            primal.wavelets(),
            dual.wavelets()
        )));
    }
    let fd = analysis_coeffs(f, dual, ranges)?;
    let gp = analysis_coeffs(g, primal, ranges)?;
    let mut acc = CompensatedSum::new();
    for (idx, a) in &fd {
        if let Some(b) = gp.get(idx) {
            acc.add(a * b.conj());
        }
    }
    Ok(acc.total())
}

/// Frame bounds of the truncated system from its Gram spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselBounds<T> {
    /// Smallest eigenvalue above the rank threshold.
    pub lower: T,
    /// Largest eigenvalue.
    pub upper: T,
    /// Largest eigenvalue by power iteration, a cross-check of `upper`.
    pub upper_power: T,
    pub rank: usize,
    /// Atoms with a nonzero (masked) spectrum.
    pub atoms: usize,
}

/// Upper Bessel bound `D` of the system in `H^s` (s the side's exponent).
pub fn bessel_bound<T: Real>(gen: &GeneratorSet<T>, ranges: &Ranges) -> Result<T> {
    Ok(bessel_bounds(gen, ranges, None)?.upper)
}

/// Gram spectrum of the atoms in the `H^s` inner product, with spectra
/// restricted to `omega` when given.
///
/// The Gram matrix `V V^*` and the frame operator `V^* V` share their nonzero
/// spectrum, so the smaller of the two is diagonalized.
pub fn bessel_bounds<T: Real>(
    gen: &GeneratorSet<T>,
    ranges: &Ranges,
    omega: Option<&OmegaSet>,
) -> Result<BesselBounds<T>> {
    let grid = gen.grid();
    if let Some(o) = omega {
        if o.grid() != grid {
            return Err(Error::Usage("spectral set lives on a different grid".into()));
        }
    }
    let inside = |c: usize| omega.is_none_or(|o| o.contains(c));
    let zero = Complex::new(T::zero(), T::zero());
    let atoms: Vec<Vec<(usize, Complex<T>)>> = sparse_atoms(gen, ranges)?
        .into_iter()
        .map(|a| a.cells.into_iter().filter(|&(c, v)| inside(c) && v != zero).collect::<Vec<_>>())
        .filter(|cells: &Vec<_>| !cells.is_empty())
        .collect();
    let mut cols: BTreeMap<usize, usize> = BTreeMap::new();
    for a in &atoms {
        for &(c, _) in a {
            cols.insert(c, 0);
        }
    }
    for (i, v) in cols.values_mut().enumerate() {
        *v = i;
    }
    let (na, nc) = (atoms.len(), cols.len());
    let dim = na.min(nc);
    if dim > MAX_ATOMS {
        return Err(Error::Range(format!(
            "Gram system of order {dim} exceeds the limit of {MAX_ATOMS}"
        )));
    }
    if dim == 0 {
        return Ok(BesselBounds {
            lower: T::zero(),
            upper: T::zero(),
            upper_power: T::zero(),
            rank: 0,
            atoms: na,
        });
    }
    let h = grid.cell_measure::<T>(Domain::Frequency);
    let s = gen.exponent();
    let scale: Vec<T> = cols.keys().map(|&c| (h * grid.sobolev_weight(c, s)).sqrt()).collect();
    // rows of V: atoms weighted by sqrt(h w)
    let rows: Vec<Vec<(usize, Complex<T>)>> = atoms
        .iter()
        .map(|a| a.iter().map(|&(c, v)| (cols[&c], v * scale[cols[&c]])).collect())
        .collect();
    let matrix = if na <= nc {
        let mut dense = vec![zero; na * nc];
        for (i, r) in rows.iter().enumerate() {
            for &(c, v) in r {
                dense[i * nc + c] = v;
            }
        }
        let upper: Vec<Vec<Complex<T>>> = (0..na)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![zero; na];
                for (j, slot) in row.iter_mut().enumerate().skip(i) {
                    let mut acc = CompensatedSum::new();
                    for &(c, v) in &rows[i] {
                        acc.add(v * dense[j * nc + c].conj());
                    }
                    *slot = acc.total();
                }
                row
            })
            .collect();
        Hermitian::new(na, upper.concat())
    } else {
        let mut frame = vec![zero; nc * nc];
        for r in &rows {
            for &(c1, v1) in r {
                for &(c2, v2) in r {
                    if c2 >= c1 {
                        frame[c1 * nc + c2] += v1.conj() * v2;
                    }
                }
            }
        }
        Hermitian::new(nc, frame)
    };
    let ev = matrix.eigenvalues();
    let upper = *ev.last().expect("nonempty spectrum");
    let threshold = upper * T::from_usize_lossy(dim) * T::epsilon() * T::from_f64_lossy(64.0);
    let positive: Vec<T> = ev.iter().copied().filter(|&e| e > threshold).collect();
    let upper_power = matrix.power_max(T::from_f64_lossy(1e-8).max(T::epsilon() * T::from_f64_lossy(16.0)), 100_000);
    Ok(BesselBounds {
        lower: positive.first().copied().unwrap_or(T::zero()),
        upper: upper.max(T::zero()),
        upper_power,
        rank: positive.len(),
        atoms: na,
    })
}
