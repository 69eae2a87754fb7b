use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::finite_field::FieldSpec;
use crate::local_field::{KNumber, Valuation};
use crate::scalar::Real;

/// Largest number of cells a grid may have.
pub const MAX_CELLS: usize = 1 << 20;

/// Which side of the transform a sampled function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Time,
    Frequency,
}

/// A pair of dual finite quotients of K.
///
/// Time cells are the cosets of `p^M D` inside `p^{-N} D`; frequency cells are
/// the cosets of `p^N D` inside `p^{-M} D`. Both have `q^{M+N}` cells. A cell
/// is addressed by a mixed-radix index whose digit at position `t` is the digit
/// index of the coefficient at power `t - N` (time) or `t - M` (frequency), the
/// least significant position holding the lowest power.
///
/// Functions supported in `p^{-N} D` and constant on cosets of `p^M D` have
/// transforms supported in `p^{-M} D` and constant on cosets of `p^N D`, so the
/// model carries no aliasing.
#[derive(Clone, Debug)]
pub struct Grid {
    field: Arc<FieldSpec>,
    m: u32,
    n: u32,
    len: usize,
    pow: Vec<usize>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n && *self.field == *other.field
    }
}

impl Eq for Grid {}

/// `exp(2 pi i t / p)`, exact for the real roots.
pub(crate) fn unit_root<T: Real>(p: u32, t: u32) -> Complex<T> {
    let t = t % p;
    if t == 0 {
        Complex::new(T::one(), T::zero())
    } else if 2 * t == p {
        Complex::new(-T::one(), T::zero())
    } else {
        let angle = T::TAU() * T::from_usize_lossy(t as usize) / T::from_usize_lossy(p as usize);
        Complex::new(angle.cos(), angle.sin())
    }
}

impl Grid {
    pub fn new(field: Arc<FieldSpec>, m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Range(format!("grid exponents must be >= 1 (got M={m}, N={n})")));
        }
        let q = field.q() as usize;
        let levels = (m + n) as usize;
        let mut pow = Vec::with_capacity(levels + 1);
        let mut acc: usize = 1;
        pow.push(1);
        for _ in 0..levels {
            acc = acc
                .checked_mul(q)
                .filter(|&v| v <= MAX_CELLS)
                .ok_or_else(|| {
                    Error::Range(format!("grid q^(M+N) = {q}^{levels} exceeds {MAX_CELLS} cells"))
                })?;
            pow.push(acc);
        }
        Ok(Self {
            field,
            m,
            n,
            len: acc,
            pow,
        })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Number of digit positions, `M + N`.
    pub fn levels(&self) -> u32 {
        self.m + self.n
    }

    /// Number of cells on either side.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `q^e` for `e <= M + N`.
    pub fn q_pow(&self, e: u32) -> usize {
        self.pow[e as usize]
    }

    /// Haar measure of one cell: `q^{-M}` in time, `q^{-N}` in frequency.
    pub fn cell_measure<T: Real>(&self, domain: Domain) -> T {
        let q = T::from_usize_lossy(self.q() as usize);
        match domain {
            Domain::Time => q.powi(-(self.m as i32)),
            Domain::Frequency => q.powi(-(self.n as i32)),
        }
    }

    /// Lowest power represented on the given side.
    pub fn low_power(&self, domain: Domain) -> i64 {
        match domain {
            Domain::Time => -(self.n as i64),
            Domain::Frequency => -(self.m as i64),
        }
    }

    #[inline]
    pub fn digit_at(&self, idx: usize, pos: u32) -> u32 {
        ((idx / self.pow[pos as usize]) % self.q() as usize) as u32
    }

    /// Digit indices of a cell, least significant position first.
    pub fn digits(&self, idx: usize) -> Vec<u32> {
        (0..self.levels()).map(|t| self.digit_at(idx, t)).collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .enumerate()
            .map(|(t, &d)| d as usize * self.pow[t])
            .sum()
    }

    /// Canonical representative of a cell as an element of K.
    pub fn point(&self, domain: Domain, idx: usize) -> KNumber {
        assert!(idx < self.len, "cell {idx} outside grid of {} cells", self.len);
        KNumber::from_digits(&self.field, self.low_power(domain), self.digits(idx))
    }

    pub fn time_point(&self, idx: usize) -> KNumber {
        self.point(Domain::Time, idx)
    }

    pub fn freq_point(&self, idx: usize) -> KNumber {
        self.point(Domain::Frequency, idx)
    }

    /// The cell containing `x`, or `None` when `x` lies outside the window.
    /// Digits finer than the cell size are absorbed by the cell.
    pub fn cell_of(&self, domain: Domain, x: &KNumber) -> Option<usize> {
        let low = self.low_power(domain);
        if !x.is_zero() && x.lo() < low {
            return None;
        }
        let digits: Vec<u32> = (0..self.levels())
            .map(|t| x.digit_idx(low + t as i64))
            .collect();
        Some(self.from_digits(&digits))
    }

    pub fn freq_cell_of(&self, x: &KNumber) -> Option<usize> {
        self.cell_of(Domain::Frequency, x)
    }

    pub fn time_cell_of(&self, x: &KNumber) -> Option<usize> {
        self.cell_of(Domain::Time, x)
    }

    /// Digitwise sum of two cell indices (the group law of the quotient).
    #[inline]
    pub fn cell_add(&self, a: usize, b: usize) -> usize {
        if self.field.p() == 2 {
            return a ^ b;
        }
        let q = self.q() as usize;
        let (mut a, mut b, mut out, mut place) = (a, b, 0usize, 1usize);
        for _ in 0..self.levels() {
            let d = self.field.add_idx((a % q) as u32, (b % q) as u32) as usize;
            out += d * place;
            a /= q;
            b /= q;
            place *= q;
        }
        out
    }

    pub fn cell_neg(&self, a: usize) -> usize {
        let digits: Vec<u32> = self
            .digits(a)
            .into_iter()
            .map(|d| self.field.neg_idx(d))
            .collect();
        self.from_digits(&digits)
    }

    /// Frequency-cell offset of the lattice point `u(k)`, if `|u(k)| <= q^M`.
    pub fn lattice_offset(&self, k: u64) -> Option<usize> {
        if k >= self.pow[self.m as usize] as u64 {
            return None;
        }
        let q = self.q() as u64;
        let mut rest = k;
        let mut out = 0usize;
        let mut t = 0u32;
        while rest > 0 {
            // base-q digit t of k sits at power -(t+1), position M-1-t
            out += (rest % q) as usize * self.pow[(self.m - 1 - t) as usize];
            rest /= q;
            t += 1;
        }
        Some(out)
    }

    /// Frequency cell of `omega + u(k)`, or `None` when it leaves the grid.
    pub fn freq_translate(&self, idx: usize, k: u64) -> Option<usize> {
        self.lattice_offset(k).map(|off| self.cell_add(idx, off))
    }

    /// Frequency cell containing `p^j omega` for `j >= 0`.
    ///
    /// The image of a cell under `p^j` lies inside a single cell, so this is
    /// always defined on the grid.
    pub fn freq_dilate(&self, idx: usize, j: u32) -> usize {
        if j >= self.levels() {
            0
        } else {
            (idx * self.pow[j as usize]) % self.len
        }
    }

    /// Valuation of a frequency cell's representative (infinite for the zero cell).
    pub fn freq_valuation(&self, idx: usize) -> Valuation {
        (0..self.levels())
            .find(|&t| self.digit_at(idx, t) != 0)
            .map(|t| Valuation::Finite(t as i64 - self.m as i64))
            .unwrap_or(Valuation::Infinite)
    }

    /// Number of frequency cells inside the ring of integers, `q^N`.
    pub fn integer_cells(&self) -> usize {
        self.pow[self.n as usize]
    }

    /// Frequency cell of the `r`-th cell of the ring of integers.
    pub fn integer_cell(&self, r: usize) -> usize {
        r * self.pow[self.m as usize]
    }

    /// Character phase `t` with `chi(omega x) = exp(2 pi i t / p)` for a
    /// frequency cell and a time cell.
    ///
    /// The coefficient of `omega x` at power -1 pairs the frequency digit at
    /// position `t` with the time digit at position `M+N-1-t`.
    pub fn pairing(&self, freq: usize, time: usize) -> u32 {
        let l = self.levels();
        let p = self.field.p();
        let mut acc = 0u32;
        for t in 0..l {
            let d = self.digit_at(freq, t);
            if d != 0 {
                acc += self.field.pair_idx(d, self.digit_at(time, l - 1 - t));
            }
        }
        acc % p
    }

    /// Sobolev weight `(1 + |omega|^2)^s` on a frequency cell.
    ///
    /// The norm is constant on every cell except the one at zero, where the
    /// exact cell average `q^N * integral over p^N D` is returned. Integrals of
    /// weighted grid functions are therefore exact.
    pub fn sobolev_weight<T: Real>(&self, idx: usize, s: T) -> T {
        let q = T::from_usize_lossy(self.q() as usize);
        match self.freq_valuation(idx) {
            Valuation::Finite(v) => {
                let norm = q.powi(-(v as i32));
                (T::one() + norm * norm).powf(s)
            }
            Valuation::Infinite => {
                // sum over the shells |omega| = q^{-v}, v >= N, of measure q^{-v}(1 - 1/q)
                let shell = T::one() - T::one() / q;
                let mut acc = T::zero();
                let mut v = self.n as i32;
                loop {
                    let r = q.powi(-v);
                    let term = r * shell * (T::one() + r * r).powf(s);
                    acc += term;
                    if term <= T::epsilon() * acc * T::from_f64_lossy(1e-3) || v > 4000 {
                        break;
                    }
                    v += 1;
                }
                acc * q.powi(self.n as i32)
            }
        }
    }
}

/// The fixed character: `exp(2 pi i a / p)` where `a` is the constant
/// coordinate of the digit at power -1.
pub fn chi<T: Real>(x: &KNumber) -> Complex<T> {
    let f = x.field();
    unit_root(f.p(), x.digit_idx(-1) % f.p())
}

/// `chi_{u(n)}(x) = chi(u(n) x)`.
pub fn chi_n<T: Real>(n: u64, x: &KNumber) -> Complex<T> {
    let u = crate::local_field::u_of_n(x.field(), n);
    chi(&u.mul(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::u_of_n;

    fn grid(p: u32, m: u32, n: u32) -> Grid {
        Grid::new(Arc::new(FieldSpec::prime(p).unwrap()), m, n).unwrap()
    }

    #[test]
    fn chi_examples() {
        let f = Arc::new(FieldSpec::prime(2).unwrap());
        assert_eq!(chi::<f64>(&KNumber::zero(&f)), Complex::new(1.0, 0.0));
        assert_eq!(chi::<f64>(&KNumber::monomial(&f, 1, -1)), Complex::new(-1.0, 0.0));
        assert_eq!(chi::<f64>(&KNumber::monomial(&f, 1, -2)), Complex::new(1.0, 0.0));
        assert_eq!(chi_n::<f64>(0, &KNumber::monomial(&f, 1, -3)), Complex::new(1.0, 0.0));
        assert_eq!(chi_n::<f64>(1, &KNumber::one(&f)), Complex::new(-1.0, 0.0));
    }

    #[test]
    fn chi_is_trivial_on_the_lattice() {
        for p in [2, 3, 5] {
            let f = Arc::new(FieldSpec::prime(p).unwrap());
            for n in 0..16 {
                for m in 0..16 {
                    let z = chi_n::<f64>(n, &u_of_n(&f, m));
                    assert!((z - Complex::new(1.0, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn chi_over_gf4_ignores_higher_coordinates() {
        let f = Arc::new(FieldSpec::new(2, 2, Some(&[1, 1, 1])).unwrap());
        // zeta_1 p^-1 has constant coordinate 0
        assert_eq!(chi::<f64>(&KNumber::monomial(&f, 2, -1)).re, 1.0);
        assert_eq!(chi::<f64>(&KNumber::monomial(&f, 3, -1)).re, -1.0);
    }

    #[test]
    fn cells_roundtrip_through_points() {
        let g = grid(3, 2, 2);
        for idx in 0..g.len() {
            assert_eq!(g.freq_cell_of(&g.freq_point(idx)), Some(idx));
            assert_eq!(g.time_cell_of(&g.time_point(idx)), Some(idx));
        }
        let f = g.field().clone();
        assert_eq!(g.freq_cell_of(&KNumber::monomial(&f, 1, -3)), None);
        assert_eq!(g.freq_cell_of(&KNumber::monomial(&f, 1, 5)), Some(0));
    }

    #[test]
    fn index_arithmetic_matches_field_arithmetic() {
        for p in [2, 3] {
            let g = grid(p, 2, 3);
            let f = g.field().clone();
            for idx in 0..g.len() {
                let w = g.freq_point(idx);
                for j in 0..6 {
                    assert_eq!(g.freq_cell_of(&w.p_shift(j as i64)), Some(g.freq_dilate(idx, j)));
                }
                for k in 0..(g.q_pow(2) as u64 + 3) {
                    let moved = w.add(&u_of_n(&f, k));
                    assert_eq!(g.freq_cell_of(&moved), g.freq_translate(idx, k));
                }
            }
        }
    }

    #[test]
    fn pairing_matches_character_of_product() {
        let g = grid(3, 2, 2);
        for w in (0..g.len()).step_by(5) {
            for x in (0..g.len()).step_by(3) {
                let prod = g.freq_point(w).mul(&g.time_point(x));
                let direct = prod.digit_idx(-1) % 3;
                assert_eq!(g.pairing(w, x), direct);
            }
        }
    }

    #[test]
    fn zero_cell_weight_is_exact_average() {
        let g = grid(2, 2, 2);
        let w: f64 = g.sobolev_weight(0, 1.0);
        // q^N * sum_{v>=2} 2^{-v-1} (1 + 4^{-v}) = 1 + 4 * (1/2) * sum_{v>=2} 8^{-v}
        let expected = 1.0 + 2.0 * (1.0 / 64.0) / (1.0 - 1.0 / 8.0);
        assert!((w - expected).abs() < 1e-15);
        assert_eq!(g.sobolev_weight::<f64>(0, 0.0), 1.0);
        let cell = g.freq_cell_of(&KNumber::monomial(g.field(), 1, -1)).unwrap();
        assert_eq!(g.sobolev_weight::<f64>(cell, 1.0), 5.0);
    }
}
