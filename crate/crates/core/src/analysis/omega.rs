use super::grid::{Domain, Grid};
use crate::error::{Error, Result};
use crate::local_field::KNumber;

/// A set of frequency cells standing for the spectral support set of a
/// reducing subspace.
///
/// Dilation invariance is checked on every pair `(omega, p omega)` of nonzero
/// cells. The zero cell is a ball around the fixed point of the dilation and
/// can never be split consistently, so its membership is free.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaSet {
    grid: Grid,
    member: Vec<bool>,
    dilation_invariant: bool,
}

fn check_invariance(grid: &Grid, member: &[bool]) -> Option<(usize, usize)> {
    (1..grid.len()).find_map(|idx| {
        let image = grid.freq_dilate(idx, 1);
        (image != 0 && member[idx] != member[image]).then_some((idx, image))
    })
}

impl OmegaSet {
    /// A dilation-invariant set; fails with a diagnostic otherwise.
    pub fn new(grid: &Grid, member: Vec<bool>) -> Result<Self> {
        let set = Self::new_unchecked(grid, member)?;
        if let Some((a, b)) = check_invariance(grid, &set.member) {
            return Err(Error::Domain(format!(
                "set is not dilation invariant: cell {} ({}) and its image {} ({}) differ",
                a,
                grid.freq_point(a),
                b,
                grid.freq_point(b)
            )));
        }
        Ok(set)
    }

    /// Any set of cells, e.g. a ball used as a spectral mask. Invariance is
    /// recorded but not enforced.
    pub fn new_unchecked(grid: &Grid, member: Vec<bool>) -> Result<Self> {
        if member.len() != grid.len() {
            return Err(Error::Range(format!(
                "membership mask has {} entries for {} cells",
                member.len(),
                grid.len()
            )));
        }
        let dilation_invariant = check_invariance(grid, &member).is_none();
        Ok(Self {
            grid: grid.clone(),
            member,
            dilation_invariant,
        })
    }

    pub fn full(grid: &Grid) -> Self {
        Self::new(grid, vec![true; grid.len()]).expect("the whole grid is invariant")
    }

    pub fn empty(grid: &Grid) -> Self {
        Self::new(grid, vec![false; grid.len()]).expect("the empty set is invariant")
    }

    /// Nonzero cells whose leading digit has an index in `leading`.
    pub fn sector(grid: &Grid, leading: &[u32]) -> Result<Self> {
        let member = (0..grid.len())
            .map(|idx| {
                let x = grid.freq_point(idx);
                !x.is_zero() && leading.contains(&x.digit_idx(x.lo()))
            })
            .collect();
        Self::new(grid, member)
    }

    pub fn from_predicate(grid: &Grid, pred: impl Fn(&KNumber) -> bool) -> Result<Self> {
        let member = (0..grid.len())
            .map(|idx| pred(&grid.point(Domain::Frequency, idx)))
            .collect();
        Self::new(grid, member)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.member[idx]
    }

    pub fn mask(&self) -> &[bool] {
        &self.member
    }

    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.member.iter().all(|&b| b)
    }

    pub fn is_dilation_invariant(&self) -> bool {
        self.dilation_invariant
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldSpec;
    use std::sync::Arc;

    #[test]
    fn invariant_sets() {
        let g = Grid::new(Arc::new(FieldSpec::prime(3).unwrap()), 2, 2).unwrap();
        assert_eq!(OmegaSet::full(&g).count(), g.len());
        assert_eq!(OmegaSet::empty(&g).count(), 0);
        let s = OmegaSet::sector(&g, &[1]).unwrap();
        assert!(s.is_dilation_invariant());
        assert_eq!(s.count(), (g.len() - 1) / 2);
    }

    #[test]
    fn balls_are_not_invariant() {
        let g = Grid::new(Arc::new(FieldSpec::prime(2).unwrap()), 2, 2).unwrap();
        let ball = |x: &KNumber| x.is_zero() || x.lo() >= 0;
        assert!(matches!(OmegaSet::from_predicate(&g, ball), Err(Error::Domain(_))));
        let mask = (0..g.len()).map(|i| ball(&g.freq_point(i))).collect();
        let set = OmegaSet::new_unchecked(&g, mask).unwrap();
        assert!(!set.is_dilation_invariant());
        assert_eq!(set.count(), 4);
    }
}
