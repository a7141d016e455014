//! Finite unions of dyadic rectangles, integrated exactly against grids.

use std::ops::Range;

use num_bigint::BigInt;

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::grid::{coarsen_index, AbsMax, Grid};
use crate::rational::{pow2, Rational};

/// A run of consecutive cells of `I` at resolution `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRange {
    order: u32,
    cells: Range<u64>,
}

impl CellRange {
    pub fn new(order: u32, cells: Range<u64>) -> Result<Self> {
        if order > 63 || cells.end > 1u64 << order || cells.start > cells.end {
            return Err(Error::param(
                "cells",
                format!("{cells:?} is not a range of resolution-{order} cells"),
            ));
        }
        Ok(CellRange { order, cells })
    }

    /// All of `I`.
    pub fn whole() -> Self {
        CellRange {
            order: 0,
            cells: 0..1,
        }
    }

    pub fn interval(i: &DyadicInterval) -> Self {
        let p = i.prefix();
        CellRange {
            order: i.order(),
            cells: p..p + 1,
        }
    }

    /// `J_k = I_k \ I_(k+1)`: digits `0..k` vanish and digit `k` is one.
    pub fn shell(k: u32) -> Self {
        CellRange {
            order: k + 1,
            cells: 1..2,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The covered cells at a resolution `m ≥ order`.
    pub fn at(&self, m: u32) -> Result<Range<u64>> {
        if m < self.order {
            return Err(Error::MisalignedRegion(m));
        }
        let s = m - self.order;
        Ok(self.cells.start << s..self.cells.end << s)
    }

    pub fn contains_cell(&self, cell: u64, m: u32) -> bool {
        m >= self.order && self.cells.contains(&(cell >> (m - self.order)))
    }

    fn overlaps(&self, other: &CellRange) -> bool {
        let m = self.order.max(other.order);
        let (a, b) = (self.at(m).unwrap(), other.at(m).unwrap());
        a.start < b.end && b.start < a.end
    }
}

/// A disjoint union of products of cell ranges in `I^D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region<const D: usize> {
    pieces: Vec<[CellRange; D]>,
}

pub type Region1D = Region<1>;
pub type Region2D = Region<2>;

impl<const D: usize> Region<D> {
    pub fn empty() -> Self {
        Region { pieces: Vec::new() }
    }

    pub fn whole() -> Self {
        Region {
            pieces: vec![std::array::from_fn(|_| CellRange::whole())],
        }
    }

    pub fn product(axes: [CellRange; D]) -> Self {
        Region { pieces: vec![axes] }
    }

    /// Add a piece, rejecting overlaps so every integral counts each cell once.
    pub fn push(&mut self, axes: [CellRange; D]) -> Result<()> {
        let clash = self
            .pieces
            .iter()
            .any(|p| p.iter().zip(&axes).all(|(a, b)| a.overlaps(b)));
        if clash {
            return Err(Error::OverlappingRegion);
        }
        self.pieces.push(axes);
        Ok(())
    }

    pub fn pieces(&self) -> &[[CellRange; D]] {
        &self.pieces
    }

    /// The finest resolution any piece needs.
    pub fn min_resolution(&self) -> u32 {
        self.pieces
            .iter()
            .flat_map(|p| p.iter().map(CellRange::order))
            .max()
            .unwrap_or(0)
    }

    pub fn contains_cell(&self, idx: usize, m: u32) -> bool {
        let mask = (1usize << m) - 1;
        let coords: [u64; D] = std::array::from_fn(|a| {
            if D == 1 {
                idx as u64
            } else {
                ((idx >> ((D - 1 - a) as u32 * m)) & mask) as u64
            }
        });
        self.pieces
            .iter()
            .any(|p| p.iter().zip(coords).all(|(r, c)| r.contains_cell(c, m)))
    }

    /// Membership of every cell at resolution `m`.
    pub fn mask(&self, m: u32) -> Result<Vec<bool>> {
        if m < self.min_resolution() {
            return Err(Error::MisalignedRegion(m));
        }
        Ok((0..Grid::<D>::cell_count(m))
            .map(|i| self.contains_cell(i, m))
            .collect())
    }
}

impl Region<2> {
    /// `J_{t1} × J_{t2}`.
    pub fn shell_rectangle(t1: u32, t2: u32) -> Self {
        Region::product([CellRange::shell(t1), CellRange::shell(t2)])
    }

    /// `I² \ (I_a × I_a)` as the disjoint union of `J_t × I` and `I_a × J_t`
    /// over `t < a`.
    pub fn complement_of_square(a: u32) -> Self {
        let mut r = Region::empty();
        let ia = CellRange::interval(&DyadicInterval::at_zero(a));
        for t in 0..a {
            r.pieces.push([CellRange::shell(t), CellRange::whole()]);
            r.pieces.push([ia.clone(), CellRange::shell(t)]);
        }
        r
    }

    /// `I² \ (I_a(u1) × I_a(u2))` for intervals of the same order.
    pub fn complement_of_rectangle(u1: &DyadicInterval, u2: &DyadicInterval) -> Result<Self> {
        let a = u1.order();
        if u2.order() != a {
            return Err(Error::param("u2", "both intervals must have the same order"));
        }
        let n = 1u64 << a;
        let (p1, p2) = (u1.prefix(), u2.prefix());
        let mut r = Region::empty();
        for (lo, hi) in [(0, p1), (p1 + 1, n)] {
            if lo < hi {
                r.push([CellRange::new(a, lo..hi)?, CellRange::whole()])?;
            }
        }
        let row = CellRange::new(a, p1..p1 + 1)?;
        for (lo, hi) in [(0, p2), (p2 + 1, n)] {
            if lo < hi {
                r.push([row.clone(), CellRange::new(a, lo..hi)?])?;
            }
        }
        Ok(r)
    }
}

/// `∫_r f`, exact.
pub fn integrate<const D: usize>(f: &Grid<D>, r: &Region<D>) -> Result<Rational> {
    let m = f.resolution();
    let mask = r.mask(m)?;
    let sum: BigInt = f
        .values()
        .iter()
        .zip(&mask)
        .filter(|(_, &k)| k)
        .map(|(&v, _)| BigInt::from(v))
        .sum();
    Ok(Rational::new(sum, f.denominator().into()) * pow2(-(D as i64 * m as i64)))
}

/// `∫_r sup`, exact, for a running maximum.
pub fn integrate_abs_max<const D: usize>(f: &AbsMax<D>, r: &Region<D>) -> Result<Rational> {
    let mask = r.mask(f.resolution())?;
    Ok(f.integral_where(|i| mask[i]))
}

/// Block sums of `values` from resolution `fine` to `coarse`.
pub(crate) fn block_sums<const D: usize>(values: &[i128], fine: u32, coarse: u32) -> Vec<i128> {
    let mut out = vec![0i128; Grid::<D>::cell_count(coarse)];
    for (i, &v) in values.iter().enumerate() {
        out[coarsen_index::<D>(i, fine, coarse)] += v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicPoint;
    use crate::grid::{Grid1D, Grid2D};
    use crate::rational::ratio;

    #[test]
    fn shell_measure() {
        let one = Grid1D::constant(6, 1, 1).unwrap();
        for k in 0..6 {
            let r = Region1D::product([CellRange::shell(k)]);
            assert_eq!(integrate(&one, &r).unwrap(), pow2(-(k as i64) - 1));
        }
    }

    #[test]
    fn misaligned_region_is_rejected() {
        let one = Grid1D::constant(2, 1, 1).unwrap();
        let r = Region1D::product([CellRange::shell(3)]);
        assert_eq!(integrate(&one, &r), Err(Error::MisalignedRegion(2)));
    }

    #[test]
    fn complement_of_square_has_the_right_measure() {
        let one = Grid2D::constant(5, 1, 1).unwrap();
        for a in 0..5u32 {
            let r = Region2D::complement_of_square(a);
            let expected = ratio(1, 1) - pow2(-2 * a as i64);
            assert_eq!(integrate(&one, &r).unwrap(), expected);
            let mask = r.mask(5).unwrap();
            for (i, &inside) in mask.iter().enumerate() {
                let (c1, c2) = (i >> 5, i & 31);
                assert_eq!(inside, c1 >> (5 - a) != 0 || c2 >> (5 - a) != 0);
            }
        }
    }

    #[test]
    fn complement_of_offset_rectangle() {
        let u1 = DyadicInterval::new(2, DyadicPoint::new(2, 3).unwrap()).unwrap();
        let u2 = DyadicInterval::new(2, DyadicPoint::new(2, 1).unwrap()).unwrap();
        let r = Region2D::complement_of_rectangle(&u1, &u2).unwrap();
        let one = Grid2D::constant(3, 1, 1).unwrap();
        assert_eq!(integrate(&one, &r).unwrap(), ratio(15, 16));
        assert!(!r.contains_cell((6 << 3) | 2, 3));
        assert!(r.contains_cell((6 << 3) | 4, 3));
    }

    #[test]
    fn overlapping_pieces_are_rejected() {
        let mut r = Region2D::shell_rectangle(0, 1);
        assert_eq!(
            r.push([CellRange::whole(), CellRange::shell(1)]),
            Err(Error::OverlappingRegion)
        );
        assert!(r.push([CellRange::shell(1), CellRange::shell(1)]).is_ok());
    }

    #[test]
    fn block_sums_of_constant() {
        let s = block_sums::<2>(&[1; 64], 3, 1);
        assert_eq!(s, vec![16; 4]);
    }
}
