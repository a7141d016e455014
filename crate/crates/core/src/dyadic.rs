//! Bit-level arithmetic of the dyadic group.
//!
//! Integers carry their binary digits `n = Σ n_j 2^j`; points of `[0, 1)` are
//! kept at a finite resolution `m` as a cell index, with digit `x_i` stored in
//! bit `m - 1 - i` of the cell (the most significant bit is `x_0`). Digits
//! beyond the resolution are zero, which is the terminating expansion of a
//! dyadic rational.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of binary digits for a [`DyadicPoint`].
pub const MAX_POINT_RESOLUTION: u32 = 63;

/// A nonnegative integer with dyadic-digit access.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nat(pub u128);

impl Nat {
    pub const ZERO: Nat = Nat(0);

    /// Binary digit `n_i`.
    pub fn bit(self, i: u32) -> u8 {
        if i >= u128::BITS {
            0
        } else {
            ((self.0 >> i) & 1) as u8
        }
    }

    /// `n_(k)`: the digits `0..=k`.
    pub fn low_part(self, k: u32) -> Nat {
        if k + 1 >= u128::BITS {
            self
        } else {
            Nat(self.0 & ((1u128 << (k + 1)) - 1))
        }
    }

    /// `n^(k)`: the digits `k..`.
    pub fn high_part(self, k: u32) -> Nat {
        if k >= u128::BITS {
            Nat(0)
        } else {
            Nat(self.0 & !((1u128 << k) - 1))
        }
    }

    /// `|n|`, the position of the leading one: `2^|n| <= n < 2^(|n|+1)`.
    pub fn order(self) -> Result<u32> {
        if self.0 == 0 {
            Err(Error::ZeroOrder)
        } else {
            Ok(u128::BITS - 1 - self.0.leading_zeros())
        }
    }

    /// Dyadic (digitwise mod 2) addition.
    pub fn dyadic_add(self, other: Nat) -> Nat {
        Nat(self.0 ^ other.0)
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat(v as u128)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat(v as u128)
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Self {
        Nat(v as u128)
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn dyadic_add(a: Nat, b: Nat) -> Nat {
    a.dyadic_add(b)
}

pub fn low_part(n: Nat, k: u32) -> Nat {
    n.low_part(k)
}

pub fn high_part(n: Nat, k: u32) -> Nat {
    n.high_part(k)
}

pub fn order(n: Nat) -> Result<u32> {
    n.order()
}

/// Smallest resolution `m` at which every Walsh function with index `< count`
/// is constant on the cells, i.e. `order(max(count - 1, 1)) + 1`.
pub fn min_resolution(count: u128) -> u32 {
    let top = count.saturating_sub(1).max(1);
    Nat(top).order().expect("nonzero") + 1
}

/// A point `cell / 2^resolution` of `I = [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    resolution: u32,
    cell: u64,
}

impl DyadicPoint {
    pub fn new(resolution: u32, cell: u64) -> Result<Self> {
        if resolution == 0 || resolution > MAX_POINT_RESOLUTION {
            return Err(Error::param(
                "resolution",
                format!("must be in 1..={MAX_POINT_RESOLUTION}, got {resolution}"),
            ));
        }
        if cell >> resolution != 0 {
            return Err(Error::param(
                "cell",
                format!("{cell} is not below 2^{resolution}"),
            ));
        }
        Ok(DyadicPoint { resolution, cell })
    }

    pub fn zero(resolution: u32) -> Result<Self> {
        Self::new(resolution, 0)
    }

    /// `e_i = 2^-(i+1)`, the point whose only nonzero digit is `x_i`.
    pub fn basis(i: u32, resolution: u32) -> Result<Self> {
        if i >= resolution {
            return Err(Error::param(
                "i",
                format!("digit {i} not representable at resolution {resolution}"),
            ));
        }
        Self::new(resolution, 1 << (resolution - 1 - i))
    }

    /// Build a point from its leading digits `x_0, x_1, ...`.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let resolution = digits.len() as u32;
        let mut cell = 0u64;
        for &d in digits {
            if d > 1 {
                return Err(Error::param("digits", format!("digit {d} is not binary")));
            }
            cell = (cell << 1) | d as u64;
        }
        Self::new(resolution, cell)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn cell(&self) -> u64 {
        self.cell
    }

    /// Digit `x_i`; zero beyond the resolution.
    pub fn digit(&self, i: u32) -> u8 {
        if i >= self.resolution {
            0
        } else {
            ((self.cell >> (self.resolution - 1 - i)) & 1) as u8
        }
    }

    /// Dyadic addition of points, cellwise XOR at equal resolution.
    pub fn dyadic_add(&self, other: &DyadicPoint) -> Result<Self> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        Ok(DyadicPoint {
            resolution: self.resolution,
            cell: self.cell ^ other.cell,
        })
    }

    /// The same point written with more digits.
    pub fn refine(&self, resolution: u32) -> Result<Self> {
        if resolution < self.resolution {
            return Err(Error::param(
                "resolution",
                format!("cannot coarsen {} to {resolution}", self.resolution),
            ));
        }
        Self::new(resolution, self.cell << (resolution - self.resolution))
    }

    /// The `k` with `x ∈ J_k = I_k \ I_(k+1)`, or `None` for `x = 0`.
    pub fn shell(&self) -> Option<u32> {
        shell_of_cell(self.cell, self.resolution)
    }
}

/// Leading zero digits of a cell at resolution `m`: the shell index `k` with
/// the cell inside `J_k`, or `None` for cell 0 (which lies in `I_m`).
pub fn shell_of_cell(cell: u64, m: u32) -> Option<u32> {
    if cell == 0 {
        None
    } else {
        Some(m - 1 - (63 - cell.leading_zeros()))
    }
}

/// `r_i(x) = (-1)^(x_i)`.
pub fn rademacher(i: u32, x: &DyadicPoint) -> i32 {
    if x.digit(i) == 1 {
        -1
    } else {
        1
    }
}

/// `ω_n(x) = Π r_k(x)^(n_k)`.
///
/// Every digit of `n` must be representable at the point's resolution,
/// otherwise the value would not be constant on the cell.
pub fn walsh(n: Nat, x: &DyadicPoint) -> Result<i32> {
    if n.0 != 0 && n.order()? >= x.resolution {
        return Err(Error::ResolutionTooSmall {
            index: n.0,
            resolution: x.resolution,
        });
    }
    Ok(walsh_cell(n.0 as u64, x.cell, x.resolution))
}

/// `ω_n` on cell `cell` at resolution `m`, without range checks.
#[inline]
pub(crate) fn walsh_cell(n: u64, cell: u64, m: u32) -> i32 {
    if m == 0 {
        return 1;
    }
    let digits = cell.reverse_bits() >> (64 - m);
    if (n & digits).count_ones() & 1 == 1 {
        -1
    } else {
        1
    }
}

/// `I_n(x)`: the points agreeing with `x` in the digits `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    order: u32,
    center: DyadicPoint,
}

impl DyadicInterval {
    pub fn new(order: u32, center: DyadicPoint) -> Result<Self> {
        if order > center.resolution {
            return Err(Error::param(
                "order",
                format!(
                    "{order} exceeds the center resolution {}",
                    center.resolution
                ),
            ));
        }
        Ok(DyadicInterval { order, center })
    }

    /// `I_n = I_n(0)`.
    pub fn at_zero(order: u32) -> Self {
        DyadicInterval {
            order,
            center: DyadicPoint {
                resolution: order.max(1),
                cell: 0,
            },
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn center(&self) -> &DyadicPoint {
        &self.center
    }

    /// The first `order` digits of the center, read as an integer.
    pub fn prefix(&self) -> u64 {
        self.center.cell >> (self.center.resolution - self.order)
    }

    pub fn contains(&self, y: &DyadicPoint) -> bool {
        (0..self.order).all(|i| y.digit(i) == self.center.digit(i))
    }

    /// Cells of resolution `m` covered by the interval.
    pub fn cell_range(&self, m: u32) -> Result<std::ops::Range<u64>> {
        if m < self.order {
            return Err(Error::MisalignedRegion(m));
        }
        let start = self.prefix() << (m - self.order);
        Ok(start..start + (1 << (m - self.order)))
    }
}

/// Membership in `J_k = I_k \ I_(k+1)`.
pub fn in_shell(k: u32, x: &DyadicPoint) -> bool {
    x.shell() == Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(m: u32, c: u64) -> DyadicPoint {
        DyadicPoint::new(m, c).unwrap()
    }

    #[test]
    fn dyadic_add_examples() {
        assert_eq!(dyadic_add(Nat(3), Nat(5)), Nat(6));
        assert_eq!(dyadic_add(Nat(13), Nat(0)), Nat(13));
        for n in 0..300u128 {
            assert_eq!(dyadic_add(Nat(n), Nat(n)), Nat(0));
        }
    }

    #[test]
    fn low_and_high_parts() {
        assert_eq!(low_part(Nat(13), 2), Nat(5));
        assert_eq!(high_part(Nat(13), 2), Nat(12));
        for n in 1..500u128 {
            let n = Nat(n);
            assert_eq!(low_part(n, n.order().unwrap()), n);
            assert_eq!(high_part(n, 0), n);
        }
        assert_eq!(low_part(Nat(u128::MAX), 127), Nat(u128::MAX));
        assert_eq!(high_part(Nat(u128::MAX), 128), Nat(0));
    }

    #[test]
    fn low_high_split_exhaustive() {
        for n in 0..(1u128 << 12) {
            for k in 0..=12 {
                let n = Nat(n);
                assert_eq!(low_part(n, k).0 + high_part(n, k + 1).0, n.0);
            }
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(order(Nat(13)), Ok(3));
        assert_eq!(order(Nat(1)), Ok(0));
        for s in 0..=20 {
            assert_eq!(order(Nat(1 << s)), Ok(s));
        }
        assert_eq!(order(Nat(0)), Err(Error::ZeroOrder));
    }

    #[test]
    fn min_resolution_rule() {
        assert_eq!(min_resolution(1), 1);
        assert_eq!(min_resolution(2), 1);
        assert_eq!(min_resolution(3), 2);
        assert_eq!(min_resolution(4), 2);
        assert_eq!(min_resolution(5), 3);
        assert_eq!(min_resolution(512), 9);
        assert_eq!(min_resolution(513), 10);
    }

    #[test]
    fn digits_follow_cell_convention() {
        let x = pt(3, 0b110);
        assert_eq!((x.digit(0), x.digit(1), x.digit(2), x.digit(3)), (1, 1, 0, 0));
        assert_eq!(DyadicPoint::from_digits(&[1, 1, 0]).unwrap(), x);
        assert_eq!(DyadicPoint::basis(0, 3).unwrap().cell(), 4);
        assert_eq!(DyadicPoint::basis(2, 3).unwrap().cell(), 1);
        assert!(DyadicPoint::new(3, 8).is_err());
        assert!(DyadicPoint::new(0, 0).is_err());
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher(0, &pt(1, 1)), -1);
        // [1/4, 1/2) is cell 1 at resolution 2
        assert_eq!(rademacher(1, &pt(2, 1)), -1);
        assert_eq!(rademacher(0, &pt(2, 1)), 1);
        for i in 0..70 {
            assert_eq!(rademacher(i, &pt(5, 0)), 1);
        }
        // beyond the resolution all digits are zero
        assert_eq!(rademacher(9, &pt(2, 3)), 1);
    }

    #[test]
    fn walsh_examples() {
        for c in 0..16 {
            assert_eq!(walsh(Nat(0), &pt(4, c)), Ok(1));
        }
        assert_eq!(walsh(Nat(3), &pt(2, 1)), Ok(-1));
        for m in 1..7 {
            for c in 0..(1u64 << m) {
                for i in 0..m {
                    let x = pt(m, c);
                    assert_eq!(walsh(Nat(1 << i), &x).unwrap(), rademacher(i, &x));
                }
            }
        }
        assert_eq!(
            walsh(Nat(4), &pt(2, 0)),
            Err(Error::ResolutionTooSmall {
                index: 4,
                resolution: 2
            })
        );
    }

    #[test]
    fn character_and_dual_laws_exhaustive() {
        for m in 1..=8u32 {
            let side = 1u64 << m;
            for n in 0..side {
                for a in 0..side {
                    let x = pt(m, a);
                    let wx = walsh(Nat(n as u128), &x).unwrap();
                    for b in 0..side {
                        let y = pt(m, b);
                        let wy = walsh(Nat(n as u128), &y).unwrap();
                        let xy = x.dyadic_add(&y).unwrap();
                        assert_eq!(walsh(Nat(n as u128), &xy).unwrap(), wx * wy);
                        let nb = Nat((n ^ b) as u128);
                        assert_eq!(
                            walsh(nb, &x).unwrap(),
                            wx * walsh(Nat(b as u128), &x).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dyadic_add_group_laws() {
        for a in 0..(1u128 << 10) {
            for b in (0..(1u128 << 10)).step_by(37) {
                let (a, b) = (Nat(a), Nat(b));
                assert_eq!(a.dyadic_add(b), b.dyadic_add(a));
                let c = Nat(a.0.wrapping_mul(7) & 1023);
                assert_eq!(
                    a.dyadic_add(b).dyadic_add(c),
                    a.dyadic_add(b.dyadic_add(c))
                );
                assert_eq!(a.dyadic_add(b).dyadic_add(b), a);
            }
        }
    }

    #[test]
    fn intervals_and_shells() {
        let x = pt(4, 0b1011);
        let i2 = DyadicInterval::new(2, x).unwrap();
        assert_eq!(i2.prefix(), 0b10);
        assert!(i2.contains(&pt(4, 0b1000)));
        assert!(!i2.contains(&pt(4, 0b1100)));
        assert_eq!(i2.cell_range(4).unwrap(), 8..12);
        assert_eq!(DyadicInterval::at_zero(0).cell_range(3).unwrap(), 0..8);
        assert!(in_shell(0, &pt(3, 4)));
        assert!(in_shell(2, &pt(3, 1)));
        assert_eq!(pt(3, 0).shell(), None);
        assert_eq!(shell_of_cell(3, 4), Some(2));
    }
}
