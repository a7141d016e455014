//! Piecewise-constant functions on `I` and `I²` with exact values.
//!
//! A [`Grid`] stores one signed integer per cell of resolution `m` (per axis)
//! over a single positive denominator. Two-dimensional grids are row-major with
//! the `x¹` cell as the row: index `c1 * 2^m + c2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{pow2, Rational};

pub const MAX_RESOLUTION_1D: u32 = 24;
pub const MAX_RESOLUTION_2D: u32 = 16;

pub type Grid1D = Grid<1>;
pub type Grid2D = Grid<2>;

pub(crate) fn resolution_cap(dims: usize) -> u32 {
    if dims == 1 {
        MAX_RESOLUTION_1D
    } else {
        MAX_RESOLUTION_2D
    }
}

pub(crate) fn check_resolution(dims: usize, m: u32) -> Result<()> {
    let cap = resolution_cap(dims);
    if m > cap {
        Err(Error::ResolutionCap { resolution: m, cap })
    } else {
        Ok(())
    }
}

/// Map a cell index at resolution `fine` to the enclosing cell at `coarse`.
#[inline]
pub(crate) fn coarsen_index<const D: usize>(idx: usize, fine: u32, coarse: u32) -> usize {
    let shift = fine - coarse;
    if D == 1 {
        idx >> shift
    } else {
        let mask = (1usize << fine) - 1;
        let c1 = (idx >> fine) >> shift;
        let c2 = (idx & mask) >> shift;
        (c1 << coarse) | c2
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid<const D: usize> {
    resolution: u32,
    values: Vec<i128>,
    denominator: i128,
}

impl<const D: usize> Grid<D> {
    pub fn cell_count(resolution: u32) -> usize {
        1usize << (D as u32 * resolution)
    }

    pub fn new(resolution: u32, values: Vec<i128>, denominator: i128) -> Result<Self> {
        check_resolution(D, resolution)?;
        if denominator <= 0 {
            return Err(Error::param("denominator", "must be positive"));
        }
        if values.len() != Self::cell_count(resolution) {
            return Err(Error::param(
                "values",
                format!(
                    "expected {} cells, got {}",
                    Self::cell_count(resolution),
                    values.len()
                ),
            ));
        }
        Ok(Grid {
            resolution,
            values,
            denominator,
        })
    }

    pub fn zeros(resolution: u32) -> Result<Self> {
        Self::new(resolution, vec![0; Self::cell_count(resolution)], 1)
    }

    pub fn constant(resolution: u32, numerator: i128, denominator: i128) -> Result<Self> {
        Self::new(
            resolution,
            vec![numerator; Self::cell_count(resolution)],
            denominator,
        )
    }

    pub fn from_fn(
        resolution: u32,
        denominator: i128,
        f: impl FnMut(usize) -> i128,
    ) -> Result<Self> {
        check_resolution(D, resolution)?;
        let values = (0..Self::cell_count(resolution)).map(f).collect();
        Self::new(resolution, values, denominator)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn side(&self) -> usize {
        1 << self.resolution
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }

    pub fn into_values(self) -> Vec<i128> {
        self.values
    }

    pub fn denominator(&self) -> i128 {
        self.denominator
    }

    pub fn value(&self, idx: usize) -> Rational {
        Rational::new(self.values[idx].into(), self.denominator.into())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn cell_measure(&self) -> Rational {
        pow2(-(D as i64 * self.resolution as i64))
    }

    /// `∫ f` over the whole domain.
    pub fn integral(&self) -> Rational {
        let sum: BigInt = self.values.iter().map(|&v| BigInt::from(v)).sum();
        Rational::new(sum, self.denominator.into()) * self.cell_measure()
    }

    /// `‖f‖₁`.
    pub fn l1_norm(&self) -> Rational {
        let sum: BigInt = self.values.iter().map(|&v| BigInt::from(v.abs())).sum();
        Rational::new(sum, self.denominator.into()) * self.cell_measure()
    }

    /// `‖f‖∞`.
    pub fn max_abs(&self) -> Rational {
        let m = self.values.iter().map(|v| v.abs()).max().unwrap_or(0);
        Rational::new(m.into(), self.denominator.into())
    }

    /// Divide values and denominator by their common factor.
    pub fn normalized(&self) -> Self {
        let g = self
            .values
            .iter()
            .fold(self.denominator, |acc, &v| acc.gcd(&v));
        if g <= 1 {
            return self.clone();
        }
        Grid {
            resolution: self.resolution,
            values: self.values.iter().map(|v| v / g).collect(),
            denominator: self.denominator / g,
        }
    }

    /// The same function sampled at a finer resolution.
    pub fn refine(&self, resolution: u32) -> Result<Self> {
        if resolution < self.resolution {
            return Err(Error::param(
                "resolution",
                format!("cannot coarsen {} to {resolution}", self.resolution),
            ));
        }
        if resolution == self.resolution {
            return Ok(self.clone());
        }
        check_resolution(D, resolution)?;
        let values = (0..Self::cell_count(resolution))
            .map(|i| self.values[coarsen_index::<D>(i, resolution, self.resolution)])
            .collect();
        Self::new(resolution, values, self.denominator)
    }

    /// The same function at a coarser resolution; fails unless it is constant
    /// on every coarse cell.
    pub fn coarsen(&self, resolution: u32) -> Result<Self> {
        if resolution > self.resolution {
            return Err(Error::param(
                "resolution",
                format!("cannot refine {} to {resolution}", self.resolution),
            ));
        }
        let mut values = vec![None; Self::cell_count(resolution)];
        for (i, &v) in self.values.iter().enumerate() {
            let slot = &mut values[coarsen_index::<D>(i, self.resolution, resolution)];
            match *slot {
                None => *slot = Some(v),
                Some(w) if w == v => {}
                Some(_) => {
                    return Err(Error::Precondition(format!(
                        "grid is not constant on resolution-{resolution} cells"
                    )))
                }
            }
        }
        Self::new(
            resolution,
            values.into_iter().map(|v| v.unwrap_or(0)).collect(),
            self.denominator,
        )
    }

    /// Exact equality as functions, across resolutions and denominators.
    pub fn same_function(&self, other: &Self) -> bool {
        let m = self.resolution.max(other.resolution);
        let (Ok(a), Ok(b)) = (self.refine(m), other.refine(m)) else {
            return false;
        };
        a.values.iter().zip(&b.values).all(|(&x, &y)| {
            match (x.checked_mul(b.denominator), y.checked_mul(a.denominator)) {
                (Some(l), Some(r)) => l == r,
                _ => BigInt::from(x) * b.denominator == BigInt::from(y) * a.denominator,
            }
        })
    }

    fn combine(&self, other: &Self, sign: i128) -> Result<Self> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        let den = self.denominator.lcm(&other.denominator);
        let fa = den / self.denominator;
        let fb = den / other.denominator;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                let l = a.checked_mul(fa)?;
                let r = b.checked_mul(fb)?.checked_mul(sign)?;
                l.checked_add(r)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("grid addition"))?;
        Ok(Grid::new(self.resolution, values, den)?.normalized())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    /// Multiply by `num / den`.
    pub fn scaled(&self, num: i128, den: i128) -> Result<Self> {
        if den <= 0 {
            return Err(Error::param("den", "must be positive"));
        }
        let values = self
            .values
            .iter()
            .map(|v| v.checked_mul(num))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("grid scaling"))?;
        let denominator = self
            .denominator
            .checked_mul(den)
            .ok_or(Error::Overflow("grid scaling"))?;
        Ok(Grid::new(self.resolution, values, denominator)?.normalized())
    }

    /// Line-oriented text form: `m`, the denominator, then the cell values in
    /// row-major order (one line per row for two-dimensional grids).
    pub fn to_snapshot(&self) -> String {
        let mut out = format!("{}\n{}\n", self.resolution, self.denominator);
        let row = if D == 1 { self.values.len() } else { self.side() };
        for chunk in self.values.chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let bad = |what: &str| Error::Parse(format!("grid snapshot: {what}"));
        let m: u32 = lines
            .next()
            .ok_or_else(|| bad("missing resolution"))?
            .parse()
            .map_err(|_| bad("resolution"))?;
        check_resolution(D, m)?;
        let den: i128 = lines
            .next()
            .ok_or_else(|| bad("missing denominator"))?
            .parse()
            .map_err(|_| bad("denominator"))?;
        let rows: Vec<&str> = lines.collect();
        let expected_rows = if D == 1 { 1 } else { 1usize << m };
        if rows.len() != expected_rows {
            return Err(bad(&format!(
                "expected {expected_rows} value rows, got {}",
                rows.len()
            )));
        }
        let values = rows
            .iter()
            .flat_map(|r| r.split_whitespace())
            .map(|v| v.parse::<i128>().map_err(|_| bad("cell value")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, values, den)
    }
}

impl Grid<2> {
    pub fn at(&self, c1: usize, c2: usize) -> Rational {
        self.value((c1 << self.resolution) | c2)
    }

    pub fn raw(&self, c1: usize, c2: usize) -> i128 {
        self.values[(c1 << self.resolution) | c2]
    }

    pub fn from_fn2(
        resolution: u32,
        denominator: i128,
        mut f: impl FnMut(usize, usize) -> i128,
    ) -> Result<Self> {
        let mask = (1usize << resolution) - 1;
        Self::from_fn(resolution, denominator, |i| f(i >> resolution, i & mask))
    }

    /// Tensor product `(a ⊗ b)(x¹, x²) = a(x¹) b(x²)`.
    pub fn outer(a: &Grid1D, b: &Grid1D) -> Result<Self> {
        if a.resolution != b.resolution {
            return Err(Error::ResolutionMismatch {
                left: a.resolution,
                right: b.resolution,
            });
        }
        let den = a
            .denominator
            .checked_mul(b.denominator)
            .ok_or(Error::Overflow("outer product"))?;
        let mut values = Vec::with_capacity(a.len() * b.len());
        for &x in &a.values {
            for &y in &b.values {
                values.push(x.checked_mul(y).ok_or(Error::Overflow("outer product"))?);
            }
        }
        Self::new(a.resolution, values, den)
    }
}

/// Cellwise running maximum of `|g|` over a family of grids whose
/// denominators may differ. Comparisons cross-multiply; nothing is rounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsMax<const D: usize> {
    resolution: u32,
    num: Vec<i128>,
    den: Vec<i128>,
}

pub type AbsMax1D = AbsMax<1>;
pub type AbsMax2D = AbsMax<2>;

#[inline]
fn greater(a_num: i128, a_den: i128, b_num: i128, b_den: i128) -> bool {
    match (a_num.checked_mul(b_den), b_num.checked_mul(a_den)) {
        (Some(l), Some(r)) => l > r,
        _ => BigInt::from(a_num) * b_den > BigInt::from(b_num) * a_den,
    }
}

impl<const D: usize> AbsMax<D> {
    /// The zero function.
    pub fn new(resolution: u32) -> Result<Self> {
        check_resolution(D, resolution)?;
        let n = Grid::<D>::cell_count(resolution);
        Ok(AbsMax {
            resolution,
            num: vec![0; n],
            den: vec![1; n],
        })
    }

    pub fn from_grid(g: &Grid<D>) -> Self {
        AbsMax {
            resolution: g.resolution,
            num: g.values.iter().map(|v| v.abs()).collect(),
            den: vec![g.denominator; g.len()],
        }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn value(&self, idx: usize) -> Rational {
        Rational::new(self.num[idx].into(), self.den[idx].into())
    }

    /// `(numerator, denominator)` of a cell.
    pub fn raw(&self, idx: usize) -> (i128, i128) {
        (self.num[idx], self.den[idx])
    }

    /// Fold `|values / denominator|` into the running maximum.
    pub fn absorb_values(&mut self, values: &[i128], denominator: i128) -> Result<()> {
        if values.len() != self.num.len() {
            return Err(Error::param("values", "cell count does not match"));
        }
        if denominator <= 0 {
            return Err(Error::param("denominator", "must be positive"));
        }
        for ((n, d), &v) in self.num.iter_mut().zip(self.den.iter_mut()).zip(values) {
            let v = v.abs();
            if greater(v, denominator, *n, *d) {
                *n = v;
                *d = denominator;
            }
        }
        Ok(())
    }

    pub fn absorb(&mut self, g: &Grid<D>) -> Result<()> {
        if g.resolution != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: g.resolution,
            });
        }
        self.absorb_values(&g.values, g.denominator)
    }

    /// Fold another running maximum into this one.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.resolution != self.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        for i in 0..self.num.len() {
            if greater(other.num[i], other.den[i], self.num[i], self.den[i]) {
                self.num[i] = other.num[i];
                self.den[i] = other.den[i];
            }
        }
        Ok(())
    }

    /// Integral of the running maximum over the cells selected by `keep`.
    pub fn integral_where(&self, mut keep: impl FnMut(usize) -> bool) -> Rational {
        let mut by_den: BTreeMap<i128, BigInt> = BTreeMap::new();
        for (i, (&n, &d)) in self.num.iter().zip(&self.den).enumerate() {
            if n != 0 && keep(i) {
                *by_den.entry(d).or_insert_with(BigInt::zero) += n;
            }
        }
        let total: Rational = by_den
            .into_iter()
            .map(|(d, n)| Rational::new(n, d.into()))
            .sum();
        total * pow2(-(D as i64 * self.resolution as i64))
    }

    pub fn integral(&self) -> Rational {
        self.integral_where(|_| true)
    }
}

/// `max(|acc|, |g|)` cellwise, with `g` read over `g_denominator`.
pub fn pointwise_abs_max<const D: usize>(
    acc: &AbsMax<D>,
    g: &Grid<D>,
    g_denominator: Option<i128>,
) -> Result<AbsMax<D>> {
    if g.resolution != acc.resolution {
        return Err(Error::ResolutionMismatch {
            left: acc.resolution,
            right: g.resolution,
        });
    }
    let mut out = acc.clone();
    out.absorb_values(&g.values, g_denominator.unwrap_or(g.denominator))?;
    Ok(out)
}
