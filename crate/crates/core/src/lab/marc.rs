//! The shifted Dirichlet double sum `Σ_{k<2^s} D_k(x¹)D_{n+k}(x²)` on shell
//! rectangles, and its split into the `B1` and `B2` parts.

use std::time::Instant;

use rayon::prelude::*;

use super::report::{Comparison, LemmaReport};
use super::DeltaConstant;
use crate::dyadic::walsh_cell;
use crate::error::{Error, Result};
use crate::rational::{integer, pow2, Rational};
use crate::transform::walsh_transform_1d;

pub const MARC_MAX_S: u32 = 8;

#[inline]
fn digit(cell: u64, m: u32, d: u32) -> u64 {
    (cell >> (m - 1 - d)) & 1
}

fn in_shell(cell: u64, m: u32, t: u32) -> bool {
    t < m && cell >> (m - 1 - t) == 1
}

/// Membership of a resolution-`m` cell in `J_{t¹,i}`: the shell `J_{t¹}` with
/// digits `t¹+1 .. t¹+i−1` zero and digit `t¹+i` one. For `i = 0` the digits
/// `t¹+1 .. t²−1` are zero and digit `t²` is left free.
pub fn in_case_set(cell: u64, m: u32, t1: u32, i: u32, t2: u32) -> bool {
    if !in_shell(cell, m, t1) {
        return false;
    }
    if i == 0 {
        return t2 <= m && (t1 + 1..t2).all(|d| digit(cell, m, d) == 0);
    }
    t1 + i < m && (t1 + 1..t1 + i).all(|d| digit(cell, m, d) == 0) && digit(cell, m, t1 + i) == 1
}

/// `sup_{n<2^s} |Σ_{k<2^s} D_k(x¹)D_{n+k}(x²)|` on every cell at resolution `s+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarcGrid {
    s: u32,
    values: Vec<u64>,
}

impl MarcGrid {
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn resolution(&self) -> u32 {
        self.s + 1
    }

    pub fn value(&self, c1: u64, c2: u64) -> u64 {
        self.values[((c1 << self.resolution()) | c2) as usize]
    }

    pub fn integral_where(&self, keep: impl Fn(u64, u64) -> bool) -> Rational {
        let m = self.resolution();
        let side = 1u64 << m;
        let total: u64 = (0..side * side)
            .filter(|&i| keep(i >> m, i & (side - 1)))
            .map(|i| self.values[i as usize])
            .sum();
        integer(total as i128) * pow2(-2 * m as i64)
    }

    /// `∫_{J_{t¹}×J_{t²}}`.
    pub fn shell_integral(&self, t1: u32, t2: u32) -> Rational {
        let m = self.resolution();
        self.integral_where(|c1, c2| in_shell(c1, m, t1) && in_shell(c2, m, t2))
    }
}

/// `D_k(c)` for all `k ≤ 2^m` on one cell.
fn dirichlet_row(cell: u64, m: u32, count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count + 1);
    let mut acc = 0i64;
    out.push(0);
    for k in 0..count {
        acc += i64::from(walsh_cell(k as u64, cell, m));
        out.push(acc);
    }
    out
}

/// For fixed `x¹` the `x²`-spectrum of the double sum at frequency `j` is the
/// suffix sum `Σ_{k ≥ j−n+1} D_k(x¹)`, so each `n` costs one 1-D transform.
pub fn marc_sup_grid(s: u32) -> Result<MarcGrid> {
    if s > MARC_MAX_S {
        return Err(Error::param("s", format!("{s} exceeds {MARC_MAX_S}")));
    }
    let m = s + 1;
    let side = 1usize << m;
    let len = 1usize << s;
    let rows: Vec<Vec<u64>> = (0..side)
        .into_par_iter()
        .map(|c1| {
            let d = dirichlet_row(c1 as u64, m, len);
            let mut suffix = vec![0i32; len + 1];
            for k in (0..len).rev() {
                suffix[k] = suffix[k + 1] + d[k] as i32;
            }
            let mut best = vec![0u32; side];
            let mut buf = vec![0i32; side];
            for n in 0..len {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = suffix[(j + 1).saturating_sub(n).min(len)];
                }
                walsh_transform_1d(&mut buf);
                for (b, &v) in best.iter_mut().zip(&buf) {
                    *b = (*b).max(v.unsigned_abs());
                }
            }
            best.into_iter().map(u64::from).collect()
        })
        .collect();
    Ok(MarcGrid {
        s,
        values: rows.concat(),
    })
}

fn check_marc(t1: u32, t2: u32, s: u32) -> Result<()> {
    if t1 > t2 {
        return Err(Error::param("t1", format!("t1 = {t1} exceeds t2 = {t2}")));
    }
    if t2 >= s {
        return Err(Error::param("t2", format!("t2 = {t2} must be below s = {s}")));
    }
    if s > MARC_MAX_S {
        return Err(Error::param("s", format!("{s} exceeds {MARC_MAX_S}")));
    }
    Ok(())
}

/// `(t²−t¹+1)³·2^{t¹−t²}·2^s·δ̄^{s−t²}`.
fn marc_expression(t1: u32, t2: u32, s: u32) -> Rational {
    integer(((t2 - t1 + 1) as i128).pow(3))
        * pow2(t1 as i64 - t2 as i64 + s as i64)
        * DeltaConstant::get().power(s - t2)
}

fn marc_report(grid: &MarcGrid, t1: u32, t2: u32) -> LemmaReport {
    let s = grid.s();
    LemmaReport::ratio("marc", grid.shell_integral(t1, t2), marc_expression(t1, t2, s))
        .param("t1", t1)
        .param("t2", t2)
        .param("s", s)
}

pub fn marc_integral(t1: u32, t2: u32, s: u32) -> Result<LemmaReport> {
    check_marc(t1, t2, s)?;
    let start = Instant::now();
    let grid = marc_sup_grid(s)?;
    Ok(marc_report(&grid, t1, t2).elapsed(start))
}

/// Every admissible `0 ≤ t¹ ≤ t² < s ≤ s_max`, one supremum grid per `s`.
pub fn marc_sweep(s_max: u32) -> Result<Vec<LemmaReport>> {
    if s_max > MARC_MAX_S {
        return Err(Error::param("s", format!("{s_max} exceeds {MARC_MAX_S}")));
    }
    let mut out = Vec::new();
    for s in 1..=s_max {
        let start = Instant::now();
        let grid = marc_sup_grid(s)?;
        for t2 in 0..s {
            for t1 in 0..=t2 {
                out.push(marc_report(&grid, t1, t2).elapsed(start));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct B1B2 {
    pub b1: i128,
    pub b2: i128,
    pub full: i128,
}

fn check_b1b2(t1: u32, t2: u32, i: u32, s: u32) -> Result<()> {
    if i == 0 || t1 + i >= t2 {
        return Err(Error::param("i", format!("need 1 <= i < t2 - t1, got i = {i}")));
    }
    if t2 >= s || s > MARC_MAX_S {
        return Err(Error::param("s", format!("need t2 < s <= {MARC_MAX_S}, got s = {s}")));
    }
    Ok(())
}

/// The split from tables `d1[k] = D_k(x¹)`, `d2[k] = D_k(x²)`, `k ≤ 2^{s+1}`.
#[allow(clippy::too_many_arguments)]
fn split(t1: u32, t2: u32, i: u32, s: u32, n: u64, c1: u64, c2: u64, d1: &[i64], d2: &[i64]) -> B1B2 {
    let m = s + 1;
    let cut = t1 + i;
    let (mut b1, mut b2, mut full) = (0i128, 0i128, 0i128);
    for k in 0..1u64 << s {
        let mut f1 = i128::from(walsh_cell((k >> (t1 + 1)) << (t1 + 1), c1, m));
        if (k >> t1) & 1 == 1 {
            f1 = -f1;
        }
        f1 *= (k & ((1 << t1) - 1)) as i128 - (((k >> t1) & 1) << t1) as i128;
        let nk = n + k;
        let mut sign2 = i128::from(walsh_cell((nk >> (t2 + 1)) << (t2 + 1), c2, m));
        if (nk >> t2) & 1 == 1 {
            sign2 = -sign2;
        }
        let low = (nk & ((1 << cut) - 1)) as i128;
        let mid = (nk & ((1 << t2) - 1)) as i128 - low - (((nk >> t2) & 1) << t2) as i128;
        b1 += f1 * sign2 * low;
        b2 += f1 * sign2 * mid;
        full += i128::from(d1[k as usize]) * i128::from(d2[nk as usize]);
    }
    B1B2 { b1, b2, full }
}

/// `B1`, `B2` and the full double sum at one cell of `J_{t¹,i} × J_{t²}` at
/// resolution `s+1`.
pub fn b1b2_decomposition(t1: u32, t2: u32, i: u32, s: u32, n: u64, c1: u64, c2: u64) -> Result<B1B2> {
    check_b1b2(t1, t2, i, s)?;
    let m = s + 1;
    if n >= 1 << s {
        return Err(Error::param("n", format!("{n} must be below 2^s")));
    }
    if c1 >= 1 << m || !in_case_set(c1, m, t1, i, t2) {
        return Err(Error::Precondition(format!("x1 cell {c1} is not in J_(t1,i)")));
    }
    if c2 >= 1 << m || !in_shell(c2, m, t2) {
        return Err(Error::Precondition(format!("x2 cell {c2} is not in J_t2")));
    }
    let len = 1usize << m;
    let d1 = dirichlet_row(c1, m, len);
    let d2 = dirichlet_row(c2, m, len);
    Ok(split(t1, t2, i, s, n, c1, c2, &d1, &d2))
}

/// Additivity `B1 + B2 = full` and `|full| ≤ |B1| + |B2|` at every admissible
/// cell, every `n < 2^s` and every admissible `(t¹, t², i)`, one pair of
/// reports per `s`.
pub fn b1b2_sweep(s_max: u32) -> Result<Vec<LemmaReport>> {
    if s_max > MARC_MAX_S {
        return Err(Error::param("s", format!("{s_max} exceeds {MARC_MAX_S}")));
    }
    let mut out = Vec::new();
    for s in 1..=s_max {
        let start = Instant::now();
        let m = s + 1;
        let side = 1u64 << m;
        let tables: Vec<Vec<i64>> = (0..side).map(|c| dirichlet_row(c, m, side as usize)).collect();
        let mut cases = Vec::new();
        for t2 in 0..s {
            for t1 in 0..t2 {
                for i in 1..t2 - t1 {
                    cases.push((t1, t2, i));
                }
            }
        }
        let (checked, unequal, violated) = cases
            .par_iter()
            .map(|&(t1, t2, i)| {
                let mut acc = (0u64, 0u64, 0u64);
                for c1 in (0..side).filter(|&c| in_case_set(c, m, t1, i, t2)) {
                    for c2 in (0..side).filter(|&c| in_shell(c, m, t2)) {
                        for n in 0..1u64 << s {
                            let r = split(t1, t2, i, s, n, c1, c2, &tables[c1 as usize], &tables[c2 as usize]);
                            acc.0 += 1;
                            acc.1 += u64::from(r.b1 + r.b2 != r.full);
                            acc.2 += u64::from(r.full.abs() > r.b1.abs() + r.b2.abs());
                        }
                    }
                }
                acc
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        out.push(
            LemmaReport::check("b1b2-additivity", integer(unequal as i128), integer(0), Comparison::Equal)
                .param("s", s)
                .param("checked", checked)
                .elapsed(start),
        );
        out.push(
            LemmaReport::check("b1b2-triangle", integer(violated as i128), integer(0), Comparison::Equal)
                .param("s", s)
                .param("checked", checked),
        );
    }
    Ok(out)
}
