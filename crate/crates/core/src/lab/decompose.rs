//! The digit-block decomposition of `n·K_n^△` and the pieces of the
//! maximal-kernel integral it is split into.

use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, LemmaReport};
use crate::dyadic::{min_resolution, shell_of_cell, walsh_cell};
use crate::error::{Error, Result};
use crate::grid::{AbsMax1D, Grid, Grid2D};
use crate::kernels::{fejer, require_indices, tri_fejer};
use crate::rational::{integer, pow2, ratio, Rational};
use crate::region::{integrate_abs_max, CellRange, Region1D};
use crate::transform::{synthesize, walsh_transform_1d};

pub const SUPPARTS_MAX_A: u32 = 8;
pub const YANO_MAX_S: u32 = 12;

/// `T_s = Σ_{k<2^s} D_{a+k} ⊗ D_{n−a−k}` with `a = n^(s+1)`, for every `s`
/// with `n_s = 1`, from its spectrum: coefficient `(j1, j2)` counts the `k`
/// with `j1 < a+k` and `j2 < n−a−k`.
pub fn decomposition_terms(n: u64, m: u32) -> Result<Vec<(u32, Grid2D)>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    require_indices(n as u128, m, 2)?;
    let side = 1usize << m;
    (0..64 - n.leading_zeros())
        .filter(|s| (n >> s) & 1 == 1)
        .map(|s| {
            let a = (n >> (s + 1)) << (s + 1);
            let len = 1i128 << s;
            let coefs: Vec<i128> = (0..side * side)
                .into_par_iter()
                .map(|idx| {
                    let (j1, j2) = ((idx / side) as i128, (idx % side) as i128);
                    let hi = len.min(n as i128 - a as i128 - j2);
                    let lo = (j1 - a as i128 + 1).max(0);
                    (hi - lo).max(0)
                })
                .collect();
            Ok((s, Grid::new(m, synthesize::<2>(m, &coefs)?, 1)?))
        })
        .collect()
}

/// `Σ_s T_s = n·K_n^△` for every `1 ≤ n ≤ n_max` at resolution `m`.
pub fn decomposition_tiling_check(n_max: u64, m: u32) -> Result<LemmaReport> {
    let start = Instant::now();
    require_indices(n_max as u128, m, 2)?;
    let failures = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<u64> {
            let mut sum = vec![0i128; 1 << (2 * m)];
            for (_, t) in decomposition_terms(n, m)? {
                for (a, v) in sum.iter_mut().zip(t.values()) {
                    *a += v;
                }
            }
            Ok(u64::from(sum.as_slice() != tri_fejer(n, m)?.values()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(
        LemmaReport::check("tiling", integer(failures as i128), integer(0), Comparison::Equal)
            .param("n_max", n_max)
            .param("m", m)
            .elapsed(start),
    )
}

/// Which digit positions `s` a part of the decomposition keeps, relative to
/// the shells `x ∈ J_{t¹} × J_{t²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `s ≤ t¹`.
    Low,
    /// `t¹ < s ≤ t²`.
    Middle,
    /// `s > t²`.
    High,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Low, Variant::Middle, Variant::High];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Low => "t1",
            Variant::Middle => "t2",
            Variant::High => "t3",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn of(s: u32, t1: u32, t2: u32) -> Variant {
        if s <= t1 {
            Variant::Low
        } else if s <= t2 {
            Variant::Middle
        } else {
            Variant::High
        }
    }
}

/// `sup_{A∈range} sup_{|n|=A} 2^{−A} Σ_{s∈variant} n_s|T_s(x)|` on every cell at
/// resolution `A_max + 1`, for all three variants at once.
///
/// Every term is measurable at that resolution, and on `I_R` each `D_j` equals
/// `j`, so the cell of `I_R` stands exactly for every deeper shell.
#[derive(Clone, Debug, PartialEq)]
pub struct SupParts {
    resolution: u32,
    range: RangeInclusive<u32>,
    /// Numerators over `2^{A_max}`.
    values: [Vec<u64>; 3],
    reversal_checked: u64,
    reversal_mismatches: u64,
    /// Largest `|T_s| / 2^{t¹ + min(t², A) + s}` over low terms on shell cells.
    crude: (u64, u32),
}

fn shell_or_tail(cell: u64, m: u32) -> u32 {
    shell_of_cell(cell, m).unwrap_or(m)
}

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

struct RowParts {
    best: [Vec<u64>; 3],
    reversal_checked: u64,
    reversal_mismatches: u64,
    crude: (u64, u32),
}

fn crude_greater(a: (u64, u32), b: (u64, u32)) -> bool {
    (u128::from(a.0) << b.1) > (u128::from(b.0) << a.1)
}

impl SupParts {
    /// One pass over every `x¹` row; `reversal` also checks, for `x¹ ∉ I_s`,
    /// `|T_s| = |Σ_{k<2^s} D_k(x¹)D_{n_(s−1)+k}(x²)|`.
    pub fn compute(range: RangeInclusive<u32>, reversal: bool) -> Result<Self> {
        let (lo, hi) = (*range.start(), *range.end());
        check_parts(0, &range)?;
        let r = hi + 1;
        let side = 1usize << r;
        let t2s: Vec<u32> = (0..side as u64).map(|c| shell_or_tail(c, r)).collect();
        let rows: Vec<RowParts> = (0..side as u64)
            .into_par_iter()
            .map(|c1| {
                let t1 = shell_or_tail(c1, r);
                let d = dirichlet_row(c1, r, side);
                let mut row = RowParts {
                    best: [vec![0; side], vec![0; side], vec![0; side]],
                    reversal_checked: 0,
                    reversal_mismatches: 0,
                    crude: (0, 0),
                };
                let mut acc = [vec![0u64; side], vec![0u64; side], vec![0u64; side]];
                let mut buf = vec![0i64; side];
                let mut rev = vec![0i64; side];
                let mut pre = vec![0i64; (1 << hi) + 1];
                for a_exp in lo..=hi {
                    for n in 1u64 << a_exp..2u64 << a_exp {
                        for v in acc.iter_mut() {
                            v.fill(0);
                        }
                        for s in (0..=a_exp).filter(|s| (n >> s) & 1 == 1) {
                            let a = ((n >> (s + 1)) << (s + 1)) as usize;
                            let len = 1usize << s;
                            for k in 0..len {
                                pre[k + 1] = pre[k] + d[a + k];
                            }
                            let top = n as i64 - a as i64;
                            for (j, b) in buf.iter_mut().enumerate() {
                                *b = pre[(top - j as i64).clamp(0, len as i64) as usize];
                            }
                            walsh_transform_1d(&mut buf);
                            let check = reversal && s >= 1 && c1 >> (r - s) != 0;
                            if check {
                                let b = (n as usize) & (len - 1);
                                let mut suffix = vec![0i64; len + 1];
                                for k in (0..len).rev() {
                                    suffix[k] = suffix[k + 1] + d[k];
                                }
                                for (j, v) in rev.iter_mut().enumerate() {
                                    *v = suffix[(j + 1).saturating_sub(b).min(len)];
                                }
                                walsh_transform_1d(&mut rev);
                            }
                            for c2 in 0..side {
                                let mag = buf[c2].unsigned_abs();
                                let variant = Variant::of(s, t1, t2s[c2]);
                                acc[variant.index()][c2] += mag;
                                if variant == Variant::Low && c1 != 0 {
                                    let e = t1 + t2s[c2].min(a_exp) + s;
                                    if crude_greater((mag, e), row.crude) {
                                        row.crude = (mag, e);
                                    }
                                }
                                if check {
                                    row.reversal_checked += 1;
                                    row.reversal_mismatches += u64::from(rev[c2].unsigned_abs() != mag);
                                }
                            }
                        }
                        for (best, acc) in row.best.iter_mut().zip(&acc) {
                            for (b, &v) in best.iter_mut().zip(acc) {
                                *b = (*b).max(v << (hi - a_exp));
                            }
                        }
                    }
                }
                row
            })
            .collect();
        let mut values = [Vec::new(), Vec::new(), Vec::new()];
        let (mut checked, mut mismatches, mut crude) = (0, 0, (0, 0));
        for row in rows {
            for (v, b) in values.iter_mut().zip(row.best) {
                v.extend(b);
            }
            checked += row.reversal_checked;
            mismatches += row.reversal_mismatches;
            if crude_greater(row.crude, crude) {
                crude = row.crude;
            }
        }
        Ok(SupParts {
            resolution: r,
            range,
            values,
            reversal_checked: checked,
            reversal_mismatches: mismatches,
            crude,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    fn integral_where(&self, variant: Variant, keep: impl Fn(u64, u64) -> bool) -> Rational {
        let r = self.resolution;
        let mask = (1u64 << r) - 1;
        let total: BigInt = self.values[variant.index()]
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i as u64 >> r, *i as u64 & mask))
            .map(|(_, &v)| BigInt::from(v))
            .sum();
        Rational::from_integer(total) * pow2(-(*self.range.end() as i64) - 2 * r as i64)
    }

    /// `∫_{J_{t¹}×J_{t²}}` of one variant; `t² ≥ R` reads as the whole tail `I_R`.
    pub fn shell_integral(&self, variant: Variant, t1: u32, t2: u32) -> Rational {
        let r = self.resolution;
        self.integral_where(variant, |c1, c2| {
            shell_or_tail(c1, r) == t1 && shell_or_tail(c2, r) == t2.min(r)
        })
    }

    /// `Σ_{t¹≤a} Σ_{t²≥t¹} ∫_{J_{t¹}×J_{t²}}`, which is the integral over
    /// `⋃_{t¹≤a} J_{t¹} × I_{t¹}`.
    pub fn outer_sum(&self, variant: Variant, a: u32) -> Rational {
        let r = self.resolution;
        self.integral_where(variant, |c1, c2| {
            let (t1, t2) = (shell_or_tail(c1, r), shell_or_tail(c2, r));
            t1 <= a && t1 < r && t2 >= t1
        })
    }

    /// Measured constant of the crude pointwise bound on low terms.
    pub fn crude_constant(&self) -> Rational {
        integer(self.crude.0 as i128) * pow2(-(self.crude.1 as i64))
    }

    /// `(checked, mismatches)` of the reversal identity.
    pub fn reversal(&self) -> (u64, u64) {
        (self.reversal_checked, self.reversal_mismatches)
    }
}

fn check_parts(a: u32, range: &RangeInclusive<u32>) -> Result<()> {
    if *range.start() < a {
        return Err(Error::param("A", format!("range must start at a = {a} or above")));
    }
    if range.start() > range.end() || *range.end() > SUPPARTS_MAX_A {
        return Err(Error::param(
            "A",
            format!("range must be nonempty with maximum at most {SUPPARTS_MAX_A}"),
        ));
    }
    Ok(())
}

fn range_label(range: &RangeInclusive<u32>) -> String {
    format!("{}..={}", range.start(), range.end())
}

fn shell_rows(parts: &SupParts, a: u32, t1: u32, t2: u32, label: &str, start: Instant) -> Vec<LemmaReport> {
    Variant::ALL
        .iter()
        .map(|&v| {
            LemmaReport::info(&format!("supparts-{}", v.label()), parts.shell_integral(v, t1, t2))
                .param("a", a)
                .param("t1", t1)
                .param("t2", t2)
                .param("A", label)
                .truncated()
                .elapsed(start)
        })
        .collect()
}

fn summary_rows(parts: &SupParts, a: u32, label: &str) -> Vec<LemmaReport> {
    let mut out: Vec<LemmaReport> = Variant::ALL
        .iter()
        .map(|&v| {
            LemmaReport::info(&format!("supparts-{}-outer", v.label()), parts.outer_sum(v, a))
                .param("a", a)
                .param("A", label)
                .truncated()
        })
        .collect();
    let (checked, mismatches) = parts.reversal();
    out.push(
        LemmaReport::check("supparts-reversal", integer(mismatches as i128), integer(0), Comparison::Equal)
            .param("A", label)
            .param("checked", checked),
    );
    out.push(
        LemmaReport::info("supparts-crude", parts.crude_constant())
            .param("A", label)
            .note("max |T_s| / 2^(t1 + min(t2, A) + s) over s <= t1"),
    );
    out
}

/// Per-`(t¹, t²)` integrals of the three parts, their outer sums over
/// `t¹ ≤ a`, the reversal identity and the crude pointwise constant.
pub fn sup_kernel_parts(a: u32, t1: u32, t2: u32, range: RangeInclusive<u32>) -> Result<Vec<LemmaReport>> {
    check_parts(a, &range)?;
    if t1 > a {
        return Err(Error::param("t1", format!("t1 = {t1} exceeds a = {a}")));
    }
    if t2 < t1 {
        return Err(Error::param("t2", format!("t2 = {t2} is below t1 = {t1}")));
    }
    if t2 > *range.end() + 1 {
        return Err(Error::param(
            "t2",
            format!("t2 = {t2} exceeds the resolution {} of the range", range.end() + 1),
        ));
    }
    let start = Instant::now();
    let parts = SupParts::compute(range.clone(), true)?;
    let label = range_label(&range);
    let mut out = shell_rows(&parts, a, t1, t2, &label, start);
    out.extend(summary_rows(&parts, a, &label));
    Ok(out)
}

/// Every `t¹ ≤ a`, `t¹ ≤ t² ≤ A_max + 1` (the last standing for all deeper
/// shells) from a single pass.
pub fn sup_kernel_parts_sweep(a: u32, range: RangeInclusive<u32>) -> Result<Vec<LemmaReport>> {
    check_parts(a, &range)?;
    let start = Instant::now();
    let parts = SupParts::compute(range.clone(), true)?;
    let label = range_label(&range);
    let r = parts.resolution();
    let mut out = Vec::new();
    for t1 in 0..=a {
        for t2 in t1..=r {
            out.extend(shell_rows(&parts, a, t1, t2, &label, start));
        }
    }
    out.extend(summary_rows(&parts, a, &label));
    Ok(out)
}

/// On `J_{t¹}`, `K_{2^s}` vanishes off the cell `I_s(e_{t¹})`; the largest
/// `|K_{2^s}| / 2^{t¹}` there is the measured constant.
pub fn yano_check(t1: u32, s: u32) -> Result<Vec<LemmaReport>> {
    if t1 >= s {
        return Err(Error::param("t1", format!("t1 = {t1} must be below s = {s}")));
    }
    if s > YANO_MAX_S {
        return Err(Error::param("s", format!("{s} exceeds {YANO_MAX_S}")));
    }
    let start = Instant::now();
    let n = 1u64 << s;
    let k = fejer(n, s)?;
    let target = 1usize << (s - 1 - t1);
    let shell = CellRange::shell(t1).at(s)?;
    let mut outside = 0i128;
    let mut peak = 0i128;
    for c in shell {
        let v = k.values()[c as usize];
        if c as usize == target {
            peak = peak.max(v.abs());
        } else if v != 0 {
            outside += 1;
        }
    }
    let constant = ratio(peak, k.denominator()) * pow2(-(t1 as i64));
    Ok(vec![
        LemmaReport::check("yano-support", integer(outside), integer(0), Comparison::Equal)
            .param("t1", t1)
            .param("s", s)
            .elapsed(start),
        LemmaReport::info("yano-constant", constant).param("t1", t1).param("s", s),
    ])
}

/// `∫_{J_{t¹}} max_{2^A ≤ n ≤ N} |K_n|` against `(2^{t¹}/2^A)(A−t¹+1)`.
pub fn mem_maximal_check(t1: u32, a: u32, big_n: u64) -> Result<LemmaReport> {
    if t1 > a {
        return Err(Error::param("t1", format!("t1 = {t1} exceeds A = {a}")));
    }
    if a > 40 || big_n < 1 << a {
        return Err(Error::param("N", format!("N = {big_n} must be at least 2^A")));
    }
    let start = Instant::now();
    let m = min_resolution(big_n as u128).max(t1 + 1);
    require_indices(big_n.saturating_sub(1) as u128, m, 1)?;
    let sup = (1u64 << a..=big_n)
        .into_par_iter()
        .map(|n| -> Result<AbsMax1D> { Ok(AbsMax1D::from_grid(&fejer(n, m)?)) })
        .try_reduce(
            || AbsMax1D::new(m).expect("resolution checked"),
            |mut x, y| {
                x.merge(&y)?;
                Ok(x)
            },
        )?;
    let measured = integrate_abs_max(&sup, &Region1D::product([CellRange::shell(t1)]))?;
    let expression = pow2(t1 as i64 - a as i64) * integer((a - t1 + 1) as i128);
    Ok(LemmaReport::ratio("mem", measured, expression)
        .param("t1", t1)
        .param("A", a)
        .param("N", big_n)
        .truncated()
        .note("sup truncated to 2^A <= n <= N is a lower bound")
        .elapsed(start))
}

#[cfg(test)]
mod tests {
    use num_traits::Signed;

    use super::*;
    use crate::kernels::dirichlet_direct;

    fn term_direct(n: u64, s: u32, m: u32) -> Vec<i128> {
        let a = (n >> (s + 1)) << (s + 1);
        let side = 1usize << m;
        let mut acc = vec![0i128; side * side];
        for k in 0..1u64 << s {
            let d1 = dirichlet_direct(a + k, m).unwrap();
            let d2 = dirichlet_direct(n - a - k, m).unwrap();
            for c1 in 0..side {
                for c2 in 0..side {
                    acc[c1 * side + c2] += d1.values()[c1] * d2.values()[c2];
                }
            }
        }
        acc
    }

    #[test]
    fn terms_match_their_definition() {
        for n in 1..=12u64 {
            for (s, t) in decomposition_terms(n, 4).unwrap() {
                assert_eq!(t.values(), term_direct(n, s, 4).as_slice(), "n = {n}, s = {s}");
            }
        }
    }

    #[test]
    fn five_splits_into_two_terms() {
        let terms = decomposition_terms(5, 3).unwrap();
        assert_eq!(terms.iter().map(|(s, _)| *s).collect::<Vec<_>>(), vec![0, 2]);
        let mut sum = vec![0i128; 64];
        for (_, t) in &terms {
            for (a, v) in sum.iter_mut().zip(t.values()) {
                *a += v;
            }
        }
        assert_eq!(sum.as_slice(), tri_fejer(5, 3).unwrap().values());
        let single = decomposition_terms(8, 4).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].1.values(), term_direct(8, 3, 4).as_slice());
    }

    #[test]
    fn tiling_holds() {
        assert!(decomposition_tiling_check(32, 6).unwrap().passed());
        assert!(decomposition_terms(0, 3).is_err());
        assert!(decomposition_terms(9, 3).is_err());
    }

    /// The three parts by the literal sums over all cells and all `n`.
    fn parts_literal(range: RangeInclusive<u32>) -> [Vec<Rational>; 3] {
        let hi = *range.end();
        let r = hi + 1;
        let side = 1usize << r;
        let mut best = [vec![integer(0); side * side], vec![integer(0); side * side], vec![integer(0); side * side]];
        for a_exp in range {
            for n in 1u64 << a_exp..2u64 << a_exp {
                let terms = decomposition_terms(n, r).unwrap();
                for idx in 0..side * side {
                    let (c1, c2) = ((idx / side) as u64, (idx % side) as u64);
                    let (t1, t2) = (shell_or_tail(c1, r), shell_or_tail(c2, r));
                    let mut acc = [0i128; 3];
                    for (s, t) in &terms {
                        acc[Variant::of(*s, t1, t2).index()] += t.values()[idx].abs();
                    }
                    for v in 0..3 {
                        let val = integer(acc[v]) * pow2(-(a_exp as i64));
                        if val > best[v][idx] {
                            best[v][idx] = val;
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn sup_parts_match_enumeration() {
        for range in [1..=1, 1..=2, 2..=3] {
            let parts = SupParts::compute(range.clone(), true).unwrap();
            let lit = parts_literal(range.clone());
            let hi = *range.end() as i64;
            for v in Variant::ALL {
                let got: Vec<Rational> = parts.values[v.index()]
                    .iter()
                    .map(|&x| integer(x as i128) * pow2(-hi))
                    .collect();
                assert_eq!(got, lit[v.index()], "{range:?} {v:?}");
            }
            let (checked, bad) = parts.reversal();
            assert!(checked > 0);
            assert_eq!(bad, 0);
        }
    }

    #[test]
    fn sup_parts_hand_case() {
        let reports = sup_kernel_parts(1, 0, 0, 1..=1).unwrap();
        let low = &reports[0];
        assert_eq!(low.lemma, "supparts-t1");
        let lit = parts_literal(1..=1);
        let expected: Rational = (0..16usize)
            .filter(|i| shell_or_tail((i / 4) as u64, 2) == 0 && shell_or_tail((i % 4) as u64, 2) == 0)
            .map(|i| lit[0][i].clone())
            .sum::<Rational>()
            * pow2(-4);
        assert_eq!(low.measured, expected);
        assert!(reports.iter().all(LemmaReport::passed));
        assert!(sup_kernel_parts(1, 2, 2, 1..=2).is_err());
        assert!(sup_kernel_parts(2, 0, 0, 1..=2).is_err());
    }

    #[test]
    fn outer_sum_covers_every_deeper_shell() {
        let parts = SupParts::compute(1..=2, false).unwrap();
        for v in Variant::ALL {
            let by_shells: Rational = (0..=1u32)
                .flat_map(|t1| (t1..=3).map(move |t2| (t1, t2)))
                .map(|(t1, t2)| parts.shell_integral(v, t1, t2))
                .sum();
            assert_eq!(parts.outer_sum(v, 1), by_shells);
        }
    }

    #[test]
    fn yano_support() {
        let r = yano_check(0, 2).unwrap();
        assert!(r[0].passed());
        let k = fejer(4, 2).unwrap();
        assert_ne!(k.values()[2], 0);
        assert_eq!(k.values()[3], 0);
        for s in 1..=8 {
            for t1 in 0..s {
                assert!(yano_check(t1, s).unwrap()[0].passed(), "t1 = {t1}, s = {s}");
            }
        }
        assert!(yano_check(3, 3).is_err());
    }

    #[test]
    fn mem_by_enumeration() {
        let r = mem_maximal_check(0, 0, 4).unwrap();
        let m = 2;
        let mut best = vec![integer(0); 4];
        for n in 1..=4u64 {
            let k = fejer_direct_values(n, m);
            for (b, v) in best.iter_mut().zip(k) {
                if v > *b {
                    *b = v;
                }
            }
        }
        let expected: Rational = best[2..].iter().cloned().sum::<Rational>() * pow2(-2);
        assert_eq!(r.measured, expected);
        let mut previous = integer(0);
        for big_n in [16u64, 24, 32, 64] {
            let v = mem_maximal_check(2, 4, big_n).unwrap().measured;
            assert!(v >= previous);
            previous = v;
        }
        assert!(mem_maximal_check(3, 2, 8).is_err());
        assert!(mem_maximal_check(0, 3, 4).is_err());
    }

    fn fejer_direct_values(n: u64, m: u32) -> Vec<Rational> {
        let g = crate::kernels::fejer_direct(n, m).unwrap();
        (0..g.len()).map(|i| g.value(i).abs()).collect()
    }

    #[test]
    fn sweep_matches_single_rows() {
        let sweep = sup_kernel_parts_sweep(1, 1..=2).unwrap();
        let single = sup_kernel_parts(1, 0, 2, 1..=2).unwrap();
        let pick = |rows: &[LemmaReport]| {
            rows.iter()
                .find(|r| r.lemma == "supparts-t2" && r.params_string().contains("t1=0;t2=2"))
                .unwrap()
                .measured
                .clone()
        };
        assert_eq!(pick(&sweep), pick(&single));
    }
}
