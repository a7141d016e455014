//! The exponential-decay estimate for averaged Walsh products, the quadruple
//! count behind it, and its rescaled form on small dyadic squares.

use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, LemmaReport};
use super::DeltaConstant;
use crate::dyadic::walsh_cell;
use crate::error::{Error, Result};
use crate::grid::AbsMax2D;
use crate::rational::{integer, pow2, Rational};
use crate::transform::{synthesize, walsh_transform_1d};

pub const DELTA1_MAX_A: u32 = 10;
pub const QUADRUPLE_MAX_A: u32 = 8;
pub const CORF_MAX_S: u32 = 10;
pub const CORF_FULL_MAX_S: u32 = 8;

/// `∫ sup_n |2^{−A} Σ_{k<2^A} ω_k(x¹)ω_{k+n}(x²)| dx` split by the range of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Delta1 {
    pub a: u32,
    /// Supremum over `n ≤ 2^A`.
    pub full: Rational,
    /// Supremum over `n < 2^A`.
    pub below: Rational,
    /// The single term `n = 2^A`.
    pub special: Rational,
    /// `Σ_{n<2^A} ∫ T_n⁴` for the unnormalized sums `T_n`.
    pub fourth_moment: Rational,
}

pub fn delta1(a: u32) -> Result<Delta1> {
    if a > DELTA1_MAX_A {
        return Err(Error::param("A", format!("{a} exceeds {DELTA1_MAX_A}")));
    }
    let m = a + 1;
    let side = 1usize << m;
    let half = 1usize << a;
    let (full, below, special, fourth) = (0..side)
        .into_par_iter()
        .map(|c1| {
            let w: Vec<i32> = (0..half)
                .map(|k| walsh_cell(k as u64, c1 as u64, m))
                .collect();
            let mut best = vec![0u32; side];
            let mut buf = vec![0i32; side];
            let mut fourth = 0u128;
            for n in 0..half {
                buf.fill(0);
                buf[n..n + half].copy_from_slice(&w);
                walsh_transform_1d(&mut buf);
                for (b, &v) in best.iter_mut().zip(&buf) {
                    let v = v.unsigned_abs();
                    *b = (*b).max(v);
                    let q = u128::from(v) * u128::from(v);
                    fourth += q * q;
                }
            }
            buf.fill(0);
            buf[half..].copy_from_slice(&w);
            walsh_transform_1d(&mut buf);
            let mut row = (0u64, 0u64, 0u64, fourth);
            for (&b, &v) in best.iter().zip(&buf) {
                let v = v.unsigned_abs();
                row.0 += u64::from(b.max(v));
                row.1 += u64::from(b);
                row.2 += u64::from(v);
            }
            row
        })
        .reduce(
            || (0, 0, 0, 0),
            |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2, x.3 + y.3),
        );
    let scale = pow2(-(a as i64) - 2 * m as i64);
    let exact = |v: u64| integer(v as i128) * &scale;
    Ok(Delta1 {
        a,
        full: exact(full),
        below: exact(below),
        special: exact(special),
        fourth_moment: Rational::from_integer(BigInt::from(fourth)) * pow2(-2 * m as i64),
    })
}

/// Reports for each `A` in the range: the bound `8·δ̄^A`, the exact `n = 2^A`
/// term, the `n < 2^A` part, and decay against the previous `A`.
pub fn delta1_reports(range: std::ops::RangeInclusive<u32>) -> Result<Vec<LemmaReport>> {
    if *range.end() > DELTA1_MAX_A {
        return Err(Error::param("A", format!("{} exceeds {DELTA1_MAX_A}", range.end())));
    }
    let delta = DeltaConstant::get();
    let mut out = Vec::new();
    let mut previous: Option<Delta1> = None;
    for a in range {
        let start = Instant::now();
        let d = delta1(a)?;
        let bound = integer(8) * delta.power(a);
        out.push(
            LemmaReport::check("delta1", d.full.clone(), bound, Comparison::AtMost)
                .param("A", a)
                .note("sup over n <= 2^A")
                .elapsed(start),
        );
        out.push(
            LemmaReport::check("delta1-special", d.special.clone(), pow2(-(a as i64)), Comparison::Equal)
                .param("A", a)
                .param("n", 1u64 << a),
        );
        out.push(LemmaReport::info("delta1-below", d.below.clone()).param("A", a));
        if let Some(p) = &previous {
            out.push(
                LemmaReport::check("delta1-decay", d.full.clone(), p.full.clone(), Comparison::AtMost)
                    .param("A", a)
                    .note(format!("measured(A) against measured(A-1) = {}", p.full)),
            );
        }
        previous = Some(d);
    }
    Ok(out)
}

/// Number of `(n, k, l, i) ∈ [0, 2^A)^4` with
/// `(k+n) ⊕ (l+n) ⊕ (i+n) = (k ⊕ l ⊕ i) + n`, by exhaustive sweep.
pub fn quadruple_count(a: u32) -> Result<u64> {
    if a > QUADRUPLE_MAX_A {
        return Err(Error::param("A", format!("{a} exceeds {QUADRUPLE_MAX_A}")));
    }
    let size = 1u32 << a;
    Ok((0..size)
        .into_par_iter()
        .map(|n| {
            let mut count = 0u64;
            for k in 0..size {
                let kn = k + n;
                for l in 0..size {
                    let x = kn ^ (l + n);
                    let y = k ^ l;
                    count += u64::from(
                        (0..size)
                            .map(|i| u32::from((x ^ (i + n)) == ((y ^ i) + n)))
                            .sum::<u32>(),
                    );
                }
            }
            count
        })
        .sum())
}

/// How the remainder factor of the block-count bound is read for
/// `A mod 4 ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemainderReading {
    /// `2^(4·(A mod 4))`, which is at most `2^12`.
    Capped,
    /// `2^12` for every `A`.
    Literal,
}

/// `(2^16 − 1)^⌊A/4⌋` times the remainder factor.
pub fn quadruple_bound(a: u32, reading: RemainderReading) -> BigInt {
    let blocks = BigInt::from(0xffffu32).pow(a / 4);
    let rem = match reading {
        RemainderReading::Capped => 4 * (a % 4),
        RemainderReading::Literal => 12,
    };
    blocks << rem
}

/// The count against both readings of the bound, and for `A ≤ duality_max`
/// the fourth-moment identity with the averaged Walsh products.
pub fn quadruple_reports(a: u32, duality_max: u32) -> Result<Vec<LemmaReport>> {
    let start = Instant::now();
    let count = quadruple_count(a)?;
    let measured = integer(count as i128);
    let mut out = vec![
        LemmaReport::check(
            "quadruples",
            measured.clone(),
            Rational::from_integer(quadruple_bound(a, RemainderReading::Capped)),
            Comparison::AtMost,
        )
        .param("A", a)
        .param("remainder", "2^(4(A mod 4))")
        .elapsed(start),
        LemmaReport::check(
            "quadruples",
            measured.clone(),
            Rational::from_integer(quadruple_bound(a, RemainderReading::Literal)),
            Comparison::AtMost,
        )
        .param("A", a)
        .param("remainder", "2^12"),
        LemmaReport::check(
            "quadruples-trivial",
            measured.clone(),
            Rational::from_integer(BigInt::from(1u8) << (4 * a)),
            Comparison::AtMost,
        )
        .param("A", a),
    ];
    if a <= duality_max {
        let d = delta1(a)?;
        out.push(
            LemmaReport::check("quadruples-duality", d.fourth_moment, measured, Comparison::Equal)
                .param("A", a)
                .note("sum over n < 2^A of the integral of T_n^4"),
        );
    }
    Ok(out)
}

const PATTERN: [u32; 4] = [2, 0, 2, 4];

/// Every quadruple carrying the excluded 4-bit pattern in block `s` fails the
/// counting equation; one report per block with the number of survivors.
pub fn pattern_exclusion_check(a: u32) -> Result<Vec<LemmaReport>> {
    if a == 0 || !a.is_multiple_of(4) || a > QUADRUPLE_MAX_A {
        return Err(Error::param("A", format!("{a} must be 4 or 8")));
    }
    let free = a - 4;
    let mut out = Vec::new();
    for s in 1..=a / 4 {
        let start = Instant::now();
        let lo = 4 * (s - 1);
        let positions: Vec<u32> = (0..a).filter(|p| !(lo..lo + 4).contains(p)).collect();
        let scatter: Vec<u32> = (0..1u32 << free)
            .map(|bits| {
                positions
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (t, &p)| acc | (((bits >> t) & 1) << p))
            })
            .collect();
        let [pn, pk, pl, pi] = PATTERN.map(|v| v << lo);
        let survivors: u64 = scatter
            .par_iter()
            .map(|&fnn| {
                let n = fnn | pn;
                let mut c = 0u64;
                for &fk in &scatter {
                    let k = fk | pk;
                    for &fl in &scatter {
                        let l = fl | pl;
                        for &fi in &scatter {
                            let i = fi | pi;
                            c += u64::from(((k + n) ^ (l + n) ^ (i + n)) == ((k ^ l ^ i) + n));
                        }
                    }
                }
                c
            })
            .sum();
        out.push(
            LemmaReport::check("patterns", integer(survivors as i128), integer(0), Comparison::Equal)
                .param("A", a)
                .param("s", s)
                .param("completions", 1u64 << (4 * free))
                .elapsed(start),
        );
    }
    Ok(out)
}

fn check_corf(t2: u32, s: u32, low: u64, max_s: u32) -> Result<()> {
    if t2 >= s {
        return Err(Error::param("t2", format!("t2 = {t2} must be below s = {s}")));
    }
    if s > max_s {
        return Err(Error::param("s", format!("{s} exceeds {max_s}")));
    }
    if low >> (t2 + 1) != 0 {
        return Err(Error::param("low", format!("{low} has bits above t2 = {t2}")));
    }
    Ok(())
}

/// `2^{2t²} ∫_{I_{t²+1}(u)²} F_{t²,s}` computed on the reduced variables
/// `y = (x_{t²+1}, x_{t²+2}, …)`, in which `F` is a supremum of shifted
/// Walsh products of length `2^{s−t²−1}`.
pub fn corf_value(t2: u32, s: u32, low: u64) -> Result<Rational> {
    check_corf(t2, s, low, CORF_MAX_S)?;
    let local = s - t2;
    let side = 1usize << local;
    let count = 1usize << (local - 1);
    let hmax = (((1u64 << s) - 1 + low) >> (t2 + 1)) as usize;
    let total: u64 = (0..side)
        .into_par_iter()
        .map(|y1| {
            let w: Vec<i32> = (0..count)
                .map(|l| walsh_cell(l as u64, y1 as u64, local))
                .collect();
            let mut best = vec![0u32; side];
            let mut buf = vec![0i32; side];
            for h in 0..=hmax {
                buf.fill(0);
                buf[h..h + count].copy_from_slice(&w);
                walsh_transform_1d(&mut buf);
                for (b, &v) in best.iter_mut().zip(&buf) {
                    *b = (*b).max(v.unsigned_abs());
                }
            }
            best.iter().map(|&b| u64::from(b)).sum::<u64>()
        })
        .sum();
    Ok(integer(total as i128) * pow2(-2 * local as i64 - 2))
}

/// `F_{t²,s}` on all of `I²` at resolution `s+1`, straight from its
/// definition: for each `n`, the product sum is synthesized from its spectrum.
pub fn corf_full(t2: u32, s: u32, low: u64) -> Result<AbsMax2D> {
    check_corf(t2, s, low, CORF_FULL_MAX_S)?;
    let m = s + 1;
    let side = 1usize << m;
    let shift = t2 + 1;
    let highs: Vec<u64> = (0..1u64 << (s - t2 - 1)).map(|h| h << shift).collect();
    (0..1u64 << s)
        .into_par_iter()
        .map(|n| {
            let mut coefs = vec![0i128; side * side];
            for &kh in &highs {
                let k = kh + low;
                let j1 = (k >> shift) << shift;
                let j2 = ((n + k) >> shift) << shift;
                coefs[(j1 as usize) * side + j2 as usize] += 1;
            }
            let values = synthesize::<2>(m, &coefs)?;
            let mut acc = AbsMax2D::new(m)?;
            acc.absorb_values(&values, 1)?;
            Ok(acc)
        })
        .try_reduce(
            || AbsMax2D::new(m).expect("resolution checked"),
            |mut a, b| {
                a.merge(&b)?;
                Ok(a)
            },
        )
}

/// The rescaled integral against `2^{s−t²}δ̄^{s−t²}`; for `s ≤ 8` also the
/// independence of `F` from the digits `0..=t²` and agreement with the
/// full-resolution construction.
pub fn corf_bound(t2: u32, s: u32, low: u64) -> Result<Vec<LemmaReport>> {
    let start = Instant::now();
    let measured = corf_value(t2, s, low)?;
    let e = s - t2;
    let expression = pow2(e as i64) * DeltaConstant::get().power(e);
    let params = |r: LemmaReport| r.param("t2", t2).param("s", s).param("low", low);
    let mut out = vec![params(LemmaReport::ratio("corF", measured.clone(), expression)).elapsed(start)];
    if s <= CORF_FULL_MAX_S {
        let full = corf_full(t2, s, low)?;
        let m = s + 1;
        let side = 1usize << m;
        let keep = (1usize << (m - t2 - 1)) - 1;
        let mut moved = 0i128;
        for idx in 0..full.len() {
            let (c1, c2) = (idx >> m, idx & (side - 1));
            let base = ((c1 & keep) << m) | (c2 & keep);
            if full.raw(idx) != full.raw(base) {
                moved += 1;
            }
        }
        out.push(params(LemmaReport::check(
            "corF-invariance",
            integer(moved),
            integer(0),
            Comparison::Equal,
        )));
        let direct = full.integral_where(|idx| (idx >> m) & !keep == 0 && (idx & (side - 1)) & !keep == 0)
            * pow2(2 * t2 as i64);
        out.push(params(
            LemmaReport::check("corF-direct", direct, measured, Comparison::Equal)
                .note("full-resolution construction over I_(t2+1)(0)^2"),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// `Σ_{n≤2^A}`-split integrals straight from the definition.
    fn delta1_oracle(a: u32) -> (Rational, Rational) {
        let m = a + 1;
        let side = 1u64 << m;
        let (mut full, mut special) = (0i128, 0i128);
        for c1 in 0..side {
            for c2 in 0..side {
                let mut best = 0i128;
                for n in 0..=(1u64 << a) {
                    let t: i128 = (0..1u64 << a)
                        .map(|k| (walsh_cell(k, c1, m) * walsh_cell(k + n, c2, m)) as i128)
                        .sum();
                    best = best.max(t.abs());
                    if n == 1 << a {
                        special += t.abs();
                    }
                }
                full += best;
            }
        }
        let scale = pow2(-(a as i64) - 2 * m as i64);
        (integer(full) * &scale, integer(special) * scale)
    }

    #[test]
    fn delta1_matches_enumeration() {
        for a in 0..=3 {
            let d = delta1(a).unwrap();
            let (full, special) = delta1_oracle(a);
            assert_eq!(d.full, full, "A = {a}");
            assert_eq!(d.special, special);
            assert!(d.below <= d.full);
        }
        assert_eq!(delta1(0).unwrap().full, ratio(1, 1));
    }

    #[test]
    fn delta1_special_case() {
        for a in 0..=6 {
            assert_eq!(delta1(a).unwrap().special, pow2(-(a as i64)));
        }
    }

    #[test]
    fn delta1_range_is_checked() {
        assert!(delta1(11).is_err());
        assert!(delta1_reports(0..=11).is_err());
    }

    /// Counts solutions digit by digit: the four sums `k+n, l+n, i+n, j+n`
    /// with `j = k⊕l⊕i` XOR to zero iff the carries into every digit, and the
    /// final carries out, have even parity.
    fn quadruple_count_by_carries(a: u32) -> u64 {
        let mut states = [0u64; 16];
        states[0] = 1;
        for _ in 0..a {
            let mut next = [0u64; 16];
            for (carry, &ways) in states.iter().enumerate() {
                if ways == 0 || carry.count_ones() % 2 == 1 {
                    continue;
                }
                for bits in 0..16u32 {
                    let (n, k, l, i) = (bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1);
                    let x = [k, l, i, k ^ l ^ i];
                    let mut out = 0usize;
                    for (t, &xt) in x.iter().enumerate() {
                        let c = ((carry >> t) & 1) as u32;
                        out |= (((xt + n + c) >> 1) as usize) << t;
                    }
                    next[out] += ways;
                }
            }
            states = next;
        }
        states
            .iter()
            .enumerate()
            .filter(|(c, _)| c.count_ones() % 2 == 0)
            .map(|(_, &w)| w)
            .sum()
    }

    #[test]
    fn quadruple_count_small_cases() {
        assert_eq!(quadruple_count(0).unwrap(), 1);
        let brute: u64 = (0..4u32)
            .flat_map(|n| (0..4u32).flat_map(move |k| (0..4u32).flat_map(move |l| (0..4u32).map(move |i| (n, k, l, i)))))
            .filter(|&(n, k, l, i)| (k + n) ^ (l + n) ^ (i + n) == (k ^ l ^ i) + n)
            .count() as u64;
        assert_eq!(quadruple_count(2).unwrap(), brute);
        for a in 0..=6 {
            assert_eq!(quadruple_count(a).unwrap(), quadruple_count_by_carries(a), "A = {a}");
        }
        assert!(quadruple_count(9).is_err());
    }

    #[test]
    fn quadruple_bound_readings() {
        assert_eq!(quadruple_bound(8, RemainderReading::Capped), BigInt::from(0xffffu64 * 0xffff));
        assert_eq!(quadruple_bound(3, RemainderReading::Capped), BigInt::from(1u32 << 12));
        assert_eq!(quadruple_bound(1, RemainderReading::Capped), BigInt::from(16));
        assert_eq!(quadruple_bound(1, RemainderReading::Literal), BigInt::from(1u32 << 12));
    }

    #[test]
    fn fourth_moment_counts_quadruples() {
        for a in 0..=4 {
            let reports = quadruple_reports(a, 4).unwrap();
            let duality = reports.iter().find(|r| r.lemma == "quadruples-duality").unwrap();
            assert!(duality.passed(), "A = {a}");
        }
    }

    #[test]
    fn patterns_are_excluded() {
        let r = pattern_exclusion_check(4).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].passed());
        assert!(pattern_exclusion_check(6).is_err());
    }

    fn corf_oracle(t2: u32, s: u32, low: u64) -> Rational {
        let full = corf_full(t2, s, low).unwrap();
        let m = s + 1;
        let top = m - t2 - 1;
        full.integral_where(|idx| (idx >> m) >> top == 0 && (idx & ((1 << m) - 1)) >> top == 0)
            * pow2(2 * t2 as i64)
    }

    /// `F` by the literal double loop over `n` and the free digits of `k`.
    fn corf_literal(t2: u32, s: u32, low: u64) -> Vec<i128> {
        let m = s + 1;
        let shift = t2 + 1;
        let side = 1u64 << m;
        let mut out = Vec::new();
        for c1 in 0..side {
            for c2 in 0..side {
                let best = (0..1u64 << s)
                    .map(|n| {
                        (0..1u64 << (s - shift))
                            .map(|h| {
                                let k = (h << shift) + low;
                                (walsh_cell((k >> shift) << shift, c1, m)
                                    * walsh_cell(((n + k) >> shift) << shift, c2, m))
                                    as i128
                            })
                            .sum::<i128>()
                            .abs()
                    })
                    .max()
                    .unwrap();
                out.push(best);
            }
        }
        out
    }

    #[test]
    fn corf_hand_value() {
        assert_eq!(corf_value(0, 1, 0).unwrap(), ratio(1, 4));
        assert_eq!(corf_value(0, 1, 1).unwrap(), ratio(1, 4));
    }

    #[test]
    fn corf_matches_definition() {
        for (t2, s) in [(0, 2), (1, 3), (0, 3), (2, 4)] {
            let lit = corf_literal(t2, s, 0);
            let full = corf_full(t2, s, 0).unwrap();
            for (idx, &v) in lit.iter().enumerate() {
                assert_eq!(full.raw(idx), (v, 1));
            }
        }
        for t2 in 0..3u32 {
            for s in t2 + 1..=5 {
                for low in 0..1u64 << (t2 + 1) {
                    assert_eq!(corf_value(t2, s, low).unwrap(), corf_oracle(t2, s, low), "{t2} {s} {low}");
                }
            }
        }
        assert_eq!(corf_value(1, 4, 0).unwrap(), corf_oracle(1, 4, 0));
    }

    #[test]
    fn corf_reports_pass() {
        for r in corf_bound(1, 4, 2).unwrap() {
            assert!(r.passed(), "{r:?}");
        }
        assert!(corf_bound(2, 2, 0).is_err());
        assert!(corf_bound(1, 4, 4).is_err());
    }
}
