//! Maximal triangular Fejér kernels, quasi-locality, convergence of the means,
//! and the exact kernel identities.

use std::str::FromStr;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decompose::decomposition_tiling_check;
use super::report::{Comparison, LemmaReport};
use crate::dyadic::{min_resolution, DyadicInterval, DyadicPoint};
use crate::error::{Error, Result};
use crate::grid::{AbsMax2D, Grid2D};
use crate::kernels;
use crate::ops::{apply_mean, tri_fejer_mean, truncated_tri_maximal, Mean, Path, TestFunction};
use crate::rational::{integer, ratio, Rational};
use crate::region::{integrate_abs_max, Region2D};

pub const SUPKERNEL_MAX_N: u64 = 512;
pub const L1_MAX_N: u64 = 512;

fn count_report(lemma: &str, failures: u64) -> LemmaReport {
    LemmaReport::check(lemma, integer(failures as i128), integer(0), Comparison::Equal)
}

/// Running `sup_{2^a ≤ n ≤ N} |K_n^△|` integrated over `I² \ (I_a × I_a)`,
/// reported at each checkpoint `N`.
pub fn sup_tri_kernel_sweep(a: u32, checkpoints: &[u64]) -> Result<Vec<LemmaReport>> {
    let top = checkpoints.iter().copied().max().unwrap_or(0);
    if top > SUPKERNEL_MAX_N {
        return Err(Error::param("N", format!("{top} exceeds {SUPKERNEL_MAX_N}")));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("N", "checkpoints must increase"));
    }
    if a > 9 {
        return Err(Error::param("a", format!("{a} exceeds 9")));
    }
    let start = Instant::now();
    let m = min_resolution(top.max(2) as u128).max(a);
    let region = Region2D::complement_of_square(a);
    let mut sup = AbsMax2D::new(m)?;
    let mut next = 1u64 << a;
    let mut out = Vec::new();
    for &n_cap in checkpoints {
        if a > 0 && next <= n_cap {
            let chunk = (next..=n_cap)
                .into_par_iter()
                .map(|n| Ok(AbsMax2D::from_grid(&kernels::tri_fejer(n, m)?)))
                .try_reduce(
                    || AbsMax2D::new(m).expect("resolution checked"),
                    |mut x, y| {
                        x.merge(&y)?;
                        Ok(x)
                    },
                )?;
            sup.merge(&chunk)?;
            next = n_cap + 1;
        }
        out.push(
            LemmaReport::info("supkernel", integrate_abs_max(&sup, &region)?)
                .param("a", a)
                .param("N", n_cap)
                .truncated()
                .elapsed(start),
        );
    }
    Ok(out)
}

pub fn sup_tri_kernel_integral(a: u32, n_cap: u64) -> Result<LemmaReport> {
    Ok(sup_tri_kernel_sweep(a, &[n_cap])?.remove(0))
}

/// `‖K_n^△‖₁`, exact.
pub fn tri_kernel_l1(n: u64) -> Result<Rational> {
    if n == 0 || n > L1_MAX_N {
        return Err(Error::param("n", format!("{n} must lie in 1..={L1_MAX_N}")));
    }
    Ok(kernels::tri_fejer(n, min_resolution(n as u128))?.l1_norm())
}

/// `‖K_n^△‖₁` for each `n` in the range, checked against `∫K_n^△ = (n−1)/n`.
pub fn l1_table(range: std::ops::RangeInclusive<u64>) -> Result<Vec<LemmaReport>> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo == 0 || hi > L1_MAX_N || lo > hi {
        return Err(Error::param("n", format!("range must lie in 1..={L1_MAX_N}")));
    }
    range
        .into_par_iter()
        .map(|n| {
            let start = Instant::now();
            let norm = tri_kernel_l1(n)?;
            Ok(LemmaReport::check("l1", norm, ratio(n as i128 - 1, n as i128), Comparison::AtLeast)
                .param("n", n)
                .elapsed(start))
        })
        .collect()
}

/// Outcome of the quasi-locality experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Quasi {
    /// `1 ≤ n < 2^a` with `σ_n^△ f ≢ 0`.
    pub vanishing_failures: Vec<u64>,
    /// `(N, ∫ outside the square of sup_{n≤N} |σ_n^△ f|)`.
    pub outside: Vec<(u64, Rational)>,
    pub l1: Rational,
}

impl Quasi {
    /// The outside integrals divided by `‖f‖₁` (zero for `f = 0`).
    pub fn ratios(&self) -> Vec<Rational> {
        self.outside
            .iter()
            .map(|(_, v)| {
                if self.l1.is_zero() {
                    Rational::zero()
                } else {
                    v / &self.l1
                }
            })
            .collect()
    }

    /// Positions where the ratio decreases.
    pub fn decreases(&self) -> usize {
        self.ratios().windows(2).filter(|w| w[1] < w[0]).count()
    }

    /// Positions where an increment exceeds the one before it.
    pub fn growing_increments(&self) -> usize {
        let r = self.ratios();
        let d: Vec<Rational> = r.windows(2).map(|w| &w[1] - &w[0]).collect();
        d.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

fn interval(a: u32, u: u64) -> Result<DyadicInterval> {
    let r = a.max(1);
    DyadicInterval::new(a, DyadicPoint::new(r, u << (r - a))?)
}

/// For `f` of integral zero supported in `I_a(u1) × I_a(u2)` (`u1`, `u2` cell
/// indices at resolution `a`): `σ_n^△ f ≡ 0` for `n < 2^a`, and the truncated
/// maximal function integrated outside the square at each `N` in `checkpoints`.
pub fn quasi_locality_check(f: &Grid2D, a: u32, u1: u64, u2: u64, checkpoints: &[u64]) -> Result<Quasi> {
    let m = f.resolution();
    if a > m {
        return Err(Error::param("a", format!("{a} exceeds the resolution {m} of f")));
    }
    let (i1, i2) = (interval(a, u1)?, interval(a, u2)?);
    let outside_square = Region2D::complement_of_rectangle(&i1, &i2)?;
    let mask = outside_square.mask(m)?;
    if f.values().iter().zip(&mask).any(|(&v, &out)| out && v != 0) {
        return Err(Error::Precondition("f is not supported in I_a(u1) x I_a(u2)".into()));
    }
    if !f.integral().is_zero() {
        return Err(Error::Precondition("f does not have integral zero".into()));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints[0] == 0 {
        return Err(Error::param("N", "checkpoints must be positive and increasing"));
    }
    let vanishing_failures = (1..1u64 << a)
        .into_par_iter()
        .map(|n| Ok((n, tri_fejer_mean(f, n, Path::Multiplier)?.is_zero())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, zero)| !zero)
        .map(|(n, _)| n)
        .collect();
    let mut sup = AbsMax2D::new(m)?;
    let mut next = 1u64;
    let mut outside = Vec::new();
    for &n_cap in checkpoints {
        if next <= n_cap {
            let indices: Vec<u64> = (next..=n_cap).collect();
            sup.merge(&truncated_tri_maximal(f, &indices)?)?;
            next = n_cap + 1;
        }
        outside.push((n_cap, integrate_abs_max(&sup, &outside_square)?));
    }
    Ok(Quasi {
        vanishing_failures,
        outside,
        l1: f.l1_norm(),
    })
}

/// The quasi-locality experiment as reports: the vanishing check, one row per
/// checkpoint, monotonicity and shrinking increments.
pub fn quasi_reports(f: &Grid2D, a: u32, u1: u64, u2: u64, checkpoints: &[u64]) -> Result<Vec<LemmaReport>> {
    let start = Instant::now();
    let q = quasi_locality_check(f, a, u1, u2, checkpoints)?;
    let with = |r: LemmaReport| r.param("a", a).param("u1", u1).param("u2", u2);
    let mut out = vec![with(count_report("quasi-vanishing", q.vanishing_failures.len() as u64))
        .param("n", format!("1..{}", 1u64 << a))
        .elapsed(start)];
    for (n_cap, v) in &q.outside {
        let row = if q.l1.is_zero() {
            LemmaReport::info("quasi", v.clone())
        } else {
            LemmaReport::ratio("quasi", v.clone(), q.l1.clone())
        };
        out.push(with(row).param("N", n_cap).truncated());
    }
    out.push(with(count_report("quasi-monotone", q.decreases() as u64)));
    out.push(with(count_report("quasi-increments", q.growing_increments() as u64)));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorNorm {
    L1,
    Linf,
    /// `L∞` over cells whose 3×3 neighbourhood of cells sees one value of `f`.
    LinfAway,
}

impl ErrorNorm {
    pub fn label(self) -> &'static str {
        match self {
            ErrorNorm::L1 => "l1",
            ErrorNorm::Linf => "linf",
            ErrorNorm::LinfAway => "linf-away",
        }
    }
}

impl FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(ErrorNorm::L1),
            "linf" => Ok(ErrorNorm::Linf),
            "linf-away" => Ok(ErrorNorm::LinfAway),
            _ => Err(Error::Parse(format!("norm {s:?}: expected l1, linf or linf-away"))),
        }
    }
}

/// Cells whose clipped 3×3 neighbourhood holds a single value of `f`.
fn smooth_cells(f: &Grid2D) -> Vec<bool> {
    let side = f.side() as isize;
    let v = f.values();
    (0..v.len())
        .map(|idx| {
            let (r, c) = (idx as isize / side, idx as isize % side);
            (-1..=1).all(|dr| {
                (-1..=1).all(|dc| {
                    let (rr, cc) = (r + dr, c + dc);
                    !(0..side).contains(&rr)
                        || !(0..side).contains(&cc)
                        || v[(rr * side + cc) as usize] == v[idx]
                })
            })
        })
        .collect()
}

/// `‖σ_n^△ f − f‖` for each `n`.
pub fn convergence_experiment(f: &Grid2D, ns: &[u64], norm: ErrorNorm) -> Result<Vec<(u64, Rational)>> {
    let keep = match norm {
        ErrorNorm::LinfAway => Some(smooth_cells(f)),
        _ => None,
    };
    ns.par_iter()
        .map(|&n| {
            let err = tri_fejer_mean(f, n, Path::Multiplier)?.checked_sub(f)?;
            let value = match norm {
                ErrorNorm::L1 => err.l1_norm(),
                ErrorNorm::Linf => err.max_abs(),
                ErrorNorm::LinfAway => {
                    let keep = keep.as_ref().expect("mask built");
                    let best = err
                        .values()
                        .iter()
                        .zip(keep)
                        .filter(|(_, &k)| k)
                        .map(|(v, _)| v.abs())
                        .max()
                        .unwrap_or(0);
                    ratio(best, err.denominator())
                }
            };
            Ok((n, value))
        })
        .collect()
}

pub fn convergence_reports(f: &Grid2D, ns: &[u64], norm: ErrorNorm) -> Result<Vec<LemmaReport>> {
    let start = Instant::now();
    Ok(convergence_experiment(f, ns, norm)?
        .into_iter()
        .map(|(n, e)| {
            LemmaReport::info("converge", e)
                .param("n", n)
                .param("norm", norm.label())
                .elapsed(start)
        })
        .collect())
}

/// Multiplier, convolution and (where affordable) partial-sum evaluations of
/// the four means agree exactly on seeded random functions.
pub fn mean_paths_check(seeds: std::ops::Range<u64>, m: u32, n_max: u64) -> Result<LemmaReport> {
    let start = Instant::now();
    let seeds: Vec<u64> = seeds.collect();
    let count = seeds.len();
    let failures = seeds
        .into_par_iter()
        .map(|seed| -> Result<u64> {
            let f = TestFunction::random(seed, m)?.grid;
            let mut bad = 0u64;
            for n in 1..=n_max {
                let mut means = vec![
                    Mean::Triangular { n },
                    Mean::Marcinkiewicz { n },
                    Mean::DyadicTriangular { n },
                    Mean::Rectangular { n1: n, n2: n },
                    Mean::Rectangular { n1: n, n2: n_max + 1 - n },
                ];
                means.dedup();
                for mean in means {
                    let spectral = apply_mean(&f, mean, Path::Multiplier)?;
                    let conv = apply_mean(&f, mean, Path::Convolution)?;
                    bad += u64::from(!spectral.same_function(&conv));
                    let rectangles = match mean {
                        Mean::Rectangular { n1, n2 } => n1 * n2,
                        _ => n,
                    };
                    if rectangles <= 64 {
                        let sums = apply_mean(&f, mean, Path::PartialSums)?;
                        bad += u64::from(!spectral.same_function(&sums));
                    }
                }
            }
            Ok(bad)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(count_report("identity-mean-paths", failures)
        .param("seeds", count)
        .param("m", m)
        .param("n_max", n_max)
        .elapsed(start))
}

fn family(lemma: &str, m: u32, n_max: u64, indices: impl IntoParallelIterator<Item = u64>, check: impl Fn(u64) -> Result<bool> + Sync + Send) -> Result<LemmaReport> {
    let start = Instant::now();
    let failures = indices
        .into_par_iter()
        .map(|n| Ok(u64::from(!check(n)?)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(count_report(lemma, failures)
        .param("n_max", n_max)
        .param("m", m)
        .elapsed(start))
}

/// One report per exact identity family, each counting the indices at which
/// two independent constructions disagree.
pub fn identities(n_max: u64, m: u32) -> Result<Vec<LemmaReport>> {
    if n_max == 0 {
        return Err(Error::param("n_max", "must be at least 1"));
    }
    kernels::require_indices(n_max.saturating_sub(1) as u128, m, 2)?;
    let below = 1u64 << m;
    let mut out = vec![
        family("identity-triangular", m, n_max, 1..=n_max, |n| {
            Ok(kernels::tri_fejer_from_partial_sums(n, m)? == kernels::tri_fejer_product(n, m)?)
        })?,
        family("identity-mirrored", m, n_max, 1..=n_max, |n| {
            Ok(kernels::tri_fejer_product(n, m)? == kernels::tri_fejer_mirrored(n, m)?)
        })?,
        family("identity-tri-spectral", m, n_max, 1..=n_max, |n| {
            Ok(kernels::tri_fejer(n, m)? == kernels::tri_fejer_product(n, m)?)
        })?,
        family("identity-dirichlet", m, below - 1, 1..below, |n| {
            Ok(kernels::dirichlet_formula(n, m)? == kernels::dirichlet_direct(n, m)?)
        })?,
        family("identity-dirichlet-spectral", m, below, 0..=below, |n| {
            Ok(kernels::dirichlet(n, m)? == kernels::dirichlet_direct(n, m)?)
        })?,
        family("identity-fejer", m, n_max, 1..=n_max, |n| {
            Ok(kernels::fejer(n, m)? == kernels::fejer_direct(n, m)?)
        })?,
        family("identity-marcinkiewicz", m, n_max, 1..=n_max, |n| {
            Ok(kernels::marcinkiewicz(n, m)? == kernels::marcinkiewicz_direct(n, m)?)
        })?,
        family("identity-reflection", m, u64::from(m), 0..=u64::from(m), |s| {
            reflection_holds(s as u32, m)
        })?,
    ];
    let dyadic_top = (1..=n_max)
        .filter(|&n| kernels::dyadic_tri_resolution(n).map(|r| r <= m).unwrap_or(false))
        .max()
        .unwrap_or(0);
    out.push(family("identity-dyadic", m, dyadic_top, 1..=dyadic_top, |n| {
        Ok(kernels::dyadic_tri(n, m)? == kernels::dyadic_tri_direct(n, m)?)
    })?);
    if n_max <= 1 << m {
        out.push(decomposition_tiling_check(n_max, m)?.param("family", "tiling"));
    }
    let pm = m.min(4);
    out.push(mean_paths_check(0..2, pm, n_max.min(1 << pm))?);
    Ok(out)
}

/// `D_{2^s − k} = D_{2^s} − ω_{2^s − 1}·D_k` for every `k < 2^s`.
fn reflection_holds(s: u32, m: u32) -> Result<bool> {
    let top = 1u64 << s;
    let d_top = kernels::dirichlet(top, m)?;
    let w = kernels::dirichlet(top, m)?.checked_sub(&kernels::dirichlet(top - 1, m)?)?;
    for k in 0..top {
        let lhs = kernels::dirichlet(top - k, m)?;
        let dk = kernels::dirichlet(k, m)?;
        let prod: Vec<i128> = w.values().iter().zip(dk.values()).map(|(a, b)| a * b).collect();
        let rhs: Vec<i128> = d_top.values().iter().zip(&prod).map(|(a, b)| a - b).collect();
        if lhs.values() != rhs.as_slice() {
            return Ok(false);
        }
    }
    Ok(true)
}
