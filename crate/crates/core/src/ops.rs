//! Summation operators on two-dimensional test functions: partial sums, the
//! Fejér-type means, conditional expectations and truncated maximal operators.
//!
//! Each mean can be evaluated along three independent paths: as a spectral
//! multiplier, as an XOR-convolution with its kernel, and as the literal
//! average of rectangular partial sums.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{min_resolution, walsh_cell, DyadicInterval, DyadicPoint};
use crate::error::{Error, Result};
use crate::grid::{check_resolution, AbsMax, AbsMax2D, Grid, Grid2D};
use crate::kernels;
use crate::rational::{parse as parse_rational, Rational};
use crate::region::block_sums;
use crate::transform::{fwht_forward, fwht_inverse, xor_convolve, Spectrum2D};

/// How a test function was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunctionKind {
    /// Indicator of `I_{t1}(c1/2^{t1}) × I_{t2}(c2/2^{t2})`.
    Indicator { t1: u32, t2: u32, c1: u64, c2: u64 },
    /// `Σ q·ω_i ⊗ ω_j` over `(i, j, q)` triples, `q` a fraction string.
    Polynomial { terms: Vec<(u64, u64, String)> },
    /// Seeded values `a/b` with `a ∈ [-6, 6]`, `b ∈ [1, 4]`.
    Random { seed: u64, resolution: u32 },
    /// Seeded mean-zero values supported on `I_a(u1) × I_a(u2)`.
    MeanZero {
        seed: u64,
        resolution: u32,
        a: u32,
        u1: u64,
        u2: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    pub kind: TestFunctionKind,
    pub grid: Grid2D,
}

const RANDOM_DENOMINATOR: i128 = 12;

fn random_values(rng: &mut ChaCha8Rng, count: usize) -> Vec<i128> {
    (0..count)
        .map(|_| {
            let a: i128 = rng.gen_range(-6..=6);
            let b: i128 = rng.gen_range(1..=4);
            a * (RANDOM_DENOMINATOR / b)
        })
        .collect()
}

impl TestFunction {
    pub fn indicator(t1: u32, t2: u32, c1: u64, c2: u64) -> Result<Self> {
        for (t, c, name) in [(t1, c1, "c1"), (t2, c2, "c2")] {
            if t > 63 || c >> t != 0 {
                return Err(Error::param(name, format!("{c} is not a cell of resolution {t}")));
            }
        }
        let m = t1.max(t2);
        check_resolution(2, m)?;
        let grid = Grid2D::from_fn2(m, 1, |a, b| {
            i128::from((a as u64) >> (m - t1) == c1 && (b as u64) >> (m - t2) == c2)
        })?;
        Ok(TestFunction {
            kind: TestFunctionKind::Indicator { t1, t2, c1, c2 },
            grid,
        })
    }

    /// A Walsh polynomial at the smallest resolution resolving its indices.
    pub fn polynomial(terms: &[(u64, u64, Rational)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("terms", "a polynomial needs at least one term"));
        }
        let top = terms.iter().map(|t| t.0.max(t.1)).max().unwrap_or(0);
        let m = min_resolution(top as u128 + 1);
        check_resolution(2, m)?;
        let den = terms
            .iter()
            .fold(BigInt::from(1), |acc, t| acc.lcm(t.2.denom()));
        let den = den.to_i128().ok_or(Error::Overflow("polynomial denominator"))?;
        let scaled: Vec<(u64, u64, i128)> = terms
            .iter()
            .map(|(i, j, q)| {
                (q.numer() * (BigInt::from(den) / q.denom()))
                    .to_i128()
                    .map(|v| (*i, *j, v))
                    .ok_or(Error::Overflow("polynomial coefficient"))
            })
            .collect::<Result<_>>()?;
        let grid = Grid2D::from_fn2(m, den, |a, b| {
            scaled
                .iter()
                .map(|&(i, j, q)| {
                    q * (walsh_cell(i, a as u64, m) * walsh_cell(j, b as u64, m)) as i128
                })
                .sum()
        })?;
        Ok(TestFunction {
            kind: TestFunctionKind::Polynomial {
                terms: terms
                    .iter()
                    .map(|(i, j, q)| (*i, *j, crate::rational::fraction_string(q)))
                    .collect(),
            },
            grid,
        })
    }

    pub fn random(seed: u64, resolution: u32) -> Result<Self> {
        check_resolution(2, resolution)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = random_values(&mut rng, Grid2D::cell_count(resolution));
        Ok(TestFunction {
            kind: TestFunctionKind::Random { seed, resolution },
            grid: Grid2D::new(resolution, values, RANDOM_DENOMINATOR)?.normalized(),
        })
    }

    /// A seeded function with integral zero, supported on `I_a(u1) × I_a(u2)`
    /// where `u1, u2` are cell indices of resolution `a`.
    pub fn mean_zero(seed: u64, resolution: u32, a: u32, u1: u64, u2: u64) -> Result<Self> {
        check_resolution(2, resolution)?;
        if a > resolution {
            return Err(Error::param("a", format!("{a} exceeds the resolution {resolution}")));
        }
        for (u, name) in [(u1, "u1"), (u2, "u2")] {
            if u >> a != 0 {
                return Err(Error::param(name, format!("{u} is not a cell of resolution {a}")));
            }
        }
        let inside = |c1: usize, c2: usize| {
            (c1 as u64) >> (resolution - a) == u1 && (c2 as u64) >> (resolution - a) == u2
        };
        let k = 1usize << (2 * (resolution - a));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = random_values(&mut rng, k);
        let total: i128 = raw.iter().sum();
        let mut it = raw.into_iter();
        let grid = Grid2D::from_fn2(resolution, RANDOM_DENOMINATOR * k as i128, |c1, c2| {
            if inside(c1, c2) {
                it.next().expect("one value per support cell") * k as i128 - total
            } else {
                0
            }
        })?;
        Ok(TestFunction {
            kind: TestFunctionKind::MeanZero {
                seed,
                resolution,
                a,
                u1,
                u2,
            },
            grid: grid.normalized(),
        })
    }

    /// The same function at a finer resolution.
    pub fn at_resolution(&self, m: u32) -> Result<Self> {
        Ok(TestFunction {
            kind: self.kind.clone(),
            grid: self.grid.refine(m)?,
        })
    }

    /// The support square of a mean-zero function.
    pub fn support_square(&self) -> Option<(DyadicInterval, DyadicInterval)> {
        match self.kind {
            TestFunctionKind::MeanZero { a, u1, u2, .. } => {
                let r = a.max(1);
                let at = |u: u64| DyadicInterval::new(a, DyadicPoint::new(r, u << (r - a)).ok()?).ok();
                Some((at(u1)?, at(u2)?))
            }
            _ => None,
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// `indicator:t1:t2:c1:c2`, `poly:i,j,q;...`, `random:seed:m` or
    /// `meanzero:seed:m:a:u1:u2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("test function {s:?}: {what}"));
        let (head, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let ints = |n: usize| -> Result<Vec<u64>> {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != n {
                return Err(bad(&format!("expected {n} fields")));
            }
            parts
                .iter()
                .map(|p| p.trim().parse::<u64>().map_err(|_| bad(&format!("bad integer {p:?}"))))
                .collect()
        };
        let small = |v: u64| u32::try_from(v).map_err(|_| bad("value too large"));
        match head {
            "indicator" => {
                let v = ints(4)?;
                Self::indicator(small(v[0])?, small(v[1])?, v[2], v[3])
            }
            "random" => {
                let v = ints(2)?;
                Self::random(v[0], small(v[1])?)
            }
            "meanzero" => {
                let v = ints(5)?;
                Self::mean_zero(v[0], small(v[1])?, small(v[2])?, v[3], v[4])
            }
            "poly" => {
                let terms = rest
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        let f: Vec<&str> = t.split(',').collect();
                        if f.len() != 3 {
                            return Err(bad(&format!("term {t:?} needs i,j,q")));
                        }
                        let i = f[0].trim().parse().map_err(|_| bad("bad index"))?;
                        let j = f[1].trim().parse().map_err(|_| bad("bad index"))?;
                        let q = parse_rational(f[2]).ok_or_else(|| bad("bad coefficient"))?;
                        Ok((i, j, q))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::polynomial(&terms)
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

/// Evaluation strategy for the means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Path {
    /// Scale each Walsh coefficient by the mean's weight.
    Multiplier,
    /// XOR-convolve with the mean's kernel.
    Convolution,
    /// Average the rectangular partial sums the mean is defined by.
    PartialSums,
}

/// The summation methods of this module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mean", rename_all = "kebab-case")]
pub enum Mean {
    /// `σ_n^△ f = (1/n) Σ_{k<n} S_{k,n-k} f`.
    Triangular { n: u64 },
    /// `σ_{n1,n2} f = (1/(n1 n2)) Σ_{k1<n1} Σ_{k2<n2} S_{k1,k2} f`.
    Rectangular { n1: u64, n2: u64 },
    /// `t_n f = (1/n) Σ_{k<n} S_{k,k} f`.
    Marcinkiewicz { n: u64 },
    /// `σ̇_n^△ f = (1/n) Σ_{k<n} S_{k,n⊕k} f`.
    DyadicTriangular { n: u64 },
}

impl Mean {
    fn check(&self) -> Result<()> {
        let zero = match *self {
            Mean::Triangular { n } | Mean::Marcinkiewicz { n } | Mean::DyadicTriangular { n } => {
                n == 0
            }
            Mean::Rectangular { n1, n2 } => n1 == 0 || n2 == 0,
        };
        if zero {
            Err(Error::param("n", "means are defined for n ≥ 1"))
        } else {
            Ok(())
        }
    }

    /// `(numerator, denominator)` of the multiplier at frequency `(i, j)`.
    pub fn weight(&self, i: u64, j: u64) -> (i128, i128) {
        match *self {
            Mean::Triangular { n } => ((n as i128 - i as i128 - j as i128 - 1).max(0), n as i128),
            Mean::Rectangular { n1, n2 } => (
                (n1 as i128 - 1 - i as i128).max(0) * (n2 as i128 - 1 - j as i128).max(0),
                n1 as i128 * n2 as i128,
            ),
            Mean::Marcinkiewicz { n } => ((n as i128 - 1 - i.max(j) as i128).max(0), n as i128),
            Mean::DyadicTriangular { n } => (
                (i + 1..n).filter(|&k| j < n ^ k).count() as i128,
                n as i128,
            ),
        }
    }

    fn denominator(&self) -> i128 {
        self.weight(0, 0).1
    }

    /// The kernel grid `den·K` over `den`, at resolution `m`.
    fn kernel(&self, m: u32) -> Result<Grid2D> {
        match *self {
            Mean::Triangular { n } => kernels::tri_fejer(n, m),
            Mean::Rectangular { n1, n2 } => kernels::rect_fejer(n1, n2, m),
            Mean::Marcinkiewicz { n } => kernels::marcinkiewicz(n, m),
            Mean::DyadicTriangular { n } => kernels::dyadic_tri(n, m),
        }
    }

    /// Resolution at which the kernel is representable.
    fn kernel_resolution(&self) -> Result<u32> {
        Ok(match *self {
            Mean::Triangular { n } | Mean::Marcinkiewicz { n } => min_resolution(n as u128 - 1),
            Mean::Rectangular { n1, n2 } => min_resolution(n1.max(n2) as u128 - 1),
            Mean::DyadicTriangular { n } => kernels::dyadic_tri_resolution(n)?,
        })
    }

    /// The rectangles `(k1, k2)` averaged by the mean, over its denominator.
    fn rectangles(&self) -> Vec<(u64, u64)> {
        match *self {
            Mean::Triangular { n } => (0..n).map(|k| (k, n - k)).collect(),
            Mean::Rectangular { n1, n2 } => (0..n1)
                .flat_map(|k1| (0..n2).map(move |k2| (k1, k2)))
                .collect(),
            Mean::Marcinkiewicz { n } => (0..n).map(|k| (k, k)).collect(),
            Mean::DyadicTriangular { n } => (0..n).map(|k| (k, n ^ k)).collect(),
        }
    }
}

/// `f̂(i, j)` for all frequencies below `2^m`.
pub fn coefficients_2d(f: &Grid2D) -> Result<Spectrum2D> {
    fwht_forward(f)
}

fn check_rect_index(f: &Grid2D, n1: u64, n2: u64) -> Result<()> {
    let side = f.side() as u64;
    for (n, name) in [(n1, "n1"), (n2, "n2")] {
        if n > side {
            return Err(Error::param(
                name,
                format!("{n} exceeds the {side} frequencies of a resolution-{} grid", f.resolution()),
            ));
        }
    }
    Ok(())
}

fn rect_truncation(spec: &Spectrum2D, n1: u64, n2: u64) -> Result<Grid2D> {
    let m = spec.resolution();
    let mask = (1u64 << m) - 1;
    let kept = spec.truncate(|idx| {
        let (i, j) = ((idx as u64) >> m, idx as u64 & mask);
        i < n1 && j < n2
    });
    Ok(fwht_inverse(&kept)?.normalized())
}

/// `S_{n1,n2} f`: keep the frequencies in `[0, n1) × [0, n2)`.
pub fn partial_sum_rect(f: &Grid2D, n1: u64, n2: u64) -> Result<Grid2D> {
    check_rect_index(f, n1, n2)?;
    rect_truncation(&fwht_forward(f)?, n1, n2)
}

/// `S_k^△ f`: keep the frequencies with `i + j ≤ k - 1`.
pub fn partial_sum_tri(f: &Grid2D, k: u64) -> Result<Grid2D> {
    let limit = 2 * f.side() as u64;
    if k > limit {
        return Err(Error::param(
            "k",
            format!("{k} exceeds {limit}, beyond which S_k^△ f = f"),
        ));
    }
    let spec = fwht_forward(f)?;
    let m = spec.resolution();
    let mask = (1u64 << m) - 1;
    let kept = spec.truncate(|idx| ((idx as u64) >> m) + (idx as u64 & mask) < k);
    Ok(fwht_inverse(&kept)?.normalized())
}

/// `S_k^△ f` as the XOR-convolution with `D_k^△`.
pub fn partial_sum_tri_convolution(f: &Grid2D, k: u64) -> Result<Grid2D> {
    let m = f.resolution().max(min_resolution(k as u128));
    let g = f.refine(m)?;
    xor_convolve(&g, &kernels::tri_dirichlet(k, m)?)?
        .coarsen(f.resolution())
        .map(|g| g.normalized())
}

/// Apply a mean to the spectrum of a resolution-`m` function.
pub fn mean_from_spectrum(spec: &Spectrum2D, mean: Mean) -> Result<Grid2D> {
    mean.check()?;
    let m = spec.resolution();
    let mask = (1u64 << m) - 1;
    let den = mean.denominator();
    let scaled = spec.apply_multiplier(
        |idx| mean.weight((idx as u64) >> m, idx as u64 & mask).0,
        den,
    )?;
    Ok(fwht_inverse(&scaled)?.normalized())
}

/// Evaluate a mean of `f` along the chosen path.
pub fn apply_mean(f: &Grid2D, mean: Mean, path: Path) -> Result<Grid2D> {
    mean.check()?;
    match path {
        Path::Multiplier => mean_from_spectrum(&fwht_forward(f)?, mean),
        Path::Convolution => {
            let m = f.resolution().max(mean.kernel_resolution()?);
            check_resolution(2, m)?;
            let g = f.refine(m)?;
            let conv = xor_convolve(&g, &mean.kernel(m)?)?;
            Ok(conv.coarsen(f.resolution())?.normalized())
        }
        Path::PartialSums => {
            let spec = fwht_forward(f)?;
            let side = f.side() as u64;
            let mut acc = Grid2D::zeros(f.resolution())?;
            for (k1, k2) in mean.rectangles() {
                let s = rect_truncation(&spec, k1.min(side), k2.min(side))?;
                acc = acc.checked_add(&s)?;
            }
            acc.scaled(1, mean.denominator())
        }
    }
}

pub fn tri_fejer_mean(f: &Grid2D, n: u64, path: Path) -> Result<Grid2D> {
    apply_mean(f, Mean::Triangular { n }, path)
}

pub fn fejer_mean_rect(f: &Grid2D, n1: u64, n2: u64, path: Path) -> Result<Grid2D> {
    apply_mean(f, Mean::Rectangular { n1, n2 }, path)
}

pub fn marcinkiewicz_mean(f: &Grid2D, n: u64, path: Path) -> Result<Grid2D> {
    apply_mean(f, Mean::Marcinkiewicz { n }, path)
}

pub fn dyadic_tri_mean(f: &Grid2D, n: u64, path: Path) -> Result<Grid2D> {
    apply_mean(f, Mean::DyadicTriangular { n }, path)
}

/// `E_n f`: the average of `f` over each `I_n` cell (per axis), kept at the
/// resolution of `f`.
pub fn conditional_expectation<const D: usize>(f: &Grid<D>, n: u32) -> Result<Grid<D>> {
    let m = f.resolution();
    if n > m {
        return Err(Error::param(
            "n",
            format!("{n} exceeds the grid resolution {m}"),
        ));
    }
    let sums = block_sums::<D>(f.values(), m, n);
    let coarse = Grid::<D>::new(n, sums, f.denominator() << (D as u32 * (m - n)))?;
    Ok(coarse.refine(m)?.normalized())
}

/// `sup_{n ∈ indices} |σ f|` cellwise, evaluated through the spectrum.
pub fn truncated_maximal(f: &Grid2D, indices: &[u64], family: fn(u64) -> Mean) -> Result<AbsMax2D> {
    if indices.is_empty() {
        return Err(Error::param("indices", "the index set is empty"));
    }
    let spec = fwht_forward(f)?;
    let m = f.resolution();
    indices
        .par_iter()
        .map(|&n| {
            let g = mean_from_spectrum(&spec, family(n))?;
            Ok(AbsMax::from_grid(&g))
        })
        .try_reduce_with(|mut a, b| {
            a.merge(&b)?;
            Ok(a)
        })
        .unwrap_or_else(|| AbsMax::new(m))
}

/// `sup_{n ∈ indices} |σ_n^△ f|`.
pub fn truncated_tri_maximal(f: &Grid2D, indices: &[u64]) -> Result<AbsMax2D> {
    truncated_maximal(f, indices, |n| Mean::Triangular { n })
}
