//! Exact fast Walsh–Hadamard transforms in Walsh–Paley order, and
//! XOR-convolution through the spectrum.
//!
//! With `W[j][c] = ω_j(c)` the transform is symmetric and `W·W = 2^m·I`, so the
//! same integer routine performs analysis and synthesis. Coefficient `n` of a
//! grid `f` is `∫ f·ω_n = (W v)[n] / (den·2^m)`.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rational::Rational;

/// Integer lanes the transform runs on. The caller guarantees that
/// `Σ|input|` fits the lane type, which bounds every intermediate value.
pub trait Lane: Copy + Add<Output = Self> + Sub<Output = Self> + Send + Sync {}

impl Lane for i32 {}
impl Lane for i64 {}
impl Lane for i128 {}

#[inline]
fn hadamard<T: Lane>(data: &mut [T]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Swap every index with its `m`-bit reversal.
pub fn bit_reverse_permute<T>(data: &mut [T]) {
    let n = data.len();
    if n <= 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let r = i.reverse_bits() >> (usize::BITS - bits);
        if i < r {
            data.swap(i, r);
        }
    }
}

/// `out[j] = Σ_c data[c]·ω_j(c)` in place; `data.len()` must be a power of two.
pub fn walsh_transform_1d<T: Lane>(data: &mut [T]) {
    debug_assert!(data.len().is_power_of_two());
    hadamard(data);
    bit_reverse_permute(data);
}

/// The two-dimensional transform of a row-major `2^m × 2^m` array.
pub fn walsh_transform_2d<T: Lane>(data: &mut [T], m: u32) {
    let side = 1usize << m;
    debug_assert_eq!(data.len(), side * side);
    data.par_chunks_exact_mut(side)
        .for_each(|row| walsh_transform_1d(row));
    // columns: butterflies between whole rows
    let mut h = 1;
    while h < side {
        data.par_chunks_exact_mut(2 * h * side).for_each(|block| {
            let (a, b) = block.split_at_mut(h * side);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        });
        h *= 2;
    }
    if side > 2 {
        for i in 0..side {
            let r = i.reverse_bits() >> (usize::BITS - m);
            if i < r {
                let (lo, hi) = data.split_at_mut(r * side);
                lo[i * side..(i + 1) * side].swap_with_slice(&mut hi[..side]);
            }
        }
    }
}

fn transform_in_place<const D: usize, T: Lane>(data: &mut [T], m: u32) {
    if D == 1 {
        walsh_transform_1d(data);
    } else {
        walsh_transform_2d(data, m);
    }
}

fn hadamard_big(data: &mut [BigInt]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let s = &*x + &*y;
                let d = &*x - &*y;
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

fn transform_big<const D: usize>(data: &mut [BigInt], m: u32) {
    let side = 1usize << m;
    if D == 1 {
        hadamard_big(data);
        bit_reverse_permute(data);
        return;
    }
    for row in data.chunks_exact_mut(side) {
        hadamard_big(row);
        bit_reverse_permute(row);
    }
    let mut column = vec![BigInt::zero(); side];
    for c in 0..side {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = std::mem::take(&mut data[r * side + c]);
        }
        hadamard_big(&mut column);
        bit_reverse_permute(&mut column);
        for (r, slot) in column.iter_mut().enumerate() {
            data[r * side + c] = std::mem::take(slot);
        }
    }
}

/// `Σ|v|` if it fits in `i128`; the transform of `v` is then overflow-free.
fn l1_bound(values: &[i128]) -> Option<i128> {
    values
        .iter()
        .try_fold(0i128, |acc, v| acc.checked_add(v.checked_abs()?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Coefs {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// Exact Walsh coefficients: `numerators[n] / denominator`.
///
/// Two-dimensional spectra are indexed `j1 * 2^m + j2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum<const D: usize> {
    resolution: u32,
    coefs: Coefs,
    denominator: BigInt,
}

pub type Spectrum1D = Spectrum<1>;
pub type Spectrum2D = Spectrum<2>;

impl<const D: usize> Spectrum<D> {
    /// Coefficients `f(n) / denominator`.
    pub fn from_fn(
        resolution: u32,
        denominator: i128,
        f: impl FnMut(usize) -> i128,
    ) -> Result<Self> {
        crate::grid::check_resolution(D, resolution)?;
        if denominator <= 0 {
            return Err(Error::param("denominator", "must be positive"));
        }
        let coefs = (0..Grid::<D>::cell_count(resolution)).map(f).collect();
        Ok(Spectrum {
            resolution,
            coefs: Coefs::Small(coefs),
            denominator: denominator.into(),
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        match &self.coefs {
            Coefs::Small(v) => v.len(),
            Coefs::Big(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn numerator(&self, idx: usize) -> BigInt {
        match &self.coefs {
            Coefs::Small(v) => v[idx].into(),
            Coefs::Big(v) => v[idx].clone(),
        }
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn coefficient(&self, idx: usize) -> Rational {
        Rational::new(self.numerator(idx), self.denominator.clone())
    }

    /// Index of frequency `(j1, j2)` in a two-dimensional spectrum.
    pub fn index2(&self, j1: usize, j2: usize) -> usize {
        (j1 << self.resolution) | j2
    }

    /// Indices with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| !self.numerator(i).is_zero())
            .collect()
    }

    fn big_numerators(&self) -> Vec<BigInt> {
        match &self.coefs {
            Coefs::Small(v) => v.iter().map(|&x| x.into()).collect(),
            Coefs::Big(v) => v.clone(),
        }
    }

    fn from_big(resolution: u32, coefs: Vec<BigInt>, denominator: BigInt) -> Self {
        let small = coefs
            .iter()
            .map(|c| c.to_i128())
            .collect::<Option<Vec<_>>>();
        let coefs = match small {
            Some(v) => Coefs::Small(v),
            None => Coefs::Big(coefs),
        };
        Spectrum {
            resolution,
            coefs,
            denominator,
        }
    }

    /// Multiply coefficient `n` by `weight(n) / weight_den`.
    pub fn apply_multiplier(
        &self,
        weight: impl Fn(usize) -> i128 + Sync,
        weight_den: i128,
    ) -> Result<Self> {
        if weight_den <= 0 {
            return Err(Error::param("weight_den", "must be positive"));
        }
        let denominator = &self.denominator * weight_den;
        if let Coefs::Small(v) = &self.coefs {
            let scaled: Option<Vec<i128>> = v
                .par_iter()
                .enumerate()
                .map(|(i, &c)| c.checked_mul(weight(i)))
                .collect();
            if let Some(coefs) = scaled {
                return Ok(Spectrum {
                    resolution: self.resolution,
                    coefs: Coefs::Small(coefs),
                    denominator,
                });
            }
        }
        let coefs = self
            .big_numerators()
            .into_iter()
            .enumerate()
            .map(|(i, c)| c * weight(i))
            .collect();
        Ok(Self::from_big(self.resolution, coefs, denominator))
    }

    /// Keep the coefficients selected by `keep`, zero the rest.
    pub fn truncate(&self, keep: impl Fn(usize) -> bool + Sync) -> Self {
        self.apply_multiplier(|i| i128::from(keep(i)), 1)
            .expect("unit weights")
    }

    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution,
                right: other.resolution,
            });
        }
        let denominator = &self.denominator * &other.denominator;
        if let (Coefs::Small(a), Coefs::Small(b)) = (&self.coefs, &other.coefs) {
            let prod: Option<Vec<i128>> =
                a.iter().zip(b).map(|(x, y)| x.checked_mul(*y)).collect();
            if let Some(coefs) = prod {
                return Ok(Spectrum {
                    resolution: self.resolution,
                    coefs: Coefs::Small(coefs),
                    denominator,
                });
            }
        }
        let coefs = self
            .big_numerators()
            .iter()
            .zip(other.big_numerators())
            .map(|(x, y)| x * y)
            .collect();
        Ok(Self::from_big(self.resolution, coefs, denominator))
    }
}

/// Values `Σ_j coefs[j]·ω_j` of an integer Walsh polynomial, on the narrowest
/// lane that provably cannot overflow.
pub fn synthesize<const D: usize>(m: u32, coefs: &[i128]) -> Result<Vec<i128>> {
    let bound = l1_bound(coefs).ok_or(Error::Overflow("synthesis"))?;
    if bound <= i64::MAX as i128 {
        let mut data: Vec<i64> = coefs.iter().map(|&c| c as i64).collect();
        transform_in_place::<D, i64>(&mut data, m);
        Ok(data.into_iter().map(i128::from).collect())
    } else {
        let mut data = coefs.to_vec();
        transform_in_place::<D, i128>(&mut data, m);
        Ok(data)
    }
}

/// Exact Walsh–Fourier coefficients of a grid.
///
/// Runs on `i128` when `Σ|values|` fits, otherwise on big integers.
pub fn fwht_forward<const D: usize>(f: &Grid<D>) -> Result<Spectrum<D>> {
    let m = f.resolution();
    let cells = BigInt::one() << (D as u32 * m);
    let denominator = cells * f.denominator();
    if l1_bound(f.values()).is_some() {
        let mut data = f.values().to_vec();
        transform_in_place::<D, i128>(&mut data, m);
        return Ok(Spectrum {
            resolution: m,
            coefs: Coefs::Small(data),
            denominator,
        });
    }
    let mut data: Vec<BigInt> = f.values().iter().map(|&v| v.into()).collect();
    transform_big::<D>(&mut data, m);
    Ok(Spectrum::from_big(m, data, denominator))
}

/// Synthesize `Σ_n f̂(n) ω_n` back into a grid.
///
/// The common factor `2^(D·m)` introduced by the forward transform is removed
/// when it divides out exactly, so `fwht_inverse(fwht_forward(g)) == g`.
pub fn fwht_inverse<const D: usize>(s: &Spectrum<D>) -> Result<Grid<D>> {
    let m = s.resolution;
    let shift = D as u32 * m;
    let small = match &s.coefs {
        Coefs::Small(v) => l1_bound(v).map(|_| v.clone()),
        Coefs::Big(_) => None,
    };
    let (values, denominator) = match small {
        Some(mut data) => {
            transform_in_place::<D, i128>(&mut data, m);
            let mut den = s.denominator.clone();
            let mask = (1i128 << shift) - 1;
            let divisible = den.is_multiple_of(&(BigInt::one() << shift))
                && data.iter().all(|v| v & mask == 0);
            if divisible {
                data.iter_mut().for_each(|v| *v >>= shift);
                den >>= shift;
            }
            (data, den)
        }
        None => {
            let mut data = s.big_numerators();
            transform_big::<D>(&mut data, m);
            let mut den = s.denominator.clone();
            let unit = BigInt::one() << shift;
            if den.is_multiple_of(&unit) && data.iter().all(|v| v.is_multiple_of(&unit)) {
                data.iter_mut().for_each(|v| *v >>= shift);
                den >>= shift;
            }
            let g = data.iter().fold(den.clone(), |acc, v| acc.gcd(v));
            let data = data
                .into_iter()
                .map(|v| (v / &g).to_i128())
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::Overflow("inverse transform"))?;
            (data, den / g)
        }
    };
    let denominator = denominator
        .abs()
        .to_i128()
        .ok_or(Error::Overflow("inverse transform denominator"))?;
    Grid::new(m, values, denominator)
}

/// `(f * g)(y) = ∫ f(x ⊕ y) g(x) dx`, through the product of the spectra.
pub fn xor_convolve<const D: usize>(f: &Grid<D>, g: &Grid<D>) -> Result<Grid<D>> {
    if f.resolution() != g.resolution() {
        return Err(Error::ResolutionMismatch {
            left: f.resolution(),
            right: g.resolution(),
        });
    }
    let s = fwht_forward(f)?.pointwise_product(&fwht_forward(g)?)?;
    Ok(fwht_inverse(&s)?.normalized())
}
