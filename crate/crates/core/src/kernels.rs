//! Dirichlet, Fejér, triangular and Marcinkiewicz kernels as exact grids.
//!
//! Every kernel has a fast spectral construction (its Walsh coefficients are
//! integer counts, synthesized by one transform) and a construction that
//! follows the defining sum literally. Averaged kernels are returned scaled by
//! `n`: the integer grid of `n·K_n` over the denominator `n`.

use rayon::prelude::*;

use crate::dyadic::{walsh_cell, Nat};
use crate::error::{Error, Result};
use crate::grid::{check_resolution, Grid, Grid1D, Grid2D};
use crate::transform::synthesize;

/// Walsh indices `0..count` must be resolvable at resolution `m`.
pub(crate) fn require_indices(count: u128, m: u32, dims: usize) -> Result<()> {
    check_resolution(dims, m)?;
    if count > 1u128 << m {
        return Err(Error::ResolutionTooSmall {
            index: count - 1,
            resolution: m,
        });
    }
    Ok(())
}

fn spectral_1d(m: u32, den: i128, coef: impl Fn(u64) -> i128 + Sync) -> Result<Grid1D> {
    let coefs: Vec<i128> = (0..1u64 << m).into_par_iter().map(&coef).collect();
    Grid::new(m, synthesize::<1>(m, &coefs)?, den)
}

fn spectral_2d(m: u32, den: i128, coef: impl Fn(u64, u64) -> i128 + Sync) -> Result<Grid2D> {
    let side = 1u64 << m;
    let coefs: Vec<i128> = (0..side * side)
        .into_par_iter()
        .map(|i| coef(i >> m, i & (side - 1)))
        .collect();
    Grid::new(m, synthesize::<2>(m, &coefs)?, den)
}

fn walsh_row(k: u64, m: u32) -> impl Iterator<Item = i128> {
    (0..1u64 << m).map(move |c| walsh_cell(k, c, m) as i128)
}

/// `D_n = Σ_{k<n} ω_k`.
pub fn dirichlet(n: u64, m: u32) -> Result<Grid1D> {
    require_indices(n as u128, m, 1)?;
    spectral_1d(m, 1, |j| i128::from(j < n))
}

/// `D_n` by accumulating the Walsh functions one at a time.
pub fn dirichlet_direct(n: u64, m: u32) -> Result<Grid1D> {
    require_indices(n as u128, m, 1)?;
    let mut acc = vec![0i128; 1 << m];
    for k in 0..n {
        for (a, w) in acc.iter_mut().zip(walsh_row(k, m)) {
            *a += w;
        }
    }
    Grid::new(m, acc, 1)
}

/// `D_{2^i}`: `2^i` on `I_i`, zero elsewhere.
pub fn dirichlet_power(i: u32, m: u32) -> Result<Grid1D> {
    require_indices(1u128 << i, m, 1)?;
    Grid::from_fn(m, 1, |c| if c >> (m - i) == 0 { 1 << i } else { 0 })
}

/// `D_n = ω_n Σ_{i ≤ |n|} n_i r_i D_{2^i}`.
pub fn dirichlet_formula(n: u64, m: u32) -> Result<Grid1D> {
    let top = Nat::from(n).order()?;
    require_indices(n as u128, m, 1)?;
    Grid::from_fn(m, 1, |c| {
        let c = c as u64;
        let mut sum = 0i128;
        for i in 0..=top {
            if (n >> i) & 1 == 1 && c >> (m - i) == 0 {
                sum += walsh_cell(1 << i, c, m) as i128 * (1i128 << i);
            }
        }
        walsh_cell(n, c, m) as i128 * sum
    })
}

/// `n·K_n` over the denominator `n`; coefficient `j` is `max(0, n-1-j)`.
pub fn fejer(n: u64, m: u32) -> Result<Grid1D> {
    require_indices(n.saturating_sub(1) as u128, m, 1)?;
    if n == 0 {
        return Grid::zeros(m);
    }
    spectral_1d(m, n as i128, |j| (n as i128 - 1 - j as i128).max(0))
}

/// `n·K_n = Σ_{k<n} D_k`, summed directly.
pub fn fejer_direct(n: u64, m: u32) -> Result<Grid1D> {
    require_indices(n.saturating_sub(1) as u128, m, 1)?;
    if n == 0 {
        return Grid::zeros(m);
    }
    let mut d = vec![0i128; 1 << m];
    let mut acc = vec![0i128; 1 << m];
    for k in 0..n {
        for (a, v) in acc.iter_mut().zip(&d) {
            *a += v;
        }
        for (v, w) in d.iter_mut().zip(walsh_row(k, m)) {
            *v += w;
        }
    }
    Grid::new(m, acc, n as i128)
}

/// `D_k^△`; coefficient `(i, j)` is one iff `i + j ≤ k - 1`.
pub fn tri_dirichlet(k: u64, m: u32) -> Result<Grid2D> {
    require_indices(k as u128, m, 2)?;
    spectral_2d(m, 1, |i, j| i128::from(i + j < k))
}

/// `D_k^△ = Σ_{i<k} Σ_{j<k-i} ω_i ⊗ ω_j`, summed directly.
pub fn tri_dirichlet_direct(k: u64, m: u32) -> Result<Grid2D> {
    require_indices(k as u128, m, 2)?;
    let side = 1usize << m;
    let mut acc = vec![0i128; side * side];
    for i in 0..k {
        let row: Vec<i128> = walsh_row(i, m).collect();
        let mut inner = vec![0i128; side];
        for j in 0..k - i {
            for (a, w) in inner.iter_mut().zip(walsh_row(j, m)) {
                *a += w;
            }
        }
        for (c1, &r) in row.iter().enumerate() {
            for (c2, &v) in inner.iter().enumerate() {
                acc[c1 * side + c2] += r * v;
            }
        }
    }
    Grid::new(m, acc, 1)
}

/// `n·K_n^△` over the denominator `n`; coefficient `(j1, j2)` is
/// `max(0, n - j1 - j2 - 1)`.
pub fn tri_fejer(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    if n == 0 {
        return Grid::zeros(m);
    }
    spectral_2d(m, n as i128, |i, j| {
        (n as i128 - i as i128 - j as i128 - 1).max(0)
    })
}

fn dirichlet_products(n: u64, m: u32, pairs: impl Iterator<Item = (u64, u64)>) -> Result<Grid2D> {
    let side = 1usize << m;
    let rows: Vec<Grid1D> = (0..=n).map(|k| dirichlet_direct(k, m)).collect::<Result<_>>()?;
    let mut acc = vec![0i128; side * side];
    for (a, b) in pairs {
        let (da, db) = (rows[a as usize].values(), rows[b as usize].values());
        for (c1, &x) in da.iter().enumerate() {
            if x != 0 {
                for (slot, &y) in acc[c1 * side..(c1 + 1) * side].iter_mut().zip(db) {
                    *slot += x * y;
                }
            }
        }
    }
    Grid::new(m, acc, n.max(1) as i128)
}

/// `n·K_n^△ = Σ_{i=1}^{n-1} D_i ⊗ D_{n-i}`.
pub fn tri_fejer_product(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    dirichlet_products(n, m, (1..n).map(|i| (i, n - i)))
}

/// `n·K_n^△ = Σ_{i=1}^{n-1} D_{n-i} ⊗ D_i`.
pub fn tri_fejer_mirrored(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    dirichlet_products(n, m, (1..n).map(|i| (n - i, i)))
}

/// `n·K_n^△ = Σ_{k<n} D_k^△`, each `D_k^△` summed directly.
pub fn tri_fejer_from_partial_sums(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    let side = 1usize << m;
    let mut acc = vec![0i128; side * side];
    for k in 0..n {
        for (a, v) in acc.iter_mut().zip(tri_dirichlet_direct(k, m)?.values()) {
            *a += v;
        }
    }
    Grid::new(m, acc, n.max(1) as i128)
}

/// `n·M_n` over `n`; coefficient `(j1, j2)` is `max(0, n - 1 - max(j1, j2))`.
pub fn marcinkiewicz(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    if n == 0 {
        return Grid::zeros(m);
    }
    spectral_2d(m, n as i128, |i, j| (n as i128 - 1 - i.max(j) as i128).max(0))
}

/// `n·M_n = Σ_{k<n} D_k ⊗ D_k`.
pub fn marcinkiewicz_direct(n: u64, m: u32) -> Result<Grid2D> {
    require_indices(n.saturating_sub(1) as u128, m, 2)?;
    dirichlet_products(n, m, (0..n).map(|k| (k, k)))
}

/// `n1·n2·(K_{n1} ⊗ K_{n2})` over the denominator `n1·n2`.
pub fn rect_fejer(n1: u64, n2: u64, m: u32) -> Result<Grid2D> {
    Grid2D::outer(&fejer(n1, m)?, &fejer(n2, m)?)
}

/// Resolution needed by the dyadic triangular kernel of index `n ≥ 1`.
pub fn dyadic_tri_resolution(n: u64) -> Result<u32> {
    Ok(Nat::from(n).order()? + 1)
}

/// `Σ_{k<n} D_k ⊗ D_{n⊕k}` over `n`; coefficient `(j1, j2)` counts the
/// `k < n` with `j1 < k` and `j2 < n ⊕ k`.
pub fn dyadic_tri(n: u64, m: u32) -> Result<Grid2D> {
    if n == 0 {
        return Grid::zeros(m);
    }
    let need = dyadic_tri_resolution(n)?;
    if m < need {
        return Err(Error::ResolutionTooSmall {
            index: (1u128 << need) - 1,
            resolution: m,
        });
    }
    check_resolution(2, m)?;
    spectral_2d(m, n as i128, |i, j| {
        (i + 1..n).filter(|&k| j < n ^ k).count() as i128
    })
}

/// `Σ_{k<n} D_k ⊗ D_{n⊕k}`, summed directly.
pub fn dyadic_tri_direct(n: u64, m: u32) -> Result<Grid2D> {
    if n == 0 {
        return Grid::zeros(m);
    }
    let need = dyadic_tri_resolution(n)?;
    if m < need {
        return Err(Error::ResolutionTooSmall {
            index: (1u128 << need) - 1,
            resolution: m,
        });
    }
    check_resolution(2, m)?;
    let top = 1u64 << need;
    let side = 1usize << m;
    let rows: Vec<Grid1D> = (0..top).map(|k| dirichlet_direct(k, m)).collect::<Result<_>>()?;
    let mut acc = vec![0i128; side * side];
    for k in 0..n {
        let (da, db) = (rows[k as usize].values(), rows[(n ^ k) as usize].values());
        for (c1, &x) in da.iter().enumerate() {
            for (slot, &y) in acc[c1 * side..(c1 + 1) * side].iter_mut().zip(db) {
                *slot += x * y;
            }
        }
    }
    Grid::new(m, acc, n as i128)
}
