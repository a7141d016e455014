//! Exact instances of the estimates for the maximal triangular Fejér kernel.
//! The counting bounds, kernel decompositions, maximal-kernel integrals and
//! convergence experiments are each emitted as a [`LemmaReport`].

mod decompose;
mod delta;
mod marc;
mod maximal;
mod report;

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::rational::{pow2, Rational};

pub use decompose::{
    decomposition_terms, decomposition_tiling_check, mem_maximal_check, sup_kernel_parts,
    sup_kernel_parts_sweep, yano_check, SupParts, Variant, SUPPARTS_MAX_A, YANO_MAX_S,
};
pub use delta::{
    corf_bound, corf_full, corf_value, delta1, delta1_reports, pattern_exclusion_check,
    quadruple_bound, quadruple_count, quadruple_reports, Delta1, RemainderReading, CORF_MAX_S,
    DELTA1_MAX_A, QUADRUPLE_MAX_A,
};
pub use marc::{
    b1b2_decomposition, b1b2_sweep, in_case_set, marc_integral, marc_sup_grid, marc_sweep, MarcGrid,
    B1B2, MARC_MAX_S,
};
pub use maximal::{
    convergence_experiment, convergence_reports, identities, l1_table, mean_paths_check,
    quasi_locality_check, quasi_reports, sup_tri_kernel_integral, sup_tri_kernel_sweep,
    tri_kernel_l1, ErrorNorm, Quasi, L1_MAX_N, SUPKERNEL_MAX_N,
};
pub use report::{to_csv, to_json, Comparison, LemmaReport, Verdict, CSV_HEADER};

/// The counting constant `δ = ((2^16 − 1)/2^16)^(1/16)` through a rational
/// upper bound `u = p/2^64` with `u^16 ≥ (2^16 − 1)/2^16`, `p` minimal.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaConstant {
    numerator: BigUint,
}

pub const DELTA_FRACTIONAL_BITS: u32 = 64;

impl DeltaConstant {
    pub fn get() -> &'static DeltaConstant {
        static CELL: OnceLock<DeltaConstant> = OnceLock::new();
        CELL.get_or_init(Self::compute)
    }

    fn compute() -> Self {
        // p^16 · 2^16 ≥ (2^16 − 1) · 2^(16·64)
        let target = BigUint::from(0xffffu32) << (16 * DELTA_FRACTIONAL_BITS);
        let holds = |p: &BigUint| p.pow(16) << 16u32 >= target;
        let mut lo = BigUint::one() << (DELTA_FRACTIONAL_BITS - 1);
        let mut hi = BigUint::one() << DELTA_FRACTIONAL_BITS;
        while &lo + 1u32 < hi {
            let mid = (&lo + &hi) >> 1u32;
            if holds(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        DeltaConstant { numerator: hi }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// The upper bound `u`.
    pub fn upper(&self) -> Rational {
        Rational::from_integer(self.numerator.clone().into()) * pow2(-(DELTA_FRACTIONAL_BITS as i64))
    }

    /// `u^k`.
    pub fn power(&self, k: u32) -> Rational {
        let num = num_bigint::BigInt::from(self.numerator.pow(k));
        Rational::from_integer(num) * pow2(-((DELTA_FRACTIONAL_BITS * k) as i64))
    }
}
