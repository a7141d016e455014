use num_traits::Signed;
use proptest::prelude::*;
use walshlab::lab;
use walshlab::ops::{self, Mean, Path, TestFunction};
use walshlab::rational::integer;
use walshlab::Grid2D;

fn random_grid(seed: u64, m: u32) -> Grid2D {
    TestFunction::random(seed, m).unwrap().grid
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mean_paths_agree(seed in any::<u64>(), m in 1u32..=4, n in 1u64..=24, n2 in 1u64..=24) {
        let f = random_grid(seed, m);
        for mean in [
            Mean::Triangular { n },
            Mean::Rectangular { n1: n, n2 },
            Mean::Marcinkiewicz { n },
            Mean::DyadicTriangular { n },
        ] {
            let a = ops::apply_mean(&f, mean, Path::Multiplier).unwrap();
            prop_assert_eq!(&a, &ops::apply_mean(&f, mean, Path::Convolution).unwrap());
        }
    }

    #[test]
    fn walsh_polynomials_are_damped(i in 0u64..16, j in 0u64..16, extra in 1u64..40) {
        let w = TestFunction::polynomial(&[(i, j, integer(1))]).unwrap().grid;
        let n = i + j + 1 + extra;
        let s = ops::tri_fejer_mean(&w, n, Path::Multiplier).unwrap();
        prop_assert!(s.same_function(&w.scaled(extra as i128, n as i128).unwrap()));
    }

    #[test]
    fn conditional_expectation_is_a_positive_linear_projection(
        s1 in any::<u64>(), s2 in any::<u64>(), m in 1u32..=5, a in 0u32..=5, b in 0u32..=5,
    ) {
        let (a, b) = (a.min(m), b.min(m));
        let (f, g) = (random_grid(s1, m), random_grid(s2, m));
        let e = |h: &Grid2D, k| ops::conditional_expectation(h, k).unwrap();
        let sum = f.checked_add(&g).unwrap();
        prop_assert!(e(&sum, a).same_function(&e(&f, a).checked_add(&e(&g, a)).unwrap()));
        prop_assert_eq!(e(&e(&f, a), b), e(&f, a.min(b)));
        let abs = Grid2D::new(m, f.values().iter().map(|v| v.abs()).collect(), f.denominator()).unwrap();
        prop_assert!(e(&abs, a).values().iter().all(|&v| v >= 0));
    }

    #[test]
    fn truncated_maximal_grows_with_the_bound(seed in any::<u64>(), m in 1u32..=4, cut in 1u64..20, top in 20u64..40) {
        let f = random_grid(seed, m);
        let low = ops::truncated_tri_maximal(&f, &(1..=cut).collect::<Vec<_>>()).unwrap();
        let high = ops::truncated_tri_maximal(&f, &(1..=top).collect::<Vec<_>>()).unwrap();
        for idx in 0..low.len() {
            prop_assert!(low.value(idx) <= high.value(idx));
        }
    }

    #[test]
    fn quasi_ratios_never_decrease(seed in any::<u64>(), a in 1u32..=2, u in 0u64..4) {
        let (u1, u2) = (u % (1 << a), (u / 2) % (1 << a));
        let f = TestFunction::mean_zero(seed, a + 2, a, u1, u2).unwrap().grid;
        let q = lab::quasi_locality_check(&f, a, u1, u2, &[2, 4, 8, 16]).unwrap();
        prop_assert!(q.vanishing_failures.is_empty());
        prop_assert_eq!(q.decreases(), 0);
    }

    #[test]
    fn results_do_not_depend_on_the_thread_count(seed in any::<u64>(), n in 2u64..32) {
        let f = random_grid(seed, 4);
        let indices: Vec<u64> = (1..=n).collect();
        let one = in_pool(1, || ops::truncated_tri_maximal(&f, &indices).unwrap());
        let many = in_pool(4, || ops::truncated_tri_maximal(&f, &indices).unwrap());
        prop_assert_eq!(one, many);
    }
}

#[test]
fn truncated_sups_are_monotone_in_the_bound() {
    let sweep = lab::sup_tri_kernel_sweep(2, &[4, 8, 16, 32, 64]).unwrap();
    assert!(sweep.windows(2).all(|w| w[0].measured <= w[1].measured));
    let mem: Vec<_> = [8u64, 12, 20, 33]
        .iter()
        .map(|&n| lab::mem_maximal_check(1, 3, n).unwrap().measured)
        .collect();
    assert!(mem.windows(2).all(|w| w[0] <= w[1]));
    let narrow = lab::SupParts::compute(2..=2, false).unwrap();
    let wide = lab::SupParts::compute(1..=2, false).unwrap();
    for v in lab::Variant::ALL {
        for t1 in 0..=2 {
            for t2 in t1..=3 {
                assert!(narrow.shell_integral(v, t1, t2) <= wide.shell_integral(v, t1, t2));
            }
        }
    }
}

#[test]
fn lab_reports_do_not_depend_on_the_thread_count() {
    let run = || {
        let mut rows = lab::sup_kernel_parts_sweep(1, 1..=3).unwrap();
        rows.extend(lab::marc_sweep(4).unwrap());
        rows.extend(lab::delta1_reports(0..=4).unwrap());
        lab::to_csv(&rows, false)
    };
    assert_eq!(in_pool(1, run), in_pool(6, run));
}
