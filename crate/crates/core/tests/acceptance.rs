//! The fourteen acceptance criteria, each printed as one PASS/FAIL line.
//! Runs with its own harness so the lines appear on every run.

use std::process::ExitCode;
use std::time::Instant;

use num_traits::Zero;
use walshlab::kernels;
use walshlab::lab::{self, LemmaReport};
use walshlab::ops::TestFunction;
use walshlab::rational::{decimal, fraction_string, integer, ratio, Rational};
use walshlab::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn all_pass(reports: &[LemmaReport]) -> bool {
    reports.iter().all(LemmaReport::passed)
}

fn first_failure(reports: &[LemmaReport]) -> String {
    reports
        .iter()
        .find(|r| !r.passed())
        .map(|r| format!("first failure: {} {}", r.lemma, r.params_string()))
        .unwrap_or_default()
}

fn triangular_identity() -> Outcome {
    let mut bad = 0;
    for n in 1..=32 {
        if kernels::tri_fejer_from_partial_sums(n, 6)? != kernels::tri_fejer_product(n, 6)? {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("n = 1..=32 at resolution 6, {bad} mismatches")))
}

fn dirichlet_closed_form() -> Outcome {
    let mut bad = 0;
    for n in 1..512 {
        if kernels::dirichlet_formula(n, 9)? != kernels::dirichlet_direct(n, 9)? {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("n = 1..512 at resolution 9, {bad} mismatches")))
}

fn mean_paths() -> Outcome {
    let r = lab::mean_paths_check(0..20, 5, 32)?;
    Ok((r.passed(), format!("20 seeds, n <= 32, {} mismatches", r.measured)))
}

fn delta1_special() -> Outcome {
    let mut bad = Vec::new();
    for a in 0..=8 {
        let d = lab::delta1(a)?;
        if d.special != walshlab::rational::pow2(-(a as i64)) {
            bad.push(a);
        }
    }
    Ok((bad.is_empty(), format!("n = 2^A term equals 2^-A for A = 0..=8, failing A: {bad:?}")))
}

fn delta1_full() -> Outcome {
    let reports = lab::delta1_reports(1..=9)?;
    let relevant: Vec<LemmaReport> = reports
        .into_iter()
        .filter(|r| r.lemma == "delta1" || r.lemma == "delta1-decay")
        .collect();
    let values: Vec<String> = relevant
        .iter()
        .filter(|r| r.lemma == "delta1")
        .map(|r| decimal(&r.measured, 4))
        .collect();
    Ok((
        all_pass(&relevant),
        format!("measured(A), A = 1..=9: [{}] {}", values.join(", "), first_failure(&relevant)),
    ))
}

fn quadruple_count() -> Outcome {
    let count = lab::quadruple_count(8)?;
    let bound = 0xffffu64 * 0xffff;
    let mut ok = count <= bound && count < 1 << 32;
    for a in 0..=4 {
        let r = lab::quadruple_reports(a, 4)?;
        ok &= r.iter().filter(|r| r.lemma == "quadruples-duality").all(LemmaReport::passed);
    }
    Ok((ok, format!("count(8) = {count} <= {bound}; fourth-moment duality for A <= 4")))
}

fn pattern_exclusion() -> Outcome {
    let r = lab::pattern_exclusion_check(8)?;
    Ok((all_pass(&r) && r.len() == 2, format!("A = 8, blocks 1 and 2, 2^16 completions each {}", first_failure(&r))))
}

fn marc_stability() -> Outcome {
    let reports = lab::marc_sweep(7)?;
    let max_over = |lo: u32, hi: u32| -> Rational {
        reports
            .iter()
            .filter(|r| {
                let s: u32 = r.params.iter().find(|(k, _)| k == "s").unwrap().1.parse().unwrap();
                (lo..=hi).contains(&s)
            })
            .filter_map(LemmaReport::ratio_value)
            .max()
            .unwrap_or_else(Rational::zero)
    };
    let overall = max_over(1, 7);
    let (early, late) = (max_over(4, 5), max_over(6, 7));
    let ok = late <= ratio(11, 10) * &early;
    Ok((
        ok,
        format!(
            "max ratio {} overall; s in {{4,5}}: {}; s in {{6,7}}: {}",
            decimal(&overall, 6),
            decimal(&early, 6),
            decimal(&late, 6)
        ),
    ))
}

fn b1b2() -> Outcome {
    let r = lab::b1b2_sweep(4)?;
    let checked: u64 = r
        .iter()
        .filter(|r| r.lemma == "b1b2-additivity")
        .map(|r| r.params.iter().find(|(k, _)| k == "checked").unwrap().1.parse::<u64>().unwrap())
        .sum();
    Ok((all_pass(&r), format!("{checked} admissible (cell, n, t1, t2, i) cases {}", first_failure(&r))))
}

fn tiling() -> Outcome {
    let r = lab::decomposition_tiling_check(64, 7)?;
    Ok((r.passed(), format!("n = 1..=64 at resolution 7, {} mismatches", r.measured)))
}

fn yano() -> Outcome {
    let mut reports = Vec::new();
    for s in 1..=8 {
        for t1 in 0..s {
            reports.extend(lab::yano_check(t1, s)?);
        }
    }
    let support: Vec<LemmaReport> = reports.into_iter().filter(|r| r.lemma == "yano-support").collect();
    Ok((all_pass(&support), format!("{} pairs t1 < s <= 8 {}", support.len(), first_failure(&support))))
}

fn l1_trend() -> Outcome {
    let reports = lab::l1_table(2..=512)?;
    let norm = |lo: u64, hi: u64| -> Rational {
        reports
            .iter()
            .filter(|r| {
                let n: u64 = r.params[0].1.parse().unwrap();
                (lo..=hi).contains(&n)
            })
            .map(|r| r.measured.clone())
            .max()
            .unwrap()
    };
    let (early, late) = (norm(32, 64), norm(256, 512));
    let ok = all_pass(&reports) && late <= ratio(11, 10) * &early;
    Ok((
        ok,
        format!(
            "max over [32,64] = {}, max over [256,512] = {}, lower bound {}",
            decimal(&early, 6),
            decimal(&late, 6),
            if all_pass(&reports) { "holds" } else { "fails" }
        ),
    ))
}

fn quasi_locality() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let a = 1 + (seed % 3) as u32;
        let m = a + 2;
        let (u1, u2) = (seed % (1 << a), (seed / 2) % (1 << a));
        let f = TestFunction::mean_zero(seed, m, a, u1, u2)?.grid;
        let checkpoints: Vec<u64> = (a..=m + 2).map(|e| 1u64 << e).collect();
        let q = lab::quasi_locality_check(&f, a, u1, u2, &checkpoints)?;
        let pass = q.vanishing_failures.is_empty() && q.decreases() == 0 && q.growing_increments() == 0;
        if !pass {
            let ratios: Vec<String> = q.ratios().iter().map(|r| decimal(r, 4)).collect();
            notes.push(format!(
                "seed {seed} (a = {a}): vanishing failures {:?}, ratios [{}]",
                q.vanishing_failures,
                ratios.join(", ")
            ));
        }
        ok &= pass;
    }
    Ok((ok, if ok { "10 mean-zero functions, a <= 3".into() } else { notes.join("; ") }))
}

fn convergence() -> Outcome {
    use lab::ErrorNorm;
    let mut ok = true;
    for (i, j) in [(0u64, 0u64), (1, 0), (2, 3), (5, 1), (7, 7)] {
        let f = TestFunction::polynomial(&[(i, j, integer(1))])?.grid;
        let ns: Vec<u64> = (i + j + 2..=64).collect();
        for (n, e) in lab::convergence_experiment(&f, &ns, ErrorNorm::Linf)? {
            ok &= e == ratio((i + j + 1) as i128, n as i128);
        }
    }
    let ns: Vec<u64> = (2..=8).map(|m| 1u64 << m).collect();
    let mut tails = Vec::new();
    for (t1, t2, c1, c2) in [(1, 1, 0, 0), (2, 1, 1, 1), (3, 2, 5, 2), (4, 4, 9, 6)] {
        let f = TestFunction::indicator(t1, t2, c1, c2)?.grid;
        let errs = lab::convergence_experiment(&f, &ns, ErrorNorm::L1)?;
        ok &= errs.windows(2).all(|w| w[1].1 < w[0].1);
        tails.push(fraction_string(&errs.last().unwrap().1));
    }
    Ok((ok, format!("L1 error at n = 256 for four indicators: [{}]", tails.join(", "))))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("triangular kernel identity", triangular_identity),
        ("Dirichlet closed form", dirichlet_closed_form),
        ("multiplier/convolution agreement", mean_paths),
        ("averaged Walsh products, n = 2^A case", delta1_special),
        ("averaged Walsh products, bound and decay", delta1_full),
        ("quadruple count", quadruple_count),
        ("pattern exclusion", pattern_exclusion),
        ("shifted Dirichlet double sum stability", marc_stability),
        ("B1/B2 split", b1b2),
        ("tiling identity", tiling),
        ("Fejer kernel support on shells", yano),
        ("triangular kernel L1 trend", l1_trend),
        ("quasi-locality", quasi_locality),
        ("convergence of the triangular means", convergence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
