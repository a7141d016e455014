use clap::Subcommand;
use serde::{Deserialize, Serialize};
use walshlab::dyadic::min_resolution;
use walshlab::lab::{self, ErrorNorm, LemmaReport};
use walshlab::ops::{TestFunction, TestFunctionKind};
use walshlab::Result;

/// A validated run, ready to execute.
pub type Job = Box<dyn FnOnce() -> Result<Vec<LemmaReport>> + Send>;

fn usage(name: &str, reason: impl std::fmt::Display) -> String {
    format!("invalid parameter {name}: {reason}")
}

fn at_most<T: PartialOrd + std::fmt::Display>(name: &str, value: T, cap: T) -> Result<(), String> {
    if value > cap {
        return Err(usage(name, format!("{value} exceeds {cap}")));
    }
    Ok(())
}

fn two() -> u64 {
    2
}

fn four() -> u32 {
    4
}

fn six() -> u32 {
    6
}

fn thirty_two() -> u64 {
    32
}

fn linf() -> ErrorNorm {
    ErrorNorm::Linf
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", rename_all_fields = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// Exact kernel and mean identities for every n up to --n-max.
    Identities {
        #[arg(long, default_value_t = 32)]
        #[serde(default = "thirty_two")]
        n_max: u64,
        #[arg(long, default_value_t = 6)]
        #[serde(default = "six")]
        resolution: u32,
    },
    /// Averaged Walsh products over n <= 2^A; --sweep covers 0..=A.
    Delta1 {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        big_a: u32,
    },
    /// Exhaustive quadruple count against the block bound.
    Quadruples {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        big_a: u32,
        /// Check the fourth-moment identity when A is at most this.
        #[arg(long, default_value_t = 4)]
        #[serde(default = "four")]
        duality_max: u32,
    },
    /// Quadruples carrying the excluded block pattern, A = 4 or 8.
    Patterns {
        #[arg(long = "A")]
        #[serde(rename = "A")]
        big_a: u32,
    },
    /// The rescaled local supremum integral; --sweep covers all t2 < s and all low.
    Corf {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t2: u32,
        #[arg(long)]
        s: u32,
        /// Digits 0..=t2 of the base point.
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        low: u64,
    },
    /// Shifted Dirichlet double sums on J_t1 x J_t2; --sweep covers t1 <= t2 < s' <= s.
    Marc {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t1: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t2: u32,
        #[arg(long)]
        s: u32,
    },
    /// The B1/B2 split at one cell; --sweep checks every admissible case up to s.
    B1b2 {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t1: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t2: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        i: u32,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        c1: u64,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        c2: u64,
    },
    /// L1 norms of the digit-block terms of n K_n and the tiling identity up to n.
    Decompose {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<u32>,
    },
    /// The three parts of the maximal kernel integral over 2^A_min <= n < 2^(A_max+1).
    Supparts {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        a: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t1: u32,
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t2: u32,
        #[arg(long = "A-min")]
        #[serde(rename = "A-min", default, skip_serializing_if = "Option::is_none")]
        a_min: Option<u32>,
        #[arg(long = "A-max")]
        #[serde(rename = "A-max")]
        a_max: u32,
    },
    /// Support of K_(2^s) on the shell J_t1; --sweep covers t1 < s' <= s.
    Yano {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t1: u32,
        #[arg(long)]
        s: u32,
    },
    /// One-dimensional maximal Fejer kernel on J_t1 over 2^A <= n <= N.
    Mem {
        #[arg(long, default_value_t = 0)]
        #[serde(default)]
        t1: u32,
        #[arg(long = "A")]
        #[serde(rename = "A")]
        big_a: u32,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        big_n: u64,
    },
    /// Maximal triangular kernel integrated off I_a x I_a; --sweep reports doubling N.
    Supkernel {
        #[arg(long)]
        a: u32,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        big_n: u64,
    },
    /// Exact L1 norms of the triangular Fejer kernel.
    L1Table {
        #[arg(long, default_value_t = 2)]
        #[serde(default = "two")]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
    },
    /// Maximal triangular means of a mean-zero f off its support square.
    Quasi {
        /// Test function; defaults to meanzero:<seed>:<a+2>:<a>:<u1>:<u2>.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<String>,
        #[arg(long = "N")]
        #[serde(rename = "N")]
        big_n: u64,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<u32>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u1: Option<u64>,
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u2: Option<u64>,
    },
    /// Error of the triangular Fejer means; --sweep covers every n up to the largest given.
    Converge {
        /// Test function; defaults to random:<seed>:4.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        #[serde(default = "default_ns")]
        n: Vec<u64>,
        #[arg(long, default_value = "linf")]
        #[serde(default = "linf")]
        norm: ErrorNorm,
    },
}

fn default_ns() -> Vec<u64> {
    vec![1, 2, 4, 8, 16, 32]
}

fn doubling(from: u64, to: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(from.max(1)), |&n| n.checked_mul(2))
        .take_while(|&n| n <= to)
        .collect();
    if out.last() != Some(&to) {
        out.push(to);
    }
    out
}

fn test_function(spec: &str) -> Result<TestFunction, String> {
    spec.parse().map_err(|e| usage("f", e))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Identities { .. } => "identities",
            Command::Delta1 { .. } => "delta1",
            Command::Quadruples { .. } => "quadruples",
            Command::Patterns { .. } => "patterns",
            Command::Corf { .. } => "corf",
            Command::Marc { .. } => "marc",
            Command::B1b2 { .. } => "b1b2",
            Command::Decompose { .. } => "decompose",
            Command::Supparts { .. } => "supparts",
            Command::Yano { .. } => "yano",
            Command::Mem { .. } => "mem",
            Command::Supkernel { .. } => "supkernel",
            Command::L1Table { .. } => "l1-table",
            Command::Quasi { .. } => "quasi",
            Command::Converge { .. } => "converge",
        }
    }

    /// Checks every parameter and returns the computation, or the offending
    /// parameter.
    pub fn prepare(&self, sweep: bool, seed: u64) -> Result<Job, String> {
        use walshlab::grid::MAX_RESOLUTION_2D;
        use walshlab::lab::{
            CORF_MAX_S, DELTA1_MAX_A, L1_MAX_N, MARC_MAX_S, QUADRUPLE_MAX_A, SUPKERNEL_MAX_N,
            SUPPARTS_MAX_A, YANO_MAX_S,
        };

        match self.clone() {
            Command::Identities { n_max, resolution } => {
                at_most("resolution", resolution, 8)?;
                if n_max == 0 || n_max > 1 << resolution {
                    return Err(usage("n-max", format!("{n_max} must lie in 1..=2^resolution")));
                }
                Ok(Box::new(move || lab::identities(n_max, resolution)))
            }
            Command::Delta1 { big_a } => {
                at_most("A", big_a, DELTA1_MAX_A)?;
                let lo = if sweep { 0 } else { big_a };
                Ok(Box::new(move || lab::delta1_reports(lo..=big_a)))
            }
            Command::Quadruples { big_a, duality_max } => {
                at_most("A", big_a, QUADRUPLE_MAX_A)?;
                at_most("duality-max", duality_max, DELTA1_MAX_A)?;
                let lo = if sweep { 0 } else { big_a };
                Ok(Box::new(move || {
                    let mut out = Vec::new();
                    for a in lo..=big_a {
                        out.extend(lab::quadruple_reports(a, duality_max)?);
                    }
                    Ok(out)
                }))
            }
            Command::Patterns { big_a } => {
                if big_a != 4 && big_a != 8 {
                    return Err(usage("A", format!("{big_a} must be 4 or 8")));
                }
                let sizes: Vec<u32> = if sweep { (4..=big_a).step_by(4).collect() } else { vec![big_a] };
                Ok(Box::new(move || {
                    let mut out = Vec::new();
                    for a in sizes {
                        out.extend(lab::pattern_exclusion_check(a)?);
                    }
                    Ok(out)
                }))
            }
            Command::Corf { t2, s, low } => {
                at_most("s", s, CORF_MAX_S)?;
                let cases: Vec<(u32, u64)> = if sweep {
                    (0..s).flat_map(|t| (0..1u64 << (t + 1)).map(move |l| (t, l))).collect()
                } else {
                    if t2 >= s {
                        return Err(usage("t2", format!("t2 = {t2} must be below s = {s}")));
                    }
                    if low >> (t2 + 1) != 0 {
                        return Err(usage("low", format!("{low} has bits above t2 = {t2}")));
                    }
                    vec![(t2, low)]
                };
                Ok(Box::new(move || {
                    let mut out = Vec::new();
                    for (t, l) in cases {
                        out.extend(lab::corf_bound(t, s, l)?);
                    }
                    Ok(out)
                }))
            }
            Command::Marc { t1, t2, s } => {
                at_most("s", s, MARC_MAX_S)?;
                if sweep {
                    return Ok(Box::new(move || lab::marc_sweep(s)));
                }
                if t1 > t2 {
                    return Err(usage("t1", format!("t1 = {t1} exceeds t2 = {t2}")));
                }
                if t2 >= s {
                    return Err(usage("t2", format!("t2 = {t2} must be below s = {s}")));
                }
                Ok(Box::new(move || Ok(vec![lab::marc_integral(t1, t2, s)?])))
            }
            Command::B1b2 { t1, t2, i, s, n, c1, c2 } => {
                at_most("s", s, MARC_MAX_S)?;
                if sweep {
                    return Ok(Box::new(move || lab::b1b2_sweep(s)));
                }
                if t2 >= s {
                    return Err(usage("t2", format!("t2 = {t2} must be below s = {s}")));
                }
                if i == 0 || t1 + i >= t2 {
                    return Err(usage("i", format!("need 1 <= i < t2 - t1, got i = {i}")));
                }
                if n >= 1 << s {
                    return Err(usage("n", format!("{n} must be below 2^s")));
                }
                let m = s + 1;
                if c1 >= 1 << m || !lab::in_case_set(c1, m, t1, i, t2) {
                    return Err(usage("c1", format!("cell {c1} is not in J_(t1,i) at resolution {m}")));
                }
                if c2 >= 1 << m || (c2 >> (m - t2 - 1)) != 1 {
                    return Err(usage("c2", format!("cell {c2} is not in J_t2 at resolution {m}")));
                }
                Ok(Box::new(move || {
                    let b = lab::b1b2_decomposition(t1, t2, i, s, n, c1, c2)?;
                    let with = |r: LemmaReport| {
                        r.param("t1", t1)
                            .param("t2", t2)
                            .param("i", i)
                            .param("s", s)
                            .param("n", n)
                            .param("c1", c1)
                            .param("c2", c2)
                    };
                    let int = |v: i128| walshlab::rational::integer(v);
                    Ok(vec![
                        with(LemmaReport::check(
                            "b1b2-additivity",
                            int(b.b1 + b.b2),
                            int(b.full),
                            lab::Comparison::Equal,
                        )),
                        with(LemmaReport::check(
                            "b1b2-triangle",
                            int(b.full.abs()),
                            int(b.b1.abs() + b.b2.abs()),
                            lab::Comparison::AtMost,
                        )),
                    ])
                }))
            }
            Command::Decompose { n, m } => {
                if n == 0 {
                    return Err(usage("n", "must be at least 1"));
                }
                let m = m.unwrap_or_else(|| min_resolution(u128::from(n)));
                at_most("m", m, MAX_RESOLUTION_2D.min(10))?;
                if n > 1 << m {
                    return Err(usage("m", format!("resolution {m} is too small for n = {n}")));
                }
                let lo = if sweep { 1 } else { n };
                Ok(Box::new(move || {
                    let mut out = Vec::new();
                    for k in lo..=n {
                        for (s, t) in lab::decomposition_terms(k, m)? {
                            out.push(
                                LemmaReport::info("decompose", t.l1_norm())
                                    .param("n", k)
                                    .param("m", m)
                                    .param("s", s),
                            );
                        }
                    }
                    out.push(lab::decomposition_tiling_check(n, m)?);
                    Ok(out)
                }))
            }
            Command::Supparts { a, t1, t2, a_min, a_max } => {
                let a_min = a_min.unwrap_or(a);
                at_most("A-max", a_max, SUPPARTS_MAX_A)?;
                if a_min < a {
                    return Err(usage("A-min", format!("{a_min} is below a = {a}")));
                }
                if a_min > a_max {
                    return Err(usage("A-min", format!("{a_min} exceeds A-max = {a_max}")));
                }
                if sweep {
                    return Ok(Box::new(move || lab::sup_kernel_parts_sweep(a, a_min..=a_max)));
                }
                if t1 > a {
                    return Err(usage("t1", format!("t1 = {t1} exceeds a = {a}")));
                }
                if t2 < t1 || t2 > a_max + 1 {
                    return Err(usage("t2", format!("t2 = {t2} must lie in t1..=A-max+1")));
                }
                Ok(Box::new(move || lab::sup_kernel_parts(a, t1, t2, a_min..=a_max)))
            }
            Command::Yano { t1, s } => {
                at_most("s", s, YANO_MAX_S)?;
                let cases: Vec<(u32, u32)> = if sweep {
                    (1..=s).flat_map(|k| (0..k).map(move |t| (t, k))).collect()
                } else {
                    if t1 >= s {
                        return Err(usage("t1", format!("t1 = {t1} must be below s = {s}")));
                    }
                    vec![(t1, s)]
                };
                Ok(Box::new(move || {
                    let mut out = Vec::new();
                    for (t, k) in cases {
                        out.extend(lab::yano_check(t, k)?);
                    }
                    Ok(out)
                }))
            }
            Command::Mem { t1, big_a, big_n } => {
                at_most("A", big_a, 20)?;
                if big_n < 1 << big_a || big_n > 1 << 20 {
                    return Err(usage("N", format!("{big_n} must lie in 2^A..=2^20")));
                }
                let t1s: Vec<u32> = if sweep {
                    (0..=big_a).collect()
                } else {
                    if t1 > big_a {
                        return Err(usage("t1", format!("t1 = {t1} exceeds A = {big_a}")));
                    }
                    vec![t1]
                };
                Ok(Box::new(move || {
                    t1s.into_iter().map(|t| lab::mem_maximal_check(t, big_a, big_n)).collect()
                }))
            }
            Command::Supkernel { a, big_n } => {
                at_most("a", a, 9)?;
                at_most("N", big_n, SUPKERNEL_MAX_N)?;
                if big_n == 0 {
                    return Err(usage("N", "must be at least 1"));
                }
                let checkpoints = if sweep { doubling(1 << a, big_n) } else { vec![big_n] };
                Ok(Box::new(move || lab::sup_tri_kernel_sweep(a, &checkpoints)))
            }
            Command::L1Table { n_min, n_max } => {
                if n_min == 0 || n_min > n_max {
                    return Err(usage("n-min", format!("{n_min} must lie in 1..=n-max")));
                }
                at_most("n-max", n_max, L1_MAX_N)?;
                Ok(Box::new(move || lab::l1_table(n_min..=n_max)))
            }
            Command::Quasi { f, big_n, a, u1, u2 } => {
                let spec = match &f {
                    Some(s) => s.clone(),
                    None => {
                        let a = a.unwrap_or(1);
                        format!("meanzero:{seed}:{}:{a}:{}:{}", a + 2, u1.unwrap_or(0), u2.unwrap_or(0))
                    }
                };
                let tf = test_function(&spec)?;
                let (a, u1, u2) = match (tf.kind, a, u1, u2) {
                    (_, Some(a), Some(u1), Some(u2)) => (a, u1, u2),
                    (TestFunctionKind::MeanZero { a, u1, u2, .. }, None, None, None) => (a, u1, u2),
                    _ => return Err(usage("a", "give --a, --u1 and --u2 together, or a meanzero f")),
                };
                let m = tf.grid.resolution();
                if a > m {
                    return Err(usage("a", format!("{a} exceeds the resolution {m} of f")));
                }
                if u1 >> a != 0 || u2 >> a != 0 {
                    return Err(usage("u1", format!("({u1}, {u2}) are not cells of resolution {a}")));
                }
                at_most("N", big_n, 1 << 12)?;
                if big_n == 0 {
                    return Err(usage("N", "must be at least 1"));
                }
                let checkpoints = if sweep { doubling(1 << a, big_n) } else { vec![big_n] };
                let grid = tf.grid;
                Ok(Box::new(move || lab::quasi_reports(&grid, a, u1, u2, &checkpoints)))
            }
            Command::Converge { f, n, norm } => {
                let tf = test_function(&f.unwrap_or_else(|| format!("random:{seed}:4")))?;
                if n.is_empty() || n.contains(&0) {
                    return Err(usage("n", "give one or more positive indices"));
                }
                let top = n.iter().copied().max().unwrap_or(1);
                at_most("n", top, 1 << 12)?;
                let ns: Vec<u64> = if sweep { (1..=top).collect() } else { n };
                let grid = tf.grid;
                Ok(Box::new(move || lab::convergence_reports(&grid, &ns, norm)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_ends_at_the_cap() {
        assert_eq!(doubling(4, 20), vec![4, 8, 16, 20]);
        assert_eq!(doubling(4, 16), vec![4, 8, 16]);
        assert_eq!(doubling(0, 3), vec![1, 2, 3]);
    }

    #[test]
    fn prepare_rejects_out_of_range() {
        let bad = [
            Command::Delta1 { big_a: 11 },
            Command::Patterns { big_a: 5 },
            Command::Corf { t2: 3, s: 3, low: 0 },
            Command::Marc { t1: 2, t2: 1, s: 4 },
            Command::L1Table { n_min: 0, n_max: 4 },
            Command::Supkernel { a: 1, big_n: 513 },
            Command::Quasi {
                f: Some("random:1:3".into()),
                big_n: 8,
                a: None,
                u1: None,
                u2: None,
            },
        ];
        for c in bad {
            assert!(c.prepare(false, 0).is_err(), "{c:?}");
        }
    }

    #[test]
    fn single_b1b2_matches_sweep_verdicts() {
        let c = Command::B1b2 {
            t1: 0,
            t2: 2,
            i: 1,
            s: 3,
            n: 5,
            c1: 0b1100,
            c2: 0b0010,
        };
        let rows = c.prepare(false, 0).unwrap()().unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(LemmaReport::passed));
    }
}
