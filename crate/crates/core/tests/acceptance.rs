//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.
//!
//! Criterion 10 calibrates five N=100 instances and takes several minutes.

use std::cell::RefCell;
use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use fbdp::baselines::{no_feedback_ber, one_bit_optimize, sk_optimize};
use fbdp::belief::{qfunc, MessageBit};
use fbdp::channel::{mimo_embed, run_trial};
use fbdp::io::read_policy_file;
use fbdp::montecarlo::{energy_identity_check, monte_carlo, monte_carlo_mimo, trial_rng};
use fbdp::{calibrate_lambda, CalibratedSolution, EncoderSpec, SolverConfig};
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

/// Calibrated solutions keyed by `(N, S)`, shared between criteria.
#[derive(Default)]
struct Cache {
    solved: RefCell<HashMap<(usize, u64), CalibratedSolution>>,
}

impl Cache {
    fn get(&self, n: usize, s: f64) -> Result<CalibratedSolution, String> {
        let key = (n, s.to_bits());
        if let Some(sol) = self.solved.borrow().get(&key) {
            return Ok(sol.clone());
        }
        let sol = calibrate_lambda(s, &SolverConfig::new(n, s)).map_err(|e| format!("N={n} S={s}: {e}"))?;
        self.solved.borrow_mut().insert(key, sol.clone());
        Ok(sol)
    }
}

fn policy_path(n: usize) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("policies/n{n}_s2.42.fbdp"))
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:.1?}, limit {limit:?}"))
}

const SWEEP_N2: [f64; 8] = [0.5, 1.0, 1.5, 2.0, 2.42, 3.0, 4.0, 6.0];
const SK_GRID_N100: [f64; 5] = [0.25, 0.5, 0.75, 1.0, 1.25];

fn c1_no_feedback(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for s in [0.25, 1.0, 2.42, 4.0, 9.0] {
        let sol = cache.get(1, s)?;
        let gap = (sol.error_probability - qfunc(s.sqrt())).abs();
        worst = worst.max(gap);
        check(
            gap <= 2e-3,
            format!("S={s}: ber {:.6e} vs Q {:.6e}", sol.error_probability, qfunc(s.sqrt())),
        )?;
    }
    within_time(start, Duration::from_secs(10))?;
    Ok(format!(
        "max |ber - Q(sqrt S)| = {worst:.2e} in {:.1?}",
        start.elapsed()
    ))
}

fn c2_two_stage_shape(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let sol = cache.get(2, 2.42)?;
    let x1 = sol.policy.first_amplitude() / 2.0;
    check((x1 - 1.19).abs() <= 0.03, format!("|x(1,m)| = {x1:.4}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("p.fbdp");
    let file = fbdp::io::PolicyFile {
        config: sol.config.clone(),
        lambda: sol.lambda,
        ber: sol.error_probability,
        energy: sol.achieved_energy,
        policy: sol.policy.clone(),
    };
    fbdp::io::write_policy_file(&path, &file).map_err(|e| e.to_string())?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = [
        "fbdp",
        "policy-dump",
        "--policy",
        path.to_str().unwrap(),
        "--k",
        "2",
        "--coords",
        "output",
    ];
    let code = fbdp::commands::run(args, &mut out, &mut err);
    check(
        code == 0,
        format!("policy-dump exit {code}: {}", String::from_utf8_lossy(&err)),
    )?;
    let rows: Vec<[f64; 3]> = String::from_utf8(out)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect();

    // Nonzero near y1 = 0.
    for r in rows.iter().filter(|r| r[0].abs() <= 0.5) {
        check(r[1] != 0.0 && r[2] != 0.0, format!("zero codeword at y1={:.4}", r[0]))?;
    }
    // Exactly zero from some |y1| on, with a jump at the edge, on each side.
    let mut thresholds = Vec::new();
    let mut jumps = Vec::new();
    for side in [1.0, -1.0] {
        let mut half: Vec<&[f64; 3]> = rows.iter().filter(|r| side * r[0] >= 0.0).collect();
        half.sort_by(|a, b| a[0].abs().total_cmp(&b[0].abs()));
        let first_zero = half
            .iter()
            .position(|r| r[1] == 0.0 && r[2] == 0.0)
            .ok_or_else(|| format!("no zero region for sign {side}"))?;
        check(first_zero > 0, "codewords vanish at y1=0".into())?;
        let tail_zero = half[first_zero..].iter().all(|r| r[1] == 0.0 && r[2] == 0.0);
        check(
            tail_zero,
            format!("nonzero codewords beyond |y1|={:.4}", half[first_zero][0].abs()),
        )?;
        let before = half[first_zero - 1];
        let jump = before[1].abs().max(before[2].abs());
        check(jump >= 0.3, format!("jump {jump:.4} at |y1|={:.4}", before[0].abs()))?;
        thresholds.push(half[first_zero][0].abs());
        jumps.push(jump);
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "|x(1,m)| = {x1:.4}, zero beyond |y1| = {:.3}, jump {:.3}",
        thresholds[0], jumps[0]
    ))
}

fn c3_feedback_gain() -> Outcome {
    let file = read_policy_file(policy_path(2)).map_err(|e| e.to_string())?;
    let r = monte_carlo(&EncoderSpec::new(file.policy), 1_000_000, 2024).map_err(|e| e.to_string())?;
    let q = no_feedback_ber(2.42);
    let margin = (q - r.ber_hat) / r.ber_se;
    check(
        margin > 5.0,
        format!("ber {:.4e}, Q {:.4e}, margin {margin:.1} SE", r.ber_hat, q),
    )?;
    Ok(format!(
        "mc ber {:.4e} vs Q(sqrt 2.42) {q:.4e}: {margin:.0} SE below",
        r.ber_hat
    ))
}

fn c4_monotone(cache: &Cache) -> Outcome {
    let mut by_n = Vec::new();
    for n in 1..=6 {
        by_n.push(cache.get(n, 2.0)?.error_probability);
    }
    for (i, w) in by_n.windows(2).enumerate() {
        check(
            w[1] <= w[0] + 1e-4,
            format!("S=2: ber(N={}) {:.4e} > ber(N={}) {:.4e}", i + 2, w[1], i + 1, w[0]),
        )?;
    }
    let mut by_s = Vec::new();
    for s in SWEEP_N2 {
        by_s.push(cache.get(2, s)?.error_probability);
    }
    for (i, w) in by_s.windows(2).enumerate() {
        check(
            w[1] <= w[0],
            format!(
                "N=2: ber(S={}) {:.4e} > ber(S={}) {:.4e}",
                SWEEP_N2[i + 1],
                w[1],
                SWEEP_N2[i],
                w[0]
            ),
        )?;
    }
    Ok(format!(
        "S=2 over N=1..6: {:.3e} .. {:.3e}; N=2 over 8 budgets: {:.3e} .. {:.3e}",
        by_n[0], by_n[5], by_s[0], by_s[7]
    ))
}

fn c5_energy(cache: &Cache) -> Outcome {
    let solved = cache.solved.borrow();
    let mut worst = 0.0f64;
    for ((n, s), sol) in solved.iter() {
        let s = f64::from_bits(*s);
        let rel = ((sol.achieved_energy - s) / s).abs();
        worst = worst.max(rel);
        check(rel <= 1e-3, format!("N={n} S={s}: energy {:.6}", sol.achieved_energy))?;
    }
    for n in 1..=3 {
        let f = read_policy_file(policy_path(n)).map_err(|e| e.to_string())?;
        let rel = ((f.energy - f.config.budget) / f.config.budget).abs();
        worst = worst.max(rel);
        check(rel <= 1e-3, format!("shipped N={n}: energy {:.6}", f.energy))?;
    }
    Ok(format!(
        "{} calibrations, worst relative gap {worst:.2e}",
        solved.len() + 3
    ))
}

fn c6_mc_vs_dp() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let f = read_policy_file(policy_path(n)).map_err(|e| e.to_string())?;
        let r = monte_carlo(&EncoderSpec::new(f.policy), 1_000_000, 100 + n as u64).map_err(|e| e.to_string())?;
        // A constant per-trial energy has zero spread; then the sample mean
        // must match to rounding.
        let sigmas = |diff: f64, se: f64, scale: f64| {
            if se > 0.0 {
                diff.abs() / se
            } else if diff.abs() <= 1e-12 * scale {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let zb = sigmas(r.ber_hat - f.ber, r.ber_se, f.ber);
        let ze = sigmas(r.mean_energy - f.energy, r.energy_se, f.energy);
        worst = worst.max(zb).max(ze);
        check(
            zb <= 3.0,
            format!("N={n}: ber {:.5e} vs {:.5e} ({zb:.2} SE)", r.ber_hat, f.ber),
        )?;
        check(
            ze <= 3.0,
            format!("N={n}: energy {:.5} vs {:.5} ({ze:.2} SE)", r.mean_energy, f.energy),
        )?;
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!("largest deviation {worst:.2} SE in {:.1?}", start.elapsed()))
}

fn c7_mimo() -> Outcome {
    let f = read_policy_file(policy_path(3)).map_err(|e| e.to_string())?;
    let spec = EncoderSpec::new(f.policy);
    let enc = mimo_embed(&spec, 4).map_err(|e| e.to_string())?;
    let n = spec.horizon();
    for t in 0..2000u64 {
        let mut rng = trial_rng(77, t);
        let m = MessageBit::from_bool(t % 2 == 1);
        let noise: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let z1: Vec<f64> = noise.iter().map(|z| z[0]).collect();
        let scalar = run_trial(&spec, m, &z1).map_err(|e| e.to_string())?;
        let vector = enc.run_trial(m, &noise).map_err(|e| e.to_string())?;
        let same = scalar
            .llrs()
            .iter()
            .zip(vector.llrs())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        check(same, format!("trial {t}: trajectories differ"))?;
    }
    let r1 = monte_carlo(&spec, 1_000_000, 7).map_err(|e| e.to_string())?;
    let r4 = monte_carlo_mimo(&enc, 1_000_000, 8).map_err(|e| e.to_string())?;
    let z = (r1.ber_hat - r4.ber_hat).abs() / r1.ber_se.hypot(r4.ber_se);
    check(
        z <= 3.0,
        format!("M=1 {:.5e} vs M=4 {:.5e} ({z:.2} sigma)", r1.ber_hat, r4.ber_hat),
    )?;
    Ok(format!(
        "2000 trajectories bit-exact; M=1 {:.4e} vs M=4 {:.4e} ({z:.2} sigma)",
        r1.ber_hat, r4.ber_hat
    ))
}

fn c8_energy_identity() -> Outcome {
    let f = read_policy_file(policy_path(3)).map_err(|e| e.to_string())?;
    let id = energy_identity_check(&EncoderSpec::new(f.policy), 1_000_000, 9).map_err(|e| e.to_string())?;
    let z = (id.lhs - id.rhs).abs() / id.diff_se;
    check(
        z <= 3.0,
        format!("transmitted {:.5} vs posterior {:.5} ({z:.2} sigma)", id.lhs, id.rhs),
    )?;
    Ok(format!(
        "transmitted {:.5} vs posterior {:.5} ({z:.2} sigma)",
        id.lhs, id.rhs
    ))
}

fn c9_sandwich(cache: &Cache) -> Outcome {
    let mut worst_gap = f64::INFINITY;
    for s in SWEEP_N2 {
        let dp = cache.get(2, s)?.error_probability;
        let one_bit = one_bit_optimize(s).map_err(|e| e.to_string())?.1;
        let q = no_feedback_ber(s);
        check(dp <= one_bit, format!("S={s}: dp {dp:.4e} > one-bit {one_bit:.4e}"))?;
        check(one_bit <= q + 1e-9, format!("S={s}: one-bit {one_bit:.4e} > Q {q:.4e}"))?;
        worst_gap = worst_gap.min(one_bit / dp);
    }
    Ok(format!(
        "{} budgets; one-bit/dp ratio at least {worst_gap:.3}",
        SWEEP_N2.len()
    ))
}

fn c10_sk(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for s in SK_GRID_N100 {
        let dp = cache.get(100, s)?.error_probability;
        let sk = sk_optimize(100, s).map_err(|e| e.to_string())?.1;
        check(dp <= sk, format!("S={s}: dp {dp:.4e} > sk {sk:.4e}"))?;
        parts.push(format!("S={s}: {dp:.3e}<{sk:.3e}"));
    }
    Ok(format!("{} ({:.0?})", parts.join(", "), start.elapsed()))
}

/// Linear-interpolation error estimate `max |second difference| / 8`.
fn interpolation_tolerance(values: &[f64]) -> f64 {
    values
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs() / 8.0)
        .fold(0.0, f64::max)
}

fn c11_numerics(cache: &Cache) -> Outcome {
    let mut worst_drift = 0.0f64;
    let mut worst_asym = 0.0f64;
    let mut checked = 0;
    for (n, s) in [(2, 2.42), (6, 2.0), (2, 6.0), (100, 1.0)] {
        let sol = cache.get(n, s)?;
        worst_drift = worst_drift.max(sol.propagation.max_mass_drift);
        check(
            sol.propagation.max_mass_drift <= 1e-6,
            format!("N={n} S={s}: mass drift {:.2e}", sol.propagation.max_mass_drift),
        )?;
        let grid = sol.policy.grid().clone();
        for table in &sol.values {
            let tol = 2.0 * interpolation_tolerance(&table.values);
            for i in 0..grid.points() {
                let d = (table.values[i] - table.values[grid.mirror(i)]).abs();
                worst_asym = worst_asym.max(d);
                check(
                    d <= tol,
                    format!(
                        "N={n} S={s}: J_{} asymmetric by {d:.2e} at l={}",
                        table.stage,
                        grid.node(i)
                    ),
                )?;
            }
        }
        for w in sol.values.windows(2) {
            for (i, (a, b)) in w[0].values.iter().zip(&w[1].values).enumerate() {
                check(
                    *a <= b * (1.0 + 1e-12),
                    format!("N={n} S={s}: J_{} > J_{} at l={}", w[0].stage, w[1].stage, grid.node(i)),
                )?;
            }
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} solutions; mass drift <= {worst_drift:.1e}, asymmetry <= {worst_asym:.1e}, J_k <= J_(k+1)"
    ))
}

fn main() {
    let cache = Cache::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 no-feedback oracle", Box::new(|| c1_no_feedback(&cache))),
        ("2 two-stage policy shape", Box::new(|| c2_two_stage_shape(&cache))),
        ("3 feedback gain", Box::new(c3_feedback_gain)),
        ("4 monotonicity", Box::new(|| c4_monotone(&cache))),
        ("6 monte carlo vs propagation", Box::new(c6_mc_vs_dp)),
        ("7 vector embedding", Box::new(c7_mimo)),
        ("8 energy identity", Box::new(c8_energy_identity)),
        ("9 baseline sandwich", Box::new(|| c9_sandwich(&cache))),
        ("10 schalkwijk-kailath at N=100", Box::new(|| c10_sk(&cache))),
        ("11 numerical checks", Box::new(|| c11_numerics(&cache))),
        // Last, so that it sees every calibration above.
        ("5 energy calibration", Box::new(|| c5_energy(&cache))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
