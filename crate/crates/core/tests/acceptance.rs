//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! reports one PASS/FAIL line; exits non-zero if any criterion fails.
//!
//! The regret-magnitude criteria run the full presets (T = 10^4, 20
//! replications each).

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use fadcm_core::harness::output::write_csv;
use fadcm_core::harness::{
    preset, replication_rng, run_experiment, run_oracle_check, ExperimentConfig, SummaryStats,
};
use fadcm_core::policy::{FaDcmConfig, FaDcmPPolicy, FaDcmPolicy, Policy};
use fadcm_core::{
    expected_reward, simulate_session, BehaviorParams, Catalog, DiscountCurve, ModelParams,
    Relevance, Slate,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Mean final regret of every case of every preset, keyed by `(suite, case)`.
struct PresetRuns(HashMap<(String, String), SummaryStats>);

impl PresetRuns {
    fn run(names: &[&str]) -> Self {
        let mut out = HashMap::new();
        for name in names {
            let suite = preset(name).expect("known preset");
            for cfg in &suite.cases {
                let started = Instant::now();
                let stats = run_experiment(cfg, None).expect("preset runs");
                eprintln!(
                    "  {} {}: mean final regret {:.2} ({:.1}s)",
                    suite.name,
                    cfg.case_label,
                    stats.mean_final,
                    started.elapsed().as_secs_f64()
                );
                out.insert((suite.name.clone(), cfg.case_label.clone()), stats);
            }
        }
        PresetRuns(out)
    }

    fn get(&self, suite: &str, case: &str) -> &SummaryStats {
        &self.0[&(suite.to_string(), case.to_string())]
    }

    fn final_of(&self, suite: &str, case: &str) -> f64 {
        self.get(suite, case).mean_final
    }
}

fn offline_optimality() -> Outcome {
    let started = Instant::now();
    let r = run_oracle_check(1000, 7, 2024, false).expect("n <= 7 is within capacity");
    let secs = started.elapsed().as_secs_f64();
    outcome(
        r.all_passed() && r.instances >= 1000 && secs < 120.0,
        format!(
            "{}/{} instances agree with exhaustive search, max |diff| {:.1e}, {:.2}s",
            r.passed, r.instances, r.max_abs_diff, secs
        ),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let trials = 10_000;
    for _ in 0..trials {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=n.min(3));
        let cats: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
        let u: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let u_hi: Vec<f64> = u.iter().map(|&x| x + (1.0 - x) * rng.gen::<f64>()).collect();
        let mut tail: Vec<f64> = (1..n).map(|_| rng.gen()).collect();
        tail.sort_by(|a, b| b.total_cmp(a));
        let f: Vec<f64> = std::iter::once(1.0).chain(tail).collect();
        let mut tail2: Vec<f64> = (1..n).map(|_| rng.gen()).collect();
        tail2.sort_by(|a, b| b.total_cmp(a));
        let f_hi: Vec<f64> = f
            .iter()
            .zip(std::iter::once(1.0).chain(tail2))
            .map(|(&a, b)| a.max(b))
            .collect();
        let g: f64 = rng.gen();
        let q = g * rng.gen::<f64>();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        order.truncate(rng.gen_range(1..=n));
        let slate = Slate::new(order).unwrap();

        let params = |u: &[f64], f: &[f64]| {
            ModelParams::new(
                Catalog::new(cats.clone()).unwrap(),
                Relevance::new(u.to_vec()).unwrap(),
                DiscountCurve::new(f.to_vec()).unwrap(),
                BehaviorParams::new(g, q).unwrap(),
            )
            .unwrap()
        };
        let base = expected_reward(&slate, &params(&u, &f)).unwrap();
        let more_u = expected_reward(&slate, &params(&u_hi, &f)).unwrap();
        let more_f = expected_reward(&slate, &params(&u, &f_hi)).unwrap();
        let both = expected_reward(&slate, &params(&u_hi, &f_hi)).unwrap();
        let tol = 1e-12;
        if more_u < base - tol || more_f < base - tol || both < more_u - tol || both < more_f - tol {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in {trials} (slate, u <= u', f <= f') triples"),
    )
}

fn model_consistency() -> Outcome {
    let p = ModelParams::new(
        Catalog::new(vec![0, 1, 0, 0, 1]).unwrap(),
        Relevance::new(vec![0.55, 0.35, 0.45, 0.25, 0.6]).unwrap(),
        DiscountCurve::new(vec![1.0, 0.85, 0.7]).unwrap(),
        BehaviorParams::new(0.85, 0.65).unwrap(),
    )
    .unwrap();
    let slate = Slate::new(vec![4, 0, 2, 1, 3]).unwrap();
    // z and reach written out by hand for this slate
    let z = [0.6, 0.55, 0.45 * 0.85, 0.35 * 0.85, 0.25 * 0.7];
    let mut reach = [1.0; 5];
    for k in 1..5 {
        reach[k] = reach[k - 1] * (0.85 * z[k - 1] + 0.65 * (1.0 - z[k - 1]));
    }
    let sessions = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut clicks = [0u64; 5];
    for _ in 0..sessions {
        let r = simulate_session(&slate, &p, &mut rng).unwrap();
        for (k, &c) in r.clicks.iter().enumerate() {
            clicks[k] += c as u64;
        }
    }
    let mut worst: f64 = 0.0;
    for k in 0..5 {
        let want = reach[k] * z[k];
        let lib = fadcm_core::click_probability(&slate, k, &p).unwrap();
        if (lib - want).abs() > 1e-12 {
            return outcome(false, format!("closed form at {k}: {lib} vs {want}"));
        }
        let got = clicks[k] as f64 / sessions as f64;
        let se = (want * (1.0 - want) / sessions as f64).sqrt();
        worst = worst.max((got - want).abs() / se);
    }
    outcome(
        worst <= 4.0,
        format!("worst position deviation {worst:.2} SE over {sessions} sessions"),
    )
}

fn estimator_consistency() -> Outcome {
    // relevance with known discount, every position examined
    let p = ModelParams::new(
        Catalog::new(vec![0, 0, 1, 0, 1]).unwrap(),
        Relevance::new(vec![0.6, 0.5, 0.4, 0.7, 0.3]).unwrap(),
        DiscountCurve::new(vec![1.0, 0.8, 0.6]).unwrap(),
        BehaviorParams::new(1.0, 1.0).unwrap(),
    )
    .unwrap();
    let mut fp = FaDcmPPolicy::new(p.catalog.clone(), p.discount.clone(), None);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for t in 0..50_000usize {
        let mut order = vec![0, 1, 2, 3, 4];
        order.rotate_left(t % 5);
        let rec = simulate_session(&Slate::new(order).unwrap(), &p, &mut rng).unwrap();
        fp.observe(&rec).unwrap();
    }
    let u_err = fp
        .estimates()
        .iter()
        .zip(p.relevance.as_slice())
        .map(|(e, u)| (e.unwrap() - u).abs())
        .fold(0.0, f64::max);
    let min_exposures = *fp.exposures().iter().min().unwrap();

    // discount learned from clicks, one category rotated through all indices
    let q = ModelParams::new(
        Catalog::uniform(1, 4).unwrap(),
        Relevance::new(vec![0.5, 0.35, 0.6, 0.45]).unwrap(),
        DiscountCurve::exponential(0.15, 4).unwrap(),
        BehaviorParams::new(1.0, 1.0).unwrap(),
    )
    .unwrap();
    let mut fd = FaDcmPolicy::new(q.catalog.clone(), FaDcmConfig::default(), None);
    for t in 0..20_000usize {
        let mut order = vec![0, 1, 2, 3];
        order.rotate_left(t % 4);
        let rec = simulate_session(&Slate::new(order).unwrap(), &q, &mut rng).unwrap();
        fd.observe(&rec).unwrap();
    }
    let ev = fd.events();
    let min_first = (0..4).map(|j| ev.count(0, j)).min().unwrap();
    let min_index = (1..4).map(|i| ev.index_total(i)).min().unwrap();
    let f_err = fd
        .discount_estimates()
        .iter()
        .enumerate()
        .skip(1)
        .take(3)
        .map(|(i, e)| (e.unwrap() - q.discount.get(i)).abs())
        .fold(0.0, f64::max);

    outcome(
        u_err <= 0.02 && min_exposures >= 50_000 && f_err <= 0.05 && min_first >= 1000 && min_index >= 1000,
        format!(
            "max |u_hat - u| {u_err:.4} (min exposures {min_exposures}); max |f_hat - f| {f_err:.4} \
             (min events/index {min_index}, min first-of-category {min_first})"
        ),
    )
}

fn confidence_coverage() -> Outcome {
    let cfg = &preset("I").unwrap().cases[0];
    let (mut hits, mut samples) = (0u64, 0u64);
    for rep in 0..3 {
        let truth = cfg.draw_truth(&mut replication_rng(cfg.master_seed, rep, 0)).unwrap();
        let u = truth.relevance.as_slice();
        let mut policy = FaDcmPPolicy::new(truth.catalog.clone(), truth.discount.clone(), None);
        let mut srng = replication_rng(cfg.master_seed, rep, 1);
        let mut prng = replication_rng(cfg.master_seed, rep, 2);
        for t in 1..=5000u64 {
            let s = policy.select_slate(t, &mut prng).unwrap();
            let rec = simulate_session(&s, &truth, &mut srng).unwrap();
            policy.observe(&rec).unwrap();
            if t >= 100 && t % 100 == 0 {
                let ucb = policy.ucb(t);
                let log_t = (t as f64).ln();
                for j in 0..u.len() {
                    let n = policy.exposures()[j];
                    if n == 0 {
                        continue;
                    }
                    samples += 1;
                    let width = (8.0 * log_t / n as f64).sqrt();
                    if u[j] <= ucb[j] && u[j] >= ucb[j] - width {
                        hits += 1;
                    }
                }
            }
        }
    }
    let rate = hits as f64 / samples as f64;
    outcome(
        rate >= 0.99,
        format!("{hits}/{samples} (j, t) samples covered ({:.2}%)", 100.0 * rate),
    )
}

fn experiment_one(runs: &PresetRuns) -> Outcome {
    let m: Vec<f64> = ["case1", "case2", "case3"]
        .iter()
        .map(|c| runs.final_of("expI", c))
        .collect();
    let in_band = m.iter().all(|&x| (150.0..=600.0).contains(&x));
    let ordered = m[0] > m[1] && m[1] > m[2];
    outcome(
        in_band && ordered,
        format!(
            "means {:.1} / {:.1} / {:.1}; in [150, 600]: {in_band}; case1 > case2 > case3: {ordered}",
            m[0], m[1], m[2]
        ),
    )
}

fn experiment_two(runs: &PresetRuns) -> Outcome {
    let m: Vec<f64> = ["case4", "case5", "case6"]
        .iter()
        .map(|c| runs.final_of("expII", c))
        .collect();
    let in_band = m.iter().all(|&x| (500.0..=2500.0).contains(&x));
    let ordered = m[0] > m[1] && m[0] > m[2];
    // (g, q, f) of case4 and case6 equal those of case2 and case3 above
    let p2 = runs.final_of("expI", "case2");
    let p3 = runs.final_of("expI", "case3");
    let harder = m[0] > p2 && m[2] > p3;
    outcome(
        in_band && ordered && harder,
        format!(
            "means {:.1} / {:.1} / {:.1}; in [500, 2500]: {in_band}; case4 > case5, case4 > case6: {ordered}; \
             above known-discount learner ({p2:.1}, {p3:.1}): {harder}",
            m[0], m[1], m[2]
        ),
    )
}

fn experiment_three(runs: &PresetRuns) -> Outcome {
    let fa = runs.final_of("expIII", "fadcm");
    let ete = runs.final_of("expIII", "ete");
    outcome(
        ete >= 1.1 * fa,
        format!("ete {ete:.1} vs fa-dcm {fa:.1} (ratio {:.3}, need >= 1.1)", ete / fa),
    )
}

fn experiment_four(runs: &PresetRuns) -> Outcome {
    let fa = runs.final_of("expIV", "fadcm");
    let ete = runs.final_of("expIV", "ete");
    outcome(fa < ete, format!("fa-dcm {fa:.1} vs ete {ete:.1} (need fa-dcm < ete)"))
}

fn sublinearity(runs: &PresetRuns) -> Outcome {
    let mut worst = ("", "", 0.0f64);
    let mut parts = Vec::new();
    for (suite, cases) in [("expI", ["case1", "case2", "case3"]), ("expII", ["case4", "case5", "case6"])] {
        for case in cases {
            let s = runs.get(suite, case);
            let r = s.mean_at(10_000).unwrap() / s.mean_at(5_000).unwrap();
            parts.push(format!("{case} {r:.3}"));
            if r > worst.2 {
                worst = (suite, case, r);
            }
        }
    }
    outcome(
        worst.2 < 2.0,
        format!("regret(1e4)/regret(5e3): {}", parts.join(", ")),
    )
}

fn determinism() -> Outcome {
    let csv = |cfg: &ExperimentConfig, jobs| {
        let stats = run_experiment(cfg, jobs).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, cfg, &stats).unwrap();
        buf
    };
    let mut all_equal = true;
    let mut checked = 0;
    for name in ["I", "II", "III"] {
        for mut cfg in preset(name).unwrap().cases {
            cfg.horizon = 1500;
            cfg.replications = 4;
            cfg.master_seed = 42;
            let a = csv(&cfg, None);
            let b = csv(&cfg, Some(1));
            all_equal &= a == b;
            checked += 1;
        }
    }
    outcome(
        all_equal,
        format!("{checked} cases run twice with seed 42 (pooled vs single thread): byte-identical {all_equal}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "offline optimality", offline_optimality()),
        (2, "reward monotonicity", monotonicity()),
        (3, "Monte Carlo click frequencies", model_consistency()),
        (4, "estimator consistency", estimator_consistency()),
        (5, "confidence coverage", confidence_coverage()),
    ];

    eprintln!("running presets I-IV at full scale");
    let runs = PresetRuns::run(&["I", "II", "III", "IV"]);
    results.push((6, "experiment I", experiment_one(&runs)));
    results.push((7, "experiment II", experiment_two(&runs)));
    results.push((8, "experiment III", experiment_three(&runs)));
    results.push((9, "experiment IV stand-in", experiment_four(&runs)));
    results.push((10, "sublinear regret", sublinearity(&runs)));
    results.push((11, "determinism", determinism()));

    let failed = results.iter().filter(|r| !r.2.pass).count();
    for (id, name, o) in &results {
        println!(
            "{} criterion {id:>2} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
