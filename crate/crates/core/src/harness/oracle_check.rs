//! Randomized equivalence check of the optimal-slate ordering against
//! exhaustive search.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    expected_reward, BehaviorParams, Catalog, DiscountCurve, ModelParams, Relevance,
};
use crate::optimizer::{brute_force_slate, optimal_slate};

pub const MAX_ORACLE_ITEMS: usize = 8;
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheckReport {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub max_abs_diff: f64,
}

impl OracleCheckReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// A random instance with `1..=max_items` items in at most three categories,
/// relevance in `[0, 1]`, a random non-increasing discount with `f(0) = 1`,
/// and `0 <= q <= g <= 1`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_items: usize) -> ModelParams {
    let n = rng.gen_range(1..=max_items.max(1));
    let k = rng.gen_range(1..=n.min(3));
    let mut cats: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    cats.shuffle(rng);

    let u = (0..n).map(|_| rng.gen::<f64>()).collect();

    let mut tail: Vec<f64> = (1..n).map(|_| rng.gen::<f64>()).collect();
    if rng.gen_bool(0.2) {
        // plateaus and exact ties in f
        for v in tail.iter_mut() {
            *v = (*v * 4.0).round() / 4.0;
        }
    }
    tail.sort_by(|a, b| b.total_cmp(a));
    let mut f = vec![1.0];
    f.extend(tail);

    let g = rng.gen::<f64>();
    let q = g * rng.gen::<f64>();
    ModelParams::new(
        Catalog::new(cats).expect("every category seeded"),
        Relevance::new(u).expect("uniform draws are probabilities"),
        DiscountCurve::new(f).expect("sorted draws are non-increasing"),
        BehaviorParams::new(g, q).expect("q <= g by construction"),
    )
    .expect("dimensions agree")
}

/// Runs `instances` random comparisons. With `inject_fault` the fast path
/// ignores the discount (a negative control that must report failures).
pub fn run_oracle_check(
    instances: usize,
    max_items: usize,
    seed: u64,
    inject_fault: bool,
) -> Result<OracleCheckReport> {
    if max_items > MAX_ORACLE_ITEMS {
        return Err(Error::Capacity {
            orderings: crate::optimizer::ordering_count(max_items, max_items),
            cap: crate::optimizer::DEFAULT_ORDERING_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleCheckReport {
        instances,
        passed: 0,
        failed: 0,
        max_abs_diff: 0.0,
    };
    for _ in 0..instances {
        let p = random_instance(&mut rng, max_items);
        let n = p.catalog.n_items();
        let curve = if inject_fault {
            DiscountCurve::flat()
        } else {
            p.discount.clone()
        };
        let fast = optimal_slate(&p.catalog, p.relevance.as_slice(), &curve, None)?;
        let fast_reward = expected_reward(&fast, &p)?;
        let (_, best) = brute_force_slate(&p, n)?;
        let diff = (best - fast_reward).abs();
        report.max_abs_diff = report.max_abs_diff.max(diff);
        if diff <= ORACLE_TOLERANCE {
            report.passed += 1;
        } else {
            report.failed += 1;
        }
    }
    Ok(report)
}
