//! Offline slate optimization.
//!
//! The reward-maximizing slate depends only on relevance and discount, never
//! on the resume probabilities: rank items inside each category by relevance,
//! discount the item of within-category rank `r` by `f(r)`, and sort every
//! item by the discounted score. [`brute_force_slate`] enumerates orderings
//! and serves as the correctness oracle for small catalogs.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{reward_unchecked, Catalog, DiscountCurve, ModelParams, Slate};

/// Largest number of orderings [`brute_force_slate`] will enumerate (8!).
pub const DEFAULT_ORDERING_CAP: u128 = 40_320;

/// An item with its discounted attractiveness `lambda = u * f(rank)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedScore {
    pub item_id: usize,
    pub category_rank: usize,
    pub lambda: f64,
}

fn by_score_then_id(a: (f64, usize), b: (f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Discounted scores for every item, in descending order of `lambda`
/// (ties by smaller id).
///
/// `u` may exceed 1 (optimistic indices); entries must be non-negative.
pub fn ranked_scores(
    catalog: &Catalog,
    u: &[f64],
    discount: &DiscountCurve,
) -> Result<Vec<RankedScore>> {
    if u.len() != catalog.n_items() {
        return Err(Error::Dimension {
            expected: catalog.n_items(),
            got: u.len(),
        });
    }
    if let Some(j) = u.iter().position(|x| !(*x >= 0.0)) {
        return Err(Error::param(format!("u[{j}]"), format!("{} is negative or NaN", u[j])));
    }

    let mut scores = Vec::with_capacity(u.len());
    for mut group in catalog.items_by_category() {
        group.sort_by(|&a, &b| by_score_then_id((u[a], a), (u[b], b)));
        for (rank, item) in group.into_iter().enumerate() {
            scores.push(RankedScore {
                item_id: item,
                category_rank: rank,
                lambda: u[item] * discount.get(rank),
            });
        }
    }
    scores.sort_by(|a, b| by_score_then_id((a.lambda, a.item_id), (b.lambda, b.item_id)));
    Ok(scores)
}

/// The reward-maximizing slate for relevance `u` and discount `discount`,
/// optionally truncated to its first `max_len` items.
pub fn optimal_slate(
    catalog: &Catalog,
    u: &[f64],
    discount: &DiscountCurve,
    max_len: Option<usize>,
) -> Result<Slate> {
    let n = catalog.n_items();
    let len = match max_len {
        Some(l) if l > n => {
            return Err(Error::param(
                "max_len",
                format!("{l} exceeds the catalog size {n}"),
            ))
        }
        Some(l) => l,
        None => n,
    };
    let order = ranked_scores(catalog, u, discount)?
        .into_iter()
        .take(len)
        .map(|s| s.item_id)
        .collect();
    Ok(Slate::from_unique(order))
}

/// Number of ordered selections of `len` items out of `n`.
pub fn ordering_count(n: usize, len: usize) -> u128 {
    if len > n {
        return 0;
    }
    ((n - len + 1)..=n).map(|k| k as u128).product()
}

/// Exhaustively searches every ordered selection of exactly `max_len` items
/// and returns one with maximal expected reward (first found on ties, in
/// lexicographic enumeration order).
pub fn brute_force_slate(params: &ModelParams, max_len: usize) -> Result<(Slate, f64)> {
    brute_force_slate_capped(params, max_len, DEFAULT_ORDERING_CAP)
}

pub fn brute_force_slate_capped(
    params: &ModelParams,
    max_len: usize,
    cap: u128,
) -> Result<(Slate, f64)> {
    let n = params.catalog.n_items();
    if max_len > n {
        return Err(Error::param(
            "max_len",
            format!("{max_len} exceeds the catalog size {n}"),
        ));
    }
    let orderings = ordering_count(n, max_len);
    if orderings > cap {
        return Err(Error::Capacity { orderings, cap });
    }

    struct Search<'a> {
        params: &'a ModelParams,
        len: usize,
        used: Vec<bool>,
        prefix: Vec<usize>,
        best: Vec<usize>,
        best_reward: f64,
    }

    impl Search<'_> {
        fn visit(&mut self) {
            if self.prefix.len() == self.len {
                let r = reward_unchecked(
                    &self.prefix,
                    &self.params.catalog,
                    self.params.relevance.as_slice(),
                    &self.params.discount,
                    &self.params.behavior,
                );
                if r > self.best_reward {
                    self.best_reward = r;
                    self.best.clone_from(&self.prefix);
                }
                return;
            }
            for item in 0..self.used.len() {
                if !self.used[item] {
                    self.used[item] = true;
                    self.prefix.push(item);
                    self.visit();
                    self.prefix.pop();
                    self.used[item] = false;
                }
            }
        }
    }

    let mut search = Search {
        params,
        len: max_len,
        used: vec![false; n],
        prefix: Vec::with_capacity(max_len),
        best: Vec::new(),
        best_reward: f64::NEG_INFINITY,
    };
    search.visit();
    Ok((Slate::from_unique(search.best), search.best_reward))
}
