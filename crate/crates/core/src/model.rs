//! User-behavior model: catalog, relevance, discount curve, resume
//! probabilities, and the closed-form click probabilities they induce.
//!
//! A user scans a slate from the top. The item at a position is attractive
//! with probability `z = f(h) * u`, where `u` is the item's intrinsic
//! relevance and `h` counts how many items of the same category were shown
//! earlier in the slate. After a click the user keeps browsing with
//! probability `g`; after a skip, with probability `q <= g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The item universe. Item ids are `0..n_items`; each belongs to exactly one
/// of `n_categories` categories, and every category is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    category_of: Vec<usize>,
    n_categories: usize,
}

impl Catalog {
    /// Builds a catalog from the category label of each item (index = item id).
    pub fn new(category_of: Vec<usize>) -> Result<Self> {
        if category_of.is_empty() {
            return Err(Error::param("catalog", "must contain at least one item"));
        }
        let n_categories = category_of.iter().copied().max().unwrap_or(0) + 1;
        let mut seen = vec![false; n_categories];
        for &c in &category_of {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::param(
                "catalog",
                format!("category {missing} owns no items"),
            ));
        }
        Ok(Self {
            category_of,
            n_categories,
        })
    }

    /// `categories` blocks of `per_category` consecutive item ids each.
    pub fn uniform(categories: usize, per_category: usize) -> Result<Self> {
        if categories == 0 || per_category == 0 {
            return Err(Error::param(
                "catalog",
                "categories and items_per_category must both be >= 1",
            ));
        }
        Self::new(
            (0..categories * per_category)
                .map(|i| i / per_category)
                .collect(),
        )
    }

    pub fn n_items(&self) -> usize {
        self.category_of.len()
    }

    pub fn n_categories(&self) -> usize {
        self.n_categories
    }

    /// Category of `item`, or `None` for an id outside the catalog.
    pub fn category(&self, item: usize) -> Option<usize> {
        self.category_of.get(item).copied()
    }

    pub fn categories(&self) -> &[usize] {
        &self.category_of
    }

    /// Item ids grouped by category, each group in ascending id order.
    pub fn items_by_category(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_categories];
        for (item, &c) in self.category_of.iter().enumerate() {
            groups[c].push(item);
        }
        groups
    }

    /// Size of the largest category.
    pub fn max_category_size(&self) -> usize {
        self.items_by_category()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }
}

/// Intrinsic relevance of every item: the click probability when the item is
/// shown undiscounted. Entries lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relevance(Vec<f64>);

impl Relevance {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &u) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::param(
                    format!("relevance[{i}]"),
                    format!("{u} is not a probability in [0, 1]"),
                ));
            }
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Content-fatigue discount `f(h)` for an item preceded by `h` items of its
/// own category. Stored explicitly for `h = 0..=plateau`; larger `h` reuse the
/// plateau value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    values: Vec<f64>,
}

impl DiscountCurve {
    /// Requires `values[0] == 1`, entries in `[0, 1]`, non-increasing.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            None => return Err(Error::param("discount", "needs at least f(0)")),
            Some(&f0) if f0 != 1.0 => {
                return Err(Error::param("discount", format!("f(0) must be 1, got {f0}")))
            }
            _ => {}
        }
        for (r, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(
                    "discount",
                    format!("f({r}) = {v} is outside [0, 1]"),
                ));
            }
        }
        if let Some(r) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::param(
                "discount",
                format!("f must be non-increasing but f({}) > f({r})", r + 1),
            ));
        }
        Ok(Self { values })
    }

    /// `f(h) = exp(-rate * h)` stored up to `plateau`.
    pub fn exponential(rate: f64, plateau: usize) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::param("discount.rate", "must be finite and >= 0"));
        }
        Self::new((0..=plateau).map(|h| (-rate * h as f64).exp()).collect())
    }

    /// No fatigue: `f = 1` everywhere.
    pub fn flat() -> Self {
        Self { values: vec![1.0] }
    }

    pub fn get(&self, h: usize) -> f64 {
        self.values[h.min(self.plateau_index())]
    }

    /// Index `M` after which the curve is constant.
    pub fn plateau_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Resume probabilities after a click (`g`) and after a skip (`q`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorParams {
    pub g: f64,
    pub q: f64,
}

impl BehaviorParams {
    pub fn new(g: f64, q: f64) -> Result<Self> {
        let b = Self { g, q };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.g) {
            return Err(Error::param("behavior.g", format!("{} is outside [0, 1]", self.g)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::param("behavior.q", format!("{} is outside [0, 1]", self.q)));
        }
        if self.q > self.g {
            return Err(Error::param(
                "behavior.q",
                format!("q = {} must not exceed g = {} (0 <= q <= g <= 1)", self.q, self.g),
            ));
        }
        Ok(())
    }

    /// Probability of examining the next item after one with attractiveness `z`.
    #[inline]
    pub fn continuation(&self, z: f64) -> f64 {
        self.g * z + self.q * (1.0 - z)
    }
}

/// Full ground truth of one simulated environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub catalog: Catalog,
    pub relevance: Relevance,
    pub discount: DiscountCurve,
    pub behavior: BehaviorParams,
}

impl ModelParams {
    pub fn new(
        catalog: Catalog,
        relevance: Relevance,
        discount: DiscountCurve,
        behavior: BehaviorParams,
    ) -> Result<Self> {
        if relevance.len() != catalog.n_items() {
            return Err(Error::Dimension {
                expected: catalog.n_items(),
                got: relevance.len(),
            });
        }
        behavior.validate()?;
        Ok(Self {
            catalog,
            relevance,
            discount,
            behavior,
        })
    }
}

/// An ordered, duplicate-free list of item ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slate(Vec<usize>);

impl Slate {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSlate(format!("item {} appears twice", w[0])));
        }
        Ok(Self(order))
    }

    /// Like [`Slate::new`], additionally checking every id against `catalog`.
    pub fn for_catalog(order: Vec<usize>, catalog: &Catalog) -> Result<Self> {
        let slate = Self::new(order)?;
        slate.check(catalog)?;
        Ok(slate)
    }

    /// Callers guarantee the order has no duplicates.
    pub(crate) fn from_unique(order: Vec<usize>) -> Self {
        debug_assert!(Self::new(order.clone()).is_ok());
        Self(order)
    }

    pub fn check(&self, catalog: &Catalog) -> Result<()> {
        match self.0.iter().find(|&&i| i >= catalog.n_items()) {
            Some(bad) => Err(Error::InvalidSlate(format!(
                "unknown item id {bad} (catalog has {} items)",
                catalog.n_items()
            ))),
            None => Ok(()),
        }
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// For every position, how many earlier positions hold an item of the same
/// category.
pub fn same_category_prefix_counts(slate: &Slate, catalog: &Catalog) -> Result<Vec<usize>> {
    slate.check(catalog)?;
    let mut shown = vec![0usize; catalog.n_categories()];
    Ok(slate
        .items()
        .iter()
        .map(|&item| {
            let c = catalog.categories()[item];
            let h = shown[c];
            shown[c] += 1;
            h
        })
        .collect())
}

/// Attractiveness `f(h_p) * u[slate[p]]` at each position.
pub fn attractiveness_profile(slate: &Slate, params: &ModelParams) -> Result<Vec<f64>> {
    attractiveness_with(slate, &params.catalog, params.relevance.as_slice(), &params.discount)
}

/// Attractiveness for raw relevance vectors (used for planning with
/// optimistic estimates that may exceed 1).
pub fn attractiveness_with(
    slate: &Slate,
    catalog: &Catalog,
    u: &[f64],
    discount: &DiscountCurve,
) -> Result<Vec<f64>> {
    if u.len() != catalog.n_items() {
        return Err(Error::Dimension {
            expected: catalog.n_items(),
            got: u.len(),
        });
    }
    let h = same_category_prefix_counts(slate, catalog)?;
    Ok(slate
        .items()
        .iter()
        .zip(h)
        .map(|(&item, h)| discount.get(h) * u[item])
        .collect())
}

/// Unconditional probability that the item at `position` is clicked.
pub fn click_probability(slate: &Slate, position: usize, params: &ModelParams) -> Result<f64> {
    if position >= slate.len() {
        return Err(Error::IndexOutOfRange {
            position,
            len: slate.len(),
        });
    }
    let z = attractiveness_profile(slate, params)?;
    let reach: f64 = z[..position]
        .iter()
        .map(|&zk| params.behavior.continuation(zk))
        .product();
    Ok(reach * z[position])
}

/// Expected number of clicks on `slate`.
pub fn expected_reward(slate: &Slate, params: &ModelParams) -> Result<f64> {
    expected_reward_with(
        slate,
        &params.catalog,
        params.relevance.as_slice(),
        &params.discount,
        &params.behavior,
    )
}

/// Expected clicks for arbitrary non-negative `u` and discount, in one pass.
pub fn expected_reward_with(
    slate: &Slate,
    catalog: &Catalog,
    u: &[f64],
    discount: &DiscountCurve,
    behavior: &BehaviorParams,
) -> Result<f64> {
    if u.len() != catalog.n_items() {
        return Err(Error::Dimension {
            expected: catalog.n_items(),
            got: u.len(),
        });
    }
    slate.check(catalog)?;
    Ok(reward_unchecked(slate.items(), catalog, u, discount, behavior))
}

/// Hot-path reward evaluation; ids must be valid and `u` sized to the catalog.
pub(crate) fn reward_unchecked(
    items: &[usize],
    catalog: &Catalog,
    u: &[f64],
    discount: &DiscountCurve,
    behavior: &BehaviorParams,
) -> f64 {
    let cats = catalog.categories();
    let mut shown = vec![0usize; catalog.n_categories()];
    let mut reach = 1.0;
    let mut total = 0.0;
    for &item in items {
        let c = cats[item];
        let z = discount.get(shown[c]) * u[item];
        shown[c] += 1;
        total += reach * z;
        reach *= behavior.continuation(z);
    }
    total
}
