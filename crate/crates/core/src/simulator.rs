//! One simulated user session per call, with the partial feedback a platform
//! actually observes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{same_category_prefix_counts, Catalog, ModelParams, Slate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitCause {
    AbandonedAfterClick,
    AbandonedAfterSkip,
    ExhaustedSlate,
}

/// Feedback from one session. Positions at or beyond `examined_len` were
/// never seen by the user and carry no information.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub slate: Slate,
    pub examined_len: usize,
    pub clicks: Vec<bool>,
    pub exit_cause: ExitCause,
    pub realized_clicks: usize,
}

/// Item `item_id` was examined while `discount_index` items of its category
/// had already been shown; `click` is the observed outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventObservation {
    pub discount_index: usize,
    pub item_id: usize,
    pub click: bool,
}

/// Plays one user through `slate` under `truth`.
///
/// The first item is always examined. Each examined item is clicked with
/// probability equal to its attractiveness; the user then continues with
/// probability `g` (after a click) or `q` (after a skip).
pub fn simulate_session<R: Rng + ?Sized>(
    slate: &Slate,
    truth: &ModelParams,
    rng: &mut R,
) -> Result<InteractionRecord> {
    slate.check(&truth.catalog)?;
    let cats = truth.catalog.categories();
    let u = truth.relevance.as_slice();
    let mut shown = vec![0usize; truth.catalog.n_categories()];
    let mut clicks = Vec::with_capacity(slate.len());
    let mut exit_cause = ExitCause::ExhaustedSlate;

    for (pos, &item) in slate.items().iter().enumerate() {
        let c = cats[item];
        let z = truth.discount.get(shown[c]) * u[item];
        shown[c] += 1;
        let clicked = rng.gen::<f64>() < z;
        clicks.push(clicked);
        if pos + 1 == slate.len() {
            break;
        }
        let resume = if clicked { truth.behavior.g } else { truth.behavior.q };
        if rng.gen::<f64>() >= resume {
            exit_cause = if clicked {
                ExitCause::AbandonedAfterClick
            } else {
                ExitCause::AbandonedAfterSkip
            };
            break;
        }
    }

    let realized_clicks = clicks.iter().filter(|&&c| c).count();
    Ok(InteractionRecord {
        slate: slate.clone(),
        examined_len: clicks.len(),
        clicks,
        exit_cause,
        realized_clicks,
    })
}

/// One event per examined position.
pub fn extract_events(record: &InteractionRecord, catalog: &Catalog) -> Result<Vec<EventObservation>> {
    let h = same_category_prefix_counts(&record.slate, catalog)?;
    Ok(record
        .slate
        .items()
        .iter()
        .zip(h)
        .zip(&record.clicks)
        .take(record.examined_len)
        .map(|((&item_id, discount_index), &click)| EventObservation {
            discount_index,
            item_id,
            click,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BehaviorParams, DiscountCurve, Relevance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(u: f64, g: f64, q: f64) -> ModelParams {
        ModelParams::new(
            Catalog::uniform(2, 3).unwrap(),
            Relevance::new(vec![u; 6]).unwrap(),
            DiscountCurve::flat(),
            BehaviorParams::new(g, q).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn all_certain_clicks_exhaust_slate() {
        let p = params(1.0, 1.0, 0.0);
        let s = Slate::new(vec![3, 0, 4, 1, 5, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = simulate_session(&s, &p, &mut rng).unwrap();
        assert_eq!(r.examined_len, 6);
        assert!(r.clicks.iter().all(|&c| c));
        assert_eq!(r.exit_cause, ExitCause::ExhaustedSlate);
        assert_eq!(r.realized_clicks, 6);
    }

    #[test]
    fn certain_skip_then_exit() {
        let p = params(0.0, 0.5, 0.0);
        let s = Slate::new(vec![0, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = simulate_session(&s, &p, &mut rng).unwrap();
        assert_eq!(r.examined_len, 1);
        assert_eq!(r.clicks, vec![false]);
        assert_eq!(r.exit_cause, ExitCause::AbandonedAfterSkip);
    }

    #[test]
    fn same_seed_same_record() {
        let p = params(0.4, 0.8, 0.6);
        let s = Slate::new(vec![0, 1, 2, 3, 4, 5]).unwrap();
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..50).map(|_| simulate_session(&s, &p, &mut rng).unwrap()).collect()
        };
        let b: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..50).map(|_| simulate_session(&s, &p, &mut rng).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_iff_full_examination() {
        let p = params(0.5, 0.7, 0.4);
        let s = Slate::new(vec![0, 3, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let r = simulate_session(&s, &p, &mut rng).unwrap();
            assert!(r.examined_len >= 1 && r.examined_len <= 3);
            assert_eq!(r.exit_cause == ExitCause::ExhaustedSlate, r.examined_len == 3);
            assert_eq!(r.clicks.len(), r.examined_len);
        }
    }

    #[test]
    fn events_follow_prefix_counts() {
        // categories (A, B, A)
        let cat = Catalog::new(vec![0, 1, 0]).unwrap();
        let record = InteractionRecord {
            slate: Slate::new(vec![0, 1, 2]).unwrap(),
            examined_len: 3,
            clicks: vec![true, false, true],
            exit_cause: ExitCause::ExhaustedSlate,
            realized_clicks: 2,
        };
        let ev = extract_events(&record, &cat).unwrap();
        assert_eq!(
            ev,
            vec![
                EventObservation { discount_index: 0, item_id: 0, click: true },
                EventObservation { discount_index: 0, item_id: 1, click: false },
                EventObservation { discount_index: 1, item_id: 2, click: true },
            ]
        );
    }

    #[test]
    fn partial_examination_yields_prefix_events() {
        let cat = Catalog::uniform(1, 5).unwrap();
        let record = InteractionRecord {
            slate: Slate::new(vec![4, 3, 2, 1, 0]).unwrap(),
            examined_len: 2,
            clicks: vec![false, true],
            exit_cause: ExitCause::AbandonedAfterClick,
            realized_clicks: 1,
        };
        let ev = extract_events(&record, &cat).unwrap();
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[1], EventObservation { discount_index: 1, item_id: 3, click: true });
    }

    #[test]
    fn nonempty_slate_always_yields_an_event() {
        let p = params(0.1, 0.1, 0.0);
        let s = Slate::new(vec![2, 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let r = simulate_session(&s, &p, &mut rng).unwrap();
            assert!(!extract_events(&r, &p.catalog).unwrap().is_empty());
        }
    }
}
