//! Fatigue-aware dependent click model (DCM) bandits.
//!
//! Users scan a ranked slate, click items that attract them and may leave
//! after any item, more readily after a skip. An item's attractiveness is its
//! intrinsic relevance discounted by how many same-category items were shown
//! before it. This crate provides:
//!
//! - [`model`]: the user model and closed-form click probabilities,
//! - [`optimizer`]: the O(N log N) optimal slate and a brute-force oracle,
//! - [`simulator`]: sampled sessions with partial feedback,
//! - [`policy`]: UCB learners for known and unknown discount curves, an
//!   explore-then-exploit benchmark and a clairvoyant oracle,
//! - [`harness`]: seeded, parallel regret experiments and result files.

pub mod error;
pub mod harness;
pub mod model;
pub mod optimizer;
pub mod policy;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{
    attractiveness_profile, click_probability, expected_reward, expected_reward_with,
    same_category_prefix_counts, BehaviorParams, Catalog, DiscountCurve, ModelParams, Relevance,
    Slate,
};
pub use optimizer::{brute_force_slate, optimal_slate, ranked_scores, RankedScore};
pub use simulator::{extract_events, simulate_session, EventObservation, ExitCause, InteractionRecord};
