//! The two reference runs shipped with the crate.
//!
//! `KB_RUN1` with `RUN1_FEATURES` settles on `depressive_ep` at the ninth
//! input. `KB_RUN2` with `RUN2_FEATURES` never settles; three demons die on
//! the final input. See `fixtures/NOTES.md` for how the goldens were checked.

use crate::feature::{parse_feature_list, FeatureId};

pub const KB_RUN1: &str = include_str!("../fixtures/kb_run1.dune");
pub const KB_RUN2: &str = include_str!("../fixtures/kb_run2.dune");
pub const RUN1_FEATURES: &str = include_str!("../fixtures/run1.features");
pub const RUN2_FEATURES: &str = include_str!("../fixtures/run2.features");
pub const RUN1_STEPS_GOLDEN: &str = include_str!("../fixtures/run1_steps.golden");
pub const RUN1_MATRIX_GOLDEN: &str = include_str!("../fixtures/run1_matrix.golden");
pub const RUN2_MATRIX_GOLDEN: &str = include_str!("../fixtures/run2_matrix.golden");

pub fn run1_features() -> Vec<FeatureId> {
    parse_feature_list(RUN1_FEATURES).expect("shipped fixture is well formed")
}

pub fn run2_features() -> Vec<FeatureId> {
    parse_feature_list(RUN2_FEATURES).expect("shipped fixture is well formed")
}
