//! Internal base-level learners: a probability-emitting gain-ratio decision
//! tree plus the simple landmark learners built on the same split machinery.

mod landmark;
mod tree;

pub use landmark::{
    train_landmarker, DistanceContext, LandmarkKind, LandmarkModel, NaiveBayesModel,
    NearestNeighborModel,
};
pub use tree::{train_tree, DecisionTree, TreeNode, TreeParams};

pub(crate) use landmark::mixed_distance;
pub(crate) use tree::{attribute_gains, stump_on_attribute};
