//! Gradient-boosted trees with a class-weighted log loss.

pub mod ensemble;
pub mod format;
pub mod loss;
pub mod tree;

pub use ensemble::{ensemble_vote, MajorityBaseline, OneVsRest, ProbabilisticClassifier, VotingEnsemble};
pub use format::{load_model, read_model, save_model, write_model};
pub use loss::{
    apply_threshold, loss_grad_hess, sigmoid, weighted_log_loss, Logistic, LossParams, Objective, WeightedLogLoss,
};
pub use tree::{loss_history, train_gbt, GbtModel, GbtParams, Node, Tree};
