//! Random projections with measured distortion, Walsh point sets, and the
//! embedding-to-type/cotype mechanism experiment.

mod embed;
mod mechanism;
mod walsh;

pub use embed::{
    distortion_of_map, gaussian_points, jl_draw_distortion, jl_embed, jl_trial, jl_trials, target_dimension, DistortionReport, Embedding, JlTrial, LinearMap,
    PointSet, MAX_ATTEMPTS,
};
pub use mechanism::{jl_mechanism_experiment, MechanismReport, MechanismTrial, SLACK};
pub use walsh::{
    padding_m, walsh_orthogonality_check, walsh_pointset, walsh_sign, OrthogonalityCheck, WalshEnsemble, MAX_M,
};
