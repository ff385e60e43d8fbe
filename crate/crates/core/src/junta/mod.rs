//! Two-layer ReLU networks for sparse Boolean targets: the layerwise
//! pipeline (one covariance-loss step on the first layer, bias resampling,
//! convex training of the second layer), its exact-representation
//! construction, and plain joint SGD.

mod joint;
mod layerwise;
mod net;
mod represent;

pub use joint::{joint_sgd_train, EpochError, JointConfig, JointOutcome};
pub use layerwise::{
    concentration_batch, covariance_loss, covariance_loss_gradient, default_grad_bound,
    first_layer_empirical_gradient, first_layer_population_gradient,
    first_layer_population_gradients, first_layer_step, junta_mean, population_mse_exact,
    projected_sgd, run_layerwise, second_layer_train, test_mse, default_ball_radius, Centering,
    ConvexSgdOutcome, LayerwiseConfig, LayerwiseOutcome, SecondLayerOutcome, SecondLoss,
};
pub use net::TwoLayerNet;
pub use represent::{
    min_separation, projection_values, represent_exact, ExactRepresentation, SEPARATION_TOL,
};
