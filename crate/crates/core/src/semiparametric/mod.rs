//! Shared-direction ReLU network and its coupled gradient flow.
//!
//! Inputs are `x = x̃ + α`. Keeping `s_i⟨θ, α⟩ + τ_i` fixed along the flow makes
//! the direction evolve exactly as it would on centered inputs against the
//! shifted link `f(· + ⟨w*, α⟩)`.

mod flow;
mod net;

pub use flow::{
    default_width, dt_halving_gap, flow_step, init_network, network_test_mse, run_algorithm2, run_flow, Algorithm2Outcome,
    FlowConfig,
};
pub use net::{LossGradient, SharedDirectionNet};
