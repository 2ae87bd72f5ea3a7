//! Monte-Carlo base case: membership oracles over the depth regions,
//! rounding into near-isotropic position, randomized volume estimation, and
//! almost-uniform sampling.

pub mod estimate;
pub mod membership;
pub mod walk;

pub use estimate::{
    approx_uniform_sample, estimate_volume, run_base_case_approx, ApproxConfig, VolumeEstimate,
};
pub use membership::{inner_ball, InnerBall, MembershipOracle};
pub use walk::{hit_and_run_step, round_body, RoundingMap, WalkConfig};
