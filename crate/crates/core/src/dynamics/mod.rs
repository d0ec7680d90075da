//! Stochastic sequential play: playing schemes, the round chain they induce,
//! and checks that play settles on a single joint distribution.

mod consistency;
mod kernel;
mod play;
mod scheme;

pub use consistency::{
    consistency_check, infer_potential_from_play, potential_from_report, scan_orders, ConsistencyOptions, ConsistencyReport,
    ConsistencyWitness, InferredPotential,
};
pub use kernel::{
    round_kernel, round_kernel_with_order, stationary, sweep_stationary, Distribution, TransitionKernel,
    STATIONARY_RESIDUAL,
};
pub use play::{
    empirical_distribution, play, play_many, sample_round, EmpiricalDistribution, PlayTrace, StepRng,
};
pub use scheme::{sbr_scheme, sbrd_scheme, PlayingScheme, ROW_SUM_TOLERANCE};
