use thiserror::Error;

/// Errors produced by the analysis, construction and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("joint-action space of size {required} exceeds the cap of {cap}")]
    CapExceeded { required: u128, cap: usize },

    #[error("weight for player {player} is {weight}; weights must be positive and finite")]
    NonPositiveWeight { player: usize, weight: f64 },

    #[error("potential is not a Gibbs potential for the graph: residual {residual:e} at {witness:?}")]
    NotGibbs { witness: Vec<usize>, residual: f64 },

    #[error("hypergraphical game is not hyperedge-symmetric: players {players:?} differ on hyperedge {hyperedge:?}")]
    NotSymmetric { hyperedge: Vec<usize>, players: (usize, usize) },

    #[error("graph does not have totally disconnected neighborhoods: node {node} has adjacent neighbors {pair:?}")]
    Neighborhood { node: usize, pair: (usize, usize) },

    #[error("payoff difference {difference} for player {player} is not tabulated by the transform witness")]
    MissingDifference { player: usize, difference: f64 },

    #[error("transition kernel is not ergodic")]
    NonErgodic,

    #[error("playing scheme is not consistent (max TV {max_tv:e}, max conditional mismatch {max_mismatch:e})")]
    InconsistentScheme { max_tv: f64, max_mismatch: f64 },

    #[error("best-response path revisits state {state:?} with player {player} to move")]
    Cycle { state: Vec<usize>, player: usize },

    #[error("best-response path did not terminate within {0} steps")]
    MaxSteps(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
