use serde::Serialize;

use crate::dynamics::{ConsistencyReport, Distribution, InferredPotential};
use crate::io::files::TableEntry;
use crate::potential::{Decomposition, GlobalPotential, TransformWitness};

pub const REPORT_VERSION: u32 = 1;

/// Machine-readable result of one CLI command. Sections that a command does
/// not compute are omitted.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    pub input: InputSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<EquilibriaSection>,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> String {
        crate::io::to_json(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub path: String,
    pub kind: String,
    pub n: usize,
    pub actions: Vec<usize>,
    pub joint_actions: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialResult {
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

impl PotentialResult {
    pub fn from(psi: Option<&GlobalPotential>) -> Self {
        Self {
            found: psi.is_some(),
            table: psi.map(|p| p.values().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessConfig {
    pub config: Vec<usize>,
    /// `(ΔΨ, ΔM)` pairs in increasing order.
    pub pairs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessPlayer {
    pub player: usize,
    pub neighbors: Vec<usize>,
    pub configs: Vec<WitnessConfig>,
}

pub fn witness_entries(w: &TransformWitness) -> Vec<WitnessPlayer> {
    (0..w.n())
        .map(|i| WitnessPlayer {
            player: i,
            neighbors: w.neighbors(i).to_vec(),
            configs: (0..w.config_count(i))
                .map(|c| WitnessConfig {
                    config: w.config(i, c),
                    pairs: w.pairs(i, c).iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformedResult {
    pub found: bool,
    /// Which potential the transform check was run against.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tested_against: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_in_weights: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessPlayer>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrySummary {
    pub hyperedge_symmetric: bool,
    pub pairwise_symmetric: bool,
    pub polymatrix: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialSection {
    pub tolerance: f64,
    pub weights: Vec<f64>,
    pub exact: PotentialResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted: Option<PotentialResult>,
    pub ordinal: PotentialResult,
    pub transformed: TransformedResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSection {
    pub tolerance: f64,
    pub source: String,
    pub gibbs: bool,
    pub cliques: Vec<TableEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl DecompositionSection {
    pub fn ok(source: &str, d: &Decomposition, tolerance: f64) -> Self {
        Self {
            tolerance,
            source: source.into(),
            gibbs: true,
            cliques: d
                .potential
                .cliques()
                .iter()
                .map(|t| TableEntry {
                    player: None,
                    scope: t.scope().to_vec(),
                    table: t.values().to_vec(),
                })
                .collect(),
            constant: Some(d.constant),
            residual: d.residual,
            witness: None,
        }
    }

    pub fn not_gibbs(source: &str, witness: Vec<usize>, residual: f64, tolerance: f64) -> Self {
        Self {
            tolerance,
            source: source.into(),
            gibbs: false,
            cliques: Vec::new(),
            constant: None,
            residual,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriaSection {
    pub tolerance: f64,
    pub pne: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximizers: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximizers_are_pne: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub scheme: String,
    pub weights: Vec<f64>,
    pub rounds: usize,
    pub seed: u64,
    pub init: Vec<usize>,
    pub final_state: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationarySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_to_stationary: Option<f64>,
    pub tv_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_tolerance: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySummary {
    pub tolerance: f64,
    pub probabilities: Vec<f64>,
    pub residual: f64,
}

impl StationarySummary {
    pub fn new(pi: &Distribution, residual: f64, tolerance: f64) -> Self {
        Self {
            tolerance,
            probabilities: pi.probs().to_vec(),
            residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyWitnessEntry {
    pub orders: [Vec<usize>; 2],
    pub tv: f64,
    pub player: usize,
    pub joint_action: Vec<usize>,
    pub conditional_mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InferredSection {
    pub tolerance: f64,
    pub log_stationary: Vec<f64>,
    pub decomposition: DecompositionSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_potential_of_game: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencySummary {
    pub tol_tv: f64,
    pub tol_cond: f64,
    pub consistent: bool,
    pub order_policy: String,
    pub orders: Vec<Vec<usize>>,
    pub max_tv: f64,
    pub max_conditional_mismatch: f64,
    pub stationary: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ConsistencyWitnessEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inferred: Option<InferredSection>,
}

impl ConsistencySummary {
    pub fn new(r: &ConsistencyReport) -> Self {
        let o = &r.options;
        Self {
            tol_tv: o.tol_tv,
            tol_cond: o.tol_cond,
            consistent: r.consistent,
            order_policy: format!(
                "all permutations when n <= {}, else identity, reverse and {} seeded shuffles (seed {})",
                o.all_orders_up_to, o.random_orders, o.seed
            ),
            orders: r.orders.clone(),
            max_tv: r.max_tv,
            max_conditional_mismatch: r.max_conditional_mismatch,
            stationary: r.stationaries[0].probs().to_vec(),
            witness: r.witness.as_ref().map(|w| ConsistencyWitnessEntry {
                orders: [r.orders[w.orders.0].clone(), r.orders[w.orders.1].clone()],
                tv: w.tv,
                player: w.player,
                joint_action: w.joint_action.clone(),
                conditional_mismatch: w.mismatch,
            }),
            inferred: None,
        }
    }

    pub fn with_inferred(mut self, inf: &InferredPotential, tolerance: f64, w_check: Option<bool>) -> Self {
        self.inferred = Some(InferredSection {
            tolerance,
            log_stationary: inf.psi.values().to_vec(),
            decomposition: DecompositionSection::ok("log_stationary", &inf.decomposition, tolerance),
            w_potential_of_game: w_check,
        });
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencySummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub eps: f64,
    pub row_sum: f64,
    pub stationary_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_tv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_cond: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub joint_cap: usize,
    pub kernel_cap: usize,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical invocations.
    pub timestamp: u64,
}
