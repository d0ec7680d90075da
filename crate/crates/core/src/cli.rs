//! Command-line front end: `analyze`, `simulate`, `consistency`, `construct`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::dynamics::{
    consistency_check, empirical_distribution, play, potential_from_report, round_kernel, sbr_scheme,
    stationary, ConsistencyOptions, PlayingScheme, ROW_SUM_TOLERANCE, STATIONARY_RESIDUAL,
};
use crate::equilibrium::{enumerate_pne, potential_maximizers};
use crate::error::{Error, Result};
use crate::game::{validate_weights, AnyGame, Game, GraphicalGame};
use crate::io::report::{
    witness_entries, ConsistencySummary, DecompositionSection, DynamicsSection, EquilibriaSection,
    InputSummary, PotentialResult, PotentialSection, Provenance, Report, SimulationSummary,
    StationarySummary, SymmetrySummary, Tolerances, TransformedResult, REPORT_VERSION,
};
use crate::io::{format_trace, read_model, write_file, Model, ModelFile};
use crate::potential::{
    check_transformed_potential, check_w_potential, decompose, find_exact_potential,
    find_ordinal_potential, find_w_potential, symmetric_hypergraphical_from_potential,
    to_pairwise_polymatrix, GlobalPotential,
};
use crate::settings::{Settings, DEFAULT_EPS};

/// Overrides the joint-action cap.
pub const CAP_ENV: &str = "GIBBSGAME_CAP";

/// Largest TV distance between empirical play and the stationary law that
/// `simulate` reports as agreement.
pub const SIMULATION_TV_TOLERANCE: f64 = 0.02;

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const CAP: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "gibbsgame", version, about = "Analyze graphical potential games and their smooth best-response play")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Potential checks, clique decomposition and pure equilibria of a game.
    Analyze(AnalyzeArgs),
    /// Sequential smooth best-response play with a seeded generator.
    Simulate(SimulateArgs),
    /// Scan-order consistency of a scheme, or of a game's smooth best response.
    Consistency(ConsistencyArgs),
    /// Hyperedge-symmetric game whose exact potential is a given Gibbs potential.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Dead zone for comparisons of payoff and potential differences.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    tolerance: f64,
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    game: PathBuf,
    /// Positive per-player weights, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    game: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
    /// Number of rounds of play (at least 1).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rounds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial joint action, comma separated; all zeros by default.
    #[arg(long, value_delimiter = ',')]
    init: Option<Vec<usize>>,
    /// Write the play outcomes here, one joint action per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ConsistencyArgs {
    /// Game file (its smooth best-response scheme is tested) or scheme file.
    input: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
    /// Seed for the random scan orders used when n > 4.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol_tv: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol_cond: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    potential: PathBuf,
    /// Scale player i's tables by w_i, so the potential becomes a w-potential.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weights: Option<Vec<f64>>,
    /// Emit a pairwise polymatrix game; needs totally disconnected neighborhoods.
    #[arg(long)]
    pairwise: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => exit::CAP,
        Error::NotGibbs { .. }
        | Error::NotSymmetric { .. }
        | Error::Neighborhood { .. }
        | Error::MissingDifference { .. }
        | Error::NonErgodic
        | Error::InconsistentScheme { .. }
        | Error::Cycle { .. }
        | Error::MaxSteps(_) => exit::PRECONDITION,
        Error::InvalidGraph(_)
        | Error::InvalidGame(_)
        | Error::Invalid(_)
        | Error::Parse(_)
        | Error::NonPositiveWeight { .. } => exit::INVALID,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::USAGE
            } else {
                let _ = write!(out, "{text}");
                exit::OK
            };
        }
    };
    match execute(cli) {
        Ok((text, path)) => match path {
            Some(p) => match write_file(&p, &text) {
                Ok(()) => exit::OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    exit_code(&e)
                }
            },
            None => {
                let _ = write!(out, "{text}");
                exit::OK
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn settings(tolerance: f64) -> Result<Settings> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::Invalid(format!("tolerance {tolerance} must be finite and non-negative")));
    }
    let mut s = Settings::default().with_eps(tolerance);
    if let Ok(v) = std::env::var(CAP_ENV) {
        let cap = v
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Invalid(format!("{CAP_ENV}={v}: {e}")))?;
        s = s.with_joint_cap(cap);
    }
    Ok(s)
}

fn execute(cli: Cli) -> Result<(String, Option<PathBuf>)> {
    match cli.command {
        Command::Analyze(a) => {
            let s = settings(a.common.tolerance)?;
            Ok((analyze(&a.game, a.weights, &s)?.to_json(), a.common.output))
        }
        Command::Simulate(a) => {
            let s = settings(a.common.tolerance)?;
            let report = simulate(&a, &s)?;
            Ok((report.to_json(), a.common.output))
        }
        Command::Consistency(a) => {
            let s = settings(a.common.tolerance)?;
            let opts = ConsistencyOptions {
                tol_tv: a.tol_tv,
                tol_cond: a.tol_cond,
                seed: a.seed,
                ..ConsistencyOptions::default()
            };
            Ok((consistency(&a.input, a.weights, &opts, &s)?.to_json(), a.common.output))
        }
        Command::Construct(a) => {
            let s = settings(DEFAULT_EPS)?;
            Ok((construct(&a.potential, a.weights, a.pairwise, &s)?, a.output))
        }
    }
}

fn weights_for(n: usize, w: Option<Vec<f64>>) -> Result<Vec<f64>> {
    let w = w.unwrap_or_else(|| vec![1.0; n]);
    validate_weights(n, &w)?;
    Ok(w)
}

fn load_game(path: &Path, s: &Settings) -> Result<(AnyGame, GraphicalGame)> {
    match read_model(path)? {
        Model::Game(g) => {
            g.actions().checked_count(s.joint_cap)?;
            let flat = g.to_graphical(s)?;
            Ok((g, flat))
        }
        _ => Err(Error::Parse(format!("{}: expected a game file", path.display()))),
    }
}

fn summary(path: &Path, kind: &str, game_actions: &crate::actions::ActionSpace) -> InputSummary {
    InputSummary {
        path: path.display().to_string(),
        kind: kind.into(),
        n: game_actions.n(),
        actions: game_actions.sizes().to_vec(),
        joint_actions: game_actions.joint_count(),
    }
}

fn game_kind(g: &AnyGame) -> &'static str {
    match g {
        AnyGame::Graphical(_) => "graphical",
        AnyGame::Hypergraphical(_) => "hypergraphical",
    }
}

fn provenance(s: &Settings, seed: Option<u64>, opts: Option<&ConsistencyOptions>) -> Provenance {
    Provenance {
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        tolerances: Tolerances {
            eps: s.eps,
            row_sum: ROW_SUM_TOLERANCE,
            stationary_residual: STATIONARY_RESIDUAL,
            tol_tv: opts.map(|o| o.tol_tv),
            tol_cond: opts.map(|o| o.tol_cond),
        },
        joint_cap: s.joint_cap,
        kernel_cap: s.kernel_cap,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    }
}

fn decomposition_section(
    source: &str,
    psi: &GlobalPotential,
    graph: &crate::graph::Graph,
    s: &Settings,
) -> Result<DecompositionSection> {
    match decompose(psi, graph, s) {
        Ok(d) => Ok(DecompositionSection::ok(source, &d, s.eps)),
        Err(Error::NotGibbs { witness, residual }) => {
            Ok(DecompositionSection::not_gibbs(source, witness, residual, s.eps))
        }
        Err(e) => Err(e),
    }
}

pub fn analyze(path: &Path, weights: Option<Vec<f64>>, s: &Settings) -> Result<Report> {
    let (any, game) = load_game(path, s)?;
    let n = game.n();
    let w = weights_for(n, weights)?;
    let ones = vec![1.0; n];
    let weighted_requested = w != ones;

    let exact = find_exact_potential(&game, s)?;
    let weighted = if weighted_requested {
        Some(find_w_potential(&game, &w, s)?)
    } else {
        None
    };
    let ordinal = find_ordinal_potential(&game, s)?;

    let best: Option<(&str, &GlobalPotential, Option<&[f64]>)> = exact
        .as_ref()
        .map(|p| ("exact", p, Some(ones.as_slice())))
        .or_else(|| weighted.as_ref().and_then(|o| o.as_ref()).map(|p| ("weighted", p, Some(w.as_slice()))))
        .or_else(|| ordinal.as_ref().map(|p| ("ordinal", p, None)));

    let transformed = match best {
        Some((source, psi, lin)) => {
            let witness = check_transformed_potential(&game, psi, s)?;
            TransformedResult {
                found: witness.is_some(),
                tested_against: Some(source.into()),
                linear_in_weights: witness.as_ref().zip(lin).map(|(wt, lw)| wt.is_linear(lw, s.eps)),
                witness: witness.as_ref().map(witness_entries),
            }
        }
        None => TransformedResult {
            found: false,
            tested_against: None,
            linear_in_weights: None,
            witness: None,
        },
    };
    let symmetry = match &any {
        AnyGame::Hypergraphical(h) => Some(SymmetrySummary {
            hyperedge_symmetric: h.is_hyperedge_symmetric_within(s.eps),
            pairwise_symmetric: h.is_pairwise_symmetric(),
            polymatrix: h.is_polymatrix(),
        }),
        AnyGame::Graphical(_) => None,
    };
    let decomposition = best
        .map(|(source, psi, _)| decomposition_section(source, psi, game.graph(), s))
        .transpose()?;

    let pne = enumerate_pne(&game, s)?;
    let maximizers = best.map(|(_, psi, _)| potential_maximizers(psi, s));
    let maximizers_are_pne = maximizers.as_ref().map(|m| m.iter().all(|x| pne.contains(x)));

    Ok(Report {
        format_version: REPORT_VERSION,
        command: "analyze".into(),
        input: summary(path, game_kind(&any), game.actions()),
        potential: Some(PotentialSection {
            tolerance: s.eps,
            weights: w.clone(),
            exact: PotentialResult::from(exact.as_ref()),
            weighted: weighted.as_ref().map(|o| PotentialResult::from(o.as_ref())),
            ordinal: PotentialResult::from(ordinal.as_ref()),
            transformed,
            symmetry,
        }),
        decomposition,
        dynamics: None,
        equilibria: Some(EquilibriaSection {
            tolerance: s.eps,
            pne,
            maximizers,
            maximizers_are_pne,
        }),
        provenance: provenance(s, None, None),
    })
}

fn simulate(a: &SimulateArgs, s: &Settings) -> Result<Report> {
    let (any, game) = load_game(&a.game, s)?;
    let w = weights_for(game.n(), a.weights.clone())?;
    let scheme = sbr_scheme(&game, &w, s)?;
    let init = a.init.clone().unwrap_or_else(|| vec![0; game.n()]);
    game.actions()
        .validate(&init)
        .map_err(|e| match e {
            Error::Invalid(msg) => Error::Invalid(format!("--init: {msg}")),
            other => other,
        })?;
    let rounds = a.rounds as usize;
    let trace = play(&scheme, &init, rounds, a.seed)?;
    if let Some(path) = &a.trace {
        write_file(path, &format_trace(&trace))?;
    }

    let joint = game.actions().joint_count();
    let empirical = if joint <= s.joint_cap as u128 {
        Some(empirical_distribution(&trace, game.actions(), s)?)
    } else {
        None
    };
    let exact = if joint <= s.kernel_cap.min(s.joint_cap) as u128 {
        let k = round_kernel(&scheme, s)?;
        let pi = stationary(&k)?;
        let residual = k.residual(pi.probs());
        Some((pi, residual))
    } else {
        None
    };
    let tv = empirical
        .as_ref()
        .zip(exact.as_ref())
        .map(|(e, (pi, _))| e.to_distribution().tv(pi));

    Ok(Report {
        format_version: REPORT_VERSION,
        command: "simulate".into(),
        input: summary(&a.game, game_kind(&any), game.actions()),
        potential: None,
        decomposition: None,
        dynamics: Some(DynamicsSection {
            simulation: Some(SimulationSummary {
                scheme: "smooth_best_response".into(),
                weights: w,
                rounds,
                seed: a.seed,
                init,
                final_state: trace.last().to_vec(),
                empirical: empirical.map(|e| e.to_distribution().probs().to_vec()),
                stationary: exact
                    .as_ref()
                    .map(|(pi, r)| StationarySummary::new(pi, *r, STATIONARY_RESIDUAL)),
                tv_to_stationary: tv,
                tv_tolerance: SIMULATION_TV_TOLERANCE,
                within_tolerance: tv.map(|t| t <= SIMULATION_TV_TOLERANCE),
            }),
            consistency: None,
        }),
        equilibria: None,
        provenance: provenance(s, Some(a.seed), None),
    })
}

pub fn consistency(
    path: &Path,
    weights: Option<Vec<f64>>,
    opts: &ConsistencyOptions,
    s: &Settings,
) -> Result<Report> {
    let (scheme, game, kind, w): (PlayingScheme, Option<GraphicalGame>, &str, Option<Vec<f64>>) =
        match read_model(path)? {
            Model::Game(any) => {
                any.actions().checked_count(s.joint_cap)?;
                let game = any.to_graphical(s)?;
                let w = weights_for(game.n(), weights)?;
                (sbr_scheme(&game, &w, s)?, Some(game), game_kind(&any), Some(w))
            }
            Model::Scheme(p) => {
                if weights.is_some() {
                    return Err(Error::Invalid("--weights applies only to game files".into()));
                }
                (p, None, "scheme", None)
            }
            Model::Potential(_) => {
                return Err(Error::Parse(format!(
                    "{}: expected a game or scheme file",
                    path.display()
                )))
            }
        };
    let report = consistency_check(&scheme, opts, s)?;
    let mut section = ConsistencySummary::new(&report);
    if report.consistent {
        let inferred = potential_from_report(report, scheme.graph(), s)?;
        let w_check = match (&game, &w) {
            (Some(g), Some(w)) => Some(check_w_potential(g, &inferred.psi, w, s)?),
            _ => None,
        };
        section = section.with_inferred(&inferred, s.eps, w_check);
    }
    Ok(Report {
        format_version: REPORT_VERSION,
        command: "consistency".into(),
        input: summary(path, kind, scheme.actions()),
        potential: None,
        decomposition: None,
        dynamics: Some(DynamicsSection {
            simulation: None,
            consistency: Some(section),
        }),
        equilibria: None,
        provenance: provenance(s, Some(opts.seed), Some(opts)),
    })
}

pub fn construct(path: &Path, weights: Option<Vec<f64>>, pairwise: bool, s: &Settings) -> Result<String> {
    let gp = match read_model(path)? {
        Model::Potential(gp) => gp,
        _ => {
            return Err(Error::Parse(format!(
                "{}: expected a gibbs_potential file",
                path.display()
            )))
        }
    };
    gp.actions().checked_count(s.joint_cap)?;
    let game = if pairwise {
        to_pairwise_polymatrix(&gp)?
    } else {
        symmetric_hypergraphical_from_potential(&gp)?
    };
    let game = match weights {
        Some(w) => {
            validate_weights(gp.actions().n(), &w)?;
            game.scaled(&w)?
        }
        None => game,
    };
    Ok(ModelFile::from_hypergraphical(&game).to_json())
}
