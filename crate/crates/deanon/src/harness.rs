//! Experiment orchestration: run the attacker–defender game over seeded
//! graph collections, score runs, and aggregate per-cell CSV rows.
//!
//! A single game composes the three stages: plant the sybil subgraph and
//! fingerprints into a generated graph, let the defender pseudonymise and
//! perturb, then retrieve the sybil vector and match fingerprints for every
//! retrieved candidate. The run is scored with the expected probability that
//! the attacker, picking uniformly among candidates and then among that
//! candidate's equally-likely matchings, names the exact victim mapping.
//!
//! Experiments are paired: for each (density, graph index) the original and
//! robust variants replay the exact same graph, sybils, fingerprints and
//! release, differing only in the attack's tolerance thresholds (the
//! original attack is the degenerate θ=β=0 case). Runs are data-parallel;
//! aggregation folds results in (density, graph index, variant) order, so
//! output never depends on scheduling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::attack::{build_sybil_subgraph, generate_fingerprint_pool, plant_fingerprints, AttackState};
use crate::defender::{run_defender, DefenderOutput, PerturbationSpec};
use crate::error::{Error, Result};
use crate::graph::{random_graph, rng_from_seed, Graph, VertexSet};
use crate::matching::{match_fingerprints_capped, ReIdentification, DEFAULT_PARTIAL_CAP};
use crate::retrieval::{retrieve_sybils_limited, CandidateSet, SearchLimits};
use crate::sub_seed;

/// Which attack the run plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackVariant {
    /// The walk-based attack: no tolerance, exact subgraph and fingerprint
    /// matches only (θ = β = 0 regardless of configuration).
    Original,
    /// The noise-tolerant attack with the configured θ and β.
    Robust,
}

impl AttackVariant {
    pub const ALL: [AttackVariant; 2] = [AttackVariant::Original, AttackVariant::Robust];
}

impl fmt::Display for AttackVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackVariant::Original => write!(f, "original"),
            AttackVariant::Robust => write!(f, "robust"),
        }
    }
}

impl FromStr for AttackVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(AttackVariant::Original),
            "robust" => Ok(AttackVariant::Robust),
            other => Err(Error::InvalidInput(format!(
                "unknown attack variant '{other}' (expected original|robust)"
            ))),
        }
    }
}

/// Full experiment parameterisation.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Order of each generated graph (before sybils are added).
    pub n: usize,
    pub densities: Vec<f64>,
    pub graphs_per_density: usize,
    pub num_sybils: usize,
    pub num_victims: usize,
    /// Retrieval tolerance for the robust variant.
    pub theta: usize,
    /// Matching tolerance for the robust variant.
    pub beta: usize,
    pub perturbation: PerturbationSpec,
    /// Variants to play on each instance, in reporting order.
    pub variants: Vec<AttackVariant>,
    pub seed: u64,
    /// Wall-clock budget per run; a breach scores the run 0 and flags it.
    pub time_budget: Duration,
    /// Optional cap on retrieval's per-level surviving candidates.
    pub frontier_cap: Option<usize>,
    /// Cap on simultaneously tracked matching assignments.
    pub partial_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 100,
            densities: (1..=10).map(|i| i as f64 / 20.0).collect(),
            graphs_per_density: 100,
            num_sybils: 8,
            num_victims: 4,
            theta: 8,
            beta: 8,
            perturbation: PerturbationSpec::None,
            variants: AttackVariant::ALL.to_vec(),
            seed: 0,
            time_budget: Duration::from_secs(60),
            frontier_cap: None,
            partial_cap: DEFAULT_PARTIAL_CAP,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("graph order must be positive".into()));
        }
        if self.n <= self.num_sybils + self.num_victims {
            return Err(Error::InvalidInput(format!(
                "graph order {} must exceed sybils {} + victims {}",
                self.n, self.num_sybils, self.num_victims
            )));
        }
        if self.densities.is_empty() {
            return Err(Error::InvalidInput("no densities given".into()));
        }
        for &d in &self.densities {
            if !(0.0..=1.0).contains(&d) || !d.is_finite() {
                return Err(Error::InvalidInput(format!("density {d} outside [0, 1]")));
            }
        }
        if self.graphs_per_density == 0 {
            return Err(Error::InvalidInput("graphs per density must be positive".into()));
        }
        if self.num_sybils == 0 {
            return Err(Error::InvalidInput("need at least one sybil".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidInput("no attack variant selected".into()));
        }
        if self.partial_cap == 0 {
            return Err(Error::InvalidInput("partial cap must be positive".into()));
        }
        self.perturbation.validate()
    }

    /// The tolerances a variant actually plays with.
    pub fn tolerances(&self, variant: AttackVariant) -> (usize, usize) {
        match variant {
            AttackVariant::Original => (0, 0),
            AttackVariant::Robust => (self.theta, self.beta),
        }
    }
}

/// Outcome of one game.
#[derive(Clone, Debug, Default)]
pub struct RunResult {
    /// Success probability of the run (0 when the attack failed, timed out,
    /// or was skipped).
    pub pr: f64,
    /// Retrieved candidate-vector count.
    pub candidate_count: usize,
    /// Total matchings across all candidates.
    pub matching_count: usize,
    /// A search or matching cap trimmed this run.
    pub truncated: bool,
    /// No candidate produced any matching.
    pub failed: bool,
    /// The wall-clock budget expired mid-run.
    pub timed_out: bool,
    /// Configuration made the run impossible (infeasible fingerprint pool).
    pub skipped: bool,
    /// Zero victims: success is vacuous.
    pub vacuous: bool,
}

/// The expected probability, over the uniform choice of a candidate vector
/// and then of one of its equally-likely matchings, that the attacker names
/// the exact victim mapping.
pub fn success_probability(
    candidates: &CandidateSet,
    per_candidate: &[ReIdentification],
    ground_truth: &DefenderOutput,
    attack: &AttackState,
) -> Result<f64> {
    if candidates.len() != per_candidate.len() {
        return Err(Error::InvalidInput(format!(
            "{} candidates but {} matching results",
            candidates.len(),
            per_candidate.len()
        )));
    }
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let correct: std::collections::BTreeMap<usize, usize> = attack
        .victims
        .iter()
        .map(|&y| Ok((y, ground_truth.ground_truth.apply(y)?)))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for reident in per_candidate {
        if reident.matchings.iter().any(|m| *m == correct) {
            sum += 1.0 / reident.matchings.len() as f64;
        }
    }
    Ok(sum / candidates.len() as f64)
}

/// Everything stage 1 and stage 2 produce for one instance.
pub struct PreparedGame {
    /// The sybil-extended graph the attacker knows.
    pub g_plus: Graph,
    pub attack: AttackState,
    pub defender: DefenderOutput,
}

/// Seed tags for the per-run random draws.
mod stage {
    pub const VICTIMS: u64 = 1;
    pub const SYBILS: u64 = 2;
    pub const PLANT: u64 = 3;
    pub const DEFENDER: u64 = 4;
}

/// The per-run seed for cell (density index, graph index) of an experiment.
pub fn run_seed(master: u64, density_idx: usize, graph_idx: usize) -> u64 {
    sub_seed(master, ((density_idx as u64) << 40) | ((graph_idx as u64) << 8))
}

/// The graph-generation seed belonging to a run seed; `gen` and `attack`
/// reproduce an experiment's exact instances through this.
pub fn graph_seed(run_seed: u64) -> u64 {
    sub_seed(run_seed, 0)
}

/// Build stages 1–2 on an existing graph: sample victims, inject sybils,
/// plant fingerprints, pseudonymise and perturb. Variant-independent:
/// pairing two variants on the same seed replays the identical instance.
/// An infeasible fingerprint pool is a configuration error here.
pub fn prepare_game(graph: &Graph, config: &ExperimentConfig, seed: u64) -> Result<PreparedGame> {
    config.validate()?;
    if graph.num_vertices() <= config.num_sybils + config.num_victims {
        return Err(Error::InvalidInput(format!(
            "graph with {} vertices cannot host {} sybils + {} victims",
            graph.num_vertices(),
            config.num_sybils,
            config.num_victims
        )));
    }
    let pool = experiment_pool(config)?;
    build_instance(graph, config, &pool, seed)
}

fn build_instance(
    graph: &Graph,
    config: &ExperimentConfig,
    pool: &[VertexSet],
    seed: u64,
) -> Result<PreparedGame> {
    let mut rng = rng_from_seed(sub_seed(seed, stage::VICTIMS));
    let victims: Vec<usize> = {
        let mut picks =
            rand::seq::index::sample(&mut rng, graph.num_vertices(), config.num_victims)
                .into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|i| graph.vertices()[i]).collect()
    };
    let (extended, sybil_order) =
        build_sybil_subgraph(graph, config.num_sybils, sub_seed(seed, stage::SYBILS))?;
    let (g_plus, attack) = plant_fingerprints(
        &extended,
        &sybil_order,
        &victims,
        pool,
        sub_seed(seed, stage::PLANT),
    )?;
    let defender = run_defender(&g_plus, config.perturbation, sub_seed(seed, stage::DEFENDER))?;
    Ok(PreparedGame {
        g_plus,
        attack,
        defender,
    })
}

fn score_variant(
    instance: &PreparedGame,
    config: &ExperimentConfig,
    variant: AttackVariant,
    deadline: Instant,
) -> Result<RunResult> {
    let (theta, beta) = config.tolerances(variant);
    let retrieval = retrieve_sybils_limited(
        &instance.g_plus,
        &instance.attack.sybil_order,
        &instance.defender.released,
        theta,
        SearchLimits {
            frontier_cap: config.frontier_cap,
            deadline: Some(deadline),
        },
    )?;
    let mut result = RunResult {
        truncated: retrieval.truncated,
        timed_out: retrieval.timed_out,
        vacuous: config.num_victims == 0,
        ..RunResult::default()
    };
    if result.timed_out {
        result.failed = true;
        return Ok(result);
    }
    let candidates = retrieval.candidates;
    result.candidate_count = candidates.len();

    let mut per_candidate = Vec::with_capacity(candidates.len());
    for cand in &candidates.candidates {
        if Instant::now() > deadline {
            result.timed_out = true;
            result.failed = true;
            result.pr = 0.0;
            return Ok(result);
        }
        let reident = match_fingerprints_capped(
            &instance.attack,
            &instance.defender.released,
            &cand.vertices,
            beta,
            config.partial_cap,
        )?;
        result.truncated |= reident.truncated;
        result.matching_count += reident.matchings.len();
        per_candidate.push(reident);
    }
    result.failed = per_candidate.iter().all(|r| r.is_failure());
    result.pr = success_probability(&candidates, &per_candidate, &instance.defender, &instance.attack)?;
    Ok(result)
}

/// Play one full game on `graph` with the given variant. The seed covers
/// victim choice, sybil construction, fingerprint assignment and the
/// defender; an infeasible fingerprint pool skips the run with a flag.
pub fn run_single_game(
    graph: &Graph,
    config: &ExperimentConfig,
    variant: AttackVariant,
    seed: u64,
) -> Result<RunResult> {
    config.validate()?;
    if graph.num_vertices() <= config.num_sybils + config.num_victims {
        return Err(Error::InvalidInput(format!(
            "graph with {} vertices cannot host {} sybils + {} victims",
            graph.num_vertices(),
            config.num_sybils,
            config.num_victims
        )));
    }
    let pool = match experiment_pool(config) {
        Ok(pool) => pool,
        Err(Error::Infeasible(_)) => {
            return Ok(RunResult {
                skipped: true,
                failed: true,
                ..RunResult::default()
            })
        }
        Err(e) => return Err(e),
    };
    let instance = build_instance(graph, config, &pool, seed)?;
    score_variant(&instance, config, variant, Instant::now() + config.time_budget)
}

/// The fingerprint pool a configuration implies (empty for zero victims).
fn experiment_pool(config: &ExperimentConfig) -> Result<Vec<VertexSet>> {
    if config.num_victims == 0 {
        return Ok(Vec::new());
    }
    Ok(generate_fingerprint_pool(config.num_sybils, config.num_victims)?.0)
}

/// One aggregated CSV row: a (density, variant) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub density: f64,
    pub variant: AttackVariant,
    pub perturbation: PerturbationSpec,
    pub mean_success: f64,
    pub std_success: f64,
    /// Scored runs (excludes skipped ones).
    pub runs: usize,
    /// Runs where no candidate yielded a matching.
    pub failed: usize,
    /// Runs aborted by the wall-clock budget (scored 0, counted here).
    pub timed_out: usize,
}

/// Run the full experiment grid. For every density, `graphs_per_density`
/// seeded graphs are generated; each graph hosts one planted attack and one
/// release, which every selected variant then plays (paired design). Rows
/// come out sorted by density, variants in configuration order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    let pool = match experiment_pool(config) {
        Ok(pool) => Some(pool),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };

    let mut densities = config.densities.clone();
    densities.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let cells: Vec<(usize, f64)> = densities.iter().copied().enumerate().collect();
    let results: Vec<Result<Vec<Vec<RunResult>>>> = cells
        .par_iter()
        .map(|&(d_idx, density)| {
            (0..config.graphs_per_density)
                .into_par_iter()
                .map(|g_idx| {
                    let seed = run_seed(config.seed, d_idx, g_idx);
                    let Some(pool) = pool.as_ref() else {
                        return Ok(vec![
                            RunResult {
                                skipped: true,
                                failed: true,
                                ..RunResult::default()
                            };
                            config.variants.len()
                        ]);
                    };
                    let graph = random_graph(config.n, density, graph_seed(seed))?;
                    let instance = build_instance(&graph, config, pool, seed)?;
                    let deadline = Instant::now() + config.time_budget;
                    config
                        .variants
                        .iter()
                        .map(|&v| score_variant(&instance, config, v, deadline))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(densities.len() * config.variants.len());
    for (d_idx, density) in cells {
        let per_graph = results[d_idx].as_ref().map_err(clone_err)?;
        for (v_idx, &variant) in config.variants.iter().enumerate() {
            let scores: Vec<&RunResult> = per_graph.iter().map(|runs| &runs[v_idx]).collect();
            let counted: Vec<&&RunResult> = scores.iter().filter(|r| !r.skipped).collect();
            let runs = counted.len();
            let mean = if runs == 0 {
                0.0
            } else {
                counted.iter().map(|r| r.pr).sum::<f64>() / runs as f64
            };
            let std = if runs == 0 {
                0.0
            } else {
                (counted.iter().map(|r| (r.pr - mean).powi(2)).sum::<f64>() / runs as f64).sqrt()
            };
            rows.push(ExperimentRow {
                density,
                variant,
                perturbation: config.perturbation,
                mean_success: mean,
                std_success: std,
                runs,
                failed: counted.iter().filter(|r| r.failed).count(),
                timed_out: counted.iter().filter(|r| r.timed_out).count(),
            });
        }
    }
    Ok(rows)
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidInput(e.to_string())
}

/// Serialise rows with the fixed schema
/// `density,variant,perturbation,mean_success,std_success,runs,failed,timed_out`.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "density",
        "variant",
        "perturbation",
        "mean_success",
        "std_success",
        "runs",
        "failed",
        "timed_out",
    ])
    .map_err(csv_err)?;
    for r in rows {
        out.write_record([
            format!("{}", r.density),
            r.variant.to_string(),
            r.perturbation.to_string(),
            format!("{:.6}", r.mean_success),
            format!("{:.6}", r.std_success),
            r.runs.to_string(),
            r.failed.to_string(),
            r.timed_out.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv write failed: {e}"))
}
