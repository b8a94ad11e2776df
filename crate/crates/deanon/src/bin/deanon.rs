//! Command-line front end: generate benchmark graphs, play one verbose game,
//! or run the full experiment grid to CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deanon::defender::PerturbationSpec;
use deanon::error::Error;
use deanon::graph::random_graph;
use deanon::harness::{
    graph_seed, prepare_game, run_experiment, run_seed, success_probability, write_csv,
    AttackVariant, ExperimentConfig,
};
use deanon::matching::{match_fingerprints_capped, reidentify, ReidentifyOutcome};
use deanon::retrieval::{retrieve_sybils_limited, SearchLimits};

#[derive(Parser)]
#[command(
    name = "deanon",
    version,
    about = "Simulator for robust active de-anonymisation attacks on social graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the experiment's random graphs as edge-list files.
    Gen(GenArgs),
    /// Play one game end to end and dump every stage.
    Attack(AttackArgs),
    /// Run the experiment grid and emit aggregated CSV.
    Experiment(ExperimentArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VariantChoice {
    Original,
    Robust,
    Both,
}

impl VariantChoice {
    fn variants(self) -> Vec<AttackVariant> {
        match self {
            VariantChoice::Original => vec![AttackVariant::Original],
            VariantChoice::Robust => vec![AttackVariant::Robust],
            VariantChoice::Both => AttackVariant::ALL.to_vec(),
        }
    }
}

fn parse_perturb(s: &str) -> Result<PerturbationSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    /// Vertices per graph
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated edge densities
    #[arg(long, value_delimiter = ',')]
    densities: Vec<f64>,
    /// Graphs per density
    #[arg(long)]
    graphs: Option<usize>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the edge-list files
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    /// Vertices in the generated graph
    #[arg(long)]
    n: Option<usize>,
    /// Edge density of the generated graph
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    /// Number of sybil nodes
    #[arg(long)]
    sybils: Option<usize>,
    /// Number of victims
    #[arg(long)]
    victims: Option<usize>,
    /// Retrieval tolerance for the robust variant
    #[arg(long)]
    theta: Option<usize>,
    /// Matching tolerance for the robust variant
    #[arg(long)]
    beta: Option<usize>,
    /// Release perturbation: none or flip:<rate>
    #[arg(long, default_value = "none", value_parser = parse_perturb)]
    perturb: PerturbationSpec,
    /// Attack variant(s) to play
    #[arg(long, value_enum, default_value_t = VariantChoice::Robust)]
    variant: VariantChoice,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-run wall-clock budget in seconds
    #[arg(long)]
    time_budget_secs: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Vertices per graph
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated edge densities
    #[arg(long, value_delimiter = ',')]
    densities: Vec<f64>,
    /// Graphs per density
    #[arg(long)]
    graphs: Option<usize>,
    /// Number of sybil nodes
    #[arg(long)]
    sybils: Option<usize>,
    /// Number of victims
    #[arg(long)]
    victims: Option<usize>,
    /// Retrieval tolerance for the robust variant
    #[arg(long)]
    theta: Option<usize>,
    /// Matching tolerance for the robust variant
    #[arg(long)]
    beta: Option<usize>,
    /// Release perturbation: none or flip:<rate>
    #[arg(long, default_value = "none", value_parser = parse_perturb)]
    perturb: PerturbationSpec,
    /// Attack variant(s) to play on each instance
    #[arg(long, value_enum, default_value_t = VariantChoice::Both)]
    variant: VariantChoice,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Full evaluation scale: n=200, 10000 graphs per density,
    /// densities 0.05..1.0 (slow!)
    #[arg(long)]
    full_scale: bool,
    /// Per-run wall-clock budget in seconds
    #[arg(long)]
    time_budget_secs: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) | Error::Infeasible(_) | Error::Parse { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}

/// Shared knob plumbing: overlay CLI options on the defaults.
#[allow(clippy::too_many_arguments)]
fn build_config(
    n: Option<usize>,
    densities: &[f64],
    graphs: Option<usize>,
    sybils: Option<usize>,
    victims: Option<usize>,
    theta: Option<usize>,
    beta: Option<usize>,
    perturb: PerturbationSpec,
    variants: Vec<AttackVariant>,
    seed: u64,
    time_budget_secs: Option<u64>,
) -> ExperimentConfig {
    let mut config = ExperimentConfig::default();
    if let Some(n) = n {
        config.n = n;
    }
    if !densities.is_empty() {
        config.densities = densities.to_vec();
    }
    if let Some(g) = graphs {
        config.graphs_per_density = g;
    }
    if let Some(s) = sybils {
        config.num_sybils = s;
    }
    if let Some(v) = victims {
        config.num_victims = v;
    }
    if let Some(t) = theta {
        config.theta = t;
    }
    if let Some(b) = beta {
        config.beta = b;
    }
    if let Some(secs) = time_budget_secs {
        config.time_budget = Duration::from_secs(secs);
    }
    config.perturbation = perturb;
    config.variants = variants;
    config.seed = seed;
    config
}

fn cmd_gen(args: GenArgs) -> deanon::Result<()> {
    let config = build_config(
        args.n,
        &args.densities,
        args.graphs,
        None,
        None,
        None,
        None,
        PerturbationSpec::None,
        AttackVariant::ALL.to_vec(),
        args.seed,
        None,
    );
    config.validate()?;
    std::fs::create_dir_all(&args.out)?;
    let mut densities = config.densities.clone();
    densities.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (d_idx, &density) in densities.iter().enumerate() {
        for g_idx in 0..config.graphs_per_density {
            let g = random_graph(
                config.n,
                density,
                graph_seed(run_seed(config.seed, d_idx, g_idx)),
            )?;
            let path = args.out.join(format!("graph-{density}-{g_idx}.edges"));
            let mut file = BufWriter::new(File::create(&path)?);
            g.write_edge_list(&mut file)?;
            file.flush()?;
            writeln!(out, "{}", path.display())?;
        }
    }
    Ok(())
}

fn cmd_attack(args: AttackArgs) -> deanon::Result<()> {
    let config = build_config(
        args.n,
        &[args.density],
        Some(1),
        args.sybils,
        args.victims,
        args.theta,
        args.beta,
        args.perturb,
        args.variant.variants(),
        args.seed,
        args.time_budget_secs,
    );
    config.validate()?;

    let seed = run_seed(config.seed, 0, 0);
    let graph = random_graph(config.n, args.density, graph_seed(seed))?;
    let game = prepare_game(&graph, &config, seed)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();

    writeln!(
        out,
        "graph: n={} m={} density={}",
        graph.num_vertices(),
        graph.num_edges(),
        args.density
    )?;
    writeln!(
        out,
        "sybils ({}): {:?}",
        game.attack.num_sybils(),
        game.attack.sybil_order
    )?;
    writeln!(
        out,
        "fingerprint pool separation: delta={}",
        game.attack.min_separation
    )?;
    for (i, &y) in game.attack.victims.iter().enumerate() {
        let positions: Vec<String> = game
            .attack
            .sybil_order
            .iter()
            .enumerate()
            .filter(|(_, x)| game.attack.fingerprints[i].contains(x))
            .map(|(j, _)| (j + 1).to_string())
            .collect();
        writeln!(out, "victim y={y} fingerprint positions {{{}}}", positions.join(","))?;
    }
    writeln!(
        out,
        "release: perturbation={} n={} m={}",
        config.perturbation,
        game.defender.released.num_vertices(),
        game.defender.released.num_edges()
    )?;

    for &variant in &config.variants {
        let (theta, beta) = config.tolerances(variant);
        writeln!(out, "--- variant={variant} theta={theta} beta={beta} ---")?;
        let retrieval = retrieve_sybils_limited(
            &game.g_plus,
            &game.attack.sybil_order,
            &game.defender.released,
            theta,
            SearchLimits {
                frontier_cap: config.frontier_cap,
                deadline: Some(
                    std::time::Instant::now() + config.time_budget,
                ),
            },
        )?;
        if retrieval.timed_out {
            writeln!(out, "retrieval timed out")?;
            continue;
        }
        let candidates = retrieval.candidates;
        writeln!(out, "candidates: {}", candidates.len())?;
        candidates.dump(&mut out)?;
        let mut per_candidate = Vec::with_capacity(candidates.len());
        for (i, cand) in candidates.candidates.iter().enumerate() {
            let reident = match_fingerprints_capped(
                &game.attack,
                &game.defender.released,
                &cand.vertices,
                beta,
                config.partial_cap,
            )?;
            writeln!(
                out,
                "candidate {}: {} matching(s)",
                i + 1,
                reident.matchings.len()
            )?;
            reident.dump(&mut out)?;
            per_candidate.push(reident);
        }
        let pr = success_probability(&candidates, &per_candidate, &game.defender, &game.attack)?;
        writeln!(out, "success probability: {pr}")?;
        match reidentify(
            &game.attack,
            &game.defender.released,
            &candidates,
            beta,
            config.seed,
        )? {
            ReidentifyOutcome::Failure => writeln!(out, "final pick: attack failed")?,
            ReidentifyOutcome::Identified { candidate, result } => {
                let ids: Vec<String> =
                    candidate.vertices.iter().map(usize::to_string).collect();
                writeln!(
                    out,
                    "final pick: v={} with {} matching(s)",
                    ids.join(","),
                    result.matchings.len()
                )?;
            }
        }
        let truth: Vec<String> = game
            .attack
            .victims
            .iter()
            .map(|&y| {
                Ok(format!(
                    "y={y} -> z={}",
                    game.defender.ground_truth.apply(y)?
                ))
            })
            .collect::<deanon::Result<_>>()?;
        writeln!(out, "ground truth: {}", truth.join("  "))?;
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> deanon::Result<()> {
    let mut config = build_config(
        args.n,
        &args.densities,
        args.graphs,
        args.sybils,
        args.victims,
        args.theta,
        args.beta,
        args.perturb,
        args.variant.variants(),
        args.seed,
        args.time_budget_secs,
    );
    if args.full_scale {
        config.n = args.n.unwrap_or(200);
        config.graphs_per_density = args.graphs.unwrap_or(10_000);
        if args.densities.is_empty() {
            config.densities = (1..=20).map(|i| i as f64 / 20.0).collect();
        }
        eprintln!(
            "warning: full-scale run ({} graphs per density at n={}, {} densities); \
             dense graphs are the retrieval worst case, expect hours",
            config.graphs_per_density,
            config.n,
            config.densities.len()
        );
    }
    config.validate()?;

    let rows = run_experiment(&config)?;
    match args.out {
        Some(path) => {
            let file = BufWriter::new(File::create(&path)?);
            write_csv(&rows, file)?;
        }
        None => {
            let stdout = io::stdout();
            write_csv(&rows, stdout.lock())?;
        }
    }
    Ok(())
}
