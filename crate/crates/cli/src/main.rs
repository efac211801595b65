use std::collections::hash_map::RandomState;
use std::collections::BTreeMap;
use std::fs::File;
use std::hash::BuildHasher;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eq_scm::builtin;
use eq_scm::dsl::{self, ModelSource, ParseDiagnostic};
use eq_scm::equilibrium::{derive_equilibrium, mean_trajectory};
use eq_scm::eval::{
    eval_deterministic, eval_misspecification, eval_stochastic, stats, MisspecConfig, Query, RatesPrimeRule,
};
use eq_scm::io::{self as out, Metadata};
use eq_scm::rng::derive_seed;
use eq_scm::scm::{build_scm, NoiseTransform};
use eq_scm::ssa::{Record, SimConfig, Simulator, DEFAULT_T_END};
use eq_scm::{Error, RateAssignment, ReactionNetwork, SpeciesId};

const SSA_SEED_STREAM: u64 = 0x4355_5353;
const SCM_SEED_STREAM: u64 = 0x4355_4353;

#[derive(Parser)]
#[command(name = "eq-scm", version, about = "Reaction-network simulation, equilibria and counterfactual queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model; diagnostics go to stderr.
    Validate(ValidateArgs),
    /// Gillespie simulation: one full trajectory, or end states over many seeds.
    Simulate(SimulateArgs),
    /// Closed-form equilibrium table `species,theta,mean`, or the mean ODE trajectory.
    Equilibrium(EquilibriumArgs),
    /// Counterfactual draws of one species given a full observation and an intervention.
    Counterfactual(CounterfactualArgs),
    /// Deterministic evaluation: mean-chain truth against SCM counterfactuals.
    EvalDet(EvalDetArgs),
    /// Stochastic evaluation: coupled SSA pairs against SCM counterfactuals.
    EvalStoch(EvalStochArgs),
    /// Misspecification study: SCM counterfactuals against direct simulation.
    EvalMisspec(EvalMisspecArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// `builtin:<mapk-exp1|mapk-exp2|mapk-exp3|igf|toy>` or a path to a model file.
    #[arg(long, short)]
    model: String,
    /// Multiply a rate before anything else runs, e.g. `act:K3:E1=1/3`. Repeatable.
    #[arg(long = "scale", value_name = "KEY=FACTOR")]
    scale: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Base seed; a fresh one is generated and recorded when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Model path or builtin name.
    path: Option<String>,
    /// Same as the positional argument.
    #[arg(long, short, conflicts_with = "path")]
    model: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Simulated time horizon.
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
    /// Number of runs; more than one writes end states only (`seed,<species>`).
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Record on a fixed grid instead of every event (single run only).
    #[arg(long, value_name = "DT")]
    grid: Option<f64>,
}

#[derive(Args)]
struct EquilibriumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Write the RK4 mean trajectory instead of the table.
    #[arg(long)]
    trajectory: bool,
    /// RK4 step for --trajectory.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Simulated time horizon.
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
    /// Output file (default: stdout).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Gaussian,
    Binomial,
    Poisson,
}

impl From<TransformArg> for NoiseTransform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Gaussian => NoiseTransform::GaussianReparam,
            TransformArg::Binomial => NoiseTransform::BinomialInverseCdf,
            TransformArg::Poisson => NoiseTransform::PoissonInverseCdf,
        }
    }
}

#[derive(Args)]
struct CounterfactualArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Observed value of every species, e.g. `K3=50,K2=71,K=88`.
    #[arg(long)]
    observe: String,
    /// Hard intervention `SPECIES=VALUE`.
    #[arg(long = "do", value_name = "SPECIES=VALUE")]
    intervention: String,
    /// Species whose counterfactual value is drawn.
    #[arg(long)]
    query: String,
    /// Number of counterfactual draws.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Noise transform of the structural causal model.
    #[arg(long, value_enum, default_value = "gaussian")]
    transform: TransformArg,
    /// Also write the abducted noise posterior as JSON.
    #[arg(long, value_name = "PATH")]
    posterior: Option<PathBuf>,
}

#[derive(Args)]
struct PrimeArgs {
    /// Species receiving the intervention.
    #[arg(long)]
    intervene: String,
    /// Species whose effect is measured.
    #[arg(long)]
    query: String,
    /// Counterfactual rates: scale one reaction, e.g. `act:K3:E1=1/3`.
    #[arg(long, value_name = "KEY=FACTOR", conflicts_with = "soft")]
    prime_scale: Option<String>,
    /// Counterfactual rates: soft intervention `SPECIES=MEAN`, solved on `--knob`.
    #[arg(long, value_name = "SPECIES=MEAN", requires = "knob")]
    soft: Option<String>,
    /// Activation reaction adjusted by `--soft`.
    #[arg(long, value_name = "KEY")]
    knob: Option<String>,
    /// Noise transform of the structural causal model.
    #[arg(long, value_enum, default_value = "gaussian")]
    transform: TransformArg,
}

#[derive(Args)]
struct EvalDetArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    /// Number of SCM counterfactual draws.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args)]
struct EvalStochArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    /// Number of coupled SSA pairs.
    #[arg(long, default_value_t = 500)]
    seeds: usize,
    /// Simulated time horizon.
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
}

#[derive(Args)]
struct EvalMisspecArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    /// Reaction receiving the additive Uniform(lo, hi) perturbation.
    #[arg(long, value_name = "KEY")]
    perturb: String,
    /// Lower end of the perturbation.
    #[arg(long)]
    lo: f64,
    /// Upper end of the perturbation.
    #[arg(long)]
    hi: f64,
    /// Repetitions, each with a fresh perturbation and observation.
    #[arg(long, default_value_t = 50)]
    reps: usize,
    /// Coupled SSA pairs for the true effects per repetition.
    #[arg(long, default_value_t = 500)]
    seeds_per_rep: usize,
    /// Direct-simulation runs per repetition (default: --seeds-per-rep).
    #[arg(long)]
    sim_seeds: Option<usize>,
    /// Simulated time horizon.
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
}

enum Failure {
    Diagnostics(Vec<String>),
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateTheta { .. }
            | Error::BoundaryTheta { .. }
            | Error::Infeasible(_)
            | Error::ZeroMassObservation { .. }
            | Error::StepTooLarge { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (code, messages) = outcome(run(cli.command));
    for m in messages {
        eprintln!("{m}");
    }
    ExitCode::from(code)
}

/// Exit code and stderr lines.
fn outcome(result: CliResult<()>) -> (u8, Vec<String>) {
    match result {
        Ok(()) => (0, Vec::new()),
        Err(Failure::Diagnostics(lines)) => (1, lines),
        Err(Failure::Usage(msg)) => (1, vec![format!("error: {msg}")]),
        Err(Failure::Runtime(msg)) => (2, vec![format!("error: {msg}")]),
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Validate(a) => validate(a),
        Command::Simulate(a) => simulate(a),
        Command::Equilibrium(a) => equilibrium(a),
        Command::Counterfactual(a) => counterfactual(a),
        Command::EvalDet(a) => eval_det(a),
        Command::EvalStoch(a) => eval_stoch(a),
        Command::EvalMisspec(a) => eval_misspec(a),
    }
}

fn model_source(spec: &str) -> CliResult<ModelSource> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin::source(name).ok_or_else(|| {
            Failure::Usage(format!("unknown builtin `{name}` (expected one of {})", builtin::NAMES.join(", ")))
        });
    }
    let bytes = std::fs::read(spec).map_err(|e| Failure::Usage(format!("cannot read `{spec}`: {e}")))?;
    ModelSource::from_bytes(&bytes, spec).map_err(|d| Failure::Diagnostics(vec![d.render(spec)]))
}

fn render_all(diags: &[ParseDiagnostic], origin: &str) -> Vec<String> {
    diags.iter().map(|d| d.render(origin)).collect()
}

fn load_model(args: &ModelArgs) -> CliResult<ReactionNetwork> {
    let source = model_source(&args.model)?;
    let mut network = dsl::load(&source).map_err(|d| Failure::Diagnostics(render_all(&d, &source.origin)))?;
    for s in &args.scale {
        let (key, factor) = parse_scale(s)?;
        let id = network.find_reaction(key)?;
        let rates = network.rates().scaled(id, factor);
        network = network.with_rates(&rates)?;
    }
    Ok(network)
}

fn parse_number(s: &str) -> CliResult<f64> {
    let bad = || Failure::Usage(format!("`{s}` is not a number"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            n / d
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_scale(s: &str) -> CliResult<(&str, f64)> {
    let (key, factor) = s
        .rsplit_once('=')
        .ok_or_else(|| Failure::Usage(format!("expected KEY=FACTOR, got `{s}`")))?;
    let factor = parse_number(factor)?;
    if factor <= 0.0 {
        return Err(Failure::Usage(format!("scale factor must be positive, got {factor}")));
    }
    Ok((key.trim(), factor))
}

/// `name=value` comma list.
fn parse_assignments(s: &str) -> CliResult<Vec<(String, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected name=value, got `{p}`")))?;
            Ok((k.trim().to_owned(), parse_number(v)?))
        })
        .collect()
}

fn single_assignment(s: &str) -> CliResult<(String, f64)> {
    let mut list = parse_assignments(s)?;
    if list.len() != 1 {
        return Err(Failure::Usage(format!("expected exactly one name=value, got `{s}`")));
    }
    Ok(list.remove(0))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| RandomState::new().hash_one(std::time::SystemTime::now()))
}

fn configure_jobs(jobs: Option<usize>) -> CliResult<()> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn validate(args: ValidateArgs) -> CliResult<()> {
    let spec = args
        .path
        .or(args.model)
        .ok_or_else(|| Failure::Usage("validate needs a model path or --model".into()))?;
    let source = model_source(&spec)?;
    let (_, warnings) = dsl::parse_with_warnings(&source);
    let network = dsl::load(&source).map_err(|d| Failure::Diagnostics(render_all(&d, &source.origin)))?;
    for w in &warnings {
        eprintln!("{}", w.render(&source.origin));
    }
    println!(
        "{}: ok ({} species, {} inputs, {} reactions)",
        network.name,
        network.species.len(),
        network.inputs.len(),
        network.reactions.len()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    configure_jobs(args.run.jobs)?;
    let network = load_model(&args.model)?;
    let seed = resolve_seed(args.run.seed);
    let meta = Metadata::new(&network)
        .with("seed", seed)
        .with("t_end", args.t_end)
        .with("runs", args.runs);
    let sim = Simulator::new(&network)?;
    let mut w = open_out(&args.run.out)?;
    if args.runs == 1 {
        let record = args.grid.map_or(Record::FullPath, Record::GridSampled);
        let traj = sim.run(&SimConfig { t_end: args.t_end, record, seed })?;
        let meta = match args.grid {
            Some(dt) => meta.with("grid", dt),
            None => meta,
        };
        out::write_trajectory(&mut w, &meta, &traj)?;
    } else {
        if args.grid.is_some() {
            return Err(Failure::Usage("--grid applies to a single run".into()));
        }
        SimConfig::end_state(args.t_end, seed).check()?;
        let seeds: Vec<u64> = (0..args.runs as u64).map(|k| derive_seed(seed, SSA_SEED_STREAM, k)).collect();
        let states = sim.end_states(args.t_end, &seeds);
        let meta = meta.with("run_seeds", format!("derive_seed({seed}, ssa, 0..{})", args.runs));
        out::write_end_states(&mut w, &meta, sim.species(), &seeds, &states)?;
    }
    w.flush()?;
    Ok(())
}

fn equilibrium(args: EquilibriumArgs) -> CliResult<()> {
    let network = load_model(&args.model)?;
    let mut w = open_out(&args.out)?;
    if args.trajectory {
        let traj = mean_trajectory(&network, args.t_end, args.dt)?;
        let meta = Metadata::new(&network).with("dt", args.dt).with("t_end", args.t_end);
        out::write_trajectory(&mut w, &meta, &traj)?;
    } else {
        let (means, thetas) = derive_equilibrium(&network)?.mean_chain()?;
        let species: Vec<SpeciesId> = network.species_ids().cloned().collect();
        out::write_equilibrium_table(&mut w, &species, &thetas, &means)?;
    }
    w.flush()?;
    Ok(())
}

fn counterfactual(args: CounterfactualArgs) -> CliResult<()> {
    configure_jobs(args.run.jobs)?;
    let network = load_model(&args.model)?;
    let seed = resolve_seed(args.run.seed);
    let transform = NoiseTransform::from(args.transform);
    let observation: BTreeMap<SpeciesId, f64> = parse_assignments(&args.observe)?
        .into_iter()
        .map(|(k, v)| (SpeciesId::new(k), v))
        .collect();
    let (target, value) = single_assignment(&args.intervention)?;
    let model = derive_equilibrium(&network)?;
    let scm = build_scm(&model, transform)?;
    let draws = scm.counterfactual(&observation, (&target, value), &args.query, args.samples, seed)?;
    if let Some(path) = &args.posterior {
        let posterior = scm.abduct(&observation)?;
        let mut doc = posterior.to_json();
        doc["meta"] = Metadata::new(&network).with("observe", &args.observe).to_json();
        let text = serde_json::to_string_pretty(&doc).expect("posterior serializes") + "\n";
        std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    let meta = Metadata::new(&network)
        .with("seed", seed)
        .with("transform", transform)
        .with("observe", &args.observe)
        .with("do", &args.intervention)
        .with("samples", args.samples);
    let mut w = open_out(&args.run.out)?;
    out::write_counterfactual(&mut w, &meta, &args.query, &draws)?;
    w.flush()?;
    Ok(())
}

fn prime_rule(network: &ReactionNetwork, prime: &PrimeArgs) -> CliResult<(RatesPrimeRule, String)> {
    match (&prime.prime_scale, &prime.soft) {
        (Some(s), None) => {
            let (key, factor) = parse_scale(s)?;
            let reaction = network.find_reaction(key)?;
            Ok((RatesPrimeRule::Scale { reaction, factor }, format!("scale {key}={factor}")))
        }
        (None, Some(s)) => {
            let (target, desired_mean) = single_assignment(s)?;
            let knob_key = prime.knob.as_deref().unwrap_or_default();
            let knob = network.find_reaction(knob_key)?;
            let label = format!("soft {target}={desired_mean} knob {knob_key}");
            Ok((RatesPrimeRule::SoftTarget { target, desired_mean, knob }, label))
        }
        _ => Err(Failure::Usage("give exactly one of --prime-scale or --soft".into())),
    }
}

fn prime_setup(
    network: &ReactionNetwork,
    prime: &PrimeArgs,
) -> CliResult<(RateAssignment, RateAssignment, Query, String)> {
    let (rule, label) = prime_rule(network, prime)?;
    let rates = network.rates();
    let rates_prime = rule.apply(network, &rates)?;
    let query = Query::new(&prime.intervene, &prime.query).with_transform(prime.transform.into());
    Ok((rates, rates_prime, query, label))
}

fn query_meta(meta: Metadata, query: &Query, label: &str) -> Metadata {
    meta.with("intervene", &query.intervene)
        .with("query", &query.query)
        .with("transform", query.transform)
        .with("rates_prime", label)
}

fn eval_det(args: EvalDetArgs) -> CliResult<()> {
    configure_jobs(args.run.jobs)?;
    let network = load_model(&args.model)?;
    let seed = resolve_seed(args.run.seed);
    let (rates, rates_prime, query, label) = prime_setup(&network, &args.prime)?;
    let result = eval_deterministic(&network, &rates, &rates_prime, &query, args.samples, seed)?;
    let meta = query_meta(Metadata::new(&network), &query, &label)
        .with("seed", seed)
        .with("samples", args.samples)
        .with("delta_true", result.delta_true);
    let mut w = open_out(&args.run.out)?;
    out::write_effects(&mut w, &meta, &result.all_samples())?;
    w.flush()?;
    eprintln!(
        "delta_true {:.4}  scm mean {:.4}",
        result.delta_true,
        stats::mean(&result.effect_values())
    );
    Ok(())
}

fn eval_stoch(args: EvalStochArgs) -> CliResult<()> {
    configure_jobs(args.run.jobs)?;
    let network = load_model(&args.model)?;
    let seed = resolve_seed(args.run.seed);
    let (rates, rates_prime, query, label) = prime_setup(&network, &args.prime)?;
    let seeds: Vec<u64> = (0..args.seeds as u64).map(|k| derive_seed(seed, SSA_SEED_STREAM, k)).collect();
    let scm_seed = derive_seed(seed, SCM_SEED_STREAM, 0);
    let result = eval_stochastic(&network, &rates, &rates_prime, args.t_end, &query, &seeds, scm_seed)?;
    let meta = query_meta(Metadata::new(&network), &query, &label)
        .with("seed", seed)
        .with("seeds", args.seeds)
        .with("t_end", args.t_end);
    let mut w = open_out(&args.run.out)?;
    out::write_effects(&mut w, &meta, &result.all_samples())?;
    w.flush()?;
    let ssa: Vec<f64> = result.effects_ssa.iter().map(|e| e.value).collect();
    let scm: Vec<f64> = result.effects_scm.iter().map(|e| e.value).collect();
    eprintln!("ssa mean {:.4}  scm mean {:.4}", stats::mean(&ssa), stats::mean(&scm));
    Ok(())
}

fn eval_misspec(args: EvalMisspecArgs) -> CliResult<()> {
    configure_jobs(args.run.jobs)?;
    let network = load_model(&args.model)?;
    let seed = resolve_seed(args.run.seed);
    let (rule, label) = prime_rule(&network, &args.prime)?;
    let query = Query::new(&args.prime.intervene, &args.prime.query).with_transform(args.prime.transform.into());
    let perturbed = network.find_reaction(&args.perturb)?;
    let mut config = MisspecConfig::new(perturbed, args.lo, args.hi, seed);
    config.repetitions = args.reps;
    config.seeds_per_rep = args.seeds_per_rep;
    config.sim_seeds = args.sim_seeds.unwrap_or(args.seeds_per_rep);
    config.t_end = args.t_end;
    let report = eval_misspecification(&network, &config, &rule, &query)?;
    let meta = query_meta(Metadata::new(&network), &query, &label)
        .with("seed", seed)
        .with("perturb", format!("{} + U({}, {})", args.perturb, args.lo, args.hi))
        .with("reps", config.repetitions)
        .with("seeds_per_rep", config.seeds_per_rep)
        .with("sim_seeds", config.sim_seeds)
        .with("t_end", config.t_end);
    let mut w = open_out(&args.run.out)?;
    w.write_all(out::misspec_json(&meta, &report).as_bytes())?;
    w.flush()?;
    eprintln!(
        "avg gap scm {:.4}  direct {:.4}  scm closer {}/{}",
        report.avg_gap_scm,
        report.avg_gap_sim,
        report.scm_closer,
        report.reps.len()
    );
    Ok(())
}
