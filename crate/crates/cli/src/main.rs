mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use glab_core::analysis::{
    check_livschitz, check_tropp_recovery, lemma_decay_batch, prop_iterate_batch,
    recovery_phase_sweep, theorem_batch, theorem_constants, write_sweep_csv, CheckReport, Ensemble,
    LemmaDecayBatch, PropIterateBatch, SweepSpec, TheoremBatch,
};
use glab_core::dictionary::{
    gen_gaussian, gen_orthonormal, gen_perturbed_identity, gen_union_of_bases,
};
use glab_core::greedy::{run_omp, run_pga, run_womp, GreedyConfig};
use glab_core::io::{read_dictionary, read_vector, write_dictionary, write_vector, DictFormat};
use glab_core::oracle::{best_n_term_with, OracleMethod, OracleOptions};
use glab_core::rip::{
    rip_coherence_bound, rip_exact_with_budget, rip_sampled, DEFAULT_ENUMERATION_BUDGET,
};
use glab_core::{Dictionary, RipEstimate, SelectionMode};
use serde_json::json;

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "glab", version, about = "Greedy sparse approximation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and inspect dictionaries
    #[command(subcommand)]
    Dict(DictCommand),
    /// Restricted isometry constant of a dictionary
    Rip(RipArgs),
    /// Run a greedy algorithm and print its trace
    Run(RunArgs),
    /// Best n-term approximation by exhaustive search
    Oracle(OracleArgs),
    /// Check recovery and approximation bounds on seeded batches
    #[command(subcommand)]
    Certify(CertifyCommand),
}

#[derive(Subcommand)]
enum DictCommand {
    /// Write a random dictionary to a file
    Gen(GenArgs),
    /// Print the coherence
    Coherence { path: PathBuf },
    /// Print dimensions and column-norm diagnostics
    Info { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    PerturbedIdentity,
    UnionOfBases,
    Orthonormal,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Bin,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Ambient dimension
    #[arg(long, value_parser = positive)]
    m: Option<usize>,
    /// Number of atoms
    #[arg(long, value_parser = positive)]
    n: Option<usize>,
    /// Perturbation size for perturbed-identity
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    out: PathBuf,
    /// Defaults to csv for a .csv path and bin otherwise
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Args)]
struct Parallel {
    /// Number of worker threads
    #[arg(long, value_parser = positive)]
    workers: Option<usize>,
}

#[derive(Args)]
#[group(id = "estimate", required = true, multiple = false)]
struct Estimate {
    /// Exhaustive enumeration at order n
    #[arg(long, value_name = "N", group = "estimate")]
    exact: Option<usize>,
    /// Random supports at order n (lower bound)
    #[arg(long, value_name = "N", group = "estimate", requires_all = ["trials", "seed"])]
    sampled: Option<usize>,
    /// (n-1) times the coherence (upper bound)
    #[arg(long, value_name = "N", group = "estimate")]
    bound: Option<usize>,
}

#[derive(Args)]
struct RipArgs {
    #[arg(long)]
    dict: PathBuf,
    #[command(flatten)]
    estimate: Estimate,
    #[arg(long, value_parser = positive)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of supports to enumerate
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    #[command(flatten)]
    parallel: Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Omp,
    Womp,
    Pga,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Argmax,
    AdversarialWeak,
}

impl From<Mode> for SelectionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Argmax => SelectionMode::Argmax,
            Mode::AdversarialWeak => SelectionMode::AdversarialWeak,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    dict: PathBuf,
    /// Target vector, one value per line
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    steps: usize,
    /// Weakness parameter in (0, 1]; womp only
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, value_enum, default_value_t = Mode::Argmax)]
    mode: Mode,
    /// Also write the final residual to this file
    #[arg(long)]
    residual_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    /// Enumerate even on orthonormal dictionaries
    #[arg(long)]
    exhaustive: bool,
    #[command(flatten)]
    parallel: Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaSource {
    /// Exhaustive RIP enumeration
    Exact,
    /// (n-1) times the coherence
    Bound,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    dict: PathBuf,
    /// Sparsity of the comparison element
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = positive)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, value_enum, default_value_t = Mode::Argmax)]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    #[command(flatten)]
    parallel: Parallel,
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// Per-step residual decay against the best n-term approximation
    LemmaDecay {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = DeltaSource::Exact)]
        delta_source: DeltaSource,
    },
    /// Iterated residual decay over random schedules
    PropIterate {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 4)]
        schedules: usize,
        #[arg(long, default_value_t = 1.0 / 6.0)]
        delta_star: f64,
        #[arg(long, value_enum, default_value_t = DeltaSource::Bound)]
        delta_source: DeltaSource,
    },
    /// Instance optimality after A n steps
    InstanceOpt {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, value_enum, default_value_t = DeltaSource::Bound)]
        delta_source: DeltaSource,
    },
    /// Error of the top-n postprocessed output
    Postprocess {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, value_enum, default_value_t = DeltaSource::Bound)]
        delta_source: DeltaSource,
    },
    /// Exact n-step recovery under a coherence condition
    Tropp(RecoveryArgs),
    /// 2n-step approximation bound under a coherence condition
    Livschitz(RecoveryArgs),
    /// Recovery and approximation statistics over a random ensemble (CSV)
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RecoveryArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, value_parser = positive)]
    n: usize,
    #[arg(long, value_parser = positive)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    parallel: Parallel,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    ensemble: Kind,
    #[arg(long, value_parser = positive)]
    m: Option<usize>,
    #[arg(long, value_parser = positive)]
    n_atoms: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long, value_parser = positive)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// The ratio columns use ratio_multiple * n OMP steps
    #[arg(long, default_value_t = 1, value_parser = positive)]
    ratio_multiple: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    /// Write the CSV here instead of standard output
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    parallel: Parallel,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Invalid argument combinations that clap cannot express; exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn need<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("--{flag} is required for {kind}")))
}

/// What a command produced: JSON or CSV for stdout and whether it passed.
struct Outcome {
    payload: String,
    passed: bool,
}

impl Outcome {
    fn ok(payload: String) -> Self {
        Self {
            payload,
            passed: true,
        }
    }

    fn report(report: &CheckReport) -> Self {
        eprintln!(
            "{}: {} ({} instances, {} skipped, {} evaluations, {} violations)",
            report.check_name,
            if report.passed { "passed" } else { "FAILED" },
            report.instances_run,
            report.skipped,
            report.evaluations,
            report.violations.len()
        );
        Self {
            payload: report.to_json(),
            passed: report.passed,
        }
    }
}

fn with_workers<R: Send>(parallel: &Parallel, job: impl FnOnce() -> R + Send) -> Result<R> {
    match parallel.workers {
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()?
            .install(job)),
        None => Ok(job()),
    }
}

fn load_dict(path: &Path) -> Result<Dictionary> {
    read_dictionary(path).with_context(|| format!("reading dictionary {}", path.display()))
}

fn generate(
    kind: Kind,
    m: Option<usize>,
    n: Option<usize>,
    eps: Option<f64>,
    seed: u64,
) -> Result<Dictionary> {
    let dict = match kind {
        Kind::Gaussian => gen_gaussian(need(m, "m", "gaussian")?, need(n, "n", "gaussian")?, seed)?,
        Kind::Orthonormal => gen_orthonormal(need(m, "m", "orthonormal")?, seed)?,
        Kind::UnionOfBases => gen_union_of_bases(need(m, "m", "union-of-bases")?, seed)?,
        Kind::PerturbedIdentity => gen_perturbed_identity(
            need(n, "n", "perturbed-identity")?,
            need(eps, "eps", "perturbed-identity")?,
            seed,
        )?,
    };
    Ok(dict)
}

fn cmd_dict(cmd: DictCommand, manifest: &mut RunManifest) -> Result<Outcome> {
    match cmd {
        DictCommand::Gen(args) => {
            manifest.seed = Some(args.seed);
            let dict = generate(args.kind, args.m, args.n, args.eps, args.seed)?;
            let format = match args.format {
                Some(FileFormat::Csv) => DictFormat::Csv,
                Some(FileFormat::Bin) => DictFormat::Binary,
                None if args.out.extension().is_some_and(|e| e == "csv") => DictFormat::Csv,
                None => DictFormat::Binary,
            };
            write_dictionary(&dict, &args.out, format)?;
            manifest.outputs.push(args.out.clone());
            eprintln!(
                "wrote {} x {} dictionary to {}",
                dict.ambient_dim(),
                dict.num_atoms(),
                args.out.display()
            );
            Ok(Outcome::ok(
                json!({ "output": args.out, "m": dict.ambient_dim(), "N": dict.num_atoms() })
                    .to_string(),
            ))
        }
        DictCommand::Coherence { path } => {
            let dict = load_dict(&path)?;
            let mu = dict.coherence()?;
            eprintln!("coherence {mu:.6e}");
            Ok(Outcome::ok(json!({ "mu": mu }).to_string()))
        }
        DictCommand::Info { path } => {
            let dict = load_dict(&path)?;
            let (lo, hi) = dict.norm_range();
            let info = json!({
                "label": dict.label(),
                "m": dict.ambient_dim(),
                "N": dict.num_atoms(),
                "min_column_norm": lo,
                "max_column_norm": hi,
                "max_norm_deviation": (hi - 1.0).abs().max((1.0 - lo).abs()),
                "orthonormal": dict.is_orthonormal(),
            });
            eprintln!(
                "{} x {} dictionary, column norms in [{lo}, {hi}]",
                dict.ambient_dim(),
                dict.num_atoms()
            );
            Ok(Outcome::ok(info.to_string()))
        }
    }
}

fn cmd_rip(args: RipArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let dict = load_dict(&args.dict)?;
    let est = &args.estimate;
    let estimate: RipEstimate = if let Some(n) = est.exact {
        with_workers(&args.parallel, || {
            rip_exact_with_budget(&dict, n, args.budget)
        })??
    } else if let Some(n) = est.sampled {
        let seed = need(args.seed, "seed", "--sampled")?;
        manifest.seed = Some(seed);
        rip_sampled(&dict, n, need(args.trials, "trials", "--sampled")?, seed)?
    } else {
        let n = est.bound.expect("clap requires one estimate");
        rip_coherence_bound(&dict, n)?
    };
    eprintln!(
        "δ_{} = {} ({:?})",
        estimate.order, estimate.value, estimate.kind
    );
    Ok(Outcome::ok(estimate.to_json()))
}

fn cmd_run(args: RunArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let dict = load_dict(&args.dict)?;
    let f = read_vector(&args.target)
        .with_context(|| format!("reading target {}", args.target.display()))?;
    let trace = match args.algo {
        Algo::Omp => run_omp(&dict, &f, args.steps)?,
        Algo::Pga => run_pga(&dict, &f, args.steps)?,
        Algo::Womp => run_womp(
            &dict,
            &f,
            &GreedyConfig::womp(args.kappa, args.steps, args.mode.into()),
        )?,
    };
    if let Some(path) = &args.residual_out {
        write_vector(&trace.final_residual, path)?;
        manifest.outputs.push(path.clone());
    }
    eprintln!(
        "{} steps, final residual {:.6e}",
        trace.steps(),
        trace.final_residual_norm()
    );
    Ok(Outcome::ok(trace.to_json()))
}

fn cmd_oracle(args: OracleArgs) -> Result<Outcome> {
    let dict = load_dict(&args.dict)?;
    let f = read_vector(&args.target)
        .with_context(|| format!("reading target {}", args.target.display()))?;
    let options = OracleOptions {
        budget: args.budget,
        method: if args.exhaustive {
            OracleMethod::Exhaustive
        } else {
            OracleMethod::Auto
        },
    };
    let best = with_workers(&args.parallel, || {
        best_n_term_with(&dict, &f, args.n, options)
    })??;
    eprintln!(
        "σ_{} = {:.6e} on support {:?}",
        best.order, best.sigma_n, best.best_support
    );
    Ok(Outcome::ok(best.to_json()))
}

fn certificate(
    dict: &Dictionary,
    order: usize,
    source: DeltaSource,
    budget: u128,
) -> Result<RipEstimate> {
    Ok(match source {
        DeltaSource::Exact => rip_exact_with_budget(dict, order, budget)?,
        DeltaSource::Bound => rip_coherence_bound(dict, order)?,
    })
}

fn cmd_certify(cmd: CertifyCommand, manifest: &mut RunManifest) -> Result<Outcome> {
    match cmd {
        CertifyCommand::LemmaDecay {
            batch: b,
            steps,
            delta_source,
        } => {
            manifest.seed = Some(b.seed);
            let dict = load_dict(&b.dict)?;
            let batch = LemmaDecayBatch {
                sparsity: b.n,
                steps,
                trials: b.trials,
                seed: b.seed,
                kappa: b.kappa,
                mode: b.mode.into(),
            };
            let report = with_workers(&b.parallel, || -> Result<CheckReport> {
                let ladder = (1..=batch.required_order().max(1))
                    .map(|n| certificate(&dict, n, delta_source, b.budget))
                    .collect::<Result<Vec<_>>>()?;
                Ok(lemma_decay_batch(&dict, &batch, &ladder)?)
            })??;
            Ok(Outcome::report(&report))
        }
        CertifyCommand::PropIterate {
            batch: b,
            steps,
            schedules,
            delta_star,
            delta_source,
        } => {
            manifest.seed = Some(b.seed);
            let dict = load_dict(&b.dict)?;
            let batch = PropIterateBatch {
                sparsity: b.n,
                steps,
                trials: b.trials,
                seed: b.seed,
                kappa: b.kappa,
                mode: b.mode.into(),
                delta_star,
                schedules_per_instance: schedules,
            };
            let report = with_workers(&b.parallel, || -> Result<CheckReport> {
                let cert = certificate(&dict, batch.required_order(), delta_source, b.budget)?;
                Ok(prop_iterate_batch(&dict, &batch, &cert)?)
            })??;
            Ok(Outcome::report(&report))
        }
        CertifyCommand::InstanceOpt {
            batch,
            delta_source,
        } => theorem(batch, delta_source, false, manifest),
        CertifyCommand::Postprocess {
            batch,
            delta_source,
        } => theorem(batch, delta_source, true, manifest),
        CertifyCommand::Tropp(args) => {
            manifest.seed = Some(args.seed);
            let dict = load_dict(&args.dict)?;
            let report = with_workers(&args.parallel, || {
                check_tropp_recovery(&dict, args.n, args.trials, args.seed)
            })??;
            Ok(Outcome::report(&report))
        }
        CertifyCommand::Livschitz(args) => {
            manifest.seed = Some(args.seed);
            let dict = load_dict(&args.dict)?;
            let report = with_workers(&args.parallel, || {
                check_livschitz(&dict, args.n, args.trials, args.seed)
            })??;
            Ok(Outcome::report(&report))
        }
        CertifyCommand::Sweep(args) => sweep(args, manifest),
    }
}

fn theorem(
    b: BatchArgs,
    source: DeltaSource,
    postprocessed: bool,
    manifest: &mut RunManifest,
) -> Result<Outcome> {
    manifest.seed = Some(b.seed);
    let dict = load_dict(&b.dict)?;
    let constants = theorem_constants(b.kappa)?;
    let batch = TheoremBatch {
        n: b.n,
        trials: b.trials,
        seed: b.seed,
        mode: b.mode.into(),
        oracle: OracleOptions {
            budget: b.budget,
            method: OracleMethod::Auto,
        },
    };
    let report = with_workers(&b.parallel, || -> Result<_> {
        let cert = certificate(&dict, constants.rip_order(b.n), source, b.budget)?;
        Ok(theorem_batch(&dict, &constants, &cert, &batch)?)
    })??;
    let chosen = if postprocessed {
        &report.postprocessing
    } else {
        &report.theorem
    };
    Ok(Outcome::report(chosen))
}

fn sweep(args: SweepArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    manifest.seed = Some(args.seed);
    let ensemble = match args.ensemble {
        Kind::Gaussian => Ensemble::Gaussian {
            m: need(args.m, "m", "gaussian")?,
            n_atoms: need(args.n_atoms, "n-atoms", "gaussian")?,
        },
        Kind::Orthonormal => Ensemble::Orthonormal {
            m: need(args.m, "m", "orthonormal")?,
        },
        Kind::UnionOfBases => Ensemble::UnionOfBases {
            m: need(args.m, "m", "union-of-bases")?,
        },
        Kind::PerturbedIdentity => Ensemble::PerturbedIdentity {
            n_atoms: need(args.n_atoms, "n-atoms", "perturbed-identity")?,
            eps: need(args.eps, "eps", "perturbed-identity")?,
        },
    };
    if args.n_min > args.n_max {
        return Err(usage("--n-min exceeds --n-max"));
    }
    let spec = SweepSpec {
        ensemble,
        n_values: (args.n_min..=args.n_max).collect(),
        trials: args.trials,
        seed: args.seed,
        ratio_multiple: args.ratio_multiple,
        oracle: OracleOptions {
            budget: args.budget,
            method: OracleMethod::Auto,
        },
    };
    let rows = with_workers(&args.parallel, || recovery_phase_sweep(&spec))??;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    eprintln!("{} rows, {} trials each", rows.len(), args.trials);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            manifest.outputs.push(path.clone());
            Ok(Outcome::ok(
                json!({ "output": path, "rows": rows.len() }).to_string(),
            ))
        }
        None => Ok(Outcome::ok(String::from_utf8(csv)?.trim_end().to_string())),
    }
}

fn execute(cli: Cli, manifest: &mut RunManifest) -> Result<Outcome> {
    match cli.command {
        Command::Dict(cmd) => cmd_dict(cmd, manifest),
        Command::Rip(args) => cmd_rip(args, manifest),
        Command::Run(args) => cmd_run(args, manifest),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Certify(cmd) => cmd_certify(cmd, manifest),
    }
}

fn command_name(cli: &Cli) -> &'static str {
    match &cli.command {
        Command::Dict(DictCommand::Gen(_)) => "dict gen",
        Command::Dict(DictCommand::Coherence { .. }) => "dict coherence",
        Command::Dict(DictCommand::Info { .. }) => "dict info",
        Command::Rip(_) => "rip",
        Command::Run(_) => "run",
        Command::Oracle(_) => "oracle",
        Command::Certify(c) => match c {
            CertifyCommand::LemmaDecay { .. } => "certify lemma-decay",
            CertifyCommand::PropIterate { .. } => "certify prop-iterate",
            CertifyCommand::InstanceOpt { .. } => "certify instance-opt",
            CertifyCommand::Postprocess { .. } => "certify postprocess",
            CertifyCommand::Tropp(_) => "certify tropp",
            CertifyCommand::Livschitz(_) => "certify livschitz",
            CertifyCommand::Sweep(_) => "certify sweep",
        },
    }
}

fn fail(err: &anyhow::Error) -> ExitCode {
    if let Some(u) = err.downcast_ref::<UsageError>() {
        eprintln!("error: {u}");
        return ExitCode::from(2);
    }
    let (kind, code) = match err.downcast_ref::<glab_core::Error>() {
        Some(e @ (glab_core::Error::InvalidParameter(_) | glab_core::Error::InvalidKappa(_))) => {
            (e.kind(), 2)
        }
        Some(e) => (e.kind(), 1),
        None => ("Io", 1),
    };
    let message = format!("{err:#}");
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut manifest = RunManifest::new(command_name(&cli));
    let outcome = match execute(cli, &mut manifest) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = manifest.finish(started.elapsed()) {
        return fail(&e);
    }
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{}", outcome.payload).is_err() {
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn positive_rejects_zero() {
        assert!(positive("0").is_err());
        assert!(positive("-3").is_err());
        assert_eq!(positive("7"), Ok(7));
    }

    #[test]
    fn estimate_flags_are_exclusive() {
        assert!(Cli::try_parse_from([
            "glab", "rip", "--dict", "d", "--exact", "2", "--bound", "2"
        ])
        .is_err());
        assert!(Cli::try_parse_from(["glab", "rip", "--dict", "d", "--bound", "2"]).is_ok());
    }
}
