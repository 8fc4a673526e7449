//! Command-line front end for the sukp toolkit.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or parameter values),
//! 2 data error (unreadable or invalid files, instances out of a method's
//! range). All randomness flows from explicit seed flags; an omitted seed is
//! generated, printed, and embedded in outputs so the run can be replayed.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};
use sukp::bench::{
    self, emit, friedman_ranks_with_alpha, ordinal_differences, run_experiment, AlgorithmSpec,
    EmitFormat, ExperimentConfig, InstanceSpec, MeansMatrix, RankTable,
};
use sukp::dtlbo::{self, DtlboParams, LoadMode, RepairKind, TfRule};
use sukp::instance::{generate_instance, parse_instance, serialize_instance, SukpInstance};
use sukp::oracle::{exact_branch_bound, exact_bruteforce};

#[derive(Parser)]
#[command(
    name = "sukp",
    version,
    about = "Set-union knapsack toolkit: generate instances, solve, check oracles, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Item,
    Element,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Bb,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file in the canonical format.
    Generate {
        #[arg(long)]
        items: usize,
        #[arg(long)]
        elements: usize,
        /// Membership density in (0, 1].
        #[arg(long)]
        density: f64,
        /// Capacity as a fraction of the total element weight, in (0, 1].
        #[arg(long)]
        ratio: f64,
        /// Generator seed; omitted seeds are drawn and printed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; defaults to `<name>.sukp` in the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance with the discrete TLBO engine.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "item")]
        mode: ModeArg,
        /// Independent seeded runs.
        #[arg(long, default_value = "1")]
        runs: usize,
        /// Master seed; per-run seeds derive from it.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "20")]
        popsize: usize,
        /// Evaluation budget; defaults to 20 + 20 * max(m, n).
        #[arg(long)]
        mfc: Option<usize>,
        /// Write the report to a file as well as stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a best-so-far history CSV (`run,evaluation,best_fitness`).
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Solve an instance exactly (small instances only).
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: MethodArg,
    },
    /// Run a benchmark experiment, or rank a matrix of published means.
    Bench {
        /// Experiment config file (key = value lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Skip solving: rank an `instance,<alg>,...` means CSV instead.
        #[arg(long, value_name = "CSV")]
        from_means: Option<PathBuf>,
        /// Instance path or `gen:m=..,n=..,density=..,ratio=..,seed=..`.
        #[arg(long = "instance")]
        instances: Vec<String>,
        /// Algorithm preset (i-dtlbo, e-dtlbo, i-tlbo, e-tlbo, s-tlbo, s-dtlbo).
        #[arg(long = "algorithm")]
        algorithms: Vec<String>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        master_seed: Option<u64>,
        #[arg(long)]
        popsize: Option<usize>,
        #[arg(long)]
        mfc: Option<usize>,
        /// Parallel worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output stem for emitted files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv, markdown, or json.
        #[arg(long)]
        format: Option<String>,
        /// Significance level for the Nemenyi test (0.05 or 0.10).
        #[arg(long, default_value = "0.05")]
        alpha: f64,
    },
    /// Friedman/Nemenyi rank analysis of a means CSV.
    Stats {
        /// Means CSV with header `instance,<alg>,...`.
        #[arg(long)]
        means: PathBuf,
        /// Significance level for the Nemenyi test (0.05 or 0.10).
        #[arg(long, default_value = "0.05")]
        alpha: f64,
        /// Write the rank table to `<stem>_ranks.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum AppError {
    Usage(String),
    Data(String),
}

type AppResult = Result<(), AppError>;

fn usage<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Usage(e.to_string())
}

fn data<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Data(e.to_string())
}

fn main() {
    // Die quietly on a closed pipe instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(AppError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
        Err(AppError::Data(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}

/// Entropy-derived seed for invocations that omit one.
fn fresh_seed() -> u64 {
    std::collections::hash_map::RandomState::new()
        .build_hasher()
        .finish()
}

fn load_instance(path: &Path) -> Result<(SukpInstance, String), AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    let (inst, meta) =
        parse_instance(&text).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let name = meta.map(|m| m.name).unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    });
    Ok((inst, name))
}

fn dispatch(cli: Cli) -> AppResult {
    match cli.command {
        Command::Generate {
            items,
            elements,
            density,
            ratio,
            seed,
            out,
        } => cmd_generate(items, elements, density, ratio, seed, out),
        Command::Solve {
            instance,
            mode,
            runs,
            seed,
            popsize,
            mfc,
            out,
            history,
        } => cmd_solve(instance, mode, runs, seed, popsize, mfc, out, history),
        Command::Oracle { instance, method } => cmd_oracle(instance, method),
        Command::Bench {
            config,
            from_means,
            instances,
            algorithms,
            runs,
            master_seed,
            popsize,
            mfc,
            jobs,
            out,
            format,
            alpha,
        } => {
            if let Some(means_path) = from_means {
                return cmd_stats(means_path, alpha, out);
            }
            cmd_bench(
                config,
                instances,
                algorithms,
                runs,
                master_seed,
                popsize,
                mfc,
                jobs,
                out,
                format,
                alpha,
            )
        }
        Command::Stats { means, alpha, out } => cmd_stats(means, alpha, out),
    }
}

fn cmd_generate(
    items: usize,
    elements: usize,
    density: f64,
    ratio: f64,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> AppResult {
    let seed = seed.unwrap_or_else(fresh_seed);
    let (inst, meta) = generate_instance(items, elements, density, ratio, seed).map_err(usage)?;
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.sukp", meta.name)));
    std::fs::write(&path, serialize_instance(&inst, Some(&meta)))
        .map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    println!("seed: {seed}");
    println!("wrote: {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: PathBuf,
    mode: ModeArg,
    runs: usize,
    seed: Option<u64>,
    popsize: usize,
    mfc: Option<usize>,
    out: Option<PathBuf>,
    history: Option<PathBuf>,
) -> AppResult {
    if runs == 0 {
        return Err(AppError::Usage("--runs must be at least 1".into()));
    }
    let (inst, name) = load_instance(&instance)?;
    let master_seed = seed.unwrap_or_else(fresh_seed);
    let mode = match mode {
        ModeArg::Item => LoadMode::Item,
        ModeArg::Element => LoadMode::Element,
    };
    let params_for = |run: usize| DtlboParams {
        popsize,
        mfc,
        mode,
        seed: bench::run_seed(master_seed, 0, 0, run as u64),
        tf_rule: TfRule::RoundRandom,
        repair: RepairKind::SelfAdjusting,
        use_eos: true,
        use_sf: true,
    };

    let mut report = String::new();
    let _ = writeln!(report, "instance: {name}");
    let _ = writeln!(
        report,
        "items: {} elements: {} capacity: {}",
        inst.item_count(),
        inst.element_count(),
        inst.capacity()
    );
    let _ = writeln!(
        report,
        "mode: {}",
        match mode {
            LoadMode::Item => "item",
            LoadMode::Element => "element",
        }
    );
    let _ = writeln!(report, "popsize: {popsize}");
    let _ = writeln!(report, "mfc: {}", params_for(0).resolved_mfc(&inst));
    let _ = writeln!(report, "master_seed: {master_seed}");

    let mut results = Vec::with_capacity(runs);
    for run in 0..runs {
        let params = params_for(run);
        let result = dtlbo::run(&inst, &params).map_err(usage)?;
        let _ = writeln!(
            report,
            "run {run}: seed={} best={} evaluations={}",
            params.seed, result.best.fitness, result.evaluations_used
        );
        results.push(result);
    }
    let fitnesses: Vec<f64> = results.iter().map(|r| r.best.fitness).collect();
    let best_run = fitnesses
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();
    if runs > 1 {
        let best = fitnesses.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let worst = fitnesses.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = fitnesses.iter().sum::<f64>() / runs as f64;
        let var = fitnesses.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / runs as f64;
        let _ = writeln!(
            report,
            "summary: best={best} worst={worst} mean={mean} std={}",
            var.sqrt()
        );
    }
    let bits: String = results[best_run]
        .best
        .y
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let _ = writeln!(report, "best fitness: {}", fitnesses[best_run]);
    let _ = writeln!(report, "best solution: {bits}");

    print!("{report}");
    if let Some(path) = out {
        std::fs::write(&path, &report)
            .map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = history {
        let mut csv = String::from("run,evaluation,best_fitness\n");
        for (run, result) in results.iter().enumerate() {
            for (evaluation, fitness) in &result.history {
                let _ = writeln!(csv, "{run},{evaluation},{fitness}");
            }
        }
        std::fs::write(&path, csv)
            .map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_oracle(instance: PathBuf, method: MethodArg) -> AppResult {
    let (inst, name) = load_instance(&instance)?;
    let result = match method {
        MethodArg::Brute => exact_bruteforce(&inst),
        MethodArg::Bb => exact_branch_bound(&inst),
    }
    .map_err(data)?;
    let bits: String = result
        .witness
        .bits
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    println!("instance: {name}");
    println!(
        "method: {}",
        match method {
            MethodArg::Brute => "brute",
            MethodArg::Bb => "bb",
        }
    );
    println!("optimum: {}", result.optimum);
    println!("witness: {bits}");
    println!("explored: {}", result.explored);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    config: Option<PathBuf>,
    instances: Vec<String>,
    algorithms: Vec<String>,
    runs: Option<usize>,
    master_seed: Option<u64>,
    popsize: Option<usize>,
    mfc: Option<usize>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
    alpha: f64,
) -> AppResult {
    let from_config = config.is_some();
    let mut experiment = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text).map_err(|e| data(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    for spec in &instances {
        experiment
            .instances
            .push(InstanceSpec::parse(spec).map_err(usage)?);
    }
    for name in &algorithms {
        experiment.algorithms.push(
            AlgorithmSpec::preset(name)
                .ok_or_else(|| AppError::Usage(format!("unknown algorithm preset `{name}`")))?,
        );
    }
    if let Some(runs) = runs {
        experiment.runs = runs;
    }
    if let Some(seed) = master_seed {
        experiment.master_seed = seed;
    } else if !from_config {
        experiment.master_seed = fresh_seed();
        println!("master_seed: {}", experiment.master_seed);
    }
    if let Some(popsize) = popsize {
        experiment.popsize = popsize;
    }
    if let Some(mfc) = mfc {
        experiment.mfc = Some(mfc);
    }
    if let Some(jobs) = jobs {
        experiment.jobs = jobs;
    }
    if let Some(format) = format {
        experiment.format = format.parse::<EmitFormat>().map_err(usage)?;
    }
    if let Some(out) = out {
        experiment.output = Some(out);
    }

    let output = run_experiment(&experiment).map_err(data)?;
    let ranks = if experiment.algorithms.len() >= 2 && experiment.instances.len() >= 2 {
        let means = MeansMatrix::from_rows(&output.rows).map_err(data)?;
        Some(friedman_ranks_with_alpha(&means, alpha).map_err(data)?)
    } else {
        None
    };

    for row in &output.rows {
        println!(
            "{} {}: best={} worst={} mean={} std={}",
            row.instance, row.algorithm, row.best, row.worst, row.mean, row.std
        );
    }
    if let Some(table) = &ranks {
        print_rank_table(table);
    }
    let stem = experiment
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    let written = emit(&output, ranks.as_ref(), experiment.format, &stem).map_err(data)?;
    for path in written {
        println!("wrote: {}", path.display());
    }
    Ok(())
}

fn cmd_stats(means_path: PathBuf, alpha: f64, out: Option<PathBuf>) -> AppResult {
    let text = std::fs::read_to_string(&means_path)
        .map_err(|e| data(format!("cannot read {}: {e}", means_path.display())))?;
    let means = MeansMatrix::parse_csv(&text)
        .map_err(|e| data(format!("{}: {e}", means_path.display())))?;
    let table = friedman_ranks_with_alpha(&means, alpha).map_err(data)?;
    print_rank_table(&table);
    if let Some(stem) = out {
        let path = stem.with_file_name(format!(
            "{}_ranks.csv",
            stem.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "results".into())
        ));
        std::fs::write(&path, bench::ranks_csv(&table))
            .map_err(|e| data(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote: {}", path.display());
    }
    Ok(())
}

fn print_rank_table(table: &RankTable) {
    println!("algorithm,avg_rank");
    for (name, rank) in table.algorithms.iter().zip(&table.avg_ranks) {
        println!("{name},{rank}");
    }
    println!("friedman_statistic: {}", table.friedman_statistic);
    println!("p_value: {:e}", table.p_value);
    println!("nemenyi_cd: {} (alpha={})", table.nemenyi_cd, table.alpha);
    for c in ordinal_differences(table) {
        println!(
            "vs {}: diff={} significant={}",
            c.algorithm,
            c.difference,
            if c.significant { "yes" } else { "no" }
        );
    }
}
