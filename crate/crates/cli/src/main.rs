use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use orbicert::certificate::Status;
use orbicert::config::{load_config, Loaded};
use orbicert::cz::{beta_lower, certify, constants_chain, xi};
use orbicert::ff::{approx, probe_sweep, product_formula_sweep, wang_sweep, Probe, SampleParams};
use orbicert::picard::{Component, SurfaceConfig};
use orbicert::positivity::WeightedBoundary;
use orbicert::rational::{fmt_rational, int, parse_rational};
use orbicert::rv::plane_beta_ratio;
use orbicert::search::{search, Objective, SearchOptions};

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "orbicert", version, about = "Exact hyperbolicity certificates for weighted plane boundaries")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a configuration and write the certificate.
    Certify {
        config: PathBuf,
        /// Certificate path; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Largest N tried for the constant chain.
        #[arg(long, default_value_t = 500)]
        rv_cap: u64,
    },
    /// Search positive integer weights passing the checklist.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        bound: u32,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinSum)]
        objective: ObjectiveArg,
        /// Keep only the best K vectors.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Compute the finite-level constant chain.
    Constants {
        #[arg(long)]
        config: PathBuf,
        /// Target ε as `n/d`; defaults to the certified lower bound.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 500)]
        cap: u64,
    },
    /// Randomized sweeps over rational curves.
    Stress {
        #[arg(value_enum)]
        kind: StressKind,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 10)]
        max_degree: u32,
        #[arg(long, default_value_t = 100)]
        coeff_bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configuration with plane geometry (probe only).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print only the summary.
        #[arg(long)]
        quiet: bool,
    },
    /// Volume ratio of O(a) along a line in the plane.
    Beta {
        #[arg(long, required = true)]
        plane: bool,
        #[arg(long)]
        degree: u64,
        /// Largest N for the partial ratios.
        #[arg(long, default_value_t = 10)]
        max_n: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinSum,
    MaxEpsilon,
}

#[derive(Clone, Copy, ValueEnum)]
enum StressKind {
    /// Truncated second main theorem and the First Main Theorem identity.
    Wang,
    /// Degree sums of rational functions.
    Product,
    /// Height bound along sampled rational curves.
    Probe,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &PathBuf) -> Result<Loaded> {
    load_config(path).with_context(|| format!("config {}", path.display()))
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Certify { config, out, rv_cap } => cmd_certify(&config, out.as_ref(), rv_cap),
        Command::Search {
            config,
            bound,
            objective,
            limit,
        } => cmd_search(&config, bound, objective, limit),
        Command::Constants { config, eps, cap } => cmd_constants(&config, eps.as_deref(), cap),
        Command::Stress {
            kind,
            samples,
            max_degree,
            coeff_bound,
            seed,
            config,
            quiet,
        } => {
            let params = SampleParams {
                max_degree,
                coeff_bound,
                ..SampleParams::default()
            };
            cmd_stress(kind, samples, &params, seed, config.as_ref(), quiet)
        }
        Command::Beta { degree, max_n, .. } => cmd_beta(degree, max_n),
    }
}

fn cmd_certify(config: &PathBuf, out: Option<&PathBuf>, rv_cap: u64) -> Result<u8> {
    let loaded = load(config)?;
    let mut opts = loaded.options.clone();
    opts.rv_cap = rv_cap;
    let cert = certify(&loaded.surface, &loaded.weights, &opts);
    let json = cert.to_json();
    match out {
        Some(path) => fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(json.as_bytes())?,
    }
    for h in &cert.hypotheses {
        eprintln!("{:<24} {:<14} {}", h.name.to_string(), status_word(h.status), h.detail);
    }
    Ok(match cert.outcome.status {
        Status::Pass => {
            eprintln!("outcome: pass");
            EXIT_PASS
        }
        Status::Fail => {
            eprintln!("outcome: fail at {}", first(&cert.outcome.first_failure));
            EXIT_FAIL
        }
        _ => {
            eprintln!("outcome: inconclusive at {}", first(&cert.outcome.first_failure));
            EXIT_INCONCLUSIVE
        }
    })
}

fn first(h: &Option<orbicert::certificate::Hypothesis>) -> String {
    h.map(|h| h.to_string()).unwrap_or_else(|| "-".into())
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Inconclusive => "inconclusive",
        Status::NotEvaluated => "not-evaluated",
    }
}

fn cmd_search(config: &PathBuf, bound: u32, objective: ObjectiveArg, limit: Option<usize>) -> Result<u8> {
    let loaded = load(config)?;
    let mut opts = SearchOptions::new(
        bound,
        match objective {
            ObjectiveArg::MinSum => Objective::MinSum,
            ObjectiveArg::MaxEpsilon => Objective::MaxEpsilon,
        },
    );
    opts.limit = limit;
    opts.allow_single_component = loaded.options.allow_single_component;
    let hits = search(&loaded.surface, &opts)?;
    let mut stdout = io::stdout().lock();
    for h in &hits {
        let w: Vec<String> = h.weights.iter().map(|x| x.to_string()).collect();
        writeln!(stdout, "({})  eps = {}", w.join(", "), h.epsilon)?;
    }
    eprintln!("{} vectors shown, bound {bound}", hits.len());
    Ok(EXIT_PASS)
}

fn cmd_constants(config: &PathBuf, eps: Option<&str>, cap: u64) -> Result<u8> {
    let loaded = load(config)?;
    let eps = eps
        .map(|s| parse_rational(s).map_err(|e| anyhow::anyhow!("--eps: {e}")))
        .transpose()?;
    match constants_chain(&loaded.surface, &loaded.weights, eps.as_ref(), cap) {
        Ok(chain) => {
            if let Err(e) = chain.reverify(&loaded.surface, &loaded.weights) {
                bail!("chain failed re-verification: {e}");
            }
            print!("{chain}");
            Ok(EXIT_PASS)
        }
        Err(e) => {
            eprintln!("no chain: {e}");
            Ok(if e.contains("cap") { EXIT_INCONCLUSIVE } else { EXIT_FAIL })
        }
    }
}

fn cmd_stress(
    kind: StressKind,
    samples: u64,
    params: &SampleParams,
    seed: u64,
    config: Option<&PathBuf>,
    quiet: bool,
) -> Result<u8> {
    match kind {
        StressKind::Wang => {
            let s = wang_sweep(seed, samples, params);
            println!("samples        {}", s.samples);
            println!("violations     {}", s.violations);
            println!("fmt failures   {}", s.fmt_failures);
            println!("max lhs - rhs  {}", s.max_excess);
            Ok(if s.violations == 0 && s.fmt_failures == 0 { EXIT_PASS } else { EXIT_FAIL })
        }
        StressKind::Product => {
            let bad = product_formula_sweep(seed, samples, params);
            println!("samples     {samples}");
            println!("violations  {bad}");
            Ok(if bad == 0 { EXIT_PASS } else { EXIT_FAIL })
        }
        StressKind::Probe => {
            let Some(path) = config else {
                bail!("probe needs --config with a geometry section");
            };
            let loaded = load(path)?;
            let Some(geometry) = loaded.geometry.clone() else {
                bail!("{} has no geometry section", path.display());
            };
            let cert = certify(&loaded.surface, &loaded.weights, &loaded.options);
            let probe = Probe::new(&loaded.surface, &loaded.weights, geometry, &cert)?;
            let s = probe_sweep(&probe, seed, samples, params);
            let mut stdout = io::stdout().lock();
            if !quiet {
                for r in &s.records {
                    writeln!(stdout, "{}", serde_json::to_string(r)?)?;
                }
            }
            writeln!(stdout, "sampled     {}", s.sampled)?;
            writeln!(stdout, "excluded    {}", s.excluded)?;
            match &s.alpha_emp {
                Some(a) => writeln!(stdout, "alpha_emp   {} (~{:.4}, empirical)", fmt_rational(a), approx(a))?,
                None => writeln!(stdout, "alpha_emp   -")?,
            }
            writeln!(stdout, "violations  {}", s.violations)?;
            Ok(if s.violations == 0 { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn cmd_beta(a: u64, max_n: u64) -> Result<u8> {
    if a == 0 || max_n == 0 {
        bail!("--degree and --max-n must be positive");
    }
    let cfg = SurfaceConfig::new(vec![Component::unpaired(1)], vec![], vec![])?;
    let wb = WeightedBoundary::new(&cfg, vec![int(a as i64)])?;
    let x = xi(&cfg, &wb, 0)?;
    let beta = beta_lower(&cfg, &wb, 0, &x);
    println!("closed form  {beta}");
    let mut all_equal = true;
    for n in 1..=max_n {
        let r = plane_beta_ratio(a, n);
        all_equal &= beta.as_rational() == Some(&r);
        println!("N = {n:<4} {}", fmt_rational(&r));
    }
    Ok(if all_equal { EXIT_PASS } else { EXIT_FAIL })
}
