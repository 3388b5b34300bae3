//! Command-line front end: `run` executes an experiment scenario and writes
//! its CSV report, `bound` evaluates every computable bound for a structure
//! file (approximate values + residual norms, no matrices), and
//! `list-scenarios` shows what can be run.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ritz_bounds::bounds::{BoundReport, BoundValue, GapMode};
use ritz_bounds::experiments::{
    emit_csv, run_experiment, write_csv_file, ExperimentConfig, GapChoice, Scenario,
};
use ritz_bounds::structure_file::{StructureFile, StructureKind};

#[derive(Parser)]
#[command(
    name = "ritz-bounds",
    version,
    about = "Residual-based error bounds for Ritz values and approximate singular values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment scenario and write its CSV report.
    Run(RunArgs),
    /// Evaluate bounds for a structure file of approximate values and
    /// residual norms.
    Bound(BoundArgs),
    /// List the available scenarios and their default configurations.
    ListScenarios,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario name; see `list-scenarios`.
    #[arg(long)]
    scenario: String,
    /// Matrix order (columns for the rectangular scenarios).
    #[arg(long)]
    n: Option<usize>,
    /// Rows for the rectangular scenarios; tail dimension for `sharpness`.
    #[arg(long)]
    m: Option<usize>,
    /// Trial-subspace size / number of approximate values.
    #[arg(long)]
    k: Option<usize>,
    /// Ritz pairs kept by `eig_lanczos`.
    #[arg(long)]
    keep: Option<usize>,
    /// Iterations for the iterative subspace builders.
    #[arg(long)]
    iters: Option<usize>,
    /// Power passes for the sketched scenarios (1 or 2).
    #[arg(long)]
    power_passes: Option<u32>,
    /// Condition number of the geometric test matrix.
    #[arg(long)]
    kappa: Option<f64>,
    /// Seed; identical seeds give byte-identical CSV.
    #[arg(long)]
    seed: Option<u64>,
    /// Gap mode: exact, approximate, or both [default: both].
    #[arg(long)]
    gap_mode: Option<String>,
    /// Output CSV path; stdout when omitted. Run metadata goes to
    /// `<out>.meta` (or stderr for stdout output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Structure file (JSON: kind, theta, residual_norms_e,
    /// residual_norms_f, optional tail_spectrum / norm_e / norm_f).
    #[arg(long)]
    input: PathBuf,
    /// Gap mode: exact, approximate, or both. Default: exact when the file
    /// has a tail spectrum, else approximate.
    #[arg(long)]
    gap_mode: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bound(args) => cmd_bound(args),
        Command::ListScenarios => cmd_list_scenarios(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err
                .downcast_ref::<ritz_bounds::Error>()
                .map(|e| matches!(e, ritz_bounds::Error::Config(_)))
                .unwrap_or(false);
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let scenario: Scenario = args.scenario.parse()?;
    let mut cfg = ExperimentConfig::defaults(scenario);
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(keep) = args.keep {
        cfg.keep = keep;
    }
    if let Some(iters) = args.iters {
        cfg.iters = iters;
    }
    if let Some(p) = args.power_passes {
        cfg.power_passes = p;
    }
    if let Some(kappa) = args.kappa {
        cfg.kappa = kappa;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = &args.gap_mode {
        cfg.gap_mode = mode.parse::<GapChoice>()?;
    }
    cfg.validate()?;

    let run = run_experiment(&cfg)?;
    match &args.out {
        Some(path) => {
            write_csv_file(&run.table, path)?;
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta");
            run.metadata.save(meta_path.as_ref())?;
        }
        None => {
            let stdout = std::io::stdout();
            emit_csv(&run.table, &mut stdout.lock())?;
            eprint!("{}", run.metadata.render());
        }
    }
    Ok(())
}

fn parse_bound_mode(s: &str) -> anyhow::Result<Vec<GapMode>> {
    Ok(match s.parse::<GapChoice>()? {
        GapChoice::Exact => vec![GapMode::Exact],
        GapChoice::Approximate => vec![GapMode::Approximate],
        GapChoice::Both => vec![GapMode::Exact, GapMode::Approximate],
    })
}

fn cmd_bound(args: BoundArgs) -> anyhow::Result<()> {
    let file = StructureFile::load(&args.input)?;
    let modes = match &args.gap_mode {
        Some(s) => parse_bound_mode(s)?,
        None => {
            if file.has_tail() {
                vec![GapMode::Exact]
            } else {
                vec![GapMode::Approximate]
            }
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for mode in modes {
        let reports = file.evaluate(mode)?;
        writeln!(out, "gap mode: {mode}")?;
        print_report_table(&mut out, file.kind, &reports)?;
    }
    Ok(())
}

fn fmt_bound(b: Option<BoundValue>) -> String {
    match b.and_then(|b| b.value()) {
        Some(v) => format!("{v:.6e}"),
        None => "n/a".to_string(),
    }
}

fn print_report_table(
    out: &mut dyn Write,
    kind: StructureKind,
    reports: &[BoundReport],
) -> std::io::Result<()> {
    let headers: Vec<&str> = match kind {
        StructureKind::Symmetric => vec![
            "index",
            "theta",
            "residual_e",
            "thm_main",
            "thm_cluster",
            "weyl",
            "lili",
            "asymptotic",
        ],
        StructureKind::Svd => vec![
            "index",
            "theta",
            "residual_e",
            "residual_f",
            "thm_svd",
            "weyl",
            "lili",
            "offdiag",
            "asymptotic",
        ],
    };
    let mut rows: Vec<Vec<String>> = vec![headers.iter().map(|s| s.to_string()).collect()];
    for r in reports {
        let mut row = vec![
            r.index.to_string(),
            format!("{:.6e}", r.theta),
            format!("{:.6e}", r.residual_e),
        ];
        match kind {
            StructureKind::Symmetric => {
                row.push(fmt_bound(r.bounds.thm_main));
                row.push(fmt_bound(r.bounds.thm_cluster));
            }
            StructureKind::Svd => {
                row.push(format!("{:.6e}", r.residual_f.unwrap_or(f64::NAN)));
                row.push(fmt_bound(r.bounds.thm_svd));
            }
        }
        row.push(fmt_bound(r.bounds.weyl));
        row.push(fmt_bound(r.bounds.lili));
        if kind == StructureKind::Svd {
            row.push(fmt_bound(r.bounds.offdiag_quadratic));
        }
        row.push(fmt_bound(r.bounds.asymptotic));
        rows.push(row);
    }

    let ncols = rows[0].len();
    let widths: Vec<usize> = (0..ncols)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:>w$}"))
            .collect();
        writeln!(out, "{}", line.join("  "))?;
    }
    Ok(())
}

fn cmd_list_scenarios() -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "available scenarios:\n")?;
    for s in Scenario::all() {
        let d = ExperimentConfig::defaults(s);
        let p = ExperimentConfig::full_scale(s);
        writeln!(out, "{:14} {}", s.name(), s.description())?;
        writeln!(
            out,
            "{:14}   defaults: n={} m={} k={} keep={} iters={} power-passes={} kappa={:.0e} seed={}",
            "", d.n, d.m, d.k, d.keep, d.iters, d.power_passes, d.kappa, d.seed
        )?;
        writeln!(
            out,
            "{:14}   full-size (slow): n={} m={} k={} keep={} iters={} kappa={:.0e}",
            "", p.n, p.m, p.k, p.keep, p.iters, p.kappa
        )?;
    }
    Ok(())
}
