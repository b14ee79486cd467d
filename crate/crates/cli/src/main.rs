use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use su11_cli::config::{Base, Format, Output};
use su11_cli::validate::{reference_configs, run_reference_suite, TOLERANCE};
use su11_cli::{evaluate_point, parse_config_file, run_sweep, write_csv, write_json, CliError, SweepSpec, Table};

/// Relative output paths are resolved under this directory when it is set.
const OUTPUT_DIR_VAR: &str = "SU11_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "su11", version, about = "Pumped-up SU(1,1) interferometer metrology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Finite-difference step in ε.
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<f64>,
    /// Evaluation point ε₀ of the number-sum sensitivity.
    #[arg(long, global = true)]
    eps0: Option<f64>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Numeric and closed-form QFI and the turning-point angle at the base point.
    Qfi,
    /// Number-sum sensitivity F0 and moments at the base point.
    Sensitivity,
    /// Evaluate the [sweep] grid.
    Sweep,
    /// Compare the pumped and original detector schemes ([gw] configs).
    GwCompare,
    /// Check the Gaussian pipeline against the Fock-space reference.
    Validate,
}

fn load(cli: &Cli) -> Result<SweepSpec, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Invalid("--config is required".into()))?;
    let mut spec = parse_config_file(path)?;
    if let Some(h) = cli.fd_step {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Invalid(format!("--fd-step must be positive, got {h}")));
        }
        spec.numerics.fd_step = h;
    }
    if let Some(e) = cli.eps0 {
        if !(e > 0.0 && e.is_finite()) {
            return Err(CliError::Invalid(format!("--eps0 must be positive, got {e}")));
        }
        spec.numerics.eps0 = e;
    }
    if let Some(f) = cli.format {
        spec.format = f;
    }
    if let Some(out) = &cli.out {
        spec.path = Some(out.clone());
    }
    Ok(spec)
}

fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(table: &Table, spec: &SweepSpec) -> Result<(), CliError> {
    let write = |w: &mut dyn Write| match spec.format {
        Format::Csv => write_csv(table, w),
        Format::Json => write_json(table, w),
    };
    match &spec.path {
        Some(p) => {
            let path = resolve_output(p);
            let io = |source| CliError::Io {
                path: path.clone(),
                source,
            };
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path).map_err(io)?);
            write(&mut file)?;
            file.flush().map_err(io)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

/// Evaluates the base point with a fixed set of outputs; a failed row is
/// a numerical failure. The config's output path belongs to sweeps, so only
/// `--out` redirects the result.
fn single_point(cli: &Cli, mut spec: SweepSpec, outputs: Vec<Output>) -> Result<(), CliError> {
    spec.path = cli.out.clone();
    if !spec.axes.is_empty() {
        log::warn!("ignoring [sweep]; use `su11 sweep` to evaluate the grid");
        spec.axes.clear();
    }
    spec.outputs = outputs;
    let row = evaluate_point(&spec, &[]);
    let error = row.error.clone();
    emit(
        &Table {
            columns: spec.columns(),
            rows: vec![row],
        },
        &spec,
    )?;
    match error {
        Some(e) => Err(CliError::Evaluation(e)),
        None => Ok(()),
    }
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    let step = cli.fd_step.unwrap_or(su11_cli::config::DEFAULT_STEP);
    let mut configs = reference_configs();
    if cli.config.is_some() {
        let spec = load(cli)?;
        match spec.base {
            Base::Interferometer(p) => {
                let c = p.config()?;
                configs.push(if spec.optimal_phases {
                    c.with_optimal_phases()
                } else {
                    c
                });
            }
            Base::Gw(_) => return Err(CliError::Invalid("validate takes an [interferometer] config".into())),
        }
    }
    let checks = run_reference_suite(&configs, step);
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: worst relative difference {:.2e}", c.label, c.worst);
        if let Some(d) = &c.detail {
            failed += 1;
            println!("     {d}");
        }
    }
    println!(
        "{} of {} reference checks within {TOLERANCE:e}",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        return Err(CliError::Evaluation(format!("{failed} reference checks failed")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate => validate(cli),
        Command::Sweep => {
            let spec = load(cli)?;
            let table = run_sweep(&spec, cli.workers)?;
            emit(&table, &spec)
        }
        Command::Qfi => single_point(cli, load(cli)?, vec![Output::HNumeric, Output::HClosed, Output::ThetaT]),
        Command::Sensitivity => single_point(cli, load(cli)?, vec![Output::F0, Output::Moments]),
        Command::GwCompare => {
            let spec = load(cli)?;
            if !spec.base.is_gw() {
                return Err(CliError::Invalid("gw-compare needs a [gw] section".into()));
            }
            single_point(cli, spec, vec![Output::HClosed, Output::Comparison, Output::Qcrb])
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("su11: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
