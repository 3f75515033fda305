use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hidden_corr::correlations::CorrelationReport;
use hidden_corr::experiment::{
    figure1_dataset, records_to_csv, run_trajectory_scan, Mode, ScanConfig,
};
use hidden_corr::filtering::{
    compute_normal_form_filters, hidden_measures, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use hidden_corr::io::{self, fmt_f64, FilterRecord};
use hidden_corr::{Error, Result};

/// Collective-decoherence dynamics of two qubits and their standard and
/// hidden quantum correlations.
#[derive(Parser)]
#[command(name = "hidden-corr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a Werner state and write the trajectory as CSV.
    Evolve(EvolveArgs),
    /// Print standard and hidden correlation measures of a state file.
    Correlations {
        #[arg(long)]
        state: PathBuf,
    },
    /// Compute local filters reaching the Bell-diagonal normal form.
    NormalForm {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Run a parameter scan from a key=value config; flags override the file.
    Scan(ScanArgs),
    /// Write the Figure 1 data set (one CSV per p plus a summary).
    Figure1 {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct NumericArgs {
    /// Integrate the full master equation instead of the closed form.
    #[arg(long)]
    numeric: bool,
    #[arg(long = "V")]
    v: Option<f64>,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long)]
    omega2: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    tau_max: f64,
    #[arg(long)]
    samples: usize,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated mixing parameters.
    #[arg(long)]
    p_values: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Output CSV; defaults to output_path from the config, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl NumericArgs {
    fn apply(&self, cfg: &mut ScanConfig) -> Result<()> {
        if self.numeric {
            cfg.set("mode", "numeric")?;
        }
        let pairs = [
            ("V", self.v),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("step", self.step),
        ];
        for (key, v) in pairs {
            if let Some(v) = v {
                cfg.set(key, &v.to_string())?;
            }
        }
        Ok(())
    }
}

fn evolve(args: &EvolveArgs) -> Result<()> {
    let mut cfg = ScanConfig {
        p_values: vec![args.p],
        k: args.k,
        tau_max: args.tau_max,
        samples: args.samples,
        mode: Mode::AnalyticFamily,
        output_path: Some(args.out.clone()),
        seed: 0,
    };
    args.numeric.apply(&mut cfg)?;
    let records = run_trajectory_scan(&cfg)?;
    io::write_text(&args.out, &records_to_csv(&records))
}

fn correlations(state: &PathBuf) -> Result<()> {
    let rho = io::read_state_file(state)?;
    let std = CorrelationReport::of(&rho);
    let hid = hidden_measures(&rho)?;
    let mut out = std.to_key_value();
    out.push_str(&io::write_key_value(
        hid.fields().into_iter().map(|(k, v)| (k, fmt_f64(v))),
    ));
    out.push_str(&format!("normal_form_exists={}\n", hid.normal_form_exists));
    print!("{out}");
    Ok(())
}

fn normal_form(state: &PathBuf, out: &PathBuf, tol: f64, max_iter: usize) -> Result<()> {
    let rho = io::read_state_file(state)?;
    let nf = compute_normal_form_filters(&rho, tol, max_iter)?;
    let rec = FilterRecord {
        filters: nf.filters,
        p_succ: nf.p_succ,
        converged: nf.converged,
        normal_form: nf.rho_normal,
    };
    io::write_text(out, &io::filters_to_json(&rec))?;
    if !nf.converged {
        return Err(Error::Numerical(format!(
            "normal form iteration did not converge after {} iterations (best iterate written)",
            nf.iterations
        )));
    }
    Ok(())
}

fn scan(args: &ScanArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::Io {
        path: args.config.clone(),
        source: e,
    })?;
    let mut cfg = ScanConfig::default();
    cfg.apply_key_value(&text)
        .map_err(|e| e.context(format!("config {}", args.config.display())))?;
    if let Some(p) = &args.p_values {
        cfg.set("p_values", p)?;
    }
    for (key, v) in [("k", args.k), ("tau_max", args.tau_max)] {
        if let Some(v) = v {
            cfg.set(key, &v.to_string())?;
        }
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    args.numeric.apply(&mut cfg)?;
    if let Some(out) = &args.out {
        cfg.output_path = Some(out.clone());
    }
    let csv = records_to_csv(&run_trajectory_scan(&cfg)?);
    match &cfg.output_path {
        Some(path) => io::write_text(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(args) => evolve(&args),
        Command::Correlations { state } => correlations(&state),
        Command::NormalForm {
            state,
            out,
            tol,
            max_iter,
        } => normal_form(&state, &out, tol, max_iter),
        Command::Scan(args) => scan(&args),
        Command::Figure1 { out } => {
            let summary = figure1_dataset(&out)?;
            print!("{}", summary.to_csv());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation errors; help and version are not errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
