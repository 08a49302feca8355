use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use teleport_core::channels::{ChannelKind, ChannelRealization, DensityForm};
use teleport_core::experiments::{
    audit_formulas, compare_channels, emit_figures, figure_config, parse_key_values, sweep,
    write_sweep_csv, AuditConfig, ExperimentError, FigureFormat, R0Choice, Result, SweepConfig,
};
use teleport_core::protocol::{
    correction_for, run_branch, BellOutcome, CharlieBasis, CharlieOutcome, InfoQubit, ProtocolError,
};
use teleport_core::qmath::DensityOperator;
use teleport_core::rindler::{AccelerationParam, RegisterAcceleration};

/// Teleportation through W, GHZ and GHZ-like channels whose qubits are
/// uniformly accelerated.
#[derive(Debug, Parser)]
#[command(name = "teleport", version)]
struct Cli {
    /// Flat key=value file; keys are long flag names. Flags on the command
    /// line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a channel density matrix.
    State {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        r2: Option<f64>,
        #[arg(long)]
        r3: Option<f64>,
        /// oracle or closed
        #[arg(long)]
        form: Option<String>,
    },
    /// Run one measurement branch.
    Teleport {
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        alpha_sq: Option<f64>,
        /// Acceleration of the information qubit; omit for an inertial one.
        #[arg(long)]
        r0: Option<f64>,
        /// Common acceleration of the three channel qubits.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        bell: Option<String>,
        #[arg(long)]
        charlie: Option<String>,
    },
    /// Sweep the common channel acceleration and write CSV.
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Also write the figure panels (fig2a ... fig4b).
        #[arg(long)]
        figures: bool,
        /// Render the panels as SVG too.
        #[arg(long)]
        svg: bool,
    },
    /// Audit the printed closed forms against the oracle.
    Audit {
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Compare the three channels over a sweep.
    Compare {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// w, ghz, ghz_like, a comma list, or all
    #[arg(long)]
    channel: Option<String>,
    /// non_accelerated, accelerated or both
    #[arg(long)]
    info_kind: Option<String>,
    /// Comma list of r0 values; `r` tracks the channel acceleration.
    #[arg(long)]
    r0: Option<String>,
    #[arg(long)]
    grid_start: Option<String>,
    #[arg(long)]
    grid_stop: Option<String>,
    #[arg(long)]
    grid_step: Option<String>,
    #[arg(long)]
    alpha_sq: Option<String>,
    /// plotted_branch, all_branches or average
    #[arg(long)]
    branches: Option<String>,
}

impl SweepArgs {
    fn pairs(&self) -> [(&'static str, &Option<String>); 8] {
        [
            ("channel", &self.channel),
            ("info-kind", &self.info_kind),
            ("r0", &self.r0),
            ("grid-start", &self.grid_start),
            ("grid-stop", &self.grid_stop),
            ("grid-step", &self.grid_step),
            ("alpha-sq", &self.alpha_sq),
            ("branches", &self.branches),
        ]
    }
}

const KNOWN_KEYS: &[&str] = &[
    "alpha-sq",
    "bell",
    "branches",
    "channel",
    "charlie",
    "form",
    "grid-start",
    "grid-step",
    "grid-stop",
    "info-kind",
    "out",
    "r",
    "r0",
    "r1",
    "r2",
    "r3",
    "tolerance",
];

/// Config-file values, consumed key by key so leftovers can be reported.
struct FileSettings(BTreeMap<String, String>);

impl FileSettings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self(BTreeMap::new()));
        };
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
        Ok(Self(parse_key_values(&text)?))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    /// The CLI value if given, else the file value. Consumes the key either way.
    fn pick(&mut self, cli: Option<String>, key: &str) -> Option<String> {
        let from_file = self.take(key);
        cli.or(from_file)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| ExperimentError::config(format!("{key}: not a number: {v:?}")))
            })
            .transpose()
    }

    /// Keys other subcommands use are skipped with a note; anything else is
    /// an error.
    fn finish(self) -> Result<()> {
        for k in self.0.keys() {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(ExperimentError::config(format!("unknown config key {k:?}")));
            }
            eprintln!("note: config key {k:?} ignored by this command");
        }
        Ok(())
    }
}

fn path_string(p: PathBuf) -> String {
    p.to_string_lossy().into_owned()
}

fn param(name: &str, r: f64) -> Result<AccelerationParam> {
    AccelerationParam::new(r).map_err(|e| ExperimentError::config(format!("{name}: {e}")))
}

fn parse_arg<T: std::str::FromStr>(name: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| ExperimentError::config(format!("{name}: {e}")))
}

fn sweep_config(args: &SweepArgs, file: &mut FileSettings) -> Result<SweepConfig> {
    let mut config = SweepConfig::default();
    for (key, cli) in args.pairs() {
        if let Some(v) = file.pick(cli.clone(), key) {
            config.set(key, &v)?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> Result<Box<dyn Write>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    }
    let f = fs::File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    Ok(Box::new(io::BufWriter::new(f)))
}

fn output(path: Option<&Path>) -> Result<(Box<dyn Write>, PathBuf)> {
    match path {
        Some(p) => Ok((create(p)?, p.to_path_buf())),
        None => Ok((Box::new(io::stdout().lock()), PathBuf::from("<stdout>"))),
    }
}

fn print_matrix(out: &mut impl Write, rho: &DensityOperator) -> io::Result<()> {
    for row in 0..rho.dim() {
        let cells: Vec<String> = (0..rho.dim())
            .map(|col| {
                let z = rho.entry(row, col);
                format!("{:+.8}{:+.8}i", z.re, z.im)
            })
            .collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

fn cmd_state(
    channel: Option<String>,
    r: [Option<f64>; 3],
    form: Option<String>,
    file: &mut FileSettings,
) -> Result<()> {
    let channel: ChannelKind = parse_arg(
        "channel",
        &file.pick(channel, "channel").unwrap_or("ghz".into()),
    )?;
    let mut values = [0.0; 3];
    for (i, v) in r.into_iter().enumerate() {
        let key = format!("r{}", i + 1);
        let from_file = file.take_f64(&key)?;
        values[i] = v.or(from_file).unwrap_or(0.0);
        param(&key, values[i])?;
    }
    let form: DensityForm = parse_arg("form", &file.pick(form, "form").unwrap_or("oracle".into()))?;
    let acc = RegisterAcceleration::from_values(&values)?;
    let realization = ChannelRealization::new(channel, acc)?;
    let rho = realization.density(form);
    let v = rho.validity();
    let path = PathBuf::from("<stdout>");
    let io_err = |e| ExperimentError::io(&path, e);
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "channel {} r = {values:?} form {}",
        channel.tag(),
        match form {
            DensityForm::Oracle => "oracle",
            DensityForm::Closed => "closed",
        }
    )
    .map_err(io_err)?;
    print_matrix(&mut out, rho).map_err(io_err)?;
    writeln!(
        out,
        "hermitian_deviation {:.3e} min_eigenvalue {:.3e} trace {:.12}",
        v.hermitian_deviation, v.min_eigenvalue, v.trace.re
    )
    .map_err(io_err)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_teleport(
    channel: Option<String>,
    alpha_sq: Option<f64>,
    r0: Option<f64>,
    r: Option<f64>,
    bell: Option<String>,
    charlie: Option<String>,
    file: &mut FileSettings,
) -> Result<()> {
    let channel: ChannelKind = parse_arg(
        "channel",
        &file.pick(channel, "channel").unwrap_or("ghz".into()),
    )?;
    let alpha_sq = alpha_sq.or(file.take_f64("alpha-sq")?).unwrap_or(0.5);
    let r0 = r0
        .or(file.take_f64("r0")?)
        .map(|v| param("r0", v))
        .transpose()?;
    let r = param("r", r.or(file.take_f64("r")?).unwrap_or(0.0))?;
    let bell: BellOutcome = parse_arg(
        "bell",
        &file.pick(bell, "bell").unwrap_or("psi_plus".into()),
    )?;
    let default_charlie = CharlieBasis::for_channel(channel).outcomes()[0]
        .tag()
        .to_string();
    let charlie: CharlieOutcome = parse_arg(
        "charlie",
        &file.pick(charlie, "charlie").unwrap_or(default_charlie),
    )?;
    let rule = correction_for(channel, bell, charlie)
        .map_err(|e| ExperimentError::config(e.to_string()))?;
    let info = InfoQubit::from_alpha_sq(alpha_sq, r0)
        .map_err(|e| ExperimentError::config(e.to_string()))?;
    let realization = ChannelRealization::new(channel, RegisterAcceleration::uniform(3, r))?;

    let path = PathBuf::from("<stdout>");
    let io_err = |e| ExperimentError::io(&path, e);
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "channel {} alpha_sq {alpha_sq} r0 {} r {} bell {bell} charlie {charlie}",
        channel.tag(),
        r0.map_or("-".to_string(), |p| p.r().to_string()),
        r.r()
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "correction {} valid {}",
        rule.pauli.symbol(),
        rule.valid
    )
    .map_err(io_err)?;
    match run_branch(&realization, &info, bell, charlie, DensityForm::Oracle) {
        Ok(res) => {
            writeln!(out, "probability {:.12}", res.probability).map_err(io_err)?;
            writeln!(out, "fidelity_oracle {:.12}", res.fidelity_oracle).map_err(io_err)?;
            match res.fidelity_closed {
                Some(f) => writeln!(out, "fidelity_closed {f:.12}"),
                None => writeln!(out, "fidelity_closed -"),
            }
            .map_err(io_err)?;
            writeln!(out, "rho_bob").map_err(io_err)?;
            print_matrix(&mut out, &res.rho_bob).map_err(io_err)?;
        }
        Err(ProtocolError::ImpossibleBranch { probability, .. }) => {
            writeln!(out, "probability {probability:.3e} (branch never occurs)").map_err(io_err)?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cmd_sweep(
    args: &SweepArgs,
    out: Option<PathBuf>,
    figures: bool,
    svg: bool,
    file: &mut FileSettings,
) -> Result<()> {
    let config = sweep_config(args, file)?;
    let dir = file
        .pick(out.map(path_string), "out")
        .map(PathBuf::from)
        .ok_or_else(|| ExperimentError::config("sweep needs --out DIR"))?;
    fs::create_dir_all(&dir).map_err(|e| ExperimentError::io(&dir, e))?;

    let records = sweep(&config)?;
    let path = dir.join("sweep.csv");
    let mut w = create(&path)?;
    write_sweep_csv(&mut w, &records).map_err(|e| ExperimentError::io(&path, e))?;
    w.flush().map_err(|e| ExperimentError::io(&path, e))?;
    eprintln!("wrote {} rows to {}", records.len(), path.display());

    if figures || svg {
        let fixed: Vec<f64> = config
            .r0_values
            .iter()
            .filter_map(|c| match c {
                R0Choice::Fixed(p) => Some(p.r()),
                R0Choice::TrackChannel => None,
            })
            .collect();
        let fig_records = sweep(&figure_config(config.grid, config.alpha_sq, &fixed)?)?;
        let format = if svg {
            FigureFormat::CsvAndSvg
        } else {
            FigureFormat::Csv
        };
        for p in emit_figures(&fig_records, format, &dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn cmd_audit(
    grid_step: Option<f64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    file: &mut FileSettings,
) -> Result<()> {
    let step = grid_step.or(file.take_f64("grid-step")?).unwrap_or(0.1);
    let tolerance = tolerance.or(file.take_f64("tolerance")?).unwrap_or(1e-10);
    let out = file.pick(out.map(path_string), "out").map(PathBuf::from);
    let audit = audit_formulas(&AuditConfig::with_step(step, tolerance)?)?;
    let (mut w, path) = output(out.as_deref())?;
    audit
        .write_report(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| ExperimentError::io(&path, e))
}

fn cmd_compare(args: &SweepArgs, out: Option<PathBuf>, file: &mut FileSettings) -> Result<()> {
    let config = sweep_config(args, file)?;
    let out = file.pick(out.map(path_string), "out").map(PathBuf::from);
    let summary = compare_channels(&config)?;
    let (mut w, path) = output(out.as_deref())?;
    summary
        .write_report(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| ExperimentError::io(&path, e))
}

fn run(cli: Cli) -> Result<()> {
    let mut file = FileSettings::load(cli.config.as_deref())?;
    match cli.command {
        Command::State {
            channel,
            r1,
            r2,
            r3,
            form,
        } => cmd_state(channel, [r1, r2, r3], form, &mut file)?,
        Command::Teleport {
            channel,
            alpha_sq,
            r0,
            r,
            bell,
            charlie,
        } => cmd_teleport(channel, alpha_sq, r0, r, bell, charlie, &mut file)?,
        Command::Sweep {
            sweep,
            out,
            figures,
            svg,
        } => cmd_sweep(&sweep, out, figures, svg, &mut file)?,
        Command::Audit {
            grid_step,
            tolerance,
            out,
        } => cmd_audit(grid_step, tolerance, out, &mut file)?,
        Command::Compare { sweep, out } => cmd_compare(&sweep, out, &mut file)?,
    }
    file.finish()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
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
