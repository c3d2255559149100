use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use tonestack_core::netlist::{self, apply_override};
use tonestack_core::oracle::nodal_response_terminated;
use tonestack_core::response::{response_point, sweep_values};
use tonestack_core::{
    frequency_response, AnalysisOptions, ConfigDocument, Control, ControlSettings, Error,
    OutputMode, ParseError, ResponseCurve, SignConvention,
};

use crate::{csv_out, svg};

#[derive(Debug, Parser)]
#[command(
    name = "tonestack",
    version,
    about = "Fender 5F6-A tone stack frequency response"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Response of a single control setting.
    Response {
        #[command(flatten)]
        input: InputArgs,
        /// CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Also write a semilog SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// One curve per value of a swept control.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Control to sweep; defaults to the config's `sweep` entry.
        #[arg(long)]
        control: Option<Control>,
        /// Sweep step in (0, 1]; defaults to the config's `sweep` entry or 0.1.
        #[arg(long)]
        step: Option<f64>,
        /// Output directory, created if missing.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Cross-check the mesh solution against nodal analysis.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        /// Control values per axis; the grid has density³ settings.
        #[arg(long, default_value_t = 5)]
        grid_density: usize,
        /// Maximum allowed relative deviation.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Configuration file; stock values are used when omitted.
    pub config: Option<PathBuf>,
    /// `key=value` override applied after the config file (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Failure classes and their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or I/O problem: exit 1.
    Input(String),
    /// Solver failure: exit 2.
    Numerical(String),
    /// Mesh/nodal deviation above tolerance: exit 3.
    Comparison(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Comparison(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::Comparison(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => CliError::Input(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn positioned(file: &str, e: &ParseError) -> CliError {
    CliError::Input(format!("{file}:{}:{}: {}", e.line, e.column, e.message))
}

pub fn load_config(input: &InputArgs) -> Result<ConfigDocument, CliError> {
    let mut doc = match &input.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            netlist::parse(&text).map_err(|e| positioned(&path.display().to_string(), &e))?
        }
        None => ConfigDocument::new(),
    };
    for (k, text) in input.overrides.iter().enumerate() {
        apply_override(&mut doc, text).map_err(|e| positioned(&format!("--set[{}]", k + 1), &e))?;
    }
    Ok(doc)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn settings_label(c: &ControlSettings) -> String {
    format!("t={} m={} b={}", c.t(), c.m(), c.b())
}

pub fn cmd_response(
    input: &InputArgs,
    out: &Path,
    svg_path: Option<&Path>,
) -> Result<(), CliError> {
    let doc = load_config(input)?;
    let grid = doc.frequency_grid()?;
    let curve = frequency_response(
        &doc.components,
        &doc.controls,
        &grid,
        doc.vin,
        &doc.options(),
    )?;
    csv_out::write_curve(out, &curve).map_err(|e| io_error(out, e))?;
    if let Some(path) = svg_path {
        let plot = svg::render(
            "Modelled response",
            &[(settings_label(&doc.controls), &curve)],
        );
        write_atomic(path, plot.as_bytes()).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

pub fn sweep_file_name(control: Control, value: f64) -> String {
    format!("{control}_{value:.2}.csv")
}

pub fn cmd_sweep(
    input: &InputArgs,
    control: Option<Control>,
    step: Option<f64>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let doc = load_config(input)?;
    let control = control.or(doc.sweep.map(|s| s.control)).ok_or_else(|| {
        CliError::Input("no control to sweep: pass --control or set `sweep` in the config".into())
    })?;
    let step = step.or(doc.sweep.map(|s| s.step)).unwrap_or(0.1);
    let values = sweep_values(step)?;
    let grid = doc.frequency_grid()?;
    let options = doc.options();

    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;

    let curves = values
        .par_iter()
        .map(|&v| -> Result<ResponseCurve, CliError> {
            let controls = doc.controls.with(control, v)?;
            let curve = frequency_response(&doc.components, &controls, &grid, doc.vin, &options)?;
            let path = out_dir.join(sweep_file_name(control, v));
            csv_out::write_curve(&path, &curve).map_err(|e| io_error(&path, e))?;
            Ok(curve)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let labelled: Vec<_> = values
        .iter()
        .zip(&curves)
        .map(|(v, c)| (format!("{control} = {v:.2}"), c))
        .collect();
    let plot = svg::render(&format!("Modelled response, {control} swept"), &labelled);
    let svg_path = out_dir.join(format!("{control}_sweep.svg"));
    write_atomic(&svg_path, plot.as_bytes()).map_err(|e| io_error(&svg_path, e))?;
    Ok(())
}

/// Worst mesh/nodal deviation found by [`cmd_compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub relative: f64,
    pub frequency: f64,
    pub controls: ControlSettings,
}

/// Largest relative deviation between the mesh and nodal solutions over the
/// control grid, with per-setting maxima reported through `report`.
pub fn compare_grid(
    doc: &ConfigDocument,
    density: usize,
    mut report: impl FnMut(&ControlSettings, f64),
) -> Result<Deviation, CliError> {
    if density < 2 {
        return Err(CliError::Input(format!(
            "grid density must be at least 2, got {density}"
        )));
    }
    let grid = doc.frequency_grid()?;
    let options = AnalysisOptions {
        convention: SignConvention::Physical,
        mode: OutputMode::ComplexSum,
        ..doc.options()
    };
    let axis: Vec<f64> = (0..density)
        .map(|k| k as f64 / (density - 1) as f64)
        .collect();
    let mut worst: Option<Deviation> = None;
    for &t in &axis {
        for &m in &axis {
            for &b in &axis {
                let controls = ControlSettings::new(t, m, b)?;
                let resistive = options.taper.map_controls(&controls);
                let mut local: f64 = 0.0;
                for &f in grid.points() {
                    let mesh =
                        response_point(&doc.components, &controls, f, doc.vin, &options)?.vout;
                    let nodal = nodal_response_terminated(
                        &doc.components,
                        &resistive,
                        f,
                        doc.vin,
                        &options.termination,
                    )?;
                    let dev = (mesh - nodal).norm() / nodal.norm();
                    local = local.max(dev);
                    if worst.is_none_or(|w| dev > w.relative) {
                        worst = Some(Deviation {
                            relative: dev,
                            frequency: f,
                            controls,
                        });
                    }
                }
                report(&controls, local);
            }
        }
    }
    Ok(worst.expect("non-empty grid"))
}

pub fn cmd_compare(input: &InputArgs, density: usize, tolerance: f64) -> Result<(), CliError> {
    let doc = load_config(input)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let worst = compare_grid(&doc, density, |c, dev| {
        let _ = writeln!(
            out,
            "t={:.4} m={:.4} b={:.4} max_rel_dev={dev:e}",
            c.t(),
            c.m(),
            c.b()
        );
    })?;
    let c = worst.controls;
    let summary = format!(
        "worst relative deviation {:e} at f={} Hz, t={}, m={}, b={} (tolerance {tolerance:e})",
        worst.relative,
        worst.frequency,
        c.t(),
        c.m(),
        c.b()
    );
    if worst.relative <= tolerance {
        let _ = writeln!(out, "{summary}");
        Ok(())
    } else {
        Err(CliError::Comparison(summary))
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Response { input, out, svg } => cmd_response(input, out, svg.as_deref()),
        Command::Sweep {
            input,
            control,
            step,
            out_dir,
        } => cmd_sweep(input, *control, *step, out_dir),
        Command::Compare {
            input,
            grid_density,
            tolerance,
        } => cmd_compare(input, *grid_density, *tolerance),
    }
}

pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tonestack: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
