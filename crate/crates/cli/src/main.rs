//! `qfield` command-line front end.
//!
//! Everything a run needs lives in one JSON config; flags only pick the
//! config, the output path and verbosity. Exit codes: 0 success, 1 failed
//! checks, 2 usage, config or I/O errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use qfield::config::{default_verify_config, parse_config, RunConfig};
use qfield::hamiltonian::energy_expectation;
use qfield::maxwell3d::FieldModel3D;
use qfield::numfmt::g17;
use qfield::observables::{
    field_profile, write_profile_csv, CsvLayout, FieldModel, FieldModel1D, Vec3,
};
use qfield::verify::run_suite;
use qfield::{ModeId, ModeUniverse, MultiModeState};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "qfield",
    version,
    about = "Quantized field simulation and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run config; the built-in 1D verification config when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; overrides the config's output path. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress output on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the field-profile CSV of the configured state.
    Simulate(Common),
    /// Run the configured checks and write the JSON report.
    Verify(Common),
    /// Write the mode table as CSV.
    Modes(Common),
    /// Write occupancy statistics of the configured state as JSON.
    DescribeState(Common),
    /// Print the effective config as JSON.
    Config(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("QFIELD_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("QFIELD_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn load(common: &Common) -> Result<RunConfig> {
    let Some(path) = &common.config else {
        return Ok(default_verify_config());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).map_err(|issues| {
        let lines: Vec<String> = issues.iter().map(|i| format!("  {i}")).collect();
        anyhow!("invalid config {}:\n{}", path.display(), lines.join("\n"))
    })
}

fn emit(target: Option<&Path>, body: &[u8]) -> Result<()> {
    match target {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate(c) => {
            let config = load(&c)?;
            let csv = simulate(&config)?;
            emit(c.out.as_deref().or(config.outputs.csv.as_deref()), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(c) => {
            let config = load(&c)?;
            let report = run_suite(&config)?;
            if !c.quiet {
                for r in &report.results {
                    let verdict = if r.pass { "PASS" } else { "FAIL" };
                    eprintln!(
                        "{verdict} {} rel={:e} tol={:e}",
                        r.check,
                        r.relative_residual(),
                        r.tolerance
                    );
                }
            }
            emit(
                c.out.as_deref().or(config.outputs.report.as_deref()),
                report.to_json().as_bytes(),
            )?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Modes(c) => {
            let config = load(&c)?;
            emit(c.out.as_deref(), &mode_table(&config)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DescribeState(c) => {
            let config = load(&c)?;
            emit(c.out.as_deref(), describe_state(&config)?.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Config(c) => {
            let config = load(&c)?;
            emit(c.out.as_deref(), config.to_json().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(config: &RunConfig) -> Result<Vec<u8>> {
    let medium = config.medium.build()?;
    let universe = config.universe()?;
    let state = config.build_state()?;
    let times = config.sampling.t.values();
    let sq = config.sampling.with_squares;
    let mut buf = Vec::new();
    match universe {
        ModeUniverse::Line(grid) => {
            let axis = config
                .sampling
                .x
                .ok_or_else(|| anyhow!("sampling.x is required for a 1d grid"))?;
            let xs: Vec<Vec3> = axis
                .values()
                .into_iter()
                .map(|x| Vec3::new(x, 0.0, 0.0))
                .collect();
            let model = FieldModel1D::new(medium, grid);
            write_profile_csv(
                &mut buf,
                &field_profile(&model, &state, &xs, &times, sq)?,
                CsvLayout::Line,
            )?;
        }
        ModeUniverse::Lattice(grid) => {
            let Some(points) = &config.sampling.points else {
                bail!("sampling.points is required for a 3d grid");
            };
            let rs: Vec<Vec3> = points.iter().map(|p| Vec3::from(*p)).collect();
            let model = FieldModel3D::new(medium, grid);
            write_profile_csv(
                &mut buf,
                &field_profile(&model, &state, &rs, &times, sq)?,
                CsvLayout::Space,
            )?;
        }
    }
    Ok(buf)
}

fn mode_table(config: &RunConfig) -> Result<Vec<u8>> {
    let medium = config.medium.build()?;
    let universe = config.universe()?;
    let mut out = String::new();
    let origin = Vec3::zeros();
    match universe {
        ModeUniverse::Line(grid) => {
            let model = FieldModel1D::new(medium, grid);
            out.push_str("index,label,X,lambda,omega,k,abs_f\n");
            for m in 0..grid.mode_count() {
                let id = ModeId::from_index(&grid, m)?;
                let c = model.coefficient(m, &origin);
                out.push_str(&format!(
                    "{m},{},{:?},{},{},{},{}\n",
                    id.label(&grid),
                    id.direction,
                    id.polarization.number(),
                    g17(grid.omega(id.freq_index)),
                    g17(model.wavenumber(id.freq_index)),
                    g17(c.f.norm()),
                ));
            }
        }
        ModeUniverse::Lattice(grid) => {
            let model = FieldModel3D::new(medium, grid);
            out.push_str("index,label,kx,ky,kz,lambda,omega,k,abs_f\n");
            for m in 0..grid.mode_count() {
                let (kp, pol) = grid.mode_at(m);
                let k = grid.wave_vector(kp);
                out.push_str(&format!(
                    "{m},{},{},{},{},{},{},{},{}\n",
                    universe.label(m)?,
                    g17(k.x),
                    g17(k.y),
                    g17(k.z),
                    pol.number(),
                    g17(model.omega(&k)),
                    g17(k.norm()),
                    g17(model.coefficient(m, &origin).f.norm()),
                ));
            }
        }
    }
    Ok(out.into_bytes())
}

fn describe_state(config: &RunConfig) -> Result<String> {
    let medium = config.medium.build()?;
    let state: MultiModeState = config.build_state()?;
    let universe = *state.universe();
    let modes = state
        .active_modes()
        .into_iter()
        .map(|m| {
            Ok(json!({ "mode": universe.label(m)?, "mean_occupation": state.mean_occupation(m) }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_total: f64 = state
        .active_modes()
        .iter()
        .map(|&m| state.mean_occupation(m))
        .sum();
    let doc = json!({
        "norm_sqr": state.norm_sqr(),
        "basis_states": state.len(),
        "n_max": state.n_max(),
        "max_occupation": state.max_occupation(),
        "mean_photon_number": mean_total,
        "modes": modes,
        "energy": energy_expectation(&state, &medium, true)?,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
