use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fcmi_core::explore::{run_trial, Environment, PlatformProfile, TrialConfig};
use fcmi_core::io::{read_grid, read_mi_map, write_grid, write_heatmap, write_mi_map};
use fcmi_core::{
    compute_mi_map, compute_mi_map_fxp, scaling_sweep, simulate, sweep_csv, ArchConfig, FcmiParams,
    FxpTables, MiMap, SensorConfig,
};

#[derive(Parser)]
#[command(
    name = "fcmi",
    version,
    about = "Occupancy-grid mutual information maps, fixed-point model and accelerator simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// MI map on the floating-point reference path.
    MiRef(MiArgs),
    /// MI map on the Q20.12 datapath model.
    MiFxp(MiArgs),
    /// Max and mean absolute difference of two min-max normalized MI maps.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Exit with status 1 when the max difference exceeds this.
        #[arg(long)]
        assert_max: Option<f64>,
    },
    /// Cycle-level simulation of one full map compute.
    Simulate {
        #[command(flatten)]
        input: GridArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the core (and bank) count of the config.
        #[arg(long)]
        cores: Option<usize>,
        /// Report CSV; the text summary always goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the simulated MI map.
        #[arg(long)]
        mi_out: Option<PathBuf>,
    },
    /// Latency and energy for several core counts, banks = cores.
    Sweep {
        #[command(flatten)]
        input: GridArgs,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        cores: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One exploration trial on a scene file.
    Explore {
        #[arg(long)]
        scene: PathBuf,
        /// fpga, gpu, i7, a57, fsmi-fpga or custom:<latency_s>:<energy_j>.
        #[arg(long, default_value = "fpga")]
        platform: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Caps how often MI computes may start.
        #[arg(long)]
        mi_rate_hz: Option<f64>,
        /// Trial log CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the robot's final map.
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
    /// Occupancy LUT and PWL exponential coefficients as raw integers.
    DumpTables {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(4..))]
    rays: u32,
}

#[derive(Args)]
struct MiArgs {
    #[command(flatten)]
    input: GridArgs,
    #[arg(long)]
    out: PathBuf,
    /// Rescale the map to [0, 1] before writing.
    #[arg(long)]
    normalize: bool,
    /// Also write an 8-bit PGM heatmap.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

/// A check requested on the command line did not hold.
#[derive(Debug)]
struct AssertionFailed(String);

impl std::fmt::Display for AssertionFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssertionFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<AssertionFailed>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ArchConfig> {
    Ok(match path {
        Some(p) => ArchConfig::read(p)?,
        None => ArchConfig::default(),
    })
}

fn mi_command(args: &MiArgs, fixed: bool) -> Result<()> {
    let grid = read_grid(&args.input.grid)?;
    let sensor = SensorConfig::new(args.input.rays as usize);
    let params = FcmiParams::default();
    let map: MiMap<f64> = if fixed {
        compute_mi_map_fxp(&grid, &sensor, &params).map(|v| v.to_real())
    } else {
        compute_mi_map(&grid, &sensor, &params)
    };
    let map = if args.normalize {
        map.normalized()
    } else {
        map
    };
    write_mi_map(&args.out, &map)?;
    if let Some(p) = &args.pgm {
        write_heatmap(p, &map)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    let params = FcmiParams::default();
    match command {
        Command::MiRef(args) => mi_command(&args, false),
        Command::MiFxp(args) => mi_command(&args, true),
        Command::Compare { a, b, assert_max } => {
            let ma: MiMap<f64> = read_mi_map(&a)?;
            let mb: MiMap<f64> = read_mi_map(&b)?;
            if ma.dims() != mb.dims() {
                bail!(
                    "dimension mismatch: {} is {}x{}, {} is {}x{}",
                    a.display(),
                    ma.dims().height,
                    ma.dims().width,
                    b.display(),
                    mb.dims().height,
                    mb.dims().width
                );
            }
            let (max, mean) = ma.normalized().abs_diff_stats(&mb.normalized())?;
            println!("max_abs_diff,{max}");
            println!("mean_abs_diff,{mean}");
            match assert_max {
                Some(limit) if !(max <= limit) => {
                    Err(AssertionFailed(format!("max_abs_diff {max} exceeds {limit}")).into())
                }
                _ => Ok(()),
            }
        }
        Command::Simulate {
            input,
            config,
            cores,
            out,
            mi_out,
        } => {
            let grid = read_grid(&input.grid)?;
            let mut cfg = load_config(config.as_deref())?;
            if let Some(n) = cores {
                cfg = ArchConfig {
                    n_cores: n,
                    n_banks: n,
                    ..cfg
                };
                cfg.validate()?;
            }
            let (map, report) = simulate(
                &grid,
                &SensorConfig::new(input.rays as usize),
                &params,
                &cfg,
            )?;
            print!("{}", report.summary());
            if let Some(p) = out {
                write_out(Some(&p), &report.to_csv())?;
            }
            if let Some(p) = mi_out {
                write_mi_map(p, &map.map(|v| v.to_real()))?;
            }
            Ok(())
        }
        Command::Sweep {
            input,
            config,
            cores,
            out,
        } => {
            if cores.contains(&0) {
                bail!("core counts must be positive");
            }
            let grid = read_grid(&input.grid)?;
            let cfg = load_config(config.as_deref())?;
            let rows = scaling_sweep(
                &grid,
                &SensorConfig::new(input.rays as usize),
                &params,
                &cfg,
                &cores,
            )?;
            write_out(out.as_deref(), &sweep_csv(&rows))
        }
        Command::Explore {
            scene,
            platform,
            seed,
            max_steps,
            mi_rate_hz,
            out,
            map_out,
        } => {
            let env = Environment::from_grid(&read_grid(&scene)?)?;
            let platform: PlatformProfile = platform.parse()?;
            let defaults = TrialConfig::default();
            let cfg = TrialConfig {
                max_steps: max_steps.unwrap_or(defaults.max_steps),
                mi_rate_hz,
                ..defaults
            };
            let log = run_trial(&env, &cfg, &params, &platform, seed)?;
            let last = log.last();
            eprintln!(
                "{}: {} steps, {} cells travelled, entropy {:.3} nats, {} MI computes, {:.6} J{}",
                log.platform,
                log.samples.len(),
                last.trajectory_cells,
                last.entropy_nats,
                last.mi_computes,
                last.mi_energy_j,
                if log.completed { ", complete" } else { "" }
            );
            write_out(out.as_deref(), &log.to_csv())?;
            if let Some(p) = map_out {
                write_grid(p, &log.final_grid)?;
            }
            Ok(())
        }
        Command::DumpTables { out } => write_out(out.as_deref(), &FxpTables::build(&params).dump()),
    }
}
