use std::fmt::Write as _;
use std::str::FromStr;

use super::planner::{frontier_candidates, next_step, pick_best, PlannerConfig};
use super::sensor::{simulate_scan, update_occupancy, InverseSensorModel};
use super::Environment;
use crate::error::{Error, Result};
use crate::fcmi::{compute_mi_map, map_entropy};
use crate::grid::{CellCoord, FcmiParams, MiMap, OccLevel, OccupancyGrid, SensorConfig};

/// Cost of one full-map MI compute on some platform.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformProfile {
    pub name: String,
    pub mi_latency_s: f64,
    pub mi_energy_j: f64,
}

impl PlatformProfile {
    pub const FPGA_LATENCY_S: f64 = 1.55e-3;
    pub const FPGA_ENERGY_J: f64 = 1.7e-3;

    pub fn new(name: impl Into<String>, mi_latency_s: f64, mi_energy_j: f64) -> Result<Self> {
        if !(mi_latency_s > 0.0
            && mi_latency_s.is_finite()
            && mi_energy_j > 0.0
            && mi_energy_j.is_finite())
        {
            return Err(Error::Config(format!(
                "platform latency and energy must be positive, got {mi_latency_s} s and {mi_energy_j} J"
            )));
        }
        Ok(Self {
            name: name.into(),
            mi_latency_s,
            mi_energy_j,
        })
    }

    pub fn fpga() -> Self {
        Self::new("fpga", Self::FPGA_LATENCY_S, Self::FPGA_ENERGY_J).expect("positive")
    }

    /// Named profiles scaled from the accelerator by (slowdown, energy factor).
    pub fn named(name: &str) -> Option<Self> {
        let (lat, energy) = match name {
            "fpga" => (1.0, 1.0),
            "gpu" => (71.0, 2650.0),
            "i7" => (190.0, 5360.0),
            "a57" => (381.0, 1314.0),
            "fsmi-fpga" => (104.0, 187.0),
            _ => return None,
        };
        Some(
            Self::new(
                name,
                Self::FPGA_LATENCY_S * lat,
                Self::FPGA_ENERGY_J * energy,
            )
            .expect("positive"),
        )
    }

    pub const NAMES: [&'static str; 5] = ["fpga", "gpu", "i7", "a57", "fsmi-fpga"];
}

/// Accepts a profile name or `custom:<latency_s>:<energy_j>`.
impl FromStr for PlatformProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(p) = Self::named(s) {
            return Ok(p);
        }
        let bad = || {
            Error::Config(format!(
                "unknown platform `{s}`; expected one of {} or custom:<latency_s>:<energy_j>",
                Self::NAMES.join(", ")
            ))
        };
        let rest = s.strip_prefix("custom:").ok_or_else(bad)?;
        let (lat, energy) = rest.split_once(':').ok_or_else(bad)?;
        let lat = lat.parse::<f64>().map_err(|_| bad())?;
        let energy = energy.parse::<f64>().map_err(|_| bad())?;
        Self::new(s, lat, energy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Rays and range of the simulated scanner.
    pub scan_sensor: SensorConfig,
    /// Ray count of the MI maps used for planning.
    pub mi_rays: usize,
    pub scan_rate_hz: f64,
    /// Upper bound on how often an MI compute may start; `None` means as
    /// soon as the platform is idle and a newer map exists.
    pub mi_rate_hz: Option<f64>,
    pub max_steps: usize,
    pub sensor_model: InverseSensorModel,
    pub planner: PlannerConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            scan_sensor: SensorConfig::new(120).with_max_range(2.0),
            mi_rays: 16,
            scan_rate_hz: 30.0,
            mi_rate_hz: None,
            max_steps: 3000,
            sensor_model: InverseSensorModel::default(),
            planner: PlannerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub position: CellCoord,
    pub trajectory_cells: u64,
    pub elapsed_s: f64,
}

impl RobotState {
    pub fn trajectory_length(&self, resolution: f64) -> f64 {
        self.trajectory_cells as f64 * resolution
    }
}

/// State of the world right after one scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSample {
    pub step: usize,
    pub sim_time_s: f64,
    pub trajectory_cells: u64,
    pub entropy_nats: f64,
    pub mi_computes: u64,
    pub mi_energy_j: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub platform: String,
    pub start: CellCoord,
    pub samples: Vec<TrialSample>,
    /// True when the planner ran out of candidates before the step cap.
    pub completed: bool,
    /// The robot's map at the end of the trial.
    pub final_grid: OccupancyGrid,
}

impl TrialLog {
    pub const CSV_HEADER: &'static str =
        "step,sim_time_s,trajectory_cells,entropy_nats,mi_computes,mi_energy_j";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.step,
                s.sim_time_s,
                s.trajectory_cells,
                s.entropy_nats,
                s.mi_computes,
                s.mi_energy_j
            );
        }
        out
    }

    pub fn last(&self) -> &TrialSample {
        self.samples
            .last()
            .expect("a trial logs at least the first scan")
    }

    /// Entropy of the last sample whose trajectory does not exceed `cells`.
    pub fn entropy_at_length(&self, cells: u64) -> Option<f64> {
        self.samples
            .iter()
            .take_while(|s| s.trajectory_cells <= cells)
            .last()
            .map(|s| s.entropy_nats)
    }
}

fn to_ns(seconds: f64) -> u64 {
    (seconds * 1e9).round().max(1.0) as u64
}

/// A finished MI map and the grid it was computed on.
struct MapView {
    mi: MiMap<f64>,
    snapshot: OccupancyGrid,
}

struct Pending {
    done_ns: u64,
    snapshot: OccupancyGrid,
    version: u64,
}

/// Runs one exploration trial. Time advances in scan periods; each period
/// scans and fuses at its start and plans one move at its end. MI computes
/// run on the grid as of their start and finish `mi_latency_s` later.
pub fn run_trial(
    env: &Environment,
    config: &TrialConfig,
    params: &FcmiParams<f64>,
    platform: &PlatformProfile,
    seed: u64,
) -> Result<TrialLog> {
    if !(config.scan_rate_hz > 0.0 && config.scan_rate_hz.is_finite()) {
        return Err(Error::Config(format!(
            "scan rate must be positive, got {}",
            config.scan_rate_hz
        )));
    }
    if let Some(r) = config.mi_rate_hz {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Config(format!("MI rate must be positive, got {r}")));
        }
    }
    let period = to_ns(1.0 / config.scan_rate_hz);
    let latency = to_ns(platform.mi_latency_s);
    let min_interval = config.mi_rate_hz.map_or(0, |r| to_ns(1.0 / r));
    let mi_sensor = SensorConfig::new(config.mi_rays);
    let planner = &config.planner;

    let start = env.start_pose(seed)?;
    let mut robot = RobotState {
        position: start,
        trajectory_cells: 0,
        elapsed_s: 0.0,
    };
    let mut grid = OccupancyGrid::filled(env.dims(), env.resolution(), OccLevel::UNKNOWN)?;
    let mut version = 0u64;
    let mut pending: Option<Pending> = None;
    let mut last_start: Option<u64> = None;
    let mut latest: Option<MapView> = None;
    let mut goal: Option<CellCoord> = None;
    let mut computes = 0u64;
    let mut energy = 0.0;
    let mut samples = Vec::new();
    let mut completed = false;

    let may_start = |t: u64, last: Option<u64>| last.is_none_or(|l| t - l >= min_interval);

    for step in 0..config.max_steps {
        let t = step as u64 * period;
        robot.elapsed_s = t as f64 * 1e-9;
        let scan = simulate_scan(env, robot.position, &config.scan_sensor)?;
        grid = update_occupancy(&grid, &scan, &config.sensor_model);
        version += 1;
        samples.push(TrialSample {
            step,
            sim_time_s: robot.elapsed_s,
            trajectory_cells: robot.trajectory_cells,
            entropy_nats: map_entropy(&grid),
            mi_computes: computes,
            mi_energy_j: energy,
        });

        if pending.is_none() && may_start(t, last_start) {
            pending = Some(Pending {
                done_ns: t + latency,
                snapshot: grid.clone(),
                version,
            });
            last_start = Some(t);
        }

        let plan_t = t + period;
        while let Some(p) = pending.take_if(|p| p.done_ns <= plan_t) {
            let mi = compute_mi_map(&p.snapshot, &mi_sensor, params);
            computes += 1;
            energy = computes as f64 * platform.mi_energy_j;
            // back-to-back compute when the grid moved on meanwhile
            if version > p.version && may_start(p.done_ns, last_start) {
                pending = Some(Pending {
                    done_ns: p.done_ns + latency,
                    snapshot: grid.clone(),
                    version,
                });
                last_start = Some(p.done_ns);
            }
            latest = Some(MapView {
                mi,
                snapshot: p.snapshot,
            });
        }

        let Some(view) = &latest else {
            continue;
        };
        // a goal is kept until reached or found unreachable
        if goal.is_none_or(|g| g == robot.position) {
            // the planner sees the world as of the map's snapshot; the cell
            // it stands on is never worth a stop
            let candidates: Vec<_> =
                frontier_candidates(&view.snapshot, robot.position, &view.mi, planner)
                    .into_iter()
                    .filter(|c| c.cell != robot.position)
                    .collect();
            match pick_best(&candidates, planner.decay) {
                Some(c) => goal = Some(c.cell),
                None if frontier_candidates(&grid, robot.position, &view.mi, planner)
                    .is_empty() =>
                {
                    completed = true;
                    break;
                }
                None => goal = None,
            }
        }
        let Some(g) = goal else {
            continue;
        };
        match next_step(&grid, robot.position, g, planner) {
            Some(n) if n != robot.position => {
                robot.position = n;
                robot.trajectory_cells += 1;
            }
            Some(_) => {}
            None => goal = None,
        }
    }

    Ok(TrialLog {
        platform: platform.name.clone(),
        start,
        samples,
        completed,
        final_grid: grid,
    })
}
