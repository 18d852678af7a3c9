use super::Environment;
use crate::error::{Error, Result};
use crate::grid::{CellCoord, OccLevel, OccupancyGrid, SensorConfig};
use crate::line::bresenham_line;

/// One simulated beam: the free cells it crossed (pose first) and the
/// occupied cell that stopped it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRay {
    pub angle_index: usize,
    pub free: Vec<CellCoord>,
    pub hit: Option<CellCoord>,
}

/// Casts every sensor ray from `pose` until it meets an occupied cell, leaves
/// `max_range` or leaves the map.
pub fn simulate_scan(
    env: &Environment,
    pose: CellCoord,
    sensor: &SensorConfig,
) -> Result<Vec<ScanRay>> {
    env.dims().check(pose)?;
    if env.is_occupied(pose) {
        return Err(Error::PoseOccupied(pose));
    }
    let range_cells = sensor.max_range / env.resolution();
    let max_sq = range_cells * range_cells;
    sensor
        .angles()
        .enumerate()
        .map(|(k, angle)| {
            let mut ray = ScanRay {
                angle_index: k,
                free: Vec::new(),
                hit: None,
            };
            for c in bresenham_line(pose, angle, env.dims())? {
                let dr = f64::from(c.row - pose.row);
                let dc = f64::from(c.col - pose.col);
                if dr * dr + dc * dc > max_sq {
                    break;
                }
                if env.is_occupied(c) {
                    ray.hit = Some(c);
                    break;
                }
                ray.free.push(c);
            }
            Ok(ray)
        })
        .collect()
}

/// Log-odds increments and the level clamp applied after every update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSensorModel {
    pub l_free: f64,
    pub l_occ: f64,
    pub min_level: u8,
    pub max_level: u8,
}

impl Default for InverseSensorModel {
    fn default() -> Self {
        Self {
            l_free: -0.85,
            l_occ: 1.8,
            min_level: 1,
            max_level: 99,
        }
    }
}

impl InverseSensorModel {
    pub fn apply(&self, level: OccLevel, delta: f64) -> OccLevel {
        let p = level.probability();
        let l = (p / (1.0 - p)).ln() + delta;
        let q = OccLevel::quantize(1.0 / (1.0 + (-l).exp()));
        OccLevel::new(q.level().clamp(self.min_level, self.max_level)).expect("clamped into range")
    }
}

/// Fuses one scan. Every observed cell is updated once per scan; a cell that
/// is both crossed and hit counts as a hit.
pub fn update_occupancy(
    grid: &OccupancyGrid,
    scan: &[ScanRay],
    model: &InverseSensorModel,
) -> OccupancyGrid {
    const NONE: u8 = 0;
    const FREE: u8 = 1;
    const HIT: u8 = 2;
    let dims = grid.dims();
    let mut seen = vec![NONE; dims.cell_count()];
    for ray in scan {
        for &c in &ray.free {
            let s = &mut seen[dims.index(c)];
            *s = (*s).max(FREE);
        }
        if let Some(c) = ray.hit {
            seen[dims.index(c)] = HIT;
        }
    }
    let mut out = grid.clone();
    for (i, s) in seen.iter().enumerate() {
        let delta = match *s {
            FREE => model.l_free,
            HIT => model.l_occ,
            _ => continue,
        };
        let c = CellCoord::new((i / dims.width) as i32, (i % dims.width) as i32);
        out.set(c, model.apply(grid.get(c), delta));
    }
    out
}
