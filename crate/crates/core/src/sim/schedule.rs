//! Work units and their distribution over cores and ray slots.

use super::config::ArchConfig;
use crate::grid::{CellCoord, GridDims, SensorConfig};
use crate::line::LineGeometry;

/// Diagonal bank mapping.
#[inline]
pub fn bank_of(c: CellCoord, banks: usize) -> usize {
    debug_assert!(banks >= 1);
    (c.row + c.col) as usize % banks
}

/// One or more family lines processed back to back by a single ray slot.
/// The recursion restarts at every segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkUnit {
    pub angle_index: usize,
    pub segments: Vec<Vec<CellCoord>>,
}

impl WorkUnit {
    pub fn total_cells(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }
}

/// Units of one angle family, ordered by line offset so that neighbouring
/// units are neighbouring lines.
pub fn family_units(
    angle_index: usize,
    angle: f64,
    dims: GridDims,
    wrapping: bool,
) -> Vec<WorkUnit> {
    let geom = LineGeometry::new(angle, dims);
    if !wrapping {
        let (lo, hi) = geom.line_range();
        return (lo..=hi)
            .map(|l| geom.line_cells(l))
            .filter(|c| !c.is_empty())
            .map(|cells| WorkUnit {
                angle_index,
                segments: vec![cells],
            })
            .collect();
    }
    let minor_len = geom.wrap_lines();
    (0..minor_len)
        .map(|b| {
            let mut segments: Vec<Vec<CellCoord>> = Vec::new();
            let mut lap = None;
            for major in geom.scan_majors() {
                // which copy of the map the unwrapped line is in
                let k = (b + geom.minor_offset(major)).div_euclid(minor_len);
                if lap != Some(k) {
                    segments.push(Vec::new());
                    lap = Some(k);
                }
                segments
                    .last_mut()
                    .expect("pushed above")
                    .push(geom.wrapped_cell(b, major));
            }
            WorkUnit {
                angle_index,
                segments,
            }
        })
        .collect()
}

/// Angle-major stream of all units of a full map compute.
pub fn all_units<'a>(
    dims: GridDims,
    sensor: &'a SensorConfig,
    wrapping: bool,
) -> impl Iterator<Item = WorkUnit> + 'a {
    sensor
        .angles()
        .enumerate()
        .flat_map(move |(k, a)| family_units(k, a, dims, wrapping))
}

/// Position of the `u`-th unit of the global queue: `(batch, slot, core)`.
/// A batch holds `n·D` units; consecutive units go to consecutive cores.
pub fn placement(u: usize, n_cores: usize, depth: usize) -> (usize, usize, usize) {
    let per_batch = n_cores * depth;
    let j = u % per_batch;
    (u / per_batch, j / n_cores, j % n_cores)
}

/// Per-core ordered unit lists (round-robin over cores).
pub fn schedule(dims: GridDims, sensor: &SensorConfig, config: &ArchConfig) -> Vec<Vec<WorkUnit>> {
    let n = config.n_cores;
    let mut per_core = vec![Vec::new(); n];
    for (u, unit) in all_units(dims, sensor, config.features.wrapping).enumerate() {
        per_core[u % n].push(unit);
    }
    per_core
}
