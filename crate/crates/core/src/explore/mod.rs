//! Simulated exploration: a robot scans a hidden environment, fuses the scans
//! into its occupancy grid and picks viewpoints from MI maps that arrive at a
//! platform-dependent rate.

mod planner;
pub mod scenes;
mod sensor;
mod trial;

pub use planner::{
    bfs_distances, frontier_candidates, gbl_select, is_frontier, next_step, pick_best, Candidate,
    PlannerConfig,
};
pub use sensor::{simulate_scan, update_occupancy, InverseSensorModel, ScanRay};
pub use trial::{run_trial, PlatformProfile, RobotState, TrialConfig, TrialLog, TrialSample};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{CellCoord, GridDims, OccLevel, OccupancyGrid};

/// Hidden ground truth the robot explores.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    dims: GridDims,
    resolution: f64,
    occupied: Vec<bool>,
}

impl Environment {
    pub fn new(dims: GridDims, resolution: f64, occupied: Vec<bool>) -> Result<Self> {
        // reuse the grid checks on dims and resolution
        OccupancyGrid::filled(dims, resolution, OccLevel::FREE)?;
        if occupied.len() != dims.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                dims.cell_count(),
                occupied.len()
            )));
        }
        Ok(Self {
            dims,
            resolution,
            occupied,
        })
    }

    /// Scene grids may only hold levels 0 and 100.
    pub fn from_grid(grid: &OccupancyGrid) -> Result<Self> {
        let occupied = grid
            .cells()
            .iter()
            .map(|l| match l.level() {
                0 => Ok(false),
                100 => Ok(true),
                other => Err(Error::InvalidGrid(format!(
                    "scene level {other} is not 0 or 100"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid.dims(), grid.resolution(), occupied)
    }

    pub fn to_grid(&self) -> OccupancyGrid {
        let cells = self
            .occupied
            .iter()
            .map(|&o| {
                if o {
                    OccLevel::OCCUPIED
                } else {
                    OccLevel::FREE
                }
            })
            .collect();
        OccupancyGrid::new(self.dims, self.resolution, cells).expect("validated at construction")
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_occupied(&self, c: CellCoord) -> bool {
        self.occupied[self.dims.index(c)]
    }

    /// Cells of the largest 4-connected free region, row-major.
    /// Ties go to the region found first.
    pub fn largest_free_region(&self) -> Vec<CellCoord> {
        let (h, w) = (self.dims.height, self.dims.width);
        let mut label = vec![usize::MAX; h * w];
        let mut best: Vec<usize> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..h * w {
            if self.occupied[start] || label[start] != usize::MAX {
                continue;
            }
            let mut region = vec![start];
            label[start] = start;
            stack.push(start);
            while let Some(i) = stack.pop() {
                let (r, c) = (i / w, i % w);
                let nbrs = [
                    (r > 0).then(|| i - w),
                    (r + 1 < h).then(|| i + w),
                    (c > 0).then(|| i - 1),
                    (c + 1 < w).then(|| i + 1),
                ];
                for j in nbrs.into_iter().flatten() {
                    if !self.occupied[j] && label[j] == usize::MAX {
                        label[j] = start;
                        region.push(j);
                        stack.push(j);
                    }
                }
            }
            if region.len() > best.len() {
                best = region;
            }
        }
        best.sort_unstable();
        best.into_iter()
            .map(|i| CellCoord::new((i / w) as i32, (i % w) as i32))
            .collect()
    }

    /// Seeded start pose inside the largest free region.
    pub fn start_pose(&self, seed: u64) -> Result<CellCoord> {
        let region = self.largest_free_region();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        region
            .choose(&mut rng)
            .copied()
            .ok_or_else(|| Error::InvalidGrid("scene has no free cell".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_grid_roundtrip() {
        let g =
            OccupancyGrid::from_levels(GridDims::new(2, 3), 0.1, &[0, 100, 0, 0, 0, 100]).unwrap();
        let env = Environment::from_grid(&g).unwrap();
        assert!(env.is_occupied(CellCoord::new(0, 1)));
        assert_eq!(env.to_grid(), g);
        let bad = OccupancyGrid::from_levels(GridDims::new(1, 1), 0.1, &[50]).unwrap();
        assert!(Environment::from_grid(&bad).is_err());
    }

    #[test]
    fn largest_region_and_start() {
        // a wall column splits the free space into 3 and 5 cells
        #[rustfmt::skip]
        let occ = [
            false, true, false, false, false,
            false, true, false, false, true,
            false, true, true, true, true,
        ];
        let env = Environment::new(GridDims::new(3, 5), 0.1, occ.to_vec()).unwrap();
        let region = env.largest_free_region();
        assert_eq!(region.len(), 5);
        assert_eq!(region[0], CellCoord::new(0, 2));
        let s = env.start_pose(7).unwrap();
        assert!(region.contains(&s));
        assert_eq!(s, env.start_pose(7).unwrap());
    }
}
