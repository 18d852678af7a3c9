use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::{CellCoord, GridDims, MiMap, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Utility decay per cell of path length.
    pub decay: f64,
    /// Levels below this are traversable.
    pub traversable_below: u8,
    /// Inclusive level band treated as unknown.
    pub unknown: (u8, u8),
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            decay: 0.05,
            traversable_below: 40,
            unknown: (40, 60),
        }
    }
}

impl PlannerConfig {
    pub fn traversable(&self, grid: &OccupancyGrid, c: CellCoord) -> bool {
        grid.get(c).level() < self.traversable_below
    }

    pub fn unknown(&self, grid: &OccupancyGrid, c: CellCoord) -> bool {
        (self.unknown.0..=self.unknown.1).contains(&grid.get(c).level())
    }
}

fn neighbors4(c: CellCoord, dims: GridDims) -> impl Iterator<Item = CellCoord> {
    [(-1, 0), (0, -1), (0, 1), (1, 0)]
        .into_iter()
        .map(move |(dr, dc)| CellCoord::new(c.row + dr, c.col + dc))
        .filter(move |n| dims.contains(*n))
}

/// 4-connected path lengths from `from` over traversable cells; `from`
/// itself is always the root. `None` marks unreachable cells.
pub fn bfs_distances(
    grid: &OccupancyGrid,
    from: CellCoord,
    planner: &PlannerConfig,
) -> Vec<Option<u32>> {
    let dims = grid.dims();
    let mut dist = vec![None; dims.cell_count()];
    dist[dims.index(from)] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(c) = queue.pop_front() {
        let d = dist[dims.index(c)].expect("queued cells have a distance");
        for n in neighbors4(c, dims) {
            let slot = &mut dist[dims.index(n)];
            if slot.is_none() && planner.traversable(grid, n) {
                *slot = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cell: CellCoord,
    pub distance: u32,
    pub mi: f64,
}

/// Traversable cell with an unknown 4-neighbour.
pub fn is_frontier(grid: &OccupancyGrid, c: CellCoord, planner: &PlannerConfig) -> bool {
    planner.traversable(grid, c) && neighbors4(c, grid.dims()).any(|n| planner.unknown(grid, n))
}

/// Reachable traversable cells with an unknown 4-neighbour, row-major.
pub fn frontier_candidates(
    grid: &OccupancyGrid,
    from: CellCoord,
    mi: &MiMap<f64>,
    planner: &PlannerConfig,
) -> Vec<Candidate> {
    let dims = grid.dims();
    let dist = bfs_distances(grid, from, planner);
    grid.coords()
        .filter_map(|c| {
            let d = dist[dims.index(c)]?;
            is_frontier(grid, c, planner).then(|| Candidate {
                cell: c,
                distance: d,
                mi: mi.get(c),
            })
        })
        .collect()
}

/// Highest `mi · e^{-decay·d}`; ties go to the nearer candidate, then to the
/// first in input order.
pub fn pick_best(candidates: &[Candidate], decay: f64) -> Option<Candidate> {
    let utility = |c: &Candidate| c.mi * (-decay * f64::from(c.distance)).exp();
    let mut best: Option<(Candidate, f64)> = None;
    for c in candidates {
        let u = utility(c);
        let better = match &best {
            None => true,
            Some((b, bu)) => u > *bu || (u == *bu && c.distance < b.distance),
        };
        if better {
            best = Some((*c, u));
        }
    }
    best.map(|(c, _)| c)
}

/// Next viewpoint from the latest MI map.
pub fn gbl_select(
    mi: &MiMap<f64>,
    grid: &OccupancyGrid,
    from: CellCoord,
    planner: &PlannerConfig,
) -> Result<Candidate> {
    pick_best(&frontier_candidates(grid, from, mi, planner), planner.decay)
        .ok_or(Error::ExplorationComplete)
}

/// First move along a shortest traversable path to `goal`, or `None` when
/// the goal is unreachable. Staying put is returned when already there.
pub fn next_step(
    grid: &OccupancyGrid,
    from: CellCoord,
    goal: CellCoord,
    planner: &PlannerConfig,
) -> Option<CellCoord> {
    if from == goal {
        return Some(from);
    }
    // distances from the goal, so any neighbour one step closer is on a shortest path
    let dims = grid.dims();
    let dist = bfs_distances(grid, goal, planner);
    let here = dist[dims.index(from)]?;
    neighbors4(from, dims).find(|n| dist[dims.index(*n)] == Some(here - 1))
}
