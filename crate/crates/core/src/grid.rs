//! Shared domain types: occupancy grids, sensor layout, MI maps.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row/column address of a grid cell. Signed so that ray arithmetic can step
/// past the border before being clipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CellCoord {
    pub row: i32,
    pub col: i32,
}

impl CellCoord {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }
}

impl From<(i32, i32)> for CellCoord {
    fn from((row, col): (i32, i32)) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub height: usize,
    pub width: usize,
}

impl GridDims {
    pub const fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub const fn square(side: usize) -> Self {
        Self::new(side, side)
    }

    #[inline]
    pub fn contains(&self, c: CellCoord) -> bool {
        c.row >= 0 && c.col >= 0 && (c.row as usize) < self.height && (c.col as usize) < self.width
    }

    #[inline]
    pub fn index(&self, c: CellCoord) -> usize {
        debug_assert!(self.contains(c));
        c.row as usize * self.width + c.col as usize
    }

    pub fn cell_count(&self) -> usize {
        self.height * self.width
    }

    pub fn check(&self, c: CellCoord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                coord: c,
                height: self.height,
                width: self.width,
            })
        }
    }
}

/// Quantized occupancy probability: `o = level / 100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct OccLevel(u8);

impl OccLevel {
    pub const MAX: u8 = 100;
    pub const FREE: Self = Self(0);
    pub const UNKNOWN: Self = Self(50);
    pub const OCCUPIED: Self = Self(100);

    pub fn new(level: u8) -> Option<Self> {
        (level <= Self::MAX).then_some(Self(level))
    }

    #[inline]
    pub const fn level(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn probability(self) -> f64 {
        f64::from(self.0) / 100.0
    }

    /// Nearest level to a probability in [0, 1].
    pub fn quantize(p: f64) -> Self {
        Self((p.clamp(0.0, 1.0) * 100.0).round() as u8)
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == 0 || self.0 == Self::MAX
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    dims: GridDims,
    resolution: f64,
    cells: Vec<OccLevel>,
}

impl OccupancyGrid {
    pub fn new(dims: GridDims, resolution: f64, cells: Vec<OccLevel>) -> Result<Self> {
        if dims.height == 0 || dims.width == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {}x{}",
                dims.height, dims.width
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if cells.len() != dims.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                dims.cell_count(),
                cells.len()
            )));
        }
        Ok(Self {
            dims,
            resolution,
            cells,
        })
    }

    pub fn filled(dims: GridDims, resolution: f64, level: OccLevel) -> Result<Self> {
        Self::new(dims, resolution, vec![level; dims.cell_count()])
    }

    /// Builds a grid from raw levels, rejecting anything above 100.
    pub fn from_levels(dims: GridDims, resolution: f64, levels: &[u8]) -> Result<Self> {
        let cells = levels
            .iter()
            .map(|&l| {
                OccLevel::new(l)
                    .ok_or_else(|| Error::InvalidGrid(format!("level {l} out of [0, 100]")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, resolution, cells)
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[OccLevel] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, c: CellCoord) -> OccLevel {
        self.cells[self.dims.index(c)]
    }

    #[inline]
    pub fn set(&mut self, c: CellCoord, level: OccLevel) {
        let i = self.dims.index(c);
        self.cells[i] = level;
    }

    pub fn coords(&self) -> impl Iterator<Item = CellCoord> + '_ {
        let w = self.dims.width;
        (0..self.dims.cell_count()).map(move |i| CellCoord::new((i / w) as i32, (i % w) as i32))
    }

    /// Rotates the grid by 90 degrees counter-clockwise (row axis pointing down).
    pub fn rotate90(&self) -> Self {
        let (h, w) = (self.dims.height, self.dims.width);
        let dims = GridDims::new(w, h);
        let mut cells = vec![OccLevel::FREE; h * w];
        for r in 0..h {
            for c in 0..w {
                // (r, c) -> (w - 1 - c, r)
                cells[(w - 1 - c) * h + r] = self.cells[r * w + c];
            }
        }
        Self {
            dims,
            resolution: self.resolution,
            cells,
        }
    }
}

/// Range sensor layout: `ray_count` beams at `2πk / ray_count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    ray_count: usize,
    /// Meters; only the exploration scan simulation uses it.
    pub max_range: f64,
}

impl SensorConfig {
    pub fn new(ray_count: usize) -> Self {
        assert!(ray_count > 0, "sensor needs at least one ray");
        Self {
            ray_count,
            max_range: 5.0,
        }
    }

    pub fn with_max_range(mut self, max_range: f64) -> Self {
        self.max_range = max_range;
        self
    }

    pub fn ray_count(&self) -> usize {
        self.ray_count
    }

    pub fn delta_theta(&self) -> f64 {
        TAU / self.ray_count as f64
    }

    pub fn angle(&self, k: usize) -> f64 {
        k as f64 / self.ray_count as f64 * TAU
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.ray_count).map(|k| self.angle(k))
    }
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self::new(60)
    }
}

/// Global constants of the MI recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmiParams<T> {
    lambda_cap: T,
    log_lambda_cap: T,
}

impl<T: Real> FcmiParams<T> {
    pub const DEFAULT_LAMBDA_CAP: f64 = 1e7;

    pub fn new(lambda_cap: T) -> Self {
        assert!(lambda_cap > T::one(), "lambda cap must exceed 1");
        Self {
            lambda_cap,
            log_lambda_cap: lambda_cap.ln(),
        }
    }

    pub fn lambda_cap(&self) -> T {
        self.lambda_cap
    }

    pub fn log_lambda_cap(&self) -> T {
        self.log_lambda_cap
    }
}

impl<T: Real> Default for FcmiParams<T> {
    fn default() -> Self {
        Self::new(T::of(Self::DEFAULT_LAMBDA_CAP))
    }
}

/// Per-cell accumulator of mutual information, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MiMap<T> {
    dims: GridDims,
    values: Vec<T>,
}

impl<T: Copy + Default> MiMap<T> {
    pub fn zeros(dims: GridDims) -> Self {
        Self {
            dims,
            values: vec![T::default(); dims.cell_count()],
        }
    }
}

impl<T: Copy> MiMap<T> {
    pub fn from_values(dims: GridDims, values: Vec<T>) -> Result<Self> {
        if values.len() != dims.cell_count() {
            return Err(Error::InvalidGrid(format!(
                "expected {} MI values, got {}",
                dims.cell_count(),
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, c: CellCoord) -> T {
        self.values[self.dims.index(c)]
    }

    #[inline]
    pub fn slot(&mut self, c: CellCoord) -> &mut T {
        let i = self.dims.index(c);
        &mut self.values[i]
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> MiMap<U> {
        MiMap {
            dims: self.dims,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Real> MiMap<T> {
    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Min-max rescale to [0, 1]. A constant map becomes all zeros.
    pub fn normalized(&self) -> Self {
        let lo = self.min_value();
        let span = self.max_value() - lo;
        if !(span > T::zero()) {
            return self.map(|_| T::zero());
        }
        self.map(|v| (v - lo) / span)
    }

    /// `(max_abs_diff, mean_abs_diff)` between two maps of equal size.
    pub fn abs_diff_stats(&self, other: &Self) -> Result<(T, T)> {
        if self.dims != other.dims {
            return Err(Error::InvalidGrid(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.dims.height, self.dims.width, other.dims.height, other.dims.width
            )));
        }
        let mut max = T::zero();
        let mut sum = T::zero();
        for (&a, &b) in self.values.iter().zip(&other.values) {
            let d = (a - b).abs();
            max = max.max(d);
            sum = sum + d;
        }
        Ok((max, sum / T::of(self.values.len() as f64)))
    }
}
