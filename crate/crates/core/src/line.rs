//! Bresenham line geometry on the grid lattice.
//!
//! Every angle defines a family of parallel discrete lines. A line is the set
//! of cells whose minor-axis coordinate is nearest to the continuous line
//! `minor = b + (major - major_mid) * slope`, with `major_mid` the grid center
//! along the major axis and ties resolved toward the positive minor axis.
//! Anchoring at the center makes the families commute with 90° grid rotation.
//!
//! The slope is quantized to a multiple of 2^-40 so that the per-step rounding
//! is exact integer arithmetic and antipodal directions (θ, θ + π) select the
//! very same cells.

use crate::error::Result;
use crate::grid::{CellCoord, GridDims};

const SLOPE_BITS: u32 = 40;
const SLOPE_ONE: i64 = 1 << SLOPE_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Col,
}

/// Discretization parameters for one beam direction on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineGeometry {
    major: Axis,
    /// +1 or -1: how the major coordinate moves when following the beam.
    beam_step: i32,
    /// Minor advance per major step, in units of 2^-40. |slope| <= 2^40.
    slope: i64,
    dims: GridDims,
}

impl LineGeometry {
    pub fn new(angle: f64, dims: GridDims) -> Self {
        let (dr, dc) = angle.sin_cos();
        let quantize = |t: f64| (t * SLOPE_ONE as f64).round() as i64;
        if dc != 0.0 {
            let slope = quantize(dr / dc);
            if slope.abs() <= SLOPE_ONE {
                return Self {
                    major: Axis::Col,
                    beam_step: if dc > 0.0 { 1 } else { -1 },
                    slope,
                    dims,
                };
            }
        }
        Self {
            major: Axis::Row,
            beam_step: if dr > 0.0 { 1 } else { -1 },
            slope: quantize(dc / dr),
            dims,
        }
    }

    pub fn major(&self) -> Axis {
        self.major
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    fn major_len(&self) -> i32 {
        match self.major {
            Axis::Col => self.dims.width as i32,
            Axis::Row => self.dims.height as i32,
        }
    }

    fn minor_len(&self) -> i32 {
        match self.major {
            Axis::Col => self.dims.height as i32,
            Axis::Row => self.dims.width as i32,
        }
    }

    /// Rounded minor offset of the lattice line at a major coordinate:
    /// `floor((major - mid) * slope + 1/2)` with `mid = (len - 1) / 2`.
    #[inline]
    pub fn minor_offset(&self, major: i32) -> i32 {
        let twice = i128::from(2 * major - (self.major_len() - 1));
        let num = twice * i128::from(self.slope) + (1i128 << SLOPE_BITS);
        num.div_euclid(1i128 << (SLOPE_BITS + 1)) as i32
    }

    #[inline]
    fn split(&self, c: CellCoord) -> (i32, i32) {
        match self.major {
            Axis::Col => (c.col, c.row),
            Axis::Row => (c.row, c.col),
        }
    }

    #[inline]
    fn join(&self, major: i32, minor: i32) -> CellCoord {
        match self.major {
            Axis::Col => CellCoord::new(minor, major),
            Axis::Row => CellCoord::new(major, minor),
        }
    }

    /// Index of the family line through a cell.
    #[inline]
    pub fn line_of(&self, c: CellCoord) -> i32 {
        let (major, minor) = self.split(c);
        minor - self.minor_offset(major)
    }

    /// Cell of line `line` at a major coordinate (may be out of bounds).
    #[inline]
    pub fn cell_at(&self, line: i32, major: i32) -> CellCoord {
        self.join(major, line + self.minor_offset(major))
    }

    /// Inclusive range of line indices realized inside the grid.
    pub fn line_range(&self) -> (i32, i32) {
        let (lo, hi) = (
            self.minor_offset(0),
            self.minor_offset(self.major_len() - 1),
        );
        let (fmin, fmax) = (lo.min(hi), lo.max(hi));
        (-fmax, self.minor_len() - 1 - fmin)
    }

    /// Major coordinates in scan order (anti-parallel to the beam).
    pub fn scan_majors(&self) -> impl Iterator<Item = i32> {
        let n = self.major_len();
        let down = self.beam_step > 0;
        (0..n).map(move |i| if down { n - 1 - i } else { i })
    }

    /// Cells of one line in scan order, clipped to the grid.
    pub fn line_cells(&self, line: i32) -> Vec<CellCoord> {
        let minor_len = self.minor_len();
        self.scan_majors()
            .filter_map(|major| {
                let minor = line + self.minor_offset(major);
                (0..minor_len)
                    .contains(&minor)
                    .then(|| self.join(major, minor))
            })
            .collect()
    }

    /// Cell `line` visits at major coordinate `major` when minor
    /// coordinates wrap around the map (torus in the minor axis).
    #[inline]
    pub fn wrapped_cell(&self, line: i32, major: i32) -> CellCoord {
        let minor = (line + self.minor_offset(major)).rem_euclid(self.minor_len());
        self.join(major, minor)
    }

    /// Number of distinct minor-axis rows crossed by the wrapped line.
    pub fn wrap_lines(&self) -> i32 {
        self.minor_len()
    }

    pub fn scan_len(&self) -> usize {
        self.major_len() as usize
    }
}

/// One discrete line of a family, in scan order.
#[derive(Debug, Clone, PartialEq)]
pub struct LineScan {
    pub angle: f64,
    pub cells: Vec<CellCoord>,
    /// Meters.
    pub cell_width: f64,
}

impl LineScan {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Per-step chord of a Bresenham line in units of the cell size:
/// `1 / max(|cos θ|, |sin θ|)`.
pub fn chord_factor(angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    1.0 / c.abs().max(s.abs())
}

/// Width of one Bresenham step, in meters.
pub fn cell_width(angle: f64, resolution: f64) -> f64 {
    resolution * chord_factor(angle)
}

/// Bresenham discretization of the beam leaving `start` at `angle`,
/// clipped to the grid. The first cell is `start`.
pub fn bresenham_line(start: CellCoord, angle: f64, dims: GridDims) -> Result<Vec<CellCoord>> {
    dims.check(start)?;
    let geom = LineGeometry::new(angle, dims);
    let line = geom.line_of(start);
    let (mut major, _) = geom.split(start);
    let mut out = Vec::new();
    loop {
        let cell = geom.cell_at(line, major);
        if !dims.contains(cell) {
            break;
        }
        out.push(cell);
        major += geom.beam_step;
    }
    Ok(out)
}

/// Parallel lines at `angle` covering every cell exactly once, each in scan
/// order (anti-parallel to the beam), ordered by line index.
pub fn line_families(angle: f64, dims: GridDims, resolution: f64) -> Vec<LineScan> {
    let geom = LineGeometry::new(angle, dims);
    let (lo, hi) = geom.line_range();
    let mut lines: Vec<Vec<CellCoord>> = vec![Vec::new(); (hi - lo + 1) as usize];
    let minor_len = geom.minor_len();
    for major in geom.scan_majors() {
        let off = geom.minor_offset(major);
        for minor in 0..minor_len {
            lines[(minor - off - lo) as usize].push(geom.join(major, minor));
        }
    }
    let w = cell_width(angle, resolution);
    lines
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|cells| LineScan {
            angle,
            cells,
            cell_width: w,
        })
        .collect()
}
