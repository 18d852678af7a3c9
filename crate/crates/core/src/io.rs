//! Plain-text grid and MI map files, plus PGM heatmap export.
//!
//! Grid: `H W resolution` then H rows of W integer levels in [0, 100].
//! MI map: `H W` then H rows of W reals printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridDims, MiMap, OccLevel, OccupancyGrid};
use crate::scalar::Real;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Splits a file into (1-based line number, trimmed content), skipping blank lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_dims(path: &Path, line: usize, fields: &[&str]) -> Result<GridDims> {
    let field = |i: usize, name: &str| -> Result<usize> {
        let v: usize = fields
            .get(i)
            .ok_or_else(|| parse_err(path, line, format!("missing {name}")))?
            .parse()
            .map_err(|_| parse_err(path, line, format!("{name} is not a positive integer")))?;
        if v == 0 {
            return Err(parse_err(path, line, format!("{name} must be positive")));
        }
        Ok(v)
    };
    Ok(GridDims::new(field(0, "height")?, field(1, "width")?))
}

pub fn parse_grid(text: &str, path: &Path) -> Result<OccupancyGrid> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(path, hl, "header must be `H W resolution`"));
    }
    let dims = parse_dims(path, hl, &fields)?;
    let resolution: f64 = fields[2]
        .parse()
        .map_err(|_| parse_err(path, hl, "resolution is not a number"))?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(parse_err(path, hl, "resolution must be positive"));
    }
    let mut cells = Vec::with_capacity(dims.cell_count());
    let mut rows = 0;
    for (ln, row) in lines {
        rows += 1;
        if rows > dims.height {
            return Err(parse_err(
                path,
                ln,
                format!("more than {} rows", dims.height),
            ));
        }
        let before = cells.len();
        for (col, tok) in row.split_whitespace().enumerate() {
            let level = tok
                .parse::<u8>()
                .ok()
                .and_then(OccLevel::new)
                .ok_or_else(|| {
                    parse_err(
                        path,
                        ln,
                        format!("column {col}: level `{tok}` not in [0, 100]"),
                    )
                })?;
            cells.push(level);
        }
        let got = cells.len() - before;
        if got != dims.width {
            return Err(parse_err(
                path,
                ln,
                format!("expected {} levels, got {got}", dims.width),
            ));
        }
    }
    if rows != dims.height {
        return Err(parse_err(
            path,
            hl,
            format!("expected {} rows, got {rows}", dims.height),
        ));
    }
    OccupancyGrid::new(dims, resolution, cells)
}

pub fn format_grid(grid: &OccupancyGrid) -> String {
    let mut out = String::with_capacity(grid.cells().len() * 3 + 32);
    let _ = writeln!(
        out,
        "{} {} {}",
        grid.height(),
        grid.width(),
        grid.resolution()
    );
    for row in grid.cells().chunks(grid.width()) {
        let mut first = true;
        for level in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", level.level());
        }
        out.push('\n');
    }
    out
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<OccupancyGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_grid(&text, path)
}

pub fn write_grid(path: impl AsRef<Path>, grid: &OccupancyGrid) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_grid(grid)).map_err(|e| Error::io(path, e))
}

pub fn parse_mi_map<T: Real>(text: &str, path: &Path) -> Result<MiMap<T>> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(path, hl, "header must be `H W`"));
    }
    let dims = parse_dims(path, hl, &fields)?;
    let mut values = Vec::with_capacity(dims.cell_count());
    let mut rows = 0;
    for (ln, row) in lines {
        rows += 1;
        if rows > dims.height {
            return Err(parse_err(
                path,
                ln,
                format!("more than {} rows", dims.height),
            ));
        }
        let before = values.len();
        for (col, tok) in row.split_whitespace().enumerate() {
            let v: f64 = tok.parse().map_err(|_| {
                parse_err(path, ln, format!("column {col}: `{tok}` is not a number"))
            })?;
            values.push(T::of(v));
        }
        let got = values.len() - before;
        if got != dims.width {
            return Err(parse_err(
                path,
                ln,
                format!("expected {} values, got {got}", dims.width),
            ));
        }
    }
    if rows != dims.height {
        return Err(parse_err(
            path,
            hl,
            format!("expected {} rows, got {rows}", dims.height),
        ));
    }
    MiMap::from_values(dims, values)
}

pub fn format_mi_map<T: Real>(map: &MiMap<T>) -> String {
    let dims = map.dims();
    let mut out = String::with_capacity(dims.cell_count() * 24 + 16);
    let _ = writeln!(out, "{} {}", dims.height, dims.width);
    for row in map.values().chunks(dims.width) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{:.16e}", v.as_f64());
        }
        out.push('\n');
    }
    out
}

pub fn read_mi_map<T: Real>(path: impl AsRef<Path>) -> Result<MiMap<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mi_map(&text, path)
}

pub fn write_mi_map<T: Real>(path: impl AsRef<Path>, map: &MiMap<T>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_mi_map(map)).map_err(|e| Error::io(path, e))
}

/// Binary PGM (P5), 8 bits per pixel, min-max normalized.
pub fn heatmap_pgm<T: Real>(map: &MiMap<T>) -> Vec<u8> {
    let dims = map.dims();
    let mut out = format!("P5\n{} {}\n255\n", dims.width, dims.height).into_bytes();
    let norm = map.normalized();
    out.extend(
        norm.values()
            .iter()
            .map(|v| (v.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn write_heatmap(path: impl AsRef<Path>, map: &MiMap<impl Real>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, heatmap_pgm(map)).map_err(|e| Error::io(path, e))
}
