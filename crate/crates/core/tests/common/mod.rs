//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use fcmi_core::{bresenham_line, CellCoord, GridDims, MiMap, OccupancyGrid, SensorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundled_grid(name: &str) -> OccupancyGrid {
    fcmi_core::io::read_grid(data_dir().join("grids").join(format!("{name}_201.txt")))
        .expect("bundled grid")
}

pub const BUNDLED: [&str; 3] = ["rooms", "clutter", "shelves"];

/// Random grid with a good share of the degenerate levels 0 and 100.
pub fn random_grid(rng: &mut ChaCha8Rng, max_side: usize) -> OccupancyGrid {
    let h = rng.gen_range(1..=max_side);
    let w = rng.gen_range(1..=max_side);
    let levels: Vec<u8> = (0..h * w)
        .map(|_| match rng.gen_range(0..10) {
            0 => 0,
            1 => 100,
            _ => rng.gen_range(0..=100),
        })
        .collect();
    OccupancyGrid::from_levels(GridDims::new(h, w), 0.1, &levels).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `γ(s, x)` from the alternating series below 2 and the closed forms above.
pub fn gamma(s: u32, x: f64) -> f64 {
    if x < 2.0 {
        let s = f64::from(s);
        let (mut sum, mut pow, mut fact) = (0.0, x.powf(s), 1.0);
        for k in 0..60 {
            let kf = f64::from(k);
            if k > 0 {
                fact *= kf;
                pow *= -x;
            }
            sum += pow / (fact * (s + kf));
        }
        return sum;
    }
    let e = (-x).exp();
    match s {
        1 => 1.0 - e,
        2 => 1.0 - e * (1.0 + x),
        _ => 2.0 - e * (x * x + 2.0 * x + 2.0),
    }
}

/// Adaptive Simpson on `t^(s-1) e^-t`.
pub fn quad(s: u32, a: f64, b: f64, tol: f64) -> f64 {
    let f = |t: f64| t.powi(s as i32 - 1) * (-t).exp();
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
            return l + r + (l + r - whole) / 15.0;
        }
        rec(f, a, m, l, tol / 2.0, depth - 1) + rec(f, m, b, r, tol / 2.0, depth - 1)
    }
    rec(&f, a, b, simpson(&f, a, b), tol, 50)
}

/// One step of the recursion written out from its defining equations.
pub fn oracle_step(prev: [f64; 4], o: f64, w: f64, cap: f64) -> [f64; 4] {
    let [a1, b1, a0, b0] = prev;
    if o <= 0.0 {
        return [a1 + w * a0, b1 + w * b0, a0, b0];
    }
    if o >= 1.0 {
        let l = cap.ln();
        return [(2.0 - l) / cap, 1.0 / cap, 1.0 - l, 1.0];
    }
    let lambda = -(1.0 - o).ln();
    let lm = lambda.min(cap);
    let x = lm * w;
    let e = (-x).exp();
    let (g1, g2, g3) = (gamma(1, x), gamma(2, x), gamma(3, x));
    let l = lm.ln();
    [
        e * ((a1 + lambda * w * b1) + w * (a0 + lm * w * b0)) + (g3 - g2 * l) / lm,
        e * (b1 + w * b0) + g2 / lm,
        e * (a0 + lm * w * b0) + g2 - g1 * l,
        e * b0 + g1,
    ]
}

pub fn oracle_mi(state: [f64; 4], dtheta: f64, cap: f64) -> f64 {
    (state[0] - (1.0 - cap.ln()) * state[1]) * dtheta
}

/// MI map with every beam cast from its own cell and recursed from its far
/// end, no line sharing.
pub fn brute_force_mi(grid: &OccupancyGrid, sensor: &SensorConfig, cap: f64) -> MiMap<f64> {
    let dims = grid.dims();
    let mut out = MiMap::zeros(dims);
    for c in grid.coords() {
        let mut total = 0.0;
        for angle in sensor.angles() {
            let (s, co) = angle.sin_cos();
            let w = 1.0 / s.abs().max(co.abs());
            let beam: Vec<CellCoord> = bresenham_line(c, angle, dims).unwrap();
            let mut state = [0.0; 4];
            for cell in beam.iter().rev() {
                state = oracle_step(state, grid.get(*cell).probability(), w, cap);
            }
            total += oracle_mi(state, sensor.delta_theta(), cap);
        }
        *out.slot(c) = total;
    }
    out
}

/// Largest `|a - b| / |b|` over the map; cells where both are zero count as equal.
pub fn max_rel_diff(a: &MiMap<f64>, b: &MiMap<f64>) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| {
            if x == y {
                0.0
            } else {
                (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max)
}
