//! Seeded ground-truth generators. All scenes have a closed outer wall.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Environment;
use crate::grid::GridDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    /// 3×3 rooms joined by doors.
    Rooms,
    /// Scattered rectangular blocks.
    Clutter,
    /// Long shelves with cross aisles.
    Shelves,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [SceneKind::Rooms, SceneKind::Clutter, SceneKind::Shelves];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Rooms => "rooms",
            SceneKind::Clutter => "clutter",
            SceneKind::Shelves => "shelves",
        }
    }
}

struct Canvas {
    side: usize,
    occ: Vec<bool>,
}

impl Canvas {
    fn walled(side: usize) -> Self {
        let mut c = Self {
            side,
            occ: vec![false; side * side],
        };
        c.rect(0, 0, 1, side);
        c.rect(side - 1, 0, 1, side);
        c.rect(0, 0, side, 1);
        c.rect(0, side - 1, side, 1);
        c
    }

    fn fill(&mut self, r0: usize, c0: usize, h: usize, w: usize, value: bool) {
        for r in r0..(r0 + h).min(self.side) {
            for c in c0..(c0 + w).min(self.side) {
                self.occ[r * self.side + c] = value;
            }
        }
    }

    fn rect(&mut self, r0: usize, c0: usize, h: usize, w: usize) {
        self.fill(r0, c0, h, w, true);
    }

    fn clear(&mut self, r0: usize, c0: usize, h: usize, w: usize) {
        self.fill(r0, c0, h, w, false);
    }

    fn finish(self, resolution: f64) -> Environment {
        Environment::new(GridDims::square(self.side), resolution, self.occ)
            .expect("canvas is well formed")
    }
}

/// Builds a scene of `side`×`side` cells (`side` ≥ 24).
pub fn generate(kind: SceneKind, side: usize, resolution: f64, seed: u64) -> Environment {
    assert!(side >= 24, "scenes need at least 24 cells per side");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cv = Canvas::walled(side);
    match kind {
        SceneKind::Rooms => {
            let cut = |rng: &mut ChaCha8Rng, k: usize| side * k / 3 + rng.gen_range(0..5) - 2;
            let rows = [cut(&mut rng, 1), cut(&mut rng, 2)];
            let cols = [cut(&mut rng, 1), cut(&mut rng, 2)];
            for &r in &rows {
                cv.rect(r, 0, 1, side);
            }
            for &c in &cols {
                cv.rect(0, c, side, 1);
            }
            // one door in every wall piece between neighbouring rooms
            let bounds = |cuts: [usize; 2]| {
                [
                    (1, cuts[0]),
                    (cuts[0] + 1, cuts[1]),
                    (cuts[1] + 1, side - 1),
                ]
            };
            for &r in &rows {
                for (a, b) in bounds(cols) {
                    let d = rng.gen_range(a + 1..b.saturating_sub(4).max(a + 2));
                    cv.clear(r, d, 1, 3);
                }
            }
            for &c in &cols {
                for (a, b) in bounds(rows) {
                    let d = rng.gen_range(a + 1..b.saturating_sub(4).max(a + 2));
                    cv.clear(d, c, 3, 1);
                }
            }
            for _ in 0..6 {
                let (r, c) = (rng.gen_range(3..side - 5), rng.gen_range(3..side - 5));
                cv.rect(r, c, 2, 2);
            }
        }
        SceneKind::Clutter => {
            let n = side * side / 300;
            for _ in 0..n {
                let h = rng.gen_range(2..side / 8);
                let w = rng.gen_range(2..side / 8);
                let r = rng.gen_range(2..side - h - 2);
                let c = rng.gen_range(2..side - w - 2);
                cv.rect(r, c, h, w);
            }
        }
        SceneKind::Shelves => {
            let aisle = rng.gen_range(side / 3..2 * side / 3);
            let mut r = 5;
            while r + 3 < side - 4 {
                cv.rect(r, 4, 2, side - 8);
                // cross aisle and a random gap per shelf
                cv.clear(r, aisle, 2, 3);
                let g = rng.gen_range(6..side - 10);
                cv.clear(r, g, 2, 3);
                r += rng.gen_range(6..9);
            }
        }
    }
    cv.finish(resolution)
}
