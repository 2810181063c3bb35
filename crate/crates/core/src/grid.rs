//! Uniform bucket grid over lattice points, used only to prune neighbour scans.

use crate::lattice::ExactPoint;

/// Default cell side is `2^-DEFAULT_CELL_EXPONENT` in real units.
pub const DEFAULT_CELL_EXPONENT: u32 = 5;

/// Compressed-row bucket index: `entries[start[c]..start[c + 1]]` are the point
/// indices of cell `c`.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    level: u32,
    /// Cell side in lattice units (same for `a` and `b`).
    width: i64,
    cols: i64,
    rows: i64,
    start: Vec<u32>,
    entries: Vec<u32>,
}

impl SpatialGrid {
    pub fn build(level: u32, coords: &[(i32, i32)], cell_exponent: u32) -> Self {
        let n = 1i64 << level;
        let width = if level > cell_exponent {
            1i64 << (level - cell_exponent)
        } else {
            1
        };
        let cols = n / width + 1;
        let rows = n / 2 / width + 1;
        let ncells = (cols * rows) as usize;
        let cell_of =
            |&(a, b): &(i32, i32)| ((b as i64 / width) * cols + a as i64 / width) as usize;

        let mut start = vec![0u32; ncells + 1];
        for p in coords {
            start[cell_of(p) + 1] += 1;
        }
        for c in 0..ncells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut entries = vec![0u32; coords.len()];
        for (i, p) in coords.iter().enumerate() {
            let c = cell_of(p);
            entries[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            level,
            width,
            cols,
            rows,
            start,
            entries,
        }
    }

    /// Real side length of a cell.
    pub fn cell_size(&self) -> f64 {
        self.width as f64 / (1i64 << self.level) as f64
    }

    pub fn cell_count(&self) -> usize {
        (self.cols * self.rows) as usize
    }

    /// Calls `f(index, sq)` for every point with squared distance `sq <= sq_max`
    /// from `centre`, in units of `centre.scale()^-2`.
    pub fn for_each_within(
        &self,
        coords: &[(i32, i32)],
        centre: &ExactPoint,
        sq_max: u64,
        mut f: impl FnMut(usize, u64),
    ) {
        assert_eq!(centre.level, self.level, "grid and centre levels differ");
        let den = centre.den as f64;
        let r = (sq_max as f64).sqrt() / den;
        let ca = centre.a as f64 / den;
        let cb = centre.b as f64 / den;
        let rb = r / 3f64.sqrt();
        let w = self.width as f64;
        // one cell of slack absorbs rounding in the float box
        let clamp = |v: f64, hi: i64| (v.floor() as i64).clamp(0, hi - 1);
        let c0 = clamp((ca - r) / w - 1.0, self.cols);
        let c1 = clamp((ca + r) / w + 1.0, self.cols);
        let r0 = clamp((cb - rb) / w - 1.0, self.rows);
        let r1 = clamp((cb + rb) / w + 1.0, self.rows);
        for row in r0..=r1 {
            let base = (row * self.cols) as usize;
            let lo = self.start[base + c0 as usize] as usize;
            let hi = self.start[base + c1 as usize + 1] as usize;
            for &i in &self.entries[lo..hi] {
                let (a, b) = coords[i as usize];
                let sq = centre.sq_distance_to(a as i64, b as i64);
                if sq <= sq_max {
                    f(i as usize, sq);
                }
            }
        }
    }
}
