//! The discrete approximations `A_k` and their weights.

use crate::error::{domain, GasketError, Result};
use crate::grid::{SpatialGrid, DEFAULT_CELL_EXPONENT};
use crate::lattice::{check_level, pow3, side, LatticePoint, WeightClass, Word};
use crate::measure::Mass;

/// `A_k` with its weight classes and a bucket grid.
///
/// Points are kept sorted by `(a, b)`; the grid refers to them by index.
#[derive(Debug, Clone)]
pub struct ApproxSet {
    level: u32,
    coords: Vec<(i32, i32)>,
    grid: SpatialGrid,
}

/// Number of points of `A_k`, `(3^k + 3) / 2`.
pub fn expected_cardinality(k: u32) -> u64 {
    (pow3(k) + 3) / 2
}

/// Builds `A_k` by iterating the three contractions from `A_1`.
pub fn generate_approx_set(k: u32) -> Result<ApproxSet> {
    generate_with_grid(k, DEFAULT_CELL_EXPONENT)
}

/// As [`generate_approx_set`] with a grid of cell side `2^-cell_exponent`.
pub fn generate_with_grid(k: u32, cell_exponent: u32) -> Result<ApproxSet> {
    check_level(k)?;
    let mut coords = generate_coords(k);
    debug_assert_eq!(coords.len() as u64, expected_cardinality(k));
    coords.shrink_to_fit();
    Ok(ApproxSet::from_sorted(k, coords, cell_exponent))
}

/// Sorted, deduplicated lattice coordinates of `A_k` (`k >= 1`).
pub(crate) fn generate_coords(k: u32) -> Vec<(i32, i32)> {
    let mut cur: Vec<(i32, i32)> = vec![(0, 0), (1, 1), (2, 0)];
    for level in 1..k {
        let n = 1i32 << level;
        let h = n / 2;
        let mut next = Vec::with_capacity(cur.len() * 3);
        for &(a, b) in &cur {
            next.push((a, b));
            next.push((a + n, b));
            next.push((a + h, b + h));
        }
        next.sort_unstable();
        next.dedup();
        cur = next;
    }
    cur
}

impl ApproxSet {
    pub(crate) fn from_sorted(level: u32, coords: Vec<(i32, i32)>, cell_exponent: u32) -> Self {
        let grid = SpatialGrid::build(level, &coords, cell_exponent);
        Self {
            level,
            coords,
            grid,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(i32, i32)] {
        &self.coords
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn point(&self, i: usize) -> LatticePoint {
        let (a, b) = self.coords[i];
        LatticePoint {
            level: self.level,
            a: a as i64,
            b: b as i64,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn weight_class_of(&self, a: i64, b: i64) -> WeightClass {
        weight_class(self.level, a, b)
    }

    /// Weight of point `i` in units of `3^-k`.
    #[inline]
    pub fn units(&self, i: usize) -> u64 {
        let (a, b) = self.coords[i];
        weight_class(self.level, a as i64, b as i64).units()
    }

    pub fn index_of(&self, a: i64, b: i64) -> Option<usize> {
        let key = (i32::try_from(a).ok()?, i32::try_from(b).ok()?);
        self.coords.binary_search(&key).ok()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        p.level == self.level && self.index_of(p.a, p.b).is_some()
    }

    /// Total mass; equals one for every `k`.
    pub fn total_mass(&self) -> Mass {
        let units = (0..self.len()).map(|i| self.units(i)).sum();
        Mass::new(units, self.level)
    }
}

#[inline]
pub(crate) fn weight_class(level: u32, a: i64, b: i64) -> WeightClass {
    let n = side(level);
    let corner = b == 0 && (a == 0 || a == n) || (b == n / 2 && a == n / 2);
    if corner {
        WeightClass::Corner
    } else {
        WeightClass::Interior
    }
}

/// `A_k ∩ S_w`, built as `f_w(A_{k-|w|})`.
pub fn cylinder_subset(set: &ApproxSet, w: &Word) -> Result<Vec<LatticePoint>> {
    let k = set.level();
    let j = w.len() as u32;
    if j >= k {
        return Err(domain(format!(
            "cylinder word of length {j} needs level above {j}, got {k}"
        )));
    }
    let base = generate_coords(k - j);
    let mut out: Vec<LatticePoint> = base
        .iter()
        .map(|&(a, b)| map_word(w, k - j, a as i64, b as i64))
        .collect();
    out.sort();
    Ok(out)
}

/// Applies `f_w` to a point of level `base`, landing at level `base + |w|`.
pub(crate) fn map_word(w: &Word, base: u32, mut a: i64, mut b: i64) -> LatticePoint {
    let mut level = base;
    for &s in w.symbols().iter().rev() {
        let n = side(level);
        match s {
            0 => {}
            1 => a += n,
            _ => {
                a += n / 2;
                b += n / 2;
            }
        }
        level += 1;
    }
    LatticePoint { level, a, b }
}

/// Membership in `S_01` for a point of `A_k`: the closed triangle with vertices
/// `(N/4, 0)`, `(N/2, 0)`, `(3N/8, N/8)`.
#[inline]
pub fn in_s01(level: u32, a: i64, b: i64) -> bool {
    let n = side(level);
    b >= 0 && b <= a - n / 4 && b <= n / 2 - a
}

/// Membership in `S_2` for a point of `A_k`.
#[inline]
pub fn in_s2(level: u32, _a: i64, b: i64) -> bool {
    4 * b >= side(level)
}

/// The two points `S_2` shares with `S_0` and `S_1`.
#[inline]
pub fn is_s2_junction(level: u32, a: i64, b: i64) -> bool {
    let q = side(level) / 4;
    b == q && (a == q || a == 3 * q)
}

/// Weight of every point obtained by counting codes: each `f_i(z_j)`,
/// `i` of length `k - 1`, contributes one unit.
pub fn weights_by_code_count(k: u32) -> Result<Vec<((i64, i64), u64)>> {
    check_level(k)?;
    if k > 12 {
        return Err(GasketError::Capacity { level: k, max: 12 });
    }
    let mut hits: Vec<(i64, i64)> = Vec::with_capacity(pow3(k) as usize);
    let words = pow3(k - 1);
    for code in 0..words {
        let mut symbols = Vec::with_capacity(k as usize - 1);
        let mut c = code;
        for _ in 1..k {
            symbols.push((c % 3) as u8);
            c /= 3;
        }
        let w = Word::new(symbols)?;
        for j in 0..3u8 {
            let z = LatticePoint::vertex(j, 1);
            let p = map_word(&w, 1, z.a, z.b);
            hits.push((p.a, p.b));
        }
    }
    hits.sort_unstable();
    let mut out: Vec<((i64, i64), u64)> = Vec::new();
    for p in hits {
        match out.last_mut() {
            Some((q, n)) if *q == p => *n += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}
