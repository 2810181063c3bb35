//! Exact lattice geometry of the gasket.
//!
//! A point of level `k` is stored as integers `(a, b)` standing for the real
//! point `(a / 2^k, b * sqrt(3) / 2^k)`. With this scaling every vertex of every
//! cylinder triangle of generation `< k` is a lattice point and squared
//! distances are the integers `da^2 + 3 db^2` (in units of `4^-k`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GasketError, Result};

/// Largest level whose squared distances and masses fit the integer widths used here.
pub const MAX_LEVEL: u32 = 20;

/// Default level cap for command-line runs.
pub const DEFAULT_MAX_LEVEL: u32 = 14;

pub(crate) fn check_level(level: u32) -> Result<()> {
    if level == 0 {
        return Err(GasketError::Domain("level must be at least 1".into()));
    }
    if level > MAX_LEVEL {
        return Err(GasketError::Capacity {
            level,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// `2^level` as an i64.
#[inline]
pub(crate) fn side(level: u32) -> i64 {
    1i64 << level
}

/// `3^n` as a u64. Callers keep `n <= 40`.
#[inline]
pub(crate) fn pow3(n: u32) -> u64 {
    3u64.pow(n)
}

/// A point of the level-`k` lattice inside the closed triangle `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub level: u32,
    pub a: i64,
    pub b: i64,
}

impl LatticePoint {
    /// Builds a point, checking that it lies in the closed triangle `T`.
    pub fn new(level: u32, a: i64, b: i64) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(GasketError::Capacity {
                level,
                max: MAX_LEVEL,
            });
        }
        let n = side(level);
        if b < 0 || b > a || b > n - a {
            return Err(GasketError::OffLattice(format!(
                "({a}, {b}) at level {level} lies outside the triangle"
            )));
        }
        Ok(Self { level, a, b })
    }

    /// The fixed point `z_i` of `f_i`, i.e. the i-th vertex of `T`.
    pub fn vertex(i: u8, level: u32) -> Self {
        let n = side(level);
        let (a, b) = match i {
            0 => (0, 0),
            1 => (n, 0),
            2 => (n / 2, n / 2),
            _ => panic!("vertex index must be 0, 1 or 2"),
        };
        Self { level, a, b }
    }

    pub fn coords(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    /// Real Cartesian coordinates.
    pub fn to_real(&self) -> (f64, f64) {
        let n = side(self.level) as f64;
        (self.a as f64 / n, self.b as f64 * 3f64.sqrt() / n)
    }

    /// Re-expresses the point at a finer level.
    pub fn refine(&self, level: u32) -> Self {
        assert!(level >= self.level, "refine cannot coarsen");
        let shift = level - self.level;
        Self {
            level,
            a: self.a << shift,
            b: self.b << shift,
        }
    }

    /// True for the three vertices of `T`.
    pub fn is_corner(&self) -> bool {
        (0..3).any(|i| *self == Self::vertex(i, self.level))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})@{}", self.a, self.b, self.level)
    }
}

/// Exact squared distance between lattice points, `da^2 + 3 db^2`, in units of
/// `1 / (den * 2^k)^2` where `den` is the denominator of the centre (1 for
/// lattice points).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SqDistance(pub u64);

/// Squared distance between two points of the same level.
///
/// # Panics
///
/// Panics when the levels differ.
pub fn sq_distance(p: &LatticePoint, q: &LatticePoint) -> SqDistance {
    assert_eq!(
        p.level, q.level,
        "sq_distance needs points of the same level"
    );
    let da = p.a - q.a;
    let db = p.b - q.b;
    SqDistance((da * da + 3 * db * db) as u64)
}

/// A point with rational lattice coordinates `(a / den, b / den)` at some level.
///
/// Lattice points have `den == 1`; the barycentre of `T` needs `den == 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactPoint {
    pub level: u32,
    pub a: i64,
    pub b: i64,
    pub den: i64,
}

impl ExactPoint {
    pub fn new(level: u32, a: i64, b: i64, den: i64) -> Result<Self> {
        check_level(level)?;
        if den <= 0 {
            return Err(GasketError::Domain(
                "point denominator must be positive".into(),
            ));
        }
        let g = gcd(gcd(a.abs(), b.abs()), den);
        Ok(Self {
            level,
            a: a / g,
            b: b / g,
            den: den / g,
        })
    }

    /// Barycentre `(1/2, sqrt(3)/6)` of `T`.
    pub fn barycentre(level: u32) -> Self {
        let h = side(level) / 2;
        Self {
            level,
            a: 3 * h,
            b: h,
            den: 3,
        }
    }

    /// Distances from this centre are measured in units of `1 / scale()`.
    pub fn scale(&self) -> i64 {
        self.den * side(self.level)
    }

    /// Exact squared distance to the lattice point `(a, b)` of the same level,
    /// in units of `1 / scale()^2`.
    #[inline]
    pub fn sq_distance_to(&self, a: i64, b: i64) -> u64 {
        let da = self.den * a - self.a;
        let db = self.den * b - self.b;
        (da * da + 3 * db * db) as u64
    }

    pub fn to_real(&self) -> (f64, f64) {
        let s = self.scale() as f64;
        (self.a as f64 / s, self.b as f64 * 3f64.sqrt() / s)
    }

    /// Real radius corresponding to a squared distance measured from this centre.
    pub fn real_radius(&self, sq: u64) -> f64 {
        (sq as f64).sqrt() / self.scale() as f64
    }

    pub fn as_lattice(&self) -> Option<LatticePoint> {
        (self.den == 1).then_some(LatticePoint {
            level: self.level,
            a: self.a,
            b: self.b,
        })
    }
}

impl From<LatticePoint> for ExactPoint {
    fn from(p: LatticePoint) -> Self {
        Self {
            level: p.level,
            a: p.a,
            b: p.b,
            den: 1,
        }
    }
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Weight class of a point of `A_k` under the discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeightClass {
    /// One of the vertices of `T`: weight `1 / 3^k`.
    Corner,
    /// Every other point: weight `2 / 3^k`.
    Interior,
}

impl WeightClass {
    /// Weight in units of `3^-k`.
    #[inline]
    pub fn units(self) -> u64 {
        match self {
            WeightClass::Corner => 1,
            WeightClass::Interior => 2,
        }
    }
}

/// A finite word over `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.iter().any(|&s| s > 2) {
            return Err(GasketError::Domain("word symbols must be 0, 1 or 2".into()));
        }
        Ok(Self(symbols))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Word {
    type Err = GasketError;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '_'))
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                other => Err(GasketError::Domain(format!(
                    "invalid word symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self(symbols))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Similarities of the plane that act exactly on the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimilarityMap {
    /// `f_i(x) = x/2 + v_i`; raises the level by one.
    Contraction(u8),
    /// `f_w = f_{w_1} o ... o f_{w_n}`; raises the level by `|w|`.
    Composite(Word),
    /// `f_i^{-1}`; lowers the level by one.
    Expansion(u8),
    /// `pi_i`, the reflection across the altitude of `T` through `z_i`.
    Reflection(u8),
    /// `pi_4`, the reflection across the altitude of `T_0` through `f_2(z_0)`.
    ReflectionT0,
    /// The homothety of ratio 2 fixing the common point of `S_0` and `S_1`.
    Homothety,
}

/// Applies a similarity to a lattice point exactly.
pub fn apply_map(m: &SimilarityMap, p: &LatticePoint) -> Result<LatticePoint> {
    let k = p.level;
    let n = side(k);
    let (a, b) = (p.a, p.b);
    match m {
        SimilarityMap::Contraction(i) => {
            if k + 1 > MAX_LEVEL {
                return Err(GasketError::Capacity {
                    level: k + 1,
                    max: MAX_LEVEL,
                });
            }
            let (a2, b2) = match i {
                0 => (a, b),
                1 => (a + n, b),
                2 => {
                    if k == 0 {
                        return Err(GasketError::OffLattice(
                            "f_2 needs a point of level >= 1".into(),
                        ));
                    }
                    (a + n / 2, b + n / 2)
                }
                _ => return Err(GasketError::Domain("map index must be 0, 1 or 2".into())),
            };
            LatticePoint::new(k + 1, a2, b2)
        }
        SimilarityMap::Composite(w) => w
            .symbols()
            .iter()
            .rev()
            .try_fold(*p, |q, &i| apply_map(&SimilarityMap::Contraction(i), &q)),
        SimilarityMap::Expansion(i) => {
            if k == 0 {
                return Err(GasketError::Domain("cannot expand a level-0 point".into()));
            }
            let (a2, b2) = match i {
                0 => (a, b),
                1 => (a - n / 2, b),
                2 => {
                    if k < 2 {
                        return Err(GasketError::OffLattice(
                            "f_2^-1 needs a point of level >= 2".into(),
                        ));
                    }
                    (a - n / 4, b - n / 4)
                }
                _ => return Err(GasketError::Domain("map index must be 0, 1 or 2".into())),
            };
            LatticePoint::new(k - 1, a2, b2)
        }
        SimilarityMap::Reflection(i) => {
            // Barycentric weights (times 2^k) are (n - a - b, a - b, 2b); pi_i swaps the two
            // weights not attached to z_i.
            let (l0, l1, l2) = (n - a - b, a - b, 2 * b);
            let (m1, m2) = match i {
                0 => (l2, l1),
                1 => (l1, l0),
                2 => (l0, l2),
                _ => {
                    return Err(GasketError::Domain(
                        "reflection index must be 0, 1 or 2".into(),
                    ))
                }
            };
            if m2 % 2 != 0 {
                return Err(GasketError::OffLattice(format!(
                    "reflection of ({a}, {b}) is not a lattice point"
                )));
            }
            LatticePoint::new(k, m1 + m2 / 2, m2 / 2)
        }
        SimilarityMap::ReflectionT0 => {
            if k < 2 {
                return Err(GasketError::OffLattice(
                    "pi_4 needs a point of level >= 2".into(),
                ));
            }
            LatticePoint::new(k, n / 2 - a, b)
        }
        SimilarityMap::Homothety => LatticePoint::new(k, 2 * a - n / 2, 2 * b),
    }
}

/// The vertices of the closed triangle `T_w = f_w(T)` at level `level`.
pub fn cylinder_triangle(w: &Word, level: u32) -> Result<[LatticePoint; 3]> {
    if w.len() as u32 > level {
        return Err(GasketError::Domain(format!(
            "word of length {} has no vertices at level {level}",
            w.len()
        )));
    }
    let base = level - w.len() as u32;
    if base == 0 {
        // the level-0 lattice has no z_2
        return Err(GasketError::Domain(
            "cylinder vertices need level > |w|".into(),
        ));
    }
    let map = SimilarityMap::Composite(w.clone());
    let mut out = [LatticePoint::vertex(0, level); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = apply_map(&map, &LatticePoint::vertex(i as u8, base))?;
    }
    Ok(out)
}

/// Closed-triangle membership by exact orientation tests in lattice coordinates.
pub fn in_closed_triangle(tri: &[LatticePoint; 3], p: &LatticePoint) -> bool {
    // Orientation in the (a, b) coordinates preserves signs of the real orientation
    // since the map (a, b) -> (a, sqrt(3) b) has positive determinant.
    let orient = |u: &LatticePoint, v: &LatticePoint, w: &LatticePoint| {
        (v.a - u.a) * (w.b - u.b) - (v.b - u.b) * (w.a - u.a)
    };
    let d0 = orient(&tri[0], &tri[1], p);
    let d1 = orient(&tri[1], &tri[2], p);
    let d2 = orient(&tri[2], &tri[0], p);
    let has_neg = d0 < 0 || d1 < 0 || d2 < 0;
    let has_pos = d0 > 0 || d1 > 0 || d2 > 0;
    !(has_neg && has_pos)
}
