//! Estimates and brackets for the packing measure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::approx::{in_s2, is_s2_junction, ApproxSet};
use crate::centred::{centred_centres, radius_value};
use crate::density::units_within;
use crate::error::{domain, GasketError, Result};
use crate::lattice::{side, ExactPoint, LatticePoint};
use crate::measure::{pow_half_dim, scaled_diameter_power, Value};
use crate::surd::Surd;
use crate::sweep::{sweep, Goal, SweepOptions, SweepStats};

/// Which pair of radius floor and correction factor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `d_0 = sqrt(3)/16 - 2^(2-k)`, `K = (1 - 2^(6-k)/sqrt(3))^-s`, `k >= 6`.
    #[default]
    Original,
    /// `d_0 = sqrt(3)/16 - 2^(1-k)`, `K = (1 - 2^(5-k)/sqrt(3))^-s`, `k >= 4`.
    Improved,
}

impl Variant {
    pub fn min_level(self) -> u32 {
        match self {
            Variant::Original => 6,
            Variant::Improved => 4,
        }
    }

    /// Least admissible radius at level `k`.
    pub fn radius_floor(self, k: u32) -> Surd {
        let shift = match self {
            Variant::Original => 2,
            Variant::Improved => 1,
        };
        // sqrt(3)/16 - 2^shift / 2^k
        Surd::sqrt3(1, 16).add_rational(-(1 << shift), side(k))
    }

    /// Correction factor `K^P` bounding the measure from above.
    pub fn factor(self, k: u32) -> f64 {
        let e = match self {
            Variant::Original => 6,
            Variant::Improved => 5,
        };
        let x = 1.0 - 2f64.powi(e - k as i32) / 3f64.sqrt();
        pow_half_dim(x * x).recip()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Original => "original",
            Variant::Improved => "improved",
        })
    }
}

impl FromStr for Variant {
    type Err = GasketError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(Variant::Original),
            "improved" => Ok(Variant::Improved),
            other => Err(domain(format!("unknown variant {other:?}"))),
        }
    }
}

/// Which bound on the radius each centre admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusLimit {
    /// Distance to the boundary of the rhombus, so that the ball stays inside it.
    #[default]
    Boundary,
    /// Distance to the farthest vertex of the rhombus.
    FarthestVertex,
}

/// The open rhombus `T ∪ T'` where `T'` is `T` reflected across its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibleRhombus {
    pub level: u32,
}

impl FeasibleRhombus {
    /// Vertices `z_0`, `z_1`, `z_2`, `z_2'` in lattice coordinates.
    pub fn vertices(&self) -> [(i64, i64); 4] {
        let n = side(self.level);
        [(0, 0), (n, 0), (n / 2, n / 2), (n / 2, -n / 2)]
    }

    /// Closed membership.
    pub fn contains(&self, x: &ExactPoint) -> bool {
        let s = x.scale();
        let (a, b) = (x.a, x.b);
        b.abs() <= a && b.abs() <= s - a
    }
}

/// Greatest squared distance from `x` to a vertex of the rhombus, in units of `x.scale()^-2`.
pub fn max_dist_to_rhombus(x: &ExactPoint) -> u64 {
    FeasibleRhombus { level: x.level }
        .vertices()
        .iter()
        .map(|&(a, b)| x.sq_distance_to(a, b))
        .max()
        .unwrap_or(0)
}

/// Largest integer `D` with `sqrt(D) / scale` at most the distance from `x` to the
/// boundary of the rhombus.
pub fn boundary_sq_floor(x: &ExactPoint) -> u64 {
    let s = x.scale() as i128;
    let (a, b) = (x.a as i128, x.b as i128);
    // each edge lies on a line sqrt(3) |linear| / 2 away in real units
    let m = [
        (a - b).abs(),
        (s - a - b).abs(),
        (a + b).abs(),
        (s - a + b).abs(),
    ]
    .into_iter()
    .min()
    .unwrap_or(0);
    (3 * m * m / 4) as u64
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PackingOptions {
    pub variant: Variant,
    pub limit: RadiusLimit,
    pub sweep: SweepOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingResult {
    pub k: u32,
    /// Greatest open-ball inverse density found.
    pub p_k: f64,
    pub centre: LatticePoint,
    pub sq_radius: u64,
    pub d_k: f64,
    pub p_inf: f64,
    pub p_sup: f64,
    pub k_factor: f64,
    pub variant: Variant,
    pub limit: RadiusLimit,
    pub mass_units: u64,
    pub outer_mass_units: u64,
    pub p_k_value: Value,
    pub p_inf_value: Value,
    pub d_k_value: Value,
    pub stats: SweepStats,
}

/// Points whose distances are candidate radii: `A_k` outside `S_2`, keeping the
/// two points `S_2` shares with the other first-level cylinders.
pub fn packing_candidate(level: u32, a: i64, b: i64) -> bool {
    !in_s2(level, a, b) || is_s2_junction(level, a, b)
}

/// Maximises `(2d)^s / mu_k(U(x, d))` over `x ∈ A_k ∩ S_01` and radii `d = |y - x|`.
pub fn compute_packing(set: &ApproxSet, opts: &PackingOptions) -> Result<PackingResult> {
    let k = set.level();
    let min = opts.variant.min_level();
    if k < min {
        return Err(domain(format!(
            "packing estimate with the {} constants needs k >= {min}, got {k}",
            opts.variant
        )));
    }
    let scale = side(k);
    let lo = opts.variant.radius_floor(k).sq_ceil(scale, false);
    let centres = centred_centres(set, false);
    let cand = move |a: i64, b: i64| packing_candidate(k, a, b);
    let limit = opts.limit;
    let (best, stats) = sweep(
        set,
        Goal::MaxOpen,
        &centres,
        |c| {
            let hi = match limit {
                RadiusLimit::Boundary => boundary_sq_floor(c),
                RadiusLimit::FarthestVertex => max_dist_to_rhombus(c),
            };
            (lo <= hi).then_some((lo, hi))
        },
        &cand,
        &opts.sweep,
    )?;
    let best = best.ok_or(GasketError::EmptyBall)?;
    let centre = best.centre.as_lattice().expect("lattice centre");

    // open ball of radius d + 2^-k
    let outer_r = Surd::sqrt_over(best.sq as i64, scale).add_rational(1, scale);
    let outer_sq = outer_r.sq_floor(scale, true).unwrap_or(0);
    let outer = units_within(set, &best.centre, outer_sq);
    let k_factor = opts.variant.factor(k);
    let p_inf_value = scaled_diameter_power(best.sq, 1).div_units(outer);
    Ok(PackingResult {
        k,
        p_k: best.value,
        centre,
        sq_radius: best.sq,
        d_k: best.radius(),
        p_inf: p_inf_value.approx,
        p_sup: k_factor * best.value,
        k_factor,
        variant: opts.variant,
        limit,
        mass_units: best.units,
        outer_mass_units: outer,
        p_k_value: best.exact_value(),
        p_inf_value,
        d_k_value: radius_value(best.sq, scale),
        stats,
    })
}
