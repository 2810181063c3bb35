//! Density sweep at the barycentre and the resulting spherical-measure bounds.

use serde::{Deserialize, Serialize};

use crate::approx::{in_s2, ApproxSet};
use crate::density::{distance_profile, units_within, DistanceProfile};
use crate::error::{domain, GasketError, Result};
use crate::lattice::{side, ExactPoint};
use crate::measure::{pow_half_dim, Value};
use crate::surd::{RadiusWindow, Surd};

pub const MIN_LEVEL: u32 = 3;

/// `(1 + 2^(2-k) sqrt(3))^s`.
pub fn spherical_factor(k: u32) -> f64 {
    let x = 1.0 + 2f64.powi(2 - k as i32) * 3f64.sqrt();
    pow_half_dim(x * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalResult {
    pub k: u32,
    /// Greatest density `mu_k(B(x_b, d)) / (2d)^s` found.
    pub c_sph_k: f64,
    /// Optimal radius.
    pub d_k: f64,
    /// Squared optimal radius in units of `(3 * 2^k)^-2`.
    pub sq_radius: u64,
    pub lower: f64,
    pub upper: f64,
    pub k_factor: f64,
    /// Upper bound `1 / lower` for the spherical measure.
    pub h_sph_upper: f64,
    /// Reciprocal of the density estimate; conjectural, as the optimal ball is
    /// only assumed to be centred at the barycentre.
    pub h_sph_estimate: f64,
    pub mass_units: u64,
    pub inner_mass_units: u64,
    pub c_sph_value: Value,
    pub lower_value: Value,
}

/// Candidate points: `A_k ∩ S_2` with first coordinate at most `1/2`.
pub fn spherical_candidate(level: u32, a: i64, b: i64) -> bool {
    in_s2(level, a, b) && 2 * a <= side(level)
}

/// Density profile at the barycentre over `[sqrt(3)/12, sqrt(3)/3]`.
///
/// With `full` every point of `A_k` supplies candidate radii; otherwise only
/// [`spherical_candidate`] points do.
pub fn barycentre_profile(set: &ApproxSet, full: bool) -> Result<DistanceProfile> {
    let k = set.level();
    if k < MIN_LEVEL {
        return Err(domain(format!(
            "spherical estimate needs k >= {MIN_LEVEL}, got {k}"
        )));
    }
    let xb = ExactPoint::barycentre(k);
    let filter = move |a: i64, b: i64| full || spherical_candidate(k, a, b);
    Ok(distance_profile(
        set,
        &xb,
        &RadiusWindow::barycentric(),
        Some(&filter),
    ))
}

pub fn compute_spherical(set: &ApproxSet) -> Result<SphericalResult> {
    compute_spherical_with(set, false)
}

/// As [`compute_spherical`]; `full` lets every point of `A_k` supply radii.
pub fn compute_spherical_with(set: &ApproxSet, full: bool) -> Result<SphericalResult> {
    let k = set.level();
    let profile = barycentre_profile(set, full)?;
    let (i, inverse) = profile
        .argmin_inverse_density()
        .ok_or(GasketError::EmptyBall)?;
    let entry = profile.entries[i];
    let xb = profile.centre;
    let scale = xb.scale();
    debug_assert!(RadiusWindow::barycentric().contains(&Surd::sqrt_over(entry.sq as i64, scale)));

    let inner_r = Surd::sqrt_over(entry.sq as i64, scale).add_rational(-1, side(k));
    let inner = inner_r
        .sq_floor(scale, false)
        .map_or(0, |d| units_within(set, &xb, d));
    let c_sph_value = inverse.recip();
    // mu_k(B(x_b, D - 2^-k)) / (2D)^s, as a ratio of unit counts
    let lower_value = Value::rational(inner as u128, entry.mass_closed as u128).mul(&c_sph_value);
    let k_factor = spherical_factor(k);
    Ok(SphericalResult {
        k,
        c_sph_k: c_sph_value.approx,
        d_k: profile.radius(i),
        sq_radius: entry.sq,
        lower: lower_value.approx,
        upper: k_factor * c_sph_value.approx,
        k_factor,
        h_sph_upper: 1.0 / lower_value.approx,
        h_sph_estimate: 1.0 / c_sph_value.approx,
        mass_units: entry.mass_closed,
        inner_mass_units: inner,
        c_sph_value,
        lower_value,
    })
}
