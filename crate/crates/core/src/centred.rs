//! Estimates and brackets for the centred Hausdorff measure.

use serde::{Deserialize, Serialize};

use crate::approx::{in_s01, ApproxSet};
use crate::density::units_within;
use crate::error::{domain, GasketError, Result};
use crate::lattice::{side, ExactPoint, LatticePoint};
use crate::measure::{pow_half_dim, scaled_diameter_power, Value};
use crate::surd::{RadiusWindow, Surd};
use crate::sweep::{order_centres, sweep, Goal, SweepOptions, SweepStats};

/// Smallest level for which the bracket is valid.
pub const MIN_LEVEL: u32 = 4;

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct CentredOptions {
    pub sweep: SweepOptions,
    /// Search every centre of `A_k` instead of `A_k ∩ S_01`.
    pub full_sweep: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentredResult {
    pub k: u32,
    /// Least inverse density found.
    pub c_k: f64,
    pub centre: LatticePoint,
    /// Squared radius in units of `4^-k`.
    pub sq_radius: u64,
    pub d_k: f64,
    pub c_inf: f64,
    pub c_sup: f64,
    pub k_factor: f64,
    /// Mass of the optimal ball and of the ball shrunk by `2^-k`, in units of `3^-k`.
    pub mass_units: u64,
    pub inner_mass_units: u64,
    pub c_k_value: Value,
    pub c_sup_value: Value,
    pub d_k_value: Value,
    pub stats: SweepStats,
}

/// `K_k = (1 + 2^(5-k) / sqrt(3))^-s`.
pub fn centred_factor(k: u32) -> f64 {
    let x = 1.0 + 2f64.powi(5 - k as i32) / 3f64.sqrt();
    pow_half_dim(x * x).recip()
}

/// Exact real radius `sqrt(sq) / 2^k`.
pub(crate) fn radius_value(sq: u64, scale: i64) -> Value {
    let r = (sq as f64).sqrt().round() as u64;
    if r * r == sq {
        Value::rational(r as u128, scale as u128)
    } else {
        Value::irrational((sq as f64).sqrt() / scale as f64)
    }
}

/// Centres searched by default: `A_k ∩ S_01`, coarse lattice points first.
pub fn centred_centres(set: &ApproxSet, full: bool) -> Vec<ExactPoint> {
    let k = set.level();
    let mut centres: Vec<ExactPoint> = set
        .points()
        .filter(|p| full || in_s01(k, p.a, p.b))
        .map(ExactPoint::from)
        .collect();
    order_centres(&mut centres);
    centres
}

/// Minimises `(2d)^s / mu_k(B(x, d))` over `x ∈ A_k ∩ S_01` and radii
/// `d = |y - x|`, `y ∈ A_k`, in `[sqrt(3)/16, sqrt(3)/8 + 2^(1-k)]`.
pub fn compute_centred(set: &ApproxSet, opts: &CentredOptions) -> Result<CentredResult> {
    let k = set.level();
    if k < MIN_LEVEL {
        return Err(domain(format!(
            "centred estimate needs k >= {MIN_LEVEL}, got {k}"
        )));
    }
    let scale = side(k);
    let window = RadiusWindow::centred(k);
    let (lo, hi) = window
        .sq_range(scale)
        .ok_or_else(|| domain("empty radius window"))?;
    let centres = centred_centres(set, opts.full_sweep);
    let any = |_: i64, _: i64| true;
    let (best, stats) = sweep(
        set,
        Goal::MinClosed,
        &centres,
        |_| Some((lo, hi)),
        &any,
        &opts.sweep,
    )?;
    let best = best.ok_or(GasketError::EmptyBall)?;
    let centre = best.centre.as_lattice().expect("lattice centre");

    let inner_r = Surd::sqrt_over(best.sq as i64, scale).add_rational(-1, scale);
    let inner_sq = inner_r.sq_floor(scale, false);
    let inner = inner_sq.map_or(0, |d| units_within(set, &best.centre, d));
    if inner == 0 {
        return Err(GasketError::EmptyBall);
    }
    let k_factor = centred_factor(k);
    let c_k_value = best.exact_value();
    let c_sup_value = scaled_diameter_power(best.sq, 1).div_units(inner);
    Ok(CentredResult {
        k,
        c_k: best.value,
        centre,
        sq_radius: best.sq,
        d_k: best.radius(),
        c_inf: k_factor * best.value,
        c_sup: c_sup_value.approx,
        k_factor,
        mass_units: best.units,
        inner_mass_units: inner,
        c_k_value,
        c_sup_value,
        d_k_value: radius_value(best.sq, scale),
        stats,
    })
}

/// One row of the bracket convergence report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketWidth {
    pub k: u32,
    pub width: f64,
    /// Whether the width shrank relative to the previous row.
    pub shrinking: bool,
}

/// Widths `C_sup - C_inf` in order of `k`.
pub fn centred_bracket_widths(results: &[CentredResult]) -> Result<Vec<BracketWidth>> {
    if results.is_empty() {
        return Err(domain("no results to report"));
    }
    let mut sorted: Vec<&CentredResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.k);
    let mut out: Vec<BracketWidth> = Vec::with_capacity(sorted.len());
    for r in sorted {
        let width = r.c_sup - r.c_inf;
        let shrinking = out.last().is_none_or(|p| width < p.width);
        out.push(BracketWidth {
            k: r.k,
            width,
            shrinking,
        });
    }
    Ok(out)
}
