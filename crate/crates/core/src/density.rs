//! Exact ball masses, densities and distance profiles.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::approx::ApproxSet;
use crate::error::{domain, GasketError, Result};
use crate::lattice::{pow3, side, ExactPoint};
use crate::measure::{format_scaled, inverse_density_value, pow_half_dim, Mass, Rounding, Value};
use crate::surd::{RadiusWindow, Surd};

/// Radius of a ball: an integer squared distance in units of `centre.scale()^-2`,
/// or an exact real radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallRadius {
    Sq(u64),
    Exact(Surd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSpec {
    pub centre: ExactPoint,
    pub radius: BallRadius,
    pub closed: bool,
}

impl BallSpec {
    pub fn closed(centre: impl Into<ExactPoint>, radius: BallRadius) -> Self {
        Self {
            centre: centre.into(),
            radius,
            closed: true,
        }
    }

    pub fn open(centre: impl Into<ExactPoint>, radius: BallRadius) -> Self {
        Self {
            centre: centre.into(),
            radius,
            closed: false,
        }
    }

    /// Largest admitted squared distance, or `None` if the ball holds no lattice point.
    pub fn sq_bound(&self) -> Option<u64> {
        match self.radius {
            BallRadius::Sq(d) if self.closed => Some(d),
            BallRadius::Sq(d) => d.checked_sub(1),
            BallRadius::Exact(r) => r.sq_floor(self.centre.scale(), !self.closed),
        }
    }

    /// Real radius as a double.
    pub fn real_radius(&self) -> f64 {
        match self.radius {
            BallRadius::Sq(d) => self.centre.real_radius(d),
            BallRadius::Exact(r) => r.to_f64(),
        }
    }
}

/// Units of `3^-k` carried by points within squared distance `sq_max` of `centre`.
pub fn units_within(set: &ApproxSet, centre: &ExactPoint, sq_max: u64) -> u64 {
    let mut units = 0;
    set.grid()
        .for_each_within(set.coords(), centre, sq_max, |i, _| units += set.units(i));
    units
}

/// Exact `mu_k` mass of a closed or open ball.
pub fn ball_mass(set: &ApproxSet, ball: &BallSpec) -> Mass {
    check_centre(set, &ball.centre);
    let units = ball
        .sq_bound()
        .map_or(0, |bound| units_within(set, &ball.centre, bound));
    Mass::new(units, set.level())
}

fn check_centre(set: &ApproxSet, c: &ExactPoint) {
    assert_eq!(set.level(), c.level, "centre and set levels differ");
}

/// `(2d)^s / mu_k(B)` for the ball's own radius `d`.
pub fn inverse_density(set: &ApproxSet, ball: &BallSpec) -> Result<Value> {
    let mass = ball_mass(set, ball);
    if mass.is_zero() {
        return Err(GasketError::EmptyBall);
    }
    match ball.radius {
        BallRadius::Sq(0) => Err(domain("radius must be positive")),
        BallRadius::Sq(d) => Ok(inverse_density_value(d, ball.centre.den, mass.units)),
        BallRadius::Exact(r) => {
            let x = r.to_f64();
            if x <= 0.0 {
                return Err(domain("radius must be positive"));
            }
            // (2d)^s 3^k = (2d 2^k)^s
            let scaled = x * side(set.level()) as f64;
            Ok(Value::irrational(
                pow_half_dim(4.0 * scaled * scaled) / mass.units as f64,
            ))
        }
    }
}

/// One distinct candidate radius of a profile, with cumulative masses in units
/// of `3^-k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub sq: u64,
    pub mass_open: u64,
    pub mass_closed: u64,
}

/// Distinct distances from a centre, ascending, with cumulative masses taken
/// over the whole of `A_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub centre: ExactPoint,
    pub level: u32,
    pub entries: Vec<ProfileEntry>,
}

/// Builds the profile of `centre` over radii in `window`.
///
/// A radius is listed when some point at that distance passes `filter`; masses
/// always count every point of the set.
pub fn distance_profile(
    set: &ApproxSet,
    centre: &ExactPoint,
    window: &RadiusWindow,
    filter: Option<&dyn Fn(i64, i64) -> bool>,
) -> DistanceProfile {
    check_centre(set, centre);
    let level = set.level();
    let empty = DistanceProfile {
        centre: *centre,
        level,
        entries: Vec::new(),
    };
    let Some((lo, hi)) = window.sq_range(centre.scale()) else {
        return empty;
    };

    // (sq, units, candidate)
    let mut near: Vec<(u64, u64, bool)> = Vec::new();
    let mut push = |i: usize, sq: u64| {
        let (a, b) = set.coords()[i];
        let cand = sq >= lo && filter.is_none_or(|f| f(a as i64, b as i64));
        near.push((sq, set.units(i), cand));
    };
    if hi == u64::MAX {
        for i in 0..set.len() {
            let (a, b) = set.coords()[i];
            push(i, centre.sq_distance_to(a as i64, b as i64));
        }
    } else {
        set.grid().for_each_within(set.coords(), centre, hi, push);
    }
    near.sort_unstable_by_key(|e| e.0);

    let mut entries = Vec::new();
    let mut cum = 0u64;
    let mut i = 0;
    while i < near.len() {
        let sq = near[i].0;
        let before = cum;
        let mut cand = false;
        while i < near.len() && near[i].0 == sq {
            cum += near[i].1;
            cand |= near[i].2;
            i += 1;
        }
        if cand {
            entries.push(ProfileEntry {
                sq,
                mass_open: before,
                mass_closed: cum,
            });
        }
    }
    DistanceProfile {
        centre: *centre,
        level,
        entries,
    }
}

impl DistanceProfile {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.centre.real_radius(self.entries[i].sq)
    }

    /// Inverse density of the closed ball at entry `i`; `None` for zero mass or radius.
    pub fn inverse_density(&self, i: usize) -> Option<Value> {
        let e = &self.entries[i];
        (e.mass_closed > 0 && e.sq > 0)
            .then(|| inverse_density_value(e.sq, self.centre.den, e.mass_closed))
    }

    /// Inverse density of the open ball at entry `i`.
    pub fn open_inverse_density(&self, i: usize) -> Option<Value> {
        let e = &self.entries[i];
        (e.mass_open > 0 && e.sq > 0)
            .then(|| inverse_density_value(e.sq, self.centre.den, e.mass_open))
    }

    /// Entry minimising the closed-ball inverse density; ties go to the smaller radius.
    pub fn argmin_inverse_density(&self) -> Option<(usize, Value)> {
        let mut best: Option<(usize, Value)> = None;
        for i in 0..self.len() {
            if let Some(v) = self.inverse_density(i) {
                if best.is_none_or(|(_, b)| v.approx < b.approx) {
                    best = Some((i, v));
                }
            }
        }
        best
    }

    /// Entry maximising the open-ball inverse density; ties go to the smaller radius.
    pub fn argmax_open_inverse_density(&self) -> Option<(usize, Value)> {
        let mut best: Option<(usize, Value)> = None;
        for i in 0..self.len() {
            if let Some(v) = self.open_inverse_density(i) {
                if best.is_none_or(|(_, b)| v.approx > b.approx) {
                    best = Some((i, v));
                }
            }
        }
        best
    }

    /// CSV with columns `d, mass_open, mass_closed, density, inverse_density`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "d,mass_open,mass_closed,density,inverse_density")?;
        let total = pow3(self.level) as f64;
        for (i, e) in self.entries.iter().enumerate() {
            let (density, inverse) = match self.inverse_density(i) {
                Some(v) => (1.0 / v.approx, v.approx),
                None if e.mass_closed == 0 => (0.0, f64::INFINITY),
                None => (f64::INFINITY, 0.0),
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                self.radius(i),
                e.mass_open as f64 / total,
                e.mass_closed as f64 / total,
                density,
                inverse
            )?;
        }
        Ok(())
    }
}

/// Reference values of the centred measure estimate used to scale ball masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentredBounds {
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
}

/// Bracket for the centred measure of `S` restricted to a ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictedBallBracket {
    pub level: u32,
    pub radius: f64,
    /// Masses of the balls of radius `d - 2^-k`, `d` and `d + 2^-k`.
    pub masses: [Mass; 3],
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
}

/// Six-decimal presentation of a [`RestrictedBallBracket`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedBracket {
    pub masses: [String; 3],
    pub lower: String,
    pub estimate: String,
    pub upper: String,
}

impl RestrictedBallBracket {
    /// Reported values: masses are cut to six decimals (down for the inner and
    /// middle balls, up for the outer one), multiplied by the six-decimal bounds,
    /// and the products rounded to nearest.
    pub fn reported(&self, bounds: &CentredBounds) -> ReportedBracket {
        let modes = [Rounding::Down, Rounding::Down, Rounding::Up];
        let m: Vec<u128> = self
            .masses
            .iter()
            .zip(modes)
            .map(|(m, mode)| m.to_value().round_scaled(6, mode))
            .collect();
        let c = [bounds.lower, bounds.estimate, bounds.upper]
            .map(|x| Value::irrational(x).round_scaled(6, Rounding::Nearest));
        let product = |i: usize| format_scaled((m[i] * c[i] + 500_000) / 1_000_000, 6);
        ReportedBracket {
            masses: [0, 1, 2].map(|i| format_scaled(m[i], 6)),
            lower: product(0),
            estimate: product(1),
            upper: product(2),
        }
    }
}

/// Brackets the centred measure of `S ∩ B(x, d)` from the masses of the balls of
/// radius `d - 2^-k`, `d`, `d + 2^-k` and bounds on the centred measure of `S`.
pub fn restricted_ball_bracket(
    set: &ApproxSet,
    centre: &ExactPoint,
    radius: Surd,
    bounds: &CentredBounds,
) -> Result<RestrictedBallBracket> {
    let k = set.level();
    if k < 4 {
        return Err(domain(format!(
            "restricted-ball bracket needs k >= 4, got {k}"
        )));
    }
    let step = side(k);
    let inner = radius.add_rational(-1, step);
    if inner.signum() != std::cmp::Ordering::Greater {
        return Err(domain(format!(
            "radius {radius} must exceed 2^-{k} so that the inner ball is non-degenerate"
        )));
    }
    let outer = radius.add_rational(1, step);
    let mass = |r: Surd| ball_mass(set, &BallSpec::closed(*centre, BallRadius::Exact(r)));
    let masses = [mass(inner), mass(radius), mass(outer)];
    Ok(RestrictedBallBracket {
        level: k,
        radius: radius.to_f64(),
        masses,
        lower: bounds.lower * masses[0].to_f64(),
        estimate: bounds.estimate * masses[1].to_f64(),
        upper: bounds.upper * masses[2].to_f64(),
    })
}
