//! Discrete masses, density values and decimal rounding.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::lattice::pow3;

/// Similarity dimension of the gasket, `log 3 / log 2`.
pub const DIMENSION: f64 = 1.584_962_500_721_156_2;

/// Exact `mu_k` mass: `units / 3^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mass {
    pub units: u64,
    pub level: u32,
}

impl Mass {
    pub fn new(units: u64, level: u32) -> Self {
        Self { units, level }
    }

    pub fn is_zero(&self) -> bool {
        self.units == 0
    }

    pub fn to_ratio(&self) -> Ratio<u64> {
        Ratio::new(self.units, pow3(self.level))
    }

    pub fn to_f64(&self) -> f64 {
        self.units as f64 / pow3(self.level) as f64
    }

    pub fn to_value(&self) -> Value {
        Value::rational(self.units as u128, pow3(self.level) as u128)
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/3^{}", self.units, self.level)
    }
}

/// `x^(s/2)` for the similarity dimension `s`.
#[inline]
pub fn pow_half_dim(x: f64) -> f64 {
    (0.5 * DIMENSION * x.ln()).exp()
}

/// `(2d)^s` for a real radius `d`.
pub fn diameter_power(d: f64) -> f64 {
    pow_half_dim(4.0 * d * d)
}

/// `(2d)^s * 3^k` for the radius `d = sqrt(sq) / scale` with `scale = den * 2^k`.
///
/// The factor `3^k = (2^k)^s` cancels the lattice scaling, so this equals
/// `(4 sq / den^2)^(s/2)`. Exact (a power of three) when `4 sq / den^2` is a
/// power of four.
pub fn scaled_diameter_power(sq: u64, den: i64) -> Value {
    let num = 4 * sq as u128;
    let dd = (den * den) as u128;
    let approx = pow_half_dim(num as f64 / dd as f64);
    let g = gcd_u128(num, dd);
    let (n, d) = (num / g, dd / g);
    match (power_of_four(n), power_of_four(d)) {
        (Some(t), Some(0)) => Value::rational(3u128.pow(t), 1),
        (Some(0), Some(t)) => Value::rational(1, 3u128.pow(t)),
        _ => Value::irrational(approx),
    }
}

/// Inverse density `(2d)^s / mu_k(B)` of a ball whose squared radius is `sq`
/// (units of `scale^-2`) and whose mass is `units / 3^k`.
pub fn inverse_density_value(sq: u64, den: i64, units: u64) -> Value {
    scaled_diameter_power(sq, den).div_units(units)
}

fn power_of_four(x: u128) -> Option<u32> {
    if x == 0 || !x.is_power_of_two() {
        return None;
    }
    let tz = x.trailing_zeros();
    tz.is_multiple_of(2).then_some(tz / 2)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A non-negative real known either exactly (as a fraction) or as a double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Value {
    pub approx: f64,
    exact: Option<(u128, u128)>,
}

impl Value {
    pub fn rational(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd_u128(num, den).max(1);
        let (n, d) = (num / g, den / g);
        Self {
            approx: n as f64 / d as f64,
            exact: Some((n, d)),
        }
    }

    pub fn irrational(approx: f64) -> Self {
        Self {
            approx,
            exact: None,
        }
    }

    pub fn exact(&self) -> Option<(u128, u128)> {
        self.exact
    }

    pub fn mul(&self, other: &Value) -> Value {
        if let (Some((a, b)), Some((c, d))) = (self.exact, other.exact) {
            if let (Some(n), Some(m)) = (a.checked_mul(c), b.checked_mul(d)) {
                return Value::rational(n, m);
            }
        }
        Value::irrational(self.approx * other.approx)
    }

    pub fn mul_f64(&self, factor: f64) -> Value {
        Value::irrational(self.approx * factor)
    }

    pub fn div(&self, other: &Value) -> Value {
        if let (Some((a, b)), Some((c, d))) = (self.exact, other.exact) {
            if c != 0 {
                if let (Some(n), Some(m)) = (a.checked_mul(d), b.checked_mul(c)) {
                    return Value::rational(n, m);
                }
            }
        }
        Value::irrational(self.approx / other.approx)
    }

    /// Divides by an integer count of mass units.
    pub fn div_units(&self, units: u64) -> Value {
        self.div(&Value::rational(units as u128, 1))
    }

    pub fn recip(&self) -> Value {
        Value::rational(1, 1).div(self)
    }

    /// Rounds to `decimals` places in the given direction, returning the scaled integer.
    pub fn round_scaled(&self, decimals: u32, mode: Rounding) -> u128 {
        let scale = 10u128.pow(decimals);
        if let Some((n, d)) = self.exact {
            if let Some(ns) = n.checked_mul(scale) {
                return match mode {
                    Rounding::Down => ns / d,
                    Rounding::Up => ns.div_ceil(d),
                    Rounding::Nearest => (2 * ns + d) / (2 * d),
                };
            }
        }
        let x = self.approx * scale as f64;
        let r = match mode {
            Rounding::Down => x.floor(),
            Rounding::Up => x.ceil(),
            Rounding::Nearest => x.round(),
        };
        r.max(0.0) as u128
    }

    /// Decimal string with exactly `decimals` places.
    pub fn format(&self, decimals: u32, mode: Rounding) -> String {
        format_scaled(self.round_scaled(decimals, mode), decimals)
    }
}

pub(crate) fn format_scaled(v: u128, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    if decimals == 0 {
        return v.to_string();
    }
    format!(
        "{}.{:0width$}",
        v / scale,
        v % scale,
        width = decimals as usize
    )
}

/// Direction used when reporting a value to a fixed number of decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}
