//! Exact radii of the form `(p + q sqrt(n)) / m` and radius windows.
//!
//! Window endpoints such as `sqrt(3)/16` or `sqrt(3)/8 + 2^(1-k)` and shifted
//! radii such as `d - 2^-k` are irrational, while squared distances on the
//! lattice are integers. Everything that decides membership goes through
//! [`Surd::cmp`], which is exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::lattice::gcd;

/// The real number `(p + q * sqrt(n)) / m` with `m > 0` and `n >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surd {
    p: i64,
    q: i64,
    n: i64,
    m: i64,
}

/// Splits `n > 0` as `f^2 * rest` with `rest` square-free.
fn square_part(mut n: i64) -> (i64, i64) {
    let (mut f, mut rest) = (1, 1);
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            f *= d.pow(e / 2);
            if e % 2 == 1 {
                rest *= d;
            }
        }
        d += 1;
    }
    (f, rest * n)
}

impl Surd {
    /// `(p + q sqrt(n)) / m`, normalised so that equal values compare equal:
    /// `n` is square-free and `gcd(p, q, m) = 1` with `m > 0`.
    pub fn new(p: i64, q: i64, n: i64, m: i64) -> Self {
        assert!(m != 0, "surd denominator must be non-zero");
        assert!(n >= 0, "surd radicand must be non-negative");
        let (mut p, mut q, mut n, mut m) = if m < 0 { (-p, -q, n, -m) } else { (p, q, n, m) };
        if q == 0 || n == 0 {
            q = 0;
            n = 0;
        } else {
            let (f, rest) = square_part(n);
            q *= f;
            n = rest;
            if n == 1 {
                p += q;
                q = 0;
                n = 0;
            }
        }
        let g = gcd(gcd(p, q), m);
        if g > 1 {
            p /= g;
            q /= g;
            m /= g;
        }
        Self { p, q, n, m }
    }

    pub fn zero() -> Self {
        Self::new(0, 0, 0, 1)
    }

    pub fn rational(p: i64, m: i64) -> Self {
        Self::new(p, 0, 0, m)
    }

    /// `sqrt(n) / m`.
    pub fn sqrt_over(n: i64, m: i64) -> Self {
        Self::new(0, 1, n, m)
    }

    /// `r * sqrt(3)` for the rational `r = num / den`.
    pub fn sqrt3(num: i64, den: i64) -> Self {
        Self::new(0, num, 3, den)
    }

    /// Adds the rational `num / den`.
    pub fn add_rational(&self, num: i64, den: i64) -> Self {
        let l = self.m / gcd(self.m, den) * den;
        let fs = l / self.m;
        let fo = l / den;
        Self::new(self.p * fs + num * fo, self.q * fs, self.n, l)
    }

    /// Adds another surd with the same radicand (or a rational one).
    pub fn add(&self, other: &Surd) -> Option<Surd> {
        if self.q != 0 && other.q != 0 && self.n != other.n {
            return None;
        }
        let n = if self.q != 0 { self.n } else { other.n };
        let l = self.m / gcd(self.m, other.m) * other.m;
        let fs = l / self.m;
        let fo = l / other.m;
        Some(Surd::new(
            self.p * fs + other.p * fo,
            self.q * fs + other.q * fo,
            n,
            l,
        ))
    }

    /// Multiplies by the rational `num / den`.
    pub fn mul_rational(&self, num: i64, den: i64) -> Self {
        Self::new(self.p * num, self.q * num, self.n, self.m * den)
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.n as f64).sqrt()) / self.m as f64
    }

    pub fn is_rational(&self) -> bool {
        self.q == 0
    }

    pub fn parts(&self) -> (i64, i64, i64, i64) {
        (self.p, self.q, self.n, self.m)
    }

    pub fn signum(&self) -> Ordering {
        sign1(
            &BigInt::from(self.p),
            &BigInt::from(self.q),
            &BigInt::from(self.n),
        )
    }

    /// Largest integer `D >= 0` with `sqrt(D) / scale <= self` (or `< self` when
    /// `strict`). `None` when no such `D` exists.
    pub fn sq_floor(&self, scale: i64, strict: bool) -> Option<u64> {
        if self.signum() == Ordering::Less {
            return None;
        }
        let ok = |d: u64| {
            let c = Surd::sqrt_over(d as i64, scale).cmp(self);
            if strict {
                c == Ordering::Less
            } else {
                c != Ordering::Greater
            }
        };
        if !ok(0) {
            return None;
        }
        let est = (self.to_f64() * scale as f64).powi(2).floor().max(0.0) as u64;
        let mut d = est;
        while d > 0 && !ok(d) {
            d -= 1;
        }
        while ok(d + 1) {
            d += 1;
        }
        Some(d)
    }

    /// Smallest integer `D >= 0` with `sqrt(D) / scale >= self` (or `> self` when `strict`).
    pub fn sq_ceil(&self, scale: i64, strict: bool) -> u64 {
        match self.sq_floor(scale, !strict) {
            None => 0,
            Some(d) => d + 1,
        }
    }
}

/// Sign of `p + q sqrt(n)`.
fn sign1(p: &BigInt, q: &BigInt, n: &BigInt) -> Ordering {
    let zero = BigInt::from(0);
    let sp = p.cmp(&zero);
    let sq = if *n == zero {
        Ordering::Equal
    } else {
        q.cmp(&zero)
    };
    match (sp, sq) {
        (s, Ordering::Equal) => s,
        (Ordering::Equal, s) => s,
        (a, b) if a == b => a,
        _ => {
            // opposite signs: compare p^2 with q^2 n
            let lhs = p * p;
            let rhs = q * q * n;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sp,
                Ordering::Less => sq,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

/// Sign of `a + b sqrt(n1) + c sqrt(n2)`.
fn sign2(a: BigInt, b: BigInt, n1: BigInt, c: BigInt, n2: BigInt) -> Ordering {
    let zero = BigInt::from(0);
    if n1 == n2 {
        return sign1(&a, &(b + c), &n1);
    }
    let su = sign1(&a, &b, &n1);
    let sv = if n2 == zero {
        Ordering::Equal
    } else {
        c.cmp(&zero)
    };
    match (su, sv) {
        (s, Ordering::Equal) => s,
        (Ordering::Equal, s) => s,
        (x, y) if x == y => x,
        _ => {
            // |u| vs |v| via u^2 - v^2 = (a^2 + b^2 n1 - c^2 n2) + 2ab sqrt(n1)
            let rest = &a * &a + &b * &b * &n1 - &c * &c * &n2;
            let cross = BigInt::from(2) * &a * &b;
            match sign1(&rest, &cross, &n1) {
                Ordering::Greater => su,
                Ordering::Less => sv,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (x, y) = (self.to_f64(), other.to_f64());
        let tol = 1e-12 * (x.abs() + y.abs()) + 1e-300;
        if (x - y).abs() > tol {
            return x.partial_cmp(&y).unwrap_or(Ordering::Equal);
        }
        // (p1 + q1 r1)/m1 - (p2 + q2 r2)/m2, scaled by m1 m2 > 0
        let big = BigInt::from;
        let a = big(self.p) * big(other.m) - big(other.p) * big(self.m);
        let b = big(self.q) * big(other.m);
        let c = -big(other.q) * big(self.m);
        sign2(a, b, big(self.n), c, big(other.n))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.p, self.q) {
            (p, 0) => write!(f, "{p}/{}", self.m),
            (0, 1) => write!(f, "sqrt({})/{}", self.n, self.m),
            (0, q) => write!(f, "{q}*sqrt({})/{}", self.n, self.m),
            (p, q) => write!(f, "({p} + {q}*sqrt({}))/{}", self.n, self.m),
        }
    }
}

/// An interval of radii with exact endpoints; `hi == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusWindow {
    pub lo: Surd,
    pub hi: Option<Surd>,
    pub lo_inclusive: bool,
    pub hi_inclusive: bool,
}

impl RadiusWindow {
    /// Closed window `[lo, hi]`.
    pub fn closed(lo: Surd, hi: Surd) -> Self {
        Self {
            lo,
            hi: Some(hi),
            lo_inclusive: true,
            hi_inclusive: true,
        }
    }

    /// `[lo, infinity)`.
    pub fn from(lo: Surd) -> Self {
        Self {
            lo,
            hi: None,
            lo_inclusive: true,
            hi_inclusive: true,
        }
    }

    /// Every radius.
    pub fn all() -> Self {
        Self::from(Surd::zero())
    }

    /// Radii searched for the centred measure at level `k`:
    /// `[sqrt(3)/16, sqrt(3)/8 + 2^(1-k)]`.
    pub fn centred(k: u32) -> Self {
        let hi = Surd::sqrt3(1, 8).add_rational(2, 1i64 << k);
        Self::closed(Surd::sqrt3(1, 16), hi)
    }

    /// Radii between the inscribed circle of the central hole and the circumcircle
    /// of `T`: `[sqrt(3)/12, sqrt(3)/3]`.
    pub fn barycentric() -> Self {
        Self::closed(Surd::sqrt3(1, 12), Surd::sqrt3(1, 3))
    }

    pub fn is_valid(&self) -> bool {
        match &self.hi {
            None => true,
            Some(hi) => self.lo <= *hi,
        }
    }

    pub fn contains(&self, r: &Surd) -> bool {
        let lo_ok = match r.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_inclusive,
            Ordering::Less => false,
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(hi) => match r.cmp(hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_inclusive,
                Ordering::Greater => false,
            },
        };
        lo_ok && hi_ok
    }

    /// The inclusive range of squared distances `D` (in units of `scale^-2`) whose
    /// radius `sqrt(D) / scale` lies in the window, or `None` if there is none.
    pub fn sq_range(&self, scale: i64) -> Option<(u64, u64)> {
        let lo = self.lo.sq_ceil(scale, !self.lo_inclusive);
        let hi = match &self.hi {
            None => u64::MAX,
            Some(hi) => hi.sq_floor(scale, !self.hi_inclusive)?,
        };
        (lo <= hi).then_some((lo, hi))
    }
}
