//! Optimising inverse densities over centres and candidate radii.
//!
//! Two evaluators solve the per-centre problem. [`Strategy::Profile`] sorts every
//! point near the centre; [`Strategy::Pruned`] bounds ball masses with cylinder
//! triangles and only resolves single points near radii that can still beat the
//! best value found so far. Both are exact; pruning only ever discards radii
//! whose objective is provably worse than an attained value.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::ApproxSet;
use crate::cylinders::Node;
use crate::error::{GasketError, Result};
use crate::lattice::ExactPoint;
use crate::measure::{inverse_density_value, pow_half_dim, Value, DIMENSION};

/// Relative slack applied before discarding a radius.
const PRUNE_SLACK: f64 = 1e-9;
/// Relative gap below which two objectives are compared exactly.
const TIE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Goal {
    /// Least inverse density of closed balls.
    MinClosed,
    /// Greatest inverse density of open balls.
    MaxOpen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strategy {
    #[default]
    Pruned,
    Profile,
}

/// Point filter selecting the points whose distances are candidate radii.
pub type PointFilter<'a> = &'a (dyn Fn(i64, i64) -> bool + Sync);

/// A ball `B(centre, sqrt(sq) / centre.scale())` with `units` of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub centre: ExactPoint,
    pub sq: u64,
    pub units: u64,
    /// `(2d)^s / mu_k(ball)`.
    pub value: f64,
}

impl Candidate {
    pub fn new(centre: ExactPoint, sq: u64, units: u64) -> Self {
        Self {
            centre,
            sq,
            units,
            value: objective(sq, centre.den, units),
        }
    }

    pub fn exact_value(&self) -> Value {
        inverse_density_value(self.sq, self.centre.den, self.units)
    }

    pub fn radius(&self) -> f64 {
        self.centre.real_radius(self.sq)
    }
}

#[inline]
fn objective(sq: u64, den: i64, units: u64) -> f64 {
    pow_half_dim(4.0 * sq as f64 / (den * den) as f64) / units as f64
}

/// Orders objectives, treating values that are mathematically equal as equal.
///
/// `(4 D1 / e1^2)^(s/2) / u1 = (4 D2 / e2^2)^(s/2) / u2` holds exactly iff the
/// ratio of the squared radii is `4^t` and the mass ratio is `3^t`.
pub fn cmp_objective(x: &Candidate, y: &Candidate) -> Ordering {
    let gap = (x.value - y.value).abs();
    if gap > TIE_GAP * x.value.abs().max(y.value.abs()) {
        return x.value.total_cmp(&y.value);
    }
    if exactly_equal(x, y) {
        Ordering::Equal
    } else {
        x.value.total_cmp(&y.value)
    }
}

fn exactly_equal(x: &Candidate, y: &Candidate) -> bool {
    let (e1, e2) = (x.centre.den as u128, y.centre.den as u128);
    let mut rn = x.sq as u128 * e2 * e2;
    let mut rd = y.sq as u128 * e1 * e1;
    let (mut un, mut ud) = (x.units as u128, y.units as u128);
    if rn == 0 || rd == 0 {
        return rn == rd && un == ud;
    }
    // strip common factors: r = rn / rd must be a power of 4, u = un / ud the same power of 3
    let g = gcd(rn, rd);
    rn /= g;
    rd /= g;
    let g = gcd(un, ud);
    un /= g;
    ud /= g;
    match (log_exact(rn, 4), log_exact(rd, 4)) {
        (Some(t), Some(0)) => log_exact(un, 3) == Some(t) && ud == 1,
        (Some(0), Some(t)) => log_exact(ud, 3) == Some(t) && un == 1,
        _ => false,
    }
}

fn log_exact(mut x: u128, base: u128) -> Option<u32> {
    let mut t = 0;
    while x > 1 {
        if !x.is_multiple_of(base) {
            return None;
        }
        x /= base;
        t += 1;
    }
    (x == 1).then_some(t)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn cmp_centre(x: &ExactPoint, y: &ExactPoint) -> Ordering {
    let (dx, dy) = (x.den as i128, y.den as i128);
    (x.a as i128 * dy)
        .cmp(&(y.a as i128 * dx))
        .then((x.b as i128 * dy).cmp(&(y.b as i128 * dx)))
}

/// Total order with the preferred candidate first: best objective, then
/// smaller radius, then lexicographically smaller centre.
pub fn rank(goal: Goal, x: &Candidate, y: &Candidate) -> Ordering {
    let obj = cmp_objective(x, y);
    let obj = match goal {
        Goal::MinClosed => obj,
        Goal::MaxOpen => obj.reverse(),
    };
    obj.then_with(|| {
        let rx = x.sq as u128 * (y.centre.den * y.centre.den) as u128;
        let ry = y.sq as u128 * (x.centre.den * x.centre.den) as u128;
        rx.cmp(&ry)
    })
    .then_with(|| cmp_centre(&x.centre, &y.centre))
}

/// The per-centre search: candidate radii are distances `sqrt(D) / scale` with
/// `lo <= D <= hi` to points accepted by `candidate`.
#[derive(Clone, Copy)]
pub struct CentreProblem<'a> {
    pub centre: ExactPoint,
    pub lo: u64,
    pub hi: u64,
    pub candidate: PointFilter<'a>,
}

/// Exact evaluation by sorting all points within the largest radius.
pub fn evaluate_profile(set: &ApproxSet, goal: Goal, p: &CentreProblem<'_>) -> Option<Candidate> {
    let mut near: Vec<(u64, u64, bool)> = Vec::new();
    set.grid()
        .for_each_within(set.coords(), &p.centre, p.hi, |i, sq| {
            let (a, b) = set.coords()[i];
            let cand = sq >= p.lo && (p.candidate)(a as i64, b as i64);
            near.push((sq, set.units(i), cand));
        });
    near.sort_unstable_by_key(|e| e.0);
    let mut best: Option<Candidate> = None;
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
        let units = match goal {
            Goal::MinClosed => cum,
            Goal::MaxOpen => before,
        };
        if cand && units > 0 && sq > 0 {
            consider(goal, &mut best, Candidate::new(p.centre, sq, units));
        }
    }
    best
}

fn consider(goal: Goal, best: &mut Option<Candidate>, c: Candidate) {
    if best.is_none_or(|b| rank(goal, &c, &b) == Ordering::Less) {
        *best = Some(c);
    }
}

#[derive(Clone, Copy)]
struct Item {
    near: u64,
    far: u64,
    node: Node,
}

/// Largest `D` whose objective with `units` of mass can be `<= bound`.
fn radius_cap(bound: f64, units: u64, den: i64) -> u64 {
    if !bound.is_finite() {
        return u64::MAX;
    }
    let x = bound * (1.0 + PRUNE_SLACK) * units as f64;
    let d = (2.0 / DIMENSION * x.ln()).exp() * (den * den) as f64 / 4.0;
    if d >= 1.8e19 {
        u64::MAX
    } else {
        d.floor() as u64 + 1
    }
}

/// Least `D` whose objective with `units` of mass can be `>= bound`.
fn radius_floor(bound: f64, units: u64, den: i64) -> u64 {
    if bound <= 0.0 || units == 0 {
        return 0;
    }
    let x = bound * (1.0 - PRUNE_SLACK) * units as f64;
    let d = (2.0 / DIMENSION * x.ln()).exp() * (den * den) as f64 / 4.0;
    if d >= 1.8e19 {
        u64::MAX
    } else {
        (d.floor() as u64).saturating_sub(1)
    }
}

/// Restricts `alive` to the radii that may still beat `bound`, given mass bounds
/// from `items` (thresholds already shifted for open balls).
fn prune_alive(
    goal: Goal,
    items: &[Item],
    below: u64,
    alive: &[(u64, u64)],
    bound: f64,
    den: i64,
    shift: u64,
) -> Vec<(u64, u64)> {
    // Min: upper mass bound steps at `near`; Max: lower mass bound steps at `far`.
    let mut steps: Vec<(u64, u64)> = items
        .iter()
        .map(|it| {
            let t = match goal {
                Goal::MinClosed => it.near,
                Goal::MaxOpen => it.far,
            };
            (t.saturating_add(shift), it.node.units())
        })
        .collect();
    steps.sort_unstable_by_key(|s| s.0);

    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut push = |lo: u64, hi: u64| {
        if lo > hi {
            return;
        }
        match out.last_mut() {
            Some(last) if last.1.checked_add(1) == Some(lo) => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    };
    let mut j = 0;
    let mut mass = below;
    for &(lo, hi) in alive {
        while j < steps.len() && steps[j].0 <= lo {
            mass += steps[j].1;
            j += 1;
        }
        let mut cur = lo;
        loop {
            let next = if j < steps.len() && steps[j].0 <= hi {
                steps[j].0
            } else {
                hi.saturating_add(1)
            };
            let end = next - 1;
            match goal {
                Goal::MinClosed => {
                    if mass > 0 {
                        push(cur, end.min(radius_cap(bound, mass, den)));
                    }
                }
                Goal::MaxOpen => {
                    if mass == 0 {
                        push(cur, end);
                    } else {
                        push(cur.max(radius_floor(bound, mass, den)), end);
                    }
                }
            }
            if next > hi {
                break;
            }
            while j < steps.len() && steps[j].0 == next {
                mass += steps[j].1;
                j += 1;
            }
            cur = next;
        }
    }
    out
}

/// True when some `D` in `alive` has `lo <= D < hi`.
fn straddles(alive: &[(u64, u64)], lo: u64, hi: u64) -> bool {
    if lo >= hi {
        return false;
    }
    let i = alive.partition_point(|iv| iv.1 < lo);
    i < alive.len() && alive[i].0 < hi
}

/// Exact evaluation by cylinder refinement. Returns the best candidate of this
/// centre unless every radius is provably worse than `bound()`.
pub fn evaluate_pruned(
    level: u32,
    goal: Goal,
    p: &CentreProblem<'_>,
    bound: impl Fn() -> f64,
) -> Option<Candidate> {
    if p.lo > p.hi {
        return None;
    }
    let c = &p.centre;
    let den = c.den;
    let shift = match goal {
        Goal::MinClosed => 0,
        Goal::MaxOpen => 1,
    };
    let root = Node::root(level);
    let (near, far) = root.bounds(c);
    let mut items = vec![Item {
        near,
        far,
        node: root,
    }];
    let mut below = 0u64;
    let mut alive = vec![(p.lo, p.hi)];

    loop {
        alive = prune_alive(goal, &items, below, &alive, bound(), den, shift);
        if alive.is_empty() {
            return None;
        }
        let amin = alive[0].0;
        let amax = alive[alive.len() - 1].1;
        let mut next = Vec::with_capacity(items.len() * 2);
        let mut split = false;
        for it in items {
            // strict comparisons keep vertices at an alive radius as candidates
            if it.near > amax {
                continue;
            }
            if it.far < amin {
                below += it.node.units();
                continue;
            }
            // a vertex at distance `near` or `far` may itself be a candidate radius
            if !it.node.is_point() && straddles(&alive, it.near, it.far.saturating_add(1)) {
                split = true;
                for child in it.node.children() {
                    let (near, far) = child.bounds(c);
                    next.push(Item {
                        near,
                        far,
                        node: child,
                    });
                }
            } else {
                next.push(it);
            }
        }
        items = next;
        if !split {
            break;
        }
    }

    // Every item now either is a point or lies wholly on one side of each alive radius.
    let mut steps: Vec<(u64, u64)> = items
        .iter()
        .map(|it| (it.far.saturating_add(shift), it.node.units()))
        .collect();
    steps.sort_unstable_by_key(|s| s.0);
    let mut cands: Vec<u64> = items
        .iter()
        .filter(|it| it.node.is_point() && (p.candidate)(it.node.a0, it.node.b0))
        .map(|it| it.near)
        .filter(|&d| d > 0 && straddles(&alive, d, d + 1))
        .collect();
    cands.sort_unstable();
    cands.dedup();

    let mut best: Option<Candidate> = None;
    let mut mass = below;
    let mut j = 0;
    for d in cands {
        while j < steps.len() && steps[j].0 <= d {
            mass += steps[j].1;
            j += 1;
        }
        if mass > 0 {
            consider(goal, &mut best, Candidate::new(*c, d, mass));
        }
    }
    best
}

/// Sweep settings.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SweepOptions {
    pub strategy: Strategy,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    pub centres: usize,
    /// Centres whose evaluation produced a candidate within the running bound.
    pub resolved: usize,
}

/// Number of trailing zero bits shared by the centre coordinates (coarse first).
fn coarseness(c: &ExactPoint) -> u32 {
    let tz = |v: i64| if v == 0 { 64 } else { v.trailing_zeros() };
    tz(c.a).min(tz(c.b))
}

/// Orders centres so that those on coarse lattices come first; they tend to give
/// good bounds early.
pub fn order_centres(centres: &mut [ExactPoint]) {
    centres.sort_by(|x, y| {
        coarseness(y)
            .cmp(&coarseness(x))
            .then_with(|| cmp_centre(x, y))
    });
}

/// Optimises over all `centres`; `range` gives each centre's admissible `D` range.
pub fn sweep<R>(
    set: &ApproxSet,
    goal: Goal,
    centres: &[ExactPoint],
    range: R,
    candidate: PointFilter<'_>,
    opts: &SweepOptions,
) -> Result<(Option<Candidate>, SweepStats)>
where
    R: Fn(&ExactPoint) -> Option<(u64, u64)> + Sync,
{
    let level = set.level();
    let init = match goal {
        Goal::MinClosed => f64::INFINITY,
        Goal::MaxOpen => 0.0,
    };
    let shared = AtomicU64::new(init.to_bits());
    let resolved = AtomicUsize::new(0);
    let bound = || f64::from_bits(shared.load(AtomicOrdering::Relaxed));
    let publish = |v: f64| {
        let _ = shared.fetch_update(AtomicOrdering::Relaxed, AtomicOrdering::Relaxed, |cur| {
            let c = f64::from_bits(cur);
            let better = match goal {
                Goal::MinClosed => v < c,
                Goal::MaxOpen => v > c,
            };
            better.then_some(v.to_bits())
        });
    };

    let eval = |c: &ExactPoint| -> Option<Candidate> {
        let (lo, hi) = range(c)?;
        let problem = CentreProblem {
            centre: *c,
            lo,
            hi,
            candidate,
        };
        let found = match opts.strategy {
            Strategy::Profile => evaluate_profile(set, goal, &problem),
            Strategy::Pruned => evaluate_pruned(level, goal, &problem, bound),
        };
        if let Some(f) = &found {
            resolved.fetch_add(1, AtomicOrdering::Relaxed);
            publish(f.value);
        }
        found
    };

    // A few centres run alone first so the shared bound is useful from the start.
    let seed = centres.len().min(4);
    let mut best: Option<Candidate> = None;
    for c in &centres[..seed] {
        if let Some(f) = eval(c) {
            consider(goal, &mut best, f);
        }
    }

    let rest = &centres[seed..];
    let run = || {
        rest.par_iter().filter_map(eval).reduce_with(|x, y| {
            if rank(goal, &y, &x) == Ordering::Less {
                y
            } else {
                x
            }
        })
    };
    let found = match opts.workers {
        None => run(),
        Some(0) => {
            return Err(GasketError::Domain(
                "worker count must be at least 1".into(),
            ))
        }
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GasketError::Domain(format!("cannot start worker pool: {e}")))?
            .install(run),
    };
    if let Some(f) = found {
        consider(goal, &mut best, f);
    }
    let stats = SweepStats {
        centres: centres.len(),
        resolved: resolved.load(AtomicOrdering::Relaxed),
    };
    Ok((best, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::generate_approx_set;
    use crate::lattice::LatticePoint;
    use crate::surd::RadiusWindow;

    fn all(_: i64, _: i64) -> bool {
        true
    }

    #[test]
    fn exact_ties_are_detected() {
        let c = ExactPoint::from(LatticePoint::new(6, 20, 4).unwrap());
        // quadrupled squared radius with tripled mass gives the same objective
        let x = Candidate::new(c, 28, 10);
        let y = Candidate::new(c, 112, 30);
        assert_eq!(cmp_objective(&x, &y), Ordering::Equal);
        assert_eq!(rank(Goal::MinClosed, &x, &y), Ordering::Less);
        let z = Candidate::new(c, 29, 10);
        assert_eq!(cmp_objective(&x, &z), Ordering::Less);
    }

    #[test]
    fn pruned_matches_profile_per_centre() {
        for k in [5u32, 6, 7] {
            let set = generate_approx_set(k).unwrap();
            let window = RadiusWindow::centred(k);
            for (i, p) in set.points().enumerate() {
                if i % 7 != 0 {
                    continue;
                }
                let c = ExactPoint::from(p);
                let Some((lo, hi)) = window.sq_range(c.scale()) else {
                    continue;
                };
                let prob = CentreProblem {
                    centre: c,
                    lo,
                    hi,
                    candidate: &all,
                };
                for goal in [Goal::MinClosed, Goal::MaxOpen] {
                    let a = evaluate_profile(&set, goal, &prob);
                    let b = evaluate_pruned(k, goal, &prob, || match goal {
                        Goal::MinClosed => f64::INFINITY,
                        Goal::MaxOpen => 0.0,
                    });
                    assert_eq!(
                        a.map(|c| (c.sq, c.units)),
                        b.map(|c| (c.sq, c.units)),
                        "{p} {goal:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn pruned_respects_bounds() {
        let k = 7;
        let set = generate_approx_set(k).unwrap();
        let c = ExactPoint::from(LatticePoint::new(k, 40, 8).unwrap());
        let (lo, hi) = RadiusWindow::centred(k).sq_range(c.scale()).unwrap();
        let prob = CentreProblem {
            centre: c,
            lo,
            hi,
            candidate: &all,
        };
        let exact = evaluate_profile(&set, Goal::MinClosed, &prob).unwrap();
        let tight = evaluate_pruned(k, Goal::MinClosed, &prob, || exact.value).unwrap();
        assert_eq!((tight.sq, tight.units), (exact.sq, exact.units));
        assert!(evaluate_pruned(k, Goal::MinClosed, &prob, || exact.value * 0.99).is_none());
    }
}
