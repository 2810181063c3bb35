//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line.
//!
//! Run with `cargo test -p gasket --test acceptance -- --nocapture` to see the report.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gasket::approx::{cylinder_subset, generate_approx_set};
use gasket::centred::{compute_centred, CentredOptions, CentredResult};
use gasket::density::{ball_mass, distance_profile, restricted_ball_bracket, BallRadius, BallSpec};
use gasket::packing::{compute_packing, PackingOptions, Variant};
use gasket::report::{diff_table, golden_bounds, golden_row, TableRow};
use gasket::spherical::{compute_spherical, compute_spherical_with};
use gasket::{ApproxSet, ExactPoint, Mass, RadiusWindow, Rounding, Surd, Word};

struct Report {
    lines: Vec<(String, bool, bool, String)>,
}

impl Report {
    fn new() -> Self {
        Self { lines: Vec::new() }
    }

    fn record(&mut self, id: &str, required: bool, pass: bool, detail: String) {
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((id.into(), required, pass, detail));
    }

    fn finish(self) {
        let failed: Vec<&str> = self
            .lines
            .iter()
            .filter(|(_, required, pass, _)| *required && !pass)
            .map(|(id, ..)| id.as_str())
            .collect();
        assert!(failed.is_empty(), "failed criteria: {failed:?}");
    }
}

fn centred(set: &ApproxSet) -> CentredResult {
    compute_centred(set, &CentredOptions::default()).unwrap()
}

/// Exact string match per cell and raw doubles within `1e-6` of the reference.
fn table_check(results: &[CentredResult]) -> (bool, String) {
    let rows: Vec<TableRow> = results.iter().map(TableRow::from_result).collect();
    let diff = diff_table(&rows);
    let mut worst = 0f64;
    for r in results {
        let g = golden_row(r.k).unwrap();
        let pairs = [
            (r.d_k, g.d_k),
            (r.c_inf, g.c_inf),
            (r.c_k, g.c_k),
            (r.c_sup, g.c_sup),
        ];
        for (x, s) in pairs {
            worst = worst.max((x - s.parse::<f64>().unwrap()).abs());
        }
    }
    let ok = diff.is_match() && diff.compared_rows.len() == results.len() && worst < 1e-6;
    let detail = if diff.is_match() {
        format!("all cells match; max raw deviation {worst:.2e}")
    } else {
        format!("mismatches {:?}", diff.mismatches)
    };
    (ok, detail)
}

fn rescan_mass(set: &ApproxSet, ball: &BallSpec) -> Ratio<u64> {
    let c = ball.centre;
    let scale = c.scale();
    let mut units = 0u64;
    for (i, p) in set.points().enumerate() {
        let sq = c.sq_distance_to(p.a, p.b);
        let inside = match ball.radius {
            BallRadius::Sq(d) => sq < d || (ball.closed && sq == d),
            BallRadius::Exact(r) => {
                let dist = Surd::sqrt_over(sq as i64, scale);
                dist < r || (ball.closed && dist == r)
            }
        };
        if inside {
            units += set.units(i);
        }
    }
    Mass::new(units, set.level()).to_ratio()
}

fn random_ball(rng: &mut ChaCha8Rng, k: u32) -> BallSpec {
    let n = 1i64 << k;
    let den = if rng.gen_bool(0.3) { 3 } else { 1 };
    let b = rng.gen_range(0..=n * den / 2);
    let a = rng.gen_range(b..=n * den - b);
    let centre = ExactPoint::new(k, a, b, den).unwrap();
    let scale = centre.scale();
    let radius = match rng.gen_range(0..3) {
        0 => BallRadius::Sq(rng.gen_range(0..=(scale * scale) as u64)),
        1 => BallRadius::Exact(Surd::sqrt3(rng.gen_range(1..=64), rng.gen_range(16..=128))),
        _ => BallRadius::Exact(
            Surd::sqrt3(rng.gen_range(1..=16), 16).add_rational(rng.gen_range(-4..=4), n),
        ),
    };
    if rng.gen_bool(0.5) {
        BallSpec::closed(centre, radius)
    } else {
        BallSpec::open(centre, radius)
    }
}

#[test]
fn acceptance() {
    let mut report = Report::new();
    let sets: BTreeMap<u32, ApproxSet> = (1..=14)
        .map(|k| (k, generate_approx_set(k).unwrap()))
        .collect();

    // 1. reference table, fast range
    let fast: Vec<CentredResult> = (5..=10).map(|k| centred(&sets[&k])).collect();
    let (ok, detail) = table_check(&fast);
    report.record("1 table k=5..10", true, ok, detail);

    // 2. reference table, extended range, and the k=14 centre
    let slow: Vec<CentredResult> = (11..=14).map(|k| centred(&sets[&k])).collect();
    let (ok, detail) = table_check(&slow);
    let c14 = slow.last().unwrap().centre;
    // f_010(z_2) = (5/16, sqrt(3)/16)
    let centre_ok = (c14.a, c14.b) == (5 << 10, 1 << 10);
    report.record(
        "2 table k=11..14",
        true,
        ok && centre_ok,
        format!("{detail}; k=14 centre ({}, {})/2^14", c14.a, c14.b),
    );

    // 3. spherical estimate at k=14
    let sph = compute_spherical(&sets[&14]).unwrap();
    let cells = [
        sph.c_sph_value.format(6, Rounding::Nearest),
        sph.lower_value.format(6, Rounding::Down),
        gasket::Value::irrational(sph.upper).format(6, Rounding::Up),
        sph.lower_value.recip().format(4, Rounding::Up),
        sph.c_sph_value.recip().format(4, Rounding::Nearest),
    ];
    let want = ["1.160630", "1.160235", "1.161408", "0.8619", "0.8616"];
    let ok = cells == want && (sph.d_k - 0.3108).abs() <= 5e-4 && sph.h_sph_upper <= 0.8619;
    report.record(
        "3 spherical k=14",
        true,
        ok,
        format!(
            "C={} bracket [{}, {}] H<={} H~{} D={:.6}",
            cells[0], cells[1], cells[2], cells[3], cells[4], sph.d_k
        ),
    );

    // 4. restricted-ball bracket at the spherical optimum
    let xb = ExactPoint::barycentre(14);
    let radius = Surd::sqrt_over(sph.sq_radius as i64, xb.scale());
    let bounds = golden_bounds(14).unwrap();
    let rb = restricted_ball_bracket(&sets[&14], &xb, radius, &bounds).unwrap();
    let rep = rb.reported(&bounds);
    let ok = rep.masses == ["0.546105", "0.546290", "0.546447"]
        && [
            rep.lower.as_str(),
            rep.estimate.as_str(),
            rep.upper.as_str(),
        ] == ["0.547803", "0.548968", "0.549513"];
    report.record(
        "4 restricted ball k=14",
        true,
        ok,
        format!(
            "masses {:?} bracket [{}, {}] estimate {}",
            rep.masses, rep.lower, rep.upper, rep.estimate
        ),
    );

    // 5. property suite
    let mut ok = true;
    let mut notes = Vec::new();
    for k in 1..=9 {
        let s = &sets[&k];
        ok &= s.total_mass().to_ratio() == Ratio::from_integer(1);
        ok &= s.len() as u64 == (3u64.pow(k) + 3) / 2;
    }
    notes.push(format!(
        "mass and cardinality {}",
        if ok { "ok" } else { "bad" }
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut oracle_ok = true;
    for k in 1..=7 {
        for _ in 0..1000 {
            let ball = random_ball(&mut rng, k);
            oracle_ok &= ball_mass(&sets[&k], &ball).to_ratio() == rescan_mass(&sets[&k], &ball);
        }
    }
    notes.push(format!("oracle {}", if oracle_ok { "ok" } else { "bad" }));
    ok &= oracle_ok;

    let mut order_ok = true;
    for r in fast.iter().chain(&slow) {
        order_ok &= r.c_inf <= r.c_k && r.c_k <= r.c_sup;
    }
    let mut packings = Vec::new();
    for k in 6..=11 {
        for variant in [Variant::Original, Variant::Improved] {
            let opts = PackingOptions {
                variant,
                ..Default::default()
            };
            let p = compute_packing(&sets[&k], &opts).unwrap();
            order_ok &= p.p_inf <= p.p_k && p.p_k <= p.p_sup;
            packings.push(p);
        }
    }
    for k in 3..=14 {
        let s = compute_spherical(&sets[&k]).unwrap();
        order_ok &= s.lower <= s.c_sph_k && s.c_sph_k <= s.upper;
    }
    notes.push(format!("orderings {}", if order_ok { "ok" } else { "bad" }));
    ok &= order_ok;

    let mut sym = 0f64;
    for k in 4..=9 {
        let restricted = centred(&sets[&k]);
        let full = compute_centred(
            &sets[&k],
            &CentredOptions {
                full_sweep: true,
                ..Default::default()
            },
        )
        .unwrap();
        sym = sym.max((full.c_k - restricted.c_k).abs() / restricted.c_k);
        let a = compute_spherical_with(&sets[&k], false).unwrap();
        let b = compute_spherical_with(&sets[&k], true).unwrap();
        sym = sym.max((a.c_sph_k - b.c_sph_k).abs() / a.c_sph_k);
    }
    notes.push(format!("symmetry rel diff {sym:.1e}"));
    ok &= sym <= 1e-12;

    // balls whose points all lie in S_0 away from its two junctions
    let mut scaling_ok = true;
    let mut sampled = 0;
    for k in 3..=9 {
        let n = 1i64 << k;
        let (s, parent) = (&sets[&k], &sets[&(k - 1)]);
        for _ in 0..200 {
            let b = rng.gen_range(0..=n / 4);
            let a = rng.gen_range(b..=n / 2 - b);
            let x = ExactPoint::new(k, a, b, 1).unwrap();
            let d = rng.gen_range(0..=(n * n / 16) as u64);
            let mut inside = true;
            let mut units = 0;
            for (i, p) in s.points().enumerate() {
                if x.sq_distance_to(p.a, p.b) <= d {
                    inside &= p.a + p.b <= n / 2
                        && (p.a, p.b) != (n / 2, 0)
                        && (p.a, p.b) != (n / 4, n / 4);
                    units += s.units(i);
                }
            }
            if !inside {
                continue;
            }
            sampled += 1;
            // f_0^{-1} doubles real lengths, which keeps lattice coordinates one level down
            let y = ExactPoint::new(k - 1, a, b, 1).unwrap();
            let lhs = Mass::new(units, k).to_ratio();
            let rhs = ball_mass(parent, &BallSpec::closed(y, BallRadius::Sq(d))).to_ratio()
                / Ratio::from_integer(3);
            scaling_ok &= lhs == rhs;
        }
    }
    notes.push(format!(
        "scaling {} over {sampled} balls",
        if scaling_ok { "ok" } else { "bad" }
    ));
    ok &= scaling_ok && sampled > 100;

    let mut cyl_ok = true;
    let k = 8;
    for _ in 0..200 {
        let mut words: Vec<Word> = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let len = rng.gen_range(1..=4);
            let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..3)).collect();
            words.push(Word::new(w).unwrap());
        }
        // keep words that are not prefixes of each other
        words.sort_by_key(|w| w.len());
        let mut kept: Vec<Word> = Vec::new();
        for w in words {
            if !kept.iter().any(|u| w.symbols().starts_with(u.symbols())) {
                kept.push(w);
            }
        }
        let mut pts: Vec<(i64, i64)> = kept
            .iter()
            .flat_map(|w| cylinder_subset(&sets[&k], w).unwrap())
            .map(|p| (p.a, p.b))
            .collect();
        pts.sort_unstable();
        pts.dedup();
        let units: u64 = pts
            .iter()
            .map(|&(a, b)| sets[&k].weight_class_of(a, b).units())
            .sum();
        let lhs = Mass::new(units, k).to_ratio();
        let rhs: Ratio<u64> = kept
            .iter()
            .map(|w| Ratio::new(1, 3u64.pow(w.len() as u32)))
            .sum();
        cyl_ok &= lhs >= rhs;
    }
    notes.push(format!(
        "cylinder inequality {}",
        if cyl_ok { "ok" } else { "bad" }
    ));
    ok &= cyl_ok;
    report.record("5 property suite", true, ok, notes.join("; "));

    // 6. packing brackets and widths
    let mut ok = true;
    let mut widths = Vec::new();
    for pair in packings.chunks(2) {
        let (o, i) = (&pair[0], &pair[1]);
        let (wo, wi) = (o.p_sup - o.p_inf, i.p_sup - i.p_inf);
        ok &= wi <= wo;
        widths.push(format!("k={} {:.4}/{:.4}", o.k, wo, wi));
    }
    report.record(
        "6 packing orderings and widths",
        true,
        ok,
        format!(
            "orderings checked in 5; widths original/improved {}",
            widths.join(", ")
        ),
    );

    // 6, extended: both extremes of the profile at f_010(z_2), k=14
    let s14 = &sets[&14];
    let x = ExactPoint::new(14, 5 << 10, 1 << 10, 1).unwrap();
    let low = distance_profile(s14, &x, &RadiusWindow::centred(14), None)
        .argmin_inverse_density()
        .unwrap()
        .1
        .approx;
    let hi_sq = gasket::packing::boundary_sq_floor(&x);
    let window = RadiusWindow::closed(
        Variant::Original.radius_floor(14),
        Surd::sqrt_over(hi_sq as i64, x.scale()),
    );
    let high = distance_profile(s14, &x, &window, None)
        .argmax_open_inverse_density()
        .unwrap()
        .1
        .approx;
    // for comparison, the same window at the centre of the rhombus
    let mid = ExactPoint::new(14, 1 << 13, 0, 1).unwrap();
    let mid_window = RadiusWindow::closed(
        Variant::Original.radius_floor(14),
        Surd::sqrt_over(gasket::packing::boundary_sq_floor(&mid) as i64, mid.scale()),
    );
    let mid_high = distance_profile(s14, &mid, &mid_window, None)
        .argmax_open_inverse_density()
        .unwrap()
        .1
        .approx;
    let ok = (low - 1.0049).abs() <= 1e-3 && (high - 1.6683).abs() <= 1e-3;
    report.record(
        "6x profile extremes at f_010(z_2), k=14 (optional)",
        false,
        ok,
        format!(
            "min {low:.6} (target 1.0049), max {high:.6} (target 1.6683); max at (1/2, 0) is {mid_high:.6}"
        ),
    );

    report.finish();
}
