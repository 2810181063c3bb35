//! Command execution: guards, set loading and result assembly.

use std::io;

use thiserror::Error;

use gasket::approx::expected_cardinality;
use gasket::cache::load_or_generate;
use gasket::centred::{compute_centred, CentredOptions};
use gasket::density::{distance_profile, restricted_ball_bracket, CentredBounds};
use gasket::packing::{compute_packing, packing_candidate, PackingOptions, RadiusLimit};
use gasket::report::{diff_table, golden_bounds, render_table, TableDiff, TableRow};
use gasket::spherical::{barycentre_profile, compute_spherical_with};
use gasket::sweep::SweepOptions;
use gasket::{generate_approx_set, ApproxSet, ExactPoint, GasketError, RadiusWindow, Surd};
use serde::Serialize;

use crate::args::{
    BoundsArg, CentredArgs, Common, Format, PackingArgs, ProfileArgs, RestrictedArgs,
    SphericalArgs, TableArgs,
};
use crate::output::{encode, BoundsView, CentredView, PackingView, RestrictedView, SphericalView};
use crate::parse::{parse_centre, parse_radius, parse_window, ParseError};

/// Level whose centred sweep sets the work threshold for `--confirm-long`.
pub const LONG_RUN_LEVEL: u32 = 13;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Engine(#[from] GasketError),
    #[error("level {k} exceeds the configured capacity {capacity}")]
    Capacity { k: u32, capacity: u32 },
    #[error("estimated work for this run is large (about {work:.1e} point visits); pass --confirm-long to proceed")]
    NeedsConfirm { work: f64 },
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Capacity { .. } | CliError::Engine(GasketError::Capacity { .. }) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Rendered primary output and the exit status it implies.
pub struct Outcome {
    pub text: String,
    pub mismatch: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            mismatch: false,
        }
    }
}

/// Centres times points: a rough count of point visits for a sweep.
fn sweep_work(k: u32, full: bool) -> f64 {
    let n = expected_cardinality(k) as f64;
    let centres = if full { n } else { n / 9.0 };
    centres * n
}

fn check_capacity(k: u32, common: &Common) -> CliResult<()> {
    if k > common.capacity {
        return Err(CliError::Capacity {
            k,
            capacity: common.capacity,
        });
    }
    Ok(())
}

fn check_work(work: f64, common: &Common) -> CliResult<()> {
    if !common.confirm_long && work >= sweep_work(LONG_RUN_LEVEL, false) {
        return Err(CliError::NeedsConfirm { work });
    }
    Ok(())
}

fn load_set(k: u32, common: &Common) -> CliResult<ApproxSet> {
    Ok(match &common.cache_dir {
        Some(dir) => load_or_generate(dir, k)?.0,
        None => generate_approx_set(k)?,
    })
}

fn sweep_options(common: &Common) -> SweepOptions {
    SweepOptions {
        strategy: common.strategy.into(),
        workers: common.workers.map(|w| w as usize),
    }
}

fn write_profile(
    path: &std::path::Path,
    set: &ApproxSet,
    centre: &ExactPoint,
    window: &RadiusWindow,
    filter: Option<&dyn Fn(i64, i64) -> bool>,
) -> CliResult<()> {
    let profile = distance_profile(set, centre, window, filter);
    let mut buf = Vec::new();
    profile.write_csv(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn centred(args: &CentredArgs) -> CliResult<Outcome> {
    let c = &args.common;
    check_capacity(args.k, c)?;
    check_work(sweep_work(args.k, args.full_sweep), c)?;
    let set = load_set(args.k, c)?;
    let opts = CentredOptions {
        sweep: sweep_options(c),
        full_sweep: args.full_sweep,
    };
    let r = compute_centred(&set, &opts)?;
    if let Some(path) = &args.emit_profile {
        write_profile(
            path,
            &set,
            &r.centre.into(),
            &RadiusWindow::centred(r.k),
            None,
        )?;
    }
    let view = CentredView::new(&r);
    Ok(Outcome {
        mismatch: view.matches_reference == Some(false),
        text: encode(&view, c.format.unwrap_or(Format::Json)),
    })
}

pub fn packing(args: &PackingArgs) -> CliResult<Outcome> {
    let c = &args.common;
    check_capacity(args.k, c)?;
    check_work(sweep_work(args.k, false), c)?;
    let set = load_set(args.k, c)?;
    let opts = PackingOptions {
        variant: args.variant.into(),
        limit: args.limit.into(),
        sweep: sweep_options(c),
    };
    let r = compute_packing(&set, &opts)?;
    if let Some(path) = &args.emit_profile {
        let centre = ExactPoint::from(r.centre);
        let hi = match r.limit {
            RadiusLimit::Boundary => gasket::packing::boundary_sq_floor(&centre),
            RadiusLimit::FarthestVertex => gasket::packing::max_dist_to_rhombus(&centre),
        };
        let window = RadiusWindow::closed(
            opts.variant.radius_floor(r.k),
            Surd::sqrt_over(hi as i64, centre.scale()),
        );
        let k = r.k;
        let filter = move |a: i64, b: i64| packing_candidate(k, a, b);
        write_profile(path, &set, &centre, &window, Some(&filter))?;
    }
    Ok(Outcome::ok(encode(
        &PackingView::new(&r),
        c.format.unwrap_or(Format::Json),
    )))
}

pub fn spherical(args: &SphericalArgs) -> CliResult<Outcome> {
    let c = &args.common;
    check_capacity(args.k, c)?;
    let set = load_set(args.k, c)?;
    let r = compute_spherical_with(&set, args.full_sweep)?;
    if let Some(path) = &args.emit_profile {
        let profile = barycentre_profile(&set, args.full_sweep)?;
        let mut buf = Vec::new();
        profile.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
    }
    Ok(Outcome::ok(encode(
        &SphericalView::new(&r),
        c.format.unwrap_or(Format::Json),
    )))
}

#[derive(Serialize)]
struct TableView<'a> {
    rows: &'a [TableRow],
    results: Vec<CentredView>,
    diff: &'a TableDiff,
    matches: bool,
}

pub fn table(args: &TableArgs) -> CliResult<Outcome> {
    let c = &args.common;
    if args.k_min < 5 || args.k_min > args.k_max {
        return Err(CliError::Usage(format!(
            "need 5 <= k-min <= k-max, got {}..{}",
            args.k_min, args.k_max
        )));
    }
    check_capacity(args.k_max, c)?;
    let work: f64 = (args.k_min..=args.k_max)
        .map(|k| sweep_work(k, args.full_sweep))
        .sum();
    check_work(work, c)?;
    let opts = CentredOptions {
        sweep: sweep_options(c),
        full_sweep: args.full_sweep,
    };
    let mut results = Vec::new();
    for k in args.k_min..=args.k_max {
        let set = load_set(k, c)?;
        results.push(compute_centred(&set, &opts)?);
    }
    let rows: Vec<TableRow> = results.iter().map(TableRow::from_result).collect();
    let diff = diff_table(&rows);
    let text = match c.format.unwrap_or(Format::Human) {
        Format::Human => render_table(&rows, &diff),
        Format::Csv => {
            let mut s = String::from("k,d_k,C_inf,C_k,C_sup\n");
            for r in &rows {
                s += &format!("{},{},{},{},{}\n", r.k, r.d_k, r.c_inf, r.c_k, r.c_sup);
            }
            s
        }
        Format::Json => encode(
            &TableView {
                rows: &rows,
                results: results.iter().map(CentredView::new).collect(),
                diff: &diff,
                matches: diff.is_match(),
            },
            Format::Json,
        ),
    };
    Ok(Outcome {
        text,
        mismatch: !diff.is_match(),
    })
}

pub fn profile(args: &ProfileArgs) -> CliResult<Outcome> {
    let c = &args.common;
    if matches!(c.format, Some(f) if f != Format::Csv) {
        return Err(CliError::Usage("profile output is always CSV".into()));
    }
    check_capacity(args.k, c)?;
    let centre = parse_centre(&args.centre, args.k)?;
    let window = parse_window(&args.window, &centre, args.variant.into())?;
    let set = load_set(args.k, c)?;
    let profile = distance_profile(&set, &centre, &window, None);
    let mut buf = Vec::new();
    profile.write_csv(&mut buf)?;
    Ok(Outcome::ok(String::from_utf8(buf).expect("ascii csv")))
}

pub fn restricted_ball(args: &RestrictedArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let k = args.k;
    check_capacity(k, c)?;
    let centre = parse_centre(&args.centre, k)?;
    let optimal = args.radius.trim().eq_ignore_ascii_case("optimal");
    if optimal && centre != ExactPoint::barycentre(k) {
        return Err(CliError::Usage(
            "radius `optimal` is defined only at the barycentre".into(),
        ));
    }
    let explicit = if optimal {
        None
    } else {
        Some(parse_radius(&args.radius)?)
    };
    let golden = match args.bounds {
        BoundsArg::Golden => Some(golden_bounds(k).ok_or_else(|| {
            CliError::Usage(format!(
                "no reference bounds for k = {k}; use --bounds computed"
            ))
        })?),
        BoundsArg::Computed => {
            check_work(sweep_work(k, false), c)?;
            None
        }
    };
    let set = load_set(k, c)?;
    let radius = match explicit {
        Some(r) => r,
        None => {
            let s = compute_spherical_with(&set, false)?;
            Surd::sqrt_over(s.sq_radius as i64, centre.scale())
        }
    };
    let (bounds, source) = match golden {
        Some(b) => (b, "reference"),
        None => {
            let opts = CentredOptions {
                sweep: sweep_options(c),
                full_sweep: false,
            };
            let r = compute_centred(&set, &opts)?;
            (TableRow::from_result(&r).bounds(), "computed")
        }
    };
    let bracket = restricted_ball_bracket(&set, &centre, radius, &bounds)?;
    let CentredBounds {
        lower,
        estimate,
        upper,
    } = bounds;
    let view = RestrictedView::new(
        &bracket,
        centre,
        radius.to_string(),
        BoundsView {
            source,
            level: k,
            lower,
            estimate,
            upper,
        },
    );
    Ok(Outcome::ok(encode(&view, c.format.unwrap_or(Format::Json))))
}
