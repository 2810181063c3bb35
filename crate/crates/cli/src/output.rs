//! Serialisable views of results and the three output encodings.

use serde::Serialize;
use serde_json::Value as Json;

use gasket::centred::CentredResult;
use gasket::density::{ReportedBracket, RestrictedBallBracket};
use gasket::packing::PackingResult;
use gasket::report::{golden_row, GoldenRow, TableRow};
use gasket::spherical::SphericalResult;
use gasket::{ExactPoint, Rounding, Value};

use crate::args::Format;

#[derive(Debug, Serialize)]
pub struct CentreView {
    pub level: u32,
    pub a: i64,
    pub b: i64,
    pub den: i64,
    pub x: f64,
    pub y: f64,
}

impl From<ExactPoint> for CentreView {
    fn from(p: ExactPoint) -> Self {
        let (x, y) = p.to_real();
        Self {
            level: p.level,
            a: p.a,
            b: p.b,
            den: p.den,
            x,
            y,
        }
    }
}

fn six(v: &Value, mode: Rounding) -> String {
    v.format(6, mode)
}

#[derive(Debug, Serialize)]
pub struct CentredView {
    pub k: u32,
    pub centre: CentreView,
    pub sq_radius: u64,
    pub d_k: f64,
    pub c_k: f64,
    pub c_inf: f64,
    pub c_sup: f64,
    pub k_factor: f64,
    pub mass_units: u64,
    pub inner_mass_units: u64,
    pub centres_searched: usize,
    pub rounded: TableRow,
    pub reference: Option<GoldenRow>,
    pub matches_reference: Option<bool>,
}

impl CentredView {
    pub fn new(r: &CentredResult) -> Self {
        let rounded = TableRow::from_result(r);
        let reference = golden_row(r.k).copied();
        let matches_reference = reference.map(|g| {
            [g.d_k, g.c_inf, g.c_k, g.c_sup]
                == [
                    rounded.d_k.as_str(),
                    rounded.c_inf.as_str(),
                    rounded.c_k.as_str(),
                    rounded.c_sup.as_str(),
                ]
        });
        Self {
            k: r.k,
            centre: ExactPoint::from(r.centre).into(),
            sq_radius: r.sq_radius,
            d_k: r.d_k,
            c_k: r.c_k,
            c_inf: r.c_inf,
            c_sup: r.c_sup,
            k_factor: r.k_factor,
            mass_units: r.mass_units,
            inner_mass_units: r.inner_mass_units,
            centres_searched: r.stats.centres,
            rounded,
            reference,
            matches_reference,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PackingRounded {
    pub d_k: String,
    pub p_inf: String,
    pub p_k: String,
    pub p_sup: String,
}

#[derive(Debug, Serialize)]
pub struct PackingView {
    pub k: u32,
    pub variant: String,
    pub limit: gasket::packing::RadiusLimit,
    pub centre: CentreView,
    pub sq_radius: u64,
    pub d_k: f64,
    pub p_k: f64,
    pub p_inf: f64,
    pub p_sup: f64,
    pub k_factor: f64,
    pub mass_units: u64,
    pub outer_mass_units: u64,
    pub centres_searched: usize,
    pub rounded: PackingRounded,
}

impl PackingView {
    pub fn new(r: &PackingResult) -> Self {
        Self {
            k: r.k,
            variant: r.variant.to_string(),
            limit: r.limit,
            centre: ExactPoint::from(r.centre).into(),
            sq_radius: r.sq_radius,
            d_k: r.d_k,
            p_k: r.p_k,
            p_inf: r.p_inf,
            p_sup: r.p_sup,
            k_factor: r.k_factor,
            mass_units: r.mass_units,
            outer_mass_units: r.outer_mass_units,
            centres_searched: r.stats.centres,
            rounded: PackingRounded {
                d_k: six(&r.d_k_value, Rounding::Nearest),
                p_inf: six(&r.p_inf_value, Rounding::Down),
                p_k: six(&r.p_k_value, Rounding::Nearest),
                p_sup: six(&Value::irrational(r.p_sup), Rounding::Up),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SphericalRounded {
    pub d_k: String,
    pub lower: String,
    pub c_sph_k: String,
    pub upper: String,
    pub h_sph_upper: String,
    pub h_sph_estimate: String,
}

#[derive(Debug, Serialize)]
pub struct SphericalView {
    pub k: u32,
    pub centre: CentreView,
    pub sq_radius: u64,
    pub d_k: f64,
    pub c_sph_k: f64,
    pub lower: f64,
    pub upper: f64,
    pub k_factor: f64,
    pub h_sph_upper: f64,
    pub h_sph_estimate: f64,
    pub mass_units: u64,
    pub inner_mass_units: u64,
    pub rounded: SphericalRounded,
}

impl SphericalView {
    pub fn new(r: &SphericalResult) -> Self {
        let irr = Value::irrational;
        Self {
            k: r.k,
            centre: ExactPoint::barycentre(r.k).into(),
            sq_radius: r.sq_radius,
            d_k: r.d_k,
            c_sph_k: r.c_sph_k,
            lower: r.lower,
            upper: r.upper,
            k_factor: r.k_factor,
            h_sph_upper: r.h_sph_upper,
            h_sph_estimate: r.h_sph_estimate,
            mass_units: r.mass_units,
            inner_mass_units: r.inner_mass_units,
            rounded: SphericalRounded {
                d_k: six(&irr(r.d_k), Rounding::Nearest),
                lower: six(&r.lower_value, Rounding::Down),
                c_sph_k: six(&r.c_sph_value, Rounding::Nearest),
                upper: six(&irr(r.upper), Rounding::Up),
                // the reciprocal of a lower bound bounds the measure from above
                h_sph_upper: r.lower_value.recip().format(4, Rounding::Up),
                h_sph_estimate: r.c_sph_value.recip().format(4, Rounding::Nearest),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MassView {
    pub units: u64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct BoundsView {
    pub source: &'static str,
    pub level: u32,
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
}

#[derive(Debug, Serialize)]
pub struct RestrictedView {
    pub k: u32,
    pub centre: CentreView,
    pub radius: f64,
    pub radius_exact: String,
    pub masses: Vec<MassView>,
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
    pub reported: ReportedBracket,
    pub bounds: BoundsView,
}

impl RestrictedView {
    pub fn new(
        b: &RestrictedBallBracket,
        centre: ExactPoint,
        radius_exact: String,
        bounds: BoundsView,
    ) -> Self {
        let c = gasket::density::CentredBounds {
            lower: bounds.lower,
            estimate: bounds.estimate,
            upper: bounds.upper,
        };
        Self {
            k: b.level,
            centre: centre.into(),
            radius: b.radius,
            radius_exact,
            masses: b
                .masses
                .iter()
                .map(|m| MassView {
                    units: m.units,
                    value: m.to_f64(),
                })
                .collect(),
            lower: b.lower,
            estimate: b.estimate,
            upper: b.upper,
            reported: b.reported(&c),
            bounds,
        }
    }
}

fn flatten(prefix: &str, v: &Json, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Json::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Json::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Json::String(s) => out.push((prefix.to_string(), s.clone())),
        Json::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Encodes one record. CSV is a header and a single row of flattened fields; the
/// human form lists one `field: value` per line.
pub fn encode<T: Serialize>(value: &T, format: Format) -> String {
    let json = serde_json::to_value(value).expect("serialisable view");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).expect("json");
            s.push('\n');
            s
        }
        Format::Csv | Format::Human => {
            let mut cells = Vec::new();
            flatten("", &json, &mut cells);
            if format == Format::Csv {
                let (h, v): (Vec<String>, Vec<String>) = cells.into_iter().unzip();
                format!("{}\n{}\n", h.join(","), v.join(","))
            } else {
                cells.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
            }
        }
    }
}
