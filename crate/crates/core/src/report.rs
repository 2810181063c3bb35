//! Six-decimal presentation of centred results and comparison with reference rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::centred::CentredResult;
use crate::density::CentredBounds;
use crate::measure::{Rounding, Value};

/// A reference row: `k, d_k, C_inf, C_k, C_sup` as printed to six decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoldenRow {
    pub k: u32,
    pub d_k: &'static str,
    pub c_inf: &'static str,
    pub c_k: &'static str,
    pub c_sup: &'static str,
}

const fn row(
    k: u32,
    d_k: &'static str,
    c_inf: &'static str,
    c_k: &'static str,
    c_sup: &'static str,
) -> GoldenRow {
    GoldenRow {
        k,
        d_k,
        c_inf,
        c_k,
        c_sup,
    }
}

/// Published estimates of the centred measure for `k = 5..=14`.
pub const GOLDEN_TABLE: [GoldenRow; 10] = [
    row(5, "0.125000", "0.409736", "0.843750", "2.700000"),
    row(6, "0.143205", "0.622414", "0.930364", "1.255991"),
    row(7, "0.143205", "0.790389", "0.978694", "1.141810"),
    row(8, "0.144690", "0.894667", "0.999143", "1.068851"),
    row(9, "0.144690", "0.945925", "1.000593", "1.035149"),
    row(10, "0.147354", "0.975686", "1.003735", "1.016677"),
    row(11, "0.145596", "0.990358", "1.004556", "1.011856"),
    row(12, "0.145834", "0.997550", "1.004691", "1.007754"),
    row(13, "0.145957", "1.001285", "1.004867", "1.006332"),
    row(14, "0.145957", "1.003109", "1.004903", "1.005611"),
];

pub fn golden_row(k: u32) -> Option<&'static GoldenRow> {
    GOLDEN_TABLE.iter().find(|r| r.k == k)
}

/// Reference bounds for level `k`, as six-decimal values.
pub fn golden_bounds(k: u32) -> Option<CentredBounds> {
    let r = golden_row(k)?;
    let p = |s: &str| s.parse::<f64>().expect("reference cell");
    Some(CentredBounds {
        lower: p(r.c_inf),
        estimate: p(r.c_k),
        upper: p(r.c_sup),
    })
}

/// A computed row rounded as published: `C_inf` down, `C_sup` up, the rest to nearest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    pub d_k: String,
    pub c_inf: String,
    pub c_k: String,
    pub c_sup: String,
}

impl TableRow {
    pub fn from_result(r: &CentredResult) -> Self {
        Self {
            k: r.k,
            d_k: r.d_k_value.format(6, Rounding::Nearest),
            c_inf: Value::irrational(r.c_inf).format(6, Rounding::Down),
            c_k: r.c_k_value.format(6, Rounding::Nearest),
            c_sup: r.c_sup_value.format(6, Rounding::Up),
        }
    }

    /// The row's six-decimal bounds.
    pub fn bounds(&self) -> CentredBounds {
        let p = |s: &str| s.parse::<f64>().expect("formatted cell");
        CentredBounds {
            lower: p(&self.c_inf),
            estimate: p(&self.c_k),
            upper: p(&self.c_sup),
        }
    }

    fn cells(&self) -> [(&'static str, &str); 4] {
        [
            ("d_k", &self.d_k),
            ("C_inf", &self.c_inf),
            ("C_k", &self.c_k),
            ("C_sup", &self.c_sup),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDiff {
    pub k: u32,
    pub column: String,
    pub computed: String,
    pub reference: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDiff {
    pub compared_rows: Vec<u32>,
    /// Levels with no reference row.
    pub no_reference: Vec<u32>,
    pub mismatches: Vec<CellDiff>,
}

impl TableDiff {
    pub fn is_match(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn diff_table(rows: &[TableRow]) -> TableDiff {
    let mut diff = TableDiff::default();
    for r in rows {
        let Some(g) = golden_row(r.k) else {
            diff.no_reference.push(r.k);
            continue;
        };
        diff.compared_rows.push(r.k);
        let reference = [g.d_k, g.c_inf, g.c_k, g.c_sup];
        for ((column, computed), want) in r.cells().into_iter().zip(reference) {
            if computed != want {
                diff.mismatches.push(CellDiff {
                    k: r.k,
                    column: column.into(),
                    computed: computed.into(),
                    reference: want.into(),
                });
            }
        }
    }
    diff
}

/// Plain-text table followed by the comparison summary.
pub fn render_table(rows: &[TableRow], diff: &TableDiff) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} | {:>9} | {:>9} | {:>9} | {:>9}",
        "k", "d_k", "C_inf", "C_k", "C_sup"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>3} | {:>9} | {:>9} | {:>9} | {:>9}",
            r.k, r.d_k, r.c_inf, r.c_k, r.c_sup
        );
    }
    for k in &diff.compared_rows {
        let bad: Vec<&CellDiff> = diff.mismatches.iter().filter(|c| c.k == *k).collect();
        if bad.is_empty() {
            let _ = writeln!(out, "k={k}: matches reference");
        }
        for c in bad {
            let _ = writeln!(
                out,
                "k={k}: {} computed {} reference {}",
                c.column, c.computed, c.reference
            );
        }
    }
    for k in &diff.no_reference {
        let _ = writeln!(out, "k={k}: no reference");
    }
    out
}
