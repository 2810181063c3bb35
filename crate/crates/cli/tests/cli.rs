use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn gasket(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gasket"));
    for (key, _) in std::env::vars() {
        if key.starts_with("GASKET_") {
            cmd.env_remove(key);
        }
    }
    let out = cmd.args(args).envs(env.iter().copied()).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

#[test]
fn single_row_table() {
    let r = gasket(&["table", "--k-min", "5", "--k-max", "5"], &[]);
    assert_eq!(r.code, 0);
    assert!(r
        .stdout
        .contains("  5 |  0.125000 |  0.409736 |  0.843750 |  2.700000"));
    assert!(r.stdout.contains("k=5: matches reference"));
}

#[test]
fn fast_table_matches_and_is_deterministic() {
    let args = ["table", "--k-min", "5", "--k-max", "10", "--format", "json"];
    let a = gasket(&args, &[]);
    let b = gasket(&args, &[("GASKET_WORKERS", "3")]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["matches"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    let csv = gasket(&["table", "--format", "csv"], &[]);
    assert!(csv.stdout.starts_with("k,d_k,C_inf,C_k,C_sup\n5,0.125000,"));
}

#[test]
fn cache_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let plain = gasket(&["centred", "--k", "8"], &[]);
    let first = gasket(&["centred", "--k", "8", "--cache-dir", cache], &[]);
    let second = gasket(&["centred", "--k", "8"], &[("GASKET_CACHE_DIR", cache)]);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(plain.stdout, second.stdout);
    assert!(dir.path().join("approx-k08.bin").exists());
}

#[test]
fn centred_fields_and_env_override() {
    let v = json(&gasket(&["centred"], &[("GASKET_K", "6")]));
    assert_eq!(v["k"], 6);
    assert_eq!(v["rounded"]["c_sup"], "1.255991");
    assert_eq!(v["matches_reference"], true);
    let human = gasket(&["centred", "--k", "5", "--format", "human"], &[]);
    assert!(human.stdout.contains("rounded.c_k: 0.843750\n"));
}

#[test]
fn spherical_at_level_fourteen() {
    let v = json(&gasket(&["spherical", "--k", "14"], &[]));
    let r = &v["rounded"];
    assert_eq!(r["c_sph_k"], "1.160630");
    assert_eq!(r["lower"], "1.160235");
    assert_eq!(r["upper"], "1.161408");
    assert_eq!(r["h_sph_upper"], "0.8619");
    assert_eq!(r["h_sph_estimate"], "0.8616");
    assert!((v["d_k"].as_f64().unwrap() - 0.3108).abs() < 5e-4);
}

#[test]
fn restricted_ball_reference_values() {
    let v = json(&gasket(&["restricted-ball", "--k", "14"], &[]));
    let r = &v["reported"];
    assert_eq!(
        r["masses"],
        serde_json::json!(["0.546105", "0.546290", "0.546447"])
    );
    assert_eq!(
        (
            r["lower"].as_str(),
            r["estimate"].as_str(),
            r["upper"].as_str()
        ),
        (Some("0.547803"), Some("0.548968"), Some("0.549513"))
    );
    assert_eq!(v["bounds"]["source"], "reference");
}

#[test]
fn restricted_ball_edge_cases() {
    let whole = json(&gasket(
        &["restricted-ball", "--k", "14", "--radius", "2"],
        &[],
    ));
    assert_eq!(whole["reported"]["estimate"], "1.004903");
    assert_eq!(whole["estimate"].as_f64(), Some(1.004903));

    let tiny = gasket(
        &[
            "restricted-ball",
            "--k",
            "6",
            "--radius",
            "1/64",
            "--bounds",
            "computed",
        ],
        &[],
    );
    assert_eq!(tiny.code, 2);
    assert!(tiny.stderr.contains("must exceed"), "{}", tiny.stderr);

    let no_ref = gasket(&["restricted-ball", "--k", "4", "--radius", "1/2"], &[]);
    assert_eq!(no_ref.code, 2);
    let computed = json(&gasket(
        &[
            "restricted-ball",
            "--k",
            "6",
            "--radius",
            "1/2",
            "--bounds",
            "computed",
        ],
        &[],
    ));
    assert_eq!(computed["bounds"]["source"], "computed");
    assert_eq!(computed["bounds"]["estimate"].as_f64(), Some(0.930364));
}

#[test]
fn profile_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let r = gasket(
        &[
            "profile",
            "--k",
            "14",
            "--centre",
            "f_010(z_2)",
            "--window",
            "sqrt(3)/16..sqrt(3)/8+2^-13",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("d,mass_open,mass_closed,density,inverse_density")
    );
    let min = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(format!("{min:.6}"), "1.004903");

    let empty = gasket(
        &[
            "profile",
            "--k",
            "3",
            "--centre",
            "barycentre",
            "--window",
            "1/1000..1/999",
        ],
        &[],
    );
    assert_eq!(
        empty.stdout,
        "d,mass_open,mass_closed,density,inverse_density\n"
    );

    let bary = gasket(
        &[
            "profile",
            "--k",
            "10",
            "--centre",
            "barycentre",
            "--window",
            "barycentric",
        ],
        &[],
    );
    assert!(bary.stdout.lines().count() > 10);
}

#[test]
fn emitted_profile_and_packing() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.csv");
    let v = json(&gasket(
        &[
            "packing",
            "--k",
            "8",
            "--variant",
            "improved",
            "--emit-profile",
            p.to_str().unwrap(),
        ],
        &[],
    ));
    assert_eq!(v["variant"], "improved");
    assert_eq!(v["limit"], "boundary");
    let (lo, mid, hi) = (
        v["p_inf"].as_f64().unwrap(),
        v["p_k"].as_f64().unwrap(),
        v["p_sup"].as_f64().unwrap(),
    );
    assert!(lo <= mid && mid <= hi);
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("d,"));
    let early = gasket(&["packing", "--k", "5"], &[]);
    assert_eq!(early.code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(gasket(&["centred", "--k", "15"], &[]).code, 3);
    assert_eq!(
        gasket(
            &["centred", "--k", "21", "--capacity", "30", "--confirm-long"],
            &[]
        )
        .code,
        3
    );
    let long = gasket(&["centred", "--k", "13"], &[]);
    assert_eq!(long.code, 2);
    assert!(long.stderr.contains("--confirm-long"));
    assert_eq!(
        gasket(&["table", "--k-min", "4", "--k-max", "6"], &[]).code,
        2
    );
    assert_eq!(
        gasket(&["table", "--k-min", "7", "--k-max", "6"], &[]).code,
        2
    );
    assert_eq!(gasket(&["centred", "--k", "3"], &[]).code, 2);
    assert_eq!(
        gasket(&["profile", "--k", "5", "--centre", "somewhere"], &[]).code,
        2
    );
    assert_eq!(
        gasket(
            &["profile", "--k", "5", "--centre", "z0", "--format", "json"],
            &[]
        )
        .code,
        2
    );
    assert_eq!(
        gasket(&["centred", "--k", "5", "--workers", "0"], &[]).code,
        2
    );
    assert_eq!(gasket(&["centred"], &[]).code, 2);
}
