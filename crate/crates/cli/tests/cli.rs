use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &["--prec", "12", "--tdeg", "6", "--wdeg", "10", "--Tdeg", "3"];

fn klab(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_klab"));
    cmd.args(args);
    match cache {
        Some(d) => cmd.env("LAB_CACHE_DIR", d),
        None => cmd.env_remove("LAB_CACHE_DIR"),
    };
    cmd.output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(SMALL);
    v
}

#[test]
fn lpoly_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.json");
    let o = klab(&["lpoly", "--p", "5", "--k", "3", "--terms", "4", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["coeffs"], serde_json::json!(["1", "24", "-25", "0", "0"]));
    assert_eq!(v["result"]["status"], "pass");
    assert_eq!(v["config"]["k"], 3);
    let csv = fs::read_to_string(dir.path().join("l.newton.csv")).unwrap();
    assert!(csv.starts_with("m,ord_q,tag,vertex\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn rejects_unsupported_prime() {
    let o = klab(&["lpoly", "--p", "3", "--k", "1"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p >= 5"));
    let o = klab(&["lsyminf", "--p", "3", "--kappa", "1"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rejects_bad_input() {
    assert_eq!(klab(&["lpoly", "--k", "0"], None).status.code(), Some(3));
    assert_eq!(klab(&["frobmat", "--level", "9"], None).status.code(), Some(3));
    assert_eq!(klab(&["lsyminf", "--kappa", "x1"], None).status.code(), Some(3));
    assert_eq!(klab(&["nosuch"], None).status.code(), Some(3));
}

#[test]
fn negative_kappa_after_separator() {
    let a = klab(&with_small(&["lsyminf", "--kappa", "--", "-7"]), None);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = klab(&with_small(&["lsyminf", "--kappa=-7"]), None);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["kappa"], "-7");
    assert_eq!(v["result"]["coeffs"][0]["value"], "1");
}

#[test]
fn output_is_deterministic() {
    let args = with_small(&["lsyminf", "--kappa", "2"]);
    let a = klab(&args, None);
    let b = klab(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_directory_from_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let args = ["frobmat", "--prec", "10", "--tdeg", "4", "--ux", "20", "--cache", flag_dir.path().to_str().unwrap()];
    let a = klab(&args, Some(env_dir.path()));
    assert_eq!(a.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&a.stderr).contains("2 miss(es)"));
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 0);
    let names: Vec<String> = fs::read_dir(env_dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("theta-")));
    assert!(names.iter().any(|n| n.starts_with("frob-")));

    let b = klab(&args, Some(env_dir.path()));
    assert!(String::from_utf8_lossy(&b.stderr).contains("2 hit(s)"));
    assert_eq!(a.stdout, b.stdout);

    let c = klab(&args, None);
    assert!(String::from_utf8_lossy(&c.stderr).contains("2 miss(es)"));
    assert!(fs::read_dir(flag_dir.path()).unwrap().count() >= 2);
}

#[test]
fn frobmat_constant_terms() {
    let o = klab(&["frobmat", "--prec", "10", "--tdeg", "4", "--ux", "20"], None);
    let v = json(&o);
    let a4 = &v["result"]["matrix"]["a4"][0]["coeffs"];
    assert_eq!(a4[0], "5");
    assert_eq!(v["result"]["matrix"]["a1"][0]["coeffs"][0], "1");
}

#[test]
fn prec_above_storage_is_clamped() {
    let o = klab(&["frobmat", "--prec", "30", "--tdeg", "2", "--ux", "10"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds the storage limit 26"));
    assert_eq!(json(&o)["config"]["profile"]["n_padic"], 26);
}

#[test]
fn starved_identity_is_indeterminate() {
    let o = klab(&with_small(&["verify-identity", "--k", "1"]), None);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let checks = v["checks"].as_array().unwrap();
    let id = checks.iter().find(|c| c["name"] == "identity k=1").unwrap();
    assert_eq!(id["status"], "indeterminate");
}

#[test]
fn newton_csv() {
    let o = klab(&["newton", "--k", "3", "--Tdeg", "4"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().nth(3).unwrap().starts_with("2,2,"));
    let o = klab(&with_small(&["newton", "--kappa", "--", "-1"]), None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("m,ord_q"));
}
