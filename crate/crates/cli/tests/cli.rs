use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2height"))
}

fn jobs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2height-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn compare_ex1_passes() {
    let job = jobs().join("ex1.job");
    let o = run(&["compare", job.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    let d: f64 = v["discrepancy"].as_str().unwrap().parse().unwrap();
    assert!(d < 1e-10);
    for key in ["engine", "local", "total", "discrepancy", "precision_bits", "warnings", "hypotheses"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["local"]["finite_part"].is_object());
    assert!(v["local"]["arch_terms"].is_array());
}

#[test]
fn igusa_ex2_prints_factored_ratios() {
    let curve = jobs().join("ex2.curve");
    let o = run(&["igusa", curve.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("J2^5/J10: -2^25*3^-19*5^-12*7^15*41^-12*39079^5"), "{s}");
    assert!(s.contains("J6^5/J10^3: 2^25*3^-72*5^-36*7^5*41^-36*487^5*3449^5*3467^5*42488533591199^5"));
    assert!(s.contains("J8^5/J10^4: -2^40*3^-91*5^-48*41^-48*643^5*1871^5*19780292330676250264630993^5"));
    assert!(s.contains("exact: 2/5*log(3) + 1/5*log(5) + 1/5*log(41)"));
}

#[test]
fn reduce_of_reduced_matrix_is_identity() {
    let m = scratch("reduced.mat", "z11 = 0.1+1.2*i\nz12 = 0.2+0.3*i\nz22 = -0.3+1.5*i\n");
    let o = run(&["reduce", "--matrix", m.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["identity"], true);
    assert_eq!(v["gottschling_steps"], 0);
}

#[test]
fn reduce_moves_a_small_matrix() {
    let m = scratch("small.mat", "z11 = 0.3+0.2*i\nz12 = 0.1+0.05*i\nz22 = 0.4+0.3*i\n");
    let v = json(&run(&["reduce", "--matrix", m.to_str().unwrap(), "--json"]));
    assert_eq!(v["identity"], false);
}

#[test]
fn malformed_job_reports_line() {
    let job = scratch("bad.job", "P = -1, 0, 0, 0, 0, 1\nfoo = 1\n");
    let o = run(&["compare", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = String::from_utf8_lossy(&o.stderr);
    assert!(e.contains("line 2") && e.contains("foo"), "{e}");
}

#[test]
fn mismatched_engines_exit_two() {
    let ex1 = std::fs::read_to_string(jobs().join("ex1.job")).unwrap();
    let text = ex1.replace("P = -1, 0, 0, 0, 0, 1", "P = 1, -3, -6, 2, 3, -1");
    let job = scratch("mismatch.job", &text);
    let o = run(&["compare", job.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn reports_are_byte_identical() {
    let job = jobs().join("ex3.job");
    let a = run(&["compare", job.to_str().unwrap(), "--both-orderings"]);
    let b = run(&["compare", job.to_str().unwrap(), "--both-orderings"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(s.contains("swapped:"));
}

#[test]
fn precision_flag_overrides_job() {
    let job = jobs().join("ex2.job");
    let v = json(&run(&["height-colmez", job.to_str().unwrap(), "--precision-bits", "128", "--json"]));
    assert_eq!(v["precision_bits"], 128);
    assert_eq!(v["engine"], "colmez");
}

#[test]
fn doubling_precision_stays_within_error_bound() {
    let job = jobs().join("ex2.job");
    let a = json(&run(&["height-local", job.to_str().unwrap(), "--json"]));
    let b = json(&run(&["height-local", job.to_str().unwrap(), "--precision-bits", "512", "--json"]));
    let total = |v: &serde_json::Value| v["total"].as_str().unwrap().to_string();
    let bound: f64 = a["error_bound"].as_str().unwrap().parse().unwrap();
    let (ta, tb) = (total(&a), total(&b));
    let digits = ta.split('e').next().unwrap().len() - 2;
    // Compare the 256-bit digits against the 512-bit value truncated to the same length.
    let (ma, ea) = ta.split_once('e').unwrap();
    let (mb, eb) = tb.split_once('e').unwrap();
    assert_eq!(ea, eb);
    let ma: String = ma.chars().filter(|c| c.is_ascii_digit()).collect();
    let mb: String = mb.chars().filter(|c| c.is_ascii_digit()).take(ma.len()).collect();
    let (na, nb): (i128, i128) = (ma[..30].parse().unwrap(), mb[..30].parse().unwrap());
    assert!(digits > 30);
    let ulp30 = 10f64.powi(ea.parse::<i32>().unwrap() - 29);
    assert!(((na - nb).abs() as f64) * ulp30 <= bound.max(ulp30), "{ta} vs {tb}");
}

#[test]
fn verify_bounds_small_run() {
    let o = run(&["verify-bounds", "--samples", "4", "--seed", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["checks"], 44);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn theta_of_identity() {
    let m = scratch("ii.mat", "z11 = 1*i\nz12 = 0\nz22 = 1*i\n");
    let o = run(&["theta", m.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let t0: f64 = v["thetas"][0]["re"].as_str().unwrap().parse().unwrap();
    assert!((t0 - 1.18034059901609).abs() < 1e-13);
    assert!(v["arch_term"].is_null());
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn missing_file_is_error() {
    let o = run(&["igusa", "/nonexistent/curve"]);
    assert_eq!(o.status.code(), Some(1));
}
