use std::path::PathBuf;

use g2height::heights::{compare, convert_normalization, job_height_colmez, CompareOptions};
use g2height::highprec::PrecisionContext;
use g2height::job::{parse_job, Job};

fn job(name: &str) -> Job {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../jobs").join(name);
    parse_job(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn both_orderings_agree_for_all_jobs() {
    let ctx = PrecisionContext::default();
    let opts = CompareOptions { both_orderings: true, extra_primes: vec![] };
    for name in ["ex1.job", "ex2.job", "ex3.job"] {
        let c = compare(&job(name), &opts, &ctx).unwrap();
        assert!(c.pass, "{name}: {}", c.discrepancy.to_sci(3));
        let s = c.swapped.unwrap();
        assert!((&s.total - &c.local.total).abs().to_f64() < 1e-60, "{name}");
    }
}

#[test]
fn conjugate_character_gives_same_height() {
    let ctx = PrecisionContext::default();
    let mut j = job("ex2.job");
    let (chi, h) = job_height_colmez(&j, &ctx).unwrap();
    j.cm.as_mut().unwrap().character = chi.conj().to_string();
    let (chi_bar, h_bar) = job_height_colmez(&j, &ctx).unwrap();
    assert_ne!(chi.branch(), chi_bar.branch());
    assert!((&h - &h_bar).abs().to_f64() < 1e-70);
}

#[test]
fn precision_extension_agrees() {
    let j = job("ex3.job");
    let opts = CompareOptions::default();
    let a = compare(&j, &opts, &PrecisionContext::new(256).unwrap()).unwrap();
    let b = compare(&j, &opts, &PrecisionContext::new(512).unwrap()).unwrap();
    let d = (&a.local.total.with_precision(600) - &b.local.total.with_precision(600)).abs();
    assert!(d <= a.local.error_bound, "{}", d.to_sci(3));
    assert!(b.discrepancy.to_f64() < 1e-140);
}

#[test]
fn conventions_round_trip_on_a_job() {
    let ctx = PrecisionContext::default();
    let (_, h) = job_height_colmez(&job("ex1.job"), &ctx).unwrap();
    let mut x = h.clone();
    for (from, to) in [("colmez", "faltings"), ("faltings", "fplus"), ("fplus", "bost"), ("bost", "colmez")] {
        x = convert_normalization(&x, from, to, 2, &ctx).unwrap();
    }
    assert!((&x - &h).abs() < ctx.tol());
}
