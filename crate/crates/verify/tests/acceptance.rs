//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are printed even when every
//! criterion passes. The process fails when the set of failing criteria
//! differs from `KNOWN_FAILURES`.

use std::time::Instant;

use pfaffian_core::tangent::factorize_tangent_cone;
use pfaffian_core::VarietySpec;
use pfaffian_verify::report::{Verdict, VerificationReport};
use pfaffian_verify::suites::{run_suite, DEFAULT_GRID};

const SEED: u64 = 1;

/// Criterion 4's near-equality clause: with `defect ~ 2 tau^2 e_2(spectrum)`,
/// samples with `tau` near `1e-4` fall under `1e-8` without being equality
/// cases, so the clause fails on any large uniform-`tau` sample.
const KNOWN_FAILURES: &[u32] = &[4];

struct Outcome {
    pass: bool,
    summary: String,
}

fn spec(n: usize, r: usize) -> VarietySpec {
    VarietySpec::new(n, r).expect("valid spec")
}

fn grid() -> impl Iterator<Item = VarietySpec> {
    DEFAULT_GRID.iter().map(|&(n, r)| spec(n, r))
}

fn run(name: &str, s: VarietySpec, trials: u64, tol: f64) -> VerificationReport {
    run_suite(name, s, SEED, trials, Some(tol)).expect("known suite")
}

fn count(r: &VerificationReport, tag: &str) -> u64 {
    r.counts.get(tag).copied().unwrap_or(0)
}

/// Passes when every report passes; the summary names the failing specs.
fn all_pass(reports: &[VerificationReport]) -> (bool, String) {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict != Verdict::Pass)
        .map(|r| format!("({},{}) {:?} v={} d={:.1e}", r.spec.n, r.spec.r, r.verdict, r.violations, r.max_defect))
        .collect();
    let worst = reports.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    if bad.is_empty() {
        (true, format!("max defect {worst:.2e}"))
    } else {
        (false, format!("failing: {}", bad.join("; ")))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let reports: Vec<_> = (2..=12).map(|n| run("pfaffian-identities", spec(n, 0), 1000, 1e-8)).collect();
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = all_pass(&reports);
    Outcome { pass: ok && secs < 30.0, summary: format!("n = 2..12, 1000 trials each, {detail}, {secs:.1}s (< 30s)") }
}

fn criterion_2() -> Outcome {
    let reports: Vec<_> = grid().map(|s| run("w1-jacobian", s, 100, 1e-5)).collect();
    let (ok, detail) = all_pass(&reports);
    let blocks: u64 = reports.iter().map(|r| count(r, "block_mismatch")).sum();
    Outcome {
        pass: ok && blocks == 0,
        summary: format!("grid, 100 x per spec, weight rel. {detail} (tol 1e-5), G/H block mismatches {blocks} (tol 1e-6)"),
    }
}

fn criterion_3() -> Outcome {
    let reports: Vec<_> = grid().map(|s| run("shape-trace", s, 1000, 1e-4)).collect();
    let (ok, detail) = all_pass(&reports);
    let raising: u64 = reports.iter().map(|r| count(r, "raising_pairs")).sum();
    let flat: u64 = reports.iter().map(|r| count(r, "flat_pairs")).sum();
    let trace: u64 = reports.iter().map(|r| count(r, "trace_nonzero")).sum();
    Outcome {
        pass: ok && raising > 0 && flat > 0 && trace == 0,
        summary: format!(
            "grid, 1000 trials per spec, {detail} (tol 1e-4), trace > 1e-12: {trace}, raising pairs {raising}, flat pairs {flat}"
        ),
    }
}

fn criterion_4() -> Outcome {
    let r = run("lemma47", spec(4, 1), 100_000, 1e-12);
    let unexplained = count(&r, "near_equality_unexplained");
    let misclassified = count(&r, "equality_misclassified");
    Outcome {
        pass: r.verdict == Verdict::Pass && unexplained == 0 && misclassified == 0,
        summary: format!(
            "1e5 samples, tau in [0,1]: violations {}, equality cases {}, near-equalities {} of which unexplained {} \
             (tau >= 1e-6, spectrum off (1,1,0,..)); extended range tau in (1, 1/lambda_max]: {} violations in {} samples",
            r.violations,
            count(&r, "equality_case"),
            count(&r, "near_equality"),
            unexplained,
            count(&r, "extended_range_violation"),
            count(&r, "extended_range_samples"),
        ),
    }
}

fn criterion_5() -> Outcome {
    let specs: Vec<_> = grid().chain([spec(8, 2), spec(11, 3)]).collect();
    let reports: Vec<_> = specs.iter().map(|&s| run("prop49-bound", s, 100_000, 1e-12)).collect();
    let (ok, detail) = all_pass(&reports);
    let strict: u64 = reports.iter().map(|r| count(r, "strict")).sum();
    let equality: u64 = reports.iter().map(|r| count(r, "equality_case")).sum();
    let hyper: u64 = reports.iter().map(|r| count(r, "hypersurface_gap")).sum();
    Outcome {
        pass: ok && strict > 0 && equality > 0 && hyper == 0,
        summary: format!(
            "grid + (8,2), (11,3), 1e5 each, {detail}; equality {equality}, strict {strict}, hypersurface gaps > 1e-12: {hyper}"
        ),
    }
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in grid() {
        let r = run("prop52-composite", s, 100_000, 1e-10);
        let claimed = 2 * s.n() as i64 - 4 * s.r() as i64 - 4 >= 2;
        let ok = if claimed {
            r.verdict == Verdict::Pass && count(&r, "composite_min_checks") > 0 && count(&r, "composite_min_off_zero") == 0
        } else {
            r.verdict == Verdict::PassWithCounterexampleFound && r.counterexample.is_some()
        };
        pass &= ok;
        parts.push(format!(
            "({},{}) {}",
            s.n(),
            s.r(),
            if claimed {
                format!(
                    "v={} min@0 {}/{}",
                    r.violations,
                    count(&r, "composite_min_checks") - count(&r, "composite_min_off_zero"),
                    count(&r, "composite_min_checks")
                )
            } else {
                format!("counterexample {}", if r.counterexample.is_some() { "found" } else { "missing" })
            }
        ));
    }
    Outcome { pass, summary: format!("1e5 each: {}", parts.join(", ")) }
}

fn criterion_7() -> Outcome {
    let reports: Vec<_> = grid().map(|s| run("prop42-coincidence", s, 10_000, 1e-9)).collect();
    let (ok, detail) = all_pass(&reports);
    Outcome { pass: ok, summary: format!("grid, 1e4 charts and interior samples per spec, round trip {detail} (tol 1e-9)") }
}

fn criterion_8() -> Outcome {
    let slopes: Vec<_> = grid().map(|s| run("thm72-slopes", s, 100, 0.1)).collect();
    let weyl: Vec<_> = grid().map(|s| run("weyl-bounds", s, 100, 0.0)).collect();
    let (ok_s, detail_s) = all_pass(&slopes);
    let (ok_w, _) = all_pass(&weyl);
    let oracle_specs = slopes.iter().filter(|r| r.spec.n <= 6).count();
    let mut factor_ok = true;
    for n in 2..=12 {
        for r in 0..n / 2 {
            for k in 0..=r {
                let f = factorize_tangent_cone(n, r, k).expect("k <= r");
                let s = spec(n, r);
                factor_ok &=
                    f.dimension() == s.dimension() && f.cross_section.ambient_dimension() + f.euclidean_dim == s.ambient_dimension();
            }
        }
    }
    Outcome {
        pass: ok_s && ok_w && factor_ok,
        summary: format!(
            "100 queries per spec, slope |dev| {detail_s} (tol 0.1), witness oracle on {oracle_specs} specs with n <= 6, \
             Weyl below t0 {}, factorization n <= 12 {}",
            if ok_w { "ok" } else { "FAILED" },
            if factor_ok { "ok" } else { "FAILED" },
        ),
    }
}

fn criterion_9() -> Outcome {
    let reports: Vec<_> = grid().map(|s| run("orientability", s, 1000, 1e-9)).collect();
    let (ok, detail) = all_pass(&reports);
    let improper: u64 = reports.iter().map(|r| count(r, "improper_signs")).sum();
    Outcome {
        pass: ok && improper > 0,
        summary: format!("grid, 1000 isotropy samples each, |det - 1| {detail}, with sign flips in {improper}"),
    }
}

fn criterion_10() -> Outcome {
    let mut reports = Vec::new();
    for n in 2..=8 {
        for r in 0..n / 2 {
            reports.push(run("dimension-rank", spec(n, r), 20, 0.0));
        }
    }
    let (ok, _) = all_pass(&reports);
    let codim_ok = (2..=10).all(|m| spec(2 * m, m - 1).codimension() == 1 && spec(2 * m + 1, m - 1).codimension() == 3);
    Outcome {
        pass: ok && codim_ok,
        summary: format!(
            "{} specs with n <= 8, 20 regular points each: rank {}; codimension 1 at (2m, m-1) and 3 at (2m+1, m-1): {}",
            reports.len(),
            if ok { "exact" } else { "MISMATCH" },
            if codim_ok { "ok" } else { "FAILED" }
        ),
    }
}

fn criterion_11() -> Outcome {
    let reports: Vec<_> = grid().map(|s| run("eckart-young", s, 1000, 1e-9)).collect();
    let (ok, detail) = all_pass(&reports);
    let beaten: u64 = reports.iter().map(|r| count(r, "beaten")).sum();
    Outcome {
        pass: ok && beaten == 0,
        summary: format!("grid, 1000 trials x 1000 members, beaten {beaten}, Pythagoras {detail} (tol 1e-9)"),
    }
}

fn criterion_12() -> Outcome {
    let s = spec(6, 2);
    let mut mismatched = Vec::new();
    for name in pfaffian_verify::SUITE_NAMES {
        let bodies: Vec<String> = [1, 3]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
                pool.install(|| run_suite(name, s, 7, 40, None).expect("known suite").body_string())
            })
            .collect();
        if bodies[0] != bodies[1] {
            mismatched.push(name);
        }
    }
    Outcome {
        pass: mismatched.is_empty(),
        summary: format!("all 14 suites, (6,2), seed 7, 40 trials, 1 vs 3 threads: {} differing bodies {mismatched:?}", mismatched.len()),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "Pfaffian identities", criterion_1),
        (2, "primary weight vs Jacobian oracle", criterion_2),
        (3, "minimality and second fundamental form", criterion_3),
        (4, "det(I - tau S) >= (1 - tau)^2", criterion_4),
        (5, "wedge weight lower bound", criterion_5),
        (6, "composite inequality and its boundary", criterion_6),
        (7, "slicing charts and coincidence", criterion_7),
        (8, "tangent cones", criterion_8),
        (9, "orientability", criterion_9),
        (10, "dimension formula", criterion_10),
        (11, "Eckart-Young projection", criterion_11),
        (12, "determinism", criterion_12),
    ];
    let mut failed = Vec::new();
    for (id, title, check) in criteria {
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {id:2} {} {title}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(id);
        }
    }
    let unexpected: Vec<_> = failed.iter().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    let recovered: Vec<_> = KNOWN_FAILURES.iter().filter(|id| !failed.contains(id)).collect();
    println!("acceptance: {} of 12 criteria pass; known failures {KNOWN_FAILURES:?}", 12 - failed.len());
    if !unexpected.is_empty() || !recovered.is_empty() {
        eprintln!("unexpected failures {unexpected:?}, known failures now passing {recovered:?}");
        std::process::exit(1);
    }
}
