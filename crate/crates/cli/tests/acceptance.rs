//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero if any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qfield::config::parse_config;
use qfield::verify::{run_suite, ResidualReport, SuiteReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(text: &str) -> SuiteReport {
    let config = parse_config(text).unwrap_or_else(|e| panic!("config rejected: {e:?}"));
    run_suite(&config).expect("suite runs")
}

fn result<'a>(report: &'a SuiteReport, check: &str) -> &'a ResidualReport {
    report
        .results
        .iter()
        .find(|r| r.check == check)
        .unwrap_or_else(|| panic!("no result named {check}"))
}

fn param(r: &ResidualReport, key: &str) -> f64 {
    r.params[key].as_f64().unwrap_or(f64::NAN)
}

fn summary(r: &ResidualReport) -> String {
    match r.order {
        Some(o) => format!(
            "{}: rel {:.2e} order {:.3}",
            r.check,
            r.relative_residual(),
            o
        ),
        None => format!("{}: rel {:.2e}", r.check, r.relative_residual()),
    }
}

const GRID8: &str = r#""grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 8}}"#;

fn ladder_algebra() -> Outcome {
    let report = suite(
        r#"{"grid": {"1d": {"omega_min": 1, "delta_omega": 1, "count": 1}}, "state": "vacuum", "seed": 7,
            "checks": [{"commutators": {"n_max": 5, "probes": 100, "modes": [0, 1], "tolerance": 1e-12}}]}"#,
    );
    let r = result(&report, "commutators");
    Outcome {
        pass: r.pass && r.max_abs_residual <= 1e-12,
        detail: summary(r),
    }
}

fn spectrum() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "state": "vacuum", "checks": [{{"spectrum": {{"max_photons": 4, "tolerance": 1e-13}}}}]}}"#
    ));
    let r = result(&report, "spectrum");
    Outcome {
        pass: r.pass,
        detail: summary(r),
    }
}

fn mode_ode() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "state": "vacuum", "checks": [
            {{"mode_ode": {{"samples": 1000, "tolerance": 1e-14}}}},
            {{"mode_ode": {{"label": "mode_ode.flipped", "samples": 1000, "flip_sign": true, "tolerance": 1e-14}}}}]}}"#
    ));
    let good = result(&report, "mode_ode");
    let flipped = result(&report, "mode_ode.flipped");
    Outcome {
        pass: good.pass && !flipped.pass,
        detail: format!(
            "{}; flipped control rel {:.2e} rejected",
            summary(good),
            flipped.relative_residual()
        ),
    }
}

fn maxwell_1d() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "n_max": 20,
            "state": {{"coherent": {{"modes": [{{"mode": "L1@ω=1", "re": 1, "im": 0}}]}}}},
            "checks": [{{"maxwell_1d": {{"spacings": [1e-2, 5e-3, 2.5e-3], "tolerance": 1e-5, "min_order": 1.9}}}}]}}"#
    ));
    let f = result(&report, "maxwell_1d.faraday");
    let a = result(&report, "maxwell_1d.ampere");
    let ok = |r: &ResidualReport| {
        r.pass && r.order.is_some_and(|o| o >= 1.9) && r.relative_residual() <= 1e-5
    };
    Outcome {
        pass: ok(f) && ok(a),
        detail: format!("{}; {}", summary(f), summary(a)),
    }
}

fn heisenberg() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "n_max": 12,
            "state": {{"coherent": {{"modes": [{{"mode": "L1#0", "re": 1, "im": 0}}, {{"mode": "R2#3", "re": 0, "im": 0.5}}]}}}},
            "checks": [
              {{"heisenberg": {{"label": "coherent", "min_order": 1.9}}}},
              {{"heisenberg": {{"label": "superposition", "x": -1.1, "t": 0.25, "min_order": 1.9,
                "state": {{"superposition": {{"terms": [
                  {{"state": "vacuum", "re": 0.6, "im": 0}},
                  {{"state": {{"fock": {{"occupations": [["L1#2", 1]]}}}}, "re": 0, "im": 0.48}},
                  {{"state": {{"fock": {{"occupations": [["R2#5", 1], ["L1#2", 1]]}}}}, "re": 0.64, "im": 0}}]}}}}}}}}]}}"#
    ));
    let c = result(&report, "coherent");
    let s = result(&report, "superposition");
    let ok = |r: &ResidualReport| r.pass && r.order.is_some_and(|o| o >= 1.9);
    Outcome {
        pass: ok(c) && ok(s),
        detail: format!("{}; {}", summary(c), summary(s)),
    }
}

fn energy() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "n_max": 20,
            "state": {{"coherent": {{"modes": [{{"mode": "L1@ω=3", "re": 0.6, "im": 0.8}}]}}}},
            "checks": [
              {{"energy_equivalence": {{"label": "vacuum_plus_one", "tolerance": 1e-8,
                "state": {{"superposition": {{"terms": [{{"state": "vacuum", "re": 1, "im": 0}},
                  {{"state": {{"fock": {{"occupations": [["R1#3", 1]]}}}}, "re": 0, "im": 1}}]}}}}}}}},
              {{"energy_equivalence": {{"label": "three_photon", "tolerance": 1e-8,
                "state": {{"fock": {{"occupations": [["L1#1", 2], ["R2#4", 1]]}}}}}}}},
              {{"energy_equivalence": {{"label": "coherent", "tolerance": 1e-8, "expected": 3.0}}}},
              {{"energy_equivalence": {{"label": "zero_point", "ordering": "full", "tolerance": 1e-10,
                "state": "vacuum"}}}},
              {{"energy_equivalence": {{"label": "corrupted_k", "k_scale": 1.01, "tolerance": 1e-8,
                "state": {{"fock": {{"occupations": [["L1#1", 2], ["R2#4", 1]]}}}}}}}}]}}"#
    ));
    let names = ["vacuum_plus_one", "three_photon", "coherent", "zero_point"];
    let good = names.iter().all(|n| result(&report, n).pass);
    let control = result(&report, "corrupted_k");
    // three-photon state: 2 * 2 + 5 = 9; ZPE: 4 labels * (1 + ... + 8) / 2 = 72
    let targets = param(result(&report, "three_photon"), "target") == 9.0
        && param(result(&report, "zero_point"), "target") == 72.0;
    let mut detail: Vec<String> = names.iter().map(|n| summary(result(&report, n))).collect();
    detail.push(format!(
        "1% K corruption rel {:.2e} rejected",
        control.relative_residual()
    ));
    Outcome {
        pass: good && targets && !control.pass,
        detail: detail.join("; "),
    }
}

fn translation() -> Outcome {
    let report = suite(&format!(
        r#"{{{GRID8}, "n_max": 12, "state": "vacuum", "checks": [
            {{"translation": {{"label": "left", "tolerance": 1e-10,
              "state": {{"coherent": {{"modes": [{{"mode": "L1#0", "re": 1, "im": 0}}, {{"mode": "L2#4", "re": 0.2, "im": -0.4}}]}}}}}}}},
            {{"translation": {{"label": "right", "tolerance": 1e-10,
              "state": {{"coherent": {{"modes": [{{"mode": "R1#2", "re": 0.5, "im": 0.5}}, {{"mode": "R2#6", "re": -0.3, "im": 0}}]}}}}}}}}]}}"#
    ));
    let l = result(&report, "left");
    let r = result(&report, "right");
    Outcome {
        pass: l.pass && r.pass,
        detail: format!("{}; {}", summary(l), summary(r)),
    }
}

fn three_d() -> Outcome {
    let report = suite(
        r#"{"grid": {"3d": {"k_spacing": 1, "half_extent": 2}}, "n_max": 2,
            "state": {"coherent": {"modes": [{"mode": "k(2,1,0)λ1", "re": 0.01, "im": 0}]}},
            "checks": [
              {"polarization_3d": {"samples": 500, "tolerance": 1e-13}},
              {"divergence_3d": {"min_order": 1.9}},
              {"energy_3d": {"label": "single_photon", "tolerance": 1e-8,
                "state": {"fock": {"occupations": [["k(1,2,-1)λ2", 1]]}}}}]}"#,
    );
    let pol = result(&report, "polarization_3d");
    let div = result(&report, "divergence_3d");
    let photon = result(&report, "single_photon");
    let hbar_omega = 6f64.sqrt();
    let energy_ok = (param(photon, "quadrature") - hbar_omega).abs() <= 1e-8 * hbar_omega;
    Outcome {
        pass: pol.pass
            && div.pass
            && div.order.is_some_and(|o| o >= 1.9)
            && photon.pass
            && energy_ok,
        detail: format!(
            "{}; {}; single photon {:.15} vs sqrt(6)",
            summary(pol),
            summary(div),
            param(photon, "quadrature")
        ),
    }
}

fn reproducibility() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qfield"))
            .args(["verify", "--quiet"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    Outcome {
        pass: same && a.status.success() && b.status.success(),
        detail: format!("{} report bytes, identical: {same}", a.stdout.len()),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 ladder algebra", ladder_algebra, Duration::from_secs(1)),
        ("2 spectrum", spectrum, Duration::from_secs(1)),
        ("3 mode equations", mode_ode, Duration::from_secs(1)),
        ("4 maxwell 1d", maxwell_1d, Duration::from_secs(10)),
        ("5 heisenberg", heisenberg, Duration::from_secs(10)),
        ("6 energy equivalence", energy, Duration::from_secs(30)),
        ("7 translation", translation, Duration::from_secs(5)),
        ("8 3d suite", three_d, Duration::from_secs(60)),
        (
            "9 reproducibility",
            reproducibility,
            Duration::from_secs(60),
        ),
    ];
    let mut all = true;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = outcome.pass && in_time;
        all &= pass;
        println!(
            "{} criterion {name} [{:.2}s / {}s]: {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
