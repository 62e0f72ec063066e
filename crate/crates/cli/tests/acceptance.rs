//! Acceptance gate: runs the full self-verification suite through the
//! shipped binary and reports one PASS/FAIL line per criterion.
//!
//! Criteria 1–13 are judged from the named checks of a single
//! `verify --suite all --seed 1` run; criterion 14 (determinism) compares
//! that run byte-for-byte against a second identical invocation.

use std::collections::HashMap;
use std::process::Command;

const CRITERIA: &[(usize, &str, &[&str])] = &[
    (
        1,
        "Lagrange identities, three forms, 1e-12",
        &["geo.lagrange"],
    ),
    (
        2,
        "kernel sandwich and gap bounds, zero violations",
        &["ker.sandwich"],
    ),
    (
        3,
        "unit Dirac Monge-Ampere mass (n = 1, 2) and exact n = 1 ball mass",
        &["ker.mass.total.n1", "ker.mass.total.n2", "ker.mass.ball.n1"],
    ),
    (
        4,
        "closed-form derivatives vs finite differences, 1e-6",
        &["ker.fd"],
    ),
    (
        5,
        "gradient and Hessian bounds on a 101x101 grid, three measures",
        &["pot.bounds.atom", "pot.bounds.pair", "pot.bounds.cloud"],
    ),
    (
        6,
        "mixed-discriminant multilinearity, 1e-10",
        &["pot.multilinear"],
    ),
    (
        7,
        "atom dichotomy: atomic mass persists, diffuse mass vanishes",
        &["pot.dichotomy.atoms", "pot.dichotomy.cloud"],
    ),
    (
        8,
        "spherical log-sine constant: quadrature, Monte Carlo, normalization",
        &["pot.alpha.quad", "pot.alpha.mc", "pot.alpha.normalization"],
    ),
    (
        9,
        "unit-sphere means bounded below by -log sqrt(5)",
        &["pot.spheremean"],
    ),
    (
        10,
        "layer-cake vs direct Riesz integrals, 1 percent",
        &["rz.cavalieri"],
    ),
    (
        11,
        "concentration dimension: Dirac, square cloud, Cantor set",
        &[
            "rz.dimension.dirac",
            "rz.dimension.square",
            "rz.dimension.cantor",
        ],
    ),
    (12, "critical exponent table, exact", &["rz.exponents"]),
    (
        13,
        "L^p refinement probe separates p = 1.5 from p = 3",
        &["rz.lp"],
    ),
];

fn run_verify_all() -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_projlog"))
        .args(["verify", "--suite", "all", "--seed", "1"])
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code())
}

#[test]
fn acceptance_criteria() {
    let (first, first_code) = run_verify_all();
    let report = String::from_utf8(first.clone()).expect("utf-8 report");

    let mut verdicts: HashMap<&str, bool> = HashMap::new();
    for line in report.lines() {
        let mut words = line.split_whitespace();
        match (words.next(), words.next()) {
            (Some("PASS"), Some(id)) => {
                verdicts.insert(id, true);
            }
            (Some("FAIL"), Some(id)) => {
                verdicts.insert(id, false);
            }
            _ => {}
        }
    }

    let mut failures = Vec::new();
    for (number, description, ids) in CRITERIA {
        let missing: Vec<&str> = ids
            .iter()
            .filter(|id| !verdicts.contains_key(**id))
            .copied()
            .collect();
        let pass = missing.is_empty() && ids.iter().all(|id| verdicts[*id]);
        println!(
            "criterion {number:2}: {} — {description}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            let detail = if missing.is_empty() {
                let failed: Vec<&str> = ids.iter().filter(|id| !verdicts[**id]).copied().collect();
                format!("failed checks: {}", failed.join(", "))
            } else {
                format!("missing checks: {}", missing.join(", "))
            };
            failures.push(format!("criterion {number}: {detail}"));
        }
    }

    let (second, second_code) = run_verify_all();
    let deterministic = first == second && first_code == Some(0) && second_code == Some(0);
    println!(
        "criterion 14: {} — repeated `verify --suite all --seed 1` is byte-identical",
        if deterministic { "PASS" } else { "FAIL" }
    );
    if !deterministic {
        failures.push(format!(
            "criterion 14: exit codes {first_code:?}/{second_code:?}, identical: {}",
            first == second
        ));
    }

    assert!(
        failures.is_empty(),
        "acceptance failures:\n{}\nfull report:\n{report}",
        failures.join("\n")
    );
}
