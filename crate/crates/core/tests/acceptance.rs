//! Acceptance gate: one line per criterion.
//!
//! Run with `cargo test -p curveop-core --test acceptance -- --nocapture`.
//! Where a stated formula and its corrected form disagree, both verdicts are
//! printed; the corrected one is asserted and the literal one is listed in
//! `KNOWN_CONFLICTS`.

use std::time::{Duration, Instant};

use curveop::checks::{self, Check, SixjConfig, SMatrixConfig};
use curveop::genus2::Form;

/// Criteria whose literal statement fails for a documented reason.
const KNOWN_CONFLICTS: &[&str] = &[
    "7-literal: the first-order symbol equals minus half the Laplacian of the principal symbol",
    "8-literal: the printed 6j amplitude carries a factor 2 and the opposite phase",
    "9-literal: the printed S-matrix closed form carries a factor 2 and the opposite phase",
    "10-literal: printed genus-2 delta diagonal and eta minus-nu coefficients do not converge",
];

const SIXJ_CONFIGS: &[SixjConfig] = &[(17, [4, 6, 7, 7], 6, 5), (17, [4, 7, 10, 11], 12, 6), (17, [4, 8, 8, 8], 9, 9)];
const SMATRIX_CONFIGS: &[SMatrixConfig] = &[(11, 1, 2, 4), (12, 1, 3, 5), (17, 3, 4, 5)];

struct Verdict {
    label: String,
    pass: bool,
    asserted: bool,
}

fn report(label: &str, rows: &[Check], elapsed: Duration, budget: Option<Duration>, asserted: bool) -> Verdict {
    let in_budget = budget.map_or(true, |b| elapsed <= b);
    let pass = checks::all_pass(rows) && in_budget;
    let failed = rows.iter().filter(|c| !c.pass).count();
    let budget_note = budget.map_or(String::new(), |b| format!(" budget={:.0}s", b.as_secs_f64()));
    println!(
        "criterion {label}: {} ({} rows, {failed} failing, {:.1}s{budget_note})",
        if pass { "PASS" } else { "FAIL" },
        rows.len(),
        elapsed.as_secs_f64(),
    );
    for c in rows.iter().filter(|c| !c.pass).take(6) {
        println!("    {} {} value={:.4e} threshold={:.4e}", c.check, c.id, c.value, c.threshold);
    }
    Verdict { label: label.into(), pass, asserted }
}

fn timed<F: FnOnce() -> curveop::Result<Vec<Check>>>(f: F) -> (Vec<Check>, Duration) {
    let start = Instant::now();
    let rows = f().expect("suite errored");
    (rows, start.elapsed())
}

fn odd_levels(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|r| r % 2 == 1).collect()
}

#[test]
fn acceptance() {
    let mut verdicts = Vec::new();
    let secs = Duration::from_secs;

    let (rows, t) = timed(|| checks::products(&odd_levels(11, 61), &[1, 3], 4));
    verdicts.push(report("1 skein products", &rows, t, Some(secs(10)), true));

    let (rows, t) = timed(|| {
        let mut rows = checks::torus_spectra(&odd_levels(11, 61), &[1, 3], 4)?;
        let tuples = [[5, 6, 7, 8], [4, 6, 7, 7], [7, 9, 10, 12], [3, 5, 5, 7], [6, 6, 8, 8]];
        rows.extend(checks::sphere_spectra(23, &tuples)?);
        Ok(rows)
    });
    verdicts.push(report("2 spectra", &rows, t, Some(secs(30)), true));

    let families = [checks::TORUS_DELTA, checks::SPHERE_ETA];
    let (rows, t) = timed(|| checks::principal_symbol(&families, &checks::SYMBOL_TAUS, &checks::SYMBOL_RBARS));
    verdicts.push(report("3 principal symbol", &rows, t, None, true));

    let (rows, t) = timed(|| checks::subprincipal(&families, &checks::SYMBOL_TAUS, &checks::SYMBOL_RBARS));
    verdicts.push(report("4 subprincipal", &rows, t, None, true));

    let (rows, t) = timed(|| checks::wick(&checks::WICK_POINTS, &checks::WICK_NS));
    verdicts.push(report("5 wick expansion", &rows, t, None, true));

    let (rows, t) = timed(|| checks::mellin_roundtrip(&[11, 15, 21], 1));
    verdicts.push(report("6 mellin roundtrip", &rows, t, Some(secs(120)), true));

    let taus = [0.3, 0.5, 0.7];
    let (rows, t) = timed(|| checks::first_order_relation(1.0, &taus));
    verdicts.push(report("7-literal first-order symbol", &rows, t, None, false));
    let (rows, t) = timed(|| checks::first_order_relation(-1.0, &taus));
    verdicts.push(report("7 first-order symbol (corrected sign)", &rows, t, None, true));

    let rbars = checks::PAIRING_RBARS;
    let (rows, t) = timed(|| checks::sixj_convergence(SIXJ_CONFIGS, &rbars, Form::Printed));
    verdicts.push(report("8-literal 6j asymptotics", &rows, t, None, false));
    let (rows, t) = timed(|| checks::sixj_convergence(SIXJ_CONFIGS, &rbars, Form::Corrected));
    verdicts.push(report("8 6j asymptotics (corrected amplitude)", &rows, t, None, true));

    let (rows, t) = timed(|| checks::smatrix_convergence(SMATRIX_CONFIGS, &rbars, Form::Printed));
    verdicts.push(report("9-literal S-matrix asymptotics", &rows, t, None, false));
    let (rows, t) = timed(|| {
        let mut rows = checks::smatrix_convergence(SMATRIX_CONFIGS, &rbars, Form::Corrected)?;
        rows.extend(checks::smatrix_closed_forms(SMATRIX_CONFIGS, &rbars)?);
        Ok(rows)
    });
    verdicts.push(report("9 S-matrix asymptotics (corrected amplitude)", &rows, t, None, true));

    let (rows, t) = timed(|| checks::genus2_limits(Form::Printed, &checks::G2_TAUS, &checks::G2_LEVELS));
    verdicts.push(report("10-literal genus-2 limits", &rows, t, None, false));
    let (rows, t) = timed(|| checks::genus2_limits(Form::Corrected, &checks::G2_TAUS, &checks::G2_LEVELS));
    verdicts.push(report("10 genus-2 limits (corrected coefficients)", &rows, t, None, true));

    let (rows, t) = timed(checks::properties);
    verdicts.push(report("11 property suites", &rows, t, Some(secs(300)), true));

    for v in verdicts.iter().filter(|v| !v.asserted && !v.pass) {
        let id = v.label.split_whitespace().next().unwrap_or_default();
        assert!(
            KNOWN_CONFLICTS.iter().any(|k| k.starts_with(&format!("{id}:"))),
            "unlisted literal failure: {}",
            v.label
        );
    }
    let failing: Vec<&str> = verdicts.iter().filter(|v| v.asserted && !v.pass).map(|v| v.label.as_str()).collect();
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
}
