//! `curveop verify`.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use curveop::checks::{self, Check};
use curveop::genus2::Form;
use curveop::numerics::eigensolve;
use curveop::sphere::{eta_dual_colors, op_zeta, SphereBasis};
use curveop::torus::op_gamma_torus;
use curveop::BandedOperator;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::args::{parse_colors, parse_list, CurveName, Suite, SurfaceKind, VerifyArgs};
use crate::operator::{self, Built, OperatorSpec};
use crate::output::{g17, Sink, Tolerances};

const ABSOLUTE_CHECKS: &[&str] = &[
    "skein_product",
    "torus_spectrum",
    "sphere_spectrum",
    "mellin_roundtrip",
    "hermitian",
    "genus2_hermitian",
    "genus2_eta_gamma_spectrum",
    "genus2_delta_odd_lattice",
    "input_hermitian",
    "input_spectrum",
];
const RELATIVE_CHECKS: &[&str] = &["first_order_symbol"];

fn odd_levels(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|r| r % 2 == 1).collect()
}

fn levels(args: &VerifyArgs, default: &[u32]) -> Result<Vec<u32>> {
    match &args.r {
        Some(text) => parse_list(text, "level"),
        None => Ok(default.to_vec()),
    }
}

fn single_level(args: &VerifyArgs, default: u32) -> Result<u32> {
    match levels(args, &[default])?[..] {
        [r] => Ok(r),
        _ => bail!("this suite takes a single --r"),
    }
}

fn marked_colors(args: &VerifyArgs, default: &[u32]) -> Result<Vec<u32>> {
    match &args.a {
        Some(text) => parse_list(text, "color"),
        None => Ok(default.to_vec()),
    }
}

/// Five distinct colorings at level `r` with at least two basis vectors.
fn random_colorings(r: u32, seed: u64) -> Result<Vec<[i64; 4]>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out: Vec<[i64; 4]> = Vec::new();
    for _ in 0..100_000 {
        let colors: [i64; 4] = std::array::from_fn(|_| rng.gen_range(1..r as i64));
        if !out.contains(&colors) && SphereBasis::new(r, colors).is_ok_and(|b| b.dim >= 2) {
            out.push(colors);
            if out.len() == 5 {
                return Ok(out);
            }
        }
    }
    bail!("level {r} has too few admissible colorings")
}

fn sorted_diagonal(op: &BandedOperator) -> Vec<f64> {
    let mut v: Vec<f64> = op.diagonal(0).iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Hermiticity and spectrum of an operator read from a file, against the
/// cosine lattice of its surface.
fn input_checks(spec: &OperatorSpec, built: &Built) -> Result<Vec<Check>> {
    let id = spec.describe();
    let (deviation, got) = match built {
        Built::Banded(op) => {
            let dev = op.hermitian_deviation();
            (dev, if dev <= 1e-10 { Some(eigensolve(op)?.values) } else { None })
        }
        Built::Genus2(op) => {
            let dev = op.hermitian_deviation();
            (dev, if dev <= 1e-10 { Some(op.eigenvalues()) } else { None })
        }
    };
    let want = match *spec {
        OperatorSpec::Torus { r, a, .. } => sorted_diagonal(&op_gamma_torus(r, a)?),
        OperatorSpec::Sphere { r, colors, curve } => {
            let [a, b, c, d] = colors;
            let window = match curve {
                CurveName::Zeta => colors,
                CurveName::Eta => eta_dual_colors(colors),
                _ => eta_dual_colors([a, c, b, d]),
            };
            sorted_diagonal(&op_zeta(r, window)?)
        }
        OperatorSpec::Genus2 { r, curve, form } => curveop::genus2::op_g2(curve, r, form)?.eigenvalues(),
    };
    let gap = got.map_or(f64::NAN, |g| max_gap(&g, &want));
    Ok(vec![
        Check::at_most("input_hermitian", id.clone(), deviation, 1e-10),
        Check::at_most("input_spectrum", id, gap, 1e-8),
    ])
}

fn suite_rows(args: &VerifyArgs) -> Result<Vec<Check>> {
    let form: Form = args.form.into();
    let surface = args.surface;
    let only = |allowed: &[SurfaceKind]| match surface {
        Some(s) if !allowed.contains(&s) => bail!("suite {:?} does not run on {s:?}", args.suite),
        _ => Ok(()),
    };
    Ok(match args.suite {
        Suite::Products => {
            only(&[SurfaceKind::Torus])?;
            checks::products(&levels(args, &odd_levels(11, 61))?, &marked_colors(args, &[1, 3])?, args.depth)?
        }
        Suite::Spectra => {
            if let Some(path) = &args.input {
                let (spec, built) = operator::load(path)?;
                return input_checks(&spec, &built);
            }
            match surface.unwrap_or(SurfaceKind::Torus) {
                SurfaceKind::Torus => checks::torus_spectra(
                    &levels(args, &odd_levels(11, 61))?,
                    &marked_colors(args, &[1, 3])?,
                    args.depth,
                )?,
                SurfaceKind::Sphere4 => {
                    let r = single_level(args, 23)?;
                    let tuples = match &args.colors {
                        Some(text) => vec![parse_colors(text)?],
                        None => random_colorings(r, args.seed)?,
                    };
                    checks::sphere_spectra(r, &tuples)?
                }
                SurfaceKind::Genus2 => checks::genus2_structure(single_level(args, 12)?, form)?,
            }
        }
        Suite::Toeplitz => {
            only(&[SurfaceKind::Torus])?;
            let mut rows = checks::wick(&checks::WICK_POINTS, &checks::WICK_NS)?;
            let families = [checks::TORUS_DELTA, checks::SPHERE_ETA];
            rows.extend(checks::principal_symbol(&families, &checks::SYMBOL_TAUS, &checks::SYMBOL_RBARS)?);
            let a = match marked_colors(args, &[1])?[..] {
                [a] => a,
                _ => bail!("the toeplitz suite takes a single --a"),
            };
            rows.extend(checks::mellin_roundtrip(&levels(args, &[11])?, a)?);
            rows
        }
        Suite::Subprincipal => {
            let families = [checks::TORUS_DELTA, checks::SPHERE_ETA];
            let mut rows = checks::subprincipal(&families, &checks::SYMBOL_TAUS, &checks::SYMBOL_RBARS)?;
            rows.extend(checks::first_order_relation(-1.0, &[0.3, 0.5, 0.7])?);
            rows
        }
        Suite::Genus2 => {
            only(&[SurfaceKind::Genus2])?;
            let mut rows = checks::genus2_structure(single_level(args, 12)?, form)?;
            rows.extend(checks::genus2_limits(form, &checks::G2_TAUS, &checks::G2_LEVELS)?);
            rows
        }
    })
}

fn apply_tolerances(rows: &mut [Check], abs: Option<f64>, rel: Option<f64>) {
    for row in rows {
        let tol = if ABSOLUTE_CHECKS.contains(&row.check.as_str()) {
            abs
        } else if RELATIVE_CHECKS.contains(&row.check.as_str()) {
            rel
        } else {
            None
        };
        if let Some(t) = tol {
            row.threshold = t;
            row.pass = row.value <= t;
        }
    }
}

/// RFC 4180 quoting.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[Check]) -> String {
    let mut out = String::from("check,id,value,threshold,pass\n");
    for c in rows {
        out += &format!(
            "{},{},{},{},{}\n",
            csv_field(&c.check),
            csv_field(&c.id),
            g17(c.value),
            g17(c.threshold),
            c.pass
        );
    }
    out
}

/// Returns whether every check passed.
pub fn run(args: &VerifyArgs) -> Result<bool> {
    let started = Instant::now();
    for (flag, tol) in [("--tol-abs", args.tol_abs), ("--tol-rel", args.tol_rel)] {
        if tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            bail!("{flag} must be a positive number");
        }
    }
    let mut rows = suite_rows(args).context("suite could not run")?;
    apply_tolerances(&mut rows, args.tol_abs, args.tol_rel);
    let sink = Sink {
        command: "verify".into(),
        parameters: serde_json::to_value(args)?,
        tolerances: Tolerances { abs: args.tol_abs, rel: args.tol_rel },
        out: args.out.clone(),
        started,
    };
    sink.emit(&to_csv(&rows))?;
    Ok(checks::all_pass(&rows))
}
