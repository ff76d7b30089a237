//! `curveop pairing`.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use curveop::semiclassics::{
    level_geometry, pairing_exact, pairing_modulus, singular_moduli, smatrix_entry, BaseColoring, LevelGeometry,
    ScalingFamily,
};
use rayon::prelude::*;

use crate::args::{parse_colors, parse_list, PairingArgs, PairingKind};
use crate::output::{g17, Sink, Tolerances};

pub const HEADER: &str = "rbar,r,N,exact,asymptotic,rel_error,area,bracket_min\n";

struct Row {
    rbar: u32,
    level: u32,
    dim: usize,
    exact: f64,
    /// `None` for singular moduli.
    asymptotic: Option<f64>,
    geometry: Option<LevelGeometry>,
}

impl Row {
    fn csv(&self) -> String {
        let (asymptotic, rel) = match self.asymptotic {
            Some(a) => (g17(a), g17((self.exact - a).abs() / a)),
            None => ("singular".to_string(), "singular".to_string()),
        };
        let (area, bracket) = match &self.geometry {
            Some(g) => (g.area, g.brackets.iter().map(|b| b.abs()).fold(f64::INFINITY, f64::min)),
            None => (f64::NAN, f64::NAN),
        };
        format!(
            "{},{},{},{},{asymptotic},{rel},{},{}\n",
            self.rbar,
            self.level,
            self.dim,
            g17(self.exact),
            g17(area),
            g17(bracket)
        )
    }
}

/// Pairing moduli `|⟨ψ₀, ψ₁⟩|` of `ζ` and `η` eigenvectors on the sphere.
fn sixj_rows(d: u32, colors: [i64; 4], m0: i64, m1: i64, rbars: &[u32]) -> Result<Vec<Row>> {
    let base = BaseColoring::Sphere { colors };
    let singular = singular_moduli(colors, d);
    let geometry = if singular {
        None
    } else {
        let family = ScalingFamily::new(d, base, 1)?;
        let (h0, h1) = family.principal_symbols();
        match level_geometry(&h0, &h1, family.energy(m0), family.energy(m1)) {
            Ok(g) => Some(g),
            // A one-dimensional window has no transverse level curves.
            Err(_) if family.dim()? == 1 => None,
            Err(e) => return Err(e.into()),
        }
    };
    rbars
        .par_iter()
        .map(|&rbar| {
            let family = ScalingFamily::new(d, base, rbar)?;
            let (t0, t1) = family.operators()?;
            let exact = pairing_exact(&t0, &t1, family.label(m0), family.label(m1))?.norm();
            let dim = family.dim()?;
            let asymptotic = match (&geometry, singular) {
                (_, true) => None,
                (Some(g), false) => Some(pairing_modulus(g, dim as f64)?),
                (None, false) => Some(f64::NAN),
            };
            Ok(Row { rbar, level: family.level(), dim, exact, asymptotic, geometry: geometry.clone() })
        })
        .collect()
}

/// Punctured S-matrix entries `|⟨Γ, r̄c⟩|` on the torus.
fn smatrix_rows(d: u32, a: u32, m0: i64, m1: i64, rbars: &[u32]) -> Result<Vec<Row>> {
    let sweep = smatrix_entry(d, a, m0, m1, rbars)?;
    Ok(sweep
        .reports
        .iter()
        .zip(sweep.exact.iter().zip(&sweep.asymptotic))
        .map(|(p, (&exact, &asymptotic))| Row {
            rbar: p.rbar,
            level: p.level,
            dim: p.dim,
            exact,
            asymptotic: Some(asymptotic),
            geometry: Some(p.geometry.clone()),
        })
        .collect())
}

pub fn run(args: &PairingArgs) -> Result<()> {
    let started = Instant::now();
    let rbars: Vec<u32> = parse_list(&args.rbar_list, "multiplier")?;
    if let Some(r) = rbars.iter().find(|&&r| r % 2 == 0) {
        bail!("multiplier {r} must be odd");
    }
    let rows = if rbars.is_empty() {
        Vec::new()
    } else {
        match args.kind {
            PairingKind::Sixj => {
                let colors = parse_colors(args.colors.as_deref().context("--colors is required for sixj")?)?;
                sixj_rows(args.r, colors, args.m0, args.m1, &rbars)?
            }
            PairingKind::Smatrix => {
                let a = args.a.context("--a is required for smatrix")?;
                smatrix_rows(args.r, a, args.m0, args.m1, &rbars)?
            }
        }
    };
    let mut csv = String::from(HEADER);
    for row in &rows {
        csv += &row.csv();
    }
    let sink = Sink {
        command: "pairing".into(),
        parameters: serde_json::to_value(args)?,
        tolerances: Tolerances { abs: None, rel: None },
        out: args.out.clone(),
        started,
    };
    sink.emit(&csv)
}
