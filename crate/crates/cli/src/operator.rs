//! `curveop operator` and the operator JSON format.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use curveop::genus2::{self, Alpha, Form, G2Curve, G2Operator};
use curveop::sphere::{op_eta, op_xi_sphere, op_zeta};
use curveop::torus::{op_delta_torus, op_gamma_torus, op_slope_torus, Slope};
use curveop::BandedOperator;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::args::{parse_colors, required, CurveName, OperatorArgs, SurfaceKind};
use crate::output::{json_number, Sink, Tolerances};

/// Which operator to build, as given on the command line or in a JSON file.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Torus { r: u32, a: u32, slope: Slope },
    Sphere { r: u32, colors: [i64; 4], curve: CurveName },
    Genus2 { r: u32, curve: G2Curve, form: Form },
}

pub enum Built {
    Banded(BandedOperator),
    Genus2(G2Operator),
}

impl OperatorSpec {
    pub fn from_args(args: &OperatorArgs) -> Result<Self> {
        let r = args.r;
        match args.surface {
            SurfaceKind::Torus => {
                let a = required(args.a, "--a", "torus")?;
                let slope = match (&args.slope, args.curve) {
                    (Some(s), None) => s.parse::<Slope>()?,
                    (None, Some(CurveName::Gamma)) => Slope::new(1, 0)?,
                    (None, Some(CurveName::Delta)) => Slope::new(0, 1)?,
                    (None, Some(c)) => bail!("torus curves are gamma, delta or a slope, not {}", c.as_str()),
                    (Some(_), Some(_)) => bail!("give either --slope or --curve for the torus"),
                    (None, None) => bail!("--slope or --curve is required for torus"),
                };
                Ok(Self::Torus { r, a, slope })
            }
            SurfaceKind::Sphere4 => {
                let colors = parse_colors(args.colors.as_deref().context("--colors is required for sphere4")?)?;
                let curve = required(args.curve, "--curve", "sphere4")?;
                if !matches!(curve, CurveName::Zeta | CurveName::Eta | CurveName::Xi) {
                    bail!("sphere4 curves are zeta, eta and xi, not {}", curve.as_str());
                }
                Ok(Self::Sphere { r, colors, curve })
            }
            SurfaceKind::Genus2 => {
                let curve = match required(args.curve, "--curve", "genus2")? {
                    CurveName::Gamma => G2Curve::Gamma,
                    CurveName::Delta => G2Curve::Delta,
                    CurveName::Eta => G2Curve::Eta,
                    c => bail!("genus2 curves are gamma, delta and eta, not {}", c.as_str()),
                };
                Ok(Self::Genus2 { r, curve, form: args.form.into() })
            }
        }
    }

    pub fn build(&self) -> Result<Built> {
        Ok(match *self {
            Self::Torus { r, a, slope } => Built::Banded(if slope == Slope::new(1, 0)? {
                op_gamma_torus(r, a)?
            } else if slope == Slope::new(0, 1)? {
                op_delta_torus(r, a)?
            } else {
                op_slope_torus(slope, r, a)?
            }),
            Self::Sphere { r, colors, curve } => Built::Banded(match curve {
                CurveName::Zeta => op_zeta(r, colors)?,
                CurveName::Eta => op_eta(r, colors)?,
                _ => op_xi_sphere(r, colors)?,
            }),
            Self::Genus2 { r, curve, form } => Built::Genus2(genus2::op_g2(curve, r, form)?),
        })
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Torus { r, a, slope } => format!("torus r={r} a={a} slope={},{}", slope.p, slope.q),
            Self::Sphere { r, colors: [a, b, c, d], curve } => {
                format!("sphere4 r={r} colors={a},{b},{c},{d} curve={}", curve.as_str())
            }
            Self::Genus2 { r, curve, form } => format!("genus2 r={r} curve={} form={form:?}", g2_name(curve)),
        }
    }

    fn header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        match *self {
            Self::Torus { r, a, slope } => {
                m.insert("r".into(), json!(r));
                m.insert("surface".into(), json!("torus"));
                m.insert("colors".into(), json!([a]));
                m.insert("curve".into(), json!(format!("{},{}", slope.p, slope.q)));
            }
            Self::Sphere { r, colors, curve } => {
                m.insert("r".into(), json!(r));
                m.insert("surface".into(), json!("sphere4"));
                m.insert("colors".into(), json!(colors));
                m.insert("curve".into(), json!(curve.as_str()));
            }
            Self::Genus2 { r, curve, form } => {
                m.insert("r".into(), json!(r));
                m.insert("surface".into(), json!("genus2"));
                m.insert("colors".into(), json!([]));
                m.insert("curve".into(), json!(g2_name(curve)));
                m.insert("form".into(), serde_json::to_value(form).expect("form"));
            }
        }
        m
    }
}

fn g2_name(curve: G2Curve) -> &'static str {
    match curve {
        G2Curve::Gamma => "gamma",
        G2Curve::Delta => "delta",
        G2Curve::Eta => "eta",
    }
}

fn complex_list(values: &[Complex64]) -> Value {
    Value::Array(values.iter().map(|z| Value::Array(vec![json_number(z.re), json_number(z.im)])).collect())
}

fn alpha_key(mu: &Alpha) -> String {
    format!("{},{},{}", mu[0], mu[1], mu[2])
}

/// The operator JSON document.
pub fn to_json(spec: &OperatorSpec, built: &Built, manifest: Option<String>) -> Value {
    let mut doc = spec.header();
    let mut diagonals = Map::new();
    match built {
        Built::Banded(op) => {
            doc.insert("N".into(), json!(op.dim()));
            doc.insert("band".into(), json!(op.band()));
            let band = op.band() as i64;
            for mu in -band..=band {
                diagonals.insert(mu.to_string(), complex_list(&op.diagonal(mu)));
            }
        }
        Built::Genus2(op) => {
            doc.insert("N".into(), json!(op.dim()));
            let band = op.offsets().flat_map(|mu| mu.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0);
            doc.insert("band".into(), json!(band));
            doc.insert("basis".into(), json!(op.basis.alphas()));
            for &mu in op.offsets() {
                diagonals.insert(alpha_key(&mu), complex_list(op.diagonal(mu).expect("stored offset")));
            }
        }
    }
    doc.insert("diagonals".into(), Value::Object(diagonals));
    if let Some(m) = manifest {
        doc.insert("manifest".into(), json!(m));
    }
    Value::Object(doc)
}

fn read_complex_list(v: &Value, key: &str) -> Result<Vec<Complex64>> {
    v.as_array()
        .with_context(|| format!("diagonal {key} is not an array"))?
        .iter()
        .map(|pair| match pair.as_array().map(|p| p.as_slice()) {
            Some([re, im]) => Ok(Complex64::new(
                re.as_f64().context("real part is not a number")?,
                im.as_f64().context("imaginary part is not a number")?,
            )),
            _ => bail!("entry of diagonal {key} is not an [re, im] pair"),
        })
        .collect()
}

/// Reads a document written by [`to_json`].
pub fn load(path: &Path) -> Result<(OperatorSpec, Built)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let field = |k: &str| doc.get(k).with_context(|| format!("missing field {k:?}"));
    let r = u32::try_from(field("r")?.as_u64().context("r is not an integer")?)?;
    let n = field("N")?.as_u64().context("N is not an integer")? as usize;
    let curve = field("curve")?.as_str().context("curve is not a string")?.to_string();
    let colors: Vec<i64> = serde_json::from_value(field("colors")?.clone()).context("colors")?;
    let diagonals = field("diagonals")?.as_object().context("diagonals is not an object")?;
    match field("surface")?.as_str() {
        Some(kind @ ("torus" | "sphere4")) => {
            let spec = if kind == "torus" {
                let a = *colors.first().context("torus colors need the marked color")? as u32;
                OperatorSpec::Torus { r, a, slope: curve.parse()? }
            } else {
                let curve = CurveName::from_name(&curve)?;
                let colors: [i64; 4] = colors.try_into().map_err(|_| anyhow::anyhow!("sphere4 needs four colors"))?;
                OperatorSpec::Sphere { r, colors, curve }
            };
            let band = field("band")?.as_u64().context("band is not an integer")? as usize;
            let mut op = BandedOperator::zeros(n, band);
            for (key, values) in diagonals {
                let mu: i64 = key.parse().with_context(|| format!("bad offset {key:?}"))?;
                if mu.unsigned_abs() as usize > band {
                    bail!("offset {mu} exceeds band {band}");
                }
                let values = read_complex_list(values, key)?;
                let range = op.diagonal_range(mu);
                if values.len() != range.len() {
                    bail!("diagonal {mu} has {} entries, expected {}", values.len(), range.len());
                }
                for (i, v) in range.zip(values) {
                    op.set(i, mu, v);
                }
            }
            Ok((spec, Built::Banded(op)))
        }
        Some("genus2") => {
            let g2 = match curve.as_str() {
                "gamma" => G2Curve::Gamma,
                "delta" => G2Curve::Delta,
                "eta" => G2Curve::Eta,
                c => bail!("unknown genus2 curve {c:?}"),
            };
            let form: Form = serde_json::from_value(doc.get("form").cloned().unwrap_or(json!("corrected")))?;
            let mut map = BTreeMap::new();
            for (key, values) in diagonals {
                let mu: Vec<i64> = crate::args::parse_list(key, "offset")?;
                let mu: Alpha = mu.try_into().map_err(|_| anyhow::anyhow!("offset {key:?} is not a triple"))?;
                map.insert(mu, read_complex_list(values, key)?);
            }
            let op = G2Operator::from_diagonals(r, g2, form, map)?;
            Ok((OperatorSpec::Genus2 { r, curve: g2, form }, Built::Genus2(op)))
        }
        other => bail!("unknown surface {other:?}"),
    }
}

impl CurveName {
    fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "gamma" => Self::Gamma,
            "delta" => Self::Delta,
            "xi" => Self::Xi,
            "zeta" => Self::Zeta,
            "eta" => Self::Eta,
            _ => bail!("unknown curve {name:?}"),
        })
    }
}

pub fn run(args: &OperatorArgs) -> Result<()> {
    let started = Instant::now();
    let spec = OperatorSpec::from_args(args)?;
    let built = spec.build()?;
    let sink = Sink {
        command: "operator".into(),
        parameters: serde_json::to_value(args)?,
        tolerances: Tolerances { abs: None, rel: None },
        out: args.out.clone(),
        started,
    };
    let doc = to_json(&spec, &built, sink.manifest_ref());
    sink.emit(&(serde_json::to_string(&doc)? + "\n"))
}
