//! Deterministic number formatting, atomic writes and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// `printf("%.17g", x)`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A JSON number printed as [`g17`].
pub fn json_number(x: f64) -> Value {
    let text = g17(x);
    match serde_json::from_str::<serde_json::Number>(&text) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(text),
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[derive(Debug, Serialize)]
pub struct Tolerances {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub version: &'static str,
    pub tolerances: Tolerances,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

/// Sends `contents` to `out`, or stdout when absent. A file output gets a
/// manifest at [`manifest_path`].
pub struct Sink {
    pub command: String,
    pub parameters: Value,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub started: Instant,
}

impl Sink {
    pub fn emit(&self, contents: &str) -> Result<()> {
        let Some(out) = &self.out else {
            print!("{contents}");
            return Ok(());
        };
        write_atomic(out, contents.as_bytes())?;
        let manifest = RunManifest {
            command: self.command.clone(),
            parameters: self.parameters.clone(),
            version: env!("CARGO_PKG_VERSION"),
            tolerances: Tolerances { abs: self.tolerances.abs, rel: self.tolerances.rel },
            outputs: vec![out.display().to_string()],
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        write_atomic(&manifest_path(out), text.as_bytes())
    }

    /// File name of the manifest, for outputs that carry a reference to it.
    pub fn manifest_ref(&self) -> Option<String> {
        let out = self.out.as_ref()?;
        manifest_path(out).file_name().map(|n| n.to_string_lossy().into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        // Reference strings from C printf("%.17g").
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1e17, "1e+17"),
            (123456.0, "123456"),
            (1.0 / 3.0, "0.33333333333333331"),
            (-1.618033988749895, "-1.6180339887498949"),
            (0.0001, "0.0001"),
            (6.02214076e23, "6.0221407599999999e+23"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, -1e-300, 7.5e300, 0.3, 2f64.sqrt()] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn manifest_is_a_sibling() {
        assert_eq!(manifest_path(Path::new("/tmp/x/op.json")), Path::new("/tmp/x/op.json.manifest.json"));
    }
}
