use super::quad::{integrate_1d, Estimate, QuadratureSpec};
use super::roots::bisect;
use crate::error::Result;

/// Axis-aligned box `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

const SLICE_CELLS: usize = 192;

/// Length of `{y : g(x, y) ≥ 0 for every constraint g}` on one vertical slice.
fn slice_measure(constraints: &[&dyn Fn(f64, f64) -> f64], x: f64, rect: &Rect) -> f64 {
    let g = |y: f64| constraints.iter().map(|c| c(x, y)).fold(f64::INFINITY, f64::min);
    let h = (rect.y1 - rect.y0) / SLICE_CELLS as f64;
    let tol = 1e-15 * (rect.y1 - rect.y0).abs().max(1.0);
    let mut total = 0.0;
    let mut y_prev = rect.y0;
    let mut g_prev = g(y_prev);
    // Start of the current inside-run, if any.
    let mut run_start = if g_prev >= 0.0 { Some(y_prev) } else { None };
    for i in 1..=SLICE_CELLS {
        let y = if i == SLICE_CELLS { rect.y1 } else { rect.y0 + h * i as f64 };
        let gy = g(y);
        let inside_prev = g_prev >= 0.0;
        let inside = gy >= 0.0;
        if inside != inside_prev {
            let root = bisect(|t| if g(t) >= 0.0 { 1.0 } else { -1.0 }, y_prev, y, tol);
            if inside {
                run_start = Some(root);
            } else if let Some(s) = run_start.take() {
                total += root - s;
            }
        }
        y_prev = y;
        g_prev = gy;
    }
    if let Some(s) = run_start {
        total += rect.y1 - s;
    }
    total
}

/// Area of the region of `rect` where every constraint is non-negative.
///
/// The outer integral over `x` is adaptive; each vertical slice is measured
/// by sampling and bisecting the constraint boundaries. `x_breaks` marks
/// abscissae where the slice length has kinks (e.g. turning points).
pub fn integrate_region_2d(
    constraints: &[&dyn Fn(f64, f64) -> f64],
    rect: Rect,
    x_breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<f64>> {
    integrate_1d(|x| slice_measure(constraints, x, &rect), rect.x0, rect.x1, x_breaks, spec)
}
