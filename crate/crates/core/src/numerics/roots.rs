/// Sub-intervals of `[a, b]` on which `f` changes sign, found on a uniform
/// grid of `samples` cells. Exact zeros on grid points yield a degenerate
/// bracket `(x, x)`.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, samples: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / samples as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    if f0 == 0.0 {
        out.push((a, a));
    }
    for i in 1..=samples {
        let x1 = if i == samples { b } else { a + h * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push((x1, x1));
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Bisection on a bracketing interval, refined until the width is below
/// `tol` or floating-point resolution is reached.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cosine_roots() {
        let br = sign_changes(f64::cos, 0.0, 10.0, 100);
        assert_eq!(br.len(), 3);
        let r = bisect(f64::cos, br[0].0, br[0].1, 1e-15);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }
}
