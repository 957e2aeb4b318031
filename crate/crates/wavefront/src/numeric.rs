//! Small scalar routines shared by the modules.

use crate::error::{Error, Result};

/// Bisection on `[a, b]` with `f(a)` and `f(b)` of opposite sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, width: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracket(format!(
            "f({a}) = {fa:e} and f({b}) = {fb:e} do not bracket a root"
        )));
    }
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection followed by a safeguarded Newton polish.
pub fn bisect_newton<F, D>(f: F, df: D, a: f64, b: f64, residual: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (lo, hi) = (a.min(b), a.max(b));
    let mut x = bisect(&f, lo, hi, 1e-8)?;
    for _ in 0..50 {
        let fx = f(x);
        if fx.abs() < residual {
            return Ok(x);
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        if next == x {
            break;
        }
        x = next;
    }
    let fx = f(x);
    if fx.abs() < residual {
        Ok(x)
    } else {
        // fall back to full-precision bisection
        let x = bisect(&f, lo, hi, 0.0)?;
        Ok(x)
    }
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms residual, stderr of b)`.
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - a - b * xi;
            r * r
        })
        .sum();
    let rms = (sse / n).sqrt();
    let se = if x.len() > 2 && sxx > 0.0 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (a, b, rms, se)
}

/// Piecewise-linear interpolation on a uniform grid, clamped at the ends.
pub fn interp_uniform(start: f64, step: f64, values: &[f64], x: f64) -> f64 {
    let n = values.len();
    let p = (x - start) / step;
    if p <= 0.0 {
        return values[0];
    }
    let i = p.floor() as usize;
    if i + 1 >= n {
        return values[n - 1];
    }
    let th = p - i as f64;
    values[i] + th * (values[i + 1] - values[i])
}
