//! Discrete integral operator `T` on a uniform grid.
//!
//! `f = g(φ(· − ch))` is taken piecewise linear; both exponential kernels are
//! integrated exactly over each cell, giving two first-order recursions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BirthFunction;
use crate::spectral::{decay_rates, minimal_linear_speed, quadratic_roots};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn symmetric(half_width: f64, step: f64) -> Self {
        let cells = (half_width / step).round() as usize;
        Self {
            start: -(cells as f64) * step,
            step,
            len: 2 * cells + 1,
        }
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn end(&self) -> f64 {
        self.node(self.len - 1)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.node(i)).collect()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.len - 1) as f64 * self.step
    }
}

/// Cell weights of the exact exponential quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Weights {
    pub xi1: f64,
    pub xi2: f64,
    pub dz: f64,
    pub e_a: f64,
    pub wa0: f64,
    pub wa1: f64,
    pub e_b: f64,
    pub wb0: f64,
    pub wb1: f64,
}

fn cell_moments(a: f64, dz: f64) -> (f64, f64, f64) {
    let em1 = (a * dz).exp_m1();
    let e = em1 + 1.0;
    let i0 = em1 / a;
    let i1 = dz * e / a - em1 / (a * a);
    (e, i0, i1)
}

impl Weights {
    pub fn new(c: f64, dz: f64) -> Self {
        let (xi1, xi2) = quadratic_roots(c);
        let (e_a, i0, i1) = cell_moments(xi1, dz);
        let (e_b, j0, j1) = cell_moments(-xi2, dz);
        Self {
            xi1,
            xi2,
            dz,
            e_a,
            wa0: i1 / dz,
            wa1: i0 - i1 / dz,
            e_b,
            wb0: j0 - j1 / dz,
            wb1: j1 / dz,
        }
    }

    /// `A_i = a(λ) f_i` for `f_i ∝ e^{λ i Δz}`.
    pub fn a_factor(&self, lam: f64) -> f64 {
        let q = (lam * self.dz).exp();
        (self.wa0 + self.wa1 * q) / (q - self.e_a)
    }

    /// `B_i = b(λ) f_i` for `f_i ∝ e^{λ i Δz}`, `λ < ξ2`.
    pub fn b_factor(&self, lam: f64) -> f64 {
        let q = (lam * self.dz).exp();
        (self.wb0 + self.wb1 * q) / (1.0 - self.e_b * q)
    }
}

/// The discrete operator for fixed `(c, h, Δz)`.
#[derive(Debug, Clone)]
pub struct Operator {
    pub c: f64,
    pub h: f64,
    pub w: Weights,
    shift_cells: usize,
    theta: f64,
}

/// Rates used to continue `φ` beyond the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Closure {
    /// Fitted from the two outermost nodes.
    Fitted,
    Rate(f64),
}

impl Operator {
    pub fn new(c: f64, h: f64, dz: f64) -> Self {
        let p = c * h / dz;
        let j = p.floor();
        Self {
            c,
            h,
            w: Weights::new(c, dz),
            shift_cells: j as usize,
            theta: p - j,
        }
    }

    /// Discrete multiplier: `T e^{λz} = M(λ) e^{λz}` for the linearization at 0.
    pub fn tail_multiplier(&self, lam: f64, gp0: f64) -> f64 {
        let dz = self.w.dz;
        let d = (-lam * self.shift_cells as f64 * dz).exp()
            * ((1.0 - self.theta) + self.theta * (-lam * dz).exp());
        gp0 * d * (self.w.a_factor(lam) + self.w.b_factor(lam)) / (self.w.xi2 - self.w.xi1)
    }

    /// Positive roots of `M(λ) = 1`; `None` when the minimum of `M` stays ≥ 1.
    pub fn discrete_rates(&self, gp0: f64) -> (f64, Option<(f64, f64)>) {
        let hi = 0.999 * self.w.xi2;
        let (lm, mmin) = crate::numeric::golden_min(|l| self.tail_multiplier(l, gp0), 1e-9, hi, 1e-12);
        if mmin >= 1.0 {
            return (lm, None);
        }
        let f = |l: f64| self.tail_multiplier(l, gp0) - 1.0;
        let l1 = crate::numeric::bisect(f, 0.0, lm, 1e-15);
        let l2 = crate::numeric::bisect(f, lm, hi, 1e-15);
        match (l1, l2) {
            (Ok(a), Ok(b)) => (lm, Some((a, b))),
            _ => (lm, None),
        }
    }

    /// `out = Tφ`; `kappa` and `g` supply the nonlinearity.
    pub fn apply(
        &self,
        phi: &[f64],
        g: &BirthFunction,
        left: Closure,
        right: Closure,
        out: &mut [f64],
        f: &mut Vec<f64>,
    ) {
        let n = phi.len();
        let dz = self.w.dz;
        let kappa = g.kappa;
        let rho = match left {
            Closure::Rate(r) => r,
            Closure::Fitted => {
                if phi[0] > 0.0 && phi[1] > phi[0] {
                    (phi[1] / phi[0]).ln() / dz
                } else {
                    0.0
                }
            }
        };
        let r_right = match right {
            Closure::Rate(r) => r,
            Closure::Fitted => {
                let (a, b) = (kappa - phi[n - 2], kappa - phi[n - 1]);
                if a > 0.0 && b > 0.0 && b < a {
                    (a / b).ln() / dz
                } else {
                    0.0
                }
            }
        };
        f.clear();
        f.resize(n, 0.0);
        let j = self.shift_cells;
        let th = self.theta;
        let node = |k: isize| -> f64 {
            if k >= 0 {
                phi[k as usize]
            } else {
                phi[0] * (rho * k as f64 * dz).exp()
            }
        };
        for i in 0..n {
            let k = i as isize - j as isize;
            let v = if th == 0.0 {
                node(k)
            } else {
                (1.0 - th) * node(k) + th * node(k - 1)
            };
            f[i] = g.evaluate(v);
        }
        let w = &self.w;
        let inv = 1.0 / (w.xi2 - w.xi1);
        // forward recursion for the ξ1 kernel
        let mut a = w.a_factor(rho) * f[0];
        out[0] = a;
        for i in 0..n - 1 {
            a = w.e_a * a + w.wa0 * f[i] + w.wa1 * f[i + 1];
            out[i + 1] = a;
        }
        // backward recursion for the ξ2 kernel
        let fk = g.evaluate(kappa);
        let mut b = fk * w.b_factor(0.0) - w.b_factor(-r_right) * (fk - f[n - 1]);
        out[n - 1] = (out[n - 1] + b) * inv;
        for i in (0..n - 1).rev() {
            b = w.e_b * b + w.wb0 * f[i] + w.wb1 * f[i + 1];
            out[i] = (out[i] + b) * inv;
        }
    }
}

/// Required half-width `10/λ1(c) + ch` (`λ_double` when `c ≤ c_#`).
pub fn required_half_width(c: f64, h: f64, gp0: f64) -> Result<f64> {
    let lam = match decay_rates(c, gp0, h) {
        Ok(d) => d.lambda1,
        Err(_) => minimal_linear_speed(gp0, h)?.lambda_double,
    };
    Ok(10.0 / lam + c * h)
}

/// Applies `T` once to grid values, with fitted exponential closures.
pub fn profile_operator_apply(
    values: &[f64],
    grid: &Grid,
    c: f64,
    h: f64,
    g: &BirthFunction,
) -> Result<Vec<f64>> {
    if values.len() != grid.len || grid.len < 3 {
        return Err(Error::InvalidParameter("values do not match grid".into()));
    }
    if !(c > 0.0) || !(h >= 0.0) {
        return Err(Error::InvalidParameter("c must be positive and h nonnegative".into()));
    }
    let required = required_half_width(c, h, g.gp0)?;
    let have = grid.half_width();
    if have < required {
        return Err(Error::GridTooNarrow { have, required });
    }
    let op = Operator::new(c, h, grid.step);
    let mut out = vec![0.0; grid.len];
    let mut f = Vec::with_capacity(grid.len);
    op.apply(values, g, Closure::Fitted, Closure::Fitted, &mut out, &mut f);
    Ok(out)
}
