//! Roots of the characteristic functions `χ` and `χ_κ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect, bisect_newton};

const Z_MAX: f64 = 50.0;
const C_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub c_sharp: f64,
    pub lambda_double: f64,
    pub h: f64,
    pub gp0: f64,
    pub gpk: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// `χ(z, c) = z² − cz − 1 + g′(0) e^{−zch}`.
pub fn chi(z: f64, c: f64, gp0: f64, h: f64) -> f64 {
    z * z - c * z - 1.0 + gp0 * (-z * c * h).exp()
}

pub fn chi_z(z: f64, c: f64, gp0: f64, h: f64) -> f64 {
    2.0 * z - c - gp0 * c * h * (-z * c * h).exp()
}

fn chi_zz(z: f64, c: f64, gp0: f64, h: f64) -> f64 {
    2.0 + gp0 * (c * h) * (c * h) * (-z * c * h).exp()
}

fn chi_c(z: f64, c: f64, gp0: f64, h: f64) -> f64 {
    -z - gp0 * z * h * (-z * c * h).exp()
}

/// `χ_κ(z, c) = z² − cz − 1 + g′(κ) e^{−zch}`.
pub fn chi_kappa(z: f64, c: f64, gpk: f64, h: f64) -> f64 {
    chi(z, c, gpk, h)
}

/// Minimizer of the convex map `z ↦ χ(z, c)` on `z > 0`.
fn chi_argmin(c: f64, gp0: f64, h: f64) -> f64 {
    // χ_z(0) = −c − g′(0)ch < 0 and χ_z is increasing
    let mut hi = 1.0;
    while chi_z(hi, c, gp0, h) < 0.0 && hi < Z_MAX {
        hi *= 2.0;
    }
    bisect(|z| chi_z(z, c, gp0, h), 0.0, hi.min(Z_MAX), 1e-15).unwrap_or(hi)
}

pub fn quadratic_roots(c: f64) -> (f64, f64) {
    let d = (c * c + 4.0).sqrt();
    // avoid cancellation in the small root
    let xi2 = 0.5 * (c + d);
    (-1.0 / xi2, xi2)
}

pub fn minimal_linear_speed(gp0: f64, h: f64) -> Result<SpectralSummary> {
    if !(gp0 > 1.0) {
        return Err(Error::InvalidParameter(format!("gp0 = {gp0} must exceed 1")));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter("h must be nonnegative".into()));
    }
    let summary = |c: f64, l: f64| SpectralSummary {
        c_sharp: c,
        lambda_double: l,
        h,
        gp0,
        gpk: f64::NAN,
    };
    if h == 0.0 {
        let c = 2.0 * (gp0 - 1.0).sqrt();
        return Ok(summary(c, 0.5 * c));
    }
    let min_chi = |c: f64| chi(chi_argmin(c, gp0, h), c, gp0, h);
    if min_chi(C_MAX) > 0.0 {
        return Err(Error::Bracket("c_# beyond search window".into()));
    }
    let mut c = bisect(min_chi, 1e-12, C_MAX, 1e-12)?;
    let mut z = chi_argmin(c, gp0, h);
    // Newton on (χ, χ_z) = 0
    let mut res = f64::INFINITY;
    for _ in 0..50 {
        let f1 = chi(z, c, gp0, h);
        let f2 = chi_z(z, c, gp0, h);
        res = f1.abs().max(f2.abs());
        if res < 1e-14 {
            break;
        }
        let a11 = f2;
        let a12 = chi_c(z, c, gp0, h);
        let a21 = chi_zz(z, c, gp0, h);
        let e = (-z * c * h).exp();
        let a22 = -1.0 - gp0 * h * e + gp0 * c * h * h * z * e;
        let det = a11 * a22 - a12 * a21;
        if det == 0.0 {
            break;
        }
        let dz = (f1 * a22 - a12 * f2) / det;
        let dc = (a11 * f2 - a21 * f1) / det;
        z -= dz;
        c -= dc;
    }
    if res > 1e-10 {
        return Err(Error::NonConvergence {
            iterations: 50,
            residual: res,
        });
    }
    Ok(summary(c, z))
}

impl SpectralSummary {
    pub fn new(gp0: f64, gpk: f64, h: f64) -> Result<Self> {
        let mut s = minimal_linear_speed(gp0, h)?;
        s.gpk = gpk;
        Ok(s)
    }

    pub fn decay_rates(&self, c: f64) -> Result<DecayPair> {
        decay_rates(c, self.gp0, self.h)
    }

    pub fn lambda3(&self, c: f64) -> Result<f64> {
        lambda3(c, self.gpk, self.h)
    }
}

pub fn decay_rates(c: f64, gp0: f64, h: f64) -> Result<DecayPair> {
    let zm = chi_argmin(c, gp0, h);
    let f = |z: f64| chi(z, c, gp0, h);
    let df = |z: f64| chi_z(z, c, gp0, h);
    if !(f(zm) < 0.0) {
        let c_sharp = minimal_linear_speed(gp0, h).map(|s| s.c_sharp).unwrap_or(f64::NAN);
        return Err(Error::NoSimpleRoots { c, c_sharp });
    }
    let lambda1 = bisect_newton(f, df, 0.0, zm, 1e-12)?;
    let lambda2 = bisect_newton(f, df, zm, Z_MAX, 1e-12)?;
    Ok(DecayPair { lambda1, lambda2 })
}

pub fn lambda3(c: f64, gpk: f64, h: f64) -> Result<f64> {
    if !(gpk < 1.0) {
        return Err(Error::InvalidParameter(format!("gpk = {gpk} must be below 1")));
    }
    let f = |z: f64| chi_kappa(z, c, gpk, h);
    let df = |z: f64| chi_z(z, c, gpk, h);
    let mut lo = -0.5;
    while f(lo) < 0.0 {
        lo *= 2.0;
        if lo < -Z_MAX {
            return Err(Error::Bracket("no negative root of chi_kappa in [-50, 0)".into()));
        }
    }
    bisect_newton(f, df, lo, 0.0, 1e-12)
}
