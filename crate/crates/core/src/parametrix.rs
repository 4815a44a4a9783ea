//! Boundary traces of the interior parametrix: the phase coefficients
//! `phi1`, `phi2`, the first amplitude correction `a10`, its
//! frequency-independent principal part `b0`, and the hyperbolic trace.
//!
//! Everything is evaluated at a single boundary point in two dimensions, so
//! the quadratic forms `<B xi, xi>` collapse to products of scalars.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dn_disk::{dn_mode, Medium};
use crate::error::{Error, Result};
use crate::symbols::{rho_j, scale};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Pointwise boundary data.
///
/// Near the boundary the metric coefficient is `b0 + x1 b1`, the index is
/// `n0 + x1 n1`, and the Laplacian reads
/// `d^2/dx1^2 + b0 d^2/dx'^2 + q1 d/dx1 + q2 d/dx'`. `dr0` and `dn0` are
/// tangential derivatives of `r0 = b0 xi^2` and `n0`; `psi0`, `dpsi0` the
/// cutoff amplitude and its derivative; `eta` the value of the low-frequency
/// cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGeometry {
    pub b0: f64,
    pub b1: f64,
    pub n0: f64,
    pub n1: f64,
    pub q1: f64,
    pub q2: f64,
    pub dr0: f64,
    pub dn0: f64,
    pub psi0: f64,
    pub dpsi0: f64,
    pub eta: f64,
}

impl BoundaryGeometry {
    /// Unit circle in polar coordinates `x1 = 1 - r`, constant index `n0`.
    pub fn disk(n0: f64) -> Self {
        BoundaryGeometry {
            b0: 1.0,
            b1: 2.0,
            n0,
            n1: 0.0,
            q1: -1.0,
            q2: 0.0,
            dr0: 0.0,
            dn0: 0.0,
            psi0: 1.0,
            dpsi0: 0.0,
            eta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.b0, self.b1, self.n0, self.n1, self.q1, self.q2, self.dr0, self.dn0, self.psi0, self.dpsi0, self.eta,
        ];
        if all.iter().any(|v| !v.is_finite()) || !(self.b0 > 0.0) || !(self.n0 > 0.0) {
            return Err(Error::InvalidInput("boundary geometry needs finite data with b0 > 0, n0 > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidInput(format!("eta = {} must lie in [0, 1]", self.eta)));
        }
        Ok(())
    }

    /// `r0 = <B0 xi, xi>`.
    pub fn r0(&self, xi: f64) -> f64 {
        self.b0 * xi * xi
    }

    fn rho(&self, xi: f64, theta: f64) -> Result<Complex64> {
        rho_j(self.r0(xi), self.n0, theta)
    }
}

/// `phi1 = -i rho`.
pub fn phi1(xi: f64, geom: &BoundaryGeometry, theta: f64) -> Result<Complex64> {
    Ok(-I * geom.rho(xi, theta)?)
}

/// `phi2 = (2 rho)^-1 B0 xi grad(rho) + (4 i rho)^-1 B1 xi^2 - (1 + i theta)(4 i rho)^-1 n1`
/// with `grad(rho) = (dr0 - (1 + i theta) dn0) / (2 rho)`.
pub fn phi2(xi: f64, geom: &BoundaryGeometry, theta: f64) -> Result<Complex64> {
    let rho = geom.rho(xi, theta)?;
    let one_i_theta = Complex64::new(1.0, theta);
    let grad_rho = (geom.dr0 - one_i_theta * geom.dn0) / (2.0 * rho);
    let four_i_rho = 4.0 * I * rho;
    Ok(geom.b0 * xi * grad_rho / (2.0 * rho) + geom.b1 * xi * xi / four_i_rho - one_i_theta * geom.n1 / four_i_rho)
}

/// First-order amplitude trace
/// `a10 = -phi1^-1 B0 xi dpsi - (phi2/phi1 + q1/2 - (2 phi1)^-1 q2 xi) psi`.
pub fn a10(xi: f64, geom: &BoundaryGeometry, theta: f64) -> Result<Complex64> {
    let p1 = phi1(xi, geom, theta)?;
    let p2 = phi2(xi, geom, theta)?;
    Ok(-geom.b0 * xi * geom.dpsi0 / p1 - (p2 / p1 + 0.5 * geom.q1 - geom.q2 * xi / (2.0 * p1)) * geom.psi0)
}

/// Closed form of `a10` on the disk: `-(1 + i theta) n0 / (2 rho^2)`.
pub fn a10_disk(xi: f64, n0: f64, theta: f64) -> Result<Complex64> {
    let rho = rho_j(xi * xi, n0, theta)?;
    Ok(-Complex64::new(1.0, theta) * n0 / (2.0 * rho * rho))
}

/// Frequency-independent principal part of `a10`:
///
/// `b0 = i (1-eta) r0^-1/2 B0 xi dpsi0
///       - (1-eta) psi0 / 4 (-i r0^-3/2 B0 xi dr0 + r0^-1 B1 xi^2 + 2 q1 + 2 i r0^-1/2 q2 xi)`.
///
/// The `q2` term carries a factor `i`; without it `a10 - b0` would not decay
/// when `q2 != 0`.
pub fn b0(xi: f64, geom: &BoundaryGeometry) -> Result<Complex64> {
    let r0 = geom.r0(xi);
    if !(r0 > 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let keep = 1.0 - geom.eta;
    let inv_sqrt = r0.powf(-0.5);
    let first = I * keep * inv_sqrt * geom.b0 * xi * geom.dpsi0;
    let bracket = -I * r0.powf(-1.5) * geom.b0 * xi * geom.dr0
        + geom.b1 * xi * xi / r0
        + 2.0 * geom.q1
        + 2.0 * I * inv_sqrt * geom.q2 * xi;
    Ok(first - 0.25 * keep * geom.psi0 * bracket)
}

/// Normal derivative of the phase at a hyperbolic point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicTrace {
    /// `-i rho`.
    pub trace: Complex64,
    /// `(|theta|/2) n0 (n0 - r0)^-1/2`.
    pub first_order_im: f64,
    /// `sqrt(n0) |theta| / 3`.
    pub lower_bound: f64,
    /// `|theta|^m_half`, the size of the neglected remainder.
    pub remainder_scale: f64,
    pub bound_holds: bool,
}

pub fn hyperbolic_trace(xi: f64, geom: &BoundaryGeometry, theta: f64, m_half: u32) -> Result<HyperbolicTrace> {
    let r0 = geom.r0(xi);
    if r0 >= geom.n0 {
        return Err(Error::NotHyperbolic { r0, n0: geom.n0 });
    }
    let trace = -I * geom.rho(xi, theta)?;
    let lower_bound = geom.n0.sqrt() * theta.abs() / 3.0;
    Ok(HyperbolicTrace {
        trace,
        first_order_im: 0.5 * theta.abs() * geom.n0 / (geom.n0 - r0).sqrt(),
        lower_bound,
        remainder_scale: theta.abs().powi(m_half as i32),
        bound_holds: trace.im >= lower_bound,
    })
}

pub mod flags {
    pub const NEAR_POLE: &str = "near_pole";
    pub const OUTSIDE_WEDGE: &str = "outside_wedge";
    pub const FAULT: &str = "numerical_fault";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub h: f64,
    pub lambda: Complex64,
    pub mode: u32,
    /// `|h d_m / c - rho - h a10|`.
    pub resid_with_a10: f64,
    /// `|h d_m / c - rho|`.
    pub resid_without: f64,
    pub flags: Vec<String>,
}

/// Residual of the boundary symbol at the mode `m = round(hm / h)`.
pub fn elliptic_residual(lambda: Complex64, hm: f64, medium: Medium) -> ResidualRow {
    let mut row = ResidualRow {
        h: f64::NAN,
        lambda,
        mode: 0,
        resid_with_a10: f64::NAN,
        resid_without: f64::NAN,
        flags: Vec::new(),
    };
    let sp = match scale(lambda) {
        Ok(sp) => sp,
        Err(_) => {
            row.flags.push(flags::OUTSIDE_WEDGE.into());
            return row;
        }
    };
    row.h = sp.h;
    let m = (hm / sp.h).round() as u32;
    row.mode = m;
    let xi = sp.h * m as f64;
    let n0 = medium.n / medium.c;
    let d = match dn_mode(m, lambda, medium) {
        Ok(d) => d,
        Err(Error::NearPole) => {
            row.flags.push(flags::NEAR_POLE.into());
            return row;
        }
        Err(_) => {
            row.flags.push(flags::FAULT.into());
            return row;
        }
    };
    let (rho, corr) = match (rho_j(xi * xi, n0, sp.theta), a10(xi, &BoundaryGeometry::disk(n0), sp.theta)) {
        (Ok(r), Ok(a)) => (r, a),
        _ => {
            row.flags.push(flags::FAULT.into());
            return row;
        }
    };
    let scaled = sp.h * d / medium.c;
    row.resid_without = (scaled - rho).norm();
    row.resid_with_a10 = (scaled - rho - sp.h * corr).norm();
    row
}

/// One row per frequency, in input order.
pub fn elliptic_residual_curve(lambdas: &[Complex64], hm: f64, medium: Medium) -> Result<Vec<ResidualRow>> {
    if !(hm >= 1.2 && hm.is_finite()) {
        return Err(Error::InvalidInput(format!("hm = {hm} must be at least 1.2")));
    }
    Ok(lambdas.par_iter().map(|&l| elliptic_residual(l, hm, medium)).collect())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Slopes of the two residual columns against `h`.
pub fn residual_slopes(rows: &[ResidualRow]) -> (Option<f64>, Option<f64>) {
    let clean: Vec<&ResidualRow> = rows.iter().filter(|r| r.flags.is_empty()).collect();
    let without: Vec<(f64, f64)> = clean.iter().map(|r| (r.h, r.resid_without)).collect();
    let with: Vec<(f64, f64)> = clean.iter().map(|r| (r.h, r.resid_with_a10)).collect();
    (log_log_slope(&without), log_log_slope(&with))
}

pub const CSV_HEADER: [&str; 7] = ["h", "re_lambda", "im_lambda", "mode", "resid_with_a10", "resid_without", "flags"];

pub fn csv_record(row: &ResidualRow) -> Vec<String> {
    use crate::output::fmt_f64;
    vec![
        fmt_f64(row.h),
        fmt_f64(row.lambda.re),
        fmt_f64(row.lambda.im),
        row.mode.to_string(),
        fmt_f64(row.resid_with_a10),
        fmt_f64(row.resid_without),
        row.flags.join(";"),
    ]
}
