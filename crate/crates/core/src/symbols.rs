//! Semiclassical scalings, branch-fixed square-root symbols, the smooth
//! cutoff partition and the two-media symbol `tau`.
//!
//! Every square root here uses the branch with negative real part. On the
//! negative real axis (reachable only when `theta == 0`) the value is the
//! limit from `theta -> 0+`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default wedge constant: admissible frequencies satisfy `|Im l| < 0.9 Re l`.
pub const DEFAULT_THETA0: f64 = 0.9;

/// A frequency together with its semiclassical parameters.
///
/// `mu = Re l * sqrt(1 - (Im l / Re l)^2)`, `h = 1/mu`,
/// `z = 2 Im l Re l / mu` and `theta = h z`, so that `Re (h l)^2 = 1` and
/// `l^2 = mu^2 (1 + i z h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub lambda: Complex64,
    pub h: f64,
    pub mu: f64,
    pub z: f64,
    pub theta: f64,
}

pub fn scale(lambda: Complex64) -> Result<SpectralParams> {
    scale_in_wedge(lambda, DEFAULT_THETA0)
}

pub fn scale_in_wedge(lambda: Complex64, theta0: f64) -> Result<SpectralParams> {
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::InvalidInput(format!("wedge constant {theta0} must lie in (0, 1)")));
    }
    let (re, im) = (lambda.re, lambda.im);
    if !(re > 0.0) || !(im.abs() < theta0 * re) {
        return Err(Error::OutsideScalingWedge { theta0 });
    }
    let ratio = im / re;
    let mu = re * (1.0 - ratio * ratio).sqrt();
    let h = 1.0 / mu;
    let z = 2.0 * im * re / mu;
    Ok(SpectralParams { lambda, h, mu, z, theta: h * z })
}

/// `-sqrt(w)` with `Re < 0`; the negative real axis is taken from below
/// (the `theta -> 0+` side).
fn neg_sqrt(w: Complex64) -> Complex64 {
    if w.im == 0.0 && w.re < 0.0 {
        // sqrt(-a - i0) = -i sqrt(a)
        return Complex64::new(0.0, (-w.re).sqrt());
    }
    -w.sqrt()
}

/// `p(sigma) = sqrt(sigma - l^2)` with `Re p < 0`.
pub fn p_mode(sigma: f64, lambda: Complex64) -> Result<Complex64> {
    let w = Complex64::new(sigma, 0.0) - lambda * lambda;
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(Error::BranchAmbiguity);
    }
    Ok(neg_sqrt(w))
}

/// `rho_j = sqrt(r0 - (1 + i theta) m_j)` with `Re rho_j < 0`.
pub fn rho_j(r0: f64, m_j: f64, theta: f64) -> Result<Complex64> {
    let w = Complex64::new(r0 - m_j, -theta * m_j);
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::GlancingSingularity);
    }
    Ok(neg_sqrt(w))
}

/// The smooth step `S(s) = exp(-1/s)` for `s > 0`, zero otherwise.
fn smooth_step(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Width `delta` of the glancing window together with the partition
/// `chi1 + chi2 + chi3 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub delta: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidInput(format!("cutoff width {delta} must be positive")));
        }
        Ok(CutoffSpec { delta })
    }

    /// 0 for `t <= 1`, 1 for `t >= 2`.
    pub fn chi3(&self, t: f64) -> f64 {
        let up = smooth_step(t - 1.0);
        if up == 0.0 {
            return 0.0;
        }
        let down = smooth_step(2.0 - t);
        up / (up + down)
    }

    /// 1 for `t <= -2`, 0 for `t >= -1`.
    pub fn chi1(&self, t: f64) -> f64 {
        self.chi3(-t)
    }

    /// 1 for `|t| <= 1`, 0 for `|t| >= 2`.
    pub fn chi2(&self, t: f64) -> f64 {
        1.0 - self.chi1(t) - self.chi3(t)
    }
}

/// Hyperbolic, glancing and elliptic weights at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffWeights {
    pub minus: f64,
    pub zero: f64,
    pub plus: f64,
}

pub fn classify_point(r_sharp: f64, cutoffs: &CutoffSpec) -> CutoffWeights {
    let t = (r_sharp - 1.0) / (cutoffs.delta * cutoffs.delta);
    let minus = cutoffs.chi1(t);
    let plus = cutoffs.chi3(t);
    CutoffWeights { minus, zero: 1.0 - minus - plus, plus }
}

/// Two media with constant coefficients `(c_j, n_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumPair {
    pub c1: f64,
    pub n1: f64,
    pub c2: f64,
    pub n2: f64,
}

impl MediumPair {
    pub fn new(c1: f64, n1: f64, c2: f64, n2: f64) -> Result<Self> {
        for (name, v) in [("c1", c1), ("n1", n1), ("c2", c2), ("n2", n2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} = {v} must be positive")));
            }
        }
        Ok(MediumPair { c1, n1, c2, n2 })
    }

    pub fn m1(&self) -> f64 {
        self.n1 / self.c1
    }

    pub fn m2(&self) -> f64 {
        self.n2 / self.c2
    }

    /// `c1 n1 - c2 n2`.
    pub fn c_tilde(&self) -> f64 {
        self.c1 * self.n1 - self.c2 * self.n2
    }

    /// `(c1^2 - c2^2) / (c1 n1 - c2 n2)`, undefined when `c_tilde == 0`.
    pub fn c0(&self) -> Option<f64> {
        let ct = self.c_tilde();
        (ct != 0.0).then(|| (self.c1 * self.c1 - self.c2 * self.c2) / ct)
    }

    pub fn swapped(&self) -> Self {
        MediumPair { c1: self.c2, n1: self.n2, c2: self.c1, n2: self.n1 }
    }

    pub fn case(&self) -> CaseLabel {
        classify_case(self)
    }
}

/// `tau = c1 rho_1 - c2 rho_2`.
pub fn tau(r0: f64, pair: &MediumPair, theta: f64) -> Result<Complex64> {
    let rho1 = rho_j(r0, pair.m1(), theta)?;
    let rho2 = rho_j(r0, pair.m2(), theta)?;
    Ok(pair.c1 * rho1 - pair.c2 * rho2)
}

/// Right-hand side of the quotient form of `tau`:
/// `c_tilde (c0 r0 - 1 - i theta) / (c1 rho_1 + c2 rho_2)`.
///
/// `c_tilde * c0` is expanded as `c1^2 - c2^2` so the expression stays finite
/// when `c_tilde == 0`.
pub fn tau_quotient(r0: f64, pair: &MediumPair, theta: f64) -> Result<Complex64> {
    let rho1 = rho_j(r0, pair.m1(), theta)?;
    let rho2 = rho_j(r0, pair.m2(), theta)?;
    let numer = Complex64::new(
        (pair.c1 * pair.c1 - pair.c2 * pair.c2) * r0 - pair.c_tilde(),
        -theta * pair.c_tilde(),
    );
    Ok(numer / (pair.c1 * rho1 + pair.c2 * rho2))
}

/// Which eigenvalue-free-region shape applies to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    /// `c1 = c2 = 1`, `n1 != n2`.
    Isotropic,
    /// `(c1 - c2)(c1 n1 - c2 n2) < 0`.
    AnisoNegative,
    /// `(c1 - c2)(c1 n1 - c2 n2) > 0` and `n1/c1 != n2/c2`.
    AnisoPositiveDistinct,
    Degenerate,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Isotropic => "Isotropic_2_2",
            CaseLabel::AnisoNegative => "AnisoNegative_2_4",
            CaseLabel::AnisoPositiveDistinct => "AnisoPositiveDistinct_2_6_2_7",
            CaseLabel::Degenerate => "Degenerate",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_case(pair: &MediumPair) -> CaseLabel {
    if pair.c1 == 1.0 && pair.c2 == 1.0 {
        return if pair.n1 != pair.n2 { CaseLabel::Isotropic } else { CaseLabel::Degenerate };
    }
    let product = (pair.c1 - pair.c2) * pair.c_tilde();
    if product < 0.0 {
        CaseLabel::AnisoNegative
    } else if product > 0.0 && pair.m1() != pair.m2() {
        CaseLabel::AnisoPositiveDistinct
    } else {
        CaseLabel::Degenerate
    }
}
