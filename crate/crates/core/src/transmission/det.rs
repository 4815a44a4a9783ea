//! Entire mode determinant of the two-media transmission problem.
//!
//! `f_m(l) = c2 k2 J_m(k1) J_m'(k2) - c1 k1 J_m'(k1) J_m(k2)` with
//! `k_j = l sqrt(n_j / c_j)`. Its zeros are the mode-`m` transmission
//! eigenvalues; unlike `c1 d_m^(1) - c2 d_m^(2)` it has no poles at Dirichlet
//! eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special_fn::bessel_log;
use crate::symbols::MediumPair;

/// `f_m = g exp(log)` with the two products kept apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetValue {
    /// `A - B` in units of `exp(log)`.
    pub g: Complex64,
    /// `|A| + |B|` in the same units.
    pub local_scale: f64,
    pub log: f64,
    /// `|Im k1| + |Im k2|`.
    pub damping: f64,
}

impl DetValue {
    /// `f / (|A| + |B|)`: same phase as `f`, magnitude in `[0, 1]`.
    pub fn normalized(&self) -> Complex64 {
        if self.local_scale > 0.0 {
            self.g / self.local_scale
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `f exp(-|Im k1| - |Im k2|)`.
    pub fn scaled(&self) -> Result<Complex64> {
        let v = self.g * (self.log - self.damping).exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::ScaleFault)
        }
    }

    /// Local scale of `scaled()`.
    pub fn scaled_local(&self) -> f64 {
        self.local_scale * (self.log - self.damping).exp()
    }
}

pub fn wavenumbers(lambda: Complex64, pair: &MediumPair) -> (Complex64, Complex64) {
    (lambda * pair.m1().sqrt(), lambda * pair.m2().sqrt())
}

pub fn det_log(m: u32, lambda: Complex64, pair: &MediumPair) -> Result<DetValue> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidInput("the determinant is not evaluated at l = 0".into()));
    }
    let (k1, k2) = wavenumbers(lambda, pair);
    let b1 = bessel_log(m, k1)?;
    let b2 = bessel_log(m, k2)?;
    let a = pair.c2 * k2 * b1.value * b2.derivative;
    let b = pair.c1 * k1 * b1.derivative * b2.value;
    let g = a - b;
    if !(g.re.is_finite() && g.im.is_finite()) {
        return Err(Error::ScaleFault);
    }
    Ok(DetValue {
        g,
        local_scale: a.norm() + b.norm(),
        log: b1.log + b2.log,
        damping: k1.im.abs() + k2.im.abs(),
    })
}

/// Scaled entire determinant `f_m(l) exp(-|Im k1| - |Im k2|)`.
pub fn det_mode(m: u32, lambda: Complex64, pair: &MediumPair) -> Result<Complex64> {
    det_log(m, lambda, pair)?.scaled()
}

/// `f_m / (|A| + |B|)`.
pub fn det_normalized(m: u32, lambda: Complex64, pair: &MediumPair) -> Result<Complex64> {
    Ok(det_log(m, lambda, pair)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identical_media_vanish() {
        let pair = MediumPair::new(1.0, 1.0, 1.0, 1.0).unwrap();
        for (m, l) in [(0, c(3.0, 1.0)), (4, c(10.0, -2.0)), (9, c(0.5, 0.5))] {
            assert!(det_normalized(m, l, &pair).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let pair = MediumPair::new(1.0, 1.0, 2.0, 0.4).unwrap();
        for (m, l) in [(0, c(3.0, 1.0)), (4, c(10.0, 2.0)), (30, c(7.0, 12.0))] {
            let a = det_mode(m, l, &pair).unwrap();
            let b = det_mode(m, l.conj(), &pair).unwrap();
            assert!((a.conj() - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn real_axis_restriction_is_real() {
        let pair = MediumPair::new(1.0, 1.0, 1.0, 4.0).unwrap();
        let v = det_mode(0, c(4.3, 0.0), &pair).unwrap();
        assert!(v.im.abs() <= 1e-14 * v.norm());
    }

    #[test]
    fn large_imaginary_part_stays_finite() {
        let pair = MediumPair::new(1.0, 1.0, 1.0, 4.0).unwrap();
        let v = det_log(3, c(20.0, 300.0), &pair).unwrap();
        assert!(v.scaled().unwrap().norm().is_finite());
        assert!(v.normalized().norm() <= 1.0);
    }
}
