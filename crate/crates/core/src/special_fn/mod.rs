//! Bessel functions of the first kind, integer order, complex argument.
//!
//! The production path is Miller's backward recurrence normalized with the
//! Jacobi-Anger sum `J0 + 2 sum_k (-i s)^k J_k = exp(-i s z)`, `s = sign(Im z)`.
//! All values are carried with the factor `exp(-|Im z|)` removed so that
//! arguments far from the real axis stay finite. An ascending power series in
//! double-double arithmetic serves as an independent oracle for moderate
//! `|z|`.

mod dd;

use num_complex::Complex64;

use crate::error::{Error, Result};
use dd::DdComplex;

/// Largest order accepted by [`bessel_scaled`] unless a caller opts out.
pub const DEFAULT_MAX_ORDER: u32 = 4096;

const RESCALE_THRESHOLD: f64 = 1e150;
const RESCALE_FACTOR: f64 = 1e-150;
const NEAR_POLE_RATIO: f64 = 1e-12;
const CF_MAX_ITERATIONS: usize = 10_000;

/// `J_m(z)` and `J_m'(z)` with the growth factor `exp(|Im z|)` removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBessel {
    pub order: u32,
    pub argument: Complex64,
    pub value_scaled: Complex64,
    pub derivative_scaled: Complex64,
    /// Natural-log scale that was removed, always `|Im z|`.
    pub log_scale: f64,
}

/// `J_m(z) = value * exp(log)`, `J_m'(z) = derivative * exp(log)`.
///
/// Unlike [`ScaledBessel`] the exponent is free, so values whose magnitude
/// is below the binary64 range (high order, small argument) keep their phase
/// and relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBessel {
    pub value: Complex64,
    pub derivative: Complex64,
    pub log: f64,
}

/// Truncated ascending series `sum_k (-z^2/4)^k (z/2)^m / (k! (m+k)!)`.
///
/// Summation runs in double-double arithmetic, so the result is accurate to
/// binary64 precision even when the terms are many orders of magnitude larger
/// than the sum.
pub fn bessel_series(order: u32, z: Complex64, terms: usize) -> Result<Complex64> {
    let modulus = z.norm();
    if !(modulus <= 40.0) {
        return Err(Error::OutOfOracleRange(modulus));
    }
    if terms < 30 {
        return Err(Error::InvalidInput(format!("series needs at least 30 terms, got {terms}")));
    }
    if modulus == 0.0 {
        return Ok(if order == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    }

    let half = DdComplex::new(z.re * 0.5, z.im * 0.5);
    let mut term = DdComplex::new(1.0, 0.0);
    for k in 1..=order {
        term = (term * half).div_f64(k as f64);
    }
    let step = {
        let sq = half * half;
        DdComplex { re: sq.re.neg(), im: sq.im.neg() }
    };

    let mut sum = DdComplex::ZERO;
    for k in 0..terms {
        sum = sum + term;
        let denom = (k as f64 + 1.0) * (order as f64 + k as f64 + 1.0);
        term = (term * step).div_f64(denom);
    }
    let result = Complex64::new(sum.re.to_f64(), sum.im.to_f64());

    let t = terms as f64;
    let m = order as f64;
    let log_bound = (m + 2.0 * t) * (modulus / 2.0).ln() - ln_factorial(terms) - ln_factorial(order as usize + terms);
    let bound = log_bound.exp();
    let magnitude = result.norm();
    if !(bound <= 1e-14 * magnitude) {
        return Err(Error::InsufficientTerms { bound, magnitude });
    }
    Ok(result)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Start order for the backward recurrence.
///
/// At least `order + 20 + ceil|z|`; near the turning point `n ~ |z|` the
/// margin grows like `|z|^{1/3}` so that `J_N / Y_N` stays below roughly
/// `e^-40`.
pub fn start_order(order: u32, z: Complex64) -> u32 {
    let a = z.norm();
    let classic = order as f64 + 20.0 + a.ceil();
    let turning = (order as f64).max(a) + 20.0 + (8.0 * a.cbrt()).ceil();
    classic.max(turning) as u32
}

/// Miller recurrence capturing orders `order` and `order + 1`.
pub fn bessel_log(order: u32, z: Complex64) -> Result<LogBessel> {
    if z.norm() == 0.0 {
        let value = if order == 0 { 1.0 } else { 0.0 };
        let derivative = if order == 1 { 0.5 } else { 0.0 };
        return Ok(LogBessel {
            value: Complex64::new(value, 0.0),
            derivative: Complex64::new(derivative, 0.0),
            log: 0.0,
        });
    }
    let start = start_order(order, z);
    match miller(order, z, start) {
        Err(Error::NormalizationUnderflow) | Err(Error::Overflow) => miller(order, z, start.saturating_mul(2)),
        other => other,
    }
}

fn miller(order: u32, z: Complex64, start: u32) -> Result<LogBessel> {
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -s),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, s),
    ];
    let two_over_z = 2.0 / z;

    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut log_total = 0.0_f64;
    let mut captured: Option<(Complex64, Complex64, f64)> = None;
    let ln_rescale = -RESCALE_FACTOR.ln();

    let mut n = start;
    while n >= 1 {
        if n == order {
            captured = Some((current, upper, log_total));
        }
        sum += 2.0 * phases[(n % 4) as usize] * current;
        let lower = (n as f64) * two_over_z * current - upper;
        upper = current;
        current = lower;
        if current.re.abs() + current.im.abs() > RESCALE_THRESHOLD {
            current *= RESCALE_FACTOR;
            upper *= RESCALE_FACTOR;
            sum *= RESCALE_FACTOR;
            log_total += ln_rescale;
        }
        if !(current.re.is_finite() && current.im.is_finite()) {
            return Err(Error::Overflow);
        }
        n -= 1;
    }
    if order == 0 {
        captured = Some((current, upper, log_total));
    }
    sum += current;

    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Overflow);
    }
    if sum.norm() < 1e-290 {
        return Err(Error::NormalizationUnderflow);
    }
    let (p_m, p_m1, log_cap) = captured.expect("order below start order");
    let norm = Complex64::from_polar(1.0, -s * z.re) / sum;
    let value = p_m * norm;
    let derivative = ((order as f64) / z * p_m - p_m1) * norm;
    Ok(LogBessel {
        value,
        derivative,
        log: log_cap - log_total + z.im.abs(),
    })
}

/// `J_m(z) exp(-|Im z|)` and its derivative.
pub fn bessel_scaled(order: u32, z: Complex64) -> Result<ScaledBessel> {
    bessel_scaled_with_max(order, z, DEFAULT_MAX_ORDER)
}

pub fn bessel_scaled_with_max(order: u32, z: Complex64, max_order: u32) -> Result<ScaledBessel> {
    if order > max_order {
        return Err(Error::OrderTooLarge { order, max: max_order });
    }
    let lb = bessel_log(order, z)?;
    let shift = (lb.log - z.im.abs()).exp();
    Ok(ScaledBessel {
        order,
        argument: z,
        value_scaled: lb.value * shift,
        derivative_scaled: lb.derivative * shift,
        log_scale: z.im.abs(),
    })
}

/// `J_m'(z) / J_m(z)` through the continued fraction for `J_{m+1}/J_m`.
pub fn bessel_ratio(order: u32, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return if order == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::NearPole)
        };
    }
    let tail = cf_tail_ratio(order, z)?;
    Ok(order as f64 / z - tail)
}

/// `J_{m+1}(z) / J_m(z)` by modified Lentz.
fn cf_tail_ratio(order: u32, z: Complex64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let tiny = Complex64::new(TINY, 0.0);
    let two_over_z = 2.0 / z;
    let b = |i: usize| (order as f64 + i as f64) * two_over_z;

    let mut f = b(1);
    if f.norm() == 0.0 {
        f = tiny;
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    let mut converged = false;
    for i in 2..CF_MAX_ITERATIONS {
        let bi = b(i);
        d = bi - d;
        if d.norm() == 0.0 {
            d = tiny;
        }
        c = bi - 1.0 / c;
        if c.norm() == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            converged = true;
            break;
        }
    }
    if !converged || !(f.re.is_finite() && f.im.is_finite()) {
        return Err(Error::NearPole);
    }
    // f = J_m / J_{m+1}
    if f.norm() < NEAR_POLE_RATIO {
        return Err(Error::NearPole);
    }
    Ok(1.0 / f)
}

/// Ratios `J_{n+1}(z)/J_n(z)` for `n = 0..=max_order` from one backward sweep.
///
/// Entries whose magnitude exceeds `1e12` sit next to a zero of `J_n`; callers
/// treat them as poles of the logarithmic derivative.
pub fn ratio_sweep(max_order: u32, z: Complex64) -> Result<Vec<Complex64>> {
    if z.norm() == 0.0 {
        return Err(Error::InvalidInput("ratio sweep at z = 0".into()));
    }
    let start = start_order(max_order, z);
    let two_over_z = 2.0 / z;
    let mut out = vec![Complex64::new(0.0, 0.0); max_order as usize + 1];
    let mut r = Complex64::new(0.0, 0.0);
    for n in (1..=start).rev() {
        let mut denom = (n as f64) * two_over_z - r;
        if denom.norm() == 0.0 {
            denom = Complex64::new(1e-300, 0.0);
        }
        r = 1.0 / denom;
        let idx = (n - 1) as usize;
        if idx <= max_order as usize {
            out[idx] = r;
        }
    }
    if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Overflow);
    }
    Ok(out)
}

/// `true` when a sweep ratio marks `J_n` as numerically zero.
pub fn is_pole_ratio(r: Complex64) -> bool {
    r.norm() * NEAR_POLE_RATIO > 1.0
}
