//! Argument-principle zero counting on rectangles.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use super::det::det_log;
use super::SearchBox;
use crate::error::{Error, Result};
use crate::symbols::MediumPair;

/// Refinement budget per edge.
pub const MAX_EDGE_SAMPLES: usize = 1 << 16;

/// Normalized determinant magnitude treated as a zero sitting on the contour.
const ON_CONTOUR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Winding {
    pub count: i64,
    pub samples: usize,
}

pub fn winding_count(m: u32, pair: &MediumPair, bx: &SearchBox) -> Result<i64> {
    Ok(winding_with_samples(m, pair, bx)?.count)
}

/// Counter-clockwise phase change of `f_m` around `bx`, divided by `2 pi`.
pub fn winding_with_samples(m: u32, pair: &MediumPair, bx: &SearchBox) -> Result<Winding> {
    let (x0, x1, y0, y1) = (bx.re_min, bx.re_max, bx.im_min, bx.im_max);
    let c = |x: f64, y: f64| Complex64::new(x, y);
    let mut samples = 0;
    let mut edge = |a: Complex64, b: Complex64| -> Result<f64> {
        let (phase, used) = edge_phase(m, pair, a, b)?;
        samples += used;
        Ok(phase)
    };
    // every edge runs in the increasing coordinate direction
    let bottom = edge(c(x0, y0), c(x1, y0))?;
    let right = edge(c(x1, y0), c(x1, y1))?;
    let top = edge(c(x0, y1), c(x1, y1))?;
    let left = edge(c(x0, y0), c(x0, y1))?;
    let count = turns_to_count(bottom + right - top - left)?;
    Ok(Winding { count, samples })
}

pub(crate) fn turns_to_count(total_phase: f64) -> Result<i64> {
    let turns = total_phase / TAU;
    let count = turns.round();
    if (turns - count).abs() > 0.25 {
        return Err(Error::ZeroOnContour);
    }
    Ok(count as i64)
}

fn sample(m: u32, pair: &MediumPair, z: Complex64) -> Result<Complex64> {
    let v = det_log(m, z, pair)?.normalized();
    if v.norm() < ON_CONTOUR {
        return Err(Error::ZeroOnContour);
    }
    Ok(v)
}

/// Phase increment along the segment `a -> b`, refined by bisection until
/// every step turns by less than a quarter turn.
pub(crate) fn edge_phase(m: u32, pair: &MediumPair, a: Complex64, b: Complex64) -> Result<(f64, usize)> {
    let density = 3.0 * (pair.m1().sqrt() + pair.m2().sqrt());
    let length = (b - a).norm();
    let point = |t: f64| a + (b - a) * t;
    // initial grid: base spacing from the wavenumbers, shortened near the
    // origin where f_m behaves like l^(2m) and turns by about 2m/|l| per unit
    let base = 1.0 / density;
    let mut grid = Vec::new();
    let mut t = 0.0;
    while t < 1.0 {
        let r = point(t).norm();
        let step = base.min(0.3 * r / (m.max(1) as f64)).max(1e-6 * length);
        t += step / length;
        grid.push(t.min(1.0));
        if grid.len() > MAX_EDGE_SAMPLES {
            return Err(Error::ZeroOnContour);
        }
    }

    let mut used = 0usize;
    let mut phase = 0.0;
    let mut prev_t = 0.0;
    let mut prev_f = sample(m, pair, a)?;
    used += 1;
    let mut stack: Vec<(f64, Complex64)> = Vec::new();
    for t in grid {
        let f = sample(m, pair, point(t))?;
        used += 1;
        // process (prev_t, t] with a depth-first bisection; the stack holds
        // right endpoints still to be reached
        stack.push((t, f));
        while let Some(&(tr, fr)) = stack.last() {
            let step = (fr / prev_f).arg();
            if step.abs() < FRAC_PI_2 {
                phase += step;
                prev_t = tr;
                prev_f = fr;
                stack.pop();
                continue;
            }
            if (tr - prev_t) * length < 1e-13 * length.max(1.0) {
                return Err(Error::ZeroOnContour);
            }
            let tm = 0.5 * (prev_t + tr);
            let fm = sample(m, pair, point(tm))?;
            used += 1;
            if used > MAX_EDGE_SAMPLES {
                return Err(Error::ZeroOnContour);
            }
            stack.push((tm, fm));
        }
    }
    Ok((phase, used))
}
