//! Quadrisection zero finder and the multi-mode scan.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::det::det_log;
use super::winding::{edge_phase, turns_to_count, winding_with_samples};
use super::SearchBox;
use crate::error::{Error, Result};
use crate::output::{fmt_f64, json_f64};
use crate::symbols::MediumPair;

/// Boxes narrower than this with winding above one become multiplicity records.
pub const MIN_BOX: f64 = 1e-8;
/// Newton target for `|f| / (|A| + |B|)`.
pub const POLISH_TOL: f64 = 1e-10;
/// Largest accepted relative residual.
pub const ACCEPT_TOL: f64 = 1e-8;
/// How far below the real axis a box starting at `Im = 0` is extended.
pub const REAL_AXIS_MARGIN: f64 = 0.1;
/// `|Im| <= SNAP_TOL` on a polished zero is rounded to the real axis.
pub const SNAP_TOL: f64 = 1e-10;
/// Largest `|k|` for which the scaled Bessel values stay representable.
pub const SCALING_BUDGET: f64 = 700.0;

/// Split-point offsets (fractions of the box sides) tried in turn when a
/// split line passes through a zero.
pub const JITTER: [f64; 9] = [0.0, 0.0137, -0.0213, 0.0291, -0.0371, 0.0443, -0.0519, 0.0601, -0.0683];

pub mod flags {
    pub const UNRESOLVED: &str = "unresolved";
    pub const LOW_PRECISION: &str = "low_precision";
    pub const MULTIPLE: &str = "multiple";
    pub const UNPOLISHED: &str = "unpolished";
    pub const CONTOUR_RETRY: &str = "contour_retry";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub mode: u32,
    pub lambda: Complex64,
    pub multiplicity: u32,
    /// `|f_m| / (|A| + |B|)` at the polished point.
    pub residual: f64,
    pub isolating_box: SearchBox,
    pub flags: Vec<String>,
}

impl ZeroRecord {
    pub fn is_unresolved(&self) -> bool {
        self.flags.iter().any(|f| f == flags::UNRESOLVED)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeScan {
    pub mode: u32,
    /// Winding of the box that was actually searched.
    pub winding: i64,
    pub records: Vec<ZeroRecord>,
    pub samples: usize,
    pub searched_box: SearchBox,
    pub flags: Vec<String>,
}

/// Damped Newton on `f_m` with a central-difference derivative.
/// Returns the point and its relative residual.
pub fn polish(m: u32, pair: &MediumPair, start: Complex64, step: f64) -> Result<(Complex64, f64)> {
    let eval = |z: Complex64| det_log(m, z, pair);
    let mut z = start;
    let mut cur = eval(z)?;
    let mut resid = cur.normalized().norm();
    for _ in 0..60 {
        if resid < 1e-15 {
            break;
        }
        let plus = eval(z + step)?;
        let minus = eval(z - step)?;
        // f'/f with every value brought to the exponent of f(z)
        let fp = plus.g * (plus.log - cur.log).exp();
        let fm = minus.g * (minus.log - cur.log).exp();
        let dlog = (fp - fm) / (2.0 * step * cur.g);
        if !(dlog.re.is_finite() && dlog.im.is_finite()) || dlog.norm() == 0.0 {
            break;
        }
        let delta = -1.0 / dlog;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = z + t * delta;
            if let Ok(v) = eval(trial) {
                let r = v.normalized().norm();
                if r < resid {
                    z = trial;
                    cur = v;
                    resid = r;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted || (t * delta).norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    Ok((z, resid))
}

fn newton_step(bx: &SearchBox) -> f64 {
    (1e-6 * bx.scale()).clamp(1e-9, 1e-4)
}

/// Windings of the four quadrants around `(xs, ys)`, in the order SW, SE, NW, NE.
fn quadrant_windings(
    m: u32,
    pair: &MediumPair,
    bx: &SearchBox,
    xs: f64,
    ys: f64,
) -> Result<([SearchBox; 4], [i64; 4], usize)> {
    let (x0, x1, y0, y1) = (bx.re_min, bx.re_max, bx.im_min, bx.im_max);
    let c = |x: f64, y: f64| Complex64::new(x, y);
    let mut samples = 0;
    let mut edge = |a: Complex64, b: Complex64| -> Result<f64> {
        let (phase, used) = edge_phase(m, pair, a, b)?;
        samples += used;
        Ok(phase)
    };
    let b1 = edge(c(x0, y0), c(xs, y0))?;
    let b2 = edge(c(xs, y0), c(x1, y0))?;
    let t1 = edge(c(x0, y1), c(xs, y1))?;
    let t2 = edge(c(xs, y1), c(x1, y1))?;
    let l1 = edge(c(x0, y0), c(x0, ys))?;
    let l2 = edge(c(x0, ys), c(x0, y1))?;
    let r1 = edge(c(x1, y0), c(x1, ys))?;
    let r2 = edge(c(x1, ys), c(x1, y1))?;
    let h1 = edge(c(x0, ys), c(xs, ys))?;
    let h2 = edge(c(xs, ys), c(x1, ys))?;
    let v1 = edge(c(xs, y0), c(xs, ys))?;
    let v2 = edge(c(xs, ys), c(xs, y1))?;
    let windings = [
        turns_to_count(b1 + v1 - h1 - l1)?,
        turns_to_count(b2 + r1 - h2 - v1)?,
        turns_to_count(h1 + v2 - t1 - l2)?,
        turns_to_count(h2 + r2 - t2 - v2)?,
    ];
    let boxes = [
        SearchBox { re_min: x0, re_max: xs, im_min: y0, im_max: ys },
        SearchBox { re_min: xs, re_max: x1, im_min: y0, im_max: ys },
        SearchBox { re_min: x0, re_max: xs, im_min: ys, im_max: y1 },
        SearchBox { re_min: xs, re_max: x1, im_min: ys, im_max: y1 },
    ];
    Ok((boxes, windings, samples))
}

fn record(m: u32, lambda: Complex64, multiplicity: u32, residual: f64, bx: SearchBox, flags: Vec<String>) -> ZeroRecord {
    ZeroRecord { mode: m, lambda, multiplicity, residual, isolating_box: bx, flags }
}

/// Zeros of `f_m` inside `bx` with known winding `w`.
fn resolve(m: u32, pair: &MediumPair, bx: SearchBox, w: i64, out: &mut Vec<ZeroRecord>) -> usize {
    let mut samples = 0;
    let mut work = vec![(bx, w)];
    while let Some((bx, w)) = work.pop() {
        if w <= 0 {
            continue;
        }
        if w == 1 {
            if let Ok((z, r)) = polish(m, pair, bx.center(), newton_step(&bx)) {
                if bx.contains_closed(z) && r <= ACCEPT_TOL {
                    let mut f = Vec::new();
                    if r > POLISH_TOL {
                        f.push(flags::LOW_PRECISION.to_string());
                    }
                    out.push(record(m, z, 1, r, bx, f));
                    continue;
                }
            }
        }
        if bx.scale() < MIN_BOX {
            let (z, r) = polish(m, pair, bx.center(), newton_step(&bx)).unwrap_or((bx.center(), f64::NAN));
            let (z, r) = if bx.contains_closed(z) { (z, r) } else { (bx.center(), f64::NAN) };
            let mut f = Vec::new();
            if w > 1 {
                f.push(flags::MULTIPLE.to_string());
            }
            if !(r <= ACCEPT_TOL) {
                f.push(flags::UNPOLISHED.to_string());
            }
            out.push(record(m, z, w as u32, r, bx, f));
            continue;
        }
        let mut split = None;
        for (i, &j) in JITTER.iter().enumerate() {
            let xs = bx.re_min + (0.5 + j) * bx.width();
            let ys = bx.im_min + (0.5 - JITTER[(i + 3) % JITTER.len()]) * bx.height();
            match quadrant_windings(m, pair, &bx, xs, ys) {
                Ok((boxes, windings, used)) => {
                    samples += used;
                    if windings.iter().sum::<i64>() == w && windings.iter().all(|&x| x >= 0) {
                        split = Some((boxes, windings));
                        break;
                    }
                }
                Err(_) => continue,
            }
        }
        match split {
            Some((boxes, windings)) => {
                // pushed in reverse so the SW quadrant is processed first
                for k in (0..4).rev() {
                    if windings[k] > 0 {
                        work.push((boxes[k], windings[k]));
                    }
                }
            }
            None => {
                let c = bx.center();
                let r = det_log(m, c, pair).map(|v| v.normalized().norm()).unwrap_or(f64::NAN);
                out.push(record(m, c, w as u32, r, bx, vec![flags::UNRESOLVED.to_string()]));
            }
        }
    }
    samples
}

/// Every zero of `f_m` inside `bx`, with multiplicities summing to the box winding.
///
/// If the box edge itself passes through a zero the box is enlarged by a
/// small deterministic margin (at most eight times).
pub fn find_zeros_mode(m: u32, pair: &MediumPair, bx: &SearchBox) -> ModeScan {
    let mut scan = ModeScan {
        mode: m,
        winding: 0,
        records: Vec::new(),
        samples: 0,
        searched_box: *bx,
        flags: Vec::new(),
    };
    let mut attempt = 0;
    let winding = loop {
        let candidate = bx.expanded(JITTER[attempt].abs() * 0.1 * bx.scale().min(1.0));
        match winding_with_samples(m, pair, &candidate) {
            Ok(w) => {
                scan.samples += w.samples;
                scan.searched_box = candidate;
                if attempt > 0 {
                    scan.flags.push(flags::CONTOUR_RETRY.to_string());
                }
                break Some(w.count);
            }
            Err(_) if attempt + 1 < JITTER.len() => attempt += 1,
            Err(_) => break None,
        }
    };
    let Some(winding) = winding else {
        scan.flags.push(flags::UNRESOLVED.to_string());
        return scan;
    };
    scan.winding = winding;
    let mut records = Vec::new();
    scan.samples += resolve(m, pair, scan.searched_box, winding, &mut records);
    sort_records(&mut records);
    scan.records = records;
    scan
}

fn sort_records(records: &mut [ZeroRecord]) {
    records.sort_by(|a, b| {
        a.mode
            .cmp(&b.mode)
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
}

/// Default mode cap `ceil(R max sqrt(n/c)) + ceil(2 R^(1/3)) + 10` with `R`
/// the largest `|l|` in the box.
pub fn default_m_max(pair: &MediumPair, bx: &SearchBox) -> u32 {
    let r = bx.max_modulus();
    let s = pair.m1().sqrt().max(pair.m2().sqrt());
    (r * s).ceil() as u32 + (2.0 * r.cbrt()).ceil() as u32 + 10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub pair: MediumPair,
    pub search_box: SearchBox,
    pub zeros: Vec<ZeroRecord>,
    pub m_max: u32,
    pub samples: usize,
    /// Winding of each mode over the searched region.
    pub mode_windings: Vec<i64>,
    pub unresolved_modes: Vec<u32>,
}

impl ZeroSet {
    pub fn unresolved_count(&self) -> usize {
        self.zeros.iter().filter(|z| z.is_unresolved()).count() + self.unresolved_modes.len()
    }

    pub fn is_clean(&self) -> bool {
        self.unresolved_count() == 0
    }

    pub fn to_json(&self, runtime_ms: Option<f64>) -> Value {
        let zeros: Vec<Value> = self
            .zeros
            .iter()
            .map(|z| {
                json!({
                    "mode": z.mode,
                    "re": json_f64(z.lambda.re),
                    "im": json_f64(z.lambda.im),
                    "multiplicity": z.multiplicity,
                    "residual": json_f64(z.residual),
                    "flags": z.flags,
                })
            })
            .collect();
        let mut meta = json!({ "m_max": self.m_max, "samples": self.samples });
        if let Some(ms) = runtime_ms {
            meta["runtime_ms"] = json_f64(ms);
        }
        json!({
            "pair": {
                "c1": json_f64(self.pair.c1),
                "n1": json_f64(self.pair.n1),
                "c2": json_f64(self.pair.c2),
                "n2": json_f64(self.pair.n2),
            },
            "box": self.search_box.to_json(),
            "zeros": zeros,
            "meta": meta,
        })
    }

    pub const CSV_HEADER: [&'static str; 6] = ["mode", "re", "im", "multiplicity", "residual", "flags"];

    pub fn csv_records(&self) -> Vec<Vec<String>> {
        self.zeros
            .iter()
            .map(|z| {
                vec![
                    z.mode.to_string(),
                    fmt_f64(z.lambda.re),
                    fmt_f64(z.lambda.im),
                    z.multiplicity.to_string(),
                    fmt_f64(z.residual),
                    z.flags.join(";"),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub m_max: Option<u32>,
    pub real_axis_margin: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { m_max: None, real_axis_margin: REAL_AXIS_MARGIN }
    }
}

/// All transmission eigenvalues in `bx` for modes `0..=m_max`.
///
/// A box whose lower edge is the real axis is searched down to
/// `-real_axis_margin`; zeros found below the axis are the conjugates of
/// zeros above it and are dropped, and polished zeros within `SNAP_TOL` of
/// the axis are put on it.
pub fn scan_zeros(pair: &MediumPair, bx: &SearchBox, opts: ScanOptions) -> Result<ZeroSet> {
    let s = pair.m1().sqrt().max(pair.m2().sqrt());
    if bx.max_modulus() * s > SCALING_BUDGET {
        return Err(Error::InvalidInput(format!(
            "box reaches |l| = {} beyond the scaling budget {}",
            bx.max_modulus(),
            SCALING_BUDGET / s
        )));
    }
    if bx.contains_closed(Complex64::new(0.0, 0.0)) {
        return Err(Error::InvalidInput("the search box must exclude l = 0".into()));
    }
    let m_max = opts.m_max.unwrap_or_else(|| default_m_max(pair, bx));
    let on_axis = bx.im_min == 0.0;
    let searched = if on_axis {
        SearchBox { im_min: -opts.real_axis_margin, ..*bx }
    } else {
        *bx
    };
    let scans: Vec<ModeScan> = (0..=m_max).into_par_iter().map(|m| find_zeros_mode(m, pair, &searched)).collect();

    let mut zeros = Vec::new();
    let mut samples = 0;
    let mut mode_windings = Vec::with_capacity(scans.len());
    let mut unresolved_modes = Vec::new();
    for scan in scans {
        samples += scan.samples;
        mode_windings.push(scan.winding);
        if scan.flags.iter().any(|f| f == flags::UNRESOLVED) {
            unresolved_modes.push(scan.mode);
        }
        for mut z in scan.records {
            if on_axis {
                if z.lambda.im.abs() <= SNAP_TOL {
                    z.lambda.im = 0.0;
                }
                if z.lambda.im < 0.0 && !z.is_unresolved() {
                    continue;
                }
            }
            if !bx.contains_closed(z.lambda) && !z.is_unresolved() {
                continue;
            }
            zeros.push(z);
        }
    }
    sort_records(&mut zeros);
    Ok(ZeroSet { pair: *pair, search_box: *bx, zeros, m_max, samples, mode_windings, unresolved_modes })
}
