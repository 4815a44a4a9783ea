//! Counting transmission eigenvalues in a disk `|l| <= r` and comparing with
//! the leading Weyl term.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::zeros::{scan_zeros, ScanOptions, ZeroRecord, ZeroSet};
use super::SearchBox;
use crate::error::{Error, Result};
use crate::output::json_f64;
use crate::symbols::MediumPair;

/// Left edge of the counting box; keeps the contour off the trivial zero at 0.
pub const COUNT_RE_MIN: f64 = 0.1;

/// Leading coefficient for one medium on the unit disk: `(n / c) / 4`.
pub fn disk_coefficient(n_over_c: f64) -> f64 {
    n_over_c / 4.0
}

/// `(t1 + t2) r^2`.
pub fn weyl_prediction(pair: &MediumPair, r: f64) -> f64 {
    (disk_coefficient(pair.m1()) + disk_coefficient(pair.m2())) * r * r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub r: f64,
    /// Count from resolved zeros only.
    pub count: u64,
    /// Upper end when some sub-boxes stayed unresolved; equals `count` otherwise.
    pub count_max: u64,
    pub prediction: f64,
    pub ratio: f64,
}

impl WeylReport {
    pub fn is_exact(&self) -> bool {
        self.count == self.count_max
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": json_f64(self.r),
            "count": self.count,
            "count_max": self.count_max,
            "prediction": json_f64(self.prediction),
            "ratio": json_f64(self.ratio),
        })
    }
}

/// Counting weight of one record: angular multiplicity 2 for `m >= 1`, the
/// winding multiplicity, and 2 for a zero off the real axis (its conjugate).
pub fn counting_weight(z: &ZeroRecord) -> u64 {
    let angular = if z.mode == 0 { 1 } else { 2 };
    let conj = if z.lambda.im > 0.0 { 2 } else { 1 };
    angular * z.multiplicity as u64 * conj
}

/// Search box for counting up to radius `r`.
pub fn counting_box(r: f64) -> Result<SearchBox> {
    if !(r > COUNT_RE_MIN) || !r.is_finite() {
        return Err(Error::InvalidInput(format!("counting radius must exceed {COUNT_RE_MIN}, got {r}")));
    }
    SearchBox::new(COUNT_RE_MIN, r, 0.0, r)
}

pub fn weyl_count(pair: &MediumPair, r: f64) -> Result<WeylReport> {
    let bx = counting_box(r)?;
    let zs = scan_zeros(pair, &bx, ScanOptions::default())?;
    weyl_count_with(&zs, r)
}

/// Count from an existing scan whose box covers the quarter disk of radius `r`.
pub fn weyl_count_with(zs: &ZeroSet, r: f64) -> Result<WeylReport> {
    let b = zs.search_box;
    if b.re_min > COUNT_RE_MIN || b.re_max < r || b.im_min > 0.0 || b.im_max < r {
        return Err(Error::InvalidInput(format!("scan box does not cover the quarter disk of radius {r}")));
    }
    let mut count = 0;
    let mut extra = 0;
    for z in zs.zeros.iter().filter(|z| z.lambda.norm() <= r) {
        if z.is_unresolved() {
            extra += counting_weight(z);
        } else {
            count += counting_weight(z);
        }
    }
    let prediction = weyl_prediction(&zs.pair, r);
    // a mode that never resolved at the top level leaves the count open above
    let count_max = if zs.unresolved_modes.is_empty() { count + extra } else { u64::MAX };
    Ok(WeylReport { r, count, count_max, prediction, ratio: count as f64 / prediction })
}
