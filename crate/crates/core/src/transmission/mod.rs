//! Transmission eigenvalues of a pair of constant media on the unit disk:
//! mode determinants, argument-principle scanning, eigenvalue-free region
//! certification, inverse bounds and Weyl counting.

pub mod det;
pub mod inverse;
pub mod region;
pub mod weyl;
pub mod winding;
pub mod zeros;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::output::json_f64;

pub use det::{det_log, det_mode, det_normalized, DetValue};
pub use inverse::{inverse_bound, InverseBound};
pub use region::{free_region_check, free_region_check_with, FreeRegionReport, RegionSpec};
pub use weyl::{weyl_count, weyl_count_with, weyl_prediction, WeylReport};
pub use winding::{winding_count, winding_with_samples, Winding};
pub use zeros::{find_zeros_mode, scan_zeros, ModeScan, ScanOptions, ZeroRecord, ZeroSet};

/// Closed rectangle `[re_min, re_max] x [im_min, im_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "box [{re_min}, {re_max}] x [{im_min}, {im_max}] is empty or not finite"
            )));
        }
        Ok(SearchBox { re_min, re_max, im_min, im_max })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn scale(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains_closed(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn contains_open(&self, z: Complex64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }

    pub fn expanded(&self, margin: f64) -> SearchBox {
        SearchBox {
            re_min: self.re_min - margin,
            re_max: self.re_max + margin,
            im_min: self.im_min - margin,
            im_max: self.im_max + margin,
        }
    }

    /// Largest `|z|` over the box.
    pub fn max_modulus(&self) -> f64 {
        let x = self.re_min.abs().max(self.re_max.abs());
        let y = self.im_min.abs().max(self.im_max.abs());
        x.hypot(y)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "re_min": json_f64(self.re_min),
            "re_max": json_f64(self.re_max),
            "im_min": json_f64(self.im_min),
            "im_max": json_f64(self.im_max),
        })
    }
}
