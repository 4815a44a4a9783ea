//! Certification of eigenvalue-free regions inside a finite window.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::winding::winding_count;
use super::zeros::{scan_zeros, ScanOptions, ZeroRecord, ZeroSet};
use super::SearchBox;
use crate::error::{Error, Result};
use crate::output::json_f64;
use crate::symbols::{classify_case, CaseLabel, MediumPair};

/// Region above a curve in the upper half plane, mirrored below the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    /// `|Im l| >= c`.
    HorizontalStrip { c: f64 },
    /// `|Im l| >= a + b log(Re l + 1)`.
    LogCurve { a: f64, b: f64 },
    /// `|Im l| >= c (Re l + 1)^eps`.
    PowerCurve { c: f64, eps: f64 },
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RegionSpec::HorizontalStrip { c } => c > 0.0 && c.is_finite(),
            RegionSpec::LogCurve { a, b } => a.is_finite() && b > 0.0 && b.is_finite(),
            RegionSpec::PowerCurve { c, eps } => c > 0.0 && c.is_finite() && (0.0..1.0).contains(&eps),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid region parameters {self:?}")))
        }
    }

    /// Lower edge of the region at a given real part.
    pub fn threshold(&self, re: f64) -> f64 {
        let x = re.max(0.0);
        match *self {
            RegionSpec::HorizontalStrip { c } => c,
            RegionSpec::LogCurve { a, b } => a + b * (x + 1.0).ln(),
            RegionSpec::PowerCurve { c, eps } => c * (x + 1.0).powf(eps),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.im.abs() >= self.threshold(z.re)
    }

    /// Smallest parameter of this kind for which none of `zeros` lies in the
    /// region: the largest `|Im|`, or the largest normalized height for the
    /// curves (with `a` held fixed for the log curve).
    pub fn empirical_parameter(&self, zeros: &[ZeroRecord]) -> f64 {
        zeros
            .iter()
            .map(|z| {
                let (x, y) = (z.lambda.re.max(0.0), z.lambda.im.abs());
                match *self {
                    RegionSpec::HorizontalStrip { .. } => y,
                    RegionSpec::LogCurve { a, .. } => {
                        let l = (x + 1.0).ln();
                        if l > 0.0 {
                            (y - a) / l
                        } else {
                            f64::INFINITY
                        }
                    }
                    RegionSpec::PowerCurve { eps, .. } => y / (x + 1.0).powf(eps),
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RegionSpec::HorizontalStrip { .. } => "horizontal_strip",
            RegionSpec::LogCurve { .. } => "log_curve",
            RegionSpec::PowerCurve { .. } => "power_curve",
        }
    }

    fn admits(&self, case: CaseLabel) -> bool {
        match self {
            RegionSpec::HorizontalStrip { .. } => matches!(case, CaseLabel::Isotropic | CaseLabel::AnisoNegative),
            RegionSpec::LogCurve { .. } => case == CaseLabel::AnisoPositiveDistinct,
            RegionSpec::PowerCurve { .. } => case != CaseLabel::Degenerate,
        }
    }
}

pub fn check_case(pair: &MediumPair, region: &RegionSpec) -> Result<CaseLabel> {
    let case = classify_case(pair);
    if region.admits(case) {
        Ok(case)
    } else {
        Err(Error::CaseRefusal(format!(
            "{} regions are not available for a pair of case {case}",
            region.kind_name()
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionOptions {
    pub m_max: Option<u32>,
    /// Number of vertical slabs covering the region.
    pub slabs: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions { m_max: None, slabs: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeRegionReport {
    pub case: CaseLabel,
    pub region: RegionSpec,
    pub window: SearchBox,
    pub violations: Vec<ZeroRecord>,
    pub certified: bool,
    pub empirical_c: f64,
    pub zero_count: usize,
    pub cover_boxes: Vec<SearchBox>,
    pub m_max: u32,
    pub flags: Vec<String>,
}

impl FreeRegionReport {
    pub fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
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
        let region = match self.region {
            RegionSpec::HorizontalStrip { c } => json!({"kind": "horizontal_strip", "c": json_f64(c)}),
            RegionSpec::LogCurve { a, b } => json!({"kind": "log_curve", "a": json_f64(a), "b": json_f64(b)}),
            RegionSpec::PowerCurve { c, eps } => {
                json!({"kind": "power_curve", "c": json_f64(c), "eps": json_f64(eps)})
            }
        };
        json!({
            "case": self.case.as_str(),
            "region": region,
            "window": self.window.to_json(),
            "certified": self.certified,
            "empirical_c": json_f64(self.empirical_c),
            "zero_count": self.zero_count,
            "violations": violations,
            "cover_boxes": self.cover_boxes.len(),
            "m_max": self.m_max,
            "flags": self.flags,
        })
    }
}

/// Boxes covering `region` inside `window` (upper half plane part).
///
/// Each slab `[x_a, x_b]` is covered from the curve value at `x_a` upward;
/// the thresholds are nondecreasing in `Re`, so the box contains the region
/// over the slab.
pub fn cover(region: &RegionSpec, window: &SearchBox, slabs: usize) -> Vec<SearchBox> {
    let slabs = slabs.max(1);
    let top = window.im_max.max(-window.im_min);
    let mut out = Vec::new();
    for i in 0..slabs {
        let xa = window.re_min + window.width() * i as f64 / slabs as f64;
        let xb = if i + 1 == slabs { window.re_max } else { window.re_min + window.width() * (i + 1) as f64 / slabs as f64 };
        let bottom = region.threshold(xa).max(0.0);
        if bottom < top {
            out.push(SearchBox { re_min: xa, re_max: xb, im_min: bottom, im_max: top });
        }
    }
    out
}

/// Zero winding for every mode on every cover box. Boxes whose edge meets a
/// zero are grown downward (still covering the region) before giving up.
fn certify(pair: &MediumPair, boxes: &[SearchBox], m_max: u32, flags: &mut Vec<String>) -> bool {
    let jobs: Vec<(usize, u32)> = (0..boxes.len()).flat_map(|b| (0..=m_max).map(move |m| (b, m))).collect();
    let results: Vec<Option<i64>> = jobs
        .par_iter()
        .map(|&(b, m)| {
            let bx = boxes[b];
            for j in 0..9 {
                let grown = SearchBox { im_min: bx.im_min - 1e-3 * j as f64 * bx.height(), ..bx };
                if let Ok(w) = winding_count(m, pair, &grown) {
                    return Some(w);
                }
            }
            None
        })
        .collect();
    let mut ok = true;
    for r in results {
        match r {
            Some(0) => {}
            Some(_) => ok = false,
            None => {
                ok = false;
                if !flags.iter().any(|f| f == "unresolved_cover") {
                    flags.push("unresolved_cover".into());
                }
            }
        }
    }
    ok
}

/// Scan `window`, list the zeros that fall in `region`, and certify the
/// region by the argument principle.
pub fn free_region_check(
    pair: &MediumPair,
    region: &RegionSpec,
    window: &SearchBox,
    opts: RegionOptions,
) -> Result<FreeRegionReport> {
    region.validate()?;
    check_case(pair, region)?;
    let zs = scan_zeros(pair, window, ScanOptions { m_max: opts.m_max, ..ScanOptions::default() })?;
    free_region_check_with(&zs, region, opts)
}

/// Same as `free_region_check`, reusing an existing scan of the window.
pub fn free_region_check_with(zs: &ZeroSet, region: &RegionSpec, opts: RegionOptions) -> Result<FreeRegionReport> {
    region.validate()?;
    let case = check_case(&zs.pair, region)?;
    let window = zs.search_box;
    let violations: Vec<ZeroRecord> = zs.zeros.iter().filter(|z| region.contains(z.lambda)).cloned().collect();
    let mut flags = Vec::new();
    if !zs.is_clean() {
        flags.push("unresolved_scan".to_string());
    }
    let boxes = cover(region, &window, opts.slabs);
    let m_max = opts.m_max.unwrap_or(zs.m_max);
    let free = certify(&zs.pair, &boxes, m_max, &mut flags);
    Ok(FreeRegionReport {
        case,
        region: *region,
        window,
        certified: free && violations.is_empty() && zs.is_clean(),
        violations,
        empirical_c: region.empirical_parameter(&zs.zeros),
        zero_count: zs.zeros.len(),
        cover_boxes: boxes,
        m_max,
        flags,
    })
}

/// Envelope `|Im| <= a + b log(Re + 1)` for a set of zeros: `b` is the
/// least-squares slope of the per-bin maxima, `a` the smallest intercept
/// that puts every zero on or below the curve.
pub fn fit_log_envelope(zeros: &[ZeroRecord], bins: usize) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        zeros.iter().filter(|z| z.lambda.re > 0.0).map(|z| ((z.lambda.re + 1.0).ln(), z.lambda.im.abs())).collect();
    if pts.len() < 2 {
        return None;
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return None;
    }
    let bins = bins.max(2);
    let mut maxima: Vec<Option<(f64, f64)>> = vec![None; bins];
    for &(x, y) in &pts {
        let i = (((x - lo) / (hi - lo)) * bins as f64).floor().min(bins as f64 - 1.0) as usize;
        if maxima[i].is_none_or(|(_, my)| y > my) {
            maxima[i] = Some((x, y));
        }
    }
    let m: Vec<(f64, f64)> = maxima.into_iter().flatten().collect();
    let b = if m.len() >= 2 {
        let n = m.len() as f64;
        let mx = m.iter().map(|p| p.0).sum::<f64>() / n;
        let my = m.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = m.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = m.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let a = pts.iter().map(|&(x, y)| y - b * x).fold(f64::NEG_INFINITY, f64::max);
    Some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refusals() {
        let aniso_pos = MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let strip = RegionSpec::HorizontalStrip { c: 5.0 };
        assert!(matches!(check_case(&aniso_pos, &strip), Err(Error::CaseRefusal(_))));
        let iso = MediumPair::new(1.0, 1.0, 1.0, 4.0).unwrap();
        assert!(matches!(check_case(&iso, &RegionSpec::LogCurve { a: 0.0, b: 1.0 }), Err(Error::CaseRefusal(_))));
        let degenerate = MediumPair::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(check_case(&degenerate, &RegionSpec::PowerCurve { c: 1.0, eps: 0.5 }).is_err());
        assert!(check_case(&iso, &strip).is_ok());
    }

    #[test]
    fn cover_contains_region() {
        let region = RegionSpec::LogCurve { a: 1.0, b: 2.0 };
        let window = SearchBox::new(1.0, 80.0, 0.0, 25.0).unwrap();
        let boxes = cover(&region, &window, 8);
        for i in 0..=400 {
            for j in 0..=100 {
                let z = Complex64::new(1.0 + 79.0 * i as f64 / 400.0, 25.0 * j as f64 / 100.0);
                if region.contains(z) {
                    assert!(boxes.iter().any(|b| b.contains_closed(z)), "{z}");
                }
            }
        }
    }

    #[test]
    fn envelope_bounds_every_point() {
        let mk = |re: f64, im: f64| ZeroRecord {
            mode: 0,
            lambda: Complex64::new(re, im),
            multiplicity: 1,
            residual: 0.0,
            isolating_box: SearchBox::new(0.0, 1.0, 0.0, 1.0).unwrap(),
            flags: vec![],
        };
        let zeros: Vec<ZeroRecord> =
            (1..50).map(|i| mk(i as f64, 0.5 + 1.5 * (i as f64 + 1.0).ln() * ((i % 3) as f64 / 2.0))).collect();
        let (a, b) = fit_log_envelope(&zeros, 6).unwrap();
        assert!(b > 0.0);
        for z in &zeros {
            assert!(z.lambda.im <= a + b * (z.lambda.re + 1.0).ln() + 1e-12);
        }
    }
}
