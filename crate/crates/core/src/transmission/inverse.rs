//! Mode-wise lower bounds for `T(l) = c1 N1(l) - c2 N2(l)`.
//!
//! On the disk `T` is diagonal with entries `t_m = d_m^(1) - d_m^(2)` (the
//! DN values already carry their `c_j`). The norm of `T^-1` between Sobolev
//! spaces of orders `(1-k)/2` and `(1+k)/2` is `1 / inf_m |t_m| w_k(m)` with
//! `w_k(m) = <m / |l|>^-k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dn_disk::{dn_modes, mode_cap, Medium, DEFAULT_MARGIN};
use crate::error::Result;
use crate::symbols::{classify_case, CaseLabel, MediumPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseBound {
    pub lambda: Complex64,
    pub case: CaseLabel,
    /// Sobolev shift `k`; `None` for the unweighted L2 bound.
    pub weight_order: Option<i32>,
    /// `inf_m |t_m| w_k(m)` over `0 <= m <= mode_cap`.
    pub inf: f64,
    pub argmin_mode: u32,
    pub mode_cap: u32,
    /// `inf |l|^((k-1)/2)`: bounded below when the norm of `T^-1` is at most
    /// a constant times `|l|^((k-1)/2)`. Equals `inf` for the L2 bound.
    pub normalized: f64,
    pub skipped_poles: u32,
}

/// Weight order used for each case: `k = -1` for equal unit `c`, `k = +1`
/// for the negative product, none otherwise.
pub fn weight_order(case: CaseLabel) -> Option<i32> {
    match case {
        CaseLabel::Isotropic => Some(-1),
        CaseLabel::AnisoNegative => Some(1),
        CaseLabel::AnisoPositiveDistinct | CaseLabel::Degenerate => None,
    }
}

pub fn inverse_bound(lambda: Complex64, pair: &MediumPair) -> Result<InverseBound> {
    let case = classify_case(pair);
    let k = weight_order(case);
    let m1 = Medium::new(pair.c1, pair.n1)?;
    let m2 = Medium::new(pair.c2, pair.n2)?;
    let faster = if pair.m1() >= pair.m2() { m1 } else { m2 };
    let cap = mode_cap(lambda, faster, DEFAULT_MARGIN);
    let d1 = dn_modes(cap, lambda, m1)?;
    let d2 = dn_modes(cap, lambda, m2)?;
    let abs_l = lambda.norm();

    let mut inf = f64::INFINITY;
    let mut argmin = 0;
    let mut skipped = 0;
    for (m, (a, b)) in d1.into_iter().zip(d2).enumerate() {
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let bracket = (1.0 + (m as f64 / abs_l).powi(2)).sqrt();
        let w = match k {
            Some(k) => bracket.powi(-k),
            None => 1.0,
        };
        let v = (a - b).norm() * w;
        if v < inf {
            inf = v;
            argmin = m as u32;
        }
    }
    let normalized = match k {
        Some(k) => inf * abs_l.powf((k as f64 - 1.0) / 2.0),
        None => inf,
    };
    Ok(InverseBound {
        lambda,
        case,
        weight_order: k,
        inf,
        argmin_mode: argmin,
        mode_cap: cap,
        normalized,
        skipped_poles: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_media_have_no_inverse() {
        let pair = MediumPair::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(inverse_bound(Complex64::new(20.0, 8.0), &pair).unwrap().inf, 0.0);
    }

    #[test]
    fn isotropic_bound_is_positive() {
        let pair = MediumPair::new(1.0, 1.0, 1.0, 4.0).unwrap();
        let b = inverse_bound(Complex64::new(20.0, 8.0), &pair).unwrap();
        assert_eq!(b.weight_order, Some(-1));
        assert!(b.inf > 0.0 && b.normalized > 0.0);
        assert!((b.normalized - b.inf / Complex64::new(20.0, 8.0).norm()).abs() < 1e-12 * b.inf);
    }
}
