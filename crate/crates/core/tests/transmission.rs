//! Integration checks for the transmission eigenvalue scanner.

use dtn_core::error::Error;
use dtn_core::symbols::MediumPair;
use dtn_core::transmission::region::RegionOptions;
use dtn_core::transmission::zeros::default_m_max;
use dtn_core::transmission::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn iso() -> MediumPair {
    MediumPair::new(1.0, 1.0, 1.0, 4.0).unwrap()
}

// power series for J0 and J1 on the real line; fine for |x| <= 20
fn j0_j1(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let (mut t0, mut s0) = (1.0, 1.0);
    let (mut t1, mut s1) = (0.5 * x, 0.5 * x);
    for k in 1..80 {
        let k = k as f64;
        t0 *= q / (k * k);
        t1 *= q / (k * (k + 1.0));
        s0 += t0;
        s1 += t1;
    }
    (s0, s1)
}

// mode-0 determinant for (1,1,1,4) on the real axis, J0' = -J1
fn mode0_real(l: f64) -> f64 {
    let (a0, a1) = j0_j1(l);
    let (b0, b1) = j0_j1(2.0 * l);
    -2.0 * l * a0 * b1 + l * a1 * b0
}

#[test]
fn real_zeros_of_mode_zero_match_sign_changes() {
    let mut roots = Vec::new();
    let n = 6000;
    for i in 0..n {
        let (mut a, mut b) = (2.0 + 6.0 * i as f64 / n as f64, 2.0 + 6.0 * (i + 1) as f64 / n as f64);
        if mode0_real(a).signum() == mode0_real(b).signum() {
            continue;
        }
        for _ in 0..100 {
            let c = 0.5 * (a + b);
            if mode0_real(a).signum() == mode0_real(c).signum() {
                a = c;
            } else {
                b = c;
            }
        }
        roots.push(0.5 * (a + b));
    }
    assert!(!roots.is_empty());

    let bx = SearchBox::new(2.0, 8.0, 0.0, 1.0).unwrap();
    let zs = scan_zeros(&iso(), &bx, ScanOptions { m_max: Some(0), ..Default::default() }).unwrap();
    let real: Vec<f64> = zs.zeros.iter().filter(|z| z.lambda.im == 0.0).map(|z| z.lambda.re).collect();
    assert_eq!(real.len(), roots.len(), "{real:?} vs {roots:?}");
    for (x, y) in real.iter().zip(&roots) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
}

#[test]
fn multiplicities_sum_to_winding() {
    let bx = SearchBox::new(1.0, 12.0, -0.4, 3.0).unwrap();
    for pair in [iso(), MediumPair::new(1.0, 1.0, 2.0, 0.4).unwrap(), MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap()] {
        for m in 0..12 {
            let scan = find_zeros_mode(m, &pair, &bx);
            let total: i64 = scan.records.iter().map(|r| r.multiplicity as i64).sum();
            assert_eq!(total, scan.winding, "mode {m} {pair:?}");
            assert_eq!(winding_count(m, &pair, &scan.searched_box).unwrap(), scan.winding);
        }
    }
}

#[test]
fn eigenvalues_exist_in_isotropic_box() {
    let bx = SearchBox::new(1.0, 15.0, 0.01, 8.0).unwrap();
    let zs = scan_zeros(&iso(), &bx, ScanOptions::default()).unwrap();
    assert!(zs.is_clean());
    assert!(!zs.zeros.is_empty());
    // real eigenvalues just below the box bottom are found by the axis scan
    let axis = scan_zeros(&iso(), &SearchBox::new(1.0, 15.0, 0.0, 8.0).unwrap(), ScanOptions::default()).unwrap();
    assert!(axis.zeros.iter().any(|z| z.lambda.im == 0.0));
}

#[test]
fn conjugation_symmetric_box_gives_symmetric_set() {
    let pair = MediumPair::new(1.0, 1.0, 2.0, 0.4).unwrap();
    let bx = SearchBox::new(2.0, 9.0, -4.0, 4.0).unwrap();
    let zs = scan_zeros(&pair, &bx, ScanOptions::default()).unwrap();
    assert!(zs.is_clean());
    for z in &zs.zeros {
        let partner = zs
            .zeros
            .iter()
            .find(|w| w.mode == z.mode && (w.lambda - z.lambda.conj()).norm() < 1e-7 && w.multiplicity == z.multiplicity);
        assert!(partner.is_some(), "{z:?}");
    }
}

#[test]
fn small_box_perturbation_keeps_interior_zeros() {
    let pair = iso();
    let a = scan_zeros(&pair, &SearchBox::new(1.0, 10.0, 0.0, 3.0).unwrap(), ScanOptions::default()).unwrap();
    let b = scan_zeros(&pair, &SearchBox::new(0.99, 10.013, 0.0, 3.021).unwrap(), ScanOptions::default()).unwrap();
    let inner = |z: &ZeroRecord| z.lambda.re > 1.02 && z.lambda.re < 9.98 && z.lambda.im < 2.98;
    let za: Vec<&ZeroRecord> = a.zeros.iter().filter(|z| inner(z)).collect();
    let zb: Vec<&ZeroRecord> = b.zeros.iter().filter(|z| inner(z)).collect();
    assert_eq!(za.len(), zb.len());
    for (x, y) in za.iter().zip(&zb) {
        assert_eq!(x.mode, y.mode);
        assert!((x.lambda - y.lambda).norm() < 1e-8);
    }
}

#[test]
fn modes_past_the_cap_have_no_zeros() {
    for pair in [iso(), MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap()] {
        let bx = SearchBox::new(1.0, 15.0, -0.1, 8.0).unwrap();
        let cap = default_m_max(&pair, &bx);
        for m in cap + 1..=cap + 5 {
            assert_eq!(winding_count(m, &pair, &bx).unwrap(), 0, "mode {m}");
        }
    }
}

#[test]
fn disk_coefficient_matches_quadrature() {
    // (omega_2 / (2 pi)^2) * integral over the unit disk of n/c, midpoint rule in polar form
    for (c, n) in [(1.0, 1.0), (1.0, 4.0), (2.0, 0.4), (0.7, 3.3)] {
        let ratio: f64 = n / c;
        let (nr, nt) = (400, 64);
        let mut integral = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for _ in 0..nt {
                integral += ratio * r * (1.0 / nr as f64) * (std::f64::consts::TAU / nt as f64);
            }
        }
        let tau = std::f64::consts::PI / (4.0 * std::f64::consts::PI.powi(2)) * integral;
        assert!((tau - weyl::disk_coefficient(ratio)).abs() < 1e-10 * tau, "{tau}");
    }
    let pair = iso();
    assert!((weyl_prediction(&pair, 10.0) - 125.0).abs() < 1e-12);
}

#[test]
fn no_eigenvalues_in_tiny_disk() {
    let rep = weyl_count(&iso(), 0.5).unwrap();
    assert_eq!(rep.count, 0);
    assert!(rep.is_exact());
}

#[test]
fn counting_is_monotone_in_radius() {
    let pair = iso();
    let zs = scan_zeros(&pair, &weyl::counting_box(12.0).unwrap(), ScanOptions::default()).unwrap();
    let mut last = 0;
    for r in [1.0, 2.0, 3.5, 5.0, 7.5, 10.0, 12.0] {
        let rep = weyl_count_with(&zs, r).unwrap();
        assert!(rep.count >= last, "{r}");
        last = rep.count;
    }
    assert!(last > 0);
    assert_eq!(weyl_count(&pair, 12.0).unwrap().count, last);
}

#[test]
fn region_kinds_follow_the_case() {
    let pair = MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let bx = SearchBox::new(1.0, 10.0, 0.0, 8.0).unwrap();
    let strip = RegionSpec::HorizontalStrip { c: 4.0 };
    assert!(matches!(free_region_check(&pair, &strip, &bx, RegionOptions::default()), Err(Error::CaseRefusal(_))));
    let degenerate = MediumPair::new(1.0, 2.0, 1.0, 2.0).unwrap();
    let power = RegionSpec::PowerCurve { c: 2.0, eps: 0.5 };
    assert!(matches!(free_region_check(&degenerate, &power, &bx, RegionOptions::default()), Err(Error::CaseRefusal(_))));
}

#[test]
fn finer_cover_never_loses_certification() {
    let cases = [
        (iso(), RegionSpec::HorizontalStrip { c: 2.0 }),
        (MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap(), RegionSpec::LogCurve { a: 1.0, b: 2.0 }),
        (iso(), RegionSpec::PowerCurve { c: 1.0, eps: 0.3 }),
    ];
    for (pair, region) in cases {
        let zs = scan_zeros(&pair, &SearchBox::new(1.0, 20.0, 0.0, 10.0).unwrap(), ScanOptions::default()).unwrap();
        let mut was_certified = false;
        for slabs in [1, 2, 4, 8, 16] {
            let rep = free_region_check_with(&zs, &region, RegionOptions { m_max: None, slabs }).unwrap();
            assert!(rep.violations.is_empty() || !rep.certified);
            if was_certified {
                assert!(rep.certified, "{region:?} lost certification at {slabs} slabs");
            }
            was_certified |= rep.certified;
        }
        assert!(was_certified, "{region:?}");
    }
}

#[test]
fn inverse_bounds_stay_away_from_zero() {
    let pair = iso();
    let vals: Vec<f64> =
        [20.0, 40.0, 80.0].iter().map(|&re| inverse_bound(Complex64::new(re, 8.0), &pair).unwrap().normalized).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(lo > 0.0 && lo / hi >= 0.2, "{vals:?}");

    let pair = MediumPair::new(1.0, 1.0, 2.0, 1.0).unwrap();
    let vals: Vec<f64> = [10.0f64, 40.0, 160.0]
        .iter()
        .map(|&re| inverse_bound(Complex64::new(re, 3.0 * (re + 1.0).ln()), &pair).unwrap().inf)
        .collect();
    assert!(vals.iter().all(|&v| v > 1.0), "{vals:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_is_additive(split in 0.05f64..0.95, m in 0u32..8, vertical in any::<bool>()) {
        let pair = iso();
        let bx = SearchBox::new(1.5, 9.5, -0.35, 3.5).unwrap();
        let (a, b) = if vertical {
            let x = bx.re_min + split * bx.width();
            (SearchBox { re_max: x, ..bx }, SearchBox { re_min: x, ..bx })
        } else {
            let y = bx.im_min + split * bx.height();
            (SearchBox { im_max: y, ..bx }, SearchBox { im_min: y, ..bx })
        };
        let whole = winding_count(m, &pair, &bx).unwrap();
        // an error means the split line met a zero; nothing to compare
        if let (Ok(wa), Ok(wb)) = (winding_count(m, &pair, &a), winding_count(m, &pair, &b)) {
            prop_assert_eq!(whole, wa + wb);
        }
    }
}
