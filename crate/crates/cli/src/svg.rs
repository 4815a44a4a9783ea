//! SVG heatmap of `log10 min_m |f_m|` over a search box.
//!
//! `|f_m|` is the normalized determinant, so the picture is bounded and the
//! dark spots are the eigenvalues.

use std::fmt::Write;

use dtn_core::symbols::MediumPair;
use dtn_core::transmission::{det_normalized, SearchBox};
use num_complex::Complex64;
use rayon::prelude::*;

pub const WIDTH: usize = 1024;
pub const HEIGHT: usize = 768;
const CELL: usize = 8;

/// Linear ramp from dark violet (low) to yellow (high).
fn ramp(t: f64) -> (u8, u8, u8) {
    let lo = [68.0, 1.0, 84.0];
    let hi = [253.0, 231.0, 37.0];
    let t = t.clamp(0.0, 1.0);
    let c = |i: usize| (lo[i] + t * (hi[i] - lo[i])).round() as u8;
    (c(0), c(1), c(2))
}

/// Cell values, row 0 at the top (largest `Im`).
pub fn grid_values(pair: &MediumPair, bx: &SearchBox, m_max: u32) -> Vec<f64> {
    let (nx, ny) = (WIDTH / CELL, HEIGHT / CELL);
    (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let z = Complex64::new(
                bx.re_min + (i as f64 + 0.5) / nx as f64 * bx.width(),
                bx.im_max - (j as f64 + 0.5) / ny as f64 * bx.height(),
            );
            (0..=m_max)
                .filter_map(|m| det_normalized(m, z, pair).ok())
                .map(|v| v.norm())
                .fold(f64::INFINITY, f64::min)
                .log10()
        })
        .collect()
}

pub fn heatmap(pair: &MediumPair, bx: &SearchBox, m_max: u32) -> String {
    let values = grid_values(pair, bx, m_max);
    let finite = values.iter().filter(|v| v.is_finite());
    let lo = finite.clone().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let nx = WIDTH / CELL;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        "<title>log10 min_m |f_m| on [{}, {}] x [{}, {}], modes 0..={m_max}, range [{lo:.3}, {hi:.3}]</title>",
        bx.re_min, bx.re_max, bx.im_min, bx.im_max
    );
    for (k, v) in values.iter().enumerate() {
        let (x, y) = ((k % nx) * CELL, (k / nx) * CELL);
        let fill = if v.is_finite() {
            let (r, g, b) = ramp((v - lo) / span);
            format!("#{r:02x}{g:02x}{b:02x}")
        } else {
            "#808080".to_string()
        };
        let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
