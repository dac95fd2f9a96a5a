#![allow(dead_code)]

use rcl_core::certify::{compute_certificate, ConfigurationX};
use rcl_core::spec_builder::{build_spec, ColoringSpec};
use rcl_core::FieldElement;

pub fn fe(s: &str) -> FieldElement {
    s.parse().unwrap_or_else(|e| panic!("{s:?}: {e}"))
}

pub fn collinear_spec(coords: &[&str]) -> ColoringSpec {
    let pts: Vec<FieldElement> = coords.iter().map(|s| fe(s)).collect();
    let x = ConfigurationX::collinear(&pts).unwrap();
    let cert = compute_certificate(&x).unwrap();
    build_spec(cert.certificate().expect("non-spherical")).unwrap()
}

/// The spec for three equally spaced collinear points.
pub fn l3_spec() -> ColoringSpec {
    collinear_spec(&["0", "1", "2"])
}

/// An `r = 2` spec: collinear points `0, 1, sqrt(2)`.
pub fn surd_spec() -> ColoringSpec {
    collinear_spec(&["0", "1", "sqrt(2)"])
}

/// Exhaustive enumeration over boxes with faces at point coordinates or
/// the cube faces, each face either including or excluding points on it.
/// Returns `(d_star, d_extreme)`. Only for `r <= 2` and small `m`.
pub fn brute_discrepancy(points: &[Vec<f64>]) -> (f64, f64) {
    let r = points[0].len();
    assert!(r == 1 || r == 2);
    let m = points.len() as f64;
    let edges: Vec<Vec<f64>> = (0..r)
        .map(|d| {
            let mut e: Vec<f64> = points.iter().map(|p| p[d]).collect();
            e.push(0.0);
            e.push(1.0);
            e.sort_by(f64::total_cmp);
            e.dedup();
            e
        })
        .collect();
    // intervals per dimension: (lo, hi, lo_inclusive, hi_inclusive)
    let intervals: Vec<Vec<(f64, f64, bool, bool)>> = edges
        .iter()
        .map(|e| {
            let mut v = Vec::new();
            for (i, &a) in e.iter().enumerate() {
                for &b in &e[i..] {
                    for li in [true, false] {
                        for hi in [true, false] {
                            v.push((a, b, li, hi));
                        }
                    }
                }
            }
            v
        })
        .collect();
    assert!(points.len() <= 64, "bitmask counting needs m <= 64");
    let inside = |x: f64, (a, b, li, hi): (f64, f64, bool, bool)| {
        (if li { x >= a } else { x > a }) && (if hi { x <= b } else { x < b })
    };
    // (width, mask of contained points, anchored at 0 with 0 included)
    let masks: Vec<Vec<(f64, u64, bool)>> = intervals
        .iter()
        .enumerate()
        .map(|(d, iv)| {
            iv.iter()
                .map(|&b| {
                    let mask = points
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| inside(p[d], b))
                        .fold(0u64, |acc, (i, _)| acc | 1 << i);
                    (b.1 - b.0, mask, b.0 == 0.0 && b.2)
                })
                .collect()
        })
        .collect();
    let mut star = 0.0f64;
    let mut ext = 0.0f64;
    let mut visit = |vol: f64, mask: u64, anchored: bool| {
        let d = (mask.count_ones() as f64 / m - vol).abs();
        ext = ext.max(d);
        if anchored {
            star = star.max(d);
        }
    };
    if r == 1 {
        for &(w, mk, an) in &masks[0] {
            visit(w, mk, an);
        }
    } else {
        for &(w0, m0, a0) in &masks[0] {
            for &(w1, m1, a1) in &masks[1] {
                visit(w0 * w1, m0 & m1, a0 && a1);
            }
        }
    }
    (star, ext.min(1.0))
}
