//! Exponential sums `sum_j e(<h, z_j>)` with `e(x) = exp(2 pi i x)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::CompensatedSum;
use crate::lineseq::TorusSequence;

/// Points per partial sum. Fixed so results do not depend on thread count.
const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylSum {
    pub h: Vec<i64>,
    pub m: usize,
    pub re: f64,
    pub im: f64,
    pub magnitude_over_m: f64,
}

impl WeylSum {
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// `<h, z>` reduced to `[-1/2, 1/2)`.
fn phase(h: &[i64], z: &[f64]) -> f64 {
    let mut t = 0.0;
    for (&hk, &zk) in h.iter().zip(z) {
        let p = hk as f64 * zk;
        t += p - p.round();
    }
    t - t.round()
}

fn chunk_sum(h: &[i64], pts: &[Vec<f64>]) -> (CompensatedSum, CompensatedSum) {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for z in pts {
        let (s, c) = (std::f64::consts::TAU * phase(h, z)).sin_cos();
        re.add(c);
        im.add(s);
    }
    (re, im)
}

/// Compensated Weyl sum. Partial sums over fixed chunks are combined left
/// to right, so the value is bit-identical for any worker count.
pub fn weyl_sum(z: &TorusSequence, h: &[i64]) -> WeylSum {
    assert_eq!(h.len(), z.r, "frequency vector must have length r");
    let m = z.points.len();
    let partials: Vec<(CompensatedSum, CompensatedSum)> = z
        .points
        .par_chunks(CHUNK)
        .map(|c| chunk_sum(h, c))
        .collect();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (r, i) in &partials {
        re.merge(r);
        im.merge(i);
    }
    let (re, im) = (re.value(), im.value());
    let magnitude_over_m = if m == 0 { 0.0 } else { re.hypot(im) / m as f64 };
    WeylSum {
        h: h.to_vec(),
        m,
        re,
        im,
        magnitude_over_m,
    }
}
