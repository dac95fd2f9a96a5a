//! Discrepancy of finite point sets in `[0,1)^r`.
//!
//! `D` is the supremum of `|A(B)/m - vol(B)|` over half-open boxes
//! `B = prod [a_i, b_i)` inside the unit cube; `D*` restricts to boxes with
//! `a_i = 0`. Both suprema are approached by boxes whose faces sit at point
//! coordinates: shrinking onto points (closed in the limit) for the
//! overcount side, expanding up to points (open in the limit) for the
//! undercount side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lineseq::TorusSequence;

/// Largest `m` accepted by [`discrepancy_exact`] for `r = 1`.
pub const EXACT_LIMIT_R1: usize = 2000;
/// Largest `m` accepted by [`discrepancy_exact`] for `r = 2`.
pub const EXACT_LIMIT_R2: usize = 300;

/// An enclosure `[lower, upper]` of a discrepancy value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub lower: f64,
    pub upper: f64,
}

impl Estimate {
    pub fn exact(v: f64) -> Self {
        Estimate { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lower - slack <= v && v <= self.upper + slack
    }

    fn intersect(&self, other: &Estimate) -> Estimate {
        Estimate {
            lower: self.lower.max(other.lower),
            upper: self.upper.min(other.upper),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDiscrepancy {
    pub d_star: f64,
    pub d_extreme: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub star: Estimate,
    pub extreme: Estimate,
    /// Finest grid resolution used.
    pub grid: usize,
}

fn require_nonempty(z: &TorusSequence) -> Result<()> {
    if z.points.is_empty() {
        return Err(Error::InvalidArgument("discrepancy of an empty sequence".into()));
    }
    if z.r == 0 {
        return Err(Error::InvalidArgument("dimension r must be positive".into()));
    }
    Ok(())
}

/// Exact `D*` and `D` for `r = 1` (`m <= 2000`) and `r = 2` (`m <= 300`).
pub fn discrepancy_exact(z: &TorusSequence) -> Result<ExactDiscrepancy> {
    require_nonempty(z)?;
    let m = z.points.len();
    let limit = match z.r {
        1 => EXACT_LIMIT_R1,
        2 => EXACT_LIMIT_R2,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "exact discrepancy supports r <= 2, got r = {}; use discrepancy_bracket",
                z.r
            )))
        }
    };
    if m > limit {
        return Err(Error::SizeLimit {
            what: "points for exact discrepancy (use discrepancy_bracket)",
            count: m as u128,
            limit: limit as u128,
        });
    }
    Ok(match z.r {
        1 => {
            let xs: Vec<f64> = z.points.iter().map(|p| p[0]).collect();
            ExactDiscrepancy {
                d_star: star_1d(&xs),
                d_extreme: extreme_1d(&xs),
            }
        }
        _ => {
            let pts: Vec<(f64, f64)> = z.points.iter().map(|p| (p[0], p[1])).collect();
            ExactDiscrepancy {
                d_star: star_2d(&pts),
                d_extreme: extreme_2d(&pts),
            }
        }
    })
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `max_i max(i/m - x_(i), x_(i) - (i-1)/m)` over the sorted points.
pub fn star_1d(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let m = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / m - x).max(x - i / m)
        })
        .fold(0.0, f64::max)
}

/// Extreme discrepancy for intervals `[a, b)` inside `[0, 1)`.
pub fn extreme_1d(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let m = v.len() as f64;
    // overcount: [x_i, x_j] closed, (j - i + 1)/m - (x_j - x_i)
    let mut over = f64::NEG_INFINITY;
    let mut best_left = f64::NEG_INFINITY;
    for (j, &x) in v.iter().enumerate() {
        best_left = best_left.max(x - j as f64 / m);
        over = over.max((j as f64 + 1.0) / m - x + best_left);
    }
    // undercount: (e_l, e_u) open with sentinels 0 and 1
    let mut ext = Vec::with_capacity(v.len() + 2);
    ext.push(0.0);
    ext.extend_from_slice(&v);
    ext.push(1.0);
    let mut under = f64::NEG_INFINITY;
    let mut min_left = f64::INFINITY;
    for (u, &e) in ext.iter().enumerate() {
        if u > 0 {
            under = under.max(e - (u as f64 - 1.0) / m - min_left);
        }
        min_left = min_left.min(e - u as f64 / m);
    }
    over.max(under).clamp(0.0, 1.0)
}

fn unique_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn insert_sorted(v: &mut Vec<f64>, x: f64) {
    let i = v.partition_point(|&y| y <= x);
    v.insert(i, x);
}

/// Star discrepancy in two dimensions, `O(m^2 log m)`.
pub fn star_2d(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mut by_x = pts.to_vec();
    by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs = unique_sorted(pts.iter().map(|p| p.0).collect());
    let mut best = 0.0f64;

    // overcount: [0, b1] x [0, b2]
    let mut ys: Vec<f64> = Vec::with_capacity(pts.len());
    let mut next = 0;
    for &b1 in &xs {
        while next < by_x.len() && by_x[next].0 <= b1 {
            insert_sorted(&mut ys, by_x[next].1);
            next += 1;
        }
        for (i, &b2) in ys.iter().enumerate() {
            if i + 1 < ys.len() && ys[i + 1] == b2 {
                continue;
            }
            best = best.max((i + 1) as f64 / m - b1 * b2);
        }
    }

    // undercount: [0, b1) x [0, b2)
    let mut ys: Vec<f64> = Vec::with_capacity(pts.len());
    let mut next = 0;
    for b1 in xs.iter().copied().chain(std::iter::once(1.0)) {
        while next < by_x.len() && by_x[next].0 < b1 {
            insert_sorted(&mut ys, by_x[next].1);
            next += 1;
        }
        for b2 in ys.iter().copied().chain(std::iter::once(1.0)) {
            let below = ys.partition_point(|&y| y < b2);
            best = best.max(b1 * b2 - below as f64 / m);
        }
    }
    best.clamp(0.0, 1.0)
}

/// Extreme discrepancy in two dimensions, `O(m^3)`.
///
/// For every x-strip the best y-interval is a one-dimensional maximum
/// subarray problem on the strip's sorted y values.
pub fn extreme_2d(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mut by_x = pts.to_vec();
    by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
    // point index ranges per distinct x
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in by_x.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if g.0 == p.0 => g.2 = i + 1,
            _ => groups.push((p.0, i, i + 1)),
        }
    }
    let mut best = 0.0f64;

    // overcount: closed strips [x_i, x_j] and closed y-intervals
    let mut ys: Vec<f64> = Vec::with_capacity(pts.len());
    for i in 0..groups.len() {
        ys.clear();
        for j in i..groups.len() {
            for p in &by_x[groups[j].1..groups[j].2] {
                insert_sorted(&mut ys, p.1);
            }
            let w = groups[j].0 - groups[i].0;
            let mut left = f64::NEG_INFINITY;
            for (u, &v) in ys.iter().enumerate() {
                left = left.max(w * v - u as f64 / m);
                best = best.max((u + 1) as f64 / m - w * v + left);
            }
        }
    }

    // undercount: open strips (e_i, e_j) with sentinels 0 and 1
    let mut edges: Vec<f64> = vec![0.0];
    edges.extend(groups.iter().map(|g| g.0).filter(|&x| x != 0.0));
    edges.push(1.0);
    let group_at = |x: f64| {
        let i = groups.partition_point(|g| g.0 < x);
        groups.get(i).filter(|g| g.0 == x)
    };
    let mut ys: Vec<f64> = Vec::with_capacity(pts.len());
    let mut ext: Vec<(f64, usize)> = Vec::with_capacity(pts.len() + 2);
    for i in 0..edges.len() {
        ys.clear();
        for j in i + 1..edges.len() {
            if j - 1 > i {
                if let Some(g) = group_at(edges[j - 1]) {
                    for p in &by_x[g.1..g.2] {
                        insert_sorted(&mut ys, p.1);
                    }
                }
            }
            let w = edges[j] - edges[i];
            // unique strip values with cumulative counts, sentinels included
            ext.clear();
            ext.push((0.0, 0));
            for (idx, &v) in ys.iter().enumerate() {
                match ext.last_mut() {
                    Some(last) if last.0 == v => last.1 = idx + 1,
                    _ => ext.push((v, idx + 1)),
                }
            }
            ext.push((1.0, ys.len()));
            let mut min_left = f64::INFINITY;
            for u in 0..ext.len() {
                if u > 0 {
                    let between = ext[u - 1].1 as f64 / m;
                    best = best.max(w * ext[u].0 - between - min_left);
                }
                min_left = min_left.min(w * ext[u].0 - ext[u].1 as f64 / m);
            }
        }
    }
    best.clamp(0.0, 1.0)
}

fn grid_resolution(r: usize, level: u32) -> usize {
    let exp = match r {
        1 => (level + 6).min(22),
        2 => (level + 2).min(8),
        3 => level.min(4),
        _ => level.min(2),
    };
    1usize << exp
}

/// Max of `|A/m - vol|` over grid boxes, for extreme and star boxes.
fn grid_maxima(z: &TorusSequence, n: usize) -> (f64, f64) {
    let m = z.points.len() as f64;
    let cell = |x: f64| ((x * n as f64) as usize).min(n - 1);
    let nf = n as f64;
    match z.r {
        1 => {
            let mut counts = vec![0u64; n];
            for p in &z.points {
                counts[cell(p[0])] += 1;
            }
            let mut prefix = vec![0.0f64; n + 1];
            for i in 0..n {
                prefix[i + 1] = prefix[i] + counts[i] as f64;
            }
            let g: Vec<f64> = (0..=n).map(|b| prefix[b] / m - b as f64 / nf).collect();
            let star = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let mut ext = 0.0f64;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in &g {
                if lo.is_finite() {
                    ext = ext.max(v - lo).max(hi - v);
                }
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (ext, star)
        }
        2 => {
            let mut counts = vec![vec![0u64; n]; n];
            for p in &z.points {
                counts[cell(p[0])][cell(p[1])] += 1;
            }
            let mut ext = 0.0f64;
            let mut star = 0.0f64;
            let mut col = vec![0u64; n];
            for a1 in 0..n {
                col.iter_mut().for_each(|c| *c = 0);
                for b1 in a1 + 1..=n {
                    for (c, k) in col.iter_mut().zip(&counts[b1 - 1]) {
                        *c += k;
                    }
                    let w = (b1 - a1) as f64 / nf;
                    let mut run = 0u64;
                    let (mut lo, mut hi) = (0.0f64, 0.0f64);
                    for (b2, &c) in col.iter().enumerate() {
                        run += c;
                        let v = run as f64 / m - w * (b2 + 1) as f64 / nf;
                        ext = ext.max(v - lo).max(hi - v);
                        if a1 == 0 {
                            star = star.max(v.abs());
                        }
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
            (ext, star)
        }
        _ => grid_maxima_generic(z, n),
    }
}

fn grid_maxima_generic(z: &TorusSequence, n: usize) -> (f64, f64) {
    let r = z.r;
    let m = z.points.len() as f64;
    let stride: Vec<usize> = (0..r).map(|i| (n + 1).pow(i as u32)).collect();
    let size = (n + 1).pow(r as u32);
    // prefix[c] counts points with cell < c componentwise
    let mut prefix = vec![0i64; size];
    for p in &z.points {
        let idx: usize = p
            .iter()
            .enumerate()
            .map(|(i, &x)| (((x * n as f64) as usize).min(n - 1) + 1) * stride[i])
            .sum();
        prefix[idx] += 1;
    }
    for d in 0..r {
        for idx in 0..size {
            if (idx / stride[d]) % (n + 1) > 0 {
                prefix[idx] += prefix[idx - stride[d]];
            }
        }
    }
    let mut ext = 0.0f64;
    let mut star = 0.0f64;
    let mut lo = vec![0usize; r];
    let mut hi = vec![1usize; r];
    loop {
        let mut count = 0i64;
        for mask in 0..(1usize << r) {
            let mut idx = 0;
            let mut sign = 1i64;
            for d in 0..r {
                if mask >> d & 1 == 1 {
                    idx += lo[d] * stride[d];
                    sign = -sign;
                } else {
                    idx += hi[d] * stride[d];
                }
            }
            count += sign * prefix[idx];
        }
        let vol: f64 = (0..r).map(|d| (hi[d] - lo[d]) as f64 / n as f64).product();
        let v = (count as f64 / m - vol).abs();
        ext = ext.max(v);
        if lo.iter().all(|&a| a == 0) {
            star = star.max(v);
        }
        // next box in lexicographic order over (lo_d < hi_d)
        let mut d = 0;
        loop {
            if d == r {
                return (ext, star);
            }
            if hi[d] < n {
                hi[d] += 1;
                break;
            }
            if lo[d] + 2 <= n {
                lo[d] += 1;
                hi[d] = lo[d] + 1;
                break;
            }
            lo[d] = 0;
            hi[d] = 1;
            d += 1;
        }
    }
}

/// Lower bounds from boxes anchored at points: the degenerate closed box at
/// a point, and closed/open origin-anchored boxes with a point as corner.
fn critical_lower(z: &TorusSequence, samples: usize) -> (f64, f64) {
    let m = z.points.len() as f64;
    let mut star = 0.0f64;
    let samples = samples.min((50_000_000 / z.points.len()).max(1));
    let step = (z.points.len() / samples).max(1);
    for corner in z.points.iter().step_by(step) {
        let vol: f64 = corner.iter().product();
        let closed = z
            .points
            .iter()
            .filter(|p| p.iter().zip(corner).all(|(a, b)| a <= b))
            .count() as f64;
        let open = z
            .points
            .iter()
            .filter(|p| p.iter().zip(corner).all(|(a, b)| a < b))
            .count() as f64;
        star = star.max(closed / m - vol).max(vol - open / m);
    }
    (star.max(1.0 / m), star)
}

/// Enclosures of `D` and `D*` from successively finer grids.
///
/// A grid of resolution `n` sandwiches every box between grid boxes whose
/// volumes differ by at most `2r/n` (`r/n` for anchored boxes), so the grid
/// maximum plus that slack is an upper bound. Results for all levels up to
/// `effort` are intersected, so raising `effort` only narrows the bracket.
pub fn discrepancy_bracket(z: &TorusSequence, effort: u32) -> Result<Bracket> {
    require_nonempty(z)?;
    if effort == 0 {
        return Err(Error::InvalidArgument("effort must be at least 1".into()));
    }
    let r = z.r as f64;
    let (crit_ext, crit_star) = critical_lower(z, 256 * effort as usize);
    let mut extreme = Estimate {
        lower: crit_ext,
        upper: 1.0,
    };
    let mut star = Estimate {
        lower: crit_star,
        upper: 1.0,
    };
    let mut grid = 0;
    for level in 1..=effort {
        let n = grid_resolution(z.r, level);
        if n == grid {
            continue;
        }
        grid = n;
        let (g_ext, g_star) = grid_maxima(z, n);
        let nf = n as f64;
        extreme = extreme.intersect(&Estimate {
            lower: g_ext,
            upper: (g_ext + 2.0 * r / nf).min(1.0),
        });
        star = star.intersect(&Estimate {
            lower: g_star,
            upper: (g_star + r / nf).min(1.0),
        });
    }
    // D* <= D
    extreme.lower = extreme.lower.max(star.lower);
    star.upper = star.upper.min(extreme.upper);
    Ok(Bracket { star, extreme, grid })
}

/// Best cheap upper bound on `D*`: exact where affordable, else a bracket.
pub fn star_upper_bound(z: &TorusSequence) -> Estimate {
    match z.r {
        _ if z.points.is_empty() => Estimate::exact(0.0),
        1 => Estimate::exact(star_1d(&z.points.iter().map(|p| p[0]).collect::<Vec<_>>())),
        2 if z.points.len() <= EXACT_LIMIT_R2 => {
            Estimate::exact(star_2d(&z.points.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>()))
        }
        _ => discrepancy_bracket(z, 4).map(|b| b.star).unwrap_or(Estimate { lower: 0.0, upper: 1.0 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq1(xs: &[f64]) -> TorusSequence {
        TorusSequence::new(1, xs.iter().map(|&x| vec![x]).collect(), 52).unwrap()
    }

    #[test]
    fn equispaced_star() {
        let d = discrepancy_exact(&seq1(&[0.0, 0.25, 0.5, 0.75])).unwrap();
        assert!((d.d_star - 0.25).abs() < 1e-15);
        assert!((d.d_extreme - 0.25).abs() < 1e-15);
    }

    #[test]
    fn clustered_points() {
        let d = discrepancy_exact(&seq1(&[0.4; 10])).unwrap();
        assert_eq!(d.d_extreme, 1.0);
        let d2 = discrepancy_exact(&TorusSequence::new(2, vec![vec![0.3, 0.6]; 7], 52).unwrap()).unwrap();
        assert_eq!(d2.d_extreme, 1.0);
    }

    #[test]
    fn single_point() {
        let d = discrepancy_exact(&seq1(&[0.5])).unwrap();
        assert_eq!(d.d_star, 0.5);
        assert_eq!(d.d_extreme, 1.0);
    }

    #[test]
    fn size_limits() {
        let z = seq1(&vec![0.5; EXACT_LIMIT_R1 + 1]);
        assert!(matches!(discrepancy_exact(&z), Err(Error::SizeLimit { .. })));
        let z3 = TorusSequence::new(3, vec![vec![0.1, 0.2, 0.3]], 52).unwrap();
        assert!(discrepancy_exact(&z3).is_err());
        assert!(discrepancy_bracket(&z3, 2).is_ok());
        assert!(discrepancy_exact(&seq1(&[])).is_err());
    }

    #[test]
    fn bracket_contains_exact() {
        let xs: Vec<f64> = (1..=500).map(|j| ((j * j) as f64 * 0.217_571_317_288).fract()).collect();
        let z = seq1(&xs);
        let exact = discrepancy_exact(&z).unwrap();
        let b = discrepancy_bracket(&z, 4).unwrap();
        assert!(b.extreme.contains(exact.d_extreme, 1e-12));
        assert!(b.star.contains(exact.d_star, 1e-12));
    }

    #[test]
    fn bracket_refines() {
        let pts: Vec<Vec<f64>> = (1..=400)
            .map(|j| vec![(j as f64 * 0.618_033_988_75).fract(), (j as f64 * 0.414_213_562_37).fract()])
            .collect();
        let z = TorusSequence::new(2, pts, 52).unwrap();
        let b1 = discrepancy_bracket(&z, 1).unwrap();
        let b3 = discrepancy_bracket(&z, 3).unwrap();
        assert!(b3.extreme.lower >= b1.extreme.lower - 1e-12);
        assert!(b3.extreme.upper <= b1.extreme.upper + 1e-12);
        assert!(b3.extreme.width() < b1.extreme.width());
    }

    #[test]
    fn lattice_bracket_contains_exact() {
        // k x k centred lattice, m = k^2
        for k in [4usize, 8, 12] {
            let pts: Vec<Vec<f64>> = (0..k * k)
                .map(|i| vec![((i / k) as f64 + 0.5) / k as f64, ((i % k) as f64 + 0.5) / k as f64])
                .collect();
            let z = TorusSequence::new(2, pts, 52).unwrap();
            let exact = discrepancy_exact(&z).unwrap();
            let b = discrepancy_bracket(&z, 4).unwrap();
            assert!(exact.d_extreme >= 1.0 / k as f64 - 1e-12);
            assert!(b.extreme.contains(exact.d_extreme, 1e-12), "k={k}: {:?} vs {}", b.extreme, exact.d_extreme);
            assert!(b.star.contains(exact.d_star, 1e-12), "k={k}");
        }
    }
}
