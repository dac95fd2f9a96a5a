//! The discrepancy-to-red-hit implication on a single line.
//!
//! The red box `[0, 1/p)^r` has volume `1/p^r`. If the first `m` torus
//! points have `D < 1/p^r` (or `D* < 1/p^r`, which suffices since the box is
//! anchored at the origin), some point must lie in the box. The ETK bound
//! gives a computable certificate for the hypothesis.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::discrepancy::{discrepancy_bracket, discrepancy_exact, Estimate, EXACT_LIMIT_R1, EXACT_LIMIT_R2};
use super::etk::{etk_evaluate, EtkEvaluation};
use crate::error::{Error, Result};
use crate::lineseq::{first_red_index, torus_sequence, LineParams, TorusSequence, DISCREPANCY_SLACK};
use crate::spec_builder::ColoringSpec;

/// Bracket effort used when the exact algorithm is out of range.
pub const DEFAULT_BRACKET_EFFORT: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma1Status {
    /// Hypothesis certified and a red point found.
    Confirmed,
    /// Hypothesis certified but no red point: the implication fails.
    Violated,
    /// Hypothesis not certified at this `m`.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscrepancyMethod {
    Exact,
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub m: u64,
    pub r: usize,
    pub p: u64,
    /// `1/p^r`.
    pub threshold: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    pub method: DiscrepancyMethod,
    pub d_star: Estimate,
    pub d_extreme: Estimate,
    pub etk: f64,
    pub hypothesis_certified: bool,
    pub first_red: Option<u64>,
    pub status: Lemma1Status,
}

/// `D*` and `D` of a sequence, exact when small enough.
pub fn discrepancy_estimates(z: &TorusSequence, effort: u32) -> Result<(DiscrepancyMethod, Estimate, Estimate)> {
    let small = match z.r {
        1 => z.len() <= EXACT_LIMIT_R1,
        2 => z.len() <= EXACT_LIMIT_R2,
        _ => false,
    };
    if small {
        let d = discrepancy_exact(z)?;
        Ok((DiscrepancyMethod::Exact, Estimate::exact(d.d_star), Estimate::exact(d.d_extreme)))
    } else {
        let b = discrepancy_bracket(z, effort)?;
        Ok((DiscrepancyMethod::Bracket, b.star, b.extreme))
    }
}

fn threshold(spec: &ColoringSpec) -> f64 {
    spec.red_box_measure().to_f64().unwrap_or(0.0)
}

pub fn lemma1_check(spec: &ColoringSpec, lp: &LineParams, n: u32, c_r: f64) -> Result<Lemma1Report> {
    let z = torus_sequence(spec, lp);
    let etk = etk_evaluate(&z, n, c_r)?;
    lemma1_report(spec, lp, &z, &etk)
}

fn lemma1_report(spec: &ColoringSpec, lp: &LineParams, z: &TorusSequence, etk: &EtkEvaluation) -> Result<Lemma1Report> {
    let thr = threshold(spec);
    let (method, d_star, d_extreme) = discrepancy_estimates(z, DEFAULT_BRACKET_EFFORT)?;
    let bound = d_star.upper.min(d_extreme.upper).min(etk.value);
    let hypothesis_certified = bound < thr - DISCREPANCY_SLACK;
    let first_red = first_red_index(spec, lp);
    let status = match (hypothesis_certified, first_red) {
        (false, _) => Lemma1Status::Inconclusive,
        (true, Some(_)) => Lemma1Status::Confirmed,
        (true, None) => Lemma1Status::Violated,
    };
    Ok(Lemma1Report {
        m: lp.m,
        r: spec.r,
        p: spec.p,
        threshold: thr,
        n: etk.n,
        c_r: etk.c_r,
        method,
        d_star,
        d_extreme,
        etk: etk.value,
        hypothesis_certified,
        first_red,
        status,
    })
}

/// Outcome of searching for an `m` at which the ETK bound certifies a hit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipeReport {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    /// `C_r * tail` must fall below this.
    pub tail_target: f64,
    /// `(m, C_r * tail)` for each `m` tried.
    pub trajectory: Vec<(u64, f64)>,
    /// First `m` meeting the target, if any up to the cap.
    pub m: Option<u64>,
    pub report: Option<Lemma1Report>,
}

/// `N = floor(2 C_r p^r) + 1`, the smallest cutoff with `C_r / N < 1/(2 p^r)`.
pub fn recipe_cutoff(spec: &ColoringSpec, c_r: f64) -> Result<u32> {
    let n_f = (2.0 * c_r / threshold(spec)).floor() + 1.0;
    if !(n_f.is_finite() && n_f <= u32::MAX as f64) {
        return Err(Error::Overflow(format!("frequency cutoff {n_f}")));
    }
    Ok(n_f as u32)
}

/// Chooses `N = floor(2 C_r p^r) + 1` so that `C_r / N < 1/(2 p^r)`, then
/// doubles `m` from `m_start` until the Weyl tail is below `1/(2 p^r)`.
pub fn effective_m(spec: &ColoringSpec, lp: &LineParams, c_r: f64, m_start: u64, m_cap: u64) -> Result<RecipeReport> {
    if m_start == 0 || m_start > m_cap {
        return Err(Error::InvalidArgument(format!("need 1 <= m_start <= m_cap, got {m_start} and {m_cap}")));
    }
    let n = recipe_cutoff(spec, c_r)?;
    let tail_target = threshold(spec) / 2.0;
    let mut trajectory = Vec::new();
    let mut m = m_start;
    // the sequence is computed once at the cap and prefixes reused
    let full = torus_sequence(spec, &lp.with_m(m_cap));
    loop {
        let z = full.prefix(m as usize);
        let etk = etk_evaluate(&z, n, c_r)?;
        let scaled_tail = c_r * etk.tail;
        trajectory.push((m, scaled_tail));
        if scaled_tail < tail_target {
            let report = lemma1_report(spec, &lp.with_m(m), &z, &etk)?;
            return Ok(RecipeReport {
                n,
                c_r,
                tail_target,
                trajectory,
                m: Some(m),
                report: Some(report),
            });
        }
        if m == m_cap {
            return Ok(RecipeReport {
                n,
                c_r,
                tail_target,
                trajectory,
                m: None,
                report: None,
            });
        }
        m = m.saturating_mul(2).min(m_cap);
    }
}
