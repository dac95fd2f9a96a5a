//! Equidistribution diagnostics for torus sequences.

pub mod discrepancy;
pub mod etk;
pub mod lemma1;
pub mod sum;
pub mod weyl;

pub use discrepancy::{discrepancy_bracket, discrepancy_exact, Bracket, Estimate, ExactDiscrepancy};
pub use etk::{default_c_r, etk_bound, etk_evaluate, EtkEvaluation};
pub use lemma1::{effective_m, lemma1_check, DiscrepancyMethod, Lemma1Report, Lemma1Status, RecipeReport};
pub use weyl::{weyl_sum, WeylSum};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lineseq::TorusSequence;
use lemma1::discrepancy_estimates;

/// Slack allowed when checking the ETK bound against a computed discrepancy.
pub const ETK_SOUNDNESS_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub m: usize,
    pub r: usize,
    pub method: DiscrepancyMethod,
    pub d_star: Estimate,
    pub d_extreme: Estimate,
    pub etk_rhs: Option<f64>,
    #[serde(rename = "N_used")]
    pub n_used: Option<u32>,
    #[serde(rename = "C_r_used")]
    pub c_r_used: Option<f64>,
}

impl DiscrepancyReport {
    /// Violated report invariants; empty when consistent.
    pub fn inconsistencies(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.d_star.lower > self.d_extreme.upper + 1e-12 {
            out.push(format!("d_star {:?} exceeds d_extreme {:?}", self.d_star, self.d_extreme));
        }
        for e in [self.d_star, self.d_extreme] {
            if !(0.0..=1.0).contains(&e.lower) || !(0.0..=1.0).contains(&e.upper) || e.lower > e.upper {
                out.push(format!("bad enclosure {e:?}"));
            }
        }
        if let Some(rhs) = self.etk_rhs {
            if rhs + ETK_SOUNDNESS_SLACK < self.d_extreme.lower {
                out.push(format!("ETK bound {rhs} below discrepancy {:?}", self.d_extreme));
            }
        }
        out
    }
}

/// Discrepancy of `z`; `effort = None` forces the exact algorithm.
pub fn discrepancy_report(z: &TorusSequence, effort: Option<u32>, etk: Option<(u32, f64)>) -> Result<DiscrepancyReport> {
    let (method, d_star, d_extreme) = match effort {
        None => {
            let d = discrepancy_exact(z)?;
            (DiscrepancyMethod::Exact, Estimate::exact(d.d_star), Estimate::exact(d.d_extreme))
        }
        Some(e) => {
            let b = discrepancy_bracket(z, e)?;
            (DiscrepancyMethod::Bracket, b.star, b.extreme)
        }
    };
    let etk_rhs = etk.map(|(n, c)| etk_bound(z, n, c)).transpose()?;
    Ok(DiscrepancyReport {
        m: z.len(),
        r: z.r,
        method,
        d_star,
        d_extreme,
        etk_rhs,
        n_used: etk.map(|e| e.0),
        c_r_used: etk.map(|e| e.1),
    })
}

/// Exact when within the exact limits, otherwise a bracket at `effort`.
pub fn discrepancy_auto(z: &TorusSequence, effort: u32) -> Result<(DiscrepancyMethod, Estimate, Estimate)> {
    discrepancy_estimates(z, effort)
}
