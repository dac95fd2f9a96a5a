//! Randomised check that no red tuple of squared norms satisfies the copy
//! equation.
//!
//! For red `y_j`, every `floor(a_k y_j)` is divisible by `p`, so
//! `S = sum q_jk floor(a_k y_j)` is too. The copy equation makes
//! `sum q_jk a_k y_j = B'`, and dropping the fractional parts moves the sum by
//! less than `sum |q_jk| < B'`. Hence `0 < S < 2B' < p`, contradicting
//! `p | S`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{colour_norm_detailed, Colour};
use crate::error::{Error, Result};
use crate::numfield::{FieldElement, Interval};
use crate::spec_builder::ColoringSpec;

/// Candidate squared norms `(|x_1|^2, ..., |x_s|^2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormTuple {
    pub y: Vec<FieldElement>,
}

impl NormTuple {
    pub fn new(y: Vec<FieldElement>) -> Result<Self> {
        if let Some(v) = y.iter().find(|v| v.is_negative()) {
            return Err(Error::NegativeNorm(v.to_string()));
        }
        Ok(NormTuple { y })
    }

    fn check_len(&self, spec: &ColoringSpec) -> Result<()> {
        if self.y.len() != spec.s() {
            return Err(Error::DimensionMismatch {
                expected: spec.s(),
                found: self.y.len(),
            });
        }
        Ok(())
    }
}

/// Whether `sum_j sum_k q_jk a_k y_j = B'` holds exactly.
pub fn satisfies_copy_equation(spec: &ColoringSpec, t: &NormTuple) -> Result<bool> {
    t.check_len(spec)?;
    Ok(spec.copy_equation_lhs(&t.y) == spec.b_prime)
}

/// The inequality chain for one tuple satisfying the copy equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    /// `S = sum q_jk floor(a_k y_j)`.
    pub s: BigInt,
    /// `floor(a_k y_j)`, indexed `[j][k]`.
    pub floors: Vec<Vec<BigInt>>,
    /// Enclosure of `B' - S`.
    pub residual: (f64, f64),
    pub q_abs_sum: BigInt,
    /// `|B' - S| < sum |q|`, certified.
    pub residual_below_q_sum: bool,
    /// `sum |q| < B'`, certified.
    pub q_sum_below_b_prime: bool,
}

impl Chain {
    pub fn holds(&self) -> bool {
        self.residual_below_q_sum && self.q_sum_below_b_prime
    }
}

fn chain_from_floors(spec: &ColoringSpec, floors: Vec<Vec<BigInt>>) -> Chain {
    let mut s = BigInt::zero();
    for (row, fl) in spec.q.iter().zip(&floors) {
        for (&qjk, f) in row.iter().zip(fl) {
            s += BigInt::from(qjk) * f;
        }
    }
    let residual = &spec.b_prime - &FieldElement::from_bigint(s.clone());
    let qsum = spec.q_abs_sum();
    let qsum_fe = FieldElement::from_bigint(qsum.clone());
    let residual_below_q_sum = residual.abs() < qsum_fe;
    let q_sum_below_b_prime = qsum_fe < spec.b_prime;
    let Interval { lo, hi } = residual.approx(64);
    let to_f64 = |x: &num_rational::BigRational| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN);
    Chain {
        s,
        floors,
        residual: (to_f64(&lo), to_f64(&hi)),
        q_abs_sum: qsum,
        residual_below_q_sum,
        q_sum_below_b_prime,
    }
}

/// Evaluates the chain for a tuple satisfying the copy equation.
pub fn chain_check(spec: &ColoringSpec, t: &NormTuple) -> Result<Chain> {
    if !satisfies_copy_equation(spec, t)? {
        return Err(Error::CopyEquationViolated);
    }
    let floors = t
        .y
        .iter()
        .map(|y| spec.a.iter().map(|a| (a * y).floor_certified()).collect())
        .collect();
    Ok(chain_from_floors(spec, floors))
}

/// The two incompatible facts about `S` for an all-red tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub chain: Chain,
    /// `0 < S < 2B'`, certified.
    pub s_in_window: bool,
    /// `2B' < p`, certified.
    pub window_below_p: bool,
    /// `p | S`.
    pub divisible: bool,
}

impl Witness {
    /// True when `S` is certified to lie in `(0, p)` and is divisible by `p`,
    /// which cannot both hold. False means the spec is not sound for this
    /// tuple.
    pub fn is_contradiction(&self) -> bool {
        self.chain.holds() && self.s_in_window && self.window_below_p && self.divisible
    }
}

/// Builds the argument's contradiction for an all-red tuple satisfying the
/// copy equation. For a sound spec no such tuple exists, so this always
/// fails with a precondition error.
pub fn contradiction_witness(spec: &ColoringSpec, t: &NormTuple) -> Result<Witness> {
    if !satisfies_copy_equation(spec, t)? {
        return Err(Error::CopyEquationViolated);
    }
    let mut floors = Vec::with_capacity(t.y.len());
    for y in &t.y {
        let d = colour_norm_detailed(spec, y)?;
        if d.colour != Colour::Red {
            return Err(Error::NotAllRed);
        }
        floors.push(d.floors);
    }
    let chain = chain_from_floors(spec, floors);
    let s_fe = FieldElement::from_bigint(chain.s.clone());
    let two_b = spec.b_prime.scale_int(2);
    let p_fe = FieldElement::from_integer(spec.p as i64);
    Ok(Witness {
        s_in_window: chain.s.is_positive() && s_fe < two_b,
        window_below_p: two_b < p_fe,
        divisible: chain.s.mod_floor(&BigInt::from(spec.p)).is_zero(),
        chain,
    })
}

/// Index solved for when sampling: the last `j` with a nonzero `q` row.
pub fn back_solve_index(spec: &ColoringSpec) -> Option<usize> {
    spec.q.iter().rposition(|row| row.iter().any(|&v| v != 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Free norms are `n/d` with `0 <= n < 2^numerator_bits`.
    pub numerator_bits: u32,
    /// and `1 <= d <= 2^denominator_bits`.
    pub denominator_bits: u32,
    /// Draws per sample before giving up on a nonnegative back-solved norm.
    pub max_attempts: u32,
    /// All-red tuples kept verbatim in the report.
    pub max_examples: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            numerator_bits: 16,
            denominator_bits: 8,
            max_attempts: 1000,
            max_examples: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RedExample {
    pub sample: u64,
    pub y: Vec<String>,
    pub s: String,
    pub is_contradiction: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub samples: u64,
    pub seed: u64,
    pub back_solve_index: Option<usize>,
    pub all_red_count: u64,
    /// `red_histogram[c]` = tuples with exactly `c` red entries.
    pub red_histogram: Vec<u64>,
    /// Draws rejected because the back-solved norm was negative.
    pub discarded: u64,
    /// Samples that hit `max_attempts` without an accepted draw.
    pub exhausted: u64,
    /// Samples on which the certified chain failed.
    pub chain_failures: u64,
    /// Largest `|B' - S|` upper bound seen, against `sum |q|`.
    pub max_abs_residual: f64,
    pub examples: Vec<RedExample>,
}

impl ScanReport {
    pub fn empty(spec: &ColoringSpec, seed: u64) -> Self {
        ScanReport {
            samples: 0,
            seed,
            back_solve_index: back_solve_index(spec),
            all_red_count: 0,
            red_histogram: vec![0; spec.s() + 1],
            discarded: 0,
            exhausted: 0,
            chain_failures: 0,
            max_abs_residual: 0.0,
            examples: Vec::new(),
        }
    }

    /// Associative, commutative combination of reports of disjoint samples.
    pub fn merge(&mut self, other: &ScanReport, max_examples: usize) {
        self.samples += other.samples;
        self.all_red_count += other.all_red_count;
        for (a, b) in self.red_histogram.iter_mut().zip(&other.red_histogram) {
            *a += b;
        }
        self.discarded += other.discarded;
        self.exhausted += other.exhausted;
        self.chain_failures += other.chain_failures;
        self.max_abs_residual = self.max_abs_residual.max(other.max_abs_residual);
        self.examples.extend(other.examples.iter().cloned());
        self.examples.sort_by_key(|e| e.sample);
        self.examples.truncate(max_examples);
    }
}

fn random_rational(rng: &mut ChaCha8Rng, cfg: &ScanConfig) -> FieldElement {
    let n: u64 = rng.random_range(0..1u64 << cfg.numerator_bits);
    let d: u64 = rng.random_range(1..=1u64 << cfg.denominator_bits);
    FieldElement::from_rational(num_rational::BigRational::new(BigInt::from(n), BigInt::from(d)))
}

struct Sampler<'a> {
    spec: &'a ColoringSpec,
    cfg: ScanConfig,
    j_solve: usize,
    weights: Vec<FieldElement>,
    inv_w: FieldElement,
}

impl Sampler<'_> {
    /// Draws a tuple on the copy equation from stream `index`.
    fn draw(&self, seed: u64, index: u64, report: &mut ScanReport) -> Option<NormTuple> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        for _ in 0..self.cfg.max_attempts {
            let mut y = vec![FieldElement::zero(); self.spec.s()];
            let mut rest = self.spec.b_prime.clone();
            for (j, slot) in y.iter_mut().enumerate() {
                if j != self.j_solve {
                    *slot = random_rational(&mut rng, &self.cfg);
                    rest -= &(&self.weights[j] * &*slot);
                }
            }
            let solved = &rest * &self.inv_w;
            if solved.is_negative() {
                report.discarded += 1;
                continue;
            }
            y[self.j_solve] = solved;
            return Some(NormTuple { y });
        }
        report.exhausted += 1;
        None
    }

    fn sample(&self, seed: u64, index: u64) -> ScanReport {
        let mut rep = ScanReport::empty(self.spec, seed);
        rep.samples = 1;
        let Some(t) = self.draw(seed, index, &mut rep) else {
            return rep;
        };
        let details: Vec<_> = t
            .y
            .iter()
            .map(|y| colour_norm_detailed(self.spec, y).expect("sampled norms are nonnegative"))
            .collect();
        let reds = details.iter().filter(|d| d.colour == Colour::Red).count();
        rep.red_histogram[reds] += 1;
        let chain = chain_from_floors(self.spec, details.into_iter().map(|d| d.floors).collect());
        if !chain.holds() {
            rep.chain_failures += 1;
        }
        rep.max_abs_residual = chain.residual.0.abs().max(chain.residual.1.abs());
        if reds == self.spec.s() {
            rep.all_red_count = 1;
            let is_contradiction = contradiction_witness(self.spec, &t)
                .map(|w| w.is_contradiction())
                .unwrap_or(false);
            rep.examples.push(RedExample {
                sample: index,
                y: t.y.iter().map(ToString::to_string).collect(),
                s: chain.s.to_string(),
                is_contradiction,
            });
        }
        rep
    }
}

/// Samples `samples` tuples on the copy equation and colours every entry.
///
/// Sample `i` uses ChaCha stream `i` under `seed`, so the report does not
/// depend on how samples are split across threads. The spec is not
/// validated, so deliberately broken specs can be scanned too.
pub fn scan_for_red_copies(spec: &ColoringSpec, samples: u64, seed: u64, cfg: ScanConfig) -> Result<ScanReport> {
    if samples == 0 {
        return Ok(ScanReport::empty(spec, seed));
    }
    if cfg.numerator_bits > 62 || cfg.denominator_bits > 62 {
        return Err(Error::InvalidArgument("sample bit sizes must be at most 62".into()));
    }
    let j_solve = back_solve_index(spec).ok_or_else(|| Error::InvalidSpec("q is identically zero".into()))?;
    let weights = spec.row_weights();
    let inv_w = weights[j_solve].inverse().ok_or(Error::DivisionByZero)?;
    let sampler = Sampler {
        spec,
        cfg,
        j_solve,
        weights,
        inv_w,
    };
    let reports: Vec<ScanReport> = (0..samples)
        .into_par_iter()
        .map(|i| sampler.sample(seed, i))
        .collect();
    let mut total = ScanReport::empty(spec, seed);
    for r in &reports {
        total.merge(r, cfg.max_examples);
    }
    Ok(total)
}

/// Stricter per-sample consistency: `sum |q| < B'` holds for the spec.
pub fn q_sum_below_b_prime(spec: &ColoringSpec) -> bool {
    FieldElement::from_bigint(spec.q_abs_sum()).cmp(&spec.b_prime) == Ordering::Less
}
