//! Unit-spaced progressions and their torus sequences.
//!
//! The squared norms of `m` collinear points at unit spacing are
//! `y_j = j^2 + beta j + gamma`. A point is red exactly when
//! `frac(a_k y_j / p)` lies in `[0, 1/p)` for all `k`, so a line avoids blue
//! copies of length `m` iff its torus sequence
//! `z_j = (a_1 y_j / p, ..., a_r y_j / p) mod 1` meets the box `[0, 1/p)^r`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{colour_norm, Colour};
use crate::equidist::discrepancy::{star_upper_bound, Estimate};
use crate::error::{Error, Result};
use crate::numfield::FieldElement;
use crate::precision::precision_floor;
use crate::spec_builder::ColoringSpec;

/// Default cap on the progression length searched.
pub const DEFAULT_M_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamMode {
    /// Given as exact rationals.
    Exact,
    /// Given as doubles; converted to their exact dyadic values.
    Double,
}

/// A line `y_j = j^2 + beta j + gamma`, `j = 1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineParams {
    pub beta: BigRational,
    pub gamma: BigRational,
    pub m: u64,
    pub mode: ParamMode,
}

fn f64_to_rational(x: f64, name: &str) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidArgument(format!("{name} must be finite, got {x}")))
}

impl LineParams {
    pub fn exact(beta: BigRational, gamma: BigRational, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        Ok(LineParams {
            beta,
            gamma,
            m,
            mode: ParamMode::Exact,
        })
    }

    pub fn from_f64(beta: f64, gamma: f64, m: u64) -> Result<Self> {
        let mut lp = LineParams::exact(f64_to_rational(beta, "beta")?, f64_to_rational(gamma, "gamma")?, m)?;
        lp.mode = ParamMode::Double;
        Ok(lp)
    }

    /// Parses `beta`/`gamma` from text: rationals like `3/4` or integers are
    /// exact, anything else is read as a double.
    pub fn parse(beta: &str, gamma: &str, m: u64) -> Result<Self> {
        match (parse_exact(beta), parse_exact(gamma)) {
            (Some(b), Some(g)) => LineParams::exact(b, g, m),
            _ => {
                let b: f64 = beta
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad beta {beta:?}")))?;
                let g: f64 = gamma
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad gamma {gamma:?}")))?;
                LineParams::from_f64(b, g, m)
            }
        }
    }

    pub fn with_m(&self, m: u64) -> Self {
        LineParams { m, ..self.clone() }
    }

    pub fn y(&self, j: u64) -> BigRational {
        let j = BigRational::from_integer(BigInt::from(j));
        &j * &j + &self.beta * &j + &self.gamma
    }

    /// Common denominator `D` and the integer form `Y_j = D y_j`.
    fn integer_form(&self) -> IntegerLine {
        let d = self.beta.denom().lcm(self.gamma.denom());
        let beta_num = self.beta.numer() * (&d / self.beta.denom());
        let gamma_num = self.gamma.numer() * (&d / self.gamma.denom());
        IntegerLine {
            d,
            beta_num,
            gamma_num,
        }
    }

    pub fn beta_string(&self) -> String {
        param_string(&self.beta, self.mode)
    }

    pub fn gamma_string(&self) -> String {
        param_string(&self.gamma, self.mode)
    }
}

fn param_string(x: &BigRational, mode: ParamMode) -> String {
    match mode {
        ParamMode::Double => format!("{:?}", x.to_f64().unwrap_or(f64::NAN)),
        ParamMode::Exact if x.is_integer() => x.numer().to_string(),
        ParamMode::Exact => format!("{}/{}", x.numer(), x.denom()),
    }
}

fn parse_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

struct IntegerLine {
    d: BigInt,
    beta_num: BigInt,
    gamma_num: BigInt,
}

impl IntegerLine {
    fn y_num(&self, j: u64) -> BigInt {
        let j = BigInt::from(j);
        &j * &j * &self.d + &self.beta_num * &j + &self.gamma_num
    }
}

/// Points `z_j` in `[0,1)^r`, each coordinate within `2^-precision_log2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSequence {
    pub r: usize,
    pub points: Vec<Vec<f64>>,
    pub precision_log2: u32,
}

impl TorusSequence {
    pub fn new(r: usize, points: Vec<Vec<f64>>, precision_log2: u32) -> Result<Self> {
        for p in &points {
            if p.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: p.len(),
                });
            }
            if p.iter().any(|&c| !(0.0..1.0).contains(&c)) {
                return Err(Error::InvalidArgument("torus coordinates must lie in [0,1)".into()));
            }
        }
        Ok(TorusSequence {
            r,
            points,
            precision_log2,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn prefix(&self, m: usize) -> TorusSequence {
        TorusSequence {
            r: self.r,
            points: self.points[..m.min(self.points.len())].to_vec(),
            precision_log2: self.precision_log2,
        }
    }
}

/// Fixed-point enclosure of `a_k / p`: `lo / 2^bits <= a_k/p <= hi / 2^bits`.
#[derive(Clone, Debug)]
struct FixedAlpha {
    bits: u32,
    lo: BigInt,
    hi: BigInt,
}

impl FixedAlpha {
    fn new(alpha: &FieldElement, bits: u32) -> Self {
        let iv = alpha.approx(bits + 2);
        let scale = BigRational::from_integer(BigInt::one() << bits);
        FixedAlpha {
            bits,
            lo: (&iv.lo * &scale).floor().to_integer(),
            hi: (&iv.hi * &scale).ceil().to_integer(),
        }
    }
}

/// One certified torus coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusCoord {
    pub value: f64,
    pub in_red_box: bool,
}

/// Evaluates `frac(a_k y / p)` for rational `y` with certified enclosures.
#[derive(Clone, Debug)]
pub struct TorusEvaluator {
    p: u64,
    alphas: Vec<FieldElement>,
    fixed: Vec<FixedAlpha>,
    target_bits: u32,
    refinements: u64,
}

/// Outcome of deciding one coordinate at one precision.
enum Decision {
    Decided(TorusCoord),
    Ambiguous,
}

impl TorusEvaluator {
    pub fn new(spec: &ColoringSpec) -> Self {
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(spec.p));
        let alphas: Vec<FieldElement> = spec.a.iter().map(|a| a.scale(&inv_p)).collect();
        let target_bits = precision_floor();
        let fixed = alphas.iter().map(|a| FixedAlpha::new(a, target_bits + 64)).collect();
        TorusEvaluator {
            p: spec.p,
            alphas,
            fixed,
            target_bits,
            refinements: 0,
        }
    }

    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    /// Error exponent of the returned doubles.
    pub fn precision_log2(&self) -> u32 {
        self.target_bits.min(53) - 1
    }

    /// Number of coordinates that needed extra precision so far.
    pub fn refinements(&self) -> u64 {
        self.refinements
    }

    fn ensure_bits(&mut self, k: usize, bits: u32) {
        if self.fixed[k].bits < bits {
            self.fixed[k] = FixedAlpha::new(&self.alphas[k], bits);
        }
    }

    fn decide(&self, k: usize, y_num: &BigInt, den: &BigInt) -> Decision {
        let fa = &self.fixed[k];
        let full_den: BigInt = den << fa.bits as usize;
        let (lo_num, hi_num) = if y_num.is_negative() {
            (&fa.hi * y_num, &fa.lo * y_num)
        } else {
            (&fa.lo * y_num, &fa.hi * y_num)
        };
        let (fl, lo_rem) = lo_num.div_mod_floor(&full_den);
        let (fh, hi_rem) = hi_num.div_mod_floor(&full_den);
        if fl != fh {
            return Decision::Ambiguous;
        }
        // frac in [lo_rem, hi_rem] / full_den; box edge at full_den / p.
        let p = BigInt::from(self.p);
        let lo_scaled = &lo_rem * &p;
        let hi_scaled = &hi_rem * &p;
        let in_box = if hi_scaled < full_den {
            true
        } else if lo_scaled >= full_den {
            false
        } else {
            return Decision::Ambiguous;
        };
        let value = ((lo_rem << 64usize) / &full_den)
            .to_u128()
            .map(|v| v as f64 / 18446744073709551616.0)
            .unwrap_or(0.0);
        // rounding up to 1.0 is clamped to the largest double below 1
        let value = if value >= 1.0 { 1.0f64.next_down() } else { value };
        Decision::Decided(TorusCoord { value, in_red_box: in_box })
    }

    /// Coordinate `k` of `y = y_num / den` (`den > 0`).
    pub fn coord(&mut self, k: usize, y_num: &BigInt, den: &BigInt) -> TorusCoord {
        // |y| * 2^-bits must stay below 2^-target_bits
        let mag_bits = (y_num.bits() as i64 - den.bits() as i64 + 1).max(0) as u32;
        let mut bits = self.target_bits + mag_bits + 8;
        self.ensure_bits(k, bits);
        let mut first = true;
        loop {
            if let Decision::Decided(c) = self.decide(k, y_num, den) {
                return c;
            }
            if first {
                self.refinements += 1;
                first = false;
            }
            bits = (bits.max(self.fixed[k].bits)) * 2;
            self.ensure_bits(k, bits);
        }
    }

    pub fn coords_rational(&mut self, y: &BigRational) -> Vec<TorusCoord> {
        let (n, d) = (y.numer().clone(), y.denom().clone());
        (0..self.r()).map(|k| self.coord(k, &n, &d)).collect()
    }

    /// Whether `y` maps into `[0, 1/p)^r`, decided exactly.
    pub fn in_red_box(&mut self, y: &BigRational) -> bool {
        let (n, d) = (y.numer().clone(), y.denom().clone());
        (0..self.r()).all(|k| self.coord(k, &n, &d).in_red_box)
    }
}

/// The torus sequence of a line.
pub fn torus_sequence(spec: &ColoringSpec, lp: &LineParams) -> TorusSequence {
    let mut eval = TorusEvaluator::new(spec);
    let line = lp.integer_form();
    let points = (1..=lp.m)
        .map(|j| {
            let y = line.y_num(j);
            (0..eval.r()).map(|k| eval.coord(k, &y, &line.d).value).collect()
        })
        .collect();
    TorusSequence {
        r: spec.r,
        points,
        precision_log2: eval.precision_log2(),
    }
}

/// Smallest `j` in `1..=m` whose torus point lies in the red box.
pub fn first_red_index(spec: &ColoringSpec, lp: &LineParams) -> Option<u64> {
    first_red_index_with(&mut TorusEvaluator::new(spec), lp)
}

fn first_red_index_with(eval: &mut TorusEvaluator, lp: &LineParams) -> Option<u64> {
    let line = lp.integer_form();
    (1..=lp.m).find(|&j| {
        let y = line.y_num(j);
        (0..eval.r()).all(|k| eval.coord(k, &y, &line.d).in_red_box)
    })
}

/// Which `(beta, gamma)` lines an empirical search visits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Exact grid `beta = beta_range * i / grid_beta`, `gamma = gamma_range * k / grid_gamma`.
    pub grid_beta: u32,
    pub grid_gamma: u32,
    pub beta_range: (i64, i64),
    pub gamma_range: (i64, i64),
    /// Random double samples drawn uniformly from the random ranges.
    pub random: u32,
    pub random_beta_range: (f64, f64),
    pub random_gamma_range: (f64, f64),
    pub seed: u64,
}

impl SamplingPlan {
    /// Grid over `beta in [0, 2)`, `gamma in [0, p)` plus random doubles over
    /// `beta in [-1000, 1000)`, `gamma in [-10^6, 10^6)`.
    pub fn standard(spec: &ColoringSpec, grid_beta: u32, grid_gamma: u32, random: u32, seed: u64) -> Self {
        SamplingPlan {
            grid_beta,
            grid_gamma,
            beta_range: (0, 2),
            gamma_range: (0, spec.p as i64),
            random,
            random_beta_range: (-1000.0, 1000.0),
            random_gamma_range: (-1.0e6, 1.0e6),
            seed,
        }
    }

    /// A plan containing only the line `(beta, gamma)`.
    pub fn single(beta: f64, gamma: f64) -> Self {
        SamplingPlan {
            grid_beta: 0,
            grid_gamma: 0,
            beta_range: (0, 0),
            gamma_range: (0, 0),
            random: 1,
            random_beta_range: (beta, beta),
            random_gamma_range: (gamma, gamma),
            seed: 0,
        }
    }

    fn grid_point(lo: i64, hi: i64, i: u32, n: u32) -> BigRational {
        let span = BigInt::from(hi - lo);
        BigRational::from_integer(BigInt::from(lo)) + BigRational::new(span * BigInt::from(i), BigInt::from(n))
    }

    /// All lines of the plan, grid first, each with cap `m_cap`.
    pub fn lines(&self, m_cap: u64) -> Result<Vec<LineParams>> {
        let mut out = Vec::with_capacity((self.grid_beta * self.grid_gamma + self.random) as usize);
        for i in 0..self.grid_beta {
            for k in 0..self.grid_gamma {
                let beta = Self::grid_point(self.beta_range.0, self.beta_range.1, i, self.grid_beta);
                let gamma = Self::grid_point(self.gamma_range.0, self.gamma_range.1, k, self.grid_gamma);
                out.push(LineParams::exact(beta, gamma, m_cap)?);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            let beta = sample_range(&mut rng, self.random_beta_range);
            let gamma = sample_range(&mut rng, self.random_gamma_range);
            out.push(LineParams::from_f64(beta, gamma, m_cap)?);
        }
        Ok(out)
    }
}

fn sample_range(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub beta: String,
    pub gamma: String,
    pub mode: ParamMode,
    /// `None` when no red point occurs up to the cap.
    pub first_red: Option<u64>,
    /// Coordinates that needed extra precision near a box edge.
    pub refinements: u64,
}

/// Empirical check that small star discrepancy forces a red hit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Tally {
    /// Prefixes whose discrepancy was evaluated.
    pub checked: u64,
    /// Prefixes with discrepancy bound below `1/p^r`.
    pub hypothesis_met: u64,
    /// Of those, prefixes without a red hit. Must be zero.
    pub counterexamples: u64,
}

impl Lemma1Tally {
    fn merge(&mut self, other: &Lemma1Tally) {
        self.checked += other.checked;
        self.hypothesis_met += other.hypothesis_met;
        self.counterexamples += other.counterexamples;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMReport {
    pub m_cap: u64,
    pub samples: usize,
    /// Largest first-red index over uncensored samples.
    pub empirical_m: Option<u64>,
    pub argmax: Option<(String, String)>,
    pub histogram: BTreeMap<u64, u64>,
    pub censored: Vec<SampleRecord>,
    pub lemma1: Lemma1Tally,
    /// First red indices whose norm the exact colouring calls blue.
    pub colour_mismatches: u64,
    pub records: Vec<SampleRecord>,
}

/// Longest prefix on which the discrepancy implication is checked per sample.
pub const LEMMA1_PREFIX_CAP: u64 = 2000;

/// Allowance for double rounding when comparing a computed discrepancy with `1/p^r`.
pub const DISCREPANCY_SLACK: f64 = 1e-12;

/// Checks the prefixes of lengths `first_red - 1` and `first_red` (capped)
/// of a sample line: a star-discrepancy bound below `1/p^r` must come with
/// a red hit.
fn lemma1_prefix_tally(spec: &ColoringSpec, lp: &LineParams, first_red: Option<u64>) -> Lemma1Tally {
    let threshold = spec.red_box_measure().to_f64().unwrap_or(0.0);
    let mut tally = Lemma1Tally::default();
    let hit_free = first_red.map_or(lp.m, |j| j - 1).min(LEMMA1_PREFIX_CAP);
    let with_hit = first_red.filter(|&j| j <= LEMMA1_PREFIX_CAP);
    let longest = with_hit.unwrap_or(hit_free);
    if longest == 0 {
        return tally;
    }
    let z = torus_sequence(spec, &lp.with_m(longest));
    let mut check = |len: u64, hit: bool| {
        if len == 0 {
            return;
        }
        let d: Estimate = star_upper_bound(&z.prefix(len as usize));
        tally.checked += 1;
        if d.upper < threshold - DISCREPANCY_SLACK {
            tally.hypothesis_met += 1;
            if !hit {
                tally.counterexamples += 1;
            }
        }
    };
    check(hit_free, false);
    if let Some(j) = with_hit {
        check(j, true);
    }
    tally
}

/// Runs `first_red_index` over every line of the plan.
pub fn empirical_m(spec: &ColoringSpec, plan: &SamplingPlan, m_cap: u64) -> Result<EmpiricalMReport> {
    if m_cap == 0 {
        return Err(Error::InvalidArgument("m_cap must be at least 1".into()));
    }
    let lines = plan.lines(m_cap)?;
    let results: Vec<(SampleRecord, Lemma1Tally, bool)> = lines
        .par_iter()
        .map_init(
            || TorusEvaluator::new(spec),
            |eval, lp| {
                let before = eval.refinements();
                let first_red = first_red_index_with(eval, lp);
                let rec = SampleRecord {
                    beta: lp.beta_string(),
                    gamma: lp.gamma_string(),
                    mode: lp.mode,
                    first_red,
                    refinements: eval.refinements() - before,
                };
                // negative norms have no colour and are not cross-checked
                let mismatch = first_red.is_some_and(|j| {
                    colour_norm(spec, &FieldElement::from_rational(lp.y(j))).is_ok_and(|c| c != Colour::Red)
                });
                (rec, lemma1_prefix_tally(spec, lp, first_red), mismatch)
            },
        )
        .collect();

    let mut histogram = BTreeMap::new();
    let mut empirical_m = None;
    let mut argmax = None;
    let mut censored = Vec::new();
    let mut lemma1 = Lemma1Tally::default();
    let mut colour_mismatches = 0;
    let mut records = Vec::with_capacity(results.len());
    for (rec, tally, mismatch) in results {
        lemma1.merge(&tally);
        colour_mismatches += mismatch as u64;
        match rec.first_red {
            Some(j) => {
                *histogram.entry(j).or_insert(0) += 1;
                if empirical_m.is_none_or(|m| j > m) {
                    empirical_m = Some(j);
                    argmax = Some((rec.beta.clone(), rec.gamma.clone()));
                }
            }
            None => censored.push(rec.clone()),
        }
        records.push(rec);
    }
    Ok(EmpiricalMReport {
        m_cap,
        samples: records.len(),
        empirical_m,
        argmax,
        histogram,
        censored,
        lemma1,
        colour_mismatches,
        records,
    })
}

impl EmpiricalMReport {
    /// One row per sample: `beta,gamma,mode,first_red,refinements`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,gamma,mode,first_red,refinements\n");
        for r in &self.records {
            let mode = match r.mode {
                ParamMode::Exact => "exact",
                ParamMode::Double => "double",
            };
            let first = r.first_red.map_or_else(|| "censored".to_string(), |j| j.to_string());
            out.push_str(&format!("{},{},{},{},{}\n", r.beta, r.gamma, mode, first, r.refinements));
        }
        out
    }
}
