//! From a sphericity certificate to the full set of colouring parameters.
//!
//! The certificate identity `sum c_j |x_j|^2 = B` is rewritten as
//!
//! ```text
//! sum_j sum_k q[j][k] * a[k] * |x_j|^2 = B'
//! ```
//!
//! with integer `q`, irrational `a[k] = M * b[k]` for a `Q`-basis `b` of the
//! (rescaled) coefficients, `B' > sum |q|` and a prime `p > 2 B'`. This is
//! the *copy equation*: every copy of the configuration satisfies it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::certify::SphericityCertificate;
use crate::error::{Error, Result};
use crate::numfield::{
    denominator_lcm, in_q_span, is_prime, is_squarefree, q_span_basis, FieldElement,
};

/// Parameters of the red/blue colouring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringSpec {
    pub r: usize,
    pub mu: FieldElement,
    pub a: Vec<FieldElement>,
    pub q: Vec<Vec<i64>>,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "Bprime")]
    pub b_prime: FieldElement,
    pub p: u64,
    /// Squared norms of the configuration the spec was built from.
    pub seed_norms: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rescaled {
    pub c: Vec<FieldElement>,
    pub b: FieldElement,
    pub mu: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integerized {
    pub basis: Vec<FieldElement>,
    pub q: Vec<Vec<i64>>,
    pub b: FieldElement,
    /// The factor the equation was multiplied by.
    pub lcm: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeChoice {
    pub m: u64,
    pub a: Vec<FieldElement>,
    pub b_prime: FieldElement,
    pub p: u64,
}

/// Squarefree integers `2, 3, 5, 6, 7, 10, ...`.
fn squarefree_candidates() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&d| is_squarefree(d))
}

/// Multiplies the certificate by the smallest `sqrt(d)` that removes `1`
/// from the `Q`-span of the coefficients, or leaves it alone if `1` is
/// already outside.
pub fn rescale_if_needed(cert: &SphericityCertificate) -> Rescaled {
    let one = FieldElement::one();
    if !in_q_span(&one, &cert.c) {
        return Rescaled {
            c: cert.c.clone(),
            b: cert.b.clone(),
            mu: one,
        };
    }
    for d in squarefree_candidates() {
        let mu = FieldElement::sqrt(d);
        let c: Vec<FieldElement> = cert.c.iter().map(|c| c * &mu).collect();
        if !in_q_span(&one, &c) {
            let b = &cert.b * &mu;
            return Rescaled { c, b, mu };
        }
    }
    unreachable!("squarefree candidates are unbounded")
}

/// Extracts a `Q`-basis and clears denominators of the coordinates,
/// scaling `b` by the same factor.
pub fn integerize(c: &[FieldElement], b: &FieldElement) -> Result<Integerized> {
    if in_q_span(&FieldElement::one(), c) {
        return Err(Error::InvalidCertificate(
            "1 lies in the Q-span of the coefficients".into(),
        ));
    }
    let (basis, coords) = q_span_basis(c)?;
    let lcm = denominator_lcm(coords.iter().flat_map(|row| row.entries().iter()));
    let scale = BigRational::from_integer(lcm.clone());
    let q = coords
        .iter()
        .map(|row| {
            row.entries()
                .iter()
                .map(|x| {
                    let v = (x * &scale).to_integer();
                    v.to_i64()
                        .ok_or_else(|| Error::Overflow(format!("q entry {v} does not fit in i64")))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Integerized {
        basis,
        q,
        b: b.scale(&scale),
        lcm,
    })
}

pub fn q_abs_sum(q: &[Vec<i64>]) -> BigInt {
    q.iter()
        .flatten()
        .map(|&x| BigInt::from(x).abs())
        .sum()
}

/// Smallest integer greater than `x`.
fn next_integer_above(x: &FieldElement) -> BigInt {
    x.floor_certified() + 1
}

pub fn next_prime_above(x: &FieldElement) -> Result<u64> {
    let start = next_integer_above(x);
    let mut n = start
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("prime search start {start} exceeds u64")))?;
    while !is_prime(n) {
        n = n
            .checked_add(1)
            .ok_or_else(|| Error::Overflow("prime search".into()))?;
    }
    Ok(n)
}

/// Minimal `M` with `M b > sum |q|` and minimal prime `p > 2 M b`.
pub fn choose_m_and_p(q: &[Vec<i64>], basis: &[FieldElement], b: &FieldElement) -> Result<PrimeChoice> {
    if b.is_zero() {
        return Err(Error::InvalidCertificate("B = 0".into()));
    }
    if b.is_negative() {
        return Err(Error::InvalidCertificate("B must be positive".into()));
    }
    let total = FieldElement::from_bigint(q_abs_sum(q));
    let ratio = total.checked_div(b)?;
    let m_big = next_integer_above(&ratio).max(BigInt::one());
    let m = m_big
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("M = {m_big} exceeds u64")))?;
    let m_fe = FieldElement::from_bigint(m_big);
    let b_prime = &m_fe * b;
    let p = next_prime_above(&b_prime.scale_int(2))?;
    let a = basis.iter().map(|bk| &m_fe * bk).collect();
    Ok(PrimeChoice { m, a, b_prime, p })
}

/// Runs sign normalization, rescaling, integerization and the `M`/`p` choice.
pub fn build_spec(cert: &SphericityCertificate) -> Result<ColoringSpec> {
    if cert.b.is_zero() {
        return Err(Error::InvalidCertificate("B = 0".into()));
    }
    if cert.c.len() != cert.norms.len() {
        return Err(Error::DimensionMismatch {
            expected: cert.c.len(),
            found: cert.norms.len(),
        });
    }
    let cert = if cert.b.is_negative() {
        cert.negated()
    } else {
        cert.clone()
    };
    let rescaled = rescale_if_needed(&cert);
    let int = integerize(&rescaled.c, &rescaled.b)?;
    let choice = choose_m_and_p(&int.q, &int.basis, &int.b)?;
    let spec = ColoringSpec {
        r: int.basis.len(),
        mu: rescaled.mu,
        a: choice.a,
        q: int.q,
        m: choice.m,
        b_prime: choice.b_prime,
        p: choice.p,
        seed_norms: cert.norms.clone(),
    };
    spec.validate()?;
    Ok(spec)
}

impl ColoringSpec {
    /// Number of points `s` in the configuration.
    pub fn s(&self) -> usize {
        self.q.len()
    }

    /// `w_j = sum_k q[j][k] a[k]`, the coefficient of `y_j` in the copy equation.
    pub fn row_weight(&self, j: usize) -> FieldElement {
        self.q[j]
            .iter()
            .zip(&self.a)
            .map(|(&q, a)| a.scale_int(q))
            .sum()
    }

    pub fn row_weights(&self) -> Vec<FieldElement> {
        (0..self.s()).map(|j| self.row_weight(j)).collect()
    }

    /// Left-hand side of the copy equation `sum_j w_j y_j = B'` for squared norms `y`.
    pub fn copy_equation_lhs(&self, y: &[FieldElement]) -> FieldElement {
        self.row_weights().iter().zip(y).map(|(w, y)| w * y).sum()
    }

    pub fn q_abs_sum(&self) -> BigInt {
        q_abs_sum(&self.q)
    }

    /// `1 / p^r` as an exact rational.
    pub fn red_box_measure(&self) -> BigRational {
        let pr = num_traits::pow(BigInt::from(self.p), self.r);
        BigRational::new(BigInt::one(), pr)
    }

    /// Every violated structural invariant, as human-readable lines.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.r == 0 || self.a.len() != self.r {
            out.push(format!("r = {} but {} values of a", self.r, self.a.len()));
            return out;
        }
        if self.q.is_empty() || self.q.iter().any(|row| row.len() != self.r) {
            out.push("q must be a nonempty s x r matrix".into());
            return out;
        }
        if self.seed_norms.len() != self.s() {
            out.push(format!(
                "{} seed norms for {} rows of q",
                self.seed_norms.len(),
                self.s()
            ));
        }
        if self.m == 0 {
            out.push("M must be positive".into());
        }
        for (k, a) in self.a.iter().enumerate() {
            if a.is_rational() {
                out.push(format!("a[{k}] = {a} is rational"));
            }
        }
        let weights = self.row_weights();
        if weights.iter().all(FieldElement::is_zero) {
            out.push("q is identically zero".into());
        } else if in_q_span(&FieldElement::one(), &weights) {
            out.push("1 lies in the Q-span of the rescaled coefficients".into());
        }
        if self.seed_norms.len() == self.s() {
            let lhs = self.copy_equation_lhs(&self.seed_norms);
            if lhs != self.b_prime {
                out.push(format!("copy equation fails on the seed norms: {lhs} != {}", self.b_prime));
            }
        }
        let total = FieldElement::from_bigint(self.q_abs_sum());
        if self.b_prime <= total {
            out.push(format!("B' = {} is not above sum |q| = {total}", self.b_prime));
        }
        if !is_prime(self.p) {
            out.push(format!("p = {} is not prime", self.p));
        }
        if FieldElement::from_integer(self.p as i64) <= self.b_prime.scale_int(2) {
            out.push(format!("p = {} is not above 2B'", self.p));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.invariant_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v.join("; ")))
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: ColoringSpec = serde_json::from_str(s)?;
        if spec.p > i64::MAX as u64 || spec.m > i64::MAX as u64 {
            return Err(Error::InvalidSpec("p and M must fit in i64".into()));
        }
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Whether `M` and `p` are the smallest admissible values.
    pub fn is_minimal(&self) -> bool {
        let total = FieldElement::from_bigint(self.q_abs_sum());
        let b_base = self
            .b_prime
            .scale(&BigRational::new(BigInt::one(), BigInt::from(self.m)));
        let m_minimal = self.m == 1 || b_base.scale_int(self.m as i64 - 1) <= total;
        let bound = self.b_prime.scale_int(2);
        let p_minimal = (2..self.p)
            .rev()
            .find(|&n| is_prime(n))
            .is_none_or(|prev| FieldElement::from_integer(prev as i64) <= bound);
        m_minimal && p_minimal
    }
}

impl Rescaled {
    pub fn is_identity(&self) -> bool {
        self.mu == FieldElement::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{compute_certificate, ConfigurationX};

    fn fe(s: &str) -> FieldElement {
        s.parse().unwrap()
    }

    fn fes(xs: &[&str]) -> Vec<FieldElement> {
        xs.iter().map(|s| fe(s)).collect()
    }

    fn l3_cert() -> SphericityCertificate {
        let x = ConfigurationX::collinear(&fes(&["0", "1", "2"])).unwrap();
        compute_certificate(&x).unwrap().certificate().unwrap().clone()
    }

    #[test]
    fn rescale_rational_coefficients() {
        let r = rescale_if_needed(&l3_cert());
        assert_eq!(r.mu, fe("sqrt(2)"));
        assert_eq!(r.c, fes(&["sqrt(2)", "-2*sqrt(2)", "sqrt(2)"]));
        assert_eq!(r.b, fe("2*sqrt(2)"));
    }

    #[test]
    fn rescale_pass_through() {
        let cert = SphericityCertificate::from_parts(
            fes(&["sqrt(3)", "-2*sqrt(3)", "sqrt(3)"]),
            fes(&["0", "1", "4"]),
        )
        .unwrap();
        let r = rescale_if_needed(&cert);
        assert!(r.is_identity());
        assert_eq!(r.c, cert.c);
    }

    #[test]
    fn rescale_mixed_surd_is_untouched() {
        // span is Q(1 + sqrt(2)), which does not contain 1
        let cert = SphericityCertificate::from_parts(
            fes(&["1 + sqrt(2)", "-1 - sqrt(2)"]),
            fes(&["1", "sqrt(3)"]),
        )
        .unwrap();
        assert!(rescale_if_needed(&cert).is_identity());
        // whereas (1, 1 + sqrt(2)) spans 1 and sqrt(2); sqrt(2) and sqrt(3)
        // are then checked in order and sqrt(3) is the first that works.
        let cert = SphericityCertificate::from_parts(
            fes(&["1", "1 + sqrt(2)"]),
            fes(&["1", "2"]),
        )
        .unwrap();
        let r = rescale_if_needed(&cert);
        assert_eq!(r.mu, fe("sqrt(3)"));
        assert!(!in_q_span(&FieldElement::one(), &r.c));
    }

    #[test]
    fn integerize_examples() {
        let i = integerize(&fes(&["sqrt(2)", "-2*sqrt(2)", "sqrt(2)"]), &fe("2*sqrt(2)")).unwrap();
        assert_eq!(i.basis, fes(&["sqrt(2)"]));
        assert_eq!(i.q, vec![vec![1], vec![-2], vec![1]]);
        assert_eq!(i.b, fe("2*sqrt(2)"));

        let i = integerize(&fes(&["sqrt(2)/2", "sqrt(2)/3"]), &fe("sqrt(2)")).unwrap();
        assert_eq!(i.q, vec![vec![3], vec![2]]);
        assert_eq!(i.b, fe("6*sqrt(2)"));
        assert_eq!(i.lcm, BigInt::from(6));

        let i = integerize(&fes(&["sqrt(2)", "sqrt(3)"]), &fe("1")).unwrap();
        assert_eq!(i.basis, fes(&["sqrt(2)", "sqrt(3)"]));
        assert_eq!(i.q, vec![vec![1, 0], vec![0, 1]]);

        assert!(integerize(&fes(&["1", "-1"]), &fe("1")).is_err());
    }

    #[test]
    fn choose_examples() {
        let c = choose_m_and_p(&[vec![1], vec![-2], vec![1]], &fes(&["sqrt(2)"]), &fe("2*sqrt(2)")).unwrap();
        assert_eq!((c.m, c.p), (2, 13));
        assert_eq!(c.b_prime, fe("4*sqrt(2)"));
        assert_eq!(c.a, fes(&["2*sqrt(2)"]));

        let c = choose_m_and_p(&[vec![1]], &fes(&["sqrt(2)"]), &fe("sqrt(2)")).unwrap();
        assert_eq!((c.m, c.p), (1, 3));
        assert_eq!(c.b_prime, fe("sqrt(2)"));

        let c = choose_m_and_p(&[vec![1, 0], vec![0, 1]], &fes(&["sqrt(2)", "sqrt(3)"]), &fe("sqrt(2) + sqrt(3)")).unwrap();
        assert_eq!((c.m, c.p), (1, 7));

        assert!(choose_m_and_p(&[vec![1]], &fes(&["sqrt(2)"]), &FieldElement::zero()).is_err());
    }

    #[test]
    fn strict_inequality_when_ratio_is_integer() {
        // sum |q| / B = 4 exactly, so M = 5
        let c = choose_m_and_p(&[vec![2], vec![-2]], &fes(&["sqrt(2)"]), &fe("1")).unwrap();
        assert_eq!(c.m, 5);
        // 2B' = 10, next prime strictly above is 11
        assert_eq!(c.p, 11);
    }

    #[test]
    fn l3_spec() {
        let spec = build_spec(&l3_cert()).unwrap();
        assert_eq!(spec.r, 1);
        assert_eq!(spec.mu, fe("sqrt(2)"));
        assert_eq!(spec.a, fes(&["2*sqrt(2)"]));
        assert_eq!(spec.q, vec![vec![1], vec![-2], vec![1]]);
        assert_eq!(spec.m, 2);
        assert_eq!(spec.b_prime, fe("4*sqrt(2)"));
        assert_eq!(spec.p, 13);
        assert!(spec.invariant_violations().is_empty());
        assert!(spec.is_minimal());
    }

    #[test]
    fn negative_b_normalizes() {
        let cert = l3_cert();
        assert_eq!(build_spec(&cert.negated()).unwrap(), build_spec(&cert).unwrap());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = build_spec(&l3_cert()).unwrap();
        let s = spec.to_json_string();
        assert_eq!(ColoringSpec::from_json_str(&s).unwrap(), spec);
        let first_keys: Vec<&str> = s
            .lines()
            .filter_map(|l| l.trim().strip_prefix('"').and_then(|l| l.split('"').next()))
            .filter(|k| ["r", "mu", "a", "q", "M", "Bprime", "p", "seed_norms"].contains(k))
            .collect();
        assert_eq!(first_keys, ["r", "mu", "a", "q", "M", "Bprime", "p", "seed_norms"]);
    }

    #[test]
    fn violations_are_reported() {
        let mut spec = build_spec(&l3_cert()).unwrap();
        spec.p = 3;
        assert!(spec.validate().is_err());
        spec.p = 12;
        let v = spec.invariant_violations();
        assert!(v.iter().any(|l| l.contains("not prime")));
    }
}
