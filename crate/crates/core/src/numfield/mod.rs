//! Exact arithmetic in real multiquadratic fields `Q(sqrt(d1), ..., sqrt(dt))`.
//!
//! An element is a finite rational combination of square roots of distinct
//! squarefree integers. Square roots of distinct squarefree integers are
//! linearly independent over `Q`, so the coefficient map is a canonical form
//! and equality is structural. Order, sign and floor are decided by interval
//! refinement, which always terminates because a nonzero element is never
//! numerically zero and an irrational element is never an integer.

mod interval;
mod parse;
mod radical;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::precision::precision_floor;

pub use interval::Interval;
pub use parse::{format_vector, parse_vector};
pub use radical::{is_prime, is_squarefree, square_decompose, Radical};

/// An exact real number in a multiquadratic field.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldElement {
    terms: BTreeMap<Radical, BigRational>,
}

/// A nonempty vector of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector(Vec<BigRational>);

impl RationalVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("rational vector must be nonempty".into()));
        }
        Ok(RationalVector(entries))
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_entries(self) -> Vec<BigRational> {
        self.0
    }
}

impl std::ops::Index<usize> for RationalVector {
    type Output = BigRational;
    fn index(&self, i: usize) -> &BigRational {
        &self.0[i]
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement::default()
    }

    pub fn one() -> Self {
        FieldElement::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        FieldElement::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        FieldElement::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Radical::one(), q);
        }
        FieldElement { terms }
    }

    /// `sqrt(n)` for any nonnegative integer, reduced to `root * sqrt(squarefree)`.
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return FieldElement::zero();
        }
        let (root, primes) = square_decompose(n);
        let mut terms = BTreeMap::new();
        terms.insert(
            Radical::from_primes(primes),
            BigRational::from_integer(BigInt::from(root)),
        );
        FieldElement { terms }
    }

    /// `coeff * sqrt(key)` where `key` is a radical.
    pub fn monomial(coeff: BigRational, key: Radical) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        FieldElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff only the rational part is nonzero (or the element is zero).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(Radical::is_one)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> BigRational {
        self.terms
            .get(&Radical::one())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Iterates `(radical, coefficient)` pairs in increasing radical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Radical, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Distinct primes whose square roots generate a field containing `self`.
    pub fn generators(&self) -> Vec<u64> {
        let mut primes: Vec<u64> = self
            .terms
            .keys()
            .flat_map(|k| k.primes().iter().copied())
            .collect();
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    fn add_term(&mut self, key: Radical, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, factor: &BigRational) -> FieldElement {
        if factor.is_zero() {
            return FieldElement::zero();
        }
        FieldElement {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    pub fn scale_int(&self, factor: i64) -> FieldElement {
        self.scale(&BigRational::from_integer(BigInt::from(factor)))
    }

    /// Multiplicative inverse, `None` for zero.
    ///
    /// Eliminates one prime at a time: with `x = u + v sqrt(q)`, the product
    /// `x (u - v sqrt(q)) = u^2 - q v^2` no longer involves `sqrt(q)`.
    pub fn inverse(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(FieldElement::from_rational(q.recip()));
        }
        let prime = *self.generators().last().expect("irrational element has a generator");
        let mut u = FieldElement::zero();
        let mut v = FieldElement::zero();
        for (k, c) in &self.terms {
            if k.contains(prime) {
                v.add_term(k.without(prime), c.clone());
            } else {
                u.add_term(k.clone(), c.clone());
            }
        }
        let root = FieldElement::monomial(BigRational::one(), Radical::from_primes(vec![prime]));
        let conj = &u - &(&v * &root);
        let norm = &(&u * &u) - &(&v * &v).scale(&BigRational::from_integer(BigInt::from(prime)));
        let inv_norm = norm.inverse()?;
        Some(&conj * &inv_norm)
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<FieldElement> {
        let inv = rhs.inverse().ok_or(Error::DivisionByZero)?;
        Ok(self * &inv)
    }

    /// Rational enclosure `[lo, hi]` of width at most `2^-precision_bits`.
    pub fn approx(&self, precision_bits: u32) -> Interval {
        let precision_bits = precision_bits.max(1);
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        let mut mass = BigRational::zero();
        for (k, c) in &self.terms {
            if k.is_one() {
                lo += c;
                hi += c;
            } else {
                mass += c.abs();
            }
        }
        if mass.is_zero() {
            return Interval { lo, hi };
        }
        // width = mass * 2^-shift <= 2^(mass_bits - shift)
        let mass_bits = mass.ceil().to_integer().bits() as u32;
        let shift = precision_bits + mass_bits;
        let scale = BigInt::one() << shift;
        for (k, c) in &self.terms {
            if k.is_one() {
                continue;
            }
            let r: BigUint = (k.value() << (2 * shift as usize)).sqrt();
            let r = BigInt::from_biguint(Sign::Plus, r);
            let root_lo = BigRational::new(r.clone(), scale.clone());
            let root_hi = BigRational::new(r + 1, scale.clone());
            if c.is_positive() {
                lo += c * root_lo;
                hi += c * root_hi;
            } else {
                lo += c * root_hi;
                hi += c * root_lo;
            }
        }
        Interval { lo, hi }
    }

    /// Exact sign, decided by refining enclosures until zero is excluded.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let mut bits = precision_floor();
        loop {
            let iv = self.approx(bits);
            if iv.lo.is_positive() {
                return Ordering::Greater;
            }
            if iv.hi.is_negative() {
                return Ordering::Less;
            }
            bits = bits.saturating_mul(2);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> FieldElement {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact floor.
    pub fn floor_certified(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        let mut bits = precision_floor();
        loop {
            let iv = self.approx(bits);
            let f = iv.lo.floor().to_integer();
            if iv.hi.floor().to_integer() == f {
                return f;
            }
            bits = bits.saturating_mul(2);
        }
    }

    /// Exact fractional part `self - floor(self)` as an element.
    pub fn fract(&self) -> FieldElement {
        self - &FieldElement::from_bigint(self.floor_certified())
    }

    /// Nearest double, from a 64-bit enclosure.
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        let iv = self.approx(64);
        iv.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_integer(n)
    }
}

impl From<BigRational> for FieldElement {
    fn from(q: BigRational) -> Self {
        FieldElement::from_rational(q)
    }
}

impl From<BigInt> for FieldElement {
    fn from(n: BigInt) -> Self {
        FieldElement::from_bigint(n)
    }
}

impl<'a> Add<&'a FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> AddAssign<&'a FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &'a FieldElement) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &'a FieldElement) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        let mut out = FieldElement::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                let (key, factor) = k1.mul(k2);
                let coeff = c1 * c2 * BigRational::from_integer(BigInt::from(factor));
                out.add_term(key, coeff);
            }
        }
        out
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(mut self) -> FieldElement {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $tr<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(iter: I) -> Self {
        iter.fold(FieldElement::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rank of a list of elements viewed as vectors over `Q`.
pub fn q_rank(elements: &[FieldElement]) -> usize {
    let keys = collect_keys(elements);
    let mut rows = coefficient_rows(elements, &keys);
    rref(&mut rows).len()
}

/// True iff `target` lies in the `Q`-span of `elements`.
pub fn in_q_span(target: &FieldElement, elements: &[FieldElement]) -> bool {
    if target.is_zero() {
        return true;
    }
    let mut extended = elements.to_vec();
    extended.push(target.clone());
    q_rank(&extended) == q_rank(elements)
}

/// A `Q`-basis of the span of `elements` together with coordinates.
///
/// The basis is the reduced row echelon form of the coefficient vectors, with
/// columns ordered by radical. `coords[j][k]` is the coefficient of
/// `basis[k]` in `elements[j]`.
pub fn q_span_basis(elements: &[FieldElement]) -> Result<(Vec<FieldElement>, Vec<RationalVector>)> {
    if elements.iter().all(FieldElement::is_zero) {
        return Err(Error::ZeroSpan);
    }
    let keys = collect_keys(elements);
    let mut rows = coefficient_rows(elements, &keys);
    let pivots = rref(&mut rows);
    let basis: Vec<FieldElement> = rows
        .iter()
        .take(pivots.len())
        .map(|row| {
            let mut e = FieldElement::zero();
            for (key, c) in keys.iter().zip(row) {
                e.add_term(key.clone(), c.clone());
            }
            e
        })
        .collect();
    let coords = elements
        .iter()
        .map(|e| {
            let entries = pivots
                .iter()
                .map(|&col| e.terms.get(&keys[col]).cloned().unwrap_or_else(BigRational::zero))
                .collect();
            RationalVector(entries)
        })
        .collect();
    Ok((basis, coords))
}

fn collect_keys(elements: &[FieldElement]) -> Vec<Radical> {
    let mut keys: Vec<Radical> = elements
        .iter()
        .flat_map(|e| e.terms.keys().cloned())
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

fn coefficient_rows(elements: &[FieldElement], keys: &[Radical]) -> Vec<Vec<BigRational>> {
    elements
        .iter()
        .map(|e| {
            keys.iter()
                .map(|k| e.terms.get(k).cloned().unwrap_or_else(BigRational::zero))
                .collect()
        })
        .collect()
}

/// In-place reduced row echelon form over `Q`. Returns pivot columns; the
/// first `pivots.len()` rows are the nonzero rows.
fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            for c in col..ncols {
                let delta = &factor * &rows[r][c];
                rows[i][c] -= delta;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
