use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Outward-rounded only up to double rounding; for display and coarse checks.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
            self.hi.to_f64().unwrap_or(f64::INFINITY),
        )
    }

    /// `Some(n)` when every point of the interval has floor `n`.
    pub fn definite_floor(&self) -> Option<BigInt> {
        let f = self.lo.floor().to_integer();
        (self.hi.floor().to_integer() == f).then_some(f)
    }
}
