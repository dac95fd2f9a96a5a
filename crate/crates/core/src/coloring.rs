//! The red/blue colouring.
//!
//! A point `x` is red iff `floor(a_k |x|^2) = 0 (mod p)` for every `k`.
//! The colour depends only on `|x|^2`, so one oracle serves every ambient
//! dimension.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certify::squared_norm;
use crate::error::{Error, Result};
use crate::numfield::FieldElement;
use crate::spec_builder::ColoringSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Red,
    Blue,
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colour::Red => "red",
            Colour::Blue => "blue",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourDetail {
    pub colour: Colour,
    /// `floor(a_k y)` for each `k`.
    pub floors: Vec<BigInt>,
}

fn check_nonnegative(y: &FieldElement) -> Result<()> {
    if y.is_negative() {
        Err(Error::NegativeNorm(y.to_string()))
    } else {
        Ok(())
    }
}

fn is_red_floor(floor: &BigInt, p: u64) -> bool {
    floor.mod_floor(&BigInt::from(p)).is_zero()
}

/// Colour of a squared norm `y >= 0`, with every floor certified.
pub fn colour_norm(spec: &ColoringSpec, y: &FieldElement) -> Result<Colour> {
    check_nonnegative(y)?;
    let red = spec
        .a
        .iter()
        .all(|a| is_red_floor(&(a * y).floor_certified(), spec.p));
    Ok(if red { Colour::Red } else { Colour::Blue })
}

/// Like [`colour_norm`] but reports all `r` floors.
pub fn colour_norm_detailed(spec: &ColoringSpec, y: &FieldElement) -> Result<ColourDetail> {
    check_nonnegative(y)?;
    let floors: Vec<BigInt> = spec.a.iter().map(|a| (a * y).floor_certified()).collect();
    let red = floors.iter().all(|f| is_red_floor(f, spec.p));
    Ok(ColourDetail {
        colour: if red { Colour::Red } else { Colour::Blue },
        floors,
    })
}

pub fn colour_point(spec: &ColoringSpec, x: &[FieldElement]) -> Colour {
    colour_norm(spec, &squared_norm(x)).expect("a squared norm is nonnegative")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastColour {
    Red,
    Blue,
    Unknown,
}

// Products below this magnitude keep integer parts exact in a double.
const FAST_LIMIT: f64 = (1u64 << 50) as f64;
const FAST_REL_MARGIN: f64 = 1.0 / (1u64 << 48) as f64;

/// Double-precision colouring for bulk scans.
///
/// A floor is accepted only if the product sits farther than a safety margin
/// from every integer; otherwise the answer is [`FastColour::Unknown`] and
/// the caller must fall back to the exact oracle.
#[derive(Clone, Debug)]
pub struct FastColourer {
    a: Vec<f64>,
    p: u64,
}

impl FastColourer {
    pub fn new(spec: &ColoringSpec) -> Self {
        FastColourer {
            a: spec.a.iter().map(FieldElement::to_f64).collect(),
            p: spec.p,
        }
    }

    /// `floor(a_k y)` if it is unambiguous at double precision.
    pub fn floor(&self, k: usize, y: f64) -> Option<i64> {
        let t = self.a[k] * y;
        if !t.is_finite() || t.abs() >= FAST_LIMIT {
            return None;
        }
        let margin = t.abs() * FAST_REL_MARGIN + FAST_REL_MARGIN;
        let f = t.floor();
        if t - f < margin || f + 1.0 - t < margin {
            return None;
        }
        Some(f as i64)
    }

    pub fn classify(&self, y: f64) -> FastColour {
        let mut unknown = false;
        for k in 0..self.a.len() {
            match self.floor(k, y) {
                Some(f) if f.rem_euclid(self.p as i64) != 0 => return FastColour::Blue,
                Some(_) => {}
                None => unknown = true,
            }
        }
        if unknown {
            FastColour::Unknown
        } else {
            FastColour::Red
        }
    }

    /// Fast path with exact fallback; agrees with [`colour_norm`].
    pub fn colour(&self, spec: &ColoringSpec, y: &FieldElement, y_f64: f64) -> Result<Colour> {
        check_nonnegative(y)?;
        match self.classify(y_f64) {
            FastColour::Red => Ok(Colour::Red),
            FastColour::Blue => Ok(Colour::Blue),
            FastColour::Unknown => colour_norm(spec, y),
        }
    }

    /// `floor(a_k y)` with exact fallback.
    pub fn floor_exact(&self, spec: &ColoringSpec, k: usize, y: &FieldElement, y_f64: f64) -> BigInt {
        match self.floor(k, y_f64) {
            Some(f) => BigInt::from(f),
            None => (&spec.a[k] * y).floor_certified(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{compute_certificate, ConfigurationX};
    use crate::spec_builder::build_spec;

    fn fe(s: &str) -> FieldElement {
        s.parse().unwrap()
    }

    fn l3_spec() -> ColoringSpec {
        let x = ConfigurationX::collinear(&[fe("0"), fe("1"), fe("2")]).unwrap();
        build_spec(compute_certificate(&x).unwrap().certificate().unwrap()).unwrap()
    }

    #[test]
    fn origin_is_red() {
        let spec = l3_spec();
        assert_eq!(colour_norm(&spec, &fe("0")).unwrap(), Colour::Red);
        for d in 1..5 {
            assert_eq!(colour_point(&spec, &vec![FieldElement::zero(); d]), Colour::Red);
        }
    }

    #[test]
    fn unit_norm_is_blue() {
        let spec = l3_spec();
        let d = colour_norm_detailed(&spec, &fe("1")).unwrap();
        assert_eq!(d.colour, Colour::Blue);
        assert_eq!(d.floors, vec![BigInt::from(2)]);
        assert_eq!(colour_point(&spec, &[fe("1"), fe("0"), fe("0")]), Colour::Blue);
    }

    #[test]
    fn just_above_13_over_a() {
        let spec = l3_spec();
        // a y = 13 (1 + eps) with a = 2 sqrt(2): y = 13 sqrt(2) / 4 (1 + eps)
        let y = fe("13*sqrt(2)/4 * (1 + 1/1000)");
        let d = colour_norm_detailed(&spec, &y).unwrap();
        assert_eq!(d.floors, vec![BigInt::from(13)]);
        assert_eq!(d.colour, Colour::Red);
        // and just below: floor 12, blue
        let y = fe("13*sqrt(2)/4 * (1 - 1/1000)");
        assert_eq!(colour_norm(&spec, &y).unwrap(), Colour::Blue);
    }

    #[test]
    fn negative_norm_rejected() {
        assert!(matches!(colour_norm(&l3_spec(), &fe("-1/2")), Err(Error::NegativeNorm(_))));
    }

    #[test]
    fn equal_norms_equal_colours() {
        let spec = l3_spec();
        let a = [fe("3"), fe("4")];
        let b = [fe("0"), fe("5"), fe("0")];
        let c = [fe("sqrt(7)"), fe("sqrt(18)")];
        assert_eq!(colour_point(&spec, &a), colour_point(&spec, &b));
        assert_eq!(colour_point(&spec, &a), colour_point(&spec, &c));
    }

    #[test]
    fn fast_path_agrees() {
        let spec = l3_spec();
        let fast = FastColourer::new(&spec);
        for n in 0..2000i64 {
            let y = FieldElement::from_rational(crate::numfield::rational(n, 7));
            let exact = colour_norm(&spec, &y).unwrap();
            assert_eq!(fast.colour(&spec, &y, y.to_f64()).unwrap(), exact, "y = {y}");
            if let FastColour::Red | FastColour::Blue = fast.classify(y.to_f64()) {
                let c = if fast.classify(y.to_f64()) == FastColour::Red { Colour::Red } else { Colour::Blue };
                assert_eq!(c, exact);
            }
        }
    }

    #[test]
    fn fast_path_defers_near_integers() {
        let spec = l3_spec();
        let fast = FastColourer::new(&spec);
        // a * y within 1e-16 of 13
        let y = (13.0f64 / spec.a[0].to_f64()).next_up();
        assert_eq!(fast.floor(0, y), None);
    }
}
