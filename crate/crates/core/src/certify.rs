//! Non-sphericity certificates for concrete point configurations.
//!
//! A configuration `x_1, ..., x_s` is non-spherical exactly when there are
//! coefficients `c_j` with `sum c_j = 0` and `sum c_j x_j = 0` but
//! `sum c_j |x_j|^2 = B != 0`. Every isometric copy then satisfies the same
//! quadratic identity, which is what the colouring is built around.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::FieldElement;

/// A finite point set with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigurationX {
    dimension: usize,
    points: Vec<Vec<FieldElement>>,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationFile {
    dimension: usize,
    points: Vec<Vec<FieldElement>>,
}

impl ConfigurationX {
    pub fn new(dimension: usize, points: Vec<Vec<FieldElement>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfiguration("dimension must be positive".into()));
        }
        if points.len() < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        for p in &points {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: p.len(),
                });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidConfiguration(format!(
                        "points {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(ConfigurationX { dimension, points })
    }

    /// Points on a line, each given as a single coordinate.
    pub fn collinear(coords: &[FieldElement]) -> Result<Self> {
        ConfigurationX::new(1, coords.iter().map(|c| vec![c.clone()]).collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<FieldElement>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn squared_norms(&self) -> Vec<FieldElement> {
        self.points.iter().map(|p| squared_norm(p)).collect()
    }

    /// Reads `{"dimension": d, "points": [["0", "sqrt(2)"], ...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ConfigurationFile = serde_json::from_str(s)?;
        ConfigurationX::new(file.dimension, file.points)
    }

    pub fn to_json_string(&self) -> String {
        let file = ConfigurationFile {
            dimension: self.dimension,
            points: self.points.clone(),
        };
        serde_json::to_string_pretty(&file).expect("configuration serializes")
    }
}

pub fn squared_norm(point: &[FieldElement]) -> FieldElement {
    point.iter().map(|x| x * x).sum()
}

/// Coefficients `c` and value `B = sum c_j |x_j|^2` for one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericityCertificate {
    pub c: Vec<FieldElement>,
    #[serde(rename = "B")]
    pub b: FieldElement,
    /// Squared norms `|x_j|^2` of the configuration the certificate came from.
    pub norms: Vec<FieldElement>,
}

impl SphericityCertificate {
    /// Certificate from coefficients and squared norms, with `B` computed.
    pub fn from_parts(c: Vec<FieldElement>, norms: Vec<FieldElement>) -> Result<Self> {
        if c.len() != norms.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                found: norms.len(),
            });
        }
        let b = quadratic_value(&c, &norms);
        if b.is_zero() {
            return Err(Error::InvalidCertificate("B = 0".into()));
        }
        Ok(SphericityCertificate { c, b, norms })
    }

    /// Checks the three defining identities against `x` symbolically.
    pub fn verify(&self, x: &ConfigurationX) -> Result<()> {
        if self.c.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: self.c.len(),
            });
        }
        let total: FieldElement = self.c.iter().cloned().sum();
        if !total.is_zero() {
            return Err(Error::InvalidCertificate(format!("sum c_j = {total}")));
        }
        for axis in 0..x.dimension() {
            let s: FieldElement = self
                .c
                .iter()
                .zip(x.points())
                .map(|(c, p)| c * &p[axis])
                .sum();
            if !s.is_zero() {
                return Err(Error::InvalidCertificate(format!(
                    "sum c_j x_j has coordinate {axis} = {s}"
                )));
            }
        }
        let b = quadratic_value(&self.c, &x.squared_norms());
        if b != self.b {
            return Err(Error::InvalidCertificate(format!("B mismatch: {b} != {}", self.b)));
        }
        if b.is_zero() {
            return Err(Error::InvalidCertificate("B = 0".into()));
        }
        Ok(())
    }

    pub fn negated(&self) -> Self {
        SphericityCertificate {
            c: self.c.iter().map(|c| -c).collect(),
            b: -&self.b,
            norms: self.norms.clone(),
        }
    }
}

/// `sum c_j y_j`.
pub fn quadratic_value(c: &[FieldElement], y: &[FieldElement]) -> FieldElement {
    c.iter().zip(y).map(|(c, y)| c * y).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifyOutcome {
    NonSpherical(SphericityCertificate),
    Spherical,
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&SphericityCertificate> {
        match self {
            CertifyOutcome::NonSpherical(c) => Some(c),
            CertifyOutcome::Spherical => None,
        }
    }
}

/// Solves `sum c_j = 0`, `sum c_j x_j = 0` exactly and returns the first
/// nullspace basis vector (by free column) with `B != 0`, scaled so `B > 0`.
pub fn compute_certificate(x: &ConfigurationX) -> Result<CertifyOutcome> {
    let s = x.len();
    let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(x.dimension() + 1);
    rows.push(vec![FieldElement::one(); s]);
    for axis in 0..x.dimension() {
        rows.push(x.points().iter().map(|p| p[axis].clone()).collect());
    }
    let norms = x.squared_norms();
    for c in nullspace(rows, s) {
        let b = quadratic_value(&c, &norms);
        if b.is_zero() {
            continue;
        }
        let cert = SphericityCertificate { c, b, norms };
        let cert = if cert.b.is_negative() { cert.negated() } else { cert };
        debug_assert!(cert.verify(x).is_ok());
        return Ok(CertifyOutcome::NonSpherical(cert));
    }
    Ok(CertifyOutcome::Spherical)
}

/// Nullspace basis of an exact matrix, one vector per free column in
/// increasing column order.
fn nullspace(mut rows: Vec<Vec<FieldElement>>, ncols: usize) -> Vec<Vec<FieldElement>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = rows[r][col].inverse().expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            for c in col..ncols {
                let delta = &factor * &rows[r][c];
                rows[i][c] -= &delta;
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![FieldElement::zero(); ncols];
            v[free] = FieldElement::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&rows[row][free];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElement {
        s.parse().unwrap()
    }

    fn line(xs: &[i64]) -> ConfigurationX {
        ConfigurationX::collinear(&xs.iter().map(|&x| FieldElement::from(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn squared_norms() {
        assert_eq!(squared_norm(&[fe("0"), fe("0")]), fe("0"));
        assert_eq!(squared_norm(&[fe("1"), fe("2")]), fe("5"));
        assert_eq!(squared_norm(&[fe("sqrt(2)"), fe("sqrt(3)")]), fe("5"));
    }

    #[test]
    fn l3_certificate() {
        let x = line(&[0, 1, 2]);
        let cert = compute_certificate(&x).unwrap();
        let cert = cert.certificate().unwrap();
        assert_eq!(cert.c, vec![fe("1"), fe("-2"), fe("1")]);
        assert_eq!(cert.b, fe("2"));
        cert.verify(&x).unwrap();
    }

    #[test]
    fn gaps_one_two() {
        let x = line(&[0, 1, 3]);
        let cert = compute_certificate(&x).unwrap();
        let cert = cert.certificate().unwrap();
        assert_eq!(cert.c, vec![fe("2"), fe("-3"), fe("1")]);
        assert_eq!(cert.b, fe("6"));
    }

    #[test]
    fn unit_square_is_spherical() {
        let pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(a, b)| vec![FieldElement::from(a), FieldElement::from(b)])
            .collect();
        let x = ConfigurationX::new(2, pts).unwrap();
        assert_eq!(compute_certificate(&x).unwrap(), CertifyOutcome::Spherical);
    }

    #[test]
    fn two_points_are_spherical() {
        assert_eq!(compute_certificate(&line(&[0, 5])).unwrap(), CertifyOutcome::Spherical);
    }

    #[test]
    fn irrational_coordinates() {
        let x = ConfigurationX::collinear(&[fe("0"), fe("sqrt(2)"), fe("2*sqrt(2)")]).unwrap();
        let cert = compute_certificate(&x).unwrap();
        let cert = cert.certificate().unwrap();
        cert.verify(&x).unwrap();
        assert_eq!(cert.b, fe("4"));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            ConfigurationX::new(2, vec![vec![fe("1"), fe("2")], vec![fe("1")]]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
        assert!(ConfigurationX::new(1, vec![vec![fe("1")]]).is_err());
        assert!(ConfigurationX::new(1, vec![vec![fe("1")], vec![fe("2/2")]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let x = ConfigurationX::from_json_str(r#"{"dimension": 2, "points": [["0","0"],["1","sqrt(2)"],["2","2*sqrt(2)"]]}"#).unwrap();
        assert_eq!(x.len(), 3);
        let back = ConfigurationX::from_json_str(&x.to_json_string()).unwrap();
        assert_eq!(back, x);
    }
}
