//! Polynomial size bounds on finite relations.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finrel::FinRel;

/// A polynomial with nonnegative coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCertificate {
    coefficients: Vec<BigRational>,
}

impl PolyCertificate {
    pub fn new(coefficients: Vec<BigRational>) -> Result<Self> {
        if coefficients.iter().any(Signed::is_negative) {
            return Err(Error::invalid(
                "polynomial certificate",
                "coefficients must be nonnegative",
            ));
        }
        Ok(PolyCertificate { coefficients })
    }

    pub fn identity() -> Self {
        PolyCertificate {
            coefficients: vec![BigRational::zero(), BigRational::from_integer(1.into())],
        }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coefficients
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyViolation {
    pub input: usize,
    pub output: usize,
    pub size_in: String,
    pub bound: String,
    pub size_out: String,
}

/// Checks `|b| ≤ p(|a|)` for every pair `(a, b)` of `f`.
pub fn poly_bound_check(
    f: &FinRel,
    cert: &PolyCertificate,
    dom_size: &[BigRational],
    cod_size: &[BigRational],
) -> Result<Option<PolyViolation>> {
    if dom_size.len() != f.dom().len() || cod_size.len() != f.cod().len() {
        return Err(Error::TypeMismatch(
            "size measures must cover domain and codomain".into(),
        ));
    }
    for (a, b) in f.pairs() {
        let bound = cert.eval(&dom_size[a]);
        if cod_size[b] > bound {
            return Ok(Some(PolyViolation {
                input: a,
                output: b,
                size_in: dom_size[a].to_string(),
                bound: bound.to_string(),
                size_out: cod_size[b].to_string(),
            }));
        }
    }
    Ok(None)
}
