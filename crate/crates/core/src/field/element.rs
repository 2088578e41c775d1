use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::RatPolynomial;

/// Element of a number field in the power basis `1, θ, ..., θ^(n-1)`.
/// Arithmetic lives on [`super::FieldDatum`], which knows the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub(crate) fn from_coords(coords: Vec<BigRational>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords.first().is_some_and(|c| c.is_one())
            && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            self.coords.first()
        } else {
            None
        }
    }

    pub fn as_polynomial(&self) -> RatPolynomial {
        RatPolynomial::new(self.coords.clone())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
