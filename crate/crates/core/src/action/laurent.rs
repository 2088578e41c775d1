use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::groebner::{MPoly, Monomial};

/// Laurent polynomial over `F_q` in `d` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    q: u64,
    d: usize,
    terms: BTreeMap<Vec<i64>, u64>,
}

impl LaurentPolynomial {
    /// Coefficients are reduced mod `q`; repeated exponents are summed.
    pub fn new(q: u64, d: usize, terms: impl IntoIterator<Item = (Vec<i64>, i64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != d {
                return Err(Error::InvalidInput(format!(
                    "exponent vector {e:?} has length {}, expected {d}",
                    e.len()
                )));
            }
            let c = c.rem_euclid(q as i64) as u64;
            let slot = map.entry(e).or_insert(0);
            *slot = (*slot + c) % q;
        }
        map.retain(|_, c| *c != 0);
        Ok(Self { q, d, terms: map })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, u64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    /// Multiplied by a monomial unit so that all exponents are `>= 0` and
    /// each variable has minimal exponent 0, as a polynomial in the first
    /// `d` of `nvars` variables.
    pub(crate) fn to_shifted_mpoly(&self, nvars: usize) -> MPoly {
        let mins: Vec<i64> = (0..self.d)
            .map(|i| self.terms.keys().map(|e| e[i]).min().unwrap_or(0))
            .collect();
        MPoly::from_terms(
            self.q,
            self.terms.iter().map(|(e, c)| {
                let mut m: Monomial = vec![0; nvars];
                for i in 0..self.d {
                    m[i] = (e[i] - mins[i]) as u32;
                }
                (m, *c)
            }),
        )
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| if x == 1 { format!("u{}", i + 1) } else { format!("u{}^{x}", i + 1) })
                .collect();
            match (vars.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join("*"))?,
                (false, c) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}
