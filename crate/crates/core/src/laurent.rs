//! Laurent polynomials in a formal parameter ε with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, is_positive, Rational, Scalar};

/// Finite sum `Σ c_k ε^k`, `k ∈ ℤ`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentEps {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentEps {
    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · ε^exp`
    pub fn monomial(c: Rational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The parameter ε itself.
    pub fn eps() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn eps_pow(exp: i64) -> Self {
        Self::monomial(Rational::one(), exp)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn add_term(&mut self, exp: i64, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Lowest exponent with a nonzero coefficient (the ε-adic valuation).
    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.min_exponent().is_some_and(|e| e < 0)
    }

    /// True iff `self` is nonnegative for all sufficiently small ε > 0, i.e. it is
    /// zero or its lowest-order coefficient is positive.
    pub fn is_nonneg_small_eps(&self) -> bool {
        match self.terms.iter().next() {
            None => true,
            Some((_, c)) => is_positive(c),
        }
    }

    /// Value at ε = 0. Fails if any negative power of ε is present.
    pub fn eval_at_zero(&self) -> Result<Rational> {
        if self.has_negative_exponent() {
            return Err(Error::NegativeExponentPresent);
        }
        Ok(self.coeff(0))
    }

    /// Value at a nonzero rational ε₀.
    pub fn eval(&self, eps0: &Rational) -> Rational {
        assert!(!eps0.is_zero(), "evaluate at zero with eval_at_zero");
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            acc += c * pow(eps0, *e);
        }
        acc
    }

    /// Multiplies by ε^k.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// `Some(c)` when `self` has no ε-dependence.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }
}

fn pow(x: &Rational, e: i64) -> Rational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl From<Rational> for LaurentEps {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn add(self, rhs: &LaurentEps) -> LaurentEps {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn sub(self, rhs: &LaurentEps) -> LaurentEps {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a LaurentEps> for &'a LaurentEps {
    type Output = LaurentEps;
    fn mul(self, rhs: &LaurentEps) -> LaurentEps {
        let mut out = LaurentEps::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentEps {
    type Output = LaurentEps;
    fn neg(self) -> LaurentEps {
        LaurentEps {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Zero for LaurentEps {
    fn zero() -> Self {
        LaurentEps::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentEps {
    fn one() -> Self {
        LaurentEps::constant(Rational::one())
    }
}

impl Add for LaurentEps {
    type Output = LaurentEps;
    fn add(self, rhs: LaurentEps) -> LaurentEps {
        &self + &rhs
    }
}

impl Mul for LaurentEps {
    type Output = LaurentEps;
    fn mul(self, rhs: LaurentEps) -> LaurentEps {
        &self * &rhs
    }
}

impl Scalar for LaurentEps {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        LaurentEps::constant(r.clone())
    }
}

impl fmt::Debug for LaurentEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format_rational(c),
                1 => format!("({})e", format_rational(c)),
                _ => format!("({})e^{e}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn l(terms: &[(i64, i64)]) -> LaurentEps {
        LaurentEps::from_terms(terms.iter().map(|&(e, c)| (e, int(c))))
    }

    #[test]
    fn nonneg_small_eps_examples() {
        assert!(LaurentEps::zero().is_nonneg_small_eps());
        assert!(l(&[(-1, 1), (1, -5)]).is_nonneg_small_eps());
        assert!(!l(&[(0, -3), (1, 100)]).is_nonneg_small_eps());
    }

    #[test]
    fn eval_at_zero_examples() {
        assert_eq!(l(&[(0, 3), (1, 2)]).eval_at_zero().unwrap(), int(3));
        assert_eq!(l(&[(2, 1)]).eval_at_zero().unwrap(), int(0));
        assert_eq!(
            l(&[(-1, 1), (0, 1)]).eval_at_zero(),
            Err(Error::NegativeExponentPresent)
        );
    }

    #[test]
    fn cancellation_prunes_terms() {
        let a = l(&[(-2, 1), (3, 4)]);
        assert!((&a - &a).is_zero());
        assert_eq!((&a + &l(&[(3, -4)])).max_exponent(), Some(-2));
    }

    #[test]
    fn shift_and_eval() {
        let a = l(&[(-1, 2), (2, 1)]);
        let e0 = rat(1, 3);
        assert_eq!(a.shift(2).eval(&e0), a.eval(&e0) * &e0 * &e0);
        assert_eq!(a.eval(&e0), int(6) + rat(1, 9));
    }
}
