//! Sparse homogeneous noncommutative polynomials, viewed as tensors in
//! `K^{m_1} ⊗ … ⊗ K^{m_d}` with one alphabet per position.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::laurent::LaurentEps;
use crate::scalar::{Rational, Scalar};

/// A standard basis tensor `e_{i_1} ⊗ … ⊗ e_{i_d}`; entry `k` indexes into the alphabet of slot `k`.
///
/// The derived ordering is lexicographic on the position sequence, which is the
/// canonical serialisation order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<usize>> for Monomial {
    fn from(v: Vec<usize>) -> Self {
        Monomial(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredTensor<T: Scalar> {
    alphabet_sizes: Vec<usize>,
    coeffs: BTreeMap<Monomial, T>,
}

pub type RationalTensor = LayeredTensor<Rational>;
pub type EpsTensor = LayeredTensor<LaurentEps>;

impl<T: Scalar> LayeredTensor<T> {
    pub fn zero(alphabet_sizes: Vec<usize>) -> Self {
        Self {
            alphabet_sizes,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(alphabet_sizes: Vec<usize>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, T)>,
    {
        let mut t = Self::zero(alphabet_sizes);
        for (m, c) in terms {
            t.add_term(Monomial(m), &c)?;
        }
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    pub fn check_monomial(&self, m: &Monomial) -> Result<()> {
        if m.0.len() != self.degree() {
            return Err(Error::ShapeMismatch(format!(
                "monomial of length {} in a degree-{} tensor",
                m.0.len(),
                self.degree()
            )));
        }
        for (slot, (&i, &n)) in m.0.iter().zip(&self.alphabet_sizes).enumerate() {
            if i >= n {
                return Err(Error::ShapeMismatch(format!(
                    "index {i} in slot {slot} exceeds alphabet size {n}"
                )));
            }
        }
        Ok(())
    }

    /// Adds `c` to the coefficient of `m`, pruning the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: &T) -> Result<()> {
        self.check_monomial(&m)?;
        self.add_term_unchecked(m, c);
        Ok(())
    }

    pub(crate) fn add_term_unchecked(&mut self, m: Monomial, c: &T) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(v) => {
                *v = v.add_ref(c);
                if v.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, c.clone());
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.coeffs.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn get(&self, m: &Monomial) -> Option<&T> {
        self.coeffs.get(m)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.alphabet_sizes != other.alphabet_sizes {
            return Err(Error::ShapeMismatch(format!(
                "alphabet sizes {:?} vs {:?}",
                self.alphabet_sizes, other.alphabet_sizes
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term_unchecked(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.alphabet_sizes.clone());
        }
        self.map(|c| c.mul_ref(s))
    }

    /// Coefficient-wise equality; differs from `==` by rejecting mismatched shapes.
    pub fn tensor_equal(&self, other: &Self) -> Result<bool> {
        self.check_shape(other)?;
        Ok(self.coeffs == other.coeffs)
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Self {
        let mut out = Self::zero(self.alphabet_sizes.clone());
        for (m, c) in &self.coeffs {
            out.add_term_unchecked(m.clone(), &f(c));
        }
        out
    }

    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<LayeredTensor<U>> {
        let mut out = LayeredTensor::zero(self.alphabet_sizes.clone());
        for (m, c) in &self.coeffs {
            out.add_term_unchecked(m.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Embeds a rational tensor into another coefficient domain.
    pub fn lift<U: Scalar>(&self) -> LayeredTensor<U>
    where
        T: Into<Rational> + Clone,
    {
        let mut out = LayeredTensor::zero(self.alphabet_sizes.clone());
        for (m, c) in &self.coeffs {
            out.add_term_unchecked(m.clone(), &U::from_rational(&c.clone().into()));
        }
        out
    }
}

impl LayeredTensor<LaurentEps> {
    /// Sets ε = 0 coefficient-wise; fails if any coefficient has a pole at ε = 0.
    pub fn eval_at_zero(&self) -> Result<RationalTensor> {
        self.try_map(|c| c.eval_at_zero())
    }

    pub fn eval_at(&self, eps0: &Rational) -> RationalTensor {
        self.try_map(|c| Ok(c.eval(eps0))).expect("infallible")
    }

    pub fn shift_eps(&self, k: i64) -> Self {
        self.map(|c| c.shift(k))
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.coeffs.values().any(LaurentEps::has_negative_exponent)
    }

    /// True iff every coefficient vanishes at ε = 0 (and none has a pole).
    pub fn is_divisible_by_eps(&self) -> bool {
        self.coeffs.values().all(|c| c.min_exponent().is_some_and(|e| e >= 1))
    }

    /// `Some` when no coefficient depends on ε.
    pub fn to_rational(&self) -> Option<RationalTensor> {
        self.try_map(|c| c.as_rational().ok_or(Error::NegativeExponentPresent))
            .ok()
    }
}

impl RationalTensor {
    pub fn to_eps(&self) -> EpsTensor {
        self.lift()
    }

    /// Evaluates the noncommutative polynomial at commuting rational values;
    /// `values[slot][symbol]` is the value of the symbol in that slot.
    pub fn evaluate_at(&self, values: &[Vec<Rational>]) -> Rational {
        let mut acc = Rational::from_integer(0.into());
        for (m, c) in &self.coeffs {
            let mut p = c.clone();
            for (slot, &i) in m.0.iter().enumerate() {
                p *= &values[slot][i];
            }
            acc += p;
        }
        acc
    }
}

/// Mixed-radix rank of `digits[range]` with radices `sizes[range]`, most significant first.
pub(crate) fn mixed_rank(digits: &[usize], sizes: &[usize]) -> usize {
    digits
        .iter()
        .zip(sizes)
        .fold(0usize, |acc, (&d, &n)| acc * n + d)
}

pub(crate) fn mixed_unrank(mut r: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &n) in sizes.iter().enumerate().rev() {
        out[slot] = r % n;
        r /= n;
    }
    out
}
