use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{int, rational_to_f64, Rational, Result, SeriesError};

/// Truncated Laurent series `Σ c_i x^{valuation+i} + O(x^{order+1})`.
///
/// `valuation` is the exponent of the first stored coefficient; it is not
/// required to be nonzero. [`ExactSeries::normalized`] strips leading zeros.
/// A series that is zero to its whole order normalizes to an empty
/// coefficient list with `valuation = order + 1`.
#[derive(Clone, Debug)]
pub struct ExactSeries {
    variable: String,
    valuation: i64,
    coefficients: Vec<Rational>,
    order: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn series_arith(a: &ExactSeries, b: &ExactSeries, op: ArithOp) -> Result<ExactSeries> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

impl ExactSeries {
    pub fn new(
        variable: impl Into<String>,
        valuation: i64,
        coefficients: Vec<Rational>,
        order: i64,
    ) -> Result<Self> {
        let expected = order - valuation + 1;
        if expected < 0 || expected as usize != coefficients.len() {
            return Err(SeriesError::LengthMismatch {
                expected: expected.max(0) as usize,
                found: coefficients.len(),
            });
        }
        Ok(Self {
            variable: variable.into(),
            valuation,
            coefficients,
            order,
        })
    }

    /// Series whose order is the last supplied coefficient.
    pub fn from_coeffs(variable: impl Into<String>, valuation: i64, coefficients: Vec<Rational>) -> Self {
        let order = valuation + coefficients.len() as i64 - 1;
        Self {
            variable: variable.into(),
            valuation,
            coefficients,
            order,
        }
    }

    pub fn from_ints(variable: impl Into<String>, valuation: i64, coefficients: &[i64]) -> Self {
        Self::from_coeffs(variable, valuation, coefficients.iter().map(|&c| int(c)).collect())
    }

    /// A finite polynomial viewed as a series known to `order`.
    pub fn from_polynomial(variable: impl Into<String>, coefficients: &[Rational], order: i64) -> Self {
        let len = (order + 1).max(0) as usize;
        let coefficients = (0..len)
            .map(|i| coefficients.get(i).cloned().unwrap_or_else(Rational::zero))
            .collect();
        Self::from_coeffs(variable, 0, coefficients).with_order(order)
    }

    pub fn zero(variable: impl Into<String>, order: i64) -> Self {
        Self::from_coeffs(variable, order + 1, Vec::new())
    }

    pub fn one(variable: impl Into<String>, order: i64) -> Self {
        Self::monomial(variable, Rational::one(), 0, order)
    }

    /// The series `x` itself.
    pub fn var(variable: impl Into<String>, order: i64) -> Self {
        Self::monomial(variable, Rational::one(), 1, order)
    }

    pub fn monomial(variable: impl Into<String>, coeff: Rational, exponent: i64, order: i64) -> Self {
        if order < exponent {
            return Self::zero(variable, order);
        }
        let mut coefficients = vec![Rational::zero(); (order - exponent + 1) as usize];
        coefficients[0] = coeff;
        Self::from_coeffs(variable, exponent, coefficients)
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Coefficient of `x^exponent`. Panics if `exponent > order`: that
    /// coefficient is unknown.
    pub fn coeff(&self, exponent: i64) -> Rational {
        self.try_coeff(exponent)
            .unwrap_or_else(|| panic!("x^{exponent} lies beyond truncation order {}", self.order))
    }

    pub fn try_coeff(&self, exponent: i64) -> Option<Rational> {
        if exponent > self.order {
            None
        } else if exponent < self.valuation {
            Some(Rational::zero())
        } else {
            Some(self.coefficients[(exponent - self.valuation) as usize].clone())
        }
    }

    /// Coefficients of `x^from ..= x^order`, zero-filled below the valuation.
    pub fn coeffs_from(&self, from: i64) -> Vec<Rational> {
        (from..=self.order).map(|e| self.coeff(e)).collect()
    }

    /// First exponent with a nonzero coefficient, if any is known.
    pub fn true_valuation(&self) -> Option<i64> {
        self.coefficients
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.valuation + i as i64)
    }

    pub fn normalized(&self) -> Self {
        match self.coefficients.iter().position(|c| !c.is_zero()) {
            Some(0) => self.clone(),
            Some(i) => Self {
                variable: self.variable.clone(),
                valuation: self.valuation + i as i64,
                coefficients: self.coefficients[i..].to_vec(),
                order: self.order,
            },
            None => Self::zero(self.variable.clone(), self.order),
        }
    }

    /// Re-index so storage starts at `start` (must not drop nonzero terms).
    pub fn with_start(&self, start: i64) -> Self {
        let s = self.normalized();
        let start = start.min(s.valuation);
        let mut coefficients = Vec::with_capacity((s.order - start + 1).max(0) as usize);
        coefficients.extend((start..s.valuation).map(|_| Rational::zero()));
        coefficients.extend(s.coefficients.iter().cloned());
        Self {
            variable: s.variable,
            valuation: start,
            coefficients,
            order: s.order,
        }
    }

    /// Lower the truncation order. Never raises it.
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        self.clone().with_order(order)
    }

    /// Treat the stored terms as an exact polynomial and extend the known
    /// order to `order` with zeros.
    pub fn pad(&self, order: i64) -> Self {
        if order <= self.order {
            return self.clone();
        }
        self.clone().with_order(order)
    }

    fn with_order(mut self, order: i64) -> Self {
        if order < self.valuation {
            return Self::zero(self.variable, order);
        }
        let len = (order - self.valuation + 1) as usize;
        self.coefficients.resize(len, Rational::zero());
        self.order = order;
        self
    }

    pub fn rename(&self, variable: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.variable != other.variable {
            return Err(SeriesError::VariableMismatch {
                left: self.variable.clone(),
                right: other.variable.clone(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let order = self.order.min(other.order);
        let start = self.valuation.min(other.valuation);
        if order < start {
            return Ok(Self::zero(self.variable.clone(), order));
        }
        let coefficients = (start..=order)
            .map(|e| self.coeff(e) + other.coeff(e))
            .collect();
        Ok(Self::from_coeffs(self.variable.clone(), start, coefficients))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_series())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let a = self.normalized();
        let b = other.normalized();
        let len = a.coefficients.len().min(b.coefficients.len());
        let valuation = a.valuation + b.valuation;
        let coefficients = mul_dense(&a.coefficients, &b.coefficients, len);
        Ok(Self {
            variable: a.variable,
            valuation,
            order: valuation + len as i64 - 1,
            coefficients,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let b = other.normalized();
        if b.coefficients.is_empty() {
            return Err(SeriesError::DivisionByZero);
        }
        let a = self.normalized();
        let len = a.coefficients.len().min(b.coefficients.len());
        let valuation = a.valuation - b.valuation;
        let coefficients = div_dense(&a.coefficients, &b.coefficients, len);
        Ok(Self {
            variable: a.variable,
            valuation,
            order: valuation + len as i64 - 1,
            coefficients,
        })
    }

    /// `1/f`.
    pub fn recip(&self) -> Result<Self> {
        let b = self.normalized();
        let one = Self::one(self.variable.clone(), b.order - b.valuation);
        one.checked_div(self)
    }

    /// Integer power; negative exponents go through [`ExactSeries::recip`].
    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self.normalized() };
        let mut exp = n.unsigned_abs();
        let rel = base.coefficients.len() as i64;
        let mut acc = Self::one(self.variable.clone(), rel - 1);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn neg_series(&self) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    /// Multiply by `x^n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            valuation: self.valuation + n,
            order: self.order + n,
            ..self.clone()
        }
    }

    /// `f(c·x)`.
    pub fn rescale_variable(&self, c: &Rational) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * pow_rational(c, self.valuation + i as i64))
            .collect();
        Self {
            coefficients,
            ..self.clone()
        }
    }

    pub fn derivative(&self) -> Self {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * int(self.valuation + i as i64))
            .collect();
        Self {
            variable: self.variable.clone(),
            valuation: self.valuation - 1,
            coefficients,
            order: self.order - 1,
        }
        .normalized()
    }

    /// Antiderivative with zero constant of integration.
    pub fn integral(&self) -> Result<Self> {
        let s = self.normalized();
        if s.try_coeff(-1).is_some_and(|c| !c.is_zero()) {
            return Err(SeriesError::LogarithmicTerm);
        }
        if s.order < -1 {
            // nothing known past the pole: only an integration constant
            return Err(SeriesError::LogarithmicTerm);
        }
        let start = s.valuation.min(0);
        let coefficients = (start..=s.order)
            .map(|e| {
                if e == -1 {
                    Rational::zero()
                } else {
                    s.coeff(e) / int(e + 1)
                }
            })
            .collect();
        Ok(Self::from_coeffs(s.variable, start + 1, coefficients))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| rational_to_f64(c) * x.powi((self.valuation + i as i64) as i32))
            .sum()
    }
}

fn pow_rational(c: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(c.clone(), e as usize)
    } else {
        num_traits::pow(c.recip(), (-e) as usize)
    }
}

/// Dense truncated product, `len` output coefficients.
pub(crate) fn mul_dense(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Dense truncated quotient `a / b`, requires `b[0] != 0`.
pub(crate) fn div_dense(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let inv = b[0].recip();
    let mut out: Vec<Rational> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = a.get(n).cloned().unwrap_or_else(Rational::zero);
        for k in 1..=n.min(b.len().saturating_sub(1)) {
            if !b[k].is_zero() {
                acc -= &b[k] * &out[n - k];
            }
        }
        out.push(acc * &inv);
    }
    out
}

impl PartialEq for ExactSeries {
    /// Equal iff same variable and identical coefficients on the overlap of
    /// the two truncation orders.
    fn eq(&self, other: &Self) -> bool {
        if self.variable != other.variable {
            return false;
        }
        let order = self.order.min(other.order);
        let start = self.valuation.min(other.valuation);
        (start..=order).all(|e| self.coeff(e) == other.coeff(e))
    }
}

impl Add for &ExactSeries {
    type Output = ExactSeries;
    fn add(self, rhs: Self) -> ExactSeries {
        self.checked_add(rhs).expect("series addition")
    }
}

impl Sub for &ExactSeries {
    type Output = ExactSeries;
    fn sub(self, rhs: Self) -> ExactSeries {
        self.checked_sub(rhs).expect("series subtraction")
    }
}

impl Mul for &ExactSeries {
    type Output = ExactSeries;
    fn mul(self, rhs: Self) -> ExactSeries {
        self.checked_mul(rhs).expect("series multiplication")
    }
}

impl Neg for &ExactSeries {
    type Output = ExactSeries;
    fn neg(self) -> ExactSeries {
        self.neg_series()
    }
}

impl fmt::Display for ExactSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.valuation + i as i64;
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let monomial = match e {
                0 => String::new(),
                1 => self.variable.clone(),
                _ => format!("{}^{}", self.variable, e),
            };
            if e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{monomial}")?;
            } else {
                write!(f, "{mag}*{monomial}")?;
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O({}^{})", self.variable, self.order + 1)
    }
}
