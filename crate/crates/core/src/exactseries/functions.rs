use num_traits::{One, Zero};

use super::series::mul_dense;
use super::{int, ExactSeries, Rational, Result, SeriesError};

impl ExactSeries {
    /// `self(inner(x))`. The inner series must vanish at 0 and the outer one
    /// must have no pole.
    ///
    /// Result order: unknown outer terms start contributing at
    /// `x^{v(order_f+1)}`, and the truncation of `inner` enters first through
    /// the lowest nonzero outer term of degree `i ≥ 1`, at
    /// `x^{order_g + 1 + (i-1)v}`.
    pub fn compose(&self, inner: &ExactSeries) -> Result<ExactSeries> {
        let f = self.normalized();
        let g = inner.normalized();
        if f.valuation() < 0 {
            return Err(SeriesError::NegativeValuation);
        }
        let v = g.valuation();
        if v < 1 {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let nf = f.order();
        let mut order = v.saturating_mul(nf.saturating_add(1)) - 1;
        if let Some(i_min) = (1..=nf).find(|&i| !f.coeff(i).is_zero()) {
            order = order.min(g.order() + (i_min - 1) * v);
        }
        let var = inner.variable().to_string();
        if order < 0 {
            return Ok(ExactSeries::zero(var, order));
        }
        let len = (order + 1) as usize;
        let g_dense = g.coeffs_from(0);
        let mut acc = vec![Rational::zero(); len];
        for i in (0..=nf).rev() {
            acc = mul_dense(&acc, &g_dense, len);
            acc[0] += f.coeff(i);
        }
        Ok(ExactSeries::from_coeffs(var, 0, acc))
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[x^n] h = (1/n) [x^{n-1}] (x/f)^n`.
    pub fn reverse(&self) -> Result<ExactSeries> {
        let f = self.normalized();
        if f.valuation() != 1 {
            return Err(SeriesError::NotReversible);
        }
        let n_max = f.order();
        let var = self.variable().to_string();
        // x/f as a unit power series with n_max known coefficients
        let unit = f.shift(-1);
        let x_over_f = unit.recip()?;
        let base = x_over_f.coeffs_from(0);
        let len = base.len();
        let mut h = vec![Rational::zero(); len + 1];
        let mut power = vec![Rational::zero(); len];
        power[0] = Rational::one();
        for n in 1..=len {
            power = mul_dense(&power, &base, len);
            h[n] = &power[n - 1] / int(n as i64);
        }
        debug_assert_eq!(len as i64, n_max);
        Ok(ExactSeries::from_coeffs(var, 0, h))
    }

    /// `exp(f)` for `f(0) = 0`.
    pub fn exp(&self) -> Result<ExactSeries> {
        let f = self.normalized();
        if f.valuation() < 1 {
            return Err(SeriesError::Precondition("exp needs f(0) = 0"));
        }
        let a = f.coeffs_from(0);
        let mut e: Vec<Rational> = Vec::with_capacity(a.len());
        e.push(Rational::one());
        for n in 1..a.len() {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !a[k].is_zero() {
                    acc += &a[k] * &e[n - k] * int(k as i64);
                }
            }
            e.push(acc / int(n as i64));
        }
        Ok(ExactSeries::from_coeffs(f.variable(), 0, e).truncate(f.order()))
    }

    /// `log(f)` for `f(0) = 1`.
    pub fn log(&self) -> Result<ExactSeries> {
        let a = self.unit_coeffs("log needs f(0) = 1")?;
        let mut l: Vec<Rational> = Vec::with_capacity(a.len());
        l.push(Rational::zero());
        for n in 1..a.len() {
            let mut acc = &a[n] * int(n as i64);
            for k in 1..n {
                if !a[n - k].is_zero() {
                    acc -= &l[k] * &a[n - k] * int(k as i64);
                }
            }
            l.push(acc / int(n as i64));
        }
        Ok(ExactSeries::from_coeffs(self.variable(), 0, l))
    }

    /// Square root with constant term `+1`, for `f(0) = 1`.
    pub fn sqrt(&self) -> Result<ExactSeries> {
        let a = self.unit_coeffs("sqrt needs f(0) = 1")?;
        let half = Rational::new(1.into(), 2.into());
        let mut s: Vec<Rational> = Vec::with_capacity(a.len());
        s.push(Rational::one());
        for n in 1..a.len() {
            let mut acc = a[n].clone();
            for k in 1..n {
                acc -= &s[k] * &s[n - k];
            }
            s.push(acc * &half);
        }
        Ok(ExactSeries::from_coeffs(self.variable(), 0, s))
    }

    fn unit_coeffs(&self, msg: &'static str) -> Result<Vec<Rational>> {
        let f = self.normalized();
        if f.valuation() != 0 || !f.coeff(0).is_one() {
            return Err(SeriesError::Precondition(msg));
        }
        Ok(f.coeffs_from(0))
    }
}

/// Schwarzian derivative `{f, x} = (f''/f')' - (f''/f')^2 / 2`, computed from
/// `f'` so that `f` itself may carry a logarithm.
pub fn schwarzian(f_prime: &ExactSeries) -> Result<ExactSeries> {
    let u = f_prime.derivative().checked_div(f_prime)?;
    let half = Rational::new(1.into(), 2.into());
    u.derivative().checked_sub(&(&u * &u).scale(&half))
}

/// Schwarzian of `t = ln x + h(x)` given `t'`, which must be a Laurent
/// series `x^{-1} + ...`.
pub fn schwarzian_of_logpair(t_prime: &ExactSeries) -> Result<ExactSeries> {
    let n = t_prime.normalized();
    let found = n.true_valuation().unwrap_or(n.order() + 1);
    if found != -1 {
        return Err(SeriesError::WrongValuation { expected: -1, found });
    }
    if !n.coeff(-1).is_one() {
        return Err(SeriesError::Precondition("t' must have residue 1"));
    }
    schwarzian(t_prime)
}
