use super::{ExactSeries, Result, SeriesError};

/// `f·ln(x) + g`, the shape of a logarithmic Frobenius solution.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPair {
    log_part: ExactSeries,
    analytic_part: ExactSeries,
}

impl LogPair {
    /// Both parts are truncated to the smaller of their two orders.
    pub fn new(log_part: ExactSeries, analytic_part: ExactSeries) -> Result<Self> {
        if log_part.variable() != analytic_part.variable() {
            return Err(SeriesError::VariableMismatch {
                left: log_part.variable().to_string(),
                right: analytic_part.variable().to_string(),
            });
        }
        if log_part.normalized().valuation() < 0 {
            return Err(SeriesError::NegativeValuation);
        }
        let order = log_part.order().min(analytic_part.order());
        Ok(Self {
            log_part: log_part.truncate(order),
            analytic_part: analytic_part.truncate(order),
        })
    }

    fn from_parts_unchecked(log_part: ExactSeries, analytic_part: ExactSeries) -> Self {
        let order = log_part.order().min(analytic_part.order());
        Self {
            log_part: log_part.truncate(order),
            analytic_part: analytic_part.truncate(order),
        }
    }

    pub fn log_part(&self) -> &ExactSeries {
        &self.log_part
    }

    pub fn analytic_part(&self) -> &ExactSeries {
        &self.analytic_part
    }

    pub fn order(&self) -> i64 {
        self.log_part.order()
    }

    pub fn variable(&self) -> &str {
        self.log_part.variable()
    }

    pub fn is_zero(&self) -> bool {
        self.log_part.is_zero() && self.analytic_part.is_zero()
    }

    /// `(f ln x + g)' = f' ln x + (f/x + g')`.
    pub fn derivative(&self) -> Self {
        let analytic = &self.log_part.shift(-1) + &self.analytic_part.derivative();
        Self::from_parts_unchecked(self.log_part.derivative(), analytic)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_parts_unchecked(
            self.log_part.checked_add(&other.log_part)?,
            self.analytic_part.checked_add(&other.analytic_part)?,
        ))
    }

    /// Multiply both parts by a series without logarithm (poles allowed).
    pub fn mul_series(&self, s: &ExactSeries) -> Result<Self> {
        Ok(Self::from_parts_unchecked(
            self.log_part.checked_mul(s)?,
            self.analytic_part.checked_mul(s)?,
        ))
    }

    pub fn div_series(&self, s: &ExactSeries) -> Result<Self> {
        Ok(Self::from_parts_unchecked(
            self.log_part.checked_div(s)?,
            self.analytic_part.checked_div(s)?,
        ))
    }

    /// Derivative of `self / denom`. For `self = denom·ln x + g` the log part
    /// of the result vanishes and the analytic part is `1/x + (g/denom)'`.
    pub fn quotient_derivative(&self, denom: &ExactSeries) -> Result<Self> {
        Ok(self.div_series(denom)?.derivative())
    }
}

#[cfg(test)]
mod tests {
    use super::super::int;
    use super::*;

    #[test]
    fn derivative_of_plain_log() {
        let one = ExactSeries::one("x", 8);
        let y = LogPair::new(one, ExactSeries::zero("x", 8)).unwrap();
        let d = y.derivative();
        assert!(d.log_part().is_zero());
        assert_eq!(d.analytic_part(), &ExactSeries::monomial("x", int(1), -1, 7));
    }

    #[test]
    fn quotient_derivative_drops_log() {
        let d1 = ExactSeries::from_ints("x", 0, &[1, 1, 2, 0, 5, 1]);
        let g = ExactSeries::from_ints("x", 0, &[0, 0, 3, 1, 0, 2]);
        let y = LogPair::new(d1.clone(), g.clone()).unwrap();
        let t = y.quotient_derivative(&d1).unwrap();
        assert!(t.log_part().is_zero());
        let expected = &ExactSeries::monomial("x", int(1), -1, 10) + &g.checked_div(&d1).unwrap().derivative();
        assert_eq!(t.analytic_part(), &expected);
    }

    #[test]
    fn rejects_pole_in_log_part() {
        let f = ExactSeries::monomial("x", int(1), -1, 4);
        assert!(LogPair::new(f, ExactSeries::zero("x", 4)).is_err());
    }
}
