//! Exact truncated Laurent series over arbitrary-precision rationals.
//!
//! Every series carries its truncation order explicitly: a series with order
//! `N` is known modulo `O(x^{N+1})`, and every operation returns the tightest
//! order that the inputs justify. Coefficients beyond the order are never
//! read or produced.

mod functions;
mod json;
mod logpair;
mod poly;
mod series;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use functions::{schwarzian, schwarzian_of_logpair};
pub use json::{parse_series_json, SeriesJson};
pub use logpair::LogPair;
pub use poly::{ratfun_equal, Polynomial, RationalFunction};
pub use series::{series_arith, ArithOp, ExactSeries};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("variable mismatch: `{left}` vs `{right}`")]
    VariableMismatch { left: String, right: String },
    #[error("division by a series that is zero to its known order")]
    DivisionByZero,
    #[error("inner series of a composition must vanish at 0")]
    NonzeroConstantTerm,
    #[error("outer series of a composition must have nonnegative valuation")]
    NegativeValuation,
    #[error("series reversion needs a nonzero linear term and zero constant term")]
    NotReversible,
    #[error("{0}")]
    Precondition(&'static str),
    #[error("expected valuation {expected}, found {found}")]
    WrongValuation { expected: i64, found: i64 },
    #[error("coefficient count {found} does not match valuation/order (expected {expected})")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot integrate a 1/x term")]
    LogarithmicTerm,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"-3/4"`, `"7"` or `"0/1"`. No whitespace, no decimal points.
pub fn parse_rational(s: &str) -> Result<Rational> {
    fn parse_int(part: &str, signed: bool) -> Option<BigInt> {
        let digits = if signed {
            part.strip_prefix('-').unwrap_or(part)
        } else {
            part
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        part.parse().ok()
    }
    let err = || SeriesError::Parse(format!("invalid rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (parse_int(n, true).ok_or_else(err)?, parse_int(d, false).ok_or_else(err)?),
        None => (parse_int(s, true).ok_or_else(err)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(SeriesError::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `num/den` rendering used by every exact serializer.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
