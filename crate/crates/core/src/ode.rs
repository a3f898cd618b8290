//! Second-order linear ODEs `y'' + p·y' + r·y = 0` with rational-function
//! coefficients.
//!
//! The Frobenius solver works on the operator written in `Θ = x·d/dx`:
//! after clearing the common denominator `B` of `x·p = A/B` and
//! `x²·r = C/B`, the equation is `Σ_j x^j F_j(Θ) y = 0` with
//! `F_j(s) = b_j·s(s−1) + a_j·s + c_j`. A double indicial root at 0 gives
//! `y₁ = Σ d_n xⁿ` and `y₂ = y₁·ln x + Σ c_n xⁿ` through
//!
//! ```text
//! F_0(n) d_n = −Σ_{j≥1} F_j(n−j) d_{n−j}
//! F_0(n) c_n = −Σ_{j≥1} F_j(n−j) c_{n−j} − Σ_{j≥0} F_j'(n−j) d_{n−j}
//! ```
//!
//! [`LinearODE2::apply`] checks candidates independently of this recurrence,
//! by plain series differentiation.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactseries::{
    format_rational, int, parse_rational, rat, ExactSeries, LogPair, Polynomial, Rational,
    RationalFunction, SeriesError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OdeError {
    #[error("x = 0 is not a regular singular point")]
    IrregularSingularPoint,
    #[error("indicial roots at 0 are not a double root 0 (equation {0}); only that case is supported")]
    UnsupportedIndicialRoots(String),
    #[error("degenerate Möbius map: ad - bc = 0")]
    DegenerateMap,
    #[error("candidate order {0} is below the minimum of 5")]
    CandidateTooShort(i64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, OdeError>;

/// `y'' + p·y' + r·y = 0` in the named variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearODE2 {
    p: RationalFunction,
    r: RationalFunction,
    variable: String,
}

impl LinearODE2 {
    pub fn new(p: RationalFunction, r: RationalFunction, variable: impl Into<String>) -> Self {
        Self {
            p,
            r,
            variable: variable.into(),
        }
    }

    /// From `a2·y'' + a1·y' + a0·y = 0`.
    pub fn from_coefficients(
        a2: &Polynomial,
        a1: &Polynomial,
        a0: &Polynomial,
        variable: impl Into<String>,
    ) -> Result<Self> {
        Ok(Self::new(
            RationalFunction::new(a1.clone(), a2.clone())?,
            RationalFunction::new(a0.clone(), a2.clone())?,
            variable,
        ))
    }

    /// Picard–Fuchs equation of `D(k) = (1+k)K(k)`:
    /// `k(1−k)(1+k)² D'' + (1−2k−k²)(1+k) D' + (k−1) D = 0`.
    pub fn dos_equation() -> Self {
        let one_plus_k = Polynomial::from_ints(&[1, 1]);
        let a2 = &(&Polynomial::from_ints(&[0, 1, -1]) * &one_plus_k) * &one_plus_k;
        let a1 = &Polynomial::from_ints(&[1, -2, -1]) * &one_plus_k;
        let a0 = Polynomial::from_ints(&[-1, 1]);
        Self::from_coefficients(&a2, &a1, &a0, "k").expect("nonzero leading coefficient")
    }

    /// Equation of the quarter period `K(k)`:
    /// `k(1−k²) K'' + (1−3k²) K' − k K = 0`, in the given variable.
    pub fn quarter_period_equation(variable: &str) -> Self {
        Self::from_coefficients(
            &Polynomial::from_ints(&[0, 1, 0, -1]),
            &Polynomial::from_ints(&[1, 0, -3]),
            &Polynomial::from_ints(&[0, -1]),
            variable,
        )
        .expect("nonzero leading coefficient")
    }

    /// Legendre-family equation `λ(1−λ)K'' + (1−2λ)K' − K/4 = 0`.
    pub fn legendre_family() -> Self {
        Self::from_coefficients(
            &Polynomial::from_ints(&[0, 1, -1]),
            &Polynomial::from_ints(&[1, -2]),
            &Polynomial::constant(rat(-1, 4)),
            "lambda",
        )
        .expect("nonzero leading coefficient")
    }

    pub fn p(&self) -> &RationalFunction {
        &self.p
    }

    pub fn r(&self) -> &RationalFunction {
        &self.r
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn rename(&self, variable: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            ..self.clone()
        }
    }

    /// `(x·p, x²·r)`, i.e. `P₁` and `P₂`.
    fn normalized_coefficients(&self) -> (RationalFunction, RationalFunction) {
        let x = RationalFunction::x();
        let p1 = &self.p * &x;
        let p2 = &(&self.r * &x) * &x;
        (p1, p2)
    }

    pub fn is_regular_singular_at_zero(&self) -> bool {
        let (p1, p2) = self.normalized_coefficients();
        [p1, p2]
            .iter()
            .all(|f| f.valuation_at_zero().is_none_or(|v| v >= 0))
    }

    pub fn indicial_equation(&self) -> Result<IndicialEquation> {
        if !self.is_regular_singular_at_zero() {
            return Err(OdeError::IrregularSingularPoint);
        }
        let (p1, p2) = self.normalized_coefficients();
        let zero = Rational::zero();
        let p10 = p1.eval(&zero).expect("regular at zero");
        let p20 = p2.eval(&zero).expect("regular at zero");
        // s(s-1) + s·P1(0) + P2(0)
        Ok(IndicialEquation::new([p20, p10 - int(1), int(1)]))
    }

    /// Local operator data `(B, A, C)` with `x·p = A/B`, `x²·r = C/B`.
    fn theta_operator(&self) -> Result<(Polynomial, Polynomial, Polynomial)> {
        if !self.is_regular_singular_at_zero() {
            return Err(OdeError::IrregularSingularPoint);
        }
        let (p1, p2) = self.normalized_coefficients();
        let g = p1.den().gcd(p2.den());
        let b = &p1.den().div_rem(&g).0 * p2.den();
        let a = p1.num() * &b.div_rem(p1.den()).0;
        let c = p2.num() * &b.div_rem(p2.den()).0;
        Ok((b, a, c))
    }

    /// Holomorphic solution `D₁` with `D₁(0) = 1` and logarithmic solution
    /// `D₂ = D₁·ln x + Σ_{n≥1} c_n xⁿ`, both known to `O(x^{order+1})`.
    pub fn frobenius_solutions(&self, order: usize) -> Result<(ExactSeries, LogPair)> {
        let ind = self.indicial_equation()?;
        if !ind.is_double_root_zero() {
            return Err(OdeError::UnsupportedIndicialRoots(ind.to_string()));
        }
        let (b, a, c) = self.theta_operator()?;
        let span = [b.degree(), a.degree(), c.degree()]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0);
        let f = |j: usize, s: &Rational| -> Rational {
            b.coeff(j) * s * (s - int(1)) + a.coeff(j) * s + c.coeff(j)
        };
        let df = |j: usize, s: &Rational| -> Rational {
            b.coeff(j) * (s * int(2) - int(1)) + a.coeff(j)
        };

        let mut d = vec![Rational::one()];
        let mut cs = vec![Rational::zero()];
        for n in 1..=order {
            let nn = int(n as i64);
            let lead = f(0, &nn);
            let mut acc = Rational::zero();
            for j in 1..=n.min(span) {
                acc -= f(j, &int((n - j) as i64)) * &d[n - j];
            }
            let dn = acc / &lead;
            let mut acc = -df(0, &nn) * &dn;
            for j in 1..=n.min(span) {
                let s = int((n - j) as i64);
                acc -= f(j, &s) * &cs[n - j] + df(j, &s) * &d[n - j];
            }
            d.push(dn);
            cs.push(acc / &lead);
        }
        let var = self.variable.clone();
        let d1 = ExactSeries::from_coeffs(var.clone(), 0, d);
        let g = ExactSeries::from_coeffs(var, 0, cs);
        let d2 = LogPair::new(d1.clone(), g)?;
        Ok((d1, d2))
    }

    /// Residual `L(y)` for `y = f·ln x + g`:
    /// `ln x·(f'' + p f' + r f) + (2f'/x − f/x² + p f/x + g'' + p g' + r g)`.
    pub fn apply(&self, candidate: impl Into<LogPair>) -> Result<LogPair> {
        let y: LogPair = candidate.into();
        if y.order() < 5 {
            return Err(OdeError::CandidateTooShort(y.order()));
        }
        let n = y.order() + 2;
        let p = self.p.to_laurent(&self.variable, n);
        let r = self.r.to_laurent(&self.variable, n);
        let y1 = y.derivative();
        let y2 = y1.derivative();
        let residual = y2
            .checked_add(&y1.mul_series(&p)?)?
            .checked_add(&y.mul_series(&r)?)?;
        Ok(residual)
    }

    /// `Q = r − p²/4 − p'/2`, so that `u'' + Q·u = 0` after removing the
    /// first-derivative term.
    pub fn q_form(&self) -> RationalFunction {
        let p_sq = &self.p * &self.p;
        let t = &p_sq.scale(&rat(1, 4)) + &self.p.derivative().scale(&rat(1, 2));
        &self.r - &t
    }

    /// `{t, x} = 2Q` for any ratio `t` of independent solutions.
    pub fn schwarzian_rhs(&self) -> RationalFunction {
        self.q_form().scale(&int(2))
    }

    pub fn theta_form(&self) -> ThetaForm {
        let (p1, p2) = self.normalized_coefficients();
        ThetaForm {
            theta2: RationalFunction::constant(Rational::one()),
            theta1: &p1 - &RationalFunction::constant(Rational::one()),
            theta0: p2,
            variable: self.variable.clone(),
        }
    }

    /// The equation satisfied by `Y(e) = y(x(e))`, `x = (a e + b)/(c e + d)`.
    pub fn mobius_pullback(&self, map: [Rational; 4], new_variable: &str) -> Result<Self> {
        let [a, b, c, d] = map;
        if (&a * &d - &b * &c).is_zero() {
            return Err(OdeError::DegenerateMap);
        }
        let x = RationalFunction::new(
            Polynomial::new(vec![b, a]),
            Polynomial::new(vec![d, c]),
        )?;
        let dx = x.derivative();
        let ddx = dx.derivative();
        let p_at = self.p.compose(&x)?;
        let r_at = self.r.compose(&x)?;
        let p_new = &(&p_at * &dx) - &ddx.checked_div(&dx)?;
        let r_new = &(&r_at * &dx) * &dx;
        Ok(Self::new(p_new, r_new, new_variable))
    }
}

impl From<&ExactSeries> for LogPair {
    fn from(s: &ExactSeries) -> Self {
        LogPair::new(ExactSeries::zero(s.variable(), s.order()), s.clone())
            .expect("zero log part")
    }
}

impl From<ExactSeries> for LogPair {
    fn from(s: ExactSeries) -> Self {
        LogPair::from(&s)
    }
}

impl From<&LogPair> for LogPair {
    fn from(p: &LogPair) -> Self {
        p.clone()
    }
}

/// Roots of a monic quadratic over ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndicialRoots {
    /// Both roots rational, ascending, with multiplicity.
    Rational([Rational; 2]),
    /// Roots `(−c₁ ± √Δ)/2` with `Δ` not a rational square (complex when
    /// `Δ < 0`).
    Irrational { discriminant: Rational },
}

/// `s² + c₁ s + c₀ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicialEquation {
    /// `[c₀, c₁, c₂]`, ascending, `c₂ = 1`.
    pub coefficients: [Rational; 3],
    pub roots: IndicialRoots,
}

impl IndicialEquation {
    fn new(coefficients: [Rational; 3]) -> Self {
        let [c0, c1, _] = &coefficients;
        let disc = c1 * c1 - c0 * int(4);
        let roots = match rational_sqrt(&disc) {
            Some(s) => {
                let half = rat(1, 2);
                let lo = (-c1 - &s) * &half;
                let hi = (-c1 + &s) * &half;
                IndicialRoots::Rational([lo, hi])
            }
            None => IndicialRoots::Irrational { discriminant: disc },
        };
        Self {
            coefficients,
            roots,
        }
    }

    pub fn is_double_root_zero(&self) -> bool {
        matches!(&self.roots, IndicialRoots::Rational([a, b]) if a.is_zero() && b.is_zero())
    }
}

impl std::fmt::Display for IndicialEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = Polynomial::new(self.coefficients.to_vec());
        write!(f, "{} = 0", p.display("s"))
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// `θ₂·Θ² + θ₁·Θ + θ₀` with `Θ = x·d/dx`.
#[derive(Clone, Debug)]
pub struct ThetaForm {
    pub theta2: RationalFunction,
    pub theta1: RationalFunction,
    pub theta0: RationalFunction,
    pub variable: String,
}

impl ThetaForm {
    /// `ϑ² − ε²(ϑ+1)²`, expanded.
    pub fn energy_operator() -> Self {
        let e2 = Polynomial::from_ints(&[0, 0, 1]);
        Self {
            theta2: RationalFunction::polynomial(Polynomial::from_ints(&[1, 0, -1])),
            theta1: RationalFunction::polynomial(e2.scale(&int(-2))),
            theta0: RationalFunction::polynomial(-&e2),
            variable: "epsilon".into(),
        }
    }

    /// Divide through by the `Θ²` coefficient.
    pub fn normalized(&self) -> Result<Self> {
        Ok(Self {
            theta2: RationalFunction::constant(Rational::one()),
            theta1: self.theta1.checked_div(&self.theta2)?,
            theta0: self.theta0.checked_div(&self.theta2)?,
            variable: self.variable.clone(),
        })
    }

    /// `Θ² − Θ = x²D²`, so `p = (θ₁/θ₂ + 1)/x`, `r = θ₀/(θ₂ x²)`.
    pub fn to_ode(&self) -> Result<LinearODE2> {
        let n = self.normalized()?;
        let x = RationalFunction::x();
        let one = RationalFunction::constant(Rational::one());
        let p = (&n.theta1 + &one).checked_div(&x)?;
        let r = n.theta0.checked_div(&(&x * &x))?;
        Ok(LinearODE2::new(p, r, self.variable.clone()))
    }

    pub fn display(&self) -> String {
        let v = &self.variable;
        format!(
            "[{}]Θ² + [{}]Θ + [{}]",
            self.theta2.display(v),
            self.theta1.display(v),
            self.theta0.display(v)
        )
    }
}

impl PartialEq for ThetaForm {
    fn eq(&self, other: &Self) -> bool {
        match (self.normalized(), other.normalized()) {
            (Ok(a), Ok(b)) => a.theta1 == b.theta1 && a.theta0 == b.theta0,
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON wire format

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalFunctionJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

/// `{"p": {"num": [...], "den": [...]}, "r": {...}, "variable": "k"}`,
/// coefficients as exact strings in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeJson {
    pub p: RationalFunctionJson,
    pub r: RationalFunctionJson,
    pub variable: String,
}

impl From<&RationalFunction> for RationalFunctionJson {
    fn from(f: &RationalFunction) -> Self {
        let enc = |p: &Polynomial| p.coeffs().iter().map(format_rational).collect();
        Self {
            num: enc(f.num()),
            den: enc(f.den()),
        }
    }
}

impl TryFrom<&RationalFunctionJson> for RationalFunction {
    type Error = OdeError;
    fn try_from(j: &RationalFunctionJson) -> Result<Self> {
        let dec = |v: &[String]| -> Result<Polynomial> {
            Ok(Polynomial::new(
                v.iter().map(|s| parse_rational(s)).collect::<std::result::Result<_, _>>()?,
            ))
        };
        Ok(RationalFunction::new(dec(&j.num)?, dec(&j.den)?)?)
    }
}

impl LinearODE2 {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(OdeJson {
            p: (&self.p).into(),
            r: (&self.r).into(),
            variable: self.variable.clone(),
        })
        .expect("ode json")
    }
}

pub fn parse_ode_json(input: &str) -> Result<LinearODE2> {
    let j: OdeJson = serde_json::from_str(input)
        .map_err(|e| OdeError::Series(SeriesError::Parse(e.to_string())))?;
    if j.variable.is_empty() {
        return Err(SeriesError::Parse("empty variable name".into()).into());
    }
    Ok(LinearODE2::new(
        RationalFunction::try_from(&j.p)?,
        RationalFunction::try_from(&j.r)?,
        j.variable,
    ))
}
