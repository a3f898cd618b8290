//! Mirror map `Q = exp(D₂/D₁)` of the density-of-states equation, its
//! inverse, the energy level as a series in `Q`, and instanton numbers.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactseries::{
    format_rational, int, rat, schwarzian_of_logpair, ExactSeries, LogPair, Rational, SeriesError,
};
use crate::modular::{QExpansion, HALF_NOME};
use crate::ode::{LinearODE2, OdeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MirrorError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Precondition(&'static str),
    #[error("instanton number n_{d} = {value} is not an integer")]
    NonIntegral { d: u64, value: String },
}

pub type Result<T> = std::result::Result<T, MirrorError>;

pub const MIN_ORDER: i64 = 8;

/// `[Q⁶] ε(Q)` as tabulated in the literature, kept only for comparison.
pub fn tabulated_q6() -> Rational {
    rat(11, 64)
}

#[derive(Clone, Debug)]
pub struct MirrorData {
    pub d1: ExactSeries,
    pub d2: LogPair,
    /// `(D₂/D₁)'`, a Laurent series `1/k + ...`.
    pub t_prime: ExactSeries,
    pub q_of_k: ExactSeries,
    /// In the variable `Q`.
    pub k_of_q: ExactSeries,
    /// In the variable `Q`.
    pub eps_of_q: ExactSeries,
}

/// `(1 − k)/(1 + k) = 1 + 2Σ (−1)ⁿ kⁿ`.
pub fn epsilon_of_modulus(var: &str, order: i64) -> ExactSeries {
    let c = (0..=order)
        .map(|n| match n {
            0 => int(1),
            n if n % 2 == 0 => int(2),
            _ => int(-2),
        })
        .collect();
    ExactSeries::from_coeffs(var, 0, c)
}

pub fn build_mirror(order: i64) -> Result<MirrorData> {
    if order < MIN_ORDER {
        return Err(MirrorError::Precondition("build_mirror needs order >= 8"));
    }
    let ode = LinearODE2::dos_equation();
    let (d1, d2) = ode.frobenius_solutions(order as usize)?;
    let ratio = d2.analytic_part().checked_div(&d1)?;
    let q_of_k = ratio.exp()?.shift(1).truncate(order).with_start(0);
    let t_prime = d2.quotient_derivative(&d1)?;
    debug_assert!(t_prime.log_part().is_zero());
    let k_of_q = q_of_k.reverse()?.rename("Q");
    let eps_of_q = epsilon_of_modulus("k", order).compose(&k_of_q)?;
    Ok(MirrorData {
        d1,
        t_prime: t_prime.analytic_part().clone(),
        d2,
        q_of_k,
        k_of_q,
        eps_of_q,
    })
}

impl MirrorData {
    /// `ε` with `Q = 4s`, `s = q^{1/2}`.
    pub fn epsilon_of_sqrtq(&self) -> QExpansion {
        let s = self.eps_of_q.rescale_variable(&int(4)).rename(HALF_NOME);
        QExpansion::new(s).expect("variable is the half nome")
    }

    pub fn q6_comparison(&self) -> Option<Q6Comparison> {
        let computed = self.eps_of_q.try_coeff(6)?;
        let tabulated = tabulated_q6();
        Some(Q6Comparison {
            agrees: computed == tabulated,
            computed: format_rational(&computed),
            tabulated: format_rational(&tabulated),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Q6Comparison {
    pub computed: String,
    pub tabulated: String,
    pub agrees: bool,
}

pub fn epsilon_of_sqrtq(order: i64) -> Result<QExpansion> {
    if order < 4 {
        return Err(MirrorError::Precondition("epsilon_of_sqrtq needs order >= 4"));
    }
    let m = build_mirror(order.max(MIN_ORDER))?;
    let s = m.epsilon_of_sqrtq();
    Ok(QExpansion::new(s.series().truncate(order))?)
}

/// `1 − 8 Σ cₙ (Q/4)ⁿ` for the given `cₙ`, `n ≥ 1`.
pub fn rescaled_form(c: &[i64], order: i64) -> ExactSeries {
    let mut coeffs = vec![int(1)];
    for (i, &cn) in c.iter().enumerate() {
        let n = i as i32 + 1;
        coeffs.push(int(-8 * cn) / Rational::from_integer(BigInt::from(4).pow(n as u32)));
    }
    ExactSeries::from_coeffs("Q", 0, coeffs).pad(order)
}

pub fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstantonTable {
    /// `n_d` for `d = 1..=d_max`, stored at index `d − 1`.
    pub numbers: Vec<BigInt>,
}

impl InstantonTable {
    pub fn get(&self, d: u64) -> Option<&BigInt> {
        self.numbers.get((d as usize).checked_sub(1)?)
    }

    pub fn d_max(&self) -> u64 {
        self.numbers.len() as u64
    }

    /// `{"1": "-8", "2": "40", ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .numbers
            .iter()
            .enumerate()
            .map(|(i, n)| ((i + 1).to_string(), serde_json::Value::String(n.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }
}

/// `n_d` with `ε = 1 + Σ n_d s^d/(1 − s^d)`, by Möbius inversion of
/// `[s^N] ε = Σ_{d | N} n_d`.
pub fn instanton_numbers(eps: &QExpansion, d_max: u64) -> Result<InstantonTable> {
    let s = eps.series();
    if s.normalized().valuation() != 0 || !s.coeff(0).is_one() {
        return Err(MirrorError::Precondition("series must have constant term 1"));
    }
    if d_max == 0 || d_max as i64 > s.order() {
        return Err(MirrorError::Precondition("d_max must lie in 1..=order"));
    }
    let mut numbers = Vec::with_capacity(d_max as usize);
    for n in 1..=d_max {
        let mut acc = Rational::zero();
        for d in (1..=n).filter(|d| n % d == 0) {
            let mu = mobius(n / d);
            if mu != 0 {
                acc += s.coeff(d as i64) * int(mu);
            }
        }
        if !acc.is_integer() {
            return Err(MirrorError::NonIntegral { d: n, value: format_rational(&acc) });
        }
        numbers.push(acc.to_integer());
    }
    Ok(InstantonTable { numbers })
}

/// `1 + Σ n_d s^d/(1 − s^d)` through `s^order`.
pub fn lambert_resum(table: &InstantonTable, order: i64) -> ExactSeries {
    let mut c = vec![Rational::zero(); (order + 1) as usize];
    c[0] = Rational::one();
    for (i, n) in table.numbers.iter().enumerate() {
        let d = i + 1;
        for m in (d..=order as usize).step_by(d) {
            c[m] += Rational::from_integer(n.clone());
        }
    }
    ExactSeries::from_coeffs(HALF_NOME, 0, c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchwarzianReport {
    pub order: i64,
    /// Largest exponent through which `{t, k}` and `2Q` agree coefficientwise.
    pub agreement_order: i64,
    pub first_mismatch: Option<i64>,
}

/// Compares `{t, x}` for `t = D₂/D₁` with `2Q` of `ode`, coefficient by
/// coefficient, starting from the lower of the two valuations.
pub fn schwarzian_agreement(ode: &LinearODE2, d1: &ExactSeries, d2: &LogPair) -> Result<SchwarzianReport> {
    let t_prime = d2.quotient_derivative(d1)?;
    if !t_prime.log_part().is_zero() {
        return Err(MirrorError::Precondition("log part of D2 must equal D1"));
    }
    let lhs = schwarzian_of_logpair(t_prime.analytic_part())?;
    let rhs = ode.schwarzian_rhs().to_laurent(ode.variable(), lhs.order());
    let top = lhs.order().min(rhs.order());
    let bottom = lhs.normalized().valuation().min(rhs.normalized().valuation()).min(top);
    let first_mismatch = (bottom..=top).find(|&e| lhs.coeff(e) != rhs.coeff(e));
    Ok(SchwarzianReport {
        order: top,
        agreement_order: first_mismatch.map_or(top, |e| e - 1),
        first_mismatch,
    })
}

pub fn schwarzian_crosscheck(order: i64) -> Result<SchwarzianReport> {
    if order < 12 {
        return Err(MirrorError::Precondition("schwarzian_crosscheck needs order >= 12"));
    }
    let ode = LinearODE2::dos_equation();
    let (d1, d2) = ode.frobenius_solutions(order as usize)?;
    schwarzian_agreement(&ode, &d1, &d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactseries::RationalFunction;
    use crate::modular::epsilon_sq_qexp;

    fn odd(s: &ExactSeries, n: usize) -> Vec<Rational> {
        (0..n).map(|i| s.coeff(2 * i as i64 + 1)).collect()
    }

    #[test]
    fn mirror_and_inverse() {
        let m = build_mirror(16).unwrap();
        assert_eq!(m.q_of_k.order(), 16);
        assert_eq!(odd(&m.q_of_k, 4), [rat(1, 1), rat(1, 4), rat(17, 128), rat(45, 512)]);
        assert!((0..=16).step_by(2).all(|e| m.q_of_k.coeff(e).is_zero()));
        assert_eq!(odd(&m.k_of_q, 4), [rat(1, 1), rat(-1, 4), rat(7, 128), rat(-5, 512)]);
        let id = m.q_of_k.compose(&m.k_of_q).unwrap();
        assert_eq!(id, ExactSeries::var("Q", 16));
        let id = m.k_of_q.rename("k").compose(&m.q_of_k).unwrap();
        assert_eq!(id, ExactSeries::var("k", 16));
    }

    #[test]
    fn energy_level_in_q() {
        let m = build_mirror(10).unwrap();
        let expected = [rat(1, 1), rat(-2, 1), rat(2, 1), rat(-3, 2), rat(1, 1), rat(-39, 64)];
        for (i, c) in expected.iter().enumerate() {
            assert_eq!(&m.eps_of_q.coeff(i as i64), c, "Q^{i}");
        }
        let rescaled = rescaled_form(&[1, -4, 12, -32, 78], 5);
        assert_eq!(m.eps_of_q.truncate(5), rescaled);
        let cmp = m.q6_comparison().unwrap();
        assert_eq!(cmp.computed, "11/32");
        assert!(!cmp.agrees);
    }

    #[test]
    fn sqrtq_series() {
        let e = epsilon_of_sqrtq(8).unwrap();
        assert_eq!(
            e.series(),
            &ExactSeries::from_ints("s", 0, &[1, -8, 32, -96, 256, -624, 1408, -3008, 6144])
        );
        let sq = e.series() * e.series();
        let from_thetas = epsilon_sq_qexp(8).unwrap();
        assert_eq!(&sq, from_thetas.series());
        assert!(epsilon_of_sqrtq(3).is_err());
    }

    #[test]
    fn sqrt_of_theta_side_matches() {
        let eps2 = epsilon_sq_qexp(20).unwrap();
        let root = eps2.series().sqrt().unwrap();
        assert_eq!(&root, epsilon_of_sqrtq(20).unwrap().series());
    }

    #[test]
    fn instantons() {
        let e = epsilon_of_sqrtq(20).unwrap();
        let t = instanton_numbers(&e, 20).unwrap();
        assert_eq!(t.get(1), Some(&BigInt::from(-8)));
        assert_eq!(t.get(2), Some(&BigInt::from(40)));
        assert_eq!(&lambert_resum(&t, 20), e.series());
        assert!(instanton_numbers(&e, 21).is_err());
    }

    #[test]
    fn non_integral_instanton_is_an_error() {
        let s = ExactSeries::from_coeffs("s", 0, vec![int(1), rat(1, 2), int(0)]);
        let err = instanton_numbers(&QExpansion::new(s).unwrap(), 2).unwrap_err();
        assert!(matches!(err, MirrorError::NonIntegral { d: 1, .. }));
    }

    #[test]
    fn mobius_values() {
        let mu: Vec<i64> = (1..=12).map(mobius).collect();
        assert_eq!(mu, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn schwarzian_agrees_for_dos_equation() {
        let r = schwarzian_crosscheck(20).unwrap();
        assert_eq!(r.first_mismatch, None);
        assert!(r.agreement_order >= 16);
    }

    #[test]
    fn schwarzian_euler_equation() {
        // y'' + y'/x = 0: D₁ = 1, D₂ = ln x
        let p = RationalFunction::from_ints(&[1], &[0, 1]).unwrap();
        let ode = LinearODE2::new(p, RationalFunction::zero(), "x");
        let (d1, d2) = ode.frobenius_solutions(12).unwrap();
        assert_eq!(d1, ExactSeries::one("x", 12));
        let r = schwarzian_agreement(&ode, &d1, &d2).unwrap();
        assert_eq!(r.first_mismatch, None);
    }

    #[test]
    fn schwarzian_negative_control() {
        let ode = LinearODE2::dos_equation();
        let (d1, d2) = ode.frobenius_solutions(20).unwrap();
        let bumped = d2.analytic_part() + &ExactSeries::monomial("k", int(1), 5, 20);
        let d2 = LogPair::new(d1.clone(), bumped).unwrap();
        let r = schwarzian_agreement(&ode, &d1, &d2).unwrap();
        assert!(r.first_mismatch.unwrap() <= 6, "{r:?}");
    }
}
