//! Theta constants, the lambda function and related q-expansions.
//!
//! Nome convention: `q = e^{iπτ}`. Expansions of the energy level use the
//! half nome `s = q^{1/2}` as series variable.

use std::f64::consts::PI;

use crate::exactseries::{int, ExactSeries, Polynomial, RationalFunction, Result, SeriesError};

pub const HALF_NOME: &str = "s";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theta {
    Two,
    Three,
    Four,
}

impl Theta {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            2 => Some(Self::Two),
            3 => Some(Self::Three),
            4 => Some(Self::Four),
            _ => None,
        }
    }
}

/// An [`ExactSeries`] in the half nome `s = q^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion(ExactSeries);

impl QExpansion {
    pub fn new(series: ExactSeries) -> Result<Self> {
        if series.variable() != HALF_NOME {
            return Err(SeriesError::VariableMismatch {
                left: HALF_NOME.into(),
                right: series.variable().into(),
            });
        }
        Ok(Self(series))
    }

    pub fn series(&self) -> &ExactSeries {
        &self.0
    }

    pub fn into_series(self) -> ExactSeries {
        self.0
    }

    pub fn order(&self) -> i64 {
        self.0.order()
    }

    /// Value at nome `q`, i.e. at `s = sqrt(q)`.
    pub fn eval_at_nome(&self, q: f64) -> f64 {
        self.0.eval_f64(q.sqrt())
    }
}

/// `Σ_{n ∈ S} q^{f(n)}` for a quadratic exponent sequence, as a polynomial
/// known through `q^order`.
fn lacunary(var: &str, order: i64, exponents: impl Iterator<Item = (i64, i64)>) -> ExactSeries {
    let mut c = vec![int(0); (order + 1) as usize];
    for (e, w) in exponents.take_while(|&(e, _)| e <= order) {
        c[e as usize] += int(w);
    }
    ExactSeries::from_coeffs(var, 0, c)
}

/// `θ₂⁴`, `θ₃⁴` or `θ₄⁴` in `nome_var`, known through `q^order`. For `θ₂` the
/// factor `q^{1/4}` is taken out before raising to the fourth power, so the
/// result is `q·(2Σ_{n≥0} q^{n(n+1)})⁴`.
pub fn theta_fourth(which: Theta, order: i64, nome_var: &str) -> Result<ExactSeries> {
    if order < 1 {
        return Err(SeriesError::Precondition("theta_fourth needs order >= 1"));
    }
    let base = match which {
        Theta::Three => lacunary(
            nome_var,
            order,
            (0..).map(|n: i64| (n * n, if n == 0 { 1 } else { 2 })),
        ),
        Theta::Four => lacunary(
            nome_var,
            order,
            (0..).map(|n: i64| (n * n, if n == 0 { 1 } else if n % 2 == 0 { 2 } else { -2 })),
        ),
        Theta::Two => lacunary(nome_var, order - 1, (0..).map(|n: i64| (n * (n + 1), 2))),
    };
    let fourth = base.powi(4)?;
    Ok(match which {
        Theta::Two => fourth.shift(1).with_start(0),
        _ => fourth,
    })
}

/// `λ = θ₂⁴/θ₃⁴` in `q`.
pub fn lambda_qexp(order: i64) -> Result<ExactSeries> {
    let t2 = theta_fourth(Theta::Two, order, "q")?;
    let t3 = theta_fourth(Theta::Three, order, "q")?;
    Ok(t2.checked_div(&t3)?.pad(order).with_start(0))
}

/// `ε² = 1 − λ` with the nome replaced by the half nome.
pub fn epsilon_sq_qexp(order: i64) -> Result<QExpansion> {
    if order < 2 {
        return Err(SeriesError::Precondition("epsilon_sq_qexp needs order >= 2"));
    }
    let lambda = lambda_qexp(order)?;
    let one = ExactSeries::one("q", order);
    QExpansion::new(one.checked_sub(&lambda)?.rename(HALF_NOME))
}

/// `256(1−x+x²)³ / (x²(1−x)²)`, the j-invariant as a function of `λ = x`.
pub fn j_of_lambda() -> RationalFunction {
    let inner = Polynomial::from_ints(&[1, -1, 1]);
    let den = &Polynomial::from_ints(&[0, 0, 1]) * &Polynomial::from_ints(&[1, -1]).pow(2);
    RationalFunction::new(inner.pow(3).scale(&int(256)), den).expect("nonzero denominator")
}

/// `256(x⁴−x²+1)³ / (x⁴(x²−1)²)` in `x = ε`.
pub fn j_of_epsilon() -> RationalFunction {
    let inner = Polynomial::from_ints(&[1, 0, -1, 0, 1]);
    let den = &Polynomial::from_ints(&[0, 0, 0, 0, 1]) * &Polynomial::from_ints(&[-1, 0, 1]).pow(2);
    RationalFunction::new(inner.pow(3).scale(&int(256)), den).expect("nonzero denominator")
}

/// `16(x⁴−16x²+16)³ / (x⁸(1−x²))` in `x = ε`, evaluated at the doubled period.
pub fn j_of_epsilon_doubled() -> RationalFunction {
    let inner = Polynomial::from_ints(&[16, 0, -16, 0, 1]);
    let den = &Polynomial::from_ints(&[0, 0, 0, 0, 0, 0, 0, 0, 1]) * &Polynomial::from_ints(&[1, 0, -1]);
    RationalFunction::new(inner.pow(3).scale(&int(16)), den).expect("nonzero denominator")
}

/// `j = 256(1−λ+λ²)³/(λ²(1−λ)²)` as a Laurent series in `q = e^{iπτ}`.
///
/// In this nome the series starts `q^{-2} + 744 + 196884 q² + ...`: only even
/// powers occur, and `q²` is the usual `e^{2πiτ}`.
pub fn j_from_hauptmodul(order: i64) -> Result<ExactSeries> {
    if order < 1 {
        return Err(SeriesError::Precondition("j_from_hauptmodul needs order >= 1"));
    }
    let lambda = lambda_qexp(order + 4)?;
    let one = ExactSeries::one("q", order + 4);
    let one_minus = one.checked_sub(&lambda)?;
    let num = one_minus.checked_add(&lambda.powi(2)?)?.powi(3)?.scale(&int(256));
    let den = lambda.checked_mul(&one_minus)?.powi(2)?;
    Ok(num.checked_div(&den)?.truncate(order))
}

/// Real-nome evaluation of `θ₂, θ₃, θ₄` by direct summation, `0 ≤ q < 1`.
pub fn theta_f64(which: Theta, q: f64) -> f64 {
    let mut acc = match which {
        Theta::Two => 0.0,
        _ => 1.0,
    };
    for n in 0..10_000i64 {
        let (term, done) = match which {
            Theta::Two => {
                let x = n as f64 + 0.5;
                let t = 2.0 * q.powf(x * x);
                (t, t < 1e-18)
            }
            Theta::Three | Theta::Four => {
                if n == 0 {
                    continue;
                }
                let t = 2.0 * q.powi((n * n) as i32);
                let sign = if which == Theta::Four && n % 2 == 1 { -1.0 } else { 1.0 };
                (sign * t, t < 1e-18)
            }
        };
        acc += term;
        if done {
            break;
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambertSum {
    pub value: f64,
    /// Bound on the omitted terms `n > terms`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `(1/(2π²ab))·[π/2 + 2π Σ_{n=1}^{terms} q₁ⁿ/(1+q₁^{2n})]`.
pub fn lambert_dos(q1: f64, a: u64, b: u64, terms: usize) -> LambertSum {
    assert!((0.0..1.0).contains(&q1), "nome must lie in [0, 1)");
    let pre = 1.0 / (2.0 * PI * PI * (a * b) as f64);
    let mut sum = 0.0;
    let mut qn = 1.0;
    for _ in 0..terms {
        qn *= q1;
        sum += qn / (1.0 + qn * qn);
    }
    let tail = if q1 == 0.0 { 0.0 } else { qn * q1 / (1.0 - q1) };
    LambertSum {
        value: pre * (PI / 2.0 + 2.0 * PI * sum),
        tail_bound: pre * 2.0 * PI * tail,
        terms,
    }
}

/// [`lambert_dos`] with enough terms that the tail is below one ulp of the
/// value.
pub fn lambert_dos_converged(q1: f64, a: u64, b: u64) -> LambertSum {
    let mut terms = 16;
    loop {
        let s = lambert_dos(q1, a, b, terms);
        if s.tail_bound <= f64::EPSILON * s.value || terms >= 1 << 20 {
            return s;
        }
        terms *= 2;
    }
}

/// `(1/(4πab))·[1 + 4 Σ q^{n/2}/(1+qⁿ)]` with `q = q₁²`.
pub fn lambert_dos_nome(q: f64, a: u64, b: u64, terms: usize) -> f64 {
    let s = q.sqrt();
    let mut sum = 0.0;
    for n in 1..=terms {
        let sn = s.powi(n as i32);
        sum += sn / (1.0 + sn * sn);
    }
    (1.0 + 4.0 * sum) / (4.0 * PI * (a * b) as f64)
}

/// Leading Laurent coefficients of a series, for reporting.
pub fn leading_coefficients(s: &ExactSeries, count: usize) -> Vec<num_rational::BigRational> {
    let n = s.normalized();
    (n.valuation()..=n.order()).take(count).map(|e| n.coeff(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{ellip_k, landen_ascend, nome, nome_of, DosParams};
    use crate::exactseries::{ratfun_equal, Rational};

    fn r4(n: i64) -> i64 {
        let m = (n as f64).sqrt() as i64 + 1;
        let mut c = 0;
        for a in -m..=m {
            for b in -m..=m {
                for d in -m..=m {
                    let rest = n - a * a - b * b - d * d;
                    if rest < 0 {
                        continue;
                    }
                    let e = (rest as f64).sqrt().round() as i64;
                    if e * e == rest {
                        c += if e == 0 { 1 } else { 2 };
                    }
                }
            }
        }
        c
    }

    #[test]
    fn theta3_counts_four_squares() {
        let t3 = theta_fourth(Theta::Three, 25, "q").unwrap();
        for n in 0..=25 {
            assert_eq!(t3.coeff(n), int(r4(n)), "n = {n}");
        }
    }

    #[test]
    fn theta2_leading() {
        // 16·#{(n₁..n₄) ≥ 0 : Σ nᵢ(nᵢ+1) = m − 1}
        let order = 24;
        let t2 = theta_fourth(Theta::Two, order, "q").unwrap();
        assert_eq!(t2.order(), order);
        let mut counts = vec![0i64; (order + 1) as usize];
        let tri: Vec<i64> = (0..6).map(|n| n * (n + 1)).collect();
        for a in &tri {
            for b in &tri {
                for c in &tri {
                    for d in &tri {
                        let m = a + b + c + d + 1;
                        if m <= order {
                            counts[m as usize] += 16;
                        }
                    }
                }
            }
        }
        for m in 0..=order {
            assert_eq!(t2.coeff(m), int(counts[m as usize]), "q^{m}");
        }
        // odd powers only: 16q + 64q³ + 96q⁵ + ...
        assert_eq!([t2.coeff(1), t2.coeff(3), t2.coeff(5)], [16, 64, 96].map(int));
        assert!((0..=order).step_by(2).all(|m| t2.coeff(m) == int(0)));
    }

    #[test]
    fn jacobi_quartic() {
        let t2 = theta_fourth(Theta::Two, 30, "q").unwrap();
        let t3 = theta_fourth(Theta::Three, 30, "q").unwrap();
        let t4 = theta_fourth(Theta::Four, 30, "q").unwrap();
        assert_eq!(t3, &t2 + &t4);
        assert_eq!(t3.order(), 30);
        assert_eq!((&t2 + &t4).order(), 30);
    }

    #[test]
    fn lambda_and_complement() {
        let l = lambda_qexp(30).unwrap();
        assert_eq!(l.order(), 30);
        assert_eq!(leading_coefficients(&l, 5), [16, -128, 704, -3072, 11488].map(int));
        let t3 = theta_fourth(Theta::Three, 30, "q").unwrap();
        let t4 = theta_fourth(Theta::Four, 30, "q").unwrap();
        let comp = t4.checked_div(&t3).unwrap();
        assert_eq!(&l + &comp, ExactSeries::one("q", 30));
    }

    #[test]
    fn epsilon_sq_matches_printed() {
        let e = epsilon_sq_qexp(5).unwrap();
        let printed: Vec<Rational> = [1, -16, 128, -704, 3072, -11488].into_iter().map(int).collect();
        assert_eq!(e.series(), &ExactSeries::from_coeffs(HALF_NOME, 0, printed));
        assert!(epsilon_sq_qexp(1).is_err());
    }

    #[test]
    fn lambda_series_reproduces_modulus() {
        let l = lambda_qexp(60).unwrap();
        for k in [0.1, 0.3, 0.6] {
            let q = nome(k).unwrap();
            assert!((l.eval_f64(q) - k * k).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn j_substitution_identity() {
        let one_minus_sq = RationalFunction::polynomial(Polynomial::from_ints(&[1, 0, -1]));
        let composed = j_of_lambda().compose(&one_minus_sq).unwrap();
        assert!(ratfun_equal(&composed, &j_of_epsilon()));
        assert_eq!(j_of_lambda().eval(&Rational::new(1.into(), 2.into())), Some(int(1728)));
    }

    /// `E₄³/Δ` in `Q = q²`, independent of the theta pipeline.
    fn j_classical(order: i64) -> ExactSeries {
        let sigma3 = |n: i64| (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum::<i64>();
        let mut e4 = vec![int(1)];
        e4.extend((1..=order).map(|n| int(240 * sigma3(n))));
        let e4 = ExactSeries::from_coeffs("Q", 0, e4);
        let mut eta24 = ExactSeries::one("Q", order);
        for n in 1..=order {
            let mut f = vec![int(0); (order + 1) as usize];
            f[0] = int(1);
            f[n as usize] = int(-1);
            eta24 = eta24.checked_mul(&ExactSeries::from_coeffs("Q", 0, f).powi(24).unwrap()).unwrap();
        }
        e4.powi(3).unwrap().checked_div(&eta24.shift(1)).unwrap()
    }

    #[test]
    fn j_series_matches_classical() {
        let j = j_from_hauptmodul(16).unwrap();
        assert_eq!(j.normalized().valuation(), -2);
        let classical = j_classical(10);
        for e in -2..=16 {
            let expected = if e % 2 == 0 { classical.coeff(e / 2) } else { int(0) };
            assert_eq!(j.coeff(e), expected, "q^{e}");
        }
        assert_eq!(j.coeff(0), int(744));
        assert_eq!(j.coeff(2), int(196884));
    }

    #[test]
    fn second_j_relation_numeric() {
        let eps2 = epsilon_sq_qexp(80).unwrap();
        let j1 = j_of_epsilon();
        let j2 = j_of_epsilon_doubled();
        for q in [0.01, 0.03, 0.05, 0.1] {
            let e_tau = eps2.eval_at_nome(q).sqrt();
            let e_2tau = eps2.eval_at_nome(q * q).sqrt();
            let a = j1.eval_f64(e_tau);
            let b = j2.eval_f64(e_2tau);
            assert!(((a - b) / a).abs() < 1e-8, "q = {q}: {a} vs {b}");
        }
    }

    #[test]
    fn weight_one_theta_identity() {
        for k in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let m1 = landen_ascend(k);
            let q1 = nome_of(&m1);
            let lhs = m1.quarter_period();
            let rhs = PI / 2.0 * theta_f64(Theta::Three, q1).powi(2);
            assert!(((lhs - rhs) / lhs).abs() < 1e-11, "k = {k}");
        }
    }

    #[test]
    fn theta_numeric_jacobi() {
        for q in [0.05, 0.3, 0.7] {
            let t2 = theta_f64(Theta::Two, q).powi(4);
            let t3 = theta_f64(Theta::Three, q).powi(4);
            let t4 = theta_f64(Theta::Four, q).powi(4);
            assert!((t3 - t2 - t4).abs() < 1e-12 * t3);
        }
    }

    #[test]
    fn lambert_matches_elliptic() {
        for eps in [0.2, 0.5, 0.8] {
            let p = DosParams::new(eps, 2, 3).unwrap();
            let q1 = nome_of(&landen_ascend(p.modulus().k));
            let lam = lambert_dos_converged(q1, 2, 3);
            let direct = crate::elliptic::dos_value(&p);
            assert!((lam.value - direct).abs() < 1e-10 * direct, "eps = {eps}");
            let alt = lambert_dos_nome(q1 * q1, 2, 3, lam.terms);
            assert!((alt - lam.value).abs() < 1e-14);
        }
    }

    #[test]
    fn lambert_zero_nome() {
        let s = lambert_dos(0.0, 2, 3, 10);
        assert!((s.value - 1.0 / (4.0 * PI * 6.0)).abs() < 1e-16);
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn ellip_k_consistency_with_theta() {
        let k = 0.4f64;
        let q = nome(k).unwrap();
        let t3 = theta_f64(Theta::Three, q);
        assert!((ellip_k(k).unwrap() - PI / 2.0 * t3 * t3).abs() < 1e-12);
    }
}
