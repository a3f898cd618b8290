use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use spectral_pf::exactseries::{format_rational, parse_rational, parse_series_json, rat, ExactSeries};
use spectral_pf::ode::{parse_ode_json, LinearODE2};

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn series(var: &'static str, len: std::ops::Range<usize>) -> impl Strategy<Value = ExactSeries> {
    (0i64..3, prop::collection::vec(rational(), len))
        .prop_map(move |(v, c)| ExactSeries::from_coeffs(var, v, c))
}

/// `c₁x + c₂x² + …` with `c₁ ≠ 0`, known through `x^8`.
fn invertible() -> impl Strategy<Value = ExactSeries> {
    (rational().prop_filter("nonzero", |c| !c.is_zero()), prop::collection::vec(rational(), 7)).prop_map(|(c1, rest)| {
        let mut c = vec![c1];
        c.extend(rest);
        ExactSeries::from_coeffs("x", 1, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in series("x", 1..7), b in series("x", 1..7), c in series("x", 1..7)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn multiplication_distributes(a in series("x", 1..7), b in series("x", 1..7), c in series("x", 1..7)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn log_inverts_exp(f in series("x", 1..8)) {
        let f = f.shift(1);
        let g = f.exp().unwrap().log().unwrap();
        prop_assert_eq!(g, f.truncate(f.order()));
    }

    #[test]
    fn series_json_roundtrip(a in series("k", 1..10)) {
        let text = a.to_json().to_string();
        prop_assert_eq!(parse_series_json(&text).unwrap(), a);
    }

    #[test]
    fn rational_text_roundtrip(q in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn reversion_roundtrip(f in invertible()) {
        let g = f.reverse().unwrap();
        prop_assert_eq!(f.compose(&g).unwrap(), ExactSeries::var("x", 8));
        prop_assert_eq!(g.compose(&f).unwrap(), ExactSeries::var("x", 8));
    }
}

#[test]
fn ode_json_roundtrip() {
    for ode in [
        LinearODE2::dos_equation(),
        LinearODE2::legendre_family(),
        LinearODE2::quarter_period_equation("epsilon"),
    ] {
        let text = ode.to_json().to_string();
        assert_eq!(parse_ode_json(&text).unwrap(), ode);
    }
}

#[test]
fn legendre_family_frobenius() {
    let ode = LinearODE2::legendre_family();
    let (y1, y2) = ode.frobenius_solutions(20).unwrap();
    assert!(ode.apply(&y1).unwrap().is_zero());
    assert!(ode.apply(&y2).unwrap().is_zero());
    // ₂F₁(½,½;1;λ) = Σ (C(2n,n)/4ⁿ)² λⁿ
    assert_eq!(y1.coeff(1), rat(1, 4));
    assert_eq!(y1.coeff(2), rat(9, 64));
    assert_eq!(y1.coeff(3), rat(25, 256));
}
