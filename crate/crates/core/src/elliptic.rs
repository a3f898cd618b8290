//! Complete elliptic integrals via the arithmetic-geometric mean, Landen
//! transformations, nome and period ratio, and the density of states.
//!
//! Conventions: `k` is the modulus (not the parameter `m = k²`), the
//! half-period ratio is `τ = i·K(k')/K(k)` and the nome is `q = e^{iπτ}`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EllipticError {
    #[error("AGM needs positive arguments, got ({0}, {1})")]
    NonPositive(f64, f64),
    #[error("modulus {0} outside the admissible range")]
    ModulusOutOfRange(f64),
    #[error("energy level {0} outside (0, 1]; epsilon = 0 is the singular I2 fiber")]
    EnergyOutOfRange(f64),
    #[error("periods a = {a}, b = {b} must be coprime positive integers")]
    InvalidPeriods { a: u64, b: u64 },
    #[error("hypergeometric argument {0} outside [0, 1)")]
    ArgumentOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, EllipticError>;

const AGM_MAX_ITER: usize = 64;

/// Arithmetic-geometric mean, iterated until `|a − b| ≤ 1e-16·a`.
pub fn agm(a0: f64, b0: f64) -> Result<f64> {
    if !(a0 > 0.0 && b0 > 0.0) || !a0.is_finite() || !b0.is_finite() {
        return Err(EllipticError::NonPositive(a0, b0));
    }
    let (mut a, mut b) = (a0, b0);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Ok(a)
}

/// A modulus together with its complement, `k² + k'² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    pub k: f64,
    pub k_prime: f64,
}

impl Modulus {
    /// `0 ≤ k < 1`.
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(EllipticError::ModulusOutOfRange(k));
        }
        Ok(Self {
            k,
            k_prime: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    /// Both parts supplied, e.g. when `k'` is known in closed form.
    pub fn from_pair(k: f64, k_prime: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) || !(0.0..=1.0).contains(&k_prime) || k_prime == 0.0 {
            return Err(EllipticError::ModulusOutOfRange(k));
        }
        Ok(Self { k, k_prime })
    }

    pub fn complement(&self) -> Result<Self> {
        Self::from_pair(self.k_prime, self.k)
    }

    /// Quarter period `K(k)`.
    pub fn quarter_period(&self) -> f64 {
        FRAC_PI_2 / agm(1.0, self.k_prime).expect("k' > 0")
    }

    /// `(K, E)` from one AGM run: `E = K·(1 − Σ 2^{n−1} c_n²)`, `c₀ = k`.
    pub fn first_and_second_kind(&self) -> (f64, f64) {
        let (mut a, mut b) = (1.0_f64, self.k_prime);
        let mut c = self.k;
        let mut sum = 0.5 * c * c;
        let mut weight = 0.5;
        for _ in 0..AGM_MAX_ITER {
            if (a - b).abs() <= 1e-16 * a {
                break;
            }
            c = 0.5 * (a - b);
            (a, b) = (0.5 * (a + b), (a * b).sqrt());
            weight *= 2.0;
            sum += weight * c * c;
        }
        let k = FRAC_PI_2 / a;
        (k, k * (1.0 - sum))
    }
}

pub fn ellip_k(k: f64) -> Result<f64> {
    Ok(Modulus::new(k)?.quarter_period())
}

pub fn ellip_e(k: f64) -> Result<f64> {
    Ok(Modulus::new(k)?.first_and_second_kind().1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandenDirection {
    /// `k ↦ 2√k/(1+k)`, halving the period ratio.
    Ascend,
    /// Inverse of [`LandenDirection::Ascend`].
    Descend,
}

pub fn landen(k: f64, direction: LandenDirection) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(EllipticError::ModulusOutOfRange(k));
    }
    Ok(match direction {
        LandenDirection::Ascend => landen_ascend(k).k,
        LandenDirection::Descend => {
            // (1 − k')/(1 + k') = (k/(1 + k'))², without the cancellation
            let kp = ((1.0 - k) * (1.0 + k)).sqrt();
            let r = k / (1.0 + kp);
            r * r
        }
    })
}

/// Ascending Landen image with its complement `k₁' = (1−k)/(1+k)` in closed
/// form.
pub fn landen_ascend(k: f64) -> Modulus {
    Modulus {
        k: 2.0 * k.sqrt() / (1.0 + k),
        k_prime: (1.0 - k) / (1.0 + k),
    }
}

/// Imaginary part of `τ = i·K'/K`.
pub fn period_ratio(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(EllipticError::ModulusOutOfRange(k));
    }
    Ok(period_ratio_of(&Modulus::new(k)?))
}

/// `+∞` at `k = 0`.
pub fn period_ratio_of(m: &Modulus) -> f64 {
    if m.k == 0.0 {
        return f64::INFINITY;
    }
    let kk = FRAC_PI_2 / agm(1.0, m.k_prime).expect("k' > 0");
    let kk_prime = FRAC_PI_2 / agm(1.0, m.k).expect("k > 0");
    kk_prime / kk
}

/// `q = exp(−π K'/K)`.
pub fn nome(k: f64) -> Result<f64> {
    Ok((-PI * period_ratio(k)?).exp())
}

/// `0` at `k = 0`.
pub fn nome_of(m: &Modulus) -> f64 {
    (-PI * period_ratio_of(m)).exp()
}

/// Energy level and lattice periods entering the density of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DosParams {
    epsilon: f64,
    a: u64,
    b: u64,
}

impl DosParams {
    /// `0 < ε ≤ 1`, `a, b ≥ 1` coprime.
    pub fn new(epsilon: f64, a: u64, b: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(EllipticError::EnergyOutOfRange(epsilon));
        }
        if a == 0 || b == 0 || a.gcd(&b) != 1 {
            return Err(EllipticError::InvalidPeriods { a, b });
        }
        Ok(Self { epsilon, a, b })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `k = (1−ε)/(1+ε)`.
    pub fn modulus(&self) -> Modulus {
        let e = self.epsilon;
        let k = (1.0 - e) / (1.0 + e);
        Modulus {
            k,
            k_prime: 2.0 * e.sqrt() / (1.0 + e),
        }
    }

    /// `1/(2π²ab)`.
    pub fn prefactor(&self) -> f64 {
        1.0 / (2.0 * PI * PI * (self.a * self.b) as f64)
    }
}

/// `(1+k)·K(k) / (2π²ab)` with `k = (1−ε)/(1+ε)`.
pub fn dos_value(p: &DosParams) -> f64 {
    let m = p.modulus();
    p.prefactor() * (1.0 + m.k) * m.quarter_period()
}

/// The same density through the ascending Landen image:
/// `K(2√k/(1+k)) / (2π²ab)`.
pub fn dos_value_landen(p: &DosParams) -> f64 {
    let m = p.modulus();
    p.prefactor() * landen_ascend(m.k).quarter_period()
}

/// `₂F₁(½, ½; 1; m)` by direct summation with the term ratio
/// `(n+½)²/(n+1)²·m`.
pub fn hyp2f1_half(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(EllipticError::ArgumentOutOfRange(m));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for n in 0..200_000u32 {
        let nf = f64::from(n);
        term *= (nf + 0.5) * (nf + 0.5) / ((nf + 1.0) * (nf + 1.0)) * m;
        sum += term;
        // remaining tail is bounded by term·m/(1−m)
        if term * m / (1.0 - m) <= 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn agm_basics() {
        assert_eq!(agm(1.0, 1.0).unwrap(), 1.0);
        assert!(agm(0.0, 1.0).is_err());
        assert!(agm(-1.0, 1.0).is_err());
        // fixed-iteration oracle
        let (mut a, mut b) = (1.0_f64, 0.5_f64);
        for _ in 0..10 {
            (a, b) = (0.5 * (a + b), (a * b).sqrt());
        }
        assert!(close(agm(1.0, 0.5).unwrap(), a, 1e-15));
        assert!(close(agm(1.0, 0.5).unwrap(), b, 1e-15));
    }

    #[test]
    fn k_against_hypergeometric_series() {
        // K(k) = π/2 Σ [(2n)!/(2^{2n} n!²)]² k^{2n}
        let k = 0.1_f64;
        let mut c = 1.0;
        let mut sum = 0.0;
        for n in 0..40 {
            if n > 0 {
                let nf = n as f64;
                c *= (2.0 * nf - 1.0) / (2.0 * nf);
            }
            sum += c * c * k.powi(2 * n);
        }
        assert!(close(ellip_k(k).unwrap(), FRAC_PI_2 * sum, 1e-13));
    }

    #[test]
    fn degenerate_values() {
        assert_eq!(ellip_k(0.0).unwrap(), FRAC_PI_2);
        assert!(close(ellip_e(0.0).unwrap(), FRAC_PI_2, 1e-16));
        assert!(ellip_k(1.0).is_err());
        assert!(ellip_e(-0.1).is_err());
    }

    #[test]
    fn landen_inverse_pair() {
        // descend is ill-conditioned as its argument approaches 1, so the
        // round trip through an ascended value is only checked below k = 0.95
        for k in [0.01, 0.2, 0.5, 0.8, 0.9, 0.95] {
            let up = landen(k, LandenDirection::Ascend).unwrap();
            let back = landen(up, LandenDirection::Descend).unwrap();
            assert!(close(back, k, 1e-14), "{k} -> {back}");
        }
        for k1 in [0.01, 0.2, 0.5, 0.8, 0.99, 0.999] {
            let down = landen(k1, LandenDirection::Descend).unwrap();
            let back = landen(down, LandenDirection::Ascend).unwrap();
            assert!(close(back, k1, 1e-14), "{k1} -> {back}");
        }
        assert!(landen(0.0, LandenDirection::Ascend).is_err());
        assert!(landen(1.0, LandenDirection::Descend).is_err());
    }

    #[test]
    fn nome_vanishes_at_zero_modulus() {
        assert_eq!(nome_of(&Modulus::new(0.0).unwrap()), 0.0);
        assert!(nome(0.0).is_err());
    }

    #[test]
    fn self_complementary_point() {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(period_ratio(k).unwrap(), 1.0, 1e-14));
        assert!(close(nome(k).unwrap(), (-PI).exp(), 1e-14));
    }

    #[test]
    fn dos_params_validation() {
        assert!(DosParams::new(0.0, 2, 3).is_err());
        assert!(DosParams::new(1.2, 2, 3).is_err());
        assert!(DosParams::new(0.5, 2, 4).is_err());
        assert!(DosParams::new(0.5, 0, 3).is_err());
        assert!(DosParams::new(0.5, 4, 9).is_ok());
        let p = DosParams::new(1.0, 2, 3).unwrap();
        assert!(close(dos_value(&p), 1.0 / (4.0 * PI * 6.0), 1e-15));
    }

    #[test]
    fn hypergeometric() {
        assert_eq!(hyp2f1_half(0.0).unwrap(), 1.0);
        assert!(hyp2f1_half(1.0).is_err());
        let m = 0.25_f64;
        assert!(close(FRAC_PI_2 * hyp2f1_half(m).unwrap(), ellip_k(m.sqrt()).unwrap(), 1e-12));
        let m = 0.9_f64;
        assert!(close(FRAC_PI_2 * hyp2f1_half(m).unwrap(), ellip_k(m.sqrt()).unwrap(), 1e-13));
    }
}
