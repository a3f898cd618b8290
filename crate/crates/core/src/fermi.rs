//! Bloch components of the Harper operator, fiber classification of the
//! Fermi curves, and rational-flux spectra.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::monodromy::{branch_points, discriminant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FermiError {
    #[error("Bloch arguments must be nonzero")]
    ZeroArgument,
    #[error("index out of range: {0}")]
    InvalidIndex(&'static str),
    #[error("flux {p}/{q} must satisfy 0 <= p < q with gcd(p, q) = 1")]
    InvalidFlux { p: i64, q: i64 },
    #[error("{0}")]
    Precondition(&'static str),
}

pub type Result<T> = std::result::Result<T, FermiError>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochIndex {
    pub k: i64,
    pub l: i64,
    pub m: i64,
    pub n: i64,
    pub alpha: f64,
    pub beta: f64,
    pub a: u64,
    pub b: u64,
}

impl BlochIndex {
    #[allow(clippy::too_many_arguments)]
    pub fn new(k: i64, l: i64, m: i64, n: i64, alpha: f64, beta: f64, a: u64, b: u64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(FermiError::InvalidIndex("periods a, b must be positive"));
        }
        if !(0..a as i64).contains(&m) || !(0..b as i64).contains(&n) {
            return Err(FermiError::InvalidIndex("need 0 <= m < a and 0 <= n < b"));
        }
        Ok(Self { k, l, m, n, alpha, beta, a, b })
    }

    /// `(e^{2πiα(n+ℓb)}, e^{2πiβ(m+ka)})`.
    pub fn phases(&self) -> (Complex64, Complex64) {
        let x = 2.0 * PI * self.alpha * (self.n + self.l * self.b as i64) as f64;
        let y = 2.0 * PI * self.beta * (self.m + self.k * self.a as i64) as f64;
        (Complex64::from_polar(1.0, x), Complex64::from_polar(1.0, y))
    }

    /// Reduced coordinates `(ξ, η)` in which the component reads
    /// `ξ + ξ⁻¹ + η + η⁻¹`.
    pub fn reduce(&self, xi1: Complex64, xi2: Complex64) -> (Complex64, Complex64) {
        let (u, v) = self.phases();
        (u * xi1, v * xi2)
    }

    /// Inverse of [`BlochIndex::reduce`].
    pub fn unreduce(&self, xi: Complex64, eta: Complex64) -> (Complex64, Complex64) {
        let (u, v) = self.phases();
        (xi / u, eta / v)
    }
}

pub fn bloch_eval(idx: &BlochIndex, xi1: Complex64, xi2: Complex64) -> Result<Complex64> {
    if xi1 == Complex64::new(0.0, 0.0) || xi2 == Complex64::new(0.0, 0.0) {
        return Err(FermiError::ZeroArgument);
    }
    let (u, v) = idx.phases();
    Ok(u * xi1 + (u * xi1).inv() + v * xi2 + (v * xi2).inv())
}

/// `μ = λ²/16`.
pub fn energy_to_mu(lambda: Complex64) -> Complex64 {
    lambda * lambda / 16.0
}

/// A line component of the `λ = 0` fiber in reduced coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LineComponent {
    /// `ξ + η = 0`
    SumZero,
    /// `ξη = −1`
    ProductMinusOne,
}

impl LineComponent {
    /// The `η` on this component above a given `ξ`.
    pub fn eta_at(&self, xi: Complex64) -> Complex64 {
        match self {
            Self::SumZero => -xi,
            Self::ProductMinusOne => -xi.inv(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberClass {
    Generic { branch_points: [Complex64; 4] },
    /// Ordinary double point, reported both in original and reduced
    /// coordinates.
    I1At { xi1: Complex64, xi2: Complex64, reduced: (f64, f64) },
    I2TwoLines { components: [LineComponent; 2] },
}

const FIBER_TOL: f64 = 1e-12;

pub fn fiber_classify(idx: &BlochIndex, lambda: Complex64) -> FiberClass {
    let near = |x: f64| (lambda - x).norm() <= FIBER_TOL;
    if near(0.0) {
        return FiberClass::I2TwoLines {
            components: [LineComponent::SumZero, LineComponent::ProductMinusOne],
        };
    }
    for s in [1.0, -1.0] {
        if near(4.0 * s) {
            let (xi1, xi2) = idx.unreduce(Complex64::new(s, 0.0), Complex64::new(s, 0.0));
            return FiberClass::I1At { xi1, xi2, reduced: (s, s) };
        }
    }
    FiberClass::Generic { branch_points: branch_points(lambda).points }
}

impl FiberClass {
    pub fn to_json(&self) -> serde_json::Value {
        let c = |z: Complex64| serde_json::json!([z.re, z.im]);
        match self {
            Self::Generic { branch_points } => serde_json::json!({
                "type": "generic",
                "branch_points": branch_points.iter().map(|&z| c(z)).collect::<Vec<_>>(),
            }),
            Self::I1At { xi1, xi2, reduced } => serde_json::json!({
                "type": "I1",
                "singular_point": [c(*xi1), c(*xi2)],
                "reduced": [reduced.0, reduced.1],
            }),
            Self::I2TwoLines { components } => serde_json::json!({
                "type": "I2",
                "components": components,
            }),
        }
    }
}

/// Smallest `|Δ|` over the midpoints of pairs of branch points.
pub fn min_midpoint_discriminant(lambda: Complex64) -> f64 {
    let p = branch_points(lambda).points;
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            best = best.min(discriminant((p[i] + p[j]) / 2.0, lambda).norm());
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FluxRational {
    p: i64,
    q: i64,
}

impl FluxRational {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 || !(0..q).contains(&p) || p.gcd(&q) != 1 {
            return Err(FermiError::InvalidFlux { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Bloch matrix of the Harper operator at flux `p/q`: diagonal
/// `2cos(2πpj/q + k₂)` and hopping `e^{ik₁}` from site `j` to `j+1 mod q`.
pub fn harper_bloch_matrix(flux: FluxRational, k1: f64, k2: f64) -> DMatrix<Complex64> {
    let q = flux.q as usize;
    let mut h = DMatrix::from_element(q, q, Complex64::new(0.0, 0.0));
    let hop = Complex64::from_polar(1.0, k1);
    for j in 0..q {
        let theta = 2.0 * PI * (flux.p * j as i64) as f64 / q as f64 + k2;
        h[(j, j)] += Complex64::new(2.0 * theta.cos(), 0.0);
        let next = (j + 1) % q;
        h[(j, next)] += hop;
        h[(next, j)] += hop.conj();
    }
    h
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSlice {
    pub flux: FluxRational,
    pub intervals: Vec<(f64, f64)>,
}

impl SpectrumSlice {
    pub fn lo(&self) -> f64 {
        self.intervals.first().map_or(f64::NAN, |b| b.0)
    }

    pub fn hi(&self) -> f64 {
        self.intervals.last().map_or(f64::NAN, |b| b.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ButterflyConfig {
    pub grid: usize,
    pub gap_threshold: f64,
}

impl Default for ButterflyConfig {
    fn default() -> Self {
        Self { grid: 16, gap_threshold: 1e-6 }
    }
}

/// Bands of one flux on a `grid × grid` sample `kᵢ = 2πi/grid`, merged when
/// separated by at most `gap_threshold`.
pub fn spectrum_slice(flux: FluxRational, cfg: &ButterflyConfig) -> SpectrumSlice {
    let q = flux.q as usize;
    let mut lo = vec![f64::INFINITY; q];
    let mut hi = vec![f64::NEG_INFINITY; q];
    for i in 0..cfg.grid {
        let k1 = 2.0 * PI * i as f64 / cfg.grid as f64;
        for j in 0..cfg.grid {
            let k2 = 2.0 * PI * j as f64 / cfg.grid as f64;
            let ev = hermitian_eigenvalues(&harper_bloch_matrix(flux, k1, k2));
            for (b, e) in ev.into_iter().enumerate() {
                lo[b] = lo[b].min(e);
                hi[b] = hi[b].max(e);
            }
        }
    }
    let mut bands: Vec<(f64, f64)> = lo.into_iter().zip(hi).collect();
    bands.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(bands.len());
    for (l, h) in bands {
        match intervals.last_mut() {
            Some(last) if l - last.1 <= cfg.gap_threshold => last.1 = last.1.max(h),
            _ => intervals.push((l, h)),
        }
    }
    SpectrumSlice { flux, intervals }
}

pub fn fluxes_up_to(q_max: i64) -> Vec<FluxRational> {
    (1..=q_max)
        .flat_map(|q| (0..q).filter_map(move |p| FluxRational::new(p, q).ok()))
        .collect()
}

/// One slice per reduced `p/q` with `q ≤ q_max`, sorted by `(q, p)`.
pub fn butterfly(q_max: i64, cfg: &ButterflyConfig) -> Result<Vec<SpectrumSlice>> {
    if !(1..=100).contains(&q_max) {
        return Err(FermiError::Precondition("q_max must lie in 1..=100"));
    }
    if cfg.grid < 4 {
        return Err(FermiError::Precondition("grid must be at least 4"));
    }
    let mut slices: Vec<SpectrumSlice> = fluxes_up_to(q_max)
        .into_par_iter()
        .map(|f| spectrum_slice(f, cfg))
        .collect();
    slices.sort_by_key(|s| (s.flux.q, s.flux.p));
    Ok(slices)
}

/// Columns `p,q,band_index,lo,hi`.
pub fn butterfly_csv(slices: &[SpectrumSlice]) -> String {
    let mut out = String::from("p,q,band_index,lo,hi\n");
    for s in slices {
        for (i, (lo, hi)) in s.intervals.iter().enumerate() {
            writeln!(out, "{},{},{},{:.12},{:.12}", s.flux.p, s.flux.q, i, lo, hi).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_index(rng: &mut impl Rng) -> BlochIndex {
        let (a, b) = (2, 3);
        BlochIndex::new(
            rng.gen_range(-5..5),
            rng.gen_range(-5..5),
            rng.gen_range(0..a as i64),
            rng.gen_range(0..b as i64),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..1.0),
            a,
            b,
        )
        .unwrap()
    }

    #[test]
    fn trivial_phases() {
        let idx = BlochIndex::new(0, 0, 0, 0, 0.0, 0.0, 2, 3).unwrap();
        assert_eq!(bloch_eval(&idx, c(1.0, 0.0), c(1.0, 0.0)).unwrap(), c(4.0, 0.0));
        assert_eq!(bloch_eval(&idx, c(0.0, 0.0), c(1.0, 0.0)), Err(FermiError::ZeroArgument));
        assert!(BlochIndex::new(0, 0, 2, 0, 0.0, 0.0, 2, 3).is_err());
    }

    #[test]
    fn reduction_and_symmetries() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let idx = sample_index(&mut rng);
            let xi1 = Complex64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0 * PI));
            let xi2 = Complex64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0 * PI));
            let v = bloch_eval(&idx, xi1, xi2).unwrap();
            let (x, y) = idx.reduce(xi1, xi2);
            assert!((v - (x + x.inv() + y + y.inv())).norm() < 1e-13);
            let w = bloch_eval(&idx, -xi1, -xi2).unwrap();
            assert!((w + v).norm() < 1e-13);
            let (u1, u2) = (xi1 / xi1.norm(), xi2 / xi2.norm());
            let on_torus = bloch_eval(&idx, u1, u2).unwrap();
            assert!(on_torus.im.abs() < 1e-13 && on_torus.re.abs() <= 4.0 + 1e-13);
        }
    }

    #[test]
    fn zero_fiber_lines() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let idx = sample_index(&mut rng);
        let FiberClass::I2TwoLines { components } = fiber_classify(&idx, c(0.0, 0.0)) else {
            panic!("expected I2");
        };
        for comp in components {
            for _ in 0..20 {
                let xi = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
                let (xi1, xi2) = idx.unreduce(xi, comp.eta_at(xi));
                assert!(bloch_eval(&idx, xi1, xi2).unwrap().norm() < 1e-13);
            }
        }
    }

    #[test]
    fn nodal_fibers() {
        let idx = BlochIndex::new(1, 2, 1, 2, 0.3, 0.7, 2, 3).unwrap();
        for s in [1.0, -1.0] {
            let FiberClass::I1At { xi1, xi2, reduced } = fiber_classify(&idx, c(4.0 * s, 0.0)) else {
                panic!("expected I1");
            };
            assert_eq!(reduced, (s, s));
            assert!((bloch_eval(&idx, xi1, xi2).unwrap() - 4.0 * s).norm() < 1e-13);
            let (u, v) = idx.phases();
            assert!((xi1 - s * u.inv()).norm() < 1e-14 && (xi2 - s * v.inv()).norm() < 1e-14);
        }
        let FiberClass::Generic { branch_points } = fiber_classify(&idx, c(2.0, 1.0)) else {
            panic!("expected generic");
        };
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((branch_points[i] - branch_points[j]).norm() > 1e-6);
            }
        }
        assert!(min_midpoint_discriminant(c(2.0, 1.0)) > 0.0);
    }

    #[test]
    fn singular_energies_map_to_mu() {
        let mus: Vec<Complex64> = [0.0, 4.0, -4.0].iter().map(|&l| energy_to_mu(c(l, 0.0))).collect();
        assert_eq!(mus, [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn flux_validation() {
        assert!(FluxRational::new(0, 1).is_ok());
        assert!(FluxRational::new(2, 4).is_err());
        assert!(FluxRational::new(3, 3).is_err());
        assert!(FluxRational::new(-1, 3).is_err());
        assert_eq!(fluxes_up_to(4).len(), 1 + 1 + 2 + 2);
    }

    #[test]
    fn harper_matrix_shapes() {
        let h = harper_bloch_matrix(FluxRational::new(0, 1).unwrap(), 0.4, 1.1);
        assert_eq!(h.shape(), (1, 1));
        assert!((h[(0, 0)].re - (2.0 * 0.4f64.cos() + 2.0 * 1.1f64.cos())).abs() < 1e-15);
        let f = FluxRational::new(2, 7).unwrap();
        let h = harper_bloch_matrix(f, 0.3, -0.8);
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn half_flux_closed_form() {
        let f = FluxRational::new(1, 2).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let (k1, k2) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
            let ev = hermitian_eigenvalues(&harper_bloch_matrix(f, k1, k2));
            let r = 2.0 * (k1.cos().powi(2) + k2.cos().powi(2)).sqrt();
            assert!((ev[0] + r).abs() < 1e-12 && (ev[1] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn slices() {
        let cfg = ButterflyConfig::default();
        let s0 = spectrum_slice(FluxRational::new(0, 1).unwrap(), &cfg);
        assert_eq!(s0.intervals.len(), 1);
        assert!((s0.lo() + 4.0).abs() < 1e-12 && (s0.hi() - 4.0).abs() < 1e-12);
        let s2 = spectrum_slice(FluxRational::new(1, 2).unwrap(), &cfg);
        assert_eq!(s2.intervals.len(), 1);
        assert!((s2.hi() - 8f64.sqrt()).abs() < 1e-9 && (s2.lo() + 8f64.sqrt()).abs() < 1e-9);
        let s3 = spectrum_slice(FluxRational::new(1, 3).unwrap(), &cfg);
        assert_eq!(s3.intervals.len(), 3);
        for w in s3.intervals.windows(2) {
            assert!(w[1].0 > w[0].1);
        }
    }

    #[test]
    fn butterfly_small() {
        let cfg = ButterflyConfig { grid: 8, gap_threshold: 1e-6 };
        let b = butterfly(6, &cfg).unwrap();
        let order: Vec<(i64, i64)> = b.iter().map(|s| (s.flux.q(), s.flux.p())).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
        for s in &b {
            assert!(s.lo() >= -4.0 - 1e-9 && s.hi() <= 4.0 + 1e-9);
            let mirrored: Vec<(f64, f64)> = s.intervals.iter().rev().map(|&(l, h)| (-h, -l)).collect();
            for (x, y) in s.intervals.iter().zip(&mirrored) {
                assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
            }
        }
        let csv = butterfly_csv(&b[..1]);
        assert_eq!(csv.lines().next(), Some("p,q,band_index,lo,hi"));
        assert!(butterfly(0, &cfg).is_err());
        assert!(butterfly(3, &ButterflyConfig { grid: 3, gap_threshold: 1e-6 }).is_err());
        assert_eq!(butterfly(1, &cfg).unwrap().len(), 1);
    }
}
