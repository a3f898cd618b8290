//! Picard–Lefschetz monodromy on a rank-2 cycle lattice.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    DeterminantNotOne { a: i64, b: i64, c: i64, d: i64, det: i64 },
}

/// Integer coordinates in a fixed lattice basis `(e₁, e₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CycleVector {
    pub e1: i64,
    pub e2: i64,
}

impl CycleVector {
    pub const ZERO: Self = Self { e1: 0, e2: 0 };

    pub const fn new(e1: i64, e2: i64) -> Self {
        Self { e1, e2 }
    }
}

impl Add for CycleVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.e1 + o.e1, self.e2 + o.e2)
    }
}

impl Sub for CycleVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.e1 - o.e1, self.e2 - o.e2)
    }
}

impl Neg for CycleVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.e1, -self.e2)
    }
}

impl Mul<CycleVector> for i64 {
    type Output = CycleVector;
    fn mul(self, v: CycleVector) -> CycleVector {
        CycleVector::new(self * v.e1, self * v.e2)
    }
}

impl fmt::Display for CycleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.e1, self.e2)
    }
}

/// Skew pairing determined by `e₁·e₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionForm {
    pub e1_dot_e2: i64,
}

impl IntersectionForm {
    pub const fn new(e1_dot_e2: i64) -> Self {
        Self { e1_dot_e2 }
    }

    pub const fn standard() -> Self {
        Self::new(1)
    }

    pub fn pair(&self, x: CycleVector, y: CycleVector) -> i64 {
        self.e1_dot_e2 * (x.e1 * y.e2 - x.e2 * y.e1)
    }
}

/// `T(x) = x − (x·δ)δ`.
pub fn pl_transform(x: CycleVector, delta: CycleVector, form: &IntersectionForm) -> CycleVector {
    x - form.pair(x, delta) * delta
}

/// The twist with reversed orientation, `x + (x·δ)δ`.
pub fn pl_inverse(x: CycleVector, delta: CycleVector, form: &IntersectionForm) -> CycleVector {
    x + form.pair(x, delta) * delta
}

/// Matrix of [`pl_transform`] acting on coordinate columns.
pub fn pl_matrix(delta: CycleVector, form: &IntersectionForm) -> SL2Matrix {
    let c1 = pl_transform(CycleVector::new(1, 0), delta, form);
    let c2 = pl_transform(CycleVector::new(0, 1), delta, form);
    SL2Matrix::new(c1.e1, c2.e1, c1.e2, c2.e2).expect("twists are unimodular")
}

/// `[[a, b], [c, d]]` with `ad − bc = 1`, acting on coordinate columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SL2Matrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl SL2Matrix {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MonodromyError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(MonodromyError::DeterminantNotOne { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, v: CycleVector) -> CycleVector {
        CycleVector::new(self.a * v.e1 + self.b * v.e2, self.c * v.e1 + self.d * v.e2)
    }

    /// `g·self·g⁻¹`.
    pub fn conjugate_by(&self, g: &Self) -> Self {
        *g * *self * g.inverse()
    }
}

impl Mul for SL2Matrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Membership in `Γ₀(8) ∩ Γ₀⁰(4)`: `c ≡ 0 (mod 8)` and `b ≡ 0 (mod 4)`.
pub fn in_congruence_group(m: &SL2Matrix) -> bool {
    m.c.rem_euclid(8) == 0 && m.b.rem_euclid(4) == 0
}

/// Kodaira type of a local monodromy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum FiberType {
    I(u64),
    NotUnipotent,
}

impl FiberType {
    pub fn euler_number(&self) -> Option<u64> {
        match self {
            Self::I(n) => Some(*n),
            Self::NotUnipotent => None,
        }
    }
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::I(n) => write!(f, "I{n}"),
            Self::NotUnipotent => f.write_str("not unipotent"),
        }
    }
}

/// `I_n` with `n` the gcd of the entries of `m − I` when that is a nonzero
/// nilpotent.
pub fn fiber_type_of(m: &SL2Matrix) -> FiberType {
    let n = [m.a - 1, m.b, m.c, m.d - 1];
    // a 2×2 matrix N is nilpotent iff tr N = 0 and det N = 0
    let nilpotent = n[0] + n[3] == 0 && n[0] * n[3] - n[1] * n[2] == 0;
    let g = n.iter().fold(0i64, |g, &x| g.gcd(&x));
    if nilpotent && g != 0 {
        FiberType::I(g as u64)
    } else {
        FiberType::NotUnipotent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum FiberLocation {
    Finite(i64),
    Infinity,
}

impl fmt::Display for FiberLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl From<FiberType> for String {
    fn from(t: FiberType) -> String {
        t.to_string()
    }
}

impl From<FiberLocation> for String {
    fn from(l: FiberLocation) -> String {
        l.to_string()
    }
}

/// Serialized as `[["4", "I1"], ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberList(pub Vec<(FiberLocation, FiberType)>);

impl FiberList {
    /// Exceptional fibers of the Fermi-curve family in the energy `λ`.
    pub fn harper_family() -> Self {
        Self(vec![
            (FiberLocation::Finite(4), FiberType::I(1)),
            (FiberLocation::Finite(-4), FiberType::I(1)),
            (FiberLocation::Finite(0), FiberType::I(2)),
            (FiberLocation::Infinity, FiberType::I(8)),
        ])
    }

    pub fn euler_number(&self) -> Option<u64> {
        self.0.iter().map(|(_, t)| t.euler_number()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedCycle {
    pub name: String,
    pub coordinates: CycleVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub claim: String,
    pub expected: CycleVector,
    pub computed: CycleVector,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub basis: [String; 2],
    pub form: IntersectionForm,
    pub cycles: Vec<NamedCycle>,
    pub pairings: Vec<(String, i64)>,
    pub steps: Vec<NamedCycle>,
    pub checks: Vec<IdentityCheck>,
    pub local_types: Vec<(String, FiberType)>,
    pub all_hold: bool,
}

fn named(name: &str, v: CycleVector) -> NamedCycle {
    NamedCycle { name: name.into(), coordinates: v }
}

fn check(name: &str, claim: &str, expected: CycleVector, computed: CycleVector) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        claim: claim.into(),
        expected,
        computed,
        holds: expected == computed,
    }
}

/// Cycles for the monodromies around λ = 4, −4, 0 in the basis `(δ₁, γ)` with `δ₁·δ₂ = m`:
/// `δ₂ = −δ₁ + mγ`, so that `δ₂·γ = −δ₁·γ`.
pub fn lemma1_cycles(m: i64) -> [CycleVector; 3] {
    let d1 = CycleVector::new(1, 0);
    let g = CycleVector::new(0, 1);
    [d1, -d1 + m * g, g]
}

/// Local monodromies `T₄, T₋₄, T₀` acting on `γ`.
///
/// `T₀` composes the two twists at the simultaneous nodes with reversed
/// orientation, and the two nodes are disjoint (`δ₁·δ₂ = 0`).
pub fn verify_lemma1(form: &IntersectionForm) -> LemmaReport {
    verify_lemma1_with(form, 0)
}

pub fn verify_lemma1_with(form: &IntersectionForm, d1_dot_d2: i64) -> LemmaReport {
    let [d1, d2, g] = lemma1_cycles(d1_dot_d2);
    let t4 = pl_transform(g, d1, form);
    let t_minus4 = pl_transform(g, d2, form);
    let half = pl_inverse(g, d1, form);
    let t0 = pl_inverse(half, d2, form);
    let t0_matrix = {
        let c1 = pl_inverse(pl_inverse(CycleVector::new(1, 0), d1, form), d2, form);
        let c2 = pl_inverse(pl_inverse(CycleVector::new(0, 1), d1, form), d2, form);
        SL2Matrix::new(c1.e1, c2.e1, c1.e2, c2.e2).expect("twists are unimodular")
    };
    let checks = vec![
        check("T4", "T4(g) = g + d1", g + d1, t4),
        check("T-4", "T-4(g) = g - d2", g - d2, t_minus4),
        check("T0", "T0(g) = g - d1 + d2", g - d1 + d2, t0),
        check("T4 fixes d1", "T4(d1) = d1", d1, pl_transform(d1, d1, form)),
    ];
    let all_hold = checks.iter().all(|c| c.holds) && form.pair(d1, g) == 1 && form.pair(d2, g) == -1;
    LemmaReport {
        lemma: "lemma1".into(),
        basis: ["d1".into(), "g".into()],
        form: *form,
        cycles: vec![named("d1", d1), named("d2", d2), named("g", g)],
        pairings: vec![
            ("d1.g".into(), form.pair(d1, g)),
            ("d2.g".into(), form.pair(d2, g)),
            ("d1.d2".into(), form.pair(d1, d2)),
        ],
        steps: vec![named("T0 after d1", half), named("T0 after d2", t0)],
        checks,
        local_types: vec![
            ("T4".into(), fiber_type_of(&pl_matrix(d1, form))),
            ("T-4".into(), fiber_type_of(&pl_matrix(d2, form))),
            ("T0".into(), fiber_type_of(&t0_matrix)),
        ],
        all_hold,
    }
}

/// Cycles for the monodromies `S₀`, `S₁` in the basis `(δ₁, γ)`: `δ₂ = δ₁ + mγ`, `δ₃ = −δ₁ − mγ`,
/// which gives `δ₂·γ = 1`, `δ₃·γ = −1` and disjoint `δ₂, δ₃`.
pub fn lemma2_cycles(m: i64) -> [CycleVector; 4] {
    let d1 = CycleVector::new(1, 0);
    let g = CycleVector::new(0, 1);
    [d1, d1 + m * g, -d1 - m * g, g]
}

/// `S₀ = T_{δ₁}` and `S₁ = T_{δ₃}² ∘ T_{δ₂}²` acting on `γ`.
pub fn verify_lemma2(form: &IntersectionForm) -> LemmaReport {
    let [d1, d2, d3, g] = lemma2_cycles(0);
    let s0 = pl_transform(g, d1, form);
    let mut steps = Vec::new();
    let mut x = g;
    for (label, delta) in [("d2", d2), ("d2", d2), ("d3", d3), ("d3", d3)] {
        x = pl_transform(x, delta, form);
        steps.push(named(&format!("S1 after {label}"), x));
    }
    let s1_matrix = pl_matrix(d3, form) * pl_matrix(d3, form) * pl_matrix(d2, form) * pl_matrix(d2, form);
    let checks = vec![
        check("S0", "S0(g) = g + d1", g + d1, s0),
        check("S0 fixes d1", "S0(d1) = d1", d1, pl_transform(d1, d1, form)),
        check("S1", "S1(g) = g + 2 d2 - 2 d3", g + 2 * d2 - 2 * d3, x),
        check("S1 matrix", "S1 as a matrix agrees", x, s1_matrix.apply(g)),
    ];
    let stated = form.pair(d1, g) == 1 && form.pair(d2, g) == 1 && form.pair(d3, g) == -1;
    let all_hold = stated && checks.iter().all(|c| c.holds);
    LemmaReport {
        lemma: "lemma2".into(),
        basis: ["d1".into(), "g".into()],
        form: *form,
        cycles: vec![named("d1", d1), named("d2", d2), named("d3", d3), named("g", g)],
        pairings: vec![
            ("d1.g".into(), form.pair(d1, g)),
            ("d2.g".into(), form.pair(d2, g)),
            ("d3.g".into(), form.pair(d3, g)),
            ("d2.d3".into(), form.pair(d2, d3)),
        ],
        steps,
        checks,
        local_types: vec![
            ("S0".into(), fiber_type_of(&pl_matrix(d1, form))),
            ("S1".into(), fiber_type_of(&s1_matrix)),
        ],
        all_hold,
    }
}

/// `(ξ² − λξ + 1)² − 4ξ²`, whose roots are the branch points.
pub fn discriminant(xi: Complex64, lambda: Complex64) -> Complex64 {
    let u = xi * xi - lambda * xi + 1.0;
    u * u - 4.0 * xi * xi
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Collision {
    /// Indices into [`BranchPoints::points`].
    pub pair: (usize, usize),
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchPoints {
    pub points: [Complex64; 4],
    pub collisions: Vec<Collision>,
}

const COLLISION_TOL: f64 = 1e-12;

/// `((λ+2) ± √(λ²+4λ))/2` and `((λ−2) ± √(λ²−4λ))/2`, with collisions
/// reported when a square root vanishes.
pub fn branch_points(lambda: Complex64) -> BranchPoints {
    let r_plus = (lambda * lambda + 4.0 * lambda).sqrt();
    let r_minus = (lambda * lambda - 4.0 * lambda).sqrt();
    let points = [
        (lambda + 2.0 + r_plus) / 2.0,
        (lambda + 2.0 - r_plus) / 2.0,
        (lambda - 2.0 + r_minus) / 2.0,
        (lambda - 2.0 - r_minus) / 2.0,
    ];
    let scale = 1.0f64.max(lambda.norm());
    let mut collisions = Vec::new();
    for (pair, r, centre) in [((0, 1), r_plus, (lambda + 2.0) / 2.0), ((2, 3), r_minus, (lambda - 2.0) / 2.0)] {
        if r.norm() <= COLLISION_TOL * scale {
            collisions.push(Collision { pair, re: centre.re, im: centre.im });
        }
    }
    BranchPoints { points, collisions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    const F: IntersectionForm = IntersectionForm::standard();

    #[test]
    fn lemma1_holds() {
        let r = verify_lemma1(&F);
        assert!(r.all_hold, "{r:#?}");
        assert_eq!(
            r.local_types.iter().map(|(_, t)| *t).collect::<Vec<_>>(),
            [FiberType::I(1), FiberType::I(1), FiberType::I(2)]
        );
    }

    #[test]
    fn lemma1_t0_needs_disjoint_nodes() {
        for m in -3..=3 {
            let r = verify_lemma1_with(&F, m);
            assert!(r.checks[0].holds && r.checks[1].holds);
            assert_eq!(r.checks[2].holds, m == 0, "m = {m}");
        }
    }

    #[test]
    fn forward_twists_flip_t0_signs() {
        let [d1, d2, g] = lemma1_cycles(0);
        let forward = pl_transform(pl_transform(g, d1, &F), d2, &F);
        assert_eq!(forward, g + d1 - d2);
    }

    #[test]
    fn lemma2_holds() {
        let r = verify_lemma2(&F);
        assert!(r.all_hold, "{r:#?}");
        assert_eq!(r.steps.last().unwrap().coordinates, CycleVector::new(4, 1));
    }

    #[test]
    fn lemma_reports_fail_under_reversed_form() {
        assert!(!verify_lemma1(&IntersectionForm::new(-1)).all_hold);
        assert!(!verify_lemma2(&IntersectionForm::new(-1)).all_hold);
    }

    #[test]
    fn congruence_examples() {
        assert!(in_congruence_group(&SL2Matrix::IDENTITY));
        assert!(in_congruence_group(&SL2Matrix::new(1, 4, 8, 33).unwrap()));
        assert!(!in_congruence_group(&SL2Matrix::new(1, 1, 0, 1).unwrap()));
        assert!(SL2Matrix::new(1, 4, 8, 32).is_err());
    }

    #[test]
    fn fiber_types() {
        assert_eq!(fiber_type_of(&SL2Matrix::new(1, 1, 0, 1).unwrap()), FiberType::I(1));
        let t8 = SL2Matrix::new(1, 8, 0, 1).unwrap();
        let g = SL2Matrix::new(2, 1, 1, 1).unwrap();
        assert_eq!(fiber_type_of(&t8.conjugate_by(&g)), FiberType::I(8));
        assert_eq!(fiber_type_of(&SL2Matrix::IDENTITY), FiberType::NotUnipotent);
        assert_eq!(fiber_type_of(&SL2Matrix::new(0, -1, 1, 0).unwrap()), FiberType::NotUnipotent);
        assert_eq!(fiber_type_of(&SL2Matrix::new(-1, 1, 0, -1).unwrap()), FiberType::NotUnipotent);
        assert_eq!(FiberList::harper_family().euler_number(), Some(12));
    }

    #[test]
    fn branch_point_collisions() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let at4 = branch_points(c(4.0));
        assert_eq!(at4.collisions, vec![Collision { pair: (2, 3), re: 1.0, im: 0.0 }]);
        let s8 = 8f64.sqrt();
        assert!((at4.points[0] - c(3.0 + s8)).norm() < 1e-14);
        assert!((at4.points[1] - c(3.0 - s8)).norm() < 1e-14);
        let at_m4 = branch_points(c(-4.0));
        assert_eq!(at_m4.collisions, vec![Collision { pair: (0, 1), re: -1.0, im: 0.0 }]);
        let at0 = branch_points(c(0.0));
        let centres: Vec<_> = at0.collisions.iter().map(|c| (c.re, c.im)).collect();
        assert_eq!(centres, [(1.0, 0.0), (-1.0, 0.0)]);
        assert!(branch_points(c(2.0)).collisions.is_empty());
    }

    #[test]
    fn discriminant_vanishes_at_branch_points() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut lambdas = vec![Complex64::new(2.0, 0.0)];
        lambdas.extend((0..10).map(|_| Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0))));
        for l in lambdas {
            for p in branch_points(l).points {
                assert!(discriminant(p, l).norm() < 1e-12 * (1.0 + l.norm()).powi(4), "{l} {p}");
            }
        }
    }

    fn vec2() -> impl Strategy<Value = CycleVector> {
        (-50i64..50, -50i64..50).prop_map(|(a, b)| CycleVector::new(a, b))
    }

    fn generators() -> Vec<SL2Matrix> {
        [(1, 4, 0, 1), (1, 0, 8, 1), (-1, 0, 0, -1), (3, 4, 8, 11), (5, 4, 16, 13)]
            .into_iter()
            .map(|(a, b, c, d)| SL2Matrix::new(a, b, c, d).unwrap())
            .collect()
    }

    proptest! {
        #[test]
        fn pl_unipotent(x in vec2(), d in vec2(), p in -3i64..=3) {
            let form = IntersectionForm::new(p);
            let t = |v| pl_transform(v, d, &form);
            // (T − id)² x = T(Tx) − 2Tx + x
            prop_assert_eq!(t(t(x)) - 2 * t(x) + x, CycleVector::ZERO);
            prop_assert_eq!(pl_inverse(t(x), d, &form), x);
            prop_assert_eq!(t(d), d);
        }

        #[test]
        fn pl_preserves_form(x in vec2(), y in vec2(), d in vec2(), p in -3i64..=3) {
            let form = IntersectionForm::new(p);
            let tx = pl_transform(x, d, &form);
            let ty = pl_transform(y, d, &form);
            prop_assert_eq!(form.pair(tx, ty), form.pair(x, y));
            prop_assert_eq!(form.pair(x, y), -form.pair(y, x));
        }

        #[test]
        fn congruence_closure(word in prop::collection::vec((0usize..5, any::<bool>()), 1..6),
                              other in prop::collection::vec((0usize..5, any::<bool>()), 1..6)) {
            let gens = generators();
            let build = |w: &[(usize, bool)]| w.iter().fold(SL2Matrix::IDENTITY, |acc, &(i, inv)| {
                acc * if inv { gens[i].inverse() } else { gens[i] }
            });
            let (a, b) = (build(&word), build(&other));
            prop_assert!(in_congruence_group(&a));
            prop_assert!(in_congruence_group(&(a * b)));
            prop_assert!(in_congruence_group(&a.inverse()));
        }

        #[test]
        fn fiber_type_conjugation_invariant(n in 1i64..20, word in prop::collection::vec(0usize..4, 1..5)) {
            let gens = [(1, 1, 0, 1), (1, 0, 1, 1), (2, 1, 1, 1), (0, -1, 1, 0)]
                .map(|(a, b, c, d)| SL2Matrix::new(a, b, c, d).unwrap());
            let g = word.iter().fold(SL2Matrix::IDENTITY, |acc, &i| acc * gens[i]);
            let m = SL2Matrix::new(1, n, 0, 1).unwrap();
            prop_assert_eq!(fiber_type_of(&m.conjugate_by(&g)), FiberType::I(n as u64));
        }
    }
}
