//! State spaces, pairings, Frobenius products and selection rules of the
//! three D4 theories: the Saito Frobenius manifold of `x³ + xy²`, FJRW
//! theory of `(x³y + y², G_max)` and FJRW theory of `(x³ + xy², ⟨J⟩)`.
//!
//! Every theory is written in the standard basis `{1, X, Y, X²}`, where the
//! product is that of `ℂ[X,Y]/(3X² + Y², 2XY)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{frac, int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FjrwError {
    #[error("phase vector has length {got}, weights have length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("elements belong to different theories ({0} and {1})")]
    TheoryMismatch(Theory, Theory),
    #[error("{0} is not an FJRW theory and has no group data")]
    NotAModel(Theory),
    #[error("unknown basis label '{0}' (expected 1, X, Y or X2)")]
    UnknownLabel(String),
    #[error("unknown theory '{0}' (expected d4-j, d4t-gmax or saito)")]
    UnknownTheory(String),
    #[error("degree shift formulas disagree: {0:?}")]
    DegreeShiftMismatch(Box<[Rational; 3]>),
    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),
}

/// Standard basis labels, in coordinate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    One,
    X,
    Y,
    X2,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::One, Label::X, Label::Y, Label::X2];

    pub fn index(self) -> usize {
        self as usize
    }

    /// W-degree in the halved convention.
    pub fn degree(self) -> Rational {
        match self {
            Label::One => int(0),
            Label::X | Label::Y => ratio(1, 3),
            Label::X2 => ratio(2, 3),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::One => "1",
            Label::X => "X",
            Label::Y => "Y",
            Label::X2 => "X2",
        })
    }
}

impl FromStr for Label {
    type Err = FjrwError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" => Ok(Label::One),
            "X" | "x" => Ok(Label::X),
            "Y" | "y" => Ok(Label::Y),
            "X2" | "x2" | "X^2" | "x^2" => Ok(Label::X2),
            other => Err(FjrwError::UnknownLabel(other.to_string())),
        }
    }
}

/// Parses a comma-separated insertion list such as `X,X,X,X2`.
pub fn parse_labels(s: &str) -> Result<Vec<Label>, FjrwError> {
    s.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    D4J,
    D4TGmax,
    Saito,
}

impl Theory {
    pub const ALL: [Theory; 3] = [Theory::D4J, Theory::D4TGmax, Theory::Saito];

    pub fn is_a_model(self) -> bool {
        self != Theory::Saito
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::D4J => "d4-j",
            Theory::D4TGmax => "d4t-gmax",
            Theory::Saito => "saito",
        })
    }
}

impl FromStr for Theory {
    type Err = FjrwError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d4-j" | "d4j" => Ok(Theory::D4J),
            "d4t-gmax" | "d4t" => Ok(Theory::D4TGmax),
            "saito" | "saito-d4" => Ok(Theory::Saito),
            other => Err(FjrwError::UnknownTheory(other.to_string())),
        }
    }
}

/// A diagonal symmetry `(e^{2πiΘ_1}, …)` of finite order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    phases: Vec<Rational>,
    order: u32,
}

impl GroupElement {
    pub fn new(phases: Vec<Rational>) -> Result<Self, FjrwError> {
        let mut order = BigInt::one();
        for t in &phases {
            if *t < Rational::zero() || *t >= Rational::one() {
                return Err(FjrwError::InvalidGroupElement(format!("phase {t} outside [0,1)")));
            }
            order = order.lcm(t.denom());
        }
        let order = u32::try_from(order)
            .map_err(|_| FjrwError::InvalidGroupElement("order too large".into()))?;
        Ok(GroupElement { phases, order })
    }

    /// `g^k` for the generator with the given phases.
    pub fn power_of(generator: &[Rational], k: i64) -> Self {
        Self::new(generator.iter().map(|t| frac(&(t * int(k)))).collect()).expect("fractional parts")
    }

    pub fn phases(&self) -> &[Rational] {
        &self.phases
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `N_γ`, the number of fixed coordinates.
    pub fn fixed_count(&self) -> usize {
        self.phases.iter().filter(|t| t.is_zero()).count()
    }
}

fn degree_shift_forms(gamma: &GroupElement, q: &[Rational]) -> Result<[Rational; 3], FjrwError> {
    if gamma.phases.len() != q.len() {
        return Err(FjrwError::LengthMismatch { expected: q.len(), got: gamma.phases.len() });
    }
    let half = ratio(1, 2);
    let n = int(gamma.fixed_count() as i64);
    let direct: Rational = gamma.phases.iter().zip(q).map(|(t, qi)| t - qi).sum();
    let c_hat: Rational = q.iter().map(|qi| int(1) - int(2) * qi).sum();
    let moved = || gamma.phases.iter().zip(q).filter(|(t, _)| !t.is_zero());
    let via_c_hat = (&c_hat - &n) * &half + moved().map(|(t, _)| t - &half).sum::<Rational>();
    let c_gamma: Rational = gamma
        .phases
        .iter()
        .zip(q)
        .filter(|(t, _)| t.is_zero())
        .map(|(_, qi)| int(1) - int(2) * qi)
        .sum();
    let via_c_gamma = (c_gamma - &n) * &half + moved().map(|(t, qi)| t - qi).sum::<Rational>();
    Ok([direct, via_c_hat, via_c_gamma])
}

/// `ι_γ = Σ_i (Θ_i − q_i)`. The two central-charge forms are evaluated as
/// well and must agree.
pub fn degree_shift(gamma: &GroupElement, q: &[Rational]) -> Result<Rational, FjrwError> {
    let forms = degree_shift_forms(gamma, q)?;
    if forms[0] != forms[1] || forms[0] != forms[2] {
        return Err(FjrwError::DegreeShiftMismatch(Box::new(forms)));
    }
    let [d, _, _] = forms;
    Ok(d)
}

/// Static data of one theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheorySpec {
    pub theory: Theory,
    pub weights: Vec<Rational>,
    /// Sector of each basis label; `None` for the B-model.
    pub sectors: Option<[GroupElement; 4]>,
    pairing: [[Rational; 4]; 4],
}

fn zero_matrix() -> [[Rational; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

/// The pairing `η(u, v) = ε(u⋆v)` where `ε` reads off `res · [X²]`.
fn frobenius_form_pairing(res: &Rational) -> [[Rational; 4]; 4] {
    let mut m = zero_matrix();
    for a in Label::ALL {
        for b in Label::ALL {
            m[a.index()][b.index()] = basis_product(a, b)[Label::X2.index()].clone() * res;
        }
    }
    m
}

fn saito_pairing() -> [[Rational; 4]; 4] {
    // Hess(x³ + xy²) = 12x² − 4y² ≡ 24X² and Res(Hess) = μ = 4
    let hess_in_x2 = int(12) - int(4) * int(-3);
    frobenius_form_pairing(&(int(4) / hess_in_x2))
}

fn d4j_pairing() -> [[Rational; 4]; 4] {
    // narrow sectors J and J² pair to 1/6; the broad ones come from
    // ⟨x e0, x e0⟩ = 1/6, ⟨y e0, y e0⟩ = −1/2 under x e0 ↦ Y/√−3, y e0 ↦ √−3 X
    let mut m = zero_matrix();
    m[0][3] = ratio(1, 6);
    m[3][0] = ratio(1, 6);
    let sqrt_m3_sq = int(-3);
    m[2][2] = ratio(1, 6) * &sqrt_m3_sq;
    m[1][1] = ratio(-1, 2) / &sqrt_m3_sq;
    m
}

fn d4t_pairing() -> [[Rational; 4]; 4] {
    let mut m = zero_matrix();
    m[0][3] = ratio(1, 6);
    m[3][0] = ratio(1, 6);
    m[1][1] = ratio(1, 6);
    m[2][2] = ratio(-1, 2);
    m
}

impl TheorySpec {
    pub fn new(theory: Theory) -> Self {
        match theory {
            Theory::D4J => {
                let j = [ratio(1, 3), ratio(1, 3)];
                let p = |k| GroupElement::power_of(&j, k);
                TheorySpec {
                    theory,
                    weights: j.to_vec(),
                    sectors: Some([p(1), p(0), p(0), p(2)]),
                    pairing: d4j_pairing(),
                }
            }
            Theory::D4TGmax => {
                let jt = [ratio(1, 6), ratio(1, 2)];
                let p = |k| GroupElement::power_of(&jt, k);
                TheorySpec {
                    theory,
                    weights: jt.to_vec(),
                    sectors: Some([p(1), p(3), p(0), p(5)]),
                    pairing: d4t_pairing(),
                }
            }
            Theory::Saito => TheorySpec {
                theory,
                weights: vec![ratio(1, 3), ratio(1, 3)],
                sectors: None,
                pairing: saito_pairing(),
            },
        }
    }

    /// `ĉ = Σ (1 − 2q_i)`.
    pub fn central_charge(&self) -> Rational {
        self.weights.iter().map(|q| int(1) - int(2) * q).sum()
    }

    pub fn pairing_matrix(&self) -> &[[Rational; 4]; 4] {
        &self.pairing
    }

    pub fn sector(&self, label: Label) -> Result<&GroupElement, FjrwError> {
        self.sectors.as_ref().map(|s| &s[label.index()]).ok_or(FjrwError::NotAModel(self.theory))
    }

    /// Degree of a basis element computed from its sector, `N_γ/2 + ι_γ`.
    pub fn sector_degree(&self, label: Label) -> Result<Rational, FjrwError> {
        let g = self.sector(label)?;
        Ok(int(g.fixed_count() as i64) * ratio(1, 2) + degree_shift(g, &self.weights)?)
    }

    pub fn element(&self, coords: [Rational; 4]) -> SectorElement {
        SectorElement { theory: self.theory, coords }
    }

    pub fn basis(&self, label: Label) -> SectorElement {
        let mut c: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        c[label.index()] = Rational::one();
        self.element(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorElement {
    pub theory: Theory,
    pub coords: [Rational; 4],
}

impl SectorElement {
    pub fn coefficient(&self, label: Label) -> &Rational {
        &self.coords[label.index()]
    }
}

impl fmt::Display for SectorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in Label::ALL {
            let c = &self.coords[l.index()];
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*{l}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Product of two basis elements in coordinates.
fn basis_product(a: Label, b: Label) -> [Rational; 4] {
    use Label::*;
    let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    match (a, b) {
        (One, u) | (u, One) => out[u.index()] = Rational::one(),
        (X, X) => out[X2.index()] = Rational::one(),
        // 3X² + Y² = 0
        (Y, Y) => out[X2.index()] = int(-3),
        // 2XY = 0, and everything of degree above 2/3 vanishes
        _ => {}
    }
    out
}

pub fn frobenius_product(u: &SectorElement, v: &SectorElement) -> Result<SectorElement, FjrwError> {
    if u.theory != v.theory {
        return Err(FjrwError::TheoryMismatch(u.theory, v.theory));
    }
    let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    for a in Label::ALL {
        for b in Label::ALL {
            let c = &u.coords[a.index()] * &v.coords[b.index()];
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(basis_product(a, b)) {
                *o += &c * p;
            }
        }
    }
    Ok(SectorElement { theory: u.theory, coords: out })
}

pub fn pairing(u: &SectorElement, v: &SectorElement) -> Result<Rational, FjrwError> {
    if u.theory != v.theory {
        return Err(FjrwError::TheoryMismatch(u.theory, v.theory));
    }
    let m = TheorySpec::new(u.theory).pairing;
    let mut acc = Rational::zero();
    for (ua, row) in u.coords.iter().zip(&m) {
        for (vb, eta) in v.coords.iter().zip(row) {
            acc += ua * vb * eta;
        }
    }
    Ok(acc)
}

/// Basis pairing `η(a, b)` shared by the three theories.
pub fn basis_pairing(a: Label, b: Label) -> Rational {
    saito_pairing()[a.index()][b.index()].clone()
}

fn invert4(m: &[[Rational; 4]; 4]) -> Option<[[Rational; 4]; 4]> {
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> =
        (0..4).map(|i| (0..4).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..4 {
        let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..4 {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..4 {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..4 {
                    let (x, y) = (&a[col][j] * &f, &inv[col][j] * &f);
                    a[r][j] -= x;
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j].clone())))
}

/// `δ'_j` with `η(δ_i, δ'_j) = δ_ij`, in basis order.
pub fn dual_basis(theory: Theory) -> [SectorElement; 4] {
    let spec = TheorySpec::new(theory);
    let inv = invert4(&spec.pairing).expect("pairing is nondegenerate");
    // η symmetric, so the j-th dual vector is the j-th column of η⁻¹
    std::array::from_fn(|j| spec.element(std::array::from_fn(|i| inv[i][j].clone())))
}

/// Degrees `q_j(2g − 2 + k) − Σ_ℓ Θ_j^{γ_ℓ}` of the coarse line bundles.
pub fn line_bundle_degrees(theory: Theory, g: u32, insertions: &[GroupElement]) -> Result<Vec<Rational>, FjrwError> {
    let spec = TheorySpec::new(theory);
    if !theory.is_a_model() {
        return Err(FjrwError::NotAModel(theory));
    }
    let chi = int(2 * g as i64 - 2 + insertions.len() as i64);
    let mut out: Vec<Rational> = spec.weights.iter().map(|q| q * &chi).collect();
    for gamma in insertions {
        if gamma.phases.len() != out.len() {
            return Err(FjrwError::LengthMismatch { expected: out.len(), got: gamma.phases.len() });
        }
        for (d, t) in out.iter_mut().zip(&gamma.phases) {
            *d -= t;
        }
    }
    Ok(out)
}

pub fn line_bundle_degrees_for(theory: Theory, insertions: &[Label]) -> Result<Vec<Rational>, FjrwError> {
    let spec = TheorySpec::new(theory);
    let sectors = insertions.iter().map(|l| spec.sector(*l).cloned()).collect::<Result<Vec<_>, _>>()?;
    line_bundle_degrees(theory, 0, &sectors)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishingReason {
    /// `Σ deg ≠ (3k − 7)/3`.
    Degree { sum: Rational, required: Rational },
    /// An identity insertion with `k ≠ 3`.
    Identity,
    /// `⟨1, u, v⟩ = η(u, v) = 0`.
    PairingZero,
    /// An odd number of `Y` insertions.
    OddY,
    /// A coarse line bundle of non-integral degree.
    NonIntegralDegree { variable: usize, degree: Rational },
    /// `⟨Y,X,X,X²⟩` or `⟨Y,Y,Y,X²⟩` on the B-side.
    KnownFourPoint,
    TooFewPoints,
}

impl fmt::Display for VanishingReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingReason::Degree { sum, required } => write!(f, "degree: {sum} != {required}"),
            VanishingReason::Identity => f.write_str("identity insertion with k != 3"),
            VanishingReason::PairingZero => f.write_str("three-point value is a zero pairing"),
            VanishingReason::OddY => f.write_str("odd number of Y insertions"),
            VanishingReason::NonIntegralDegree { variable, degree } => {
                let var = ["x", "y"].get(*variable).copied().unwrap_or("?");
                write!(f, "non-integral degree {degree} of |L_{var}|")
            }
            VanishingReason::KnownFourPoint => f.write_str("known four-point vanishing"),
            VanishingReason::TooFewPoints => f.write_str("fewer than three insertions"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Allowed,
    Vanishes(VanishingReason),
}

impl Verdict {
    pub fn is_allowed(&self) -> bool {
        matches!(self, Verdict::Allowed)
    }
}

/// Rules shared by all three theories.
pub fn a_priori_check(insertions: &[Label]) -> Verdict {
    let k = insertions.len() as i64;
    if k < 3 {
        return Verdict::Vanishes(VanishingReason::TooFewPoints);
    }
    let sum: Rational = insertions.iter().map(|l| l.degree()).sum();
    let required = ratio(3 * k - 7, 3);
    if sum != required {
        return Verdict::Vanishes(VanishingReason::Degree { sum, required });
    }
    if let Some(pos) = insertions.iter().position(|l| *l == Label::One) {
        if k != 3 {
            return Verdict::Vanishes(VanishingReason::Identity);
        }
        let rest: Vec<Label> = insertions.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, l)| *l).collect();
        if basis_pairing(rest[0], rest[1]).is_zero() {
            return Verdict::Vanishes(VanishingReason::PairingZero);
        }
    }
    Verdict::Allowed
}

pub fn vanishing_check(theory: Theory, insertions: &[Label]) -> Verdict {
    let v = a_priori_check(insertions);
    if !v.is_allowed() {
        return v;
    }
    let y_count = insertions.iter().filter(|l| **l == Label::Y).count();
    match theory {
        Theory::D4J => {
            if y_count % 2 == 1 {
                return Verdict::Vanishes(VanishingReason::OddY);
            }
        }
        Theory::D4TGmax => {
            let degs = line_bundle_degrees_for(theory, insertions).expect("A-model");
            if let Some((variable, degree)) = degs.into_iter().enumerate().find(|(_, d)| !d.is_integer()) {
                return Verdict::Vanishes(VanishingReason::NonIntegralDegree { variable, degree });
            }
        }
        Theory::Saito => {
            let mut sorted = insertions.to_vec();
            sorted.sort();
            use Label::*;
            if sorted == [X, X, Y, X2] || sorted == [Y, Y, Y, X2] {
                return Verdict::Vanishes(VanishingReason::KnownFourPoint);
            }
        }
    }
    Verdict::Allowed
}

/// All multisets of size `k` over the basis, each sorted.
pub fn multisets(k: usize) -> Vec<Vec<Label>> {
    fn go(start: usize, k: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..4 {
            cur.push(Label::ALL[i]);
            go(i, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

/// Multisets of size 3..=7 allowed by [`a_priori_check`].
pub fn a_priori_survivors() -> Vec<Vec<Label>> {
    (3..=7).flat_map(multisets).filter(|m| a_priori_check(m).is_allowed()).collect()
}
