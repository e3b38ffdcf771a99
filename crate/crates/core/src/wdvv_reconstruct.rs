//! Genus-zero primary correlators of the D4 theories by WDVV reconstruction
//! from the pairing, the three-point values and `a = ⟨X,X,X,X²⟩`.
//!
//! Correlators are kept as polynomials in the formal parameter `a`; a theory
//! only enters when the value of `a` (or of one of its powers) is plugged in.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::fjrw_frobenius::{
    a_priori_check, basis_pairing, dual_basis, frobenius_product, multisets, Label, Theory, TheorySpec,
};
use crate::rational::{factorial, format_rational, int, ratio, Rational};

/// Largest number of insertions with a possibly nonzero correlator.
pub const MAX_POINTS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("correlator {0} has fewer than four insertions and is not a seed")]
    TooShort(String),
    #[error("correlator {0} has no X2 insertion to split")]
    NotDecomposable(String),
    #[error("no splitting choice reconstructs {0}")]
    Stuck(String),
    #[error("{0} insertions exceed the cap of {MAX_POINTS}")]
    TooManyPoints(usize),
}

/// A polynomial in `a` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolicValue {
    coeffs: BTreeMap<u32, Rational>,
}

impl SymbolicValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · a^e`.
    pub fn monomial(c: Rational, e: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        SymbolicValue { coeffs }
    }

    pub fn a() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, e: u32) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// The single exponent if this is `c·a^e` with `c ≠ 0`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        match self.coeffs.len() {
            1 => self.coeffs.keys().next().copied(),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, e: u32, c: Rational) {
        let entry = self.coeffs.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        SymbolicValue { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    pub fn eval(&self, a: &Rational) -> Rational {
        self.coeffs.iter().map(|(e, c)| c * crate::rational::pow(a, *e as i32).expect("nonnegative power")).sum()
    }

    /// Reduces modulo `a^m = v`, leaving a polynomial of degree below `m`.
    pub fn reduce(&self, m: u32, v: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.coeffs {
            let factor = crate::rational::pow(v, (e / m) as i32).expect("nonnegative power");
            out.add_term(e % m, c * factor);
        }
        out
    }
}

impl fmt::Display for SymbolicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = match e {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{e}"),
            };
            if *e == 0 {
                f.write_str(&format_rational(&abs))?;
            } else if abs.is_one() {
                f.write_str(&a)?;
            } else {
                write!(f, "{}*{a}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

fn key_string(labels: &[Label]) -> String {
    let parts: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    format!("<{}>", parts.join(","))
}

fn sorted(labels: &[Label]) -> Vec<Label> {
    let mut v = labels.to_vec();
    v.sort();
    v
}

/// A splitting choice: which `X²` is written as `X⋆X`, and which two other
/// insertions play `α` and `β` (positions in the sorted insertion list).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Splitting {
    pub split: usize,
    pub alpha: usize,
    pub beta: usize,
}

/// Memo table of correlators keyed by sorted insertion multisets.
#[derive(Debug, Clone)]
pub struct CorrelatorTable {
    values: BTreeMap<Vec<Label>, SymbolicValue>,
    in_progress: HashSet<Vec<Label>>,
}

impl Default for CorrelatorTable {
    fn default() -> Self {
        Self::new()
    }
}

enum Lookup {
    Value(SymbolicValue),
    Blocked,
}

impl CorrelatorTable {
    /// Seeds: all three-point values `η(u⋆v, w)`, `⟨X,X,X,X²⟩ = a`, and the
    /// vanishing `⟨Y,X,X,X²⟩ = ⟨Y,Y,Y,X²⟩ = 0`.
    pub fn new() -> Self {
        let spec = TheorySpec::new(Theory::Saito);
        let mut values = BTreeMap::new();
        for m in multisets(3) {
            let uv = frobenius_product(&spec.basis(m[0]), &spec.basis(m[1])).expect("same theory");
            let v: Rational = Label::ALL.iter().map(|l| uv.coefficient(*l) * basis_pairing(*l, m[2])).sum();
            values.insert(m, SymbolicValue::constant(v));
        }
        use Label::*;
        values.insert(vec![X, X, X, X2], SymbolicValue::a());
        values.insert(vec![X, X, Y, X2], SymbolicValue::zero());
        values.insert(vec![Y, Y, Y, X2], SymbolicValue::zero());
        CorrelatorTable { values, in_progress: HashSet::new() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, insertions: &[Label]) -> Option<&SymbolicValue> {
        self.values.get(&sorted(insertions))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Label>, &SymbolicValue)> {
        self.values.iter()
    }

    /// The correlator, reconstructing and memoizing as needed.
    pub fn correlator(&mut self, insertions: &[Label]) -> Result<SymbolicValue, ReconstructError> {
        match self.lookup(&sorted(insertions))? {
            Lookup::Value(v) => Ok(v),
            Lookup::Blocked => Err(ReconstructError::Stuck(key_string(insertions))),
        }
    }

    fn lookup(&mut self, key: &[Label]) -> Result<Lookup, ReconstructError> {
        if let Some(v) = self.values.get(key) {
            return Ok(Lookup::Value(v.clone()));
        }
        if key.len() > MAX_POINTS {
            // (3k − 7)/3 > 2k/3 for k ≥ 8, so the degree rule kills these
            assert!(!a_priori_check(key).is_allowed());
            return Ok(Lookup::Value(SymbolicValue::zero()));
        }
        if !a_priori_check(key).is_allowed() {
            self.values.insert(key.to_vec(), SymbolicValue::zero());
            return Ok(Lookup::Value(SymbolicValue::zero()));
        }
        if self.in_progress.contains(key) {
            return Ok(Lookup::Blocked);
        }
        if key.len() < 4 {
            return Err(ReconstructError::TooShort(key_string(key)));
        }
        self.in_progress.insert(key.to_vec());
        let mut result = Ok(Lookup::Blocked);
        for choice in splittings(key) {
            match self.try_splitting(key, choice) {
                Ok(Some(v)) => {
                    result = Ok(Lookup::Value(v));
                    break;
                }
                Ok(None) => {}
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        self.in_progress.remove(key);
        match result {
            Ok(Lookup::Value(v)) => {
                self.values.insert(key.to_vec(), v.clone());
                Ok(Lookup::Value(v))
            }
            Ok(Lookup::Blocked) if !key.contains(&Label::X2) => {
                Err(ReconstructError::NotDecomposable(key_string(key)))
            }
            other => other,
        }
    }

    /// Value obtained from one splitting choice, `None` if that choice only
    /// leads back to correlators being computed.
    pub fn reconstruct_with(&mut self, insertions: &[Label], choice: Splitting) -> Result<Option<SymbolicValue>, ReconstructError> {
        let key = sorted(insertions);
        if key.len() < 4 {
            return Err(ReconstructError::TooShort(key_string(&key)));
        }
        if key.len() > MAX_POINTS {
            return Err(ReconstructError::TooManyPoints(key.len()));
        }
        self.in_progress.insert(key.clone());
        let out = self.try_splitting(&key, choice);
        self.in_progress.remove(&key);
        out
    }

    /// Right-hand side of the reconstruction identity for one choice, with
    /// occurrences of the target itself moved to the left.
    fn try_splitting(&mut self, key: &[Label], choice: Splitting) -> Result<Option<SymbolicValue>, ReconstructError> {
        let alpha = key[choice.alpha];
        let beta = key[choice.beta];
        let gammas: Vec<Label> = (0..key.len())
            .filter(|i| ![choice.split, choice.alpha, choice.beta].contains(i))
            .map(|i| key[i])
            .collect();
        let duals = dual_basis(Theory::Saito);
        let (eps, phi) = (Label::X, Label::X);
        let mut rest = SymbolicValue::zero();
        let mut self_coeff = SymbolicValue::zero();
        let g = gammas.len();
        for mask in 0u32..(1 << g) {
            let gi: Vec<Label> = (0..g).filter(|i| mask >> i & 1 == 1).map(|i| gammas[i]).collect();
            let gj: Vec<Label> = (0..g).filter(|i| mask >> i & 1 == 0).map(|i| gammas[i]).collect();
            for (sign, left_pair, right_pair) in [(1i64, (alpha, eps), (phi, beta)), (-1, (alpha, beta), (phi, eps))] {
                if sign < 0 && gj.is_empty() {
                    continue;
                }
                for delta in Label::ALL {
                    let dual = &duals[delta.index()];
                    for m in Label::ALL {
                        let dc = dual.coefficient(m);
                        if dc.is_zero() {
                            continue;
                        }
                        let mut left = gi.clone();
                        left.extend([left_pair.0, left_pair.1, delta]);
                        let mut right = gj.clone();
                        right.extend([m, right_pair.0, right_pair.1]);
                        let (left, right) = (sorted(&left), sorted(&right));
                        let w = int(sign) * dc;
                        // at most one factor can be the target: the other has three points
                        if left.as_slice() == key || right.as_slice() == key {
                            let other = if left.as_slice() == key { &right } else { &left };
                            let o = match self.lookup(other)? {
                                Lookup::Value(v) => v,
                                Lookup::Blocked => return Ok(None),
                            };
                            self_coeff = self_coeff.add(&o.scale(&w));
                            continue;
                        }
                        let l = match self.lookup(&left)? {
                            Lookup::Value(v) => v,
                            Lookup::Blocked => return Ok(None),
                        };
                        if l.is_zero() {
                            continue;
                        }
                        let r = match self.lookup(&right)? {
                            Lookup::Value(v) => v,
                            Lookup::Blocked => return Ok(None),
                        };
                        rest = rest.add(&l.mul(&r).scale(&w));
                    }
                }
            }
        }
        // target = rest + c·target
        match self_coeff.as_constant() {
            Some(c) if c != Rational::one() => Ok(Some(rest.scale(&(Rational::one() / (Rational::one() - c))))),
            _ => Ok(None),
        }
    }
}

/// All splitting choices for a sorted key, `X²` positions first to last.
pub fn splittings(key: &[Label]) -> Vec<Splitting> {
    let mut out = Vec::new();
    for split in (0..key.len()).filter(|&i| key[i] == Label::X2) {
        for alpha in 0..key.len() {
            for beta in 0..key.len() {
                if alpha != beta && alpha != split && beta != split {
                    out.push(Splitting { split, alpha, beta });
                }
            }
        }
    }
    out
}

/// Exponents of `(t_1, t_X, t_Y, t_{X²})`.
pub type PotentialMonomial = [u32; 4];

/// Genus-zero primary potential `Σ ⟨…⟩ t^m / m!` up to `max_k` points.
pub fn build_potential(max_k: usize) -> Result<BTreeMap<PotentialMonomial, SymbolicValue>, ReconstructError> {
    for k in MAX_POINTS + 1..=max_k {
        if multisets(k).iter().any(|m| a_priori_check(m).is_allowed()) {
            return Err(ReconstructError::TooManyPoints(k));
        }
    }
    let mut table = CorrelatorTable::new();
    let mut out = BTreeMap::new();
    for k in 3..=max_k.min(MAX_POINTS) {
        for m in multisets(k) {
            let v = table.correlator(&m)?;
            if v.is_zero() {
                continue;
            }
            let mut exps = [0u32; 4];
            for l in &m {
                exps[l.index()] += 1;
            }
            let sym: num_bigint::BigInt = exps.iter().map(|e| factorial(*e)).product();
            out.insert(exps, v.scale(&Rational::from_integer(sym).recip()));
        }
    }
    Ok(out)
}

pub fn format_monomial(m: &PotentialMonomial) -> String {
    let names = ["t_1", "t_X", "t_Y", "t_X2"];
    let parts: Vec<String> = m
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

/// What is known about `a` for a given theory: `a^power = value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    pub power: u32,
    pub value: Rational,
}

impl Specialization {
    pub fn exact(a: Rational) -> Self {
        Specialization { power: 1, value: a }
    }

    pub fn a_is_nonzero(&self) -> bool {
        !self.value.is_zero()
    }

    pub fn apply(&self, v: &SymbolicValue) -> SymbolicValue {
        v.reduce(self.power, &self.value)
    }

    /// Number of candidate values of `a` over `ℂ`.
    pub fn root_count(&self) -> u32 {
        if self.value.is_zero() {
            1
        } else {
            self.power
        }
    }
}

/// The Saito value of `⟨X,X,X,X²⟩` for the primitive form `dx∧dy`.
pub fn saito_a() -> Rational {
    // −1/6 at the primitive form 6 dx∧dy, rescaled by β = 1/6
    ratio(-1, 6) * ratio(1, 6)
}

/// `a²` for `(D4ᵀ, G_max)`: `a = α/6³` with `α² = 1/6`.
pub fn d4t_a_squared() -> Rational {
    ratio(1, 6) / int(216 * 216)
}

/// Printed coefficient of `t_{X²}^7` in the Saito potential, kept only to
/// report that it disagrees with the reconstructed value.
pub fn saito_printed_x2_7_coefficient() -> Rational {
    ratio(1, 3919140)
}

/// `c` in `⟨X², …, X²⟩ = c a⁴`.
pub fn seven_point_in_a() -> Rational {
    let v = CorrelatorTable::new().correlator(&[Label::X2; 7]).expect("reconstructible");
    v.coefficient(4)
}

pub fn specialization(theory: Theory, seven_point: &Rational) -> Specialization {
    match theory {
        Theory::Saito => Specialization::exact(saito_a()),
        Theory::D4TGmax => Specialization { power: 2, value: d4t_a_squared() },
        Theory::D4J => Specialization { power: 4, value: seven_point / seven_point_in_a() },
    }
}

#[derive(Debug, Clone)]
pub struct TheoryReport {
    pub theory: Theory,
    pub specialization: Specialization,
    pub potential: Vec<(PotentialMonomial, SymbolicValue)>,
    pub warnings: Vec<String>,
}

/// Potential of one theory with its value of `a` substituted.
pub fn evaluate_theory(theory: Theory, seven_point: &Rational) -> Result<TheoryReport, ReconstructError> {
    let spec = specialization(theory, seven_point);
    let pot = build_potential(MAX_POINTS)?;
    let potential: Vec<_> = pot.iter().map(|(m, v)| (*m, spec.apply(v))).collect();
    let mut warnings = Vec::new();
    if spec.power > 1 && spec.a_is_nonzero() {
        warnings.push(format!(
            "a is determined by a^{} = {} only up to {} roots",
            spec.power,
            format_rational(&spec.value),
            spec.root_count()
        ));
    }
    if theory == Theory::Saito {
        let c = spec.apply(&pot[&[0, 0, 0, 7]]).as_constant().expect("a is exact");
        let printed = saito_printed_x2_7_coefficient();
        if c != printed {
            warnings.push(format!(
                "t_X2^7 coefficient is {}, printed value {} differs by a factor {}",
                format_rational(&c),
                format_rational(&printed),
                format_rational(&(&printed / &c))
            ));
        }
    }
    Ok(TheoryReport { theory, specialization: spec, potential, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateReport {
    pub theory: Theory,
    pub pairing_match: bool,
    pub three_point_match: bool,
    pub a_nonzero: bool,
    pub passed: bool,
    pub conclusion: String,
}

fn three_point_values(theory: Theory) -> Vec<Rational> {
    let spec = TheorySpec::new(theory);
    multisets(3)
        .into_iter()
        .map(|m| {
            let uv = frobenius_product(&spec.basis(m[0]), &spec.basis(m[1])).expect("same theory");
            crate::fjrw_frobenius::pairing(&uv, &spec.basis(m[2])).expect("same theory")
        })
        .collect()
}

pub fn gate_verdict(theory: Theory, spec: &Specialization) -> GateReport {
    let mine = TheorySpec::new(theory);
    let saito = TheorySpec::new(Theory::Saito);
    let pairing_match = mine.pairing_matrix() == saito.pairing_matrix();
    let three_point_match = three_point_values(theory) == three_point_values(Theory::Saito);
    let a_nonzero = spec.a_is_nonzero();
    let passed = pairing_match && three_point_match && a_nonzero;
    let conclusion = if passed {
        "gate satisfied: Frobenius data match Saito and a != 0, so the potential is a rescaling of Saito's".to_string()
    } else if !a_nonzero {
        "gate fails: a = 0".to_string()
    } else {
        "gate fails: Frobenius data differ from Saito".to_string()
    };
    GateReport { theory, pairing_match, three_point_match, a_nonzero, passed, conclusion }
}

pub fn tau_gate(theory: Theory, seven_point: &Rational) -> GateReport {
    gate_verdict(theory, &specialization(theory, seven_point))
}
