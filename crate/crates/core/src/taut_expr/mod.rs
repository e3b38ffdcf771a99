//! Polynomials in the tautological divisor generators of M̄_{0,n}.
//!
//! The algebra here is the free commutative polynomial ring over the
//! rationals in the symbols `ψ_i`, `κ_1`, `κ_2` and `Δ_I`. No relation of
//! the cohomology ring is imposed; geometry enters only in
//! [`crate::mgn_integrate`]. Boundary symbols are always stored in the
//! canonical form `1 ∈ I`, `2 ≤ |I| ≤ n-2`.

mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

pub use parse::parse_expression;

/// Largest supported number of marked points (subsets are `u32` masks).
pub const MAX_POINTS: u8 = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("invalid number of marked points {0}: need 3 <= n <= 31")]
    InvalidContext(u32),
    #[error("marked point {index} out of range 1..={n}")]
    IndexOutOfRange { index: u32, n: u8 },
    #[error("boundary divisor b{subset} is unstable on M_0,{n}: need 2 <= |I| <= {max}", max = n - 2)]
    UnstableBoundary { subset: Subset, n: u8 },
    #[error("kappa{0} is not supported (only kappa1 and kappa2)")]
    UnsupportedKappa(u32),
    #[error("polynomials live on different moduli spaces (n = {0} vs n = {1})")]
    ContextMismatch(u8, u8),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// A set of marked points stored as a bitmask; bit `i - 1` is point `i`.
///
/// Ordered by size, then lexicographically on the sorted element list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_mask(mask: u32) -> Self {
        Subset(mask)
    }

    /// Builds a subset from 1-based point labels. Labels must lie in `1..=31`.
    pub fn from_points<I: IntoIterator<Item = u32>>(points: I) -> Self {
        let mut mask = 0u32;
        for p in points {
            assert!((1..=32).contains(&p), "point label {p} out of range");
            mask |= 1 << (p - 1);
        }
        Subset(mask)
    }

    /// `{1, ..., n}`.
    pub fn full(n: u8) -> Self {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, point: u32) -> bool {
        (1..=32).contains(&point) && self.0 & (1 << (point - 1)) != 0
    }

    pub fn complement(self, n: u8) -> Self {
        Subset(Subset::full(n).0 & !self.0)
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Points in increasing order, 1-based.
    pub fn points(self) -> impl Iterator<Item = u32> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let b = m.trailing_zeros();
                m &= m - 1;
                Some(b + 1)
            }
        })
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some(((c | !full).wrapping_add(1)) & full) };
            Some(Subset(c))
        })
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                // the lowest differing point belongs to self
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.points().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The ambient space M̄_{0,n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModuliContext {
    n: u8,
}

impl ModuliContext {
    pub fn new(n: u32) -> Result<Self, ExprError> {
        if !(3..=MAX_POINTS as u32).contains(&n) {
            return Err(ExprError::InvalidContext(n));
        }
        Ok(ModuliContext { n: n as u8 })
    }

    pub fn n(self) -> u8 {
        self.n
    }

    /// Complex dimension `n - 3`.
    pub fn dim(self) -> u32 {
        self.n as u32 - 3
    }

    pub fn points(self) -> Subset {
        Subset::full(self.n)
    }

    fn check_point(self, i: u32) -> Result<(), ExprError> {
        if i >= 1 && i <= self.n as u32 {
            Ok(())
        } else {
            Err(ExprError::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// `Δ_I` in canonical form: `I` itself if it contains 1, else its complement.
    pub fn canonicalize_boundary(self, subset: Subset) -> Result<Generator, ExprError> {
        if !subset.is_subset_of(self.points()) {
            let bad = subset.difference(self.points()).points().next().unwrap_or(0);
            return Err(ExprError::IndexOutOfRange { index: bad, n: self.n });
        }
        let size = subset.len();
        if size < 2 || size + 2 > self.n as u32 {
            return Err(ExprError::UnstableBoundary { subset, n: self.n });
        }
        let canonical = if subset.contains(1) { subset } else { subset.complement(self.n) };
        Ok(Generator::Boundary(canonical))
    }

    /// Every canonical boundary index `I ∋ 1`, `2 ≤ |I| ≤ n-2`, in generator order.
    pub fn boundary_indices(self) -> Vec<Subset> {
        let rest = self.points().difference(Subset::from_points([1]));
        let mut out: Vec<Subset> = rest
            .subsets()
            .map(|s| s.union(Subset::from_points([1])))
            .filter(|s| s.len() >= 2 && s.len() + 2 <= self.n as u32)
            .collect();
        out.sort();
        out
    }

    pub fn psi(self, i: u32) -> Result<Generator, ExprError> {
        self.check_point(i)?;
        Ok(Generator::Psi(i as u8))
    }

    pub fn kappa(self, a: u32) -> Result<Generator, ExprError> {
        match a {
            1 | 2 => Ok(Generator::Kappa(a as u8)),
            _ => Err(ExprError::UnsupportedKappa(a)),
        }
    }

    /// Canonical boundary generator from 1-based labels.
    pub fn boundary<I: IntoIterator<Item = u32>>(self, points: I) -> Result<Generator, ExprError> {
        let mut mask = 0u32;
        for p in points {
            self.check_point(p)?;
            mask |= 1 << (p - 1);
        }
        self.canonicalize_boundary(Subset(mask))
    }
}

/// A polynomial generator. Ordering: `ψ` by index, then `κ` by subscript,
/// then `Δ` by subset order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Psi(u8),
    Kappa(u8),
    Boundary(Subset),
}

impl Generator {
    pub fn degree(self) -> u32 {
        match self {
            Generator::Kappa(a) => a as u32,
            _ => 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Psi(i) => write!(f, "psi{i}"),
            Generator::Kappa(a) => write!(f, "kappa{a}"),
            Generator::Boundary(s) => write!(f, "b{s}"),
        }
    }
}

/// A product of generator powers in normal form: sorted by generator, no
/// zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: Vec<(Generator, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(g: Generator) -> Self {
        Monomial { factors: vec![(g, 1)] }
    }

    pub fn power(g: Generator, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial { factors: vec![(g, e)] }
        }
    }

    pub fn from_factors<I: IntoIterator<Item = (Generator, u32)>>(factors: I) -> Self {
        let mut v: Vec<(Generator, u32)> = factors.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_by_key(|a| a.0);
        let mut out: Vec<(Generator, u32)> = Vec::with_capacity(v.len());
        for (g, e) in v {
            match out.last_mut() {
                Some((h, f)) if *h == g => *f += e,
                _ => out.push((g, e)),
            }
        }
        Monomial { factors: out }
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(g, e)| g.degree() * e).sum()
    }

    pub fn exponent(&self, g: Generator) -> u32 {
        self.factors
            .binary_search_by(|(h, _)| h.cmp(&g))
            .map(|k| self.factors[k].1)
            .unwrap_or(0)
    }

    /// The monomial with every occurrence of `g` removed.
    pub fn without(&self, g: Generator) -> Monomial {
        Monomial { factors: self.factors.iter().copied().filter(|&(h, _)| h != g).collect() }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.factors.iter().map(|&(g, _)| g)
    }
}

impl Ord for Monomial {
    /// Graded: lower degree first, then lexicographic on the factor list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (k, (g, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in the tautological generators on a fixed M̄_{0,n}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautPolynomial {
    ctx: ModuliContext,
    terms: HashMap<Monomial, Rational>,
}

impl TautPolynomial {
    pub fn zero(ctx: ModuliContext) -> Self {
        TautPolynomial { ctx, terms: HashMap::new() }
    }

    pub fn one(ctx: ModuliContext) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: ModuliContext, c: Rational) -> Self {
        Self::monomial(ctx, Monomial::one(), c)
    }

    pub fn monomial(ctx: ModuliContext, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(m, c);
        p
    }

    pub fn generator(ctx: ModuliContext, g: Generator) -> Self {
        Self::monomial(ctx, Monomial::generator(g), Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(ctx: ModuliContext, terms: I) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn context(&self) -> ModuliContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Unordered view of the term map.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms in monomial order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<(), ExprError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(ExprError::ContextMismatch(self.ctx.n, other.ctx.n))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExprError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExprError> {
        self.check_ctx(other)?;
        let mut out = Self::zero(self.ctx);
        out.terms.reserve(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.ctx);
        }
        TautPolynomial {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// `p²`, using the symmetric expansion (about half the products of `p·p`).
    pub fn square(&self) -> Self {
        let terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        let two = Rational::from_integer(2.into());
        let mut out = Self::zero(self.ctx);
        for (i, (m1, c1)) in terms.iter().enumerate() {
            out.add_term(m1.mul(m1), *c1 * *c1);
            for (m2, c2) in &terms[i + 1..] {
                out.add_term(m1.mul(m2), &two * *c1 * *c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Degrees present, sorted ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(Monomial::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Every generator that occurs with nonzero exponent.
    pub fn generators(&self) -> Vec<Generator> {
        let mut g: Vec<Generator> = self.terms.keys().flat_map(|m| m.generators()).collect();
        g.sort();
        g.dedup();
        g
    }

    /// Replaces every occurrence of `g` by `replacement`.
    pub fn substitute(&self, g: Generator, replacement: &TautPolynomial) -> Result<Self, ExprError> {
        self.check_ctx(replacement)?;
        let mut powers: Vec<TautPolynomial> = vec![Self::one(self.ctx)];
        let mut out = Self::zero(self.ctx);
        for (m, c) in &self.terms {
            let e = m.exponent(g) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * replacement;
                powers.push(next);
            }
            let rest = m.without(g);
            for (m2, c2) in &powers[e].terms {
                out.add_term(rest.mul(m2), c * c2);
            }
        }
        Ok(out)
    }

    /// Applies a permutation `σ` of the marked points (1-based, `perm[i-1] = σ(i)`)
    /// to every generator.
    pub fn relabel(&self, perm: &[u32]) -> Self {
        let n = self.ctx.n;
        assert_eq!(perm.len(), n as usize, "permutation length must equal n");
        let map_gen = |g: Generator| match g {
            Generator::Psi(i) => Generator::Psi(perm[i as usize - 1] as u8),
            Generator::Kappa(a) => Generator::Kappa(a),
            Generator::Boundary(s) => {
                let image = Subset::from_points(s.points().map(|p| perm[p as usize - 1]));
                self.ctx.canonicalize_boundary(image).expect("relabeling preserves stability")
            }
        };
        Self::from_terms(
            self.ctx,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_factors(m.factors.iter().map(|&(g, e)| (map_gen(g), e))), c.clone())),
        )
    }
}

impl<'a> Add<&'a TautPolynomial> for &'a TautPolynomial {
    type Output = TautPolynomial;
    /// Panics on a context mismatch; use [`TautPolynomial::checked_add`] to handle it.
    fn add(self, rhs: &'a TautPolynomial) -> TautPolynomial {
        self.checked_add(rhs).expect("context mismatch")
    }
}

impl<'a> Sub<&'a TautPolynomial> for &'a TautPolynomial {
    type Output = TautPolynomial;
    fn sub(self, rhs: &'a TautPolynomial) -> TautPolynomial {
        self.checked_add(&-rhs).expect("context mismatch")
    }
}

impl<'a> Mul<&'a TautPolynomial> for &'a TautPolynomial {
    type Output = TautPolynomial;
    fn mul(self, rhs: &'a TautPolynomial) -> TautPolynomial {
        self.checked_mul(rhs).expect("context mismatch")
    }
}

impl Neg for &TautPolynomial {
    type Output = TautPolynomial;
    fn neg(self) -> TautPolynomial {
        TautPolynomial { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl fmt::Display for TautPolynomial {
    /// Output is accepted by [`parse_expression`] and reproduces the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}
