//! Top-degree integrals on M̄_{0,n}.
//!
//! A monomial in `ψ_i`, `κ_1` and `Δ_I` is integrated by
//!
//! * eliminating `κ_1` through `κ_1 = Σ_i ψ_i − Σ_I Δ_I`,
//! * restricting to a boundary divisor `Δ_I ≅ M̄_{0,I∪{+}} × M̄_{0,I^c∪{−}}`
//!   when one is present (`ψ_j` goes to the factor holding `j`, nested
//!   divisors go to the factor they live on, and the normal bundle gives
//!   `Δ_I|_{Δ_I} = −ψ_+ − ψ_−`),
//! * closing with `∫ ∏ ψ_i^{a_i} = (n−3)! / ∏ a_i!` once only `ψ` remain.
//!
//! Two boundary divisors whose index sets cross meet in the empty set.
//! Intermediate results are memoized in a concurrent map keyed on a
//! relabeled normal form of the monomial.

use std::sync::atomic::{AtomicUsize, Ordering};

use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::rational::{binomial, factorial, Rational};
use crate::taut_expr::{ExprError, Generator, ModuliContext, Monomial, Subset, TautPolynomial};

/// Environment variable bounding the memo cache, in bytes.
pub const CACHE_BYTES_ENV: &str = "MZERO_CACHE_BYTES";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrateError {
    #[error("kappa2 must be rewritten in divisors before integration")]
    Kappa2NotRewritten,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("psi_as_boundary needs three distinct points, got ({0}, {1}, {2})")]
    PointsNotDistinct(u32, u32, u32),
    #[error("boundary {subset} crosses a divisor of the monomial")]
    Crossing { subset: Subset },
    #[error("monomial still contains kappa classes")]
    KappaPresent,
}

/// Result of integrating a polynomial that may contain terms off the top degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Integral {
    pub value: Rational,
    /// Number of terms whose degree differs from `n − 3` (they contribute 0).
    pub off_degree_terms: usize,
}

/// Which node branch a factor of a boundary divisor carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

/// One factor of `Δ_I ≅ M̄_{0,|I|+1} × M̄_{0,|I^c|+1}`.
///
/// The factor's own points are labelled `1..=len` by taking the carried
/// marked points in increasing order, followed by the node branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FactorLabel {
    pub side: Side,
    /// Marked points of the ambient space carried by this factor.
    pub points: Subset,
    /// Label of the node branch inside the factor.
    pub node: u32,
    pub ctx: ModuliContext,
}

impl FactorLabel {
    fn new(side: Side, points: Subset) -> Self {
        let m = points.len() + 1;
        FactorLabel { side, points, node: m, ctx: ModuliContext::new(m).expect("stable factor") }
    }

    /// Label inside the factor of an ambient marked point it carries.
    pub fn local_label(&self, point: u32) -> Option<u32> {
        if !self.points.contains(point) {
            return None;
        }
        Some(self.points.points().take_while(|&p| p < point).count() as u32 + 1)
    }
}

/// Expansion of a monomial restricted to a boundary divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRestriction {
    pub plus: FactorLabel,
    pub minus: FactorLabel,
    /// `(monomial on plus factor, monomial on minus factor, coefficient)`.
    pub terms: Vec<(Monomial, Monomial, Rational)>,
}

/// `(n−3)! / ∏ a_i!` when `Σ a_i = n−3`, else 0.
pub fn psi_multinomial(ctx: ModuliContext, exponents: &[u32]) -> Rational {
    assert_eq!(exponents.len(), ctx.n() as usize, "one exponent per marked point");
    multinomial(ctx.dim(), exponents.iter().copied())
}

fn multinomial<I: Iterator<Item = u32>>(dim: u32, exponents: I) -> Rational {
    let mut total = 0;
    let mut den = BigInt::one();
    for a in exponents {
        total += a;
        den *= factorial(a);
    }
    if total != dim {
        return Rational::zero();
    }
    Rational::new(factorial(dim), den)
}

/// `Σ_i ψ_i − Σ_I Δ_I`, the divisor expression of `κ_1` in genus zero.
pub fn eliminate_kappa1(ctx: ModuliContext) -> TautPolynomial {
    let mut p = TautPolynomial::zero(ctx);
    for i in 1..=ctx.n() as u32 {
        p.add_term(Monomial::generator(Generator::Psi(i as u8)), Rational::one());
    }
    for s in ctx.boundary_indices() {
        p.add_term(Monomial::generator(Generator::Boundary(s)), -Rational::one());
    }
    p
}

/// `ψ_i = Σ_{i ∈ I, a,b ∉ I} Δ_I` for distinct `i, a, b`.
pub fn psi_as_boundary(ctx: ModuliContext, i: u32, a: u32, b: u32) -> Result<TautPolynomial, IntegrateError> {
    for p in [i, a, b] {
        ctx.psi(p)?;
    }
    if i == a || i == b || a == b {
        return Err(IntegrateError::PointsNotDistinct(i, a, b));
    }
    let single = Subset::from_points([i]);
    let free = ctx.points().difference(Subset::from_points([i, a, b]));
    let mut p = TautPolynomial::zero(ctx);
    for s in free.subsets().filter(|s| !s.is_empty()) {
        let g = ctx.canonicalize_boundary(s.union(single))?;
        p.add_term(Monomial::generator(g), Rational::one());
    }
    Ok(p)
}

/// Pullback along the map M̄_{0,n+1} → M̄_{0,n} forgetting the last point:
/// `κ_a ↦ κ_a − ψ_{n+1}^a`, `ψ_i ↦ ψ_i − Δ_{i,n+1}`, `Δ_I ↦ Δ_I + Δ_{I∪{n+1}}`.
pub fn pullback_forget_last(poly: &TautPolynomial) -> Result<TautPolynomial, IntegrateError> {
    let small = poly.context();
    let big = ModuliContext::new(small.n() as u32 + 1)?;
    let last = big.n() as u32;
    let image = |g: Generator| -> Result<TautPolynomial, IntegrateError> {
        let mut p = TautPolynomial::zero(big);
        match g {
            Generator::Kappa(a) => {
                p.add_term(Monomial::generator(g), Rational::one());
                p.add_term(Monomial::power(Generator::Psi(last as u8), a as u32), -Rational::one());
            }
            Generator::Psi(i) => {
                p.add_term(Monomial::generator(g), Rational::one());
                p.add_term(Monomial::generator(big.boundary([i as u32, last])?), -Rational::one());
            }
            Generator::Boundary(s) => {
                p.add_term(Monomial::generator(big.canonicalize_boundary(s)?), Rational::one());
                let with_last = s.union(Subset::from_points([last]));
                p.add_term(Monomial::generator(big.canonicalize_boundary(with_last)?), Rational::one());
            }
        }
        Ok(p)
    };
    let mut out = TautPolynomial::zero(big);
    for (m, c) in poly.terms() {
        let mut term = TautPolynomial::constant(big, c.clone());
        for &(g, e) in m.factors() {
            term = &term * &image(g)?.pow(e);
        }
        out = &out + &term;
    }
    Ok(out)
}

/// Restricts `m` to `Δ_I`. Every copy of `Δ_I` inside `m` becomes
/// `−ψ_+ ⊗ 1 − 1 ⊗ ψ_−` and the sum is fully expanded.
pub fn restrict_to_boundary(
    ctx: ModuliContext,
    subset: Subset,
    m: &Monomial,
) -> Result<BoundaryRestriction, IntegrateError> {
    let Generator::Boundary(canon) = ctx.canonicalize_boundary(subset)? else { unreachable!() };
    let shape = Shape::from_monomial(ctx, m)?;
    if shape.kappa1 > 0 {
        return Err(IntegrateError::KappaPresent);
    }
    let split = shape.split(canon.mask()).ok_or(IntegrateError::Crossing { subset: canon })?;
    let plus = FactorLabel::new(Side::Plus, canon);
    let minus = FactorLabel::new(Side::Minus, canon.complement(ctx.n()));
    let e = split.residual;
    let mut terms = Vec::new();
    for j in 0..=e {
        let mut p = split.plus.clone();
        let mut q = split.minus.clone();
        p.psi[p.n as usize - 1] += j as u8;
        q.psi[q.n as usize - 1] += (e - j) as u8;
        let sign = if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let coeff = Rational::from_integer(sign * binomial(e, j));
        terms.push((p.to_monomial(), q.to_monomial(), coeff));
    }
    Ok(BoundaryRestriction { plus, minus, terms })
}

/// Internal normal form of a monomial on M̄_{0,n}: points are 0-based,
/// boundary masks contain point 0 and are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Shape {
    n: u8,
    kappa1: u8,
    psi: Vec<u8>,
    boundary: Vec<(u32, u8)>,
}

struct Split {
    plus: Shape,
    minus: Shape,
    residual: u32,
}

fn crosses(a: u32, b: u32, full: u32) -> bool {
    a & b != 0 && a & !b != 0 && !a & b & full != 0 && !a & !b & full != 0
}

/// Compresses the bits of `mask` selected by `domain` into the low bits.
fn compress(mask: u32, domain: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut d = domain;
    while d != 0 {
        let b = d & d.wrapping_neg();
        if mask & b != 0 {
            out |= 1 << k;
        }
        k += 1;
        d &= d - 1;
    }
    out
}

impl Shape {
    fn full(&self) -> u32 {
        Subset::full(self.n).mask()
    }

    fn degree(&self) -> u32 {
        self.kappa1 as u32
            + self.psi.iter().map(|&a| a as u32).sum::<u32>()
            + self.boundary.iter().map(|&(_, e)| e as u32).sum::<u32>()
    }

    fn from_monomial(ctx: ModuliContext, m: &Monomial) -> Result<Shape, IntegrateError> {
        let mut s = Shape { n: ctx.n(), kappa1: 0, psi: vec![0; ctx.n() as usize], boundary: Vec::new() };
        for &(g, e) in m.factors() {
            match g {
                Generator::Psi(i) => s.psi[i as usize - 1] += e as u8,
                Generator::Kappa(1) => s.kappa1 += e as u8,
                Generator::Kappa(_) => return Err(IntegrateError::Kappa2NotRewritten),
                Generator::Boundary(b) => s.boundary.push((b.mask(), e as u8)),
            }
        }
        s.boundary.sort_unstable();
        Ok(s)
    }

    fn to_monomial(&self) -> Monomial {
        let psi = self
            .psi
            .iter()
            .enumerate()
            .map(|(i, &a)| (Generator::Psi(i as u8 + 1), a as u32));
        let kappa = std::iter::once((Generator::Kappa(1), self.kappa1 as u32));
        let bnd = self
            .boundary
            .iter()
            .map(|&(m, e)| (Generator::Boundary(Subset::from_mask(m)), e as u32));
        Monomial::from_factors(psi.chain(kappa).chain(bnd))
    }

    fn canonical_mask(&self, mask: u32) -> u32 {
        if mask & 1 != 0 {
            mask
        } else {
            self.full() & !mask
        }
    }

    /// Multiplies in `Δ_mask` (mask canonical); `None` if it crosses an existing divisor.
    fn with_boundary(&self, mask: u32) -> Option<Shape> {
        let full = self.full();
        let mut out = self.clone();
        for (b, e) in out.boundary.iter_mut() {
            if *b == mask {
                *e += 1;
                return Some(out);
            }
            if crosses(*b, mask, full) {
                return None;
            }
        }
        let at = out.boundary.partition_point(|&(b, _)| b < mask);
        out.boundary.insert(at, (mask, 1));
        Some(out)
    }

    /// Splits along `Δ_i` (canonical mask). Returns the two factor shapes
    /// before the residual self-intersection is applied, or `None` on crossing.
    fn split(&self, i_mask: u32) -> Option<Split> {
        let full = self.full();
        let c_mask = full & !i_mask;
        let np = i_mask.count_ones() as u8 + 1;
        let nm = c_mask.count_ones() as u8 + 1;
        let mut plus = Shape { n: np, kappa1: 0, psi: vec![0; np as usize], boundary: Vec::new() };
        let mut minus = Shape { n: nm, kappa1: 0, psi: vec![0; nm as usize], boundary: Vec::new() };
        for (p, &a) in self.psi.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let bit = 1u32 << p;
            if i_mask & bit != 0 {
                plus.psi[compress(bit, i_mask).trailing_zeros() as usize] += a;
            } else {
                minus.psi[compress(bit, c_mask).trailing_zeros() as usize] += a;
            }
        }
        let mut residual = 0u32;
        for &(j, e) in &self.boundary {
            if j == i_mask {
                residual += e as u32;
                continue;
            }
            if crosses(i_mask, j, full) {
                return None;
            }
            if j & !i_mask == 0 {
                // J ⊂ I
                plus.boundary.push((compress(j, i_mask), e));
            } else if i_mask & !j == 0 {
                // I ⊂ J, so J^c ⊂ I^c
                let s = compress(full & !j, c_mask);
                minus.boundary.push((minus.canonical_mask(s), e));
            } else {
                // J ∪ I is everything, so J^c ⊂ I
                let s = compress(full & !j, i_mask);
                plus.boundary.push((plus.canonical_mask(s), e));
            }
        }
        plus.boundary.sort_unstable();
        minus.boundary.sort_unstable();
        Some(Split { plus, minus, residual })
    }

    /// Relabels points so that equal-looking monomials share a cache entry.
    ///
    /// Points are sorted by (ψ exponent, membership pattern in the boundary
    /// list), ties kept in label order. Integrals are invariant under any
    /// relabeling, so the result only affects the hit rate.
    fn normalized(&self) -> Shape {
        let n = self.n as usize;
        let mut order: Vec<usize> = (0..n).collect();
        let signature = |p: usize| {
            let member: u64 = self
                .boundary
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &(b, _))| acc | (((b >> p) & 1) as u64) << k);
            (std::cmp::Reverse(self.psi[p]), std::cmp::Reverse(member))
        };
        order.sort_by_key(|&p| signature(p));
        let mut new_label = vec![0u32; n];
        for (rank, &p) in order.iter().enumerate() {
            new_label[p] = rank as u32;
        }
        let mut psi = vec![0u8; n];
        for p in 0..n {
            psi[new_label[p] as usize] = self.psi[p];
        }
        let mut boundary: Vec<(u32, u8)> = self
            .boundary
            .iter()
            .map(|&(b, e)| {
                let mut m = 0u32;
                let mut bb = b;
                while bb != 0 {
                    let p = bb.trailing_zeros() as usize;
                    m |= 1 << new_label[p];
                    bb &= bb - 1;
                }
                (self.canonical_mask(m), e)
            })
            .collect();
        boundary.sort_unstable();
        Shape { n: self.n, kappa1: self.kappa1, psi, boundary }
    }

    fn approx_bytes(&self) -> usize {
        std::mem::size_of::<Shape>() + self.psi.len() + 8 * self.boundary.len() + 48
    }
}

/// Memoizing integrator over M̄_{0,n}. Safe to share between threads.
pub struct Integrator {
    cache: Option<DashMap<Shape, Rational>>,
    bytes: AtomicUsize,
    limit: Option<usize>,
}

impl Default for Integrator {
    fn default() -> Self {
        Self::new()
    }
}

impl Integrator {
    /// Unbounded memo cache.
    pub fn new() -> Self {
        Integrator { cache: Some(DashMap::new()), bytes: AtomicUsize::new(0), limit: None }
    }

    /// No memoization at all.
    pub fn uncached() -> Self {
        Integrator { cache: None, bytes: AtomicUsize::new(0), limit: None }
    }

    /// Stops inserting once the cache holds roughly `bytes` bytes.
    pub fn with_cache_limit(bytes: usize) -> Self {
        Integrator { cache: Some(DashMap::new()), bytes: AtomicUsize::new(0), limit: Some(bytes) }
    }

    /// Honors `MZERO_CACHE_BYTES` when set to a valid integer.
    pub fn from_env() -> Self {
        match std::env::var(CACHE_BYTES_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            Some(b) => Self::with_cache_limit(b),
            None => Self::new(),
        }
    }

    pub fn cache_len(&self) -> usize {
        self.cache.as_ref().map_or(0, DashMap::len)
    }

    /// `∫_{M̄_{0,n}} poly`; terms off the top degree contribute zero.
    pub fn integrate(&self, poly: &TautPolynomial) -> Result<Rational, IntegrateError> {
        Ok(self.integrate_report(poly)?.value)
    }

    pub fn integrate_report(&self, poly: &TautPolynomial) -> Result<Integral, IntegrateError> {
        let ctx = poly.context();
        let terms: Vec<(&Monomial, &Rational)> = poly.terms().collect();
        let off_degree_terms = terms.iter().filter(|(m, _)| m.degree() != ctx.dim()).count();
        let parts: Vec<Rational> = terms
            .par_iter()
            .map(|(m, c)| Ok(self.integrate_monomial(ctx, m)? * *c))
            .collect::<Result<_, IntegrateError>>()?;
        let value = parts.into_iter().fold(Rational::zero(), |acc, x| acc + x);
        Ok(Integral { value, off_degree_terms })
    }

    pub fn integrate_monomial(&self, ctx: ModuliContext, m: &Monomial) -> Result<Rational, IntegrateError> {
        if m.degree() != ctx.dim() {
            return Ok(Rational::zero());
        }
        let shape = Shape::from_monomial(ctx, m)?;
        Ok(self.eval(&shape))
    }

    fn eval(&self, shape: &Shape) -> Rational {
        if shape.degree() != shape.n as u32 - 3 {
            return Rational::zero();
        }
        if shape.kappa1 == 0 && shape.boundary.is_empty() {
            return multinomial(shape.n as u32 - 3, shape.psi.iter().map(|&a| a as u32));
        }
        let key = shape.normalized();
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.get(&key) {
                return v.clone();
            }
        }
        let value = self.compute(&key);
        if let Some(cache) = &self.cache {
            let cost = key.approx_bytes();
            let within = self.limit.is_none_or(|l| self.bytes.load(Ordering::Relaxed) + cost <= l);
            if within {
                self.bytes.fetch_add(cost, Ordering::Relaxed);
                cache.insert(key, value.clone());
            }
        }
        value
    }

    fn compute(&self, shape: &Shape) -> Rational {
        if shape.kappa1 > 0 {
            let mut base = shape.clone();
            base.kappa1 -= 1;
            let mut acc = Rational::zero();
            for p in 0..shape.n as usize {
                let mut s = base.clone();
                s.psi[p] += 1;
                acc += self.eval(&s);
            }
            let rest = shape.full() & !1;
            let mut sub = rest;
            loop {
                let mask = sub | 1;
                let size = mask.count_ones();
                if size >= 2 && size + 2 <= shape.n as u32 {
                    if let Some(s) = base.with_boundary(mask) {
                        acc -= self.eval(&s);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            return acc;
        }
        let i_mask = shape.boundary[0].0;
        let Some(split) = shape.split(i_mask) else { return Rational::zero() };
        // one copy of Δ_I is the locus itself; the rest are normal-bundle factors
        let e = split.residual - 1;
        let dp = split.plus.n as u32 - 3;
        let dm = split.minus.n as u32 - 3;
        let (gp, gm) = (split.plus.degree(), split.minus.degree());
        if gp > dp || gm > dm {
            return Rational::zero();
        }
        let j = dp - gp;
        if j > e || e - j != dm - gm {
            return Rational::zero();
        }
        let mut plus = split.plus;
        let mut minus = split.minus;
        let node_p = plus.n as usize - 1;
        let node_m = minus.n as usize - 1;
        plus.psi[node_p] += j as u8;
        minus.psi[node_m] += (e - j) as u8;
        let left = self.eval(&plus);
        if left.is_zero() {
            return left;
        }
        let sign = if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        Rational::from_integer(sign * binomial(e, j)) * left * self.eval(&minus)
    }
}
