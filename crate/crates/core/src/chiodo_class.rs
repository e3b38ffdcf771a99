//! Chern characters of the pushforward of a universal `r`-th root of
//! `ω_log^s` on genus-zero spin curves, pushed down to M̄_{0,n}, and the
//! concave seven-point class built from them.
//!
//! The degree-`d` Chern character component of `Rπ_*𝕃` is
//!
//! ```text
//! B_{d+1}(s/r)/(d+1)! κ_d − Σ_i B_{d+1}(Θ_i)/(d+1)! ψ_i^d
//!     + Σ_{I ∋ 1} B_{d+1}(Θ_+)/(d+1)! ρ_{I*}(Σ_{i+j=d−1} (−ψ_−)^i ψ_+^j)
//! ```
//!
//! with `Θ_+` the phase of the node branch on the `I` side. The factor `r`
//! of the root stack has already been absorbed by the ramification of the
//! gluing maps. Since `R^0π_*𝕃 = 0` in the concave case,
//! `c_2(R^1π_*𝕃) = ½ ch_1² + ch_2`.
//!
//! [`ChernConvention::AsWritten`] instead orients the node term as
//! `(−ψ_+)^i ψ_−^j` and takes `½ ch_1² − ch_2`. That class does not reproduce
//! known `r`-spin correlators (see the tests) and is kept for comparison.
//!
//! Everything that is not a product of divisors (`κ_2` and the node classes
//! `ρ_*ψ_±`) is rewritten in divisors so that [`crate::mgn_integrate`] can
//! integrate it.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::mgn_integrate::{pullback_forget_last, IntegrateError, Integrator, Side};
use crate::rational::{binomial, factorial, frac, int, ratio, Rational};
use crate::taut_expr::{parse_expression, ExprError, Generator, ModuliContext, Monomial, Subset, TautPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChiodoError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("Chern character component of degree {0} is not supported (only 0, 1, 2)")]
    DegreeOutOfRange(u32),
    #[error("boundary {0} is not a canonical stable index set")]
    NotCanonical(Subset),
    #[error("cannot choose the auxiliary pair: {0}")]
    AuxiliaryPair(String),
    #[error("kappa2 rewriting needs n >= 5 (the requested variant needs n = 7), got n = {0}")]
    UnsupportedKappa2(u8),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// How the sum over cut graphs is organized. Both give the same class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutGraphSum {
    /// One term per canonical `I ∋ 1` weighted by `B(Θ_+)` of the `I` side.
    #[default]
    HalfGraph,
    /// `½ Σ` over both orientations of every cut.
    OrientationSummed,
}

/// Orientation of the node term in `ch_2` and the sign used in `c_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChernConvention {
    /// `ch_2` node term `B_3(Θ_+)/6 ρ_*(ψ_+ − ψ_−)`, `c_2 = ½ ch_1² + ch_2`.
    #[default]
    Validated,
    /// `ch_2` node term `B_3(Θ_+)/6 ρ_*(ψ_− − ψ_+)`, `c_2 = ½ ch_1² − ch_2`.
    AsWritten,
}

/// Which divisor expression of `κ_2` on M̄_{0,7} to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kappa2Variant {
    /// Pulled back twice from `κ_2 = κ_1 Δ_{123}` on M̄_{0,5}.
    #[default]
    Displayed,
    /// Same, but with `Δ_{1,7}` in place of `Δ_{6,7}` inside the first factor.
    Appendix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiodoConfig {
    n: u8,
    r: u32,
    s: u32,
    theta: Vec<Rational>,
    pub cut_sum: CutGraphSum,
    pub convention: ChernConvention,
}

impl ChiodoConfig {
    pub fn new(n: u32, r: u32, s: u32, theta: Vec<Rational>) -> Result<Self, ChiodoError> {
        ModuliContext::new(n)?;
        if r == 0 {
            return Err(ChiodoError::InvalidConfig("r must be at least 1".into()));
        }
        if theta.len() != n as usize {
            return Err(ChiodoError::InvalidConfig(format!("expected {n} phases, got {}", theta.len())));
        }
        let r_big = BigInt::from(r);
        for t in &theta {
            if *t < Rational::zero() || *t >= Rational::one() {
                return Err(ChiodoError::InvalidConfig(format!("phase {t} outside [0,1)")));
            }
            if (&r_big % t.denom()) != BigInt::zero() {
                return Err(ChiodoError::InvalidConfig(format!("phase {t} has denominator not dividing r = {r}")));
            }
        }
        Ok(ChiodoConfig { n: n as u8, r, s, theta, cut_sum: CutGraphSum::HalfGraph, convention: ChernConvention::Validated })
    }

    /// Seven narrow insertions of phase 2/3 for a cube root of `ω_log`.
    pub fn d4() -> Self {
        Self::new(7, 3, 1, vec![ratio(2, 3); 7]).expect("valid configuration")
    }

    pub fn with_cut_sum(mut self, cut_sum: CutGraphSum) -> Self {
        self.cut_sum = cut_sum;
        self
    }

    pub fn with_convention(mut self, convention: ChernConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn ctx(&self) -> ModuliContext {
        ModuliContext::new(self.n as u32).expect("validated")
    }

    pub fn q(&self) -> Rational {
        ratio(self.s as i64, self.r as i64)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }
}

/// Phases on the two branches of the node of a cut along `Δ_I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecoration {
    pub subset: Subset,
    pub theta_plus: Rational,
    pub theta_minus: Rational,
}

fn bernoulli_numbers(upto: u32) -> Vec<Rational> {
    // Σ_{k=0}^{m} C(m+1, k) B_k = 0, B_0 = 1, so B_1 = −1/2
    let mut b = vec![Rational::one()];
    for m in 1..=upto {
        let s = (0..m).fold(Rational::zero(), |acc, k| {
            acc + Rational::from_integer(binomial(m + 1, k)) * &b[k as usize]
        });
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// The Bernoulli polynomial `B_d(t)` with `B_1(t) = t − 1/2`.
pub fn bernoulli_poly(d: u32, t: &Rational) -> Rational {
    let b = bernoulli_numbers(d);
    let mut acc = Rational::zero();
    let mut t_pow = Rational::one();
    // Σ_k C(d,k) B_{d−k} t^k
    for k in 0..=d {
        acc += Rational::from_integer(binomial(d, k)) * &b[(d - k) as usize] * &t_pow;
        t_pow *= t;
    }
    acc
}

/// `Θ_+` for the branch on the side carrying `side`: the unique value in
/// `{0, 1/r, …, (r−1)/r}` with `q(|side|−1) − Σ_{i∈side} Θ_i − Θ_+ ∈ ℤ`.
fn theta_on_side(cfg: &ChiodoConfig, side: Subset) -> Rational {
    let mut x = cfg.q() * int(side.len() as i64 - 1);
    for p in side.points() {
        x -= &cfg.theta[p as usize - 1];
    }
    frac(&x)
}

pub fn theta_edge(cfg: &ChiodoConfig, subset: Subset) -> Result<EdgeDecoration, ChiodoError> {
    check_canonical(cfg.ctx(), subset)?;
    let theta_plus = theta_on_side(cfg, subset);
    let theta_minus = theta_on_side(cfg, subset.complement(cfg.n));
    Ok(EdgeDecoration { subset, theta_plus, theta_minus })
}

fn check_canonical(ctx: ModuliContext, k: Subset) -> Result<(), ChiodoError> {
    match ctx.canonicalize_boundary(k) {
        Ok(Generator::Boundary(c)) if c == k => Ok(()),
        _ => Err(ChiodoError::NotCanonical(k)),
    }
}

fn boundary_product(ctx: ModuliContext, a: Subset, b: Subset) -> Result<Monomial, ChiodoError> {
    Ok(Monomial::from_factors([(ctx.canonicalize_boundary(a)?, 1), (ctx.canonicalize_boundary(b)?, 1)]))
}

fn pick_pair(pool: Subset, given: Option<(u32, u32)>, what: &str) -> Result<(u32, u32), ChiodoError> {
    match given {
        Some((a, b)) => {
            if a == b || !pool.contains(a) || !pool.contains(b) {
                return Err(ChiodoError::AuxiliaryPair(format!("({a}, {b}) is not a pair of distinct points of {what} {pool}")));
            }
            Ok((a, b))
        }
        None => {
            let mut it = pool.points();
            match (it.next(), it.next()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(ChiodoError::AuxiliaryPair(format!("{what} {pool} has fewer than two points"))),
            }
        }
    }
}

/// `ρ_{K*}(ψ_±)` as a sum of products of two boundary divisors, for `K ∋ 1`.
///
/// `pair` is `(r, s) ⊂ K∖{1}` for the plus branch and `(t, u) ⊄ K` for the
/// minus branch; `None` takes the two smallest eligible points. The result
/// does not depend on the choice.
pub fn pushforward_psi_pm(
    ctx: ModuliContext,
    k: Subset,
    side: Side,
    pair: Option<(u32, u32)>,
) -> Result<TautPolynomial, ChiodoError> {
    check_canonical(ctx, k)?;
    let n = ctx.n();
    let kc = k.complement(n);
    let one = Subset::from_points([1]);
    let mut out = TautPolynomial::zero(ctx);
    match side {
        Side::Plus => {
            if k.len() <= 2 {
                return Ok(out);
            }
            let (r, s) = pick_pair(k.difference(one), pair, "K∖{1}")?;
            let rs = Subset::from_points([r, s]);
            // {1,r,s} ⊆ I ⊊ K
            for extra in k.difference(one.union(rs)).subsets() {
                let i = extra.union(one).union(rs);
                if i != k {
                    out.add_term(boundary_product(ctx, k, i)?, Rational::one());
                }
            }
            // 1 ∈ I ⊆ K∖{r,s}
            for extra in k.difference(one.union(rs)).subsets() {
                let i = extra.union(one);
                out.add_term(boundary_product(ctx, k, i.union(kc))?, Rational::one());
            }
        }
        Side::Minus => {
            if kc.len() <= 2 {
                return Ok(out);
            }
            let (t, u) = pick_pair(kc, pair, "K^c")?;
            let free = kc.difference(Subset::from_points([t, u]));
            for i in free.subsets().filter(|s| !s.is_empty()) {
                out.add_term(boundary_product(ctx, k, i.union(k))?, Rational::one());
            }
        }
    }
    Ok(out)
}

/// Shortcut forms valid when the relevant factor is M̄_{0,4}, where every
/// `ψ` is the point class: `ρ_{K*}ψ_+ = ψ_1 Δ_K` for `|K| = 3` and
/// `ρ_{K*}ψ_− = ψ_b Δ_K` for `|K^c| = 3`, `b ∉ K`. `None` outside those cases.
pub fn pushforward_psi_on_four_point_factor(
    ctx: ModuliContext,
    k: Subset,
    side: Side,
) -> Result<Option<TautPolynomial>, ChiodoError> {
    check_canonical(ctx, k)?;
    let delta = ctx.canonicalize_boundary(k)?;
    let kc = k.complement(ctx.n());
    let point = match side {
        Side::Plus if k.len() == 3 => 1,
        Side::Minus if kc.len() == 3 => kc.points().next().expect("nonempty"),
        _ => return Ok(None),
    };
    let m = Monomial::from_factors([(Generator::Psi(point as u8), 1), (delta, 1)]);
    Ok(Some(TautPolynomial::monomial(ctx, m, Rational::one())))
}

/// `κ_2` on M̄_{0,n} in divisors, from `κ_2 = κ_1 Δ_{123}` on M̄_{0,5}
/// pulled back along forgetful maps (`κ_2 = τ^*κ_2 + ψ_{n}^2` at each step).
pub fn rewrite_kappa2(ctx: ModuliContext) -> Result<TautPolynomial, ChiodoError> {
    rewrite_kappa2_variant(ctx, Kappa2Variant::Displayed)
}

pub fn rewrite_kappa2_variant(ctx: ModuliContext, variant: Kappa2Variant) -> Result<TautPolynomial, ChiodoError> {
    match variant {
        Kappa2Variant::Displayed => {
            if ctx.n() < 5 {
                return Err(ChiodoError::UnsupportedKappa2(ctx.n()));
            }
            let base = ModuliContext::new(5)?;
            let mut k2 = parse_expression(base, "kappa1*b{1,2,3}")?;
            for m in 6..=ctx.n() as u32 {
                let pulled = pullback_forget_last(&k2)?;
                let sq = TautPolynomial::monomial(pulled.context(), Monomial::power(Generator::Psi(m as u8), 2), Rational::one());
                k2 = &pulled + &sq;
            }
            Ok(k2)
        }
        Kappa2Variant::Appendix => {
            if ctx.n() != 7 {
                return Err(ChiodoError::UnsupportedKappa2(ctx.n()));
            }
            Ok(parse_expression(
                ctx,
                "(kappa1 - psi7 - (psi6 - b{1,7}))*(b{1,2,3,6,7} + b{1,2,3,6} + b{1,2,3,7} + b{1,2,3}) \
                 + (psi6 - b{1,2,3,4,5})^2 + psi7^2",
            )?)
        }
    }
}

/// Node class `ρ_*(ψ_+ − ψ_−)` for a cut whose plus branch sits on the side
/// carrying `plus_side` (not necessarily canonical).
fn node_psi_difference(ctx: ModuliContext, plus_side: Subset) -> Result<TautPolynomial, ChiodoError> {
    let (k, plus, minus) = if plus_side.contains(1) {
        (plus_side, Side::Plus, Side::Minus)
    } else {
        (plus_side.complement(ctx.n()), Side::Minus, Side::Plus)
    };
    let a = pushforward_psi_pm(ctx, k, plus, None)?;
    let b = pushforward_psi_pm(ctx, k, minus, None)?;
    Ok(&a - &b)
}

/// Degree-`d` component of `ch(R^•π_*𝕃)` on M̄_{0,n}, `d ∈ {0,1,2}`.
/// `κ_2` is left as a generator; node classes are already in divisors.
pub fn chern_component(cfg: &ChiodoConfig, d: u32) -> Result<TautPolynomial, ChiodoError> {
    if d > 2 {
        return Err(ChiodoError::DegreeOutOfRange(d));
    }
    let ctx = cfg.ctx();
    let n = cfg.n as u32;
    let fact = Rational::from_integer(factorial(d + 1));
    let b = |t: &Rational| bernoulli_poly(d + 1, t) / &fact;
    let mut out = TautPolynomial::zero(ctx);
    if d == 0 {
        // κ_0 = 2g − 2 + n
        out.add_term(Monomial::one(), b(&cfg.q()) * int(n as i64 - 2));
    } else {
        out.add_term(Monomial::generator(Generator::Kappa(d as u8)), b(&cfg.q()));
    }
    for i in 1..=n {
        out.add_term(Monomial::power(Generator::Psi(i as u8), d), -b(&cfg.theta[i as usize - 1]));
    }
    if d == 0 {
        return Ok(out);
    }
    let cuts: Vec<(Subset, Rational)> = match cfg.cut_sum {
        CutGraphSum::HalfGraph => ctx
            .boundary_indices()
            .into_iter()
            .map(|s| (s, b(&theta_on_side(cfg, s))))
            .collect(),
        CutGraphSum::OrientationSummed => {
            let half = ratio(1, 2);
            let mut v = Vec::new();
            for s in ctx.boundary_indices() {
                for side in [s, s.complement(cfg.n)] {
                    v.push((side, b(&theta_on_side(cfg, side)) * &half));
                }
            }
            v
        }
    };
    for (plus_side, w) in cuts {
        if w.is_zero() {
            continue;
        }
        let class = if d == 1 {
            TautPolynomial::generator(ctx, ctx.canonicalize_boundary(plus_side)?)
        } else {
            match cfg.convention {
                ChernConvention::Validated => node_psi_difference(ctx, plus_side)?,
                ChernConvention::AsWritten => -&node_psi_difference(ctx, plus_side)?,
            }
        };
        out = &out + &class.scale(&w);
    }
    Ok(out)
}

/// `c_2(R^1π_*𝕃)` with `κ_2` rewritten in divisors.
pub fn second_chern_class(cfg: &ChiodoConfig, variant: Kappa2Variant) -> Result<TautPolynomial, ChiodoError> {
    let ch1 = chern_component(cfg, 1)?;
    let ch2 = chern_component(cfg, 2)?;
    let half = ch1.square().scale(&ratio(1, 2));
    let c2 = match cfg.convention {
        ChernConvention::Validated => &half + &ch2,
        ChernConvention::AsWritten => &half - &ch2,
    };
    let k2 = rewrite_kappa2_variant(cfg.ctx(), variant)?;
    Ok(c2.substitute(Generator::Kappa(2), &k2)?)
}

/// The concave class `c_2(R^1π_*𝕃_x) c_2(R^1π_*𝕃_y) = c_2²`, homogeneous of degree 4.
pub fn lambda_class(cfg: &ChiodoConfig, variant: Kappa2Variant) -> Result<TautPolynomial, ChiodoError> {
    Ok(second_chern_class(cfg, variant)?.square())
}

/// `⟨X², …, X²⟩_0` of the `(D4, ⟨J⟩)` theory: the integral of [`lambda_class`]
/// for seven phases `2/3` of a cube root.
pub fn seven_point_correlator(
    integrator: &Integrator,
    variant: Kappa2Variant,
    convention: ChernConvention,
) -> Result<Rational, ChiodoError> {
    let lambda = lambda_class(&ChiodoConfig::d4().with_convention(convention), variant)?;
    Ok(integrator.integrate(&lambda)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: u32) -> ModuliContext {
        ModuliContext::new(n).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli_poly(2, &int(0)), ratio(1, 6));
        assert_eq!(bernoulli_poly(3, &ratio(2, 3)), ratio(-1, 27));
        assert_eq!(bernoulli_poly(1, &ratio(1, 3)), ratio(-1, 6));
        assert_eq!(bernoulli_poly(1, &int(0)), ratio(-1, 2));
        assert_eq!(bernoulli_poly(2, &ratio(1, 3)), ratio(-1, 18));
        assert_eq!(bernoulli_poly(2, &ratio(2, 3)), ratio(-1, 18));
        assert_eq!(bernoulli_poly(3, &ratio(1, 3)), ratio(1, 27));
        assert_eq!(bernoulli_poly(3, &int(0)), int(0));
        assert_eq!(bernoulli_poly(4, &int(0)), ratio(-1, 30));
    }

    #[test]
    fn config_validation() {
        assert!(ChiodoConfig::new(7, 3, 1, vec![ratio(1, 2); 7]).is_err());
        assert!(ChiodoConfig::new(7, 3, 1, vec![int(1); 7]).is_err());
        assert!(ChiodoConfig::new(7, 3, 1, vec![ratio(2, 3); 6]).is_err());
        assert!(ChiodoConfig::new(7, 0, 1, vec![int(0); 7]).is_err());
        assert_eq!(ChiodoConfig::d4().q(), ratio(1, 3));
    }

    #[test]
    fn theta_table() {
        let cfg = ChiodoConfig::d4();
        let expect = [(2, (0, 1), (0, 1)), (3, (2, 3), (1, 3)), (4, (1, 3), (2, 3)), (5, (0, 1), (0, 1))];
        for (size, plus, minus) in expect {
            let s = Subset::from_points(1..=size);
            let e = theta_edge(&cfg, s).unwrap();
            assert_eq!(e.theta_plus, ratio(plus.0, plus.1), "|I| = {size}");
            assert_eq!(e.theta_minus, ratio(minus.0, minus.1), "|I| = {size}");
        }
        assert!(theta_edge(&cfg, Subset::from_points([2, 3])).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let c = ctx(7);
        let k12 = Subset::from_points([1, 2]);
        assert!(pushforward_psi_pm(c, k12, Side::Plus, None).unwrap().is_zero());
        let k5 = Subset::from_points(1..=5);
        assert!(pushforward_psi_pm(c, k5, Side::Minus, None).unwrap().is_zero());
        let k123 = Subset::from_points([1, 2, 3]);
        let got = pushforward_psi_pm(c, k123, Side::Plus, Some((2, 3))).unwrap();
        assert_eq!(got, parse_expression(c, "b{1,2,3}*b{1,4,5,6,7}").unwrap());
    }

    #[test]
    fn pushforward_rejects_bad_pairs() {
        let c = ctx(7);
        let k = Subset::from_points([1, 2, 3, 4]);
        assert!(pushforward_psi_pm(c, k, Side::Plus, Some((1, 2))).is_err());
        assert!(pushforward_psi_pm(c, k, Side::Plus, Some((2, 2))).is_err());
        assert!(pushforward_psi_pm(c, k, Side::Minus, Some((2, 5))).is_err());
        assert!(pushforward_psi_pm(c, Subset::from_points([2, 3, 4]), Side::Plus, None).is_err());
    }

    #[test]
    fn four_point_factor_shortcuts() {
        let c = ctx(7);
        let k = Subset::from_points([1, 2, 3]);
        let p = pushforward_psi_on_four_point_factor(c, k, Side::Plus).unwrap().unwrap();
        assert_eq!(p, parse_expression(c, "psi1*b{1,2,3}").unwrap());
        let k4 = Subset::from_points([1, 2, 3, 4]);
        let m = pushforward_psi_on_four_point_factor(c, k4, Side::Minus).unwrap().unwrap();
        assert_eq!(m, parse_expression(c, "psi5*b{1,2,3,4}").unwrap());
        assert!(pushforward_psi_on_four_point_factor(c, k4, Side::Plus).unwrap().is_none());
    }

    #[test]
    fn kappa2_expansion_matches_closed_form() {
        let c = ctx(7);
        let displayed = parse_expression(
            c,
            "(kappa1 - psi7 - (psi6 - b{6,7}))*(b{1,2,3} + b{1,2,3,7} + b{1,2,3,6} + b{1,2,3,6,7}) \
             + (psi6 - b{6,7})^2 + psi7^2",
        )
        .unwrap();
        let k2 = rewrite_kappa2(c).unwrap();
        assert_eq!(k2, displayed);
        assert!(k2.is_homogeneous_of_degree(2));
        assert!(rewrite_kappa2(ctx(4)).is_err());
        assert!(rewrite_kappa2_variant(ctx(6), Kappa2Variant::Appendix).is_err());
        assert_ne!(rewrite_kappa2_variant(c, Kappa2Variant::Appendix).unwrap(), k2);
    }

    #[test]
    fn chern_degree_zero() {
        let ch0 = chern_component(&ChiodoConfig::d4(), 0).unwrap();
        assert_eq!(ch0, TautPolynomial::constant(ctx(7), int(-2)));
        assert!(matches!(chern_component(&ChiodoConfig::d4(), 3), Err(ChiodoError::DegreeOutOfRange(3))));
    }

    #[test]
    fn chern_degree_one_coefficients() {
        let cfg = ChiodoConfig::d4();
        let c = cfg.ctx();
        let ch1 = chern_component(&cfg, 1).unwrap();
        assert_eq!(ch1.coefficient(&Monomial::generator(Generator::Kappa(1))), ratio(-1, 36));
        for i in 1..=7u8 {
            assert_eq!(ch1.coefficient(&Monomial::generator(Generator::Psi(i))), ratio(1, 36));
        }
        let d12 = Monomial::generator(c.boundary([1, 2]).unwrap());
        let d123 = Monomial::generator(c.boundary([1, 2, 3]).unwrap());
        assert_eq!(ch1.coefficient(&d12), ratio(1, 12));
        assert_eq!(ch1.coefficient(&d123), ratio(-1, 36));
    }

    #[test]
    fn chern_degree_two_has_no_size_two_boundary_piece() {
        let cfg = ChiodoConfig::d4();
        let c = cfg.ctx();
        let ch2 = chern_component(&cfg, 2).unwrap();
        // B_3(0) = 0: no product Δ_K·Δ_J with |K| = 2 or |K| = 5 survives
        for (m, _) in ch2.terms() {
            let bnd: Vec<Subset> = m
                .generators()
                .filter_map(|g| if let Generator::Boundary(s) = g { Some(s) } else { None })
                .collect();
            if bnd.len() == 2 {
                assert!(bnd.iter().any(|s| s.len() == 3 || s.len() == 4), "{m}");
            }
        }
        assert_eq!(ch2.coefficient(&Monomial::generator(Generator::Kappa(2))), ratio(1, 162));
        assert_eq!(ch2.coefficient(&Monomial::power(Generator::Psi(1), 2)), ratio(1, 162));
        let _ = c;
    }
}
