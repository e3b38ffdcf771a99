use mzero_core::chiodo_class::{
    bernoulli_poly, chern_component, rewrite_kappa2, seven_point_correlator, theta_edge, ChernConvention,
    ChiodoConfig, Kappa2Variant,
};
use mzero_core::fjrw_frobenius::{a_priori_survivors, multisets, vanishing_check, Label, Theory, VanishingReason, Verdict};
use mzero_core::rational::{factorial, format_rational, int, ratio};
use mzero_core::wdvv_reconstruct::{
    build_potential, evaluate_theory, format_monomial, saito_a, splittings, tau_gate, CorrelatorTable,
    PotentialMonomial, SymbolicValue, MAX_POINTS,
};
use mzero_core::{Generator, Integrator, ModuliContext, Monomial, Rational, TautPolynomial};

/// Expected value of the seven-point correlator.
pub fn reference_seven_point() -> Rational {
    ratio(221, 6561)
}

/// Expected reconstruction values, as `(insertions, coefficient, power of a)`.
pub fn reference_chain() -> Vec<(Vec<Label>, Rational, u32)> {
    use Label::*;
    vec![
        (vec![X, Y, Y, X2], int(3), 1),
        (vec![X, X, X2, X2, X2], int(6), 2),
        (vec![Y, Y, X2, X2, X2], int(-18), 2),
        (vec![X, Y, X2, X2, X2], int(0), 2),
        (vec![Y, X2, X2, X2, X2, X2], int(0), 3),
        (vec![X, X2, X2, X2, X2, X2], int(0), 3),
        (vec![X2; 7], int(216), 4),
    ]
}

/// Expected potential coefficients over `(t_1, t_X, t_Y, t_X2)`.
pub fn reference_potential() -> Vec<(PotentialMonomial, Rational, u32)> {
    vec![
        ([1, 2, 0, 0], ratio(1, 12), 0),
        ([1, 0, 2, 0], ratio(-1, 4), 0),
        ([2, 0, 0, 1], ratio(1, 12), 0),
        ([0, 3, 0, 1], ratio(1, 6), 1),
        ([0, 1, 2, 1], ratio(3, 2), 1),
        ([0, 2, 0, 3], ratio(1, 2), 2),
        ([0, 0, 2, 3], ratio(-3, 2), 2),
        ([0, 0, 0, 7], ratio(3, 70), 4),
    ]
}

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: Vec<String>, ok: String) -> Check {
    if failures.is_empty() {
        Check { name, passed: true, detail: ok }
    } else {
        Check { name, passed: false, detail: failures.join("; ") }
    }
}

fn compositions(n: usize, d: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if cur.len() == n {
        if d == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for e in 0..=d {
        cur.push(e);
        compositions(n, d - e, out, cur);
        cur.pop();
    }
}

fn oracle_equivalence(integ: &Integrator) -> Check {
    let mut failures = Vec::new();
    let mut count = 0;
    for n in 3..=8u32 {
        let ctx = ModuliContext::new(n).expect("valid n");
        let mut all = Vec::new();
        compositions(n as usize, n - 3, &mut all, &mut Vec::new());
        for exps in all {
            let m = Monomial::from_factors(
                exps.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, e)| (Generator::Psi(i as u8 + 1), *e)),
            );
            let got = integ.integrate_monomial(ctx, &m).expect("pure psi");
            let den = exps.iter().fold(factorial(0), |acc, e| acc * factorial(*e));
            let want = Rational::new(factorial(n - 3), den);
            if got != want {
                failures.push(format!("n={n} {exps:?}: {got} != {want}"));
            }
            count += 1;
        }
    }
    check("oracle_equivalence", failures, format!("{count} pure-psi monomials, n <= 8"))
}

fn kappa_consistency(integ: &Integrator) -> Check {
    let mut failures = Vec::new();
    let one = |n: u32, g: Generator, e: u32| {
        let ctx = ModuliContext::new(n).expect("valid n");
        integ.integrate(&TautPolynomial::monomial(ctx, Monomial::power(g, e), int(1))).expect("integrable")
    };
    let k1 = one(4, Generator::Kappa(1), 1);
    if k1 != int(1) {
        failures.push(format!("kappa1 on M_0,4 = {k1}"));
    }
    // adding a point twice: ∫ψ_6²ψ_7² on M̄_{0,7} minus ∫ψ_6³ on M̄_{0,6}
    let want = Rational::new(factorial(4), factorial(2) * factorial(2)) - int(1);
    let k11 = one(5, Generator::Kappa(1), 2);
    if k11 != want {
        failures.push(format!("kappa1^2 on M_0,5 = {k11}, oracle {want}"));
    }
    let ctx5 = ModuliContext::new(5).expect("valid n");
    let k2 = integ.integrate(&rewrite_kappa2(ctx5).expect("n = 5")).expect("integrable");
    if k2 != int(1) {
        failures.push(format!("kappa2 on M_0,5 = {k2}"));
    }
    check("kappa_consistency", failures, format!("kappa1 = 1, kappa1^2 = {k11}, kappa2 = {k2}"))
}

fn chiodo_sanity() -> Check {
    let mut failures = Vec::new();
    let cfg = ChiodoConfig::d4();
    let ch0 = chern_component(&cfg, 0).expect("degree 0").coefficient(&Monomial::one());
    if ch0 != int(-2) {
        failures.push(format!("ch0 = {ch0}"));
    }
    let table = [
        (2, ratio(0, 1), ratio(1, 6)),
        (2, ratio(1, 3), ratio(-1, 18)),
        (2, ratio(2, 3), ratio(-1, 18)),
        (3, ratio(1, 3), ratio(1, 27)),
        (3, ratio(2, 3), ratio(-1, 27)),
        (3, ratio(0, 1), ratio(0, 1)),
    ];
    for (d, t, want) in table {
        let got = bernoulli_poly(d, &t);
        if got != want {
            failures.push(format!("B{d}({t}) = {got}"));
        }
    }
    let tpm = [(2, int(0), int(0)), (3, ratio(2, 3), ratio(1, 3)), (4, ratio(1, 3), ratio(2, 3)), (5, int(0), int(0))];
    for (size, plus, minus) in tpm {
        let e = theta_edge(&cfg, mzero_core::Subset::from_points(1..=size)).expect("canonical");
        if e.theta_plus != plus || e.theta_minus != minus {
            failures.push(format!("|I|={size}: ({}, {})", e.theta_plus, e.theta_minus));
        }
    }
    check("chiodo_sanity", failures, "ch0 = -2, Bernoulli and theta tables match".into())
}

pub struct SevenPoint {
    pub displayed: Rational,
    pub appendix: Rational,
}

pub fn seven_point_both(integ: &Integrator, convention: ChernConvention) -> SevenPoint {
    let run = |v| seven_point_correlator(integ, v, convention).expect("seven-point class integrates");
    SevenPoint { displayed: run(Kappa2Variant::Displayed), appendix: run(Kappa2Variant::Appendix) }
}

fn reconstruction_chain(table: &mut CorrelatorTable) -> Check {
    let mut failures = Vec::new();
    for (ins, c, e) in reference_chain() {
        let want = SymbolicValue::monomial(c, e);
        let got = table.correlator(&ins).expect("reconstructible");
        if got != want {
            let names: Vec<String> = ins.iter().map(|l| l.to_string()).collect();
            failures.push(format!("<{}> = {got}, expected {want}", names.join(",")));
        }
    }
    check("reconstruction_chain", failures, "all chain values match".into())
}

fn potential_coefficients() -> Check {
    let pot = build_potential(MAX_POINTS).expect("reconstructible");
    let mut failures = Vec::new();
    for (m, c, e) in reference_potential() {
        let want = SymbolicValue::monomial(c, e);
        let got = pot.get(&m).cloned().unwrap_or_else(SymbolicValue::zero);
        if got != want {
            failures.push(format!("{}: {got}, expected {want}", format_monomial(&m)));
        }
    }
    let extra: Vec<String> = pot
        .keys()
        .filter(|m| !reference_potential().iter().any(|(r, _, _)| r == *m))
        .map(format_monomial)
        .collect();
    if !extra.is_empty() {
        failures.push(format!("unexpected terms {}", extra.join(", ")));
    }
    check("thm_potential_coeff", failures, format!("{} coefficients match", pot.len()))
}

fn vanishing_suite() -> Check {
    use Label::*;
    let mut failures = Vec::new();
    for (m, deg) in [(vec![Y, X, X, X2], Some(ratio(-3, 2))), (vec![Y, Y, Y, X2], None)] {
        match vanishing_check(Theory::D4TGmax, &m) {
            Verdict::Vanishes(VanishingReason::NonIntegralDegree { variable: 0, degree }) => {
                if deg.is_some_and(|d| d != degree) {
                    failures.push(format!("{m:?}: degree {degree}"));
                }
            }
            v => failures.push(format!("d4t-gmax {m:?}: {v:?}")),
        }
    }
    for k in 3..=MAX_POINTS {
        for m in multisets(k) {
            if m.iter().filter(|l| **l == Y).count() % 2 == 1 && vanishing_check(Theory::D4J, &m).is_allowed() {
                failures.push(format!("d4-j {m:?} survives with odd Y"));
            }
        }
    }
    let survivors = a_priori_survivors();
    if survivors.len() != 13 {
        failures.push(format!("{} a priori survivors", survivors.len()));
    }
    check("vanishing_suite", failures, "non-integral degrees, odd-Y rule, 13 survivors".into())
}

fn splitting_independence() -> Check {
    let mut reference = CorrelatorTable::new();
    let mut failures = Vec::new();
    for m in a_priori_survivors().into_iter().filter(|m| m.len() >= 4) {
        let want = reference.correlator(&m).expect("reconstructible");
        if CorrelatorTable::new().get(&m).is_some() {
            continue;
        }
        for choice in splittings(&m) {
            if let Ok(Some(v)) = CorrelatorTable::new().reconstruct_with(&m, choice) {
                if v != want {
                    failures.push(format!("{m:?} via {choice:?}: {v}"));
                }
            }
        }
    }
    check("splitting_independence", failures, "every usable splitting agrees".into())
}

fn specializations(seven_point: &Rational) -> Check {
    let mut failures = Vec::new();
    let saito = evaluate_theory(Theory::Saito, seven_point).expect("reconstructible");
    if saito.specialization.power != 1 || saito.specialization.value != saito_a() || saito_a() != ratio(-1, 36) {
        failures.push(format!("saito a = {}", saito.specialization.value));
    }
    let d4t = evaluate_theory(Theory::D4TGmax, seven_point).expect("reconstructible");
    let want_d4t = ratio(1, 6) / int(216 * 216);
    if d4t.specialization.power != 2 || d4t.specialization.value != want_d4t {
        failures.push(format!("d4t-gmax a^2 = {}", d4t.specialization.value));
    }
    let d4j = evaluate_theory(Theory::D4J, seven_point).expect("reconstructible");
    let want_d4j = reference_seven_point() / int(216);
    if d4j.specialization.power != 4 || d4j.specialization.value != want_d4j {
        failures.push(format!(
            "d4-j a^4 = {}, expected {}",
            format_rational(&d4j.specialization.value),
            format_rational(&want_d4j)
        ));
    }
    if !d4j.specialization.a_is_nonzero() {
        failures.push("d4-j a = 0".into());
    }
    check("specializations", failures, "a values match".into())
}

fn gate(theory: Theory, seven_point: &Rational) -> Check {
    let g = tau_gate(theory, seven_point);
    let name = match theory {
        Theory::D4J => "tau_gate_d4j",
        _ => "tau_gate_d4t",
    };
    Check { name, passed: g.passed, detail: g.conclusion }
}

pub struct Report {
    pub checks: Vec<Check>,
    pub seven_point: SevenPoint,
}

pub fn run(integ: &Integrator) -> Report {
    let mut checks = vec![oracle_equivalence(integ), kappa_consistency(integ), chiodo_sanity()];
    let sp = seven_point_both(integ, ChernConvention::Validated);
    let want = reference_seven_point();
    checks.push(Check {
        name: "seven_point_value",
        passed: sp.displayed == want,
        detail: format!("{} (expected {})", format_rational(&sp.displayed), format_rational(&want)),
    });
    checks.push(Check {
        name: "seven_point_variants",
        passed: true,
        detail: if sp.displayed == sp.appendix {
            "displayed and appendix kappa2 agree".into()
        } else {
            format!(
                "flagged: displayed {} != appendix {}",
                format_rational(&sp.displayed),
                format_rational(&sp.appendix)
            )
        },
    });
    let mut table = CorrelatorTable::new();
    checks.push(reconstruction_chain(&mut table));
    checks.push(potential_coefficients());
    checks.push(vanishing_suite());
    checks.push(splitting_independence());
    checks.push(specializations(&sp.displayed));
    checks.push(gate(Theory::D4J, &sp.displayed));
    checks.push(gate(Theory::D4TGmax, &sp.displayed));
    Report { checks, seven_point: sp }
}
