//! The standing assumptions on a pair `(R, t)` as executable checks, and
//! factorisation of elements of `(1+tR)^x` into factors `1 + tw` with `w` a
//! unit.

use rand::Rng;
use serde_json::json;

use super::stability::weak_stability_sampled;
use super::{rng, run_cases, sample, VerificationReport};
use crate::error::{Error, Result};
use crate::ring::context::LocalisationContext;
use crate::ring::poly::{Monomial, Poly};
use crate::ring::ratfunc::RatFunc;
use crate::ring::{Element, RingDescriptor, Value};
use crate::symbol::derive::auxiliary_units;
use crate::symbol::SymbolWindow;

/// How a factorisation was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorBranch {
    /// `f = 1 + ta` with `a` already a unit.
    Unit,
    /// `f = (1+vt)(1+wt)` with `v` found by search.
    Stable,
    /// A denominator of `a` was traded for a unit factor first.
    Reduced,
    /// `f = 1`.
    Empty,
}

impl FactorBranch {
    pub fn name(self) -> &'static str {
        match self {
            FactorBranch::Unit => "unit",
            FactorBranch::Stable => "stable",
            FactorBranch::Reduced => "reduced",
            FactorBranch::Empty => "empty",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Factorisation {
    /// The `w_i`, units of `R` with `f = prod (1 + t w_i)`.
    pub ws: Vec<Element>,
    pub branch: FactorBranch,
}

impl Factorisation {
    /// `prod (1 + t w_i)`.
    pub fn product(&self, ctx: &LocalisationContext) -> Element {
        let one = ctx.base().one();
        self.ws.iter().fold(one.clone(), |acc, w| acc * (&one + ctx.t() * w))
    }
}

fn exponents(spec_ring: &RingDescriptor, a: &Element) -> Option<Vec<i64>> {
    let spec = spec_ring.ratfunc_spec()?;
    let f = a.as_ratfunc()?;
    let (_, en) = spec.strip_params(f.num());
    let (_, ed) = spec.strip_params(f.den());
    Some(en.iter().zip(&ed).map(|(&x, &y)| x as i64 - y as i64).collect())
}

/// Writes `f` in `(1+tR)^x` as a product of factors `1 + t w` with `w` a
/// unit of `R`.
///
/// When `a = (f-1)/t` is not a unit, units `v` with `a - v` and `1 + vt`
/// units are searched (at most `budget` candidates, constants first) and
/// `f = (1+vt)(1+wt)` with `w = (a-v)/(1+tv)`. If `a` has an inverted
/// parameter `s` in its denominator, a relation `s + ct = w' s'` with
/// another inverted parameter `s'` and constants `c, w'` is used to split
/// off `(1 + (c/s) t)^k` and recurse in the ring with `s` no longer inverted.
pub fn factor_one_plus_t(ctx: &LocalisationContext, f: &Element, budget: usize) -> Result<Factorisation> {
    let f = ctx.to_base(f)?;
    if !ctx.in_one_plus_t(&f) {
        return Err(Error::Precondition(format!("{f} is not a unit congruent to 1 mod {}", ctx.t())));
    }
    let (ws, branch) = factor_in(ctx.base(), ctx.t(), &f, budget)?;
    let ws = ws.iter().map(|w| ctx.to_base(w)).collect::<Result<Vec<_>>>()?;
    let out = Factorisation { ws, branch };
    debug_assert_eq!(out.product(ctx), f);
    Ok(out)
}

fn factor_in(ring: &RingDescriptor, t: &Element, f: &Element, budget: usize) -> Result<(Vec<Element>, FactorBranch)> {
    let one = ring.one();
    if f.is_one() {
        return Ok((vec![], FactorBranch::Empty));
    }
    let a = (f - &one).div(t)?;
    if a.is_unit() {
        return Ok((vec![a], FactorBranch::Unit));
    }
    let exps = exponents(ring, &a);
    let in_a = exps.as_ref().is_none_or(|e| e.iter().all(|&k| k >= 0));
    if in_a {
        let good = |v: &Element| v.is_unit() && (&a - v).is_unit() && (&one + v * t).is_unit();
        for v in auxiliary_units(ring).into_iter().take(budget) {
            if good(&v) {
                let w = (&a - &v).div(&(&one + t * &v))?;
                return Ok((vec![v, w], FactorBranch::Stable));
            }
        }
        return Err(Error::SearchExhausted(format!("no splitting unit for 1+({a})*({t}) within {budget} candidates")));
    }
    reduce_denominator(ring, t, f, &a, &exps.unwrap(), budget)
}

fn reduce_denominator(
    ring: &RingDescriptor,
    t: &Element,
    f: &Element,
    a: &Element,
    exps: &[i64],
    budget: usize,
) -> Result<(Vec<Element>, FactorBranch)> {
    let spec = ring.ratfunc_spec().unwrap();
    let p = spec.p;
    let i = (0..exps.len()).rev().find(|&i| exps[i] < 0).unwrap();
    let alpha = -exps[i];
    let ti = &spec.inverted[i];
    let tpoly = t
        .as_ratfunc()
        .filter(|r| r.den().is_one())
        .map(|r| r.num().clone())
        .ok_or_else(|| Error::Unsupported(format!("t = {t} is not a polynomial")))?;
    let mut found = None;
    'search: for (j, tj) in spec.inverted.iter().enumerate() {
        if j == i {
            continue;
        }
        for c in 1..p {
            for w in 1..p {
                let lhs = ti.add(&tpoly.scale(c));
                if lhs == tj.scale(w) {
                    found = Some(c);
                    break 'search;
                }
            }
        }
    }
    let c = found.ok_or_else(|| {
        Error::SearchExhausted(format!("{a} has a denominator but no inverted parameter is associated to it mod {t}"))
    })?;
    let ti_el = ring.element(Value::Frac(RatFunc::from_poly(ti.clone())))?;
    let g_w = ring.from_int(c as i64).div(&ti_el)?;
    let g = ring.one() + &g_w * t;
    let v = f * &g.pow(-alpha)?;
    let smaller = RingDescriptor::ratfunc(spec.without_inverted(ti));
    let v_small = smaller.coerce(&v)?;
    let t_small = smaller.coerce(t)?;
    let (rest, _) = factor_in(&smaller, &t_small, &v_small, budget)?;
    let mut ws = vec![g_w; alpha as usize];
    for w in rest {
        ws.push(ring.coerce(&w)?);
    }
    Ok((ws, FactorBranch::Reduced))
}

/// A seeded random element of `(1+tR)^x`: `(D + tN)/D` with `D` an allowed
/// denominator and `N` arbitrary, of total degree at most `deg`.
pub fn random_one_plus_t(ctx: &LocalisationContext, rng: &mut impl Rng, deg: u32) -> Result<Element> {
    let spec = ctx
        .base()
        .ratfunc_spec()
        .ok_or_else(|| Error::Unsupported("random sampling needs a rational-function ring".into()))?
        .clone();
    let tdeg = ctx.t().as_ratfunc().map(|r| r.num().total_degree()).unwrap_or(1);
    let nv = spec.vars.len();
    let monos = |d: u32| -> Vec<Monomial> {
        let mut out = vec![];
        let mut e = [0u16; 4];
        fn rec(v: usize, nv: usize, left: u32, e: &mut [u16; 4], out: &mut Vec<Monomial>) {
            if v == nv {
                out.push(Monomial(*e));
                return;
            }
            for k in 0..=left {
                e[v] = k as u16;
                rec(v + 1, nv, left - k, e, out);
            }
            e[v] = 0;
        }
        rec(0, nv, d, &mut e, &mut out);
        out
    };
    let random_poly = |rng: &mut dyn rand::RngCore, d: u32| -> Poly {
        let terms = monos(d).into_iter().map(|m| (m, rng.gen_range(0..spec.p))).collect();
        Poly::from_terms(spec.p, terms)
    };
    for _ in 0..10_000 {
        let den = random_poly(rng, deg);
        if den.is_zero() {
            continue;
        }
        let den_f = RatFunc::new(Poly::one(spec.p), den.clone())?;
        if !spec.contains(&den_f) {
            continue;
        }
        let num = random_poly(rng, deg.saturating_sub(tdeg));
        let t_poly = ctx.t().as_ratfunc().unwrap().num().clone();
        let f = RatFunc::new(den.add(&t_poly.mul(&num)), den)?;
        let f = ctx.base().element(Value::Frac(f))?;
        if ctx.in_one_plus_t(&f) {
            return Ok(f);
        }
    }
    Err(Error::SearchExhausted("could not sample an element of (1+tR)^x".into()))
}

fn check_factorisation(ctx: &LocalisationContext, f: &Element, budget: usize) -> std::result::Result<Factorisation, String> {
    let fac = factor_one_plus_t(ctx, f, budget).map_err(|e| e.to_string())?;
    if let Some(w) = fac.ws.iter().find(|w| !w.is_unit()) {
        return Err(format!("factor coefficient {w} is not a unit"));
    }
    if fac.product(ctx) != *f {
        return Err(format!("factors multiply to {} instead", fac.product(ctx)));
    }
    Ok(fac)
}

/// (A3) on `count` seeded random elements of `(1+tR)^x` of degree at most `deg`.
pub fn check_a3_random(ctx: &LocalisationContext, count: usize, deg: u32, seed: u64, budget: usize) -> Result<VerificationReport> {
    let mut r = rng(seed);
    let fs: Vec<Element> = (0..count).map(|_| random_one_plus_t(ctx, &mut r, deg)).collect::<Result<_>>()?;
    let mut rep = VerificationReport::new("a3", ctx.base())
        .param("t", ctx.t().to_string())
        .param("samples", count as u64)
        .param("max_degree", deg)
        .seed(seed)
        .budget(budget as u64);
    record_factorisations(&mut rep, ctx, &fs, budget);
    Ok(rep.finish())
}

/// (A3) on window elements of `(1+tR)^x`.
pub fn check_a3(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    let w = w.over(ctx.base())?;
    let pool: Vec<Element> = w.units()?.into_iter().filter(|f| ctx.in_one_plus_t(f)).collect();
    let (fs, exhaustive) = sample(&pool, budget, seed);
    let mut rep = VerificationReport::new("a3", ctx.base())
        .param("t", ctx.t().to_string())
        .param("exhaustive", exhaustive)
        .window(w.params())
        .seed(seed)
        .budget(budget as u64);
    record_factorisations(&mut rep, ctx, &fs, budget);
    Ok(rep.finish())
}

fn record_factorisations(rep: &mut VerificationReport, ctx: &LocalisationContext, fs: &[Element], budget: usize) {
    let results = run_cases(fs, |f| check_factorisation(ctx, f, budget));
    for (f, r) in fs.iter().zip(results) {
        rep.cases_run += 1;
        match r {
            Ok(fac) => {
                rep.count(fac.branch.name(), 1);
                if rep.counted(fac.branch.name()) <= 2 {
                    let ws: Vec<String> = fac.ws.iter().map(|w| w.to_string()).collect();
                    rep.evidence(json!({ "f": f.to_string(), "w": ws, "branch": fac.branch.name() }));
                }
            }
            Err(e) => rep.fail(vec![f.to_string()], e),
        }
    }
}

/// (A1): window elements of `R_t` with `nu_t >= 0` lie in `R`.
pub fn check_a1(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    let w = w.over(ctx.localised())?;
    let pool: Vec<Element> = w.elements()?.into_iter().filter(|x| !x.is_zero()).collect();
    let (xs, exhaustive) = sample(&pool, budget, seed);
    let mut rep = VerificationReport::new("a1", ctx.localised())
        .param("t", ctx.t().to_string())
        .param("exhaustive", exhaustive)
        .window(w.params())
        .seed(seed)
        .budget(budget as u64);
    for x in &xs {
        rep.cases_run += 1;
        let nu = ctx.valuation(x)?;
        if nu < 0 {
            rep.count("excluded", 1);
            continue;
        }
        match ctx.to_base(x) {
            Ok(_) => rep.count("in_R", 1),
            Err(_) => rep.fail(vec![x.to_string()], format!("valuation {nu} >= 0 but not in R")),
        }
    }
    Ok(rep.finish())
}

/// (A2): weak 5-fold stability of `R`, sampled. The comparison
/// `K_2^M(R) = K_2(R)` is an identification, not something computed here.
pub fn check_a2(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    let rep = weak_stability_sampled(ctx.base(), 5, w, budget, seed)?;
    let mut out = VerificationReport::new("a2", ctx.base())
        .param("t", ctx.t().to_string())
        .param("k2_comparison", "identified, not computed")
        .window(rep.params.window.clone())
        .seed(seed)
        .budget(budget as u64);
    out.absorb("weak-5-fold", rep);
    Ok(out.finish())
}

/// (A4): every generator of `(R/tR)^x` (all units of a finite residue
/// ring, window units otherwise) has a unit preimage in `R`.
pub fn check_a4(ctx: &LocalisationContext, w: &SymbolWindow) -> Result<VerificationReport> {
    let res = ctx.residue_ring();
    let (gens, window) = if res.is_finite() {
        (res.units()?, json!({ "kind": "full" }))
    } else {
        let rw = w.over(res)?;
        (rw.units()?, rw.params())
    };
    let mut rep = VerificationReport::new("a4", ctx.base()).param("t", ctx.t().to_string()).window(window);
    rep = rep.param("residue_ring", res.to_string());
    for z in &gens {
        rep.cases_run += 1;
        let lift = match ctx.lift_residue(z) {
            Ok(l) => l,
            Err(e) => {
                rep.fail(vec![z.to_string()], e);
                continue;
            }
        };
        if !lift.is_unit() {
            rep.fail(vec![z.to_string()], format!("lift {lift} is not a unit"));
        } else if ctx.residue(&lift)? != *z {
            rep.fail(vec![z.to_string()], format!("lift {lift} reduces to {}", ctx.residue(&lift)?));
        } else if rep.evidence.len() < 8 {
            rep.evidence(json!({ "residue": z.to_string(), "lift": lift.to_string() }));
        }
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(ring: &str, t: &str) -> LocalisationContext {
        LocalisationContext::from_spec(&RingDescriptor::parse(ring).unwrap(), t).unwrap()
    }

    #[test]
    fn factor_examples() {
        let c = ctx("ratfunc:7:x", "x");
        let r = c.base().clone();
        let el = |s: &str| r.parse_element(s).unwrap();
        let f = el("1+x^2");
        let fac = factor_one_plus_t(&c, &f, 100).unwrap();
        assert_eq!(fac.branch, FactorBranch::Stable);
        assert_eq!(fac.ws[0], r.one());
        assert_eq!(fac.ws[1], el("(x-1)/(1+x)"));
        let fac = factor_one_plus_t(&c, &el("1+3*x"), 100).unwrap();
        assert_eq!(fac.ws, vec![r.from_int(3)]);
        let g = el("(1+2*x)*(1+5*x)");
        assert_eq!(factor_one_plus_t(&c, &g, 100).unwrap().product(&c), g);
        assert!(factor_one_plus_t(&c, &el("2+x"), 100).is_err());
    }

    #[test]
    fn denominator_reduction() {
        let c = ctx("ratfunc:7:x,y@invert(y,x+y)", "x");
        let f = c.base().parse_element("y^2/(x+y)^2").unwrap();
        let fac = factor_one_plus_t(&c, &f, 100).unwrap();
        assert_eq!(fac.branch, FactorBranch::Reduced);
        assert_eq!(fac.product(&c), f);
        assert!(fac.ws.iter().all(|w| w.is_unit()));
    }

    #[test]
    fn random_factorisations() {
        for (ring, t) in [("ratfunc:7:x", "x"), ("ratfunc:7:x,y@invert(y)", "x")] {
            let rep = check_a3_random(&ctx(ring, t), 30, 3, 1, 200).unwrap();
            assert_eq!(rep.status, super::super::Status::Pass, "{}", rep.to_text());
        }
    }

    #[test]
    fn a1_and_a4() {
        let c = ctx("ratfunc:7:x", "x");
        let w = SymbolWindow::degree(c.localised(), 1).unwrap();
        let rep = check_a1(&c, &w, 500, 1).unwrap();
        assert_eq!(rep.status, super::super::Status::Pass);
        assert!(rep.counted("excluded") > 0);
        let rep = check_a4(&c, &w).unwrap();
        assert_eq!(rep.cases_run, 6);
        let c2 = ctx("ratfunc:7:x,y@invert(x)", "y");
        let rep = check_a4(&c2, &SymbolWindow::degree(c2.base(), 1).unwrap()).unwrap();
        assert_eq!(rep.status, super::super::Status::Pass, "{}", rep.to_text());
        let x = c2.residue_ring().parse_element("x").unwrap();
        assert_eq!(c2.lift_residue(&x).unwrap(), c2.base().parse_element("x").unwrap());
    }
}
