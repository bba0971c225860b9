//! The co-Cartesian square
//!
//! ```text
//!  (1+tR)^x --rho_t--> K_2(R)
//!     | j                 |
//!     v                   v
//!    R^x  --{-,t}--> K_2^M(R_t)
//! ```
//!
//! and the resulting exact sequence
//! `K_2^M(R) -> K_2^M(R_t) -> (R/tR)^x -> 0`, checked on window data.

use rand::Rng;
use serde_json::json;

use super::assumptions::factor_one_plus_t;
use super::tame::{cbar, power_chain_left, split_symbol, tame_symbol};
use super::{rng, run_cases, sample, VerificationReport};
use crate::abelian::{pushout, PresentedGroup, Side};
use crate::error::{Error, Result};
use crate::ring::context::LocalisationContext;
use crate::ring::Element;
use crate::symbol::derive::{anticommute_trace, rho_at};
use crate::symbol::solver::certify_with;
use crate::symbol::window::{instantiate, System};
use crate::symbol::{DerivationTrace, RelationInstance, SymbolExpr, SymbolTerm, SymbolWindow};

/// Blocks proving `{1+wt, t} = {-w, 1+wt}` over `R_t`.
fn generator_blocks(w: &Element, t: &Element) -> Result<Vec<DerivationTrace>> {
    let f = w.ring().one() + w * t;
    Ok(vec![
        DerivationTrace::single(RelationInstance::s1l(&-w, t, &f)?),
        DerivationTrace::single(RelationInstance::s3(&-&(w * t))?),
        anticommute_trace(t, &f)?,
    ])
}

/// `rho_t(1+wt) - {1+wt, t} = 0` in `K_2(R_t)`, with `rho_t` in
/// Dennis–Stein form.
pub fn square_commutes(ctx: &LocalisationContext, w: &Element) -> Result<DerivationTrace> {
    let lr = ctx.localised();
    let (w, t) = (lr.coerce(w)?, ctx.t_local());
    let f = lr.one() + &w * &t;
    let target = rho_at(&t, &f)?.minus(&SymbolExpr::steinberg(&f, &t)?);
    let mut blocks = generator_blocks(&w, &t)?;
    blocks.push(DerivationTrace::single(RelationInstance::conv_ds_to_steinberg_a(&w, &t)?));
    certify_with(&target, &blocks).ok_or_else(|| Error::SearchExhausted(format!("square does not close at w = {w}")))
}

fn random_pairs(pool: &[Element], count: usize, seed: u64) -> Vec<(Element, Element)> {
    let mut r = rng(seed);
    if pool.is_empty() {
        return vec![];
    }
    if pool.len() * pool.len() <= count {
        return pool.iter().flat_map(|a| pool.iter().map(move |b| (a.clone(), b.clone()))).collect();
    }
    (0..count).map(|_| (pool[r.gen_range(0..pool.len())].clone(), pool[r.gen_range(0..pool.len())].clone())).collect()
}

/// Window generators `1 + wt` of `(1+tR)^x`, as the coefficients `w`.
fn one_plus_t_generators(ctx: &LocalisationContext, units: &[Element]) -> Vec<Element> {
    units
        .iter()
        .filter(|f| ctx.in_one_plus_t(f))
        .filter_map(|f| ctx.div_t(&(f.clone() - f.ring().one())).ok())
        .filter(|w| w.is_unit())
        .collect()
}

fn leg_commutes(ctx: &LocalisationContext, units: &[Element], budget: usize, seed: u64) -> VerificationReport {
    let gens = one_plus_t_generators(ctx, units);
    let (ws, exhaustive) = sample(&gens, budget, seed);
    let mut rep = VerificationReport::new("commutes", ctx.localised()).param("exhaustive", exhaustive);
    for (w, r) in ws.iter().zip(run_cases(&ws, |w| square_commutes(ctx, w))) {
        rep.cases_run += 1;
        match r {
            Ok(tr) => {
                if rep.evidence.is_empty() {
                    rep.evidence(json!({ "w": w.to_string(), "trace": tr.to_json() }));
                }
            }
            Err(e) => rep.fail(vec![w.to_string()], e),
        }
    }
    rep
}

fn leg_surjective(ctx: &LocalisationContext, local_units: &[Element], budget: usize, seed: u64) -> VerificationReport {
    let pairs = random_pairs(local_units, budget, seed);
    let mut rep = VerificationReport::new("surjective", ctx.localised());
    let results = run_cases(&pairs, |(f, g)| -> Result<SymbolExpr> {
        let (e, tr) = split_symbol(f, g, ctx)?;
        let start = SymbolExpr::steinberg(f, g)?;
        if !tr.proves(&start.clone().minus(&e)) {
            return Err(Error::Internal("split trace does not replay".into()));
        }
        Ok(e)
    });
    for ((f, g), r) in pairs.iter().zip(results) {
        rep.cases_run += 1;
        match r {
            Ok(e) => {
                if rep.evidence.len() < 3 {
                    rep.evidence(json!({ "symbol": format!("{{{f},{g}}}"), "split": e.to_string() }));
                }
            }
            Err(e) => rep.fail(vec![f.to_string(), g.to_string()], e),
        }
    }
    rep
}

/// An element of the pushout `X`: a combination of symbols over `R` plus a
/// combination of unit generators `[c]`.
#[derive(Clone, Debug, Default)]
struct XElement {
    symbols: SymbolExpr,
    units: Vec<(Element, i64)>,
}

/// `X -> K_2^M(R_t)`: symbols map to themselves and `[c]` to `{c, t}`.
fn x_to_local(x: &XElement, ctx: &LocalisationContext) -> Result<SymbolExpr> {
    let mut e = x.symbols.coerce(ctx.localised())?;
    let t = ctx.t_local();
    for (c, k) in &x.units {
        e.add_scaled(&SymbolExpr::steinberg(&ctx.to_local(c)?, &t)?, *k);
    }
    Ok(e)
}

/// `K_2^M(R_t) -> X`: `{f,g}` goes to `({u,v}, [c(f,g)])`.
fn local_to_x(e: &SymbolExpr, ctx: &LocalisationContext) -> Result<XElement> {
    let mut out = XElement::default();
    for (term, k) in e.terms() {
        let (f, g) = term.args();
        let tv = tame_symbol(f, g, ctx)?;
        out.symbols.add_scaled(&SymbolExpr::steinberg(&tv.f.u, &tv.g.u)?, k);
        out.units.push((tv.value, k));
    }
    Ok(out)
}

fn composite_case(ctx: &LocalisationContext, x: &XElement) -> Result<bool> {
    let back = local_to_x(&x_to_local(x, ctx)?, ctx)?;
    // Elements that the local presentation of X must see.
    let mut elems: Vec<Element> = x.symbols.elements();
    elems.extend(back.symbols.elements());
    elems.extend(x.units.iter().map(|(c, _)| c.clone()));
    elems.extend(back.units.iter().map(|(c, _)| c.clone()));
    elems.push(ctx.base().one());
    elems.sort();
    elems.dedup();
    let inside = |a: &Element| elems.contains(a);
    let mut g: PresentedGroup<SymbolTerm> = PresentedGroup::new();
    for inst in instantiate(&elems, &[], System::Steinberg, &inside) {
        g.add_relation(inst.expr().terms().map(|(t, c)| (t.clone(), c)));
    }
    for t in x.symbols.terms().chain(back.symbols.terms()) {
        g.add_generator(t.0.clone());
    }
    let mut h: PresentedGroup<Element> = PresentedGroup::new();
    for a in &elems {
        h.add_generator(a.clone());
        for b in &elems {
            let ab = a * b;
            if inside(&ab) {
                h.add_relation([(a.clone(), 1), (b.clone(), 1), (ab, -1)]);
            }
        }
    }
    // Glue along the (1+tR)^x generators among the elements.
    let mut frows = Vec::new();
    let mut jrows = Vec::new();
    let mut glue = Vec::new();
    for f in elems.iter().filter(|f| ctx.in_one_plus_t(f) && !f.is_one()) {
        let Ok(fac) = factor_one_plus_t(ctx, f, 64) else { continue };
        let mut rho = SymbolExpr::zero();
        for w in &fac.ws {
            let one_wt = ctx.base().one() + w * ctx.t();
            rho.add_scaled(&SymbolExpr::steinberg(&-w, &one_wt)?, 1);
        }
        glue.push((f.clone(), rho));
    }
    for (_, rho) in &glue {
        for (t, _) in rho.terms() {
            g.add_generator(t.clone());
        }
    }
    for (f, rho) in &glue {
        let mut fr = vec![0i64; g.num_generators()];
        for (t, c) in rho.terms() {
            fr[g.generator_index(t).unwrap()] += c;
        }
        let mut jr = vec![0i64; h.num_generators()];
        jr[h.generator_index(f).unwrap()] = 1;
        frows.push(fr);
        jrows.push(jr);
    }
    let po = pushout(&g, &h, &frows, &jrows)?;
    let mut diff: Vec<(usize, i64)> = Vec::new();
    let mut add = |e: &XElement, s: i64| {
        for (t, c) in e.symbols.terms() {
            diff.push((po.left[g.generator_index(t).unwrap()], s * c));
        }
        for (u, c) in &e.units {
            diff.push((po.right[h.generator_index(u).unwrap()], s * c));
        }
    };
    add(&back, 1);
    add(x, -1);
    let _ = Side::<SymbolTerm, Element>::Right(ctx.base().one());
    Ok(po.group.oracle().certify(&crate::abelian::normalise_row(diff)).is_some())
}

fn leg_composite(ctx: &LocalisationContext, units: &[Element], budget: usize, seed: u64) -> VerificationReport {
    let mut rep = VerificationReport::new("composite", ctx.base());
    if units.is_empty() {
        return rep;
    }
    let mut r = rng(seed ^ 0x5eed);
    let pick = |r: &mut rand_chacha::ChaCha8Rng| units[r.gen_range(0..units.len())].clone();
    let mut samples = Vec::new();
    for _ in 0..budget {
        let mut x = XElement::default();
        for _ in 0..2 {
            let (a, b) = (pick(&mut r), pick(&mut r));
            let k = [-2, -1, 1, 2][r.gen_range(0..4)];
            x.symbols.add_scaled(&SymbolExpr::steinberg(&a, &b).unwrap(), k);
        }
        let c = pick(&mut r);
        x.units.push((c, [-1, 1, 2][r.gen_range(0..3)]));
        samples.push(x);
    }
    let results = run_cases(&samples, |x| composite_case(ctx, x));
    for (x, res) in samples.iter().zip(results) {
        rep.cases_run += 1;
        let label = || vec![x.symbols.to_string(), format!("{:?}", x.units)];
        match res {
            Ok(true) => {}
            Ok(false) => {
                rep.inconclusive(1);
                rep.evidence(json!({ "uncertified": label() }));
            }
            Err(e) => rep.fail(label(), e),
        }
    }
    rep
}

/// Checks the co-Cartesian square on window data: commutativity on the
/// generators `1 + wt`, surjectivity onto window symbols of `R_t` by
/// splitting, and `X -> K_2^M(R_t) -> X` being the identity on samples.
pub fn cocartesian_check(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    let wr = w.over(ctx.base())?;
    let wl = w.over(ctx.localised())?;
    let units = wr.units()?;
    let local_units = wl.units()?;
    let mut rep = VerificationReport::new("pushout", ctx.base())
        .param("t", ctx.t().to_string())
        .window(wr.params())
        .seed(seed)
        .budget(budget as u64);
    rep.absorb("commutes", leg_commutes(ctx, &units, budget, seed));
    rep.absorb("surjective", leg_surjective(ctx, &local_units, budget, seed));
    rep.absorb("composite", leg_composite(ctx, &units, budget, seed));
    Ok(rep.finish())
}

/// A preimage in `K_2^M(R)` of a kernel element `e` of `cbar`, and a trace
/// proving `e - preimage = 0` over `R_t`. `None` when the factorisation
/// search or the certification runs out.
pub fn kernel_preimage(e: &SymbolExpr, ctx: &LocalisationContext) -> Result<Option<(SymbolExpr, DerivationTrace)>> {
    let lr = ctx.localised();
    let t = ctx.t_local();
    let mut blocks = Vec::new();
    let mut pre = SymbolExpr::zero();
    let mut h = ctx.base().one();
    let mut acc = lr.one();
    let mut rest = SymbolExpr::zero();
    for (term, k) in e.terms() {
        match term {
            SymbolTerm::Steinberg(f, g) if g == &t && ctx.to_base(f).is_ok_and(|u| u.is_unit()) => {
                rest.add_term(term.clone(), k);
            }
            SymbolTerm::Steinberg(f, g) => {
                let (split, tr) = split_symbol(f, g, ctx)?;
                blocks.push(tr);
                for (s, c) in split.terms() {
                    if s.args().1 == &t {
                        if !s.args().0.is_one() {
                            rest.add_term(s.clone(), c * k);
                        }
                    } else {
                        pre.add_term(s.clone(), c * k);
                    }
                }
            }
            SymbolTerm::DennisStein(..) => return Err(Error::Unsupported("kernel samples are Steinberg expressions".into())),
        }
    }
    // rest = sum k_i {c_i, t}; collapse it into {h, t}.
    for (s, k) in rest.terms() {
        let c = s.args().0.clone();
        power_chain_left(&c, k, &t, &mut blocks)?;
        let ck = c.pow(k)?;
        blocks.push(DerivationTrace::single(RelationInstance::s1l(&acc, &ck, &t)?));
        acc = &acc * &ck;
        h = h * ctx.to_base(&ck)?;
    }
    if !ctx.in_one_plus_t(&h) {
        return Err(Error::Precondition(format!("{e} is not in the kernel of the residue map")));
    }
    let fac = match factor_one_plus_t(ctx, &h, 256) {
        Ok(f) => f,
        Err(Error::SearchExhausted(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut prod = lr.one();
    for w in &fac.ws {
        let wl = lr.coerce(w)?;
        let f = lr.one() + &wl * &t;
        blocks.push(DerivationTrace::single(RelationInstance::s1l(&prod, &f, &t)?));
        blocks.extend(generator_blocks(&wl, &t)?);
        prod = &prod * &f;
        pre.add_scaled(&SymbolExpr::steinberg(&-w, &ctx.base().coerce(&f)?)?, 1);
    }
    let pre = pre.coerce(ctx.base())?;
    let target = e.clone().minus(&pre.coerce(lr)?);
    Ok(certify_with(&target, &blocks).map(|tr| (pre, tr)))
}

/// Checks the exact sequence on window data: `cbar` kills symbols of
/// `R`-units, hits every residue generator via `{u~, t}`, and sampled
/// kernel elements come from `K_2^M(R)`.
pub fn ses_check(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    let wr = w.over(ctx.base())?;
    let wl = w.over(ctx.localised())?;
    let units = wr.units()?;
    let local_units = wl.units()?;
    let lr = ctx.localised();
    let t = ctx.t_local();
    let mut rep = VerificationReport::new("ses", ctx.base())
        .param("t", ctx.t().to_string())
        .window(wr.params())
        .seed(seed)
        .budget(budget as u64);

    let mut leg = VerificationReport::new("composite-trivial", ctx.base());
    for (u, v) in random_pairs(&units, budget, seed) {
        leg.cases_run += 1;
        let e = SymbolExpr::steinberg(&lr.coerce(&u)?, &lr.coerce(&v)?)?;
        let c = cbar(&e, ctx)?;
        if !c.is_one() {
            leg.fail(vec![u.to_string(), v.to_string()], format!("residue symbol {c}"));
        }
    }
    rep.absorb("composite-trivial", leg);

    let res = ctx.residue_ring();
    let gens = if res.is_finite() { res.units()? } else { w.over(res)?.units()? };
    let mut leg = VerificationReport::new("surjective", res);
    for z in &gens {
        leg.cases_run += 1;
        let lift = ctx.lift_residue(z)?;
        let e = SymbolExpr::steinberg(&lr.coerce(&lift)?, &t)?;
        let c = cbar(&e, ctx)?;
        if c != *z {
            leg.fail(vec![z.to_string()], format!("{e} maps to {c}"));
        } else if leg.evidence.len() < 6 {
            leg.evidence(json!({ "residue": z.to_string(), "preimage": e.to_string() }));
        }
    }
    rep.absorb("surjective", leg);

    let mut leg = VerificationReport::new("exact", ctx.localised());
    let mut r = rng(seed ^ 0xe7ac);
    let mut samples = Vec::new();
    if !local_units.is_empty() {
        for _ in 0..budget {
            let mut e = SymbolExpr::zero();
            for _ in 0..2 {
                let f = &local_units[r.gen_range(0..local_units.len())];
                let g = &local_units[r.gen_range(0..local_units.len())];
                e.add_scaled(&SymbolExpr::steinberg(f, g)?, [-2, -1, 1, 2][r.gen_range(0..4)]);
            }
            samples.push(e);
        }
    }
    let results = run_cases(&samples, |e| -> Result<(SymbolExpr, Option<(SymbolExpr, DerivationTrace)>)> {
        let z = cbar(e, ctx)?;
        let lift = lr.coerce(&ctx.lift_residue(&z)?)?;
        let k = e.clone().minus(&SymbolExpr::steinberg(&lift, &t)?);
        if !cbar(&k, ctx)?.is_one() {
            return Err(Error::Internal(format!("{k} is not in the kernel")));
        }
        Ok((k.clone(), kernel_preimage(&k, ctx)?))
    });
    for (e, res) in samples.iter().zip(results) {
        leg.cases_run += 1;
        match res {
            Ok((k, Some((pre, _)))) => {
                leg.count("certified", 1);
                if leg.evidence.len() < 3 {
                    leg.evidence(json!({ "kernel_element": k.to_string(), "preimage": pre.to_string() }));
                }
            }
            Ok((k, None)) => {
                leg.inconclusive(1);
                leg.evidence(json!({ "uncertified": k.to_string() }));
            }
            Err(err) => leg.fail(vec![e.to_string()], err),
        }
    }
    rep.absorb("exact", leg);
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Status;
    use crate::ring::RingDescriptor;

    fn ctx(ring: &str, t: &str) -> LocalisationContext {
        LocalisationContext::from_spec(&RingDescriptor::parse(ring).unwrap(), t).unwrap()
    }

    #[test]
    fn kernel_example() {
        let c = ctx("ratfunc:7:x", "x");
        let lr = c.localised().clone();
        let e = SymbolExpr::parse(&lr, "{2*x,3} - {5,x}").unwrap();
        assert!(cbar(&e, &c).unwrap().is_one());
        let (pre, tr) = kernel_preimage(&e, &c).unwrap().unwrap();
        assert_eq!(pre, SymbolExpr::parse(c.base(), "{2,3}").unwrap());
        assert!(tr.proves(&e.minus(&pre.coerce(&lr).unwrap())));
    }

    #[test]
    fn small_windows() {
        let c = ctx("ratfunc:7:x", "x");
        let w = SymbolWindow::degree(c.base(), 1).unwrap();
        let rep = cocartesian_check(&c, &w, 20, 1).unwrap();
        assert_eq!(rep.status, Status::Pass, "{}", rep.to_text());
        let rep = ses_check(&c, &w, 20, 1).unwrap();
        assert_ne!(rep.status, Status::Fail, "{}", rep.to_text());
        let one = SymbolWindow::explicit(c.base(), vec![c.base().one()]).unwrap();
        let rep = cocartesian_check(&c, &one, 20, 1).unwrap();
        assert_eq!(rep.status, Status::Pass, "{}", rep.to_text());
    }
}
