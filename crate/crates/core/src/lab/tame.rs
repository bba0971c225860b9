//! The tame symbol `c(f,g) = (-1)^{nm} u^m v^{-n}` for `f = u t^n`,
//! `g = v t^m`, its reduction modulo `t`, and the splitting
//! `{f,g} = {u,v} + {c(f,g), t}` in `K_2^M(R_t)`.

use crate::error::{Error, Result};
use crate::ring::context::{LocalisationContext, UnitDecomposition};
use crate::ring::Element;
use crate::symbol::derive::{anticommute_trace, ds_to_steinberg, skew_trace};
use crate::symbol::solver::certify_with;
use crate::symbol::{DerivationTrace, RelationInstance, SymbolExpr, SymbolTerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameValue {
    /// `c(f,g)`, a unit of `R`.
    pub value: Element,
    pub f: UnitDecomposition,
    pub g: UnitDecomposition,
}

impl TameValue {
    pub fn residue(&self, ctx: &LocalisationContext) -> Result<Element> {
        ctx.residue(&self.value)
    }
}

fn sign(n: i64, m: i64) -> i64 {
    if (n * m).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^{nm} u^m v^{-n}` from the two decompositions.
pub fn tame_from_decompositions(f: &UnitDecomposition, g: &UnitDecomposition) -> Result<Element> {
    let r = f.u.ring();
    Ok(r.from_int(sign(f.n, g.n)) * f.u.pow(g.n)? * g.u.pow(-f.n)?)
}

/// `(-1)^{nm} f^m g^{-n}` evaluated in `R_t` and read back in `R`.
pub fn tame_direct(f: &Element, g: &Element, ctx: &LocalisationContext) -> Result<Element> {
    let (f, g) = (ctx.to_local(f)?, ctx.to_local(g)?);
    for x in [&f, &g] {
        if !x.try_is_unit()? {
            return Err(Error::NotUnit(x.to_string(), ctx.localised().to_string()));
        }
    }
    let (n, m) = (ctx.valuation(&f)?, ctx.valuation(&g)?);
    let v = ctx.localised().from_int(sign(n, m)) * f.pow(m)? * g.pow(-n)?;
    ctx.to_base(&v)
}

/// The tame symbol, computed from unit decompositions and checked against
/// the direct formula.
pub fn tame_symbol(f: &Element, g: &Element, ctx: &LocalisationContext) -> Result<TameValue> {
    let df = ctx.unit_decompose(f)?;
    let dg = ctx.unit_decompose(g)?;
    let value = tame_from_decompositions(&df, &dg)?;
    let direct = tame_direct(f, g, ctx)?;
    if value != direct {
        return Err(Error::Internal(format!("tame symbol routes disagree on ({f}, {g}): {value} vs {direct}")));
    }
    Ok(TameValue { value, f: df, g: dg })
}

/// A unit of `R_t` with its decomposition, for evaluating many tame
/// symbols over the same units.
#[derive(Clone, Debug)]
pub struct PreparedUnit {
    pub local: Element,
    pub dec: UnitDecomposition,
}

impl PreparedUnit {
    pub fn new(f: &Element, ctx: &LocalisationContext) -> Result<Self> {
        Ok(PreparedUnit { local: ctx.to_local(f)?, dec: ctx.unit_decompose(f)? })
    }
}

/// [`tame_symbol`] on prepared units: both routes, sharing the valuations.
pub fn tame_prepared(f: &PreparedUnit, g: &PreparedUnit, ctx: &LocalisationContext) -> Result<Element> {
    let value = tame_from_decompositions(&f.dec, &g.dec)?;
    let (n, m) = (f.dec.n, g.dec.n);
    let direct = ctx.to_base(&(ctx.localised().from_int(sign(n, m)) * f.local.pow(m)? * g.local.pow(-n)?))?;
    if value != direct {
        return Err(Error::Internal(format!("tame symbol routes disagree on ({}, {}): {value} vs {direct}", f.local, g.local)));
    }
    Ok(value)
}

/// The tame value of a single symbol; Dennis–Stein symbols are read through
/// their Steinberg form.
pub fn tame_of_term(t: &SymbolTerm, ctx: &LocalisationContext) -> Result<Element> {
    let t = t.coerce(ctx.localised())?;
    match &t {
        SymbolTerm::Steinberg(a, b) => Ok(tame_symbol(a, b, ctx)?.value),
        SymbolTerm::DennisStein(a, b) => {
            let (e, _) = ds_to_steinberg(a, b)?;
            tame_of_expr(&e, ctx)
        }
    }
}

/// Product of the tame values of the terms, with multiplicity, as a unit of `R`.
pub fn tame_of_expr(e: &SymbolExpr, ctx: &LocalisationContext) -> Result<Element> {
    let mut acc = ctx.base().one();
    for (t, c) in e.terms() {
        acc = acc * tame_of_term(t, ctx)?.pow(c)?;
    }
    Ok(acc)
}

/// `c(e)` reduced modulo `t`, a unit of `R/tR`.
pub fn cbar(e: &SymbolExpr, ctx: &LocalisationContext) -> Result<Element> {
    ctx.residue(&tame_of_expr(e, ctx)?)
}

/// `S1L(x t^k, t, y)` for `k` between `0` and `n`: peels `t^n` off the first
/// argument.
fn peel_left(x: &Element, t: &Element, n: i64, y: &Element, out: &mut Vec<DerivationTrace>) -> Result<()> {
    for k in n.min(0)..n.max(0) {
        out.push(DerivationTrace::single(RelationInstance::s1l(&(x * &t.pow(k)?), t, y)?));
    }
    Ok(())
}

fn peel_right(x: &Element, y: &Element, t: &Element, m: i64, out: &mut Vec<DerivationTrace>) -> Result<()> {
    for k in m.min(0)..m.max(0) {
        out.push(DerivationTrace::single(RelationInstance::s1r(x, &(y * &t.pow(k)?), t)?));
    }
    Ok(())
}

/// Blocks relating `{x^e, y}` to `e {x, y}`.
pub fn power_chain_left(x: &Element, e: i64, y: &Element, out: &mut Vec<DerivationTrace>) -> Result<()> {
    let mut acc = x.clone();
    for _ in 1..e.abs() {
        out.push(DerivationTrace::single(RelationInstance::s1l(&acc, x, y)?));
        acc = &acc * x;
    }
    if e < 0 {
        let xe = x.pow(e)?;
        out.push(DerivationTrace::single(RelationInstance::s1l(&xe, &acc, y)?));
    }
    Ok(())
}

/// `{f,g} = {u,v} + {c(f,g), t}` with `u, v` units of `R` (read in `R_t`),
/// and a trace proving `{f,g} - {u,v} - {c,t} = 0` over `R_t`.
pub fn split_symbol(f: &Element, g: &Element, ctx: &LocalisationContext) -> Result<(SymbolExpr, DerivationTrace)> {
    let tv = tame_symbol(f, g, ctx)?;
    let lr = ctx.localised();
    let (f, g) = (lr.coerce(f)?, lr.coerce(g)?);
    let t = ctx.t_local();
    let (u, n) = (lr.coerce(&tv.f.u)?, tv.f.n);
    let (v, m) = (lr.coerce(&tv.g.u)?, tv.g.n);
    let c = lr.coerce(&tv.value)?;
    let split = SymbolExpr::steinberg(&u, &v)?.plus(&SymbolExpr::steinberg(&c, &t)?);
    let target = SymbolExpr::steinberg(&f, &g)?.minus(&split);
    if target.is_zero() {
        return Ok((split, DerivationTrace::new()));
    }
    let mut blocks = Vec::new();
    peel_left(&u, &t, n, &g, &mut blocks)?;
    peel_right(&u, &v, &t, m, &mut blocks)?;
    peel_right(&t, &v, &t, m, &mut blocks)?;
    let minus_one = -lr.one();
    if n != 0 && m != 0 {
        blocks.push(DerivationTrace::single(RelationInstance::s1r(&t, &minus_one, &-&t)?));
        blocks.push(skew_trace(&t)?);
        blocks.push(anticommute_trace(&t, &minus_one)?);
        blocks.push(DerivationTrace::single(RelationInstance::s1l(&minus_one, &minus_one, &t)?));
    }
    if n != 0 {
        blocks.push(anticommute_trace(&t, &v)?);
    }
    let um = u.pow(m)?;
    let vn = v.pow(-n)?;
    power_chain_left(&u, m, &t, &mut blocks)?;
    power_chain_left(&v, -n, &t, &mut blocks)?;
    let prod = &um * &vn;
    blocks.push(DerivationTrace::single(RelationInstance::s1l(&um, &vn, &t)?));
    blocks.push(DerivationTrace::single(RelationInstance::s1l(&prod, &minus_one, &t)?));
    let tr = certify_with(&target, &blocks).ok_or_else(|| Error::SearchExhausted(format!("splitting {{{f},{g}}} did not close")))?;
    Ok((split, tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;

    fn ctx(ring: &str, t: &str) -> LocalisationContext {
        LocalisationContext::from_spec(&RingDescriptor::parse(ring).unwrap(), t).unwrap()
    }

    #[test]
    fn tame_examples() {
        let c = ctx("ratfunc:7:x@invert(x)", "x");
        let r = c.localised().clone();
        let el = |s: &str| r.parse_element(s).unwrap();
        assert_eq!(tame_symbol(&el("2*x"), &el("3"), &c).unwrap().value, c.base().from_int(5));
        assert!(tame_symbol(&el("x"), &el("-x"), &c).unwrap().value.is_one());
        assert_eq!(tame_symbol(&el("x"), &el("x"), &c).unwrap().value, c.base().from_int(-1));
        assert!(tame_symbol(&el("x"), &el("0"), &c).is_err());
        let e = SymbolExpr::parse(&r, "{3,x}").unwrap();
        assert_eq!(cbar(&e, &c).unwrap(), c.residue_ring().from_int(3));
    }

    #[test]
    fn splitting() {
        let c = ctx("ratfunc:7:x@invert(x)", "x");
        let r = c.localised().clone();
        let el = |s: &str| r.parse_element(s).unwrap();
        let (e, tr) = split_symbol(&el("2*x"), &el("3"), &c).unwrap();
        assert_eq!(e, SymbolExpr::parse(&r, "{2,3} + {5,x}").unwrap());
        assert!(tr.proves(&SymbolExpr::parse(&r, "{2*x,3} - {2,3} - {5,x}").unwrap()));
        let (e, _) = split_symbol(&el("x"), &el("x"), &c).unwrap();
        assert_eq!(e, SymbolExpr::parse(&r, "{1,1} + {-1,x}").unwrap());
        for (f, g) in [("x^2*(1+x)", "3/x"), ("1/x^3", "x^2+x^3"), ("(1+x)/x", "5*x")] {
            let (e, tr) = split_symbol(&el(f), &el(g), &c).unwrap();
            assert!(tr.proves(&SymbolExpr::steinberg(&el(f), &el(g)).unwrap().minus(&e)), "{f}, {g}");
        }
    }

    #[test]
    fn rational_tame_image() {
        let c = ctx("q", "3");
        let q = c.localised().clone();
        let e = SymbolExpr::steinberg(&q.from_int(3), &q.from_int(5)).unwrap();
        assert_eq!(cbar(&e, &c).unwrap(), c.residue_ring().from_int(2));
    }
}
