//! Standard derivations in the symbol presentations: the elements
//! `rho_t(f) = <(f-1)/t, t>`, their multiplicativity, skew-symmetry and
//! anticommutativity of Steinberg symbols, and the two conversions between
//! Steinberg and Dennis–Stein symbols.
//!
//! Each function returns a [`DerivationTrace`] whose replay is the stated
//! identity (written as `expression = 0`), so callers can re-check every
//! claim independently.

use super::relation::{DerivationTrace, RelationInstance};
use super::solver::{certify_fixed, certify_with};
use super::{SymbolExpr, SymbolTerm};
use crate::error::{Error, Result};
use crate::ring::{Element, RingDescriptor, RingKind};
use crate::symbol::window::SymbolWindow;

fn exhausted(what: &str) -> Error {
    Error::SearchExhausted(what.to_string())
}

fn require_unit(x: &Element) -> Result<()> {
    if x.try_is_unit()? {
        Ok(())
    } else {
        Err(Error::NotUnit(x.to_string(), x.ring().to_string()))
    }
}

fn same_ring(a: &Element, b: &Element) -> Result<()> {
    if a.ring() != b.ring() {
        return Err(Error::InvalidRing(format!("{a} and {b} lie in different rings")));
    }
    Ok(())
}

/// `(f-1)/t`, failing unless `f` is congruent to 1 modulo `t`.
pub fn rho_coefficient(t: &Element, f: &Element) -> Result<Element> {
    same_ring(t, f)?;
    let a = f - &f.ring().one();
    a.div(t).map_err(|_| Error::Precondition(format!("{f} is not congruent to 1 modulo {t}")))
}

/// `rho_t(f) = <(f-1)/t, t>` for a unit `f` in `1 + tA`; zero for `f = 1`.
pub fn rho_at(t: &Element, f: &Element) -> Result<SymbolExpr> {
    require_unit(f)?;
    let a = rho_coefficient(t, f)?;
    if a.is_zero() {
        return Ok(SymbolExpr::zero());
    }
    SymbolExpr::dennis_stein(&a, t)
}

/// A trace for `rho(fg) - rho(f) - rho(g) = 0`.
pub fn rho_hom_trace(t: &Element, f: &Element, g: &Element) -> Result<DerivationTrace> {
    require_unit(f)?;
    require_unit(g)?;
    let fg = f * g;
    let (a, b) = (rho_coefficient(t, f)?, rho_coefficient(t, g)?);
    let c = rho_coefficient(t, &fg)?;
    let mut target = SymbolExpr::zero();
    for (x, k) in [(&c, 1), (&a, -1), (&b, -1)] {
        if !x.is_zero() {
            target.add_term(SymbolTerm::dennis_stein(x, t)?, k);
        }
    }
    let mut tr = DerivationTrace::new();
    tr.push(1, RelationInstance::d1(&c, t)?);
    tr.push(-1, RelationInstance::d1(&a, t)?);
    tr.push(-1, RelationInstance::d1(&b, t)?);
    tr.push(1, RelationInstance::d2(&-t, &-&a, &-&b)?);
    certify_fixed(&target, tr).ok_or_else(|| exhausted("homomorphism identity did not close"))
}

/// A trace for `rho_{st}(f) - rho_s(f) - rho_t(f) = 0`, for `f` in `1 + stA`.
pub fn rho_factor_trace(s: &Element, t: &Element, f: &Element) -> Result<DerivationTrace> {
    let st = s * t;
    let a = rho_coefficient(&st, f)?;
    let target = rho_at(&st, f)?.minus(&rho_at(s, f)?).minus(&rho_at(t, f)?);
    let tr = DerivationTrace::single(RelationInstance::d3(&a, s, t)?);
    certify_fixed(&target, tr).ok_or_else(|| exhausted("factor identity did not close"))
}

/// A trace for `rho(f^k) - k rho(f) = 0`.
pub fn rho_power_trace(t: &Element, f: &Element, k: i64) -> Result<DerivationTrace> {
    let fk = f.pow(k)?;
    let target = rho_at(t, &fk)?.minus(&rho_at(t, f)?.scaled(k));
    let mut tr = DerivationTrace::new();
    if k >= 0 {
        let mut fj = f.clone();
        for _ in 1..k {
            tr.append_scaled(&rho_hom_trace(t, &fj, f)?, 1);
            fj = &fj * f;
        }
    } else {
        let fm = f.pow(-k)?;
        tr.append_scaled(&rho_hom_trace(t, &fk, &fm)?, -1);
        tr.append_scaled(&rho_power_trace(t, f, -k)?, -1);
    }
    certify_fixed(&target, tr).ok_or_else(|| exhausted("power chain did not close"))
}

/// A trace for `l rho_t(1 + t^l u) - {-u, 1 + t^l u} = 0`, for a unit `u`
/// and `l >= 1`.
pub fn rho_power_identity(t: &Element, u: &Element, l: u32) -> Result<DerivationTrace> {
    if l == 0 {
        return Err(Error::Precondition("the exponent must be positive".into()));
    }
    require_unit(u)?;
    let tl = t.pow(l as i64)?;
    let f = t.ring().one() + u * &tl;
    let target = rho_at(t, &f)?.scaled(l as i64).minus(&SymbolExpr::steinberg(&-u, &f)?);
    let mut tr = DerivationTrace::single(RelationInstance::conv_ds_to_steinberg_a(u, &tl)?);
    let mut uti = u.clone();
    for i in 0..l.saturating_sub(1) {
        let rest = t.pow((l - i - 1) as i64)?;
        tr.push(-1, RelationInstance::d3(&uti, &rest, t)?);
        uti = &uti * t;
    }
    certify_fixed(&target, tr).ok_or_else(|| exhausted("power identity did not close"))
}

/// Units of the ring to try, in order, when a derivation needs auxiliary
/// elements. Constants come first.
pub fn auxiliary_units(ring: &RingDescriptor) -> Vec<Element> {
    let mut out: Vec<Element> = match ring.kind() {
        RingKind::ZMod(_) | RingKind::PrimeField(_) => ring.units().unwrap_or_default(),
        RingKind::Rationals | RingKind::LocalInt(_) => {
            SymbolWindow::height(ring, 6).and_then(|w| w.units()).unwrap_or_default()
        }
        RingKind::RatFuncLocal(spec) => {
            let mut v: Vec<Element> = (1..spec.p as i64).map(|c| ring.from_int(c)).collect();
            if spec.vars.len() <= 2 {
                if let Ok(us) = SymbolWindow::degree(ring, 1).and_then(|w| w.units()) {
                    v.extend(us);
                }
            }
            v
        }
        RingKind::TruncLaurent(spec) => (1..spec.base.p as i64).map(|c| ring.from_int(c)).collect(),
    };
    let mut seen = std::collections::HashSet::new();
    out.retain(|x| !x.is_zero() && seen.insert(x.clone()));
    out
}

/// The blocks showing `{a,-a} = 0` when `1 - a` is a unit.
fn skew_direct_blocks(a: &Element) -> Result<Vec<DerivationTrace>> {
    let one = a.ring().one();
    let ai = a.inv()?;
    let w = &one - &ai;
    Ok(vec![
        DerivationTrace::single(RelationInstance::s1r(a, &-a, &w)?),
        DerivationTrace::single(RelationInstance::s3(a)?),
        DerivationTrace::single(RelationInstance::s3(&ai)?),
        DerivationTrace::single(RelationInstance::s1l(a, &ai, &w)?),
    ])
}

fn skew_direct(a: &Element) -> Result<DerivationTrace> {
    let target = SymbolExpr::steinberg(a, &-a)?;
    certify_with(&target, &skew_direct_blocks(a)?).ok_or_else(|| exhausted("direct skew derivation did not close"))
}

/// A trace for `{a,-a} = 0`. When `1 - a` is not a unit, auxiliary units
/// `s` with `s`, `1-s`, `1-as` all units are taken from `candidates` in
/// order.
pub fn skew_trace_with(a: &Element, candidates: &[Element]) -> Result<DerivationTrace> {
    require_unit(a)?;
    let one = a.ring().one();
    let target = SymbolExpr::steinberg(a, &-a)?;
    if a.is_one() {
        return certify_with(&target, &[]).ok_or_else(|| exhausted("trivial symbol"));
    }
    if (&one - a).is_unit() {
        return skew_direct(a);
    }
    let good = |s: &Element| s.is_unit() && (&one - s).is_unit() && (&one - &(a * s)).is_unit();
    let pool: Vec<&Element> = candidates.iter().filter(|s| s.ring() == a.ring() && good(s)).collect();
    let mut pair = None;
    'outer: for (i, s1) in pool.iter().enumerate() {
        for s2 in &pool[i..] {
            if good(&(*s1 * *s2)) {
                pair = Some(((*s1).clone(), (*s2).clone()));
                break 'outer;
            }
        }
    }
    let (s1, s2) = pair.ok_or_else(|| exhausted(&format!("no auxiliary units for the skew identity of {a}")))?;
    let mut blocks = Vec::new();
    for s in [s1.clone(), s2.clone(), &s1 * &s2] {
        let as_ = a * &s;
        blocks.push(DerivationTrace::single(RelationInstance::s1l(a, &s, &-&as_)?));
        blocks.push(DerivationTrace::single(RelationInstance::s1r(a, &-a, &s)?));
        blocks.push(DerivationTrace::single(RelationInstance::s1r(&s, a, &-&s)?));
        blocks.extend(skew_direct_blocks(&s)?);
        blocks.extend(skew_direct_blocks(&as_)?);
    }
    blocks.push(DerivationTrace::single(RelationInstance::s1r(a, &s1, &s2)?));
    blocks.push(DerivationTrace::single(RelationInstance::s1l(&s1, &s2, a)?));
    certify_with(&target, &blocks).ok_or_else(|| exhausted("skew identity did not close"))
}

/// [`skew_trace_with`] using [`auxiliary_units`].
pub fn skew_trace(a: &Element) -> Result<DerivationTrace> {
    let one = a.ring().one();
    if a.is_one() || (&one - a).try_is_unit()? {
        return skew_trace_with(a, &[]);
    }
    skew_trace_with(a, &auxiliary_units(a.ring()))
}

/// A trace for `{a,b} + {b,a} = 0`.
pub fn anticommute_trace(a: &Element, b: &Element) -> Result<DerivationTrace> {
    same_ring(a, b)?;
    let target = SymbolExpr::steinberg(a, b)?.plus(&SymbolExpr::steinberg(b, a)?);
    let ab = a * b;
    let mut blocks = vec![
        DerivationTrace::single(RelationInstance::s1l(a, b, &-&ab)?),
        DerivationTrace::single(RelationInstance::s1r(a, &-a, b)?),
        DerivationTrace::single(RelationInstance::s1r(b, a, &-b)?),
    ];
    for x in [a, b, &ab] {
        blocks.push(skew_trace(x)?);
    }
    certify_with(&target, &blocks).ok_or_else(|| exhausted("anticommutativity did not close"))
}

/// The Dennis–Stein form of `{a,b}` and the instance relating them.
pub fn steinberg_to_ds(a: &Element, b: &Element) -> Result<(SymbolExpr, DerivationTrace)> {
    let inst = RelationInstance::conv_steinberg_to_ds(a, b)?;
    let x = (a - &a.ring().one()).div(b)?;
    let e = if x.is_zero() { SymbolExpr::zero() } else { SymbolExpr::dennis_stein(&x, b)? };
    Ok((e, DerivationTrace::single(inst)))
}

/// The Steinberg form of `<a,b>`: `{-a, 1+ab}` when `a` is a unit,
/// otherwise `{1+ab, b}` when `b` is.
pub fn ds_to_steinberg(a: &Element, b: &Element) -> Result<(SymbolExpr, DerivationTrace)> {
    SymbolTerm::dennis_stein(a, b)?;
    let w = a.ring().one() + a * b;
    if a.is_zero() || b.is_zero() {
        return Ok((SymbolExpr::zero(), RelationInstance::trivial_zero(&SymbolTerm::dennis_stein(a, b)?).unwrap()));
    }
    if a.is_unit() {
        Ok((SymbolExpr::steinberg(&-a, &w)?, DerivationTrace::single(RelationInstance::conv_ds_to_steinberg_a(a, b)?)))
    } else if b.is_unit() {
        Ok((SymbolExpr::steinberg(&w, b)?, DerivationTrace::single(RelationInstance::conv_ds_to_steinberg_b(a, b)?)))
    } else {
        Err(Error::Precondition(format!("neither {a} nor {b} is a unit")))
    }
}

/// Converts `{a,b}` to Dennis–Stein form and back, returning the final
/// Steinberg expression and the two conversion steps (with signs such that
/// the trace replays to `{a,b} - result`).
pub fn round_trip(a: &Element, b: &Element) -> Result<(SymbolExpr, DerivationTrace)> {
    let (ds, t1) = steinberg_to_ds(a, b)?;
    let mut back = SymbolExpr::zero();
    let mut tr = t1;
    for (t, c) in ds.terms() {
        let (x, y) = t.args();
        let (s, t2) = ds_to_steinberg(x, y)?;
        back.add_scaled(&s, c);
        tr.append_scaled(&t2, c);
    }
    Ok((back, tr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> RingDescriptor {
        RingDescriptor::parse(s).unwrap()
    }

    #[test]
    fn conversion_of_2_3_in_f7() {
        let r = ring("fp:7");
        let (e, tr) = steinberg_to_ds(&r.from_int(2), &r.from_int(3)).unwrap();
        assert_eq!(e, SymbolExpr::dennis_stein(&r.from_int(5), &r.from_int(3)).unwrap());
        assert!(tr.proves(&SymbolExpr::steinberg(&r.from_int(2), &r.from_int(3)).unwrap().minus(&e)));
        let (back, tr) = round_trip(&r.from_int(2), &r.from_int(3)).unwrap();
        let start = SymbolExpr::steinberg(&r.from_int(2), &r.from_int(3)).unwrap();
        assert!(tr.proves(&start.minus(&back)));
    }

    #[test]
    fn rho_examples() {
        let r = ring("ratfunc:7:x");
        let x = r.var("x").unwrap();
        let f = r.parse_element("1+3*x").unwrap();
        assert_eq!(rho_at(&x, &f).unwrap(), SymbolExpr::dennis_stein(&r.from_int(3), &x).unwrap());
        let g = r.parse_element("1+2*x").unwrap();
        let h = r.parse_element("1+x").unwrap();
        let tr = rho_hom_trace(&x, &h, &g).unwrap();
        assert!(tr.proves(&rho_at(&x, &(&h * &g)).unwrap().minus(&rho_at(&x, &h).unwrap()).minus(&rho_at(&x, &g).unwrap())));
        for k in [-3, -1, 0, 1, 4] {
            assert!(rho_power_trace(&x, &f, k).is_ok(), "k = {k}");
        }
        assert!(rho_hom_trace(&x, &f, &f.inv().unwrap()).is_ok());
        for l in 1..4 {
            assert!(rho_power_identity(&x, &r.from_int(3), l).is_ok());
            assert!(rho_power_identity(&x, &h, l).is_ok());
        }
        assert!(rho_at(&x, &r.from_int(2)).is_err());
    }

    #[test]
    fn factor_identity() {
        let r = ring("ratfunc:5:x,y");
        let (x, y) = (r.var("x").unwrap(), r.var("y").unwrap());
        let f = r.parse_element("1+2*x*y+x^2*y").unwrap();
        assert!(rho_factor_trace(&x, &y, &f).is_ok());
    }

    #[test]
    fn skew_and_anticommute() {
        let f7 = ring("fp:7");
        for a in 1..7 {
            let a = f7.from_int(a);
            let tr = skew_trace(&a).unwrap();
            assert!(tr.proves(&SymbolExpr::steinberg(&a, &-&a).unwrap()));
        }
        let r = ring("ratfunc:7:x");
        let a = r.parse_element("x+1").unwrap();
        assert!(skew_trace(&a).is_ok());
        assert!(anticommute_trace(&a, &r.from_int(3)).is_ok());
        let q = ring("q");
        assert!(anticommute_trace(&q.from_int(2), &q.from_int(-3)).is_ok());
    }
}
