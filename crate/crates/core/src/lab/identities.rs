//! Report-level drivers for the `rho_t` identities, the skew symmetry
//! derivation and the algebraic laws of the tame symbol.

use serde_json::json;

use super::tame::{tame_prepared, tame_symbol, PreparedUnit};
use super::{rng, run_cases, VerificationReport};
use crate::error::{Error, Result};
use crate::ring::context::LocalisationContext;
use crate::ring::Element;
use crate::symbol::derive::{rho_at, rho_factor_trace, rho_hom_trace, rho_power_identity, skew_trace_with};
use crate::symbol::{DerivationTrace, SymbolWindow};

fn record(rep: &mut VerificationReport, inputs: Vec<String>, r: Result<DerivationTrace>) {
    rep.cases_run += 1;
    match r {
        Ok(tr) => {
            if rep.evidence.is_empty() {
                rep.evidence(json!({ "inputs": inputs, "trace": tr.to_json() }));
            }
        }
        Err(e) => rep.fail(inputs, e),
    }
}

/// `rho_{st}(f) - rho_s(f) - rho_t(f) = 0` for one `f` in `(1 + stR)^x`.
pub fn rho_factor_identity_check(s: &Element, t: &Element, f: &Element) -> VerificationReport {
    let mut rep = VerificationReport::new("rho-factor", f.ring()).param("s", s.to_string()).param("t", t.to_string());
    record(&mut rep, vec![f.to_string()], rho_factor_trace(s, t, f));
    rep.finish()
}

/// `l rho_t(1 + t^l u) = {-u, 1 + t^l u}` for one unit `u`.
pub fn power_identity_check(t: &Element, u: &Element, l: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("rho-power", u.ring()).param("t", t.to_string()).param("l", l);
    record(&mut rep, vec![u.to_string()], rho_power_identity(t, u, l));
    rep.finish()
}

/// The members of `(1 + tR)^x` among the window units of `R`.
pub fn one_plus_t_units(ctx: &LocalisationContext, w: &SymbolWindow) -> Result<Vec<Element>> {
    Ok(w.over(ctx.base())?.units()?.into_iter().filter(|f| ctx.in_one_plus_t(f)).collect())
}

/// The `rho_t` identities over a window of `R`:
/// `rho(fg) = rho(f) + rho(g)` for every unordered pair of window members of
/// `(1 + tR)^x`, `rho_{tt}(f) = 2 rho_t(f)` for those in `1 + t^2 R`, and
/// `l rho_t(1 + t^l u) = {-u, 1 + t^l u}` for the given `us` and `ls`.
pub fn rho_identities_check(ctx: &LocalisationContext, w: &SymbolWindow, us: &[Element], ls: &[u32]) -> Result<VerificationReport> {
    let t = ctx.t();
    let fs = one_plus_t_units(ctx, w)?;
    let mut rep = VerificationReport::new("rho", ctx.base()).param("t", t.to_string()).window(w.over(ctx.base())?.params());

    let mut hom = VerificationReport::new("hom", ctx.base());
    let rows: Vec<usize> = (0..fs.len()).collect();
    let results = run_cases(&rows, |&i| {
        let mut bad = Vec::new();
        for g in &fs[i..] {
            if let Err(e) = rho_hom_trace(t, &fs[i], g) {
                bad.push((g.clone(), e));
            }
        }
        bad
    });
    for (i, bad) in results.into_iter().enumerate() {
        hom.cases_run += (fs.len() - i) as u64;
        for (g, e) in bad {
            hom.fail(vec![fs[i].to_string(), g.to_string()], e);
        }
    }
    if let [f, g, ..] = fs.as_slice() {
        hom.evidence(json!({ "f": f.to_string(), "g": g.to_string(), "trace": rho_hom_trace(t, f, g)?.to_json() }));
    }
    rep.absorb("hom", hom);

    let mut factor = VerificationReport::new("factor", ctx.base());
    let t2 = t * t;
    let squares: Vec<Element> = fs.iter().filter(|f| rho_at(&t2, f).is_ok()).cloned().collect();
    for (f, r) in squares.iter().zip(run_cases(&squares, |f| rho_factor_trace(t, t, f))) {
        record(&mut factor, vec![f.to_string()], r);
    }
    rep.absorb("factor", factor);

    let mut power = VerificationReport::new("power", ctx.base());
    for &l in ls {
        for u in us {
            record(&mut power, vec![u.to_string(), l.to_string()], rho_power_identity(t, u, l));
        }
    }
    rep.absorb("power", power);
    Ok(rep.finish())
}

/// `{a,-a} = 0`, with auxiliary units drawn from the window.
pub fn derive_skew_symmetry(a: &Element, w: &SymbolWindow) -> Result<DerivationTrace> {
    let w = w.over(a.ring())?;
    skew_trace_with(a, &w.units()?)
}

pub fn skew_check(a: &Element, w: &SymbolWindow) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("skew", a.ring()).param("a", a.to_string()).window(w.params());
    record(&mut rep, vec![a.to_string()], derive_skew_symmetry(a, w));
    Ok(rep.finish())
}

/// Per-pair tame laws over every unordered pair of `units`:
/// `c(f,g) c(g,f) = 1`, and agreement of the two evaluation routes (which
/// [`tame_symbol`] enforces on each call). Also `c(f,-f) = 1` for every `f`.
pub fn tame_pair_laws(ctx: &LocalisationContext, units: &[Element]) -> VerificationReport {
    let mut rep = VerificationReport::new("tame-laws", ctx.localised()).param("t", ctx.t().to_string());
    let Some(prepared) = prepare_all(ctx, units, &mut rep) else {
        return rep.finish();
    };
    let rows: Vec<usize> = (0..units.len()).collect();
    let results = run_cases(&rows, |&i| -> Vec<(Vec<String>, String)> {
        let (f, pf) = (&units[i], &prepared[i]);
        let mut bad = Vec::new();
        let mut fail = |inputs: Vec<&Element>, detail: String| bad.push((inputs.iter().map(|x| x.to_string()).collect(), detail));
        match PreparedUnit::new(&-f, ctx).and_then(|m| tame_prepared(pf, &m, ctx)) {
            Ok(v) if v.is_one() => {}
            Ok(v) => fail(vec![f], format!("c(f,-f) = {v}")),
            Err(e) => fail(vec![f], e.to_string()),
        }
        for (g, pg) in units[i..].iter().zip(&prepared[i..]) {
            let check = || -> Result<Option<String>> {
                let prod = tame_prepared(pf, pg, ctx)? * tame_prepared(pg, pf, ctx)?;
                Ok((!prod.is_one()).then(|| format!("c(f,g) c(g,f) = {prod}")))
            };
            match check() {
                Ok(None) => {}
                Ok(Some(d)) => fail(vec![f, g], d),
                Err(e) => fail(vec![f, g], e.to_string()),
            }
        }
        bad
    });
    for (i, bad) in results.into_iter().enumerate() {
        rep.cases_run += 1 + (units.len() - i) as u64;
        for (inputs, d) in bad {
            rep.fail(inputs, d);
        }
    }
    rep.count("units", units.len() as u64);
    rep.finish()
}

fn prepare_all(ctx: &LocalisationContext, units: &[Element], rep: &mut VerificationReport) -> Option<Vec<PreparedUnit>> {
    let mut out = Vec::with_capacity(units.len());
    for f in units {
        match PreparedUnit::new(f, ctx) {
            Ok(p) => out.push(p),
            Err(e) => rep.fail(vec![f.to_string()], e),
        }
    }
    (out.len() == units.len()).then_some(out)
}

/// `c(f1 f2, g) = c(f1,g) c(f2,g)` and `c(g, f1 f2) = c(g,f1) c(g,f2)` for
/// all unordered `f1, f2` in `fs` and `g` in `gs`.
pub fn tame_bimultiplicativity(ctx: &LocalisationContext, fs: &[Element], gs: &[Element]) -> VerificationReport {
    let mut rep = VerificationReport::new("tame-bimultiplicativity", ctx.localised()).param("t", ctx.t().to_string());
    let (Some(pf), Some(pg)) = (prepare_all(ctx, fs, &mut rep), prepare_all(ctx, gs, &mut rep)) else {
        return rep.finish();
    };
    // c(f, g) and c(g, f) for every f in fs, g in gs.
    let table: Vec<Result<Vec<(Element, Element)>>> = run_cases(&pf, |f| {
        pg.iter().map(|g| Ok((tame_prepared(f, g, ctx)?, tame_prepared(g, f, ctx)?))).collect()
    });
    let table = match table.into_iter().collect::<Result<Vec<_>>>() {
        Ok(t) => t,
        Err(e) => {
            rep.fail(vec![], e);
            return rep.finish();
        }
    };
    let rows: Vec<usize> = (0..fs.len()).collect();
    let results = run_cases(&rows, |&i| -> Vec<(Vec<String>, String)> {
        let mut bad = Vec::new();
        for j in i..fs.len() {
            let inputs = |g: &Element| vec![fs[i].to_string(), fs[j].to_string(), g.to_string()];
            let f12 = match PreparedUnit::new(&(&fs[i] * &fs[j]), ctx) {
                Ok(p) => p,
                Err(e) => {
                    bad.push((inputs(&gs[0]), e.to_string()));
                    continue;
                }
            };
            for (k, (g, p)) in gs.iter().zip(&pg).enumerate() {
                let ((l1, r1), (l2, r2)) = (&table[i][k], &table[j][k]);
                let check = || -> Result<bool> {
                    Ok(tame_prepared(&f12, p, ctx)? == l1 * l2 && tame_prepared(p, &f12, ctx)? == r1 * r2)
                };
                match check() {
                    Ok(true) => {}
                    Ok(false) => bad.push((inputs(g), "not multiplicative".into())),
                    Err(e) => bad.push((inputs(g), e.to_string())),
                }
            }
        }
        bad
    });
    for (i, bad) in results.into_iter().enumerate() {
        rep.cases_run += ((fs.len() - i) * gs.len()) as u64;
        for (inputs, d) in bad {
            rep.fail(inputs, d);
        }
    }
    rep.finish()
}

/// All tame laws over window units of `R_t`: `c(f,-f) = 1` on every unit,
/// and reciprocity, route agreement and bimultiplicativity on `budget`
/// seeded pairs and triples (every pair when there are at most `budget`).
pub fn tame_laws_check(ctx: &LocalisationContext, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    use rand::Rng;
    let w = w.over(ctx.localised())?;
    let units = w.units()?;
    if units.is_empty() {
        return Err(Error::Precondition(format!("window {w} has no units")));
    }
    let mut rep = VerificationReport::new("tame-laws", ctx.localised())
        .param("t", ctx.t().to_string())
        .window(w.params())
        .seed(seed)
        .budget(budget as u64);
    let mut r = rng(seed);
    let mut pick = || units[r.gen_range(0..units.len())].clone();
    let pairs: Vec<(Element, Element)> = if units.len() * (units.len() + 1) / 2 <= budget {
        units.iter().enumerate().flat_map(|(i, f)| units[i..].iter().map(move |g| (f.clone(), g.clone()))).collect()
    } else {
        (0..budget).map(|_| (pick(), pick())).collect()
    };
    let triples: Vec<[Element; 3]> = (0..budget).map(|_| [pick(), pick(), pick()]).collect();
    rep = rep.param("exhaustive_pairs", pairs.len() != budget);

    let mut single = VerificationReport::new("antipodal", ctx.localised());
    for (f, res) in units.iter().zip(run_cases(&units, |f| tame_symbol(f, &-f, ctx))) {
        single.cases_run += 1;
        match res {
            Ok(v) if v.value.is_one() => {}
            Ok(v) => single.fail(vec![f.to_string()], format!("c(f,-f) = {}", v.value)),
            Err(e) => single.fail(vec![f.to_string()], e),
        }
    }
    rep.absorb("antipodal", single);

    let mut recip = VerificationReport::new("reciprocity", ctx.localised());
    let results = run_cases(&pairs, |(f, g)| -> Result<Element> {
        Ok(tame_symbol(f, g, ctx)?.value * tame_symbol(g, f, ctx)?.value)
    });
    for ((f, g), res) in pairs.iter().zip(results) {
        recip.cases_run += 1;
        match res {
            Ok(c) if c.is_one() => {}
            Ok(c) => recip.fail(vec![f.to_string(), g.to_string()], format!("c(f,g) c(g,f) = {c}")),
            Err(e) => recip.fail(vec![f.to_string(), g.to_string()], e),
        }
    }
    rep.absorb("reciprocity", recip);

    let mut bim = VerificationReport::new("bimultiplicativity", ctx.localised());
    for one in run_cases(&triples, |[f1, f2, g]| tame_bimultiplicativity(ctx, &[f1.clone(), f2.clone()], std::slice::from_ref(g))) {
        bim.cases_run += 1;
        bim.failures.extend(one.failures);
    }
    rep.absorb("bimultiplicativity", bim);
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
    fn rho_identities_small_window() {
        let c = ctx("ratfunc:7:x", "x");
        let w = SymbolWindow::degree(c.base(), 1).unwrap();
        let us: Vec<Element> = (1..7).map(|k| c.base().from_int(k)).collect();
        let rep = rho_identities_check(&c, &w, &us, &[1, 2, 3]).unwrap();
        assert_eq!(rep.status, Status::Pass, "{}", rep.to_text());
        assert_eq!(rep.counted("power.cases"), 18);
    }

    #[test]
    fn factor_identity_examples() {
        let r = RingDescriptor::parse("ratfunc:7:x,y").unwrap();
        let el = |s: &str| r.parse_element(s).unwrap();
        assert_eq!(rho_factor_identity_check(&el("x"), &el("x"), &el("1+2*x^2")).status, Status::Pass);
        assert_eq!(rho_factor_identity_check(&el("x"), &el("y"), &el("1+3*x*y")).status, Status::Pass);
        assert_eq!(rho_factor_identity_check(&el("x"), &el("y"), &el("1")).status, Status::Pass);
        assert_eq!(rho_factor_identity_check(&el("x"), &el("y"), &el("1+x")).status, Status::Fail);
        assert_eq!(power_identity_check(&el("x"), &el("0"), 1).status, Status::Fail);
        assert_eq!(power_identity_check(&el("x"), &el("-3"), 2).status, Status::Pass);
    }

    #[test]
    fn skew_in_f7() {
        let r = RingDescriptor::parse("fp:7").unwrap();
        let w = SymbolWindow::full(&r).unwrap();
        let rep = skew_check(&r.from_int(3), &w).unwrap();
        assert_eq!(rep.status, Status::Pass);
        assert!(!rep.evidence.is_empty());
    }

    #[test]
    fn tame_laws_small() {
        let c = ctx("ratfunc:7:x@invert(x)", "x");
        let w = SymbolWindow::degree(c.localised(), 1).unwrap();
        let rep = tame_laws_check(&c, &w, 40, 3).unwrap();
        assert_eq!(rep.status, Status::Pass, "{}", rep.to_text());
        let q = ctx("q", "3");
        let units = SymbolWindow::height(q.localised(), 4).unwrap().units().unwrap();
        assert_eq!(tame_pair_laws(&q, &units).status, Status::Pass);
        assert_eq!(tame_bimultiplicativity(&q, &units[..6], &units).status, Status::Pass);
    }
}
