//! Compatibility of `rho_t` with tame symbols: for units `f, g` of `R_t`
//! with `f + g = 1`, `c(f,g)` lies in `(1+tR)^x` and
//! `rho_t(c(f,g)) + {u, v} = 0` in `K_2(R)`, where `f = u t^n`, `g = v t^m`.

use serde_json::json;

use super::tame::tame_symbol;
use super::{run_cases, sample, VerificationReport};
use crate::error::{Error, Result};
use crate::ring::context::LocalisationContext;
use crate::ring::Element;
use crate::symbol::derive::{anticommute_trace, rho_at, rho_power_identity, rho_power_trace, skew_trace};
use crate::symbol::solver::certify_with;
use crate::symbol::{DerivationTrace, RelationInstance, SymbolExpr, SymbolWindow};

/// Which valuation pattern an instance falls under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LemmaCase {
    /// `n = m = 0`.
    Units,
    /// `m > 0`, hence `n = 0`.
    MPositive,
    /// `n > 0`, hence `m = 0`.
    NPositive,
    /// `m < 0`, hence `n = m`.
    Negative,
}

impl LemmaCase {
    pub fn name(self) -> &'static str {
        match self {
            LemmaCase::Units => "n=m=0",
            LemmaCase::MPositive => "m>0",
            LemmaCase::NPositive => "n>0",
            LemmaCase::Negative => "m<0",
        }
    }
}

/// A certified instance.
#[derive(Clone, Debug)]
pub struct LemmaInstance {
    pub case: LemmaCase,
    /// `c(f,g)` as a unit of `R`.
    pub tame: Element,
    /// Proves `rho_t(c(f,g)) + {u,v} = 0` over `R`.
    pub trace: DerivationTrace,
}

/// Certifies one instance of the lemma.
pub fn rho_tame_instance(f: &Element, g: &Element, ctx: &LocalisationContext) -> Result<LemmaInstance> {
    let lr = ctx.localised();
    let (fl, gl) = (lr.coerce(f)?, lr.coerce(g)?);
    if !(&fl + &gl).is_one() {
        return Err(Error::Precondition(format!("{f} + {g} is not 1")));
    }
    let tv = tame_symbol(&fl, &gl, ctx)?;
    if !ctx.in_one_plus_t(&tv.value) {
        return Err(Error::Internal(format!("c({f},{g}) = {} is not congruent to 1 mod t", tv.value)));
    }
    let t = ctx.t();
    let (u, n, v, m) = (&tv.f.u, tv.f.n, &tv.g.u, tv.g.n);
    let target = rho_at(t, &tv.value)?.plus(&SymbolExpr::steinberg(u, v)?);
    let (case, blocks) = if n == 0 && m == 0 {
        (LemmaCase::Units, vec![DerivationTrace::single(RelationInstance::s3(u)?)])
    } else if m > 0 {
        (
            LemmaCase::MPositive,
            vec![rho_power_trace(t, u, m)?, rho_power_identity(t, &-v, m as u32)?, anticommute_trace(v, u)?],
        )
    } else if n > 0 {
        (LemmaCase::NPositive, vec![rho_power_trace(t, v, -n)?, rho_power_identity(t, &-u, n as u32)?])
    } else {
        // u + v = t^l, c = w^l with w = 1 - u^{-1} t^l = -v/u.
        let l = -m;
        let ui = u.inv()?;
        let w = ctx.base().one() - &ui * &t.pow(l)?;
        (
            LemmaCase::Negative,
            vec![
                rho_power_trace(t, &w, l)?,
                rho_power_identity(t, &-&ui, l as u32)?,
                DerivationTrace::single(RelationInstance::s1r(&ui, &-&ui, v)?),
                skew_trace(&ui)?,
                DerivationTrace::single(RelationInstance::s1l(&ui, u, v)?),
            ],
        )
    };
    let trace = certify_with(&target, &blocks)
        .ok_or_else(|| Error::SearchExhausted(format!("lemma instance ({f}, {g}) did not close")))?;
    Ok(LemmaInstance { case, tame: tv.value, trace })
}

/// Runs the lemma over the given pairs.
pub fn rho_tame_lemma_pairs(pairs: &[(Element, Element)], ctx: &LocalisationContext) -> VerificationReport {
    let mut rep = VerificationReport::new("rho-lemma", ctx.localised()).param("t", ctx.t().to_string());
    let results = run_cases(pairs, |(f, g)| rho_tame_instance(f, g, ctx));
    for ((f, g), r) in pairs.iter().zip(results) {
        rep.cases_run += 1;
        match r {
            Ok(inst) => {
                rep.count(inst.case.name(), 1);
                if rep.counted(inst.case.name()) == 1 {
                    rep.evidence(json!({
                        "f": f.to_string(), "g": g.to_string(), "case": inst.case.name(),
                        "c": inst.tame.to_string(), "trace": inst.trace.to_json(),
                    }));
                }
            }
            Err(e) => rep.fail(vec![f.to_string(), g.to_string()], e),
        }
    }
    rep
}

/// All pairs `(f, 1-f)` of units of `R_t` inside the window.
pub fn lemma_pairs(w: &SymbolWindow) -> Result<Vec<(Element, Element)>> {
    let one = w.ring().one();
    Ok(w.units()?
        .into_iter()
        .filter_map(|f| {
            let g = &one - &f;
            (g.is_unit() && w.contains(&g)).then_some((f, g))
        })
        .collect())
}

/// The lemma over every pair `f + g = 1` of window units of `R_t`, or a
/// seeded sample of `budget` of them.
pub fn rho_tame_lemma_check(ctx: &LocalisationContext, w: &SymbolWindow, budget: Option<usize>, seed: u64) -> Result<VerificationReport> {
    let w = w.over(ctx.localised())?;
    let pairs = lemma_pairs(&w)?;
    let (chosen, exhaustive) = match budget {
        Some(b) => sample(&pairs, b, seed),
        None => (pairs, true),
    };
    let mut rep = rho_tame_lemma_pairs(&chosen, ctx).window(w.params()).seed(seed);
    if let Some(b) = budget {
        rep = rep.budget(b as u64);
    }
    rep = rep.param("exhaustive", exhaustive);
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;

    fn ctx() -> LocalisationContext {
        LocalisationContext::from_spec(&RingDescriptor::parse("ratfunc:7:x@invert(x)").unwrap(), "x").unwrap()
    }

    #[test]
    fn each_case() {
        let c = ctx();
        let r = c.localised().clone();
        let el = |s: &str| r.parse_element(s).unwrap();
        let cases = [
            ("3*x^2", "1-3*x^2", LemmaCase::NPositive),
            ("1-3*x^2", "3*x^2", LemmaCase::MPositive),
            ("3", "-2", LemmaCase::Units),
            ("(2+x)/x^2", "(-2-x+x^2)/x^2", LemmaCase::Negative),
        ];
        for (f, g, case) in cases {
            let inst = rho_tame_instance(&el(f), &el(g), &c).unwrap();
            assert_eq!(inst.case, case, "{f}");
        }
        let inst = rho_tame_instance(&el("3*x^2"), &el("1-3*x^2"), &c).unwrap();
        assert_eq!(inst.tame, c.base().parse_element("(1-3*x^2)^(-2)").unwrap());
        assert!(rho_tame_instance(&el("x"), &el("x"), &c).is_err());
    }

    #[test]
    fn degree_one_window() {
        let c = ctx();
        let w = SymbolWindow::degree(c.localised(), 1).unwrap();
        let rep = rho_tame_lemma_check(&c, &w, None, 0).unwrap();
        assert_eq!(rep.status, super::super::Status::Pass, "{}", rep.to_text());
        assert!(rep.counted("m<0") > 0 && rep.counted("n=m=0") > 0);
    }
}
