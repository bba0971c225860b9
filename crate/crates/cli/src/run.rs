use k2sym::abelian::GroupInvariants;
use k2sym::lab::{assumptions, identities, lemma, remark, square, stability, tame, VerificationReport};
use k2sym::symbol::derive::{ds_to_steinberg, rho_at, rho_coefficient};
use k2sym::symbol::window::{build_full, build_k2m_window, System, WindowPresentation};
use k2sym::{Element, Error, LocalisationContext, Result, RingDescriptor, RingKind, SymbolExpr, SymbolWindow, WindowKind};
use serde_json::{json, Value as Json};

use crate::args::*;

/// What a command produced.
pub enum Outcome {
    Report(VerificationReport),
    Value { json: Json, text: String },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Report(r) => r.status.exit_code(),
            Outcome::Value { .. } => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Outcome::Report(r), Format::Json) => r.to_json(),
            (Outcome::Report(r), Format::Text) => r.to_text(),
            (Outcome::Value { json, .. }, Format::Json) => serde_json::to_string_pretty(json).expect("values serialise"),
            (Outcome::Value { text, .. }, Format::Text) => text.clone(),
        }
    }
}

fn ring(spec: &str) -> Result<RingDescriptor> {
    RingDescriptor::parse(spec)
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Parse(format!("--{flag} is required for this check")))
}

fn context(r: &Option<String>, t: &Option<String>) -> Result<LocalisationContext> {
    LocalisationContext::from_spec(&ring(required(r, "ring")?)?, required(t, "t")?)
}

/// The window described by the flags, or a default: every element of a
/// finite ring, degree 1 for rational functions, height 10 for rationals.
pub fn window(ring: &RingDescriptor, w: &WindowArgs) -> Result<SymbolWindow> {
    if let Some(src) = &w.elements {
        let xs = src.split(';').map(|s| ring.parse_element(s.trim())).collect::<Result<Vec<_>>>()?;
        return SymbolWindow::explicit(ring, xs);
    }
    if let Some(d) = w.max_deg {
        return SymbolWindow::new(ring, WindowKind::Degree { num: d, den: w.max_den_deg.unwrap_or(d) });
    }
    if let Some(h) = w.height {
        return SymbolWindow::height(ring, h);
    }
    match ring.kind() {
        _ if ring.is_finite() => SymbolWindow::full(ring),
        RingKind::RatFuncLocal(_) => SymbolWindow::degree(ring, 1),
        RingKind::Rationals | RingKind::LocalInt(_) => SymbolWindow::height(ring, 10),
        _ => Err(Error::Parse(format!("{ring} needs an explicit --elements window"))),
    }
}

fn invariants_json(inv: &GroupInvariants) -> Json {
    json!({
        "torsion": inv.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "rank": inv.rank,
    })
}

pub fn compute(a: &ComputeArgs) -> Result<Outcome> {
    let r = ring(&a.ring)?;
    let system = match a.presentation {
        Presentation::S => System::Steinberg,
        Presentation::Ds => System::DennisStein,
    };
    let has_window = a.window.max_deg.is_some() || a.window.height.is_some() || a.window.elements.is_some();
    let (pres, scope): (WindowPresentation, Json) = if r.is_finite() && !has_window {
        if system == System::DennisStein && !r.is_finite_local() {
            return Err(Error::Precondition(format!("{r} is not local; the Dennis-Stein presentation needs a local ring")));
        }
        (build_full(&r, system, a.shuffle_seed)?, json!({ "kind": "full" }))
    } else {
        if system == System::DennisStein {
            return Err(Error::Unsupported("Dennis-Stein presentations are built for finite local rings only".into()));
        }
        let w = window(&r, &a.window)?;
        (build_k2m_window(&w)?, w.params())
    };
    let inv = pres.group.invariants();
    let json = json!({
        "command": "compute",
        "ring": r.to_string(),
        "presentation": match system { System::Steinberg => "s", System::DennisStein => "ds" },
        "window": scope,
        "shuffle_seed": a.shuffle_seed,
        "generators": pres.group.num_generators(),
        "relations": pres.group.relations().len(),
        "instances": pres.instances_considered,
        "invariants": invariants_json(&inv),
        "group": inv.to_string(),
        "trivial": inv.is_trivial(),
    });
    let text = format!(
        "ring:       {r}\npresentation: {}\ngenerators: {}\nrelations:  {}\ngroup:      {}\n",
        json["presentation"].as_str().unwrap(),
        pres.group.num_generators(),
        pres.group.relations().len(),
        inv
    );
    Ok(Outcome::Value { json, text })
}

pub fn tame_cmd(a: &TameArgs) -> Result<Outcome> {
    let ctx = LocalisationContext::from_spec(&ring(&a.ring)?, &a.t)?;
    let lr = ctx.localised();
    let f = lr.parse_element(&a.f)?;
    let g = lr.parse_element(&a.g)?;
    for x in [&f, &g] {
        if !x.try_is_unit()? {
            return Err(Error::NotUnit(x.to_string(), lr.to_string()));
        }
    }
    let tv = tame::tame_symbol(&f, &g, &ctx)?;
    let residue = tv.residue(&ctx)?;
    let json = json!({
        "command": "tame",
        "ring": lr.to_string(),
        "t": ctx.t().to_string(),
        "f": f.to_string(),
        "g": g.to_string(),
        "nu_f": tv.f.n,
        "nu_g": tv.g.n,
        "u": tv.f.u.to_string(),
        "v": tv.g.u.to_string(),
        "c": tv.value.to_string(),
        "residue": residue.to_string(),
        "residue_ring": ctx.residue_ring().to_string(),
    });
    let text = format!(
        "f = ({}) t^{}\ng = ({}) t^{}\nc(f,g) = {}\nresidue = {} in {}\n",
        tv.f.u,
        tv.f.n,
        tv.g.u,
        tv.g.n,
        tv.value,
        residue,
        ctx.residue_ring()
    );
    Ok(Outcome::Value { json, text })
}

pub fn rho_cmd(a: &RhoArgs) -> Result<Outcome> {
    let ctx = LocalisationContext::from_spec(&ring(&a.ring)?, &a.t)?;
    let f = ctx.base().parse_element(&a.f)?;
    if !f.try_is_unit()? {
        return Err(Error::NotUnit(f.to_string(), ctx.base().to_string()));
    }
    let t = ctx.t();
    let coeff = rho_coefficient(t, &f)?;
    let rho = rho_at(t, &f)?;
    let (steinberg, trace) = if coeff.is_zero() { (SymbolExpr::zero(), None) } else { ds_to_steinberg(&coeff, t).map(|(e, tr)| (e, Some(tr)))? };
    let json = json!({
        "command": "rho",
        "ring": ctx.base().to_string(),
        "t": t.to_string(),
        "f": f.to_string(),
        "a": coeff.to_string(),
        "rho": rho.to_string(),
        "steinberg": steinberg.to_string(),
        "trace": trace.as_ref().map(|tr| tr.to_json()),
    });
    let text = format!("rho_{t}({f}) = {rho}\n            = {steinberg}\n");
    Ok(Outcome::Value { json, text })
}

pub fn stability_cmd(a: &StabilityArgs) -> Result<Outcome> {
    let r = ring(&a.ring)?;
    let rep = stability_report(&r, a.k, a.weak, &a.window, a.budget, a.seed)?;
    Ok(Outcome::Report(rep))
}

fn stability_report(r: &RingDescriptor, k: usize, weak: bool, w: &WindowArgs, budget: usize, seed: u64) -> Result<VerificationReport> {
    match (weak, r.is_finite()) {
        (false, _) => stability::check_k_fold_stable(r, k),
        (true, true) => stability::check_weak_k_fold_stable(r, k),
        (true, false) => {
            let w = window(r, w)?;
            stability::weak_stability_sampled(r, k, &w, budget, seed)
        }
    }
}

pub fn window_info(a: &WindowInfoArgs) -> Result<Outcome> {
    let r = ring(&a.ring)?;
    let w = window(&r, &a.window)?;
    let elems = w.elements()?;
    let units = w.units()?;
    let first: Vec<String> = elems.iter().take(a.show).map(|x| x.to_string()).collect();
    let json = json!({
        "command": "window-info",
        "ring": r.to_string(),
        "window": w.params(),
        "elements": elems.len(),
        "units": units.len(),
        "first": first,
    });
    let text = format!("window:   {w}\nelements: {}\nunits:    {}\nfirst:    {}\n", elems.len(), units.len(), first.join(", "));
    Ok(Outcome::Value { json, text })
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let budget = a.budget.unwrap_or(200);
    let sampled = if a.exhaustive { None } else { Some(budget) };
    let rep = match a.check {
        Check::RhoLemma => {
            let ctx = context(&a.ring, &a.t)?;
            match (&a.f, &a.g) {
                (Some(f), Some(g)) => {
                    let lr = ctx.localised();
                    let pair = (lr.parse_element(f)?, lr.parse_element(g)?);
                    lemma::rho_tame_lemma_pairs(&[pair], &ctx).finish()
                }
                (None, None) => {
                    let w = window(ctx.localised(), &a.window)?;
                    lemma::rho_tame_lemma_check(&ctx, &w, sampled, a.seed)?
                }
                _ => return Err(Error::Parse("give both --f and --g, or neither".into())),
            }
        }
        Check::Pushout => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.base(), &a.window)?;
            square::cocartesian_check(&ctx, &w, budget, a.seed)?
        }
        Check::Ses => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.base(), &a.window)?;
            square::ses_check(&ctx, &w, budget, a.seed)?
        }
        Check::Stability => {
            let r = ring(required(&a.ring, "ring")?)?;
            let k = a.k.ok_or_else(|| Error::Parse("--k is required for this check".into()))?;
            stability_report(&r, k, a.weak, &a.window, budget, a.seed)?
        }
        Check::A1 => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.localised(), &a.window)?;
            assumptions::check_a1(&ctx, &w, budget, a.seed)?
        }
        Check::A2 => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.base(), &a.window)?;
            assumptions::check_a2(&ctx, &w, budget, a.seed)?
        }
        Check::A3 => {
            let ctx = context(&a.ring, &a.t)?;
            match a.random {
                Some(n) => assumptions::check_a3_random(&ctx, n, a.window.max_deg.unwrap_or(3), a.seed, budget.max(64))?,
                None => {
                    let w = window(ctx.base(), &a.window)?;
                    assumptions::check_a3(&ctx, &w, budget, a.seed)?
                }
            }
        }
        Check::A4 => {
            let ctx = context(&a.ring, &a.t)?;
            let res = ctx.residue_ring().clone();
            let w = if res.is_finite() { SymbolWindow::full(&res)? } else { window(&res, &a.window)? };
            assumptions::check_a4(&ctx, &w)?
        }
        Check::Remark35 => remark::remark_check(a.precision, -a.support, a.support, a.coeff_height)?,
        Check::Skew => {
            let r = ring(required(&a.ring, "ring")?)?;
            let x = r.parse_element(required(&a.a, "a")?)?;
            if !x.try_is_unit()? {
                return Err(Error::NotUnit(x.to_string(), r.to_string()));
            }
            let w = window(&r, &a.window)?;
            identities::skew_check(&x, &w)?
        }
        Check::Rho => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.base(), &a.window)?;
            let us = constant_units(ctx.base());
            identities::rho_identities_check(&ctx, &w, &us, &[1, 2, 3])?
        }
        Check::RhoFactor => {
            let r = ring(required(&a.ring, "ring")?)?;
            let el = |v: &Option<String>, n| -> Result<Element> { r.parse_element(required(v, n)?) };
            let (s, t, f) = (el(&a.s, "s")?, el(&a.t, "t")?, el(&a.f, "f")?);
            identities::rho_factor_identity_check(&s, &t, &f)
        }
        Check::RhoPower => {
            let r = ring(required(&a.ring, "ring")?)?;
            let t = r.parse_element(required(&a.t, "t")?)?;
            let u = r.parse_element(required(&a.u, "u")?)?;
            let l = a.l.ok_or_else(|| Error::Parse("--l is required for this check".into()))?;
            identities::power_identity_check(&t, &u, l)
        }
        Check::TameLaws => {
            let ctx = context(&a.ring, &a.t)?;
            let w = window(ctx.localised(), &a.window)?;
            identities::tame_laws_check(&ctx, &w, budget, a.seed)?
        }
    };
    Ok(Outcome::Report(rep))
}

/// The nonzero constants of a rational-function ring, or every unit of a
/// finite one; these are the `u` of the power identity.
fn constant_units(r: &RingDescriptor) -> Vec<Element> {
    match r.kind() {
        RingKind::RatFuncLocal(s) => (1..s.p as i64).map(|c| r.from_int(c)).collect(),
        _ if r.is_finite() => r.units().unwrap_or_default(),
        _ => [1, -1, 2, -2].iter().map(|&c| r.from_int(c)).filter(|x| x.is_unit()).collect(),
    }
}
