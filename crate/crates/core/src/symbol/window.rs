//! Finite windows on the generator sets of the symbol presentations, the
//! relation instances available inside a window, and zero-certification.
//!
//! A window is a membership predicate on ring elements plus a deterministic
//! enumeration order (lowest height first, so constants come before
//! anything else). Presentations built from a window only ever contain
//! relation instances all of whose elements lie in the window, which makes
//! every certificate sound for the full ring.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use super::relation::{DerivationTrace, RelationInstance};
use super::solver::certify_with;
use super::{SymbolExpr, SymbolTerm};
use crate::abelian::{MembershipOracle, PresentedGroup};
use crate::error::{Error, Result};
use crate::ring::poly::{Monomial, Poly};
use crate::ring::ratfunc::RatFunc;
use crate::ring::{Element, RingDescriptor, RingKind, Value};

/// Which defining relations a presentation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    /// `(S1)` and `(S3)` on Steinberg symbols.
    Steinberg,
    /// `(D1)`–`(D3)` on Dennis–Stein symbols.
    DennisStein,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowKind {
    /// Every element of a finite ring.
    Full,
    /// Exactly the listed elements.
    Explicit(Vec<Element>),
    /// Rational functions whose reduced numerator and denominator have total
    /// degree at most `num` and `den`.
    Degree { num: u32, den: u32 },
    /// Rationals `a/b` in lowest terms with `|a|, |b| <= h`.
    Height(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolWindow {
    ring: RingDescriptor,
    kind: WindowKind,
}

/// Refuse to enumerate windows with more candidates than this.
const ENUMERATION_LIMIT: u64 = 5_000_000;

impl SymbolWindow {
    pub fn new(ring: &RingDescriptor, kind: WindowKind) -> Result<Self> {
        match (&kind, ring.kind()) {
            (WindowKind::Full, _) if !ring.is_finite() => {
                return Err(Error::Unsupported(format!("{ring} is infinite; choose a bounded window")))
            }
            (WindowKind::Degree { .. }, RingKind::RatFuncLocal(_)) => {}
            (WindowKind::Degree { .. }, _) => {
                return Err(Error::Unsupported("degree windows need a rational-function ring".into()))
            }
            (WindowKind::Height(_), RingKind::Rationals | RingKind::LocalInt(_)) => {}
            (WindowKind::Height(_), _) => {
                return Err(Error::Unsupported("height windows need a ring of rationals".into()))
            }
            (WindowKind::Explicit(xs), _) => {
                if let Some(x) = xs.iter().find(|x| x.ring() != ring) {
                    return Err(Error::InvalidRing(format!("{x} is not an element of {ring}")));
                }
            }
            _ => {}
        }
        let kind = match kind {
            WindowKind::Explicit(mut xs) => {
                xs.sort_by_key(order_key);
                xs.dedup();
                WindowKind::Explicit(xs)
            }
            k => k,
        };
        Ok(SymbolWindow { ring: ring.clone(), kind })
    }

    pub fn full(ring: &RingDescriptor) -> Result<Self> {
        Self::new(ring, WindowKind::Full)
    }

    pub fn degree(ring: &RingDescriptor, d: u32) -> Result<Self> {
        Self::new(ring, WindowKind::Degree { num: d, den: d })
    }

    pub fn height(ring: &RingDescriptor, h: u64) -> Result<Self> {
        Self::new(ring, WindowKind::Height(h))
    }

    pub fn explicit(ring: &RingDescriptor, xs: Vec<Element>) -> Result<Self> {
        Self::new(ring, WindowKind::Explicit(xs))
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn kind(&self) -> &WindowKind {
        &self.kind
    }

    /// The same bounds over another ring (for instance `R_t` for a window
    /// on `R`). Explicit windows keep the listed elements that coerce.
    pub fn over(&self, ring: &RingDescriptor) -> Result<Self> {
        let kind = match &self.kind {
            WindowKind::Explicit(xs) => WindowKind::Explicit(xs.iter().filter_map(|x| ring.coerce(x).ok()).collect()),
            k => k.clone(),
        };
        Self::new(ring, kind)
    }

    pub fn contains(&self, x: &Element) -> bool {
        if x.ring() != &self.ring {
            return match self.ring.coerce(x) {
                Ok(y) => self.contains(&y),
                Err(_) => false,
            };
        }
        match (&self.kind, x.value()) {
            (WindowKind::Full, _) => true,
            (WindowKind::Explicit(xs), _) => xs.binary_search_by(|y| order_key(y).cmp(&order_key(x))).is_ok(),
            (WindowKind::Degree { num, den }, Value::Frac(f)) => {
                f.num().total_degree() <= *num && f.den().total_degree() <= *den
            }
            (WindowKind::Height(h), Value::Rational(q)) => {
                let h = num_bigint::BigInt::from(*h);
                q.numer().abs() <= h && q.denom() <= &h
            }
            _ => false,
        }
    }

    pub fn contains_unit(&self, x: &Element) -> bool {
        self.contains(x) && x.is_unit()
    }

    /// Every element of the window, lowest height first.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let mut out = match &self.kind {
            WindowKind::Full => self.ring.elements()?,
            WindowKind::Explicit(xs) => xs.clone(),
            WindowKind::Degree { num, den } => ratfunc_window(&self.ring, *num, *den)?,
            WindowKind::Height(h) => rational_window(&self.ring, *h)?,
        };
        out.sort_by_key(order_key);
        Ok(out)
    }

    /// The units of the window in enumeration order.
    pub fn units(&self) -> Result<Vec<Element>> {
        Ok(self.elements()?.into_iter().filter(|x| x.is_unit()).collect())
    }

    /// Parameters for reports.
    pub fn params(&self) -> Json {
        match &self.kind {
            WindowKind::Full => json!({ "kind": "full" }),
            WindowKind::Explicit(xs) => {
                json!({ "kind": "explicit", "elements": xs.iter().map(|x| x.to_string()).collect::<Vec<_>>() })
            }
            WindowKind::Degree { num, den } => json!({ "kind": "degree", "max_num_deg": num, "max_den_deg": den }),
            WindowKind::Height(h) => json!({ "kind": "height", "max_height": h }),
        }
    }
}

impl fmt::Display for SymbolWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WindowKind::Full => write!(f, "all of {}", self.ring),
            WindowKind::Explicit(xs) => {
                let s: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}} in {}", s.join(", "), self.ring)
            }
            WindowKind::Degree { num, den } => write!(f, "degree <= {num}/{den} in {}", self.ring),
            WindowKind::Height(h) => write!(f, "height <= {h} in {}", self.ring),
        }
    }
}

/// Size measure used to order enumerations.
pub fn height(x: &Element) -> u64 {
    match x.value() {
        Value::Residue(_) => 0,
        Value::Rational(q) => {
            let n = q.numer().abs().to_u64().unwrap_or(u64::MAX);
            let d = q.denom().to_u64().unwrap_or(u64::MAX);
            n.max(d)
        }
        Value::Frac(f) => f.num().total_degree().max(f.den().total_degree()) as u64,
        Value::Series(s) => s.support().count() as u64,
    }
}

fn order_key(x: &Element) -> (u64, Element) {
    (height(x), x.clone())
}

fn monomials(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::ONE];
    for v in 0..nvars {
        let mut next = Vec::new();
        for m in &out {
            let mut k = 0u16;
            loop {
                let mut e = m.0;
                e[v] = k;
                let mm = Monomial(e);
                if mm.degree() > d {
                    break;
                }
                next.push(mm);
                k += 1;
            }
        }
        out = next;
    }
    out
}

/// All polynomials with total degree at most `d`.
fn polys(p: u32, nvars: usize, d: u32) -> Vec<Poly> {
    let ms = monomials(nvars, d);
    let count = (p as u64).checked_pow(ms.len() as u32).unwrap_or(u64::MAX);
    let mut out = Vec::with_capacity(count as usize);
    let mut digits = vec![0u32; ms.len()];
    loop {
        let terms = ms.iter().zip(&digits).filter(|(_, &c)| c != 0).map(|(m, &c)| (*m, c)).collect();
        out.push(Poly::from_terms(p, terms));
        let mut i = 0;
        loop {
            if i == digits.len() {
                return out;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn ratfunc_window(ring: &RingDescriptor, num: u32, den: u32) -> Result<Vec<Element>> {
    let spec = ring.ratfunc_spec().unwrap();
    let n = spec.vars.len();
    let (mn, md) = (monomials(n, num).len() as u32, monomials(n, den).len() as u32);
    let size = (spec.p as u64).checked_pow(mn + md).unwrap_or(u64::MAX);
    if size > ENUMERATION_LIMIT * spec.p as u64 {
        return Err(Error::Unsupported(format!("window with {num}/{den} degree bounds is too large to enumerate")));
    }
    let nums = polys(spec.p, n, num);
    let dens: Vec<Poly> = polys(spec.p, n, den).into_iter().filter(|d| d.leading().is_some_and(|(_, c)| c == 1)).collect();
    let mut out = Vec::new();
    for d in &dens {
        if !spec.contains(&RatFunc::new(Poly::one(spec.p), d.clone()).unwrap()) {
            continue;
        }
        for a in &nums {
            let f = RatFunc::new(a.clone(), d.clone()).unwrap();
            // Keep only fractions already in lowest terms, so each element
            // appears exactly once.
            if f.num() == a && f.den() == d {
                out.push(ring.element(Value::Frac(f))?);
            }
        }
    }
    Ok(out)
}

fn rational_window(ring: &RingDescriptor, h: u64) -> Result<Vec<Element>> {
    if (2 * h + 1).saturating_mul(h) > ENUMERATION_LIMIT {
        return Err(Error::Unsupported(format!("height window {h} is too large to enumerate")));
    }
    let h = h as i64;
    let mut out = Vec::new();
    for b in 1..=h.max(1) {
        for a in -h..=h {
            if a.gcd(&b) != 1 && !(a == 0 && b == 1) {
                continue;
            }
            let q = num_rational::BigRational::new(a.into(), b.into());
            if let Ok(x) = ring.element(Value::Rational(q)) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// A presentation together with, for every stored relation, the instance
/// that produced it.
pub struct WindowPresentation {
    pub group: PresentedGroup<SymbolTerm>,
    pub witnesses: Vec<RelationInstance>,
    pub instances_considered: usize,
    oracle: OnceLock<MembershipOracle>,
}

impl WindowPresentation {
    fn new() -> Self {
        WindowPresentation {
            group: PresentedGroup::new(),
            witnesses: Vec::new(),
            instances_considered: 0,
            oracle: OnceLock::new(),
        }
    }

    fn add(&mut self, inst: RelationInstance) {
        self.instances_considered += 1;
        let terms: Vec<(SymbolTerm, i64)> = inst.expr().terms().map(|(t, c)| (t.clone(), c)).collect();
        if let Some(k) = self.group.add_relation(terms) {
            if k == self.witnesses.len() {
                self.witnesses.push(inst);
            }
        }
    }

    /// Certifies `e = 0`, returning the relation combination as a trace.
    pub fn certify(&self, e: &SymbolExpr) -> Option<DerivationTrace> {
        let v = self.group.vector(e.terms())?;
        let combo = self.oracle.get_or_init(|| self.group.oracle()).certify(&v)?;
        let mut tr = DerivationTrace::new();
        for (k, c) in combo {
            tr.push(c.to_i64()?, self.witnesses[k].clone());
        }
        tr.proves(e).then_some(tr)
    }
}

fn shuffled(mut xs: Vec<Element>, seed: Option<u64>) -> Vec<Element> {
    if let Some(s) = seed {
        xs.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    xs
}

/// Every relation instance of the chosen system whose elements all lie in
/// the given finite sets (`units` for Steinberg symbols, `elems` for
/// Dennis–Stein symbols), in a deterministic order.
pub fn instantiate(units: &[Element], elems: &[Element], system: System, inside: &dyn Fn(&Element) -> bool) -> Vec<RelationInstance> {
    let mut out = Vec::new();
    match system {
        System::Steinberg => {
            for a in units {
                for b in units {
                    for c in units {
                        if inside(&(a * c)) {
                            out.extend(RelationInstance::s1l(a, c, b));
                        }
                        if inside(&(b * c)) {
                            out.extend(RelationInstance::s1r(a, b, c));
                        }
                    }
                }
                let one_minus = a.ring().one() - a;
                if one_minus.is_unit() && inside(&one_minus) {
                    out.extend(RelationInstance::s3(a));
                }
            }
        }
        System::DennisStein => {
            let one = match elems.first() {
                Some(x) => x.ring().one(),
                None => return out,
            };
            for a in elems {
                for b in elems {
                    let ab = a * b;
                    if !(&one + &ab).is_unit() {
                        continue;
                    }
                    if inside(&-a) && inside(&-b) {
                        out.extend(RelationInstance::d1(a, b));
                    }
                    for c in elems {
                        let ac = a * c;
                        let abc = &ab * c;
                        if (&one + &ac).is_unit() && inside(&(b + c + &abc)) {
                            out.extend(RelationInstance::d2(a, b, c));
                        }
                        if (&one + &abc).is_unit() && inside(&(b * c)) && inside(&ab) && inside(&ac) {
                            out.extend(RelationInstance::d3(a, b, c));
                        }
                    }
                }
            }
        }
    }
    out
}

/// All relation instances of `system` inside the window.
pub fn instantiate_relations(w: &SymbolWindow, system: System) -> Result<Vec<RelationInstance>> {
    let elems = w.elements()?;
    let units: Vec<Element> = elems.iter().filter(|x| x.is_unit()).cloned().collect();
    let n = match system {
        System::Steinberg => units.len(),
        System::DennisStein => elems.len(),
    } as u64;
    if n.saturating_pow(3) > 50 * ENUMERATION_LIMIT {
        return Err(Error::Unsupported(format!("{n} window elements is too many to instantiate all triples")));
    }
    Ok(instantiate(&units, &elems, system, &|x| w.contains(x)))
}

/// The Steinberg presentation restricted to the window: generators are the
/// symbols `{a,b}` of window units, relations the `(S1)`/`(S3)` instances
/// inside the window.
pub fn build_k2m_window(w: &SymbolWindow) -> Result<WindowPresentation> {
    let units = w.units()?;
    let mut pres = WindowPresentation::new();
    for a in &units {
        for b in &units {
            pres.group.add_generator(SymbolTerm::steinberg(a, b)?);
        }
    }
    for inst in instantiate_relations(w, System::Steinberg)? {
        pres.add(inst);
    }
    Ok(pres)
}

/// The complete Dennis–Stein presentation of a finite local ring,
/// optionally enumerating elements in a seeded random order.
pub fn build_ds_full(ring: &RingDescriptor, shuffle_seed: Option<u64>) -> Result<WindowPresentation> {
    if !ring.is_finite_local() {
        return Err(Error::Precondition(format!("{ring} is not a finite local ring")));
    }
    build_full(ring, System::DennisStein, shuffle_seed)
}

/// Either complete presentation of a finite ring.
pub fn build_full(ring: &RingDescriptor, system: System, shuffle_seed: Option<u64>) -> Result<WindowPresentation> {
    if !ring.is_finite() {
        return Err(Error::Precondition(format!("{ring} is not finite")));
    }
    let elems = shuffled(ring.elements()?, shuffle_seed);
    let units: Vec<Element> = elems.iter().filter(|x| x.is_unit()).cloned().collect();
    let mut pres = WindowPresentation::new();
    match system {
        System::Steinberg => {
            for a in &units {
                for b in &units {
                    pres.group.add_generator(SymbolTerm::steinberg(a, b)?);
                }
            }
        }
        System::DennisStein => {
            for a in &elems {
                for b in &elems {
                    if let Ok(t) = SymbolTerm::dennis_stein(a, b) {
                        pres.group.add_generator(t);
                    }
                }
            }
        }
    }
    for inst in instantiate(&units, &elems, system, &|_| true) {
        pres.add(inst);
    }
    Ok(pres)
}

/// Outcome of a zero-certification attempt. There is deliberately no
/// "non-zero" verdict: a window only ever sees part of the relations.
#[derive(Clone, Debug)]
pub enum Certification {
    Zero(DerivationTrace),
    Unknown { params: Json },
}

impl Certification {
    pub fn is_zero(&self) -> bool {
        matches!(self, Certification::Zero(_))
    }

    pub fn trace(&self) -> Option<&DerivationTrace> {
        match self {
            Certification::Zero(t) => Some(t),
            Certification::Unknown { .. } => None,
        }
    }
}

/// Largest candidate set for which the full local presentation is built.
const CLOSURE_CAP: usize = 16;
const CLOSURE_DEPTH: usize = 2;

fn closure_step(set: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = set.to_vec();
    for a in set {
        out.push(-a);
        if let Ok(i) = a.inv() {
            out.push(i);
        }
        let c = a.ring().one() - a;
        if c.is_unit() {
            out.push(c);
        }
        for b in set {
            out.push(a * b);
        }
    }
    out.retain(|x| x.is_unit());
    out.sort();
    out.dedup();
    out
}

/// Tries to show `e = 0` using only relation instances inside `w`.
///
/// The candidate elements are grown from the arguments of `e` by a fixed
/// number of rounds of products, inverses, negation and `a -> 1-a`,
/// computed without reference to `w`; the window only filters them. A
/// larger window therefore sees a superset of the relations, so a
/// certificate found in `w` is also found in every window containing it.
pub fn certify_zero(e: &SymbolExpr, w: &SymbolWindow) -> Result<Certification> {
    for x in e.elements() {
        if !w.contains(&x) {
            return Err(Error::Precondition(format!("{x} lies outside the window {w}")));
        }
    }
    if e.is_zero() {
        return Ok(Certification::Zero(DerivationTrace::new()));
    }
    let ring = w.ring().clone();
    let e = e.coerce(&ring)?;
    let mut cand: Vec<Element> = e.elements().into_iter().filter(|x| x.is_unit()).collect();
    cand.push(ring.one());
    cand.push(-ring.one());
    cand.sort();
    cand.dedup();
    let mut depth = 0;
    let mut last_size = 0;
    loop {
        let units: Vec<Element> = cand.iter().filter(|x| w.contains(x)).cloned().collect();
        last_size = last_size.max(units.len());
        let mut elems = units.clone();
        elems.push(ring.zero());
        elems.extend(e.elements());
        elems.sort();
        elems.dedup();
        let inside = |x: &Element| units.contains(x) || elems.contains(x);
        let mut blocks: Vec<DerivationTrace> = Vec::new();
        for inst in instantiate(&units, &[], System::Steinberg, &|x| units.contains(x)) {
            blocks.push(DerivationTrace::single(inst));
        }
        if e.terms().any(|(t, _)| !t.is_steinberg()) {
            for inst in instantiate(&[], &elems, System::DennisStein, &inside) {
                blocks.push(DerivationTrace::single(inst));
            }
            for a in &elems {
                for b in &elems {
                    for inst in [
                        RelationInstance::conv_steinberg_to_ds(a, b),
                        RelationInstance::conv_ds_to_steinberg_a(a, b),
                        RelationInstance::conv_ds_to_steinberg_b(a, b),
                    ]
                    .into_iter()
                    .flatten()
                    {
                        if inst.elements().iter().all(&inside) {
                            blocks.push(DerivationTrace::single(inst));
                        }
                    }
                }
            }
        }
        if let Some(tr) = certify_with(&e, &blocks) {
            if tr.elements().iter().all(|x| w.contains(x)) {
                return Ok(Certification::Zero(tr));
            }
        }
        if depth == CLOSURE_DEPTH {
            break;
        }
        let next = closure_step(&cand);
        if next.len() > CLOSURE_CAP || next.len() == cand.len() {
            break;
        }
        cand = next;
        depth += 1;
    }
    Ok(Certification::Unknown {
        params: json!({
            "window": w.params(),
            "closure_depth": depth,
            "candidate_units": last_size,
            "closure_cap": CLOSURE_CAP,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> RingDescriptor {
        RingDescriptor::parse(s).unwrap()
    }

    #[test]
    fn finite_fields_have_trivial_k2m() {
        for q in [7, 11] {
            let r = ring(&format!("fp:{q}"));
            let p = build_k2m_window(&SymbolWindow::full(&r).unwrap()).unwrap();
            assert!(p.group.invariants().is_trivial(), "F_{q}");
        }
    }

    #[test]
    fn dennis_stein_presentations() {
        let inv = |s: &str| build_ds_full(&ring(s), None).unwrap().group.invariants();
        assert_eq!(inv("zmod:4").torsion, vec![2.into()]);
        assert!(inv("zmod:9").is_trivial());
        assert!(inv("fp:7").is_trivial());
        assert_eq!(build_ds_full(&ring("zmod:4"), Some(3)).unwrap().group.invariants().torsion, vec![2.into()]);
        assert!(build_ds_full(&ring("zmod:6"), None).is_err());
    }

    #[test]
    fn tiny_windows() {
        let q = ring("q");
        let w1 = SymbolWindow::explicit(&q, vec![q.one()]).unwrap();
        assert!(build_k2m_window(&w1).unwrap().group.invariants().is_trivial());
        let w2 = SymbolWindow::explicit(&q, vec![q.one(), -q.one()]).unwrap();
        let p = build_k2m_window(&w2).unwrap();
        assert_eq!(p.group.invariants().torsion, vec![2.into()]);
        let e = SymbolExpr::steinberg(&-q.one(), &-q.one()).unwrap();
        assert!(!certify_zero(&e, &w2).unwrap().is_zero());
    }

    #[test]
    fn certify_in_f7() {
        let r = ring("fp:7");
        let w = SymbolWindow::full(&r).unwrap();
        let e = SymbolExpr::parse(&r, "{3,5} + {5,3}").unwrap();
        let c = certify_zero(&e, &w).unwrap();
        assert!(c.trace().unwrap().proves(&e));
        let one = SymbolExpr::parse(&r, "{1,4}").unwrap();
        assert!(certify_zero(&one, &w).unwrap().is_zero());
    }

    #[test]
    fn window_sizes() {
        let r = ring("ratfunc:7:x");
        let w = SymbolWindow::degree(&r, 1).unwrap();
        let units = w.units().unwrap();
        // numerators c0 + c1 x with c0 != 0, denominators 1 or x + d with d != 0,
        // minus the fractions that cancel.
        assert_eq!(units[0], r.one());
        assert!(units.iter().all(|u| w.contains_unit(u)));
        let q = ring("q");
        assert_eq!(SymbolWindow::height(&q, 2).unwrap().units().unwrap().len(), 6);
    }
}
