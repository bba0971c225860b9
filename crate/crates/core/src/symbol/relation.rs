//! Defining relations of the Steinberg and Dennis–Stein presentations,
//! the conversion formulas between the two kinds of symbol, and derivation
//! traces built from them.
//!
//! Each relation instance carries the expression that it asserts to be zero:
//!
//! | rule        | parameters | expression                                  |
//! |-------------|------------|---------------------------------------------|
//! | `S1L`       | `a, c, b`  | `{ac,b} - {a,b} - {c,b}`                    |
//! | `S1R`       | `a, b, c`  | `{a,bc} - {a,b} - {a,c}`                    |
//! | `S3`        | `a`        | `{a,1-a}`                                   |
//! | `D1`        | `a, b`     | `<a,b> + <-b,-a>`                           |
//! | `D2`        | `a, b, c`  | `<a,b> + <a,c> - <a,b+c+abc>`               |
//! | `D3`        | `a, b, c`  | `<a,bc> - <ab,c> - <ac,b>`                  |
//! | `CONV S>D`  | `a, b`     | `{a,b} - <(a-1)/b,b>`                       |
//! | `CONV D>S:a`| `a, b`     | `<a,b> - {-a,1+ab}` (needs `a` a unit)      |
//! | `CONV D>S:b`| `a, b`     | `<a,b> - {1+ab,b}` (needs `b` a unit)       |

use std::fmt;

use serde_json::{json, Value as Json};

use super::{SymbolExpr, SymbolTerm};
use crate::error::{Error, Result};
use crate::ring::{Element, RingDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    S1L,
    S1R,
    S3,
    D1,
    D2,
    D3,
    ConvSteinbergToDs,
    ConvDsToSteinbergA,
    ConvDsToSteinbergB,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::S1L => "S1L",
            Rule::S1R => "S1R",
            Rule::S3 => "S3",
            Rule::D1 => "D1",
            Rule::D2 => "D2",
            Rule::D3 => "D3",
            Rule::ConvSteinbergToDs | Rule::ConvDsToSteinbergA | Rule::ConvDsToSteinbergB => "CONV",
        }
    }

    pub fn branch(self) -> Option<&'static str> {
        match self {
            Rule::ConvSteinbergToDs => Some("S>D"),
            Rule::ConvDsToSteinbergA => Some("D>S:a"),
            Rule::ConvDsToSteinbergB => Some("D>S:b"),
            _ => None,
        }
    }

    pub fn from_name(name: &str, branch: Option<&str>) -> Result<Self> {
        Ok(match (name, branch) {
            ("S1L", None) => Rule::S1L,
            ("S1R", None) => Rule::S1R,
            ("S3", None) => Rule::S3,
            ("D1", None) => Rule::D1,
            ("D2", None) => Rule::D2,
            ("D3", None) => Rule::D3,
            ("CONV", Some("S>D")) => Rule::ConvSteinbergToDs,
            ("CONV", Some("D>S:a")) => Rule::ConvDsToSteinbergA,
            ("CONV", Some("D>S:b")) => Rule::ConvDsToSteinbergB,
            _ => return Err(Error::Parse(format!("unknown rule {name} {branch:?}"))),
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Rule::S3 => 1,
            Rule::D1 | Rule::ConvSteinbergToDs | Rule::ConvDsToSteinbergA | Rule::ConvDsToSteinbergB => 2,
            _ => 3,
        }
    }

    /// Whether the rule belongs to the Steinberg presentation `(S1)+(S3)`.
    pub fn is_steinberg(self) -> bool {
        matches!(self, Rule::S1L | Rule::S1R | Rule::S3)
    }

    pub fn is_dennis_stein(self) -> bool {
        matches!(self, Rule::D1 | Rule::D2 | Rule::D3)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch() {
            Some(b) => write!(f, "{} {b}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// One instance of a defining relation; `expr` is zero in `K_2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationInstance {
    rule: Rule,
    params: Vec<Element>,
    expr: SymbolExpr,
}

fn st(a: &Element, b: &Element) -> Result<SymbolTerm> {
    SymbolTerm::steinberg(a, b)
}

fn ds(a: &Element, b: &Element) -> Result<SymbolTerm> {
    SymbolTerm::dennis_stein(a, b)
}

fn combo(terms: Vec<(SymbolTerm, i64)>) -> SymbolExpr {
    let mut e = SymbolExpr::zero();
    for (t, c) in terms {
        e.add_term(t, c);
    }
    e
}

impl RelationInstance {
    fn make(rule: Rule, params: &[&Element], terms: Vec<(SymbolTerm, i64)>) -> Self {
        RelationInstance { rule, params: params.iter().map(|&x| x.clone()).collect(), expr: combo(terms) }
    }

    /// `{ac,b} = {a,b} + {c,b}`.
    pub fn s1l(a: &Element, c: &Element, b: &Element) -> Result<Self> {
        let terms = vec![(st(&(a * c), b)?, 1), (st(a, b)?, -1), (st(c, b)?, -1)];
        Ok(Self::make(Rule::S1L, &[a, c, b], terms))
    }

    /// `{a,bc} = {a,b} + {a,c}`.
    pub fn s1r(a: &Element, b: &Element, c: &Element) -> Result<Self> {
        let terms = vec![(st(a, &(b * c))?, 1), (st(a, b)?, -1), (st(a, c)?, -1)];
        Ok(Self::make(Rule::S1R, &[a, b, c], terms))
    }

    /// `{a,1-a} = 0`.
    pub fn s3(a: &Element) -> Result<Self> {
        let terms = vec![(st(a, &(a.ring().one() - a))?, 1)];
        Ok(Self::make(Rule::S3, &[a], terms))
    }

    /// `<a,b> = -<-b,-a>`.
    pub fn d1(a: &Element, b: &Element) -> Result<Self> {
        let terms = vec![(ds(a, b)?, 1), (ds(&-b, &-a)?, 1)];
        Ok(Self::make(Rule::D1, &[a, b], terms))
    }

    /// `<a,b> + <a,c> = <a,b+c+abc>`.
    pub fn d2(a: &Element, b: &Element, c: &Element) -> Result<Self> {
        let s = b + c + a * b * c;
        let terms = vec![(ds(a, b)?, 1), (ds(a, c)?, 1), (ds(a, &s)?, -1)];
        Ok(Self::make(Rule::D2, &[a, b, c], terms))
    }

    /// `<a,bc> = <ab,c> + <ac,b>`.
    pub fn d3(a: &Element, b: &Element, c: &Element) -> Result<Self> {
        let terms = vec![(ds(a, &(b * c))?, 1), (ds(&(a * b), c)?, -1), (ds(&(a * c), b)?, -1)];
        Ok(Self::make(Rule::D3, &[a, b, c], terms))
    }

    /// `{a,b} = <(a-1)b^-1, b>`.
    pub fn conv_steinberg_to_ds(a: &Element, b: &Element) -> Result<Self> {
        let s = st(a, b)?;
        let alpha = (a - a.ring().one()) * b.inv()?;
        let terms = vec![(s, 1), (ds(&alpha, b)?, -1)];
        Ok(Self::make(Rule::ConvSteinbergToDs, &[a, b], terms))
    }

    /// `<a,b> = {-a,1+ab}` for a unit `a`.
    pub fn conv_ds_to_steinberg_a(a: &Element, b: &Element) -> Result<Self> {
        let w = a.ring().one() + a * b;
        let terms = vec![(ds(a, b)?, 1), (st(&-a, &w)?, -1)];
        Ok(Self::make(Rule::ConvDsToSteinbergA, &[a, b], terms))
    }

    /// `<a,b> = {1+ab,b}` for a unit `b`.
    pub fn conv_ds_to_steinberg_b(a: &Element, b: &Element) -> Result<Self> {
        let w = a.ring().one() + a * b;
        let terms = vec![(ds(a, b)?, 1), (st(&w, b)?, -1)];
        Ok(Self::make(Rule::ConvDsToSteinbergB, &[a, b], terms))
    }

    /// Re-instantiates a rule from its parameters, re-checking every
    /// precondition.
    pub fn instantiate(rule: Rule, params: &[Element]) -> Result<Self> {
        if params.len() != rule.arity() {
            return Err(Error::Precondition(format!("{rule} takes {} parameters, got {}", rule.arity(), params.len())));
        }
        let p = params;
        match rule {
            Rule::S1L => Self::s1l(&p[0], &p[1], &p[2]),
            Rule::S1R => Self::s1r(&p[0], &p[1], &p[2]),
            Rule::S3 => Self::s3(&p[0]),
            Rule::D1 => Self::d1(&p[0], &p[1]),
            Rule::D2 => Self::d2(&p[0], &p[1], &p[2]),
            Rule::D3 => Self::d3(&p[0], &p[1], &p[2]),
            Rule::ConvSteinbergToDs => Self::conv_steinberg_to_ds(&p[0], &p[1]),
            Rule::ConvDsToSteinbergA => Self::conv_ds_to_steinberg_a(&p[0], &p[1]),
            Rule::ConvDsToSteinbergB => Self::conv_ds_to_steinberg_b(&p[0], &p[1]),
        }
    }

    /// The instance witnessing that a formally trivial symbol vanishes, as a
    /// trace whose replay is exactly that symbol.
    pub fn trivial_zero(t: &SymbolTerm) -> Option<DerivationTrace> {
        let mut tr = DerivationTrace::new();
        match t {
            SymbolTerm::Steinberg(a, b) if a.is_one() => {
                // {1,b} - {1,b} - {1,b} = -{1,b}
                tr.push(-1, Self::s1l(a, a, b).ok()?);
            }
            SymbolTerm::Steinberg(a, b) if b.is_one() => {
                tr.push(-1, Self::s1r(a, b, b).ok()?);
            }
            SymbolTerm::DennisStein(a, b) if b.is_zero() => {
                // <a,0> + <a,0> - <a,0>
                tr.push(1, Self::d2(a, b, b).ok()?);
            }
            SymbolTerm::DennisStein(a, b) if a.is_zero() => {
                // <0,b> + <-b,0>, then remove <-b,0>.
                tr.push(1, Self::d1(a, b).ok()?);
                tr.push(-1, Self::d2(&-b, a, a).ok()?);
            }
            _ => return None,
        }
        Some(tr)
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn params(&self) -> &[Element] {
        &self.params
    }

    pub fn expr(&self) -> &SymbolExpr {
        &self.expr
    }

    pub fn ring(&self) -> &RingDescriptor {
        self.params[0].ring()
    }

    /// Parameters and symbol arguments: everything that must lie in a window
    /// for the instance to count as available there.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = self.expr.elements();
        out.extend(self.params.iter().cloned());
        out.sort();
        out.dedup();
        out
    }

    pub fn to_json(&self, coef: i64) -> Json {
        let params: Vec<String> = self.params.iter().map(|x| x.to_string()).collect();
        let mut v = json!({ "rule": self.rule.name(), "params": params, "coef": coef });
        if let Some(b) = self.rule.branch() {
            v["branch"] = json!(b);
        }
        v
    }
}

impl fmt::Display for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|x| x.to_string()).collect();
        write!(f, "{}({})", self.rule, params.join("; "))
    }
}

impl fmt::Debug for RelationInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}: {}", self.expr)
    }
}

/// A weighted list of relation instances. Its replay, the weighted sum of
/// the instance expressions, is an expression that vanishes in `K_2`.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct DerivationTrace {
    steps: Vec<(i64, RelationInstance)>,
}

impl DerivationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(inst: RelationInstance) -> Self {
        DerivationTrace { steps: vec![(1, inst)] }
    }

    pub fn push(&mut self, coef: i64, inst: RelationInstance) {
        if coef != 0 {
            self.steps.push((coef, inst));
        }
    }

    /// `self += k * other`.
    pub fn append_scaled(&mut self, other: &DerivationTrace, k: i64) {
        for (c, inst) in &other.steps {
            self.push(c * k, inst.clone());
        }
    }

    pub fn steps(&self) -> &[(i64, RelationInstance)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn replay(&self) -> SymbolExpr {
        let mut e = SymbolExpr::zero();
        for (c, inst) in &self.steps {
            e.add_scaled(&inst.expr, *c);
        }
        e
    }

    /// Whether the trace derives `target = 0`.
    pub fn proves(&self, target: &SymbolExpr) -> bool {
        self.replay() == *target
    }

    pub fn elements(&self) -> Vec<Element> {
        let mut out: Vec<Element> = self.steps.iter().flat_map(|(_, i)| i.elements()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn rules_used(&self) -> Vec<Rule> {
        let mut r: Vec<Rule> = self.steps.iter().map(|(_, i)| i.rule).collect();
        r.sort();
        r.dedup();
        r
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.steps.iter().map(|(c, i)| i.to_json(*c)).collect())
    }

    /// Rebuilds a trace from its JSON form, re-validating every instance.
    pub fn from_json(ring: &RingDescriptor, v: &Json) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("a trace is a JSON array".into()))?;
        let mut tr = DerivationTrace::new();
        for step in arr {
            let name = step["rule"].as_str().ok_or_else(|| Error::Parse("step without rule".into()))?;
            let rule = Rule::from_name(name, step.get("branch").and_then(Json::as_str))?;
            let coef = step["coef"].as_i64().ok_or_else(|| Error::Parse("step without integer coef".into()))?;
            let params = step["params"]
                .as_array()
                .ok_or_else(|| Error::Parse("step without params".into()))?
                .iter()
                .map(|p| {
                    let s = p.as_str().ok_or_else(|| Error::Parse("parameters are strings".into()))?;
                    ring.parse_element(s)
                })
                .collect::<Result<Vec<_>>>()?;
            tr.push(coef, RelationInstance::instantiate(rule, &params)?);
        }
        Ok(tr)
    }
}

impl fmt::Debug for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, i) in &self.steps {
            writeln!(f, "{c:+} * {i:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> RingDescriptor {
        RingDescriptor::prime_field(7).unwrap()
    }

    #[test]
    fn steinberg_instances_in_f7() {
        let r = f7();
        let (a, b) = (r.from_int(3), r.from_int(5));
        let s1 = RelationInstance::s1r(&a, &b, &a).unwrap();
        // {3,15=1} - {3,5} - {3,3}
        assert_eq!(s1.expr().to_string(), "{3,1} - {3,3} - {3,5}");
        let s3 = RelationInstance::s3(&a).unwrap();
        assert_eq!(s3.expr().to_string(), "{3,5}");
        assert!(RelationInstance::s3(&r.one()).is_err());
    }

    #[test]
    fn conversions() {
        let r = f7();
        let c = RelationInstance::conv_steinberg_to_ds(&r.from_int(2), &r.from_int(3)).unwrap();
        // (2-1) * 3^-1 = 5
        assert!(c.expr().coefficient(&SymbolTerm::dennis_stein(&r.from_int(5), &r.from_int(3)).unwrap()) == -1);
        let x = RingDescriptor::parse("ratfunc:7:x").unwrap();
        let d = RelationInstance::conv_ds_to_steinberg_b(&x.var("x").unwrap(), &x.from_int(2)).unwrap();
        assert_eq!(d.expr().to_string(), "-{2*x+1,2} + <x,2>");
        assert!(RelationInstance::conv_ds_to_steinberg_a(&x.var("x").unwrap(), &x.from_int(2)).is_err());
    }

    #[test]
    fn trivial_zeros_replay_to_their_symbol() {
        let r = f7();
        for t in [
            SymbolTerm::steinberg(&r.one(), &r.from_int(3)).unwrap(),
            SymbolTerm::steinberg(&r.from_int(3), &r.one()).unwrap(),
            SymbolTerm::dennis_stein(&r.from_int(4), &r.zero()).unwrap(),
            SymbolTerm::dennis_stein(&r.zero(), &r.from_int(4)).unwrap(),
        ] {
            let tr = RelationInstance::trivial_zero(&t).unwrap();
            assert!(tr.proves(&SymbolExpr::term(t)));
        }
    }

    #[test]
    fn json_round_trip() {
        let r = f7();
        let mut tr = DerivationTrace::new();
        tr.push(2, RelationInstance::d3(&r.from_int(2), &r.from_int(2), &r.from_int(1)).unwrap());
        tr.push(-1, RelationInstance::conv_ds_to_steinberg_a(&r.from_int(3), &r.from_int(1)).unwrap());
        let back = DerivationTrace::from_json(&r, &tr.to_json()).unwrap();
        assert_eq!(back, tr);
        assert_eq!(tr.to_json()[1]["branch"], "D>S:a");
    }
}
