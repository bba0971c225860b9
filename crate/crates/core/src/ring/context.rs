//! A ring `R` with a prime element `t`: the localisation `R_t`, the
//! `t`-adic valuation, unit decompositions `f = u t^n` and reduction mod `t`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::{invp, Monomial, Poly, MAX_VARS};
use super::ratfunc::{RatFunc, RatFuncSpec};
use super::{Element, RingDescriptor, RingKind, Value};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Prime {
    Integer(u64),
    /// `t` is a unit multiple of the monic linear form `form`; reduction
    /// mod `t` eliminates variable `elim`.
    /// `lifts[k]` is a parameter of `R` reducing exactly to the `k`-th
    /// parameter of `R/tR`.
    Linear { form: Poly, elim: usize, lifts: Vec<Poly> },
}

#[derive(Clone, Debug)]
pub struct LocalisationContext {
    base: RingDescriptor,
    localised: RingDescriptor,
    residue: RingDescriptor,
    t: Element,
    prime: Prime,
}

/// `f = u t^n` with `u` a unit of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub u: Element,
    pub n: i64,
}

fn p_adic(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut k = 0;
    let mut n = n.clone();
    while !n.is_zero() && (&n % &p).is_zero() {
        n /= &p;
        k += 1;
    }
    k
}

/// Deletes variable `j` (which must not occur) and shifts later ones down.
fn drop_var(f: &Poly, j: usize) -> Poly {
    let terms = f
        .terms()
        .iter()
        .map(|&(m, c)| {
            let mut e = [0u16; MAX_VARS];
            let mut k = 0;
            for (i, &x) in m.0.iter().enumerate() {
                if i != j {
                    e[k] = x;
                    k += 1;
                }
            }
            (Monomial(e), c)
        })
        .collect();
    Poly::from_terms(f.modulus(), terms)
}

/// Inverse of [`drop_var`]: re-inserts an unused variable at position `j`.
fn insert_var(f: &Poly, j: usize) -> Poly {
    let terms = f
        .terms()
        .iter()
        .map(|&(m, c)| {
            let mut e = [0u16; MAX_VARS];
            let mut k = 0;
            for (i, slot) in e.iter_mut().enumerate() {
                if i == j {
                    continue;
                }
                *slot = m.0[k];
                k += 1;
            }
            (Monomial(e), c)
        })
        .collect();
    Poly::from_terms(f.modulus(), terms)
}

impl LocalisationContext {
    /// Builds the context from a ring and the expression of `t`. The ring may
    /// be given either as `R` or as `R_t`: when `t` is one of the inverted
    /// parameters the ring is read as `R_t`.
    pub fn from_spec(ring: &RingDescriptor, t: &str) -> Result<Self> {
        match ring.kind() {
            RingKind::Rationals | RingKind::LocalInt(_) => {
                let q = RingDescriptor::rationals().parse_element(t)?;
                Self::new(ring, &q)
            }
            RingKind::RatFuncLocal(spec) => {
                // `t` may be inverted in the given ring, so parse it ambiently.
                let plain = RingDescriptor::ratfunc(RatFuncSpec { inverted: vec![], ..spec.clone() });
                let f = super::parse::parse_ratfunc(&plain, t)?;
                Self::new(ring, &ring.element(Value::Frac(f))?)
            }
            _ => Err(Error::Unsupported(format!("no localisation context for {ring}"))),
        }
    }

    pub fn new(ring: &RingDescriptor, t: &Element) -> Result<Self> {
        match ring.kind() {
            RingKind::Rationals | RingKind::LocalInt(_) => {
                let p = t
                    .to_bigint()
                    .and_then(|n| n.to_u64())
                    .filter(|&p| super::ratfunc::is_prime(p))
                    .ok_or_else(|| Error::Precondition(format!("t = {t} must be a prime number")))?;
                if let RingKind::LocalInt(q) = ring.kind() {
                    if *q != p {
                        return Err(Error::Precondition(format!("{p} is a unit of {ring}")));
                    }
                }
                let base = RingDescriptor::local_int(p)?;
                Ok(LocalisationContext {
                    t: base.from_int(p as i64),
                    base,
                    localised: RingDescriptor::rationals(),
                    residue: RingDescriptor::prime_field(p)?,
                    prime: Prime::Integer(p),
                })
            }
            RingKind::RatFuncLocal(spec) => Self::new_ratfunc(spec, t),
            _ => Err(Error::Unsupported(format!("no localisation context for {ring}"))),
        }
    }

    fn new_ratfunc(spec: &RatFuncSpec, t: &Element) -> Result<Self> {
        let f = t.as_ratfunc().ok_or_else(|| Error::Precondition("t must be a rational function".into()))?;
        if f.is_zero() {
            return Err(Error::Precondition("t must be non-zero".into()));
        }
        let (num, en) = spec.strip_params(f.num());
        let (den, ed) = spec.strip_params(f.den());
        if den.constant_term() == 0 {
            return Err(Error::Precondition(format!("t = {t} is not an element of the ring")));
        }
        let p = spec.p;
        let form = if num.constant_term() != 0 {
            // t is a unit times parameters: it must be associated to exactly one.
            let cands: Vec<usize> = (0..spec.inverted.len()).filter(|&i| en[i] as i64 - ed[i] as i64 == 1).collect();
            let others = (0..spec.inverted.len()).filter(|&i| en[i] as i64 - ed[i] as i64 != 0).count();
            if cands.len() != 1 || others != 1 {
                return Err(Error::Precondition(format!("t = {t} is not a prime element")));
            }
            spec.inverted[cands[0]].clone()
        } else {
            let lin = num.homogeneous_part(1);
            if num.low_degree() != 1 || lin.is_zero() {
                return Err(Error::Precondition(format!("t = {t} must vanish to order one at the origin")));
            }
            let lin = lin.monic();
            let (k, w) = num.split_factor(&lin);
            if k != 1 || w.constant_term() == 0 {
                return Err(Error::Precondition(format!(
                    "t = {t} must be a unit multiple of a linear form through the origin"
                )));
            }
            lin
        };
        let (base_spec, local_spec) = if spec.inverted.contains(&form) {
            (spec.without_inverted(&form), spec.clone())
        } else {
            (spec.clone(), spec.with_inverted(&form)?)
        };
        let elim = (0..spec.vars.len()).rev().find(|&j| form.degree_in(j) > 0).unwrap();
        let mut lifts: Vec<Poly> = Vec::new();
        let residue = if spec.vars.len() == 1 {
            RingDescriptor::prime_field(p as u64)?
        } else {
            let sub = elimination(&form, elim);
            let mut inverted: Vec<Poly> = Vec::new();
            for q in &base_spec.inverted {
                let image = drop_var(&q.substitute(elim, &sub), elim);
                let lc = image.leading().unwrap().1;
                let image = image.monic();
                if !inverted.contains(&image) {
                    inverted.push(image);
                    lifts.push(q.scale(invp(lc, p)));
                }
            }
            let vars = spec.vars.iter().enumerate().filter(|&(i, _)| i != elim).map(|(_, v)| v.clone()).collect();
            RingDescriptor::ratfunc(RatFuncSpec::new(p, vars, inverted)?)
        };
        let base = RingDescriptor::ratfunc(base_spec);
        let t = base.element(t.value().clone())?;
        Ok(LocalisationContext {
            base,
            localised: RingDescriptor::ratfunc(local_spec),
            residue,
            t,
            prime: Prime::Linear { form, elim, lifts },
        })
    }

    /// `R`.
    pub fn base(&self) -> &RingDescriptor {
        &self.base
    }

    /// `R_t`.
    pub fn localised(&self) -> &RingDescriptor {
        &self.localised
    }

    /// `R/tR`.
    pub fn residue_ring(&self) -> &RingDescriptor {
        &self.residue
    }

    /// `t` as an element of `R`.
    pub fn t(&self) -> &Element {
        &self.t
    }

    /// `t` as an element of `R_t`.
    pub fn t_local(&self) -> Element {
        self.localised.coerce(&self.t).unwrap()
    }

    pub fn to_base(&self, x: &Element) -> Result<Element> {
        self.base.coerce(x)
    }

    pub fn to_local(&self, x: &Element) -> Result<Element> {
        self.localised.coerce(x)
    }

    /// `nu_t(f)` for non-zero `f` in the fraction field.
    pub fn valuation(&self, f: &Element) -> Result<i64> {
        if f.is_zero() {
            return Err(Error::ZeroValuation);
        }
        match (&self.prime, f.value()) {
            (Prime::Integer(p), Value::Rational(q)) => Ok(p_adic(q.numer(), *p) - p_adic(q.denom(), *p)),
            (Prime::Linear { form, .. }, Value::Frac(r)) => {
                Ok(r.num().split_factor(form).0 as i64 - r.den().split_factor(form).0 as i64)
            }
            _ => Err(Error::InvalidRing(format!("{f} does not belong to the context of {}", self.base))),
        }
    }

    /// Writes a unit `f` of `R_t` as `u t^n` with `u` a unit of `R`.
    pub fn unit_decompose(&self, f: &Element) -> Result<UnitDecomposition> {
        let fl = self.to_local(f)?;
        if !fl.is_unit() {
            return Err(Error::NotUnit(f.to_string(), self.localised.to_string()));
        }
        let n = self.valuation(&fl)?;
        let u = &fl * &self.t_local().pow(-n)?;
        let u = self.base.coerce(&u)?;
        debug_assert!(u.is_unit());
        Ok(UnitDecomposition { u, n })
    }

    /// Reduction `R -> R/tR`.
    pub fn residue(&self, x: &Element) -> Result<Element> {
        let x = self.base.coerce(x)?;
        match (&self.prime, x.value()) {
            (Prime::Integer(p), Value::Rational(q)) => {
                let pb = BigInt::from(*p);
                let d = BigInt::from(q.denom().mod_floor(&pb).to_u64().unwrap());
                let inv = d.modpow(&BigInt::from(p - 2), &pb);
                Ok(self.residue.from_bigint(&(q.numer() * inv)))
            }
            (Prime::Linear { form, elim, .. }, Value::Frac(r)) => {
                let sub = elimination(form, *elim);
                let num = drop_var(&r.num().substitute(*elim, &sub), *elim);
                let den = drop_var(&r.den().substitute(*elim, &sub), *elim);
                if let RingKind::PrimeField(_) = self.residue.kind() {
                    let c = num.constant_term() as i64 * invp(den.constant_term(), r.modulus()) as i64;
                    return Ok(self.residue.from_int(c));
                }
                self.residue.element(Value::Frac(RatFunc::new(num, den)?))
            }
            _ => unreachable!(),
        }
    }

    /// A preimage in `R` of an element of `R/tR`; units lift to units.
    pub fn lift_residue(&self, y: &Element) -> Result<Element> {
        let y = self.residue.coerce(y)?;
        match (&self.prime, y.value()) {
            (Prime::Integer(_), Value::Residue(r)) => Ok(self.base.from_int(*r as i64)),
            (Prime::Linear { .. }, Value::Residue(r)) => Ok(self.base.from_int(*r as i64)),
            (Prime::Linear { elim, lifts, .. }, Value::Frac(r)) => {
                let qspec = self.residue.ratfunc_spec().unwrap();
                let lift = |f: &Poly| -> Poly {
                    let (rest, mult) = qspec.strip_params(f);
                    let mut out = insert_var(&rest, *elim);
                    for (k, &m) in mult.iter().enumerate() {
                        out = out.mul(&lifts[k].pow(m));
                    }
                    out
                };
                self.base.element(Value::Frac(RatFunc::new(lift(r.num()), lift(r.den()))?))
            }
            _ => unreachable!(),
        }
    }

    /// Whether `f` lies in `(1+tR)^x`.
    pub fn in_one_plus_t(&self, f: &Element) -> bool {
        match self.base.coerce(f) {
            Ok(f) => f.is_unit() && self.residue(&f).map(|r| r.is_one()).unwrap_or(false),
            Err(_) => false,
        }
    }

    /// The exact quotient `x / t` in `R`.
    pub fn div_t(&self, x: &Element) -> Result<Element> {
        self.base.coerce(x)?.div(&self.t)
    }

    pub fn is_integer_context(&self) -> bool {
        matches!(self.prime, Prime::Integer(_))
    }

    /// The rational `a/b` as an element of `R_t` (integer contexts only).
    pub fn rational(&self, a: i64, b: i64) -> Result<Element> {
        if b == 0 {
            return Err(Error::DivisionByZero);
        }
        self.localised.element(Value::Rational(BigRational::new(a.into(), b.into())))
    }
}

/// The substitution that sets the linear form to zero by solving for `elim`.
fn elimination(form: &Poly, elim: usize) -> Poly {
    let p = form.modulus();
    let c = form.terms().iter().find(|(m, _)| m.exp(elim) == 1).unwrap().1;
    let rest = form.sub(&Poly::term(p, Monomial::var_pow(elim, 1), c));
    rest.scale(invp(c, p)).neg()
}
