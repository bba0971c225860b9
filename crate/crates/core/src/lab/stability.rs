//! `k`-fold stability and weak `k`-fold stability.
//!
//! For finite rings both predicates reduce to a covering question. Each
//! unimodular pair `(a, b)` rules out the set `{r : a + rb not a unit}`, and
//! the ring is `k`-fold stable iff no `k` of these sets cover `R`. For the
//! weak variant the sets are `{u unit : 1 + ub not a unit}` and at most
//! `k - 1` of them may be used. A cover, when found, is the counterexample.

use num_integer::Integer;
use rand::Rng;
use serde_json::json;

use super::{rng, VerificationReport};
use crate::error::{Error, Result};
use crate::ring::ratfunc::RatFunc;
use crate::ring::{Element, RingDescriptor, Value};
use crate::symbol::SymbolWindow;

/// Subsets of a ring with at most 128 elements.
type Mask = u128;

fn index_of(elems: &[Element]) -> impl Fn(&Element) -> usize + '_ {
    move |x| elems.binary_search(x).expect("element of the enumerated ring")
}

fn finite_elements(ring: &RingDescriptor) -> Result<Vec<Element>> {
    if !ring.is_finite() {
        return Err(Error::Unsupported(format!("{ring} is infinite; use the sampled check")));
    }
    let mut elems = ring.elements()?;
    if elems.len() > 128 {
        return Err(Error::Unsupported(format!("{ring} has more than 128 elements")));
    }
    elems.sort();
    Ok(elems)
}

/// Whether `(a, b)` generates the unit ideal.
fn unimodular(ring: &RingDescriptor, a: &Element, b: &Element) -> bool {
    match ring.modulus() {
        Some(m) => {
            let (x, y) = (a.as_residue().unwrap(), b.as_residue().unwrap());
            x.gcd(&y).gcd(&m) == 1
        }
        None => a.is_unit() || b.is_unit(),
    }
}

/// Depth-first search for at most `k` sets from `family` covering
/// `universe`. Returns indices into `family`.
fn find_cover(family: &[Mask], universe: Mask, k: usize) -> Option<Vec<usize>> {
    fn go(family: &[Mask], left: Mask, k: usize, chosen: &mut Vec<usize>) -> bool {
        if left == 0 {
            return true;
        }
        if k == 0 {
            return false;
        }
        let bit = left & left.wrapping_neg();
        for (i, &s) in family.iter().enumerate() {
            if s & bit != 0 {
                chosen.push(i);
                if go(family, left & !s, k - 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(family, universe, k, &mut chosen).then_some(chosen)
}

/// Keeps one representative per distinct set, dropping sets contained in
/// another (a cover can always use the larger one).
fn maximal_sets<T: Clone>(sets: Vec<(Mask, T)>) -> Vec<(Mask, T)> {
    let mut distinct: Vec<(Mask, T)> = Vec::new();
    for (m, w) in sets {
        if m != 0 && !distinct.iter().any(|(d, _)| *d == m) {
            distinct.push((m, w));
        }
    }
    let all: Vec<Mask> = distinct.iter().map(|(m, _)| *m).collect();
    distinct.into_iter().filter(|(m, _)| !all.iter().any(|o| o != m && o & m == *m)).collect()
}

/// Exhaustive `k`-fold stability of a finite ring.
pub fn check_k_fold_stable(ring: &RingDescriptor, k: usize) -> Result<VerificationReport> {
    let elems = finite_elements(ring)?;
    let idx = index_of(&elems);
    let universe: Mask = if elems.len() == 128 { Mask::MAX } else { (1 << elems.len()) - 1 };
    let mut rep = VerificationReport::new("stability", ring).param("k", k as u64).param("variant", "k-fold");
    let mut sets = Vec::new();
    // b in the outer loop so that each bad set is first met as (-c, 1).
    for b in &elems {
        for a in &elems {
            if !unimodular(ring, a, b) {
                continue;
            }
            rep.cases_run += 1;
            let mut m: Mask = 0;
            for r in &elems {
                if !(a + &(r * b)).is_unit() {
                    m |= 1 << idx(r);
                }
            }
            sets.push((m, (a.clone(), b.clone())));
        }
    }
    let family = maximal_sets(sets);
    rep.count("distinct_bad_sets", family.len() as u64);
    let masks: Vec<Mask> = family.iter().map(|(m, _)| *m).collect();
    if let Some(cover) = find_cover(&masks, universe, k) {
        let pairs: Vec<(Element, Element)> = cover.iter().map(|&i| family[i].1.clone()).collect();
        // Re-check the counterexample directly.
        debug_assert!(elems.iter().all(|r| pairs.iter().any(|(a, b)| !(a + &(r * b)).is_unit())));
        let inputs = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        rep.fail(inputs, format!("every r in {ring} makes some a_i + r b_i a non-unit"));
    } else {
        rep.evidence(json!({ "max_bad_set": masks.iter().map(|m| m.count_ones()).max().unwrap_or(0), "ring_size": elems.len() }));
    }
    Ok(rep.finish())
}

/// Exhaustive weak `k`-fold stability of a finite ring.
pub fn check_weak_k_fold_stable(ring: &RingDescriptor, k: usize) -> Result<VerificationReport> {
    let elems = finite_elements(ring)?;
    let units: Vec<Element> = elems.iter().filter(|x| x.is_unit()).cloned().collect();
    let universe: Mask = if units.len() == 128 { Mask::MAX } else { (1 << units.len()) - 1 };
    let one = ring.one();
    let mut rep = VerificationReport::new("stability", ring).param("k", k as u64).param("variant", "weak");
    let mut sets = Vec::new();
    for b in &elems {
        rep.cases_run += 1;
        let mut m: Mask = 0;
        for (i, u) in units.iter().enumerate() {
            if !(&one + &(u * b)).is_unit() {
                m |= 1 << i;
            }
        }
        sets.push((m, b.clone()));
    }
    let family = maximal_sets(sets);
    let masks: Vec<Mask> = family.iter().map(|(m, _)| *m).collect();
    if let Some(cover) = find_cover(&masks, universe, k.saturating_sub(1)) {
        let bs = cover.iter().map(|&i| family[i].1.to_string()).collect();
        rep.fail(bs, "every unit u makes some 1 + u b_i a non-unit");
    }
    Ok(rep.finish())
}

fn denominator_exponents(ring: &RingDescriptor, x: &Element) -> Vec<u32> {
    let spec = ring.ratfunc_spec().unwrap();
    let (_, ed) = spec.strip_params(x.as_ratfunc().unwrap().den());
    ed
}

/// A witness `u` for the tuple `bs`: the inverted parameters are used to
/// clear denominators (`s b_i` in the local ring `A`), then a unit `u'` of
/// `A` with every `1 + u' s b_i` a unit is searched, and `u = u' s`.
pub fn weak_witness(ring: &RingDescriptor, bs: &[Element]) -> Result<Option<Element>> {
    let spec = ring
        .ratfunc_spec()
        .ok_or_else(|| Error::Unsupported("sampled weak stability needs a rational-function ring".into()))?
        .clone();
    let mut s = ring.one();
    for (j, tj) in spec.inverted.iter().enumerate() {
        let n = bs.iter().map(|b| denominator_exponents(ring, b)[j]).max().unwrap_or(0);
        let tj = ring.element(Value::Frac(RatFunc::from_poly(tj.clone())))?;
        s = s * tj.pow(n as i64)?;
    }
    let local = RingDescriptor::ratfunc(crate::ring::ratfunc::RatFuncSpec { inverted: vec![], ..spec.clone() });
    let cleared: Vec<Element> = bs.iter().map(|b| local.coerce(&(b * &s))).collect::<Result<_>>()?;
    let one = local.one();
    let mut candidates: Vec<Element> = (1..spec.p as i64).map(|c| local.from_int(c)).collect();
    candidates.extend(crate::symbol::derive::auxiliary_units(&local));
    for u1 in candidates {
        if cleared.iter().all(|b| (&one + &(&u1 * b)).is_unit()) {
            let u = ring.coerce(&u1)? * &s;
            let ok = bs.iter().all(|b| (ring.one() + &u * b).is_unit());
            return if ok { Ok(Some(u)) } else { Err(Error::Internal(format!("witness {u} fails on {bs:?}"))) };
        }
    }
    Ok(None)
}

/// Weak `k`-fold stability sampled over `budget` seeded tuples of window
/// elements of a rational-function ring.
pub fn weak_stability_sampled(ring: &RingDescriptor, k: usize, w: &SymbolWindow, budget: usize, seed: u64) -> Result<VerificationReport> {
    if ring.is_finite() {
        return check_weak_k_fold_stable(ring, k);
    }
    let w = w.over(ring)?;
    let pool = w.elements()?;
    let mut rep = VerificationReport::new("stability", ring)
        .param("k", k as u64)
        .param("variant", "weak, sampled")
        .window(w.params())
        .seed(seed)
        .budget(budget as u64);
    if pool.is_empty() {
        return Ok(rep.finish());
    }
    let mut r = rng(seed);
    for _ in 0..budget {
        let bs: Vec<Element> = (0..k.saturating_sub(1)).map(|_| pool[r.gen_range(0..pool.len())].clone()).collect();
        rep.cases_run += 1;
        let inputs = || bs.iter().map(|b| b.to_string()).collect::<Vec<_>>();
        match weak_witness(ring, &bs) {
            Ok(Some(u)) => {
                if rep.evidence.len() < 5 {
                    rep.evidence(json!({ "b": inputs(), "u": u.to_string() }));
                }
            }
            Ok(None) => rep.fail(inputs(), "no witness u found"),
            Err(e) => rep.fail(inputs(), e),
        }
    }
    Ok(rep.finish())
}
