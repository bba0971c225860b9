//! `O((t))` is not 1-fold stable: with `pi` a uniformiser of the discrete
//! valuation ring `O`, the pair `(pi, 1 + pi^2 t^{-1})` generates the unit
//! ideal, yet `pi + c (1 + pi^2 t^{-1})` is never a unit.
//!
//! Every candidate `c` with bounded `t`-support and small integer
//! coefficients is decided twice: by a valuation argument on the lowest
//! `t`-coefficient that never looks at the truncation precision, and by the
//! unit test of the truncated Laurent ring. The two must agree.

use serde_json::json;

use super::VerificationReport;
use crate::error::{Error, Result};
use crate::ring::laurent::Laurent;
use crate::ring::ratfunc::RatFunc;
use crate::ring::{Element, RingDescriptor, RingKind, Value};

/// Why a candidate fails to give a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonUnitReason {
    /// `c = 0`: the element is `pi`.
    Zero,
    /// `nu_t(c) = n <= 0`: the lowest term is `c_n pi^2 t^{n-1}`.
    LowValuation,
    /// `nu_t(c) >= 1`: the `t^0` coefficient is `pi (1 + c_1 pi)` or `pi`.
    HighValuation,
}

impl NonUnitReason {
    pub fn name(self) -> &'static str {
        match self {
            NonUnitReason::Zero => "c=0",
            NonUnitReason::LowValuation => "n<=0",
            NonUnitReason::HighValuation => "n>=1",
        }
    }
}

/// Decides, without expanding any series, whether `pi + c(1 + pi^2/t)` is a
/// unit of `O((t))`. `coeffs[i]` is the coefficient of `t^(lo + i)` in `c`;
/// coefficients lie in `O`, with `pi` the uniformiser.
///
/// A Laurent series over a domain is a unit exactly when its lowest
/// non-zero coefficient is a unit of `O`.
pub fn decide_symbolically(lo: i64, coeffs: &[RatFunc], o_is_unit: impl Fn(&RatFunc) -> bool, pi: &RatFunc) -> (bool, Option<NonUnitReason>) {
    let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
        return (o_is_unit(pi), Some(NonUnitReason::Zero));
    };
    let n = lo + first as i64;
    let cn = &coeffs[first];
    let pi2 = pi.mul(pi);
    if n <= 0 {
        // c (pi^2 / t) contributes c_n pi^2 at t^(n-1), below every other term.
        let lowest = cn.mul(&pi2);
        (o_is_unit(&lowest), Some(NonUnitReason::LowValuation))
    } else {
        // Everything from c sits at t^(n-1) >= t^0; at t^0 we see pi plus
        // c_1 pi^2 when n = 1.
        let at_zero = if n == 1 { pi.add(&cn.mul(&pi2)) } else { pi.clone() };
        (o_is_unit(&at_zero), Some(NonUnitReason::HighValuation))
    }
}

/// Runs the check over every `c = sum_{i in [lo, hi]} c_i t^i` with integer
/// coefficients `|c_i| <= height`.
pub fn remark_check(precision: u32, lo: i64, hi: i64, height: i64) -> Result<VerificationReport> {
    if lo > hi || height < 0 {
        return Err(Error::Precondition("empty candidate range".into()));
    }
    let ring = RingDescriptor::parse(&format!("laurent(ratfunc:7:s,prec={precision})"))?;
    let spec = match ring.kind() {
        RingKind::TruncLaurent(s) => s.clone(),
        _ => unreachable!(),
    };
    let o = &spec.base;
    let p = o.p;
    let pi_f = RatFunc::from_poly(crate::ring::poly::Poly::var(p, 0));
    let pi = ring.parse_element("s")?;
    let t = ring.parse_element("t")?;
    let one = ring.one();
    let g = &one + &(&pi * &pi) * &t.pow(-1)?;
    let mut rep = VerificationReport::new("remark35", &ring)
        .param("t_support", json!([lo, hi]))
        .param("coefficient_height", height as u64)
        .param("precision", precision);
    // The pair generates the unit ideal: pi (-pi/t) + (1 + pi^2/t) = 1.
    let combo = &pi * &(-(&pi * &t.pow(-1)?)) + &g;
    if !combo.is_one() {
        rep.fail(vec![pi.to_string(), g.to_string()], format!("unit-ideal combination gave {combo}"));
    }
    rep.evidence(json!({ "pair": [pi.to_string(), g.to_string()], "combination": "s*(-s*t^-1) + (1 + s^2*t^-1) = 1" }));
    let width = (hi - lo + 1) as usize;
    let base = (2 * height + 1) as u64;
    let total = base.checked_pow(width as u32).ok_or_else(|| Error::Unsupported("too many candidates".into()))?;
    let mut digits = vec![0i64; width];
    for _ in 0..total {
        let coeffs: Vec<RatFunc> = digits.iter().map(|&d| RatFunc::constant(p, d - height)).collect();
        rep.cases_run += 1;
        let (sym_unit, reason) = decide_symbolically(lo, &coeffs, |x| o.is_unit(x), &pi_f);
        let c = ring.element(Value::Series(Laurent::from_coeffs(lo, coeffs.clone(), precision)))?;
        let x = &pi + &(&c * &g);
        let direct = x.try_is_unit();
        let label = || vec![c.to_string()];
        match direct {
            Err(Error::PrecisionExhausted(m)) => {
                rep.inconclusive(1);
                rep.count("precision_exhausted", 1);
                if rep.counted("precision_exhausted") == 1 {
                    rep.evidence(json!({ "c": c.to_string(), "precision": m }));
                }
            }
            Err(e) => rep.fail(label(), e),
            Ok(d) if d != sym_unit => rep.fail(label(), format!("symbolic decision {sym_unit} but direct test {d}")),
            Ok(true) => rep.fail(label(), format!("{x} is a unit")),
            Ok(false) => {
                let r = reason.unwrap();
                rep.count(r.name(), 1);
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base as i64 {
                break;
            }
            *d = 0;
        }
    }
    Ok(rep.finish())
}

/// The element `pi + c(1 + pi^2/t)` for a parsed `c`, for display.
pub fn remark_element(ring: &RingDescriptor, c: &Element) -> Result<Element> {
    let pi = ring.parse_element("s")?;
    let t = ring.parse_element("t")?;
    Ok(&pi + &(c * &(ring.one() + &(&pi * &pi) * &t.pow(-1)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::Status;

    #[test]
    fn small_range() {
        let rep = remark_check(8, -1, 1, 1).unwrap();
        assert_eq!(rep.status, Status::Pass, "{}", rep.to_text());
        assert_eq!(rep.cases_run, 27);
        assert_eq!(rep.counted("c=0"), 1);
        assert!(rep.counted("n<=0") > 0 && rep.counted("n>=1") > 0);
    }

    #[test]
    fn examples() {
        let ring = RingDescriptor::parse("laurent(ratfunc:7:s,prec=8)").unwrap();
        for c in ["1", "t", "0"] {
            let c = ring.parse_element(c).unwrap();
            assert!(!remark_element(&ring, &c).unwrap().is_unit());
        }
    }
}
