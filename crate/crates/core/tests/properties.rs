use k2sym::abelian::snf::{determinant, smith_normal_form, Matrix};
use k2sym::abelian::PresentedGroup;
use k2sym::lab::assumptions::factor_one_plus_t;
use k2sym::lab::stability::check_k_fold_stable;
use k2sym::lab::tame::{cbar, split_symbol, tame_direct, tame_symbol};
use k2sym::symbol::derive::rho_at;
use k2sym::symbol::window::certify_zero;
use k2sym::{Element, LocalisationContext, RelationInstance, RingDescriptor, Status, SymbolExpr, SymbolWindow};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn ring(spec: &str) -> RingDescriptor {
    RingDescriptor::parse(spec).unwrap()
}

fn ctx(spec: &str, t: &str) -> LocalisationContext {
    LocalisationContext::from_spec(&ring(spec), t).unwrap()
}

fn rational(q: &RingDescriptor, n: i64, d: i64) -> Element {
    q.parse_element(&format!("{n}/{d}")).unwrap()
}

/// Nonzero rationals n/d with |n|, d bounded.
fn nonzero_rational() -> impl Strategy<Value = (i64, i64)> {
    ((1i64..=60), any::<bool>(), 1i64..=60).prop_map(|(n, neg, d)| (if neg { -n } else { n }, d))
}

fn vp(mut n: i64, p: i64) -> i64 {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// `(-1)^{ab} f^b / g^a` with `a = v_p(f)`, `b = v_p(g)`, in plain rationals.
fn tame_oracle(f: (i64, i64), g: (i64, i64), p: i64) -> BigRational {
    let (a, b) = (vp(f.0, p) - vp(f.1, p), vp(g.0, p) - vp(g.1, p));
    let fr = BigRational::new(f.0.into(), f.1.into());
    let gr = BigRational::new(g.0.into(), g.1.into());
    let pow = |x: &BigRational, e: i64| if e >= 0 { num_traits::pow(x.clone(), e as usize) } else { num_traits::pow(x.recip(), (-e) as usize) };
    let sign = if (a * b) % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    sign * pow(&fr, b) * pow(&gr, -a)
}

fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (Just(c), prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)))
}

fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn element_strategy(r: RingDescriptor, deg: usize) -> impl Strategy<Value = Element> {
    let coeffs = prop::collection::vec(0i64..7, deg + 1);
    (coeffs.clone(), coeffs).prop_filter_map("zero denominator", move |(n, d)| {
        let poly = |c: &[i64]| c.iter().enumerate().map(|(i, a)| format!("{a}*x^{i}")).collect::<Vec<_>>().join("+");
        r.parse_element(&format!("({})/({})", poly(&n), poly(&d))).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_certificate_verifies((cols, rows) in small_matrix()) {
        let a = to_matrix(&rows);
        let snf = smith_normal_form(&a, cols);
        prop_assert!(snf.verify(&a));
        prop_assert!(snf.divisibility_holds());
        if rows.len() == cols {
            let d: BigInt = (0..cols).map(|i| snf.diagonal.get(i).cloned().unwrap_or_default()).product();
            prop_assert_eq!(d.abs(), determinant(&a).abs());
        }
    }

    #[test]
    fn cyclic_sums_have_expected_order(ds in prop::collection::vec(1i64..12, 1..4)) {
        let mut g = PresentedGroup::free(0..ds.len());
        for (i, d) in ds.iter().enumerate() {
            g.add_relation([(i, *d)]);
        }
        let order: i64 = ds.iter().product();
        prop_assert_eq!(g.invariants().order(), Some(BigInt::from(order)));
        prop_assert_eq!(g.invariants().is_trivial(), order == 1);
    }

    #[test]
    fn ratfunc_field_laws(a in element_strategy(ring("ratfunc:7:x"), 2), b in element_strategy(ring("ratfunc:7:x"), 2)) {
        prop_assert_eq!(&(&a * &b), &(&b * &a));
        prop_assert_eq!(&((&a + &b) - &b), &a);
        if b.is_unit() {
            prop_assert_eq!((&a * &b).div(&b).unwrap(), a.clone());
            prop_assert!((&b * &b.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn tame_matches_oracle_over_q(f in nonzero_rational(), g in nonzero_rational(), p in prop::sample::select(vec![2i64, 3, 5, 7])) {
        let c = ctx("q", &p.to_string());
        let q = ring("q");
        let (fe, ge) = (rational(&q, f.0, f.1), rational(&q, g.0, g.1));
        let v = tame_symbol(&fe, &ge, &c).unwrap().value;
        let expect = tame_oracle(f, g, p);
        prop_assert_eq!(v.as_rational().unwrap(), &expect);
        prop_assert_eq!(tame_direct(&fe, &ge, &c).unwrap(), v.clone());
        let back = tame_symbol(&ge, &fe, &c).unwrap().value;
        prop_assert!((&v * &back).is_one());
        prop_assert!(tame_symbol(&fe, &-&fe, &c).unwrap().value.is_one());
    }

    #[test]
    fn tame_bimultiplicative_over_q(f1 in nonzero_rational(), f2 in nonzero_rational(), g in nonzero_rational(), p in prop::sample::select(vec![2i64, 3, 5])) {
        let c = ctx("q", &p.to_string());
        let q = ring("q");
        let (a, b, h) = (rational(&q, f1.0, f1.1), rational(&q, f2.0, f2.1), rational(&q, g.0, g.1));
        let t = |x: &Element, y: &Element| tame_symbol(x, y, &c).unwrap().value;
        prop_assert_eq!(t(&(&a * &b), &h), t(&a, &h) * t(&b, &h));
        prop_assert_eq!(t(&h, &(&a * &b)), t(&h, &a) * t(&h, &b));
    }

    #[test]
    fn steinberg_relations_have_trivial_tame_image(a in nonzero_rational(), p in prop::sample::select(vec![2i64, 3, 5, 7])) {
        prop_assume!(a.0 != a.1);
        let q = ring("q");
        let x = rational(&q, a.0, a.1);
        let inst = RelationInstance::s3(&x).unwrap();
        prop_assert!(cbar(inst.expr(), &ctx("q", &p.to_string())).unwrap().is_one());
    }

    #[test]
    fn split_symbol_is_proved(f in element_strategy(ring("ratfunc:7:x@invert(x)"), 2), g in element_strategy(ring("ratfunc:7:x@invert(x)"), 2)) {
        prop_assume!(f.is_unit() && g.is_unit());
        let c = ctx("ratfunc:7:x@invert(x)", "x");
        let (e, tr) = split_symbol(&f, &g, &c).unwrap();
        prop_assert!(tr.proves(&SymbolExpr::steinberg(&f, &g).unwrap().minus(&e)));
    }

    #[test]
    fn factorisation_round_trip(a in element_strategy(ring("ratfunc:7:x"), 3)) {
        let c = ctx("ratfunc:7:x", "x");
        let one = c.base().one();
        let f = &one + &(c.t() * &a);
        prop_assume!(f.is_unit() && c.to_base(&a).is_ok());
        let fac = factor_one_plus_t(&c, &f, 256).unwrap();
        prop_assert!(fac.ws.iter().all(|w| w.is_unit()));
        prop_assert_eq!(fac.product(&c), f);
    }

    #[test]
    fn rho_is_additive(a in element_strategy(ring("ratfunc:7:x"), 1), b in element_strategy(ring("ratfunc:7:x"), 1)) {
        let c = ctx("ratfunc:7:x", "x");
        let one = c.base().one();
        let (f, g) = (&one + &(c.t() * &a), &one + &(c.t() * &b));
        prop_assume!(f.is_unit() && g.is_unit() && a.is_unit() && b.is_unit());
        let lhs = rho_at(c.t(), &(&f * &g)).unwrap();
        let rhs = rho_at(c.t(), &f).unwrap().plus(&rho_at(c.t(), &g).unwrap());
        let tr = k2sym::symbol::derive::rho_hom_trace(c.t(), &f, &g).unwrap();
        prop_assert!(tr.proves(&lhs.minus(&rhs)));
    }
}

#[test]
fn certified_zeros_have_trivial_tame_image() {
    let q = ring("q");
    let w = SymbolWindow::height(&q, 6).unwrap();
    let contexts: Vec<_> = ["2", "3", "5"].iter().map(|p| ctx("q", p)).collect();
    let mut certified = 0;
    for src in ["{2,-2}", "{3,-2} + {-2,3}", "{2,2} - {2,-1}", "{1/2,1/2}", "{3,5}", "{2,3} + {3,2}", "{-1,-1}"] {
        let e = SymbolExpr::parse(&q, src).unwrap();
        if let Some(tr) = certify_zero(&e, &w).unwrap().trace() {
            certified += 1;
            assert!(tr.proves(&e), "{src}");
            for c in &contexts {
                assert!(cbar(&e, c).unwrap().is_one(), "{src} at {}", c.t());
            }
        }
    }
    assert!(certified >= 4);
}

#[test]
fn k_fold_stability_matches_field_size() {
    for q in [2u64, 3, 5, 7] {
        for k in 1..=5 {
            let r = ring(&format!("fp:{q}"));
            let rep = check_k_fold_stable(&r, k).unwrap();
            assert_eq!(rep.status == Status::Pass, q as usize > k, "F{q}, k = {k}");
        }
    }
}

#[test]
fn tame_image_detects_three_five() {
    let q = ring("q");
    let e = SymbolExpr::parse(&q, "{3,5}").unwrap();
    let c = ctx("q", "3");
    let r = cbar(&e, &c).unwrap();
    assert_eq!(r, c.residue_ring().from_int(2));
}
