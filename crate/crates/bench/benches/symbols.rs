use criterion::{criterion_group, criterion_main, Criterion};
use k2sym::lab::assumptions::factor_one_plus_t;
use k2sym::lab::tame::{split_symbol, tame_symbol};
use k2sym::symbol::derive::rho_hom_trace;
use k2sym::symbol::window::{build_ds_full, certify_zero};
use k2sym::{LocalisationContext, RingDescriptor, SymbolExpr, SymbolWindow};
use std::hint::black_box;

fn ctx(ring: &str, t: &str) -> LocalisationContext {
    LocalisationContext::from_spec(&RingDescriptor::parse(ring).unwrap(), t).unwrap()
}

fn presentations(c: &mut Criterion) {
    let r = RingDescriptor::parse("zmod:25").unwrap();
    c.bench_function("ds presentation of Z/25", |b| b.iter(|| build_ds_full(black_box(&r), None).unwrap().group.invariants()));
}

fn tame(c: &mut Criterion) {
    let cx = ctx("ratfunc:7:x@invert(x)", "x");
    let el = |s: &str| cx.localised().parse_element(s).unwrap();
    let (f, g) = (el("(x^2+3*x)/(1+x)"), el("5/x^2"));
    c.bench_function("tame symbol, F7(x)", |b| b.iter(|| tame_symbol(black_box(&f), black_box(&g), &cx).unwrap()));
    c.bench_function("split symbol, F7(x)", |b| b.iter(|| split_symbol(black_box(&f), black_box(&g), &cx).unwrap()));
}

fn rho(c: &mut Criterion) {
    let cx = ctx("ratfunc:7:x", "x");
    let el = |s: &str| cx.base().parse_element(s).unwrap();
    let (f, g) = (el("(1+2*x)/(1+5*x^2)"), el("1+x+3*x^2"));
    c.bench_function("rho homomorphism trace", |b| b.iter(|| rho_hom_trace(cx.t(), black_box(&f), black_box(&g)).unwrap()));
    let h = el("1+3*x^2");
    c.bench_function("factor 1+3x^2", |b| b.iter(|| factor_one_plus_t(&cx, black_box(&h), 256).unwrap()));
}

fn certify(c: &mut Criterion) {
    let q = RingDescriptor::parse("q").unwrap();
    let w = SymbolWindow::height(&q, 6).unwrap();
    let e = SymbolExpr::parse(&q, "{3,-2} + {-2,3}").unwrap();
    c.bench_function("certify {a,b}+{b,a} over Q", |b| b.iter(|| certify_zero(black_box(&e), &w).unwrap()));
}

criterion_group!(benches, presentations, tame, rho, certify);
criterion_main!(benches);
