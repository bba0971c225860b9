//! Acceptance suite: one line per criterion, with wall-clock limits.
//!
//! Runs as a plain binary (`harness = false`) so the criteria execute in
//! order and print a readable summary. Exits non-zero if any criterion
//! fails or overruns its time limit.

use std::process::Command;
use std::time::{Duration, Instant};

use k2sym::lab::identities::{tame_bimultiplicativity, tame_laws_check, tame_pair_laws};
use k2sym::lab::tame::{cbar, split_symbol};
use k2sym::lab::{lemma, square};
use k2sym::symbol::derive::auxiliary_units;
use k2sym::symbol::window::{certify_zero, instantiate, System};
use k2sym::{LocalisationContext, RingDescriptor, Status, SymbolExpr, SymbolWindow, VerificationReport, WindowKind};
use serde_json::Value as Json;

type Outcome = Result<String, String>;
/// Name, time limit in seconds, and the check itself.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn cli(args: &[&str]) -> Result<(i32, Json), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_k2sym"))
        .args(args)
        .output()
        .map_err(|e| format!("could not run k2sym: {e}"))?;
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("k2sym {} (exit {code}): bad JSON ({e}): {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))?;
    Ok((code, json))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn count(rep: &Json, key: &str) -> u64 {
    rep["counts"][key].as_u64().unwrap_or(0)
}

fn status(rep: &Json) -> &str {
    rep["status"].as_str().unwrap_or("?")
}

fn first_failures(rep: &Json) -> String {
    rep["failures"].as_array().map(|f| f.iter().take(3).map(|x| x.to_string()).collect::<Vec<_>>().join("; ")).unwrap_or_default()
}

fn expect_pass(rep: &Json, what: &str) -> Result<(), String> {
    ensure(status(rep) == "pass", || format!("{what}: status {} [{}]", status(rep), first_failures(rep)))
}

fn expect_report_pass(rep: &VerificationReport, what: &str) -> Result<(), String> {
    ensure(rep.status == Status::Pass, || {
        let f: Vec<String> = rep.failures.iter().take(3).map(|f| format!("{:?}: {}", f.inputs, f.detail)).collect();
        format!("{what}: status {} [{}]", rep.status.as_str(), f.join("; "))
    })
}

fn ctx(ring: &str, t: &str) -> LocalisationContext {
    LocalisationContext::from_spec(&RingDescriptor::parse(ring).expect("ring spec"), t).expect("context")
}

fn group(rep: &Json) -> String {
    rep["group"].as_str().unwrap_or("?").to_string()
}

/// Finite fields: both presentations are trivial, each run inside 10 s.
fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for q in [7, 11, 13] {
        for pres in ["s", "ds"] {
            let ring = format!("fp:{q}");
            let start = Instant::now();
            let (code, rep) = cli(&["compute", "--ring", &ring, "--presentation", pres])?;
            let took = start.elapsed();
            ensure(code == 0 && rep["trivial"] == true, || format!("{ring}/{pres}: group {}", group(&rep)))?;
            ensure(took < Duration::from_secs(10), || format!("{ring}/{pres} took {took:.1?}"))?;
            notes.push(format!("F{q}/{pres} {:.1}s", took.as_secs_f64()));
        }
    }
    Ok(notes.join(", "))
}

/// Finite local rings, with shuffled enumeration orders.
fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    for (ring, expect) in [("zmod:9", "0"), ("zmod:25", "0"), ("zmod:4", "Z/2")] {
        let mut seen = Vec::new();
        for seed in [None, Some("1"), Some("2"), Some("3")] {
            let mut args = vec!["compute", "--ring", ring, "--presentation", "ds"];
            if let Some(s) = seed {
                args.extend(["--shuffle-seed", s]);
            }
            let (code, rep) = cli(&args)?;
            ensure(code == 0, || format!("{ring}: exit {code}"))?;
            seen.push(group(&rep));
        }
        ensure(seen.iter().all(|g| g == expect), || format!("{ring}: groups {seen:?}, expected {expect}"))?;
        notes.push(format!("{ring} -> {expect}"));
    }
    Ok(format!("{} (invariant under 3 shuffles)", notes.join(", ")))
}

/// rho_t identities over the degree-2 window of (1+xR)^x, R = F7[x]_(x).
fn criterion_3() -> Outcome {
    let (code, rep) = cli(&["verify", "rho", "--ring", "ratfunc:7:x", "--t", "x", "--max-deg", "2"])?;
    expect_pass(&rep, "rho identities")?;
    ensure(code == 0 && count(&rep, "inconclusive") == 0, || "inconclusive cases".into())?;
    ensure(count(&rep, "power.cases") == 18, || "power identity must cover l = 1..3, u in F7^x".into())?;
    let (_, two) = cli(&["verify", "rho-factor", "--ring", "ratfunc:7:x,y", "--s", "x", "--t", "y", "--f", "1+3*x*y"])?;
    expect_pass(&two, "rho_xy(1+3xy)")?;
    Ok(format!(
        "{} hom pairs, {} factor instances, {} power instances, rho_xy(1+3xy) certified",
        count(&rep, "hom.cases"),
        count(&rep, "factor.cases"),
        count(&rep, "power.cases")
    ))
}

/// Tame-symbol laws over (F7[x]_(x))_x and over Q at p = 2, 3, 5, 7.
fn criterion_4() -> Outcome {
    let c = ctx("ratfunc:7:x@invert(x)", "x");
    let lr = c.localised();
    let full = SymbolWindow::degree(lr, 2).map_err(|e| e.to_string())?;
    let rep = tame_laws_check(&c, &full, 20_000, 1).map_err(|e| e.to_string())?;
    expect_report_pass(&rep, "degree-2 window")?;
    let deg1 = SymbolWindow::degree(lr, 1).and_then(|w| w.units()).map_err(|e| e.to_string())?;
    let rep = tame_pair_laws(&c, &deg1);
    expect_report_pass(&rep, "degree-1 pairs")?;
    let linear = SymbolWindow::new(lr, WindowKind::Degree { num: 1, den: 0 }).and_then(|w| w.units()).map_err(|e| e.to_string())?;
    let rep = tame_bimultiplicativity(&c, &linear, &deg1);
    expect_report_pass(&rep, "degree-1 triples")?;
    let mut rational_cases = 0;
    for p in ["2", "3", "5", "7"] {
        let q = ctx("q", p);
        let units = SymbolWindow::height(q.localised(), 30).and_then(|w| w.units()).map_err(|e| e.to_string())?;
        let pairs = tame_pair_laws(&q, &units);
        expect_report_pass(&pairs, &format!("Q at {p}, height-30 pairs"))?;
        let small = SymbolWindow::height(q.localised(), 4).and_then(|w| w.units()).map_err(|e| e.to_string())?;
        let mid = SymbolWindow::height(q.localised(), 10).and_then(|w| w.units()).map_err(|e| e.to_string())?;
        let triples = tame_bimultiplicativity(&q, &small, &mid);
        expect_report_pass(&triples, &format!("Q at {p}, triples"))?;
        let sampled = tame_laws_check(&q, &SymbolWindow::height(q.localised(), 30).unwrap(), 5_000, 1).map_err(|e| e.to_string())?;
        expect_report_pass(&sampled, &format!("Q at {p}, sampled triples"))?;
        rational_cases += pairs.cases_run + triples.cases_run + sampled.cases_run;
    }
    Ok(format!(
        "F7(x): all {} units antipodal, {} degree-1 units pairwise, {}x{} triples; Q: {} cases at 4 primes",
        full.units().map(|u| u.len()).unwrap_or(0),
        deg1.len(),
        linear.len(),
        deg1.len(),
        rational_cases
    ))
}

/// The rho/tame lemma over every pair f + g = 1 in the degree-2 window.
fn criterion_5() -> Outcome {
    let (code, rep) =
        cli(&["verify", "rho-lemma", "--ring", "ratfunc:7:x@invert(x)", "--t", "x", "--max-deg", "2", "--exhaustive"])?;
    expect_pass(&rep, "rho-lemma")?;
    ensure(code == 0, || format!("exit {code}"))?;
    let cases = ["n=m=0", "m>0", "n>0", "m<0"].map(|k| count(&rep, k));
    ensure(cases[0] > 0 && cases[3] > 0 && cases[1] + cases[2] > 0, || format!("case counts {cases:?}"))?;
    Ok(format!(
        "{} pairs; n=m=0: {}, m>0: {}, n>0: {}, m<0: {}",
        rep["cases_run"], cases[0], cases[1], cases[2], cases[3]
    ))
}

fn legs_clean(rep: &Json, legs: &[&str]) -> Result<(), String> {
    for f in rep["failures"].as_array().into_iter().flatten() {
        let d = f["detail"].as_str().unwrap_or("");
        if legs.iter().any(|l| d.starts_with(&format!("{l}:"))) {
            return Err(format!("{} leg failed: {f}", d.split(':').next().unwrap_or("")));
        }
    }
    Ok(())
}

/// Co-Cartesian square and exact sequence.
fn criterion_6() -> Outcome {
    let base = ["--ring", "ratfunc:7:x", "--t", "x", "--max-deg", "2", "--seed", "1", "--budget", "200"];
    let (_, push) = cli(&[&["verify", "pushout"], &base[..]].concat())?;
    expect_pass(&push, "pushout")?;
    let (_, ses) = cli(&[&["verify", "ses"], &base[..]].concat())?;
    ensure(ses["failures"].as_array().is_some_and(|f| f.is_empty()), || format!("ses failures: {}", first_failures(&ses)))?;
    let (inc, sampled) = (count(&ses, "exact.inconclusive"), count(&ses, "exact.cases"));
    ensure(count(&ses, "inconclusive") == inc, || "inconclusive outside the exactness leg".into())?;
    ensure(sampled == 200 && inc * 10 < sampled, || format!("{inc}/{sampled} kernel samples inconclusive"))?;
    let two = ["--ring", "ratfunc:7:x,y@invert(x)", "--t", "y", "--max-deg", "1", "--seed", "1", "--budget", "200"];
    let (_, push2) = cli(&[&["verify", "pushout"], &two[..]].concat())?;
    legs_clean(&push2, &["commutes", "surjective"])?;
    let (_, ses2) = cli(&[&["verify", "ses"], &two[..]].concat())?;
    legs_clean(&ses2, &["composite-trivial", "surjective"])?;
    Ok(format!(
        "F7[x]_(x): pushout {}, ses {} ({inc}/{sampled} inconclusive); two-parameter: pushout {}, ses {}",
        status(&push),
        status(&ses),
        status(&push2),
        status(&ses2)
    ))
}

/// Stability predicates and the non-stability of O((t)).
fn criterion_7() -> Outcome {
    let mut checked = 0;
    for q in [3u32, 5, 7, 11, 13] {
        for k in 1..=8usize {
            let ring = format!("fp:{q}");
            let (code, rep) = cli(&["stability", "--ring", &ring, "--k", &k.to_string()])?;
            let stable = status(&rep) == "pass";
            ensure(stable == (q as usize > k), || format!("{ring}, k = {k}: reported {}", status(&rep)))?;
            ensure(code == if stable { 0 } else { 1 }, || format!("{ring}, k = {k}: exit {code}"))?;
            if !stable {
                ensure(rep["failures"][0]["inputs"].as_array().is_some_and(|w| w.len() == q as usize), || {
                    format!("{ring}, k = {k}: witness {}", rep["failures"][0])
                })?;
            }
            checked += 1;
        }
    }
    let (_, weak) =
        cli(&["stability", "--ring", "ratfunc:7:x@invert(x)", "--k", "5", "--weak", "--seed", "1", "--budget", "500"])?;
    expect_pass(&weak, "weak 5-fold")?;
    let (_, remark) = cli(&["verify", "remark35", "--support", "3", "--coeff-height", "2"])?;
    expect_pass(&remark, "remark35")?;
    let decided = count(&remark, "n<=0") + count(&remark, "n>=1") + count(&remark, "c=0");
    ensure(decided == 78_125 && count(&remark, "inconclusive") == 0, || format!("{decided} of 78125 candidates decided"))?;
    Ok(format!("{checked} (q,k) pairs agree with q > k; weak 5-fold {} cases; remark35 {decided} candidates non-units", weak["cases_run"]))
}

/// (A3) factorisations re-multiply exactly.
fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for ring in ["ratfunc:7:x", "ratfunc:7:x,y@invert(y)"] {
        let (_, rep) = cli(&["verify", "a3", "--ring", ring, "--t", "x", "--random", "100", "--max-deg", "3", "--seed", "1"])?;
        expect_pass(&rep, ring)?;
        ensure(rep["cases_run"] == 100, || format!("{ring}: {} cases", rep["cases_run"]))?;
        notes.push(format!("{ring}: 100/100"));
    }
    Ok(notes.join(", "))
}

/// {3,5} is detected by c_3, and nothing certified zero has a nontrivial
/// tame image.
fn criterion_9() -> Outcome {
    let (code, tame) = cli(&["tame", "--ring", "q", "--t", "3", "--f", "3", "--g", "5"])?;
    ensure(code == 0 && tame["residue"] == "2", || format!("c_3({{3,5}}) residue {}", tame["residue"]))?;
    let q = RingDescriptor::parse("q").unwrap();
    let w = SymbolWindow::height(&q, 6).unwrap();
    let e = SymbolExpr::parse(&q, "{3,5}").unwrap();
    ensure(!certify_zero(&e, &w).map_err(|e| e.to_string())?.is_zero(), || "{3,5} certified zero".into())?;

    let mut audited = 0u64;
    let mut audit = |e: &SymbolExpr, c: &LocalisationContext| -> Result<(), String> {
        audited += 1;
        let v = cbar(e, c).map_err(|err| format!("{e}: {err}"))?;
        ensure(v.is_one(), || format!("certified zero {e} has tame image {v} at {}", c.t()))
    };
    // Every relation instance of small windows, at every implemented tame map.
    let contexts: Vec<LocalisationContext> = ["2", "3", "5", "7"].iter().map(|p| ctx("q", p)).collect();
    let qw = SymbolWindow::height(&q, 5).unwrap();
    let (units, elems) = (qw.units().unwrap(), qw.elements().unwrap());
    for system in [System::Steinberg, System::DennisStein] {
        for inst in instantiate(&units, &elems, system, &|x| qw.contains(x)) {
            for c in &contexts {
                audit(inst.expr(), c)?;
            }
        }
    }
    for (ring, t, elems) in [
        ("ratfunc:7:x@invert(x)", "x", None),
        ("ratfunc:7:x,y@invert(x)", "y", Some("1;2;3;-1;x;y;1+y;x+y;1+x*y;2*x-y;1/x;y/x;3+y^2")),
    ] {
        let c = ctx(ring, t);
        let w = match elems {
            None => SymbolWindow::new(c.localised(), WindowKind::Degree { num: 1, den: 0 }).unwrap(),
            Some(list) => {
                let xs = list.split(';').map(|e| c.localised().parse_element(e).unwrap()).collect();
                SymbolWindow::explicit(c.localised(), xs).unwrap()
            }
        };
        let (units, elems) = (w.units().unwrap(), w.elements().unwrap());
        for inst in instantiate(&units, &elems, System::Steinberg, &|x| w.contains(x)).iter().step_by(7) {
            audit(inst.expr(), &c)?;
        }
        // Steps of the splitting derivations.
        for f in units.iter().step_by(11) {
            for g in units.iter().step_by(13) {
                let (_, tr) = split_symbol(f, g, &c).map_err(|e| e.to_string())?;
                for (_, inst) in tr.steps() {
                    audit(inst.expr(), &c)?;
                }
            }
        }
    }
    // Steps of lemma derivations and of kernel preimages.
    let c = ctx("ratfunc:7:x@invert(x)", "x");
    let w = SymbolWindow::degree(c.localised(), 1).unwrap();
    for (f, g) in lemma::lemma_pairs(&w).unwrap() {
        let inst = lemma::rho_tame_instance(&f, &g, &c).map_err(|e| e.to_string())?;
        for (_, r) in inst.trace.steps() {
            audit(r.expr(), &c)?;
        }
    }
    let lr = c.localised().clone();
    let kernel = SymbolExpr::parse(&lr, "{2*x,3} - {5,x}").unwrap();
    if let Some((_, tr)) = square::kernel_preimage(&kernel, &c).map_err(|e| e.to_string())? {
        for (_, r) in tr.steps() {
            audit(r.expr(), &c)?;
        }
    }
    // Window certificates over Q, including skew and commutation consequences.
    let aux = auxiliary_units(&q);
    for a in aux.iter().take(12) {
        for b in aux.iter().take(12) {
            for src in [format!("{{{a},{b}}} + {{{b},{a}}}"), format!("{{{a},-({a})}}")] {
                let e = SymbolExpr::parse(&q, &src).unwrap();
                if let Some(tr) = certify_zero(&e, &qw).map_err(|e| e.to_string())?.trace() {
                    for c in &contexts {
                        audit(&e, c)?;
                        for (_, r) in tr.steps() {
                            audit(r.expr(), c)?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("c_3({{3,5}}) = 2, {{3,5}} not certified; {audited} certified-zero expressions audited, 0 violations"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("finite-field triviality", 60, criterion_1),
        ("finite local rings", 60, criterion_2),
        ("rho identities", 60, criterion_3),
        ("tame-symbol laws", 60, criterion_4),
        ("rho/tame lemma", 120, criterion_5),
        ("co-Cartesian square and exact sequence", 300, criterion_6),
        ("stability", 120, criterion_7),
        ("(A3) factorisation", 60, criterion_8),
        ("nonvanishing via tame invariants", 120, criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed().as_secs_f64();
        let (verdict, detail) = match result {
            Ok(d) if took <= *limit as f64 => ("PASS", d),
            Ok(d) => ("FAIL", format!("over the {limit}s limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {} [{name}]: {verdict} ({took:.1}s, limit {limit}s) {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
