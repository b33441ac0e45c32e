//! One line per acceptance criterion.  Runs without the libtest harness so the
//! PASS/FAIL lines are always printed; exits nonzero if any criterion fails.
//! Every check is exact; the only tolerances are the wall-clock limits below.

mod common;

use common::{central_valuation_oracle, e1_oracle, extend_to_isomorphism, q8_mul, Dic, Sd, Q8};
use k2local::chart::{Emit, Format};
use k2local::config::RunConfig;
use k2local::d1::{verify_d1_squared, D1Engine, SIGN_CASES};
use k2local::e1::{poincare_table, AdaptedGenerator, FiltrationCaps, GenFamily};
use k2local::e2::{e2_p0, k1_presentations, localized_poincare, survivor_witness};
use k2local::group::{central_element, element_a, g24_generators, reduced_det, sd16_generators, subgroup_closure, G2Element, Landmarks};
use k2local::honda::{build_honda_fgl, verify_fgl};
use k2local::padic::{central_character_valuation, OmegaRoot, Precision, Residue};
use k2local::pipeline::{build_charts, verify_all};
use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Wall-clock limits per criterion, in seconds.
const LIMITS: [u64; 11] = [1, 10, 1, 30, 30, 5, 30, 10, 1, 1, 60];

const ROOTS: [OmegaRoot; 2] = [OmegaRoot::Primary, OmegaRoot::Conjugate];
const FGL_CAP: usize = 100;
const CLASSIFICATION_RANGE: i64 = 100_000;
const D1_BOUND: i64 = 200;
const E1_Q_MAX: u32 = 8;
const WINDOW: (i64, i64) = (-96, 96);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn prec(n: u32) -> Precision {
    Precision::new(n).unwrap()
}

fn caps(j: u32, v: u32) -> FiltrationCaps {
    FiltrationCaps::new(j, v, WINDOW.0, WINDOW.1).unwrap()
}

fn mul(x: &G2Element, y: &G2Element) -> G2Element {
    x.checked_mul(y).unwrap()
}

fn group_structure() -> Outcome {
    for n in [6, 8] {
        for root in ROOTS {
            let id = G2Element::identity(prec(n));
            let g24 = extend_to_isomorphism(&g24_generators(prec(n), root), &Dic::generators(), id, Dic::identity(), mul, Dic::mul)?;
            let sd16 = extend_to_isomorphism(&sd16_generators(prec(n), root), &Sd::generators(), id, Sd::identity(), mul, Sd::mul)?;
            ensure(g24 == 24 && sd16 == 16, || format!("N = {n}: orders {g24}, {sd16}"))?;
            let l = Landmarks::new(prec(n), root);
            let conj = mul(&mul(&l.phi, &l.omega), &l.phi.inverse());
            ensure(conj == l.omega.pow(3), || format!("N = {n}: phi omega phi^-1 != omega^3"))?;
            let (i, j): (Q8, Q8) = ((false, 1), (false, 2));
            let q8 = extend_to_isomorphism(&[l.omega2, l.omega_phi], &[i, j], id, (false, 0), mul, q8_mul)?;
            ensure(q8 == 8, || format!("N = {n}: <omega^2, omega phi> has order {q8}"))?;
        }
    }
    Ok("|G24| = 24, |SD16| = 16, Q8 certificate, N = 6 and 8".into())
}

fn order_of_a() -> Outcome {
    let a = element_a(prec(8), OmegaRoot::Primary);
    ensure(a.order(24) == Some(3), || format!("group order {:?}", a.order(24)))?;
    let r = verify_fgl(FGL_CAP, &a).map_err(|e| e.to_string())?;
    ensure(r.pass && r.a_has_order_3, || format!("{r:?}"))?;
    let f = build_honda_fgl(FGL_CAP).map_err(|e| e.to_string())?;
    ensure(!f.verify_order(&a, 1).unwrap(), || "[a] is the identity".into())?;
    Ok(format!("order 3 in the group and as an endomorphism at D = {FGL_CAP}"))
}

fn splitting_arithmetic() -> Outcome {
    let p = prec(8);
    let four = reduced_det(&central_element(Residue::new(4, p)).unwrap()).map_err(|e| e.to_string())?;
    ensure(four.value() == 2, || format!("reduced_det(4) = {}", four.value()))?;
    let g24 = subgroup_closure("G24", &g24_generators(p, OmegaRoot::Primary), 48).map_err(|e| e.to_string())?;
    let sd16 = subgroup_closure("SD16", &sd16_generators(p, OmegaRoot::Primary), 32).map_err(|e| e.to_string())?;
    let all: Vec<&G2Element> = g24.elements.iter().chain(&sd16.elements).collect();
    ensure(all.len() == 40, || format!("{} elements", all.len()))?;
    for g in &all {
        ensure(reduced_det(g).unwrap().is_zero(), || format!("nonzero reduced_det on {g:?}"))?;
    }
    Ok("reduced_det(4) = 2, zero on all 40 elements".into())
}

fn honda_oracle() -> Outcome {
    let f = build_honda_fgl(FGL_CAP).map_err(|e| e.to_string())?;
    let ax = f.check_axioms().map_err(|e| e.to_string())?;
    ensure(ax.all(), || format!("{ax:?}"))?;
    let r = verify_fgl(FGL_CAP, &element_a(prec(8), OmegaRoot::Primary)).map_err(|e| e.to_string())?;
    ensure(r.three_series_is_x9, || "[3](x) != x^9".into())?;
    Ok(format!("axioms and [3](x) = x^9 to degree {FGL_CAP}"))
}

fn d1_gate(engine: &D1Engine) -> Outcome {
    let r = verify_d1_squared(engine, &caps(12, 12), D1_BOUND, CLASSIFICATION_RANGE).map_err(|e| e.to_string())?;
    ensure(r.classification.checked == 3 * (2 * CLASSIFICATION_RANGE as usize + 1), || "classification range".into())?;
    ensure(r.pass, || {
        format!(
            "{} composite, {} transcription, {} pinned failures",
            r.composite_failures.len(),
            r.transcription_mismatches.len(),
            r.pinned_failures.len()
        )
    })?;
    Ok(format!("{} generators, classification on +-{CLASSIFICATION_RANGE}", r.generators_checked))
}

fn degree_zero(engine: &D1Engine) -> Outcome {
    for n in [6, 12, 24] {
        let r = e2_p0(engine, 0, &caps(n, n)).map_err(|e| e.to_string())?;
        ensure(r.stabilized && r.dims == [1, 0, 0, 1], || format!("caps ({n}, {n}): {:?}, stabilized {}", r.dims, r.stabilized))?;
    }
    Ok("(1, 0, 0, 1) stabilized at caps 6, 12, 24".into())
}

fn e1_tables() -> Outcome {
    let c = caps(12, 12);
    let mut cells = 0;
    for p in 0..4u8 {
        let table = poincare_table(p, E1_Q_MAX, &c).map_err(|e| e.to_string())?;
        for q in 0..=E1_Q_MAX {
            for t in c.window() {
                let (got, want) = (table.get(q, t), e1_oracle(p, q, t, 12, 12));
                ensure(got == want, || format!("(p, q, t) = ({p}, {q}, {t}): {got} vs {want}"))?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells, q <= {E1_Q_MAX}"))
}

fn localized_and_survivors() -> Outcome {
    let (j, v) = (12, 9);
    let c = caps(j, v);
    for p in 0..4u8 {
        // columns 0 and 3 are towers in v1^6 Delta^-1 (cap J), columns 1 and 2 in v1^4 v2^-1 (cap V)
        let cap = if p == 0 || p == 3 { j } else { v } as usize;
        for row in localized_poincare(p, &c).map_err(|e| e.to_string())?.rows {
            let want = if row.t % 4 == 0 { cap } else { 0 };
            ensure(row.computed == want, || format!("column {p}, t = {}: {} vs {want}", row.t, row.computed))?;
        }
    }
    ensure(k1_presentations(&c).unwrap().iter().all(|k| k.matches_localized_counts), || "K(1) rings".into())?;
    let engine = D1Engine::new();
    let w = survivor_witness(&engine).map_err(|e| e.to_string())?;
    ensure(w.pass && w.b1_is_cycle && w.unit_survives, || format!("{w:?}"))?;
    let b1 = AdaptedGenerator::from_label(GenFamily::B, 1).unwrap();
    ensure(engine.d1_generator(&b1).unwrap().is_none(), || "d1(b1) != 0".into())?;
    ensure(engine.d1_generator(&AdaptedGenerator::new(GenFamily::Delta, 0)).unwrap().is_none(), || "d1(Delta0) != 0".into())?;
    let img = engine.d1_generator(&AdaptedGenerator::new(GenFamily::Delta, 1)).unwrap();
    let b3 = AdaptedGenerator::from_label(GenFamily::B, 3).unwrap();
    ensure(img.is_some_and(|i| i.coeff.signed() == -1 && i.v1_shift == 0 && i.target == b3), || "d1(Delta1) != -b3".into())?;
    Ok("one Laurent tower per degree, d1(b1) = d1(Delta0) = 0, d1(Delta1) = -b3".into())
}

fn torsion_bound() -> Outcome {
    for k in 0..=6u32 {
        for m in [1, 2, 4, 5, 7, 8] {
            let t = 4 * 3i64.pow(k) * m;
            let v = central_character_valuation(t).map_err(|e| e.to_string())?;
            ensure(v == k + 1 && v == central_valuation_oracle(t), || format!("t = {t}: {v}"))?;
        }
    }
    Ok("v = k + 1 for k <= 6".into())
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap_or_default()
}

fn charts() -> Outcome {
    let cfg = RunConfig::default();
    let c = build_charts(&cfg).map_err(|e| e.to_string())?;
    let degrees: Vec<(i64, usize)> = c.rational.entries.iter().map(|(n, e)| (*n, e.dimension)).collect();
    ensure(degrees == [(-4, 1), (-3, 1), (-1, 1), (0, 1)], || format!("{degrees:?}"))?;
    let labels: Vec<String> = c.splitting.summands.iter().map(|s| s.label()).collect();
    ensure(labels == ["L1S^0_3", "L1S^-1_3", "L0S^-3_3", "L0S^-4_3"], || format!("{labels:?}"))?;
    for (name, text) in [
        ("rational.json", c.rational.emit(Format::Json)),
        ("rational.tsv", c.rational.emit(Format::Tsv)),
        ("rational.svg", c.rational.emit(Format::Svg)),
        ("splitting.json", c.splitting.emit(Format::Json)),
        ("splitting.tsv", c.splitting.emit(Format::Tsv)),
        ("splitting.svg", c.splitting.emit(Format::Svg)),
    ] {
        ensure(text.map_err(|e| e.to_string())? == golden(name), || format!("{name} differs from its golden file"))?;
    }
    Ok("dims in {0, -1, -3, -4}, four summands, goldens byte-identical".into())
}

/// The gating half of the chart criterion: charts exist only when the
/// d1, stabilization and localization gates pass.
fn charts_are_gated() -> Outcome {
    let (report, charts) = verify_all(&RunConfig::default());
    for g in ["d1-squared", "integral", "localized", "stabilization"] {
        ensure(report.gate(g).is_some(), || format!("missing gate {g}"))?;
    }
    ensure(report.pass && charts.is_some(), || format!("first failure {:?}", report.first_failure))?;
    let (bad, none) = verify_all(&RunConfig::parse("caps=3,3").unwrap());
    ensure(none.is_none() && bad.first_failure.as_deref() == Some("stabilization"), || "charts built from unstable E2".into())?;
    Ok("gated".into())
}

fn fault_injection() -> Outcome {
    for tag in SIGN_CASES {
        let engine = D1Engine::with_sign_fault(tag);
        let five = d1_gate(&engine);
        let six = degree_zero(&engine);
        ensure(five.is_err() || six.is_err(), || format!("{tag:?} went undetected"))?;
    }
    Ok(format!("all {} sign faults detected", SIGN_CASES.len()))
}

fn main() {
    let criteria: [(&str, &dyn Fn() -> Outcome); 11] = [
        ("group structure", &group_structure),
        ("order of a", &order_of_a),
        ("splitting arithmetic", &splitting_arithmetic),
        ("Honda oracle", &honda_oracle),
        ("d1 transcription gate", &|| d1_gate(&D1Engine::new())),
        ("E2 in degree 0", &|| degree_zero(&D1Engine::new())),
        ("E1 Poincare tables", &e1_tables),
        ("v1-localized counts and survivors", &localized_and_survivors),
        ("torsion bound", &torsion_bound),
        ("charts", &charts),
        ("fault injection", &fault_injection),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let limit = Duration::from_secs(LIMITS[i]);
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s limit", LIMITS[i])),
            Err(e) => (false, e),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {}  {name}: {detail} ({:.3}s / {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            LIMITS[i]
        );
    }
    // not timed: the gating is a property of the pipeline, not of chart emission
    match charts_are_gated() {
        Ok(_) => println!("criterion 10 gating PASS  charts withheld unless gates 5-8 pass"),
        Err(e) => {
            failed += 1;
            println!("criterion 10 gating FAIL  {e}");
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
