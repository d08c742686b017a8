use std::sync::Arc;
use std::time::Instant;

use nishida_core::dring::{
    base_square_check, build_free_dring, scalar_derivative_table, solve_base_dstructure,
    solve_tensor_dstructure, Quadratic,
};
use nishida_core::f2series::GradedPolynomial;
use nishida_core::fgl::{build_universal_fgl, ln_coaction_on_fgl};
use nishida_core::hopf::HopfPresentation;
use nishida_core::nishida::{extend_coaction_bordism, nishida_square_check, NishidaSquare};
use nishida_core::qring::free::FreeElement;
use nishida_core::report::Report;

fn samples(sq: &NishidaSquare, maxd: u32, maxw: u32) -> Vec<(String, FreeElement)> {
    let mut out = Vec::new();
    for ((d, w), _) in sq.ring.dimensions() {
        if d > maxd || w > maxw {
            continue;
        }
        for t in sq.ring.component(d, w).unwrap().basis() {
            let e = FreeElement::term(t.scalar, t.mono.clone());
            out.push((e.display(&sq.ring.gens, sq.ring.engine()), e));
        }
    }
    out
}

fn main() {
    let t0 = Instant::now();
    let model = Arc::new(build_universal_fgl(15).unwrap());
    let b = Arc::new(HopfPresentation::faa_di_bruno(13).unwrap());
    let mut rep = Report::new();
    let base = solve_base_dstructure(&model, Quadratic::XtimesFxt, 14, &mut rep).unwrap();
    println!("base solve: {:?}", t0.elapsed());
    println!("{}", rep.to_text());

    for name in ["m1", "m2", "m3"] {
        let v = model.alphabet().var(name).unwrap();
        let e = &base.spec.table[&v];
        println!("D_t({name}) cap {}:", e.cap());
        for k in 0..=e.cap() {
            let c = e.coeff1(k as u16);
            if !c.is_zero() {
                println!("  t^{k}: {}", c.display());
            }
        }
    }

    let t1 = Instant::now();
    let dsolve = solve_tensor_dstructure(&b, &base, Quadratic::XtimesFxt, 14, &mut rep).unwrap();
    let ln = ln_coaction_on_fgl(&b, &model, 12).unwrap();
    println!("tensor solve + ln(12): {:?}", t1.elapsed());

    let t2 = Instant::now();
    base_square_check(&b, &base, &dsolve, &ln, 12, "base-sq", &mut rep).unwrap();
    println!(
        "base squares: {} rows, all pass = {} ({:?})",
        rep.cases.len(),
        rep.all_pass(),
        t2.elapsed()
    );
    for f in rep.failures().take(10) {
        println!("  FAIL {} [{}]", f.case, f.detail);
    }

    let t3 = Instant::now();
    let mut irep = Report::new();
    for (name, cap) in [("m1", 4u32), ("m2", 2)] {
        let v = model.alphabet().var(name).unwrap();
        let a = GradedPolynomial::variable(base.carrier(), v);
        base.interchange_check(&a, cap, "b-inter", name, &mut irep)
            .unwrap();
    }
    println!(
        "base interchange: all pass = {} ({:?})",
        irep.all_pass(),
        t3.elapsed()
    );
    for f in irep.failures().take(10) {
        println!("  FAIL {}", f.case);
    }

    let t4 = Instant::now();
    let dt = Arc::new(scalar_derivative_table(&base, 12).unwrap());
    let ring = build_free_dring(&model, Some(dt), &[("x", 0, 1)], 12, 8).unwrap();
    println!("bordism ring (12,8): {:?}", t4.elapsed());
    let t5 = Instant::now();
    let bsq = extend_coaction_bordism(&b, &dsolve, ring, Some(ln), 12).unwrap();
    println!("bordism extension: {:?}", t5.elapsed());

    let t6 = Instant::now();
    let mut brep = Report::new();
    let bs = samples(&bsq, 4, 4);
    println!("bordism samples (4,4): {}", bs.len());
    nishida_square_check(&bsq, &bs, 4, "b-square", &mut brep).unwrap();
    println!(
        "bordism squares: {} rows, all pass = {} ({:?})",
        brep.cases.len(),
        brep.all_pass(),
        t6.elapsed()
    );
    for f in brep.failures().take(12) {
        println!("  FAIL {}", f.case);
    }

    let t7 = Instant::now();
    let mut crep = Report::new();
    bsq.consistency_check(6, "b-adem", &mut crep).unwrap();
    bsq.comodule_check(6, "b-comodule", &mut crep).unwrap();
    println!(
        "bordism adem+comodule: {} rows, all pass = {} ({:?})",
        crep.cases.len(),
        crep.all_pass(),
        t7.elapsed()
    );
    for f in crep.failures().take(10) {
        println!("  FAIL {}", f.case);
    }
}
