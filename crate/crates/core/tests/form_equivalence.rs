use std::sync::Arc;

use accel_core::diagnostics::{check_form_equivalence, COPLANAR_TOL};
use accel_core::functions::{L1Norm, Quadratic};
use accel_core::instances::{
    make_prox_only_quadratic_l1, make_smooth_quadratic, make_strongly_convex_quadratic, randn_vec, random_quadratic, rng_for,
};
use accel_core::methods::{plan_for, run, Family, MethodSpec};
use accel_core::{CompositeProblem, Vector};

const K: usize = 50;
const N: usize = 10;

fn x0(seed: u64) -> Vector<f64> {
    randn_vec(&mut rng_for(1000 + seed), N)
}

fn quad_l1(seed: u64) -> CompositeProblem<f64> {
    let q = random_quadratic::<f64>(N, 0.0, 1.0, seed, false).unwrap();
    CompositeProblem::new(Arc::new(q), Arc::new(L1Norm { weight: 0.1 }))
}

fn assert_equivalent(methods: &[&str], make: impl Fn(u64) -> CompositeProblem<f64>) {
    for seed in 0..10 {
        let p = make(seed);
        for m in methods {
            let spec = MethodSpec::parse(m).unwrap();
            let r = check_form_equivalence(&spec, &p, &x0(seed), K, COPLANAR_TOL).unwrap();
            assert!(r.pass, "seed {seed}: {r}");
        }
    }
}

#[test]
fn prox_grad_families_agree() {
    assert_equivalent(&["fista", "fista_g", "g_fista_g", "g_fista_g[tau=constant]"], quad_l1);
}

#[test]
fn smooth_families_agree() {
    assert_equivalent(&["fgm", "ogm", "ogm_g", "fgm_g", "g_fgm_g", "g_fgm_g[tau=fista_g]"], |s| {
        make_smooth_quadratic(N, 0.0, 1.0, s).unwrap()
    });
}

#[test]
fn proximal_point_families_agree() {
    assert_equivalent(
        &[
            "guler1[lambda=0.7]",
            "guler2[lambda=0.7]",
            "guler_g[lambda=0.7]",
            "g_guler_g[lambda=0.7]",
            "proximal_tmm[lambda=0.7]",
            "proximal_item[lambda=0.7]",
        ],
        |s| make_prox_only_quadratic_l1(N, 0.5, 0.1, s).unwrap(),
    );
}

#[test]
fn strongly_convex_families_agree() {
    assert_equivalent(&["sc_fgm", "sc_ogm", "tmm", "item", "nonstationary_sc_fgm"], |s| {
        make_strongly_convex_quadratic(N, 10.0, s).unwrap()
    });
}

#[test]
fn single_form_families_are_rejected() {
    let p = quad_l1(0);
    for m in ["ista", "fpgm_m[m=3]", "composed(fista,fista_g)"] {
        let spec = MethodSpec::parse(m).unwrap();
        assert!(check_form_equivalence(&spec, &p, &x0(0), 5, 1e-8).is_err(), "{m}");
    }
}

#[test]
fn fpgm_is_fista_then_ista() {
    let p = quad_l1(3);
    let m = 7;
    let fpgm = run(&MethodSpec::parse(&format!("fpgm_m[m={m}]")).unwrap(), &p, &x0(3), 20).unwrap();
    let fista = run(&MethodSpec::parse("fista").unwrap(), &p, &x0(3), 20).unwrap();
    for k in 0..=m {
        assert!(fpgm.records[k].x.dist_sq(&fista.records[k].x).sqrt() < 1e-12, "k={k}");
    }
    for k in m..20 {
        let r = &fpgm.records;
        assert!(r[k + 1].x.dist_sq(&r[k].advanced).sqrt() < 1e-12, "k={k}");
    }
}

#[test]
fn fista_g_without_g_is_fgm_g() {
    let p = make_smooth_quadratic::<f64>(N, 0.0, 1.0, 4).unwrap();
    let a = run(&MethodSpec::parse("fista_g").unwrap(), &p, &x0(4), 30).unwrap();
    let b = run(&MethodSpec::parse("fgm_g").unwrap(), &p, &x0(4), 30).unwrap();
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert!(ra.x.dist_sq(&rb.x).sqrt() < 1e-12, "k={}", ra.k);
    }
}

#[test]
fn fista_g_one_step_by_hand() {
    // f = x²/2, L = 1, x₀ = 2: x₀⊕ = 0, φ₀ = 2 + √3, x₁ = −2/(1 + √3) = 1 − √3
    let f = Arc::new(Quadratic::isotropic(1.0f64, Vector::zeros(1), 0.0));
    let p = CompositeProblem::new(f, Arc::new(L1Norm { weight: 0.0 }));
    let x0 = Vector::from_f64(&[2.0]);
    for spec in ["fista_g", "fista_g@aux"] {
        let t = run(&MethodSpec::parse(spec).unwrap(), &p, &x0, 1).unwrap();
        assert!((t.records[1].x[0] - (1.0 - 3f64.sqrt())).abs() < 1e-14, "{spec}: {}", t.records[1].x[0]);
    }
}

#[test]
fn composed_trace_layout() {
    let p = quad_l1(5);
    let spec = MethodSpec::parse("composed(fista,fista_g)").unwrap();
    let t = run(&spec, &p, &x0(5), 12).unwrap();
    assert_eq!(t.records.len(), 2 * 12 + 1);
    assert_eq!(t.phase_starts, vec![0, 12]);
    let fista = run(&MethodSpec::parse("fista").unwrap(), &p, &x0(5), 12).unwrap();
    for k in 0..=12 {
        assert_eq!(t.records[k].x, fista.records[k].x);
    }
    // second phase starts from FISTA's last advanced point
    let second = run(&MethodSpec::parse("fista_g").unwrap(), &p, &fista.last().advanced, 12).unwrap();
    for k in 1..=12 {
        assert!(t.records[12 + k].x.dist_sq(&second.records[k].x) < 1e-24);
    }
    assert!(t.records.iter().enumerate().all(|(i, r)| r.k == i));
}

#[test]
fn tmm_at_unit_condition_is_gradient_descent() {
    let p = make_strongly_convex_quadratic::<f64>(N, 1.0, 6).unwrap();
    let t = run(&MethodSpec::parse("tmm").unwrap(), &p, &x0(6), 10).unwrap();
    let l = p.smoothness();
    for w in t.records.windows(2) {
        let gd = w[0].x.axpy(-1.0 / l, &p.f().gradient(&w[0].x));
        assert!(w[1].x.dist_sq(&gd).sqrt() < 1e-12);
    }
}

/// Advisory: as κ grows ITEM's momentum approaches OGM's away from the last step.
#[test]
fn item_tends_to_ogm_for_large_condition() {
    let k = 20;
    let sc = make_strongly_convex_quadratic::<f64>(N, 1e12, 7).unwrap();
    let item = plan_for(&MethodSpec::new(Family::Item { start: Default::default() }), &sc, k).unwrap();
    let ogm = plan_for(&MethodSpec::new(Family::Ogm), &sc, k).unwrap();
    for i in 1..k - 1 {
        let (a1, b1) = item.momentum(i);
        let (a2, b2) = ogm.momentum(i);
        assert!((a1 - a2).abs() < 1e-4 && (b1 - b2).abs() < 1e-4, "k={i}: item ({a1}, {b1}) ogm ({a2}, {b2})");
    }
}
