use accel_core::functions::{BoxIndicator, L1Norm, QuadraticL1};
use accel_core::instances::{randn_vec, random_quadratic, rng_for, NuclearNormSym};
use accel_core::oracle::{ProxOracle, SmoothOracle};
use accel_core::schedules::{build_item_schedule, build_phi_fistag, build_theta, ItemStart, ItemVariant, ThetaVariant, PHI_TAU_TOL};
use accel_core::Vector;
use proptest::prelude::*;

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

fn firmly_nonexpansive(g: &dyn ProxOracle<f64>, c: f64, x: &Vector<f64>, y: &Vector<f64>) -> Result<(), TestCaseError> {
    let (px, py) = (g.prox(c, x).unwrap(), g.prox(c, y).unwrap());
    let d = &px - &py;
    let lhs = d.norm_sq();
    let rhs = d.dot(&(x - y));
    prop_assert!(lhs <= rhs + 1e-9 * (1.0 + x.dist_sq(y)), "{lhs} > {rhs}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fista_g_tau_bound(k in 1usize..=10_000) {
        let s = build_phi_fistag::<f64>(k).unwrap();
        let kp2 = (k + 2) as f64;
        prop_assert!(s.tau(0) * kp2 * kp2 <= 33.0, "K={k}: {}", s.tau(0) * kp2 * kp2);
        prop_assert!(s.validate(PHI_TAU_TOL).is_ok());
    }

    #[test]
    fn ogm_g_theta_bound(k in 1usize..=10_000) {
        let th = build_theta::<f64>(ThetaVariant::OgmgBackward, k).unwrap();
        prop_assert!(th.theta(0) >= (k as f64 + 1.0) / 2f64.sqrt());
        prop_assert_eq!(th.theta(k as isize), 1.0);
    }

    #[test]
    fn item_a_grows_geometrically(q in 1e-4f64..0.99, k in 2usize..200) {
        let s = build_item_schedule::<f64>(ItemVariant::ProximalItem, k, q, ItemStart::Recursion).unwrap();
        let rho = (1.0 - q.sqrt()).powi(2);
        for i in 1..=k {
            prop_assert!(s.a(i) * rho >= s.a(i - 1) * (1.0 - 1e-12), "i={i}");
        }
    }

    #[test]
    fn l1_prox_firmly_nonexpansive(x in vec_strategy(6), y in vec_strategy(6), c in 1e-3f64..10.0, w in 0.0f64..5.0) {
        let g = L1Norm { weight: w };
        firmly_nonexpansive(&g, c, &Vector::from_vec(x), &Vector::from_vec(y))?;
    }

    #[test]
    fn quadratic_l1_prox_firmly_nonexpansive(x in vec_strategy(4), y in vec_strategy(4), c in 1e-3f64..10.0, seed in 0u64..1000) {
        let g = QuadraticL1 { mu: 0.7, center: randn_vec(&mut rng_for(seed), 4), weight: 0.3 };
        firmly_nonexpansive(&g, c, &Vector::from_vec(x), &Vector::from_vec(y))?;
    }

    #[test]
    fn box_prox_firmly_nonexpansive(x in vec_strategy(5), y in vec_strategy(5)) {
        let g = BoxIndicator { lo: -1.0, hi: 2.0 };
        firmly_nonexpansive(&g, 1.0, &Vector::from_vec(x), &Vector::from_vec(y))?;
    }

    #[test]
    fn nuclear_prox_firmly_nonexpansive(x in vec_strategy(6), y in vec_strategy(6), c in 1e-2f64..5.0) {
        let g = NuclearNormSym::new(3, 0.5, true);
        firmly_nonexpansive(&g, c, &Vector::from_vec(x), &Vector::from_vec(y))?;
    }

    #[test]
    fn quadratic_gradient_lipschitz_and_descent(seed in 0u64..1000, x in vec_strategy(5), y in vec_strategy(5)) {
        let q = random_quadratic::<f64>(5, 0.1, 3.0, seed, false).unwrap();
        let f: &dyn SmoothOracle<f64> = &q;
        let (x, y) = (Vector::from_vec(x), Vector::from_vec(y));
        let l = f.smoothness();
        let (gx, gy) = (f.gradient(&x), f.gradient(&y));
        let d = &y - &x;
        let scale = 1.0 + f.value(&x).abs() + f.value(&y).abs() + l * d.norm_sq();
        prop_assert!(gx.dist_sq(&gy).sqrt() <= l * d.norm() * (1.0 + 1e-12) + 1e-12);
        prop_assert!(f.value(&y) <= f.value(&x) + gx.dot(&d) + 0.5 * l * d.norm_sq() + 1e-12 * scale);
        let mu = f.strong_convexity();
        prop_assert!(f.value(&x) + gx.dot(&d) + 0.5 * mu * d.norm_sq() <= f.value(&y) + 1e-12 * scale);
    }

    #[test]
    fn nuclear_prox_is_optimal(v in vec_strategy(6), c in 0.05f64..3.0, scaled in any::<bool>(), seed in 0u64..1000) {
        // p minimizes c·h(p) + ½‖p − v‖²: no random direction improves it
        let g = NuclearNormSym::new(3, 0.7, scaled);
        let v = Vector::from_vec(v);
        let p = g.prox(c, &v).unwrap();
        let obj = |x: &Vector<f64>| c * g.value(x) + 0.5 * x.dist_sq(&v);
        let base = obj(&p);
        let mut rng = rng_for(seed);
        for _ in 0..20 {
            let dir = randn_vec::<f64>(&mut rng, 6);
            for t in [1e-3, 1e-5] {
                prop_assert!(obj(&p.axpy(t, &dir)) >= base - 1e-10 * (1.0 + base.abs()));
            }
        }
    }
}
