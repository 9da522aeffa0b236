//! Worked examples through the public API, each against a closed form.

use std::collections::BTreeMap;

use wapprox::cheb::ChebPoly;
use wapprox::function::{function_registry, weighted_sup_check};
use wapprox::geometry::{chebyshev_grid, ZSet};
use wapprox::minimax::ApproxCache;
use wapprox::moduli::{complete_modulus, dt_modulus, main_part_modulus, mt_constant, mt_modulus, ModulusQuery};
use wapprox::verify::{near_best_pair, realization_functional, weighted_derivative_norm, Flag, Grids, Verifier};
use wapprox::weights::{check_wstar_condition, Weight};

fn func(name: &str, params: &[(&str, f64)]) -> wapprox::function::TargetFunction {
    let p: BTreeMap<String, f64> = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    function_registry(name, &p).unwrap()
}

fn flagship_weight() -> Weight {
    Weight::jacobi(&[(-1.0, 0.5), (0.0, 0.3), (1.0, 0.5)]).unwrap()
}

#[test]
fn derivative_norm_examples() {
    let grid = chebyshev_grid(-1.0, 1.0, 2048);
    let one = Weight::one();
    let c = ChebPoly::new([-1.0, 1.0], vec![1.0]).unwrap();
    assert_eq!(weighted_derivative_norm(&c, &one, 1, &grid), 0.0);
    let t8 = ChebPoly::chebyshev_t(8);
    assert!((weighted_derivative_norm(&t8, &one, 0, &grid) - 1.0).abs() < 1e-12);
    assert!((weighted_derivative_norm(&t8, &one, 1, &grid) - 8.0).abs() < 1e-4);
}

#[test]
fn realization_functional_examples() {
    let grid = chebyshev_grid(-1.0, 1.0, 512);
    let w = flagship_weight();
    // f in P_r is its own candidate
    let p = ChebPoly::new([-1.0, 1.0], vec![0.3, -0.7]).unwrap();
    let f = wapprox::function::TargetFunction::from_poly("p", p.clone());
    assert!(realization_functional(&f, &w, 2, 0.1, std::slice::from_ref(&p), &grid).unwrap() < 1e-14);
    // f in P_n \ P_r: bounded by t^r ‖w φ^r f^(r)‖
    let q = ChebPoly::chebyshev_t(5);
    let g = wapprox::function::TargetFunction::from_poly("T5", q.clone());
    let t: f64 = 0.125;
    let val = realization_functional(&g, &w, 2, t, std::slice::from_ref(&q), &grid).unwrap();
    let bound = t * t * weighted_derivative_norm(&q, &w, 2, &grid);
    assert!(val <= bound * (1.0 + 1e-12));
    assert!(realization_functional(&g, &w, 2, t, &[], &grid).is_err());
}

#[test]
fn realization_tracks_complete_modulus_for_abs() {
    let v = Verifier::new(func("power_abs", &[("alpha", 1.0)]), Weight::one(), ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(), 1, 1.0, 1.0, Grids::default())
        .unwrap();
    let r = v.realization_value(8).unwrap();
    let om = v.omega(1.0, 1.0, 0.125).unwrap().value;
    let ratio = r / om;
    assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
}

#[test]
fn near_best_pair_examples() {
    let f = func("power_abs", &[("alpha", 1.0)]);
    let one = Weight::one();
    // f is linear on J
    let (ext, best) = near_best_pair(&f, &one, 2, [0.1, 0.2], [0.1, 0.3], 256).unwrap();
    assert!(ext < 1e-12 && best < 1e-12);
    let (ext, best) = near_best_pair(&f, &one, 2, [-0.1, 0.1], [-0.15, 0.15], 256).unwrap();
    assert!(best > 0.0 && ext / best < 10.0, "{ext} {best}");
    assert!(near_best_pair(&f, &one, 2, [-0.2, 0.2], [-0.1, 0.1], 64).is_err());
}

#[test]
fn modulus_of_linear_function_on_interior() {
    let q = ModulusQuery {
        f: func("monomial", &[("k", 1.0)]),
        w: Weight::one(),
        z: ZSet::endpoints(),
        r: 1,
        a: 1.0,
        b: 1.0,
        t: 0.1,
        h_grid: 32,
        x_grid: 2048,
    };
    let v = main_part_modulus(&q).unwrap().value;
    assert!((v - 0.1).abs() < 1e-3, "{v}");
}

#[test]
fn dt_modulus_of_square() {
    let z = ZSet::endpoints();
    let grid = wapprox::geometry::SampleGrid::new(4096, &z);
    let v = dt_modulus(&func("monomial", &[("k", 2.0)]), &Weight::one(), 1, 0.1, 32, &grid).unwrap().value;
    assert!((v - 0.1).abs() < 1e-3, "{v}");
    for r in 1..=3 {
        let t: f64 = 0.05;
        let v = dt_modulus(&func("monomial", &[("k", r as f64)]), &Weight::one(), r, t, 32, &grid).unwrap().value;
        let fact: f64 = (1..=r).product::<usize>() as f64;
        let exact = fact * t.powi(r as i32);
        assert!(v <= exact * (1.0 + 1e-9) && v > 0.9 * exact, "r = {r}: {v} vs {exact}");
    }
}

#[test]
fn complete_modulus_saturates() {
    let cache = ApproxCache::new();
    let base = ModulusQuery {
        f: func("power_abs", &[("alpha", 0.6)]),
        w: flagship_weight(),
        z: ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(),
        r: 2,
        a: 1.0,
        b: 1.0,
        t: 2.0_f64.sqrt(),
        h_grid: 32,
        x_grid: 1024,
    };
    let at = complete_modulus(&base, &cache).unwrap().value;
    let beyond = complete_modulus(&ModulusQuery { t: 3.0, ..base.clone() }, &cache).unwrap().value;
    assert_eq!(at, beyond);
}

#[test]
fn mt_modulus_is_finite_and_sandwiched_for_flagship() {
    let z = ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap();
    assert!((mt_constant(&z).unwrap() - 1.0).abs() < 1e-15);
    let f = func("power_abs", &[("alpha", 0.6)]);
    let w = flagship_weight();
    let grid = wapprox::geometry::SampleGrid::new(1024, &z);
    let cache = ApproxCache::new();
    let v = mt_modulus(&f, &w, &z, 1, 0.125, 32, &grid, &cache).unwrap();
    assert!(v.value.is_finite() && v.value > 0.0);
    assert!(mt_constant(&ZSet::new(vec![0.0]).unwrap()).is_err());
}

#[test]
fn wstar_detects_undeclared_zero() {
    let w = Weight::jacobi(&[(0.5, 1.0)]).unwrap();
    let c = check_wstar_condition(&w, &ZSet::endpoints(), 32, 1.0, 1.0, 64).unwrap();
    assert_eq!(c.c_star, 0.0);
    let declared = check_wstar_condition(&w, &ZSet::new(vec![-1.0, 0.5, 1.0]).unwrap(), 32, 1.0, 1.0, 64).unwrap();
    assert!(declared.c_star > 0.0);
}

#[test]
fn negative_power_needs_vanishing_weight() {
    let f = func("neg_power", &[("alpha", -0.2)]);
    assert_eq!(f.singular_points(), &[0.0]);
    assert!(!weighted_sup_check(&f, &Weight::one(), 12).1);
    assert!(weighted_sup_check(&f, &Weight::jacobi(&[(0.0, 0.2)]).unwrap(), 12).1);
    let g = func("truncated_power", &[("z", 0.3), ("alpha", 0.5)]);
    assert_eq!(g.eval(0.2), 0.0);
    assert!((g.eval(0.55) - 0.5).abs() < 1e-15);
}

#[test]
fn polynomial_target_gives_vacuous_rows() {
    let v = Verifier::new(func("monomial", &[("k", 1.0)]), flagship_weight(), ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(), 2, 1.0, 1.0, Grids::default())
        .unwrap();
    for rep in v.jackson(&[4, 8, 16]).unwrap() {
        assert!(rep.pass);
        assert!(rep.rows.iter().all(|r| r.flag == Flag::Vacuous), "{}", rep.summary_line());
    }
    let c = Verifier::new(func("monomial", &[("k", 0.0)]), flagship_weight(), ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(), 1, 1.0, 1.0, Grids::default())
        .unwrap();
    let inv = c.inverse(&[4, 8, 16]).unwrap();
    assert!(inv.pass && inv.rows.iter().all(|r| r.flag == Flag::Vacuous), "{}", inv.summary_line());
}

#[test]
fn inverse_for_abs_with_unit_weight() {
    let v = Verifier::new(func("power_abs", &[("alpha", 1.0)]), Weight::one(), ZSet::new(vec![-1.0, 0.0, 1.0]).unwrap(), 1, 1.0, 1.0, Grids::default())
        .unwrap();
    assert!((v.e_global(2).unwrap().error - 0.5).abs() < 1e-9);
    let e3 = v.e_global(3).unwrap().error;
    assert!((e3 - 0.125).abs() < 1e-5, "{e3}");
    let rep = v.inverse(&[4, 8, 16, 32, 64]).unwrap();
    assert!(rep.pass, "{}", rep.summary_line());
}

#[test]
fn smooth_target_inverse() {
    let v = Verifier::new(func("exp", &[]), Weight::one(), ZSet::endpoints(), 2, 1.0, 1.0, Grids::default()).unwrap();
    let rep = v.inverse(&[4, 8, 16, 32]).unwrap();
    assert!(rep.pass, "{}", rep.summary_line());
}

#[test]
fn shifted_kink_with_unit_weight() {
    let v = Verifier::new(
        func("power_abs", &[("z", 0.3), ("alpha", 1.0)]),
        Weight::one(),
        ZSet::new(vec![-1.0, 0.3, 1.0]).unwrap(),
        1,
        1.0,
        1.0,
        Grids::default(),
    )
    .unwrap();
    let ns = [4, 8, 16, 32];
    for rep in v.jackson(&ns).unwrap() {
        assert!(rep.pass, "{}", rep.summary_line());
    }
}
