mod common;

use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use rand::RngExt;

use vslepian::specfun::xlm;
use vslepian::vsh::{evaluate, sample, u_index, vw_index};
use vslepian::{
    analyze, eval_b, eval_c, eval_p, sphere_quadrature, synth, Block, CoeffVector, GridSpec, Part, SampledField,
    SpherePoint,
};

fn real_y(l: usize, m: i32, t: f64, p: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    let x = xlm(l, am as i32, t).unwrap();
    match m {
        0 => x,
        m if m < 0 => SQRT_2 * x * (am as f64 * p).cos(),
        _ => SQRT_2 * x * (am as f64 * p).sin(),
    }
}

fn random_coeffs(l_max: usize, seed: u64) -> CoeffVector {
    let mut r = common::rng(seed);
    let n = Part::Full.dim(l_max);
    let data: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    CoeffVector::from_part_slice(l_max, Part::Full, &data).unwrap()
}

#[test]
fn radial_harmonics_are_real_spherical_harmonics() {
    for l in 0..=8 {
        for m in -(l as i32)..=l as i32 {
            for (t, p) in [(0.4, 0.3), (1.3, 2.2), (2.7, 5.0)] {
                let got = eval_p(l, m, &SpherePoint::new(t, p).unwrap()).unwrap();
                assert!((got.r - real_y(l, m, t, p)).abs() < 1e-13);
                assert_eq!((got.t, got.p), (0.0, 0.0));
            }
        }
    }
}

#[test]
fn tangential_harmonics_are_surface_gradients() {
    let h = 1e-6;
    for l in 1..=7 {
        let k = ((l * (l + 1)) as f64).sqrt();
        for m in -(l as i32)..=l as i32 {
            let (t, p) = (1.1, 0.7);
            let dt = (real_y(l, m, t + h, p) - real_y(l, m, t - h, p)) / (2.0 * h);
            let dp = (real_y(l, m, t, p + h) - real_y(l, m, t, p - h)) / (2.0 * h);
            let b = eval_b(l, m, &SpherePoint::new(t, p).unwrap()).unwrap();
            let c = eval_c(l, m, &SpherePoint::new(t, p).unwrap()).unwrap();
            assert!((b.t - dt / k).abs() < 1e-7 && (b.p - dp / (t.sin() * k)).abs() < 1e-7);
            assert!((c.t - b.p).abs() < 1e-15 && (c.p + b.t).abs() < 1e-15);
        }
    }
}

#[test]
fn orthonormal_under_sphere_quadrature() {
    let l_max = 5;
    let rule = sphere_quadrature(l_max);
    let mut fields = Vec::new();
    for l in 0..=l_max {
        for m in -(l as i32)..=l as i32 {
            fields.push(rule.nodes.iter().map(|p| eval_p(l, m, p).unwrap()).collect::<Vec<_>>());
            if l > 0 {
                fields.push(rule.nodes.iter().map(|p| eval_b(l, m, p).unwrap()).collect());
                fields.push(rule.nodes.iter().map(|p| eval_c(l, m, p).unwrap()).collect());
            }
        }
    }
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate() {
            let s: f64 = rule.weights.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x.dot(y)).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-12, "{i} {j}: {s}");
        }
    }
}

#[test]
fn addition_theorem() {
    // Σ_m |P_lm|² = Σ_m |B_lm|² = Σ_m |C_lm|² = (2l+1)/4π
    let pt = SpherePoint::new(0.83, 4.1).unwrap();
    for l in 1..=20 {
        let want = (2 * l + 1) as f64 / (4.0 * PI);
        let ms = -(l as i32)..=l as i32;
        let p: f64 = ms.clone().map(|m| eval_p(l, m, &pt).unwrap().norm_sq()).sum();
        let b: f64 = ms.clone().map(|m| eval_b(l, m, &pt).unwrap().norm_sq()).sum();
        let c: f64 = ms.map(|m| eval_c(l, m, &pt).unwrap().norm_sq()).sum();
        for v in [p, b, c] {
            assert!((v - want).abs() < 1e-12);
        }
    }
}

#[test]
fn layout_indices() {
    assert_eq!(u_index(0, 0), 0);
    assert_eq!(u_index(1, -1), 1);
    assert_eq!(u_index(2, 2), 8);
    assert_eq!(vw_index(1, -1), 0);
    assert_eq!(vw_index(3, 3), 14);
    let mut c = CoeffVector::zeros(3);
    c.set(Block::W, 2, -1, 4.0).unwrap();
    assert_eq!(c.w()[vw_index(2, -1)], 4.0);
    assert_eq!(c.get(Block::W, 2, -1).unwrap(), 4.0);
    assert!(c.set(Block::V, 0, 0, 1.0).is_err());
    assert_eq!(Part::Full.dim(3), 46);
}

#[test]
fn synth_is_linear_and_matches_evaluate() {
    let a = random_coeffs(6, 1);
    let b = random_coeffs(6, 2);
    let mut sum = a.clone();
    sum.axpy(-2.5, &b).unwrap();
    let grid = GridSpec::equiangular(15.0).unwrap();
    let (ga, gb, gs) = (synth(&a, &grid).unwrap(), synth(&b, &grid).unwrap(), synth(&sum, &grid).unwrap());
    for i in 1..grid.thetas.len() - 1 {
        for j in 0..grid.phis.len() {
            let (x, y, z) = (ga.at(i, j), gb.at(i, j), gs.at(i, j));
            assert!((z.r - (x.r - 2.5 * y.r)).abs() < 1e-12);
            assert!((z.t - (x.t - 2.5 * y.t)).abs() < 1e-12);
            assert!((z.p - (x.p - 2.5 * y.p)).abs() < 1e-12);
            let e = evaluate(&a, &SpherePoint::new(grid.thetas[i], grid.phis[j]).unwrap()).unwrap();
            assert!((e - x).norm() < 1e-13);
        }
    }
}

#[test]
fn analysis_needs_enough_resolution() {
    let c = random_coeffs(8, 3);
    let field = SampledField::from_coeffs(&c, sphere_quadrature(5));
    assert!(analyze(&field, 8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn analysis_inverts_synthesis(l_max in 1usize..=12, seed in any::<u64>()) {
        let c = random_coeffs(l_max, seed);
        let field = SampledField::from_coeffs(&c, sphere_quadrature(l_max));
        let back = analyze(&field, l_max).unwrap();
        let mut d = back.clone();
        d.axpy(-1.0, &c).unwrap();
        prop_assert!(d.norm_sq().sqrt() < 1e-11 * c.norm_sq().sqrt().max(1.0));
    }

    #[test]
    fn parseval(l_max in 1usize..=12, seed in any::<u64>()) {
        let c = random_coeffs(l_max, seed);
        let e = SampledField::from_coeffs(&c, sphere_quadrature(l_max)).energy();
        prop_assert!((e - c.norm_sq()).abs() < 1e-11 * c.norm_sq());
    }

    #[test]
    fn sampling_matches_pointwise_sum(seed in any::<u64>()) {
        let c = random_coeffs(4, seed);
        let rule = sphere_quadrature(3);
        let vals = sample(&c, &rule);
        for (node, v) in rule.nodes.iter().zip(&vals).step_by(7) {
            let mut want = vslepian::TangentVector3::new(0.0, 0.0, 0.0);
            for (block, l, m, x) in c.entries() {
                let f = match block {
                    Block::U => eval_p(l, m, node).unwrap(),
                    Block::V => eval_b(l, m, node).unwrap(),
                    Block::W => eval_c(l, m, node).unwrap(),
                };
                want = want + f * x;
            }
            prop_assert!((want - *v).norm() < 1e-12);
        }
    }
}
