mod common;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::RngExt;

use vslepian::region::Ring;
use vslepian::spectral::solve_polarcap_blocks;
use vslepian::{
    assemble_polarcap, assemble_quadrature, merge_fixed_order, polar_cap_basis, shannon, solve, sphere_quadrature, weighted_energy,
    KernelKind, KernelMatrix, Part, Region, ShannonReport, SpherePoint,
};

use common::{max_abs_diff, rng};

fn kernel_from(m: DMatrix<f64>, l_max: usize) -> KernelMatrix {
    KernelMatrix::new(KernelKind::P, l_max, m, "test".into()).unwrap()
}

/// `V diag(λ) Vᵀ` with a random orthogonal `V`.
fn random_kernel(lambdas: &[f64], seed: u64) -> DMatrix<f64> {
    let n = lambdas.len();
    let mut r = rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    let q = a.qr().q();
    &q * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambdas)) * q.transpose()
}

#[test]
fn two_by_two_toy() {
    let mut m = DMatrix::<f64>::zeros(4, 4);
    m[(0, 0)] = 0.7;
    m[(0, 1)] = 0.1;
    m[(1, 0)] = 0.1;
    m[(1, 1)] = 0.3;
    m[(2, 2)] = 0.0;
    m[(3, 3)] = 0.0;
    let b = solve(&kernel_from(m, 1)).unwrap();
    let r = 0.05f64.sqrt();
    assert!((b.lambdas[0] - (0.5 + r)).abs() < 1e-14);
    assert!((b.lambdas[1] - (0.5 - r)).abs() < 1e-14);
}

#[test]
fn identity_kernel_gives_unit_spectrum() {
    let b = solve(&kernel_from(DMatrix::identity(9, 9), 2)).unwrap();
    assert!(b.lambdas.iter().all(|&l| l == 1.0));
}

#[test]
fn merged_spectrum_equals_dense_spectrum() {
    let theta = 0.5;
    let cap = assemble_polarcap(theta, 8).unwrap();
    for part in [Part::Radial, Part::Tangential, Part::Full] {
        let merged = merge_fixed_order(&solve_polarcap_blocks(&cap, part).unwrap()).unwrap();
        let dense = solve(&cap.dense(part)).unwrap();
        assert_eq!(merged.len(), part.dim(8));
        assert!(max_abs_diff(&merged.lambdas, &dense.lambdas) < 1e-8);
        // Columns of the merged basis are eigenvectors of the dense kernel.
        let k = cap.dense(part).matrix;
        let res = (&k * &merged.vectors - &merged.vectors * DMatrix::from_diagonal(&merged.lambdas.clone().into())).amax();
        assert!(res < 1e-10);
    }
}

#[test]
fn forty_degree_cap_counts() {
    let b = polar_cap_basis(40f64.to_radians(), 18, Part::Tangential).unwrap();
    assert_eq!(b.len(), 720);
    assert!(b.lambdas[0] > 0.9 && b.lambdas[0] < 1.0);
    let half = b.lambdas.iter().filter(|&&l| l >= 0.5).count() as i64;
    assert!((half - 84).abs() <= 1);
    assert!(b.lambdas.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn shannon_reports_agree() {
    let theta = 0.6;
    let cap = assemble_polarcap(theta, 7).unwrap();
    let from_cap = ShannonReport::from_polarcap(&cap);
    let from_kernel = shannon(&cap.dense(Part::Full));
    let predicted = ShannonReport::predicted(2.0 * PI * (1.0 - theta.cos()), 7);
    for r in [&from_cap, &from_kernel] {
        assert!((r.total - r.radial - r.tangential).abs() < 1e-9);
        assert!((r.radial - predicted.radial).abs() < 1e-10);
        assert!((r.tangential - predicted.tangential).abs() < 1e-10);
    }
    let basis = solve(&cap.dense(Part::Full)).unwrap();
    let from_basis = ShannonReport::from_basis(&basis);
    assert!((from_basis.total - predicted.total).abs() < 1e-9);
    assert!((from_basis.radial - predicted.radial).abs() < 1e-9);
    let sum: f64 = from_cap.radial_by_order.iter().enumerate().map(|(m, x)| if m == 0 { *x } else { 2.0 * x }).sum();
    assert!((sum - from_cap.radial).abs() < 1e-12);
}

#[test]
fn weighted_energy_separates_inside_and_outside() {
    let ring = Ring::from_degrees(&[(0.0, 0.0), (60.0, 0.0), (60.0, 50.0), (0.0, 50.0)]).unwrap();
    let region = Region::polygons(vec![ring]).unwrap();
    let basis = solve(&assemble_quadrature(&region, 10, Part::Full).unwrap()).unwrap();
    let inside = weighted_energy(&basis, &SpherePoint::from_lat_lon_deg(25.0, 30.0).unwrap()).unwrap();
    let outside = weighted_energy(&basis, &SpherePoint::from_lat_lon_deg(-50.0, 200.0).unwrap()).unwrap();
    let n_over_a = ShannonReport::from_basis(&basis).total / region.area().unwrap();
    assert!(inside > 0.8 * n_over_a && outside < 2e-2 * n_over_a, "{inside} {outside} {n_over_a}");
    let rule = sphere_quadrature(10);
    let total = rule.integrate(|p| weighted_energy(&basis, p).unwrap());
    let sum: f64 = basis.lambdas.iter().sum();
    assert!((total - sum).abs() < 1e-10);
}

#[test]
fn fixed_order_basis_refuses_field_access() {
    let cap = assemble_polarcap(0.5, 4).unwrap();
    let blocks = solve_polarcap_blocks(&cap, Part::Radial).unwrap();
    assert!(blocks[1].coeffs(0).is_err());
    assert_eq!(blocks[1].orders[0], 1);
}

#[test]
fn out_of_range_kernel_is_refused() {
    let m = random_kernel(&[1.2, 0.5, 0.1, 0.0], 7);
    assert!(solve(&kernel_from(m, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn solve_recovers_random_spectra(seed in any::<u64>(), lams in proptest::collection::vec(0.0f64..1.0, 9)) {
        let m = random_kernel(&lams, seed);
        let k = kernel_from(m.clone(), 2);
        let b = solve(&k).unwrap();
        let mut want = lams.clone();
        want.sort_by(|a, b| b.total_cmp(a));
        prop_assert!(max_abs_diff(&b.lambdas, &want) < 1e-12);
        let g = &b.vectors;
        prop_assert!((g.tr_mul(g) - DMatrix::<f64>::identity(9, 9)).amax() < 1e-12);
        prop_assert!((g.tr_mul(&(&k.matrix * g)) - DMatrix::from_diagonal(&b.lambdas.clone().into())).amax() < 1e-12);
        for j in 0..9 {
            let first = g.column(j).iter().copied().find(|x| x.abs() > 1e-9).unwrap();
            prop_assert!(first > 0.0);
        }
    }

    #[test]
    fn solve_is_deterministic(seed in any::<u64>()) {
        let m = random_kernel(&[0.9, 0.9, 0.5, 0.3, 0.3, 0.2, 0.1, 0.05, 0.0], seed);
        let a = solve(&kernel_from(m.clone(), 2)).unwrap();
        let b = solve(&kernel_from(m, 2)).unwrap();
        prop_assert_eq!(a, b);
    }
}
