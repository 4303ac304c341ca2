//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Wigner 3-j from the Racah formula in exact rational arithmetic.
pub fn racah_exact(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0
        || l3 < (l1 - l2).abs()
        || l3 > l1 + l2
        || m1.abs() > l1
        || m2.abs() > l2
        || m3.abs() > l3
    {
        return 0.0;
    }
    let f = |n: i64| BigRational::from_integer(factorial(n));
    let delta = f(l1 + l2 - l3) * f(l1 - l2 + l3) * f(-l1 + l2 + l3) / f(l1 + l2 + l3 + 1);
    let pre = delta
        * f(l1 + m1)
        * f(l1 - m1)
        * f(l2 + m2)
        * f(l2 - m2)
        * f(l3 + m3)
        * f(l3 - m3);
    let kmin = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let kmax = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = f(k) * f(l3 - l2 + k + m1) * f(l3 - l1 + k - m2) * f(l1 + l2 - l3 - k) * f(l1 - k - m1) * f(l2 - k + m2);
        let term = BigRational::one() / den;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let mag = (sum.clone() * sum.clone() * pre).to_f64().unwrap().sqrt();
    let phase = if (l1 - l2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if sum.is_negative() {
        -phase * mag
    } else {
        phase * mag
    }
}

/// `X_lm(θ)` from the Rodrigues formula, `m ≥ 0`, with the Condon-Shortley phase.
pub fn xlm_rodrigues(l: usize, m: usize, theta: f64) -> f64 {
    // (x² − 1)^l as exact integer coefficients, then l + m derivatives.
    let mut c: Vec<BigInt> = vec![BigInt::zero(); 2 * l + 1];
    for k in 0..=l {
        let b = factorial(l as i64) / (factorial(k as i64) * factorial((l - k) as i64));
        c[2 * k] = if (l - k).is_multiple_of(2) { b } else { -b };
    }
    for _ in 0..l + m {
        c = (1..c.len()).map(|i| &c[i] * BigInt::from(i)).collect();
    }
    let x = theta.cos();
    let poly = c.iter().rev().fold(0.0, |acc, a| acc * x + a.to_f64().unwrap());
    let scale = (factorial((l - m) as i64).to_f64().unwrap() / factorial((l + m) as i64).to_f64().unwrap()).sqrt()
        / (2f64.powi(l as i32) * factorial(l as i64).to_f64().unwrap());
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * scale * theta.sin().powi(m as i32) * poly
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Symmetric eigenvalues in ascending order.
pub fn spectrum(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
