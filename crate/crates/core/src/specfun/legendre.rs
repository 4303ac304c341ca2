//! Unit-normalized associated Legendre functions `X_lm(θ)` with the
//! Condon–Shortley phase, their θ-derivatives and the pole-safe quotient
//! `m X_lm / sin θ`.
//!
//! Normalization: `2π ∫₀^π X_lm X_l'm sin θ dθ = δ_ll'`, so that
//! `X_00 = 1/(2√π)` and `X_11 = -(1/2)√(3/2π) sin θ`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sectoral seeds are carried as `mantissa · 2^exponent` so that
/// `sin^m θ` never underflows before the degree recursion has run.
const RESCALE_BITS: i32 = 256;

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("colatitude {theta} outside [0, π]")));
    }
    Ok(())
}

fn check_degree_order(l: usize, m: i32) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::domain(format!("order {m} exceeds degree {l}")));
    }
    Ok(())
}

/// Split a positive finite `x` into `(mantissa, exponent)` with the
/// mantissa in `[1, 2)`.
fn split_pow2(x: f64) -> (f64, i32) {
    debug_assert!(x > 0.0 && x.is_finite());
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let mant = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (mant, exp + bias)
}

/// `x · 2^e` without intermediate underflow.
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return 0.0;
        }
    }
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    x * 2f64.powi(e)
}

/// `X_lm(θ)` for fixed `m ≥ 0` and `l = m..=lmax`, indexed by `l - m`.
pub(crate) fn column(m: usize, lmax: usize, theta: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let (s, c) = theta.sin_cos();
    let s = s.abs();
    let mut out = vec![0.0; lmax - m + 1];

    // Sectoral seed X_mm = (-1)^m √((2m+1)!!/(2m)!!) · X_00 · sin^m θ.
    let mut seed = 0.5 / PI.sqrt();
    let mut exp = 0i32;
    if m > 0 {
        if s == 0.0 {
            return out;
        }
        let (sm, se) = split_pow2(s);
        for k in 1..=m {
            let k = k as f64;
            seed *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sm;
            exp += se;
            if seed.abs() < 2f64.powi(-RESCALE_BITS) {
                seed *= 2f64.powi(RESCALE_BITS);
                exp -= RESCALE_BITS;
            }
        }
    }

    // Degree recursion on the scaled values; linear, so the scale factors out.
    let mut prev2 = 0.0;
    let mut prev = seed;
    out[0] = prev;
    if lmax > m {
        let cur = (2.0 * m as f64 + 3.0).sqrt() * c * prev;
        out[1] = cur;
        prev2 = prev;
        prev = cur;
    }
    let mf = m as f64;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let cur = a * (c * prev - b * prev2);
        out[l - m] = cur;
        prev2 = prev;
        prev = cur;
    }
    if exp != 0 {
        for v in &mut out {
            *v = ldexp(*v, exp);
        }
    }
    out
}

/// All `X_lm(θ)` for `0 ≤ m ≤ l ≤ lmax` at a single colatitude, with the
/// derived derivative and quotient recursions.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    lmax: usize,
    theta: f64,
    values: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl LegendreTable {
    pub fn new(lmax: usize, theta: f64) -> Self {
        let mut values = vec![0.0; tri(lmax, lmax) + 1];
        for m in 0..=lmax {
            for (i, v) in column(m, lmax, theta).into_iter().enumerate() {
                values[tri(m + i, m)] = v;
            }
        }
        LegendreTable {
            lmax,
            theta,
            values,
        }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `X_lm` for `m ≥ 0`; zero outside `0 ≤ m ≤ l ≤ lmax`.
    #[inline]
    pub fn x(&self, l: usize, m: usize) -> f64 {
        if m > l || l > self.lmax {
            0.0
        } else {
            self.values[tri(l, m)]
        }
    }

    /// `dX_lm/dθ` for `m ≥ 0` via `X'_lm = a⁻ X_l,m-1 + a⁺ X_l,m+1`.
    ///
    /// At `m = 0` the lowered term uses `X_l,-1 = -X_l1`, which gives the
    /// exact `X'_l0 = √(l(l+1)) X_l1`.
    #[inline]
    pub fn dtheta(&self, l: usize, m: usize) -> f64 {
        let (lf, mf) = (l as f64, m as f64);
        let a_minus = -((lf + mf) * (lf - mf + 1.0)).sqrt() / 2.0;
        let a_plus = ((lf - mf) * (lf + mf + 1.0)).sqrt() / 2.0;
        let lowered = if m == 0 { -self.x(l, 1) } else { self.x(l, m - 1) };
        a_minus * lowered + a_plus * self.x(l, m + 1)
    }

    /// `m X_lm / sin θ` for `m ≥ 1`, finite at both poles.
    #[inline]
    pub fn over_sin(&self, l: usize, m: usize) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let (lf, mf) = (l as f64, m as f64);
        let pre = -((2.0 * lf + 1.0) / (2.0 * lf - 1.0)).sqrt() / 2.0;
        let b_minus = pre * ((lf + mf) * (lf + mf - 1.0)).sqrt();
        let b_plus = pre * ((lf - mf) * (lf - mf - 1.0)).max(0.0).sqrt();
        b_minus * self.x(l - 1, m - 1) + b_plus * self.x(l - 1, m + 1)
    }
}

/// Normalized associated Legendre function `X_lm(θ)`; negative orders
/// follow `X_l,-m = (-1)^m X_lm`.
pub fn xlm(l: usize, m: i32, theta: f64) -> Result<f64> {
    check_degree_order(l, m)?;
    check_theta(theta)?;
    let am = m.unsigned_abs() as usize;
    let v = column(am, l, theta)[l - am];
    Ok(if m < 0 && am % 2 == 1 { -v } else { v })
}

/// `dX_lm/dθ`.
pub fn xlm_dtheta(l: usize, m: i32, theta: f64) -> Result<f64> {
    check_degree_order(l, m)?;
    check_theta(theta)?;
    let am = m.unsigned_abs() as usize;
    let table = LegendreTable::new(l, theta);
    let v = table.dtheta(l, am);
    Ok(if m < 0 && am % 2 == 1 { -v } else { v })
}

/// `m X_lm(θ) / sin θ` for `1 ≤ m ≤ l`, evaluated without dividing by `sin θ`.
pub fn xlm_over_sin(l: usize, m: i32, theta: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::domain(format!("m X_lm / sin θ needs m ≥ 1, got {m}")));
    }
    check_degree_order(l, m)?;
    check_theta(theta)?;
    let table = LegendreTable::new(l, theta);
    Ok(table.over_sin(l, m as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Closed-form `X_lm` from the Rodrigues representation, small l only.
    fn rodrigues(l: usize, m: usize, theta: f64) -> f64 {
        let mu = theta.cos();
        // (d/dμ)^(l+m) (μ² - 1)^l via binomial expansion.
        let mut deriv = 0.0;
        for k in 0..=l {
            let power = 2 * k;
            if power < l + m {
                continue;
            }
            let binom = factorial(l as u64) / (factorial(k as u64) * factorial((l - k) as u64));
            let sign = if (l - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            let falling = factorial(power as u64) / factorial((power - l - m) as u64);
            deriv += sign * binom * falling * mu.powi((power - l - m) as i32);
        }
        let plm = (1.0 - mu * mu).powf(m as f64 / 2.0) * deriv
            / (2f64.powi(l as i32) * factorial(l as u64));
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
            * (factorial((l - m) as u64) / factorial((l + m) as u64)).sqrt()
            * plm
    }

    #[test]
    fn starting_values() {
        for &t in &[0.0, 0.4, 1.3, PI] {
            assert!((xlm(0, 0, t).unwrap() - 0.282_094_791_773_878_14).abs() < 1e-15);
        }
        assert!(xlm(1, 0, PI / 2.0).unwrap().abs() < 1e-16);
        assert!((xlm(1, 1, PI / 2.0).unwrap() + 0.345_494_149_471_335_5).abs() < 1e-15);
    }

    #[test]
    fn matches_rodrigues_for_small_degrees() {
        for l in 0..=10 {
            for m in 0..=l {
                for &t in &[0.1, 0.7, 1.9, 3.0] {
                    let a = xlm(l, m as i32, t).unwrap();
                    let b = rodrigues(l, m, t);
                    assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "l={l} m={m} t={t}: {a} vs {b}");
                }
            }
        }
        // Sign convention check at (3, 2).
        let a = xlm(3, 2, 0.8).unwrap();
        let b = rodrigues(3, 2, 0.8);
        assert!(a.signum() == b.signum() && (a - b).abs() < 1e-14);
    }

    #[test]
    fn negative_order_symmetry() {
        for l in 0..12 {
            for m in 1..=l as i32 {
                let p = xlm(l, m, 0.9).unwrap();
                let n = xlm(l, -m, 0.9).unwrap();
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(n, s * p);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(xlm(2, 3, 0.1).is_err());
        assert!(xlm(2, 1, -0.1).is_err());
        assert!(xlm(2, 1, 3.5).is_err());
        assert!(xlm_over_sin(2, 0, 0.3).is_err());
        assert!(xlm_dtheta(1, 2, 0.3).is_err());
    }

    #[test]
    fn high_degree_is_finite_near_poles() {
        for &t in &[1e-9, 1e-3, 0.05, PI - 1e-6] {
            let table = LegendreTable::new(150, t);
            for l in 0..=150 {
                for m in 0..=l {
                    assert!(table.x(l, m).is_finite());
                }
            }
        }
        // Sectoral values at tiny colatitude underflow gracefully to zero.
        assert_eq!(xlm(150, 150, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn split_and_ldexp_roundtrip() {
        for &x in &[1.0, 0.3, 1e-300, 5e-320, 7.5e200] {
            let (mant, e) = split_pow2(x);
            assert!((1.0..2.0).contains(&mant));
            assert_eq!(ldexp(mant, e), x);
        }
    }
}
