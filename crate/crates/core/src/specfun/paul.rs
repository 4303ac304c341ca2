//! Cap integrals `I_lm(Θ) = ∫₀^Θ X_lm(θ) sin θ dθ` by exact recursion.

use std::f64::consts::PI;

use super::legendre::LegendreTable;
use crate::error::{Error, Result};

/// Table of `I_lm(Θ)` for `0 ≤ m ≤ l ≤ lmax`.
#[derive(Debug, Clone)]
pub struct PaulTable {
    lmax: usize,
    values: Vec<f64>,
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl PaulTable {
    pub fn new(lmax: usize, cap: f64) -> Self {
        let mut values = vec![0.0; tri(lmax, lmax) + 1];
        let x = LegendreTable::new(lmax.max(1), cap);
        let (s, c) = cap.sin_cos();
        let s2 = s * s;
        let rpi = PI.sqrt();

        values[tri(0, 0)] = (1.0 - c) / (2.0 * rpi);
        if lmax >= 1 {
            values[tri(1, 0)] = 0.25 * (3.0 / PI).sqrt() * s2;
            // Direct integration of -(1/2)√(3/2π) sin²θ.
            values[tri(1, 1)] = -0.25 * (3.0 / (2.0 * PI)).sqrt() * (cap - (2.0 * cap).sin() / 2.0);
        }
        for l in 2..=lmax {
            let lf = l as f64;
            for m in 0..l {
                let mf = m as f64;
                let mut v = (1.0 / (lf + 1.0))
                    * ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt()
                    * s2
                    * x.x(l - 1, m);
                if m + 2 <= l {
                    let num = (2.0 * lf + 1.0) * ((lf - 1.0).powi(2) - mf * mf);
                    let den = (2.0 * lf - 3.0) * (lf * lf - mf * mf);
                    v += (lf - 2.0) / (lf + 1.0) * (num / den).sqrt() * values[tri(l - 2, m)];
                }
                values[tri(l, m)] = v;
            }
            values[tri(l, l)] = (1.0 / (lf + 1.0))
                * ((2.0 * lf + 1.0) / (4.0 * lf * lf - 4.0 * lf)).sqrt()
                * (lf * (2.0 * lf - 1.0).sqrt() * values[tri(l - 2, l - 2)]
                    - s2 * x.x(l - 1, l - 2));
        }
        PaulTable { lmax, values }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `I_lm`; zero for `m > l`.
    #[inline]
    pub fn get(&self, l: usize, m: usize) -> f64 {
        if m > l {
            0.0
        } else {
            self.values[tri(l, m)]
        }
    }
}

/// `∫₀^Θ X_lm(θ) sin θ dθ` for `0 ≤ m ≤ l`, `0 ≤ Θ ≤ π`.
pub fn paul_integral(l: usize, m: i32, cap: f64) -> Result<f64> {
    if m < 0 || m as usize > l {
        return Err(Error::domain(format!("Paul integral needs 0 ≤ m ≤ l, got l={l} m={m}")));
    }
    if !(0.0..=PI).contains(&cap) {
        return Err(Error::domain(format!("cap radius {cap} outside [0, π]")));
    }
    Ok(PaulTable::new(l, cap).get(l, m as usize))
}
