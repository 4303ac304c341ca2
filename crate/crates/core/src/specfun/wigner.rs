//! Wigner 3-j symbols by the Racah formula and the Gaunt expansion of a
//! product of two normalized Legendre functions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use super::legendre::ldexp;
use crate::error::Result;

/// Largest degree handled by the floating-point Racah sum; above this the
/// alternating series is summed exactly in big integers.
pub const FLOAT_RACAH_MAX_DEGREE: u32 = 50;

/// Arguments of a 3-j symbol `(l1 l2 l3; m1 m2 m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wigner3jArgs {
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl Wigner3jArgs {
    pub fn new(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Wigner3jArgs {
            l1,
            l2,
            l3,
            m1,
            m2,
            m3,
        }
    }

    /// Selection rules: zero projection sum, `|m_i| ≤ l_i`, triangle.
    pub fn is_allowed(&self) -> bool {
        let (l1, l2, l3) = (self.l1 as i64, self.l2 as i64, self.l3 as i64);
        let (m1, m2, m3) = (self.m1 as i64, self.m2 as i64, self.m3 as i64);
        if m1 + m2 + m3 != 0 {
            return false;
        }
        if m1.abs() > l1 || m2.abs() > l2 || m3.abs() > l3 {
            return false;
        }
        if l3 < (l1 - l2).abs() || l3 > l1 + l2 {
            return false;
        }
        !(m1 == 0 && m2 == 0 && m3 == 0 && (l1 + l2 + l3) % 2 == 1)
    }

    fn max_degree(&self) -> u32 {
        self.l1.max(self.l2).max(self.l3)
    }
}

/// Integer pieces of the Racah formula shared by both evaluation paths.
struct Racah {
    /// Factorial arguments of `Δ(l1 l2 l3) · Π (l_i ± m_i)!` in the numerator.
    num: [u64; 9],
    /// `(l1 + l2 + l3 + 1)!` in the denominator.
    den: u64,
    kmin: i64,
    kmax: i64,
    // Factorial arguments in the k-th denominator are a_i + s_i k.
    a: [i64; 6],
    s: [i64; 6],
    phase_odd: bool,
}

impl Racah {
    fn new(w: &Wigner3jArgs) -> Self {
        let (j1, j2, j3) = (w.l1 as i64, w.l2 as i64, w.l3 as i64);
        let (m1, m2, m3) = (w.m1 as i64, w.m2 as i64, w.m3 as i64);
        let num = [
            (j1 + j2 - j3) as u64,
            (j1 - j2 + j3) as u64,
            (-j1 + j2 + j3) as u64,
            (j1 + m1) as u64,
            (j1 - m1) as u64,
            (j2 + m2) as u64,
            (j2 - m2) as u64,
            (j3 + m3) as u64,
            (j3 - m3) as u64,
        ];
        let den = (j1 + j2 + j3 + 1) as u64;
        // k!, (j3-j2+m1+k)!, (j3-j1-m2+k)!, (j1+j2-j3-k)!, (j1-m1-k)!, (j2+m2-k)!
        let a = [0, j3 - j2 + m1, j3 - j1 - m2, j1 + j2 - j3, j1 - m1, j2 + m2];
        let s = [1, 1, 1, -1, -1, -1];
        let kmin = 0.max(-a[1]).max(-a[2]);
        let kmax = a[3].min(a[4]).min(a[5]);
        Racah {
            num,
            den,
            kmin,
            kmax,
            a,
            s,
            phase_odd: (j1 - j2 - m3).rem_euclid(2) == 1,
        }
    }

    fn arg(&self, i: usize, k: i64) -> u64 {
        (self.a[i] + self.s[i] * k) as u64
    }
}

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = 4 * FLOAT_RACAH_MAX_DEGREE as usize + 8;
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0f64;
        for k in 0..n {
            if k > 1 {
                acc += (k as f64).ln();
            }
            out.push(acc);
        }
        out
    })
}

/// Double-double value `hi + lo`.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.0, o.0);
        quick_two_sum(s, e + self.1 + o.1)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.0 * b;
        let e = self.0.mul_add(b, -p) + self.1 * b;
        quick_two_sum(p, e)
    }

    fn div_f(self, b: f64) -> Dd {
        let q1 = self.0 / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let (s, e) = two_sum(self.0, -p);
        let q2 = (s + (e - pe + self.1)) / b;
        quick_two_sum(q1, q2)
    }
}

fn wigner3j_float(r: &Racah) -> f64 {
    let lf = ln_factorials();
    let mut ln_pre = -lf[r.den as usize];
    for &n in &r.num {
        ln_pre += lf[n as usize];
    }
    ln_pre *= 0.5;
    let mut ln_first = 0.0;
    for i in 0..6 {
        ln_first += lf[r.arg(i, r.kmin) as usize];
    }

    // Sum t_k / t_kmin with the exact integer term ratio, in double-double.
    let mut ratio = Dd(1.0, 0.0);
    let mut sum = Dd(0.0, 0.0);
    let mut k = r.kmin;
    loop {
        sum = sum.add(ratio);
        if k == r.kmax {
            break;
        }
        let up = (r.arg(3, k) * r.arg(4, k) * r.arg(5, k)) as f64;
        let down = (r.arg(0, k + 1) * r.arg(1, k + 1) * r.arg(2, k + 1)) as f64;
        ratio = ratio.mul_f(-up).div_f(down);
        k += 1;
    }
    let mut v = (sum.0 + sum.1) * (ln_pre - ln_first).exp();
    if r.kmin % 2 != 0 {
        v = -v;
    }
    if r.phase_odd {
        v = -v;
    }
    v
}

fn factorials_big(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = BigUint::one();
    out.push(f.clone());
    for k in 1..=n {
        f *= BigUint::from(k);
        out.push(f.clone());
    }
    out
}

/// `num / den` as f64 with full relative precision.
pub(crate) fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64i64 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let qbits = q.bits() as i64;
    // Keep 64 significant bits of the quotient; f64 rounding does the rest.
    let drop = (qbits - 64).max(0);
    let top = (&q >> drop as usize).iter_u64_digits().next().unwrap_or(0);
    ldexp(top as f64, (drop - shift) as i32)
}

fn wigner3j_exact(r: &Racah) -> f64 {
    let fact = factorials_big(r.den as usize);
    // Common denominator: each factorial slot at its largest argument.
    let mut common = BigUint::one();
    for i in 0..6 {
        let kk = if r.s[i] > 0 { r.kmax } else { r.kmin };
        common *= &fact[r.arg(i, kk) as usize];
    }
    let mut total = BigInt::zero();
    for k in r.kmin..=r.kmax {
        let mut dk = BigUint::one();
        for i in 0..6 {
            dk *= &fact[r.arg(i, k) as usize];
        }
        let term = BigInt::from_biguint(Sign::Plus, &common / dk);
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    if total.is_zero() {
        return 0.0;
    }
    let negative = total.sign() == Sign::Minus;
    let t = total.magnitude();
    // value² = Π num! · T² / ((l1+l2+l3+1)! · C²)
    let mut n2 = t * t;
    for &n in &r.num {
        n2 *= &fact[n as usize];
    }
    let d2 = &fact[r.den as usize] * &common * &common;
    let mut v = big_ratio_f64(&n2, &d2).sqrt();
    if negative {
        v = -v;
    }
    if r.phase_odd {
        v = -v;
    }
    v
}

/// Wigner 3-j symbol; exactly zero whenever a selection rule fails.
pub fn wigner3j(args: Wigner3jArgs) -> f64 {
    if !args.is_allowed() {
        return 0.0;
    }
    let r = Racah::new(&args);
    if args.max_degree() <= FLOAT_RACAH_MAX_DEGREE {
        wigner3j_float(&r)
    } else {
        wigner3j_exact(&r)
    }
}

/// Big-integer evaluation regardless of degree.
pub fn wigner3j_exact_path(args: Wigner3jArgs) -> f64 {
    if !args.is_allowed() {
        return 0.0;
    }
    wigner3j_exact(&Racah::new(&args))
}

/// Coefficients `c_n` with `X_lm X_l'm' = Σ_n c_n X_{n, m+m'}`.
///
/// Only parity-allowed, nonzero terms are returned, in increasing `n`.
pub fn gaunt_expand(l: usize, m: i32, l2: usize, m2: i32) -> Result<Vec<(usize, f64)>> {
    if m.unsigned_abs() as usize > l || m2.unsigned_abs() as usize > l2 {
        return Err(crate::Error::domain(format!(
            "invalid degree/order pair ({l},{m}) or ({l2},{m2})"
        )));
    }
    Ok(gaunt_terms(l, m, l2, m2))
}

pub(crate) fn gaunt_terms(l: usize, m: i32, l2: usize, m2: i32) -> Vec<(usize, f64)> {
    let mm = m + m2;
    let lo = l.abs_diff(l2).max(mm.unsigned_abs() as usize);
    let hi = l + l2;
    let sign = if (m + m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let base = ((2 * l + 1) * (2 * l2 + 1)) as f64 / (4.0 * PI);
    let mut out = Vec::new();
    for n in lo..=hi {
        if (l + n + l2) % 2 == 1 {
            continue;
        }
        let a = wigner3j(Wigner3jArgs::new(l as u32, n as u32, l2 as u32, 0, 0, 0));
        if a == 0.0 {
            continue;
        }
        let b = wigner3j(Wigner3jArgs::new(l as u32, n as u32, l2 as u32, m, -mm, m2));
        if b == 0.0 {
            continue;
        }
        out.push((n, sign * (base * (2 * n + 1) as f64).sqrt() * a * b));
    }
    out
}
