//! Real vector spherical harmonics and coefficient-space fields.
//!
//! ```text
//! P_lm = r̂ Y_lm
//! B_lm = [θ̂ ∂θ + φ̂ (sin θ)⁻¹ ∂φ] Y_lm / √(l(l+1))
//! C_lm = [θ̂ (sin θ)⁻¹ ∂φ − φ̂ ∂θ] Y_lm / √(l(l+1))
//! ```
//!
//! with `Y_lm = √2 X_l|m| cos|m|φ` for `m < 0`, `X_l0` for `m = 0` and
//! `√2 X_lm sin mφ` for `m > 0`.

use std::f64::consts::{PI, SQRT_2};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::region::QuadratureRule;
use crate::specfun::LegendreTable;

/// Colatitude clamp used when a synthesis grid touches a pole and the
/// field carries order `|m| = 1` tangential terms.
pub const POLE_CLAMP: f64 = 1e-7;

/// A point on the unit sphere: colatitude `θ ∈ [0, π]`, longitude `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    /// Validates the colatitude and wraps the longitude into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::domain(format!("invalid sphere point ({theta}, {phi})")));
        }
        Ok(SpherePoint {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn from_lat_lon_deg(lat: f64, lon: f64) -> Result<Self> {
        Self::new((90.0 - lat).to_radians(), lon.to_radians())
    }

    pub fn lat_deg(&self) -> f64 {
        90.0 - self.theta.to_degrees()
    }

    pub fn lon_deg(&self) -> f64 {
        self.phi.to_degrees()
    }

    pub fn is_pole(&self) -> bool {
        self.theta == 0.0 || self.theta == PI
    }
}

/// A vector in the local `(r̂, θ̂, φ̂)` frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVector3 {
    pub r: f64,
    pub t: f64,
    pub p: f64,
}

impl TangentVector3 {
    pub const ZERO: TangentVector3 = TangentVector3 {
        r: 0.0,
        t: 0.0,
        p: 0.0,
    };

    pub fn new(r: f64, t: f64, p: f64) -> Self {
        TangentVector3 { r, t, p }
    }

    pub fn dot(&self, o: &TangentVector3) -> f64 {
        self.r * o.r + self.t * o.t + self.p * o.p
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

impl Add for TangentVector3 {
    type Output = TangentVector3;
    fn add(self, o: Self) -> Self {
        TangentVector3::new(self.r + o.r, self.t + o.t, self.p + o.p)
    }
}

impl Sub for TangentVector3 {
    type Output = TangentVector3;
    fn sub(self, o: Self) -> Self {
        TangentVector3::new(self.r - o.r, self.t - o.t, self.p - o.p)
    }
}

impl Mul<f64> for TangentVector3 {
    type Output = TangentVector3;
    fn mul(self, s: f64) -> Self {
        TangentVector3::new(self.r * s, self.t * s, self.p * s)
    }
}

/// Coefficient block tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    U,
    V,
    W,
}

impl Block {
    pub fn as_str(&self) -> &'static str {
        match self {
            Block::U => "U",
            Block::V => "V",
            Block::W => "W",
        }
    }
}

/// Which part of coefficient space a matrix or basis acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    /// `U` block only, `(L+1)²` entries.
    Radial,
    /// `V` and `W` blocks, `2(L+1)² − 2` entries.
    Tangential,
    /// `[U; V; W]`, `3(L+1)² − 2` entries.
    Full,
}

impl Part {
    pub fn dim(&self, l_max: usize) -> usize {
        let n = (l_max + 1) * (l_max + 1);
        match self {
            Part::Radial => n,
            Part::Tangential => 2 * (n - 1),
            Part::Full => 3 * n - 2,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Part::Radial => "radial",
            Part::Tangential => "tangential",
            Part::Full => "full",
        }
    }

    /// Offsets of the `U`, `V`, `W` blocks inside a vector of this part.
    pub(crate) fn offsets(&self, l_max: usize) -> (Option<usize>, Option<usize>, Option<usize>) {
        let n = (l_max + 1) * (l_max + 1);
        match self {
            Part::Radial => (Some(0), None, None),
            Part::Tangential => (None, Some(0), Some(n - 1)),
            Part::Full => (Some(0), Some(n), Some(2 * n - 1)),
        }
    }
}

impl std::str::FromStr for Part {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" | "P" => Ok(Part::Radial),
            "tangential" | "Q" => Ok(Part::Tangential),
            "full" | "K" => Ok(Part::Full),
            _ => Err(Error::domain(format!("unknown part '{s}'"))),
        }
    }
}

/// Index of `(l, m)` in the `U` block: degree-major, order ascending.
#[inline]
pub fn u_index(l: usize, m: i32) -> usize {
    ((l * l + l) as isize + m as isize) as usize
}

/// Index of `(l, m)`, `l ≥ 1`, in the `V` or `W` block.
#[inline]
pub fn vw_index(l: usize, m: i32) -> usize {
    u_index(l, m) - 1
}

/// Vector spherical-harmonic coefficients `[U; V; W]` up to bandlimit `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    l_max: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
}

impl CoeffVector {
    pub fn zeros(l_max: usize) -> Self {
        let n = (l_max + 1) * (l_max + 1);
        CoeffVector {
            l_max,
            u: vec![0.0; n],
            v: vec![0.0; n - 1],
            w: vec![0.0; n - 1],
        }
    }

    pub fn from_blocks(l_max: usize, u: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let n = (l_max + 1) * (l_max + 1);
        if u.len() != n || v.len() != n - 1 || w.len() != n - 1 {
            return Err(Error::domain(format!(
                "block lengths ({}, {}, {}) do not match bandlimit {l_max}",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        Ok(CoeffVector { l_max, u, v, w })
    }

    /// Builds from a vector laid out as `part`; other blocks are zero.
    pub fn from_part_slice(l_max: usize, part: Part, data: &[f64]) -> Result<Self> {
        if data.len() != part.dim(l_max) {
            return Err(Error::domain(format!(
                "{} vector of length {} does not match bandlimit {l_max}",
                part.as_str(),
                data.len()
            )));
        }
        let mut out = CoeffVector::zeros(l_max);
        let (ou, ov, ow) = part.offsets(l_max);
        let n = out.u.len();
        if let Some(o) = ou {
            out.u.copy_from_slice(&data[o..o + n]);
        }
        if let Some(o) = ov {
            out.v.copy_from_slice(&data[o..o + n - 1]);
        }
        if let Some(o) = ow {
            out.w.copy_from_slice(&data[o..o + n - 1]);
        }
        Ok(out)
    }

    /// The `part` projection as a flat vector.
    pub fn to_part_vec(&self, part: Part) -> Vec<f64> {
        match part {
            Part::Radial => self.u.clone(),
            Part::Tangential => [self.v.as_slice(), self.w.as_slice()].concat(),
            Part::Full => self.concat(),
        }
    }

    /// `[U; V; W]`, length `3(L+1)² − 2`.
    pub fn concat(&self) -> Vec<f64> {
        [self.u.as_slice(), self.v.as_slice(), self.w.as_slice()].concat()
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn u_mut(&mut self) -> &mut [f64] {
        &mut self.u
    }

    pub fn v_mut(&mut self) -> &mut [f64] {
        &mut self.v
    }

    pub fn w_mut(&mut self) -> &mut [f64] {
        &mut self.w
    }

    fn check(&self, block: Block, l: usize, m: i32) -> Result<()> {
        let lmin = if block == Block::U { 0 } else { 1 };
        if l < lmin || l > self.l_max || m.unsigned_abs() as usize > l {
            return Err(Error::domain(format!(
                "({}, {l}, {m}) outside bandlimit {}",
                block.as_str(),
                self.l_max
            )));
        }
        Ok(())
    }

    pub fn get(&self, block: Block, l: usize, m: i32) -> Result<f64> {
        self.check(block, l, m)?;
        Ok(match block {
            Block::U => self.u[u_index(l, m)],
            Block::V => self.v[vw_index(l, m)],
            Block::W => self.w[vw_index(l, m)],
        })
    }

    pub fn set(&mut self, block: Block, l: usize, m: i32, value: f64) -> Result<()> {
        self.check(block, l, m)?;
        match block {
            Block::U => self.u[u_index(l, m)] = value,
            Block::V => self.v[vw_index(l, m)] = value,
            Block::W => self.w[vw_index(l, m)] = value,
        }
        Ok(())
    }

    /// Iterates `(block, l, m, value)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Block, usize, i32, f64)> + '_ {
        let lm = |first: usize, l_max: usize| {
            (first..=l_max).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
        };
        lm(0, self.l_max)
            .map(move |(l, m)| (Block::U, l, m, self.u[u_index(l, m)]))
            .chain(lm(1, self.l_max).map(move |(l, m)| (Block::V, l, m, self.v[vw_index(l, m)])))
            .chain(lm(1, self.l_max).map(move |(l, m)| (Block::W, l, m, self.w[vw_index(l, m)])))
    }

    pub fn dot(&self, o: &CoeffVector) -> Result<f64> {
        self.same_bandlimit(o)?;
        Ok(dot(&self.u, &o.u) + dot(&self.v, &o.v) + dot(&self.w, &o.w))
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.u, &self.u) + dot(&self.v, &self.v) + dot(&self.w, &self.w)
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: f64, x: &CoeffVector) -> Result<()> {
        self.same_bandlimit(x)?;
        for (s, x) in self
            .u
            .iter_mut()
            .chain(self.v.iter_mut())
            .chain(self.w.iter_mut())
            .zip(x.u.iter().chain(&x.v).chain(&x.w))
        {
            *s += a * x;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: f64) {
        for s in self.u.iter_mut().chain(self.v.iter_mut()).chain(self.w.iter_mut()) {
            *s *= a;
        }
    }

    pub fn has_radial(&self) -> bool {
        self.u.iter().any(|&x| x != 0.0)
    }

    pub fn has_tangential(&self) -> bool {
        self.v.iter().chain(&self.w).any(|&x| x != 0.0)
    }

    /// Smallest part that holds every nonzero coefficient.
    pub fn natural_part(&self) -> Part {
        match (self.has_radial(), self.has_tangential()) {
            (true, true) => Part::Full,
            (false, true) => Part::Tangential,
            _ => Part::Radial,
        }
    }

    /// Zero-padded copy at a larger bandlimit, or truncation to a smaller one.
    pub fn with_bandlimit(&self, l_max: usize) -> CoeffVector {
        let mut out = CoeffVector::zeros(l_max);
        let keep = self.l_max.min(l_max);
        let n = (keep + 1) * (keep + 1);
        out.u[..n].copy_from_slice(&self.u[..n]);
        out.v[..n - 1].copy_from_slice(&self.v[..n - 1]);
        out.w[..n - 1].copy_from_slice(&self.w[..n - 1]);
        out
    }

    pub(crate) fn same_bandlimit(&self, o: &CoeffVector) -> Result<()> {
        if self.l_max != o.l_max {
            return Err(Error::Bandlimit {
                expected: self.l_max,
                found: o.l_max,
            });
        }
        Ok(())
    }

    /// True if any tangential coefficient of order `±1` is nonzero.
    fn has_order_one_tangential(&self) -> bool {
        (1..=self.l_max).any(|l| {
            [-1, 1]
                .iter()
                .any(|&m| self.v[vw_index(l, m)] != 0.0 || self.w[vw_index(l, m)] != 0.0)
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(Y, ∂θY, (sin θ)⁻¹ ∂φY)` of the real scalar harmonic.
#[inline]
fn scalar_parts(table: &LegendreTable, l: usize, m: i32, cos_m: &[f64], sin_m: &[f64]) -> (f64, f64, f64) {
    let a = m.unsigned_abs() as usize;
    let x = table.x(l, a);
    let dx = table.dtheta(l, a);
    if m == 0 {
        return (x, dx, 0.0);
    }
    let q = table.over_sin(l, a);
    if m > 0 {
        (SQRT_2 * x * sin_m[a], SQRT_2 * dx * sin_m[a], SQRT_2 * q * cos_m[a])
    } else {
        (SQRT_2 * x * cos_m[a], SQRT_2 * dx * cos_m[a], -SQRT_2 * q * sin_m[a])
    }
}

fn trig_table(l_max: usize, phi: f64) -> (Vec<f64>, Vec<f64>) {
    (0..=l_max)
        .map(|m| {
            let (s, c) = (m as f64 * phi).sin_cos();
            (c, s)
        })
        .unzip()
}

fn check_lm(l: usize, m: i32, lmin: usize) -> Result<()> {
    if l < lmin || m.unsigned_abs() as usize > l {
        return Err(Error::domain(format!("invalid vector harmonic ({l}, {m})")));
    }
    Ok(())
}

fn tangential_parts(l: usize, m: i32, point: &SpherePoint) -> Result<(f64, f64)> {
    check_lm(l, m, 1)?;
    if m.abs() == 1 && point.is_pole() {
        return Err(Error::PoleSingularity { l, m });
    }
    let point = SpherePoint::new(point.theta, point.phi)?;
    let table = LegendreTable::new(l, point.theta);
    let (c, s) = trig_table(l, point.phi);
    let (_, dy, sy) = scalar_parts(&table, l, m, &c, &s);
    let k = ((l * (l + 1)) as f64).sqrt();
    Ok((dy / k, sy / k))
}

/// `P_lm` at a point.
pub fn eval_p(l: usize, m: i32, point: &SpherePoint) -> Result<TangentVector3> {
    check_lm(l, m, 0)?;
    let point = SpherePoint::new(point.theta, point.phi)?;
    let table = LegendreTable::new(l, point.theta);
    let (c, s) = trig_table(l, point.phi);
    let (y, _, _) = scalar_parts(&table, l, m, &c, &s);
    Ok(TangentVector3::new(y, 0.0, 0.0))
}

/// `B_lm` at a point; refused at the poles for `|m| = 1`.
pub fn eval_b(l: usize, m: i32, point: &SpherePoint) -> Result<TangentVector3> {
    let (dy, sy) = tangential_parts(l, m, point)?;
    Ok(TangentVector3::new(0.0, dy, sy))
}

/// `C_lm` at a point; refused at the poles for `|m| = 1`.
pub fn eval_c(l: usize, m: i32, point: &SpherePoint) -> Result<TangentVector3> {
    let (dy, sy) = tangential_parts(l, m, point)?;
    Ok(TangentVector3::new(0.0, sy, -dy))
}

/// Values of every harmonic of `part` at one point, as three rows
/// (radial, θ̂, φ̂ components) over the columns of `part`.
pub(crate) fn design_rows(l_max: usize, part: Part, point: &SpherePoint) -> [Vec<f64>; 3] {
    let table = LegendreTable::new(l_max, point.theta);
    design_rows_with(&table, part, point.phi)
}

pub(crate) fn design_rows_with(table: &LegendreTable, part: Part, phi: f64) -> [Vec<f64>; 3] {
    let l_max = table.lmax();
    let dim = part.dim(l_max);
    let mut rows = [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
    let (ou, ov, ow) = part.offsets(l_max);
    let (c, s) = trig_table(l_max, phi);
    for l in 0..=l_max {
        let k = if l > 0 { 1.0 / ((l * (l + 1)) as f64).sqrt() } else { 0.0 };
        for m in -(l as i32)..=l as i32 {
            let (y, dy, sy) = scalar_parts(table, l, m, &c, &s);
            if let Some(o) = ou {
                rows[0][o + u_index(l, m)] = y;
            }
            if l == 0 {
                continue;
            }
            let j = vw_index(l, m);
            if let Some(o) = ov {
                rows[1][o + j] = dy * k;
                rows[2][o + j] = sy * k;
            }
            if let Some(o) = ow {
                rows[1][o + j] = sy * k;
                rows[2][o + j] = -dy * k;
            }
        }
    }
    rows
}

/// Colatitudes and longitudes of a tensor-product evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl GridSpec {
    /// Equiangular grid in degrees: latitudes 90 → −90, longitudes 0 → 360,
    /// both inclusive. `181 × 361` at one-degree spacing.
    pub fn equiangular(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg <= 90.0) {
            return Err(Error::domain(format!("grid step {step_deg}° not in (0, 90]")));
        }
        let nlat = (180.0 / step_deg).round() as usize + 1;
        let nlon = (360.0 / step_deg).round() as usize + 1;
        let dlat = PI / (nlat - 1) as f64;
        let dlon = 2.0 * PI / (nlon - 1) as f64;
        Ok(GridSpec {
            thetas: (0..nlat).map(|i| (i as f64 * dlat).min(PI)).collect(),
            phis: (0..nlon).map(|j| j as f64 * dlon).collect(),
        })
    }
}

/// A vector field sampled on a tensor-product grid, row-major in θ.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub samples: Vec<TangentVector3>,
}

impl VectorGrid {
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>, samples: Vec<TangentVector3>) -> Result<Self> {
        if samples.len() != thetas.len() * phis.len() {
            return Err(Error::domain(format!(
                "{} samples do not fill a {}×{} grid",
                samples.len(),
                thetas.len(),
                phis.len()
            )));
        }
        Ok(VectorGrid {
            thetas,
            phis,
            samples,
        })
    }

    pub fn at(&self, i: usize, j: usize) -> TangentVector3 {
        self.samples[i * self.phis.len() + j]
    }
}

/// Field values along one colatitude row.
fn synth_row(coeffs: &CoeffVector, theta: f64, phis: &[f64]) -> Vec<TangentVector3> {
    let l_max = coeffs.l_max;
    let table = LegendreTable::new(l_max, theta);
    // Per order: cosine and sine coefficients of each component.
    let mut rc = vec![0.0; l_max + 1];
    let mut rs = vec![0.0; l_max + 1];
    let mut tc = vec![0.0; l_max + 1];
    let mut ts = vec![0.0; l_max + 1];
    let mut pc = vec![0.0; l_max + 1];
    let mut ps = vec![0.0; l_max + 1];
    for a in 0..=l_max {
        let norm = if a == 0 { 1.0 } else { SQRT_2 };
        for l in a..=l_max {
            let x = norm * table.x(l, a);
            let dx = norm * table.dtheta(l, a);
            let q = norm * table.over_sin(l, a);
            let ai = a as i32;
            if a == 0 {
                rc[0] += coeffs.u[u_index(l, 0)] * x;
                if l > 0 {
                    let k = 1.0 / ((l * (l + 1)) as f64).sqrt();
                    let (v, w) = (coeffs.v[vw_index(l, 0)], coeffs.w[vw_index(l, 0)]);
                    tc[0] += v * dx * k;
                    pc[0] -= w * dx * k;
                }
                continue;
            }
            rs[a] += coeffs.u[u_index(l, ai)] * x;
            rc[a] += coeffs.u[u_index(l, -ai)] * x;
            let k = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let (vp, wp) = (coeffs.v[vw_index(l, ai)], coeffs.w[vw_index(l, ai)]);
            let (vn, wn) = (coeffs.v[vw_index(l, -ai)], coeffs.w[vw_index(l, -ai)]);
            // m = +a: Y ∝ sin aφ; m = −a: Y ∝ cos aφ.
            ts[a] += (vp * dx - wn * q) * k;
            tc[a] += (wp * q + vn * dx) * k;
            pc[a] += (vp * q - wn * dx) * k;
            ps[a] += (-wp * dx - vn * q) * k;
        }
    }
    phis.iter()
        .map(|&phi| {
            let mut out = TangentVector3::ZERO;
            for a in 0..=l_max {
                let (s, c) = (a as f64 * phi).sin_cos();
                out.r += rc[a] * c + rs[a] * s;
                out.t += tc[a] * c + ts[a] * s;
                out.p += pc[a] * c + ps[a] * s;
            }
            out
        })
        .collect()
}

/// `Σ U_lm P_lm + V_lm B_lm + W_lm C_lm` on a grid.
///
/// Pole rows are moved to `θ = 1e-7` (or `π − 1e-7`) when the field has
/// tangential terms of order `±1`, whose limit at the pole depends on the
/// direction of approach.
pub fn synth(coeffs: &CoeffVector, grid: &GridSpec) -> Result<VectorGrid> {
    let clamp = coeffs.has_order_one_tangential();
    let mut samples = Vec::with_capacity(grid.thetas.len() * grid.phis.len());
    for &theta in &grid.thetas {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!("colatitude {theta} outside [0, π]")));
        }
        let th = if clamp {
            theta.clamp(POLE_CLAMP, PI - POLE_CLAMP)
        } else {
            theta
        };
        samples.extend(synth_row(coeffs, th, &grid.phis));
    }
    VectorGrid::new(grid.thetas.clone(), grid.phis.clone(), samples)
}

/// Field value at a single point; pole points follow the same clamp as `synth`.
pub fn evaluate(coeffs: &CoeffVector, point: &SpherePoint) -> Result<TangentVector3> {
    let g = synth(
        coeffs,
        &GridSpec {
            thetas: vec![point.theta],
            phis: vec![point.phi],
        },
    )?;
    Ok(g.samples[0])
}

/// Field values at the nodes of a quadrature rule.
pub fn sample(coeffs: &CoeffVector, rule: &QuadratureRule) -> Vec<TangentVector3> {
    // Nodes come in rings of equal colatitude; reuse one Legendre table per ring.
    let mut out = Vec::with_capacity(rule.nodes.len());
    let mut start = 0;
    while start < rule.nodes.len() {
        let theta = rule.nodes[start].theta;
        let mut end = start;
        while end < rule.nodes.len() && rule.nodes[end].theta == theta {
            end += 1;
        }
        let phis: Vec<f64> = rule.nodes[start..end].iter().map(|p| p.phi).collect();
        out.extend(synth_row(coeffs, theta, &phis));
        start = end;
    }
    out
}

/// A field sampled at the nodes of a quadrature rule.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub rule: QuadratureRule,
    pub values: Vec<TangentVector3>,
}

impl SampledField {
    pub fn new(rule: QuadratureRule, values: Vec<TangentVector3>) -> Result<Self> {
        if rule.nodes.len() != values.len() {
            return Err(Error::domain(format!(
                "{} values for {} quadrature nodes",
                values.len(),
                rule.nodes.len()
            )));
        }
        Ok(SampledField { rule, values })
    }

    /// Samples a coefficient field at the rule's nodes.
    pub fn from_coeffs(coeffs: &CoeffVector, rule: QuadratureRule) -> Self {
        let values = sample(coeffs, &rule);
        SampledField { rule, values }
    }

    /// `∫ u·u dΩ` over the rule's domain.
    pub fn energy(&self) -> f64 {
        self.rule
            .weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sq())
            .sum()
    }
}

/// Projects a globally sampled field onto the harmonics up to `l_max`.
///
/// Exact for fields bandlimited to `l_max` when the rule is a global rule
/// of exactness at least `l_max`.
pub fn analyze(field: &SampledField, l_max: usize) -> Result<CoeffVector> {
    let rule = &field.rule;
    if !rule.global || rule.exactness < l_max {
        return Err(Error::ResolutionMismatch {
            required: l_max,
            available: if rule.global { rule.exactness } else { 0 },
        });
    }
    project_nodes(rule, &field.values, l_max)
}

/// `∫ F_lm · u dΩ` over the rule's nodes, for every harmonic up to `l_max`.
pub(crate) fn project_nodes(rule: &QuadratureRule, values: &[TangentVector3], l_max: usize) -> Result<CoeffVector> {
    let dim = Part::Full.dim(l_max);
    let mut acc = vec![0.0; dim];
    let mut cached: Option<LegendreTable> = None;
    for ((node, w), u) in rule.nodes.iter().zip(&rule.weights).zip(values) {
        if cached.as_ref().map(|t| t.theta()) != Some(node.theta) {
            cached = Some(LegendreTable::new(l_max, node.theta));
        }
        let rows = design_rows_with(cached.as_ref().unwrap(), Part::Full, node.phi);
        for (i, a) in acc.iter_mut().enumerate() {
            *a += w * (rows[0][i] * u.r + rows[1][i] * u.t + rows[2][i] * u.p);
        }
    }
    CoeffVector::from_part_slice(l_max, Part::Full, &acc)
}
