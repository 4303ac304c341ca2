//! Concentration eigenproblems, Slepian bases and Shannon numbers.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernel::{assemble_polarcap, KernelKind, KernelMatrix, PolarCapKernel};
use crate::region::{region_quadrature, Region, DEFAULT_OVERSAMPLE};
use crate::vsh::{self, design_rows, u_index, vw_index, CoeffVector, Part, SpherePoint};

/// Eigenvalues may stray this far outside `[0, 1]` before clipping.
pub const RANGE_TOLERANCE: f64 = 1e-10;
/// Coefficients below this magnitude are skipped by the sign convention.
pub const SIGN_THRESHOLD: f64 = 1e-9;

/// Which part of coefficient space a basis spans.
pub type BasisKind = Part;

/// Eigenvalue-sorted orthonormal eigenvectors of a localization kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SlepianBasis {
    pub l_max: usize,
    /// Fingerprint of the region.
    pub region: String,
    /// Kernel the columns live in: a dense `P`/`Q`/`K` layout or a fixed-order block.
    pub kernel: KernelKind,
    /// Concentration factors, nonincreasing, in `[0, 1]`.
    pub lambdas: Vec<f64>,
    /// Order of each column: exact for polar-cap bases, dominant order otherwise.
    pub orders: Vec<i32>,
    /// One eigenvector per column.
    pub vectors: DMatrix<f64>,
}

impl SlepianBasis {
    pub fn kind(&self) -> BasisKind {
        self.kernel.part()
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Length of each column.
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// True when the columns span the whole coefficient space of the kind.
    pub fn is_complete(&self) -> bool {
        self.kernel.order().is_none() && self.len() == self.kind().dim(self.l_max)
    }

    pub fn column(&self, alpha: usize) -> Result<&[f64]> {
        if alpha >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: alpha,
                len: self.len(),
            });
        }
        let n = self.dim();
        Ok(&self.vectors.as_slice()[alpha * n..(alpha + 1) * n])
    }

    /// Column `alpha` (zero-based) as a coefficient vector.
    pub fn coeffs(&self, alpha: usize) -> Result<CoeffVector> {
        if self.kernel.order().is_some() {
            return Err(Error::domain(
                "fixed-order basis columns need merge_fixed_order before use as fields",
            ));
        }
        CoeffVector::from_part_slice(self.l_max, self.kind(), self.column(alpha)?)
    }

    /// The first `count` columns.
    pub fn truncated(&self, count: usize) -> SlepianBasis {
        let count = count.min(self.len());
        SlepianBasis {
            l_max: self.l_max,
            region: self.region.clone(),
            kernel: self.kernel,
            lambdas: self.lambdas[..count].to_vec(),
            orders: self.orders[..count].to_vec(),
            vectors: self.vectors.columns(0, count).into_owned(),
        }
    }

    /// Field values of every column at a point, `(r, θ̂, φ̂)` per column.
    fn values_at(&self, point: &SpherePoint) -> Result<Vec<[f64; 3]>> {
        if self.kernel.order().is_some() {
            return Err(Error::domain("fixed-order basis cannot be evaluated directly"));
        }
        let p = SpherePoint::new(point.theta, point.phi)?;
        let rows = design_rows(self.l_max, self.kind(), &p);
        let rows: Vec<DVector<f64>> = rows.into_iter().map(DVector::from_vec).collect();
        let vals: Vec<DVector<f64>> = rows.iter().map(|r| self.vectors.tr_mul(r)).collect();
        Ok((0..self.len()).map(|a| [vals[0][a], vals[1][a], vals[2][a]]).collect())
    }
}

fn check_range(values: &[f64]) -> Result<()> {
    for &v in values {
        if !v.is_finite() {
            return Err(Error::EigenFailure(format!("non-finite eigenvalue {v}")));
        }
        if !(-RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&v) {
            return Err(Error::RangeViolation(v));
        }
    }
    Ok(())
}

fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.partial_cmp(x) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Sorts `(λ, order, vector)` by nonincreasing `λ`; equal `λ` are ordered
/// lexicographically by the sign-fixed vectors.
fn sort_columns(mut cols: Vec<(f64, i32, Vec<f64>)>) -> Vec<(f64, i32, Vec<f64>)> {
    for c in &mut cols {
        fix_sign(&mut c.2);
    }
    cols.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < cols.len() {
        let mut end = start + 1;
        while end < cols.len() && cols[end - 1].0 == cols[end].0 {
            end += 1;
        }
        cols[start..end].sort_by(|a, b| lex_desc(&a.2, &b.2));
        start = end;
    }
    cols
}

/// Order whose coefficients carry most of the energy of a dense column.
fn dominant_order(l_max: usize, part: Part, v: &[f64]) -> i32 {
    let mut energy = vec![0.0; 2 * l_max + 1];
    let (ou, ov, ow) = part.offsets(l_max);
    for l in 0..=l_max {
        for m in -(l as i32)..=l as i32 {
            let k = (m + l_max as i32) as usize;
            if let Some(o) = ou {
                energy[k] += v[o + u_index(l, m)].powi(2);
            }
            if l == 0 {
                continue;
            }
            for o in [ov, ow].into_iter().flatten() {
                energy[k] += v[o + vw_index(l, m)].powi(2);
            }
        }
    }
    let mut best = 0;
    for k in 0..energy.len() {
        if energy[k] > energy[best] + 1e-12 {
            best = k;
        }
    }
    best as i32 - l_max as i32
}

fn build(kernel: KernelKind, l_max: usize, region: String, cols: Vec<(f64, i32, Vec<f64>)>) -> SlepianBasis {
    let cols = sort_columns(cols);
    let n = cols.first().map_or(0, |c| c.2.len());
    let mut vectors = DMatrix::zeros(n, cols.len());
    let mut lambdas = Vec::with_capacity(cols.len());
    let mut orders = Vec::with_capacity(cols.len());
    for (j, (lambda, m, v)) in cols.into_iter().enumerate() {
        vectors.column_mut(j).copy_from_slice(&v);
        lambdas.push(lambda);
        orders.push(m);
    }
    SlepianBasis {
        l_max,
        region,
        kernel,
        lambdas,
        orders,
        vectors,
    }
}

/// Full symmetric eigendecomposition of a kernel.
///
/// Eigenvalues are checked against `[−1e-10, 1 + 1e-10]`, clipped to
/// `[0, 1]` and sorted nonincreasing. Each eigenvector is signed so that
/// its first coefficient above `1e-9` in magnitude is positive.
pub fn solve(kernel: &KernelMatrix) -> Result<SlepianBasis> {
    let n = kernel.dim();
    let m = crate::kernel::symmetrize(kernel.matrix.clone());
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::EigenFailure(format!("no convergence for {n}×{n} matrix")))?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    check_range(&values)?;
    let order = kernel.kind.order();
    let cols = values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
            let m = match order {
                Some(m) => m as i32,
                None => dominant_order(kernel.l_max, kernel.kind.part(), &v),
            };
            (lambda.clamp(0.0, 1.0), m, v)
        })
        .collect();
    Ok(build(kernel.kind, kernel.l_max, kernel.region.clone(), cols))
}

/// Expands fixed-order polar-cap eigenvectors into dense coefficient
/// vectors and ranks them jointly.
///
/// A radial order-`m` eigenvector yields the `±m` pair. A tangential
/// `Q_m` eigenvector `(a, b)` on `(V_{·,m}, W_{·,−m})` yields itself and
/// `(a, −b)` on `(V_{·,−m}, W_{·,m})`, the eigenvector of `Q_{−m}`.
pub fn merge_fixed_order(blocks: &[SlepianBasis]) -> Result<SlepianBasis> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::domain("no blocks to merge"))?;
    let l_max = first.l_max;
    let mut radial = false;
    let mut tangential = false;
    for b in blocks {
        if b.l_max != l_max {
            return Err(Error::Bandlimit {
                expected: l_max,
                found: b.l_max,
            });
        }
        match b.kernel {
            KernelKind::CapRadial { .. } => radial = true,
            KernelKind::CapTangential { .. } => tangential = true,
            _ => return Err(Error::domain("merge_fixed_order needs polar-cap blocks")),
        }
    }
    let part = match (radial, tangential) {
        (true, true) => Part::Full,
        (true, false) => Part::Radial,
        _ => Part::Tangential,
    };
    let dim = part.dim(l_max);
    let (ou, ov, ow) = part.offsets(l_max);
    let mut cols = Vec::new();
    for b in blocks {
        for (j, &lambda) in b.lambdas.iter().enumerate() {
            let x = b.column(j)?;
            match b.kernel {
                KernelKind::CapRadial { m } => {
                    let o = ou.unwrap();
                    let signs: &[i32] = if m == 0 { &[0] } else { &[1, -1] };
                    for &s in signs {
                        let mm = s * m as i32;
                        let mut v = vec![0.0; dim];
                        for (i, &c) in x.iter().enumerate() {
                            v[o + u_index(m + i, mm)] = c;
                        }
                        cols.push((lambda, mm, v));
                    }
                }
                KernelKind::CapTangential { m } => {
                    let (v0, w0) = (ov.unwrap(), ow.unwrap());
                    let lmin = m.max(1);
                    let n = x.len() / 2;
                    let signs: &[i32] = if m == 0 { &[0] } else { &[1, -1] };
                    for &s in signs {
                        let mm = s * m as i32;
                        let flip = if s < 0 { -1.0 } else { 1.0 };
                        let mut v = vec![0.0; dim];
                        for i in 0..n {
                            v[v0 + vw_index(lmin + i, mm)] = x[i];
                            v[w0 + vw_index(lmin + i, -mm)] = flip * x[n + i];
                        }
                        cols.push((lambda, mm, v));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(build(KernelKind::for_part(part), l_max, first.region.clone(), cols))
}

/// Solves every block of an analytic polar-cap kernel.
pub fn solve_polarcap_blocks(cap: &PolarCapKernel, part: Part) -> Result<Vec<SlepianBasis>> {
    let mut kinds = Vec::new();
    if part != Part::Tangential {
        kinds.extend((0..=cap.l_max).map(|m| KernelKind::CapRadial { m }));
    }
    if part != Part::Radial {
        kinds.extend((0..=cap.l_max).map(|m| KernelKind::CapTangential { m }));
    }
    kinds.into_iter().map(|k| solve(&cap.block(k)?)).collect()
}

/// Mixed-order polar-cap Slepian basis from the analytic block kernels.
pub fn polar_cap_basis(theta: f64, l_max: usize, part: Part) -> Result<SlepianBasis> {
    let cap = assemble_polarcap(theta, l_max)?;
    merge_fixed_order(&solve_polarcap_blocks(&cap, part)?)
}

/// Shannon numbers: traces of the localization kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct ShannonReport {
    pub total: f64,
    pub radial: f64,
    pub tangential: f64,
    /// Polar caps only: `N^r_m = Σ_l P^m_ll`, `m = 0..=L`.
    pub radial_by_order: Vec<f64>,
    /// Polar caps only: `N^t_m = 2 Σ_l B^m_ll`, `m = 0..=L`.
    pub tangential_by_order: Vec<f64>,
}

impl ShannonReport {
    fn new(radial: f64, tangential: f64) -> Self {
        ShannonReport {
            total: radial + tangential,
            radial,
            tangential,
            radial_by_order: Vec::new(),
            tangential_by_order: Vec::new(),
        }
    }

    /// `N = dim · A / 4π` for a region of area `A`.
    pub fn predicted(area: f64, l_max: usize) -> Self {
        let f = area / (4.0 * PI);
        ShannonReport::new(
            Part::Radial.dim(l_max) as f64 * f,
            Part::Tangential.dim(l_max) as f64 * f,
        )
    }

    pub fn from_polarcap(cap: &PolarCapKernel) -> Self {
        let r: Vec<f64> = (0..=cap.l_max).map(|m| cap.shannon_radial(m)).collect();
        let t: Vec<f64> = (0..=cap.l_max).map(|m| cap.shannon_tangential(m)).collect();
        let weight = |m: usize| if m == 0 { 1.0 } else { 2.0 };
        let radial = r.iter().enumerate().map(|(m, x)| weight(m) * x).sum();
        let tangential = t.iter().enumerate().map(|(m, x)| weight(m) * x).sum();
        ShannonReport {
            radial_by_order: r,
            tangential_by_order: t,
            ..ShannonReport::new(radial, tangential)
        }
    }

    /// `Σ λ`, split by the radial share of each column.
    pub fn from_basis(basis: &SlepianBasis) -> Self {
        let (ou, _, _) = basis.kind().offsets(basis.l_max);
        let nu = Part::Radial.dim(basis.l_max);
        let mut radial = 0.0;
        let mut total = 0.0;
        for (j, &lambda) in basis.lambdas.iter().enumerate() {
            total += lambda;
            if basis.kernel.order().is_none() {
                if let Some(o) = ou {
                    let share: f64 = basis.vectors.column(j).rows(o, nu).norm_squared();
                    radial += lambda * share;
                }
            } else if basis.kind() == Part::Radial {
                radial += lambda * if basis.orders[j] == 0 { 1.0 } else { 2.0 };
            }
        }
        if basis.kernel.order().is_some() {
            let m = basis.kernel.order().unwrap();
            let w = if m == 0 { 1.0 } else { 2.0 };
            return if basis.kind() == Part::Radial {
                ShannonReport::new(w * total, 0.0)
            } else {
                ShannonReport::new(0.0, w * total)
            };
        }
        ShannonReport::new(radial, total - radial)
    }

    pub fn rounded_total(&self) -> i64 {
        self.total.round() as i64
    }

    pub fn rounded_radial(&self) -> i64 {
        self.radial.round() as i64
    }

    pub fn rounded_tangential(&self) -> i64 {
        self.tangential.round() as i64
    }
}

/// Shannon numbers of a dense kernel: `tr P`, `tr Q` and their sum.
pub fn shannon(kernel: &KernelMatrix) -> ShannonReport {
    match kernel.kind {
        KernelKind::P => ShannonReport::new(kernel.trace(), 0.0),
        KernelKind::Q => ShannonReport::new(0.0, kernel.trace()),
        KernelKind::K => {
            let nu = Part::Radial.dim(kernel.l_max);
            let r: f64 = (0..nu).map(|i| kernel.matrix[(i, i)]).sum();
            ShannonReport::new(r, kernel.trace() - r)
        }
        KernelKind::CapRadial { m } => {
            ShannonReport::new(if m == 0 { 1.0 } else { 2.0 } * kernel.trace(), 0.0)
        }
        KernelKind::CapTangential { m } => {
            ShannonReport::new(0.0, if m == 0 { 1.0 } else { 2.0 } * kernel.trace())
        }
    }
}

/// `(V, W) → (−W, V)`: the pointwise 90° rotation of a tangential field.
pub fn tangential_partner(g: &CoeffVector) -> Result<CoeffVector> {
    if g.has_radial() {
        return Err(Error::NonzeroRadial);
    }
    let v = g.w().iter().map(|x| -x).collect();
    let w = g.v().to_vec();
    CoeffVector::from_blocks(g.l_max(), vec![0.0; g.u().len()], v, w)
}

/// Coefficients up to `l_out` of the field `g` set to zero outside `region`.
///
/// For a Slepian eigenfield the degrees `l ≤ L` reproduce `λ g`.
pub fn spacelimit(g: &CoeffVector, region: &Region, l_out: usize) -> Result<CoeffVector> {
    if l_out < g.l_max() {
        return Err(Error::Bandlimit {
            expected: g.l_max(),
            found: l_out,
        });
    }
    let exact = (g.l_max() + l_out).div_ceil(2);
    let rule = region_quadrature(region, exact, DEFAULT_OVERSAMPLE)?;
    let values = vsh::sample(g, &rule);
    vsh::project_nodes(&rule, &values, l_out)
}

/// `Σ_α |g_α(x)|²` over a complete basis; equals `dim / 4π` everywhere.
pub fn mercer_sum(basis: &SlepianBasis, point: &SpherePoint) -> Result<f64> {
    if !basis.is_complete() {
        return Err(Error::IncompleteBasis {
            have: basis.len(),
            need: basis.kind().dim(basis.l_max),
        });
    }
    Ok(basis
        .values_at(point)?
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>())
        .sum())
}

/// `Σ_α λ_α |g_α(x)|²`: close to `N/A` inside the region and to 0 outside.
pub fn weighted_energy(basis: &SlepianBasis, point: &SpherePoint) -> Result<f64> {
    Ok(basis
        .values_at(point)?
        .iter()
        .zip(&basis.lambdas)
        .map(|(v, l)| l * v.iter().map(|x| x * x).sum::<f64>())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = DMatrix::from_row_slice(2, 2, &[0.7, 0.1, 0.1, 0.3]);
        let k = KernelMatrix::new(KernelKind::CapRadial { m: 0 }, 1, m, "toy".into()).unwrap();
        let b = solve(&k).unwrap();
        // Roots of λ² − λ + 0.2 = 0.
        let d = 0.05f64.sqrt();
        let (hi, lo) = (0.5 + d, 0.5 - d);
        assert!((b.lambdas[0] - hi).abs() < 1e-14);
        assert!((b.lambdas[1] - lo).abs() < 1e-14);
        assert!(b.column(0).unwrap()[0] > 0.0);
    }

    #[test]
    fn out_of_range_spectrum_is_refused() {
        let m = DMatrix::from_row_slice(2, 2, &[1.5, 0.0, 0.0, 0.2]);
        let k = KernelMatrix::new(KernelKind::CapRadial { m: 0 }, 1, m, "bad".into()).unwrap();
        assert!(matches!(solve(&k), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn partner_twice_flips_sign() {
        let mut g = CoeffVector::zeros(3);
        for (i, x) in g.v_mut().iter_mut().enumerate() {
            *x = i as f64 + 0.5;
        }
        g.w_mut()[4] = -2.0;
        let p = tangential_partner(&tangential_partner(&g).unwrap()).unwrap();
        let mut neg = g.clone();
        neg.scale(-1.0);
        assert_eq!(p, neg);
        g.u_mut()[0] = 1.0;
        assert!(matches!(tangential_partner(&g), Err(Error::NonzeroRadial)));
    }

    #[test]
    fn predicted_shannon_full_sphere() {
        let s = ShannonReport::predicted(4.0 * PI, 18);
        assert_eq!(s.rounded_total(), 1081);
        assert!((s.total - s.radial - s.tangential).abs() < 1e-9);
    }

    #[test]
    fn merged_cap_spectrum_has_doublets() {
        let b = polar_cap_basis(40f64.to_radians(), 6, Part::Tangential).unwrap();
        assert_eq!(b.len(), 2 * 49 - 2);
        for pair in b.lambdas.chunks(2) {
            assert!((pair[0] - pair[1]).abs() < 1e-9);
        }
    }
}
