//! Localization kernels `P`, `Q = [[B, D], [Dᵀ, C]]` and `K = diag(P, Q)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::region::{region_quadrature, QuadratureRule, Region, DEFAULT_OVERSAMPLE};
use crate::specfun::{cap_product_integral, LegendreTable, PaulTable};
use crate::vsh::{design_rows_with, u_index, vw_index, Part};

const STRIPES: usize = 16;
const CHUNK: usize = 256;

/// What a kernel matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Radial `P`, size `(L+1)²`.
    P,
    /// Tangential `Q`, size `2(L+1)² − 2`.
    Q,
    /// Full `K = diag(P, Q)`, size `3(L+1)² − 2`.
    K,
    /// Polar-cap radial block of order `m`, acting on `U_{·,m}`.
    CapRadial { m: usize },
    /// Polar-cap tangential block of order `m`, acting on `(V_{·,m}, W_{·,−m})`.
    CapTangential { m: usize },
}

impl KernelKind {
    pub fn for_part(part: Part) -> Self {
        match part {
            Part::Radial => KernelKind::P,
            Part::Tangential => KernelKind::Q,
            Part::Full => KernelKind::K,
        }
    }

    pub fn part(&self) -> Part {
        match self {
            KernelKind::P | KernelKind::CapRadial { .. } => Part::Radial,
            KernelKind::Q | KernelKind::CapTangential { .. } => Part::Tangential,
            KernelKind::K => Part::Full,
        }
    }

    /// Fixed order of a polar-cap block.
    pub fn order(&self) -> Option<usize> {
        match self {
            KernelKind::CapRadial { m } | KernelKind::CapTangential { m } => Some(*m),
            _ => None,
        }
    }

    /// Matrix size at bandlimit `l_max`.
    pub fn dim(&self, l_max: usize) -> usize {
        match *self {
            KernelKind::CapRadial { m } => l_max + 1 - m,
            KernelKind::CapTangential { m } => 2 * (l_max + 1 - m.max(1)),
            k => k.part().dim(l_max),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelKind::P => "P".into(),
            KernelKind::Q => "Q".into(),
            KernelKind::K => "K".into(),
            KernelKind::CapRadial { m } => format!("Pm:{m}"),
            KernelKind::CapTangential { m } => format!("Qm:{m}"),
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let order = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::domain(format!("bad block order in '{s}'")))
        };
        match s {
            "P" => Ok(KernelKind::P),
            "Q" => Ok(KernelKind::Q),
            "K" => Ok(KernelKind::K),
            _ => {
                if let Some(t) = s.strip_prefix("Pm:") {
                    Ok(KernelKind::CapRadial { m: order(t)? })
                } else if let Some(t) = s.strip_prefix("Qm:") {
                    Ok(KernelKind::CapTangential { m: order(t)? })
                } else {
                    Err(Error::domain(format!("unknown kernel kind '{s}'")))
                }
            }
        }
    }
}

/// A dense symmetric localization matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub kind: KernelKind,
    pub l_max: usize,
    pub matrix: DMatrix<f64>,
    /// Fingerprint of the region the kernel was built for.
    pub region: String,
}

impl KernelMatrix {
    /// Wraps a square matrix, symmetrizing it as `(M + Mᵀ)/2`.
    pub fn new(kind: KernelKind, l_max: usize, matrix: DMatrix<f64>, region: String) -> Result<Self> {
        let n = kind.dim(l_max);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::domain(format!(
                "{} kernel at L = {l_max} must be {n}×{n}, got {}×{}",
                kind.name(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if let KernelKind::CapRadial { m } | KernelKind::CapTangential { m } = kind {
            if m > l_max {
                return Err(Error::domain(format!("order {m} exceeds bandlimit {l_max}")));
            }
        }
        let matrix = symmetrize(matrix);
        Ok(KernelMatrix {
            kind,
            l_max,
            matrix,
            region,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `xᵀ M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "vector of length {} against {}×{} kernel",
                x.len(),
                self.dim(),
                self.dim()
            )));
        }
        let mut s = 0.0;
        for j in 0..x.len() {
            let col = self.matrix.column(j);
            let cj: f64 = col.iter().zip(x).map(|(a, b)| a * b).sum();
            s += cj * x[j];
        }
        Ok(s)
    }

    /// `M x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::domain("vector length does not match kernel"));
        }
        let v = nalgebra::DVector::from_column_slice(x);
        Ok((&self.matrix * v).as_slice().to_vec())
    }

    /// The `B` (`VV`), `D` (`VW`) and `C` (`WW`) blocks of a tangential kernel.
    pub fn tangential_blocks(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let (o, n) = match self.kind {
            KernelKind::Q => (0, self.dim() / 2),
            KernelKind::K => {
                let nu = (self.l_max + 1) * (self.l_max + 1);
                (nu, nu - 1)
            }
            _ => return Err(Error::domain("kernel has no tangential blocks")),
        };
        let m = &self.matrix;
        Ok((
            m.view((o, o), (n, n)).into_owned(),
            m.view((o, o + n), (n, n)).into_owned(),
            m.view((o + n, o + n), (n, n)).into_owned(),
        ))
    }
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// `∫ F_i · F_j dΩ` over the rule's nodes for every pair of harmonics in `part`.
fn gram(rule: &QuadratureRule, l_max: usize, part: Part) -> DMatrix<f64> {
    let dim = part.dim(l_max);
    let comps: &[usize] = match part {
        Part::Radial => &[0],
        Part::Tangential => &[1, 2],
        Part::Full => &[0, 1, 2],
    };
    let n = rule.len();
    let stripes = STRIPES.min(n.max(1));
    let per = n.div_ceil(stripes);
    let partials: Vec<DMatrix<f64>> = (0..stripes)
        .into_par_iter()
        .map(|s| {
            let mut g = DMatrix::zeros(dim, dim);
            let end = ((s + 1) * per).min(n);
            let mut table: Option<LegendreTable> = None;
            let mut start = s * per;
            while start < end {
                let stop = (start + CHUNK).min(end);
                let rows = (stop - start) * comps.len();
                let mut at = DMatrix::zeros(dim, rows);
                for (k, i) in (start..stop).enumerate() {
                    let node = &rule.nodes[i];
                    if table.as_ref().map(|t| t.theta()) != Some(node.theta) {
                        table = Some(LegendreTable::new(l_max, node.theta));
                    }
                    let r = design_rows_with(table.as_ref().unwrap(), part, node.phi);
                    let sw = rule.weights[i].sqrt();
                    for (ci, &c) in comps.iter().enumerate() {
                        let mut col = at.column_mut(k * comps.len() + ci);
                        for (dst, src) in col.iter_mut().zip(&r[c]) {
                            *dst = sw * src;
                        }
                    }
                }
                let a = at.transpose();
                g.gemm(1.0, &at, &a, 1.0);
                start = stop;
            }
            g
        })
        .collect();
    let mut total = DMatrix::zeros(dim, dim);
    for p in partials {
        total += p;
    }
    symmetrize(total)
}

/// Kernel of `part` assembled with an explicit quadrature rule.
pub fn assemble_with_rule(rule: &QuadratureRule, l_max: usize, part: Part, region: String) -> Result<KernelMatrix> {
    if part != Part::Radial && l_max == 0 {
        return Err(Error::domain("tangential kernels need L ≥ 1"));
    }
    if rule.exactness < l_max {
        return Err(Error::ResolutionMismatch {
            required: l_max,
            available: rule.exactness,
        });
    }
    let kind = KernelKind::for_part(part);
    let matrix = match part {
        Part::Full => {
            let p = gram(rule, l_max, Part::Radial);
            let q = gram(rule, l_max, Part::Tangential);
            let (np, nq) = (p.nrows(), q.nrows());
            let mut k = DMatrix::zeros(np + nq, np + nq);
            k.view_mut((0, 0), (np, np)).copy_from(&p);
            k.view_mut((np, np), (nq, nq)).copy_from(&q);
            k
        }
        _ => gram(rule, l_max, part),
    };
    KernelMatrix::new(kind, l_max, matrix, region)
}

/// Kernel of `part` for `region` by quadrature at the default oversampling.
pub fn assemble_quadrature(region: &Region, l_max: usize, part: Part) -> Result<KernelMatrix> {
    let rule = region_quadrature(region, l_max, DEFAULT_OVERSAMPLE)?;
    assemble_with_rule(&rule, l_max, part, region.fingerprint())
}

/// Analytic per-order blocks of the polar-cap kernel.
#[derive(Debug, Clone)]
pub struct PolarCapKernel {
    pub theta: f64,
    pub l_max: usize,
    /// `P^m`, `m = 0..=L`, indexed by `l − m`.
    p: Vec<DMatrix<f64>>,
    /// `B^m`, `m = 0..=L`, indexed by `l − max(m, 1)`.
    b: Vec<DMatrix<f64>>,
    /// `D^m`, `m = 0..=L` (zero for `m = 0`), indexed like `B^m`.
    d: Vec<DMatrix<f64>>,
    region: String,
}

fn a_minus(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    -((l + m) * (l - m + 1.0)).sqrt() / 2.0
}

fn a_plus(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    ((l - m) * (l + m + 1.0)).max(0.0).sqrt() / 2.0
}

fn b_pm(l: usize, m: usize) -> (f64, f64) {
    let (l, m) = (l as f64, m as f64);
    let c = -((2.0 * l + 1.0) / (2.0 * l - 1.0)).sqrt() / 2.0;
    (
        c * ((l + m) * (l + m - 1.0)).sqrt(),
        c * ((l - m) * (l - m - 1.0)).max(0.0).sqrt(),
    )
}

/// `X'_lm` as a combination of `(degree, order ≥ 0)` terms.
fn dtheta_terms(l: usize, m: usize) -> Vec<(usize, usize, f64)> {
    if m == 0 {
        return vec![(l, 1, ((l * (l + 1)) as f64).sqrt())];
    }
    vec![(l, m - 1, a_minus(l, m)), (l, m + 1, a_plus(l, m))]
}

/// `m X_lm / sin θ` as a combination of `(degree, order ≥ 0)` terms.
fn over_sin_terms(l: usize, m: usize) -> Vec<(usize, usize, f64)> {
    if m == 0 {
        return Vec::new();
    }
    let (bm, bp) = b_pm(l, m);
    vec![(l - 1, m - 1, bm), (l - 1, m + 1, bp)]
}

fn combo_integral(paul: &PaulTable, a: &[(usize, usize, f64)], b: &[(usize, usize, f64)]) -> f64 {
    let mut s = 0.0;
    for &(l1, p, c1) in a {
        for &(l2, q, c2) in b {
            if c1 == 0.0 || c2 == 0.0 {
                continue;
            }
            s += c1 * c2 * cap_product_integral(paul, l1, p, l2, q);
        }
    }
    s
}

impl PolarCapKernel {
    pub fn p_block(&self, m: usize) -> &DMatrix<f64> {
        &self.p[m]
    }

    pub fn b_block(&self, m: usize) -> &DMatrix<f64> {
        &self.b[m]
    }

    pub fn d_block(&self, m: usize) -> &DMatrix<f64> {
        &self.d[m]
    }

    /// `Q_m = [[B^m, D^m], [D^m, B^m]]` on `(V_{·,m}, W_{·,−m})`.
    ///
    /// The order `−m` block is the same with `D^m` negated.
    pub fn q_block(&self, m: usize) -> DMatrix<f64> {
        let b = &self.b[m];
        let d = &self.d[m];
        let n = b.nrows();
        let mut q = DMatrix::zeros(2 * n, 2 * n);
        q.view_mut((0, 0), (n, n)).copy_from(b);
        q.view_mut((n, n), (n, n)).copy_from(b);
        q.view_mut((0, n), (n, n)).copy_from(d);
        q.view_mut((n, 0), (n, n)).copy_from(d);
        q
    }

    /// All `2(L+1)` blocks as kernel matrices, radial first.
    pub fn blocks(&self) -> Vec<KernelMatrix> {
        let radial = (0..=self.l_max).map(|m| KernelMatrix {
            kind: KernelKind::CapRadial { m },
            l_max: self.l_max,
            matrix: self.p[m].clone(),
            region: self.region.clone(),
        });
        let tangential = (0..=self.l_max).map(|m| KernelMatrix {
            kind: KernelKind::CapTangential { m },
            l_max: self.l_max,
            matrix: self.q_block(m),
            region: self.region.clone(),
        });
        radial.chain(tangential).collect()
    }

    pub fn block(&self, kind: KernelKind) -> Result<KernelMatrix> {
        let matrix = match kind {
            KernelKind::CapRadial { m } if m <= self.l_max => self.p[m].clone(),
            KernelKind::CapTangential { m } if m <= self.l_max => self.q_block(m),
            _ => return Err(Error::domain(format!("no polar-cap block {}", kind.name()))),
        };
        Ok(KernelMatrix {
            kind,
            l_max: self.l_max,
            matrix,
            region: self.region.clone(),
        })
    }

    pub fn region_fingerprint(&self) -> &str {
        &self.region
    }

    /// Dense `P` in the canonical layout.
    pub fn dense_p(&self) -> DMatrix<f64> {
        let n = Part::Radial.dim(self.l_max);
        let mut out = DMatrix::zeros(n, n);
        for m in 0..=self.l_max {
            let pm = &self.p[m];
            for i in 0..pm.nrows() {
                for j in 0..pm.ncols() {
                    let (l, l2) = (m + i, m + j);
                    let mi = m as i32;
                    out[(u_index(l, mi), u_index(l2, mi))] = pm[(i, j)];
                    out[(u_index(l, -mi), u_index(l2, -mi))] = pm[(i, j)];
                }
            }
        }
        out
    }

    /// Dense `Q` in the canonical layout.
    pub fn dense_q(&self) -> DMatrix<f64> {
        let n = Part::Tangential.dim(self.l_max) / 2;
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for m in 0..=self.l_max {
            let lmin = m.max(1);
            let (bm, dm) = (&self.b[m], &self.d[m]);
            let mi = m as i32;
            for i in 0..bm.nrows() {
                for j in 0..bm.ncols() {
                    let (l, l2) = (lmin + i, lmin + j);
                    for s in [mi, -mi] {
                        let (r, c) = (vw_index(l, s), vw_index(l2, s));
                        out[(r, c)] = bm[(i, j)];
                        out[(n + r, n + c)] = bm[(i, j)];
                    }
                    if m > 0 {
                        // V_{l,m} with W_{l',−m}, and V_{l,−m} with W_{l',m}.
                        let d = dm[(i, j)];
                        let (r, c) = (vw_index(l, mi), n + vw_index(l2, -mi));
                        out[(r, c)] = d;
                        out[(c, r)] = d;
                        let (r, c) = (vw_index(l, -mi), n + vw_index(l2, mi));
                        out[(r, c)] = -d;
                        out[(c, r)] = -d;
                    }
                }
            }
        }
        out
    }

    /// Dense `K = diag(P, Q)`.
    pub fn dense_k(&self) -> DMatrix<f64> {
        let p = self.dense_p();
        let q = self.dense_q();
        let (np, nq) = (p.nrows(), q.nrows());
        let mut k = DMatrix::zeros(np + nq, np + nq);
        k.view_mut((0, 0), (np, np)).copy_from(&p);
        k.view_mut((np, np), (nq, nq)).copy_from(&q);
        k
    }

    /// Dense kernel of `part` as a [`KernelMatrix`].
    pub fn dense(&self, part: Part) -> KernelMatrix {
        let matrix = match part {
            Part::Radial => self.dense_p(),
            Part::Tangential => self.dense_q(),
            Part::Full => self.dense_k(),
        };
        KernelMatrix {
            kind: KernelKind::for_part(part),
            l_max: self.l_max,
            matrix,
            region: self.region.clone(),
        }
    }

    /// Fixed-order radial Shannon number `Σ_l P^m_ll`.
    pub fn shannon_radial(&self, m: usize) -> f64 {
        self.p[m].trace()
    }

    /// Fixed-order tangential Shannon number `2 Σ_l B^m_ll`.
    pub fn shannon_tangential(&self, m: usize) -> f64 {
        2.0 * self.b[m].trace()
    }
}

/// Analytic polar-cap blocks for `0 < Θ ≤ π`.
pub fn assemble_polarcap(theta: f64, l_max: usize) -> Result<PolarCapKernel> {
    if !(theta > 0.0 && theta <= PI) {
        return Err(Error::domain(format!("cap radius {theta} not in (0, π]")));
    }
    if l_max == 0 {
        return Err(Error::domain("polar-cap kernel needs L ≥ 1"));
    }
    let paul = PaulTable::new(2 * l_max + 2, theta);
    let edge = LegendreTable::new(l_max, theta);
    let two_pi = 2.0 * PI;
    let blocks: Vec<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> = (0..=l_max)
        .into_par_iter()
        .map(|m| {
            let np = l_max + 1 - m;
            let p = DMatrix::from_fn(np, np, |i, j| {
                two_pi * cap_product_integral(&paul, m + i, m, m + j, m)
            });
            let lmin = m.max(1);
            let nb = l_max + 1 - lmin;
            let k = |l: usize| ((l * (l + 1)) as f64).sqrt();
            let b = DMatrix::from_fn(nb, nb, |i, j| {
                let (l, l2) = (lmin + i, lmin + j);
                let xx = combo_integral(&paul, &dtheta_terms(l, m), &dtheta_terms(l2, m));
                let ss = combo_integral(&paul, &over_sin_terms(l, m), &over_sin_terms(l2, m));
                two_pi * (xx + ss) / (k(l) * k(l2))
            });
            let y: Vec<f64> = (lmin..=l_max).map(|l| edge.x(l, m) / k(l)).collect();
            let c = -two_pi * m as f64;
            let d = DMatrix::from_fn(nb, nb, |i, j| c * (y[i] * y[j]));
            (symmetrize(p), symmetrize(b), d)
        })
        .collect();
    let mut p = Vec::with_capacity(l_max + 1);
    let mut b = Vec::with_capacity(l_max + 1);
    let mut d = Vec::with_capacity(l_max + 1);
    for (pm, bm, dm) in blocks {
        p.push(pm);
        b.push(bm);
        d.push(dm);
    }
    let region = Region::polar_cap(theta)?.fingerprint();
    Ok(PolarCapKernel {
        theta,
        l_max,
        p,
        b,
        d,
        region,
    })
}
