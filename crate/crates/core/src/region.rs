//! Concentration regions and quadrature rules over them.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, gauss_legendre_on};
use crate::vsh::SpherePoint;

/// Default oversampling of the indicator-filtered region rule.
pub const DEFAULT_OVERSAMPLE: usize = 4;

/// Sub-samples per cell side used to estimate the covered fraction of a
/// quadrature cell cut by the region boundary.
pub const COVERAGE_SUBSAMPLES: usize = 8;

const MIN_AREA: f64 = 1e-12;

/// A rasterized region: `nlat × nlon` equiangular cells, rows north to south,
/// columns eastward from longitude 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    nlat: usize,
    nlon: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(nlat: usize, nlon: usize, cells: Vec<bool>) -> Result<Self> {
        if nlat == 0 || nlon == 0 || cells.len() != nlat * nlon {
            return Err(Error::domain(format!(
                "mask of {} cells does not fill {nlat}×{nlon}",
                cells.len()
            )));
        }
        Ok(Mask { nlat, nlon, cells })
    }

    /// Cells whose centers satisfy `pred(theta, phi)`.
    pub fn from_fn(nlat: usize, nlon: usize, pred: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mut cells = Vec::with_capacity(nlat * nlon);
        for i in 0..nlat {
            let theta = (i as f64 + 0.5) * PI / nlat as f64;
            for j in 0..nlon {
                cells.push(pred(theta, (j as f64 + 0.5) * 2.0 * PI / nlon as f64));
            }
        }
        Mask::new(nlat, nlon, cells)
    }

    pub fn nlat(&self) -> usize {
        self.nlat
    }

    pub fn nlon(&self) -> usize {
        self.nlon
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.nlon + j]
    }

    pub fn complement(&self) -> Mask {
        Mask {
            nlat: self.nlat,
            nlon: self.nlon,
            cells: self.cells.iter().map(|c| !c).collect(),
        }
    }

    fn lookup(&self, p: &SpherePoint) -> bool {
        let i = ((p.theta / PI * self.nlat as f64) as usize).min(self.nlat - 1);
        let j = ((p.phi / (2.0 * PI) * self.nlon as f64) as usize).min(self.nlon - 1);
        self.cell(i, j)
    }

    fn area(&self) -> f64 {
        let dphi = 2.0 * PI / self.nlon as f64;
        (0..self.nlat)
            .map(|i| {
                let t0 = i as f64 * PI / self.nlat as f64;
                let t1 = (i + 1) as f64 * PI / self.nlat as f64;
                let count = (0..self.nlon).filter(|&j| self.cell(i, j)).count();
                count as f64 * dphi * (t0.cos() - t1.cos())
            })
            .sum()
    }
}

/// One closed lon/lat ring, radians. Edges are straight lines in lon/lat.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    vertices: Vec<(f64, f64)>,
    /// Net number of eastward turns around the polar axis.
    winding: i32,
}

impl Ring {
    /// Builds a ring from `(lon, lat)` vertices in radians; a repeated
    /// closing vertex is dropped.
    pub fn new(mut vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::domain("polygon ring needs at least 3 vertices"));
        }
        for &(lon, lat) in &vertices {
            if !lon.is_finite() || !(-FRAC_PI_2..=FRAC_PI_2).contains(&lat) {
                return Err(Error::domain(format!("invalid polygon vertex ({lon}, {lat})")));
            }
        }
        let total: f64 = edges(&vertices).map(|(a, b)| wrap(b.0 - a.0)).sum();
        let winding = (total / (2.0 * PI)).round() as i32;
        Ok(Ring { vertices, winding })
    }

    pub fn from_degrees(vertices: &[(f64, f64)]) -> Result<Self> {
        Ring::new(
            vertices
                .iter()
                .map(|&(lon, lat)| (lon.to_radians(), lat.to_radians()))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// A ring that circles the polar axis encloses the pole on the side of
    /// its mean latitude.
    fn encloses_north(&self) -> bool {
        self.winding != 0 && self.vertices.iter().map(|v| v.1).sum::<f64>() > 0.0
    }

    fn contains(&self, lon: f64, lat: f64) -> bool {
        let north = self.encloses_north();
        let mut inside = false;
        for (a, b) in edges(&self.vertices) {
            let d = wrap(b.0 - a.0);
            if d == 0.0 {
                continue;
            }
            let t = wrap(lon - a.0) / d;
            // Half-open in t so that shared vertices count once.
            if !(0.0..1.0).contains(&t) {
                continue;
            }
            let y = a.1 + t * (b.1 - a.1);
            if (north && y < lat) || (!north && y > lat) {
                inside = !inside;
            }
        }
        inside
    }

    fn area(&self) -> f64 {
        let s: f64 = edges(&self.vertices)
            .map(|(a, b)| {
                let dx = wrap(b.0 - a.0);
                let dy = b.1 - a.1;
                if dy.abs() < 1e-15 {
                    a.1.sin() * dx
                } else {
                    dx * (a.1.cos() - b.1.cos()) / dy
                }
            })
            .sum();
        let w = 2.0 * PI * self.winding as f64;
        if self.winding == 0 {
            s.abs()
        } else if self.encloses_north() {
            (w - s).abs()
        } else {
            (w + s).abs()
        }
    }
}

fn edges(v: &[(f64, f64)]) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

/// Wraps a longitude difference into `(−π, π]`.
fn wrap(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// A concentration region on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `θ ≤ Θ` about the north pole.
    PolarCap { theta: f64 },
    /// Union of disjoint lon/lat polygons.
    PolygonUnion { rings: Vec<Ring> },
    Mask(Mask),
}

impl Region {
    pub fn polar_cap(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::domain(format!("cap radius {theta} not in (0, π]")));
        }
        Ok(Region::PolarCap { theta })
    }

    pub fn polar_cap_deg(theta: f64) -> Result<Self> {
        Region::polar_cap(theta.to_radians())
    }

    pub fn polygons(rings: Vec<Ring>) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::domain("polygon union needs at least one ring"));
        }
        let r = Region::PolygonUnion { rings };
        r.area()?;
        Ok(r)
    }

    pub fn mask(mask: Mask) -> Result<Self> {
        let r = Region::Mask(mask);
        r.area()?;
        Ok(r)
    }

    /// Area in steradians; exact for caps, polygons and masks.
    pub fn area(&self) -> Result<f64> {
        let a = match self {
            Region::PolarCap { theta } => 2.0 * PI * (1.0 - theta.cos()),
            Region::PolygonUnion { rings } => rings.iter().map(Ring::area).sum(),
            Region::Mask(m) => m.area(),
        };
        if a.is_nan() || a < MIN_AREA {
            return Err(Error::EmptyRegion(a));
        }
        Ok(a.min(4.0 * PI))
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        match self {
            Region::PolarCap { theta } => p.theta <= *theta,
            Region::PolygonUnion { rings } => {
                let lat = FRAC_PI_2 - p.theta;
                rings.iter().any(|r| r.contains(p.phi, lat))
            }
            Region::Mask(m) => m.lookup(p),
        }
    }

    /// True when the region is the whole sphere.
    pub fn is_sphere(&self) -> bool {
        match self {
            Region::PolarCap { theta } => *theta >= PI,
            Region::Mask(m) => m.cells.iter().all(|&c| c),
            Region::PolygonUnion { .. } => false,
        }
    }

    /// Hex digest identifying the region geometry.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        match self {
            Region::PolarCap { theta } => {
                let _ = write!(s, "cap {:016x}", theta.to_bits());
            }
            Region::PolygonUnion { rings } => {
                s.push_str("polygons");
                for r in rings {
                    s.push_str(" |");
                    for v in &r.vertices {
                        let _ = write!(s, " {:016x} {:016x}", v.0.to_bits(), v.1.to_bits());
                    }
                }
            }
            Region::Mask(m) => {
                let _ = write!(s, "mask {} {} ", m.nlat, m.nlon);
                s.extend(m.cells.iter().map(|&c| if c { '1' } else { '0' }));
            }
        }
        let digest = Sha256::digest(s.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Nodes and positive weights of a quadrature rule, in rings of constant
/// colatitude.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    /// Highest degree `L` such that products of two harmonics of degree
    /// `≤ L` are integrated exactly (boundary-fitted rules) or nominally
    /// (indicator rules).
    pub exactness: usize,
    /// True for a rule over the whole sphere.
    pub global: bool,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss rings in `μ = cos θ` over `[mu_lo, mu_hi]` times a uniform
/// longitude grid of `nphi` points.
fn tensor_rule(nmu: usize, mu_lo: f64, mu_hi: f64, nphi: usize) -> (Vec<SpherePoint>, Vec<f64>) {
    let (mu, wmu) = gauss_legendre_on(nmu, mu_lo, mu_hi);
    let dphi = 2.0 * PI / nphi as f64;
    let mut nodes = Vec::with_capacity(nmu * nphi);
    let mut weights = Vec::with_capacity(nmu * nphi);
    // Descending μ puts the rings north to south.
    for i in (0..nmu).rev() {
        let theta = mu[i].clamp(-1.0, 1.0).acos();
        for j in 0..nphi {
            nodes.push(SpherePoint {
                theta,
                phi: j as f64 * dphi,
            });
            weights.push(wmu[i] * dphi);
        }
    }
    (nodes, weights)
}

/// Gauss–Legendre in `cos θ` (`L+1` nodes) times a uniform longitude grid
/// (`2L+1` nodes); exact for products of harmonics up to degree `L`.
pub fn sphere_quadrature(l_exact: usize) -> QuadratureRule {
    let (nodes, weights) = tensor_rule(l_exact + 1, -1.0, 1.0, 2 * l_exact + 1);
    QuadratureRule {
        nodes,
        weights,
        exactness: l_exact,
        global: true,
    }
}

/// Quadrature over a region.
///
/// Polar caps get a boundary-fitted rule (Gauss in `cos θ` over
/// `[cos Θ, 1]`) that is exact for products up to degree `l_exact`; other
/// regions use [`masked_quadrature`].
pub fn region_quadrature(region: &Region, l_exact: usize, oversample: usize) -> Result<QuadratureRule> {
    match region {
        Region::PolarCap { theta } => {
            let (nodes, weights) = tensor_rule(l_exact + 1, theta.cos(), 1.0, 2 * l_exact + 1);
            Ok(QuadratureRule {
                nodes,
                weights,
                exactness: l_exact,
                global: *theta >= PI,
            })
        }
        _ => masked_quadrature(region, l_exact, oversample),
    }
}

/// Indicator-filtered rule: a sphere rule refined by `oversample` in both
/// directions, each weight scaled by the fraction of its cell inside the
/// region. Accuracy is limited by the boundary.
pub fn masked_quadrature(region: &Region, l_exact: usize, oversample: usize) -> Result<QuadratureRule> {
    if oversample == 0 {
        return Err(Error::domain("oversample must be at least 1"));
    }
    region.area()?;
    let nmu = oversample * (l_exact + 1);
    let nphi = oversample * (2 * l_exact + 1);
    let (mu, wmu) = gauss_legendre(nmu);
    let dphi = 2.0 * PI / nphi as f64;
    // Cell edges in μ: cumulative Gauss weights partition [−1, 1].
    let mut edges = Vec::with_capacity(nmu + 1);
    edges.push(-1.0);
    let mut acc = -1.0;
    for w in &wmu {
        acc += w;
        edges.push(acc);
    }
    edges[nmu] = 1.0;
    let s = COVERAGE_SUBSAMPLES;
    let rows: Vec<Vec<(SpherePoint, f64)>> = (0..nmu)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let theta = mu[i].clamp(-1.0, 1.0).acos();
            let (lo, hi) = (edges[i], edges[i + 1]);
            let sub_theta: Vec<f64> = (0..s)
                .map(|a| (lo + (a as f64 + 0.5) * (hi - lo) / s as f64).clamp(-1.0, 1.0).acos())
                .collect();
            (0..nphi)
                .filter_map(|j| {
                    let phi = j as f64 * dphi;
                    let mut hits = 0usize;
                    for &t in &sub_theta {
                        for b in 0..s {
                            let p = phi + ((b as f64 + 0.5) / s as f64 - 0.5) * dphi;
                            let q = SpherePoint {
                                theta: t,
                                phi: p.rem_euclid(2.0 * PI),
                            };
                            if region.contains(&q) {
                                hits += 1;
                            }
                        }
                    }
                    (hits > 0).then(|| {
                        let frac = hits as f64 / (s * s) as f64;
                        (SpherePoint { theta, phi }, wmu[i] * dphi * frac)
                    })
                })
                .collect()
        })
        .collect();
    let (nodes, weights): (Vec<_>, Vec<_>) = rows.into_iter().flatten().unzip();
    if nodes.is_empty() {
        return Err(Error::EmptyRegion(0.0));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        exactness: l_exact,
        global: false,
    })
}
