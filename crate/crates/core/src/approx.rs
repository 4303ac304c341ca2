//! Regional approximation of vector fields in a Slepian basis.

use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;
use crate::spectral::SlepianBasis;
use crate::vsh::CoeffVector;

/// Energy of a bandlimited field inside and outside a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionEnergy {
    /// `‖x‖²_R = xᵀ K x`.
    pub inside: f64,
    /// `‖x‖²_{Ω∖R} = ‖x‖² − xᵀ K x`.
    pub outside: f64,
}

impl RegionEnergy {
    /// Splits the energy of `x` with the region's kernel; coefficients
    /// outside the kernel's part are ignored.
    pub fn of(x: &CoeffVector, kernel: &KernelMatrix) -> Result<Self> {
        if x.l_max() != kernel.l_max {
            return Err(Error::Bandlimit {
                expected: kernel.l_max,
                found: x.l_max(),
            });
        }
        if kernel.kind.order().is_some() {
            return Err(Error::domain("regional norms need a dense kernel"));
        }
        let v = x.to_part_vec(kernel.kind.part());
        let total: f64 = v.iter().map(|a| a * a).sum();
        let inside = kernel.quadratic_form(&v)?;
        Ok(RegionEnergy {
            inside,
            outside: total - inside,
        })
    }

    pub fn total(&self) -> f64 {
        self.inside + self.outside
    }
}

/// Truncated reconstruction summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    /// Number of basis functions used.
    pub j: usize,
    /// `√(‖u − v_J‖²_R / ‖u‖²_R)`.
    pub epsilon: f64,
    /// `√(‖v_J‖²_{Ω∖R} / ‖u‖²_{Ω∖R})`.
    pub bias: f64,
    /// `u_α` for `α ≤ J`.
    pub coefficients: Vec<f64>,
}

fn check_basis(u: &CoeffVector, basis: &SlepianBasis) -> Result<()> {
    if basis.kernel.order().is_some() {
        return Err(Error::domain("projection needs a merged (dense) basis"));
    }
    if u.l_max() != basis.l_max {
        return Err(Error::Bandlimit {
            expected: basis.l_max,
            found: u.l_max(),
        });
    }
    Ok(())
}

/// `u_α = g_αᵀ u` for every column.
pub fn project(u: &CoeffVector, basis: &SlepianBasis) -> Result<Vec<f64>> {
    check_basis(u, basis)?;
    let x = nalgebra::DVector::from_vec(u.to_part_vec(basis.kind()));
    Ok(basis.vectors.tr_mul(&x).as_slice().to_vec())
}

/// `v_J = Σ_{α ≤ J} u_α g_α`, `1 ≤ J ≤ dim`.
pub fn reconstruct(u: &CoeffVector, basis: &SlepianBasis, j: usize) -> Result<CoeffVector> {
    let coeffs = project(u, basis)?;
    synthesize(basis, &coeffs, j)
}

fn synthesize(basis: &SlepianBasis, coeffs: &[f64], j: usize) -> Result<CoeffVector> {
    if j == 0 || j > basis.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: basis.len(),
        });
    }
    let mut v = vec![0.0; basis.dim()];
    for (a, &c) in coeffs.iter().enumerate().take(j) {
        for (dst, g) in v.iter_mut().zip(basis.vectors.column(a).iter()) {
            *dst += c * g;
        }
    }
    CoeffVector::from_part_slice(basis.l_max, basis.kind(), &v)
}

/// Relative regional error `ε` and external leakage `b` of `v` as an
/// approximation of `u`, with norms from the region's kernel.
pub fn error_bias(u: &CoeffVector, v: &CoeffVector, kernel: &KernelMatrix) -> Result<(f64, f64)> {
    u.same_bandlimit(v)?;
    let mut diff = u.clone();
    diff.axpy(-1.0, v)?;
    let eu = RegionEnergy::of(u, kernel)?;
    let ed = RegionEnergy::of(&diff, kernel)?;
    let ev = RegionEnergy::of(v, kernel)?;
    let scale = eu.total().max(f64::MIN_POSITIVE);
    if eu.inside <= 1e-15 * scale {
        return Err(Error::ZeroEnergy("inside the region"));
    }
    if eu.outside <= 1e-15 * scale {
        return Err(Error::ZeroEnergy("outside the region"));
    }
    Ok((
        (ed.inside.max(0.0) / eu.inside).sqrt(),
        (ev.outside.max(0.0) / eu.outside).sqrt(),
    ))
}

/// Reconstruction reports for each truncation in `js`, in the given order.
pub fn sweep(u: &CoeffVector, basis: &SlepianBasis, kernel: &KernelMatrix, js: &[usize]) -> Result<Vec<ReconstructionReport>> {
    let coeffs = project(u, basis)?;
    js.iter()
        .map(|&j| {
            let v = synthesize(basis, &coeffs, j)?;
            let (epsilon, bias) = error_bias(u, &v, kernel)?;
            Ok(ReconstructionReport {
                j,
                epsilon,
                bias,
                coefficients: coeffs[..j].to_vec(),
            })
        })
        .collect()
}
