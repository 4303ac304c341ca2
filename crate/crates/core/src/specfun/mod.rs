//! Special functions: normalized Legendre functions, their derivative and
//! quotient recursions, cap integrals, Wigner 3-j symbols and Gaunt
//! product expansions.

mod legendre;
mod paul;
mod wigner;

pub use legendre::{xlm, xlm_dtheta, xlm_over_sin, LegendreTable};
pub use paul::{paul_integral, PaulTable};
pub use wigner::{
    gaunt_expand, wigner3j, wigner3j_exact_path, Wigner3jArgs, FLOAT_RACAH_MAX_DEGREE,
};

pub(crate) use wigner::gaunt_terms;

use crate::error::{Error, Result};

/// A spherical-harmonic degree and order, `|m| ≤ l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeOrder {
    pub l: usize,
    pub m: i32,
}

impl DegreeOrder {
    pub fn new(l: usize, m: i32) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::domain(format!("order {m} exceeds degree {l}")));
        }
        Ok(DegreeOrder { l, m })
    }
}

/// `∫₀^Θ X_lp X_l'q sin θ dθ` for `p, q ≥ 0`, reduced with the Gaunt
/// expansion onto the cap integrals in `paul`.
///
/// `paul` must cover degree `l + l2`.
pub fn cap_product_integral(paul: &PaulTable, l: usize, p: usize, l2: usize, q: usize) -> f64 {
    if p > l || q > l2 {
        return 0.0;
    }
    let order = p + q;
    gaunt_terms(l, p as i32, l2, q as i32)
        .into_iter()
        .map(|(n, c)| c * paul.get(n, order))
        .sum()
}
