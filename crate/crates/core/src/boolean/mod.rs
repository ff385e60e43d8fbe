//! Fourier–Walsh analysis of sparse Boolean functions under shifted
//! Rademacher product measures.
//!
//! Every coefficient here is an exact enumeration over the `2^k` sign
//! patterns of the support; randomness only enters through draws of the
//! shift vector in [`prop31_sweep`].

mod fourier;
mod junta;
mod shift;
mod sweep;

pub use fourier::{
    chi_basis, first_order_shifted_closed_form, fourier_coefficient_exact, influence,
    shifted_spectrum, FirstOrder,
};
pub use junta::{BooleanJunta, JuntaSpec, MAX_SUPPORT};
pub(crate) use shift::sample_with;
pub use shift::{sample_shifted, ProductShift, DEGENERACY_MARGIN, MAX_ETA};
pub use sweep::{loglog_slope, pair_product_small_coefficient, prop31_sweep, Prop31Row};
