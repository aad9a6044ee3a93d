//! Special functions used by the forward generators and the inverse solver.

mod bessel;
mod gamma;
mod hypergeometric;
mod jacobi;

pub(crate) use bessel::combine_modified;
pub use bessel::{
    bessel_ladder, ln_modified_ladder, ln_sph_bessel_i, modified_product, sph_bessel_j, BesselOrderLadder,
    ProductPartner,
};
pub use gamma::{ln_gamma, ln_gamma_complex, odd_double_factorial, pochhammer};
pub use hypergeometric::hyp2f1_terminating;
pub use jacobi::jacobi_p_seq;
