//! Construction and verification of ping-pong tuples.

mod builder;
mod cert;
mod falsifier;

pub use builder::{
    build_pingpong_tuple, make_proximal, make_very_contracting, make_very_proximal, Proximal,
    TupleFactors, VeryContracting, VeryProximal, PROBE_ATTEMPTS,
};
pub use cert::{certify_tuple, verify_pingpong, verify_pingpong_report, CrossEntry, PingPongCert};
pub use falsifier::{freeness_falsifier, is_projective_identity, FALSIFIER_TOL};

use crate::cartan::{cartan_decompose, CartanField};
use crate::error::Result;
use crate::field::LocalField;
use crate::matrix::Matrix;
use crate::projective::{ProjHyperplane, ProjPoint};

/// Cartan-derived attracting points and repelling hyperplanes of `g` and `g⁻¹`.
#[derive(Clone, Debug)]
pub(crate) struct Flags<T: LocalField> {
    pub v: ProjPoint<T>,
    pub h: ProjHyperplane<T>,
    pub v_inv: ProjPoint<T>,
    pub h_inv: ProjHyperplane<T>,
}

impl<T: CartanField> Flags<T> {
    pub fn of(g: &Matrix<T>) -> Result<Self> {
        let f = cartan_decompose(g)?;
        let b = cartan_decompose(&g.sl_inverse()?)?;
        Ok(Flags {
            v: f.attracting_point()?,
            h: f.repelling_hyperplane()?,
            v_inv: b.attracting_point()?,
            h_inv: b.repelling_hyperplane()?,
        })
    }
}

impl<T: LocalField> Flags<T> {
    pub fn points(&self) -> [&ProjPoint<T>; 2] {
        [&self.v, &self.v_inv]
    }

    pub fn hyperplanes(&self) -> [&ProjHyperplane<T>; 2] {
        [&self.h, &self.h_inv]
    }
}
