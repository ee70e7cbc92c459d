// @generated by scripts/derive_stationarity.py; do not edit by hand.
//
// gamma_first(sigma1, sigma2, c1) is the numerator of dC/dk for user 1,
// divided by the slice power, with all cross gains kept symbolic.
// With h12 = h21 = 1 it reduces to the widely quoted unit-cross-gain
// expansion (checked by the generator). gamma_second is derived
// independently and equals gamma_first with users exchanged.

#![allow(clippy::all)]

use super::equations::FlatParams;

pub(crate) const GAMMA_FIRST_TERMS: usize = 15;
pub(crate) const GAMMA_SECOND_TERMS: usize = 15;

/// Expanded monomials of the gamma_first balance polynomial.
pub(crate) fn gamma_first_terms(p: &FlatParams, sigma1: f64, sigma2: f64, c1: f64) -> [f64; 15] {
    [
        -c1*p.h11.powi(2)*p.n2.powi(2),
        -c1*p.h11.powi(2)*p.h12.powi(2)*sigma1.powi(2),
        p.h11*p.h21*p.n2.powi(2)*sigma2,
        p.h12*p.h22*p.n1.powi(2)*sigma2,
        -2.0*c1*p.h11.powi(2)*p.h12*p.n2*sigma1,
        -c1*p.h11.powi(2)*p.h22*p.n2*sigma2,
        p.h11*p.h12.powi(2)*p.h21*sigma1.powi(2)*sigma2,
        p.h11*p.h21*p.h22*p.n2*sigma2.powi(2),
        p.h11.powi(2)*p.h12*p.h22*sigma1.powi(2)*sigma2,
        p.h12*p.h21*p.h22*p.n1*sigma2.powi(2),
        c1*p.h11*p.h12*p.h21*p.h22*sigma2.powi(2),
        c1*p.h11*p.h12*p.h22*p.n1*sigma2,
        2.0*p.h11*p.h12*p.h21*p.h22*sigma1*sigma2.powi(2),
        2.0*p.h11*p.h12*p.h21*p.n2*sigma1*sigma2,
        2.0*p.h11*p.h12*p.h22*p.n1*sigma1*sigma2,
    ]
}

/// `(gamma_first at c1 = 0, dgamma_first/dc1)`.
pub(crate) fn gamma_first_affine(p: &FlatParams, sigma1: f64, sigma2: f64) -> (f64, f64) {
    let constant = p.h11*p.h21*p.n2.powi(2)*sigma2 + p.h12*p.h22*p.n1.powi(2)*sigma2 + p.h11*p.h12.powi(2)*p.h21*sigma1.powi(2)*sigma2 + p.h11*p.h21*p.h22*p.n2*sigma2.powi(2) + p.h11.powi(2)*p.h12*p.h22*sigma1.powi(2)*sigma2 + p.h12*p.h21*p.h22*p.n1*sigma2.powi(2) + 2.0*p.h11*p.h12*p.h21*p.h22*sigma1*sigma2.powi(2) + 2.0*p.h11*p.h12*p.h21*p.n2*sigma1*sigma2 + 2.0*p.h11*p.h12*p.h22*p.n1*sigma1*sigma2;
    let slope = -p.h11.powi(2)*p.n2.powi(2) - p.h11.powi(2)*p.h12.powi(2)*sigma1.powi(2) - 2.0*p.h11.powi(2)*p.h12*p.n2*sigma1 - p.h11.powi(2)*p.h22*p.n2*sigma2 + p.h11*p.h12*p.h21*p.h22*sigma2.powi(2) + p.h11*p.h12*p.h22*p.n1*sigma2;
    (constant, slope)
}

/// Expanded monomials of the gamma_second balance polynomial.
pub(crate) fn gamma_second_terms(p: &FlatParams, sigma1: f64, sigma2: f64, c2: f64) -> [f64; 15] {
    [
        -c2*p.h22.powi(2)*p.n1.powi(2),
        -c2*p.h21.powi(2)*p.h22.powi(2)*sigma2.powi(2),
        p.h11*p.h21*p.n2.powi(2)*sigma1,
        p.h12*p.h22*p.n1.powi(2)*sigma1,
        -c2*p.h11*p.h22.powi(2)*p.n1*sigma1,
        -2.0*c2*p.h21*p.h22.powi(2)*p.n1*sigma2,
        p.h11*p.h12*p.h21*p.n2*sigma1.powi(2),
        p.h11*p.h12*p.h22*p.n1*sigma1.powi(2),
        p.h11*p.h21*p.h22.powi(2)*sigma1*sigma2.powi(2),
        p.h12*p.h21.powi(2)*p.h22*sigma1*sigma2.powi(2),
        c2*p.h11*p.h12*p.h21*p.h22*sigma1.powi(2),
        c2*p.h11*p.h21*p.h22*p.n2*sigma1,
        2.0*p.h11*p.h12*p.h21*p.h22*sigma1.powi(2)*sigma2,
        2.0*p.h11*p.h21*p.h22*p.n2*sigma1*sigma2,
        2.0*p.h12*p.h21*p.h22*p.n1*sigma1*sigma2,
    ]
}

/// `(gamma_second at c2 = 0, dgamma_second/dc2)`.
pub(crate) fn gamma_second_affine(p: &FlatParams, sigma1: f64, sigma2: f64) -> (f64, f64) {
    let constant = p.h11*p.h21*p.n2.powi(2)*sigma1 + p.h12*p.h22*p.n1.powi(2)*sigma1 + p.h11*p.h12*p.h21*p.n2*sigma1.powi(2) + p.h11*p.h12*p.h22*p.n1*sigma1.powi(2) + p.h11*p.h21*p.h22.powi(2)*sigma1*sigma2.powi(2) + p.h12*p.h21.powi(2)*p.h22*sigma1*sigma2.powi(2) + 2.0*p.h11*p.h12*p.h21*p.h22*sigma1.powi(2)*sigma2 + 2.0*p.h11*p.h21*p.h22*p.n2*sigma1*sigma2 + 2.0*p.h12*p.h21*p.h22*p.n1*sigma1*sigma2;
    let slope = -p.h22.powi(2)*p.n1.powi(2) - p.h21.powi(2)*p.h22.powi(2)*sigma2.powi(2) - p.h11*p.h22.powi(2)*p.n1*sigma1 - 2.0*p.h21*p.h22.powi(2)*p.n1*sigma2 + p.h11*p.h12*p.h21*p.h22*sigma1.powi(2) + p.h11*p.h21*p.h22*p.n2*sigma1;
    (constant, slope)
}
