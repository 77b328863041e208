//! Scalar information-rate functions shared by every region definition.
//!
//! All logarithms are base 2 and all rates are in bits per channel symbol.
//! The two basic curves are
//!
//! - `C(x) = (1/2) log2(1 + x)`, the point-to-point Gaussian capacity, and
//! - `D(x) = (1/2) max{0, log2(1/2 + x)}`, the symmetric-rate lattice
//!   decoding rate of the modulo-sum relay stage.
//!
//! `C - D` is bounded by `(1/2) log2(3/2)` and peaks at `x = 1/2`; that
//! constant is what ultimately drives the half-bit gap certificate.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Default absolute tolerance for slack comparisons against region bounds.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Half-bit shift of the gap theorem.
pub const HALF_BIT: f64 = 0.5;

/// Maximum of `C(x) - D(x)` over `x >= 0`: `(1/2) log2(3/2)`, attained at
/// `x = 1/2`.
pub const CD_GAP_MAX: f64 = 0.292_481_250_360_578_1;

/// A linear (not dB) signal-to-noise ratio.
///
/// Construction validates that the value is finite and non-negative, so the
/// rate functions below never see NaN or infinities.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Snr(f64);

impl Snr {
    pub fn new(value: f64) -> Result<Self, Error> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidSnr(value))
        }
    }

    /// The zero-SNR (silent link) value.
    pub const ZERO: Snr = Snr(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Snr {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self, Error> {
        Snr::new(value)
    }
}

/// `C(x) = (1/2) log2(1 + x)` in bits/symbol.
///
/// Uses `ln_1p` so small SNRs keep full precision.
pub fn capacity_c(x: Snr) -> f64 {
    0.5 * x.0.ln_1p() / LN_2
}

/// `D(x) = (1/2) max{0, log2(1/2 + x)}` in bits/symbol.
///
/// Zero for all `x <= 1/2`.
pub fn lattice_rate_d(x: Snr) -> f64 {
    (0.5 * (x.0 - 0.5).ln_1p() / LN_2).max(0.0)
}

/// `Gamma(p1, p2) = C(2 p1) + C(p2) - C(p1 + p2)`, defined for `p1 <= p2`.
///
/// Written as `C(2 p1) - (1/2) log2(1 + p1 / (1 + p2))` so the result stays
/// non-negative under rounding; the two forms are algebraically identical.
pub fn gamma(p1: Snr, p2: Snr) -> Result<f64, Error> {
    if p1.0 > p2.0 {
        return Err(Error::PowerOrder { p1: p1.0, p2: p2.0 });
    }
    Ok(0.5 * ((2.0 * p1.0).ln_1p() - (p1.0 / (1.0 + p2.0)).ln_1p()) / LN_2)
}

/// `C(p1) - D(p1)`, always in `[0, CD_GAP_MAX]`.
pub fn cd_gap(p1: Snr) -> f64 {
    if p1.0 <= 0.5 {
        // D vanishes here.
        capacity_c(p1)
    } else {
        // C - D = (1/2) log2(1 + (1/2) / (1/2 + x)).
        0.5 * (0.5 / (0.5 + p1.0)).ln_1p() / LN_2
    }
}
