//! Rate regions of the Gaussian two-way relay channel with private relay
//! information.
//!
//! Two sources exchange messages through a relay over a two-phase protocol
//! (a multiple-access phase followed by a broadcast phase) while each also
//! sends private information to the relay itself. This crate provides:
//!
//! - [`rate_math`]: the scalar rate functions `C`, `D`, `Gamma` and the gap
//!   constants, base-2 throughout;
//! - [`regions`]: membership predicates with per-inequality slacks for the
//!   outer bound, the conventional-MAC region, the
//!   equal-exchange-rate-with-bit-relabeling (EER-BR) region, and the
//!   certified convex hull of the latter two, plus 2-D boundary slicing;
//! - [`gap`]: the constructive half-bit certificate (shifting any
//!   outer-bound tuple down by half a bit per component lands in the EER-BR
//!   MAC-phase region) and randomized counterexample sweeps;
//! - [`sim`]: a message-level simulator of the full pipeline (lattice
//!   mapping, bit relabeling, superposition, successive decoding, broadcast
//!   with side information), exact in genie mode and Monte-Carlo under AWGN.
//!
//! ```
//! use twrc::rate_math::DEFAULT_TOL;
//! use twrc::regions::{eer_br_member, ChannelConfig, RateTuple};
//!
//! let cfg = ChannelConfig::new(1.0, 1.0, 3.0, 3.0).unwrap();
//! let r = RateTuple::new(0.0, 0.2, 0.0, 0.1).unwrap();
//! let report = eer_br_member(&cfg, &r, DEFAULT_TOL);
//! assert!(report.member);
//! ```

pub mod error;
pub mod gap;
pub mod rate_math;
pub mod regions;
pub mod sim;

pub use error::Error;
pub use rate_math::{capacity_c, cd_gap, gamma, lattice_rate_d, Snr, CD_GAP_MAX, DEFAULT_TOL};
pub use regions::{ChannelConfig, RateTuple, RegionReport};
