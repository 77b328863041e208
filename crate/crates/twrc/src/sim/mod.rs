//! Message-level simulation of the two-phase exchange pipeline.
//!
//! The pipeline follows the superposition scheme end to end: bit relabeling
//! equalizes the exchange rates, the exchange messages become lattice words,
//! the relay decodes the private stream and the modulo-sum of the lattice
//! words (never the individual exchange messages), and each source removes
//! its own contribution from the broadcast using side information.
//!
//! Two relay models are provided. `Genie` models error-free decoding at an
//! operating point inside the EER-BR MAC-phase region and verifies the
//! protocol algebra exactly. `Awgn` transmits uncoded q-ary PAM through a
//! real Gaussian channel and runs the two-stage successive decoder, so the
//! snapshot may be wrong; only the superposition streams (the two lattice
//! words and source 2's composite private message) traverse the noisy
//! channel, since source 1 sends no private stream in the superposition
//! scheme. The broadcast phase is genie-only: its rate region is met by a
//! standard code that is not simulated here.
//!
//! The phase functions require the canonical power order `p1 <= p2`;
//! [`run_exchange`] relabels sources transparently when needed.

mod awgn;
pub mod lattice;

pub use awgn::{ser_curve, zero_noise_separation, SerPoint};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::regions::{eer_br_ma_member, ChannelConfig, RateTuple};
use awgn::Superposition;
use lattice::{codebook_size, lattice_map_g, lattice_unmap_g, mod_add, mod_sub, LatticeWord};

/// Widest message supported by the u64 pipeline.
pub const MAX_WIDTH_BITS: u32 = 62;

/// All-ones mask of the given width.
pub(crate) fn width_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

// ---------------------------------------------------------------------------
// Messages and bit relabeling
// ---------------------------------------------------------------------------

/// Bit widths of the four messages at a given block length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageWidths {
    pub w12: u32,
    pub w21: u32,
    pub w1r: u32,
    pub w2r: u32,
}

impl MessageWidths {
    /// `floor(n * rate)` bits per message.
    pub fn from_rates(rates: &RateTuple, n: usize) -> Result<Self, Error> {
        let width = |r: f64| -> Result<u32, Error> {
            let bits = (r * n as f64 + 1e-9).floor();
            if bits > MAX_WIDTH_BITS as f64 {
                return Err(Error::WidthOverflow {
                    bits: bits.min(u32::MAX as f64) as u32,
                    max: MAX_WIDTH_BITS,
                });
            }
            Ok(bits as u32)
        };
        Ok(Self {
            w12: width(rates.r12)?,
            w21: width(rates.r21)?,
            w1r: width(rates.r1r)?,
            w2r: width(rates.r2r)?,
        })
    }
}

/// The four messages of one protocol cycle, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MessageSet {
    pub w12: u64,
    pub w21: u64,
    pub w1r: u64,
    pub w2r: u64,
}

impl MessageSet {
    pub fn validate(&self, widths: &MessageWidths) -> Result<(), Error> {
        let check = |msg: u64, bits: u32, name: &str| -> Result<(), Error> {
            if msg > width_mask(bits) {
                return Err(Error::MessageRange {
                    message: msg,
                    context: format!("{bits} bits declared for {name}"),
                });
            }
            Ok(())
        };
        check(self.w12, widths.w12, "w12")?;
        check(self.w21, widths.w21, "w21")?;
        check(self.w1r, widths.w1r, "w1r")?;
        check(self.w2r, widths.w2r, "w2r")
    }

    /// Uniform draw over the declared widths.
    pub fn random<R: Rng + ?Sized>(widths: &MessageWidths, rng: &mut R) -> Self {
        Self {
            w12: rng.random::<u64>() & width_mask(widths.w12),
            w21: rng.random::<u64>() & width_mask(widths.w21),
            w1r: rng.random::<u64>() & width_mask(widths.w1r),
            w2r: rng.random::<u64>() & width_mask(widths.w2r),
        }
    }

    pub(crate) fn source_swapped(&self) -> Self {
        Self {
            w12: self.w21,
            w21: self.w12,
            w1r: self.w2r,
            w2r: self.w1r,
        }
    }
}

/// Which exchange message was split by the relabeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitSide {
    /// `w21` carried the surplus bits (`r12 <= r21`).
    W21,
    /// `w12` carried the surplus bits (`r21 < r12`).
    W12,
}

/// Everything needed to invert the relabeling and to reassemble the longer
/// exchange message after the broadcast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitMeta {
    /// Original message widths.
    pub widths: MessageWidths,
    /// Common exchange width after relabeling: `min(w12, w21)` bits.
    pub exchange_bits: u32,
    /// Surplus bits moved into the private stream.
    pub delta_bits: u32,
    pub side: SplitSide,
}

/// Split the longer exchange message: its low `exchange_bits` bits stay an
/// exchange message, the high `delta_bits` bits ride along as additional
/// private payload of the same source.
pub fn relabel_split(
    msgs: &MessageSet,
    rates: &RateTuple,
    n: usize,
) -> Result<(MessageSet, SplitMeta), Error> {
    let widths = MessageWidths::from_rates(rates, n)?;
    msgs.validate(&widths)?;
    relabel_split_widths(msgs, widths)
}

fn relabel_split_widths(
    msgs: &MessageSet,
    widths: MessageWidths,
) -> Result<(MessageSet, SplitMeta), Error> {
    if widths.w12 <= widths.w21 {
        let exchange_bits = widths.w12;
        let delta_bits = widths.w21 - exchange_bits;
        if widths.w2r + delta_bits > MAX_WIDTH_BITS {
            return Err(Error::WidthOverflow {
                bits: widths.w2r + delta_bits,
                max: MAX_WIDTH_BITS,
            });
        }
        let tail = msgs.w21 >> exchange_bits;
        let eer = MessageSet {
            w12: msgs.w12,
            w21: msgs.w21 & width_mask(exchange_bits),
            w1r: msgs.w1r,
            w2r: (tail << widths.w2r) | msgs.w2r,
        };
        Ok((
            eer,
            SplitMeta {
                widths,
                exchange_bits,
                delta_bits,
                side: SplitSide::W21,
            },
        ))
    } else {
        let exchange_bits = widths.w21;
        let delta_bits = widths.w12 - exchange_bits;
        if widths.w1r + delta_bits > MAX_WIDTH_BITS {
            return Err(Error::WidthOverflow {
                bits: widths.w1r + delta_bits,
                max: MAX_WIDTH_BITS,
            });
        }
        let tail = msgs.w12 >> exchange_bits;
        let eer = MessageSet {
            w12: msgs.w12 & width_mask(exchange_bits),
            w21: msgs.w21,
            w1r: (tail << widths.w1r) | msgs.w1r,
            w2r: msgs.w2r,
        };
        Ok((
            eer,
            SplitMeta {
                widths,
                exchange_bits,
                delta_bits,
                side: SplitSide::W12,
            },
        ))
    }
}

/// Exact inverse of [`relabel_split`].
pub fn relabel_merge(eer: &MessageSet, meta: &SplitMeta) -> MessageSet {
    match meta.side {
        SplitSide::W21 => {
            let tail = eer.w2r >> meta.widths.w2r;
            MessageSet {
                w12: eer.w12,
                w21: (tail << meta.exchange_bits) | eer.w21,
                w1r: eer.w1r,
                w2r: eer.w2r & width_mask(meta.widths.w2r),
            }
        }
        SplitSide::W12 => {
            let tail = eer.w1r >> meta.widths.w1r;
            MessageSet {
                w12: (tail << meta.exchange_bits) | eer.w12,
                w21: eer.w21,
                w1r: eer.w1r & width_mask(meta.widths.w1r),
                w2r: eer.w2r,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// MAC phase
// ---------------------------------------------------------------------------

/// Relay decoding model for the MAC phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacMode {
    /// Error-free decoding; requires the operating point to lie in the
    /// EER-BR MAC-phase region.
    Genie,
    /// Uncoded q-ary PAM over a Gaussian channel with the given noise
    /// variance, two-stage successive decoding at the relay.
    Awgn { seed: u64, noise_var: f64 },
}

/// Everything the relay knows after the MAC phase: its two private messages,
/// the modulo-sum word, and the relabeled surplus bits. The individual
/// exchange messages never appear here.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaySnapshot {
    pub w1r_hat: u64,
    pub w2r_hat: u64,
    /// Decoded modulo-sum of the two exchange lattice words.
    pub t0: LatticeWord,
    /// `g^{-1}(t0)`.
    pub w0_hat: u64,
    /// The delta-bit part of the split exchange message, rebroadcast
    /// verbatim.
    pub split_tail: u64,
    /// Framing of the relabeling, needed to invert it after the broadcast.
    pub meta: SplitMeta,
}

fn codebook_fits_u64(q: u32, n: usize) -> Result<u128, Error> {
    match codebook_size(q, n) {
        Some(cap) if cap <= u64::MAX as u128 => Ok(cap),
        _ => Err(Error::InvalidParam(format!(
            "codebook {q}^{n} exceeds the 64-bit message pipeline"
        ))),
    }
}

/// MAC phase: relabel, superimpose, decode at the relay.
///
/// Requires `p1 <= p2` (see [`run_exchange`] for the symmetric wrapper).
pub fn run_mac_phase(
    cfg: &ChannelConfig,
    rates: &RateTuple,
    q: u32,
    n: usize,
    msgs: &MessageSet,
    mode: MacMode,
    tol: f64,
) -> Result<RelaySnapshot, Error> {
    if !cfg.is_canonical() {
        return Err(Error::PowerOrder {
            p1: cfg.p1.value(),
            p2: cfg.p2.value(),
        });
    }
    let (eer, meta) = relabel_split(msgs, rates, n)?;
    let cap = codebook_fits_u64(q, n)?;
    if (1u128 << meta.exchange_bits) > cap {
        return Err(Error::MessageRange {
            message: width_mask(meta.exchange_bits),
            context: format!("the codebook of {n} base-{q} digits"),
        });
    }

    match mode {
        MacMode::Genie => {
            let rep = eer_br_ma_member(cfg, rates, tol);
            if !rep.member {
                let v = rep
                    .worst_violation(tol)
                    .expect("non-member report has a violation");
                return Err(Error::OutsideEerMa {
                    constraint: v.constraint.clone(),
                    slack: v.value,
                });
            }
            let t12 = lattice_map_g(eer.w12, q, n)?;
            let t21 = lattice_map_g(eer.w21, q, n)?;
            // Noiseless integer superposition reduced modulo the coarse
            // lattice: exactly the sum the lattice decoder recovers.
            let t0 = mod_add(&t12, &t21)?;
            let w0_hat = lattice_unmap_g(&t0) as u64;
            let (w1r_hat, w2r_hat, split_tail) = split_composite(&eer, &meta);
            Ok(RelaySnapshot {
                w1r_hat,
                w2r_hat,
                t0,
                w0_hat,
                split_tail,
                meta,
            })
        }
        MacMode::Awgn { seed, noise_var } => {
            if !noise_var.is_finite() || noise_var < 0.0 {
                return Err(Error::InvalidParam(format!(
                    "noise variance must be finite and non-negative, got {noise_var}"
                )));
            }
            if cfg.p1.value() == 0.0 {
                return Err(Error::InvalidParam(
                    "the superposition demo needs p1 > 0 for the lattice stream".to_string(),
                ));
            }
            let private_bits = match meta.side {
                SplitSide::W21 => meta.widths.w2r + meta.delta_bits,
                SplitSide::W12 => meta.widths.w2r,
            };
            if (1u128 << private_bits) > cap {
                return Err(Error::MessageRange {
                    message: width_mask(private_bits),
                    context: format!("the codebook of {n} base-{q} digits"),
                });
            }
            let t12 = lattice_map_g(eer.w12, q, n)?;
            let t21 = lattice_map_g(eer.w21, q, n)?;
            let t2r = lattice_map_g(eer.w2r, q, n)?;
            let channel = Superposition::new(q, cfg.p1.value(), cfg.p2.value(), 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (t2r_hat, t0_hat) =
                channel.transmit_and_decode(&t12, &t21, &t2r, noise_var, &mut rng)?;
            let w0_hat = lattice_unmap_g(&t0_hat) as u64;
            let w2r_composite = lattice_unmap_g(&t2r_hat) as u64;
            let (w1r_hat, w2r_hat, split_tail) = match meta.side {
                SplitSide::W21 => (
                    eer.w1r,
                    w2r_composite & width_mask(meta.widths.w2r),
                    w2r_composite >> meta.widths.w2r,
                ),
                // The surplus bits ride source 1's private slot, which the
                // superposition scheme does not transmit; they pass through
                // like w1r itself.
                SplitSide::W12 => (
                    eer.w1r & width_mask(meta.widths.w1r),
                    w2r_composite,
                    eer.w1r >> meta.widths.w1r,
                ),
            };
            Ok(RelaySnapshot {
                w1r_hat,
                w2r_hat,
                t0: t0_hat,
                w0_hat,
                split_tail,
                meta,
            })
        }
    }
}

fn split_composite(eer: &MessageSet, meta: &SplitMeta) -> (u64, u64, u64) {
    match meta.side {
        SplitSide::W21 => (
            eer.w1r,
            eer.w2r & width_mask(meta.widths.w2r),
            eer.w2r >> meta.widths.w2r,
        ),
        SplitSide::W12 => (
            eer.w1r & width_mask(meta.widths.w1r),
            eer.w2r,
            eer.w1r >> meta.widths.w1r,
        ),
    }
}

// ---------------------------------------------------------------------------
// BC phase
// ---------------------------------------------------------------------------

/// Exchange messages recovered by their final destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BcDecoded {
    /// `w21` as rebuilt by source 1.
    pub w21_hat: u64,
    /// `w12` as rebuilt by source 2.
    pub w12_hat: u64,
}

/// Broadcast phase with side information, error-free relay-to-source links.
///
/// Each source subtracts its own lattice word from the broadcast modulo-sum;
/// the destination of the split message reattaches the rebroadcast surplus
/// bits. `side_info_i` is `(exchange, private)` as transmitted by source `i`
/// in their original (pre-relabeling) form.
pub fn run_bc_phase(
    snapshot: &RelaySnapshot,
    side_info_1: (u64, u64),
    side_info_2: (u64, u64),
) -> Result<BcDecoded, Error> {
    let q = snapshot.t0.q();
    let n = snapshot.t0.len();
    codebook_fits_u64(q, n)?;
    let meta = &snapshot.meta;
    let ex_mask = width_mask(meta.exchange_bits);
    let (w12_own, _w1r_own) = side_info_1;
    let (w21_own, _w2r_own) = side_info_2;
    match meta.side {
        SplitSide::W21 => {
            // Source 2 knows w21, hence the exchanged part w21'.
            let t21p = lattice_map_g(w21_own & ex_mask, q, n)?;
            let w12_hat = lattice_unmap_g(&mod_sub(&snapshot.t0, &t21p)?) as u64;
            // Source 1 knows w12, recovers w21' and reattaches the tail.
            let t12 = lattice_map_g(w12_own, q, n)?;
            let w21p_hat = lattice_unmap_g(&mod_sub(&snapshot.t0, &t12)?) as u64;
            let w21_hat = (snapshot.split_tail << meta.exchange_bits) | w21p_hat;
            Ok(BcDecoded { w21_hat, w12_hat })
        }
        SplitSide::W12 => {
            let t21 = lattice_map_g(w21_own, q, n)?;
            let w12p_hat = lattice_unmap_g(&mod_sub(&snapshot.t0, &t21)?) as u64;
            let w12_hat = (snapshot.split_tail << meta.exchange_bits) | w12p_hat;
            let t12p = lattice_map_g(w12_own & ex_mask, q, n)?;
            let w21_hat = lattice_unmap_g(&mod_sub(&snapshot.t0, &t12p)?) as u64;
            Ok(BcDecoded { w21_hat, w12_hat })
        }
    }
}

// ---------------------------------------------------------------------------
// End-to-end runner
// ---------------------------------------------------------------------------

/// Outcome of one full protocol cycle, compared against the transmitted
/// messages at their final destinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExchangeOutcome {
    pub w12_hat: u64,
    pub w21_hat: u64,
    pub relay_w1r: u64,
    pub relay_w2r: u64,
    pub w12_ok: bool,
    pub w21_ok: bool,
    pub w1r_ok: bool,
    pub w2r_ok: bool,
}

impl ExchangeOutcome {
    pub fn all_ok(&self) -> bool {
        self.w12_ok && self.w21_ok && self.w1r_ok && self.w2r_ok
    }

    fn source_swapped(self) -> Self {
        Self {
            w12_hat: self.w21_hat,
            w21_hat: self.w12_hat,
            relay_w1r: self.relay_w2r,
            relay_w2r: self.relay_w1r,
            w12_ok: self.w21_ok,
            w21_ok: self.w12_ok,
            w1r_ok: self.w2r_ok,
            w2r_ok: self.w1r_ok,
        }
    }
}

/// One full protocol cycle: relabel, MAC phase, broadcast, recovery check.
/// Relabels the sources internally when `p1 > p2`.
pub fn run_exchange(
    cfg: &ChannelConfig,
    rates: &RateTuple,
    q: u32,
    n: usize,
    msgs: &MessageSet,
    mode: MacMode,
    tol: f64,
) -> Result<ExchangeOutcome, Error> {
    if !cfg.is_canonical() {
        let out = run_exchange(
            &cfg.source_swapped(),
            &rates.source_swapped(),
            q,
            n,
            &msgs.source_swapped(),
            mode,
            tol,
        )?;
        return Ok(out.source_swapped());
    }
    let snapshot = run_mac_phase(cfg, rates, q, n, msgs, mode, tol)?;
    let decoded = run_bc_phase(&snapshot, (msgs.w12, msgs.w1r), (msgs.w21, msgs.w2r))?;
    Ok(ExchangeOutcome {
        w12_hat: decoded.w12_hat,
        w21_hat: decoded.w21_hat,
        relay_w1r: snapshot.w1r_hat,
        relay_w2r: snapshot.w2r_hat,
        w12_ok: decoded.w12_hat == msgs.w12,
        w21_ok: decoded.w21_hat == msgs.w21,
        w1r_ok: snapshot.w1r_hat == msgs.w1r,
        w2r_ok: snapshot.w2r_hat == msgs.w2r,
    })
}
