//! Uncoded q-ary PAM demo of the superposition MAC phase under Gaussian
//! noise, and Monte-Carlo symbol-error curves for the two relay decoding
//! stages.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::regions::ChannelConfig;

use super::lattice::{mod_add, LatticeWord};

/// Superposition transmitter plus two-stage successive decoder.
///
/// Symbols use q-ary PAM normalized to unit average power over a uniform
/// symbol distribution, matching the per-codeword unit power constraint in
/// expectation. The relay first decodes the private stream by per-symbol
/// nearest neighbor (treating the lattice sum as interference), cancels it,
/// then decodes the integer sum on the unbounded PAM sum grid and reduces
/// modulo q.
pub(crate) struct Superposition {
    q: u32,
    scale: f64,
    amp_lattice: f64,
    amp_private: f64,
}

impl Superposition {
    pub(crate) fn new(q: u32, p1: f64, p2: f64, snr_scale: f64) -> Self {
        let qf = q as f64;
        Self {
            q,
            scale: (3.0 / (qf * qf - 1.0)).sqrt(),
            amp_lattice: (p1 * snr_scale).sqrt(),
            amp_private: ((p2 - p1) * snr_scale).sqrt(),
        }
    }

    fn pam(&self, s: u32) -> f64 {
        self.scale * (2.0 * s as f64 - (self.q as f64 - 1.0))
    }

    /// Nearest constellation point on the uniform PAM grid scaled by `gain`.
    fn nearest_symbol(&self, y: f64, gain: f64) -> u32 {
        if gain <= 0.0 {
            return 0;
        }
        let s = ((y / (gain * self.scale) + (self.q as f64 - 1.0)) / 2.0).round();
        if s.is_nan() {
            return 0;
        }
        s.clamp(0.0, (self.q - 1) as f64) as u32
    }

    /// Nearest point of the unbounded integer sum grid, reduced modulo q:
    /// the modulo-lattice decoder for the sum of two PAM symbols.
    fn nearest_modsum(&self, y: f64) -> u32 {
        let q = self.q as f64;
        let u = (y / (2.0 * self.amp_lattice * self.scale) + (q - 1.0)).round();
        if u.is_nan() {
            return 0;
        }
        (u as i64).rem_euclid(self.q as i64) as u32
    }

    /// Transmit the three streams through the Gaussian MAC and run the
    /// relay's successive decoder. Returns the decoded private word and the
    /// decoded modulo-sum word.
    pub(crate) fn transmit_and_decode<R: Rng + ?Sized>(
        &self,
        t12: &LatticeWord,
        t21: &LatticeWord,
        t_private: &LatticeWord,
        noise_var: f64,
        rng: &mut R,
    ) -> Result<(LatticeWord, LatticeWord), Error> {
        let n = t12.len();
        let noise = if noise_var > 0.0 {
            let normal = Normal::new(0.0, noise_var.sqrt())
                .map_err(|e| Error::InvalidParam(format!("noise distribution: {e}")))?;
            (0..n).map(|_| normal.sample(rng)).collect()
        } else {
            vec![0.0; n]
        };
        let mut private_hat = Vec::with_capacity(n);
        let mut modsum_hat = Vec::with_capacity(n);
        for (m, z) in noise.iter().enumerate() {
            let y = self.amp_lattice * (self.pam(t12.symbols()[m]) + self.pam(t21.symbols()[m]))
                + self.amp_private * self.pam(t_private.symbols()[m])
                + z;
            let s_private = self.nearest_symbol(y, self.amp_private);
            let cancelled = y - self.amp_private * self.pam(s_private);
            private_hat.push(s_private);
            modsum_hat.push(self.nearest_modsum(cancelled));
        }
        Ok((
            LatticeWord::new(self.q, private_hat)?,
            LatticeWord::new(self.q, modsum_hat)?,
        ))
    }
}

/// Monte-Carlo symbol-error rates of one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SerPoint {
    /// Linear power scale applied to both transmit powers (noise stays at
    /// unit variance).
    pub snr: f64,
    /// Symbol-error rate of the private-stream stage.
    pub ser_private: f64,
    /// Symbol-error rate of the modulo-sum stage.
    pub ser_modsum: f64,
    pub trials: u64,
    pub seed: u64,
}

fn random_word<R: Rng + ?Sized>(q: u32, n: usize, rng: &mut R) -> LatticeWord {
    let symbols = (0..n).map(|_| rng.random_range(0..q)).collect();
    LatticeWord::new(q, symbols).expect("symbols drawn below the modulus")
}

/// Monte-Carlo symbol-error curves for the relay's two decoding stages.
///
/// Each SNR point scales the configured powers against unit-variance noise;
/// uniform random words are drawn for all three streams, and errors are
/// counted per symbol against the true private word and true modulo-sum.
/// Trial `t` of point `i` uses PRNG stream `(i << 32) | t`, so the curve is
/// deterministic for a fixed seed.
pub fn ser_curve(
    cfg: &ChannelConfig,
    q: u32,
    n: usize,
    snr_points: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SerPoint>, Error> {
    if snr_points.is_empty() {
        return Err(Error::InvalidParam("no SNR points given".to_string()));
    }
    if trials < 1 {
        return Err(Error::InvalidParam("at least one trial required".to_string()));
    }
    if trials > u32::MAX as u64 {
        return Err(Error::InvalidParam(format!(
            "trial count {trials} exceeds the per-point stream budget"
        )));
    }
    if q < 2 || n == 0 {
        return Err(Error::InvalidWord(format!(
            "need q >= 2 and n >= 1, got q = {q}, n = {n}"
        )));
    }
    if !cfg.is_canonical() {
        return Err(Error::PowerOrder {
            p1: cfg.p1.value(),
            p2: cfg.p2.value(),
        });
    }
    if cfg.p1.value() == 0.0 {
        return Err(Error::InvalidParam(
            "the superposition demo needs p1 > 0 for the lattice stream".to_string(),
        ));
    }
    for &s in snr_points {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidSnr(s));
        }
    }

    let mut points = Vec::with_capacity(snr_points.len());
    for (index, &snr) in snr_points.iter().enumerate() {
        let channel = Superposition::new(q, cfg.p1.value(), cfg.p2.value(), snr);
        let (errs_private, errs_modsum) = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((index as u64) << 32) | trial);
                let t12 = random_word(q, n, &mut rng);
                let t21 = random_word(q, n, &mut rng);
                let tp = random_word(q, n, &mut rng);
                let (p_hat, s_hat) = channel
                    .transmit_and_decode(&t12, &t21, &tp, 1.0, &mut rng)
                    .expect("validated parameters");
                let truth_sum = mod_add(&t12, &t21).expect("same (q, n)");
                let ep = p_hat
                    .symbols()
                    .iter()
                    .zip(tp.symbols())
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                let es = s_hat
                    .symbols()
                    .iter()
                    .zip(truth_sum.symbols())
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                (ep, es)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let total = (trials * n as u64) as f64;
        points.push(SerPoint {
            snr,
            ser_private: errs_private as f64 / total,
            ser_modsum: errs_modsum as f64 / total,
            trials,
            seed,
        });
    }
    Ok(points)
}

/// Zero-noise agreement with the genie path needs the treat-as-noise
/// separation `2 (q - 1) sqrt(p1) < sqrt(p2 - p1)`; exposed for tests and
/// the CLI to pick sensible demo configurations.
pub fn zero_noise_separation(cfg: &ChannelConfig, q: u32) -> bool {
    let p1 = cfg.p1.value();
    let p2 = cfg.p2.value();
    2.0 * (q as f64 - 1.0) * p1.sqrt() < (p2 - p1).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::{run_mac_phase, MacMode, MessageSet, MessageWidths};
    use super::*;
    use crate::rate_math::DEFAULT_TOL;
    use crate::regions::RateTuple;

    fn word(q: u32, symbols: &[u32]) -> LatticeWord {
        LatticeWord::new(q, symbols.to_vec()).unwrap()
    }

    #[test]
    fn noiseless_decoding_with_separation_is_exact() {
        // 2 (q-1) sqrt(p1) = 6 < sqrt(99): interference never crosses a
        // private decision boundary, so zero noise decodes exactly.
        let channel = Superposition::new(4, 1.0, 100.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t12 = random_word(4, 8, &mut rng);
            let t21 = random_word(4, 8, &mut rng);
            let tp = random_word(4, 8, &mut rng);
            let (p_hat, s_hat) = channel
                .transmit_and_decode(&t12, &t21, &tp, 0.0, &mut rng)
                .unwrap();
            assert_eq!(p_hat, tp);
            assert_eq!(s_hat, mod_add(&t12, &t21).unwrap());
        }
    }

    #[test]
    fn awgn_mode_matches_genie_at_zero_noise() {
        let cfg = ChannelConfig::new(1.0, 100.0, 1.0, 1.0).unwrap();
        assert!(zero_noise_separation(&cfg, 4));
        // Operating point inside the EER-BR MAC region of (1, 100):
        // alpha = 0.25/D(1) ~ 0.855, strong private 0.375 + 0.125 under
        // C(100) - alpha Gamma.
        let rates = RateTuple::new(0.25, 0.375, 0.0, 0.375).unwrap();
        let widths = MessageWidths::from_rates(&rates, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let msgs = MessageSet::random(&widths, &mut rng);
            let genie = run_mac_phase(&cfg, &rates, 4, 8, &msgs, MacMode::Genie, DEFAULT_TOL)
                .unwrap();
            let awgn = run_mac_phase(
                &cfg,
                &rates,
                4,
                8,
                &msgs,
                MacMode::Awgn { seed: trial, noise_var: 0.0 },
                DEFAULT_TOL,
            )
            .unwrap();
            assert_eq!(genie, awgn, "trial {trial}: {msgs:?}");
        }
    }

    #[test]
    fn ser_rejects_bad_parameters() {
        let cfg = ChannelConfig::new(1.0, 8.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            ser_curve(&cfg, 4, 8, &[], 10, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            ser_curve(&cfg, 4, 8, &[1.0], 0, 1),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            ser_curve(&cfg, 4, 8, &[-1.0], 10, 1),
            Err(Error::InvalidSnr(_))
        ));
        let zero_p1 = ChannelConfig::new(0.0, 8.0, 1.0, 1.0).unwrap();
        assert!(ser_curve(&zero_p1, 4, 8, &[1.0], 10, 1).is_err());
    }

    #[test]
    fn deep_noise_makes_the_modsum_stage_guess_uniformly() {
        // snr ~ 0 is the variance -> infinity limit: the decoded residue is
        // uniform over Z_q, so the error rate sits near 1 - 1/q.
        let cfg = ChannelConfig::new(1.0, 8.0, 1.0, 1.0).unwrap();
        let trials = 4000u64;
        let points = ser_curve(&cfg, 4, 8, &[1e-9], trials, 9).unwrap();
        let p = points[0].ser_modsum;
        let expect = 0.75;
        let sigma = (expect * (1.0 - expect) / (trials as f64 * 8.0)).sqrt();
        assert!(
            (p - expect).abs() < 3.0 * sigma + 1e-3,
            "modsum SER {p} too far from {expect}"
        );
    }

    #[test]
    fn ser_is_monotone_in_snr() {
        let cfg = ChannelConfig::new(1.0, 8.0, 1.0, 1.0).unwrap();
        let trials = 3000u64;
        let snrs = [0.1, 0.5, 2.0, 8.0, 32.0];
        let points = ser_curve(&cfg, 4, 16, &snrs, trials, 17).unwrap();
        let total = (trials * 16) as f64;
        for pair in points.windows(2) {
            for (lo, hi) in [
                (pair[1].ser_private, pair[0].ser_private),
                (pair[1].ser_modsum, pair[0].ser_modsum),
            ] {
                let sigma =
                    ((lo * (1.0 - lo) + hi * (1.0 - hi)) / total).sqrt();
                assert!(
                    lo <= hi + 3.0 * sigma + 1e-9,
                    "SER increased with SNR: {lo} > {hi} (sigma {sigma})"
                );
            }
        }
    }

    #[test]
    fn ser_is_deterministic_for_a_seed() {
        let cfg = ChannelConfig::new(1.0, 8.0, 1.0, 1.0).unwrap();
        let a = ser_curve(&cfg, 4, 8, &[0.5, 2.0], 500, 23).unwrap();
        let b = ser_curve(&cfg, 4, 8, &[0.5, 2.0], 500, 23).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn modsum_decoder_wraps_instead_of_clamping() {
        // A sum landing on the wrapped side of the grid must come back
        // reduced, not clamped to the edge.
        let channel = Superposition::new(4, 1.0, 1.0, 1.0);
        let t12 = word(4, &[3, 3, 3]);
        let t21 = word(4, &[3, 0, 1]);
        let tp = word(4, &[0, 0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, s_hat) = channel.transmit_and_decode(&t12, &t21, &tp, 0.0, &mut rng).unwrap();
        assert_eq!(s_hat, mod_add(&t12, &t21).unwrap());
        assert_eq!(s_hat.symbols(), &[2, 3, 0]);
    }
}
