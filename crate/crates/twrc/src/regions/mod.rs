//! Rate regions of the two-phase relaying protocol as membership predicates.
//!
//! Every region is exposed two ways: a `*_member` function that returns a
//! [`RegionReport`] with one signed slack per inequality (slack = bound minus
//! achieved value, so membership means every slack is `>= -tol`), and a
//! crate-internal boolean fast path used by bisection loops.
//!
//! Regions with MAC-phase (`_ma`) and broadcast-phase (`_bc`) parts compose
//! by intersection. The outer bound and the conventional-MAC region are
//! symmetric in the source labels, so they are evaluated in the caller's
//! labeling. The EER-BR family is defined relative to the weaker source and
//! internally relabels sources whenever `p1 > p2` (the report's `swapped`
//! flag records this), which makes every public predicate symmetric.

mod hull;
mod slice;

pub use hull::hull_member;
pub use slice::{boundary_slice, RateAxis, RegionId, SliceRow, SliceSpec};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rate_math::{capacity_c, gamma, lattice_rate_d, Snr};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One problem instance: MAC-phase transmit SNRs of the two sources and
/// BC-phase SNRs from the relay to each source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Source-1 MAC-phase SNR.
    pub p1: Snr,
    /// Source-2 MAC-phase SNR.
    pub p2: Snr,
    /// Relay-to-source-1 BC-phase SNR.
    pub pr1: Snr,
    /// Relay-to-source-2 BC-phase SNR.
    pub pr2: Snr,
}

impl ChannelConfig {
    pub fn new(p1: f64, p2: f64, pr1: f64, pr2: f64) -> Result<Self, Error> {
        Ok(Self {
            p1: Snr::new(p1)?,
            p2: Snr::new(p2)?,
            pr1: Snr::new(pr1)?,
            pr2: Snr::new(pr2)?,
        })
    }

    pub fn is_canonical(&self) -> bool {
        self.p1.value() <= self.p2.value()
    }

    /// The same channel with the source labels exchanged.
    pub(crate) fn source_swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
            pr1: self.pr2,
            pr2: self.pr1,
        }
    }
}

/// A point in the four-dimensional rate space, bits/symbol.
///
/// `r12`/`r21` are the exchange-message rates, `r1r`/`r2r` the private rates
/// to the relay. All components are finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTuple {
    pub r12: f64,
    pub r21: f64,
    pub r1r: f64,
    pub r2r: f64,
}

impl RateTuple {
    pub fn new(r12: f64, r21: f64, r1r: f64, r2r: f64) -> Result<Self, Error> {
        for v in [r12, r21, r1r, r2r] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidRate(v));
            }
        }
        Ok(Self { r12, r21, r1r, r2r })
    }

    pub fn origin() -> Self {
        Self {
            r12: 0.0,
            r21: 0.0,
            r1r: 0.0,
            r2r: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.r12, self.r21, self.r1r, self.r2r]
    }

    pub fn from_array(a: [f64; 4]) -> Result<Self, Error> {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Componentwise `<=` with absolute tolerance.
    pub fn le(&self, other: &Self, tol: f64) -> bool {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .all(|(a, b)| *a <= b + tol)
    }

    /// Shift every component down by `s`, clamping at zero.
    pub fn shifted_down(&self, s: f64) -> Self {
        Self {
            r12: (self.r12 - s).max(0.0),
            r21: (self.r21 - s).max(0.0),
            r1r: (self.r1r - s).max(0.0),
            r2r: (self.r2r - s).max(0.0),
        }
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            r12: self.r12 * f,
            r21: self.r21 * f,
            r1r: self.r1r * f,
            r2r: self.r2r * f,
        }
    }

    /// The same point with the source labels exchanged.
    pub(crate) fn source_swapped(&self) -> Self {
        Self {
            r12: self.r21,
            r21: self.r12,
            r1r: self.r2r,
            r2r: self.r1r,
        }
    }
}

/// One evaluated inequality: `value` is the bound minus the achieved rate,
/// so non-negative (up to tolerance) means satisfied.
#[derive(Debug, Clone, Serialize)]
pub struct Slack {
    pub constraint: String,
    pub value: f64,
}

impl Slack {
    fn new(constraint: &str, value: f64) -> Self {
        Self {
            constraint: constraint.to_string(),
            value,
        }
    }
}

/// Parameters that witness membership of a parametric region.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// EER-BR time-sharing fraction and exchange-rate surplus.
    Eer { alpha: f64, delta: f64 },
    /// Certified two-point decomposition of a convex-hull member.
    Hull {
        lambda: f64,
        eer_point: RateTuple,
        mac_point: RateTuple,
    },
}

/// Membership verdict with per-inequality slacks.
#[derive(Debug, Clone, Serialize)]
pub struct RegionReport {
    pub member: bool,
    /// True when the predicate internally relabeled the sources to restore
    /// the canonical power order `p1 <= p2`; slack labels then refer to the
    /// relabeled coordinates.
    pub swapped: bool,
    pub slacks: Vec<Slack>,
    pub witness: Option<Witness>,
}

impl RegionReport {
    fn from_slacks(swapped: bool, slacks: Vec<Slack>, witness: Option<Witness>, tol: f64) -> Self {
        let member = slacks.iter().all(|s| s.value >= -tol);
        Self {
            member,
            swapped,
            slacks,
            witness: if member { witness } else { None },
        }
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks
            .iter()
            .map(|s| s.value)
            .fold(f64::INFINITY, f64::min)
    }

    /// The most violated inequality, if any fails at tolerance `tol`.
    pub fn worst_violation(&self, tol: f64) -> Option<&Slack> {
        self.slacks
            .iter()
            .filter(|s| s.value < -tol)
            .min_by(|a, b| a.value.total_cmp(&b.value))
    }
}

/// Relabel sources so the MAC powers satisfy `p1 <= p2`.
fn canonical(cfg: &ChannelConfig, r: &RateTuple) -> (ChannelConfig, RateTuple, bool) {
    if cfg.is_canonical() {
        (*cfg, *r, false)
    } else {
        (cfg.source_swapped(), r.source_swapped(), true)
    }
}

// ---------------------------------------------------------------------------
// Outer bound (converse) and conventional-MAC region
// ---------------------------------------------------------------------------

const BC_LABELS: [&str; 2] = ["r12 <= C(pr2)", "r21 <= C(pr1)"];

fn outer_bc_slacks(cfg: &ChannelConfig, r: &RateTuple) -> [f64; 2] {
    [
        capacity_c(cfg.pr2) - r.r12,
        capacity_c(cfg.pr1) - r.r21,
    ]
}

const OUTER_MA_LABELS: [&str; 3] = [
    "r1r + r12 <= C(p1)",
    "r2r + r21 <= C(p2)",
    "r1r + r2r + max(r12, r21) <= C(p1 + p2)",
];

fn outer_ma_slacks(cfg: &ChannelConfig, r: &RateTuple) -> [f64; 3] {
    let c12 = capacity_c(Snr::new(cfg.p1.value() + cfg.p2.value()).expect("sum of valid SNRs"));
    [
        capacity_c(cfg.p1) - (r.r1r + r.r12),
        capacity_c(cfg.p2) - (r.r2r + r.r21),
        c12 - (r.r1r + r.r2r + r.r12.max(r.r21)),
    ]
}

const CONV_MAC_MA_LABELS: [&str; 3] = [
    "r1r + r12 <= C(p1)",
    "r2r + r21 <= C(p2)",
    "r1r + r2r + r12 + r21 <= C(p1 + p2)",
];

fn conv_mac_ma_slacks(cfg: &ChannelConfig, r: &RateTuple) -> [f64; 3] {
    let c12 = capacity_c(Snr::new(cfg.p1.value() + cfg.p2.value()).expect("sum of valid SNRs"));
    [
        capacity_c(cfg.p1) - (r.r1r + r.r12),
        capacity_c(cfg.p2) - (r.r2r + r.r21),
        c12 - (r.r1r + r.r2r + r.r12 + r.r21),
    ]
}

fn labeled(labels: &[&str], slacks: &[f64]) -> Vec<Slack> {
    labels
        .iter()
        .zip(slacks)
        .map(|(l, v)| Slack::new(l, *v))
        .collect()
}

/// BC-phase outer bound: `r12 <= C(pr2)`, `r21 <= C(pr1)`.
pub fn outer_bc_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let s = outer_bc_slacks(cfg, r);
    RegionReport::from_slacks(false, labeled(&BC_LABELS, &s), None, tol)
}

/// MAC-phase outer bound: the three converse inequalities.
pub fn outer_ma_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let s = outer_ma_slacks(cfg, r);
    RegionReport::from_slacks(false, labeled(&OUTER_MA_LABELS, &s), None, tol)
}

/// Full outer bound: intersection of the BC and MAC parts.
pub fn outer_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let mut slacks = labeled(&BC_LABELS, &outer_bc_slacks(cfg, r));
    slacks.extend(labeled(&OUTER_MA_LABELS, &outer_ma_slacks(cfg, r)));
    RegionReport::from_slacks(false, slacks, None, tol)
}

/// MAC-phase region of the conventional-MAC scheme (full four-rate sum).
pub fn conv_mac_ma_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let s = conv_mac_ma_slacks(cfg, r);
    RegionReport::from_slacks(false, labeled(&CONV_MAC_MA_LABELS, &s), None, tol)
}

/// Achievable region of the conventional-MAC scheme: BC part plus the
/// classical MAC region with each source's exchange and private rates summed.
pub fn conv_mac_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let mut slacks = labeled(&BC_LABELS, &outer_bc_slacks(cfg, r));
    slacks.extend(labeled(&CONV_MAC_MA_LABELS, &conv_mac_ma_slacks(cfg, r)));
    RegionReport::from_slacks(false, slacks, None, tol)
}

pub(crate) fn outer_bc_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    outer_bc_slacks(cfg, r).iter().all(|v| *v >= -tol)
}

pub(crate) fn outer_ma_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    outer_ma_slacks(cfg, r).iter().all(|v| *v >= -tol)
}

pub(crate) fn outer_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    outer_bc_contains(cfg, r, tol) && outer_ma_contains(cfg, r, tol)
}

pub(crate) fn conv_mac_ma_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    conv_mac_ma_slacks(cfg, r).iter().all(|v| *v >= -tol)
}

pub(crate) fn conv_mac_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    outer_bc_contains(cfg, r, tol) && conv_mac_ma_contains(cfg, r, tol)
}

// ---------------------------------------------------------------------------
// EER-BR region
// ---------------------------------------------------------------------------

/// Upper bounds on the private rates of the time-shared scheme at fraction
/// `alpha`, for the weaker source, the stronger source, and their sum.
///
/// Bounds are clamped at zero so the region is always a subset of the
/// non-negative quadrant (floating-point noise can otherwise produce tiny
/// negative bounds at `alpha = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrivateBounds {
    pub weak_max: f64,
    pub strong_max: f64,
    pub sum_max: f64,
}

/// The private-rate bounds `(1-alpha) C(P1)`, `C(P2) - alpha Gamma`,
/// `C(P1+P2) - alpha C(2 P1)` with the canonical power order applied.
pub fn eer_private_region(cfg: &ChannelConfig, alpha: f64) -> Result<PrivateBounds, Error> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaRange(alpha));
    }
    let c = if cfg.is_canonical() {
        *cfg
    } else {
        cfg.source_swapped()
    };
    Ok(private_bounds_canonical(&c, alpha))
}

/// Same as [`eer_private_region`] but assumes `cfg` is already canonical and
/// `alpha` validated.
fn private_bounds_canonical(cfg: &ChannelConfig, alpha: f64) -> PrivateBounds {
    let p1 = cfg.p1.value();
    let p2 = cfg.p2.value();
    let c1 = capacity_c(cfg.p1);
    let c2 = capacity_c(cfg.p2);
    let c12 = capacity_c(Snr::new(p1 + p2).expect("sum of valid SNRs"));
    let c2p1 = capacity_c(Snr::new(2.0 * p1).expect("doubled valid SNR"));
    let g = gamma(cfg.p1, cfg.p2).expect("canonical power order");
    PrivateBounds {
        weak_max: ((1.0 - alpha) * c1).max(0.0),
        strong_max: (c2 - alpha * g).max(0.0),
        sum_max: (c12 - alpha * c2p1).max(0.0),
    }
}

const EER_MA_LABELS: [&str; 4] = [
    "min(r12, r21) <= D(p1)",
    "r1r' <= (1 - alpha) C(p1)",
    "r2r' <= C(p2) - alpha Gamma",
    "r1r' + r2r' <= C(p1 + p2) - alpha C(2 p1)",
];

struct EerMaEval {
    slacks: [f64; 4],
    alpha: f64,
    delta: f64,
}

/// Closed-form MAC-phase membership test for the EER-BR region.
///
/// Expects canonical coordinates. Orients the bit relabeling so the smaller
/// exchange rate plays the shared lattice rate `R0 = alpha D(p1)`; the
/// surplus `delta` of the longer exchange message is accounted to the same
/// source's underlying private rate (`r1r'`, `r2r'` in the slack labels).
/// The minimal feasible `alpha = R0 / D(p1)` is used: the private bounds are
/// non-increasing in `alpha`, so it dominates every other choice.
fn eer_br_ma_eval(cfg: &ChannelConfig, r: &RateTuple) -> EerMaEval {
    let d1 = lattice_rate_d(cfg.p1);
    let (r0, delta, under_weak, under_strong) = if r.r12 <= r.r21 {
        let delta = r.r21 - r.r12;
        (r.r12, delta, r.r1r, r.r2r + delta)
    } else {
        let delta = r.r12 - r.r21;
        (r.r21, delta, r.r1r + delta, r.r2r)
    };
    let alpha = if d1 > 0.0 {
        (r0 / d1).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let b = private_bounds_canonical(cfg, alpha);
    EerMaEval {
        slacks: [
            d1 - r0,
            b.weak_max - under_weak,
            b.strong_max - under_strong,
            b.sum_max - (under_weak + under_strong),
        ],
        alpha,
        delta,
    }
}

/// MAC-phase membership in the EER-BR region, with witness `(alpha, delta)`
/// on success.
pub fn eer_br_ma_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let (c, rc, swapped) = canonical(cfg, r);
    let eval = eer_br_ma_eval(&c, &rc);
    RegionReport::from_slacks(
        swapped,
        labeled(&EER_MA_LABELS, &eval.slacks),
        Some(Witness::Eer {
            alpha: eval.alpha,
            delta: eval.delta,
        }),
        tol,
    )
}

/// Full EER-BR achievable region: BC part plus the MAC-phase region.
pub fn eer_br_member(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> RegionReport {
    let (c, rc, swapped) = canonical(cfg, r);
    let mut slacks = labeled(&BC_LABELS, &outer_bc_slacks(&c, &rc));
    let eval = eer_br_ma_eval(&c, &rc);
    slacks.extend(labeled(&EER_MA_LABELS, &eval.slacks));
    RegionReport::from_slacks(
        swapped,
        slacks,
        Some(Witness::Eer {
            alpha: eval.alpha,
            delta: eval.delta,
        }),
        tol,
    )
}

pub(crate) fn eer_br_ma_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    let (c, rc, _) = canonical(cfg, r);
    eer_br_ma_eval(&c, &rc).slacks.iter().all(|v| *v >= -tol)
}

pub(crate) fn eer_br_contains(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> bool {
    let (c, rc, _) = canonical(cfg, r);
    outer_bc_contains(&c, &rc, tol) && eer_br_ma_eval(&c, &rc).slacks.iter().all(|v| *v >= -tol)
}

/// Re-substitute an explicit witness `(alpha, delta)` into the time-sharing
/// bounds and the relabeling map, without recomputing either parameter.
///
/// Used to validate witnesses independently of the closed-form membership
/// path: the point is a member under `(alpha, delta)` iff all five slacks
/// are `>= -tol`.
pub fn eer_witness_check(
    cfg: &ChannelConfig,
    r: &RateTuple,
    alpha: f64,
    delta: f64,
    tol: f64,
) -> Result<RegionReport, Error> {
    if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaRange(alpha));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidRate(delta));
    }
    let (c, rc, swapped) = canonical(cfg, r);
    let d1 = lattice_rate_d(c.p1);
    let r0_bound = alpha * d1;
    let (r0, rlong, under_weak, under_strong) = if rc.r12 <= rc.r21 {
        (rc.r12, rc.r21, rc.r1r, rc.r2r + delta)
    } else {
        (rc.r21, rc.r12, rc.r1r + delta, rc.r2r)
    };
    let b = private_bounds_canonical(&c, alpha);
    let slacks = vec![
        Slack::new("min(r12, r21) <= alpha D(p1)", r0_bound - r0),
        Slack::new("max(r12, r21) <= alpha D(p1) + delta", r0_bound + delta - rlong),
        Slack::new(EER_MA_LABELS[1], b.weak_max - under_weak),
        Slack::new(EER_MA_LABELS[2], b.strong_max - under_strong),
        Slack::new(EER_MA_LABELS[3], b.sum_max - (under_weak + under_strong)),
    ];
    Ok(RegionReport::from_slacks(
        swapped,
        slacks,
        Some(Witness::Eer { alpha, delta }),
        tol,
    ))
}

// ---------------------------------------------------------------------------
// Member samplers (inclusion tests, demos)
// ---------------------------------------------------------------------------

/// Draw a tuple inside the conventional-MAC region by construction.
pub fn sample_conv_mac<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> RateTuple {
    let c1 = capacity_c(cfg.p1);
    let c2 = capacity_c(cfg.p2);
    let c12 = capacity_c(Snr::new(cfg.p1.value() + cfg.p2.value()).expect("sum of valid SNRs"));
    let s1 = rng.random::<f64>() * c1;
    let f1 = rng.random::<f64>();
    let s2 = rng.random::<f64>() * c2;
    let f2 = rng.random::<f64>();
    let (mut r12, mut r1r) = (s1 * f1, s1 * (1.0 - f1));
    let (mut r21, mut r2r) = (s2 * f2, s2 * (1.0 - f2));
    let total = r12 + r21 + r1r + r2r;
    if total > c12 && total > 0.0 {
        let scale = c12 / total;
        r12 *= scale;
        r21 *= scale;
        r1r *= scale;
        r2r *= scale;
    }
    r12 = r12.min(capacity_c(cfg.pr2));
    r21 = r21.min(capacity_c(cfg.pr1));
    RateTuple::new(r12, r21, r1r, r2r).expect("constructed inside the region")
}

/// Draw a tuple inside the EER-BR region by construction, via the
/// time-sharing parametrization plus bit relabeling.
pub fn sample_eer_br<R: Rng + ?Sized>(cfg: &ChannelConfig, rng: &mut R) -> RateTuple {
    let (c, _, swapped) = canonical(cfg, &RateTuple::origin());
    let d1 = lattice_rate_d(c.p1);
    let alpha = rng.random::<f64>();
    let r0 = alpha * d1;
    let b = private_bounds_canonical(&c, alpha);
    let mut u1 = rng.random::<f64>() * b.weak_max;
    let mut u2 = rng.random::<f64>() * b.strong_max;
    let sum = u1 + u2;
    if sum > b.sum_max && sum > 0.0 {
        let scale = b.sum_max / sum;
        u1 *= scale;
        u2 *= scale;
    }
    let delta = rng.random::<f64>() * u2;
    let r12 = r0.min(capacity_c(c.pr2));
    let r21 = (r0 + delta).min(capacity_c(c.pr1));
    let t = RateTuple::new(r12, r21, u1, u2 - delta).expect("constructed inside the region");
    if swapped {
        t.source_swapped()
    } else {
        t
    }
}
