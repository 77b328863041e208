//! Constructive certification of the half-bit optimality gap.
//!
//! For any tuple in the MAC-phase outer bound, shifting every component down
//! by half a bit (clamping at zero) lands inside the EER-BR MAC-phase
//! region. [`certify_tuple`] produces the explicit `(alpha, delta)` witness
//! for the shifted tuple and aborts loudly if the membership check ever
//! fails, since that would falsify the half-bit theorem. [`sweep_gap`] hunts
//! for counterexamples over randomized channels and boundary tuples and
//! doubles as the reproducibility harness: every trial derives its own
//! PRNG stream from `(seed, trial index)`, so the aggregate is deterministic
//! regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::rate_math::{Snr, HALF_BIT};
use crate::regions::{
    conv_mac_ma_contains, eer_br_ma_contains, eer_br_ma_member, outer_ma_contains,
    outer_ma_member, ChannelConfig, RateTuple, Slack, Witness,
};

/// Which of the two exchange rates of the unshifted tuple was the smaller
/// one (the lattice rate `R0` of the relabeling).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallerExchange {
    R12,
    R21,
}

/// Certificate that the half-bit-shifted tuple lies in the EER-BR MAC-phase
/// region.
#[derive(Debug, Clone, Serialize)]
pub struct GapWitness {
    /// Time-sharing fraction certifying the shifted tuple (the minimal
    /// feasible choice, matching the region predicate's witness).
    pub alpha: f64,
    /// Exchange-rate surplus absorbed by bit relabeling.
    pub delta: f64,
    /// Orientation of the relabeling on the unshifted tuple.
    pub oriented: SmallerExchange,
    /// The componentwise `max(0, r - 1/2)` tuple that was certified.
    pub shifted_tuple: RateTuple,
    /// Per-inequality slacks of the shifted tuple in the EER-BR MAC-phase
    /// region; all are `>= -tol` for a valid certificate.
    pub slacks: Vec<Slack>,
}

/// Inner certification step shared by [`certify_tuple`] and [`sweep_gap`]:
/// shift, test membership, package the witness. Errors carry the failing
/// report for diagnostics instead of aborting.
fn certify_shifted(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> Result<GapWitness, Vec<Slack>> {
    let shifted = r.shifted_down(HALF_BIT);
    let rep = eer_br_ma_member(cfg, &shifted, tol);
    if !rep.member {
        return Err(rep.slacks);
    }
    let Some(Witness::Eer { alpha, delta }) = rep.witness else {
        unreachable!("EER-BR membership always carries an EER witness");
    };
    Ok(GapWitness {
        alpha,
        delta,
        oriented: if r.r12 <= r.r21 {
            SmallerExchange::R12
        } else {
            SmallerExchange::R21
        },
        shifted_tuple: shifted,
        slacks: rep.slacks,
    })
}

/// Certify that `max(0, r - 1/2)` is an EER-BR MAC-phase member.
///
/// The tuple must lie in the MAC-phase outer bound; anything else is a
/// precondition error naming the violated inequality. An internal
/// validation failure would falsify the half-bit theorem and panics with
/// full reproduction data.
pub fn certify_tuple(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> Result<GapWitness, Error> {
    let pre = outer_ma_member(cfg, r, tol);
    if !pre.member {
        let v = pre
            .worst_violation(tol)
            .expect("non-member report has a violation");
        return Err(Error::OutsideOuterMa {
            constraint: v.constraint.clone(),
            slack: v.value,
        });
    }
    match certify_shifted(cfg, r, tol) {
        Ok(w) => Ok(w),
        Err(slacks) => panic!(
            "half-bit certification failed; this would falsify the half-bit gap theorem. \
             cfg = {cfg:?}, tuple = {r:?}, shifted = {:?}, slacks = {slacks:?}",
            r.shifted_down(HALF_BIT),
        ),
    }
}

// ---------------------------------------------------------------------------
// Randomized sweep
// ---------------------------------------------------------------------------

/// Sweep configuration. Powers are drawn log-uniformly from `power_range`
/// unless `fixed_cfg` pins the channel; rays are drawn uniformly over the
/// positive orthant (with faces visited by zeroing components) unless
/// `fixed_ray` pins the direction.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub trials: u64,
    pub seed: u64,
    pub power_range: (f64, f64),
    pub fixed_cfg: Option<ChannelConfig>,
    pub fixed_ray: Option<[f64; 4]>,
}

impl SweepSpec {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            power_range: (1e-2, 1e2),
            fixed_cfg: None,
            fixed_ray: None,
        }
    }
}

/// Reproduction data for a failed certification.
#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub trial: u64,
    pub seed: u64,
    pub cfg: ChannelConfig,
    pub tuple: RateTuple,
    pub slacks: Vec<Slack>,
}

/// Aggregate sweep outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub trials: u64,
    pub failures: u64,
    /// Largest over all trials of the minimal per-component shift that still
    /// certifies; at most 1/2 by the gap theorem.
    pub max_needed_shift: f64,
    pub seed: u64,
    pub power_range: (f64, f64),
    pub failure_reports: Vec<FailureReport>,
}

struct TrialOutcome {
    needed_shift: f64,
    failure: Option<FailureReport>,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> f64 {
    let (lo, hi) = range;
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn random_cfg<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> ChannelConfig {
    ChannelConfig::new(
        log_uniform(rng, range),
        log_uniform(rng, range),
        log_uniform(rng, range),
        log_uniform(rng, range),
    )
    .expect("log-uniform draws are finite and positive")
}

fn random_ray<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let mut dir = [0.0f64; 4];
    for d in dir.iter_mut() {
        // Zero a component a quarter of the time so faces of the bound get
        // visited, not just the interior cone.
        let zero = rng.random::<f64>() < 0.25;
        let mag = rng.random::<f64>();
        *d = if zero { 0.0 } else { mag };
    }
    if dir.iter().all(|d| *d < 1e-12) {
        dir = [1.0; 4];
    }
    dir
}

/// Furthest member point along `dir`, by doubling plus 20 bisections.
fn ray_boundary(contains: impl Fn(&RateTuple) -> bool, dir: [f64; 4]) -> RateTuple {
    let point = |t: f64| {
        RateTuple::new(dir[0] * t, dir[1] * t, dir[2] * t, dir[3] * t)
            .expect("scaled non-negative direction")
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while contains(&point(hi)) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            break;
        }
    }
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if contains(&point(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point(lo)
}

/// Minimal shift `s` for which `max(0, r - s)` certifies, bisected over
/// `[0, 1/2]`; `certified_at_half` must already hold.
fn minimal_certifying_shift(cfg: &ChannelConfig, r: &RateTuple, tol: f64) -> f64 {
    let ok = |s: f64| eer_br_ma_contains(cfg, &r.shifted_down(s), tol);
    if ok(0.0) {
        return 0.0;
    }
    let mut lo = 0.0f64; // does not certify
    let mut hi = HALF_BIT; // certifies
    for _ in 0..25 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn run_trial(spec: &SweepSpec, trial: u64, tol: f64) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial);
    let cfg = spec
        .fixed_cfg
        .unwrap_or_else(|| random_cfg(&mut rng, spec.power_range));
    let dir = spec.fixed_ray.unwrap_or_else(|| random_ray(&mut rng));
    let boundary = ray_boundary(|r| outer_ma_contains(&cfg, r, tol), dir);
    match certify_shifted(&cfg, &boundary, tol) {
        Ok(_) => TrialOutcome {
            needed_shift: minimal_certifying_shift(&cfg, &boundary, tol),
            failure: None,
        },
        Err(slacks) => TrialOutcome {
            needed_shift: HALF_BIT,
            failure: Some(FailureReport {
                trial,
                seed: spec.seed,
                cfg,
                tuple: boundary,
                slacks,
            }),
        },
    }
}

/// Randomized half-bit certification sweep over boundary tuples of the
/// MAC-phase outer bound. Deterministic for a fixed spec.
pub fn sweep_gap(spec: &SweepSpec, tol: f64) -> Result<SweepSummary, Error> {
    if spec.trials < 1 {
        return Err(Error::InvalidParam(format!(
            "sweep needs at least one trial, got {}",
            spec.trials
        )));
    }
    let (lo, hi) = spec.power_range;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
        return Err(Error::InvalidParam(format!(
            "power range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
        )));
    }
    if let Some(ray) = spec.fixed_ray {
        if ray.iter().any(|d| !d.is_finite() || *d < 0.0) || ray.iter().all(|d| *d == 0.0) {
            return Err(Error::InvalidParam(
                "fixed ray must be non-negative, finite and not all zero".to_string(),
            ));
        }
    }

    let outcomes: Vec<TrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, trial, tol))
        .collect();

    let mut failures = 0u64;
    let mut max_needed_shift = 0.0f64;
    let mut failure_reports = Vec::new();
    for outcome in outcomes {
        max_needed_shift = max_needed_shift.max(outcome.needed_shift);
        if let Some(report) = outcome.failure {
            failures += 1;
            failure_reports.push(report);
        }
    }
    Ok(SweepSummary {
        trials: spec.trials,
        failures,
        max_needed_shift,
        seed: spec.seed,
        power_range: spec.power_range,
        failure_reports,
    })
}

// ---------------------------------------------------------------------------
// Conventional-MAC sum-rate penalty
// ---------------------------------------------------------------------------

/// Gap between the maximal symmetric exchange rate (`r12 = r21 = R`, no
/// private traffic, BC unconstrained) under the MAC-phase outer bound versus
/// the conventional-MAC scheme, at symmetric power `P`. Grows without bound
/// in `P`.
pub fn conv_mac_suboptimality(p: Snr) -> f64 {
    let cfg = ChannelConfig {
        p1: p,
        p2: p,
        pr1: Snr::ZERO,
        pr2: Snr::ZERO,
    };
    // Exact boundary comparison: zero slack tolerance so degenerate powers
    // give an exactly zero gap.
    let tol = 0.0;
    let sym_rate = |contains: &dyn Fn(&RateTuple) -> bool| -> f64 {
        let point = |t: f64| RateTuple::new(t, t, 0.0, 0.0).expect("non-negative ray");
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut doublings = 0;
        while contains(&point(hi)) {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                break;
            }
        }
        for _ in 0..48 {
            let mid = 0.5 * (lo + hi);
            if contains(&point(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let outer = sym_rate(&|r| outer_ma_contains(&cfg, r, tol));
    let conv = sym_rate(&|r| conv_mac_ma_contains(&cfg, r, tol));
    outer - conv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_math::{capacity_c, lattice_rate_d, DEFAULT_TOL};
    use crate::regions::eer_witness_check;

    fn cfg(p1: f64, p2: f64, pr1: f64, pr2: f64) -> ChannelConfig {
        ChannelConfig::new(p1, p2, pr1, pr2).unwrap()
    }

    fn tuple(r12: f64, r21: f64, r1r: f64, r2r: f64) -> RateTuple {
        RateTuple::new(r12, r21, r1r, r2r).unwrap()
    }

    #[test]
    fn certify_clamps_to_origin() {
        let w = certify_tuple(&cfg(1.0, 1.0, 1.0, 1.0), &tuple(0.5, 0.5, 0.0, 0.0), DEFAULT_TOL)
            .unwrap();
        assert_eq!(w.shifted_tuple, RateTuple::origin());
        assert_eq!(w.alpha, 0.0);
        assert_eq!(w.delta, 0.0);
        assert!(w.slacks.iter().all(|s| s.value >= -DEFAULT_TOL));
    }

    #[test]
    fn certify_symmetric_power_fifteen() {
        // r = (2, 2, 0, 0) sits on the outer bound at P = 15; the shifted
        // tuple (1.5, 1.5, 0, 0) certifies with alpha = 1.5 / D(15).
        let w = certify_tuple(&cfg(15.0, 15.0, 1.0, 1.0), &tuple(2.0, 2.0, 0.0, 0.0), DEFAULT_TOL)
            .unwrap();
        assert_eq!(w.shifted_tuple, tuple(1.5, 1.5, 0.0, 0.0));
        assert!((w.alpha - 0.758_687_673_679_631_3).abs() < 1e-12, "alpha = {}", w.alpha);
        assert_eq!(w.delta, 0.0);
    }

    #[test]
    fn certify_rejects_tuples_outside_the_outer_bound() {
        let err = certify_tuple(&cfg(1.0, 1.0, 1.0, 1.0), &tuple(0.5, 0.5, 0.1, 0.0), DEFAULT_TOL)
            .unwrap_err();
        match err {
            Error::OutsideOuterMa { constraint, .. } => {
                assert!(constraint.contains("C(p1)"), "constraint: {constraint}");
            }
            other => panic!("expected OutsideOuterMa, got {other:?}"),
        }
    }

    #[test]
    fn witness_resubstitutes_cleanly() {
        // Dual route: the certifying pair must also pass the independent
        // witness re-substitution check on the shifted tuple.
        let configs = [
            cfg(15.0, 15.0, 1.0, 1.0),
            cfg(3.0, 40.0, 1.0, 1.0),
            cfg(80.0, 0.9, 1.0, 1.0),
        ];
        let tuples = [
            tuple(2.0, 2.0, 0.0, 0.0),
            tuple(0.7, 1.9, 0.3, 0.4),
            tuple(1.0, 0.2, 0.9, 0.1),
        ];
        for (c, r) in configs.iter().zip(&tuples) {
            assert!(outer_ma_contains(c, r, DEFAULT_TOL), "test point escaped: {r:?}");
            let w = certify_tuple(c, r, DEFAULT_TOL).unwrap();
            let recheck =
                eer_witness_check(c, &w.shifted_tuple, w.alpha, w.delta, DEFAULT_TOL).unwrap();
            assert!(recheck.member, "recheck slacks: {:?}", recheck.slacks);
        }
    }

    #[test]
    fn sweep_rejects_zero_trials() {
        assert!(matches!(
            sweep_gap(&SweepSpec::new(0, 1), DEFAULT_TOL),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn sweep_forced_example() {
        let mut spec = SweepSpec::new(1, 7);
        spec.fixed_cfg = Some(cfg(1.0, 1.0, 3.0, 3.0));
        spec.fixed_ray = Some([1.0, 1.0, 0.0, 0.0]);
        let summary = sweep_gap(&spec, DEFAULT_TOL).unwrap();
        assert_eq!(summary.failures, 0);
        // Boundary tuple is (0.5, 0.5, 0, 0); the shift must clear the full
        // D(1) deficit: 0.5 - s <= D(1) at the certifying shift.
        let needed = 0.5 - lattice_rate_d(Snr::new(1.0).unwrap());
        assert!(
            (summary.max_needed_shift - needed).abs() < 1e-5,
            "needed shift = {}",
            summary.max_needed_shift
        );
    }

    #[test]
    fn needed_shift_on_the_exchange_diagonal_is_the_cd_gap() {
        // Along the symmetric exchange ray the outer boundary is
        // (C(P), C(P), 0, 0) and the binding comparison is C(P) vs D(P), so
        // the minimal certifying shift equals cd_gap(P) and never exceeds
        // (1/2) log2(3/2).
        for p in [0.7, 1.0, 2.5, 15.0, 80.0] {
            let mut spec = SweepSpec::new(1, 0);
            spec.fixed_cfg = Some(cfg(p, p, 1.0, 1.0));
            spec.fixed_ray = Some([1.0, 1.0, 0.0, 0.0]);
            let summary = sweep_gap(&spec, DEFAULT_TOL).unwrap();
            assert_eq!(summary.failures, 0);
            let expected = crate::rate_math::cd_gap(Snr::new(p).unwrap());
            assert!(
                (summary.max_needed_shift - expected).abs() < 1e-5,
                "P = {p}: needed {} vs cd_gap {expected}",
                summary.max_needed_shift
            );
            assert!(summary.max_needed_shift <= crate::rate_math::CD_GAP_MAX + 1e-5);
        }
    }

    #[test]
    fn interior_tuples_certify_whenever_a_dominating_boundary_tuple_does() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let c = random_cfg(&mut rng, (1e-2, 1e2));
            let dir = random_ray(&mut rng);
            let boundary = ray_boundary(|r| outer_ma_contains(&c, r, DEFAULT_TOL), dir);
            certify_tuple(&c, &boundary, DEFAULT_TOL).unwrap();
            let f: f64 = rng.random();
            let interior = boundary.scaled(f);
            certify_tuple(&c, &interior, DEFAULT_TOL).unwrap();
        }
    }

    #[test]
    fn certify_handles_a_silent_weak_source() {
        // P1 = 0 forces r12 = 0 in the outer bound; the certificate falls
        // back to alpha = 0 with pure relabeling.
        let c = cfg(0.0, 5.0, 1.0, 1.0);
        let w = certify_tuple(&c, &tuple(0.0, 1.2, 0.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(w.alpha, 0.0);
        assert_eq!(w.shifted_tuple, tuple(0.0, 0.7, 0.0, 0.0));
    }

    #[test]
    fn sweep_is_deterministic() {
        let spec = SweepSpec::new(200, 42);
        let a = sweep_gap(&spec, DEFAULT_TOL).unwrap();
        let b = sweep_gap(&spec, DEFAULT_TOL).unwrap();
        assert_eq!(a.failures, b.failures);
        assert_eq!(a.max_needed_shift, b.max_needed_shift);
        assert_eq!(a.failures, 0);
        assert!(a.max_needed_shift <= HALF_BIT);
    }

    #[test]
    fn conv_mac_suboptimality_examples() {
        let gap1 = conv_mac_suboptimality(Snr::new(1.0).unwrap());
        assert!((gap1 - 0.103_759_374_819_711).abs() < 1e-6, "gap = {gap1}");
        assert_eq!(conv_mac_suboptimality(Snr::ZERO), 0.0);
        assert!(conv_mac_suboptimality(Snr::new(1e4).unwrap()) > 3.0);
    }

    #[test]
    fn shifted_bc_constraints_follow_from_the_original() {
        // The BC half of the gap theorem is trivial: shifting down preserves
        // the per-link BC bounds. Asserted, not searched.
        let c = cfg(2.0, 5.0, 0.8, 1.7);
        let caps = [capacity_c(c.pr2), capacity_c(c.pr1)];
        for (r12, r21) in [(0.3, 0.2), (caps[0], caps[1]), (0.0, 0.5)] {
            let r = tuple(r12.min(caps[0]), r21.min(caps[1]), 0.0, 0.0);
            let s = r.shifted_down(HALF_BIT);
            assert!(s.r12 <= capacity_c(c.pr2) + DEFAULT_TOL);
            assert!(s.r21 <= capacity_c(c.pr1) + DEFAULT_TOL);
        }
    }
}
