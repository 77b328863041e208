//! Certified membership in the convex hull of the EER-BR and
//! conventional-MAC regions.
//!
//! A point `r` is accepted only when an explicit decomposition
//! `r = lambda a + (1 - lambda) b` with `a` in the EER-BR region and `b` in
//! the conventional-MAC region is found for some `lambda` on a uniform grid
//! of `[0, 1]`. For fixed `lambda` (and a fixed orientation of the bit
//! relabeling) the decomposition is a linear feasibility problem in the four
//! components of `a`; it is solved exactly by Fourier-Motzkin elimination,
//! a feasible `a` is reconstructed by back-substitution, and the resulting
//! pair is re-verified against the actual region predicates before the point
//! is declared a member. The test is therefore one-sided: no false positives
//! beyond the slack tolerance, while points of the true hull may be missed
//! between grid values.

use super::{
    canonical, conv_mac_contains, conv_mac_member, eer_br_contains, eer_br_member,
    ChannelConfig, RateTuple, RegionReport, Slack, Witness,
};
use crate::error::Error;
use crate::rate_math::{capacity_c, gamma, lattice_rate_d, Snr};

/// Coefficients below this magnitude are treated as zero during elimination.
const COEFF_EPS: f64 = 1e-11;

/// A linear inequality `coeffs . a <= rhs` over the four components of `a`.
type Row = ([f64; 4], f64);

/// Scale a row so its largest coefficient magnitude is 1 (halfspaces are
/// scale invariant; this keeps the elimination well conditioned).
fn normalize(row: Row) -> Row {
    let (coeffs, rhs) = row;
    let m = coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    if m > 0.0 && m.is_finite() {
        (
            [coeffs[0] / m, coeffs[1] / m, coeffs[2] / m, coeffs[3] / m],
            rhs / m,
        )
    } else {
        row
    }
}

fn is_constant(coeffs: &[f64; 4]) -> bool {
    coeffs.iter().all(|c| c.abs() <= COEFF_EPS)
}

/// Push `row`, dropping trivially true constants and deduplicating rows with
/// identical coefficients (keeping the tighter bound). Returns `false` when
/// the row is an infeasible constant.
fn push_row(rows: &mut Vec<Row>, row: Row) -> bool {
    let row = normalize(row);
    if is_constant(&row.0) {
        return row.1 >= -1e-10;
    }
    for existing in rows.iter_mut() {
        if existing
            .0
            .iter()
            .zip(row.0)
            .all(|(a, b)| (a - b).abs() <= 1e-9)
        {
            existing.1 = existing.1.min(row.1);
            return true;
        }
    }
    rows.push(row);
    true
}

/// Fourier-Motzkin elimination with witness extraction.
///
/// Returns a point satisfying every row (up to elimination arithmetic), or
/// `None` when the system is infeasible.
fn fm_feasible_point(rows: Vec<Row>) -> Option<[f64; 4]> {
    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(5);
    {
        let mut start = Vec::with_capacity(rows.len());
        for row in rows {
            if !push_row(&mut start, row) {
                return None;
            }
        }
        stages.push(start);
    }

    for var in 0..4 {
        let current = stages.last().expect("stage list is never empty");
        let mut upper: Vec<Row> = Vec::new();
        let mut lower: Vec<Row> = Vec::new();
        let mut next: Vec<Row> = Vec::new();
        for &(coeffs, rhs) in current {
            let c = coeffs[var];
            if c > COEFF_EPS {
                let mut scaled = [0.0; 4];
                for i in 0..4 {
                    scaled[i] = coeffs[i] / c;
                }
                upper.push((scaled, rhs / c));
            } else if c < -COEFF_EPS {
                let mut scaled = [0.0; 4];
                for i in 0..4 {
                    scaled[i] = coeffs[i] / -c;
                }
                lower.push((scaled, rhs / -c));
            } else if !push_row(&mut next, (coeffs, rhs)) {
                return None;
            }
        }
        for u in &upper {
            for l in &lower {
                let mut coeffs = [0.0; 4];
                for (i, c) in coeffs.iter_mut().enumerate() {
                    *c = u.0[i] + l.0[i];
                }
                coeffs[var] = 0.0;
                if !push_row(&mut next, (coeffs, u.1 + l.1)) {
                    return None;
                }
            }
        }
        stages.push(next);
    }

    // Back-substitute, last eliminated variable first. Every variable has a
    // finite lower bound (the non-negativity rows), so only the upper end can
    // be open.
    let mut x = [0.0f64; 4];
    for var in (0..4).rev() {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &(coeffs, rhs) in &stages[var] {
            let c = coeffs[var];
            if c.abs() <= COEFF_EPS {
                continue;
            }
            let rest: f64 = (var + 1..4).map(|j| coeffs[j] * x[j]).sum();
            let bound = (rhs - rest) / c;
            if c > 0.0 {
                hi = hi.min(bound);
            } else {
                lo = lo.max(bound);
            }
        }
        if lo > hi + 1e-9 {
            return None;
        }
        x[var] = if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi.min(0.0)
        } else {
            0.0
        };
    }
    Some(x)
}

/// Linear description of the EER-BR region over `a = (a12, a21, a1r, a2r)`
/// for one orientation of the relabeling, plus the conventional-MAC
/// constraints on `b = (r - lambda a) / (1 - lambda)` rewritten over `a`.
/// Requires canonical coordinates and `0 < lambda < 1`.
fn hull_rows(cfg: &ChannelConfig, r: &RateTuple, lambda: f64, mirror: bool) -> Vec<Row> {
    let p1 = cfg.p1.value();
    let p2 = cfg.p2.value();
    let c1 = capacity_c(cfg.p1);
    let c2 = capacity_c(cfg.p2);
    let c12 = capacity_c(Snr::new(p1 + p2).expect("sum of valid SNRs"));
    let c2p1 = capacity_c(Snr::new(2.0 * p1).expect("doubled valid SNR"));
    let g = gamma(cfg.p1, cfg.p2).expect("canonical power order");
    let d1 = lattice_rate_d(cfg.p1);
    let bc1 = capacity_c(cfg.pr1);
    let bc2 = capacity_c(cfg.pr2);

    let mut rows: Vec<Row> = Vec::with_capacity(20);

    // a >= 0.
    for i in 0..4 {
        let mut coeffs = [0.0; 4];
        coeffs[i] = -1.0;
        rows.push((coeffs, 0.0));
    }
    // BC box on a.
    rows.push(([1.0, 0.0, 0.0, 0.0], bc2));
    rows.push(([0.0, 1.0, 0.0, 0.0], bc1));

    // EER-BR MAC-phase constraints. With the lattice exchange rate
    // r0 = alpha D(p1) eliminated (alpha = r0 / D), every bound is linear in
    // `a`; the D = 0 limit keeps the relabeling terms and drops the alpha
    // terms (r0 is then forced to zero by `r0 <= D = 0`).
    let (k1, kg, kc) = if d1 > 0.0 {
        (c1 / d1, g / d1 - 1.0, c2p1 / d1 - 1.0)
    } else {
        (0.0, -1.0, -1.0)
    };
    if mirror {
        // Orientation a21 <= a12: r0 = a21, delta = a12 - a21, the surplus is
        // accounted to the weak source's underlying private rate.
        rows.push(([-1.0, 1.0, 0.0, 0.0], 0.0));
        rows.push(([0.0, 1.0, 0.0, 0.0], d1));
        rows.push(([1.0, k1 - 1.0, 1.0, 0.0], c1));
        rows.push(([0.0, if d1 > 0.0 { g / d1 } else { 0.0 }, 0.0, 1.0], c2));
        rows.push(([1.0, kc, 1.0, 1.0], c12));
    } else {
        // Orientation a12 <= a21.
        rows.push(([1.0, -1.0, 0.0, 0.0], 0.0));
        rows.push(([1.0, 0.0, 0.0, 0.0], d1));
        rows.push(([k1, 0.0, 1.0, 0.0], c1));
        rows.push(([kg, 1.0, 0.0, 1.0], c2));
        rows.push(([kc, 1.0, 1.0, 1.0], c12));
    }

    // Conventional-MAC constraints on b = (r - lambda a) / (1 - lambda):
    // each h . b <= m becomes -lambda (h . a) <= (1 - lambda) m - h . r.
    let lm = 1.0 - lambda;
    // b >= 0, i.e. lambda a_i <= r_i.
    let rv = r.as_array();
    for i in 0..4 {
        let mut coeffs = [0.0; 4];
        coeffs[i] = lambda;
        rows.push((coeffs, rv[i]));
    }
    rows.push(([-lambda, 0.0, 0.0, 0.0], lm * bc2 - r.r12));
    rows.push(([0.0, -lambda, 0.0, 0.0], lm * bc1 - r.r21));
    rows.push(([-lambda, 0.0, -lambda, 0.0], lm * c1 - (r.r12 + r.r1r)));
    rows.push(([0.0, -lambda, 0.0, -lambda], lm * c2 - (r.r21 + r.r2r)));
    rows.push((
        [-lambda, -lambda, -lambda, -lambda],
        lm * c12 - (r.r12 + r.r21 + r.r1r + r.r2r),
    ));

    rows
}

/// Rebuild the `(a, b)` pair from an elimination witness and re-verify it
/// against the actual predicates.
fn rebuild_and_verify(
    cfg: &ChannelConfig,
    r: &RateTuple,
    lambda: f64,
    a: [f64; 4],
    tol: f64,
) -> Option<(RateTuple, RateTuple)> {
    let clamp = |v: f64| if (-tol..0.0).contains(&v) { 0.0 } else { v };
    let a = a.map(clamp);
    let lm = 1.0 - lambda;
    let rv = r.as_array();
    let mut b = [0.0; 4];
    for i in 0..4 {
        b[i] = clamp((rv[i] - lambda * a[i]) / lm);
    }
    let at = RateTuple::from_array(a).ok()?;
    let bt = RateTuple::from_array(b).ok()?;
    if !eer_br_contains(cfg, &at, tol) || !conv_mac_contains(cfg, &bt, tol) {
        return None;
    }
    let mix_err = (0..4)
        .map(|i| (lambda * a[i] + lm * b[i] - rv[i]).abs())
        .fold(0.0f64, f64::max);
    if mix_err > 4.0 * tol + 1e-12 {
        return None;
    }
    Some((at, bt))
}

/// Search the lambda grid for a certified decomposition. Expects canonical
/// coordinates.
fn hull_decompose(
    cfg: &ChannelConfig,
    r: &RateTuple,
    grid_k: usize,
    tol: f64,
) -> Option<(f64, RateTuple, RateTuple)> {
    if conv_mac_contains(cfg, r, tol) {
        return Some((0.0, RateTuple::origin(), *r));
    }
    if eer_br_contains(cfg, r, tol) {
        return Some((1.0, *r, RateTuple::origin()));
    }
    for i in 1..grid_k {
        let lambda = i as f64 / grid_k as f64;
        for mirror in [false, true] {
            if let Some(a) = fm_feasible_point(hull_rows(cfg, r, lambda, mirror)) {
                if let Some((at, bt)) = rebuild_and_verify(cfg, r, lambda, a, tol) {
                    return Some((lambda, at, bt));
                }
            }
        }
    }
    None
}

pub(crate) fn hull_contains(cfg: &ChannelConfig, r: &RateTuple, grid_k: usize, tol: f64) -> bool {
    let (c, rc, _) = canonical(cfg, r);
    hull_decompose(&c, &rc, grid_k, tol).is_some()
}

/// Grid-certified membership in `conv(EER-BR ∪ conventional-MAC)`.
///
/// `grid_k` sets the lambda grid (`grid_k + 1` points over `[0, 1]`); the
/// default used by the CLI is 64. On success the witness carries the mixing
/// weight and both verified component points.
pub fn hull_member(
    cfg: &ChannelConfig,
    r: &RateTuple,
    grid_k: usize,
    tol: f64,
) -> Result<RegionReport, Error> {
    if grid_k < 1 {
        return Err(Error::InvalidParam(format!(
            "hull grid must have at least one interval, got grid_k = {grid_k}"
        )));
    }
    let (c, rc, swapped) = canonical(cfg, r);
    match hull_decompose(&c, &rc, grid_k, tol) {
        Some((lambda, at, bt)) => {
            let eer_min = eer_br_member(&c, &at, tol).min_slack();
            let mac_min = conv_mac_member(&c, &bt, tol).min_slack();
            let (at_out, bt_out) = if swapped {
                (at.source_swapped(), bt.source_swapped())
            } else {
                (at, bt)
            };
            let slacks = vec![
                Slack::new("hull: certified decomposition on lambda grid", 0.0),
                Slack::new("hull: eer-br component min slack", eer_min),
                Slack::new("hull: conv-mac component min slack", mac_min),
            ];
            Ok(RegionReport::from_slacks(
                swapped,
                slacks,
                Some(Witness::Hull {
                    lambda,
                    eer_point: at_out,
                    mac_point: bt_out,
                }),
                tol,
            ))
        }
        None => Ok(RegionReport::from_slacks(
            swapped,
            vec![Slack::new(
                "hull: certified decomposition on lambda grid",
                -1.0,
            )],
            None,
            tol,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{conv_mac_member, eer_br_member, ChannelConfig, RateTuple, Witness};
    use super::*;
    use crate::rate_math::DEFAULT_TOL;

    fn cfg(p1: f64, p2: f64, pr1: f64, pr2: f64) -> ChannelConfig {
        ChannelConfig::new(p1, p2, pr1, pr2).unwrap()
    }

    fn tuple(r12: f64, r21: f64, r1r: f64, r2r: f64) -> RateTuple {
        RateTuple::new(r12, r21, r1r, r2r).unwrap()
    }

    #[test]
    fn degenerate_mixtures() {
        let c = cfg(1.0, 1.0, 3.0, 3.0);
        // Inside the conventional-MAC region: lambda = 0.
        let rep = hull_member(&c, &tuple(0.39, 0.39, 0.0, 0.0), 64, DEFAULT_TOL).unwrap();
        assert!(rep.member);
        match rep.witness {
            Some(Witness::Hull { lambda, .. }) => assert_eq!(lambda, 0.0),
            other => panic!("expected hull witness, got {other:?}"),
        }
        // Inside the EER-BR region but outside conventional-MAC: lambda = 1.
        let c2 = cfg(100.0, 100.0, 1000.0, 1000.0);
        let d = crate::rate_math::lattice_rate_d(crate::rate_math::Snr::new(100.0).unwrap());
        let rep = hull_member(&c2, &tuple(d, d, 0.0, 0.0), 64, DEFAULT_TOL).unwrap();
        assert!(rep.member);
        match rep.witness {
            Some(Witness::Hull { lambda, .. }) => assert_eq!(lambda, 1.0),
            other => panic!("expected hull witness, got {other:?}"),
        }
    }

    #[test]
    fn strict_hull_point_needs_a_real_mixture() {
        // At P = 2 neither component region contains the other: the EER-BR
        // exchange corner (D(2), D(2)) escapes the sum constraint of the
        // conventional MAC, while (0.3, 0.3, 0.49, 0) needs the MAC region.
        let c = cfg(2.0, 2.0, 10.0, 10.0);
        let d2 = crate::rate_math::lattice_rate_d(crate::rate_math::Snr::new(2.0).unwrap());
        let eer_corner = tuple(d2, d2, 0.0, 0.0);
        let mac_point = tuple(0.3, 0.3, 0.49, 0.0);
        assert!(eer_br_member(&c, &eer_corner, DEFAULT_TOL).member);
        assert!(!conv_mac_member(&c, &eer_corner, DEFAULT_TOL).member);
        assert!(conv_mac_member(&c, &mac_point, DEFAULT_TOL).member);
        assert!(!eer_br_member(&c, &mac_point, DEFAULT_TOL).member);

        let mid = tuple(
            0.5 * (d2 + 0.3),
            0.5 * (d2 + 0.3),
            0.5 * 0.49,
            0.0,
        );
        assert!(!conv_mac_member(&c, &mid, DEFAULT_TOL).member);
        assert!(!eer_br_member(&c, &mid, DEFAULT_TOL).member);

        let rep = hull_member(&c, &mid, 64, DEFAULT_TOL).unwrap();
        assert!(rep.member, "midpoint of two members must be in the hull");
        match rep.witness {
            Some(Witness::Hull {
                lambda,
                eer_point,
                mac_point,
            }) => {
                assert!(lambda > 0.0 && lambda < 1.0);
                // The witness must reproduce the queried point.
                for (m, r) in [
                    (lambda * eer_point.r12 + (1.0 - lambda) * mac_point.r12, mid.r12),
                    (lambda * eer_point.r21 + (1.0 - lambda) * mac_point.r21, mid.r21),
                    (lambda * eer_point.r1r + (1.0 - lambda) * mac_point.r1r, mid.r1r),
                    (lambda * eer_point.r2r + (1.0 - lambda) * mac_point.r2r, mid.r2r),
                ] {
                    assert!((m - r).abs() < 1e-7, "mixture mismatch: {m} vs {r}");
                }
            }
            other => panic!("expected hull witness, got {other:?}"),
        }
    }

    #[test]
    fn far_points_are_rejected() {
        let c = cfg(2.0, 2.0, 10.0, 10.0);
        let rep = hull_member(&c, &tuple(5.0, 5.0, 5.0, 5.0), 64, DEFAULT_TOL).unwrap();
        assert!(!rep.member);
        assert!(rep.witness.is_none());
    }

    #[test]
    fn spec_midpoint_with_symmetric_unit_powers() {
        // At unit symmetric powers the EER-BR region is contained in the
        // conventional-MAC region, so both points below are hull members via
        // lambda = 0 already; the explicit half-half mixture of the two
        // verified members must also be accepted.
        let c = cfg(1.0, 1.0, 3.0, 3.0);
        assert!(hull_member(&c, &tuple(0.34624, 0.34624, 0.0, 0.0), 64, DEFAULT_TOL)
            .unwrap()
            .member);
        let d1 = crate::rate_math::lattice_rate_d(crate::rate_math::Snr::new(1.0).unwrap());
        let mid = 0.5 * (d1 + 0.39);
        assert!(hull_member(&c, &tuple(mid, mid, 0.0, 0.0), 64, DEFAULT_TOL)
            .unwrap()
            .member);
    }

    #[test]
    fn rejects_zero_grid() {
        let c = cfg(1.0, 1.0, 3.0, 3.0);
        assert!(matches!(
            hull_member(&c, &RateTuple::origin(), 0, DEFAULT_TOL),
            Err(Error::InvalidParam(_))
        ));
    }
}
