//! Two-dimensional boundary slices of the rate regions.
//!
//! A slice fixes two of the four rate components and sweeps rays through the
//! origin of the remaining plane. For each region and each ray the furthest
//! member point is located by doubling plus 20 bisection steps, which is
//! valid because every region here is downward closed.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::hull::hull_contains;
use super::{
    conv_mac_contains, eer_br_contains, outer_contains, outer_member, ChannelConfig, RateTuple,
};
use crate::error::Error;

/// One of the four rate components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateAxis {
    R12,
    R21,
    R1r,
    R2r,
}

impl RateAxis {
    pub const ALL: [RateAxis; 4] = [RateAxis::R12, RateAxis::R21, RateAxis::R1r, RateAxis::R2r];

    fn index(self) -> usize {
        match self {
            RateAxis::R12 => 0,
            RateAxis::R21 => 1,
            RateAxis::R1r => 2,
            RateAxis::R2r => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RateAxis::R12 => "r12",
            RateAxis::R21 => "r21",
            RateAxis::R1r => "r1r",
            RateAxis::R2r => "r2r",
        }
    }
}

impl fmt::Display for RateAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RateAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r12" => Ok(RateAxis::R12),
            "r21" => Ok(RateAxis::R21),
            "r1r" => Ok(RateAxis::R1r),
            "r2r" => Ok(RateAxis::R2r),
            other => Err(Error::InvalidParam(format!(
                "unknown rate axis \"{other}\" (expected r12, r21, r1r or r2r)"
            ))),
        }
    }
}

/// The regions a slice is computed for, in output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionId {
    Outer,
    ConvMac,
    EerBr,
    Hull,
}

impl RegionId {
    pub const ALL: [RegionId; 4] = [
        RegionId::Outer,
        RegionId::ConvMac,
        RegionId::EerBr,
        RegionId::Hull,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionId::Outer => "outer",
            RegionId::ConvMac => "conv-mac",
            RegionId::EerBr => "eer-br",
            RegionId::Hull => "hull",
        }
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "outer" => Ok(RegionId::Outer),
            "conv-mac" => Ok(RegionId::ConvMac),
            "eer-br" => Ok(RegionId::EerBr),
            "hull" => Ok(RegionId::Hull),
            other => Err(Error::InvalidParam(format!(
                "unknown region \"{other}\" (expected outer, conv-mac, eer-br or hull)"
            ))),
        }
    }
}

/// What to slice: two fixed components with their values, the two axes of
/// the swept plane, the number of rays, and the hull lambda grid.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub fixed: [(RateAxis, f64); 2],
    pub axes: (RateAxis, RateAxis),
    pub resolution: usize,
    pub hull_grid_k: usize,
}

/// The furthest member point of one region along one ray.
#[derive(Debug, Clone, Serialize)]
pub struct SliceRow {
    pub region: RegionId,
    pub ray: usize,
    pub axis1: f64,
    pub axis2: f64,
}

fn region_contains(
    cfg: &ChannelConfig,
    region: RegionId,
    r: &RateTuple,
    hull_grid_k: usize,
    tol: f64,
) -> bool {
    match region {
        RegionId::Outer => outer_contains(cfg, r, tol),
        RegionId::ConvMac => conv_mac_contains(cfg, r, tol),
        RegionId::EerBr => eer_br_contains(cfg, r, tol),
        RegionId::Hull => hull_contains(cfg, r, hull_grid_k, tol),
    }
}

/// Furthest member radius along the ray, by doubling plus 20 bisections.
/// Returns 0 when even the ray origin is outside the region.
fn ray_radius(contains: impl Fn(f64) -> bool) -> f64 {
    if !contains(0.0) {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut doublings = 0;
    while contains(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            // Every region here is bounded; this is a numerical guard only.
            return lo;
        }
    }
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if contains(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Boundary points of all four regions on a 2-D slice.
///
/// Rays are spread uniformly in angle over the positive quadrant of the
/// slice plane, endpoints included. Rows come out ordered by `(region, ray)`,
/// 4 x `resolution` rows in total. Fixed components that already violate the
/// outer bound yield an [`Error::EmptySlice`].
pub fn boundary_slice(
    cfg: &ChannelConfig,
    spec: &SliceSpec,
    tol: f64,
) -> Result<Vec<SliceRow>, Error> {
    if spec.resolution < 2 {
        return Err(Error::InvalidParam(format!(
            "slice resolution must be at least 2, got {}",
            spec.resolution
        )));
    }
    if spec.hull_grid_k < 1 {
        return Err(Error::InvalidParam(
            "hull grid must have at least one interval".to_string(),
        ));
    }
    let mut seen = [false; 4];
    for axis in [
        spec.axes.0,
        spec.axes.1,
        spec.fixed[0].0,
        spec.fixed[1].0,
    ] {
        if seen[axis.index()] {
            return Err(Error::InvalidParam(format!(
                "axis {axis} appears more than once in the slice spec"
            )));
        }
        seen[axis.index()] = true;
    }
    for (_, v) in spec.fixed {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidRate(v));
        }
    }

    let build = |x: f64, y: f64| -> RateTuple {
        let mut arr = [0.0f64; 4];
        arr[spec.fixed[0].0.index()] = spec.fixed[0].1;
        arr[spec.fixed[1].0.index()] = spec.fixed[1].1;
        arr[spec.axes.0.index()] = x;
        arr[spec.axes.1.index()] = y;
        RateTuple::from_array(arr).expect("slice points are finite and non-negative")
    };

    let base = build(0.0, 0.0);
    let base_report = outer_member(cfg, &base, tol);
    if !base_report.member {
        let v = base_report
            .worst_violation(tol)
            .expect("non-member report has a violation");
        return Err(Error::EmptySlice {
            constraint: v.constraint.clone(),
            slack: v.value,
        });
    }

    let mut rows = Vec::with_capacity(4 * spec.resolution);
    for region in RegionId::ALL {
        for ray in 0..spec.resolution {
            let theta = FRAC_PI_2 * ray as f64 / (spec.resolution - 1) as f64;
            // cos(pi/2) in f64 is a tiny positive residue; clamp to exact axes.
            let dx = if ray + 1 == spec.resolution { 0.0 } else { theta.cos() };
            let dy = if ray == 0 { 0.0 } else { theta.sin() };
            let radius = ray_radius(|t| {
                region_contains(cfg, region, &build(t * dx, t * dy), spec.hull_grid_k, tol)
            });
            rows.push(SliceRow {
                region,
                ray,
                axis1: radius * dx,
                axis2: radius * dy,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_math::{lattice_rate_d, Snr, DEFAULT_TOL};

    fn cfg(p1: f64, p2: f64, pr1: f64, pr2: f64) -> ChannelConfig {
        ChannelConfig::new(p1, p2, pr1, pr2).unwrap()
    }

    fn spec(resolution: usize) -> SliceSpec {
        SliceSpec {
            fixed: [(RateAxis::R1r, 0.0), (RateAxis::R2r, 0.0)],
            axes: (RateAxis::R12, RateAxis::R21),
            resolution,
            hull_grid_k: 16,
        }
    }

    #[test]
    fn row_count_and_ordering() {
        let rows = boundary_slice(&cfg(1.0, 1.0, 3.0, 3.0), &spec(3), DEFAULT_TOL).unwrap();
        assert_eq!(rows.len(), 12);
        let mut iter = rows.iter();
        for region in RegionId::ALL {
            for ray in 0..3 {
                let row = iter.next().unwrap();
                assert_eq!(row.region, region);
                assert_eq!(row.ray, ray);
            }
        }
    }

    #[test]
    fn exchange_plane_endpoints() {
        let rows = boundary_slice(&cfg(1.0, 1.0, 3.0, 3.0), &spec(3), DEFAULT_TOL).unwrap();
        let find = |region: RegionId, ray: usize| {
            rows.iter()
                .find(|r| r.region == region && r.ray == ray)
                .unwrap()
        };
        // Pure r12 ray: outer endpoint min(C(pr2), C(p1)) = 0.5.
        let outer0 = find(RegionId::Outer, 0);
        assert!((outer0.axis1 - 0.5).abs() < 1e-4, "outer: {}", outer0.axis1);
        assert_eq!(outer0.axis2, 0.0);
        // Single-message conventional MAC reaches the same endpoint.
        assert!((find(RegionId::ConvMac, 0).axis1 - 0.5).abs() < 1e-4);
        // EER-BR along the pure r12 ray works through delta relabeling and
        // also reaches min(C(pr2), C(p1)) = 0.5.
        assert!((find(RegionId::EerBr, 0).axis1 - 0.5).abs() < 1e-4);
        // On the diagonal the EER-BR exchange rates cap at D(1).
        let d1 = lattice_rate_d(Snr::new(1.0).unwrap());
        let eer_diag = find(RegionId::EerBr, 1);
        assert!((eer_diag.axis1 - d1).abs() < 1e-4, "diag: {}", eer_diag.axis1);
        assert!((eer_diag.axis2 - d1).abs() < 1e-4);
        // Hull fits between EER-BR and outer on every ray.
        for ray in 0..3 {
            let outer = (find(RegionId::Outer, ray).axis1, find(RegionId::Outer, ray).axis2);
            let eer = (find(RegionId::EerBr, ray).axis1, find(RegionId::EerBr, ray).axis2);
            let hull = (find(RegionId::Hull, ray).axis1, find(RegionId::Hull, ray).axis2);
            let norm = |p: (f64, f64)| (p.0 * p.0 + p.1 * p.1).sqrt();
            assert!(norm(hull) <= norm(outer) + 1e-6);
            assert!(norm(hull) >= norm(eer) - 1e-6);
        }
    }

    #[test]
    fn fixed_components_outside_outer_bound() {
        let mut s = spec(2);
        s.fixed = [(RateAxis::R1r, 9.0), (RateAxis::R2r, 0.0)];
        match boundary_slice(&cfg(1.0, 1.0, 3.0, 3.0), &s, DEFAULT_TOL) {
            Err(Error::EmptySlice { constraint, .. }) => {
                assert!(constraint.contains("C(p1)"), "constraint: {constraint}");
            }
            other => panic!("expected EmptySlice, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let c = cfg(1.0, 1.0, 3.0, 3.0);
        assert!(boundary_slice(&c, &spec(1), DEFAULT_TOL).is_err());
        let mut dup = spec(2);
        dup.fixed = [(RateAxis::R12, 0.0), (RateAxis::R2r, 0.0)];
        assert!(matches!(
            boundary_slice(&c, &dup, DEFAULT_TOL),
            Err(Error::InvalidParam(_))
        ));
    }
}
