//! Numeric checks for the fibered-blender machinery on affine step systems:
//! overlap intervals, fiber-projection covering, germ-height blow-up, the
//! D1/D2 bound classifier, and the three-symbol step-system fixture with
//! its strip covering relations.

use crate::error::{Error, Result};
use crate::symbolic::{ShiftSpace, Word};
use crate::systems::HorseshoeSystem;

/// Regime of the fiber projections by the expansion rate lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapRegime {
    /// lambda in (1,2): the two branch images overlap.
    BlenderCandidate,
    /// lambda = 2: the images touch in a point.
    Boundary,
    /// lambda > 2: the projection is a Cantor set.
    CantorProjection,
}

#[derive(Debug, Clone)]
pub struct OverlapReport {
    /// Overlap [t/lambda, t/(lambda(lambda-1))] of the two branch images;
    /// present for t != 0 and lambda <= 2, degenerate (lo = hi) exactly at
    /// lambda = 2, absent for lambda > 2 or t = 0.
    pub interval: Option<(f64, f64)>,
    /// Full fiber range (0, t/(lambda-1)).
    pub full_fiber_range: (f64, f64),
    pub regime: OverlapRegime,
}

impl OverlapReport {
    /// Nondegenerate overlap, exactly the lambda in (1,2), t != 0 case.
    pub fn has_overlap(&self) -> bool {
        matches!(self.interval, Some((lo, hi)) if hi > lo)
    }

    pub fn overlap_length(&self) -> f64 {
        match self.interval {
            Some((lo, hi)) => (hi - lo).max(0.0),
            None => 0.0,
        }
    }
}

/// Exact arithmetic on the projection overlap of the two fiber branches.
pub fn overlap_interval(lambda: f64, t: f64) -> OverlapReport {
    assert!(lambda > 1.0, "lambda must exceed 1");
    let regime = if lambda < 2.0 {
        OverlapRegime::BlenderCandidate
    } else if lambda == 2.0 {
        OverlapRegime::Boundary
    } else {
        OverlapRegime::CantorProjection
    };
    let lo = t / lambda;
    let hi = t / (lambda * (lambda - 1.0));
    let interval = if t != 0.0 && hi >= lo {
        Some((lo, hi))
    } else {
        None
    };
    OverlapReport {
        interval,
        full_fiber_range: (0.0, t / (lambda - 1.0)),
        regime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoveringVerdict {
    /// The union of branch images is a single interval at every depth.
    Connected,
    /// Gaps appear at some depth.
    Disconnected,
    /// t = 0: the projection collapses to the point {0}.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct CoveringReport {
    pub verdict: CoveringVerdict,
    /// Fraction of the full fiber range not covered at the final depth.
    pub gap_fraction: f64,
    /// Depth at which the union first disconnects, if it does.
    pub first_gap_depth: Option<u32>,
}

/// Iterate the two inverse fiber maps x/lambda and (x+t)/lambda on the full
/// fiber interval to depth m and track the union of images as exact
/// interval arithmetic.
pub fn fiber_projection_check(h: &HorseshoeSystem, depth: u32) -> CoveringReport {
    assert!(depth >= 1);
    if h.t == 0.0 {
        return CoveringReport {
            verdict: CoveringVerdict::Degenerate,
            gap_fraction: 0.0,
            first_gap_depth: None,
        };
    }
    let range = h.fiber_range();
    let mut intervals: Vec<(f64, f64)> = vec![(0.0, range)];
    let mut first_gap = None;
    for level in 1..=depth {
        let mut images: Vec<(f64, f64)> = Vec::with_capacity(intervals.len() * 2);
        for &(lo, hi) in &intervals {
            images.push((h.fiber_contract(0, lo), h.fiber_contract(0, hi)));
            images.push((h.fiber_contract(1, lo), h.fiber_contract(1, hi)));
        }
        images.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Merge touching or overlapping intervals.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(images.len());
        for (lo, hi) in images {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() > 1 && first_gap.is_none() {
            first_gap = Some(level);
        }
        intervals = merged;
    }
    let covered: f64 = intervals.iter().map(|(lo, hi)| hi - lo).sum();
    let gap_fraction = 1.0 - covered / range;
    CoveringReport {
        verdict: if intervals.len() == 1 {
            CoveringVerdict::Connected
        } else {
            CoveringVerdict::Disconnected
        },
        gap_fraction,
        first_gap_depth: first_gap,
    }
}

/// Result of the germ-strip height blow-up over an m-level u-box.
#[derive(Debug, Clone)]
pub struct GermCheck {
    pub word: Word,
    pub height_after_m: f64,
    pub delta_threshold: f64,
    pub passed: bool,
}

/// Germ-property height check for the affine horseshoe: the m-level germ
/// strip over the u-box of `w` is the m-fold preimage of a complete strip
/// of height delta, so its forward image regains min(lambda^m h0, full
/// range) exactly. The default delta is the overlap length, the minimal
/// complete-strip height.
pub fn germ_height_check(h: &HorseshoeSystem, w: &Word, delta: Option<f64>) -> Result<GermCheck> {
    if !h.blender_regime() {
        return Err(Error::NotBlenderRegime(format!(
            "requires lambda in (1,2) and t != 0, got lambda = {}, t = {}",
            h.lambda, h.t
        )));
    }
    let overlap = overlap_interval(h.lambda, h.t);
    let delta = delta.unwrap_or_else(|| overlap.overlap_length());
    let m = w.len() as i32;
    let h0 = delta * h.lambda.powi(-m);
    let height_after_m = (h0 * h.lambda.powi(m)).min(h.fiber_range());
    // Equality up to roundoff of the contraction/expansion pair.
    let passed = height_after_m >= delta * (1.0 - 1e-12);
    Ok(GermCheck {
        word: w.clone(),
        height_after_m,
        delta_threshold: delta,
        passed,
    })
}

/// The two elementary upper bounds for the box dimension of a gamma-Holder
/// graph over a base of dimension `dim`: D1 = dim/gamma and
/// D2 = dim + 1 - gamma.
#[derive(Debug, Clone, Copy)]
pub struct BoundComparison {
    pub d1: f64,
    pub d2: f64,
    /// The smaller (binding) bound.
    pub binding: f64,
    pub d2_binds: bool,
}

pub fn bound_regime(gamma: f64, dim_base_unstable: f64) -> BoundComparison {
    assert!(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0,1]");
    assert!(dim_base_unstable >= 0.0);
    let d1 = dim_base_unstable / gamma;
    let d2 = dim_base_unstable + 1.0 - gamma;
    BoundComparison {
        d1,
        d2,
        binding: d1.min(d2),
        d2_binds: d2 <= d1,
    }
}

/// The interior crossing D1(gamma) = D2(gamma): for dim < 1 it sits exactly
/// at gamma = dim. Solved numerically for the property check.
pub fn bound_crossing(dim: f64) -> f64 {
    assert!((0.0..1.0).contains(&dim));
    // D1 - D2 = dim/g - dim - 1 + g is increasing in g on (0,1); bisect.
    let f = |g: f64| dim / g - dim - 1.0 + g;
    let (mut lo, mut hi) = (dim * 0.5 + 1e-12, 1.0 - 1e-12);
    // f(lo) > 0 > ... careful: f(dim) = 0; f is decreasing then increasing;
    // bracket on (lo, mid) where f(lo) > 0 and f just below 1 is < 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------------------------
// Three-symbol step-system fixture

/// An affine expanding step system on three intervals with a mixing
/// subshift: fiber maps T_i fix x_i and map I_i onto the printed unions.
#[derive(Debug, Clone)]
pub struct StepSystemFixture {
    pub intervals: [(f64, f64); 3],
    /// slopes and offsets of the affine expanding maps T_i(x) = a x + b.
    pub maps: [(f64, f64); 3],
}

/// The three-interval fixture: I0 = [x0, y0], I1 = [y1, x1], I2 = [x2, y2]
/// with x0 < x2 < y0 < y1 < y2 < x1, T0(I0) = I0 u I2, T1(I1) = I0 u I1 u
/// I2, T2(I2) = I1 u I2.
pub fn step_system_fixture() -> StepSystemFixture {
    let (x0, x2, y0, y1, y2, x1) = (0.0, 0.15, 0.3, 0.45, 0.6, 1.0);
    let i0 = (x0, y0);
    let i1 = (y1, x1);
    let i2 = (x2, y2);
    let affine_through = |dom: (f64, f64), img: (f64, f64), fixed: f64| -> (f64, f64) {
        let a = (img.1 - img.0) / (dom.1 - dom.0);
        let b = fixed - a * fixed;
        (a, b)
    };
    StepSystemFixture {
        intervals: [i0, i1, i2],
        maps: [
            affine_through(i0, (x0, y2), x0),
            affine_through(i1, (x0, x1), x1),
            affine_through(i2, (x2, x1), x2),
        ],
    }
}

impl StepSystemFixture {
    /// The mixing transition matrix as printed alongside the fixture.
    pub fn subshift(&self) -> ShiftSpace {
        ShiftSpace::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).unwrap()
    }

    pub fn apply(&self, i: usize, x: f64) -> f64 {
        let (a, b) = self.maps[i];
        a * x + b
    }

    /// Check the strip covering relations T_i(I_i) contains I_j for every
    /// nonempty substrip; the empty pairs are (0,1) and (2,0), matching the
    /// transpose of the printed transition matrix.
    pub fn verify_strip_covering(&self) -> bool {
        let image = |i: usize| -> (f64, f64) {
            let (lo, hi) = self.intervals[i];
            (self.apply(i, lo), self.apply(i, hi))
        };
        let contains =
            |outer: (f64, f64), inner: (f64, f64)| outer.0 <= inner.0 + 1e-12 && inner.1 <= outer.1 + 1e-12;
        let expected_cover = [[true, false, true], [true, true, true], [false, true, true]];
        for i in 0..3 {
            let img = image(i);
            for j in 0..3 {
                if expected_cover[i][j] != contains(img, self.intervals[j]) {
                    return false;
                }
            }
            // Expansion: every branch must be uniformly expanding.
            if self.maps[i].0 <= 1.0 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_system, SkewSystem, SystemConfig};

    fn horseshoe(lambda: f64, t: f64) -> HorseshoeSystem {
        let sys = build_system(&SystemConfig {
            kind: "affine_horseshoe".into(),
            mu: Some(0.25),
            lambda: Some(lambda),
            kappa: Some(4.0),
            t: Some(t),
            b: None,
            p: None,
        })
        .unwrap();
        match sys {
            SkewSystem::AffineHorseshoe(h) => h,
            _ => unreachable!(),
        }
    }

    #[test]
    fn overlap_of_the_reference_example() {
        let r = overlap_interval(1.5, 0.5);
        let (lo, hi) = r.interval.unwrap();
        assert!((lo - 1.0 / 3.0).abs() < 1e-15);
        assert!((hi - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.regime, OverlapRegime::BlenderCandidate);
        assert!(r.has_overlap());
        assert!((r.full_fiber_range.1 - 1.0).abs() < 1e-15);
        assert!((r.overlap_length() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_boundary_and_cantor_cases() {
        let r = overlap_interval(2.0, 0.5);
        assert_eq!(r.regime, OverlapRegime::Boundary);
        let (lo, hi) = r.interval.unwrap();
        assert_eq!(lo, hi);
        assert!((lo - 0.25).abs() < 1e-15);
        assert!(!r.has_overlap());

        let r = overlap_interval(2.5, 0.5);
        assert_eq!(r.regime, OverlapRegime::CantorProjection);
        assert!(r.interval.is_none());

        let r = overlap_interval(1.5, 0.0);
        assert!(r.interval.is_none());
        assert_eq!(r.regime, OverlapRegime::BlenderCandidate);
    }

    #[test]
    fn projection_connected_in_the_overlap_regime() {
        let rep = fiber_projection_check(&horseshoe(1.5, 0.5), 12);
        assert_eq!(rep.verdict, CoveringVerdict::Connected);
        assert!(rep.gap_fraction.abs() < 1e-12, "union stays [0,1]");
        assert!(rep.first_gap_depth.is_none());
    }

    #[test]
    fn projection_gaps_in_the_cantor_regime() {
        let rep = fiber_projection_check(&horseshoe(2.5, 0.5), 1);
        assert!((rep.gap_fraction - 0.2).abs() < 1e-12, "1 - 2/lambda at depth 1");
        let rep = fiber_projection_check(&horseshoe(2.5, 0.5), 12);
        assert_eq!(rep.verdict, CoveringVerdict::Disconnected);
        assert_eq!(rep.first_gap_depth, Some(1));
        let expect = 1.0 - (2.0f64 / 2.5).powi(12);
        assert!((rep.gap_fraction - expect).abs() < 1e-9);
    }

    #[test]
    fn projection_degenerate_for_zero_t() {
        let rep = fiber_projection_check(&horseshoe(1.5, 0.0), 8);
        assert_eq!(rep.verdict, CoveringVerdict::Degenerate);
    }

    #[test]
    fn overlap_and_covering_agree_on_a_grid() {
        // Exhaustive over lambda (avoiding the exact boundary 2.0) and t.
        for i in 0..10 {
            let lambda = 1.1 + 0.2 * i as f64;
            for t in [0.25, 0.5] {
                let h = horseshoe(lambda, t);
                let overlap = overlap_interval(lambda, t);
                let cover = fiber_projection_check(&h, 12);
                assert_eq!(
                    overlap.has_overlap(),
                    cover.verdict == CoveringVerdict::Connected,
                    "lambda = {lambda}, t = {t}"
                );
            }
        }
    }

    #[test]
    fn germ_height_fixed_point_of_the_computation() {
        let h = horseshoe(1.5, 0.5);
        for len in [4usize, 10] {
            let w = Word::new(vec![0; len]);
            let check = germ_height_check(&h, &w, Some(1.0 / 3.0)).unwrap();
            assert!(check.passed, "length {len}");
            assert!((check.height_after_m - 1.0 / 3.0).abs() < 1e-12);
        }
        // Default delta is the overlap length.
        let check = germ_height_check(&h, &Word::new(vec![0, 1]), None).unwrap();
        assert!((check.delta_threshold - 1.0 / 3.0).abs() < 1e-15);
        assert!(check.passed);
    }

    #[test]
    fn germ_exactness_property() {
        // height_after_m = min(lambda^m h0, full range) to machine
        // precision across the blender grid.
        for i in 0..5 {
            let lambda = 1.1 + 0.2 * i as f64;
            let h = horseshoe(lambda, 0.5);
            let overlap = overlap_interval(lambda, 0.5).overlap_length();
            for m in [1usize, 3, 8] {
                let check = germ_height_check(&h, &Word::new(vec![1; m]), None).unwrap();
                let expect = (overlap * lambda.powi(-(m as i32)) * lambda.powi(m as i32))
                    .min(h.fiber_range());
                assert_eq!(check.height_after_m, expect);
                assert!(check.passed);
            }
        }
    }

    #[test]
    fn germ_rejects_non_blender_regimes() {
        assert!(matches!(
            germ_height_check(&horseshoe(2.5, 0.5), &Word::new(vec![0]), None),
            Err(Error::NotBlenderRegime(_))
        ));
        assert!(matches!(
            germ_height_check(&horseshoe(1.5, 0.0), &Word::new(vec![0]), None),
            Err(Error::NotBlenderRegime(_))
        ));
    }

    #[test]
    fn bound_comparison_examples() {
        // gamma = log 1.5 / log 4, dim = 1/2: D1 = log2/log1.5, D2 = the
        // pressure-root dimension; D2 binds.
        let gamma = 1.5f64.ln() / 4.0f64.ln();
        let b = bound_regime(gamma, 0.5);
        assert!((b.d1 - std::f64::consts::LN_2 / 1.5f64.ln()).abs() < 1e-12);
        assert!((b.d1 - 1.709511).abs() < 1e-6);
        assert!((b.d2 - 1.207519).abs() < 1e-6);
        assert!(b.d2_binds);

        // lambda = 2 = kappa^(1/2): both bounds coincide at 1 exactly.
        let b = bound_regime(0.5, 0.5);
        assert_eq!(b.d1, b.d2);
        assert_eq!(b.d1, 1.0);

        let b = bound_regime(1.0, 1.0);
        assert_eq!(b.d1, 1.0);
        assert_eq!(b.d2, 1.0);
    }

    #[test]
    fn crossing_matches_closed_form() {
        for dim in [0.3, 0.5, 0.8] {
            let g = bound_crossing(dim);
            assert!((g - dim).abs() < 1e-10, "crossing at gamma = dim");
            let b = bound_regime(g, dim);
            assert!((b.d1 - b.d2).abs() < 1e-8);
        }
    }

    #[test]
    fn step_fixture_strip_covering() {
        let fix = step_system_fixture();
        assert!(fix.verify_strip_covering());
        // The fixture's subshift is the printed matrix and enumerates the
        // seven length-2 words.
        let shift = fix.subshift();
        assert_eq!(shift.word_count(2), 7);
        // Fixed points of the three maps sit at the interval anchors.
        assert!((fix.apply(0, 0.0) - 0.0).abs() < 1e-15);
        assert!((fix.apply(1, 1.0) - 1.0).abs() < 1e-15);
        assert!((fix.apply(2, 0.15) - 0.15).abs() < 1e-12);
    }
}
