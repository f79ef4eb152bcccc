//! Topological pressure on subshifts and the pressure-equation root solvers
//! that turn potentials into dimension predictions.

use crate::error::{Error, Result};
use crate::numerics::{least_squares, spectral_radius};
use crate::symbolic::{birkhoff_sum, periodic_completion, Potential, ShiftSpace};

/// Transfer matrices on depth-k windows are capped at this many states.
pub const TRANSFER_STATE_BUDGET: usize = 4096;
/// Default depth cap for the exact spectral route.
pub const EXACT_DEPTH_CAP: usize = 4;
/// Default word budget for cylinder enumerations.
pub const DEFAULT_WORD_BUDGET: u128 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    ExactSpectral,
    CylinderExtrapolated,
}

/// A pressure value with its provenance: either the spectral radius of the
/// weighted transfer matrix, or an extrapolated cylinder-sum ladder with all
/// finite-n values kept for audit.
#[derive(Debug, Clone)]
pub struct PressureEstimate {
    pub value: f64,
    pub method: PressureMethod,
    pub n_ladder: Vec<usize>,
    /// P_n per ladder entry; empty for the exact route.
    pub residuals: Vec<f64>,
    pub error_bound: f64,
    /// R^2 of the 1/n extrapolation fit; None for the exact route. A value
    /// below 0.99 flags a poor fit of the O(1/n) convergence model.
    pub fit_r_squared: Option<f64>,
}

/// Root of a pressure equation in the dimension parameter.
#[derive(Debug, Clone)]
pub struct DimensionRoot {
    pub d: f64,
    pub pressure_at_root: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Pressure of a finite-depth potential as log of the spectral radius of the
/// weighted transition matrix on depth-k windows. Exact (up to the
/// eigenvalue iteration) for locally constant potentials.
pub fn pressure_exact_locally_constant(
    shift: &ShiftSpace,
    psi: &Potential,
) -> Result<PressureEstimate> {
    if let Some(h) = shift.entropy_override() {
        if psi.depth() > 0 {
            return Err(Error::InvalidParameters(
                "entropy_override only supports constant potentials".into(),
            ));
        }
        return Ok(PressureEstimate {
            value: h + psi.values()[0],
            method: PressureMethod::ExactSpectral,
            n_ladder: Vec::new(),
            residuals: Vec::new(),
            error_bound: 0.0,
            fit_r_squared: None,
        });
    }
    let n = shift.alphabet();
    if psi.depth() == 0 {
        return Ok(PressureEstimate {
            value: shift.log_spectral_radius() + psi.values()[0],
            method: PressureMethod::ExactSpectral,
            n_ladder: Vec::new(),
            residuals: Vec::new(),
            error_bound: 1e-14,
            fit_r_squared: None,
        });
    }
    let k = psi.depth().max(1);
    if psi.depth() > EXACT_DEPTH_CAP || n.pow(k as u32) > TRANSFER_STATE_BUDGET {
        return Err(Error::DepthTooLarge {
            depth: psi.depth(),
            states: n.pow(k as u32),
            budget: TRANSFER_STATE_BUDGET,
        });
    }
    // States are admissible k-windows; the transition w -> w' requires the
    // (k-1)-overlap to match and carries weight e^{psi(w')}.
    let states: Vec<Vec<u8>> = shift.cylinder_words(k).map(|w| w.symbols().to_vec()).collect();
    let idx_of = |w: &[u8]| states.binary_search_by(|s| s.as_slice().cmp(w)).ok();
    let m = states.len();
    let mut matrix = vec![0.0f64; m * m];
    for (i, w) in states.iter().enumerate() {
        for s in 0..shift.alphabet() as u8 {
            if !shift.allows(*w.last().unwrap(), s) {
                continue;
            }
            let mut next = w[1..].to_vec();
            next.push(s);
            if let Some(j) = idx_of(&next) {
                matrix[i * m + j] = psi.eval_window(&next).exp();
            }
        }
    }
    let (rho, iter_err) = spectral_radius(&matrix, m);
    Ok(PressureEstimate {
        value: rho.ln(),
        method: PressureMethod::ExactSpectral,
        n_ladder: Vec::new(),
        residuals: Vec::new(),
        error_bound: (iter_err / rho).abs().max(1e-15),
        fit_r_squared: None,
    })
}

/// Cylinder-sum pressure: P_n = (1/n) log sum over admissible length-n words
/// of exp(S_n psi) at periodic completions, extrapolated with the O(1/n)
/// model P_n = P + c/n.
pub fn pressure_cylinder_limit(
    shift: &ShiftSpace,
    psi: &Potential,
    n_ladder: &[usize],
    budget: u128,
) -> Result<PressureEstimate> {
    if n_ladder.len() < 2 || n_ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameters(
            "n_ladder must be strictly increasing with at least two entries".into(),
        ));
    }
    let n_max = *n_ladder.last().unwrap();
    let required = shift.word_count(n_max);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut residuals = Vec::with_capacity(n_ladder.len());
    for &n in n_ladder {
        // Fixed left-to-right order keeps the reduction bit-reproducible.
        let mut max_s = f64::NEG_INFINITY;
        let mut sums = Vec::new();
        for w in shift.cylinder_words(n) {
            let seq = periodic_completion(shift, &w)?;
            let s = birkhoff_sum(psi, &seq, n);
            max_s = max_s.max(s);
            sums.push(s);
        }
        let total: f64 = sums.iter().map(|s| (s - max_s).exp()).sum();
        residuals.push((max_s + total.ln()) / n as f64);
    }
    let xs: Vec<f64> = n_ladder.iter().map(|&n| 1.0 / n as f64).collect();
    let fit = least_squares(&xs, &residuals);
    let value = fit.intercept;
    Ok(PressureEstimate {
        value,
        method: PressureMethod::CylinderExtrapolated,
        n_ladder: n_ladder.to_vec(),
        error_bound: (residuals[residuals.len() - 1] - value).abs(),
        residuals,
        fit_r_squared: Some(fit.r_squared),
    })
}

/// Pressure by the exact route when the depth allows, else by the cylinder
/// ladder.
pub fn pressure(shift: &ShiftSpace, psi: &Potential) -> Result<PressureEstimate> {
    match pressure_exact_locally_constant(shift, psi) {
        Ok(p) => Ok(p),
        Err(Error::DepthTooLarge { .. }) => {
            let ladder: Vec<usize> = (8..=16).collect();
            pressure_cylinder_limit(shift, psi, &ladder, DEFAULT_WORD_BUDGET)
        }
        Err(e) => Err(e),
    }
}

/// Bisection tolerance on the dimension parameter.
pub const ROOT_TOL: f64 = 1e-10;

fn bisect_root<F: FnMut(f64) -> Result<f64>>(mut f: F) -> Result<DimensionRoot> {
    // Auto-expand from [0, 4] toward [-8, 16] until the pressure changes sign.
    let (mut lo, mut hi) = (0.0f64, 4.0f64);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    // The map d -> P is strictly decreasing, so grow hi while P(hi) > 0 and
    // lower lo while P(lo) < 0.
    while f_lo.signum() == f_hi.signum() {
        let mut moved = false;
        if f_hi > 0.0 && hi < 16.0 {
            hi = (hi * 2.0).min(16.0);
            f_hi = f(hi)?;
            moved = true;
        }
        if f_lo < 0.0 && lo > -8.0 {
            lo = if lo == 0.0 { -1.0 } else { (lo * 2.0).max(-8.0) };
            f_lo = f(lo)?;
            moved = true;
        }
        if !moved {
            return Err(Error::BracketFailure { lo, hi });
        }
    }
    let bracket = (lo, hi);
    let mut iterations = 0u32;
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 200 {
            break;
        }
    }
    let d = 0.5 * (lo + hi);
    Ok(DimensionRoot {
        d,
        pressure_at_root: f(d)?,
        bracket,
        iterations,
    })
}

/// Solve P(phi_cu + (d-1) phi_u) = 0 for the unique d. Requires phi_u
/// strictly negative, which makes the pressure strictly decreasing in d.
pub fn solve_pressure_root(
    shift: &ShiftSpace,
    phi_cu: &Potential,
    phi_u: &Potential,
) -> Result<DimensionRoot> {
    if !phi_u.is_strictly_negative() {
        return Err(Error::NotMonotone(
            "phi_u must be strictly negative".into(),
        ));
    }
    bisect_root(|d| Ok(pressure(shift, &phi_cu.affine_combine(phi_u, d - 1.0))?.value))
}

/// Bowen equation: the unique root d of P(d * phi) = 0 for strictly negative
/// phi.
pub fn solve_bowen(shift: &ShiftSpace, phi: &Potential) -> Result<DimensionRoot> {
    if !phi.is_strictly_negative() {
        return Err(Error::NotMonotone("phi must be strictly negative".into()));
    }
    bisect_root(|d| Ok(pressure(shift, &phi.scaled(d))?.value))
}

/// Root t of P(t psi1 + psi2) = 0, the pressure form of the variational
/// dimension of unstable slices (the slice dimension is 1 + t).
pub fn solve_linear_root(
    shift: &ShiftSpace,
    psi1: &Potential,
    psi2: &Potential,
) -> Result<DimensionRoot> {
    if !psi1.is_strictly_negative() {
        return Err(Error::NotMonotone("psi1 must be strictly negative".into()));
    }
    bisect_root(|t| Ok(pressure(shift, &psi2.affine_combine(psi1, t))?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Word;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const LOG2: f64 = std::f64::consts::LN_2;

    fn example_subshift() -> ShiftSpace {
        ShiftSpace::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]).unwrap()
    }

    #[test]
    fn zero_potential_pressure_is_entropy() {
        let shift = ShiftSpace::full(2);
        let p = pressure_exact_locally_constant(&shift, &Potential::constant(2, 0.0)).unwrap();
        assert!((p.value - LOG2).abs() < 1e-12);
    }

    #[test]
    fn depth1_pressure_matches_closed_form() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::depth1(vec![0.0, LOG2]);
        let p = pressure_exact_locally_constant(&shift, &psi).unwrap();
        assert!((p.value - 3.0f64.ln()).abs() < 1e-12, "log(e^0 + e^log2)");
        // Cross-check against cylinder sums n = 1..10.
        let ladder: Vec<usize> = (1..=10).collect();
        let c = pressure_cylinder_limit(&shift, &psi, &ladder, 1 << 20).unwrap();
        assert!((c.value - 3.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_potential_identity() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::constant(2, -(1.5f64.ln()));
        let p = pressure_exact_locally_constant(&shift, &psi).unwrap();
        assert!((p.value - (LOG2 - 1.5f64.ln())).abs() < 1e-12);
        assert!((p.value - 0.287682).abs() < 1e-6);
    }

    #[test]
    fn cylinder_pressure_zero_potential_exact_per_level() {
        let shift = ShiftSpace::full(2);
        let ladder: Vec<usize> = (4..=16).collect();
        let p = pressure_cylinder_limit(&shift, &Potential::constant(2, 0.0), &ladder, 1 << 20)
            .unwrap();
        for r in &p.residuals {
            assert!((r - LOG2).abs() < 1e-12);
        }
        assert!((p.value - LOG2).abs() < 1e-12);
    }

    #[test]
    fn cylinder_pressure_depth1_matches_spectral() {
        let shift = ShiftSpace::full(2);
        let psi = Potential::depth1(vec![-(1.2f64.ln()), -(1.8f64.ln())]);
        let ladder: Vec<usize> = (8..=18).collect();
        let p = pressure_cylinder_limit(&shift, &psi, &ladder, 1 << 20).unwrap();
        let exact = (1.0 / 1.2 + 1.0 / 1.8f64).ln();
        assert!((exact - 0.328504).abs() < 1e-6);
        assert!((p.value - exact).abs() < 1e-6);
    }

    #[test]
    fn cylinder_pressure_subshift_entropy() {
        // Spectral radius of the fixture matrix, computed independently by
        // the power iteration on the 0/1 matrix itself.
        let shift = example_subshift();
        let expect = shift.log_spectral_radius();
        let ladder: Vec<usize> = (8..=16).collect();
        let p = pressure_cylinder_limit(&shift, &Potential::constant(3, 0.0), &ladder, 1 << 27)
            .unwrap();
        assert!((p.value - expect).abs() < 1e-3);
    }

    #[test]
    fn budget_is_enforced() {
        let shift = ShiftSpace::full(2);
        let err =
            pressure_cylinder_limit(&shift, &Potential::constant(2, 0.0), &[10, 40], 1 << 20);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn pressure_root_closed_forms() {
        let shift = ShiftSpace::full(2);
        let log4 = 4.0f64.ln();
        let phi_cu = Potential::constant(2, -(1.5f64.ln()));
        let phi_u = Potential::constant(2, -log4);
        let root = solve_pressure_root(&shift, &phi_cu, &phi_u).unwrap();
        let expect = LOG2 / log4 + 1.0 - 1.5f64.ln() / log4;
        assert!((root.d - expect).abs() < 1e-10);
        assert!((root.d - 1.207519).abs() < 1e-6);
        assert!(root.pressure_at_root.abs() < 1e-9);
        assert!(root.bracket.0 <= root.d && root.d <= root.bracket.1);
    }

    #[test]
    fn pressure_root_with_entropy_override() {
        let kappa = (3.0 + 5.0f64.sqrt()) / 2.0;
        let shift = ShiftSpace::full(2).with_entropy_override(kappa.ln());
        let phi_cu = Potential::constant(2, -(1.5f64.ln()));
        let phi_u = Potential::constant(2, -kappa.ln());
        let root = solve_pressure_root(&shift, &phi_cu, &phi_u).unwrap();
        let expect = 2.0 - 1.5f64.ln() / kappa.ln();
        assert!((root.d - expect).abs() < 1e-10);
        assert!((root.d - 1.5787041).abs() < 1e-6);
    }

    #[test]
    fn pressure_root_degenerate_equal_potentials() {
        let shift = ShiftSpace::full(2);
        let phi = Potential::constant(2, -LOG2);
        let root = solve_pressure_root(&shift, &phi, &phi).unwrap();
        assert!((root.d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bowen_roots() {
        let shift = ShiftSpace::full(2);
        let root = solve_bowen(&shift, &Potential::constant(2, (0.25f64).ln())).unwrap();
        assert!((root.d - 0.5).abs() < 1e-10, "stable slice log2/|log mu|");
        let root = solve_bowen(&shift, &Potential::constant(2, -(4.0f64.ln()))).unwrap();
        assert!((root.d - 0.5).abs() < 1e-10, "unstable slice log2/log kappa");
        let root = solve_bowen(&shift, &Potential::constant(2, -LOG2)).unwrap();
        assert!((root.d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bowen_root_scales_inversely() {
        let shift = ShiftSpace::full(2);
        let phi = Potential::depth1(vec![-1.0, -2.0]);
        let base = solve_bowen(&shift, &phi).unwrap().d;
        for c in [0.5, 2.0] {
            let scaled = solve_bowen(&shift, &phi.scaled(c)).unwrap().d;
            assert!((scaled - base / c).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_phi_u_is_rejected() {
        let shift = ShiftSpace::full(2);
        let phi_cu = Potential::constant(2, -1.0);
        let zero = Potential::constant(2, 0.0);
        assert!(matches!(
            solve_pressure_root(&shift, &phi_cu, &zero),
            Err(Error::NotMonotone(_))
        ));
    }

    #[test]
    fn monotone_in_d_across_root() {
        let shift = ShiftSpace::full(2);
        let phi_cu = Potential::depth1(vec![-0.3, -0.9]);
        let phi_u = Potential::depth1(vec![-1.0, -1.4]);
        let root = solve_pressure_root(&shift, &phi_cu, &phi_u).unwrap();
        let p = |d: f64| {
            pressure_exact_locally_constant(&shift, &phi_cu.affine_combine(&phi_u, d - 1.0))
                .unwrap()
                .value
        };
        assert!(p(root.d - 0.1) > 0.0);
        assert!(p(root.d + 0.1) < 0.0);
    }

    #[test]
    fn variational_bounds_on_full_shift() {
        let shift = ShiftSpace::full(3);
        let psi = Potential::depth1(vec![-0.2, -1.1, 0.4]);
        let p = pressure_exact_locally_constant(&shift, &psi).unwrap().value;
        assert!(p >= 3.0f64.ln() + psi.min_value() - 1e-12);
        assert!(p <= 3.0f64.ln() + psi.max_value() + 1e-12);
    }

    /// Randomized consistency between the exact spectral route and the
    /// cylinder extrapolation, depth <= 2 on 2-3 symbols. Values are drawn
    /// with a unit spread, which keeps the transfer matrices well
    /// conditioned (the geometric potentials of the example systems all
    /// have spread below log 3).
    #[test]
    fn spectral_vs_cylinder_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let alphabet = if trial % 2 == 0 { 2 } else { 3 };
            let shift = ShiftSpace::full(alphabet);
            let depth = rng.random_range(0..=2);
            let count = alphabet.pow(depth as u32);
            let values: Vec<f64> = (0..count).map(|_| rng.random_range(-1.5..-0.5)).collect();
            let psi = Potential::from_values(alphabet, depth, values).unwrap();
            let exact = pressure_exact_locally_constant(&shift, &psi).unwrap().value;
            let ladder: Vec<usize> = if alphabet == 2 {
                (8..=16).collect()
            } else {
                (7..=12).collect()
            };
            let cyl = pressure_cylinder_limit(&shift, &psi, &ladder, 1 << 26)
                .unwrap()
                .value;
            assert!(
                (exact - cyl).abs() < 1e-3,
                "trial {trial}: exact {exact} vs cylinder {cyl}"
            );
        }
    }

    #[test]
    fn depth_cap_is_enforced() {
        let shift = ShiftSpace::full(3);
        let psi = Potential::from_values(3, 5, vec![-1.0; 243]).unwrap();
        assert!(matches!(
            pressure_exact_locally_constant(&shift, &psi),
            Err(Error::DepthTooLarge { .. })
        ));
    }

    #[test]
    fn completion_fallback_keeps_cylinder_pressure_sane() {
        // Subshift words that cannot close periodically go through the
        // connector fallback; the extrapolated entropy must still match.
        let shift = example_subshift();
        let psi = Potential::depth1(vec![-0.4, -0.7, -0.5]);
        let exact = pressure_exact_locally_constant(&shift, &psi).unwrap().value;
        let ladder: Vec<usize> = (8..=14).collect();
        let cyl = pressure_cylinder_limit(&shift, &psi, &ladder, 1 << 26)
            .unwrap()
            .value;
        assert!((exact - cyl).abs() < 2e-3);
    }

    #[test]
    fn word_display_roundtrip() {
        let w = Word::new(vec![0, 2, 1]);
        assert_eq!(w.to_string(), "021");
    }
}
