//! Evaluation of the invariant graph Phi, the strong-unstable comparison
//! functions gamma^{u,n}, the regularity obstruction Delta^u, and empirical
//! Holder exponents.
//!
//! Phi is evaluated on demand through the contracting backward cocycle
//! Phi(xi) = T_xi^{-1}(Phi(tau xi)); a depth-n truncation has error
//! C * lambda_w^{-n}, independent of the seed value up to that bound.

use crate::error::{Error, Result};
use crate::symbolic::PeriodicSeq;
use crate::systems::{BakerSystem, HorseshoeSystem, SkewSystem};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Default truncation depth of the backward cocycle.
pub const DEFAULT_DEPTH: usize = 64;
/// Backward torus orbits lose double precision beyond this many steps (the
/// cat map amplifies rounding by kappa per step); deeper requests are capped
/// and the error bound inflated.
pub const ANOSOV_ORBIT_CAP: usize = 45;
/// Delta^u estimates at or below this threshold count as Lipschitz
/// (relative to the fiber diameter).
pub const LIPSCHITZ_TOLERANCE: f64 = 1e-6;

/// Base coordinate of a graph point, in the addressing natural to each
/// system: exact one-sided codes for the horseshoe Cantor base, torus
/// points for the Anosov base, circle coordinates for the baker base.
#[derive(Debug, Clone, PartialEq)]
pub enum BasePoint {
    Torus { x: f64, y: f64 },
    Code(PeriodicSeq),
    Circle { x1: f64, x2: f64 },
}

impl BasePoint {
    /// Planar coordinates for CSV output: (base_1, base_2).
    pub fn coords(&self, sys: &SkewSystem) -> (f64, f64) {
        match self {
            BasePoint::Torus { x, y } => (*x, *y),
            BasePoint::Code(seq) => match sys {
                SkewSystem::AffineHorseshoe(h) => (horseshoe_base_coord(h, seq, 60), 0.0),
                _ => (0.0, 0.0),
            },
            BasePoint::Circle { x1, x2 } => (*x1, *x2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphPoint {
    pub base: BasePoint,
    pub value: f64,
    pub error_bound: f64,
}

/// The invariant graph restricted to a parametrized unstable segment,
/// ordered by strictly increasing parameter.
#[derive(Debug, Clone)]
pub struct SampledGraph {
    pub params: Vec<f64>,
    pub points: Vec<GraphPoint>,
}

impl SampledGraph {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }

    /// CSV rows `param,base_1,base_2,value,error_bound`.
    pub fn write_csv<W: std::io::Write>(&self, sys: &SkewSystem, mut w: W) -> Result<()> {
        writeln!(w, "param,base_1,base_2,value,error_bound")?;
        for (s, p) in self.params.iter().zip(&self.points) {
            let (b1, b2) = p.base.coords(sys);
            writeln!(
                w,
                "{s:.17e},{b1:.17e},{b2:.17e},{:.17e},{:.3e}",
                p.value, p.error_bound
            )?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Per-system fiber maps and orbits

/// Unit tangent of the expanding direction of the inverse cat map (the
/// contracting eigendirection (1, -phi) of (2 1; 1 1), normalized).
pub fn cat_unstable_direction() -> (f64, f64) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let norm = (1.0 + phi * phi).sqrt();
    (1.0 / norm, -phi / norm)
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// One step of the base map tau = A^{-1} mod 1 with A = (2 1; 1 1),
/// so A^{-1} = (1 -1; -1 2).
fn cat_inverse_step(x: f64, y: f64) -> (f64, f64) {
    (frac(x - y), frac(-x + 2.0 * y))
}

impl HorseshoeSystem {
    /// Inverse fiber map of the branch over symbol `s` (the IFS generating
    /// the fiber structure): x/lambda and (x + t)/lambda.
    pub fn fiber_contract(&self, s: u8, x: f64) -> f64 {
        match s {
            0 => x / self.lambda,
            _ => (x + self.t) / self.lambda,
        }
    }

    /// Forward fiber map over symbol `s`: lambda x and lambda x - t.
    pub fn fiber_expand(&self, s: u8, x: f64) -> f64 {
        match s {
            0 => self.lambda * x,
            _ => self.lambda * x - self.t,
        }
    }

    /// Base IFS on the unit hull of the unstable Cantor set:
    /// u/kappa and (u + kappa - 1)/kappa, fixing 0 and 1.
    pub fn base_contract(&self, s: u8, u: f64) -> f64 {
        match s {
            0 => u / self.kappa,
            _ => (u + self.kappa - 1.0) / self.kappa,
        }
    }
}

/// Geometric coordinate in [0,1] of a coded point on the unstable Cantor
/// set, resolved to `depth` symbols.
pub fn horseshoe_base_coord(h: &HorseshoeSystem, seq: &PeriodicSeq, depth: usize) -> f64 {
    let mut u = 0.0;
    for i in (0..depth).rev() {
        u = h.base_contract(seq.symbol(i), u);
    }
    u
}

impl BakerSystem {
    /// Forward circle coordinate b^k x1 mod 1. For dyadic rationals
    /// j / 2^m this is exact in integer arithmetic for any k.
    pub fn forward_x1(&self, x1: f64, k: u32) -> f64 {
        if let Some((num, log2_den)) = as_dyadic(x1) {
            let den: u128 = 1u128 << log2_den;
            let mut acc: u128 = num as u128 % den;
            let mut base: u128 = self.b as u128 % den;
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % den;
                }
                base = base * base % den;
                e >>= 1;
            }
            acc as f64 / den as f64
        } else {
            frac(x1 * (self.b as f64).powi(k as i32))
        }
    }
}

/// Decompose a float as j / 2^40, when it is such a dyadic rational in
/// [0, 1).
fn as_dyadic(x: f64) -> Option<(u64, u32)> {
    if !(0.0..1.0).contains(&x) {
        return None;
    }
    let scaled = x * (1u64 << 40) as f64;
    if scaled.fract() == 0.0 {
        Some((scaled as u64, 40))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Graph evaluation

/// Fiber diameter bound used in truncation error estimates.
pub fn fiber_diameter(sys: &SkewSystem) -> f64 {
    // The extra unit covers seed values x0 within 1 of the attractor hull;
    // the 2% slack absorbs rounding of the contraction chain itself.
    match sys {
        SkewSystem::AffineAnosov(s) => 2.0 * s.forcing.sup_bound() / (1.0 - 1.0 / s.lambda) + 1.0,
        SkewSystem::AffineHorseshoe(h) => 1.02 * (h.fiber_range() + 1.0),
        SkewSystem::BakerWeierstrass(s) => 2.0 / (1.0 - 1.0 / s.lambda) + 1.0,
    }
}

/// Evaluate Phi_n(xi) = T_xi^{-1} o ... o T_{tau^{n-1} xi}^{-1}(x0).
pub fn evaluate_graph(sys: &SkewSystem, base: &BasePoint, depth: usize, x0: f64) -> GraphPoint {
    let diam = fiber_diameter(sys);
    match (sys, base) {
        (SkewSystem::AffineHorseshoe(h), BasePoint::Code(seq)) => {
            let mut x = x0;
            for i in (0..depth).rev() {
                x = h.fiber_contract(seq.symbol(i), x);
            }
            GraphPoint {
                base: base.clone(),
                value: x,
                error_bound: diam * h.lambda.powi(-(depth as i32)),
            }
        }
        (SkewSystem::AffineAnosov(s), BasePoint::Torus { x, y }) => {
            let n = depth.min(ANOSOV_ORBIT_CAP);
            // Phi_n(xi) = sum_{k=1..n} lambda^{1-k} p(tau^k xi) + lambda^{-n} x0.
            let (mut px, mut py) = (*x, *y);
            let mut acc = 0.0;
            let mut weight = 1.0;
            for _ in 1..=n {
                let step = cat_inverse_step(px, py);
                px = step.0;
                py = step.1;
                acc += weight * s.forcing.eval(px, py);
                weight /= s.lambda;
            }
            acc += weight * x0;
            // Truncation plus the roundoff growth of backward torus orbits
            // ((kappa/lambda)^n, epsilon-seeded).
            let kappa = crate::systems::cat_kappa();
            let roundoff = s.forcing.gradient_bound()
                * 4.0
                * f64::EPSILON
                * ((kappa / s.lambda).powi(n as i32)).min(1e12);
            GraphPoint {
                base: base.clone(),
                value: acc,
                error_bound: diam * s.lambda.powi(-(n as i32)) + roundoff,
            }
        }
        (SkewSystem::BakerWeierstrass(s), BasePoint::Circle { x1, .. }) => {
            let n = depth.min(60);
            let mut acc = 0.0;
            let mut weight = 1.0;
            let tau = std::f64::consts::TAU;
            for k in 0..n {
                let xk = s.forward_x1(*x1, k as u32);
                acc += weight * (tau * xk).cos();
                weight /= s.lambda;
            }
            acc += weight * x0;
            GraphPoint {
                base: base.clone(),
                value: acc,
                error_bound: diam * s.lambda.powi(-(n as i32)),
            }
        }
        _ => panic!(
            "base point representation does not match system kind {}",
            sys.kind_name()
        ),
    }
}

/// Phi on the invariant unstable line through the torus fixed point (0,0),
/// parametrized by arc length. Backward orbits on this line contract in the
/// parameter, so positions stay exact: tau^k xi(s) = xi(s kappa^k).
pub fn anosov_phi_on_line(sys: &crate::systems::AnosovSystem, s_param: f64, depth: usize) -> f64 {
    let kappa = crate::systems::cat_kappa();
    let (vx, vy) = cat_unstable_direction();
    let mut acc = 0.0;
    let mut weight = 1.0;
    let mut param = s_param;
    for _ in 1..=depth {
        param *= kappa;
        acc += weight * sys.forcing.eval(frac(param * vx), frac(param * vy));
        weight /= sys.lambda;
    }
    acc
}

/// Uniformly parametrized sample of Phi over a unit-length unstable segment
/// through `anchor`: the eigenline for the Anosov base, the coded Cantor
/// leaf for the horseshoe, the x1-circle for the baker base.
pub fn sample_unstable_slice(
    sys: &SkewSystem,
    anchor: &BasePoint,
    resolution_log2: u32,
    depth: usize,
) -> SampledGraph {
    let count = 1usize << resolution_log2;
    let mut params = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    match (sys, anchor) {
        (SkewSystem::AffineAnosov(_), BasePoint::Torus { x, y }) => {
            let (vx, vy) = cat_unstable_direction();
            for i in 0..count {
                let s = i as f64 / count as f64;
                let px = frac(x + s * vx);
                let py = frac(y + s * vy);
                let gp = evaluate_graph(sys, &BasePoint::Torus { x: px, y: py }, depth, 0.0);
                params.push(s);
                points.push(gp);
            }
        }
        (SkewSystem::AffineHorseshoe(h), BasePoint::Code(tail)) => {
            let m = resolution_log2 as usize;
            for i in 0..count {
                // Lexicographic word order is the spatial order of the
                // orientation-preserving base IFS.
                let word: Vec<u8> = (0..m).map(|b| ((i >> (m - 1 - b)) & 1) as u8).collect();
                let seq = tail.prepend(&word);
                let param = horseshoe_base_coord(h, &seq, m + 60);
                let gp = evaluate_graph(sys, &BasePoint::Code(seq), depth, 0.0);
                params.push(param);
                points.push(gp);
            }
        }
        (SkewSystem::BakerWeierstrass(_), BasePoint::Circle { x2, .. }) => {
            for i in 0..count {
                let s = i as f64 / count as f64;
                let gp = evaluate_graph(sys, &BasePoint::Circle { x1: s, x2: *x2 }, depth, 0.0);
                params.push(s);
                points.push(gp);
            }
        }
        _ => panic!("anchor representation does not match system {}", sys.kind_name()),
    }
    SampledGraph { params, points }
}

// ---------------------------------------------------------------------------
// gamma^{u,n} and Delta^u

/// A probe pair (xi, eta) on one local unstable leaf, in the per-system
/// leaf addressing.
#[derive(Debug, Clone)]
pub enum LeafPair {
    /// Horseshoe: future codes of xi and eta; the shared past of the leaf.
    Codes {
        xi: PeriodicSeq,
        eta: PeriodicSeq,
        past: PeriodicSeq,
    },
    /// Anosov: arc-length parameters on the unstable line through (0,0).
    LineParams { xi: f64, eta: f64 },
    /// Baker: x1 coordinates on the circle leaf (past branch digits all 0).
    CircleParams { xi: f64, eta: f64 },
}

/// gamma^{u,n}_xi(eta) = T^n at tau^{-n}(eta) applied to Phi(tau^{-n}(xi)):
/// the n-th approximation of the strong unstable curve through
/// (xi, Phi(xi)) evaluated over eta.
pub fn gamma_u_approx(sys: &SkewSystem, pair: &LeafPair, n: usize, extra_depth: usize) -> f64 {
    match (sys, pair) {
        (SkewSystem::AffineHorseshoe(h), LeafPair::Codes { xi, eta, past }) => {
            // tau^{-n} prepends the last n past symbols (read towards the
            // present); the fiber maps along the return trip follow eta's
            // backward orbit, whose symbols are those same past entries.
            let prefix: Vec<u8> = (0..n).rev().map(|i| past.symbol(i)).collect();
            let shifted_xi = xi.prepend(&prefix);
            let phi_back =
                evaluate_graph(sys, &BasePoint::Code(shifted_xi), n + extra_depth, 0.0).value;
            let _ = eta;
            let mut x = phi_back;
            for i in 0..n {
                x = h.fiber_expand(prefix[n - 1 - i], x);
            }
            x
        }
        (SkewSystem::AffineAnosov(s), LeafPair::LineParams { xi, eta }) => {
            let kappa = crate::systems::cat_kappa();
            let contraction = kappa.powi(-(n as i32));
            let phi_back = anosov_phi_on_line(s, xi * contraction, n + extra_depth);
            // Roll forward along eta's backward orbit: x <- lambda (x - p(tau^{-j} eta)).
            let (vx, vy) = cat_unstable_direction();
            let mut x = phi_back;
            for j in (0..n).rev() {
                let param = eta * kappa.powi(-(j as i32));
                x = s.lambda * (x - s.forcing.eval(frac(param * vx), frac(param * vy)));
            }
            x
        }
        (SkewSystem::BakerWeierstrass(s), LeafPair::CircleParams { xi, eta }) => {
            let bn = (s.b as f64).powi(n as i32);
            let mut acc = 0.0;
            let mut weight = 1.0;
            let tau = std::f64::consts::TAU;
            // Phi(tau^{-n} xi) with the all-zero branch past: x1 / b^n.
            let x_back = xi / bn;
            for k in 0..(n + extra_depth) {
                let xk = frac(x_back * (s.b as f64).powi(k as i32));
                acc += weight * (tau * xk).cos();
                weight /= s.lambda;
            }
            let mut x = acc;
            for j in (1..=n).rev() {
                let e_param = eta / (s.b as f64).powi(j as i32);
                x = s.lambda * (x - (tau * e_param).cos());
            }
            x
        }
        _ => panic!("leaf pair does not match system {}", sys.kind_name()),
    }
}

/// Lower bound for Delta^u_delta(xi): the max over a seeded sample of eta in
/// the delta-ball of |Phi(eta) - gamma^{u,n}_xi(eta)|.
pub fn delta_u_estimate(
    sys: &SkewSystem,
    xi_probe: &LeafPair,
    delta: f64,
    samples: usize,
    n: usize,
    seed: u64,
) -> f64 {
    assert!(samples >= 2, "need at least two samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (pair, phi_eta) = match (sys, xi_probe) {
            (SkewSystem::AffineHorseshoe(h), LeafPair::Codes { xi, past, .. }) => {
                // Random future code within base distance delta of xi.
                let word: Vec<u8> = (0..50).map(|_| rng.random_range(0..2) as u8).collect();
                let eta = PeriodicSeq::new(word, vec![0]);
                let du = (horseshoe_base_coord(h, &eta, 60)
                    - horseshoe_base_coord(h, xi, 60))
                .abs();
                if du > delta {
                    continue;
                }
                let phi = evaluate_graph(sys, &BasePoint::Code(eta.clone()), 64, 0.0).value;
                (
                    LeafPair::Codes {
                        xi: xi.clone(),
                        eta,
                        past: past.clone(),
                    },
                    phi,
                )
            }
            (SkewSystem::AffineAnosov(s), LeafPair::LineParams { xi, .. }) => {
                let eta = xi + rng.random_range(-delta..delta);
                let phi = anosov_phi_on_line(s, eta, 50);
                (LeafPair::LineParams { xi: *xi, eta }, phi)
            }
            (SkewSystem::BakerWeierstrass(_), LeafPair::CircleParams { xi, .. }) => {
                let eta = frac(xi + rng.random_range(-delta..delta));
                let phi = evaluate_graph(sys, &BasePoint::Circle { x1: eta, x2: 0.0 }, 60, 0.0)
                    .value;
                (LeafPair::CircleParams { xi: *xi, eta }, phi)
            }
            _ => panic!("leaf pair does not match system"),
        };
        let gamma = gamma_u_approx(sys, &pair, n, 30);
        worst = worst.max((phi_eta - gamma).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Holder exponent and regularity classification

/// Slope of log(max oscillation over dyadic windows of size 2^{-j}) against
/// -j log 2 over the given window of levels. Zero-oscillation levels are
/// dropped; an entirely flat graph clamps to exponent 1.
pub fn holder_exponent_estimate(
    g: &SampledGraph,
    scale_window: (u32, u32),
) -> Result<f64> {
    let (j_min, j_max) = scale_window;
    if j_min > j_max {
        return Err(Error::InvalidParameters("empty scale window".into()));
    }
    if g.len() < (1usize << (j_max + 2)) {
        return Err(Error::InsufficientResolution(format!(
            "need at least 2^{} points for level {j_max}, have {}",
            j_max + 2,
            g.len()
        )));
    }
    let p_lo = g.params.first().copied().unwrap_or(0.0);
    let p_hi = g.params.last().copied().unwrap_or(1.0);
    let span = (p_hi - p_lo).max(f64::MIN_POSITIVE);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in j_min..=j_max {
        let bins = 1usize << j;
        let mut min_v = vec![f64::INFINITY; bins];
        let mut max_v = vec![f64::NEG_INFINITY; bins];
        for (s, p) in g.params.iter().zip(&g.points) {
            let b = (((s - p_lo) / span) * bins as f64).min(bins as f64 - 1.0) as usize;
            min_v[b] = min_v[b].min(p.value);
            max_v[b] = max_v[b].max(p.value);
        }
        let osc = min_v
            .iter()
            .zip(&max_v)
            .filter(|(lo, hi)| hi.is_finite() && lo.is_finite())
            .map(|(lo, hi)| hi - lo)
            .fold(0.0f64, f64::max);
        if osc > 1e-14 {
            xs.push(-(j as f64) * std::f64::consts::LN_2);
            ys.push(osc.ln());
        }
    }
    if xs.len() < 2 {
        // No measurable oscillation anywhere: flat graph.
        return Ok(1.0);
    }
    let fit = crate::numerics::least_squares(&xs, &ys);
    Ok(fit.slope.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityVerdict {
    Lipschitz,
    CriticalHolder,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub delta_u_estimate: f64,
    pub holder_exponent: f64,
    /// log lambda_s / log kappa_w, the critical exponent beyond which the
    /// graph is nowhere Holder in the non-Lipschitz case.
    pub critical_exponent: f64,
    pub verdict: RegularityVerdict,
    pub lipschitz_tolerance: f64,
    /// Per-probe Delta^u estimates (fixed-point probes first).
    pub probe_estimates: Vec<f64>,
}

/// Probe Delta^u at the two fixed-point codes plus eight seeded probes and
/// classify: Lipschitz iff every estimate stays at or below the tolerance.
pub fn classify_regularity(sys: &SkewSystem, seed: u64) -> RegularityReport {
    let mut probes: Vec<LeafPair> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match sys {
        SkewSystem::AffineHorseshoe(_) => {
            let past = PeriodicSeq::periodic(vec![0]);
            probes.push(LeafPair::Codes {
                xi: PeriodicSeq::periodic(vec![0]),
                eta: PeriodicSeq::periodic(vec![0]),
                past: past.clone(),
            });
            probes.push(LeafPair::Codes {
                xi: PeriodicSeq::periodic(vec![1]),
                eta: PeriodicSeq::periodic(vec![1]),
                past: PeriodicSeq::periodic(vec![1]),
            });
            for _ in 0..8 {
                let word: Vec<u8> = (0..40).map(|_| rng.random_range(0..2) as u8).collect();
                probes.push(LeafPair::Codes {
                    xi: PeriodicSeq::new(word, vec![0]),
                    eta: PeriodicSeq::periodic(vec![0]),
                    past: past.clone(),
                });
            }
        }
        SkewSystem::AffineAnosov(_) => {
            probes.push(LeafPair::LineParams { xi: 0.0, eta: 0.0 });
            probes.push(LeafPair::LineParams { xi: 0.25, eta: 0.25 });
            for _ in 0..8 {
                let s = rng.random_range(-0.5..0.5);
                probes.push(LeafPair::LineParams { xi: s, eta: s });
            }
        }
        SkewSystem::BakerWeierstrass(_) => {
            probes.push(LeafPair::CircleParams { xi: 0.0, eta: 0.0 });
            probes.push(LeafPair::CircleParams { xi: 0.5, eta: 0.5 });
            for _ in 0..8 {
                let s = (rng.random_range(0..(1u64 << 20)) as f64) / (1u64 << 20) as f64;
                probes.push(LeafPair::CircleParams { xi: s, eta: s });
            }
        }
    }
    let delta = match sys {
        SkewSystem::AffineHorseshoe(_) => 1.0,
        _ => 0.5,
    };
    let probe_estimates: Vec<f64> = probes
        .iter()
        .enumerate()
        .map(|(i, p)| delta_u_estimate(sys, p, delta, 128, 24, seed.wrapping_add(i as u64)))
        .collect();
    let delta_u = probe_estimates.iter().cloned().fold(0.0, f64::max);
    let tol = LIPSCHITZ_TOLERANCE * fiber_diameter(sys);
    let c = sys.constants();
    // Empirical exponent from a moderate-resolution slice.
    let anchor = default_anchor(sys);
    let slice = sample_unstable_slice(sys, &anchor, 14, 40);
    let holder = holder_exponent_estimate(&slice, (3, 10)).unwrap_or(1.0);
    let verdict = if delta_u <= tol {
        RegularityVerdict::Lipschitz
    } else {
        RegularityVerdict::CriticalHolder
    };
    RegularityReport {
        delta_u_estimate: delta_u,
        holder_exponent: holder,
        critical_exponent: c.critical_exponent(),
        verdict,
        lipschitz_tolerance: tol,
        probe_estimates,
    }
}

/// Natural anchor of the unstable slice through the distinguished fixed
/// point of each example system.
pub fn default_anchor(sys: &SkewSystem) -> BasePoint {
    match sys {
        SkewSystem::AffineAnosov(_) => BasePoint::Torus { x: 0.0, y: 0.0 },
        SkewSystem::AffineHorseshoe(_) => BasePoint::Code(PeriodicSeq::periodic(vec![0])),
        SkewSystem::BakerWeierstrass(_) => BasePoint::Circle { x1: 0.0, x2: 0.0 },
    }
}
