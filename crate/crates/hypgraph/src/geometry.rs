//! Box counting, dimension regression, Markov-rectangle size estimates, and
//! Moran covers.

use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::numerics::{least_squares, theil_sen, LineFit};
use crate::symbolic::{birkhoff_sum, periodic_completion, Potential, ShiftSpace, Word};
use crate::systems::SkewSystem;

/// Points in ambient dimension 1, 2, or 3 with a declared bounding box.
#[derive(Debug, Clone)]
pub enum PointSet {
    D1(Vec<f64>),
    D2(Vec<[f64; 2]>),
    D3(Vec<[f64; 3]>),
}

impl PointSet {
    pub fn len(&self) -> usize {
        match self {
            PointSet::D1(v) => v.len(),
            PointSet::D2(v) => v.len(),
            PointSet::D3(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            PointSet::D1(_) => 1,
            PointSet::D2(_) => 2,
            PointSet::D3(_) => 3,
        }
    }

    fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut feed = |coords: &[f64]| {
            for (i, &c) in coords.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        };
        match self {
            PointSet::D1(v) => v.iter().for_each(|&x| feed(&[x])),
            PointSet::D2(v) => v.iter().for_each(|p| feed(p)),
            PointSet::D3(v) => v.iter().for_each(|p| feed(p)),
        }
        (lo, hi)
    }

    pub fn from_graph(g: &SampledGraph) -> PointSet {
        PointSet::D2(
            g.params
                .iter()
                .zip(&g.points)
                .map(|(&s, p)| [s, p.value])
                .collect(),
        )
    }
}

/// A ladder of dyadic scales with occupancy counts and the fitted slope.
#[derive(Debug, Clone)]
pub struct BoxCountTable {
    /// Dyadic levels j with delta = 2^-j.
    pub ladder: Vec<u32>,
    pub counts: Vec<u64>,
    /// Levels excluded from the fit because the sample is too sparse to
    /// trust the occupancy there (fewer than 10 points per occupied cell,
    /// the same adequacy ratio the sampling precondition asks of the
    /// finest scale).
    pub undersampled: Vec<u32>,
    pub fit: LineFit,
    /// Levels actually used by the fit.
    pub window: (u32, u32),
}

impl BoxCountTable {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,delta,count")?;
        for (j, c) in self.ladder.iter().zip(&self.counts) {
            writeln!(w, "{j},{:.10e},{c}", 2f64.powi(-(*j as i32)))?;
        }
        Ok(())
    }

    pub fn fit_summary(&self) -> String {
        format!(
            "slope={:.6},stderr={:.6},window={}:{},r2={:.6}",
            self.fit.slope, self.fit.stderr, self.window.0, self.window.1, self.fit.r_squared
        )
    }
}

/// Count occupied cells of the dyadic grid at level j, anchored at the
/// bounding-box corner shifted by `offset` cells (0.5 for the anchor
/// invariance check).
fn occupancy(points: &PointSet, lo: &[f64; 3], hi: &[f64; 3], j: u32, offset: f64) -> u64 {
    let delta = 2f64.powi(-(j as i32));
    // Points on the far box boundary belong to the last cell of each axis.
    let top = |axis: usize| -> u64 {
        (((hi[axis] - lo[axis]) / delta + offset).ceil() as u64).max(1) - 1
    };
    let tops = [top(0), top(1), top(2)];
    debug_assert!(tops.iter().all(|&t| t < (1 << 21)), "axis index overflow");
    let quant = |x: f64, axis: usize| -> u64 {
        let idx = ((x - lo[axis]) / delta + offset).floor();
        (idx.max(0.0) as u64).min(tops[axis])
    };
    let mut keys: Vec<u64> = match points {
        PointSet::D1(v) => v.iter().map(|&x| quant(x, 0)).collect(),
        PointSet::D2(v) => v
            .iter()
            .map(|p| quant(p[0], 0) | (quant(p[1], 1) << 21))
            .collect(),
        PointSet::D3(v) => v
            .iter()
            .map(|p| quant(p[0], 0) | (quant(p[1], 1) << 21) | (quant(p[2], 2) << 42))
            .collect(),
    };
    keys.sort_unstable();
    keys.dedup();
    keys.len() as u64
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BoxCountOptions {
    /// Explicit fit window (j_lo, j_hi); default drops the 2 coarsest and 2
    /// finest ladder levels.
    pub window: Option<(u32, u32)>,
    /// Robust Theil-Sen fit instead of least squares.
    pub robust: bool,
    /// Half-cell anchor offset, for the anchor-invariance diagnostic.
    pub half_cell_offset: bool,
}

/// Occupancy box counting over a dyadic ladder with a least-squares slope of
/// log N against -log delta. Scales with fewer than 10 sample points per
/// occupied cell are excluded from the fit and reported; below that ratio
/// the occupancy visibly undercounts the set.
pub fn box_dimension_estimate(
    points: &PointSet,
    ladder: &[u32],
    opts: BoxCountOptions,
) -> Result<BoxCountTable> {
    if points.len() < 2 {
        return Err(Error::InsufficientResolution(
            "need at least 2 points".into(),
        ));
    }
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameters(
            "ladder must be strictly increasing and nonempty".into(),
        ));
    }
    let (lo, hi) = points.bounding_box();
    let j_max = *ladder.last().unwrap();
    let extent = (0..points.ambient_dim())
        .map(|a| hi[a] - lo[a])
        .fold(0.0f64, f64::max);
    if extent * 2f64.powi(j_max as i32) >= (1u64 << 21) as f64 {
        return Err(Error::InvalidParameters(format!(
            "ladder level {j_max} over a box of extent {extent:.3} exceeds the 21-bit cell index"
        )));
    }
    let offset = if opts.half_cell_offset { 0.5 } else { 0.0 };
    let counts: Vec<u64> = ladder
        .iter()
        .map(|&j| occupancy(points, &lo, &hi, j, offset))
        .collect();

    let (w_lo, w_hi) = match opts.window {
        Some(w) => w,
        None => default_window(ladder)?,
    };
    let mut undersampled = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&j, &c) in ladder.iter().zip(&counts) {
        if j < w_lo || j > w_hi {
            continue;
        }
        if 10 * c > points.len() as u64 {
            undersampled.push(j);
            continue;
        }
        xs.push(j as f64 * std::f64::consts::LN_2);
        ys.push((c as f64).ln());
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientResolution(format!(
            "fewer than 2 usable scales in window {w_lo}:{w_hi} (undersampled: {undersampled:?})"
        )));
    }
    let fit = if opts.robust {
        theil_sen(&xs, &ys)
    } else {
        least_squares(&xs, &ys)
    };
    Ok(BoxCountTable {
        ladder: ladder.to_vec(),
        counts,
        undersampled,
        fit,
        window: (w_lo, w_hi),
    })
}

fn default_window(ladder: &[u32]) -> Result<(u32, u32)> {
    if ladder.len() < 5 {
        return Err(Error::InvalidParameters(
            "ladder too short for the default window (need 5+ levels)".into(),
        ));
    }
    Ok((ladder[2], ladder[ladder.len() - 3]))
}

// ---------------------------------------------------------------------------
// Markov rectangle sizes

/// Width and height of an n-th level Markov unstable rectangle, exact for
/// the affine systems: width = W0 exp(S_n phi_u), height = H0 exp(S_n
/// phi_cu), and height identically zero in the Lipschitz case.
#[derive(Debug, Clone)]
pub struct RectangleSize {
    pub width: f64,
    pub height: f64,
    pub word: Word,
    /// True when the Lipschitz alternative forces zero height.
    pub lipschitz_height_zero: bool,
}

/// Level-0 width and height scales of the Markov rectangles per system: the
/// horseshoe base strips span the full [-2,2] leaf segment (width 4), the
/// fiber height is the attractor range.
fn rectangle_scales(sys: &SkewSystem) -> (f64, f64) {
    match sys {
        SkewSystem::AffineHorseshoe(h) => (4.0, h.fiber_range()),
        SkewSystem::AffineAnosov(s) => (1.0, 2.0 * s.forcing.sup_bound() / (1.0 - 1.0 / s.lambda)),
        SkewSystem::BakerWeierstrass(s) => (1.0, 2.0 / (1.0 - 1.0 / s.lambda)),
    }
}

/// Whether the graph is Lipschitz on unstable leaves, decided structurally
/// for the affine examples (zero forcing or t = 0).
pub fn is_structurally_lipschitz(sys: &SkewSystem) -> bool {
    match sys {
        SkewSystem::AffineHorseshoe(h) => h.t == 0.0,
        SkewSystem::AffineAnosov(s) => s.forcing.is_zero(),
        SkewSystem::BakerWeierstrass(_) => false,
    }
}

pub fn markov_rectangle_size(sys: &SkewSystem, w: &Word) -> Result<RectangleSize> {
    let shift = sys.base_shift();
    if !shift.is_admissible(w) {
        return Err(Error::InvalidParameters(format!(
            "word {w} is not admissible for the base coding"
        )));
    }
    let n = w.len() as i32;
    let c = sys.constants();
    let (w0, h0) = rectangle_scales(sys);
    // For the affine systems S_n phi_u = -n log kappa and S_n phi_cu =
    // -n log lambda exactly, so the distortion constant is 1.
    let width = w0 * c.kappa_w.powi(-n);
    let lipschitz = is_structurally_lipschitz(sys);
    let height = if lipschitz {
        0.0
    } else {
        h0 * c.lambda_w.powi(-n)
    };
    Ok(RectangleSize {
        width,
        height,
        word: w.clone(),
        lipschitz_height_zero: lipschitz,
    })
}

// ---------------------------------------------------------------------------
// Moran covers

/// A partition of the one-sided shift into cylinders [w] whose weights
/// exp(S_n psi1) first drop below the scale r.
#[derive(Debug, Clone)]
pub struct MoranCover {
    pub r: f64,
    pub cells: Vec<Word>,
    /// Smallest and largest cell length.
    pub n_bounds: (usize, usize),
}

/// Build the Moran cover of parameter r for a strictly negative psi1: walk
/// the word tree and cut each branch at the first n with S_n psi1 < log r
/// (strict), Birkhoff sums taken at the periodic completion of each prefix.
pub fn moran_cover(
    shift: &ShiftSpace,
    psi1: &Potential,
    r: f64,
    budget: u128,
) -> Result<MoranCover> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::InvalidParameters("r must lie in (0, 1)".into()));
    }
    if !psi1.is_strictly_negative() {
        return Err(Error::NotMonotone("psi1 must be strictly negative".into()));
    }
    let log_r = r.ln();
    // The cut depth is bounded via the weakest contraction rate.
    let n_max = (log_r / psi1.max_value()).ceil() as usize + 1;
    if shift.word_count(n_max) > budget {
        return Err(Error::BudgetExceeded {
            required: shift.word_count(n_max),
            budget,
        });
    }
    let mut cells = Vec::new();
    let mut stack: Vec<Vec<u8>> = (0..shift.alphabet() as u8).rev().map(|s| vec![s]).collect();
    while let Some(prefix) = stack.pop() {
        let word = Word::new(prefix.clone());
        let seq = periodic_completion(shift, &word)?;
        let s_n = birkhoff_sum(psi1, &seq, prefix.len());
        if s_n < log_r {
            cells.push(word);
        } else {
            if prefix.len() > n_max + 2 {
                return Err(Error::InvalidParameters(
                    "Moran recursion exceeded its depth bound".into(),
                ));
            }
            let last = *prefix.last().unwrap();
            for s in (0..shift.alphabet() as u8).rev() {
                if shift.allows(last, s) {
                    let mut child = prefix.clone();
                    child.push(s);
                    stack.push(child);
                }
            }
        }
    }
    cells.sort();
    let n_lo = cells.iter().map(Word::len).min().unwrap_or(0);
    let n_hi = cells.iter().map(Word::len).max().unwrap_or(0);
    Ok(MoranCover {
        r,
        cells,
        n_bounds: (n_lo, n_hi),
    })
}

impl MoranCover {
    /// Exhaustive check that the cells are pairwise disjoint cylinders whose
    /// union is the whole shift: every admissible word of length L has
    /// exactly one cell as a prefix.
    pub fn verify_partition(&self, shift: &ShiftSpace, extend_to: usize) -> bool {
        if self.cells.iter().any(|c| c.len() > extend_to) {
            return false;
        }
        for w in shift.cylinder_words(extend_to) {
            let mut hits = 0;
            for cell in &self.cells {
                if w.symbols().starts_with(cell.symbols()) {
                    hits += 1;
                }
            }
            if hits != 1 {
                return false;
            }
        }
        true
    }

    /// Re-check the defining scale inequality exp(S_n psi1) < r <=
    /// exp(S_{n-1} psi1) on every cell.
    pub fn verify_scale(&self, shift: &ShiftSpace, psi1: &Potential) -> bool {
        let log_r = self.r.ln();
        self.cells.iter().all(|cell| {
            let n = cell.len();
            let seq = periodic_completion(shift, cell).expect("cells are closable");
            let s_n = birkhoff_sum(psi1, &seq, n);
            let parent_ok = if n == 1 {
                true
            } else {
                let parent = Word::new(cell.symbols()[..n - 1].to_vec());
                let pseq = periodic_completion(shift, &parent).expect("closable");
                birkhoff_sum(psi1, &pseq, n - 1) >= log_r
            };
            s_n < log_r && parent_ok
        })
    }
}
