//! Command-line front end: parse system configs, dispatch experiments, and
//! emit CSV/report data.

use crate::blender;
use crate::error::{Error, Result};
use crate::geometry::{box_dimension_estimate, moran_cover, BoxCountOptions, PointSet};
use crate::graph::{
    classify_regularity, default_anchor, sample_unstable_slice, RegularityVerdict,
};
use crate::multifractal::variational_with_ladder;
use crate::pressure::{solve_bowen, solve_pressure_root};
use crate::systems::{
    build_system, geometric_potentials, parse_config, validate_hypotheses, RunConfigFile,
    SkewSystem,
};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "hypgraph", version, about = "Invariant graphs of hyperbolic skew products: dimension predictions and measurements")]
pub struct Cli {
    /// System configuration file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed recorded in outputs and used for probe sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sample resolution as an exponent: `2^m` or plain `m`.
    #[arg(long, global = true)]
    pub resolution: Option<String>,
    /// Backward-cocycle truncation depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Dyadic scale ladder `j_min:j_max` for box counting.
    #[arg(long, global = true)]
    pub ladder: Option<String>,
    /// Fit window `a:b` within the ladder.
    #[arg(long, global = true)]
    pub window: Option<String>,
    /// Omit the timestamp header line (for byte-stable CI output).
    #[arg(long, global = true, default_value_t = false)]
    pub no_timestamp: bool,
    /// Outlier-resistant Theil-Sen slope instead of least squares.
    #[arg(long, global = true, default_value_t = false)]
    pub robust: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the invariant graph on an unstable slice (CSV).
    Graph,
    /// Sample, box-count, and fit the slice dimension.
    Boxdim,
    /// Solve the dimension formula for the configured system.
    Predict,
    /// Pressure values and Bowen/pressure-equation roots.
    Pressure,
    /// Birkhoff-counting entropy surface and variational dimension.
    Multifractal,
    /// Moran cover of the base shift at a scale parameter.
    Moran {
        /// Scale parameter r in (0,1).
        #[arg(long, default_value_t = 0.01)]
        r: f64,
    },
    /// Overlap/covering/germ checks; `--sweep` writes the regime CSV.
    Blender {
        #[arg(long, default_value_t = false)]
        sweep: bool,
    },
    /// Critical-regularity classification.
    Regularity,
    /// Prediction and measurement side by side.
    Report,
}

/// Entry point: returns the process exit code. Exit 2 flags config errors,
/// exit 3 budget errors, exit 1 internal invariant violations.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParameters(_) => 2,
                Error::BudgetExceeded { .. } | Error::DepthTooLarge { .. } => 3,
                _ => 1,
            }
        }
    }
}

struct Ctx {
    system: SkewSystem,
    cfg: RunConfigFile,
    seed: u64,
    config_hash: u64,
    resolution: Option<u32>,
    depth: Option<usize>,
    ladder: Option<(u32, u32)>,
    window: Option<(u32, u32)>,
    out: PathBuf,
    no_timestamp: bool,
    robust: bool,
}

fn load_ctx(cli: &Cli) -> Result<Ctx> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    let system = build_system(&cfg.system)?;
    let seed = cli.seed.unwrap_or(cfg.run.seed);
    let resolution = cli.resolution.as_deref().map(parse_resolution).transpose()?;
    let ladder = cli.ladder.as_deref().map(parse_range).transpose()?;
    let window = cli.window.as_deref().map(parse_range).transpose()?;
    let depth = match cli.depth {
        Some(d) if d > cfg.run.max_depth as usize => {
            return Err(Error::Config(format!(
                "--depth {d} exceeds the configured max_depth {}",
                cfg.run.max_depth
            )))
        }
        d => d,
    };
    Ok(Ctx {
        system,
        seed,
        config_hash: fnv1a(text.as_bytes()),
        resolution,
        depth,
        ladder,
        window,
        out: cli.out.clone(),
        no_timestamp: cli.no_timestamp,
        robust: cli.robust,
        cfg,
    })
}

fn parse_resolution(s: &str) -> Result<u32> {
    let body = s.strip_prefix("2^").unwrap_or(s);
    body.parse::<u32>()
        .map_err(|_| Error::Config(format!("cannot parse resolution `{s}` (expected `2^m` or `m`)")))
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("cannot parse range `{s}` (expected `a:b`)")))?;
    let lo = a
        .parse()
        .map_err(|_| Error::Config(format!("bad range start `{a}`")))?;
    let hi = b
        .parse()
        .map_err(|_| Error::Config(format!("bad range end `{b}`")))?;
    if lo >= hi {
        return Err(Error::Config(format!("range `{s}` must be increasing")));
    }
    Ok((lo, hi))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl Ctx {
    fn header(&self) -> String {
        let mut s = format!(
            "# hypgraph {VERSION} config={:016x} seed={}\n",
            self.config_hash, self.seed
        );
        if !self.no_timestamp {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            s.push_str(&format!("# generated unix={now}\n"));
        }
        s
    }

    fn write_output(&self, name: &str, body: &[u8]) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        let mut f = std::fs::File::create(&path)?;
        f.write_all(self.header().as_bytes())?;
        f.write_all(body)?;
        Ok(path)
    }

    fn slice_defaults(&self) -> (u32, usize, (u32, u32)) {
        // Resolution exponent, cocycle depth, dyadic ladder. The horseshoe
        // ladder starts even so the default window has balanced phase
        // against the quaternary base lattice.
        match &self.system {
            SkewSystem::AffineAnosov(_) => (20, 36, (4, 14)),
            SkewSystem::AffineHorseshoe(_) => (18, 60, (2, 13)),
            SkewSystem::BakerWeierstrass(_) => (20, 60, (2, 13)),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let ctx = load_ctx(cli)?;
    match &cli.command {
        Command::Graph => cmd_graph(&ctx),
        Command::Boxdim => cmd_boxdim(&ctx).map(|_| ()),
        Command::Predict => cmd_predict(&ctx).map(|_| ()),
        Command::Pressure => cmd_pressure(&ctx),
        Command::Multifractal => cmd_multifractal(&ctx),
        Command::Moran { r } => cmd_moran(&ctx, *r),
        Command::Blender { sweep } => cmd_blender(&ctx, *sweep),
        Command::Regularity => cmd_regularity(&ctx),
        Command::Report => cmd_report(&ctx),
    }
}

/// The two branches of the dimension formula.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub d_s: f64,
    pub d: f64,
    pub dim: f64,
    pub lipschitz: bool,
    /// Whether the reference value is derived from the pressure formula
    /// rather than printed in the source of the example family.
    pub derived: bool,
}

/// Evaluate the dimension prediction: the Lipschitz branch uses d = 1; the
/// non-Lipschitz branch solves P(phi_cu + (d-1) phi_u) = 0. The total is
/// d_s + d with d_s the Bowen root of the stable potential.
pub fn predict(sys: &SkewSystem) -> Result<Prediction> {
    let shift = sys.base_shift();
    let pots = geometric_potentials(sys);
    let lipschitz = crate::geometry::is_structurally_lipschitz(sys);
    // d_s: root of P(d phi_s) = 0 with phi_s = log(stable contraction) < 0.
    let d_s = solve_bowen(&shift, &pots.phi_s)?.d;
    let d = if lipschitz {
        1.0
    } else {
        solve_pressure_root(&shift, &pots.phi_cu, &pots.phi_u)?.d
    };
    Ok(Prediction {
        d_s,
        d,
        dim: d_s + d,
        lipschitz,
        derived: matches!(sys, SkewSystem::BakerWeierstrass(_)),
    })
}

fn cmd_predict(ctx: &Ctx) -> Result<Prediction> {
    let p = predict(&ctx.system)?;
    println!("system = {}", ctx.system.kind_name());
    println!(
        "branch = {}",
        if p.lipschitz { "lipschitz" } else { "critical_holder" }
    );
    println!("d_s = {:.6}", p.d_s);
    println!("d   = {:.6}", p.d);
    println!("dim = {:.6}", p.dim);
    if p.derived {
        println!("note: prediction derived from the pressure formula; no tabulated reference value exists for this family");
    }
    Ok(p)
}

fn cmd_graph(ctx: &Ctx) -> Result<()> {
    let (res_default, depth_default, _) = ctx.slice_defaults();
    let res = ctx.resolution.unwrap_or(res_default);
    let depth = ctx.depth.unwrap_or(depth_default);
    check_points_budget(ctx, res)?;
    let g = sample_unstable_slice(&ctx.system, &default_anchor(&ctx.system), res, depth);
    let mut body = Vec::new();
    g.write_csv(&ctx.system, &mut body)?;
    let path = ctx.write_output("graph.csv", &body)?;
    let script = "set datafile separator ','\n\
                  set xlabel 'param'\n\
                  set ylabel 'value'\n\
                  plot 'graph.csv' using 1:4 with dots notitle\n";
    ctx.write_output("graph.gp", script.as_bytes())?;
    println!("wrote {} ({} points) and graph.gp", path.display(), g.len());
    Ok(())
}

fn check_points_budget(ctx: &Ctx, res: u32) -> Result<()> {
    let points = 1u128 << res;
    if points > ctx.cfg.run.max_points as u128 {
        return Err(Error::BudgetExceeded {
            required: points,
            budget: ctx.cfg.run.max_points as u128,
        });
    }
    Ok(())
}

fn cmd_boxdim(ctx: &Ctx) -> Result<crate::geometry::BoxCountTable> {
    let (res_default, depth_default, ladder_default) = ctx.slice_defaults();
    let res = ctx.resolution.unwrap_or(res_default);
    let depth = ctx.depth.unwrap_or(depth_default);
    check_points_budget(ctx, res)?;
    let (j_lo, j_hi) = ctx.ladder.unwrap_or(ladder_default);
    let ladder: Vec<u32> = (j_lo..=j_hi).collect();
    let g = sample_unstable_slice(&ctx.system, &default_anchor(&ctx.system), res, depth);
    let pts = PointSet::from_graph(&g);
    let opts = BoxCountOptions {
        window: ctx.window,
        robust: ctx.robust,
        ..Default::default()
    };
    let table = box_dimension_estimate(&pts, &ladder, opts)?;
    let shifted = box_dimension_estimate(
        &pts,
        &ladder,
        BoxCountOptions {
            half_cell_offset: true,
            ..opts
        },
    )?;
    let mut body = Vec::new();
    table.write_csv(&mut body)?;
    let path = ctx.write_output("boxcount.csv", &body)?;
    let script = format!(
        "set datafile separator ','\n\
         set xlabel 'j'\n\
         set ylabel 'log2 N'\n\
         plot 'boxcount.csv' using 1:(log($3)/log(2)) with linespoints notitle, \\\n\
              {:.6} * x + {:.6} notitle\n",
        table.fit.slope,
        table.fit.intercept / std::f64::consts::LN_2
    );
    ctx.write_output("boxcount.gp", script.as_bytes())?;
    println!("wrote {}", path.display());
    println!("{}", table.fit_summary());
    println!(
        "anchor_check: offset_slope={:.6} (agreement {:.6})",
        shifted.fit.slope,
        (table.fit.slope - shifted.fit.slope).abs()
    );
    if !table.undersampled.is_empty() {
        println!("undersampled_scales = {:?}", table.undersampled);
    }
    Ok(table)
}

fn cmd_pressure(ctx: &Ctx) -> Result<()> {
    let shift = ctx.system.base_shift();
    let pots = geometric_potentials(&ctx.system);
    let hyp = validate_hypotheses(&ctx.system);
    println!("standing_ok = {}", hyp.standing_ok);
    println!("pinching_ok = {}", hyp.pinching_ok);
    for c in &hyp.checks {
        println!("  {}: lhs={:.6} rhs={:.6} ok={}", c.name, c.lhs, c.rhs, c.ok);
    }
    let d_s = solve_bowen(&shift, &pots.phi_s)?;
    let d_u = solve_bowen(&shift, &pots.phi_u)?;
    println!("bowen d_s = {:.6} (residual {:.2e})", d_s.d, d_s.pressure_at_root);
    println!("bowen d_u = {:.6} (residual {:.2e})", d_u.d, d_u.pressure_at_root);
    let root = solve_pressure_root(&shift, &pots.phi_cu, &pots.phi_u)?;
    println!(
        "pressure-equation d = {:.6} (residual {:.2e}, bracket [{:.2}, {:.2}], {} iterations)",
        root.d, root.pressure_at_root, root.bracket.0, root.bracket.1, root.iterations
    );
    Ok(())
}

fn cmd_multifractal(ctx: &Ctx) -> Result<()> {
    let shift = ctx.system.base_shift();
    if shift.entropy_override().is_some() {
        return Err(Error::InvalidParameters(
            "the counting pipeline needs an explicit symbolic base (not the Anosov entropy proxy)"
                .into(),
        ));
    }
    let pots = geometric_potentials(&ctx.system);
    let n_ladder: Vec<usize> = [10usize, 12, 14, 16]
        .into_iter()
        .filter(|&n| shift.word_count(n) <= ctx.cfg.run.max_words as u128)
        .collect();
    if n_ladder.is_empty() {
        return Err(Error::BudgetExceeded {
            required: shift.word_count(10),
            budget: ctx.cfg.run.max_words as u128,
        });
    }
    let (surface, var) = variational_with_ladder(
        &shift,
        &pots.phi_u,
        &pots.phi_cu,
        &n_ladder,
        ctx.cfg.run.max_words as u128,
    )?;
    let mut body = Vec::new();
    surface.write_csv(&mut body)?;
    let path = ctx.write_output("multifractal.csv", &body)?;
    println!("wrote {}", path.display());
    println!(
        "t_variational = {:.6} (sandwich [{:.6}, {:.6}])",
        var.t_variational, var.t_sandwich.0, var.t_sandwich.1
    );
    println!("t_pressure_root = {:.6}", var.t_pressure_root);
    println!("gap = {:.6}", var.gap);
    println!("slice_dimension = {:.6} (1 + t)", 1.0 + var.t_pressure_root);
    Ok(())
}

fn cmd_moran(ctx: &Ctx, r: f64) -> Result<()> {
    let shift = ctx.system.base_shift();
    if shift.entropy_override().is_some() {
        return Err(Error::InvalidParameters(
            "Moran covers need an explicit symbolic base (not the Anosov entropy proxy)".into(),
        ));
    }
    let pots = geometric_potentials(&ctx.system);
    let cover = moran_cover(&shift, &pots.phi_u, r, ctx.cfg.run.max_words as u128)?;
    let mut body = Vec::new();
    writeln!(body, "len,word")?;
    for cell in &cover.cells {
        writeln!(body, "{},{}", cell.len(), cell)?;
    }
    let path = ctx.write_output("moran.csv", &body)?;
    println!("wrote {} ({} cells)", path.display(), cover.cells.len());
    println!("n_bounds = {}..{}", cover.n_bounds.0, cover.n_bounds.1);
    println!(
        "partition_ok = {}",
        cover.verify_partition(&shift, cover.n_bounds.1 + 2)
    );
    println!("scale_ok = {}", cover.verify_scale(&shift, &pots.phi_u));
    Ok(())
}

fn cmd_blender(ctx: &Ctx, sweep: bool) -> Result<()> {
    let h = match &ctx.system {
        SkewSystem::AffineHorseshoe(h) => h.clone(),
        _ => {
            return Err(Error::InvalidParameters(
                "blender checks apply to affine_horseshoe systems".into(),
            ))
        }
    };
    let depth = ctx.depth.unwrap_or(12) as u32;
    if sweep {
        let mut body = Vec::new();
        writeln!(body, "lambda,t,depth,connected,gap_fraction")?;
        for i in 0..10 {
            let lambda = 1.1 + 0.2 * i as f64;
            let probe = crate::systems::HorseshoeSystem { lambda, ..h };
            let rep = blender::fiber_projection_check(&probe, depth);
            writeln!(
                body,
                "{lambda:.2},{:.4},{depth},{},{:.8}",
                h.t,
                matches!(rep.verdict, blender::CoveringVerdict::Connected),
                rep.gap_fraction
            )?;
        }
        let path = ctx.write_output("blender_sweep.csv", &body)?;
        println!("wrote {}", path.display());
        return Ok(());
    }
    let overlap = blender::overlap_interval(h.lambda, h.t);
    match overlap.interval {
        Some((lo, hi)) => println!("overlap = [{lo:.6}, {hi:.6}] (length {:.6})", hi - lo),
        None => println!("overlap = none"),
    }
    println!("regime = {:?}", overlap.regime);
    let cover = blender::fiber_projection_check(&h, depth);
    println!(
        "projection: verdict = {:?}, gap_fraction = {:.6}",
        cover.verdict, cover.gap_fraction
    );
    if h.blender_regime() {
        let germ = blender::germ_height_check(&h, &crate::symbolic::Word::new(vec![0; 4]), None)?;
        println!(
            "germ: height_after_m = {:.6} >= delta = {:.6}: passed = {}",
            germ.height_after_m, germ.delta_threshold, germ.passed
        );
    }
    let gamma = ctx.system.constants().critical_exponent();
    let dim_base = solve_bowen(&ctx.system.base_shift(), &geometric_potentials(&ctx.system).phi_u)?.d;
    let bounds = blender::bound_regime(gamma, dim_base);
    println!(
        "D1 = {:.6}, D2 = {:.6}, binding = {}",
        bounds.d1,
        bounds.d2,
        if bounds.d2_binds { "D2" } else { "D1" }
    );
    Ok(())
}

fn cmd_regularity(ctx: &Ctx) -> Result<()> {
    let rep = classify_regularity(&ctx.system, ctx.seed);
    println!(
        "verdict = {}",
        match rep.verdict {
            RegularityVerdict::Lipschitz => "lipschitz",
            RegularityVerdict::CriticalHolder => "critical_holder",
        }
    );
    println!("delta_u_estimate = {:.3e}", rep.delta_u_estimate);
    println!("holder_exponent_estimate = {:.6}", rep.holder_exponent);
    println!("critical_exponent = {:.6}", rep.critical_exponent);
    println!("lipschitz_tolerance = {:.3e}", rep.lipschitz_tolerance);
    print!("probes =");
    for p in &rep.probe_estimates {
        print!(" {p:.3e}");
    }
    println!();
    Ok(())
}

fn cmd_report(ctx: &Ctx) -> Result<()> {
    let p = cmd_predict(ctx)?;
    let table = cmd_boxdim(ctx)?;
    // The comparison never prints without the fit window and stderr.
    println!(
        "comparison: predicted_slice_d = {:.6}, measured_slope = {:.6} +/- {:.6} (window {}:{})",
        p.d, table.fit.slope, table.fit.stderr, table.window.0, table.window.1
    );
    println!("predicted_total_dim = {:.6}", p.dim);
    Ok(())
}
