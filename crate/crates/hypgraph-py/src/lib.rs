//! Python bindings: the main types and operations of the hypgraph crate.

use hypgraph::blender;
use hypgraph::geometry::{box_dimension_estimate, moran_cover, BoxCountOptions, PointSet};
use hypgraph::graph::{
    classify_regularity, default_anchor, holder_exponent_estimate, sample_unstable_slice,
    RegularityVerdict,
};
use hypgraph::multifractal::variational_with_ladder;
use hypgraph::pressure::{pressure_exact_locally_constant, solve_bowen, solve_pressure_root};
use hypgraph::symbolic::{Potential, ShiftSpace};
use hypgraph::systems::{build_system, geometric_potentials, parse_config, SkewSystem};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn system_from_toml(config_toml: &str) -> PyResult<SkewSystem> {
    let cfg = parse_config(config_toml).map_err(err)?;
    build_system(&cfg.system).map_err(err)
}

/// Dimension prediction for a system described by a TOML config string.
/// Returns (d_s, d, dim, lipschitz).
#[pyfunction]
fn predict(config_toml: &str) -> PyResult<(f64, f64, f64, bool)> {
    let sys = system_from_toml(config_toml)?;
    let p = hypgraph::cli::predict(&sys).map_err(err)?;
    Ok((p.d_s, p.d, p.dim, p.lipschitz))
}

/// Sample the invariant graph over the default unstable slice.
/// Returns (params, values).
#[pyfunction]
#[pyo3(signature = (config_toml, resolution_log2 = 12, depth = 48))]
fn sample_slice(
    config_toml: &str,
    resolution_log2: u32,
    depth: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let sys = system_from_toml(config_toml)?;
    let g = sample_unstable_slice(&sys, &default_anchor(&sys), resolution_log2, depth);
    let values = g.values().collect();
    Ok((g.params, values))
}

/// Box-count a planar point set over the dyadic ladder j_min..=j_max with
/// the default fit window. Returns (slope, stderr).
#[pyfunction]
fn box_dimension(points: Vec<(f64, f64)>, j_min: u32, j_max: u32) -> PyResult<(f64, f64)> {
    let pts = PointSet::D2(points.into_iter().map(|(x, y)| [x, y]).collect());
    let ladder: Vec<u32> = (j_min..=j_max).collect();
    let t = box_dimension_estimate(&pts, &ladder, BoxCountOptions::default()).map_err(err)?;
    Ok((t.fit.slope, t.fit.stderr))
}

/// Oscillation-regression Holder exponent of a sampled graph.
#[pyfunction]
fn holder_exponent(params: Vec<f64>, values: Vec<f64>, j_min: u32, j_max: u32) -> PyResult<f64> {
    if params.len() != values.len() {
        return Err(PyValueError::new_err("params and values must align"));
    }
    let points = params
        .iter()
        .zip(&values)
        .map(|(&s, &v)| hypgraph::graph::GraphPoint {
            base: hypgraph::graph::BasePoint::Circle { x1: s, x2: 0.0 },
            value: v,
            error_bound: 0.0,
        })
        .collect();
    let g = hypgraph::graph::SampledGraph { params, points };
    holder_exponent_estimate(&g, (j_min, j_max)).map_err(err)
}

/// Unique root d of P(phi_cu + (d-1) phi_u) = 0 on the full N-shift with
/// constant potentials.
#[pyfunction]
fn pressure_root(alphabet: usize, phi_cu: f64, phi_u: f64) -> PyResult<f64> {
    let shift = ShiftSpace::full(alphabet);
    let root = solve_pressure_root(
        &shift,
        &Potential::constant(alphabet, phi_cu),
        &Potential::constant(alphabet, phi_u),
    )
    .map_err(err)?;
    Ok(root.d)
}

/// Bowen root of P(d phi) = 0 for a constant potential on the full N-shift.
#[pyfunction]
fn bowen_root(alphabet: usize, phi: f64) -> PyResult<f64> {
    let shift = ShiftSpace::full(alphabet);
    Ok(solve_bowen(&shift, &Potential::constant(alphabet, phi))
        .map_err(err)?
        .d)
}

/// Pressure of a depth <= 1 potential given per-symbol values.
#[pyfunction]
fn pressure(values: Vec<f64>) -> PyResult<f64> {
    let psi = Potential::depth1(values);
    let shift = ShiftSpace::full(psi.alphabet());
    Ok(pressure_exact_locally_constant(&shift, &psi)
        .map_err(err)?
        .value)
}

/// Overlap interval of the two fiber branches: (lo, hi) or None.
#[pyfunction]
fn overlap_interval(lambda: f64, t: f64) -> PyResult<Option<(f64, f64)>> {
    if lambda <= 1.0 {
        return Err(PyValueError::new_err("lambda must exceed 1"));
    }
    Ok(blender::overlap_interval(lambda, t).interval)
}

/// The two elementary dimension bounds (D1, D2) of a gamma-Holder graph.
#[pyfunction]
fn dimension_bounds(gamma: f64, dim_base: f64) -> PyResult<(f64, f64)> {
    if !(0.0 < gamma && gamma <= 1.0) {
        return Err(PyValueError::new_err("gamma must lie in (0, 1]"));
    }
    let b = blender::bound_regime(gamma, dim_base);
    Ok((b.d1, b.d2))
}

/// Critical-regularity verdict: ("lipschitz" | "critical_holder",
/// delta_u_estimate, critical_exponent).
#[pyfunction]
#[pyo3(signature = (config_toml, seed = 1))]
fn regularity(config_toml: &str, seed: u64) -> PyResult<(String, f64, f64)> {
    let sys = system_from_toml(config_toml)?;
    let rep = classify_regularity(&sys, seed);
    let verdict = match rep.verdict {
        RegularityVerdict::Lipschitz => "lipschitz",
        RegularityVerdict::CriticalHolder => "critical_holder",
    };
    Ok((verdict.into(), rep.delta_u_estimate, rep.critical_exponent))
}

/// Variational dimension of the configured system's unstable slices:
/// (t_variational, t_pressure_root, gap).
#[pyfunction]
fn variational(config_toml: &str) -> PyResult<(f64, f64, f64)> {
    let sys = system_from_toml(config_toml)?;
    let shift = sys.base_shift();
    if shift.entropy_override().is_some() {
        return Err(PyValueError::new_err(
            "the counting pipeline needs an explicit symbolic base",
        ));
    }
    let pots = geometric_potentials(&sys);
    let (_, var) = variational_with_ladder(&shift, &pots.phi_u, &pots.phi_cu, &[10, 12], 1 << 20)
        .map_err(err)?;
    Ok((var.t_variational, var.t_pressure_root, var.gap))
}

/// Moran cover cell words at scale r for the configured system's base.
#[pyfunction]
fn moran_cells(config_toml: &str, r: f64) -> PyResult<Vec<String>> {
    let sys = system_from_toml(config_toml)?;
    let shift = sys.base_shift();
    if shift.entropy_override().is_some() {
        return Err(PyValueError::new_err(
            "Moran covers need an explicit symbolic base",
        ));
    }
    let pots = geometric_potentials(&sys);
    let cover = moran_cover(&shift, &pots.phi_u, r, 1 << 24).map_err(err)?;
    Ok(cover.cells.iter().map(|w| w.to_string()).collect())
}

#[pymodule]
fn hypgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(sample_slice, m)?)?;
    m.add_function(wrap_pyfunction!(box_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(holder_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(pressure_root, m)?)?;
    m.add_function(wrap_pyfunction!(bowen_root, m)?)?;
    m.add_function(wrap_pyfunction!(pressure, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_interval, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(regularity, m)?)?;
    m.add_function(wrap_pyfunction!(variational, m)?)?;
    m.add_function(wrap_pyfunction!(moran_cells, m)?)?;
    Ok(())
}
