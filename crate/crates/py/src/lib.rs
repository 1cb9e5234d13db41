//! Python module `fractal_dims`: ratio lists and their complex dimensions,
//! snowflake geometry, sampled functions with Mellin transforms, heat
//! content, and the command pipelines.

use fractal_dims::field::{sector_field, tube_function};
use fractal_dims::geometry::RegionPolygon;
use fractal_dims::heat::{heat_content, mc_heat_content, solve_heat_fdm, HeatProblem, TimeStepping};
use fractal_dims::mellin::MellinEvaluator;
use fractal_dims::sampled::{antiderivative, SampledFunction as CoreSampled};
use fractal_dims::vonkoch::{prefractal, self_avoidance_bound, snowflake, GkfParams as CoreGkf};
use fractal_dims::zeta::{detect_lattice, lower_similarity_dimension, similarity_dimension, DirichletPoly, RatioMultiset as CoreRatios, DEFAULT_MAX_DEN};
use fractal_dims::{Complex64, Point};
use fractal_dims_cli::commands::poles::find_poles;
use fractal_dims_cli::Command;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::str::FromStr;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn points(v: &[Point]) -> Vec<(f64, f64)> {
    v.iter().map(|p| (p.x, p.y)).collect()
}

/// Scaling ratios with multiplicities.
#[pyclass(frozen)]
#[derive(Clone)]
struct RatioMultiset {
    inner: CoreRatios,
}

#[pymethods]
impl RatioMultiset {
    #[new]
    fn new(entries: Vec<(f64, u32)>) -> PyResult<Self> {
        Ok(RatioMultiset { inner: CoreRatios::new(&entries).map_err(err)? })
    }

    /// `(ratio, multiplicity)` pairs, largest ratio first.
    fn entries(&self) -> Vec<(f64, u32)> {
        self.inner.entries().to_vec()
    }

    fn similarity_dimension(&self) -> PyResult<f64> {
        similarity_dimension(&self.inner).map_err(err)
    }

    fn lower_similarity_dimension(&self) -> PyResult<f64> {
        lower_similarity_dimension(&self.inner).map_err(err)
    }

    /// Generator of the lattice, or `None` for nonlattice ratios.
    #[pyo3(signature = (max_den = DEFAULT_MAX_DEN))]
    fn lattice_generator(&self, max_den: u64) -> Option<f64> {
        detect_lattice(&self.inner, max_den).map(|l| l.generator)
    }

    /// `P(s) = 1 - sum m r^s`.
    fn dirichlet(&self, s: Complex64) -> Complex64 {
        DirichletPoly::new(self.inner.clone()).eval(s)
    }

    /// Zeros of `P` with `|Im| <= im_max` as `(omega, residue of 1/P, multiplicity)`.
    #[pyo3(signature = (im_max, max_den = DEFAULT_MAX_DEN))]
    fn complex_dimensions(&self, im_max: f64, max_den: u64) -> PyResult<Vec<(Complex64, Complex64, u32)>> {
        let poly = DirichletPoly::new(self.inner.clone());
        let set = find_poles(&poly, im_max, max_den, None).map_err(err)?;
        Ok(set.poles().iter().map(|p| (p.omega, p.residue, p.multiplicity)).collect())
    }

    fn __repr__(&self) -> String {
        format!("RatioMultiset({:?})", self.inner.entries())
    }
}

/// An `(n, r)` von Koch system.
#[pyclass(frozen)]
#[derive(Clone)]
struct GkfParams {
    inner: CoreGkf,
}

#[pymethods]
impl GkfParams {
    #[new]
    fn new(n: u32, r: f64) -> PyResult<Self> {
        Ok(GkfParams { inner: CoreGkf::new(n, r).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }

    #[getter]
    fn ell(&self) -> f64 {
        self.inner.ell()
    }

    fn ratios(&self) -> PyResult<RatioMultiset> {
        Ok(RatioMultiset { inner: self.inner.ratios().map_err(err)? })
    }

    fn self_avoidance_bound(&self) -> f64 {
        self_avoidance_bound(self.inner.n)
    }

    /// Vertices of the level-`level` curve from `(0, 0)` to `(1, 0)`.
    fn prefractal(&self, level: u32) -> PyResult<Vec<(f64, f64)>> {
        Ok(points(prefractal(self.inner, level).map_err(err)?.vertices()))
    }

    /// Boundary vertices of the level-`level` snowflake.
    fn snowflake(&self, level: u32) -> PyResult<Vec<(f64, f64)>> {
        Ok(points(snowflake(self.inner, level).map_err(err)?.polygon.vertices()))
    }

    /// Tube function of one snowflake sector, from a distance field with
    /// cell size `h`.
    fn sector_tube(&self, level: u32, h: f64, ts: Vec<f64>) -> PyResult<SampledFunction> {
        let cap = ts.iter().copied().fold(0.0, f64::max);
        let field = sector_field(self.inner, level, h, cap).map_err(err)?;
        Ok(SampledFunction { inner: tube_function(&field, &ts).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("GkfParams(n={}, r={})", self.inner.n, self.inner.r)
    }
}

/// Samples of a function on increasing positive times.
#[pyclass(frozen)]
#[derive(Clone)]
struct SampledFunction {
    inner: CoreSampled,
}

#[pymethods]
impl SampledFunction {
    #[new]
    fn new(ts: Vec<f64>, vals: Vec<f64>) -> PyResult<Self> {
        Ok(SampledFunction { inner: CoreSampled::new(ts, vals).map_err(err)? })
    }

    #[getter]
    fn ts(&self) -> Vec<f64> {
        self.inner.ts().to_vec()
    }

    #[getter]
    fn vals(&self) -> Vec<f64> {
        self.inner.vals().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn interp(&self, t: f64) -> PyResult<f64> {
        self.inner.interp(t).map_err(err)
    }

    /// `k`-fold integral from 0.
    fn antiderivative(&self, k: u32) -> PyResult<SampledFunction> {
        Ok(SampledFunction { inner: antiderivative(&self.inner, k).map_err(err)? })
    }

    /// `int_a^b t^(s-1) f(t) dt` with its quadrature error estimate.
    fn mellin(&self, s: Complex64, a: f64, b: f64) -> PyResult<(Complex64, f64)> {
        let z = MellinEvaluator::new(self.inner.clone()).map_err(err)?.truncated(s, a, b).map_err(err)?;
        Ok((z.value, z.quad_error))
    }
}

fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<HeatProblem> {
    let region = RegionPolygon::new(vertices.into_iter().map(|(x, y)| Point::new(x, y)).collect()).map_err(err)?;
    HeatProblem::new(region).map_err(err)
}

/// Heat content of a polygon held at 1 on its boundary, by implicit finite
/// differences with cell size `h`, at the given times.
#[pyfunction]
fn heat_content_fdm(vertices: Vec<(f64, f64)>, h: f64, times: Vec<f64>) -> PyResult<SampledFunction> {
    let problem = polygon(vertices)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let field = solve_heat_fdm(&problem, h, TimeStepping::default(), t_end, &times, false).map_err(err)?;
    Ok(SampledFunction { inner: heat_content(&field).map_err(err)? })
}

/// Monte Carlo heat content `(value, standard error)`.
#[pyfunction]
#[pyo3(signature = (vertices, t, paths, seed = 0))]
fn heat_content_mc(vertices: Vec<(f64, f64)>, t: f64, paths: usize, seed: u64) -> PyResult<(f64, f64)> {
    let est = mc_heat_content(&polygon(vertices)?, t, paths, seed).map_err(err)?;
    Ok((est.value, est.sigma))
}

/// Run a command (`dims`, `poles`, `tube`, `heat`, `explicit`, `render`)
/// on a JSON config. Returns JSON with the canonical config, verdicts,
/// summary and output file names; nothing is written to disk.
#[pyfunction]
fn run_command(name: &str, config: &str) -> PyResult<String> {
    let cmd = Command::from_str(name).map_err(err)?;
    let value: serde_json::Value = serde_json::from_str(config).map_err(err)?;
    let (canon, out) = fractal_dims_cli::execute(cmd, value).map_err(err)?;
    let files: Vec<&str> = out.files.iter().map(|f| f.name.as_str()).collect();
    let doc = serde_json::json!({ "config": canon, "verdicts": out.verdicts, "summary": out.summary, "files": files });
    Ok(doc.to_string())
}

#[pymodule]
#[pyo3(name = "fractal_dims")]
fn fractal_dims_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RatioMultiset>()?;
    m.add_class::<GkfParams>()?;
    m.add_class::<SampledFunction>()?;
    m.add_function(wrap_pyfunction!(heat_content_fdm, m)?)?;
    m.add_function(wrap_pyfunction!(heat_content_mc, m)?)?;
    m.add_function(wrap_pyfunction!(run_command, m)?)?;
    Ok(())
}
