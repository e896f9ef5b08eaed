//! Python bindings for the hyperlab core: the (n, k, j) models, the
//! incremental j-connectivity tracker, the closed-form statistics, and the
//! experiment drivers, exposed as a `hyperlab_py` extension module.
//!
//! Vertex sets cross the boundary as plain lists of 0-based ints; j-sets and
//! edges as colex ranks. Seeds behave exactly as in the CLI.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hyperlab::combinatorics::{self, SetRank, VertexSet};
use hyperlab::connectivity;
use hyperlab::experiments;
use hyperlab::model;
use hyperlab::statistics;
use hyperlab::Error;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::MemoryCap { .. } | Error::EnumerationBudget(_) | Error::Io(_) => {
            PyRuntimeError::new_err(err.to_string())
        }
        Error::Internal(msg) => PyRuntimeError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn vertex_set(members: Vec<u32>) -> PyResult<VertexSet> {
    VertexSet::from_unsorted(members).map_err(to_py_err)
}

/// The (n, k, j) triple: n vertices, k-uniform edges, connectivity order j.
#[pyclass(name = "Params", from_py_object)]
#[derive(Clone, Copy)]
struct PyParams {
    inner: model::Params,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(n: u32, k: u32, j: u32) -> PyResult<Self> {
        Ok(Self { inner: model::Params::new(n, k, j).map_err(to_py_err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k()
    }

    #[getter]
    fn j(&self) -> u32 {
        self.inner.j()
    }

    /// C(n, k), the number of possible edges.
    fn edge_universe(&self) -> PyResult<u64> {
        self.inner.edge_universe().map_err(to_py_err)
    }

    /// C(n, j), the number of j-sets.
    fn jset_universe(&self) -> PyResult<u64> {
        self.inner.jset_universe().map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(n={}, k={}, j={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.j()
        )
    }
}

/// A k-uniform hypergraph held as a duplicate-free set of edge ranks.
#[pyclass(name = "Hypergraph")]
struct PyHypergraph {
    inner: model::Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(params: PyParams, edge_ranks: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: model::Hypergraph::new(params.inner, edge_ranks).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn params(&self) -> PyParams {
        PyParams { inner: self.inner.params() }
    }

    fn edge_count(&self) -> u64 {
        self.inner.edge_count()
    }

    /// Edge ranks in ascending order.
    fn edge_ranks(&self) -> Vec<u64> {
        self.inner.edges().to_vec()
    }

    /// Edges as sorted vertex lists, in ascending rank order.
    fn edges(&self) -> PyResult<Vec<Vec<u32>>> {
        (0..self.inner.edge_count() as usize)
            .map(|i| {
                self.inner
                    .edge_vertices(i)
                    .map(|vs| vs.members().to_vec())
                    .map_err(to_py_err)
            })
            .collect()
    }

    /// Number of distinct j-sets contained in edges.
    fn j_size(&self) -> PyResult<u64> {
        connectivity::j_size(&self.inner).map_err(to_py_err)
    }

    /// Line-oriented text form (`n k j m` header, one edge per line).
    fn to_text(&self) -> PyResult<String> {
        self.inner.to_text().map_err(to_py_err)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: model::Hypergraph::from_text(text).map_err(to_py_err)? })
    }

    /// Component partition from the walk-definition oracle, as blocks of
    /// j-set ranks.
    fn bfs_j_components(&self) -> PyResult<Vec<Vec<u64>>> {
        let partition = connectivity::bfs_j_components(&self.inner).map_err(to_py_err)?;
        Ok(partition.blocks().to_vec())
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!(
            "Hypergraph(n={}, k={}, j={}, m={})",
            p.n(),
            p.k(),
            p.j(),
            self.inner.edge_count()
        )
    }
}

/// Streaming j-connectivity state over all C(n,j) j-sets.
#[pyclass(name = "ComponentTracker")]
struct PyComponentTracker {
    inner: connectivity::ComponentTracker,
}

#[pymethods]
impl PyComponentTracker {
    #[new]
    fn new(params: PyParams) -> PyResult<Self> {
        Ok(Self {
            inner: connectivity::ComponentTracker::new(params.inner).map_err(to_py_err)?,
        })
    }

    /// Insert one edge given as a list of vertex labels.
    fn insert_edge(&mut self, members: Vec<u32>) -> PyResult<()> {
        self.inner.insert_edge(&vertex_set(members)?).map_err(to_py_err)
    }

    fn is_j_connected(&self) -> bool {
        self.inner.is_j_connected()
    }

    fn isolated_count(&self) -> u64 {
        self.inner.isolated_count()
    }

    fn covered_count(&self) -> u64 {
        self.inner.covered_count()
    }

    fn component_count(&self) -> u64 {
        self.inner.component_count()
    }

    fn largest_component_size(&self) -> u64 {
        self.inner.largest_component_size()
    }

    fn edges_inserted(&self) -> u64 {
        self.inner.edges_inserted()
    }

    /// {degree s: D_s} over all C(n,j) j-sets.
    fn degree_histogram(&self) -> std::collections::BTreeMap<u64, u64> {
        self.inner.degree_histogram()
    }

    /// Component partition as blocks of j-set ranks.
    fn partition(&mut self) -> Vec<Vec<u64>> {
        self.inner.component_partition().blocks().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "ComponentTracker(covered={}, components={}, isolated={}, edges={})",
            self.inner.covered_count(),
            self.inner.component_count(),
            self.inner.isolated_count(),
            self.inner.edges_inserted()
        )
    }
}

/// The edge-arrival process: yields distinct edge ranks until all C(n,k)
/// edges are out.
#[pyclass(name = "EdgeStream")]
struct PyEdgeStream {
    inner: model::EdgeStream,
}

#[pymethods]
impl PyEdgeStream {
    #[new]
    fn new(params: PyParams, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: model::EdgeStream::new(params.inner, seed).map_err(to_py_err)? })
    }

    fn emitted(&self) -> u64 {
        self.inner.emitted()
    }

    fn next_edge(&mut self) -> Option<u64> {
        self.inner.next_edge()
    }

    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> Option<u64> {
        self.inner.next_edge()
    }
}

/// C(n, r) with explicit overflow failure.
#[pyfunction]
fn binom(n: u64, r: u64) -> PyResult<u64> {
    combinatorics::binom(n, r).map_err(to_py_err)
}

/// Colex rank of a vertex set within universe {0, …, n-1}.
#[pyfunction]
fn rank_set(members: Vec<u32>, n: u32) -> PyResult<u64> {
    let s = vertex_set(members)?;
    Ok(combinatorics::rank_set(&s, n).map_err(to_py_err)?.rank)
}

/// Inverse of rank_set.
#[pyfunction]
fn unrank_set(rank: u64, r: u32, n: u32) -> PyResult<Vec<u32>> {
    let s = combinatorics::unrank_set(SetRank { rank, r, n }).map_err(to_py_err)?;
    Ok(s.members().to_vec())
}

/// All r-subsets of a vertex set, in colex order.
#[pyfunction]
fn sub_sets(members: Vec<u32>, r: u32) -> PyResult<Vec<Vec<u32>>> {
    let s = vertex_set(members)?;
    Ok(combinatorics::sub_sets(&s, r)
        .map_err(to_py_err)?
        .into_iter()
        .map(|v| v.members().to_vec())
        .collect())
}

/// H^k(n,p): every k-set is an edge independently with probability p.
#[pyfunction]
fn sample_binomial(params: PyParams, p: f64, seed: u64) -> PyResult<PyHypergraph> {
    let p = model::Probability::new(p).map_err(to_py_err)?;
    Ok(PyHypergraph {
        inner: model::sample_binomial(params.inner, p, seed).map_err(to_py_err)?,
    })
}

/// H^k(n,M): exactly m edges, uniform over all m-subsets.
#[pyfunction]
fn sample_uniform(params: PyParams, m: u64, seed: u64) -> PyResult<PyHypergraph> {
    Ok(PyHypergraph {
        inner: model::sample_uniform(params.inner, m, seed).map_err(to_py_err)?,
    })
}

/// p = (j ln n + s ln ln n + c) / C(n, k-j).
#[pyfunction]
fn p_from_c(params: PyParams, s: u32, c: f64) -> PyResult<f64> {
    let cp = statistics::CnParameterization::new(s, c).map_err(to_py_err)?;
    Ok(statistics::p_from_c(&params.inner, cp).map_err(to_py_err)?.value())
}

/// The sharp threshold p_0 = j ln n / C(n, k-j).
#[pyfunction]
fn p_threshold(params: PyParams) -> PyResult<f64> {
    Ok(statistics::p_threshold(&params.inner).map_err(to_py_err)?.value())
}

/// Exact E(D_s) under H^k(n,p).
#[pyfunction]
fn exact_expected_ds(params: PyParams, p: f64, s: u64) -> PyResult<f64> {
    let p = model::Probability::new(p).map_err(to_py_err)?;
    statistics::exact_expected_ds(&params.inner, p, s).map_err(to_py_err)
}

/// Limiting intensity j^s e^{-c} / (j! s!).
#[pyfunction]
fn limiting_lambda(j: u32, s: u32, c: f64) -> f64 {
    statistics::limiting_lambda(j, s, c)
}

/// Po(lam) point mass at i.
#[pyfunction]
fn poisson_pmf(lam: f64, i: u64) -> f64 {
    statistics::poisson_pmf(lam, i)
}

/// Total variation distance between the empirical law of the samples and
/// Po(lam) truncated at the largest observed value.
#[pyfunction]
fn tv_to_poisson(samples: Vec<u64>, lam: f64) -> PyResult<f64> {
    let empirical = statistics::empirical_pmf(&samples).map_err(to_py_err)?;
    let max = samples.iter().max().copied().unwrap_or(0);
    let poisson = statistics::Pmf::poisson_truncated(lam, max);
    statistics::tv_distance(&empirical, &poisson).map_err(to_py_err)
}

/// One process trial; returns (tau_i, tau_c).
#[pyfunction]
fn run_hitting_trial(params: PyParams, seed: u64) -> PyResult<(u64, u64)> {
    let rec = experiments::run_hitting_trial(params.inner, seed).map_err(to_py_err)?;
    Ok((rec.tau_i, rec.tau_c))
}

/// Estimate Pr(tau_i = tau_c) over independent trials with a Wilson 95% CI.
#[pyfunction]
fn estimate_coincidence<'py>(
    py: Python<'py>,
    params: PyParams,
    trials: u64,
    base_seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let est =
        experiments::estimate_coincidence(params.inner, trials, base_seed).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("trials", est.trials)?;
    out.set_item("coincidences", est.coincidences)?;
    out.set_item("point", est.point)?;
    out.set_item("ci_low", est.ci_low)?;
    out.set_item("ci_high", est.ci_high)?;
    Ok(out)
}

/// Threshold sweep; model is "binomial" or "uniform".
#[pyfunction]
fn threshold_sweep<'py>(
    py: Python<'py>,
    params: PyParams,
    c_values: Vec<f64>,
    trials: u64,
    base_seed: u64,
    model: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let model: experiments::Model = model.parse().map_err(to_py_err)?;
    let rows = experiments::threshold_sweep(params.inner, &c_values, trials, base_seed, model)
        .map_err(to_py_err)?;
    rows.into_iter()
        .map(|r| {
            let row = PyDict::new(py);
            row.set_item("c", r.c)?;
            row.set_item("trials", r.trials)?;
            row.set_item("frac_no_isolated", r.frac_no_isolated)?;
            row.set_item("frac_connected", r.frac_connected)?;
            Ok(row)
        })
        .collect()
}

/// Paired binomial/uniform fractions at matched density M = round(p N).
#[pyfunction]
fn model_transfer_check<'py>(
    py: Python<'py>,
    params: PyParams,
    c: f64,
    trials: u64,
    base_seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = experiments::model_transfer_check(params.inner, c, trials, base_seed)
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("c", rep.c)?;
    out.set_item("p", rep.p)?;
    out.set_item("m", rep.m)?;
    out.set_item("binomial_no_isolated", rep.binomial_no_isolated)?;
    out.set_item("binomial_connected", rep.binomial_connected)?;
    out.set_item("uniform_no_isolated", rep.uniform_no_isolated)?;
    out.set_item("uniform_connected", rep.uniform_connected)?;
    out.set_item("diff_no_isolated", rep.diff_no_isolated)?;
    out.set_item("diff_connected", rep.diff_connected)?;
    Ok(out)
}

/// Count well-constructed hypergraphs up to isomorphism; returns
/// (jsize, count, bound) triples for jsize up to max_jsize.
#[pyfunction]
fn enumerate_well_constructed(k: u32, j: u32, max_jsize: u64) -> PyResult<Vec<(u64, u64, u128)>> {
    let rows = experiments::enumerate_well_constructed(k, j, max_jsize).map_err(to_py_err)?;
    Ok(rows.into_iter().map(|r| (r.jsize, r.count, r.bound)).collect())
}

/// Largest-component diagnostics at p* = (1+eps)/((C(k,j)-1) C(n,k-j)).
#[pyfunction]
fn supercritical_component<'py>(
    py: Python<'py>,
    params: PyParams,
    epsilon: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = experiments::supercritical_component(params.inner, epsilon, seed)
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("epsilon", rep.epsilon)?;
    out.set_item("p_star", rep.p_star)?;
    out.set_item("largest_jsize", rep.largest_jsize)?;
    out.set_item("coverage_min", rep.coverage_min)?;
    out.set_item("coverage_max", rep.coverage_max)?;
    out.set_item("coverage_mean", rep.coverage_mean)?;
    Ok(out)
}

#[pymodule]
fn hyperlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("RNG_IDENTITY", model::RNG_IDENTITY)?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyComponentTracker>()?;
    m.add_class::<PyEdgeStream>()?;
    m.add_function(wrap_pyfunction!(binom, m)?)?;
    m.add_function(wrap_pyfunction!(rank_set, m)?)?;
    m.add_function(wrap_pyfunction!(unrank_set, m)?)?;
    m.add_function(wrap_pyfunction!(sub_sets, m)?)?;
    m.add_function(wrap_pyfunction!(sample_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(sample_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(p_from_c, m)?)?;
    m.add_function(wrap_pyfunction!(p_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(exact_expected_ds, m)?)?;
    m.add_function(wrap_pyfunction!(limiting_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(tv_to_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(run_hitting_trial, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_coincidence, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(model_transfer_check, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_well_constructed, m)?)?;
    m.add_function(wrap_pyfunction!(supercritical_component, m)?)?;
    Ok(())
}
