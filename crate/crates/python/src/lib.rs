//! Python bindings. Counts come back as `int`, volumes as
//! `fractions.Fraction`, structured objects as JSON strings.

use gtflow_core::combinatorics::{count_n as core_count_n, Partition};
use gtflow_core::corpus::Corpus;
use gtflow_core::dot::{dual_network_dot, network_dot};
use gtflow_core::gt;
use gtflow_core::subdivision::{canonical_reduction_tree, extension_identity};
use gtflow_core::transform::build_g_pal;
use gtflow_core::verify::{run_verify, Bounds, Scope};
use gtflow_core::{Error, FlowNetwork, Integer, MarkedEmbedding, Rational};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyIOError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn partition(parts: Vec<i64>) -> PyResult<Partition> {
    Partition::new(parts).map_err(err)
}

fn network(json: &str) -> PyResult<FlowNetwork> {
    serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn embedding(json: &str) -> PyResult<MarkedEmbedding> {
    serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Volume of GT(λ); `method` is "product", "tableaux" or "lidskii".
#[pyfunction]
#[pyo3(signature = (lam, method = "product"))]
fn gt_volume(lam: Vec<i64>, method: &str) -> PyResult<Rational> {
    let p = partition(lam)?;
    match method {
        "product" => Ok(gt::gt_volume_product(&p)),
        "tableaux" => gt::gt_volume_shsyt(&p).map_err(err),
        "lidskii" => gt::gt_volume_lidskii(&p).map_err(err),
        _ => Err(PyValueError::new_err(format!("unknown method {method}"))),
    }
}

/// Lattice points of GT(λ); `method` is "enumerate", "weyl", "lidskii" or "kostant".
#[pyfunction]
#[pyo3(signature = (lam, method = "enumerate"))]
fn gt_points(lam: Vec<i64>, method: &str) -> PyResult<Integer> {
    let p = partition(lam)?;
    match method {
        "enumerate" => Ok(Integer::from(gt::enumerate_gt_points(&p).len())),
        "weyl" => Ok(gt::weyl_dimension(&p)),
        "lidskii" => gt::gt_points_lidskii(&p).map_err(err),
        "kostant" => {
            let g = gt::build_g_lambda(&p).map_err(err)?;
            g.network.kostant(g.network.netflow()).map_err(err)
        }
        _ => Err(PyValueError::new_err(format!("unknown method {method}"))),
    }
}

/// JSON of the network G_λ.
#[pyfunction]
fn g_lambda(lam: Vec<i64>) -> PyResult<String> {
    let g = gt::build_g_lambda(&partition(lam)?).map_err(err)?;
    Ok(serde_json::to_string(&g.network).unwrap())
}

#[pyfunction]
#[pyo3(signature = (network_json, netflow = None))]
fn kostant(network_json: &str, netflow: Option<Vec<i64>>) -> PyResult<Integer> {
    let g = network(network_json)?;
    let b = netflow.unwrap_or_else(|| g.netflow().to_vec());
    g.kostant(&b).map_err(err)
}

/// `(volume, points)` from the Lidskii formulas.
#[pyfunction]
fn lidskii(network_json: &str) -> PyResult<(Rational, Integer)> {
    let g = network(network_json)?;
    Ok((g.lidskii_volume().map_err(err)?, g.lidskii_points_binomial().map_err(err)?))
}

#[pyfunction]
fn count_n(n: usize, b: Vec<i64>) -> PyResult<Integer> {
    core_count_n(n, &b).map_err(err)
}

/// JSON of the flow network of a marked embedding.
#[pyfunction]
fn poset2flow(embedding_json: &str) -> PyResult<String> {
    let me = embedding(embedding_json)?;
    let dn = build_g_pal(&me).map_err(err)?;
    Ok(serde_json::to_string(&dn.network).unwrap())
}

#[pyfunction]
fn marked_volume(embedding_json: &str) -> PyResult<Rational> {
    embedding(embedding_json)?.hat_poset().marked_volume().map_err(err)
}

#[pyfunction]
fn lattice_points(embedding_json: &str) -> PyResult<Vec<Vec<i64>>> {
    embedding(embedding_json)?.lattice_points().map_err(err)
}

/// `(leaves, leaf volume sum)` of the canonical reduction tree.
#[pyfunction]
fn reduction_tree(network_json: &str) -> PyResult<(usize, Rational)> {
    let t = canonical_reduction_tree(&network(network_json)?).map_err(err)?;
    Ok((t.leaves().len(), t.leaf_volume_sum().map_err(err)?))
}

/// Rows `(a, extensions, kostant, leaves)` for a single-sink embedding.
#[pyfunction]
#[pyo3(signature = (embedding_json, max_entry = 3))]
fn extension_counts(embedding_json: &str, max_entry: i64) -> PyResult<Vec<(Vec<i64>, Integer, Integer, usize)>> {
    extension_identity(&embedding(embedding_json)?, max_entry).map_err(err)
}

/// DOT text of a network or, for an embedding, of its flow network.
#[pyfunction]
fn to_dot(json: &str) -> PyResult<String> {
    if json.contains("\"faces\"") {
        let me = embedding(json)?;
        let dn = build_g_pal(&me).map_err(err)?;
        Ok(dual_network_dot(me.embedding(), &dn))
    } else {
        Ok(network_dot(&network(json)?, None))
    }
}

/// Builtin fixtures as `{name: json}` for networks and embeddings.
#[pyfunction]
fn fixtures() -> (Vec<(String, String)>, Vec<(String, String)>) {
    let c = Corpus::builtin();
    (
        c.networks.iter().map(|(n, g)| (n.clone(), serde_json::to_string(g).unwrap())).collect(),
        c.embeddings.iter().map(|(n, e)| (n.clone(), serde_json::to_string(e).unwrap())).collect(),
    )
}

/// `(passed, report_json)` on the builtin corpus.
#[pyfunction]
#[pyo3(signature = (scope = "all", bounds = ""))]
fn verify(scope: &str, bounds: &str) -> PyResult<(bool, String)> {
    let scope: Scope = scope.parse().map_err(err)?;
    let b = Bounds::parse(bounds).map_err(err)?;
    let rep = run_verify(scope, &b, &Corpus::builtin());
    Ok((rep.passed(), serde_json::to_string(&rep).unwrap()))
}

#[pymodule]
fn gtflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gt_volume, m)?)?;
    m.add_function(wrap_pyfunction!(gt_points, m)?)?;
    m.add_function(wrap_pyfunction!(g_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(kostant, m)?)?;
    m.add_function(wrap_pyfunction!(lidskii, m)?)?;
    m.add_function(wrap_pyfunction!(count_n, m)?)?;
    m.add_function(wrap_pyfunction!(poset2flow, m)?)?;
    m.add_function(wrap_pyfunction!(marked_volume, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_points, m)?)?;
    m.add_function(wrap_pyfunction!(reduction_tree, m)?)?;
    m.add_function(wrap_pyfunction!(extension_counts, m)?)?;
    m.add_function(wrap_pyfunction!(to_dot, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
