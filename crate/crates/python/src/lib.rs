use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use dpoc::chemistry;
use dpoc::compose::{self, RuleSet};
use dpoc::{io, rewrite, ComponentMultiset};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Undirected labelled graph with explicit hydrogens.
#[pyclass(name = "MolGraph", module = "dpoc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMolGraph(dpoc::MolGraph);

#[pymethods]
impl PyMolGraph {
    #[new]
    #[pyo3(signature = (labels, edges = Vec::new()))]
    fn new(labels: Vec<String>, edges: Vec<(usize, usize, String)>) -> PyResult<Self> {
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let edges: Vec<(usize, usize, &str)> = edges.iter().map(|(a, b, l)| (*a, *b, l.as_str())).collect();
        dpoc::MolGraph::from_parts(&labels, &edges).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn from_gml(text: &str) -> PyResult<Self> {
        io::parse_graph(text).map(Self).map_err(value_error)
    }

    fn to_gml(&self) -> String {
        io::serialize_graph(&self.0)
    }

    fn to_dot(&self) -> String {
        io::graph_to_dot(&self.0)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn formula(&self) -> String {
        self.0.formula()
    }

    fn canonical_hash(&self) -> String {
        self.0.canonical_code().hash_hex()
    }

    fn is_isomorphic(&self, other: PyRef<'_, PyMolGraph>) -> bool {
        self.0.is_isomorphic(&other.0)
    }

    fn components(&self) -> Vec<PyMolGraph> {
        self.0.connected_components().components().iter().cloned().map(Self).collect()
    }

    fn __repr__(&self) -> String {
        format!("MolGraph({}, {} vertices, {} edges)", self.0.formula(), self.0.vertex_count(), self.0.edge_count())
    }
}

/// Double-pushout rule.
#[pyclass(name = "Rule", module = "dpoc", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRule(dpoc::Rule);

#[pymethods]
impl PyRule {
    #[staticmethod]
    fn from_gml(text: &str) -> PyResult<Self> {
        io::parse_rule(text).map(Self).map_err(value_error)
    }

    fn to_gml(&self) -> String {
        io::serialize_rule(&self.0)
    }

    fn to_dot(&self) -> String {
        io::rule_to_dot(&self.0)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn canonical_hash(&self) -> String {
        self.0.canonical_code().hash_hex()
    }

    fn inverse(&self, name: &str) -> Self {
        Self(self.0.inverse(name))
    }

    fn left(&self) -> PyMolGraph {
        PyMolGraph(self.0.left_graph().graph)
    }

    fn right(&self) -> PyMolGraph {
        PyMolGraph(self.0.right_graph().graph)
    }

    fn __repr__(&self) -> String {
        format!(
            "Rule({:?}, {} left components, {} right components)",
            self.0.name(),
            self.0.left_component_count(),
            self.0.right_component_count()
        )
    }
}

fn rules(set: RuleSet) -> Vec<PyRule> {
    set.into_values().map(PyRule).collect()
}

fn multiset(graphs: &[PyRef<'_, PyMolGraph>]) -> ComponentMultiset {
    graphs.iter().flat_map(|g| g.0.connected_components().components().to_vec()).collect()
}

/// Products of every gluing-valid application of `rule` to the graphs.
#[pyfunction]
#[pyo3(signature = (rule, graphs, proper_only = false))]
fn apply(rule: PyRef<'_, PyRule>, graphs: Vec<PyRef<'_, PyMolGraph>>, proper_only: bool) -> Vec<Vec<PyMolGraph>> {
    let hosts = multiset(&graphs);
    rewrite::derivations(&rule.0, &hosts)
        .into_iter()
        .filter(|d| !proper_only || rewrite::is_proper(d))
        .map(|d| d.outputs.components().iter().cloned().map(PyMolGraph).collect())
        .collect()
}

/// Every composite of `p2` after `p1`, deduplicated up to isomorphism.
#[pyfunction]
fn compose_all(p1: PyRef<'_, PyRule>, p2: PyRef<'_, PyRule>) -> Vec<PyRule> {
    rules(compose::compose_all(&p1.0, &p2.0))
}

/// Folds a chain written outermost first.
#[pyfunction]
fn compose_sequence(chain: Vec<PyRef<'_, PyRule>>) -> Vec<PyRule> {
    let chain: Vec<dpoc::Rule> = chain.iter().map(|r| r.0.clone()).collect();
    rules(compose::compose_sequence(&chain))
}

#[pyfunction]
fn bind(graph: PyRef<'_, PyMolGraph>, rule: PyRef<'_, PyRule>) -> Vec<PyRule> {
    rules(compose::bind(&graph.0, &rule.0))
}

#[pyfunction]
fn binding_rule(graph: PyRef<'_, PyMolGraph>) -> PyRule {
    PyRule(compose::binding_rule(&graph.0))
}

/// Number of distinct composites reachable from the bound graphs.
#[pyfunction]
fn universe_count(rules: Vec<PyRef<'_, PyRule>>, graphs: Vec<PyRef<'_, PyMolGraph>>, max_len: usize) -> usize {
    let rs = chemistry::Ruleset {
        rules: rules.iter().map(|r| r.0.clone()).collect(),
        graphs: Vec::new(),
        chemical: true,
    };
    let seeds: Vec<dpoc::MolGraph> = graphs.iter().map(|g| g.0.clone()).collect();
    chemistry::composition_universe(&rs, &seeds, max_len).count()
}

/// The Formose grammar: rules p0..p3 and graphs g0, g1.
#[pyfunction]
fn formose() -> (Vec<PyRule>, Vec<(String, PyMolGraph)>) {
    let rs = chemistry::formose_ruleset();
    (
        rs.rules.into_iter().map(PyRule).collect(),
        rs.graphs.into_iter().map(|(n, g)| (n, PyMolGraph(g))).collect(),
    )
}

#[pymodule]
#[pyo3(name = "dpoc")]
fn dpoc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMolGraph>()?;
    m.add_class::<PyRule>()?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(compose_all, m)?)?;
    m.add_function(wrap_pyfunction!(compose_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(bind, m)?)?;
    m.add_function(wrap_pyfunction!(binding_rule, m)?)?;
    m.add_function(wrap_pyfunction!(universe_count, m)?)?;
    m.add_function(wrap_pyfunction!(formose, m)?)?;
    Ok(())
}
