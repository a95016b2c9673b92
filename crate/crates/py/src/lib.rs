//! Python bindings: `Lattice`, `Diagram` and the pipeline entry points.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use semilat::io::{emit_dot, emit_lat, emit_lattice, parse as parse_text, Highlight};
use semilat::pipeline::{represent as represent_impl, PipelineOptions, SearchOptions};
use semilat::planar::theorem_rectang_check;
use semilat::{
    con_lattice, covering_squares, extend_all, eyes, glue as glue_impl, grid as grid_impl,
    insert_eye, insert_fork, is_all_principal, is_patch, is_rectangular, is_slim,
    principal_congruence, slim_down, Congruence, CoveringSquare, GlueSide, PlanarDiagram,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn blocks(theta: &Congruence) -> Vec<Vec<usize>> {
    theta.blocks()
}

type Square = (usize, usize, usize, usize);
type Blocks = Vec<Vec<usize>>;

fn square((o, l, r, t): Square) -> CoveringSquare {
    CoveringSquare { o, l, r, t }
}

/// A finite lattice given by its covering pairs.
#[pyclass(name = "Lattice", module = "semilat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLattice {
    inner: Arc<semilat::Lattice>,
}

impl PyLattice {
    fn check(&self, xs: &[usize]) -> PyResult<()> {
        match xs.iter().find(|&&x| x >= self.inner.len()) {
            Some(x) => Err(PyValueError::new_err(format!("element {x} out of range"))),
            None => Ok(()),
        }
    }
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(n: usize, covers: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = semilat::Lattice::from_covers(n, &covers).map_err(err)?;
        Ok(Self { inner: Arc::new(inner) })
    }

    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(semilat::Lattice::chain(n).map_err(err)?) })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Lattice({} elements, {} covers)", self.inner.len(), self.inner.num_covers())
    }

    fn covers(&self) -> Vec<(usize, usize)> {
        self.inner.covers()
    }

    fn leq(&self, a: usize, b: usize) -> PyResult<bool> {
        self.check(&[a, b])?;
        Ok(self.inner.leq(a, b))
    }

    fn join(&self, a: usize, b: usize) -> PyResult<usize> {
        self.check(&[a, b])?;
        Ok(self.inner.join(a, b))
    }

    fn meet(&self, a: usize, b: usize) -> PyResult<usize> {
        self.check(&[a, b])?;
        Ok(self.inner.meet(a, b))
    }

    fn is_semimodular(&self) -> bool {
        self.inner.is_semimodular()
    }

    fn is_distributive(&self) -> bool {
        self.inner.is_distributive()
    }

    /// Blocks of `con(a, b)`.
    fn con(&self, a: usize, b: usize) -> PyResult<Vec<Vec<usize>>> {
        self.check(&[a, b])?;
        Ok(blocks(&principal_congruence(&self.inner, a, b)))
    }

    /// All congruences as `(blocks, join_irreducible, principal)`.
    fn congruences(&self) -> Vec<(Vec<Vec<usize>>, bool, bool)> {
        let cl = con_lattice(&self.inner);
        let wit = cl.principal_witnesses(&self.inner);
        cl.congruences()
            .iter()
            .enumerate()
            .map(|(i, c)| (blocks(c), cl.is_join_irreducible(i), wit[i].is_some()))
            .collect()
    }

    fn is_all_principal(&self) -> bool {
        is_all_principal(&self.inner).all_principal
    }

    fn emit(&self) -> String {
        emit_lattice(&self.inner)
    }
}

/// A planar diagram: a lattice with left-to-right orders of covers.
#[pyclass(name = "Diagram", module = "semilat", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDiagram {
    inner: PlanarDiagram,
}

fn wrap(d: PlanarDiagram) -> PyDiagram {
    PyDiagram { inner: d }
}

#[pymethods]
impl PyDiagram {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Diagram({} elements)", self.inner.len())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    #[getter]
    fn lattice(&self) -> PyLattice {
        PyLattice { inner: self.inner.lattice().clone() }
    }

    fn up_order(&self, x: usize) -> PyResult<Vec<usize>> {
        self.lattice().check(&[x])?;
        Ok(self.inner.up_order(x).to_vec())
    }

    fn down_order(&self, x: usize) -> PyResult<Vec<usize>> {
        self.lattice().check(&[x])?;
        Ok(self.inner.down_order(x).to_vec())
    }

    /// `(lcorner, rcorner)`, or `None` if the diagram is not rectangular.
    fn corners(&self) -> Option<(usize, usize)> {
        is_rectangular(&self.inner)
    }

    fn is_rectangular(&self) -> bool {
        is_rectangular(&self.inner).is_some()
    }

    fn is_patch(&self) -> bool {
        is_patch(&self.inner)
    }

    fn is_slim(&self) -> bool {
        is_slim(&self.inner)
    }

    fn is_isomorphic(&self, other: &Self) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    fn eyes(&self) -> Vec<usize> {
        eyes(&self.inner)
    }

    /// Covering squares as `(o, l, r, t)`.
    fn covering_squares(&self) -> Vec<Square> {
        covering_squares(&self.inner).into_iter().map(|s| (s.o, s.l, s.r, s.t)).collect()
    }

    fn fork(&self, sq: Square) -> PyResult<Self> {
        Ok(wrap(insert_fork(&self.inner, square(sq)).map_err(err)?.diagram))
    }

    fn eye(&self, sq: Square) -> PyResult<Self> {
        Ok(wrap(insert_eye(&self.inner, square(sq)).map_err(err)?.0))
    }

    fn slim_down(&self) -> Self {
        wrap(slim_down(&self.inner))
    }

    fn mirror(&self) -> Self {
        wrap(self.inner.mirror())
    }

    /// Glues `other` at the lower-left (`"ll"`) or lower-right (`"lr"`) side.
    fn glue(&self, other: &Self, side: &str) -> PyResult<Self> {
        let side = match side {
            "ll" => GlueSide::LowerLeft,
            "lr" => GlueSide::LowerRight,
            _ => return Err(PyValueError::new_err("side must be \"ll\" or \"lr\"")),
        };
        Ok(wrap(glue_impl(&self.inner, &other.inner, side).map_err(err)?.diagram))
    }

    /// Items of the rectangular structure check as `(name, passed)`.
    fn verify(&self) -> PyResult<Vec<(String, bool)>> {
        let report = theorem_rectang_check(&self.inner).map_err(err)?;
        Ok(report.items().iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    fn emit(&self) -> String {
        emit_lat(&self.inner)
    }

    #[pyo3(signature = (congruence=None))]
    fn dot(&self, congruence: Option<(usize, usize)>) -> PyResult<String> {
        Ok(match congruence {
            None => emit_dot(&self.inner, Highlight::None),
            Some((a, b)) => {
                self.lattice().check(&[a, b])?;
                let theta = principal_congruence(self.inner.lattice(), a, b);
                emit_dot(&self.inner, Highlight::Congruence(&theta))
            }
        })
    }

    /// Runs the extension pipeline.
    #[pyo3(signature = (expand_all=false))]
    fn extend(&self, expand_all: bool) -> PyResult<Extension> {
        let trace = extend_all(&self.inner, PipelineOptions { expand_all }).map_err(err)?;
        let r = trace.report;
        Ok(Extension {
            output: wrap(trace.output().clone()),
            stages: trace.stages.iter().map(|s| (s.name.clone(), wrap(s.diagram.clone()))).collect(),
            embedding: trace.embedding().map().to_vec(),
            witnesses: trace
                .witnesses
                .iter()
                .map(|w| (blocks(&w.congruence), w.interval.map(|iv| (iv.lo, iv.hi))))
                .collect(),
            rectangular: r.rectangular,
            cover_preserving: r.cover_preserving,
            congruence_preserving: r.congruence_preserving,
            all_principal: r.all_principal,
        })
    }
}

/// Result of [`PyDiagram::extend`].
#[pyclass(module = "semilat", frozen, get_all)]
struct Extension {
    output: PyDiagram,
    stages: Vec<(String, PyDiagram)>,
    /// Image of each input element in the output.
    embedding: Vec<usize>,
    /// Each congruence of the input with the prime interval generating its extension.
    witnesses: Vec<(Blocks, Option<(usize, usize)>)>,
    rectangular: bool,
    cover_preserving: bool,
    congruence_preserving: bool,
    all_principal: bool,
}

#[pymethods]
impl Extension {
    fn passed(&self) -> bool {
        self.rectangular && self.cover_preserving && self.congruence_preserving && self.all_principal
    }
}

#[pyfunction]
fn grid(m: usize, n: usize) -> PyResult<PyDiagram> {
    Ok(wrap(grid_impl(m, n).map_err(err)?))
}

/// Parses the text format. Returns a `Diagram` when the text has orders,
/// otherwise a `Lattice`.
#[pyfunction]
fn parse(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let f = parse_text(text).map_err(err)?;
    Ok(match f.diagram {
        Some(d) => Py::new(py, wrap(d))?.into_any(),
        None => Py::new(py, PyLattice { inner: f.lattice })?.into_any(),
    })
}

/// Searches for an all-principal lattice whose congruence lattice is
/// isomorphic to the distributive `target`. Returns `(K1, K, table)` where
/// `table[x]` is the congruence of `K` for element `x` of the target.
#[pyfunction]
#[pyo3(signature = (target, budget=8))]
fn represent(target: &PyLattice, budget: usize) -> PyResult<(PyDiagram, PyDiagram, Vec<Blocks>)> {
    let rep = represent_impl(&target.inner, SearchOptions { budget, ..SearchOptions::default() })
        .map_err(err)?;
    let table = rep.table.iter().map(blocks).collect();
    Ok((wrap(rep.k1), wrap(rep.trace.output().clone()), table))
}

#[pymodule]
#[pyo3(name = "semilat")]
fn semilat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyDiagram>()?;
    m.add_class::<Extension>()?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(represent, m)?)?;
    Ok(())
}
