//! Python bindings: build groups from corpus documents or families, and
//! analyze them.

use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lie_index::algebra::{GroupAlgebra, UnitGroup, DEFAULT_ORACLE_CAP, DEFAULT_UNIT_CAP};
use lie_index::classify::{summarize, AnalysisReport, AnalyzeOptions};
use lie_index::group::DEFAULT_ELEMENT_CAP;
use lie_index::{Error, GroupSpec, GroupTable};

fn to_py(e: Error) -> PyErr {
    if e.is_resource_cap() {
        PyMemoryError::new_err(e.to_string())
    } else if matches!(e, Error::Consistency(_)) {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// A finite group held as a multiplication table.
#[pyclass(name = "Group", module = "lie_index_py", frozen)]
pub struct PyGroup {
    spec: GroupSpec,
    table: GroupTable,
}

impl PyGroup {
    fn from_spec(spec: GroupSpec, cap: usize) -> PyResult<Self> {
        let table = spec.build(cap).map_err(to_py)?;
        Ok(PyGroup { spec, table })
    }
}

#[pymethods]
impl PyGroup {
    /// Parse a JSON group document.
    #[staticmethod]
    #[pyo3(signature = (text, cap = DEFAULT_ELEMENT_CAP))]
    fn from_json(text: &str, cap: usize) -> PyResult<Self> {
        PyGroup::from_spec(lie_index::parse_spec(text).map_err(to_py)?, cap)
    }

    /// A named family member, e.g. `Group.family("dihedral", [16])`.
    #[staticmethod]
    #[pyo3(signature = (name, params, cap = DEFAULT_ELEMENT_CAP))]
    fn family(name: &str, params: Vec<u64>, cap: usize) -> PyResult<Self> {
        PyGroup::from_spec(lie_index::family(name, &params, cap).map_err(to_py)?, cap)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.spec.name
    }

    #[getter]
    fn order(&self) -> usize {
        self.table.order()
    }

    fn is_nilpotent(&self) -> bool {
        self.table.lower_central_series().is_nilpotent()
    }

    /// Nilpotency class, or `None` when the group is not nilpotent.
    fn nilpotency_class(&self) -> Option<usize> {
        self.table.lower_central_series().class()
    }

    fn derived_order(&self) -> usize {
        self.table.derived_subgroup().order()
    }

    fn to_json(&self) -> String {
        self.spec.to_json()
    }

    #[pyo3(signature = (p = None, oracle_cap = DEFAULT_ORACLE_CAP, require_oracle = false, units = false))]
    fn analyze(&self, p: Option<u64>, oracle_cap: usize, require_oracle: bool, units: bool) -> PyResult<PyReport> {
        let opts = AnalyzeOptions {
            p,
            oracle_cap,
            require_oracle,
            unit_cap: units.then_some(DEFAULT_UNIT_CAP),
            ..Default::default()
        };
        let mut report = lie_index::analyze(&self.spec.name, &self.table, &opts).map_err(to_py)?;
        for c in self.spec.pin_checks(&report) {
            report.push_check(c);
        }
        Ok(PyReport(report))
    }

    /// Upper and lower Lie nilpotency indices of `F_p[G]` from the ideal
    /// chains.
    fn lie_indices(&self, p: u64) -> PyResult<(usize, usize)> {
        let alg = GroupAlgebra::new(&self.table, p).map_err(to_py)?;
        let n = self.table.order();
        let upper = alg.upper_lie_chain(n).map_err(to_py)?;
        let lower = alg.lower_lie_chain(n).map_err(to_py)?;
        Ok((upper.index, lower.index))
    }

    /// Nilpotency class of the unit group of `F_2[G]`.
    #[pyo3(signature = (cap = DEFAULT_UNIT_CAP))]
    fn unit_class(&self, cap: u64) -> PyResult<usize> {
        UnitGroup::new(&self.table, cap).and_then(|u| u.class()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Group({:?}, order={})", self.spec.name, self.table.order())
    }
}

/// The outcome of one analysis.
#[pyclass(name = "Report", module = "lie_index_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyReport(AnalysisReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p
    }

    #[getter]
    fn cl(&self) -> Option<usize> {
        self.0.cl
    }

    #[getter]
    #[allow(non_snake_case)]
    fn tU_jennings(&self) -> Option<u64> {
        self.0.tU_jennings
    }

    #[getter]
    #[allow(non_snake_case)]
    fn tU_direct(&self) -> Option<u64> {
        self.0.tU_direct
    }

    #[getter]
    #[allow(non_snake_case)]
    fn tL_direct(&self) -> Option<u64> {
        self.0.tL_direct
    }

    #[getter]
    fn unit_class(&self) -> Option<u64> {
        self.0.unit_class
    }

    #[getter]
    fn d_sequence(&self) -> Option<Vec<(usize, u32)>> {
        self.0
            .d_sequence
            .as_ref()
            .map(|d| d.iter().map(|(&k, &v)| (k, v)).collect())
    }

    #[getter]
    fn matches(&self) -> Vec<String> {
        self.0.matches.iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn verdict(&self) -> String {
        self.0.verdict.to_string()
    }

    /// Names and details of the checks that failed.
    fn failed_checks(&self) -> Vec<(String, String)> {
        self.0
            .failed_checks()
            .map(|c| (c.name.clone(), c.detail.clone()))
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("reports serialize")
    }

    fn __repr__(&self) -> String {
        format!("Report({:?}, verdict={})", self.0.name, self.0.verdict)
    }
}

/// JSON summary of a list of reports, as printed by `verify --json`.
#[pyfunction]
fn summarize_reports(reports: Vec<PyReport>) -> String {
    let reports: Vec<AnalysisReport> = reports.into_iter().map(|r| r.0).collect();
    serde_json::to_string_pretty(&summarize(&reports)).expect("summaries serialize")
}

#[pymodule]
pub fn lie_index_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(summarize_reports, m)?)?;
    Ok(())
}
