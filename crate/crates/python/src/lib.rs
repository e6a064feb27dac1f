//! Python bindings. Every tool error surfaces as `ValueError`.

use std::collections::HashMap;
use std::fmt::Display;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyList};
use pyo3::IntoPyObjectExt;
use sciforge::hpc_jobs::{ClusterProfile, JobSpec, Scheduler};
use sciforge::param_tree::ParamValue;
use sciforge::spectral::{Complex64, FftPlan, RealField, SpectralField, TransformKind};

fn value_error(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn param_to_py<'py>(py: Python<'py>, value: &ParamValue) -> PyResult<Bound<'py, PyAny>> {
    match value {
        ParamValue::Bool(b) => b.into_bound_py_any(py),
        ParamValue::Int(i) => i.into_bound_py_any(py),
        ParamValue::Real(x) => x.into_bound_py_any(py),
        ParamValue::Text(s) => s.into_bound_py_any(py),
        ParamValue::None => Ok(py.None().into_bound(py)),
        ParamValue::List(items) => {
            let items = items.iter().map(|v| param_to_py(py, v)).collect::<PyResult<Vec<_>>>()?;
            Ok(PyList::new(py, items)?.into_any())
        }
    }
}

fn plan(shape: &[usize], kind: TransformKind, threads: usize) -> PyResult<FftPlan> {
    FftPlan::with_threads(shape, kind, threads).map_err(value_error)
}

/// Merges `overrides` into `defaults` (both XML text) and returns canonical XML.
pub fn merge_params_text(defaults: &str, overrides: &str) -> Result<String, String> {
    let parse = |text: &str| sciforge::param_tree::parse_xml_text(text).map_err(|e| e.to_string());
    let merged = sciforge::param_tree::apply_overrides(&parse(defaults)?, &parse(overrides)?).map_err(|e| e.to_string())?;
    Ok(sciforge::param_tree::to_xml_text(&merged))
}

#[pymodule]
mod sciforge_py {
    use super::*;

    #[pymodule_export]
    const VERSION: &str = sciforge::VERSION;

    /// Software and hardware report of this host, as JSON.
    #[pyfunction]
    fn sysinfo_json() -> String {
        sciforge::sysinfo::gather_sysinfo(&sciforge::sysinfo::HostProbe).to_json()
    }

    /// Converts a literal the way XML attribute values are read.
    #[pyfunction]
    fn infer_value<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
        let value = sciforge::param_tree::infer_value(text).map_err(value_error)?;
        param_to_py(py, &value)
    }

    /// Parses a parameter tree and returns its canonical XML text.
    #[pyfunction]
    fn canonical_params(xml: &str) -> PyResult<String> {
        let root = sciforge::param_tree::parse_xml_text(xml).map_err(value_error)?;
        Ok(sciforge::param_tree::to_xml_text(&root))
    }

    #[pyfunction]
    fn merge_params(defaults: &str, overrides: &str) -> PyResult<String> {
        merge_params_text(defaults, overrides).map_err(PyValueError::new_err)
    }

    /// NetCDF classic bytes of a parameter tree given as XML.
    #[pyfunction]
    fn params_to_netcdf<'py>(py: Python<'py>, xml: &str) -> PyResult<Bound<'py, PyBytes>> {
        let root = sciforge::param_tree::parse_xml_text(xml).map_err(value_error)?;
        let bytes = sciforge::ncdump::write_netcdf(&root).map_err(value_error)?;
        Ok(PyBytes::new(py, &bytes))
    }

    #[pyfunction]
    #[pyo3(signature = (data, title = "<bytes>", show_data = false))]
    fn dump_netcdf(data: &[u8], title: &str, show_data: bool) -> PyResult<String> {
        let file = sciforge::ncdump::parse_netcdf(data).map_err(value_error)?;
        Ok(sciforge::ncdump::print_tree(&file, title, show_data.then_some(data)))
    }

    #[pyfunction]
    fn groups_along_axis(names: Vec<String>, axis: usize) -> PyResult<Vec<Vec<String>>> {
        let serie = sciforge::file_series::build_serie(&names).map_err(value_error)?;
        sciforge::file_series::groups_along_axis(&serie, axis).map_err(value_error)
    }

    #[pyfunction]
    #[pyo3(signature = (names, axis, step = 1))]
    fn make_pairs(names: Vec<String>, axis: usize, step: i64) -> PyResult<Vec<(String, String)>> {
        let serie = sciforge::file_series::build_serie(&names).map_err(value_error)?;
        sciforge::file_series::make_pairs(&serie, axis, step).map_err(value_error)
    }

    /// (rank, nb_proc) from launcher variables in `env`.
    #[pyfunction]
    fn detect_context(env: HashMap<String, String>) -> PyResult<(usize, usize)> {
        let ctx = sciforge::exec_context::detect_context(&env).map_err(value_error)?;
        Ok((ctx.rank(), ctx.nb_proc()))
    }

    /// Forward DFT of a row-major complex array.
    #[pyfunction]
    #[pyo3(signature = (shape, data, threads = 1))]
    fn fft(shape: Vec<usize>, data: Vec<Complex64>, threads: usize) -> PyResult<Vec<Complex64>> {
        let field = SpectralField::new(shape.clone(), data).map_err(value_error)?;
        let p = plan(&shape, TransformKind::ComplexToComplex, threads)?;
        Ok(sciforge::spectral::fft(&p, &field).map_err(value_error)?.into_data())
    }

    #[pyfunction]
    #[pyo3(signature = (shape, spectrum, threads = 1))]
    fn ifft(shape: Vec<usize>, spectrum: Vec<Complex64>, threads: usize) -> PyResult<Vec<Complex64>> {
        let field = SpectralField::new(shape.clone(), spectrum).map_err(value_error)?;
        let p = plan(&shape, TransformKind::ComplexToComplex, threads)?;
        Ok(sciforge::spectral::ifft(&p, &field).map_err(value_error)?.into_data())
    }

    /// Non-negative half of the spectrum along the last axis.
    #[pyfunction]
    #[pyo3(signature = (shape, data, threads = 1))]
    fn rfft(shape: Vec<usize>, data: Vec<f64>, threads: usize) -> PyResult<Vec<Complex64>> {
        let field = RealField::new(shape.clone(), data).map_err(value_error)?;
        let p = plan(&shape, TransformKind::RealToComplex, threads)?;
        Ok(sciforge::spectral::rfft(&p, &field).map_err(value_error)?.into_data())
    }

    /// `shape` is the real field's shape, not the half spectrum's.
    #[pyfunction]
    #[pyo3(signature = (shape, spectrum, threads = 1))]
    fn irfft(shape: Vec<usize>, spectrum: Vec<Complex64>, threads: usize) -> PyResult<Vec<f64>> {
        let p = plan(&shape, TransformKind::RealToComplex, threads)?;
        let field = SpectralField::new(p.spectrum_shape(), spectrum).map_err(value_error)?;
        Ok(sciforge::spectral::irfft(&p, &field).map_err(value_error)?.into_data())
    }

    /// Notebook JSON text with outputs and execution counts removed.
    #[pyfunction]
    fn strip_notebook(text: &str) -> PyResult<String> {
        let doc = sciforge::nbstrip::NotebookDoc::parse(text).map_err(value_error)?;
        Ok(sciforge::nbstrip::strip_notebook(&doc).to_text())
    }

    #[pyfunction]
    fn mat2py(source: &str) -> PyResult<String> {
        sciforge::mat2py::convert(source).map_err(value_error)
    }

    /// (converted text, rewrite report).
    #[pyfunction]
    fn mat2py_report(source: &str) -> PyResult<(String, String)> {
        let conversion = sciforge::mat2py::convert_report(source).map_err(value_error)?;
        let report = conversion.render_report();
        Ok((conversion.text, report))
    }

    #[pyfunction]
    #[pyo3(signature = (
        scheduler, name, command, walltime = "1:00:00", nodes = 1, cores_per_node = 1, node_cores = 32,
        partition = None, launch_prefix = "", env_setup = Vec::new(), after = None, stdout = None, stderr = None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn render_job_script(
        scheduler: &str,
        name: &str,
        command: &str,
        walltime: &str,
        nodes: u32,
        cores_per_node: u32,
        node_cores: u32,
        partition: Option<String>,
        launch_prefix: &str,
        env_setup: Vec<String>,
        after: Option<String>,
        stdout: Option<String>,
        stderr: Option<String>,
    ) -> PyResult<String> {
        let scheduler: Scheduler = scheduler.parse().map_err(value_error)?;
        let walltime = sciforge::hpc_jobs::parse_walltime(walltime).map_err(value_error)?;
        let mut profile = ClusterProfile::new(scheduler, node_cores);
        profile.default_walltime = walltime;
        profile.queue_or_partition = partition;
        profile.env_setup = env_setup;
        profile.launch_prefix = launch_prefix.to_string();
        let job = JobSpec {
            name: name.to_string(),
            command: command.to_string(),
            walltime,
            nb_nodes: nodes,
            nb_cores_per_node: cores_per_node,
            stdout_path: stdout.unwrap_or_else(|| format!("{name}.out")),
            stderr_path: stderr.unwrap_or_else(|| format!("{name}.err")),
            after_job: after,
        };
        sciforge::hpc_jobs::render_script(&profile, &job).map_err(value_error)
    }
}
