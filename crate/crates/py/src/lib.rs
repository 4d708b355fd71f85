//! Python bindings. The module is importable as `expsum`.

use expsum::{Complex64, Error, ExpSum as CoreSum, Rectangle};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_)
        | Error::DegenerateSum
        | Error::InvalidRadius { .. }
        | Error::NotCommensurable(_)
        | Error::ZeroAtAnchor { .. } => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

/// A normalized exponential sum `1 + Σ H_j e^{w_j z}`.
#[pyclass(name = "ExpSum", frozen)]
struct PyExpSum {
    inner: CoreSum,
}

#[pymethods]
impl PyExpSum {
    /// `terms` is a list of `(coefficient, frequency)` pairs; the sum is
    /// normalized on construction.
    #[new]
    fn new(terms: Vec<(Complex64, f64)>) -> PyResult<Self> {
        let sum = CoreSum::from_pairs(terms).map_err(to_py)?;
        let inner = if sum.is_normalized() { sum } else { sum.normalize().map_err(to_py)?.sum };
        Ok(PyExpSum { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let sum = CoreSum::from_problem_json(text).map_err(to_py)?;
        let inner = if sum.is_normalized() { sum } else { sum.normalize().map_err(to_py)?.sum };
        Ok(PyExpSum { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// `(coefficient, frequency)` pairs, leading constant term included.
    fn terms(&self) -> Vec<(Complex64, f64)> {
        self.inner.terms().iter().map(|t| (t.coeff, t.freq)).collect()
    }

    fn __call__(&self, z: Complex64) -> Complex64 {
        expsum::eval(&self.inner, z)
    }

    fn __repr__(&self) -> String {
        format!("ExpSum({})", self.inner)
    }

    /// `(regions, strips)`: regions as `(x_lo, x_hi, dominant)`, strips as
    /// `(x_lo, x_hi, left_dominant, right_dominant)`.
    #[allow(clippy::type_complexity)]
    fn decompose(&self, py: Python<'_>) -> PyResult<(Vec<(f64, f64, usize)>, Vec<(f64, f64, usize, usize)>)> {
        let d = py.detach(|| expsum::decompose(&self.inner)).map_err(to_py)?;
        Ok((
            d.regions.iter().map(|r| (r.x_lo, r.x_hi, r.dominant)).collect(),
            d.strips.iter().map(|s| (s.x_lo, s.x_hi, s.left_dominant, s.right_dominant)).collect(),
        ))
    }

    /// Zeros in `[x_lo, x_hi] × [y_lo, y_hi)` counted with multiplicity.
    fn count_zeros(&self, py: Python<'_>, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> PyResult<usize> {
        let rect = Rectangle::new(x_lo, x_hi, y_lo, y_hi).map_err(to_py)?;
        let res = py.detach(|| expsum::count_zeros(&self.inner, &rect)).map_err(to_py)?;
        Ok(res.count)
    }

    /// Zeros with `y_lo ≤ Im z < y_hi` as `(z, multiplicity, strip, method)`,
    /// from one strip or from all of them.
    #[pyo3(signature = (y_lo, y_hi, strip=None))]
    fn find_zeros(
        &self,
        py: Python<'_>,
        y_lo: f64,
        y_hi: f64,
        strip: Option<usize>,
    ) -> PyResult<Vec<(Complex64, usize, usize, &'static str)>> {
        let records = py
            .detach(|| -> expsum::Result<_> {
                let d = expsum::decompose(&self.inner)?;
                let indices: Vec<usize> = match strip {
                    Some(i) if i >= d.strips.len() => {
                        return Err(Error::InvalidInput(format!("strip {i} does not exist")));
                    }
                    Some(i) => vec![i],
                    None => (0..d.strips.len()).collect(),
                };
                let mut all = Vec::new();
                for i in indices {
                    all.extend(expsum::find_zeros(&self.inner, &d, i, y_lo, y_hi)?);
                }
                expsum::zeros::sort_records(&mut all);
                Ok(all)
            })
            .map_err(to_py)?;
        Ok(records.iter().map(|r| (r.z, r.multiplicity, r.strip_index, r.method.as_str())).collect())
    }

    /// Zeros from the polynomial oracle; only for commensurable frequencies.
    fn oracle_zeros(&self, py: Python<'_>, y_lo: f64, y_hi: f64) -> PyResult<Vec<(Complex64, usize)>> {
        let records = py.detach(|| expsum::oracle_zeros_commensurable(&self.inner, y_lo, y_hi)).map_err(to_py)?;
        Ok(records.iter().map(|r| (r.z, r.multiplicity)).collect())
    }

    /// `(lhs, bound)` of Backlund's inequality for the segment `z1 → z2`.
    fn backlund(&self, py: Python<'_>, z1: Complex64, z2: Complex64, radius: f64) -> PyResult<(f64, f64)> {
        let b = py.detach(|| expsum::backlund_bound(&self.inner, z1, z2, radius)).map_err(to_py)?;
        Ok((b.lhs, b.bound))
    }

    /// `(r, count, deviation)` for each radius.
    #[pyo3(signature = (strip, r_values, y0=0.0))]
    fn strip_density(
        &self,
        py: Python<'_>,
        strip: usize,
        r_values: Vec<f64>,
        y0: f64,
    ) -> PyResult<Vec<(f64, usize, f64)>> {
        let rep = py.detach(|| expsum::strip_density(&self.inner, strip, &r_values, y0)).map_err(to_py)?;
        Ok(rep.samples.iter().map(|s| (s.r, s.count, s.deviation)).collect())
    }
}

#[pymodule]
#[pyo3(name = "expsum")]
fn expsum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpSum>()?;
    Ok(())
}
