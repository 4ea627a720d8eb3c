//! Python bindings: a `Form` class over the decision procedure, witness
//! searches, normalization, and the congruence machinery.  Rationals cross
//! the boundary as `fractions.Fraction`; integers as plain `int`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyType;

use ternaryq::arith::{Int, Rat};
use ternaryq::decide;
use ternaryq::forms;
use ternaryq::local;
use ternaryq::Error;

fn to_py_err(e: Error) -> PyErr {
    if e.is_limit() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Exact `fractions.Fraction` from a rational.
fn rat_to_py(py: Python<'_>, r: &Rat) -> PyResult<Py<PyAny>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    Ok(fraction.call1((r.to_string(),))?.unbind())
}

/// Accept int, str ("p" or "p/q"), or Fraction; anything whose str() is an
/// exact rational literal.
fn py_to_rat(obj: &Bound<'_, PyAny>) -> PyResult<Rat> {
    let s: String = obj.str()?.extract()?;
    s.trim()
        .parse::<Rat>()
        .map_err(|_| PyValueError::new_err(format!("not an exact rational: {s:?}")))
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Failure {
    #[pyo3(get)]
    kind: String,
    /// Two-adic exclusions only: the deciding modulus (8 or 16).
    #[pyo3(get)]
    modulus: Option<u8>,
    #[pyo3(get)]
    residue: Option<u8>,
    /// Prime-condition failures only.
    #[pyo3(get)]
    p: Option<Int>,
}

#[pymethods]
impl Failure {
    fn __repr__(&self) -> String {
        match self.kind.as_str() {
            "two_adic" => format!(
                "Failure(two_adic, {} mod {})",
                self.residue.unwrap(),
                self.modulus.unwrap()
            ),
            "prime" => format!("Failure(prime, p={})", self.p.clone().unwrap()),
            _ => "Failure(sign)".into(),
        }
    }
}

impl From<&decide::Failure> for Failure {
    fn from(f: &decide::Failure) -> Self {
        match f {
            decide::Failure::SignMismatch => Failure {
                kind: "sign".into(),
                modulus: None,
                residue: None,
                p: None,
            },
            decide::Failure::TwoAdicExclusion { modulus, residue } => Failure {
                kind: "two_adic".into(),
                modulus: Some(*modulus),
                residue: Some(*residue),
                p: None,
            },
            decide::Failure::PrimeCondition { p, .. } => Failure {
                kind: "prime".into(),
                modulus: None,
                residue: None,
                p: Some(p.clone()),
            },
        }
    }
}

#[pyclass(frozen)]
struct Verdict {
    #[pyo3(get)]
    represented: bool,
    #[pyo3(get)]
    failures: Vec<Failure>,
}

#[pymethods]
impl Verdict {
    fn __bool__(&self) -> bool {
        self.represented
    }

    fn __repr__(&self) -> String {
        if self.represented {
            "Verdict(represented)".into()
        } else {
            format!("Verdict(not represented, {} failure(s))", self.failures.len())
        }
    }
}

#[pyclass(frozen)]
struct Witness {
    x: Rat,
    y: Rat,
    z: Rat,
    target: Rat,
}

#[pymethods]
impl Witness {
    #[getter]
    fn x(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        rat_to_py(py, &self.x)
    }

    #[getter]
    fn y(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        rat_to_py(py, &self.y)
    }

    #[getter]
    fn z(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        rat_to_py(py, &self.z)
    }

    #[getter]
    fn target(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        rat_to_py(py, &self.target)
    }

    /// (x, y, z) as one tuple of Fractions.
    fn point(&self, py: Python<'_>) -> PyResult<(Py<PyAny>, Py<PyAny>, Py<PyAny>)> {
        Ok((
            rat_to_py(py, &self.x)?,
            rat_to_py(py, &self.y)?,
            rat_to_py(py, &self.z)?,
        ))
    }

    fn __repr__(&self) -> String {
        format!("Witness({}, {}, {})", self.x, self.y, self.z)
    }
}

impl From<decide::Witness> for Witness {
    fn from(w: decide::Witness) -> Self {
        Witness { x: w.x, y: w.y, z: w.z, target: w.target }
    }
}

#[pyclass(frozen)]
struct Progression {
    #[pyo3(get)]
    residue: Int,
    #[pyo3(get)]
    modulus: Int,
}

#[pymethods]
impl Progression {
    /// The k-th excluded number, residue + k*modulus.
    fn member(&self, k: u64) -> Int {
        &self.residue + &self.modulus * Int::from(k)
    }

    fn __repr__(&self) -> String {
        format!("Progression({} mod {})", self.residue, self.modulus)
    }
}

#[pyclass(frozen)]
struct Normalized {
    a: Int,
    b: Int,
    c: Int,
    lambda_: Rat,
    multipliers: [Rat; 3],
}

#[pymethods]
impl Normalized {
    /// Squarefree pairwise-coprime coefficients (a, b, c).
    #[getter]
    fn coefficients(&self) -> (Int, Int, Int) {
        (self.a.clone(), self.b.clone(), self.c.clone())
    }

    /// Positive scale: the original form represents N iff this one
    /// represents N / lambda_.
    #[getter]
    fn lambda_(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        rat_to_py(py, &self.lambda_)
    }

    /// Coordinate rescalings (u1, u2, u3) realizing the equivalence.
    #[getter]
    fn multipliers(&self, py: Python<'_>) -> PyResult<(Py<PyAny>, Py<PyAny>, Py<PyAny>)> {
        Ok((
            rat_to_py(py, &self.multipliers[0])?,
            rat_to_py(py, &self.multipliers[1])?,
            rat_to_py(py, &self.multipliers[2])?,
        ))
    }

    fn as_form(&self) -> Form {
        Form {
            inner: forms::DiagonalForm {
                a: Rat::from(self.a.clone()),
                b: Rat::from(self.b.clone()),
                c: Rat::from(self.c.clone()),
            },
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Normalized({}, {}, {}; lambda={})",
            self.a, self.b, self.c, self.lambda_
        )
    }
}

#[pyclass(frozen)]
struct TwoAdic {
    #[pyo3(get)]
    complete: bool,
    #[pyo3(get)]
    modulus: Option<u8>,
    #[pyo3(get)]
    residue: Option<u8>,
}

#[pymethods]
impl TwoAdic {
    fn __repr__(&self) -> String {
        match (self.modulus, self.residue) {
            (Some(m), Some(r)) => format!("TwoAdic(excluded {r} mod {m})"),
            _ => "TwoAdic(complete)".into(),
        }
    }
}

#[pyclass(frozen)]
struct Obstruction {
    #[pyo3(get)]
    p: Int,
    #[pyo3(get)]
    symbol: i32,
    #[pyo3(get)]
    excluded_units: Vec<Int>,
}

#[pymethods]
impl Obstruction {
    fn __repr__(&self) -> String {
        format!("Obstruction(p={})", self.p)
    }
}

/// A diagonal ternary quadratic form a*x^2 + b*y^2 + c*z^2 with nonzero
/// rational coefficients.
#[pyclass(frozen)]
struct Form {
    inner: forms::DiagonalForm,
}

#[pymethods]
impl Form {
    #[new]
    fn new(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, c: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = forms::DiagonalForm::new(py_to_rat(a)?, py_to_rat(b)?, py_to_rat(c)?)
            .map_err(to_py_err)?;
        Ok(Form { inner })
    }

    /// Build from the six polynomial coefficients of a general ternary
    /// form (q12 multiplies xy, etc.) by completing squares.
    #[classmethod]
    fn diagonalized(
        _cls: &Bound<'_, PyType>,
        py: Python<'_>,
        coeffs: [Bound<'_, PyAny>; 6],
    ) -> PyResult<(Form, Vec<Vec<Py<PyAny>>>)> {
        let r: Vec<Rat> = coeffs.iter().map(py_to_rat).collect::<PyResult<_>>()?;
        let q = forms::TernaryForm::new(
            r[0].clone(),
            r[1].clone(),
            r[2].clone(),
            r[3].clone(),
            r[4].clone(),
            r[5].clone(),
        )
        .map_err(to_py_err)?;
        let (diag, transform) = forms::diagonalize(&q).map_err(to_py_err)?;
        let matrix = transform
            .m
            .iter()
            .map(|row| row.iter().map(|e| rat_to_py(py, e)).collect())
            .collect::<PyResult<_>>()?;
        Ok((Form { inner: diag }, matrix))
    }

    #[getter]
    fn coefficients(&self, py: Python<'_>) -> PyResult<(Py<PyAny>, Py<PyAny>, Py<PyAny>)> {
        Ok((
            rat_to_py(py, &self.inner.a)?,
            rat_to_py(py, &self.inner.b)?,
            rat_to_py(py, &self.inner.c)?,
        ))
    }

    fn evaluate(
        &self,
        py: Python<'_>,
        x: &Bound<'_, PyAny>,
        y: &Bound<'_, PyAny>,
        z: &Bound<'_, PyAny>,
    ) -> PyResult<Py<PyAny>> {
        let v = self.inner.evaluate(&py_to_rat(x)?, &py_to_rat(y)?, &py_to_rat(z)?);
        rat_to_py(py, &v)
    }

    fn is_positive(&self) -> bool {
        self.inner.is_positive()
    }

    fn is_indefinite(&self) -> bool {
        self.inner.is_indefinite()
    }

    /// Decide rational representability of the nonzero rational n.
    fn is_represented(&self, n: &Bound<'_, PyAny>) -> PyResult<Verdict> {
        let verdict = decide::is_represented(&self.inner, &py_to_rat(n)?).map_err(to_py_err)?;
        Ok(Verdict {
            represented: verdict.represented,
            failures: verdict.failures.iter().map(Failure::from).collect(),
        })
    }

    /// Smallest-denominator rational point with f = n inside the search
    /// box, or None.  Deterministic for any job count.
    #[pyo3(signature = (n, max_den = 24, max_num = 600, jobs = 1))]
    fn witness(
        &self,
        n: &Bound<'_, PyAny>,
        max_den: u32,
        max_num: u64,
        jobs: usize,
    ) -> PyResult<Option<Witness>> {
        let target = py_to_rat(n)?;
        Ok(decide::rational_witness_jobs(&self.inner, &target, max_den, max_num, jobs)
            .map(Witness::from))
    }

    /// Exact integer point with f = n; the form must be integral,
    /// squarefree, pairwise coprime, mixed-sign, and universal.
    fn integer_witness(&self, n: Int) -> PyResult<Witness> {
        decide::integer_witness(&self.inner, &n)
            .map(Witness::from)
            .map_err(to_py_err)
    }

    /// Does this indefinite form represent every integer over Z?
    fn universal(&self) -> PyResult<bool> {
        decide::universal_over_z(&self.inner).map_err(to_py_err)
    }

    /// A primitive integer zero of the form, if one exists.
    fn isotropic(&self) -> PyResult<(Int, Int, Int)> {
        let v = decide::legendre_isotropic(&self.inner).map_err(to_py_err)?;
        Ok((v.x0, v.y0, v.z0))
    }

    /// Arithmetic progressions of rationals the form never represents
    /// (positive forms only; sorted, deduplicated).
    fn excluded_progressions(&self) -> PyResult<Vec<Progression>> {
        let ps = decide::excluded_progressions(&self.inner).map_err(to_py_err)?;
        Ok(ps
            .into_iter()
            .map(|p| Progression { residue: p.residue, modulus: p.modulus })
            .collect())
    }

    /// Equivalent squarefree pairwise-coprime integer form with the exact
    /// scale relating the value sets.
    fn normalize(&self) -> PyResult<Normalized> {
        let nf = forms::normalize(&self.inner).map_err(to_py_err)?;
        Ok(Normalized {
            a: nf.a,
            b: nf.b,
            c: nf.c,
            lambda_: nf.lambda,
            multipliers: [nf.u1, nf.u2, nf.u3],
        })
    }

    /// Two-adic classification of the normalized form.
    fn classify2(&self) -> PyResult<TwoAdic> {
        let nf = forms::normalize(&self.inner).map_err(to_py_err)?;
        let class = local::two_adic_classify(&nf);
        let (modulus, residue) = match class.excluded() {
            Some((m, r)) => (Some(m), Some(r)),
            None => (None, None),
        };
        Ok(TwoAdic { complete: class.excluded().is_none(), modulus, residue })
    }

    /// Odd primes where the normalized form is locally blocked, with the
    /// excluded unit residues at each.
    fn obstructions(&self) -> PyResult<Vec<Obstruction>> {
        let nf = forms::normalize(&self.inner).map_err(to_py_err)?;
        let obs = local::prime_obstructions(&nf).map_err(to_py_err)?;
        Ok(obs
            .into_iter()
            .map(|o| Obstruction {
                p: o.p,
                symbol: o.symbol,
                excluded_units: o.excluded_unit_residues,
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Form({}, {}, {})",
            self.inner.a, self.inner.b, self.inner.c
        )
    }
}

#[pymodule]
fn ternaryq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Form>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<Failure>()?;
    m.add_class::<Witness>()?;
    m.add_class::<Progression>()?;
    m.add_class::<Normalized>()?;
    m.add_class::<TwoAdic>()?;
    m.add_class::<Obstruction>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
