//! Python bindings. Rationals cross the boundary as `"p/q"` strings; any
//! argument whose `str()` parses as one (ints, `fractions.Fraction`) is
//! accepted.

use dt4_core::formulas::{self, LocalCurveData, SplittingDatum};
use dt4_core::partitions::{enumerate_plane, enumerate_solid, MAX_SIZE};
use dt4_core::verify::{self, Injection, Suite, SuiteOptions, VerificationReport};
use dt4_core::vertex::{self, NoInsertionConvention, SignRule};
use dt4_core::{Error, ParamContext, QSeries, Rat, RatFn};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyIndexError, PyValueError};
use pyo3::prelude::*;

create_exception!(dt4, ComputationError, PyException, "Computational abort (zero weight, pole, empty sign family).");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::InvalidTopologicalData(_) | Error::SizeTooLarge(..) => {
            PyValueError::new_err(e.to_string())
        }
        other => ComputationError::new_err(other.to_string()),
    }
}

fn parse_rat(text: &str) -> Result<Rat, Error> {
    text.trim().parse::<Rat>()
}

fn rat_arg(obj: &Bound<'_, PyAny>) -> PyResult<Rat> {
    parse_rat(&obj.str()?.to_string()).map_err(to_py)
}

/// Equivariant context: `s2`, `s3`, `m` bound, `s1` symbolic, `s4 = -s1-s2-s3`.
#[pyclass(frozen, name = "Context", module = "dt4", skip_from_py_object)]
struct Context {
    inner: ParamContext,
}

#[pymethods]
impl Context {
    #[new]
    fn new(s2: &Bound<'_, PyAny>, s3: &Bound<'_, PyAny>, m: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Context { inner: ParamContext::new(rat_arg(s2)?, rat_arg(s3)?, rat_arg(m)?) })
    }

    /// Draws a generic context from `seed`, avoiding vanishing fixed-point
    /// weights up to order `n_max`.
    #[staticmethod]
    fn sample(seed: u64, n_max: usize) -> PyResult<Self> {
        let engine = vertex::Engine::new(n_max).map_err(to_py)?;
        Ok(Context { inner: verify::seeded_contexts(&engine, seed, 1).remove(0) })
    }

    #[getter]
    fn s2(&self) -> String {
        self.inner.s2.to_string()
    }

    #[getter]
    fn s3(&self) -> String {
        self.inner.s3.to_string()
    }

    #[getter]
    fn m(&self) -> String {
        self.inner.m.to_string()
    }

    /// `m -> m + l*s1`.
    fn twisted(&self, l: i64) -> Self {
        Context { inner: self.inner.twisted(l) }
    }

    /// `m -> -s4`.
    fn at_m_minus_s4(&self) -> Self {
        Context { inner: self.inner.at_m_minus_s4() }
    }

    fn check_generic(&self) -> PyResult<()> {
        self.inner.check_generic().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Context({})", self.inner)
    }
}

/// Truncated power series in `q` with coefficients in `Q(s1)`.
#[pyclass(frozen, name = "Series", module = "dt4", skip_from_py_object)]
struct Series {
    inner: QSeries<RatFn>,
}

impl Series {
    fn wrap(r: dt4_core::Result<QSeries<RatFn>>) -> PyResult<Self> {
        r.map(|inner| Series { inner }).map_err(to_py)
    }

    fn check_index(&self, n: usize) -> PyResult<()> {
        if n > self.inner.order() {
            return Err(PyIndexError::new_err(format!("q^{n} beyond order {}", self.inner.order())));
        }
        Ok(())
    }
}

#[pymethods]
impl Series {
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// Coefficient of `q^n` as a readable rational function of `s1`.
    fn coeff(&self, n: usize) -> PyResult<String> {
        self.check_index(n)?;
        Ok(self.inner.coeff(n).to_string())
    }

    /// Numerator and denominator coefficient lists (ascending in `s1`).
    fn coeff_parts(&self, n: usize) -> PyResult<(Vec<String>, Vec<String>)> {
        self.check_index(n)?;
        let c = self.inner.coeff(n);
        let strs = |p: &dt4_core::UniPoly| p.coeffs().iter().map(Rat::to_string).collect();
        Ok((strs(c.num()), strs(c.den())))
    }

    /// Coefficient of `q^n` evaluated at a rational `s1`.
    fn coeff_at(&self, n: usize, s1: &Bound<'_, PyAny>) -> PyResult<String> {
        self.check_index(n)?;
        Ok(self.inner.coeff(n).eval(&rat_arg(s1)?).map_err(to_py)?.to_string())
    }

    fn mul(&self, other: &Series) -> PyResult<Series> {
        Series::wrap(self.inner.mul(&other.inner))
    }

    fn log(&self) -> PyResult<Series> {
        Series::wrap(self.inner.log())
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("series serialize")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Series> {
        serde_json::from_str(text).map(|inner| Series { inner }).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __eq__(&self, other: &Series) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.order() + 1
    }

    fn __repr__(&self) -> String {
        format!("Series({})", self.inner)
    }
}

/// Fixed-point engine for the `C^4` vertex up to order `n_max`, with a sign
/// rule calibrated on orders `<= 2`.
#[pyclass(frozen, name = "Engine", module = "dt4", skip_from_py_object)]
struct Engine {
    inner: vertex::Engine,
    rule: SignRule,
    survivors: Vec<String>,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (n_max, seed = 1))]
    fn new(n_max: usize, seed: u64) -> PyResult<Self> {
        let inner = vertex::Engine::new(n_max).map_err(to_py)?;
        let cal = verify::seeded_calibration(&inner, seed).map_err(to_py)?;
        Ok(Engine { inner, rule: cal.rule, survivors: cal.record.survivors })
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    #[getter]
    fn sign_rule(&self) -> String {
        self.rule.id()
    }

    #[getter]
    fn survivors(&self) -> Vec<String> {
        self.survivors.clone()
    }

    fn fixed_point_count(&self, n: usize) -> PyResult<usize> {
        if n > self.inner.n_max() {
            return Err(PyValueError::new_err(format!("order {n} exceeds engine order {}", self.inner.n_max())));
        }
        Ok(self.inner.fixed_points(n).len())
    }

    /// `Z(C^4)` by localization; `no_insertion` drops the tautological
    /// insertion (dual orientation).
    #[pyo3(signature = (ctx, n = None, no_insertion = false))]
    fn z_c4(&self, ctx: &Context, n: Option<usize>, no_insertion: bool) -> PyResult<Series> {
        let n = n.unwrap_or(self.inner.n_max());
        self.inner.check_context(&ctx.inner).map_err(to_py)?;
        Series::wrap(if no_insertion {
            self.inner.z_c4_no_insertion(n, &ctx.inner, &self.rule, NoInsertionConvention::Dual)
        } else {
            self.inner.z_c4_localized(n, &ctx.inner, &self.rule)
        })
    }

    /// The divisor-supported sum at `m = -s4` and the number of stray
    /// nonzero contributions.
    fn divisor_restriction(&self, ctx: &Context, n: usize) -> PyResult<(Series, usize)> {
        let (s, stray) = self.inner.divisor_restriction(n, &ctx.inner, &self.rule).map_err(to_py)?;
        Ok((Series { inner: s }, stray.len()))
    }
}

#[pyfunction]
fn z_c3(ctx: &Context, n: usize) -> PyResult<Series> {
    Series::wrap(vertex::z_c3_localized(n, &ctx.inner))
}

#[pyfunction]
fn count_partitions(dim: u8, size: usize) -> PyResult<usize> {
    Ok(list_partitions(dim, size)?.len())
}

/// Plane partitions as row lists (dim 3) or solid partitions as height
/// maps (dim 4).
#[pyfunction]
fn list_partitions(dim: u8, size: usize) -> PyResult<Vec<String>> {
    if size > MAX_SIZE {
        return Err(to_py(Error::SizeTooLarge(size, MAX_SIZE)));
    }
    match dim {
        3 => Ok(enumerate_plane(size).iter().map(ToString::to_string).collect()),
        4 => Ok(enumerate_solid(size).iter().map(ToString::to_string).collect()),
        _ => Err(PyValueError::new_err(format!("dim must be 3 or 4, got {dim}"))),
    }
}

/// Coefficients of `M(q)`.
#[pyfunction]
fn macmahon(n: usize) -> Vec<String> {
    dt4_core::qseries::macmahon(n).coeffs().iter().map(Rat::to_string).collect()
}

/// Coefficients of `M(-q)^e` for a rational exponent.
#[pyfunction]
fn macmahon_power(e: &Bound<'_, PyAny>, n: usize) -> PyResult<Vec<String>> {
    Ok(dt4_core::qseries::macmahon_power(&rat_arg(e)?, n).coeffs().iter().map(Rat::to_string).collect())
}

#[pyfunction]
fn ck_exponent(ctx: &Context) -> PyResult<String> {
    formulas::ck_exponent(&ctx.inner).map(|e| e.to_string()).map_err(to_py)
}

#[pyfunction]
fn ck_closed_form(ctx: &Context, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::ck_closed_form(n, &ctx.inner))
}

#[pyfunction]
fn no_insertion_closed(ctx: &Context, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::no_insertion_closed(n, &ctx.inner))
}

#[pyfunction]
fn w_infinity(ctx: &Context, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::w_infinity(n, &ctx.inner))
}

#[pyfunction]
fn z_rel_closed(ctx: &Context, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::z_rel_closed(n, &ctx.inner))
}

#[pyfunction]
fn z_rel_twisted_product(ctx: &Context, l: i64, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::z_rel_twisted_product(l, n, &ctx.inner))
}

#[pyfunction]
fn z_rel_twisted_substitution(ctx: &Context, l: i64, n: usize) -> PyResult<Series> {
    Series::wrap(formulas::z_rel_twisted_substitution(l, n, &ctx.inner))
}

/// `-res_{s1=0}` of each coefficient of `log z`.
#[pyfunction]
fn f_inf0_residue(z: &Series) -> PyResult<Vec<String>> {
    let f = formulas::f_inf0_residue(&z.inner).map_err(to_py)?;
    Ok(f.coeffs().iter().map(Rat::to_string).collect())
}

fn curve(data: (i64, i64, i64, i64, i64)) -> PyResult<LocalCurveData> {
    let (g, l1, l2, l3, l) = data;
    LocalCurveData::new(g, l1, l2, l3, l).map_err(to_py)
}

/// Exponent of the local-curve series for `data = (g, l1, l2, l3, l)`.
#[pyfunction]
fn local_curve_exponent(ctx: &Context, data: (i64, i64, i64, i64, i64)) -> PyResult<String> {
    formulas::local_curve_exponent(&curve(data)?, &ctx.inner).map(|e| e.to_string()).map_err(to_py)
}

#[pyfunction]
fn local_curve_series(ctx: &Context, data: (i64, i64, i64, i64, i64), n: usize) -> PyResult<Series> {
    Series::wrap(formulas::local_curve_series(&curve(data)?, n, &ctx.inner))
}

/// `(additive, multiplicative)` for the splitting with the given left side.
#[pyfunction]
fn gluing_check(
    ctx: &Context,
    whole: (i64, i64, i64, i64, i64),
    left: (i64, i64, i64, i64, i64),
    n: usize,
) -> PyResult<(bool, bool)> {
    let whole = curve(whole)?;
    let split = SplittingDatum::from_left(&whole, [left.0, left.1, left.2, left.3, left.4]).map_err(to_py)?;
    let out = formulas::gluing_check(&whole, &split, &ctx.inner, n).map_err(to_py)?;
    Ok((out.additive, out.multiplicative))
}

/// Outcome of a verification battery.
#[pyclass(frozen, name = "Report", module = "dt4", skip_from_py_object)]
struct Report {
    inner: VerificationReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn verdict(&self) -> String {
        self.inner.verdict.to_string()
    }

    /// `(name, verdict, witness)` per check.
    #[getter]
    fn checks(&self) -> Vec<(String, String, Option<String>)> {
        self.inner.checks.iter().map(|c| (c.name.clone(), c.verdict.to_string(), c.witness.clone())).collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("report serialize")
    }

    fn to_junit(&self) -> String {
        self.inner.to_junit()
    }

    fn __repr__(&self) -> String {
        format!("Report({} {}, {} checks)", self.inner.suite, self.inner.verdict, self.inner.checks.len())
    }
}

#[pyfunction]
#[pyo3(signature = (suite, n_max, trials = 3, seed = 1, inject = "none"))]
fn run_suite(py: Python<'_>, suite: &str, n_max: usize, trials: usize, seed: u64, inject: &str) -> PyResult<Report> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let injection = match inject {
        "none" => Injection::None,
        "sign" => Injection::Sign,
        "exponent" => Injection::Exponent,
        other => return Err(PyValueError::new_err(format!("unknown injection {other:?}"))),
    };
    let opts = SuiteOptions { injection, timings: false };
    let inner = py.detach(|| verify::run_suite_with(suite, n_max, trials, seed, &opts)).map_err(to_py)?;
    Ok(Report { inner })
}

#[pymodule]
fn dt4(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ComputationError", m.py().get_type::<ComputationError>())?;
    m.add_class::<Context>()?;
    m.add_class::<Series>()?;
    m.add_class::<Engine>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(z_c3, m)?)?;
    m.add_function(wrap_pyfunction!(count_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(list_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(macmahon, m)?)?;
    m.add_function(wrap_pyfunction!(macmahon_power, m)?)?;
    m.add_function(wrap_pyfunction!(ck_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(ck_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(no_insertion_closed, m)?)?;
    m.add_function(wrap_pyfunction!(w_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(z_rel_closed, m)?)?;
    m.add_function(wrap_pyfunction!(z_rel_twisted_product, m)?)?;
    m.add_function(wrap_pyfunction!(z_rel_twisted_substitution, m)?)?;
    m.add_function(wrap_pyfunction!(f_inf0_residue, m)?)?;
    m.add_function(wrap_pyfunction!(local_curve_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(local_curve_series, m)?)?;
    m.add_function(wrap_pyfunction!(gluing_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_python_style_rationals() {
        assert_eq!(parse_rat(" 3/6 ").unwrap(), Rat::new(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), Rat::int(-4));
        assert!(parse_rat("1/0").is_err());
    }
}
