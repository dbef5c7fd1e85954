//! Python bindings: exact divisor-sum arithmetic, progression scans,
//! density constants, and the CRT construction pipeline.
//!
//! Conventions: linear forms are accepted as `LinearForm` instances or
//! `"ax+b"` strings; exact rationals cross the boundary as
//! `fractions.Fraction`; big integers as plain `int`. Library errors
//! surface as `ValueError` (`OverflowError` for range overruns).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use signlab::arith::{self, SigmaMode, SigmaValue};
use signlab::crt::{self, hunt, Admissibility};
use signlab::density;
use signlab::scan::{self, ProgressionPair, SignScanReport};
use signlab::{Error, LinearForm};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Linear form a*x + b with positive integer slope.
#[pyclass(name = "LinearForm", frozen, from_py_object)]
#[derive(Clone)]
struct PyLinearForm {
    inner: LinearForm,
}

#[pymethods]
impl PyLinearForm {
    /// Parses `"ax+b"` notation, e.g. `"30x+1"`, `"x"`, `"6x-17"`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: text.parse().map_err(to_py_err)?,
        })
    }

    /// Builds the form from its (slope, offset) pair.
    #[staticmethod]
    fn from_pair(a: u64, b: i64) -> PyResult<Self> {
        Ok(Self {
            inner: LinearForm::new(a, b).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn slope(&self) -> u64 {
        self.inner.slope()
    }

    #[getter]
    fn offset(&self) -> i64 {
        self.inner.offset()
    }

    /// The value a*n + b.
    fn eval(&self, n: u64) -> i128 {
        self.inner.eval_i128(n)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LinearForm(\"{}\")", self.inner)
    }
}

fn form_from(obj: &Bound<'_, PyAny>) -> PyResult<LinearForm> {
    if let Ok(wrapper) = obj.extract::<PyLinearForm>() {
        return Ok(wrapper.inner);
    }
    let text: String = obj.extract()?;
    text.parse().map_err(to_py_err)
}

fn forms_from(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<LinearForm>> {
    objs.iter().map(form_from).collect()
}

/// Fraction for proper rationals, plain int for integers.
fn rational_obj(py: Python<'_>, r: &BigRational) -> PyResult<Py<PyAny>> {
    if r.is_integer() {
        Ok(r.to_integer().into_pyobject(py)?.into_any().unbind())
    } else {
        Ok(r.clone().into_pyobject(py)?.into_any().unbind())
    }
}

fn mode_for(s: &BigRational, force_real: bool) -> PyResult<SigmaMode> {
    if !force_real && s.is_integer() {
        let s = s
            .to_integer()
            .to_i64()
            .ok_or_else(|| PyOverflowError::new_err("exponent exceeds i64"))?;
        Ok(SigmaMode::ExactInteger(s))
    } else {
        let x = s
            .to_f64()
            .ok_or_else(|| PyOverflowError::new_err("exponent out of f64 range"))?;
        Ok(SigmaMode::Real(x))
    }
}

/// Deterministic 64-bit primality test.
#[pyfunction]
fn is_prime(n: u64) -> bool {
    arith::is_prime(n)
}

/// Sorted `(prime, exponent)` factorization of n >= 1.
#[pyfunction]
fn factor(n: u64) -> PyResult<Vec<(u64, u32)>> {
    Ok(arith::factor(n).map_err(to_py_err)?.factors)
}

/// All divisors of n in ascending order.
#[pyfunction]
fn divisors(n: u64) -> PyResult<Vec<u64>> {
    Ok(arith::divisors(&arith::factor(n).map_err(to_py_err)?))
}

/// Divisor sum sigma_s(n): exact (int or Fraction) for integer s,
/// float otherwise.
#[pyfunction]
#[pyo3(signature = (n, s=None))]
fn sigma(py: Python<'_>, n: u64, s: Option<BigRational>) -> PyResult<Py<PyAny>> {
    let s = s.unwrap_or_else(BigRational::one);
    let mode = mode_for(&s, false)?;
    let f = arith::factor(n).map_err(to_py_err)?;
    match arith::sigma_s(&f, mode).map_err(to_py_err)? {
        SigmaValue::Exact(r) => rational_obj(py, &r),
        SigmaValue::Real(x) => Ok(x.into_pyobject(py)?.into_any().unbind()),
    }
}

/// Euler totient phi(n).
#[pyfunction]
fn euler_phi(n: u64) -> PyResult<u64> {
    Ok(arith::euler_phi(&arith::factor(n).map_err(to_py_err)?))
}

/// Number of prime factors of n with multiplicity.
#[pyfunction]
fn big_omega(n: u64) -> PyResult<u32> {
    Ok(arith::big_omega(&arith::factor(n).map_err(to_py_err)?))
}

/// Abundancy index sigma(n)/n as an exact Fraction.
#[pyfunction]
fn abundancy(py: Python<'_>, n: u64) -> PyResult<Py<PyAny>> {
    let value = arith::abundancy(&arith::factor(n).map_err(to_py_err)?);
    rational_obj(py, &value)
}

fn scan_report_dict<'py>(py: Python<'py>, r: &SignScanReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n_max", r.n_max)?;
    d.set_item("count_pos", r.count_pos)?;
    d.set_item("count_neg", r.count_neg)?;
    d.set_item("count_zero", r.count_zero)?;
    d.set_item("sign_changes", r.sign_changes)?;
    d.set_item("first_pos", r.first_pos)?;
    d.set_item("first_neg", r.first_neg)?;
    d.set_item("first_zero", r.first_zero)?;
    d.set_item("near_ties", r.near_ties)?;
    Ok(d)
}

/// Sign tallies of sigma_s(f(n)) - sigma_s(g(n)) for n = 1..=limit.
#[pyfunction]
#[pyo3(signature = (f, g, limit, s=None, real=false))]
fn scan_signs<'py>(
    py: Python<'py>,
    f: &Bound<'py, PyAny>,
    g: &Bound<'py, PyAny>,
    limit: u64,
    s: Option<BigRational>,
    real: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let s = s.unwrap_or_else(BigRational::one);
    if !real && !s.is_integer() {
        return Err(PyValueError::new_err(format!(
            "exact scans need an integer exponent; got s = {s} (pass real=True)"
        )));
    }
    let pair = ProgressionPair {
        left: form_from(f)?,
        right: form_from(g)?,
        mode: mode_for(&s, real)?,
    };
    let report = scan::scan_signs(&pair, limit).map_err(to_py_err)?;
    scan_report_dict(py, &report)
}

/// First n <= limit with phi(q*n + 1) <= phi(q*n), or None.
#[pyfunction]
fn phi_dominance_scan(q: u64, limit: u64) -> PyResult<Option<u64>> {
    scan::phi_dominance_scan(q, limit).map_err(to_py_err)
}

/// First `count` primes congruent to m mod q, at or beyond `start`.
#[pyfunction]
#[pyo3(signature = (q, m, count, start=0))]
fn prime_in_ap(q: u64, m: i64, count: u64, start: u64) -> PyResult<Vec<u64>> {
    scan::prime_in_ap(q, m, count, start).map_err(to_py_err)
}

/// Smallest odd slope a satisfying the sigma_s slope-gap inequality.
#[pyfunction]
fn min_odd_a(s: BigRational) -> PyResult<u64> {
    scan::min_odd_a(&s).map_err(to_py_err)
}

/// Exact check of the slope-gap inequality at (s, a).
#[pyfunction]
fn slope_gap_holds(s: BigRational, a: u64) -> PyResult<bool> {
    scan::slope_gap_holds(&s, a).map_err(to_py_err)
}

/// Prime-driven witnesses of both signs for
/// sigma_s(a*n + 2) - sigma_s((a+1)*n + 1), each re-verified exactly.
#[pyfunction]
fn two_sided_witnesses<'py>(
    py: Python<'py>,
    s: BigRational,
    a: u64,
    limit: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = scan::two_sided_witnesses(&s, a, limit).map_err(to_py_err)?;
    let failures = PyList::empty(py);
    for failure in &report.failures {
        let f = PyDict::new(py);
        f.set_item("n", failure.n)?;
        f.set_item("branch", failure.branch)?;
        f.set_item("detail", &failure.detail)?;
        failures.append(f)?;
    }
    let d = PyDict::new(py);
    d.set_item("a", report.a)?;
    d.set_item("n_max", report.n_max)?;
    d.set_item("negatives", &report.negatives)?;
    d.set_item("positives", &report.positives)?;
    d.set_item("failures", failures)?;
    Ok(d)
}

/// Number of roots of f(n) = 0 (mod d) among the d residues.
#[pyfunction]
fn root_count(form: &Bound<'_, PyAny>, d: u64) -> PyResult<u64> {
    density::root_count_general(&form_from(form)?, d).map_err(to_py_err)
}

/// Euler factor of the root-count density of the form at prime p.
#[pyfunction]
fn local_factor(py: Python<'_>, form: &Bound<'_, PyAny>, p: u64) -> PyResult<Py<PyAny>> {
    let value = density::local_factor(&form_from(form)?, p).map_err(to_py_err)?;
    rational_obj(py, &value)
}

/// Exact coefficient c with density constant beta = c * zeta(2).
#[pyfunction]
fn beta_coefficient(py: Python<'_>, form: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let z = density::beta(&form_from(form)?);
    rational_obj(py, &z.coeff)
}

/// Certified floating enclosure (lo, hi) of the density constant beta.
#[pyfunction]
fn beta_enclosure(form: &Bound<'_, PyAny>) -> PyResult<(f64, f64)> {
    let enc = density::numeric(&density::beta(&form_from(form)?));
    Ok((enc.lo, enc.hi))
}

/// Exact limit of the partial-sum ratio for sigma over f versus g.
#[pyfunction]
fn predicted_ratio(
    py: Python<'_>,
    f: &Bound<'_, PyAny>,
    g: &Bound<'_, PyAny>,
) -> PyResult<Py<PyAny>> {
    let value =
        density::predicted_ratio(&form_from(f)?, &form_from(g)?).map_err(to_py_err)?;
    rational_obj(py, &value)
}

/// Exact partial sums of sigma over both progressions at each
/// checkpoint, with the ratio and its deviation from the limit.
#[pyfunction]
fn partial_sums<'py>(
    py: Python<'py>,
    f: &Bound<'py, PyAny>,
    g: &Bound<'py, PyAny>,
    checkpoints: Vec<u64>,
) -> PyResult<Bound<'py, PyList>> {
    let (f, g) = (form_from(f)?, form_from(g)?);
    let limit = density::predicted_ratio(&f, &g).map_err(to_py_err)?;
    let rows = density::compare_partial_sums(&f, &g, &checkpoints).map_err(to_py_err)?;
    let out = PyList::empty(py);
    for row in &rows {
        let ratio = BigRational::new(
            BigInt::from(row.sum_f.clone()),
            BigInt::from(row.sum_g.clone()),
        );
        let d = PyDict::new(py);
        d.set_item("k", row.k)?;
        d.set_item("sum_f", row.sum_f.clone())?;
        d.set_item("sum_g", row.sum_g.clone())?;
        d.set_item("ratio", rational_obj(py, &ratio)?)?;
        d.set_item("limit", rational_obj(py, &limit)?)?;
        d.set_item("abs_deviation", rational_obj(py, &(ratio - &limit).abs())?)?;
        out.append(d)?;
    }
    Ok(out)
}

/// Almost-prime bound G_k on max Omega across k admissible forms.
#[pyfunction]
fn heath_brown_bound(k: u64) -> PyResult<u32> {
    crt::heath_brown_bound(k).map_err(to_py_err)
}

fn instance_dict<'py>(py: Python<'py>, inst: &crt::FormSystem) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("k", inst.k)?;
    d.set_item("max_lower_slope", inst.max_lower_slope)?;
    d.set_item("max_upper_slope", inst.max_upper_slope)?;
    d.set_item("max_cross_det", inst.max_cross_det)?;
    d.set_item("omega_bound", inst.omega_bound)?;
    d.set_item("p_start", inst.p_start)?;
    d.set_item("threshold", crt::literal_threshold(inst))?;
    Ok(d)
}

/// Derived constants for a lower/upper family pair: slopes, cross
/// determinant, Omega bound, starting prime, and literal threshold.
#[pyfunction]
fn build_instance<'py>(
    py: Python<'py>,
    lower: Vec<Bound<'py, PyAny>>,
    upper: Vec<Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let inst =
        crt::build_instance(forms_from(&lower)?, forms_from(&upper)?).map_err(to_py_err)?;
    instance_dict(py, &inst)
}

/// Fixed-prime-divisor check over all primes <= p_max: the smallest
/// clean residue per prime, or the obstructing prime.
#[pyfunction]
fn admissible_residues<'py>(
    py: Python<'py>,
    forms: Vec<Bound<'py, PyAny>>,
    p_max: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match crt::admissibility_check(&forms_from(&forms)?, p_max).map_err(to_py_err)? {
        Admissibility::Admissible(prefix) => {
            d.set_item("admissible", true)?;
            d.set_item("prefix", prefix)?;
            d.set_item("obstructed_at", py.None())?;
        }
        Admissibility::Obstructed { p } => {
            d.set_item("admissible", false)?;
            d.set_item("prefix", py.None())?;
            d.set_item("obstructed_at", p)?;
        }
    }
    Ok(d)
}

/// k disjoint strings of consecutive primes from `start`, each with
/// reciprocal sum >= tau, within a scanned-prime budget.
#[pyfunction]
fn prime_strings<'py>(
    py: Python<'py>,
    start: u64,
    k: u64,
    tau: BigRational,
    budget: u64,
) -> PyResult<Bound<'py, PyList>> {
    let strings = crt::prime_strings(start, k, &tau, budget).map_err(to_py_err)?;
    let out = PyList::empty(py);
    for s in &strings {
        let d = PyDict::new(py);
        d.set_item("primes", &s.primes)?;
        d.set_item("reciprocal_sum", rational_obj(py, &s.reciprocal_sum)?)?;
        out.append(d)?;
    }
    Ok(out)
}

/// Solves n = r (mod p) over distinct primes; returns (n0, P) with
/// 0 <= n0 < P.
#[pyfunction]
fn solve_congruences(system: Vec<(u64, u64)>) -> PyResult<(num_bigint::BigUint, num_bigint::BigUint)> {
    crt::solve_congruences(&system).map_err(to_py_err)
}

fn pipeline(
    lower: &[Bound<'_, PyAny>],
    upper: &[Bound<'_, PyAny>],
    tau: &BigRational,
    budget: u64,
) -> PyResult<(crt::FormSystem, crt::CrtConstruction)> {
    let inst =
        crt::build_instance(forms_from(lower)?, forms_from(upper)?).map_err(to_py_err)?;
    let prefix = match crt::admissibility_check(&inst.lower, inst.p_start).map_err(to_py_err)? {
        Admissibility::Admissible(map) => map,
        Admissibility::Obstructed { p } => {
            return Err(PyValueError::new_err(format!(
                "lower forms cover every residue at p = {p}; system is inadmissible"
            )));
        }
    };
    let strings =
        crt::prime_strings(inst.p_start, inst.k as u64, tau, budget).map_err(to_py_err)?;
    let primes: Vec<Vec<u64>> = strings.iter().map(|s| s.primes.clone()).collect();
    let built = crt::build_crt_system(&inst, &primes, &prefix).map_err(to_py_err)?;
    Ok((inst, built))
}

fn construction_dict<'py>(
    py: Python<'py>,
    built: &crt::CrtConstruction,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("P", built.modulus.clone())?;
    d.set_item("n0", built.n0.clone())?;
    d.set_item(
        "prefix",
        built
            .prefix
            .iter()
            .map(|e| (e.p, e.residue))
            .collect::<Vec<_>>(),
    )?;
    d.set_item("strings", &built.strings)?;
    d.set_item("verified", built.verified)?;
    Ok(d)
}

/// Full pipeline: instance, admissible prefix, prime strings, solved
/// congruence system (P, n0), substitution-verified.
#[pyfunction]
fn crt_construct<'py>(
    py: Python<'py>,
    lower: Vec<Bound<'py, PyAny>>,
    upper: Vec<Bound<'py, PyAny>>,
    tau: BigRational,
    budget: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let (_, built) = pipeline(&lower, &upper, &tau, budget)?;
    construction_dict(py, &built)
}

/// Runs the pipeline, then scans n = m*P + n0 for m = 1..=m_max,
/// reporting max Omega over the lower forms against `bound`
/// (defaults to the instance's G_k).
#[pyfunction]
#[pyo3(signature = (lower, upper, tau, budget, m_max, bound=None))]
fn omega_scan<'py>(
    py: Python<'py>,
    lower: Vec<Bound<'py, PyAny>>,
    upper: Vec<Bound<'py, PyAny>>,
    tau: BigRational,
    budget: u64,
    m_max: u64,
    bound: Option<u32>,
) -> PyResult<Bound<'py, PyDict>> {
    let (inst, built) = pipeline(&lower, &upper, &tau, budget)?;
    let report = crt::omega_bounded_scan(&built, &inst, m_max, bound.unwrap_or(inst.omega_bound))
        .map_err(to_py_err)?;
    let rows = PyList::empty(py);
    for row in &report.rows {
        let d = PyDict::new(py);
        d.set_item("m", row.m)?;
        d.set_item("n", row.n.clone())?;
        d.set_item("omega_max", row.omega_max)?;
        d.set_item("qualified", row.qualified)?;
        rows.append(d)?;
    }
    let d = PyDict::new(py);
    d.set_item("rows", rows)?;
    d.set_item("hits", &report.hits)?;
    d.set_item("density_reference", report.density_reference)?;
    d.set_item("construction", construction_dict(py, &built)?)?;
    Ok(d)
}

/// Evaluates all 2k divisor sums at one n: does every upper form beat
/// every lower form?
#[pyfunction]
fn simultaneous_check<'py>(
    py: Python<'py>,
    lower: Vec<Bound<'py, PyAny>>,
    upper: Vec<Bound<'py, PyAny>>,
    n: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let inst =
        crt::build_instance(forms_from(&lower)?, forms_from(&upper)?).map_err(to_py_err)?;
    let evidence = crt::simultaneous_check(&inst, n).map_err(to_py_err)?;
    let side = |entries: &[crt::FormSigma]| -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty(py);
        for e in entries {
            let d = PyDict::new(py);
            d.set_item("form", &e.form)?;
            d.set_item("value", e.value)?;
            d.set_item("sigma", e.sigma.parse::<u128>().expect("decimal sigma"))?;
            out.append(d)?;
        }
        Ok(out)
    };
    let d = PyDict::new(py);
    d.set_item("n", evidence.n)?;
    d.set_item("holds", evidence.holds)?;
    d.set_item("lower", side(&evidence.lower)?)?;
    d.set_item("upper", side(&evidence.upper)?)?;
    Ok(d)
}

/// Budgeted hunt for m with sigma(2m+5) > sigma(6m+17) and
/// sigma(5m+4) > sigma(6m+7); every emitted witness is re-verified.
#[pyfunction]
#[pyo3(signature = (budget, slack=None))]
fn witness_hunt<'py>(
    py: Python<'py>,
    budget: u64,
    slack: Option<BigRational>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = hunt::witness_hunt(budget, slack).map_err(to_py_err)?;
    let witnesses = PyList::empty(py);
    for w in &report.witnesses {
        let d = PyDict::new(py);
        d.set_item("m", w.m)?;
        d.set_item("t", w.t)?;
        d.set_item("sigma_2m5", w.sigma_2m5.parse::<u128>().expect("decimal"))?;
        d.set_item("sigma_6m17", w.sigma_6m17.parse::<u128>().expect("decimal"))?;
        d.set_item("sigma_5m4", w.sigma_5m4.parse::<u128>().expect("decimal"))?;
        d.set_item("sigma_6m7", w.sigma_6m7.parse::<u128>().expect("decimal"))?;
        witnesses.append(d)?;
    }
    let candidates = PyList::empty(py);
    for c in &report.candidates {
        let d = PyDict::new(py);
        d.set_item("t", c.t)?;
        d.set_item("m", c.m)?;
        d.set_item("first_holds", c.first_holds)?;
        d.set_item("second_holds", c.second_holds)?;
        candidates.append(d)?;
    }
    let d = PyDict::new(py);
    d.set_item("witnesses", witnesses)?;
    d.set_item("candidates", candidates)?;
    d.set_item("examined", report.examined)?;
    d.set_item("budget_exhausted", report.budget_exhausted)?;
    Ok(d)
}

#[pymodule]
fn signlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLinearForm>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(divisors, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(euler_phi, m)?)?;
    m.add_function(wrap_pyfunction!(big_omega, m)?)?;
    m.add_function(wrap_pyfunction!(abundancy, m)?)?;
    m.add_function(wrap_pyfunction!(scan_signs, m)?)?;
    m.add_function(wrap_pyfunction!(phi_dominance_scan, m)?)?;
    m.add_function(wrap_pyfunction!(prime_in_ap, m)?)?;
    m.add_function(wrap_pyfunction!(min_odd_a, m)?)?;
    m.add_function(wrap_pyfunction!(slope_gap_holds, m)?)?;
    m.add_function(wrap_pyfunction!(two_sided_witnesses, m)?)?;
    m.add_function(wrap_pyfunction!(root_count, m)?)?;
    m.add_function(wrap_pyfunction!(local_factor, m)?)?;
    m.add_function(wrap_pyfunction!(beta_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(beta_enclosure, m)?)?;
    m.add_function(wrap_pyfunction!(predicted_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(partial_sums, m)?)?;
    m.add_function(wrap_pyfunction!(heath_brown_bound, m)?)?;
    m.add_function(wrap_pyfunction!(build_instance, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_residues, m)?)?;
    m.add_function(wrap_pyfunction!(prime_strings, m)?)?;
    m.add_function(wrap_pyfunction!(solve_congruences, m)?)?;
    m.add_function(wrap_pyfunction!(crt_construct, m)?)?;
    m.add_function(wrap_pyfunction!(omega_scan, m)?)?;
    m.add_function(wrap_pyfunction!(simultaneous_check, m)?)?;
    m.add_function(wrap_pyfunction!(witness_hunt, m)?)?;
    Ok(())
}
