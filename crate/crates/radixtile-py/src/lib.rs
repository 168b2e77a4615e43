//! Python bindings. Eventually periodic sequences cross the boundary as
//! `(pre, cycle)` tuples of integer lists; exact rationals as `"p/q"` strings.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use radixtile::intersect::{self, TranslateSpec};
use radixtile::multinv::{self, DigitAutomaton, NumberSystem};
use radixtile::neighbours;
use radixtile::numsys;
use radixtile::radix;
use radixtile::sep::{self, make_set, DigitSet};
use radixtile::{EpSeq, IntMatrix, IntVec};

create_exception!(radixtile, BudgetExceeded, PyValueError, "A search or enumeration cap was hit.");

fn err(e: radixtile::Error) -> PyErr {
    if e.is_budget() {
        BudgetExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for radixtile::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

type Seq = (Vec<IntVec>, Vec<IntVec>);
type SetSeq = (Vec<Vec<IntVec>>, Vec<Vec<IntVec>>);

fn seq_in(s: Seq) -> PyResult<EpSeq<IntVec>> {
    EpSeq::new(s.0, s.1).py()
}

fn seq_out(s: &EpSeq<IntVec>) -> Seq {
    (s.pre().to_vec(), s.cycle().to_vec())
}

fn sets_in(s: SetSeq) -> PyResult<EpSeq<DigitSet>> {
    EpSeq::new(s.0.into_iter().map(make_set).collect(), s.1.into_iter().map(make_set).collect()).py()
}

fn sets_out(s: &EpSeq<DigitSet>) -> SetSeq {
    (s.pre().to_vec(), s.cycle().to_vec())
}

fn rat_strings(v: &[num_rational::BigRational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// An expanding integer matrix with a digit set.
#[pyclass(name = "RadixSystem", module = "radixtile", frozen)]
struct PyRadixSystem {
    inner: radixtile::RadixSystem,
}

#[pymethods]
impl PyRadixSystem {
    #[new]
    fn new(matrix: Vec<Vec<i64>>, digits: Vec<IntVec>) -> PyResult<Self> {
        let a = IntMatrix::from_rows(&matrix).py()?;
        Ok(PyRadixSystem { inner: radixtile::RadixSystem::new(a, digits).py()? })
    }

    /// Companion matrix of a monic polynomial (constant term first), digits `d·e1`.
    #[staticmethod]
    fn companion(coeffs: Vec<i64>, digits: Vec<i64>) -> PyResult<Self> {
        Ok(PyRadixSystem { inner: numsys::companion_system(&coeffs, &digits).py()? })
    }

    /// Base `re + im·i` on `Z^2` with digits `d·e1`.
    #[staticmethod]
    fn gaussian(re: i64, im: i64, digits: Vec<i64>) -> PyResult<Self> {
        Ok(PyRadixSystem { inner: radixtile::RadixSystem::gaussian(re, im, &digits).py()? })
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<i64>> {
        self.inner.matrix().rows()
    }

    #[getter]
    fn digits(&self) -> Vec<IntVec> {
        self.inner.digits().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn is_number_system(&self) -> PyResult<(bool, Vec<Vec<IntVec>>)> {
        numsys::is_number_system(&self.inner).py()
    }

    /// Least-significant-first expansion of an integer vector.
    fn expand(&self, v: IntVec) -> PyResult<Vec<IntVec>> {
        numsys::discrete_expansion(&self.inner, &v).py()
    }

    fn neighbours(&self) -> PyResult<Vec<IntVec>> {
        Ok(neighbours::system_neighbours(&self.inner).py()?.vectors)
    }

    fn neighbour_graph_dot(&self) -> PyResult<String> {
        Ok(neighbours::neighbour_graph(&self.inner).py()?.to_dot())
    }

    fn triple_graph_dot(&self) -> PyResult<String> {
        Ok(neighbours::triple_state_graph(&self.inner).py()?.to_dot())
    }

    fn representations_unique(&self) -> PyResult<bool> {
        radix::representations_unique(&self.inner).py()
    }

    /// Exact value of a representation as `"p/q"` strings.
    fn eval(&self, x: Seq) -> PyResult<Vec<String>> {
        Ok(rat_strings(&radix::eval_exact(&self.inner, &seq_in(x)?).py()?))
    }

    fn equivalent(&self, x: Seq, y: Seq) -> PyResult<bool> {
        radix::equivalent(&self.inner, &seq_in(x)?, &seq_in(y)?).py()
    }

    fn is_neighbour_sequence(&self, x: Seq, y: Seq) -> PyResult<bool> {
        radix::is_neighbour_sequence(&self.inner, &seq_in(x)?, &seq_in(y)?).py()
    }

    /// `(class, representations)`; the list is complete for finite classes.
    #[pyo3(signature = (x, limit = 16))]
    fn enumerate_equivalents(&self, x: Seq, limit: usize) -> PyResult<(String, Vec<Seq>)> {
        let (c, reps) = radix::enumerate_equivalents(&self.inner, &seq_in(x)?, limit).py()?;
        Ok((c.name().to_string(), reps.iter().map(seq_out).collect()))
    }

    fn __repr__(&self) -> String {
        format!("RadixSystem(matrix={:?}, digits={:?})", self.inner.matrix().rows(), self.inner.digits())
    }
}

/// `T ∩ (T + α)` for one translation.
#[pyclass(name = "Intersection", module = "radixtile", frozen)]
struct PyIntersection {
    spec: TranslateSpec,
    seq: EpSeq<DigitSet>,
}

#[pymethods]
impl PyIntersection {
    /// `assume_unique` skips the check that `alpha` is the only representation.
    #[new]
    #[pyo3(signature = (system, alpha, assume_unique = false))]
    fn new(system: &PyRadixSystem, alpha: Seq, assume_unique: bool) -> PyResult<Self> {
        let a = seq_in(alpha)?;
        let spec = if assume_unique {
            TranslateSpec::waived(system.inner.clone(), a)
        } else {
            TranslateSpec::new(system.inner.clone(), a)
        }
        .py()?;
        let seq = intersect::intersection_sequence(&spec).py()?;
        Ok(PyIntersection { spec, seq })
    }

    #[getter]
    fn sequence(&self) -> SetSeq {
        sets_out(&self.seq)
    }

    /// SEP block length, or `None`.
    fn sep_block(&self) -> PyResult<Option<usize>> {
        Ok(sep::is_sep_sets_translated(self.spec.system.digits(), &self.seq, None).py()?.map(|w| w.p))
    }

    /// IFS offsets as `"p/q"` vectors and whether the SSC holds.
    fn ifs(&self) -> PyResult<Option<(Vec<Vec<String>>, bool)>> {
        let Some(w) = sep::is_sep_sets_translated(self.spec.system.digits(), &self.seq, None).py()? else {
            return Ok(None);
        };
        let ifs = intersect::build_ifs(&self.spec, &w).py()?;
        Ok(Some((ifs.offsets.iter().map(|o| rat_strings(o)).collect(), intersect::check_ssc(&w).py()?)))
    }

    /// `(exact, float)` box dimension.
    fn box_dimension(&self) -> PyResult<(String, f64)> {
        let d = intersect::box_dimension_ep(&self.spec.system, &self.seq).py()?;
        Ok((d.exact.to_string(), d.float))
    }

    /// `(exact, float)` Hausdorff dimension when the sequence is SEP.
    fn hausdorff_dimension(&self) -> PyResult<Option<(String, f64)>> {
        let Some(w) = sep::is_sep_sets_translated(self.spec.system.digits(), &self.seq, None).py()? else {
            return Ok(None);
        };
        let d = intersect::hausdorff_dimension_sep(&self.spec.system, &w).py()?;
        Ok(Some((d.exact.to_string(), d.float)))
    }
}

/// SEP witness `(P, B, C)` for an integer sequence, or `None`.
#[pyfunction]
fn sep_int(pre: Vec<i64>, cycle: Vec<i64>) -> PyResult<Option<(usize, Vec<i64>, Vec<i64>)>> {
    let s = EpSeq::new(pre, cycle).py()?;
    Ok(sep::is_sep_int(&s).map(|w| (w.p, w.b, w.c)))
}

/// SEP block length of a digit-set sequence over `digits`, or `None`.
#[pyfunction]
#[pyo3(signature = (digits, sequence, bound = None))]
fn sep_sets(digits: Vec<IntVec>, sequence: SetSeq, bound: Option<usize>) -> PyResult<Option<usize>> {
    Ok(sep::is_sep_sets_translated(&digits, &sets_in(sequence)?, bound).py()?.map(|w| w.p))
}

/// `(hausdorff, box)` of a Bedford–McMullen carpet on an `m × n` grid.
#[pyfunction]
fn bm_dimensions(m: u64, n: u64, digits: Vec<IntVec>) -> PyResult<(f64, f64)> {
    let d = intersect::bm_dimensions(m, n, &digits).py()?;
    Ok((d.hausdorff, d.box_dim))
}

/// `(k, distance, bound)` rows of `d_H(X_k, X_{k+1})` for the restriction
/// of a number system to `allowed` digits.
#[pyfunction]
#[pyo3(signature = (system, allowed, kmax, cap = multinv::DEFAULT_CLOUD_CAP))]
fn restriction_convergence(system: &PyRadixSystem, allowed: Vec<IntVec>, kmax: usize, cap: usize) -> PyResult<Vec<(usize, f64, f64)>> {
    let ns = NumberSystem::new(system.inner.clone()).py()?;
    let e = DigitAutomaton::restriction(ns.system().digits(), &allowed).py()?;
    let r = multinv::convergence_report(&ns, &e, kmax, cap).py()?;
    Ok(r.rows.iter().map(|row| (row.k, row.distance, row.bound)).collect())
}

#[pymodule(name = "radixtile")]
fn radixtile_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRadixSystem>()?;
    m.add_class::<PyIntersection>()?;
    m.add_function(wrap_pyfunction!(sep_int, m)?)?;
    m.add_function(wrap_pyfunction!(sep_sets, m)?)?;
    m.add_function(wrap_pyfunction!(bm_dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(restriction_convergence, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
