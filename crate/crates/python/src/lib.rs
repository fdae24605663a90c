//! Python bindings: states, optical elements, detectors, the heralding
//! circuits and the CGLMP evaluator.

use heralded_qutrit::cglmp::{self, QutritSetting, SettingsQuartet};
use heralded_qutrit::circuits::{self, PdcParams, QutritAmplitudes, UnbalancedParams};
use heralded_qutrit::detection::{self, HeraldRecord};
use heralded_qutrit::elements;
use heralded_qutrit::fock;
use heralded_qutrit::{Complex64, PureState};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: heralded_qutrit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Sparse multi-mode polarization Fock state.
#[pyclass(name = "State", module = "hqutrit", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct State(PureState);

#[pymethods]
impl State {
    #[staticmethod]
    fn vacuum(modes: usize) -> PyResult<Self> {
        PureState::vacuum(modes).map(State).map_err(err)
    }

    /// Basis ket from per-mode `(m, n)` counts.
    #[staticmethod]
    fn basis(counts: Vec<(u32, u32)>) -> PyResult<Self> {
        PureState::basis(&counts).map(State).map_err(err)
    }

    /// Superposition from `[(counts, amplitude), ...]`; not renormalized.
    #[staticmethod]
    fn from_kets(kets: Vec<(Vec<(u32, u32)>, Complex64)>) -> PyResult<Self> {
        PureState::from_kets(kets).map(State).map_err(err)
    }

    #[getter]
    fn mode_count(&self) -> usize {
        self.0.mode_count()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn amplitude(&self, counts: Vec<(u32, u32)>) -> Complex64 {
        self.0.amplitude_of(&counts)
    }

    /// Entries in canonical order as `(counts, amplitude)` pairs.
    fn terms(&self) -> Vec<(Vec<(u32, u32)>, Complex64)> {
        self.0
            .iter()
            .map(|(o, a)| (o.modes().to_vec(), *a))
            .collect()
    }

    fn photon_number(&self) -> Option<u32> {
        self.0.definite_photon_number()
    }

    fn fidelity(&self, other: &State) -> PyResult<f64> {
        fock::fidelity(&self.0, &other.0).map_err(err)
    }

    fn tensor(&self, other: &State) -> State {
        State(self.0.tensor(&other.0))
    }

    fn normalized(&self) -> PyResult<State> {
        self.0.normalized().map(State).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("State({})", self.0)
    }
}

fn record<'py>(py: Python<'py>, r: HeraldRecord) -> PyResult<(f64, State)> {
    let _ = py;
    Ok((r.probability, State(r.state)))
}

#[pyfunction]
fn beam_splitter(state: &State, a: usize, c: usize) -> PyResult<State> {
    elements::apply_bs(&state.0, a, c).map(State).map_err(err)
}

#[pyfunction]
fn rotator(state: &State, mode: usize, theta: f64) -> PyResult<State> {
    elements::apply_rotator(&state.0, mode, theta).map(State).map_err(err)
}

#[pyfunction]
fn phase_shifter(state: &State, mode: usize, dh: f64, dv: f64) -> PyResult<State> {
    elements::apply_phase(&state.0, mode, dh, dv).map(State).map_err(err)
}

#[pyfunction]
fn polarizing_bs(state: &State, a: usize, b: usize) -> PyResult<State> {
    elements::apply_pbs(&state.0, a, b).map(State).map_err(err)
}

/// Vacuum outcome of a threshold detector: `(probability, state)`.
#[pyfunction]
fn threshold_null(py: Python<'_>, state: &State, mode: usize) -> PyResult<(f64, State)> {
    record(py, detection::threshold_null(&state.0, mode).map_err(err)?)
}

/// Projects modes onto photon counts and removes them.
#[pyfunction]
fn postselect(py: Python<'_>, state: &State, pattern: Vec<(usize, (u32, u32))>) -> PyResult<(f64, State)> {
    record(py, detection::postselect_pattern(&state.0, &pattern).map_err(err)?)
}

/// Joint photon-count distribution over `modes`.
#[pyfunction]
fn count_photons(state: &State, modes: Vec<usize>) -> PyResult<Vec<(Vec<(u32, u32)>, f64)>> {
    Ok(detection::count_photons_joint(&state.0, &modes)
        .map_err(err)?
        .into_iter()
        .collect())
}

#[pyfunction]
fn psi_d(d: u32) -> PyResult<State> {
    circuits::psi_d(d).map(State).map_err(err)
}

#[pyfunction]
fn bell_pair() -> State {
    State(circuits::bell_pair())
}

#[pyfunction]
fn herald_qutrit(py: Python<'_>, input_ab: &State, input_cd: &State) -> PyResult<(f64, State)> {
    record(py, circuits::herald_qutrit(&input_ab.0, &input_cd.0).map_err(err)?)
}

#[pyfunction]
fn herald_unbalanced(py: Python<'_>, theta: f64, phi: f64) -> PyResult<(f64, State)> {
    record(py, circuits::herald_unbalanced(&UnbalancedParams::new(theta, phi)).map_err(err)?)
}

#[pyfunction]
fn build_unbalanced_212(py: Python<'_>) -> PyResult<(f64, State)> {
    record(py, circuits::build_unbalanced_212().map_err(err)?)
}

/// `(step_probabilities, cumulative_probability, state)`.
#[pyfunction]
fn nest_qudit(d: u32) -> PyResult<(Vec<f64>, f64, State)> {
    let n = circuits::nest_qudit(d).map_err(err)?;
    Ok((n.step_probabilities, n.record.probability, State(n.record.state)))
}

#[pyfunction]
fn pdc_truncated(tau: f64, d_max: u32) -> PyResult<State> {
    let p = PdcParams::new(tau, d_max).map_err(err)?;
    circuits::pdc_truncated(&p).map(State).map_err(err)
}

#[pyfunction]
fn pdc_qutrit_prob(tau: f64, d_max: u32) -> PyResult<f64> {
    let p = PdcParams::new(tau, d_max).map_err(err)?;
    circuits::pdc_qutrit_prob(&p).map_err(err)
}

/// `(total_probability, [(pattern, probability, fidelity), ...])`.
#[pyfunction]
fn hbpg() -> PyResult<(f64, Vec<(Vec<(u32, u32)>, f64, f64)>)> {
    let h = circuits::hbpg().map_err(err)?;
    let branches = h
        .branches
        .into_iter()
        .map(|b| (b.pattern.to_vec(), b.probability, b.fidelity))
        .collect();
    Ok((h.probability, branches))
}

#[pyfunction]
fn teleport<'py>(py: Python<'py>, amplitudes: [Complex64; 3]) -> PyResult<Bound<'py, PyDict>> {
    let t = circuits::teleport(&QutritAmplitudes(amplitudes)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("conclusive_probability", t.conclusive_probability)?;
    d.set_item("four_photon_probability", t.four_photon_probability)?;
    let conclusive: Vec<(Vec<(u32, u32)>, f64, [Complex64; 3])> = t
        .patterns
        .iter()
        .filter_map(|p| p.output.map(|o| (p.counts.to_vec(), p.probability, o.0)))
        .collect();
    d.set_item("conclusive", conclusive)?;
    Ok(d)
}

type Setting = (f64, f64, f64);

fn setting(s: Setting) -> QutritSetting {
    QutritSetting::new(s.0, s.1, s.2)
}

fn quartet(a1: Setting, a2: Setting, b1: Setting, b2: Setting) -> SettingsQuartet {
    SettingsQuartet {
        a1: setting(a1),
        a2: setting(a2),
        b1: setting(b1),
        b2: setting(b2),
    }
}

/// Joint outcome table `p[a][b]` for settings `(theta, dH, dV)`.
#[pyfunction]
fn joint_probs(state: &State, sa: Setting, sb: Setting) -> PyResult<[[f64; 3]; 3]> {
    Ok(cglmp::joint_probs(&state.0, &setting(sa), &setting(sb)).map_err(err)?.0)
}

#[pyfunction]
fn i3(state: &State, a1: Setting, a2: Setting, b1: Setting, b2: Setting) -> PyResult<f64> {
    cglmp::i3(&quartet(a1, a2, b1, b2), &state.0).map_err(err)
}

#[pyfunction]
fn fig4_quartet(x: f64, y: f64) -> (Setting, Setting, Setting, Setting) {
    let q = SettingsQuartet::fig4(x, y);
    let t = |s: QutritSetting| (s.theta, s.dh, s.dv);
    (t(q.a1), t(q.a2), t(q.b1), t(q.b2))
}

/// `(max, (x, y))` of the two-parameter sweep on the maximally entangled
/// qutrit pair.
#[pyfunction]
#[pyo3(signature = (steps = 400))]
fn sweep_fig4(py: Python<'_>, steps: usize) -> PyResult<(f64, (f64, f64))> {
    let psi3 = circuits::psi_d(3).map_err(err)?;
    let s = py
        .detach(|| cglmp::sweep_fig4(cglmp::FIG4_RANGE, cglmp::FIG4_RANGE, steps, &psi3))
        .map_err(err)?;
    Ok((s.max, s.argmax))
}

/// `(i3, evaluations)` of the seeded 12-parameter search.
#[pyfunction]
#[pyo3(signature = (multistart = 50, seed = 0))]
fn optimize12(py: Python<'_>, multistart: usize, seed: u64) -> PyResult<(f64, usize)> {
    let psi3 = circuits::psi_d(3).map_err(err)?;
    let o = py
        .detach(|| cglmp::optimize12(multistart, seed, &psi3))
        .map_err(err)?;
    Ok((o.i3, o.evaluations))
}

#[pymodule]
fn hqutrit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(beam_splitter, m)?)?;
    m.add_function(wrap_pyfunction!(rotator, m)?)?;
    m.add_function(wrap_pyfunction!(phase_shifter, m)?)?;
    m.add_function(wrap_pyfunction!(polarizing_bs, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_null, m)?)?;
    m.add_function(wrap_pyfunction!(postselect, m)?)?;
    m.add_function(wrap_pyfunction!(count_photons, m)?)?;
    m.add_function(wrap_pyfunction!(psi_d, m)?)?;
    m.add_function(wrap_pyfunction!(bell_pair, m)?)?;
    m.add_function(wrap_pyfunction!(herald_qutrit, m)?)?;
    m.add_function(wrap_pyfunction!(herald_unbalanced, m)?)?;
    m.add_function(wrap_pyfunction!(build_unbalanced_212, m)?)?;
    m.add_function(wrap_pyfunction!(nest_qudit, m)?)?;
    m.add_function(wrap_pyfunction!(pdc_truncated, m)?)?;
    m.add_function(wrap_pyfunction!(pdc_qutrit_prob, m)?)?;
    m.add_function(wrap_pyfunction!(hbpg, m)?)?;
    m.add_function(wrap_pyfunction!(teleport, m)?)?;
    m.add_function(wrap_pyfunction!(joint_probs, m)?)?;
    m.add_function(wrap_pyfunction!(i3, m)?)?;
    m.add_function(wrap_pyfunction!(fig4_quartet, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_fig4, m)?)?;
    m.add_function(wrap_pyfunction!(optimize12, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
