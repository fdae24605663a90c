use std::f64::consts::PI;
use std::fmt;

use heralded_qutrit::cglmp::{
    optimize12, optimize_general, quantum_bound, sweep_fig4, Fig4Sweep,
};
use heralded_qutrit::circuits::{
    bell_pair, hbpg, herald_outcomes, herald_qutrit, herald_unbalanced, nest_qudit,
    nest_step_probability, pdc_qutrit_prob, pdc_rotated, pdc_rotated_closed_form, psi_d, teleport,
    unbalanced_qutrit, PdcParams, QutritAmplitudes, UnbalancedParams,
};
use heralded_qutrit::fock::fidelity;
use heralded_qutrit::matrix::TWO_PHOTON_BASIS;
use heralded_qutrit::{Complex64, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::output::{csv_string, flatten, fmt_f64, json_string, write_out};
use crate::{Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters: exit 2, like a usage error.
    Invalid(String),
    /// A self-check failed or output could not be written: exit 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid parameters: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
        }
    }
}

impl From<heralded_qutrit::Error> for CliError {
    fn from(e: heralded_qutrit::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Outcome of one command before formatting.
struct Report {
    params: Value,
    fields: Map<String, Value>,
    table: Option<(Vec<&'static str>, Vec<Vec<f64>>)>,
    checks: Vec<(&'static str, bool)>,
}

impl Report {
    fn new(params: Value) -> Self {
        Report {
            params,
            fields: Map::new(),
            table: None,
            checks: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.to_string(), value);
        self
    }

    fn check(&mut self, name: &'static str, ok: bool) -> &mut Self {
        self.checks.push((name, ok));
        self
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn normalized(s: &PureState) -> bool {
    s.is_normalized()
}

pub fn run(cli: &Cli) -> Result<()> {
    let (name, report) = match &cli.command {
        Command::Herald(a) => ("herald", herald(a.unbalanced, a.theta, a.phi)?),
        Command::Fig2(a) => ("fig2", fig2(a.phi, a.steps, a.theta_min, a.theta_max)?),
        Command::Fig4(a) => ("fig4", fig4(a.steps, (a.x_min, a.x_max), (a.y_min, a.y_max))?),
        Command::Pdc(a) => ("pdc", pdc(a.tau, a.d_max)?),
        Command::Nest(a) => ("nest", nest(a.d)?),
        Command::Teleport(a) => ("teleport", teleport_cmd(&a.input, cli.seed)?),
        Command::Hbpg => ("hbpg", hbpg_cmd()?),
        Command::Optimize(a) => ("optimize", optimize(a.multistart, a.general, cli.seed)?),
    };

    let mut doc = Map::new();
    doc.insert("command".into(), json!(name));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("seed".into(), json!(cli.seed));
    doc.insert("params".into(), report.params.clone());
    let checks: Map<String, Value> = report
        .checks
        .iter()
        .map(|(k, ok)| (k.to_string(), json!(ok)))
        .collect();
    doc.insert("checks".into(), Value::Object(checks));
    for (k, v) in &report.fields {
        doc.insert(k.clone(), v.clone());
    }
    let doc = Value::Object(doc);

    let text = match (cli.format, &report.table) {
        (Format::Json, _) => json_string(&doc) + "\n",
        (Format::Csv, Some((header, rows))) => {
            // The table goes to the output; the summary goes to stderr.
            eprintln!("{}", json_string(&doc));
            csv_string(header, rows.iter().map(|r| r.iter().map(|&v| fmt_f64(v))))
        }
        (Format::Csv, None) => csv_string(
            &["field", "value"],
            flatten(&doc).into_iter().map(|(k, v)| [k, v]),
        ),
    };
    write_out(cli.out.as_deref(), &text)
        .map_err(|e| CliError::Failed(format!("cannot write output: {e}")))?;

    let failed: Vec<_> = report.checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("self-checks failed: {}", failed.join(", "))))
    }
}

fn amplitudes(state: &PureState) -> Vec<Complex64> {
    TWO_PHOTON_BASIS
        .iter()
        .map(|&k| state.amplitude_of(&[k, k]))
        .collect()
}

/// Removes the global phase so the first nonzero amplitude is real and
/// positive.
fn align_phase(amps: &[Complex64]) -> Vec<Complex64> {
    let phase = amps
        .iter()
        .find(|a| a.norm() > 1e-12)
        .map(|a| a.conj() / a.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    amps.iter().map(|a| a * phase).collect()
}

fn herald(unbalanced: bool, theta: f64, phi: f64) -> Result<Report> {
    let psi3 = psi_d(3)?;
    if !unbalanced {
        let r = herald_qutrit(&bell_pair(), &bell_pair())?;
        let total: f64 = herald_outcomes(&bell_pair(), &bell_pair())?.iter().map(|o| o.2).sum();
        let mut rep = Report::new(json!({ "unbalanced": false }));
        rep.set("probability", json!(r.probability))
            .set("fidelity_max_entangled", json!(fidelity(&r.state, &psi3)?))
            .set("state", to_value(&r.state))
            .check("normalized", normalized(&r.state))
            .check("outcomes_complete", (total - 1.0).abs() < 1e-12);
        return Ok(rep);
    }
    let p = UnbalancedParams::new(theta, phi);
    let r = herald_unbalanced(&p)?;
    let ab = heralded_qutrit::circuits::unbalanced_bell(&p);
    let total: f64 = herald_outcomes(&ab, &bell_pair())?.iter().map(|o| o.2).sum();
    let amps = align_phase(&amplitudes(&r.state));
    let mut rep = Report::new(json!({ "unbalanced": true, "theta": theta, "phi": phi }));
    rep.set("probability", json!(r.probability))
        .set("fidelity_max_entangled", json!(fidelity(&r.state, &psi3)?))
        .set("fidelity_closed_form", json!(fidelity(&r.state, &unbalanced_qutrit(&p))?))
        .set("n_prime", json!(p.n_prime()))
        .set("amplitudes", to_value(&amps))
        .set("middle_amplitude", json!(amps[1].norm()))
        .set("state", to_value(&r.state))
        .check("normalized", normalized(&r.state))
        .check("outcomes_complete", (total - 1.0).abs() < 1e-12);
    Ok(rep)
}

fn fig2(phi: f64, steps: usize, theta_min: f64, theta_max: f64) -> Result<Report> {
    if steps < 2 {
        return Err(CliError::Invalid("--steps must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(steps);
    let (mut worst_norm, mut worst_fid): (f64, f64) = (0.0, 0.0);
    for theta in heralded_qutrit::cglmp::linspace(theta_min, theta_max, steps) {
        let p = UnbalancedParams::new(theta, phi);
        let state = herald_unbalanced(&p)?.state;
        let amps = align_phase(&amplitudes(&state));
        // Signed amplitudes when the state is real up to a global phase,
        // magnitudes otherwise.
        let real = amps.iter().all(|a| a.im.abs() < 1e-12);
        let a: Vec<f64> = amps.iter().map(|a| if real { a.re } else { a.norm() }).collect();
        worst_norm = worst_norm.max((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs());
        worst_fid = worst_fid.max(1.0 - fidelity(&state, &unbalanced_qutrit(&p))?);
        rows.push(vec![theta, a[0], a[1], a[2]]);
    }
    let mut rep = Report::new(json!({
        "phi": phi, "steps": steps, "theta_min": theta_min, "theta_max": theta_max
    }));
    rep.set(
        "rows",
        Value::Array(
            rows.iter()
                .map(|r| json!({"theta": r[0], "a0": r[1], "a1": r[2], "a2": r[3]}))
                .collect(),
        ),
    )
    .check("rows_normalized", worst_norm < 1e-12)
    .check("matches_closed_form", worst_fid < 1e-12);
    rep.table = Some((vec!["theta", "a0", "a1", "a2"], rows));
    Ok(rep)
}

fn fig4(steps: usize, x: (f64, f64), y: (f64, f64)) -> Result<Report> {
    let sweep: Fig4Sweep = sweep_fig4(x, y, steps, &psi_d(3)?)?;
    let mut rep = Report::new(json!({
        "steps": steps, "x_min": x.0, "x_max": x.1, "y_min": y.0, "y_max": y.1
    }));
    rep.set("max", json!(sweep.max))
        .set("argmax", json!({"x": sweep.argmax.0, "y": sweep.argmax.1}))
        .set("rows", json!(sweep.values.len()))
        .check("finite", sweep.values.iter().all(|v| v.is_finite()))
        .check("below_quantum_bound", sweep.max <= quantum_bound() + 1e-9);
    rep.table = Some((
        vec!["x", "y", "I3"],
        sweep.rows().map(|(x, y, v)| vec![x, y, v]).collect(),
    ));
    Ok(rep)
}

fn pdc(tau: f64, d_max: u32) -> Result<Report> {
    let p = PdcParams::new(tau, d_max)?;
    let rotated = pdc_rotated(&p)?;
    let closed = pdc_rotated_closed_form(&p)?;
    let alpha: Vec<f64> = (1..=d_max).map(|d| p.alpha(d)).collect();
    let mut rep = Report::new(json!({ "tau": tau, "d_max": d_max }));
    rep.set("alpha", json!(alpha))
        .set("norm", json!(p.norm()))
        .set("qutrit_weight", json!(pdc_qutrit_prob(&p)?))
        .set("rotated_fidelity_closed_form", json!(fidelity(&rotated, &closed)?))
        .set("state", to_value(&rotated))
        .check("normalized", normalized(&rotated));
    Ok(rep)
}

fn nest(d: u32) -> Result<Report> {
    let n = nest_qudit(d)?;
    let last = *n.step_probabilities.last().expect("at least one step");
    let mut rep = Report::new(json!({ "d": d }));
    rep.set("step_probabilities", json!(n.step_probabilities))
        .set("step_probability", json!(last))
        .set("expected_step_probability", json!(nest_step_probability(d)))
        .set("cumulative_probability", json!(n.record.probability))
        .set("fidelity", json!(fidelity(&n.record.state, &psi_d(d)?)?))
        .set("photon_number", json!(n.record.state.definite_photon_number()))
        .set("state", to_value(&n.record.state))
        .check("normalized", normalized(&n.record.state))
        .check("step_formula", (last - nest_step_probability(d)).abs() < 1e-12);
    Ok(rep)
}

fn parse_input(spec: &str, seed: u64) -> Result<QutritAmplitudes> {
    let c = |x: f64| Complex64::new(x, 0.0);
    match spec {
        "0" | "1" | "2" => Ok(QutritAmplitudes::basis(spec.parse().expect("digit"))?),
        "plus" => Ok(QutritAmplitudes::new([c(1.0 / 3f64.sqrt()); 3])?),
        "random" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<Complex64> = (0..3)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0f64).sqrt(), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let n = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            Ok(QutritAmplitudes::new([raw[0] / n, raw[1] / n, raw[2] / n])?)
        }
        other => Err(CliError::Invalid(format!(
            "--input must be 0, 1, 2, plus or random, got {other:?}"
        ))),
    }
}

fn teleport_cmd(input: &str, seed: u64) -> Result<Report> {
    let q = parse_input(input, seed)?;
    let t = teleport(&q)?;
    let mut rep = Report::new(json!({ "input": input }));
    rep.set("input_amplitudes", to_value(&q))
        .set("conclusive_probability", json!(t.conclusive_probability))
        .set("four_photon_probability", json!(t.four_photon_probability))
        .set("patterns", to_value(&t.patterns))
        .check("probabilities_bounded", t.four_photon_probability <= 1.0 + 1e-12)
        .check(
            "conclusive_outputs_normalized",
            t.patterns
                .iter()
                .filter_map(|p| p.output)
                .all(|o| (o.norm_sqr() - 1.0).abs() < 1e-12),
        );
    Ok(rep)
}

fn hbpg_cmd() -> Result<Report> {
    let h = hbpg()?;
    let mut rep = Report::new(json!({}));
    rep.set("probability", json!(h.probability))
        .set("branches", to_value(&h.branches))
        .check("branches_normalized", h.branches.iter().all(|b| normalized(&b.state)))
        .check("probability_bounded", h.probability <= 1.0 + 1e-12);
    Ok(rep)
}

fn optimize(multistart: usize, general: bool, seed: u64) -> Result<Report> {
    let psi3 = psi_d(3)?;
    let mut rep = Report::new(json!({ "multistart": multistart, "general": general }));
    let value = if general {
        let g = optimize_general(multistart, seed, &psi3)?;
        rep.set("unitaries", to_value(&g.unitaries))
            .set("i3", json!(g.value))
            .set("evaluations", json!(g.evaluations));
        g.value
    } else {
        let o = optimize12(multistart, seed, &psi3)?;
        rep.set("settings", to_value(&o.settings))
            .set("i3", json!(o.i3))
            .set("evaluations", json!(o.evaluations));
        o.i3
    };
    rep.check("below_quantum_bound", value <= quantum_bound() + 1e-6);
    Ok(rep)
}
