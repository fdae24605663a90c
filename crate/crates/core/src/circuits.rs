//! Heralded entangled-state constructions built from [`crate::elements`]
//! and [`crate::detection`].
//!
//! Mode conventions: two-party states live in modes `A = 0`, `B = 1`;
//! ancilla pairs are appended as `C = 2`, `D = 3`. A qudit level `i` of a
//! `d`-level state is the ket `|d−1−i, i⟩` (`d − 1` photons in one mode).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detection::{
    count_photons_joint, postselect_pattern, threshold_null, HeraldRecord,
};
use crate::elements::{apply_bs, apply_pbs, apply_phase, apply_rotator};
use crate::error::{invalid, Error, Result};
use crate::fock::{fidelity, Occupation, PureState};
use crate::matrix::TWO_PHOTON_BASIS;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(1/√d) Σᵢ |d−1−i, i⟩_A |d−1−i, i⟩_B`; `d = 1` is the vacuum.
pub fn psi_d(d: u32) -> Result<PureState> {
    if d == 0 {
        return Err(invalid("qudit dimension must be at least 1"));
    }
    let a = c(1.0 / f64::from(d).sqrt());
    PureState::from_kets((0..d).map(|i| (vec![(d - 1 - i, i), (d - 1 - i, i)], a)))
}

/// Polarization-anticorrelated PDC component
/// `(1/√d) Σᵢ (−1)ⁱ |d−1−i, i⟩_A |i, d−1−i⟩_B`.
pub fn psi_minus_d(d: u32) -> Result<PureState> {
    if d == 0 {
        return Err(invalid("qudit dimension must be at least 1"));
    }
    let a = 1.0 / f64::from(d).sqrt();
    PureState::from_kets((0..d).map(|i| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        (vec![(d - 1 - i, i), (i, d - 1 - i)], c(sign * a))
    }))
}

/// The Bell pair `(|1,0⟩|1,0⟩ + |0,1⟩|0,1⟩)/√2`.
pub fn bell_pair() -> PureState {
    psi_d(2).expect("d = 2")
}

/// Truncated type-II PDC source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdcParams {
    pub tau: f64,
    pub d_max: u32,
}

impl PdcParams {
    pub fn new(tau: f64, d_max: u32) -> Result<Self> {
        let p = PdcParams { tau, d_max };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(invalid(format!("tau must be finite and ≥ 0, got {}", self.tau)));
        }
        if !(1..=4).contains(&self.d_max) {
            return Err(invalid(format!("d_max must be in 1..=4, got {}", self.d_max)));
        }
        Ok(())
    }

    /// `α_d = tanh^{d−1}τ / cosh²τ`.
    pub fn alpha(&self, d: u32) -> f64 {
        pdc_alpha(self.tau, d)
    }

    /// `N = Σ_{d ≤ d_max} d α_d²`.
    pub fn norm(&self) -> f64 {
        (1..=self.d_max)
            .map(|d| f64::from(d) * self.alpha(d).powi(2))
            .sum()
    }
}

pub fn pdc_alpha(tau: f64, d: u32) -> f64 {
    tau.tanh().powi(d as i32 - 1) / tau.cosh().powi(2)
}

/// `(1/√N) Σ_d √d α_d |ψ⁻_d⟩`.
pub fn pdc_truncated(p: &PdcParams) -> Result<PureState> {
    p.validate()?;
    let n = p.norm().sqrt();
    let mut state = PureState::zero(2);
    for d in 1..=p.d_max {
        let w = f64::from(d).sqrt() * p.alpha(d) / n;
        state = state.add(&psi_minus_d(d)?.scaled(c(w)))?;
    }
    Ok(state)
}

/// The truncated PDC state after `U(π/2)` on mode B.
pub fn pdc_rotated(p: &PdcParams) -> Result<PureState> {
    apply_rotator(&pdc_truncated(p)?, 1, FRAC_PI_2)
}

/// Closed form of [`pdc_rotated`]: `(1/√N) Σ_d (−1)^{d−1} √d α_d |ψ^d⟩`.
pub fn pdc_rotated_closed_form(p: &PdcParams) -> Result<PureState> {
    p.validate()?;
    let n = p.norm().sqrt();
    let mut state = PureState::zero(2);
    for d in 1..=p.d_max {
        let sign = if d % 2 == 1 { 1.0 } else { -1.0 };
        let w = sign * f64::from(d).sqrt() * p.alpha(d) / n;
        state = state.add(&psi_d(d)?.scaled(c(w)))?;
    }
    Ok(state)
}

/// Probability of finding the four-photon (qutrit) component, `3α₃²/N`.
pub fn pdc_qutrit_prob(p: &PdcParams) -> Result<f64> {
    p.validate()?;
    if p.d_max < 3 {
        return Ok(0.0);
    }
    Ok(3.0 * p.alpha(3).powi(2) / p.norm())
}

/// Component of `state` with exactly `photons` photons in total.
pub fn photon_number_component(state: &PureState, photons: u32) -> PureState {
    state.filter(|o| o.total() == photons)
}

/// Parameters of `cosϑ|1,0⟩|1,0⟩ + e^{iφ} sinϑ|0,1⟩|0,1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbalancedParams {
    pub theta: f64,
    pub phi: f64,
}

impl UnbalancedParams {
    pub fn new(theta: f64, phi: f64) -> Self {
        UnbalancedParams { theta, phi }
    }

    /// Normalization `N′ = (5 + cosφ sin2ϑ)/4` of the heralded state.
    pub fn n_prime(&self) -> f64 {
        (5.0 + self.phi.cos() * (2.0 * self.theta).sin()) / 4.0
    }
}

pub fn unbalanced_bell(p: &UnbalancedParams) -> PureState {
    PureState::from_kets([
        (vec![(1, 0), (1, 0)], c(p.theta.cos())),
        (vec![(0, 1), (0, 1)], Complex64::from_polar(p.theta.sin(), p.phi)),
    ])
    .expect("two terms")
}

/// Expected heralded output of [`herald_unbalanced`] in closed form.
pub fn unbalanced_qutrit(p: &UnbalancedParams) -> PureState {
    let (s, co) = p.theta.sin_cos();
    let e = Complex64::from_polar(1.0, p.phi);
    let n = p.n_prime().sqrt();
    PureState::from_kets([
        (vec![(2, 0), (2, 0)], c(co / n)),
        (vec![(1, 1), (1, 1)], (c(co) + e * s) / (2.0 * n)),
        (vec![(0, 2), (0, 2)], e * s / n),
    ])
    .expect("three terms")
}

/// `(|2,0⟩|2,0⟩ − |0,2⟩|0,2⟩)/√2`, the `φ = π`, `ϑ = π/4` output.
pub fn qutrit_bell_minus() -> PureState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_kets([(vec![(2, 0), (2, 0)], c(r)), (vec![(0, 2), (0, 2)], c(-r))])
        .expect("two terms")
}

/// `(|2,0⟩|2,0⟩ + |0,2⟩|0,2⟩)/√2`.
pub fn qutrit_bell_plus() -> PureState {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_kets([(vec![(2, 0), (2, 0)], c(r)), (vec![(0, 2), (0, 2)], c(r))])
        .expect("two terms")
}

/// `(2|00⟩ + |11⟩ + 2|22⟩)/3` in the two-photon encoding.
pub fn unbalanced_212() -> PureState {
    PureState::from_kets([
        (vec![(2, 0), (2, 0)], c(2.0 / 3.0)),
        (vec![(1, 1), (1, 1)], c(1.0 / 3.0)),
        (vec![(0, 2), (0, 2)], c(2.0 / 3.0)),
    ])
    .expect("three terms")
}

/// Ancilla `(4|1,0⟩|1,0⟩ + |0,1⟩|0,1⟩)/√17` consumed by [`build_unbalanced_212`].
pub fn ancilla_41() -> PureState {
    let n = 17f64.sqrt();
    PureState::from_kets([(vec![(1, 0), (1, 0)], c(4.0 / n)), (vec![(0, 1), (0, 1)], c(1.0 / n))])
        .expect("two terms")
}

fn check_pair_input(state: &PureState, name: &str) -> Result<u32> {
    if state.mode_count() != 2 {
        return Err(invalid(format!("{name} must have two modes, got {}", state.mode_count())));
    }
    state.check_normalized()?;
    state
        .definite_photon_number()
        .ok_or_else(|| invalid(format!("{name} must have a definite photon number")))
}

/// Unnormalized AB branch of the null-null outcome: the inputs occupy
/// `A, B` and `C, D`, beam splitters mix `A` with `C` and `B` with `D`,
/// and both `C` and `D` are projected onto vacuum and removed.
pub fn herald_projection(input_ab: &PureState, input_cd: &PureState) -> Result<PureState> {
    check_pair_input(input_ab, "AB input")?;
    check_pair_input(input_cd, "CD input")?;
    let mixed = mix_ac_bd(input_ab, input_cd)?;
    mixed
        .filter(|o| o.mode(2) == (0, 0) && o.mode(3) == (0, 0))
        .remove_mode(3)?
        .remove_mode(2)
}

fn mix_ac_bd(ab: &PureState, cd: &PureState) -> Result<PureState> {
    apply_bs(&apply_bs(&ab.tensor(cd), 0, 2)?, 1, 3)
}

/// Mixes two photon pairs on beam splitters and heralds on two null
/// detections in the ancilla modes.
pub fn herald_qutrit(input_ab: &PureState, input_cd: &PureState) -> Result<HeraldRecord> {
    check_pair_input(input_ab, "AB input")?;
    check_pair_input(input_cd, "CD input")?;
    let mixed = mix_ac_bd(input_ab, input_cd)?;
    let r = threshold_null(&mixed, 2)?.then(|s| threshold_null(s, 3))?;
    let state = if r.is_possible() {
        r.state.remove_mode(3)?.remove_mode(2)?
    } else {
        PureState::zero(2)
    };
    Ok(HeraldRecord { state, ..r })
}

/// Full distribution of ancilla outcomes for the [`herald_qutrit`] circuit,
/// keyed by the `(C, D)` photon counts.
pub fn herald_outcomes(
    input_ab: &PureState,
    input_cd: &PureState,
) -> Result<Vec<((u32, u32), (u32, u32), f64)>> {
    check_pair_input(input_ab, "AB input")?;
    check_pair_input(input_cd, "CD input")?;
    let mixed = mix_ac_bd(input_ab, input_cd)?;
    Ok(count_photons_joint(&mixed, &[2, 3])?
        .into_iter()
        .map(|(k, p)| (k[0], k[1], p))
        .collect())
}

/// [`herald_qutrit`] fed with an unbalanced Bell pair in `A, B` and a
/// balanced one in `C, D`.
pub fn herald_unbalanced(p: &UnbalancedParams) -> Result<HeraldRecord> {
    herald_qutrit(&unbalanced_bell(p), &bell_pair())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedQudit {
    pub record: HeraldRecord,
    /// Heralding probability of each step, producing `d = 3, 4, …`.
    pub step_probabilities: Vec<f64>,
}

/// Closed-form step probability `d(d−1)/2^{2d−1}`.
pub fn nest_step_probability(d: u32) -> f64 {
    f64::from(d * (d - 1)) / 2f64.powi(2 * d as i32 - 1)
}

/// Grows `|ψ^d⟩` from a Bell pair by repeating [`herald_qutrit`] with a
/// fresh Bell pair in `C, D` at every step.
pub fn nest_qudit(d: u32) -> Result<NestedQudit> {
    if !(3..=6).contains(&d) {
        return Err(invalid(format!("d must be in 3..=6, got {d}")));
    }
    let bell = bell_pair();
    let mut record = HeraldRecord {
        probability: 1.0,
        state: bell.clone(),
        outcome: String::new(),
    };
    let mut steps = Vec::new();
    for level in 3..=d {
        let step = herald_qutrit(&record.state, &bell)?;
        steps.push(step.probability);
        record = HeraldRecord {
            probability: record.probability * step.probability,
            state: step.state,
            outcome: if record.outcome.is_empty() {
                format!("d={level}")
            } else {
                format!("{}; d={level}", record.outcome)
            },
        };
    }
    Ok(NestedQudit {
        record,
        step_probabilities: steps,
    })
}

/// One accepted detector pattern of the single-photon Bell-pair source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HbpgBranch {
    /// Counts in the two fusion detectors.
    pub pattern: [(u32, u32); 2],
    pub probability: f64,
    /// Conditional state of the two output modes.
    pub state: PureState,
    /// Phase applied to the vertical polarization of the first output mode.
    pub correction: f64,
    /// Probability mass, within this branch, of one photon per output mode.
    pub bell_weight: f64,
    /// Fidelity of the corrected state with [`bell_pair`].
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hbpg {
    pub probability: f64,
    pub branches: Vec<HbpgBranch>,
}

/// Heralded Bell-pair generation from four horizontally polarized single
/// photons.
///
/// Modes `0..4` are `A₁, A₁′, B₁, B₁′`. Every photon passes a `U(π/4)`,
/// `A₁/A₁′` and `B₁/B₁′` meet on PBSs, then `A₁` and `B₁′` are fused on a
/// PBS followed by `U(π/4)` on both and detected. Each detector must see
/// exactly one photon; the pair is left in `A₁′, B₁`.
pub fn hbpg() -> Result<Hbpg> {
    let mut s = PureState::basis(&[(1, 0); 4])?;
    for m in 0..4 {
        s = apply_rotator(&s, m, FRAC_PI_4)?;
    }
    s = apply_pbs(&s, 0, 1)?;
    s = apply_pbs(&s, 2, 3)?;
    s = apply_pbs(&s, 0, 3)?;
    s = apply_rotator(&s, 0, FRAC_PI_4)?;
    s = apply_rotator(&s, 3, FRAC_PI_4)?;

    let target = bell_pair();
    let singles = [(1, 0), (0, 1)];
    let mut branches = Vec::new();
    for p0 in singles {
        for p3 in singles {
            let r = postselect_pattern(&s, &[(0, p0), (3, p3)])?;
            if !r.is_possible() {
                continue;
            }
            let hh = r.state.amplitude_of(&[(1, 0), (1, 0)]);
            let vv = r.state.amplitude_of(&[(0, 1), (0, 1)]);
            let bell_weight = hh.norm_sqr() + vv.norm_sqr();
            let correction = if hh.norm() > 0.0 && vv.norm() > 0.0 {
                (hh / vv).arg()
            } else {
                0.0
            };
            let corrected = apply_phase(&r.state, 0, 0.0, correction)?;
            branches.push(HbpgBranch {
                pattern: [p0, p3],
                probability: r.probability,
                fidelity: fidelity(&corrected, &target)?,
                state: r.state,
                correction,
                bell_weight,
            });
        }
    }
    Ok(Hbpg {
        probability: branches.iter().map(|b| b.probability).sum(),
        branches,
    })
}

/// Turns `(|2,0⟩|2,0⟩ − |0,2⟩|0,2⟩)/√2` into the `+` combination.
///
/// Mode A's vertical photons are routed by a PBS into an auxiliary path,
/// delayed by a quarter wave per photon, and recombined on a second PBS.
pub fn fix_relative_phase(state: &PureState) -> Result<PureState> {
    let n = state.mode_count();
    let aux = n;
    let mut s = state.with_vacuum_modes(1);
    s = apply_pbs(&s, 0, aux)?;
    s = apply_phase(&s, aux, 0.0, FRAC_PI_2)?;
    s = apply_pbs(&s, 0, aux)?;
    if s.iter().any(|(o, _)| o.mode(aux) != (0, 0)) {
        return Err(invalid("auxiliary path not emptied by recombination"));
    }
    s.remove_mode(aux)
}

/// Builds `(2|00⟩ + |11⟩ + 2|22⟩)/3` from `(|00⟩ − |22⟩)/√2`: phase fix,
/// then mixing with [`ancilla_41`] and detection of one horizontal photon
/// in each ancilla mode.
pub fn build_unbalanced_212() -> Result<HeraldRecord> {
    let fixed = fix_relative_phase(&qutrit_bell_minus())?;
    let f = fidelity(&fixed, &qutrit_bell_plus())?;
    if (f - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("phase fix reached fidelity {f} only")));
    }
    let mixed = mix_ac_bd(&fixed, &ancilla_41())?;
    postselect_pattern(&mixed, &[(2, (1, 0)), (3, (1, 0))])
}

/// Amplitudes of a single qutrit in the two-photon encoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QutritAmplitudes(pub [Complex64; 3]);

impl QutritAmplitudes {
    pub fn new(amps: [Complex64; 3]) -> Result<Self> {
        let q = QutritAmplitudes(amps);
        let n = q.norm_sqr();
        if (n - 1.0).abs() > crate::fock::NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(q)
    }

    pub fn basis(level: usize) -> Result<Self> {
        if level > 2 {
            return Err(invalid(format!("qutrit level must be 0..=2, got {level}")));
        }
        let mut a = [Complex64::default(); 3];
        a[level] = c(1.0);
        Ok(QutritAmplitudes(a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QutritAmplitudes) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Single-mode state `Σ aᵢ |2−i, i⟩`.
    pub fn to_state(&self) -> PureState {
        PureState::from_terms(
            1,
            TWO_PHOTON_BASIS
                .iter()
                .zip(self.0)
                .map(|(&k, a)| (Occupation::new(vec![k]), a)),
        )
        .expect("one mode")
    }
}

type Mat3 = [[Complex64; 3]; 3];

/// One four-photon detection pattern on modes `B, C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportPattern {
    pub counts: [(u32, u32); 2],
    pub probability: f64,
    /// Whether the pattern maps inputs onto mode A isometrically, so a
    /// fixed correction recovers every input.
    pub conclusive: bool,
    /// Corrected output on mode A (conclusive patterns only).
    pub output: Option<QutritAmplitudes>,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Teleport {
    pub conclusive_probability: f64,
    /// Probability of detecting four photons in B and C at all.
    pub four_photon_probability: f64,
    pub patterns: Vec<TeleportPattern>,
}

/// Runs the teleportation circuit: resource [`unbalanced_212`] in `A, B`,
/// input qutrit in `C`, PBS on `B, C`, `U(π/4)` on both, then photon
/// counting on `B` and `C`. Returns, for every four-photon pattern, the
/// unnormalized mode-A amplitudes.
fn teleport_branches(input: &QutritAmplitudes) -> Result<Vec<([(u32, u32); 2], [Complex64; 3])>> {
    let mut s = unbalanced_212().tensor(&input.to_state());
    s = apply_pbs(&s, 1, 2)?;
    s = apply_rotator(&s, 1, FRAC_PI_4)?;
    s = apply_rotator(&s, 2, FRAC_PI_4)?;
    let mut out: std::collections::BTreeMap<[(u32, u32); 2], [Complex64; 3]> = Default::default();
    for (o, a) in s.iter() {
        let (b, cc) = (o.mode(1), o.mode(2));
        if b.0 + b.1 + cc.0 + cc.1 != 4 {
            continue;
        }
        let level = TWO_PHOTON_BASIS
            .iter()
            .position(|&k| k == o.mode(0))
            .ok_or_else(|| invalid("mode A left outside the qutrit encoding"))?;
        out.entry([b, cc]).or_default()[level] += *a;
    }
    Ok(out.into_iter().collect())
}

/// Per-pattern maps `K[a][j]` from input level `j` to mode-A level `a`,
/// obtained by running the three basis inputs.
fn teleport_kraus() -> Result<Vec<([(u32, u32); 2], Mat3)>> {
    let mut maps: std::collections::BTreeMap<[(u32, u32); 2], Mat3> = Default::default();
    for j in 0..3 {
        for (pattern, amps) in teleport_branches(&QutritAmplitudes::basis(j)?)? {
            let k = maps.entry(pattern).or_default();
            for a in 0..3 {
                k[a][j] = amps[a];
            }
        }
    }
    Ok(maps.into_iter().collect())
}

/// `Some(c)` when `K†K = c·I` with `c > 0`.
fn isometry_scale(k: &Mat3) -> Option<f64> {
    let mut g = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (0..3).map(|a| k[a][i].conj() * k[a][j]).sum();
        }
    }
    let scale = g[0][0].re;
    if scale <= 1e-14 {
        return None;
    }
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { scale } else { 0.0 };
            if (g[i][j] - want).norm() > 1e-12 {
                return None;
            }
        }
    }
    Some(scale)
}

/// Teleports a qutrit through the [`unbalanced_212`] resource.
///
/// A four-photon pattern is conclusive when its map from input to mode A
/// is proportional to a unitary; the correction is the inverse of that
/// unitary, fixed per pattern from the three basis inputs.
pub fn teleport(input: &QutritAmplitudes) -> Result<Teleport> {
    let n = input.norm_sqr();
    if (n - 1.0).abs() > crate::fock::NORM_TOLERANCE {
        return Err(Error::NotNormalized(n));
    }
    let kraus: std::collections::BTreeMap<_, _> = teleport_kraus()?.into_iter().collect();
    let mut patterns = Vec::new();
    let (mut conclusive_probability, mut four_photon_probability) = (0.0, 0.0);
    for (counts, amps) in teleport_branches(input)? {
        let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        four_photon_probability += probability;
        let scale = kraus.get(&counts).and_then(isometry_scale);
        let (output, fid) = match (scale, probability > 1e-14) {
            (Some(scale), true) => {
                let k = &kraus[&counts];
                // K/√c is unitary, so its adjoint undoes it.
                let mut corrected = [Complex64::default(); 3];
                for (j, slot) in corrected.iter_mut().enumerate() {
                    *slot = (0..3).map(|a| k[a][j].conj() * amps[a]).sum::<Complex64>()
                        / (scale * probability).sqrt();
                }
                let out = QutritAmplitudes(corrected);
                conclusive_probability += probability;
                (Some(out), Some(out.fidelity(input)))
            }
            _ => (None, None),
        };
        patterns.push(TeleportPattern {
            counts,
            probability,
            conclusive: scale.is_some(),
            output,
            fidelity: fid,
        });
    }
    Ok(Teleport {
        conclusive_probability,
        four_photon_probability,
        patterns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn psi_d_shapes() {
        assert_eq!(psi_d(1).unwrap(), PureState::vacuum(2).unwrap());
        let p3 = psi_d(3).unwrap();
        assert_eq!(p3.len(), 3);
        assert!(p3.is_normalized());
        assert_eq!(p3.definite_photon_number(), Some(4));
        assert!(psi_d(0).is_err());
    }

    #[test]
    fn pdc_at_zero_tau_is_vacuum() {
        let p = PdcParams::new(0.0, 3).unwrap();
        assert_eq!(pdc_truncated(&p).unwrap(), PureState::vacuum(2).unwrap());
        assert_eq!(pdc_qutrit_prob(&p).unwrap(), 0.0);
    }

    #[test]
    fn pdc_amplitude_ratio() {
        let p = PdcParams::new(0.7, 3).unwrap();
        let s = pdc_truncated(&p).unwrap();
        let a1 = s.amplitude_of(&[(0, 0), (0, 0)]);
        // |ψ⁻₂⟩ leading term |1,0⟩|0,1⟩ carries 1/√2
        let a2 = s.amplitude_of(&[(1, 0), (0, 1)]) * 2f64.sqrt();
        assert_relative_eq!((a2 / a1).re, 2f64.sqrt() * 0.7f64.tanh(), epsilon = 1e-14);
        let signs: Vec<f64> = [[(2, 0), (0, 2)], [(1, 1), (1, 1)], [(0, 2), (2, 0)]]
            .iter()
            .map(|k| s.amplitude_of(k).re.signum())
            .collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn pdc_params_validation() {
        assert!(PdcParams::new(-0.1, 3).is_err());
        assert!(PdcParams::new(0.1, 0).is_err());
        assert!(PdcParams::new(0.1, 5).is_err());
        assert!(PdcParams::new(f64::NAN, 3).is_err());
    }

    #[test]
    fn rotated_pdc_matches_closed_form() {
        for tau in [0.1, 0.5, 1.0] {
            let p = PdcParams::new(tau, 3).unwrap();
            let f = fidelity(&pdc_rotated(&p).unwrap(), &pdc_rotated_closed_form(&p).unwrap()).unwrap();
            assert_relative_eq!(f, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn herald_qutrit_from_bell_pairs() {
        let r = herald_qutrit(&bell_pair(), &bell_pair()).unwrap();
        assert_relative_eq!(r.probability, 3.0 / 16.0, epsilon = 1e-14);
        assert_relative_eq!(fidelity(&r.state, &psi_d(3).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
        let raw = herald_projection(&bell_pair(), &bell_pair()).unwrap();
        assert_relative_eq!(raw.norm(), 3f64.sqrt() / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn herald_with_vacuum_ancilla() {
        let r = herald_qutrit(&bell_pair(), &PureState::vacuum(2).unwrap()).unwrap();
        assert_relative_eq!(r.probability, 1.0 / 4.0, epsilon = 1e-14);
        assert_eq!(r.state.definite_photon_number(), Some(2));
        assert_eq!(fidelity(&r.state, &psi_d(3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn herald_rejects_bad_inputs() {
        let mixed_number = PureState::from_kets([
            (vec![(0, 0), (0, 0)], c(0.6)),
            (vec![(1, 0), (1, 0)], c(0.8)),
        ])
        .unwrap();
        assert!(herald_qutrit(&mixed_number, &bell_pair()).is_err());
        assert!(herald_qutrit(&PureState::vacuum(3).unwrap(), &bell_pair()).is_err());
    }

    #[test]
    fn unbalanced_examples() {
        let r = herald_unbalanced(&UnbalancedParams::new(FRAC_PI_4, 0.0)).unwrap();
        assert_relative_eq!(fidelity(&r.state, &psi_d(3).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
        let r = herald_unbalanced(&UnbalancedParams::new(FRAC_PI_4, std::f64::consts::PI)).unwrap();
        assert_relative_eq!(fidelity(&r.state, &qutrit_bell_minus()).unwrap(), 1.0, epsilon = 1e-12);
        let r = herald_unbalanced(&UnbalancedParams::new(0.0, 1.3)).unwrap();
        assert_relative_eq!(r.state.amplitude_of(&[(2, 0), (2, 0)]).norm(), 2.0 / 5f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(r.state.amplitude_of(&[(1, 1), (1, 1)]).norm(), 1.0 / 5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn nesting_step_probabilities() {
        let n = nest_qudit(5).unwrap();
        assert_eq!(n.step_probabilities.len(), 3);
        for (d, p) in (3..=5).zip(&n.step_probabilities) {
            assert_relative_eq!(*p, nest_step_probability(d), epsilon = 1e-12);
        }
        assert_relative_eq!(fidelity(&n.record.state, &psi_d(5).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
        assert!(nest_qudit(2).is_err());
        assert!(nest_qudit(7).is_err());
    }

    #[test]
    fn hbpg_acceptance_probability() {
        let h = hbpg().unwrap();
        assert_eq!(h.branches.len(), 4);
        assert_relative_eq!(h.probability, 0.25, epsilon = 1e-14);
        for b in &h.branches {
            assert_eq!(b.state.definite_photon_number(), Some(2));
        }
    }

    #[test]
    fn phase_fix_and_212() {
        let fixed = fix_relative_phase(&qutrit_bell_minus()).unwrap();
        assert_relative_eq!(fidelity(&fixed, &qutrit_bell_plus()).unwrap(), 1.0, epsilon = 1e-14);
        let r = build_unbalanced_212().unwrap();
        assert_relative_eq!(fidelity(&r.state, &unbalanced_212()).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(r.probability, 9.0 / 544.0, epsilon = 1e-14);
    }

    #[test]
    fn teleport_basis_input() {
        let t = teleport(&QutritAmplitudes::basis(0).unwrap()).unwrap();
        assert_relative_eq!(t.conclusive_probability, 1.0 / 9.0, epsilon = 1e-12);
        for p in t.patterns.iter().filter(|p| p.conclusive) {
            assert_relative_eq!(p.fidelity.unwrap(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(t.patterns.iter().filter(|p| p.conclusive).count(), 4);
    }

    #[test]
    fn teleport_rejects_unnormalized() {
        assert!(teleport(&QutritAmplitudes([c(1.0), c(1.0), c(0.0)])).is_err());
        assert!(QutritAmplitudes::new([c(1.0), c(1.0), c(0.0)]).is_err());
    }
}
