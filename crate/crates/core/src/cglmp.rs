//! CGLMP inequality for two qutrits measured with linear optics.
//!
//! Each party applies `U^tot(θ, δH, δV)`: phase shifters `δH`, `δV` on the
//! two polarizations (split and recombined by a pair of PBSs), then a
//! polarization rotator `U(θ)`, then counts photons. Outcome `a` is the
//! detection of `2 − a` horizontal and `a` vertical photons, i.e. the qutrit
//! basis `|0⟩ = |2,0⟩, |1⟩ = |1,1⟩, |2⟩ = |0,2⟩`.
//!
//! Shift probabilities use `P(A = B + k) = Σ_l p[(l + k) mod 3][l]` and the
//! four correlation functions are
//!
//! ```text
//! B₁ = P(A₁ = B₁)     − P(A₁ = B₁ − 1)
//! B₂ = P(B₁ = A₂ + 1) − P(B₁ = A₂)
//! B₃ = P(A₂ = B₂)     − P(A₂ = B₂ − 1)
//! B₄ = P(B₂ = A₁)     − P(B₂ = A₁ − 1)
//! ```
//!
//! with `I₃ = B₁ + B₂ + B₃ + B₄ ≤ 2` for local hidden variables.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::count_photons_joint;
use crate::elements::{apply_pbs, apply_phase, apply_rotator, phase_block, rotator_block};
use crate::error::{invalid, Error, Result};
use crate::fock::PureState;
use crate::matrix::{MatrixBlock, TWO_PHOTON_BASIS};
use crate::simplex::NelderMead;

/// Quantum maximum of `I₃` for two qutrits, `4/(6√3 − 9)`.
pub fn quantum_bound() -> f64 {
    4.0 / (6.0 * 3f64.sqrt() - 9.0)
}

type Mat3 = [[Complex64; 3]; 3];

/// Parameters `(θ, δH, δV)` of one restricted measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QutritSetting {
    pub theta: f64,
    #[serde(rename = "dH")]
    pub dh: f64,
    #[serde(rename = "dV")]
    pub dv: f64,
}

impl QutritSetting {
    pub const fn new(theta: f64, dh: f64, dv: f64) -> Self {
        QutritSetting { theta, dh, dv }
    }

    pub const IDENTITY: QutritSetting = QutritSetting::new(0.0, 0.0, 0.0);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsQuartet {
    #[serde(rename = "A1")]
    pub a1: QutritSetting,
    #[serde(rename = "A2")]
    pub a2: QutritSetting,
    #[serde(rename = "B1")]
    pub b1: QutritSetting,
    #[serde(rename = "B2")]
    pub b2: QutritSetting,
}

impl SettingsQuartet {
    /// The two-parameter family scanned in the `(x, y)` sweep.
    pub fn fig4(x: f64, y: f64) -> Self {
        SettingsQuartet {
            a1: QutritSetting::new(FRAC_PI_4, x, y),
            b1: QutritSetting::new(FRAC_PI_4, x, 2.0 * y),
            a2: QutritSetting::new(FRAC_PI_4, x, 3.0 * y),
            b2: QutritSetting::new(FRAC_PI_4, x, 0.0),
        }
    }

    pub fn to_params(&self) -> [f64; 12] {
        let mut p = [0.0; 12];
        for (i, s) in [self.a1, self.b1, self.a2, self.b2].iter().enumerate() {
            p[3 * i] = s.theta;
            p[3 * i + 1] = s.dh;
            p[3 * i + 2] = s.dv;
        }
        p
    }

    pub fn from_params(p: &[f64]) -> Self {
        let s = |i: usize| QutritSetting::new(p[3 * i], p[3 * i + 1], p[3 * i + 2]);
        SettingsQuartet {
            a1: s(0),
            b1: s(1),
            a2: s(2),
            b2: s(3),
        }
    }
}

/// `p[a][b] = P(A = a, B = b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointProbTable(pub [[f64; 3]; 3]);

impl JointProbTable {
    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }

    pub fn max_abs_diff(&self, other: &JointProbTable) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `P(A = B + k) = Σ_l p[(l + k) mod 3][l]`
    AEqualsBPlus,
    /// `P(B = A + k) = Σ_l p[l][(l + k) mod 3]`
    BEqualsAPlus,
}

pub fn prob_shift(table: &JointProbTable, k: usize, direction: ShiftDirection) -> f64 {
    (0..3)
        .map(|l| match direction {
            ShiftDirection::AEqualsBPlus => table.0[(l + k) % 3][l],
            ShiftDirection::BEqualsAPlus => table.0[l][(l + k) % 3],
        })
        .sum()
}

/// Coefficients `c[i][j]` of `|i⟩_A|j⟩_B` for a two-mode state in the
/// four-photon qutrit subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQutrit(pub Mat3);

impl TwoQutrit {
    pub fn from_state(state: &PureState) -> Result<Self> {
        if state.mode_count() != 2 {
            return Err(invalid("two-qutrit state must have exactly two modes"));
        }
        state.check_normalized()?;
        let mut c = [[Complex64::default(); 3]; 3];
        let mut outside = 0.0;
        for (occ, amp) in state.iter() {
            let idx = |counts| TWO_PHOTON_BASIS.iter().position(|&b| b == counts);
            match (idx(occ.mode(0)), idx(occ.mode(1))) {
                (Some(i), Some(j)) => c[i][j] = *amp,
                _ => outside += amp.norm_sqr(),
            }
        }
        if outside > 1e-12 {
            return Err(Error::OutsideQutritSubspace(outside));
        }
        Ok(TwoQutrit(c))
    }

    /// `(|00⟩ + |11⟩ + |22⟩)/√3`.
    pub fn maximally_entangled() -> Self {
        let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let z = Complex64::default();
        TwoQutrit([[a, z, z], [z, a, z], [z, z, a]])
    }

    /// Joint outcome table after `U_A ⊗ U_B` (blocks in the row layout).
    fn table(&self, ua: &Mat3, ub: &Mat3) -> JointProbTable {
        let c = &self.0;
        let mut p = [[0.0; 3]; 3];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                let mut amp = Complex64::default();
                for i in 0..3 {
                    for j in 0..3 {
                        amp += c[i][j] * ua[i][a] * ub[j][b];
                    }
                }
                *cell = amp.norm_sqr();
            }
        }
        JointProbTable(p)
    }

    fn b_values(&self, [a1, a2, b1, b2]: &[Mat3; 4]) -> [f64; 4] {
        use ShiftDirection::*;
        let t11 = self.table(a1, b1);
        let t21 = self.table(a2, b1);
        let t22 = self.table(a2, b2);
        let t12 = self.table(a1, b2);
        [
            prob_shift(&t11, 0, AEqualsBPlus) - prob_shift(&t11, 2, AEqualsBPlus),
            prob_shift(&t21, 1, BEqualsAPlus) - prob_shift(&t21, 0, BEqualsAPlus),
            prob_shift(&t22, 0, AEqualsBPlus) - prob_shift(&t22, 2, AEqualsBPlus),
            prob_shift(&t12, 0, BEqualsAPlus) - prob_shift(&t12, 2, BEqualsAPlus),
        ]
    }
}

fn to_mat3(block: &MatrixBlock) -> Mat3 {
    let mut m = [[Complex64::default(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = block.get(i, j);
        }
    }
    m
}

fn u_tot_mat(s: &QutritSetting) -> Mat3 {
    let (sn, c) = s.theta.sin_cos();
    let r2 = std::f64::consts::SQRT_2;
    let rot = [
        [c * c, r2 * c * sn, sn * sn],
        [-r2 * c * sn, c * c - sn * sn, r2 * c * sn],
        [sn * sn, -r2 * c * sn, c * c],
    ];
    let phases = [2.0 * s.dh, s.dh + s.dv, 2.0 * s.dv];
    let mut m = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        let p = Complex64::from_polar(1.0, phases[i]);
        for j in 0..3 {
            m[i][j] = p * rot[i][j];
        }
    }
    m
}

/// Block of the restricted measurement unitary: phase shifters first, then
/// the rotator. In the row layout this is `phase_block · rotator_block`.
pub fn u_tot(s: &QutritSetting) -> MatrixBlock {
    let p = phase_block(s.dh, s.dv, 2).expect("two-photon block");
    let r = rotator_block(s.theta, 2).expect("two-photon block");
    &p * &r
}

/// Joint outcome table via the 3×3 qutrit matrices.
pub fn joint_probs(state: &PureState, sa: &QutritSetting, sb: &QutritSetting) -> Result<JointProbTable> {
    let q = TwoQutrit::from_state(state)?;
    Ok(q.table(&u_tot_mat(sa), &u_tot_mat(sb)))
}

/// Joint outcome table by simulating each party's optics photon by photon:
/// PBS split into an auxiliary path, phase shifters on both paths, PBS
/// merge, rotator, then photon counting on both modes.
pub fn joint_probs_fock(
    state: &PureState,
    sa: &QutritSetting,
    sb: &QutritSetting,
) -> Result<JointProbTable> {
    TwoQutrit::from_state(state)?;
    // modes: 0 = A, 1 = B, 2 = A's vertical path, 3 = B's vertical path
    let mut s = state.with_vacuum_modes(2);
    for (mode, aux, setting) in [(0, 2, sa), (1, 3, sb)] {
        s = apply_pbs(&s, mode, aux)?;
        s = apply_phase(&s, mode, setting.dh, 0.0)?;
        s = apply_phase(&s, aux, 0.0, setting.dv)?;
        s = apply_pbs(&s, mode, aux)?;
        s = apply_rotator(&s, mode, setting.theta)?;
    }
    let dist = count_photons_joint(&s, &[0, 1, 2, 3])?;
    let mut p = [[0.0; 3]; 3];
    for (counts, prob) in dist {
        let outcome = |c: (u32, u32)| (c.0 + c.1 == 2).then_some(c.1 as usize);
        match (outcome(counts[0]), outcome(counts[1]), counts[2], counts[3]) {
            (Some(a), Some(b), (0, 0), (0, 0)) => p[a][b] += prob,
            _ if prob > 1e-12 => {
                return Err(invalid(format!("unexpected detection pattern {counts:?}")))
            }
            _ => {}
        }
    }
    Ok(JointProbTable(p))
}

/// One of the four correlation functions, `i ∈ 1..=4`.
pub fn b_value(i: usize, quartet: &SettingsQuartet, state: &PureState) -> Result<f64> {
    if !(1..=4).contains(&i) {
        return Err(invalid(format!("B index must be 1..=4, got {i}")));
    }
    let q = TwoQutrit::from_state(state)?;
    Ok(q.b_values(&quartet_mats(quartet))[i - 1])
}

/// `B₁` for a single pair of settings `(A₁, B₁)`.
pub fn b1_pair(q: &TwoQutrit, sa: &QutritSetting, sb: &QutritSetting) -> f64 {
    let t = q.table(&u_tot_mat(sa), &u_tot_mat(sb));
    prob_shift(&t, 0, ShiftDirection::AEqualsBPlus) - prob_shift(&t, 2, ShiftDirection::AEqualsBPlus)
}

fn quartet_mats(q: &SettingsQuartet) -> [Mat3; 4] {
    [u_tot_mat(&q.a1), u_tot_mat(&q.a2), u_tot_mat(&q.b1), u_tot_mat(&q.b2)]
}

pub fn i3(quartet: &SettingsQuartet, state: &PureState) -> Result<f64> {
    Ok(i3_qutrit(quartet, &TwoQutrit::from_state(state)?))
}

pub fn i3_qutrit(quartet: &SettingsQuartet, q: &TwoQutrit) -> f64 {
    q.b_values(&quartet_mats(quartet)).iter().sum()
}

/// Arbitrary measurement unitaries for the two parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryQuartet {
    pub a1: MatrixBlock,
    pub a2: MatrixBlock,
    pub b1: MatrixBlock,
    pub b2: MatrixBlock,
}

impl UnitaryQuartet {
    pub fn from_settings(q: &SettingsQuartet) -> Self {
        UnitaryQuartet {
            a1: u_tot(&q.a1),
            a2: u_tot(&q.a2),
            b1: u_tot(&q.b1),
            b2: u_tot(&q.b2),
        }
    }

    fn mats(&self) -> Result<[Mat3; 4]> {
        let mut out = [[[Complex64::default(); 3]; 3]; 4];
        for (slot, block) in out.iter_mut().zip([&self.a1, &self.a2, &self.b1, &self.b2]) {
            if block.dim() != 3 {
                return Err(invalid("measurement unitaries must be 3x3"));
            }
            block.check_unitary(1e-10)?;
            *slot = to_mat3(block);
        }
        Ok(out)
    }
}

/// `I₃` with unrestricted measurement unitaries.
pub fn i3_general(state: &PureState, unitaries: &UnitaryQuartet) -> Result<f64> {
    let q = TwoQutrit::from_state(state)?;
    Ok(q.b_values(&unitaries.mats()?).iter().sum())
}

/// `B_i` values with unrestricted measurement unitaries.
pub fn b_values_general(state: &PureState, unitaries: &UnitaryQuartet) -> Result<[f64; 4]> {
    let q = TwoQutrit::from_state(state)?;
    Ok(q.b_values(&unitaries.mats()?))
}

/// Number of real parameters of [`unitary_from_params`].
pub const U3_PARAMS: usize = 9;

/// A general element of U(3): `D(φ₀, φ₁, φ₂) · G₀₁ · G₀₂ · G₁₂`, each
/// `G` a complex Givens rotation `(angle, phase)`.
pub fn unitary_from_params(p: &[f64]) -> MatrixBlock {
    let m = u3_mat(p);
    MatrixBlock::from_rows(&TWO_PHOTON_BASIS, m.iter().map(|r| r.to_vec()).collect())
        .expect("3x3")
}

fn u3_mat(p: &[f64]) -> Mat3 {
    fn givens(i: usize, j: usize, t: f64, b: f64) -> Mat3 {
        let mut g = identity3();
        let (s, c) = t.sin_cos();
        g[i][i] = c.into();
        g[j][j] = c.into();
        g[i][j] = -Complex64::from_polar(s, -b);
        g[j][i] = Complex64::from_polar(s, b);
        g
    }
    let mut m = identity3();
    for (k, ph) in p[..3].iter().enumerate() {
        m[k][k] = Complex64::from_polar(1.0, *ph);
    }
    for (i, j, t, b) in [(0, 1, p[3], p[4]), (0, 2, p[5], p[6]), (1, 2, p[7], p[8])] {
        m = mul3(&m, &givens(i, j, t, b));
    }
    m
}

fn identity3() -> Mat3 {
    let mut m = [[Complex64::default(); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn mul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            for j in 0..3 {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

/// Grid of `I₃` values over the `(x, y)` family of [`SettingsQuartet::fig4`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig4Sweep {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `values[ix * ys.len() + iy]`.
    pub values: Vec<f64>,
    pub max: f64,
    pub argmax: (f64, f64),
}

impl Fig4Sweep {
    /// Rows `(x, y, I₃)` in row-major grid order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let ny = self.ys.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.xs[k / ny], self.ys[k % ny], v))
    }
}

/// `steps` evenly spaced points including both ends.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Default sweep range for both axes.
pub const FIG4_RANGE: (f64, f64) = (0.0, PI);

pub fn sweep_fig4(
    x_range: (f64, f64),
    y_range: (f64, f64),
    steps: usize,
    state: &PureState,
) -> Result<Fig4Sweep> {
    if steps < 2 {
        return Err(invalid("sweep needs at least 2 steps per axis"));
    }
    let q = TwoQutrit::from_state(state)?;
    let xs = linspace(x_range.0, x_range.1, steps);
    let ys = linspace(y_range.0, y_range.1, steps);
    let values: Vec<f64> = xs
        .par_iter()
        .flat_map_iter(|&x| {
            let q = &q;
            ys.iter().map(move |&y| i3_qutrit(&SettingsQuartet::fig4(x, y), q))
        })
        .collect();
    let (mut best, mut at) = (f64::NEG_INFINITY, 0);
    for (k, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            at = k;
        }
    }
    Ok(Fig4Sweep {
        argmax: (xs[at / steps], ys[at % steps]),
        max: best,
        xs,
        ys,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedOptimum {
    pub settings: SettingsQuartet,
    pub i3: f64,
    pub evaluations: usize,
}

/// Maximizes `I₃` over all 12 restricted parameters from `multistart`
/// random starting quartets drawn from a seeded generator.
pub fn optimize12(multistart: usize, seed: u64, state: &PureState) -> Result<RestrictedOptimum> {
    if multistart == 0 {
        return Err(invalid("multistart must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<SettingsQuartet> = (0..multistart)
        .map(|_| {
            let p: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..TAU)).collect();
            SettingsQuartet::from_params(&p)
        })
        .collect();
    optimize12_from(&starts, state)
}

/// Same as [`optimize12`] from explicit starting quartets.
pub fn optimize12_from(starts: &[SettingsQuartet], state: &PureState) -> Result<RestrictedOptimum> {
    let q = TwoQutrit::from_state(state)?;
    let nm = NelderMead::default();
    let runs: Vec<_> = starts
        .par_iter()
        .map(|start| {
            nm.minimize(
                |p| -i3_qutrit(&SettingsQuartet::from_params(p), &q),
                &start.to_params(),
            )
        })
        .collect();
    let evaluations = runs.iter().map(|m| m.evaluations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .ok_or_else(|| invalid("no starting points"))?;
    let settings = SettingsQuartet::from_params(&best.x);
    Ok(RestrictedOptimum {
        i3: i3_qutrit(&settings, &q),
        settings,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralOptimum {
    pub unitaries: UnitaryQuartet,
    pub value: f64,
    pub evaluations: usize,
}

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..TAU)).collect()
}

fn general_search<F>(multistart: usize, seed: u64, dim: usize, objective: F) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..multistart).map(|_| random_params(&mut rng, dim)).collect();
    let nm = NelderMead {
        max_evals: 40_000,
        diameter_tol: 1e-10,
        ..NelderMead::adaptive(dim)
    };
    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| nm.minimize_with_restarts(&objective, x0, 8, 1e-12))
        .collect();
    let evaluations = runs.iter().map(|m| m.evaluations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("multistart >= 1");
    (best.x, best.value, evaluations)
}

/// Maximizes `I₃` over arbitrary U(3) measurements (36 real parameters).
pub fn optimize_general(multistart: usize, seed: u64, state: &PureState) -> Result<GeneralOptimum> {
    if multistart == 0 {
        return Err(invalid("multistart must be at least 1"));
    }
    let q = TwoQutrit::from_state(state)?;
    let mats = |p: &[f64]| {
        [
            u3_mat(&p[0..9]),
            u3_mat(&p[9..18]),
            u3_mat(&p[18..27]),
            u3_mat(&p[27..36]),
        ]
    };
    let (x, _, evaluations) = general_search(multistart, seed, 4 * U3_PARAMS, |p| {
        -q.b_values(&mats(p)).iter().sum::<f64>()
    });
    let unitaries = UnitaryQuartet {
        a1: unitary_from_params(&x[0..9]),
        a2: unitary_from_params(&x[9..18]),
        b1: unitary_from_params(&x[18..27]),
        b2: unitary_from_params(&x[27..36]),
    };
    let value = i3_general(state, &unitaries)?;
    Ok(GeneralOptimum {
        unitaries,
        value,
        evaluations,
    })
}

/// Minimizes `B₁` over arbitrary U(3) measurements for `A₁` and `B₁`.
/// Returns `(U_A1, U_B1, B₁)`.
pub fn minimize_b1_general(
    multistart: usize,
    seed: u64,
    state: &PureState,
) -> Result<(MatrixBlock, MatrixBlock, f64)> {
    if multistart == 0 {
        return Err(invalid("multistart must be at least 1"));
    }
    let q = TwoQutrit::from_state(state)?;
    let b1 = |ua: &Mat3, ub: &Mat3| {
        let t = q.table(ua, ub);
        prob_shift(&t, 0, ShiftDirection::AEqualsBPlus) - prob_shift(&t, 2, ShiftDirection::AEqualsBPlus)
    };
    let (x, value, _) = general_search(multistart, seed, 2 * U3_PARAMS, |p| {
        b1(&u3_mat(&p[0..9]), &u3_mat(&p[9..18]))
    });
    Ok((unitary_from_params(&x[0..9]), unitary_from_params(&x[9..18]), value))
}
