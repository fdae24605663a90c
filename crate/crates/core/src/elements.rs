//! Lossless linear-optical elements acting on [`PureState`].
//!
//! Elements are applied by substituting creation operators and expanding
//! the resulting polynomial exactly, one basis entry at a time:
//!
//! * 50:50 beam splitter: `a†ₚ → (a†ₚ + i c†ₚ)/√2`, `c†ₚ → (i a†ₚ + c†ₚ)/√2`
//!   for each polarization `p`, i.e. `exp(i(π/4)Ĵ_BS)`.
//! * rotator `U(θ) = exp(θĴ_R)`, `Ĵ_R = a†_V a_H − a†_H a_V`:
//!   `a†_H → cosθ a†_H + sinθ a†_V`, `a†_V → −sinθ a†_H + cosθ a†_V`.
//! * phase shifter: `|m,n⟩ → e^{i(mδH + nδV)}|m,n⟩`.
//! * polarizing beam splitter: horizontal light is transmitted, vertical
//!   light swaps modes, no reflection phase.
//!
//! [`rotator_block`] and [`phase_block`] give the same maps on one- and
//! two-photon single-mode subspaces as [`MatrixBlock`]s.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{Occupation, Polarization, PureState};
use crate::matrix::{MatrixBlock, ONE_PHOTON_BASIS, TWO_PHOTON_BASIS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Element {
    BeamSplitter { a: usize, c: usize },
    Rotator { mode: usize, theta: f64 },
    PhaseShifter { mode: usize, dh: f64, dv: f64 },
    PolarizingBs { a: usize, b: usize },
}

impl Element {
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        match *self {
            Element::BeamSplitter { a, c } => apply_bs(state, a, c),
            Element::Rotator { mode, theta } => apply_rotator(state, mode, theta),
            Element::PhaseShifter { mode, dh, dv } => apply_phase(state, mode, dh, dv),
            Element::PolarizingBs { a, b } => apply_pbs(state, a, b),
        }
    }
}

/// Applies a sequence of elements in order.
pub fn apply_all(state: &PureState, elements: &[Element]) -> Result<PureState> {
    elements
        .iter()
        .try_fold(state.clone(), |s, e| e.apply(&s))
}

type Slot = (usize, Polarization);

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Substitutes `a†_x → u[0][0] a†_x + u[0][1] a†_y` and
/// `a†_y → u[1][0] a†_x + u[1][1] a†_y` on the slot pair `(x, y)`.
fn substitute_pair(state: &PureState, x: Slot, y: Slot, u: [[Complex64; 2]; 2]) -> PureState {
    // Powers are reused heavily; cache per exponent.
    let mut cache: BTreeMap<(u32, u32), Vec<(u32, Complex64)>> = BTreeMap::new();
    state.map_terms(state.mode_count(), |occ, amp| {
        let k1 = occ.get(x.0, x.1);
        let k2 = occ.get(y.0, y.1);
        let expansion = cache.entry((k1, k2)).or_insert_with(|| expand_pair(k1, k2, u));
        let mut out = Vec::with_capacity(expansion.len());
        for &(p, coeff) in expansion.iter() {
            let mut o = occ.clone();
            o.set(x.0, x.1, p);
            o.set(y.0, y.1, k1 + k2 - p);
            out.push((o, amp * coeff));
        }
        out
    })
}

/// Coefficients of `|p, k1+k2−p⟩` in the image of `|k1, k2⟩`.
fn expand_pair(k1: u32, k2: u32, u: [[Complex64; 2]; 2]) -> Vec<(u32, Complex64)> {
    let total = k1 + k2;
    let mut coeffs = vec![Complex64::default(); total as usize + 1];
    for j1 in 0..=k1 {
        let c1 = u[0][0].powu(j1) * u[0][1].powu(k1 - j1) * binomial(k1, j1);
        for j2 in 0..=k2 {
            let c2 = u[1][0].powu(j2) * u[1][1].powu(k2 - j2) * binomial(k2, j2);
            coeffs[(j1 + j2) as usize] += c1 * c2;
        }
    }
    let norm_in = (factorial(k1) * factorial(k2)).sqrt();
    coeffs
        .into_iter()
        .enumerate()
        .map(|(p, c)| {
            let p = p as u32;
            let norm_out = (factorial(p) * factorial(total - p)).sqrt();
            (p, c * (norm_out / norm_in))
        })
        .filter(|(_, c)| c.norm() > 0.0)
        .collect()
}

fn check_pair(state: &PureState, a: usize, b: usize) -> Result<()> {
    state.check_mode(a)?;
    state.check_mode(b)?;
    if a == b {
        return Err(invalid("two-mode element needs distinct modes"));
    }
    Ok(())
}

pub fn apply_bs(state: &PureState, a: usize, c: usize) -> Result<PureState> {
    check_pair(state, a, c)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = [
        [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        [Complex64::new(0.0, r), Complex64::new(r, 0.0)],
    ];
    let s = substitute_pair(state, (a, Polarization::H), (c, Polarization::H), u);
    Ok(substitute_pair(&s, (a, Polarization::V), (c, Polarization::V), u))
}

pub fn apply_rotator(state: &PureState, mode: usize, theta: f64) -> Result<PureState> {
    state.check_mode(mode)?;
    let (s, c) = theta.sin_cos();
    let u = [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
    ];
    Ok(substitute_pair(state, (mode, Polarization::H), (mode, Polarization::V), u))
}

pub fn apply_phase(state: &PureState, mode: usize, dh: f64, dv: f64) -> Result<PureState> {
    state.check_mode(mode)?;
    Ok(state.map_terms(state.mode_count(), |occ, amp| {
        let (m, n) = occ.mode(mode);
        let phase = Complex64::from_polar(1.0, f64::from(m) * dh + f64::from(n) * dv);
        Some((occ.clone(), amp * phase))
    }))
}

pub fn apply_pbs(state: &PureState, a: usize, b: usize) -> Result<PureState> {
    check_pair(state, a, b)?;
    Ok(state.map_terms(state.mode_count(), |occ, amp| {
        let mut o: Occupation = occ.clone();
        o.set(a, Polarization::V, occ.get(b, Polarization::V));
        o.set(b, Polarization::V, occ.get(a, Polarization::V));
        Some((o, amp))
    }))
}

fn check_photons(photons: u32) -> Result<()> {
    match photons {
        1 | 2 => Ok(()),
        _ => Err(Error::InvalidArgument(format!(
            "blocks exist for 1 or 2 photons, got {photons}"
        ))),
    }
}

/// Rotator block on the `photons`-photon subspace of one mode.
pub fn rotator_block(theta: f64, photons: u32) -> Result<MatrixBlock> {
    check_photons(photons)?;
    let (s, c) = theta.sin_cos();
    let r2 = std::f64::consts::SQRT_2;
    let re = |x: f64| Complex64::new(x, 0.0);
    let rows = if photons == 1 {
        vec![vec![re(c), re(s)], vec![re(-s), re(c)]]
    } else {
        vec![
            vec![re(c * c), re(r2 * c * s), re(s * s)],
            vec![re(-r2 * c * s), re(c * c - s * s), re(r2 * c * s)],
            vec![re(s * s), re(-r2 * c * s), re(c * c)],
        ]
    };
    let labels: &[(u32, u32)] = if photons == 1 {
        &ONE_PHOTON_BASIS
    } else {
        &TWO_PHOTON_BASIS
    };
    MatrixBlock::from_rows(labels, rows)
}

/// Phase-shifter block on the `photons`-photon subspace of one mode.
pub fn phase_block(dh: f64, dv: f64, photons: u32) -> Result<MatrixBlock> {
    check_photons(photons)?;
    let labels: &[(u32, u32)] = if photons == 1 {
        &ONE_PHOTON_BASIS
    } else {
        &TWO_PHOTON_BASIS
    };
    let diag: Vec<Complex64> = labels
        .iter()
        .map(|&(m, n)| Complex64::from_polar(1.0, f64::from(m) * dh + f64::from(n) * dv))
        .collect();
    Ok(MatrixBlock::diagonal(labels, &diag))
}

/// Reads the action of `op` on a single-mode subspace as a block in the
/// row layout of [`MatrixBlock`].
pub fn block_of<F>(labels: &[(u32, u32)], mut op: F) -> Result<MatrixBlock>
where
    F: FnMut(&PureState) -> Result<PureState>,
{
    let rows = labels
        .iter()
        .map(|&l| {
            let image = op(&PureState::basis(&[l])?)?;
            Ok(labels.iter().map(|&j| image.amplitude_of(&[j])).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    MatrixBlock::from_rows(labels, rows)
}
