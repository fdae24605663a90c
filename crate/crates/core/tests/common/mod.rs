//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the element substitution code: unitaries are
//! built from their generators with a Taylor series, and linear-optics maps
//! are expanded operator by operator on top of `create`.
#![allow(dead_code)]

use heralded_qutrit::{Complex64, Occupation, Polarization, PureState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Slot = (usize, Polarization);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn slots(mode_count: usize) -> Vec<Slot> {
    (0..mode_count)
        .flat_map(|m| [(m, Polarization::H), (m, Polarization::V)])
        .collect()
}

/// `a†_to a_from` applied to `s`.
pub fn hop(s: &PureState, to: Slot, from: Slot) -> PureState {
    s.annihilate(from.0, from.1).unwrap().create(to.0, to.1).unwrap()
}

pub fn sum(a: &PureState, b: &PureState) -> PureState {
    a.add(b).unwrap()
}

/// `exp(G)|ψ⟩` for a photon-number-conserving generator `G`, using many
/// short Taylor steps so no step sees large cancellations.
pub fn exp_generator<G>(psi: &PureState, scale: f64, generator: G) -> PureState
where
    G: Fn(&PureState) -> PureState,
{
    let photons = psi.iter().map(|(o, _)| o.total()).max().unwrap_or(0).max(1);
    let steps = ((scale.abs() * f64::from(photons)) / 1.0).ceil().max(1.0) as usize;
    let h = scale / steps as f64;
    let mut state = psi.clone();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..60 {
            term = generator(&term).scaled(c(h / k as f64));
            if term.norm() < 1e-20 {
                break;
            }
            acc = sum(&acc, &term);
        }
        state = acc;
    }
    state
}

/// `exp(θ Ĵ_R)` on one mode, `Ĵ_R = a†_V a_H − a†_H a_V`.
pub fn rotator_oracle(psi: &PureState, mode: usize, theta: f64) -> PureState {
    let h = (mode, Polarization::H);
    let v = (mode, Polarization::V);
    exp_generator(psi, theta, |s| sum(&hop(s, v, h), &hop(s, h, v).scaled(c(-1.0))))
}

/// `exp(i(π/4) Ĵ_BS)`, `Ĵ_BS = Σₚ a†ₚ cₚ + c†ₚ aₚ`.
pub fn bs_oracle(psi: &PureState, a: usize, cc: usize) -> PureState {
    let i = Complex64::new(0.0, 1.0);
    exp_generator(psi, std::f64::consts::FRAC_PI_4, |s| {
        let mut out = PureState::zero(s.mode_count());
        for p in [Polarization::H, Polarization::V] {
            out = sum(&out, &hop(s, (a, p), (cc, p)));
            out = sum(&out, &hop(s, (cc, p), (a, p)));
        }
        out.scaled(i)
    })
}

/// `exp(i(δH n̂_H + δV n̂_V))` on one mode.
pub fn phase_oracle(psi: &PureState, mode: usize, dh: f64, dv: f64) -> PureState {
    let i = Complex64::new(0.0, 1.0);
    exp_generator(psi, 1.0, |s| {
        let h = (mode, Polarization::H);
        let v = (mode, Polarization::V);
        sum(&hop(s, h, h).scaled(i * dh), &hop(s, v, v).scaled(i * dv))
    })
}

/// Applies a linear creation-operator map by brute force: every basis ket
/// is written as a monomial of creation operators on vacuum, every operator
/// is replaced by its image, and the product is expanded term by term.
pub fn linear_map_oracle<F>(psi: &PureState, image: F) -> PureState
where
    F: Fn(Slot) -> Vec<(Slot, Complex64)>,
{
    let n = psi.mode_count();
    let mut out = PureState::zero(n);
    for (occ, amp) in psi.iter() {
        let mut ops = Vec::new();
        let mut norm = 1.0;
        for (m, &(h, v)) in occ.modes().iter().enumerate() {
            for _ in 0..h {
                ops.push((m, Polarization::H));
            }
            for _ in 0..v {
                ops.push((m, Polarization::V));
            }
            norm *= factorial(h) * factorial(v);
        }
        let mut partial = PureState::vacuum(n).unwrap().scaled(*amp / norm.sqrt());
        for op in ops {
            let mut next = PureState::zero(n);
            for (slot, coeff) in image(op) {
                next = sum(&next, &partial.create(slot.0, slot.1).unwrap().scaled(coeff));
            }
            partial = next;
        }
        out = sum(&out, &partial);
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Image of a creation operator under a 50:50 beam splitter on `(a, c)`.
pub fn bs_image(a: usize, cc: usize) -> impl Fn(Slot) -> Vec<(Slot, Complex64)> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let ir = Complex64::new(0.0, r);
    move |(m, p)| {
        if m == a {
            vec![((a, p), c(r)), ((cc, p), ir)]
        } else if m == cc {
            vec![((a, p), ir), ((cc, p), c(r))]
        } else {
            vec![((m, p), c(1.0))]
        }
    }
}

/// Matrix of a single-mode map on the labelled basis, row `i` holding the
/// image of basis ket `i`.
pub fn oracle_block<F>(labels: &[(u32, u32)], op: F) -> Vec<Vec<Complex64>>
where
    F: Fn(&PureState) -> PureState,
{
    labels
        .iter()
        .map(|&l| {
            let image = op(&PureState::basis(&[l]).unwrap());
            labels.iter().map(|&j| image.amplitude_of(&[j])).collect()
        })
        .collect()
}

/// Random normalized state on `modes` modes with at most `max_photons`
/// photons per basis ket.
pub fn random_state(rng: &mut ChaCha8Rng, modes: usize, max_photons: u32) -> PureState {
    let terms = rng.gen_range(1..=8);
    let kets: Vec<(Occupation, Complex64)> = (0..terms)
        .map(|_| {
            let total = rng.gen_range(0..=max_photons);
            let mut counts = vec![(0u32, 0u32); modes];
            for _ in 0..total {
                let m = rng.gen_range(0..modes);
                if rng.gen::<bool>() {
                    counts[m].0 += 1;
                } else {
                    counts[m].1 += 1;
                }
            }
            (Occupation::new(counts), random_complex(rng))
        })
        .collect();
    PureState::from_terms(modes, kets).unwrap().normalized().unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn state_distance(a: &PureState, b: &PureState) -> f64 {
    a.add(&b.scaled(c(-1.0))).unwrap().norm()
}

pub fn photon_distance(a: &PureState, b: &PureState) -> f64 {
    let (pa, pb) = (a.total_photons(), b.total_photons());
    pa.keys()
        .chain(pb.keys())
        .map(|k| (pa.get(k).unwrap_or(&0.0) - pb.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}
