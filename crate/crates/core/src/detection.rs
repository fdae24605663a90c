//! Ideal detectors: threshold (vacuum / click) and polarization-resolving
//! photon counters, with exact heralding probabilities.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::fock::PureState;

/// Projected norms below this are treated as exact zeros.
pub const ZERO_BRANCH_NORM: f64 = 1e-13;

/// A measurement branch: its probability and the normalized state left
/// behind. Impossible branches carry probability 0 and the zero state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeraldRecord {
    pub probability: f64,
    pub state: PureState,
    pub outcome: String,
}

impl HeraldRecord {
    /// Turns an unnormalized projected state into a record.
    pub fn from_projection(projected: PureState, outcome: impl Into<String>) -> Self {
        let norm = projected.norm();
        let outcome = outcome.into();
        if norm < ZERO_BRANCH_NORM {
            return HeraldRecord {
                probability: 0.0,
                state: PureState::zero(projected.mode_count()),
                outcome,
            };
        }
        HeraldRecord {
            probability: norm * norm,
            state: projected.scaled((1.0 / norm).into()),
            outcome,
        }
    }

    pub fn is_possible(&self) -> bool {
        self.probability > 0.0
    }

    /// Conditions this branch on a further measurement on its state.
    pub fn then<F>(&self, f: F) -> Result<HeraldRecord>
    where
        F: FnOnce(&PureState) -> Result<HeraldRecord>,
    {
        if !self.is_possible() {
            return Ok(self.clone());
        }
        let next = f(&self.state)?;
        Ok(HeraldRecord {
            probability: self.probability * next.probability,
            outcome: format!("{}; {}", self.outcome, next.outcome),
            state: next.state,
        })
    }
}

/// Vacuum outcome `Π₀ = |0,0⟩⟨0,0|` of a threshold detector. The mode is
/// kept (it is left in vacuum).
pub fn threshold_null(state: &PureState, mode: usize) -> Result<HeraldRecord> {
    state.check_mode(mode)?;
    let projected = state.filter(|o| o.mode(mode) == (0, 0));
    Ok(HeraldRecord::from_projection(projected, format!("null@{mode}")))
}

/// Click outcome `Π_{>0} = Î − Π₀` of a threshold detector.
pub fn threshold_click(state: &PureState, mode: usize) -> Result<HeraldRecord> {
    state.check_mode(mode)?;
    let projected = state.filter(|o| o.mode(mode) != (0, 0));
    Ok(HeraldRecord::from_projection(projected, format!("click@{mode}")))
}

/// Outcome distribution of a polarization-resolving photon counter.
pub fn count_photons(state: &PureState, mode: usize) -> Result<BTreeMap<(u32, u32), f64>> {
    state.check_mode(mode)?;
    let mut dist = BTreeMap::new();
    for (o, a) in state.iter() {
        *dist.entry(o.mode(mode)).or_insert(0.0) += a.norm_sqr();
    }
    Ok(dist)
}

/// Joint outcome distribution of counters on several modes.
pub fn count_photons_joint(
    state: &PureState,
    modes: &[usize],
) -> Result<BTreeMap<Vec<(u32, u32)>, f64>> {
    for &m in modes {
        state.check_mode(m)?;
    }
    let mut dist = BTreeMap::new();
    for (o, a) in state.iter() {
        let key: Vec<_> = modes.iter().map(|&m| o.mode(m)).collect();
        *dist.entry(key).or_insert(0.0) += a.norm_sqr();
    }
    Ok(dist)
}

/// Projects `mode` onto `|m,n⟩` and removes it: the detected photons are
/// destroyed and the conditional state lives on the remaining modes.
pub fn postselect_counts(state: &PureState, mode: usize, m: u32, n: u32) -> Result<HeraldRecord> {
    state.check_mode(mode)?;
    let projected = state.filter(|o| o.mode(mode) == (m, n)).remove_mode(mode)?;
    Ok(HeraldRecord::from_projection(projected, format!("({m},{n})@{mode}")))
}

/// Projects several modes onto the given counts and removes them.
pub fn postselect_pattern(
    state: &PureState,
    pattern: &[(usize, (u32, u32))],
) -> Result<HeraldRecord> {
    for &(mode, _) in pattern {
        state.check_mode(mode)?;
    }
    let mut projected = state.filter(|o| pattern.iter().all(|&(mode, c)| o.mode(mode) == c));
    let mut modes: Vec<usize> = pattern.iter().map(|&(m, _)| m).collect();
    modes.sort_unstable_by(|a, b| b.cmp(a));
    for m in modes {
        projected = projected.remove_mode(m)?;
    }
    let label = pattern
        .iter()
        .map(|(mode, (m, n))| format!("({m},{n})@{mode}"))
        .collect::<Vec<_>>()
        .join(",");
    Ok(HeraldRecord::from_projection(projected, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn null_on_vacuum() {
        let v = PureState::vacuum(3).unwrap();
        let r = threshold_null(&v, 1).unwrap();
        assert_eq!(r.probability, 1.0);
        assert_eq!(r.state, v);
        assert_eq!(threshold_click(&v, 1).unwrap().probability, 0.0);
        assert!(threshold_click(&v, 1).unwrap().state.is_empty());
    }

    #[test]
    fn null_on_half_photon() {
        let s = PureState::from_kets([
            (vec![(0, 0), (1, 0)], c(FRAC_1_SQRT_2)),
            (vec![(0, 0), (0, 0)], c(FRAC_1_SQRT_2)),
        ])
        .unwrap();
        let r = threshold_null(&s, 1).unwrap();
        assert_relative_eq!(r.probability, 0.5, epsilon = 1e-15);
        assert_eq!(r.state, PureState::vacuum(2).unwrap());
        let k = threshold_click(&s, 1).unwrap();
        assert_relative_eq!(r.probability + k.probability, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qutrit_marginals() {
        let a = 1.0 / 3f64.sqrt();
        let psi = PureState::from_kets([
            (vec![(2, 0), (2, 0)], c(a)),
            (vec![(1, 1), (1, 1)], c(a)),
            (vec![(0, 2), (0, 2)], c(a)),
        ])
        .unwrap();
        let d = count_photons(&psi, 0).unwrap();
        assert_eq!(d.len(), 3);
        for (_, p) in d {
            assert_relative_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
        let v = count_photons(&PureState::vacuum(1).unwrap(), 0).unwrap();
        assert_eq!(v.get(&(0, 0)), Some(&1.0));
    }

    #[test]
    fn postselect_removes_mode() {
        let s = PureState::from_kets([
            (vec![(1, 1), (1, 1)], c(0.6)),
            (vec![(2, 0), (0, 2)], c(0.8)),
        ])
        .unwrap();
        let r = postselect_counts(&s, 1, 1, 1).unwrap();
        assert_relative_eq!(r.probability, 0.36, epsilon = 1e-15);
        assert_eq!(r.state, PureState::basis(&[(1, 1)]).unwrap());
        let none = postselect_counts(&s, 1, 3, 0).unwrap();
        assert_eq!(none.probability, 0.0);
        assert_eq!(none.state.mode_count(), 1);
    }

    #[test]
    fn postselect_vacuum_matches_null() {
        let s = PureState::from_kets([
            (vec![(1, 0), (0, 0)], c(0.6)),
            (vec![(0, 0), (0, 1)], c(0.8)),
        ])
        .unwrap();
        let a = postselect_counts(&s, 1, 0, 0).unwrap();
        let b = threshold_null(&s, 1).unwrap();
        assert_eq!(a.probability, b.probability);
        assert_eq!(a.state, b.state.remove_mode(1).unwrap());
    }

    #[test]
    fn chained_heralds_multiply() {
        let s = PureState::from_kets([
            (vec![(0, 0), (0, 0)], c(0.5)),
            (vec![(1, 0), (0, 0)], c(0.5)),
            (vec![(0, 0), (1, 0)], c(0.5)),
            (vec![(1, 0), (1, 0)], c(0.5)),
        ])
        .unwrap();
        let r = threshold_null(&s, 0).unwrap().then(|st| threshold_null(st, 1)).unwrap();
        assert_relative_eq!(r.probability, 0.25, epsilon = 1e-15);
        assert_eq!(r.outcome, "null@0; null@1");
        let joint = count_photons_joint(&s, &[0, 1]).unwrap();
        assert_eq!(joint.len(), 4);
        let pat = postselect_pattern(&s, &[(1, (1, 0)), (0, (0, 0))]).unwrap();
        assert_relative_eq!(pat.probability, 0.25, epsilon = 1e-15);
        assert_eq!(pat.state.mode_count(), 0);
    }
}
