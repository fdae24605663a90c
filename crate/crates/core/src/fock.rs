//! Multi-mode polarized photonic pure states in second quantization.
//!
//! Every spatial mode carries two slots, horizontal (H) and vertical (V).
//! A basis ket `|m₀,n₀⟩⊗|m₁,n₁⟩⊗…` is an [`Occupation`], and a
//! [`PureState`] is a sparse map from occupations to amplitudes kept in
//! canonical order (lexicographic by mode, then H count, then V count).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Amplitudes below this magnitude are dropped after every operation.
pub const PRUNE_EPSILON: f64 = 1e-14;

/// Tolerance on Σ|amplitude|² for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Photon counts `(m, n)` = (horizontal, vertical) for every spatial mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<(u32, u32)>);

impl Occupation {
    pub fn new(counts: Vec<(u32, u32)>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Occupation(vec![(0, 0); mode_count])
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn modes(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn mode(&self, mode: usize) -> (u32, u32) {
        self.0[mode]
    }

    pub fn get(&self, mode: usize, pol: Polarization) -> u32 {
        match pol {
            Polarization::H => self.0[mode].0,
            Polarization::V => self.0[mode].1,
        }
    }

    pub fn set(&mut self, mode: usize, pol: Polarization, count: u32) {
        match pol {
            Polarization::H => self.0[mode].0 = count,
            Polarization::V => self.0[mode].1 = count,
        }
    }

    pub fn set_mode(&mut self, mode: usize, counts: (u32, u32)) {
        self.0[mode] = counts;
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&(m, n)| m + n).sum()
    }

    pub fn total_h(&self) -> u32 {
        self.0.iter().map(|&(m, _)| m).sum()
    }

    pub fn total_v(&self) -> u32 {
        self.0.iter().map(|&(_, n)| n).sum()
    }

    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Occupation(v)
    }

    pub fn without_mode(&self, mode: usize) -> Occupation {
        let mut v = self.0.clone();
        v.remove(mode);
        Occupation(v)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, n) in &self.0 {
            write!(f, "|{m},{n}⟩")?;
        }
        Ok(())
    }
}

/// Sparse pure state over a fixed number of polarized spatial modes.
///
/// The empty map is the zero vector; it only appears as the conditional
/// state of an impossible heralding branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    mode_count: usize,
    amps: BTreeMap<Occupation, Complex64>,
}

impl PureState {
    pub fn vacuum(mode_count: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(invalid("vacuum needs at least one mode"));
        }
        let mut amps = BTreeMap::new();
        amps.insert(Occupation::vacuum(mode_count), Complex64::new(1.0, 0.0));
        Ok(PureState { mode_count, amps })
    }

    pub fn zero(mode_count: usize) -> Self {
        PureState {
            mode_count,
            amps: BTreeMap::new(),
        }
    }

    /// Normalized basis ket `|m₀,n₀⟩⊗|m₁,n₁⟩⊗…`.
    pub fn basis(counts: &[(u32, u32)]) -> Result<Self> {
        if counts.is_empty() {
            return Err(invalid("basis state needs at least one mode"));
        }
        let mut amps = BTreeMap::new();
        amps.insert(Occupation::new(counts.to_vec()), Complex64::new(1.0, 0.0));
        Ok(PureState {
            mode_count: counts.len(),
            amps,
        })
    }

    /// Builds a state from (occupation, amplitude) pairs, summing repeats
    /// and pruning numerical zeros.
    pub fn from_terms<I>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.mode_count() != mode_count {
                return Err(Error::ModeCountMismatch(occ.mode_count(), mode_count));
            }
            *amps.entry(occ).or_default() += amp;
        }
        Ok(Self::pruned(mode_count, amps))
    }

    /// Same as [`PureState::from_terms`] for `(counts, amplitude)` literals.
    pub fn from_kets<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<(u32, u32)>, Complex64)>,
    {
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(c, a)| (Occupation::new(c), a))
            .collect();
        let mode_count = terms
            .first()
            .map(|(o, _)| o.mode_count())
            .ok_or_else(|| invalid("no terms given"))?;
        Self::from_terms(mode_count, terms)
    }

    pub(crate) fn pruned(mode_count: usize, mut amps: BTreeMap<Occupation, Complex64>) -> Self {
        amps.retain(|_, a| a.norm() >= PRUNE_EPSILON);
        PureState { mode_count, amps }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Entries in canonical basis order.
    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    /// Amplitude of the basis ket given as per-mode `(m, n)` counts.
    pub fn amplitude_of(&self, counts: &[(u32, u32)]) -> Complex64 {
        self.amplitude(&Occupation::new(counts.to_vec()))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm_sqr()))
        }
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.mode_count {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                mode,
                mode_count: self.mode_count,
            })
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < PRUNE_EPSILON {
            return Err(invalid("cannot normalize the zero state"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let amps = self.amps.iter().map(|(o, a)| (o.clone(), a * factor)).collect();
        Self::pruned(self.mode_count, amps)
    }

    /// `self + other`.
    pub fn add(&self, other: &PureState) -> Result<Self> {
        self.same_modes(other)?;
        let mut amps = self.amps.clone();
        for (o, a) in &other.amps {
            *amps.entry(o.clone()).or_default() += a;
        }
        Ok(Self::pruned(self.mode_count, amps))
    }

    /// Applies `f` to every entry and sums the results into a new state.
    ///
    /// Each input entry may expand into any number of output entries; this
    /// is how optical elements are implemented.
    pub fn map_terms<F, I>(&self, mode_count: usize, mut f: F) -> Self
    where
        F: FnMut(&Occupation, Complex64) -> I,
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, &amp) in &self.amps {
            for (o, a) in f(occ, amp) {
                *amps.entry(o).or_default() += a;
            }
        }
        Self::pruned(mode_count, amps)
    }

    /// Keeps the entries accepted by `keep`; the result is unnormalized.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Occupation) -> bool,
    {
        let amps = self
            .amps
            .iter()
            .filter(|(o, _)| keep(o))
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        PureState {
            mode_count: self.mode_count,
            amps,
        }
    }

    /// Creation operator `a†` on one polarization slot, unnormalized.
    pub fn create(&self, mode: usize, pol: Polarization) -> Result<Self> {
        self.check_mode(mode)?;
        Ok(self.map_terms(self.mode_count, |occ, amp| {
            let n = occ.get(mode, pol);
            let mut o = occ.clone();
            o.set(mode, pol, n + 1);
            Some((o, amp * ((n + 1) as f64).sqrt()))
        }))
    }

    /// Annihilation operator `a` on one polarization slot, unnormalized.
    pub fn annihilate(&self, mode: usize, pol: Polarization) -> Result<Self> {
        self.check_mode(mode)?;
        Ok(self.map_terms(self.mode_count, |occ, amp| {
            let n = occ.get(mode, pol);
            (n > 0).then(|| {
                let mut o = occ.clone();
                o.set(mode, pol, n - 1);
                (o, amp * (n as f64).sqrt())
            })
        }))
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        self.same_modes(other)?;
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        Ok(small
            .amps
            .iter()
            .filter_map(|(o, a)| large.amps.get(o).map(|b| (a, b)))
            .map(|(a, b)| if conj_small { a.conj() * b } else { b.conj() * a })
            .sum())
    }

    /// Tensor product; `other`'s modes are appended after `self`'s.
    pub fn tensor(&self, other: &PureState) -> Self {
        let mode_count = self.mode_count + other.mode_count;
        let mut amps = BTreeMap::new();
        for (oa, a) in &self.amps {
            for (ob, b) in &other.amps {
                amps.insert(oa.concat(ob), a * b);
            }
        }
        Self::pruned(mode_count, amps)
    }

    /// Probability of each total photon number.
    pub fn total_photons(&self) -> BTreeMap<u32, f64> {
        let mut dist = BTreeMap::new();
        for (o, a) in &self.amps {
            *dist.entry(o.total()).or_insert(0.0) += a.norm_sqr();
        }
        dist
    }

    /// The photon number shared by every entry, if there is one.
    pub fn definite_photon_number(&self) -> Option<u32> {
        let mut totals = self.amps.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Drops `mode` from every entry. Entries that differ only in that mode
    /// are summed, so callers normally project the mode first.
    pub fn remove_mode(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        Ok(self.map_terms(self.mode_count - 1, |o, a| Some((o.without_mode(mode), a))))
    }

    /// Appends `extra` vacuum modes.
    pub fn with_vacuum_modes(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let vac = PureState::vacuum(extra).expect("extra > 0");
        self.tensor(&vac)
    }

    /// Reorders modes so that new mode `i` is old mode `order[i]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.mode_count];
        if order.len() != self.mode_count {
            return Err(invalid("permutation length differs from mode count"));
        }
        for &i in order {
            self.check_mode(i)?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid("permutation repeats a mode"));
            }
        }
        Ok(self.map_terms(self.mode_count, |o, a| {
            Some((Occupation::new(order.iter().map(|&i| o.mode(i)).collect()), a))
        }))
    }

    fn same_modes(&self, other: &PureState) -> Result<()> {
        if self.mode_count == other.mode_count {
            Ok(())
        } else {
            Err(Error::ModeCountMismatch(self.mode_count, other.mode_count))
        }
    }
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    a.check_normalized()?;
    b.check_normalized()?;
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.amps.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, a)) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, o)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SerTerm {
    mode_occupations: Vec<[u32; 2]>,
    re: f64,
    im: f64,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<SerTerm> = self
            .amps
            .iter()
            .map(|(o, a)| SerTerm {
                mode_occupations: o.modes().iter().map(|&(m, n)| [m, n]).collect(),
                re: a.re,
                im: a.im,
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<SerTerm>::deserialize(d)?;
        PureState::from_kets(terms.into_iter().map(|t| {
            (
                t.mode_occupations.iter().map(|&[m, n]| (m, n)).collect(),
                Complex64::new(t.re, t.im),
            )
        }))
        .map_err(D::Error::custom)
    }
}
