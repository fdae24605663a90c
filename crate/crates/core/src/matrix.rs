//! Small dense complex matrices on labelled single-mode Fock bases.

use std::ops::Mul;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// One-photon single-mode basis `|1,0⟩, |0,1⟩`.
pub const ONE_PHOTON_BASIS: [(u32, u32); 2] = [(1, 0), (0, 1)];

/// Two-photon single-mode basis `|2,0⟩, |1,1⟩, |0,2⟩`; also the qutrit basis.
pub const TWO_PHOTON_BASIS: [(u32, u32); 3] = [(2, 0), (1, 1), (0, 2)];

/// Square matrix with a label for each basis vector.
///
/// Layout: row `i` holds the expansion of `U|labels[i]⟩`, i.e.
/// `U|i⟩ = Σ_j self[(i, j)] |j⟩`. Composition therefore reads left to
/// right: the block of "apply `P`, then `U`" is `P * U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixBlock {
    labels: Vec<(u32, u32)>,
    data: Vec<Complex64>,
}

impl MatrixBlock {
    pub fn from_rows(labels: &[(u32, u32)], rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = labels.len();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(invalid(format!("expected a {d}x{d} matrix")));
        }
        Ok(MatrixBlock {
            labels: labels.to_vec(),
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(labels: &[(u32, u32)]) -> Self {
        Self::diagonal(labels, &vec![Complex64::new(1.0, 0.0); labels.len()])
    }

    pub fn diagonal(labels: &[(u32, u32)], diag: &[Complex64]) -> Self {
        let d = labels.len();
        let mut data = vec![Complex64::default(); d * d];
        for (i, &v) in diag.iter().enumerate() {
            data[i * d + i] = v;
        }
        MatrixBlock {
            labels: labels.to_vec(),
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[(u32, u32)] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim()).map(<[_]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim();
        let data = (0..d * d).map(|k| self.get(k % d, k / d)).collect();
        MatrixBlock {
            labels: self.labels.clone(),
            data,
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.data.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn max_abs_diff(&self, other: &MatrixBlock) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|U U† − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self * &self.adjoint();
        prod.max_abs_diff(&MatrixBlock::identity(&self.labels))
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let err = self.unitarity_error();
        if err <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary(err))
        }
    }
}

impl Mul for &MatrixBlock {
    type Output = MatrixBlock;

    fn mul(self, rhs: &MatrixBlock) -> MatrixBlock {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        let d = self.dim();
        let mut data = vec![Complex64::default(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                for j in 0..d {
                    data[i * d + j] += a * rhs.get(k, j);
                }
            }
        }
        MatrixBlock {
            labels: self.labels.clone(),
            data,
        }
    }
}
