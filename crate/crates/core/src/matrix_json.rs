//! JSON exchange format for dense complex matrices and vectors:
//! `{"shape": [rows, cols], "entries": [[re, im], ...]}` in row-major order.
//! Vectors are written as `rows x 1` matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub shape: [usize; 2],
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixJson {
            shape: [rows, cols],
            entries,
        }
    }

    pub fn from_vector(v: &CVector) -> Self {
        MatrixJson {
            shape: [v.len(), 1],
            entries: v.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let [rows, cols] = self.shape;
        if rows.checked_mul(cols) != Some(self.entries.len()) {
            return Err(Error::Format(format!(
                "shape {rows}x{cols} does not match {} entries",
                self.entries.len()
            )));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = self.entries[i * cols + j];
            C64::new(re, im)
        }))
    }

    pub fn to_vector(&self) -> Result<CVector> {
        if self.shape[1] != 1 {
            return Err(Error::Format(format!(
                "expected a column vector, got shape {:?}",
                self.shape
            )));
        }
        let m = self.to_matrix()?;
        Ok(m.column(0).into_owned())
    }
}
