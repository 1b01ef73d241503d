//! Matrix files: `{"dim": d, "matrix": [[[re, im], ...], ...]}`, row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, UnitaryOp, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let matrix = m
            .data()
            .chunks(m.cols())
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        MatrixFile {
            dim: m.rows(),
            matrix,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.matrix.len() != self.dim || self.matrix.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Parse(format!(
                "matrix must be {0}x{0} to match \"dim\"",
                self.dim
            )));
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::new(self.dim, self.dim, data)
    }
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let text = super::json::to_stable_string(&MatrixFile::from_matrix(m))
        .map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.to_matrix()
}

pub fn read_unitary(path: &Path) -> Result<UnitaryOp> {
    UnitaryOp::new(read_matrix(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shape_mismatch() {
        let f = MatrixFile {
            dim: 2,
            matrix: vec![vec![[1.0, 0.0]]],
        };
        assert!(matches!(f.to_matrix(), Err(Error::Parse(_))));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_matrix(Path::new("/nonexistent/u.json")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn non_unitary_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        fs::write(&p, r#"{"dim": 2, "matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}"#).unwrap();
        assert!(matches!(read_unitary(&p), Err(Error::NotUnitary(_))));
    }
}
