//! Instance files: `{"n": int, "H0": [[[re,im], ...]], "V": [[...]], "W": [[...]]?}`
//! with row-major matrices and complex entries as `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleRng;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C};
use crate::operator::MatrixOperator;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(rename = "H0")]
    pub h0: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<[f64; 2]>>>,
}

/// A validated instance: self-adjoint H0 and V, optional self-adjoint W.
#[derive(Debug, Clone)]
pub struct Instance {
    pub h0: MatrixOperator,
    pub v: MatrixOperator,
    pub w: Option<MatrixOperator>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.h0.n()
    }

    /// The analysis direction: W when present, else V.
    pub fn direction(&self) -> &MatrixOperator {
        self.w.as_ref().unwrap_or(&self.v)
    }
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>], n: usize, name: &str) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Instance(format!("{name} is not an {n} x {n} matrix")));
    }
    let data: Vec<C> = rows
        .iter()
        .flat_map(|r| r.iter().map(|&[re, im]| C::new(re, im)))
        .collect();
    CMat::from_shape_vec((n, n), data).map_err(|e| Error::Instance(e.to_string()))
}

fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[[i, j]].re, m[[i, j]].im]).collect())
        .collect()
}

pub fn parse(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Instance(e.to_string()))?;
    if file.n == 0 {
        return Err(Error::Instance("n must be >= 1".into()));
    }
    let h0 = MatrixOperator::hermitian(rows_to_matrix(&file.h0, file.n, "H0")?)
        .map_err(|e| Error::Instance(format!("H0: {e}")))?;
    let v = MatrixOperator::hermitian(rows_to_matrix(&file.v, file.n, "V")?)
        .map_err(|e| Error::Instance(format!("V: {e}")))?;
    let w = match &file.w {
        Some(rows) => Some(
            MatrixOperator::hermitian(rows_to_matrix(rows, file.n, "W")?)
                .map_err(|e| Error::Instance(format!("W: {e}")))?,
        ),
        None => None,
    };
    Ok(Instance { h0, v, w })
}

pub fn to_json(inst: &Instance) -> String {
    let file = InstanceFile {
        n: inst.n(),
        h0: matrix_to_rows(inst.h0.matrix()),
        v: matrix_to_rows(inst.v.matrix()),
        w: inst.w.as_ref().map(|w| matrix_to_rows(w.matrix())),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("serializable");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// H0 and V only.
    HermitianPair,
    /// H0, V, and a separate direction W.
    WithDirection,
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hermitian-pair" => Ok(Self::HermitianPair),
            "with-direction" => Ok(Self::WithDirection),
            other => Err(Error::Instance(format!(
                "unknown instance kind '{other}' (expected hermitian-pair or with-direction)"
            ))),
        }
    }
}

/// Deterministic Gaussian-ensemble instance.
pub fn generate(n: usize, seed: u64, kind: InstanceKind) -> Result<Instance> {
    if n == 0 {
        return Err(Error::Instance("n must be >= 1".into()));
    }
    let mut rng = EnsembleRng::seeded(seed);
    let h0 = MatrixOperator::hermitian(rng.hermitian(n))?;
    let v = MatrixOperator::hermitian(rng.hermitian(n))?;
    let w = match kind {
        InstanceKind::HermitianPair => None,
        InstanceKind::WithDirection => Some(MatrixOperator::hermitian(rng.hermitian(n))?),
    };
    Ok(Instance { h0, v, w })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_determinism() {
        let a = generate(4, 7, InstanceKind::HermitianPair).unwrap();
        let b = generate(4, 7, InstanceKind::HermitianPair).unwrap();
        assert_eq!(to_json(&a), to_json(&b));
        let parsed = parse(&to_json(&a)).unwrap();
        assert_eq!(parsed.h0.matrix(), a.h0.matrix());
        assert!(parsed.w.is_none());
    }

    #[test]
    fn with_direction_has_w() {
        let a = generate(6, 1, InstanceKind::WithDirection).unwrap();
        assert!(a.w.is_some());
        let parsed = parse(&to_json(&a)).unwrap();
        assert_eq!(parsed.w.unwrap().matrix(), a.w.unwrap().matrix());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(generate(0, 1, InstanceKind::HermitianPair).is_err());
        assert!(parse("{").is_err());
        assert!(parse(r#"{"n": 1, "H0": [[[0,0],[1,0]]], "V": [[[0,0]]]}"#).is_err());
    }
}
