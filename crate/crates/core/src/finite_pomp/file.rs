use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::FinitePomp;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// On-disk model:
/// `{"n":4,"m":1,"K":2,"T":[[..]],"Q":[..],"H":[[..]]}` with an optional
/// `"B"` that must agree with the channel recomputed from `(Q, H)` and
/// optional `"positions"` giving each state a location on the real line
/// (used by the bounded-Lipschitz diagnostic; defaults to the state index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<usize>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<f64>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model file serialises")
    }

    /// SHA-256 of the canonical (compact, field-ordered) serialisation.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn build<T: Scalar>(&self) -> Result<FinitePomp<T>> {
        if self.t.len() != self.n || self.h.len() != self.n {
            return Err(Error::InvalidModel(format!(
                "n = {} but T has {} rows and H has {}",
                self.n,
                self.t.len(),
                self.h.len()
            )));
        }
        if self.q.len() != self.m {
            return Err(Error::InvalidModel(format!("m = {} but Q has {}", self.m, self.q.len())));
        }
        if let Some(pos) = &self.positions {
            if pos.len() != self.n || pos.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidModel("positions must be n finite reals".into()));
            }
        }
        let t = Matrix::from_f64_rows(&self.t).map_err(|e| Error::InvalidModel(e.to_string()))?;
        let q: Vec<T> = self.q.iter().map(|&x| T::lit(x)).collect();
        let model = FinitePomp::new(t, q, self.h.clone(), self.k)?;
        if let Some(b) = &self.b {
            let stored =
                Matrix::<T>::from_f64_rows(b).map_err(|e| Error::InvalidModel(e.to_string()))?;
            if stored.rows() != self.n || stored.cols() != self.k {
                return Err(Error::InvalidModel("B has the wrong shape".into()));
            }
            let diff = stored.max_abs_diff(model.channel()).as_f64();
            if diff > T::DIST_TOL {
                return Err(Error::InvalidModel(format!(
                    "stored B differs from the channel implied by (Q, H) by {diff:e}"
                )));
            }
        }
        Ok(model)
    }

    pub fn positions(&self) -> Vec<f64> {
        self.positions.clone().unwrap_or_else(|| (0..self.n).map(|i| i as f64).collect())
    }

    pub fn from_model<T: Scalar>(model: &FinitePomp<T>) -> Self {
        Self {
            n: model.states(),
            m: model.noise_symbols(),
            k: model.outputs(),
            t: model.transition().to_f64_rows(),
            q: model.noise().iter().map(|x| x.as_f64()).collect(),
            h: model.assignment().to_vec(),
            b: None,
            positions: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{"n":4,"m":1,"K":2,
        "T":[[0,0.25,0.25,0.5],[0.5,0,0,0.5],[0,0.25,0.25,0.5],[0.5,0,0,0.5]],
        "Q":[1.0],"H":[[1],[1],[0],[0]],
        "B":[[0,1],[0,1],[1,0],[1,0]]}"#;

    #[test]
    fn parses_and_validates_b() {
        let f = ModelFile::from_json(EXAMPLE).unwrap();
        let m = f.build::<f64>().unwrap();
        assert_eq!(m.channel().row(2), &[1.0, 0.0]);
        assert_eq!(f.positions(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn inconsistent_b_is_rejected() {
        let bad = EXAMPLE.replace(r#""B":[[0,1],[0,1],[1,0],[1,0]]"#, r#""B":[[1,0],[0,1],[1,0],[1,0]]"#);
        let f = ModelFile::from_json(&bad).unwrap();
        assert!(matches!(f.build::<f64>(), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn non_stochastic_t_is_rejected() {
        let bad = EXAMPLE.replace("[0.5,0,0,0.5],[0,0.25", "[0.5,0,0,0.6],[0,0.25");
        let f = ModelFile::from_json(&bad).unwrap();
        assert!(matches!(f.build::<f64>(), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn digest_is_stable_under_whitespace() {
        let a = ModelFile::from_json(EXAMPLE).unwrap();
        let b = ModelFile::from_json(&EXAMPLE.replace('\n', " ")).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
