//! JSON input documents and their conversion into engine types.
//!
//! Indices in keys such as `"i,j"` are 1-based; omitted keys mean zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use courant::algebroid::Christoffel;
use courant::dorfman::{BSection, DorfmanConnection, PredualBundle};
use courant::linalg::Matrix;
use courant::{CourantAlgebroid, Scalar, ScalarRing, Section};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Problems with the input text itself, before any semantic validation.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{context}: {message}")]
    Malformed { context: String, message: String },
}

fn malformed(context: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Malformed { context: context.into(), message: message.into() }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| InputError::Io { path: display.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json { path: display, source })
}

fn scalar(ring: &ScalarRing, text: &str, context: &str) -> Result<Scalar, InputError> {
    ring.parse(text).map_err(|e| malformed(context, format!("{text:?}: {e}")))
}

fn matrix(ring: &ScalarRing, rows: &[Vec<String>], context: &str) -> Result<Matrix<Scalar>, InputError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(malformed(context, "rows have different lengths"));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|t| scalar(ring, t, context)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(if parsed.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(parsed) })
}

fn vector(ring: &ScalarRing, items: &[String], len: usize, context: &str) -> Result<Vec<Scalar>, InputError> {
    if items.len() != len {
        return Err(malformed(context, format!("expected {len} entries, got {}", items.len())));
    }
    items.iter().map(|t| scalar(ring, t, context)).collect()
}

/// Parses a 1-based `"i,j"` key into 0-based indices below the bounds.
fn index_pair(key: &str, bounds: (usize, usize), context: &str) -> Result<(usize, usize), InputError> {
    let bad = || malformed(context, format!("key {key:?} is not \"i,j\" with 1 ≤ i ≤ {}, 1 ≤ j ≤ {}", bounds.0, bounds.1));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 || i > bounds.0 || j > bounds.1 {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

fn render(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

fn render_matrix(m: &Matrix<Scalar>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| render(m.row(i))).collect()
}

fn ring(n: usize, context: &str) -> Result<ScalarRing, InputError> {
    ScalarRing::new(n).map_err(|e| malformed(context, e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidFile {
    pub n: usize,
    pub rank: usize,
    pub pairing: Vec<Vec<String>>,
    pub anchor: Vec<Vec<String>>,
    #[serde(default)]
    pub bracket: BTreeMap<String, Vec<String>>,
}

/// Parsed structure data, not yet validated as an algebroid.
pub struct AlgebroidData {
    pub n: usize,
    pub rank: usize,
    pub pairing: Matrix<Scalar>,
    pub anchor: Matrix<Scalar>,
    pub bracket: Vec<Vec<Section>>,
}

impl AlgebroidFile {
    pub fn parse(&self) -> Result<AlgebroidData, InputError> {
        let (n, r) = (self.n, self.rank);
        let ring = ring(n, "algebroid")?;
        let pairing = matrix(&ring, &self.pairing, "algebroid.pairing")?;
        let anchor = if n == 0 { Matrix::zeros(0, r) } else { matrix(&ring, &self.anchor, "algebroid.anchor")? };
        if pairing.rows() != r || pairing.cols() != r {
            return Err(malformed("algebroid.pairing", format!("expected {r}×{r}")));
        }
        if anchor.rows() != n || anchor.cols() != r {
            return Err(malformed("algebroid.anchor", format!("expected {n}×{r}")));
        }
        let mut bracket = vec![vec![Section::zero(r); r]; r];
        for (key, v) in &self.bracket {
            let context = format!("algebroid.bracket[{key}]");
            let (i, j) = index_pair(key, (r, r), &context)?;
            bracket[i][j] = Section(vector(&ring, v, r, &context)?);
        }
        Ok(AlgebroidData { n, rank: r, pairing, anchor, bracket })
    }

    pub fn from_algebroid(e: &CourantAlgebroid) -> AlgebroidFile {
        let r = e.rank();
        let mut bracket = BTreeMap::new();
        for i in 0..r {
            for j in 0..r {
                let c = e.structure(i, j);
                if !c.is_zero() {
                    bracket.insert(format!("{},{}", i + 1, j + 1), render(&c.0));
                }
            }
        }
        AlgebroidFile {
            n: e.n(),
            rank: r,
            pairing: render_matrix(e.pairing_matrix()),
            anchor: render_matrix(e.anchor_matrix()),
            bracket,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredualFile {
    pub rank: usize,
    #[serde(rename = "pairing_P")]
    pub pairing_p: Vec<Vec<String>>,
    #[serde(rename = "alpha_A")]
    pub alpha_a: Vec<Vec<String>>,
}

impl PredualFile {
    /// `P` (s×r) and `A` (s×n) after shape checks against `e`.
    pub fn parse(&self, e: &CourantAlgebroid) -> Result<(Matrix<Scalar>, Matrix<Scalar>), InputError> {
        let ring = ring(e.n(), "predual")?;
        let s = self.rank;
        let p = matrix(&ring, &self.pairing_p, "predual.pairing_P")?;
        let a = if e.n() == 0 { Matrix::zeros(s, 0) } else { matrix(&ring, &self.alpha_a, "predual.alpha_A")? };
        if p.rows() != s || p.cols() != e.rank() {
            return Err(malformed("predual.pairing_P", format!("expected {s}×{}", e.rank())));
        }
        if a.rows() != s || a.cols() != e.n() {
            return Err(malformed("predual.alpha_A", format!("expected {s}×{}", e.n())));
        }
        Ok((p, a))
    }

    pub fn from_bundle(b: &PredualBundle) -> PredualFile {
        PredualFile {
            rank: b.rank(),
            pairing_p: render_matrix(b.pairing_matrix()),
            alpha_a: render_matrix(b.alpha_matrix()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    /// `"i,j"` ↦ coefficients of `∇_{e_i} b_j` on the B-frame.
    pub gamma: BTreeMap<String, Vec<String>>,
}

impl ConnectionFile {
    pub fn parse(&self, bundle: &PredualBundle) -> Result<Vec<Vec<BSection>>, InputError> {
        let (r, s) = (bundle.algebroid().rank(), bundle.rank());
        let ring = ring(bundle.algebroid().n(), "connection")?;
        let mut gamma = vec![vec![BSection::zero(s); s]; r];
        for (key, v) in &self.gamma {
            let context = format!("connection.gamma[{key}]");
            let (i, j) = index_pair(key, (r, s), &context)?;
            gamma[i][j] = BSection(vector(&ring, v, s, &context)?);
        }
        Ok(gamma)
    }

    pub fn from_connection(conn: &DorfmanConnection) -> ConnectionFile {
        let (r, s) = (conn.bundle().algebroid().rank(), conn.bundle().rank());
        let mut gamma = BTreeMap::new();
        for i in 0..r {
            for j in 0..s {
                let v = conn.gamma(i, j);
                if !v.is_zero() {
                    gamma.insert(format!("{},{}", i + 1, j + 1), render(&v.0));
                }
            }
        }
        ConnectionFile { gamma }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracFile {
    pub frame: Vec<Vec<String>>,
}

impl DiracFile {
    pub fn parse(&self, e: &CourantAlgebroid) -> Result<Vec<Section>, InputError> {
        let ring = ring(e.n(), "dirac")?;
        self.frame
            .iter()
            .enumerate()
            .map(|(i, row)| Ok(Section(vector(&ring, row, e.rank(), &format!("dirac.frame[{}]", i + 1))?)))
            .collect()
    }
}

/// Δ on a trivial rank-`v` bundle over ℝⁿ: `"i,a"` ↦ coefficients of
/// `Δ_{∂_i} v_a` on `(v_1, …, v_v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChristoffelFile {
    pub n: usize,
    pub v: usize,
    #[serde(default)]
    pub gamma: BTreeMap<String, Vec<String>>,
}

impl ChristoffelFile {
    pub fn parse(&self) -> Result<Christoffel, InputError> {
        let (n, v) = (self.n, self.v);
        let ring = ring(n, "christoffel")?;
        let mut table = vec![vec![vec![Scalar::zero(); v]; v]; n];
        for (key, coeffs) in &self.gamma {
            let context = format!("christoffel.gamma[{key}]");
            let (i, a) = index_pair(key, (n, v), &context)?;
            table[i][a] = vector(&ring, coeffs, v, &context)?;
        }
        Ok(Christoffel::from_fn(n, v, |i, a, b| table[i][a][b].clone()))
    }

    pub fn from_christoffel(delta: &Christoffel) -> ChristoffelFile {
        let mut gamma = BTreeMap::new();
        for i in 0..delta.n {
            for a in 0..delta.v {
                let row: Vec<Scalar> = (0..delta.v).map(|b| delta.get(i, a, b).clone()).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    gamma.insert(format!("{},{}", i + 1, a + 1), render(&row));
                }
            }
        }
        ChristoffelFile { n: delta.n, v: delta.v, gamma }
    }
}
