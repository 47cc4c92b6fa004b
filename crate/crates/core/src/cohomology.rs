//! Standard cohomology of a Courant algebroid over a point.
//!
//! With n = 0 there are no one-forms, so every `k > 0` component vanishes
//! and the symmetry condition makes `ω₀` alternating: `𝒞^p` has the basis
//! `ε^I`, `I` a strictly increasing multi-index, ordered lexicographically.
//! Only the bracket sum of `d` survives:
//! `(dω)(e_1,…,e_{p+1}) = Σ_{i<j} (−1)^{i+j} ω(⟦e_i,e_j⟧, e_1,…,ê_i,…,ê_j,…)`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebroid::{CourantAlgebroid, Section};
use crate::battery::{Battery, BatteryConfig};
use crate::cochain::{check_symmetry_condition, Cochain, CochainError, MAX_DEGREE};
use crate::linalg::Matrix;
use crate::report::{Check, Report};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("cohomology is computed over a point only; base dimension is {0}")]
    NotPoint(usize),
    #[error("degree {p} outside 0..={r}")]
    DegreeOutOfRange { p: usize, r: usize },
    #[error("structure data is not constant: {0}")]
    NotConstant(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

/// The finite-dimensional complex `(𝒞^•, d)` of a quadratic Lie algebra.
#[derive(Clone, Debug)]
pub struct PointComplex {
    alg: CourantAlgebroid,
    bases: Vec<Vec<Vec<usize>>>,
    /// `d[p]`: `𝒞^p → 𝒞^{p+1}`, rows indexed by `bases[p+1]`.
    d: Vec<Matrix<BigRational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyRow {
    pub p: usize,
    pub dim: usize,
    pub rank_d: usize,
    pub betti: usize,
}

fn constant(s: &Scalar) -> Result<BigRational, CohomologyError> {
    s.as_constant().ok_or_else(|| CohomologyError::NotConstant(s.to_string()))
}

/// Strictly increasing `p`-subsets of `0..r` in lexicographic order.
fn subsets(r: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=r - left {
            cur.push(i);
            go(i + 1, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= r {
        go(0, r, p, &mut Vec::new(), &mut out);
    }
    out
}

/// Sign of the permutation sorting `m` followed by the sorted `rest`, or
/// `None` when `m` already occurs in `rest`.
fn insertion_sign(m: usize, rest: &[usize]) -> Option<(Vec<usize>, bool)> {
    if rest.contains(&m) {
        return None;
    }
    let pos = rest.iter().filter(|&&x| x < m).count();
    let mut sorted = rest.to_vec();
    sorted.insert(pos, m);
    Some((sorted, pos % 2 == 1))
}

impl PointComplex {
    pub fn new(alg: &CourantAlgebroid) -> Result<PointComplex, CohomologyError> {
        if alg.n() != 0 {
            return Err(CohomologyError::NotPoint(alg.n()));
        }
        let r = alg.rank();
        let bases: Vec<Vec<Vec<usize>>> = (0..=r).map(|p| subsets(r, p)).collect();
        // ⟦e_a, e_b⟧ as rational vectors.
        let mut brk = vec![vec![Vec::new(); r]; r];
        for (a, row) in brk.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = alg.structure(a, b).0.iter().map(constant).collect::<Result<Vec<_>, _>>()?;
            }
        }
        let mut d = Vec::with_capacity(r + 1);
        for p in 0..=r {
            let rows = if p < r { bases[p + 1].len() } else { 0 };
            let mut m = Matrix::zeros(rows, bases[p].len());
            if p < r {
                let index = |set: &[usize]| bases[p].binary_search_by(|probe| probe.as_slice().cmp(set)).ok();
                for (row, j) in bases[p + 1].iter().enumerate() {
                    for a in 0..j.len() {
                        for b in a + 1..j.len() {
                            let rest: Vec<usize> =
                                j.iter().enumerate().filter(|&(q, _)| q != a && q != b).map(|(_, &x)| x).collect();
                            let outer = (a + b) % 2 == 1;
                            for (mi, coeff) in brk[j[a]][j[b]].iter().enumerate() {
                                if coeff.is_zero() {
                                    continue;
                                }
                                let Some((set, odd)) = insertion_sign(mi, &rest) else { continue };
                                let col = index(&set).expect("basis contains every sorted subset");
                                let term = if outer != odd { -coeff.clone() } else { coeff.clone() };
                                m[(row, col)] = &m[(row, col)] + &term;
                            }
                        }
                    }
                }
            }
            d.push(m);
        }
        Ok(PointComplex { alg: alg.clone(), bases, d })
    }

    pub fn rank(&self) -> usize {
        self.alg.rank()
    }

    pub fn dim(&self, p: usize) -> usize {
        self.bases.get(p).map_or(0, Vec::len)
    }

    pub fn basis(&self, p: usize) -> Result<&[Vec<usize>], CohomologyError> {
        self.bases
            .get(p)
            .map(Vec::as_slice)
            .ok_or(CohomologyError::DegreeOutOfRange { p, r: self.rank() })
    }

    /// Matrix of `d: 𝒞^p → 𝒞^{p+1}` on the lexicographic bases.
    pub fn differential_matrix(&self, p: usize) -> Result<&Matrix<BigRational>, CohomologyError> {
        self.d.get(p).ok_or(CohomologyError::DegreeOutOfRange { p, r: self.rank() })
    }

    fn rank_d(&self, p: usize) -> usize {
        self.d.get(p).map_or(0, Matrix::rank)
    }

    pub fn betti(&self, p: usize) -> Result<usize, CohomologyError> {
        if p > self.rank() {
            return Err(CohomologyError::DegreeOutOfRange { p, r: self.rank() });
        }
        let incoming = if p == 0 { 0 } else { self.rank_d(p - 1) };
        Ok(self.dim(p) - self.rank_d(p) - incoming)
    }

    pub fn table(&self, max_p: usize) -> Vec<CohomologyRow> {
        (0..=max_p.min(self.rank()))
            .map(|p| CohomologyRow {
                p,
                dim: self.dim(p),
                rank_d: self.rank_d(p),
                betti: self.betti(p).expect("p within range"),
            })
            .collect()
    }

    /// `(Σ(−1)^p dim 𝒞^p, Σ(−1)^p betti(p))`.
    pub fn euler_characteristics(&self) -> (i64, i64) {
        let alt = |p: usize, v: usize| if p % 2 == 0 { v as i64 } else { -(v as i64) };
        let table = self.table(self.rank());
        (
            table.iter().map(|row| alt(row.p, row.dim)).sum(),
            table.iter().map(|row| alt(row.p, row.betti)).sum(),
        )
    }

    /// The basis cochain `ε^I` as a product of section leaves `ε^i = ⟨G⁻¹e_i, ·⟩`.
    pub fn basis_cochain(&self, set: &[usize]) -> Cochain {
        let ginv = self.alg.pairing_inverse();
        set.iter().fold(Cochain::scalar(Scalar::one()), |acc, &i| {
            acc.mul(&Cochain::section(Section(ginv.row(i).to_vec())))
        })
    }

    /// d² = 0 on matrices, Euler characteristic consistency, agreement of
    /// every matrix entry with the generic evaluator, and the alternating
    /// identification via the symmetry condition.
    pub fn verify(&self) -> Result<Report, CohomologyError> {
        let r = self.rank();
        let mut report = Report::new();
        let mut dd = Check::new("d-squared", "d_{p+1}·d_p = 0");
        for p in 0..r.saturating_sub(1) {
            let prod = self.d[p + 1].mul(&self.d[p]);
            dd.record(prod.is_zero(), || vec![format!("p={p}")], || prod.to_string());
        }
        report.push(dd);

        let (chi_c, chi_h) = self.euler_characteristics();
        let mut euler = Check::new("euler-characteristic", "Σ(−1)^p dim 𝒞^p = Σ(−1)^p betti(p)");
        euler.record(chi_c == chi_h, Vec::new, || format!("{chi_c} vs {chi_h}"));
        report.push(euler);

        let frame: Vec<Section> = (0..r).map(|i| self.alg.frame(i)).collect();
        let mut agree = Check::new("evaluator-agreement", "(dε^I)(e_J) = d-matrix entry (J, I)");
        let mut symmetric = Check::new("alternating-basis", "ε^I satisfies the symmetry condition with ω_{k+1} = 0");
        let battery = Battery::new(&self.alg, BatteryConfig { degree: 0, extras: 1, seed: 1 });
        let top = r.min(MAX_DEGREE as usize - 1);
        for p in 0..=top {
            for (col, set) in self.bases[p].iter().enumerate() {
                let w = self.basis_cochain(set);
                if p >= 2 {
                    let c = check_symmetry_condition(&self.alg, &w, &battery)?;
                    symmetric.record(c.passed(), || vec![format!("{set:?}")], || format!("{:?}", c.witness));
                }
                if p == r {
                    continue;
                }
                let dw = w.d();
                for (row, j) in self.bases[p + 1].iter().enumerate() {
                    let args: Vec<Section> = j.iter().map(|&q| frame[q].clone()).collect();
                    let got = constant(&dw.evaluate(&self.alg, 0, &args, &[])?)?;
                    let want = &self.d[p][(row, col)];
                    agree.record(&got == want, || vec![format!("I={set:?}"), format!("J={j:?}")], || {
                        format!("evaluator {got}, matrix {want}")
                    });
                }
            }
        }
        report.push(agree);
        report.push(symmetric);
        Ok(report)
    }
}
