//! Courant algebroids on a coordinate patch, given by frame data.
//!
//! With frame `e_1..e_r`: `⟨e_i, e_j⟩ = G[i][j]`, `ρ(e_j) = Σ_i Rho[i][j] ∂_i`,
//! `⟦e_i, e_j⟧ = Σ_k c[i][j][k] e_k`. Everything else is extended from the
//! frame by the Leibniz rules.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::battery::Battery;
use crate::linalg::Matrix;
use crate::report::{AxiomReport, Check};
use crate::scalar::{Scalar, MAX_VARS};
use crate::vector::frame_vector;

frame_vector!(
    /// A section `Σ g^i e_i` by its frame components.
    Section
);

frame_vector!(
    /// A one-form `Σ a_l dx^l` by its coordinate components.
    OneForm
);

impl OneForm {
    pub fn exact(n: usize, f: &Scalar) -> OneForm {
        OneForm((0..n).map(|l| f.derivative(l)).collect())
    }

    /// `α(X)` for a vector field given by components.
    pub fn contract(&self, x: &[Scalar]) -> Scalar {
        dot(&self.0, x)
    }

    /// `i_X dα`, with `(i_X dα)_l = Σ_m X^m (∂_m α_l − ∂_l α_m)`.
    pub fn interior_differential(&self, x: &[Scalar]) -> OneForm {
        let n = self.0.len();
        let mut out = vec![Scalar::zero(); n];
        for (l, o) in out.iter_mut().enumerate() {
            for (m, xm) in x.iter().enumerate() {
                if xm.is_zero() || l == m {
                    continue;
                }
                let curl = self.0[l].derivative(m) - self.0[m].derivative(l);
                if !curl.is_zero() {
                    *o = &*o + &(xm * &curl);
                }
            }
        }
        OneForm(out)
    }

    /// Lie derivative `𝓛_X α = i_X dα + d(α(X))`.
    pub fn lie_derivative(&self, x: &[Scalar]) -> OneForm {
        self.interior_differential(x)
            .add(&OneForm::exact(self.0.len(), &self.contract(x)))
    }
}

pub(crate) fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + x * y;
        }
    }
    acc
}

/// `X(f) = Σ_l X^l ∂_l f`.
pub fn apply_vector_field(x: &[Scalar], f: &Scalar) -> Scalar {
    if f.is_constant() {
        return Scalar::zero();
    }
    let mut acc = Scalar::zero();
    for (l, xl) in x.iter().enumerate() {
        if !xl.is_zero() {
            let d = f.derivative(l);
            if !d.is_zero() {
                acc = acc + xl * &d;
            }
        }
    }
    acc
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("base dimension {0} must be at least 1 here")]
    BaseDimension(usize),
    #[error("at most {MAX_VARS} coordinates are supported, got {0}")]
    TooManyVariables(usize),
    #[error("pairing matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("det(G) = {0} is not a nonzero constant")]
    BadDeterminant(String),
    #[error("structure constants not antisymmetric at ({i}, {j}): c_ij + c_ji = {residual}")]
    NotAntisymmetric { i: usize, j: usize, residual: String },
    #[error("connection on V is not flat: R(∂{i}, ∂{j}) has entry {residual}")]
    NotFlat { i: usize, j: usize, residual: String },
    #[error("section of length {got}, expected {expected}")]
    SectionLength { got: usize, expected: usize },
    #[error("scalar uses coordinate x{0} beyond the base dimension")]
    CoordinateOutOfRange(usize),
}

#[derive(Clone, Debug)]
pub struct CourantAlgebroid {
    n: usize,
    r: usize,
    g: Matrix<Scalar>,
    g_inv: Matrix<Scalar>,
    rho: Matrix<Scalar>,
    rho_star: Matrix<Scalar>,
    c: Vec<Section>,
    c_vanishes: bool,
}

impl CourantAlgebroid {
    /// Generic loader; validates shapes, symmetry of `G` and `det(G)`,
    /// but not the axioms.
    pub fn from_structure_data(
        n: usize,
        r: usize,
        g: Matrix<Scalar>,
        rho: Matrix<Scalar>,
        c: Vec<Vec<Section>>,
    ) -> Result<CourantAlgebroid, AlgebroidError> {
        if r == 0 {
            return Err(AlgebroidError::ZeroRank);
        }
        if n > MAX_VARS {
            return Err(AlgebroidError::TooManyVariables(n));
        }
        if (g.rows(), g.cols()) != (r, r) {
            return Err(AlgebroidError::Shape(format!("G is {}x{}, expected {r}x{r}", g.rows(), g.cols())));
        }
        if (rho.rows(), rho.cols()) != (n, r) {
            return Err(AlgebroidError::Shape(format!(
                "Rho is {}x{}, expected {n}x{r}",
                rho.rows(),
                rho.cols()
            )));
        }
        if c.len() != r || c.iter().any(|row| row.len() != r || row.iter().any(|s| s.len() != r)) {
            return Err(AlgebroidError::Shape(format!("bracket data must be {r}x{r} sections of length {r}")));
        }
        for i in 0..r {
            for j in 0..i {
                if g[(i, j)] != g[(j, i)] {
                    return Err(AlgebroidError::NotSymmetric { i, j });
                }
            }
        }
        let all = g.entries().chain(rho.entries()).chain(c.iter().flatten().flat_map(|s| s.0.iter()));
        for s in all {
            if let Some(v) = s.max_var() {
                if v >= n {
                    return Err(AlgebroidError::CoordinateOutOfRange(v + 1));
                }
            }
        }
        let det = g.determinant();
        if !det.is_constant() || det.is_zero() {
            return Err(AlgebroidError::BadDeterminant(det.to_string()));
        }
        let g_inv = g.inverse().expect("invertible: det is a nonzero constant");
        let rho_star = g_inv.mul(&rho.transpose());
        let c: Vec<Section> = c.into_iter().flatten().collect();
        let c_vanishes = c.iter().all(Section::is_zero);
        Ok(CourantAlgebroid { n, r, g, g_inv, rho, rho_star, c, c_vanishes })
    }

    /// `TM ⊕ T*M` on ℝⁿ with frame `(∂_1..∂_n, dx^1..dx^n)`.
    pub fn standard(n: usize) -> Result<CourantAlgebroid, AlgebroidError> {
        if n < 1 {
            return Err(AlgebroidError::BaseDimension(n));
        }
        let r = 2 * n;
        let g = Matrix::from_fn(r, r, |i, j| {
            if (i < n && j == i + n) || (j < n && i == j + n) {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let rho = Matrix::from_fn(n, r, |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
        let c = vec![vec![Section::zero(r); r]; r];
        CourantAlgebroid::from_structure_data(n, r, g, rho, c)
    }

    /// Courant algebroid over a point: `c[i][j][k]` are structure
    /// constants, `g` the invariant form. Invariance and Jacobi are checked
    /// by [`check_quadratic_lie_algebra`], not here.
    pub fn quadratic_lie_algebra(
        c: &[Vec<Vec<BigRational>>],
        g: &[Vec<BigRational>],
    ) -> Result<CourantAlgebroid, AlgebroidError> {
        let r = g.len();
        if c.len() != r || c.iter().any(|row| row.len() != r || row.iter().any(|v| v.len() != r)) {
            return Err(AlgebroidError::Shape(format!("structure constants must be {r}x{r}x{r}")));
        }
        if g.iter().any(|row| row.len() != r) {
            return Err(AlgebroidError::Shape(format!("G must be {r}x{r}")));
        }
        for i in 0..r {
            for j in 0..=i {
                for k in 0..r {
                    let s = &c[i][j][k] + &c[j][i][k];
                    if !s.is_zero() {
                        return Err(AlgebroidError::NotAntisymmetric { i, j, residual: s.to_string() });
                    }
                }
            }
        }
        let gm = Matrix::from_fn(r, r, |i, j| Scalar::from_rational(g[i][j].clone()));
        let cs = c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| Section(v.iter().cloned().map(Scalar::from_rational).collect()))
                    .collect()
            })
            .collect();
        CourantAlgebroid::from_structure_data(0, r, gm, Matrix::zeros(0, r), cs)
    }

    /// `TM ⊕ T*M ⊕ V ⊕ V*` with frame `(∂_i, dx^i, v_a, v^a)` and a flat
    /// connection Δ on the trivial bundle V.
    pub fn port_hamiltonian(delta: &Christoffel) -> Result<CourantAlgebroid, AlgebroidError> {
        let (n, v) = (delta.n, delta.v);
        if n < 1 {
            return Err(AlgebroidError::BaseDimension(n));
        }
        delta.check_flat()?;
        let r = 2 * n + 2 * v;
        let (tm, ctm, vv, vd) = (0, n, 2 * n, 2 * n + v);
        let g = Matrix::from_fn(r, r, |i, j| {
            let paired = (i < n && j == i + ctm)
                || (j < n && i == j + ctm)
                || (i >= vv && i < vd && j == i + v)
                || (j >= vv && j < vd && i == j + v);
            if paired {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let rho = Matrix::from_fn(n, r, |i, j| if j == tm + i { Scalar::one() } else { Scalar::zero() });
        let mut c = vec![vec![Section::zero(r); r]; r];
        for i in 0..n {
            for a in 0..v {
                for b in 0..v {
                    let gab = delta.get(i, a, b);
                    if gab.is_zero() {
                        continue;
                    }
                    // ⟦∂_i, v_a⟧ = Δ_i v_a
                    c[tm + i][vv + a].0[vv + b] = &c[tm + i][vv + a].0[vv + b] + gab;
                    c[vv + a][tm + i].0[vv + b] = &c[vv + a][tm + i].0[vv + b] - gab;
                    // ⟦∂_i, v^b⟧ = Δ*_i v^b = −Σ_a Γ[i][a][b] v^a
                    c[tm + i][vd + b].0[vd + a] = &c[tm + i][vd + b].0[vd + a] - gab;
                    c[vd + b][tm + i].0[vd + a] = &c[vd + b][tm + i].0[vd + a] + gab;
                    // ⟦v^b, v_a⟧ = ⟨Δ*_· v^b, v_a⟩, ⟦v_a, v^b⟧ = ⟨v^b, Δ_· v_a⟩
                    c[vd + b][vv + a].0[ctm + i] = &c[vd + b][vv + a].0[ctm + i] - gab;
                    c[vv + a][vd + b].0[ctm + i] = &c[vv + a][vd + b].0[ctm + i] + gab;
                }
            }
        }
        CourantAlgebroid::from_structure_data(n, r, g, rho, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn pairing_matrix(&self) -> &Matrix<Scalar> {
        &self.g
    }

    pub fn pairing_inverse(&self) -> &Matrix<Scalar> {
        &self.g_inv
    }

    pub fn anchor_matrix(&self) -> &Matrix<Scalar> {
        &self.rho
    }

    /// `G⁻¹ Rhoᵀ`, the matrix of `ρ*` on one-forms.
    pub fn coanchor_matrix(&self) -> &Matrix<Scalar> {
        &self.rho_star
    }

    /// Frame bracket `⟦e_i, e_j⟧`.
    pub fn structure(&self, i: usize, j: usize) -> &Section {
        &self.c[i * self.r + j]
    }

    pub fn frame(&self, i: usize) -> Section {
        Section::basis(self.r, i)
    }

    pub fn check_section(&self, s: &Section) -> Result<(), AlgebroidError> {
        if s.len() != self.r {
            return Err(AlgebroidError::SectionLength { got: s.len(), expected: self.r });
        }
        Ok(())
    }

    pub fn pairing(&self, a: &Section, b: &Section) -> Result<Scalar, AlgebroidError> {
        self.check_section(a)?;
        self.check_section(b)?;
        Ok(self.pair(a, b))
    }

    pub fn bracket(&self, a: &Section, b: &Section) -> Result<Section, AlgebroidError> {
        self.check_section(a)?;
        self.check_section(b)?;
        Ok(self.brk(a, b))
    }

    pub(crate) fn pair(&self, a: &Section, b: &Section) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.r {
            if a.0[i].is_zero() {
                continue;
            }
            for j in 0..self.r {
                let gij = &self.g[(i, j)];
                if gij.is_zero() || b.0[j].is_zero() {
                    continue;
                }
                acc = acc + &(&a.0[i] * gij) * &b.0[j];
            }
        }
        acc
    }

    /// Components of the vector field `ρ(σ)`.
    pub fn anchor_vector(&self, s: &Section) -> Vec<Scalar> {
        self.rho.mul_vec(&s.0)
    }

    /// `ρ(σ)(f)`.
    pub fn anchor_apply(&self, s: &Section, f: &Scalar) -> Scalar {
        if self.n == 0 {
            return Scalar::zero();
        }
        apply_vector_field(&self.anchor_vector(s), f)
    }

    /// `d_E f = ρ*(df)`, characterized by `⟨d_E f, σ⟩ = ρ(σ)(f)`.
    pub fn d_e(&self, f: &Scalar) -> Section {
        self.coanchor(&OneForm::exact(self.n, f))
    }

    /// `ρ*(α)`.
    pub fn coanchor(&self, alpha: &OneForm) -> Section {
        Section(self.rho_star.mul_vec(&alpha.0))
    }

    pub(crate) fn brk(&self, a: &Section, b: &Section) -> Section {
        let r = self.r;
        let mut out = vec![Scalar::zero(); r];
        if !self.c_vanishes {
            for i in 0..r {
                if a.0[i].is_zero() {
                    continue;
                }
                for j in 0..r {
                    if b.0[j].is_zero() {
                        continue;
                    }
                    let cij = self.structure(i, j);
                    if cij.is_zero() {
                        continue;
                    }
                    let gh = &a.0[i] * &b.0[j];
                    for (o, ck) in out.iter_mut().zip(&cij.0) {
                        if !ck.is_zero() {
                            *o = &*o + &(&gh * ck);
                        }
                    }
                }
            }
        }
        if self.n == 0 {
            return Section(out);
        }
        // ρ(a)(h^k) − ρ(b)(g^k) + Σ_i (G b)_i (d_E a^i)^k
        let x = self.anchor_vector(a);
        let y = self.anchor_vector(b);
        for k in 0..r {
            let t = apply_vector_field(&x, &b.0[k]) - apply_vector_field(&y, &a.0[k]);
            out[k] = &out[k] + &t;
        }
        let gb = self.g.mul_vec(&b.0);
        let mut w = vec![Scalar::zero(); self.n];
        for (i, gbi) in gb.iter().enumerate() {
            if gbi.is_zero() || a.0[i].is_constant() {
                continue;
            }
            for (l, wl) in w.iter_mut().enumerate() {
                let d = a.0[i].derivative(l);
                if !d.is_zero() {
                    *wl = &*wl + &(gbi * &d);
                }
            }
        }
        if w.iter().any(|s| !s.is_zero()) {
            for (o, t) in out.iter_mut().zip(self.rho_star.mul_vec(&w)) {
                *o = &*o + &t;
            }
        }
        Section(out)
    }

    /// Checks the defining axioms and derived properties on the battery.
    pub fn verify_axioms(&self, battery: &Battery) -> AxiomReport {
        verify_axioms(self, battery)
    }
}

/// Christoffel symbols of a connection Δ on a trivial rank-`v` bundle over
/// ℝⁿ: `Δ_{∂_i} v_a = Σ_b gamma(i, a, b) v_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Christoffel {
    pub n: usize,
    pub v: usize,
    gamma: Vec<Scalar>,
}

impl Christoffel {
    pub fn trivial(n: usize, v: usize) -> Christoffel {
        Christoffel { n, v, gamma: vec![Scalar::zero(); n * v * v] }
    }

    /// `f(i, a, b)` gives the coefficient of `v_b` in `Δ_{∂_i} v_a`.
    pub fn from_fn(n: usize, v: usize, f: impl Fn(usize, usize, usize) -> Scalar) -> Christoffel {
        let mut gamma = Vec::with_capacity(n * v * v);
        for i in 0..n {
            for a in 0..v {
                for b in 0..v {
                    gamma.push(f(i, a, b));
                }
            }
        }
        Christoffel { n, v, gamma }
    }

    pub fn get(&self, i: usize, a: usize, b: usize) -> &Scalar {
        &self.gamma[(i * self.v + a) * self.v + b]
    }

    /// Matrix of `R(∂_i, ∂_j) = [Δ_i, Δ_j]`; entry `(a, b)` is the
    /// coefficient of `v_b` in `R(∂_i, ∂_j) v_a`.
    pub fn curvature(&self, i: usize, j: usize) -> Matrix<Scalar> {
        Matrix::from_fn(self.v, self.v, |a, b| {
            let mut acc = self.get(j, a, b).derivative(i) - self.get(i, a, b).derivative(j);
            for c in 0..self.v {
                acc = acc + self.get(j, a, c) * self.get(i, c, b) - self.get(i, a, c) * self.get(j, c, b);
            }
            acc
        })
    }

    pub fn check_flat(&self) -> Result<(), AlgebroidError> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if let Some(e) = self.curvature(i, j).entries().find(|e| !e.is_zero()) {
                    return Err(AlgebroidError::NotFlat { i: i + 1, j: j + 1, residual: e.to_string() });
                }
            }
        }
        Ok(())
    }
}

/// Well-known quadratic Lie algebras.
pub mod catalog {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn diag(entries: &[i64]) -> Vec<Vec<BigRational>> {
        let r = entries.len();
        (0..r)
            .map(|i| (0..r).map(|j| if i == j { q(entries[i]) } else { q(0) }).collect())
            .collect()
    }

    /// `c[i][j][k] = ε_ijk` on the first three frame elements.
    pub fn su2_constants(r: usize) -> Vec<Vec<Vec<BigRational>>> {
        let mut c = vec![vec![vec![q(0); r]; r]; r];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = q(1);
            c[j][i][k] = q(-1);
        }
        c
    }

    /// su(2) with pairing `diag(g)`.
    pub fn su2_with_metric(g: [i64; 3]) -> CourantAlgebroid {
        CourantAlgebroid::quadratic_lie_algebra(&su2_constants(3), &diag(&g)).expect("valid data")
    }

    pub fn su2() -> CourantAlgebroid {
        su2_with_metric([1, 1, 1])
    }

    /// su(2) ⊕ ℝ with the identity pairing.
    pub fn su2_plus_line() -> CourantAlgebroid {
        CourantAlgebroid::quadratic_lie_algebra(&su2_constants(4), &diag(&[1, 1, 1, 1])).expect("valid data")
    }

    pub fn abelian(r: usize) -> CourantAlgebroid {
        let c = vec![vec![vec![q(0); r]; r]; r];
        CourantAlgebroid::quadratic_lie_algebra(&c, &diag(&vec![1; r])).expect("valid data")
    }
}

fn label_args(b: &Battery, idx: &[usize], fidx: &[usize]) -> Vec<String> {
    let mut out = b.sections.labels(idx);
    out.extend(fidx.iter().map(|&j| b.functions[j].label.clone()));
    out
}

pub fn verify_axioms(e: &CourantAlgebroid, b: &Battery) -> AxiomReport {
    let mut report = AxiomReport::new();
    let sec = |i: usize| b.sections.value(i);

    let mut jacobi = Check::new("jacobi", "⟦e1,⟦e2,e3⟧⟧ = ⟦⟦e1,e2⟧,e3⟧ + ⟦e2,⟦e1,e3⟧⟧");
    let mut compat = Check::new("compatibility", "ρ(e1)⟨e2,e3⟩ = ⟨⟦e1,e2⟧,e3⟩ + ⟨e2,⟦e1,e3⟧⟩");
    for (t, _) in b.cases(3, 0) {
        let (a1, a2, a3) = (sec(t[0]), sec(t[1]), sec(t[2]));
        let b12 = e.brk(a1, a2);
        let b13 = e.brk(a1, a3);
        let lhs = e.brk(a1, &e.brk(a2, a3));
        let rhs = e.brk(&b12, a3).add(&e.brk(a2, &b13));
        jacobi.record_zero(&lhs.sub(&rhs), || label_args(b, &t, &[]));
        let res = e.pair(&b12, a3) + e.pair(a2, &b13) - e.anchor_apply(a1, &e.pair(a2, a3));
        compat.record_zero(&res, || label_args(b, &t, &[]));
    }
    report.push(jacobi);
    report.push(compat);

    let mut sym = Check::new("symmetric-part", "⟦e1,e2⟧ + ⟦e2,e1⟧ = d_E⟨e1,e2⟩");
    for (t, _) in b.cases(2, 0) {
        let (a1, a2) = (sec(t[0]), sec(t[1]));
        let res = e.brk(a1, a2).add(&e.brk(a2, a1)).sub(&e.d_e(&e.pair(a1, a2)));
        sym.record_zero(&res, || label_args(b, &t, &[]));
    }
    report.push(sym);

    let mut hom = Check::new("anchor-homomorphism", "ρ(⟦e1,e2⟧) = [ρ(e1),ρ(e2)]");
    let mut right = Check::new("right-leibniz", "⟦e1,f e2⟧ = f⟦e1,e2⟧ + ρ(e1)(f) e2");
    let mut left = Check::new("left-leibniz", "⟦f e1,e2⟧ = f⟦e1,e2⟧ − ρ(e2)(f) e1 + ⟨e1,e2⟩ d_E f");
    for (t, fi) in b.cases(2, 1) {
        let (a1, a2, f) = (sec(t[0]), sec(t[1]), b.function(fi[0]));
        let b12 = e.brk(a1, a2);
        let res = e.anchor_apply(&b12, f)
            - (e.anchor_apply(a1, &e.anchor_apply(a2, f)) - e.anchor_apply(a2, &e.anchor_apply(a1, f)));
        hom.record_zero(&res, || label_args(b, &t, &fi));
        let res = e
            .brk(a1, &a2.scale(f))
            .sub(&b12.scale(f))
            .sub(&a2.scale(&e.anchor_apply(a1, f)));
        right.record_zero(&res, || label_args(b, &t, &fi));
        let res = e
            .brk(&a1.scale(f), a2)
            .sub(&b12.scale(f))
            .add(&a1.scale(&e.anchor_apply(a2, f)))
            .sub(&e.d_e(f).scale(&e.pair(a1, a2)));
        left.record_zero(&res, || label_args(b, &t, &fi));
    }
    report.push(hom);
    report.push(right);
    report.push(left);

    let mut rr = Check::new("anchor-coanchor", "ρ ∘ ρ* = 0, i.e. Rho·G⁻¹·Rhoᵀ = 0");
    let m = e.rho.mul(&e.rho_star);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            rr.record_zero(&m[(i, j)], || vec![format!("entry ({}, {})", i + 1, j + 1)]);
        }
    }
    report.push(rr);

    let mut lie = Check::new("coanchor-lie", "⟦e, ρ*(α)⟧ = ρ*(𝓛_{ρ(e)} α)");
    let mut ins = Check::new("coanchor-interior", "⟦ρ*(α), e⟧ = −ρ*(i_{ρ(e)} dα)");
    for (t, ai) in b.form_cases(1, 1) {
        let (s, alpha) = (sec(t[0]), &b.forms[ai[0]].value);
        let x = e.anchor_vector(s);
        let ra = e.coanchor(alpha);
        let res = e.brk(s, &ra).sub(&e.coanchor(&alpha.lie_derivative(&x)));
        let args = || vec![b.sections.label(t[0]).to_string(), b.forms[ai[0]].label.clone()];
        lie.record_zero(&res, args);
        let res = e.brk(&ra, s).add(&e.coanchor(&alpha.interior_differential(&x)));
        ins.record_zero(&res, args);
    }
    report.push(lie);
    report.push(ins);
    report
}

/// Ad-invariance of the pairing and the Jacobi identity of the structure
/// constants, for algebroids over a point.
pub fn check_quadratic_lie_algebra(e: &CourantAlgebroid) -> AxiomReport {
    let r = e.rank();
    let mut report = AxiomReport::new();
    let mut inv = Check::new("ad-invariance", "⟨[u,v],w⟩ + ⟨v,[u,w]⟩ = 0");
    let mut jac = Check::new("lie-jacobi", "[u,[v,w]] = [[u,v],w] + [v,[u,w]]");
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let (u, v, w) = (e.frame(i), e.frame(j), e.frame(k));
                let args = || vec![format!("e{}", i + 1), format!("e{}", j + 1), format!("e{}", k + 1)];
                let res = e.pair(e.structure(i, j), &w) + e.pair(&v, e.structure(i, k));
                inv.record_zero(&res, args);
                let lhs = e.brk(&u, e.structure(j, k));
                let rhs = e.brk(e.structure(i, j), &w).add(&e.brk(&v, e.structure(i, k)));
                jac.record_zero(&lhs.sub(&rhs), args);
            }
        }
    }
    if e.n() != 0 {
        inv.fail(vec![], format!("base dimension {} is not zero", e.n()));
    }
    report.push(inv);
    report.push(jac);
    report
}
