//! Evaluation formulas shared by scalar- and bundle-valued cochains.
//!
//! A cochain component is evaluated on E-arguments and Ω¹-arguments. The
//! f-slot convention `ω̄_k(…; df₁,…) = ω_k(…; f₁,…)` is realized by passing
//! exact forms; general forms are accepted everywhere.

use std::fmt;

use crate::algebroid::{CourantAlgebroid, OneForm, Section};
use crate::linalg::Matrix;
use crate::Scalar;

/// Values a cochain can take: a module over the scalars.
pub trait Fiber: Clone + fmt::Display {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, f: &Scalar) -> Self;
    fn is_zero(&self) -> bool;

    fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Fiber for Scalar {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn scale(&self, f: &Scalar) -> Self {
        self * f
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Fiber for Matrix<Scalar> {
    fn add(&self, other: &Self) -> Self {
        Matrix::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Matrix::sub(self, other)
    }
    fn scale(&self, f: &Scalar) -> Self {
        self.map(|x| x * f)
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
}

/// Evaluates a child component: `(k, E-arguments, Ω¹-arguments) ↦ value`.
pub(crate) type Eval<'a, V> = dyn FnMut(usize, &[Section], &[OneForm]) -> V + 'a;

fn sign<V: Fiber>(v: V, odd: bool) -> V {
    if odd {
        v.neg()
    } else {
        v
    }
}

/// `(a, b)`-shuffles as (first block, second block, odd parity), in
/// lexicographic order of the first block.
pub(crate) fn shuffles(a: usize, b: usize) -> Vec<(Vec<usize>, Vec<usize>, bool)> {
    let total = a + b;
    let mut out = Vec::new();
    let mut first: Vec<usize> = (0..a).collect();
    loop {
        let second: Vec<usize> = (0..total).filter(|i| !first.contains(i)).collect();
        // inversions = Σ_s (first[s] − s)
        let inversions: usize = first.iter().enumerate().map(|(s, &f)| f - s).sum();
        out.push((first.clone(), second, inversions % 2 == 1));
        // next a-subset of 0..total
        let mut i = a;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if first[i] < total - a + i {
                break;
            }
        }
        first[i] += 1;
        for j in i + 1..a {
            first[j] = first[j - 1] + 1;
        }
    }
}

fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// `(ω·η)_k` with signed shuffles of E-arguments and unsigned shuffles of
/// Ω¹-arguments; `mul` multiplies a value of ω by a value of η.
#[allow(clippy::too_many_arguments)]
pub(crate) fn product<A: Fiber, B: Fiber, C: Fiber>(
    p: usize,
    q: usize,
    k: usize,
    secs: &[Section],
    forms: &[OneForm],
    zero: &C,
    left: &mut Eval<A>,
    right: &mut Eval<B>,
    mul: &dyn Fn(&A, &B) -> C,
) -> C {
    let mut acc = zero.clone();
    for i in 0..=k.min(p / 2) {
        let j = k - i;
        if 2 * j > q {
            continue;
        }
        let (a, b) = (p - 2 * i, q - 2 * j);
        debug_assert_eq!(a + b, secs.len());
        let form_shuffles = shuffles(i, j);
        for (s1, s2, odd) in shuffles(a, b) {
            let (ls, rs) = (pick(secs, &s1), pick(secs, &s2));
            for (t1, t2, _) in &form_shuffles {
                let lv = left(i, &ls, &pick(forms, t1));
                if lv.is_zero() {
                    continue;
                }
                let rv = right(j, &rs, &pick(forms, t2));
                if rv.is_zero() {
                    continue;
                }
                acc = acc.add(&sign(mul(&lv, &rv), odd));
            }
        }
    }
    acc
}

/// `(dω)_k(e₁…; α₁…)` for ω of degree `p`, with `act(e, v)` standing for
/// `ρ(e)(v)` on scalars and `∇_e v` on bundle values.
#[allow(clippy::too_many_arguments)]
pub(crate) fn differential<V: Fiber>(
    alg: &CourantAlgebroid,
    p: usize,
    k: usize,
    secs: &[Section],
    forms: &[OneForm],
    zero: &V,
    inner: &mut Eval<V>,
    act: &dyn Fn(&Section, &V) -> V,
) -> V {
    let len = secs.len();
    debug_assert_eq!(len + 2 * k, p + 1);
    let mut acc = zero.clone();
    // Σ_μ ω_{k−1}(ρ*α_μ, e…; α without μ)
    for mu in 0..k {
        let mut s = Vec::with_capacity(len + 1);
        s.push(alg.coanchor(&forms[mu]));
        s.extend_from_slice(secs);
        let f: Vec<OneForm> = forms.iter().enumerate().filter(|(i, _)| *i != mu).map(|(_, a)| a.clone()).collect();
        acc = acc.add(&inner(k - 1, &s, &f));
    }
    if 2 * k > p {
        return acc;
    }
    for i in 0..len {
        let hat: Vec<Section> = secs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s.clone()).collect();
        // (−1)^{i−1} ρ(e_i)(ω_k(ê_i)) with 1-based i
        let v = inner(k, &hat, forms);
        if !v.is_zero() {
            acc = acc.add(&sign(act(&secs[i], &v), i % 2 == 1));
        }
        // (−1)^i ω_k(ê_i; …, i_{ρ(e_i)} dα_μ, …)
        if k > 0 && alg.n() > 0 {
            let x = alg.anchor_vector(&secs[i]);
            for mu in 0..k {
                let beta = forms[mu].interior_differential(&x);
                if beta.is_zero() {
                    continue;
                }
                let mut f = forms.to_vec();
                f[mu] = beta;
                acc = acc.add(&sign(inner(k, &hat, &f), i % 2 == 0));
            }
        }
    }
    // Σ_{i<j} (−1)^i ω_k(…ê_i…, ⟦e_i,e_j⟧ in place of e_j, …)
    for i in 0..len {
        for j in i + 1..len {
            let b = alg.brk(&secs[i], &secs[j]);
            if b.is_zero() {
                continue;
            }
            let mut s: Vec<Section> = Vec::with_capacity(len - 1);
            for (q, e) in secs.iter().enumerate() {
                if q == i {
                    continue;
                }
                s.push(if q == j { b.clone() } else { e.clone() });
            }
            acc = acc.add(&sign(inner(k, &s, forms), i % 2 == 0));
        }
    }
    acc
}
