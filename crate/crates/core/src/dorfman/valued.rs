//! Bundle-valued cochains `H = (H_0,…,H_{⌊p/2⌋})` with values in B or
//! End(B), and the covariant differential `d^∇`.
//!
//! Evaluation mirrors the scalar evaluator; the anchor action in the second
//! sum of the differential is replaced by the connection.

use std::fmt;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebroid::{OneForm, Section};
use crate::battery::Battery;
use crate::cochain::formula::{self, Fiber};
use crate::cochain::{Cochain, CochainError};
use crate::report::{Check, IsZero};
use crate::Scalar;

use super::Connection;

type Component<V> = dyn Fn(usize, &[Section], &[OneForm]) -> V;

pub enum ValuedNode<V> {
    Zero,
    /// Degree-0 leaf.
    Leaf(V),
    /// `ω ⊗ v`.
    Tensor(Cochain, V),
    /// `ω · H`.
    Wedge(Cochain, ValuedCochain<V>),
    /// `d^∇ H`.
    Covariant(ValuedCochain<V>),
    InteriorE(Section, ValuedCochain<V>),
    InteriorF(Scalar, ValuedCochain<V>),
    /// `∇_e = i_e∘d^∇ + d^∇∘i_e`; the last field is that expansion.
    NablaE(Section, ValuedCochain<V>, ValuedCochain<V>),
    /// `𝓛^∇_f = i_f∘d^∇ − d^∇∘i_f`; the last field is that expansion.
    LieFNabla(Scalar, ValuedCochain<V>, ValuedCochain<V>),
    Combination(Vec<(BigRational, ValuedCochain<V>)>),
    /// Components given by a function, e.g. the curvature `(R_0, R_1)`.
    Defined(String, Rc<Component<V>>),
}

struct Inner<V> {
    node: ValuedNode<V>,
    degree: i32,
    order: u32,
    peak: i32,
}

/// Shared, immutable DAG node; degree and order bookkeeping as for
/// scalar cochains.
pub struct ValuedCochain<V>(Rc<Inner<V>>);

impl<V> Clone for ValuedCochain<V> {
    fn clone(&self) -> Self {
        ValuedCochain(Rc::clone(&self.0))
    }
}

impl<V: Fiber + IsZero + 'static> ValuedCochain<V> {
    fn make(node: ValuedNode<V>, degree: i32, order: u32, peak: i32) -> Self {
        let node = if degree < 0 { ValuedNode::Zero } else { node };
        ValuedCochain(Rc::new(Inner { node, degree, order, peak: peak.max(degree) }))
    }

    pub fn zero(degree: i32) -> Self {
        Self::make(ValuedNode::Zero, degree, 1, degree)
    }

    pub fn leaf(v: V) -> Self {
        Self::make(ValuedNode::Leaf(v), 0, 1, 0)
    }

    pub fn tensor(w: &Cochain, v: V) -> Self {
        Self::make(ValuedNode::Tensor(w.clone(), v), w.degree(), w.order(), w.peak_degree())
    }

    /// A cochain of the given degree and order with components `f(k, e, α)`.
    pub fn defined(name: impl Into<String>, degree: i32, order: u32, f: Rc<Component<V>>) -> Self {
        Self::make(ValuedNode::Defined(name.into(), f), degree, order, degree)
    }

    pub fn node(&self) -> &ValuedNode<V> {
        &self.0.node
    }

    pub fn degree(&self) -> i32 {
        self.0.degree
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn peak_degree(&self) -> i32 {
        self.0.peak
    }

    pub fn is_zero_node(&self) -> bool {
        matches!(self.0.node, ValuedNode::Zero)
    }

    /// `ω · H`.
    pub fn wedge(w: &Cochain, h: &Self) -> Self {
        let degree = w.degree() + h.degree();
        let peak = w.peak_degree().max(h.peak_degree());
        if w.is_zero_node() || h.is_zero_node() {
            return Self::make(ValuedNode::Zero, degree, 1, peak);
        }
        Self::make(ValuedNode::Wedge(w.clone(), h.clone()), degree, w.order().max(h.order()), peak)
    }

    /// `d^∇`.
    pub fn covariant(&self) -> Self {
        let degree = self.degree() + 1;
        let peak = self.peak_degree().max(degree);
        if self.is_zero_node() {
            return Self::make(ValuedNode::Zero, degree, 1, peak);
        }
        Self::make(ValuedNode::Covariant(self.clone()), degree, self.order() + 1, peak)
    }

    pub fn interior_e(&self, e: &Section) -> Self {
        let degree = self.degree() - 1;
        if self.is_zero_node() || e.is_zero() {
            return Self::make(ValuedNode::Zero, degree, 1, self.peak_degree());
        }
        Self::make(ValuedNode::InteriorE(e.clone(), self.clone()), degree, self.order(), self.peak_degree())
    }

    pub fn interior_f(&self, f: &Scalar) -> Self {
        let degree = self.degree() - 2;
        if self.is_zero_node() || f.is_constant() {
            return Self::make(ValuedNode::Zero, degree, 1, self.peak_degree());
        }
        Self::make(ValuedNode::InteriorF(f.clone(), self.clone()), degree, self.order(), self.peak_degree())
    }

    /// `∇_e = {i_e, d^∇}`.
    pub fn nabla_e(&self, e: &Section) -> Self {
        let x = self.covariant().interior_e(e).add(&self.interior_e(e).covariant()).expect("equal degrees");
        Self::make(ValuedNode::NablaE(e.clone(), self.clone(), x.clone()), self.degree(), x.order(), x.peak_degree())
    }

    /// `𝓛^∇_f = {i_f, d^∇}`.
    pub fn lie_f(&self, f: &Scalar) -> Self {
        let x = self.covariant().interior_f(f).sub(&self.interior_f(f).covariant()).expect("equal degrees");
        Self::make(
            ValuedNode::LieFNabla(f.clone(), self.clone(), x.clone()),
            self.degree() - 1,
            x.order(),
            x.peak_degree(),
        )
    }

    pub fn combination(terms: Vec<(BigRational, Self)>) -> Result<Self, CochainError> {
        let Some(first) = terms.first() else {
            return Ok(Self::zero(0));
        };
        let degree = first.1.degree();
        if let Some(bad) = terms.iter().find(|t| t.1.degree() != degree) {
            return Err(CochainError::DegreeMismatch(degree, bad.1.degree()));
        }
        let peak = terms.iter().map(|t| t.1.peak_degree()).max().unwrap_or(degree);
        let live: Vec<_> = terms.into_iter().filter(|(c, h)| !c.is_zero() && !h.is_zero_node()).collect();
        if live.is_empty() {
            return Ok(Self::make(ValuedNode::Zero, degree, 1, peak));
        }
        let order = live.iter().map(|t| t.1.order()).max().unwrap_or(1);
        Ok(Self::make(ValuedNode::Combination(live), degree, order, peak))
    }

    pub fn add(&self, other: &Self) -> Result<Self, CochainError> {
        let one = BigRational::one();
        Self::combination(vec![(one.clone(), self.clone()), (one, other.clone())])
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CochainError> {
        let one = BigRational::one();
        Self::combination(vec![(one.clone(), self.clone()), (-one, other.clone())])
    }

    pub fn scale(&self, c: BigRational) -> Self {
        Self::combination(vec![(c, self.clone())]).expect("single term")
    }

    pub fn evaluate(
        &self,
        conn: &dyn Connection<Value = V>,
        k: usize,
        sections: &[Section],
        forms: &[OneForm],
    ) -> Result<V, CochainError> {
        crate::cochain::validate_args(conn.algebroid(), self.degree(), self.peak_degree(), k, sections, forms)?;
        Ok(self.eval(conn, k, sections, forms))
    }

    /// `H_k(e…; f…)` with the f-slots standing for `df`.
    pub fn evaluate_functions(
        &self,
        conn: &dyn Connection<Value = V>,
        k: usize,
        sections: &[Section],
        functions: &[Scalar],
    ) -> Result<V, CochainError> {
        let n = conn.algebroid().n();
        let forms: Vec<OneForm> = functions.iter().map(|f| OneForm::exact(n, f)).collect();
        self.evaluate(conn, k, sections, &forms)
    }

    pub(crate) fn eval(&self, conn: &dyn Connection<Value = V>, k: usize, secs: &[Section], forms: &[OneForm]) -> V {
        let alg = conn.algebroid();
        let zero = conn.zero();
        let p = self.degree();
        if p < 0 || 2 * k as i32 > p {
            return zero;
        }
        match &self.0.node {
            ValuedNode::Zero => zero,
            ValuedNode::Leaf(v) => v.clone(),
            ValuedNode::Tensor(w, v) => {
                let c = w.eval(alg, k, secs, forms);
                if c.is_zero() {
                    zero
                } else {
                    v.scale(&c)
                }
            }
            ValuedNode::Wedge(w, h) => formula::product(
                w.degree() as usize,
                h.degree() as usize,
                k,
                secs,
                forms,
                &zero,
                &mut |i, s, f| w.eval(alg, i, s, f),
                &mut |j, s, f| h.eval(conn, j, s, f),
                &|x: &Scalar, v: &V| v.scale(x),
            ),
            ValuedNode::Covariant(h) => formula::differential(
                alg,
                h.degree() as usize,
                k,
                secs,
                forms,
                &zero,
                &mut |kk, s, f| h.eval(conn, kk, s, f),
                &|e, v| conn.apply(e, v),
            ),
            ValuedNode::InteriorE(e, h) => {
                let mut s = Vec::with_capacity(secs.len() + 1);
                s.push(e.clone());
                s.extend_from_slice(secs);
                h.eval(conn, k, &s, forms)
            }
            ValuedNode::InteriorF(f, h) => {
                let mut fs = Vec::with_capacity(forms.len() + 1);
                fs.push(OneForm::exact(alg.n(), f));
                fs.extend_from_slice(forms);
                h.eval(conn, k + 1, secs, &fs)
            }
            ValuedNode::NablaE(_, _, x) | ValuedNode::LieFNabla(_, _, x) => x.eval(conn, k, secs, forms),
            ValuedNode::Combination(terms) => {
                let mut acc = zero;
                for (c, h) in terms {
                    let v = h.eval(conn, k, secs, forms);
                    if !Fiber::is_zero(&v) {
                        acc = acc.add(&v.scale(&Scalar::from_rational(c.clone())));
                    }
                }
                acc
            }
            ValuedNode::Defined(_, f) => f(k, secs, forms),
        }
    }
}

impl<V: fmt::Display> fmt::Display for ValuedCochain<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            ValuedNode::Zero => write!(f, "0"),
            ValuedNode::Leaf(v) => write!(f, "{v}"),
            ValuedNode::Tensor(w, v) => write!(f, "({w})⊗{v}"),
            ValuedNode::Wedge(w, h) => write!(f, "({w})·({h})"),
            ValuedNode::Covariant(h) => write!(f, "d∇({h})"),
            ValuedNode::InteriorE(e, h) => write!(f, "i_{e}({h})"),
            ValuedNode::InteriorF(s, h) => write!(f, "i_[{s}]({h})"),
            ValuedNode::NablaE(e, h, _) => write!(f, "∇_{e}({h})"),
            ValuedNode::LieFNabla(s, h, _) => write!(f, "L∇_[{s}]({h})"),
            ValuedNode::Combination(terms) => {
                for (i, (c, h)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}*{h}")?;
                }
                Ok(())
            }
            ValuedNode::Defined(name, _) => write!(f, "{name}"),
        }
    }
}

impl<V: fmt::Display> fmt::Debug for ValuedCochain<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Checks `lhs = rhs` componentwise on every battery tuple.
pub fn compare_valued<V: Fiber + IsZero + 'static>(
    conn: &dyn Connection<Value = V>,
    lhs: &ValuedCochain<V>,
    rhs: &ValuedCochain<V>,
    battery: &Battery,
    name: &str,
    identity: &str,
) -> Result<Check, CochainError> {
    let mut check = Check::new(name, identity);
    if lhs.degree() != rhs.degree() {
        check.fail(vec![], format!("degree {} vs {}", lhs.degree(), rhs.degree()));
        return Ok(check);
    }
    let Ok(p) = usize::try_from(lhs.degree()) else {
        return Ok(check);
    };
    for h in [lhs, rhs] {
        if h.peak_degree() > crate::cochain::MAX_DEGREE {
            return Err(CochainError::DegreeCap { degree: h.peak_degree() });
        }
    }
    for k in 0..=p / 2 {
        for (t, fi) in battery.form_cases(p - 2 * k, k) {
            let secs = battery.sections.values(&t);
            let forms: Vec<OneForm> = fi.iter().map(|&j| battery.forms[j].value.clone()).collect();
            let res = lhs.eval(conn, k, &secs, &forms).sub(&rhs.eval(conn, k, &secs, &forms));
            check.record_zero(&res, || {
                let mut args = vec![format!("k={k}")];
                args.extend(battery.sections.labels(&t));
                args.extend(fi.iter().map(|&j| battery.forms[j].label.clone()));
                args
            });
        }
    }
    Ok(check)
}
