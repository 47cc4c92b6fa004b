//! Deterministic test batteries.
//!
//! A battery holds frame elements, frame elements scaled by every monomial
//! of degree 1..=D, and `extras` seeded random elements; functions are all
//! monomials of degree ≤ D+1 plus `extras` random polynomials.
//!
//! Tuples of arity `a` are enumerated as: every frame tuple (stride-sampled
//! above [`FRAME_TUPLE_CAP`]); every non-frame element in every slot with
//! rotating frame elements elsewhere; and `extras · a` seeded mixed tuples.
//! Bounded-order operators with polynomial coefficients are pinned down by
//! their values on monomially scaled frames slot by slot; the mixed tuples
//! cover joint non-tensoriality.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{CourantAlgebroid, OneForm, Section};
use crate::scalar::{monomials_up_to, random_polynomial, Scalar};

pub const FRAME_TUPLE_CAP: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BatteryConfig {
    pub degree: u32,
    pub extras: usize,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { degree: 2, extras: 3, seed: 20_240_917 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeled<T> {
    pub label: String,
    pub value: T,
}

impl<T> Labeled<T> {
    pub fn new(label: impl Into<String>, value: T) -> Self {
        Labeled { label: label.into(), value }
    }
}

/// Frame-based family; the first `frame_len` items are the frame.
#[derive(Clone, Debug)]
pub struct Family<T> {
    pub frame_len: usize,
    pub items: Vec<Labeled<T>>,
}

impl<T> Family<T> {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn value(&self, i: usize) -> &T {
        &self.items[i].value
    }

    pub fn label(&self, i: usize) -> &str {
        &self.items[i].label
    }

    pub fn values(&self, idx: &[usize]) -> Vec<T>
    where
        T: Clone,
    {
        idx.iter().map(|&i| self.items[i].value.clone()).collect()
    }

    pub fn labels(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.items[i].label.clone()).collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Family<U> {
        Family {
            frame_len: self.frame_len,
            items: self
                .items
                .iter()
                .map(|l| Labeled::new(l.label.clone(), f(&l.value)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Battery {
    pub config: BatteryConfig,
    pub n: usize,
    pub sections: Family<Section>,
    pub functions: Vec<Labeled<Scalar>>,
    pub forms: Vec<Labeled<OneForm>>,
}

/// Stream identifiers keep the families independent of each other.
const STREAM_SECTIONS: u64 = 1;
const STREAM_FUNCTIONS: u64 = 2;
const STREAM_FORMS: u64 = 3;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Battery {
    pub fn new(alg: &CourantAlgebroid, config: BatteryConfig) -> Battery {
        let n = alg.n();
        let sections = vector_family(n, alg.rank(), "e", config, STREAM_SECTIONS).map(|v| Section(v.clone()));
        let functions = function_family(n, config);
        let forms = form_family(n, &functions, config);
        Battery { config, n, sections, functions, forms }
    }

    /// Same protocol for another frame (B-sections, dual sections, …).
    pub fn vectors(&self, rank: usize, prefix: &str, stream: u64) -> Family<Vec<Scalar>> {
        vector_family(self.n, rank, prefix, self.config, 16 + stream)
    }

    pub fn function(&self, i: usize) -> &Scalar {
        &self.functions[i].value
    }

    pub fn section_tuples(&self, arity: usize) -> Vec<Vec<usize>> {
        index_tuples(self.sections.len(), self.sections.frame_len, arity, self.config, 100 + arity as u64)
    }

    /// Argument cases `(section indices, function indices)` for `arity`
    /// section slots and `k` function slots.
    pub fn cases(&self, arity: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        cases_for(
            self.sections.len(),
            self.sections.frame_len,
            arity,
            self.functions.len(),
            k,
            self.config,
        )
    }

    /// Cases whose function slots are drawn from the one-form family.
    pub fn form_cases(&self, arity: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        cases_for(
            self.sections.len(),
            self.sections.frame_len,
            arity,
            self.forms.len(),
            k,
            self.config,
        )
    }
}

fn vector_family(
    n: usize,
    rank: usize,
    prefix: &str,
    config: BatteryConfig,
    stream: u64,
) -> Family<Vec<Scalar>> {
    let mut items = Vec::new();
    for i in 0..rank {
        let mut v = vec![Scalar::zero(); rank];
        v[i] = Scalar::one();
        items.push(Labeled::new(format!("{prefix}{}", i + 1), v));
    }
    for m in monomials_up_to(n, config.degree).into_iter().filter(|m| !m.is_one()) {
        let f = Scalar::monomial(m);
        for i in 0..rank {
            let mut v = vec![Scalar::zero(); rank];
            v[i] = f.clone();
            items.push(Labeled::new(format!("{f}*{prefix}{}", i + 1), v));
        }
    }
    let mut rng = rng_for(config.seed, stream);
    for j in 0..config.extras {
        let v = (0..rank).map(|_| random_polynomial(n, config.degree, &mut rng)).collect();
        items.push(Labeled::new(format!("rand_{prefix}{}", j + 1), v));
    }
    Family { frame_len: rank, items }
}

fn function_family(n: usize, config: BatteryConfig) -> Vec<Labeled<Scalar>> {
    let mut out: Vec<_> = monomials_up_to(n, config.degree + 1)
        .into_iter()
        .map(|m| {
            let f = Scalar::monomial(m);
            Labeled::new(f.to_string(), f)
        })
        .collect();
    let mut rng = rng_for(config.seed, STREAM_FUNCTIONS);
    for j in 0..config.extras {
        let f = random_polynomial(n, config.degree + 1, &mut rng);
        out.push(Labeled::new(format!("rand_f{}", j + 1), f));
    }
    out
}

/// Exact forms `dh` of every nonconstant battery function, then
/// `extras + n` forms `g dh` that are in general not closed.
fn form_family(n: usize, functions: &[Labeled<Scalar>], config: BatteryConfig) -> Vec<Labeled<OneForm>> {
    let mut out = Vec::new();
    for f in functions.iter().filter(|f| !f.value.is_constant()) {
        out.push(Labeled::new(format!("d({})", f.label), OneForm::exact(n, &f.value)));
    }
    if n == 0 {
        return out;
    }
    let mut rng = rng_for(config.seed, STREAM_FORMS);
    for j in 0..config.extras + n {
        let g = random_polynomial(n, config.degree, &mut rng);
        let h = Scalar::var(j % n);
        out.push(Labeled::new(
            format!("rand_g{}*d(x{})", j + 1, j % n + 1),
            OneForm::exact(n, &h).scale(&g),
        ));
    }
    out
}

pub(crate) fn index_tuples(
    total: usize,
    frame: usize,
    arity: usize,
    config: BatteryConfig,
    stream: u64,
) -> Vec<Vec<usize>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    if total == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if frame > 0 {
        let count = frame.checked_pow(arity as u32).unwrap_or(usize::MAX);
        let (take, step) = if count <= FRAME_TUPLE_CAP {
            (count, 1)
        } else {
            // Odd stride visits distinct tuples spread over the product.
            (FRAME_TUPLE_CAP, (count / FRAME_TUPLE_CAP) | 1)
        };
        for t in 0..take {
            let mut code = (t * step) % count;
            let mut tuple = vec![0; arity];
            for slot in (0..arity).rev() {
                tuple[slot] = code % frame;
                code /= frame;
            }
            out.push(tuple);
        }
        for slot in 0..arity {
            for j in frame..total {
                let tuple = (0..arity)
                    .map(|q| if q == slot { j } else { (j + q) % frame })
                    .collect();
                out.push(tuple);
            }
        }
    }
    let mut rng = rng_for(config.seed, stream);
    for _ in 0..config.extras.max(1) * arity {
        out.push((0..arity).map(|_| rng.gen_range(0..total)).collect());
    }
    out
}

pub(crate) fn cases_for(
    total: usize,
    frame: usize,
    arity: usize,
    n_funcs: usize,
    k: usize,
    config: BatteryConfig,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let tuples = index_tuples(total, frame, arity, config, 100 + arity as u64);
    if k == 0 {
        return tuples.into_iter().map(|t| (t, Vec::new())).collect();
    }
    if n_funcs == 0 || tuples.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (idx, t) in tuples.iter().enumerate() {
        let f = (0..k).map(|q| (idx + 5 * q) % n_funcs).collect();
        out.push((t.clone(), f));
    }
    // Every function in every slot, paired with a spread of section tuples.
    let anchor = tuples.len().min(frame.max(1).pow(arity as u32).min(FRAME_TUPLE_CAP));
    for q in 0..k {
        for j in 0..n_funcs {
            let f = (0..k).map(|p| if p == q { j } else { (j + p + 1) % n_funcs }).collect();
            out.push((tuples[(j * 7 + q) % anchor.max(1)].clone(), f));
        }
    }
    out
}
