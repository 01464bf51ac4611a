//! Truncated graph-product Fock space `⊕_{|w| ≤ L} H̊_w` over finite-dimensional
//! vertex models, with the left action `λ`, conditional expectations and the
//! modular conjugation as dense complex matrices.
//!
//! A basis vector is a group element `w` together with one basis index of
//! `H̊_{v_i}` per letter of the canonical Cartier–Foata expression of `w`.
//! Shuffle equivalence is resolved by matching the k-th occurrence of each
//! letter between expressions, so no permutation unitaries are stored.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coxeter::{CoxeterGroup, NormalWord};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::vset::VertexSet;

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;
type SparseCol = Vec<(usize, C64)>;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Kind of finite-dimensional vertex algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `ℂ^d` with state weights (all positive, summing to 1).
    Commutative { weights: Vec<f64> },
    /// `M_n(ℂ)` with the normalized trace.
    Matrix { n: usize },
}

/// Vertex algebra realised as `m × m` matrices with a faithful tracial state
/// `τ(x) = Σ ρ_i x_ii`, and an orthonormal basis of `L²(M, τ)` starting at `1`.
#[derive(Clone, Debug)]
pub struct VertexModel {
    kind: ModelKind,
    rho: Vec<f64>,
    basis: Vec<Mat>,
}

impl VertexModel {
    pub fn commutative(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::validation("commutative model needs dimension ≥ 2"));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::validation("state weights must be strictly positive"));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!("state weights sum to {s}, not 1")));
        }
        let d = weights.len();
        let span = (0..d)
            .map(|i| {
                let mut m = Mat::zeros(d, d);
                m[(i, i)] = ONE;
                m
            })
            .collect();
        Ok(Self::build(
            ModelKind::Commutative {
                weights: weights.clone(),
            },
            weights,
            span,
        ))
    }

    /// `ℂ^d` with the uniform state.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::commutative(vec![1.0 / d as f64; d])
    }

    pub fn matrix(n: usize) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::validation("matrix models support 2 ≤ n ≤ 3"));
        }
        let mut span = vec![];
        for i in 0..n {
            for j in 0..n {
                let mut m = Mat::zeros(n, n);
                m[(i, j)] = ONE;
                span.push(m);
            }
        }
        Ok(Self::build(ModelKind::Matrix { n }, vec![1.0 / n as f64; n], span))
    }

    fn build(kind: ModelKind, rho: Vec<f64>, span: Vec<Mat>) -> Self {
        let m = rho.len();
        let mut model = VertexModel {
            kind,
            rho,
            basis: vec![],
        };
        let mut basis: Vec<Mat> = vec![Mat::identity(m, m)];
        for s in span {
            let mut x = s;
            for b in &basis {
                let c = model.inner(&x, b);
                x -= b * c;
            }
            let nrm = model.inner(&x, &x).re.sqrt();
            if nrm > 1e-9 {
                basis.push(x / C64::new(nrm, 0.0));
            }
        }
        model.basis = basis;
        model
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Size of the matrices representing algebra elements.
    pub fn size(&self) -> usize {
        self.rho.len()
    }

    /// `dim H_v`.
    pub fn hilbert_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn tau(&self, x: &Mat) -> C64 {
        (0..self.size()).map(|i| x[(i, i)] * self.rho[i]).sum()
    }

    /// `⟨x, y⟩ = τ(y* x)`.
    pub fn inner(&self, x: &Mat, y: &Mat) -> C64 {
        self.tau(&(y.adjoint() * x))
    }

    /// Orthonormal basis element `e_i` of `H_v` as an algebra element; `e_0 = 1`.
    pub fn basis_element(&self, i: usize) -> &Mat {
        &self.basis[i]
    }

    /// Coordinates of `x` in the basis of `H_v`.
    pub fn to_vector(&self, x: &Mat) -> Vector {
        Vector::from_iterator(self.hilbert_dim(), self.basis.iter().map(|b| self.inner(x, b)))
    }

    pub fn from_vector(&self, v: &Vector) -> Mat {
        let m = self.size();
        self.basis
            .iter()
            .zip(v.iter())
            .fold(Mat::zeros(m, m), |acc, (b, c)| acc + b * *c)
    }

    /// Matrix of left multiplication by `a` on `H_v`.
    pub fn left_mult(&self, a: &Mat) -> Mat {
        let d = self.hilbert_dim();
        Mat::from_fn(d, d, |j, i| self.inner(&(a * &self.basis[i]), &self.basis[j]))
    }

    /// `C` with `J_v ξ = C · conj(ξ)`, where `J_v x = x*`.
    pub fn conjugation(&self) -> Mat {
        let d = self.hilbert_dim();
        Mat::from_fn(d, d, |j, i| self.inner(&self.basis[i].adjoint(), &self.basis[j]))
    }

    fn random_entries(&self, rng: &mut ChaCha8Rng) -> Mat {
        let m = self.size();
        let mut x = Mat::zeros(m, m);
        match self.kind {
            ModelKind::Commutative { .. } => {
                for i in 0..m {
                    x[(i, i)] = random_c(rng);
                }
            }
            ModelKind::Matrix { .. } => {
                for i in 0..m {
                    for j in 0..m {
                        x[(i, j)] = random_c(rng);
                    }
                }
            }
        }
        x
    }

    /// Random element with entries uniform in `[-1, 1]` (real and imaginary parts).
    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> Mat {
        self.random_entries(rng)
    }

    /// Random element of `M̊_v`: a random element minus `τ(a)·1`.
    pub fn random_centered(&self, rng: &mut ChaCha8Rng) -> Mat {
        let a = self.random_entries(rng);
        let t = self.tau(&a);
        let m = self.size();
        a - Mat::identity(m, m) * t
    }
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Dense operator together with the number of letters it may add to a word.
#[derive(Clone, Debug)]
pub struct OperatorRep {
    pub matrix: Mat,
    pub budget: usize,
}

impl OperatorRep {
    pub fn mul(&self, o: &OperatorRep) -> OperatorRep {
        OperatorRep {
            matrix: &self.matrix * &o.matrix,
            budget: self.budget + o.budget,
        }
    }

    pub fn add(&self, o: &OperatorRep) -> OperatorRep {
        OperatorRep {
            matrix: &self.matrix + &o.matrix,
            budget: self.budget.max(o.budget),
        }
    }

    pub fn sub(&self, o: &OperatorRep) -> OperatorRep {
        OperatorRep {
            matrix: &self.matrix - &o.matrix,
            budget: self.budget.max(o.budget),
        }
    }

    pub fn scale(&self, c: C64) -> OperatorRep {
        OperatorRep {
            matrix: &self.matrix * c,
            budget: self.budget,
        }
    }

    pub fn adjoint(&self) -> OperatorRep {
        OperatorRep {
            matrix: self.matrix.adjoint(),
            budget: self.budget,
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }
}

/// Antilinear operator `ξ ↦ M · conj(ξ)`.
#[derive(Clone, Debug)]
pub struct AntiLinear {
    pub matrix: Mat,
    cols: Vec<SparseCol>,
    conj_cols: Vec<SparseCol>,
}

impl AntiLinear {
    pub fn new(matrix: Mat) -> Self {
        let cols = to_sparse(&matrix);
        let conj_cols = cols
            .iter()
            .map(|c| c.iter().map(|&(r, x)| (r, x.conj())).collect())
            .collect();
        AntiLinear {
            matrix,
            cols,
            conj_cols,
        }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v.conjugate()
    }

    /// The linear operator `J X J`.
    pub fn conjugate_op(&self, x: &OperatorRep) -> OperatorRep {
        let right = times_sparse(&x.matrix.conjugate(), &self.conj_cols);
        OperatorRep {
            matrix: sparse_times(&self.cols, &right),
            budget: x.budget,
        }
    }
}

fn to_sparse(m: &Mat) -> Vec<SparseCol> {
    (0..m.ncols())
        .map(|c| {
            (0..m.nrows())
                .filter(|&r| m[(r, c)] != ZERO)
                .map(|r| (r, m[(r, c)]))
                .collect()
        })
        .collect()
}

/// `S · X` with `S` given by sparse columns.
fn sparse_times(s: &[SparseCol], x: &Mat) -> Mat {
    let mut out = Mat::zeros(x.nrows(), x.ncols());
    for c in 0..x.ncols() {
        for (k, col) in s.iter().enumerate() {
            let y = x[(k, c)];
            if y != ZERO {
                for &(r, v) in col {
                    out[(r, c)] += v * y;
                }
            }
        }
    }
    out
}

/// `X · S` with `S` given by sparse columns.
fn times_sparse(x: &Mat, s: &[SparseCol]) -> Mat {
    let mut out = Mat::zeros(x.nrows(), s.len());
    for (c, col) in s.iter().enumerate() {
        for &(k, v) in col {
            for r in 0..x.nrows() {
                out[(r, c)] += x[(r, k)] * v;
            }
        }
    }
    out
}

/// `[S, X]` for `S` given by sparse columns.
fn sparse_commutator(s: &[SparseCol], x: &Mat) -> Mat {
    sparse_times(s, x) - times_sparse(x, s)
}

/// One reduced term `c · λ_{v_1}(a_1) ⋯ λ_{v_n}(a_n)`.
#[derive(Clone, Debug)]
pub struct ReducedTerm {
    pub coeff: C64,
    pub letters: Vec<usize>,
    pub elements: Vec<Mat>,
}

/// Finite linear combination of reduced operators.
#[derive(Clone, Debug, Default)]
pub struct ReducedExpansion {
    pub terms: Vec<ReducedTerm>,
}

#[derive(Clone, Debug)]
pub struct TruncatedFockSpace {
    group: CoxeterGroup,
    models: Vec<VertexModel>,
    depth: usize,
    words: Vec<NormalWord>,
    letters: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    word_index: HashMap<Vec<VertexSet>, usize>,
    /// For each basis index, its word.
    word_of: Vec<usize>,
    /// Per vertex, the output of [`Self::vertex_moves`].
    moves: Vec<Vec<(usize, Vec<Option<usize>>)>>,
    /// Sparse columns of `λ_v(e_{i+1})` for every vertex `v`.
    units: Vec<Vec<Vec<SparseCol>>>,
    dim: usize,
    /// Every group element has length ≤ depth, so nothing is ever truncated.
    complete: bool,
}

impl TruncatedFockSpace {
    pub fn new(graph: &SimpleGraph, models: Vec<VertexModel>, depth: usize, dim_cap: usize) -> Result<Self> {
        if models.len() != graph.len() {
            return Err(Error::validation(format!(
                "{} vertex models for {} vertices",
                models.len(),
                graph.len()
            )));
        }
        let group = CoxeterGroup::new(graph);
        let mut words = vec![group.identity()];
        let mut level = vec![group.identity()];
        let mut complete = true;
        let mut dim = 1usize;
        for len in 1..=depth + 1 {
            let mut next: BTreeSet<Vec<usize>> = BTreeSet::new();
            for w in &level {
                let last = group.last_letters(w);
                for v in 0..graph.len() {
                    if !last.contains(v) {
                        let mut s = w.letters();
                        s.push(v);
                        next.insert(group.normalize(&s)?.letters());
                    }
                }
            }
            if len == depth + 1 {
                complete = next.is_empty();
                break;
            }
            level = next.iter().map(|s| group.normalize(s)).collect::<Result<_>>()?;
            for w in &level {
                let block: usize = w.letters().iter().map(|&v| models[v].hilbert_dim() - 1).product();
                dim = dim.saturating_add(block);
                if dim > dim_cap {
                    return Err(Error::cap(format!("Fock space dimension exceeds {dim_cap}")));
                }
            }
            words.extend(level.iter().cloned());
            if level.is_empty() {
                break;
            }
        }
        let letters: Vec<Vec<usize>> = words.iter().map(|w| w.letters()).collect();
        let mut offsets = vec![];
        let mut word_of = vec![];
        let mut acc = 0;
        for (k, l) in letters.iter().enumerate() {
            offsets.push(acc);
            let block: usize = l.iter().map(|&v| models[v].hilbert_dim() - 1).product();
            word_of.extend(std::iter::repeat_n(k, block));
            acc += block;
        }
        let word_index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.layers().to_vec(), i))
            .collect();
        let mut space = TruncatedFockSpace {
            group,
            models,
            depth,
            words,
            letters,
            offsets,
            word_index,
            word_of,
            moves: vec![],
            units: vec![],
            dim: acc,
            complete,
        };
        space.moves = (0..space.models.len())
            .map(|v| space.vertex_moves(v))
            .collect::<Result<_>>()?;
        let mut units = vec![];
        for v in 0..space.models.len() {
            let model = &space.models[v];
            let mut per = vec![];
            for i in 1..model.hilbert_dim() {
                per.push(space.lambda_columns(v, &model.left_mult(model.basis_element(i)))?);
            }
            units.push(per);
        }
        space.units = units;
        Ok(space)
    }

    /// Same commutative `d`-dimensional uniform model at every vertex.
    pub fn uniform(graph: &SimpleGraph, d: usize, depth: usize) -> Result<Self> {
        let models = (0..graph.len())
            .map(|_| VertexModel::uniform(d))
            .collect::<Result<_>>()?;
        Self::new(graph, models, depth, crate::caps::Caps::default().fock_dimension)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn graph(&self) -> &SimpleGraph {
        self.group.graph()
    }

    pub fn model(&self, v: usize) -> &VertexModel {
        &self.models[v]
    }

    pub fn words(&self) -> &[NormalWord] {
        &self.words
    }

    /// True when the truncation loses nothing (finite group fully contained).
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Word of basis vector `i`.
    pub fn word_of(&self, i: usize) -> &NormalWord {
        &self.words[self.word_of[i]]
    }

    /// Leg dimensions along the canonical expression of word `k`.
    fn radices(&self, k: usize) -> Vec<usize> {
        self.letters[k]
            .iter()
            .map(|&v| self.models[v].hilbert_dim() - 1)
            .collect()
    }

    fn decode(&self, i: usize) -> (usize, Vec<usize>) {
        let k = self.word_of[i];
        let rad = self.radices(k);
        let mut r = i - self.offsets[k];
        let mut legs = vec![0; rad.len()];
        for p in (0..rad.len()).rev() {
            legs[p] = r % rad[p];
            r /= rad[p];
        }
        (k, legs)
    }

    /// Basis index of the tensor with legs `legs` along the reduced expression `seq`,
    /// or `None` if the word is longer than the depth.
    pub fn locate(&self, seq: &[usize], legs: &[usize]) -> Result<Option<usize>> {
        let w = self.group.normalize(seq)?;
        if w.len() != seq.len() {
            return Err(Error::validation("locate needs a reduced expression"));
        }
        let Some(&k) = self.word_index.get(w.layers()) else {
            return Ok(None);
        };
        let canon = &self.letters[k];
        let mut used = vec![false; seq.len()];
        let mut out = vec![0; seq.len()];
        for (p, &v) in seq.iter().enumerate() {
            let q = (0..canon.len()).find(|&q| !used[q] && canon[q] == v).unwrap();
            used[q] = true;
            out[q] = legs[p];
        }
        let rad = self.radices(k);
        let mut r = 0;
        for p in 0..rad.len() {
            r = r * rad[p] + out[p];
        }
        Ok(Some(self.offsets[k] + r))
    }

    pub fn vacuum(&self) -> Vector {
        let mut v = Vector::zeros(self.dim);
        v[0] = ONE;
        v
    }

    /// Basis indices on which an operator with the given budget is computed exactly.
    pub fn exact_columns(&self, budget: usize) -> Vec<usize> {
        (0..self.dim)
            .filter(|&i| self.complete || self.word_of(i).len() + budget <= self.depth)
            .collect()
    }

    /// `λ_v(A)` for an arbitrary operator `A` on `H_v`.
    pub fn lambda_operator(&self, v: usize, a: &Mat) -> Result<OperatorRep> {
        let cols = self.lambda_columns(v, a)?;
        let mut m = Mat::zeros(self.dim, self.dim);
        for (col, entries) in cols.iter().enumerate() {
            for &(row, c) in entries {
                m[(row, col)] += c;
            }
        }
        Ok(OperatorRep { matrix: m, budget: 1 })
    }

    fn lambda_columns(&self, v: usize, a: &Mat) -> Result<Vec<SparseCol>> {
        let hd = self.models[v].hilbert_dim();
        if a.nrows() != hd || a.ncols() != hd {
            return Err(Error::validation("operator does not act on the vertex Hilbert space"));
        }
        Ok(self.moves[v]
            .iter()
            .map(|(xi, rows)| {
                rows.iter()
                    .enumerate()
                    .filter_map(|(j, row)| {
                        let c = a[(j, *xi)];
                        row.filter(|_| c != ZERO).map(|r| (r, c))
                    })
                    .collect()
            })
            .collect())
    }

    /// For every basis index: the leg of `H_v` it carries at the front (0 for
    /// none) and the index reached by putting leg `j` there instead.
    fn vertex_moves(&self, v: usize) -> Result<Vec<(usize, Vec<Option<usize>>)>> {
        let hd = self.models[v].hilbert_dim();
        let mut out = Vec::with_capacity(self.dim);
        for col in 0..self.dim {
            let (k, legs) = self.decode(col);
            let canon = &self.letters[k];
            let (rest, rest_legs, xi) = match canon.iter().position(|&x| x == v) {
                Some(p) if self.words[k].first_letters().contains(v) => {
                    let mut r = canon.clone();
                    r.remove(p);
                    let mut rl = legs.clone();
                    rl.remove(p);
                    (r, rl, legs[p] + 1)
                }
                _ => (canon.clone(), legs.clone(), 0),
            };
            let mut rows = Vec::with_capacity(hd);
            for j in 0..hd {
                let row = if j == 0 {
                    self.locate(&rest, &rest_legs)?
                } else {
                    let mut s = vec![v];
                    s.extend(&rest);
                    let mut l = vec![j - 1];
                    l.extend(&rest_legs);
                    self.locate(&s, &l)?
                };
                rows.push(row);
            }
            out.push((xi, rows));
        }
        Ok(out)
    }

    /// `λ_v(a)` for an algebra element `a` of the model at `v`.
    pub fn lambda_vertex(&self, v: usize, a: &Mat) -> Result<OperatorRep> {
        self.lambda_operator(v, &self.models[v].left_mult(a))
    }

    pub fn identity(&self) -> OperatorRep {
        OperatorRep {
            matrix: Mat::identity(self.dim, self.dim),
            budget: 0,
        }
    }

    /// `λ_{v_1}(a_1) ⋯ λ_{v_n}(a_n)` for a reduced word and state-zero elements.
    pub fn reduced_operator(&self, letters: &[usize], elements: &[Mat]) -> Result<OperatorRep> {
        if letters.len() != elements.len() {
            return Err(Error::validation("one element per letter required"));
        }
        if !self.group.is_reduced(letters)? {
            return Err(Error::validation("reduced operator needs a reduced word"));
        }
        for (&v, a) in letters.iter().zip(elements) {
            if self.models[v].tau(a).norm() > 1e-12 {
                return Err(Error::validation("reduced operator needs state-zero elements"));
            }
        }
        let factors = letters
            .iter()
            .zip(elements)
            .map(|(&v, a)| self.lambda_columns(v, &self.models[v].left_mult(a)))
            .collect::<Result<Vec<_>>>()?;
        let mut m = Mat::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            let mut x = BTreeMap::from([(col, ONE)]);
            for f in factors.iter().rev() {
                x = apply_sparse(f, &x, |_| true, |_| true);
            }
            for (r, c) in x {
                m[(r, col)] = c;
            }
        }
        Ok(OperatorRep {
            matrix: m,
            budget: letters.len(),
        })
    }

    /// The operator `x` in the span of reduced operators with `xΩ = ξ`.
    pub fn lambda_of_vector(&self, xi: &Vector) -> Result<OperatorRep> {
        let mut comps = vec![];
        let mut budget = 0;
        for i in 0..self.dim {
            if xi[i] != ZERO {
                let (k, legs) = self.decode(i);
                budget = budget.max(legs.len());
                comps.push((xi[i], k, legs));
            }
        }
        let mut acc = Mat::zeros(self.dim, self.dim);
        let mut work: BTreeMap<usize, C64> = BTreeMap::new();
        for col in 0..self.dim {
            for (c, k, legs) in &comps {
                let mut cur: Vec<(usize, C64)> = vec![(col, *c)];
                for (p, &v) in self.letters[*k].iter().enumerate().rev() {
                    let unit = &self.units[v][legs[p]];
                    work.clear();
                    for &(i, x) in &cur {
                        for &(r, y) in &unit[i] {
                            *work.entry(r).or_insert(ZERO) += x * y;
                        }
                    }
                    cur = work.iter().map(|(&r, &x)| (r, x)).collect();
                }
                for (r, x) in cur {
                    acc[(r, col)] += x;
                }
            }
        }
        Ok(OperatorRep { matrix: acc, budget })
    }

    pub fn expansion_operator(&self, x: &ReducedExpansion) -> Result<OperatorRep> {
        let mut acc = OperatorRep {
            matrix: Mat::zeros(self.dim, self.dim),
            budget: 0,
        };
        for t in &x.terms {
            acc = acc.add(&self.reduced_operator(&t.letters, &t.elements)?.scale(t.coeff));
        }
        Ok(acc)
    }

    /// `E_Λ(x)` for `x` given as reduced terms: keeps the terms with every letter in `Λ`.
    pub fn conditional_expectation(&self, lam: VertexSet, x: &ReducedExpansion) -> Result<OperatorRep> {
        let kept = ReducedExpansion {
            terms: x
                .terms
                .iter()
                .filter(|t| t.letters.iter().all(|&v| lam.contains(v)))
                .cloned()
                .collect(),
        };
        self.expansion_operator(&kept)
    }

    /// `E_Λ(x)` for an operator `x` of the graph product, via `E_Λ(x)Ω = e_Λ xΩ`.
    pub fn expectation_of(&self, lam: VertexSet, x: &OperatorRep) -> Result<OperatorRep> {
        self.guard(x.budget, "expectation of operator")?;
        let v = self.projection(lam).apply(&x.apply(&self.vacuum()));
        self.lambda_of_vector(&v)
    }

    /// Orthogonal projection onto the words supported in `Λ`.
    pub fn projection(&self, lam: VertexSet) -> OperatorRep {
        self.diagonal(|w| w.support().is_subset(lam))
    }

    /// Projection onto the words starting with `v`.
    pub fn starts_with(&self, v: usize) -> OperatorRep {
        self.diagonal(|w| w.first_letters().contains(v))
    }

    fn diagonal(&self, keep: impl Fn(&NormalWord) -> bool) -> OperatorRep {
        let mut m = Mat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if keep(self.word_of(i)) {
                m[(i, i)] = ONE;
            }
        }
        OperatorRep { matrix: m, budget: 0 }
    }

    fn guard(&self, budget: usize, what: &str) -> Result<()> {
        if !self.complete && budget > self.depth {
            return Err(Error::validation(format!(
                "{what}: word length budget {budget} exceeds depth {}",
                self.depth
            )));
        }
        Ok(())
    }

    /// The part `λ_{(w1,w2,w3)}(a)` of `λ(a)` for a pure tensor `a` along `w1 w2 w3`,
    /// each part given as `(letters, elements)`.
    pub fn lambda_part(&self, parts: [(&[usize], &[Mat]); 3]) -> Result<OperatorRep> {
        let mut all = vec![];
        for (l, e) in parts {
            if l.len() != e.len() {
                return Err(Error::validation("one element per letter required"));
            }
            all.extend_from_slice(l);
        }
        if !self.group.is_reduced(&all)? {
            return Err(Error::validation("w1·w2·w3 is not reduced"));
        }
        let mid = parts[1].0;
        let g = self.graph();
        if !g.is_clique(mid.iter().copied().collect()) || mid.iter().collect::<BTreeSet<_>>().len() != mid.len() {
            return Err(Error::validation("middle part is not a clique word"));
        }
        let id = self.identity();
        let mut op = id.clone();
        for (which, (l, e)) in parts.iter().enumerate() {
            for (&v, a) in l.iter().zip(e.iter()) {
                let p = self.starts_with(v);
                let q = id.sub(&p);
                let lam = self.lambda_vertex(v, a)?;
                let piece = match which {
                    0 => p.mul(&lam).mul(&q),
                    1 => p.mul(&lam).mul(&p),
                    _ => q.mul(&lam).mul(&p),
                };
                op = op.mul(&piece);
            }
        }
        Ok(op)
    }

    /// Modular conjugation `J(xΩ) = x*Ω`: reverses words and conjugates legs.
    pub fn modular_j(&self) -> Result<AntiLinear> {
        let conj: Vec<Mat> = self.models.iter().map(|m| m.conjugation()).collect();
        let mut m = Mat::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            let (k, legs) = self.decode(col);
            let mut seq = self.letters[k].clone();
            seq.reverse();
            let mut old = legs.clone();
            old.reverse();
            // expand the tensor product of J_v e_{leg} along the reversed word
            let mut terms: Vec<(Vec<usize>, C64)> = vec![(vec![], ONE)];
            for (p, &v) in seq.iter().enumerate() {
                let c = &conj[v];
                let mut next = vec![];
                for (l, coef) in &terms {
                    for j in 1..c.nrows() {
                        let x = c[(j, old[p] + 1)];
                        if x != ZERO {
                            let mut l2 = l.clone();
                            l2.push(j - 1);
                            next.push((l2, coef * x));
                        }
                    }
                }
                terms = next;
            }
            for (l, coef) in terms {
                let row = self.locate(&seq, &l)?.expect("inverse has the same length");
                m[(row, col)] += coef;
            }
        }
        Ok(AntiLinear::new(m))
    }

    /// Random vector of `H̊_w` for a word of the space.
    pub fn random_word_vector(&self, w: &NormalWord, rng: &mut ChaCha8Rng) -> Vector {
        let mut v = Vector::zeros(self.dim);
        if let Some(&k) = self.word_index.get(w.layers()) {
            let block: usize = self.radices(k).iter().product();
            for r in 0..block {
                v[self.offsets[k] + r] = random_c(rng);
            }
        }
        v
    }

    /// Random element of `M̊_w`.
    pub fn random_word_element(&self, w: &NormalWord, rng: &mut ChaCha8Rng) -> Result<OperatorRep> {
        self.lambda_of_vector(&self.random_word_vector(w, rng))
    }

    /// Largest entry modulus of `a - b` over the exact columns of the larger budget.
    pub fn residual(&self, a: &OperatorRep, b: &OperatorRep) -> f64 {
        let cols = self.exact_columns(a.budget.max(b.budget));
        max_abs_cols(&(&a.matrix - &b.matrix), &cols)
    }
}

/// `P_out · F · P_in` applied to a sparse vector, with the projections given as
/// index predicates.
fn apply_sparse(
    f: &[SparseCol],
    x: &BTreeMap<usize, C64>,
    keep_in: impl Fn(usize) -> bool,
    keep_out: impl Fn(usize) -> bool,
) -> BTreeMap<usize, C64> {
    let mut out = BTreeMap::new();
    for (&i, &c) in x {
        if !keep_in(i) {
            continue;
        }
        for &(r, y) in &f[i] {
            if keep_out(r) {
                *out.entry(r).or_insert(ZERO) += c * y;
            }
        }
    }
    out
}

fn max_abs_cols(m: &Mat, cols: &[usize]) -> f64 {
    let mut r: f64 = 0.0;
    for &c in cols {
        for i in 0..m.nrows() {
            r = r.max(m[(i, c)].norm());
        }
    }
    r
}

fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.norm()))
}

/// Summary of a randomized identity check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerificationReport {
    pub identity: String,
    pub trials: usize,
    pub seed: u64,
    pub dimension: usize,
    pub depth: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
}

fn stream_rng(seed: u64, label: &str, trial: usize) -> ChaCha8Rng {
    let mut s = seed;
    for b in label.bytes() {
        s = s.rotate_left(7) ^ u64::from(b);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    rng.set_stream(trial as u64);
    rng
}

fn pick<'a, T>(xs: &'a [T], rng: &mut ChaCha8Rng) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

impl TruncatedFockSpace {
    fn run_trials(
        &self,
        name: String,
        trials: usize,
        seed: u64,
        tol: f64,
        f: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    ) -> Result<VerificationReport> {
        let label = name.clone();
        let res: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| f(&mut stream_rng(seed, &label, t)))
            .collect::<Result<_>>()?;
        let max_residual = res.into_iter().fold(0.0, f64::max);
        Ok(VerificationReport {
            identity: name,
            trials,
            seed,
            dimension: self.dim,
            depth: self.depth,
            tolerance: tol,
            max_residual,
            passed: max_residual <= tol,
        })
    }

    fn check_set(&self, s: VertexSet) -> Result<()> {
        if !s.is_subset(self.graph().all()) {
            return Err(Error::validation("vertex set is not contained in the graph"));
        }
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.graph().len() {
            return Err(Error::validation(format!("vertex index {v} out of range")));
        }
        Ok(())
    }

    fn set_str(&self, s: VertexSet) -> String {
        format!("{{{}}}", self.graph().id_list(s).join(","))
    }

    /// `E_{Γ2}(a1 a2 a3) = φ(a1 a3) a2` when `u⁻¹wu′ ∈ W_{Γ2}`, else `0`, for
    /// `a1 ∈ M̊_{u⁻¹}`, `a2 ∈ M̊_w`, `w ∈ W_{Γ1}`, `a3 ∈ M̊_{u′}`, with `u, u′`
    /// not starting in `Γ1` and not ending in `Γ2`.
    pub fn verify_expectation_triple(
        &self,
        g1: VertexSet,
        g2: VertexSet,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<VerificationReport> {
        self.check_set(g1)?;
        self.check_set(g2)?;
        let gr = &self.group;
        let us: Vec<&NormalWord> = self
            .words
            .iter()
            .filter(|u| gr.membership_w(u, g1) && gr.membership_w_prime(u, g2))
            .collect();
        let ws: Vec<&NormalWord> = self.words.iter().filter(|w| w.support().is_subset(g1)).collect();
        let name = format!("expectation_triple Γ1={} Γ2={}", self.set_str(g1), self.set_str(g2));
        self.run_trials(name, trials, seed, tol, |rng| {
            let (u, w, u2) = loop {
                let u = *pick(&us, rng);
                let w = *pick(&ws, rng);
                let u2 = if rng.random_bool(0.5) { u } else { *pick(&us, rng) };
                if u.len() + w.len() + u2.len() <= self.depth {
                    break (u, w, u2);
                }
            };
            let a1 = self.random_word_element(&gr.inverse(u)?, rng)?;
            let a2 = self.random_word_element(w, rng)?;
            let a3 = self.random_word_element(u2, rng)?;
            self.guard(a1.budget + a2.budget + a3.budget, "expectation triple")?;
            let om = self.vacuum();
            let a3_om = a3.apply(&om);
            let lhs = self.projection(g2).apply(&a1.apply(&a2.apply(&a3_om)));
            let target = gr.multiply(&gr.multiply(&gr.inverse(u)?, w)?, u2)?;
            let rhs = if target.support().is_subset(g2) {
                let phi = a1.apply(&a3_om)[0];
                a2.apply(&om) * phi
            } else {
                Vector::zeros(self.dim)
            };
            let vec_res = max_abs_vec(&(lhs.clone() - &rhs));
            let e_op = self.lambda_of_vector(&lhs)?;
            let r_op = self.lambda_of_vector(&rhs)?;
            Ok(vec_res.max(self.residual(&e_op, &r_op)))
        })
    }

    /// `E_{Γ2}(a* E_{Γ1}(x) b) = φ(a_c* b_c) a_r* E_{Γ1∩Γ2∩Link(u_c)}(a_l* x b_l) b_r`.
    pub fn verify_iterated_expectation(
        &self,
        g1: VertexSet,
        g2: VertexSet,
        trials: usize,
        seed: u64,
        tol: f64,
    ) -> Result<VerificationReport> {
        self.check_set(g1)?;
        self.check_set(g2)?;
        let gr = &self.group;
        let left: Vec<&NormalWord> = self.words.iter().filter(|w| w.support().is_subset(g1)).collect();
        let right: Vec<&NormalWord> = self.words.iter().filter(|w| w.support().is_subset(g2)).collect();
        let centre: Vec<&NormalWord> = self
            .words
            .iter()
            .filter(|u| gr.membership_w(u, g1) && gr.membership_w_prime(u, g2))
            .collect();
        let name = format!("iterated_expectation Γ1={} Γ2={}", self.set_str(g1), self.set_str(g2));
        self.run_trials(name, trials, seed, tol, |rng| {
            let split = |rng: &mut ChaCha8Rng| -> Result<[&NormalWord; 3]> {
                loop {
                    let p = [*pick(&left, rng), *pick(&centre, rng), *pick(&right, rng)];
                    let whole = gr.multiply(&gr.multiply(p[0], p[1])?, p[2])?;
                    if whole.len() == p[0].len() + p[1].len() + p[2].len() {
                        return Ok(p);
                    }
                }
            };
            let (ua, ub, xlen) = loop {
                let ua = split(rng)?;
                let ub = split(rng)?;
                let used: usize = ua.iter().chain(ub.iter()).map(|w| w.len()).sum();
                if used <= self.depth {
                    break (ua, ub, self.depth - used);
                }
            };
            let xw: Vec<&NormalWord> = self.words.iter().filter(|w| w.len() <= xlen).collect();
            let mut x = ReducedExpansion::default();
            x.terms.push(ReducedTerm {
                coeff: random_c(rng),
                letters: vec![],
                elements: vec![],
            });
            for _ in 0..3 {
                let w = *pick(&xw, rng);
                let letters = w.letters();
                let elements = letters.iter().map(|&v| self.models[v].random_centered(rng)).collect();
                x.terms.push(ReducedTerm {
                    coeff: random_c(rng),
                    letters,
                    elements,
                });
            }
            let a: Vec<OperatorRep> = ua
                .iter()
                .map(|w| self.random_word_element(w, rng))
                .collect::<Result<_>>()?;
            let b: Vec<OperatorRep> = ub
                .iter()
                .map(|w| self.random_word_element(w, rng))
                .collect::<Result<_>>()?;
            let budget: usize = a.iter().chain(&b).map(|o| o.budget).sum::<usize>() + xlen;
            self.guard(budget, "iterated expectation")?;
            let ad: Vec<Mat> = a.iter().map(|o| o.matrix.adjoint()).collect();
            let om = self.vacuum();
            let e1x = self.conditional_expectation(g1, &x)?;
            let b_om = &b[0].matrix * (&b[1].matrix * (&b[2].matrix * &om));
            let inner = &ad[2] * (&ad[1] * (&ad[0] * (&e1x.matrix * b_om)));
            let lhs = self.projection(g2).apply(&inner);
            let phi = (&ad[1] * (&b[1].matrix * &om))[0];
            let g0 = g1.intersection(g2).intersection(gr.link_of_word(ua[1]));
            let xo = self.expansion_operator(&x)?;
            let y_om = &ad[0] * (&xo.matrix * (&b[0].matrix * &om));
            let mid = self.lambda_of_vector(&self.projection(g0).apply(&y_om))?;
            let rhs = &ad[2] * (&mid.matrix * (&b[2].matrix * &om)) * phi;
            Ok(max_abs_vec(&(lhs - rhs)))
        })
    }

    /// `[λ_v(a), Jλ_v(b)J]` vanishes off `H_{Star(v)}` and agrees there with the
    /// commutator computed in the Fock space of `Star(v)`; for `w ≠ v`,
    /// `[λ_v(a), Jλ_w(b)J] = 0`. `a, b` are arbitrary operators on `H_v`, `H_w`.
    pub fn verify_commutator_star(&self, v: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
        self.check_vertex(v)?;
        let g = self.graph();
        let star = g.star(v);
        let star_vertices = star.to_vec();
        let sub_graph = g.induced(star);
        let sub_models = star_vertices.iter().map(|&s| self.models[s].clone()).collect();
        let sub = TruncatedFockSpace::new(&sub_graph, sub_models, self.depth, usize::MAX)?;
        let sub_v = star_vertices.iter().position(|&s| s == v).unwrap();
        // sub index -> parent index
        let mut embed = vec![0; sub.dim];
        for (i, slot) in embed.iter_mut().enumerate() {
            let (k, legs) = sub.decode(i);
            let seq: Vec<usize> = sub.letters[k].iter().map(|&s| star_vertices[s]).collect();
            *slot = self.locate(&seq, &legs)?.expect("same depth");
        }
        let j = self.modular_j()?;
        let sub_j = sub.modular_j()?;
        let others: Vec<usize> = (0..g.len()).filter(|&w| w != v).collect();
        let name = format!("commutator_star v={}", g.id(v));
        let hd = self.models[v].hilbert_dim();
        self.run_trials(name, trials, seed, tol, |rng| {
            let a = Mat::from_fn(hd, hd, |_, _| random_c(rng));
            let b = Mat::from_fn(hd, hd, |_, _| random_c(rng));
            let la = self.lambda_columns(v, &a)?;
            let jb = j.conjugate_op(&self.lambda_operator(v, &b)?);
            let comm = sparse_commutator(&la, &jb.matrix);
            let sa = sub.lambda_columns(sub_v, &a)?;
            let sjb = sub_j.conjugate_op(&sub.lambda_operator(sub_v, &b)?);
            let scomm = sparse_commutator(&sa, &sjb.matrix);
            let cols = self.exact_columns(2);
            let mut expected = Mat::zeros(self.dim, self.dim);
            for si in 0..sub.dim {
                for sj in 0..sub.dim {
                    expected[(embed[si], embed[sj])] = scomm[(si, sj)];
                }
            }
            let mut r = max_abs_cols(&(comm - expected), &cols);
            if !others.is_empty() {
                let w = *pick(&others, rng);
                let hw = self.models[w].hilbert_dim();
                let c = Mat::from_fn(hw, hw, |_, _| random_c(rng));
                let jc = j.conjugate_op(&self.lambda_operator(w, &c)?);
                let cross = sparse_commutator(&la, &jc.matrix);
                r = r.max(max_abs_cols(&cross, &cols));
            }
            Ok(r)
        })
    }

    /// `Σ_{(w1,w2,w3) ∈ S_w} λ_{(w1,w2,w3)}(a) = λ(a)` for random pure tensors `a`.
    pub fn verify_parts_decomposition(&self, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
        let ws: Vec<&NormalWord> = self.words.iter().filter(|w| !w.is_identity()).collect();
        let name = "parts_decomposition".to_string();
        if ws.is_empty() {
            return self.run_trials(name, 0, seed, tol, |_| Ok(0.0));
        }
        self.run_trials(name, trials, seed, tol, |rng| {
            let w = *pick(&ws, rng);
            let letters = w.letters();
            let lams = letters
                .iter()
                .map(|&v| {
                    let m = &self.models[v];
                    self.lambda_columns(v, &m.left_mult(&m.random_centered(rng)))
                })
                .collect::<Result<Vec<_>>>()?;
            let starts = |v: usize, i: usize| self.word_of(i).first_letters().contains(v);
            let triples = self.triples(&letters);
            let mut worst: f64 = 0.0;
            for col in self.exact_columns(letters.len()) {
                let mut full = BTreeMap::from([(col, ONE)]);
                for f in lams.iter().rev() {
                    full = apply_sparse(f, &full, |_| true, |_| true);
                }
                let mut sum = Vector::zeros(self.dim);
                for (p0, p1, p2) in &triples {
                    let seq: Vec<(usize, usize)> = p0
                        .iter()
                        .map(|&i| (i, 0))
                        .chain(p1.iter().map(|&i| (i, 1)))
                        .chain(p2.iter().map(|&i| (i, 2)))
                        .collect();
                    let mut x = BTreeMap::from([(col, ONE)]);
                    for &(i, kind) in seq.iter().rev() {
                        let v = letters[i];
                        x = apply_sparse(
                            &lams[i],
                            &x,
                            |r| starts(v, r) != (kind == 0),
                            |r| starts(v, r) != (kind == 2),
                        );
                    }
                    for (r, c) in x {
                        sum[r] += c;
                    }
                }
                for (r, c) in full {
                    sum[r] -= c;
                }
                worst = worst.max(max_abs_vec(&sum));
            }
            Ok(worst)
        })
    }

    /// All splittings of the positions of a reduced expression into
    /// `(w1, w2, w3)` with `w1 w2 w3` a shuffle of it and `w2` a clique word.
    pub fn triples(&self, letters: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let n = letters.len();
        let g = self.graph();
        let mut out = vec![];
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let part: Vec<usize> = (0..n)
                .map(|_| {
                    let p = c % 3;
                    c /= 3;
                    p
                })
                .collect();
            let ok = (0..n).all(|i| {
                (i + 1..n)
                    .all(|j| part[i] <= part[j] || (letters[i] != letters[j] && g.adjacent(letters[i], letters[j])))
            });
            let mid: Vec<usize> = (0..n).filter(|&i| part[i] == 1).collect();
            let clique = mid
                .iter()
                .all(|&i| mid.iter().all(|&j| i == j || g.adjacent(letters[i], letters[j])));
            if ok && clique {
                let sel = |p| (0..n).filter(|&i| part[i] == p).collect::<Vec<_>>();
                out.push((sel(0), sel(1), sel(2)));
            }
        }
        out
    }

    /// `E_{Star(v)} ∘ E_{Γ∖{v}} = E_{Link(v)}` on random reduced combinations.
    pub fn verify_amalgam(&self, v: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
        self.check_vertex(v)?;
        let g = self.graph();
        let star = g.star(v);
        let link = g.link(VertexSet::singleton(v));
        let minus = g.all().difference(VertexSet::singleton(v));
        let name = format!("amalgam v={}", g.id(v));
        self.run_trials(name, trials, seed, tol, |rng| {
            let mut x = ReducedExpansion::default();
            x.terms.push(ReducedTerm {
                coeff: random_c(rng),
                letters: vec![],
                elements: vec![],
            });
            for _ in 0..4 {
                let w = pick(&self.words, rng);
                let letters = w.letters();
                let elements = letters.iter().map(|&u| self.models[u].random_centered(rng)).collect();
                x.terms.push(ReducedTerm {
                    coeff: random_c(rng),
                    letters,
                    elements,
                });
            }
            let xo = self.expansion_operator(&x)?;
            let lhs = self.expectation_of(star, &self.expectation_of(minus, &xo)?)?;
            let rhs = self.expectation_of(link, &xo)?;
            let direct = self.conditional_expectation(link, &x)?;
            Ok(self.residual(&lhs, &rhs).max(self.residual(&rhs, &direct)))
        })
    }

    /// Whether `λ_v(a)λ_w(b)` and `λ_w(b)λ_v(a)` agree bit for bit on the exact columns.
    pub fn adjacent_commutation_exact(&self, v: usize, w: usize, trials: usize, seed: u64) -> Result<bool> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        let label = format!("adjacent {v} {w}");
        for t in 0..trials {
            let mut rng = stream_rng(seed, &label, t);
            let a = self.lambda_vertex(v, &self.models[v].random_element(&mut rng))?;
            let b = self.lambda_vertex(w, &self.models[w].random_element(&mut rng))?;
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            for c in self.exact_columns(ab.budget) {
                for r in 0..self.dim {
                    let (x, y) = (ab.matrix[(r, c)], ba.matrix[(r, c)]);
                    if x.re.to_bits() != y.re.to_bits() || x.im.to_bits() != y.im.to_bits() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(g: &SimpleGraph, d: usize, depth: usize) -> TruncatedFockSpace {
        TruncatedFockSpace::uniform(g, d, depth).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(space(&SimpleGraph::complete(1), 2, 1).dim(), 2);
        assert_eq!(space(&SimpleGraph::edgeless(2), 2, 3).dim(), 7);
        assert_eq!(space(&SimpleGraph::complete(2), 2, 2).dim(), 4);
        let m = vec![VertexModel::matrix(2).unwrap(), VertexModel::matrix(2).unwrap()];
        let s = TruncatedFockSpace::new(&SimpleGraph::complete(2), m, 2, 100).unwrap();
        assert_eq!(s.dim(), 16);
        assert!(TruncatedFockSpace::new(
            &SimpleGraph::edgeless(3),
            vec![VertexModel::uniform(3).unwrap(); 3],
            6,
            50
        )
        .is_err());
    }

    #[test]
    fn model_basis_orthonormal() {
        for m in [
            VertexModel::commutative(vec![0.2, 0.3, 0.5]).unwrap(),
            VertexModel::matrix(3).unwrap(),
        ] {
            let d = m.hilbert_dim();
            for i in 0..d {
                for j in 0..d {
                    let ip = m.inner(m.basis_element(i), m.basis_element(j));
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
        assert_eq!(VertexModel::matrix(2).unwrap().hilbert_dim(), 4);
        assert!(VertexModel::commutative(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn lambda_basics() {
        let g = SimpleGraph::cycle(5);
        let s = space(&g, 2, 2);
        let one = Mat::identity(2, 2);
        let l1 = s.lambda_vertex(0, &one).unwrap();
        assert!(s.residual(&l1, &s.identity()) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = s.model(0).random_element(&mut rng);
        let la = s.lambda_vertex(0, &a).unwrap();
        let phi = la.apply(&s.vacuum())[0];
        assert!((phi - s.model(0).tau(&a)).norm() < 1e-14);
    }

    #[test]
    fn j_properties() {
        let m = vec![VertexModel::matrix(2).unwrap(), VertexModel::matrix(2).unwrap()];
        let s = TruncatedFockSpace::new(&SimpleGraph::complete(2), m, 2, 100).unwrap();
        let j = s.modular_j().unwrap();
        let om = s.vacuum();
        assert!(max_abs_vec(&(j.apply(&om) - &om)) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xi = Vector::from_fn(s.dim(), |_, _| random_c(&mut rng));
        assert!(max_abs_vec(&(j.apply(&j.apply(&xi)) - &xi)) < 1e-12);
        let a = s.model(0).random_centered(&mut rng);
        let b = s.model(1).random_centered(&mut rng);
        let x = s.reduced_operator(&[0, 1], &[a.clone(), b.clone()]).unwrap();
        let xs = x.adjoint();
        assert!(max_abs_vec(&(j.apply(&x.apply(&om)) - xs.apply(&om))) < 1e-12);
    }

    #[test]
    fn reduced_operator_rules() {
        let g = SimpleGraph::complete(2);
        let s = space(&g, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = s.model(0).random_centered(&mut rng);
        let b = s.model(1).random_centered(&mut rng);
        let ab = s.reduced_operator(&[0, 1], &[a.clone(), b.clone()]).unwrap();
        let ba = s.reduced_operator(&[1, 0], &[b, a.clone()]).unwrap();
        assert!(s.residual(&ab, &ba) < 1e-14);
        assert!(ab.apply(&s.vacuum())[0].norm() < 1e-14);
        assert!(s.reduced_operator(&[0, 0], &[a.clone(), a]).is_err());
        assert!(s.residual(&s.reduced_operator(&[], &[]).unwrap(), &s.identity()) == 0.0);
    }

    #[test]
    fn expectation_rules() {
        let g = SimpleGraph::cycle(4);
        let s = space(&g, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = s.model(0).random_centered(&mut rng);
        let x = ReducedExpansion {
            terms: vec![ReducedTerm {
                coeff: ONE,
                letters: vec![0],
                elements: vec![a],
            }],
        };
        let out = s.conditional_expectation(VertexSet::singleton(1), &x).unwrap();
        assert_eq!(max_abs_cols(&out.matrix, &s.exact_columns(0)), 0.0);
        let keep = s.conditional_expectation(VertexSet::singleton(0), &x).unwrap();
        assert!(s.residual(&keep, &s.expansion_operator(&x).unwrap()) == 0.0);
        let e = s.projection(g.all());
        assert!(s.residual(&e, &s.identity()) == 0.0);
        let e0 = s.projection(VertexSet::EMPTY);
        assert_eq!(e0.matrix.iter().filter(|c| c.norm() > 0.0).count(), 1);
    }

    #[test]
    fn triples_of_single_letter() {
        let s = space(&SimpleGraph::cycle(5), 2, 2);
        assert_eq!(s.triples(&[0]).len(), 3);
        assert_eq!(s.triples(&[]).len(), 1);
    }
}
