#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use gpfactor::classify::{Dimension, VertexAlgebra};
use gpfactor::{SimpleGraph, Truth};
use rand::Rng;

fn ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut p = vec![];
    for a in 0..n {
        for b in a + 1..n {
            p.push((a, b));
        }
    }
    p
}

/// Graph on `1..=n` whose edges are the set bits of `mask` over the pairs `(a, b)`, `a < b`.
pub fn graph_from_mask(n: usize, mask: u64) -> SimpleGraph {
    let edges: Vec<(usize, usize)> = pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    SimpleGraph::from_indexed(ids(n), &edges).unwrap()
}

/// Every graph on the vertex set `1..=n`.
pub fn labeled_graphs(n: usize) -> Vec<SimpleGraph> {
    let m = pairs(n).len();
    (0..1u64 << m).map(|mask| graph_from_mask(n, mask)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One graph per isomorphism class on `n` vertices (smallest edge mask of the class).
pub fn unlabeled_graphs(n: usize) -> Vec<SimpleGraph> {
    let pr = pairs(n);
    let index: HashMap<(usize, usize), usize> = pr.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for mask in 0..1u64 << pr.len() {
        let canon = perms
            .iter()
            .map(|p| {
                pr.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0u64, |acc, (_, &(a, b))| {
                        let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                        acc | 1 << index[&(x, y)]
                    })
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(graph_from_mask(n, canon));
        }
    }
    out
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> SimpleGraph {
    let edges: Vec<(usize, usize)> = pairs(n).into_iter().filter(|_| rng.random_bool(p)).collect();
    SimpleGraph::from_indexed(ids(n), &edges).unwrap()
}

/// Tits geometric representation of `W_Γ`: integer matrices, faithful.
pub struct Tits {
    n: usize,
    gens: Vec<Vec<i64>>,
}

pub type Mat = Vec<i64>;

impl Tits {
    pub fn new(g: &SimpleGraph) -> Self {
        let n = g.len();
        let b = |u: usize, v: usize| -> i64 {
            if u == v {
                1
            } else if g.adjacent(u, v) {
                0
            } else {
                -1
            }
        };
        // s_v(e_u) = e_u - 2 B(v, u) e_v
        let gens = (0..n)
            .map(|v| {
                let mut m = vec![0; n * n];
                for u in 0..n {
                    m[u * n + u] += 1;
                    m[v * n + u] -= 2 * b(v, u);
                }
                m
            })
            .collect();
        Tits { n, gens }
    }

    pub fn identity(&self) -> Mat {
        let mut m = vec![0; self.n * self.n];
        for i in 0..self.n {
            m[i * self.n + i] = 1;
        }
        m
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.n;
        let mut c = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x != 0 {
                    for j in 0..n {
                        c[i * n + j] += x * b[k * n + j];
                    }
                }
            }
        }
        c
    }

    pub fn word(&self, w: &[usize]) -> Mat {
        w.iter().fold(self.identity(), |acc, &v| self.mul(&acc, &self.gens[v]))
    }

    /// Word length of every element of length `≤ max`, by breadth-first search.
    pub fn ball(&self, max: usize) -> HashMap<Mat, usize> {
        let mut dist = HashMap::new();
        let e = self.identity();
        dist.insert(e.clone(), 0);
        let mut q = VecDeque::from([e]);
        while let Some(m) = q.pop_front() {
            let d = dist[&m];
            if d == max {
                continue;
            }
            for g in &self.gens {
                let x = self.mul(&m, g);
                if !dist.contains_key(&x) {
                    dist.insert(x.clone(), d + 1);
                    q.push_back(x);
                }
            }
        }
        dist
    }
}

/// All words over `n` letters of length exactly `len`.
pub fn words(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |v| {
                    let mut x = w.clone();
                    x.push(v);
                    x
                })
            })
            .collect();
    }
    out
}

fn custom(dim: Dimension, flags: [Truth; 11]) -> VertexAlgebra {
    let mut a = VertexAlgebra::unknown(dim);
    [
        a.amenable,
        a.atomic,
        a.diffuse,
        a.strongly_solid,
        a.is_factor,
        a.is_ii1_factor,
        a.prime,
        a.trace_zero_unitary,
        a.separable_predual,
        a.strong_ao,
        a.in_c_vertex,
    ] = flags;
    a.derive().unwrap()
}

/// Reference vertex algebras covering the cases the classifier distinguishes.
pub fn decisive_palette() -> Vec<(&'static str, VertexAlgebra)> {
    use Truth::{No, Yes};
    vec![
        ("hecke q=1", VertexAlgebra::hecke(1.0).unwrap()),
        ("hecke q=1/2", VertexAlgebra::hecke(0.5).unwrap()),
        ("hecke q=1/5", VertexAlgebra::hecke(0.2).unwrap()),
        ("M_2", VertexAlgebra::matrix(2).unwrap()),
        (
            "C^3",
            custom(Dimension::Finite(3), [Yes, Yes, No, Yes, No, No, No, Yes, Yes, No, No]),
        ),
        // hyperfinite II1 factor
        (
            "R",
            custom(Dimension::Infinite, [Yes, No, Yes, Yes, Yes, Yes, No, Yes, Yes, No, No]),
        ),
        // free group factor
        ("L(F_2)", VertexAlgebra::c_vertex()),
        // diffuse abelian
        (
            "L^inf",
            custom(Dimension::Infinite, [Yes, No, Yes, Yes, No, No, No, Yes, Yes, No, No]),
        ),
        // non-amenable II1 factor that is not strongly solid
        (
            "L(F_2)⊗R",
            custom(Dimension::Infinite, [No, No, Yes, No, Yes, Yes, No, Yes, Yes, No, No]),
        ),
    ]
}

/// Copy of `a` with the listed flags forgotten and the remaining ones re-derived.
pub fn coarsen(a: &VertexAlgebra, forget: u16) -> VertexAlgebra {
    let mut c = a.clone();
    let slots = [
        &mut c.amenable,
        &mut c.atomic,
        &mut c.diffuse,
        &mut c.strongly_solid,
        &mut c.is_factor,
        &mut c.is_ii1_factor,
        &mut c.prime,
        &mut c.trace_zero_unitary,
        &mut c.separable_predual,
        &mut c.strong_ao,
        &mut c.in_c_vertex,
    ];
    for (i, s) in slots.into_iter().enumerate() {
        if forget >> i & 1 == 1 {
            *s = Truth::Unknown;
        }
    }
    c.derive().unwrap()
}
