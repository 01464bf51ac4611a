//! Right-angled Coxeter groups: normal forms, growth series and the Hecke convergence test.
//!
//! Elements are stored in Cartier–Foata form: a sequence of cliques
//! (layers) where every letter of a layer fails to commute with some letter
//! of the previous layer. Reading each layer in increasing vertex order gives
//! the canonical reduced expression.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::tristate::Truth;
use crate::vset::VertexSet;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;
pub const DEFAULT_CLIQUE_CAP: usize = 1 << 20;
/// Half-width of the window around spectral radius 1 that is reported as undecided.
pub const SPECTRAL_TOLERANCE: f64 = 1e-9;

/// Group element in Cartier–Foata form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalWord {
    layers: Vec<VertexSet>,
    len: usize,
    tag: u64,
}

impl NormalWord {
    pub fn layers(&self) -> &[VertexSet] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_identity(&self) -> bool {
        self.len == 0
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Canonical reduced expression: layers in order, each in increasing vertex order.
    pub fn letters(&self) -> Vec<usize> {
        self.layers.iter().flat_map(|l| l.iter()).collect()
    }

    pub fn support(&self) -> VertexSet {
        self.layers.iter().fold(VertexSet::EMPTY, |a, l| a.union(*l))
    }

    /// Letters `v` with `|v·w| < |w|`.
    pub fn first_letters(&self) -> VertexSet {
        self.layers.first().copied().unwrap_or_default()
    }

    /// Exactly one layer, or the identity.
    pub fn is_clique_word(&self) -> bool {
        self.layers.len() <= 1
    }
}

/// Summary of the left-to-right exchange check used by [`CoxeterGroup::verify_combinatorics_lemma`].
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub triples_checked: usize,
    pub passed: bool,
    /// `(u, w, u')` as canonical letter-id sequences.
    pub counterexample: Option<[Vec<String>; 3]>,
}

/// Element counts per length, with optional weighted sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthTable {
    pub counts: Vec<u64>,
    pub weighted: Option<Vec<f64>>,
}

/// Outcome of [`CoxeterGroup::hecke_sum_converges`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeConvergence {
    pub converges: Truth,
    /// Estimated spectral radius of the weighted transfer matrix; 0 for finite groups.
    pub spectral_radius: f64,
    pub note: String,
}

/// `W_Γ` for a fixed graph.
#[derive(Clone, Debug)]
pub struct CoxeterGroup {
    graph: SimpleGraph,
    tag: u64,
}

impl CoxeterGroup {
    pub fn new(graph: &SimpleGraph) -> Self {
        let mut h = DefaultHasher::new();
        graph.ids().hash(&mut h);
        graph.edges().hash(&mut h);
        CoxeterGroup {
            graph: graph.clone(),
            tag: h.finish(),
        }
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    fn commutes(&self, a: usize, b: usize) -> bool {
        self.graph.adjacent(a, b)
    }

    fn check(&self, w: &NormalWord) -> Result<()> {
        if w.tag != self.tag {
            return Err(Error::validation("word belongs to a different graph"));
        }
        Ok(())
    }

    pub fn identity(&self) -> NormalWord {
        NormalWord {
            layers: vec![],
            len: 0,
            tag: self.tag,
        }
    }

    pub fn generator(&self, v: usize) -> NormalWord {
        NormalWord {
            layers: vec![VertexSet::singleton(v)],
            len: 1,
            tag: self.tag,
        }
    }

    /// Reduced expression for the element spelled by `seq`, keeping surviving letters in order.
    pub fn reduce(&self, seq: &[usize]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = Vec::with_capacity(seq.len());
        for &v in seq {
            if v >= self.graph.len() {
                return Err(Error::validation(format!("unknown letter index {v}")));
            }
            let mut cancel = None;
            for (i, &u) in out.iter().enumerate().rev() {
                if u == v {
                    cancel = Some(i);
                    break;
                }
                if !self.commutes(u, v) {
                    break;
                }
            }
            match cancel {
                Some(i) => {
                    out.remove(i);
                }
                None => out.push(v),
            }
        }
        Ok(out)
    }

    fn layer(&self, reduced: &[usize]) -> NormalWord {
        let mut depth = vec![0usize; reduced.len()];
        let mut layers: Vec<VertexSet> = vec![];
        for i in 0..reduced.len() {
            let v = reduced[i];
            let d = (0..i)
                .filter(|&j| reduced[j] == v || !self.commutes(reduced[j], v))
                .map(|j| depth[j] + 1)
                .max()
                .unwrap_or(0);
            depth[i] = d;
            if layers.len() <= d {
                layers.resize(d + 1, VertexSet::EMPTY);
            }
            layers[d].insert(v);
        }
        NormalWord {
            layers,
            len: reduced.len(),
            tag: self.tag,
        }
    }

    pub fn normalize(&self, seq: &[usize]) -> Result<NormalWord> {
        Ok(self.layer(&self.reduce(seq)?))
    }

    /// Normal form of a sequence of vertex ids.
    pub fn normalize_ids<S: AsRef<str>>(&self, seq: &[S]) -> Result<NormalWord> {
        let idx: Vec<usize> = seq
            .iter()
            .map(|s| self.graph.index_of(s.as_ref()))
            .collect::<Result<_>>()?;
        self.normalize(&idx)
    }

    pub fn is_reduced(&self, seq: &[usize]) -> Result<bool> {
        Ok(self.reduce(seq)?.len() == seq.len())
    }

    pub fn multiply(&self, a: &NormalWord, b: &NormalWord) -> Result<NormalWord> {
        self.check(a)?;
        self.check(b)?;
        let mut seq = a.letters();
        seq.extend(b.letters());
        self.normalize(&seq)
    }

    pub fn inverse(&self, w: &NormalWord) -> Result<NormalWord> {
        self.check(w)?;
        let mut seq = w.letters();
        seq.reverse();
        Ok(self.layer(&seq))
    }

    /// Letters `v` with `|w·v| < |w|`.
    pub fn last_letters(&self, w: &NormalWord) -> VertexSet {
        w.support().iter().filter(|&v| self.is_last_letter(w, v)).collect()
    }

    /// `w ∈ W(Λ)`: `v·w` is reduced for every `v ∈ Λ`.
    pub fn membership_w(&self, w: &NormalWord, lam: VertexSet) -> bool {
        w.first_letters().intersection(lam).is_empty()
    }

    /// `w ∈ W′(Λ)`: `w·v` is reduced for every `v ∈ Λ`.
    pub fn membership_w_prime(&self, w: &NormalWord, lam: VertexSet) -> bool {
        self.last_letters(w).intersection(lam).is_empty()
    }

    pub fn link_of_word(&self, w: &NormalWord) -> VertexSet {
        self.graph.link(w.support())
    }

    /// Canonical letters as vertex ids.
    pub fn letter_ids(&self, w: &NormalWord) -> Vec<String> {
        w.letters().into_iter().map(|v| self.graph.id(v).to_string()).collect()
    }

    /// Highest layer holding `v` or a letter that does not commute with `v`.
    fn top_blocking(&self, w: &NormalWord, v: usize) -> Option<usize> {
        let blocking = self.graph.all().difference(self.graph.neighbours(v));
        w.layers.iter().rposition(|l| !l.intersection(blocking).is_empty())
    }

    fn is_last_letter(&self, w: &NormalWord, v: usize) -> bool {
        self.top_blocking(w, v).is_some_and(|d| w.layers[d].contains(v))
    }

    /// `w·v` when it is longer than `w`, `None` when `v` cancels.
    fn append(&self, w: &NormalWord, v: usize) -> Option<NormalWord> {
        let top = self.top_blocking(w, v);
        if top.is_some_and(|d| w.layers[d].contains(v)) {
            return None;
        }
        let d = top.map_or(0, |d| d + 1);
        let mut layers = w.layers.clone();
        if layers.len() == d {
            layers.push(VertexSet::EMPTY);
        }
        layers[d].insert(v);
        Some(NormalWord {
            layers,
            len: w.len + 1,
            tag: self.tag,
        })
    }

    /// Every element of length `≤ max_len`, grouped by length, each group in
    /// lexicographic order of canonical letters.
    pub fn enumerate_up_to(&self, max_len: usize, cap: usize) -> Result<Vec<NormalWord>> {
        let mut all = vec![self.identity()];
        let mut level = vec![self.identity()];
        for _ in 0..max_len {
            let mut next = vec![];
            for w in &level {
                for v in 0..self.graph.len() {
                    // each element is produced once, from its largest last letter
                    if let Some(x) = self.append(w, v) {
                        if !(v + 1..self.graph.len()).any(|u| self.is_last_letter(&x, u)) {
                            next.push(x);
                        }
                    }
                }
                if all.len() + next.len() > cap {
                    return Err(Error::cap(format!(
                        "more than {cap} group elements up to length {max_len}"
                    )));
                }
            }
            next.sort_by_cached_key(|w| w.letters());
            all.extend(next.iter().cloned());
            if next.is_empty() {
                break;
            }
            level = next;
        }
        Ok(all)
    }

    /// Non-empty cliques in depth-first lexicographic order.
    pub fn cliques(&self, cap: usize) -> Result<Vec<VertexSet>> {
        fn go(g: &SimpleGraph, cur: VertexSet, cand: VertexSet, out: &mut Vec<VertexSet>, cap: usize) -> bool {
            for v in cand.iter() {
                let mut next = cur;
                next.insert(v);
                if out.len() >= cap {
                    return false;
                }
                out.push(next);
                let above = if v >= 127 { 0 } else { !((2u128 << v) - 1) };
                let rest = VertexSet(cand.0 & above).intersection(g.neighbours(v));
                if !go(g, next, rest, out, cap) {
                    return false;
                }
            }
            true
        }
        let mut out = vec![];
        if !go(&self.graph, VertexSet::EMPTY, self.graph.all(), &mut out, cap) {
            return Err(Error::cap(format!("more than {cap} cliques")));
        }
        Ok(out)
    }

    /// Layer `t2` may follow layer `t1` in Cartier–Foata form.
    pub fn may_follow(&self, t1: VertexSet, t2: VertexSet) -> bool {
        t2.iter()
            .all(|v| !t1.contains(v) && t1.iter().any(|u| !self.commutes(u, v)))
    }

    pub fn growth_counts_bfs(&self, max_len: usize, cap: usize) -> Result<GrowthTable> {
        let words = self.enumerate_up_to(max_len, cap)?;
        let mut counts = vec![0u64; max_len + 1];
        for w in &words {
            counts[w.len()] += 1;
        }
        Ok(GrowthTable { counts, weighted: None })
    }

    fn check_q(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.graph.len() {
            return Err(Error::validation(format!(
                "{} Hecke parameters for {} vertices",
                q.len(),
                self.graph.len()
            )));
        }
        if let Some(v) = q.iter().position(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::validation(format!(
                "Hecke parameter {} at {:?} outside (0, 1]",
                q[v],
                self.graph.id(v)
            )));
        }
        Ok(())
    }

    /// Counts and `Σ_{|w|=n} q_w` by dynamic programming over Cartier–Foata layers.
    pub fn growth_counts_transfer(&self, max_len: usize, q: &[f64], clique_cap: usize) -> Result<GrowthTable> {
        self.check_q(q)?;
        let cl = self.cliques(clique_cap)?;
        let weight: Vec<f64> = cl.iter().map(|t| t.iter().map(|v| q[v]).product()).collect();
        let succ: Vec<Vec<usize>> = (0..cl.len())
            .map(|i| (0..cl.len()).filter(|&j| self.may_follow(cl[i], cl[j])).collect())
            .collect();
        // f[n][i]: words of length n whose last layer is clique i
        let mut fc = vec![vec![0u64; cl.len()]; max_len + 1];
        let mut fw = vec![vec![0f64; cl.len()]; max_len + 1];
        for (i, t) in cl.iter().enumerate() {
            if t.len() <= max_len {
                fc[t.len()][i] = 1;
                fw[t.len()][i] = weight[i];
            }
        }
        for n in 1..=max_len {
            for i in 0..cl.len() {
                let (c, w) = (fc[n][i], fw[n][i]);
                if c == 0 {
                    continue;
                }
                for &j in &succ[i] {
                    let m = n + cl[j].len();
                    if m <= max_len {
                        fc[m][j] = fc[m][j]
                            .checked_add(c)
                            .ok_or_else(|| Error::cap("growth count overflows 64 bits"))?;
                        fw[m][j] += w * weight[j];
                    }
                }
            }
        }
        let mut counts = vec![1u64];
        let mut weighted = vec![1.0];
        for n in 1..=max_len {
            let s = fc[n].iter().try_fold(0u64, |a, &b| a.checked_add(b));
            counts.push(s.ok_or_else(|| Error::cap("growth count overflows 64 bits"))?);
            weighted.push(fw[n].iter().sum());
        }
        Ok(GrowthTable {
            counts,
            weighted: Some(weighted),
        })
    }

    /// Whether `Σ_{w ∈ W_Γ} q_w` is finite, from the spectral radius of the
    /// clique transfer matrix with entries `q_{T′}` on allowed transitions.
    ///
    /// A cycle of transitions through cliques of weight exactly 1 certifies
    /// divergence even when the radius sits inside the tolerance window.
    pub fn hecke_sum_converges(&self, q: &[f64], clique_cap: usize) -> Result<HeckeConvergence> {
        self.check_q(q)?;
        let cl = self.cliques(clique_cap)?;
        let weight: Vec<f64> = cl.iter().map(|t| t.iter().map(|v| q[v]).product()).collect();
        let mut dg = DiGraph::<(), f64>::new();
        let nodes: Vec<_> = (0..cl.len()).map(|_| dg.add_node(())).collect();
        let mut unit = DiGraph::<(), ()>::new();
        let unodes: Vec<_> = (0..cl.len()).map(|_| unit.add_node(())).collect();
        for i in 0..cl.len() {
            for j in 0..cl.len() {
                if self.may_follow(cl[i], cl[j]) {
                    dg.add_edge(nodes[i], nodes[j], weight[j]);
                    if weight[i] == 1.0 && weight[j] == 1.0 {
                        unit.add_edge(unodes[i], unodes[j], ());
                    }
                }
            }
        }
        let sccs: Vec<Vec<usize>> = tarjan_scc(&dg)
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        if sccs.is_empty() {
            return Ok(HeckeConvergence {
                converges: Truth::Yes,
                spectral_radius: 0.0,
                note: "finite group: the transfer matrix is nilpotent".into(),
            });
        }
        let unit_cycle = tarjan_scc(&unit).iter().any(|c| c.len() > 1);
        let mut rho = 0f64;
        for comp in &sccs {
            let local: std::collections::HashMap<usize, usize> =
                comp.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let mut rows: Vec<Vec<(usize, f64)>> = vec![vec![]; comp.len()];
            for (k, &i) in comp.iter().enumerate() {
                for j in 0..cl.len() {
                    if let Some(&l) = local.get(&j) {
                        if self.may_follow(cl[i], cl[j]) {
                            rows[k].push((l, weight[j]));
                        }
                    }
                }
            }
            rho = rho.max(perron_radius(&rows));
        }
        let (converges, note) = if unit_cycle {
            (
                Truth::No,
                "a cycle of unit-weight layers forces spectral radius ≥ 1".to_string(),
            )
        } else if (rho - 1.0).abs() <= SPECTRAL_TOLERANCE {
            (
                Truth::Unknown,
                format!("spectral radius {rho} within {SPECTRAL_TOLERANCE} of 1"),
            )
        } else if rho < 1.0 {
            (Truth::Yes, format!("spectral radius {rho} < 1"))
        } else {
            (Truth::No, format!("spectral radius {rho} > 1"))
        };
        Ok(HeckeConvergence {
            converges,
            spectral_radius: rho,
            note,
        })
    }

    /// Checks, for all `w ∈ W_{Γ1}` and all `u, u′` not starting in `Γ1` and not
    /// ending in `Γ2` (lengths `≤ max_len`), that `u⁻¹wu′ ∈ W_{Γ2}` holds exactly
    /// when `u = u′` and `w ∈ W_{Γ1∩Γ2∩Link(u)}`.
    pub fn verify_combinatorics_lemma(
        &self,
        g1: VertexSet,
        g2: VertexSet,
        max_len: usize,
        cap: usize,
    ) -> Result<LemmaReport> {
        let words = self.enumerate_up_to(max_len, cap)?;
        let ws: Vec<&NormalWord> = words.iter().filter(|w| w.support().is_subset(g1)).collect();
        let us: Vec<&NormalWord> = words
            .iter()
            .filter(|u| self.membership_w(u, g1) && self.membership_w_prime(u, g2))
            .collect();
        let inv: Vec<NormalWord> = us.iter().map(|u| self.inverse(u)).collect::<Result<_>>()?;
        let mut checked = 0;
        for (iu, u) in us.iter().enumerate() {
            for w in &ws {
                let uw = self.multiply(&inv[iu], w)?;
                for u2 in &us {
                    checked += 1;
                    let lhs = self.multiply(&uw, u2)?.support().is_subset(g2);
                    let target = g1.intersection(g2).intersection(self.link_of_word(u));
                    let rhs = u == u2 && w.support().is_subset(target);
                    if lhs != rhs {
                        return Ok(LemmaReport {
                            triples_checked: checked,
                            passed: false,
                            counterexample: Some([self.letter_ids(u), self.letter_ids(w), self.letter_ids(u2)]),
                        });
                    }
                }
            }
        }
        Ok(LemmaReport {
            triples_checked: checked,
            passed: true,
            counterexample: None,
        })
    }
}

/// Perron root of an irreducible non-negative matrix given by sparse rows.
///
/// Power iteration on `A + I` (primitive) with Collatz–Wielandt bounds.
fn perron_radius(rows: &[Vec<(usize, f64)>]) -> f64 {
    let n = rows.len();
    let mut x = vec![1.0; n];
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    for _ in 0..200_000 {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + rows[i].iter().map(|&(j, a)| a * x[j]).sum::<f64>())
            .collect();
        let ratios = (0..n).map(|i| y[i] / x[i]);
        lo = ratios.clone().fold(f64::INFINITY, f64::min) - 1.0;
        hi = ratios.fold(0.0, f64::max) - 1.0;
        let m = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / m).collect();
        if hi - lo <= 1e-14 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}
