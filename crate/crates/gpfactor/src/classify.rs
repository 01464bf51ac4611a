//! Structural verdicts for graph products `M_Γ = ∗_{v,Γ}(M_v, τ_v)` computed
//! from the graph and per-vertex metadata.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::caps::Caps;
use crate::coxeter::CoxeterGroup;
use crate::error::{Error, Result};
use crate::graph::{Radius, SimpleGraph};
use crate::tristate::{Truth, Verdict};
use crate::vset::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Dimension {
    Finite(u64),
    #[serde(serialize_with = "ser_inf")]
    Infinite,
}

fn ser_inf<S: serde::Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("inf")
}

impl Dimension {
    pub fn is_finite(self) -> bool {
        matches!(self, Dimension::Finite(_))
    }
}

/// Metadata of one vertex algebra `(M_v, τ_v)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexAlgebra {
    pub dimension: Dimension,
    pub amenable: Truth,
    pub atomic: Truth,
    pub diffuse: Truth,
    pub strongly_solid: Truth,
    pub is_factor: Truth,
    #[serde(rename = "is_II1_factor")]
    pub is_ii1_factor: Truth,
    pub prime: Truth,
    pub trace_zero_unitary: Truth,
    pub separable_predual: Truth,
    #[serde(rename = "strong_AO")]
    pub strong_ao: Truth,
    #[serde(rename = "in_C_vertex")]
    pub in_c_vertex: Truth,
    /// Hecke parameter folded into `(0, 1]`.
    pub hecke_q: Option<f64>,
    /// Weight `α ≥ 1/2` of the larger minimal projection of a two-dimensional algebra.
    pub two_dim_alpha: Option<f64>,
}

/// Weight of the larger atom of the Hecke algebra `ℂ²` with parameter `q`.
pub fn hecke_alpha(q: f64) -> f64 {
    let p = (q - 1.0) / q.sqrt();
    0.5 * (1.0 + (1.0 - 4.0 / (p * p + 4.0)).sqrt())
}

/// Hecke parameter in `(0, 1]` producing the two-point weights `(α, 1 − α)`.
pub fn hecke_q_from_alpha(alpha: f64) -> f64 {
    let beta = (2.0 * alpha - 1.0).abs();
    let p = -2.0 * beta / (1.0 - beta * beta).sqrt();
    let s = 0.5 * (p + (p * p + 4.0).sqrt());
    s * s
}

impl VertexAlgebra {
    /// All flags unknown.
    pub fn unknown(dimension: Dimension) -> Self {
        use Truth::Unknown as U;
        VertexAlgebra {
            dimension,
            amenable: U,
            atomic: U,
            diffuse: U,
            strongly_solid: U,
            is_factor: U,
            is_ii1_factor: U,
            prime: U,
            trace_zero_unitary: U,
            separable_predual: U,
            strong_ao: U,
            in_c_vertex: U,
            hecke_q: None,
            two_dim_alpha: None,
        }
    }

    /// Two-dimensional Hecke algebra with parameter `q > 0`; `q` and `1/q` give the same algebra.
    pub fn hecke(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::validation(format!("Hecke parameter {q} must be positive")));
        }
        let q = if q > 1.0 { 1.0 / q } else { q };
        let mut a = VertexAlgebra::unknown(Dimension::Finite(2));
        a.hecke_q = Some(q);
        a.two_dim_alpha = Some(hecke_alpha(q));
        a.derive()
    }

    /// `ℂ²` with trace weights `(α, 1 − α)`.
    pub fn two_dim(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::validation(format!("two_dim weight {alpha} must lie in (0, 1)")));
        }
        let alpha = alpha.max(1.0 - alpha);
        let mut a = VertexAlgebra::unknown(Dimension::Finite(2));
        a.two_dim_alpha = Some(alpha);
        a.hecke_q = Some(if alpha == 0.5 { 1.0 } else { hecke_q_from_alpha(alpha) });
        a.derive()
    }

    /// Full matrix algebra `M_n(ℂ)` with its normalized trace.
    pub fn matrix(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::validation("matrix algebra needs n ≥ 2 (n = 1 is scalar)"));
        }
        let mut a = VertexAlgebra::unknown(Dimension::Finite(n * n));
        a.is_factor = Truth::Yes;
        a.trace_zero_unitary = Truth::Yes;
        a.prime = Truth::No;
        a.derive()
    }

    /// A II1 factor with the remaining flags taken from `self`-style overrides.
    pub fn ii1() -> Self {
        let mut a = VertexAlgebra::unknown(Dimension::Infinite);
        a.is_ii1_factor = Truth::Yes;
        a
    }

    /// Non-amenable II1 factor with strong (AO) and separable predual.
    pub fn c_vertex() -> Self {
        let mut a = VertexAlgebra::ii1();
        a.in_c_vertex = Truth::Yes;
        a.strongly_solid = Truth::Yes;
        a.derive().expect("consistent flags")
    }

    /// Completes derived flags and rejects contradictory combinations.
    pub fn derive(mut self) -> Result<Self> {
        if self.dimension == Dimension::Finite(1) {
            return Err(Error::validation("scalar vertex algebra (dimension 1) is not allowed"));
        }
        if self.dimension == Dimension::Finite(0) {
            return Err(Error::validation("dimension must be positive"));
        }
        if let Some(q) = self.hecke_q {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::validation(format!("hecke_q {q} outside (0, 1]")));
            }
            if self.dimension != Dimension::Finite(2) {
                return Err(Error::validation("hecke_q requires dimension 2"));
            }
            if self.two_dim_alpha.is_none() {
                self.two_dim_alpha = Some(hecke_alpha(q));
            }
        }
        if let Some(al) = self.two_dim_alpha {
            if !(0.5..1.0).contains(&al) {
                return Err(Error::validation(format!("two_dim_alpha {al} outside [1/2, 1)")));
            }
            if self.dimension != Dimension::Finite(2) {
                return Err(Error::validation("two_dim_alpha requires dimension 2"));
            }
            if self.hecke_q.is_none() {
                self.hecke_q = Some(if al == 0.5 { 1.0 } else { hecke_q_from_alpha(al) });
            }
            set(
                &mut self.trace_zero_unitary,
                Truth::from_bool(al == 0.5),
                "trace_zero_unitary",
            )?;
        }
        loop {
            let before = self.clone();
            self.apply_rules()?;
            if before == self {
                break;
            }
        }
        Ok(self)
    }

    fn apply_rules(&mut self) -> Result<()> {
        use Truth::*;
        if self.dimension.is_finite() {
            set(&mut self.diffuse, No, "diffuse")?;
            set(&mut self.atomic, Yes, "atomic")?;
            set(&mut self.amenable, Yes, "amenable")?;
            set(&mut self.is_ii1_factor, No, "is_II1_factor")?;
            set(&mut self.separable_predual, Yes, "separable_predual")?;
        }
        if self.dimension == Dimension::Finite(2) {
            set(&mut self.is_factor, No, "is_factor")?;
        }
        if self.diffuse.is_yes() {
            if self.dimension.is_finite() {
                return Err(Error::validation("diffuse=yes with finite dimension"));
            }
            set(&mut self.atomic, No, "atomic")?;
        }
        if self.atomic.is_yes() {
            set(&mut self.diffuse, No, "diffuse")?;
        }
        if self.is_ii1_factor.is_yes() {
            if self.dimension.is_finite() {
                return Err(Error::validation("is_II1_factor=yes with finite dimension"));
            }
            set(&mut self.is_factor, Yes, "is_factor")?;
            set(&mut self.diffuse, Yes, "diffuse")?;
            set(&mut self.trace_zero_unitary, Yes, "trace_zero_unitary")?;
        }
        if self.is_factor.is_no() {
            set(&mut self.is_ii1_factor, No, "is_II1_factor")?;
            set(&mut self.prime, No, "prime")?;
        }
        if self.in_c_vertex.is_yes() {
            set(&mut self.amenable, No, "amenable")?;
            set(&mut self.is_ii1_factor, Yes, "is_II1_factor")?;
            set(&mut self.strong_ao, Yes, "strong_AO")?;
            set(&mut self.separable_predual, Yes, "separable_predual")?;
            set(&mut self.prime, Yes, "prime")?;
        }
        let derived = Truth::all([
            self.strong_ao,
            !self.amenable,
            self.is_ii1_factor,
            self.separable_predual,
        ]);
        if derived.is_decisive() {
            set(&mut self.in_c_vertex, derived, "in_C_vertex")?;
        }
        if self.amenable.is_yes() {
            set(&mut self.strongly_solid, Yes, "strongly_solid")?;
        }
        Ok(())
    }

    pub fn is_hecke(&self) -> bool {
        self.hecke_q.is_some()
    }
}

fn set(slot: &mut Truth, value: Truth, name: &str) -> Result<()> {
    match *slot {
        Truth::Unknown => {
            *slot = value;
            Ok(())
        }
        v if v == value || value == Truth::Unknown => Ok(()),
        v => Err(Error::validation(format!(
            "inconsistent descriptor: {name}={v} contradicts derived {name}={value}"
        ))),
    }
}

/// Graph plus vertex metadata, with analysis options.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: SimpleGraph,
    pub algebras: Vec<VertexAlgebra>,
    /// Treat `M_Γ` as a II1 factor when this cannot be derived.
    pub assume_ii1_factor: bool,
    pub caps: Caps,
}

fn fmt_set(g: &SimpleGraph, s: VertexSet) -> String {
    format!("{{{}}}", g.id_list(s).join(","))
}

impl Instance {
    pub fn new(graph: SimpleGraph, algebras: Vec<VertexAlgebra>) -> Result<Self> {
        if graph.len() != algebras.len() {
            return Err(Error::validation(format!(
                "{} vertex algebras for {} vertices",
                algebras.len(),
                graph.len()
            )));
        }
        Ok(Instance {
            graph,
            algebras,
            assume_ii1_factor: false,
            caps: Caps::default(),
        })
    }

    /// Every vertex carries the same algebra.
    pub fn uniform(graph: SimpleGraph, a: VertexAlgebra) -> Self {
        let algebras = vec![a; graph.len()];
        Instance::new(graph, algebras).expect("matching lengths")
    }

    fn all_flag(&self, lam: VertexSet, f: impl Fn(&VertexAlgebra) -> Truth) -> Truth {
        Truth::all(lam.iter().map(|v| f(&self.algebras[v])))
    }

    fn set_str(&self, s: VertexSet) -> String {
        fmt_set(&self.graph, s)
    }

    pub fn amenable(&self) -> Verdict {
        self.amenable_on(self.graph.all())
    }

    /// Amenability of `M_Λ`.
    pub fn amenable_on(&self, lam: VertexSet) -> Verdict {
        let g = &self.graph;
        let mut pair_fail = None;
        'outer: for v in lam.iter() {
            for w in lam.iter().filter(|&w| w > v && !g.adjacent(v, w)) {
                let pair = VertexSet::from_indices([v, w]);
                let dims_ok = self.algebras[v].dimension == Dimension::Finite(2)
                    && self.algebras[w].dimension == Dimension::Finite(2);
                let link_ok = g.link_within(pair, lam) == lam.difference(pair);
                if !(dims_ok && link_ok) {
                    pair_fail = Some((v, w, dims_ok));
                    break 'outer;
                }
            }
        }
        if let Some((v, w, dims_ok)) = pair_fail {
            let why = if dims_ok {
                "its common link is not everything else"
            } else {
                "not both two-dimensional"
            };
            return Verdict::no(format!(
                "amenability criterion: non-adjacent pair {{{},{}}} is {why}",
                g.id(v),
                g.id(w)
            ));
        }
        match self.all_flag(lam, |a| a.amenable) {
            Truth::Yes => Verdict::yes(
                "amenability criterion: all vertex algebras amenable and every non-adjacent pair is two-dimensional with complete common link",
            ),
            Truth::No => {
                let v = lam.iter().find(|&v| self.algebras[v].amenable.is_no()).unwrap();
                Verdict::no(format!("amenability criterion: vertex {} is not amenable", g.id(v)))
            }
            Truth::Unknown => Verdict::unknown("amenability criterion: some vertex amenability flag is unknown"),
        }
    }

    pub fn atomic(&self) -> Verdict {
        self.atomic_on(self.graph.all())
    }

    pub fn atomic_on(&self, lam: VertexSet) -> Verdict {
        if !self.graph.is_clique(lam) {
            return Verdict::no("atomicity criterion: graph is not complete, so a free product factor is diffuse");
        }
        match self.all_flag(lam, |a| a.atomic) {
            Truth::Yes => Verdict::yes("atomicity criterion: complete graph with atomic vertex algebras"),
            Truth::No => Verdict::no("atomicity criterion: a vertex algebra is not atomic"),
            Truth::Unknown => Verdict::unknown("atomicity criterion: some vertex atomicity flag is unknown"),
        }
    }

    pub fn diffuse(&self) -> Result<Verdict> {
        self.diffuse_on(self.graph.all())
    }

    pub fn diffuse_on(&self, lam: VertexSet) -> Result<Verdict> {
        if lam.is_empty() {
            return Ok(Verdict::no("empty graph: M = ℂ is not diffuse"));
        }
        let complete = self.graph.is_clique(lam);
        let some_diffuse = lam.iter().any(|v| self.algebras[v].diffuse.is_yes());
        if self.all_flag(lam, |a| a.trace_zero_unitary).is_yes() && (some_diffuse || !complete) {
            return Ok(Verdict::yes(if some_diffuse {
                "diffuseness criterion: trace-zero unitaries at every vertex and a diffuse vertex algebra"
            } else {
                "diffuseness criterion: trace-zero unitaries at every vertex and an incomplete graph"
            }));
        }
        if lam.iter().all(|v| self.algebras[v].is_hecke()) {
            let sub = self.graph.induced(lam);
            let q: Vec<f64> = lam.iter().map(|v| self.algebras[v].hecke_q.unwrap()).collect();
            let h = CoxeterGroup::new(&sub).hecke_sum_converges(&q, self.caps.cliques)?;
            return Ok(match h.converges {
                Truth::Yes => Verdict::no(format!("Hecke criterion: Σ q_w converges ({})", h.note)),
                Truth::No => Verdict::yes(format!("Hecke criterion: Σ q_w diverges ({})", h.note)),
                Truth::Unknown => Verdict::unknown(format!("Hecke criterion undecided: {}", h.note)),
            });
        }
        if complete && some_diffuse {
            return Ok(Verdict::yes("tensor product with a diffuse vertex algebra is diffuse"));
        }
        if complete && self.all_flag(lam, |a| a.atomic).is_yes() {
            return Ok(Verdict::no(
                "tensor product of atomic vertex algebras is atomic, hence not diffuse",
            ));
        }
        if self.ii1_factor_on(lam).value.is_yes() {
            return Ok(Verdict::yes("a II1 factor is diffuse"));
        }
        Ok(Verdict::unknown(
            "outside the diffuseness and Hecke criteria: no trace-zero unitaries at every vertex and not a Hecke graph product",
        ))
    }

    pub fn ii1_factor(&self) -> Verdict {
        let v = self.ii1_factor_on(self.graph.all());
        if !v.value.is_decisive() && self.assume_ii1_factor {
            return Verdict::yes("asserted by the assume_II1_factor input flag");
        }
        v
    }

    /// Whether `M_Λ` is a II1 factor, as far as metadata allows.
    pub fn ii1_factor_on(&self, lam: VertexSet) -> Verdict {
        let n = lam.len();
        if n == 0 {
            return Verdict::no("empty graph: M = ℂ");
        }
        if n == 1 {
            let v = lam.first().unwrap();
            return Verdict::new(self.algebras[v].is_ii1_factor, "vertex algebra flag");
        }
        if self.all_flag(lam, |a| a.is_ii1_factor).is_yes() {
            return Verdict::yes("graph products of II1 factors are II1 factors");
        }
        if self.graph.is_clique(lam) && lam.iter().all(|v| self.algebras[v].dimension.is_finite()) {
            return Verdict::no("finite-dimensional tensor product");
        }
        let comps = self.graph.irreducible_components_within(lam);
        if comps.len() == 1 {
            if n >= 3 && self.all_flag(lam, |a| a.trace_zero_unitary).is_yes() {
                return Verdict::yes(
                    "irreducible graph with at least three vertices and trace-zero unitaries gives a II1 factor",
                );
            }
            return Verdict::unknown("factoriality not derivable from metadata for this irreducible graph");
        }
        let factor = Truth::all(comps.iter().map(|&c| {
            if c.len() == 1 {
                self.algebras[c.first().unwrap()].is_factor
            } else {
                match self.ii1_factor_on(c).value {
                    Truth::Yes => Truth::Yes,
                    _ => Truth::Unknown,
                }
            }
        }));
        let some_ii1 = comps.iter().any(|&c| self.ii1_factor_on(c).value.is_yes());
        match factor {
            Truth::No => Verdict::no("a tensor factor is not a factor"),
            Truth::Yes if some_ii1 => Verdict::yes("tensor product of factors with a II1 tensor factor"),
            _ => Verdict::unknown("factoriality of some tensor factor not derivable from metadata"),
        }
    }

    pub fn strongly_solid(&self) -> Result<Verdict> {
        let g = &self.graph;
        let n = g.len();
        if n > self.caps.sweep_vertices {
            return Err(Error::cap(format!(
                "strong solidity sweeps all induced subgraphs; {n} vertices exceed the limit {}",
                self.caps.sweep_vertices
            )));
        }
        let c1 = self.all_flag(g.all(), |a| a.strongly_solid);
        let subsets: Vec<VertexSet> = g.all().subsets().collect();
        let amen: Vec<Truth> = subsets.par_iter().map(|&s| self.amenable_on(s).value).collect();
        let relevant: Vec<(VertexSet, Truth)> = subsets
            .iter()
            .zip(&amen)
            .filter(|(_, a)| !a.is_yes())
            .map(|(&s, &a)| (s, a))
            .collect();
        let mut need: Vec<VertexSet> = relevant.iter().flat_map(|&(s, _)| [s, g.link(s)]).collect();
        need.sort_unstable();
        need.dedup();
        let diffuse: HashMap<VertexSet, Truth> = need
            .par_iter()
            .map(|&s| self.diffuse_on(s).map(|v| (s, v.value)))
            .collect::<Result<_>>()?;
        let mut verdict = c1;
        let mut witness: Option<String> = None;
        let mut unknown_at: Option<String> = None;
        if c1.is_no() {
            let v = (0..n).find(|&v| self.algebras[v].strongly_solid.is_no()).unwrap();
            witness = Some(format!("vertex {} is not strongly solid", g.id(v)));
        }
        for &(s, a) in &relevant {
            let link = g.link(s);
            let c2 = a.or(!diffuse[&link]);
            let c3 = a.or(!diffuse[&s]).or(self.atomic_on(link).value);
            let here = c2.and(c3);
            if here.is_no() && witness.is_none() {
                witness = Some(if c2.is_no() {
                    format!(
                        "M_Λ non-amenable for Λ={} while its link {} carries a diffuse algebra",
                        self.set_str(s),
                        self.set_str(link)
                    )
                } else {
                    format!(
                        "M_Λ non-amenable and diffuse for Λ={} while its link {} is not atomic",
                        self.set_str(s),
                        self.set_str(link)
                    )
                });
            }
            if here == Truth::Unknown && unknown_at.is_none() {
                unknown_at = Some(self.set_str(s));
            }
            verdict = verdict.and(here);
        }
        Ok(match verdict {
            Truth::Yes => Verdict::yes(
                "strong solidity criterion: vertex algebras strongly solid and every non-amenable M_Λ has a non-diffuse link, atomic when M_Λ is diffuse",
            ),
            Truth::No => Verdict::no(format!("strong solidity criterion fails: {}", witness.unwrap())),
            Truth::Unknown => Verdict::unknown(match unknown_at {
                Some(s) => format!("strong solidity criterion undecided at Λ={s}"),
                None => "strong solidity criterion undecided: some vertex strong solidity flag is unknown".into(),
            }),
        })
    }

    pub fn prime(&self) -> Verdict {
        if self.graph.is_empty() {
            return Verdict::unknown("empty graph: M = ℂ is not a II1 factor, primeness undefined");
        }
        self.prime_on(self.graph.all(), self.assume_ii1_factor)
    }

    fn prime_on(&self, lam: VertexSet, assume_ii1: bool) -> Verdict {
        let g = &self.graph;
        let n = lam.len();
        if n == 1 {
            let v = lam.first().unwrap();
            return Verdict::new(self.algebras[v].prime, format!("vertex algebra flag of {}", g.id(v)));
        }
        let comps = g.irreducible_components_within(lam);
        let irreducible = comps.len() == 1;
        if self.all_flag(lam, |a| a.is_ii1_factor).is_yes() {
            return if irreducible {
                Verdict::yes("primeness criterion for II1 vertex factors: graph is irreducible")
            } else {
                Verdict::no(
                    "primeness criterion for II1 vertex factors: graph splits as a join, giving a tensor decomposition",
                )
            };
        }
        if irreducible && n >= 3 && self.all_flag(lam, |a| a.trace_zero_unitary).is_yes() {
            return Verdict::yes(
                "irreducible graph with at least three vertices and trace-zero unitaries: prime factor",
            );
        }
        let ii1 = self.ii1_factor_on(lam).value;
        let ii1 = if ii1 == Truth::Unknown && assume_ii1 {
            Truth::Yes
        } else {
            ii1
        };
        if ii1.is_no() {
            return Verdict::no("M_Λ is not a II1 factor");
        }
        if ii1.is_yes() && !irreducible {
            let mut acc = Truth::No;
            let mut hit = None;
            for &c in &comps {
                let rest = lam.difference(c);
                let fin =
                    Truth::from_bool(g.is_clique(rest) && rest.iter().all(|v| self.algebras[v].dimension.is_finite()));
                let here = if fin.is_yes() {
                    self.prime_on(c, true).value
                } else {
                    Truth::No
                };
                if here.is_yes() && hit.is_none() {
                    hit = Some(c);
                }
                acc = acc.or(here);
            }
            return match acc {
                Truth::Yes => Verdict::yes(format!(
                    "general primeness criterion: irreducible component {} is prime and the rest is finite-dimensional",
                    self.set_str(hit.unwrap())
                )),
                Truth::No => Verdict::no(
                    "general primeness criterion: no irreducible component is prime with finite-dimensional complement",
                ),
                Truth::Unknown => {
                    Verdict::unknown("general primeness criterion undecided: primeness of a component is unknown")
                }
            };
        }
        Verdict::unknown("primeness hypotheses not established: M_Λ not known to be a II1 factor")
    }

    pub fn freely_indecomposable(&self) -> Verdict {
        self.freely_indecomposable_on(self.graph.all())
    }

    pub fn freely_indecomposable_on(&self, lam: VertexSet) -> Verdict {
        if lam.len() < 2 {
            return Verdict::unknown("free indecomposability criterion needs at least two vertices");
        }
        let hyp = self.all_flag(lam, |a| a.is_ii1_factor.and(a.separable_predual));
        if !hyp.is_yes() {
            return Verdict::unknown(
                "free indecomposability criterion needs II1 vertex factors with separable predual",
            );
        }
        if self.graph.connected_components_within(lam).len() == 1 {
            Verdict::yes("free indecomposability criterion: graph is connected")
        } else {
            Verdict::no("free indecomposability criterion: disconnected graph gives a free product decomposition")
        }
    }

    pub fn cartan_absence(&self) -> Verdict {
        let r = self.graph.radius();
        let far = match r {
            Radius::Infinite => true,
            Radius::Finite(k) => k >= 3,
        };
        if !far {
            return Verdict::unknown("Cartan absence criterion needs radius at least 3");
        }
        if self.all_flag(self.graph.all(), |a| a.is_ii1_factor).is_yes() && !self.graph.is_empty() {
            Verdict::yes("Cartan absence criterion: radius at least 3 with II1 vertex factors")
        } else {
            Verdict::unknown("Cartan absence criterion needs II1 vertex factors")
        }
    }

    /// Rigid non-empty graph with every vertex algebra in the strong (AO) non-amenable II1 class.
    pub fn in_c_rigid(&self) -> Verdict {
        if self.graph.is_empty() {
            return Verdict::no("empty graph");
        }
        if !self.graph.is_rigid() {
            return Verdict::no("graph is not rigid");
        }
        match self.all_flag(self.graph.all(), |a| a.in_c_vertex) {
            Truth::Yes => Verdict::yes("rigid graph with all vertex algebras in the vertex class"),
            Truth::No => Verdict::no("a vertex algebra is outside the vertex class"),
            Truth::Unknown => Verdict::unknown("vertex class membership unknown for some vertex"),
        }
    }

    pub fn prime_factorization(&self) -> Vec<Factor> {
        let rigid = self.in_c_rigid().value.is_yes();
        self.graph
            .irreducible_components()
            .into_iter()
            .map(|c| {
                let v = self.prime_on(c, self.assume_ii1_factor || rigid);
                Factor {
                    members: self.graph.id_list(c),
                    verdict: v,
                    rigid: self.graph.induced(c).is_rigid(),
                    provenance: if rigid {
                        "tensor factor; unique up to permutation and amplification in the rigid class".into()
                    } else {
                        "tensor factor; outside the rigid class, uniqueness not asserted".into()
                    },
                }
            })
            .collect()
    }

    pub fn free_product_decomposition(&self) -> Vec<Factor> {
        let hyp = self.in_c_rigid().value.is_yes() && self.graph.len() >= 2;
        self.graph
            .connected_components()
            .into_iter()
            .map(|c| {
                let rigid = self.graph.induced(c).is_rigid();
                let v = self.freely_indecomposable_on(c);
                let mut provenance = if hyp {
                    "free factor; unique up to permutation and unitary conjugacy".to_string()
                } else {
                    "free factor; uniqueness not asserted".to_string()
                };
                if !rigid {
                    provenance.push_str("; component graph is not rigid");
                }
                Factor {
                    members: self.graph.id_list(c),
                    verdict: v,
                    rigid,
                    provenance,
                }
            })
            .collect()
    }

    pub fn full_report(&self) -> Result<StructureReport> {
        let g = &self.graph;
        let (core, _) = g.core();
        let radius = match g.radius() {
            Radius::Finite(r) => serde_json::Value::from(r),
            Radius::Infinite => serde_json::Value::from("inf"),
        };
        Ok(StructureReport {
            vertices: g.ids().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(a, b)| [g.id(a).to_string(), g.id(b).to_string()])
                .collect(),
            graph: GraphFacts {
                rigid: g.is_rigid(),
                irreducible: g.is_irreducible(),
                connected: g.is_connected(),
                complete: g.is_complete(),
                radius,
                core: core.ids().to_vec(),
                irreducible_components: crate::graph::sets_to_ids(g, &g.irreducible_components()),
                connected_components: crate::graph::sets_to_ids(g, &g.connected_components()),
            },
            amenable: self.amenable(),
            atomic: self.atomic(),
            diffuse: self.diffuse()?,
            strongly_solid: self.strongly_solid()?,
            ii1_factor: self.ii1_factor(),
            prime: self.prime(),
            freely_indecomposable: self.freely_indecomposable(),
            cartan_absence: self.cartan_absence(),
            in_c_rigid: self.in_c_rigid(),
            prime_factorization: self.prime_factorization(),
            free_product_decomposition: self.free_product_decomposition(),
        })
    }
}

/// One tensor or free factor in a decomposition report.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Factor {
    pub members: Vec<String>,
    /// Primeness for tensor factors; free indecomposability for free factors.
    pub verdict: Verdict,
    pub rigid: bool,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GraphFacts {
    pub rigid: bool,
    pub irreducible: bool,
    pub connected: bool,
    pub complete: bool,
    pub radius: serde_json::Value,
    pub core: Vec<String>,
    pub irreducible_components: Vec<Vec<String>>,
    pub connected_components: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StructureReport {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub graph: GraphFacts,
    pub amenable: Verdict,
    pub atomic: Verdict,
    pub diffuse: Verdict,
    pub strongly_solid: Verdict,
    pub ii1_factor: Verdict,
    pub prime: Verdict,
    pub freely_indecomposable: Verdict,
    pub cartan_absence: Verdict,
    pub in_c_rigid: Verdict,
    pub prime_factorization: Vec<Factor>,
    pub free_product_decomposition: Vec<Factor>,
}

/// Outcome of comparing two instances through their graphs.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsoVerdict {
    NotIsomorphic {
        provenance: String,
    },
    NoObstruction {
        provenance: String,
        /// Each isomorphism as a map from ids of the first graph to ids of the second.
        isomorphisms: Vec<BTreeMap<String, String>>,
        truncated: bool,
    },
    Inapplicable {
        reason: String,
    },
}

pub fn isomorphism_obstruction(a: &Instance, b: &Instance) -> IsoVerdict {
    for (name, inst) in [("first", a), ("second", b)] {
        let c = inst.in_c_rigid();
        if !c.value.is_yes() {
            return IsoVerdict::Inapplicable {
                reason: format!("{name} input is outside the rigid class: {}", c.provenance),
            };
        }
    }
    let cap = a.caps.isomorphisms.max(1);
    let isos = a.graph.isomorphisms(&b.graph, cap + 1);
    if isos.is_empty() {
        return IsoVerdict::NotIsomorphic {
            provenance: "NOT isomorphic: in the rigid class an isomorphism of graph products forces a graph isomorphism, and the graphs are not isomorphic".into(),
        };
    }
    let truncated = isos.len() > cap;
    let isomorphisms = isos
        .iter()
        .take(cap)
        .map(|iso| {
            iso.map
                .iter()
                .enumerate()
                .map(|(i, &j)| (a.graph.id(i).to_string(), b.graph.id(j).to_string()))
                .collect()
        })
        .collect();
    IsoVerdict::NoObstruction {
        provenance: "no obstruction: any isomorphism forces M_v isomorphic to an amplification of N_α(v) for a graph isomorphism α".into(),
        isomorphisms,
        truncated,
    }
}
