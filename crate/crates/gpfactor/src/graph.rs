//! Finite simple graphs and the graph-theoretic predicates used by the classifier.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::vset::{VertexSet, MAX_VERTICES};

/// Undirected graph without loops or multiple edges.
///
/// Vertices are identified by text ids and by their index in insertion
/// order; every set-valued result is ordered by that index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    ids: Vec<String>,
    adj: Vec<VertexSet>,
}

/// Eccentricity-based radius; disconnected graphs have infinite radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Radius {
    Finite(usize),
    Infinite,
}

/// Vertex bijection `map[i]` = image in the target graph of vertex `i` of the source graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIsomorphism {
    pub map: Vec<usize>,
}

impl GraphIsomorphism {
    /// Checks bijectivity and preservation of adjacency and non-adjacency.
    pub fn is_valid(&self, from: &SimpleGraph, to: &SimpleGraph) -> bool {
        let n = from.len();
        if to.len() != n || self.map.len() != n {
            return false;
        }
        let mut seen = VertexSet::EMPTY;
        for &m in &self.map {
            if m >= n || seen.contains(m) {
                return false;
            }
            seen.insert(m);
        }
        (0..n).all(|u| (0..n).all(|v| from.adjacent(u, v) == to.adjacent(self.map[u], self.map[v])))
    }
}

impl SimpleGraph {
    /// Builds a graph from ids and edges given as index pairs.
    pub fn from_indexed(ids: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        if ids.len() > MAX_VERTICES {
            return Err(Error::cap(format!(
                "graph has {} vertices, at most {MAX_VERTICES} supported",
                ids.len()
            )));
        }
        let mut seen = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if seen.insert(id.as_str(), i).is_some() {
                return Err(Error::validation(format!("duplicate vertex id {id:?}")));
            }
        }
        let n = ids.len();
        let mut adj = vec![VertexSet::EMPTY; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::validation(format!("self-edge on {:?}", ids[a])));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(SimpleGraph { ids, adj })
    }

    /// Builds a graph from ids and edges given by id.
    pub fn new<S: AsRef<str>>(ids: &[S], edges: &[(S, S)]) -> Result<Self> {
        let ids: Vec<String> = ids.iter().map(|s| s.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut e = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::validation(format!("dangling edge: unknown vertex {:?}", a.as_ref())))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::validation(format!("dangling edge: unknown vertex {:?}", b.as_ref())))?;
            e.push((ia, ib));
        }
        Self::from_indexed(ids, &e)
    }

    pub fn empty() -> Self {
        SimpleGraph {
            ids: vec![],
            adj: vec![],
        }
    }

    /// Complete graph on `n` vertices with ids `1..=n`.
    pub fn complete(n: usize) -> Self {
        let ids = (1..=n).map(|i| i.to_string()).collect();
        let mut edges = vec![];
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Self::from_indexed(ids, &edges).expect("complete graph")
    }

    /// Cycle `Z_n` on ids `1..=n`; for n = 2 a single edge, for n = 1 a vertex.
    pub fn cycle(n: usize) -> Self {
        let ids = (1..=n).map(|i| i.to_string()).collect();
        let mut edges = vec![];
        if n == 2 {
            edges.push((0, 1));
        } else if n >= 3 {
            for i in 0..n {
                edges.push((i, (i + 1) % n));
            }
        }
        Self::from_indexed(ids, &edges).expect("cycle graph")
    }

    /// Path on ids `1..=n`.
    pub fn path(n: usize) -> Self {
        let ids = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_indexed(ids, &edges).expect("path graph")
    }

    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: usize) -> Self {
        let ids = (1..=n).map(|i| i.to_string()).collect();
        Self::from_indexed(ids, &[]).expect("edgeless graph")
    }

    /// Disjoint union followed by joining every vertex of `a` to every vertex of `b`.
    /// Ids are kept; they must be disjoint.
    pub fn join(a: &SimpleGraph, b: &SimpleGraph) -> Result<Self> {
        let na = a.len();
        let mut ids = a.ids.clone();
        ids.extend(b.ids.iter().cloned());
        let mut edges = a.edges();
        edges.extend(b.edges().into_iter().map(|(x, y)| (x + na, y + na)));
        for x in 0..na {
            for y in 0..b.len() {
                edges.push((x, y + na));
            }
        }
        Self::from_indexed(ids, &edges)
    }

    /// Disjoint union; ids must be disjoint.
    pub fn disjoint_union(a: &SimpleGraph, b: &SimpleGraph) -> Result<Self> {
        let na = a.len();
        let mut ids = a.ids.clone();
        ids.extend(b.ids.iter().cloned());
        let mut edges = a.edges();
        edges.extend(b.edges().into_iter().map(|(x, y)| (x + na, y + na)));
        Self::from_indexed(ids, &edges)
    }

    /// Copy of the graph with every id replaced by `f(id)`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Self> {
        Self::from_indexed(self.ids.iter().map(|s| f(s)).collect(), &self.edges())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::validation(format!("unknown vertex {id:?}")))
    }

    /// Resolves a list of ids into a vertex set.
    pub fn subset(&self, ids: &[&str]) -> Result<VertexSet> {
        ids.iter().map(|id| self.index_of(id)).collect()
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbours(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for a in 0..self.len() {
            for b in self.adj[a].iter().filter(|&b| b > a) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn id_list(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.ids[v].clone()).collect()
    }

    /// Common neighbours of all members of `s`; the whole vertex set for `s = ∅`.
    pub fn link(&self, s: VertexSet) -> VertexSet {
        s.iter().fold(self.all(), |acc, v| acc.intersection(self.adj[v]))
    }

    /// Link taken inside the induced subgraph on `within`.
    pub fn link_within(&self, s: VertexSet, within: VertexSet) -> VertexSet {
        self.link(s).intersection(within)
    }

    pub fn star(&self, v: usize) -> VertexSet {
        let mut s = self.adj[v];
        s.insert(v);
        s
    }

    pub fn is_clique(&self, s: VertexSet) -> bool {
        s.iter()
            .all(|v| s.difference(VertexSet::singleton(v)).is_subset(self.adj[v]))
    }

    pub fn is_complete(&self) -> bool {
        self.is_clique(self.all())
    }

    /// Every vertex satisfies `Link(Link(v)) = {v}`.
    pub fn is_rigid(&self) -> bool {
        (0..self.len()).all(|v| self.link(self.link(VertexSet::singleton(v))) == VertexSet::singleton(v))
    }

    /// No split of the vertex set into two non-empty parts joined completely to each other.
    pub fn is_irreducible(&self) -> bool {
        self.irreducible_components().len() <= 1
    }

    /// Induced subgraph on `s`, preserving vertex order.
    pub fn induced(&self, s: VertexSet) -> SimpleGraph {
        let verts = s.to_vec();
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ids = verts.iter().map(|&v| self.ids[v].clone()).collect();
        let adj = verts
            .iter()
            .map(|&v| self.adj[v].intersection(s).iter().map(|w| pos[&w]).collect())
            .collect();
        SimpleGraph { ids, adj }
    }

    fn components_by(&self, within: VertexSet, nbrs: impl Fn(usize) -> VertexSet) -> Vec<VertexSet> {
        let mut left = within;
        let mut out = vec![];
        while let Some(start) = left.first() {
            let mut comp = VertexSet::singleton(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = VertexSet::EMPTY;
                for v in frontier.iter() {
                    next = next.union(nbrs(v).intersection(within));
                }
                frontier = next.difference(comp);
                comp = comp.union(frontier);
            }
            left = left.difference(comp);
            out.push(comp);
        }
        out
    }

    /// Maximal connected vertex sets, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        self.components_by(self.all(), |v| self.adj[v])
    }

    /// Connected components of the induced subgraph on `within`.
    pub fn connected_components_within(&self, within: VertexSet) -> Vec<VertexSet> {
        self.components_by(within, |v| self.adj[v])
    }

    /// Finest join decomposition: components of the complement graph, ordered by smallest member.
    pub fn irreducible_components(&self) -> Vec<VertexSet> {
        self.irreducible_components_within(self.all())
    }

    /// Irreducible components of the induced subgraph on `within`.
    pub fn irreducible_components_within(&self, within: VertexSet) -> Vec<VertexSet> {
        let all = self.all();
        self.components_by(within, |v| {
            all.difference(self.adj[v]).difference(VertexSet::singleton(v))
        })
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    fn bfs_distances(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            let d = dist[v].unwrap();
            for w in self.adj[v].iter() {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn radius(&self) -> Radius {
        if self.is_empty() {
            return Radius::Finite(0);
        }
        if !self.is_connected() {
            return Radius::Infinite;
        }
        let r = (0..self.len())
            .map(|s| self.bfs_distances(s).into_iter().map(|d| d.unwrap()).max().unwrap())
            .min()
            .unwrap();
        Radius::Finite(r)
    }

    /// Quotient by `Star(v) = Star(w)`. Returns the quotient and the class of every vertex.
    ///
    /// Classes are numbered by smallest member; a class is named by its member
    /// ids joined with `+`.
    pub fn core(&self) -> (SimpleGraph, Vec<usize>) {
        let mut class_of = vec![usize::MAX; self.len()];
        let mut reps: Vec<usize> = vec![];
        let mut members: Vec<Vec<usize>> = vec![];
        for (v, slot) in class_of.iter_mut().enumerate() {
            if let Some(c) = reps.iter().position(|&r| self.star(r) == self.star(v)) {
                *slot = c;
                members[c].push(v);
            } else {
                *slot = reps.len();
                reps.push(v);
                members.push(vec![v]);
            }
        }
        let ids = members
            .iter()
            .map(|m| m.iter().map(|&v| self.ids[v].as_str()).collect::<Vec<_>>().join("+"))
            .collect();
        let mut edges = vec![];
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                if self.adjacent(reps[a], reps[b]) {
                    edges.push((a, b));
                }
            }
        }
        let g = SimpleGraph::from_indexed(ids, &edges).expect("core quotient");
        (g, class_of)
    }

    /// Rebuilds the graph as a graph product over its core with complete parts.
    pub fn core_reconstruction(&self) -> CoreReconstruction {
        let (pi, class_of) = self.core();
        let mut members: Vec<Vec<usize>> = vec![vec![]; pi.len()];
        for (v, &c) in class_of.iter().enumerate() {
            members[c].push(v);
        }
        let parts: Vec<SimpleGraph> = members
            .iter()
            .map(|m| {
                let ids: Vec<String> = m.iter().map(|&v| self.ids[v].clone()).collect();
                let mut edges = vec![];
                for a in 0..m.len() {
                    for b in a + 1..m.len() {
                        edges.push((a, b));
                    }
                }
                SimpleGraph::from_indexed(ids, &edges).expect("complete part")
            })
            .collect();
        let product = graph_product_of_graphs(&pi, &parts).expect("core parts are non-empty");
        let offsets = product_offsets(&parts);
        let map = (0..self.len())
            .map(|v| {
                let c = class_of[v];
                offsets[c] + members[c].iter().position(|&x| x == v).unwrap()
            })
            .collect();
        CoreReconstruction {
            pi,
            parts,
            product,
            witness: GraphIsomorphism { map },
        }
    }

    /// Some isomorphism onto `other`, if one exists.
    pub fn find_isomorphism(&self, other: &SimpleGraph) -> Option<GraphIsomorphism> {
        self.isomorphisms(other, 1).into_iter().next()
    }

    /// Up to `cap` isomorphisms onto `other`, in lexicographic order of the map.
    pub fn isomorphisms(&self, other: &SimpleGraph, cap: usize) -> Vec<GraphIsomorphism> {
        let n = self.len();
        if other.len() != n || cap == 0 {
            return vec![];
        }
        let mut d1: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut d2: Vec<usize> = (0..n).map(|v| other.degree(v)).collect();
        let (deg1, deg2) = (d1.clone(), d2.clone());
        d1.sort_unstable();
        d2.sort_unstable();
        if d1 != d2 {
            return vec![];
        }
        let mut out = vec![];
        let mut map = vec![usize::MAX; n];
        let mut used = VertexSet::EMPTY;
        self.extend_iso(other, &deg1, &deg2, 0, &mut map, &mut used, cap, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_iso(
        &self,
        other: &SimpleGraph,
        deg1: &[usize],
        deg2: &[usize],
        v: usize,
        map: &mut Vec<usize>,
        used: &mut VertexSet,
        cap: usize,
        out: &mut Vec<GraphIsomorphism>,
    ) {
        if out.len() >= cap {
            return;
        }
        if v == self.len() {
            out.push(GraphIsomorphism { map: map.clone() });
            return;
        }
        for t in 0..other.len() {
            if used.contains(t) || deg1[v] != deg2[t] {
                continue;
            }
            if (0..v).any(|u| self.adjacent(u, v) != other.adjacent(map[u], t)) {
                continue;
            }
            map[v] = t;
            used.insert(t);
            self.extend_iso(other, deg1, deg2, v + 1, map, used, cap, out);
            used.remove(t);
            map[v] = usize::MAX;
            if out.len() >= cap {
                return;
            }
        }
    }
}

/// Output of [`SimpleGraph::core_reconstruction`].
#[derive(Clone, Debug)]
pub struct CoreReconstruction {
    pub pi: SimpleGraph,
    pub parts: Vec<SimpleGraph>,
    pub product: SimpleGraph,
    /// Isomorphism from the original graph onto `product`.
    pub witness: GraphIsomorphism,
}

fn product_offsets(parts: &[SimpleGraph]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(parts.len());
    let mut acc = 0;
    for p in parts {
        offsets.push(acc);
        acc += p.len();
    }
    offsets
}

/// Graph on pairs `(v, s)`, `s` a vertex of `parts[v]`: `(v,s) ~ (w,t)` iff
/// `v = w` and `s ~ t` in `parts[v]`, or `v ≠ w` and `v ~ w` in `pi`.
///
/// Vertex `(v, s)` gets id `"(v,s)"`; order is by `v`, then by `s`.
pub fn graph_product_of_graphs(pi: &SimpleGraph, parts: &[SimpleGraph]) -> Result<SimpleGraph> {
    if parts.len() != pi.len() {
        return Err(Error::validation(format!(
            "{} parts given for {} vertices",
            parts.len(),
            pi.len()
        )));
    }
    if let Some(v) = parts.iter().position(|p| p.is_empty()) {
        return Err(Error::validation(format!("empty part graph at vertex {:?}", pi.id(v))));
    }
    let offsets = product_offsets(parts);
    let mut ids = vec![];
    let mut edges = vec![];
    for (v, p) in parts.iter().enumerate() {
        for s in 0..p.len() {
            ids.push(format!("({},{})", pi.id(v), p.id(s)));
        }
        for (s, t) in p.edges() {
            edges.push((offsets[v] + s, offsets[v] + t));
        }
    }
    for (v, w) in pi.edges() {
        for s in 0..parts[v].len() {
            for t in 0..parts[w].len() {
                edges.push((offsets[v] + s, offsets[w] + t));
            }
        }
    }
    SimpleGraph::from_indexed(ids, &edges)
}

/// Decides rigidity of the graph product from `pi` and the parts without building it.
pub fn rigid_product_criterion(pi: &SimpleGraph, parts: &[SimpleGraph]) -> Result<bool> {
    if parts.len() != pi.len() {
        return Err(Error::validation("parts do not match the base graph"));
    }
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::validation("empty part graph"));
    }
    Ok(parts.iter().all(|p| p.is_rigid())
        && (0..pi.len())
            .all(|v| pi.link(pi.link(VertexSet::singleton(v))) == VertexSet::singleton(v) || parts[v].len() >= 2))
}

/// Named-set view used in reports: vertex ids per set.
pub fn sets_to_ids(g: &SimpleGraph, sets: &[VertexSet]) -> Vec<Vec<String>> {
    sets.iter().map(|s| g.id_list(*s)).collect()
}

/// Adjacency as a sorted id → sorted neighbour ids map.
pub fn adjacency_map(g: &SimpleGraph) -> BTreeMap<String, Vec<String>> {
    (0..g.len())
        .map(|v| (g.id(v).to_string(), g.id_list(g.neighbours(v))))
        .collect()
}
