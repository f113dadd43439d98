//! Core graph representation: weighted instances with exact integer-scaled
//! weights, paths, walks, and conservativeness certification.
//!
//! All weights are multiplied by 2 at ingestion. The recursive solver builds
//! gadget edges of weight `|w(T[a1,a2])|/2`; doubling keeps those integral,
//! so every computation in the crate is exact integer arithmetic.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub type Vertex = u32;
pub type Weight = i64;
pub type EdgeId = usize;

/// Largest admissible unscaled edge weight magnitude. Keeps every sum the
/// solver forms (including the doubled weights used by the matching backend)
/// far away from `i64` overflow.
pub const MAX_WEIGHT_MAGNITUDE: i64 = 1_000_000_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("bad terminal: s={s} t={t} with {n} vertices")]
    BadTerminal { s: Vertex, t: Vertex, n: usize },
    #[error("edge endpoint {0} out of range")]
    BadVertex(Vertex),
    #[error("weight magnitude {0} too large")]
    WeightTooLarge(i64),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown edge {0}-{1}")]
pub struct UnknownEdge(pub Vertex, pub Vertex);

/// Fixed-capacity bitset over vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn new(len: usize) -> Self {
        VertexSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for v in 0..len {
            s.insert(v as Vertex);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, v: Vertex) {
        self.words[v as usize / 64] |= 1 << (v as usize % 64);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.words[v as usize / 64] &= !(1 << (v as usize % 64));
    }

    pub fn contains(&self, v: Vertex) -> bool {
        let i = v as usize;
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len as Vertex).filter(move |&v| self.contains(v))
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    /// Scaled (doubled) weight.
    pub w: Weight,
}

impl Edge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn key(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }
}

fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// An undirected simple graph with exact integer-scaled conservative weights
/// and two terminals.
///
/// Vertex ids live in a fixed id space `0..num_ids()`; sub-instances built by
/// the solver keep the id space and mark vertices dead instead of renaming,
/// so paths never need translation between recursion levels.
#[derive(Clone)]
pub struct WeightedInstance {
    num_ids: usize,
    alive: VertexSet,
    edges: Vec<Edge>,
    index: HashMap<(Vertex, Vertex), EdgeId>,
    adj: Vec<Vec<(Vertex, EdgeId)>>,
    s: Vertex,
    t: Vertex,
}

impl fmt::Debug for WeightedInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WeightedInstance(n={}, m={}, s={}, t={})",
            self.num_ids,
            self.edges.len(),
            self.s,
            self.t
        )
    }
}

/// Raw instance as read from or written to JSON; weights are unscaled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawInstance {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex, i64)>,
    pub s: Vertex,
    pub t: Vertex,
}

/// Builds an instance from unscaled integer weights, doubling every weight.
pub fn build_instance(
    n: usize,
    edges: &[(Vertex, Vertex, i64)],
    s: Vertex,
    t: Vertex,
) -> Result<WeightedInstance, BuildError> {
    let scaled: Vec<(Vertex, Vertex, Weight)> = edges
        .iter()
        .map(|&(u, v, w)| {
            if w.abs() > MAX_WEIGHT_MAGNITUDE {
                Err(BuildError::WeightTooLarge(w))
            } else {
                Ok((u, v, 2 * w))
            }
        })
        .collect::<Result<_, _>>()?;
    WeightedInstance::from_scaled(n, &scaled, s, t)
}

impl WeightedInstance {
    /// Builds an instance whose weights are already scaled. Used internally
    /// for sub-instances whose gadget edges are half a tree-path weight.
    pub fn from_scaled(
        n: usize,
        edges: &[(Vertex, Vertex, Weight)],
        s: Vertex,
        t: Vertex,
    ) -> Result<WeightedInstance, BuildError> {
        if s == t || s as usize >= n || t as usize >= n {
            return Err(BuildError::BadTerminal { s, t, n });
        }
        let mut inst = WeightedInstance {
            num_ids: n,
            alive: VertexSet::full(n),
            edges: Vec::with_capacity(edges.len()),
            index: HashMap::new(),
            adj: vec![Vec::new(); n],
            s,
            t,
        };
        let mut sorted: Vec<(Vertex, Vertex, Weight)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u == v {
                return Err(BuildError::SelfLoop(u));
            }
            if u as usize >= n {
                return Err(BuildError::BadVertex(u));
            }
            if v as usize >= n {
                return Err(BuildError::BadVertex(v));
            }
            let (u, v) = norm(u, v);
            sorted.push((u, v, w));
        }
        sorted.sort_by_key(|&(u, v, _)| (u, v));
        for &(u, v, w) in &sorted {
            if inst.index.contains_key(&(u, v)) {
                return Err(BuildError::DuplicateEdge(u, v));
            }
            let id = inst.edges.len();
            inst.edges.push(Edge { u, v, w });
            inst.index.insert((u, v), id);
            inst.adj[u as usize].push((v, id));
            inst.adj[v as usize].push((u, id));
        }
        for a in &mut inst.adj {
            a.sort_unstable();
        }
        Ok(inst)
    }

    /// Derives a sub-instance in the same id space: `extra` fresh vertices
    /// are appended, `edges` replaces the edge set, and `dead` vertices are
    /// removed. Vertices already dead in the parent stay dead.
    pub fn derive(
        &self,
        extra: usize,
        edges: &[(Vertex, Vertex, Weight)],
        dead: &VertexSet,
        s: Vertex,
        t: Vertex,
    ) -> Result<WeightedInstance, BuildError> {
        let n = self.num_ids + extra;
        let mut inst = WeightedInstance::from_scaled(n, edges, s, t)?;
        for v in 0..self.num_ids as Vertex {
            if !self.alive.contains(v) {
                inst.alive.remove(v);
            }
        }
        for v in dead.iter() {
            inst.alive.remove(v);
        }
        debug_assert!(inst.alive.contains(s) && inst.alive.contains(t));
        Ok(inst)
    }

    pub fn num_ids(&self) -> usize {
        self.num_ids
    }

    pub fn s(&self) -> Vertex {
        self.s
    }

    pub fn t(&self) -> Vertex {
        self.t
    }

    pub fn alive(&self) -> &VertexSet {
        &self.alive
    }

    pub fn num_alive(&self) -> usize {
        self.alive.count()
    }

    pub fn is_alive(&self, v: Vertex) -> bool {
        self.alive.contains(v)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.index.get(&norm(u, v)).copied()
    }

    pub fn edge_weight(&self, u: Vertex, v: Vertex) -> Result<Weight, UnknownEdge> {
        self.edge_between(u, v)
            .map(|id| self.edges[id].w)
            .ok_or(UnknownEdge(u, v))
    }

    /// Neighbors of `v` in ascending id order, dead endpoints skipped.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, EdgeId)> + '_ {
        self.adj[v as usize]
            .iter()
            .copied()
            .filter(move |&(u, _)| self.alive.contains(u))
    }

    /// Exact scaled weight of an edge set given as vertex pairs.
    pub fn weight_of(
        &self,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Weight, UnknownEdge> {
        let mut total = 0;
        for (u, v) in edges {
            total += self.edge_weight(u, v)?;
        }
        Ok(total)
    }

    /// Exact scaled weight of a walk; edges count with multiplicity.
    pub fn weight_of_walk(&self, walk: &Walk) -> Result<Weight, UnknownEdge> {
        self.weight_of(walk.edge_seq())
    }

    pub fn raw(&self) -> RawInstance {
        RawInstance {
            n: self.num_ids,
            edges: self
                .edges
                .iter()
                .map(|e| {
                    debug_assert_eq!(e.w % 2, 0, "raw export requires even scaled weights");
                    (e.u, e.v, e.w / 2)
                })
                .collect(),
            s: self.s,
            t: self.t,
        }
    }

    pub fn negative_edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.w < 0 && self.alive.contains(e.u) && self.alive.contains(e.v))
    }
}

/// A read-only view of an instance with additional vertices masked out.
/// Used for the auxiliary graphs of the dynamic program and for shortest
/// path queries on restricted subgraphs.
#[derive(Clone)]
pub struct GraphView<'a> {
    pub inst: &'a WeightedInstance,
    pub alive: VertexSet,
}

impl<'a> GraphView<'a> {
    pub fn whole(inst: &'a WeightedInstance) -> Self {
        GraphView {
            inst,
            alive: inst.alive().clone(),
        }
    }

    pub fn without(inst: &'a WeightedInstance, dead: &VertexSet) -> Self {
        let mut alive = inst.alive().clone();
        alive.subtract(dead);
        GraphView { inst, alive }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.alive.contains(v)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, EdgeId)> + '_ {
        self.inst
            .neighbors(v)
            .filter(move |&(u, _)| self.alive.contains(u))
    }

    pub fn num_ids(&self) -> usize {
        self.inst.num_ids()
    }

    pub fn num_alive(&self) -> usize {
        self.alive.count()
    }

    /// Negative edges with both endpoints alive in the view.
    pub fn negative_edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.inst
            .edges()
            .iter()
            .enumerate()
            .filter(move |(_, e)| {
                e.w < 0 && self.alive.contains(e.u) && self.alive.contains(e.v)
            })
    }

    /// True if the path uses only alive vertices.
    pub fn contains_path(&self, p: &Path) -> bool {
        p.vertices().iter().all(|&v| self.alive.contains(v))
    }
}

pub fn parse_instance(json: &str) -> Result<WeightedInstance, String> {
    let raw: RawInstance = serde_json::from_str(json).map_err(|e| e.to_string())?;
    build_instance(raw.n, &raw.edges, raw.s, raw.t).map_err(|e| e.to_string())
}

/// A simple path, stored as its vertex sequence. A single-vertex path is
/// legal and has weight 0. Paths are undirected: a path and its reverse
/// compare equal.
#[derive(Clone)]
pub struct Path {
    verts: Vec<Vertex>,
}

impl Path {
    pub fn new(verts: Vec<Vertex>, inst: &WeightedInstance) -> Result<Path, String> {
        if verts.is_empty() {
            return Err("empty vertex sequence".into());
        }
        let mut seen = VertexSet::new(inst.num_ids());
        for &v in &verts {
            if seen.contains(v) {
                return Err(format!("vertex {v} repeats"));
            }
            seen.insert(v);
        }
        for w in verts.windows(2) {
            if inst.edge_between(w[0], w[1]).is_none() {
                return Err(format!("missing edge {}-{}", w[0], w[1]));
            }
        }
        Ok(Path { verts })
    }

    pub fn single(v: Vertex) -> Path {
        Path { verts: vec![v] }
    }

    /// Constructs a path from a vertex sequence without checking edges
    /// against a host graph. Vertices must still be distinct.
    pub fn from_vertices(verts: Vec<Vertex>) -> Path {
        debug_assert!(!verts.is_empty());
        Path { verts }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn len_edges(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn first(&self) -> Vertex {
        self.verts[0]
    }

    pub fn last(&self) -> Vertex {
        *self.verts.last().unwrap()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.verts.contains(&v)
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.verts.iter().position(|&x| x == v)
    }

    pub fn vertex_set(&self, num_ids: usize) -> VertexSet {
        let mut s = VertexSet::new(num_ids);
        for &v in &self.verts {
            s.insert(v);
        }
        s
    }

    pub fn edge_seq(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.verts.windows(2).map(|w| (w[0], w[1]))
    }

    /// Edge set with endpoints normalized `(min, max)`.
    pub fn edge_set(&self) -> Vec<(Vertex, Vertex)> {
        self.edge_seq().map(|(u, v)| norm(u, v)).collect()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_seq().any(|(a, b)| norm(a, b) == norm(u, v))
    }

    /// Subpath between two vertices of the path. Symmetric in its arguments:
    /// `p.subpath(a, b)` and `p.subpath(b, a)` are equal as undirected paths.
    pub fn subpath(&self, a: Vertex, b: Vertex) -> Path {
        let i = self.position(a).expect("subpath endpoint not on path");
        let j = self.position(b).expect("subpath endpoint not on path");
        let (lo, hi) = (i.min(j), i.max(j));
        let mut verts = self.verts[lo..=hi].to_vec();
        if i > j {
            verts.reverse();
        }
        Path { verts }
    }

    pub fn reversed(&self) -> Path {
        let mut verts = self.verts.clone();
        verts.reverse();
        Path { verts }
    }

    /// Returns the path re-oriented to start at `v`, if `v` is an endpoint.
    pub fn oriented_from(&self, v: Vertex) -> Option<Path> {
        if self.first() == v {
            Some(self.clone())
        } else if self.last() == v {
            Some(self.reversed())
        } else {
            None
        }
    }

    /// Concatenates `self` with `next` at a shared endpoint, checking the
    /// result is again a simple path.
    pub fn join(&self, next: &Path) -> Result<Path, String> {
        let next = next
            .oriented_from(self.last())
            .ok_or_else(|| "paths do not share a junction endpoint".to_string())?;
        let mut verts = self.verts.clone();
        verts.extend_from_slice(&next.verts[1..]);
        let mut sorted = verts.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err("concatenation repeats a vertex".into());
        }
        Ok(Path { verts })
    }

    pub fn weight(&self, inst: &WeightedInstance) -> Weight {
        self.edge_seq()
            .map(|(u, v)| inst.edge_weight(u, v).expect("path edge missing"))
            .sum()
    }
}

impl PartialEq for Path {
    fn eq(&self, other: &Self) -> bool {
        self.verts == other.verts || self.verts.iter().rev().eq(other.verts.iter())
    }
}

impl Eq for Path {}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Path{:?}", self.verts)
    }
}

/// Disjointness contract carried by a [`PathPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisjointnessMode {
    /// Shared vertices only at common endpoints `s`, `t`.
    Openly,
    /// Shared vertices only where terminal names coincide.
    Permissively,
}

/// Two paths with their declared disjointness mode and exact total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPair {
    pub first: Path,
    pub second: Path,
    pub mode: DisjointnessMode,
    pub weight: Weight,
}

/// A walk: vertices may repeat. Stored as the visited vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    verts: Vec<Vertex>,
}

impl Walk {
    pub fn new(verts: Vec<Vertex>, inst: &WeightedInstance) -> Result<Walk, String> {
        if verts.is_empty() {
            return Err("empty walk".into());
        }
        for w in verts.windows(2) {
            if inst.edge_between(w[0], w[1]).is_none() {
                return Err(format!("missing edge {}-{}", w[0], w[1]));
            }
        }
        Ok(Walk { verts })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn is_closed(&self) -> bool {
        self.verts.first() == self.verts.last() && self.verts.len() > 1
    }

    pub fn edge_seq(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.verts.windows(2).map(|w| (w[0], w[1]))
    }

    /// True if no negative edge of `inst` appears more than once.
    pub fn no_repeated_negative_edge(&self, inst: &WeightedInstance) -> bool {
        let mut seen: Vec<(Vertex, Vertex)> = Vec::new();
        for (u, v) in self.edge_seq() {
            let key = norm(u, v);
            if inst.edge_weight(u, v).map(|w| w < 0).unwrap_or(false) {
                if seen.contains(&key) {
                    return false;
                }
                seen.push(key);
            }
        }
        true
    }
}

/// Outcome of the conservativeness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConservativenessCertificate {
    Conservative,
    /// A simple cycle with negative total (scaled) weight, as a closed
    /// vertex sequence (first vertex repeated at the end).
    NegativeCycle { cycle: Vec<Vertex>, weight: Weight },
}

impl ConservativenessCertificate {
    pub fn is_ok(&self) -> bool {
        matches!(self, ConservativenessCertificate::Conservative)
    }
}

/// Certifies that no cycle of `inst` has negative total weight.
///
/// Small instances are checked by exhausting all simple cycles with a
/// subset dynamic program; larger ones through the minimum-weight empty-join
/// reduction (the weight function is conservative iff the minimum weight of
/// an even-degree edge set is zero), which runs on a perfect matching over
/// the odd-degree vertices of the negative edge set.
pub fn is_conservative(inst: &WeightedInstance) -> ConservativenessCertificate {
    if inst.negative_edges().next().is_none() {
        return ConservativenessCertificate::Conservative;
    }
    if inst.num_alive() <= 14 {
        min_cycle_small(inst)
    } else {
        empty_join_check(inst)
    }
}

/// Minimum-weight simple cycle by DP over vertex subsets; exact for any
/// weights. Returns a certificate if the minimum is negative.
fn min_cycle_small(inst: &WeightedInstance) -> ConservativenessCertificate {
    let verts: Vec<Vertex> = inst.alive().iter().collect();
    let k = verts.len();
    let idx_of: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut best: Option<(Weight, Vec<Vertex>)> = None;
    // Anchor each cycle at its minimum-index vertex.
    for (start, &sv) in verts.iter().enumerate() {
        let nmask = 1usize << k;
        // dp[mask][v]: min weight of a simple path from sv to v over `mask`,
        // with mask only using indices >= start.
        let mut dp: Vec<Vec<Weight>> = vec![vec![Weight::MAX; k]; nmask];
        let mut parent: Vec<Vec<usize>> = vec![vec![usize::MAX; k]; nmask];
        dp[1 << start][start] = 0;
        for mask in 0..nmask {
            if mask & (1 << start) == 0 {
                continue;
            }
            for v in 0..k {
                let cur = dp[mask][v];
                if cur == Weight::MAX || mask & (1 << v) == 0 {
                    continue;
                }
                for (to, eid) in inst.neighbors(verts[v]) {
                    let ti = idx_of[&to];
                    if ti <= start || mask & (1 << ti) != 0 {
                        continue;
                    }
                    let nm = mask | (1 << ti);
                    let nw = cur + inst.edge(eid).w;
                    if nw < dp[nm][ti] {
                        dp[nm][ti] = nw;
                        parent[nm][ti] = v;
                    }
                }
            }
        }
        for mask in 0..nmask {
            if mask & (1 << start) == 0 || (mask.count_ones() as usize) < 3 {
                continue;
            }
            for v in 0..k {
                if v == start || mask & (1 << v) == 0 || dp[mask][v] == Weight::MAX {
                    continue;
                }
                if let Some(eid) = inst.edge_between(verts[v], sv) {
                    let total = dp[mask][v] + inst.edge(eid).w;
                    if best.as_ref().map(|(w, _)| total < *w).unwrap_or(true) {
                        // Reconstruct the cycle.
                        let mut seq = vec![sv];
                        let (mut m, mut cur) = (mask, v);
                        let mut rev = Vec::new();
                        while cur != start {
                            rev.push(verts[cur]);
                            let p = parent[m][cur];
                            m &= !(1 << cur);
                            cur = p;
                        }
                        rev.reverse();
                        seq.extend(rev);
                        seq.push(sv);
                        best = Some((total, seq));
                    }
                }
            }
        }
    }
    match best {
        Some((w, cycle)) if w < 0 => ConservativenessCertificate::NegativeCycle { cycle, weight: w },
        _ => ConservativenessCertificate::Conservative,
    }
}

/// Conservativeness via the minimum-weight empty join: flips negative edges,
/// matches the odd-degree vertices of `E^-` along `|w|`-shortest paths, and
/// reads the minimum even-subgraph weight off the matching value.
fn empty_join_check(inst: &WeightedInstance) -> ConservativenessCertificate {
    let neg: Vec<EdgeId> = inst.negative_edges().map(|(id, _)| id).collect();
    let wneg: Weight = neg.iter().map(|&id| inst.edge(id).w).sum();
    let mut deg: HashMap<Vertex, usize> = HashMap::new();
    for &id in &neg {
        let e = inst.edge(id);
        *deg.entry(e.u).or_default() += 1;
        *deg.entry(e.v).or_default() += 1;
    }
    let mut odd: Vec<Vertex> = deg
        .iter()
        .filter(|(_, d)| *d % 2 == 1)
        .map(|(&v, _)| v)
        .collect();
    odd.sort_unstable();
    if odd.is_empty() {
        // A nonempty negative edge set with all degrees even contains a
        // cycle of negative edges.
        let cycle = cycle_within(inst, &neg).expect("even-degree negative set has a cycle");
        let weight = inst
            .weight_of(cycle.windows(2).map(|w| (w[0], w[1])))
            .unwrap();
        return ConservativenessCertificate::NegativeCycle { cycle, weight };
    }

    let join = crate::conspath::min_join(inst, inst.alive(), &odd);
    let join = match join {
        Some(j) => j,
        None => {
            // Odd set not pairwise connectable: impossible, the negative
            // edges themselves connect their endpoints.
            unreachable!("odd vertices of E^- are connected through E^-")
        }
    };
    if wneg + join.value >= 0 {
        return ConservativenessCertificate::Conservative;
    }
    // Extract a negative cycle from the even-degree set E^- XOR join.
    let mut multiset: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for &id in &neg {
        *multiset.entry(inst.edge(id).key()).or_default() ^= 1;
    }
    for &(u, v) in &join.edges {
        *multiset.entry(norm(u, v)).or_default() ^= 1;
    }
    let even_set: Vec<(Vertex, Vertex)> = multiset
        .into_iter()
        .filter(|&(_, m)| m == 1)
        .map(|(k, _)| k)
        .collect();
    let mut remaining = even_set;
    loop {
        let ids: Vec<EdgeId> = remaining
            .iter()
            .map(|&(u, v)| inst.edge_between(u, v).unwrap())
            .collect();
        let cycle = cycle_within(inst, &ids).expect("nonzero even set decomposes into cycles");
        let weight = inst
            .weight_of(cycle.windows(2).map(|w| (w[0], w[1])))
            .unwrap();
        if weight < 0 {
            return ConservativenessCertificate::NegativeCycle { cycle, weight };
        }
        let cycle_edges: Vec<(Vertex, Vertex)> =
            cycle.windows(2).map(|w| norm(w[0], w[1])).collect();
        remaining.retain(|e| !cycle_edges.contains(e));
        if remaining.is_empty() {
            // Total weight was negative, some cycle must have been negative.
            unreachable!("negative even set without a negative cycle");
        }
    }
}

/// Finds a simple cycle inside the subgraph spanned by `edge_ids`, as a
/// closed vertex sequence. Returns `None` if the subgraph is a forest.
pub(crate) fn cycle_within(inst: &WeightedInstance, edge_ids: &[EdgeId]) -> Option<Vec<Vertex>> {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for &id in edge_ids {
        let e = inst.edge(id);
        adj.entry(e.u).or_default().push(e.v);
        adj.entry(e.v).or_default().push(e.u);
    }
    for neigh in adj.values_mut() {
        neigh.sort_unstable();
    }
    let mut roots: Vec<Vertex> = adj.keys().copied().collect();
    roots.sort_unstable();
    let mut visited: HashMap<Vertex, Vertex> = HashMap::new(); // vertex -> parent
    for &root in &roots {
        if visited.contains_key(&root) {
            continue;
        }
        // Iterative DFS storing parents; a visited neighbor that is not the
        // parent closes a cycle.
        let mut stack = vec![(root, root)];
        visited.insert(root, root);
        while let Some((v, parent)) = stack.pop() {
            for &to in &adj[&v] {
                if to == parent {
                    continue;
                }
                if visited.contains_key(&to) {
                    // Walk both vertices up to their common ancestor.
                    let path_up = |mut x: Vertex| {
                        let mut up = vec![x];
                        while visited[&x] != x {
                            x = visited[&x];
                            up.push(x);
                        }
                        up
                    };
                    let pv = path_up(v);
                    let pt = path_up(to);
                    let common: Vertex = *pv
                        .iter()
                        .find(|x| pt.contains(x))
                        .expect("same DFS tree");
                    let mut cycle: Vec<Vertex> =
                        pv.iter().take_while(|&&x| x != common).copied().collect();
                    cycle.push(common);
                    let tail: Vec<Vertex> =
                        pt.iter().take_while(|&&x| x != common).copied().collect();
                    cycle.extend(tail.into_iter().rev());
                    cycle.push(v);
                    // `cycle` is closed: v .. common .. to, v.
                    if cycle.len() >= 4 {
                        return Some(cycle);
                    }
                } else {
                    visited.insert(to, v);
                    stack.push((to, v));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn i1() -> WeightedInstance {
        // s=0, u=1, v=2, t=3
        build_instance(4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1), (1, 2, -1)], 0, 3).unwrap()
    }

    #[test]
    fn builds_i1_with_doubled_weights() {
        let inst = i1();
        assert_eq!(inst.edge_weight(0, 1).unwrap(), 2);
        assert_eq!(inst.edge_weight(1, 2).unwrap(), -2);
        assert_eq!(inst.edges().len(), 5);
    }

    #[test]
    fn builds_single_edge_instance() {
        let inst = build_instance(2, &[(0, 1, 5)], 0, 1).unwrap();
        assert_eq!(inst.edge_weight(0, 1).unwrap(), 10);
    }

    #[test]
    fn rejects_self_loop() {
        let err = build_instance(3, &[(1, 1, 2)], 0, 2).unwrap_err();
        assert_eq!(err, BuildError::SelfLoop(1));
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = build_instance(3, &[(0, 1, 2), (1, 0, 3)], 0, 2).unwrap_err();
        assert_eq!(err, BuildError::DuplicateEdge(0, 1));
    }

    #[test]
    fn rejects_bad_terminals() {
        assert!(matches!(
            build_instance(3, &[(0, 1, 1)], 2, 2),
            Err(BuildError::BadTerminal { .. })
        ));
    }

    #[test]
    fn weight_of_edge_sets_and_walks() {
        let inst = i1();
        assert_eq!(inst.weight_of([(0, 1), (1, 3)]).unwrap(), 4);
        assert_eq!(inst.weight_of([]).unwrap(), 0);
        let walk = Walk::new(vec![0, 1, 2, 0], &inst).unwrap();
        assert!(walk.is_closed());
        assert_eq!(inst.weight_of_walk(&walk).unwrap(), 2);
        assert!(inst.weight_of([(0, 3)]).is_err());
    }

    #[test]
    fn conservativeness_of_i1_by_cycle_enumeration() {
        // Oracle: I1 has exactly three simple cycles; enumerate them here.
        let inst = i1();
        let cycles: [&[Vertex]; 3] = [&[0, 1, 2, 0], &[1, 3, 2, 1], &[0, 1, 3, 2, 0]];
        let weights: Vec<Weight> = cycles
            .iter()
            .map(|c| inst.weight_of(c.windows(2).map(|w| (w[0], w[1]))).unwrap())
            .collect();
        assert_eq!(weights, vec![2, 2, 8]);
        assert!(weights.iter().all(|&w| w >= 0));
        assert!(is_conservative(&inst).is_ok());
    }

    #[test]
    fn negative_triangle_certificate() {
        let inst = build_instance(3, &[(0, 1, -1), (1, 2, -1), (0, 2, -1)], 0, 2).unwrap();
        match is_conservative(&inst) {
            ConservativenessCertificate::NegativeCycle { cycle, weight } => {
                assert_eq!(weight, -6);
                assert_eq!(cycle.len(), 4);
            }
            _ => panic!("expected a negative cycle"),
        }
    }

    #[test]
    fn all_positive_is_conservative() {
        let inst = build_instance(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], 0, 2).unwrap();
        assert!(is_conservative(&inst).is_ok());
    }

    #[test]
    fn path_subpath_is_symmetric() {
        let inst = i1();
        let p = Path::new(vec![0, 1, 2, 3], &inst).unwrap();
        assert_eq!(p.subpath(1, 3), p.subpath(3, 1));
        assert_eq!(p.subpath(2, 2).vertices(), &[2]);
        assert_eq!(p.weight(&inst), 2);
        assert_eq!(Path::single(1).weight(&inst), 0);
    }

    #[test]
    fn path_rejects_repeats_and_non_edges() {
        let inst = i1();
        assert!(Path::new(vec![0, 1, 0], &inst).is_err());
        assert!(Path::new(vec![0, 3], &inst).is_err());
    }

    #[test]
    fn scaling_doubles_every_edge_set_weight() {
        let inst = i1();
        let unscaled = [((0u32, 1u32), 1i64), ((1, 3), 1), ((1, 2), -1)];
        let sum_unscaled: i64 = unscaled.iter().map(|&(_, w)| w).sum();
        let scaled = inst
            .weight_of(unscaled.iter().map(|&((u, v), _)| (u, v)))
            .unwrap();
        assert_eq!(scaled, 2 * sum_unscaled);
    }

    #[test]
    fn json_round_trip() {
        let inst = i1();
        let json = serde_json::to_string(&inst.raw()).unwrap();
        let back = parse_instance(&json).unwrap();
        assert_eq!(back.edges(), inst.edges());
        assert_eq!(back.s(), 0);
        assert_eq!(back.t(), 3);
    }
}
