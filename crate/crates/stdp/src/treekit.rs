//! Negative trees and the structural machinery built on them: unique tree
//! paths, the spine decomposition for a four-terminal guess, shortcut
//! detection and amendment, and the path-shape predicates used by the
//! dynamic program (locally cheapest, plain, X-monotone, quasi-monotone,
//! partial-solution validity).

use crate::graph::{Path, Vertex, VertexSet, Weight, WeightedInstance};
use std::collections::HashMap;
use thiserror::Error;

/// Subset of negative trees, as a bitmask over tree indices.
pub type TreeMask = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreekitError {
    #[error("vertex {0} not in tree")]
    VertexNotInTree(Vertex),
    #[error("tree paths of the guess share no edge")]
    EmptyIntersection,
    #[error("negative cycle within the negative edge set: {0:?}")]
    NegativeCycleInForest(Vec<Vertex>),
    #[error("path does not start at a terminal of the spine")]
    BadStart,
}

/// One tree of the negative forest: a connected, acyclic set of negative
/// edges.
#[derive(Debug, Clone)]
pub struct NegTree {
    pub idx: usize,
    verts: Vec<Vertex>,
    vset: VertexSet,
    adj: HashMap<Vertex, Vec<(Vertex, Weight)>>,
}

impl NegTree {
    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    pub fn vertex_set(&self) -> &VertexSet {
        &self.vset
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vset.contains(v)
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, Weight)] {
        self.adj.get(&v).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn num_edges(&self) -> usize {
        self.verts.len() - 1
    }

    /// The unique `a`-`b` path inside the tree. A single-vertex path when
    /// `a == b`.
    pub fn tree_path(&self, a: Vertex, b: Vertex) -> Result<Path, TreekitError> {
        if !self.contains(a) {
            return Err(TreekitError::VertexNotInTree(a));
        }
        if !self.contains(b) {
            return Err(TreekitError::VertexNotInTree(b));
        }
        if a == b {
            return Ok(Path::single(a));
        }
        let mut parent: HashMap<Vertex, Vertex> = HashMap::new();
        let mut stack = vec![a];
        parent.insert(a, a);
        while let Some(x) = stack.pop() {
            if x == b {
                break;
            }
            for &(to, _) in self.neighbors(x) {
                if !parent.contains_key(&to) {
                    parent.insert(to, x);
                    stack.push(to);
                }
            }
        }
        let mut verts = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[&cur];
            verts.push(cur);
        }
        verts.reverse();
        Ok(Path::from_vertices(verts))
    }

    pub fn path_weight(&self, p: &Path) -> Weight {
        p.edge_seq()
            .map(|(x, y)| {
                self.neighbors(x)
                    .iter()
                    .find(|&&(to, _)| to == y)
                    .expect("tree edge")
                    .1
            })
            .sum()
    }

    /// Weight of the unique tree path between two tree vertices.
    pub fn dist(&self, a: Vertex, b: Vertex) -> Weight {
        self.path_weight(&self.tree_path(a, b).expect("vertices in tree"))
    }
}

/// The set of trees spanned by the negative edges of an instance.
#[derive(Debug, Clone, Default)]
pub struct NegativeForest {
    pub trees: Vec<NegTree>,
    vert_tree: HashMap<Vertex, usize>,
}

impl NegativeForest {
    pub fn c(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree_of(&self, v: Vertex) -> Option<usize> {
        self.vert_tree.get(&v).copied()
    }

    /// Tree index of a negative edge, `None` for non-tree edges.
    pub fn tree_of_edge(&self, u: Vertex, v: Vertex) -> Option<usize> {
        let t = self.tree_of(u)?;
        self.trees[t]
            .neighbors(u)
            .iter()
            .any(|&(to, _)| to == v)
            .then_some(t)
    }

    pub fn full_mask(&self) -> TreeMask {
        if self.trees.is_empty() {
            0
        } else {
            ((1u64 << self.trees.len()) - 1) as TreeMask
        }
    }
}

/// Extracts the connected components of the negative edge set; errors with a
/// cycle certificate if one of them is not a tree (the weight function then
/// cannot be conservative).
pub fn negative_forest(inst: &WeightedInstance) -> Result<NegativeForest, TreekitError> {
    let neg: Vec<usize> = inst.negative_edges().map(|(id, _)| id).collect();
    let mut adj: HashMap<Vertex, Vec<(Vertex, Weight)>> = HashMap::new();
    for &id in &neg {
        let e = inst.edge(id);
        adj.entry(e.u).or_default().push((e.v, e.w));
        adj.entry(e.v).or_default().push((e.u, e.w));
    }
    for l in adj.values_mut() {
        l.sort_unstable();
    }
    let mut roots: Vec<Vertex> = adj.keys().copied().collect();
    roots.sort_unstable();
    let mut forest = NegativeForest::default();
    let mut seen: VertexSet = VertexSet::new(inst.num_ids());
    for &root in &roots {
        if seen.contains(root) {
            continue;
        }
        let mut comp = vec![root];
        seen.insert(root);
        let mut stack = vec![root];
        let mut edge_count = 0usize;
        while let Some(x) = stack.pop() {
            for &(to, _) in &adj[&x] {
                edge_count += 1;
                if !seen.contains(to) {
                    seen.insert(to);
                    comp.push(to);
                    stack.push(to);
                }
            }
        }
        let edge_count = edge_count / 2;
        if edge_count != comp.len() - 1 {
            let ids: Vec<usize> = neg
                .iter()
                .copied()
                .filter(|&id| comp.contains(&inst.edge(id).u))
                .collect();
            let cycle = crate::graph::cycle_within(inst, &ids).expect("non-tree component");
            return Err(TreekitError::NegativeCycleInForest(cycle));
        }
        comp.sort_unstable();
        let idx = forest.trees.len();
        let mut vset = VertexSet::new(inst.num_ids());
        for &v in &comp {
            vset.insert(v);
            forest.vert_tree.insert(v, idx);
        }
        let tree_adj: HashMap<Vertex, Vec<(Vertex, Weight)>> =
            comp.iter().map(|&v| (v, adj[&v].clone())).collect();
        forest.trees.push(NegTree {
            idx,
            verts: comp,
            vset,
            adj: tree_adj,
        });
    }
    Ok(forest)
}

// ---------------------------------------------------------------------------
// Spines
// ---------------------------------------------------------------------------

/// The spine decomposition of a tree for a four-terminal guess: the path
/// `X = T[a1,b1] ∩ T[a2,b2]` with vertices `x_1..x_r`, the maximal subtrees
/// `T_i` hanging off each `x_i`, and the terminal-to-spine paths `A_i`,
/// `B_i`. Terminal names are normalized so that `a1`, `a2` hang off the
/// `x_1` side (`a2` and `b2` are swapped when needed).
#[derive(Debug, Clone)]
pub struct Spine {
    pub tree_idx: usize,
    pub a: [Vertex; 2],
    pub b: [Vertex; 2],
    /// True if the names of `a2` and `b2` were exchanged during
    /// normalization.
    pub swapped: bool,
    xs: Vec<Vertex>,
    x_index: HashMap<Vertex, usize>,
    anchor: HashMap<Vertex, usize>,
    subtrees: Vec<Vec<Vertex>>,
    a_paths: [Path; 2],
    b_paths: [Path; 2],
}

impl Spine {
    /// Number of spine vertices (`r >= 2`).
    pub fn r(&self) -> usize {
        self.xs.len()
    }

    /// Spine vertex `x_{i+1}` (0-based index).
    pub fn x(&self, i: usize) -> Vertex {
        self.xs[i]
    }

    pub fn xs(&self) -> &[Vertex] {
        &self.xs
    }

    /// 0-based spine index of `v` if it is a spine vertex.
    pub fn x_index(&self, v: Vertex) -> Option<usize> {
        self.x_index.get(&v).copied()
    }

    /// 0-based index `i` of the subtree `T_{i+1}` containing `v`.
    pub fn anchor(&self, v: Vertex) -> Option<usize> {
        self.anchor.get(&v).copied()
    }

    /// Vertices of subtree `T_{i+1}`, ascending.
    pub fn subtree(&self, i: usize) -> &[Vertex] {
        &self.subtrees[i]
    }

    pub fn a_path(&self, h: usize) -> &Path {
        &self.a_paths[h]
    }

    pub fn b_path(&self, h: usize) -> &Path {
        &self.b_paths[h]
    }

    /// Vertices of the tree in table order: ascending subtree index, then id.
    pub fn order(&self) -> Vec<Vertex> {
        let mut verts: Vec<Vertex> = self.anchor.keys().copied().collect();
        verts.sort_by_key(|&v| (self.anchor[&v], v));
        verts
    }
}

/// Builds the spine for a guess, normalizing the orientation. Fails with
/// `EmptyIntersection` when `T[a1,b1]` and `T[a2,b2]` share no edge.
pub fn build_spine(
    tree: &NegTree,
    a1: Vertex,
    a2: Vertex,
    b1: Vertex,
    b2: Vertex,
) -> Result<Spine, TreekitError> {
    let p1 = tree.tree_path(a1, b1)?;
    let p2 = tree.tree_path(a2, b2)?;
    let e2: Vec<(Vertex, Vertex)> = p2.edge_set();
    let shared: Vec<(Vertex, Vertex)> = p1
        .edge_set()
        .into_iter()
        .filter(|e| e2.contains(e))
        .collect();
    if shared.is_empty() {
        return Err(TreekitError::EmptyIntersection);
    }
    // The shared edges form one contiguous run along p1; collect its
    // vertices in p1 order, giving x_1 nearest to a1.
    let verts = p1.vertices();
    let mut xs: Vec<Vertex> = Vec::new();
    for w in verts.windows(2) {
        let key = (w[0].min(w[1]), w[0].max(w[1]));
        if shared.contains(&key) {
            if xs.is_empty() {
                xs.push(w[0]);
            }
            xs.push(w[1]);
        }
    }
    debug_assert_eq!(xs.len(), shared.len() + 1);

    // Decide a2's side: the first spine vertex along T[a2,b2] from a2.
    let (a2, b2, swapped) = {
        let first_x = p2
            .oriented_from(a2)
            .unwrap()
            .vertices()
            .iter()
            .copied()
            .find(|v| xs.contains(v))
            .expect("X lies on T[a2,b2]");
        if first_x == xs[0] {
            (a2, b2, false)
        } else {
            debug_assert_eq!(first_x, *xs.last().unwrap());
            (b2, a2, true)
        }
    };

    let x_index: HashMap<Vertex, usize> = xs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Subtree labels: multi-source BFS from the spine inside the tree.
    let mut anchor: HashMap<Vertex, usize> = x_index.clone();
    let mut queue: Vec<Vertex> = xs.clone();
    while let Some(x) = queue.pop() {
        let i = anchor[&x];
        for &(to, _) in tree.neighbors(x) {
            if anchor.contains_key(&to) {
                continue;
            }
            anchor.insert(to, i);
            queue.push(to);
        }
    }
    debug_assert_eq!(anchor.len(), tree.vertices().len());
    let mut subtrees: Vec<Vec<Vertex>> = vec![Vec::new(); xs.len()];
    for &v in tree.vertices() {
        subtrees[anchor[&v]].push(v);
    }

    let spine = Spine {
        tree_idx: tree.idx,
        a: [a1, a2],
        b: [b1, b2],
        swapped,
        a_paths: [tree.tree_path(a1, xs[0])?, tree.tree_path(a2, xs[0])?],
        b_paths: [
            tree.tree_path(b1, *xs.last().unwrap())?,
            tree.tree_path(b2, *xs.last().unwrap())?,
        ],
        xs,
        x_index,
        anchor,
        subtrees,
    };
    debug_assert_eq!(spine.anchor(spine.a[0]), Some(0));
    debug_assert_eq!(spine.anchor(spine.a[1]), Some(0));
    debug_assert_eq!(spine.anchor(spine.b[0]), Some(spine.r() - 1));
    debug_assert_eq!(spine.anchor(spine.b[1]), Some(spine.r() - 1));
    Ok(spine)
}

// ---------------------------------------------------------------------------
// Shortcuts and amendment
// ---------------------------------------------------------------------------

/// A tree path whose endpoints lie on one path of a pair and whose interior
/// avoids both paths; amending it strictly reduces weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortcut {
    pub tree: usize,
    pub z1: Vertex,
    pub z2: Vertex,
    /// Which path of the pair carries both endpoints (0 or 1).
    pub path: usize,
}

/// All shortcuts for the pair, in deterministic order: ascending tree index,
/// then endpoint ids, then path index.
pub fn find_shortcuts(p1: &Path, p2: &Path, forest: &NegativeForest) -> Vec<Shortcut> {
    let mut out = Vec::new();
    for tree in &forest.trees {
        let on: [Vec<Vertex>; 2] = [
            p1.vertices().iter().copied().filter(|&v| tree.contains(v)).collect(),
            p2.vertices().iter().copied().filter(|&v| tree.contains(v)).collect(),
        ];
        for (pi, hits) in on.iter().enumerate() {
            let mut hits = hits.clone();
            hits.sort_unstable();
            for i in 0..hits.len() {
                for j in i + 1..hits.len() {
                    let (z1, z2) = (hits[i], hits[j]);
                    let tp = tree.tree_path(z1, z2).unwrap();
                    if is_shortcut_path(&tp, p1, p2) {
                        out.push(Shortcut {
                            tree: tree.idx,
                            z1,
                            z2,
                            path: pi,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(|s| (s.tree, s.z1, s.z2, s.path));
    out
}

fn is_shortcut_path(tp: &Path, p1: &Path, p2: &Path) -> bool {
    let verts = tp.vertices();
    for &v in &verts[1..verts.len() - 1] {
        if p1.contains(v) || p2.contains(v) {
            return false;
        }
    }
    for (a, b) in tp.edge_seq() {
        if p1.has_edge(a, b) || p2.has_edge(a, b) {
            return false;
        }
    }
    true
}

pub fn is_locally_cheapest(p1: &Path, p2: &Path, forest: &NegativeForest) -> bool {
    find_shortcuts(p1, p2, forest).is_empty()
}

/// Amends all shortcuts in the deterministic order, rescanning after each
/// amendment, until the pair is locally cheapest. Never increases weight;
/// strictly decreases it whenever at least one amendment occurred.
pub fn amend(
    p1: &Path,
    p2: &Path,
    forest: &NegativeForest,
    inst: &WeightedInstance,
) -> (Path, Path) {
    let mut pair = [p1.clone(), p2.clone()];
    let mut rounds = 0usize;
    loop {
        let shortcuts = find_shortcuts(&pair[0], &pair[1], forest);
        let Some(sc) = shortcuts.first() else { break };
        let tree = &forest.trees[sc.tree];
        let tp = tree.tree_path(sc.z1, sc.z2).unwrap();
        let target = &pair[sc.path];
        let replaced = target.subpath(sc.z1, sc.z2);
        debug_assert!(
            replaced.weight(inst) + tree.path_weight(&tp) >= 0,
            "amendment must not create a negative closed walk"
        );
        let i = target.position(sc.z1).unwrap();
        let j = target.position(sc.z2).unwrap();
        let (lo, hi) = (i.min(j), i.max(j));
        let mut verts: Vec<Vertex> = target.vertices()[..=lo].to_vec();
        let mid = tp.oriented_from(target.vertices()[lo]).unwrap();
        verts.extend_from_slice(&mid.vertices()[1..]);
        verts.extend_from_slice(&target.vertices()[hi + 1..]);
        let new_path = Path::new(verts, inst).expect("amendment yields a simple path");
        debug_assert!(new_path.weight(inst) < pair[sc.path].weight(inst));
        pair[sc.path] = new_path;
        rounds += 1;
        assert!(rounds < 100_000, "amend failed to terminate");
    }
    let [q1, q2] = pair;
    (q1, q2)
}

// ---------------------------------------------------------------------------
// Shape predicates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeReport {
    pub x_monotone: bool,
    pub plain: bool,
    pub quasi_monotone: bool,
}

/// Evaluates the three path-shape predicates against a spine. `q` must start
/// at `a1` or `a2`; if only its other endpoint does, the reversed path is
/// evaluated.
pub fn shape_predicates(
    q: &Path,
    spine: &Spine,
    tree: &NegTree,
) -> Result<ShapeReport, TreekitError> {
    let q = orient_from_a(q, spine).ok_or(TreekitError::BadStart)?;
    Ok(ShapeReport {
        x_monotone: is_x_monotone(&q, spine),
        plain: is_plain(&q, spine, tree),
        quasi_monotone: is_quasi_monotone(&q, spine),
    })
}

fn orient_from_a(q: &Path, spine: &Spine) -> Option<Path> {
    if q.first() == spine.a[0] || q.first() == spine.a[1] {
        Some(q.clone())
    } else if q.last() == spine.a[0] || q.last() == spine.a[1] {
        Some(q.reversed())
    } else {
        None
    }
}

pub(crate) fn is_x_monotone(q: &Path, spine: &Spine) -> bool {
    let mut last = 0usize;
    for &v in q.vertices() {
        if let Some(i) = spine.anchor(v) {
            if i < last {
                return false;
            }
            last = i;
        }
    }
    true
}

pub(crate) fn is_plain(q: &Path, spine: &Spine, tree: &NegTree) -> bool {
    for i in 0..spine.r() {
        if !q.contains(spine.x(i)) {
            continue;
        }
        for &u in q.vertices() {
            if spine.anchor(u) == Some(i) {
                let tp = tree.tree_path(u, spine.x(i)).unwrap();
                let all_in = tp.edge_seq().all(|(a, b)| q.has_edge(a, b));
                if !all_in {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn is_quasi_monotone(q: &Path, spine: &Spine) -> bool {
    let pos: HashMap<Vertex, usize> = q
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    for i in 0..spine.r() {
        let Some(&xi_pos) = pos.get(&spine.x(i)) else {
            continue;
        };
        for &v in q.vertices() {
            let Some(h) = spine.anchor(v) else { continue };
            let vp = pos[&v];
            if h < i && vp > xi_pos {
                return false;
            }
            if h > i && vp < xi_pos {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Permissive disjointness and partial-solution validity
// ---------------------------------------------------------------------------

/// Checks permissive disjointness of two `({s1,s2},{t1,t2})`-paths: a vertex
/// may lie on both paths only where terminal names coincide, and no edge may
/// be shared.
pub fn permissively_disjoint(
    p1: &Path,
    p2: &Path,
    starts: (Vertex, Vertex),
    ends: (Vertex, Vertex),
) -> bool {
    let mut allowed: Vec<Vertex> = Vec::new();
    if starts.0 == starts.1 {
        allowed.push(starts.0);
    }
    if ends.0 == ends.1 {
        allowed.push(ends.0);
    }
    for &v in p1.vertices() {
        if p2.contains(v) && !allowed.contains(&v) {
            return false;
        }
    }
    for (a, b) in p1.edge_seq() {
        if p2.has_edge(a, b) {
            return false;
        }
    }
    true
}

/// Why a candidate pair fails to be a partial solution for its key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartialSolutionViolation {
    /// (a) endpoint pattern or permissive disjointness broken.
    NotPermissivelyDisjoint,
    /// (b) a shortcut exists.
    NotLocallyCheapest,
    /// (b) a path is not plain.
    NotPlain(usize),
    /// (b) a path is not quasi-monotone.
    NotQuasiMonotone(usize),
    /// (c) the first path does not end with `T[x_i, u]`.
    BadEnding,
    /// (d) the second path touches a subtree beyond `T_i` away from `v`.
    LateSubtreeTouched(Vertex),
    /// (e) a tree outside `tau` is touched.
    ForbiddenTree(usize),
    /// (f) the paths are in contact at another negative tree.
    ContactAt(usize),
}

/// Conditions (a)-(f) for `(q1, q2)` to be a partial solution for
/// `(u, v, tau)`; `q1` must end at `u`, `q2` at `v`, both starting at `a1`
/// or `a2`.
pub fn check_partial_solution(
    q1: &Path,
    q2: &Path,
    u: Vertex,
    v: Vertex,
    tau: TreeMask,
    spine: &Spine,
    forest: &NegativeForest,
) -> Result<(), PartialSolutionViolation> {
    use PartialSolutionViolation as V;
    let tree = &forest.trees[spine.tree_idx];
    let (a1, a2) = (spine.a[0], spine.a[1]);

    // (a) orientation, endpoints and permissive disjointness
    let q1 = q1
        .oriented_from(u)
        .filter(|p| p.last() == a1 || p.last() == a2)
        .map(|p| p.reversed())
        .ok_or(V::NotPermissivelyDisjoint)?;
    let q2 = q2
        .oriented_from(v)
        .filter(|p| p.last() == a1 || p.last() == a2)
        .map(|p| p.reversed())
        .ok_or(V::NotPermissivelyDisjoint)?;
    if !permissively_disjoint(&q1, &q2, (q1.first(), q2.first()), (u, v)) {
        return Err(V::NotPermissivelyDisjoint);
    }
    if a1 != a2 && q1.first() == q2.first() {
        return Err(V::NotPermissivelyDisjoint);
    }

    // (b) well-formed pair
    if !is_locally_cheapest(&q1, &q2, forest) {
        return Err(V::NotLocallyCheapest);
    }
    for (i, q) in [&q1, &q2].into_iter().enumerate() {
        if !is_plain(q, spine, tree) {
            return Err(V::NotPlain(i));
        }
        if !is_quasi_monotone(q, spine) {
            return Err(V::NotQuasiMonotone(i));
        }
    }

    // (c) q1 ends with T[x_i, u]
    let i0 = spine.anchor(u).expect("u in tree");
    let ending = tree.tree_path(spine.x(i0), u).unwrap();
    let k = ending.len_edges();
    if q1.len_edges() < k {
        return Err(V::BadEnding);
    }
    let tail = &q1.vertices()[q1.vertices().len() - k - 1..];
    let want = ending.vertices();
    let matches = tail == want || tail.iter().rev().eq(want.iter());
    if !matches {
        return Err(V::BadEnding);
    }

    // (d) V(T_{(i+1,r)}) ∩ V(q2) ⊆ {v}
    for &w in q2.vertices() {
        if let Some(h) = spine.anchor(w) {
            if h > i0 && w != v {
                return Err(V::LateSubtreeTouched(w));
            }
        }
    }

    // (e) only trees in tau may be touched
    for q in [&q1, &q2] {
        for &w in q.vertices() {
            if let Some(t) = forest.tree_of(w) {
                if t != spine.tree_idx && tau & (1 << t) == 0 {
                    return Err(V::ForbiddenTree(t));
                }
            }
        }
    }

    // (f) no contact at another tree
    for t in 0..forest.c() {
        if t == spine.tree_idx {
            continue;
        }
        let tv = &forest.trees[t];
        let contact = q1
            .vertices()
            .iter()
            .copied()
            .filter(|&w| tv.contains(w))
            .any(|w1| {
                q2.vertices()
                    .iter()
                    .copied()
                    .any(|w2| tv.contains(w2) && w2 != w1)
            });
        if contact {
            return Err(V::ContactAt(t));
        }
    }
    Ok(())
}

pub fn is_partial_solution(
    q1: &Path,
    q2: &Path,
    u: Vertex,
    v: Vertex,
    tau: TreeMask,
    spine: &Spine,
    forest: &NegativeForest,
) -> bool {
    check_partial_solution(q1, q2, u, v, tau, spine, forest).is_ok()
}
