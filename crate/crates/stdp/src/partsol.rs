//! The partial-solution dynamic program: auxiliary graphs, the per-key
//! computation, and the table-driven solver for two permissively disjoint
//! `({a1,a2},{b1,b2})`-paths of minimum total weight.
//!
//! A partial solution for `(u, v, tau)` is a well-formed, permissively
//! disjoint pair from `{a1,a2}` to `{u,v}` whose first path ends with the
//! tree path `T[x_i,u]`, whose second path stays clear of the subtrees
//! beyond `T_i`, and which touches no negative tree outside `tau`. Keys are
//! filled in an order refining the subtree order, so every lookup the
//! per-key computation performs is already available.

use crate::conspath::conservative_shortest_path_fast;
use crate::graph::{GraphView, Path, Vertex, VertexSet, Weight, WeightedInstance};
use crate::treekit::{
    build_spine, check_partial_solution, NegTree, NegativeForest, Spine, TreeMask, TreekitError,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartsolError {
    #[error("required entry ({0}, {1}, {2:#b}) not yet computed")]
    TableOrderViolation(Vertex, Vertex, TreeMask),
    #[error(transparent)]
    Treekit(#[from] TreekitError),
}

/// One stored optimum: the pair `(q1, q2)` with `q1` ending at the key's
/// `u` and `q2` at its `v`.
#[derive(Debug, Clone)]
pub struct Entry {
    pub q1: Path,
    pub q2: Path,
    pub weight: Weight,
}

pub type Key = (Vertex, Vertex, TreeMask);

/// Completed table for one spine.
#[derive(Debug)]
pub struct PartialSolutionTable {
    pub spine: Spine,
    pub tau_full: TreeMask,
    entries: HashMap<Key, Option<Entry>>,
}

impl PartialSolutionTable {
    pub fn get(&self, u: Vertex, v: Vertex, tau: TreeMask) -> Option<&Entry> {
        self.entries.get(&(u, v, tau)).and_then(|e| e.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &Option<Entry>)> {
        self.entries.iter()
    }

    /// The cheaper of the two readout keys `(b1,b2)` and `(b2,b1)` over the
    /// full tree subset.
    pub fn best_pair(&self) -> Option<(Path, Path, Weight)> {
        let (b1, b2) = (self.spine.b[0], self.spine.b[1]);
        let cands = [self.get(b1, b2, self.tau_full), self.get(b2, b1, self.tau_full)];
        cands
            .into_iter()
            .flatten()
            .min_by_key(|e| e.weight)
            .map(|e| (e.q1.clone(), e.q2.clone(), e.weight))
    }
}

/// The auxiliary graph for a path `p` inside the spine's tree: delete every
/// subtree not meeting `p`, the path itself, and all vertices of trees
/// outside `tau` -- but never the two kept vertices.
pub fn auxiliary_graph<'a>(
    inst: &'a WeightedInstance,
    forest: &NegativeForest,
    spine: &Spine,
    p: &Path,
    keep: (Vertex, Vertex),
    tau: TreeMask,
) -> GraphView<'a> {
    let mut dead = VertexSet::new(inst.num_ids());
    let mut touched = vec![false; spine.r()];
    for &w in p.vertices() {
        if let Some(h) = spine.anchor(w) {
            touched[h] = true;
        }
    }
    for (h, hit) in touched.iter().enumerate() {
        if !hit {
            for &w in spine.subtree(h) {
                dead.insert(w);
            }
        }
    }
    for &w in p.vertices() {
        dead.insert(w);
    }
    for (t, tree) in forest.trees.iter().enumerate() {
        if t != spine.tree_idx && tau & (1 << t) == 0 {
            for &w in tree.vertices() {
                dead.insert(w);
            }
        }
    }
    dead.remove(keep.0);
    dead.remove(keep.1);
    GraphView::without(inst, &dead)
}

/// Incremental table construction for one spine.
pub struct TableBuilder<'a> {
    inst: &'a WeightedInstance,
    forest: &'a NegativeForest,
    tree: &'a NegTree,
    spine: Spine,
    tau_full: TreeMask,
    entries: HashMap<Key, Option<Entry>>,
    csp_cache: HashMap<(Box<[u64]>, Vertex, Vertex), Option<(Path, Weight)>>,
}

impl<'a> TableBuilder<'a> {
    /// Builds the spine for the guess (normalizing the terminal names) and
    /// an empty table.
    pub fn new(
        inst: &'a WeightedInstance,
        forest: &'a NegativeForest,
        tree_idx: usize,
        a1: Vertex,
        a2: Vertex,
        b1: Vertex,
        b2: Vertex,
    ) -> Result<Self, TreekitError> {
        let tree = &forest.trees[tree_idx];
        let spine = build_spine(tree, a1, a2, b1, b2)?;
        let tau_full = forest.full_mask() & !(1 << tree_idx);
        Ok(TableBuilder {
            inst,
            forest,
            tree,
            spine,
            tau_full,
            entries: HashMap::new(),
            csp_cache: HashMap::new(),
        })
    }

    pub fn spine(&self) -> &Spine {
        &self.spine
    }

    pub fn tau_full(&self) -> TreeMask {
        self.tau_full
    }

    fn csp(&mut self, view: &GraphView, from: Vertex, to: Vertex) -> Option<(Path, Weight)> {
        let key = (
            view.alive.words().to_vec().into_boxed_slice(),
            from,
            to,
        );
        if let Some(hit) = self.csp_cache.get(&key) {
            return hit.clone();
        }
        let res = conservative_shortest_path_fast(view, from, to)
            .expect("auxiliary graphs of a conservative instance stay conservative");
        self.csp_cache.insert(key, res.clone());
        res
    }

    /// Shortest-path candidates for the second path of a key: the shortest
    /// path in the auxiliary view, the shortest path with the already-used
    /// vertices trimmed (needed when terminals coincide and paths may touch
    /// at them), and an edge-banned recomputation when the optimum collapses
    /// onto a single edge already used by the candidate's first path.
    fn r_candidates(
        &mut self,
        aux: &GraphView,
        from: Vertex,
        to: Vertex,
        trim: &[&Path],
        banned_edge_on: &[&Path],
    ) -> Vec<Path> {
        let mut out: Vec<Path> = Vec::new();
        let push = |p: Option<(Path, Weight)>, out: &mut Vec<Path>| {
            if let Some((p, _)) = p {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        };
        push(self.csp(aux, from, to), &mut out);
        if !trim.is_empty() {
            let mut alive = aux.alive.clone();
            for p in trim {
                for &w in p.vertices() {
                    alive.remove(w);
                }
            }
            alive.insert(from);
            alive.insert(to);
            let trimmed = GraphView {
                inst: aux.inst,
                alive,
            };
            push(self.csp(&trimmed, from, to), &mut out);
        }
        // A one-edge optimum that reuses an edge of the first path can mask
        // a longer valid optimum; recompute with that edge banned.
        let colliding = out.iter().any(|r| {
            r.len_edges() == 1 && banned_edge_on.iter().any(|p| p.has_edge(from, to))
        });
        if colliding {
            if let Some(edge_id) = self.inst.edge_between(from, to) {
                let edges: Vec<(Vertex, Vertex, Weight)> = self
                    .inst
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != edge_id)
                    .map(|(_, e)| (e.u, e.v, e.w))
                    .collect();
                let empty = VertexSet::new(self.inst.num_ids());
                if let Ok(pruned) =
                    self.inst
                        .derive(0, &edges, &empty, self.inst.s(), self.inst.t())
                {
                    let view = GraphView {
                        inst: &pruned,
                        alive: aux.alive.clone(),
                    };
                    if let Ok(Some((r, _))) = conservative_shortest_path_fast(&view, from, to) {
                        // Rebuild on the original instance's id space.
                        let r = Path::from_vertices(r.vertices().to_vec());
                        if !out.contains(&r) {
                            out.push(r);
                        }
                    }
                }
            }
        }
        out
    }

    /// Computes a minimum-weight partial solution for `(u, v, tau)`,
    /// storing and returning it. Every `(u', v', tau')` with `u'` in an
    /// earlier subtree must already be in the table.
    pub fn part_sol(
        &mut self,
        u: Vertex,
        v: Vertex,
        tau: TreeMask,
    ) -> Result<Option<Entry>, PartsolError> {
        let i0 = self
            .spine
            .anchor(u)
            .ok_or(TreekitError::VertexNotInTree(u))?;
        let j0 = self
            .spine
            .anchor(v)
            .ok_or(TreekitError::VertexNotInTree(v))?;
        debug_assert!(i0 <= j0, "keys require the subtree order");

        let mut best: Option<Entry> = None;
        let mut consider = |cand: Entry| {
            if best.as_ref().map(|b| cand.weight < b.weight).unwrap_or(true) {
                best = Some(cand);
            }
        };

        // Case A: the first path is A_h plus T[x_1, u]; the second is a
        // shortest path to v in the auxiliary graph around it.
        for h in 0..2 {
            let a_other = self.spine.a[1 - h];
            let spine_part = self
                .tree
                .tree_path(self.spine.x(0), u)
                .expect("u in tree");
            let Ok(p) = self.spine.a_path(h).join(&spine_part) else {
                continue;
            };
            let aux = auxiliary_graph(self.inst, self.forest, &self.spine, &p, (a_other, v), tau);
            for r in self.r_candidates(&aux, a_other, v, &[], &[&p]) {
                if check_partial_solution(&p, &r, u, v, tau, &self.spine, self.forest).is_ok() {
                    let weight = p.weight(self.inst) + r.weight(self.inst);
                    consider(Entry { q1: p.clone(), q2: r, weight });
                }
            }
        }

        // Case B: extend a stored partial solution for (u', v', tau') by the
        // tree path T[v', u] and a shortest (u', v)-path.
        let ending = self.tree.tree_path(self.spine.x(i0), u).unwrap();
        for iprime in 0..i0 {
            for uprime_ix in 0..self.spine.subtree(iprime).len() {
                let uprime = self.spine.subtree(iprime)[uprime_ix];
                for jprime in (iprime + 1)..=i0 {
                    for vprime_ix in 0..self.spine.subtree(jprime).len() {
                        let vprime = self.spine.subtree(jprime)[vprime_ix];
                        // T[x_{j'}, v'] may not share an edge with T[x_i, u].
                        let vp_path = self.tree.tree_path(self.spine.x(jprime), vprime).unwrap();
                        if vp_path
                            .edge_seq()
                            .any(|(a, b)| ending.has_edge(a, b))
                        {
                            continue;
                        }
                        let Ok(conn) = self.tree.tree_path(vprime, u) else {
                            continue;
                        };
                        for tprime in submasks_ascending(tau) {
                            match self.entries.get(&(uprime, vprime, tprime)) {
                                None => {
                                    return Err(PartsolError::TableOrderViolation(
                                        uprime, vprime, tprime,
                                    ))
                                }
                                Some(None) => {}
                                Some(Some(prev)) => {
                                    let prev = prev.clone();
                                    let aux = auxiliary_graph(
                                        self.inst,
                                        self.forest,
                                        &self.spine,
                                        &conn,
                                        (uprime, v),
                                        tau & !tprime,
                                    );
                                    let rs = self.r_candidates(
                                        &aux,
                                        uprime,
                                        v,
                                        &[&prev.q1, &prev.q2],
                                        &[&prev.q1, &prev.q2],
                                    );
                                    for r in rs {
                                        let (Ok(p1), Ok(p2)) =
                                            (prev.q2.join(&conn), prev.q1.join(&r))
                                        else {
                                            continue;
                                        };
                                        if check_partial_solution(
                                            &p1,
                                            &p2,
                                            u,
                                            v,
                                            tau,
                                            &self.spine,
                                            self.forest,
                                        )
                                        .is_ok()
                                        {
                                            let weight =
                                                p1.weight(self.inst) + p2.weight(self.inst);
                                            consider(Entry { q1: p1, q2: p2, weight });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        self.entries.insert((u, v, tau), best.clone());
        Ok(best)
    }

    /// Fills the whole table in the table order: subtree index of `u`
    /// ascending, then `u` by id, then `(j, v)`, then `tau` ascending.
    pub fn fill(&mut self) -> Result<(), PartsolError> {
        let r = self.spine.r();
        let taus: Vec<TreeMask> = submasks_ascending(self.tau_full);
        for i in 0..r {
            for u_ix in 0..self.spine.subtree(i).len() {
                let u = self.spine.subtree(i)[u_ix];
                for j in i..r {
                    for v_ix in 0..self.spine.subtree(j).len() {
                        let v = self.spine.subtree(j)[v_ix];
                        for &tau in &taus {
                            self.part_sol(u, v, tau)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn finish(self) -> PartialSolutionTable {
        PartialSolutionTable {
            spine: self.spine,
            tau_full: self.tau_full,
            entries: self.entries,
        }
    }
}

fn submasks_ascending(full: TreeMask) -> Vec<TreeMask> {
    let mut out: Vec<TreeMask> = (0..=full).filter(|m| m & !full == 0).collect();
    out.sort_unstable();
    out
}

/// Builds and fills the table for one (normalized) guess.
pub fn build_table(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    tree_idx: usize,
    a1: Vertex,
    a2: Vertex,
    b1: Vertex,
    b2: Vertex,
) -> Result<PartialSolutionTable, PartsolError> {
    let mut builder = TableBuilder::new(inst, forest, tree_idx, a1, a2, b1, b2)?;
    builder.fill()?;
    Ok(builder.finish())
}

/// Two permissively disjoint `({a1,a2},{b1,b2})`-paths of minimum total
/// weight, or `None` if no such pair exists. The guess must satisfy the
/// edge-sharing requirement of the spine.
pub fn perm_disjoint(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    tree_idx: usize,
    a1: Vertex,
    a2: Vertex,
    b1: Vertex,
    b2: Vertex,
) -> Result<Option<crate::graph::PathPair>, PartsolError> {
    let table = build_table(inst, forest, tree_idx, a1, a2, b1, b2)?;
    Ok(table.best_pair().map(|(first, second, weight)| crate::graph::PathPair {
        first,
        second,
        mode: crate::graph::DisjointnessMode::Permissively,
        weight,
    }))
}
