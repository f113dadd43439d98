//! The top-level recursive solver for shortest two disjoint paths under
//! conservative weights.
//!
//! Separable optima are found by minimum-cost flows over the one-way tree
//! orientations (trying also every single negative-edge deletion). For
//! non-separable optima the solver guesses the contact tree and how the
//! remaining trees split around it: a nonempty near-side or far-side class
//! leads to a recursion on two smaller sub-instances glued together through
//! a gadget vertex; the all-middle split runs the four-terminal flow plus
//! the partial-solution dynamic program, and stitches the pieces with the
//! uncrossing combiner.

use crate::flows::{build_naabb, build_nz, decompose_flow, max_flow_value, min_cost_flow};
use crate::graph::{
    is_conservative, ConservativenessCertificate, Path, Vertex, VertexSet, Weight,
    WeightedInstance,
};
use crate::partsol::TableBuilder;
use crate::treekit::{
    amend, build_spine, negative_forest, NegTree, NegativeForest, TreeMask,
};
use crate::uncross::combine;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// Two openly disjoint `s`-`t` paths and their exact scaled weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub p1: Path,
    pub p2: Path,
    pub weight: Weight,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("weights are not conservative: cycle {cycle:?} has scaled weight {weight}")]
    NonConservativeInput { cycle: Vec<Vertex>, weight: Weight },
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Run the expensive structural assertions on every stitch.
    pub assert_invariants: bool,
    /// Parallelize the four-terminal guess loop.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            assert_invariants: false,
            parallel: true,
        }
    }
}

/// Solves the instance, certifying conservativeness first.
pub fn solve(inst: &WeightedInstance) -> Result<Option<Solution>, SolveError> {
    solve_with(inst, &SolveOptions::default())
}

pub fn solve_with(
    inst: &WeightedInstance,
    opts: &SolveOptions,
) -> Result<Option<Solution>, SolveError> {
    match is_conservative(inst) {
        ConservativenessCertificate::Conservative => {}
        ConservativenessCertificate::NegativeCycle { cycle, weight } => {
            return Err(SolveError::NonConservativeInput { cycle, weight })
        }
    }
    Ok(solve_inner(inst, opts))
}

/// A candidate that survived validation: openly disjoint `s`-`t` paths.
fn validate_solution(inst: &WeightedInstance, p1: Path, p2: Path) -> Option<Solution> {
    let s = inst.s();
    let t = inst.t();
    let p1 = p1.oriented_from(s)?;
    let p2 = p2.oriented_from(s)?;
    if p1.last() != t || p2.last() != t {
        return None;
    }
    for &v in p1.vertices() {
        if v != s && v != t && p2.contains(v) {
            return None;
        }
    }
    for (a, b) in p1.edge_seq() {
        if p2.has_edge(a, b) {
            return None;
        }
    }
    let weight = p1.weight(inst) + p2.weight(inst);
    Some(Solution { p1, p2, weight })
}

struct Best(Option<Solution>);

impl Best {
    fn consider(&mut self, cand: Solution) {
        if self.0.as_ref().map(|b| cand.weight < b.weight).unwrap_or(true) {
            self.0 = Some(cand);
        }
    }
}

fn solve_inner(inst: &WeightedInstance, opts: &SolveOptions) -> Option<Solution> {
    let forest = match negative_forest(inst) {
        Ok(f) => f,
        // A cycle of negative edges: not conservative. Top-level input was
        // certified, so this can only happen on malformed internal calls.
        Err(_) => return None,
    };
    let mut best = Best(None);

    if let Some(sol) = solve_separable_impl(inst, &forest, opts) {
        best.consider(sol);
    }

    for t_idx in 0..forest.c() {
        let others: Vec<usize> = (0..forest.c()).filter(|&i| i != t_idx).collect();
        // Nonempty near-side classes; one recursion per subset.
        for bits in 1u32..(1u32 << others.len()) {
            let ts_mask: TreeMask = others
                .iter()
                .enumerate()
                .filter(|&(pos, _)| bits & (1 << pos) != 0)
                .map(|(_, &idx)| 1 << idx)
                .sum();
            solve_near_side(inst, &forest, t_idx, ts_mask, true, opts, &mut best);
            solve_near_side(inst, &forest, t_idx, ts_mask, false, opts, &mut best);
        }
        // The all-middle split: flow plus dynamic program.
        solve_middle(inst, &forest, t_idx, opts, &mut best);
    }
    best.0
}

// ---------------------------------------------------------------------------
// Separable branch
// ---------------------------------------------------------------------------

/// Minimum-weight solution among the strongly separable ones of the
/// instance and of every single-negative-edge deletion.
pub fn solve_separable(inst: &WeightedInstance) -> Option<Solution> {
    let forest = negative_forest(inst).ok()?;
    solve_separable_impl(inst, &forest, &SolveOptions::default())
}

fn solve_separable_impl(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    _opts: &SolveOptions,
) -> Option<Solution> {
    let mut best = Best(None);
    let mut variants: Vec<WeightedInstance> = vec![inst.clone()];
    for (id, _) in inst.negative_edges() {
        let edges: Vec<(Vertex, Vertex, Weight)> = inst
            .edges()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id)
            .map(|(_, e)| (e.u, e.v, e.w))
            .collect();
        let empty = VertexSet::new(inst.num_ids());
        if let Ok(sub) = inst.derive(0, &edges, &empty, inst.s(), inst.t()) {
            variants.push(sub);
        }
    }
    let _ = forest;
    for sub in &variants {
        let Ok(f) = negative_forest(sub) else { continue };
        let choosable: Vec<usize> = (0..f.c())
            .filter(|&i| !f.trees[i].contains(sub.s()) && !f.trees[i].contains(sub.t()))
            .collect();
        // Odometer over one selected vertex per tree.
        let mut counters = vec![0usize; choosable.len()];
        loop {
            let z: HashMap<usize, Vertex> = choosable
                .iter()
                .zip(&counters)
                .map(|(&tidx, &k)| (tidx, f.trees[tidx].vertices()[k]))
                .collect();
            if let Ok(net) = build_nz(sub, &f, &z) {
                if let Ok(Some(flow)) = min_cost_flow(&net, 2) {
                    if let Ok(paths) = decompose_flow(&net, &flow) {
                        if paths.len() == 2 {
                            if let Some(sol) =
                                validate_solution(inst, paths[0].clone(), paths[1].clone())
                            {
                                debug_assert!(sol.weight <= flow.cost);
                                best.consider(sol);
                            }
                        }
                    }
                }
            }
            // Advance the odometer.
            let mut i = 0;
            loop {
                if i == counters.len() {
                    break;
                }
                counters[i] += 1;
                if counters[i] < f.trees[choosable[i]].vertices().len() {
                    break;
                }
                counters[i] = 0;
                i += 1;
            }
            if counters.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    best.0
}

// ---------------------------------------------------------------------------
// Recursion on sub-instances
// ---------------------------------------------------------------------------

/// A derived instance with its gadget vertex and gadget edge weight.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub inst: WeightedInstance,
    pub gadget_vertex: Vertex,
    pub gadget_weight: Weight,
}

/// Sub-instances for a nonempty near-side class: the gadget vertex is glued
/// to `a1` and `a2` with edges of weight `|w(T[a1,a2])| / 2` each; the first
/// instance keeps only the near-side trees, the second everything else.
pub fn build_sub_instances_s(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    t_idx: usize,
    ts_mask: TreeMask,
    a1: Vertex,
    a2: Vertex,
) -> Option<(SubInstance, SubInstance)> {
    debug_assert!(ts_mask != 0 && ts_mask & (1 << t_idx) == 0);
    if a1 == a2 {
        return None;
    }
    let tree = &forest.trees[t_idx];
    let gadget = inst.num_ids() as Vertex;
    let gadget_w = tree.dist(a1, a2).abs() / 2;
    debug_assert_eq!(tree.dist(a1, a2).abs() % 2, 0);
    let mut edges: Vec<(Vertex, Vertex, Weight)> = Vec::new();
    // Instance 1: drop the edges of every tree outside the class.
    for e in inst.edges() {
        if let Some(t) = forest.tree_of_edge(e.u, e.v) {
            if ts_mask & (1 << t) == 0 {
                continue;
            }
        }
        edges.push((e.u, e.v, e.w));
    }
    edges.push((gadget, a1, gadget_w));
    edges.push((gadget, a2, gadget_w));
    let mut dead1 = VertexSet::new(inst.num_ids() + 1);
    for (t, tv) in forest.trees.iter().enumerate() {
        if ts_mask & (1 << t) == 0 {
            for &v in tv.vertices() {
                dead1.insert(v);
            }
        }
    }
    dead1.remove(a1);
    dead1.remove(a2);
    if dead1.contains(inst.s()) {
        return None;
    }
    let sub1 = inst.derive(1, &edges, &dead1, inst.s(), gadget).ok()?;

    // Instance 2: all edges, near-side tree vertices removed.
    let mut edges2: Vec<(Vertex, Vertex, Weight)> =
        inst.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    edges2.push((gadget, a1, gadget_w));
    edges2.push((gadget, a2, gadget_w));
    let mut dead2 = VertexSet::new(inst.num_ids() + 1);
    for (t, tv) in forest.trees.iter().enumerate() {
        if ts_mask & (1 << t) != 0 {
            for &v in tv.vertices() {
                dead2.insert(v);
            }
        }
    }
    if dead2.contains(inst.t()) {
        return None;
    }
    let sub2 = inst.derive(1, &edges2, &dead2, gadget, inst.t()).ok()?;
    Some((
        SubInstance {
            inst: sub1,
            gadget_vertex: gadget,
            gadget_weight: gadget_w,
        },
        SubInstance {
            inst: sub2,
            gadget_vertex: gadget,
            gadget_weight: gadget_w,
        },
    ))
}

/// Mirror construction for a nonempty far-side class.
pub fn build_sub_instances_t(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    t_idx: usize,
    tt_mask: TreeMask,
    b1: Vertex,
    b2: Vertex,
) -> Option<(SubInstance, SubInstance)> {
    debug_assert!(tt_mask != 0 && tt_mask & (1 << t_idx) == 0);
    if b1 == b2 {
        return None;
    }
    let tree = &forest.trees[t_idx];
    let gadget = inst.num_ids() as Vertex;
    let gadget_w = tree.dist(b1, b2).abs() / 2;
    // Instance 1: everything except the far-side tree vertices.
    let mut edges1: Vec<(Vertex, Vertex, Weight)> =
        inst.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    edges1.push((gadget, b1, gadget_w));
    edges1.push((gadget, b2, gadget_w));
    let mut dead1 = VertexSet::new(inst.num_ids() + 1);
    for (t, tv) in forest.trees.iter().enumerate() {
        if tt_mask & (1 << t) != 0 {
            for &v in tv.vertices() {
                dead1.insert(v);
            }
        }
    }
    if dead1.contains(inst.s()) {
        return None;
    }
    let sub1 = inst.derive(1, &edges1, &dead1, inst.s(), gadget).ok()?;

    // Instance 2: only the far-side trees keep their edges.
    let mut edges2: Vec<(Vertex, Vertex, Weight)> = Vec::new();
    for e in inst.edges() {
        if let Some(t) = forest.tree_of_edge(e.u, e.v) {
            if tt_mask & (1 << t) == 0 {
                continue;
            }
        }
        edges2.push((e.u, e.v, e.w));
    }
    edges2.push((gadget, b1, gadget_w));
    edges2.push((gadget, b2, gadget_w));
    let mut dead2 = VertexSet::new(inst.num_ids() + 1);
    for (t, tv) in forest.trees.iter().enumerate() {
        if tt_mask & (1 << t) == 0 {
            for &v in tv.vertices() {
                dead2.insert(v);
            }
        }
    }
    dead2.remove(b1);
    dead2.remove(b2);
    if dead2.contains(inst.t()) {
        return None;
    }
    let sub2 = inst.derive(1, &edges2, &dead2, gadget, inst.t()).ok()?;
    Some((
        SubInstance {
            inst: sub1,
            gadget_vertex: gadget,
            gadget_weight: gadget_w,
        },
        SubInstance {
            inst: sub2,
            gadget_vertex: gadget,
            gadget_weight: gadget_w,
        },
    ))
}

/// Strips the gadget vertex off both paths of a sub-solution.
fn strip_gadget(sol: &Solution, gadget: Vertex) -> Option<(Path, Path)> {
    let cut = |p: &Path| -> Option<Path> {
        let p = p.oriented_from(gadget)?;
        let verts = p.vertices();
        if verts.len() < 2 {
            return None;
        }
        Some(Path::from_vertices(verts[1..].to_vec()))
    };
    Some((cut(&sol.p1)?, cut(&sol.p2)?))
}

/// True if `v` can appear on a solution path entering the tree: it has a
/// neighbor outside the tree, or it is a terminal.
fn has_outside_edge(
    inst: &WeightedInstance,
    tree: &NegTree,
    v: Vertex,
) -> bool {
    v == inst.s()
        || v == inst.t()
        || inst.neighbors(v).any(|(to, _)| !tree.contains(to))
}

fn solve_near_side(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    t_idx: usize,
    class_mask: TreeMask,
    near: bool,
    opts: &SolveOptions,
    best: &mut Best,
) {
    let tree = &forest.trees[t_idx];
    // The guessed vertices are first (or last) solution vertices on the
    // tree; when a terminal lies on the tree those coincide and the branch
    // is covered elsewhere.
    if near && tree.contains(inst.s()) {
        return;
    }
    if !near && tree.contains(inst.t()) {
        return;
    }
    let verts = tree.vertices();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let (g1, g2) = (verts[i], verts[j]);
            if !has_outside_edge(inst, tree, g1) || !has_outside_edge(inst, tree, g2) {
                continue;
            }
            let subs = if near {
                build_sub_instances_s(inst, forest, t_idx, class_mask, g1, g2)
            } else {
                build_sub_instances_t(inst, forest, t_idx, class_mask, g1, g2)
            };
            let Some((sub1, sub2)) = subs else { continue };
            if opts.assert_invariants {
                debug_assert!(is_conservative(&sub1.inst).is_ok());
                debug_assert!(is_conservative(&sub2.inst).is_ok());
            }
            let Some(sol1) = solve_inner(&sub1.inst, opts) else { continue };
            let Some(sol2) = solve_inner(&sub2.inst, opts) else { continue };
            let Some(pair1) = strip_gadget(&sol1, sub1.gadget_vertex) else { continue };
            let Some(pair2) = strip_gadget(&sol2, sub2.gadget_vertex) else { continue };
            // Stripping removes exactly the four gadget edges.
            debug_assert_eq!(
                pair1.0.weight(inst) + pair1.1.weight(inst) + pair2.0.weight(inst)
                    + pair2.1.weight(inst),
                sol1.weight + sol2.weight - 4 * sub1.gadget_weight
            );
            let (p_pair, q_pair) = if near {
                (pair1, pair2) // from s to {g1,g2}, then {g1,g2} to t
            } else {
                (pair2, pair1) // from t to {b1,b2}, then {b1,b2} to s
            };
            let (p1, p2) = amend(&p_pair.0, &p_pair.1, forest, inst);
            let (q1, q2) = amend(&q_pair.0, &q_pair.1, forest, inst);
            let upper = p1.weight(inst) + p2.weight(inst) + q1.weight(inst) + q2.weight(inst);
            match combine(
                inst,
                forest,
                (&p1, &p2),
                (g1, g2),
                (&q1, &q2),
                t_idx,
                class_mask,
            ) {
                Ok(out) => {
                    if let Some(sol) = validate_solution(inst, out.s1, out.s2) {
                        debug_assert!(sol.weight <= upper, "stitch must not gain weight");
                        best.consider(sol);
                    }
                }
                Err(_) => {
                    debug_assert!(false, "valid branch produced an uncrossing violation");
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The all-middle branch (flow + dynamic program)
// ---------------------------------------------------------------------------

/// A reasonable four-terminal guess: terminals coincide with `s`/`t` exactly
/// when those lie on the tree, and the two tree paths share an edge.
pub fn reasonable_guess(
    tree: &NegTree,
    a1: Vertex,
    a2: Vertex,
    b1: Vertex,
    b2: Vertex,
    s: Vertex,
    t: Vertex,
) -> bool {
    let a_ok = if tree.contains(s) {
        a1 == s && a2 == s
    } else {
        a1 != a2
    };
    let b_ok = if tree.contains(t) {
        b1 == t && b2 == t
    } else {
        b1 != b2
    };
    if !a_ok || !b_ok {
        return false;
    }
    let p1 = tree.tree_path(a1, b1);
    let p2 = tree.tree_path(a2, b2);
    match (p1, p2) {
        (Ok(p1), Ok(p2)) => {
            let e2 = p2.edge_set();
            p1.edge_set().iter().any(|e| e2.contains(e))
        }
        _ => false,
    }
}

fn solve_middle(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    t_idx: usize,
    opts: &SolveOptions,
    best: &mut Best,
) {
    let tree = &forest.trees[t_idx];
    let s = inst.s();
    let t = inst.t();
    let verts = tree.vertices();

    // A terminal inside a different negative tree would have to be covered
    // by the near- or far-side classes; the all-middle split cannot be
    // valid then.
    for other in 0..forest.c() {
        if other != t_idx
            && (forest.trees[other].contains(s) || forest.trees[other].contains(t))
        {
            return;
        }
    }

    // Collect sided guesses, grouped by (a-terminals, spine) so each
    // dynamic-programming table is built once.
    type GroupKey = (Vertex, Vertex, Vec<Vertex>);
    let mut groups: HashMap<GroupKey, Vec<(Vertex, Vertex)>> = HashMap::new();
    let a_candidates: Vec<Vertex> = if tree.contains(s) {
        vec![s]
    } else {
        verts.to_vec()
    };
    let b_candidates: Vec<Vertex> = if tree.contains(t) {
        vec![t]
    } else {
        verts.to_vec()
    };
    for &a1 in &a_candidates {
        for &a2 in &a_candidates {
            for &b1 in &b_candidates {
                for &b2 in &b_candidates {
                    if (a1, b1) > (a2, b2) {
                        continue; // path labels are interchangeable
                    }
                    if !reasonable_guess(tree, a1, a2, b1, b2, s, t) {
                        continue;
                    }
                    if !(has_outside_edge(inst, tree, a1) && has_outside_edge(inst, tree, a2)
                        && has_outside_edge(inst, tree, b1)
                        && has_outside_edge(inst, tree, b2))
                    {
                        continue;
                    }
                    let Ok(spine) = build_spine(tree, a1, a2, b1, b2) else {
                        continue;
                    };
                    if spine.swapped {
                        // Cross-sided labels; the sided twin of this guess is
                        // enumerated separately and covers the same optimum.
                        continue;
                    }
                    // The table and the network depend only on the terminal
                    // sets, so members are keyed by unordered pairs.
                    groups
                        .entry((
                            spine.a[0].min(spine.a[1]),
                            spine.a[0].max(spine.a[1]),
                            spine.xs().to_vec(),
                        ))
                        .or_default()
                        .push((b1.min(b2), b1.max(b2)));
                }
            }
        }
    }

    let mut group_list: Vec<(GroupKey, Vec<(Vertex, Vertex)>)> = groups.into_iter().collect();
    group_list.sort();

    let solve_group = |((a1, a2, _), bs): &(GroupKey, Vec<(Vertex, Vertex)>)| -> Vec<Solution> {
        let mut out = Vec::new();
        let rep = bs[0];
        let Ok(mut builder) = TableBuilder::new(inst, forest, t_idx, *a1, *a2, rep.0, rep.1)
        else {
            return out;
        };
        if builder.fill().is_err() {
            debug_assert!(false, "table fill order violated");
            return out;
        }
        let tau_full = builder.tau_full();
        let table = builder.finish();
        let mut bs = bs.clone();
        bs.sort_unstable();
        bs.dedup();
        for &(b1, b2) in &bs {
            let q = [table.get(b1, b2, tau_full), table.get(b2, b1, tau_full)]
                .into_iter()
                .flatten()
                .min_by_key(|e| e.weight);
            let Some(entry) = q else { continue };
            let net = build_naabb(inst, forest, *a1, b1, *a2, b2);
            if max_flow_value(&net, 4) < 4 {
                continue;
            }
            let Ok(Some(flow)) = min_cost_flow(&net, 4) else { continue };
            let Ok(flow_paths) = decompose_flow(&net, &flow) else { continue };
            if let Some(sol) = stitch_from_flow(
                inst,
                forest,
                t_idx,
                (*a1, *a2),
                (b1, b2),
                &flow_paths,
                (&entry.q1, &entry.q2),
            ) {
                debug_assert!(
                    sol.weight <= flow.cost + entry.weight,
                    "stitched weight must respect the flow + pair bound"
                );
                out.push(sol);
            }
        }
        out
    };

    let per_group: Vec<Vec<Solution>> = if opts.parallel {
        group_list.par_iter().map(solve_group).collect()
    } else {
        group_list.iter().map(solve_group).collect()
    };
    for sol in per_group.into_iter().flatten() {
        best.consider(sol);
    }
}

/// Builds a solution from a value-4 flow decomposition and a locally
/// cheapest permissively disjoint `({a1,a2},{b1,b2})`-pair, by direct tree
/// stitching (mixed endpoints) or a double application of the uncrossing
/// combiner. The result weighs at most the flow cost plus the pair weight.
#[allow(clippy::too_many_arguments)]
pub fn stitch_from_flow(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    t_idx: usize,
    a: (Vertex, Vertex),
    b: (Vertex, Vertex),
    flow_paths: &[Path],
    q: (&Path, &Path),
) -> Option<Solution> {
    let tree = &forest.trees[t_idx];
    let s = inst.s();
    let t = inst.t();
    let mut s_paths: Vec<Path> = Vec::new();
    let mut t_paths: Vec<Path> = Vec::new();
    for p in flow_paths {
        if p.first() == s {
            s_paths.push(p.clone());
        } else if p.first() == t {
            t_paths.push(p.clone());
        } else {
            return None;
        }
    }
    if s_paths.len() != 2 || t_paths.len() != 2 {
        return None;
    }
    let mut s_ends = [s_paths[0].last(), s_paths[1].last()];
    s_ends.sort_unstable();
    let mut a_sorted = [a.0, a.1];
    a_sorted.sort_unstable();
    let mut b_sorted = [b.0, b.1];
    b_sorted.sort_unstable();

    if s_ends == a_sorted {
        // Combine at the a-side, amend, then combine at the b-side.
        let stage1 = if a.0 == a.1 {
            (q.0.clone(), q.1.clone())
        } else {
            let out = combine(
                inst,
                forest,
                (&s_paths[0], &s_paths[1]),
                a,
                (q.0, q.1),
                t_idx,
                0,
            )
            .ok()?;
            (out.s1, out.s2)
        };
        let (q1, q2) = amend(&stage1.0, &stage1.1, forest, inst);
        let final_pair = if b.0 == b.1 {
            (q1, q2)
        } else {
            let out = combine(
                inst,
                forest,
                (&t_paths[0], &t_paths[1]),
                b,
                (&q1, &q2),
                t_idx,
                0,
            )
            .ok()?;
            (out.s1, out.s2)
        };
        validate_solution(inst, final_pair.0, final_pair.1)
    } else if s_ends == b_sorted {
        // Mirror: the flow reached the b-side from s.
        let stage1 = if b.0 == b.1 {
            (q.0.clone(), q.1.clone())
        } else {
            let out = combine(
                inst,
                forest,
                (&s_paths[0], &s_paths[1]),
                b,
                (q.0, q.1),
                t_idx,
                0,
            )
            .ok()?;
            (out.s1, out.s2)
        };
        let (q1, q2) = amend(&stage1.0, &stage1.1, forest, inst);
        let final_pair = if a.0 == a.1 {
            (q1, q2)
        } else {
            let out = combine(
                inst,
                forest,
                (&t_paths[0], &t_paths[1]),
                a,
                (&q1, &q2),
                t_idx,
                0,
            )
            .ok()?;
            (out.s1, out.s2)
        };
        validate_solution(inst, final_pair.0, final_pair.1)
    } else {
        // Mixed endpoints: stitch directly through the two tree paths.
        let (sa, sb) = if s_ends.contains(&a.0) || s_ends.contains(&a.1) {
            let sa = s_paths
                .iter()
                .find(|p| p.last() == a.0 || p.last() == a.1)?
                .clone();
            let sb = s_paths
                .iter()
                .find(|p| p.last() == b.0 || p.last() == b.1)?
                .clone();
            (sa, sb)
        } else {
            return None;
        };
        if sa.last() == sb.last() {
            return None;
        }
        let a_hit = sa.last();
        let a_other = if a_hit == a.0 { a.1 } else { a.0 };
        let b_hit = sb.last();
        let b_other = if b_hit == b.0 { b.1 } else { b.0 };
        let ta = t_paths.iter().find(|p| p.last() == a_other)?;
        let tb = t_paths
            .iter()
            .find(|p| p.last() == b_other && !std::ptr::eq(*p, ta))?;
        let s1 = sa
            .join(&tree.tree_path(a_hit, a_other).ok()?)
            .ok()?
            .join(&ta.reversed())
            .ok()?;
        let s2 = sb
            .join(&tree.tree_path(b_hit, b_other).ok()?)
            .ok()?
            .join(&tb.reversed())
            .ok()?;
        validate_solution(inst, s1, s2)
    }
}
