//! Brute-force reference implementations and the conservative instance
//! generator behind the acceptance suite.

use crate::graph::{
    is_conservative, GraphView, Path, Vertex, Weight, WeightedInstance,
};
use crate::treekit::{is_partial_solution, NegativeForest, Spine, TreeMask};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for enumeration (n={0})")]
    TooLarge(usize),
    #[error("generator parameters infeasible: {0}")]
    ParamsInfeasible(String),
}

/// All simple paths from `from`, optionally pinned to endpoint `to`.
pub fn all_simple_paths(view: &GraphView, from: Vertex, to: Option<Vertex>) -> Vec<Path> {
    let mut out = Vec::new();
    if !view.contains(from) {
        return out;
    }
    let mut cur = vec![from];
    fn rec(view: &GraphView, cur: &mut Vec<Vertex>, to: Option<Vertex>, out: &mut Vec<Path>) {
        let last = *cur.last().unwrap();
        match to {
            Some(t) if last == t => {
                out.push(Path::from_vertices(cur.clone()));
                return;
            }
            None => out.push(Path::from_vertices(cur.clone())),
            _ => {}
        }
        let nexts: Vec<Vertex> = view.neighbors(last).map(|(v, _)| v).collect();
        for nxt in nexts {
            if !cur.contains(&nxt) {
                cur.push(nxt);
                rec(view, cur, to, out);
                cur.pop();
            }
        }
    }
    rec(view, &mut cur, to, &mut out);
    out
}

const ENUMERATION_LIMIT: usize = 12;

/// Exhaustive optimum over all openly disjoint `s`-`t` path pairs.
pub fn brute_force_stdp(
    inst: &WeightedInstance,
) -> Result<Option<(Weight, (Path, Path))>, OracleError> {
    if inst.num_alive() > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge(inst.num_alive()));
    }
    let view = GraphView::whole(inst);
    let (s, t) = (inst.s(), inst.t());
    let mut paths: Vec<(Weight, Path, crate::graph::VertexSet)> =
        all_simple_paths(&view, s, Some(t))
            .into_iter()
            .map(|p| {
                let mut inner = p.vertex_set(inst.num_ids());
                inner.remove(s);
                inner.remove(t);
                (p.weight(inst), p, inner)
            })
            .collect();
    paths.sort_by(|a, b| a.0.cmp(&b.0));
    let mut best: Option<(Weight, (Path, Path))> = None;
    for i in 0..paths.len() {
        if let Some((bw, _)) = &best {
            if 2 * paths[i].0 >= *bw {
                break;
            }
        }
        for j in i + 1..paths.len() {
            let w = paths[i].0 + paths[j].0;
            if let Some((bw, _)) = &best {
                if w >= *bw {
                    break;
                }
            }
            if !paths[i].2.intersects(&paths[j].2) {
                best = Some((w, (paths[i].1.clone(), paths[j].1.clone())));
                break;
            }
        }
    }
    Ok(best)
}

/// Exhaustive optimum over permissively disjoint `({a1,a2},{b1,b2})`-pairs.
pub fn brute_force_perm_disjoint(
    inst: &WeightedInstance,
    a1: Vertex,
    a2: Vertex,
    b1: Vertex,
    b2: Vertex,
) -> Result<Option<(Weight, (Path, Path))>, OracleError> {
    if inst.num_alive() > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge(inst.num_alive()));
    }
    let view = GraphView::whole(inst);
    let from_a1 = all_simple_paths(&view, a1, None);
    let from_a2 = all_simple_paths(&view, a2, None);
    let ends_ok = |p: &Path, q: &Path| {
        (p.last() == b1 && q.last() == b2) || (p.last() == b2 && q.last() == b1)
    };
    let mut best: Option<(Weight, (Path, Path))> = None;
    for p in &from_a1 {
        if p.last() != b1 && p.last() != b2 {
            continue;
        }
        for q in &from_a2 {
            if !ends_ok(p, q) {
                continue;
            }
            if !crate::treekit::permissively_disjoint(p, q, (a1, a2), (p.last(), q.last())) {
                continue;
            }
            let w = p.weight(inst) + q.weight(inst);
            if best.as_ref().map(|(bw, _)| w < *bw).unwrap_or(true) {
                best = Some((w, (p.clone(), q.clone())));
            }
        }
    }
    Ok(best)
}

/// Exhaustive minimum over all pairs satisfying the partial-solution
/// conditions for `(u, v, tau)`.
pub fn brute_force_partial_solutions(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    spine: &Spine,
    u: Vertex,
    v: Vertex,
    tau: TreeMask,
) -> Result<Option<Weight>, OracleError> {
    if inst.num_alive() > 10 {
        return Err(OracleError::TooLarge(inst.num_alive()));
    }
    let view = GraphView::whole(inst);
    let (a1, a2) = (spine.a[0], spine.a[1]);
    let mut starts = vec![a1];
    if a2 != a1 {
        starts.push(a2);
    }
    let mut q1s: Vec<Path> = Vec::new();
    let mut q2s: Vec<Path> = Vec::new();
    for &a in &starts {
        for p in all_simple_paths(&view, a, None) {
            if p.last() == u || (p.len_edges() == 0 && u == a) {
                q1s.push(p.clone());
            }
            if p.last() == v || (p.len_edges() == 0 && v == a) {
                q2s.push(p);
            }
        }
    }
    let mut best: Option<Weight> = None;
    for q1 in &q1s {
        for q2 in &q2s {
            if is_partial_solution(q1, q2, u, v, tau, spine, forest) {
                let w = q1.weight(inst) + q2.weight(inst);
                best = Some(best.map_or(w, |b: Weight| b.min(w)));
            }
        }
    }
    Ok(best)
}

/// Parameters for the seeded conservative generator.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub n: usize,
    pub c: usize,
    /// Probability of each candidate positive edge.
    pub density: f64,
    /// Maximum magnitude of the (unscaled) negative tree weights.
    pub max_weight: i64,
    /// Cap on the number of vertices per negative tree.
    pub tree_size_max: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn new(n: usize, c: usize, density: f64, seed: u64) -> Self {
        GenParams {
            n,
            c,
            density,
            max_weight: 10,
            tree_size_max: 8.min(if c > 0 { (n / c).max(2) } else { 2 }),
            seed,
        }
    }
}

/// Builds `c` vertex-disjoint random negative trees, then sprinkles positive
/// edges with weights in `[M, 2M]` where `M` dominates every tree's total
/// weight; every cycle then alternates negative tree paths (each at least
/// `-M`) with positive edges (each at least `M`), so the weights are
/// conservative by construction. The result is verified, not assumed.
pub fn generate_instance(params: &GenParams) -> Result<WeightedInstance, OracleError> {
    if params.n < 4 {
        return Err(OracleError::ParamsInfeasible("need at least 4 vertices".into()));
    }
    if params.c * 2 > params.n {
        return Err(OracleError::ParamsInfeasible(format!(
            "{} disjoint trees with at least one edge each need {} vertices",
            params.c,
            2 * params.c
        )));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(OracleError::ParamsInfeasible("density out of range".into()));
    }
    if params.max_weight < 1 {
        return Err(OracleError::ParamsInfeasible("max_weight must be positive".into()));
    }
    for attempt in 0..16u64 {
        let inst = generate_once(params, params.seed.wrapping_add(attempt * 0x9e3779b9))?;
        if is_conservative(&inst).is_ok() {
            return Ok(inst);
        }
        // The margin construction makes this unreachable, but regenerate
        // with a derived seed rather than trust it.
    }
    Err(OracleError::ParamsInfeasible("generator kept producing negative cycles".into()))
}

fn generate_once(params: &GenParams, seed: u64) -> Result<WeightedInstance, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    let mut pool: Vec<Vertex> = (0..n as Vertex).collect();
    // Fisher-Yates shuffle.
    for i in (1..pool.len()).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    let mut edges: Vec<(Vertex, Vertex, i64)> = Vec::new();
    let mut used = 0usize;
    let mut tree_totals: Vec<i64> = Vec::new();
    for k in 0..params.c {
        let reserve = 2 * (params.c - k - 1);
        let cap = params
            .tree_size_max
            .min(n - used - reserve)
            .max(2);
        let size = rng.gen_range(2..=cap);
        let verts = &pool[used..used + size];
        let mut total = 0;
        for i in 1..size {
            let p = rng.gen_range(0..i);
            let w = rng.gen_range(1..=params.max_weight);
            total += w;
            edges.push((verts[p], verts[i], -w));
        }
        tree_totals.push(total);
        used += size;
    }
    let m = tree_totals.iter().copied().max().unwrap_or(params.max_weight);
    let tree_edge: std::collections::HashSet<(Vertex, Vertex)> = edges
        .iter()
        .map(|&(u, v, _)| (u.min(v), u.max(v)))
        .collect();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if tree_edge.contains(&(u, v)) {
                continue;
            }
            if rng.gen_bool(params.density) {
                edges.push((u, v, m + rng.gen_range(0..=m)));
            }
        }
    }
    let s = 0;
    let t = (n - 1) as Vertex;
    crate::graph::build_instance(n, &edges, s, t)
        .map_err(|e| OracleError::ParamsInfeasible(e.to_string()))
}
