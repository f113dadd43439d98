//! Flow networks for the separable and non-separable branches of the
//! solver, and minimum-cost flow with unit vertex capacities.
//!
//! Vertex capacities are realized by node splitting: every graph vertex
//! becomes an in-half and an out-half joined by an internal arc. The
//! terminals `s` and `t` carry capacity 2 (two path endpoints), every other
//! vertex capacity 1, so a decomposition of any feasible flow is
//! automatically openly disjoint.

use crate::graph::{Path, Vertex, VertexSet, Weight, WeightedInstance};
use crate::treekit::NegativeForest;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("bad tree-vertex selection: {0}")]
    BadSelection(String),
    #[error("negative-cost directed cycle in network")]
    NegativeCycleDetected,
    #[error("non-integral flow")]
    NonIntegralFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLabel {
    /// Entry half of an original vertex.
    In(Vertex),
    /// Exit half of an original vertex.
    Out(Vertex),
    SourceStar,
    SinkStar,
}

#[derive(Debug, Clone)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub cap: i64,
    pub cost: Weight,
    /// Original directed edge this arc realizes, if any.
    pub orig: Option<(Vertex, Vertex)>,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub nodes: Vec<NodeLabel>,
    pub arcs: Vec<Arc>,
    pub source: NodeId,
    pub sink: NodeId,
    node_in: HashMap<Vertex, NodeId>,
    node_out: HashMap<Vertex, NodeId>,
}

#[derive(Debug, Clone)]
pub struct Flow {
    /// Flow value per arc, aligned with `FlowNetwork::arcs`.
    pub arc_flow: Vec<i64>,
    pub value: i64,
    pub cost: Weight,
}

impl FlowNetwork {
    fn new() -> Self {
        FlowNetwork {
            nodes: Vec::new(),
            arcs: Vec::new(),
            source: 0,
            sink: 0,
            node_in: HashMap::new(),
            node_out: HashMap::new(),
        }
    }

    fn add_node(&mut self, label: NodeLabel) -> NodeId {
        self.nodes.push(label);
        self.nodes.len() - 1
    }

    /// Splits `v` into an in/out pair with the given internal capacity.
    fn add_vertex(&mut self, v: Vertex, cap: i64) {
        let i = self.add_node(NodeLabel::In(v));
        let o = self.add_node(NodeLabel::Out(v));
        self.node_in.insert(v, i);
        self.node_out.insert(v, o);
        self.arcs.push(Arc {
            tail: i,
            head: o,
            cap,
            cost: 0,
            orig: None,
        });
    }

    fn add_edge_arc(&mut self, u: Vertex, v: Vertex, cost: Weight) {
        self.arcs.push(Arc {
            tail: self.node_out[&u],
            head: self.node_in[&v],
            cap: 1,
            cost,
            orig: Some((u, v)),
        });
    }

    pub fn node_in(&self, v: Vertex) -> Option<NodeId> {
        self.node_in.get(&v).copied()
    }

    pub fn node_out(&self, v: Vertex) -> Option<NodeId> {
        self.node_out.get(&v).copied()
    }

    /// True if the network contains the directed arc `u -> v` for an
    /// original edge.
    pub fn has_directed_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.arcs.iter().any(|a| a.orig == Some((u, v)))
    }
}

/// Builds the network for strongly separable solutions: non-negative edges
/// are directed both ways, each negative tree one-way (away from its
/// selected vertex `z_T`, away from `s`, or towards `t`). `z` maps tree
/// index to the selected vertex for every tree avoiding both terminals.
pub fn build_nz(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    z: &HashMap<usize, Vertex>,
) -> Result<FlowNetwork, FlowError> {
    let s = inst.s();
    let t = inst.t();
    // Validate the selection.
    for (idx, tree) in forest.trees.iter().enumerate() {
        let needs_z = !tree.contains(s) && !tree.contains(t);
        match (needs_z, z.get(&idx)) {
            (true, Some(&zv)) if tree.contains(zv) => {}
            (true, Some(&zv)) => {
                return Err(FlowError::BadSelection(format!(
                    "vertex {zv} not in tree {idx}"
                )))
            }
            (true, None) => {
                return Err(FlowError::BadSelection(format!("tree {idx} unselected")))
            }
            (false, Some(_)) => {
                return Err(FlowError::BadSelection(format!(
                    "tree {idx} contains a terminal"
                )))
            }
            (false, None) => {}
        }
    }
    if z.len() != forest.trees.iter().filter(|t0| !t0.contains(s) && !t0.contains(t)).count() {
        return Err(FlowError::BadSelection("extra selections".into()));
    }

    let mut net = FlowNetwork::new();
    let mut order: Vec<Vertex> = inst.alive().iter().collect();
    order.sort_unstable();
    for v in order {
        let cap = if v == s || v == t { 2 } else { 1 };
        net.add_vertex(v, cap);
    }
    net.source = net.node_in[&s];
    net.sink = net.node_out[&t];

    // Per-tree depths from the orientation root.
    let mut depth: Vec<HashMap<Vertex, usize>> = Vec::new();
    let mut towards: Vec<bool> = Vec::new();
    for (idx, tree) in forest.trees.iter().enumerate() {
        let (root, tw) = if tree.contains(s) {
            (s, false)
        } else if tree.contains(t) {
            (t, true)
        } else {
            (z[&idx], false)
        };
        let mut d: HashMap<Vertex, usize> = HashMap::new();
        d.insert(root, 0);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let dx = d[&x];
            for &(to, _) in tree.neighbors(x) {
                if !d.contains_key(&to) {
                    d.insert(to, dx + 1);
                    queue.push_back(to);
                }
            }
        }
        depth.push(d);
        towards.push(tw);
    }

    for e in inst.edges() {
        if !inst.is_alive(e.u) || !inst.is_alive(e.v) {
            continue;
        }
        if e.w >= 0 {
            net.add_edge_arc(e.u, e.v, e.w);
            net.add_edge_arc(e.v, e.u, e.w);
        } else {
            let idx = forest.tree_of(e.u).expect("negative edge in forest");
            let (du, dv) = (depth[idx][&e.u], depth[idx][&e.v]);
            // Away from the root: parent -> child; towards it: child -> parent.
            let (a, b) = if (du < dv) != towards[idx] {
                (e.u, e.v)
            } else {
                (e.v, e.u)
            };
            net.add_edge_arc(a, b, e.w);
        }
    }
    Ok(net)
}

/// Builds the four-terminal network for non-separable solutions: negative
/// edges and all tree vertices other than the four terminals are deleted,
/// the rest is directed both ways, and the super-terminals are wired with
/// capacity-2 arcs from the source side and capacity-1 arcs into the sink.
pub fn build_naabb(
    inst: &WeightedInstance,
    forest: &NegativeForest,
    a1: Vertex,
    b1: Vertex,
    a2: Vertex,
    b2: Vertex,
) -> FlowNetwork {
    let s = inst.s();
    let t = inst.t();
    let mut dead = VertexSet::new(inst.num_ids());
    for tree in &forest.trees {
        for &v in tree.vertices() {
            dead.insert(v);
        }
    }
    // The terminals stay; so do s and t, which must carry the source arcs
    // (a guess is only useful when they are not internal tree vertices).
    for keep in [a1, a2, b1, b2, s, t] {
        dead.remove(keep);
    }
    let mut net = FlowNetwork::new();
    let mut order: Vec<Vertex> = inst.alive().iter().filter(|&v| !dead.contains(v)).collect();
    order.sort_unstable();
    for v in order {
        let cap = if v == s || v == t { 2 } else { 1 };
        net.add_vertex(v, cap);
    }
    let source = net.add_node(NodeLabel::SourceStar);
    let sink = net.add_node(NodeLabel::SinkStar);
    net.source = source;
    net.sink = sink;
    for e in inst.edges() {
        if e.w < 0 {
            continue;
        }
        if !inst.is_alive(e.u) || !inst.is_alive(e.v) || dead.contains(e.u) || dead.contains(e.v) {
            continue;
        }
        net.add_edge_arc(e.u, e.v, e.w);
        net.add_edge_arc(e.v, e.u, e.w);
    }
    for x in [s, t] {
        net.arcs.push(Arc {
            tail: source,
            head: net.node_in[&x],
            cap: 2,
            cost: 0,
            orig: None,
        });
    }
    // Parallel arcs arise naturally in the degenerate s=a1=a2 / t=b1=b2 cases.
    for x in [a1, b1, a2, b2] {
        net.arcs.push(Arc {
            tail: net.node_out[&x],
            head: sink,
            cap: 1,
            cost: 0,
            orig: None,
        });
    }
    net
}

/// Minimum-cost flow of exactly `target` units by successive shortest
/// paths: one Bellman-Ford pass for initial potentials (negative tree arcs),
/// then Dijkstra on reduced costs per augmentation.
pub fn min_cost_flow(net: &FlowNetwork, target: i64) -> Result<Option<Flow>, FlowError> {
    let n = net.nodes.len();
    let m = net.arcs.len();
    // Residual representation: arc 2i forward, 2i+1 backward.
    let mut residual: Vec<i64> = Vec::with_capacity(2 * m);
    let mut head: Vec<NodeId> = Vec::with_capacity(2 * m);
    let mut cost: Vec<Weight> = Vec::with_capacity(2 * m);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        residual.push(a.cap);
        head.push(a.head);
        cost.push(a.cost);
        residual.push(0);
        head.push(a.tail);
        cost.push(-a.cost);
        out[a.tail].push(2 * i);
        out[a.head].push(2 * i + 1);
    }

    const INF: Weight = Weight::MAX / 4;
    // Bellman-Ford from the source for initial potentials.
    let mut pot: Vec<Weight> = vec![INF; n];
    pot[net.source] = 0;
    for round in 0..n {
        let mut changed = false;
        for i in 0..2 * m {
            if residual[i] == 0 {
                continue;
            }
            let tail = head[i ^ 1];
            if pot[tail] == INF {
                continue;
            }
            let cand = pot[tail] + cost[i];
            if cand < pot[head[i]] {
                pot[head[i]] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == n - 1 {
            return Err(FlowError::NegativeCycleDetected);
        }
    }
    for p in pot.iter_mut() {
        if *p == INF {
            *p = 0;
        }
    }

    let mut flow_val = 0i64;
    let mut total_cost: Weight = 0;
    while flow_val < target {
        // Dijkstra on reduced costs.
        let mut dist: Vec<Weight> = vec![INF; n];
        let mut prev_arc: Vec<usize> = vec![usize::MAX; n];
        dist[net.source] = 0;
        let mut heap: BinaryHeap<(Reverse<Weight>, NodeId)> = BinaryHeap::new();
        heap.push((Reverse(0), net.source));
        while let Some((Reverse(d), x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &i in &out[x] {
                if residual[i] == 0 {
                    continue;
                }
                let rc = cost[i] + pot[x] - pot[head[i]];
                debug_assert!(rc >= 0, "reduced cost must be non-negative");
                let nd = d + rc;
                if nd < dist[head[i]] {
                    dist[head[i]] = nd;
                    prev_arc[head[i]] = i;
                    heap.push((Reverse(nd), head[i]));
                }
            }
        }
        if dist[net.sink] == INF {
            return Ok(None);
        }
        let dsink = dist[net.sink];
        for v in 0..n {
            pot[v] += dist[v].min(dsink);
        }
        // Augment one unit along the path.
        let mut x = net.sink;
        while x != net.source {
            let i = prev_arc[x];
            residual[i] -= 1;
            residual[i ^ 1] += 1;
            total_cost += cost[i];
            x = head[i ^ 1];
        }
        flow_val += 1;
    }

    let arc_flow: Vec<i64> = (0..m).map(|i| net.arcs[i].cap - residual[2 * i]).collect();
    Ok(Some(Flow {
        arc_flow,
        value: flow_val,
        cost: total_cost,
    }))
}

/// Feasibility probe: the maximum flow value, capped at `cap_at`.
pub fn max_flow_value(net: &FlowNetwork, cap_at: i64) -> i64 {
    // Unit augmentations via BFS on the residual graph.
    let n = net.nodes.len();
    let m = net.arcs.len();
    let mut residual: Vec<i64> = Vec::with_capacity(2 * m);
    let mut head: Vec<NodeId> = Vec::with_capacity(2 * m);
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        residual.push(a.cap);
        head.push(a.head);
        residual.push(0);
        head.push(a.tail);
        out[a.tail].push(2 * i);
        out[a.head].push(2 * i + 1);
    }
    let mut value = 0;
    while value < cap_at {
        let mut prev: Vec<usize> = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[net.source] = true;
        let mut queue = std::collections::VecDeque::from([net.source]);
        while let Some(x) = queue.pop_front() {
            for &i in &out[x] {
                if residual[i] > 0 && !seen[head[i]] {
                    seen[head[i]] = true;
                    prev[head[i]] = i;
                    queue.push_back(head[i]);
                }
            }
        }
        if !seen[net.sink] {
            break;
        }
        let mut x = net.sink;
        while x != net.source {
            let i = prev[x];
            residual[i] -= 1;
            residual[i ^ 1] += 1;
            x = head[i ^ 1];
        }
        value += 1;
    }
    value
}

/// Decomposes an integral flow into source-to-sink paths in the original
/// graph: split halves are merged back, super-terminals stripped, and
/// circulations (necessarily of non-negative cost) dropped. Unit vertex
/// capacities make the returned paths openly disjoint.
pub fn decompose_flow(net: &FlowNetwork, flow: &Flow) -> Result<Vec<Path>, FlowError> {
    let n = net.nodes.len();
    if flow.arc_flow.iter().any(|&f| f < 0) {
        return Err(FlowError::NonIntegralFlow);
    }
    let mut remaining = flow.arc_flow.clone();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in net.arcs.iter().enumerate() {
        out[a.tail].push(i);
    }
    let mut paths = Vec::new();
    for _ in 0..flow.value {
        // Walk from source following positive-flow arcs; smallest arc first.
        let mut node_walk = vec![net.source];
        let mut cur = net.source;
        while cur != net.sink {
            let arc = out[cur]
                .iter()
                .copied()
                .find(|&i| remaining[i] > 0)
                .expect("flow conservation");
            remaining[arc] -= 1;
            cur = net.arcs[arc].head;
            // Cut any cycle: dropped arcs stay consumed.
            if let Some(pos) = node_walk.iter().position(|&x| x == cur) {
                node_walk.truncate(pos);
            }
            node_walk.push(cur);
        }
        // Map split nodes back to original vertices.
        let mut verts: Vec<Vertex> = Vec::new();
        for &node in &node_walk {
            let v = match net.nodes[node] {
                NodeLabel::In(v) | NodeLabel::Out(v) => v,
                NodeLabel::SourceStar | NodeLabel::SinkStar => continue,
            };
            if verts.last() != Some(&v) {
                verts.push(v);
            }
        }
        paths.push(Path::from_vertices(verts));
    }
    Ok(paths)
}
