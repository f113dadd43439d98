//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! The solver has no experimental baseline to reproduce; acceptance is
//! oracle- and property-based. Every tolerance here is exact integer
//! equality except the scaling smoke check, which bounds a log-log slope.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stdp::conspath;
use stdp::flows;
use stdp::graph::{GraphView, Path, Vertex, VertexSet, Walk, Weight, WeightedInstance};
use stdp::oracle::{
    all_simple_paths, brute_force_partial_solutions, brute_force_perm_disjoint, brute_force_stdp,
    generate_instance, GenParams,
};
use stdp::partsol;
use stdp::solver;
use stdp::treekit::{
    self, amend, build_spine, find_shortcuts, is_partial_solution, negative_forest,
    shape_predicates, NegativeForest, TreeMask,
};
use stdp::uncross::{combine, CombineCase};

/// The desk-scale corpus behind criteria 1 and 4: at least 300 instances
/// with n in [5,10] and c in {0,1,2,3}.
fn corpus() -> Vec<WeightedInstance> {
    let mut out = Vec::new();
    for n in 5..=10usize {
        for c in 0..=3usize {
            if 2 * c > n {
                continue;
            }
            for (di, density) in [0.35, 0.55, 0.75].into_iter().enumerate() {
                for rep in 0..5u64 {
                    let seed = (n as u64) * 1000 + (c as u64) * 100 + (di as u64) * 10 + rep;
                    let params = GenParams::new(n, c, density, seed);
                    if let Ok(inst) = generate_instance(&params) {
                        out.push(inst);
                    }
                }
            }
        }
    }
    out
}

fn spined_guesses(
    inst: &WeightedInstance,
    forest: &NegativeForest,
) -> Vec<(usize, Vertex, Vertex, Vertex, Vertex)> {
    let mut out = Vec::new();
    for (t_idx, tree) in forest.trees.iter().enumerate() {
        let s = inst.s();
        let t = inst.t();
        let averts: Vec<Vertex> = if tree.contains(s) { vec![s] } else { tree.vertices().to_vec() };
        let bverts: Vec<Vertex> = if tree.contains(t) { vec![t] } else { tree.vertices().to_vec() };
        for &a1 in &averts {
            for &a2 in &averts {
                for &b1 in &bverts {
                    for &b2 in &bverts {
                        if (a1, b1) > (a2, b2) {
                            continue;
                        }
                        if !solver::reasonable_guess(tree, a1, a2, b1, b2, s, t) {
                            continue;
                        }
                        match build_spine(tree, a1, a2, b1, b2) {
                            Ok(spine) if !spine.swapped => {
                                out.push((t_idx, a1, a2, b1, b2));
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_oracle_equivalence() {
    let corpus = corpus();
    assert!(corpus.len() >= 300, "corpus too small: {}", corpus.len());
    let mismatches: Vec<String> = corpus
        .par_iter()
        .enumerate()
        .filter_map(|(i, inst)| {
            let oracle = brute_force_stdp(inst).expect("corpus fits the oracle");
            let got = solver::solve(inst).expect("corpus is conservative");
            if let Some(sol) = &got {
                // Minimum-weight solutions admit no shortcut.
                let forest = negative_forest(inst).unwrap();
                if !find_shortcuts(&sol.p1, &sol.p2, &forest).is_empty() {
                    return Some(format!("instance {i}: returned solution has a shortcut"));
                }
            }
            match (&oracle, &got) {
                (None, None) => None,
                (Some((w, _)), Some(sol)) if *w == sol.weight => None,
                _ => Some(format!(
                    "instance {i}: oracle {:?} vs solver {:?}",
                    oracle.as_ref().map(|x| x.0),
                    got.as_ref().map(|s| s.weight)
                )),
            }
        })
        .collect();
    assert!(
        mismatches.is_empty(),
        "criterion 1 (oracle equivalence): FAIL\n{}",
        mismatches.join("\n")
    );
    println!(
        "criterion 1 (oracle equivalence, {} instances): PASS",
        corpus.len()
    );
}

#[test]
fn criterion_2_perm_disjoint_equivalence() {
    let mut fixtures = 0usize;
    let mut failures: Vec<String> = Vec::new();
    'outer: for seed in 0..200u64 {
        let n = 7 + (seed % 4) as usize; // 7..=10
        let c = 1 + (seed % 2) as usize;
        let params = GenParams::new(n, c, 0.5, 31_000 + seed);
        let Ok(inst) = generate_instance(&params) else { continue };
        let Ok(forest) = negative_forest(&inst) else { continue };
        let guesses = spined_guesses(&inst, &forest);
        for (k, &(t_idx, a1, a2, b1, b2)) in guesses.iter().enumerate() {
            if k >= 3 {
                break; // a few guesses per instance suffice
            }
            let got = partsol::perm_disjoint(&inst, &forest, t_idx, a1, a2, b1, b2)
                .expect("table fill must succeed")
                .map(|x| x.weight);
            let brute = brute_force_perm_disjoint(&inst, a1, a2, b1, b2)
                .expect("fixtures fit the oracle")
                .map(|x| x.0);
            if got != brute {
                failures.push(format!(
                    "seed {seed} guess ({a1},{a2},{b1},{b2}): dp {got:?} vs brute {brute:?}"
                ));
            }
            fixtures += 1;
            if fixtures >= 120 {
                break 'outer;
            }
        }
    }
    assert!(fixtures >= 100, "only {fixtures} fixtures");
    assert!(
        failures.is_empty(),
        "criterion 2 (perm-disjoint equivalence): FAIL\n{}",
        failures.join("\n")
    );
    println!("criterion 2 (perm-disjoint equivalence, {fixtures} fixtures): PASS");
}

#[test]
fn criterion_3_partial_solution_tables() {
    let mut fixtures = 0usize;
    let mut checked_keys = 0usize;
    let mut failures: Vec<String> = Vec::new();
    'outer: for seed in 0..300u64 {
        let n = 7 + (seed % 2) as usize; // 7..=8: keeps the oracle quick
        let c = 1 + (seed % 2) as usize;
        let params = GenParams::new(n, c, 0.5, 52_000 + seed);
        let Ok(inst) = generate_instance(&params) else { continue };
        let Ok(forest) = negative_forest(&inst) else { continue };
        let guesses = spined_guesses(&inst, &forest);
        let Some(&(t_idx, a1, a2, b1, b2)) = guesses
            .iter()
            .find(|&&(t_idx, ..)| forest.trees[t_idx].vertices().len() <= 6)
        else {
            continue;
        };
        let Ok(table) = partsol::build_table(&inst, &forest, t_idx, a1, a2, b1, b2) else {
            continue;
        };
        let spine = &table.spine;
        for (&(u, v, tau), entry) in table.iter() {
            // Soundness: every stored pair is a partial solution for its key.
            if let Some(e) = entry {
                if !is_partial_solution(&e.q1, &e.q2, u, v, tau, spine, &forest) {
                    failures.push(format!("seed {seed}: stored entry for ({u},{v},{tau:#b}) invalid"));
                }
            }
            // Optimality: exact agreement with the enumeration oracle.
            let brute = brute_force_partial_solutions(&inst, &forest, spine, u, v, tau)
                .expect("fixtures fit the oracle");
            let got = entry.as_ref().map(|e| e.weight);
            if got != brute {
                failures.push(format!(
                    "seed {seed}: key ({u},{v},{tau:#b}) dp {got:?} vs brute {brute:?}"
                ));
            }
            checked_keys += 1;
        }
        fixtures += 1;
        if fixtures >= 50 {
            break 'outer;
        }
    }
    assert!(fixtures >= 50, "only {fixtures} fixtures");
    assert!(
        failures.is_empty(),
        "criterion 3 (partial-solution tables): FAIL\n{}",
        failures.join("\n")
    );
    println!(
        "criterion 3 (partial-solution tables, {fixtures} fixtures, {checked_keys} keys): PASS"
    );
}

/// Randomized simple path from `start`, stopping early at random, avoiding
/// the given vertices and filtered edges.
fn sample_path<F: Fn(Vertex, Vertex) -> bool>(
    rng: &mut ChaCha8Rng,
    inst: &WeightedInstance,
    start: Vertex,
    avoid: &VertexSet,
    edge_ok: F,
    stop_p: f64,
) -> Path {
    let mut verts = vec![start];
    let mut cur = start;
    loop {
        if !verts.is_empty() && rng.gen_bool(stop_p) {
            break;
        }
        let nexts: Vec<Vertex> = inst
            .neighbors(cur)
            .map(|(v, _)| v)
            .filter(|&v| !avoid.contains(v) && !verts.contains(&v) && edge_ok(cur, v))
            .collect();
        if nexts.is_empty() {
            break;
        }
        cur = nexts[rng.gen_range(0..nexts.len())];
        verts.push(cur);
    }
    Path::from_vertices(verts)
}

/// Randomized simple path between two vertices (first found by a random
/// depth-first search).
fn random_path_between(
    rng: &mut ChaCha8Rng,
    view: &GraphView,
    x: Vertex,
    y: Vertex,
) -> Option<Path> {
    fn rec(
        rng: &mut ChaCha8Rng,
        view: &GraphView,
        cur: &mut Vec<Vertex>,
        y: Vertex,
    ) -> bool {
        let last = *cur.last().unwrap();
        if last == y {
            return true;
        }
        let mut nexts: Vec<Vertex> = view.neighbors(last).map(|(v, _)| v).collect();
        // shuffle
        for i in (1..nexts.len()).rev() {
            let j = rng.gen_range(0..=i);
            nexts.swap(i, j);
        }
        for v in nexts {
            if !cur.contains(&v) {
                cur.push(v);
                if rec(rng, view, cur, y) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = vec![x];
    rec(rng, view, &mut cur, y).then(|| Path::from_vertices(cur))
}

#[test]
fn criterion_4_structural_invariants() {
    let corpus = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(440);

    // (i) Closed walks that repeat no negative edge have non-negative weight.
    let mut walks = 0usize;
    while walks < 10_000 {
        let inst = &corpus[rng.gen_range(0..corpus.len())];
        let verts: Vec<Vertex> = inst.alive().iter().collect();
        let start = verts[rng.gen_range(0..verts.len())];
        let mut cur = start;
        let mut seq = vec![start];
        let mut used_neg: Vec<(Vertex, Vertex)> = Vec::new();
        for _ in 0..3 * inst.num_ids() {
            let nexts: Vec<(Vertex, Weight)> = inst
                .neighbors(cur)
                .map(|(v, eid)| (v, inst.edge(eid).w))
                .filter(|&(v, w)| {
                    w >= 0 || !used_neg.contains(&(cur.min(v), cur.max(v)))
                })
                .collect();
            if nexts.is_empty() {
                break;
            }
            let (v, w) = nexts[rng.gen_range(0..nexts.len())];
            if w < 0 {
                used_neg.push((cur.min(v), cur.max(v)));
            }
            seq.push(v);
            cur = v;
            if cur == start {
                break;
            }
        }
        if cur != start || seq.len() < 2 {
            continue;
        }
        let walk = Walk::new(seq, inst).expect("walk edges exist");
        assert!(walk.no_repeated_negative_edge(inst));
        assert!(
            inst.weight_of_walk(&walk).unwrap() >= 0,
            "closed walk with negative weight: {walk:?}"
        );
        walks += 1;
    }

    // (ii) Tree-path lower bounds.
    let mut bounds = 0usize;
    while bounds < 1_000 {
        let inst = &corpus[rng.gen_range(0..corpus.len())];
        let Ok(forest) = negative_forest(inst) else { continue };
        if forest.is_empty() {
            continue;
        }
        let tree = &forest.trees[rng.gen_range(0..forest.c())];
        let tv = tree.vertices();
        let x = tv[rng.gen_range(0..tv.len())];
        let y = tv[rng.gen_range(0..tv.len())];
        if x == y {
            continue;
        }
        let view = GraphView::whole(inst);
        let Some(q) = random_path_between(&mut rng, &view, x, y) else { continue };
        assert!(
            q.weight(inst) >= tree.dist(x, y),
            "tree-path lower bound violated"
        );
        bounds += 1;

        // Disjoint-pair bound on four distinct tree vertices.
        if tv.len() >= 4 {
            let mut pick: Vec<Vertex> = tv.to_vec();
            for i in (1..pick.len()).rev() {
                let j = rng.gen_range(0..=i);
                pick.swap(i, j);
            }
            let (x, y, xp, yp) = (pick[0], pick[1], pick[2], pick[3]);
            if let Some(q) = random_path_between(&mut rng, &view, x, y) {
                let mut rest = view.clone();
                for &w in q.vertices() {
                    rest.alive.remove(w);
                }
                rest.alive.insert(xp);
                rest.alive.insert(yp);
                if !q.contains(xp) && !q.contains(yp) {
                    if let Some(qp) = random_path_between(&mut rng, &rest, xp, yp) {
                        let txy = tree.tree_path(x, y).unwrap();
                        let txyp = tree.tree_path(xp, yp).unwrap();
                        let exy = txy.edge_set();
                        let exyp = txyp.edge_set();
                        let sym: Weight = exy
                            .iter()
                            .filter(|e| !exyp.contains(e))
                            .chain(exyp.iter().filter(|e| !exy.contains(e)))
                            .map(|&(u, v)| inst.edge_weight(u, v).unwrap())
                            .sum();
                        assert!(
                            q.weight(inst) + qp.weight(inst) >= sym,
                            "disjoint-pair bound violated"
                        );
                    }
                }
            }
        }
    }

    // (iii) Amendment: never gains weight, ends locally cheapest, idempotent.
    let mut amended = 0usize;
    while amended < 300 {
        let inst = &corpus[rng.gen_range(0..corpus.len())];
        let Ok(forest) = negative_forest(inst) else { continue };
        let verts: Vec<Vertex> = inst.alive().iter().collect();
        let s1 = verts[rng.gen_range(0..verts.len())];
        let p1 = sample_path(&mut rng, inst, s1, &VertexSet::new(inst.num_ids()), |_, _| true, 0.2);
        let mut avoid = p1.vertex_set(inst.num_ids());
        let starts2: Vec<Vertex> = verts.iter().copied().filter(|&v| !avoid.contains(v)).collect();
        if starts2.is_empty() {
            continue;
        }
        let s2 = starts2[rng.gen_range(0..starts2.len())];
        avoid.remove(s2);
        let p2 = sample_path(&mut rng, inst, s2, &avoid, |_, _| true, 0.2);
        let before = p1.weight(inst) + p2.weight(inst);
        let (q1, q2) = amend(&p1, &p2, &forest, inst);
        let after = q1.weight(inst) + q2.weight(inst);
        assert!(after <= before, "amend increased weight");
        assert!(find_shortcuts(&q1, &q2, &forest).is_empty());
        let (r1, r2) = amend(&q1, &q2, &forest, inst);
        assert!(r1 == q1 && r2 == q2, "amend not idempotent");
        amended += 1;
    }

    // (iv) Oracle-optimal solutions are locally cheapest.
    let mut optimal_checked = 0usize;
    for inst in &corpus {
        let Ok(forest) = negative_forest(inst) else { continue };
        if let Some((_, (p1, p2))) = brute_force_stdp(inst).expect("desk scale") {
            assert!(
                find_shortcuts(&p1, &p2, &forest).is_empty(),
                "oracle-optimal solution admits a shortcut"
            );
            optimal_checked += 1;
        }
    }
    assert!(optimal_checked >= 100);

    // (v) Oracle-optimal permissively disjoint pairs are plain and
    // X-monotone, and cover the terminal-to-spine paths.
    let mut spine_checked = 0usize;
    for inst in &corpus {
        if spine_checked >= 60 {
            break;
        }
        let Ok(forest) = negative_forest(inst) else { continue };
        for &(t_idx, a1, a2, b1, b2) in spined_guesses(inst, &forest).iter().take(2) {
            let tree = &forest.trees[t_idx];
            let spine = build_spine(tree, a1, a2, b1, b2).unwrap();
            let Some((_, (q1, q2))) =
                brute_force_perm_disjoint(inst, a1, a2, b1, b2).expect("desk scale")
            else {
                continue;
            };
            for q in [&q1, &q2] {
                let rep = shape_predicates(q, &spine, tree).expect("starts at a terminal");
                assert!(rep.plain, "optimal pair not plain");
                assert!(rep.x_monotone, "optimal pair not X-monotone");
            }
            let contains = |p: &Path, tp: &Path| {
                tp.vertices().iter().all(|&w| p.contains(w))
                    && tp.edge_seq().all(|(x, y)| p.has_edge(x, y))
            };
            let a_covered = [&q1, &q2].iter().any(|q| {
                contains(q, spine.a_path(0)) || contains(q, spine.a_path(1))
            });
            let b_covered = [&q1, &q2].iter().any(|q| {
                contains(q, spine.b_path(0)) || contains(q, spine.b_path(1))
            });
            assert!(a_covered && b_covered, "terminal-to-spine paths uncovered");
            spine_checked += 1;
        }
    }
    assert!(spine_checked >= 30);

    println!(
        "criterion 4 (structural invariants: {walks} walks, {bounds} bounds, {amended} amendments, \
         {optimal_checked} optima, {spine_checked} spine fixtures): PASS"
    );
}

#[test]
fn criterion_5_uncrossing_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(550);
    let corpus = corpus();
    let mut quadruples = 0usize;
    let mut connector_cases = 0usize;
    let mut attempts = 0usize;
    while quadruples < 200 && attempts < 200_000 {
        attempts += 1;
        let inst = &corpus[rng.gen_range(0..corpus.len())];
        let Ok(forest) = negative_forest(inst) else { continue };
        if forest.is_empty() {
            continue;
        }
        let t_idx = rng.gen_range(0..forest.c());
        let tree = &forest.trees[t_idx];
        let tv = tree.vertices();
        let v1 = tv[rng.gen_range(0..tv.len())];
        let v2 = tv[rng.gen_range(0..tv.len())];
        if v1 == v2 {
            continue;
        }
        // Random partition: the guess tree stays in the second class.
        let mut t1_mask: TreeMask = 0;
        for i in 0..forest.c() {
            if i != t_idx && rng.gen_bool(0.5) {
                t1_mask |= 1 << i;
            }
        }
        // First pair: paths ending at v1/v2, avoiding the tree elsewhere and
        // using no edge of the second partition class.
        let mut avoid1 = VertexSet::new(inst.num_ids());
        for &w in tv {
            avoid1.insert(w);
        }
        avoid1.remove(v1);
        let p_edge_ok = |x: Vertex, y: Vertex| match forest.tree_of_edge(x, y) {
            Some(t) => t1_mask & (1 << t) != 0,
            None => true,
        };
        let p1 = sample_path(&mut rng, inst, v1, &avoid1, p_edge_ok, 0.3).reversed();
        let mut avoid2 = p1.vertex_set(inst.num_ids());
        for &w in tv {
            avoid2.insert(w);
        }
        avoid2.remove(v2);
        let p2 = sample_path(&mut rng, inst, v2, &avoid2, p_edge_ok, 0.3).reversed();

        // Second pair: sampled clear of the first partition class, then
        // amended to be locally cheapest.
        let mut avoidq = VertexSet::new(inst.num_ids());
        for (i, tr) in forest.trees.iter().enumerate() {
            if t1_mask & (1 << i) != 0 {
                for &w in tr.vertices() {
                    avoidq.insert(w);
                }
            }
        }
        let mut avoid_q1 = avoidq.clone();
        avoid_q1.remove(v1);
        avoid_q1.insert(v2);
        let q1 = sample_path(&mut rng, inst, v1, &avoid_q1, |_, _| true, 0.25);
        let mut avoid_q2 = avoidq.clone();
        avoid_q2.union_with(&q1.vertex_set(inst.num_ids()));
        avoid_q2.remove(v2);
        let q2 = sample_path(&mut rng, inst, v2, &avoid_q2, |_, _| true, 0.25);
        let (q1, q2) = amend(&q1, &q2, &forest, inst);
        if q1.contains(v2) || q2.contains(v1) {
            continue; // amendment may reroute through the junctions
        }

        let input = p1.weight(inst) + p2.weight(inst) + q1.weight(inst) + q2.weight(inst);
        match combine(inst, &forest, (&p1, &p2), (v1, v2), (&q1, &q2), t_idx, t1_mask) {
            Ok(out) => {
                let total = out.s1.weight(inst) + out.s2.weight(inst);
                assert!(total <= input, "uncrossing gained weight");
                if out.case == CombineCase::Connector {
                    assert!(total < input, "connector case must strictly improve");
                    connector_cases += 1;
                }
                assert!(treekit::permissively_disjoint(
                    &out.s1,
                    &out.s2,
                    (out.s1.first(), out.s2.first()),
                    (out.s1.last(), out.s2.last())
                ));
                quadruples += 1;
            }
            Err(_) => continue, // sampling failed a precondition; resample
        }
    }
    assert!(
        quadruples >= 200,
        "only {quadruples} precondition-satisfying quadruples found"
    );
    println!(
        "criterion 5 (uncrossing contract, {quadruples} quadruples, {connector_cases} connector cases): PASS"
    );
}

/// All source-to-sink paths of a network, as arc index lists with costs.
fn network_paths(net: &flows::FlowNetwork) -> Vec<(Vec<usize>, Weight)> {
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); net.nodes.len()];
    for (i, a) in net.arcs.iter().enumerate() {
        out_arcs[a.tail].push(i);
    }
    let mut res = Vec::new();
    fn rec(
        net: &flows::FlowNetwork,
        out_arcs: &[Vec<usize>],
        cur: usize,
        seen: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        res: &mut Vec<(Vec<usize>, Weight)>,
    ) {
        if cur == net.sink {
            let w = stack.iter().map(|&i| net.arcs[i].cost).sum();
            res.push((stack.clone(), w));
            return;
        }
        for &i in &out_arcs[cur] {
            let h = net.arcs[i].head;
            if !seen[h] {
                seen[h] = true;
                stack.push(i);
                rec(net, out_arcs, h, seen, stack, res);
                stack.pop();
                seen[h] = false;
            }
        }
    }
    let mut seen = vec![false; net.nodes.len()];
    seen[net.source] = true;
    rec(net, &out_arcs, net.source, &mut seen, &mut Vec::new(), &mut res);
    res
}

/// Brute-force minimum cost of an integral flow of the given value: the
/// best capacity-feasible multiset of source-sink paths.
fn brute_min_cost_flow(net: &flows::FlowNetwork, value: usize) -> Option<Weight> {
    let mut paths = network_paths(net);
    paths.sort_by_key(|p| p.1);
    let min_path = paths.first().map(|p| p.1)?;
    let mut usage: std::collections::HashMap<usize, i64> = std::collections::HashMap::new();
    let mut best: Option<Weight> = None;
    fn rec(
        net: &flows::FlowNetwork,
        paths: &[(Vec<usize>, Weight)],
        start: usize,
        left: usize,
        cost: Weight,
        min_path: Weight,
        usage: &mut std::collections::HashMap<usize, i64>,
        best: &mut Option<Weight>,
    ) {
        if left == 0 {
            if best.map(|b| cost < b).unwrap_or(true) {
                *best = Some(cost);
            }
            return;
        }
        if let Some(b) = best {
            if cost + (left as Weight) * min_path >= *b {
                return;
            }
        }
        for i in start..paths.len() {
            let fits = paths[i]
                .0
                .iter()
                .all(|&a| usage.get(&a).copied().unwrap_or(0) + 1 <= net.arcs[a].cap);
            if !fits {
                continue;
            }
            for &a in &paths[i].0 {
                *usage.entry(a).or_default() += 1;
            }
            rec(net, paths, i, left - 1, cost + paths[i].1, min_path, usage, best);
            for &a in &paths[i].0 {
                *usage.entry(a).or_default() -= 1;
            }
        }
    }
    rec(net, &paths, 0, value, 0, min_path, &mut usage, &mut best);
    best
}

#[test]
fn criterion_6_flow_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(660);
    let mut nz_checked = 0usize;
    let mut naabb_checked = 0usize;
    let mut stitches = 0usize;
    for seed in 0..400u64 {
        if nz_checked >= 60 && naabb_checked >= 30 && stitches >= 20 {
            break;
        }
        let n = 6 + (seed % 3) as usize; // 6..=8
        let c = 1 + (seed % 2) as usize;
        let params = GenParams::new(n, c, 0.55, 66_000 + seed);
        let Ok(inst) = generate_instance(&params) else { continue };
        let Ok(forest) = negative_forest(&inst) else { continue };

        // N_Z: exact cost of a value-2 flow.
        let choosable: Vec<usize> = (0..forest.c())
            .filter(|&i| {
                !forest.trees[i].contains(inst.s()) && !forest.trees[i].contains(inst.t())
            })
            .collect();
        let mut z = std::collections::HashMap::new();
        let mut ok = true;
        for &i in &choosable {
            let tv = forest.trees[i].vertices();
            z.insert(i, tv[rng.gen_range(0..tv.len())]);
        }
        for &i in &choosable {
            ok &= z.contains_key(&i);
        }
        if ok {
            if let Ok(net) = flows::build_nz(&inst, &forest, &z) {
                let brute = brute_min_cost_flow(&net, 2);
                let got = flows::min_cost_flow(&net, 2).unwrap();
                assert_eq!(
                    brute,
                    got.as_ref().map(|f| f.cost),
                    "N_Z min-cost mismatch on seed {seed}"
                );
                if let Some(flow) = got {
                    let paths = flows::decompose_flow(&net, &flow).unwrap();
                    assert_eq!(paths.len(), 2);
                    for v in paths[0].vertices() {
                        if *v != inst.s() && *v != inst.t() {
                            assert!(!paths[1].contains(*v), "decomposition not openly disjoint");
                        }
                    }
                    assert!(
                        paths[0].weight(&inst) + paths[1].weight(&inst) <= flow.cost,
                        "decomposition heavier than the flow"
                    );
                }
                nz_checked += 1;
            }
        }

        // Four-terminal networks: value-4 optimum and the stitch bound.
        for &(t_idx, a1, a2, b1, b2) in spined_guesses(&inst, &forest).iter().take(1) {
            let net = flows::build_naabb(&inst, &forest, a1, b1, a2, b2);
            let brute = brute_min_cost_flow(&net, 4);
            let got = flows::min_cost_flow(&net, 4).unwrap();
            assert_eq!(
                brute,
                got.as_ref().map(|f| f.cost),
                "value-4 min-cost mismatch on seed {seed}"
            );
            naabb_checked += 1;
            let Some(flow) = got else { continue };
            let flow_paths = flows::decompose_flow(&net, &flow).unwrap();
            let Some(pair) = partsol::perm_disjoint(&inst, &forest, t_idx, a1, a2, b1, b2)
                .expect("table fill")
            else {
                continue;
            };
            if let Some(sol) = solver::stitch_from_flow(
                &inst,
                &forest,
                t_idx,
                (a1, a2),
                (b1, b2),
                &flow_paths,
                (&pair.first, &pair.second),
            ) {
                assert!(
                    sol.weight <= flow.cost + pair.weight,
                    "stitch exceeded the flow + pair bound on seed {seed}"
                );
                stitches += 1;
            }
        }
    }
    assert!(nz_checked >= 50 && naabb_checked >= 25 && stitches >= 15);
    println!(
        "criterion 6 (flow correctness: {nz_checked} N_Z, {naabb_checked} four-terminal, {stitches} stitches): PASS"
    );
}

#[test]
fn criterion_7_polynomial_scaling_smoke() {
    let mut points = Vec::new();
    for &n in &[20usize, 30, 40, 60] {
        let params = GenParams::new(n, 1, 0.3, 7_000 + n as u64);
        let inst = generate_instance(&params).expect("generator succeeds");
        let start = std::time::Instant::now();
        let sol = solver::solve(&inst).expect("conservative");
        let secs = start.elapsed().as_secs_f64();
        assert!(
            secs <= 600.0,
            "n={n} took {secs:.1}s, over the 10-minute bound"
        );
        // Sanity on the output when feasible.
        if let Some(sol) = sol {
            assert_eq!(sol.weight % 2, 0);
        }
        points.push(((n as f64).ln(), secs.max(1e-6).ln()));
    }
    let slope = stdp::cli::slope(&points);
    assert!(
        slope <= 10.0,
        "log-log runtime slope {slope:.2} exceeds the bound"
    );
    println!("criterion 7 (scaling smoke, slope {slope:.2}): PASS");
}

/// Extended randomized stress over adversarial shapes: trees spanning most
/// of the graph (terminals often inside them), tiny weights forcing ties,
/// high and low densities. Slow; run with `cargo test -- --ignored`.
#[test]
#[ignore]
fn extended_oracle_stress() {
    let mut cases: Vec<GenParams> = Vec::new();
    for seed in 0..4000u64 {
        let n = 6 + (seed % 7) as usize; // 6..=12
        let c = (seed % 4) as usize;
        if 2 * c > n {
            continue;
        }
        let mut p = GenParams::new(n, c, [0.25, 0.5, 0.85][(seed % 3) as usize], 90_000 + seed);
        p.max_weight = [1, 2, 10][(seed / 3 % 3) as usize];
        p.tree_size_max = if c > 0 { (n / c).max(2) } else { 2 };
        cases.push(p);
    }
    let bad: Vec<String> = cases
        .par_iter()
        .filter_map(|params| {
            let inst = generate_instance(params).ok()?;
            let oracle = brute_force_stdp(&inst).ok()?.map(|x| x.0);
            let got = solver::solve(&inst).ok()?.map(|s| s.weight);
            (oracle != got).then(|| {
                format!("seed {}: oracle {oracle:?} vs solver {got:?}", params.seed)
            })
        })
        .collect();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
    println!("extended stress: {} instances agree", cases.len());
}

/// The shortest-path primitive keeps its contract on the corpus: exact
/// agreement with path enumeration. This backs the oracle usage inside the
/// dynamic program.
#[test]
fn conspath_matches_enumeration_on_corpus() {
    let corpus: Vec<WeightedInstance> = corpus().into_iter().take(40).collect();
    for inst in &corpus {
        let view = GraphView::whole(inst);
        let s = inst.s();
        let paths = all_simple_paths(&view, s, Some(inst.t()));
        let brute = paths.iter().map(|p| p.weight(inst)).min();
        let got = conspath::conservative_shortest_path(&view, s, inst.t())
            .expect("conservative")
            .map(|x| x.1);
        assert_eq!(brute, got);
    }
    println!("conspath spot-check on corpus: PASS");
}
