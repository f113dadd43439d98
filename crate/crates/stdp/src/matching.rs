//! Exact minimum-weight perfect matching on general graphs.
//!
//! The workhorse is a primal-dual blossom implementation of maximum-weight
//! matching (Galil's formulation, following van Rantwijk's reference code).
//! Minimum-weight perfect matching is obtained by flipping weights and
//! forcing maximum cardinality. Small inputs go through a subset dynamic
//! program instead, which also serves as the test oracle for the blossom
//! code.

pub type MatchWeight = i64;

const NONE: usize = usize::MAX;

/// `mate[v]` is the vertex matched to `v`, or `usize::MAX` if `v` is single.
///
/// `maxcardinality` restricts the search to maximum-cardinality matchings.
/// Vertices are `0..nvertex`; parallel edges and self-loops are not allowed.
pub fn max_weight_matching(
    nvertex: usize,
    edges: &[(usize, usize, MatchWeight)],
    maxcardinality: bool,
) -> Vec<usize> {
    if edges.is_empty() {
        return vec![NONE; nvertex];
    }
    // Work on doubled weights so that every dual value stays integral.
    let edges: Vec<(usize, usize, MatchWeight)> =
        edges.iter().map(|&(i, j, w)| (i, j, 2 * w)).collect();
    let mut m = Matcher::new(nvertex, edges, maxcardinality);
    m.run();
    m.mate_vertices()
}

/// Minimum-weight perfect matching; `None` when no perfect matching exists.
/// Returns the matched pairs and the total weight.
pub fn min_weight_perfect_matching(
    n: usize,
    edges: &[(usize, usize, MatchWeight)],
) -> Option<(Vec<(usize, usize)>, MatchWeight)> {
    if n % 2 != 0 {
        return None;
    }
    if n == 0 {
        return Some((Vec::new(), 0));
    }
    if n <= 16 {
        return min_weight_perfect_matching_small(n, edges);
    }
    let shift = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    let flipped: Vec<(usize, usize, MatchWeight)> =
        edges.iter().map(|&(i, j, w)| (i, j, shift - w)).collect();
    let mate = max_weight_matching(n, &flipped, true);
    if mate.iter().any(|&m| m == NONE) {
        return None;
    }
    collect_pairs(n, edges, &mate)
}

/// Subset-DP exact matcher for up to 16 vertices.
pub fn min_weight_perfect_matching_small(
    n: usize,
    edges: &[(usize, usize, MatchWeight)],
) -> Option<(Vec<(usize, usize)>, MatchWeight)> {
    assert!(n <= 16 && n % 2 == 0);
    let inf = MatchWeight::MAX / 4;
    let mut w = vec![vec![inf; n]; n];
    for &(i, j, wt) in edges {
        if wt < w[i][j] {
            w[i][j] = wt;
            w[j][i] = wt;
        }
    }
    let full = 1usize << n;
    let mut dp = vec![inf; full];
    let mut choice = vec![(NONE, NONE); full];
    dp[0] = 0;
    for mask in 1..full {
        let i = mask.trailing_zeros() as usize;
        if mask & (1 << i) == 0 {
            continue;
        }
        let rest = mask & !(1 << i);
        let mut j_iter = rest;
        while j_iter != 0 {
            let j = j_iter.trailing_zeros() as usize;
            j_iter &= j_iter - 1;
            if w[i][j] < inf && dp[rest & !(1 << j)] < inf {
                let cand = dp[rest & !(1 << j)] + w[i][j];
                if cand < dp[mask] {
                    dp[mask] = cand;
                    choice[mask] = (i, j);
                }
            }
        }
    }
    if dp[full - 1] >= inf {
        return None;
    }
    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full - 1;
    while mask != 0 {
        let (i, j) = choice[mask];
        pairs.push((i, j));
        mask &= !(1 << i);
        mask &= !(1 << j);
    }
    pairs.sort_unstable();
    Some((pairs, dp[full - 1]))
}

fn collect_pairs(
    n: usize,
    edges: &[(usize, usize, MatchWeight)],
    mate: &[usize],
) -> Option<(Vec<(usize, usize)>, MatchWeight)> {
    let mut weight_of = std::collections::HashMap::new();
    for &(i, j, w) in edges {
        weight_of.insert((i.min(j), i.max(j)), w);
    }
    let mut pairs = Vec::new();
    let mut total = 0;
    for v in 0..n {
        let m = mate[v];
        if m == NONE {
            return None;
        }
        if v < m {
            pairs.push((v, m));
            total += weight_of[&(v, m)];
        }
    }
    Some((pairs, total))
}

// ---------------------------------------------------------------------------
// Blossom matcher internals.
//
// Vertices are 0..nvertex; non-trivial blossoms are nvertex..2*nvertex.
// Edge endpoints are numbered 0..2*nedge, endpoints 2k and 2k+1 belonging to
// edge k. Labels: 0 free, 1 S, 2 T, 5 marks an S-blossom during path scans.
// ---------------------------------------------------------------------------

struct Matcher {
    nvertex: usize,
    edges: Vec<(usize, usize, MatchWeight)>,
    maxcardinality: bool,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Vec<usize>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<MatchWeight>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Matcher {
    fn new(nvertex: usize, edges: Vec<(usize, usize, MatchWeight)>, maxcardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let endpoint = (0..2 * nedge)
            .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
            .collect();
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        Matcher {
            nvertex,

            edges,
            maxcardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase: (0..nvertex).chain(std::iter::repeat(NONE).take(nvertex)).collect(),
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![Vec::new(); 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar: std::iter::repeat(maxweight)
                .take(nvertex)
                .chain(std::iter::repeat(0).take(nvertex))
                .collect(),
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> MatchWeight {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let mut l = self.leaves(b);
            self.queue.append(&mut l);
        } else if t == 2 {
            let base = self.blossombase[b];
            let mate_base = self.mate[base];
            debug_assert!(mate_base != NONE);
            self.assign_label(self.endpoint[mate_base], 1, mate_base ^ 1);
        }
    }

    fn scan_blossom(&mut self, v0: usize, w0: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let mut v = v0;
        let mut w = w0;
        loop {
            if v == NONE && w == NONE {
                break;
            }
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossombase[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert!(self.labelend[b] != NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("unused blossom available");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert!(self.labelend[bv] != NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert!(self.labelend[bw] != NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }
        // Recompute least-slack edges to neighbouring S-blossoms.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                self.leaves(bv)
                    .into_iter()
                    .map(|leaf| self.neighbend[leaf].iter().map(|&p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossombestedges[bv].clone()]
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.blossombestedges[bv].clear();
            self.bestedge[bv] = NONE;
        }
        self.blossombestedges[b] = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for idx in 0..self.blossombestedges[b].len() {
            let k = self.blossombestedges[b][idx];
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
    }

    fn child(&self, b: usize, j: i64) -> usize {
        let len = self.blossomchilds[b].len() as i64;
        self.blossomchilds[b][j.rem_euclid(len) as usize]
    }

    fn endp(&self, b: usize, j: i64) -> usize {
        let len = self.blossomendps[b].len() as i64;
        self.blossomendps[b][j.rem_euclid(len) as usize]
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            debug_assert!(self.labelend[b] != NONE);
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = self.blossomchilds[b]
                .iter()
                .position(|&c| c == entrychild)
                .expect("entry child present") as i64;
            let (jstep, endptrick): (i64, i64) = if j & 1 != 0 {
                j -= self.blossomchilds[b].len() as i64;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                self.label[self.endpoint[p ^ 1]] = 0;
                let q = self.endp(b, j - endptrick) ^ (endptrick as usize) ^ 1;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                let allowed = self.endp(b, j - endptrick) / 2;
                self.allowedge[allowed] = true;
                j += jstep;
                p = self.endp(b, j - endptrick) ^ (endptrick as usize);
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = self.child(b, j);
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while self.child(b, j) != entrychild {
                let bv = self.child(b, j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves(bv);
                let mut labelled = NONE;
                for &v in &leaves {
                    if self.label[v] != 0 {
                        labelled = v;
                        break;
                    }
                }
                if labelled != NONE {
                    let v = labelled;
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let base_mate = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[base_mate]] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b].clear();
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let i = self.blossomchilds[b]
            .iter()
            .position(|&c| c == t)
            .expect("child present") as i64;
        let mut j = i;
        let (jstep, endptrick): (i64, i64) = if i & 1 != 0 {
            j -= self.blossomchilds[b].len() as i64;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.child(b, j);
            let p = self.endp(b, j - endptrick) ^ (endptrick as usize);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.child(b, j);
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        let i = i as usize;
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossombase[bs]]);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert!(self.labelend[bt] != NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn run(&mut self) {
        for _ in 0..self.nvertex {
            self.label.fill(0);
            self.bestedge.fill(NONE);
            for b in self.nvertex..2 * self.nvertex {
                self.blossombestedges[b].clear();
            }
            self.allowedge.fill(false);
            self.queue.clear();
            for v in 0..self.nvertex {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let ends = self.neighbend[v].clone();
                    let mut done = false;
                    for p in ends {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    done = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if done {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                let mut deltatype = -1;
                let mut delta = 0;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.maxcardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..self.nvertex].iter().min().unwrap();
                }
                for v in 0..self.nvertex {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * self.nvertex {
                    if self.blossomparent[b] == NONE
                        && self.label[b] == 1
                        && self.bestedge[b] != NONE
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0, "S-S slack must be even");
                        let d = kslack / 2;
                        if deltatype == -1 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == -1 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == -1 {
                    debug_assert!(self.maxcardinality);
                    deltatype = 1;
                    delta = self.dualvar[..self.nvertex].iter().copied().min().unwrap().max(0);
                }

                for v in 0..self.nvertex {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in self.nvertex..2 * self.nvertex {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(deltablossom, false),
                    _ => unreachable!(),
                }
            }
            if !augmented {
                break;
            }
            for b in self.nvertex..2 * self.nvertex {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }

    fn mate_vertices(&self) -> Vec<usize> {
        (0..self.nvertex)
            .map(|v| {
                if self.mate[v] == NONE {
                    NONE
                } else {
                    self.endpoint[self.mate[v]]
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn blossom_min_perfect(
        n: usize,
        edges: &[(usize, usize, MatchWeight)],
    ) -> Option<(Vec<(usize, usize)>, MatchWeight)> {
        let shift = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
        let flipped: Vec<_> = edges.iter().map(|&(i, j, w)| (i, j, shift - w)).collect();
        let mate = max_weight_matching(n, &flipped, true);
        if mate.iter().any(|&m| m == NONE) {
            return None;
        }
        collect_pairs(n, edges, &mate)
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(min_weight_perfect_matching(0, &[]), Some((vec![], 0)));
        assert_eq!(min_weight_perfect_matching(2, &[(0, 1, 7)]), Some((vec![(0, 1)], 7)));
        assert_eq!(min_weight_perfect_matching(2, &[]), None);
        assert_eq!(min_weight_perfect_matching(3, &[(0, 1, 1)]), None);
    }

    #[test]
    fn square_prefers_cheap_pairing() {
        // 0-1 (1), 1-2 (9), 2-3 (1), 0-3 (9), 0-2 (4)
        let edges = [(0, 1, 1), (1, 2, 9), (2, 3, 1), (0, 3, 9), (0, 2, 4)];
        let (pairs, total) = min_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(total, 2);
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn negative_weights_are_fine() {
        let edges = [(0, 1, -5), (1, 2, -10), (2, 3, -5), (0, 3, -1)];
        let (_, total) = min_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(total, -11);
    }

    #[test]
    fn blossom_agrees_with_subset_dp_on_random_graphs() {
        let mut rng = StdRng::seed_from_u64(20240711);
        for case in 0..400 {
            let n = 2 * rng.gen_range(1..=7);
            let density = rng.gen_range(0.3..1.0);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(density) {
                        edges.push((i, j, rng.gen_range(-50..=50)));
                    }
                }
            }
            let dp = min_weight_perfect_matching_small(n, &edges);
            let bl = blossom_min_perfect(n, &edges);
            match (dp, bl) {
                (None, None) => {}
                (Some((_, a)), Some((_, b))) => {
                    assert_eq!(a, b, "case {case}: value mismatch on n={n} edges={edges:?}")
                }
                (a, b) => panic!("case {case}: feasibility mismatch {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn blossom_handles_odd_cycles() {
        // Triangle plus pendant: forces blossom machinery.
        let edges = [(0, 1, 2), (1, 2, 2), (0, 2, 2), (2, 3, 1)];
        let (pairs, total) = blossom_min_perfect(4, &edges).unwrap();
        assert_eq!(total, 3);
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn max_weight_matching_picks_heavier_edge() {
        let mate = max_weight_matching(4, &[(0, 1, 3), (1, 2, 5), (2, 3, 3)], false);
        // Max weight without cardinality constraint: 0-1 and 2-3 (6) beats 1-2 (5).
        assert_eq!(mate[0], 1);
        assert_eq!(mate[2], 3);
    }
}
