//! Graph folding for subgroup rank in a free group.
//!
//! A wedge of labeled loops, one per generator word, is folded until no
//! vertex has two equal-label edges in the same direction. For a folded
//! connected graph the fundamental group is free of rank `E - V + 1`, and
//! folding does not change the subgroup the graph carries, so that number is
//! the rank of the subgroup generated by the input words.

use super::{GroupPresentation, ReducedWord};

#[derive(Debug, Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    label: usize,
    alive: bool,
}

#[derive(Debug)]
pub(crate) struct WedgeGraph {
    parent: Vec<usize>,
    edges: Vec<Edge>,
}

impl WedgeGraph {
    /// Wedge of loops at a base vertex, one loop per generator.
    ///
    /// Identity generators contribute nothing. Callers must pass words over a
    /// free group so that every syllable expands to single-letter atoms.
    pub(crate) fn new(generators: &[ReducedWord], pres: &GroupPresentation) -> Self {
        debug_assert!(pres.is_free_group());
        let mut graph = WedgeGraph { parent: vec![0], edges: Vec::new() };
        for word in generators {
            let atoms: Vec<(usize, bool)> = word
                .syllables()
                .iter()
                .flat_map(|s| {
                    let positive = s.exponent > 0;
                    std::iter::repeat((s.factor, positive)).take(s.exponent.unsigned_abs() as usize)
                })
                .collect();
            if atoms.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (i, &(label, positive)) in atoms.iter().enumerate() {
                let next = if i + 1 == atoms.len() { 0 } else { graph.add_vertex() };
                let (from, to) = if positive { (cur, next) } else { (next, cur) };
                graph.edges.push(Edge { from, to, label, alive: true });
                cur = next;
            }
        }
        graph
    }

    fn add_vertex(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        id
    }

    fn root(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut cur = v;
        while self.parent[cur] != r {
            let next = self.parent[cur];
            self.parent[cur] = r;
            cur = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.root(a);
        let rb = self.root(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Finds the first collision in edge-id order: two alive edges sharing
    /// source-and-label or target-and-label. Returns the edge-id pair and the
    /// vertex pair to merge.
    fn find_collision(&mut self) -> Option<(usize, (usize, usize))> {
        use std::collections::HashMap;
        let mut by_out: HashMap<(usize, usize), usize> = HashMap::new();
        let mut by_in: HashMap<(usize, usize), usize> = HashMap::new();
        for id in 0..self.edges.len() {
            if !self.edges[id].alive {
                continue;
            }
            let from = self.root(self.edges[id].from);
            let to = self.root(self.edges[id].to);
            let label = self.edges[id].label;
            if let Some(&first) = by_out.get(&(from, label)) {
                let other = self.root(self.edges[first].to);
                return Some((id, (other, to)));
            }
            by_out.insert((from, label), id);
            if let Some(&first) = by_in.get(&(to, label)) {
                let other = self.root(self.edges[first].from);
                return Some((id, (other, from)));
            }
            by_in.insert((to, label), id);
        }
        None
    }

    /// Folds to completion. Each step removes one edge, so this terminates
    /// after at most the initial edge count of steps.
    pub(crate) fn fold(&mut self) {
        while let Some((dead, (a, b))) = self.find_collision() {
            self.union(a, b);
            self.edges[dead].alive = false;
        }
    }

    pub(crate) fn is_folded(&mut self) -> bool {
        self.find_collision().is_none()
    }

    fn live_vertex_count(&mut self) -> usize {
        let n = self.parent.len();
        let mut roots: Vec<usize> = (0..n).map(|v| self.root(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    fn live_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.alive).count()
    }

    /// First Betti number `E - V + 1` of the folded graph.
    pub(crate) fn rank(&mut self) -> usize {
        let v = self.live_vertex_count();
        let e = self.live_edge_count();
        e + 1 - v
    }
}

/// Rank of the subgroup of the free group generated by `generators`.
pub(crate) fn subgroup_rank(generators: &[ReducedWord], pres: &GroupPresentation) -> usize {
    let mut graph = WedgeGraph::new(generators, pres);
    graph.fold();
    debug_assert!(graph.is_folded());
    graph.rank()
}
