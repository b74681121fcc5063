//! Folding of edge-labelled graphs whose edges carry values ("voltages") in
//! an abelian group.
//!
//! Plain Stallings folding is the special case of the trivial voltage group.
//! Vertices are merged with a union-find that also stores, for every vertex,
//! its gauge offset relative to the class root; an edge `u -x-> v` with
//! voltage `α` reads as voltage `α + g(u) - g(v)` between the two roots.
//! Gauge changes never alter the total voltage of a closed path at the
//! basepoint, and when two parallel edges with different voltages are
//! identified their difference is reported as a closed-path voltage of the
//! trivial word.

use std::collections::VecDeque;
use std::fmt::Debug;

use crate::freegroup::Letter;

pub(crate) trait VoltageGroup {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// The trivial group; folding with it is ordinary Stallings folding.
pub(crate) struct NoVoltage;

impl VoltageGroup for NoVoltage {
    type Elem = ();

    fn zero(&self) {}
    fn add(&self, _: &(), _: &()) {}
    fn neg(&self, _: &()) {}
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct VEdge<V> {
    pub src: usize,
    pub gen: usize,
    pub dst: usize,
    pub volt: V,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct VGraph<V> {
    pub num_vertices: usize,
    pub base: usize,
    pub edges: Vec<VEdge<V>>,
}

/// Result of folding: the folded graph and the voltages of trivial-label
/// closed paths discovered while identifying parallel edges.
pub(crate) struct Folded<V> {
    pub graph: VGraph<V>,
    pub cycles: Vec<V>,
}

struct Folder<'g, G: VoltageGroup> {
    group: &'g G,
    slots_per_vertex: usize,
    parent: Vec<usize>,
    pot: Vec<G::Elem>,
    size: Vec<usize>,
    edges: Vec<VEdge<G::Elem>>,
    alias: Vec<usize>,
    slots: Vec<Option<usize>>,
    queue: VecDeque<(usize, usize, usize)>,
    cycles: Vec<G::Elem>,
}

impl<'g, G: VoltageGroup> Folder<'g, G> {
    fn find(&mut self, v: usize) -> usize {
        let mut path = Vec::new();
        let mut x = v;
        while self.parent[x] != x {
            path.push(x);
            x = self.parent[x];
        }
        let root = x;
        for &y in path.iter().rev() {
            let p = self.parent[y];
            if p != root {
                self.pot[y] = self.group.add(&self.pot[y], &self.pot[p]);
                self.parent[y] = root;
            }
        }
        root
    }

    /// Root of `v` and the gauge offset of `v` relative to that root.
    fn locate(&mut self, v: usize) -> (usize, G::Elem) {
        let root = self.find(v);
        if root == v {
            (root, self.group.zero())
        } else {
            (root, self.pot[v].clone())
        }
    }

    fn live_edge(&mut self, mut e: usize) -> usize {
        while self.alias[e] != e {
            let next = self.alias[e];
            self.alias[e] = self.alias[next];
            e = next;
        }
        e
    }

    /// The far endpoint (as a root) and voltage when leaving through `slot`.
    fn far_end(&mut self, e: usize, slot: usize) -> (usize, G::Elem) {
        let (src, dst) = (self.edges[e].src, self.edges[e].dst);
        let (rs, gs) = self.locate(src);
        let (rt, gt) = self.locate(dst);
        let forward = self
            .group
            .sub(&self.group.add(&self.edges[e].volt, &gs), &gt);
        if slot % 2 == 0 {
            (rt, forward)
        } else {
            (rs, self.group.neg(&forward))
        }
    }

    fn put(&mut self, root: usize, slot: usize, e: usize) {
        let idx = root * self.slots_per_vertex + slot;
        match self.slots[idx] {
            None => self.slots[idx] = Some(e),
            Some(existing) => self.queue.push_back((existing, e, slot)),
        }
    }

    fn insert(&mut self, e: usize) {
        let letter = Letter::gen(self.edges[e].gen);
        let rs = self.find(self.edges[e].src);
        let rt = self.find(self.edges[e].dst);
        self.put(rs, letter.slot(), e);
        self.put(rt, letter.inverse().slot(), e);
    }

    /// Merges the classes of roots `keep` and `other`, shifting the gauge of
    /// `other`'s class by `delta`.
    fn union(&mut self, keep: usize, other: usize, delta: G::Elem) {
        let (keep, absorbed, offset) = if self.size[keep] >= self.size[other] {
            (keep, other, delta)
        } else {
            let neg = self.group.neg(&delta);
            (other, keep, neg)
        };
        self.parent[absorbed] = keep;
        self.pot[absorbed] = offset;
        self.size[keep] += self.size[absorbed];
        for slot in 0..self.slots_per_vertex {
            if let Some(e) = self.slots[absorbed * self.slots_per_vertex + slot].take() {
                self.put(keep, slot, e);
            }
        }
    }

    fn run(&mut self) {
        while let Some((e1, e2, slot)) = self.queue.pop_front() {
            let e1 = self.live_edge(e1);
            let e2 = self.live_edge(e2);
            if e1 == e2 {
                continue;
            }
            let (t1, b1) = self.far_end(e1, slot);
            let (t2, b2) = self.far_end(e2, slot);
            if t1 != t2 {
                let delta = self.group.sub(&b2, &b1);
                self.union(t1, t2, delta);
            } else if b1 != b2 {
                let diff = self.group.sub(&b1, &b2);
                self.cycles.push(diff);
            }
            self.alias[e2] = e1;
        }
    }
}

impl<V: Clone + PartialEq + Debug> VGraph<V> {
    pub fn fold<G: VoltageGroup<Elem = V>>(self, group: &G, rank: usize) -> Folded<V> {
        let n = self.num_vertices;
        let m = self.edges.len();
        let mut folder = Folder {
            group,
            slots_per_vertex: 2 * rank,
            parent: (0..n).collect(),
            pot: vec![group.zero(); n],
            size: vec![1; n],
            edges: self.edges,
            alias: (0..m).collect(),
            slots: vec![None; n * 2 * rank],
            queue: VecDeque::new(),
            cycles: Vec::new(),
        };
        for e in 0..m {
            folder.insert(e);
            folder.run();
        }

        let mut new_id = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            let r = folder.find(v);
            if new_id[r] == usize::MAX {
                new_id[r] = count;
                count += 1;
            }
        }
        let mut edges = Vec::new();
        for e in 0..m {
            if folder.alias[e] != e {
                continue;
            }
            let (rs, gs) = folder.locate(folder.edges[e].src);
            let (rt, gt) = folder.locate(folder.edges[e].dst);
            let volt = group.sub(&group.add(&folder.edges[e].volt, &gs), &gt);
            edges.push(VEdge {
                src: new_id[rs],
                gen: folder.edges[e].gen,
                dst: new_id[rt],
                volt,
            });
        }
        let base = new_id[folder.find(self.base)];
        Folded {
            graph: VGraph {
                num_vertices: count,
                base,
                edges,
            },
            cycles: folder.cycles,
        }
    }

    /// Repeatedly deletes non-base vertices of degree at most one.
    pub fn trim_core(self) -> VGraph<V> {
        let n = self.num_vertices;
        let mut degree = vec![0usize; n];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            degree[e.src] += 1;
            degree[e.dst] += 1;
            incident[e.src].push(i);
            if e.dst != e.src {
                incident[e.dst].push(i);
            }
        }
        let mut alive_v = vec![true; n];
        let mut alive_e = vec![true; self.edges.len()];
        let mut stack: Vec<usize> = (0..n).filter(|&v| v != self.base && degree[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if !alive_v[v] {
                continue;
            }
            alive_v[v] = false;
            for &i in &incident[v] {
                if !alive_e[i] {
                    continue;
                }
                alive_e[i] = false;
                let e = &self.edges[i];
                let other = if e.src == v { e.dst } else { e.src };
                degree[other] -= 1;
                if other != self.base && alive_v[other] && degree[other] <= 1 {
                    stack.push(other);
                }
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            if alive_v[v] {
                new_id[v] = count;
                count += 1;
            }
        }
        let edges = self
            .edges
            .into_iter()
            .zip(alive_e)
            .filter(|(_, alive)| *alive)
            .map(|(e, _)| VEdge {
                src: new_id[e.src],
                gen: e.gen,
                dst: new_id[e.dst],
                volt: e.volt,
            })
            .collect();
        VGraph {
            num_vertices: count,
            base: new_id[self.base],
            edges,
        }
    }

    /// Renumbers a folded graph by breadth-first search from the basepoint,
    /// visiting neighbours in slot order `a, A, b, B, ...`. The basepoint
    /// becomes vertex 0 and edges are sorted by `(src, gen)`.
    pub fn canonical(self, rank: usize) -> VGraph<V> {
        let n = self.num_vertices;
        let spv = 2 * rank;
        let mut slots: Vec<Option<usize>> = vec![None; n * spv];
        for e in &self.edges {
            let l = Letter::gen(e.gen);
            slots[e.src * spv + l.slot()] = Some(e.dst);
            slots[e.dst * spv + l.inverse().slot()] = Some(e.src);
        }
        let mut new_id = vec![usize::MAX; n];
        let mut queue = VecDeque::from([self.base]);
        new_id[self.base] = 0;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for s in 0..spv {
                if let Some(w) = slots[v * spv + s] {
                    if new_id[w] == usize::MAX {
                        new_id[w] = count;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        debug_assert_eq!(count, n, "canonical numbering needs a connected graph");
        let mut edges: Vec<VEdge<V>> = self
            .edges
            .into_iter()
            .map(|e| VEdge {
                src: new_id[e.src],
                gen: e.gen,
                dst: new_id[e.dst],
                volt: e.volt,
            })
            .collect();
        edges.sort_by_key(|e| (e.src, e.gen, e.dst));
        VGraph {
            num_vertices: n,
            base: 0,
            edges,
        }
    }
}
