//! Stallings graphs of finitely generated subgroups of free groups.
//!
//! [`LabeledGraph`] is an arbitrary connected based graph with edges labelled
//! by generators. Folding and trimming turn it into a [`SubgroupGraph`]: a
//! folded core graph whose closed paths at the basepoint spell exactly the
//! elements of the subgroup. Subgroup graphs are numbered canonically
//! (breadth-first from the basepoint, neighbours in the order `a, A, b, B,
//! ...`), so two of them are equal iff they represent the same subgroup.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::abelian::{AbElement, AbGroup, AbSubgroup};
use crate::error::{Error, Result};
use crate::fold::{NoVoltage, VEdge, VGraph, VoltageGroup};
use crate::freegroup::{Alphabet, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub gen: usize,
    pub dst: usize,
}

/// Index of a subgroup in the ambient free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl Index {
    pub fn finite(self) -> Option<usize> {
        match self {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => f.write_str("infinite"),
        }
    }
}

/// A connected, based, edge-labelled graph; possibly unfolded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    num_vertices: usize,
    base: usize,
    edges: Vec<Edge>,
}

impl LabeledGraph {
    pub fn new(alphabet: Alphabet, num_vertices: usize, base: usize, edges: Vec<Edge>) -> Result<Self> {
        if base >= num_vertices {
            return Err(Error::VertexOutOfRange(base));
        }
        for e in &edges {
            for v in [e.src, e.dst] {
                if v >= num_vertices {
                    return Err(Error::VertexOutOfRange(v));
                }
            }
            alphabet.check_letter(Letter::gen(e.gen))?;
        }
        let g = LabeledGraph {
            alphabet,
            num_vertices,
            base,
            edges,
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// One closed petal at the basepoint per nontrivial generator word.
    pub fn bouquet(alphabet: Alphabet, gens: &[Word]) -> Result<Self> {
        let (num_vertices, edges) = petals(&NoVoltage, alphabet, gens.iter().map(|w| (w, ())))?;
        Ok(LabeledGraph {
            alphabet,
            num_vertices,
            base: 0,
            edges: edges
                .into_iter()
                .map(|e| Edge {
                    src: e.src,
                    gen: e.gen,
                    dst: e.dst,
                })
                .collect(),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for e in &self.edges {
            adj[e.src].push(e.dst);
            adj[e.dst].push(e.src);
        }
        let mut seen = vec![false; self.num_vertices];
        seen[self.base] = true;
        let mut stack = vec![self.base];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// No vertex has two outgoing, or two incoming, edges with one label.
    pub fn is_folded(&self) -> bool {
        let spv = 2 * self.alphabet.rank();
        let mut used = vec![false; self.num_vertices * spv];
        for e in &self.edges {
            let l = Letter::gen(e.gen);
            for idx in [e.src * spv + l.slot(), e.dst * spv + l.inverse().slot()] {
                if std::mem::replace(&mut used[idx], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Every vertex other than the basepoint has degree at least two.
    pub fn is_core(&self) -> bool {
        let mut degree = vec![0usize; self.num_vertices];
        for e in &self.edges {
            degree[e.src] += 1;
            degree[e.dst] += 1;
        }
        degree
            .iter()
            .enumerate()
            .all(|(v, &d)| v == self.base || d >= 2)
    }

    fn to_vgraph(&self) -> VGraph<()> {
        VGraph {
            num_vertices: self.num_vertices,
            base: self.base,
            edges: self
                .edges
                .iter()
                .map(|e| VEdge {
                    src: e.src,
                    gen: e.gen,
                    dst: e.dst,
                    volt: (),
                })
                .collect(),
        }
    }

    fn from_vgraph(alphabet: Alphabet, g: VGraph<()>) -> Self {
        LabeledGraph {
            alphabet,
            num_vertices: g.num_vertices,
            base: g.base,
            edges: g
                .edges
                .into_iter()
                .map(|e| Edge {
                    src: e.src,
                    gen: e.gen,
                    dst: e.dst,
                })
                .collect(),
        }
    }

    /// Folds until deterministic; the result is canonically numbered.
    pub fn fold(&self) -> LabeledGraph {
        let rank = self.alphabet.rank();
        let folded = self.to_vgraph().fold(&NoVoltage, rank).graph.canonical(rank);
        Self::from_vgraph(self.alphabet, folded)
    }

    /// Removes hanging trees. Unfolded input is folded first.
    pub fn trim_core(&self) -> LabeledGraph {
        let rank = self.alphabet.rank();
        let g = if self.is_folded() { self.to_vgraph() } else { self.fold().to_vgraph() };
        Self::from_vgraph(self.alphabet, g.trim_core().canonical(rank))
    }

    pub fn to_subgroup_graph(&self) -> SubgroupGraph {
        let core = self.trim_core();
        SubgroupGraph::from_canonical(core.alphabet, core.num_vertices, core.edges)
    }

    /// Follows `w` deterministically from the basepoint. Only meaningful for
    /// folded graphs.
    pub fn accepts(&self, w: &Word) -> Result<bool> {
        self.alphabet.check_word(w)?;
        let mut v = self.base;
        for l in w.letters() {
            let next = self.edges.iter().find_map(|e| {
                if e.gen != l.index() {
                    None
                } else if !l.is_inverse() && e.src == v {
                    Some(e.dst)
                } else if l.is_inverse() && e.dst == v {
                    Some(e.src)
                } else {
                    None
                }
            });
            match next {
                Some(n) => v = n,
                None => return Ok(false),
            }
        }
        Ok(v == self.base)
    }
}

/// Builds petal edges for a bouquet. Each petal carries its voltage on the
/// first edge, negated when that edge is traversed backwards.
pub(crate) fn petals<'w, G, I>(group: &G, alphabet: Alphabet, gens: I) -> Result<(usize, Vec<VEdge<G::Elem>>)>
where
    G: VoltageGroup,
    I: IntoIterator<Item = (&'w Word, G::Elem)>,
{
    let mut num_vertices = 1;
    let mut edges = Vec::new();
    for (w, volt) in gens {
        alphabet.check_word(w)?;
        let len = w.len();
        let mut prev = 0;
        for (i, l) in w.letters().iter().enumerate() {
            let next = if i + 1 == len {
                0
            } else {
                num_vertices += 1;
                num_vertices - 1
            };
            let v = if i > 0 {
                group.zero()
            } else if l.is_inverse() {
                group.neg(&volt)
            } else {
                volt.clone()
            };
            let (src, dst) = if l.is_inverse() { (next, prev) } else { (prev, next) };
            edges.push(VEdge { src, gen: l.index(), dst, volt: v });
            prev = next;
        }
    }
    Ok((num_vertices, edges))
}

/// A folded core graph representing a subgroup `H ≤ F_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGraph {
    alphabet: Alphabet,
    num_vertices: usize,
    edges: Vec<Edge>,
    /// `slots[v * 2n + letter.slot()]`: where `letter` leads from `v`.
    slots: Vec<Option<usize>>,
    /// Basis index of each non-tree edge, keyed by `src * n + gen`.
    non_tree: Vec<Option<usize>>,
    /// Tree path from the basepoint to each vertex.
    prefix: Vec<Word>,
    basis: Vec<Word>,
}

impl SubgroupGraph {
    pub(crate) fn from_canonical(alphabet: Alphabet, num_vertices: usize, edges: Vec<Edge>) -> Self {
        let n = alphabet.rank();
        let spv = 2 * n;
        let mut slots = vec![None; num_vertices * spv];
        for e in &edges {
            let l = Letter::gen(e.gen);
            slots[e.src * spv + l.slot()] = Some(e.dst);
            slots[e.dst * spv + l.inverse().slot()] = Some(e.src);
        }

        // breadth-first spanning tree in slot order
        let mut prefix: Vec<Option<Word>> = vec![None; num_vertices];
        let mut tree_edge = vec![false; num_vertices * n];
        prefix[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        let mut order = Vec::with_capacity(num_vertices);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for s in 0..spv {
                let Some(w) = slots[v * spv + s] else { continue };
                if prefix[w].is_some() {
                    continue;
                }
                let l = Letter::from_slot(s);
                let key = if l.is_inverse() { w * n + l.index() } else { v * n + l.index() };
                tree_edge[key] = true;
                prefix[w] = Some(prefix[v].as_ref().unwrap().multiply(&Word::letter(l)));
                queue.push_back(w);
            }
        }
        let prefix: Vec<Word> = prefix.into_iter().map(|p| p.expect("connected")).collect();

        // non-tree edges in order of first discovery during the same search
        let mut non_tree = vec![None; num_vertices * n];
        let mut basis = Vec::new();
        for &v in &order {
            for s in 0..spv {
                let Some(w) = slots[v * spv + s] else { continue };
                let l = Letter::from_slot(s);
                let (src, dst) = if l.is_inverse() { (w, v) } else { (v, w) };
                let key = src * n + l.index();
                if tree_edge[key] || non_tree[key].is_some() {
                    continue;
                }
                non_tree[key] = Some(basis.len());
                basis.push(
                    prefix[src]
                        .multiply(&Word::letter(Letter::gen(l.index())))
                        .multiply(&prefix[dst].invert()),
                );
            }
        }
        SubgroupGraph {
            alphabet,
            num_vertices,
            edges,
            slots,
            non_tree,
            prefix,
            basis,
        }
    }

    pub fn from_generators(alphabet: Alphabet, gens: &[Word]) -> Result<Self> {
        Ok(LabeledGraph::bouquet(alphabet, gens)?.to_subgroup_graph())
    }

    /// The whole group `F_n`: one vertex with a loop per generator.
    pub fn whole(alphabet: Alphabet) -> Self {
        let gens: Vec<Word> = alphabet.generators().map(Word::letter).collect();
        Self::from_generators(alphabet, &gens).expect("generators lie in the alphabet")
    }

    pub fn trivial(alphabet: Alphabet) -> Self {
        Self::from_canonical(alphabet, 1, Vec::new())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Edges sorted by `(src, gen)`; the basepoint is vertex 0.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn to_labeled(&self) -> LabeledGraph {
        LabeledGraph {
            alphabet: self.alphabet,
            num_vertices: self.num_vertices,
            base: 0,
            edges: self.edges.clone(),
        }
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.index() >= self.alphabet.rank() {
            return None;
        }
        self.slots[v * 2 * self.alphabet.rank() + l.slot()]
    }

    /// End vertex of the path labelled `w` from the basepoint, if it exists.
    pub fn trace(&self, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(0, |v, &l| self.step(v, l))
    }

    pub fn membership(&self, w: &Word) -> Result<bool> {
        self.alphabet.check_word(w)?;
        Ok(self.trace(w) == Some(0))
    }

    /// `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices
    }

    /// Every vertex has every label both incoming and outgoing.
    pub fn is_complete(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    pub fn index(&self) -> Index {
        if self.is_complete() {
            Index::Finite(self.num_vertices)
        } else {
            Index::Infinite
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    /// Free basis from the breadth-first spanning tree, one word per non-tree edge.
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Word from the basepoint to `v` along the spanning tree.
    pub fn tree_path(&self, v: usize) -> &Word {
        &self.prefix[v]
    }

    /// Rewrites a member `w` in the basis. The result is a word over an
    /// alphabet of rank `self.rank()`, letter `i` standing for `basis()[i]`.
    pub fn express_in_basis(&self, w: &Word) -> Result<Word> {
        self.alphabet.check_word(w)?;
        let n = self.alphabet.rank();
        let mut v = 0;
        let mut out = Vec::new();
        for &l in w.letters() {
            let next = self.step(v, l).ok_or(Error::NotAMember)?;
            let key = if l.is_inverse() { next * n + l.index() } else { v * n + l.index() };
            if let Some(i) = self.non_tree[key] {
                out.push(if l.is_inverse() { Letter::gen_inv(i) } else { Letter::gen(i) });
            }
            v = next;
        }
        if v != 0 {
            return Err(Error::NotAMember);
        }
        Ok(Word::from_letters(out))
    }

    /// Based fiber product: the Stallings graph of `self ∩ other`.
    pub fn pullback(&self, other: &SubgroupGraph) -> Result<SubgroupGraph> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.rank(),
                right: other.alphabet.rank(),
            });
        }
        let n = self.alphabet.rank();
        let mut ids: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
        let mut states = vec![(0usize, 0usize)];
        let mut edges = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (u, v) = states[i];
            for g in 0..n {
                let l = Letter::gen(g);
                if let (Some(u2), Some(v2)) = (self.step(u, l), other.step(v, l)) {
                    let next = ids.len();
                    let id = *ids.entry((u2, v2)).or_insert_with(|| {
                        states.push((u2, v2));
                        next
                    });
                    edges.push(Edge { src: i, gen: g, dst: id });
                }
                // incoming edges reach the same component
                let li = l.inverse();
                if let (Some(u2), Some(v2)) = (self.step(u, li), other.step(v, li)) {
                    if !ids.contains_key(&(u2, v2)) {
                        let next = ids.len();
                        ids.insert((u2, v2), next);
                        states.push((u2, v2));
                    }
                }
            }
            i += 1;
        }
        let g = LabeledGraph {
            alphabet: self.alphabet,
            num_vertices: states.len(),
            base: 0,
            edges,
        };
        debug_assert!(g.is_folded());
        Ok(g.to_subgroup_graph())
    }

    /// Voltage of each edge for a homomorphism given on the basis: zero on
    /// tree edges, the basis image on non-tree edges.
    fn edge_voltages(&self, group: &AbGroup, images: &[AbElement]) -> Vec<AbElement> {
        let n = self.alphabet.rank();
        self.edges
            .iter()
            .map(|e| match self.non_tree[e.src * n + e.gen] {
                Some(i) => images[i].clone(),
                None => group.zero(),
            })
            .collect()
    }

    /// Stallings graph of `q⁻¹(target)` where `q` maps `basis()[i]` to
    /// `images[i]` in `group`, built as the derived covering.
    pub fn finite_quotient_preimage(
        &self,
        group: &AbGroup,
        images: &[AbElement],
        target: &AbSubgroup,
    ) -> Result<Covering> {
        if target.ambient() != group {
            return Err(Error::AmbientMismatch);
        }
        if images.len() != self.rank() {
            return Err(Error::HomomorphismArity {
                expected: self.rank(),
                got: images.len(),
            });
        }
        for x in images {
            group.check(x)?;
        }
        let n = self.alphabet.rank();
        let volts = self.edge_voltages(group, images);
        // outgoing and incoming edge lists per vertex, in slot order
        let mut by_slot: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            by_slot[e.src].push((Letter::gen(e.gen).slot(), i));
            by_slot[e.dst].push((Letter::gen_inv(e.gen).slot(), i));
        }
        for list in by_slot.iter_mut() {
            list.sort_unstable();
        }

        let start = (0usize, target.reduce(&group.zero())?);
        let mut ids: HashMap<(usize, AbElement), usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut edges = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let (v, c) = states[i].clone();
            for &(slot, ei) in &by_slot[v] {
                let e = self.edges[ei];
                let forward = slot % 2 == 0;
                let (w, c2) = if forward {
                    (e.dst, target.reduce(&group.add(&c, &volts[ei]))?)
                } else {
                    (e.src, target.reduce(&group.sub(&c, &volts[ei]))?)
                };
                let id = match ids.get(&(w, c2.clone())) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        ids.insert((w, c2.clone()), id);
                        states.push((w, c2));
                        id
                    }
                };
                if forward {
                    edges.push(Edge { src: i, gen: e.gen, dst: id });
                }
            }
            i += 1;
        }
        let degree = states.iter().filter(|(v, _)| *v == 0).count();
        let g = LabeledGraph {
            alphabet: self.alphabet,
            num_vertices: states.len(),
            base: 0,
            edges,
        };
        debug_assert!(g.is_folded());
        debug_assert_eq!(n, self.alphabet.rank());
        Ok(Covering {
            graph: g.to_subgroup_graph(),
            degree,
        })
    }
}

/// Result of [`SubgroupGraph::finite_quotient_preimage`]: the preimage and
/// its index in the covered subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    pub graph: SubgroupGraph,
    pub degree: usize,
}

impl fmt::Display for SubgroupGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {} (base 0)", self.num_vertices)?;
        for e in &self.edges {
            writeln!(f, "{} -{}-> {}", e.src, Letter::gen(e.gen), e.dst)?;
        }
        Ok(())
    }
}
