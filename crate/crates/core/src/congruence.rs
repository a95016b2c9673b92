//! Congruences of finite lattices.
//!
//! Congruences are stored as partitions in canonical form: every element is
//! labelled with the least element of its block. The whole congruence lattice
//! is built from the principal congruences of prime intervals, which are
//! exactly its join-irreducible members.

use std::collections::{HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;

use crate::lattice::{Elem, Embedding, IntervalRef, Lattice};
use crate::planar::{boundary_chains, PlanarDiagram, PlanarError};

/// A partition of `0..n` labelled by least block members.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    block_of: Vec<Elem>,
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence{:?}", self.blocks())
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        f.write_str(&blocks.join(" "))
    }
}

impl Congruence {
    /// The identity partition Δ.
    pub fn identity(n: usize) -> Self {
        Self { block_of: (0..n).collect() }
    }

    /// The one-block partition ∇.
    pub fn full(n: usize) -> Self {
        Self { block_of: vec![0; n] }
    }

    /// Partition from explicit blocks; unlisted elements are singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<Elem>]) -> Self {
        let mut uf = UnionFind::new(n);
        for b in blocks {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        Self::from_union_find(&uf, n)
    }

    /// Partition from an arbitrary block labelling.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Self {
        let mut first: HashMap<&T, Elem> = HashMap::new();
        let block_of = labels
            .iter()
            .enumerate()
            .map(|(x, t)| *first.entry(t).or_insert(x))
            .collect();
        Self { block_of }
    }

    fn from_union_find(uf: &UnionFind<usize>, n: usize) -> Self {
        let mut rep_of_root = vec![usize::MAX; n];
        let block_of = (0..n)
            .map(|x| {
                let r = uf.find(x);
                if rep_of_root[r] == usize::MAX {
                    rep_of_root[r] = x;
                }
                rep_of_root[r]
            })
            .collect();
        Self { block_of }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    /// Least element of the block of `x`.
    pub fn block_of(&self, x: Elem) -> Elem {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[Elem] {
        &self.block_of
    }

    pub fn same(&self, x: Elem, y: Elem) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn collapses(&self, iv: IntervalRef) -> bool {
        self.same(iv.lo, iv.hi)
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of.iter().enumerate().filter(|&(x, &b)| x == b).count()
    }

    /// Blocks ordered by least element, members ascending.
    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut index = vec![usize::MAX; self.len()];
        let mut out: Vec<Vec<Elem>> = Vec::new();
        for (x, &b) in self.block_of.iter().enumerate() {
            if b == x {
                index[x] = out.len();
                out.push(Vec::new());
            }
            out[index[b]].push(x);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.block_of.iter().enumerate().all(|(x, &b)| x == b)
    }

    pub fn is_full(&self) -> bool {
        self.block_of.iter().all(|&b| b == 0)
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        self.block_of
            .iter()
            .enumerate()
            .all(|(x, &b)| other.same(x, b))
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let n = self.len();
        let mut uf = UnionFind::new(n);
        for x in 0..n {
            uf.union(x, self.block_of[x]);
            uf.union(x, other.block_of[x]);
        }
        Self::from_union_find(&uf, n)
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let pairs: Vec<(Elem, Elem)> = self
            .block_of
            .iter()
            .zip(&other.block_of)
            .map(|(&a, &b)| (a, b))
            .collect();
        Self::from_labels(&pairs)
    }

    /// Full substitution-property check against `l`.
    pub fn is_congruence_of(&self, l: &Lattice) -> bool {
        if self.len() != l.len() {
            return false;
        }
        (0..l.len()).all(|x| {
            let y = self.block_of[x];
            x == y
                || l.elements().all(|z| {
                    self.same(l.join(x, z), l.join(y, z)) && self.same(l.meet(x, z), l.meet(y, z))
                })
        })
    }

    /// Pullback along an embedding: `x ≡ y` iff `e(x) ≡ e(y)`.
    pub fn pullback(&self, e: &Embedding) -> Congruence {
        let labels: Vec<Elem> = e.map().iter().map(|&y| self.block_of[y]).collect();
        Self::from_labels(&labels)
    }

    /// Pairs `(least, x)` for every non-least block member.
    pub fn generating_pairs(&self) -> Vec<(Elem, Elem)> {
        self.block_of
            .iter()
            .enumerate()
            .filter(|&(x, &b)| x != b)
            .map(|(x, &b)| (b, x))
            .collect()
    }
}

/// The least congruence collapsing every pair in `pairs`.
pub fn generated_congruence(l: &Lattice, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = l.len();
    let mut uf = UnionFind::new(n);
    // Every pair that merged two classes is also translated; the classes are
    // the equivalence closure of those pairs, so closing them suffices.
    let mut work: Vec<(Elem, Elem)> = pairs
        .iter()
        .copied()
        .filter(|&(a, b)| uf.union(a, b))
        .collect();
    while let Some((x, y)) = work.pop() {
        for z in 0..n {
            let (p, q) = (l.join(x, z), l.join(y, z));
            if uf.union(p, q) {
                work.push((p, q));
            }
            let (p, q) = (l.meet(x, z), l.meet(y, z));
            if uf.union(p, q) {
                work.push((p, q));
            }
        }
    }
    Congruence::from_union_find(&uf, n)
}

/// `con(a, b)`.
pub fn principal_congruence(l: &Lattice, a: Elem, b: Elem) -> Congruence {
    generated_congruence(l, &[(a, b)])
}

/// A congruence restricted to an ordered subset of the elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialCongruence {
    domain: Vec<Elem>,
    /// `block[i]` is the first position in `domain` of the block of `domain[i]`.
    block: Vec<usize>,
}

impl PartialCongruence {
    pub fn identity(domain: Vec<Elem>) -> Self {
        let block = (0..domain.len()).collect();
        Self { domain, block }
    }

    pub fn full(domain: Vec<Elem>) -> Self {
        let block = vec![0; domain.len()];
        Self { domain, block }
    }

    /// Blocks given by element ids; elements of `domain` not listed are singletons.
    /// Listed elements outside `domain` are ignored.
    pub fn from_blocks(domain: Vec<Elem>, blocks: &[Vec<Elem>]) -> Self {
        let pos: HashMap<Elem, usize> = domain.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut block: Vec<usize> = (0..domain.len()).collect();
        for b in blocks {
            let mut members: Vec<usize> = b.iter().filter_map(|x| pos.get(x).copied()).collect();
            members.sort_unstable();
            if let Some(&first) = members.first() {
                for &m in &members {
                    block[m] = first;
                }
            }
        }
        // Re-canonicalise in case listed blocks overlapped.
        let labels: Vec<usize> = block;
        let mut first: HashMap<usize, usize> = HashMap::new();
        let block = labels
            .iter()
            .enumerate()
            .map(|(i, l)| *first.entry(*l).or_insert(i))
            .collect();
        Self { domain, block }
    }

    /// On a chain domain: the partition collapsing exactly the listed steps
    /// `[domain[i], domain[i+1]]`.
    pub fn from_chain_steps(domain: Vec<Elem>, steps: &[usize]) -> Self {
        let mut block: Vec<usize> = (0..domain.len()).collect();
        let collapsed: HashSet<usize> = steps.iter().copied().collect();
        for i in 1..domain.len() {
            if collapsed.contains(&(i - 1)) {
                block[i] = block[i - 1];
            }
        }
        Self { domain, block }
    }

    pub fn domain(&self) -> &[Elem] {
        &self.domain
    }

    pub fn same_at(&self, i: usize, j: usize) -> bool {
        self.block[i] == self.block[j]
    }

    /// Whether the step `[domain[i], domain[i+1]]` is collapsed.
    pub fn collapses_step(&self, i: usize) -> bool {
        self.same_at(i, i + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.block.iter().enumerate().all(|(i, &b)| i == b)
    }

    /// Blocks are runs of consecutive positions (a congruence of a chain domain).
    pub fn is_convex(&self) -> bool {
        let mut seen_closed: HashSet<usize> = HashSet::new();
        for i in 0..self.block.len() {
            if i > 0 && self.block[i] != self.block[i - 1] {
                seen_closed.insert(self.block[i - 1]);
            }
            if seen_closed.contains(&self.block[i]) {
                return false;
            }
        }
        true
    }

    /// Blocks as element lists, in domain order.
    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<Elem>> = Vec::new();
        for (i, &b) in self.block.iter().enumerate() {
            let k = *index.entry(b).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[k].push(self.domain[i]);
        }
        out
    }

    /// Element pairs whose equivalence closure is this partition.
    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        self.block
            .iter()
            .enumerate()
            .filter(|&(i, &b)| i != b)
            .map(|(i, &b)| (self.domain[b], self.domain[i]))
            .collect()
    }
}

/// `θ` restricted to `domain`.
pub fn restrict(theta: &Congruence, domain: &[Elem]) -> PartialCongruence {
    let labels: Vec<Elem> = domain.iter().map(|&x| theta.block_of(x)).collect();
    let mut first: HashMap<Elem, usize> = HashMap::new();
    let block = labels
        .iter()
        .enumerate()
        .map(|(i, l)| *first.entry(*l).or_insert(i))
        .collect();
    PartialCongruence { domain: domain.to_vec(), block }
}

/// Restrictions of `θ` to the lower-left and lower-right boundary chains.
pub fn boundary_pair(
    d: &PlanarDiagram,
    theta: &Congruence,
) -> Result<(PartialCongruence, PartialCongruence), PlanarError> {
    let bc = boundary_chains(d)?;
    Ok((restrict(theta, &bc.c_ll), restrict(theta, &bc.c_lr)))
}

/// `con(pl ∪ pr)` for partitions of the two lower boundary chains.
pub fn reconstruct_from_pair(
    d: &PlanarDiagram,
    pl: &PartialCongruence,
    pr: &PartialCongruence,
) -> Result<Congruence, PlanarError> {
    let bc = boundary_chains(d)?;
    if pl.domain() != bc.c_ll.as_slice() || pr.domain() != bc.c_lr.as_slice() {
        return Err(PlanarError::DomainMismatch);
    }
    let mut pairs = pl.pairs();
    pairs.extend(pr.pairs());
    Ok(generated_congruence(d.lattice(), &pairs))
}

/// The congruence lattice `Con L`.
#[derive(Debug, Clone)]
pub struct ConLattice {
    congruences: Vec<Congruence>,
    /// Per congruence, the join-irreducibles below it (by ji index).
    ji_sets: Vec<FixedBitSet>,
    /// Congruence index of each join-irreducible.
    ji: Vec<usize>,
    ji_flags: Vec<bool>,
    /// Cover `(a, b)` → ji index of `con(a, b)`.
    prime_ji: HashMap<(Elem, Elem), usize>,
    by_set: HashMap<FixedBitSet, usize>,
    by_partition: HashMap<Congruence, usize>,
}

/// The join-irreducible congruences of `l` with the ji index of each cover.
pub(crate) struct JiStructure {
    pub ji: Vec<Congruence>,
    /// `below[i]` = ji indices j with `ji[j] ⊆ ji[i]`.
    pub below: Vec<FixedBitSet>,
    pub prime_ji: HashMap<(Elem, Elem), usize>,
}

impl JiStructure {
    pub fn new(l: &Lattice) -> Self {
        let covers = l.covers();
        let index: HashMap<(Elem, Elem), usize> =
            covers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        // Prime intervals opposite in a covering square are perspective and
        // generate the same congruence.
        let mut uf = UnionFind::new(covers.len());
        for o in l.elements() {
            let ups = l.upper_covers(o);
            for (i, &p) in ups.iter().enumerate() {
                for &q in &ups[i + 1..] {
                    let t = l.join(p, q);
                    if l.is_cover(p, t) && l.is_cover(q, t) {
                        uf.union(index[&(o, p)], index[&(q, t)]);
                        uf.union(index[&(o, q)], index[&(p, t)]);
                    }
                }
            }
        }
        let mut class_con: HashMap<usize, Congruence> = HashMap::new();
        for (i, &(a, b)) in covers.iter().enumerate() {
            let root = uf.find(i);
            class_con
                .entry(root)
                .or_insert_with(|| principal_congruence(l, a, b));
        }
        let mut ji: Vec<Congruence> = class_con.values().cloned().collect();
        ji.sort();
        ji.dedup();
        let ji_index: HashMap<&Congruence, usize> =
            ji.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let prime_ji = covers
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, ji_index[&class_con[&uf.find(i)]]))
            .collect();
        let k = ji.len();
        let below = (0..k)
            .map(|i| {
                let mut set = FixedBitSet::with_capacity(k);
                for j in 0..k {
                    if ji[j].refines(&ji[i]) {
                        set.insert(j);
                    }
                }
                set
            })
            .collect();
        Self { ji, below, prime_ji }
    }

    /// Refinement order among the join-irreducibles.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j].contains(i)
    }
}

impl ConLattice {
    pub fn new(l: &Lattice) -> Self {
        let js = JiStructure::new(l);
        let k = js.ji.len();
        let n = l.len();

        // Every congruence is the join of the ji congruences below it, so the
        // members of Con L are the down-sets of the ji poset.
        let mut sets: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(k)];
        let mut seen: HashSet<FixedBitSet> = sets.iter().cloned().collect();
        for i in 0..k {
            let snapshot = sets.len();
            for s in 0..snapshot {
                let mut next = sets[s].clone();
                next.union_with(&js.below[i]);
                if seen.insert(next.clone()) {
                    sets.push(next);
                }
            }
        }

        let mut members: Vec<(FixedBitSet, Congruence)> = sets
            .into_iter()
            .map(|set| {
                let mut uf = UnionFind::new(n);
                for j in set.ones() {
                    for (x, &b) in js.ji[j].labels().iter().enumerate() {
                        uf.union(x, b);
                    }
                }
                let con = Congruence::from_union_find(&uf, n);
                (set, con)
            })
            .collect();
        members.sort_by(|a, b| {
            a.0.count_ones(..)
                .cmp(&b.0.count_ones(..))
                .then_with(|| a.1.cmp(&b.1))
        });

        let by_set: HashMap<FixedBitSet, usize> = members
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (s.clone(), i))
            .collect();
        let ji: Vec<usize> = js.below.iter().map(|s| by_set[s]).collect();
        let mut ji_flags = vec![false; members.len()];
        for &i in &ji {
            ji_flags[i] = true;
        }
        let (ji_sets, congruences): (Vec<_>, Vec<_>) = members.into_iter().unzip();
        let by_partition = congruences
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        Self {
            congruences,
            ji_sets,
            ji,
            ji_flags,
            prime_ji: js.prime_ji,
            by_set,
            by_partition,
        }
    }

    /// All congruences: Δ first, ∇ last.
    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn index_of(&self, theta: &Congruence) -> Option<usize> {
        self.by_partition.get(theta).copied()
    }

    /// Refinement order.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.ji_sets[i].is_subset(&self.ji_sets[j])
    }

    pub fn is_join_irreducible(&self, i: usize) -> bool {
        self.ji_flags[i]
    }

    pub fn ji_flags(&self) -> &[bool] {
        &self.ji_flags
    }

    /// Indices of the join-irreducible congruences.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        let mut out = self.ji.clone();
        out.sort_unstable();
        out
    }

    /// Index of `con(a, b)` for a cover `a ≺ b`.
    pub fn prime_congruence(&self, a: Elem, b: Elem) -> Option<usize> {
        self.prime_ji.get(&(a, b)).map(|&j| self.ji[j])
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        let mut s = self.ji_sets[i].clone();
        s.union_with(&self.ji_sets[j]);
        self.by_set[&s]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        let mut s = self.ji_sets[i].clone();
        s.intersect_with(&self.ji_sets[j]);
        self.by_set[&s]
    }

    /// The refinement order as a lattice whose element `i` is congruence `i`.
    pub fn as_lattice(&self) -> Lattice {
        let m = self.len();
        let mut covers = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j && self.leq(i, j) {
                    let between = (0..m).any(|k| {
                        k != i && k != j && self.leq(i, k) && self.leq(k, j)
                    });
                    if !between {
                        covers.push((i, j));
                    }
                }
            }
        }
        Lattice::from_covers(m, &covers).expect("congruences form a lattice")
    }

    /// For each congruence, some `[a, b]` with `con(a, b)` equal to it.
    pub fn principal_witnesses(&self, l: &Lattice) -> Vec<Option<IntervalRef>> {
        let k = self.ji.len();
        let mut out: Vec<Option<IntervalRef>> = vec![None; self.len()];
        let mut remaining = self.len();
        let below: Vec<&FixedBitSet> = self.ji.iter().map(|&c| &self.ji_sets[c]).collect();
        let mut sets: Vec<Option<FixedBitSet>> = vec![None; l.len()];
        for a in l.elements() {
            if remaining == 0 {
                break;
            }
            sets.iter_mut().for_each(|s| *s = None);
            sets[a] = Some(FixedBitSet::with_capacity(k));
            // con(a, y) is the join of con over the steps of any maximal chain.
            for &x in l.linear_extension() {
                let Some(sx) = sets[x].clone() else { continue };
                for &y in l.upper_covers(x) {
                    if sets[y].is_none() {
                        let mut s = sx.clone();
                        s.union_with(below[self.prime_ji[&(x, y)]]);
                        sets[y] = Some(s);
                    }
                }
                let c = self.by_set[&sx];
                if out[c].is_none() {
                    out[c] = Some(IntervalRef::new(a, x));
                    remaining -= 1;
                }
            }
        }
        out
    }

    /// The maximal join-irreducibles below `θ`, ascending canonical order.
    pub fn join_decomposition(&self, theta: &Congruence) -> Option<Vec<Congruence>> {
        let i = self.index_of(theta)?;
        let set = &self.ji_sets[i];
        let mut parts: Vec<Congruence> = set
            .ones()
            .filter(|&j| {
                !set.ones()
                    .any(|h| h != j && self.ji_sets[self.ji[h]].contains(j))
            })
            .map(|j| self.congruences[self.ji[j]].clone())
            .collect();
        parts.sort();
        Some(parts)
    }
}

/// The full congruence lattice of `l`.
pub fn con_lattice(l: &Lattice) -> ConLattice {
    ConLattice::new(l)
}

/// Result of [`is_all_principal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalCheck {
    pub all_principal: bool,
    /// A congruence that is not `con(a, b)` for any pair, if one exists.
    pub counterexample: Option<Congruence>,
}

/// Whether every congruence of `l` is principal.
pub fn is_all_principal(l: &Lattice) -> PrincipalCheck {
    let cl = ConLattice::new(l);
    let witnesses = cl.principal_witnesses(l);
    let counterexample = witnesses
        .iter()
        .position(Option::is_none)
        .map(|i| cl.get(i).clone());
    PrincipalCheck {
        all_principal: counterexample.is_none(),
        counterexample,
    }
}

/// Join-decomposition of `θ` into maximal join-irreducibles below it.
pub fn join_decomposition(cl: &ConLattice, theta: &Congruence) -> Option<Vec<Congruence>> {
    cl.join_decomposition(theta)
}

/// Restriction `Con(target) → Con(source)` is a bijection.
pub fn is_congruence_preserving_extension(e: &Embedding) -> bool {
    let source = ConLattice::new(e.source());
    let target = ConLattice::new(e.target());
    if source.len() != target.len() {
        return false;
    }
    let mut hit = vec![false; source.len()];
    for theta in target.congruences() {
        match source.index_of(&theta.pullback(e)) {
            Some(i) if !hit[i] => hit[i] = true,
            _ => return false,
        }
    }
    true
}

/// Covers of the source map to covers of the target.
pub fn is_cover_preserving_extension(e: &Embedding) -> bool {
    e.source()
        .covers()
        .iter()
        .all(|&(a, b)| e.target().is_cover(e.apply(a), e.apply(b)))
}
