//! Finite lattices given by their cover (Hasse) relation.
//!
//! A [`Lattice`] is validated once at construction: the reflexive-transitive
//! closure of the covers must be a bounded partial order in which every pair
//! has a join and a meet. Join and meet tables are filled eagerly, so every
//! later query is a table lookup.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Element ids are dense: `0..n`.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("element {elem} is out of range for {n} elements")]
    InvalidElement { elem: Elem, n: usize },
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("cover ({0}, {1}) is redundant; the cover list must be a Hasse relation")]
    NotHasse(Elem, Elem),
    #[error("no unique {0}")]
    Disconnected(&'static str),
    #[error("[{0}, {1}] is not a prime interval")]
    NotPrime(Elem, Elem),
    #[error("interval [{0}, {1}] is not a chain")]
    NotAChain(Elem, Elem),
    #[error("{0} is not below {1}")]
    NotBelow(Elem, Elem),
    #[error("not a lattice embedding: {0}")]
    NotAnEmbedding(String),
}

/// A finite lattice on the elements `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    n: usize,
    upper: Vec<Vec<Elem>>,
    lower: Vec<Vec<Elem>>,
    /// A linear extension of the order, bottom first.
    linear: Vec<Elem>,
    join: Vec<u32>,
    meet: Vec<u32>,
    bottom: Elem,
    top: Elem,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("n", &self.n)
            .field("covers", &self.covers())
            .finish()
    }
}

impl Lattice {
    /// Builds and validates a lattice from its cover pairs `(a, b)`, meaning `a ≺ b`.
    pub fn from_covers(n: usize, cover_pairs: &[(Elem, Elem)]) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for &(a, b) in cover_pairs {
            for e in [a, b] {
                if e >= n {
                    return Err(LatticeError::InvalidElement { elem: e, n });
                }
            }
            if a == b {
                return Err(LatticeError::NotALattice(format!("{a} cannot cover itself")));
            }
            upper[a].push(b);
            lower[b].push(a);
        }
        for (a, ups) in upper.iter_mut().enumerate() {
            ups.sort_unstable();
            if let Some(w) = ups.windows(2).find(|w| w[0] == w[1]) {
                return Err(LatticeError::NotHasse(a, w[0]));
            }
        }
        for downs in lower.iter_mut() {
            downs.sort_unstable();
        }

        // Kahn's algorithm; ties broken by id so the extension is deterministic.
        let mut indeg: Vec<usize> = lower.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<Elem> =
            (0..n).filter(|&x| indeg[x] == 0).collect();
        let minima = ready.len();
        let mut linear = Vec::with_capacity(n);
        while let Some(x) = ready.pop_first() {
            linear.push(x);
            for &y in &upper[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.insert(y);
                }
            }
        }
        if linear.len() < n {
            return Err(LatticeError::NotALattice("the cover relation has a cycle".into()));
        }
        if minima != 1 {
            return Err(LatticeError::Disconnected("bottom"));
        }
        let maxima: Vec<Elem> = (0..n).filter(|&x| upper[x].is_empty()).collect();
        if maxima.len() != 1 {
            return Err(LatticeError::Disconnected("top"));
        }

        // Up- and down-sets are indexed by position in `linear`, so the first
        // common upper bound in bit order is the only candidate for the join.
        let mut rank = vec![0usize; n];
        for (i, &x) in linear.iter().enumerate() {
            rank[x] = i;
        }
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for &x in linear.iter().rev() {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(rank[x]);
            for &y in &upper[x] {
                set.union_with(&up[y]);
            }
            up[x] = set;
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for &x in &linear {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(rank[x]);
            for &y in &lower[x] {
                set.union_with(&down[y]);
            }
            down[x] = set;
        }

        for (x, covers) in upper.iter().enumerate() {
            for &c1 in covers {
                for &c2 in covers {
                    if c1 != c2 && up[c1].contains(rank[c2]) {
                        return Err(LatticeError::NotHasse(x, c2));
                    }
                }
            }
        }

        let mut join = vec![0u32; n * n];
        let mut meet = vec![0u32; n * n];
        let mut common = FixedBitSet::with_capacity(n);
        for x in 0..n {
            join[x * n + x] = x as u32;
            meet[x * n + x] = x as u32;
            for y in x + 1..n {
                common.clone_from(&up[x]);
                common.intersect_with(&up[y]);
                let z = common
                    .minimum()
                    .map(|r| linear[r])
                    .filter(|&z| common.is_subset(&up[z]))
                    .ok_or_else(|| {
                        LatticeError::NotALattice(format!("{x} and {y} have no least upper bound"))
                    })?;
                join[x * n + y] = z as u32;
                join[y * n + x] = z as u32;

                common.clone_from(&down[x]);
                common.intersect_with(&down[y]);
                let z = common
                    .maximum()
                    .map(|r| linear[r])
                    .filter(|&z| common.is_subset(&down[z]))
                    .ok_or_else(|| {
                        LatticeError::NotALattice(format!("{x} and {y} have no greatest lower bound"))
                    })?;
                meet[x * n + y] = z as u32;
                meet[y * n + x] = z as u32;
            }
        }

        Ok(Self {
            n,
            bottom: linear[0],
            top: maxima[0],
            upper,
            lower,
            linear,
            join,
            meet,
        })
    }

    /// The chain `0 < 1 < … < len-1`.
    pub fn chain(len: usize) -> Result<Self, LatticeError> {
        let covers: Vec<_> = (1..len).map(|i| (i - 1, i)).collect();
        Self::from_covers(len, &covers)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.n
    }

    /// All cover pairs, sorted.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for (a, ups) in self.upper.iter().enumerate() {
            out.extend(ups.iter().map(|&b| (a, b)));
        }
        out
    }

    pub fn num_covers(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// Upper covers of `x`, ascending by id.
    pub fn upper_covers(&self, x: Elem) -> &[Elem] {
        &self.upper[x]
    }

    /// Lower covers of `x`, ascending by id.
    pub fn lower_covers(&self, x: Elem) -> &[Elem] {
        &self.lower[x]
    }

    /// Elements bottom first, every element after all elements below it.
    pub fn linear_extension(&self) -> &[Elem] {
        &self.linear
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.n + y] as Elem
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.n + y] as Elem
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.join(x, y) == y
    }

    #[inline]
    pub fn lt(&self, x: Elem, y: Elem) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: Elem, y: Elem) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `a ≺ b`.
    pub fn is_cover(&self, a: Elem, b: Elem) -> bool {
        self.upper[a].binary_search(&b).is_ok()
    }

    /// Doubly irreducible: exactly one upper and one lower cover.
    pub fn is_doubly_irreducible(&self, x: Elem) -> bool {
        self.upper[x].len() == 1 && self.lower[x].len() == 1
    }

    pub fn is_join_irreducible(&self, x: Elem) -> bool {
        self.lower[x].len() == 1
    }

    /// `↓x`, ascending by id.
    pub fn ideal(&self, x: Elem) -> Vec<Elem> {
        (0..self.n).filter(|&y| self.leq(y, x)).collect()
    }

    /// `↑x`, ascending by id.
    pub fn filter(&self, x: Elem) -> Vec<Elem> {
        (0..self.n).filter(|&y| self.leq(x, y)).collect()
    }

    /// `[lo, hi]`, ascending by id.
    pub fn interval(&self, lo: Elem, hi: Elem) -> Vec<Elem> {
        (0..self.n)
            .filter(|&y| self.leq(lo, y) && self.leq(y, hi))
            .collect()
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.n];
        for &x in &self.linear {
            for &y in &self.upper[x] {
                h[y] = h[y].max(h[x] + 1);
            }
        }
        h
    }

    /// Semimodular: `a∧b ≺ a` implies `b ≺ a∨b`.
    pub fn is_semimodular(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                !self.is_cover(self.meet(a, b), a) || self.is_cover(b, self.join(a, b))
            })
        })
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|x| {
            self.elements().all(|y| {
                self.elements().all(|z| {
                    self.meet(x, self.join(y, z)) == self.join(self.meet(x, y), self.meet(x, z))
                })
            })
        })
    }

    /// Whether `p` and `q` are perspective; `Up` when `p ↗ q`.
    pub fn perspectivity(
        &self,
        p: IntervalRef,
        q: IntervalRef,
    ) -> Result<Perspectivity, LatticeError> {
        for iv in [p, q] {
            self.check_elem(iv.lo)?;
            self.check_elem(iv.hi)?;
            if !self.is_cover(iv.lo, iv.hi) {
                return Err(LatticeError::NotPrime(iv.lo, iv.hi));
            }
        }
        if self.meet(p.hi, q.lo) == p.lo && self.join(p.hi, q.lo) == q.hi {
            Ok(Perspectivity::Up)
        } else if self.join(p.lo, q.hi) == p.hi && self.meet(p.lo, q.hi) == q.lo {
            Ok(Perspectivity::Down)
        } else {
            Ok(Perspectivity::None)
        }
    }

    /// The elements of `[lo, hi]` bottom to top, provided they form a chain.
    pub fn interval_chain(&self, lo: Elem, hi: Elem) -> Result<Vec<Elem>, LatticeError> {
        self.check_elem(lo)?;
        self.check_elem(hi)?;
        if !self.leq(lo, hi) {
            return Err(LatticeError::NotBelow(lo, hi));
        }
        let mut out = vec![lo];
        let mut cur = lo;
        while cur != hi {
            let mut next = self.upper[cur].iter().copied().filter(|&y| self.leq(y, hi));
            match (next.next(), next.next()) {
                (Some(y), None) => {
                    out.push(y);
                    cur = y;
                }
                _ => return Err(LatticeError::NotAChain(lo, hi)),
            }
        }
        Ok(out)
    }

    pub(crate) fn check_elem(&self, x: Elem) -> Result<(), LatticeError> {
        if x < self.n {
            Ok(())
        } else {
            Err(LatticeError::InvalidElement { elem: x, n: self.n })
        }
    }
}

/// How two prime intervals are related.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perspectivity {
    Up,
    Down,
    None,
}

/// An interval `[lo, hi]` named by its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalRef {
    pub lo: Elem,
    pub hi: Elem,
}

impl IntervalRef {
    pub fn new(lo: Elem, hi: Elem) -> Self {
        Self { lo, hi }
    }

    pub fn is_prime(&self, l: &Lattice) -> bool {
        l.is_cover(self.lo, self.hi)
    }
}

impl fmt::Display for IntervalRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A lattice embedding `source ↪ target`.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Arc<Lattice>,
    target: Arc<Lattice>,
    map: Vec<Elem>,
}

impl Embedding {
    /// Validates that `map` is injective and preserves joins and meets.
    pub fn new(
        source: Arc<Lattice>,
        target: Arc<Lattice>,
        map: Vec<Elem>,
    ) -> Result<Self, LatticeError> {
        if map.len() != source.len() {
            return Err(LatticeError::NotAnEmbedding(format!(
                "map has {} entries for {} elements",
                map.len(),
                source.len()
            )));
        }
        let mut seen = vec![false; target.len()];
        for &y in &map {
            target.check_elem(y)?;
            if std::mem::replace(&mut seen[y], true) {
                return Err(LatticeError::NotAnEmbedding(format!("{y} is hit twice")));
            }
        }
        for x in source.elements() {
            for y in x + 1..source.len() {
                if map[source.join(x, y)] != target.join(map[x], map[y])
                    || map[source.meet(x, y)] != target.meet(map[x], map[y])
                {
                    return Err(LatticeError::NotAnEmbedding(format!(
                        "{x}, {y} are not mapped homomorphically"
                    )));
                }
            }
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(l: Arc<Lattice>) -> Self {
        let map = l.elements().collect();
        Self { source: l.clone(), target: l, map }
    }

    pub fn source(&self) -> &Arc<Lattice> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Lattice> {
        &self.target
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding, LatticeError> {
        if !Arc::ptr_eq(&self.target, &next.source) && *self.target != *next.source {
            return Err(LatticeError::NotAnEmbedding(
                "target of the first map is not the source of the second".into(),
            ));
        }
        Ok(Embedding {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&x| next.map[x]).collect(),
        })
    }

    pub fn preserves_bounds(&self) -> bool {
        self.map[self.source.bottom()] == self.target.bottom()
            && self.map[self.source.top()] == self.target.top()
    }
}

/// A lattice isomorphism `a → b`, found by backtracking over the cover graphs.
pub fn find_isomorphism(a: &Lattice, b: &Lattice) -> Option<Vec<Elem>> {
    if a.len() != b.len() || a.num_covers() != b.num_covers() {
        return None;
    }
    let degree = |l: &Lattice, x: Elem| (l.lower_covers(x).len(), l.upper_covers(x).len());
    let order = a.linear_extension().to_vec();
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];

    fn extend(
        i: usize,
        order: &[Elem],
        a: &Lattice,
        b: &Lattice,
        map: &mut [Elem],
        used: &mut [bool],
        degree: &dyn Fn(&Lattice, Elem) -> (usize, usize),
    ) -> bool {
        let Some(&x) = order.get(i) else {
            return true;
        };
        for y in b.elements() {
            if used[y] || degree(a, x) != degree(b, y) {
                continue;
            }
            // Lower covers of x are already mapped; their images must be y's lower covers.
            let ok = a.lower_covers(x).iter().all(|&w| b.is_cover(map[w], y));
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if extend(i + 1, order, a, b, map, used, degree) {
                return true;
            }
            used[y] = false;
            map[x] = usize::MAX;
        }
        false
    }

    extend(0, &order, a, b, &mut map, &mut used, &degree).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Lattice {
        Lattice::from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn m3() -> Lattice {
        Lattice::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap()
    }

    fn n5() -> Lattice {
        Lattice::from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).unwrap()
    }

    // o=0 a=1 b=2 c=3 l=4 r=5 1=6
    fn s7() -> Lattice {
        Lattice::from_covers(
            7,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 5), (3, 6), (4, 6), (5, 6)],
        )
        .unwrap()
    }

    #[test]
    fn one_element() {
        let l = Lattice::from_covers(1, &[]).unwrap();
        assert_eq!(l.bottom(), l.top());
        assert_eq!(l.join(0, 0), 0);
    }

    #[test]
    fn square_tables() {
        let l = square();
        assert_eq!((l.bottom(), l.top()), (0, 3));
        assert_eq!(l.join(1, 2), 3);
        assert_eq!(l.meet(1, 2), 0);
        assert!(l.leq(0, 3) && !l.leq(1, 2));
    }

    #[test]
    fn m3_is_a_lattice() {
        let l = m3();
        assert_eq!(l.join(1, 3), 4);
        assert_eq!(l.meet(2, 3), 0);
    }

    #[test]
    fn rejects_redundant_cover() {
        let err = Lattice::from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap_err();
        assert!(matches!(err, LatticeError::NotHasse(0, 3)));
    }

    #[test]
    fn rejects_non_lattices() {
        // Two minima.
        assert_eq!(
            Lattice::from_covers(3, &[(0, 2), (1, 2)]).unwrap_err(),
            LatticeError::Disconnected("bottom")
        );
        // The bowtie: 0 < 2,3 and 1 < 2,3 between a bottom and a top.
        let bowtie = [(4, 0), (4, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 5), (3, 5)];
        assert!(matches!(
            Lattice::from_covers(6, &bowtie).unwrap_err(),
            LatticeError::NotALattice(_)
        ));
        assert!(matches!(
            Lattice::from_covers(2, &[(0, 0)]).unwrap_err(),
            LatticeError::NotALattice(_)
        ));
        assert!(matches!(
            Lattice::from_covers(2, &[(0, 1), (1, 0)]).unwrap_err(),
            LatticeError::NotALattice(_)
        ));
        assert!(matches!(
            Lattice::from_covers(2, &[(0, 5)]).unwrap_err(),
            LatticeError::InvalidElement { elem: 5, n: 2 }
        ));
    }

    #[test]
    fn semimodularity() {
        assert!(square().is_semimodular());
        assert!(s7().is_semimodular());
        assert!(m3().is_semimodular());
        assert!(!n5().is_semimodular());
    }

    #[test]
    fn distributivity() {
        assert!(Lattice::chain(5).unwrap().is_distributive());
        assert!(!m3().is_distributive());
        assert!(!n5().is_distributive());
        assert!(square().is_distributive());
    }

    #[test]
    fn perspectivity_cases() {
        let sq = square();
        assert_eq!(
            sq.perspectivity(IntervalRef::new(0, 1), IntervalRef::new(2, 3)),
            Ok(Perspectivity::Up)
        );
        assert_eq!(
            sq.perspectivity(IntervalRef::new(2, 3), IntervalRef::new(0, 1)),
            Ok(Perspectivity::Down)
        );
        let s = s7();
        assert_eq!(
            s.perspectivity(IntervalRef::new(0, 1), IntervalRef::new(2, 3)),
            Ok(Perspectivity::Up)
        );
        let c = Lattice::chain(3).unwrap();
        assert_eq!(
            c.perspectivity(IntervalRef::new(0, 1), IntervalRef::new(1, 2)),
            Ok(Perspectivity::None)
        );
        assert_eq!(
            sq.perspectivity(IntervalRef::new(0, 3), IntervalRef::new(0, 1)),
            Err(LatticeError::NotPrime(0, 3))
        );
    }

    #[test]
    fn interval_chains() {
        let s = s7();
        assert_eq!(s.interval_chain(3, 3).unwrap(), vec![3]);
        assert_eq!(s.interval_chain(0, 4).unwrap(), vec![0, 1, 4]);
        assert_eq!(square().interval_chain(0, 3), Err(LatticeError::NotAChain(0, 3)));
        assert_eq!(square().interval_chain(1, 2), Err(LatticeError::NotBelow(1, 2)));
    }

    #[test]
    fn embeddings() {
        let c2 = Arc::new(Lattice::chain(2).unwrap());
        let sq = Arc::new(square());
        assert!(Embedding::new(c2.clone(), sq.clone(), vec![0, 3]).is_ok());
        assert!(Embedding::new(c2.clone(), sq.clone(), vec![1, 1]).is_err());
        // {1, 2} is not a sublattice.
        let c3 = Arc::new(Lattice::chain(3).unwrap());
        assert!(Embedding::new(c3, sq.clone(), vec![0, 1, 2]).is_err());
        let id = Embedding::identity(sq.clone());
        let e = Embedding::new(c2, sq, vec![0, 3]).unwrap().then(&id).unwrap();
        assert_eq!(e.map(), &[0, 3]);
        assert!(e.preserves_bounds());
    }

    #[test]
    fn isomorphism_search() {
        let relabeled =
            Lattice::from_covers(4, &[(3, 0), (3, 1), (0, 2), (1, 2)]).unwrap();
        let iso = find_isomorphism(&square(), &relabeled).unwrap();
        assert_eq!(iso[0], 3);
        assert_eq!(iso[3], 2);
        assert!(find_isomorphism(&m3(), &n5()).is_none());
    }
}
