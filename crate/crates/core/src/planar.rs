//! Planar diagrams, boundary chains, rectangular lattices and gluing.
//!
//! A diagram is the left-to-right order of the upper and of the lower covers
//! of every element. Diagrams are never inferred; they are produced by the
//! constructors here and in [`crate::fork_eye`], or read from a file and
//! checked against the invariants below.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::congruence::principal_congruence;
use crate::lattice::{Elem, Embedding, IntervalRef, Lattice, LatticeError, Perspectivity};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("bad diagram: {0}")]
    BadDiagram(String),
    #[error("not a rectangular lattice")]
    NotRectangular,
    #[error("glued chains have different lengths ({0} and {1})")]
    ChainLengthMismatch(usize, usize),
    #[error("bad gluing: {0}")]
    BadGluing(String),
    #[error("{0} is not below the left corner")]
    NotBelowCorner(Elem),
    #[error("only products of chains have a planar diagram here")]
    NotPlanarProduct,
    #[error("partial congruence domains are not the lower boundary chains")]
    DomainMismatch,
}

/// A lattice with a fixed planar embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarDiagram {
    lattice: Arc<Lattice>,
    up: Vec<Vec<Elem>>,
    down: Vec<Vec<Elem>>,
}

/// Relabelling-independent form of a diagram; equal forms mean isomorphic diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl PlanarDiagram {
    /// Checks that the orders permute the covers and that the left and right
    /// boundaries read the same from the bottom and from the top.
    pub fn new(
        lattice: Arc<Lattice>,
        up: Vec<Vec<Elem>>,
        down: Vec<Vec<Elem>>,
    ) -> Result<Self, PlanarError> {
        let n = lattice.len();
        if up.len() != n || down.len() != n {
            return Err(PlanarError::BadDiagram(format!(
                "orders given for {} / {} of {n} elements",
                up.len(),
                down.len()
            )));
        }
        for x in 0..n {
            let mut u = up[x].clone();
            u.sort_unstable();
            if u != lattice.upper_covers(x) {
                return Err(PlanarError::BadDiagram(format!(
                    "upper order of {x} is not a permutation of its upper covers"
                )));
            }
            let mut d = down[x].clone();
            d.sort_unstable();
            if d != lattice.lower_covers(x) {
                return Err(PlanarError::BadDiagram(format!(
                    "lower order of {x} is not a permutation of its lower covers"
                )));
            }
        }
        let d = Self { lattice, up, down };
        let walk_down = |pick: fn(&[Elem]) -> Option<&Elem>| {
            let mut chain = vec![d.lattice.top()];
            let mut cur = d.lattice.top();
            while let Some(&x) = pick(&d.down[cur]) {
                chain.push(x);
                cur = x;
            }
            chain.reverse();
            chain
        };
        if walk_down(<[Elem]>::first) != d.left_boundary() {
            return Err(PlanarError::BadDiagram(
                "left boundary differs when read from the top".into(),
            ));
        }
        if walk_down(<[Elem]>::last) != d.right_boundary() {
            return Err(PlanarError::BadDiagram(
                "right boundary differs when read from the top".into(),
            ));
        }
        Ok(d)
    }

    /// The only diagram of a lattice in which no element has two upper or two
    /// lower covers (a chain).
    pub fn trivial(lattice: Arc<Lattice>) -> Option<Self> {
        let unique = lattice
            .elements()
            .all(|x| lattice.upper_covers(x).len() <= 1 && lattice.lower_covers(x).len() <= 1);
        if !unique {
            return None;
        }
        let up = lattice.elements().map(|x| lattice.upper_covers(x).to_vec()).collect();
        let down = lattice.elements().map(|x| lattice.lower_covers(x).to_vec()).collect();
        Some(Self { lattice, up, down })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Upper covers of `x`, left to right.
    pub fn up_order(&self, x: Elem) -> &[Elem] {
        &self.up[x]
    }

    /// Lower covers of `x`, left to right.
    pub fn down_order(&self, x: Elem) -> &[Elem] {
        &self.down[x]
    }

    fn walk_up(&self, pick: fn(&[Elem]) -> Option<&Elem>) -> Vec<Elem> {
        let mut chain = vec![self.lattice.bottom()];
        let mut cur = self.lattice.bottom();
        while let Some(&x) = pick(&self.up[cur]) {
            chain.push(x);
            cur = x;
        }
        chain
    }

    /// Leftmost maximal chain, bottom to top.
    pub fn left_boundary(&self) -> Vec<Elem> {
        self.walk_up(<[Elem]>::first)
    }

    /// Rightmost maximal chain, bottom to top.
    pub fn right_boundary(&self) -> Vec<Elem> {
        self.walk_up(<[Elem]>::last)
    }

    /// The mirror image: left and right swapped.
    pub fn mirror(&self) -> Self {
        let rev = |v: &Vec<Vec<Elem>>| {
            v.iter()
                .map(|o| o.iter().rev().copied().collect())
                .collect()
        };
        Self {
            lattice: self.lattice.clone(),
            up: rev(&self.up),
            down: rev(&self.down),
        }
    }

    /// Depth-first numbering from the bottom, upper covers left first.
    pub fn canonical_numbering(&self) -> Vec<Elem> {
        let n = self.len();
        let mut number = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = vec![self.lattice.bottom()];
        while let Some(x) = stack.pop() {
            if number[x] != usize::MAX {
                continue;
            }
            number[x] = next;
            next += 1;
            for &y in self.up[x].iter().rev() {
                if number[y] == usize::MAX {
                    stack.push(y);
                }
            }
        }
        number
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let number = self.canonical_numbering();
        let n = self.len();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for x in 0..n {
            up[number[x]] = self.up[x].iter().map(|&y| number[y]).collect();
            down[number[x]] = self.down[x].iter().map(|&y| number[y]).collect();
        }
        CanonicalForm { up, down }
    }

    /// Same diagram up to relabelling.
    pub fn is_isomorphic(&self, other: &PlanarDiagram) -> bool {
        self.len() == other.len() && self.canonical_form() == other.canonical_form()
    }

    /// The diagram induced on a convex subset (interval, ideal or filter).
    /// Returns the new diagram and, for each new id, the old element.
    pub fn induced(&self, subset: &[Elem]) -> Result<(PlanarDiagram, Vec<Elem>), PlanarError> {
        let mut elems = subset.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let index: HashMap<Elem, Elem> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let keep = |v: &[Elem]| -> Vec<Elem> { v.iter().filter_map(|y| index.get(y).copied()).collect() };
        let up: Vec<Vec<Elem>> = elems.iter().map(|&x| keep(&self.up[x])).collect();
        let down: Vec<Vec<Elem>> = elems.iter().map(|&x| keep(&self.down[x])).collect();
        let covers: Vec<(Elem, Elem)> = up
            .iter()
            .enumerate()
            .flat_map(|(a, ups)| ups.iter().map(move |&b| (a, b)))
            .collect();
        let lattice = Arc::new(Lattice::from_covers(elems.len(), &covers)?);
        Ok((PlanarDiagram::new(lattice, up, down)?, elems))
    }
}

/// Mutable cover orders used by the constructors.
#[derive(Debug, Clone)]
pub(crate) struct DiagramBuilder {
    pub up: Vec<Vec<Elem>>,
    pub down: Vec<Vec<Elem>>,
}

impl DiagramBuilder {
    pub fn from_diagram(d: &PlanarDiagram) -> Self {
        Self { up: d.up.clone(), down: d.down.clone() }
    }

    pub fn add_element(&mut self) -> Elem {
        self.up.push(Vec::new());
        self.down.push(Vec::new());
        self.up.len() - 1
    }

    /// Replace `old` by `new` in the upper order of `x`, keeping its position.
    pub fn replace_up(&mut self, x: Elem, old: Elem, new: Elem) {
        let pos = self.up[x].iter().position(|&y| y == old).expect("cover present");
        self.up[x][pos] = new;
    }

    pub fn replace_down(&mut self, x: Elem, old: Elem, new: Elem) {
        let pos = self.down[x].iter().position(|&y| y == old).expect("cover present");
        self.down[x][pos] = new;
    }

    pub fn finish(self) -> Result<PlanarDiagram, PlanarError> {
        let covers: Vec<(Elem, Elem)> = self
            .up
            .iter()
            .enumerate()
            .flat_map(|(a, ups)| ups.iter().map(move |&b| (a, b)))
            .collect();
        let lattice = Arc::new(Lattice::from_covers(self.up.len(), &covers)?);
        PlanarDiagram::new(lattice, self.up, self.down)
    }
}

/// The four boundary chains of a rectangular lattice, each bottom to top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryChains {
    pub c_ll: Vec<Elem>,
    pub c_lr: Vec<Elem>,
    pub c_ul: Vec<Elem>,
    pub c_ur: Vec<Elem>,
}

/// Doubly irreducible elements other than 0 and 1 on the left and on the
/// right boundary.
pub fn corners(d: &PlanarDiagram) -> (Vec<Elem>, Vec<Elem>) {
    let l = d.lattice();
    let pick = |chain: Vec<Elem>| -> Vec<Elem> {
        chain
            .into_iter()
            .filter(|&x| x != l.bottom() && x != l.top() && l.is_doubly_irreducible(x))
            .collect()
    };
    (pick(d.left_boundary()), pick(d.right_boundary()))
}

/// `(lcorner, rcorner)` when `d` is a rectangular lattice.
pub fn is_rectangular(d: &PlanarDiagram) -> Option<(Elem, Elem)> {
    let l = d.lattice();
    let (left, right) = corners(d);
    match (left.as_slice(), right.as_slice()) {
        (&[lc], &[rc])
            if l.join(lc, rc) == l.top() && l.meet(lc, rc) == l.bottom() && l.is_semimodular() =>
        {
            Some((lc, rc))
        }
        _ => None,
    }
}

/// Rectangular with both corners covered by the top.
pub fn is_patch(d: &PlanarDiagram) -> bool {
    let l = d.lattice();
    is_rectangular(d).is_some_and(|(lc, rc)| l.is_cover(lc, l.top()) && l.is_cover(rc, l.top()))
}

pub fn boundary_chains(d: &PlanarDiagram) -> Result<BoundaryChains, PlanarError> {
    let (lc, rc) = is_rectangular(d).ok_or(PlanarError::NotRectangular)?;
    let l = d.lattice();
    Ok(BoundaryChains {
        c_ll: l.interval_chain(l.bottom(), lc)?,
        c_lr: l.interval_chain(l.bottom(), rc)?,
        c_ul: l.interval_chain(lc, l.top())?,
        c_ur: l.interval_chain(rc, l.top())?,
    })
}

/// The chain with `len` elements.
pub fn chain(len: usize) -> Result<PlanarDiagram, PlanarError> {
    let l = Arc::new(Lattice::chain(len)?);
    Ok(PlanarDiagram::trivial(l).expect("chains have a unique diagram"))
}

/// `C_m × C_n` (chain element counts), first factor toward the lower left.
/// Element `(i, j)` has id `i * n + j`.
pub fn grid(m: usize, n: usize) -> Result<PlanarDiagram, PlanarError> {
    direct_product(&chain(m)?, &chain(n)?)
}

/// Direct product of two chains; the first factor runs toward the lower left.
pub fn direct_product(a: &PlanarDiagram, b: &PlanarDiagram) -> Result<PlanarDiagram, PlanarError> {
    let is_chain = |d: &PlanarDiagram| d.lattice().elements().all(|x| d.up_order(x).len() <= 1);
    if !is_chain(a) || !is_chain(b) {
        return Err(PlanarError::NotPlanarProduct);
    }
    let (m, n) = (a.len(), b.len());
    let id = |i: usize, j: usize| i * n + j;
    let mut up = vec![Vec::new(); m * n];
    let mut down = vec![Vec::new(); m * n];
    let mut covers = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let x = id(i, j);
            if i + 1 < m {
                up[x].push(id(i + 1, j));
                covers.push((x, id(i + 1, j)));
            }
            if j + 1 < n {
                up[x].push(id(i, j + 1));
                covers.push((x, id(i, j + 1)));
            }
            if j > 0 {
                down[x].push(id(i, j - 1));
            }
            if i > 0 {
                down[x].push(id(i - 1, j));
            }
        }
    }
    let lattice = Arc::new(Lattice::from_covers(m * n, &covers)?);
    PlanarDiagram::new(lattice, up, down)
}

/// Where the second lattice goes in a rectangular gluing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlueSide {
    /// `C_ur(b)` is identified with `C_ll(a)`.
    LowerLeft,
    /// `C_ul(b)` is identified with `C_lr(a)`.
    LowerRight,
}

/// A glued diagram with the embeddings of both parts.
#[derive(Debug, Clone)]
pub struct Gluing {
    pub diagram: PlanarDiagram,
    pub embed_a: Embedding,
    pub embed_b: Embedding,
}

/// Rectangular gluing of `a` (upper part) and `b` (lower part).
pub fn glue(a: &PlanarDiagram, b: &PlanarDiagram, side: GlueSide) -> Result<Gluing, PlanarError> {
    let ca = boundary_chains(a)?;
    let cb = boundary_chains(b)?;
    let (ideal, filter) = match side {
        GlueSide::LowerLeft => (ca.c_ll, cb.c_ur),
        GlueSide::LowerRight => (ca.c_lr, cb.c_ul),
    };
    glue_over_chains(a, &ideal, b, &filter)
}

/// Hall–Dilworth gluing of `a` over the ideal chain `a_chain` and `b` over
/// the filter chain `b_chain`, both listed bottom to top.
///
/// Ids of `a` are kept; the remaining elements of `b` follow in id order.
pub fn glue_over_chains(
    a: &PlanarDiagram,
    a_chain: &[Elem],
    b: &PlanarDiagram,
    b_chain: &[Elem],
) -> Result<Gluing, PlanarError> {
    if a_chain.len() != b_chain.len() {
        return Err(PlanarError::ChainLengthMismatch(
            a_chain.len().saturating_sub(1),
            b_chain.len().saturating_sub(1),
        ));
    }
    let (la, lb) = (a.lattice(), b.lattice());
    let is_chain = |l: &Lattice, c: &[Elem]| !c.is_empty() && c.windows(2).all(|w| l.is_cover(w[0], w[1]));
    if !is_chain(la, a_chain) || !is_chain(lb, b_chain) {
        return Err(PlanarError::BadGluing("glued sets are not chains".into()));
    }
    let mut ideal = la.ideal(*a_chain.last().unwrap());
    let mut expect: Vec<Elem> = a_chain.to_vec();
    expect.sort_unstable();
    ideal.sort_unstable();
    if ideal != expect {
        return Err(PlanarError::BadGluing("first chain is not an ideal".into()));
    }
    let mut filter = lb.filter(b_chain[0]);
    filter.sort_unstable();
    expect = b_chain.to_vec();
    expect.sort_unstable();
    if filter != expect {
        return Err(PlanarError::BadGluing("second chain is not a filter".into()));
    }

    let mut b_map = vec![usize::MAX; b.len()];
    for (&x, &y) in b_chain.iter().zip(a_chain) {
        b_map[x] = y;
    }
    let mut next = a.len();
    for slot in b_map.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let total = next;
    let mut up = vec![Vec::new(); total];
    let mut down = vec![Vec::new(); total];
    for x in la.elements() {
        up[x] = a.up_order(x).to_vec();
        down[x] = a.down_order(x).to_vec();
    }
    // Shared elements take their upper covers from the upper part and their
    // lower covers from the lower part.
    for y in lb.elements() {
        let x = b_map[y];
        let mapped = |v: &[Elem]| v.iter().map(|&z| b_map[z]).collect::<Vec<_>>();
        if x >= a.len() {
            up[x] = mapped(b.up_order(y));
        }
        down[x] = mapped(b.down_order(y));
    }
    let covers: Vec<(Elem, Elem)> = up
        .iter()
        .enumerate()
        .flat_map(|(p, ups)| ups.iter().map(move |&q| (p, q)))
        .collect();
    let lattice = Arc::new(Lattice::from_covers(total, &covers)?);
    let diagram = PlanarDiagram::new(lattice.clone(), up, down)?;
    let embed_a = Embedding::new(a.lattice().clone(), lattice.clone(), la.elements().collect())?;
    let embed_b = Embedding::new(b.lattice().clone(), lattice, b_map)?;
    Ok(Gluing { diagram, embed_a, embed_b })
}

/// `↑a` and `↓(rcorner ∨ a)` with the chain they share.
#[derive(Debug, Clone)]
pub struct Split {
    pub filter: PlanarDiagram,
    /// Element of the original lattice for each id of `filter`.
    pub filter_elems: Vec<Elem>,
    pub ideal: PlanarDiagram,
    pub ideal_elems: Vec<Elem>,
    /// `[a, rcorner ∨ a]` in original ids, listed in a linear extension.
    /// Gluing back requires it to be a chain.
    pub shared: Vec<Elem>,
}

impl Split {
    /// Glues the two parts back together over the shared chain.
    pub fn reglue(&self) -> Result<Gluing, PlanarError> {
        let local = |elems: &[Elem]| -> Vec<Elem> {
            self.shared
                .iter()
                .map(|x| elems.binary_search(x).expect("shared element in part"))
                .collect()
        };
        glue_over_chains(
            &self.filter,
            &local(&self.filter_elems),
            &self.ideal,
            &local(&self.ideal_elems),
        )
    }
}

/// Splits a rectangular lattice at `a ≤ lcorner` into a filter and an ideal.
pub fn split_at(d: &PlanarDiagram, a: Elem) -> Result<Split, PlanarError> {
    let (lc, rc) = is_rectangular(d).ok_or(PlanarError::NotRectangular)?;
    let l = d.lattice();
    l.check_elem(a)?;
    if !l.leq(a, lc) {
        return Err(PlanarError::NotBelowCorner(a));
    }
    let top = l.join(rc, a);
    let shared: Vec<Elem> = l
        .linear_extension()
        .iter()
        .copied()
        .filter(|&x| l.leq(a, x) && l.leq(x, top))
        .collect();
    let (filter, filter_elems) = d.induced(&l.filter(a))?;
    let (ideal, ideal_elems) = d.induced(&l.ideal(top))?;
    Ok(Split { filter, filter_elems, ideal, ideal_elems, shared })
}

/// Outcome of checking the structural facts about a rectangular lattice.
/// Each item is checked for the diagram and its mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectangReport {
    /// `↓lcorner` is a chain and is the lower part of the left boundary.
    pub ideal_is_c_ll: bool,
    /// `↑lcorner` is a chain and is the upper part of the left boundary.
    pub filter_is_c_ul: bool,
    /// `[a, rcorner ∨ a]` is a chain for every `a ≤ lcorner`.
    pub intervals_are_chains: bool,
    /// Splitting at every `a ≤ lcorner` and gluing back gives the same diagram.
    pub split_reglues: bool,
    /// Each prime interval of `[a, rcorner ∨ a]` is perspective to one in `C_lr`.
    pub perspective_to_c_lr: bool,
    /// `con(C_ul) = con(a, rcorner ∨ a) = con(C_lr)`.
    pub con_equalities: bool,
}

impl RectangReport {
    pub fn items(&self) -> [(&'static str, bool); 6] {
        [
            ("(i) ideal of lcorner is C_ll", self.ideal_is_c_ll),
            ("(ii) filter of lcorner is C_ul", self.filter_is_c_ul),
            ("(iii) [a, rcorner v a] is a chain", self.intervals_are_chains),
            ("(iv) split and reglue is isomorphic", self.split_reglues),
            ("(v) steps perspective to C_lr", self.perspective_to_c_lr),
            ("con(C_ul) = con(a, rcorner v a) = con(C_lr)", self.con_equalities),
        ]
    }

    pub fn passed(&self) -> bool {
        self.items().iter().all(|(_, ok)| *ok)
    }
}

pub fn theorem_rectang_check(d: &PlanarDiagram) -> Result<RectangReport, PlanarError> {
    let a = rectang_one_side(d)?;
    let b = rectang_one_side(&d.mirror())?;
    Ok(RectangReport {
        ideal_is_c_ll: a.ideal_is_c_ll && b.ideal_is_c_ll,
        filter_is_c_ul: a.filter_is_c_ul && b.filter_is_c_ul,
        intervals_are_chains: a.intervals_are_chains && b.intervals_are_chains,
        split_reglues: a.split_reglues && b.split_reglues,
        perspective_to_c_lr: a.perspective_to_c_lr && b.perspective_to_c_lr,
        con_equalities: a.con_equalities && b.con_equalities,
    })
}

fn rectang_one_side(d: &PlanarDiagram) -> Result<RectangReport, PlanarError> {
    let (lc, rc) = is_rectangular(d).ok_or(PlanarError::NotRectangular)?;
    let l = d.lattice();
    let left = d.left_boundary();
    let cut = left.iter().position(|&x| x == lc).expect("corner on boundary");

    let as_chain = |set: Vec<Elem>| -> Option<Vec<Elem>> {
        let (lo, hi) = (*set.iter().find(|&&x| set.iter().all(|&y| l.leq(x, y)))?, *set
            .iter()
            .find(|&&x| set.iter().all(|&y| l.leq(y, x)))?);
        let c = l.interval_chain(lo, hi).ok()?;
        (c.len() == set.len()).then_some(c)
    };
    let ideal_is_c_ll = as_chain(l.ideal(lc)).as_deref() == Some(&left[..=cut]);
    let filter_is_c_ul = as_chain(l.filter(lc)).as_deref() == Some(&left[cut..]);

    let c_lr = l.interval_chain(l.bottom(), rc).ok();
    let below_corner = l.ideal(lc);
    let mut intervals_are_chains = true;
    let mut split_reglues = true;
    let mut perspective_to_c_lr = true;
    let mut con_equalities = true;
    let con_ul = principal_congruence(l, lc, l.top());
    let con_lr = principal_congruence(l, l.bottom(), rc);
    con_equalities &= con_ul == con_lr;

    for &a in &below_corner {
        let hi = l.join(rc, a);
        split_reglues &= split_at(d, a)
            .and_then(|s| s.reglue())
            .is_ok_and(|g| g.diagram.is_isomorphic(d));
        con_equalities &= principal_congruence(l, a, hi) == con_lr;
        let chain = match l.interval_chain(a, hi) {
            Ok(c) => c,
            Err(_) => {
                intervals_are_chains = false;
                continue;
            }
        };
        if let Some(c_lr) = &c_lr {
            for w in chain.windows(2) {
                let p = IntervalRef::new(w[0], w[1]);
                let found = c_lr.windows(2).any(|v| {
                    let q = IntervalRef::new(v[0], v[1]);
                    l.perspectivity(p, q).is_ok_and(|r| r != Perspectivity::None)
                        || l.perspectivity(q, p).is_ok_and(|r| r != Perspectivity::None)
                });
                perspective_to_c_lr &= found;
            }
        } else {
            perspective_to_c_lr = false;
        }
    }

    Ok(RectangReport {
        ideal_is_c_ll,
        filter_is_c_ul,
        intervals_are_chains,
        split_reglues,
        perspective_to_c_lr,
        con_equalities,
    })
}
