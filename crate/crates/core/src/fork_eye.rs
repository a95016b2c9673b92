//! Eyes, slimness, covering squares and fork insertion.

use thiserror::Error;

use crate::congruence::JiStructure;
use crate::lattice::{Elem, Embedding, IntervalRef};
use crate::planar::{DiagramBuilder, PlanarDiagram, PlanarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForkEyeError {
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error("diagram has eyes")]
    NotSlim,
    #[error("lattice is not semimodular")]
    NotSemimodular,
    #[error("{0} is not a covering square of the diagram")]
    NotACoveringSquare(CoveringSquare),
    #[error("{0} is not an eye")]
    NotAnEye(Elem),
    #[error("fork propagation stopped at [{0}, {1}], which is not on the boundary")]
    StrandedDescent(Elem, Elem),
    #[error("cell below [{0}, {1}] is not a covering square")]
    BadCell(Elem, Elem),
}

impl From<crate::lattice::LatticeError> for ForkEyeError {
    fn from(e: crate::lattice::LatticeError) -> Self {
        ForkEyeError::Planar(e.into())
    }
}

/// `o ≺ l, r ≺ t` with `l` immediately left of `r` among the upper covers of `o`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoveringSquare {
    pub o: Elem,
    pub l: Elem,
    pub r: Elem,
    pub t: Elem,
}

impl std::fmt::Display for CoveringSquare {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}; {}, {}; {}}}", self.o, self.l, self.r, self.t)
    }
}

/// Outcome of a fork insertion.
#[derive(Debug, Clone)]
pub struct ForkResult {
    pub diagram: PlanarDiagram,
    pub embedding: Embedding,
    /// `a`, `b`, `c`, then the left descent, then the right descent.
    pub new_elements: Vec<Elem>,
    pub left_terminal: IntervalRef,
    pub right_terminal: IntervalRef,
}

impl ForkResult {
    pub fn a(&self) -> Elem {
        self.new_elements[0]
    }

    pub fn b(&self) -> Elem {
        self.new_elements[1]
    }

    pub fn c(&self) -> Elem {
        self.new_elements[2]
    }
}

pub fn covering_squares(d: &PlanarDiagram) -> Vec<CoveringSquare> {
    let lat = d.lattice();
    let mut out = Vec::new();
    for o in lat.elements() {
        for w in d.up_order(o).windows(2) {
            let (l, r) = (w[0], w[1]);
            let t = lat.join(l, r);
            if lat.is_cover(l, t) && lat.is_cover(r, t) {
                out.push(CoveringSquare { o, l, r, t });
            }
        }
    }
    out
}

fn check_square(d: &PlanarDiagram, s: CoveringSquare) -> Result<(), ForkEyeError> {
    if s.o < d.len() && covering_squares(d).contains(&s) {
        Ok(())
    } else {
        Err(ForkEyeError::NotACoveringSquare(s))
    }
}

/// Doubly irreducible elements lying in a cover-preserving `M₃`: the interval
/// between the lower and upper cover has length two and at least two other atoms.
pub fn eyes(d: &PlanarDiagram) -> Vec<Elem> {
    let lat = d.lattice();
    lat.elements()
        .filter(|&x| {
            if !lat.is_doubly_irreducible(x) {
                return false;
            }
            let (u, w) = (lat.lower_covers(x)[0], lat.upper_covers(x)[0]);
            let interior: Vec<Elem> = lat
                .interval(u, w)
                .into_iter()
                .filter(|&y| y != u && y != w)
                .collect();
            interior.len() >= 3
                && interior.iter().all(|&y| lat.is_cover(u, y) && lat.is_cover(y, w))
        })
        .collect()
}

pub fn is_slim(d: &PlanarDiagram) -> bool {
    d.lattice().is_semimodular() && eyes(d).is_empty()
}

/// Adds `x` with `o ≺ x ≺ t`, drawn between `l` and `r`.
pub fn insert_eye(
    d: &PlanarDiagram,
    s: CoveringSquare,
) -> Result<(PlanarDiagram, Embedding, Elem), ForkEyeError> {
    check_square(d, s)?;
    let mut b = DiagramBuilder::from_diagram(d);
    let x = b.add_element();
    let pos = b.up[s.o].iter().position(|&y| y == s.l).expect("square side");
    b.up[s.o].insert(pos + 1, x);
    let pos = b.down[s.t].iter().position(|&y| y == s.l).expect("square side");
    b.down[s.t].insert(pos + 1, x);
    b.up[x] = vec![s.t];
    b.down[x] = vec![s.o];
    let out = b.finish()?;
    let e = Embedding::new(d.lattice().clone(), out.lattice().clone(), d.lattice().elements().collect())?;
    Ok((out, e, x))
}

/// Deletes an element; the renumbering maps old ids to new ones.
fn delete_element(d: &PlanarDiagram, x: Elem) -> Result<(PlanarDiagram, Vec<Option<Elem>>), PlanarError> {
    let renumber: Vec<Option<Elem>> = (0..d.len())
        .map(|y| match y.cmp(&x) {
            std::cmp::Ordering::Less => Some(y),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(y - 1),
        })
        .collect();
    let keep = |v: &[Elem]| v.iter().filter_map(|&y| renumber[y]).collect::<Vec<_>>();
    let mut b = DiagramBuilder { up: Vec::new(), down: Vec::new() };
    for y in d.lattice().elements().filter(|&y| y != x) {
        b.up.push(keep(d.up_order(y)));
        b.down.push(keep(d.down_order(y)));
    }
    Ok((b.finish()?, renumber))
}

pub fn remove_eye(d: &PlanarDiagram, x: Elem) -> Result<(PlanarDiagram, Vec<Option<Elem>>), ForkEyeError> {
    if !eyes(d).contains(&x) {
        return Err(ForkEyeError::NotAnEye(x));
    }
    Ok(delete_element(d, x)?)
}

/// Removes eyes until none are left.
pub fn slim_down(d: &PlanarDiagram) -> PlanarDiagram {
    let mut cur = d.clone();
    while let Some(&x) = eyes(&cur).first() {
        cur = delete_element(&cur, x).expect("removing an eye keeps a lattice").0;
    }
    cur
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// Inserts a fork at `s` and propagates it down to the boundary on both sides.
pub fn insert_fork(d: &PlanarDiagram, s: CoveringSquare) -> Result<ForkResult, ForkEyeError> {
    let lat = d.lattice();
    if !lat.is_semimodular() {
        return Err(ForkEyeError::NotSemimodular);
    }
    if !eyes(d).is_empty() {
        return Err(ForkEyeError::NotSlim);
    }
    check_square(d, s)?;

    let mut b = DiagramBuilder::from_diagram(d);
    let (a, bb, c) = (b.add_element(), b.add_element(), b.add_element());
    b.replace_up(s.o, s.l, a);
    b.replace_up(s.o, s.r, bb);
    b.replace_down(s.l, s.o, a);
    b.replace_down(s.r, s.o, bb);
    let pos = b.down[s.t].iter().position(|&y| y == s.l).expect("square side");
    b.down[s.t].insert(pos + 1, c);
    b.up[a] = vec![s.l, c];
    b.up[bb] = vec![c, s.r];
    b.up[c] = vec![s.t];
    b.down[a] = vec![s.o];
    b.down[bb] = vec![s.o];
    b.down[c] = vec![a, bb];

    let mut new_elements = vec![a, bb, c];
    let left = descend(d, &mut b, Side::Left, s.o, s.l, a, &mut new_elements)?;
    let right = descend(d, &mut b, Side::Right, s.o, s.r, bb, &mut new_elements)?;

    let diagram = b.finish()?;
    let embedding = Embedding::new(lat.clone(), diagram.lattice().clone(), lat.elements().collect())?;
    Ok(ForkResult {
        diagram,
        embedding,
        new_elements,
        left_terminal: left,
        right_terminal: right,
    })
}

/// One side of the propagation. `v` was inserted into the original prime
/// interval `[u, w]`; returns the upper half of the last such interval.
fn descend(
    d: &PlanarDiagram,
    b: &mut DiagramBuilder,
    side: Side,
    mut u: Elem,
    mut w: Elem,
    mut v: Elem,
    new_elements: &mut Vec<Elem>,
) -> Result<IntervalRef, ForkEyeError> {
    let lat = d.lattice();
    loop {
        let downs = d.down_order(w);
        let i = downs.iter().position(|&y| y == u).expect("original cover");
        let z = match side {
            Side::Left => i.checked_sub(1).map(|j| downs[j]),
            Side::Right => downs.get(i + 1).copied(),
        };
        let Some(z) = z else {
            let boundary = match side {
                Side::Left => d.left_boundary(),
                Side::Right => d.right_boundary(),
            };
            let on_boundary = boundary.windows(2).any(|e| e == [u, w]);
            if !on_boundary {
                return Err(ForkEyeError::StrandedDescent(u, w));
            }
            return Ok(IntervalRef::new(v, w));
        };
        let x = lat.meet(u, z);
        if !lat.is_cover(x, u) || !lat.is_cover(x, z) {
            return Err(ForkEyeError::BadCell(u, w));
        }
        let y = b.add_element();
        b.replace_up(x, z, y);
        b.replace_down(z, x, y);
        b.down[y] = vec![x];
        match side {
            Side::Left => {
                b.up[y] = vec![z, v];
                b.down[v].insert(0, y);
            }
            Side::Right => {
                b.up[y] = vec![v, z];
                b.down[v].push(y);
            }
        }
        new_elements.push(y);
        (u, w, v) = (x, z, y);
    }
}

/// Number of join-irreducible congruences before and after inserting a fork.
pub fn count_ji_congruences_delta(
    d: &PlanarDiagram,
    s: CoveringSquare,
) -> Result<(usize, usize), ForkEyeError> {
    let after = insert_fork(d, s)?;
    Ok((
        JiStructure::new(d.lattice()).ji.len(),
        JiStructure::new(after.diagram.lattice()).ji.len(),
    ))
}

/// Number of join-irreducible congruences of a lattice.
pub fn count_ji_congruences(d: &PlanarDiagram) -> usize {
    JiStructure::new(d.lattice()).ji.len()
}
