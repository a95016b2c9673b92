//! The all-principal extension pipeline, the representation search and the
//! one-sided/two-sided classifiers.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::congruence::{
    boundary_pair, generated_congruence, is_congruence_preserving_extension,
    is_cover_preserving_extension, principal_congruence, ConLattice, Congruence, JiStructure,
    PartialCongruence,
};
use crate::fork_eye::{covering_squares, insert_eye, insert_fork, ForkEyeError};
use crate::lattice::{find_isomorphism, Elem, Embedding, IntervalRef, Lattice};
use crate::planar::{
    boundary_chains, glue, grid, is_rectangular, GlueSide, PlanarDiagram, PlanarError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error(transparent)]
    ForkEye(#[from] ForkEyeError),
    #[error(
        "input is not rectangular; the rectangular extension of an arbitrary planar \
         semimodular lattice is not constructed here"
    )]
    NotRectangular,
    #[error("lattice is not distributive")]
    NotDistributive,
    #[error("no lattice found within a budget of {0} insertions")]
    SearchExhausted(usize),
    #[error("position {pos} is outside a chain of length {len}")]
    PositionOutOfRange { pos: usize, len: usize },
    #[error("need at least one column")]
    NoColumns,
    #[error("no witness interval on the lower left chain for {0}")]
    WitnessMissing(String),
    #[error("congruence is not join-irreducible")]
    NotJoinIrreducible,
    #[error("congruence has {got} labels for a lattice of {want} elements")]
    SizeMismatch { got: usize, want: usize },
}

impl From<crate::lattice::LatticeError> for PipelineError {
    fn from(e: crate::lattice::LatticeError) -> Self {
        PipelineError::Planar(e.into())
    }
}

fn require_rectangular(d: &PlanarDiagram) -> Result<(), PipelineError> {
    is_rectangular(d).map(|_| ()).ok_or(PipelineError::NotRectangular)
}

/// `C_{d+1} × C_{d+1}` with an eye in every square of the main diagonal.
pub fn widehat(d_len: usize) -> Result<PlanarDiagram, PipelineError> {
    let side = d_len + 1;
    let mut d = grid(side, side)?;
    for i in 0..d_len {
        let o = i * side + i;
        let s = covering_squares(&d)
            .into_iter()
            .find(|s| s.o == o && s.l == o + side && s.r == o + 1)
            .expect("diagonal square of a grid");
        d = insert_eye(&d, s)?.0;
    }
    Ok(d)
}

/// A join-irreducible congruence of the input and the prime interval on
/// `C_ll` of the extension that generates its extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub congruence: Congruence,
    /// Step index into `C_ll` of the extension.
    pub position: usize,
    pub interval: IntervalRef,
}

#[derive(Debug, Clone)]
pub struct Step2 {
    pub diagram: PlanarDiagram,
    pub embedding: Embedding,
    pub witnesses: Vec<Witness>,
}

/// Extension of `θ` along `e`: the congruence generated by the image of `θ`.
pub fn extend_congruence(theta: &Congruence, e: &Embedding) -> Congruence {
    let pairs: Vec<(Elem, Elem)> = theta
        .generating_pairs()
        .into_iter()
        .map(|(a, b)| (e.apply(a), e.apply(b)))
        .collect();
    generated_congruence(e.target(), &pairs)
}

fn chain_step_cons(l: &Lattice, chain: &[Elem]) -> Vec<Congruence> {
    chain
        .windows(2)
        .map(|w| principal_congruence(l, w[0], w[1]))
        .collect()
}

/// Glues `widehat(D)` below-right of `k1`, where `D = C_lr(k1)`, so that every
/// join-irreducible congruence gets a generating prime interval on `C_ll`.
pub fn step2(k1: &PlanarDiagram) -> Result<Step2, PipelineError> {
    require_rectangular(k1)?;
    let d_len = boundary_chains(k1)?.c_lr.len() - 1;
    let dhat = widehat(d_len)?;
    let g = glue(k1, &dhat, GlueSide::LowerRight)?;
    let k2 = g.diagram;
    let c_ll = boundary_chains(&k2)?.c_ll;
    let steps = chain_step_cons(k2.lattice(), &c_ll);
    let mut witnesses = Vec::new();
    for alpha in JiStructure::new(k1.lattice()).ji {
        let ext = extend_congruence(&alpha, &g.embed_a);
        // Prefer a step inherited from C_ll(K₁).
        let position = (d_len..steps.len())
            .chain(0..d_len)
            .find(|&p| steps[p] == ext)
            .ok_or_else(|| PipelineError::WitnessMissing(alpha.to_string()))?;
        witnesses.push(Witness {
            congruence: alpha,
            position,
            interval: IntervalRef::new(c_ll[position], c_ll[position + 1]),
        });
    }
    Ok(Step2 { diagram: k2, embedding: g.embed_a, witnesses })
}

/// `C × C_{n+1}` with `C` of length `c_len`, and in column `i` an eye in the
/// square whose upper right edge is opposite step `positions[i]` of `C`.
///
/// `C` is the upper right boundary. Returns the diagram and `[a, b]` with
/// `a` on the lower left boundary whose steps cross the columns in order.
pub fn build_col_lattice(
    c_len: usize,
    positions: &[usize],
) -> Result<(PlanarDiagram, IntervalRef), PipelineError> {
    let n = positions.len();
    if n == 0 {
        return Err(PipelineError::NoColumns);
    }
    if let Some(&pos) = positions.iter().find(|&&p| p >= c_len) {
        return Err(PipelineError::PositionOutOfRange { pos, len: c_len });
    }
    let width = n + 1;
    let id = |i: usize, j: usize| i * width + j;
    let mut d = grid(c_len + 1, width)?;
    for (col, &k) in positions.iter().enumerate() {
        let o = id(k, col);
        let s = covering_squares(&d)
            .into_iter()
            .find(|s| s.o == o && s.l == id(k + 1, col) && s.r == id(k, col + 1))
            .expect("grid square");
        d = insert_eye(&d, s)?.0;
    }
    let row = positions[n - 1] + 1;
    Ok((d, IntervalRef::new(id(row, 0), id(row, n))))
}

#[derive(Debug, Clone)]
pub struct Step3 {
    pub diagram: PlanarDiagram,
    pub embedding: Embedding,
    /// `[a, b]` in the new lattice with `con(a, b)` the extension of `θ`.
    pub witness: IntervalRef,
    /// Steps of the old `C_ll` used for the columns.
    pub positions: Vec<usize>,
}

/// Glues the column lattice of `θ` below-left of `k`, making the extension
/// of `θ` principal.
pub fn step3_one(k: &PlanarDiagram, theta: &Congruence) -> Result<Step3, PipelineError> {
    require_rectangular(k)?;
    let lat = k.lattice();
    if theta.len() != lat.len() {
        return Err(PipelineError::SizeMismatch { got: theta.len(), want: lat.len() });
    }
    let c_ll = boundary_chains(k)?.c_ll;
    let steps = chain_step_cons(lat, &c_ll);
    let js = JiStructure::new(lat);
    let below: Vec<usize> = (0..js.ji.len()).filter(|&j| js.ji[j].refines(theta)).collect();
    let maximal = below
        .iter()
        .filter(|&&j| !below.iter().any(|&h| h != j && js.leq(j, h)));
    let mut positions = Vec::new();
    for &j in maximal {
        let p = steps
            .iter()
            .position(|c| *c == js.ji[j])
            .ok_or_else(|| PipelineError::WitnessMissing(js.ji[j].to_string()))?;
        positions.push(p);
    }
    positions.sort_unstable();
    if positions.is_empty() {
        // θ = Δ is already con(a, a).
        return Ok(Step3 {
            diagram: k.clone(),
            embedding: Embedding::identity(lat.clone()),
            witness: IntervalRef::new(lat.bottom(), lat.bottom()),
            positions,
        });
    }
    let (col, iv) = build_col_lattice(c_ll.len() - 1, &positions)?;
    let g = glue(k, &col, GlueSide::LowerLeft)?;
    let witness = IntervalRef::new(g.embed_b.apply(iv.lo), g.embed_b.apply(iv.hi));
    Ok(Step3 { diagram: g.diagram, embedding: g.embed_a, witness, positions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PipelineOptions {
    /// Expand every congruence, including those already principal.
    pub expand_all: bool,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub name: String,
    pub diagram: PlanarDiagram,
    /// From the previous stage (identity for the input).
    pub embedding: Embedding,
}

/// Independent checks on the final lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FinalReport {
    pub rectangular: bool,
    pub cover_preserving: bool,
    pub congruence_preserving: bool,
    pub all_principal: bool,
}

impl FinalReport {
    pub fn passed(&self) -> bool {
        self.rectangular && self.cover_preserving && self.congruence_preserving && self.all_principal
    }
}

/// A congruence of the input, its extension to the output and an interval
/// generating the extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceWitness {
    pub congruence: Congruence,
    pub extension: Congruence,
    pub interval: Option<IntervalRef>,
}

#[derive(Debug, Clone)]
pub struct PipelineTrace {
    pub stages: Vec<Stage>,
    pub step2_witnesses: Vec<Witness>,
    /// In processing order; `None` in the position when skipped as principal.
    pub processed: Vec<(Congruence, Option<Vec<usize>>)>,
    pub witnesses: Vec<CongruenceWitness>,
    pub report: FinalReport,
}

impl PipelineTrace {
    pub fn input(&self) -> &PlanarDiagram {
        &self.stages[0].diagram
    }

    pub fn output(&self) -> &PlanarDiagram {
        &self.stages.last().expect("at least one stage").diagram
    }

    /// Composite embedding of the input into the output.
    pub fn embedding(&self) -> Embedding {
        let mut e = self.stages[0].embedding.clone();
        for s in &self.stages[1..] {
            e = e.then(&s.embedding).expect("stages chain up");
        }
        e
    }
}

/// Extends a rectangular lattice to one in which every congruence is
/// principal, preserving covers and the congruence lattice.
pub fn extend_all(l: &PlanarDiagram, opts: PipelineOptions) -> Result<PipelineTrace, PipelineError> {
    require_rectangular(l)?;
    let mut stages = vec![Stage {
        name: "L".into(),
        diagram: l.clone(),
        embedding: Embedding::identity(l.lattice().clone()),
    }];
    let s2 = step2(l)?;
    let mut cur = s2.diagram.clone();
    let mut total = s2.embedding.clone();
    stages.push(Stage { name: "K2".into(), diagram: s2.diagram, embedding: s2.embedding });

    let mut order: Vec<Congruence> = ConLattice::new(l.lattice()).congruences().to_vec();
    order.sort_by(|a, b| a.num_blocks().cmp(&b.num_blocks()).then_with(|| a.cmp(b)));

    let mut processed = Vec::new();
    let mut principal: Option<(ConLattice, Vec<Option<IntervalRef>>)> = None;
    for theta in order {
        if theta.is_identity() {
            processed.push((theta, None));
            continue;
        }
        let ext = extend_congruence(&theta, &total);
        if !opts.expand_all {
            let (cl, wit) = principal.get_or_insert_with(|| {
                let cl = ConLattice::new(cur.lattice());
                let wit = cl.principal_witnesses(cur.lattice());
                (cl, wit)
            });
            if cl.index_of(&ext).is_some_and(|i| wit[i].is_some()) {
                processed.push((theta, None));
                continue;
            }
        }
        let s3 = step3_one(&cur, &ext)?;
        total = total.then(&s3.embedding)?;
        cur = s3.diagram.clone();
        principal = None;
        processed.push((theta.clone(), Some(s3.positions)));
        stages.push(Stage {
            name: format!("K2[{}]", stages.len() - 1),
            diagram: s3.diagram,
            embedding: s3.embedding,
        });
    }

    let cl = ConLattice::new(cur.lattice());
    let wit = cl.principal_witnesses(cur.lattice());
    let input_cl = ConLattice::new(l.lattice());
    let witnesses = input_cl
        .congruences()
        .iter()
        .map(|theta| {
            let extension = extend_congruence(theta, &total);
            let interval = cl.index_of(&extension).and_then(|i| wit[i]);
            CongruenceWitness { congruence: theta.clone(), extension, interval }
        })
        .collect();
    let report = FinalReport {
        rectangular: is_rectangular(&cur).is_some(),
        cover_preserving: is_cover_preserving_extension(&total),
        congruence_preserving: is_congruence_preserving_extension(&total),
        all_principal: wit.iter().all(Option::is_some),
    };
    Ok(PipelineTrace {
        stages,
        step2_witnesses: s2.witnesses,
        processed,
        witnesses,
        report,
    })
}

/// One insertion made by the representation search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    Fork { o: Elem, l: Elem, r: Elem, t: Elem },
    Eye { o: Elem, l: Elem, r: Elem, t: Elem },
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Insertion::Fork { o, l, r, t } => write!(f, "fork at {{{o}; {l}, {r}; {t}}}"),
            Insertion::Eye { o, l, r, t } => write!(f, "eye at {{{o}; {l}, {r}; {t}}}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Representation {
    /// Starting grid `(m, n)` and the insertions applied to it.
    pub grid: (usize, usize),
    pub insertions: Vec<Insertion>,
    pub k1: PlanarDiagram,
    pub trace: PipelineTrace,
    /// For each element of the target lattice, the congruence of `K` it maps to.
    pub table: Vec<Congruence>,
}

/// Search limits for [`represent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of fork and eye insertions on top of a grid.
    pub budget: usize,
    pub max_size: usize,
    pub max_nodes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { budget: 8, max_size: 60, max_nodes: 20_000 }
    }
}

struct Node {
    grid: (usize, usize),
    insertions: Vec<Insertion>,
    diagram: PlanarDiagram,
    slim: bool,
}

/// Finds a rectangular lattice whose congruence lattice is isomorphic to
/// `target`, by breadth-first search over grids with forks and eyes, then
/// extends it until every congruence is principal.
pub fn represent(target: &Lattice, opts: SearchOptions) -> Result<Representation, PipelineError> {
    if !target.is_distributive() {
        return Err(PipelineError::NotDistributive);
    }
    let j = target.elements().filter(|&x| target.is_join_irreducible(x)).count();
    if j == 0 {
        // Only a one-element lattice has a trivial congruence lattice.
        return Err(PipelineError::SearchExhausted(opts.budget));
    }
    let mut grids: Vec<(usize, usize)> = (2..=5).flat_map(|m| (2..=5).map(move |n| (m, n))).collect();
    grids.sort_by_key(|&(m, n)| (m + n, m));

    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for &(m, n) in &grids {
        let d = grid(m, n)?;
        if seen.insert(d.canonical_form()) {
            queue.push_back((
                0usize,
                Node { grid: (m, n), insertions: Vec::new(), diagram: d, slim: true },
            ));
        }
    }
    let mut visited = 0;
    while let Some((depth, node)) = queue.pop_front() {
        visited += 1;
        if visited > opts.max_nodes {
            break;
        }
        let ji = JiStructure::new(node.diagram.lattice()).ji.len();
        let left = opts.budget - depth;
        let reachable = if node.slim { ji + left } else { ji };
        if j > reachable || j + left < ji {
            continue;
        }
        if ji == j {
            let cl = ConLattice::new(node.diagram.lattice());
            if let Some(iso) = find_isomorphism(target, &cl.as_lattice()) {
                let trace = extend_all(&node.diagram, PipelineOptions::default())?;
                let e = trace.embedding();
                let table = iso.iter().map(|&c| extend_congruence(cl.get(c), &e)).collect();
                return Ok(Representation {
                    grid: node.grid,
                    insertions: node.insertions,
                    k1: node.diagram,
                    trace,
                    table,
                });
            }
        }
        if left == 0 {
            continue;
        }
        for s in covering_squares(&node.diagram) {
            let mut children = Vec::new();
            if node.slim {
                if let Ok(f) = insert_fork(&node.diagram, s) {
                    children.push((f.diagram, Insertion::Fork { o: s.o, l: s.l, r: s.r, t: s.t }, true));
                }
            }
            if let Ok((d, _, _)) = insert_eye(&node.diagram, s) {
                children.push((d, Insertion::Eye { o: s.o, l: s.l, r: s.r, t: s.t }, false));
            }
            for (d, ins, slim) in children {
                if d.len() > opts.max_size || !seen.insert(d.canonical_form()) {
                    continue;
                }
                let mut insertions = node.insertions.clone();
                insertions.push(ins);
                queue.push_back((depth + 1, Node { grid: node.grid, insertions, diagram: d, slim }));
            }
        }
    }
    Err(PipelineError::SearchExhausted(opts.budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sidedness {
    Left,
    Right,
    TwoSided,
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sidedness::Left => "left-sided",
            Sidedness::Right => "right-sided",
            Sidedness::TwoSided => "two-sided",
        })
    }
}

/// Whether `γ` is generated by a prime interval of `C_ll`, of `C_lr`, or both.
pub fn classify_ji_congruence(d: &PlanarDiagram, gamma: &Congruence) -> Result<Sidedness, PipelineError> {
    require_rectangular(d)?;
    let l = d.lattice();
    if gamma.len() != l.len() {
        return Err(PipelineError::SizeMismatch { got: gamma.len(), want: l.len() });
    }
    if !JiStructure::new(l).ji.contains(gamma) {
        return Err(PipelineError::NotJoinIrreducible);
    }
    let bc = boundary_chains(d)?;
    let left = chain_step_cons(l, &bc.c_ll).contains(gamma);
    let right = chain_step_cons(l, &bc.c_lr).contains(gamma);
    Ok(match (left, right) {
        (true, false) => Sidedness::Left,
        (false, true) => Sidedness::Right,
        _ => Sidedness::TwoSided,
    })
}

/// Whether some congruence restricts to `bl` on `C_ll` and `br` on `C_lr`.
///
/// Both must be convex. A collapsed step `p` forces every boundary step `q`
/// with `con(q) ⊆ con(p)`; since join-irreducible congruences are join-prime
/// in a distributive lattice, nothing else is forced.
pub fn is_compatible_pair(
    d: &PlanarDiagram,
    bl: &PartialCongruence,
    br: &PartialCongruence,
) -> Result<bool, PipelineError> {
    let Some((left, right)) = boundary_steps(d, bl, br)? else {
        return Ok(false);
    };
    let all: Vec<(&Congruence, bool)> = left.iter().chain(&right).map(|(c, b)| (c, *b)).collect();
    Ok(all.iter().filter(|(_, collapsed)| *collapsed).all(|(p, _)| {
        all.iter().all(|(q, collapsed)| *collapsed || !q.refines(p))
    }))
}

/// The condition with `con(q) = con(p)` in place of `con(q) ⊆ con(p)`.
/// Kept for comparison; it accepts pairs no congruence realises.
pub fn is_compatible_pair_equal_cons(
    d: &PlanarDiagram,
    bl: &PartialCongruence,
    br: &PartialCongruence,
) -> Result<bool, PipelineError> {
    let Some((left, right)) = boundary_steps(d, bl, br)? else {
        return Ok(false);
    };
    let check = |from: &[(Congruence, bool)], to: &[(Congruence, bool)]| {
        from.iter()
            .filter(|(_, c)| *c)
            .all(|(p, _)| to.iter().all(|(q, c)| *c || q != p))
    };
    Ok(check(&left, &right) && check(&right, &left))
}

type Steps = Vec<(Congruence, bool)>;

fn boundary_steps(
    d: &PlanarDiagram,
    bl: &PartialCongruence,
    br: &PartialCongruence,
) -> Result<Option<(Steps, Steps)>, PipelineError> {
    require_rectangular(d)?;
    let bc = boundary_chains(d)?;
    if bl.domain() != bc.c_ll.as_slice() || br.domain() != bc.c_lr.as_slice() {
        return Err(PlanarError::DomainMismatch.into());
    }
    if !bl.is_convex() || !br.is_convex() {
        return Ok(None);
    }
    let l = d.lattice();
    let steps = |chain: &[Elem], pc: &PartialCongruence| -> Steps {
        chain_step_cons(l, chain)
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, pc.collapses_step(i)))
            .collect()
    };
    Ok(Some((steps(&bc.c_ll, bl), steps(&bc.c_lr, br))))
}

/// Existence check by enumeration: some `θ ∈ Con d` restricts to the pair.
pub fn is_realised_pair(
    d: &PlanarDiagram,
    cl: &ConLattice,
    bl: &PartialCongruence,
    br: &PartialCongruence,
) -> Result<bool, PipelineError> {
    for theta in cl.congruences() {
        let (pl, pr) = boundary_pair(d, theta)?;
        if &pl == bl && &pr == br {
            return Ok(true);
        }
    }
    Ok(false)
}
