//! Finite lattices with planar diagrams: congruences, forks and eyes,
//! rectangular gluing, and an extension in which every congruence is
//! principal.

pub mod cli;
pub mod congruence;
pub mod corpus;
pub mod fork_eye;
pub mod io;
pub mod lattice;
pub mod pipeline;
pub mod planar;

pub use congruence::{
    boundary_pair, con_lattice, generated_congruence, is_all_principal,
    is_congruence_preserving_extension, is_cover_preserving_extension, principal_congruence,
    reconstruct_from_pair, ConLattice, Congruence, PartialCongruence,
};
pub use fork_eye::{
    covering_squares, eyes, insert_eye, insert_fork, is_slim, remove_eye, slim_down,
    CoveringSquare, ForkResult,
};
pub use lattice::{Elem, Embedding, IntervalRef, Lattice, LatticeError, Perspectivity};
pub use pipeline::{
    classify_ji_congruence, extend_all, is_compatible_pair, represent, step2, PipelineTrace,
    Sidedness,
};
pub use planar::{boundary_chains, glue, grid, is_patch, is_rectangular, GlueSide, PlanarDiagram};
