//! Seeded generator of small rectangular lattices for property checks.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fork_eye::{covering_squares, insert_eye, insert_fork};
use crate::planar::{grid, is_rectangular, PlanarDiagram};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    /// Grid size and insertions, e.g. `grid(3,2)+f4+e0`.
    pub name: String,
    pub diagram: PlanarDiagram,
    pub forks: usize,
    pub eyes: usize,
}

/// Limits for [`corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub max_side: usize,
    pub max_forks: usize,
    pub max_eyes: usize,
    pub max_size: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { seed: 0x5eed, count: 60, max_side: 4, max_forks: 3, max_eyes: 2, max_size: 60 }
    }
}

/// Every grid up to `max_side × max_side`, then random fork and eye
/// insertions, without duplicates up to diagram isomorphism.
pub fn corpus(spec: CorpusSpec) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in 2..=spec.max_side {
        for n in 2..=spec.max_side {
            let d = grid(m, n).expect("grid");
            if seen.insert(d.canonical_form()) && out.len() < spec.count {
                out.push(CorpusEntry { name: format!("grid({m},{n})"), diagram: d, forks: 0, eyes: 0 });
            }
        }
    }
    let mut attempts = 0;
    while out.len() < spec.count && attempts < 50 * spec.count {
        attempts += 1;
        let (m, n) = (rng.random_range(2..=spec.max_side), rng.random_range(2..=spec.max_side));
        let forks = rng.random_range(0..=spec.max_forks);
        let eyes = rng.random_range(0..=spec.max_eyes);
        let mut d = grid(m, n).expect("grid");
        let mut name = format!("grid({m},{n})");
        let mut ok = true;
        for _ in 0..forks {
            let squares = covering_squares(&d);
            let s = squares[rng.random_range(0..squares.len())];
            match insert_fork(&d, s) {
                Ok(f) if f.diagram.len() <= spec.max_size => {
                    d = f.diagram;
                    name.push_str(&format!("+f{}", s.o));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        for _ in 0..eyes {
            if !ok || d.len() >= spec.max_size {
                ok = false;
                break;
            }
            let squares = covering_squares(&d);
            let s = squares[rng.random_range(0..squares.len())];
            d = insert_eye(&d, s).expect("square from the diagram").0;
            name.push_str(&format!("+e{}", s.o));
        }
        if ok && is_rectangular(&d).is_some() && seen.insert(d.canonical_form()) {
            out.push(CorpusEntry { name, diagram: d, forks, eyes });
        }
    }
    out
}
