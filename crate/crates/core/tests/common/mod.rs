//! Brute-force oracles. Nothing here uses the library's order, join, meet or
//! congruence code; lattices are rebuilt from their cover lists.

#![allow(dead_code)]

use std::collections::BTreeSet;

use semilat::planar::{grid, PlanarDiagram};
use semilat::{covering_squares, insert_fork, Lattice};

/// Order, joins and meets recomputed from a cover list.
pub struct Oracle {
    pub n: usize,
    pub leq: Vec<Vec<bool>>,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
    pub covers: Vec<(usize, usize)>,
}

impl Oracle {
    pub fn new(n: usize, covers: &[(usize, usize)]) -> Self {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let bound = |x: usize, y: usize, up: bool| -> usize {
            let cands: Vec<usize> = (0..n)
                .filter(|&z| if up { leq[x][z] && leq[y][z] } else { leq[z][x] && leq[z][y] })
                .collect();
            let best: Vec<usize> = cands
                .iter()
                .copied()
                .filter(|&z| cands.iter().all(|&w| if up { leq[z][w] } else { leq[w][z] }))
                .collect();
            assert_eq!(best.len(), 1, "oracle input is not a lattice");
            best[0]
        };
        let join = (0..n).map(|x| (0..n).map(|y| bound(x, y, true)).collect()).collect();
        let meet = (0..n).map(|x| (0..n).map(|y| bound(x, y, false)).collect()).collect();
        Self { n, leq, join, meet, covers: covers.to_vec() }
    }

    pub fn of(l: &Lattice) -> Self {
        Self::new(l.len(), &l.covers())
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        a != b
            && self.leq[a][b]
            && (0..self.n).all(|z| z == a || z == b || !(self.leq[a][z] && self.leq[z][b]))
    }

    /// Labels with the least element of each block are substitution-closed.
    pub fn is_congruence(&self, labels: &[usize]) -> bool {
        for x in 0..self.n {
            for y in 0..self.n {
                if labels[x] != labels[y] {
                    continue;
                }
                for z in 0..self.n {
                    if labels[self.join[x][z]] != labels[self.join[y][z]]
                        || labels[self.meet[x][z]] != labels[self.meet[y][z]]
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every congruence, by filtering all set partitions.
    pub fn all_congruences(&self) -> BTreeSet<Vec<usize>> {
        set_partitions(self.n).into_iter().filter(|p| self.is_congruence(p)).collect()
    }

    /// Least congruence containing the pairs: meet of all congruences above them.
    pub fn generated(&self, all: &BTreeSet<Vec<usize>>, pairs: &[(usize, usize)]) -> Vec<usize> {
        let above: Vec<&Vec<usize>> = all
            .iter()
            .filter(|p| pairs.iter().all(|&(a, b)| p[a] == p[b]))
            .collect();
        let mut labels = vec![0; self.n];
        for x in 0..self.n {
            labels[x] = (0..=x)
                .find(|&y| above.iter().all(|p| p[x] == p[y]))
                .unwrap();
        }
        labels
    }

    /// Every congruence, as the substitution-closed partitions spanned by
    /// subsets of collapsed covers. Feasible up to about 20 covers.
    pub fn congruences_by_covers(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for mask in 0u64..1 << self.covers.len() {
            let mut parent: Vec<usize> = (0..self.n).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    x = p[x];
                }
                x
            }
            for (i, &(a, b)) in self.covers.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
            let roots: Vec<usize> = (0..self.n).map(|x| find(&mut parent, x)).collect();
            let labels: Vec<usize> =
                roots.iter().map(|&r| (0..self.n).find(|&y| roots[y] == r).unwrap()).collect();
            if self.is_congruence(&labels) {
                out.insert(labels);
            }
        }
        out
    }

    /// Members with exactly one lower cover under refinement.
    pub fn count_join_irreducibles(all: &BTreeSet<Vec<usize>>) -> usize {
        all.iter()
            .filter(|c| {
                let below: Vec<&Vec<usize>> =
                    all.iter().filter(|d| d != c && Self::refines(d, c)).collect();
                below
                    .iter()
                    .filter(|d| !below.iter().any(|e| e != *d && Self::refines(d, e)))
                    .count()
                    == 1
            })
            .count()
    }

    pub fn refines(a: &[usize], b: &[usize]) -> bool {
        (0..a.len()).all(|x| (0..a.len()).all(|y| a[x] != a[y] || b[x] == b[y]))
    }

    /// Up-perspectivity `[a, b] ↗ [c, d]` straight from the definition.
    pub fn up_perspective(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        self.meet[b][c] == a && self.join[b][c] == d
    }

    pub fn is_semimodular(&self) -> bool {
        (0..self.n).all(|a| {
            (0..self.n).all(|b| {
                let m = self.meet[a][b];
                !self.is_cover(m, a) || self.is_cover(b, self.join[a][b]) || a == b
            })
        })
    }

    pub fn is_distributive(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                (0..self.n).all(|z| self.meet[x][self.join[y][z]] == self.join[self.meet[x][y]][self.meet[x][z]])
            })
        })
    }
}

/// All set partitions of `0..n` as least-member labels (restricted growth).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rgs.len() {
            // Convert block numbers to least members.
            let mut first = Vec::new();
            let labels = rgs
                .iter()
                .enumerate()
                .map(|(x, &b)| {
                    if b == first.len() {
                        first.push(x);
                    }
                    first[b]
                })
                .collect();
            out.push(labels);
            return;
        }
        for b in 0..=max {
            rgs[i] = b;
            rec(i + 1, max.max(b + 1), rgs, out);
        }
    }
    if n > 0 {
        rec(1, 1, &mut rgs, &mut out);
    }
    out
}

/// Isomorphism of two cover relations by trying every bijection.
pub fn brute_isomorphic(n: usize, a: &[(usize, usize)], b: &[(usize, usize)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let target: BTreeSet<(usize, usize)> = b.iter().copied().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| a.iter().all(|&(x, y)| target.contains(&(p[x], p[y]))))
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == v.len() {
        return f(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        if permutations(v, k + 1, f) {
            return true;
        }
        v.swap(k, i);
    }
    false
}

/// `o=0 a=1 b=2 c=3 l=4 r=5 1=6`.
pub const S7_COVERS: [(usize, usize); 9] =
    [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 5), (3, 6), (4, 6), (5, 6)];

/// S7 as produced by a fork in the square, with its named elements.
pub struct S7 {
    pub d: PlanarDiagram,
    pub o: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub l: usize,
    pub r: usize,
    pub top: usize,
}

pub fn s7() -> S7 {
    let g = grid(2, 2).unwrap();
    let s = covering_squares(&g)[0];
    let f = insert_fork(&g, s).unwrap();
    S7 { o: s.o, a: f.a(), b: f.b(), c: f.c(), l: s.l, r: s.r, top: s.t, d: f.diagram }
}
