use proptest::prelude::*;

use semilat::fork_eye::count_ji_congruences;
use semilat::io::{emit_lat, parse};
use semilat::planar::{corners, split_at, GlueSide};
use semilat::{
    boundary_chains, boundary_pair, con_lattice, covering_squares, eyes, generated_congruence,
    glue, grid, insert_eye, insert_fork, is_cover_preserving_extension, is_patch, is_rectangular,
    is_slim, principal_congruence, reconstruct_from_pair, remove_eye, slim_down, IntervalRef,
    Perspectivity, PlanarDiagram,
};

/// A grid with forks and then eyes at the chosen (wrapped) square indices.
fn build(m: usize, n: usize, forks: &[usize], eye_picks: &[usize]) -> PlanarDiagram {
    let mut d = grid(m, n).unwrap();
    for &k in forks {
        let sq = covering_squares(&d);
        let f = insert_fork(&d, sq[k % sq.len()]).unwrap();
        if f.diagram.len() > 60 {
            break;
        }
        d = f.diagram;
    }
    for &k in eye_picks {
        let sq = covering_squares(&d);
        d = insert_eye(&d, sq[k % sq.len()]).unwrap().0;
    }
    d
}

fn slim_strategy() -> impl Strategy<Value = PlanarDiagram> {
    (2usize..=4, 2usize..=4, prop::collection::vec(0usize..64, 0..=3))
        .prop_map(|(m, n, f)| build(m, n, &f, &[]))
}

fn any_strategy() -> impl Strategy<Value = PlanarDiagram> {
    (
        2usize..=4,
        2usize..=4,
        prop::collection::vec(0usize..64, 0..=3),
        prop::collection::vec(0usize..64, 0..=2),
    )
        .prop_map(|(m, n, f, e)| build(m, n, &f, &e))
}

fn is_grid(d: &PlanarDiagram) -> bool {
    let (m, n) = (boundary_chains(d).unwrap().c_ll.len(), boundary_chains(d).unwrap().c_lr.len());
    d.len() == m * n
}

/// Same diagram with ids permuted by `perm`, through the file format.
fn relabel(d: &PlanarDiagram, perm: &[usize]) -> PlanarDiagram {
    let l = d.lattice();
    let mut text = format!("lattice {}\n", d.len());
    for (a, b) in l.covers() {
        text.push_str(&format!("cover {} {}\n", perm[a], perm[b]));
    }
    let list = |v: &[usize]| v.iter().map(|&x| perm[x].to_string()).collect::<Vec<_>>().join(" ");
    for x in l.elements() {
        text.push_str(&format!("uporder {}: {}\n", perm[x], list(d.up_order(x))));
        text.push_str(&format!("downorder {}: {}\n", perm[x], list(d.down_order(x))));
    }
    parse(&text).unwrap().diagram.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn forks_keep_slim_rectangular(d in slim_strategy(), pick in 0usize..64) {
        let sq = covering_squares(&d);
        let s = sq[pick % sq.len()];
        let f = insert_fork(&d, s).unwrap();
        let out = &f.diagram;
        prop_assert!(out.lattice().is_semimodular());
        prop_assert!(is_slim(out));
        prop_assert!(is_rectangular(out).is_some());
        prop_assert_eq!(is_patch(out), is_patch(&d));
        let l = out.lattice();
        let (a, b) = (IntervalRef::new(s.o, f.a()), IntervalRef::new(s.o, f.b()));
        for &y in &f.new_elements[3..] {
            let old: Vec<usize> = l.lower_covers(y).iter().copied().filter(|&x| x < d.len()).collect();
            prop_assert_eq!(old.len(), 1);
            let p = IntervalRef::new(old[0], y);
            let up = |q| l.perspectivity(p, q).unwrap() == Perspectivity::Up;
            prop_assert!(up(a) || up(b));
        }
        let bc = boundary_chains(out).unwrap();
        let on = |c: &[usize], iv: IntervalRef| c.windows(2).any(|w| w == [iv.lo, iv.hi]);
        prop_assert!(on(&bc.c_ll, f.left_terminal));
        prop_assert!(on(&bc.c_lr, f.right_terminal));
        // +1 on grids; a fork inside an earlier fork's upper squares can add nothing.
        let delta = count_ji_congruences(out) as i64 - count_ji_congruences(&d) as i64;
        prop_assert!((0..=1).contains(&delta));
        if is_grid(&d) {
            prop_assert_eq!(delta, 1);
        }
    }

    #[test]
    fn corners_are_unique_when_rectangular(d in any_strategy()) {
        let (lc, rc) = is_rectangular(&d).unwrap();
        prop_assert_eq!(corners(&d), (vec![lc], vec![rc]));
        let m = d.mirror();
        prop_assert_eq!(is_rectangular(&m), Some((rc, lc)));
        prop_assert_eq!(m.mirror(), d);
    }

    #[test]
    fn glue_sizes_and_embeddings(a in any_strategy(), b in any_strategy(), left in any::<bool>()) {
        let (side, ca, cb) = if left {
            (GlueSide::LowerLeft, boundary_chains(&a).unwrap().c_ll, boundary_chains(&b).unwrap().c_ur)
        } else {
            (GlueSide::LowerRight, boundary_chains(&a).unwrap().c_lr, boundary_chains(&b).unwrap().c_ul)
        };
        match glue(&a, &b, side) {
            Err(_) => prop_assert_ne!(ca.len(), cb.len()),
            Ok(g) => {
                prop_assert_eq!(ca.len(), cb.len());
                prop_assert_eq!(g.diagram.len(), a.len() + b.len() - ca.len());
                prop_assert!(is_rectangular(&g.diagram).is_some());
                prop_assert!(g.diagram.lattice().is_semimodular());
                prop_assert!(is_cover_preserving_extension(&g.embed_a));
                prop_assert!(is_cover_preserving_extension(&g.embed_b));
                let l = g.diagram.lattice();
                for (x, y) in l.covers().into_iter().take(6) {
                    let theta = principal_congruence(l, x, y);
                    prop_assert!(theta.pullback(&g.embed_a).is_congruence_of(a.lattice()));
                    prop_assert!(theta.pullback(&g.embed_b).is_congruence_of(b.lattice()));
                }
            }
        }
    }

    #[test]
    fn file_round_trip(d in any_strategy()) {
        let text = emit_lat(&d);
        let back = parse(&text).unwrap().diagram.unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(emit_lat(&back), text);
    }

    #[test]
    fn canonical_form_ignores_relabelling(d in any_strategy(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..d.len()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let r = relabel(&d, &perm);
        prop_assert!(r.is_isomorphic(&d));
        prop_assert_eq!(r.canonical_form(), d.canonical_form());
    }

    #[test]
    fn eyes_merge_congruences(d in any_strategy(), pick in 0usize..64) {
        let sq = covering_squares(&d);
        let s = sq[pick % sq.len()];
        let (out, _, x) = insert_eye(&d, s).unwrap();
        let l = out.lattice();
        prop_assert!(eyes(&out).contains(&x));
        prop_assert!(count_ji_congruences(&out) <= count_ji_congruences(&d));
        prop_assert_eq!(principal_congruence(l, s.o, s.l), principal_congruence(l, s.o, s.r));
        let (back, _) = remove_eye(&out, x).unwrap();
        prop_assert!(back.is_isomorphic(&d));
    }

    #[test]
    fn slim_down_is_confluent(d in any_strategy()) {
        let a = slim_down(&d);
        let mut b = d.clone();
        while let Some(&x) = eyes(&b).last() {
            b = remove_eye(&b, x).unwrap().0;
        }
        prop_assert!(is_slim(&a));
        prop_assert!(a.is_isomorphic(&b));
    }

    #[test]
    fn generated_congruences_are_congruences(d in any_strategy(), picks in prop::collection::vec((0usize..64, 0usize..64), 1..4)) {
        let l = d.lattice();
        let pairs: Vec<(usize, usize)> = picks.iter().map(|&(a, b)| (a % l.len(), b % l.len())).collect();
        let theta = generated_congruence(l, &pairs);
        prop_assert!(theta.is_congruence_of(l));
        prop_assert!(pairs.iter().all(|&(a, b)| theta.same(a, b)));
    }

    #[test]
    fn boundary_pair_reconstructs(d in any_strategy()) {
        for theta in con_lattice(d.lattice()).congruences() {
            let (pl, pr) = boundary_pair(&d, theta).unwrap();
            prop_assert!(pl.is_convex() && pr.is_convex());
            prop_assert_eq!(&reconstruct_from_pair(&d, &pl, &pr).unwrap(), theta);
        }
    }

    #[test]
    fn split_reglues_when_the_interval_is_a_chain(d in any_strategy()) {
        let (lc, rc) = is_rectangular(&d).unwrap();
        let l = d.lattice();
        for a in l.ideal(lc) {
            let s = split_at(&d, a).unwrap();
            if l.interval_chain(a, l.join(rc, a)).is_ok() {
                prop_assert!(s.reglue().unwrap().diagram.is_isomorphic(&d));
            } else {
                prop_assert!(s.reglue().is_err());
            }
        }
    }
}

