mod common;

use common::{graph_from_mask, Tits};
use gpfactor::coxeter::CoxeterGroup;
use gpfactor::{SimpleGraph, Truth, VertexSet};
use proptest::prelude::*;

fn arb_graph(min: usize, max: usize) -> impl Strategy<Value = SimpleGraph> {
    (min..=max).prop_flat_map(|n| {
        let m = n * n.saturating_sub(1) / 2;
        any::<u64>().prop_map(move |bits| graph_from_mask(n, if m == 0 { 0 } else { bits & ((1u64 << m) - 1) }))
    })
}

fn graph_and_word(max_n: usize, max_len: usize) -> impl Strategy<Value = (SimpleGraph, Vec<usize>)> {
    arb_graph(1, max_n).prop_flat_map(move |g| {
        let n = g.len();
        (Just(g), prop::collection::vec(0..n, 0..=max_len))
    })
}

/// Largest eigenvalue modulus of the weighted layer-succession matrix, built
/// from the definition: layer `T′` may follow `T` when every `v ∈ T′` lies
/// outside `T` and fails to commute with some member of `T`.
fn transfer_radius(g: &SimpleGraph, q: &[f64]) -> f64 {
    let cliques: Vec<VertexSet> = g.all().subsets().filter(|s| !s.is_empty() && g.is_clique(*s)).collect();
    let k = cliques.len();
    let follows = |t: VertexSet, u: VertexSet| u.iter().all(|v| !t.contains(v) && t.iter().any(|x| !g.adjacent(x, v)));
    let m = nalgebra::DMatrix::from_fn(k, k, |i, j| {
        if follows(cliques[i], cliques[j]) {
            cliques[j].iter().map(|v| q[v]).product()
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn normal_form_is_a_reduced_spelling_of_the_same_element((g, w) in graph_and_word(7, 14)) {
        let cg = CoxeterGroup::new(&g);
        let tits = Tits::new(&g);
        let nf = cg.normalize(&w).unwrap();
        let letters = nf.letters();
        prop_assert_eq!(tits.word(&letters), tits.word(&w));
        prop_assert!(cg.is_reduced(&letters).unwrap());
        prop_assert_eq!(cg.normalize(&letters).unwrap(), nf.clone());
        prop_assert_eq!(nf.len(), letters.len());
        for l in nf.layers() {
            prop_assert!(!l.is_empty() && g.is_clique(*l));
        }
        for pair in nf.layers().windows(2) {
            prop_assert!(cg.may_follow(pair[0], pair[1]));
        }
    }

    #[test]
    fn commuting_swaps_and_cancelling_pairs_keep_the_normal_form(
        (g, w) in graph_and_word(6, 12),
        pos in any::<prop::sample::Index>(),
        ins in any::<prop::sample::Index>(),
        v in any::<prop::sample::Index>(),
    ) {
        let cg = CoxeterGroup::new(&g);
        let nf = cg.normalize(&w).unwrap();
        let mut swapped = w.clone();
        if w.len() >= 2 {
            let i = pos.index(w.len() - 1);
            if g.adjacent(w[i], w[i + 1]) {
                swapped.swap(i, i + 1);
            }
        }
        prop_assert_eq!(cg.normalize(&swapped).unwrap(), nf.clone());
        let mut padded = w.clone();
        let at = ins.index(w.len() + 1);
        let x = v.index(g.len());
        padded.splice(at..at, [x, x]);
        prop_assert_eq!(cg.normalize(&padded).unwrap(), nf);
    }

    #[test]
    fn group_axioms((g, a) in graph_and_word(6, 8), b in prop::collection::vec(any::<prop::sample::Index>(), 0..8),
                    c in prop::collection::vec(any::<prop::sample::Index>(), 0..8)) {
        let cg = CoxeterGroup::new(&g);
        let tits = Tits::new(&g);
        let n = g.len();
        let b: Vec<usize> = b.iter().map(|i| i.index(n)).collect();
        let c: Vec<usize> = c.iter().map(|i| i.index(n)).collect();
        let (x, y, z) = (cg.normalize(&a).unwrap(), cg.normalize(&b).unwrap(), cg.normalize(&c).unwrap());
        let e = cg.identity();
        let xy = cg.multiply(&x, &y).unwrap();
        prop_assert_eq!(tits.word(&xy.letters()), tits.mul(&tits.word(&a), &tits.word(&b)));
        prop_assert_eq!(cg.multiply(&xy, &z).unwrap(), cg.multiply(&x, &cg.multiply(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(cg.multiply(&x, &e).unwrap(), x.clone());
        prop_assert_eq!(cg.multiply(&e, &x).unwrap(), x.clone());
        let xi = cg.inverse(&x).unwrap();
        prop_assert!(cg.multiply(&x, &xi).unwrap().is_identity());
        prop_assert!(cg.multiply(&xi, &x).unwrap().is_identity());
        prop_assert_eq!(cg.inverse(&xi).unwrap(), x);
    }

    #[test]
    fn first_and_last_letters_shorten((g, w) in graph_and_word(7, 12)) {
        let cg = CoxeterGroup::new(&g);
        let x = cg.normalize(&w).unwrap();
        for v in 0..g.len() {
            let mut left = vec![v];
            left.extend(x.letters());
            let mut right = x.letters();
            right.push(v);
            let shorter_left = cg.normalize(&left).unwrap().len() < x.len();
            let shorter_right = cg.normalize(&right).unwrap().len() < x.len();
            prop_assert_eq!(x.first_letters().contains(v), shorter_left);
            prop_assert_eq!(cg.last_letters(&x).contains(v), shorter_right);
            let lam = VertexSet::singleton(v);
            prop_assert_eq!(cg.membership_w(&x, lam), !shorter_left);
            prop_assert_eq!(cg.membership_w_prime(&x, lam), !shorter_right);
        }
        prop_assert_eq!(cg.link_of_word(&x), g.link(x.support()));
    }

    #[test]
    fn enumeration_matches_transfer_counts(g in arb_graph(1, 6)) {
        let cg = CoxeterGroup::new(&g);
        let words = cg.enumerate_up_to(6, 1_000_000).unwrap();
        let mut counts = vec![0u64; 7];
        for (i, w) in words.iter().enumerate() {
            counts[w.len()] += 1;
            if i > 0 {
                prop_assert!(words[i - 1].len() <= w.len());
            }
        }
        let distinct: std::collections::BTreeSet<Vec<usize>> = words.iter().map(|w| w.letters()).collect();
        prop_assert_eq!(distinct.len(), words.len());
        let tr = cg.growth_counts_transfer(6, &vec![1.0; g.len()], 1 << 20).unwrap();
        prop_assert_eq!(&tr.counts, &counts);
        prop_assert_eq!(cg.growth_counts_bfs(6, 1_000_000).unwrap().counts, counts);
    }

    #[test]
    fn weighted_sums_match_enumeration(g in arb_graph(1, 5), q in prop::collection::vec(0.05f64..=1.0, 5)) {
        let cg = CoxeterGroup::new(&g);
        let q = &q[..g.len()];
        let tr = cg.growth_counts_transfer(7, q, 1 << 20).unwrap().weighted.unwrap();
        let mut direct = vec![0.0; 8];
        for w in cg.enumerate_up_to(7, 1_000_000).unwrap() {
            direct[w.len()] += w.letters().iter().map(|&v| q[v]).product::<f64>();
        }
        for (a, b) in tr.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn spectral_radius_matches_growth_rate(g in arb_graph(1, 5), q in prop::collection::vec(0.3f64..=1.0, 5)) {
        let cg = CoxeterGroup::new(&g);
        let q = &q[..g.len()];
        let h = cg.hecke_sum_converges(q, 1 << 20).unwrap();
        if h.spectral_radius == 0.0 {
            prop_assert_eq!(h.converges, Truth::Yes);
            let t = cg.growth_counts_transfer(g.len() + 3, q, 1 << 20).unwrap().weighted.unwrap();
            prop_assert!(t[g.len() + 1..].iter().all(|&x| x == 0.0));
        } else {
            let rho = transfer_radius(&g, q);
            prop_assert!((rho - h.spectral_radius).abs() < 1e-6, "eigenvalue {} vs {}", rho, h.spectral_radius);
            match h.converges {
                Truth::Yes => prop_assert!(h.spectral_radius < 1.0),
                Truth::No => prop_assert!(h.spectral_radius > 1.0 - 1e-6),
                Truth::Unknown => prop_assert!((h.spectral_radius - 1.0).abs() < 1e-3),
            }
        }
    }

    #[test]
    fn exchange_lemma_on_random_graphs(g in arb_graph(2, 5), a in any::<u8>(), b in any::<u8>()) {
        let cg = CoxeterGroup::new(&g);
        let g1 = VertexSet(u128::from(a)).intersection(g.all());
        let g2 = VertexSet(u128::from(b)).intersection(g.all());
        let r = cg.verify_combinatorics_lemma(g1, g2, 3, 1_000_000).unwrap();
        prop_assert!(r.passed, "{:?}", r.counterexample);
    }
}

#[test]
fn convergence_of_known_hecke_sums() {
    let d = CoxeterGroup::new(&SimpleGraph::edgeless(2));
    let h = d.hecke_sum_converges(&[0.5, 0.5], 1 << 20).unwrap();
    assert_eq!(h.converges, Truth::Yes);
    assert!((h.spectral_radius - 0.5).abs() < 1e-9);
    assert_eq!(
        d.hecke_sum_converges(&[1.0, 1.0], 1 << 20).unwrap().converges,
        Truth::No
    );
    let mixed = d.hecke_sum_converges(&[1.0, 0.5], 1 << 20).unwrap();
    assert_eq!(mixed.converges, Truth::Yes);
    assert!((mixed.spectral_radius - 0.5f64.sqrt()).abs() < 1e-9);

    // three isolated vertices: 3·2^(n-1) words of length n
    let free3 = CoxeterGroup::new(&SimpleGraph::edgeless(3));
    assert_eq!(
        free3.growth_counts_bfs(6, 10_000).unwrap().counts,
        vec![1, 3, 6, 12, 24, 48, 96]
    );
    assert_eq!(
        free3.hecke_sum_converges(&[0.5; 3], 1 << 20).unwrap().converges,
        Truth::Unknown
    );
    assert_eq!(
        free3.hecke_sum_converges(&[0.4; 3], 1 << 20).unwrap().converges,
        Truth::Yes
    );
    assert_eq!(
        free3.hecke_sum_converges(&[0.6; 3], 1 << 20).unwrap().converges,
        Truth::No
    );

    for n in 1..=5 {
        let h = CoxeterGroup::new(&SimpleGraph::complete(n))
            .hecke_sum_converges(&vec![1.0; n], 1 << 20)
            .unwrap();
        assert_eq!(h.converges, Truth::Yes);
        assert_eq!(h.spectral_radius, 0.0);
    }
    // Z_4 is a product of two infinite dihedral groups
    let z4 = CoxeterGroup::new(&SimpleGraph::cycle(4));
    assert_eq!(
        z4.hecke_sum_converges(&[0.9; 4], 1 << 20).unwrap().converges,
        Truth::Yes
    );
    assert_eq!(z4.hecke_sum_converges(&[1.0; 4], 1 << 20).unwrap().converges, Truth::No);
}

#[test]
fn growth_of_small_cycles() {
    // frozen from brute-force enumeration
    let z5 = CoxeterGroup::new(&SimpleGraph::cycle(5));
    assert_eq!(z5.growth_counts_bfs(4, 10_000).unwrap().counts, vec![1, 5, 15, 40, 105]);
    let z4 = CoxeterGroup::new(&SimpleGraph::cycle(4));
    assert_eq!(z4.growth_counts_bfs(4, 10_000).unwrap().counts, vec![1, 4, 8, 12, 16]);
}

#[test]
fn word_ids_round_trip() {
    let g = SimpleGraph::cycle(5);
    let cg = CoxeterGroup::new(&g);
    let w = cg.normalize_ids(&["3", "1", "2", "2", "4"]).unwrap();
    assert_eq!(cg.letter_ids(&w), ["3", "1", "4"]);
    assert!(cg.normalize_ids(&["9"]).is_err());
    let other = CoxeterGroup::new(&SimpleGraph::cycle(6));
    assert!(other.multiply(&w, &other.identity()).is_err());
}
