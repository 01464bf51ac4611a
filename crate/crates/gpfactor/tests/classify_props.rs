mod common;

use common::{coarsen, decisive_palette, graph_from_mask, labeled_graphs, unlabeled_graphs};
use gpfactor::classify::{Instance, StructureReport, VertexAlgebra};
use gpfactor::coxeter::CoxeterGroup;
use gpfactor::{SimpleGraph, Truth};
use proptest::prelude::*;

fn arb_graph(min: usize, max: usize) -> impl Strategy<Value = SimpleGraph> {
    (min..=max).prop_flat_map(|n| {
        let m = n * n.saturating_sub(1) / 2;
        any::<u64>().prop_map(move |bits| graph_from_mask(n, if m == 0 { 0 } else { bits & ((1u64 << m) - 1) }))
    })
}

fn arb_instance(max: usize) -> impl Strategy<Value = (SimpleGraph, Vec<usize>)> {
    let k = decisive_palette().len();
    arb_graph(1, max).prop_flat_map(move |g| {
        let n = g.len();
        (Just(g), prop::collection::vec(0..k, n))
    })
}

fn build(g: &SimpleGraph, picks: &[usize]) -> Instance {
    let palette = decisive_palette();
    Instance::new(g.clone(), picks.iter().map(|&i| palette[i].1.clone()).collect()).unwrap()
}

fn verdicts(r: &StructureReport) -> [(&'static str, Truth); 9] {
    [
        ("amenable", r.amenable.value),
        ("atomic", r.atomic.value),
        ("diffuse", r.diffuse.value),
        ("strongly_solid", r.strongly_solid.value),
        ("ii1_factor", r.ii1_factor.value),
        ("prime", r.prime.value),
        ("freely_indecomposable", r.freely_indecomposable.value),
        ("cartan_absence", r.cartan_absence.value),
        ("in_c_rigid", r.in_c_rigid.value),
    ]
}

fn ii1_palette() -> Vec<VertexAlgebra> {
    decisive_palette()
        .into_iter()
        .map(|(_, a)| a)
        .filter(|a| a.is_ii1_factor.is_yes())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdicts_are_consistent((g, picks) in arb_instance(7)) {
        let r = build(&g, &picks).full_report().unwrap();
        if r.atomic.value.is_yes() {
            prop_assert!(r.diffuse.value.is_no());
        }
        if r.diffuse.value.is_yes() {
            prop_assert!(r.atomic.value.is_no());
        }
        if r.amenable.value.is_yes() {
            prop_assert!(!r.strongly_solid.value.is_no());
        }
        if r.in_c_rigid.value.is_yes() {
            prop_assert!(g.is_rigid());
        }
    }

    #[test]
    fn refining_flags_never_flips_a_decisive_verdict(
        (g, picks) in arb_instance(6),
        forget in prop::collection::vec(any::<u16>(), 6),
    ) {
        let palette = decisive_palette();
        let fine = build(&g, &picks);
        let coarse_algs = picks.iter().zip(&forget).map(|(&i, &f)| coarsen(&palette[i].1, f)).collect();
        let coarse = Instance::new(g.clone(), coarse_algs).unwrap();
        let (rf, rc) = (fine.full_report().unwrap(), coarse.full_report().unwrap());
        for ((name, f), (_, c)) in verdicts(&rf).into_iter().zip(verdicts(&rc)) {
            if c.is_decisive() {
                prop_assert_eq!(c, f, "{} flipped", name);
            }
        }
    }

    #[test]
    fn strong_solidity_is_hereditary((g, picks) in arb_instance(6)) {
        let inst = build(&g, &picks);
        if inst.strongly_solid().unwrap().value.is_yes() {
            for s in g.all().subsets().filter(|s| !s.is_empty()) {
                let sub = Instance::new(g.induced(s), s.iter().map(|v| inst.algebras[v].clone()).collect()).unwrap();
                prop_assert!(sub.strongly_solid().unwrap().value.is_yes());
            }
        }
    }

    #[test]
    fn prime_iff_irreducible_for_ii1_vertices(g in arb_graph(2, 8), picks in prop::collection::vec(0usize..16, 8)) {
        let pal = ii1_palette();
        let algs = (0..g.len()).map(|v| pal[picks[v] % pal.len()].clone()).collect();
        let inst = Instance::new(g.clone(), algs).unwrap();
        prop_assert_eq!(inst.prime().value, Truth::from_bool(g.is_irreducible()));
    }
}

#[test]
fn freely_indecomposable_iff_connected_on_small_graphs() {
    let mut a = VertexAlgebra::ii1();
    a.separable_predual = Truth::Yes;
    let a = a.derive().unwrap();
    for n in 2..=6 {
        for g in labeled_graphs(n) {
            let connected = g.is_connected();
            let v = Instance::uniform(g, a.clone()).freely_indecomposable().value;
            assert_eq!(v, Truth::from_bool(connected));
        }
    }
}

#[test]
fn amenability_of_group_algebras_matches_growth() {
    // a right-angled Coxeter group is amenable exactly when its growth is not exponential
    let l = VertexAlgebra::hecke(1.0).unwrap();
    for n in 1..=6 {
        for g in unlabeled_graphs(n) {
            let rho = CoxeterGroup::new(&g)
                .hecke_sum_converges(&vec![1.0; n], 1 << 20)
                .unwrap()
                .spectral_radius;
            let amenable = Instance::uniform(g.clone(), l.clone()).amenable().value;
            assert_eq!(
                amenable,
                Truth::from_bool(rho <= 1.0 + 1e-9),
                "{:?} radius {rho}",
                g.edges()
            );
        }
    }
}

#[test]
fn hecke_diffuseness_follows_the_weighted_sum() {
    for n in 1..=5 {
        for g in unlabeled_graphs(n) {
            for q in [0.2, 0.5, 0.8, 1.0] {
                let conv = CoxeterGroup::new(&g)
                    .hecke_sum_converges(&vec![q; n], 1 << 20)
                    .unwrap()
                    .converges;
                let d = Instance::uniform(g.clone(), VertexAlgebra::hecke(q).unwrap())
                    .diffuse()
                    .unwrap()
                    .value;
                if conv.is_decisive() {
                    assert_eq!(d, !conv, "{:?} q={q}", g.edges());
                }
            }
        }
    }
}

fn lettered(g: &SimpleGraph, p: &str) -> SimpleGraph {
    g.relabel(|s| format!("{p}{s}")).unwrap()
}

#[test]
fn decomposition_examples() {
    let cv = VertexAlgebra::c_vertex();
    let k3 = Instance::uniform(SimpleGraph::complete(3), cv.clone()).prime_factorization();
    assert_eq!(
        k3.iter().map(|f| f.members.clone()).collect::<Vec<_>>(),
        [["1"], ["2"], ["3"]]
    );
    assert!(k3.iter().all(|f| f.verdict.value.is_yes()));

    let z5 = Instance::uniform(SimpleGraph::cycle(5), cv.clone()).prime_factorization();
    assert_eq!(z5.len(), 1);
    assert_eq!(z5[0].members.len(), 5);
    assert!(z5[0].verdict.value.is_yes());

    let two = SimpleGraph::disjoint_union(
        &lettered(&SimpleGraph::cycle(5), "a"),
        &lettered(&SimpleGraph::cycle(5), "b"),
    )
    .unwrap();
    let free = Instance::uniform(two, cv.clone()).free_product_decomposition();
    assert_eq!(free.len(), 2);
    assert!(free.iter().all(|f| f.verdict.value.is_yes()));

    assert_eq!(
        Instance::uniform(SimpleGraph::cycle(6), cv.clone())
            .free_product_decomposition()
            .len(),
        1
    );

    let mixed = SimpleGraph::disjoint_union(
        &lettered(&SimpleGraph::cycle(4), "a"),
        &lettered(&SimpleGraph::cycle(5), "b"),
    )
    .unwrap();
    let free = Instance::uniform(mixed, cv.clone()).free_product_decomposition();
    assert_eq!(free.iter().map(|f| f.members.len()).collect::<Vec<_>>(), [4, 5]);
    assert!(!free[0].rigid && free[0].provenance.contains("not rigid"));
    assert!(free[1].rigid);
}

#[test]
fn cartan_examples() {
    let ii1 = VertexAlgebra::ii1().derive().unwrap();
    assert_eq!(
        Instance::uniform(SimpleGraph::cycle(6), ii1.clone())
            .cartan_absence()
            .value,
        Truth::Yes
    );
    assert_eq!(
        Instance::uniform(SimpleGraph::complete(3), ii1.clone())
            .cartan_absence()
            .value,
        Truth::Unknown
    );
    let mut algs = vec![ii1; 5];
    algs.push(VertexAlgebra::hecke(0.5).unwrap());
    assert_eq!(
        Instance::new(SimpleGraph::cycle(6), algs)
            .unwrap()
            .cartan_absence()
            .value,
        Truth::Unknown
    );
}

#[test]
fn report_examples() {
    let cv = VertexAlgebra::c_vertex();
    let fig = SimpleGraph::join(
        &lettered(&SimpleGraph::cycle(5), "a"),
        &lettered(&SimpleGraph::cycle(5), "b"),
    )
    .unwrap();
    let r = Instance::uniform(fig, cv.clone()).full_report().unwrap();
    assert!(r.graph.rigid);
    assert_eq!(r.prime.value, Truth::No);
    assert_eq!(r.graph.irreducible_components.len(), 2);
    assert_eq!(r.strongly_solid.value, Truth::No);
    assert_eq!(r.cartan_absence.value, Truth::Unknown);

    let single = Instance::uniform(SimpleGraph::complete(1), cv).full_report().unwrap();
    assert_eq!(single.prime.value, Truth::Yes);
    assert_eq!(single.freely_indecomposable.value, Truth::Unknown);

    let empty = Instance::new(SimpleGraph::empty(), vec![])
        .unwrap()
        .full_report()
        .unwrap();
    assert_eq!(empty.amenable.value, Truth::Yes);
    assert_eq!(empty.prime.value, Truth::Unknown);
}

#[test]
fn inconsistent_descriptors_are_rejected() {
    let mut a = VertexAlgebra::ii1();
    a.amenable = Truth::Yes;
    a.in_c_vertex = Truth::Yes;
    assert!(a.derive().is_err());
    let mut b = VertexAlgebra::matrix(2).unwrap();
    b.diffuse = Truth::Yes;
    assert!(b.derive().is_err());
    assert!(VertexAlgebra::hecke(0.0).is_err());
    assert!(VertexAlgebra::matrix(1).is_err());
    assert_eq!(VertexAlgebra::hecke(2.0).unwrap(), VertexAlgebra::hecke(0.5).unwrap());
}
