use proptest::prelude::*;
use weave_core::graph::equivalence::lc_sequence;
use weave_core::graph::{
    classify_graph, isomorphic, locally_equivalent, state_locally_equivalent, FramedGraph, Graph, MeasurementBasis,
    ShapeKind, StateVector,
};

fn graph(max: u32) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        let pairs = (n * n.saturating_sub(1) / 2) as usize;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut g = Graph::empty(0..n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn with_vertex(max: u32) -> impl Strategy<Value = (Graph, u32)> {
    graph(max).prop_flat_map(|g| {
        let n = g.vertex_count() as u32;
        (Just(g), 0..n)
    })
}

fn basis() -> impl Strategy<Value = MeasurementBasis> {
    prop_oneof![Just(MeasurementBasis::X), Just(MeasurementBasis::Y), Just(MeasurementBasis::Z)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lc_is_an_involution((g, v) in with_vertex(9)) {
        prop_assert_eq!(g.local_complement(v).unwrap().local_complement(v).unwrap(), g);
    }

    #[test]
    fn z_measurement_deletes((g, v) in with_vertex(9)) {
        let mut deleted = g.clone();
        deleted.remove_vertex(v).unwrap();
        prop_assert_eq!(g.measure_pauli(v, MeasurementBasis::Z).unwrap(), deleted);
    }

    #[test]
    fn lc_keeps_the_class((g, v) in with_vertex(7)) {
        let h = g.local_complement(v).unwrap();
        prop_assert!(locally_equivalent(&g, &h).unwrap());
        prop_assert!(state_locally_equivalent(&h.to_state_vector().unwrap(), &g).unwrap());
    }

    #[test]
    fn framed_lc_keeps_the_state((g, v) in with_vertex(6)) {
        let mut f = FramedGraph::new(g.clone());
        f.local_complement(v).unwrap();
        let want = StateVector::from_graph(&g).unwrap();
        prop_assert!(f.to_state_vector().unwrap().equal_up_to_phase(&want, 1e-10));
    }

    #[test]
    fn pauli_measurement_matches_projection((g, v) in with_vertex(5), b in basis()) {
        let sv = StateVector::from_graph(&g).unwrap();
        let measured = g.measure_pauli(v, b).unwrap();
        for minus in [false, true] {
            let (p, post) = sv.project(v, b, minus).unwrap();
            if let Some(post) = post {
                prop_assert!(p > 0.0);
                prop_assert!(state_locally_equivalent(&post, &measured).unwrap());
            }
        }
    }

    #[test]
    fn framed_measurement_is_exact((g, v) in with_vertex(5), b in basis(), minus in any::<bool>()) {
        let sv = StateVector::from_graph(&g).unwrap();
        let (p, post) = sv.project(v, b, minus).unwrap();
        let mut f = FramedGraph::new(g);
        match post {
            None => prop_assert!(f.measure(v, b, minus).is_err()),
            Some(post) => {
                let rec = f.measure(v, b, minus).unwrap();
                prop_assert!((rec.probability - p).abs() < 1e-10);
                prop_assert!(f.to_state_vector().unwrap().equal_up_to_phase(&post, 1e-10));
            }
        }
    }

    #[test]
    fn equivalence_relation(a in graph(5), seq in proptest::collection::vec(0u32..5, 0..6), seq2 in proptest::collection::vec(0u32..5, 0..6)) {
        let n = a.vertex_count() as u32;
        let walk = |g: &Graph, s: &[u32]| s.iter().fold(g.clone(), |h, &v| h.local_complement(v % n).unwrap());
        let b = walk(&a, &seq);
        let c = walk(&b, &seq2);
        prop_assert!(locally_equivalent(&a, &a).unwrap());
        prop_assert_eq!(locally_equivalent(&a, &b).unwrap(), locally_equivalent(&b, &a).unwrap());
        prop_assert!(locally_equivalent(&a, &b).unwrap() && locally_equivalent(&b, &c).unwrap());
        prop_assert!(locally_equivalent(&a, &c).unwrap());
        let path = lc_sequence(&a, &c, 1_000_000).unwrap().expect("reachable");
        prop_assert_eq!(walk(&a, &path), c);
    }

    #[test]
    fn classification_representative_is_isomorphic(g in graph(9)) {
        let c = classify_graph(&g);
        if let Some(r) = c.representative() {
            prop_assert!(isomorphic(&r, &g));
        }
    }
}

#[test]
fn complete_graph_is_a_star() {
    for n in 2..=8u32 {
        let labels: Vec<u32> = (0..n).collect();
        let k = Graph::complete(&labels);
        let star = Graph::star(0, &labels[1..]);
        assert!(locally_equivalent(&k, &star).unwrap());
        assert_eq!(k.local_complement(0).unwrap(), star);
    }
}

#[test]
fn small_examples() {
    let p3 = Graph::path(&[1, 2, 3]);
    assert_eq!(p3.measure_pauli(2, MeasurementBasis::Z).unwrap(), Graph::empty([1, 3]));
    let y = p3.measure_pauli(2, MeasurementBasis::Y).unwrap();
    assert!(y.has_edge(1, 3));
    assert!(!locally_equivalent(&Graph::path(&[0, 1, 2, 3]), &Graph::star(0, &[1, 2, 3])).unwrap());
    let product = StateVector::new(vec![0, 1, 2], {
        let mut a = vec![weave_core::C64::new(0.0, 0.0); 8];
        a[0] = weave_core::C64::new(1.0, 0.0);
        a
    })
    .unwrap();
    assert!(!state_locally_equivalent(&product, &Graph::complete(&[0, 1, 2])).unwrap());
    assert_eq!(classify_graph(&Graph::cycle(&[0, 1, 2, 3, 4])).kind, ShapeKind::Cycle);
}
