use weave_core::graph::clifford::Gate;
use weave_core::graph::{
    classify_graph, isomorphic, locally_equivalent, state_locally_equivalent, Graph, ShapeKind, StateVector,
};
use weave_core::protocols::{
    build_block, fuse_within, fuse_within_program, ghz_parity, run_caterpillar, run_cycle, run_ghz, run_path,
    weave_graphs, weave_program, BlockKind, Layout, Protocol, ProtocolError, ProtocolRequest, Scripted,
};
use weave_core::C64;

const TOL: f64 = 1e-10;

fn labels(n: u32) -> Vec<u32> {
    (0..n).collect()
}

#[test]
fn ghz_examples() {
    let r = run_ghz(2, false).unwrap();
    assert_eq!(r.success_probability(), 0.5);
    assert!(locally_equivalent(&r.final_graph, &Graph::path(&[0, 1])).unwrap());
    let r = run_ghz(3, false).unwrap();
    assert_eq!(r.success_probability(), 0.25);
    assert!(isomorphic(&r.final_graph, &Graph::star(0, &[1, 2])));
    for m in 2..=8 {
        let r = run_ghz(m, true).unwrap();
        assert_eq!(r.final_graph.vertex_count(), m + 1);
        assert_eq!(r.exponent as usize, m - 1);
        assert_eq!(classify_graph(&r.final_graph).components.len(), 1);
    }
    assert!(run_ghz(1, false).is_err());
    assert!(run_ghz(9, false).is_err());
}

#[test]
fn ghz_parity_sign() {
    assert_eq!(ghz_parity(0), (1, None));
    assert_eq!(ghz_parity(2).0, 1);
    let (sign, fix) = ghz_parity(1);
    assert_eq!(sign, -1);
    assert_eq!(fix.unwrap().gates.len(), 1);
    let p = Protocol::Ghz { users: 3, server: false };
    let r = p.run(&mut Scripted::new(&[], &[true, false, false])).unwrap();
    assert_eq!(r.measurement_record.m_minus, 1);
    assert!(r.measurement_record.m_minus <= r.measurement_record.pm_measurements);
}

#[test]
fn path_examples() {
    let r = run_path(2, false).unwrap();
    assert_eq!(r.success_probability(), 0.5);
    assert_eq!(r.final_graph, Graph::path(&[0, 1]));
    let r = run_path(3, true).unwrap();
    assert_eq!(r.final_graph.vertex_count(), 4);
    assert_eq!(classify_graph(&r.final_graph).kind, ShapeKind::Path);
    let server = r.server[0];
    assert_eq!(r.final_graph.degree(server).unwrap(), 1);
}

#[test]
fn comb_before_measurement() {
    let p = Protocol::Path { users: 3, server: false };
    let comb = p.comb().unwrap();
    let class = classify_graph(&comb);
    let users = [0, 1, 2];
    let spine: Vec<u32> = comb.vertices().filter(|v| !users.contains(v)).collect();
    assert_eq!(spine.len(), 3);
    assert!(users.iter().all(|&u| comb.degree(u).unwrap() == 1));
    assert!(matches!(class.kind, ShapeKind::Caterpillar | ShapeKind::Star | ShapeKind::Path));
    let run = p.program().unwrap().circuit().unwrap();
    let mut unmeasured = run.clone();
    unmeasured.measure.clear();
    let out = unmeasured.run().unwrap();
    let map: Vec<(u32, u32)> = comb.vertices().map(|v| (v, v)).collect();
    let sv = out.postselected.extract_logical(&map).unwrap();
    assert!(state_locally_equivalent(&sv, &comb).unwrap());
}

#[test]
fn cycle_examples() {
    for (m, p) in [(3, 1.0 / 16.0), (4, 1.0 / 32.0)] {
        let r = run_cycle(m).unwrap();
        assert_eq!(r.success_probability(), p);
        assert_eq!(classify_graph(&r.final_graph).kind, ShapeKind::Cycle);
        assert_eq!(r.final_graph.vertex_count(), m + 1);
        assert_eq!(r.server.len(), 1);
    }
}

#[test]
fn caterpillar_examples() {
    let spine = run_caterpillar(Layout::all_spine(4), false).unwrap();
    assert_eq!(spine.final_graph, run_path(4, false).unwrap().final_graph);
    let layout: Layout = "SLSS".parse().unwrap();
    let open = run_caterpillar(layout.clone(), false).unwrap();
    assert_eq!(open.success_probability(), 0.125);
    assert!(isomorphic(&open.final_graph, &Graph::star(0, &[1, 2, 3])));
    let five = run_caterpillar("SLSSS".parse().unwrap(), false).unwrap();
    assert_eq!(classify_graph(&five.final_graph).kind, ShapeKind::Caterpillar);
    let closed = run_caterpillar(layout, true).unwrap();
    assert_eq!(closed.success_probability(), 1.0 / 32.0);
    assert_eq!(classify_graph(&closed.final_graph).kind, ShapeKind::LeafedCycle);
    assert!(matches!(
        run_caterpillar("SSL".parse().unwrap(), false),
        Err(ProtocolError::Layout(_))
    ));
}

#[test]
fn dual_paths_agree_for_small_protocols() {
    let mut ps = Vec::new();
    for m in 2..=4 {
        ps.push(Protocol::Ghz { users: m, server: m == 3 });
        ps.push(Protocol::Path { users: m, server: m == 2 });
    }
    ps.push(Protocol::Cycle { users: 3 });
    ps.push(Protocol::Caterpillar { layout: "LSS".parse().unwrap(), close: false });
    ps.push(Protocol::Caterpillar { layout: "SLS".parse().unwrap(), close: true });
    for p in ps {
        let d = p.dual_check(TOL).unwrap();
        assert!(d.agrees(TOL), "{p:?}: {d:?}");
    }
}

#[test]
fn weave_examples() {
    let g = weave_graphs(&Graph::empty([0]), 0, &Graph::empty([1]), 1).unwrap();
    assert_eq!(g, Graph::path(&[0, 1, 2]));
    let g1 = Graph::path(&[0, 1]);
    let g2 = Graph::path(&[2, 3]);
    let g = weave_graphs(&g1, 1, &g2, 2).unwrap();
    let want = Graph::from_edges(0..5, [(0, 1), (1, 2), (2, 3), (2, 4)]).unwrap();
    assert_eq!(g, want);
    let check = weave_program(&g1, 1, &g2, 2).unwrap().cross_check(TOL).unwrap();
    assert!(check.agrees(TOL), "{check:?}");
    assert_eq!(check.postselection_probability, 0.25);
    assert!(weave_graphs(&g1, 1, &g1, 0).is_err());
    assert!(weave_graphs(&g1, 7, &g2, 2).is_err());
}

/// PBS postselection on `(f, l)` keeps `|00⟩, |11⟩` on the pair; the plate
/// then applies a Hadamard to `l`.
fn fusion_oracle(g: &Graph, f: u32, l: u32) -> (f64, StateVector) {
    let sv = StateVector::from_graph(g).unwrap();
    let q = sv.qubits().to_vec();
    let n = q.len();
    let bit = |v: u32| 1usize << (n - 1 - q.iter().position(|&x| x == v).unwrap());
    let (bf, bl) = (bit(f), bit(l));
    let amps: Vec<C64> = sv
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if (i & bf == 0) == (i & bl == 0) { a } else { C64::new(0.0, 0.0) })
        .collect();
    let mut out = StateVector::new(q, amps).unwrap();
    let p = out.norm_sqr();
    out.normalize();
    out.apply_gate(l, &Gate::H.matrix()).unwrap();
    (p, out)
}

#[test]
fn fuse_within_examples() {
    let g = fuse_within(&Graph::path(&[1, 2, 3, 4]), 1, 4).unwrap();
    let want = Graph::from_edges(1..=4, [(1, 2), (2, 3), (1, 3), (1, 4)]).unwrap();
    assert_eq!(g, want);
    for n in 4..=8u32 {
        let p = Graph::path(&labels(n));
        let out = fuse_within(&p, 0, n - 1).unwrap();
        let mut want = Graph::cycle(&labels(n - 1));
        want.add_vertex(n - 1).unwrap();
        want.add_edge(0, n - 1).unwrap();
        assert_eq!(out, want);
        let (prob, sv) = fusion_oracle(&p, 0, n - 1);
        assert!((prob - 0.5).abs() < TOL);
        assert!(state_locally_equivalent(&sv, &out).unwrap());
    }
    let star = Graph::star(0, &[1, 2, 3]);
    let out = fuse_within(&star, 1, 2).unwrap();
    assert_eq!(out, Graph::from_edges(0..4, [(0, 3), (1, 2)]).unwrap());
    let (_, sv) = fusion_oracle(&star, 1, 2);
    assert!(state_locally_equivalent(&sv, &out).unwrap());
    let check = fuse_within_program(&star, 1, 2).unwrap().cross_check(TOL).unwrap();
    assert!(check.mismatches.is_empty());
    assert!((check.postselection_probability - 0.5).abs() < TOL);
    assert!(fuse_within_program(&Graph::path(&[0, 1, 2]), 0, 1).is_err());
    assert!(fuse_within(&star, 1, 1).is_err());
}

#[test]
fn blocks() {
    let p4 = build_block(BlockKind::Path4);
    assert_eq!(p4.probability(), 0.125);
    assert!(isomorphic(&p4.graph, &Graph::path(&[0, 1, 2, 3])));
    for v in p4.outer {
        assert_eq!(p4.graph.degree(v).unwrap(), 1);
    }
    let s4 = build_block(BlockKind::Star4);
    assert_eq!(s4.probability(), 0.125);
    assert_eq!(classify_graph(&s4.graph).kind, ShapeKind::Star);
    assert_eq!(s4.graph.vertex_count(), 4);
    let three = build_block(BlockKind::Three);
    assert_eq!(three.probability(), 0.25);
    assert!(isomorphic(&three.graph, &Graph::path(&[0, 1, 2])));
    assert_eq!(three.users.len(), 1);
    for (k, e) in [(BlockKind::Path4, 3), (BlockKind::Star4, 3), (BlockKind::Three, 2)] {
        let c = k.program(0).cross_check(TOL).unwrap();
        assert!(c.agrees(TOL), "{k}: {:?}", c.mismatches);
        assert_eq!(c.exponent, e);
    }
}

#[test]
fn star_block_optics_is_ghz() {
    let prog = BlockKind::Star4.program(0);
    let run = prog.circuit().unwrap().run().unwrap();
    let block = build_block(BlockKind::Star4);
    assert!(isomorphic(&block.graph, &Graph::star(0, &[1, 2, 3])));
    let map: Vec<(u32, u32)> = block.graph.vertices().map(|v| (v, v)).collect();
    for b in run.branches.iter().filter(|b| b.probability > TOL) {
        let sv = b.state.extract_logical(&map).unwrap();
        assert!(state_locally_equivalent(&sv, &block.graph).unwrap());
    }
}

#[test]
fn requests_round_trip() {
    let req: ProtocolRequest = serde_json::from_str(r#"{"protocol":"caterpillar","M":3,"layout":"LSS","close":true,"seed":4}"#).unwrap();
    let resp = req.execute().unwrap();
    assert_eq!(resp.result.exponent, 4);
    assert!(resp.monte_carlo.is_none());
    let json = serde_json::to_string(&resp.request).unwrap();
    assert_eq!(serde_json::from_str::<ProtocolRequest>(&json).unwrap(), req);
    let bad: ProtocolRequest = serde_json::from_str(r#"{"protocol":"path"}"#).unwrap();
    assert!(bad.execute().is_err());
}
