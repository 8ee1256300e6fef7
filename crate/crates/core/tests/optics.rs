use proptest::prelude::*;
use weave_core::graph::{state_locally_equivalent, Graph, StateVector};
use weave_core::optics::{ghz_chain, weaving_chain, ModeLabel, PhotonicState, Polarization, Port};
use weave_core::C64;

const TOL: f64 = 1e-12;
const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug)]
enum Op {
    Pbs(Port, Port),
    Hwp(Port, f64),
}

fn apply(s: &PhotonicState, op: &Op) -> PhotonicState {
    match *op {
        Op::Pbs(a, b) => s.apply_pbs(a, b).unwrap(),
        Op::Hwp(p, t) => s.apply_hwp(p, t).unwrap(),
    }
}

fn op(n: Port) -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..n, 1..n).prop_map(move |(a, d)| Op::Pbs(a, (a + d) % n)),
        (0..n, -90.0..90.0f64).prop_map(|(p, t)| Op::Hwp(p, t)),
        (0..n, prop_oneof![Just(0.0), Just(22.5), Just(45.0), Just(-22.5)]).prop_map(|(p, t)| Op::Hwp(p, t)),
    ]
}

fn photon() -> impl Strategy<Value = (C64, C64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| {
            let n = (a * a + b * b + c * c + d * d).sqrt();
            (C64::new(a / n, b / n), C64::new(c / n, d / n))
        })
}

/// Random photons on ports `0..n`, scrambled so ports can hold several
/// photons.
fn state(n: Port) -> impl Strategy<Value = PhotonicState> {
    (proptest::collection::vec(photon(), n as usize), proptest::collection::vec(op(n), 0..8)).prop_map(move |(ph, ops)| {
        let mut s = PhotonicState::vacuum([]).unwrap();
        for (p, (h, v)) in ph.into_iter().enumerate() {
            s = s.tensor(&PhotonicState::single(p as Port, h, v).unwrap()).unwrap();
        }
        ops.iter().fold(s, |s, o| apply(&s, o))
    })
}

fn inner(a: &PhotonicState, b: &PhotonicState) -> C64 {
    a.terms().map(|(p, x)| x.conj() * b.amplitude(p)).sum()
}

fn pair(max: Port) -> impl Strategy<Value = (PhotonicState, PhotonicState, Op)> {
    (2..=max).prop_flat_map(|n| (state(n), state(n), op(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn elements_are_unitary((a, b, o) in pair(4)) {
        let (ua, ub) = (apply(&a, &o), apply(&b, &o));
        prop_assert!((ua.norm_sqr() - a.norm_sqr()).abs() < TOL);
        prop_assert!((inner(&ua, &ub) - inner(&a, &b)).norm() < TOL);
    }

    #[test]
    fn photon_number_is_conserved((a, _b, o) in pair(4)) {
        let ua = apply(&a, &o);
        prop_assert_eq!(ua.photons(), a.photons());
        prop_assert!(ua.terms().all(|(p, _)| p.total() == a.photons()));
        prop_assert!(ua.check_invariants().is_ok());
    }

    #[test]
    fn hwp_twice_is_identity(a in state(3), p in 0u32..3, t in -90.0..90.0f64) {
        let back = a.apply_hwp(p, t).unwrap().apply_hwp(p, t).unwrap();
        prop_assert!((inner(&a, &back).norm() - a.norm_sqr()).abs() < 1e-10);
    }
}

fn one(port: Port, pol: Polarization) -> PhotonicState {
    let (h, v) = match pol {
        Polarization::H => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        Polarization::V => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
    };
    PhotonicState::single(port, h, v).unwrap()
}

fn only_mode(s: &PhotonicState) -> ModeLabel {
    let (p, _) = s.terms().next().unwrap();
    assert_eq!(s.len(), 1);
    p.modes().next().unwrap().0
}

#[test]
fn pbs_transmits_h_and_reflects_v() {
    let two = |pol| one(0, pol).tensor(&PhotonicState::vacuum([1]).unwrap()).unwrap();
    let h = two(Polarization::H).apply_pbs(0, 1).unwrap();
    assert_eq!(only_mode(&h), ModeLabel { port: 0, pol: Polarization::H });
    let v = two(Polarization::V).apply_pbs(0, 1).unwrap();
    assert_eq!(only_mode(&v), ModeLabel { port: 1, pol: Polarization::V });
    assert_eq!(v.terms().next().unwrap().1, &C64::new(1.0, 0.0));
}

#[test]
fn hwp_angles() {
    let plus = one(0, Polarization::H).apply_hwp(0, 22.5).unwrap();
    for (_, a) in plus.terms() {
        assert!((a - C64::new(R, 0.0)).norm() < TOL);
    }
    let minus = one(0, Polarization::V).apply_hwp(0, 22.5).unwrap();
    let signs: Vec<f64> = minus.terms().map(|(_, a)| a.re.signum()).collect();
    assert_eq!(signs.len(), 2);
    assert!(signs.contains(&1.0) && signs.contains(&-1.0));
    let z = one(0, Polarization::V).apply_hwp(0, 0.0).unwrap();
    assert_eq!(z.terms().next().unwrap().1, &C64::new(-1.0, 0.0));
}

#[test]
fn hong_ou_mandel_on_a_wave_plate() {
    // Two photons H,V in one port through a Hadamard plate: |HV⟩ → (|HH⟩ − |VV⟩)/√2.
    let s = one(0, Polarization::H)
        .tensor(&one(1, Polarization::V))
        .unwrap()
        .apply_pbs(0, 1)
        .unwrap();
    assert!(s.terms().all(|(p, _)| p.port_count(0) == 2));
    let out = s.apply_hwp(0, 22.5).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() < TOL);
    assert_eq!(out.len(), 2);
    assert!(out.terms().all(|(p, _)| p.count(ModeLabel { port: 0, pol: Polarization::H }) != 1));
}

#[test]
fn ghz_postselection() {
    for n in 2..=8usize {
        let run = ghz_chain(n).unwrap().run().unwrap();
        assert!((run.postselection_probability - 0.5f64.powi(n as i32 - 1)).abs() < TOL, "N={n}");
        assert_eq!(run.postselected.len(), 2);
        for (p, a) in run.postselected.terms() {
            assert!((a - C64::new(R, 0.0)).norm() < 1e-10);
            let pols: Vec<Polarization> = p.modes().map(|(m, _)| m.pol).collect();
            assert!(pols.iter().all(|&x| x == pols[0]));
        }
        let map: Vec<(Port, u32)> = (0..n as u32).map(|p| (p, p)).collect();
        let sv = run.postselected.extract_logical(&map).unwrap();
        let leaves: Vec<u32> = (1..n as u32).collect();
        assert!(state_locally_equivalent(&sv, &Graph::star(0, &leaves)).unwrap());
    }
}

#[test]
fn weaving_postselection() {
    for n in 2..=7usize {
        let run = weaving_chain(n).unwrap().run().unwrap();
        assert!((run.postselection_probability - 0.5f64.powi(n as i32)).abs() < TOL, "N={n}");
        let map: Vec<(Port, u32)> = (0..=n as u32).map(|p| (p, p)).collect();
        let sv = run.postselected.extract_logical(&map).unwrap();
        let order: Vec<u32> = (0..=n as u32).collect();
        assert!(sv.equal_up_to_phase(&StateVector::from_graph(&Graph::path(&order)).unwrap(), 1e-10));
    }
}

/// `½(|+HH⟩ + |−HV⟩ + |+VH⟩ − |−VV⟩)` on (aux, 1, 2), written out in the
/// H/V basis of the auxiliary photon.
fn four_term(a: usize, x: usize, y: usize) -> f64 {
    let aux = if y == 1 && a == 1 { -R } else { R };
    let sign = if x == 1 && y == 1 { -1.0 } else { 1.0 };
    0.5 * sign * aux
}

#[test]
fn cz_gate_four_term_state() {
    let run = weaving_chain(2).unwrap().run().unwrap();
    assert!((run.postselection_probability - 0.25).abs() < TOL);
    let sv = run.postselected.extract_logical(&[(2, 2), (0, 0), (1, 1)]).unwrap();
    let mut want = vec![C64::new(0.0, 0.0); 8];
    for (i, w) in want.iter_mut().enumerate() {
        *w = C64::new(four_term(i >> 2, (i >> 1) & 1, i & 1), 0.0);
    }
    let want = StateVector::new(vec![2, 0, 1], want).unwrap();
    assert!(sv.equal_up_to_phase(&want, 1e-10));

    let p2 = StateVector::from_graph(&Graph::path(&[0, 1])).unwrap();
    let z = weave_core::graph::clifford::Gate::Z.matrix();
    for minus in [false, true] {
        let (p, post) = sv.project(2, weave_core::graph::MeasurementBasis::Z, minus).unwrap();
        assert!((p - 0.5).abs() < TOL);
        let mut post = post.unwrap();
        if minus {
            post.apply_gate(1, &z).unwrap();
        }
        assert!(post.equal_up_to_phase(&p2, 1e-10));
    }
}

#[test]
fn port_limits() {
    assert!(ghz_chain(1).is_err());
    assert!(ghz_chain(17).is_err());
    assert!(PhotonicState::vacuum([16]).is_err());
}
