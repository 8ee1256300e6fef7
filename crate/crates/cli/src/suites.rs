//! Verification suites run by `weave verify`.

use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use weave_core::graph::clifford::Gate;
use weave_core::graph::{classify_graph, locally_equivalent, state_locally_equivalent, Graph, MeasurementBasis, ShapeKind, StateVector};
use weave_core::minors::{crosscheck, sweep, Resource, TransitionWord};
use weave_core::optics::{ghz_chain, weaving_chain, PhotonicState};
use weave_core::protocols::{
    build_block, fuse_chain, fuse_within, fuse_within_program, monte_carlo, BlockKind, ChainSpec, Heralded, Job,
    JointPlan, Layout, Protocol, Scripted,
};
use weave_core::C64;

pub const SUITES: [&str; 9] = [
    "ghz",
    "cz",
    "weaving",
    "exponents",
    "dual",
    "appendix-a",
    "appendix-b",
    "montecarlo",
    "properties",
];

const TOL: f64 = 1e-10;
/// Probabilities built from `1/√2` amplitudes carry rounding error.
const PROB_TOL: f64 = 1e-12;

fn close(p: f64, q: f64) -> bool {
    (p - q).abs() < PROB_TOL
}

#[derive(Clone, Debug, Default)]
pub struct Settings {
    /// Restricts the appendix-b zigzag sweep to one size.
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub pass: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub details: Value,
    pub seconds: f64,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error<E: std::fmt::Display>(&mut self, what: &str, e: E) {
        self.checks += 1;
        self.failures.push(format!("{what}: {e}"));
    }
}

pub fn is_suite(name: &str) -> bool {
    name == "all" || SUITES.contains(&name)
}

pub fn run(name: &str, s: &Settings) -> Vec<SuiteReport> {
    if name == "all" {
        return SUITES.iter().map(|n| run_one(n, s)).collect();
    }
    SUITES.iter().filter(|&&n| n == name).map(|n| run_one(n, s)).collect()
}

fn run_one(name: &'static str, s: &Settings) -> SuiteReport {
    let start = Instant::now();
    let mut t = Tally::default();
    let details = match name {
        "ghz" => ghz(&mut t),
        "cz" => cz(&mut t),
        "weaving" => weaving(&mut t),
        "exponents" => exponents(&mut t),
        "dual" => dual(&mut t),
        "appendix-a" => appendix_a(&mut t),
        "appendix-b" => appendix_b(&mut t, s),
        "montecarlo" => montecarlo(&mut t, s),
        _ => properties(&mut t, s),
    };
    SuiteReport {
        suite: name,
        pass: t.failures.is_empty() && t.checks > 0,
        checks: t.checks,
        failures: t.failures,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn dyadic(k: u32) -> f64 {
    0.5f64.powi(k as i32)
}

fn ghz(t: &mut Tally) -> Value {
    let mut rows = Vec::new();
    for n in 2..=8usize {
        let run = match ghz_chain(n).and_then(|c| c.run()) {
            Ok(r) => r,
            Err(e) => {
                t.error(&format!("ghz N={n}"), e);
                continue;
            }
        };
        let p = run.postselection_probability;
        t.check(close(p, dyadic(n as u32 - 1)), || format!("ghz N={n}: probability {p}"));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps_ok = run.postselected.len() == 2
            && run.postselected.terms().all(|(_, a)| (a.norm() - r).abs() < TOL && a.im.abs() < TOL);
        t.check(amps_ok, || format!("ghz N={n}: amplitudes"));
        let map: Vec<(u32, u32)> = (0..n as u32).map(|p| (p, p)).collect();
        let leaves: Vec<u32> = (1..n as u32).collect();
        let eq = run
            .postselected
            .extract_logical(&map)
            .map_err(|e| e.to_string())
            .and_then(|sv| state_locally_equivalent(&sv, &Graph::star(0, &leaves)).map_err(|e| e.to_string()));
        t.check(eq == Ok(true), || format!("ghz N={n}: not star-equivalent ({eq:?})"));
        rows.push(json!({"N": n, "probability": p}));
    }
    Value::Array(rows)
}

/// Four-term state on (aux, 1, 2): `½(|+HH⟩ + |−HV⟩ + |+VH⟩ − |−VV⟩)`.
fn four_term() -> StateVector {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [r, r];
    let minus = [r, -r];
    let terms = [(plus, 0, 0, 1.0), (minus, 0, 1, 1.0), (plus, 1, 0, 1.0), (minus, 1, 1, -1.0)];
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    for (a, x, y, s) in terms {
        for (bit, amp) in a.iter().enumerate() {
            amps[(bit << 2) | (x << 1) | y] += C64::new(0.5 * s * amp, 0.0);
        }
    }
    StateVector::new(vec![2, 0, 1], amps).expect("eight amplitudes")
}

fn cz(t: &mut Tally) -> Value {
    let run = match weaving_chain(2).and_then(|c| c.run()) {
        Ok(r) => r,
        Err(e) => {
            t.error("cz", e);
            return Value::Null;
        }
    };
    let p = run.postselection_probability;
    t.check(close(p, 0.25), || format!("cz: probability {p}"));
    let sv = run.postselected.extract_logical(&[(2, 2), (0, 0), (1, 1)]);
    let Ok(sv) = sv else {
        t.error("cz: extract", sv.unwrap_err());
        return Value::Null;
    };
    t.check(sv.equal_up_to_phase(&four_term(), TOL), || "cz: four-term state".into());
    let p2 = StateVector::from_graph(&Graph::path(&[0, 1])).expect("two qubits");
    let mut branches = 0;
    for bit in [0u8, 1] {
        let mut b = match sv.project(2, MeasurementBasis::Z, bit == 1) {
            Ok((_, Some(b))) => b,
            Ok((_, None)) => {
                t.error("cz: projection", format!("aux outcome {bit} never occurs"));
                continue;
            }
            Err(e) => {
                t.error("cz: projection", e);
                continue;
            }
        };
        if bit == 1 {
            let _ = b.apply_gate(1, &Gate::Z.matrix());
        }
        t.check(b.equal_up_to_phase(&p2, TOL), || format!("cz: aux outcome {bit}"));
        branches += 1;
    }
    json!({"probability": p, "branches": branches})
}

fn weaving(t: &mut Tally) -> Value {
    let mut rows = Vec::new();
    for n in 2..=7usize {
        let run = match weaving_chain(n).and_then(|c| c.run()) {
            Ok(r) => r,
            Err(e) => {
                t.error(&format!("weaving N={n}"), e);
                continue;
            }
        };
        let p = run.postselection_probability;
        t.check(close(p, dyadic(n as u32)), || format!("weaving N={n}: probability {p}"));
        let map: Vec<(u32, u32)> = (0..=n as u32).map(|p| (p, p)).collect();
        let order: Vec<u32> = (0..=n as u32).collect();
        let eq = run
            .postselected
            .extract_logical(&map)
            .map_err(|e| e.to_string())
            .and_then(|sv| state_locally_equivalent(&sv, &Graph::path(&order)).map_err(|e| e.to_string()));
        t.check(eq == Ok(true), || format!("weaving N={n}: not a path ({eq:?})"));
        rows.push(json!({"N": n, "probability": p}));
    }
    Value::Array(rows)
}

fn layouts(m: usize) -> impl Iterator<Item = Layout> {
    (0..1usize << m).map(move |mask| {
        Layout(
            (0..m)
                .map(|i| if mask >> i & 1 == 1 { weave_core::protocols::Role::Leaf } else { weave_core::protocols::Role::Spine })
                .collect(),
        )
    })
}

/// Every valid protocol with at most `max_users` users.
fn protocols(max_users: usize) -> Vec<Protocol> {
    let mut out = Vec::new();
    for m in 2..=max_users {
        for server in [false, true] {
            out.push(Protocol::Ghz { users: m, server });
            out.push(Protocol::Path { users: m, server });
        }
        out.push(Protocol::Cycle { users: m });
        for layout in layouts(m) {
            for close in [false, true] {
                out.push(Protocol::Caterpillar { layout: layout.clone(), close });
            }
        }
    }
    out.into_iter().filter(|p| p.validate().is_ok()).collect()
}

fn expected_exponent(p: &Protocol) -> u32 {
    let m = p.users() as u32;
    match p {
        Protocol::Ghz { .. } | Protocol::Path { .. } | Protocol::Caterpillar { close: false, .. } => m - 1,
        Protocol::Cycle { .. } | Protocol::Caterpillar { close: true, .. } => m + 1,
    }
}

fn exponents(t: &mut Tally) -> Value {
    let all = protocols(8);
    for p in &all {
        let want = dyadic(expected_exponent(p));
        match p.run(&mut Heralded) {
            Ok(r) => t.check(r.success_probability() == want, || format!("{p:?}: {}", r.success_probability())),
            Err(e) => t.error(&format!("{p:?}"), e),
        }
        match p.program() {
            Ok(prog) => t.check(dyadic(prog.exponent()) == want, || format!("{p:?}: program has {} fusions", prog.exponent())),
            Err(e) => t.error(&format!("{p:?}"), e),
        }
    }
    let blocks: Vec<Value> = [(BlockKind::Path4, 0.125), (BlockKind::Star4, 0.125), (BlockKind::Three, 0.25)]
        .into_iter()
        .map(|(k, want)| {
            let b = build_block(k);
            t.check(b.probability() == want, || format!("block {k}: {}", b.probability()));
            json!({"block": k.to_string(), "probability": b.probability()})
        })
        .collect();
    json!({"protocols": all.len(), "blocks": blocks})
}

fn dual(t: &mut Tally) -> Value {
    let all = protocols(5);
    for p in &all {
        match p.dual_check(TOL) {
            Ok(d) => t.check(d.agrees(TOL), || format!("{p:?}: {d:?}")),
            Err(e) => t.error(&format!("{p:?}"), e),
        }
        if matches!(p, Protocol::Path { .. } | Protocol::Caterpillar { .. }) {
            match p.comb() {
                Ok(g) => {
                    let k = classify_graph(&g).kind;
                    t.check(
                        matches!(k, ShapeKind::Path | ShapeKind::Star | ShapeKind::Caterpillar | ShapeKind::LeafedCycle),
                        || format!("{p:?}: comb is {k}"),
                    );
                }
                Err(e) => t.error(&format!("{p:?} comb"), e),
            }
        }
    }
    for k in [BlockKind::Path4, BlockKind::Star4, BlockKind::Three] {
        match k.program(0).cross_check(TOL) {
            Ok(c) => t.check(c.agrees(TOL), || format!("block {k}: {:?}", c.mismatches)),
            Err(e) => t.error(&format!("block {k}"), e),
        }
    }
    json!({"protocols": all.len(), "blocks": 3})
}

fn appendix_a(t: &mut Tally) -> Value {
    let mut rows = Vec::new();
    for n in 4..=8u32 {
        let order: Vec<u32> = (0..n).collect();
        let g = Graph::path(&order);
        let (f, l) = (0, n - 1);
        let out = match fuse_within(&g, f, l) {
            Ok(o) => o,
            Err(e) => {
                t.error(&format!("P{n}"), e);
                continue;
            }
        };
        let mut want = Graph::cycle(&order[..n as usize - 1]);
        want.add_vertex(l).expect("fresh");
        want.add_edge(f, l).expect("fresh");
        t.check(out == want, || format!("P{n}: got {out}"));
        match fuse_within_program(&g, f, l).and_then(|p| p.cross_check(TOL)) {
            Ok(c) => t.check(c.mismatches.is_empty(), || format!("P{n}: optics {:?}", c.mismatches)),
            Err(e) => t.error(&format!("P{n} optics"), e),
        }
        rows.push(json!({"N": n, "edges": out.edge_count()}));
    }
    Value::Array(rows)
}

fn appendix_b(t: &mut Tally, s: &Settings) -> Value {
    let sizes: Vec<usize> = s.n.map_or(vec![6, 8, 10], |n| vec![n]);
    let mut zig = Vec::new();
    for &n in &sizes {
        match sweep(Resource::Zigzag, n, true) {
            Ok(reports) => {
                let bad: Vec<String> = reports.iter().filter(|r| !r.equivalent).map(|r| r.word.to_string()).collect();
                t.check(bad.is_empty(), || format!("zigzag n={n}: words {bad:?}"));
                zig.push(json!({"n": n, "words": reports.len(), "mismatches": bad.len()}));
            }
            Err(e) => t.error(&format!("zigzag n={n}"), e),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.unwrap_or(7));
    let letters = [MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Z];
    let mut honey = 0;
    for _ in 0..100 {
        let w = TransitionWord::new((0..4).map(|_| *letters.choose(&mut rng).expect("three letters")).collect());
        match crosscheck(Resource::Honeycomb, 8, true, &w) {
            Ok(r) => t.check(r.equivalent, || format!("honeycomb {w}")),
            Err(e) => t.error(&format!("honeycomb {w}"), e),
        }
        honey += 1;
    }
    let mut leaves = 0;
    for n in [9, 12] {
        match sweep(Resource::PathEveryThird, n, true) {
            Ok(reports) => {
                for r in &reports {
                    let max = r.predicted.components.iter().map(|c| c.max_leaves_per_vertex()).max().unwrap_or(0);
                    let ok = r.equivalent && r.predicted.kind != ShapeKind::Other && max <= 1;
                    t.check(ok, || format!("path-every-third n={n} {}: {} leaves", r.word, max));
                    leaves += 1;
                }
            }
            Err(e) => t.error(&format!("path-every-third n={n}"), e),
        }
    }
    json!({"zigzag": zig, "honeycomb_words": honey, "path_every_third_words": leaves})
}

fn montecarlo(t: &mut Tally, s: &Settings) -> Value {
    let trials = s.trials.unwrap_or(100_000);
    let seed = s.seed.unwrap_or(7);
    let chain = ChainSpec::new(vec![BlockKind::Path4; 4], vec![JointPlan::Measure(MeasurementBasis::Y); 3], false);
    let jobs = [("ghz3", Job::Protocol(Protocol::Ghz { users: 3, server: false })), ("chain3", Job::Chain(chain))];
    let mut rows = Vec::new();
    for (name, job) in jobs {
        let a = monte_carlo(&job, trials, seed);
        let b = monte_carlo(&job, trials, seed);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                t.check(a.within_3_sigma, || {
                    format!("{name}: {} vs {} (±{})", a.estimated_probability, a.exact_probability, a.std_error)
                });
                t.check(a == b, || format!("{name}: rerun differs"));
                rows.push(serde_json::to_value(&a).unwrap_or(Value::Null));
            }
            (Err(e), _) | (_, Err(e)) => t.error(name, e),
        }
    }
    Value::Array(rows)
}

fn random_graph(rng: &mut ChaCha8Rng, n: u32) -> Graph {
    let mut g = Graph::empty(0..n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    g
}

fn random_state(rng: &mut ChaCha8Rng, ports: &[u32]) -> PhotonicState {
    let mut s = PhotonicState::vacuum([]).expect("empty state");
    for &p in ports {
        let (h, v) = (
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        let norm = (h.norm_sqr() + v.norm_sqr()).sqrt();
        let one = PhotonicState::single(p, h / norm, v / norm).expect("one photon");
        s = s.tensor(&one).expect("distinct ports");
    }
    s
}

fn properties(t: &mut Tally, s: &Settings) -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.unwrap_or(7));
    let cases = 200;
    for _ in 0..cases {
        let n = rng.random_range(1..=8);
        let g = random_graph(&mut rng, n);
        let v = rng.random_range(0..n);
        let twice = g.local_complement(v).and_then(|h| h.local_complement(v));
        t.check(twice.as_ref() == Ok(&g), || format!("lc involution on {g} at {v}"));
        let mut del = g.clone();
        let _ = del.remove_vertex(v);
        let z = g.measure_pauli(v, MeasurementBasis::Z);
        t.check(z.as_ref() == Ok(&del), || format!("Z at {v} on {g}"));
        if let Ok(h) = g.local_complement(v) {
            t.check(locally_equivalent(&g, &h) == Ok(true), || format!("lc class of {g}"));
        }
    }
    for _ in 0..cases {
        let n = rng.random_range(2..=5u32);
        let ports: Vec<u32> = (0..n).collect();
        let st = random_state(&mut rng, &ports);
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        let angle = rng.random_range(0.0..180.0);
        let after = [st.apply_pbs(a, b), st.apply_hwp(a, angle)];
        for out in after {
            match out {
                Ok(o) => {
                    t.check((o.norm_sqr() - st.norm_sqr()).abs() < 1e-12, || "norm changed".into());
                    t.check(o.photons() == st.photons() && o.check_invariants().is_ok(), || {
                        "photon number changed".into()
                    });
                }
                Err(e) => t.error("optics", e),
            }
        }
    }
    let spec = ChainSpec::new(vec![BlockKind::Path4; 3], vec![JointPlan::Keep; 2], false);
    let clean = fuse_chain(&spec, &mut Heralded).map(|r| r.final_graph);
    for joint in 0..2 {
        let mut fusions = vec![true; joint];
        fusions.extend([false, false, true]);
        let faulty = fuse_chain(&spec, &mut Scripted::new(&fusions, &[])).map(|r| r.final_graph);
        t.check(faulty.is_ok() && faulty == clean, || format!("failure at joint {joint} leaked"));
    }
    json!({"graph_cases": cases, "optics_cases": cases, "chain_joints": 2})
}
