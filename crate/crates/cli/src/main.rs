//! `weave`: command-line front end for the photon-weaving server.

mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use weave_core::graph::{classify_graph, Graph};
use weave_core::minors::{crosscheck, predict_class, MinorError, Resource, TransitionWord};
use weave_core::optics::{ghz_chain, weaving_chain};
use weave_core::protocols::{
    fuse_chain, monte_carlo, sample, trial_rng, BlockKind, Heralded, Job, JointPlan, ProtocolError, ProtocolRequest,
    ProtocolResult, Sampled,
};

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "weave", version, about = "Photon-weaving entanglement server simulator")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Run one protocol and report the distributed graph state.
    Simulate(Opts),
    /// Predict and simulate the graph left by a measurement word.
    Classify(Opts),
    /// Run verification suites.
    Verify(Opts),
    /// Seeded Monte Carlo estimate of a protocol's success rate.
    Montecarlo(Opts),
    /// Write a graph, protocol result or photonic state.
    Export(Opts),
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Json,
    Dot,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Csv => "csv",
        }
    }
}

#[derive(Args, Debug, Default, Serialize)]
struct Opts {
    /// ghz, path, cycle, caterpillar or chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    protocol: Option<String>,
    /// Number of users M.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    users: Option<usize>,
    /// Keep a server photon in the distributed state.
    #[arg(long)]
    server: bool,
    /// Caterpillar roles, e.g. SLSS.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    layout: Option<String>,
    /// Close the shape into a cycle.
    #[arg(long)]
    close: bool,
    /// Open resource form for `classify`.
    #[arg(long)]
    open: bool,
    /// Chain blocks, e.g. path4,path4,three.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<String>,
    /// One entry per joint: X, Y, Z or K (keep), e.g. Y,K or YK.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<String>,
    /// Transition word over X, Y, Z.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    word: Option<String>,
    /// zigzag, honeycomb or path-every-third.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    resource: Option<String>,
    /// Resource size, or photon count for `export --circuit`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// Graph to export: JSON file or path:N, cycle:N, star:N, complete:N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<String>,
    /// Optical circuit whose postselected state is exported: ghz or weaving.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Output file; defaults to $WEAVE_OUT_DIR/<verb>.<ext>, else stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    /// Suite name or `all`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<String>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Size limits are runtime failures; everything else is bad input.
fn protocol_failure(e: ProtocolError) -> Failure {
    match e {
        ProtocolError::OutOfRange { .. } => Failure::Runtime(e.to_string()),
        e => Failure::Usage(e.to_string()),
    }
}

fn minor_failure(e: MinorError) -> Failure {
    match e {
        MinorError::TooLarge { .. } => Failure::Runtime(e.to_string()),
        e => Failure::Usage(e.to_string()),
    }
}

impl Opts {
    fn given(&self) -> Vec<&'static str> {
        let mut g = Vec::new();
        let mut add = |set: bool, name| {
            if set {
                g.push(name)
            }
        };
        add(self.protocol.is_some(), "protocol");
        add(self.users.is_some(), "users");
        add(self.server, "server");
        add(self.layout.is_some(), "layout");
        add(self.close, "close");
        add(self.open, "open");
        add(self.blocks.is_some(), "blocks");
        add(self.plan.is_some(), "plan");
        add(self.word.is_some(), "word");
        add(self.resource.is_some(), "resource");
        add(self.n.is_some(), "n");
        add(self.graph.is_some(), "graph");
        add(self.circuit.is_some(), "circuit");
        add(self.trials.is_some(), "trials");
        add(self.seed.is_some(), "seed");
        g
    }

    fn allow(&self, verb: &str, allowed: &[&str], formats: &[Format]) -> Outcome<()> {
        if let Some(bad) = self.given().into_iter().find(|f| !allowed.contains(f)) {
            return usage(format!("{verb}: --{bad} is not accepted"));
        }
        if !formats.contains(&self.format) {
            return usage(format!("{verb}: --format {} is not supported", self.format.ext()));
        }
        Ok(())
    }

    fn request(&self) -> Outcome<ProtocolRequest> {
        let Some(protocol) = self.protocol.clone() else {
            return usage("--protocol is required");
        };
        let layout = match &self.layout {
            Some(l) => Some(l.parse().map_err(|e| Failure::Usage(format!("--layout: {e}")))?),
            None => None,
        };
        let blocks = match &self.blocks {
            Some(b) => b
                .split(',')
                .map(|s| s.trim().parse::<BlockKind>().map_err(|e| Failure::Usage(format!("--blocks: {e}"))))
                .collect::<Outcome<Vec<_>>>()?,
            None => Vec::new(),
        };
        let plan = match &self.plan {
            Some(p) => parse_plan(p)?,
            None => Vec::new(),
        };
        let req = ProtocolRequest {
            protocol,
            users: self.users,
            server: self.server,
            layout,
            close: self.close,
            blocks,
            plan,
            trials: self.trials.unwrap_or(0),
            seed: self.seed.unwrap_or(0),
        };
        req.job().map_err(protocol_failure)?;
        Ok(req)
    }
}

fn parse_plan(p: &str) -> Outcome<Vec<JointPlan>> {
    let items: Vec<String> = if p.contains(',') {
        p.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        p.chars().map(String::from).collect()
    };
    items
        .iter()
        .map(|s| s.parse::<JointPlan>().map_err(|e| Failure::Usage(format!("--plan: {e}"))))
        .collect()
}

const PROTOCOL_FLAGS: [&str; 7] = ["protocol", "users", "server", "layout", "close", "blocks", "plan"];

/// What a verb produced: a report, or raw artifact content.
enum Output {
    Report { results: Value, pass: Option<bool> },
    Raw(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, opts) = match &cli.verb {
        Verb::Simulate(o) => ("simulate", o),
        Verb::Classify(o) => ("classify", o),
        Verb::Verify(o) => ("verify", o),
        Verb::Montecarlo(o) => ("montecarlo", o),
        Verb::Export(o) => ("export", o),
    };
    let produced = match &cli.verb {
        Verb::Simulate(o) => simulate(o),
        Verb::Classify(o) => classify(o),
        Verb::Verify(o) => verify(o),
        Verb::Montecarlo(o) => montecarlo(o),
        Verb::Export(o) => export(o),
    };
    let (content, pass) = match produced {
        Ok(Output::Raw(s)) => (s, None),
        Ok(Output::Report { results, pass }) => {
            let r = Report {
                schema_version: report::SCHEMA_VERSION.into(),
                verb: name.into(),
                inputs: serde_json::to_value(opts).expect("options serialise"),
                results,
                pass,
                timing: start.elapsed().as_secs_f64(),
            };
            (r.to_json(), pass)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let dest = report::destination(opts.out.as_deref(), &format!("{name}.{}", opts.format.ext()));
    if let Err(e) = report::emit(&content, dest.as_deref()) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(1);
    }
    if pass == Some(false) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_protocol(req: &ProtocolRequest, seed: Option<u64>) -> Outcome<ProtocolResult> {
    let job = req.job().map_err(protocol_failure)?;
    let r = match (&job, seed) {
        (Job::Protocol(p), None) => p.run(&mut Heralded),
        (Job::Protocol(p), Some(s)) => p.run(&mut Sampled(trial_rng(s, u64::MAX))),
        (Job::Chain(c), None) => fuse_chain(c, &mut Heralded),
        (Job::Chain(c), Some(s)) => fuse_chain(c, &mut Sampled(trial_rng(s, u64::MAX))),
    };
    r.map_err(runtime)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serialises")
}

fn simulate(o: &Opts) -> Outcome<Output> {
    let mut allowed = PROTOCOL_FLAGS.to_vec();
    allowed.push("seed");
    o.allow("simulate", &allowed, &[Format::Json, Format::Dot])?;
    let req = o.request()?;
    let res = run_protocol(&req, o.seed)?;
    if o.format == Format::Dot {
        return Ok(Output::Raw(res.final_graph.to_dot_with("simulate", &res.users)));
    }
    let shape = classify_graph(&res.final_graph);
    Ok(Output::Report {
        results: json!({
            "result": to_value(&res),
            "probability": res.success_probability(),
            "exponent": res.exponent,
            "shape": to_value(&shape.kind),
        }),
        pass: None,
    })
}

fn parse_word(w: &str) -> Outcome<TransitionWord> {
    if w.is_empty() {
        return usage("--word must not be empty");
    }
    w.parse().map_err(|e| Failure::Usage(format!("--word: {e}")))
}

fn classify(o: &Opts) -> Outcome<Output> {
    o.allow("classify", &["word", "resource", "n", "open"], &[Format::Json, Format::Dot])?;
    let Some(w) = &o.word else {
        return usage("classify: --word is required");
    };
    let word = parse_word(w)?;
    let resource: Resource = match &o.resource {
        Some(r) => r.parse().map_err(|e| Failure::Usage(format!("--resource: {e}")))?,
        None => Resource::Zigzag,
    };
    let closed = !o.open;
    let n = match o.n {
        Some(n) => n,
        None => resource.period() * (word.len() + usize::from(!closed)),
    };
    let graph = resource.build(n, closed).map_err(minor_failure)?;
    if graph.servers.len() != word.len() {
        return usage(format!(
            "{resource} with n = {n} has {} measured vertices but the word has {} letters",
            graph.servers.len(),
            word.len()
        ));
    }
    let report = crosscheck(resource, n, closed, &word).map_err(runtime)?;
    if o.format == Format::Dot {
        return Ok(Output::Raw(report.predicted_graph.to_dot_with("classify", &graph.users)));
    }
    let links = graph.links(&word).map_err(runtime)?;
    let mut results = to_value(&report);
    results["links"] = to_value(&links);
    if resource == Resource::Zigzag {
        results["word_class"] = to_value(&predict_class(&word, closed).map_err(runtime)?);
    }
    let pass = report.equivalent && report.transition_minor != Some(false);
    Ok(Output::Report {
        results,
        pass: Some(pass),
    })
}

fn verify(o: &Opts) -> Outcome<Output> {
    o.allow("verify", &["n", "trials", "seed"], &[Format::Json])?;
    let Some(suite) = &o.suite else {
        return usage(format!("verify: --suite is required ({} or all)", suites::SUITES.join(", ")));
    };
    if !suites::is_suite(suite) {
        return usage(format!("unknown suite {suite:?}"));
    }
    if let Some(n) = o.n {
        Resource::Zigzag.check_size(n).map_err(minor_failure)?;
    }
    if o.trials == Some(0) {
        return usage("--trials must be positive");
    }
    let settings = suites::Settings {
        n: o.n,
        trials: o.trials,
        seed: o.seed,
    };
    let reports = suites::run(suite, &settings);
    let pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        eprintln!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.suite);
    }
    let results = json!({ "suites": reports.iter().map(|r| {
        let mut v = to_value(r);
        // Per-suite timings vary run to run; keep reports byte-stable.
        v.as_object_mut().map(|m| m.remove("seconds"));
        v
    }).collect::<Vec<_>>() });
    Ok(Output::Report {
        results,
        pass: Some(pass),
    })
}

fn montecarlo(o: &Opts) -> Outcome<Output> {
    let mut allowed = PROTOCOL_FLAGS.to_vec();
    allowed.extend(["trials", "seed"]);
    o.allow("montecarlo", &allowed, &[Format::Json, Format::Csv])?;
    let Some(seed) = o.seed else {
        return usage("montecarlo: --seed is required");
    };
    let trials = match o.trials {
        Some(0) | None => return usage("montecarlo: --trials must be a positive count"),
        Some(t) => t,
    };
    let job = o.request()?.job().map_err(protocol_failure)?;
    if o.format == Format::Csv {
        let t = sample(&job, trials, seed).map_err(runtime)?;
        return weave_core::protocols::trials_csv(&t).map(Output::Raw).map_err(runtime);
    }
    let stats = monte_carlo(&job, trials, seed).map_err(runtime)?;
    Ok(Output::Report {
        pass: Some(stats.within_5_sigma),
        results: json!({ "job": to_value(&job), "statistics": to_value(&stats) }),
    })
}

fn named_graph(spec: &str) -> Outcome<Graph> {
    if let Some((kind, n)) = spec.split_once(':') {
        let n: u32 = n.parse().map_err(|_| Failure::Usage(format!("--graph: bad size in {spec:?}")))?;
        let labels: Vec<u32> = (0..n).collect();
        return match kind {
            "path" if n >= 1 => Ok(Graph::path(&labels)),
            "cycle" if n >= 3 => Ok(Graph::cycle(&labels)),
            "star" if n >= 2 => Ok(Graph::star(0, &labels[1..])),
            "complete" if n >= 1 => Ok(Graph::complete(&labels)),
            _ => usage(format!("--graph: unsupported {spec:?}")),
        };
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("--graph {spec}: {e}")))?;
    Graph::from_json(&text).map_err(|e| Failure::Usage(format!("--graph {spec}: {e}")))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&report::round_floats(v.clone())).expect("values serialise");
    s.push('\n');
    s
}

fn graph_artifact(g: &Graph, format: Format, highlight: &[u32]) -> String {
    match format {
        Format::Json => json_text(&to_value(g)),
        Format::Dot => g.to_dot_with("export", highlight),
        Format::Csv => {
            let mut s = String::from("u,v\n");
            for (a, b) in g.edges() {
                s.push_str(&format!("{a},{b}\n"));
            }
            s
        }
    }
}

fn export(o: &Opts) -> Outcome<Output> {
    let sources = [o.graph.is_some(), o.protocol.is_some(), o.circuit.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return usage("export: give exactly one of --graph, --protocol, --circuit");
    }
    if let Some(spec) = &o.graph {
        o.allow("export", &["graph"], &[Format::Json, Format::Dot, Format::Csv])?;
        return Ok(Output::Raw(graph_artifact(&named_graph(spec)?, o.format, &[])));
    }
    if o.protocol.is_some() {
        let mut allowed = PROTOCOL_FLAGS.to_vec();
        allowed.push("seed");
        o.allow("export", &allowed, &[Format::Json, Format::Dot, Format::Csv])?;
        let res = run_protocol(&o.request()?, o.seed)?;
        return Ok(Output::Raw(match o.format {
            Format::Json => json_text(&to_value(&res)),
            f => graph_artifact(&res.final_graph, f, &res.users),
        }));
    }
    o.allow("export", &["circuit", "n"], &[Format::Json])?;
    let n = o.n.unwrap_or(3);
    let circuit = match o.circuit.as_deref() {
        Some("ghz") => ghz_chain(n),
        Some("weaving") => weaving_chain(n),
        Some(c) => return usage(format!("--circuit: unknown circuit {c:?} (ghz or weaving)")),
        None => unreachable!("checked above"),
    }
    .map_err(runtime)?;
    let run = circuit.run().map_err(runtime)?;
    Ok(Output::Raw(json_text(&json!({
        "circuit": o.circuit,
        "n": n,
        "postselection_probability": run.postselection_probability,
        "state": to_value(&run.postselected.dump()),
    }))))
}
