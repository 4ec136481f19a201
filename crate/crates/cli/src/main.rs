mod render;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gtschr::{
    check_confluence, check_gluing, check_op_equivalence_gts, decode, encode_graph, encode_gts, find_matches,
    generate, graph_key, normal_forms_chr_with, normal_forms_gts, normal_forms_gts_tracked, redundant_rules,
    ChrState, ConfluenceConfig, ConfluenceVerdict, EncodeMode, EncoderOptions, GlobalsPolicy, Limits, OpEqConfig,
    OpEqError, OpEqVerdict, PairGlobals, Project,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use render::{graph_line, strong_form};

#[derive(Parser, Debug)]
#[command(name = "gtschr", version, about = "Graph transformation systems analysed through Constraint Handling Rules")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Maximum derivation depth for closures and joinability checks.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    max_depth: u64,
    /// Maximum number of distinct states per closure.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Encoder options: a comma-separated subset of var-elim, arith,
    /// edge-ids, simpagation, or one of `default`, `verbose`, `none`.
    #[arg(long, global = true, default_value = "default", value_parser = parse_opts)]
    opts: EncoderOptions,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Gts,
    Chr,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Globals {
    /// All head variables are global (strong joinability).
    Full,
    /// No global variables (plain joinability).
    Empty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a project file and report every violation found.
    Validate { project: PathBuf },
    /// Print the CHR encoding of the rules, and optionally of a host.
    Encode {
        project: PathBuf,
        #[arg(long)]
        host: Option<String>,
    },
    /// List the matches of a rule into a host with their gluing status.
    Match {
        project: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        host: String,
    },
    /// Rewrite a host to its normal forms and print a derivation.
    Run {
        project: PathBuf,
        #[arg(long)]
        host: String,
        #[arg(long, value_enum, default_value_t = Engine::Chr)]
        engine: Engine,
    },
    /// Critical-pair analysis of the encoded rules.
    Confluence {
        project: PathBuf,
        #[arg(long, value_enum, default_value_t = Globals::Full)]
        globals: Globals,
        /// Run the invariant check on every overlap instead of rejecting
        /// partial edge identifications up front.
        #[arg(long)]
        no_prune: bool,
    },
    /// Operational equivalence of two projects over the same type graph.
    Opeq {
        left: PathBuf,
        right: PathBuf,
        /// Take confluence and termination of both programs as given.
        #[arg(long, alias = "assume-terminating")]
        attest: bool,
    },
    /// Greedily remove rules whose removal keeps the system equivalent.
    Redundant {
        project: PathBuf,
        #[arg(long, alias = "assume-terminating")]
        attest: bool,
        /// Compare normal forms of the original and reduced systems on this
        /// many random hosts with up to six nodes.
        #[arg(long, default_value_t = 0)]
        spot_check: usize,
    },
}

/// Exit statuses.
mod status {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INVALID: u8 = 2;
    pub const EXHAUSTED: u8 = 3;
    pub const PRECONDITION: u8 = 4;
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type Outcome = Result<u8, Failure>;

fn parse_opts(s: &str) -> Result<EncoderOptions, String> {
    match s {
        "default" => return Ok(EncoderOptions::default()),
        "verbose" => return Ok(EncoderOptions::verbose()),
        _ => {}
    }
    let mut o = EncoderOptions {
        variable_elimination: false,
        arithmetic_simplification: false,
        edge_identifiers: false,
        simpagation: false,
    };
    if s == "none" {
        return Ok(o);
    }
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "var-elim" => o.variable_elimination = true,
            "arith" => o.arithmetic_simplification = true,
            "edge-ids" => o.edge_identifiers = true,
            "simpagation" => o.simpagation = true,
            other => return Err(format!("unknown encoder option `{other}`")),
        }
    }
    Ok(o)
}

fn load(path: &Path) -> Result<Project, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(status::USAGE, format!("cannot read {}: {e}", path.display())))?;
    Project::parse(&text).map_err(|e| Failure::new(status::INVALID, format!("{}: {e}", path.display())))
}

impl Cli {
    fn limits(&self) -> Limits {
        Limits { max_depth: self.max_depth as usize, max_states: self.max_states as usize }
    }

    fn emit(&self, text: &str, value: serde_json::Value) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("serializable")),
        }
    }

    fn emit_serialized<T: serde::Serialize>(&self, text: &str, value: &T) {
        match self.format {
            Format::Text => print!("{text}"),
            Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        }
    }

    fn run(&self) -> Outcome {
        match &self.command {
            Command::Validate { project } => self.validate(project),
            Command::Encode { project, host } => self.encode(project, host.as_deref()),
            Command::Match { project, rule, host } => self.matches(project, rule, host),
            Command::Run { project, host, engine } => self.rewrite(project, host, *engine),
            Command::Confluence { project, globals, no_prune } => self.confluence(project, *globals, *no_prune),
            Command::Opeq { left, right, attest } => self.opeq(left, right, *attest),
            Command::Redundant { project, attest, spot_check } => self.redundant(project, *attest, *spot_check),
        }
    }

    fn validate(&self, path: &Path) -> Outcome {
        let p = load(path)?;
        let program = encode_gts(&p.gts, &self.opts).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
        let text = format!(
            "valid: {} rules, {} hosts, {} CHR rules\n",
            p.gts.rules().len(),
            p.hosts.len(),
            program.rules().len()
        );
        self.emit(&text, json!({ "valid": true, "rules": p.gts.rules().len(), "hosts": p.hosts.len() }));
        Ok(status::OK)
    }

    fn host_state(&self, p: &Project, name: &str) -> Result<ChrState, Failure> {
        let h = p.hosts.get(name).ok_or_else(|| Failure::new(status::USAGE, format!("no host named `{name}`")))?;
        encode_graph(&h.graph, EncodeMode::Ground, &h.strong, &GlobalsPolicy::AllVars, &self.opts)
            .map_err(|e| Failure::new(status::INVALID, e.to_string()))
    }

    fn encode(&self, path: &Path, host: Option<&str>) -> Outcome {
        let p = load(path)?;
        let program = encode_gts(&p.gts, &self.opts).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
        let mut text = program.to_string();
        let state = host.map(|h| self.host_state(&p, h)).transpose()?;
        if let (Some(h), Some(s)) = (host, &state) {
            text.push_str(&format!("{h} = {s}\n"));
        }
        let rules: Vec<String> = program.rules().iter().map(ToString::to_string).collect();
        self.emit(&text, json!({ "rules": rules, "program": program, "host": state }));
        Ok(status::OK)
    }

    fn matches(&self, path: &Path, rule: &str, host: &str) -> Outcome {
        let p = load(path)?;
        let r = p.gts.rule(rule).ok_or_else(|| Failure::new(status::USAGE, format!("no rule named `{rule}`")))?;
        let h = p.hosts.get(host).ok_or_else(|| Failure::new(status::USAGE, format!("no host named `{host}`")))?;
        let ms = find_matches(r, &h.graph).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
        let mut text = format!("{rule} → {host}: {} matches\n", ms.len());
        let mut out = Vec::new();
        for m in &ms {
            let report = check_gluing(r, m, &h.graph).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
            let mapping: Vec<String> = m
                .morphism
                .node_map
                .iter()
                .chain(&m.morphism.edge_map)
                .map(|(a, b)| format!("{a}↦{b}"))
                .collect();
            let verdict = if report.satisfied {
                "gluing ok".to_string()
            } else {
                let d: Vec<&str> = report.dangling_edges.iter().map(String::as_str).collect();
                format!("dangling edges {{{}}}", d.join(","))
            };
            text.push_str(&format!("  {}  {verdict}\n", mapping.join(", ")));
            out.push(json!({ "morphism": m.morphism, "gluing": report }));
        }
        self.emit(&text, json!({ "rule": rule, "host": host, "matches": out }));
        Ok(status::OK)
    }

    fn rewrite(&self, path: &Path, host: &str, engine: Engine) -> Outcome {
        let p = load(path)?;
        let h = p.hosts.get(host).ok_or_else(|| Failure::new(status::USAGE, format!("no host named `{host}`")))?;
        let tg = p.type_graph();
        let mut text = format!("host {host}: {}\n", graph_line(&h.graph, &h.strong));
        let mut report = serde_json::Map::new();
        let mut complete = true;
        let mut gts_classes: Option<BTreeSet<String>> = None;
        let mut chr_classes: Option<BTreeSet<String>> = None;

        if matches!(engine, Engine::Gts | Engine::Both) {
            let mut trace = Vec::new();
            let mut g = h.graph.clone();
            let mut strong = h.strong.clone();
            text.push_str("graph derivation:\n");
            for _ in 0..self.max_depth {
                let step = gtschr::derive_all(&p.gts, &g)
                    .into_iter()
                    .find(|s| strong.iter().all(|v| s.track.map_node(v).is_some()));
                let Some(step) = step else { break };
                strong = strong.iter().filter_map(|v| step.track.map_node(v)).map(str::to_string).collect();
                let mapping: Vec<String> =
                    step.matched.morphism.node_map.iter().map(|(a, b)| format!("{a}↦{b}")).collect();
                text.push_str(&format!("  ⇒ {} [{}]: {}\n", step.rule, mapping.join(", "), graph_line(&step.after, &strong)));
                trace.push(json!({ "rule": step.rule, "match": step.matched.morphism, "graph": render::graph_json(&step.after, &strong) }));
                g = step.after;
            }
            let nf = normal_forms_gts_tracked(&p.gts, &h.graph, &h.strong, self.limits());
            complete &= nf.is_complete();
            text.push_str(&format!("graph normal forms: {}{}\n", nf.finals().len(), partial(nf.is_complete())));
            for (g, s) in nf.finals() {
                text.push_str(&format!("  {}\n", graph_line(g, s)));
            }
            gts_classes = Some(nf.finals().iter().map(|(g, s)| strong_form(g, s)).collect());
            report.insert("gts".into(), json!({
                "trace": trace,
                "complete": nf.is_complete(),
                "normal_forms": nf.finals().iter().map(|(g, s)| render::graph_json(g, s)).collect::<Vec<_>>(),
            }));
        }

        if matches!(engine, Engine::Chr | Engine::Both) {
            let program = encode_gts(&p.gts, &self.opts).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
            let start = self.host_state(&p, host)?;
            let mut trace = vec![json!({ "state": start })];
            text.push_str(&format!("CHR derivation:\n  σ0 = {start}\n"));
            let mut s = gtschr::normalize(&start);
            for k in 1..=self.max_depth {
                let Some((rule, next)) = gtschr::step_all_labelled(&program, &s).into_iter().next() else { break };
                text.push_str(&format!("  ↣ {rule}: σ{k} = {next}\n"));
                trace.push(json!({ "rule": rule, "state": next }));
                s = next;
            }
            let key = |s: &ChrState| graph_key(s, tg);
            let nf = normal_forms_chr_with(&program, &start, self.limits(), &key);
            complete &= nf.is_complete();
            text.push_str(&format!("CHR final states: {}{}\n", nf.finals().len(), partial(nf.is_complete())));
            let mut classes = BTreeSet::new();
            for f in nf.finals() {
                text.push_str(&format!("  {f}\n"));
                if let Ok((g, strong)) = decode(f, tg) {
                    text.push_str(&format!("      graph: {}\n", graph_line(&g, &strong)));
                    classes.insert(strong_form(&g, &strong));
                }
            }
            text.push_str(&format!("decoded graph classes: {}\n", classes.len()));
            chr_classes = Some(classes);
            report.insert("chr".into(), json!({ "trace": trace, "complete": nf.is_complete(), "final_states": nf.finals() }));
        }

        let mut code = if complete { status::OK } else { status::EXHAUSTED };
        if let (Some(a), Some(b)) = (&gts_classes, &chr_classes) {
            let agree = a == b;
            text.push_str(if agree { "engines agree\n" } else { "engines DISAGREE\n" });
            report.insert("agree".into(), json!(agree));
            if complete && !agree {
                code = status::INVALID;
            }
        }
        self.emit(&text, serde_json::Value::Object(report));
        Ok(code)
    }

    fn confluence(&self, path: &Path, globals: Globals, no_prune: bool) -> Outcome {
        let p = load(path)?;
        let program = encode_gts(&p.gts, &self.opts).map_err(|e| Failure::new(status::INVALID, e.to_string()))?;
        let config = ConfluenceConfig {
            limits: self.limits(),
            globals: match globals {
                Globals::Full => PairGlobals::Full,
                Globals::Empty => PairGlobals::Empty,
            },
            prune: !no_prune,
        };
        let report = check_confluence(&program, p.type_graph(), &config);
        self.emit_serialized(&report.to_string(), &report);
        Ok(if report.verdict == ConfluenceVerdict::Inconclusive { status::EXHAUSTED } else { status::OK })
    }

    fn opeq_config(&self, attest: bool) -> OpEqConfig {
        OpEqConfig { confluence: ConfluenceConfig { limits: self.limits(), ..ConfluenceConfig::default() }, attest }
    }

    fn opeq(&self, left: &Path, right: &Path, attest: bool) -> Outcome {
        let (a, b) = (load(left)?, load(right)?);
        let report = check_op_equivalence_gts(&a.gts, &b.gts, &self.opts, &self.opeq_config(attest)).map_err(opeq_failure)?;
        self.emit_serialized(&report.to_string(), &report);
        Ok(if report.verdict == OpEqVerdict::Inconclusive { status::EXHAUSTED } else { status::OK })
    }

    fn redundant(&self, path: &Path, attest: bool, spot_check: usize) -> Outcome {
        let p = load(path)?;
        let dropped = redundant_rules(&p.gts, &self.opts, &self.opeq_config(attest)).map_err(opeq_failure)?;
        let mut text = String::new();
        let mut reduced = p.gts.clone();
        for (name, _) in &dropped {
            text.push_str(&format!("{name} removable\n"));
            reduced = reduced.without(name);
        }
        if dropped.is_empty() {
            text.push_str("no redundant rules\n");
        }
        let kept: Vec<&str> = reduced.rules().iter().map(|r| r.name()).collect();
        text.push_str(&format!("remaining: {}\n", kept.join(", ")));

        let mut disagreements = 0;
        let mut exhausted = 0;
        if spot_check > 0 && !dropped.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..spot_check {
                let host = generate::graph(&mut rng, p.type_graph(), 6, 8);
                let (x, y) = (normal_forms_gts(&p.gts, &host, self.limits()), normal_forms_gts(&reduced, &host, self.limits()));
                if !x.is_complete() || !y.is_complete() {
                    exhausted += 1;
                    continue;
                }
                let forms = |v: &[gtschr::TypedGraph]| -> BTreeSet<String> {
                    v.iter().map(|g| strong_form(g, &BTreeSet::new())).collect()
                };
                if forms(x.finals()) != forms(y.finals()) {
                    disagreements += 1;
                }
            }
            text.push_str(&format!(
                "spot check: {spot_check} random hosts, {disagreements} disagreements, {exhausted} exhausted\n"
            ));
        }
        let value = json!({
            "dropped": dropped.iter().map(|(n, r)| json!({ "rule": n, "evidence": r })).collect::<Vec<_>>(),
            "remaining": kept,
            "spot_check": { "hosts": spot_check, "disagreements": disagreements, "exhausted": exhausted },
        });
        self.emit(&text, value);
        Ok(if disagreements > 0 { status::INVALID } else { status::OK })
    }
}

fn partial(complete: bool) -> &'static str {
    if complete {
        ""
    } else {
        " (limits exhausted, partial)"
    }
}

fn opeq_failure(e: OpEqError) -> Failure {
    let code = match e {
        OpEqError::Precondition { .. } => status::PRECONDITION,
        _ => status::INVALID,
    };
    Failure::new(code, e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { status::USAGE } else { status::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
