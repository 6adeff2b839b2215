mod args;
mod formulas;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use rebac_bench::{run_on_workload, BenchConfiguration, BenchReport};
use rebac_core::policy::{attach, load_policy, validate};
use rebac_core::{
    check, enabled_actions, enabled_principals, execute_action, filter_collection, load_graph, save_graph,
    AccessRequest, AuthorizationGraph, Binding, EngineConfig, Guard, PolicyStore, SharedGraph,
};
use rebac_service::{Pdp, Server};
use rebac_synth::{GraphSource, SynthConfig, Workload};

use args::{AdminCommand, BenchArgs, Cli, Command, EngineArgs, FmtCommand, StateArgs, SynthArgs};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` means a negative outcome: a deny or a failed check.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Check(a) => {
            let (store, graph) = load_state(&a.state)?;
            let req = AccessRequest::new(a.resource, a.user, parse_guard(&a.guard)?);
            let decision = check(&store, &graph, &req, &engine_config(&a.engine))?;
            println!("{}", if decision.allow { "allow" } else { "deny" });
            if a.trace {
                let t = &decision.trace;
                let trace = serde_json::json!({
                    "principals_considered": t.principals_considered,
                    "formulas_evaluated": t.formulas_evaluated,
                    "cache_hits": t.cache_hits,
                    "enabled_principals": t.enabled_principals,
                    "elapsed_us": (t.elapsed.as_secs_f64() * 1e9).round() / 1e3,
                });
                println!("{trace}");
            }
            Ok(decision.allow)
        }
        Command::Match(a) => {
            let (store, graph) = load_state(&a.state)?;
            for p in enabled_principals(&store, &graph, &a.resource, &a.user)? {
                println!("{p}");
            }
            Ok(true)
        }
        Command::Filter(a) => {
            let (store, graph) = load_state(&a.state)?;
            let guard = parse_guard(&a.guard)?;
            let allowed = filter_collection(&store, &graph, &a.user, &guard, &a.resources, &engine_config(&a.engine))?;
            for r in allowed {
                println!("{r}");
            }
            Ok(true)
        }
        Command::Admin(AdminCommand::List { state, user, patient }) => {
            let (store, graph) = load_state(&state)?;
            for action in enabled_actions(&store, &graph, &user, &patient)? {
                println!("{action}");
            }
            Ok(true)
        }
        Command::Admin(AdminCommand::Exec {
            state,
            action,
            user,
            patient,
            bindings,
            out,
        }) => {
            let (store, mut graph) = load_state(&state)?;
            let mut binding = Binding::new(user, patient);
            for b in &bindings {
                let Some((name, vertex)) = b.split_once('=') else {
                    bail!("binding `{b}` is not NAME=VERTEX");
                };
                binding = binding.with(name, vertex);
            }
            match execute_action(&store, &mut graph, &action, &binding) {
                Ok(report) => {
                    let target = out.as_deref().unwrap_or(&state.graph);
                    fs::write(target, save_graph(&graph)).with_context(|| format!("writing {}", target.display()))?;
                    for u in &report.applied {
                        println!("{} {}", u.op, u.edge);
                    }
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a),
        Command::Serve(a) => {
            let (store, graph) = load_state(&a.state)?;
            let pdp = Pdp::new(SharedGraph::new(graph), store, engine_config(&a.engine));
            let server = Server::bind(&a.listen, pdp).with_context(|| format!("binding {}", a.listen))?;
            eprintln!("listening on {}", server.local_addr()?);
            server.run()?;
            Ok(true)
        }
        Command::Fmt(FmtCommand::Check { file }) => fmt_check(&file),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Loads the graph and the policy and attaches the policy's relations and
/// ownership table. Policy diagnostics are printed as warnings.
fn load_state(state: &StateArgs) -> Result<(PolicyStore, AuthorizationGraph)> {
    let mut graph = load_graph(&read(&state.graph)?).with_context(|| format!("loading {}", state.graph.display()))?;
    let store = load_policy(&read(&state.policy)?).with_context(|| format!("loading {}", state.policy.display()))?;
    for d in validate(&store) {
        log::warn!("policy: {d}");
    }
    attach(&store, &mut graph)?;
    Ok((store, graph))
}

fn parse_guard(text: &str) -> Result<Guard> {
    let json = match text.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    serde_json::from_str(&json).with_context(|| format!("invalid guard `{json}`"))
}

fn engine_config(a: &EngineArgs) -> EngineConfig {
    EngineConfig {
        mode: a.mode,
        semantics: a.semantics,
        strategy: a.strategy,
    }
}

fn synth(a: SynthArgs) -> Result<bool> {
    let mut cfg = SynthConfig::new(a.seed, a.scale);
    if let (Some(nodes), Some(edges)) = (a.nodes, a.edges) {
        cfg = cfg.with_graph(GraphSource::Generated { nodes, edges });
    }
    if let Some(path) = a.edge_list {
        cfg = cfg.with_graph(GraphSource::EdgeList(path));
    }
    if let Some(n) = a.requests {
        cfg = cfg.with_request_count(n);
    }
    let workload = Workload::generate(&cfg)?;
    workload.write_to(&a.out)?;
    let c = workload.rbac.counts();
    println!(
        "users={} privileges={} roles={} pa={} ua={} vertices={} edges={} requests={}",
        c.users,
        c.privileges,
        c.roles,
        c.privilege_assignments,
        c.user_assignments,
        workload.graph.vertex_count(),
        workload.graph.edge_count(),
        workload.one_of.len() + workload.all_of.len(),
    );
    Ok(true)
}

fn bench(a: BenchArgs) -> Result<bool> {
    let configs: Vec<BenchConfiguration> = if a.config.eq_ignore_ascii_case("all") {
        BenchConfiguration::ALL.to_vec()
    } else {
        vec![a.config.parse().map_err(anyhow::Error::msg)?]
    };
    let mut workload = Workload::generate(&SynthConfig::new(a.seed, a.scale))?;
    let store = workload.store()?;
    let mut reports: Vec<BenchReport> = Vec::new();
    for c in configs {
        let report = run_on_workload(&store, &workload.graph, workload.requests(c.guard_kind()), c, a.repetitions, a.seed)?;
        eprintln!(
            "{:<11} mean {:>9.3} us  ci95 ±{:.3}  formula evals {:>6.2}  cache hits {:>6.2}  allow {:.3}",
            c.name(),
            report.mean_us,
            report.ci95_us,
            report.mean_formula_evals,
            report.mean_cache_hits,
            report.allow_rate()
        );
        reports.push(report);
    }
    write_reports(&a.out, &reports)?;
    Ok(true)
}

/// Concatenates the per-configuration CSVs under a single header.
fn write_reports(path: &Path, reports: &[BenchReport]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for (i, report) in reports.iter().enumerate() {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        let text = String::from_utf8(buf)?;
        let body = if i == 0 { &text[..] } else { text.split_once('\n').map_or("", |(_, rest)| rest) };
        out.write_all(body.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn fmt_check(file: &Path) -> Result<bool> {
    let text = read(file)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if text.trim_start().starts_with('{') {
        let store = load_policy(&text).with_context(|| format!("loading {}", file.display()))?;
        let diagnostics = validate(&store);
        for d in &diagnostics {
            writeln!(out, "{}: {d}", serde_json::to_value(d.code)?.as_str().unwrap_or("diagnostic"))?;
        }
        if diagnostics.is_empty() {
            writeln!(out, "ok: {} formulas, {} principals", store.formulas().len(), store.principals().len())?;
        }
        return Ok(diagnostics.is_empty());
    }
    match formulas::check_formula_file(&text) {
        Ok(library) => {
            writeln!(out, "ok: {} formulas", library.len())?;
            Ok(true)
        }
        Err(errors) => {
            for e in errors {
                writeln!(out, "{}:{}: {}", file.display(), e.line, e.message)?;
            }
            Ok(false)
        }
    }
}
