//! `pbpo`: validate, match, apply and derive with rewrite rules written in
//! the text format of `pbpo-core`.
//!
//! Exit codes: 0 success, 1 no match (apply), 2 validation or step error,
//! 3 parse or read error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pbpo_core::dot::to_dot;
use pbpo_core::rewrite::{admissible_matches, canonicalize, first_step, readable_result, RuleViolation};
use pbpo_core::translation::pbpo_to_pbpoplus;
use pbpo_core::{derive, patch_decomposition, rewrite_all, GraphRef, PbpoRule, Rule, Semantics, Workspace};

#[derive(Parser)]
#[command(name = "pbpo", version, about = "Graph rewriting with PBPO+ rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check rule well-formedness.
    Validate {
        #[command(flatten)]
        input: Input,
        /// Rules to check; all rules when omitted.
        #[arg(long)]
        rule: Vec<String>,
        #[arg(long, default_value = "pbpo+", value_parser = semantics)]
        semantics: Semantics,
    },
    /// List admissible match and adherence pairs.
    Match {
        #[command(flatten)]
        target: Target,
    },
    /// Apply one step, or every step with `--all`.
    Apply {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Rewrite until no match remains or the step limit is hit.
    Derive {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Translate a PBPO rule into equivalent PBPO+ rules.
    Translate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a graph as DOT, colored by the first match of `--rule`.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        graph: String,
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value = "pbpo+", value_parser = semantics)]
        semantics: Semantics,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Input files, read in order into one workspace.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct Target {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    rule: String,
    #[arg(long)]
    graph: String,
    #[arg(long, default_value = "pbpo+", value_parser = semantics)]
    semantics: Semantics,
}

#[derive(Args)]
struct Output {
    /// Re-derive the step squares after every step (also `PBPO_CHECK=1`).
    #[arg(long)]
    check: bool,
    /// Write result graphs here in the text format.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn check(&self) -> bool {
        self.check || std::env::var("PBPO_CHECK").is_ok_and(|v| v == "1")
    }
}

fn semantics(s: &str) -> Result<Semantics, String> {
    s.parse()
}

enum Failure {
    NoMatch(String),
    Invalid(String),
    Parse(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::NoMatch(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Parse(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::NoMatch(m) | Failure::Invalid(m) | Failure::Parse(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(input: &Input) -> Result<Workspace, Failure> {
    let mut ws = Workspace::new();
    for path in &input.files {
        let src = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
        ws.extend_from_str(&src).map_err(|e| Failure::Parse(format!("{}:{e}", path.display())))?;
    }
    Ok(ws)
}

fn rule<'w>(ws: &'w Workspace, name: &str) -> Result<&'w Rule, Failure> {
    ws.rule(name).ok_or_else(|| Failure::Invalid(format!("no rule named `{name}`")))
}

fn graph<'w>(ws: &'w Workspace, name: &str) -> Result<&'w GraphRef, Failure> {
    ws.graph(name).ok_or_else(|| Failure::Invalid(format!("no graph named `{name}`")))
}

/// A workspace holding the lattices of `ws`, ready for result graphs.
fn results_workspace(ws: &Workspace) -> Workspace {
    let mut out = Workspace::new();
    out.lattices = ws.lattices.clone();
    out
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn describe(g: &GraphRef) -> String {
    format!("{} vertices, {} edges", g.vertex_count(), g.edge_count())
}

fn validate(ws: &Workspace, names: &[String], sem: Semantics) -> Outcome {
    let selected: Vec<&str> = if names.is_empty() {
        ws.rules.keys().map(String::as_str).collect()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let mut bad = 0;
    for name in selected {
        let decl = ws.rules.get(name).ok_or_else(|| Failure::Invalid(format!("no rule named `{name}`")))?;
        let mut problems: Vec<String> = decl
            .rule
            .violations()
            .into_iter()
            .filter(|v| sem == Semantics::PbpoPlus || !matches!(v, RuleViolation::TypingNotMonic(_)))
            .map(|v| v.to_string())
            .collect();
        if let Some(p) = &decl.pbpo {
            problems.extend(p.violations(true).into_iter().map(|v| v.to_string()));
        }
        if problems.is_empty() {
            println!("rule {name}: ok");
        } else {
            bad += 1;
            for p in problems {
                println!("rule {name}: {p}");
            }
        }
    }
    if bad > 0 {
        return Err(Failure::Invalid(format!("{bad} rule(s) failed validation under {sem}")));
    }
    Ok(())
}

fn match_cmd(ws: &Workspace, t: &Target) -> Outcome {
    let (r, host) = (rule(ws, &t.rule)?, graph(ws, &t.graph)?);
    let cands = admissible_matches(r, host, t.semantics);
    let (lhs, mut matches) = (r.lhs(), 0);
    let mut i = 0;
    while i < cands.len() {
        let m = &cands[i].m;
        let n = cands[i..].iter().take_while(|c| c.m.same_maps(m)).count();
        let mut pairs = Vec::new();
        for v in 0..lhs.vertex_count() {
            pairs.push(format!("{}->{}", lhs.vertices()[v].id, host.vertices()[m.vertex(v)].id));
        }
        for e in 0..lhs.edge_count() {
            pairs.push(format!("{}->{}", lhs.edges()[e].id, host.edges()[m.edge(e)].id));
        }
        matches += 1;
        println!("match {matches}: {{{}}} with {n} adherence(s)", pairs.join(", "));
        i += n;
    }
    println!("{matches} match(es), {} admissible pair(s) under {}", cands.len(), t.semantics);
    Ok(())
}

fn apply(ws: &Workspace, t: &Target, all: bool, o: &Output) -> Outcome {
    let (r, host) = (rule(ws, &t.rule)?, graph(ws, &t.graph)?);
    let step_err = |e: pbpo_core::rewrite::StepError| Failure::Invalid(format!("step failed: {e}"));
    let traces = if all {
        rewrite_all(r, host, t.semantics, o.check()).map_err(step_err)?
    } else {
        match first_step(r, host, t.semantics, o.check()) {
            Some(step) => vec![step.map_err(step_err)?],
            None => Vec::new(),
        }
    };
    if traces.is_empty() {
        return Err(Failure::NoMatch(format!("rule {} does not match {} under {}", t.rule, t.graph, t.semantics)));
    }
    let mut out = results_workspace(ws);
    for (i, trace) in traces.iter().enumerate() {
        let (g, _) = readable_result(trace);
        let name = format!("{}_{}", t.graph, i + 1);
        eprintln!("result {name}: {}", describe(&g));
        out.insert_graph(&name, g);
    }
    emit(&out.to_string(), o.out.as_deref())
}

fn derive_cmd(ws: &Workspace, t: &Target, max_steps: usize, o: &Output) -> Outcome {
    let (r, host) = (rule(ws, &t.rule)?, graph(ws, &t.graph)?);
    let d = derive(r, host, t.semantics, max_steps, o.check())
        .map_err(|e| Failure::Invalid(format!("step failed: {e}")))?;
    let mut out = results_workspace(ws);
    for (i, g) in d.graphs.iter().enumerate() {
        eprintln!("step {i}: {}", describe(g));
        out.insert_graph(&format!("{}_{i}", t.graph), g.clone());
    }
    if d.normal_form {
        eprintln!("normal form after {} step(s)", d.steps.len());
    } else {
        eprintln!("stopped after {} step(s)", d.steps.len());
    }
    emit(&out.to_string(), o.out.as_deref())
}

fn translate(ws: &Workspace, name: &str, out_path: Option<&Path>) -> Outcome {
    let decl = ws.rules.get(name).ok_or_else(|| Failure::Invalid(format!("no rule named `{name}`")))?;
    let p = decl.pbpo.clone().unwrap_or_else(|| PbpoRule::from_rule(decl.rule.clone()));
    let p = canonicalize(&p).map_err(|e| Failure::Invalid(format!("rule {name}: {e}")))?;
    let rules = pbpo_to_pbpoplus(&p).map_err(|e| Failure::Invalid(format!("rule {name}: {e}")))?;
    let mut out = results_workspace(ws);
    for (i, r) in rules.iter().enumerate() {
        out.insert_rule(&format!("{name}_{}", i + 1), &PbpoRule::from_rule(r.clone()), false);
    }
    eprintln!("rule {name}: {} PBPO+ rule(s)", rules.len());
    emit(&out.to_string(), out_path)
}

fn export_dot(ws: &Workspace, name: &str, rule_name: Option<&str>, sem: Semantics, out: Option<&Path>) -> Outcome {
    let g = graph(ws, name)?;
    let patch = match rule_name {
        Some(rn) => {
            let r = rule(ws, rn)?;
            let first = admissible_matches(r, g, sem).into_iter().next();
            let c = first.ok_or_else(|| Failure::NoMatch(format!("rule {rn} does not match {name} under {sem}")))?;
            Some(patch_decomposition(&c.m))
        }
        None => None,
    };
    emit(&to_dot(name, g, patch.as_ref()), out)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Validate { input, rule, semantics } => validate(&load(input)?, rule, *semantics),
        Command::Match { target } => match_cmd(&load(&target.input)?, target),
        Command::Apply { target, all, output } => apply(&load(&target.input)?, target, *all, output),
        Command::Derive { target, max_steps, output } => derive_cmd(&load(&target.input)?, target, *max_steps, output),
        Command::Translate { input, rule, out } => translate(&load(input)?, rule, out.as_deref()),
        Command::ExportDot { input, graph, rule, semantics, out } => {
            export_dot(&load(input)?, graph, rule.as_deref(), *semantics, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pbpo: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
