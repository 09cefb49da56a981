mod online;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ontocheck_core::issues::{
    check_issues, findings_to_issues, issues_to_json, issues_to_turtle, order_issues, parse_issues, DraftConfig,
    IssueLedger,
};
use ontocheck_core::metrics::{serialize_table, Cell, MetricsTable, TableFormat, TableKind};
use ontocheck_core::modules::{
    export_dot, load_module, namespace_edges, namespace_usage, resolve_from, DotMode, ImportGraph, ModuleLocator,
};
use ontocheck_core::rules::{run_rules, Context, ExceptionList, Registry, Severity, ValidationReport, Verdict};
use ontocheck_core::{Execution, Graph, Iri, Vocabulary};

const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ontocheck",
    version,
    about = "Validation rules, metrics tables, import analysis and issue ordering for Turtle ontologies"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Catalog mapping ontology IRIs to documents (`IRI<TAB>path` per line)
    #[arg(long, global = true, value_name = "PATH")]
    catalog: Option<PathBuf>,
    /// Vocabulary overrides (flat TOML)
    #[arg(long, global = true, value_name = "PATH")]
    vocab: Option<PathBuf>,
    /// Exception list (`ruleId<TAB>focus<TAB>reason` per line)
    #[arg(long, global = true, value_name = "PATH")]
    exceptions: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Lowest severity that fails validation
    #[arg(long = "fail-on", global = true, value_enum, default_value_t = FailOn::Error)]
    fail_on: FailOn,
    /// Restrict to the import closure of this module
    #[arg(long, global = true, value_name = "IRI")]
    module: Option<String>,
    /// Check knowledge-resource links over the network (HEAD requests)
    #[arg(long, global = true)]
    online: bool,
    /// Accept several entries (or every catalog entry when none is given)
    #[arg(long = "merge-all", global = true)]
    merge_all: bool,
    /// Run only these rules (comma-separated ids)
    #[arg(long, global = true, value_delimiter = ',', value_name = "IDS")]
    enable: Vec<String>,
    /// Skip these rules (comma-separated ids)
    #[arg(long, global = true, value_delimiter = ',', value_name = "IDS")]
    disable: Vec<String>,
    /// Evaluate on a single thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FailOn {
    Error,
    Warning,
    Info,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    Entities,
    Properties,
    Spaces,
    Concepts,
    Activities,
    Constraints,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DepsMode {
    Imports,
    Namespaces,
}

#[derive(Subcommand)]
enum Command {
    /// Run the rule registry and report findings
    Validate {
        /// Entry documents or catalog IRIs
        inputs: Vec<String>,
    },
    /// Print a metrics table
    Report {
        #[arg(long, value_enum)]
        table: Table,
        inputs: Vec<String>,
    },
    /// Print module import edges or namespace usage
    Deps {
        #[arg(long, value_enum, default_value_t = DepsMode::Imports)]
        mode: DepsMode,
        /// Emit Graphviz dot
        #[arg(long)]
        dot: bool,
        inputs: Vec<String>,
    },
    /// Check, order or draft issues
    Issues {
        #[command(subcommand)]
        action: IssuesAction,
    },
}

#[derive(Subcommand)]
enum IssuesAction {
    /// Report integrity defects of an issue ledger
    Check { inputs: Vec<String> },
    /// Print issue ids in resolution order, one per line
    Order { inputs: Vec<String> },
    /// Draft one issue per unsuppressed error finding
    FromFindings {
        /// Namespace for draft issue IRIs
        #[arg(long, value_name = "IRI")]
        namespace: Option<String>,
        inputs: Vec<String>,
    },
}

/// A failure that ends the run with the given exit code after a diagnostic.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("ontocheck: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    let vocab = load_vocab(g)?;
    match &cli.command {
        Command::Validate { inputs } => cmd_validate(g, &vocab, inputs),
        Command::Report { table, inputs } => cmd_report(g, &vocab, *table, inputs),
        Command::Deps { mode, dot, inputs } => cmd_deps(g, &vocab, *mode, *dot, inputs),
        Command::Issues { action } => cmd_issues(g, &vocab, action),
    }
}

fn exec(g: &Global) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_vocab(g: &Global) -> Result<Vocabulary, Failure> {
    let v = match &g.vocab {
        Some(path) => {
            let text = read_text(path)?;
            Vocabulary::default()
                .with_overrides(&text)
                .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?
        }
        None => Vocabulary::default(),
    };
    v.validate()?;
    Ok(v)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn emit(bytes: impl AsRef<[u8]>) {
    use std::io::Write;
    let bytes = bytes.as_ref();
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(bytes);
    if !bytes.ends_with(b"\n") {
        let _ = out.write_all(b"\n");
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn csv_table(columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut t = MetricsTable::new("", columns);
    for r in rows {
        t.push(r.into_iter().map(Cell::Text).collect());
    }
    serialize_table(&t, TableFormat::Csv)
}

struct Loaded {
    imports: ImportGraph,
    graph: Graph,
}

/// Resolves the entries, their imports and the graph under analysis.
fn load(g: &Global, v: &Vocabulary, inputs: &[String]) -> Result<Loaded, Failure> {
    let mut locator = match &g.catalog {
        Some(path) => ModuleLocator::from_catalog_file(path)?,
        None => ModuleLocator::new(),
    };
    let mut entries: Vec<String> = inputs.to_vec();
    if entries.is_empty() {
        if g.merge_all && g.catalog.is_some() {
            entries = locator.catalog().map(|(i, _)| i.to_string()).collect();
        }
        if entries.is_empty() {
            return Err(Failure(EXIT_USAGE, "no entry given".into()));
        }
    } else if entries.len() > 1 && !g.merge_all {
        return Err(Failure(EXIT_USAGE, "several entries given; pass --merge-all to combine them".into()));
    }
    for e in &entries {
        if let Some(dir) = Path::new(e).parent().filter(|_| Path::new(e).is_file()) {
            locator = locator.with_search_dir(if dir.as_os_str().is_empty() { Path::new(".") } else { dir });
        }
    }
    let mut roots = Vec::new();
    for e in &entries {
        let path = Path::new(e);
        let module = if path.is_file() {
            load_module(path, None, v)?
        } else {
            let iri = Iri::new(e).map_err(|_| Failure(EXIT_USAGE, format!("{e}: no such file")))?;
            let found = locator.locate(&iri)?;
            load_module(&found, Some(&iri), v)?
        };
        roots.push(module);
    }
    let imports = resolve_from(roots, &locator, v, exec(g))?;
    warn_all(&imports.warnings);
    let graph = match &g.module {
        Some(m) => {
            let iri = Iri::new(m)?;
            if !imports.nodes.contains_key(&iri) {
                return Err(Failure(EXIT_USAGE, format!("module <{m}> is not among the loaded modules")));
            }
            imports.merged_closure(&iri)
        }
        None => imports.merged(),
    };
    warn_all(graph.warnings());
    Ok(Loaded { imports, graph })
}

fn registry(g: &Global) -> Result<Registry, Failure> {
    let full = Registry::default();
    for id in g.enable.iter().chain(&g.disable) {
        if !full.contains(id) {
            return Err(Failure(
                EXIT_USAGE,
                format!("unknown rule id `{id}` (known: {})", full.ids().join(", ")),
            ));
        }
    }
    Ok(full.retain(|id| (g.enable.is_empty() || g.enable.iter().any(|e| e == id)) && !g.disable.iter().any(|d| d == id)))
}

fn validate(g: &Global, v: &Vocabulary, loaded: &Loaded) -> Result<ValidationReport, Failure> {
    let registry = registry(g)?;
    let exceptions = match &g.exceptions {
        Some(path) => ExceptionList::parse(&read_text(path)?, &path.display().to_string())?,
        None => ExceptionList::default(),
    };
    let threshold = match g.fail_on {
        FailOn::Error => Severity::Error,
        FailOn::Warning => Severity::Warning,
        FailOn::Info => Severity::Info,
    };
    let cx = Context::new(&loaded.graph, v).with_modules(&loaded.imports);
    let mut report = run_rules(&cx, &registry, &exceptions, threshold, exec(g));
    if g.online {
        let (extra, warnings) = online::check_links(&cx);
        report.warnings.extend(warnings);
        if !extra.is_empty() {
            let mut findings = report.findings.clone();
            findings.extend(extra);
            let mut rebuilt = ValidationReport::from_findings(findings, &exceptions, &registry, threshold);
            rebuilt.warnings.splice(0..0, report.warnings);
            report = rebuilt;
        }
    }
    warn_all(&report.warnings);
    Ok(report)
}

fn cmd_validate(g: &Global, v: &Vocabulary, inputs: &[String]) -> Result<u8, Failure> {
    let loaded = load(g, v, inputs)?;
    let report = validate(g, v, &loaded)?;
    match g.format {
        Format::Json => emit(serde_json::to_string_pretty(&report).expect("serializable") + "\n"),
        Format::Csv => emit(csv_table(
            &["ruleId", "severity", "focus", "module", "suppressed", "message"],
            report.findings.iter().map(|f| {
                vec![
                    f.rule_id.clone(),
                    f.severity.to_string(),
                    f.focus.to_string(),
                    f.module.as_ref().map(Iri::to_string).unwrap_or_default(),
                    f.suppressed.to_string(),
                    f.message.clone(),
                ]
            }),
        )),
        Format::Text => {
            let mut out = String::new();
            for f in &report.findings {
                let mark = if f.suppressed { " (suppressed)" } else { "" };
                out.push_str(&format!("{} {} <{}>: {}{mark}\n", f.severity, f.rule_id, f.focus, f.message));
            }
            for e in &report.stale_exceptions {
                out.push_str(&format!("stale exception {} <{}>\n", e.rule_id, e.focus));
            }
            let count = |s| report.counts.get(&s).copied().unwrap_or(0);
            out.push_str(&format!(
                "{}: {} error(s), {} warning(s), {} info, {} suppressed, {} stale exception(s)\n",
                match report.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                },
                count(Severity::Error),
                count(Severity::Warning),
                count(Severity::Info),
                report.suppressed,
                report.stale_exceptions.len()
            ));
            emit(out);
        }
    }
    let failed = report.verdict == Verdict::Fail || !report.stale_exceptions.is_empty();
    Ok(if failed { EXIT_FINDINGS } else { 0 })
}

fn cmd_report(g: &Global, v: &Vocabulary, table: Table, inputs: &[String]) -> Result<u8, Failure> {
    let loaded = load(g, v, inputs)?;
    let kind = match table {
        Table::Entities => TableKind::Entities,
        Table::Properties => TableKind::Properties,
        Table::Spaces => TableKind::Spaces,
        Table::Concepts => TableKind::Concepts,
        Table::Activities => TableKind::Activities,
        Table::Constraints => TableKind::Constraints,
    };
    let cx = Context::new(&loaded.graph, v);
    let t = kind.compute(&cx);
    let format = match g.format {
        Format::Text => TableFormat::Text,
        Format::Json => TableFormat::Json,
        Format::Csv => TableFormat::Csv,
    };
    emit(serialize_table(&t, format));
    Ok(0)
}

fn cmd_deps(g: &Global, v: &Vocabulary, mode: DepsMode, dot: bool, inputs: &[String]) -> Result<u8, Failure> {
    let loaded = load(g, v, inputs)?;
    let ig = &loaded.imports;
    if dot {
        let mode = match mode {
            DepsMode::Imports => DotMode::Imports,
            DepsMode::Namespaces => DotMode::Namespaces,
        };
        emit(export_dot(ig, mode, v));
        return Ok(0);
    }
    match mode {
        DepsMode::Imports => match g.format {
            Format::Json => emit(json_text(&json!({
                "entry": ig.entry.as_str(),
                "modules": ig.nodes.keys().map(Iri::as_str).collect::<Vec<_>>(),
                "edges": ig.edges.iter().map(|(a, b)| [a.as_str(), b.as_str()]).collect::<Vec<_>>(),
                "unresolved": ig.unresolved.iter().map(Iri::as_str).collect::<Vec<_>>(),
                "cycles": ig.cycles.iter().map(|c| c.iter().map(Iri::as_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }))),
            Format::Csv => emit(csv_table(
                &["from", "to"],
                ig.edges.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]),
            )),
            Format::Text => {
                let mut out = format!("# {} module(s), {} import edge(s)\n", ig.nodes.len(), ig.edges.len());
                for (a, b) in &ig.edges {
                    out.push_str(&format!("<{a}> -> <{b}>\n"));
                }
                for u in &ig.unresolved {
                    out.push_str(&format!("unresolved <{u}>\n"));
                }
                emit(out);
            }
        },
        DepsMode::Namespaces => {
            let usage = namespace_usage(ig);
            match g.format {
                Format::Json => emit(json_text(&json!({
                    "usage": usage.rows.iter().map(|((m, ns), c)| json!({
                        "module": m.as_str(),
                        "namespace": ns,
                        "subjects": c.subject_count,
                        "objects": c.object_count,
                    })).collect::<Vec<_>>(),
                    "edges": namespace_edges(ig, v).into_iter().map(|(a, b)| [a, b]).collect::<Vec<_>>(),
                }))),
                Format::Csv => emit(csv_table(
                    &["module", "namespace", "subjects", "objects"],
                    usage.rows.iter().map(|((m, ns), c)| {
                        vec![m.to_string(), ns.clone(), c.subject_count.to_string(), c.object_count.to_string()]
                    }),
                )),
                Format::Text => {
                    let mut t = MetricsTable::new("namespaces", &["Module", "Namespace", "Subjects", "Objects"]);
                    for ((m, ns), c) in &usage.rows {
                        t.push(vec![
                            Cell::Text(m.to_string()),
                            Cell::Text(ns.clone()),
                            Cell::Int(c.subject_count),
                            Cell::Int(c.object_count),
                        ]);
                    }
                    emit(serialize_table(&t, TableFormat::Text));
                }
            }
        }
    }
    Ok(0)
}

fn ledger(g: &Global, v: &Vocabulary, inputs: &[String]) -> Result<IssueLedger, Failure> {
    let loaded = load(g, v, inputs)?;
    Ok(parse_issues(&loaded.graph, v)?)
}

fn cmd_issues(g: &Global, v: &Vocabulary, action: &IssuesAction) -> Result<u8, Failure> {
    match action {
        IssuesAction::Check { inputs } => {
            let l = ledger(g, v, inputs)?;
            let defects = check_issues(&l);
            match g.format {
                Format::Json => emit(serde_json::to_string_pretty(&json!({ "defects": defects })).expect("json") + "\n"),
                Format::Csv => emit(csv_table(
                    &["kind", "issue", "message"],
                    defects.iter().map(|d| {
                        let kind = serde_json::to_value(d.kind).expect("json");
                        vec![kind.as_str().unwrap_or_default().to_owned(), d.issue.to_string(), d.message.clone()]
                    }),
                )),
                Format::Text => {
                    let mut out = String::new();
                    for d in &defects {
                        out.push_str(&format!("<{}>: {}\n", d.issue, d.message));
                    }
                    out.push_str(&format!("{} issue(s), {} defect(s)\n", l.len(), defects.len()));
                    emit(out);
                }
            }
            Ok(if defects.is_empty() { 0 } else { EXIT_FINDINGS })
        }
        IssuesAction::Order { inputs } => {
            let l = ledger(g, v, inputs)?;
            let defects = check_issues(&l);
            for d in &defects {
                eprintln!("defect: <{}>: {}", d.issue, d.message);
            }
            let order = match order_issues(&l) {
                Ok(order) => order,
                Err(e) => return Err(Failure(EXIT_FINDINGS, e.to_string())),
            };
            let ids: Vec<&str> = order.iter().map(|i| i.id.as_str()).collect();
            match g.format {
                Format::Json => emit(json_text(&json!({ "order": ids }))),
                Format::Csv => emit(csv_table(
                    &["position", "issue"],
                    ids.iter().enumerate().map(|(n, id)| vec![(n + 1).to_string(), id.to_string()]),
                )),
                Format::Text => emit(ids.iter().map(|id| format!("{id}\n")).collect::<String>()),
            }
            Ok(if defects.is_empty() { 0 } else { EXIT_FINDINGS })
        }
        IssuesAction::FromFindings { namespace, inputs } => {
            v.issue_class.as_ref().ok_or_else(|| Failure(EXIT_USAGE, "issue vocabulary is not configured".into()))?;
            let loaded = load(g, v, inputs)?;
            let report = validate(g, v, &loaded)?;
            let mut cfg = DraftConfig::default();
            if let Some(ns) = namespace {
                cfg.namespace = ns.clone();
            }
            let drafts = findings_to_issues(&report, &cfg);
            match g.format {
                Format::Json => emit(issues_to_json(&drafts)),
                Format::Csv => emit(csv_table(
                    &["issue", "target", "critique", "suggestion"],
                    drafts.issues.values().map(|i| {
                        vec![
                            i.id.to_string(),
                            i.target.as_ref().map(|t| t.to_string()).unwrap_or_default(),
                            i.critique.clone(),
                            i.suggestion.clone(),
                        ]
                    }),
                )),
                Format::Text => emit(issues_to_turtle(&drafts, v)?),
            }
            Ok(0)
        }
    }
}
