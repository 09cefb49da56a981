//! `owl:imports` resolution, namespace cross-usage and Graphviz export.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use petgraph::graphmap::DiGraphMap;

use crate::error::LoadError;
use crate::exec::Execution;
use crate::graph::{merge, parse_turtle, Graph, Iri, Subject, Term};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone)]
pub struct ModuleDescriptor {
    pub ontology_iri: Iri,
    pub source_id: String,
    /// Imported IRIs in document order, without duplicates.
    pub imports: Vec<Iri>,
    pub graph: Graph,
    pub warnings: Vec<String>,
}

impl ModuleDescriptor {
    /// Reads the ontology declaration and imports of a parsed document.
    /// `fallback` names the module when it declares no ontology.
    pub fn describe(source_id: impl Into<String>, graph: Graph, v: &Vocabulary, fallback: Iri) -> Self {
        let source_id = source_id.into();
        let mut warnings = Vec::new();
        let declared: Vec<&Iri> = graph
            .with_predicate(&v.type_prop)
            .filter(|t| t.object.as_iri() == Some(&v.ontology_decl))
            .filter_map(|t| t.subject.as_iri())
            .collect();
        let ontology_iri = match declared.as_slice() {
            [] => fallback,
            [only] => (*only).clone(),
            [first, rest @ ..] => {
                for other in rest {
                    warnings.push(format!(
                        "{source_id}: duplicate ontology declaration <{other}> ignored; using <{first}>"
                    ));
                }
                (*first).clone()
            }
        };
        let mut imports = Vec::new();
        let mut seen = BTreeSet::new();
        for t in graph.with_subject(&Subject::Iri(ontology_iri.clone())) {
            if t.predicate != v.imports_prop {
                continue;
            }
            if let Some(i) = t.object.as_iri() {
                if seen.insert(i.clone()) {
                    imports.push(i.clone());
                }
            }
        }
        ModuleDescriptor {
            ontology_iri,
            source_id,
            imports,
            graph,
            warnings,
        }
    }
}

/// Maps ontology IRIs to local documents: an explicit catalog, then a scan of
/// search directories for `<local-name>.ttl`.
#[derive(Debug, Clone, Default)]
pub struct ModuleLocator {
    catalog: BTreeMap<Iri, PathBuf>,
    search_dirs: Vec<PathBuf>,
}

impl ModuleLocator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads a catalog file: one `<ontology-iri> TAB <relative-path>` entry per
    /// line, paths relative to the catalog's directory. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_catalog_file(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut locator = Self::parse_catalog(&text, dir).map_err(|(line, message)| LoadError::Catalog {
            path: path.to_owned(),
            line,
            message,
        })?;
        locator.search_dirs.push(dir.to_owned());
        Ok(locator)
    }

    /// Parses catalog text; errors carry the 1-based line number.
    pub fn parse_catalog(text: &str, dir: &Path) -> Result<Self, (usize, String)> {
        let mut catalog = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (iri, rel) = line
                .split_once('\t')
                .ok_or((n + 1, "expected `<ontology-iri> TAB <relative-path>`".to_owned()))?;
            let iri = iri.trim().trim_start_matches('<').trim_end_matches('>');
            let iri = Iri::new(iri).map_err(|e| (n + 1, e.to_string()))?;
            if catalog.insert(iri.clone(), dir.join(rel.trim())).is_some() {
                return Err((n + 1, format!("<{iri}> listed twice")));
            }
        }
        Ok(ModuleLocator {
            catalog,
            search_dirs: Vec::new(),
        })
    }

    pub fn with_search_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.search_dirs.push(dir.into());
        self
    }

    /// Catalog entries in IRI order.
    pub fn catalog(&self) -> impl Iterator<Item = (&Iri, &Path)> {
        self.catalog.iter().map(|(i, p)| (i, p.as_path()))
    }

    pub fn insert(&mut self, iri: Iri, path: impl Into<PathBuf>) {
        self.catalog.insert(iri, path.into());
    }

    pub fn locate(&self, iri: &Iri) -> Result<PathBuf, LoadError> {
        if let Some(p) = self.catalog.get(iri) {
            return Ok(p.clone());
        }
        let trimmed = iri.as_str().trim_end_matches(['#', '/']);
        let name = trimmed.rsplit(['/', '#', ':']).next().unwrap_or(trimmed);
        let stem = name.strip_suffix(".ttl").unwrap_or(name);
        if !stem.is_empty() {
            for dir in &self.search_dirs {
                let candidate = dir.join(format!("{stem}.ttl"));
                if candidate.is_file() {
                    return Ok(candidate);
                }
            }
        }
        Err(LoadError::NotFound(iri.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ImportGraph {
    pub entry: Iri,
    pub nodes: BTreeMap<Iri, ModuleDescriptor>,
    pub edges: BTreeSet<(Iri, Iri)>,
    pub unresolved: BTreeSet<Iri>,
    /// Import cycles, each sorted, in sorted order.
    pub cycles: Vec<Vec<Iri>>,
    pub warnings: Vec<String>,
}

impl ImportGraph {
    /// Union of all module graphs, in module IRI order.
    pub fn merged(&self) -> Graph {
        let graphs: Vec<Graph> = self.nodes.values().map(|m| m.graph.clone()).collect();
        merge(&graphs)
    }

    /// Modules reachable from `root` through import edges, `root` included.
    pub fn closure_of(&self, root: &Iri) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        let mut stack = vec![root.clone()];
        while let Some(m) = stack.pop() {
            if !self.nodes.contains_key(&m) || !out.insert(m.clone()) {
                continue;
            }
            stack.extend(self.edges.iter().filter(|(a, _)| *a == m).map(|(_, b)| b.clone()));
        }
        out
    }

    /// Merge of the modules in `root`'s import closure.
    pub fn merged_closure(&self, root: &Iri) -> Graph {
        let members = self.closure_of(root);
        let graphs: Vec<Graph> = members.iter().map(|m| self.nodes[m].graph.clone()).collect();
        merge(&graphs)
    }
}

fn read_document(path: &Path, base: Option<&Iri>) -> Result<Graph, LoadError> {
    let bytes = fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_turtle(&bytes, base).map_err(|error| LoadError::Parse {
        source_id: path.display().to_string(),
        error,
    })
}

/// Loads one document as a module.
pub fn load_module(path: &Path, requested: Option<&Iri>, v: &Vocabulary) -> Result<ModuleDescriptor, LoadError> {
    let graph = read_document(path, None)?;
    let fallback = match requested {
        Some(i) => i.clone(),
        None => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Iri::new(format!("urn:module:{stem}")).map_err(|_| LoadError::NotFound(path.display().to_string()))?
        }
    };
    Ok(ModuleDescriptor::describe(path.display().to_string(), graph, v, fallback))
}

/// Breadth-first `owl:imports` closure from `entry` (a file path, or an IRI
/// known to the locator). Every module is parsed at most once; imports that
/// cannot be located or parsed are collected in `unresolved`. Documents of one
/// breadth-first level are parsed with `exec`.
pub fn resolve_imports(
    entry: &str,
    locator: &ModuleLocator,
    v: &Vocabulary,
    exec: Execution,
) -> Result<ImportGraph, LoadError> {
    let entry_path = Path::new(entry);
    let root = if entry_path.is_file() {
        load_module(entry_path, None, v)?
    } else {
        let iri = Iri::new(entry).map_err(|_| LoadError::NotFound(entry.to_owned()))?;
        let path = locator.locate(&iri)?;
        load_module(&path, Some(&iri), v)?
    };
    resolve_from(vec![root], locator, v, exec)
}

/// Resolves the closure of several already-loaded root modules. The first
/// root is the entry.
pub fn resolve_from(
    roots: Vec<ModuleDescriptor>,
    locator: &ModuleLocator,
    v: &Vocabulary,
    exec: Execution,
) -> Result<ImportGraph, LoadError> {
    let entry = roots
        .first()
        .map(|m| m.ontology_iri.clone())
        .ok_or_else(|| LoadError::NotFound("no entry module".into()))?;
    let mut nodes: BTreeMap<Iri, ModuleDescriptor> = BTreeMap::new();
    let mut aliases: BTreeMap<Iri, Iri> = BTreeMap::new();
    let mut requested: BTreeSet<Iri> = BTreeSet::new();
    let mut unresolved = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut frontier: Vec<Iri> = Vec::new();

    for root in roots {
        requested.insert(root.ontology_iri.clone());
        frontier.extend(root.imports.iter().cloned());
        warnings.extend(root.warnings.iter().cloned());
        nodes.entry(root.ontology_iri.clone()).or_insert(root);
    }

    while !frontier.is_empty() {
        let mut todo: Vec<(Iri, PathBuf)> = Vec::new();
        for iri in std::mem::take(&mut frontier) {
            if nodes.contains_key(&iri) || !requested.insert(iri.clone()) {
                continue;
            }
            match locator.locate(&iri) {
                Ok(path) => todo.push((iri, path)),
                Err(_) => {
                    warnings.push(format!("unresolved import <{iri}>"));
                    unresolved.insert(iri);
                }
            }
        }
        let loaded = exec.map(&todo, |(iri, path)| load_module(path, Some(iri), v));
        for ((iri, _), result) in todo.into_iter().zip(loaded) {
            match result {
                Ok(module) => {
                    warnings.extend(module.warnings.iter().cloned());
                    if module.ontology_iri != iri {
                        warnings.push(format!(
                            "import <{iri}> resolved to a document declaring <{}>",
                            module.ontology_iri
                        ));
                        aliases.insert(iri.clone(), module.ontology_iri.clone());
                    }
                    if nodes.contains_key(&module.ontology_iri) {
                        continue;
                    }
                    frontier.extend(module.imports.iter().cloned());
                    nodes.insert(module.ontology_iri.clone(), module);
                }
                Err(e) => {
                    warnings.push(format!("unresolved import <{iri}>: {e}"));
                    unresolved.insert(iri);
                }
            }
        }
    }

    let mut edges = BTreeSet::new();
    for (iri, module) in &nodes {
        for imp in &module.imports {
            let target = aliases.get(imp).unwrap_or(imp);
            edges.insert((iri.clone(), target.clone()));
        }
    }
    let cycles = find_cycles(&edges);
    for c in &cycles {
        let names: Vec<String> = c.iter().map(|i| format!("<{i}>")).collect();
        warnings.push(format!("import cycle among {}", names.join(", ")));
    }
    Ok(ImportGraph {
        entry,
        nodes,
        edges,
        unresolved,
        cycles,
        warnings,
    })
}

/// Strongly connected components with more than one member, plus self-loops.
pub(crate) fn find_cycles(edges: &BTreeSet<(Iri, Iri)>) -> Vec<Vec<Iri>> {
    let mut g: DiGraphMap<&Iri, ()> = DiGraphMap::new();
    for (a, b) in edges {
        g.add_edge(a, b, ());
    }
    let mut cycles: Vec<Vec<Iri>> = petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || g.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut c: Vec<Iri> = scc.into_iter().cloned().collect();
            c.sort();
            c
        })
        .collect();
    cycles.sort();
    cycles
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct UsageCount {
    pub subject_count: u64,
    pub object_count: u64,
}

/// Per-module counts of triples whose subject/object IRI falls in a namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NamespaceUsage {
    pub rows: BTreeMap<(Iri, String), UsageCount>,
}

/// Namespace of `iri`: the longest declared namespace that prefixes it, else
/// the text up to its last `#` or `/`.
pub fn namespace_of<'a>(iri: &'a Iri, declared: &'a BTreeSet<String>) -> &'a str {
    declared
        .iter()
        .filter(|ns| iri.as_str().starts_with(ns.as_str()))
        .max_by_key(|ns| ns.len())
        .map(String::as_str)
        .unwrap_or_else(|| iri.namespace())
}

fn declared_namespaces(ig: &ImportGraph) -> BTreeSet<String> {
    ig.nodes
        .values()
        .flat_map(|m| m.graph.prefixes().values().map(|ns| ns.to_string()))
        .collect()
}

pub fn namespace_usage(ig: &ImportGraph) -> NamespaceUsage {
    let declared = declared_namespaces(ig);
    let mut rows: BTreeMap<(Iri, String), UsageCount> = BTreeMap::new();
    for (module, desc) in &ig.nodes {
        for t in desc.graph.triples() {
            if let Subject::Iri(s) = &t.subject {
                let ns = namespace_of(s, &declared).to_owned();
                rows.entry((module.clone(), ns)).or_default().subject_count += 1;
            }
            if let Term::Iri(o) = &t.object {
                let ns = namespace_of(o, &declared).to_owned();
                rows.entry((module.clone(), ns)).or_default().object_count += 1;
            }
        }
    }
    NamespaceUsage { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotMode {
    Imports,
    Namespaces,
}

/// Namespace dependency edges: subject namespace to a different object
/// namespace, external vocabularies and annotation triples excluded.
pub fn namespace_edges(ig: &ImportGraph, v: &Vocabulary) -> BTreeSet<(String, String)> {
    let declared = declared_namespaces(ig);
    let external = |ns: &str| v.excluded_namespaces.iter().any(|x| ns.starts_with(x.as_str()));
    let mut edges = BTreeSet::new();
    for desc in ig.nodes.values() {
        for t in desc.graph.triples() {
            let (Subject::Iri(s), Term::Iri(o)) = (&t.subject, &t.object) else {
                continue;
            };
            if v.annotation_exclusions.contains(&t.predicate) {
                continue;
            }
            let (a, b) = (namespace_of(s, &declared), namespace_of(o, &declared));
            if a != b && !external(a) && !external(b) {
                edges.insert((a.to_owned(), b.to_owned()));
            }
        }
    }
    edges
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text: header, sorted node lines, sorted edge lines, closing brace.
pub fn export_dot(ig: &ImportGraph, mode: DotMode, v: &Vocabulary) -> String {
    let mut out = String::new();
    match mode {
        DotMode::Imports => {
            out.push_str("digraph imports {\n");
            let mut nodes: BTreeMap<&Iri, bool> = ig.nodes.keys().map(|k| (k, true)).collect();
            for (a, b) in &ig.edges {
                nodes.entry(a).or_insert(false);
                nodes.entry(b).or_insert(false);
            }
            for (n, resolved) in nodes {
                if resolved {
                    out.push_str(&format!("  {};\n", quote(n.as_str())));
                } else {
                    out.push_str(&format!("  {} [style=dashed];\n", quote(n.as_str())));
                }
            }
            for (a, b) in &ig.edges {
                out.push_str(&format!("  {} -> {};\n", quote(a.as_str()), quote(b.as_str())));
            }
        }
        DotMode::Namespaces => {
            out.push_str("digraph namespaces {\n");
            let edges = namespace_edges(ig, v);
            let nodes: BTreeSet<&String> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
            for n in nodes {
                out.push_str(&format!("  {};\n", quote(n)));
            }
            for (a, b) in &edges {
                out.push_str(&format!("  {} -> {};\n", quote(a), quote(b)));
            }
        }
    }
    out.push_str("}\n");
    out
}
