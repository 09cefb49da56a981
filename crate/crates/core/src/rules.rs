//! Validation rules over the merged graph: taxonomy goals, documentation and
//! linking shapes, technological-space and activity shapes, a disjointness
//! check and module-structure checks.
//!
//! Every check returns at most one finding per focus IRI. The engine attaches
//! rule id and severity, applies the exception list and sorts findings by
//! `(rule id, focus)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use url::Url;

use crate::error::ConfigError;
use crate::exec::Execution;
use crate::graph::{Graph, Iri, Subject, Term};
use crate::index::{classify_entities, EntityIndex, Taxonomy};
use crate::modules::{find_cycles, ImportGraph};
use crate::vocab::{SpaceOrientation, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "info" => Ok(Severity::Info),
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            other => Err(format!("unknown severity `{other}`")),
        }
    }
}

/// A rule violation before the engine assigns rule id and severity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hit {
    pub focus: Iri,
    pub message: String,
    pub module: Option<Iri>,
}

impl Hit {
    fn new(focus: &Iri, message: impl Into<String>) -> Self {
        Hit {
            focus: focus.clone(),
            message: message.into(),
            module: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Finding {
    pub rule_id: String,
    pub focus: Iri,
    pub message: String,
    pub severity: Severity,
    pub module: Option<Iri>,
    pub suppressed: bool,
}

/// Read-only inputs shared by all checks.
pub struct Context<'a> {
    pub graph: &'a Graph,
    pub index: EntityIndex,
    pub vocab: &'a Vocabulary,
    pub taxonomy: Taxonomy,
    pub modules: Option<&'a ImportGraph>,
}

impl<'a> Context<'a> {
    pub fn new(graph: &'a Graph, vocab: &'a Vocabulary) -> Self {
        Context {
            graph,
            index: classify_entities(graph, vocab),
            vocab,
            taxonomy: Taxonomy::new(graph, vocab),
            modules: None,
        }
    }

    pub fn with_index(graph: &'a Graph, index: EntityIndex, vocab: &'a Vocabulary) -> Self {
        Context {
            graph,
            index,
            vocab,
            taxonomy: Taxonomy::new(graph, vocab),
            modules: None,
        }
    }

    pub fn with_modules(mut self, modules: &'a ImportGraph) -> Self {
        self.modules = Some(modules);
        self
    }

    fn scoped_classes(&self) -> impl Iterator<Item = &Iri> {
        self.index.classes().filter(|c| self.vocab.in_scope(c))
    }

    /// IRIs linked to `x` by an ontological assertion, in either direction.
    pub fn assertion_neighbors(&self, x: &Iri) -> BTreeSet<(Iri, Iri)> {
        let v = self.vocab;
        let mut out = BTreeSet::new();
        for t in self.graph.with_subject(&Subject::Iri(x.clone())) {
            if let Term::Iri(o) = &t.object {
                if v.is_assertion_predicate(&t.predicate) && o != x {
                    out.insert((t.predicate.clone(), o.clone()));
                }
            }
        }
        for t in self.graph.with_object(&Term::Iri(x.clone())) {
            if let Subject::Iri(s) = &t.subject {
                if v.is_assertion_predicate(&t.predicate) && s != x {
                    out.insert((t.predicate.clone(), s.clone()));
                }
            }
        }
        out
    }

    /// Entities associated with a technological space through `hasSpace`.
    pub fn space_members(&self, space: &Iri) -> BTreeSet<Iri> {
        let v = self.vocab;
        let mut out = BTreeSet::new();
        if matches!(v.space_orientation, SpaceOrientation::EntityToSpace | SpaceOrientation::Both) {
            out.extend(
                self.graph
                    .subjects(&v.has_space, &Term::Iri(space.clone()))
                    .filter_map(Subject::as_iri)
                    .cloned(),
            );
        }
        if matches!(v.space_orientation, SpaceOrientation::SpaceToEntity | SpaceOrientation::Both) {
            out.extend(self.graph.iri_objects(space, &v.has_space).filter_map(Term::as_iri).cloned());
        }
        out.remove(space);
        out
    }
}

fn local(i: &Iri) -> &str {
    i.local_name()
}

fn join_locals<'a>(items: impl IntoIterator<Item = &'a Iri>) -> String {
    items.into_iter().map(local).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DieConfig {
    pub min_instances: usize,
    pub exempt_with_subclasses: bool,
    /// Also flag classes with no instances and no subclasses.
    pub include_empty: bool,
}

impl Default for DieConfig {
    fn default() -> Self {
        DieConfig {
            min_instances: 2,
            exempt_with_subclasses: true,
            include_empty: false,
        }
    }
}

/// Classes instantiated by fewer than `min_instances` individuals.
pub fn check_die(cx: &Context, cfg: &DieConfig) -> Vec<Hit> {
    let mut hits = Vec::new();
    for c in cx.scoped_classes() {
        let n = cx.taxonomy.direct_instances(c).len();
        let subs = cx.taxonomy.direct_subclasses(c).len();
        let flagged = if n == 0 {
            (subs == 0 && cfg.include_empty) || (subs > 0 && !cfg.exempt_with_subclasses)
        } else {
            n < cfg.min_instances
        };
        if flagged {
            hits.push(Hit::new(
                c,
                format!(
                    "class {} has {n} direct instance(s); at least {} expected",
                    local(c),
                    cfg.min_instances
                ),
            ));
        }
    }
    hits
}

/// Classes with neither instances nor subclasses.
pub fn check_empty_classes(cx: &Context) -> Vec<Hit> {
    cx.scoped_classes()
        .filter(|c| cx.taxonomy.direct_instances(c).is_empty() && cx.taxonomy.direct_subclasses(c).is_empty())
        .map(|c| Hit::new(c, format!("class {} has no instances and no subclasses", local(c))))
        .collect()
}

/// Classes subclassed by exactly one class.
pub fn check_dse(cx: &Context) -> Vec<Hit> {
    cx.scoped_classes()
        .filter_map(|c| {
            let subs = cx.taxonomy.direct_subclasses(c);
            (subs.len() == 1).then(|| {
                Hit::new(
                    c,
                    format!("class {} has a single direct subclass ({})", local(c), join_locals(subs)),
                )
            })
        })
        .collect()
}

/// Individuals that are neither categorized into an in-scope class nor serve
/// as a category themselves.
pub fn check_icd(cx: &Context) -> Vec<Hit> {
    let v = cx.vocab;
    cx.index
        .individuals()
        .filter(|x| v.in_scope(x) && !cx.index.is_class(x))
        .filter(|x| {
            !cx.taxonomy
                .direct_types(x)
                .iter()
                .any(|t| cx.index.is_class(t) && v.in_scope(t))
        })
        .map(|x| Hit::new(x, format!("{} is neither categorized nor a category", local(x))))
        .collect()
}

/// Punned entities must be typed and must classify something (an instance or
/// a subclass).
pub fn check_metamodeling(cx: &Context) -> Vec<Hit> {
    let tax = &cx.taxonomy;
    cx.index
        .punned()
        .filter(|x| cx.vocab.in_scope(x))
        .filter_map(|x| {
            let typed = tax.direct_types(x).iter().any(|t| cx.index.is_class(t));
            let classifies = !tax.direct_instances(x).is_empty() || !tax.direct_subclasses(x).is_empty();
            let mut missing = Vec::new();
            if !typed {
                missing.push("a type assertion");
            }
            if !classifies {
                missing.push("an instance or subclass");
            }
            (!missing.is_empty()).then(|| {
                Hit::new(
                    x,
                    format!("punned entity {} lacks {}", local(x), missing.join(" and ")),
                )
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Class,
    Property,
    /// Individuals that are neither classes nor properties.
    PlainIndividual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrlConfig {
    pub kinds: Vec<EntityKind>,
    pub require_comment: bool,
    pub require_link: bool,
    /// A `hasBibTeX` reference also counts as a knowledge-resource link.
    pub accept_bibtex: bool,
}

impl Default for KrlConfig {
    fn default() -> Self {
        KrlConfig {
            kinds: vec![EntityKind::Class, EntityKind::Property],
            require_comment: true,
            require_link: true,
            accept_bibtex: true,
        }
    }
}

fn entity_matches(idx: &EntityIndex, x: &Iri, kinds: &[EntityKind]) -> bool {
    let Some(f) = idx.get(x) else { return false };
    kinds.iter().any(|k| match k {
        EntityKind::Class => f.is_class,
        EntityKind::Property => f.is_property(),
        EntityKind::PlainIndividual => f.is_individual && !f.is_class && !f.is_property(),
    })
}

/// Whether `url` is an acceptable knowledge-resource link: an http(s) URL
/// whose host matches one of `hosts` (any host when `hosts` is empty).
/// Fragments are allowed.
pub fn is_valid_link(url: &str, hosts: &[String]) -> bool {
    let Ok(u) = Url::parse(url) else { return false };
    if !matches!(u.scheme(), "http" | "https") {
        return false;
    }
    let Some(host) = u.host_str() else { return false };
    hosts.is_empty()
        || hosts
            .iter()
            .any(|h| host == h || host.strip_suffix(h.as_str()).is_some_and(|rest| rest.ends_with('.')))
}

/// Documentation comment and FOAF link requirements.
pub fn check_krl(cx: &Context, cfg: &KrlConfig) -> Vec<Hit> {
    let v = cx.vocab;
    let mut hits = Vec::new();
    for (x, _) in cx.index.iter() {
        if !v.in_scope(x) || !entity_matches(&cx.index, x, &cfg.kinds) {
            continue;
        }
        let mut problems = Vec::new();
        if cfg.require_comment {
            let commented = cx
                .graph
                .iri_objects(x, &v.comment_prop)
                .filter_map(Term::as_literal)
                .any(|l| !l.lexical().trim().is_empty());
            if !commented {
                problems.push("no non-empty comment".to_owned());
            }
        }
        if cfg.require_link {
            let mut invalid = Vec::new();
            let mut linked = false;
            for p in v.link_props() {
                for o in cx.graph.iri_objects(x, p) {
                    let text = match o {
                        Term::Iri(i) => i.as_str(),
                        Term::Literal(l) => l.lexical(),
                        Term::Blank(_) => continue,
                    };
                    if is_valid_link(text, &v.link_hosts) {
                        linked = true;
                    } else {
                        invalid.push(text.to_owned());
                    }
                }
            }
            if !linked && cfg.accept_bibtex {
                linked = cx.graph.iri_objects(x, &v.has_bibtex).next().is_some();
            }
            if !linked {
                if invalid.is_empty() {
                    problems.push("no knowledge-resource link".to_owned());
                } else {
                    problems.push(format!("no valid knowledge-resource link (rejected: {})", invalid.join(", ")));
                }
            }
        }
        if !problems.is_empty() {
            hits.push(Hit::new(x, format!("{}: {}", local(x), problems.join("; "))));
        }
    }
    hits
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SarConfig {
    pub min: usize,
    pub max: usize,
    pub kinds: Vec<EntityKind>,
    /// Only consider members of the configured entity roots.
    pub roots_only: bool,
}

impl Default for SarConfig {
    fn default() -> Self {
        SarConfig {
            min: 1,
            max: 3,
            kinds: vec![EntityKind::PlainIndividual],
            roots_only: true,
        }
    }
}

/// Subject-area cardinality.
pub fn check_sar(cx: &Context, cfg: &SarConfig) -> Vec<Hit> {
    let v = cx.vocab;
    let members: BTreeSet<Iri> = if cfg.roots_only {
        v.entity_roots.iter().flat_map(|r| cx.taxonomy.kind_members(r)).collect()
    } else {
        BTreeSet::new()
    };
    let mut hits = Vec::new();
    for (x, _) in cx.index.iter() {
        if !v.in_scope(x) || !entity_matches(&cx.index, x, &cfg.kinds) || (cfg.roots_only && !members.contains(x)) {
            continue;
        }
        let n = cx.graph.iri_objects(x, &v.has_area).collect::<BTreeSet<_>>().len();
        if n < cfg.min {
            hits.push(Hit::new(x, format!("{} has {n} area(s); at least {} expected", local(x), cfg.min)));
        } else if n > cfg.max {
            hits.push(Hit::new(x, format!("{} has {n} areas; at most {} allowed", local(x), cfg.max)));
        }
    }
    hits
}

fn spaces(cx: &Context) -> BTreeSet<Iri> {
    cx.taxonomy
        .instances_of(&cx.vocab.technological_space_root, true)
        .into_iter()
        .filter(|s| cx.vocab.in_scope(s))
        .collect()
}

/// Every technological space needs two associated artifact types related by
/// conformance.
pub fn check_space_conformance(cx: &Context) -> Vec<Hit> {
    let v = cx.vocab;
    let artifacts = cx.taxonomy.kind_members(&v.artifact_root);
    let mut hits = Vec::new();
    for space in spaces(cx) {
        let members: BTreeSet<Iri> = cx.space_members(&space).intersection(&artifacts).cloned().collect();
        let conforming = members.iter().any(|a| {
            cx.graph
                .iri_objects(a, &v.conforms_to)
                .filter_map(Term::as_iri)
                .any(|b| b != a && members.contains(b))
        });
        if !conforming {
            hits.push(Hit::new(
                &space,
                format!(
                    "space {} has no conformance relationship between two of its artifact types",
                    local(&space)
                ),
            ));
        }
    }
    hits
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpecConfig {
    pub need_languages: usize,
    pub need_tools: usize,
    pub need_artifacts: usize,
}

impl Default for SpaceSpecConfig {
    fn default() -> Self {
        SpaceSpecConfig {
            need_languages: 1,
            need_tools: 1,
            need_artifacts: 1,
        }
    }
}

/// Every technological space needs associated languages, tools and artifacts.
pub fn check_space_specified(cx: &Context, cfg: &SpaceSpecConfig) -> Vec<Hit> {
    let v = cx.vocab;
    let kinds = [
        ("language", cx.taxonomy.kind_members(&v.language_root), cfg.need_languages),
        ("tool", cx.taxonomy.kind_members(&v.tool_root), cfg.need_tools),
        ("artifact", cx.taxonomy.kind_members(&v.artifact_root), cfg.need_artifacts),
    ];
    let mut hits = Vec::new();
    for space in spaces(cx) {
        let members = cx.space_members(&space);
        let missing: Vec<&str> = kinds
            .iter()
            .filter(|(_, set, need)| members.intersection(set).count() < *need)
            .map(|(name, _, _)| *name)
            .collect();
        if !missing.is_empty() {
            hits.push(Hit::new(
                &space,
                format!("space {} is underspecified; missing: {}", local(&space), missing.join(", ")),
            ));
        }
    }
    hits
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActivityConfig {
    pub leaf_only: bool,
}

/// SE activity types must link to an artifact type and to a language or tool.
pub fn check_activity_specified(cx: &Context, cfg: &ActivityConfig) -> Vec<Hit> {
    let v = cx.vocab;
    let artifacts = cx.taxonomy.kind_members(&v.artifact_root);
    let mut supporting = cx.taxonomy.kind_members(&v.language_root);
    supporting.extend(cx.taxonomy.kind_members(&v.tool_root));
    let mut hits = Vec::new();
    for act in cx.taxonomy.subclasses_of(&v.se_activity_root) {
        if !v.in_scope(&act) || (cfg.leaf_only && !cx.taxonomy.direct_subclasses(&act).is_empty()) {
            continue;
        }
        let linked: BTreeSet<Iri> = cx.assertion_neighbors(&act).into_iter().map(|(_, o)| o).collect();
        let mut missing = Vec::new();
        if linked.is_disjoint(&artifacts) {
            missing.push("artifact");
        }
        if linked.is_disjoint(&supporting) {
            missing.push("language or tool");
        }
        if !missing.is_empty() {
            hits.push(Hit::new(
                &act,
                format!("activity {} is not linked to any {}", local(&act), missing.join(" nor ")),
            ));
        }
    }
    hits
}

/// Methodological approaches must be served by a formal entity or language.
pub fn check_approach_specified(cx: &Context) -> Vec<Hit> {
    let v = cx.vocab;
    let mut servers = cx.taxonomy.kind_members(&v.formal_entity_root);
    servers.extend(cx.taxonomy.kind_members(&v.language_root));
    let mut hits = Vec::new();
    for approach in cx.taxonomy.instances_of(&v.methodological_approach_root, true) {
        if !v.in_scope(&approach) {
            continue;
        }
        let connected = v.approach_link_props.iter().any(|p| {
            let out = cx.graph.iri_objects(&approach, p).filter_map(Term::as_iri).cloned();
            let inc = cx
                .graph
                .subjects(p, &Term::Iri(approach.clone()))
                .filter_map(Subject::as_iri)
                .cloned();
            out.chain(inc).any(|o| o != approach && servers.contains(&o))
        });
        if !connected {
            hits.push(Hit::new(
                &approach,
                format!(
                    "approach {} is not connected to a formal entity or language",
                    local(&approach)
                ),
            ));
        }
    }
    hits
}

/// Declared disjoint class pairs, each stored once with the smaller IRI first.
pub fn disjoint_pairs(g: &Graph, v: &Vocabulary) -> BTreeSet<(Iri, Iri)> {
    fn ordered(a: &Iri, b: &Iri) -> (Iri, Iri) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }
    let mut pairs = BTreeSet::new();
    for t in g.with_predicate(&v.disjoint_prop) {
        if let (Subject::Iri(a), Term::Iri(b)) = (&t.subject, &t.object) {
            if a != b {
                pairs.insert(ordered(a, b));
            }
        }
    }
    let all = Term::Iri(v.all_disjoint_classes.clone());
    for node in g.subjects(&v.type_prop, &all) {
        for head in g.objects(node, &v.members_prop) {
            let members: Vec<Iri> = g.list_items(head).iter().filter_map(Term::as_iri).cloned().collect();
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    if a != b {
                        pairs.insert(ordered(a, b));
                    }
                }
            }
        }
    }
    pairs
}

/// Individuals typed into two disjoint classes, and populated classes below
/// two disjoint classes.
pub fn check_disjointness(cx: &Context) -> Vec<Hit> {
    let pairs = disjoint_pairs(cx.graph, cx.vocab);
    if pairs.is_empty() {
        return Vec::new();
    }
    let clash = |set: &BTreeSet<Iri>| -> Vec<String> {
        pairs
            .iter()
            .filter(|(a, b)| set.contains(a) && set.contains(b))
            .map(|(a, b)| format!("{}/{}", local(a), local(b)))
            .collect()
    };
    let mut by_focus: BTreeMap<Iri, Vec<String>> = BTreeMap::new();
    for x in cx.taxonomy.typed_entities() {
        let c = clash(&cx.taxonomy.type_closure(x));
        if !c.is_empty() {
            by_focus
                .entry(x.clone())
                .or_default()
                .push(format!("{} is an instance of disjoint classes {}", local(x), c.join(", ")));
        }
    }
    for c in cx.index.classes() {
        if cx.taxonomy.instances_of(c, true).is_empty() {
            continue;
        }
        let supers = cx.taxonomy.superclass_closure(c).members;
        let found = clash(&supers);
        if !found.is_empty() {
            by_focus.entry(c.clone()).or_default().push(format!(
                "populated class {} is subsumed by disjoint classes {}",
                local(c),
                found.join(", ")
            ));
        }
    }
    by_focus
        .into_iter()
        .map(|(focus, msgs)| Hit::new(&focus, msgs.join("; ")))
        .collect()
}

/// In-scope classes without an in-scope superclass.
pub fn top_level_classes(cx: &Context) -> BTreeSet<Iri> {
    cx.scoped_classes()
        .filter(|c| {
            !cx.taxonomy
                .direct_superclasses(c)
                .iter()
                .any(|s| cx.vocab.in_scope(s))
        })
        .cloned()
        .collect()
}

fn graph_focus(cx: &Context, fallback: Option<&Iri>) -> Option<Iri> {
    if let Some(m) = cx.modules {
        return Some(m.entry.clone());
    }
    let decl = Term::Iri(cx.vocab.ontology_decl.clone());
    cx.graph
        .subjects(&cx.vocab.type_prop, &decl)
        .filter_map(Subject::as_iri)
        .min()
        .cloned()
        .or_else(|| fallback.cloned())
}

/// A manageable number of top-level classes.
pub fn check_toplevel(cx: &Context, max_roots: usize) -> Vec<Hit> {
    let roots = top_level_classes(cx);
    if roots.len() <= max_roots {
        return Vec::new();
    }
    let Some(focus) = graph_focus(cx, roots.first()) else {
        return Vec::new();
    };
    vec![Hit::new(
        &focus,
        format!(
            "{} top-level classes exceed the limit of {max_roots}: {}",
            roots.len(),
            join_locals(&roots)
        ),
    )]
}

/// Whether a module IRI names the terminology module.
pub fn is_tbox_module(module: &Iri, v: &Vocabulary) -> bool {
    let trimmed = module.as_str().trim_end_matches(['#', '/']);
    let name = trimmed.rsplit(['/', '#', ':']).next().unwrap_or(trimmed);
    name == v.tbox_module || name.strip_suffix(".ttl") == Some(v.tbox_module.as_str())
}

/// Class declarations outside the terminology module. `None` when the import
/// graph has no terminology module to centralize into.
pub fn check_tbox_centralization(ig: &ImportGraph, v: &Vocabulary) -> Option<Vec<Hit>> {
    if !ig.nodes.keys().any(|m| is_tbox_module(m, v)) {
        return None;
    }
    let decl = Term::Iri(v.class_decl.clone());
    let mut by_focus: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
    for (module, desc) in &ig.nodes {
        if is_tbox_module(module, v) {
            continue;
        }
        for s in desc.graph.subjects(&v.type_prop, &decl).filter_map(Subject::as_iri).filter(|s| v.in_scope(s)) {
            by_focus.entry(s.clone()).or_default().push(module.clone());
        }
    }
    Some(
        by_focus
            .into_iter()
            .map(|(focus, modules)| Hit {
                message: format!(
                    "class {} is declared outside the terminology module (in {})",
                    local(&focus),
                    join_locals(&modules)
                ),
                module: modules.first().cloned(),
                focus,
            })
            .collect(),
    )
}

/// What a rule evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Icd,
    Die,
    EmptyClass,
    Dse,
    Metamodeling,
    Krl,
    ClassComment,
    PropertyComment,
    ClassLink,
    PropertyLink,
    Sar,
    SpaceConformsTo,
    SpaceSpecified,
    ActivitySpecified,
    ApproachSpecified,
    Disjointness,
    TopLevel,
    TboxCentralization,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub severity: Severity,
    pub description: String,
    pub config: BTreeMap<String, String>,
    pub check: Check,
}

impl Rule {
    pub fn new(id: &str, severity: Severity, check: Check, description: &str) -> Self {
        Rule {
            id: id.to_owned(),
            severity,
            description: description.to_owned(),
            config: BTreeMap::new(),
            check,
        }
    }

    pub fn with_config(mut self, key: &str, value: &str) -> Self {
        self.config.insert(key.to_owned(), value.to_owned());
        self
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, String> {
        match self.config.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| format!("rule {}: invalid value `{raw}` for `{key}`", self.id)),
        }
    }

    fn kinds(&self, default: Vec<EntityKind>) -> Result<Vec<EntityKind>, String> {
        match self.config.get("kinds") {
            None => Ok(default),
            Some(raw) => raw
                .split(',')
                .map(|k| match k.trim() {
                    "class" => Ok(EntityKind::Class),
                    "property" => Ok(EntityKind::Property),
                    "individual" => Ok(EntityKind::PlainIndividual),
                    other => Err(format!("rule {}: unknown entity kind `{other}`", self.id)),
                })
                .collect(),
        }
    }

    fn krl(&self, kinds: Vec<EntityKind>, comment: bool, link: bool) -> Result<KrlConfig, String> {
        Ok(KrlConfig {
            kinds: self.kinds(kinds)?,
            require_comment: self.get("requireComment", comment)?,
            require_link: self.get("requireLink", link)?,
            accept_bibtex: self.get("acceptBibTeX", true)?,
        })
    }

    /// Checks that the rule's configuration parses.
    pub fn validate_config(&self) -> Result<(), String> {
        let g = Graph::default();
        let v = Vocabulary::default();
        self.evaluate(&Context::new(&g, &v)).map(|_| ())
    }

    /// Runs the rule. `Ok(None)` means the rule does not apply to these inputs.
    pub fn evaluate(&self, cx: &Context) -> Result<Option<Vec<Hit>>, String> {
        use EntityKind::*;
        let hits = match self.check {
            Check::Icd => check_icd(cx),
            Check::Die => check_die(
                cx,
                &DieConfig {
                    min_instances: self.get("minInstances", 2)?,
                    exempt_with_subclasses: self.get("exemptWithSubclasses", true)?,
                    include_empty: self.get("includeEmpty", false)?,
                },
            ),
            Check::EmptyClass => check_empty_classes(cx),
            Check::Dse => check_dse(cx),
            Check::Metamodeling => check_metamodeling(cx),
            Check::Krl => check_krl(cx, &self.krl(vec![PlainIndividual], false, true)?),
            Check::ClassComment => check_krl(cx, &self.krl(vec![Class], true, false)?),
            Check::PropertyComment => check_krl(cx, &self.krl(vec![Property], true, false)?),
            Check::ClassLink => check_krl(cx, &self.krl(vec![Class], false, true)?),
            Check::PropertyLink => check_krl(cx, &self.krl(vec![Property], false, true)?),
            Check::Sar => check_sar(
                cx,
                &SarConfig {
                    min: self.get("min", 1)?,
                    max: self.get("max", 3)?,
                    kinds: self.kinds(vec![PlainIndividual])?,
                    roots_only: self.get("rootsOnly", true)?,
                },
            ),
            Check::SpaceConformsTo => check_space_conformance(cx),
            Check::SpaceSpecified => check_space_specified(
                cx,
                &SpaceSpecConfig {
                    need_languages: self.get("needLanguages", 1)?,
                    need_tools: self.get("needTools", 1)?,
                    need_artifacts: self.get("needArtifacts", 1)?,
                },
            ),
            Check::ActivitySpecified => check_activity_specified(
                cx,
                &ActivityConfig {
                    leaf_only: self.get("leafOnly", false)?,
                },
            ),
            Check::ApproachSpecified => check_approach_specified(cx),
            Check::Disjointness => check_disjointness(cx),
            Check::TopLevel => check_toplevel(cx, self.get("maxRoots", 10)?),
            Check::TboxCentralization => match cx.modules {
                Some(ig) if ig.nodes.len() > 1 => match check_tbox_centralization(ig, cx.vocab) {
                    Some(h) => h,
                    None => return Ok(None),
                },
                _ => Vec::new(),
            },
        };
        Ok(Some(hits))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    rules: Vec<Rule>,
}

impl Registry {
    pub fn new(rules: Vec<Rule>) -> Result<Self, String> {
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.id.clone()) {
                return Err(format!("duplicate rule id `{}`", r.id));
            }
            r.validate_config()?;
        }
        Ok(Registry { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn contains(&self, id: &str) -> bool {
        self.rules.iter().any(|r| r.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.rules.iter().map(|r| r.id.as_str()).collect()
    }

    /// Keeps only the rules whose id satisfies `keep`.
    pub fn retain(mut self, keep: impl Fn(&str) -> bool) -> Self {
        self.rules.retain(|r| keep(&r.id));
        self
    }

    pub fn set_severity(&mut self, id: &str, severity: Severity) -> bool {
        match self.rules.iter_mut().find(|r| r.id == id) {
            Some(r) => {
                r.severity = severity;
                true
            }
            None => false,
        }
    }
}

impl Default for Registry {
    /// The full rule set with default severities.
    fn default() -> Self {
        use Check::*;
        use Severity::*;
        let rules = vec![
            Rule::new("DIE", Warning, Die, "classes must be instantiated by at least two individuals"),
            Rule::new("DIE-EMPTY", Info, EmptyClass, "classes without instances or subclasses"),
            Rule::new("DSE", Warning, Dse, "classes must not be subclassed by only one class"),
            Rule::new("ICD", Warning, Icd, "individuals must be categorized or serve as a category"),
            Rule::new("KRL", Error, Krl, "individuals must be linked to an external knowledge resource"),
            Rule::new("RBC-DISJOINT", Error, Disjointness, "no member of two disjoint classes"),
            Rule::new("SAR", Warning, Sar, "entities have between 1 and 3 subject areas"),
            Rule::new(
                "SHAPE-ACTIVITY-SPECIFIED",
                Warning,
                ActivitySpecified,
                "SE activities are specified by artifacts and supporting languages or tools",
            ),
            Rule::new(
                "SHAPE-APPROACH-SPECIFIED",
                Warning,
                ApproachSpecified,
                "methodological approaches are served by a formal entity or language",
            ),
            Rule::new("SHAPE-CLASS-COMMENT", Error, ClassComment, "class declarations have a comment"),
            Rule::new("SHAPE-CLASS-FOAF-LINK", Error, ClassLink, "class declarations have a FOAF link"),
            Rule::new("SHAPE-METAMODELING", Error, Metamodeling, "punned entities follow the metamodeling schema"),
            Rule::new("SHAPE-PROPERTY-COMMENT", Error, PropertyComment, "property declarations have a comment"),
            Rule::new("SHAPE-PROPERTY-FOAF-LINK", Error, PropertyLink, "property declarations have a FOAF link"),
            Rule::new(
                "SHAPE-SPACE-CONFORMS-TO",
                Warning,
                SpaceConformsTo,
                "technological spaces involve a conformance relationship between artifact types",
            ),
            Rule::new(
                "SHAPE-SPACE-SPECIFIED",
                Warning,
                SpaceSpecified,
                "technological spaces are specified by languages, tools and artifacts",
            ),
            Rule::new("TBOX-CENTRAL", Error, TboxCentralization, "classes are declared in the terminology module only"),
            Rule::new("TLR", Warning, TopLevel, "a manageable number of top-level classes"),
        ];
        Registry { rules }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExceptionEntry {
    pub rule_id: String,
    pub focus: Iri,
    pub reason: String,
}

/// Suppressions keyed by `(rule id, focus)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExceptionList {
    entries: BTreeMap<(String, Iri), String>,
}

impl ExceptionList {
    /// Parses `ruleId TAB focus-IRI TAB reason` lines; `#` comments and blank
    /// lines are skipped.
    pub fn parse(text: &str, source: &str) -> Result<Self, ConfigError> {
        let mut list = ExceptionList::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Exceptions {
                path: source.to_owned(),
                line: n + 1,
                message,
            };
            let mut parts = line.splitn(3, '\t');
            let (Some(rule), Some(focus)) = (parts.next(), parts.next()) else {
                return Err(err("expected `ruleId TAB focus-IRI TAB reason`".into()));
            };
            let reason = parts.next().unwrap_or("").trim();
            let focus = focus.trim().trim_start_matches('<').trim_end_matches('>');
            let focus = Iri::new(focus).map_err(|e| err(e.to_string()))?;
            if !list.insert(rule.trim(), focus.clone(), reason) {
                return Err(err(format!("duplicate exception for ({}, <{focus}>)", rule.trim())));
            }
        }
        Ok(list)
    }

    /// Adds an entry; returns false when `(rule, focus)` is already present.
    pub fn insert(&mut self, rule_id: &str, focus: Iri, reason: &str) -> bool {
        let key = (rule_id.to_owned(), focus);
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, reason.to_owned());
        true
    }

    pub fn remove(&mut self, rule_id: &str, focus: &Iri) -> bool {
        self.entries.remove(&(rule_id.to_owned(), focus.clone())).is_some()
    }

    pub fn contains(&self, rule_id: &str, focus: &Iri) -> bool {
        self.entries.contains_key(&(rule_id.to_owned(), focus.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = ExceptionEntry> + '_ {
        self.entries.iter().map(|((rule_id, focus), reason)| ExceptionEntry {
            rule_id: rule_id.clone(),
            focus: focus.clone(),
            reason: reason.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    /// Unsuppressed findings per severity.
    pub counts: BTreeMap<Severity, usize>,
    pub suppressed: usize,
    pub stale_exceptions: Vec<ExceptionEntry>,
    pub threshold: Severity,
    pub verdict: Verdict,
    /// Diagnostics; may mention local paths, so not part of machine output.
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn unsuppressed(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| !f.suppressed)
    }

    pub fn with_rule<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Finding> + 'a {
        self.findings.iter().filter(move |f| f.rule_id == id)
    }
}

/// Evaluates every rule of the registry and aggregates the verdict.
pub fn run_rules(
    cx: &Context,
    registry: &Registry,
    exceptions: &ExceptionList,
    threshold: Severity,
    exec: Execution,
) -> ValidationReport {
    let results = exec.map(registry.rules(), |rule| rule.evaluate(cx));
    let mut findings = Vec::new();
    let mut warnings = Vec::new();
    for (rule, result) in registry.rules().iter().zip(results) {
        match result {
            Ok(Some(hits)) => findings.extend(hits.into_iter().map(|h| Finding {
                rule_id: rule.id.clone(),
                focus: h.focus,
                message: h.message,
                severity: rule.severity,
                module: h.module,
                suppressed: false,
            })),
            Ok(None) => warnings.push(format!("rule {} skipped: no terminology module found", rule.id)),
            Err(e) => warnings.push(e),
        }
    }
    let subclass_edges: BTreeSet<(Iri, Iri)> = cx
        .graph
        .with_predicate(&cx.vocab.sub_class_prop)
        .filter_map(|t| Some((t.subject.as_iri()?.clone(), t.object.as_iri()?.clone())))
        .filter(|(a, b)| a != b)
        .collect();
    for cycle in find_cycles(&subclass_edges) {
        warnings.push(format!("subclass cycle among {}", join_locals(&cycle)));
    }
    let mut report = ValidationReport::from_findings(findings, exceptions, registry, threshold);
    report.warnings.splice(0..0, warnings);
    report
}

impl ValidationReport {
    /// Applies exceptions and the threshold to raw findings. Exceptions for
    /// rules outside `registry` are neither matched nor reported stale.
    pub fn from_findings(
        mut findings: Vec<Finding>,
        exceptions: &ExceptionList,
        registry: &Registry,
        threshold: Severity,
    ) -> Self {
        findings.sort();
        findings.dedup_by(|a, b| a.rule_id == b.rule_id && a.focus == b.focus);
        let mut warnings = Vec::new();
        let mut matched = BTreeSet::new();
        for f in &mut findings {
            f.suppressed = exceptions.contains(&f.rule_id, &f.focus);
            if f.suppressed {
                matched.insert((f.rule_id.clone(), f.focus.clone()));
            }
        }
        let known: BTreeSet<String> = Registry::default()
            .ids()
            .into_iter()
            .chain(registry.ids())
            .chain(findings.iter().map(|f| f.rule_id.as_str()))
            .map(str::to_owned)
            .collect();
        for e in exceptions.entries() {
            if !known.contains(&e.rule_id) {
                warnings.push(format!("exception for unknown rule `{}` (focus <{}>)", e.rule_id, e.focus));
            }
        }
        let stale_exceptions: Vec<ExceptionEntry> = exceptions
            .entries()
            .filter(|e| registry.contains(&e.rule_id) && !matched.contains(&(e.rule_id.clone(), e.focus.clone())))
            .collect();
        let mut counts = BTreeMap::new();
        for f in findings.iter().filter(|f| !f.suppressed) {
            *counts.entry(f.severity).or_insert(0) += 1;
        }
        let suppressed = findings.iter().filter(|f| f.suppressed).count();
        let verdict = if findings.iter().any(|f| !f.suppressed && f.severity >= threshold) {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        ValidationReport {
            findings,
            counts,
            suppressed,
            stale_exceptions,
            threshold,
            verdict,
            warnings,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_turtle;

    const P: &str = "@prefix : <http://softlang.org/fsl/tbox#> .\n\
        @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
        @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
        @prefix foaf: <http://xmlns.com/foaf/0.1/> .\n";

    fn g(body: &str) -> Graph {
        parse_turtle(format!("{P}{body}").as_bytes(), None).unwrap()
    }

    fn t(local: &str) -> Iri {
        Iri::from_static(&format!("http://softlang.org/fsl/tbox#{local}"))
    }

    fn foci(hits: &[Hit]) -> Vec<&str> {
        hits.iter().map(|h| h.focus.local_name()).collect()
    }

    fn with<R>(body: &str, f: impl FnOnce(&Context) -> R) -> R {
        let graph = g(body);
        let v = Vocabulary::default();
        let cx = Context::new(&graph, &v);
        f(&cx)
    }

    #[test]
    fn die_threshold() {
        with(":C a owl:Class . :x a :C . :y a :C .", |cx| assert!(check_die(cx, &DieConfig::default()).is_empty()));
        with(":C a owl:Class . :x a :C .", |cx| {
            assert_eq!(foci(&check_die(cx, &DieConfig::default())), ["C"])
        });
    }

    #[test]
    fn die_zero_instances() {
        let body = ":Abstract a owl:Class . :Sub rdfs:subClassOf :Abstract . :Empty a owl:Class .";
        with(body, |cx| {
            assert!(check_die(cx, &DieConfig::default()).is_empty());
            let strict = DieConfig {
                exempt_with_subclasses: false,
                include_empty: true,
                ..DieConfig::default()
            };
            // Sub only appears as a subclassOf subject, so it is not a class.
            assert_eq!(foci(&check_die(cx, &strict)), ["Abstract", "Empty"]);
            assert_eq!(foci(&check_empty_classes(cx)), ["Empty"]);
        });
    }

    #[test]
    fn lambda_calculus_category() {
        let body = ":LambdaCalculus a owl:Class . :UntypedLambdaCalculus a :LambdaCalculus . \
                    :SimplyTypedLambdaCalculus a :LambdaCalculus . \
                    :ConcurrencyCalculus a owl:Class . :CSP a :ConcurrencyCalculus .";
        with(body, |cx| assert_eq!(foci(&check_die(cx, &DieConfig::default())), ["ConcurrencyCalculus"]));
    }

    #[test]
    fn dse_single_subclass() {
        with(":L a owl:Class .", |cx| assert!(check_dse(cx).is_empty()));
        with(":A rdfs:subClassOf :C . :B rdfs:subClassOf :C .", |cx| assert!(check_dse(cx).is_empty()));
        with(":A rdfs:subClassOf :C .", |cx| assert_eq!(foci(&check_dse(cx)), ["C"]));
    }

    #[test]
    fn icd_cases() {
        with(":PC a owl:Class , :FormalEntity . :CSP a :PC .", |cx| assert!(check_icd(cx).is_empty()));
        with(":x a owl:NamedIndividual .", |cx| assert_eq!(foci(&check_icd(cx)), ["x"]));
        with(":x a foaf:Person .", |cx| assert_eq!(foci(&check_icd(cx)), ["x"]));
    }

    #[test]
    fn metamodeling_clauses() {
        with(
            ":ProcessCalculus a owl:Class , :FormalEntity . :CSP a :ProcessCalculus . :CCS a :ProcessCalculus .",
            |cx| assert!(check_metamodeling(cx).is_empty()),
        );
        with(":Thing2 a :Kind . :x a :Thing2 . :Lonely a :Kind . :y a :Other . :Other a :Kind2 .", |cx| {
            assert!(check_metamodeling(cx).is_empty());
        });
        with(":P a owl:Class , :FormalEntity .", |cx| {
            let hits = check_metamodeling(cx);
            assert_eq!(foci(&hits), ["P"]);
            assert!(hits[0].message.contains("instance or subclass"));
        });
    }

    #[test]
    fn link_validity() {
        let hosts = vec!["wikipedia.org".to_owned()];
        assert!(is_valid_link("https://en.wikipedia.org/wiki/Lambda_calculus", &hosts));
        assert!(is_valid_link("https://en.wikipedia.org/wiki/Grammar#Anchor", &hosts));
        assert!(is_valid_link("http://wikipedia.org/x", &hosts));
        assert!(!is_valid_link("https://notwikipedia.org/x", &hosts));
        assert!(!is_valid_link("ftp://en.wikipedia.org/x", &hosts));
        assert!(!is_valid_link("not a url", &hosts));
        assert!(is_valid_link("https://example.com/", &[]));
    }

    #[test]
    fn krl_comment_and_link() {
        let cfg = KrlConfig {
            kinds: vec![EntityKind::Class],
            ..KrlConfig::default()
        };
        with(
            ":C a owl:Class ; rdfs:comment \"c\" ; foaf:page <https://en.wikipedia.org/wiki/C> .",
            |cx| assert!(check_krl(cx, &cfg).is_empty()),
        );
        with(":C a owl:Class ; rdfs:comment \"c\" .", |cx| {
            let hits = check_krl(cx, &cfg);
            assert_eq!(foci(&hits), ["C"]);
            assert!(hits[0].message.contains("link"));
            assert!(!hits[0].message.contains("comment"));
        });
        with(
            ":C a owl:Class ; rdfs:comment \"  \" ; foaf:isPrimaryTopicOf \"https://de.wikipedia.org/wiki/C\" .",
            |cx| {
                let hits = check_krl(cx, &cfg);
                assert!(hits[0].message.contains("comment"));
                assert!(!hits[0].message.contains("link"));
            },
        );
    }

    #[test]
    fn sar_bounds() {
        let areas = |n: usize| {
            (0..n).map(|i| format!(":x :hasArea :A{i} .")).collect::<Vec<_>>().join(" ")
        };
        for (n, expect) in [(0, 1), (1, 0), (2, 0), (3, 0), (4, 1)] {
            let body = format!(":x a :Tool . {}", areas(n));
            with(&body, |cx| assert_eq!(check_sar(cx, &SarConfig::default()).len(), expect, "n={n}"));
        }
    }

    const MODELWARE: &str = "
        :Modelware a :TechnologicalSpace .
        :Model rdfs:subClassOf :Artifact ; :hasSpace :Modelware .
        :Metamodel rdfs:subClassOf :Artifact ; :hasSpace :Modelware .
        :ModelTransformationLanguage rdfs:subClassOf :Language ; :hasSpace :Modelware .
        :ModelTransformationEngine rdfs:subClassOf :Tool ; :hasSpace :Modelware .
        :Model :conformsTo :Metamodel .";

    #[test]
    fn modelware_space_passes() {
        with(MODELWARE, |cx| {
            assert!(check_space_conformance(cx).is_empty());
            assert!(check_space_specified(cx, &SpaceSpecConfig::default()).is_empty());
        });
        let without = MODELWARE.replace(":Model :conformsTo :Metamodel .", "");
        with(&without, |cx| {
            assert_eq!(foci(&check_space_conformance(cx)), ["Modelware"]);
            assert!(check_space_specified(cx, &SpaceSpecConfig::default()).is_empty());
        });
    }

    #[test]
    fn space_orientation_space_to_entity() {
        let body = ":S a :TechnologicalSpace ; :hasSpace :A , :B . :A rdfs:subClassOf :Artifact . \
                    :B rdfs:subClassOf :Artifact . :A :conformsTo :B .";
        with(body, |cx| assert!(check_space_conformance(cx).is_empty()));
    }

    #[test]
    fn space_missing_kinds() {
        with(":S a :TechnologicalSpace . :J a :Language ; :hasSpace :S .", |cx| {
            let hits = check_space_specified(cx, &SpaceSpecConfig::default());
            assert_eq!(hits.len(), 1);
            assert!(hits[0].message.ends_with("missing: tool, artifact"), "{}", hits[0].message);
        });
    }

    #[test]
    fn activities() {
        let body = ":Implementation rdfs:subClassOf :SoftwareEngineeringActivity .
            :CodeGeneration rdfs:subClassOf :Implementation ;
                :uses :ModelTransformationLanguage , :ModelTransformationEngine ; :produces :SourceCode .
            :ModelTransformationLanguage rdfs:subClassOf :Language .
            :ModelTransformationEngine rdfs:subClassOf :Tool .
            :SourceCode rdfs:subClassOf :Artifact .";
        with(body, |cx| {
            assert_eq!(foci(&check_activity_specified(cx, &ActivityConfig::default())), ["Implementation"]);
            assert!(check_activity_specified(cx, &ActivityConfig { leaf_only: true }).is_empty());
        });
    }

    #[test]
    fn approaches() {
        let body = ":DenotationalSemantics a :MethodologicalApproach ; :uses :LambdaCalculus .
            :LambdaCalculus a :FormalEntity .
            :Isolated a :MethodologicalApproach .";
        with(body, |cx| assert_eq!(foci(&check_approach_specified(cx)), ["Isolated"]));
    }

    #[test]
    fn disjointness() {
        with(":Language owl:disjointWith :Tool . :x a :Language , :Tool .", |cx| {
            assert_eq!(foci(&check_disjointness(cx)), ["x"])
        });
        with(":Language owl:disjointWith :Tool . :x a :Language . :y a :Tool .", |cx| {
            assert!(check_disjointness(cx).is_empty())
        });
        let body = "[] a owl:AllDisjointClasses ; owl:members ( :A :B :C ) .
            :Both rdfs:subClassOf :A , :C . :z a :Both .";
        with(body, |cx| assert_eq!(foci(&check_disjointness(cx)), ["Both", "z"]));
    }

    #[test]
    fn toplevel_limit() {
        let roots: String = (0..6).map(|i| format!(":R{i} a owl:Class . ")).collect();
        with(&roots, |cx| {
            assert!(check_toplevel(cx, 10).is_empty());
            assert_eq!(check_toplevel(cx, 5).len(), 1);
        });
    }

    #[test]
    fn run_rules_exceptions_and_stale() {
        let graph = g(":C a owl:Class ; rdfs:comment \"c\" ; foaf:page <https://en.wikipedia.org/wiki/C> . \
                       :x a :C ; foaf:page <https://en.wikipedia.org/wiki/X> ; :hasArea :A .");
        let v = Vocabulary::default();
        let cx = Context::new(&graph, &v);
        let registry = Registry::default().retain(|id| id == "DIE");
        let report = run_rules(&cx, &registry, &ExceptionList::default(), Severity::Warning, Execution::Sequential);
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.verdict, Verdict::Fail);

        let mut ex = ExceptionList::default();
        ex.insert("DIE", t("C"), "pending completion");
        ex.insert("DIE", t("Nope"), "never fires");
        ex.insert("NO-SUCH-RULE", t("C"), "typo");
        let report = run_rules(&cx, &registry, &ex, Severity::Warning, Execution::Parallel);
        assert!(report.findings[0].suppressed);
        assert_eq!(report.suppressed, 1);
        assert_eq!(report.verdict, Verdict::Pass);
        let stale: Vec<&str> = report.stale_exceptions.iter().map(|e| e.focus.local_name()).collect();
        assert_eq!(stale, ["Nope"]);
        assert!(report.warnings.iter().any(|w| w.contains("NO-SUCH-RULE")));
    }

    #[test]
    fn empty_graph_full_registry_passes() {
        let graph = Graph::default();
        let v = Vocabulary::default();
        let report = run_rules(
            &Context::new(&graph, &v),
            &Registry::default(),
            &ExceptionList::default(),
            Severity::Info,
            Execution::Parallel,
        );
        assert!(report.findings.is_empty());
        assert_eq!(report.verdict, Verdict::Pass);
    }

    #[test]
    fn exception_file_format() {
        let list = ExceptionList::parse(
            "# comment\nDIE\thttp://softlang.org/fsl/tbox#C\tincomplete\n\nKRL\t<http://x/y>\t\n",
            "ex.tsv",
        )
        .unwrap();
        assert_eq!(list.len(), 2);
        assert!(list.contains("KRL", &Iri::from_static("http://x/y")));
        assert!(ExceptionList::parse("DIE only-one-field", "ex.tsv").is_err());
        let dup = ExceptionList::parse("DIE\thttp://x/a\tr\nDIE\thttp://x/a\tq\n", "ex.tsv").unwrap_err();
        assert!(dup.to_string().contains(":2:"), "{dup}");
    }

    #[test]
    fn registry_rejects_duplicates_and_bad_config() {
        let r = Rule::new("X", Severity::Info, Check::Dse, "");
        assert!(Registry::new(vec![r.clone(), r.clone()]).is_err());
        assert!(Registry::new(vec![Rule::new("D", Severity::Info, Check::Die, "").with_config("minInstances", "two")])
            .is_err());
        let ids = Registry::default().ids().len();
        assert_eq!(ids, 18);
    }

    #[test]
    fn subclass_cycle_is_a_warning() {
        let graph = g(":A rdfs:subClassOf :B . :B rdfs:subClassOf :A .");
        let v = Vocabulary::default();
        let report = run_rules(
            &Context::new(&graph, &v),
            &Registry::default(),
            &ExceptionList::default(),
            Severity::Error,
            Execution::Sequential,
        );
        assert!(report.warnings.iter().any(|w| w.contains("subclass cycle")));
    }
}
