//! Query-based report tables over the merged graph.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::exec::Execution;
use crate::graph::{Graph, Iri, Subject, Term};
use crate::rules::Context;
use crate::vocab::{OWL, RDFS};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Text(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl MetricsTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        MetricsTable {
            name: name.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }

    /// Looks up a two-column metric table by its first cell.
    pub fn value(&self, metric: &str) -> Option<&Cell> {
        self.rows
            .iter()
            .find(|r| matches!(&r[0], Cell::Text(t) if t == metric))
            .and_then(|r| r.get(1))
    }

    pub fn int(&self, metric: &str) -> Option<u64> {
        match self.value(metric)? {
            Cell::Int(n) => Some(*n),
            Cell::Text(_) => None,
        }
    }

    fn sort_by_first(&mut self) {
        self.rows.sort_by(|a, b| a[0].to_string().cmp(&b[0].to_string()));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableKind {
    Entities,
    Properties,
    Spaces,
    Concepts,
    Activities,
    Constraints,
}

impl TableKind {
    pub const ALL: [TableKind; 6] = [
        TableKind::Entities,
        TableKind::Properties,
        TableKind::Spaces,
        TableKind::Concepts,
        TableKind::Activities,
        TableKind::Constraints,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Entities => "entities",
            TableKind::Properties => "properties",
            TableKind::Spaces => "spaces",
            TableKind::Concepts => "concepts",
            TableKind::Activities => "activities",
            TableKind::Constraints => "constraints",
        }
    }

    pub fn compute(self, cx: &Context) -> MetricsTable {
        match self {
            TableKind::Entities => report_entity_types(cx),
            TableKind::Properties => report_properties(cx),
            TableKind::Spaces => report_spaces(cx),
            TableKind::Concepts => report_concepts(cx),
            TableKind::Activities => report_activities(cx),
            TableKind::Constraints => report_constraints(cx.graph),
        }
    }
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown table `{s}`"))
    }
}

/// Computes several tables, concurrently when `exec` allows.
pub fn compute_tables(kinds: &[TableKind], cx: &Context, exec: Execution) -> Vec<MetricsTable> {
    exec.map(kinds, |k| k.compute(cx))
}

/// Display name of an IRI: the remainder after the longest declared prefix
/// namespace, else its local name.
pub fn display_name(iri: &Iri, g: &Graph) -> String {
    g.prefixes()
        .values()
        .map(Iri::as_str)
        .filter(|ns| !ns.is_empty() && iri.as_str().starts_with(ns) && iri.as_str().len() > ns.len())
        .max_by_key(|ns| ns.len())
        .map(|ns| iri.as_str()[ns.len()..].to_owned())
        .unwrap_or_else(|| iri.local_name().to_owned())
}

fn metric_table(name: &str, rows: Vec<(&str, usize)>) -> MetricsTable {
    let mut t = MetricsTable::new(name, &["Metric", "Count"]);
    for (m, n) in rows {
        t.push(vec![m.into(), n.into()]);
    }
    t
}

fn scoped(cx: &Context, set: BTreeSet<Iri>) -> BTreeSet<Iri> {
    set.into_iter().filter(|x| cx.vocab.in_scope(x)).collect()
}

/// Entity counts per configured root: `#Entities = #Instances + #Subclasses`.
pub fn report_entity_types(cx: &Context) -> MetricsTable {
    let mut t = MetricsTable::new("entities", &["Entity type", "#Entities", "#Instances", "#Subclasses"]);
    for root in &cx.vocab.entity_roots {
        let instances = scoped(cx, cx.taxonomy.instances_of(root, true)).len();
        let subclasses = scoped(cx, cx.taxonomy.subclasses_of(root)).len();
        t.push(vec![
            display_name(root, cx.graph).into(),
            (instances + subclasses).into(),
            instances.into(),
            subclasses.into(),
        ]);
    }
    t.sort_by_first();
    t
}

/// One row per declared property, by assertion count then name.
pub fn report_properties(cx: &Context) -> MetricsTable {
    let g = cx.graph;
    let v = cx.vocab;
    let names = |set: BTreeSet<String>| set.into_iter().collect::<Vec<_>>().join(", ");
    let mut rows = Vec::new();
    for p in cx.index.properties() {
        let flags = cx.index.get(p).expect("indexed");
        let kind = if flags.is_object_prop {
            "O"
        } else if flags.is_annotation_prop {
            "A"
        } else {
            "D"
        };
        let lookup = |q: &Iri| -> BTreeSet<String> {
            g.iri_objects(p, q)
                .filter_map(Term::as_iri)
                .map(|i| display_name(i, g))
                .collect()
        };
        let mut inverse = lookup(&v.inverse_of_prop);
        inverse.extend(
            g.subjects(&v.inverse_of_prop, &Term::Iri(p.clone()))
                .filter_map(Subject::as_iri)
                .map(|i| display_name(i, g)),
        );
        rows.push((
            g.with_predicate(p).count(),
            display_name(p, g),
            kind,
            names(lookup(&v.domain_prop)),
            names(lookup(&v.range_prop)),
            names(inverse),
        ));
    }
    rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let mut t = MetricsTable::new("properties", &["Property", "Assertions", "Type", "Domain", "Range", "Inverse"]);
    for (n, name, kind, dom, ran, inv) in rows {
        t.push(vec![name.into(), n.into(), kind.into(), dom.into(), ran.into(), inv.into()]);
    }
    t
}

/// Coverage of technological spaces by languages, tools and artifacts.
pub fn report_spaces(cx: &Context) -> MetricsTable {
    let v = cx.vocab;
    let instances = scoped(cx, cx.taxonomy.instances_of(&v.technological_space_root, true));
    let subclasses = scoped(cx, cx.taxonomy.subclasses_of(&v.technological_space_root));
    let members: Vec<BTreeSet<Iri>> = instances.iter().map(|s| cx.space_members(s)).collect();
    let mut counts = Vec::new();
    let kinds = [
        (&v.language_root, "spaces_with_languages", "languages_with_spaces"),
        (&v.tool_root, "spaces_with_tools", "tools_with_spaces"),
        (&v.artifact_root, "spaces_with_artifacts", "artifacts_with_spaces"),
    ];
    let mut reverse = Vec::new();
    for (root, spaces_with, with_spaces) in kinds {
        let kind = cx.taxonomy.kind_members(root);
        counts.push((spaces_with, members.iter().filter(|m| !m.is_disjoint(&kind)).count()));
        let associated: BTreeSet<&Iri> = members.iter().flat_map(|m| m.intersection(&kind)).collect();
        reverse.push((with_spaces, associated.len()));
    }
    let mut rows = vec![("instances", instances.len()), ("subclasses", subclasses.len())];
    rows.extend(counts);
    rows.extend(reverse);
    metric_table("spaces", rows)
}

/// Coverage of language concepts by ontological assertions.
pub fn report_concepts(cx: &Context) -> MetricsTable {
    let v = cx.vocab;
    let root = &v.language_concept_root;
    let instances = scoped(cx, cx.taxonomy.instances_of(root, true));
    let subclasses = scoped(cx, cx.taxonomy.subclasses_of(root));
    let concepts: BTreeSet<Iri> = instances.union(&subclasses).cloned().collect();
    let used = |set: &BTreeSet<Iri>| set.iter().filter(|c| !cx.assertion_neighbors(c).is_empty()).count();
    let mut properties = BTreeSet::new();
    let mut linked = BTreeSet::new();
    for c in &concepts {
        for (p, o) in cx.assertion_neighbors(c) {
            properties.insert(p);
            linked.insert(o);
        }
    }
    let languages = cx.taxonomy.kind_members(&v.language_root);
    let programming = cx.taxonomy.kind_members(&v.programming_language_class);
    let software: BTreeSet<&Iri> = linked.intersection(&languages).collect();
    let prog = software.iter().filter(|l| programming.contains(**l)).count();
    metric_table(
        "concepts",
        vec![
            ("concepts", concepts.len()),
            ("instances", instances.len()),
            ("subclasses", subclasses.len()),
            ("used_instances", used(&instances)),
            ("used_subclasses", used(&subclasses)),
            ("properties", properties.len()),
            ("software_languages", software.len()),
            ("programming_languages", prog),
        ],
    )
}

/// Coverage of software engineering activities.
pub fn report_activities(cx: &Context) -> MetricsTable {
    let v = cx.vocab;
    let tax = &cx.taxonomy;
    let root = &v.se_activity_root;
    let instances = scoped(cx, tax.instances_of(root, true));
    let all_subs = scoped(cx, tax.subclasses_of(root));
    let immediate: BTreeSet<Iri> = scoped(cx, tax.direct_subclasses(root).clone());
    let nonimmediate: BTreeSet<Iri> = all_subs.difference(&immediate).cloned().collect();
    let used_nonimmediate = nonimmediate.iter().filter(|a| !cx.assertion_neighbors(a).is_empty()).count();

    let mut properties = BTreeSet::new();
    let mut linked = BTreeSet::new();
    for a in instances.iter().chain(&all_subs) {
        for (p, o) in cx.assertion_neighbors(a) {
            properties.insert(p);
            linked.insert(o);
        }
    }
    // An entity at both levels counts at the subclass level.
    let split = |kind_root: &Iri| {
        let subs = tax.subclasses_of(kind_root);
        let inst = tax.instances_of(kind_root, true);
        let s = linked.iter().filter(|x| subs.contains(*x)).count();
        let i = linked.iter().filter(|x| inst.contains(*x) && !subs.contains(*x)).count();
        (i, s)
    };
    let (lang_i, lang_s) = split(&v.language_root);
    let (tool_i, tool_s) = split(&v.tool_root);
    let artifacts = tax.kind_members(&v.artifact_root);
    metric_table(
        "activities",
        vec![
            ("instances", instances.len()),
            ("immediate_subclasses", immediate.len()),
            ("nonimmediate_subclasses", nonimmediate.len()),
            ("used_nonimmediate_subclasses", used_nonimmediate),
            ("properties", properties.len()),
            ("language_instances", lang_i),
            ("language_subclasses", lang_s),
            ("tool_instances", tool_i),
            ("tool_subclasses", tool_s),
            ("artifacts", linked.intersection(&artifacts).count()),
        ],
    )
}

/// Constraint constructs used as predicates.
pub const CONSTRAINT_PREDICATES: &[(&str, &str)] = &[
    (OWL, "allValuesFrom"),
    (OWL, "cardinality"),
    (OWL, "disjointUnionOf"),
    (OWL, "disjointWith"),
    (OWL, "equivalentClass"),
    (OWL, "equivalentProperty"),
    (OWL, "hasValue"),
    (OWL, "inverseOf"),
    (OWL, "maxCardinality"),
    (OWL, "maxQualifiedCardinality"),
    (OWL, "minCardinality"),
    (OWL, "minQualifiedCardinality"),
    (OWL, "propertyDisjointWith"),
    (OWL, "qualifiedCardinality"),
    (OWL, "someValuesFrom"),
    (RDFS, "domain"),
    (RDFS, "range"),
    (RDFS, "subPropertyOf"),
];

/// Constraint constructs used as `rdf:type` objects.
pub const CONSTRAINT_TYPES: &[&str] = &[
    "AllDisjointClasses",
    "AsymmetricProperty",
    "FunctionalProperty",
    "InverseFunctionalProperty",
    "IrreflexiveProperty",
    "ReflexiveProperty",
    "SymmetricProperty",
    "TransitiveProperty",
];

/// Usage count per OWL constraint construct, zeros included.
pub fn report_constraints(g: &Graph) -> MetricsTable {
    let rdf_type = Iri::from_static(&format!("{}type", crate::vocab::RDF));
    let mut t = MetricsTable::new("constraints", &["Construct", "Uses"]);
    for (ns, name) in CONSTRAINT_PREDICATES {
        let p = Iri::from_static(&format!("{ns}{name}"));
        let prefix = if *ns == OWL { "owl" } else { "rdfs" };
        t.push(vec![format!("{prefix}:{name}").into(), g.with_predicate(&p).count().into()]);
    }
    for name in CONSTRAINT_TYPES {
        let c = Term::Iri(Iri::from_static(&format!("{OWL}{name}")));
        t.push(vec![format!("owl:{name}").into(), g.subjects(&rdf_type, &c).count().into()]);
    }
    t.sort_by_first();
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Text,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "text" => Ok(TableFormat::Text),
            other => Err(format!("unknown table format `{other}`")),
        }
    }
}

pub fn serialize_table(t: &MetricsTable, format: TableFormat) -> Vec<u8> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
            w.write_record(&t.columns).expect("in-memory write");
            for row in &t.rows {
                w.write_record(row.iter().map(|c| c.to_string())).expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        TableFormat::Json => {
            let mut out = serde_json::to_vec_pretty(t).expect("serializable table");
            out.push(b'\n');
            out
        }
        TableFormat::Text => {
            let cells: Vec<Vec<String>> = std::iter::once(t.columns.clone())
                .chain(t.rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()))
                .collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|i| cells.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for (n, row) in cells.iter().enumerate() {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
                if n == 0 {
                    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                    out.push_str(&rule.join("  "));
                    out.push('\n');
                }
            }
            out.into_bytes()
        }
    }
}
