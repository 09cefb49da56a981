//! In-memory RDF graph: terms, triples, Turtle parsing, merging and a
//! debug serializer.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use oxttl::TurtleParser;

use crate::error::{IriError, ParseError};

pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

/// An absolute IRI. Equality is codepoint equality of the string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, IriError> {
        let value = value.as_ref();
        if !has_scheme(value) {
            return Err(IriError::NotAbsolute(value.to_owned()));
        }
        if value.chars().any(|c| c.is_whitespace() || c == '<' || c == '>' || c == '"') {
            return Err(IriError::InvalidCharacter(value.to_owned()));
        }
        Ok(Iri(Arc::from(value)))
    }

    /// Builds an IRI from a string the caller knows to be absolute.
    ///
    /// Panics when it is not; intended for constants and test fixtures.
    pub fn from_static(value: &str) -> Self {
        Iri::new(value).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Part after the last `#` or `/`, or the whole string when neither occurs
    /// after the scheme.
    pub fn local_name(&self) -> &str {
        let s = self.as_str();
        match s.rfind(['#', '/']) {
            Some(i) if i + 1 < s.len() => &s[i + 1..],
            _ => s,
        }
    }

    /// Prefix up to and including the last `#` or `/`.
    pub fn namespace(&self) -> &str {
        let s = self.as_str();
        match s.rfind(['#', '/']) {
            Some(i) => &s[..=i],
            None => s,
        }
    }
}

fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BlankNode(Arc<str>);

impl BlankNode {
    pub fn new(label: impl AsRef<str>) -> Self {
        BlankNode(Arc::from(label.as_ref()))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    lexical: Arc<str>,
    datatype: Iri,
    lang: Option<Arc<str>>,
}

impl Literal {
    pub fn string(lexical: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: Iri::from_static(XSD_STRING),
            lang: None,
        }
    }

    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype,
            lang: None,
        }
    }

    pub fn lang_string(lexical: impl AsRef<str>, lang: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            datatype: Iri::from_static(RDF_LANG_STRING),
            lang: Some(Arc::from(lang.as_ref().to_ascii_lowercase())),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

impl From<Iri> for Subject {
    fn from(iri: Iri) -> Self {
        Subject::Iri(iri)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(i) => Some(Subject::Iri(i.clone())),
            Term::Blank(b) => Some(Subject::Blank(b.clone())),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl From<Subject> for Term {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => Term::Iri(i),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

/// Immutable set of triples with the prefix map of its source document(s).
///
/// Triples keep first-insertion order for iteration; equality is set
/// equality.
#[derive(Clone, Default)]
pub struct Graph {
    triples: IndexSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
    base: Option<Iri>,
    warnings: Vec<String>,
    by_subject: HashMap<Subject, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples && self.prefixes == other.prefixes
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("triples", &self.triples.len())
            .field("prefixes", &self.prefixes)
            .field("base", &self.base)
            .finish()
    }
}

#[derive(Default)]
pub struct GraphBuilder {
    triples: IndexSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
    base: Option<Iri>,
    warnings: Vec<String>,
}

impl GraphBuilder {
    pub fn insert(&mut self, triple: Triple) -> &mut Self {
        self.triples.insert(triple);
        self
    }

    /// Binds a prefix. A rebinding to a different namespace is ignored and
    /// recorded as a warning.
    pub fn prefix(&mut self, name: impl Into<String>, namespace: Iri) -> &mut Self {
        let name = name.into();
        match self.prefixes.get(&name) {
            Some(existing) if *existing != namespace => {
                self.warnings.push(format!(
                    "prefix `{name}:` is bound to <{existing}> and <{namespace}>; keeping <{existing}>"
                ));
            }
            Some(_) => {}
            None => {
                self.prefixes.insert(name, namespace);
            }
        }
        self
    }

    pub fn base(&mut self, base: Option<Iri>) -> &mut Self {
        self.base = base;
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn build(self) -> Graph {
        let mut by_subject: HashMap<Subject, Vec<usize>> = HashMap::new();
        let mut by_predicate: HashMap<Iri, Vec<usize>> = HashMap::new();
        let mut by_object: HashMap<Term, Vec<usize>> = HashMap::new();
        for (i, t) in self.triples.iter().enumerate() {
            by_subject.entry(t.subject.clone()).or_default().push(i);
            by_predicate.entry(t.predicate.clone()).or_default().push(i);
            by_object.entry(t.object.clone()).or_default().push(i);
        }
        Graph {
            triples: self.triples,
            prefixes: self.prefixes,
            base: self.base,
            warnings: self.warnings,
            by_subject,
            by_predicate,
            by_object,
        }
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut b = Graph::builder();
        for t in iter {
            b.insert(t);
        }
        b.build()
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    pub fn base(&self) -> Option<&Iri> {
        self.base.as_ref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Triples as a sorted set, for order-insensitive comparisons.
    pub fn triple_set(&self) -> BTreeSet<Triple> {
        self.triples.iter().cloned().collect()
    }

    fn indexed<'a>(&'a self, idx: Option<&'a Vec<usize>>) -> impl Iterator<Item = &'a Triple> + 'a {
        idx.into_iter()
            .flatten()
            .map(move |&i| &self.triples[i])
    }

    pub fn with_subject<'a>(&'a self, s: &Subject) -> impl Iterator<Item = &'a Triple> + 'a {
        self.indexed(self.by_subject.get(s))
    }

    pub fn with_predicate<'a>(&'a self, p: &Iri) -> impl Iterator<Item = &'a Triple> + 'a {
        self.indexed(self.by_predicate.get(p))
    }

    pub fn with_object<'a>(&'a self, o: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        self.indexed(self.by_object.get(o))
    }

    /// Objects of `(s, p, ?)`.
    pub fn objects<'a>(&'a self, s: &Subject, p: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
        self.with_subject(s)
            .filter(move |t| t.predicate == *p)
            .map(|t| &t.object)
    }

    /// Objects of `(s, p, ?)` for a named subject.
    pub fn iri_objects<'a>(&'a self, s: &Iri, p: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
        self.objects(&Subject::Iri(s.clone()), p)
    }

    /// Subjects of `(?, p, o)`.
    pub fn subjects<'a>(&'a self, p: &'a Iri, o: &Term) -> impl Iterator<Item = &'a Subject> + 'a {
        self.with_object(o)
            .filter(move |t| t.predicate == *p)
            .map(|t| &t.subject)
    }

    pub fn has_triple(&self, s: &Iri, p: &Iri, o: &Iri) -> bool {
        self.contains(&Triple::new(s.clone(), p.clone(), o.clone()))
    }

    /// Distinct predicates in codepoint order.
    pub fn predicates(&self) -> BTreeSet<&Iri> {
        self.by_predicate.keys().collect()
    }

    /// Elements of an RDF collection starting at `head`. Stops on malformed or
    /// cyclic lists.
    pub fn list_items(&self, head: &Term) -> Vec<Term> {
        let first = Iri::from_static(crate::vocab::RDF_FIRST);
        let rest = Iri::from_static(crate::vocab::RDF_REST);
        let nil = Term::Iri(Iri::from_static(crate::vocab::RDF_NIL));
        let mut items = Vec::new();
        let mut seen = BTreeSet::new();
        let mut node = head.clone();
        while node != nil {
            let Some(s) = node.as_subject() else { break };
            if !seen.insert(s.clone()) {
                break;
            }
            match self.objects(&s, &first).next() {
                Some(item) => items.push(item.clone()),
                None => break,
            }
            match self.objects(&s, &rest).next() {
                Some(next) => node = next.clone(),
                None => break,
            }
        }
        items
    }

    /// Debug Turtle serialization: prefix directives, then triples grouped by
    /// subject with subjects, predicates and objects in sorted order. Terms are
    /// written in full form so the output does not depend on prefix choice.
    pub fn to_turtle(&self) -> String {
        let mut out = String::new();
        for (name, ns) in &self.prefixes {
            out.push_str(&format!("@prefix {name}: <{ns}> .\n"));
        }
        if !self.prefixes.is_empty() {
            out.push('\n');
        }
        let mut grouped: BTreeMap<&Subject, BTreeMap<&Iri, BTreeSet<&Term>>> = BTreeMap::new();
        for t in &self.triples {
            grouped
                .entry(&t.subject)
                .or_default()
                .entry(&t.predicate)
                .or_default()
                .insert(&t.object);
        }
        for (s, preds) in grouped {
            out.push_str(&write_subject(s));
            let n = preds.len();
            for (pi, (p, objs)) in preds.into_iter().enumerate() {
                out.push_str(if pi == 0 { " " } else { "    " });
                out.push_str(&format!("<{p}> "));
                let objs: Vec<String> = objs.into_iter().map(write_term).collect();
                out.push_str(&objs.join(", "));
                out.push_str(if pi + 1 == n { " .\n" } else { " ;\n" });
            }
        }
        out
    }
}

fn write_subject(s: &Subject) -> String {
    match s {
        Subject::Iri(i) => format!("<{i}>"),
        Subject::Blank(b) => format!("_:{}", b.label()),
    }
}

pub(crate) fn write_term(t: &Term) -> String {
    match t {
        Term::Iri(i) => format!("<{i}>"),
        Term::Blank(b) => format!("_:{}", b.label()),
        Term::Literal(l) => {
            let lex = escape_literal(l.lexical());
            match l.lang() {
                Some(lang) => format!("\"{lex}\"@{lang}"),
                None if l.datatype().as_str() == XSD_STRING => format!("\"{lex}\""),
                None => format!("\"{lex}\"^^<{}>", l.datatype()),
            }
        }
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Parses a Turtle document. Blank nodes are relabelled `b0`, `b1`, ... in
/// order of first appearance.
pub fn parse_turtle(document: &[u8], base: Option<&Iri>) -> Result<Graph, ParseError> {
    if let Err(e) = std::str::from_utf8(document) {
        let prefix = &document[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() as u64 + 1;
        return Err(ParseError::NotUtf8 {
            line,
            offset: e.valid_up_to(),
        });
    }
    let mut parser = TurtleParser::new();
    if let Some(b) = base {
        parser = parser
            .with_base_iri(b.as_str())
            .map_err(|e| ParseError::InvalidBase(format!("{b}: {e}")))?;
    }
    let mut reader = parser.for_slice(document);
    let mut builder = Graph::builder();
    let mut blanks: HashMap<String, BlankNode> = HashMap::new();
    for item in reader.by_ref() {
        let triple = item.map_err(|e| classify_syntax_error(document, &e))?;
        let subject = match triple.subject {
            oxrdf::NamedOrBlankNode::NamedNode(n) => Subject::Iri(Iri(Arc::from(n.as_str()))),
            oxrdf::NamedOrBlankNode::BlankNode(b) => Subject::Blank(relabel(&mut blanks, b.as_str())),
        };
        let predicate = Iri(Arc::from(triple.predicate.as_str()));
        #[allow(unreachable_patterns)]
        let object = match triple.object {
            oxrdf::Term::NamedNode(n) => Term::Iri(Iri(Arc::from(n.as_str()))),
            oxrdf::Term::BlankNode(b) => Term::Blank(relabel(&mut blanks, b.as_str())),
            oxrdf::Term::Literal(l) => Term::Literal(match l.language() {
                Some(lang) => Literal::lang_string(l.value(), lang),
                None => Literal::typed(l.value(), Iri(Arc::from(l.datatype().as_str()))),
            }),
            _ => {
                return Err(ParseError::Unsupported {
                    line: 0,
                    column: 0,
                    construct: "RDF-star triple term".into(),
                })
            }
        };
        builder.insert(Triple {
            subject,
            predicate,
            object,
        });
    }
    for (name, ns) in reader.prefixes() {
        let ns = Iri::new(ns).map_err(|e| ParseError::InvalidBase(e.to_string()))?;
        builder.prefix(name, ns);
    }
    if let Some(b) = reader.base_iri() {
        builder.base(Iri::new(b).ok());
    } else {
        builder.base(base.cloned());
    }
    Ok(builder.build())
}

fn relabel(map: &mut HashMap<String, BlankNode>, label: &str) -> BlankNode {
    let next = map.len();
    map.entry(label.to_owned())
        .or_insert_with(|| BlankNode::new(format!("b{next}")))
        .clone()
}

fn classify_syntax_error(document: &[u8], e: &oxttl::TurtleSyntaxError) -> ParseError {
    let loc = e.location();
    let line = loc.start.line + 1;
    let column = loc.start.column + 1;
    let start = (loc.start.offset as usize).min(document.len());
    let end = (loc.end.offset as usize).clamp(start, document.len());
    let token = String::from_utf8_lossy(&document[start..end]).into_owned();
    let message = e.message().to_owned();
    if token.starts_with("<<") || token.starts_with(">>") || token.starts_with("{|") {
        ParseError::Unsupported {
            line,
            column,
            construct: "RDF-star quoted triple".into(),
        }
    } else if token.starts_with('{') || token.eq_ignore_ascii_case("graph") {
        ParseError::Unsupported {
            line,
            column,
            construct: "named graph block (quads)".into(),
        }
    } else if message.contains("No scheme found") {
        ParseError::RelativeIri {
            line,
            column,
            iri: token,
        }
    } else {
        ParseError::Syntax {
            line,
            column,
            token,
            message,
        }
    }
}

/// Union of graphs. Blank nodes are renamed apart per source graph
/// (`g<i>_<label>`); a prefix bound differently in two graphs keeps the
/// earliest binding and records a warning.
pub fn merge(graphs: &[Graph]) -> Graph {
    let mut builder = Graph::builder();
    for (gi, g) in graphs.iter().enumerate() {
        let rename = |b: &BlankNode| BlankNode::new(format!("g{gi}_{}", b.label()));
        for t in g.triples() {
            let subject = match &t.subject {
                Subject::Blank(b) => Subject::Blank(rename(b)),
                s => s.clone(),
            };
            let object = match &t.object {
                Term::Blank(b) => Term::Blank(rename(b)),
                o => o.clone(),
            };
            builder.insert(Triple {
                subject,
                predicate: t.predicate.clone(),
                object,
            });
        }
        for (name, ns) in g.prefixes() {
            builder.prefix(name.clone(), ns.clone());
        }
        for w in g.warnings() {
            builder.warn(w.clone());
        }
        if builder.base.is_none() {
            builder.base(g.base().cloned());
        }
    }
    builder.build()
}

impl serde::Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}
