//! Entity classification and the explicit subclass/type hierarchy.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::graphmap::DiGraphMap;

use crate::graph::{Graph, Iri, Subject, Term};
use crate::vocab::Vocabulary;

/// Role flags of one named entity. Blank nodes are never entities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityFlags {
    pub is_class: bool,
    pub is_individual: bool,
    pub is_object_prop: bool,
    pub is_annotation_prop: bool,
    pub is_datatype_prop: bool,
    pub declaring_documents: BTreeSet<String>,
}

impl EntityFlags {
    pub fn is_punned(&self) -> bool {
        self.is_class && self.is_individual
    }

    pub fn is_property(&self) -> bool {
        self.is_object_prop || self.is_annotation_prop || self.is_datatype_prop
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityIndex {
    entries: BTreeMap<Iri, EntityFlags>,
}

impl EntityIndex {
    pub fn get(&self, iri: &Iri) -> Option<&EntityFlags> {
        self.entries.get(iri)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, &EntityFlags)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_class(&self, iri: &Iri) -> bool {
        self.get(iri).is_some_and(|f| f.is_class)
    }

    pub fn is_individual(&self, iri: &Iri) -> bool {
        self.get(iri).is_some_and(|f| f.is_individual)
    }

    pub fn classes(&self) -> impl Iterator<Item = &Iri> {
        self.entries.iter().filter(|(_, f)| f.is_class).map(|(i, _)| i)
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Iri> {
        self.entries.iter().filter(|(_, f)| f.is_individual).map(|(i, _)| i)
    }

    pub fn properties(&self) -> impl Iterator<Item = &Iri> {
        self.entries.iter().filter(|(_, f)| f.is_property()).map(|(i, _)| i)
    }

    pub fn punned(&self) -> impl Iterator<Item = &Iri> {
        self.entries.iter().filter(|(_, f)| f.is_punned()).map(|(i, _)| i)
    }

    fn flags(&mut self, iri: &Iri) -> &mut EntityFlags {
        self.entries.entry(iri.clone()).or_default()
    }

    fn accumulate(&mut self, g: &Graph, v: &Vocabulary, document: Option<&str>) {
        for t in g.triples() {
            let Subject::Iri(s) = &t.subject else { continue };
            let Term::Iri(o) = &t.object else { continue };
            if t.predicate == v.sub_class_prop {
                self.flags(o).is_class = true;
                continue;
            }
            if t.predicate != v.type_prop {
                continue;
            }
            let declaration = if *o == v.class_decl {
                self.flags(s).is_class = true;
                true
            } else if *o == v.named_individual_decl {
                self.flags(s).is_individual = true;
                true
            } else if *o == v.object_prop_decl {
                self.flags(s).is_object_prop = true;
                true
            } else if *o == v.annotation_prop_decl {
                self.flags(s).is_annotation_prop = true;
                true
            } else if *o == v.datatype_prop_decl {
                self.flags(s).is_datatype_prop = true;
                true
            } else {
                false
            };
            if !v.is_declaration_type(o) {
                self.flags(s).is_individual = true;
                self.flags(o).is_class = true;
            }
            if let (true, Some(doc)) = (declaration, document) {
                self.flags(s).declaring_documents.insert(doc.to_owned());
            }
        }
    }
}

/// Builds the punning-aware entity index of a graph.
pub fn classify_entities(g: &Graph, v: &Vocabulary) -> EntityIndex {
    let mut idx = EntityIndex::default();
    idx.accumulate(g, v, None);
    idx
}

/// Like [`classify_entities`] over several documents, recording which
/// documents declare each entity.
pub fn classify_documents<'a>(
    documents: impl IntoIterator<Item = (&'a str, &'a Graph)>,
    v: &Vocabulary,
) -> EntityIndex {
    let mut idx = EntityIndex::default();
    for (doc, g) in documents {
        idx.accumulate(g, v, Some(doc));
    }
    idx
}

/// Result of a closure query. `cyclic` is set when the explored part of the
/// hierarchy contains a subclass cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub members: BTreeSet<Iri>,
    pub cyclic: bool,
}

/// Direct subclass and type edges between named entities.
#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    supers: BTreeMap<Iri, BTreeSet<Iri>>,
    subs: BTreeMap<Iri, BTreeSet<Iri>>,
    types: BTreeMap<Iri, BTreeSet<Iri>>,
    instances: BTreeMap<Iri, BTreeSet<Iri>>,
}

static EMPTY: BTreeSet<Iri> = BTreeSet::new();

impl Taxonomy {
    pub fn new(g: &Graph, v: &Vocabulary) -> Self {
        let mut tax = Taxonomy::default();
        for t in g.with_predicate(&v.sub_class_prop) {
            if let (Subject::Iri(s), Term::Iri(o)) = (&t.subject, &t.object) {
                if s != o {
                    tax.supers.entry(s.clone()).or_default().insert(o.clone());
                    tax.subs.entry(o.clone()).or_default().insert(s.clone());
                }
            }
        }
        for t in g.with_predicate(&v.type_prop) {
            if let (Subject::Iri(s), Term::Iri(o)) = (&t.subject, &t.object) {
                if !v.is_declaration_type(o) {
                    tax.types.entry(s.clone()).or_default().insert(o.clone());
                    tax.instances.entry(o.clone()).or_default().insert(s.clone());
                }
            }
        }
        tax
    }

    pub fn direct_subclasses(&self, c: &Iri) -> &BTreeSet<Iri> {
        self.subs.get(c).unwrap_or(&EMPTY)
    }

    pub fn direct_superclasses(&self, c: &Iri) -> &BTreeSet<Iri> {
        self.supers.get(c).unwrap_or(&EMPTY)
    }

    pub fn direct_types(&self, x: &Iri) -> &BTreeSet<Iri> {
        self.types.get(x).unwrap_or(&EMPTY)
    }

    pub fn direct_instances(&self, c: &Iri) -> &BTreeSet<Iri> {
        self.instances.get(c).unwrap_or(&EMPTY)
    }

    /// Entities with at least one categorizing type assertion.
    pub fn typed_entities(&self) -> impl Iterator<Item = &Iri> {
        self.types.keys()
    }

    fn reachable(start: &Iri, edges: &BTreeMap<Iri, BTreeSet<Iri>>) -> BTreeSet<Iri> {
        let mut members = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(c) = queue.pop_front() {
            for next in edges.get(&c).into_iter().flatten() {
                if members.insert(next.clone()) {
                    queue.push_back(next.clone());
                }
            }
        }
        members
    }

    fn reach(&self, start: &Iri, edges: &BTreeMap<Iri, BTreeSet<Iri>>) -> Closure {
        let members = Self::reachable(start, edges);
        let mut sub: DiGraphMap<&Iri, ()> = DiGraphMap::new();
        for m in &members {
            sub.add_node(m);
            for n in edges.get(m).into_iter().flatten() {
                sub.add_edge(m, n, ());
            }
        }
        let cyclic = petgraph::algo::is_cyclic_directed(&sub);
        Closure { members, cyclic }
    }

    /// `c` and everything below it via inverse subclass edges.
    pub fn subclass_closure(&self, c: &Iri) -> Closure {
        self.reach(c, &self.subs)
    }

    /// `c` and everything above it via subclass edges.
    pub fn superclass_closure(&self, c: &Iri) -> Closure {
        self.reach(c, &self.supers)
    }

    /// Strict subclasses of `c` (transitive, `c` excluded).
    pub fn subclasses_of(&self, c: &Iri) -> BTreeSet<Iri> {
        let mut members = Self::reachable(c, &self.subs);
        members.remove(c);
        members
    }

    pub fn instances_of(&self, c: &Iri, transitive: bool) -> BTreeSet<Iri> {
        if !transitive {
            return self.direct_instances(c).clone();
        }
        Self::reachable(c, &self.subs)
            .iter()
            .flat_map(|k| self.direct_instances(k).iter().cloned())
            .collect()
    }

    /// Entities of a kind: strict subclasses of the root plus its transitive
    /// instances.
    pub fn kind_members(&self, root: &Iri) -> BTreeSet<Iri> {
        let mut out = self.subclasses_of(root);
        out.extend(self.instances_of(root, true));
        out
    }

    /// All classes above `x`'s direct types, the types included.
    pub fn type_closure(&self, x: &Iri) -> BTreeSet<Iri> {
        self.direct_types(x)
            .iter()
            .flat_map(|t| Self::reachable(t, &self.supers))
            .collect()
    }
}

/// All IRIs reachable from `c` through zero or more inverse subclass steps.
pub fn subclass_closure(g: &Graph, v: &Vocabulary, c: &Iri) -> Closure {
    Taxonomy::new(g, v).subclass_closure(c)
}

/// Instances of `c`; with `transitive`, instances of any class in its
/// subclass closure. Declaration types are never treated as types.
pub fn instances_of(g: &Graph, v: &Vocabulary, c: &Iri, transitive: bool) -> BTreeSet<Iri> {
    Taxonomy::new(g, v).instances_of(c, transitive)
}
