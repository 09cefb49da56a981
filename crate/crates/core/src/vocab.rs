//! Property and class symbols referenced by rules and reports.
//!
//! Every IRI is configurable. Overrides are read from a flat TOML file whose
//! keys are the field names below; see the repository README for the format.

use std::collections::BTreeMap;

use crate::error::ConfigError;
use crate::graph::Iri;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";

pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";

/// Default namespace of the ontology's terminology module.
pub const TBOX: &str = "http://softlang.org/fsl/tbox#";

/// How `hasSpace` links a technological space with its associated entities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceOrientation {
    /// `entity hasSpace space`
    EntityToSpace,
    /// `space hasSpace entity`
    SpaceToEntity,
    Both,
}

macro_rules! vocabulary {
    (
        required { $($req:ident = $req_default:expr,)* }
        optional { $($opt:ident = $opt_default:expr,)* }
    ) => {
        #[derive(Debug, Clone, PartialEq, Eq)]
        pub struct Vocabulary {
            $(pub $req: Iri,)*
            $(pub $opt: Option<Iri>,)*
            /// Root classes listed in the entity-type table.
            pub entity_roots: Vec<Iri>,
            /// When non-empty, scoped rules only consider IRIs starting with one of these.
            pub scope_namespaces: Vec<String>,
            /// External vocabularies never considered by scoped rules.
            pub excluded_namespaces: Vec<String>,
            /// Predicates that do not count as ontological assertions.
            pub annotation_exclusions: Vec<Iri>,
            /// Axiom-level predicates that do not count as ontological assertions.
            pub schema_predicates: Vec<Iri>,
            /// Properties connecting a methodological approach to what serves it.
            pub approach_link_props: Vec<Iri>,
            /// Accepted link hosts (suffix match); empty accepts any http(s) host.
            pub link_hosts: Vec<String>,
            /// Role-name pairs allowed to share an IRI.
            pub aliases: Vec<(String, String)>,
            pub space_orientation: SpaceOrientation,
            /// Whether `x rdf:type owl:NamedIndividual` counts as a type assertion.
            pub named_individual_is_type: bool,
            /// Local name that identifies the terminology module.
            pub tbox_module: String,
        }

        impl Default for Vocabulary {
            fn default() -> Self {
                Vocabulary {
                    $($req: Iri::from_static(&$req_default),)*
                    $($opt: Some(Iri::from_static(&$opt_default)),)*
                    entity_roots: ["Artifact", "ConceptualEntity", "FormalEntity", "Language", "SoftwareEngineeringActivity", "Tool"]
                        .iter()
                        .map(|n| tbox(n))
                        .collect(),
                    scope_namespaces: Vec::new(),
                    excluded_namespaces: [RDF, RDFS, OWL, XSD, FOAF, SKOS, DC, DCTERMS]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    annotation_exclusions: vec![
                        Iri::from_static(&format!("{RDFS}comment")),
                        Iri::from_static(&format!("{RDFS}label")),
                        Iri::from_static(&format!("{RDFS}seeAlso")),
                        Iri::from_static(&format!("{RDFS}isDefinedBy")),
                        Iri::from_static(&format!("{FOAF}isPrimaryTopicOf")),
                        Iri::from_static(&format!("{FOAF}page")),
                        Iri::from_static(&format!("{OWL}sameAs")),
                        tbox("hasBibTeX"),
                    ],
                    schema_predicates: ["domain", "range"]
                        .iter()
                        .map(|n| Iri::from_static(&format!("{RDFS}{n}")))
                        .chain(
                            ["inverseOf", "disjointWith", "equivalentClass", "imports", "members", "equivalentProperty", "propertyDisjointWith", "onProperty", "someValuesFrom", "allValuesFrom", "hasValue", "cardinality", "minCardinality", "maxCardinality", "qualifiedCardinality", "minQualifiedCardinality", "maxQualifiedCardinality", "onClass", "versionIRI"]
                                .iter()
                                .map(|n| Iri::from_static(&format!("{OWL}{n}"))),
                        )
                        .chain(std::iter::once(Iri::from_static(&format!("{RDFS}subPropertyOf"))))
                        .chain([RDF_FIRST, RDF_REST].iter().map(|s| Iri::from_static(s)))
                        .collect(),
                    approach_link_props: vec![tbox("serves"), tbox("uses"), tbox("isSpecifiedBy")],
                    link_hosts: vec!["wikipedia.org".into()],
                    aliases: Vec::new(),
                    space_orientation: SpaceOrientation::Both,
                    named_individual_is_type: false,
                    tbox_module: "tbox".into(),
                }
            }
        }

        impl Vocabulary {
            /// Named IRI roles, used for the distinctness check.
            pub fn roles(&self) -> Vec<(&'static str, &Iri)> {
                let mut out = vec![$((stringify!($req), &self.$req),)*];
                $(if let Some(i) = &self.$opt { out.push((stringify!($opt), i)); })*
                out
            }

            fn set_iri(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
                let parse = |v: &str| Iri::new(v).map_err(|error| ConfigError::Iri { key: key.to_owned(), error });
                match key {
                    $(stringify!($req) => { self.$req = parse(value)?; Ok(true) })*
                    $(stringify!($opt) => {
                        self.$opt = if value.is_empty() { None } else { Some(parse(value)?) };
                        Ok(true)
                    })*
                    _ => Ok(false),
                }
            }
        }
    };
}

fn tbox(local: &str) -> Iri {
    Iri::from_static(&format!("{TBOX}{local}"))
}

vocabulary! {
    required {
        type_prop = format!("{RDF}type"),
        sub_class_prop = format!("{RDFS}subClassOf"),
        comment_prop = format!("{RDFS}comment"),
        label_prop = format!("{RDFS}label"),
        domain_prop = format!("{RDFS}domain"),
        range_prop = format!("{RDFS}range"),
        class_decl = format!("{OWL}Class"),
        named_individual_decl = format!("{OWL}NamedIndividual"),
        object_prop_decl = format!("{OWL}ObjectProperty"),
        annotation_prop_decl = format!("{OWL}AnnotationProperty"),
        datatype_prop_decl = format!("{OWL}DatatypeProperty"),
        ontology_decl = format!("{OWL}Ontology"),
        imports_prop = format!("{OWL}imports"),
        disjoint_prop = format!("{OWL}disjointWith"),
        all_disjoint_classes = format!("{OWL}AllDisjointClasses"),
        members_prop = format!("{OWL}members"),
        inverse_of_prop = format!("{OWL}inverseOf"),
        equivalent_class_prop = format!("{OWL}equivalentClass"),
        foaf_primary_topic_of = format!("{FOAF}isPrimaryTopicOf"),
        foaf_page = format!("{FOAF}page"),
        has_area = format!("{TBOX}hasArea"),
        has_space = format!("{TBOX}hasSpace"),
        conforms_to = format!("{TBOX}conformsTo"),
        element_of = format!("{TBOX}elementOf"),
        defined_by = format!("{TBOX}definedBy"),
        transforms = format!("{TBOX}transforms"),
        processed_by = format!("{TBOX}processedBy"),
        uses = format!("{TBOX}uses"),
        has_part = format!("{TBOX}hasPart"),
        extends = format!("{TBOX}extends"),
        is_specified_by = format!("{TBOX}isSpecifiedBy"),
        serves = format!("{TBOX}serves"),
        has_bibtex = format!("{TBOX}hasBibTeX"),
        language_root = format!("{TBOX}Language"),
        tool_root = format!("{TBOX}Tool"),
        artifact_root = format!("{TBOX}Artifact"),
        formal_entity_root = format!("{TBOX}FormalEntity"),
        conceptual_entity_root = format!("{TBOX}ConceptualEntity"),
        technological_space_root = format!("{TBOX}TechnologicalSpace"),
        se_activity_root = format!("{TBOX}SoftwareEngineeringActivity"),
        methodological_approach_root = format!("{TBOX}MethodologicalApproach"),
        language_concept_root = format!("{TBOX}LanguageConcept"),
        programming_language_class = format!("{TBOX}ProgrammingLanguage"),
    }
    optional {
        issue_class = format!("{TBOX}Issue"),
        issue_target = format!("{TBOX}target"),
        issue_critique = format!("{TBOX}critique"),
        issue_suggestion = format!("{TBOX}suggestion"),
        issue_resolve_after = format!("{TBOX}resolveAfter"),
        issue_status = format!("{TBOX}status"),
    }
}

impl Vocabulary {
    /// Applies overrides from a flat TOML document and checks the result.
    pub fn with_overrides(mut self, toml_text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = toml_text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Toml(e.to_string()))?;
        for (key, value) in &table {
            self.apply(key, value)?;
        }
        self.validate()?;
        Ok(self)
    }

    fn apply(&mut self, key: &str, value: &toml::Value) -> Result<(), ConfigError> {
        let bad = |what: &str| ConfigError::Toml(format!("key `{key}`: expected {what}"));
        let strings = |v: &toml::Value| -> Result<Vec<String>, ConfigError> {
            v.as_array()
                .ok_or_else(|| bad("an array of strings"))?
                .iter()
                .map(|x| x.as_str().map(str::to_owned).ok_or_else(|| bad("an array of strings")))
                .collect()
        };
        let iris = |v: &toml::Value| -> Result<Vec<Iri>, ConfigError> {
            strings(v)?
                .into_iter()
                .map(|s| Iri::new(&s).map_err(|error| ConfigError::Iri { key: key.to_owned(), error }))
                .collect()
        };
        match key {
            "entity_roots" => self.entity_roots = iris(value)?,
            "scope_namespaces" => self.scope_namespaces = strings(value)?,
            "excluded_namespaces" => self.excluded_namespaces = strings(value)?,
            "annotation_exclusions" => self.annotation_exclusions = iris(value)?,
            "schema_predicates" => self.schema_predicates = iris(value)?,
            "approach_link_props" => self.approach_link_props = iris(value)?,
            "link_hosts" => self.link_hosts = strings(value)?,
            "tbox_module" => self.tbox_module = value.as_str().ok_or_else(|| bad("a string"))?.to_owned(),
            "named_individual_is_type" => {
                self.named_individual_is_type = value.as_bool().ok_or_else(|| bad("a boolean"))?
            }
            "space_orientation" => {
                self.space_orientation = match value.as_str() {
                    Some("entity-to-space") => SpaceOrientation::EntityToSpace,
                    Some("space-to-entity") => SpaceOrientation::SpaceToEntity,
                    Some("both") => SpaceOrientation::Both,
                    _ => return Err(bad("one of \"entity-to-space\", \"space-to-entity\", \"both\"")),
                }
            }
            "aliases" => {
                self.aliases = strings(value)?
                    .into_iter()
                    .map(|pair| {
                        pair.split_once('=')
                            .map(|(a, b)| (a.trim().to_owned(), b.trim().to_owned()))
                            .ok_or_else(|| bad("entries of the form \"role_a = role_b\""))
                    })
                    .collect::<Result<_, _>>()?
            }
            _ => {
                let text = value.as_str().ok_or_else(|| bad("an IRI string"))?;
                if !self.set_iri(key, text)? {
                    return Err(ConfigError::UnknownKey(key.to_owned()));
                }
            }
        }
        Ok(())
    }

    /// Checks that no two roles share an IRI unless aliased.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut seen: BTreeMap<&Iri, &'static str> = BTreeMap::new();
        for (role, iri) in self.roles() {
            if let Some(prev) = seen.insert(iri, role) {
                let aliased = self
                    .aliases
                    .iter()
                    .any(|(a, b)| (a == prev && b == role) || (a == role && b == prev));
                if !aliased {
                    return Err(ConfigError::DuplicateRole(prev.into(), role.into(), iri.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Whether scoped rules and reports consider this IRI.
    pub fn in_scope(&self, iri: &Iri) -> bool {
        let s = iri.as_str();
        if self.excluded_namespaces.iter().any(|ns| s.starts_with(ns.as_str())) {
            return false;
        }
        self.scope_namespaces.is_empty() || self.scope_namespaces.iter().any(|ns| s.starts_with(ns.as_str()))
    }

    /// Type objects that declare rather than categorize.
    pub fn is_declaration_type(&self, iri: &Iri) -> bool {
        *iri == self.class_decl
            || *iri == self.object_prop_decl
            || *iri == self.annotation_prop_decl
            || *iri == self.datatype_prop_decl
            || *iri == self.ontology_decl
            || *iri == self.all_disjoint_classes
            || (*iri == self.named_individual_decl && !self.named_individual_is_type)
            || iri.as_str().starts_with(OWL)
            || iri.as_str().starts_with(RDFS)
            || iri.as_str().starts_with(RDF)
    }

    /// Predicates that are ontological assertions (not typing, taxonomy,
    /// axioms or annotations).
    pub fn is_assertion_predicate(&self, p: &Iri) -> bool {
        *p != self.type_prop
            && *p != self.sub_class_prop
            && !self.annotation_exclusions.contains(p)
            && !self.schema_predicates.contains(p)
    }

    pub fn link_props(&self) -> [&Iri; 2] {
        [&self.foaf_primary_topic_of, &self.foaf_page]
    }

    pub(crate) fn issue_vocab(&self) -> Result<IssueVocab<'_>, ConfigError> {
        Ok(IssueVocab {
            class: self.issue_class.as_ref().ok_or(ConfigError::MissingIssueVocabulary("issue_class"))?,
            target: self.issue_target.as_ref().ok_or(ConfigError::MissingIssueVocabulary("issue_target"))?,
            critique: self
                .issue_critique
                .as_ref()
                .ok_or(ConfigError::MissingIssueVocabulary("issue_critique"))?,
            suggestion: self
                .issue_suggestion
                .as_ref()
                .ok_or(ConfigError::MissingIssueVocabulary("issue_suggestion"))?,
            resolve_after: self
                .issue_resolve_after
                .as_ref()
                .ok_or(ConfigError::MissingIssueVocabulary("issue_resolve_after"))?,
            status: self.issue_status.as_ref(),
        })
    }
}

pub(crate) struct IssueVocab<'a> {
    pub class: &'a Iri,
    pub target: &'a Iri,
    pub critique: &'a Iri,
    pub suggestion: &'a Iri,
    pub resolve_after: &'a Iri,
    pub status: Option<&'a Iri>,
}
