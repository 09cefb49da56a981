//! Quality checks for OWL/RDF ontologies: Turtle graphs, punning-aware entity
//! classification, import resolution, validation rules, metrics tables and an
//! ordered issue ledger.

pub mod error;
pub mod exec;
pub mod graph;
pub mod index;
pub mod issues;
pub mod metrics;
pub mod modules;
pub mod rules;
pub mod vocab;

pub use error::{ConfigError, IriError, LoadError, ParseError};
pub use exec::Execution;
pub use graph::{merge, parse_turtle, BlankNode, Graph, Iri, Literal, Subject, Term, Triple};
pub use index::{classify_documents, classify_entities, instances_of, subclass_closure, Closure, EntityFlags, EntityIndex, Taxonomy};
pub use issues::{check_issues, findings_to_issues, order_issues, parse_issues, Issue, IssueLedger};
pub use metrics::{compute_tables, serialize_table, MetricsTable, TableFormat, TableKind};
pub use rules::{run_rules, Context, ExceptionList, Finding, Registry, Rule, Severity, ValidationReport, Verdict};
pub use vocab::{SpaceOrientation, Vocabulary};
