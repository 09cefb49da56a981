//! Ontologically coded issues: each names a target resource, a critique, a
//! suggested transformation and the issues it must be resolved after.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::ConfigError;
use crate::graph::{write_term, Graph, Iri, Literal, Subject, Term};
use crate::modules::find_cycles;
use crate::rules::{Severity, ValidationReport};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IssueStatus {
    #[default]
    Open,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum IssueTarget {
    Iri(Iri),
    Literal(String),
}

impl fmt::Display for IssueTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueTarget::Iri(i) => write!(f, "<{i}>"),
            IssueTarget::Literal(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Issue {
    pub id: Iri,
    pub target: Option<IssueTarget>,
    pub critique: String,
    pub suggestion: String,
    pub resolve_after: BTreeSet<Iri>,
    pub status: IssueStatus,
}

impl Issue {
    pub fn new(id: Iri, target: IssueTarget, critique: &str, suggestion: &str) -> Self {
        Issue {
            id,
            target: Some(target),
            critique: critique.to_owned(),
            suggestion: suggestion.to_owned(),
            resolve_after: BTreeSet::new(),
            status: IssueStatus::Open,
        }
    }

    pub fn after(mut self, other: &Iri) -> Self {
        self.resolve_after.insert(other.clone());
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IssueLedger {
    pub issues: BTreeMap<Iri, Issue>,
    /// Set by [`IssueLedger::resolve_order`] when the ledger is acyclic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Iri>>,
}

impl IssueLedger {
    pub fn from_issues(issues: impl IntoIterator<Item = Issue>) -> Self {
        IssueLedger {
            issues: issues.into_iter().map(|i| (i.id.clone(), i)).collect(),
            order: None,
        }
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn get(&self, id: &Iri) -> Option<&Issue> {
        self.issues.get(id)
    }

    pub fn resolve_order(&mut self) -> Result<(), CycleError> {
        let order = order_issues(self)?.into_iter().map(|i| i.id.clone()).collect();
        self.order = Some(order);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectKind {
    DanglingReference,
    SelfDependency,
    Cycle,
    EmptyCritique,
    EmptySuggestion,
    MissingTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IssueDefect {
    pub kind: DefectKind,
    pub issue: Iri,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("issue dependencies form a cycle: {}", cycle.iter().map(|i| format!("<{i}>")).collect::<Vec<_>>().join(" -> "))]
pub struct CycleError {
    pub cycle: Vec<Iri>,
}

fn literal_text(t: &Term) -> Option<&str> {
    t.as_literal().map(Literal::lexical)
}

/// Reads one issue per instance of the configured issue class.
pub fn parse_issues(g: &Graph, v: &Vocabulary) -> Result<IssueLedger, ConfigError> {
    let iv = v.issue_vocab()?;
    let class = Term::Iri(iv.class.clone());
    let mut ids: Vec<Iri> = g
        .subjects(&v.type_prop, &class)
        .filter_map(Subject::as_iri)
        .cloned()
        .collect();
    ids.sort();
    ids.dedup();
    let mut ledger = IssueLedger::default();
    for id in ids {
        let first_text = |p: &Iri| -> String {
            g.iri_objects(&id, p)
                .filter_map(literal_text)
                .min()
                .unwrap_or_default()
                .to_owned()
        };
        let target = g
            .iri_objects(&id, iv.target)
            .filter_map(|t| match t {
                Term::Iri(i) => Some(IssueTarget::Iri(i.clone())),
                Term::Literal(l) => Some(IssueTarget::Literal(l.lexical().to_owned())),
                Term::Blank(_) => None,
            })
            .min();
        let status = match iv.status {
            Some(p) => {
                let resolved = g.iri_objects(&id, p).any(|t| match t {
                    Term::Iri(i) => i.local_name().eq_ignore_ascii_case("resolved"),
                    Term::Literal(l) => l.lexical().eq_ignore_ascii_case("resolved"),
                    Term::Blank(_) => false,
                });
                if resolved {
                    IssueStatus::Resolved
                } else {
                    IssueStatus::Open
                }
            }
            None => IssueStatus::Open,
        };
        let issue = Issue {
            target,
            critique: first_text(iv.critique),
            suggestion: first_text(iv.suggestion),
            resolve_after: g.iri_objects(&id, iv.resolve_after).filter_map(Term::as_iri).cloned().collect(),
            status,
            id: id.clone(),
        };
        ledger.issues.insert(id, issue);
    }
    Ok(ledger)
}

/// Integrity defects: dangling and self references, dependency cycles, and
/// missing text fields.
pub fn check_issues(l: &IssueLedger) -> Vec<IssueDefect> {
    let mut out = Vec::new();
    let mut edges = BTreeSet::new();
    for (id, issue) in &l.issues {
        let short = id.local_name();
        if issue.target.is_none() {
            out.push(IssueDefect {
                kind: DefectKind::MissingTarget,
                issue: id.clone(),
                message: format!("issue {short} has no target"),
            });
        }
        if issue.critique.trim().is_empty() {
            out.push(IssueDefect {
                kind: DefectKind::EmptyCritique,
                issue: id.clone(),
                message: format!("issue {short} has an empty critique"),
            });
        }
        if issue.suggestion.trim().is_empty() {
            out.push(IssueDefect {
                kind: DefectKind::EmptySuggestion,
                issue: id.clone(),
                message: format!("issue {short} has an empty suggestion"),
            });
        }
        for dep in &issue.resolve_after {
            if dep == id {
                out.push(IssueDefect {
                    kind: DefectKind::SelfDependency,
                    issue: id.clone(),
                    message: format!("issue {short} is to be resolved after itself"),
                });
            } else if !l.issues.contains_key(dep) {
                out.push(IssueDefect {
                    kind: DefectKind::DanglingReference,
                    issue: id.clone(),
                    message: format!("issue {short} is to be resolved after unknown issue <{dep}>"),
                });
            } else {
                edges.insert((dep.clone(), id.clone()));
            }
        }
    }
    for cycle in find_cycles(&edges) {
        let names: Vec<&str> = cycle.iter().map(Iri::local_name).collect();
        out.push(IssueDefect {
            kind: DefectKind::Cycle,
            issue: cycle[0].clone(),
            message: format!("dependency cycle among {}", names.join(", ")),
        });
    }
    out.sort();
    out
}

/// Topological order of the ledger with ties broken by IRI. References to
/// unknown issues are ignored.
pub fn order_issues(l: &IssueLedger) -> Result<Vec<&Issue>, CycleError> {
    let mut indegree: BTreeMap<&Iri, usize> = l.issues.keys().map(|k| (k, 0)).collect();
    let mut successors: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for (id, issue) in &l.issues {
        for dep in issue.resolve_after.iter().filter(|d| l.issues.contains_key(*d)) {
            *indegree.get_mut(id).expect("known") += 1;
            successors.entry(dep).or_default().push(id);
        }
    }
    let mut ready: BTreeSet<&Iri> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut order = Vec::with_capacity(l.issues.len());
    while let Some(next) = ready.pop_first() {
        order.push(&l.issues[next]);
        for succ in successors.get(next).into_iter().flatten() {
            let d = indegree.get_mut(succ).expect("known");
            *d -= 1;
            if *d == 0 {
                ready.insert(succ);
            }
        }
    }
    if order.len() == l.issues.len() {
        return Ok(order);
    }
    Err(CycleError {
        cycle: find_one_cycle(l, &indegree),
    })
}

/// Follows unresolved dependencies from a remaining issue until one repeats.
fn find_one_cycle(l: &IssueLedger, indegree: &BTreeMap<&Iri, usize>) -> Vec<Iri> {
    let remaining: BTreeSet<&Iri> = indegree.iter().filter(|(_, d)| **d > 0).map(|(k, _)| *k).collect();
    let Some(start) = remaining.first() else {
        return Vec::new();
    };
    let mut path: Vec<&Iri> = vec![start];
    let mut seen: BTreeMap<&Iri, usize> = BTreeMap::from([(*start, 0)]);
    loop {
        let cur = *path.last().expect("non-empty");
        let next = l.issues[cur]
            .resolve_after
            .iter()
            .find(|d| remaining.contains(d))
            .expect("an issue left in Kahn's queue has an unresolved dependency");
        if let Some(&pos) = seen.get(next) {
            let mut cycle: Vec<Iri> = path[pos..].iter().map(|i| (*i).clone()).collect();
            cycle.reverse();
            return cycle;
        }
        seen.insert(next, path.len());
        path.push(next);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DraftConfig {
    pub namespace: String,
    pub min_severity: Severity,
    /// Suggestion text per rule id; `{focus}` is replaced by the focus IRI.
    pub templates: BTreeMap<String, String>,
}

impl Default for DraftConfig {
    fn default() -> Self {
        let templates = [
            ("KRL", "Add a foaf:isPrimaryTopicOf link from {focus} to its Wikipedia article."),
            ("SHAPE-CLASS-COMMENT", "Add an rdfs:comment describing {focus}."),
            ("SHAPE-PROPERTY-COMMENT", "Add an rdfs:comment describing {focus}."),
            ("SHAPE-CLASS-FOAF-LINK", "Add a foaf:isPrimaryTopicOf link from {focus} to its Wikipedia article."),
            ("SHAPE-PROPERTY-FOAF-LINK", "Add a foaf:isPrimaryTopicOf link from {focus} to its Wikipedia article."),
            ("SHAPE-METAMODELING", "Type {focus} and attach instances or subclasses, or remove the punning."),
            ("RBC-DISJOINT", "Remove one of the conflicting type or subclass assertions of {focus}."),
            ("TBOX-CENTRAL", "Move the class declaration of {focus} into the terminology module."),
        ]
        .into_iter()
        .map(|(k, t)| (k.to_owned(), t.to_owned()))
        .collect();
        DraftConfig {
            namespace: "http://softlang.org/fsl/issues#".to_owned(),
            min_severity: Severity::Error,
            templates,
        }
    }
}

/// Deterministic issue id for a `(rule id, focus)` pair.
pub fn draft_issue_id(namespace: &str, rule_id: &str, focus: &Iri) -> Iri {
    let mut h = Sha256::new();
    h.update(rule_id.as_bytes());
    h.update([0]);
    h.update(focus.as_str().as_bytes());
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Iri::from_static(&format!("{namespace}issue-{hex}"))
}

/// One draft issue per unsuppressed finding at or above the configured severity.
pub fn findings_to_issues(r: &ValidationReport, cfg: &DraftConfig) -> IssueLedger {
    IssueLedger::from_issues(r.unsuppressed().filter(|f| f.severity >= cfg.min_severity).map(|f| {
        let suggestion = cfg
            .templates
            .get(&f.rule_id)
            .map(|t| t.replace("{focus}", &format!("<{}>", f.focus)))
            .unwrap_or_else(|| format!("Revise <{}> to satisfy rule {}.", f.focus, f.rule_id));
        Issue::new(
            draft_issue_id(&cfg.namespace, &f.rule_id, &f.focus),
            IssueTarget::Iri(f.focus.clone()),
            &format!("[{}] {}", f.rule_id, f.message),
            &suggestion,
        )
    }))
}

/// Emits the ledger as Turtle using the configured issue vocabulary.
pub fn issues_to_turtle(l: &IssueLedger, v: &Vocabulary) -> Result<String, ConfigError> {
    let iv = v.issue_vocab()?;
    let iri = |i: &Iri| write_term(&Term::Iri(i.clone()));
    let lit = |s: &str| write_term(&Term::Literal(Literal::string(s)));
    let mut out = String::new();
    for issue in l.issues.values() {
        let mut lines = vec![format!("{} {} {}", iri(&issue.id), iri(&v.type_prop), iri(iv.class))];
        match &issue.target {
            Some(IssueTarget::Iri(t)) => lines.push(format!("    {} {}", iri(iv.target), iri(t))),
            Some(IssueTarget::Literal(t)) => lines.push(format!("    {} {}", iri(iv.target), lit(t))),
            None => {}
        }
        lines.push(format!("    {} {}", iri(iv.critique), lit(&issue.critique)));
        lines.push(format!("    {} {}", iri(iv.suggestion), lit(&issue.suggestion)));
        for dep in &issue.resolve_after {
            lines.push(format!("    {} {}", iri(iv.resolve_after), iri(dep)));
        }
        if let (Some(p), IssueStatus::Resolved) = (iv.status, issue.status) {
            lines.push(format!("    {} {}", iri(p), lit("resolved")));
        }
        out.push_str(&lines.join(" ;\n"));
        out.push_str(" .\n\n");
    }
    Ok(out)
}

pub fn issues_to_json(l: &IssueLedger) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        issues: Vec<&'a Issue>,
        #[serde(skip_serializing_if = "Option::is_none")]
        order: Option<&'a Vec<Iri>>,
    }
    let doc = Doc {
        issues: l.issues.values().collect(),
        order: l.order.as_ref(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable ledger") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_turtle;
    use crate::rules::{Finding, Verdict};

    fn i(n: &str) -> Iri {
        Iri::from_static(&format!("http://softlang.org/fsl/issues#{n}"))
    }

    fn ledger(edges: &[(&str, &[&str])]) -> IssueLedger {
        IssueLedger::from_issues(edges.iter().map(|(id, deps)| {
            let mut issue = Issue::new(i(id), IssueTarget::Iri(i("t")), "c", "s");
            for d in *deps {
                issue = issue.after(&i(d));
            }
            issue
        }))
    }

    fn ids(order: &[&Issue]) -> Vec<String> {
        order.iter().map(|x| x.id.local_name().to_owned()).collect()
    }

    #[test]
    fn ordering_tie_break_and_chain() {
        assert_eq!(ids(&order_issues(&ledger(&[("B", &[]), ("A", &[])])).unwrap()), ["A", "B"]);
        let chain = ledger(&[("C", &["B"]), ("B", &["A"]), ("A", &[])]);
        assert_eq!(ids(&order_issues(&chain).unwrap()), ["A", "B", "C"]);
    }

    #[test]
    fn cycle_is_reported() {
        let l = ledger(&[("A", &["B"]), ("B", &["A"]), ("C", &[])]);
        let err = order_issues(&l).unwrap_err();
        let names: BTreeSet<&str> = err.cycle.iter().map(Iri::local_name).collect();
        assert_eq!(names, BTreeSet::from(["A", "B"]));
        let defects = check_issues(&l);
        assert_eq!(defects.len(), 1);
        assert_eq!(defects[0].kind, DefectKind::Cycle);
        assert!(defects[0].message.contains("A, B"));
    }

    #[test]
    fn defects() {
        let mut l = ledger(&[("A", &["A", "Z"])]);
        l.issues.get_mut(&i("A")).unwrap().critique.clear();
        let kinds: Vec<DefectKind> = check_issues(&l).into_iter().map(|d| d.kind).collect();
        assert_eq!(kinds, [DefectKind::DanglingReference, DefectKind::SelfDependency, DefectKind::EmptyCritique]);
        assert!(order_issues(&l).is_err());
    }

    #[test]
    fn parse_and_round_trip() {
        let doc = "@prefix t: <http://softlang.org/fsl/tbox#> .
            @prefix i: <http://softlang.org/fsl/issues#> .
            i:rename a t:Issue ; t:target t:Grammar ; t:critique \"bad name\" ; t:suggestion \"rename\" .
            i:move a t:Issue ; t:target \"namespace\" ; t:critique \"misplaced\" ; t:suggestion \"move\" ;
                t:resolveAfter i:rename ; t:status \"resolved\" .";
        let v = Vocabulary::default();
        let l = parse_issues(&parse_turtle(doc.as_bytes(), None).unwrap(), &v).unwrap();
        assert_eq!(l.len(), 2);
        let mv = l.get(&i("move")).unwrap();
        assert_eq!(mv.resolve_after, BTreeSet::from([i("rename")]));
        assert_eq!(mv.status, IssueStatus::Resolved);
        assert_eq!(mv.target, Some(IssueTarget::Literal("namespace".into())));

        let ttl = issues_to_turtle(&l, &v).unwrap();
        let again = parse_issues(&parse_turtle(ttl.as_bytes(), None).unwrap(), &v).unwrap();
        assert_eq!(again, l);
    }

    #[test]
    fn missing_vocabulary_is_an_error() {
        let v = Vocabulary {
            issue_class: None,
            ..Vocabulary::default()
        };
        assert!(parse_issues(&Graph::default(), &v).is_err());
    }

    #[test]
    fn drafts_from_findings() {
        let f = |rule: &str, focus: &str, sev| Finding {
            rule_id: rule.into(),
            focus: i(focus),
            message: "m".into(),
            severity: sev,
            module: None,
            suppressed: false,
        };
        let report = ValidationReport {
            findings: vec![
                f("KRL", "x", Severity::Error),
                f("KRL", "y", Severity::Error),
                f("DIE", "x", Severity::Warning),
            ],
            counts: BTreeMap::new(),
            suppressed: 0,
            stale_exceptions: Vec::new(),
            threshold: Severity::Error,
            verdict: Verdict::Fail,
            warnings: Vec::new(),
        };
        let l = findings_to_issues(&report, &DraftConfig::default());
        assert_eq!(l.len(), 2);
        assert!(l.issues.values().all(|x| x.resolve_after.is_empty()));
        let again = findings_to_issues(&report, &DraftConfig::default());
        assert_eq!(l, again);
        assert_ne!(
            draft_issue_id("http://x/#", "KRL", &i("x")),
            draft_issue_id("http://x/#", "DIE", &i("x"))
        );
    }
}
