//! Opt-in reachability check of knowledge-resource links.

use std::collections::BTreeMap;
use std::time::Duration;

use ontocheck_core::rules::{Context, Finding, Severity};
use ontocheck_core::{Iri, Term};

pub const RULE_ID: &str = "KRL-ONLINE";
const TIMEOUT: Duration = Duration::from_secs(10);

/// HEAD-requests every http(s) link of an in-scope entity. Links answering
/// with a client or server error become warning findings; network failures
/// become plain warnings.
pub fn check_links(cx: &Context) -> (Vec<Finding>, Vec<String>) {
    let mut links: BTreeMap<String, Vec<Iri>> = BTreeMap::new();
    for p in cx.vocab.link_props() {
        for t in cx.graph.with_predicate(p) {
            let Some(s) = t.subject.as_iri() else { continue };
            if !cx.vocab.in_scope(s) {
                continue;
            }
            let url = match &t.object {
                Term::Iri(i) => i.to_string(),
                Term::Literal(l) => l.lexical().to_owned(),
                Term::Blank(_) => continue,
            };
            if url.starts_with("http://") || url.starts_with("https://") {
                links.entry(url).or_default().push(s.clone());
            }
        }
    }
    let mut findings = Vec::new();
    let mut warnings = Vec::new();
    if links.is_empty() {
        return (findings, warnings);
    }
    let client = match reqwest::blocking::Client::builder()
        .timeout(TIMEOUT)
        .user_agent(concat!("ontocheck/", env!("CARGO_PKG_VERSION")))
        .build()
    {
        Ok(c) => c,
        Err(e) => {
            warnings.push(format!("online link check unavailable: {e}"));
            return (findings, warnings);
        }
    };
    for (url, subjects) in links {
        match client.head(&url).send() {
            Ok(resp) if resp.status().is_client_error() || resp.status().is_server_error() => {
                for s in subjects {
                    findings.push(Finding {
                        rule_id: RULE_ID.to_owned(),
                        focus: s.clone(),
                        message: format!("{} links to {url}, which answers {}", s.local_name(), resp.status()),
                        severity: Severity::Warning,
                        module: None,
                        suppressed: false,
                    });
                }
            }
            Ok(_) => {}
            Err(e) => warnings.push(format!("could not check {url}: {e}")),
        }
    }
    (findings, warnings)
}
