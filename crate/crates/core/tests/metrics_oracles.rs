mod common;

use std::collections::BTreeSet;

use ontocheck_core::metrics::{
    report_concepts, report_constraints, report_entity_types, report_spaces, CONSTRAINT_PREDICATES, CONSTRAINT_TYPES,
};
use ontocheck_core::rules::Context;
use ontocheck_core::{compute_tables, serialize_table, Execution, MetricsTable, TableFormat, TableKind, Vocabulary};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{abox, tbox, Obj, Taxo, RDF_TYPE, SUBCLASS};

const OWL: &str = "http://www.w3.org/2002/07/owl#";
const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";

fn push(t: &mut Taxo, s: &str, p: &str, o: &str) {
    t.triples.push((s.to_owned(), p.to_owned(), Obj::Iri(o.to_owned())));
}

/// Spaces, languages, tools, artifacts and concepts with random links.
fn world(seed: u64) -> Taxo {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = Taxo { triples: Vec::new() };
    push(&mut t, &tbox("ProgrammingLanguage"), SUBCLASS, &tbox("Language"));
    push(&mut t, &tbox("Compiler"), SUBCLASS, &tbox("Tool"));
    let kinds = ["Language", "ProgrammingLanguage", "Tool", "Compiler", "Artifact"];
    let mut entities = Vec::new();
    for i in 0..rng.random_range(0..20) {
        let x = abox(&format!("e{i}"));
        push(&mut t, &x, RDF_TYPE, &tbox(kinds[rng.random_range(0..kinds.len())]));
        entities.push(x);
    }
    let mut spaces = Vec::new();
    for i in 0..rng.random_range(0..6) {
        let s = abox(&format!("space{i}"));
        push(&mut t, &s, RDF_TYPE, &tbox("TechnologicalSpace"));
        spaces.push(s);
    }
    if rng.random_bool(0.5) {
        push(&mut t, &tbox("Modelware"), SUBCLASS, &tbox("TechnologicalSpace"));
    }
    if !spaces.is_empty() {
        for e in &entities {
            for _ in 0..rng.random_range(0..3) {
                let s = &spaces[rng.random_range(0..spaces.len())];
                if rng.random_bool(0.5) {
                    push(&mut t, e, &tbox("hasSpace"), s);
                } else {
                    push(&mut t, s, &tbox("hasSpace"), e);
                }
            }
        }
    }
    let mut concepts = Vec::new();
    for i in 0..rng.random_range(0..8) {
        let c = tbox(&format!("Concept{i}"));
        push(&mut t, &c, SUBCLASS, &tbox("LanguageConcept"));
        concepts.push(c);
    }
    for i in 0..rng.random_range(0..8) {
        let c = abox(&format!("concept{i}"));
        let ty = if concepts.is_empty() || rng.random_bool(0.4) {
            tbox("LanguageConcept")
        } else {
            concepts[rng.random_range(0..concepts.len())].clone()
        };
        push(&mut t, &c, RDF_TYPE, &ty);
        concepts.push(c);
    }
    let preds = ["uses", "hasPart", "extends", "relatesTo"];
    if !concepts.is_empty() {
        for _ in 0..rng.random_range(0..12) {
            let c = concepts[rng.random_range(0..concepts.len())].clone();
            let other = if !entities.is_empty() && rng.random_bool(0.6) {
                entities[rng.random_range(0..entities.len())].clone()
            } else {
                concepts[rng.random_range(0..concepts.len())].clone()
            };
            let p = tbox(preds[rng.random_range(0..preds.len())]);
            if rng.random_bool(0.5) {
                push(&mut t, &c, &p, &other);
            } else {
                push(&mut t, &other, &p, &c);
            }
        }
    }
    t.triples.sort();
    t.triples.dedup();
    t
}

fn kind(t: &Taxo, root: &str) -> BTreeSet<String> {
    let r = tbox(root);
    let mut out = t.descendants(&r);
    out.extend(t.transitive_instances(&r));
    out
}

fn space_members(t: &Taxo, s: &str) -> BTreeSet<String> {
    let hs = tbox("hasSpace");
    let mut out = BTreeSet::new();
    for (a, p, o) in &t.triples {
        if let Obj::Iri(o) = o {
            if *p == hs && o == s {
                out.insert(a.clone());
            }
            if *p == hs && a == s {
                out.insert(o.clone());
            }
        }
    }
    out.remove(s);
    out
}

fn is_assertion(p: &str) -> bool {
    p != RDF_TYPE && p != SUBCLASS
}

fn neighbors(t: &Taxo, x: &str) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for (s, p, o) in &t.triples {
        let Obj::Iri(o) = o else { continue };
        if !is_assertion(p) || s == o {
            continue;
        }
        if s == x {
            out.insert((p.clone(), o.clone()));
        }
        if o == x {
            out.insert((p.clone(), s.clone()));
        }
    }
    out
}

fn check<S: AsRef<str>>(table: &MetricsTable, rows: &[(S, usize)]) -> Result<(), TestCaseError> {
    prop_assert_eq!(table.rows.len(), rows.len());
    for (m, n) in rows {
        let m = m.as_ref();
        prop_assert_eq!(table.int(m), Some(*n as u64), "{}", m);
    }
    Ok(())
}

fn rfc4180(text: &str) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut row = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if quoted {
            match c {
                '"' if chars.peek() == Some(&'"') => {
                    chars.next();
                    field.push('"');
                }
                '"' => quoted = false,
                c => field.push(c),
            }
            continue;
        }
        match c {
            '"' => quoted = true,
            ',' => row.push(std::mem::take(&mut field)),
            '\r' if chars.peek() == Some(&'\n') => {
                chars.next();
                row.push(std::mem::take(&mut field));
                rows.push(std::mem::take(&mut row));
            }
            c => field.push(c),
        }
    }
    assert!(field.is_empty() && row.is_empty(), "unterminated record");
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entity_table_matches_brute_force(seed in any::<u64>()) {
        let t = Taxo::random(seed, 25, 50);
        let g = t.graph();
        let v = Vocabulary::default();
        let table = report_entity_types(&Context::new(&g, &v));
        let mut roots: Vec<&str> = vec!["Artifact", "ConceptualEntity", "FormalEntity", "Language", "SoftwareEngineeringActivity", "Tool"];
        roots.sort();
        prop_assert_eq!(table.rows.len(), roots.len());
        for (row, root) in table.rows.iter().zip(roots) {
            let r = tbox(root);
            let inst = t.transitive_instances(&r).into_iter().filter(|x| Taxo::in_scope(x)).count();
            let subs = t.descendants(&r).into_iter().filter(|x| Taxo::in_scope(x)).count();
            let got: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            prop_assert_eq!(got, vec![root.to_owned(), (inst + subs).to_string(), inst.to_string(), subs.to_string()]);
        }
    }

    #[test]
    fn space_table_matches_brute_force(seed in any::<u64>()) {
        let t = world(seed);
        let g = t.graph();
        let v = Vocabulary::default();
        let table = report_spaces(&Context::new(&g, &v));
        let root = tbox("TechnologicalSpace");
        let spaces = t.transitive_instances(&root);
        let members: Vec<BTreeSet<String>> = spaces.iter().map(|s| space_members(&t, s)).collect();
        let mut rows = vec![("instances".to_owned(), spaces.len()), ("subclasses".to_owned(), t.descendants(&root).len())];
        let names = [("Language", "languages"), ("Tool", "tools"), ("Artifact", "artifacts")];
        for (k, name) in names {
            let ks = kind(&t, k);
            let n = members.iter().filter(|m| m.iter().any(|x| ks.contains(x))).count();
            rows.push((format!("spaces_with_{name}"), n));
        }
        for (k, name) in names {
            let ks = kind(&t, k);
            let n = ks.iter().filter(|x| members.iter().any(|m| m.contains(*x))).count();
            rows.push((format!("{name}_with_spaces"), n));
        }
        check(&table, &rows)?;
    }

    #[test]
    fn concept_table_matches_brute_force(seed in any::<u64>()) {
        let t = world(seed);
        let g = t.graph();
        let v = Vocabulary::default();
        let table = report_concepts(&Context::new(&g, &v));
        let root = tbox("LanguageConcept");
        let inst = t.transitive_instances(&root);
        let subs = t.descendants(&root);
        let concepts: BTreeSet<String> = inst.union(&subs).cloned().collect();
        let used = |set: &BTreeSet<String>| set.iter().filter(|c| !neighbors(&t, c).is_empty()).count();
        let mut props = BTreeSet::new();
        let mut linked = BTreeSet::new();
        for c in &concepts {
            for (p, o) in neighbors(&t, c) {
                props.insert(p);
                linked.insert(o);
            }
        }
        let langs = kind(&t, "Language");
        let prog = kind(&t, "ProgrammingLanguage");
        let software: BTreeSet<&String> = linked.iter().filter(|x| langs.contains(*x)).collect();
        let programming = software.iter().filter(|x| prog.contains(**x)).count();
        check(&table, &[
            ("concepts", concepts.len()),
            ("instances", inst.len()),
            ("subclasses", subs.len()),
            ("used_instances", used(&inst)),
            ("used_subclasses", used(&subs)),
            ("properties", props.len()),
            ("software_languages", software.len()),
            ("programming_languages", programming),
        ])?;
    }

    #[test]
    fn constraint_table_counts_every_use(uses in proptest::collection::vec((0usize..26, 0usize..5), 0..60)) {
        let mut t = Taxo { triples: Vec::new() };
        let n_pred = CONSTRAINT_PREDICATES.len();
        for (k, s) in &uses {
            let s = abox(&format!("s{s}"));
            if *k < n_pred {
                let (ns, name) = CONSTRAINT_PREDICATES[*k];
                t.triples.push((s.clone(), format!("{ns}{name}"), Obj::Iri(abox(&format!("o{k}")))));
            } else {
                let ty = CONSTRAINT_TYPES[(*k - n_pred) % CONSTRAINT_TYPES.len()];
                t.triples.push((s, RDF_TYPE.to_owned(), Obj::Iri(format!("{OWL}{ty}"))));
            }
        }
        t.triples.sort();
        t.triples.dedup();
        let table = report_constraints(&t.graph());
        prop_assert_eq!(table.rows.len(), CONSTRAINT_PREDICATES.len() + CONSTRAINT_TYPES.len());
        for (ns, name) in CONSTRAINT_PREDICATES {
            let p = format!("{ns}{name}");
            let n = t.triples.iter().filter(|(_, q, _)| *q == p).count();
            let key = if *ns == OWL { format!("owl:{name}") } else { format!("rdfs:{name}") };
            prop_assert_eq!(table.int(&key), Some(n as u64), "{}", key);
        }
        for name in CONSTRAINT_TYPES {
            let o = Obj::Iri(format!("{OWL}{name}"));
            let n = t.triples.iter().filter(|(_, q, x)| q == RDF_TYPE && *x == o).count();
            prop_assert_eq!(table.int(&format!("owl:{name}")), Some(n as u64));
        }
    }

    #[test]
    fn annotations_outside_scope_leave_tables_alone(seed in any::<u64>(), extra in 1usize..20) {
        let t = world(seed);
        let v = Vocabulary::default();
        let kinds = [TableKind::Entities, TableKind::Spaces, TableKind::Concepts, TableKind::Activities, TableKind::Constraints];
        let before = {
            let g = t.graph();
            compute_tables(&kinds, &Context::new(&g, &v), Execution::Sequential)
        };
        let mut more = t.clone();
        let subjects: Vec<String> = t.triples.iter().map(|(s, _, _)| s.clone()).collect();
        for i in 0..extra {
            let s = subjects.get(i % subjects.len().max(1)).cloned().unwrap_or_else(|| abox("lonely"));
            more.triples.push((s.clone(), format!("{RDFS}label"), Obj::Lit(format!("label {i}"))));
            more.triples.push((s, format!("{RDFS}comment"), Obj::Lit(format!("note {i}"))));
            more.triples.push((format!("http://unrelated.example/x{i}"), format!("http://unrelated.example/p{i}"), Obj::Lit("v".into())));
        }
        let g = more.graph();
        let after = compute_tables(&kinds, &Context::new(&g, &v), Execution::Sequential);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn sequential_and_parallel_tables_agree(seed in any::<u64>()) {
        let t = world(seed);
        let g = t.graph();
        let v = Vocabulary::default();
        let cx = Context::new(&g, &v);
        prop_assert_eq!(
            compute_tables(&TableKind::ALL, &cx, Execution::Sequential),
            compute_tables(&TableKind::ALL, &cx, Execution::Parallel)
        );
    }

    #[test]
    fn csv_output_reads_back(seed in any::<u64>()) {
        let t = world(seed);
        let g = t.graph();
        let v = Vocabulary::default();
        let cx = Context::new(&g, &v);
        for table in compute_tables(&TableKind::ALL, &cx, Execution::Sequential) {
            let text = String::from_utf8(serialize_table(&table, TableFormat::Csv)).unwrap();
            let rows = rfc4180(&text);
            prop_assert_eq!(&rows[0], &table.columns);
            prop_assert_eq!(rows.len(), table.rows.len() + 1);
            for (got, want) in rows[1..].iter().zip(&table.rows) {
                let want: Vec<String> = want.iter().map(|c| c.to_string()).collect();
                prop_assert_eq!(got, &want);
            }
            let json: serde_json::Value = serde_json::from_slice(&serialize_table(&table, TableFormat::Json)).unwrap();
            prop_assert_eq!(json["rows"].as_array().unwrap().len(), table.rows.len());
        }
    }
}

#[test]
fn tricky_cells_survive_csv() {
    let mut t = MetricsTable::new("t", &["a", "b"]);
    t.push(vec!["x, \"quoted\"".into(), 3usize.into()]);
    t.push(vec!["line\nbreak".into(), 0usize.into()]);
    let text = String::from_utf8(serialize_table(&t, TableFormat::Csv)).unwrap();
    assert_eq!(
        rfc4180(&text),
        vec![vec!["a", "b"], vec!["x, \"quoted\"", "3"], vec!["line\nbreak", "0"]]
    );
}
