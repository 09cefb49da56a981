#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const TBOX: &str = "http://softlang.org/fsl/tbox#";
pub const ABOX: &str = "http://softlang.org/fsl/abox#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const SUBCLASS: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
pub const TOPIC: &str = "http://xmlns.com/foaf/0.1/isPrimaryTopicOf";
pub const PERSON: &str = "http://xmlns.com/foaf/0.1/Person";

/// Object position of a raw triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Obj {
    Iri(String),
    Lit(String),
}

pub type Raw = (String, String, Obj);

/// A randomly generated taxonomy kept as plain triples.
#[derive(Debug, Clone)]
pub struct Taxo {
    pub triples: Vec<Raw>,
}

pub fn tbox(n: &str) -> String {
    format!("{TBOX}{n}")
}

pub fn abox(n: &str) -> String {
    format!("{ABOX}{n}")
}

impl Taxo {
    /// Up to `max_classes` classes below the entity roots, up to
    /// `max_individuals` individuals with random types, areas and links.
    pub fn random(seed: u64, max_classes: usize, max_individuals: usize) -> Taxo {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut t = Vec::new();
        let roots = ["Tool", "Language", "Artifact"];
        let n_classes = rng.random_range(1..=max_classes);
        let mut classes: Vec<String> = roots.iter().map(|r| tbox(r)).collect();
        for i in 0..n_classes {
            let c = tbox(&format!("C{i}"));
            let supers = rng.random_range(0..=2usize);
            for _ in 0..supers {
                let s = classes[rng.random_range(0..classes.len())].clone();
                t.push((c.clone(), SUBCLASS.to_owned(), Obj::Iri(s)));
            }
            if rng.random_bool(0.6) {
                t.push((c.clone(), RDF_TYPE.to_owned(), Obj::Iri(OWL_CLASS.to_owned())));
            }
            classes.push(c);
        }
        // punning: a class typed by another class
        for c in classes.iter().skip(roots.len()) {
            if rng.random_bool(0.1) {
                let k = classes[rng.random_range(0..classes.len())].clone();
                if &k != c {
                    t.push((c.clone(), RDF_TYPE.to_owned(), Obj::Iri(k)));
                }
            }
        }
        let n_inds = rng.random_range(0..=max_individuals);
        for i in 0..n_inds {
            let x = abox(&format!("x{i}"));
            let types = rng.random_range(0..=2usize);
            for _ in 0..types {
                let ty = if rng.random_bool(0.1) {
                    PERSON.to_owned()
                } else {
                    classes[rng.random_range(0..classes.len())].clone()
                };
                t.push((x.clone(), RDF_TYPE.to_owned(), Obj::Iri(ty)));
            }
            for _ in 0..rng.random_range(0..=4usize) {
                let a = abox(&format!("Area{}", rng.random_range(0..5)));
                t.push((x.clone(), tbox("hasArea"), Obj::Iri(a)));
            }
            if rng.random_bool(0.7) {
                t.push((x.clone(), COMMENT.to_owned(), Obj::Lit(format!("x{i}"))));
            }
            if rng.random_bool(0.7) {
                let url = if rng.random_bool(0.8) {
                    format!("https://en.wikipedia.org/wiki/X{i}")
                } else {
                    format!("https://example.com/X{i}")
                };
                t.push((x.clone(), TOPIC.to_owned(), Obj::Iri(url)));
            }
        }
        t.sort();
        t.dedup();
        Taxo { triples: t }
    }

    pub fn turtle(&self) -> String {
        let mut out = String::new();
        for (s, p, o) in &self.triples {
            let o = match o {
                Obj::Iri(i) => format!("<{i}>"),
                Obj::Lit(l) => format!("\"{l}\""),
            };
            out.push_str(&format!("<{s}> <{p}> {o} .\n"));
        }
        out
    }

    pub fn graph(&self) -> ontocheck_core::Graph {
        ontocheck_core::parse_turtle(self.turtle().as_bytes(), None).expect("generated Turtle parses")
    }

    fn with(&self, p: &str) -> impl Iterator<Item = (&String, &String)> {
        let p = p.to_owned();
        self.triples.iter().filter_map(move |(s, q, o)| match o {
            Obj::Iri(o) if *q == p => Some((s, o)),
            _ => None,
        })
    }

    fn is_decl_type(o: &str) -> bool {
        o.starts_with("http://www.w3.org/2002/07/owl#")
            || o.starts_with("http://www.w3.org/2000/01/rdf-schema#")
            || o.starts_with("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
    }

    pub fn classes(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (s, o) in self.with(RDF_TYPE) {
            if o == OWL_CLASS {
                out.insert(s.clone());
            } else if !Self::is_decl_type(o) {
                out.insert(o.clone());
            }
        }
        for (_, o) in self.with(SUBCLASS) {
            out.insert(o.clone());
        }
        out
    }

    pub fn individuals(&self) -> BTreeSet<String> {
        self.with(RDF_TYPE)
            .filter(|(_, o)| !Self::is_decl_type(o))
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn direct_instances(&self, c: &str) -> BTreeSet<String> {
        self.with(RDF_TYPE).filter(|(_, o)| *o == c).map(|(s, _)| s.clone()).collect()
    }

    pub fn direct_subclasses(&self, c: &str) -> BTreeSet<String> {
        self.with(SUBCLASS)
            .filter(|(s, o)| *o == c && *s != c)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn types_of(&self, x: &str) -> BTreeSet<String> {
        self.with(RDF_TYPE)
            .filter(|(s, o)| *s == x && !Self::is_decl_type(o))
            .map(|(_, o)| o.clone())
            .collect()
    }

    /// Strict descendants of `c` by repeated scans over all edges.
    pub fn descendants(&self, c: &str) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = BTreeSet::new();
        loop {
            let before = out.len();
            for (s, o) in self.with(SUBCLASS) {
                if s != o && (o == c || out.contains(o)) {
                    out.insert(s.clone());
                }
            }
            if out.len() == before {
                break;
            }
        }
        out.remove(c);
        out
    }

    pub fn transitive_instances(&self, c: &str) -> BTreeSet<String> {
        let mut classes = self.descendants(c);
        classes.insert(c.to_owned());
        self.with(RDF_TYPE)
            .filter(|(_, o)| classes.contains(*o))
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn area_count(&self, x: &str) -> usize {
        self.with(&tbox("hasArea")).filter(|(s, _)| *s == x).map(|(_, o)| o).collect::<BTreeSet<_>>().len()
    }

    pub fn in_scope(x: &str) -> bool {
        !x.starts_with("http://xmlns.com/foaf/0.1/")
            && !x.starts_with("http://www.w3.org/")
    }
}

/// Brute-force counterparts of the default counting rules, keyed by focus.
pub struct Expected {
    pub die: BTreeSet<String>,
    pub die_empty: BTreeSet<String>,
    pub dse: BTreeSet<String>,
    pub icd: BTreeSet<String>,
    pub sar: BTreeSet<String>,
}

pub fn expected(t: &Taxo) -> Expected {
    let classes = t.classes();
    let mut e = Expected {
        die: BTreeSet::new(),
        die_empty: BTreeSet::new(),
        dse: BTreeSet::new(),
        icd: BTreeSet::new(),
        sar: BTreeSet::new(),
    };
    for c in classes.iter().filter(|c| Taxo::in_scope(c)) {
        let n = t.direct_instances(c).len();
        let subs = t.direct_subclasses(c).len();
        if n == 1 {
            e.die.insert(c.clone());
        }
        if n == 0 && subs == 0 {
            e.die_empty.insert(c.clone());
        }
        if subs == 1 {
            e.dse.insert(c.clone());
        }
    }
    let mut root_members = BTreeSet::new();
    for r in ["Tool", "Language", "Artifact", "ConceptualEntity", "FormalEntity", "SoftwareEngineeringActivity"] {
        let r = tbox(r);
        root_members.extend(t.descendants(&r));
        root_members.extend(t.transitive_instances(&r));
    }
    for x in t.individuals() {
        if !Taxo::in_scope(&x) || classes.contains(&x) {
            continue;
        }
        if !t.types_of(&x).iter().any(|ty| Taxo::in_scope(ty)) {
            e.icd.insert(x.clone());
        }
        let a = t.area_count(&x);
        if root_members.contains(&x) && !(1..=3).contains(&a) {
            e.sar.insert(x.clone());
        }
    }
    e
}

/// Counts of findings by rule id, for compact assertions.
pub fn by_rule(findings: &[ontocheck_core::Finding]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in findings {
        out.entry(f.rule_id.clone()).or_default().insert(f.focus.to_string());
    }
    out
}
