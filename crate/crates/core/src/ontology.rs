//! Turns the labelled cluster tree into a concept graph with unnamed
//! subsumption edges, and writes it as JSON, DOT or Turtle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cluster::ClusterNode;
use crate::error::{Error, Result};

pub const RELATION: &str = "unnamed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptKind {
    Concept,
    Outliers,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Concept {
    pub id: String,
    pub label: String,
    pub kind: ConceptKind,
    /// Cluster node this concept came from.
    pub node: String,
    pub level: usize,
    pub member_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub parent: String,
    pub child: String,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermNode {
    pub term: String,
    pub concept: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyGraph {
    /// Pre-order over the cluster tree.
    pub concepts: Vec<Concept>,
    pub edges: Vec<Edge>,
    /// Sorted by term.
    pub terms: Vec<TermNode>,
}

fn concept_id(kind: ConceptKind, members: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(match kind {
        ConceptKind::Concept => b"concept".as_slice(),
        ConceptKind::Outliers => b"outliers".as_slice(),
    });
    for m in members {
        h.update([0u8]);
        h.update(m.as_bytes());
    }
    format!("c{}", &hex::encode(h.finalize())[..12])
}

pub fn assemble_ontology(root: &ClusterNode) -> Result<OntologyGraph> {
    if root.members.is_empty() {
        return Err(Error::EmptyInput("cluster tree has no members"));
    }
    let mut g = OntologyGraph::default();
    let mut unnamed = 0;
    add_node(&mut g, root, None, 0, &mut unnamed);
    g.terms.sort();
    g.validate()?;
    Ok(g)
}

fn add_node(g: &mut OntologyGraph, node: &ClusterNode, parent: Option<&str>, level: usize, unnamed: &mut usize) {
    let id = concept_id(ConceptKind::Concept, &node.members);
    let label = node.medoid.clone().unwrap_or_else(|| {
        *unnamed += 1;
        format!("concept-{unnamed}")
    });
    g.concepts.push(Concept {
        id: id.clone(),
        label,
        kind: ConceptKind::Concept,
        node: node.id.clone(),
        level,
        member_terms: node.members.clone(),
    });
    if let Some(p) = parent {
        g.edges.push(Edge {
            parent: p.to_string(),
            child: id.clone(),
            relation: RELATION.into(),
        });
    }
    if node.children.is_empty() {
        attach(g, &id, &node.members);
    }
    for c in &node.children {
        add_node(g, c, Some(&id), level + 1, unnamed);
    }
    if !node.outliers.is_empty() {
        let oid = concept_id(ConceptKind::Outliers, &node.outliers);
        g.concepts.push(Concept {
            id: oid.clone(),
            label: format!("outliers-of-{id}"),
            kind: ConceptKind::Outliers,
            node: node.id.clone(),
            level: level + 1,
            member_terms: node.outliers.clone(),
        });
        g.edges.push(Edge {
            parent: id.clone(),
            child: oid.clone(),
            relation: RELATION.into(),
        });
        attach(g, &oid, &node.outliers);
    }
}

fn attach(g: &mut OntologyGraph, concept: &str, terms: &[String]) {
    g.terms.extend(terms.iter().map(|t| TermNode {
        term: t.clone(),
        concept: concept.to_string(),
    }));
}

impl OntologyGraph {
    pub fn roots(&self) -> Vec<&Concept> {
        let children: BTreeSet<&str> = self.edges.iter().map(|e| e.child.as_str()).collect();
        self.concepts.iter().filter(|c| !children.contains(c.id.as_str())).collect()
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.iter().find(|c| c.id == id)
    }

    pub fn children_of(&self, id: &str) -> Vec<&Concept> {
        self.edges
            .iter()
            .filter(|e| e.parent == id)
            .filter_map(|e| self.concept(&e.child))
            .collect()
    }

    /// Checks ids, the forest shape and that every term hangs off exactly
    /// one childless concept.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut ids = BTreeSet::new();
        for c in &self.concepts {
            if !ids.insert(c.id.as_str()) {
                problems.push(format!("duplicate concept id {}", c.id));
            }
            if c.member_terms.is_empty() {
                problems.push(format!("concept {} has no members", c.id));
            }
        }
        let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
        for e in &self.edges {
            for end in [&e.parent, &e.child] {
                if !ids.contains(end.as_str()) {
                    problems.push(format!("edge endpoint {end} is not a concept"));
                }
            }
            if parent_of.insert(&e.child, &e.parent).is_some() {
                problems.push(format!("concept {} has two parents", e.child));
            }
        }
        for start in parent_of.keys() {
            let mut cur = *start;
            let mut steps = 0;
            while let Some(p) = parent_of.get(cur) {
                cur = p;
                steps += 1;
                if steps > self.concepts.len() {
                    problems.push(format!("cycle through {start}"));
                    break;
                }
            }
        }
        let parents: BTreeSet<&str> = self.edges.iter().map(|e| e.parent.as_str()).collect();
        let mut seen = BTreeSet::new();
        for t in &self.terms {
            if !seen.insert(t.term.as_str()) {
                problems.push(format!("term `{}` attached twice", t.term));
            }
            match self.concept(&t.concept) {
                None => problems.push(format!("term `{}` points at unknown concept {}", t.term, t.concept)),
                Some(c) if parents.contains(c.id.as_str()) => {
                    problems.push(format!("term `{}` attached to inner concept {}", t.term, c.id))
                }
                Some(_) => {}
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

pub fn export_json(g: &OntologyGraph) -> String {
    let mut s = serde_json::to_string_pretty(g).expect("graph serializes");
    s.push('\n');
    s
}

pub fn import_json(text: &str, source_name: &str) -> Result<OntologyGraph> {
    let g: OntologyGraph = serde_json::from_str(text).map_err(|e| Error::json(source_name, e))?;
    g.validate()?;
    Ok(g)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Concepts are boxes, terms plain text; subsumption edges point from
/// child to parent.
pub fn export_dot(g: &OntologyGraph) -> String {
    let mut out = String::from("digraph ontology {\n  rankdir=BT;\n");
    for c in &g.concepts {
        let style = match c.kind {
            ConceptKind::Concept => "box",
            ConceptKind::Outliers => "box, style=dashed",
        };
        let _ = writeln!(out, "  {} [label={}, shape={style}];", quote(&c.id), quote(&c.label));
    }
    for t in &g.terms {
        let _ = writeln!(out, "  {} [label={}, shape=plaintext];", quote(&format!("term:{}", t.term)), quote(&t.term));
    }
    for e in &g.edges {
        let _ = writeln!(out, "  {} -> {} [label={}];", quote(&e.child), quote(&e.parent), quote(&e.relation));
    }
    for t in &g.terms {
        let _ = writeln!(out, "  {} -> {} [style=dotted, arrowhead=none];", quote(&format!("term:{}", t.term)), quote(&t.concept));
    }
    out.push_str("}\n");
    out
}

/// Escapes everything outside `[A-Za-z0-9]` as `_XX` so local names stay
/// unique.
fn local_name(term: &str) -> String {
    let mut out = String::from("term_");
    for b in term.bytes() {
        if b.is_ascii_alphanumeric() {
            out.push(b as char);
        } else {
            let _ = write!(out, "_{b:02X}");
        }
    }
    out
}

/// Concepts become OWL classes linked by `rdfs:subClassOf`; terms become
/// labelled individuals of their concept.
pub fn export_turtle(g: &OntologyGraph) -> String {
    let mut out = String::new();
    out.push_str("@prefix ex: <http://example.org/ontoforge#> .\n");
    out.push_str("@prefix owl: <http://www.w3.org/2002/07/owl#> .\n");
    out.push_str("@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\n");
    let parent_of: BTreeMap<&str, &str> = g.edges.iter().map(|e| (e.child.as_str(), e.parent.as_str())).collect();
    for c in &g.concepts {
        let _ = write!(out, "ex:{} a owl:Class ;\n    rdfs:label {}", c.id, quote(&c.label));
        if let Some(p) = parent_of.get(c.id.as_str()) {
            let _ = write!(out, " ;\n    rdfs:subClassOf ex:{p}");
        }
        out.push_str(" .\n");
    }
    out.push('\n');
    for t in &g.terms {
        let _ = writeln!(out, "ex:{} a ex:{} ;\n    rdfs:label {} .", local_name(&t.term), t.concept, quote(&t.term));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::NodeKind;

    fn leaf(id: &str, members: &[&str]) -> ClusterNode {
        ClusterNode {
            id: id.into(),
            kind: NodeKind::Leaf,
            medoid: members.first().map(|m| m.to_string()),
            members: members.iter().map(|m| m.to_string()).collect(),
            outliers: vec![],
            children: vec![],
        }
    }

    fn internal(id: &str, children: Vec<ClusterNode>, outliers: &[&str]) -> ClusterNode {
        let mut members: Vec<String> = children.iter().flat_map(|c| c.members.clone()).collect();
        members.extend(outliers.iter().map(|o| o.to_string()));
        members.sort();
        ClusterNode {
            id: id.into(),
            kind: NodeKind::Internal,
            medoid: Some(members[0].clone()),
            members,
            outliers: outliers.iter().map(|o| o.to_string()).collect(),
            children,
        }
    }

    #[test]
    fn single_leaf() {
        let g = assemble_ontology(&leaf("C", &["a", "b"])).unwrap();
        assert_eq!(g.concepts.len(), 1);
        assert_eq!(g.terms.len(), 2);
        assert!(g.edges.is_empty());
        let json: serde_json::Value = serde_json::from_str(&export_json(&g)).unwrap();
        assert_eq!(json["concepts"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn root_with_two_children() {
        let g = assemble_ontology(&internal("C", vec![leaf("C1", &["a"]), leaf("C2", &["b", "c"])], &[])).unwrap();
        assert_eq!(g.concepts.len(), 3);
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| e.relation == "unnamed"));
        assert_eq!(g.edges.len(), g.concepts.len() - g.roots().len());
        let dot = export_dot(&g);
        assert_eq!(dot.matches("shape=box]").count(), 3);
        assert_eq!(dot.matches("[label=\"unnamed\"]").count(), 2);
    }

    #[test]
    fn two_levels_of_generalisation() {
        let checklists = internal("C1", vec![leaf("C1.1", &["a", "b"]), leaf("C1.2", &["c", "d"])], &[]);
        let g = assemble_ontology(&internal("C", vec![checklists, leaf("C2", &["e"])], &[])).unwrap();
        let root = g.roots()[0];
        let mid = g.children_of(&root.id).into_iter().find(|c| c.node == "C1").unwrap();
        let subs = g.children_of(&mid.id);
        assert_eq!(subs.len(), 2);
        assert!(subs.iter().all(|c| c.level == 2));
    }

    #[test]
    fn outliers_become_flagged_concepts() {
        let g = assemble_ontology(&internal("C", vec![leaf("C1", &["a", "b"])], &["z"])).unwrap();
        let root = g.roots()[0].id.clone();
        let out = g.concepts.iter().find(|c| c.kind == ConceptKind::Outliers).unwrap();
        assert_eq!(out.label, format!("outliers-of-{root}"));
        let z = g.terms.iter().find(|t| t.term == "z").unwrap();
        assert_eq!(z.concept, out.id);
        assert_eq!(g.terms.len(), 3);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let tree = internal("C", vec![leaf("C1", &["a \"q\""]), leaf("C2", &["b", "c"])], &["d"]);
        let g = assemble_ontology(&tree).unwrap();
        let text = export_json(&g);
        let back = import_json(&text, "t").unwrap();
        assert_eq!(back, g);
        assert_eq!(export_json(&back), text);
        assert_eq!(export_json(&assemble_ontology(&tree).unwrap()), text);
    }

    #[test]
    fn import_rejects_broken_graphs() {
        let g = assemble_ontology(&internal("C", vec![leaf("C1", &["a"]), leaf("C2", &["b"])], &[])).unwrap();
        let mut bad = g.clone();
        bad.edges[0].parent = "nope".into();
        assert!(import_json(&export_json(&bad), "t").is_err());
        let mut bad = g.clone();
        bad.terms[0].concept = g.roots()[0].id.clone();
        assert!(import_json(&export_json(&bad), "t").is_err());
    }

    #[test]
    fn turtle_lists_every_class_and_subclass() {
        let g = assemble_ontology(&internal("C", vec![leaf("C1", &["a b"]), leaf("C2", &["c"])], &[])).unwrap();
        let ttl = export_turtle(&g);
        for c in &g.concepts {
            assert!(ttl.contains(&format!("ex:{} a owl:Class", c.id)));
        }
        assert_eq!(ttl.matches("rdfs:subClassOf").count(), g.edges.len());
        assert!(ttl.contains("ex:term_a_20b a ex:"));
    }

    #[test]
    fn empty_tree_rejected() {
        assert!(assemble_ontology(&leaf("C", &[])).is_err());
    }
}
