//! The implication matrix between the twelve properties of RE theories, its
//! DOT rendering, and the executable demos some edges point to.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod demos;

pub use demos::{rosser_table, run_demo, DemoReport, RosserPair, RosserReport, RosserRow, DEMOS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyId {
    Rosser,
    EI,
    RI,
    TP,
    EHU,
    EU,
    Creative,
    ZeroPrime,
    REW,
    RFD,
    RSS,
    RSW,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        PropertyId::Rosser,
        PropertyId::EI,
        PropertyId::RI,
        PropertyId::TP,
        PropertyId::EHU,
        PropertyId::EU,
        PropertyId::Creative,
        PropertyId::ZeroPrime,
        PropertyId::REW,
        PropertyId::RFD,
        PropertyId::RSS,
        PropertyId::RSW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::Rosser => "Rosser",
            PropertyId::EI => "EI",
            PropertyId::RI => "RI",
            PropertyId::TP => "TP",
            PropertyId::EHU => "EHU",
            PropertyId::EU => "EU",
            PropertyId::Creative => "Creative",
            PropertyId::ZeroPrime => "ZeroPrime",
            PropertyId::REW => "REW",
            PropertyId::RFD => "RFD",
            PropertyId::RSS => "RSS",
            PropertyId::RSW => "RSW",
        }
    }

    fn label(self) -> &'static str {
        match self {
            PropertyId::ZeroPrime => "0'",
            p => p.name(),
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = AtlasError;

    /// Case-insensitive; `0'` and `zero` also name `ZeroPrime`.
    fn from_str(s: &str) -> Result<PropertyId, AtlasError> {
        let t = s.trim().to_ascii_lowercase();
        if t == "0'" || t == "zero" || t == "0prime" {
            return Ok(PropertyId::ZeroPrime);
        }
        PropertyId::ALL
            .into_iter()
            .find(|p| p.name().to_ascii_lowercase() == t)
            .ok_or_else(|| AtlasError::UnknownProperty(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Implies,
    NotImplies,
    Open,
}

impl Status {
    /// Black for implications, red for separations, green for open questions.
    pub fn color(self) -> &'static str {
        match self {
            Status::Implies => "black",
            Status::NotImplies => "red",
            Status::Open => "green",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: PropertyId,
    pub to: PropertyId,
    pub status: Status,
    pub citation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_hint: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AtlasError {
    #[error("a property is not compared with itself")]
    SamePair,
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("unknown demo {0:?}")]
    UnknownDemo(String),
    #[error("atlas data: {0}")]
    Data(String),
}

#[derive(Debug, Deserialize)]
struct AtlasFile {
    version: u32,
    properties: Vec<PropertyId>,
    edges: Vec<Edge>,
}

const ATLAS_JSON: &str = include_str!("../../data/atlas.json");

/// The theorems the matrix cites, with their number of items.
pub const CITED: [(&str, u32); 13] = [
    ("relation about EI", 5),
    ("thm on Rosser", 17),
    ("EI does not imply REW", 5),
    ("thm on EI", 15),
    ("thm on RI", 15),
    ("thm on TP", 12),
    ("thm on EHU", 13),
    ("thm on EU", 9),
    ("thm on creative", 6),
    ("thm on zero", 4),
    ("thm on REW", 3),
    ("summary on RFD, RSS, RSW", 5),
    ("final Question", 6),
];

/// The loaded matrix.
#[derive(Debug)]
pub struct Atlas {
    pub version: u32,
    edges: BTreeMap<(PropertyId, PropertyId), Edge>,
}

impl Atlas {
    pub fn parse(json: &str) -> Result<Atlas, AtlasError> {
        let file: AtlasFile = serde_json::from_str(json).map_err(|e| AtlasError::Data(e.to_string()))?;
        if file.properties != PropertyId::ALL {
            return Err(AtlasError::Data("property list differs".into()));
        }
        let mut edges = BTreeMap::new();
        for e in file.edges {
            if e.from == e.to {
                return Err(AtlasError::Data(format!("self edge on {}", e.from)));
            }
            if e.citation.trim().is_empty() {
                return Err(AtlasError::Data(format!("{} -> {} has no citation", e.from, e.to)));
            }
            if edges.insert((e.from, e.to), e).is_some() {
                return Err(AtlasError::Data("duplicate edge".into()));
            }
        }
        if edges.len() != 132 {
            return Err(AtlasError::Data(format!("{} edges, expected 132", edges.len())));
        }
        Ok(Atlas { version: file.version, edges })
    }

    /// The shipped matrix.
    pub fn get() -> &'static Atlas {
        static ATLAS: OnceLock<Atlas> = OnceLock::new();
        ATLAS.get_or_init(|| Atlas::parse(ATLAS_JSON).expect("shipped atlas is well formed"))
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn query(&self, p: PropertyId, q: PropertyId) -> Result<&Edge, AtlasError> {
        if p == q {
            return Err(AtlasError::SamePair);
        }
        Ok(&self.edges[&(p, q)])
    }

    /// Whether `path` is a chain of `implies` edges.
    pub fn has_chain(&self, path: &[PropertyId]) -> bool {
        path.windows(2)
            .all(|w| self.query(w[0], w[1]).is_ok_and(|e| e.status == Status::Implies))
    }

    /// DOT text for the whole matrix, or only the edges touching `focus`.
    pub fn export_dot(&self, focus: Option<PropertyId>) -> String {
        let mut out = String::from("digraph atlas {\n  rankdir=LR;\n  node [shape=box];\n");
        for p in PropertyId::ALL {
            out.push_str(&format!("  {} [label=\"{}\"];\n", p.name(), p.label()));
        }
        for e in self.edges() {
            if focus.is_some_and(|f| e.from != f && e.to != f) {
                continue;
            }
            out.push_str(&format!(
                "  {} -> {} [color={}, tooltip=\"{}\"];\n",
                e.from.name(),
                e.to.name(),
                e.status.color(),
                e.citation.replace('"', "\\\"")
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Problems with the data: unknown citations, open edges the implications
    /// already settle, and separations contradicted by composing implications.
    pub fn consistency_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for e in self.edges() {
            if citation_target(&e.citation).is_none() {
                problems.push(format!("{} -> {}: unrecognised citation {:?}", e.from, e.to, e.citation));
            }
            if let Some(d) = &e.witness_hint {
                if !DEMOS.contains(&d.as_str()) {
                    problems.push(format!("{} -> {}: no demo {d:?}", e.from, e.to));
                }
            }
        }
        let closure = self.implication_closure();
        for e in self.edges() {
            let derived = closure.contains(&(e.from, e.to));
            match e.status {
                Status::Implies => {}
                Status::NotImplies if derived => {
                    problems.push(format!("{} -> {} is not_implies but follows by composition", e.from, e.to))
                }
                Status::Open if derived => {
                    problems.push(format!("{} -> {} is open but follows by composition", e.from, e.to))
                }
                _ => {}
            }
        }
        problems
    }

    fn implication_closure(&self) -> BTreeSet<(PropertyId, PropertyId)> {
        let mut c: BTreeSet<_> =
            self.edges().filter(|e| e.status == Status::Implies).map(|e| (e.from, e.to)).collect();
        loop {
            let extra: Vec<_> = c
                .iter()
                .flat_map(|&(a, b)| c.iter().filter(move |&&(b2, _)| b2 == b).map(move |&(_, d)| (a, d)))
                .filter(|&(a, d)| a != d && !c.contains(&(a, d)))
                .collect();
            if extra.is_empty() {
                return c;
            }
            c.extend(extra);
        }
    }
}

/// Splits `Theorem "label"(k)` or `final Question (k)` into the cited
/// statement and item, when both are known.
pub fn citation_target(c: &str) -> Option<(&'static str, u32)> {
    let (label, item) = if let Some(rest) = c.strip_prefix("Theorem \"") {
        let (label, tail) = rest.split_once('"')?;
        (label, tail)
    } else {
        ("final Question", c.strip_prefix("final Question ")?)
    };
    let k: u32 = item.trim().strip_prefix('(')?.strip_suffix(')')?.parse().ok()?;
    CITED
        .iter()
        .find(|(l, n)| *l == label && (1..=*n).contains(&k))
        .map(|&(l, _)| (l, k))
}

pub fn query(p: PropertyId, q: PropertyId) -> Result<&'static Edge, AtlasError> {
    Atlas::get().query(p, q)
}

pub fn export_dot(focus: Option<PropertyId>) -> String {
    Atlas::get().export_dot(focus)
}
