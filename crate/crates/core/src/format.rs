//! JSON game documents, report rendering and DOT output.
//!
//! A document is a JSON object whose `"kind"` selects the body:
//!
//! * `"cp"`: `agents`, `situations`, `conversion` and `preference`, the last
//!   two mapping each agent to a list of `[from, to]` pairs.
//! * `"strategic"`: `players`, `strategies` (player → list) and either
//!   `payoffs` (profile key → one number per player, the key being the
//!   strategies joined by `,`) or `preference` (player → pairs of profile keys).
//! * `"chinesewall"`: `subjects`, `classes`, `companies` (company → class) and
//!   `objects` (object → company).
//!
//! `cp` and `strategic` documents accept `"close_preference_transitively"`;
//! unknown fields are rejected everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chinesewall::{CwError, CwModel};
use crate::equilibria::{EquilibriumKind, EquilibriumReport};
use crate::game::{CpGame, GameError, GameSpec};
use crate::relation::Relation;
use crate::strategic::{StrategicError, StrategicGame};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document must be a JSON object with a string field `kind`")]
    MissingKind,
    #[error("unknown document kind `{0}` (expected cp, strategic or chinesewall)")]
    UnknownKind(String),
    #[error("at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Strategic(#[from] StrategicError),
    #[error(transparent)]
    ChineseWall(#[from] CwError),
}

#[derive(Clone, Debug)]
pub enum GameDocument {
    Cp(CpGame),
    Strategic(StrategicGame),
    ChineseWall(CwModel),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CpBody {
    agents: Vec<String>,
    situations: Vec<String>,
    conversion: BTreeMap<String, Vec<(String, String)>>,
    preference: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    close_preference_transitively: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategicBody {
    players: Vec<String>,
    strategies: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    payoffs: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default)]
    preference: Option<BTreeMap<String, Vec<(String, String)>>>,
    #[serde(default)]
    close_preference_transitively: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CwBody {
    subjects: Vec<String>,
    classes: Vec<String>,
    companies: BTreeMap<String, String>,
    objects: BTreeMap<String, String>,
}

fn body<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, DocumentError> {
    serde_path_to_error::deserialize(value).map_err(|e| DocumentError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn parse_game_document(text: &str) -> Result<GameDocument, DocumentError> {
    parse_game_document_with(text, false)
}

/// `close_preference` forces transitive closure of preferences regardless of
/// the document flag.
pub fn parse_game_document_with(
    text: &str,
    close_preference: bool,
) -> Result<GameDocument, DocumentError> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let kind = value
        .as_object_mut()
        .and_then(|o| o.remove("kind"))
        .ok_or(DocumentError::MissingKind)?;
    let kind = kind.as_str().ok_or(DocumentError::MissingKind)?.to_owned();
    match kind.as_str() {
        "cp" => {
            let b: CpBody = body(value)?;
            let spec = GameSpec {
                agents: b.agents,
                situations: b.situations,
                conversion: b.conversion,
                preference: b.preference,
            };
            let game = CpGame::build(&spec)?;
            Ok(GameDocument::Cp(
                if close_preference || b.close_preference_transitively {
                    game.with_transitive_preferences()
                } else {
                    game
                },
            ))
        }
        "strategic" => {
            let b: StrategicBody = body(value)?;
            let game = match (&b.payoffs, &b.preference) {
                (Some(p), None) => StrategicGame::from_payoffs(&b.players, &b.strategies, p)?,
                (None, Some(p)) => StrategicGame::from_preference(&b.players, &b.strategies, p)?,
                _ => {
                    return Err(DocumentError::Schema {
                        path: ".".into(),
                        message: "exactly one of `payoffs` or `preference` is required".into(),
                    })
                }
            };
            Ok(GameDocument::Strategic(
                if close_preference || b.close_preference_transitively {
                    game.with_transitive_preferences()
                } else {
                    game
                },
            ))
        }
        "chinesewall" => {
            let b: CwBody = body(value)?;
            Ok(GameDocument::ChineseWall(CwModel::new(
                b.subjects,
                b.classes,
                &b.companies,
                &b.objects,
            )?))
        }
        other => Err(DocumentError::UnknownKind(other.to_owned())),
    }
}

#[derive(Serialize)]
struct CpDocumentOut<'a> {
    kind: &'static str,
    #[serde(flatten)]
    spec: &'a GameSpec,
}

/// `kind: "cp"` document for `game`, pretty-printed with a trailing newline.
pub fn export_cp_document(game: &CpGame) -> String {
    let spec = game.to_spec();
    let mut out = serde_json::to_string_pretty(&CpDocumentOut {
        kind: "cp",
        spec: &spec,
    })
    .expect("game specs serialize");
    out.push('\n');
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn emit_report(report: &EquilibriumReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
            out.push('\n');
            out
        }
        ReportFormat::Text => {
            let mut out = String::new();
            for e in &report.equilibria {
                let members: Vec<&str> = e.members.iter().map(|m| m.0.as_str()).collect();
                let _ = writeln!(out, "{} {{{}}}", e.kind.as_str(), members.join("; "));
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotLayer {
    Conversion,
    Preference,
    ChangeOfMind,
}

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn agent_color(a: usize) -> &'static str {
    PALETTE[a % PALETTE.len()]
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

/// One layer of the game as a DOT digraph. Conversion edges are dashed,
/// preference edges dotted and change-of-mind edges solid; edges take the
/// colour of their agent. On the change-of-mind layer each equilibrium is a
/// cluster.
pub fn emit_dot(game: &CpGame, report: &EquilibriumReport, layer: DotLayer) -> String {
    let names = game.situations();
    let mut by_name: Vec<usize> = (0..names.len()).collect();
    by_name.sort_by(|&a, &b| names[a].cmp(&names[b]));

    let mut clustered = vec![false; names.len()];
    let mut out = String::from("digraph cp {\n  node [shape=ellipse];\n");
    if layer == DotLayer::ChangeOfMind {
        for (k, eq) in report.equilibria.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{k} {{");
            let _ = writeln!(
                out,
                "    label=\"{}\";\n    style=rounded;",
                eq.kind.as_str()
            );
            if eq.kind == EquilibriumKind::AbstractNash {
                out.push_str("    color=\"#2ca02c\";\n");
            }
            for m in &eq.members {
                let i = game.situation_index(m).expect("report matches game");
                clustered[i] = true;
                let _ = writeln!(out, "    n{i} [label=\"{}\"];", dot_escape(&m.0));
            }
            out.push_str("  }\n");
        }
    }
    for &i in &by_name {
        if !clustered[i] {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", dot_escape(&names[i].0));
        }
    }

    let mut write_edges = |rel: &Relation, color: &str, style: &str, label: Option<&str>| {
        let mut edges: Vec<(usize, usize)> = rel.iter().collect();
        edges.sort_by(|&(a, b), &(c, d)| (&names[a], &names[b]).cmp(&(&names[c], &names[d])));
        for (a, b) in edges {
            let _ = write!(out, "  n{a} -> n{b} [color=\"{color}\", style={style}");
            if let Some(l) = label {
                let _ = write!(out, ", label=\"{}\"", dot_escape(l));
            }
            out.push_str("];\n");
        }
    };
    let agents = game.agents();
    match layer {
        DotLayer::Conversion | DotLayer::Preference => {
            let style = if layer == DotLayer::Conversion {
                "dashed"
            } else {
                "dotted"
            };
            for (a, agent) in agents.iter().enumerate() {
                let rel = if layer == DotLayer::Conversion {
                    game.conversion(a)
                } else {
                    game.preference(a)
                };
                write_edges(rel, agent_color(a), style, Some(&agent.0));
            }
        }
        DotLayer::ChangeOfMind => {
            let per_agent: Vec<Relation> = (0..agents.len())
                .map(|a| game.change_of_mind_of(a))
                .collect();
            let com = game.change_of_mind();
            // Edges witnessed by a single agent take its colour, the rest black.
            let mut shared = Relation::new();
            let mut own = vec![Relation::new(); agents.len()];
            for (x, y) in com.iter() {
                let who: Vec<usize> = (0..agents.len())
                    .filter(|&a| per_agent[a].contains(x, y))
                    .collect();
                match who.as_slice() {
                    [a] => {
                        own[*a].insert(x, y);
                    }
                    _ => {
                        shared.insert(x, y);
                    }
                }
            }
            for (a, rel) in own.iter().enumerate() {
                write_edges(rel, agent_color(a), "solid", None);
            }
            write_edges(&shared, "black", "solid", None);
        }
    }
    out.push_str("}\n");
    out
}
