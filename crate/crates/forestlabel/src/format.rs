//! Line-oriented text formats for forests, event streams and labels.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use forestlabel_core::graph::{GraphEvent, GraphSequence};
use forestlabel_core::{EventSequence, Label, NodeId, RootedForest, TopologicalEvent};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

/// Reads `key=value` fields of a header line after the keyword.
fn header_fields<'a>(
    words: &[&'a str],
    keyword: &str,
    line: usize,
) -> Result<BTreeMap<&'a str, &'a str>, FormatError> {
    if words.first() != Some(&keyword) {
        return Err(err(line, format!("expected header `{keyword}`")));
    }
    words[1..]
        .iter()
        .map(|w| {
            w.split_once('=')
                .ok_or_else(|| err(line, format!("expected key=value, got {w:?}")))
        })
        .collect()
}

fn parse_u64(s: &str, line: usize, what: &str) -> Result<u64, FormatError> {
    s.parse()
        .map_err(|_| err(line, format!("{what} must be a non-negative integer, got {s:?}")))
}

#[derive(Debug, Clone)]
pub struct ForestFile {
    pub n: u64,
    pub forest: RootedForest,
    /// External id of each node, indexed by `NodeId`.
    pub names: Vec<String>,
}

impl ForestFile {
    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|x| x == name).map(|i| NodeId(i as u32))
    }
}

pub fn parse_forest(text: &str) -> Result<ForestFile, FormatError> {
    let mut lines = content(text);
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty forest file"))?;
    let fields = header_fields(&header, "forest", hl)?;
    let n = parse_u64(fields.get("n").ok_or_else(|| err(hl, "missing n="))?, hl, "n")?;
    let mut names = Vec::new();
    let mut index = BTreeMap::new();
    let mut raw = Vec::new();
    for (line, words) in lines {
        let [id, parent] = words[..] else {
            return Err(err(line, "expected `<id> <parent|->`"));
        };
        if index.insert(id.to_string(), names.len()).is_some() {
            return Err(err(line, format!("duplicate id {id:?}")));
        }
        names.push(id.to_string());
        raw.push((line, parent));
    }
    let mut parents = Vec::with_capacity(raw.len());
    for (line, parent) in raw {
        parents.push(match parent {
            "-" => None,
            p => Some(*index.get(p).ok_or_else(|| err(line, format!("unknown parent {p:?}")))?),
        });
    }
    if (parents.len() as u64) > n {
        return Err(err(hl, format!("{} nodes exceed n={n}", parents.len())));
    }
    let forest = RootedForest::from_parents(&parents).map_err(|e| err(hl, e.to_string()))?;
    Ok(ForestFile { n, forest, names })
}

/// Writes a forest; nodes without a name are called `v<index>`.
pub fn write_forest(n: u64, forest: &RootedForest, names: Option<&[String]>) -> String {
    let name = |v: NodeId| match names {
        Some(ns) => ns[v.index()].clone(),
        None => format!("v{}", v.index()),
    };
    let mut out = format!("forest n={n}\n");
    for v in forest.nodes() {
        let parent = forest.parent(v).map_or_else(|| "-".to_string(), name);
        let _ = writeln!(out, "{} {parent}", name(v));
    }
    out
}

/// An event file holds either tree events or graph events.
#[derive(Debug, Clone)]
pub enum EventFile {
    Tree(EventSequence),
    Graph(GraphSequence),
}

pub fn parse_events(text: &str) -> Result<EventFile, FormatError> {
    let mut lines = content(text);
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty event file"))?;
    header_fields(&header, "events", hl)?;
    let mut tree = Vec::new();
    let mut graph = Vec::new();
    for (line, words) in lines {
        match words[..] {
            ["root", id] => tree.push(TopologicalEvent::root(id)),
            ["insert", id, parent] => tree.push(TopologicalEvent::child(id, parent)),
            ["remove", id] => tree.push(TopologicalEvent::remove(id)),
            ["node", id, ref nbrs @ ..] => {
                graph.push(GraphEvent::new(id, nbrs.iter().map(|s| s.to_string())))
            }
            _ => return Err(err(line, format!("unrecognised event {:?}", words.join(" ")))),
        }
        if !tree.is_empty() && !graph.is_empty() {
            return Err(err(line, "tree and graph events cannot be mixed"));
        }
    }
    if !graph.is_empty() {
        return GraphSequence::new(graph)
            .map(EventFile::Graph)
            .map_err(|e| err(hl, e.to_string()));
    }
    EventSequence::new(tree)
        .map(EventFile::Tree)
        .map_err(|e| err(hl, e.to_string()))
}

pub fn write_events(seq: &EventSequence) -> String {
    let mut out = String::from("events\n");
    for e in seq.events() {
        let _ = match e {
            TopologicalEvent::InsertRoot { id } => writeln!(out, "root {id}"),
            TopologicalEvent::InsertChild { id, parent } => writeln!(out, "insert {id} {parent}"),
            TopologicalEvent::RemoveLeaf { id } => writeln!(out, "remove {id}"),
        };
    }
    out
}

pub fn write_graph_events(seq: &GraphSequence) -> String {
    let mut out = String::from("events\n");
    for e in seq.events() {
        out.push_str("node ");
        out.push_str(&e.id);
        for nb in &e.neighbors {
            out.push(' ');
            out.push_str(nb);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFile {
    pub scheme: Option<String>,
    pub n: Option<u64>,
    pub entries: Vec<(String, Label)>,
}

impl LabelFile {
    pub fn get(&self, id: &str) -> Option<&Label> {
        self.entries.iter().find(|(x, _)| x == id).map(|(_, l)| l)
    }
}

pub fn format_label_line(id: &str, label: &Label) -> String {
    format!("{id} {} {}", label.len(), label.to_hex())
}

pub fn parse_label_line(words: &[&str], line: usize) -> Result<(String, Label), FormatError> {
    let [id, len, hex] = words[..] else {
        return Err(err(line, "expected `<id> <bit_len> <hex>`"));
    };
    let len = parse_u64(len, line, "bit_len")? as usize;
    let label = Label::from_hex(len, hex).map_err(|e| err(line, e.to_string()))?;
    Ok((id.to_string(), label))
}

/// Label files; the `labels scheme=<name> n=<n>` header is optional so a
/// bare pair of label lines can be queried too.
pub fn parse_labels(text: &str) -> Result<LabelFile, FormatError> {
    let mut file = LabelFile {
        scheme: None,
        n: None,
        entries: Vec::new(),
    };
    for (i, (line, words)) in content(text).enumerate() {
        if i == 0 && words[0] == "labels" {
            let fields = header_fields(&words, "labels", line)?;
            file.scheme = fields.get("scheme").map(|s| s.to_string());
            file.n = fields.get("n").map(|s| parse_u64(s, line, "n")).transpose()?;
            continue;
        }
        file.entries.push(parse_label_line(&words, line)?);
    }
    Ok(file)
}

pub fn labels_header(scheme: &str, n: u64) -> String {
    format!("labels scheme={scheme} n={n}\n")
}
