//! Oscillator coupling topologies.
//!
//! A network is an undirected weighted graph whose nodes are identical unit
//! oscillators. Two node roles are tracked on top of the graph: *reference*
//! oscillators (the ones that get squeezed) and *hubs* (where chains attach).
//!
//! Networks can be built programmatically or parsed from a line-oriented text
//! format:
//!
//! ```text
//! # ring of four
//! node r1
//! node r2
//! node a
//! node b
//! edge r1 a 0.3
//! edge r1 b 0.3
//! edge r2 a 0.3
//! edge r2 b 0.3
//! reference r1
//! reference r2
//! hub a
//! hub b
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Immutable, validated oscillator network.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorNetwork {
    labels: Vec<String>,
    edges: Vec<Edge>,
    references: Vec<usize>,
    hubs: Vec<usize>,
}

impl OscillatorNetwork {
    /// Validates and builds a network. Edges are stored with `a < b`, in the
    /// order given.
    pub fn new(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        references: Vec<usize>,
        hubs: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut seen = HashSet::new();
        for label in &labels {
            validate_label(label)?;
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate node `{label}`")));
            }
        }

        let mut stored = Vec::new();
        let mut pairs = HashSet::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-loop on node {i}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({i}, {j}) has nonpositive weight {w}"
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !pairs.insert((a, b)) {
                return Err(Error::InvalidNetwork(format!("duplicate edge ({a}, {b})")));
            }
            stored.push(Edge { a, b, weight: w });
        }

        check_role_list("reference", &references, n)?;
        check_role_list("hub", &hubs, n)?;
        if let Some(k) = references.iter().find(|k| hubs.contains(k)) {
            return Err(Error::InvalidNetwork(format!("node {k} is both a reference and a hub")));
        }

        Ok(Self {
            labels,
            edges: stored,
            references,
            hubs,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn references(&self) -> &[usize] {
        &self.references
    }

    pub fn hubs(&self) -> &[usize] {
        &self.hubs
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().any(|e| e.a == a && e.b == b)
    }

    /// Sorted neighbour list of every node.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Renders the network in the topology DSL. `parse_topology` reads it back
    /// to an identical network.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        for label in &self.labels {
            let _ = writeln!(out, "node {label}");
        }
        for e in &self.edges {
            // `{}` on f64 prints the shortest representation that round-trips.
            let _ = writeln!(out, "edge {} {} {}", self.labels[e.a], self.labels[e.b], e.weight);
        }
        for &k in &self.references {
            let _ = writeln!(out, "reference {}", self.labels[k]);
        }
        for &k in &self.hubs {
            let _ = writeln!(out, "hub {}", self.labels[k]);
        }
        out
    }
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidNetwork("empty node name".into()));
    }
    if let Some(ch) = label
        .chars()
        .find(|c| c.is_whitespace() || matches!(c, '#' | ',' | '='))
    {
        return Err(Error::InvalidNetwork(format!(
            "node name `{label}` contains reserved character {ch:?}"
        )));
    }
    Ok(())
}

fn check_role_list(role: &str, list: &[usize], n: usize) -> Result<()> {
    let mut seen = HashSet::new();
    for &k in list {
        if k >= n {
            return Err(Error::InvalidNetwork(format!("{role} index {k} out of range")));
        }
        if !seen.insert(k) {
            return Err(Error::InvalidNetwork(format!("{role} node {k} listed twice")));
        }
    }
    Ok(())
}

/// Ring of two squeezed references and two hubs with a chain of `m / 2`
/// oscillators hanging off each hub.
///
/// Index layout: 0 = r1, 1 = r2, chain oscillator `k` (1-based, `1..=m`) sits at
/// index `k + 1`. The hubs are chain oscillators `m/2` and `m/2 + 1`. Labels are
/// `r1`, `r2`, `1`, ..., `m`.
pub fn build_interferometric(m: usize, c: f64) -> Result<OscillatorNetwork> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("M must be even and >= 2, got {m}")));
    }
    check_coupling(c)?;

    let chain = |k: usize| k + 1;
    let (h1, h2) = (chain(m / 2), chain(m / 2 + 1));

    let mut labels = vec!["r1".to_string(), "r2".to_string()];
    labels.extend((1..=m).map(|k| k.to_string()));

    let mut edges = vec![(0, h1, c), (0, h2, c), (1, h1, c), (1, h2, c)];
    edges.extend((1..m).filter(|&i| i != m / 2).map(|i| (chain(i), chain(i + 1), c)));

    OscillatorNetwork::new(labels, edges, vec![0, 1], vec![h1, h2])
}

/// Open linear chain of `n` oscillators labelled `1..=n`.
pub fn build_chain(n: usize, c: f64) -> Result<OscillatorNetwork> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "chain needs at least 2 nodes, got {n}"
        )));
    }
    check_coupling(c)?;
    let labels = (1..=n).map(|k| k.to_string()).collect();
    OscillatorNetwork::new(labels, (0..n - 1).map(|i| (i, i + 1, c)), vec![], vec![])
}

fn check_coupling(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("coupling must be positive, got {c}")))
    }
}

/// Parses the topology DSL. Node indices follow declaration order; every other
/// statement must refer to nodes that are already declared.
pub fn parse_topology(text: &str) -> Result<OscillatorNetwork, ParseError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut edge_set = HashSet::new();
    let mut references = Vec::new();
    let mut hubs = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(&(kw_col, keyword)) = tokens.first() else {
            continue;
        };
        let err = |column: usize, message: String| ParseError {
            line: line_no,
            column,
            message,
        };
        let arity = |expected: usize| {
            if tokens.len() != expected + 1 {
                let col = tokens.get(expected + 1).map_or(kw_col, |t| t.0);
                Err(err(
                    col,
                    format!("`{keyword}` takes {expected} argument(s), found {}", tokens.len() - 1),
                ))
            } else {
                Ok(())
            }
        };
        let lookup = |(col, name): (usize, &str)| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| err(col, format!("undeclared node `{name}`")))
        };

        match keyword {
            "node" => {
                arity(1)?;
                let (col, name) = tokens[1];
                if index.contains_key(name) {
                    return Err(err(col, format!("duplicate node `{name}`")));
                }
                if name.contains([',', '=']) {
                    return Err(err(col, format!("node name `{name}` contains ',' or '='")));
                }
                index.insert(name.to_string(), labels.len());
                labels.push(name.to_string());
            }
            "edge" => {
                arity(3)?;
                let a = lookup(tokens[1])?;
                let b = lookup(tokens[2])?;
                let (wcol, wtext) = tokens[3];
                let w: f64 = wtext
                    .parse()
                    .map_err(|_| err(wcol, format!("invalid weight `{wtext}`")))?;
                if a == b {
                    return Err(err(tokens[2].0, format!("self-loop on `{}`", tokens[1].1)));
                }
                if !(w > 0.0 && w.is_finite()) {
                    return Err(err(wcol, format!("weight must be positive, got `{wtext}`")));
                }
                if !edge_set.insert((a.min(b), a.max(b))) {
                    return Err(err(
                        kw_col,
                        format!("duplicate edge `{}`-`{}`", tokens[1].1, tokens[2].1),
                    ));
                }
                edges.push((a, b, w));
            }
            "reference" | "hub" => {
                arity(1)?;
                let k = lookup(tokens[1])?;
                let (target, other) = if keyword == "reference" {
                    (&mut references, &hubs)
                } else {
                    (&mut hubs, &references)
                };
                if target.contains(&k) || other.contains(&k) {
                    return Err(err(tokens[1].0, format!("node `{}` already has a role", tokens[1].1)));
                }
                target.push(k);
            }
            other => return Err(err(kw_col, format!("unknown statement `{other}`"))),
        }
    }

    OscillatorNetwork::new(labels, edges, references, hubs).map_err(|e| ParseError {
        line: 0,
        column: 0,
        message: e.to_string(),
    })
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, byte)),
            (true, Some((c0, b0))) => {
                out.push((c0, &line[b0..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c0, b0)) = start {
        out.push((c0, &line[b0..]));
    }
    out
}
