//! Directed acyclic networks with messages, unit-capacity edges and demands.
//!
//! Messages are attached to nodes directly (an attachment stands for an
//! uncapacitated in-edge from the message's source). Every edge carries `n`
//! symbols. Fan-out of one edge value to several nodes is modelled with a
//! relay node whose out-edges copy its single in-edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network contains a cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("unknown network `{0}` (expected gbutterfly, fano, nonfano or vamos)")]
    UnknownNetwork(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The four built-in networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkId {
    #[serde(rename = "gbutterfly")]
    GButterfly,
    Fano,
    #[serde(rename = "nonfano")]
    NonFano,
    Vamos,
}

impl NetworkId {
    pub const ALL: [NetworkId; 4] = [
        NetworkId::GButterfly,
        NetworkId::Fano,
        NetworkId::NonFano,
        NetworkId::Vamos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkId::GButterfly => "gbutterfly",
            NetworkId::Fano => "fano",
            NetworkId::NonFano => "nonfano",
            NetworkId::Vamos => "vamos",
        }
    }
}

impl fmt::Display for NetworkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NetworkId {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gbutterfly" | "butterfly" => Ok(NetworkId::GButterfly),
            "fano" => Ok(NetworkId::Fano),
            "nonfano" | "non-fano" => Ok(NetworkId::NonFano),
            "vamos" => Ok(NetworkId::Vamos),
            _ => Err(NetworkError::UnknownNetwork(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
}

/// One symbol source of a node, in the order edge functions see them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalInput {
    Message(String),
    Edge(String),
}

impl LocalInput {
    pub fn name(&self) -> &str {
        match self {
            LocalInput::Message(m) | LocalInput::Edge(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub name: String,
    pub messages: Vec<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    /// node → messages available there
    pub attachments: BTreeMap<String, BTreeSet<String>>,
    /// (receiver, demanded message)
    pub demands: Vec<(String, String)>,
    /// label → edge id
    pub named_edges: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Cycle { nodes: Vec<String> },
    UnreachableEdge { edge: String },
    UnsourcedDemand { receiver: String, message: String },
    UnknownNode { node: String },
    UnknownMessage { message: String },
    DuplicateEdge { edge: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { nodes } => write!(f, "cycle among nodes {}", nodes.join(", ")),
            Violation::UnreachableEdge { edge } => {
                write!(f, "edge {edge} is not reachable from any message")
            }
            Violation::UnsourcedDemand { receiver, message } => {
                write!(f, "{receiver} demands {message}, which no node generates")
            }
            Violation::UnknownNode { node } => write!(f, "unknown node {node}"),
            Violation::UnknownMessage { message } => write!(f, "unknown message {message}"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge id {edge}"),
        }
    }
}

/// Incremental construction of a [`Network`]; nodes are registered in order
/// of first mention.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    net: Network,
}

impl Default for Network {
    fn default() -> Self {
        Network {
            name: String::new(),
            messages: Vec::new(),
            nodes: Vec::new(),
            edges: Vec::new(),
            attachments: BTreeMap::new(),
            demands: Vec::new(),
            named_edges: BTreeMap::new(),
        }
    }
}

impl NetworkBuilder {
    pub fn new(name: &str) -> Self {
        NetworkBuilder {
            net: Network {
                name: name.to_string(),
                ..Network::default()
            },
        }
    }

    pub fn node(mut self, id: &str) -> Self {
        self.touch(id);
        self
    }

    fn touch(&mut self, id: &str) {
        if !self.net.nodes.iter().any(|n| n == id) {
            self.net.nodes.push(id.to_string());
        }
    }

    /// Attaches `message` at `node`, declaring the message on first use.
    pub fn attach(mut self, message: &str, node: &str) -> Self {
        self.touch(node);
        if !self.net.messages.iter().any(|m| m == message) {
            self.net.messages.push(message.to_string());
        }
        self.net
            .attachments
            .entry(node.to_string())
            .or_default()
            .insert(message.to_string());
        self
    }

    pub fn edge(mut self, id: &str, tail: &str, head: &str) -> Self {
        self.touch(tail);
        self.touch(head);
        self.net.edges.push(Edge {
            id: id.to_string(),
            tail: tail.to_string(),
            head: head.to_string(),
        });
        self
    }

    /// An edge that is also exposed under a label (w, x, y, z, ...).
    pub fn labeled_edge(mut self, label: &str, tail: &str, head: &str) -> Self {
        self = self.edge(label, tail, head);
        self.net.named_edges.insert(label.to_string(), label.to_string());
        self
    }

    pub fn demand(mut self, node: &str, message: &str) -> Self {
        self.touch(node);
        self.net.demands.push((node.to_string(), message.to_string()));
        self
    }

    pub fn build(self) -> Network {
        self.net
    }
}

impl Network {
    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn in_edges(&self, node: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.head == node).collect()
    }

    pub fn out_edges(&self, node: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.tail == node).collect()
    }

    /// Messages available at `node`, in network message order.
    pub fn local_messages(&self, node: &str) -> Vec<&str> {
        let Some(att) = self.attachments.get(node) else {
            return Vec::new();
        };
        self.messages
            .iter()
            .filter(|m| att.contains(*m))
            .map(String::as_str)
            .collect()
    }

    /// Inputs seen by functions computed at `node`: local messages in message
    /// order, then in-edges in edge-list order.
    pub fn local_inputs(&self, node: &str) -> Vec<LocalInput> {
        let mut out: Vec<LocalInput> = self
            .local_messages(node)
            .into_iter()
            .map(|m| LocalInput::Message(m.to_string()))
            .collect();
        out.extend(self.in_edges(node).into_iter().map(|e| LocalInput::Edge(e.id.clone())));
        out
    }

    pub fn receivers(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.demands
            .iter()
            .filter(|(r, _)| seen.insert(r.clone()))
            .map(|(r, _)| r.as_str())
            .collect()
    }

    pub fn message_index(&self, message: &str) -> Option<usize> {
        self.messages.iter().position(|m| m == message)
    }

    fn node_index(&self) -> BTreeMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
    }

    /// Kahn's algorithm; among ready nodes the one listed first wins.
    pub fn topological_order(&self) -> Result<Vec<String>, NetworkError> {
        let index = self.node_index();
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            if let (Some(&t), Some(&h)) = (index.get(e.tail.as_str()), index.get(e.head.as_str())) {
                indeg[h] += 1;
                succ[t].push(h);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &h in &succ[i] {
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n)
                .filter(|i| indeg[*i] > 0)
                .map(|i| self.nodes[i].clone())
                .collect();
            return Err(NetworkError::Cycle(stuck));
        }
        Ok(order.into_iter().map(|i| self.nodes[i].clone()).collect())
    }

    /// Edges sorted by the topological position of their tail (stable).
    pub fn edges_in_order(&self) -> Result<Vec<&Edge>, NetworkError> {
        let order = self.topological_order()?;
        let pos: BTreeMap<&str, usize> =
            order.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort_by_key(|e| pos.get(e.tail.as_str()).copied().unwrap_or(usize::MAX));
        Ok(edges)
    }

    /// Nodes to which `message` can flow (its attachment points and all
    /// their descendants).
    pub fn message_reach(&self, message: &str) -> BTreeSet<String> {
        let mut seen: BTreeSet<String> = self
            .attachments
            .iter()
            .filter(|(_, ms)| ms.contains(message))
            .map(|(n, _)| n.clone())
            .collect();
        let mut queue: VecDeque<String> = seen.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            for e in self.out_edges(&n) {
                if seen.insert(e.head.clone()) {
                    queue.push_back(e.head.clone());
                }
            }
        }
        seen
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nodes: BTreeSet<&str> = self.nodes.iter().map(String::as_str).collect();
        let messages: BTreeSet<&str> = self.messages.iter().map(String::as_str).collect();

        let mut ids = BTreeSet::new();
        for e in &self.edges {
            if !ids.insert(e.id.as_str()) {
                out.push(Violation::DuplicateEdge { edge: e.id.clone() });
            }
            for n in [&e.tail, &e.head] {
                if !nodes.contains(n.as_str()) {
                    out.push(Violation::UnknownNode { node: n.clone() });
                }
            }
        }
        for (node, ms) in &self.attachments {
            if !nodes.contains(node.as_str()) {
                out.push(Violation::UnknownNode { node: node.clone() });
            }
            for m in ms {
                if !messages.contains(m.as_str()) {
                    out.push(Violation::UnknownMessage { message: m.clone() });
                }
            }
        }

        if let Err(NetworkError::Cycle(nodes)) = self.topological_order() {
            out.push(Violation::Cycle { nodes });
        }

        // a node is reached if it holds a message or has an in-edge from a reached node
        let mut reached: BTreeSet<&str> = self
            .attachments
            .iter()
            .filter(|(_, ms)| !ms.is_empty())
            .map(|(n, _)| n.as_str())
            .collect();
        loop {
            let before = reached.len();
            for e in &self.edges {
                if reached.contains(e.tail.as_str()) {
                    reached.insert(e.head.as_str());
                }
            }
            if reached.len() == before {
                break;
            }
        }
        for e in &self.edges {
            if !reached.contains(e.tail.as_str()) {
                out.push(Violation::UnreachableEdge { edge: e.id.clone() });
            }
        }

        for (r, m) in &self.demands {
            if !nodes.contains(r.as_str()) {
                out.push(Violation::UnknownNode { node: r.clone() });
            }
            let generated = self.attachments.values().any(|ms| ms.contains(m));
            if !generated {
                out.push(Violation::UnsourcedDemand {
                    receiver: r.clone(),
                    message: m.clone(),
                });
            }
        }
        out
    }

    /// Parses the line-oriented description:
    /// `message <id>@<node>`, `edge <id> <tail> <head>`, `demand <node> <message>`,
    /// plus optional `network <name>` and `node <id>` lines. `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Network, NetworkError> {
        let mut b = NetworkBuilder::new("custom");
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| NetworkError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["network", name] => b.net.name = name.to_string(),
                ["node", id] => b = b.node(id),
                ["message", spec] => {
                    let (m, n) = spec
                        .split_once('@')
                        .ok_or_else(|| err("expected `message <id>@<node>`"))?;
                    if m.is_empty() || n.is_empty() {
                        return Err(err("empty message or node id"));
                    }
                    b = b.attach(m, n);
                }
                ["edge", id, tail, head] => b = b.labeled_edge(id, tail, head),
                ["demand", node, message] => b = b.demand(node, message),
                _ => return Err(err(&format!("unrecognised line `{line}`"))),
            }
        }
        Ok(b.build())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("network {}\n", self.name);
        for n in &self.nodes {
            s.push_str(&format!("node {n}\n"));
        }
        for m in &self.messages {
            for (node, ms) in &self.attachments {
                if ms.contains(m) {
                    s.push_str(&format!("message {m}@{node}\n"));
                }
            }
        }
        for e in &self.edges {
            s.push_str(&format!("edge {} {} {}\n", e.id, e.tail, e.head));
        }
        for (r, m) in &self.demands {
            s.push_str(&format!("demand {r} {m}\n"));
        }
        s
    }
}

pub fn validate_network(net: &Network) -> Vec<Violation> {
    net.validate()
}

pub fn topological_order(net: &Network) -> Result<Vec<String>, NetworkError> {
    net.topological_order()
}

pub fn builtin_network(id: NetworkId) -> Network {
    match id {
        NetworkId::GButterfly => NetworkBuilder::new("gbutterfly")
            .attach("a", "S1")
            .attach("b", "S1")
            .attach("c", "S2")
            .attach("d", "S2")
            .node("M")
            .node("F")
            .node("R5")
            .node("R6")
            .labeled_edge("u", "S1", "M")
            .labeled_edge("v", "S2", "M")
            .labeled_edge("y", "M", "F")
            .edge("y_R5", "F", "R5")
            .edge("y_R6", "F", "R6")
            .labeled_edge("x", "S1", "R5")
            .labeled_edge("z", "S2", "R6")
            .demand("R5", "a")
            .demand("R5", "c")
            .demand("R6", "b")
            .demand("R6", "d")
            .build(),
        NetworkId::Fano => NetworkBuilder::new("fano")
            .attach("a", "W")
            .attach("b", "W")
            .attach("b", "Y")
            .attach("c", "Y")
            .node("Wr")
            .node("Yr")
            .node("X")
            .attach("c", "Z")
            .node("Xr")
            .node("Zr")
            .attach("a", "n12")
            .node("n13")
            .node("n14")
            .labeled_edge("w", "W", "Wr")
            .labeled_edge("y", "Y", "Yr")
            .edge("w_X", "Wr", "X")
            .edge("y_X", "Yr", "X")
            .edge("w_Z", "Wr", "Z")
            .labeled_edge("x", "X", "Xr")
            .labeled_edge("z", "Z", "Zr")
            .edge("x_n12", "Xr", "n12")
            .edge("x_n13", "Xr", "n13")
            .edge("z_n13", "Zr", "n13")
            .edge("z_n14", "Zr", "n14")
            .edge("y_n14", "Yr", "n14")
            .demand("n12", "c")
            .demand("n13", "b")
            .demand("n14", "a")
            .build(),
        NetworkId::NonFano => NetworkBuilder::new("nonfano")
            .attach("a", "W")
            .attach("b", "W")
            .attach("a", "X")
            .attach("c", "X")
            .attach("b", "Y")
            .attach("c", "Y")
            .attach("a", "Z")
            .attach("b", "Z")
            .attach("c", "Z")
            .node("Wr")
            .node("Xr")
            .node("Yr")
            .node("Zr")
            .node("n12")
            .node("n13")
            .node("n14")
            .node("n15")
            .labeled_edge("w", "W", "Wr")
            .labeled_edge("x", "X", "Xr")
            .labeled_edge("y", "Y", "Yr")
            .labeled_edge("z", "Z", "Zr")
            .edge("w_n12", "Wr", "n12")
            .edge("z_n12", "Zr", "n12")
            .edge("x_n13", "Xr", "n13")
            .edge("z_n13", "Zr", "n13")
            .edge("y_n14", "Yr", "n14")
            .edge("z_n14", "Zr", "n14")
            .edge("w_n15", "Wr", "n15")
            .edge("x_n15", "Xr", "n15")
            .edge("y_n15", "Yr", "n15")
            .demand("n12", "c")
            .demand("n13", "b")
            .demand("n14", "a")
            .demand("n15", "c")
            .build(),
        NetworkId::Vamos => {
            let mut b = NetworkBuilder::new("vamos");
            for enc in ["W", "X", "Y", "Z"] {
                for m in ["a", "b", "c", "d"] {
                    b = b.attach(m, enc);
                }
            }
            for r in ["Wr", "Xr", "Yr", "Zr"] {
                b = b.node(r);
            }
            // receivers with their direct message inputs
            let receivers: [(&str, &[&str]); 5] = [
                ("R1", &["b", "c", "d"]),
                ("R2", &["a", "b", "c"]),
                ("R3", &["a", "d"]),
                ("R4", &["c", "d"]),
                ("R5", &["a", "b"]),
            ];
            for (r, ms) in receivers {
                b = b.node(r);
                for m in ms {
                    b = b.attach(m, r);
                }
            }
            b.labeled_edge("w", "W", "Wr")
                .labeled_edge("x", "X", "Xr")
                .labeled_edge("y", "Y", "Yr")
                .labeled_edge("z", "Z", "Zr")
                .edge("z_R1", "Zr", "R1")
                .edge("y_R2", "Yr", "R2")
                .edge("w_R3", "Wr", "R3")
                .edge("z_R3", "Zr", "R3")
                .edge("x_R4", "Xr", "R4")
                .edge("z_R4", "Zr", "R4")
                .edge("w_R5", "Wr", "R5")
                .edge("y_R5", "Yr", "R5")
                .demand("R1", "a")
                .demand("R2", "d")
                .demand("R3", "b")
                .demand("R3", "c")
                .demand("R4", "a")
                .demand("R4", "b")
                .demand("R5", "c")
                .demand("R5", "d")
                .build()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(order: &[String], n: &str) -> usize {
        order.iter().position(|x| x == n).unwrap()
    }

    #[test]
    fn builtins_are_valid() {
        for id in NetworkId::ALL {
            let net = builtin_network(id);
            assert!(net.validate().is_empty(), "{id}: {:?}", net.validate());
        }
    }

    #[test]
    fn butterfly_shape() {
        let net = builtin_network(NetworkId::GButterfly);
        assert_eq!(net.messages, ["a", "b", "c", "d"]);
        let sources: Vec<_> = net.attachments.keys().collect();
        assert_eq!(sources, ["S1", "S2"]);
        assert_eq!(net.receivers(), ["R5", "R6"]);
        let order = net.topological_order().unwrap();
        assert!(pos(&order, "S1") < pos(&order, "M"));
        assert!(pos(&order, "S2") < pos(&order, "M"));
        assert!(pos(&order, "M") < pos(&order, "F"));
        assert!(pos(&order, "F") < pos(&order, "R5"));
        assert!(pos(&order, "F") < pos(&order, "R6"));
    }

    #[test]
    fn fano_demands() {
        let net = builtin_network(NetworkId::Fano);
        assert_eq!(net.messages.len(), 3);
        assert_eq!(
            net.demands,
            [
                ("n12".to_string(), "c".to_string()),
                ("n13".to_string(), "b".to_string()),
                ("n14".to_string(), "a".to_string())
            ]
        );
        let ins: Vec<String> = net
            .local_inputs("X")
            .iter()
            .map(|i| i.name().to_string())
            .collect();
        assert_eq!(ins, ["w_X", "y_X"]);
        let ins: Vec<String> = net
            .local_inputs("Z")
            .iter()
            .map(|i| i.name().to_string())
            .collect();
        assert_eq!(ins, ["c", "w_Z"]);
    }

    #[test]
    fn nonfano_order() {
        let net = builtin_network(NetworkId::NonFano);
        let order = net.topological_order().unwrap();
        for enc in ["W", "X", "Y", "Z"] {
            for r in ["n12", "n13", "n14", "n15"] {
                assert!(pos(&order, enc) < pos(&order, r));
            }
        }
    }

    #[test]
    fn vamos_receivers() {
        let net = builtin_network(NetworkId::Vamos);
        assert_eq!(net.receivers().len(), 5);
        let ins: Vec<String> = net
            .local_inputs("R3")
            .iter()
            .map(|i| i.name().to_string())
            .collect();
        assert_eq!(ins, ["a", "d", "w_R3", "z_R3"]);
        assert_eq!(net.demands.len(), 8);
    }

    #[test]
    fn demands_reach_receivers() {
        for id in NetworkId::ALL {
            let net = builtin_network(id);
            for (r, m) in &net.demands {
                assert!(net.message_reach(m).contains(r), "{id}: {m} cannot reach {r}");
            }
        }
    }

    #[test]
    fn cycle_detected() {
        let net = NetworkBuilder::new("cyc")
            .attach("a", "p")
            .edge("e1", "p", "q")
            .edge("e2", "q", "p")
            .build();
        let v = net.validate();
        assert!(v.iter().any(|v| matches!(v, Violation::Cycle { .. })));
        assert!(matches!(net.topological_order(), Err(NetworkError::Cycle(_))));
    }

    #[test]
    fn isolated_tail_is_unreachable() {
        let net = NetworkBuilder::new("iso")
            .attach("a", "s")
            .edge("e1", "s", "t")
            .edge("e2", "lonely", "t")
            .demand("t", "a")
            .build();
        assert_eq!(
            net.validate(),
            vec![Violation::UnreachableEdge { edge: "e2".into() }]
        );
    }

    #[test]
    fn single_node_order() {
        let net = NetworkBuilder::new("one").node("only").build();
        assert_eq!(net.topological_order().unwrap(), ["only"]);
    }

    #[test]
    fn unsourced_demand() {
        let net = NetworkBuilder::new("x").attach("a", "s").demand("s", "b").build();
        assert!(net
            .validate()
            .contains(&Violation::UnsourcedDemand { receiver: "s".into(), message: "b".into() }));
    }

    #[test]
    fn text_round_trip() {
        for id in NetworkId::ALL {
            let net = builtin_network(id);
            let parsed = Network::parse_text(&net.to_text()).unwrap();
            assert_eq!(parsed.messages, net.messages);
            assert_eq!(parsed.nodes, net.nodes);
            assert_eq!(parsed.edges, net.edges);
            assert_eq!(parsed.attachments, net.attachments);
            assert_eq!(parsed.demands, net.demands);
        }
    }

    #[test]
    fn parse_errors() {
        let e = Network::parse_text("message a\n").unwrap_err();
        assert!(matches!(e, NetworkError::Parse { line: 1, .. }));
        let e = Network::parse_text("# ok\nedge only-two x\n").unwrap_err();
        assert!(matches!(e, NetworkError::Parse { line: 2, .. }));
    }

    #[test]
    fn random_dag_orders_respect_edges() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let mut b = NetworkBuilder::new("rand");
            // shuffle node listing order so it differs from the DAG order
            let mut names: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                names.swap(i, rng.gen_range(0..=i));
            }
            for &i in &names {
                b = b.node(&format!("v{i}"));
            }
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.3) {
                        b = b.edge(&format!("e{k}"), &format!("v{i}"), &format!("v{j}"));
                        k += 1;
                    }
                }
            }
            let net = b.build();
            let order = net.topological_order().unwrap();
            let mut sorted = order.clone();
            sorted.sort();
            let mut nodes = net.nodes.clone();
            nodes.sort();
            assert_eq!(sorted, nodes);
            for e in &net.edges {
                assert!(pos(&order, &e.tail) < pos(&order, &e.head));
            }
        }
    }
}
