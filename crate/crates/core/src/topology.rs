//! Network model: sources, receivers, relays, undirected edges and the `n`
//! link-disjoint connections between them.
//!
//! Connections are labelled `1..=n` in the order they are provided; every
//! public API in this crate uses those 1-based labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Receiver,
    Relay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub role: Role,
}

/// Undirected edge, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(NodeId, NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.0, self.1)
    }

    pub fn touches(&self, u: NodeId) -> bool {
        self.0 == u || self.1 == u
    }
}

/// A connection from a source to a receiver as a node walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn receiver(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    fn touches(&self, u: NodeId) -> bool {
        self.edges().any(|e| e.touches(u))
    }
}

/// Plain description of a network, as read from a scenario file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub sources: Vec<String>,
    pub receivers: Vec<String>,
    pub relays: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub paths: Vec<Vec<String>>,
}

/// A validated network. Immutable once built.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    index: HashMap<String, NodeId>,
    edges: BTreeSet<Edge>,
    paths: Vec<Path>,
}

impl Network {
    /// Validates and assembles a network.
    ///
    /// Rejects duplicate names, unknown endpoints, self loops, repeated edges,
    /// paths that do not run source to receiver over existing edges, paths that
    /// share an edge, and mismatched source/receiver counts.
    pub fn build(spec: &NetworkSpec) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidNetwork(msg));

        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        for (names, role) in [
            (&spec.sources, Role::Source),
            (&spec.receivers, Role::Receiver),
            (&spec.relays, Role::Relay),
        ] {
            for name in names {
                if index.insert(name.clone(), NodeId(nodes.len())).is_some() {
                    return invalid(format!("duplicate node name `{name}`"));
                }
                nodes.push(Node { name: name.clone(), role });
            }
        }
        if spec.sources.len() != spec.receivers.len() {
            return invalid(format!(
                "{} sources but {} receivers",
                spec.sources.len(),
                spec.receivers.len()
            ));
        }
        if spec.paths.len() != spec.sources.len() {
            return invalid(format!(
                "{} paths for {} source/receiver pairs",
                spec.paths.len(),
                spec.sources.len()
            ));
        }

        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| Error::UnknownNode(name.to_owned()));

        let mut edges = BTreeSet::new();
        for (a, b) in &spec.edges {
            let (ua, ub) = (lookup(a)?, lookup(b)?);
            if ua == ub {
                return invalid(format!("self loop at `{a}`"));
            }
            if !edges.insert(Edge::new(ua, ub)) {
                return invalid(format!("edge `{a}`-`{b}` listed twice"));
            }
        }

        let mut used: BTreeMap<Edge, usize> = BTreeMap::new();
        let mut seen_sources = BTreeSet::new();
        let mut seen_receivers = BTreeSet::new();
        let mut paths = Vec::with_capacity(spec.paths.len());
        for (i, names) in spec.paths.iter().enumerate() {
            let label = i + 1;
            if names.len() < 2 {
                return invalid(format!("path {label} has fewer than two nodes"));
            }
            let ids = names.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?;
            let (first, last) = (ids[0], *ids.last().unwrap());
            if nodes[first.0].role != Role::Source {
                return invalid(format!("path {label} does not start at a source"));
            }
            if nodes[last.0].role != Role::Receiver {
                return invalid(format!("path {label} does not end at a receiver"));
            }
            if let Some(mid) = ids[1..ids.len() - 1].iter().find(|u| nodes[u.0].role != Role::Relay) {
                return invalid(format!(
                    "path {label} passes through non-relay `{}`",
                    nodes[mid.0].name
                ));
            }
            if !seen_sources.insert(first) {
                return invalid(format!("source `{}` starts two paths", names[0]));
            }
            if !seen_receivers.insert(last) {
                return invalid(format!("receiver `{}` ends two paths", names.last().unwrap()));
            }
            let path = Path { nodes: ids };
            for e in path.edges() {
                if !edges.contains(&e) {
                    let (a, b) = e.endpoints();
                    return invalid(format!(
                        "path {label} uses missing edge `{}`-`{}`",
                        nodes[a.0].name, nodes[b.0].name
                    ));
                }
                if let Some(other) = used.insert(e, label) {
                    let (a, b) = e.endpoints();
                    return invalid(format!(
                        "paths {other} and {label} share edge `{}`-`{}`",
                        nodes[a.0].name, nodes[b.0].name
                    ));
                }
            }
            paths.push(path);
        }

        let net = Network { nodes, index, edges, paths };
        for (id, node) in net.nodes.iter().enumerate() {
            if node.role != Role::Relay {
                continue;
            }
            let u = NodeId(id);
            let (d, mu) = (net.degree_of(u), net.graph_degree_of(u));
            if d > mu / 2 {
                return invalid(format!("relay `{}` has relay degree {d} > graph degree {mu} / 2", node.name));
            }
        }
        Ok(net)
    }

    /// Number of connections.
    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.0].name
    }

    pub fn relays(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter(|n| n.role == Role::Relay).map(|n| n.name.as_str())
    }

    fn relay(&self, name: &str) -> Result<NodeId> {
        let id = self.node_id(name).ok_or_else(|| Error::UnknownNode(name.to_owned()))?;
        if self.nodes[id.0].role != Role::Relay {
            return Err(Error::NotARelay(name.to_owned()));
        }
        Ok(id)
    }

    fn through(&self, u: NodeId) -> BTreeSet<usize> {
        self.paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.touches(u))
            .map(|(i, _)| i + 1)
            .collect()
    }

    fn degree_of(&self, u: NodeId) -> usize {
        self.paths.iter().filter(|p| p.touches(u)).count()
    }

    fn graph_degree_of(&self, u: NodeId) -> usize {
        self.edges.iter().filter(|e| e.touches(u)).count()
    }

    /// Number of connections relayed by `u`.
    pub fn node_relay_degree(&self, u: &str) -> Result<usize> {
        self.relay(u).map(|id| self.degree_of(id))
    }

    /// Ordinary undirected degree of any node.
    pub fn graph_degree(&self, u: &str) -> Result<usize> {
        let id = self.node_id(u).ok_or_else(|| Error::UnknownNode(u.to_owned()))?;
        Ok(self.graph_degree_of(id))
    }

    /// Labels of the connections relayed by `u`; these are the connections
    /// lost when `u` fails.
    pub fn paths_through(&self, u: &str) -> Result<BTreeSet<usize>> {
        self.relay(u).map(|id| self.through(id))
    }

    /// Largest relay degree and every relay attaining it.
    pub fn max_relay_degree(&self) -> Result<(usize, BTreeSet<String>)> {
        let degrees: Vec<(usize, &str)> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.role == Role::Relay)
            .map(|(i, n)| (self.degree_of(NodeId(i)), n.name.as_str()))
            .collect();
        let d0 = degrees.iter().map(|(d, _)| *d).max().ok_or(Error::NoRelays)?;
        let argmax = degrees.iter().filter(|(d, _)| *d == d0).map(|(_, n)| n.to_string()).collect();
        Ok((d0, argmax))
    }
}

/// Which connections are currently delivering data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathActivity {
    flags: Vec<bool>,
}

impl PathActivity {
    pub fn new(flags: Vec<bool>) -> Self {
        PathActivity { flags }
    }

    pub fn all_active(n: usize) -> Self {
        PathActivity { flags: vec![true; n] }
    }

    /// All active except the given 1-based labels.
    pub fn with_failed(n: usize, failed: &BTreeSet<usize>) -> Self {
        PathActivity { flags: (1..=n).map(|i| !failed.contains(&i)).collect() }
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn n(&self) -> usize {
        self.flags.len()
    }

    pub fn active(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }
}

/// Fraction of connections that are active, as a reduced rational.
pub fn normalized_capacity(activity: &PathActivity) -> Ratio<u64> {
    if activity.n() == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(activity.active() as u64, activity.n() as u64)
}
