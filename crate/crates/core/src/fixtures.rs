//! Small reference networks used by tests, benchmarks and the CLI examples.

use itertools::Itertools;

use crate::topology::{Network, NetworkSpec};

/// Builds a spec whose edge list is exactly the union of the path hops.
pub fn spec_from_paths(relays: Vec<String>, paths: Vec<Vec<String>>) -> NetworkSpec {
    let n = paths.len();
    let edges = paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| (w[0].clone(), w[1].clone())))
        .collect();
    NetworkSpec {
        sources: (1..=n).map(|i| format!("s{i}")).collect(),
        receivers: (1..=n).map(|i| format!("r{i}")).collect(),
        relays,
        edges,
        paths,
    }
}

/// `n` connections plus one shared relay per group. Connection `i` runs
/// `s{i} - a{i} - [shared relay, private hop]* - r{i}` so that no two
/// connections ever share an edge.
pub fn shared_relays_spec(n: usize, groups: &[(String, Vec<usize>)]) -> NetworkSpec {
    let mut relays: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    relays.extend(groups.iter().map(|(name, _)| name.clone()));
    let mut paths = Vec::with_capacity(n);
    for i in 1..=n {
        let mut path = vec![format!("s{i}"), format!("a{i}")];
        for (k, (name, members)) in groups.iter().enumerate() {
            if members.contains(&i) {
                let hop = format!("h{i}_{k}");
                path.push(name.clone());
                path.push(hop.clone());
                relays.push(hop);
            }
        }
        path.push(format!("r{i}"));
        paths.push(path);
    }
    spec_from_paths(relays, paths)
}

/// Three connections crossing one relay `n5`, plus an idle relay `n4`.
pub fn three_connection_spec() -> NetworkSpec {
    let p = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut spec = spec_from_paths(
        p(&["n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8"]),
        vec![
            p(&["s1", "n1", "n5", "n6", "r1"]),
            p(&["s2", "n2", "n5", "n7", "r2"]),
            p(&["s3", "n3", "n5", "n8", "r3"]),
        ],
    );
    spec.edges.push(("n1".into(), "n4".into()));
    spec.edges.push(("n4".into(), "n2".into()));
    spec
}

pub fn three_connection() -> Network {
    Network::build(&three_connection_spec()).expect("fixture is valid")
}

/// The three-connection network plus a fourth connection `s4 - n9 - r4`
/// that avoids `n5`, so `n5` can be protected with `t = 3 < n`.
pub fn three_connection_bypass_spec() -> NetworkSpec {
    let mut spec = three_connection_spec();
    spec.sources.push("s4".into());
    spec.receivers.push("r4".into());
    spec.relays.push("n9".into());
    spec.edges.push(("s4".into(), "n9".into()));
    spec.edges.push(("n9".into(), "r4".into()));
    spec.paths.push(vec!["s4".into(), "n9".into(), "r4".into()]);
    spec
}

pub fn three_connection_bypass() -> Network {
    Network::build(&three_connection_bypass_spec()).expect("fixture is valid")
}

/// Five connections; relay `x` carries connections 2 and 4, relay `y`
/// carries 1 and 3, everything else carries one.
pub fn five_path_chain_spec() -> NetworkSpec {
    shared_relays_spec(5, &[("y".into(), vec![1, 3]), ("x".into(), vec![2, 4])])
}

pub fn five_path_chain() -> Network {
    Network::build(&five_path_chain_spec()).expect("fixture is valid")
}

/// `n` connections with no shared relays.
pub fn parallel_spec(n: usize) -> NetworkSpec {
    shared_relays_spec(n, &[])
}

pub fn parallel(n: usize) -> Network {
    Network::build(&parallel_spec(n)).expect("fixture is valid")
}

/// One shared relay for every set of 2..=`max_degree` connections, so every
/// failure pattern of up to `max_degree` connections is reachable by failing
/// a single relay. Relay names are `g` followed by the member labels.
pub fn every_subset_spec(n: usize, max_degree: usize) -> NetworkSpec {
    let groups: Vec<(String, Vec<usize>)> = (2..=max_degree.min(n))
        .flat_map(|k| (1..=n).combinations(k))
        .map(|members| (format!("g{}", members.iter().join("_")), members))
        .collect();
    shared_relays_spec(n, &groups)
}

pub fn every_subset(n: usize, max_degree: usize) -> Network {
    Network::build(&every_subset_spec(n, max_degree)).expect("fixture is valid")
}
