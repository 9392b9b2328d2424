//! Contact networks: connected Erdős–Rényi and Barabási–Albert graphs.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Maximum number of G(n,p) samples drawn while looking for a connected one.
pub const ER_RETRY_CAP: usize = 1000;

/// Undirected simple graph with sorted adjacency lists over nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops and duplicate edges are
    /// rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut half_degree = 0;
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!("duplicate edge at node {u}")));
            }
            half_degree += list.len();
        }
        Ok(Self {
            adjacency,
            edge_count: half_degree / 2,
        })
    }

    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Self {
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().copied().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::Invalid("permutation length differs from n".into()));
        }
        Self::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Edge-list text: `n <n>` followed by one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_edge_list().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_edge_list(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::Invalid(e.to_string()))?
            .ok_or_else(|| Error::Invalid("empty edge list".into()))?;
        let n = header
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Invalid(format!("bad header line {header:?}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::Invalid(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(usize::from_str);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::Invalid(format!("bad edge line {line:?}"))),
            }
        }
        Self::from_edges(n, edges)
    }
}

/// True iff a breadth-first traversal from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached == n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "er")]
    ErdosRenyi,
    #[serde(rename = "ba")]
    BarabasiAlbert,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::ErdosRenyi => "er",
            Family::BarabasiAlbert => "ba",
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "er" | "erdos-renyi" => Ok(Family::ErdosRenyi),
            "ba" | "barabasi-albert" => Ok(Family::BarabasiAlbert),
            other => Err(format!("unknown graph family {other:?} (expected er or ba)")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: Family,
    pub n: usize,
    pub mean_degree: f64,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(family: Family, n: usize, mean_degree: f64, seed: u64) -> Self {
        Self {
            family,
            n,
            mean_degree,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid(format!("n = {} must be at least 2", self.n)));
        }
        if !(self.mean_degree > 0.0 && self.mean_degree < self.n as f64) {
            return Err(Error::Param {
                name: "mean_degree",
                value: self.mean_degree,
                range: "(0, n)",
            });
        }
        if self.family == Family::BarabasiAlbert {
            let m = self.mean_degree / 2.0;
            if m.fract() != 0.0 {
                return Err(Error::Param {
                    name: "mean_degree",
                    value: self.mean_degree,
                    range: "even integers (Barabasi-Albert)",
                });
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Graph> {
        match self.family {
            Family::ErdosRenyi => generate_er(self),
            Family::BarabasiAlbert => generate_ba(self),
        }
    }
}

fn graph_rng(seed: u64) -> ChaCha8Rng {
    rng::sequential(seed, 0, Purpose::Graph)
}

/// Connected G(n, p) sample with `p = mean_degree / (n - 1)`.
///
/// Disconnected samples are discarded and the generator keeps drawing from
/// the same stream, up to [`ER_RETRY_CAP`] attempts.
pub fn generate_er(spec: &GraphSpec) -> Result<Graph> {
    if spec.family != Family::ErdosRenyi {
        return Err(Error::Invalid("generate_er needs an ErdosRenyi spec".into()));
    }
    let n = spec.n;
    if n < 2 {
        return Err(Error::Invalid(format!("n = {n} must be at least 2")));
    }
    let p = spec.mean_degree / (n - 1) as f64;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Param {
            name: "mean_degree",
            value: spec.mean_degree,
            range: "(0, n-1]",
        });
    }
    let mut rng = graph_rng(spec.seed);
    for _ in 0..ER_RETRY_CAP {
        let g = sample_gnp(n, p, &mut rng);
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::Disconnected {
        attempts: ER_RETRY_CAP,
        n,
        p,
    })
}

fn sample_gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut adjacency = vec![Vec::new(); n];
    let mut edge_count = 0;
    for u in 0..n {
        for v in (u + 1)..n {
            if p >= 1.0 || rng.random::<f64>() < p {
                adjacency[u].push(v);
                adjacency[v].push(u);
                edge_count += 1;
            }
        }
    }
    // pushes happen in increasing order of the other endpoint, so lists are sorted
    Graph {
        adjacency,
        edge_count,
    }
}

/// Preferential-attachment graph grown from a complete seed graph on `m + 1`
/// nodes, with `m = mean_degree / 2` distinct targets per new node.
pub fn generate_ba(spec: &GraphSpec) -> Result<Graph> {
    if spec.family != Family::BarabasiAlbert {
        return Err(Error::Invalid("generate_ba needs a BarabasiAlbert spec".into()));
    }
    let half = spec.mean_degree / 2.0;
    if !(half >= 1.0 && half.fract() == 0.0) {
        return Err(Error::Param {
            name: "mean_degree",
            value: spec.mean_degree,
            range: "even integers >= 2 (Barabasi-Albert)",
        });
    }
    let m = half as usize;
    let n = spec.n;
    if n <= m {
        return Err(Error::Invalid(format!(
            "Barabasi-Albert needs n > m (n = {n}, m = {m})"
        )));
    }

    let mut rng = graph_rng(spec.seed);
    let seed_nodes = m + 1;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    // each edge contributes both endpoints, so uniform picks are degree-proportional
    let mut endpoints = Vec::with_capacity(2 * (m * (m + 1) / 2 + (n - seed_nodes) * m));
    for u in 0..seed_nodes {
        for v in (u + 1)..seed_nodes {
            adjacency[u].push(v);
            adjacency[v].push(u);
            endpoints.push(u);
            endpoints.push(v);
        }
    }

    let mut targets = Vec::with_capacity(m);
    for new in seed_nodes..n {
        targets.clear();
        while targets.len() < m {
            let pick = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &t in &targets {
            adjacency[new].push(t);
            adjacency[t].push(new);
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    Ok(Graph {
        adjacency,
        edge_count: endpoints.len() / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn connectivity_basics() {
        assert!(is_connected(&Graph::complete(2)));
        assert!(!is_connected(&Graph::empty(2)));
        assert!(is_connected(&path(10)));
        let cut = Graph::from_edges(10, (0..9).filter(|&i| i != 4).map(|i| (i, i + 1))).unwrap();
        assert!(!is_connected(&cut));
    }

    #[test]
    fn er_two_nodes_is_k2() {
        let g = generate_er(&GraphSpec::new(Family::ErdosRenyi, 2, 1.0, 99)).unwrap();
        assert_eq!(g, Graph::complete(2));
    }

    #[test]
    fn er_disconnected_regime_errors() {
        let spec = GraphSpec::new(Family::ErdosRenyi, 400, 0.5, 1);
        assert!(matches!(generate_er(&spec), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn er_rejects_bad_degree() {
        let spec = GraphSpec::new(Family::ErdosRenyi, 10, 12.0, 1);
        assert!(matches!(generate_er(&spec), Err(Error::Param { .. })));
    }

    #[test]
    fn ba_seed_clique_only() {
        for m in 1..5 {
            let spec = GraphSpec::new(Family::BarabasiAlbert, m + 1, 2.0 * m as f64, 3);
            assert_eq!(generate_ba(&spec).unwrap(), Graph::complete(m + 1));
        }
    }

    #[test]
    fn ba_rejects_small_n_and_odd_degree() {
        let spec = GraphSpec::new(Family::BarabasiAlbert, 3, 6.0, 1);
        assert!(generate_ba(&spec).is_err());
        let spec = GraphSpec::new(Family::BarabasiAlbert, 30, 5.0, 1);
        assert!(matches!(generate_ba(&spec), Err(Error::Param { .. })));
    }

    #[test]
    fn ba_mean_degree_from_construction() {
        let g = generate_ba(&GraphSpec::new(Family::BarabasiAlbert, 1000, 10.0, 5)).unwrap();
        let m = 5;
        assert_eq!(g.edge_count(), m * (m + 1) / 2 + (1000 - m - 1) * m);
        // (15 + 994 * 5) * 2 / 1000 = 9.97
        assert!((g.mean_degree() - 9.97).abs() < 1e-12);
        assert!(is_connected(&g));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = generate_ba(&GraphSpec::new(Family::BarabasiAlbert, 50, 4.0, 8)).unwrap();
        let text = g.to_edge_list();
        assert!(text.starts_with("n 50\n"));
        let back = Graph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn from_edges_rejects_duplicates_and_loops() {
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(2, 2)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }
}
