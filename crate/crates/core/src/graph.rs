//! Simple undirected graphs and the random models used by the experiments.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Restarts allowed to the configuration-model sampler before giving up.
pub const REGULAR_REJECTION_BUDGET: usize = 10_000;

/// An undirected simple graph on vertices `0..n`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically;
/// neighbour lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// The edgeless graph on `n >= 1` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, std::iter::empty())
    }

    /// Builds a graph from unordered pairs. Rejects self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted_unchecked(n, canon))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n,
            edges,
            adjacency,
        }
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges.collect::<Vec<_>>())
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)).collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)).collect::<Vec<_>>())
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }
}

/// Samples `G(n, p)`: each of the `n(n-1)/2` pairs independently with
/// probability `p`. Pairs are visited in lexicographic order.
pub fn sample_gnp(n: usize, p: f64, stream: &RngStream) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} is not a probability")));
    }
    let mut rng = stream.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted_unchecked(n, edges))
}

/// Samples a uniform simple `d`-regular graph on `n` vertices by the pairing
/// model, restarting whenever the pairing contains a loop or a repeated pair.
pub fn sample_regular(n: usize, d: usize, stream: &RngStream) -> Result<Graph> {
    if n == 0 || d >= n {
        return Err(Error::invalid(format!(
            "need 0 < n and d < n, got n = {n}, d = {d}"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(Error::invalid(format!("n * d = {} is odd", n * d)));
    }
    let mut rng = stream.rng();
    let mut points: Vec<usize> = (0..n * d).map(|i| i / d.max(1)).collect();
    for _ in 0..REGULAR_REJECTION_BUDGET {
        points.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = points
            .chunks_exact(2)
            .map(|pair| (pair[0].min(pair[1]), pair[0].max(pair[1])))
            .collect();
        if edges.iter().any(|&(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Ok(Graph::from_sorted_unchecked(n, edges));
    }
    Err(Error::SamplingFailure {
        attempts: REGULAR_REJECTION_BUDGET,
        reason: format!("no simple pairing found for n = {n}, d = {d}"),
    })
}

/// Edge-list text: `"n m"`, then `m` lines `"u v"` with `u < v`, sorted.
pub fn graph_to_string(g: &Graph) -> String {
    let mut s = String::with_capacity(8 * (g.edge_count() + 1));
    let _ = writeln!(s, "{} {}", g.order(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    out.write_all(graph_to_string(g).as_bytes())?;
    Ok(())
}

/// Parses the edge-list format. Lines starting with `#` are skipped, so the
/// CLI's provenance header does not need stripping.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line"))?;
    let (n, m) = parse_pair(hline, header)?;
    if n == 0 {
        return Err(Error::parse(hline, "vertex count must be positive"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for (line, text) in lines {
        if text.is_empty() {
            continue;
        }
        let (u, v) = parse_pair(line, text)?;
        if u == v {
            return Err(Error::parse(line, format!("self-loop at vertex {u}")));
        }
        if u > v {
            return Err(Error::parse(
                line,
                format!("edge {u} {v} not written as u < v"),
            ));
        }
        if v >= n {
            return Err(Error::parse(
                line,
                format!("vertex {v} out of range for {n} vertices"),
            ));
        }
        match prev {
            Some(p) if p == (u, v) => {
                return Err(Error::parse(line, format!("duplicate edge {u} {v}")))
            }
            Some(p) if p > (u, v) => {
                return Err(Error::parse(line, "edges not sorted lexicographically"))
            }
            _ => {}
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::parse(
            hline,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(Graph::from_sorted_unchecked(n, edges))
}

pub fn read_graph<R: BufRead>(mut input: R) -> Result<Graph> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_graph(&text)
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it
            .next()
            .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
        tok.parse().map_err(|_| {
            Error::parse(
                line,
                format!("{what} `{tok}` is not a non-negative integer"),
            )
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(Error::parse(line, "expected exactly two fields"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream(i: u64) -> RngStream {
        RngStream::new(2024, "graph-test", i)
    }

    #[test]
    fn gnp_trivial_cases() {
        let g = sample_gnp(1, 0.5, &stream(0)).unwrap();
        assert_eq!((g.order(), g.edge_count()), (1, 0));
        let k5 = sample_gnp(5, 1.0, &stream(0)).unwrap();
        assert_eq!(k5, Graph::complete(5).unwrap());
        assert_eq!(sample_gnp(7, 0.0, &stream(0)).unwrap().edge_count(), 0);
        assert!(matches!(
            sample_gnp(0, 0.5, &stream(0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(sample_gnp(3, 1.5, &stream(0)).is_err());
    }

    #[test]
    fn gnp_edge_count_is_binomial() {
        // Binomial(499500, 1/2): mean 249750, sd sqrt(499500)/2 ~ 353.4.
        let g = sample_gnp(1000, 0.5, &stream(11)).unwrap();
        let dev = (g.edge_count() as f64 - 249_750.0).abs();
        assert!(dev < 4.0 * 353.4, "edge count {}", g.edge_count());
    }

    #[test]
    fn gnp_pair_frequencies_concentrate() {
        // Each pair count is Binomial(100, 1/2). A deviation of 0.2 is a 4-sigma
        // event with two-sided probability 7.85e-5, so over 19900 pairs about
        // 1.6 exceedances are expected; more than 8 has probability < 1e-4.
        // No pair may deviate by 0.3 (6 sigma).
        let n = 200;
        let mut counts = vec![0u32; n * n];
        for t in 0..100 {
            let g = sample_gnp(n, 0.5, &stream(1000 + t)).unwrap();
            for &(u, v) in g.edges() {
                counts[u * n + v] += 1;
            }
        }
        let mut exceed = 0;
        for u in 0..n {
            for v in u + 1..n {
                let dev = (f64::from(counts[u * n + v]) / 100.0 - 0.5).abs();
                assert!(dev < 0.3, "pair ({u},{v}) deviates by {dev}");
                if dev >= 0.2 {
                    exceed += 1;
                }
            }
        }
        assert!(exceed <= 8, "{exceed} pairs deviate by 0.2 or more");
    }

    #[test]
    fn streams_reproduce_and_separate() {
        let a = sample_gnp(40, 0.3, &stream(5)).unwrap();
        let b = sample_gnp(40, 0.3, &stream(5)).unwrap();
        assert_eq!(a, b);
        let differing = (0..100)
            .filter(|&i| {
                sample_gnp(40, 0.3, &stream(10_000 + 2 * i)).unwrap()
                    != sample_gnp(40, 0.3, &stream(10_001 + 2 * i)).unwrap()
            })
            .count();
        assert!(differing >= 99);
    }

    #[test]
    fn regular_trivial_cases() {
        let k4 = sample_regular(4, 3, &stream(0)).unwrap();
        assert_eq!(k4, Graph::complete(4).unwrap());
        assert!(matches!(
            sample_regular(3, 3, &stream(0)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(sample_regular(5, 3, &stream(0)).is_err());
        let g = sample_regular(300, 3, &stream(1)).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert_eq!(g.edge_count(), 450);
    }

    #[test]
    fn regular_budget_exhaustion_is_reported() {
        // A 40-regular pairing on 42 vertices is essentially never simple.
        let err = sample_regular(42, 40, &stream(0)).unwrap_err();
        assert!(matches!(err, Error::SamplingFailure { .. }));
    }

    #[test]
    fn edge_list_format() {
        let k2 = Graph::complete(2).unwrap();
        assert_eq!(graph_to_string(&k2), "2 1\n0 1\n");
        let err = parse_graph("2 1\n1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(matches!(
            parse_graph("3 1\n0 3\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_graph("3 2\n0 1\n0 1\n").unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
        assert!(matches!(
            parse_graph("3 1\n0 x\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(parse_graph("3 2\n0 1\n").is_err());
        let g = parse_graph("# provenance\n3 1\n1 2\n").unwrap();
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(0, []).is_err());
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(n in 1usize..40, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let g = sample_gnp(n, p, &RngStream::new(seed, "rt", 0)).unwrap();
            let mut buf = Vec::new();
            write_graph(&g, &mut buf).unwrap();
            prop_assert_eq!(read_graph(buf.as_slice()).unwrap(), g);
        }

        #[test]
        fn adjacency_is_symmetric_and_consistent(n in 1usize..30, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let g = sample_gnp(n, p, &RngStream::new(seed, "sym", 0)).unwrap();
            let mut from_adj = 0;
            for u in 0..n {
                for &v in g.neighbors(u) {
                    prop_assert!(u != v);
                    prop_assert!(g.neighbors(v).contains(&u));
                    from_adj += 1;
                }
            }
            prop_assert_eq!(from_adj, 2 * g.edge_count());
        }

        #[test]
        fn regular_samples_are_simple_and_regular(half_n in 5usize..40, d in 1usize..5, seed in any::<u64>()) {
            let n = 2 * half_n;
            let g = sample_regular(n, d, &RngStream::new(seed, "reg", 0)).unwrap();
            prop_assert!(g.degrees().iter().all(|&x| x == d));
            // Validation through the checked constructor proves simplicity.
            prop_assert!(Graph::from_edges(n, g.edges().to_vec()).is_ok());
        }
    }
}
