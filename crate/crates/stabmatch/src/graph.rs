//! Compatibility multigraphs: undirected, connected, simple edges, optional
//! self-loops. Node identifiers are arbitrary strings canonicalized to dense
//! indices; every public report maps back to the original names.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Guard for the exponential enumerations (subsets, independent sets).
pub const ENUMERATION_NODE_LIMIT: usize = 20;

/// An unordered edge, stored with `u <= v`; `u == v` is a self-loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Edge {
        Edge {
            u: a.min(b),
            v: a.max(b),
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint other than `x` (equal to `x` for a self-loop).
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone)]
pub struct Multigraph {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    /// Per node: `(neighbor, edge index)`; a self-loop appears once.
    adj: Vec<Vec<(usize, usize)>>,
    /// Per node when `n <= 32`: bitmask of its neighborhood. A node with a
    /// self-loop is its own neighbor.
    neigh_masks: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyTag {
    Tree,
    OddCycle,
    EvenCycle,
    TreePlusOddCycleEdge,
    TreePlusEvenCycleEdge,
    TreePlusSelfLoop,
    Other,
}

impl TopologyTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            TopologyTag::Tree => "tree",
            TopologyTag::OddCycle => "odd-cycle",
            TopologyTag::EvenCycle => "even-cycle",
            TopologyTag::TreePlusOddCycleEdge => "tree-plus-odd-cycle-edge",
            TopologyTag::TreePlusEvenCycleEdge => "tree-plus-even-cycle-edge",
            TopologyTag::TreePlusSelfLoop => "tree-plus-self-loop",
            TopologyTag::Other => "other",
        }
    }
}

/// A rooted tree over a subset of the graph's nodes. `order` is a BFS order
/// with the root first; `parent`/`children`/`depth` are indexed by graph
/// node id and only meaningful for members of `order`.
#[derive(Debug, Clone)]
pub struct RootedTree {
    pub root: usize,
    pub order: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
}

/// Topology report: for the cycle-bearing tags, `cycle` holds the cycle node
/// sequence (for a self-loop, the looped node alone) and `attached` the
/// rooted trees appended at cycle nodes of degree more than two.
#[derive(Debug, Clone)]
pub struct TopologyClass {
    pub tag: TopologyTag,
    pub cycle: Vec<usize>,
    pub attached: Vec<RootedTree>,
}

impl Multigraph {
    /// Builds a multigraph from named edges. Rejects duplicate (parallel)
    /// edges, fewer than two nodes and disconnected graphs.
    pub fn from_named_edges<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Multigraph> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(name) {
                return i;
            }
            let i = names.len();
            names.push(name.to_string());
            index.insert(name.to_string(), i);
            i
        };
        let mut edges: Vec<Edge> = Vec::new();
        for (a, b) in pairs {
            let u = intern(a.as_ref(), &mut names);
            let v = intern(b.as_ref(), &mut names);
            edges.push(Edge::new(u, v));
        }
        edges.sort();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!(
                "duplicate edge {} {} (all edges must be simple)",
                names[w[0].u], names[w[0].v]
            )));
        }
        if names.len() < 2 {
            return Err(Error::input("a multigraph needs at least two nodes"));
        }

        let n = names.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e_idx, e) in edges.iter().enumerate() {
            if e.is_loop() {
                adj[e.u].push((e.u, e_idx));
            } else {
                adj[e.u].push((e.v, e_idx));
                adj[e.v].push((e.u, e_idx));
            }
        }

        let g = Multigraph {
            neigh_masks: None,
            names,
            index,
            edges,
            adj,
        };
        if !g.is_connected() {
            return Err(Error::input("graph is not connected"));
        }
        let masks = (n <= 32).then(|| {
            (0..n)
                .map(|i| g.adj[i].iter().fold(0u32, |m, &(j, _)| m | (1 << j)))
                .collect()
        });
        Ok(Multigraph {
            neigh_masks: masks,
            ..g
        })
    }

    /// Parses the text edge-list format: one edge `u v` per line, `u u` for a
    /// self-loop, `#`-lines ignored, node set inferred from the edges.
    pub fn parse(text: &str) -> Result<Multigraph> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::input(format!(
                    "line {}: expected two node tokens, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            pairs.push((tokens[0].to_string(), tokens[1].to_string()));
        }
        if pairs.is_empty() {
            return Err(Error::input("no edges in graph file"));
        }
        Multigraph::from_named_edges(&pairs)
    }

    /// One edge per line, in canonical order; `parse(serialize(g))` yields
    /// the same edge multiset.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {}", self.names[e.u], self.names[e.v]);
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown node {name:?}")))
    }

    pub fn edge_name(&self, e: &Edge) -> String {
        format!("{}-{}", self.names[e.u], self.names[e.v])
    }

    /// `(neighbor, edge index)` pairs of `i`; a self-loop contributes the
    /// single pair `(i, e)`.
    pub fn adjacency(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[i]
    }

    pub fn has_loop_at(&self, i: usize) -> bool {
        self.adj[i].iter().any(|&(j, _)| j == i)
    }

    pub fn has_any_loop(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let e = Edge::new(a, b);
        self.edges.binary_search(&e).ok()
    }

    /// Degree counting a self-loop once (the number of incident edges).
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    fn is_connected(&self) -> bool {
        let n = self.names.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn neighbor_masks(&self) -> Result<&[u32]> {
        self.neigh_masks.as_deref().ok_or_else(|| {
            Error::resource(format!(
                "bitmask operations support at most 32 nodes, graph has {}",
                self.node_count()
            ))
        })
    }

    /// Neighborhood of a node subset given as a bitmask.
    pub fn neighborhood_mask(&self, u: u32) -> Result<u32> {
        let masks = self.neighbor_masks()?;
        let mut out = 0u32;
        let mut rest = u;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= masks[i];
        }
        Ok(out)
    }

    /// Neighborhood `E(U)` of a set of node indices.
    pub fn neighborhood(&self, u: &[usize]) -> Result<Vec<usize>> {
        let n = self.node_count();
        let mut out = vec![false; n];
        for &i in u {
            if i >= n {
                return Err(Error::input(format!("node index {i} out of range")));
            }
            for &(j, _) in &self.adj[i] {
                out[j] = true;
            }
        }
        Ok((0..n).filter(|&i| out[i]).collect())
    }

    /// Name-level neighborhood, for external callers.
    pub fn neighborhood_named(&self, u: &[&str]) -> Result<Vec<String>> {
        let idx: Vec<usize> = u
            .iter()
            .map(|name| self.node_index(name))
            .collect::<Result<_>>()?;
        Ok(self
            .neighborhood(&idx)?
            .into_iter()
            .map(|i| self.names[i].clone())
            .collect())
    }

    /// Two-coloring if the graph is bipartite (no self-loops, no odd cycle);
    /// `part1` is the side of the first node.
    pub fn bipartition(&self) -> Option<Bipartition> {
        if self.has_any_loop() {
            return None;
        }
        let n = self.node_count();
        let mut color = vec![u8::MAX; n];
        color[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return None;
                }
            }
        }
        let part1 = (0..n).filter(|&i| color[i] == 0).collect();
        let part2 = (0..n).filter(|&i| color[i] == 1).collect();
        Some(Bipartition { part1, part2 })
    }

    /// All nonempty independent sets as bitmasks, in lexicographic order of
    /// the sorted index sequences. A self-looped node is its own neighbor
    /// and so belongs to no independent set.
    pub fn independent_sets(&self) -> Result<Vec<u32>> {
        let n = self.node_count();
        if n > ENUMERATION_NODE_LIMIT {
            return Err(Error::resource(format!(
                "independent-set enumeration supports at most {ENUMERATION_NODE_LIMIT} nodes, graph has {n}"
            )));
        }
        let masks = self.neighbor_masks()?;
        let mut out = Vec::new();
        fn extend(start: usize, n: usize, current: u32, masks: &[u32], out: &mut Vec<u32>) {
            for i in start..n {
                let bit = 1u32 << i;
                // excluded if adjacent to the current set or to itself
                if masks[i] & (current | bit) != 0 {
                    continue;
                }
                out.push(current | bit);
                extend(i + 1, n, current | bit, masks, out);
            }
        }
        extend(0, n, 0, masks, &mut out);
        Ok(out)
    }

    /// Rooted tree over the whole graph; the non-loop edges must form a tree.
    pub fn rooted_tree(&self, root: usize) -> Result<RootedTree> {
        let non_loop = self.edges.iter().filter(|e| !e.is_loop()).count();
        if non_loop != self.node_count() - 1 {
            return Err(Error::input("non-loop edges do not form a tree"));
        }
        Ok(self.subtree_from(root, &[]))
    }

    /// BFS tree from `root` that never enters `banned` nodes (used to peel
    /// the trees appended to a cycle).
    fn subtree_from(&self, root: usize, banned: &[usize]) -> RootedTree {
        let n = self.node_count();
        let mut blocked = vec![false; n];
        for &b in banned {
            blocked[b] = true;
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0usize; n];
        let mut order = vec![root];
        let mut seen = blocked.clone();
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(v, _) in &self.adj[u] {
                if v != u && !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    children[u].push(v);
                    depth[v] = depth[u] + 1;
                    order.push(v);
                }
            }
        }
        RootedTree {
            root,
            order,
            parent,
            children,
            depth,
        }
    }

    /// Classifies the graph into the closed-form topology families.
    pub fn classify_topology(&self) -> TopologyClass {
        let n = self.node_count();
        let m = self.edge_count();
        let loops: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.is_loop())
            .map(|e| e.u)
            .collect();

        if loops.is_empty() && m == n - 1 {
            return TopologyClass {
                tag: TopologyTag::Tree,
                cycle: Vec::new(),
                attached: Vec::new(),
            };
        }
        if loops.len() == 1 && m == n {
            // the n-1 non-loop edges of a connected graph form a tree
            let r = loops[0];
            return TopologyClass {
                tag: TopologyTag::TreePlusSelfLoop,
                cycle: vec![r],
                attached: vec![self.subtree_from(r, &[])],
            };
        }
        if loops.is_empty() && m == n {
            let cycle = self.unique_cycle();
            let odd = cycle.len() % 2 == 1;
            if cycle.len() == n {
                return TopologyClass {
                    tag: if odd {
                        TopologyTag::OddCycle
                    } else {
                        TopologyTag::EvenCycle
                    },
                    cycle,
                    attached: Vec::new(),
                };
            }
            let attached = cycle
                .iter()
                .filter(|&&r| self.degree(r) > 2)
                .map(|&r| {
                    let banned: Vec<usize> =
                        cycle.iter().copied().filter(|&c| c != r).collect();
                    self.subtree_from(r, &banned)
                })
                .collect();
            return TopologyClass {
                tag: if odd {
                    TopologyTag::TreePlusOddCycleEdge
                } else {
                    TopologyTag::TreePlusEvenCycleEdge
                },
                cycle,
                attached,
            };
        }
        TopologyClass {
            tag: TopologyTag::Other,
            cycle: Vec::new(),
            attached: Vec::new(),
        }
    }

    /// The unique cycle of a connected loop-free graph with `|E| = |V|`:
    /// peel degree-1 nodes, then walk the remaining 2-regular core starting
    /// from its smallest node towards its smallest neighbor.
    fn unique_cycle(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut deg: Vec<usize> = (0..n).map(|i| self.degree(i)).collect();
        let mut removed = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| deg[i] == 1).collect();
        while let Some(u) = stack.pop() {
            removed[u] = true;
            for &(v, _) in &self.adj[u] {
                if !removed[v] {
                    deg[v] -= 1;
                    if deg[v] == 1 {
                        stack.push(v);
                    }
                }
            }
        }
        let start = (0..n).find(|&i| !removed[i]).expect("cycle core exists");
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = self.adj[start]
            .iter()
            .map(|&(v, _)| v)
            .filter(|&v| !removed[v])
            .min()
            .expect("core node has core neighbors");
        while cur != start {
            cycle.push(cur);
            let next = self.adj[cur]
                .iter()
                .map(|&(v, _)| v)
                .find(|&v| !removed[v] && v != prev)
                .expect("2-regular core");
            prev = cur;
            cur = next;
        }
        cycle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(edges: &[(&str, &str)]) -> Multigraph {
        Multigraph::from_named_edges(edges).unwrap()
    }

    fn names(g: &Multigraph, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| g.name(i).to_string()).collect()
    }

    #[test]
    fn parse_and_round_trip() {
        let text = "# triangle with a loop\n1 2\n2 3\n1 3\n3 3\n";
        let g = Multigraph::parse(text).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 4);
        let again = Multigraph::parse(&g.serialize()).unwrap();
        let multiset = |g: &Multigraph| {
            let mut v: Vec<(String, String)> = g
                .edges()
                .iter()
                .map(|e| {
                    let a = g.name(e.u).to_string();
                    let b = g.name(e.v).to_string();
                    (a.clone().min(b.clone()), a.max(b))
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(multiset(&g), multiset(&again));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Multigraph::parse("1 2\n1 2\n").is_err()); // duplicate edge
        assert!(Multigraph::parse("1 2\n3 4\n").is_err()); // disconnected
        assert!(Multigraph::parse("1 1\n").is_err()); // single node
        assert!(Multigraph::parse("1 2 3\n").is_err()); // token count
        assert!(Multigraph::parse("").is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        let u = [tri.node_index("1").unwrap()];
        assert_eq!(names(&tri, &tri.neighborhood(&u).unwrap()), ["2", "3"]);

        let path = graph(&[("1", "2"), ("2", "3")]);
        let u = [path.node_index("1").unwrap(), path.node_index("3").unwrap()];
        assert_eq!(names(&path, &path.neighborhood(&u).unwrap()), ["2"]);

        // a self-looped node is in the neighborhood of any set containing it
        let looped = graph(&[("1", "2"), ("1", "1")]);
        let u = [looped.node_index("1").unwrap()];
        let nb = looped.neighborhood(&u).unwrap();
        assert!(nb.contains(&looped.node_index("1").unwrap()));

        assert!(looped.neighborhood_named(&["nope"]).is_err());
        assert!(looped.neighborhood(&[]).unwrap().is_empty());
    }

    #[test]
    fn neighborhood_of_everything_is_everything() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]);
        let all: Vec<usize> = (0..g.node_count()).collect();
        assert_eq!(g.neighborhood(&all).unwrap(), all);
    }

    #[test]
    fn bipartition_examples() {
        let path = graph(&[("1", "2"), ("2", "3")]);
        let b = path.bipartition().unwrap();
        assert_eq!(names(&path, &b.part1), ["1", "3"]);
        assert_eq!(names(&path, &b.part2), ["2"]);

        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        assert!(tri.bipartition().is_none());

        let looped = graph(&[("1", "2"), ("2", "2")]);
        assert!(looped.bipartition().is_none());
    }

    /// Brute-force two-coloring oracle; self-loops make coloring infeasible.
    fn bipartite_brute(g: &Multigraph) -> bool {
        let n = g.node_count();
        (0..(1u32 << n)).any(|colors| {
            g.edges().iter().all(|e| {
                let cu = colors >> e.u & 1;
                let cv = colors >> e.v & 1;
                cu != cv
            })
        })
    }

    #[test]
    fn bipartition_matches_brute_force() {
        let cases = [
            vec![("1", "2"), ("2", "3")],
            vec![("1", "2"), ("2", "3"), ("1", "3")],
            vec![("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
            vec![("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "1")],
            vec![("1", "2"), ("1", "1")],
            vec![("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")],
        ];
        for case in cases {
            let g = graph(&case);
            assert_eq!(
                g.bipartition().is_some(),
                bipartite_brute(&g),
                "graph {case:?}"
            );
        }
    }

    #[test]
    fn bipartition_matches_brute_force_on_all_small_graphs() {
        // every connected loop-free graph up to 6 nodes, and every
        // multigraph with loops up to 4 nodes
        for g in (2..=6).flat_map(|n| crate::verify::enumerate_connected_multigraphs(n, false)) {
            assert_eq!(g.bipartition().is_some(), bipartite_brute(&g));
        }
        for g in (2..=4).flat_map(|n| crate::verify::enumerate_connected_multigraphs(n, true)) {
            assert_eq!(g.bipartition().is_some(), bipartite_brute(&g));
        }
    }

    #[test]
    fn independent_sets_match_subset_filter_on_all_small_graphs() {
        let check = |g: &Multigraph| {
            let n = g.node_count();
            let masks = g.neighbor_masks().unwrap();
            let mut brute: Vec<u32> = (1..(1u32 << n))
                .filter(|&s| (0..n).all(|i| s >> i & 1 == 0 || masks[i] & s == 0))
                .collect();
            let mut got = g.independent_sets().unwrap();
            brute.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, brute);
        };
        for g in (2..=5).flat_map(|n| crate::verify::enumerate_connected_multigraphs(n, false)) {
            check(&g);
        }
        for g in (2..=4).flat_map(|n| crate::verify::enumerate_connected_multigraphs(n, true)) {
            check(&g);
        }
    }

    #[test]
    fn independent_sets_examples() {
        let tri = graph(&[("1", "2"), ("2", "3"), ("1", "3")]);
        assert_eq!(tri.independent_sets().unwrap(), vec![0b001, 0b010, 0b100]);

        let path = graph(&[("1", "2"), ("2", "3")]);
        // lexicographic: {1}, {1,3}, {2}, {3}
        assert_eq!(
            path.independent_sets().unwrap(),
            vec![0b001, 0b101, 0b010, 0b100]
        );

        // the looped node never appears
        let looped = graph(&[("1", "2"), ("1", "1")]);
        let sets = looped.independent_sets().unwrap();
        let one = 1u32 << looped.node_index("1").unwrap();
        assert!(sets.iter().all(|s| s & one == 0));
    }

    #[test]
    fn independent_sets_match_subset_filter() {
        let cases = [
            vec![("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")],
            vec![("1", "2"), ("2", "3"), ("3", "1"), ("3", "4"), ("4", "4")],
            vec![("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")],
        ];
        for case in cases {
            let g = graph(&case);
            let n = g.node_count();
            let masks = g.neighbor_masks().unwrap();
            let mut brute: Vec<u32> = (1..(1u32 << n))
                .filter(|&s| (0..n).all(|i| s >> i & 1 == 0 || masks[i] & s == 0))
                .collect();
            let mut got = g.independent_sets().unwrap();
            brute.sort_unstable();
            got.sort_unstable();
            assert_eq!(got, brute, "graph {case:?}");
        }
    }

    #[test]
    fn classify_examples() {
        let c5 = graph(&[("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "1")]);
        assert_eq!(c5.classify_topology().tag, TopologyTag::OddCycle);
        assert_eq!(c5.classify_topology().cycle.len(), 5);

        let star = graph(&[("c", "a"), ("c", "b"), ("c", "d")]);
        assert_eq!(star.classify_topology().tag, TopologyTag::Tree);

        let paw = graph(&[("1", "2"), ("2", "3"), ("1", "3"), ("1", "4")]);
        let t = paw.classify_topology();
        assert_eq!(t.tag, TopologyTag::TreePlusOddCycleEdge);
        assert_eq!(names(&paw, &t.cycle), ["1", "2", "3"]);
        assert_eq!(t.attached.len(), 1);
        assert_eq!(t.attached[0].root, paw.node_index("1").unwrap());
        assert_eq!(t.attached[0].order.len(), 2);

        let lollipop = graph(&[("1", "2"), ("1", "1")]);
        let t = lollipop.classify_topology();
        assert_eq!(t.tag, TopologyTag::TreePlusSelfLoop);
        assert_eq!(names(&lollipop, &t.cycle), ["1"]);

        let c4 = graph(&[("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")]);
        assert_eq!(c4.classify_topology().tag, TopologyTag::EvenCycle);

        let c4_pendant = graph(&[
            ("1", "2"),
            ("2", "3"),
            ("3", "4"),
            ("4", "1"),
            ("2", "5"),
        ]);
        assert_eq!(
            c4_pendant.classify_topology().tag,
            TopologyTag::TreePlusEvenCycleEdge
        );

        let k4 = graph(&[
            ("1", "2"),
            ("1", "3"),
            ("1", "4"),
            ("2", "3"),
            ("2", "4"),
            ("3", "4"),
        ]);
        assert_eq!(k4.classify_topology().tag, TopologyTag::Other);

        // tree topology implies bipartite
        assert!(star.bipartition().is_some());
    }
}
