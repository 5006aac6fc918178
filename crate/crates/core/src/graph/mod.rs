//! Undirected simple graphs over dense agent ids, community partitions and
//! the degree / external-edge statistics the robustness predicates rely on.

mod format;
mod layout;

pub use format::{parse_communities, parse_graph, write_communities, write_graph, CommunityFile};
pub use layout::{CommunityLayout, Role};

use thiserror::Error;

/// Agents are dense integer ids `0..n`.
pub type AgentId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("agent {agent} is out of range for a graph with {n} agents")]
    AgentOutOfRange { agent: AgentId, n: usize },
    #[error("self-loop on agent {0}")]
    SelfLoop(AgentId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(AgentId, AgentId),
    #[error("graph has no agents")]
    EmptyGraph,
    #[error("subset is empty")]
    EmptySubset,
    #[error("agent {0} listed more than once")]
    RepeatedAgent(AgentId),
    #[error("agent {0} is not assigned to any community")]
    Unassigned(AgentId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Immutable undirected simple graph. Neighbor lists are kept sorted by id so
/// every iteration over a neighborhood is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<AgentId>>,
    edge_count: usize,
}

impl Graph {
    /// Graph with `n` agents and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|u| (0..n).filter(|&v| v != u).collect())
            .collect();
        Self {
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (AgentId, AgentId)>,
    ) -> Result<Self, GraphError> {
        Self::empty(n).with_edges(edges)
    }

    /// Returns a copy of this graph with the extra edges added. Used to join
    /// communities with cross edges.
    pub fn with_edges(
        &self,
        edges: impl IntoIterator<Item = (AgentId, AgentId)>,
    ) -> Result<Self, GraphError> {
        let mut out = self.clone();
        for (u, v) in edges {
            out.insert_edge(u, v)?;
        }
        Ok(out)
    }

    fn insert_edge(&mut self, u: AgentId, v: AgentId) -> Result<(), GraphError> {
        self.check_agent(u)?;
        self.check_agent(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => pos,
        };
        self.adjacency[u].insert(pos, v);
        let pos = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos, u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn check_agent(&self, u: AgentId) -> Result<(), GraphError> {
        if u < self.n() {
            Ok(())
        } else {
            Err(GraphError::AgentOutOfRange {
                agent: u,
                n: self.n(),
            })
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighborhood of `u`.
    pub fn neighbors(&self, u: AgentId) -> Result<&[AgentId], GraphError> {
        self.check_agent(u)?;
        Ok(&self.adjacency[u])
    }

    /// Unchecked neighborhood access for hot loops; panics on a bad id.
    pub(crate) fn adj(&self, u: AgentId) -> &[AgentId] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: AgentId) -> Result<usize, GraphError> {
        self.neighbors(u).map(<[_]>::len)
    }

    pub fn has_edge(&self, u: AgentId, v: AgentId) -> bool {
        u < self.n() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn min_degree(&self) -> Result<usize, GraphError> {
        self.adjacency
            .iter()
            .map(Vec::len)
            .min()
            .ok_or(GraphError::EmptyGraph)
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.edge_count == n * n.saturating_sub(1) / 2
    }

    /// Maximum, over members of `subset`, of the number of neighbors outside
    /// `subset`.
    pub fn kappa(&self, subset: &[AgentId]) -> Result<usize, GraphError> {
        let mask = self.membership(subset)?;
        Ok(subset
            .iter()
            .map(|&u| self.external_degree_with(u, &mask))
            .max()
            .unwrap_or(0))
    }

    /// Number of neighbors of `u` outside `subset`.
    pub fn external_degree(&self, u: AgentId, subset: &[AgentId]) -> Result<usize, GraphError> {
        let mask = self.membership(subset)?;
        self.check_agent(u)?;
        Ok(self.external_degree_with(u, &mask))
    }

    fn external_degree_with(&self, u: AgentId, mask: &[bool]) -> usize {
        self.adjacency[u].iter().filter(|&&v| !mask[v]).count()
    }

    /// Minimum degree of the subgraph induced by `subset`, computed directly
    /// on this graph without materializing the subgraph.
    pub fn induced_min_degree(&self, subset: &[AgentId]) -> Result<usize, GraphError> {
        let mask = self.membership(subset)?;
        Ok(subset
            .iter()
            .map(|&u| self.adjacency[u].iter().filter(|&&v| mask[v]).count())
            .min()
            .expect("membership rejects empty subsets"))
    }

    /// Membership vector for a nonempty, duplicate-free subset of agents.
    pub fn membership(&self, subset: &[AgentId]) -> Result<Vec<bool>, GraphError> {
        if subset.is_empty() {
            return Err(GraphError::EmptySubset);
        }
        let mut mask = vec![false; self.n()];
        for &u in subset {
            self.check_agent(u)?;
            if std::mem::replace(&mut mask[u], true) {
                return Err(GraphError::RepeatedAgent(u));
            }
        }
        Ok(mask)
    }

    /// Subgraph keeping exactly the edges with both endpoints in `subset`.
    /// Local ids follow ascending global id order.
    pub fn induced_subgraph(&self, subset: &[AgentId]) -> Result<InducedSubgraph, GraphError> {
        self.membership(subset)?;
        let mut members = subset.to_vec();
        members.sort_unstable();
        let mut local = vec![usize::MAX; self.n()];
        for (i, &u) in members.iter().enumerate() {
            local[u] = i;
        }
        let adjacency: Vec<Vec<AgentId>> = members
            .iter()
            .map(|&u| {
                self.adjacency[u]
                    .iter()
                    .filter(|&&v| local[v] != usize::MAX)
                    .map(|&v| local[v])
                    .collect()
            })
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(InducedSubgraph {
            graph: Graph {
                adjacency,
                edge_count,
            },
            members,
        })
    }
}

/// An induced subgraph together with its local-to-global id bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `members[local] = global`, ascending.
    pub members: Vec<AgentId>,
}

impl InducedSubgraph {
    pub fn global(&self, local: AgentId) -> AgentId {
        self.members[local]
    }

    pub fn local(&self, global: AgentId) -> Option<AgentId> {
        self.members.binary_search(&global).ok()
    }

    pub fn to_global(&self, locals: &[AgentId]) -> Vec<AgentId> {
        locals.iter().map(|&l| self.members[l]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn neighbors_of_small_graphs() {
        assert_eq!(Graph::complete(3).neighbors(0).unwrap(), &[1, 2]);
        assert_eq!(path3().neighbors(1).unwrap(), &[0, 2]);
        assert!(Graph::empty(2).neighbors(1).unwrap().is_empty());
        assert_eq!(
            path3().neighbors(3),
            Err(GraphError::AgentOutOfRange { agent: 3, n: 3 })
        );
    }

    #[test]
    fn induced_subgraph_restrictions() {
        let k3 = Graph::complete(4).induced_subgraph(&[3, 0, 2]).unwrap();
        assert_eq!(k3.graph, Graph::complete(3));
        assert_eq!(k3.members, vec![0, 2, 3]);
        assert_eq!(k3.local(2), Some(1));
        assert_eq!(k3.local(1), None);

        let ends = path3().induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(ends.graph.n(), 2);
        assert_eq!(ends.graph.edge_count(), 0);

        assert!(matches!(
            path3().induced_subgraph(&[0, 7]),
            Err(GraphError::AgentOutOfRange { agent: 7, .. })
        ));
    }

    #[test]
    fn min_degree_cases() {
        assert_eq!(Graph::complete(15).min_degree().unwrap(), 14);
        assert_eq!(path3().min_degree().unwrap(), 1);
        assert_eq!(Graph::empty(4).min_degree().unwrap(), 0);
        assert_eq!(Graph::empty(0).min_degree(), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn kappa_counts_external_neighbors() {
        let g = Graph::complete(5);
        assert_eq!(g.kappa(&[0, 1, 2, 3, 4]).unwrap(), 0);
        assert_eq!(g.kappa(&[0, 1]).unwrap(), 3);
        assert_eq!(g.kappa(&[]), Err(GraphError::EmptySubset));
        // two triangles joined by a single edge
        let g =
            Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
        assert_eq!(g.kappa(&[0, 1, 2]).unwrap(), 1);
        assert_eq!(g.external_degree(0, &[0, 1, 2]).unwrap(), 0);
    }

    #[test]
    fn generators_and_cross_edges() {
        assert_eq!(Graph::complete(4).edge_count(), 6);
        assert_eq!(Graph::complete(1).edge_count(), 0);

        // K_5 on 0..5 and K_4 on 5..9 joined by 4 cross edges.
        let mut edges: Vec<_> = Graph::complete(5).edges().collect();
        edges.extend(Graph::complete(4).edges().map(|(u, v)| (u + 5, v + 5)));
        let g = Graph::from_edges(9, edges).unwrap();
        let joined = g.with_edges([(4, 5), (4, 6), (4, 7), (4, 8)]).unwrap();
        assert_eq!(joined.edge_count(), 20);
        assert_eq!(joined.edges().count(), 20);

        assert_eq!(g.with_edges([(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(g.with_edges([(1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(
            joined.with_edges([(0, 5), (5, 0)]),
            Err(GraphError::DuplicateEdge(0, 5))
        );
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    fn arb_graph_and_labels() -> impl Strategy<Value = (Graph, Vec<usize>)> {
        arb_graph().prop_flat_map(|g| {
            let n = g.n();
            (Just(g), proptest::collection::vec(0usize..3, n))
        })
    }

    proptest! {
        #[test]
        fn partition_edge_accounting((g, labels) in arb_graph_and_labels()) {
            let parts: Vec<Vec<AgentId>> = (0..3)
                .map(|c| (0..g.n()).filter(|&u| labels[u] == c).collect())
                .filter(|p: &Vec<AgentId>| !p.is_empty())
                .collect();
            prop_assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), g.n());
            let internal: usize = parts
                .iter()
                .map(|p| g.induced_subgraph(p).unwrap().graph.edge_count())
                .sum();
            let g = &g;
            let external_tally: usize = parts
                .iter()
                .flat_map(|p| p.iter().map(move |&u| g.external_degree(u, p).unwrap()))
                .sum();
            prop_assert_eq!(external_tally % 2, 0);
            prop_assert_eq!(internal + external_tally / 2, g.edge_count());
            for p in &parts {
                let k = g.kappa(p).unwrap();
                let leaves = p.iter().any(|&u| g.external_degree(u, p).unwrap() > 0);
                prop_assert_eq!(k == 0, !leaves);
            }
        }

        #[test]
        fn induced_min_degree_two_routes((g, labels) in arb_graph_and_labels()) {
            let subset: Vec<AgentId> = (0..g.n()).filter(|&u| labels[u] != 0).collect();
            prop_assume!(!subset.is_empty());
            let via_subgraph = g.induced_subgraph(&subset).unwrap().graph.min_degree().unwrap();
            prop_assert_eq!(via_subgraph, g.induced_min_degree(&subset).unwrap());
        }

        #[test]
        fn degree_equals_distinct_neighbors(g in arb_graph()) {
            for u in 0..g.n() {
                let nbrs = g.neighbors(u).unwrap();
                prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!nbrs.contains(&u));
                for &v in nbrs {
                    prop_assert!(g.has_edge(v, u));
                }
            }
            prop_assert_eq!(
                (0..g.n()).map(|u| g.degree(u).unwrap()).sum::<usize>(),
                2 * g.edge_count()
            );
        }
    }
}
