use std::fmt;

use super::{AgentId, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Legitimate,
    Malicious,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Legitimate => "legitimate",
            Role::Malicious => "malicious",
        })
    }
}

/// Partition of the agents into communities `V_1..V_c`, plus the malicious set.
///
/// Communities are 0-indexed internally; text formats print them 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityLayout {
    communities: Vec<Vec<AgentId>>,
    community_of: Vec<usize>,
    malicious: Vec<bool>,
}

impl CommunityLayout {
    /// Validates that `communities` partitions `0..n` and that every malicious
    /// id is in range.
    pub fn new(
        n: usize,
        communities: Vec<Vec<AgentId>>,
        malicious: impl IntoIterator<Item = AgentId>,
    ) -> Result<Self, GraphError> {
        let mut community_of = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(communities.len());
        for (i, mut members) in communities.into_iter().enumerate() {
            if members.is_empty() {
                return Err(GraphError::EmptySubset);
            }
            for &u in &members {
                if u >= n {
                    return Err(GraphError::AgentOutOfRange { agent: u, n });
                }
                if community_of[u] != usize::MAX {
                    return Err(GraphError::RepeatedAgent(u));
                }
                community_of[u] = i;
            }
            members.sort_unstable();
            sorted.push(members);
        }
        if let Some(u) = community_of.iter().position(|&c| c == usize::MAX) {
            return Err(GraphError::Unassigned(u));
        }
        let mut flags = vec![false; n];
        for u in malicious {
            if u >= n {
                return Err(GraphError::AgentOutOfRange { agent: u, n });
            }
            if std::mem::replace(&mut flags[u], true) {
                return Err(GraphError::RepeatedAgent(u));
            }
        }
        Ok(Self {
            communities: sorted,
            community_of,
            malicious: flags,
        })
    }

    /// Everyone in one community, nobody malicious.
    pub fn single(n: usize) -> Self {
        Self::new(n, vec![(0..n).collect()], []).expect("trivial partition")
    }

    pub fn n(&self) -> usize {
        self.community_of.len()
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn communities(&self) -> &[Vec<AgentId>] {
        &self.communities
    }

    /// Sorted members of community `i`.
    pub fn members(&self, i: usize) -> &[AgentId] {
        &self.communities[i]
    }

    pub fn community_of(&self, u: AgentId) -> usize {
        self.community_of[u]
    }

    pub fn role(&self, u: AgentId) -> Role {
        if self.malicious[u] {
            Role::Malicious
        } else {
            Role::Legitimate
        }
    }

    pub fn is_malicious(&self, u: AgentId) -> bool {
        self.malicious[u]
    }

    pub fn malicious(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.n()).filter(|&u| self.malicious[u])
    }

    pub fn legitimate(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.n()).filter(|&u| !self.malicious[u])
    }

    /// `f_i`: malicious agents inside community `i`.
    pub fn malicious_count(&self, i: usize) -> usize {
        self.communities[i]
            .iter()
            .filter(|&&u| self.malicious[u])
            .count()
    }

    pub fn legitimate_members(&self, i: usize) -> impl Iterator<Item = AgentId> + '_ {
        self.communities[i]
            .iter()
            .copied()
            .filter(|&u| !self.malicious[u])
    }

    pub fn malicious_members(&self, i: usize) -> impl Iterator<Item = AgentId> + '_ {
        self.communities[i]
            .iter()
            .copied()
            .filter(|&u| self.malicious[u])
    }
}
