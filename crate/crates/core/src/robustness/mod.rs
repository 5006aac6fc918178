//! Excess reachability, `r`-excess and `(r, s)`-excess robustness, the
//! `(kappa, f)`-community predicate, and the reachability-preservation check
//! for community members that gain external neighbors.

mod certificate;
mod community;
mod enumerate;
mod preservation;

pub use certificate::{complete_rs_certificate, complete_rs_violation};
pub use community::{is_community, CommunityCheck, CommunityFailure, RobustnessMethod};
pub use enumerate::{
    evaluate_pair, is_r_excess_robust, is_rs_excess_robust, EnumerationLimit, PairEvaluation,
    HARD_ENUMERATION_LIMIT,
};
pub use preservation::{
    verify_reachability_preservation, PreservationCounterexample, PreservationMode,
    PreservationReport,
};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{AgentId, Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobustnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("agent {0} is not a member of the subset")]
    NotInSubset(AgentId),
    #[error("exhaustive enumeration over {n} agents exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("threshold s must be at least 1")]
    ZeroThreshold,
}

/// `|N_u \ S| - |N_u ∩ S|` for a member `u` of `subset`.
pub fn excess(g: &Graph, u: AgentId, subset: &[AgentId]) -> Result<i64, RobustnessError> {
    let mask = g.membership(subset)?;
    g.check_agent(u)?;
    if !mask[u] {
        return Err(RobustnessError::NotInSubset(u));
    }
    Ok(excess_with(g, u, &mask))
}

pub(crate) fn excess_with(g: &Graph, u: AgentId, mask: &[bool]) -> i64 {
    g.adj(u).iter().map(|&v| if mask[v] { -1 } else { 1 }).sum()
}

/// The `r`-excess reachable members of a subset, with every member's excess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityReport {
    pub subset: Vec<AgentId>,
    pub r: usize,
    pub reachable: Vec<AgentId>,
    pub excess: BTreeMap<AgentId, i64>,
}

impl ReachabilityReport {
    /// `|X^r_S| = |S|`.
    pub fn is_full(&self) -> bool {
        self.reachable.len() == self.subset.len()
    }

    /// At least one member is `r`-excess reachable.
    pub fn is_reachable_set(&self) -> bool {
        !self.reachable.is_empty()
    }

    pub(crate) fn relabel(&self, members: &[AgentId]) -> Self {
        Self {
            subset: self.subset.iter().map(|&u| members[u]).collect(),
            r: self.r,
            reachable: self.reachable.iter().map(|&u| members[u]).collect(),
            excess: self.excess.iter().map(|(&u, &e)| (members[u], e)).collect(),
        }
    }
}

pub fn reachable_set(
    g: &Graph,
    subset: &[AgentId],
    r: usize,
) -> Result<ReachabilityReport, RobustnessError> {
    let mask = g.membership(subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let excess: BTreeMap<AgentId, i64> = sorted
        .iter()
        .map(|&u| (u, excess_with(g, u, &mask)))
        .collect();
    let reachable = excess
        .iter()
        .filter(|&(_, &e)| e >= r as i64)
        .map(|(&u, _)| u)
        .collect();
    Ok(ReachabilityReport {
        subset: sorted,
        r,
        reachable,
        excess,
    })
}

/// Which robustness predicate a witness answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    /// Every disjoint nonempty pair has a member that is `r`-excess reachable.
    Excess { r: usize },
    /// `|X1| + |X2| >= s`, or one of the X sets is the whole subset.
    RsExcess { r: usize, s: usize },
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Excess { r } => write!(f, "{r}-excess robust"),
            Predicate::RsExcess { r, s } => write!(f, "({r}, {s})-excess robust"),
        }
    }
}

/// A disjoint pair of subsets on which the predicate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub first: ReachabilityReport,
    pub second: ReachabilityReport,
}

/// Outcome of a robustness check. A `false` verdict always carries a
/// violating pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessWitness {
    pub predicate: Predicate,
    pub violation: Option<Violation>,
}

impl RobustnessWitness {
    pub fn verdict(&self) -> bool {
        self.violation.is_none()
    }

    pub(crate) fn relabel(&self, members: &[AgentId]) -> Self {
        Self {
            predicate: self.predicate,
            violation: self.violation.as_ref().map(|v| Violation {
                first: v.first.relabel(members),
                second: v.second.relabel(members),
            }),
        }
    }
}

fn id_list(ids: &[AgentId]) -> String {
    let inner: Vec<String> = ids.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

impl fmt::Display for RobustnessWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "predicate: {}", self.predicate)?;
        writeln!(f, "verdict: {}", self.verdict())?;
        let Some(v) = &self.violation else {
            return Ok(());
        };
        match self.predicate {
            Predicate::Excess { r } => writeln!(
                f,
                "clause failed: neither subset contains a {r}-excess reachable agent"
            )?,
            Predicate::RsExcess { s, .. } => writeln!(
                f,
                "clause failed: |X1| + |X2| = {} < {s}, |X1| = {} < |S1| = {}, |X2| = {} < |S2| = {}",
                v.first.reachable.len() + v.second.reachable.len(),
                v.first.reachable.len(),
                v.first.subset.len(),
                v.second.reachable.len(),
                v.second.subset.len()
            )?,
        }
        for (name, report) in [("S1", &v.first), ("S2", &v.second)] {
            writeln!(f, "{name}: {}", id_list(&report.subset))?;
            writeln!(f, "X{}: {}", &name[1..], id_list(&report.reachable))?;
        }
        writeln!(f, "agent\tsubset\texcess")?;
        for (name, report) in [("S1", &v.first), ("S2", &v.second)] {
            for (u, e) in &report.excess {
                writeln!(f, "{u}\t{name}\t{e}")?;
            }
        }
        Ok(())
    }
}
