use std::fmt;

use super::{
    complete_rs_violation, is_rs_excess_robust, reachable_set, EnumerationLimit, Predicate,
    RobustnessError, RobustnessWitness, Violation,
};
use crate::graph::{AgentId, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustnessMethod {
    /// Closed form for a complete induced subgraph.
    CompleteCertificate,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommunityFailure {
    /// The induced subgraph is not `(kappa, f + 1)`-excess robust.
    Robustness,
    /// `agent` has internal degree below `2f + kappa + 1`.
    Degree {
        agent: AgentId,
        degree: usize,
        required: usize,
    },
}

/// Evaluation of the `(kappa, f)`-community predicate for one subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityCheck {
    pub members: Vec<AgentId>,
    pub kappa: usize,
    pub f: usize,
    pub min_degree: usize,
    pub required_degree: usize,
    pub method: RobustnessMethod,
    /// Robustness of the induced subgraph, with global agent ids.
    pub robustness: RobustnessWitness,
    pub failures: Vec<CommunityFailure>,
}

impl CommunityCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks whether the subgraph induced by `members` is a `(kappa, f)`-community,
/// with `kappa` measured on `g`. Complete induced subgraphs use the closed
/// form; anything else is enumerated under `limit`.
pub fn is_community(
    g: &Graph,
    members: &[AgentId],
    f: usize,
    limit: EnumerationLimit,
) -> Result<CommunityCheck, RobustnessError> {
    let kappa = g.kappa(members)?;
    let induced = g.induced_subgraph(members)?;
    let sub = &induced.graph;
    let s = f + 1;
    let predicate = Predicate::RsExcess { r: kappa, s };

    let (method, local) = if sub.is_complete() {
        let violation = match complete_rs_violation(sub.n(), kappa, s) {
            None => None,
            Some((a, b)) => Some(Violation {
                first: reachable_set(sub, &a, kappa)?,
                second: reachable_set(sub, &b, kappa)?,
            }),
        };
        (
            RobustnessMethod::CompleteCertificate,
            RobustnessWitness {
                predicate,
                violation,
            },
        )
    } else {
        (
            RobustnessMethod::Exhaustive,
            is_rs_excess_robust(sub, kappa, s, limit)?,
        )
    };
    let robustness = local.relabel(&induced.members);

    let required_degree = 2 * f + kappa + 1;
    let (weakest, min_degree) = (0..sub.n())
        .map(|u| (u, sub.adj(u).len()))
        .min_by_key(|&(_, d)| d)
        .expect("membership rejects empty subsets");

    let mut failures = Vec::new();
    if !robustness.verdict() {
        failures.push(CommunityFailure::Robustness);
    }
    if min_degree < required_degree {
        failures.push(CommunityFailure::Degree {
            agent: induced.global(weakest),
            degree: min_degree,
            required: required_degree,
        });
    }
    Ok(CommunityCheck {
        members: induced.members,
        kappa,
        f,
        min_degree,
        required_degree,
        method,
        robustness,
        failures,
    })
}

impl fmt::Display for CommunityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "community: {} agents, kappa = {}, f = {}",
            self.members.len(),
            self.kappa,
            self.f
        )?;
        writeln!(f, "verdict: {}", self.holds())?;
        let method = match self.method {
            RobustnessMethod::CompleteCertificate => "complete-graph certificate",
            RobustnessMethod::Exhaustive => "exhaustive enumeration",
        };
        writeln!(f, "robustness ({method}):")?;
        for line in self.robustness.to_string().lines() {
            writeln!(f, "  {line}")?;
        }
        writeln!(
            f,
            "min degree: {} (required {})",
            self.min_degree, self.required_degree
        )?;
        for failure in &self.failures {
            match failure {
                CommunityFailure::Robustness => writeln!(f, "failed: robustness")?,
                CommunityFailure::Degree {
                    agent,
                    degree,
                    required,
                } => writeln!(f, "failed: degree (agent {agent}: {degree} < {required})")?,
            }
        }
        Ok(())
    }
}
