//! Synchronous median consensus rounds.
//!
//! Each legitimate agent moves to `alpha * own + (1 - alpha) * median`, where
//! the median is taken over the values its neighbors present at the current
//! round (its own value excluded). Malicious agents have no update rule; they
//! present whatever the [`AdversaryStrategy`] dictates.

mod adversary;
mod trace;

pub use adversary::AdversaryStrategy;
pub use trace::{Hull, IsolationBreach, Trace};

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{AgentId, CommunityLayout, Graph};
use crate::scenarios::{InitializerSpec, LegitimateInit};

/// Slack used when comparing values against initial hulls. Accounts for
/// rounding in the convex update only.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Agent counts at or above this run each round on the rayon pool.
pub const PARALLEL_THRESHOLD: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("median of an empty sequence")]
    EmptyMedian,
}

/// Median of `values`: the middle element for odd length, the mean of the two
/// middle elements for even length.
pub fn median(values: &[f64]) -> Result<f64, ProtocolError> {
    if values.is_empty() {
        return Err(ProtocolError::EmptyMedian);
    }
    let mut buf = values.to_vec();
    Ok(median_in_place(&mut buf))
}

/// Median of a nonempty buffer; reorders the buffer.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let d = buf.len();
    let mid = d / 2;
    let (lower, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    if d % 2 == 1 {
        *upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * below + 0.5 * *upper
    }
}

/// Values of all agents at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub round: usize,
    pub values: Vec<f64>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub alpha: f64,
    pub rounds: usize,
    pub seed: u64,
    pub graph: Graph,
    pub layout: CommunityLayout,
    pub initializer: InitializerSpec,
    pub adversary: AdversaryStrategy,
    /// Declared per-community bound on external edges, checked on validation.
    pub kappa_budget: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigIssue {
    AlphaOutOfRange(f64),
    ZeroRounds,
    LayoutSize {
        layout: usize,
        graph: usize,
    },
    IsolatedLegitimate(Vec<AgentId>),
    InitializerArity {
        expected: usize,
        found: usize,
    },
    ExplicitLength {
        community: usize,
        expected: usize,
        found: usize,
    },
    BadDistribution {
        community: usize,
    },
    NonFiniteValue(&'static str),
    KappaArity {
        expected: usize,
        found: usize,
    },
    KappaBudget {
        community: usize,
        declared: usize,
        agent: AgentId,
        external: usize,
    },
    AdversaryEntry {
        attacker: AgentId,
        target: AgentId,
    },
    EmptySchedule,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigIssue::AlphaOutOfRange(a) => write!(f, "alpha {a} is not in (0, 1)"),
            ConfigIssue::ZeroRounds => write!(f, "rounds must be at least 1"),
            ConfigIssue::LayoutSize { layout, graph } => {
                write!(f, "layout covers {layout} agents but the graph has {graph}")
            }
            ConfigIssue::IsolatedLegitimate(ids) => {
                write!(f, "legitimate agents without neighbors: {ids:?}")
            }
            ConfigIssue::InitializerArity { expected, found } => {
                write!(f, "initializer lists {found} communities, layout has {expected}")
            }
            ConfigIssue::ExplicitLength { community, expected, found } => write!(
                f,
                "community {}: {found} explicit values for {expected} legitimate members",
                community + 1
            ),
            ConfigIssue::BadDistribution { community } => write!(
                f,
                "community {}: normal parameters must be finite with variance >= 0",
                community + 1
            ),
            ConfigIssue::NonFiniteValue(what) => write!(f, "non-finite {what} value"),
            ConfigIssue::KappaArity { expected, found } => {
                write!(f, "kappa budget lists {found} communities, layout has {expected}")
            }
            ConfigIssue::KappaBudget { community, declared, agent, external } => write!(
                f,
                "community {}: agent {agent} has {external} external edges, declared kappa is {declared}",
                community + 1
            ),
            ConfigIssue::AdversaryEntry { attacker, target } => write!(
                f,
                "adversary entry {attacker}->{target} is not a malicious agent's edge"
            ),
            ConfigIssue::EmptySchedule => write!(f, "scripted adversary has an empty schedule"),
        }
    }
}

/// All validation failures of a configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "invalid configuration: {}", parts.join("; "))
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut issues = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            issues.push(ConfigIssue::AlphaOutOfRange(self.alpha));
        }
        if self.rounds == 0 {
            issues.push(ConfigIssue::ZeroRounds);
        }
        let (g, layout) = (&self.graph, &self.layout);
        if layout.n() != g.n() {
            issues.push(ConfigIssue::LayoutSize {
                layout: layout.n(),
                graph: g.n(),
            });
            return Err(ConfigError(issues));
        }
        let isolated: Vec<AgentId> = layout
            .legitimate()
            .filter(|&u| g.adj(u).is_empty())
            .collect();
        if !isolated.is_empty() {
            issues.push(ConfigIssue::IsolatedLegitimate(isolated));
        }

        let init = &self.initializer;
        if init.communities.len() != layout.community_count() {
            issues.push(ConfigIssue::InitializerArity {
                expected: layout.community_count(),
                found: init.communities.len(),
            });
        }
        for (i, spec) in init.communities.iter().enumerate() {
            match spec {
                LegitimateInit::Normal { mean, variance } => {
                    if !(mean.is_finite() && variance.is_finite() && *variance >= 0.0) {
                        issues.push(ConfigIssue::BadDistribution { community: i });
                    }
                }
                LegitimateInit::Explicit(values) => {
                    if i < layout.community_count() {
                        let expected = layout.legitimate_members(i).count();
                        if values.len() != expected {
                            issues.push(ConfigIssue::ExplicitLength {
                                community: i,
                                expected,
                                found: values.len(),
                            });
                        }
                    }
                    if values.iter().any(|v| !v.is_finite()) {
                        issues.push(ConfigIssue::NonFiniteValue("explicit initial"));
                    }
                }
            }
        }
        if init.malicious.is_some_and(|v| !v.is_finite()) {
            issues.push(ConfigIssue::NonFiniteValue("malicious initial"));
        }

        if let Some(budget) = &self.kappa_budget {
            if budget.len() != layout.community_count() {
                issues.push(ConfigIssue::KappaArity {
                    expected: layout.community_count(),
                    found: budget.len(),
                });
            } else {
                for (i, &declared) in budget.iter().enumerate() {
                    let members = layout.members(i);
                    for &u in members {
                        let external = g
                            .adj(u)
                            .iter()
                            .filter(|&&v| layout.community_of(v) != i)
                            .count();
                        if external > declared {
                            issues.push(ConfigIssue::KappaBudget {
                                community: i,
                                declared,
                                agent: u,
                                external,
                            });
                        }
                    }
                }
            }
        }

        match &self.adversary {
            AdversaryStrategy::Scripted(s) if s.is_empty() => {
                issues.push(ConfigIssue::EmptySchedule)
            }
            AdversaryStrategy::PerNeighbor { table, .. } => {
                for &(attacker, target) in table.keys() {
                    if attacker >= g.n()
                        || !layout.is_malicious(attacker)
                        || !g.has_edge(attacker, target)
                    {
                        issues.push(ConfigIssue::AdversaryEntry { attacker, target });
                    }
                }
            }
            _ => {}
        }
        if self.adversary.values().iter().any(|v| !v.is_finite()) {
            issues.push(ConfigIssue::NonFiniteValue("adversary"));
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(issues))
        }
    }
}

/// Next value of `u` and, for legitimate agents, the median it used.
fn next_value(
    state: &StateVector,
    g: &Graph,
    layout: &CommunityLayout,
    alpha: f64,
    adversary: &AdversaryStrategy,
    u: AgentId,
    buf: &mut Vec<f64>,
) -> (f64, Option<f64>) {
    let t = state.round;
    if layout.is_malicious(u) {
        return (adversary.nominal(u, t + 1), None);
    }
    buf.clear();
    buf.extend(g.adj(u).iter().map(|&v| {
        if layout.is_malicious(v) {
            adversary.presented(v, u, t)
        } else {
            state.values[v]
        }
    }));
    let m = median_in_place(buf);
    (alpha * state.values[u] + (1.0 - alpha) * m, Some(m))
}

/// One synchronous round. Every legitimate agent reads only `state`.
///
/// Panics if a legitimate agent has no neighbors; [`run`] rejects such
/// configurations up front.
pub fn step(
    state: &StateVector,
    g: &Graph,
    layout: &CommunityLayout,
    alpha: f64,
    adversary: &AdversaryStrategy,
) -> StateVector {
    step_with_medians(state, g, layout, alpha, adversary).0
}

fn step_with_medians(
    state: &StateVector,
    g: &Graph,
    layout: &CommunityLayout,
    alpha: f64,
    adversary: &AdversaryStrategy,
) -> (StateVector, Vec<Option<f64>>) {
    let mut buf = Vec::new();
    let (values, medians) = (0..g.n())
        .map(|u| next_value(state, g, layout, alpha, adversary, u, &mut buf))
        .unzip();
    (
        StateVector {
            round: state.round + 1,
            values,
        },
        medians,
    )
}

/// Same as [`step`], with agents spread over the rayon pool.
pub fn step_parallel(
    state: &StateVector,
    g: &Graph,
    layout: &CommunityLayout,
    alpha: f64,
    adversary: &AdversaryStrategy,
) -> StateVector {
    step_parallel_with_medians(state, g, layout, alpha, adversary).0
}

fn step_parallel_with_medians(
    state: &StateVector,
    g: &Graph,
    layout: &CommunityLayout,
    alpha: f64,
    adversary: &AdversaryStrategy,
) -> (StateVector, Vec<Option<f64>>) {
    let (values, medians) = (0..g.n())
        .into_par_iter()
        .map_init(Vec::new, |buf, u| {
            next_value(state, g, layout, alpha, adversary, u, buf)
        })
        .unzip();
    (
        StateVector {
            round: state.round + 1,
            values,
        },
        medians,
    )
}

/// Runs `config.rounds` synchronous rounds from the seeded initial state.
///
/// While running, every legitimate agent's median is compared against its
/// community's legitimate initial hull (with [`DEFAULT_TOLERANCE`]); the first
/// breach per community is kept on the trace.
pub fn run(config: &SimulationConfig) -> Result<Trace, ConfigError> {
    config.validate()?;
    let (g, layout) = (&config.graph, &config.layout);
    let n = g.n();
    let initial = config
        .initializer
        .initial_values(layout, &config.adversary, config.seed);

    let legitimate_hulls: Vec<Option<Hull>> = (0..layout.community_count())
        .map(|i| Hull::of(layout.legitimate_members(i).map(|u| initial[u])))
        .collect();
    let member_hulls: Vec<Hull> = (0..layout.community_count())
        .map(|i| {
            Hull::of(layout.members(i).iter().map(|&u| initial[u])).expect("nonempty community")
        })
        .collect();
    let mut isolation: Vec<Option<IsolationBreach>> = vec![None; layout.community_count()];

    let mut values = Vec::with_capacity(n * (config.rounds + 1));
    values.extend_from_slice(&initial);
    let mut state = StateVector {
        round: 0,
        values: initial,
    };
    for _ in 0..config.rounds {
        let (next, medians) = if n >= PARALLEL_THRESHOLD {
            step_parallel_with_medians(&state, g, layout, config.alpha, &config.adversary)
        } else {
            step_with_medians(&state, g, layout, config.alpha, &config.adversary)
        };
        for (u, m) in medians.iter().enumerate() {
            let Some(m) = *m else { continue };
            let c = layout.community_of(u);
            if isolation[c].is_some() {
                continue;
            }
            if let Some(hull) = legitimate_hulls[c] {
                if !hull.contains(m, DEFAULT_TOLERANCE) {
                    isolation[c] = Some(IsolationBreach {
                        round: state.round,
                        agent: u,
                        median: m,
                    });
                }
            }
        }
        values.extend_from_slice(&next.values);
        state = next;
    }
    Ok(Trace {
        config: config.clone(),
        values,
        legitimate_hulls,
        member_hulls,
        isolation,
    })
}
