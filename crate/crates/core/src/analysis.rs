//! Finite-horizon verdicts for resilient asymptotic consensus.
//!
//! Agreement is declared when the legitimate members of a community stay
//! within `eps` of each other over the last `window` rows of the trace.
//! Safety holds when every legitimate value at every round stays in the
//! community's initial hull widened by `tau`.

use std::fmt;

use thiserror::Error;

use crate::graph::AgentId;
use crate::protocol::{Hull, Trace, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("trace has {rows} rows, fewer than the window of {window}")]
    TraceTooShort { rows: usize, window: usize },
    #[error("window must be at least 1")]
    EmptyWindow,
    #[error("eps and delta must be positive with eps <= delta (got eps = {eps}, delta = {delta})")]
    Thresholds { eps: f64, delta: f64 },
}

/// Which initial values bound the safety interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HullBasis {
    /// Legitimate members only.
    #[default]
    Legitimate,
    /// Every member, malicious included.
    AllMembers,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RacParams {
    pub eps: f64,
    pub delta: f64,
    pub window: usize,
    pub tau: f64,
    pub hull: HullBasis,
}

impl Default for RacParams {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            delta: 1e-3,
            window: 50,
            tau: DEFAULT_TOLERANCE,
            hull: HullBasis::Legitimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub limit: f64,
    pub members: Vec<AgentId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyViolation {
    pub round: usize,
    pub agent: AgentId,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityVerdict {
    pub community: usize,
    pub agreement: bool,
    pub limit: Option<f64>,
    pub hull: Option<Hull>,
    pub safety: bool,
    pub first_violation: Option<SafetyViolation>,
    pub clusters: Vec<Cluster>,
    pub final_spread: f64,
}

impl CommunityVerdict {
    pub fn rac(&self) -> bool {
        self.agreement && self.safety
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RacVerdict {
    pub params: RacParams,
    pub communities: Vec<CommunityVerdict>,
}

/// `max - min` over the legitimate members of `community` at `round`; zero
/// when the community has no legitimate members. Panics on an out-of-range
/// community or round.
pub fn spread(trace: &Trace, community: usize, round: usize) -> f64 {
    let row = trace.row(round);
    Hull::of(
        trace
            .config()
            .layout
            .legitimate_members(community)
            .map(|u| row[u]),
    )
    .map_or(0.0, |h| h.max - h.min)
}

/// Groups values so that each group spans less than `delta`, scanning in
/// ascending order.
fn clusters(mut values: Vec<(f64, AgentId)>, delta: f64) -> Vec<Cluster> {
    values.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(f64, Vec<(f64, AgentId)>)> = Vec::new();
    for (v, u) in values {
        match out.last_mut() {
            Some((start, group)) if v - *start < delta => group.push((v, u)),
            _ => out.push((v, vec![(v, u)])),
        }
    }
    out.into_iter()
        .map(|(_, group)| {
            let limit = group.iter().map(|p| p.0).sum::<f64>() / group.len() as f64;
            let mut members: Vec<AgentId> = group.into_iter().map(|p| p.1).collect();
            members.sort_unstable();
            Cluster { limit, members }
        })
        .collect()
}

pub fn rac_verdict(trace: &Trace, params: &RacParams) -> Result<RacVerdict, AnalysisError> {
    if params.window == 0 {
        return Err(AnalysisError::EmptyWindow);
    }
    if !(params.eps > 0.0 && params.delta > 0.0 && params.eps <= params.delta) {
        return Err(AnalysisError::Thresholds {
            eps: params.eps,
            delta: params.delta,
        });
    }
    let rows = trace.rounds() + 1;
    if rows < params.window {
        return Err(AnalysisError::TraceTooShort {
            rows,
            window: params.window,
        });
    }
    let layout = &trace.config().layout;
    let last = trace.rounds();
    let communities = (0..layout.community_count())
        .map(|i| {
            let legit: Vec<AgentId> = layout.legitimate_members(i).collect();
            let agreement = (rows - params.window..rows).all(|t| spread(trace, i, t) < params.eps);
            let finals: Vec<(f64, AgentId)> =
                legit.iter().map(|&u| (trace.value(last, u), u)).collect();
            let limit = (agreement && !finals.is_empty())
                .then(|| finals.iter().map(|p| p.0).sum::<f64>() / finals.len() as f64);

            let hull = match params.hull {
                HullBasis::Legitimate => trace.legitimate_hull(i),
                HullBasis::AllMembers => Some(trace.member_hull(i)),
            };
            let first_violation = hull.and_then(|h| {
                (0..rows).find_map(|t| {
                    let row = trace.row(t);
                    legit
                        .iter()
                        .find(|&&u| !h.contains(row[u], params.tau))
                        .map(|&u| SafetyViolation {
                            round: t,
                            agent: u,
                            value: row[u],
                        })
                })
            });
            CommunityVerdict {
                community: i,
                agreement,
                limit,
                hull,
                safety: first_violation.is_none(),
                first_violation,
                clusters: clusters(finals, params.delta),
                final_spread: spread(trace, i, last),
            }
        })
        .collect();
    Ok(RacVerdict {
        params: *params,
        communities,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl CommunityVerdict {
    /// One-line summary used by the CLI.
    pub fn summary(&self) -> String {
        let limit = self
            .limit
            .map_or_else(|| "-".to_string(), |l| format!("{l:.6}"));
        format!(
            "community {}: RAC {} (agreement {}, safety {}, clusters {}, limit {limit})",
            self.community + 1,
            yes_no(self.rac()),
            yes_no(self.agreement),
            yes_no(self.safety),
            self.clusters.len()
        )
    }
}

impl fmt::Display for RacVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        let basis = match p.hull {
            HullBasis::Legitimate => "legitimate",
            HullBasis::AllMembers => "all-members",
        };
        writeln!(
            f,
            "# eps = {}, delta = {}, window = {}, tau = {}, hull = {basis}",
            p.eps, p.delta, p.window, p.tau
        )?;
        for c in &self.communities {
            writeln!(f)?;
            writeln!(f, "[community {}]", c.community + 1)?;
            writeln!(f, "rac = {}", c.rac())?;
            writeln!(f, "agreement = {}", c.agreement)?;
            writeln!(f, "final_spread = {}", c.final_spread)?;
            match c.limit {
                Some(l) => writeln!(f, "limit = {l}")?,
                None => writeln!(f, "limit = none")?,
            }
            writeln!(f, "safety = {}", c.safety)?;
            if let Some(h) = c.hull {
                writeln!(f, "hull = [{}, {}]", h.min, h.max)?;
            }
            match c.first_violation {
                Some(v) => writeln!(
                    f,
                    "first_violation = round {}, agent {}, value {}",
                    v.round, v.agent, v.value
                )?,
                None => writeln!(f, "first_violation = none")?,
            }
            writeln!(f, "clusters = {}", c.clusters.len())?;
            for (k, cl) in c.clusters.iter().enumerate() {
                let ids: Vec<String> = cl.members.iter().map(ToString::to_string).collect();
                writeln!(f, "cluster {} = {} : {}", k + 1, cl.limit, ids.join(" "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CommunityLayout, Graph};
    use crate::protocol::{run, AdversaryStrategy, SimulationConfig};
    use crate::scenarios::{InitializerSpec, LegitimateInit};
    use proptest::prelude::*;

    /// Two disconnected triangles in one community, so legitimate agents
    /// settle on two different values.
    fn split_trace(rounds: usize) -> Trace {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let config = SimulationConfig {
            alpha: 0.5,
            rounds,
            seed: 0,
            graph: g,
            layout: CommunityLayout::single(6),
            initializer: InitializerSpec {
                communities: vec![LegitimateInit::Explicit(vec![
                    2.0, 3.0, 4.0, 30.0, 31.0, 32.0,
                ])],
                malicious: None,
            },
            adversary: AdversaryStrategy::Constant(0.0),
            kappa_budget: None,
        };
        run(&config).unwrap()
    }

    fn clique_trace(rounds: usize) -> Trace {
        let config = SimulationConfig {
            alpha: 0.9,
            rounds,
            seed: 4,
            graph: Graph::complete(6),
            layout: CommunityLayout::new(6, vec![(0..6).collect()], [5]).unwrap(),
            initializer: InitializerSpec {
                communities: vec![LegitimateInit::Normal {
                    mean: 0.0,
                    variance: 4.0,
                }],
                malicious: None,
            },
            adversary: AdversaryStrategy::Constant(50.0),
            kappa_budget: None,
        };
        run(&config).unwrap()
    }

    #[test]
    fn spread_values() {
        let trace = split_trace(200);
        assert_eq!(spread(&trace, 0, 0), 30.0);
        assert!((spread(&trace, 0, 200) - 28.0).abs() < 1e-9);
    }

    #[test]
    fn split_community_has_two_clusters() {
        let trace = split_trace(200);
        let v = rac_verdict(&trace, &RacParams::default()).unwrap();
        let c = &v.communities[0];
        assert!(!c.agreement);
        assert!(c.safety);
        assert_eq!(c.clusters.len(), 2);
        assert_eq!(c.clusters[0].members, vec![0, 1, 2]);
        assert_eq!(c.clusters[1].members, vec![3, 4, 5]);
        assert!((c.clusters[0].limit - 3.0).abs() < 1e-9);
        assert!((c.clusters[1].limit - 31.0).abs() < 1e-9);
        assert!(v.to_string().contains("clusters = 2"));
    }

    #[test]
    fn parameter_errors() {
        let trace = split_trace(10);
        let mut p = RacParams::default();
        assert_eq!(
            rac_verdict(&trace, &p),
            Err(AnalysisError::TraceTooShort {
                rows: 11,
                window: 50
            })
        );
        p.window = 0;
        assert_eq!(rac_verdict(&trace, &p), Err(AnalysisError::EmptyWindow));
        p.window = 5;
        p.eps = 1.0;
        assert!(matches!(
            rac_verdict(&trace, &p),
            Err(AnalysisError::Thresholds { .. })
        ));
    }

    #[test]
    fn hull_basis_changes_safety() {
        // One legitimate agent pulled toward a malicious neighbor at 10.
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let config = SimulationConfig {
            alpha: 0.5,
            rounds: 60,
            seed: 0,
            graph: g,
            layout: CommunityLayout::new(2, vec![vec![0, 1]], [1]).unwrap(),
            initializer: InitializerSpec {
                communities: vec![LegitimateInit::Explicit(vec![0.0])],
                malicious: None,
            },
            adversary: AdversaryStrategy::Constant(10.0),
            kappa_budget: None,
        };
        let trace = run(&config).unwrap();
        let legit = rac_verdict(&trace, &RacParams::default()).unwrap();
        let c = &legit.communities[0];
        assert!(!c.safety);
        assert_eq!(c.first_violation.map(|v| (v.round, v.agent)), Some((1, 0)));
        assert!(trace.isolation_breach(0).is_some());
        let all = RacParams {
            hull: HullBasis::AllMembers,
            ..RacParams::default()
        };
        assert!(rac_verdict(&trace, &all).unwrap().communities[0].safety);
    }

    proptest! {
        #[test]
        fn clusters_partition_and_are_tight(
            values in proptest::collection::vec(-5.0f64..5.0, 1..40),
            delta in 0.01f64..2.0,
        ) {
            let tagged: Vec<(f64, AgentId)> = values.iter().copied().zip(0..).collect();
            let cs = clusters(tagged, delta);
            let mut seen: Vec<AgentId> = cs.iter().flat_map(|c| c.members.clone()).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..values.len()).collect::<Vec<_>>());
            for c in &cs {
                let h = Hull::of(c.members.iter().map(|&u| values[u])).unwrap();
                prop_assert!(h.max - h.min < delta);
            }
        }

        #[test]
        fn agreement_is_monotone_in_eps(rounds in 20usize..120, eps_exp in -12i32..-1) {
            let trace = clique_trace(rounds);
            let eps = 10f64.powi(eps_exp);
            let p = RacParams { eps, delta: 1.0, window: 10, ..RacParams::default() };
            let base = rac_verdict(&trace, &p).unwrap();
            for scale in [1.0, 10.0] {
                let wider = RacParams { eps: (eps * scale).min(1.0), ..p };
                let v = rac_verdict(&trace, &wider).unwrap();
                for (a, b) in base.communities.iter().zip(&v.communities) {
                    prop_assert!(!a.agreement || b.agreement);
                }
            }
        }
    }
}
