//! Checks that an agent which is `kappa`-excess reachable inside its
//! community stays `0`-excess reachable in the whole graph no matter which of
//! its external neighbors are added to the subset.
//!
//! Excess in the full graph is recounted from scratch for every extension
//! rather than derived from the internal excess, so the check does not lean
//! on the arithmetic it is meant to confirm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EnumerationLimit, RobustnessError};
use crate::graph::{AgentId, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreservationMode {
    /// Every nonempty subset of the community.
    Exhaustive(EnumerationLimit),
    /// `samples` subsets drawn by including each member with probability 1/2.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationCounterexample {
    pub subset: Vec<AgentId>,
    pub agent: AgentId,
    /// External neighbors added to the subset.
    pub added: Vec<AgentId>,
    pub internal_excess: i64,
    pub graph_excess: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationReport {
    pub kappa: usize,
    pub subsets_checked: usize,
    /// `(S, u)` pairs where `u` was `kappa`-excess reachable inside the community.
    pub reachable_agents: usize,
    /// `(S, u, N)` triples recounted in the full graph.
    pub extensions_checked: usize,
    pub counterexample: Option<PreservationCounterexample>,
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct Checker<'a> {
    g: &'a Graph,
    members: Vec<AgentId>,
    in_community: Vec<bool>,
    external: Vec<Vec<AgentId>>,
    kappa: usize,
    in_subset: Vec<bool>,
    report: PreservationReport,
}

impl<'a> Checker<'a> {
    fn new(g: &'a Graph, members: &[AgentId]) -> Result<Self, RobustnessError> {
        let in_community = g.membership(members)?;
        let mut members = members.to_vec();
        members.sort_unstable();
        let external: Vec<Vec<AgentId>> = members
            .iter()
            .map(|&u| {
                g.adj(u)
                    .iter()
                    .copied()
                    .filter(|&v| !in_community[v])
                    .collect()
            })
            .collect();
        let kappa = external.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            g,
            in_subset: vec![false; g.n()],
            members,
            in_community,
            external,
            kappa,
            report: PreservationReport {
                kappa,
                subsets_checked: 0,
                reachable_agents: 0,
                extensions_checked: 0,
                counterexample: None,
            },
        })
    }

    /// Checks one subset given by member indices; returns false once a
    /// counterexample is recorded.
    fn check_subset(&mut self, picked: &[usize]) -> bool {
        for &i in picked {
            self.in_subset[self.members[i]] = true;
        }
        self.report.subsets_checked += 1;
        let mut ok = true;
        'agents: for &i in picked {
            let u = self.members[i];
            let internal_excess: i64 = self
                .g
                .adj(u)
                .iter()
                .filter(|&&v| self.in_community[v])
                .map(|&v| if self.in_subset[v] { -1 } else { 1 })
                .sum();
            if internal_excess < self.kappa as i64 {
                continue;
            }
            self.report.reachable_agents += 1;
            let ext = &self.external[i];
            for choice in 0u32..1 << ext.len() {
                let added: Vec<AgentId> = (0..ext.len())
                    .filter(|&j| choice >> j & 1 == 1)
                    .map(|j| ext[j])
                    .collect();
                let graph_excess: i64 = self
                    .g
                    .adj(u)
                    .iter()
                    .map(|v| {
                        if self.in_subset[*v] || added.contains(v) {
                            -1
                        } else {
                            1
                        }
                    })
                    .sum();
                self.report.extensions_checked += 1;
                if graph_excess < 0 {
                    self.report.counterexample = Some(PreservationCounterexample {
                        subset: picked.iter().map(|&j| self.members[j]).collect(),
                        agent: u,
                        added,
                        internal_excess,
                        graph_excess,
                    });
                    ok = false;
                    break 'agents;
                }
            }
        }
        for &i in picked {
            self.in_subset[self.members[i]] = false;
        }
        ok
    }
}

/// Runs the reachability-preservation check for the community `members`.
/// Callers are expected to have certified the community first; the check
/// itself only depends on `kappa` as measured on `g`.
pub fn verify_reachability_preservation(
    g: &Graph,
    members: &[AgentId],
    mode: PreservationMode,
) -> Result<PreservationReport, RobustnessError> {
    let mut checker = Checker::new(g, members)?;
    if checker.kappa == 0 {
        return Ok(checker.report);
    }
    let size = checker.members.len();
    match mode {
        PreservationMode::Exhaustive(limit) => {
            limit.check(size)?;
            for mask in 1u32..1 << size {
                let picked: Vec<usize> = (0..size).filter(|&i| mask >> i & 1 == 1).collect();
                if !checker.check_subset(&picked) {
                    break;
                }
            }
        }
        PreservationMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let picked: Vec<usize> = (0..size).filter(|_| rng.random_bool(0.5)).collect();
                if picked.is_empty() {
                    continue;
                }
                if !checker.check_subset(&picked) {
                    break;
                }
            }
        }
    }
    Ok(checker.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kappa_is_trivial() {
        let g = Graph::complete(6);
        let members: Vec<usize> = (0..6).collect();
        let report = verify_reachability_preservation(
            &g,
            &members,
            PreservationMode::Exhaustive(EnumerationLimit::default()),
        )
        .unwrap();
        assert!(report.holds());
        assert_eq!(report.kappa, 0);
        assert_eq!(report.subsets_checked, 0);
    }

    #[test]
    fn k5_with_one_cross_edge_exhaustive() {
        let mut edges: Vec<_> = Graph::complete(5).edges().collect();
        edges.extend([(5, 6), (6, 7), (5, 7), (0, 5)]);
        let g = Graph::from_edges(8, edges).unwrap();
        let report = verify_reachability_preservation(
            &g,
            &[0, 1, 2, 3, 4],
            PreservationMode::Exhaustive(EnumerationLimit::default()),
        )
        .unwrap();
        assert!(report.holds());
        assert_eq!(report.kappa, 1);
        assert_eq!(report.subsets_checked, 31);
        assert!(report.extensions_checked > 0);
    }

    #[test]
    fn sampling_is_seeded() {
        let mut edges: Vec<_> = Graph::complete(12).edges().collect();
        edges.extend([(0, 12), (1, 12), (2, 13), (0, 13)]);
        let g = Graph::from_edges(14, edges).unwrap();
        let members: Vec<usize> = (0..12).collect();
        let mode = PreservationMode::Sampled {
            samples: 500,
            seed: 9,
        };
        let a = verify_reachability_preservation(&g, &members, mode).unwrap();
        let b = verify_reachability_preservation(&g, &members, mode).unwrap();
        assert_eq!(a, b);
        assert!(a.holds());
        assert!(a.subsets_checked > 450);
    }

    #[test]
    fn exhaustive_respects_cap() {
        let mut edges: Vec<_> = Graph::complete(16).edges().collect();
        edges.push((0, 16));
        let g = Graph::from_edges(17, edges).unwrap();
        let members: Vec<usize> = (0..16).collect();
        assert!(matches!(
            verify_reachability_preservation(
                &g,
                &members,
                PreservationMode::Exhaustive(EnumerationLimit::default())
            ),
            Err(RobustnessError::CapExceeded { .. })
        ));
    }
}
