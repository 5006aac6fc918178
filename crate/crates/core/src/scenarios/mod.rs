//! Seeded builders for the three reference experiments and the scenario
//! document format.
//!
//! All three experiments join two cliques-or-near-cliques `V_1`, `V_2` with a
//! few cross edges. Legitimate agents of `V_1` start from `N(2, 1)`, those of
//! `V_2` from `N(30, 5)` (mean, variance), and every malicious agent holds
//! the constant 60.
//!
//! Initial values are drawn from a `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)`, sampling `rand_distr::Normal` (ziggurat) once per
//! legitimate agent, community by community in ascending agent order.

mod document;

pub use document::{load_scenario, to_document, ScenarioError};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::graph::{AgentId, CommunityLayout, Graph};
use crate::protocol::{AdversaryStrategy, SimulationConfig};
use crate::robustness::{evaluate_pair, is_community, is_rs_excess_robust, EnumerationLimit};

pub const ALPHA: f64 = 0.9;
pub const DEFAULT_ROUNDS: usize = 5000;
pub const MALICIOUS_VALUE: f64 = 60.0;

/// How legitimate agents of one community get their initial values.
#[derive(Debug, Clone, PartialEq)]
pub enum LegitimateInit {
    Normal {
        mean: f64,
        variance: f64,
    },
    /// One value per legitimate member, in ascending agent order.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitializerSpec {
    pub communities: Vec<LegitimateInit>,
    /// Initial value of every malicious agent; defaults to the adversary's
    /// nominal value at round 0.
    pub malicious: Option<f64>,
}

impl InitializerSpec {
    /// Initial value of every agent. Expects a validated configuration.
    pub fn initial_values(
        &self,
        layout: &CommunityLayout,
        adversary: &AdversaryStrategy,
        seed: u64,
    ) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0; layout.n()];
        for (i, spec) in self.communities.iter().enumerate() {
            match spec {
                LegitimateInit::Normal { mean, variance } => {
                    let dist =
                        Normal::new(*mean, variance.sqrt()).expect("validated normal parameters");
                    for u in layout.legitimate_members(i) {
                        values[u] = dist.sample(&mut rng);
                    }
                }
                LegitimateInit::Explicit(explicit) => {
                    for (u, &v) in layout.legitimate_members(i).zip(explicit) {
                        values[u] = v;
                    }
                }
            }
        }
        for u in layout.malicious() {
            values[u] = self.malicious.unwrap_or_else(|| adversary.nominal(u, 0));
        }
        values
    }
}

fn reference_initializer() -> InitializerSpec {
    InitializerSpec {
        communities: vec![
            LegitimateInit::Normal {
                mean: 2.0,
                variance: 1.0,
            },
            LegitimateInit::Normal {
                mean: 30.0,
                variance: 5.0,
            },
        ],
        malicious: Some(MALICIOUS_VALUE),
    }
}

/// Two blocks of consecutive ids, the last `f_i` of each block malicious.
fn two_block_layout(n1: usize, f1: usize, n2: usize, f2: usize) -> CommunityLayout {
    CommunityLayout::new(
        n1 + n2,
        vec![(0..n1).collect(), (n1..n1 + n2).collect()],
        (n1 - f1..n1).chain(n1 + n2 - f2..n1 + n2),
    )
    .expect("two consecutive blocks partition the agents")
}

fn shifted(g: &Graph, offset: usize) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
    g.edges().map(move |(u, v)| (u + offset, v + offset))
}

fn reference_config(
    seed: u64,
    graph: Graph,
    layout: CommunityLayout,
    kappa: usize,
) -> SimulationConfig {
    SimulationConfig {
        alpha: ALPHA,
        rounds: DEFAULT_ROUNDS,
        seed,
        graph,
        layout,
        initializer: reference_initializer(),
        adversary: AdversaryStrategy::Constant(MALICIOUS_VALUE),
        kappa_budget: Some(vec![kappa, kappa]),
    }
}

fn certify_community(config: &SimulationConfig, i: usize, expect: bool) {
    let layout = &config.layout;
    let check = is_community(
        &config.graph,
        layout.members(i),
        layout.malicious_count(i),
        EnumerationLimit::default(),
    )
    .expect("reference communities are certifiable");
    assert_eq!(check.holds(), expect, "community {}:\n{check}", i + 1);
}

/// Both communities satisfy the community conditions: `K_123` with 20
/// malicious agents and `K_35` with 10, `kappa = 2`.
///
/// Cross edges pair 25 seeded-shuffled legitimate agents of each side in a
/// ring, so each of them has exactly two external neighbors.
pub fn example1(seed: u64) -> SimulationConfig {
    let (f1, f2) = (20, 10);
    let (n1, n2) = (6 * f1 + 3, 3 * f2 + 5);
    let layout = two_block_layout(n1, f1, n2, f2);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left: Vec<AgentId> = layout.legitimate_members(0).collect();
    let mut right: Vec<AgentId> = layout.legitimate_members(1).collect();
    left.shuffle(&mut rng);
    right.shuffle(&mut rng);
    let m = left.len().min(right.len());
    let cross = (0..m).flat_map(|j| [(left[j], right[j]), (left[j], right[(j + 1) % m])]);

    let graph = Graph::from_edges(
        n1 + n2,
        shifted(&Graph::complete(n1), 0).chain(shifted(&Graph::complete(n2), n1)),
    )
    .and_then(|g| g.with_edges(cross))
    .expect("ring cross edges are distinct");

    let config = reference_config(seed, graph, layout, 2);
    for i in 0..2 {
        assert_eq!(config.graph.kappa(config.layout.members(i)).ok(), Some(2));
        certify_community(&config, i, true);
    }
    config
}

/// Agent id of `u_k` (`k` in `1..=9`) in the second community of [`example2`].
pub fn example2_agent(k: usize) -> AgentId {
    assert!((1..=9).contains(&k));
    16 + k - 1
}

/// The partition `{u_1..u_5}`, `{u_6..u_9}` that breaks `(1, 2)`-excess
/// robustness of [`example2`]'s second community, in global ids.
pub fn example2_witness() -> (Vec<AgentId>, Vec<AgentId>) {
    (
        (1..=5).map(example2_agent).collect(),
        (6..=9).map(example2_agent).collect(),
    )
}

/// The second community's induced graph in [`example2`]: `K_5` on
/// `u_1..u_5`, `K_4` on `u_6..u_9`, and `u_5` adjacent to all of `u_6..u_9`.
/// Local id `k - 1` is `u_k`.
pub fn example2_community_graph() -> Graph {
    let bridge = (5..9).map(|v| (4, v));
    Graph::from_edges(
        9,
        shifted(&Graph::complete(5), 0)
            .chain(shifted(&Graph::complete(4), 5))
            .chain(bridge),
    )
    .expect("fixed construction")
}

/// The second community violates robustness. `V_1 = K_16` with 6 malicious
/// agents; `V_2` is [`example2_community_graph`] with its cut vertex `u_5`
/// malicious; one cross edge joins agent 0 and `u_6`; `kappa = 1`.
pub fn example2(seed: u64) -> SimulationConfig {
    let (f1, f2) = (6, 1);
    let (n1, n2) = (2 * f1 + 4, 4 * f2 + 5);
    let layout = CommunityLayout::new(
        n1 + n2,
        vec![(0..n1).collect(), (n1..n1 + n2).collect()],
        (n1 - f1..n1).chain([example2_agent(5)]),
    )
    .expect("valid layout");
    let graph = Graph::from_edges(
        n1 + n2,
        shifted(&Graph::complete(n1), 0)
            .chain(shifted(&example2_community_graph(), n1))
            .chain([(0, example2_agent(6))]),
    )
    .expect("fixed construction");

    let config = reference_config(seed, graph, layout, 1);
    let v2 = config.layout.members(1);
    let induced = config.graph.induced_subgraph(v2).expect("valid community");
    assert_eq!(induced.graph.min_degree().ok(), Some(4));
    let robust = is_rs_excess_robust(&induced.graph, 1, 2, EnumerationLimit::default())
        .expect("9 agents are enumerable");
    assert!(!robust.verdict());
    let (s1, s2) = example2_witness();
    let local = |ids: &[AgentId]| -> Vec<AgentId> {
        ids.iter().filter_map(|&u| induced.local(u)).collect()
    };
    let eval =
        evaluate_pair(&induced.graph, &local(&s1), &local(&s2), 1, 2).expect("disjoint pair");
    assert!(!eval.satisfied());
    for i in 0..2 {
        assert_eq!(config.graph.kappa(config.layout.members(i)).ok(), Some(1));
    }
    certify_community(&config, 0, true);
    certify_community(&config, 1, false);
    config
}

/// The first community violates the degree condition: `K_15` with 6
/// malicious agents needs degree 15 but has 14. `V_2 = K_11` with 3 malicious
/// agents; `kappa = 2`.
///
/// Every legitimate agent of `V_1` gets two external edges, routed first to
/// the malicious agents of `V_2` (two edges each at most) and then round-robin
/// over its legitimate agents.
pub fn example3(seed: u64) -> SimulationConfig {
    let (f1, f2) = (6, 3);
    let (n1, n2) = (2 * f1 + 3, 2 * f2 + 5);
    let kappa = 2;
    let layout = two_block_layout(n1, f1, n2, f2);

    let bad: Vec<AgentId> = layout.malicious_members(1).collect();
    let good: Vec<AgentId> = layout.legitimate_members(1).collect();
    let targets: Vec<AgentId> = (0..kappa)
        .flat_map(|_| bad.iter().copied())
        .chain((0..kappa).flat_map(|_| good.iter().copied()))
        .collect();
    let sources = layout
        .legitimate_members(0)
        .flat_map(|u| std::iter::repeat_n(u, kappa));
    let cross: Vec<(AgentId, AgentId)> = sources.zip(targets).collect();

    let graph = Graph::from_edges(
        n1 + n2,
        shifted(&Graph::complete(n1), 0).chain(shifted(&Graph::complete(n2), n1)),
    )
    .and_then(|g| g.with_edges(cross))
    .expect("round-robin cross edges are distinct");

    let config = reference_config(seed, graph, layout, kappa);
    for i in 0..2 {
        assert_eq!(
            config.graph.kappa(config.layout.members(i)).ok(),
            Some(kappa)
        );
    }
    certify_community(&config, 0, false);
    certify_community(&config, 1, true);
    config
}

/// Builder for reference experiment `1`, `2` or `3`.
pub fn example(number: u8, seed: u64) -> Option<SimulationConfig> {
    match number {
        1 => Some(example1(seed)),
        2 => Some(example2(seed)),
        3 => Some(example3(seed)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::{complete_rs_certificate, CommunityFailure};

    #[test]
    fn example1_shape() {
        let c = example1(7);
        assert_eq!(c.layout.members(0).len(), 123);
        assert_eq!(c.layout.members(1).len(), 35);
        assert_eq!(c.layout.malicious_count(0), 20);
        assert_eq!(c.layout.malicious_count(1), 10);
        assert_eq!(c.alpha, 0.9);
        assert_eq!(c.graph.edge_count(), 123 * 122 / 2 + 35 * 34 / 2 + 50);
        let init = c
            .initializer
            .initial_values(&c.layout, &c.adversary, c.seed);
        for u in c.layout.malicious() {
            assert_eq!(init[u], 60.0);
        }
        assert!(c.validate().is_ok());
    }

    #[test]
    fn example1_cross_edges_depend_on_seed() {
        assert_eq!(example1(3), example1(3));
        assert_ne!(example1(3).graph, example1(4).graph);
    }

    #[test]
    fn example2_properties() {
        let c = example2(1);
        let v2 = c.layout.members(1);
        let induced = c.graph.induced_subgraph(v2).unwrap();
        assert_eq!(induced.graph, example2_community_graph());
        assert_eq!(induced.graph.edge_count(), 20);
        assert_eq!(c.graph.induced_min_degree(v2).unwrap(), 4);
        assert_eq!(
            c.layout.malicious_members(1).collect::<Vec<_>>(),
            vec![example2_agent(5)]
        );
        let check = is_community(&c.graph, v2, 1, EnumerationLimit::default()).unwrap();
        assert_eq!(check.failures, vec![CommunityFailure::Robustness]);
        assert_eq!(check.min_degree, 4);
        assert_eq!(check.required_degree, 4);
    }

    #[test]
    fn example3_properties() {
        let c = example3(1);
        let v1 = c.layout.members(0);
        let check = is_community(&c.graph, v1, 6, EnumerationLimit::default()).unwrap();
        assert!(check.robustness.verdict());
        assert_eq!(check.min_degree, 14);
        assert_eq!(check.required_degree, 15);
        assert!(complete_rs_certificate(15, 2, 7));
        let v2 = c.layout.members(1);
        let check = is_community(&c.graph, v2, 3, EnumerationLimit::default()).unwrap();
        assert!(check.holds());
        assert_eq!(check.min_degree, 10);
        // every malicious agent of V_2 is used for two cross edges
        for u in c.layout.malicious_members(1) {
            assert_eq!(c.graph.external_degree(u, v2).unwrap(), 2);
        }
        for u in c.layout.legitimate_members(0) {
            assert_eq!(c.graph.external_degree(u, v1).unwrap(), 2);
        }
    }

    #[test]
    fn identical_seeds_identical_initial_values() {
        for n in 1..=3 {
            let a = example(n, 11).unwrap();
            let b = example(n, 11).unwrap();
            let ia = a
                .initializer
                .initial_values(&a.layout, &a.adversary, a.seed);
            let ib = b
                .initializer
                .initial_values(&b.layout, &b.adversary, b.seed);
            assert_eq!(ia, ib);
            let c = example(n, 12).unwrap();
            let ic = c
                .initializer
                .initial_values(&c.layout, &c.adversary, c.seed);
            assert_ne!(ia, ic);
        }
        assert!(example(4, 0).is_none());
    }

    #[test]
    fn sample_moments_match_parameters() {
        let layout = CommunityLayout::single(20_000);
        let spec = InitializerSpec {
            communities: vec![LegitimateInit::Normal {
                mean: 30.0,
                variance: 5.0,
            }],
            malicious: None,
        };
        let v = spec.initial_values(&layout, &AdversaryStrategy::Constant(0.0), 5);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        assert!((mean - 30.0).abs() < 0.1, "{mean}");
        assert!((var - 5.0).abs() < 0.2, "{var}");
    }
}
