//! TOML scenario documents.
//!
//! ```toml
//! [graph]
//! n = 4
//! edges = [[0, 1], [1, 2], [2, 3], [0, 3]]
//!
//! [communities]
//! members = [[0, 1, 2, 3]]
//! kappa = [0]                 # optional declared external-edge budget
//!
//! [malicious]
//! ids = [3]
//!
//! [init]
//! malicious = 60.0            # optional
//! communities = [{ kind = "normal", mean = 2.0, variance = 1.0 }]
//! # or { kind = "explicit", values = [...] } (one per legitimate member)
//!
//! [protocol]
//! alpha = 0.9
//! rounds = 5000
//! seed = 42
//!
//! [adversary]
//! kind = "constant"           # | "per-neighbor" | "scripted"
//! value = 60.0
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{InitializerSpec, LegitimateInit};
use crate::graph::{AgentId, CommunityLayout, Graph, GraphError};
use crate::protocol::{AdversaryStrategy, ConfigError, SimulationConfig};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Syntax(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    graph: GraphSection,
    communities: CommunitiesSection,
    malicious: MaliciousSection,
    init: InitSection,
    protocol: ProtocolSection,
    adversary: AdversarySection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    n: usize,
    edges: Vec<[AgentId; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommunitiesSection {
    members: Vec<Vec<AgentId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaliciousSection {
    ids: Vec<AgentId>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    malicious: Option<f64>,
    communities: Vec<InitEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum InitEntry {
    Normal { mean: f64, variance: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolSection {
    alpha: f64,
    rounds: usize,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum AdversarySection {
    Constant {
        value: f64,
    },
    PerNeighbor {
        fallback: f64,
        #[serde(default)]
        entries: Vec<TableEntry>,
    },
    Scripted {
        schedule: Vec<f64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    from: AgentId,
    to: AgentId,
    value: f64,
}

/// Parses and validates a scenario document. Every validation failure is
/// reported with the offending ids.
pub fn load_scenario(text: &str) -> Result<SimulationConfig, ScenarioError> {
    let doc: Document = toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    let graph = Graph::from_edges(doc.graph.n, doc.graph.edges.iter().map(|&[u, v]| (u, v)))?;
    let layout = CommunityLayout::new(graph.n(), doc.communities.members, doc.malicious.ids)?;
    let initializer = InitializerSpec {
        communities: doc
            .init
            .communities
            .into_iter()
            .map(|entry| match entry {
                InitEntry::Normal { mean, variance } => LegitimateInit::Normal { mean, variance },
                InitEntry::Explicit { values } => LegitimateInit::Explicit(values),
            })
            .collect(),
        malicious: doc.init.malicious,
    };
    let adversary = match doc.adversary {
        AdversarySection::Constant { value } => AdversaryStrategy::Constant(value),
        AdversarySection::PerNeighbor { fallback, entries } => AdversaryStrategy::PerNeighbor {
            fallback,
            table: entries
                .into_iter()
                .map(|e| ((e.from, e.to), e.value))
                .collect(),
        },
        AdversarySection::Scripted { schedule } => AdversaryStrategy::Scripted(schedule),
    };
    let config = SimulationConfig {
        alpha: doc.protocol.alpha,
        rounds: doc.protocol.rounds,
        seed: doc.protocol.seed,
        graph,
        layout,
        initializer,
        adversary,
        kappa_budget: doc.communities.kappa,
    };
    config.validate()?;
    Ok(config)
}

/// Serializes a configuration as a scenario document.
pub fn to_document(config: &SimulationConfig) -> Result<String, ScenarioError> {
    let doc = Document {
        graph: GraphSection {
            n: config.graph.n(),
            edges: config.graph.edges().map(|(u, v)| [u, v]).collect(),
        },
        communities: CommunitiesSection {
            members: config.layout.communities().to_vec(),
            kappa: config.kappa_budget.clone(),
        },
        malicious: MaliciousSection {
            ids: config.layout.malicious().collect(),
        },
        init: InitSection {
            malicious: config.initializer.malicious,
            communities: config
                .initializer
                .communities
                .iter()
                .map(|c| match c {
                    LegitimateInit::Normal { mean, variance } => InitEntry::Normal {
                        mean: *mean,
                        variance: *variance,
                    },
                    LegitimateInit::Explicit(values) => InitEntry::Explicit {
                        values: values.clone(),
                    },
                })
                .collect(),
        },
        protocol: ProtocolSection {
            alpha: config.alpha,
            rounds: config.rounds,
            seed: config.seed,
        },
        adversary: match &config.adversary {
            AdversaryStrategy::Constant(value) => AdversarySection::Constant { value: *value },
            AdversaryStrategy::PerNeighbor { fallback, table } => AdversarySection::PerNeighbor {
                fallback: *fallback,
                entries: table
                    .iter()
                    .map(|(&(from, to), &value)| TableEntry { from, to, value })
                    .collect(),
            },
            AdversaryStrategy::Scripted(schedule) => AdversarySection::Scripted {
                schedule: schedule.clone(),
            },
        },
    };
    toml::to_string(&doc).map_err(|e| ScenarioError::Syntax(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ConfigIssue;
    use crate::scenarios::example1;

    const SMALL: &str = r#"
[graph]
n = 6
edges = [[0, 1], [0, 2], [1, 2], [3, 4], [3, 5], [4, 5], [2, 3]]

[communities]
members = [[0, 1, 2], [3, 4, 5]]
kappa = [1, 1]

[malicious]
ids = [5]

[init]
communities = [
  { kind = "explicit", values = [1.0, 2.0, 3.0] },
  { kind = "normal", mean = 10.0, variance = 0.5 },
]

[protocol]
alpha = 0.5
rounds = 10
seed = 3

[adversary]
kind = "per-neighbor"
fallback = 7.0
entries = [{ from = 5, to = 3, value = -1.0 }]
"#;

    #[test]
    fn loads_small_document() {
        let c = load_scenario(SMALL).unwrap();
        assert_eq!(c.graph.edge_count(), 7);
        assert_eq!(c.layout.malicious().collect::<Vec<_>>(), vec![5]);
        assert_eq!(c.kappa_budget, Some(vec![1, 1]));
        assert_eq!(c.adversary.presented(5, 3, 0), -1.0);
        assert_eq!(c.adversary.presented(5, 4, 0), 7.0);
        let again = load_scenario(&to_document(&c).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn example1_round_trips() {
        let c = example1(99);
        let text = to_document(&c).unwrap();
        assert_eq!(load_scenario(&text).unwrap(), c);
    }

    #[test]
    fn overlapping_communities_rejected() {
        let text = SMALL.replace("[[0, 1, 2], [3, 4, 5]]", "[[0, 1, 2, 3], [3, 4, 5]]");
        assert!(matches!(
            load_scenario(&text),
            Err(ScenarioError::Graph(GraphError::RepeatedAgent(3)))
        ));
    }

    #[test]
    fn kappa_budget_checked_on_load() {
        let text = SMALL.replace("[2, 3]]", "[2, 3], [2, 4]]");
        match load_scenario(&text) {
            Err(ScenarioError::Config(ConfigError(issues))) => {
                assert!(issues.contains(&ConfigIssue::KappaBudget {
                    community: 0,
                    declared: 1,
                    agent: 2,
                    external: 2
                }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_adversary_and_syntax_rejected() {
        let text = SMALL.replace("from = 5, to = 3", "from = 4, to = 3");
        assert!(matches!(
            load_scenario(&text),
            Err(ScenarioError::Config(_))
        ));
        assert!(matches!(
            load_scenario("[graph]\nn = 2"),
            Err(ScenarioError::Syntax(_))
        ));
        let text = SMALL.replace("variance = 0.5", "variance = -0.5");
        assert!(matches!(
            load_scenario(&text),
            Err(ScenarioError::Config(_))
        ));
        let text = SMALL.replace("[2, 3]]", "[2, 3], [1, 1]]");
        assert!(matches!(
            load_scenario(&text),
            Err(ScenarioError::Graph(GraphError::SelfLoop(1)))
        ));
    }
}
