use std::collections::BTreeMap;

use crate::graph::AgentId;

/// What malicious agents present to their neighbors.
///
/// One strategy governs every malicious agent. Presented values may differ per
/// receiving neighbor (equivocation); the trace records the strategy's
/// nominal value for each malicious agent.
#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryStrategy {
    /// The same value to every neighbor in every round.
    Constant(f64),
    /// `table[(attacker, target)]` is shown to `target`; anything not listed
    /// sees `fallback`, which is also the nominal value.
    PerNeighbor {
        fallback: f64,
        table: BTreeMap<(AgentId, AgentId), f64>,
    },
    /// Round `t` presents `schedule[t]`, holding the last entry once the
    /// schedule runs out.
    Scripted(Vec<f64>),
}

impl AdversaryStrategy {
    /// Value `attacker` shows to `target` at `round`.
    pub fn presented(&self, attacker: AgentId, target: AgentId, round: usize) -> f64 {
        match self {
            AdversaryStrategy::PerNeighbor { fallback, table } => {
                table.get(&(attacker, target)).copied().unwrap_or(*fallback)
            }
            _ => self.nominal(attacker, round),
        }
    }

    /// Value stored for `attacker` in the trace at `round`.
    pub fn nominal(&self, _attacker: AgentId, round: usize) -> f64 {
        match self {
            AdversaryStrategy::Constant(v) => *v,
            AdversaryStrategy::PerNeighbor { fallback, .. } => *fallback,
            AdversaryStrategy::Scripted(schedule) => {
                schedule[round.min(schedule.len().saturating_sub(1))]
            }
        }
    }

    /// Every value this strategy can ever present.
    pub(crate) fn values(&self) -> Vec<f64> {
        match self {
            AdversaryStrategy::Constant(v) => vec![*v],
            AdversaryStrategy::PerNeighbor { fallback, table } => std::iter::once(*fallback)
                .chain(table.values().copied())
                .collect(),
            AdversaryStrategy::Scripted(schedule) => schedule.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_presents_same_value_everywhere() {
        let a = AdversaryStrategy::Constant(60.0);
        for round in [0, 1, 1000] {
            for target in 0..4 {
                assert_eq!(a.presented(7, target, round), 60.0);
            }
            assert_eq!(a.nominal(7, round), 60.0);
        }
    }

    #[test]
    fn per_neighbor_equivocates() {
        let a = AdversaryStrategy::PerNeighbor {
            fallback: 1.0,
            table: BTreeMap::from([((3, 0), -5.0), ((3, 1), 9.0)]),
        };
        assert_eq!(a.presented(3, 0, 4), -5.0);
        assert_eq!(a.presented(3, 1, 4), 9.0);
        assert_eq!(a.presented(3, 2, 4), 1.0);
        assert_eq!(a.presented(4, 0, 4), 1.0);
        assert_eq!(a.nominal(3, 4), 1.0);
    }

    #[test]
    fn scripted_holds_last_entry() {
        let a = AdversaryStrategy::Scripted(vec![1.0, 2.0, 3.0]);
        assert_eq!(a.presented(0, 1, 0), 1.0);
        assert_eq!(a.presented(0, 1, 2), 3.0);
        assert_eq!(a.nominal(0, 50), 3.0);
    }
}
