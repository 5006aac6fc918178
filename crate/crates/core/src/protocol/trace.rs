use std::io::{self, Write};

use super::SimulationConfig;
use crate::graph::AgentId;

/// Closed interval `[min, max]` of initial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hull {
    pub min: f64,
    pub max: f64,
}

impl Hull {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        values.into_iter().fold(None, |acc, v| {
            Some(match acc {
                None => Hull { min: v, max: v },
                Some(h) => Hull {
                    min: h.min.min(v),
                    max: h.max.max(v),
                },
            })
        })
    }

    pub fn contains(&self, value: f64, tolerance: f64) -> bool {
        value >= self.min - tolerance && value <= self.max + tolerance
    }
}

/// First round at which a legitimate member's median left its community's
/// legitimate initial hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolationBreach {
    pub round: usize,
    pub agent: AgentId,
    pub median: f64,
}

/// Values of every agent at every round, `rounds + 1` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub(super) config: SimulationConfig,
    pub(super) values: Vec<f64>,
    pub(super) legitimate_hulls: Vec<Option<Hull>>,
    pub(super) member_hulls: Vec<Hull>,
    pub(super) isolation: Vec<Option<IsolationBreach>>,
}

impl Trace {
    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.graph.n()
    }

    /// Number of update steps `T`; the trace holds `T + 1` rows.
    pub fn rounds(&self) -> usize {
        self.values.len() / self.n().max(1) - 1
    }

    pub fn row(&self, round: usize) -> &[f64] {
        let n = self.n();
        &self.values[round * n..(round + 1) * n]
    }

    pub fn value(&self, round: usize, agent: AgentId) -> f64 {
        self.row(round)[agent]
    }

    /// `[min, max]` of the initial values of the legitimate members of
    /// community `i`, or `None` when it has no legitimate members.
    pub fn legitimate_hull(&self, i: usize) -> Option<Hull> {
        self.legitimate_hulls[i]
    }

    /// `[min, max]` of the initial values of all members of community `i`,
    /// malicious included.
    pub fn member_hull(&self, i: usize) -> Hull {
        self.member_hulls[i]
    }

    /// Runtime isolation monitor result for community `i`.
    pub fn isolation_breach(&self, i: usize) -> Option<IsolationBreach> {
        self.isolation[i]
    }

    /// Writes `round,agent,community,role,value` rows, round-major and agent
    /// ascending. Communities are numbered from 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let layout = &self.config.layout;
        writeln!(out, "round,agent,community,role,value")?;
        for round in 0..=self.rounds() {
            for (agent, value) in self.row(round).iter().enumerate() {
                writeln!(
                    out,
                    "{round},{agent},{},{},{value}",
                    layout.community_of(agent) + 1,
                    layout.role(agent)
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}
