//! Community consensus under the median consensus algorithm (MCA) with
//! Byzantine agents.
//!
//! * [`graph`]: graphs, community partitions, text formats.
//! * [`robustness`]: excess reachability, `(r, s)`-excess robustness,
//!   the community predicate and reachability preservation.
//! * [`protocol`]: the synchronous median update and trace production.
//! * [`analysis`]: agreement, safety and cluster verdicts over traces.
//! * [`scenarios`]: seeded builders for the reference experiments and the
//!   scenario document format.
//! * [`cli`]: the `commca` command-line front end.

pub mod analysis;
pub mod cli;
pub mod graph;
pub mod protocol;
pub mod robustness;
pub mod scenarios;
