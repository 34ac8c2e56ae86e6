//! Planning of positioning reference nodes (PRNs) for indoor floor plans.
//!
//! Given a layout, the planner finds a small set of PRN locations such that
//! every point of the layout has line of sight, within range, to at least
//! one PRN, a well-separated pair of PRNs, or a triplet of PRNs meeting
//! minimum separation distance and angle constraints. The pipeline is
//!
//! 1. [`partition::hyper_triangulate`] the layout,
//! 2. compute per-triangle LoS areas ([`visibility`]),
//! 3. build the LoS graph ([`losgraph`]) and cluster it greedily into cliques
//!    with non-empty placement areas ([`planner`]),
//! 4. verify the result by sampling ([`evaluate`]).

pub mod corpus;
pub mod evaluate;
pub mod floorplan;
pub mod geometry;
pub mod losgraph;
mod par;
pub mod partition;
pub mod planner;
pub mod visibility;

pub use floorplan::{parse_layout, validate_layout, Layout, PlanConfig, Range};
pub use geometry::{Point, Region};
pub use planner::{plan, Deployment, Tier};
