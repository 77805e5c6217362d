//! Multiway cut by LP rounding.
//!
//! Directed edge-weighted and undirected node-weighted multiway cut: a
//! multiplicative-weights solver for the distance LP, ball-cutting roundings
//! with their derandomized sweeps, reductions, analytic instance families,
//! and exact branch-and-bound references for small instances.

pub mod cut;
pub mod dirround;
pub mod error;
pub mod families;
pub mod format;
pub mod instance;
pub mod lp;
pub mod mwu;
pub mod noderound;
pub mod oracle;
pub mod paths;
pub mod reductions;
pub mod rng;

pub use cut::{CutKind, CutMeta, CutSolution};
pub use error::{Error, Result};
pub use format::{parse_cut, parse_fractional, parse_instance, serialize_cut, serialize_fractional, serialize_instance};
pub use instance::{canonicalize_node_instance, Arc, DirectedInstance, Instance, Mode, NodeInstance, Weight};
pub use lp::{
    check_multicommodity_flow, lp_cost, scale_to_feasible, verify_feasible, Feasibility, FractionalSolution, Relaxation,
    FEASIBILITY_TOL,
};
pub use mwu::{solve_lp_mwu, solve_node_lp, LpResult};
pub use paths::{
    closest_terminal_pair, h_nearest_terminals, min_interterminal_distance, node_closest_terminal_pair,
    node_h_nearest_terminals, node_min_interterminal_distance, node_sssp, sssp, DistanceTable, NearTerminalTable,
    TerminalPath,
};
pub use reductions::{node_split_reduction, reduce_4terminal_to_stbicut, DirectedNodeInstance, NodeSplit};
pub use dirround::{
    augment_with_super_terminals, build_cut_intervals, round_at_theta, round_deterministic, round_edge_undirected,
    round_randomized, undirected_min_interterminal_distance, undirected_theta, verify_cut, verify_undirected_cut, AugmentedInstance,
    CutCheck, CutIntervals, DirectedRounder, Interval,
};
pub use noderound::{
    boundary, round_node_deterministic, round_node_randomized, verify_node_cut, BoundarySet, NodeRounder,
};
pub use families::{
    fractionality_pairs, fractionality_stats, gap_alpha_by_recurrence, gap_family_flow, gap_family_primal,
    gap_family_stats, gen_fractionality_family, gen_gap_family, gen_random_instance, FamilyStats, RandomSpec,
};
pub use oracle::{exact_min_dirmc, exact_min_nodemc, exact_min_stbicut, exact_one_way_cut, MAX_ORACLE_ARCS, MAX_ORACLE_NODES};
pub use rng::{open_unit, trial_rng};
