//! Certified fixed-point computations on finite metric spaces.
//!
//! The crate checks contraction-type conditions (Banach, eta-contraction,
//! weak, Mizoguchi-Takahashi, Meir-Keeler, Caristi and relatives) for single-
//! and set-valued self-maps of a finite metric space, iterates certified maps
//! to their fixed points, and solves small dynamic-programming equations by
//! value iteration.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bellman;
pub mod certify;
pub mod error;
pub mod gauge;
pub mod iterate;
pub mod metric;
pub mod sample;
pub mod selftest;

pub use bellman::{
    bellman_operator, certify_bellman, solve_bellman, sup_metric, Aggregator, AggregatorTable,
    BellmanCertificate, BellmanCondition, BellmanProblem, SolveTrace, ValueFunction,
};
pub use certify::{
    certify_gauge, certify_map, recheck_witness, Certificate, Condition, Evidence, MapRef, Verdict,
    Witness,
};
pub use error::{Error, Result};
pub use gauge::{
    caristi_potential, check_class, check_gauge_properties, complement_gauge, make_gauge,
    midpoint_gauge, mt_to_gauge, weak_to_gauge, Formula, Gauge, GaugeKind, GaugeParams,
    GaugeReport,
};
pub use iterate::{
    brute_force_fixed_points, multivalued_orbit, picard_iterate, telescoping_audit,
    telescoping_bound, IterationTrace, PotentialSource, StopRule, Termination,
};
pub use metric::{
    check_metric_axioms, hausdorff_distance, point_to_set_distance, repair_triangle,
    FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap,
};
