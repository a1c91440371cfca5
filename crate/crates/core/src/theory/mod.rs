//! Exact variance of the densified OPH estimators and brute-force oracles.

mod combinatorics;
mod distributions;
mod etilde;
pub mod oracle;
mod report;
mod variance;

pub use combinatorics::{binomial, binomial_f64, h_count, surjective_placements, HTable};
pub use distributions::{cond_joint_dist, empty_bin_dist, CondJointDist, TheoryConfig};
pub use etilde::{e_tilde, e_tilde_exact};
pub use oracle::{brute_force_variance, brute_force_variance_exact, within_bin_pair_collision, OracleMode};
pub use report::{VarianceReport, REPORT_CSV_HEADER};
pub use variance::{
    e1, e1_exact, e1_for, variance_coph, variance_exact, variance_for, variance_reden, DensifiedScheme,
};
