//! Randomized property suites (256 cases each).

mod common;

use common::*;

const CASES: u32 = 256;

fn run(suite: Suite) {
    if let Err(e) = suite(&mut runner(CASES)) {
        panic!("{e}");
    }
}

#[test]
fn charts_round_trip() {
    run(chart_round_trip);
}

#[test]
fn chart_systems_are_pushforwards() {
    run(pushforward_conjugacy);
}

#[test]
fn chart_expansions_are_polynomial() {
    run(polynomiality);
}

#[test]
fn c1_distance_axioms_and_homogeneity() {
    run(c1_axioms);
}

#[test]
fn jacobians_match_finite_differences() {
    run(jacobian_vs_finite_differences);
}

#[test]
fn projection_is_idempotent() {
    run(projection_idempotence);
}

#[test]
fn polynomial_ring_identities() {
    run(polynomial_algebra);
}

#[test]
fn classification_is_scale_invariant() {
    run(classification_scaling);
}

#[test]
fn equilibria_at_infinity_are_bounded_in_number() {
    run(infinite_count);
}

#[test]
fn tridiagonal_eigenvalues_match_dense_solver() {
    run(eigen_vs_dense);
}
