mod common;

use common::tables;

#[test]
fn baseline_bimatrix() {
    tables::baseline_bimatrix();
}

#[test]
fn baseline_rejects_non_positive_rewards() {
    tables::baseline_rejects_non_positive_rewards();
}

#[test]
fn static_bayesian_bimatrices() {
    tables::static_bayesian_bimatrices();
}

#[test]
fn escalation_with_defender_types() {
    tables::escalation_with_defender_types();
}

#[test]
fn exercise_matrices() {
    tables::exercise_matrices();
}

#[test]
fn initial_stage_table() {
    tables::initial_stage_table();
}

#[test]
fn intermediate_stage_table() {
    tables::intermediate_stage_table();
}

#[test]
fn final_stage_table() {
    tables::final_stage_table();
}

#[test]
fn initial_transition_map() {
    tables::initial_transition_map();
}

#[test]
fn intermediate_transition_map() {
    tables::intermediate_transition_map();
}

#[test]
fn apt_shape_and_priors() {
    tables::apt_shape_and_priors();
}
