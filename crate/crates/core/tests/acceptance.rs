use mrlrc::acceptance::{self, Outcome};

fn check(outcome: Outcome) {
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn example_1() {
    check(acceptance::example_1());
}

#[test]
fn sweep_series() {
    check(acceptance::sweep_series());
}

#[test]
fn worked_example() {
    check(acceptance::worked_example());
}

#[test]
fn local_polynomial_sum() {
    check(acceptance::local_polynomial_sum());
}

#[test]
fn maximal_recoverability() {
    check(acceptance::maximal_recoverability());
}

#[test]
fn mutual_information() {
    check(acceptance::mutual_information());
}

#[test]
fn entropy_rank() {
    check(acceptance::entropy_rank());
}

#[test]
fn formula_vs_oracle() {
    check(acceptance::formula_vs_oracle());
}

#[test]
fn repair_equivalence() {
    check(acceptance::repair_equivalence());
}
