use ksmin::selftest::{composition_suite, oracle_suite, partition_suite, Config, SuiteResult};
use ksmin::wkme::WeakMode;

fn report(r: &SuiteResult) {
    println!("{r}");
    for v in r.violations.iter().take(3) {
        println!("{v}");
    }
    assert!(r.passed(), "{r}");
}

#[test]
fn partitions_and_quotients_divergence_consistent() {
    for seed in [1, 7] {
        report(&partition_suite(Config { cases: 200, seed }, WeakMode::DivergenceConsistent));
    }
}

/// With the literal weak check the only failures are quotients that can stay
/// in a block forever where the original cannot.
#[test]
fn literal_weak_failures_are_added_divergence_only() {
    let r = partition_suite(Config { cases: 200, seed: 1 }, WeakMode::Literal);
    for v in &r.violations {
        let head = v.lines().next().unwrap();
        assert!(head.contains("WKME quotient not stutter-trace equivalent: divergence"), "{head}");
        assert!(head.ends_with("(only in second)"), "{head}");
    }
}

#[test]
fn oracles_agree_with_brute_force() {
    report(&oracle_suite(Config { cases: 150, seed: 2 }));
}

#[test]
fn composition_preserves_kme() {
    report(&composition_suite(Config { cases: 100, seed: 3 }));
}
