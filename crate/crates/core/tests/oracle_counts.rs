//! Pruned covering-word counts against exhaustive enumeration.

mod common;

use common::*;
use overlap_lab::measures::BernoulliWeights;
use overlap_lab::overlap::count_covering_words_at;

#[test]
fn pruned_counts_match_exhaustive_enumeration() {
    let tally = oracle_comparison(2024);
    assert!(tally.comparisons > 1000, "too few comparisons: {}", tally.comparisons);
    assert!(tally.discrepancies.is_empty(), "{:#?}", tally.discrepancies);
}

#[test]
fn block_system_counts_match_at_shared_endpoints() {
    let sys = block_system();
    let w = BernoulliWeights::uniform(3);
    let depths: Vec<usize> = (1..=8).collect();
    let cylinders = Cylinders::enumerate(&sys, 8, &w);
    for bracket in brackets(&sys, 5, 4, 8) {
        let pruned = count_covering_words_at(&sys, &bracket, &depths, &w, f64::INFINITY).unwrap();
        let oracle = cylinders.counts(&bracket, &w, f64::INFINITY);
        let pruned: Vec<_> = pruned.iter().map(|c| (c.beta, c.filtered)).collect();
        assert_eq!(pruned, oracle);
    }
}
