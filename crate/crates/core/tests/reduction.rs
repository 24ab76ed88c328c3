mod common;

use std::sync::Arc;

use common::*;
use cxlab_core::cioper::MonomialCi;
use cxlab_core::gmod::{free_module, residue_field};
use cxlab_core::resol::betti_numbers;
use cxlab_core::yoneda::{
    cocycle_basis, find_reducing_element, reduction_sequence, ReductionResult, SearchOptions,
};

#[test]
fn periodic_module_reduces_through_a_degree_four_class() {
    let a = periodic_ring();
    let m = periodic_module(&a);
    for t in 1..=4 {
        assert_eq!(cocycle_basis(&m, &m, t).unwrap().len(), 9, "Ext^{t}(M,M)");
    }
    let out = find_reducing_element(&m, &SearchOptions::default()).unwrap();
    assert_eq!(out.start_estimate.value, 1);
    let (eta, p, est) = out.found.expect("a reducing class within budget");
    assert_eq!((eta.degree(), eta.shift()), (4, -4));
    assert_eq!(est.value, 0);
    assert_eq!(betti_numbers(&p.module, 1)[1], 0, "K is free");
    assert_eq!(p.module.dim(), m.dim() + p.syzygy_dim);
    assert!(out.transcript.iter().all(|a| a.degree <= 4));
    assert!(out.transcript.iter().filter(|a| a.degree < 4).all(|a| a.estimate != 0));
}

#[test]
fn residue_field_of_cubic_ci_needs_degree_two_classes() {
    let ci = MonomialCi::new(f5(), &[3, 3]).unwrap();
    let k = residue_field(ci.algebra());
    let ReductionResult::Complete(seq) = reduction_sequence(&k, &SearchOptions::default()).unwrap() else {
        panic!("no reduction sequence");
    };
    assert_eq!(seq.estimates(), vec![2, 1, 0]);
    let degrees: Vec<Option<usize>> = seq.links.iter().map(|l| l.eta_degree).collect();
    assert_eq!(degrees, vec![None, Some(2), Some(2)]);
    assert_eq!(seq.total_shift(), 2);
}

#[test]
fn residue_field_of_quadric_reduces_through_degree_one() {
    let ci = MonomialCi::new(f5(), &[2, 2]).unwrap();
    let k = residue_field(ci.algebra());
    let ReductionResult::Complete(seq) = reduction_sequence(&k, &SearchOptions::default()).unwrap() else {
        panic!("no reduction sequence");
    };
    assert_eq!(seq.estimates(), vec![2, 1, 0]);
    assert_eq!(seq.total_shift(), 0);
}

#[test]
fn free_module_has_trivial_sequence() {
    let a = quadric();
    let f = free_module(&a, &[0, 2]);
    let ReductionResult::Complete(seq) = reduction_sequence(&f, &SearchOptions::default()).unwrap() else {
        panic!("no reduction sequence");
    };
    assert_eq!(seq.links.len(), 1);
    assert!(Arc::ptr_eq(&seq.links[0].module, &f));
}

#[test]
fn exhausted_budget_reports_transcript() {
    let a = periodic_ring();
    let m = periodic_module(&a);
    let opts = SearchOptions {
        max_search_degree: 2,
        budget: 3,
        ..SearchOptions::default()
    };
    let ReductionResult::NotFound { partial, transcript } = reduction_sequence(&m, &opts).unwrap() else {
        panic!("found a reducer below degree 3");
    };
    assert_eq!(partial.estimates(), vec![1]);
    assert!(!transcript.is_empty() && transcript.iter().all(|a| a.degree <= 2));
}
