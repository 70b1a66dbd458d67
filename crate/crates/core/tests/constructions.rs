use std::sync::Arc;

use regen::constructions::{
    blowup_full, blowup_simple, concat, copy_blowup, filenode_blowup, formula_point, iterate, Builder, Recipe,
};
use regen::dss::{rs_base, xor_base_322, CompositionKind, LinearDss, Slot};
use regen::gf::{FieldSpec, Symbol};
use regen::tradeoff::{perf_p1, perf_p3, perf_p4, timeshare_bound, SystemParams};
use regen::verifier::{check_symmetric_repair, verify, Mode, VerifyOptions};
use regen::{Error, Rational};

fn base32() -> Arc<LinearDss> {
    rs_base(3, 2, FieldSpec::GF256).unwrap()
}

fn symbols(code: &LinearDss) -> (usize, usize, usize) {
    let d = code.declared();
    (d.alpha, d.gamma, d.file)
}

fn params(n: usize, k: usize, d: usize) -> SystemParams {
    SystemParams::new(n, k, d).unwrap()
}

fn verified(code: &LinearDss) -> regen::verifier::VerificationReport {
    let report = verify(code, &VerifyOptions::default()).unwrap();
    assert!(report.passed(), "{}", report.to_json().unwrap());
    report
}

#[test]
fn blowup_simple_of_xor_code() {
    let code = blowup_simple(&xor_base_322(FieldSpec::GF256).unwrap()).unwrap();
    assert_eq!(code.params(), params(4, 3, 3));
    assert_eq!(symbols(&code), (3, 6, 8));
    let meta = code.composition().unwrap();
    assert_eq!(meta.copies, 4);
    for (j, c) in meta.copy_layout.iter().enumerate() {
        assert_eq!(c.slots[j], Slot::Empty);
    }
    // the first node holds nothing from copy 0 and x from copies 1..3
    let file: Vec<Symbol> = (1..=8).collect();
    let nodes = code.encode(&file).unwrap();
    assert_eq!(nodes[0], vec![3, 5, 7]);
    assert_eq!(nodes[1], vec![1, 6, 8]);
    assert_eq!(nodes[3], vec![1 ^ 2, 3 ^ 4, 5 ^ 6]);
    let report = verified(&code);
    assert_eq!(report.checks_run.total, 4 + 4);
    assert!(report.symmetry.symmetric);
}

#[test]
fn blowup_simple_file_size_is_p1() {
    let code = blowup_simple(&base32()).unwrap();
    let p1 = perf_p1(&params(4, 3, 3), &Rational::integer(3), 2).unwrap();
    assert_eq!(p1.file_size, Rational::integer(8));
    assert_eq!(p1.gamma, Rational::integer(6));
    assert_eq!(Rational::from(code.file_len()), p1.file_size);
}

#[test]
fn blowup_simple_zero_file() {
    let code = blowup_simple(&base32()).unwrap();
    let nodes = code.encode(&[0; 8]).unwrap();
    assert!(nodes.iter().flatten().all(|&x| x == 0));
}

#[test]
fn blowup_full_of_base_32() {
    let code = blowup_full(&base32()).unwrap();
    assert_eq!(code.params(), params(4, 3, 3));
    assert_eq!(symbols(&code), (18, 36, 48));
    let meta = code.composition().unwrap();
    assert_eq!(meta.copies, 24);
    let mut perms: Vec<Vec<usize>> = meta
        .copy_layout
        .iter()
        .map(|c| c.permutation.clone().unwrap())
        .collect();
    let sorted = perms.clone();
    perms.sort();
    perms.dedup();
    assert_eq!(perms, sorted, "permutations are distinct and lexicographic");

    let report = verified(&code);
    assert!(report.symmetry.symmetric);
    assert_eq!(report.symmetry.min_helper_transfer, 12);
    assert_eq!(report.symmetry.max_helper_transfer, 12);
    let p1 = perf_p1(&params(4, 3, 3), &Rational::one(), 2).unwrap();
    assert_eq!(p1.file_size, Rational::new(48, 18));
    assert_eq!(report.formula.unwrap().formula, "p1");
}

#[test]
fn blowup_full_symmetric_with_spare_helpers() {
    // base (4,2,2): the composite (5,3,3) leaves one survivor out of each
    // repair, so copies sometimes see d+1 usable helpers
    let code = blowup_full(&rs_base(4, 2, FieldSpec::GF256).unwrap()).unwrap();
    assert_eq!(code.params(), params(5, 3, 3));
    let report = verified(&code);
    assert!(report.symmetry.symmetric, "{:?}", report.symmetry);
    assert!(report.constant_gamma);
}

#[test]
fn blowup_full_and_simple_share_ratios() {
    for (n, k) in [(3, 2), (4, 2), (4, 3)] {
        let base = rs_base(n, k, FieldSpec::GF256).unwrap();
        let a = blowup_full(&base).unwrap().declared().to_point().unwrap();
        let b = blowup_simple(&base).unwrap().declared().to_point().unwrap();
        assert!(a.same_normalized(&b));
    }
}

#[test]
fn blowup_full_size_limit() {
    let code = rs_base(6, 2, FieldSpec::GF256).unwrap();
    assert!(matches!(blowup_full(&code), Err(Error::Resource(_))));
}

#[test]
fn iterate_once_is_blowup_full() {
    let a = iterate(&base32(), 1).unwrap();
    let b = blowup_full(&base32()).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn iterate_twice() {
    let code = iterate(&base32(), 2).unwrap();
    assert_eq!(code.params(), params(5, 4, 4));
    assert_eq!(code.composition_kind(), Some(CompositionKind::Iterate));
    assert_eq!(symbols(&code), (4 * 24 * 18, 4 * 24 * 36, 120 * 48));
    let report = verified(&code);
    let measured = report.measured.unwrap().normalized();
    assert_eq!(measured.gamma, Rational::integer(2));
    assert_eq!(measured.file_size, Rational::new(10, 3));
    // each node holds 4*24 copies of a level-one node, each with 6 empties
    // among its 24 sub-copies
    assert!(code.node_lens().iter().all(|&a| a == 96 * 18));
}

#[test]
fn iterate_rejects_zero_and_budget() {
    assert!(matches!(iterate(&base32(), 0), Err(Error::Range(_))));
    let tight = Builder::new(1000);
    assert!(matches!(tight.iterate(&base32(), 2), Err(Error::Resource(_))));
}

#[test]
fn concat_three_xor_codes() {
    let parts = vec![base32(), base32(), base32()];
    let code = concat(&parts).unwrap();
    assert_eq!(code.params(), params(9, 8, 8));
    assert_eq!(symbols(&code), (1, 2, 6));
    let file = [1, 2, 3, 4, 5, 6];
    let nodes = code.encode(&file).unwrap();
    assert_eq!(nodes[0], vec![1]);
    assert_eq!(nodes[4], vec![4]);
    let report = verified(&code);
    assert_eq!(report.checks_run.reconstruction, 9);
}

#[test]
fn concat_single_part_is_identity() {
    let b = base32();
    let c = concat(std::slice::from_ref(&b)).unwrap();
    assert!(Arc::ptr_eq(&b, &c));
}

#[test]
fn concat_mixed_parts() {
    let parts = vec![
        rs_base(4, 3, FieldSpec::GF256).unwrap(),
        rs_base(3, 2, FieldSpec::GF256).unwrap(),
    ];
    let code = concat(&parts).unwrap();
    assert_eq!(code.params(), params(7, 6, 6));
    assert_eq!(code.file_len(), 5);
    let report = verified(&code);
    assert_eq!(report.checks_run.reconstruction, 7);
    assert!(!report.constant_gamma);
}

#[test]
fn concat_mismatch() {
    let parts = vec![rs_base(4, 2, FieldSpec::GF256).unwrap(), base32()];
    assert!(matches!(concat(&parts), Err(Error::Input(_))));
    let other_field = vec![base32(), rs_base(3, 2, FieldSpec::GF16).unwrap()];
    assert!(matches!(concat(&other_field), Err(Error::Input(_))));
}

#[test]
fn copy_blowup_of_base_32() {
    let code = copy_blowup(&base32(), 1).unwrap();
    assert_eq!(code.params(), params(4, 3, 3));
    assert_eq!(symbols(&code), (24, 36, 48));
    let report = verified(&code);
    let p3 = perf_p3(&params(4, 3, 3), &Rational::one(), 1).unwrap();
    assert_eq!(p3.gamma, Rational::new(3, 2));
    assert_eq!(p3.file_size, Rational::integer(2));
    assert!(report.formula.unwrap().matches);
}

#[test]
fn copy_blowup_range() {
    assert!(matches!(copy_blowup(&base32(), 2), Err(Error::Range(_))));
    assert!(matches!(copy_blowup(&base32(), 0), Err(Error::Range(_))));
}

#[test]
fn copy_blowup_general_gamma() {
    // base (4,3,3), l=2: gamma = 2l(d+l)(n+l-2)! alpha + rest * gamma
    let code = copy_blowup(&rs_base(4, 3, FieldSpec::GF256).unwrap(), 2).unwrap();
    let twin = 2 * 2 * 5 * 24;
    assert_eq!(symbols(&code), (720, twin + (720 - twin) * 3, 720 * 3));
    verified(&code);
}

#[test]
fn filenode_blowup_of_base_32() {
    let code = filenode_blowup(&base32()).unwrap();
    assert_eq!(code.params(), params(4, 2, 2));
    assert_eq!(symbols(&code), (30, 36, 48));
    let report = verified(&code);
    // with k = d every helper takes part in the file-node repairs, and the
    // sum over all permutations evens out the rest
    assert!(report.symmetry.symmetric);
    assert_eq!(report.symmetry.max_helper_transfer, 18);
    let p4 = perf_p4(&params(3, 2, 2), &Rational::one()).unwrap();
    assert_eq!(
        (p4.gamma.clone(), p4.file_size.clone()),
        (Rational::new(6, 5), Rational::new(8, 5))
    );
    assert!(report.formula.unwrap().matches);
    // k = d: the point sits on the timesharing line
    let ts = timeshare_bound(&params(4, 2, 2), &Rational::one(), &p4.gamma).unwrap();
    assert_eq!(ts, p4.file_size);
}

#[test]
fn filenode_symmetry_check_without_data() {
    let code = filenode_blowup(&base32()).unwrap();
    let sym = check_symmetric_repair(&code, &Mode::Exhaustive).unwrap();
    assert!(sym.symmetric);
    // same for a base where one survivor sits out of every repair
    let code = filenode_blowup(&rs_base(4, 2, FieldSpec::GF256).unwrap()).unwrap();
    assert_eq!(code.params(), params(5, 2, 2));
    assert!(check_symmetric_repair(&code, &Mode::Exhaustive).unwrap().symmetric);
}

#[test]
fn nested_compositions_verify() {
    for text in [
        "blowup_simple(blowup_simple(base(3,2)))",
        "filenode_blowup(blowup_simple(base(3,2)))",
        "concat(blowup_simple(base(3,2)),blowup_simple(base(3,2)))",
        "blowup_full(concat(base(2,1),base(2,1)))",
    ] {
        let code = Builder::default().build(&text.parse::<Recipe>().unwrap()).unwrap();
        verified(&code);
    }
}

#[test]
fn formula_only_for_msr_seeds() {
    let code = concat(&[base32(), base32()]).unwrap();
    assert!(formula_point(&code).unwrap().is_none());
    let seed = formula_point(&base32()).unwrap().unwrap();
    assert_eq!(seed.formula, "msr");
    assert_eq!(seed.point.gamma, Rational::integer(2));
}

#[test]
fn composite_json_round_trip() {
    for code in [
        blowup_full(&base32()).unwrap(),
        concat(&[base32(), rs_base(4, 3, FieldSpec::GF256).unwrap()]).unwrap(),
        filenode_blowup(&base32()).unwrap(),
    ] {
        let text = code.to_json().unwrap();
        let back = LinearDss::from_json(&text).unwrap();
        assert_eq!(back.to_json().unwrap(), text);
        let file: Vec<Symbol> = (0..code.file_len()).map(|i| (i * 7 % 256) as Symbol).collect();
        assert_eq!(back.encode(&file).unwrap(), code.encode(&file).unwrap());
    }
}

#[test]
fn composite_generator_matches_encoding() {
    let code = copy_blowup(&base32(), 1).unwrap();
    let file: Vec<Symbol> = (0..code.file_len()).map(|i| (i * 31 % 256) as Symbol).collect();
    let nodes = code.encode(&file).unwrap();
    for (i, node) in nodes.iter().enumerate() {
        let g = code.node_generator(i).unwrap();
        assert_eq!(&code.field().mat_vec(&g, &file).unwrap(), node);
    }
}
