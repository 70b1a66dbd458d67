use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regen::dss::{rs_base, xor_base_322, LinearDss, RepairRule};
use regen::gf::{mul_reduce, Field, FieldMatrix, FieldSpec, Symbol};
use regen::tradeoff::SystemParams;
use regen::verifier::{verify, verify_exact_repair, verify_reconstruction, VerifyOptions};
use regen::Error;

fn random_message(len: usize, seed: u64) -> Vec<Symbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(0..256) as Symbol).collect()
}

/// Lagrange evaluation at `x` of the polynomial through `(xs[i], ys[i])`,
/// using only the carry-less reference product.
fn lagrange(xs: &[Symbol], ys: &[Symbol], x: Symbol) -> Symbol {
    let mul = |a, b| mul_reduce(a, b, 8, 0x11D);
    let inv = |a: Symbol| (1..=255).find(|&b| mul(a, b) == 1).unwrap();
    let mut acc = 0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut term = yi;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                term = mul(term, mul(x ^ xj, inv(xi ^ xj)));
            }
        }
        acc ^= term;
    }
    acc
}

#[test]
fn xor_code_encodes_and_reconstructs() {
    let code = xor_base_322(FieldSpec::GF256).unwrap();
    let (x, y) = (0x35, 0xA7);
    let nodes = code.encode(&[x, y]).unwrap();
    assert_eq!(nodes, vec![vec![x], vec![y], vec![x ^ y]]);
    let back = code.reconstruct(&[0, 2], &[&nodes[0], &nodes[2]]).unwrap();
    assert_eq!(back, vec![x, y]);
}

#[test]
fn xor_code_repairs_third_node() {
    let code = xor_base_322(FieldSpec::GF256).unwrap();
    let nodes = code.encode(&[9, 200]).unwrap();
    let (content, bw) = code.repair(2, &[0, 1], &[&nodes[0], &nodes[1]]).unwrap();
    assert_eq!(content, vec![9 ^ 200]);
    assert_eq!(bw.per_helper, BTreeMap::from([(0, 1), (1, 1)]));
    assert_eq!(bw.total, 2);
}

#[test]
fn zero_message_gives_zero_nodes_and_same_bandwidth() {
    let code = rs_base(5, 3, FieldSpec::GF256).unwrap();
    let nodes = code.encode(&[0, 0, 0]).unwrap();
    assert!(nodes.iter().flatten().all(|&s| s == 0));
    let contents: Vec<&[Symbol]> = [0, 1, 2].iter().map(|&i| nodes[i].as_slice()).collect();
    let (zero, bw0) = code.repair(4, &[0, 1, 2], &contents).unwrap();
    assert_eq!(zero, vec![0]);
    let live = code.encode(&random_message(3, 5)).unwrap();
    let contents: Vec<&[Symbol]> = [0, 1, 2].iter().map(|&i| live[i].as_slice()).collect();
    let (_, bw1) = code.repair(4, &[0, 1, 2], &contents).unwrap();
    assert_eq!(bw0, bw1);
}

#[test]
fn rs_matches_polynomial_evaluation() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap();
    let msg = random_message(2, 11);
    let nodes = code.encode(&msg).unwrap();
    // systematic: node i < k stores p(i), where p interpolates the message
    for i in 0..4u16 {
        assert_eq!(nodes[i as usize], vec![lagrange(&[0, 1], &msg, i)]);
    }
}

#[test]
fn rs_over_gf2_is_the_xor_code() {
    let rs = rs_base(3, 2, FieldSpec::GF2).unwrap();
    let xor = xor_base_322(FieldSpec::GF2).unwrap();
    assert_eq!(rs.generators(), xor.generators());
}

#[test]
fn rs_field_too_small() {
    assert!(matches!(rs_base(4, 2, FieldSpec::GF2), Err(Error::Input(_))));
    assert!(rs_base(17, 5, FieldSpec::GF16).is_ok());
    assert!(rs_base(18, 5, FieldSpec::GF16).is_err());
}

#[test]
fn rs_msr_bandwidth() {
    let code = rs_base(4, 3, FieldSpec::GF256).unwrap();
    let d = code.declared();
    assert_eq!((d.alpha, d.gamma, d.file), (1, 3, 3));
}

#[test]
fn rs_5_2_exhaustive() {
    let code = rs_base(5, 2, FieldSpec::GF256).unwrap();
    let opts = VerifyOptions::default();
    let rec = verify_reconstruction(&code, &opts).unwrap();
    assert!(rec.ok);
    assert_eq!(rec.checks, 10);
    let rep = verify_exact_repair(&code, &opts).unwrap();
    assert!(rep.ok);
    assert_eq!(rep.checks, 30);
    assert!(rep.bandwidth.iter().all(|(_, b)| b.total == 2));
}

#[test]
fn every_vandermonde_minor_is_invertible() {
    let f = Field::gf256();
    let code = rs_base(6, 3, FieldSpec::GF256).unwrap();
    let g: Vec<FieldMatrix> = (0..6).map(|i| code.node_generator(i).unwrap()).collect();
    for s in itertools::Itertools::combinations(0..6usize, 3) {
        let m = FieldMatrix::stack(s.iter().map(|&i| &g[i]), 3).unwrap();
        assert_eq!(f.mat_rank(&m), 3, "{s:?}");
    }
}

#[test]
fn wrong_counts_are_input_errors() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap();
    let nodes = code.encode(&[1, 2]).unwrap();
    assert!(matches!(code.encode(&[1]), Err(Error::Input(_))));
    assert!(matches!(code.reconstruct(&[0], &[&nodes[0]]), Err(Error::Input(_))));
    assert!(matches!(
        code.repair(0, &[1, 2, 3], &[&nodes[1], &nodes[2], &nodes[3]]),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        code.repair(0, &[0, 1], &[&nodes[0], &nodes[1]]),
        Err(Error::Input(_))
    ));
    assert!(matches!(
        code.reconstruct(&[1, 1], &[&nodes[1], &nodes[1]]),
        Err(Error::Input(_))
    ));
}

#[test]
fn zeroed_generator_row_is_caught() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap();
    let mut gens = code.generators().unwrap().to_vec();
    gens[3] = FieldMatrix::zeros(1, 2);
    let broken = LinearDss::dense(code.params(), FieldSpec::GF256, 2, gens, RepairRule::ReEncode, "broken").unwrap();
    let rec = verify_reconstruction(&broken, &VerifyOptions::default()).unwrap();
    assert!(!rec.ok);
    assert!(rec.counterexample.unwrap().contains(&3));
}

#[test]
fn zeroed_transfer_matrix_is_caught() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap().tabulated().unwrap();
    let Some(RepairRule::Table(table)) = code.repair_rule() else {
        panic!("tabulated code has a table");
    };
    let mut table = table.clone();
    let key = (1, vec![0, 3]);
    let plan = table.get_mut(&key).unwrap();
    plan.sends[1] = FieldMatrix::zeros(1, 1);
    let broken = LinearDss::dense(
        code.params(),
        FieldSpec::GF256,
        2,
        code.generators().unwrap().to_vec(),
        RepairRule::Table(table),
        "broken",
    )
    .unwrap();
    let rep = verify_exact_repair(&broken, &VerifyOptions::default()).unwrap();
    assert!(!rep.ok);
    let ce = rep.counterexample.unwrap();
    assert_eq!((ce.failed, ce.helpers), key);
}

#[test]
fn partial_table_rejected() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap().tabulated().unwrap();
    let Some(RepairRule::Table(table)) = code.repair_rule() else {
        panic!("tabulated code has a table");
    };
    let mut table = table.clone();
    table.remove(&(0, vec![1, 2]));
    let err = LinearDss::dense(
        code.params(),
        FieldSpec::GF256,
        2,
        code.generators().unwrap().to_vec(),
        RepairRule::Table(table),
        "partial",
    );
    assert!(matches!(err, Err(Error::Input(_))));
}

#[test]
fn tabulated_code_passes_verification() {
    let code = rs_base(5, 3, FieldSpec::GF256).unwrap().tabulated().unwrap();
    let report = verify(&code, &VerifyOptions::default()).unwrap();
    assert!(report.passed(), "{report:?}");
}

#[test]
fn json_round_trip() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap();
    let text = code.to_json().unwrap();
    let back = LinearDss::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
    let msg = random_message(2, 3);
    assert_eq!(back.encode(&msg).unwrap(), code.encode(&msg).unwrap());

    let table = code.tabulated().unwrap();
    let text = table.to_json().unwrap();
    assert_eq!(LinearDss::from_json(&text).unwrap().to_json().unwrap(), text);
}

#[test]
fn json_rejects_tampered_header() {
    let code = rs_base(4, 2, FieldSpec::GF256).unwrap();
    let mut doc = code.to_document();
    doc.node_lens[0] = 2;
    assert!(LinearDss::from_document(doc).is_err());
}

#[test]
fn dense_validation() {
    let p = SystemParams::new(3, 2, 2).unwrap();
    let g = FieldMatrix::from_rows(&[vec![1, 0]]).unwrap();
    let short = LinearDss::dense(
        p,
        FieldSpec::GF256,
        2,
        vec![g.clone(), g.clone()],
        RepairRule::ReEncode,
        "x",
    );
    assert!(matches!(short, Err(Error::Input(_))));
    let big = FieldMatrix::from_rows(&[vec![2, 0]]).unwrap();
    let outside = LinearDss::dense(p, FieldSpec::GF2, 2, vec![g.clone(), g, big], RepairRule::ReEncode, "x");
    assert!(matches!(outside, Err(Error::Input(_))));
}
