mod common;

use hypersr::expr::{BatchScratch, Node};
use hypersr::ExpressionTree;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tree_from_seed(seed: u64, n_extras: usize) -> ExpressionTree {
    let fs = common::full_function_set(n_extras);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_parent(&fs, &mut rng)
}

/// Bindings spanning tiny, ordinary and huge magnitudes of both signs.
fn wild_value<R: Rng>(rng: &mut R) -> f64 {
    let mag = 10f64.powf(rng.random_range(-12.0..12.0));
    match rng.random_range(0..4) {
        0 => 0.0,
        1 => -mag,
        _ => mag,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), extras in 0usize..3) {
        let tree = tree_from_seed(seed, extras);
        let vars = common::full_function_set(extras).variables().to_vec();
        let text = tree.to_infix(&vars);
        let back = ExpressionTree::parse(&text, &vars).unwrap();
        prop_assert_eq!(&back, &tree, "{}", text);
        prop_assert_eq!(back.to_infix(&vars), text);
    }

    #[test]
    fn size_and_depth_are_consistent(seed in any::<u64>()) {
        let tree = tree_from_seed(seed, 0);
        prop_assert!(tree.size() > tree.depth());
        prop_assert_eq!(tree.subtree_end(0), tree.size());
        // Every node except the root is the child of exactly one operator.
        let arity: usize = tree.nodes().iter().map(Node::arity).sum();
        prop_assert_eq!(arity + 1, tree.size());
    }

    #[test]
    fn evaluation_is_pure(seed in any::<u64>(), x in prop::array::uniform3(-50.0f64..50.0)) {
        let tree = tree_from_seed(seed, 0);
        let a = tree.evaluate(&x).unwrap();
        let b = tree.evaluate(&x).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn batch_matches_scalar_bitwise(seed in any::<u64>(), n in 1usize..40) {
        let tree = tree_from_seed(seed, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let columns: Vec<Vec<f64>> = (0..4).map(|_| (0..n).map(|_| wild_value(&mut rng)).collect()).collect();
        let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
        let mut out = vec![0.0; n];
        tree.evaluate_batch(&cols, &mut out, &mut BatchScratch::default()).unwrap();
        for (i, got) in out.iter().enumerate() {
            let row: Vec<f64> = columns.iter().map(|c| c[i]).collect();
            prop_assert_eq!(got.to_bits(), tree.evaluate(&row).unwrap().to_bits());
        }
    }
}

#[test]
fn evaluation_is_total_over_random_trees_and_bindings() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fs = common::full_function_set(1);
    for i in 0..100_000 {
        let tree = common::random_parent(&fs, &mut rng);
        let x: Vec<f64> = (0..4).map(|_| wild_value(&mut rng)).collect();
        let v = tree.evaluate(&x).unwrap();
        assert!(v.is_finite(), "iteration {i}: {} at {x:?} -> {v}", tree.to_infix(fs.variables()));
    }
}

#[test]
fn unbound_variable_is_an_error_not_a_panic() {
    let vars: Vec<String> = ["I1bar", "I2bar", "J", "eta1"].map(String::from).to_vec();
    let tree = ExpressionTree::parse("I1bar * eta1", &vars).unwrap();
    assert!(tree.evaluate(&[3.0, 3.0, 1.0]).is_err());
    assert!(tree.validate(3).is_err());
    assert!(tree.validate(4).is_ok());
}

#[test]
fn malformed_node_sequences_are_rejected() {
    use hypersr::Op;
    assert!(ExpressionTree::from_nodes(vec![]).is_err());
    assert!(ExpressionTree::from_nodes(vec![Node::Op(Op::Add), Node::Var(0)]).is_err());
    assert!(ExpressionTree::from_nodes(vec![Node::Var(0), Node::Var(1)]).is_err());
    assert!(ExpressionTree::from_nodes(vec![Node::Const(f64::NAN)]).is_err());
}

#[test]
fn folding_and_rounding_recovers_clean_coefficients() {
    let vars: Vec<String> = ["I1bar", "I2bar", "J"].map(String::from).to_vec();
    let noisy = ExpressionTree::parse(
        "0.4812 * I1bar + (0.1198 + J - J) * I2bar + exp(J - 1) * 3",
        &vars,
    )
    .unwrap();
    let clean = ExpressionTree::parse("0.48 * I1bar + 0.12 * I2bar + 3", &vars).unwrap();
    let rounded = common::fold_and_round(&noisy, 2);
    assert_eq!(rounded, clean, "{}", rounded.to_infix(&vars));
}
