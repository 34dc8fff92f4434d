use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ExpressionTree, FunctionSet, Node};

/// Probability that a generated leaf is a variable rather than a constant.
pub const VARIABLE_LEAF_PROBABILITY: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMethod {
    Full,
    Grow,
}

/// Generates a random tree of at most `depth` levels below the root.
///
/// `Full` places operators on every level above `depth`. `Grow` always
/// starts from an operator and then flips a fair coin between operator and
/// leaf on each further level.
pub fn random_tree<R: Rng + ?Sized>(
    fs: &FunctionSet,
    method: InitMethod,
    depth: usize,
    rng: &mut R,
) -> ExpressionTree {
    assert!(depth >= 1, "random_tree requires depth >= 1");
    let mut nodes = Vec::new();
    grow_node(fs, method, 0, depth, rng, &mut nodes);
    ExpressionTree::from_nodes_unchecked(nodes)
}

fn grow_node<R: Rng + ?Sized>(
    fs: &FunctionSet,
    method: InitMethod,
    level: usize,
    depth: usize,
    rng: &mut R,
    nodes: &mut Vec<Node>,
) {
    let operator = level < depth
        && match method {
            InitMethod::Full => true,
            InitMethod::Grow => level == 0 || rng.random_bool(0.5),
        };
    if operator {
        let ops = fs.operators();
        let op = ops[rng.random_range(0..ops.len())];
        nodes.push(Node::Op(op));
        for _ in 0..op.arity() {
            grow_node(fs, method, level + 1, depth, rng, nodes);
        }
    } else {
        nodes.push(random_leaf(fs, rng));
    }
}

pub(crate) fn random_leaf<R: Rng + ?Sized>(fs: &FunctionSet, rng: &mut R) -> Node {
    if rng.random_bool(VARIABLE_LEAF_PROBABILITY) {
        Node::Var(rng.random_range(0..fs.variables().len()) as u16)
    } else {
        Node::Const(random_constant(fs, rng))
    }
}

pub(crate) fn random_constant<R: Rng + ?Sized>(fs: &FunctionSet, rng: &mut R) -> f64 {
    let (lo, hi) = fs.constant_range();
    rng.random_range(lo..hi)
}
