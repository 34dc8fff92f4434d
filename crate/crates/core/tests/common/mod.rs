//! Helpers shared by the integration tests.
#![allow(dead_code)]

use hypersr::expr::{random_tree, standard_variables, InitMethod, Node};
use hypersr::{ExpressionTree, FunctionSet, Op};
use rand::Rng;

pub fn function_set(n_extras: usize) -> FunctionSet {
    FunctionSet::new(
        FunctionSet::default_operators(),
        standard_variables(n_extras),
        (-1.0, 1.0),
    )
    .unwrap()
}

/// Every operator including `pow`.
pub fn full_function_set(n_extras: usize) -> FunctionSet {
    let mut ops = FunctionSet::default_operators();
    if !ops.contains(&Op::Pow) {
        ops.push(Op::Pow);
    }
    FunctionSet::new(ops, standard_variables(n_extras), (-1.0, 1.0)).unwrap()
}

/// Random parent tree, occasionally a bare leaf.
pub fn random_parent<R: Rng>(fs: &FunctionSet, rng: &mut R) -> ExpressionTree {
    if rng.random_bool(0.05) {
        let leaf = if rng.random_bool(0.5) {
            Node::Var(rng.random_range(0..fs.variables().len()) as u16)
        } else {
            Node::Const(rng.random_range(-1.0..1.0))
        };
        return ExpressionTree::from_nodes(vec![leaf]).unwrap();
    }
    let method = if rng.random_bool(0.5) { InitMethod::Full } else { InitMethod::Grow };
    let depth = rng.random_range(1..=5);
    random_tree(fs, method, depth, rng)
}

/// All ways to read `child` as `parent[..s] + inserted + parent[e..]` where
/// `parent[s..e]` is a whole subtree. Returns `(s, e, inserted)` triples.
pub fn splice_decompositions<'c>(
    parent: &ExpressionTree,
    child: &'c ExpressionTree,
) -> Vec<(usize, usize, &'c [Node])> {
    let (p, c) = (parent.nodes(), child.nodes());
    let prefix = p.iter().zip(c).take_while(|(a, b)| a == b).count();
    let suffix = p.iter().rev().zip(c.iter().rev()).take_while(|(a, b)| a == b).count();
    let mut out = Vec::new();
    for s in 0..=prefix.min(p.len() - 1) {
        let e = parent.subtree_end(s);
        let tail = p.len() - e;
        if tail > suffix || c.len() < s + tail + 1 {
            continue;
        }
        out.push((s, e, &c[s..c.len() - tail]));
    }
    out
}

/// Whole subtrees of `tree`, as node slices.
pub fn subtrees(tree: &ExpressionTree) -> impl Iterator<Item = &[Node]> {
    (0..tree.size()).map(move |i| &tree.nodes()[i..tree.subtree_end(i)])
}

/// Sets `J` (variable 2) to 1, folds variable-free subtrees into constants
/// and rounds every constant to `decimals` places.
pub fn fold_and_round(tree: &ExpressionTree, decimals: i32) -> ExpressionTree {
    let scale = 10f64.powi(decimals);
    let mut out = Vec::new();
    fold(tree.nodes(), 0, &mut out);
    for n in out.iter_mut() {
        if let Node::Const(c) = n {
            *c = (*c * scale).round() / scale;
        }
    }
    ExpressionTree::from_nodes(out).unwrap()
}

fn fold(nodes: &[Node], at: usize, out: &mut Vec<Node>) -> usize {
    match nodes[at] {
        Node::Var(2) => {
            out.push(Node::Const(1.0));
            at + 1
        }
        Node::Var(_) | Node::Const(_) => {
            out.push(nodes[at]);
            at + 1
        }
        Node::Op(op) => {
            let start = out.len();
            out.push(nodes[at]);
            let mut next = at + 1;
            for _ in 0..op.arity() {
                next = fold(nodes, next, out);
            }
            if out[start + 1..].iter().all(|n| !matches!(n, Node::Var(_))) {
                let sub = ExpressionTree::from_nodes(out[start..].to_vec()).unwrap();
                let v = sub.evaluate(&[]).unwrap();
                out.truncate(start);
                out.push(Node::Const(v));
            }
            next
        }
    }
}
