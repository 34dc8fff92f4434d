//! Variation operators on flat pre-order trees.

use rand::Rng;

use crate::expr::random::{random_constant, random_tree};
use crate::expr::{subtree_end, ExpressionTree, FunctionSet, InitMethod, Node};

/// Per-node replacement probability of point mutation.
pub const POINT_REPLACE_PROBABILITY: f64 = 0.05;

fn random_span<R: Rng + ?Sized>(tree: &ExpressionTree, rng: &mut R) -> (usize, usize) {
    let start = rng.random_range(0..tree.size());
    (start, tree.subtree_end(start))
}

fn splice(parent: &[Node], span: (usize, usize), insert: &[Node]) -> ExpressionTree {
    let (start, end) = span;
    let mut nodes = Vec::with_capacity(parent.len() - (end - start) + insert.len());
    nodes.extend_from_slice(&parent[..start]);
    nodes.extend_from_slice(insert);
    nodes.extend_from_slice(&parent[end..]);
    ExpressionTree::from_nodes_unchecked(nodes)
}

/// Replaces a random subtree of `parent` with a random subtree of `donor`.
pub fn crossover<R: Rng + ?Sized>(
    parent: &ExpressionTree,
    donor: &ExpressionTree,
    rng: &mut R,
) -> ExpressionTree {
    let span = random_span(parent, rng);
    let (ds, de) = random_span(donor, rng);
    splice(parent.nodes(), span, &donor.nodes()[ds..de])
}

/// Replaces a random subtree with a freshly grown one.
pub fn subtree_mutation<R: Rng + ?Sized>(
    parent: &ExpressionTree,
    fs: &FunctionSet,
    init_depth: (usize, usize),
    rng: &mut R,
) -> ExpressionTree {
    let span = random_span(parent, rng);
    let depth = rng.random_range(init_depth.0..=init_depth.1);
    let fresh = random_tree(fs, InitMethod::Grow, depth, rng);
    splice(parent.nodes(), span, fresh.nodes())
}

/// Replaces a random subtree with one of its own subtrees.
pub fn hoist_mutation<R: Rng + ?Sized>(parent: &ExpressionTree, rng: &mut R) -> ExpressionTree {
    let (start, end) = random_span(parent, rng);
    let inner = rng.random_range(start..end);
    let inner_end = subtree_end(parent.nodes(), inner);
    splice(parent.nodes(), (start, end), &parent.nodes()[inner..inner_end])
}

/// Replaces nodes in kind, each with probability [`POINT_REPLACE_PROBABILITY`].
///
/// Operators become a different operator of equal arity, variables a
/// different variable, constants a fresh draw. Nodes with no alternative are
/// kept.
pub fn point_mutation<R: Rng + ?Sized>(
    parent: &ExpressionTree,
    fs: &FunctionSet,
    rng: &mut R,
) -> ExpressionTree {
    let mut nodes = parent.nodes().to_vec();
    for node in nodes.iter_mut() {
        if !rng.random_bool(POINT_REPLACE_PROBABILITY) {
            continue;
        }
        *node = match *node {
            Node::Op(op) => {
                let n_alt = fs
                    .operators()
                    .iter()
                    .filter(|o| **o != op && o.arity() == op.arity())
                    .count();
                if n_alt == 0 {
                    continue;
                }
                let pick = rng.random_range(0..n_alt);
                let alt = fs
                    .operators()
                    .iter()
                    .filter(|o| **o != op && o.arity() == op.arity())
                    .nth(pick)
                    .copied()
                    .expect("pick < n_alt");
                Node::Op(alt)
            }
            Node::Var(v) => {
                let n_vars = fs.variables().len();
                if n_vars < 2 {
                    continue;
                }
                let mut pick = rng.random_range(0..n_vars - 1) as u16;
                if pick >= v {
                    pick += 1;
                }
                Node::Var(pick)
            }
            Node::Const(_) => Node::Const(random_constant(fs, rng)),
        };
    }
    ExpressionTree::from_nodes_unchecked(nodes)
}
