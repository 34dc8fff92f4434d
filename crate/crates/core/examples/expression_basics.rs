//! Build, print, parse and evaluate calculation trees.
//!
//! ```bash
//! cargo run --release -p hypersr --example expression_basics
//! ```

use hypersr::expr::{random_tree, standard_variables, InitMethod, Node};
use hypersr::{ExpressionTree, FunctionSet, Op};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = standard_variables(0);

    // Pre-order node list of (I1bar + I2bar) * sqrt(J): operator, then its children.
    let tree = ExpressionTree::from_nodes(vec![
        Node::Op(Op::Mul),
        Node::Op(Op::Add),
        Node::Var(0),
        Node::Var(1),
        Node::Op(Op::Sqrt),
        Node::Var(2),
    ])?;
    println!("{}  size {} depth {}", tree.to_infix(&vars), tree.size(), tree.depth());
    println!("  at (3, 3, 1): {}", tree.evaluate(&[3.0, 3.0, 1.0])?);

    // Text round trip.
    let mr = ExpressionTree::parse("0.48 * (I1bar - 3) + 0.12 * (I2bar - 3)", &vars)?;
    println!("{}  size {}", mr.to_infix(&vars), mr.size());
    println!("  at (5, 4.25, 1): {}", mr.evaluate(&[5.0, 4.25, 1.0])?);

    // Protected operators keep every evaluation finite.
    for text in ["I1bar / (J - J)", "log(J - J)", "sqrt(0 - I1bar)", "exp(exp(I1bar))"] {
        let t = ExpressionTree::parse(text, &vars)?;
        println!("{text:>18} = {}", t.evaluate(&[3.0, 3.0, 1.0])?);
    }

    // Random trees as the search initializes them.
    let fs = FunctionSet::new(FunctionSet::default_operators(), vars.clone(), (-1.0, 1.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (method, depth) in [(InitMethod::Full, 2), (InitMethod::Grow, 4)] {
        let t = random_tree(&fs, method, depth, &mut rng);
        println!("{method:?} depth {depth}: {}", t.to_infix(&vars));
    }

    // Parse errors point at the offending input.
    if let Err(e) = ExpressionTree::parse("I1bar + I3bar", &vars) {
        println!("error: {e}");
    }
    Ok(())
}
