//! Strain-energy expression trees.
//!
//! A tree is stored as a flat pre-order array of [`Node`]s. Any subtree is a
//! contiguous span `start..end` of that array, which makes splicing for the
//! variation operators a single `Vec` copy.

mod parse;
pub(crate) mod random;

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

pub use parse::ParseError;
pub use random::{random_tree, InitMethod};

/// Threshold below which a divisor or log argument is treated as zero.
pub const PROTECTED_EPS: f64 = 1e-9;
/// Argument clamp for `exp`.
pub const EXP_CLAMP: f64 = 50.0;
/// Magnitude clamp for `pow`.
pub const POW_CLAMP: f64 = 1e30;
/// Saturation bound applied to every operator result.
pub const SATURATION: f64 = 1e300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("variable index {index} is not bound (only {bound} values supplied)")]
    UnboundVariable { index: usize, bound: usize },
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("non-finite constant {0}")]
    NonFiniteConstant(f64),
    #[error("invalid function set: {0}")]
    InvalidFunctionSet(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Exp,
    Log,
    Pow,
}

impl Op {
    pub const ALL: [Op; 8] = [
        Op::Add,
        Op::Sub,
        Op::Mul,
        Op::Div,
        Op::Sqrt,
        Op::Exp,
        Op::Log,
        Op::Pow,
    ];

    pub fn arity(self) -> usize {
        match self {
            Op::Sqrt | Op::Exp | Op::Log => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
            Op::Sqrt => "sqrt",
            Op::Exp => "exp",
            Op::Log => "log",
            Op::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.name() == name)
    }

    #[inline]
    pub fn apply1(self, a: f64) -> f64 {
        let v = match self {
            Op::Sqrt => a.abs().sqrt(),
            Op::Exp => a.clamp(-EXP_CLAMP, EXP_CLAMP).exp(),
            Op::Log => {
                if a.abs() < PROTECTED_EPS {
                    0.0
                } else {
                    a.abs().ln()
                }
            }
            _ => unreachable!("{} is not unary", self.name()),
        };
        v.clamp(-SATURATION, SATURATION)
    }

    #[inline]
    pub fn apply2(self, a: f64, b: f64) -> f64 {
        let v = match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b.abs() < PROTECTED_EPS {
                    1.0
                } else {
                    a / b
                }
            }
            Op::Pow => {
                let p = a.abs().powf(b);
                if p.is_nan() {
                    // |a|^b is never NaN for finite inputs; kept total regardless.
                    1.0
                } else {
                    p.min(POW_CLAMP)
                }
            }
            _ => unreachable!("{} is not binary", self.name()),
        };
        v.clamp(-SATURATION, SATURATION)
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Op(Op),
    Var(u16),
    Const(f64),
}

impl Node {
    pub fn arity(&self) -> usize {
        match self {
            Node::Op(op) => op.arity(),
            _ => 0,
        }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, Node::Op(_))
    }
}

/// Operators, variable names and constant range available to the search.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSet {
    operators: Vec<Op>,
    variables: Vec<String>,
    constant_range: (f64, f64),
}

impl FunctionSet {
    pub fn new(
        operators: Vec<Op>,
        variables: Vec<String>,
        constant_range: (f64, f64),
    ) -> Result<Self, ExprError> {
        let mut ops = operators;
        ops.sort();
        ops.dedup();
        if ops.is_empty() {
            return Err(ExprError::InvalidFunctionSet("operator set is empty".into()));
        }
        if !ops.iter().any(|op| op.arity() == 2) {
            return Err(ExprError::InvalidFunctionSet(
                "at least one binary operator is required".into(),
            ));
        }
        if variables.is_empty() {
            return Err(ExprError::InvalidFunctionSet("no variables declared".into()));
        }
        if variables.len() > u16::MAX as usize {
            return Err(ExprError::InvalidFunctionSet("too many variables".into()));
        }
        let (lo, hi) = constant_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ExprError::InvalidFunctionSet(format!(
                "constant range [{lo}, {hi}] must satisfy lo < hi"
            )));
        }
        Ok(Self {
            operators: ops,
            variables,
            constant_range,
        })
    }

    /// The default operator set: everything except `pow`.
    pub fn default_operators() -> Vec<Op> {
        vec![Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sqrt, Op::Exp, Op::Log]
    }

    pub fn operators(&self) -> &[Op] {
        &self.operators
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constant_range(&self) -> (f64, f64) {
        self.constant_range
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

/// Standard variable names: `I1bar`, `I2bar`, `J`, then `eta1..etaN`.
pub fn standard_variables(n_extras: usize) -> Vec<String> {
    let mut vars = vec!["I1bar".to_string(), "I2bar".to_string(), "J".to_string()];
    vars.extend((1..=n_extras).map(|i| format!("eta{i}")));
    vars
}

/// Values for each declared variable, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Bindings(pub Vec<f64>);

impl Bindings {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionTree {
    nodes: Vec<Node>,
}

impl ExpressionTree {
    /// Builds a tree from pre-order nodes, checking well-formedness.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self, ExprError> {
        validate_nodes(&nodes, None)?;
        Ok(Self { nodes })
    }

    /// For operators that splice already valid spans.
    pub(crate) fn from_nodes_unchecked(nodes: Vec<Node>) -> Self {
        debug_assert!(validate_nodes(&nodes, None).is_ok());
        Self { nodes }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            nodes: vec![Node::Const(value)],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Depth of the tree; a single node has depth 0.
    pub fn depth(&self) -> usize {
        let mut stack: SmallVec<[usize; 32]> = SmallVec::new();
        let mut max_depth = 0;
        // Each entry is the number of children still expected by an open operator.
        for node in &self.nodes {
            let depth = stack.len();
            max_depth = max_depth.max(depth);
            match node.arity() {
                0 => {
                    while let Some(top) = stack.last_mut() {
                        *top -= 1;
                        if *top == 0 {
                            stack.pop();
                        } else {
                            break;
                        }
                    }
                }
                k => stack.push(k),
            }
        }
        max_depth
    }

    /// End (exclusive) of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        subtree_end(&self.nodes, start)
    }

    pub fn subtree(&self, start: usize) -> &[Node] {
        &self.nodes[start..self.subtree_end(start)]
    }

    /// Highest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(i) => Some(*i as usize),
                _ => None,
            })
            .max()
    }

    /// Checks structure, constants, and that every variable index is below `n_vars`.
    pub fn validate(&self, n_vars: usize) -> Result<(), ExprError> {
        validate_nodes(&self.nodes, Some(n_vars))
    }

    /// Evaluates the tree under protected arithmetic.
    pub fn evaluate(&self, bindings: &[f64]) -> Result<f64, ExprError> {
        self.check_bound(bindings.len())?;
        Ok(self.evaluate_bound(bindings))
    }

    /// Evaluation without the bound check; panics on an unbound variable.
    #[inline]
    pub fn evaluate_bound(&self, bindings: &[f64]) -> f64 {
        let mut stack: SmallVec<[f64; 32]> = SmallVec::new();
        for node in self.nodes.iter().rev() {
            match *node {
                Node::Const(c) => stack.push(c),
                Node::Var(i) => stack.push(bindings[i as usize]),
                Node::Op(op) => {
                    let v = if op.arity() == 1 {
                        let a = stack.pop().expect("well-formed tree");
                        op.apply1(a)
                    } else {
                        let a = stack.pop().expect("well-formed tree");
                        let b = stack.pop().expect("well-formed tree");
                        op.apply2(a, b)
                    };
                    stack.push(v);
                }
            }
        }
        stack[0]
    }

    pub fn check_bound(&self, n_bound: usize) -> Result<(), ExprError> {
        match self.max_variable() {
            Some(i) if i >= n_bound => Err(ExprError::UnboundVariable {
                index: i,
                bound: n_bound,
            }),
            _ => Ok(()),
        }
    }

    /// Evaluates the tree over a batch of points stored column-wise.
    ///
    /// `columns[v][k]` is the value of variable `v` at point `k`; `out` receives
    /// one value per point. Results are bit-identical to [`Self::evaluate`].
    pub fn evaluate_batch(
        &self,
        columns: &[&[f64]],
        out: &mut [f64],
        scratch: &mut BatchScratch,
    ) -> Result<(), ExprError> {
        self.check_bound(columns.len())?;
        let m = out.len();
        if columns.iter().any(|c| c.len() != m) {
            return Err(ExprError::Malformed("batch columns differ in length".into()));
        }
        let BatchScratch { stack, pool } = scratch;
        stack.clear();
        for node in self.nodes.iter().rev() {
            match *node {
                Node::Const(c) => {
                    let mut buf = pool.pop().unwrap_or_default();
                    buf.clear();
                    buf.resize(m, c);
                    stack.push(buf);
                }
                Node::Var(i) => {
                    let mut buf = pool.pop().unwrap_or_default();
                    buf.clear();
                    buf.extend_from_slice(columns[i as usize]);
                    stack.push(buf);
                }
                Node::Op(op) => {
                    if op.arity() == 1 {
                        let a = stack.last_mut().expect("well-formed tree");
                        for x in a.iter_mut() {
                            *x = op.apply1(*x);
                        }
                    } else {
                        let mut a = stack.pop().expect("well-formed tree");
                        let b = stack.pop().expect("well-formed tree");
                        for (x, y) in a.iter_mut().zip(&b) {
                            *x = op.apply2(*x, *y);
                        }
                        pool.push(b);
                        stack.push(a);
                    }
                }
            }
        }
        let result = stack.pop().expect("well-formed tree");
        out.copy_from_slice(&result);
        pool.push(result);
        Ok(())
    }

    /// Infix text using `variables` for names and minimal parentheses.
    pub fn to_infix(&self, variables: &[String]) -> String {
        let mut out = String::new();
        self.write_infix(0, variables, &mut out);
        out
    }

    /// Parses infix text against the declared variable names.
    pub fn parse(text: &str, variables: &[String]) -> Result<Self, ExprError> {
        Ok(parse::parse(text, variables)?)
    }

    fn write_infix(&self, start: usize, vars: &[String], out: &mut String) -> usize {
        match self.nodes[start] {
            Node::Const(c) => {
                out.push_str(&format_constant(c));
                start + 1
            }
            Node::Var(i) => {
                match vars.get(i as usize) {
                    Some(name) => out.push_str(name),
                    None => out.push_str(&format!("x{i}")),
                }
                start + 1
            }
            Node::Op(op) => match op {
                Op::Add | Op::Sub | Op::Mul | Op::Div => {
                    let prec = precedence(op);
                    let lhs = start + 1;
                    let lhs_paren = self.node_precedence(lhs) < prec;
                    if lhs_paren {
                        out.push('(');
                    }
                    let rhs = self.write_infix(lhs, vars, out);
                    if lhs_paren {
                        out.push(')');
                    }
                    out.push_str(match op {
                        Op::Add => " + ",
                        Op::Sub => " - ",
                        Op::Mul => " * ",
                        _ => " / ",
                    });
                    // Equal precedence on the right needs parentheses to keep
                    // the tree shape under left-associative parsing.
                    let rhs_paren = self.node_precedence(rhs) <= prec;
                    if rhs_paren {
                        out.push('(');
                    }
                    let end = self.write_infix(rhs, vars, out);
                    if rhs_paren {
                        out.push(')');
                    }
                    end
                }
                Op::Sqrt | Op::Exp | Op::Log => {
                    out.push_str(op.name());
                    out.push('(');
                    let end = self.write_infix(start + 1, vars, out);
                    out.push(')');
                    end
                }
                Op::Pow => {
                    out.push_str("pow(");
                    let mid = self.write_infix(start + 1, vars, out);
                    out.push_str(", ");
                    let end = self.write_infix(mid, vars, out);
                    out.push(')');
                    end
                }
            },
        }
    }

    fn node_precedence(&self, at: usize) -> u8 {
        match self.nodes[at] {
            Node::Op(op) => precedence(op),
            _ => ATOM_PRECEDENCE,
        }
    }
}

const ATOM_PRECEDENCE: u8 = 3;

fn precedence(op: Op) -> u8 {
    match op {
        Op::Add | Op::Sub => 1,
        Op::Mul | Op::Div => 2,
        _ => ATOM_PRECEDENCE,
    }
}

/// Shortest text that parses back to exactly `c`.
pub fn format_constant(c: f64) -> String {
    let a = c.abs();
    if a != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{c:e}")
    } else {
        format!("{c}")
    }
}

/// Reusable buffers for [`ExpressionTree::evaluate_batch`].
#[derive(Debug, Default)]
pub struct BatchScratch {
    stack: Vec<Vec<f64>>,
    pool: Vec<Vec<f64>>,
}

pub(crate) fn subtree_end(nodes: &[Node], start: usize) -> usize {
    let mut need = 1usize;
    let mut i = start;
    while need > 0 {
        need = need - 1 + nodes[i].arity();
        i += 1;
    }
    i
}

fn validate_nodes(nodes: &[Node], n_vars: Option<usize>) -> Result<(), ExprError> {
    if nodes.is_empty() {
        return Err(ExprError::Malformed("empty tree".into()));
    }
    let mut need = 1usize;
    for (i, node) in nodes.iter().enumerate() {
        if need == 0 {
            return Err(ExprError::Malformed(format!(
                "trailing nodes after complete tree at position {i}"
            )));
        }
        match *node {
            Node::Const(c) if !c.is_finite() => return Err(ExprError::NonFiniteConstant(c)),
            Node::Var(v) => {
                if let Some(n) = n_vars {
                    if v as usize >= n {
                        return Err(ExprError::UnboundVariable {
                            index: v as usize,
                            bound: n,
                        });
                    }
                }
            }
            _ => {}
        }
        need = need - 1 + node.arity();
    }
    if need != 0 {
        return Err(ExprError::Malformed(format!(
            "incomplete tree: {need} operand(s) missing"
        )));
    }
    Ok(())
}
