//! Recursive-descent parser for the infix expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! A minus directly in front of a numeric literal folds into a negative
//! constant; any other unary minus becomes `0 - x`.

use thiserror::Error;

use super::{ExpressionTree, Node, Op};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        let single = |t| Ok((start, t));
        match c {
            b'+' => {
                self.pos += 1;
                single(Tok::Plus)
            }
            b'-' => {
                self.pos += 1;
                single(Tok::Minus)
            }
            b'*' => {
                self.pos += 1;
                single(Tok::Star)
            }
            b'/' => {
                self.pos += 1;
                single(Tok::Slash)
            }
            b'(' => {
                self.pos += 1;
                single(Tok::LParen)
            }
            b')' => {
                self.pos += 1;
                single(Tok::RParen)
            }
            b',' => {
                self.pos += 1;
                single(Tok::Comma)
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                    end += 1;
                }
                if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                    let mut e = end + 1;
                    if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                        e += 1;
                    }
                    if e < bytes.len() && bytes[e].is_ascii_digit() {
                        while e < bytes.len() && bytes[e].is_ascii_digit() {
                            e += 1;
                        }
                        end = e;
                    }
                }
                let text = &self.src[start..end];
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("invalid number `{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: format!("number `{text}` is out of range"),
                    });
                }
                self.pos = end;
                Ok((start, Tok::Num(value)))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                self.pos = end;
                Ok((start, Tok::Ident(self.src[start..end].to_string())))
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (offset, tok) = self.lexer.next()?;
        self.offset = offset;
        self.tok = tok;
        Ok(())
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.bump()
        } else {
            self.error(format!("expected {what}"))
        }
    }

    // Each production returns its subtree in pre-order.
    fn expr(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => Op::Mul,
                Tok::Slash => Op::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Vec<Node>, ParseError> {
        if self.tok != Tok::Minus {
            return self.primary();
        }
        self.bump()?;
        if let Tok::Num(v) = self.tok {
            self.bump()?;
            return Ok(vec![Node::Const(-v)]);
        }
        let inner = self.unary()?;
        Ok(join(Op::Sub, vec![Node::Const(0.0)], inner))
    }

    fn primary(&mut self) -> Result<Vec<Node>, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(vec![Node::Const(v)])
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.offset;
                self.bump()?;
                if self.tok == Tok::LParen {
                    return self.call(&name, at);
                }
                match self.variables.iter().position(|v| *v == name) {
                    Some(i) => Ok(vec![Node::Var(i as u16)]),
                    None => Err(ParseError::UnknownIdentifier { offset: at, name }),
                }
            }
            Tok::End => self.error("unexpected end of input"),
            other => self.error(format!("unexpected token {other:?}")),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Vec<Node>, ParseError> {
        let op = match name {
            "sqrt" => Op::Sqrt,
            "exp" => Op::Exp,
            "log" => Op::Log,
            "pow" => Op::Pow,
            _ => {
                return Err(ParseError::UnknownIdentifier {
                    offset: at,
                    name: name.to_string(),
                })
            }
        };
        self.bump()?; // '('
        let mut nodes = vec![Node::Op(op)];
        for i in 0..op.arity() {
            if i > 0 {
                self.expect(Tok::Comma, "`,`")?;
            }
            nodes.extend(self.expr()?);
        }
        if self.tok == Tok::Comma {
            return self.error(format!("`{name}` takes {} argument(s)", op.arity()));
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(nodes)
    }
}

fn join(op: Op, lhs: Vec<Node>, rhs: Vec<Node>) -> Vec<Node> {
    let mut nodes = Vec::with_capacity(1 + lhs.len() + rhs.len());
    nodes.push(Node::Op(op));
    nodes.extend(lhs);
    nodes.extend(rhs);
    nodes
}

pub(super) fn parse(text: &str, variables: &[String]) -> Result<ExpressionTree, ParseError> {
    let mut parser = Parser {
        lexer: Lexer { src: text, pos: 0 },
        tok: Tok::End,
        offset: 0,
        variables,
    };
    parser.bump()?;
    let nodes = parser.expr()?;
    if parser.tok != Tok::End {
        return parser.error("unexpected trailing input");
    }
    Ok(ExpressionTree::from_nodes_unchecked(nodes))
}
