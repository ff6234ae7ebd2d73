//! A small arithmetic language for the functions `h0` and `g0` of a
//! perturbed Hamiltonian.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?          right associative
//! atom    := number | variable | "pi" | "sqrt" "(" expr ")" | "(" expr ")"
//! number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//! variable:= "a" digits                 a1 .. a{2n}
//! ```
//!
//! `a_j` is `|eta_j|^2` for `j <= n` and `|xi_{j-n}|^2` for `j > n`. So
//! `-a1^2` parses as `-(a1^2)` and `2^3^2` as `2^(3^2)`.

use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Sqrt(Box<Node>),
}

impl Node {
    fn eval(&self, a: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(j) => a[*j],
            Node::Neg(x) => -x.eval(a),
            Node::Add(x, y) => x.eval(a) + y.eval(a),
            Node::Sub(x, y) => x.eval(a) - y.eval(a),
            Node::Mul(x, y) => x.eval(a) * y.eval(a),
            Node::Div(x, y) => x.eval(a) / y.eval(a),
            Node::Pow(x, y) => x.eval(a).powf(y.eval(a)),
            Node::Sqrt(x) => x.eval(a).sqrt(),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Num(_) => None,
            Node::Var(j) => Some(*j),
            Node::Neg(x) | Node::Sqrt(x) => x.max_var(),
            Node::Add(x, y) | Node::Sub(x, y) | Node::Mul(x, y) | Node::Div(x, y) | Node::Pow(x, y) => {
                x.max_var().max(y.max_var())
            }
        }
    }
}

/// A parsed expression in the variables `a1 .. a{arity}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    arity: usize,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str, arity: usize) -> Result<Expr> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!(
                "unexpected token {:?} in {source:?}",
                p.tokens[p.pos]
            )));
        }
        if let Some(j) = root.max_var() {
            if j >= arity {
                return Err(Error::Expression(format!(
                    "variable a{} out of range (expected a1..a{arity})",
                    j + 1
                )));
            }
        }
        Ok(Expr {
            source: source.to_string(),
            arity,
            root,
        })
    }

    pub fn constant(value: f64) -> Expr {
        Expr {
            source: format!("{value:?}"),
            arity: 0,
            root: Node::Num(value),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates at `a`; panics if `a` is shorter than the largest variable
    /// index used.
    pub fn eval(&self, a: &[f64]) -> f64 {
        self.root.eval(a)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var(usize),
    Pi,
    Sqrt,
    Op(char),
    Open,
    Close,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number {text:?}")))?;
            out.push(Token::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "pi" => out.push(Token::Pi),
                "sqrt" => out.push(Token::Sqrt),
                w if w.starts_with('a') && w.len() > 1 && w[1..].chars().all(|c| c.is_ascii_digit()) => {
                    let j: usize = w[1..]
                        .parse()
                        .map_err(|_| Error::Expression(format!("bad variable {w:?}")))?;
                    if j == 0 {
                        return Err(Error::Expression("variables start at a1".into()));
                    }
                    out.push(Token::Var(j - 1));
                }
                _ => return Err(Error::Expression(format!("unknown identifier {word:?}"))),
            }
        } else if "+-*/^".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else if ch == '(' {
            out.push(Token::Open);
            i += 1;
        } else if ch == ')' {
            out.push(Token::Close);
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, ops: &str) -> Option<char> {
        match self.peek() {
            Some(Token::Op(c)) if ops.contains(*c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Expression(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op("+-") {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op("*/") {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_op("-").is_some() {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat_op("^").is_some() {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Expression("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::Var(j) => Ok(Node::Var(j)),
            Token::Pi => Ok(Node::Num(std::f64::consts::PI)),
            Token::Sqrt => {
                self.expect(Token::Open)?;
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                Ok(Node::Sqrt(Box::new(inner)))
            }
            Token::Open => {
                let inner = self.expr()?;
                self.expect(Token::Close)?;
                Ok(inner)
            }
            other => Err(Error::Expression(format!("unexpected token {other:?}"))),
        }
    }
}
