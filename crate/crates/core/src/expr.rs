//! Closed-form scalar expressions over a four-coordinate chart.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          // right-associative
//! atom    := number | name | name '(' args ')' | '(' sum ')'
//! ```
//!
//! Expressions are only ever evaluated on [`Jet4`] seeds, so the same code
//! path yields values and exact derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::jet::{Jet4, JetError, NVARS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
    },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("function `{name}` takes {expected} argument(s), got {got} (offset {offset})")]
    Arity {
        name: &'static str,
        expected: usize,
        got: usize,
        offset: usize,
    },
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("name `{0}` is declared more than once")]
    DuplicateName(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("{source} in `{expr}`")]
    Domain {
        expr: String,
        #[source]
        source: JetError,
    },
    #[error("coordinate seeds disagree on base point or degree")]
    SeedMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 4,
        }
    }
}

const UNARY_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Pow,
    Neg,
}

impl Function {
    pub const ALL: [Function; 11] = [
        Function::Exp,
        Function::Log,
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Sinh,
        Function::Cosh,
        Function::Tanh,
        Function::Sqrt,
        Function::Pow,
        Function::Neg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Sinh => "sinh",
            Function::Cosh => "cosh",
            Function::Tanh => "tanh",
            Function::Sqrt => "sqrt",
            Function::Pow => "pow",
            Function::Neg => "neg",
        }
    }

    pub fn arity(self) -> usize {
        if self == Function::Pow {
            2
        } else {
            1
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Coord(usize),
    Param(String),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Function, Vec<Expr>),
}

/// The coordinate names of a four-dimensional chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    names: [String; NVARS],
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ParseError> {
        if names.len() != NVARS {
            return Err(ParseError::InvalidName(format!(
                "chart needs {NVARS} coordinates, got {}",
                names.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            if !is_valid_name(n) {
                return Err(ParseError::InvalidName(n.to_string()));
            }
            if !seen.insert(n) {
                return Err(ParseError::DuplicateName(n.to_string()));
            }
        }
        Ok(Self {
            names: std::array::from_fn(|i| names[i].as_ref().to_string()),
        })
    }

    pub fn names(&self) -> &[String; NVARS] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A parsed expression together with the chart it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    root: Expr,
    chart: Chart,
}

impl ScalarExpr {
    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Wraps an already-built tree. Coordinate indices must be `< 4`.
    pub fn from_root(root: Expr, chart: Chart) -> Self {
        Self { root, chart }
    }

    /// Names of the parameters the expression refers to.
    pub fn parameters(&self) -> BTreeSet<String> {
        fn walk(e: &Expr, out: &mut BTreeSet<String>) {
            match e {
                Expr::Param(p) => {
                    out.insert(p.clone());
                }
                Expr::Neg(a) => walk(a, out),
                Expr::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
                Expr::Const(_) | Expr::Coord(_) => {}
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.root, &mut out);
        out
    }

    /// Evaluates on coordinate seeds. Every seed must share base point and
    /// degree.
    pub fn eval_on_jets(
        &self,
        coords: &[Jet4; NVARS],
        bindings: &BTreeMap<String, f64>,
    ) -> Result<Jet4, EvalError> {
        let (base, degree) = (coords[0].base(), coords[0].degree());
        if coords.iter().any(|c| c.base() != base || c.degree() != degree) {
            return Err(EvalError::SeedMismatch);
        }
        Evaluator {
            chart: &self.chart,
            coords,
            bindings,
        }
        .eval(&self.root)
    }

    /// Plain value at a point (a degree-0 jet evaluation).
    pub fn eval_at(&self, point: [f64; NVARS], bindings: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
        let seeds = Jet4::seeds(point, 0).expect("degree 0 is valid");
        Ok(self.eval_on_jets(&seeds, bindings)?.value())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, &self.root, &self.chart)
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Neg(_) => UNARY_PRECEDENCE,
        _ => ATOM_PRECEDENCE,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, chart: &Chart, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "(")?;
        write_expr(f, e, chart)?;
        write!(f, ")")
    } else {
        write_expr(f, e, chart)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, chart: &Chart) -> fmt::Result {
    match e {
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => write!(f, "({c})"),
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Coord(i) => write!(f, "{}", chart.names[*i]),
        Expr::Param(p) => write!(f, "{p}"),
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_operand(f, a, chart, precedence(a) < UNARY_PRECEDENCE)
        }
        Expr::Binary(op, a, b) => {
            let p = op.precedence();
            let (left_parens, right_parens) = if *op == BinaryOp::Pow {
                (precedence(a) <= p, precedence(b) < UNARY_PRECEDENCE)
            } else {
                (precedence(a) < p, precedence(b) <= p)
            };
            write_operand(f, a, chart, left_parens)?;
            write!(f, " {} ", op.symbol())?;
            write_operand(f, b, chart, right_parens)
        }
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, a, chart)?;
            }
            write!(f, ")")
        }
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value = text
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or(ParseError::Syntax {
                        offset: start,
                        expected: vec!["finite number"],
                    })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: EXPECT_OPERAND.to_vec(),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

const EXPECT_OPERAND: [&str; 4] = ["number", "name", "'('", "'-'"];

// ---------------------------------------------------------------------------
// parser

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'a Chart,
    params: &'a BTreeSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &'static str, alternatives: &[&'static str]) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let mut expected = vec![what];
            expected.extend_from_slice(alternatives);
            Err(ParseError::Syntax {
                offset: self.offset(),
                expected,
            })
        }
    }

    fn infix(&self) -> Option<BinaryOp> {
        match self.peek() {
            Tok::Plus => Some(BinaryOp::Add),
            Tok::Minus => Some(BinaryOp::Sub),
            Tok::Star => Some(BinaryOp::Mul),
            Tok::Slash => Some(BinaryOp::Div),
            Tok::Caret => Some(BinaryOp::Pow),
            _ => None,
        }
    }

    /// Precedence climbing: parses operators binding at least as tightly as
    /// `min`.
    fn expr(&mut self, min: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some(op) = self.infix() {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = if op == BinaryOp::Pow {
                // right operand of '^' may itself carry a unary minus
                self.expr(UNARY_PRECEDENCE)?
            } else {
                self.expr(p + 1)?
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
            if op == BinaryOp::Pow {
                // right recursion already consumed any chained '^'
                continue;
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.expr(UNARY_PRECEDENCE)?))),
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "')'", &["operator"])?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.call(name, offset)
                } else if let Some(i) = self.chart.index_of(&name) {
                    Ok(Expr::Coord(i))
                } else if self.params.contains(&name) {
                    Ok(Expr::Param(name))
                } else {
                    Err(ParseError::UnknownSymbol { name, offset })
                }
            }
            _ => Err(ParseError::Syntax {
                offset,
                expected: EXPECT_OPERAND.to_vec(),
            }),
        }
    }

    fn call(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        let func = Function::from_name(&name).ok_or(ParseError::UnknownFunction {
            name: name.clone(),
            offset,
        })?;
        self.bump(); // '('
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr(0)?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        }
        self.expect(Tok::RParen, "')'", &["','", "operator"])?;
        if args.len() != func.arity() {
            return Err(ParseError::Arity {
                name: func.name(),
                expected: func.arity(),
                got: args.len(),
                offset,
            });
        }
        Ok(Expr::Call(func, args))
    }
}

/// Parses `source` against a chart and a set of parameter names.
pub fn parse(source: &str, chart: &Chart, params: &BTreeSet<String>) -> Result<ScalarExpr, ParseError> {
    for p in params {
        if !is_valid_name(p) {
            return Err(ParseError::InvalidName(p.clone()));
        }
        if chart.index_of(p).is_some() {
            return Err(ParseError::DuplicateName(p.clone()));
        }
    }
    let mut parser = Parser {
        toks: lex(source)?,
        pos: 0,
        chart,
        params,
    };
    let root = parser.expr(0)?;
    if *parser.peek() != Tok::End {
        return Err(ParseError::Syntax {
            offset: parser.offset(),
            expected: vec!["operator", "end of input"],
        });
    }
    Ok(ScalarExpr {
        root,
        chart: chart.clone(),
    })
}

// ---------------------------------------------------------------------------
// evaluation

struct Evaluator<'a> {
    chart: &'a Chart,
    coords: &'a [Jet4; NVARS],
    bindings: &'a BTreeMap<String, f64>,
}

/// Largest integer exponent lowered to repeated multiplication.
const MAX_INTEGER_POWER: f64 = 64.0;

impl Evaluator<'_> {
    fn domain(&self, e: &Expr, source: JetError) -> EvalError {
        EvalError::Domain {
            expr: ScalarExpr::from_root(e.clone(), self.chart.clone()).to_string(),
            source,
        }
    }

    fn eval(&self, e: &Expr) -> Result<Jet4, EvalError> {
        let like = &self.coords[0];
        match e {
            Expr::Const(c) => Ok(like.constant_like(*c)),
            Expr::Coord(i) => Ok(self.coords[*i]),
            Expr::Param(p) => self
                .bindings
                .get(p)
                .map(|v| like.constant_like(*v))
                .ok_or_else(|| EvalError::UnboundParameter(p.clone())),
            Expr::Neg(a) => Ok(-self.eval(a)?),
            Expr::Binary(op, a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinaryOp::Add => Ok(x + y),
                    BinaryOp::Sub => Ok(x - y),
                    BinaryOp::Mul => Ok(x * y),
                    BinaryOp::Div => x.try_div(&y).map_err(|err| self.domain(e, err)),
                    BinaryOp::Pow => self.pow(e, &x, &y),
                }
            }
            Expr::Call(func, args) => {
                let x = self.eval(&args[0])?;
                let wrap = |r: Result<Jet4, JetError>| r.map_err(|err| self.domain(e, err));
                match func {
                    Function::Exp => Ok(x.exp()),
                    Function::Log => wrap(x.ln()),
                    Function::Sin => Ok(x.sin()),
                    Function::Cos => Ok(x.cos()),
                    Function::Tan => wrap(x.tan()),
                    Function::Sinh => Ok(x.sinh()),
                    Function::Cosh => Ok(x.cosh()),
                    Function::Tanh => Ok(x.tanh()),
                    Function::Sqrt => wrap(x.sqrt()),
                    Function::Neg => Ok(-x),
                    Function::Pow => {
                        let y = self.eval(&args[1])?;
                        self.pow(e, &x, &y)
                    }
                }
            }
        }
    }

    fn pow(&self, e: &Expr, base: &Jet4, exponent: &Jet4) -> Result<Jet4, EvalError> {
        let n = exponent.value();
        if exponent.is_constant() && n.fract() == 0.0 && n.abs() <= MAX_INTEGER_POWER {
            return base.powi(n as i32).map_err(|err| self.domain(e, err));
        }
        if !(base.value() > 0.0) {
            return Err(self.domain(
                e,
                JetError::Domain {
                    function: "pow",
                    value: base.value(),
                },
            ));
        }
        let log = base.ln().map_err(|err| self.domain(e, err))?;
        Ok((exponent * &log).exp())
    }
}
