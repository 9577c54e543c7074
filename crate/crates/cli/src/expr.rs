//! Target and growth-function expressions over `u1 .. um`.
//!
//! Grammar, loosest first:
//!
//! ```text
//! top     = '(' expr (',' expr)+ ')' | expr
//! expr    = term (('+' | '-') term)*
//! term    = unary (('*' | '/') unary)*
//! unary   = '-' unary | power
//! power   = atom ('^' unary)?
//! atom    = number | 'pi' | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
    Ln,
    Norm,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            "norm" => Func::Norm,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Norm => "norm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

#[derive(Debug, Clone)]
pub enum Node {
    Num(f64),
    Pi,
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Scalar expression with the byte range it was parsed from.
#[derive(Debug, Clone)]
pub struct Expr {
    pub node: Node,
    pub span: Span,
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.node, &other.node) {
            (Node::Num(a), Node::Num(b)) => a.to_bits() == b.to_bits(),
            (Node::Pi, Node::Pi) => true,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Neg(a), Node::Neg(b)) => a == b,
            (Node::Bin(o1, l1, r1), Node::Bin(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Node::Call(f1, a1), Node::Call(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at bytes {}..{}", span.start, span.end)]
pub struct EvalError {
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    /// Next token and its span.
    fn next(&mut self) -> Result<(Tok, Span), SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else { return Ok((Tok::End, Span { start, end: start })) };
        let tok = if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let len = number_len(rest);
            let text = &rest[..len];
            self.pos += len;
            Tok::Num(text.parse().map_err(|_| SyntaxError { offset: start, expected: vec!["number"], found: format!("`{text}`") })?)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let len = rest.find(|d: char| !(d.is_ascii_alphanumeric() || d == '_')).unwrap_or(rest.len());
            self.pos += len;
            Tok::Ident(rest[..len].to_string())
        } else if "+-*/^(),".contains(c) {
            self.pos += 1;
            Tok::Sym(c)
        } else {
            return Err(SyntaxError { offset: start, expected: vec!["expression"], found: format!("`{c}`") });
        };
        Ok((tok, Span { start, end: self.pos }))
    }
}

fn number_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    span: Span,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, SyntaxError> {
        let mut lex = Lexer { src, pos: 0 };
        let (tok, span) = lex.next()?;
        Ok(Parser { lex, tok, span })
    }

    fn bump(&mut self) -> Result<(Tok, Span), SyntaxError> {
        let (tok, span) = self.lex.next()?;
        Ok((std::mem::replace(&mut self.tok, tok), std::mem::replace(&mut self.span, span)))
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, SyntaxError> {
        Err(SyntaxError { offset: self.span.start, expected, found: self.tok.to_string() })
    }

    fn expect(&mut self, c: char, expected: Vec<&'static str>) -> Result<Span, SyntaxError> {
        if self.tok == Tok::Sym(c) {
            Ok(self.bump()?.1)
        } else {
            self.fail(expected)
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.tok == Tok::Sym('-') {
            let (_, span) = self.bump()?;
            let inner = self.unary()?;
            let span = Span { start: span.start, end: inner.span.end };
            return Ok(Expr { node: Node::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.tok == Tok::Sym('^') {
            self.bump()?;
            let exp = self.unary()?;
            return Ok(binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        const EXPECTED: [&str; 5] = ["number", "variable", "function", "`(`", "`-`"];
        match self.tok.clone() {
            Tok::Num(x) => {
                let (_, span) = self.bump()?;
                Ok(Expr { node: Node::Num(x), span })
            }
            Tok::Sym('(') => {
                let (_, open) = self.bump()?;
                let mut inner = self.expr()?;
                let close = self.expect(')', vec!["`)`", "operator"])?;
                inner.span = Span { start: open.start, end: close.end };
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, span) = self.bump()?;
                if name == "pi" {
                    return Ok(Expr { node: Node::Pi, span });
                }
                if let Some(idx) = variable_index(&name) {
                    return Ok(Expr { node: Node::Var(idx), span });
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(SyntaxError { offset: span.start, expected: EXPECTED.to_vec(), found: format!("`{name}`") });
                };
                self.expect('(', vec!["`(`"])?;
                let mut args = vec![self.expr()?];
                while self.tok == Tok::Sym(',') {
                    if func != Func::Norm {
                        return self.fail(vec!["`)`", "operator"]);
                    }
                    self.bump()?;
                    args.push(self.expr()?);
                }
                let close = self.expect(')', if func == Func::Norm { vec!["`)`", "`,`", "operator"] } else { vec!["`)`", "operator"] })?;
                Ok(Expr { node: Node::Call(func, args), span: Span { start: span.start, end: close.end } })
            }
            _ => self.fail(EXPECTED.to_vec()),
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('u')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().map(|i| i - 1)
}

fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
    let span = Span { start: l.span.start, end: r.span.end };
    Expr { node: Node::Bin(op, Box::new(l), Box::new(r)), span }
}

/// A scalar expression or a tuple of them.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorExpr {
    pub components: Vec<Expr>,
}

pub fn parse_expression(text: &str) -> Result<VectorExpr, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut components = Vec::new();
    if p.tok == Tok::Sym('(') {
        // a parenthesised scalar or a tuple; decide after the first entry
        let (_, open) = p.bump()?;
        let first = p.expr()?;
        if p.tok == Tok::Sym(',') {
            components.push(first);
            while p.tok == Tok::Sym(',') {
                p.bump()?;
                components.push(p.expr()?);
            }
            p.expect(')', vec!["`)`", "`,`", "operator"])?;
        } else {
            let close = p.expect(')', vec!["`)`", "`,`", "operator"])?;
            let mut e = first;
            e.span = Span { start: open.start, end: close.end };
            // the parenthesised scalar may continue, e.g. "(u1) * 2"
            let e = continue_expr(&mut p, e)?;
            components.push(e);
        }
    } else {
        components.push(p.expr()?);
    }
    if p.tok != Tok::End {
        return p.fail(vec!["operator", "end of input"]);
    }
    Ok(VectorExpr { components })
}

/// Resumes `expr` parsing with an already parsed leading atom.
fn continue_expr(p: &mut Parser<'_>, first: Expr) -> Result<Expr, SyntaxError> {
    let mut lhs = if p.tok == Tok::Sym('^') {
        p.bump()?;
        let exp = p.unary()?;
        binary(BinOp::Pow, first, exp)
    } else {
        first
    };
    loop {
        let op = match p.tok {
            Tok::Sym('*') => BinOp::Mul,
            Tok::Sym('/') => BinOp::Div,
            _ => break,
        };
        p.bump()?;
        let rhs = p.unary()?;
        lhs = binary(op, lhs, rhs);
    }
    loop {
        let op = match p.tok {
            Tok::Sym('+') => BinOp::Add,
            Tok::Sym('-') => BinOp::Sub,
            _ => return Ok(lhs),
        };
        p.bump()?;
        let rhs = p.term()?;
        lhs = binary(op, lhs, rhs);
    }
}

/// Parses a single scalar expression.
pub fn parse_scalar(text: &str) -> Result<Expr, SyntaxError> {
    let v = parse_expression(text)?;
    if v.components.len() != 1 {
        return Err(SyntaxError { offset: 0, expected: vec!["scalar expression"], found: format!("{}-tuple", v.components.len()) });
    }
    Ok(v.components.into_iter().next().expect("one component"))
}

impl Expr {
    fn synth(node: Node) -> Expr {
        Expr { node, span: Span { start: 0, end: 0 } }
    }

    fn precedence(&self) -> u8 {
        match &self.node {
            Node::Bin(op, ..) => op.precedence(),
            Node::Neg(_) => NEG_PRECEDENCE,
            Node::Num(x) if *x < 0.0 => NEG_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match &self.node {
            Node::Num(_) | Node::Pi => 0,
            Node::Var(i) => i + 1,
            Node::Neg(a) => a.arity(),
            Node::Bin(_, a, b) => a.arity().max(b.arity()),
            Node::Call(_, args) => args.iter().map(Expr::arity).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64, EvalError> {
        let err = |message: String| EvalError { span: self.span, message };
        let v = match &self.node {
            Node::Num(x) => *x,
            Node::Pi => std::f64::consts::PI,
            Node::Var(i) => *u.get(*i).ok_or_else(|| err(format!("variable u{} is not defined in dimension {}", i + 1, u.len())))?,
            Node::Neg(a) => -a.eval(u)?,
            Node::Bin(op, a, b) => {
                let (x, y) = (a.eval(u)?, b.eval(u)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div if y == 0.0 => return Err(err("division by zero".into())),
                    BinOp::Div => x / y,
                    BinOp::Pow => {
                        let r = x.powf(y);
                        if r.is_nan() {
                            return Err(err(format!("{x}^{y} is undefined")));
                        }
                        r
                    }
                }
            }
            Node::Call(f, args) => {
                let vals = args.iter().map(|a| a.eval(u)).collect::<Result<Vec<_>, _>>()?;
                let x = vals[0];
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Abs => x.abs(),
                    Func::Sqrt if x < 0.0 => return Err(err(format!("sqrt of negative value {x}"))),
                    Func::Sqrt => x.sqrt(),
                    Func::Ln if x <= 0.0 => return Err(err(format!("ln of non-positive value {x}"))),
                    Func::Ln => x.ln(),
                    Func::Norm => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
                }
            }
        };
        if !v.is_finite() {
            return Err(err(format!("value {v} is not finite")));
        }
        Ok(v)
    }

    /// Symbolic partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Expr {
        use Node::*;
        let num = |x: f64| Expr::synth(Num(x));
        match &self.node {
            Num(_) | Pi => num(0.0),
            Var(j) => num(if *j == i { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(i)),
            Bin(op, a, b) => {
                let (da, db) = (a.derivative(i), b.derivative(i));
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    BinOp::Div => div(sub(mul(da, (**b).clone()), mul((**a).clone(), db)), pow((**b).clone(), num(2.0))),
                    BinOp::Pow if b.arity() == 0 => {
                        let lowered = match b.node {
                            Num(k) => num(k - 1.0),
                            _ => sub((**b).clone(), num(1.0)),
                        };
                        mul(mul((**b).clone(), pow((**a).clone(), lowered)), da)
                    }
                    BinOp::Pow => {
                        let ln_a = Expr::synth(Call(Func::Ln, vec![(**a).clone()]));
                        mul(self.clone(), add(mul(db, ln_a), div(mul((**b).clone(), da), (**a).clone())))
                    }
                }
            }
            Call(f, args) => {
                let a = &args[0];
                let da = a.derivative(i);
                match f {
                    Func::Exp => mul(self.clone(), da),
                    Func::Sin => mul(Expr::synth(Call(Func::Cos, vec![a.clone()])), da),
                    Func::Cos => neg(mul(Expr::synth(Call(Func::Sin, vec![a.clone()])), da)),
                    Func::Abs => mul(div(a.clone(), self.clone()), da),
                    Func::Sqrt => div(da, mul(num(2.0), self.clone())),
                    Func::Ln => div(da, a.clone()),
                    Func::Norm => {
                        let s = args.iter().map(|x| mul(x.clone(), x.derivative(i))).reduce(add).expect("at least one argument");
                        div(s, self.clone())
                    }
                }
            }
        }
    }
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e.node, Node::Num(x) if x == v)
}

fn neg(a: Expr) -> Expr {
    match a.node {
        Node::Num(x) => Expr::synth(Node::Num(-x)),
        Node::Neg(inner) => *inner,
        _ => Expr::synth(Node::Neg(Box::new(a))),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        return b;
    }
    if is_num(&b, 0.0) {
        return a;
    }
    Expr::synth(Node::Bin(BinOp::Add, Box::new(a), Box::new(b)))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 0.0) {
        return a;
    }
    if is_num(&a, 0.0) {
        return neg(b);
    }
    Expr::synth(Node::Bin(BinOp::Sub, Box::new(a), Box::new(b)))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) || is_num(&b, 0.0) {
        return Expr::synth(Node::Num(0.0));
    }
    if is_num(&a, 1.0) {
        return b;
    }
    if is_num(&b, 1.0) {
        return a;
    }
    if let (Node::Num(x), Node::Num(y)) = (&a.node, &b.node) {
        return Expr::synth(Node::Num(x * y));
    }
    Expr::synth(Node::Bin(BinOp::Mul, Box::new(a), Box::new(b)))
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        return a;
    }
    if is_num(&b, 1.0) {
        return a;
    }
    Expr::synth(Node::Bin(BinOp::Div, Box::new(a), Box::new(b)))
}

fn pow(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 1.0) {
        return a;
    }
    if is_num(&b, 0.0) {
        return Expr::synth(Node::Num(1.0));
    }
    Expr::synth(Node::Bin(BinOp::Pow, Box::new(a), Box::new(b)))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren { write!(f, "({e})") } else { write!(f, "{e}") }
        };
        match &self.node {
            Node::Num(x) if *x < 0.0 => write!(f, "-{}", -x),
            Node::Num(x) => write!(f, "{x}"),
            Node::Pi => f.write_str("pi"),
            Node::Var(i) => write!(f, "u{}", i + 1),
            Node::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < NEG_PRECEDENCE)
            }
            Node::Bin(op, a, b) => {
                let p = op.precedence();
                let (lp, rp) = if *op == BinOp::Pow {
                    (a.precedence() <= p, b.precedence() < NEG_PRECEDENCE)
                } else {
                    (a.precedence() < p, b.precedence() <= p)
                };
                wrap(f, a, lp)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, b, rp)
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for VectorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.len() == 1 {
            return write!(f, "{}", self.components[0]);
        }
        f.write_str("(")?;
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl VectorExpr {
    pub fn codim(&self) -> usize {
        self.components.len()
    }

    pub fn arity(&self) -> usize {
        self.components.iter().map(Expr::arity).max().unwrap_or(0)
    }

    pub fn eval(&self, u: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval(u)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval1(text: &str, u: &[f64]) -> f64 {
        parse_scalar(text).unwrap().eval(u).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(eval1("u1^2 + 1", &[2.0]), 5.0);
        let v = parse_expression("(u1, exp(-u1))").unwrap();
        assert_eq!(v.codim(), 2);
        assert_eq!(v.eval(&[0.0]).unwrap(), vec![0.0, 1.0]);
        let e = parse_expression("u1 +").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.expected.contains(&"number") && e.expected.contains(&"variable"));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval1("2^3^2", &[]), 512.0);
        assert_eq!(eval1("-2^2", &[]), -4.0);
        assert_eq!(eval1("2^-1", &[]), 0.5);
        assert_eq!(eval1("1 - 2 - 3", &[]), -4.0);
        assert_eq!(eval1("8 / 4 / 2", &[]), 1.0);
        assert_eq!(eval1("1 + 2 * 3", &[]), 7.0);
        assert_eq!(eval1("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(eval1("--u1", &[3.0]), 3.0);
        assert_eq!(eval1("norm(3, u2)", &[0.0, 4.0]), 5.0);
        assert!((eval1("2 * pi", &[]) - std::f64::consts::TAU).abs() < 1e-15);
        assert_eq!(eval1("1.5e2 + .5", &[]), 150.5);
    }

    #[test]
    fn located_errors() {
        let e = parse_expression("sin(u1").unwrap_err();
        assert_eq!(e.offset, 6);
        assert_eq!(e.found, "end of input");
        let e = parse_expression("u1 $ 2").unwrap_err();
        assert_eq!(e.offset, 3);
        let e = parse_expression("foo(1)").unwrap_err();
        assert_eq!((e.offset, e.found.as_str()), (0, "`foo`"));
        let e = parse_expression("u0 + 1").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse_expression("(u1, u2").unwrap_err();
        assert_eq!(e.offset, 7);
        assert!(e.expected.contains(&"`)`"));
        let e = parse_expression("1 2").unwrap_err();
        assert_eq!(e.offset, 2);

        let ex = parse_scalar("1 + sqrt(u1 - 2)").unwrap();
        let err = ex.eval(&[1.0]).unwrap_err();
        assert_eq!(err.span, Span { start: 4, end: 16 });
        assert!(err.message.contains("sqrt"));
        assert_eq!(parse_scalar("u1 / (u1 - 1)").unwrap().eval(&[1.0]).unwrap_err().span.start, 0);
        assert!(parse_scalar("u3").unwrap().eval(&[1.0]).is_err());
    }

    #[test]
    fn display_round_trip_examples() {
        for text in ["u1^2 + 1", "-(u1 + u2) * 3", "(u1 - u2) - (u1 - 1)", "2^3^2", "(2^3)^2", "(-u1)^2", "-u1^2", "u1 / (u2 * 3)", "(u1, exp(-u1))", "norm(u1, u2 - 1)", "(u1 + 1) * 2"] {
            let e = parse_expression(text).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expression(&printed).unwrap(), e, "{text} -> {printed}");
        }
        assert_eq!(parse_expression("u1^2+1").unwrap().to_string(), "u1 ^ 2 + 1");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = ["1 + u1^2 + u2^2", "exp(u1^2 / 2) * cos(u2)", "sqrt(1 + u1^2) + abs(u2 - 3)", "u1^u2", "norm(u1, u2, 1) / (2 + sin(u1))", "ln(2 + u1) - 1 / u2"];
        let pts = [[0.3, 0.7], [1.2, 1.9], [0.9, 1.1]];
        for text in cases {
            let e = parse_scalar(text).unwrap();
            for p in pts {
                for i in 0..2 {
                    let d = e.derivative(i).eval(&p).unwrap();
                    let h = 1e-6;
                    let (mut a, mut b) = (p, p);
                    a[i] += h;
                    b[i] -= h;
                    let fd = (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h);
                    assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "{text} d/du{} at {p:?}: {d} vs {fd}", i + 1);
                }
            }
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|k| Expr::synth(Node::Num(k as f64 / 8.0))),
            (0usize..3).prop_map(|i| Expr::synth(Node::Var(i))),
            Just(Expr::synth(Node::Pi)),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
            let func = prop_oneof![Just(Func::Exp), Just(Func::Sin), Just(Func::Cos), Just(Func::Abs), Just(Func::Sqrt), Just(Func::Ln)];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::synth(Node::Neg(Box::new(e)))),
                (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::synth(Node::Bin(o, Box::new(a), Box::new(b)))),
                (func, inner.clone()).prop_map(|(f, a)| Expr::synth(Node::Call(f, vec![a]))),
                prop::collection::vec(inner, 1..3).prop_map(|args| Expr::synth(Node::Call(Func::Norm, args))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_is_identity(e in arb_expr()) {
            let printed = e.to_string();
            let back = parse_scalar(&printed).unwrap();
            prop_assert_eq!(&back, &e, "printed as {}", printed);
            let spaced = printed.replace(' ', "   ");
            prop_assert_eq!(parse_scalar(&spaced).unwrap(), e);
        }

        #[test]
        fn tuples_round_trip(a in arb_expr(), b in arb_expr()) {
            let v = VectorExpr { components: vec![a, b] };
            prop_assert_eq!(parse_expression(&v.to_string()).unwrap(), v);
        }
    }
}
