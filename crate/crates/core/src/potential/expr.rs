//! Arithmetic expressions in one variable `x`.
//!
//! Grammar (precedence low to high):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | abs
//! ```
//!
//! `×`, `÷` and `−` are accepted as aliases of `*`, `/` and `-`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
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

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    /// Parses a standalone expression (line 1, column 1).
    pub fn parse(src: &str) -> Result<Expr> {
        parse_at(src, 1, 1)
    }
}

// Integer exponents go through powi so that (x-1)^2 is exact at x = 1.
fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

/// Fully parenthesized rendering that parses back to the same tree values.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "({v:?})"),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    column: usize,
}

fn lex(src: &str, line: usize, column0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = column0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || c == '.' {
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
            let v: f64 = text
                .parse()
                .map_err(|_| Error::parse(line, column, format!("malformed number `{text}`")))?;
            Tok::Num(v)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' => Tok::Op('+'),
                '-' | '−' => Tok::Op('-'),
                '*' | '×' => Tok::Op('*'),
                '/' | '÷' => Tok::Op('/'),
                '^' => Tok::Op('^'),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(Error::parse(
                        line,
                        column,
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            text: chars[start..i].iter().collect(),
            line,
            column,
        });
    }
    out.push(Token {
        tok: Tok::End,
        text: String::new(),
        line,
        column: column0 + chars.len(),
    });
    Ok(out)
}

/// Parses `src`, reporting errors relative to the given line and starting column.
pub(crate) fn parse_at(src: &str, line: usize, column: usize) -> Result<Expr> {
    let tokens = lex(src, line, column)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(p.unexpected(t));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: &Token) -> Error {
        let message = match &t.tok {
            Tok::End => "unexpected end of expression".to_string(),
            _ => format!("unexpected token `{}`", t.text),
        };
        Error::parse(t.line, t.column, message)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Num(*v)),
            Tok::Ident(name) if name == "x" => Ok(Expr::X),
            Tok::Ident(name) => {
                let Some(func) = Func::from_name(name) else {
                    return Err(Error::parse(
                        t.line,
                        t.column,
                        format!("unknown identifier `{name}`"),
                    ));
                };
                let open = self.bump();
                if open.tok != Tok::LParen {
                    return Err(Error::parse(
                        open.line,
                        open.column,
                        format!("expected `(` after `{name}`"),
                    ));
                }
                let arg = self.expr()?;
                self.expect_close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            _ => Err(self.unexpected(&t)),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        let t = self.bump();
        if t.tok == Tok::RParen {
            Ok(())
        } else {
            Err(Error::parse(
                t.line,
                t.column,
                match t.tok {
                    Tok::End => "missing `)`".to_string(),
                    _ => format!("expected `)`, found `{}`", t.text),
                },
            ))
        }
    }
}
