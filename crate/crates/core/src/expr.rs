//! Scalar expressions in one variable `t`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          exponent: integer constant
//! atom  := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func  := sin | cos | exp | sqrt
//! ```

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jets::Jet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn depends_on_t(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.depends_on_t() || b.depends_on_t(),
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.depends_on_t(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var => t,
            Node::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Node::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Node::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Node::Div(a, b) => {
                let d = b.eval(t)?;
                if !(d.abs() >= crate::jets::MIN_DENOMINATOR) {
                    return Err(Error::SingularEvaluation { op: "div", value: d });
                }
                a.eval(t)? / d
            }
            Node::Neg(a) => -a.eval(t)?,
            Node::Pow(a, n) => {
                let x = a.eval(t)?;
                if *n < 0 && !(x.abs() >= crate::jets::MIN_DENOMINATOR) {
                    return Err(Error::SingularEvaluation { op: "pow", value: x });
                }
                x.powi(*n)
            }
            Node::Call(f, a) => {
                let x = a.eval(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::SingularEvaluation { op: "sqrt", value: x });
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        Ok(match self {
            Node::Const(c) => Jet::constant(t.dim(), *c),
            Node::Var => t.clone(),
            Node::Add(a, b) => &a.eval_jet(t)? + &b.eval_jet(t)?,
            Node::Sub(a, b) => &a.eval_jet(t)? - &b.eval_jet(t)?,
            Node::Mul(a, b) => &a.eval_jet(t)? * &b.eval_jet(t)?,
            Node::Div(a, b) => a.eval_jet(t)?.try_div(&b.eval_jet(t)?)?,
            Node::Neg(a) => -a.eval_jet(t)?,
            Node::Pow(a, n) => a.eval_jet(t)?.try_powi(*n)?,
            Node::Call(f, a) => {
                let x = a.eval_jet(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.try_sqrt()?,
                }
            }
        })
    }
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr { source: text.to_string(), root })
    }

    pub fn constant(c: f64) -> Expr {
        Expr { source: format!("{c:?}"), root: Node::Const(c) }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn is_constant(&self) -> bool {
        !self.root.depends_on_t()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.root.eval(t)
    }

    pub fn eval_jet(&self, t: &Jet) -> Result<Jet> {
        self.root.eval_jet(t)
    }

    /// `[f, f', f'', f''']` at `t`.
    pub fn taylor(&self, t: f64) -> Result<[f64; 4]> {
        Ok(self.eval_jet(&Jet::variable(1, 0, t))?.taylor_1d())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Expr::parse(&text).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let exponent = self.unary()?;
        let bad = |message: &str| Error::Syntax { offset: at, message: message.to_string() };
        if exponent.depends_on_t() {
            return Err(bad("exponent must be an integer constant"));
        }
        let e = exponent.eval(0.0).map_err(|_| bad("exponent must be an integer constant"))?;
        if e.fract() != 0.0 || e.abs() > i32::MAX as f64 {
            return Err(bad("exponent must be an integer constant"));
        }
        Ok(Node::Pow(Box::new(base), e as i32))
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.src;
        let mut i = start;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii slice");
        let v: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        self.pos = i;
        Ok(Node::Const(v))
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match name {
            "t" => return Ok(Node::Var),
            "pi" => return Ok(Node::Const(std::f64::consts::PI)),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier { name: name.to_string(), offset: start });
        };
        if !self.eat(b'(') {
            return Err(self.error("function call requires parentheses"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(Node::Call(func, Box::new(arg)))
    }
}
