//! Complex-valued expressions in one real variable.
//!
//! Grammar (usual precedence, `^` right-associative, unary minus binds
//! looser than `^`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'i' | 'pi' | 'inf' | 'x' | 'n'
//!         | func '(' expr ')' | 'step' '(' expr ',' expr ')' | '(' expr ')'
//! func   := exp | sin | cos | abs | sign | sqrt | re | im | conj
//! ```
//!
//! `x` and `n` both name the variable; `step(a, b)` is the indicator of
//! `[a, b)`. A number directly followed by `i` (`2i`, `0.5i`) is imaginary.

use std::fmt;
use std::sync::Arc;

use crate::matkernel::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Abs,
    Sign,
    Sqrt,
    Re,
    Im,
    Conj,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Sqrt => "sqrt",
            Func::Re => "re",
            Func::Im => "im",
            Func::Conj => "conj",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "sqrt" => Func::Sqrt,
            "re" => Func::Re,
            "im" => Func::Im,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    fn apply(self, z: C64) -> C64 {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Abs => C64::new(z.norm(), 0.0),
            Func::Sign => {
                // sign of the real part; complex sign z/|z| is rarely wanted
                C64::new(
                    if z.re > 0.0 {
                        1.0
                    } else if z.re < 0.0 {
                        -1.0
                    } else {
                        0.0
                    },
                    0.0,
                )
            }
            Func::Sqrt => z.sqrt(),
            Func::Re => C64::new(z.re, 0.0),
            Func::Im => C64::new(z.im, 0.0),
            Func::Conj => z.conj(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Step(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src,
            chars: src.char_indices().collect(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => C64::new(x, 0.0),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                let e = b.eval(x);
                if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= i32::MAX as f64 {
                    base.powi(e.re as i32)
                } else if base.im == 0.0 && base.re >= 0.0 && e.im == 0.0 {
                    C64::new(base.re.powf(e.re), 0.0)
                } else {
                    base.powc(e)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(x)),
            Expr::Step(a, b) => {
                let (lo, hi) = (a.eval(x).re, b.eval(x).re);
                C64::new(if x >= lo && x < hi { 1.0 } else { 0.0 }, 0.0)
            }
        }
    }

    /// True when the expression does not reference the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Step(..) => false,
        }
    }

    pub fn into_fn(self) -> Arc<dyn Fn(f64) -> C64 + Send + Sync> {
        Arc::new(move |x| self.eval(x))
    }
}

fn fmt_c64(c: C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let real = |v: f64, f: &mut fmt::Formatter<'_>| {
        if v.is_infinite() {
            write!(f, "{}inf", if v < 0.0 { "-" } else { "" })
        } else {
            write!(f, "{v:?}")
        }
    };
    match (c.re, c.im) {
        (re, im) if im == 0.0 => {
            write!(f, "(")?;
            real(re, f)?;
            write!(f, ")")
        }
        (re, im) if re == 0.0 => {
            write!(f, "(")?;
            real(im, f)?;
            write!(f, "*i)")
        }
        (re, im) => {
            write!(f, "(")?;
            real(re, f)?;
            write!(f, "+")?;
            real(im, f)?;
            write!(f, "*i)")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_c64(*c, f),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Step(a, b) => write!(f, "step({a},{b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') || self.eat('·') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') || self.eat('−') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let a = self.chars[start].0;
        let b = self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i);
        self.src[a..b].to_string()
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let mut seen_exp = false;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            let sign_after_exp = (c == '+' || c == '-') && seen_exp && matches!(self.chars[self.pos - 1].1, 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || sign_after_exp {
                self.pos += 1;
            } else if (c == 'e' || c == 'E') && !seen_exp {
                // only an exponent if followed by a digit or sign+digit
                let next = self.chars.get(self.pos + 1).map(|p| p.1);
                let next2 = self.chars.get(self.pos + 2).map(|p| p.1);
                let is_exp = matches!(next, Some(d) if d.is_ascii_digit())
                    || (matches!(next, Some('+') | Some('-')) && matches!(next2, Some(d) if d.is_ascii_digit()));
                if !is_exp {
                    break;
                }
                seen_exp = true;
                self.pos += 1;
            } else {
                break;
            }
        }
        let a = self.chars[start].0;
        let b = self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i);
        self.src[a..b].parse::<f64>().map_err(|_| ParseError {
            column: start + 1,
            message: format!("malformed number '{}'", &self.src[a..b]),
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('π') => {
                self.pos += 1;
                Ok(Expr::Const(C64::new(std::f64::consts::PI, 0.0)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let v = self.number()?;
                if self.chars.get(self.pos).map(|p| p.1) == Some('i')
                    && !self
                        .chars
                        .get(self.pos + 1)
                        .is_some_and(|p| p.1.is_ascii_alphanumeric())
                {
                    self.pos += 1;
                    return Ok(Expr::Const(C64::new(0.0, v)));
                }
                Ok(Expr::Const(C64::new(v, 0.0)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                match name.as_str() {
                    "x" | "n" => Ok(Expr::Var),
                    "i" => Ok(Expr::Const(C64::new(0.0, 1.0))),
                    "pi" => Ok(Expr::Const(C64::new(std::f64::consts::PI, 0.0))),
                    "inf" => Ok(Expr::Const(C64::new(f64::INFINITY, 0.0))),
                    "step" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Step(Box::new(a), Box::new(b)))
                    }
                    other => match Func::from_name(other) {
                        Some(f) => {
                            self.expect('(')?;
                            let a = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(f, Box::new(a)))
                        }
                        None => Err(ParseError {
                            column: start + 1,
                            message: format!("unknown identifier '{other}'"),
                        }),
                    },
                }
            }
            Some(c) => Err(self.error(&format!("unexpected character '{c}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> C64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2*3", 0.0), C64::new(7.0, 0.0));
        assert_eq!(ev("-x^2", 3.0), C64::new(-9.0, 0.0));
        assert_eq!(ev("2^3^2", 0.0), C64::new(512.0, 0.0));
        assert_eq!(ev("(1+x)/2", 3.0), C64::new(2.0, 0.0));
        assert_eq!(ev("1e-3*x", 2.0), C64::new(2e-3, 0.0));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(ev("-1+i", 0.0), C64::new(-1.0, 1.0));
        assert_eq!(ev("0.3i", 0.0), C64::new(0.0, 0.3));
        assert_eq!(ev("i*x^3", 2.0), C64::new(0.0, 8.0));
        assert!((ev("exp(i*pi)", 0.0) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("abs(x)", -2.0), C64::new(2.0, 0.0));
        assert_eq!(ev("sign(x)", -0.5), C64::new(-1.0, 0.0));
        assert_eq!(ev("step(-1, 1)", 0.0), C64::new(1.0, 0.0));
        assert_eq!(ev("step(-1, 1)", 1.0), C64::new(0.0, 0.0));
        assert_eq!(ev("2*step(0, inf)", 5.0), C64::new(2.0, 0.0));
        assert!((ev("cos(x)^2 + sin(x)^2", 0.7) - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn errors_carry_columns() {
        let e = Expr::parse("1 + foo(x)").unwrap_err();
        assert_eq!(e.column, 5);
        assert!(Expr::parse("(1 + x").is_err());
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("1 2").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["-1+i", "x^2 - 0.8*exp(-x^2)", "2*step(0, inf) + i*x^3", "sign(x)"] {
            let e = Expr::parse(src).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            for x in [-2.0, -0.3, 0.0, 0.4, 3.0] {
                assert_eq!(e.eval(x), back.eval(x), "{src}");
            }
        }
    }
}
