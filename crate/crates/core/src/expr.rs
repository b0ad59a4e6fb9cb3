//! The field-definition language.
//!
//! ```text
//! program  := { binding (";" | newline) }
//! binding  := "f" INDEX "=" expr
//!           | "poly" [ "(" INT ")" ] "=" "[" tuple { ";" tuple } "]"
//! tuple    := signed { "," signed }
//! expr     := term { ("+" | "-") term }
//! term     := unary { ("*" | "/") unary }
//! unary    := "-" unary | power
//! power    := primary [ "^" INT { "^" INT } ]      (right-associative)
//! primary  := NUMBER | "x" INDEX | FUNC "(" expr ")" | "(" expr ")"
//! FUNC     := sin | cos | exp | log | sqrt
//! ```
//!
//! Exponents are integer literals, optionally negative (`x1^-2`). `#` starts a
//! comment that runs to the end of the line. In `poly(k) = [a_k; …]` the first
//! coefficient multiplies `w^k` (default `k = 0`).

use core::fmt;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow this when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based coordinate index: `x1` is `Var(0)`.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *x.get(*i).ok_or_else(|| Error::Dimension {
                expected: i + 1,
                found: x.len(),
            })?,
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(self.domain());
                }
                a.eval(x)? / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(self.domain());
                }
                base.powi(*k)
            }
            Expr::Call(f, a) => {
                let arg = a.eval(x)?;
                match f {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Log if arg > 0.0 => arg.ln(),
                    Func::Sqrt if arg >= 0.0 => arg.sqrt(),
                    Func::Log | Func::Sqrt => return Err(self.domain()),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain())
        }
    }

    fn domain(&self) -> Error {
        Error::Domain {
            expr: self.to_string(),
        }
    }

    /// Largest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let op = if matches!(self, Expr::Add(..)) { "+" } else { "-" };
                write_operand(f, a, 1)?;
                write!(f, " {op} ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = if matches!(self, Expr::Mul(..)) { "*" } else { "/" };
                write_operand(f, a, 2)?;
                write!(f, "{op}")?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, k) => {
                write_operand(f, a, 5)?;
                write!(f, "^{k}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// One binding of a field-definition program.
#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    /// `f{index+1} = expr`
    Component { index: usize, expr: Expr },
    /// `poly(lowest) = [a; …]`
    Poly { lowest: i32, coeffs: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| {
                out.push(Spanned {
                    tok,
                    line: lineno + 1,
                    column,
                })
            };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
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
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    column,
                    found: format!("`{text}`"),
                    expected: alloc::vec!["decimal literal".into()],
                })?;
                push(&mut out, Tok::Num(value));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else if "+-*/^()[],;=".contains(c) {
                push(&mut out, Tok::Sym(c));
                i += 1;
            } else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    column,
                    found: format!("`{c}`"),
                    expected: alloc::vec!["expression".into()],
                });
            }
        }
        out.push(Spanned {
            tok: Tok::Newline,
            line: lineno + 1,
            column: chars.len() + 1,
        });
    }
    let (line, column) = out.last().map_or((1, 1), |s| (s.line, s.column));
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dim: usize,
    /// Newlines are insignificant inside brackets and parentheses.
    depth: usize,
}

impl Parser {
    fn peek(&mut self) -> &Tok {
        if self.depth > 0 {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        self.peek();
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, expected: &[&str]) -> Error {
        self.peek();
        let s = &self.toks[self.pos];
        Error::Parse {
            line: s.line,
            column: s.column,
            found: s.tok.to_string(),
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            let want = format!("`{c}`");
            Err(self.error(&[want.as_str()]))
        }
    }

    fn program(&mut self) -> Result<Vec<Binding>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(out),
                Tok::Newline | Tok::Sym(';') => {
                    self.bump();
                }
                _ => {
                    out.push(self.binding()?);
                    match self.peek() {
                        Tok::Newline | Tok::Sym(';') | Tok::Eof => {}
                        _ => return Err(self.error(&["`;`", "end of line", "operator"])),
                    }
                }
            }
        }
    }

    fn binding(&mut self) -> Result<Binding> {
        let name = match self.peek().clone() {
            Tok::Ident(name) => name,
            _ => return Err(self.error(&["`f1`..`f3`", "`poly`"])),
        };
        if name == "poly" {
            self.bump();
            let mut lowest = 0;
            if *self.peek() == Tok::Sym('(') {
                self.bump();
                lowest = self.signed_int()?;
                self.expect_sym(')')?;
            }
            self.expect_sym('=')?;
            return Ok(Binding::Poly {
                lowest,
                coeffs: self.tuple_list()?,
            });
        }
        let index = name
            .strip_prefix('f')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .ok_or_else(|| self.error(&["`f1`..`f3`", "`poly`"]))?;
        if index > self.dim {
            return Err(Error::Arity(format!(
                "component f{index} given for a {}-dimensional field",
                self.dim
            )));
        }
        self.bump();
        self.expect_sym('=')?;
        Ok(Binding::Component {
            index: index - 1,
            expr: self.expr()?,
        })
    }

    fn signed_int(&mut self) -> Result<i32> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(x) if x.fract() == 0.0 && x.abs() <= i32::MAX as f64 => {
                self.bump();
                Ok(if neg { -(x as i32) } else { x as i32 })
            }
            _ => Err(self.error(&["integer literal"])),
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Num(x) => Ok(if neg { -x } else { x }),
            _ => {
                self.pos -= 1;
                Err(self.error(&["number"]))
            }
        }
    }

    fn tuple_list(&mut self) -> Result<Vec<Vec<f64>>> {
        self.expect_sym('[')?;
        self.depth += 1;
        let mut coeffs = Vec::new();
        let mut current = alloc::vec![self.signed_number()?];
        loop {
            match self.bump() {
                Tok::Sym(',') => current.push(self.signed_number()?),
                Tok::Sym(';') => {
                    coeffs.push(core::mem::take(&mut current));
                    current.push(self.signed_number()?);
                }
                Tok::Sym(']') => {
                    coeffs.push(current);
                    self.depth -= 1;
                    return Ok(coeffs);
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&["`,`", "`;`", "`]`"]));
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        let mut exps = Vec::new();
        while *self.peek() == Tok::Sym('^') {
            self.bump();
            exps.push(self.signed_int()?);
        }
        if exps.is_empty() {
            return Ok(base);
        }
        // a^b^c = a^(b^c), folded over the literal chain
        let mut k = *exps.last().unwrap();
        for &b in exps.iter().rev().skip(1) {
            k = u32::try_from(k)
                .ok()
                .and_then(|k| b.checked_pow(k))
                .ok_or_else(|| self.error(&["small non-negative exponent"]))?;
        }
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Const(x))
            }
            Tok::Sym('(') => {
                self.bump();
                self.depth += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                self.depth -= 1;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.bump();
                    self.expect_sym('(')?;
                    self.depth += 1;
                    let arg = self.expr()?;
                    self.expect_sym(')')?;
                    self.depth -= 1;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(i) if (1..=self.dim).contains(&i) => {
                        self.bump();
                        Ok(Expr::Var(i - 1))
                    }
                    _ => Err(self.error(&["number", "variable x1..xn", "function", "`(`"])),
                }
            }
            _ => Err(self.error(&["number", "variable x1..xn", "function", "`(`", "`-`"])),
        }
    }
}

/// Parses a field-definition program for an `dim`-dimensional field.
pub fn parse_program(src: &str, dim: usize) -> Result<Vec<Binding>> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        dim,
        depth: 0,
    };
    p.program()
}

/// Parses a single expression in `x1..x{dim}`.
pub fn parse_expr(src: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        dim,
        depth: 1,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: &str) -> Expr {
        parse_expr(src, 3).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(e("-x1^2").eval(&[3.0, 0.0, 0.0]).unwrap(), -9.0);
        assert_eq!(e("2*x1 - x2/4").eval(&[1.0, 2.0, 0.0]).unwrap(), 1.5);
        assert_eq!(e("1 - 2 - 3").eval(&[0.0; 3]).unwrap(), -4.0);
        assert_eq!(e("2^3^2").eval(&[0.0; 3]).unwrap(), 512.0);
        assert_eq!(e("x1^-2").eval(&[2.0, 0.0, 0.0]).unwrap(), 0.25);
        assert_eq!(e("(x1 + 1)^2").eval(&[1.0, 0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(e("sqrt(4) + exp(0) + log(1) + cos(0) + sin(0)").eval(&[0.0; 3]).unwrap(), 4.0);
        assert_eq!(e("1.5e2 + .5").eval(&[0.0; 3]).unwrap(), 150.5);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let err = e("x2 + 1/x1").eval(&[0.0, 1.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::Domain { expr: "1/x1".into() });
        assert!(matches!(e("log(x1 - 1)").eval(&[1.0, 0.0, 0.0]), Err(Error::Domain { .. })));
        assert!(matches!(e("sqrt(-x1)").eval(&[1.0, 0.0, 0.0]), Err(Error::Domain { .. })));
        assert!(matches!(e("x1^-1").eval(&[0.0; 3]), Err(Error::Domain { .. })));
    }

    #[test]
    fn parse_errors_carry_position_and_expectations() {
        match parse_program("f1 = x1 +\nf2 = 2", 2) {
            Err(Error::Parse { line, column, expected, .. }) => {
                assert_eq!((line, column), (1, 10));
                assert!(expected.iter().any(|s| s.contains("variable")));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_program("f1 = x4", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_program("f1 = x1^1.5", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_program("f1 = x1 $ 2", 3), Err(Error::Parse { .. })));
        assert!(matches!(parse_program("f4 = x1", 3), Err(Error::Arity(_))));
    }

    #[test]
    fn comments_separators_and_poly() {
        let prog = parse_program(
            "# w^2 in coordinates\nf1 = x1^2; f2 = 2*x1*x2  # trailing\nf3 = 2*x1*x3\n",
            3,
        )
        .unwrap();
        assert_eq!(prog.len(), 3);
        let poly = parse_program("poly(-1) = [1, 0, 0;\n 0.5, -2, 3e-1]", 3).unwrap();
        assert_eq!(
            poly,
            alloc::vec![Binding::Poly {
                lowest: -1,
                coeffs: alloc::vec![alloc::vec![1.0, 0.0, 0.0], alloc::vec![0.5, -2.0, 0.3]],
            }]
        );
    }

    #[test]
    fn printer_round_trips_tricky_shapes() {
        for src in [
            "-(x1 + x2)*x3",
            "x1 - (x2 - x3)",
            "x1/(x2*x3)",
            "(x1^2)^3",
            "(-x1)^2",
            "--x1",
            "-x1^2",
            "sin(x1*x2)/(1 + x3^2)",
            "0.1 + 1e-7*x1",
        ] {
            let ast = e(src);
            let printed = ast.to_string();
            assert_eq!(parse_expr(&printed, 3).unwrap(), ast, "{src} -> {printed}");
        }
    }
}
