//! Closed-form scalar expressions: parsing and jet-mode evaluation.
//!
//! Grammar (loosest to tightest binding): `+ -`, then `* /`, then unary
//! minus, then `^` (right-associative), then atoms. Function application is
//! `name(expr)` with the fixed set sin, cos, tan, exp, log, sqrt, sinh, cosh,
//! tanh; `pi` and `e` are constants. Identifiers resolve against the chart
//! coordinates and declared parameters at parse time.

use std::fmt;

use crate::error::{EvalError, ParseError};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
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

/// Abstract syntax tree of a component expression. Coordinates and parameters
/// are stored as indices into the name lists the source was parsed against.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    E,
    Coord(usize),
    Param(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [String],
    params: &'a [String],
}

/// Parse `source` against the given coordinate and parameter names.
pub fn parse(source: &str, coords: &[String], params: &[String]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        coords,
        params,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let e = p.parse_sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ParseError::Syntax {
            offset: p.pos,
            message: format!("unexpected input `{}`", p.rest_snippet()),
        });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn rest_snippet(&self) -> String {
        let rest = &self.src[self.pos..];
        let take = rest.len().min(12);
        String::from_utf8_lossy(&rest[..take]).into_owned()
    }

    fn skip_ws(&mut self) {
        while matches!(self.src.get(self.pos), Some(b' ' | b'\t' | b'\n' | b'\r')) {
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

    fn parse_sum(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.parse_product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    node = Expr::Bin(BinOp::Add, Box::new(node), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_product()?;
                    node = Expr::Bin(BinOp::Sub, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Expr, ParseError> {
        let mut node = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    node = Expr::Bin(BinOp::Mul, Box::new(node), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.parse_unary()?;
                    node = Expr::Bin(BinOp::Div, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            let inner = self.parse_unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_atom()?;
        if self.eat(b'^') {
            // Right-associative; the exponent may start with a unary minus.
            let exponent = self.parse_unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_sum()?;
                if !self.eat(b')') {
                    return Err(ParseError::Syntax {
                        offset: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.parse_ident(),
            _ => Err(ParseError::Syntax {
                offset: self.pos,
                message: if self.pos >= self.src.len() {
                    "unexpected end of input".into()
                } else {
                    format!("unexpected character `{}`", self.src[self.pos] as char)
                },
            }),
        }
    }

    fn parse_number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `2e` followed by a non-digit: the `e` was not an exponent.
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("bad numeric literal `{text}`"),
            })
    }

    fn parse_ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();
        if self.peek() == Some(b'(') {
            let func = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
                name: name.clone(),
                offset: start,
            })?;
            self.pos += 1;
            let arg = self.parse_sum()?;
            if !self.eat(b')') {
                return Err(ParseError::Syntax {
                    offset: self.pos,
                    message: "expected `)` after function argument".into(),
                });
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        match name.as_str() {
            "pi" => return Ok(Expr::Pi),
            "e" => return Ok(Expr::E),
            _ => {}
        }
        if let Some(i) = self.coords.iter().position(|c| *c == name) {
            return Ok(Expr::Coord(i));
        }
        if let Some(i) = self.params.iter().position(|p| *p == name) {
            return Ok(Expr::Param(i));
        }
        Err(ParseError::UnknownIdentifier {
            name,
            offset: start,
        })
    }
}

/// Exact integer exponent, when the exponent expression is a literal.
fn literal_int_exponent(e: &Expr) -> Option<i64> {
    match e {
        Expr::Num(v) if v.fract() == 0.0 && v.abs() <= 1e9 => Some(*v as i64),
        Expr::Neg(inner) => literal_int_exponent(inner).map(|k| -k),
        _ => None,
    }
}

impl Expr {
    /// Evaluate in jet mode. `coords[i]` must be the seeded jet of chart
    /// coordinate `i`; `params` the bound parameter values.
    pub fn eval_jet(&self, coords: &[Jet], params: &[f64]) -> Result<Jet, EvalError> {
        let proto = &coords[0];
        let domain = |op: &'static str, node: &Expr| EvalError::Domain {
            op,
            expr: node.to_string(),
        };
        Ok(match self {
            Expr::Num(v) => proto.constant_like(*v),
            Expr::Pi => proto.constant_like(std::f64::consts::PI),
            Expr::E => proto.constant_like(std::f64::consts::E),
            Expr::Coord(i) => coords[*i].clone(),
            Expr::Param(i) => proto.constant_like(params[*i]),
            Expr::Neg(inner) => -inner.eval_jet(coords, params)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval_jet(coords, params)?;
                match op {
                    BinOp::Add => x + b.eval_jet(coords, params)?,
                    BinOp::Sub => x - b.eval_jet(coords, params)?,
                    BinOp::Mul => x * b.eval_jet(coords, params)?,
                    BinOp::Div => {
                        let y = b.eval_jet(coords, params)?;
                        let inv = y.recip().map_err(|_| domain("division by zero", self))?;
                        x * inv
                    }
                    BinOp::Pow => {
                        if let Some(k) = literal_int_exponent(b) {
                            x.powi(k).map_err(|_| domain("division by zero", self))?
                        } else {
                            // Non-integer exponent lowers to exp(y log x).
                            let y = b.eval_jet(coords, params)?;
                            let lnx =
                                x.ln().map_err(|_| domain("log of non-positive base", self))?;
                            (y * lnx).exp()
                        }
                    }
                }
            }
            Expr::Call(f, arg) => {
                let x = arg.eval_jet(coords, params)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => {
                        let c = x.cos();
                        let inv = c.recip().map_err(|_| domain("tan at a pole", self))?;
                        x.sin() * inv
                    }
                    Func::Exp => x.exp(),
                    Func::Log => x
                        .ln()
                        .map_err(|_| domain("log of non-positive value", self))?,
                    Func::Sqrt => x
                        .sqrt()
                        .map_err(|_| domain("sqrt of non-positive value", self))?,
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => {
                        let c = x.cosh();
                        let inv = c.recip().expect("cosh is never zero");
                        x.sinh() * inv
                    }
                }
            }
        })
    }

    /// Plain `f64` evaluation (used by finite-difference oracles and the CLI).
    pub fn eval_f64(&self, coords: &[f64], params: &[f64]) -> Result<f64, EvalError> {
        let domain = |op: &'static str, node: &Expr| EvalError::Domain {
            op,
            expr: node.to_string(),
        };
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Coord(i) => coords[*i],
            Expr::Param(i) => params[*i],
            Expr::Neg(inner) => -inner.eval_f64(coords, params)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval_f64(coords, params)?;
                let y = b.eval_f64(coords, params)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain("division by zero", self));
                        }
                        x / y
                    }
                    BinOp::Pow => {
                        if let Some(k) = literal_int_exponent(b) {
                            if x == 0.0 && k < 0 {
                                return Err(domain("division by zero", self));
                            }
                            x.powi(k as i32)
                        } else {
                            if x <= 0.0 {
                                return Err(domain("log of non-positive base", self));
                            }
                            (y * x.ln()).exp()
                        }
                    }
                }
            }
            Expr::Call(f, arg) => {
                let x = arg.eval_f64(coords, params)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain("log of non-positive value", self));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain("sqrt of non-positive value", self));
                        }
                        x.sqrt()
                    }
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                }
            }
        })
    }

    /// Render back to parseable source with the given name tables.
    pub fn render(&self, coords: &[String], params: &[String]) -> String {
        match self {
            Expr::Num(v) => format!("{v}"),
            Expr::Pi => "pi".into(),
            Expr::E => "e".into(),
            Expr::Coord(i) => coords
                .get(*i)
                .cloned()
                .unwrap_or_else(|| format!("x{i}")),
            Expr::Param(i) => params
                .get(*i)
                .cloned()
                .unwrap_or_else(|| format!("p{i}")),
            Expr::Neg(inner) => format!("-({})", inner.render(coords, params)),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                format!(
                    "({} {sym} {})",
                    a.render(coords, params),
                    b.render(coords, params)
                )
            }
            Expr::Call(func, arg) => format!("{}({})", func.name(), arg.render(coords, params)),
        }
    }
}

impl fmt::Display for Expr {
    /// Placeholder names (`x0`, `p0`); use [`Expr::render`] with the real
    /// name tables for parseable output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[], &[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn sphere_area_element() {
        let coords = names(&["theta", "phi"]);
        let params = names(&["r"]);
        let e = parse("r^2 * sin(theta)^2", &coords, &params).unwrap();
        let v = e
            .eval_f64(&[std::f64::consts::FRAC_PI_2, 1.0], &[1.0])
            .unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_input_reports_offset() {
        let coords = names(&["x0"]);
        match parse("x0 + ", &coords, &[]) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_function_is_unknown_identifier() {
        let coords = names(&["x0"]);
        match parse("foo(x0)", &coords, &[]) {
            Err(ParseError::UnknownIdentifier { name, .. }) => assert_eq!(name, "foo"),
            other => panic!("expected unknown identifier, got {other:?}"),
        }
    }

    #[test]
    fn precedence_pow_unary_mul_add() {
        let coords = names(&["x"]);
        // -x^2 parses as -(x^2): at x=3 gives -9
        let e = parse("-x^2", &coords, &[]).unwrap();
        assert_eq!(e.eval_f64(&[3.0], &[]).unwrap(), -9.0);
        // 2^3^2 is right-associative: 2^9 = 512 (outer power is the
        // exp/log path since its exponent is compound)
        let e = parse("2^3^2", &coords, &[]).unwrap();
        assert!((e.eval_f64(&[0.0], &[]).unwrap() - 512.0).abs() < 1e-9);
        // 1+2*3^2 = 19
        let e = parse("1+2*3^2", &coords, &[]).unwrap();
        assert_eq!(e.eval_f64(&[0.0], &[]).unwrap(), 19.0);
        // x^-2 allows a unary-minus exponent
        let e = parse("x^-2", &coords, &[]).unwrap();
        assert!((e.eval_f64(&[2.0], &[]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let coords = names(&["x"]);
        let e = parse("x^2", &coords, &[]).unwrap();
        assert_eq!(e.eval_f64(&[-0.5], &[]).unwrap(), 0.25);
        let j = e
            .eval_jet(&crate::jet::Jet::seed_point(&[-0.5], 2), &[])
            .unwrap();
        assert!((j.partial_derivative(&[1]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn noninteger_power_domain() {
        let coords = names(&["x"]);
        let e = parse("x^0.5", &coords, &[]).unwrap();
        assert!(e.eval_f64(&[-1.0], &[]).is_err());
        assert!((e.eval_f64(&[4.0], &[]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn domain_error_names_the_offending_subexpression() {
        let coords = names(&["x"]);
        let e = parse("1 + log(x - 5)", &coords, &[]).unwrap();
        match e.eval_f64(&[1.0], &[]) {
            Err(crate::error::EvalError::Domain { expr, .. }) => {
                assert!(expr.contains("log"), "payload was `{expr}`");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn constants_and_scientific_literals() {
        let e = parse("2e-3 + pi", &names(&["x"]), &[]).unwrap();
        let v = e.eval_f64(&[0.0], &[]).unwrap();
        assert!((v - (0.002 + std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn jet_eval_matches_f64_eval() {
        let coords = names(&["u", "v"]);
        let e = parse("sin(u*v) + exp(u)/(1+v^2) - tanh(v)", &coords, &[]).unwrap();
        let p = [0.6, -0.9];
        let jets = crate::jet::Jet::seed_point(&p, 3);
        let j = e.eval_jet(&jets, &[]).unwrap();
        let v = e.eval_f64(&p, &[]).unwrap();
        assert!((j.value() - v).abs() < 1e-14);
    }
}
