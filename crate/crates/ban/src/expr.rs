//! Boolean expressions and the network text format.
//!
//! Expressions use `!` (not), `&` (and), `^` (xor), `|` (or), parentheses,
//! the literals `0`/`1` and variables `x<k>`. Precedence is
//! `!` > `&` > `^` > `|`, all binary operators left-associative. A network
//! file has one `index: expr` line per automaton, an optional `n = <size>`
//! line, and `#` comments.

use std::collections::BTreeMap;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::network::Network;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &Config) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => x.bit(*i),
            Expr::Not(e) => !e.eval(x),
            Expr::And(a, b) => a.eval(x) && b.eval(x),
            Expr::Xor(a, b) => a.eval(x) ^ b.eval(x),
            Expr::Or(a, b) => a.eval(x) || b.eval(x),
        }
    }

    /// Highest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Not(e) => e.max_var(),
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(u), Some(v)) => Some(u.max(v)),
                    (u, v) => u.or(v),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
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

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.xor()?;
        while self.eat(b'|') {
            acc = Expr::Or(Box::new(acc), Box::new(self.xor()?));
        }
        Ok(acc)
    }

    fn xor(&mut self) -> Result<Expr> {
        let mut acc = self.and()?;
        while self.eat(b'^') {
            acc = Expr::Xor(Box::new(acc), Box::new(self.and()?));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while self.eat(b'&') {
            acc = Expr::And(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'!') {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Expr::Const(false))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Expr::Const(true))
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected a variable index after 'x'"));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let index: usize = digits
                    .parse()
                    .map_err(|_| self.error(format!("variable index {digits} out of range")))?;
                Ok(Expr::Var(index))
            }
            Some(c) => Err(self.error(format!("unexpected character {:?}", c as char))),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn finish(mut self, value: Expr) -> Result<Expr> {
        if let Some(c) = self.peek() {
            Err(self.error(format!("trailing input starting at {:?}", c as char)))
        } else {
            Ok(value)
        }
    }
}

/// Parse a single expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    parse_expr_at(src, 0)
}

fn parse_expr_at(src: &str, line: usize) -> Result<Expr> {
    let mut p = Parser::new(src, line);
    let e = p.expr()?;
    p.finish(e)
}

/// Parse a whole network file.
///
/// ```
/// use ban::expr::parse_network;
/// use ban::network::Sign;
///
/// let net = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
/// assert_eq!(net.size(), 2);
/// assert_eq!(net.unstable_mask(&"11".parse().unwrap()), 0b11);
/// let structure = net.signed_structure();
/// assert_eq!(structure.sign(0, 0), Some(Sign::Positive));
/// assert_eq!(structure.sign(1, 0), Some(Sign::Negative));
/// let frus = net.frustrations(&"11".parse().unwrap()).unwrap();
/// assert_eq!(frus.arcs(), [(0, 1), (1, 0)]);
/// ```
pub fn parse_network(src: &str) -> Result<Network> {
    let mut declared_n: Option<usize> = None;
    let mut defs: BTreeMap<usize, Expr> = BTreeMap::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n") {
            let rest = rest.trim_start();
            if let Some(value) = rest.strip_prefix('=') {
                declared_n = Some(value.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("invalid size declaration {:?}", line),
                })?);
                continue;
            }
        }
        let (head, body) = line.split_once(':').ok_or(Error::Parse {
            line: line_no,
            column: 1,
            message: "expected '<index>: <expr>'".to_string(),
        })?;
        let index: usize = head.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            column: 1,
            message: format!("invalid automaton index {:?}", head.trim()),
        })?;
        if defs.contains_key(&index) {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: format!("automaton {index} defined twice"),
            });
        }
        defs.insert(index, parse_expr_at(body, line_no)?);
    }
    if defs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: "no automaton definitions found".to_string(),
        });
    }
    let max_index = *defs.keys().max().unwrap();
    let max_var = defs.values().filter_map(|e| e.max_var()).max();
    let inferred = (max_index + 1).max(max_var.map_or(0, |v| v + 1));
    let n = declared_n.unwrap_or(inferred);
    for i in 0..n {
        if !defs.contains_key(&i) {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("automaton {i} is not defined (network size {n})"),
            });
        }
    }
    if defs.len() != n {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: format!("{} definitions given but network size is {n}", defs.len()),
        });
    }
    let exprs: Vec<Expr> = defs.into_values().collect();
    Network::from_expressions(n, &exprs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_not_and_xor_or() {
        // !x0 & x1 ^ x2 | x3 parses as (((!x0) & x1) ^ x2) | x3.
        let e = parse_expr("!x0 & x1 ^ x2 | x3").unwrap();
        let check = |s: &str| e.eval(&s.parse().unwrap());
        for x in Config::all(4) {
            let expected = ((!x.bit(0) && x.bit(1)) ^ x.bit(2)) || x.bit(3);
            assert_eq!(e.eval(&x), expected, "at {x}");
        }
        assert!(check("0100"));
        assert!(!check("1100"));
    }

    #[test]
    fn parentheses_and_literals() {
        let e = parse_expr("(x0 | 1) & !0").unwrap();
        assert!(e.eval(&"0".parse().unwrap()));
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(parse_expr("x0 x1").is_err());
        assert!(parse_expr("x0 &").is_err());
        assert!(parse_expr("(x0").is_err());
        assert!(parse_expr("y0").is_err());
    }

    #[test]
    fn parses_network_file_with_comments() {
        let src = "# the F-impact example\nn = 2\n0: x0 & !x1\n1: !x0 & x1 # mirror\n";
        let net = parse_network(src).unwrap();
        assert_eq!(net.size(), 2);
        assert!(net.eval(1, &"01".parse().unwrap()));
    }

    #[test]
    fn infers_size_from_variables() {
        let net = parse_network("0: x1\n1: x0\n").unwrap();
        assert_eq!(net.size(), 2);
    }

    #[test]
    fn missing_definition_reported() {
        let err = parse_network("n = 3\n0: x0\n2: x2\n").unwrap_err();
        assert!(err.to_string().contains("automaton 1"));
    }

    #[test]
    fn duplicate_definition_reported() {
        assert!(parse_network("0: x0\n0: !x0\n").is_err());
    }

    #[test]
    fn structure_invariant_under_rewrites() {
        // Same truth tables written differently give the same signed
        // structure.
        let a = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
        let b = parse_network("0: !(!x0 | x1)\n1: !(x0 | !x1)\n").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.signed_structure(), b.signed_structure());
    }
}
