use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lc::Exponent;

use super::ast::{BinOp, Equation, Expr, Func, Relation, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Rel(Relation),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l0, column: c0 });
        let mut width = 1;
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '0'..='9' | '.' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                let lit: String = chars[start..j].iter().collect();
                let value: f64 = lit.parse().map_err(|_| Error::Syntax {
                    line: l0,
                    column: c0,
                    message: format!("malformed number {lit:?}"),
                })?;
                push(&mut out, Tok::Num(value, lit));
                width = j - start;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                push(&mut out, Tok::Ident(chars[start..j].iter().collect()));
                width = j - start;
            }
            '\'' | '′' => push(&mut out, Tok::Prime),
            '+' => push(&mut out, Tok::Plus),
            '-' | '−' => push(&mut out, Tok::Minus),
            '*' | '·' => push(&mut out, Tok::Star),
            '/' => push(&mut out, Tok::Slash),
            '^' => push(&mut out, Tok::Caret),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            ',' => push(&mut out, Tok::Comma),
            '~' if chars.get(i + 1) == Some(&'=') => {
                push(&mut out, Tok::Rel(Relation::Weak));
                width = 2;
            }
            '~' => push(&mut out, Tok::Rel(Relation::Associated)),
            '=' => push(&mut out, Tok::Rel(Relation::Exact)),
            other => {
                return Err(Error::Syntax {
                    line: l0,
                    column: c0,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(acc),
            };
            self.next();
            acc = Expr::bin(op, acc, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(acc),
            };
            self.next();
            acc = Expr::bin(op, acc, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.next();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.next();
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Num(_, lit) if lit.chars().all(|c| c.is_ascii_digit()) => {
                self.next();
                Ok(lit.parse().expect("digits"))
            }
            _ => self.error("expected an integer"),
        }
    }

    /// `n` or `(p/q)` or `(-p/q)`.
    fn exponent(&mut self) -> Result<Exponent> {
        if *self.peek() != Tok::LParen {
            return Ok(Exponent::from_big(BigRational::from_integer(self.integer()?)));
        }
        self.next();
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.next();
        }
        let p = self.integer()?;
        let q = if *self.peek() == Tok::Slash {
            self.next();
            let q = self.integer()?;
            if q == BigInt::from(0) {
                return self.error("zero denominator in exponent");
            }
            q
        } else {
            BigInt::from(1)
        };
        self.expect(Tok::RParen, "')' after exponent")?;
        let r = BigRational::new(p, q);
        Ok(Exponent::from_big(if negative { -r } else { r }))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(x, _) => {
                self.next();
                Ok(Expr::Num(x))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                self.ident(name)
            }
            _ => self.error("expected a number, symbol, function or '('"),
        }
    }

    fn ident(&mut self, name: String) -> Result<Expr> {
        match name.as_str() {
            "s" => return Ok(Expr::Sym(Symbol::S)),
            "i" => return Ok(Expr::Sym(Symbol::I)),
            "t" => return Ok(Expr::Sym(Symbol::T)),
            "z" => return Ok(Expr::Sym(Symbol::Z)),
            "y" => {
                let mut k = 0u8;
                while *self.peek() == Tok::Prime {
                    self.next();
                    k += 1;
                }
                if k > 2 {
                    return self.error("only y, y' and y'' are supported");
                }
                return Ok(Expr::Sym(Symbol::Y(k)));
            }
            _ => {}
        }
        if name == "delta_n" {
            self.expect(Tok::LParen, "'(' after delta_n")?;
            let k = self.integer()?;
            let k: u32 = k.try_into().map_err(|_| Error::Syntax {
                line: self.toks[self.pos].line,
                column: self.toks[self.pos].column,
                message: "derivative order too large".into(),
            })?;
            self.expect(Tok::Comma, "',' after the derivative order")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(Expr::call(Func::DeltaN(k), arg));
        }
        match Func::from_name(&name) {
            Some(f) => {
                self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::call(f, arg))
            }
            None => {
                self.pos -= 1;
                self.error(format!("unknown identifier {name:?}"))
            }
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.error("unexpected trailing input"),
        }
    }
}

fn parser(text: &str) -> Result<Parser> {
    Ok(Parser { toks: lex(text)?, pos: 0 })
}

/// Parses a single expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = parser(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `lhs REL rhs` with `REL` one of `~=`, `=`, `~`.
pub fn parse_equation(text: &str) -> Result<Equation> {
    let mut p = parser(text)?;
    let lhs = p.expr()?;
    let relation = match p.peek() {
        Tok::Rel(r) => *r,
        _ => return p.error("expected '~=', '=' or '~'"),
    };
    p.next();
    let rhs = p.expr()?;
    p.finish()?;
    Ok(Equation { lhs, relation, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_delta() {
        let e = parse("delta(t - 2*s)").unwrap();
        assert_eq!(
            e,
            Expr::call(
                Func::Delta,
                Expr::bin(
                    BinOp::Sub,
                    Expr::Sym(Symbol::T),
                    Expr::bin(BinOp::Mul, Expr::Num(2.0), Expr::Sym(Symbol::S))
                )
            )
        );
        assert_eq!(e.to_string(), "delta(t - 2*s)");
    }

    #[test]
    fn rational_exponent_and_product() {
        assert_eq!(parse("3*s^(1/2) - 2").unwrap().to_string(), "3*s^(1/2) - 2");
        assert!(matches!(parse("H(t)*delta(t)").unwrap(), Expr::Bin(BinOp::Mul, ..)));
    }

    #[test]
    fn equation_and_errors() {
        let eq = parse_equation("y'' + y ~= delta(t - 2*s)").unwrap();
        assert_eq!(eq.relation, Relation::Weak);
        assert_eq!(eq.to_string(), "y'' + y ~= delta(t - 2*s)");
        match parse("sin(t") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        assert!(parse("foo(t)").is_err());
        assert!(parse("t^x").is_err());
        assert!(parse("").is_err());
        assert!(parse("2^").is_err());
    }
}
