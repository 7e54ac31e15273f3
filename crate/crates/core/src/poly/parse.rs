//! Polynomial expression parser.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number ('/' integer)? | variable | '(' expr ')'
//! ```
//!
//! Variables are `x`, `y`, `z` (aliases of `x1`, `x2`, `x3`) or `x1..xN`.
//! Numbers may carry a decimal point; they are converted to exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Int(u32),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() || d == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push((number_token(&lit, start)?, start));
                continue;
            }
            a if a.is_ascii_alphabetic() => {
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push((Tok::Var(variable_index(&name, start)?), start));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

fn number_token(lit: &str, pos: usize) -> Result<Tok> {
    let bad = || Error::Syntax {
        pos,
        msg: format!("malformed number `{lit}`"),
    };
    match lit.split_once('.') {
        None => {
            let n: BigInt = lit.parse().map_err(|_| bad())?;
            match u32::try_from(&n) {
                Ok(k) => Ok(Tok::Int(k)),
                Err(_) => Ok(Tok::Num(BigRational::from_integer(n))),
            }
        }
        Some((int, frac)) => {
            if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            Ok(Tok::Num(BigRational::new(n, d)))
        }
    }
}

fn variable_index(name: &str, pos: usize) -> Result<usize> {
    let unknown = || Error::UnknownVariable {
        name: name.to_string(),
        pos,
    };
    match name {
        "x" => Ok(0),
        "y" => Ok(1),
        "z" => Ok(2),
        _ => {
            let rest = name.strip_prefix('x').ok_or_else(unknown)?;
            if rest.starts_with('0') {
                return Err(unknown());
            }
            let k: usize = rest.parse().map_err(|_| unknown())?;
            if k == 0 {
                return Err(unknown());
            }
            Ok(k - 1)
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    num_vars: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            match self.peek().cloned() {
                Some(Tok::Int(k)) => {
                    self.at += 1;
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.num_vars;
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.at += 1;
                let mut c = BigRational::from_integer(BigInt::from(k));
                self.maybe_denominator(&mut c)?;
                Ok(Polynomial::constant(n, c))
            }
            Some(Tok::Num(mut c)) => {
                self.at += 1;
                self.maybe_denominator(&mut c)?;
                Ok(Polynomial::constant(n, c))
            }
            Some(Tok::Var(i)) => {
                self.at += 1;
                Ok(Polynomial::var(n, i))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }

    fn maybe_denominator(&mut self, c: &mut BigRational) -> Result<()> {
        if let Some(Tok::Slash) = self.peek() {
            self.at += 1;
            let d = match self.peek().cloned() {
                Some(Tok::Int(d)) => BigInt::from(d),
                Some(Tok::Num(q)) if q.is_integer() => q.to_integer(),
                _ => return self.err("expected an integer denominator"),
            };
            if d.is_zero() {
                return self.err("zero denominator");
            }
            self.at += 1;
            *c = &*c / BigRational::from_integer(d);
        }
        Ok(())
    }
}

/// Parses `text`; the number of variables is the largest variable index used
/// (at least one).
pub fn parse(text: &str) -> Result<Polynomial> {
    parse_inner(text, None)
}

/// Parses `text` as a polynomial in exactly `num_vars` variables.
pub fn parse_with_vars(text: &str, num_vars: usize) -> Result<Polynomial> {
    parse_inner(text, Some(num_vars))
}

fn parse_inner(text: &str, num_vars: Option<usize>) -> Result<Polynomial> {
    let toks = tokenize(text)?;
    let used = toks
        .iter()
        .filter_map(|(t, _)| match t {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let n = match num_vars {
        Some(n) if n < used => {
            let (name, pos) = toks
                .iter()
                .find_map(|(t, p)| match t {
                    Tok::Var(i) if *i >= n => Some((Polynomial::variable_name(used.max(4), *i), *p)),
                    _ => None,
                })
                .expect("some variable exceeds the bound");
            return Err(Error::UnknownVariable { name, pos });
        }
        Some(n) => n,
        None => used,
    };
    let mut p = Parser {
        toks,
        at: 0,
        num_vars: n,
        end: text.chars().count(),
    };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let out = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Rational literal helper for tests and builders.
pub fn rational(num: i64, den: i64) -> BigRational {
    assert!(den != 0);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::polynomial::rat;

    #[test]
    fn expands_worked_example() {
        let f = parse("(y^2-1)^2 + (x*y-1)^2").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.num_terms(), 5);
        assert_eq!(f.coefficient(&[0, 4]), rat(1));
        assert_eq!(f.coefficient(&[0, 2]), rat(-2));
        assert_eq!(f.coefficient(&[2, 2]), rat(1));
        assert_eq!(f.coefficient(&[1, 1]), rat(-2));
        assert_eq!(f.coefficient(&[0, 0]), rat(2));
    }

    #[test]
    fn zero_and_three_variables() {
        let z = parse("0").unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        let f = parse("x + x^2*y + x^4*y*z").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.degree(), 6);
    }

    #[test]
    fn indexed_variables_and_rationals() {
        let f = parse("x1*x4 - 3/4 + 0.5*x2^2").unwrap();
        assert_eq!(f.num_vars(), 4);
        assert_eq!(f.coefficient(&[0, 0, 0, 0]), rational(-3, 4));
        assert_eq!(f.coefficient(&[0, 2, 0, 0]), rational(1, 2));
        let g = parse("x*y").unwrap();
        let h = parse("x1*x2").unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("x + * y") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse("x + w") {
            Err(Error::UnknownVariable { name, pos }) => {
                assert_eq!(name, "w");
                assert_eq!(pos, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x + 1"), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse("x^y"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1/0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x0"), Err(Error::UnknownVariable { .. })));
        assert!(matches!(
            parse_with_vars("x*y", 1),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn unary_minus_and_precedence() {
        let f = parse("-x^2 + -(y - 1)*2").unwrap();
        assert_eq!(f.coefficient(&[2, 0]), rat(-1));
        assert_eq!(f.coefficient(&[0, 1]), rat(-2));
        assert_eq!(f.coefficient(&[0, 0]), rat(2));
    }
}
