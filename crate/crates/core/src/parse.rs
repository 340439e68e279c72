//! Text grammar for elements, polynomials and twisted generators.
//!
//! Symbols: `L(n)`, `I(i,n)`, `C(j)`; twisted generators `N0(m)`, `Ni(m)`,
//! `K(j)`. Elements are sums `coeff*sym + ...` where a coefficient is a
//! product of rational factors, `i`, and parenthesized scalars, e.g.
//! `4*L(0) + 1/2*C(0)` or `(1/2+1/3*i)*L(1)`. Polynomials use `t^k`
//! (univariate) and `t[n,i]^k` (Fock) atoms: `3/2*t^2 + 1`,
//! `5*t[1,1]^2*t[2,1] + 1/16`. Whitespace is insignificant; the Unicode
//! minus sign is accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{BasisSymbol, GapParameter, LieElement};
use crate::error::{Error, Result};
use crate::fock::{FockMonomial, FockPoly, FockVar};
use crate::omega::UniPoly;
use crate::scalar::Scalar;
use crate::twisted::TwistedGenerator;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Int(n) => write!(f, "{n}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Plus => write!(f, "+"),
            Token::Minus => write!(f, "-"),
            Token::Star => write!(f, "*"),
            Token::Slash => write!(f, "/"),
            Token::Caret => write!(f, "^"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::LBracket => write!(f, "["),
            Token::RBracket => write!(f, "]"),
            Token::Comma => write!(f, ","),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        match ch {
            c if c.is_whitespace() => k += 1,
            '+' => {
                out.push((pos, Token::Plus));
                k += 1;
            }
            '-' | '\u{2212}' => {
                out.push((pos, Token::Minus));
                k += 1;
            }
            '*' => {
                out.push((pos, Token::Star));
                k += 1;
            }
            '/' => {
                out.push((pos, Token::Slash));
                k += 1;
            }
            '^' => {
                out.push((pos, Token::Caret));
                k += 1;
            }
            '(' => {
                out.push((pos, Token::LParen));
                k += 1;
            }
            ')' => {
                out.push((pos, Token::RParen));
                k += 1;
            }
            '[' => {
                out.push((pos, Token::LBracket));
                k += 1;
            }
            ']' => {
                out.push((pos, Token::RBracket));
                k += 1;
            }
            ',' => {
                out.push((pos, Token::Comma));
                k += 1;
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while k < chars.len() && chars[k].1.is_ascii_digit() {
                    digits.push(chars[k].1);
                    k += 1;
                }
                out.push((pos, Token::Int(digits.parse().expect("digits"))));
            }
            c if c.is_ascii_alphabetic() => {
                let mut ident = String::new();
                while k < chars.len()
                    && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_')
                {
                    ident.push(chars[k].1);
                    k += 1;
                }
                out.push((pos, Token::Ident(ident)));
            }
            other => {
                return Err(Error::Parse {
                    pos,
                    expected: "token".into(),
                    found: other.to_string(),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self> {
        let tokens = tokenize(input)?;
        Ok(Parser { tokens, cursor: 0, end: input.len() })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.cursor).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).map(|(_, t)| t.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> Error {
        Error::Parse {
            pos: self.pos(),
            expected: expected.into(),
            found: self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of input".into()),
        }
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.advance();
                Ok(())
            }
            _ => Err(self.err(what)),
        }
    }

    fn expect_done(&self) -> Result<()> {
        if self.cursor == self.tokens.len() {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    fn unsigned_int(&mut self) -> Result<BigInt> {
        match self.advance() {
            Some(Token::Int(n)) => Ok(n),
            _ => {
                self.cursor = self.cursor.saturating_sub(1);
                Err(self.err("integer"))
            }
        }
    }

    fn signed_int(&mut self) -> Result<BigInt> {
        let neg = matches!(self.peek(), Some(Token::Minus));
        if neg {
            self.advance();
        }
        let n = self.unsigned_int()?;
        Ok(if neg { -n } else { n })
    }

    fn signed_i64(&mut self, what: &str) -> Result<i64> {
        let n = self.signed_int()?;
        i64::try_from(n).map_err(|_| self.err(what))
    }

    fn unsigned_u32(&mut self, what: &str) -> Result<u32> {
        let n = self.unsigned_int()?;
        u32::try_from(n).map_err(|_| self.err(what))
    }

    /// `a` or `a/b` starting at an already-consumed-or-not integer head.
    fn rational(&mut self) -> Result<BigRational> {
        let numer = self.unsigned_int()?;
        if matches!(self.peek(), Some(Token::Slash)) {
            self.advance();
            let denom = self.unsigned_int()?;
            if denom.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            Ok(BigRational::new(numer, denom))
        } else {
            Ok(BigRational::from_integer(numer))
        }
    }

    /// A full scalar expression: sum of signed parts, each `rational`,
    /// `rational*i`, or `i`. Used inside parentheses.
    fn scalar_sum(&mut self) -> Result<Scalar> {
        let mut total = Scalar::zero();
        let mut first = true;
        loop {
            let mut sign = BigRational::one();
            match self.peek() {
                Some(Token::Minus) => {
                    self.advance();
                    sign = -sign;
                }
                Some(Token::Plus) => {
                    if first {
                        return Err(self.err("scalar"));
                    }
                    self.advance();
                }
                _ if first => {}
                _ => break,
            }
            let part = match self.peek() {
                Some(Token::Ident(id)) if id == "i" => {
                    self.advance();
                    Scalar::new(BigRational::zero(), sign)
                }
                Some(Token::Int(_)) => {
                    let r = self.rational()?;
                    let imaginary = if matches!(self.peek(), Some(Token::Star)) {
                        // lookahead for `*i`
                        let save = self.cursor;
                        self.advance();
                        match self.peek() {
                            Some(Token::Ident(id)) if id == "i" => {
                                self.advance();
                                true
                            }
                            _ => {
                                self.cursor = save;
                                false
                            }
                        }
                    } else {
                        false
                    };
                    if imaginary {
                        Scalar::new(BigRational::zero(), sign * r)
                    } else {
                        Scalar::new(sign * r, BigRational::zero())
                    }
                }
                _ => return Err(self.err("scalar part")),
            };
            total = &total + &part;
            first = false;
            if !matches!(self.peek(), Some(Token::Plus) | Some(Token::Minus)) {
                break;
            }
        }
        Ok(total)
    }

    fn basis_symbol(&mut self, p: GapParameter, head: &str) -> Result<BasisSymbol> {
        match head {
            "L" => {
                self.expect(Token::LParen, "(")?;
                let n = self.signed_i64("index")?;
                self.expect(Token::RParen, ")")?;
                Ok(p.l(n))
            }
            "I" => {
                self.expect(Token::LParen, "(")?;
                let sup = self.unsigned_u32("superscript")?;
                self.expect(Token::Comma, ",")?;
                let n = self.signed_i64("index")?;
                self.expect(Token::RParen, ")")?;
                p.i(sup, n)
            }
            "C" => {
                self.expect(Token::LParen, "(")?;
                let j = self.unsigned_u32("central index")?;
                self.expect(Token::RParen, ")")?;
                p.c(j)
            }
            _ => Err(self.err("symbol L, I or C")),
        }
    }
}

/// Parses a Lie element such as `4*L(0) + 1/2*C(0)` or `0`.
pub fn parse_element(p: GapParameter, input: &str) -> Result<LieElement> {
    let mut parser = Parser::new(input)?;
    let mut out = LieElement::zero(p);
    let mut first = true;
    loop {
        // Sign separating terms.
        let mut sign = Scalar::one();
        match parser.peek() {
            Some(Token::Minus) => {
                parser.advance();
                sign = -&sign;
            }
            Some(Token::Plus) if !first => {
                parser.advance();
            }
            Some(_) if first => {}
            None if first => return Err(parser.err("element")),
            _ => return Err(parser.err("+ or -")),
        }
        // A term: product of scalar factors and at most one symbol.
        let mut coeff = sign;
        let mut sym: Option<BasisSymbol> = None;
        loop {
            match parser.peek().cloned() {
                Some(Token::Int(_)) => {
                    let r = parser.rational()?;
                    coeff = &coeff * &Scalar::new(r, BigRational::zero());
                }
                Some(Token::LParen) => {
                    parser.advance();
                    let s = parser.scalar_sum()?;
                    parser.expect(Token::RParen, ")")?;
                    coeff = &coeff * &s;
                }
                Some(Token::Ident(id)) if id == "i" => {
                    parser.advance();
                    coeff = &coeff * &Scalar::i();
                }
                Some(Token::Ident(id)) if matches!(id.as_str(), "L" | "I" | "C") => {
                    if sym.is_some() {
                        return Err(parser.err("a single symbol per term"));
                    }
                    parser.advance();
                    sym = Some(parser.basis_symbol(p, &id)?);
                }
                _ => return Err(parser.err("coefficient or symbol")),
            }
            if matches!(parser.peek(), Some(Token::Star)) {
                parser.advance();
                continue;
            }
            break;
        }
        match sym {
            Some(sym) => {
                out = out.add(&LieElement::from_term(p, sym, coeff)?)?;
            }
            None => {
                // A bare scalar term is only the zero element.
                if !coeff.is_zero() {
                    return Err(parser.err("symbol in term"));
                }
            }
        }
        first = false;
        match parser.peek() {
            None => break,
            Some(Token::Plus) | Some(Token::Minus) => continue,
            _ => return Err(parser.err("+ or -")),
        }
    }
    parser.expect_done()?;
    Ok(out)
}

/// Parses a univariate polynomial such as `3/2*t^2 + 1`.
pub fn parse_unipoly(input: &str) -> Result<UniPoly> {
    let mut parser = Parser::new(input)?;
    let mut out = UniPoly::zero();
    let mut first = true;
    loop {
        let mut sign = Scalar::one();
        match parser.peek() {
            Some(Token::Minus) => {
                parser.advance();
                sign = -&sign;
            }
            Some(Token::Plus) if !first => {
                parser.advance();
            }
            Some(_) if first => {}
            None if first => return Err(parser.err("polynomial")),
            _ => return Err(parser.err("+ or -")),
        }
        let mut coeff = sign;
        let mut exponent: u64 = 0;
        loop {
            match parser.peek().cloned() {
                Some(Token::Int(_)) => {
                    let r = parser.rational()?;
                    coeff = &coeff * &Scalar::new(r, BigRational::zero());
                }
                Some(Token::LParen) => {
                    parser.advance();
                    let s = parser.scalar_sum()?;
                    parser.expect(Token::RParen, ")")?;
                    coeff = &coeff * &s;
                }
                Some(Token::Ident(id)) if id == "i" => {
                    parser.advance();
                    coeff = &coeff * &Scalar::i();
                }
                Some(Token::Ident(id)) if id == "t" => {
                    parser.advance();
                    let e = if matches!(parser.peek(), Some(Token::Caret)) {
                        parser.advance();
                        u64::try_from(parser.unsigned_int()?).map_err(|_| parser.err("exponent"))?
                    } else {
                        1
                    };
                    exponent += e;
                }
                _ => return Err(parser.err("coefficient or t")),
            }
            if matches!(parser.peek(), Some(Token::Star)) {
                parser.advance();
                continue;
            }
            break;
        }
        out = out.add(&UniPoly::term(exponent, coeff));
        first = false;
        match parser.peek() {
            None => break,
            Some(Token::Plus) | Some(Token::Minus) => continue,
            _ => return Err(parser.err("+ or -")),
        }
    }
    parser.expect_done()?;
    Ok(out)
}

/// Parses a Fock polynomial such as `5*t[1,1]^2*t[2,1] + 1/16`.
pub fn parse_fockpoly(input: &str) -> Result<FockPoly> {
    let mut parser = Parser::new(input)?;
    let mut out = FockPoly::zero();
    let mut first = true;
    loop {
        let mut sign = Scalar::one();
        match parser.peek() {
            Some(Token::Minus) => {
                parser.advance();
                sign = -&sign;
            }
            Some(Token::Plus) if !first => {
                parser.advance();
            }
            Some(_) if first => {}
            None if first => return Err(parser.err("polynomial")),
            _ => return Err(parser.err("+ or -")),
        }
        let mut coeff = sign;
        let mut mono = FockMonomial::one();
        loop {
            match parser.peek().cloned() {
                Some(Token::Int(_)) => {
                    let r = parser.rational()?;
                    coeff = &coeff * &Scalar::new(r, BigRational::zero());
                }
                Some(Token::LParen) => {
                    parser.advance();
                    let s = parser.scalar_sum()?;
                    parser.expect(Token::RParen, ")")?;
                    coeff = &coeff * &s;
                }
                Some(Token::Ident(id)) if id == "i" => {
                    parser.advance();
                    coeff = &coeff * &Scalar::i();
                }
                Some(Token::Ident(id)) if id == "t" => {
                    parser.advance();
                    parser.expect(Token::LBracket, "[")?;
                    let n = parser.unsigned_u32("first index")?;
                    parser.expect(Token::Comma, ",")?;
                    let sup = parser.unsigned_u32("superscript")?;
                    parser.expect(Token::RBracket, "]")?;
                    if n == 0 {
                        return Err(Error::invalid("Fock variable first index must be >= 1"));
                    }
                    let e = if matches!(parser.peek(), Some(Token::Caret)) {
                        parser.advance();
                        u32::try_from(parser.unsigned_int()?).map_err(|_| parser.err("exponent"))?
                    } else {
                        1
                    };
                    mono = mono.mul_var(FockVar { n, sup }, e);
                }
                _ => return Err(parser.err("coefficient or t[n,i]")),
            }
            if matches!(parser.peek(), Some(Token::Star)) {
                parser.advance();
                continue;
            }
            break;
        }
        out = out.add(&FockPoly::term(mono, coeff));
        first = false;
        match parser.peek() {
            None => break,
            Some(Token::Plus) | Some(Token::Minus) => continue,
            _ => return Err(parser.err("+ or -")),
        }
    }
    parser.expect_done()?;
    Ok(out)
}

/// Parses a twisted generator: `N0(2)`, `N1(-1)`, `K(1)`.
pub fn parse_twisted(p: GapParameter, input: &str) -> Result<TwistedGenerator> {
    let mut parser = Parser::new(input)?;
    let g = match parser.advance() {
        Some(Token::Ident(id)) if id == "K" => {
            parser.expect(Token::LParen, "(")?;
            let j = parser.unsigned_u32("central index")?;
            parser.expect(Token::RParen, ")")?;
            TwistedGenerator::K(j)
        }
        Some(Token::Ident(id)) if id.starts_with('N') => {
            let sup: u32 = id[1..]
                .parse()
                .map_err(|_| parser.err("twisted generator N<sup>(m)"))?;
            parser.expect(Token::LParen, "(")?;
            let m = parser.signed_i64("integer index")?;
            parser.expect(Token::RParen, ")")?;
            if sup == 0 {
                TwistedGenerator::N0(m)
            } else {
                TwistedGenerator::Ni { sup, m }
            }
        }
        _ => return Err(parser.err("twisted generator")),
    };
    parser.expect_done()?;
    g.validate(p)?;
    Ok(g)
}
