//! Textual expression syntax used by the command line:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' uint)?
//! atom   := number | 'i' | 'hbar' | ident | '(' expr ')'
//! ```
//!
//! `i` and `hbar` are reserved scalars; numbers are decimal literals and are
//! parsed into exact rationals. Division is defined only by nonzero ħ-free
//! scalar expressions, which is what lets rational coefficients like `3/4`
//! round-trip through the printer.

use super::{expand, NCExpr};
use crate::scalar::Scalar;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("parse error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Scalar),
    Ident(String),
    ImaginaryUnit,
    Hbar,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let mut tokens = Vec::new();
        while let Some((col, tok)) = lexer.next_token()? {
            tokens.push((col, tok));
        }
        Ok(tokens)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let col = start + 1;
        let ch = bytes[self.pos];
        let tok = match ch {
            b'+' => {
                self.pos += 1;
                Token::Plus
            }
            b'-' => {
                self.pos += 1;
                Token::Minus
            }
            b'*' => {
                self.pos += 1;
                Token::Star
            }
            b'/' => {
                self.pos += 1;
                Token::Slash
            }
            b'^' => {
                self.pos += 1;
                Token::Caret
            }
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                let mut seen_exp = false;
                while end < bytes.len() {
                    let c = bytes[end];
                    let in_number = c.is_ascii_digit()
                        || c == b'.'
                        || ((c == b'e' || c == b'E') && !seen_exp && end > self.pos)
                        || ((c == b'+' || c == b'-')
                            && end > self.pos
                            && (bytes[end - 1] == b'e' || bytes[end - 1] == b'E'));
                    if !in_number {
                        break;
                    }
                    if c == b'e' || c == b'E' {
                        seen_exp = true;
                    }
                    end += 1;
                }
                let text = &self.src[self.pos..end];
                self.pos = end;
                let value = Scalar::from_decimal_str(text).ok_or_else(|| ParseError {
                    column: col,
                    message: format!("invalid number literal '{text}'"),
                })?;
                Token::Number(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let text = &self.src[self.pos..end];
                self.pos = end;
                match text {
                    "i" => Token::ImaginaryUnit,
                    "hbar" => Token::Hbar,
                    _ => Token::Ident(text.to_string()),
                }
            }
            other => {
                return Err(ParseError {
                    column: col,
                    message: format!("unexpected character '{}'", other as char),
                })
            }
        };
        Ok(Some((col, tok)))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    index: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.index)
            .map(|(c, _)| *c)
            .unwrap_or(self.end_column)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.index).map(|(_, t)| t.clone());
        self.index += 1;
        tok
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.index += 1;
            Ok(())
        } else {
            Err(ParseError {
                column: self.column(),
                message: format!("expected {what}"),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<NCExpr, ParseError> {
        let mut items = vec![self.parse_term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.index += 1;
                    items.push(self.parse_term()?);
                }
                Some(Token::Minus) => {
                    self.index += 1;
                    items.push(NCExpr::Negate(Box::new(self.parse_term()?)));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            NCExpr::Sum(items)
        })
    }

    fn parse_term(&mut self) -> Result<NCExpr, ParseError> {
        let mut items = vec![self.parse_unary()?];
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.index += 1;
                    items.push(self.parse_unary()?);
                }
                Some(Token::Slash) => {
                    self.index += 1;
                    let col = self.column();
                    let divisor = self.parse_unary()?;
                    let expanded = expand(&divisor);
                    let inverse = expanded
                        .constant_part()
                        .try_inverse()
                        .filter(|_| expanded.is_scalar())
                        .ok_or_else(|| ParseError {
                            column: col,
                            message: "division is only defined by a nonzero hbar-free scalar"
                                .into(),
                        })?;
                    items.push(NCExpr::Scalar(inverse));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            NCExpr::Product(items)
        })
    }

    fn parse_unary(&mut self) -> Result<NCExpr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.index += 1;
            return Ok(NCExpr::Negate(Box::new(self.parse_unary()?)));
        }
        self.parse_factor()
    }

    fn parse_factor(&mut self) -> Result<NCExpr, ParseError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.index += 1;
            let col = self.column();
            match self.bump() {
                Some(Token::Number(c)) => {
                    let exponent = scalar_to_uint(&c).ok_or_else(|| ParseError {
                        column: col,
                        message: "exponent must be a small non-negative integer".into(),
                    })?;
                    return Ok(NCExpr::Power(Box::new(base), exponent));
                }
                _ => {
                    return Err(ParseError {
                        column: col,
                        message: "expected integer exponent after '^'".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<NCExpr, ParseError> {
        let col = self.column();
        match self.bump() {
            Some(Token::Number(c)) => Ok(NCExpr::Scalar(c)),
            Some(Token::ImaginaryUnit) => Ok(NCExpr::Scalar(Scalar::i())),
            Some(Token::Hbar) => Ok(NCExpr::Scalar(Scalar::hbar_pow(1))),
            Some(Token::Ident(name)) => Ok(NCExpr::Symbol(name)),
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen, "closing ')'")?;
                Ok(inner)
            }
            _ => Err(ParseError {
                column: col,
                message: "expected a number, symbol, or '('".into(),
            }),
        }
    }
}

fn scalar_to_uint(c: &Scalar) -> Option<u32> {
    let mut terms = c.terms();
    let (pow, coeff) = terms.next()?;
    if terms.next().is_some() || pow != 0 || !coeff.im.is_zero() {
        return None;
    }
    if !coeff.re.is_integer() || coeff.re.numer().sign() == num_bigint::Sign::Minus {
        return None;
    }
    coeff.re.numer().to_string().parse().ok()
}

/// Parses the textual syntax into an expression tree.
pub fn parse_expression(src: &str) -> Result<NCExpr, ParseError> {
    let tokens = Lexer::tokenize(src)?;
    let end_column = src.len() + 1;
    let mut parser = Parser {
        tokens,
        index: 0,
        end_column,
    };
    let expr = parser.parse_expr()?;
    if parser.index != parser.tokens.len() {
        return Err(ParseError {
            column: parser.column(),
            message: "trailing input after expression".into(),
        });
    }
    Ok(expr)
}

/// Parses and expands in one step.
pub fn parse_polynomial(src: &str) -> Result<super::NCPolynomial, ParseError> {
    Ok(super::expand(&parse_expression(src)?))
}
