//! The element grammar shared by the collector, the nilpotent products and the
//! relator lists of finite presentations.
//!
//! ```text
//! expr := ws (term ws)*
//! term := atom ("^" sint)?
//! atom := gen | "[" atom ("," atom)+ "]"
//! gen  := "x" uint            (1-based)
//! sint := "-"? digits
//! ```
//!
//! Brackets are left-normed: `[a,b,c] = [[a,b],c]`, with `[a,b] = a^-1 b^-1 a b`.
//! Two optional extensions: `xJ^2` inside brackets (labels of the special
//! 2-group basis) and, for relators, arbitrary powers inside brackets plus
//! parenthesised sub-products such as `(x1 x2)^4`.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketPowers {
    /// Plain atoms only.
    None,
    /// Generators may be squared inside brackets.
    SquaresOnly,
    /// Any signed power of any atom inside brackets.
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Syntax {
    pub bracket_powers: BracketPowers,
    pub parens: bool,
}

impl Syntax {
    pub const ELEMENT: Syntax = Syntax { bracket_powers: BracketPowers::None, parens: false };
    pub const SPECIAL: Syntax = Syntax { bracket_powers: BracketPowers::SquaresOnly, parens: false };
    pub const RELATOR: Syntax = Syntax { bracket_powers: BracketPowers::Any, parens: true };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Gen(usize),
    Bracket(Vec<Factor>),
    Paren(Vec<Factor>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub atom: Atom,
    pub exp: BigInt,
}

/// Anything the grammar can be evaluated in.
pub trait Evaluate {
    type Elem: Clone;
    type Error;
    fn identity(&self) -> Self::Elem;
    fn generator(&self, i: usize) -> Result<Self::Elem, Self::Error>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn pow(&self, a: &Self::Elem, n: &BigInt) -> Self::Elem;
    fn comm(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

pub fn evaluate<E: Evaluate>(ev: &E, factors: &[Factor]) -> Result<E::Elem, E::Error> {
    let mut acc = ev.identity();
    for f in factors {
        let v = eval_factor(ev, f)?;
        acc = ev.mul(&acc, &v);
    }
    Ok(acc)
}

fn eval_factor<E: Evaluate>(ev: &E, f: &Factor) -> Result<E::Elem, E::Error> {
    let base = match &f.atom {
        Atom::Gen(i) => ev.generator(*i)?,
        Atom::Paren(inner) => evaluate(ev, inner)?,
        Atom::Bracket(parts) => {
            let mut acc = eval_factor(ev, &parts[0])?;
            for p in &parts[1..] {
                let v = eval_factor(ev, p)?;
                acc = ev.comm(&acc, &v);
            }
            acc
        }
    };
    Ok(if f.exp.is_one() { base } else { ev.pow(&base, &f.exp) })
}

pub fn parse(src: &str, syntax: Syntax) -> Result<Vec<Factor>, SyntaxError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, syntax };
    let out = p.sequence(false)?;
    if p.pos < p.src.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    syntax: Syntax,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> SyntaxError {
        let found = match self.peek() {
            Some(c) => format!("{msg} (found '{}')", c as char),
            None => format!("{msg} (found end of input)"),
        };
        SyntaxError { pos: self.pos, msg: found }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn sequence(&mut self, in_paren: bool) -> Result<Vec<Factor>, SyntaxError> {
        let mut out = Vec::new();
        self.skip_ws();
        loop {
            match self.peek() {
                None => break,
                Some(b')') if in_paren => break,
                Some(_) => {
                    let atom = self.atom(false)?;
                    let exp = self.exponent(true)?;
                    out.push(Factor { atom, exp });
                    self.skip_ws();
                }
            }
        }
        Ok(out)
    }

    fn exponent(&mut self, allowed: bool) -> Result<BigInt, SyntaxError> {
        if self.peek() != Some(b'^') {
            return Ok(BigInt::one());
        }
        if !allowed {
            return Err(self.error("exponent not allowed here"));
        }
        self.pos += 1;
        self.sint()
    }

    fn sint(&mut self) -> Result<BigInt, SyntaxError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(text.parse().expect("validated digits"))
    }

    fn atom(&mut self, in_bracket: bool) -> Result<Atom, SyntaxError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.error("expected generator index"));
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match text.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(Atom::Gen(i)),
                    _ => Err(SyntaxError { pos: start, msg: format!("invalid generator index '{text}'") }),
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let mut parts = vec![self.bracket_entry()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.bracket_entry()?);
                }
                if parts.len() < 2 {
                    return Err(self.error("a bracket needs at least two entries"));
                }
                if self.peek() != Some(b']') {
                    return Err(self.error("expected ',' or ']'"));
                }
                self.pos += 1;
                Ok(Atom::Bracket(parts))
            }
            Some(b'(') if self.syntax.parens => {
                self.pos += 1;
                let inner = self.sequence(true)?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(Atom::Paren(inner))
            }
            _ => {
                let what = if in_bracket { "expected generator or bracket inside bracket" } else { "expected generator or bracket" };
                Err(self.error(what))
            }
        }
    }

    fn bracket_entry(&mut self) -> Result<Factor, SyntaxError> {
        if self.syntax.parens {
            self.skip_ws();
        }
        let atom = self.atom(true)?;
        let exp = match (self.syntax.bracket_powers, &atom) {
            (BracketPowers::None, _) => self.exponent(false)?,
            (BracketPowers::SquaresOnly, Atom::Gen(_)) => {
                let at = self.pos;
                let e = self.exponent(true)?;
                if e != BigInt::one() && e != BigInt::from(2) {
                    return Err(SyntaxError { pos: at, msg: "only squared generators may appear inside brackets".into() });
                }
                e
            }
            (BracketPowers::SquaresOnly, _) => self.exponent(false)?,
            (BracketPowers::Any, _) => self.exponent(true)?,
        };
        if self.syntax.parens {
            self.skip_ws();
        }
        Ok(Factor { atom, exp })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(i: usize) -> Factor {
        Factor { atom: Atom::Gen(i), exp: BigInt::one() }
    }

    #[test]
    fn parses_terms() {
        let f = parse("x2^2 [x2,x1]^3", Syntax::ELEMENT).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].exp, BigInt::from(2));
        assert_eq!(f[1].atom, Atom::Bracket(vec![gen(2), gen(1)]));
        assert_eq!(f[1].exp, BigInt::from(3));
        assert!(parse("", Syntax::ELEMENT).unwrap().is_empty());
        assert!(parse("   ", Syntax::ELEMENT).unwrap().is_empty());
        assert_eq!(parse("x1x2^-3", Syntax::ELEMENT).unwrap()[1].exp, BigInt::from(-3));
    }

    #[test]
    fn nested_brackets() {
        let f = parse("[x3,x1,[x2,x1]]", Syntax::ELEMENT).unwrap();
        let Atom::Bracket(parts) = &f[0].atom else { panic!() };
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[2].atom, Atom::Bracket(vec![gen(2), gen(1)]));
    }

    #[test]
    fn squares_only_in_special_syntax() {
        assert!(parse("[x2^2,x1]", Syntax::ELEMENT).is_err());
        assert!(parse("[x2^2,x1]", Syntax::SPECIAL).is_ok());
        assert!(parse("[x2,x1^2]", Syntax::SPECIAL).is_ok());
        let err = parse("[x2^3,x1]", Syntax::SPECIAL).unwrap_err();
        assert_eq!(err.pos, 3);
    }

    #[test]
    fn relator_syntax() {
        let f = parse("(x1 x2)^4", Syntax::RELATOR).unwrap();
        assert_eq!(f[0].exp, BigInt::from(4));
        assert!(parse("(x1 x2)^4", Syntax::ELEMENT).is_err());
        assert!(parse("[x1^-1, x2^3]", Syntax::RELATOR).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("x1 y2", Syntax::ELEMENT).unwrap_err().pos, 3);
        assert_eq!(parse("[x1]", Syntax::ELEMENT).unwrap_err().pos, 3);
        assert_eq!(parse("[x1,x2", Syntax::ELEMENT).unwrap_err().pos, 6);
        assert_eq!(parse("x0", Syntax::ELEMENT).unwrap_err().pos, 1);
        assert_eq!(parse("x1^", Syntax::ELEMENT).unwrap_err().pos, 3);
        assert_eq!(parse("x1^-", Syntax::ELEMENT).unwrap_err().pos, 4);
    }
}
