//! Text form: terms `coeff*var^k*...` in canonical order joined by ` + ` / ` - `.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use super::{parse_rational, LaurentPoly, ScalarError, Universe};

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (exps, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut first = true;
            let has_vars = exps.iter().any(|&k| k != 0);
            if !mag.is_one() || !has_vars {
                write!(f, "{mag}")?;
                first = false;
            }
            for (v, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&self.universe.names()[v])?;
                if k != 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    universe: &'a Arc<Universe>,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> ScalarError {
        ScalarError::Parse {
            text: self.src.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<i32, ScalarError> {
        self.skip_ws();
        let paren = self.eat('(');
        self.skip_ws();
        let neg = self.eat('-');
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        let k: i32 = digits
            .parse()
            .map_err(|_| self.err("expected integer exponent"))?;
        if paren && !self.eat(')') {
            return Err(self.err("unclosed exponent parenthesis"));
        }
        Ok(if neg { -k } else { k })
    }

    fn factor(&mut self) -> Result<LaurentPoly, ScalarError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut text = self
                    .take_while(|c| c.is_ascii_digit() || c == '.')
                    .to_string();
                // a `/` directly followed by digits continues the rational literal
                let save = self.pos;
                self.skip_ws();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.take_while(|c| c.is_ascii_digit());
                    if d.is_empty() {
                        self.pos = save;
                    } else {
                        text.push('/');
                        text.push_str(d);
                    }
                } else {
                    self.pos = save;
                }
                let v = parse_rational(&text)
                    .ok_or_else(|| self.err(format!("bad number `{text}`")))?;
                Ok(LaurentPoly::constant(self.universe, v))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                let v = self.universe.var(name)?;
                let k = if self.eat('^') { self.integer()? } else { 1 };
                Ok(LaurentPoly::var_pow(self.universe, v, k))
            }
            Some('(') => {
                self.pos += 1;
                let p = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("unclosed parenthesis"));
                }
                if self.eat('^') {
                    let k = self.integer()?;
                    return p
                        .pow(k)
                        .ok_or_else(|| self.err("negative power of a non-monomial"));
                }
                Ok(p)
            }
            _ => Err(self.err(format!("unexpected input at byte {}", self.pos))),
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ScalarError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<LaurentPoly, ScalarError> {
        self.skip_ws();
        let mut acc = LaurentPoly::zero(self.universe);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(acc)
    }
}

impl LaurentPoly {
    /// Parse the text form produced by `Display`; also accepts parentheses,
    /// `^(-k)`, decimals and arbitrary spacing.
    pub fn parse(universe: &Arc<Universe>, text: &str) -> Result<Self, ScalarError> {
        let mut p = Parser {
            src: text,
            pos: 0,
            universe,
        };
        let out = p.sum()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err(format!("trailing input at byte {}", p.pos)));
        }
        Ok(out)
    }
}
