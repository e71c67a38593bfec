//! Parser for expressions in Ũ: sums of noncommutative products of t, the
//! generators of L, base variables and rational constants.

use exactalg::{Poly, Rat};

use crate::{ReesAlgebra, ReesElement, ReesError};

pub(crate) fn parse(alg: &ReesAlgebra, src: &str) -> Result<ReesElement, ReesError> {
    let mut p = P { alg, s: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct P<'a> {
    alg: &'a ReesAlgebra,
    s: &'a [u8],
    pos: usize,
}

impl P<'_> {
    fn err(&self, msg: &str) -> ReesError {
        ReesError::Parse(format!("{msg} at byte {} in `{}`", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn constant(&self, c: Rat) -> ReesElement {
        ReesElement::term(Poly::constant(c), self.alg.one())
    }

    fn expr(&mut self) -> Result<ReesElement, ReesError> {
        let mut acc = ReesElement::zero();
        let mut sign = 1i64;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ReesElement, ReesError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let r = self.power()?;
                    acc = self.alg.mul(&acc, &r);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = (d.terms.len() == 1)
                        .then(|| d.terms.iter().next().unwrap())
                        .filter(|(m, _)| m.iter().all(|&e| e == 0))
                        .and_then(|(_, f)| f.as_constant())
                        .ok_or_else(|| self.err("division by a non-constant"))?;
                    acc = acc.scale(&c.recip());
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'_' => {
                    let r = self.power()?;
                    acc = self.alg.mul(&acc, &r);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<ReesElement, ReesError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected exponent"))?;
            let mut acc = ReesElement::monomial(self.alg.one());
            for _ in 0..e {
                acc = self.alg.mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ReesElement, ReesError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: Rat = std::str::from_utf8(&self.s[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("bad integer"))?;
                Ok(self.constant(n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                if let Some(g) = self.alg.generator_names().iter().position(|x| x == name) {
                    return Ok(self.alg.gen_element(g));
                }
                if let Some(v) = self.alg.presentation().base.variables().iter().position(|x| x == name) {
                    return Ok(ReesElement::term(Poly::var(v), self.alg.one()));
                }
                self.pos = start;
                Err(self.err(&format!("unknown symbol `{name}`")))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}
