//! Sparse distributed polynomials over ℚ in graded-lex order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::{ExactAlgError, Rat};

/// Exponent vector with trailing zeros trimmed, so monomials compare equal
/// regardless of how many variables the caller had in mind.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Vec<u32>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        let mut v = exps.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        Mono(v)
    }

    pub fn var(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Mono(v)
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let len = self.0.len().max(other.0.len());
        let v: Vec<u32> = (0..len).map(|i| self.exp(i) + other.exp(i)).collect();
        Mono::from_exps(&v)
    }

    /// Number of variables actually used (index of last nonzero exponent + 1).
    pub fn support_len(&self) -> usize {
        self.0.len()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.0.len().max(other.0.len());
            for i in 0..len {
                match self.exp(i).cmp(&other.exp(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in ℚ[x_0, x_1, ...]. Only nonzero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(Rat::from_integer(c.into()))
    }

    pub fn var(i: usize) -> Self {
        Poly::term(Rat::one(), Mono::var(i))
    }

    pub fn term(c: Rat, m: Mono) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Rat)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * m * other`
    pub fn add_scaled(&mut self, c: &Rat, m: &Mono, other: &Poly) {
        if c.is_zero() {
            return;
        }
        for (mo, co) in &other.terms {
            self.add_term(m.mul(mo), c * co);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        if self.is_constant() {
            self.terms.get(&Mono::one()).cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rat {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Largest variable index used plus one.
    pub fn num_vars_used(&self) -> usize {
        self.terms.keys().map(|m| m.support_len()).max().unwrap_or(0)
    }

    pub fn is_univariate(&self) -> bool {
        self.num_vars_used() <= 1
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut v = m.exps().to_vec();
            v[i] -= 1;
            out.add_term(Mono::from_exps(&v), c * Rat::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(Rat::zero);
                    t *= num_traits::pow(x, e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute `value` for variable `i`, keeping the other variables.
    pub fn substitute(&self, i: usize, value: &Rat) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            let mut v = m.exps().to_vec();
            if e > 0 {
                v[i] = 0;
            }
            out.add_term(Mono::from_exps(&v), c * num_traits::pow(value.clone(), e as usize));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    // ---- univariate helpers (variable 0) ----

    /// Degree in the single variable; panics on multivariate input in debug builds.
    pub fn udeg(&self) -> Option<u32> {
        debug_assert!(self.is_univariate());
        self.terms.keys().next_back().map(|m| m.exp(0))
    }

    pub fn ulead(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.ulead();
        self.scale(&lc.recip())
    }

    /// Euclidean division in ℚ[x].
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), ExactAlgError> {
        if !self.is_univariate() || !d.is_univariate() {
            return Err(ExactAlgError::UnsupportedBase {
                op: "univariate division",
                required: "a univariate polynomial ring",
            });
        }
        if d.is_zero() {
            return Err(ExactAlgError::DivisionByZero);
        }
        let dd = d.udeg().unwrap();
        let dl = d.ulead();
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some(rd) = r.udeg() {
            if rd < dd {
                break;
            }
            let c = r.ulead() / &dl;
            let m = Mono::from_exps(&[rd - dd]);
            q.add_term(m.clone(), c.clone());
            r.add_scaled(&(-c), &m, d);
        }
        Ok((q, r))
    }

    /// Monic gcd in ℚ[x].
    pub fn gcd(&self, other: &Poly) -> Result<Poly, ExactAlgError> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn divides(&self, other: &Poly) -> Result<bool, ExactAlgError> {
        if self.is_zero() {
            return Ok(other.is_zero());
        }
        Ok(other.div_rem(self)?.1.is_zero())
    }

    /// Exact division in any number of variables; errors if `d` does not
    /// divide `self`. Uses leading-term division, which is exact whenever the
    /// quotient exists.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly, ExactAlgError> {
        if let Some(c) = d.as_constant() {
            if c.is_zero() {
                return Err(ExactAlgError::DivisionByZero);
            }
            return Ok(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let len = rm.support_len().max(dm.support_len());
            let mut e = Vec::with_capacity(len);
            for i in 0..len {
                if rm.exp(i) < dm.exp(i) {
                    return Err(ExactAlgError::NotDivisible);
                }
                e.push(rm.exp(i) - dm.exp(i));
            }
            let m = Mono::from_exps(&e);
            let c = rc / &dc;
            q.add_term(m.clone(), c.clone());
            r.add_scaled(&(-c), &m, d);
        }
        Ok(q)
    }

    /// Render with the given variable names (falls back to `x{i}`).
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parse a polynomial such as `2*x^2 - y/3 + (x+1)^2` in the named variables.
    pub fn parse(src: &str, names: &[String]) -> Result<Poly, ExactAlgError> {
        let mut p = Parser { s: src.as_bytes(), pos: 0, names };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_scaled(c, m, rhs);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExactAlgError {
        ExactAlgError::Parse(format!(
            "{msg} at byte {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.s)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ExactAlgError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ExactAlgError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = d.as_constant().ok_or_else(|| self.err("division by a non-constant"))?;
                    if c.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&c.recip());
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'_' => {
                    // implicit multiplication, e.g. `2x`
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ExactAlgError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ExactAlgError> {
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
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let n: num_bigint::BigInt = txt.parse().map_err(|_| self.err("bad integer"))?;
                Ok(Poly::constant(Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match self.names.iter().position(|n| n == name) {
                    Some(i) => Ok(Poly::var(i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let x = Mono::var(0);
        let y = Mono::var(1);
        let x2 = x.mul(&x);
        let xy = x.mul(&y);
        assert!(x < y.mul(&y));
        assert!(y < x);
        assert!(xy < x2);
        assert!(Mono::one() < y);
    }

    #[test]
    fn parse_and_print_roundtrip() {
        let n = names(&["x", "y"]);
        let p = Poly::parse("2*x^2 - y/3 + (x+1)^2", &n).unwrap();
        let expected = Poly::from_terms([
            (Mono::from_exps(&[2]), r(3, 1)),
            (Mono::from_exps(&[1]), r(2, 1)),
            (Mono::from_exps(&[0, 1]), r(-1, 3)),
            (Mono::one(), r(1, 1)),
        ]);
        assert_eq!(p, expected);
        let back = Poly::parse(&p.display_with(&n), &n).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_rejects_unknown_variable() {
        assert!(Poly::parse("x + z", &names(&["x"])).is_err());
    }

    #[test]
    fn derivative_of_monomial() {
        let n = names(&["x", "y"]);
        let p = Poly::parse("x^3*y^2 + 5*y", &n).unwrap();
        assert_eq!(p.derivative(0), Poly::parse("3*x^2*y^2", &n).unwrap());
        assert_eq!(p.derivative(1), Poly::parse("2*x^3*y + 5", &n).unwrap());
    }

    #[test]
    fn division_and_gcd() {
        let n = names(&["x"]);
        let a = Poly::parse("x^3 - x", &n).unwrap();
        let b = Poly::parse("x^2 + x", &n).unwrap();
        assert_eq!(a.gcd(&b).unwrap(), Poly::parse("x^2 + x", &n).unwrap());
        let (q, rem) = a.div_rem(&Poly::parse("x - 2", &n).unwrap()).unwrap();
        assert_eq!(rem, Poly::from_int(6));
        assert_eq!(q, Poly::parse("x^2 + 2*x + 3", &n).unwrap());
    }

    #[test]
    fn eval_and_substitute_agree() {
        let n = names(&["x", "y"]);
        let p = Poly::parse("x^2*y - 3*y + 1", &n).unwrap();
        let v = p.eval(&[r(2, 1), r(1, 2)]);
        assert_eq!(v, r(3, 2));
        let s = p.substitute(0, &r(2, 1));
        assert_eq!(s.eval(&[r(0, 1), r(1, 2)]), v);
    }
}
