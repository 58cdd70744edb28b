//! Multivariate polynomials over an exact field.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    Lex,
}

/// Exponent vector, one entry per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn from_slice(e: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Grevlex => {
                let (da, db) = (a.degree(), b.degree());
                if da != db {
                    return da.cmp(&db);
                }
                for (x, y) in a.0.iter().zip(b.0.iter()).rev() {
                    if x != y {
                        // smaller exponent in the last differing variable wins
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::Grevlex => "grevlex",
            MonomialOrder::Lex => "lex",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "grevlex" => Ok(MonomialOrder::Grevlex),
            "lex" => Ok(MonomialOrder::Lex),
            _ => Err(Error::Parse(format!("unknown monomial order {s:?}"))),
        }
    }
}

/// Ring context: variable names, coefficient field and monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub vars: Vec<String>,
    pub field: Field,
    pub order: MonomialOrder,
}

pub type RingRef = Arc<Ring>;

impl Ring {
    pub fn new(vars: &[&str], field: Field, order: MonomialOrder) -> RingRef {
        Arc::new(Ring {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            field,
            order,
        })
    }

    /// `Q[x, y]` with grevlex, the default ambient ring for the toolkit.
    pub fn qxy() -> RingRef {
        Ring::new(&["x", "y"], Field::Rational, MonomialOrder::Grevlex)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
}

pub(crate) fn same_ring(a: &RingRef, b: &RingRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_ring(a: &RingRef, b: &RingRef) -> Result<()> {
    if same_ring(a, b) {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub mono: Monomial,
    pub coeff: Scalar,
}

/// A polynomial in canonical form: terms sorted by decreasing monomial,
/// no zero coefficients.
#[derive(Clone)]
pub struct Polynomial {
    ring: RingRef,
    terms: Vec<Term>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state)
    }
}

impl Polynomial {
    pub fn zero(ring: &RingRef) -> Self {
        Polynomial { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn one(ring: &RingRef) -> Self {
        Self::constant(ring, ring.field.one())
    }

    pub fn constant(ring: &RingRef, c: Scalar) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn from_i64(ring: &RingRef, c: i64) -> Self {
        Self::constant(ring, ring.field.from_i64(c))
    }

    pub fn monomial(ring: &RingRef, mono: Monomial, coeff: Scalar) -> Self {
        if ring.field.is_zero(&coeff) {
            return Self::zero(ring);
        }
        Polynomial { ring: ring.clone(), terms: vec![Term { mono, coeff }] }
    }

    pub fn var(ring: &RingRef, i: usize) -> Self {
        Self::monomial(ring, Monomial::var(ring.nvars(), i, 1), ring.field.one())
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates and sorting.
    pub fn from_terms(ring: &RingRef, mut terms: Vec<Term>) -> Self {
        let order = ring.order;
        terms.sort_by(|a, b| order.cmp(&b.mono, &a.mono));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.mono == t.mono => {
                    last.coeff = ring.field.add(&last.coeff, &t.coeff);
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !ring.field.is_zero(&t.coeff));
        Polynomial { ring: ring.clone(), terms: out }
    }

    /// Trusts the caller that `terms` is already canonical.
    pub(crate) fn from_sorted(ring: &RingRef, terms: Vec<Term>) -> Self {
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.mono.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].mono.is_one() && self.ring.field.is_one(&self.terms[0].coeff)
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.mono.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some(t) => {
                let d = t.mono.degree();
                self.terms.iter().all(|s| s.mono.degree() == d)
            }
        }
    }

    /// Re-sorts and re-combines the terms; a no-op on canonical input.
    pub fn normalized(&self) -> Self {
        Self::from_terms(&self.ring, self.terms.clone())
    }

    pub fn neg(&self) -> Self {
        let f = &self.ring.field;
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { mono: t.mono.clone(), coeff: f.neg(&t.coeff) })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return Self::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { mono: t.mono.clone(), coeff: f.mul(&t.coeff, c) })
                .collect(),
        }
    }

    pub fn mul_term(&self, mono: &Monomial, c: &Scalar) -> Self {
        let f = &self.ring.field;
        if f.is_zero(c) {
            return Self::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { mono: t.mono.mul(mono), coeff: f.mul(&t.coeff, c) })
                .collect(),
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let f = &self.ring.field;
        let order = self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: &Scalar| if negate_other { f.neg(c) } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match order.cmp(&a.mono, &b.mono) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(Term { mono: b.mono.clone(), coeff: fix(&b.coeff) });
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { f.sub(&a.coeff, &b.coeff) } else { f.add(&a.coeff, &b.coeff) };
                    if !f.is_zero(&c) {
                        out.push(Term { mono: a.mono.clone(), coeff: c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|b| Term { mono: b.mono.clone(), coeff: fix(&b.coeff) }));
        Polynomial { ring: self.ring.clone(), terms: out }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_ring(&self.ring, &other.ring)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_ring(&self.ring, &other.ring)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_ring(&self.ring, &other.ring)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ring));
        }
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        let mut acc = Self::zero(&self.ring);
        for t in &small.terms {
            acc = acc.merge(&big.mul_term(&t.mono, &t.coeff), false);
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(&self.ring);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            None => self.clone(),
            Some(t) => self.scale(&self.ring.field.inv(&t.coeff)),
        }
    }

    /// Moves the polynomial into another ring with the same variables,
    /// reducing rational coefficients modulo the target characteristic.
    pub fn change_field(&self, target: &RingRef) -> Result<Self> {
        if target.vars.len() != self.ring.vars.len() {
            return Err(Error::RingMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c = match &target.field {
                    Field::Prime(p) => Field::reduce_mod(&t.coeff, *p)
                        .ok_or_else(|| Error::Field(format!("denominator divisible by {p}")))?,
                    Field::Rational => match &t.coeff {
                        Scalar::Rat(_) => t.coeff.clone(),
                        Scalar::Mod(_) => return Err(Error::Field("cannot lift residues to Q".into())),
                    },
                };
                Ok(Term { mono: t.mono.clone(), coeff: c })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(target, terms))
    }

    /// Checks canonical form: sorted strictly decreasing, nonzero coefficients in the field.
    pub fn is_canonical(&self) -> bool {
        let order = self.ring.order;
        let n = self.ring.nvars();
        self.terms.iter().all(|t| t.mono.0.len() == n && !self.ring.field.is_zero(&t.coeff) && self.ring.field.belongs(&t.coeff))
            && self.terms.windows(2).all(|w| order.cmp(&w[0].mono, &w[1].mono) == Ordering::Greater)
    }
}

/// Exact product of two polynomials over the same ring.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    a.checked_mul(b)
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("ring mismatch in polynomial addition")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("ring mismatch in polynomial subtraction")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("ring mismatch in polynomial multiplication")
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.ring.field;
        for (k, t) in self.terms.iter().enumerate() {
            let s = t.coeff.to_string();
            let (neg, abs) = match &t.coeff {
                Scalar::Rat(_) if s.starts_with('-') => (true, s[1..].to_string()),
                _ => (false, s),
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in t.mono.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars[i], e)),
                }
            }
            let unit = abs == "1";
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if unit {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, factors.join("*"))?;
            }
            let _ = field;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    ring: &'a RingRef,
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {} in {:?}", self.pos, String::from_utf8_lossy(self.src)))
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

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.ring);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
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

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.parse().map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn base(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let mut s = self.integer()?;
                if self.pos < self.src.len() && self.src[self.pos] == b'/' {
                    self.pos += 1;
                    s.push('/');
                    s.push_str(&self.integer()?);
                }
                Ok(Polynomial::constant(self.ring, self.ring.field.parse(&s)?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let i = self
                    .ring
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(Polynomial::var(self.ring, i))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl Ring {
    /// Parses expressions such as `"x^2 + 3/2*x*y - (y+1)^3"`.
    pub fn parse(self: &RingRef, s: &str) -> Result<Polynomial> {
        let mut p = Parser { ring: self, src: s.as_bytes(), pos: 0 };
        let r = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(r)
    }

    /// Like [`Ring::parse`] but panics; meant for literals in tests and tables.
    pub fn p(self: &RingRef, s: &str) -> Polynomial {
        self.parse(s).unwrap_or_else(|e| panic!("{e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_order() {
        let r = Ring::qxy();
        // x*y > y^2 > x > y
        let p = r.p("y + x + y^2 + x*y");
        let monos: Vec<_> = p.terms().iter().map(|t| t.mono.0.to_vec()).collect();
        assert_eq!(monos, vec![vec![1, 1], vec![0, 2], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn lex_order() {
        let r = Ring::new(&["x", "y"], Field::Rational, MonomialOrder::Lex);
        let p = r.p("y^5 + x");
        assert_eq!(p.leading_term().unwrap().mono.0.to_vec(), vec![1, 0]);
    }

    #[test]
    fn difference_of_squares() {
        let r = Ring::qxy();
        assert_eq!(&r.p("x+y") * &r.p("x-y"), r.p("x^2 - y^2"));
    }

    #[test]
    fn identity_product() {
        let r = Ring::qxy();
        let f = r.p("x^3 - 2/3*x*y + 7");
        assert_eq!(poly_mul(&f, &Polynomial::one(&r)).unwrap(), f);
    }

    #[test]
    fn a2_a4_product() {
        let r = Ring::qxy();
        let prod = &r.p("x^2+y^3") * &r.p("x^2+y^5");
        assert_eq!(prod, r.p("x^4 + x^2*y^5 + x^2*y^3 + y^8"));
        assert_eq!(prod.terms().len(), 4);
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = Ring::qxy();
        let b = Ring::new(&["x", "y", "z"], Field::Rational, MonomialOrder::Grevlex);
        assert_eq!(poly_mul(&a.p("x"), &b.p("z")), Err(Error::RingMismatch));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let r = Ring::qxy();
        let p = r.p("-3/2*x^2*y + y^4 - 1");
        assert_eq!(p.to_string(), "y^4 - 3/2*x^2*y - 1");
        assert_eq!(r.p(&p.to_string()), p);
    }

    #[test]
    fn parse_errors_carry_position() {
        let r = Ring::qxy();
        let e = r.parse("x + * y").unwrap_err();
        assert!(matches!(e, Error::Parse(ref m) if m.contains("position")));
        assert!(r.parse("z").is_err());
    }
}
