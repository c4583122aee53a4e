use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Encoded element of F_q: the integer `sum c_i p^i` of its coefficient vector.
pub type Digit = u16;

const MAX_Q: u64 = 1024;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^t`, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut t = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        t += 1;
    }
    (rest == 1).then_some((p as u32, t))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqSpec {
    p: u32,
    t: u32,
    /// Coefficients `c_0, ..., c_t` of the monic modulus.
    modulus: Vec<u32>,
}

impl FqSpec {
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn t(&self) -> u32 {
        self.t
    }
    pub fn q(&self) -> u32 {
        self.p.pow(self.t)
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
}

impl fmt::Display for FqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{} mod ", self.q())?;
        let mut first = true;
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
struct Tables {
    spec: FqSpec,
    q: usize,
    add: Vec<Digit>,
    mul: Vec<Digit>,
    neg: Vec<Digit>,
    inv: Vec<Digit>,
}

/// A finite field F_q with precomputed operation tables.
#[derive(Debug, Clone)]
pub struct Fq {
    tables: Arc<Tables>,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tables, &other.tables) || self.tables.spec == other.tables.spec
    }
}
impl Eq for Fq {}

fn to_coeffs(mut v: usize, p: usize, t: usize) -> Vec<usize> {
    let mut c = vec![0; t];
    for slot in c.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    c
}

fn from_coeffs(c: &[usize], p: usize) -> usize {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p.
fn poly_rem(mut a: Vec<usize>, m: &[usize], p: usize) -> Vec<usize> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for (i, &c) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - (lead * c) % p) % p;
        }
    }
    a
}

fn is_irreducible(m: &[usize], p: usize) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        for enc in 0..p.pow(d as u32) {
            let mut f = to_coeffs(enc, p, d);
            f.push(1);
            if poly_rem(m.to_vec(), &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Builds F_{p^t} with the least monic irreducible modulus, ordered by the
/// integer encoding of its lower coefficients.
pub fn make_field(p: u32, t: u32) -> Result<Fq> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if t < 1 {
        return Err(Error::InvalidParameter("field degree must be at least 1".into()));
    }
    let q = (p as u64).checked_pow(t).filter(|&q| q <= MAX_Q);
    let q = q.ok_or(Error::FieldTooLarge((p as u64).saturating_pow(t)))? as usize;
    let (pu, tu) = (p as usize, t as usize);
    let modulus = (0..q)
        .map(|enc| {
            let mut m = to_coeffs(enc, pu, tu);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, pu))
        .expect("an irreducible polynomial exists in every degree");

    let coeffs: Vec<Vec<usize>> = (0..q).map(|v| to_coeffs(v, pu, tu)).collect();
    let mut add = vec![0; q * q];
    let mut mul = vec![0; q * q];
    for a in 0..q {
        for b in 0..q {
            let s: Vec<usize> = (0..tu).map(|i| (coeffs[a][i] + coeffs[b][i]) % pu).collect();
            add[a * q + b] = from_coeffs(&s, pu) as Digit;
            let mut prod = vec![0; 2 * tu - 1];
            for i in 0..tu {
                for j in 0..tu {
                    prod[i + j] = (prod[i + j] + coeffs[a][i] * coeffs[b][j]) % pu;
                }
            }
            let r = poly_rem(prod, &modulus, pu);
            let mut r = r;
            r.resize(tu, 0);
            mul[a * q + b] = from_coeffs(&r, pu) as Digit;
        }
    }
    let neg = (0..q).map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Digit).collect();
    let inv =
        (0..q).map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as Digit }).collect();
    let spec = FqSpec { p, t, modulus: modulus.iter().map(|&c| c as u32).collect() };
    Ok(Fq { tables: Arc::new(Tables { spec, q, add, mul, neg, inv }) })
}

impl Fq {
    pub fn spec(&self) -> &FqSpec {
        &self.tables.spec
    }
    pub fn p(&self) -> u32 {
        self.tables.spec.p
    }
    pub fn t(&self) -> u32 {
        self.tables.spec.t
    }
    pub fn q(&self) -> u32 {
        self.tables.q as u32
    }

    #[inline]
    pub fn add(&self, a: Digit, b: Digit) -> Digit {
        self.tables.add[a as usize * self.tables.q + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: Digit, b: Digit) -> Digit {
        self.tables.mul[a as usize * self.tables.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Digit) -> Digit {
        self.tables.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: Digit, b: Digit) -> Digit {
        self.add(a, self.neg(b))
    }
    pub fn inv(&self, a: Digit) -> Option<Digit> {
        (a != 0).then(|| self.tables.inv[a as usize])
    }

    pub fn pow(&self, a: Digit, mut e: u64) -> Digit {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Digit {
        n.rem_euclid(self.p() as i64) as Digit
    }

    /// The class of `x` modulo the defining polynomial (it is 0 when t = 1).
    pub fn generator(&self) -> Digit {
        if self.t() == 1 {
            0
        } else {
            self.p() as Digit
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Digit> {
        0..self.tables.q as Digit
    }

    pub fn mult_order(&self, a: Digit) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Least element (by encoding) generating the multiplicative group.
    pub fn primitive_root(&self) -> Digit {
        let target = self.q() - 1;
        self.elements().skip(1).find(|&a| self.mult_order(a) == Some(target)).unwrap()
    }

    /// A primitive n-th root of unity, when n divides q - 1.
    pub fn root_of_unity(&self, n: u32) -> Option<Digit> {
        let qm1 = self.q() - 1;
        (n >= 1 && qm1.is_multiple_of(n)).then(|| self.pow(self.primitive_root(), (qm1 / n) as u64))
    }

    /// F_p-basis `1, g, ..., g^(t-1)` as encoded digits.
    pub fn basis(&self) -> Vec<Digit> {
        (0..self.t()).map(|i| self.p().pow(i) as Digit).collect()
    }

    pub fn coeffs(&self, a: Digit) -> Vec<u32> {
        to_coeffs(a as usize, self.p() as usize, self.t() as usize).into_iter().map(|c| c as u32).collect()
    }

    pub fn element(&self, a: Digit) -> FqElement {
        FqElement { field: self.clone(), value: a }
    }

    /// Renders a digit as a polynomial in the generator symbol `g`.
    pub fn format_digit(&self, a: Digit) -> String {
        if self.t() == 1 {
            return a.to_string();
        }
        let c = self.coeffs(a);
        let mut parts = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let s = match (i, ci) {
                (0, _) => ci.to_string(),
                (1, 1) => "g".to_string(),
                (1, _) => format!("{ci}g"),
                (_, 1) => format!("g^{i}"),
                _ => format!("{ci}g^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Parses a polynomial in `g` with integer coefficients, e.g. `2g^2+g+1`.
    pub fn parse_digit(&self, s: &str) -> Result<Digit> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let mut acc: Digit = 0;
        for (neg, term) in split_signed(&s) {
            let v = self.parse_monomial(term)?;
            acc = if neg { self.sub(acc, v) } else { self.add(acc, v) };
        }
        Ok(acc)
    }

    fn parse_monomial(&self, term: &str) -> Result<Digit> {
        let bad = || Error::Parse(format!("bad coefficient term {term:?}"));
        match term.find('g') {
            None => {
                let n: i64 = term.parse().map_err(|_| bad())?;
                Ok(self.from_int(n))
            }
            Some(pos) => {
                let head = term[..pos].trim_end_matches('*');
                let c = if head.is_empty() { 1 } else { self.from_int(head.parse().map_err(|_| bad())?) };
                let tail = &term[pos + 1..];
                let e: u64 = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
                };
                let g = if self.t() == 1 { 0 } else { self.generator() };
                Ok(self.mul(c, self.pow(g, e)))
            }
        }
    }
}

/// Splits on top-level `+`/`-` signs, keeping signs that follow `^`.
pub(crate) fn split_signed(s: &str) -> Vec<(bool, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    let mut prev: Option<char> = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' | '−' if depth == 0 && !matches!(prev, Some('^') | None) => {
                out.push((neg, &s[start..i]));
                neg = ch != '+';
                start = i + ch.len_utf8();
            }
            '-' | '−' if depth == 0 && prev.is_none() => {
                neg = true;
                start = i + ch.len_utf8();
            }
            _ => {}
        }
        prev = Some(ch);
    }
    out.push((neg, &s[start..]));
    out.into_iter().filter(|(_, t)| !t.is_empty()).collect()
}

/// An element of F_q bundled with its field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqElement {
    field: Fq,
    value: Digit,
}

impl FqElement {
    pub fn field(&self) -> &Fq {
        &self.field
    }
    pub fn value(&self) -> Digit {
        self.value
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
    pub fn inv(&self) -> Result<FqElement> {
        let v = self.field.inv(self.value).ok_or(Error::ZeroInverse)?;
        Ok(self.field.element(v))
    }
    fn check(&self, other: &FqElement) {
        assert!(self.field == other.field, "F_q elements from different fields");
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_digit(self.value))
    }
}

macro_rules! fq_binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<&FqElement> for &FqElement {
            type Output = FqElement;
            fn $m(self, rhs: &FqElement) -> FqElement {
                self.check(rhs);
                self.field.element(self.field.$m(self.value, rhs.value))
            }
        }
        impl std::ops::$tr for FqElement {
            type Output = FqElement;
            fn $m(self, rhs: FqElement) -> FqElement {
                (&self).$m(&rhs)
            }
        }
    };
}
fq_binop!(Add, add);
fq_binop!(Sub, sub);
fq_binop!(Mul, mul);

impl std::ops::Neg for &FqElement {
    type Output = FqElement;
    fn neg(self) -> FqElement {
        self.field.element(self.field.neg(self.value))
    }
}
