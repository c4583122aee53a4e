use std::fmt;
use std::hash::{Hash, Hasher};

use super::fq::{split_signed, Digit, Fq};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: i64 = 64;

/// The Laurent series field F_q((π)) with a default relative precision used
/// when an operation (inversion) cannot be carried out exactly.
#[derive(Debug, Clone)]
pub struct LocalField {
    fq: Fq,
    precision: i64,
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        self.fq == other.fq
    }
}
impl Eq for LocalField {}

impl LocalField {
    pub fn new(fq: Fq) -> Self {
        Self::with_precision(fq, DEFAULT_PRECISION)
    }

    pub fn with_precision(fq: Fq, precision: i64) -> Self {
        assert!(precision >= 1, "precision must be positive");
        LocalField { fq, precision }
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }
    pub fn precision(&self) -> i64 {
        self.precision
    }
    pub fn q(&self) -> u32 {
        self.fq.q()
    }
    pub fn p(&self) -> u32 {
        self.fq.p()
    }

    pub fn zero(&self) -> LocalElement {
        LocalElement::raw(self.clone(), 0, Vec::new(), None)
    }
    pub fn one(&self) -> LocalElement {
        self.monomial(1, 0)
    }
    pub fn pi(&self) -> LocalElement {
        self.monomial(1, 1)
    }
    /// `c·π^e`, exact.
    pub fn monomial(&self, c: Digit, e: i64) -> LocalElement {
        LocalElement::from_digits(self.clone(), e, vec![c], None)
    }
    pub fn constant(&self, c: Digit) -> LocalElement {
        self.monomial(c, 0)
    }
    pub fn from_int(&self, n: i64) -> LocalElement {
        self.constant(self.fq.from_int(n))
    }
    /// Zero known only modulo π^n.
    pub fn zero_mod(&self, n: i64) -> LocalElement {
        LocalElement::raw(self.clone(), 0, Vec::new(), Some(n))
    }
    /// Exact polynomial from `(exponent, digit)` pairs; repeated exponents add.
    pub fn from_terms(&self, terms: &[(i64, Digit)]) -> LocalElement {
        terms.iter().fold(self.zero(), |acc, &(e, c)| &acc + &self.monomial(c, e))
    }

    /// Parses `c·π^e + ... + O(π^N)`; `pi` and `*` are accepted for `π` and `·`.
    pub fn parse(&self, s: &str) -> Result<LocalElement> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let cleaned = cleaned.replace("pi", "π").replace('·', "*");
        if cleaned.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut acc = self.zero();
        let mut prec: Option<i64> = None;
        for (neg, term) in split_signed(&cleaned) {
            if let Some(inner) = term.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
                let n = parse_pi_power(inner)?;
                prec = Some(prec.map_or(n, |p| p.min(n)));
                continue;
            }
            let (coef, exp) = match term.find('π') {
                Some(pos) => {
                    let head = term[..pos].trim_end_matches('*');
                    (head, parse_pi_power(&term[pos..])?)
                }
                None => (term, 0),
            };
            let coef = coef.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(coef);
            let c = if coef.is_empty() { 1 } else { self.fq.parse_digit(coef)? };
            let c = if neg { self.fq.neg(c) } else { c };
            acc = &acc + &self.monomial(c, exp);
        }
        Ok(match prec {
            Some(n) => acc.truncate(n),
            None => acc,
        })
    }
}

fn parse_pi_power(s: &str) -> Result<i64> {
    let bad = || Error::Parse(format!("bad power of π: {s:?}"));
    let rest = s.strip_prefix('π').ok_or_else(bad)?;
    if rest.is_empty() {
        return Ok(1);
    }
    let e = rest.strip_prefix('^').ok_or_else(bad)?;
    let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
    e.replace('−', "-").parse().map_err(|_| bad())
}

/// A truncated Laurent series `Σ digits[i]·π^(val+i) + O(π^prec)`.
///
/// With `prec == None` the element is exact. An empty digit vector is zero:
/// exact zero when `prec` is `None`, otherwise zero modulo `π^prec`.
#[derive(Clone)]
pub struct LocalElement {
    field: LocalField,
    val: i64,
    digits: Vec<Digit>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LocalElement {
    fn raw(field: LocalField, val: i64, digits: Vec<Digit>, prec: Option<i64>) -> Self {
        LocalElement { field, val, digits, prec }
    }

    /// Builds and normalizes `Σ digits[i]·π^(val+i) + O(π^prec)`.
    pub fn from_digits(field: LocalField, val: i64, digits: Vec<Digit>, prec: Option<i64>) -> Self {
        let mut x = Self::raw(field, val, digits, prec);
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        let lead = self.digits.iter().position(|&d| d != 0);
        match lead {
            None => {
                self.digits.clear();
                self.val = 0;
                return;
            }
            Some(k) if k > 0 => {
                self.digits.drain(..k);
                self.val += k as i64;
            }
            _ => {}
        }
        if let Some(n) = self.prec {
            let keep = (n - self.val).max(0) as usize;
            self.digits.truncate(keep);
        }
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
        if self.digits.is_empty() {
            self.val = 0;
        }
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    pub fn is_exact_zero(&self) -> bool {
        self.digits.is_empty() && self.prec.is_none()
    }
    /// True for exact zero and for zero modulo the known precision.
    pub fn is_zero_to_precision(&self) -> bool {
        self.digits.is_empty()
    }
    pub fn is_nonzero(&self) -> bool {
        !self.digits.is_empty()
    }

    /// `Ok(None)` is +∞ (exact zero); zero to finite precision is indeterminate.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if !self.digits.is_empty() {
            Ok(Some(self.val))
        } else if self.prec.is_none() {
            Ok(None)
        } else {
            Err(Error::Indeterminate("valuation"))
        }
    }

    /// Valuation of a nonzero element, or +∞ if it is exact zero, with zero
    /// to precision treated as having valuation `prec`.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        if !self.digits.is_empty() {
            Some(self.val)
        } else {
            self.prec
        }
    }

    /// Coefficient of `π^e`, or `None` when `e` is beyond the known precision.
    pub fn coefficient(&self, e: i64) -> Option<Digit> {
        if self.prec.is_some_and(|n| e >= n) {
            return None;
        }
        if self.digits.is_empty() || e < self.val {
            return Some(0);
        }
        Some(self.digits.get((e - self.val) as usize).copied().unwrap_or(0))
    }

    /// Nonzero `(exponent, digit)` terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Digit)> + '_ {
        self.digits.iter().enumerate().filter(|(_, &d)| d != 0).map(move |(i, &d)| (self.val + i as i64, d))
    }

    /// Leading term `(valuation, digit)` of a nonzero element.
    pub fn leading(&self) -> Option<(i64, Digit)> {
        self.digits.first().map(|&d| (self.val, d))
    }

    /// Highest exponent carrying a nonzero digit.
    pub fn degree(&self) -> Option<i64> {
        (!self.digits.is_empty()).then(|| self.val + self.digits.len() as i64 - 1)
    }

    pub fn is_monomial(&self) -> bool {
        self.prec.is_none() && self.digits.len() == 1
    }

    /// Forgets everything from `π^n` on.
    pub fn truncate(&self, n: i64) -> LocalElement {
        let mut x = self.clone();
        x.prec = Some(self.prec.map_or(n, |p| p.min(n)));
        x.normalize();
        x
    }

    /// Exact element made of the digits below `π^n` (i.e. `x mod π^n`).
    pub fn reduce_mod(&self, n: i64) -> Result<LocalElement> {
        if self.prec.is_some_and(|p| p < n) {
            return Err(Error::Indeterminate("reduction"));
        }
        let mut x = self.clone();
        x.prec = Some(n);
        x.normalize();
        x.prec = None;
        Ok(x)
    }

    /// Drops all terms of negative exponent (the polar part).
    pub fn integral_part(&self) -> LocalElement {
        let terms: Vec<_> = self.terms().filter(|&(e, _)| e >= 0).collect();
        let base = self.field.from_terms(&terms);
        match self.prec {
            Some(n) => base.truncate(n),
            None => base,
        }
    }

    /// Decides exact equality; zero difference to finite precision is indeterminate.
    pub fn try_eq(&self, other: &LocalElement) -> Result<bool> {
        let d = self.checked_sub(other)?;
        Ok(d.valuation()?.is_none())
    }

    fn same_field(&self, other: &LocalElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &LocalElement) -> Result<LocalElement> {
        self.same_field(other)?;
        let fq = &self.field.fq;
        let prec = min_prec(self.prec, other.prec);
        let (a, b) = (self, other);
        if a.digits.is_empty() && b.digits.is_empty() {
            return Ok(Self::raw(self.field.clone(), 0, Vec::new(), prec));
        }
        let low = [a, b].iter().filter(|x| !x.digits.is_empty()).map(|x| x.val).min().unwrap();
        let mut high =
            [a, b].iter().filter(|x| !x.digits.is_empty()).map(|x| x.val + x.digits.len() as i64).max().unwrap();
        if let Some(n) = prec {
            high = high.min(n);
        }
        let len = (high - low).max(0) as usize;
        let mut out = vec![0 as Digit; len];
        for x in [a, b] {
            for (i, &d) in x.digits.iter().enumerate() {
                let k = x.val + i as i64 - low;
                if (k as usize) < len {
                    out[k as usize] = fq.add(out[k as usize], d);
                }
            }
        }
        Ok(Self::from_digits(self.field.clone(), low, out, prec))
    }

    pub fn checked_sub(&self, other: &LocalElement) -> Result<LocalElement> {
        self.checked_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> LocalElement {
        let fq = &self.field.fq;
        Self::raw(self.field.clone(), self.val, self.digits.iter().map(|&d| fq.neg(d)).collect(), self.prec)
    }

    pub fn checked_mul(&self, other: &LocalElement) -> Result<LocalElement> {
        self.same_field(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(self.field.zero());
        }
        let (va, vb) = (self.valuation_lower_bound().unwrap(), other.valuation_lower_bound().unwrap());
        let prec = min_prec(self.prec.map(|p| p + vb), other.prec.map(|p| p + va));
        if self.digits.is_empty() || other.digits.is_empty() {
            return Ok(Self::raw(self.field.clone(), 0, Vec::new(), prec));
        }
        let low = self.val + other.val;
        let mut len = self.digits.len() + other.digits.len() - 1;
        if let Some(n) = prec {
            len = len.min((n - low).max(0) as usize);
        }
        let fq = &self.field.fq;
        let mut out = vec![0 as Digit; len];
        for (i, &x) in self.digits.iter().enumerate() {
            if x == 0 || i >= len {
                continue;
            }
            for (j, &y) in other.digits.iter().enumerate().take(len - i) {
                if y != 0 {
                    out[i + j] = fq.add(out[i + j], fq.mul(x, y));
                }
            }
        }
        Ok(Self::from_digits(self.field.clone(), low, out, prec))
    }

    /// Multiplicative inverse. Exact for exact monomials; otherwise correct to
    /// the input's relative precision, capped by the field default.
    pub fn inv(&self) -> Result<LocalElement> {
        if self.digits.is_empty() {
            return Err(if self.prec.is_none() { Error::ZeroInverse } else { Error::Indeterminate("inverse") });
        }
        let fq = &self.field.fq;
        let u0inv = fq.inv(self.digits[0]).unwrap();
        if self.is_monomial() {
            return Ok(self.field.monomial(u0inv, -self.val));
        }
        let rel = self.prec.map_or(self.field.precision, |p| (p - self.val).min(self.field.precision));
        let n = rel as usize;
        let mut w = vec![0 as Digit; n];
        w[0] = u0inv;
        for k in 1..n {
            let mut s: Digit = 0;
            for i in 1..=k.min(self.digits.len() - 1) {
                s = fq.add(s, fq.mul(self.digits[i], w[k - i]));
            }
            w[k] = fq.neg(fq.mul(u0inv, s));
        }
        Ok(Self::from_digits(self.field.clone(), -self.val, w, Some(-self.val + rel)))
    }

    pub fn checked_div(&self, other: &LocalElement) -> Result<LocalElement> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<LocalElement> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplies by π^k (exactly).
    pub fn shift(&self, k: i64) -> LocalElement {
        let mut x = self.clone();
        if !x.digits.is_empty() {
            x.val += k;
        }
        x.prec = x.prec.map(|p| p + k);
        x
    }

    pub fn scale_digit(&self, c: Digit) -> LocalElement {
        self * &self.field.constant(c)
    }
}

impl PartialEq for LocalElement {
    /// Representation equality: same field, digits, valuation and precision.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.digits == other.digits
            && self.prec == other.prec
            && (self.digits.is_empty() || self.val == other.val)
    }
}
impl Eq for LocalElement {}

impl Hash for LocalElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.digits.hash(state);
        if !self.digits.is_empty() {
            self.val.hash(state);
        }
        self.prec.hash(state);
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl std::ops::$tr<&LocalElement> for &LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: &LocalElement) -> LocalElement {
                self.$checked(rhs).expect("arithmetic on elements of different fields")
            }
        }
        impl std::ops::$tr<LocalElement> for LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: LocalElement) -> LocalElement {
                (&self).$m(&rhs)
            }
        }
        impl std::ops::$tr<&LocalElement> for LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: &LocalElement) -> LocalElement {
                (&self).$m(rhs)
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        self.neg_ref()
    }
}
impl std::ops::Neg for LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        self.neg_ref()
    }
}

fn format_pi(e: i64) -> String {
    match e {
        1 => "π".into(),
        _ => format!("π^{e}"),
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fq = &self.field.fq;
        let mut parts: Vec<String> = self
            .terms()
            .map(|(e, d)| {
                let c = fq.format_digit(d);
                let c = if c.contains('+') { format!("({c})") } else { c };
                match (e, d) {
                    (0, _) => c,
                    (_, 1) => format_pi(e),
                    _ => format!("{c}·{}", format_pi(e)),
                }
            })
            .collect();
        if let Some(n) = self.prec {
            parts.push(format!("O({})", format_pi(n)));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalElement({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::super::fq::make_field;
    use super::*;

    fn field(p: u32, t: u32) -> LocalField {
        LocalField::with_precision(make_field(p, t).unwrap(), 20)
    }

    #[test]
    fn valuations() {
        let k = field(3, 1);
        assert_eq!(k.pi().valuation(), Ok(Some(1)));
        assert_eq!(k.zero().valuation(), Ok(None));
        let x = k.parse("π^-3 + π").unwrap();
        assert_eq!(x.valuation(), Ok(Some(-3)));
        assert_eq!(k.zero_mod(5).valuation(), Err(Error::Indeterminate("valuation")));
    }

    #[test]
    fn pi_times_inverse_is_exact_one() {
        let k = field(5, 1);
        let x = &k.pi() * &k.pi().inv().unwrap();
        assert_eq!(x, k.one());
        assert!(x.is_exact());
    }

    #[test]
    fn characteristic_two_cancels() {
        let k = field(2, 1);
        let x = k.parse("1 + π").unwrap();
        let s = &x + &x;
        assert!(s.is_exact_zero());
    }

    #[test]
    fn inverse_of_one_plus_pi_multiplies_back() {
        for p in [2, 3, 7] {
            let k = field(p, 1);
            let x = k.parse("1 + π").unwrap();
            let y = x.inv().unwrap();
            assert_eq!(y.precision(), Some(20));
            // alternating series 1 - π + π^2 - ...
            for e in 0..20 {
                let expect = if e % 2 == 0 { 1 } else { k.fq().neg(1) };
                assert_eq!(y.coefficient(e), Some(expect));
            }
            let back = &x * &y;
            assert_eq!(back.precision(), Some(20));
            assert_eq!(back, k.one().truncate(20));
        }
    }

    #[test]
    fn inverse_errors() {
        let k = field(3, 1);
        assert_eq!(k.zero().inv().unwrap_err(), Error::ZeroInverse);
        assert_eq!(k.zero_mod(4).inv().unwrap_err(), Error::Indeterminate("inverse"));
    }

    #[test]
    fn field_mismatch_is_reported() {
        let a = field(3, 1).one();
        let b = field(5, 1).one();
        assert_eq!(a.checked_add(&b).unwrap_err(), Error::FieldMismatch);
        assert_eq!(a.checked_mul(&b).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn precision_bookkeeping() {
        let k = field(3, 1);
        let a = k.parse("1 + π + O(π^5)").unwrap();
        let b = k.parse("π^2 + O(π^4)").unwrap();
        assert_eq!((&a + &b).precision(), Some(4));
        // (1+π+O(π^5))·(π^2+O(π^4)) has precision min(5+2, 4+0)
        assert_eq!((&a * &b).precision(), Some(4));
        let c = &k.zero_mod(3) * &k.pi().pow(-2).unwrap();
        assert_eq!(c.precision(), Some(1));
        assert!(c.is_zero_to_precision());
    }

    #[test]
    fn text_round_trip() {
        let k = field(3, 2);
        let x = k.parse("(g+1)·π^-2 + 2·π + g + O(π^7)").unwrap();
        let s = x.to_string();
        assert_eq!(s, "(g+1)·π^-2 + g + 2·π + O(π^7)");
        assert_eq!(k.parse(&s).unwrap(), x);
        let y = k.parse("2*pi^3 - pi").unwrap();
        assert_eq!(y.to_string(), "2·π + 2·π^3");
        assert_eq!(k.parse("O(π^3)").unwrap(), k.zero_mod(3));
        assert_eq!(k.parse("0").unwrap(), k.zero());
        assert!(k.parse("π^x").is_err());
    }

    #[test]
    fn reduction_and_coefficients() {
        let k = field(5, 1);
        let x = k.parse("3·π^-1 + 1 + 4·π^2").unwrap();
        assert_eq!(x.reduce_mod(1).unwrap(), k.parse("3·π^-1 + 1").unwrap());
        assert_eq!(x.integral_part(), k.parse("1 + 4π^2").unwrap());
        assert_eq!(x.coefficient(2), Some(4));
        assert_eq!(x.truncate(2).coefficient(2), None);
        assert!(x.truncate(1).reduce_mod(2).is_err());
    }
}
