//! 2×2 matrices over F_q((π)), viewed projectively as elements of PGL(2).

use std::fmt;

use crate::error::{Error, Result};
use crate::localfield::{Digit, LocalElement, LocalField, ProjPoint};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: LocalElement,
    pub b: LocalElement,
    pub c: LocalElement,
    pub d: LocalElement,
}

impl Mat2 {
    pub fn new(a: LocalElement, b: LocalElement, c: LocalElement, d: LocalElement) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn field(&self) -> &LocalField {
        self.a.field()
    }

    pub fn identity(k: &LocalField) -> Mat2 {
        Mat2::new(k.one(), k.zero(), k.zero(), k.one())
    }

    pub fn diag(x: LocalElement, y: LocalElement) -> Mat2 {
        let k = x.field().clone();
        Mat2::new(x, k.zero(), k.zero(), y)
    }

    /// The translation z ↦ z + x.
    pub fn translation(x: LocalElement) -> Mat2 {
        let k = x.field().clone();
        Mat2::new(k.one(), x, k.zero(), k.one())
    }

    /// The lower unipotent (1 0; x 1).
    pub fn lower(x: LocalElement) -> Mat2 {
        let k = x.field().clone();
        Mat2::new(k.one(), k.zero(), x, k.one())
    }

    /// (0 1; −1 0).
    pub fn antidiagonal(k: &LocalField) -> Mat2 {
        Mat2::new(k.zero(), k.one(), -k.one(), k.zero())
    }

    /// A matrix with constant entries from F_q.
    pub fn from_digits(k: &LocalField, e: [Digit; 4]) -> Mat2 {
        Mat2::new(k.constant(e[0]), k.constant(e[1]), k.constant(e[2]), k.constant(e[3]))
    }

    pub fn entries(&self) -> [&LocalElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn checked_mul(&self, o: &Mat2) -> Result<Mat2> {
        Ok(Mat2::new(
            self.a.checked_mul(&o.a)?.checked_add(&self.b.checked_mul(&o.c)?)?,
            self.a.checked_mul(&o.b)?.checked_add(&self.b.checked_mul(&o.d)?)?,
            self.c.checked_mul(&o.a)?.checked_add(&self.d.checked_mul(&o.c)?)?,
            self.c.checked_mul(&o.b)?.checked_add(&self.d.checked_mul(&o.d)?)?,
        ))
    }

    pub fn det(&self) -> LocalElement {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    /// The adjugate, which inverts the matrix in PGL(2) without division.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn scale(&self, s: &LocalElement) -> Mat2 {
        Mat2::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    pub fn is_exact(&self) -> bool {
        self.entries().iter().all(|e| e.is_exact())
    }

    /// Minimum entry valuation; `None` only for the zero matrix.
    pub fn min_valuation(&self) -> Result<Option<i64>> {
        let mut best: Option<i64> = None;
        for e in self.entries() {
            if let Some(v) = e.valuation()? {
                best = Some(best.map_or(v, |b: i64| b.min(v)));
            }
        }
        Ok(best)
    }

    /// Scalar test in PGL(2): b = c = 0 and a = d. Entries that vanish to
    /// their known precision are treated as zero.
    pub fn is_scalar(&self) -> bool {
        self.b.is_zero_to_precision()
            && self.c.is_zero_to_precision()
            && (&self.a - &self.d).is_zero_to_precision()
            && self.a.is_nonzero()
    }

    /// Equality in PGL(2): all 2×2 minors of the pair of entry vectors vanish.
    pub fn projective_eq(&self, o: &Mat2) -> bool {
        let x = self.entries();
        let y = o.entries();
        for i in 0..4 {
            for j in i + 1..4 {
                let m = &(x[i] * y[j]) - &(x[j] * y[i]);
                if !m.is_zero_to_precision() {
                    return false;
                }
            }
        }
        true
    }

    /// A key invariant under scaling, used to bucket matrices before exact
    /// projective comparison.
    pub fn projective_key(&self) -> Vec<(i64, Digit)> {
        let fq = self.field().fq().clone();
        let lead = match self.entries().iter().find_map(|e| e.leading()) {
            Some(l) => l,
            None => return Vec::new(),
        };
        let inv = fq.inv(lead.1).unwrap();
        self.entries()
            .iter()
            .map(|e| match e.leading() {
                Some((v, d)) => (v - lead.0, fq.mul(d, inv)),
                None => (i64::MIN, 0),
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut acc = Mat2::identity(self.field());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }

    /// Order in PGL(2), searching up to `cap`.
    pub fn order(&self, cap: u64) -> Result<u64> {
        let mut x = self.clone();
        for k in 1..=cap {
            if x.is_scalar() {
                return Ok(k);
            }
            x = &x * self;
        }
        Err(Error::NotTorsion(cap))
    }

    /// Möbius action on P¹(K).
    pub fn act_point(&self, z: &ProjPoint) -> Result<ProjPoint> {
        let (z0, z1) = z.coords();
        let w0 = self.a.checked_mul(z0)?.checked_add(&self.b.checked_mul(z1)?)?;
        let w1 = self.c.checked_mul(z0)?.checked_add(&self.d.checked_mul(z1)?)?;
        ProjPoint::new(w0, w1)
    }

    /// The Möbius map sending x ↦ 0, y ↦ ∞, z ↦ 1.
    pub fn cross_ratio_map(x: &ProjPoint, y: &ProjPoint, z: &ProjPoint) -> Result<Mat2> {
        let det = |p: &ProjPoint, q: &ProjPoint| -> Result<LocalElement> {
            let (p0, p1) = p.coords();
            let (q0, q1) = q.coords();
            p0.checked_mul(q1)?.checked_sub(&p1.checked_mul(q0)?)
        };
        let dzy = det(z, y)?;
        let dzx = det(z, x)?;
        if dzy.valuation()?.is_none() || dzx.valuation()?.is_none() || det(x, y)?.valuation()?.is_none() {
            return Err(Error::InvalidParameter("points must be pairwise distinct".into()));
        }
        let (x0, x1) = x.coords();
        let (y0, y1) = y.coords();
        Ok(Mat2::new(x1 * &dzy, -(x0 * &dzy), y1 * &dzx, -(y0 * &dzx)))
    }
}

impl std::ops::Mul<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        self.checked_mul(rhs).expect("matrices over different fields")
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat2{self}")
    }
}

/// Closes a set of generators under multiplication in PGL(2).
/// Fails once more than `cap` elements have been produced.
pub fn generate_group(gens: &[Mat2], k: &LocalField, cap: usize) -> Result<Vec<Mat2>> {
    use std::collections::HashMap;
    let mut elems = vec![Mat2::identity(k)];
    let mut index: HashMap<Vec<(i64, Digit)>, Vec<usize>> = HashMap::new();
    index.entry(elems[0].projective_key()).or_default().push(0);
    let mut frontier = 0;
    while frontier < elems.len() {
        let x = elems[frontier].clone();
        frontier += 1;
        for g in gens {
            let y = &x * g;
            let key = y.projective_key();
            let bucket = index.entry(key).or_default();
            if bucket.iter().any(|&i| elems[i].projective_eq(&y)) {
                continue;
            }
            bucket.push(elems.len());
            elems.push(y);
            if elems.len() > cap {
                return Err(Error::InvalidParameter(format!("group exceeds {cap} elements")));
            }
        }
    }
    Ok(elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::make_field;

    #[test]
    fn cross_ratio_map_sends_triple_to_standard() {
        let k = LocalField::new(make_field(5, 1).unwrap());
        let pts = [ProjPoint::finite(k.from_int(2)), ProjPoint::finite(k.pi()), ProjPoint::infinity(&k)];
        let m = Mat2::cross_ratio_map(&pts[0], &pts[1], &pts[2]).unwrap();
        assert!(m.act_point(&pts[0]).unwrap().try_eq(&ProjPoint::finite(k.zero())).unwrap());
        assert!(m.act_point(&pts[1]).unwrap().is_infinity());
        assert!(m.act_point(&pts[2]).unwrap().try_eq(&ProjPoint::finite(k.one())).unwrap());
    }

    #[test]
    fn orders_and_scalars() {
        let k = LocalField::new(make_field(3, 1).unwrap());
        assert_eq!(Mat2::translation(k.one()).order(100), Ok(3));
        assert_eq!(Mat2::antidiagonal(&k).order(100), Ok(2));
        let hyperbolic = Mat2::diag(k.pi(), k.one());
        assert_eq!(hyperbolic.order(50), Err(Error::NotTorsion(50)));
        assert!(Mat2::identity(&k).scale(&k.pi()).projective_eq(&Mat2::identity(&k)));
    }

    #[test]
    fn pgl2_f3_has_24_elements() {
        let k = LocalField::new(make_field(3, 1).unwrap());
        let gens = [Mat2::translation(k.one()), Mat2::diag(k.from_int(2), k.one()), Mat2::antidiagonal(&k)];
        assert_eq!(generate_group(&gens, &k, 1000).unwrap().len(), 24);
    }
}
