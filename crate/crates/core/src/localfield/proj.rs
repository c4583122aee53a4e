use std::fmt;

use super::series::{LocalElement, LocalField};
use crate::error::{Error, Result};

/// A point of P¹(K) in normal form: `(z, 1)` with `v(z) ≥ 0`, or `(1, w)`
/// with `v(w) > 0` or `w = 0` (the point ∞).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    x0: LocalElement,
    x1: LocalElement,
}

impl ProjPoint {
    pub fn new(x0: LocalElement, x1: LocalElement) -> Result<ProjPoint> {
        if x0.field() != x1.field() {
            return Err(Error::FieldMismatch);
        }
        let k = x0.field().clone();
        let (v0, v1) = (x0.valuation(), x1.valuation());
        match (v0, v1) {
            (Ok(None), Ok(None)) => Err(Error::InvalidParameter("(0:0) is not a point".into())),
            (_, Ok(None)) => {
                x0.valuation()?;
                Ok(Self::infinity(&k))
            }
            (Ok(None), _) => {
                x1.valuation()?;
                Ok(ProjPoint { x0: k.zero(), x1: k.one() })
            }
            (Ok(Some(a)), Ok(Some(b))) => {
                if a < b {
                    Ok(ProjPoint { x0: k.one(), x1: x1.checked_div(&x0)? })
                } else {
                    Ok(ProjPoint { x0: x0.checked_div(&x1)?, x1: k.one() })
                }
            }
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }

    pub fn finite(z: LocalElement) -> ProjPoint {
        let k = z.field().clone();
        ProjPoint::new(z, k.one()).expect("affine points are valid")
    }

    pub fn infinity(k: &LocalField) -> ProjPoint {
        ProjPoint { x0: k.one(), x1: k.zero() }
    }

    pub fn field(&self) -> &LocalField {
        self.x0.field()
    }

    pub fn coords(&self) -> (&LocalElement, &LocalElement) {
        (&self.x0, &self.x1)
    }

    pub fn is_infinity(&self) -> bool {
        self.x1.is_exact_zero()
    }

    /// Affine coordinate, `None` for ∞.
    pub fn affine(&self) -> Result<Option<LocalElement>> {
        if self.is_infinity() {
            return Ok(None);
        }
        if self.x0.field().one() == self.x1 {
            return Ok(Some(self.x0.clone()));
        }
        Ok(Some(self.x1.inv()?))
    }

    /// Decides equality of points; undecidable coordinates raise an error.
    pub fn try_eq(&self, other: &ProjPoint) -> Result<bool> {
        let lhs = self.x0.checked_mul(&other.x1)?;
        let rhs = self.x1.checked_mul(&other.x0)?;
        lhs.try_eq(&rhs)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            f.write_str("∞")
        } else {
            write!(f, "({} : {})", self.x0, self.x1)
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPoint{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::fq::make_field;
    use super::*;

    #[test]
    fn normal_forms() {
        let k = LocalField::new(make_field(3, 1).unwrap());
        let p = ProjPoint::new(k.pi(), k.one()).unwrap();
        assert_eq!(p.coords().1, &k.one());
        let big = ProjPoint::finite(k.pi().inv().unwrap());
        assert_eq!(big.coords(), (&k.one(), &k.pi()));
        assert_eq!(big.affine().unwrap(), Some(k.pi().inv().unwrap()));
        let scaled = ProjPoint::new(k.from_int(2), k.from_int(2)).unwrap();
        assert!(scaled.try_eq(&ProjPoint::finite(k.one())).unwrap());
        assert!(ProjPoint::new(k.pi(), k.zero()).unwrap().is_infinity());
        assert!(ProjPoint::new(k.zero(), k.zero()).is_err());
        assert!(ProjPoint::new(k.zero_mod(3), k.one()).is_err());
    }
}
