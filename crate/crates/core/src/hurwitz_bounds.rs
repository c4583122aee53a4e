//! Riemann–Hurwitz bookkeeping for ordinary covers of P¹ and exact
//! comparisons against F(g) = 2√g(√g+1)² and 12(g − 1).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_groups::BranchDatum;

/// A Galois cover X → S with group A, recorded by its branch points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverData {
    pub p: u32,
    pub aut_order: BigInt,
    pub branches: Vec<BranchDatum>,
    pub base_genus: i64,
}

fn is_power_of(mut x: u128, p: u128) -> bool {
    while x > 1 && x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// Only the first ramification group may be wild: `ep` is a power of p and
/// `e / ep` is prime to p.
pub fn check_branch(p: u32, b: &BranchDatum) -> Result<()> {
    let pp = p as u128;
    if b.e == 0 || b.ep == 0 || !b.e.is_multiple_of(b.ep) || !is_power_of(b.ep, pp) || (b.e / b.ep).is_multiple_of(pp) {
        return Err(Error::InvalidParameter(format!(
            "branch ({}, {}) is not an ordinary ramification datum for p={p}",
            b.e, b.ep
        )));
    }
    Ok(())
}

pub fn ramification_sum(branches: &[BranchDatum]) -> BigRational {
    branches.iter().map(|b| BigRational::new(BigInt::from(b.e + b.ep) - 2, BigInt::from(b.e))).sum()
}

/// (g − 1)/|A| for a cover of P¹ with the given branch data.
pub fn branch_ratio(branches: &[BranchDatum]) -> BigRational {
    (ramification_sum(branches) - BigRational::from_integer(2.into())) / BigRational::from_integer(2.into())
}

impl CoverData {
    pub fn new(p: u32, aut_order: impl Into<BigInt>, branches: Vec<BranchDatum>) -> Result<Self> {
        let aut_order = aut_order.into();
        if !aut_order.is_positive() {
            return Err(Error::InvalidParameter("|A| must be positive".into()));
        }
        for b in &branches {
            check_branch(p, b)?;
            if (&aut_order % BigInt::from(b.e)).is_positive() {
                return Err(Error::InvalidParameter(format!("inertia order {} does not divide |A|", b.e)));
            }
        }
        Ok(CoverData { p, aut_order, branches, base_genus: 0 })
    }

    /// Σ_P (e_P + ep_P − 2) / e_P.
    pub fn ramification_sum(&self) -> BigRational {
        ramification_sum(&self.branches)
    }

    /// (g − 1)/|A| = (2g₀ − 2 + Σ)/2.
    pub fn genus_ratio(&self) -> BigRational {
        (BigRational::from_integer(BigInt::from(2 * self.base_genus - 2)) + self.ramification_sum())
            / BigRational::from_integer(2.into())
    }
}

/// Genus of X from 2g − 2 = |A|(2g₀ − 2 + Σ_P (e_P + ep_P − 2)/e_P).
/// Non-integral values mean the data are inconsistent and are returned as is.
pub fn hurwitz_genus(c: &CoverData) -> BigRational {
    c.genus_ratio() * BigRational::from_integer(c.aut_order.clone()) + BigRational::one()
}

/// (g − 1)/|A| in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbRatio {
    #[serde(serialize_with = "crate::ser::display")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b: BigInt,
}

pub fn ab_ratio(c: &CoverData) -> Result<AbRatio> {
    let r = c.genus_ratio();
    if !r.is_positive() {
        return Err(Error::GenusTooSmall(hurwitz_genus(c).to_string()));
    }
    Ok(AbRatio { a: r.numer().clone(), b: r.denom().clone() })
}

/// λ = gcd(g − 1, |A|) with g − 1 = λa and |A| = λb.
pub fn lambda_split(g_minus_1: &BigInt, aut_order: &BigInt) -> (BigInt, AbRatio) {
    let l = g_minus_1.gcd(aut_order);
    (l.clone(), AbRatio { a: g_minus_1 / &l, b: aut_order / &l })
}

/// Exact comparison of `n` with F(g) = 4g + 2(g+1)√g.
pub fn f_compare(n: &BigInt, g: &BigInt) -> Ordering {
    let four_g: BigInt = g * 4;
    if *n <= four_g {
        // F(g) ≥ 4g with equality only at g = 0
        return if g.is_zero() { n.cmp(&BigInt::zero()) } else { Ordering::Less };
    }
    let d: BigInt = n - four_g;
    let lhs = &d * &d;
    let gp1: BigInt = g + 1;
    let rhs: BigInt = g * 4 * &gp1 * &gp1;
    lhs.cmp(&rhs)
}

/// λ₀·b ≤ F(λ₀·a + 1).
pub fn lambda_criterion(lambda0: &BigInt, a: &BigInt, b: &BigInt) -> bool {
    f_compare(&(lambda0 * b), &(lambda0 * a + 1)) != Ordering::Greater
}

/// The genera g = λa + 1 with λ ≥ 1 at which λb = F(g), in increasing order.
///
/// Equality forces g = s², and λ = (s² − 1)/a turns λb = 2s(s+1)² into
/// 2as² + (2a − b)s + b = 0.
pub fn attaining_genera(a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if !a.is_positive() || !b.is_positive() {
        return out;
    }
    let two_a: BigInt = a * 2;
    let disc: BigInt = b * b - a * b * 12 + &two_a * &two_a;
    if disc.is_negative() {
        return out;
    }
    let r = disc.sqrt();
    if &r * &r != disc {
        return out;
    }
    let four_a: BigInt = a * 4;
    for num in [b - &two_a - &r, b - &two_a + &r] {
        if num.is_positive() && (&num % &four_a).is_zero() {
            let s: BigInt = num / &four_a;
            let g: BigInt = &s * &s;
            let gm1: BigInt = &g - 1;
            if s >= BigInt::from(2) && (gm1 % a).is_zero() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// |A| ≤ 12(g − 1).
    Classical,
    /// 12(g − 1) < |A| < F(g).
    BetweenBounds,
    /// |A| = F(g) > 12(g − 1).
    AttainsF,
    /// |A| > max{12(g − 1), F(g)}.
    ExceedsBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "crate::ser::display")]
    pub g: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub aut_order: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub classical_bound: BigInt,
    pub f_comparison: Comparison,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    Equal,
    Above,
}

impl From<Ordering> for Comparison {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Below,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Above,
        }
    }
}

pub fn bound_report(g: &BigInt, aut_order: &BigInt) -> BoundReport {
    let classical: BigInt = (g - 1) * 12;
    let cmp = f_compare(aut_order, g);
    let verdict = if *aut_order <= classical {
        Verdict::Classical
    } else {
        match cmp {
            Ordering::Less => Verdict::BetweenBounds,
            Ordering::Equal => Verdict::AttainsF,
            Ordering::Greater => Verdict::ExceedsBound,
        }
    };
    BoundReport {
        g: g.clone(),
        aut_order: aut_order.clone(),
        classical_bound: classical,
        f_comparison: cmp.into(),
        verdict,
    }
}

/// Genera in [2, limit] with 12(g − 1) > F(g).
pub fn exceptional_genera(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&g| f_compare(&BigInt::from(12 * (g - 1)), &BigInt::from(g)) == Ordering::Greater).collect()
}

/// Orders n with F(g) < n ≤ 12(g − 1).
pub fn exceptional_orders(g: u64) -> Vec<u64> {
    let gb = BigInt::from(g);
    (1..=12 * (g - 1)).filter(|&n| f_compare(&BigInt::from(n), &gb) == Ordering::Greater).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenusCensus {
    pub g: u64,
    pub orders: Vec<u64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CensusReport {
    pub per_genus: Vec<GenusCensus>,
    pub total: u64,
    /// (order, number of non-solvable groups of that order) where positive.
    pub nonsolvable: Vec<(u64, u64)>,
    pub interval: &'static str,
}

pub const CENSUS_INTERVAL: &str = "F(g) < |A| <= 12(g-1)";

/// Counts groups whose order lies in an exceptional interval, for every
/// genus where 12(g − 1) exceeds F(g).
pub fn census_exceptional(gnu: &BTreeMap<u64, u64>, nonsolvable: &BTreeMap<u64, u64>) -> Result<CensusReport> {
    let mut per_genus = Vec::new();
    let mut total = 0;
    let mut ns = Vec::new();
    for g in exceptional_genera(10_000) {
        let orders = exceptional_orders(g);
        let mut count = 0;
        for n in &orders {
            let c = gnu.get(n).ok_or_else(|| Error::MissingData(format!("number of groups of order {n}")))?;
            count += c;
            let bad =
                nonsolvable.get(n).ok_or_else(|| Error::MissingData(format!("non-solvable groups of order {n}")))?;
            if *bad > 0 {
                ns.push((*n, *bad));
            }
        }
        total += count;
        per_genus.push(GenusCensus { g, orders, count });
    }
    Ok(CensusReport { per_genus, total, nonsolvable: ns, interval: CENSUS_INTERVAL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: u128, ep: u128) -> BranchDatum {
        BranchDatum::new(e, ep)
    }
    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn a1_branch_data_give_the_table_ratio() {
        for (p, t, n) in [(3u32, 1u32, 2u32), (2, 1, 3), (5, 1, 2), (2, 2, 2)] {
            let q = (p as u128).pow(t);
            let qn = q.pow(n);
            let aut = qn * (q * q - 1);
            let c = CoverData::new(p, aut as i64, vec![b(qn * (q - 1), qn), b(q + 1, 1)]).unwrap();
            let expected = BigRational::new(big((qn - q - 1) as i64), big(aut as i64));
            assert_eq!(c.genus_ratio(), expected);
        }
    }

    #[test]
    fn unbranched_cover_of_the_line() {
        let c = CoverData::new(3, 7, vec![]).unwrap();
        assert_eq!(hurwitz_genus(&c), BigRational::from_integer(big(-6)));
        assert!(ab_ratio(&c).is_err());
    }

    #[test]
    fn a1_at_q3_n2() {
        let c = CoverData::new(3, 72, vec![b(4, 1), b(18, 9)]).unwrap();
        assert_eq!(hurwitz_genus(&c), BigRational::from_integer(big(6)));
        let r = ab_ratio(&c).unwrap();
        assert_eq!((r.a, r.b), (big(5), big(72)));
    }

    #[test]
    fn icosahedral_branchings() {
        let c = CoverData::new(7, 60, vec![b(2, 1), b(2, 1), b(2, 1), b(3, 1)]).unwrap();
        assert_eq!(hurwitz_genus(&c), BigRational::from_integer(big(6)));
        let c = CoverData::new(3, 60, vec![b(2, 1), b(2, 1), b(6, 3)]).unwrap();
        assert_eq!(hurwitz_genus(&c), BigRational::from_integer(big(6)));
    }

    #[test]
    fn rejects_non_ordinary_data() {
        assert!(CoverData::new(3, 36, vec![b(9, 3)]).is_err());
        assert!(CoverData::new(3, 36, vec![b(6, 2)]).is_err());
        assert!(CoverData::new(3, 10, vec![b(4, 1)]).is_err());
    }

    #[test]
    fn f_compare_examples() {
        assert_eq!(f_compare(&big(60), &big(6)), Ordering::Greater);
        assert_eq!(f_compare(&big(1), &big(4)), Ordering::Less);
        for q in [2i64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27] {
            let g = (q - 1) * (q - 1);
            assert_eq!(f_compare(&big(2 * q * q * (q - 1)), &big(g)), Ordering::Equal, "q={q}");
            assert_eq!(f_compare(&big(2 * q * q * (q - 1) + 1), &big(g)), Ordering::Greater);
            assert_eq!(f_compare(&big(2 * q * q * (q - 1) - 1), &big(g)), Ordering::Less);
        }
    }

    #[test]
    fn f_compare_agrees_with_floating_point_away_from_ties() {
        for g in 2..300i64 {
            let f = 2.0 * (g as f64).sqrt() * ((g as f64).sqrt() + 1.0).powi(2);
            for n in [f.floor() as i64 - 1, f.ceil() as i64 + 1] {
                let expect = if (n as f64) < f { Ordering::Less } else { Ordering::Greater };
                assert_eq!(f_compare(&big(n), &big(g)), expect, "n={n} g={g}");
            }
        }
    }

    #[test]
    fn lambda_examples() {
        assert!(!lambda_criterion(&big(1), &big(5), &big(72)));
        assert!(lambda_criterion(&big(4), &big(1), &big(6)));
        assert!(lambda_criterion(&big(1), &big(1_000_000_000), &big(1)));
    }

    #[test]
    fn attaining_genus_finds_the_square_genera() {
        for q in [3i64, 4, 5, 7, 9] {
            let (a, b) = (big(q - 2), big(2 * q * (q - 1)));
            let gs = attaining_genera(&a, &b);
            assert!(gs.contains(&big((q - 1) * (q - 1))));
            let g = &gs[0];
            assert_eq!(f_compare(&(&b * (g - 1) / &a), g), Ordering::Equal);
        }
        assert!(attaining_genera(&big(5), &big(72)).is_empty());
        assert_eq!(attaining_genera(&big(1), &big(12)), vec![big(4), big(9)]);
    }

    #[test]
    fn attaining_genus_agrees_with_search() {
        for a in 1..12i64 {
            for b in 1..300i64 {
                if num::Integer::gcd(&a, &b) != 1 {
                    continue;
                }
                // λb ≥ F(λa + 1) > 2(λa)^{3/2} forces λ < b²/(4a³)
                let limit = b * b / (4 * a * a * a) + 2;
                let found: Vec<BigInt> = (1..limit)
                    .filter(|l| f_compare(&big(l * b), &big(l * a + 1)) == Ordering::Equal)
                    .map(|l| big(l * a + 1))
                    .collect();
                assert_eq!(attaining_genera(&big(a), &big(b)), found, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn exceptional_interval() {
        assert_eq!(exceptional_genera(10_000), vec![5, 6, 7, 8]);
        assert_eq!(exceptional_orders(6), vec![59, 60]);
        assert_eq!(exceptional_orders(8), vec![83, 84]);
    }

    #[test]
    fn census_needs_every_order() {
        let gnu = BTreeMap::from([(47, 1), (48, 52)]);
        assert!(matches!(census_exceptional(&gnu, &BTreeMap::new()), Err(Error::MissingData(_))));
    }

    #[test]
    fn bound_report_verdicts() {
        assert_eq!(bound_report(&big(4), &big(36)).verdict, Verdict::Classical);
        assert_eq!(bound_report(&big(16), &big(200)).verdict, Verdict::AttainsF);
        assert_eq!(bound_report(&big(6), &big(60)).verdict, Verdict::Classical);
        assert_eq!(bound_report(&big(2), &big(48)).verdict, Verdict::ExceedsBound);
        assert_eq!(bound_report(&big(51), &big(720)).verdict, Verdict::BetweenBounds);
        assert_eq!(bound_report(&big(10), &big(20)).verdict, Verdict::Classical);
    }
}
