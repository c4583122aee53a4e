//! Three explicit families of Mumford curves with large automorphism groups:
//! Artin–Schreier–Mumford curves (x^q − x)(y^q − y) = c, Drinfeld modular
//! curves X(n) over F_q(T), and the genus 6 curves with N = I ∗_{Z₅} D₅.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_groups::{BranchDatum, GroupKind, GroupTag};
use crate::graph_of_groups::{kps_genus, GroupTree};
use crate::hurwitz_bounds::{bound_report, hurwitz_genus, BoundReport, CoverData};
use crate::localfield::prime_power;

#[derive(Debug, Clone, Serialize)]
pub struct FamilyRecord {
    pub family: String,
    pub parameters: String,
    #[serde(serialize_with = "crate::ser::display")]
    pub genus: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub aut_order: BigInt,
    pub aut_description: String,
    pub normalizer_tree: GroupTree,
    pub ends: Vec<BranchDatum>,
    #[serde(serialize_with = "crate::ser::display")]
    pub mu: BigRational,
    /// Genus from μ of the normalizer tree.
    #[serde(serialize_with = "crate::ser::display")]
    pub kps_genus: BigInt,
    /// Genus from Riemann–Hurwitz over the ends.
    #[serde(serialize_with = "crate::ser::display")]
    pub hurwitz_genus: BigRational,
    pub bound: BoundReport,
    pub stratum_dim: i64,
    pub schottky_rank: Option<u64>,
    pub flags: Vec<String>,
}

impl FamilyRecord {
    /// Closed-form genus, KPS genus and Riemann–Hurwitz genus coincide.
    pub fn is_consistent(&self) -> bool {
        self.kps_genus == self.genus
            && self.hurwitz_genus == BigRational::from_integer(self.genus.clone())
            && self.schottky_rank.is_none_or(|r| BigInt::from(r) == self.genus)
    }

    fn build(
        family: &str,
        parameters: String,
        genus: BigInt,
        aut_order: BigInt,
        aut_description: String,
        tree: GroupTree,
    ) -> Result<FamilyRecord> {
        tree.validate()?;
        let ends: Vec<BranchDatum> =
            tree.ends().iter().map(|e| BranchDatum::new(e.tag.order(), e.tag.p_part())).collect();
        let cover = CoverData::new(tree.p(), aut_order.clone(), ends.clone())?;
        Ok(FamilyRecord {
            family: family.into(),
            parameters,
            kps_genus: kps_genus(&tree, &aut_order)?,
            hurwitz_genus: hurwitz_genus(&cover),
            mu: tree.mu()?,
            bound: bound_report(&genus, &aut_order),
            stratum_dim: tree.herrlich_dim(0),
            genus,
            aut_order,
            aut_description,
            normalizer_tree: tree,
            ends,
            schottky_rank: None,
            flags: Vec::new(),
        })
    }
}

/// End stabilizers at a vertex whose only edge has tame order `edge`: the
/// point stabilizers of its branch data other than the one fixed by the edge.
fn ends_beside(v: &GroupTag, edge: u128) -> Result<Vec<GroupTag>> {
    let mut data = v.branch_data()?;
    let i = data
        .iter()
        .position(|b| b.ep == 1 && b.e == edge)
        .ok_or_else(|| Error::MalformedTree(format!("{v} has no branch point of order {edge}")))?;
    data.remove(i);
    data.into_iter()
        .map(|b| {
            let s = wild_exponent(v.p(), b.ep)
                .ok_or_else(|| Error::MalformedTree(format!("wild part {} of {v} is not a power of p", b.ep)))?;
            GroupTag::new(GroupKind::Borel(s, (b.e / b.ep) as u64), v.p())
        })
        .collect()
}

fn wild_exponent(p: u32, mut ep: u128) -> Option<u32> {
    let mut s = 0;
    while ep > 1 {
        if !ep.is_multiple_of(p as u128) {
            return None;
        }
        ep /= p as u128;
        s += 1;
    }
    Some(s)
}

fn tag(kind: GroupKind, p: u32) -> Result<GroupTag> {
    GroupTag::new(kind, p)
}

/// Two vertices joined by a cyclic edge, ends read off both branch data.
fn cyclic_amalgam(a: GroupTag, n: u64, b: GroupTag) -> Result<GroupTree> {
    let p = a.p();
    let mut tree = GroupTree::chain(&[a, b], &[tag(GroupKind::Cyclic(n), p)?]);
    for (i, v) in [a, b].iter().enumerate() {
        for end in ends_beside(v, n as u128)? {
            tree.add_end(i, end);
        }
    }
    Ok(tree)
}

/// X_t : (x^q − x)(y^q − y) = c with q = p^t, |c| < 1.
pub fn asm(p: u32, t: u32) -> Result<FamilyRecord> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    let q = (p as u64).checked_pow(t).ok_or(Error::FieldTooLarge(p as u64))?;
    if q == 2 {
        return Err(Error::GenusTooSmall("1 (q = 2)".into()));
    }
    let borel = tag(GroupKind::Borel(t, q - 1), p)?;
    let dihedral = tag(GroupKind::Dihedral(q - 1), p)?;
    let tree = cyclic_amalgam(borel, q - 1, dihedral)?;
    let qb = BigInt::from(q);
    let genus = (&qb - 1) * (&qb - 1);
    let aut = &qb * &qb * (&qb - 1) * 2;
    let desc = format!("(Z/{p})^{} ⋊ D_{}", 2 * t, q - 1);
    let mut rec = FamilyRecord::build("asm", format!("p={p} t={t}"), genus, aut, desc, tree)?;
    rec.schottky_rank = Some((q - 1) * (q - 1));
    Ok(rec)
}

/// |G(n)| = q^{3d} ∏ (1 − q^{−2 deg P}) over the prime divisors P of n.
pub fn drinfeld_order(q: u64, degrees: &[u32]) -> Result<BigInt> {
    let qb = BigRational::from_integer(q.into());
    let d: u32 = degrees.iter().sum();
    let mut x = num::pow(qb.clone(), 3 * d as usize);
    for &k in degrees {
        x *= BigRational::one() - num::pow(qb.clone(), 2 * k as usize).recip();
    }
    if !x.is_integer() {
        return Err(Error::InvalidParameter(format!("|G(n)| = {x} is not an integer")));
    }
    Ok(x.to_integer())
}

/// g − 1 = |G(n)|(q^d − q − 1)/(q^d(q² − 1)).
pub fn drinfeld_genus(q: u64, degrees: &[u32]) -> Result<BigInt> {
    let d: u32 = degrees.iter().sum();
    let qd = num::pow(BigInt::from(q), d as usize);
    let qb = BigInt::from(q);
    let gm1 = BigRational::new(drinfeld_order(q, degrees)? * (&qd - &qb - 1), &qd * (&qb * &qb - 1));
    if !gm1.is_integer() {
        return Err(Error::InvalidParameter(format!("g − 1 = {gm1} is not an integer")));
    }
    Ok(gm1.to_integer() + 1)
}

/// X(n) for n with prime divisors of the given degrees, d = Σ degrees.
pub fn drinfeld(q: u64, degrees: &[u32]) -> Result<FamilyRecord> {
    let (p, t) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidParameter("prime degrees must be positive".into()));
    }
    let d: u32 = degrees.iter().sum();
    let genus = drinfeld_genus(q, degrees)?;
    if genus < BigInt::from(2) {
        return Err(Error::GenusTooSmall(format!("{genus} (q = {q}, deg n = {d})")));
    }
    let pgl = tag(GroupKind::Pgl2(t), p)?;
    let edge = tag(GroupKind::Borel(t, q - 1), p)?;
    let tower = tag(GroupKind::Borel(t * d, q - 1), p)?;
    let tree =
        GroupTree::chain(&[pgl, tower], &[edge]).with_end(1, tower).with_end(0, tag(GroupKind::Cyclic(q + 1), p)?);
    let aut = drinfeld_order(q, degrees)?;
    let desc = format!("G(n) ⊂ PGL(2, A/n), deg n = {d}");
    let mut rec = FamilyRecord::build("drinfeld", format!("q={q} degrees={degrees:?}"), genus, aut, desc, tree)?;
    let mut seen = BTreeMap::new();
    for &k in degrees {
        *seen.entry(k).or_insert(0) += 1;
    }
    let repeated: Vec<u32> = seen.into_iter().filter(|&(_, c)| c > 1).map(|(k, _)| k).collect();
    if !repeated.is_empty() {
        rec.flags.push(format!("repeated prime degrees {repeated:?}: order formula applied to the multiset as given"));
    }
    if q == 2 || q == 3 {
        rec.flags.push(format!("q = {q}: the normalizer is not asserted to be unique for q ∈ {{2, 3}}"));
    }
    Ok(rec)
}

/// A0 = A1(A1 − 1) for the orders A0 of a point stabilizer and A1 of its
/// p-part.
pub fn henn_check(a0: u64, a1: u64) -> Result<bool> {
    if a1 == 0 || !a0.is_multiple_of(a1) {
        return Err(Error::InvalidParameter(format!("{a1} does not divide {a0}")));
    }
    if a1 > 1 && prime_power(a1).is_none() {
        return Err(Error::InvalidParameter(format!("{a1} is not a prime power")));
    }
    Ok(a1 > 1 && a0 == a1 * (a1 - 1))
}

/// Genus 6 curves with N = I ∗_{Z₅} D₅, for p ∉ {2, 5}.
pub fn icosahedral(p: u32) -> Result<FamilyRecord> {
    if p == 2 || p == 5 {
        return Err(Error::InvalidParameter(format!("I does not embed in PGL(2, k) for p = {p}")));
    }
    let tree = cyclic_amalgam(tag(GroupKind::Icosa, p)?, 5, tag(GroupKind::Dihedral(5), p)?)?;
    FamilyRecord::build("icosahedral", format!("p={p}"), 6.into(), 60.into(), "A_5".into(), tree)
}
