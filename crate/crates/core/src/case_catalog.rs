//! Normalizers N of Schottky groups for which X → X/Aut(X) ≅ P¹ is
//! branched above two or three points, as trees of groups with marked ends.
//!
//! Descriptors read like `A1 p=3 t=1 t1=2 PGL` or `F2 p=3 t=1 n=2 t1=0 t2=0`.
//! The Borel towers along half-lines are stored contracted: only the
//! terminal Borel appears, carrying the end.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_groups::{BranchDatum, GroupKind, GroupTag};
use crate::graph_of_groups::GroupTree;
use crate::hurwitz_bounds::{attaining_genera, branch_ratio, check_branch, lambda_criterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    /// (A1)–(A5), around P?L(2, q).
    A(u8),
    /// (A1′)–(A5′): p = 3 with I in place of P?L(2, q).
    APrime(u8),
    /// (A1″)–(A3″): p = 2 with dihedral vertices.
    ADouble(u8),
    B,
    C,
    D,
    E,
    F1,
    F2,
    F1Prime,
}

impl Family {
    /// Number of branch points of X → X/N.
    pub fn branch_points(&self) -> usize {
        match self {
            Family::D | Family::E | Family::F1 | Family::F2 | Family::F1Prime => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A(i) => write!(f, "A{i}"),
            Family::APrime(i) => write!(f, "A{i}'"),
            Family::ADouble(i) => write!(f, "A{i}''"),
            Family::B => write!(f, "B"),
            Family::C => write!(f, "C"),
            Family::D => write!(f, "D"),
            Family::E => write!(f, "E"),
            Family::F1 => write!(f, "F1"),
            Family::F2 => write!(f, "F2"),
            Family::F1Prime => write!(f, "F1'"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        let norm = s.replace('″', "''").replace('′', "'");
        let bad = || Error::Parse(format!("unknown case family {s}"));
        let (head, primes) = match norm.find('\'') {
            Some(i) => (&norm[..i], norm.len() - i),
            None => (norm.as_str(), 0),
        };
        if norm[head.len()..].chars().any(|c| c != '\'') {
            return Err(bad());
        }
        Ok(match (head, primes) {
            ("B", 0) => Family::B,
            ("C", 0) => Family::C,
            ("D", 0) => Family::D,
            ("E", 0) => Family::E,
            ("F1", 0) => Family::F1,
            ("F2", 0) => Family::F2,
            ("F1", 1) => Family::F1Prime,
            _ => {
                let i: u8 = head.strip_prefix('A').and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                match primes {
                    0 if (1..=5).contains(&i) => Family::A(i),
                    1 if (1..=5).contains(&i) => Family::APrime(i),
                    2 if (1..=3).contains(&i) => Family::ADouble(i),
                    _ => return Err(bad()),
                }
            }
        })
    }
}

/// PGL(2, q) or PSL(2, q) at the central vertices; PSL halves n± = q ± 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Level {
    #[default]
    Pgl,
    Psl,
}

impl Level {
    fn divisor(self) -> u64 {
        match self {
            Level::Pgl => 1,
            Level::Psl => 2,
        }
    }
}

/// The side groups Q(tᵢ) of (F1′).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum QShape {
    /// B(tᵢ, 2).
    #[default]
    Borel,
    /// PSL(2,3) ∗_{B(1,2)} B(tᵢ, 2).
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CaseId {
    pub family: Family,
    pub p: u32,
    pub t: u32,
    pub level: Level,
    /// t₁, …, t₅.
    pub ti: [Option<u32>; 5],
    /// t′₁, …, t′₄.
    pub tp: [Option<u32>; 4],
    pub n: Option<u64>,
    pub q_shape: [QShape; 2],
    /// (N_{v₁}, N_e, N_{v₀}) for the segments of (D) and (E).
    pub segment: Option<[GroupTag; 3]>,
}

impl CaseId {
    pub fn new(family: Family, p: u32) -> Self {
        CaseId {
            family,
            p,
            t: 1,
            level: Level::Pgl,
            ti: [None; 5],
            tp: [None; 4],
            n: None,
            q_shape: [QShape::Borel; 2],
            segment: None,
        }
    }

    pub fn with_t(mut self, t: u32) -> Self {
        self.t = t;
        self
    }
    pub fn with_level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }
    /// Sets tᵢ, 1-based.
    pub fn with_ti(mut self, i: usize, v: u32) -> Self {
        self.ti[i - 1] = Some(v);
        self
    }
    /// Sets t′ᵢ, 1-based.
    pub fn with_tp(mut self, i: usize, v: u32) -> Self {
        self.tp[i - 1] = Some(v);
        self
    }
    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }
    pub fn with_segment(mut self, v1: GroupTag, e: GroupTag, v0: GroupTag) -> Self {
        self.segment = Some([v1, e, v0]);
        self
    }

    fn ti(&self, i: usize) -> Result<u32> {
        self.ti[i - 1].ok_or_else(|| Error::CaseConstraint(format!("{} needs t{i}", self.family)))
    }
    fn tp(&self, i: usize) -> Result<u32> {
        self.tp[i - 1].ok_or_else(|| Error::CaseConstraint(format!("{} needs t{i}'", self.family)))
    }
    fn n(&self) -> Result<u64> {
        self.n.ok_or_else(|| Error::CaseConstraint(format!("{} needs n", self.family)))
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.t)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} p={}", self.family, self.p)?;
        if let Some([v1, e, v0]) = &self.segment {
            return write!(f, " v1={v1} e={e} v0={v0}");
        }
        if !matches!(self.family, Family::B | Family::C | Family::APrime(_) | Family::F1Prime) {
            write!(f, " t={}", self.t)?;
        }
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        for (i, v) in self.ti.iter().enumerate() {
            if let Some(v) = v {
                write!(f, " t{}={v}", i + 1)?;
            }
        }
        for (i, v) in self.tp.iter().enumerate() {
            if let Some(v) = v {
                write!(f, " t{}'={v}", i + 1)?;
            }
        }
        if self.family == Family::F1Prime {
            for (i, s) in self.q_shape.iter().enumerate() {
                if *s == QShape::Composite {
                    write!(f, " Q{}=PSL", i + 1)?;
                }
            }
        }
        if matches!(self.family, Family::A(_) | Family::F1) {
            write!(f, " {}", if self.level == Level::Pgl { "PGL" } else { "PSL" })?;
        }
        Ok(())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<CaseId> {
        let mut words = s.split_whitespace();
        let family: Family = words.next().ok_or_else(|| Error::Parse("empty case".into()))?.parse()?;
        let mut id = CaseId::new(family, 0);
        let mut tags: [Option<String>; 3] = [None, None, None];
        let int = |k: &str, v: &str| -> Result<u64> {
            v.parse().map_err(|_| Error::Parse(format!("{k}={v} is not a non-negative integer")))
        };
        for w in words {
            match w {
                "PGL" => {
                    id.level = Level::Pgl;
                    continue;
                }
                "PSL" => {
                    id.level = Level::Psl;
                    continue;
                }
                _ => {}
            }
            let (k, v) = w.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {w}")))?;
            let k = k.replace('′', "'");
            match k.as_str() {
                "p" => id.p = int(&k, v)? as u32,
                "t" => id.t = int(&k, v)? as u32,
                "n" => id.n = Some(int(&k, v)?),
                "v1" => tags[0] = Some(v.to_string()),
                "e" => tags[1] = Some(v.to_string()),
                "v0" => tags[2] = Some(v.to_string()),
                "Q1" | "Q2" => {
                    let i = if k == "Q1" { 0 } else { 1 };
                    id.q_shape[i] = match v {
                        "B" => QShape::Borel,
                        "PSL" => QShape::Composite,
                        _ => return Err(Error::Parse(format!("{k} must be B or PSL"))),
                    };
                }
                _ => {
                    let (i, primed) = match k.strip_suffix('\'') {
                        Some(base) => (base.strip_prefix('t').and_then(|x| x.parse::<usize>().ok()), true),
                        None => (k.strip_prefix('t').and_then(|x| x.parse::<usize>().ok()), false),
                    };
                    match (i, primed) {
                        (Some(i @ 1..=5), false) => id.ti[i - 1] = Some(int(&k, v)? as u32),
                        (Some(i @ 1..=4), true) => id.tp[i - 1] = Some(int(&k, v)? as u32),
                        _ => return Err(Error::Parse(format!("unknown key {k}"))),
                    }
                }
            }
        }
        if id.p == 0 {
            return Err(Error::Parse("missing p=".into()));
        }
        if tags.iter().any(|t| t.is_some()) {
            let mut parsed = Vec::new();
            for t in &tags {
                let t = t.as_ref().ok_or_else(|| Error::Parse("segments need v1=, e= and v0=".into()))?;
                parsed.push(GroupTag::parse(t, id.p)?);
            }
            id.segment = Some([parsed[0], parsed[1], parsed[2]]);
        }
        Ok(id)
    }
}

fn constraint(e: Error) -> Error {
    match e {
        Error::CaseConstraint(_) => e,
        other => Error::CaseConstraint(other.to_string()),
    }
}

fn tag(kind: GroupKind, p: u32) -> Result<GroupTag> {
    GroupTag::new(kind, p).map_err(constraint)
}

/// The vertex in the middle of an (A)-type chain and its two edge groups.
struct Center {
    tag: GroupTag,
    t: u32,
    n_minus: u64,
    n_plus: u64,
}

impl Center {
    fn borel(&self, s: u32, p: u32) -> Result<GroupTag> {
        tag(GroupKind::Borel(s, self.n_minus), p)
    }
    fn edge_b(&self, p: u32) -> Result<GroupTag> {
        self.borel(self.t, p)
    }
    fn edge_z(&self, p: u32) -> Result<GroupTag> {
        tag(GroupKind::Cyclic(self.n_plus), p)
    }
    fn plus_borel(&self, s: u32, p: u32) -> Result<GroupTag> {
        tag(GroupKind::Borel(s, self.n_plus), p)
    }
}

fn divides_check(what: &str, d: u32, x: u32) -> Result<()> {
    if d == 0 || !x.is_multiple_of(d) {
        return Err(Error::CaseConstraint(format!("{what}: {d} must divide {x}")));
    }
    Ok(())
}

impl CaseId {
    fn center(&self) -> Result<Center> {
        let p = self.p;
        match self.family {
            Family::APrime(_) | Family::F1Prime => {
                Ok(Center { tag: tag(GroupKind::Icosa, p)?, t: 1, n_minus: 2, n_plus: 5 })
            }
            _ => {
                if self.t == 0 {
                    return Err(Error::CaseConstraint("t must be positive".into()));
                }
                let h = self.level.divisor();
                if h == 2 && p == 2 {
                    return Err(Error::CaseConstraint("PSL(2,q) needs odd q".into()));
                }
                let q = self.q();
                let kind = if h == 1 { GroupKind::Pgl2(self.t) } else { GroupKind::Psl2(self.t) };
                Ok(Center { tag: tag(kind, p)?, t: self.t, n_minus: (q - 1) / h, n_plus: (q + 1) / h })
            }
        }
    }

    fn check_characteristic(&self) -> Result<()> {
        let p = self.p;
        let ok = match self.family {
            Family::APrime(_) | Family::F1Prime => p == 3,
            Family::ADouble(_) => p == 2,
            Family::F1 | Family::F2 => p != 2,
            _ => true,
        };
        if !crate::localfield::is_prime(p as u64) {
            return Err(Error::CaseConstraint(format!("{p} is not prime")));
        }
        if !ok {
            return Err(Error::CaseConstraint(format!("{} does not occur for p={p}", self.family)));
        }
        Ok(())
    }
}

fn a_chain(i: u8, c: &Center, id: &CaseId) -> Result<GroupTree> {
    let p = id.p;
    let (t, two_t) = (c.t, if id.family == Family::A(i) { 2 * c.t } else { c.t });
    let tree = match i {
        1 => {
            let t1 = id.ti(1)?;
            divides_check("t | t1", t, t1)?;
            GroupTree::chain(&[c.tag, c.borel(t1, p)?], &[c.edge_b(p)?])
                .with_end(1, c.borel(t1, p)?)
                .with_end(0, c.edge_z(p)?)
        }
        2 => {
            let (t1, t2) = (id.ti(1)?, id.ti(2)?);
            divides_check("t | t1", t, t1)?;
            divides_check("2t | t2", two_t, t2)?;
            GroupTree::chain(&[c.plus_borel(t2, p)?, c.tag, c.borel(t1, p)?], &[c.edge_z(p)?, c.edge_b(p)?])
                .with_end(0, c.plus_borel(t2, p)?)
                .with_end(2, c.borel(t1, p)?)
        }
        3 => {
            let (t1, t3) = (id.ti(1)?, id.ti(3)?);
            divides_check("t | t1", t, t1)?;
            divides_check("t | t3", t, t3)?;
            GroupTree::chain(
                &[c.borel(t3, p)?, c.tag, c.tag, c.borel(t1, p)?],
                &[c.edge_b(p)?, c.edge_z(p)?, c.edge_b(p)?],
            )
            .with_end(0, c.borel(t3, p)?)
            .with_end(3, c.borel(t1, p)?)
        }
        4 => {
            let t4 = id.ti(4)?;
            divides_check("2t | t4", two_t, t4)?;
            GroupTree::chain(&[c.plus_borel(t4, p)?, c.tag], &[c.edge_z(p)?])
                .with_end(0, c.plus_borel(t4, p)?)
                .with_end(1, c.edge_b(p)?)
        }
        5 => {
            let t5 = id.ti(5)?;
            divides_check("t | t5", t, t5)?;
            GroupTree::chain(&[c.borel(t5, p)?, c.tag, c.tag], &[c.edge_b(p)?, c.edge_z(p)?])
                .with_end(0, c.borel(t5, p)?)
                .with_end(2, c.edge_b(p)?)
        }
        _ => unreachable!(),
    };
    Ok(tree)
}

fn a_double(i: u8, id: &CaseId) -> Result<GroupTree> {
    let p = id.p;
    let e1 = tag(GroupKind::ElemAbelian(1), p)?;
    let t2 = id.ti(2)?;
    if t2 == 0 {
        return Err(Error::CaseConstraint("t2 must be positive".into()));
    }
    let et2 = tag(GroupKind::ElemAbelian(t2), p)?;
    let odd_n = || -> Result<u64> {
        let n = id.n()?;
        if n < 3 || n % 2 == 0 {
            return Err(Error::CaseConstraint(format!("n={n} must be odd and at least 3")));
        }
        Ok(n)
    };
    Ok(match i {
        1 => {
            let n = odd_n()?;
            let t1 = id.ti(1)?;
            let dn = tag(GroupKind::Dihedral(n), p)?;
            let b = tag(GroupKind::Borel(t1, n), p)?;
            GroupTree::chain(&[et2, dn, b], &[e1, tag(GroupKind::Cyclic(n), p)?]).with_end(0, et2).with_end(2, b)
        }
        2 => {
            let n = odd_n()?;
            let t1 = id.ti(1)?;
            let dn = tag(GroupKind::Dihedral(n), p)?;
            let et1 = tag(GroupKind::ElemAbelian(t1), p)?;
            GroupTree::chain(&[et2, dn, dn, et1], &[e1, tag(GroupKind::Cyclic(n), p)?, e1])
                .with_end(0, et2)
                .with_end(3, et1)
        }
        3 => {
            let c = id.center()?;
            let t1 = id.ti(1)?;
            divides_check("t | t1", c.t, t1)?;
            let dplus = tag(GroupKind::Dihedral(c.n_plus), p)?;
            GroupTree::chain(&[et2, dplus, c.tag, c.borel(t1, p)?], &[e1, c.edge_z(p)?, c.edge_b(p)?])
                .with_end(0, et2)
                .with_end(3, c.borel(t1, p)?)
        }
        _ => unreachable!(),
    })
}

/// Attaches Q(tᵢ) to the dihedral vertex `d` through Z₂ and marks its end.
fn attach_q(tree: &mut GroupTree, d: usize, ti: u32, shape: QShape, p: u32) -> Result<()> {
    let z2 = tag(GroupKind::Cyclic(2), p)?;
    let q = tag(GroupKind::Borel(ti, 2), p)?;
    match shape {
        QShape::Borel => {
            let v = tree.add_vertex(q);
            tree.add_edge(d, v, z2);
            tree.add_end(v, q);
        }
        QShape::Composite => {
            let psl = tag(GroupKind::Psl2(1), p)?;
            let u = tree.add_vertex(psl);
            tree.add_edge(d, u, z2);
            let v = tree.add_vertex(q);
            tree.add_edge(u, v, tag(GroupKind::Borel(1, 2), p)?);
            tree.add_end(v, q);
        }
    }
    Ok(())
}

/// The tree of groups of the case, with ends marked by their stabilizers.
pub fn build_case(id: &CaseId) -> Result<GroupTree> {
    id.check_characteristic()?;
    let p = id.p;
    let tree = match id.family {
        Family::A(i) | Family::APrime(i) => a_chain(i, &id.center()?, id)?,
        Family::ADouble(i) => a_double(i, id)?,
        Family::B => {
            let n = id.n()?;
            if n < 2 {
                return Err(Error::CaseConstraint("B needs n ≥ 2".into()));
            }
            let (s1, s2) = (id.tp(1)?, id.tp(2)?);
            if s1 == 0 || s2 == 0 {
                return Err(Error::CaseConstraint("t1' and t2' must be positive".into()));
            }
            let (b1, b2) = (tag(GroupKind::Borel(s1, n), p)?, tag(GroupKind::Borel(s2, n), p)?);
            GroupTree::chain(&[b1, b2], &[tag(GroupKind::Cyclic(n), p)?]).with_end(0, b1).with_end(1, b2)
        }
        Family::C => {
            let (s3, s4) = (id.tp(3)?, id.tp(4)?);
            if s3 == 0 || s4 == 0 {
                return Err(Error::CaseConstraint("t3' and t4' must be positive".into()));
            }
            let (e3, e4) = (tag(GroupKind::ElemAbelian(s3), p)?, tag(GroupKind::ElemAbelian(s4), p)?);
            GroupTree::chain(&[e3, e4], &[GroupTag::trivial(p)]).with_end(0, e3).with_end(1, e4)
        }
        Family::D | Family::E => {
            let [v1, e, v0] =
                id.segment.ok_or_else(|| Error::CaseConstraint(format!("{} needs v1=, e=, v0=", id.family)))?;
            if id.family == Family::D && (!e.is_trivial() || v0.is_trivial() || v1.is_trivial()) {
                return Err(Error::CaseConstraint("D needs a trivial edge between non-trivial vertices".into()));
            }
            if id.family == Family::E
                && (e.is_trivial() || !matches!(v0.kind(), GroupKind::Tetra | GroupKind::Octa | GroupKind::Icosa))
            {
                return Err(Error::CaseConstraint("E needs v0 ∈ {T, O, I} and a non-trivial edge".into()));
            }
            if v1 == e {
                return Err(Error::CaseConstraint("v1 must differ from the edge group".into()));
            }
            GroupTree::segment(v1, e, v0)
        }
        Family::F1 | Family::F1Prime => {
            let c = id.center()?;
            let (t1, t2, t3) = (id.ti(1)?, id.ti(2)?, id.ti(3)?);
            divides_check("t | t3", c.t, t3)?;
            let mut tree = GroupTree::new(p);
            let b = tree.add_vertex(c.borel(t3, p)?);
            let v = tree.add_vertex(c.tag);
            let d = tree.add_vertex(tag(GroupKind::Dihedral(c.n_plus), p)?);
            tree.add_edge(b, v, c.edge_b(p)?);
            tree.add_edge(v, d, c.edge_z(p)?);
            tree.add_end(b, c.borel(t3, p)?);
            let shapes = if id.family == Family::F1 { [QShape::Borel; 2] } else { id.q_shape };
            attach_q(&mut tree, d, t1, shapes[0], p)?;
            attach_q(&mut tree, d, t2, shapes[1], p)?;
            tree
        }
        Family::F2 => {
            let n = id.n()?;
            if n < 2 {
                return Err(Error::CaseConstraint("F2 needs n ≥ 2".into()));
            }
            let (t1, t2) = (id.ti(1)?, id.ti(2)?);
            let mut tree = GroupTree::new(p);
            let bt = tag(GroupKind::Borel(id.t, n), p)?;
            let b = tree.add_vertex(bt);
            let d = tree.add_vertex(tag(GroupKind::Dihedral(n), p)?);
            tree.add_edge(b, d, tag(GroupKind::Cyclic(n), p)?);
            tree.add_end(b, bt);
            attach_q(&mut tree, d, t1, QShape::Borel, p)?;
            attach_q(&mut tree, d, t2, QShape::Borel, p)?;
            tree
        }
    };
    tree.validate().map_err(constraint)?;
    Ok(tree)
}

/// Branch data read off the marked ends: (|G_end|, p-part of G_end).
pub fn case_cover(id: &CaseId) -> Result<Vec<BranchDatum>> {
    let tree = build_case(id)?;
    if tree.ends().is_empty() {
        return Err(Error::CaseConstraint(format!("{} is recorded as a bare segment without ends", id.family)));
    }
    let mut out = Vec::new();
    for end in tree.ends() {
        let b = BranchDatum::new(end.tag.order(), end.tag.p_part());
        check_branch(id.p, &b).map_err(constraint)?;
        out.push(b);
    }
    Ok(out)
}

fn big_pow(q: u64, e: u32) -> BigInt {
    num::pow(BigInt::from(q), e as usize)
}

/// The closed-form pair (a, b) with (g − 1)/|A| = a/b, not reduced.
pub fn case_ab(id: &CaseId) -> Result<(BigInt, BigInt)> {
    build_case(id)?;
    let not_in_table = || Error::NotInTable(id.to_string());
    match id.family {
        Family::A(i) => {
            let t = id.t;
            let q = id.q();
            let qb = BigInt::from(q);
            let h = BigInt::from(id.level.divisor());
            let qq = big_pow(q, 2) - 1;
            let one = BigInt::one();
            let ix = |j: usize| -> Result<u32> { Ok(id.ti(j)? / t) };
            Ok(match i {
                1 => {
                    let n = ix(1)?;
                    (big_pow(q, n) - &qb - one, big_pow(q, n) * qq / h)
                }
                2 => {
                    let (n, m) = (ix(2)?, ix(1)?);
                    if n >= m {
                        (
                            big_pow(q, n + 1) - big_pow(q, n - m + 1) - big_pow(q, n - m) - &qb + one,
                            big_pow(q, n) * qq / h,
                        )
                    } else {
                        (
                            big_pow(q, m + 1) - big_pow(q, m - n + 1) + big_pow(q, m - n) - &qb - one,
                            big_pow(q, m) * qq / h,
                        )
                    }
                }
                3 => {
                    let (x, y) = (ix(1)?, ix(3)?);
                    let (n, m) = (x.min(y), x.max(y));
                    (big_pow(q, m) - big_pow(q, m - n) - one, big_pow(q, m) * (&qb - 1) / h)
                }
                4 => {
                    let n = ix(4)?;
                    (big_pow(q, n + 1) - big_pow(q, n) - big_pow(q, n - 1) - &qb + one, big_pow(q, n) * qq / h)
                }
                5 => {
                    let n = ix(5)?;
                    (big_pow(q, n) - big_pow(q, n - 1) - one, big_pow(q, n) * (&qb - 1) / h)
                }
                _ => unreachable!(),
            })
        }
        Family::F1 | Family::F2 | Family::F1Prime => {
            if id.ti[0] != Some(0) || id.ti[1] != Some(0) {
                return Err(not_in_table());
            }
            // ramification (2, 2, nQ) with Q the wild part of the third end
            let wild = case_cover(id)?.into_iter().find(|b| b.ep > 1).ok_or_else(not_in_table)?;
            let qw = BigInt::from(wild.ep);
            let n = BigInt::from(wild.e / wild.ep);
            Ok((&qw - 2, n * &qw * 2))
        }
        _ => Err(not_in_table()),
    }
}

/// p^k for the smallest k > 0 with n | p^k − 1.
fn p_to_order(p: u32, n: u64) -> BigInt {
    let mut k = 1u32;
    let mut x = p as u64 % n.max(1);
    while n > 1 && x != 1 {
        x = x * p as u64 % n;
        k += 1;
    }
    num::pow(BigInt::from(p), k as usize)
}

/// A lower bound λ₀ for gcd(g − 1, |Aut(X)|) known for the case, used
/// with the reduced (a, b).
pub fn lambda0(id: &CaseId) -> Result<BigInt> {
    let one = BigInt::one();
    let q = id.q();
    Ok(match id.family {
        Family::A(1) if id.ti(1)? == 2 * id.t => BigInt::from(q) * q,
        Family::A(5) if id.ti(5)? == id.t => BigInt::from((q + 1) / id.level.divisor()),
        Family::B if id.tp(1)? == id.tp(2)? => p_to_order(id.p, id.n()?),
        Family::C if id.tp(3)? == id.tp(4)? => BigInt::from(id.p),
        Family::F1 => BigInt::from((q + 1) / id.level.divisor()),
        Family::F1Prime => BigInt::from(5),
        Family::F2 if id.ti(1)? == 0 && id.ti(2)? == 0 => p_to_order(id.p, id.n()?) * 2,
        Family::ADouble(1) if id.ti(2)? == 1 => p_to_order(2, id.n()?) * 2,
        Family::ADouble(3) if id.ti(2)? == 1 => BigInt::from(q + 1),
        _ => one,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseVerdict {
    /// μ ≥ 1/12, so |Aut(X)| ≤ 12(g − 1).
    Classical,
    /// λ₀b ≤ F(λ₀a + 1), so |Aut(X)| ≤ F(g).
    FBound,
    /// Some genus in the family has |Aut(X)| = F(g).
    AttainsBound,
    /// Neither test applies with the recorded λ₀.
    Unresolved,
}

impl fmt::Display for CaseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseVerdict::Classical => "classical bound",
            CaseVerdict::FBound => "F bound",
            CaseVerdict::AttainsBound => "attains bound",
            CaseVerdict::Unresolved => "unresolved",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub tree: serde_json::Value,
    pub ends: Vec<BranchDatum>,
    #[serde(serialize_with = "crate::ser::display")]
    pub mu: BigRational,
    #[serde(serialize_with = "crate::ser::display")]
    pub hurwitz_ratio: BigRational,
    pub consistent: bool,
    #[serde(serialize_with = "crate::ser::display")]
    pub a: BigInt,
    #[serde(serialize_with = "crate::ser::display")]
    pub b: BigInt,
    pub table_ab: Option<(String, String)>,
    #[serde(serialize_with = "crate::ser::display")]
    pub lambda0: BigInt,
    pub lambda0_holds: bool,
    pub lambda1_holds: bool,
    pub classical: bool,
    pub attaining_genera: Vec<String>,
    pub verdict: CaseVerdict,
}

/// Whether some genus in the case's family reaches |Aut(X)| = F(g).
pub fn attains_bound(id: &CaseId) -> Result<bool> {
    let mu = build_case(id)?.mu()?;
    if !mu.is_positive() {
        return Ok(false);
    }
    Ok(!attaining_genera(mu.numer(), mu.denom()).is_empty())
}

pub fn case_report(id: &CaseId) -> Result<CaseReport> {
    let tree = build_case(id)?;
    let mu = tree.mu()?;
    let ends: Vec<BranchDatum> = tree.ends().iter().map(|e| BranchDatum::new(e.tag.order(), e.tag.p_part())).collect();
    let hurwitz_ratio = if ends.is_empty() { mu.clone() } else { branch_ratio(&ends) };
    let table_ab = case_ab(id).ok();
    let mut consistent = hurwitz_ratio == mu;
    if let Some((a, b)) = &table_ab {
        consistent &= BigRational::new(a.clone(), b.clone()) == mu;
    }
    let (a, b) = (mu.numer().clone(), mu.denom().clone());
    let l0 = lambda0(id)?;
    let positive = mu.is_positive();
    let lambda0_holds = positive && lambda_criterion(&l0, &a, &b);
    let lambda1_holds = positive && lambda_criterion(&BigInt::one(), &a, &b);
    let classical = mu >= BigRational::new(1.into(), 12.into());
    let genera = if positive { attaining_genera(&a, &b) } else { Vec::new() };
    let verdict = if !genera.is_empty() {
        CaseVerdict::AttainsBound
    } else if classical {
        CaseVerdict::Classical
    } else if lambda0_holds {
        CaseVerdict::FBound
    } else {
        CaseVerdict::Unresolved
    };
    Ok(CaseReport {
        case: id.to_string(),
        tree: tree.to_json(),
        ends,
        mu,
        hurwitz_ratio,
        consistent,
        a,
        b,
        table_ab: table_ab.map(|(a, b)| (a.to_string(), b.to_string())),
        lambda0: l0,
        lambda0_holds,
        lambda1_holds,
        classical,
        attaining_genera: genera.iter().map(|g| g.to_string()).collect(),
        verdict,
    })
}

/// Every (A1)–(A5) case with p in `primes`, t ≤ `t_max` and all tᵢ ≤ `param_max`,
/// for both PGL and (odd p) PSL.
pub fn a_family_grid(primes: &[u32], t_max: u32, param_max: u32) -> Vec<CaseId> {
    let mut out = Vec::new();
    for &p in primes {
        for t in 1..=t_max {
            let levels: &[Level] = if p == 2 { &[Level::Pgl] } else { &[Level::Pgl, Level::Psl] };
            for &level in levels {
                let base = |i: u8| CaseId::new(Family::A(i), p).with_t(t).with_level(level);
                let singles: Vec<u32> = (1..=param_max / t).map(|k| k * t).collect();
                let doubles: Vec<u32> = (1..=param_max / (2 * t)).map(|k| 2 * k * t).collect();
                for &t1 in &singles {
                    out.push(base(1).with_ti(1, t1));
                    for &t2 in &doubles {
                        out.push(base(2).with_ti(1, t1).with_ti(2, t2));
                    }
                    for &t3 in &singles {
                        out.push(base(3).with_ti(1, t1).with_ti(3, t3));
                    }
                    out.push(base(5).with_ti(5, t1));
                }
                for &t4 in &doubles {
                    out.push(base(4).with_ti(4, t4));
                }
            }
        }
    }
    out
}

/// Whether the family-level side conditions keep a grid case meaningful:
/// the Borel tower parameters are strictly larger than the edge Borel.
pub fn is_proper(id: &CaseId) -> bool {
    let t = id.t;
    match id.family {
        Family::A(1) => id.ti[0].is_some_and(|x| x > t),
        Family::A(2) => id.ti[0].is_some_and(|x| x > t),
        Family::A(3) => id.ti[0].is_some_and(|x| x > t) && id.ti[2].is_some_and(|x| x > t),
        Family::A(5) => id.ti[4].is_some_and(|x| x > t),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(s: &str) -> CaseId {
        s.parse().unwrap()
    }
    fn q(x: i64, y: i64) -> BigRational {
        BigRational::new(x.into(), y.into())
    }

    #[test]
    fn descriptors_round_trip() {
        for s in [
            "A1 p=3 t=1 t1=2 PGL",
            "A3 p=5 t=1 t1=2 t3=3 PSL",
            "F2 p=3 t=1 n=2 t1=0 t2=0",
            "B p=3 n=2 t1'=1 t2'=1",
            "A1'' p=2 t=1 n=3 t1=2 t2=1",
            "F1' p=3 t1=0 t2=1 t3=2 Q2=PSL",
            "E p=7 v1=Dn(3) e=Zn(3) v0=T",
        ] {
            assert_eq!(case(s).to_string(), s);
        }
        assert!("A6 p=3".parse::<CaseId>().is_err());
        assert!("A1 t=1".parse::<CaseId>().is_err());
        assert_eq!(case("A2″ p=2 n=3 t1=1 t2=1").family, Family::ADouble(2));
    }

    #[test]
    fn a1_tree_shape() {
        let tree = build_case(&case("A1 p=3 t=1 t1=2 PGL")).unwrap();
        let tags: Vec<String> = tree.vertices().iter().map(|v| v.tag.to_string()).collect();
        assert_eq!(tags, ["PGL2(1)", "B(2,2)"]);
        assert_eq!(tree.edges()[0].tag.to_string(), "B(1,2)");
        let ends: Vec<String> = tree.ends().iter().map(|e| e.tag.to_string()).collect();
        assert_eq!(ends, ["B(2,2)", "Zn(4)"]);
        assert_eq!(tree.mu().unwrap(), q(5, 72));
    }

    #[test]
    fn b_and_f2_shapes() {
        let tree = build_case(&case("B p=3 n=2 t1'=1 t2'=1")).unwrap();
        assert_eq!(tree.edges()[0].tag.to_string(), "Zn(2)");
        assert_eq!(tree.ends().len(), 2);
        let tree = build_case(&case("F2 p=5 t=1 n=4 t1=0 t2=0")).unwrap();
        let tags: Vec<String> = tree.vertices().iter().map(|v| v.tag.to_string()).collect();
        assert_eq!(tags, ["B(1,4)", "Dn(4)", "Zn(2)", "Zn(2)"]);
        assert_eq!(
            case_cover(&case("F2 p=5 t=1 n=4 t1=0 t2=0")).unwrap(),
            vec![BranchDatum::new(20, 5), BranchDatum::new(2, 1), BranchDatum::new(2, 1)]
        );
    }

    #[test]
    fn c_is_totally_wild() {
        let b = case_cover(&case("C p=3 t3'=1 t4'=2")).unwrap();
        assert_eq!(b, vec![BranchDatum::new(3, 3), BranchDatum::new(9, 9)]);
    }

    #[test]
    fn table_rows_agree_with_mu_and_hurwitz() {
        for id in a_family_grid(&[2, 3, 5, 7], 3, 6) {
            let r = case_report(&id).unwrap();
            assert!(r.consistent, "{id}");
        }
    }

    #[test]
    fn a2_and_a4_need_even_multiples() {
        assert!(matches!(build_case(&case("A2 p=3 t=1 t1=1 t2=3")), Err(Error::CaseConstraint(_))));
        assert!(matches!(build_case(&case("A4 p=3 t=1 t4=1")), Err(Error::CaseConstraint(_))));
    }

    #[test]
    fn characteristic_restrictions() {
        assert!(build_case(&case("F2 p=2 t=1 n=1 t1=0 t2=0")).is_err());
        assert!(build_case(&case("A1' p=5 t1=1")).is_err());
        assert!(build_case(&case("A1 p=2 t=1 t1=2 PSL")).is_err());
        assert!(build_case(&case("A2'' p=3 n=3 t1=1 t2=1")).is_err());
    }

    #[test]
    fn f2_attains_exactly_when_n_is_q_minus_one() {
        for (p, t) in [(3u32, 1u32), (5, 1), (7, 1), (3, 2)] {
            let qq = (p as u64).pow(t);
            for n in 2..qq {
                if (qq - 1) % n != 0 {
                    continue;
                }
                let id = CaseId::new(Family::F2, p).with_t(t).with_n(n).with_ti(1, 0).with_ti(2, 0);
                assert_eq!(attains_bound(&id).unwrap(), n == qq - 1, "{id}");
                let (a, b) = case_ab(&id).unwrap();
                assert_eq!((a, b), (BigInt::from(qq - 2), BigInt::from(2 * n * qq)));
            }
        }
    }

    #[test]
    fn f2_report_verdict() {
        let r = case_report(&case("F2 p=3 t=1 n=2 t1=0 t2=0")).unwrap();
        assert_eq!(r.verdict, CaseVerdict::AttainsBound);
        assert_eq!(r.verdict.to_string(), "attains bound");
    }

    #[test]
    fn lambda0_examples() {
        let r = case_report(&case("A5 p=3 t=1 t5=1 PGL")).unwrap();
        assert_eq!((r.a.clone(), r.b.clone()), (BigInt::from(1), BigInt::from(6)));
        assert_eq!(r.lambda0, BigInt::from(4));
        assert!(r.lambda0_holds);
        let r = case_report(&case("A5 p=11 t=1 t5=1 PGL")).unwrap();
        assert!(r.lambda0_holds && !r.lambda1_holds);
        let r = case_report(&case("A1 p=3 t=1 t1=2 PGL")).unwrap();
        assert_eq!(r.lambda0, BigInt::from(9));
        assert!(r.lambda0_holds && !r.lambda1_holds);
    }

    #[test]
    fn composite_q_is_rejected() {
        let err = build_case(&case("F1' p=3 t1=1 t2=1 t3=1 Q1=PSL")).unwrap_err();
        assert!(err.to_string().contains("not a subgroup"), "{err}");
        assert!(build_case(&case("F1' p=3 t1=1 t2=0 t3=1")).is_ok());
    }

    #[test]
    fn double_primed_cases() {
        let r = case_report(&case("A1'' p=2 t=1 n=3 t1=2 t2=1")).unwrap();
        assert_eq!(r.mu, q(1, 12));
        assert!(r.consistent);
        let r = case_report(&case("A3'' p=2 t=2 t1=4 t2=1")).unwrap();
        // ½q^n − 1 over q^n(q − 1) with q = 4, n = 2
        assert_eq!(r.mu, q(7, 48));
    }

    #[test]
    fn segments() {
        let r = build_case(&case("E p=7 v1=Dn(3) e=Zn(3) v0=T")).unwrap();
        assert_eq!(r.mu().unwrap(), q(1, 12));
        assert!(build_case(&case("D p=7 v1=Zn(2) e=1 v0=T")).is_ok());
        assert!(build_case(&case("D p=7 v1=Zn(2) e=Zn(2) v0=T")).is_err());
        assert!(matches!(case_cover(&case("D p=7 v1=Zn(2) e=1 v0=T")), Err(Error::CaseConstraint(_))));
    }
}
