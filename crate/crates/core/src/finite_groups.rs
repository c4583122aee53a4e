//! Finite subgroups of PGL(2) in characteristic p, as symbolic tags with
//! orders, branch data, subgroup rules and explicit matrix realizations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{is_prime, Digit, Fq, LocalElement, LocalField};
use crate::matrix::{generate_group, Mat2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Trivial,
    Cyclic(u64),
    Dihedral(u64),
    ElemAbelian(u32),
    Borel(u32, u64),
    Tetra,
    Octa,
    Icosa,
    Pgl2(u32),
    Psl2(u32),
}

/// A finite subgroup of PGL(2, k) up to conjugacy, for k of characteristic `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupTag {
    kind: GroupKind,
    p: u32,
}

/// Ramification of one branch point: inertia order `e` and wild part `ep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchDatum {
    pub e: u128,
    pub ep: u128,
}

impl BranchDatum {
    pub fn tame(e: u128) -> Self {
        BranchDatum { e, ep: 1 }
    }
    pub fn new(e: u128, ep: u128) -> Self {
        BranchDatum { e, ep }
    }
}

fn pow(p: u32, t: u32) -> u128 {
    (p as u128).pow(t)
}

impl GroupTag {
    /// Validates `kind` for characteristic `p`, rewriting degenerate
    /// parameters to their canonical tag (e.g. B(0,n) = Z_n, D_p = B(1,2)).
    pub fn new(kind: GroupKind, p: u32) -> Result<GroupTag> {
        use GroupKind::*;
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let bad = |why: &str| Err(Error::InvalidTag(format!("{kind:?} for p={p}: {why}")));
        let pp = p as u64;
        let kind = match kind {
            Trivial => Trivial,
            Cyclic(0) => return bad("order must be positive"),
            Cyclic(1) => Trivial,
            Cyclic(n) if n == pp => ElemAbelian(1),
            Cyclic(n) if n % pp == 0 => return bad("cyclic order divisible by p"),
            Cyclic(n) => Cyclic(n),
            Dihedral(0) => return bad("order must be positive"),
            Dihedral(1) => return GroupTag::new(Cyclic(2), p),
            Dihedral(n) if n == pp && p != 2 => Borel(1, 2),
            Dihedral(n) if n % pp == 0 => return bad("dihedral order divisible by p"),
            Dihedral(n) => Dihedral(n),
            ElemAbelian(0) => Trivial,
            ElemAbelian(t) => ElemAbelian(t),
            Borel(0, n) => return GroupTag::new(Cyclic(n), p),
            Borel(t, 1) => ElemAbelian(t),
            Borel(t, n) => {
                let q = (pp as u128).checked_pow(t);
                if n == 0 || !q.is_some_and(|q| (q - 1) % n as u128 == 0) {
                    return bad("n must divide p^t - 1");
                }
                Borel(t, n)
            }
            Tetra | Octa if p == 2 || p == 3 => return bad("requires p ∉ {2,3}"),
            Icosa if p == 2 || p == 5 => return bad("requires p ∉ {2,5}"),
            Pgl2(0) | Psl2(0) => return bad("degree must be positive"),
            Psl2(_) if p == 2 => return bad("PSL2 equals PGL2 in characteristic 2"),
            k => k,
        };
        Ok(GroupTag { kind, p })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn trivial(p: u32) -> GroupTag {
        GroupTag { kind: GroupKind::Trivial, p }
    }

    pub fn parse(s: &str, p: u32) -> Result<GroupTag> {
        use GroupKind::*;
        let s = s.trim();
        let bad = || Error::InvalidTag(s.to_string());
        let args = |name: &str| -> Option<Vec<u64>> {
            let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
            inner.split(',').map(|x| x.trim().parse().ok()).collect()
        };
        let kind = match s {
            "1" => Trivial,
            "T" => Tetra,
            "O" => Octa,
            "I" => Icosa,
            _ => {
                if let Some(a) = args("Zn") {
                    Cyclic(*a.first().ok_or_else(bad)?)
                } else if let Some(a) = args("Dn") {
                    Dihedral(*a.first().ok_or_else(bad)?)
                } else if let Some(a) = args("E") {
                    ElemAbelian(*a.first().ok_or_else(bad)? as u32)
                } else if let Some(a) = args("B") {
                    if a.len() != 2 {
                        return Err(bad());
                    }
                    Borel(a[0] as u32, a[1])
                } else if let Some(a) = args("PGL2") {
                    Pgl2(*a.first().ok_or_else(bad)? as u32)
                } else if let Some(a) = args("PSL2") {
                    Psl2(*a.first().ok_or_else(bad)? as u32)
                } else {
                    return Err(bad());
                }
            }
        };
        GroupTag::new(kind, p)
    }

    pub fn order(&self) -> u128 {
        use GroupKind::*;
        let p = self.p;
        match self.kind {
            Trivial => 1,
            Cyclic(n) => n as u128,
            Dihedral(n) => 2 * n as u128,
            ElemAbelian(t) => pow(p, t),
            Borel(t, n) => pow(p, t) * n as u128,
            Tetra => 12,
            Octa => 24,
            Icosa => 60,
            Pgl2(t) => {
                let q = pow(p, t);
                q * (q * q - 1)
            }
            Psl2(t) => {
                let q = pow(p, t);
                q * (q * q - 1) / 2
            }
        }
    }

    /// Order of a Sylow p-subgroup.
    pub fn p_part(&self) -> u128 {
        let mut n = self.order();
        let mut part = 1;
        while n.is_multiple_of(self.p as u128) {
            n /= self.p as u128;
            part *= self.p as u128;
        }
        part
    }

    /// No nontrivial p-subgroup.
    pub fn is_classical(&self) -> bool {
        self.p_part() == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == GroupKind::Trivial
    }

    /// Abstractly cyclic (the trivial group included).
    pub fn is_cyclic(&self) -> bool {
        matches!(self.kind, GroupKind::Trivial | GroupKind::Cyclic(_) | GroupKind::ElemAbelian(1))
    }

    /// Order of the prime-to-p cyclic complement of an edge group E_t ⋊ Z_n.
    pub fn tame_part(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Trivial | GroupKind::ElemAbelian(_) => Some(1),
            GroupKind::Cyclic(n) | GroupKind::Borel(_, n) => Some(n),
            _ => None,
        }
    }

    /// Groups of the form E_t ⋊ Z_n.
    pub fn admissible_edge(&self) -> bool {
        self.tame_part().is_some()
    }

    fn cyclic(n: u64, p: u32) -> GroupTag {
        GroupTag::new(GroupKind::Cyclic(n), p).expect("valid cyclic tag")
    }

    /// Branch data of P¹ → P¹/G.
    pub fn branch_data(&self) -> Result<Vec<BranchDatum>> {
        use GroupKind::*;
        let p = self.p;
        let t = BranchDatum::tame;
        Ok(match self.kind {
            Trivial => vec![],
            Cyclic(n) => vec![t(n as u128), t(n as u128)],
            Dihedral(n) if p == 2 => vec![BranchDatum::new(2, 2), t(n as u128)],
            Dihedral(n) => vec![t(2), t(2), t(n as u128)],
            ElemAbelian(s) => vec![BranchDatum::new(pow(p, s), pow(p, s))],
            Borel(s, n) => vec![BranchDatum::new(pow(p, s) * n as u128, pow(p, s)), t(n as u128)],
            Tetra => vec![t(2), t(3), t(3)],
            Octa => vec![t(2), t(3), t(4)],
            Icosa if p == 3 => vec![BranchDatum::new(6, 3), t(5)],
            Icosa => vec![t(2), t(3), t(5)],
            Pgl2(s) => {
                let q = pow(p, s);
                vec![BranchDatum::new(q * (q - 1), q), t(q + 1)]
            }
            Psl2(s) => {
                let q = pow(p, s);
                vec![BranchDatum::new(q * (q - 1) / 2, q), t(q.div_ceil(2))]
            }
        })
    }

    /// Orders of the maximal cyclic subgroups.
    pub fn maximal_cyclic_orders(&self) -> Vec<u128> {
        use GroupKind::*;
        let p = self.p as u128;
        let mut v: Vec<u128> = match self.kind {
            Trivial => vec![1],
            Cyclic(n) => vec![n as u128],
            Dihedral(n) => vec![n as u128, 2],
            ElemAbelian(_) => vec![p],
            Borel(_, n) => vec![p, n as u128],
            Tetra => vec![2, 3],
            Octa => vec![2, 3, 4],
            Icosa => vec![2, 3, 5],
            Pgl2(s) => {
                let q = pow(self.p, s);
                vec![p, q - 1, q + 1]
            }
            Psl2(s) => {
                let q = pow(self.p, s);
                vec![p, (q - 1) / 2, q.div_ceil(2)]
            }
        };
        if v.len() > 1 {
            v.retain(|&x| x > 1);
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The two edge groups allowed at a PGL2/PSL2 vertex: the Borel
    /// B(t, n₋) and Z_{n₊}, with n± = (q±1) or (q±1)/2. In characteristic 3
    /// the icosahedral group behaves the same way with B(1,2) and Z_5.
    pub fn link_edge_groups(&self) -> Option<[GroupTag; 2]> {
        let (t, half) = match self.kind {
            GroupKind::Pgl2(t) => (t, 1),
            GroupKind::Psl2(t) => (t, 2),
            GroupKind::Icosa if self.p == 3 => {
                return Some([GroupTag { kind: GroupKind::Borel(1, 2), p: 3 }, GroupTag::cyclic(5, 3)])
            }
            _ => return None,
        };
        let q = pow(self.p, t) as u64;
        let borel = GroupTag::new(GroupKind::Borel(t, (q - 1) / half), self.p).ok()?;
        Some([borel, GroupTag::cyclic((q + 1) / half, self.p)])
    }

    fn q_of(&self, t: u32) -> u128 {
        pow(self.p, t)
    }
}

/// Whether `sub` is isomorphic to a subgroup of `amb`, by the subgroup
/// structure of each family.
pub fn contains(amb: &GroupTag, sub: &GroupTag) -> bool {
    use GroupKind::*;
    if amb.p != sub.p || !amb.order().is_multiple_of(sub.order()) {
        return false;
    }
    if sub.is_trivial() || amb == sub {
        return true;
    }
    let p = amb.p;
    let divides = |m: u64, n: u128| n.is_multiple_of(m as u128);
    match (amb.kind, sub.kind) {
        (Trivial, _) => false,
        (Cyclic(n), Cyclic(m)) => n % m == 0,
        (Cyclic(_), _) => false,
        (Dihedral(n), Cyclic(m)) => n % m == 0 || m == 2,
        (Dihedral(_), ElemAbelian(1)) => p == 2,
        (Dihedral(n), Dihedral(m)) => n % m == 0,
        (Dihedral(_), _) => false,
        (ElemAbelian(t), ElemAbelian(s)) => s <= t,
        (ElemAbelian(_), _) => false,
        (Borel(t, _), ElemAbelian(s)) => s <= t,
        (Borel(_, n), Cyclic(m)) => n % m == 0,
        (Borel(t, n), Borel(s, m)) => s <= t && n % m == 0,
        (Borel(..), _) => false,
        (Tetra, Cyclic(m)) => m == 2 || m == 3,
        (Tetra, Dihedral(2)) => true,
        (Tetra, _) => false,
        (Octa, Cyclic(m)) => (2..=4).contains(&m),
        (Octa, Dihedral(m)) => (2..=4).contains(&m),
        (Octa, Tetra) => true,
        (Octa, _) => false,
        (Icosa, Cyclic(m)) => [2, 3, 5].contains(&m),
        (Icosa, Dihedral(m)) => [2, 3, 5].contains(&m),
        (Icosa, Tetra) => true,
        (Icosa, ElemAbelian(1)) => p == 3,
        (Icosa, Borel(1, 2)) => p == 3,
        (Icosa, Psl2(1)) => p == 3,
        (Icosa, _) => false,
        (Pgl2(t) | Psl2(t), _) => {
            let half = if matches!(amb.kind, Psl2(_)) { 2 } else { 1 };
            let q = amb.q_of(t);
            let (nm, np) = ((q - 1) / half, (q + 1) / half);
            match sub.kind {
                Cyclic(m) | Dihedral(m) => divides(m, nm) || divides(m, np),
                ElemAbelian(s) => s <= t,
                Borel(s, m) => s <= t && divides(m, nm),
                Tetra => p != 2,
                Octa => half == 1 || q % 8 == 1 || q % 8 == 7,
                Icosa => (q * q) % 5 == 1,
                Pgl2(s) => t % s == 0 && (half == 1 || (t / s) % 2 == 0),
                Psl2(s) => t % s == 0,
                Trivial => true,
            }
        }
    }
}

/// Whether a cyclic `sub` is (up to conjugacy) a maximal cyclic subgroup of `amb`.
pub fn is_maximal_cyclic(sub: &GroupTag, amb: &GroupTag) -> Result<bool> {
    if !sub.is_cyclic() {
        return Err(Error::InvalidTag(format!("{sub} is not cyclic")));
    }
    if !contains(amb, sub) {
        return Err(Error::NotEmbeddable { sub: sub.to_string(), amb: amb.to_string() });
    }
    Ok(amb.maximal_cyclic_orders().contains(&sub.order()))
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupKind::*;
        match self.kind {
            Trivial => write!(f, "1"),
            Cyclic(n) => write!(f, "Zn({n})"),
            Dihedral(n) => write!(f, "Dn({n})"),
            ElemAbelian(t) => write!(f, "E({t})"),
            Borel(t, n) => write!(f, "B({t},{n})"),
            Tetra => write!(f, "T"),
            Octa => write!(f, "O"),
            Icosa => write!(f, "I"),
            Pgl2(t) => write!(f, "PGL2({t})"),
            Psl2(t) => write!(f, "PSL2({t})"),
        }
    }
}

/// Tag text paired with a characteristic, e.g. `"B(1,2)@3"`.
impl FromStr for GroupTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<GroupTag> {
        let (tag, p) = s.rsplit_once('@').ok_or_else(|| Error::InvalidTag(format!("{s}: expected TAG@p")))?;
        let p = p.parse().map_err(|_| Error::InvalidTag(s.to_string()))?;
        GroupTag::parse(tag, p)
    }
}

/// Matrices over F_q with digit entries, used for searches inside PGL(2, F_q).
mod small {
    use super::*;

    pub type M = [Digit; 4];

    pub fn mul(f: &Fq, x: &M, y: &M) -> M {
        let ad = |a, b, c, d| f.add(f.mul(a, b), f.mul(c, d));
        [ad(x[0], y[0], x[1], y[2]), ad(x[0], y[1], x[1], y[3]), ad(x[2], y[0], x[3], y[2]), ad(x[2], y[1], x[3], y[3])]
    }

    pub fn normalize(f: &Fq, x: &M) -> M {
        let lead = x.iter().copied().find(|&e| e != 0).expect("nonzero matrix");
        let inv = f.inv(lead).unwrap();
        x.map(|e| f.mul(e, inv))
    }

    pub fn det(f: &Fq, x: &M) -> Digit {
        f.sub(f.mul(x[0], x[3]), f.mul(x[1], x[2]))
    }

    pub fn order(f: &Fq, x: &M) -> u64 {
        let id = [1, 0, 0, 1];
        let mut y = normalize(f, x);
        let mut k = 1;
        while y != id {
            y = normalize(f, &mul(f, &y, x));
            k += 1;
        }
        k
    }

    /// Normalized elements of PGL(2, F_q) in a fixed order.
    pub fn elements(f: &Fq) -> Vec<M> {
        let mut out = Vec::new();
        let q = f.q() as Digit;
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let m = [a, b, c, d];
                        if det(f, &m) != 0 && normalize(f, &m) == m {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }
}

/// F_p-basis of a subspace of `K` of dimension `dim` stable under
/// multiplication by `zeta`, built from the blocks F_q·π^i.
fn stable_basis(k: &LocalField, zeta: Digit, dim: u32) -> Result<Vec<LocalElement>> {
    let fq = k.fq();
    let frob = |z: Digit| fq.pow(z, fq.p() as u64);
    let mut r = 1;
    let mut z = frob(zeta);
    while z != zeta {
        z = frob(z);
        r += 1;
    }
    if !dim.is_multiple_of(r) {
        return Err(Error::UnsupportedEmbedding(format!("E({dim}) is not a vector space over F_p(ζ) of degree {r}")));
    }
    let t = fq.t();
    let block = fq.basis();
    let mut span: Vec<LocalElement> = vec![k.zero()];
    let mut basis = Vec::new();
    let mut i = 0i64;
    'outer: loop {
        for j in 0..t {
            if basis.len() as u32 == dim {
                break 'outer;
            }
            let c = k.monomial(block[j as usize], i);
            if span.contains(&c) {
                continue;
            }
            for s in 0..r {
                let b = c.scale_digit(fq.pow(zeta, s as u64));
                let mut next = Vec::with_capacity(span.len() * fq.p() as usize);
                for x in &span {
                    for m in 0..fq.p() {
                        next.push(x + &b.scale_digit(m as Digit));
                    }
                }
                span = next;
                basis.push(b);
            }
        }
        i += 1;
    }
    Ok(basis)
}

/// Generators of a copy of the tagged group inside PGL(2, K).
pub fn embed(tag: &GroupTag, k: &LocalField) -> Result<Vec<Mat2>> {
    use GroupKind::*;
    let fq = k.fq();
    if fq.p() != tag.p {
        return Err(Error::FieldMismatch);
    }
    let unsupported = |why: String| Err(Error::UnsupportedEmbedding(format!("{tag}: {why}")));
    let root = |n: u64| -> Result<Digit> {
        fq.root_of_unity(n as u32).ok_or_else(|| {
            Error::UnsupportedEmbedding(format!("{tag}: no primitive {n}-th root of unity in F_{}", fq.q()))
        })
    };
    let t = fq.t();
    match tag.kind {
        Trivial => Ok(vec![]),
        Cyclic(n) => Ok(vec![Mat2::diag(k.constant(root(n)?), k.one())]),
        Dihedral(n) => Ok(vec![Mat2::diag(k.constant(root(n)?), k.one()), Mat2::antidiagonal(k)]),
        ElemAbelian(s) => Ok(stable_basis(k, 1, s)?.into_iter().map(Mat2::translation).collect()),
        Borel(s, n) => {
            let zeta = root(n)?;
            let mut gens: Vec<Mat2> = stable_basis(k, zeta, s)?.into_iter().map(Mat2::translation).collect();
            gens.push(Mat2::diag(k.constant(zeta), k.one()));
            Ok(gens)
        }
        Pgl2(s) | Psl2(s) => {
            if !t.is_multiple_of(s) {
                return unsupported(format!("F_{}^{s} is not a subfield of F_{}", tag.p, fq.q()));
            }
            let sub_q = (tag.p as u64).pow(s);
            let omega = root(sub_q - 1)?;
            let basis: Vec<Digit> = (0..s).map(|i| fq.pow(omega, i as u64)).collect();
            let mut gens: Vec<Mat2> = basis.iter().map(|&b| Mat2::translation(k.constant(b))).collect();
            if matches!(tag.kind, Pgl2(_)) {
                gens.push(Mat2::diag(k.constant(omega), k.one()));
                gens.push(Mat2::antidiagonal(k));
            } else {
                gens.extend(basis.iter().map(|&b| Mat2::lower(k.constant(b))));
            }
            Ok(gens)
        }
        Tetra | Octa | Icosa => {
            let target = match tag.kind {
                Tetra => 3,
                Octa => 4,
                _ => 5,
            };
            let elems = small::elements(fq);
            let of_order =
                |n: u64| -> Vec<small::M> { elems.iter().copied().filter(|m| small::order(fq, m) == n).collect() };
            let (twos, threes) = (of_order(2), of_order(3));
            for a in &twos {
                for b in &threes {
                    if small::order(fq, &small::mul(fq, a, b)) == target {
                        return Ok(vec![Mat2::from_digits(k, *a), Mat2::from_digits(k, *b)]);
                    }
                }
            }
            unsupported(format!("no copy inside PGL(2, F_{})", fq.q()))
        }
    }
}

/// Closure of `embed` output, capped at `cap` elements.
pub fn realize(tag: &GroupTag, k: &LocalField, cap: usize) -> Result<Vec<Mat2>> {
    generate_group(&embed(tag, k)?, k, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::make_field;
    use num::rational::Ratio;
    use GroupKind::*;

    fn tag(kind: GroupKind, p: u32) -> GroupTag {
        GroupTag::new(kind, p).unwrap()
    }

    fn all_tags(p: u32) -> Vec<GroupTag> {
        let mut kinds = vec![Trivial, Tetra, Octa, Icosa];
        for n in 2..=12 {
            kinds.push(Cyclic(n));
            kinds.push(Dihedral(n));
        }
        for t in 1..=3 {
            kinds.push(ElemAbelian(t));
            kinds.push(Pgl2(t));
            kinds.push(Psl2(t));
            let q = (p as u64).pow(t);
            for n in 2..q {
                if (q - 1) % n == 0 {
                    kinds.push(Borel(t, n));
                }
            }
        }
        kinds.into_iter().filter_map(|k| GroupTag::new(k, p).ok()).collect()
    }

    #[test]
    fn orders() {
        assert_eq!(tag(Icosa, 7).order(), 60);
        assert_eq!(tag(Borel(2, 3), 2).order(), 12);
        assert_eq!(tag(Pgl2(1), 3).order(), 24);
        assert_eq!(tag(Psl2(1), 5).order(), 60);
        assert_eq!(tag(Pgl2(2), 2).order(), 60);
    }

    #[test]
    fn pgl2_f3_order_by_enumeration() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(small::elements(&f).len() as u128, tag(Pgl2(1), 3).order());
        assert_eq!(tag(Octa, 5).order(), 24);
    }

    #[test]
    fn canonical_forms_and_rejections() {
        assert_eq!(tag(Borel(0, 4), 5), tag(Cyclic(4), 5));
        assert_eq!(tag(Borel(2, 1), 3), tag(ElemAbelian(2), 3));
        assert_eq!(tag(Dihedral(3), 3), tag(Borel(1, 2), 3));
        assert_eq!(tag(Dihedral(1), 2), tag(ElemAbelian(1), 2));
        assert!(GroupTag::new(Tetra, 3).is_err());
        assert!(GroupTag::new(Icosa, 5).is_err());
        assert!(GroupTag::new(Dihedral(4), 2).is_err());
        assert!(GroupTag::new(Borel(1, 3), 5).is_err());
        assert!(GroupTag::new(Psl2(1), 2).is_err());
        assert!(GroupTag::new(Cyclic(6), 3).is_err());
    }

    #[test]
    fn tag_text_round_trip() {
        for s in ["1", "Zn(7)", "Dn(5)", "E(2)", "B(2,3)", "T", "O", "I", "PGL2(2)", "PSL2(2)"] {
            let t = GroupTag::parse(s, 11).unwrap_or_else(|_| GroupTag::parse(s, 7).unwrap());
            assert_eq!(t.to_string(), s);
        }
        let t: GroupTag = "B(1,2)@3".parse().unwrap();
        assert_eq!(t, tag(Borel(1, 2), 3));
        assert!(GroupTag::parse("Q(2)", 3).is_err());
    }

    #[test]
    fn branch_data_examples() {
        let b = BranchDatum::new;
        assert_eq!(tag(Cyclic(5), 3).branch_data().unwrap(), vec![b(5, 1), b(5, 1)]);
        assert_eq!(tag(Pgl2(2), 3).branch_data().unwrap(), vec![b(72, 9), b(10, 1)]);
        assert_eq!(tag(Icosa, 3).branch_data().unwrap(), vec![b(6, 3), b(5, 1)]);
        assert_eq!(tag(Psl2(1), 5).branch_data().unwrap(), vec![b(10, 5), b(3, 1)]);
    }

    #[test]
    fn catalog_genus_zero_self_test() {
        for p in [2, 3, 5, 7, 11] {
            for g in all_tags(p) {
                let mut s = Ratio::<i128>::from_integer(-2);
                for d in g.branch_data().unwrap() {
                    s += Ratio::new((d.e + d.ep) as i128 - 2, d.e as i128);
                }
                assert_eq!(s * g.order() as i128, Ratio::from_integer(-2), "{g} at p={p}");
            }
        }
    }

    #[test]
    fn psl_branch_data_halves_pgl() {
        for p in [3, 5, 7] {
            for t in 1..=2 {
                let a = tag(Pgl2(t), p).branch_data().unwrap();
                let b = tag(Psl2(t), p).branch_data().unwrap();
                assert_eq!(b[0].e * 2, a[0].e);
                assert_eq!(b[0].ep, a[0].ep);
                assert_eq!(b[1].e * 2, a[1].e);
            }
        }
    }

    /// Maximal cyclic subgroup orders of a permutation group, by brute force.
    fn brute_maximal_cyclic(gens: &[Vec<usize>]) -> Vec<u128> {
        let n = gens[0].len();
        let compose = |a: &Vec<usize>, b: &Vec<usize>| -> Vec<usize> { (0..n).map(|i| a[b[i]]).collect() };
        let id: Vec<usize> = (0..n).collect();
        let mut elems = vec![id.clone()];
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let x = compose(&elems[i], g);
                if !elems.contains(&x) {
                    elems.push(x);
                }
            }
            i += 1;
        }
        let cyc = |g: &Vec<usize>| -> Vec<Vec<usize>> {
            let mut out = vec![id.clone()];
            let mut x = g.clone();
            while x != id {
                out.push(x.clone());
                x = compose(&x, g);
            }
            out.sort();
            out
        };
        let subgroups: Vec<Vec<Vec<usize>>> = elems.iter().map(cyc).collect();
        let mut orders: Vec<u128> = subgroups
            .iter()
            .filter(|s| !subgroups.iter().any(|b| b.len() > s.len() && s.iter().all(|x| b.contains(x))))
            .map(|s| s.len() as u128)
            .collect();
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    #[test]
    fn maximal_cyclic_matches_permutation_oracle() {
        let a4 = vec![vec![1, 2, 0, 3], vec![1, 0, 3, 2]];
        let s4 = vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]];
        let a5 = vec![vec![1, 2, 0, 3, 4], vec![0, 1, 3, 4, 2], vec![1, 0, 3, 2, 4]];
        assert_eq!(brute_maximal_cyclic(&a4), tag(Tetra, 7).maximal_cyclic_orders());
        assert_eq!(brute_maximal_cyclic(&s4), tag(Octa, 7).maximal_cyclic_orders());
        assert_eq!(brute_maximal_cyclic(&a5), tag(Icosa, 7).maximal_cyclic_orders());
        assert!(is_maximal_cyclic(&tag(Cyclic(5), 7), &tag(Icosa, 7)).unwrap());
        assert!(is_maximal_cyclic(&tag(Cyclic(4), 7), &tag(Octa, 7)).unwrap());
        assert!(!is_maximal_cyclic(&tag(Cyclic(2), 7), &tag(Cyclic(4), 7)).unwrap());
        assert!(is_maximal_cyclic(&tag(Cyclic(7), 3), &tag(Octa, 5)).is_err());
        assert!(is_maximal_cyclic(&tag(Dihedral(2), 3), &tag(Octa, 5)).is_err());
    }

    #[test]
    fn admissible_edges() {
        assert!(tag(Borel(1, 2), 3).admissible_edge());
        assert!(!tag(Tetra, 5).admissible_edge());
        assert!(GroupTag::trivial(3).admissible_edge());
        assert!(!tag(Dihedral(3), 5).admissible_edge());
    }

    #[test]
    fn containment_rules() {
        assert!(contains(&tag(Pgl2(1), 3), &tag(Borel(1, 2), 3)));
        assert!(contains(&tag(Icosa, 3), &tag(Borel(1, 2), 3)));
        assert!(!contains(&tag(Psl2(1), 3), &tag(Borel(1, 2), 3)));
        assert!(contains(&tag(Psl2(2), 3), &tag(Icosa, 3)));
        assert!(!contains(&tag(Psl2(1), 7), &tag(Icosa, 7)));
        assert!(contains(&tag(Psl2(1), 7), &tag(Octa, 7)));
        assert!(!contains(&tag(Psl2(1), 5), &tag(Octa, 5)));
        assert!(contains(&tag(Borel(2, 4), 3), &tag(Borel(1, 2), 3)));
        assert!(!contains(&tag(Borel(2, 4), 3), &tag(Borel(3, 2), 3)));
        assert!(contains(&tag(Dihedral(6), 5), &tag(Dihedral(3), 5)));
        assert!(contains(&tag(Pgl2(2), 2), &tag(Pgl2(1), 2)));
    }

    #[test]
    fn embeddings_generate_groups_of_the_right_order() {
        let cases: Vec<(u32, u32, Vec<GroupKind>)> = vec![
            (2, 1, vec![ElemAbelian(2), Pgl2(1), Dihedral(1)]),
            (2, 2, vec![ElemAbelian(2), Borel(2, 3), Dihedral(3), Pgl2(2), Cyclic(3)]),
            (3, 1, vec![Cyclic(2), Borel(1, 2), Borel(2, 2), Pgl2(1), Psl2(1), ElemAbelian(3), Dihedral(2)]),
            (3, 2, vec![Borel(2, 4), Borel(2, 8), Psl2(1), Icosa, Dihedral(4)]),
            (5, 1, vec![Borel(1, 4), Pgl2(1), Psl2(1), Dihedral(4), Octa, Tetra]),
            (7, 1, vec![Octa, Dihedral(6)]),
            (11, 1, vec![Icosa]),
        ];
        for (p, t, kinds) in cases {
            let k = LocalField::new(make_field(p, t).unwrap());
            for kind in kinds {
                let g = tag(kind, p);
                let elems = realize(&g, &k, 400).unwrap();
                assert_eq!(elems.len() as u128, g.order(), "{g} over F_{}", k.q());
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let k3 = LocalField::new(make_field(3, 1).unwrap());
        let z2 = embed(&tag(Cyclic(2), 3), &k3).unwrap();
        assert_eq!(z2, vec![Mat2::diag(k3.from_int(-1), k3.one())]);
        let k4 = LocalField::new(make_field(2, 2).unwrap());
        let e2 = embed(&tag(ElemAbelian(2), 2), &k4).unwrap();
        let g = k4.fq().generator();
        assert_eq!(e2, vec![Mat2::translation(k4.one()), Mat2::translation(k4.constant(g))]);
        let d = embed(&tag(Dihedral(3), 2), &k4).unwrap();
        assert_eq!(d[1], Mat2::antidiagonal(&k4));
        assert!(embed(&tag(Cyclic(4), 3), &k3).is_err());
    }
}
