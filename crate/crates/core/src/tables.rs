//! μ of single segments N_{v₁} - N_e - N_{v₀} with N_{v₀} ∈ {T, O, I}, and
//! the (a, b) table of the (A1)–(A5) cases, regenerated from the tree and
//! cover machinery and compared with shipped data.
//!
//! A segment table row collects every valid segment of one shape and records
//! the least μ together with the segment attaining it. For Borel and dihedral
//! vertices μ increases with p^t and n₁, so the finite windows enumerated
//! below already contain the minimum.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case_catalog::{a_family_grid, build_case, case_ab, CaseId, Family};
use crate::error::{Error, Result};
use crate::finite_groups::{BranchDatum, GroupKind, GroupTag};
use crate::graph_of_groups::kps_genus;
use crate::hurwitz_bounds::{hurwitz_genus, CoverData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableName {
    /// Both vertex groups classical.
    Classical,
    /// N_{v₁} contains a p-group, cyclic edge.
    Wild,
    /// p = 3, edge D₃, N_{v₀} = I.
    Char3,
    /// (a, b) of the (A1)–(A5) cases.
    Ab,
}

impl TableName {
    pub const ALL: [TableName; 4] = [TableName::Classical, TableName::Wild, TableName::Char3, TableName::Ab];
    pub const MU: [TableName; 3] = [TableName::Classical, TableName::Wild, TableName::Char3];
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableName::Classical => "5.4.1",
            TableName::Wild => "5.4.2",
            TableName::Char3 => "5.4.3",
            TableName::Ab => "6.3",
        })
    }
}

impl FromStr for TableName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TableName::ALL
            .into_iter()
            .find(|t| t.to_string() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown table {s:?}; expected 5.4.1, 5.4.2, 5.4.3 or 6.3")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::AtLeast => "≥",
        })
    }
}

/// `= v` or `≥ v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub relation: Relation,
    #[serde(with = "crate::ser::text")]
    pub value: BigRational,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.relation, self.value)
    }
}

/// How a printed entry compares with the regenerated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Match,
    /// A lower bound that holds but is never attained.
    Loose,
    /// A lower bound above the true minimum.
    Violated,
    /// An equality that does not hold.
    Differs,
    /// Found by the enumeration, absent from the printed table.
    Unprinted,
    /// Printed, but no valid segment has this shape.
    Missing,
}

impl Outcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, Outcome::Violated | Outcome::Differs | Outcome::Missing)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuRow {
    /// Printed row number, 0 for unprinted shapes.
    pub row: usize,
    pub v1: String,
    pub edge: String,
    pub v0: String,
    pub printed: Option<Bound>,
    pub derived: Option<Bound>,
    /// Segment descriptor reaching the derived value.
    pub attained_at: Option<String>,
    pub outcome: Outcome,
}

impl MuRow {
    pub fn key(&self) -> (String, String, String) {
        (self.v1.clone(), self.edge.clone(), self.v0.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbRow {
    pub case: String,
    pub formula: String,
    #[serde(with = "crate::ser::text")]
    pub a: BigInt,
    #[serde(with = "crate::ser::text")]
    pub b: BigInt,
    /// (g − 1)/|A| from the end stabilizers.
    #[serde(with = "crate::ser::text")]
    pub hurwitz: BigRational,
    #[serde(with = "crate::ser::text")]
    pub mu: BigRational,
    /// Genus from μ and |A| = b, when that is at least 2.
    #[serde(with = "crate::ser::opt_text")]
    pub kps_genus: Option<BigInt>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbGrid {
    pub primes: Vec<u32>,
    pub t_max: u32,
    pub param_max: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbTable {
    pub grid: AbGrid,
    pub rows: Vec<AbRow>,
}

/// Shipped tables: printed values, regenerated values and outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub mu: BTreeMap<String, Vec<MuRow>>,
    pub ab: AbTable,
}

pub const GOLDEN_FILE: &str = "golden_tables.json";
const BUNDLED_GOLDEN: &str = include_str!("../data/golden_tables.json");

impl Golden {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_GOLDEN).expect("bundled tables parse")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads `golden_tables.json` from `dir`.
    pub fn load(dir: &std::path::Path) -> Result<Self> {
        let path = dir.join(GOLDEN_FILE);
        let s = std::fs::read_to_string(&path).map_err(|e| Error::MissingData(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn mu_rows(&self, name: TableName) -> Result<&[MuRow]> {
        self.mu.get(&name.to_string()).map(|v| v.as_slice()).ok_or_else(|| Error::MissingData(format!("table {name}")))
    }

    /// Rebuilds every regenerated field from the printed entries.
    pub fn regenerate(&self) -> Result<Golden> {
        let mut mu = BTreeMap::new();
        for name in TableName::MU {
            mu.insert(name.to_string(), regenerate_mu(name, self.mu_rows(name)?)?);
        }
        Ok(Golden { mu, ab: regenerate_ab(&self.ab.grid)? })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

fn tag(kind: GroupKind, p: u32) -> Option<GroupTag> {
    GroupTag::new(kind, p).ok().filter(|g| g.kind() == kind)
}

fn rank(g: &GroupTag) -> u8 {
    match g.kind() {
        GroupKind::Tetra => 1,
        GroupKind::Octa => 2,
        GroupKind::Icosa => 3,
        _ => 0,
    }
}

fn q_of(p: u32, t: u32) -> u64 {
    (p as u64).pow(t)
}

/// Row label of a vertex group in a segment with edge `e`.
fn vertex_label(v: &GroupTag, e: &GroupTag) -> String {
    use GroupKind::*;
    match v.kind() {
        Dihedral(_) if e.order() == 2 => "D_n1".into(),
        Dihedral(n) => format!("D{n}"),
        Borel(_, n) => format!("E_t⋊Z{n}"),
        Pgl2(t) => format!("PGL(2,{})", q_of(v.p(), t)),
        Psl2(t) => format!("PSL(2,{})", q_of(v.p(), t)),
        Tetra => "T".into(),
        Octa => "O".into(),
        Icosa => "I".into(),
        _ => v.to_string(),
    }
}

fn edge_label(e: &GroupTag) -> String {
    match e.kind() {
        GroupKind::Cyclic(n) => format!("Z{n}"),
        GroupKind::Borel(1, 2) if e.p() == 3 => "D3".into(),
        _ => e.to_string(),
    }
}

fn v0_candidates(p: u32) -> Vec<GroupTag> {
    [GroupKind::Tetra, GroupKind::Octa, GroupKind::Icosa].into_iter().filter_map(|k| tag(k, p)).collect()
}

/// Vertex groups containing a p-group that can carry a cyclic edge of order n.
fn wild_candidates(p: u32, n: u64) -> Vec<GroupTag> {
    let mut out = Vec::new();
    for t in 1..=4 {
        out.extend(tag(GroupKind::Borel(t, n), p));
        out.extend(tag(GroupKind::Pgl2(t), p));
        out.extend(tag(GroupKind::Psl2(t), p));
    }
    out.extend(v0_candidates(p).into_iter().filter(|g| !g.is_classical()));
    out
}

fn segment_universe(name: TableName) -> Vec<CaseId> {
    let seg = |p: u32, v1: GroupTag, e: GroupTag, v0: GroupTag| CaseId::new(Family::E, p).with_segment(v1, e, v0);
    let mut out = Vec::new();
    match name {
        TableName::Classical => {
            for p in [7, 11] {
                for v0 in v0_candidates(p) {
                    let mut v1s: Vec<GroupTag> = (2..=24).filter_map(|n| tag(GroupKind::Dihedral(n), p)).collect();
                    v1s.extend(v0_candidates(p));
                    for v1 in v1s.into_iter().filter(|v1| rank(v1) <= rank(&v0)) {
                        for m in v0.maximal_cyclic_orders() {
                            if let Some(e) = tag(GroupKind::Cyclic(m as u64), p) {
                                out.push(seg(p, v1, e, v0));
                            }
                        }
                    }
                }
            }
        }
        TableName::Wild => {
            for p in [3, 5, 7, 11, 13] {
                for v0 in v0_candidates(p) {
                    for m in v0.maximal_cyclic_orders() {
                        let Some(e) = tag(GroupKind::Cyclic(m as u64), p) else { continue };
                        for v1 in wild_candidates(p, m as u64) {
                            out.push(seg(p, v1, e, v0));
                        }
                    }
                }
            }
        }
        TableName::Char3 => {
            let (p, e) = (3, tag(GroupKind::Borel(1, 2), 3).expect("D3 in characteristic 3"));
            let v0 = tag(GroupKind::Icosa, 3).expect("I in characteristic 3");
            for v1 in wild_candidates(p, 2) {
                out.push(seg(p, v1, e, v0));
            }
        }
        TableName::Ab => {}
    }
    out
}

struct Extremes {
    min: BigRational,
    max: BigRational,
    at: String,
}

/// Least and greatest μ over all valid segments of each shape.
fn derive_mu(name: TableName) -> Result<BTreeMap<(String, String, String), Extremes>> {
    let ids = segment_universe(name);
    let valued: Vec<_> = ids
        .par_iter()
        .filter_map(|id| {
            let tree = build_case(id).ok()?;
            let [v1, e, v0] = id.segment?;
            if name == TableName::Classical && !(v1.is_classical() && v0.is_classical()) {
                return None;
            }
            let key = (vertex_label(&v1, &e), edge_label(&e), vertex_label(&v0, &e));
            Some(tree.mu().map(|mu| (key, mu, id.to_string())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<_, Extremes> = BTreeMap::new();
    for (key, mu, at) in valued {
        match out.get_mut(&key) {
            None => {
                out.insert(key, Extremes { min: mu.clone(), max: mu, at });
            }
            Some(x) => {
                if mu < x.min {
                    x.min = mu.clone();
                    x.at = at;
                }
                if mu > x.max {
                    x.max = mu;
                }
            }
        }
    }
    Ok(out)
}

fn compare(printed: &Bound, derived: &Bound) -> Outcome {
    match printed.relation {
        Relation::Eq if printed == derived => Outcome::Match,
        Relation::Eq => Outcome::Differs,
        Relation::AtLeast if derived.value == printed.value => Outcome::Match,
        Relation::AtLeast if derived.value > printed.value => Outcome::Loose,
        Relation::AtLeast => Outcome::Violated,
    }
}

/// Regenerates a segment table, keeping the printed entries of `printed`
/// and appending shapes the printed table does not list.
pub fn regenerate_mu(name: TableName, printed: &[MuRow]) -> Result<Vec<MuRow>> {
    let mut derived = derive_mu(name)?;
    let mut rows = Vec::new();
    for r in printed.iter().filter(|r| r.printed.is_some()) {
        let found = derived.remove(&r.key());
        let bound = found.as_ref().map(|x| Bound {
            relation: if x.min == x.max { Relation::Eq } else { Relation::AtLeast },
            value: x.min.clone(),
        });
        let p = r.printed.clone().expect("filtered");
        let outcome = bound.as_ref().map_or(Outcome::Missing, |b| compare(&p, b));
        rows.push(MuRow { derived: bound, attained_at: found.map(|x| x.at), outcome, printed: Some(p), ..r.clone() });
    }
    for ((v1, edge, v0), x) in derived {
        rows.push(MuRow {
            row: 0,
            v1,
            edge,
            v0,
            printed: None,
            derived: Some(Bound {
                relation: if x.min == x.max { Relation::Eq } else { Relation::AtLeast },
                value: x.min,
            }),
            attained_at: Some(x.at),
            outcome: Outcome::Unprinted,
        });
    }
    Ok(rows)
}

fn formula(id: &CaseId) -> &'static str {
    match id.family {
        Family::A(1) => "(q^n - q - 1, q^n(q^2-1)/h), n = t1/t",
        Family::A(2) => "(q^(n+1) - q^(n-m+1) - q^(n-m) - q + 1, q^n(q^2-1)/h), n = t2/t >= m = t1/t",
        Family::A(3) => "(q^m - q^(m-n) - 1, q^m(q-1)/h), {n, m} = {t1/t, t3/t}, n <= m",
        Family::A(4) => "(q^(n+1) - q^n - q^(n-1) - q + 1, q^n(q^2-1)/h), n = t4/t",
        Family::A(5) => "(q^n - q^(n-1) - 1, q^n(q-1)/h), n = t5/t",
        _ => "",
    }
}

/// One row of the (a, b) table: the closed form, the Riemann–Hurwitz ratio
/// of the ends and the genus from μ with |A| = b.
pub fn ab_row(id: &CaseId) -> Result<AbRow> {
    let tree = build_case(id)?;
    let mu = tree.mu()?;
    let (a, b) = case_ab(id)?;
    let ends: Vec<BranchDatum> = tree.ends().iter().map(|e| BranchDatum::new(e.tag.order(), e.tag.p_part())).collect();
    let cover = CoverData::new(id.p, b.clone(), ends)?;
    let hurwitz = (hurwitz_genus(&cover) - BigRational::from_integer(1.into())) / BigRational::from_integer(b.clone());
    let kps = kps_genus(&tree, &b).ok();
    let genus_ok = match &kps {
        Some(g) => *g == &a + 1,
        None => a < BigInt::from(1),
    };
    let agree = hurwitz == mu && BigRational::new(a.clone(), b.clone()) == mu && genus_ok;
    Ok(AbRow { case: id.to_string(), formula: formula(id).into(), a, b, hurwitz, mu, kps_genus: kps, agree })
}

pub fn regenerate_ab(grid: &AbGrid) -> Result<AbTable> {
    let ids = a_family_grid(&grid.primes, grid.t_max, grid.param_max);
    let rows = ids.par_iter().map(ab_row).collect::<Result<Vec<_>>>()?;
    Ok(AbTable { grid: grid.clone(), rows })
}

/// Lines describing every disagreement between two versions of the tables.
pub fn diff(name: TableName, regenerated: &Golden, golden: &Golden) -> Result<Vec<String>> {
    let mut out = Vec::new();
    if name == TableName::Ab {
        if regenerated.ab.grid != golden.ab.grid {
            out.push(format!("grid {:?} vs {:?}", regenerated.ab.grid, golden.ab.grid));
        }
        let old: BTreeMap<_, _> = golden.ab.rows.iter().map(|r| (r.case.clone(), r)).collect();
        let new: BTreeMap<_, _> = regenerated.ab.rows.iter().map(|r| (r.case.clone(), r)).collect();
        for (case, r) in &new {
            match old.get(case) {
                None => out.push(format!("+ {case}")),
                Some(o) if o != r => out.push(format!("~ {case}: ({}, {}) vs ({}, {})", r.a, r.b, o.a, o.b)),
                _ => {}
            }
        }
        out.extend(old.keys().filter(|c| !new.contains_key(*c)).map(|c| format!("- {c}")));
        return Ok(out);
    }
    let old: BTreeMap<_, _> = golden.mu_rows(name)?.iter().map(|r| (r.key(), r)).collect();
    let new: BTreeMap<_, _> = regenerated.mu_rows(name)?.iter().map(|r| (r.key(), r)).collect();
    let show = |b: &Option<Bound>| b.as_ref().map_or("-".to_string(), |b| b.to_string());
    for (k, r) in &new {
        let label = format!("{}, {}, {}", k.0, k.1, k.2);
        match old.get(k) {
            None => out.push(format!("+ {label}: {}", show(&r.derived))),
            Some(o) if o != r => out.push(format!(
                "~ {label}: {} ({:?}) vs {} ({:?})",
                show(&r.derived),
                r.outcome,
                show(&o.derived),
                o.outcome
            )),
            _ => {}
        }
    }
    out.extend(old.keys().filter(|k| !new.contains_key(*k)).map(|k| format!("- {}, {}, {}", k.0, k.1, k.2)));
    Ok(out)
}
