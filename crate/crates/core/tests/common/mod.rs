#![allow(dead_code)]
//! Oracles and generators shared by the integration tests.

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;

use mumford::bt_tree::TreeVertex;
use mumford::finite_groups::{GroupKind, GroupTag};
use mumford::graph_of_groups::{GroupTree, VertexId};
use mumford::localfield::{make_field, Digit, LocalElement, LocalField, ProjPoint};
use mumford::matrix::Mat2;

pub fn field(p: u32, t: u32) -> LocalField {
    LocalField::with_precision(make_field(p, t).unwrap(), 32)
}

pub fn small_fields() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![Just((2, 1)), Just((3, 1)), Just((2, 2))]
}

/// A Laurent polynomial with digits at exponents lo..lo+3.
pub fn element(k: &LocalField, lo: i64, digits: &[u32]) -> LocalElement {
    let q = k.q();
    let terms: Vec<(i64, Digit)> = digits.iter().enumerate().map(|(i, d)| (lo + i as i64, (d % q) as Digit)).collect();
    k.from_terms(&terms)
}

pub fn bfs_distance(v: &TreeVertex, w: &TreeVertex, limit: u64) -> Option<u64> {
    let mut seen = HashSet::from([v.clone()]);
    let mut queue = VecDeque::from([(v.clone(), 0)]);
    while let Some((x, d)) = queue.pop_front() {
        if x == *w {
            return Some(d);
        }
        if d == limit {
            continue;
        }
        for y in x.neighbors() {
            if seen.insert(y.clone()) {
                queue.push_back((y, d + 1));
            }
        }
    }
    None
}

pub fn column(p: &ProjPoint) -> (LocalElement, LocalElement) {
    let k = p.field();
    match p.affine().unwrap() {
        None => (k.one(), k.zero()),
        Some(x) => (x, k.one()),
    }
}

/// Valuation, with elements that vanish to the working precision counted at
/// that precision.
pub fn val(a: &LocalElement) -> Option<i64> {
    a.valuation().unwrap_or_else(|_| a.valuation_lower_bound())
}

pub fn min_val(a: &LocalElement, b: &LocalElement) -> i64 {
    match (val(a), val(b)) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => panic!("zero column"),
    }
}

/// The lattice of `v` splits along the lines of `x` and `y`: its primitive
/// vectors on both lines form a basis.
pub fn on_apartment(v: &TreeVertex, x: &ProjPoint, y: &ProjPoint) -> bool {
    let m = v.lattice_matrix();
    let (x0, x1) = column(x);
    let (y0, y1) = column(y);
    let xy = Mat2::new(x0, y0, x1, y1);
    let img = m.adjugate().checked_mul(&xy).unwrap();
    let v_det_m = val(&m.det()).unwrap();
    let v_det_xy = val(&xy.det()).unwrap();
    v_det_xy + v_det_m == min_val(&img.a, &img.c) + min_val(&img.b, &img.d)
}

pub fn point(k: &LocalField, raw: Option<(i64, Vec<u32>)>) -> ProjPoint {
    match raw {
        None => ProjPoint::infinity(k),
        Some((lo, d)) => ProjPoint::finite(element(k, lo, &d)),
    }
}

pub fn raw_point() -> impl Strategy<Value = Option<(i64, Vec<u32>)>> {
    prop_oneof![
        1 => Just(None),
        6 => (-2i64..=1, prop::collection::vec(0u32..4, 3)).prop_map(Some),
    ]
}

pub fn borel(s: u32, n: u64, p: u32) -> GroupTag {
    GroupTag::new(GroupKind::Borel(s, n), p).unwrap()
}

/// A Borel group at the root with chains of growing Borel groups hanging
/// off it, each chain ending in a marked end.
#[derive(Debug, Clone)]
pub struct Chains {
    pub p: u32,
    pub n: u64,
    pub top: u32,
    /// Per chain, leaf first: (E-rank, carries the tame part).
    pub chains: Vec<Vec<(u32, bool)>>,
}

pub fn chains() -> impl Strategy<Value = Chains> {
    (prop_oneof![Just(2u32), Just(3), Just(5), Just(7)], 2u32..=4)
        .prop_flat_map(|(p, top)| {
            let divisors: Vec<u64> = (1..p as u64).filter(|d| (p as u64 - 1).is_multiple_of(*d)).collect();
            let chain = (prop::collection::vec(1..=top, 1..=4), 0usize..=4).prop_map(|(mut s, tame_from)| {
                s.sort_unstable();
                s.iter().enumerate().map(|(i, &r)| (r, i >= tame_from)).collect::<Vec<_>>()
            });
            (Just(p), prop::sample::select(divisors), Just(top), prop::collection::vec(chain, 1..=4))
        })
        .prop_map(|(p, n, top, chains)| Chains { p, n, top, chains })
}

impl Chains {
    pub fn tag(&self, (s, tame): (u32, bool)) -> GroupTag {
        borel(s, if tame { self.n } else { 1 }, self.p)
    }

    /// The tree, its root, and the vertex ids of every chain (leaf first).
    pub fn build(&self, inject: Option<(usize, usize)>) -> (GroupTree, VertexId, Vec<Vec<VertexId>>) {
        let mut t = GroupTree::new(self.p);
        let root = t.add_vertex(borel(self.top, self.n, self.p));
        let too_big = borel(self.top + 1, self.n, self.p);
        let mut ids = Vec::new();
        for (c, chain) in self.chains.iter().enumerate() {
            let tags: Vec<GroupTag> = chain
                .iter()
                .enumerate()
                .map(|(i, &x)| if inject == Some((c, i)) { too_big } else { self.tag(x) })
                .collect();
            let vs: Vec<VertexId> = tags.iter().map(|g| t.add_vertex(*g)).collect();
            for i in 0..vs.len() {
                let next = vs.get(i + 1).copied().unwrap_or(root);
                t.add_edge(vs[i], next, tags[i]);
            }
            t.add_end(vs[0], tags[0]);
            ids.push(vs);
        }
        (t, root, ids)
    }
}
