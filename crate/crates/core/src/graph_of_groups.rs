//! Finite trees of finite groups with marked ends: the μ-invariant, the
//! genus identity g − 1 = |N/Γ|·μ, contraction and Herrlich's dimension count.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_groups::{contains, is_maximal_cyclic, GroupKind, GroupTag};

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub tag: GroupTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub tag: GroupTag,
}

/// A marked end: a half-line leaving `at` whose stabilizer is `tag`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct End {
    pub at: VertexId,
    pub tag: GroupTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTree {
    p: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    ends: Vec<End>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HerrlichCounts {
    pub f: i64,
    pub c_v: i64,
    pub d_v: i64,
    pub c_e: i64,
    pub d_e: i64,
}

impl HerrlichCounts {
    pub fn dim(&self) -> i64 {
        3 * (self.f + self.d_v - self.d_e - 1) + 2 * (self.c_v - self.c_e)
    }
}

fn inv_order(tag: &GroupTag) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(tag.order()))
}

impl GroupTree {
    pub fn new(p: u32) -> Self {
        GroupTree { p, vertices: Vec::new(), edges: Vec::new(), ends: Vec::new() }
    }

    /// A single vertex.
    pub fn point(tag: GroupTag) -> Self {
        let mut t = GroupTree::new(tag.p());
        t.add_vertex(tag);
        t
    }

    /// The segment `a -e- b`.
    pub fn segment(a: GroupTag, e: GroupTag, b: GroupTag) -> Self {
        let mut t = GroupTree::new(a.p());
        let u = t.add_vertex(a);
        let v = t.add_vertex(b);
        t.add_edge(u, v, e);
        t
    }

    /// A chain `v0 -e1- v1 -e2- … vk`; `vertices` has one more entry than `edges`.
    pub fn chain(vertices: &[GroupTag], edges: &[GroupTag]) -> Self {
        assert_eq!(vertices.len(), edges.len() + 1);
        let mut t = GroupTree::new(vertices[0].p());
        let ids: Vec<_> = vertices.iter().map(|v| t.add_vertex(*v)).collect();
        for (i, e) in edges.iter().enumerate() {
            t.add_edge(ids[i], ids[i + 1], *e);
        }
        t
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Adds a vertex with the next unused id.
    pub fn add_vertex(&mut self, tag: GroupTag) -> VertexId {
        let id = self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
        self.vertices.push(Vertex { id, tag });
        id
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId, tag: GroupTag) {
        self.edges.push(Edge { a, b, tag });
    }

    pub fn add_end(&mut self, at: VertexId, tag: GroupTag) {
        self.ends.push(End { at, tag });
    }

    pub fn with_end(mut self, at: VertexId, tag: GroupTag) -> Self {
        self.add_end(at, tag);
        self
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn ends(&self) -> &[End] {
        &self.ends
    }

    pub fn tag(&self, v: VertexId) -> Option<&GroupTag> {
        self.vertices.iter().find(|x| x.id == v).map(|x| &x.tag)
    }

    fn adjacency(&self) -> HashMap<VertexId, Vec<(VertexId, usize)>> {
        let mut adj: HashMap<VertexId, Vec<(VertexId, usize)>> =
            self.vertices.iter().map(|v| (v.id, Vec::new())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(l) = adj.get_mut(&e.a) {
                l.push((e.b, i));
            }
            if let Some(l) = adj.get_mut(&e.b) {
                l.push((e.a, i));
            }
        }
        adj
    }

    /// Structural checks only: ids, edge endpoints, acyclic and connected.
    fn check_shape(&self) -> Result<()> {
        let bad = |s: String| Err(Error::MalformedTree(s));
        if self.vertices.is_empty() {
            return bad("no vertices".into());
        }
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return bad(format!("duplicate vertex id {}", v.id));
            }
            if v.tag.p() != self.p {
                return bad(format!("vertex {} has characteristic {}", v.id, v.tag.p()));
            }
        }
        for e in &self.edges {
            if !ids.contains(&e.a) || !ids.contains(&e.b) || e.a == e.b {
                return bad(format!("edge {}–{} has a bad endpoint", e.a, e.b));
            }
        }
        for end in &self.ends {
            if !ids.contains(&end.at) {
                return bad(format!("end attached to missing vertex {}", end.at));
            }
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return bad(format!("{} vertices but {} edges", self.vertices.len(), self.edges.len()));
        }
        let adj = self.adjacency();
        let start = self.vertices[0].id;
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != self.vertices.len() {
            return bad("not connected".into());
        }
        Ok(())
    }

    /// Checks that this is a tree of groups as it arises from a discrete
    /// group acting on the Bruhat–Tits tree: edge groups are E_t ⋊ Z_n,
    /// sit inside both endpoints, have maximal cyclic tame part there, and
    /// are the Borel or Z_{q+1} at PGL2/PSL2 vertices.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        for e in &self.edges {
            let here = format!("edge {}–{} ({})", e.a, e.b, e.tag);
            if e.tag.p() != self.p {
                return Err(Error::MalformedTree(format!("{here}: wrong characteristic")));
            }
            if !e.tag.admissible_edge() {
                return Err(Error::MalformedTree(format!("{here}: not of the form E_t ⋊ Z_n")));
            }
            for end in [e.a, e.b] {
                let v = self.tag(end).unwrap();
                if !contains(v, &e.tag) {
                    return Err(Error::MalformedTree(format!("{here}: not a subgroup of {v}")));
                }
                let n = e.tag.tame_part().unwrap();
                if n > 1 {
                    let z = GroupTag::new(GroupKind::Cyclic(n), self.p)?;
                    if !is_maximal_cyclic(&z, v)? {
                        return Err(Error::MalformedTree(format!("{here}: Z_{n} is not maximal cyclic in {v}")));
                    }
                }
                if let Some(allowed) = v.link_edge_groups() {
                    if !allowed.contains(&e.tag) {
                        return Err(Error::MalformedTree(format!(
                            "{here}: at {v} the edge group must be {} or {}",
                            allowed[0], allowed[1]
                        )));
                    }
                }
            }
        }
        for end in &self.ends {
            let v = self.tag(end.at).unwrap();
            if end.tag.p() != self.p || !contains(v, &end.tag) {
                return Err(Error::MalformedTree(format!("end stabilizer {} is not a subgroup of {v}", end.tag)));
            }
        }
        Ok(())
    }

    /// μ = Σ_edges 1/|G_e| − Σ_vertices 1/|G_v|. Ends do not contribute.
    pub fn mu(&self) -> Result<BigRational> {
        self.check_shape()?;
        let edges: BigRational = self.edges.iter().map(|e| inv_order(&e.tag)).sum();
        let verts: BigRational = self.vertices.iter().map(|v| inv_order(&v.tag)).sum();
        Ok(edges - verts)
    }

    /// The vertices on the path from `from` to `to`, both included.
    pub fn geodesic(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        let adj = self.adjacency();
        if !adj.contains_key(&from) || !adj.contains_key(&to) {
            return None;
        }
        let mut parent: HashMap<VertexId, VertexId> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        parent.insert(from, from);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, _) in &adj[&v] {
                if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(w) {
                    slot.insert(v);
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = *parent.get(&cur)?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    fn edge_between(&self, a: VertexId, b: VertexId) -> Option<&Edge> {
        self.edges.iter().find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    /// The subtree induced on `keep`, with the ends attached there.
    pub fn subtree(&self, keep: &BTreeSet<VertexId>) -> Result<GroupTree> {
        let sub = GroupTree {
            p: self.p,
            vertices: self.vertices.iter().filter(|v| keep.contains(&v.id)).cloned().collect(),
            edges: self.edges.iter().filter(|e| keep.contains(&e.a) && keep.contains(&e.b)).cloned().collect(),
            ends: self.ends.iter().filter(|e| keep.contains(&e.at)).cloned().collect(),
        };
        if sub.vertices.len() != keep.len() {
            return Err(Error::MalformedTree("subtree names a missing vertex".into()));
        }
        sub.check_shape()?;
        Ok(sub)
    }

    /// Contracts onto the connected vertex set `keep`. Every pruned vertex
    /// must carry the group of its edge toward `keep`, and groups must grow
    /// along each geodesic into `keep`; ends on pruned vertices move to the
    /// kept vertex their branch hangs from.
    pub fn contract(&self, keep: &BTreeSet<VertexId>) -> Result<GroupTree> {
        self.check_shape()?;
        if keep.is_empty() {
            return Err(Error::MalformedTree("nothing to keep".into()));
        }
        let mut out = self.subtree(keep)?;
        let anchor = *keep.iter().next().unwrap();
        for v in self.vertices.iter().filter(|v| !keep.contains(&v.id)) {
            let to_anchor = self.geodesic(v.id, anchor).unwrap();
            let cut = to_anchor.iter().position(|w| keep.contains(w)).unwrap();
            let path = to_anchor[..=cut].to_vec();
            for pair in path.windows(2) {
                let (w, next) = (pair[0], pair[1]);
                let g = self.tag(w).unwrap();
                let h = self.tag(next).unwrap();
                let e = self.edge_between(w, next).unwrap();
                if e.tag != *g {
                    return Err(Error::ContractionFailed {
                        path: path.clone(),
                        reason: format!("vertex {w} has {g} but its edge toward the kept part has {}", e.tag),
                    });
                }
                if !contains(h, g) {
                    return Err(Error::ContractionFailed {
                        path: path.clone(),
                        reason: format!("{g} at {w} is not contained in {h} at {next}"),
                    });
                }
            }
            let attach = path[cut];
            for end in self.ends.iter().filter(|e| e.at == v.id) {
                out.add_end(attach, end.tag);
            }
        }
        Ok(out)
    }

    pub fn herrlich_counts(&self, f: i64) -> HerrlichCounts {
        let classify = |tags: &mut dyn Iterator<Item = &GroupTag>| {
            let (mut c, mut d) = (0, 0);
            for t in tags {
                if t.is_trivial() {
                } else if t.is_cyclic() {
                    c += 1;
                } else {
                    d += 1;
                }
            }
            (c, d)
        };
        let (c_v, d_v) = classify(&mut self.vertices.iter().map(|v| &v.tag));
        let (c_e, d_e) = classify(&mut self.edges.iter().map(|e| &e.tag));
        HerrlichCounts { f, c_v, d_v, c_e, d_e }
    }

    /// 3(f + d_v − d_e − 1) + 2(c_v − c_e).
    pub fn herrlich_dim(&self, f: i64) -> i64 {
        self.herrlich_counts(f).dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TreeJson::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<GroupTree> {
        let raw: TreeJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let p = raw.p;
        let tag = |s: &str| GroupTag::parse(s, p);
        let mut t = GroupTree::new(p);
        for v in raw.vertices {
            t.vertices.push(Vertex { id: v.id, tag: tag(&v.tag)? });
        }
        for e in raw.edges {
            t.edges.push(Edge { a: e.a, b: e.b, tag: tag(&e.tag)? });
        }
        for e in raw.ends {
            t.ends.push(End { at: e.at, tag: tag(&e.tag)? });
        }
        t.check_shape()?;
        Ok(t)
    }
}

impl Serialize for GroupTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeJson::from(self).serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    p: u32,
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    ends: Vec<EndJson>,
}
#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: VertexId,
    tag: String,
}
#[derive(Serialize, Deserialize)]
struct EdgeJson {
    a: VertexId,
    b: VertexId,
    tag: String,
}
#[derive(Serialize, Deserialize)]
struct EndJson {
    at: VertexId,
    tag: String,
}

impl From<&GroupTree> for TreeJson {
    fn from(t: &GroupTree) -> Self {
        TreeJson {
            p: t.p,
            vertices: t.vertices.iter().map(|v| VertexJson { id: v.id, tag: v.tag.to_string() }).collect(),
            edges: t.edges.iter().map(|e| EdgeJson { a: e.a, b: e.b, tag: e.tag.to_string() }).collect(),
            ends: t.ends.iter().map(|e| EndJson { at: e.at, tag: e.tag.to_string() }).collect(),
        }
    }
}

/// g = |N/Γ|·μ + 1, provided that is an integer at least 2.
pub fn kps_genus(tree: &GroupTree, aut_order: &BigInt) -> Result<BigInt> {
    if !aut_order.is_positive() {
        return Err(Error::InvalidParameter("automorphism group order must be positive".into()));
    }
    let gm1 = tree.mu()? * BigRational::from_integer(aut_order.clone());
    if !gm1.is_integer() {
        return Err(Error::NoQuotient(format!("|N/Γ|·μ = {gm1} is not an integer")));
    }
    if gm1 <= BigRational::zero() {
        return Err(Error::NoQuotient(format!("|N/Γ|·μ = {gm1} gives genus below 2")));
    }
    Ok(gm1.to_integer() + 1)
}

/// Smallest |N/Γ| making |N/Γ|·μ a positive integer.
pub fn minimal_quotient_order(tree: &GroupTree) -> Result<BigInt> {
    let mu = tree.mu()?;
    if !mu.is_positive() {
        return Err(Error::NoQuotient(format!("μ = {mu} is not positive")));
    }
    Ok(mu.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupKind::*;

    fn tag(k: GroupKind, p: u32) -> GroupTag {
        GroupTag::new(k, p).unwrap()
    }
    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mu_examples() {
        let s = GroupTree::segment(tag(Dihedral(3), 7), tag(Cyclic(3), 7), tag(Tetra, 7));
        assert_eq!(s.mu().unwrap(), q(1, 12));
        let s = GroupTree::segment(tag(Icosa, 7), tag(Cyclic(5), 7), tag(Icosa, 7));
        assert_eq!(s.mu().unwrap(), q(1, 6));
        assert_eq!(GroupTree::point(tag(Octa, 5)).mu().unwrap(), q(-1, 24));
    }

    #[test]
    fn kps_examples() {
        let ico = GroupTree::segment(tag(Icosa, 7), tag(Cyclic(5), 7), tag(Dihedral(5), 7));
        assert_eq!(kps_genus(&ico, &60.into()).unwrap(), 6.into());
        let asm = GroupTree::segment(tag(Borel(1, 2), 3), tag(Cyclic(2), 3), tag(Dihedral(2), 3));
        assert_eq!(asm.mu().unwrap(), q(1, 12));
        assert_eq!(kps_genus(&asm, &36.into()).unwrap(), 4.into());
        assert!(kps_genus(&asm, &6.into()).is_err());
        assert!(kps_genus(&GroupTree::point(tag(Tetra, 5)), &12.into()).is_err());
        assert_eq!(minimal_quotient_order(&asm).unwrap(), 12.into());
    }

    #[test]
    fn validation_catches_each_lemma() {
        let ok = GroupTree::segment(tag(Pgl2(1), 3), tag(Borel(1, 2), 3), tag(Borel(2, 2), 3));
        ok.validate().unwrap();
        let not_borel = GroupTree::segment(tag(Tetra, 5), tag(Dihedral(2), 5), tag(Octa, 5));
        assert!(matches!(not_borel.validate(), Err(Error::MalformedTree(m)) if m.contains("E_t")));
        let not_max = GroupTree::segment(tag(Octa, 5), tag(Cyclic(2), 5), tag(Cyclic(4), 5));
        assert!(matches!(not_max.validate(), Err(Error::MalformedTree(m)) if m.contains("maximal")));
        let pgl = GroupTree::segment(tag(Pgl2(1), 5), tag(Cyclic(4), 5), tag(Dihedral(4), 5));
        assert!(matches!(pgl.validate(), Err(Error::MalformedTree(m)) if m.contains("must be")));
        let cyclic_tree = {
            let mut t = GroupTree::new(3);
            let a = t.add_vertex(tag(Cyclic(2), 3));
            let b = t.add_vertex(tag(Cyclic(2), 3));
            t.add_edge(a, b, tag(Cyclic(2), 3));
            t.add_edge(b, a, tag(Cyclic(2), 3));
            t
        };
        assert!(cyclic_tree.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = GroupTree::segment(tag(Pgl2(1), 3), tag(Borel(1, 2), 3), tag(Borel(2, 2), 3))
            .with_end(1, tag(Borel(2, 2), 3))
            .with_end(0, tag(Cyclic(4), 3));
        let j = t.to_json();
        assert_eq!(j["edges"][0]["tag"], "B(1,2)");
        assert_eq!(j["ends"][1]["tag"], "Zn(4)");
        assert_eq!(GroupTree::from_json(&j).unwrap(), t);
        let text = serde_json::to_string(&j).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(GroupTree::from_json(&back).unwrap(), t);
    }

    #[test]
    fn parabolic_chain_contracts_to_its_attachment() {
        let e = |t| tag(ElemAbelian(t), 2);
        let chain = GroupTree::chain(&[e(3), e(2), e(1)], &[e(2), e(1)]).with_end(2, e(1));
        let c = chain.contract(&BTreeSet::from([0])).unwrap();
        assert_eq!(c.vertices().len(), 1);
        assert_eq!(c.ends(), &[End { at: 0, tag: e(1) }]);
        assert_eq!(c.mu().unwrap(), chain.mu().unwrap());
    }

    #[test]
    fn equal_leaf_is_removed_and_proper_leaf_is_refused() {
        let s = GroupTree::segment(tag(Icosa, 7), tag(Cyclic(5), 7), tag(Cyclic(5), 7));
        let c = s.contract(&BTreeSet::from([0])).unwrap();
        assert_eq!(c.mu().unwrap(), s.mu().unwrap());
        let bad = GroupTree::segment(tag(Icosa, 7), tag(Cyclic(5), 7), tag(Dihedral(5), 7));
        match bad.contract(&BTreeSet::from([0])) {
            Err(Error::ContractionFailed { path, .. }) => assert_eq!(path, vec![1, 0]),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn herrlich_examples() {
        let ico = GroupTree::segment(tag(Icosa, 7), tag(Cyclic(5), 7), tag(Dihedral(5), 7));
        assert_eq!(ico.herrlich_dim(0), 1);
        let drin = GroupTree::segment(tag(Pgl2(1), 3), tag(Borel(1, 2), 3), tag(Borel(2, 2), 3));
        assert_eq!(drin.herrlich_dim(0), 0);
        let asm = GroupTree::segment(tag(Borel(1, 4), 5), tag(Cyclic(4), 5), tag(Dihedral(4), 5));
        assert_eq!(asm.herrlich_dim(0), 1);
    }

    #[test]
    fn geodesic_and_subtree() {
        let t = GroupTree::chain(
            &[tag(Cyclic(2), 3), tag(Dihedral(2), 3), tag(Cyclic(2), 3)],
            &[tag(Cyclic(2), 3), tag(Cyclic(2), 3)],
        );
        assert_eq!(t.geodesic(0, 2).unwrap(), vec![0, 1, 2]);
        let b = t.subtree(&BTreeSet::from([0, 1])).unwrap();
        assert!(t.mu().unwrap() >= b.mu().unwrap());
        assert!(t.subtree(&BTreeSet::from([0, 2])).is_err());
    }
}
