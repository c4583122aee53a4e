//! The Bruhat–Tits tree of PGL(2, F_q((π))).
//!
//! A vertex is stored in the normal form `(n, u)`: the class of the lattice
//! spanned by the columns of `[[π^n, u], [0, 1]]`, with `u` an exact Laurent
//! polynomial whose exponents are all below `n`. The end of the half-line
//! `(n, a mod π^n)`, `n → ∞`, is the point `a`; decreasing levels run to ∞.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::localfield::{Digit, LocalElement, LocalField, ProjPoint};
use crate::matrix::Mat2;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    level: i64,
    center: LocalElement,
}

impl TreeVertex {
    /// The class of `[[π^n, u], [0, 1]]`; `u` must be known modulo `π^n`.
    pub fn new(level: i64, center: &LocalElement) -> Result<TreeVertex> {
        Ok(TreeVertex { level, center: center.reduce_mod(level)? })
    }

    /// The vertex `𝒪e₀ + 𝒪π^j e₁` of the standard apartment ]0, ∞[.
    pub fn standard(k: &LocalField, j: i64) -> TreeVertex {
        TreeVertex { level: -j, center: k.zero() }
    }

    pub fn origin(k: &LocalField) -> TreeVertex {
        Self::standard(k, 0)
    }

    pub fn level(&self) -> i64 {
        self.level
    }
    pub fn center(&self) -> &LocalElement {
        &self.center
    }
    pub fn field(&self) -> &LocalField {
        self.center.field()
    }

    pub fn lattice_matrix(&self) -> Mat2 {
        let k = self.field();
        Mat2::new(k.monomial(1, self.level), self.center.clone(), k.zero(), k.one())
    }

    /// The `q + 1` adjacent vertices: the parent first, then the children
    /// `(n+1, u + cπ^n)` in digit order.
    pub fn neighbors(&self) -> Vec<TreeVertex> {
        let k = self.field();
        let mut out = Vec::with_capacity(k.q() as usize + 1);
        out.push(self.parent());
        for c in k.fq().elements() {
            out.push(TreeVertex { level: self.level + 1, center: &self.center + &k.monomial(c, self.level) });
        }
        out
    }

    pub fn parent(&self) -> TreeVertex {
        TreeVertex { level: self.level - 1, center: self.center.reduce_mod(self.level - 1).expect("centers are exact") }
    }

    /// The vertex at which the geodesics from `self` and `other` to ∞ merge.
    fn meeting(&self, other: &TreeVertex) -> TreeVertex {
        let diff = &self.center - &other.center;
        let mut k = self.level.min(other.level);
        if let Some(v) = diff.valuation().expect("centers are exact") {
            k = k.min(v);
        }
        TreeVertex { level: k, center: self.center.reduce_mod(k).expect("centers are exact") }
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.center)
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeVertex{self}")
    }
}

/// Normal form of the lattice spanned by the columns of `m`.
pub fn vertex_from_lattice(m: &Mat2) -> Result<TreeVertex> {
    let vc = m.c.valuation()?;
    let vd = m.d.valuation()?;
    // pivot column: smallest bottom valuation
    let ((x, y), (x2, y2)) = match (vc, vd) {
        (None, None) => return Err(Error::Singular),
        (Some(_), None) => ((&m.a, &m.c), (&m.b, &m.d)),
        (None, Some(_)) => ((&m.b, &m.d), (&m.a, &m.c)),
        (Some(a), Some(b)) if a < b => ((&m.a, &m.c), (&m.b, &m.d)),
        _ => ((&m.b, &m.d), (&m.a, &m.c)),
    };
    let ratio = y2.checked_div(y)?;
    let e = x2.checked_sub(&ratio.checked_mul(x)?)?;
    let ve = e.valuation()?.ok_or(Error::Singular)?;
    let vy = y.valuation()?.expect("pivot is nonzero");
    let level = ve - vy;
    let u = x.checked_div(y)?;
    TreeVertex::new(level, &u)
}

/// `v(det) − 2·min v(entries)`: the distance moved by a transition matrix.
pub fn elementary_divisor_gap(t: &Mat2) -> Result<u64> {
    let det = t.det().valuation()?.ok_or(Error::Singular)?;
    let m = t.min_valuation()?.ok_or(Error::Singular)?;
    Ok((det - 2 * m) as u64)
}

pub fn distance(v: &TreeVertex, w: &TreeVertex) -> Result<u64> {
    let t = v.lattice_matrix().adjugate().checked_mul(&w.lattice_matrix())?;
    elementary_divisor_gap(&t)
}

pub fn act(g: &Mat2, v: &TreeVertex) -> Result<TreeVertex> {
    vertex_from_lattice(&g.checked_mul(&v.lattice_matrix())?)
}

pub fn is_fixed(g: &Mat2, v: &TreeVertex) -> Result<bool> {
    Ok(act(g, v)? == *v)
}

/// Vertices of the geodesic from `v` to `w`, both included.
pub fn geodesic(v: &TreeVertex, w: &TreeVertex) -> Vec<TreeVertex> {
    let m = v.meeting(w);
    let mut path = Vec::new();
    let mut x = v.clone();
    while x.level > m.level {
        path.push(x.clone());
        x = x.parent();
    }
    path.push(m.clone());
    let mut tail = Vec::new();
    let mut y = w.clone();
    while y.level > m.level {
        tail.push(y.clone());
        y = y.parent();
    }
    path.extend(tail.into_iter().rev());
    path
}

/// Ball of vertices around a center vertex.
#[derive(Debug, Clone)]
pub struct Window {
    pub center: TreeVertex,
    pub radius: u64,
}

impl Window {
    pub fn new(center: TreeVertex, radius: u64) -> Window {
        Window { center, radius }
    }

    pub fn contains(&self, v: &TreeVertex) -> bool {
        distance(&self.center, v).is_ok_and(|d| d <= self.radius)
    }

    pub fn levels(&self) -> RangeInclusive<i64> {
        let r = self.radius as i64;
        self.center.level - r..=self.center.level + r
    }

    /// All vertices of the ball, in breadth-first order.
    pub fn vertices(&self) -> Vec<TreeVertex> {
        let mut seen = HashSet::new();
        let mut out = vec![self.center.clone()];
        seen.insert(self.center.clone());
        let mut i = 0;
        let mut depth = vec![0u64];
        while i < out.len() {
            if depth[i] < self.radius {
                for w in out[i].neighbors() {
                    if seen.insert(w.clone()) {
                        out.push(w);
                        depth.push(depth[i] + 1);
                    }
                }
            }
            i += 1;
        }
        out
    }
}

/// A finite piece of the tree with marked boundary vertices where the
/// subtree continues outside the window.
#[derive(Debug, Clone, Default)]
pub struct TreeWindow {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize)>,
    pub ends: Vec<usize>,
}

impl TreeWindow {
    fn from_vertices(vertices: Vec<TreeVertex>) -> TreeWindow {
        let index: HashMap<&TreeVertex, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(&j) = index.get(&v.parent()) {
                edges.push((j.min(i), j.max(i)));
            }
        }
        edges.sort_unstable();
        TreeWindow { vertices, edges, ends: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
    pub fn contains(&self, v: &TreeVertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertices.iter()
                .map(|v| json!({"n": v.level, "u": v.center.to_string()}))
                .collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "marks": {"ends": self.ends},
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n  node [shape=point];\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if self.ends.contains(&i) { ", shape=circle" } else { "" };
            s.push_str(&format!("  v{i} [xlabel=\"{v}\"{shape}];\n"));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  v{a} -- v{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Vertex of the half-line toward the finite point `a` at level `n`.
fn toward(a: &LocalElement, n: i64) -> Result<TreeVertex> {
    TreeVertex::new(n, a)
}

/// The apartment ]x, y[ restricted to a range of levels, ordered from the
/// `x` side to the `y` side.
pub fn apartment(x: &ProjPoint, y: &ProjPoint, levels: RangeInclusive<i64>) -> Result<Vec<TreeVertex>> {
    if x.try_eq(y)? {
        return Err(Error::InvalidParameter("apartment needs distinct ends".into()));
    }
    let (lo, hi) = (*levels.start(), *levels.end());
    match (x.affine()?, y.affine()?) {
        (Some(a), None) => (lo..=hi).rev().map(|n| toward(&a, n)).collect(),
        (None, Some(b)) => (lo..=hi).map(|n| toward(&b, n)).collect(),
        (Some(a), Some(b)) => {
            let k = a.checked_sub(&b)?.valuation()?.expect("distinct points");
            let mut out = Vec::new();
            for n in (lo.max(k)..=hi).rev() {
                out.push(toward(&a, n)?);
            }
            for n in lo.max(k + 1)..=hi {
                out.push(toward(&b, n)?);
            }
            Ok(out)
        }
        (None, None) => unreachable!("distinct points cannot both be ∞"),
    }
}

/// Apartment ]x, y[ clipped to a ball.
pub fn apartment_in(x: &ProjPoint, y: &ProjPoint, window: &Window) -> Result<Vec<TreeVertex>> {
    let line = apartment(x, y, window.levels())?;
    Ok(line.into_iter().filter(|v| window.contains(v)).collect())
}

pub fn median(x: &ProjPoint, y: &ProjPoint, z: &ProjPoint) -> Result<TreeVertex> {
    let g = Mat2::cross_ratio_map(x, y, z)?;
    act(&g.adjugate(), &TreeVertex::origin(x.field()))
}

/// Cap on element orders used for torsion detection: 2q²(q²−1).
pub fn torsion_cap(q: u32) -> u64 {
    let q = q as u64;
    2 * q * q * (q * q - 1)
}

/// Fixed vertices of a torsion element within a window.
pub fn mirror(g: &Mat2, window: &Window) -> Result<TreeWindow> {
    g.order(torsion_cap(g.field().q()))?;
    let mut fixed = Vec::new();
    for v in window.vertices() {
        if is_fixed(g, &v)? {
            fixed.push(v);
        }
    }
    let mut tw = TreeWindow::from_vertices(fixed);
    let mut ends = Vec::new();
    for (i, v) in tw.vertices.iter().enumerate() {
        if distance(&window.center, v)? == window.radius {
            for w in v.neighbors() {
                if !window.contains(&w) && is_fixed(g, &w)? {
                    ends.push(i);
                    break;
                }
            }
        }
    }
    tw.ends = ends;
    Ok(tw)
}

/// The subtree spanned by the medians of all 3-subsets of `points`, clipped
/// to the window.
pub fn tree_of_points(points: &[ProjPoint], window: &Window) -> Result<TreeWindow> {
    let n = points.len();
    let triples: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))).collect();
    let medians: Vec<TreeVertex> =
        triples.par_iter().map(|&(i, j, k)| median(&points[i], &points[j], &points[k])).collect::<Result<_>>()?;
    let mut uniq: Vec<TreeVertex> = Vec::new();
    for m in medians {
        if !uniq.contains(&m) {
            uniq.push(m);
        }
    }
    let mut hull: Vec<TreeVertex> = Vec::new();
    let mut seen = HashSet::new();
    for i in 0..uniq.len() {
        for j in i..uniq.len() {
            for v in geodesic(&uniq[i], &uniq[j]) {
                if seen.insert(v.clone()) {
                    hull.push(v);
                }
            }
        }
    }
    let inside: Vec<TreeVertex> = hull.iter().filter(|v| window.contains(v)).cloned().collect();
    let mut tw = TreeWindow::from_vertices(inside);
    tw.ends = tw
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.neighbors().iter().any(|w| seen.contains(w) && !window.contains(w)))
        .map(|(i, _)| i)
        .collect();
    Ok(tw)
}

/// Image of a stabilizer element in PGL(2, F_q) acting on the link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkImage {
    pub entries: [Digit; 4],
}

impl LinkImage {
    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = self.entries;
        b == 0 && c == 0 && a == d && a != 0
    }
}

#[derive(Debug, Clone)]
pub struct LinkRep {
    pub images: Vec<LinkImage>,
    /// Indices of the generators that act trivially on the link.
    pub kernel: Vec<usize>,
}

/// Reduces each generator, written in the lattice basis of `v`, modulo π.
pub fn link_rep(gens: &[Mat2], v: &TreeVertex) -> Result<LinkRep> {
    let basis = v.lattice_matrix();
    let basis_inv = basis.adjugate();
    let mut images = Vec::new();
    let mut kernel = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let h = basis_inv.checked_mul(&g.checked_mul(&basis)?)?;
        let m = h.min_valuation()?.ok_or(Error::Singular)?;
        let h = h.scale(&v.field().monomial(1, -m));
        if h.det().valuation()? != Some(0) {
            return Err(Error::NotFixing(i));
        }
        let mut entries = [0; 4];
        for (slot, e) in entries.iter_mut().zip(h.entries()) {
            *slot = e.coefficient(0).ok_or(Error::Indeterminate("link reduction"))?;
        }
        let img = LinkImage { entries };
        if img.is_identity() {
            kernel.push(i);
        }
        images.push(img);
    }
    Ok(LinkRep { images, kernel })
}
