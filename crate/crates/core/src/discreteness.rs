//! Isometric circles |cz + d| ≤ 1 of finite-order elements, the disjointness
//! test for free products G ∗ H of finite groups, and bounded-length word
//! checks for the commutator generators of the Artin–Schreier–Mumford
//! Schottky groups.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::localfield::{make_field, LocalElement, LocalField};
use crate::matrix::{generate_group, Mat2};

/// A closed disk {z : v(z − center) ≥ radius_val}, or the whole line when
/// the circle is improper (c = 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disk {
    Proper { center: LocalElement, radius_val: i64 },
    Improper,
}

impl Disk {
    pub fn is_proper(&self) -> bool {
        matches!(self, Disk::Proper { .. })
    }

    pub fn contains(&self, z: &LocalElement) -> Result<bool> {
        match self {
            Disk::Improper => Ok(true),
            Disk::Proper { center, radius_val } => at_least(&z.checked_sub(center)?, *radius_val),
        }
    }
}

impl std::fmt::Display for Disk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Disk::Improper => write!(f, "P¹"),
            Disk::Proper { center, radius_val } => write!(f, "v(z − ({center})) ≥ {radius_val}"),
        }
    }
}

/// Scales `g` by a power of π so that v(det g) ∈ {0, 1}. Conjugating by a
/// translation then translates the isometric circle.
pub fn normalize(g: &Mat2) -> Result<Mat2> {
    let v = g.det().valuation()?.ok_or(Error::Singular)?;
    let k = g.field();
    Ok(g.scale(&k.monomial(1, -v.div_euclid(2))))
}

/// Ī_g = {z : |cz + d| ≤ 1} for the normalized second row (c, d).
pub fn isometric_circle(g: &Mat2) -> Result<Disk> {
    let g = normalize(g)?;
    let Some(vc) = g.c.valuation()? else {
        return Ok(Disk::Improper);
    };
    Ok(Disk::Proper { center: -(g.d.checked_div(&g.c)?), radius_val: -vc })
}

pub fn disks_disjoint(d1: &Disk, d2: &Disk) -> Result<bool> {
    let (Disk::Proper { center: c1, radius_val: r1 }, Disk::Proper { center: c2, radius_val: r2 }) = (d1, d2) else {
        return Err(Error::ImproperDisk);
    };
    Ok(!at_least(&c1.checked_sub(c2)?, *r1.min(r2))?)
}

/// v(x) ≥ r, decided from the known digits when x vanishes to working precision.
fn at_least(x: &LocalElement, r: i64) -> Result<bool> {
    match x.valuation() {
        Ok(None) => Ok(true),
        Ok(Some(v)) => Ok(v >= r),
        Err(e) => match x.valuation_lower_bound() {
            Some(b) if b >= r => Ok(true),
            _ => Err(e),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeProductReport {
    pub disjoint: bool,
    pub order_g: usize,
    pub order_h: usize,
    /// Offending pair (γ, δ) with overlapping circles.
    pub witness: Option<(String, String)>,
    /// Applied to both groups first when some circle was improper.
    pub conjugator: Option<String>,
}

const GROUP_CAP: usize = 4096;

fn nontrivial(gens: &[Mat2], k: &LocalField) -> Result<Vec<Mat2>> {
    let mut g = generate_group(gens, k, GROUP_CAP)?;
    g.retain(|x| !x.is_scalar());
    Ok(g)
}

fn circles(elems: &[Mat2]) -> Result<Vec<Disk>> {
    elems.iter().map(isometric_circle).collect()
}

fn conjugate_all(elems: &[Mat2], r: &Mat2) -> Vec<Mat2> {
    let ri = r.adjugate();
    elems.iter().map(|x| &(r * x) * &ri).collect()
}

/// Rotations in PGL(2, O) tried, in order, to make every circle proper.
fn rotations(k: &LocalField) -> Vec<Mat2> {
    let w = Mat2::antidiagonal(k);
    let mut out = vec![w.clone()];
    for u in k.fq().elements().filter(|&u| u != 0) {
        out.push(&Mat2::lower(k.constant(u)) * &w);
        out.push(Mat2::from_digits(k, [1, u, 1, 0]));
    }
    out
}

/// Whether ⟨G, H⟩ = G ∗ H is discrete, by disjointness of the isometric
/// circles of all non-trivial γ ∈ G, δ ∈ H.
pub fn free_product_discrete(gens_g: &[Mat2], gens_h: &[Mat2], k: &LocalField) -> Result<FreeProductReport> {
    let mut g = nontrivial(gens_g, k)?;
    let mut h = nontrivial(gens_h, k)?;
    let mut conjugator = None;
    let (mut cg, mut ch) = (circles(&g)?, circles(&h)?);
    if cg.iter().chain(&ch).any(|d| !d.is_proper()) {
        let found = rotations(k).into_iter().find_map(|r| {
            let (g2, h2) = (conjugate_all(&g, &r), conjugate_all(&h, &r));
            let (c1, c2) = (circles(&g2).ok()?, circles(&h2).ok()?);
            c1.iter().chain(&c2).all(|d| d.is_proper()).then_some((r, g2, h2, c1, c2))
        });
        let (r, g2, h2, c1, c2) = found.ok_or(Error::ImproperDisk)?;
        conjugator = Some(r.to_string());
        (g, h, cg, ch) = (g2, h2, c1, c2);
    }
    let mut witness = None;
    'outer: for (x, dx) in g.iter().zip(&cg) {
        for (y, dy) in h.iter().zip(&ch) {
            if !disks_disjoint(dx, dy)? {
                witness = Some((x.to_string(), y.to_string()));
                break 'outer;
            }
        }
    }
    Ok(FreeProductReport {
        disjoint: witness.is_none(),
        order_g: g.len() + 1,
        order_h: h.len() + 1,
        witness,
        conjugator,
    })
}

/// x y x⁻¹ y⁻¹.
pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    &(&(x * y) * &x.adjugate()) * &y.adjugate()
}

/// The commutators [ε, γε′γ] over non-trivial ε, ε′ ∈ E, which freely
/// generate the kernel of E ∗ γEγ → E × γEγ.
pub fn schottky_commutators(gens_e: &[Mat2], gamma: &Mat2) -> Result<Vec<Mat2>> {
    if !gamma.pow(2).is_scalar() || gamma.is_scalar() {
        return Err(Error::NotInvolution);
    }
    let k = gamma.field().clone();
    let e = nontrivial(gens_e, &k)?;
    let mut out = Vec::with_capacity(e.len() * e.len());
    for x in &e {
        for y in &e {
            out.push(commutator(x, &(&(gamma * y) * gamma)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct WordProblemReport {
    pub max_length: usize,
    pub generators: usize,
    pub words_checked: u64,
    /// Reduced words evaluating to a scalar matrix.
    pub violations: Vec<String>,
    /// Words whose product is zero off the diagonal only to the working precision.
    pub indeterminate: Vec<String>,
}

impl WordProblemReport {
    pub fn is_free(&self) -> bool {
        self.violations.is_empty() && self.indeterminate.is_empty()
    }
}

/// Letter 2i is generator i, letter 2i + 1 its inverse.
fn word_text(w: &[usize]) -> String {
    w.iter()
        .map(|&l| if l % 2 == 0 { format!("g{}", l / 2) } else { format!("g{}^-1", l / 2) })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Walk<'a> {
    letters: &'a [Mat2],
    max: usize,
    checked: u64,
    violations: Vec<String>,
    indeterminate: Vec<String>,
}

impl Walk<'_> {
    fn visit(&mut self, word: &mut Vec<usize>, prod: &Mat2) {
        self.checked += 1;
        if prod.is_scalar() {
            let exact = prod.is_exact();
            let text = word_text(word);
            if exact {
                self.violations.push(text)
            } else {
                self.indeterminate.push(text)
            }
        }
        if word.len() == self.max {
            return;
        }
        let last = *word.last().expect("non-empty word");
        for l in 0..self.letters.len() {
            if l == last ^ 1 {
                continue;
            }
            word.push(l);
            let next = prod * &self.letters[l];
            self.visit(word, &next);
            word.pop();
        }
    }
}

/// Enumerates the reduced words of length 1..=`max_length` in `gens` and
/// their inverses and records those that evaluate to the identity.
pub fn free_words_check(gens: &[Mat2], max_length: usize) -> Result<WordProblemReport> {
    if max_length == 0 {
        return Err(Error::InvalidParameter("word length must be at least 1".into()));
    }
    let letters: Vec<Mat2> = gens.iter().flat_map(|g| [g.clone(), g.adjugate()]).collect();
    let parts: Vec<Walk> = (0..letters.len())
        .into_par_iter()
        .map(|first| {
            let mut walk =
                Walk { letters: &letters, max: max_length, checked: 0, violations: vec![], indeterminate: vec![] };
            walk.visit(&mut vec![first], &letters[first]);
            walk
        })
        .collect();
    let mut report = WordProblemReport {
        max_length,
        generators: gens.len(),
        words_checked: 0,
        violations: Vec::new(),
        indeterminate: Vec::new(),
    };
    for w in parts {
        report.words_checked += w.checked;
        report.violations.extend(w.violations);
        report.indeterminate.extend(w.indeterminate);
    }
    Ok(report)
}

/// The free product E_t ∗ QE_tQ⁻¹ with E_t lower unipotent over F_q and Q
/// the translation by π^shift_val, and the commutator generators of Γ_t.
#[derive(Debug, Clone, Serialize)]
pub struct AsmDiscreteness {
    pub p: u32,
    pub t: u32,
    pub shift_val: i64,
    pub free_product: FreeProductReport,
    pub generators: usize,
    pub expected_rank: u64,
    pub words: Option<WordProblemReport>,
}

pub fn asm_construction(p: u32, t: u32, shift_val: i64, max_length: usize, precision: i64) -> Result<AsmDiscreteness> {
    let k = LocalField::with_precision(make_field(p, t)?, precision);
    let q = k.q() as u64;
    let e: Vec<Mat2> = k.fq().basis().into_iter().map(|b| Mat2::lower(k.constant(b))).collect();
    let s = k.monomial(1, shift_val);
    let shift = Mat2::translation(s.clone());
    let e2 = conjugate_all(&e, &shift);
    let free_product = free_product_discrete(&e, &e2, &k)?;
    let gamma = Mat2::new(-k.one(), s, k.zero(), k.one());
    let gens = schottky_commutators(&e, &gamma)?;
    let words = if free_product.disjoint && max_length > 0 { Some(free_words_check(&gens, max_length)?) } else { None };
    Ok(AsmDiscreteness {
        p,
        t,
        shift_val,
        free_product,
        generators: gens.len(),
        expected_rank: (q - 1) * (q - 1),
        words,
    })
}
