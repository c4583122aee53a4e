//! Exact computations around Mumford curves with many automorphisms: the
//! Bruhat–Tits tree of PGL(2) over F_q((π)), finite subgroups of PGL(2),
//! trees of groups, Riemann–Hurwitz bookkeeping and the bound
//! F(g) = 2√g(√g+1)².

pub mod bt_tree;
pub mod case_catalog;
pub mod curve_families;
pub mod discreteness;
pub mod error;
pub mod finite_groups;
pub mod graph_of_groups;
pub mod hurwitz_bounds;
pub mod localfield;
pub mod matrix;
pub mod smallgroups;
pub mod tables;

mod ser;

pub use error::{Error, Result};
