use std::path::PathBuf;

use serde_json::{json, Value};

use mumford::bt_tree::{distance, geodesic, median, mirror, TreeVertex, Window};
use mumford::case_catalog::{case_report, CaseId};
use mumford::curve_families::{self, FamilyRecord};
use mumford::discreteness::asm_construction;
use mumford::hurwitz_bounds::{census_exceptional, exceptional_genera, exceptional_orders};
use mumford::localfield::{make_field, LocalField, ProjPoint};
use mumford::matrix::Mat2;
use mumford::smallgroups::GroupCountTable;
use mumford::tables::{diff, regenerate_ab, regenerate_mu, AbGrid, Bound, Golden, TableName};
use mumford::Result;

use crate::report::{cell, Report, EXIT_INDETERMINATE, EXIT_MISMATCH};
use crate::{Cli, Command, DiscreteCmd, FamilyCmd, GlobalOpts, TreeCmd};

pub const DATA_DIR_VAR: &str = "MUMFORD_DATA_DIR";
const GNU_FILE: &str = "gnu_counts.json";

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_VAR).map(PathBuf::from)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report payload serializes")
}

/// Table rows read back out of a JSON array, one column per key.
fn rows_from(report: &mut Report, items: &[Value], keys: &[&str]) {
    for it in items {
        report.row(keys.iter().map(|k| it.get(*k).map(cell).unwrap_or_default()).collect());
    }
}

/// Field/value table of every scalar top-level entry.
fn scalar_fields(report: Report) -> Report {
    let keys: Vec<String> = match &report.payload {
        Value::Object(m) => m.iter().filter(|(_, v)| !v.is_object()).map(|(k, _)| k.clone()).collect(),
        _ => Vec::new(),
    };
    let keys: Vec<&str> = keys.iter().map(|s| s.as_str()).collect();
    report.fields(&keys)
}

pub fn run(cli: &Cli) -> Result<Report> {
    let opts = &cli.opts;
    match &cli.cmd {
        Command::Table { name, param_max } => table(name, *param_max, opts),
        Command::Census { live } => census(*live),
        Command::Case { descriptor } => case(&descriptor.join(" ")),
        Command::Family(f) => family(f),
        Command::Tree(t) => tree(t, opts),
        Command::Discrete(DiscreteCmd::Asm { prime, degree, shift_val, max_length }) => {
            discrete_asm(*prime, *degree, *shift_val, *max_length, opts.precision)
        }
    }
}

fn golden() -> Result<Golden> {
    match data_dir() {
        Some(dir) => Golden::load(&dir),
        None => Ok(Golden::bundled()),
    }
}

fn table(name: &str, param_max: u32, opts: &GlobalOpts) -> Result<Report> {
    let name: TableName = name.parse()?;
    let golden = golden()?;
    let command = format!("table {name}");
    if name == TableName::Ab {
        let base = &golden.ab.grid;
        let grid = AbGrid {
            primes: opts.p.map_or_else(|| base.primes.clone(), |p| vec![p]),
            t_max: opts.t.unwrap_or(base.t_max),
            param_max,
        };
        let table = regenerate_ab(&grid)?;
        let payload = to_value(&table);
        let mut report = Report::new(command, payload.clone()).columns(&[
            "case",
            "formula",
            "a",
            "b",
            "hurwitz",
            "mu",
            "kps_genus",
            "agree",
        ]);
        let rows = payload["rows"].as_array().cloned().unwrap_or_default();
        rows_from(&mut report, &rows, &["case", "formula", "a", "b", "hurwitz", "mu", "kps_genus", "agree"]);
        for r in table.rows.iter().filter(|r| !r.agree) {
            report.fail(EXIT_MISMATCH, format!("{}: closed form, Riemann-Hurwitz and μ disagree", r.case));
        }
        if grid == *base {
            let regen = Golden { mu: golden.mu.clone(), ab: table };
            for line in diff(name, &regen, &golden)? {
                report.fail(EXIT_MISMATCH, line);
            }
        } else {
            report.note(format!(
                "grid p in {:?}, t <= {}, params <= {} has no golden copy, only agreement was checked",
                grid.primes, grid.t_max, grid.param_max
            ));
        }
        report.note(format!("{} rows", report.rows.len()));
        return Ok(report);
    }
    let rows = regenerate_mu(name, golden.mu_rows(name)?)?;
    let mut regen = golden.clone();
    regen.mu.insert(name.to_string(), rows.clone());
    let diffs = diff(name, &regen, &golden)?;
    let payload = json!({ "table": name.to_string(), "rows": rows, "diff": diffs });
    let keys = ["row", "v1", "edge", "v0", "printed", "derived", "attained_at", "outcome"];
    let mut report = Report::new(command, payload).columns(&keys);
    let show = |b: &Option<Bound>| b.as_ref().map_or("-".to_string(), |b| b.to_string());
    for r in &rows {
        report.row(vec![
            r.row.to_string(),
            r.v1.clone(),
            r.edge.clone(),
            r.v0.clone(),
            show(&r.printed),
            show(&r.derived),
            r.attained_at.clone().unwrap_or_else(|| "-".into()),
            format!("{:?}", r.outcome).to_lowercase(),
        ]);
    }
    for r in &rows {
        let label = format!("({}, {}, {})", r.v1, r.edge, r.v0);
        if r.outcome.is_failure() {
            report.fail(EXIT_MISMATCH, format!("{label}: {}", format!("{:?}", r.outcome).to_lowercase()));
        } else if r.row == 0 || r.derived != r.printed {
            report.note(format!("{label}: {}", format!("{:?}", r.outcome).to_lowercase()));
        }
    }
    for line in diffs {
        report.fail(EXIT_MISMATCH, line);
    }
    Ok(report)
}

fn census(live: bool) -> Result<Report> {
    let counts = if live {
        let mut orders: Vec<u64> = exceptional_genera(10_000).into_iter().flat_map(exceptional_orders).collect();
        orders.sort_unstable();
        orders.dedup();
        GroupCountTable::generate(&orders)?
    } else {
        match data_dir() {
            Some(dir) => GroupCountTable::load(&dir.join(GNU_FILE))?,
            None => GroupCountTable::bundled(),
        }
    };
    let c = census_exceptional(&counts.counts, &counts.nonsolvable)?;
    let payload = to_value(&c);
    let keys = ["g", "orders", "count"];
    let mut report = Report::new(if live { "census --live" } else { "census" }, payload.clone()).columns(&keys);
    rows_from(&mut report, payload["perGenus"].as_array().expect("perGenus"), &keys);
    report.note(format!("interval: {}", c.interval));
    report.note(format!("total: {}", c.total));
    report.note(format!("non-solvable: {:?}", c.nonsolvable));
    if c.total != 134 {
        report.fail(EXIT_MISMATCH, format!("expected 134 groups, counted {}", c.total));
    }
    if c.nonsolvable != [(60, 1)] {
        report.fail(EXIT_MISMATCH, "expected the icosahedral group as the only non-solvable entry");
    }
    Ok(report)
}

fn case(descriptor: &str) -> Result<Report> {
    let id: CaseId = descriptor.parse()?;
    let r = case_report(&id)?;
    let mut report = scalar_fields(Report::new(format!("case {descriptor}"), to_value(&r)));
    report.note(format!("verdict: {}", r.verdict));
    if !r.consistent {
        report.fail(EXIT_MISMATCH, "μ genus and Riemann-Hurwitz genus disagree");
    }
    Ok(report)
}

fn family(cmd: &FamilyCmd) -> Result<Report> {
    let (command, rec): (String, FamilyRecord) = match cmd {
        FamilyCmd::Asm { prime, degree } => {
            (format!("family asm {prime} {degree}"), curve_families::asm(*prime, *degree)?)
        }
        FamilyCmd::Drinfeld { q, degrees } => {
            let d: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
            (format!("family drinfeld {q} {}", d.join(" ")), curve_families::drinfeld(*q, degrees)?)
        }
        FamilyCmd::Icosa { prime } => (format!("family icosa {prime}"), curve_families::icosahedral(*prime)?),
    };
    let mut report = scalar_fields(Report::new(command, to_value(&rec)));
    if !rec.is_consistent() {
        report.fail(EXIT_MISMATCH, "closed-form, μ and Riemann-Hurwitz genera disagree");
    }
    Ok(report)
}

fn field(opts: &GlobalOpts) -> Result<LocalField> {
    Ok(LocalField::with_precision(make_field(opts.p.unwrap_or(2), opts.t.unwrap_or(1))?, opts.precision))
}

fn point(k: &LocalField, s: &str) -> Result<ProjPoint> {
    if s == "inf" || s == "∞" {
        Ok(ProjPoint::infinity(k))
    } else {
        ProjPoint::new(k.parse(s)?, k.one())
    }
}

fn tree(cmd: &TreeCmd, opts: &GlobalOpts) -> Result<Report> {
    let k = field(opts)?;
    let q = k.q();
    match cmd {
        TreeCmd::Mirror { kind, x } => {
            let x = k.parse(x)?;
            let v = x.valuation()?;
            let lower = kind == "lower";
            let g = if lower { Mat2::lower(x.clone()) } else { Mat2::translation(x.clone()) };
            let radius = opts.window;
            let window = Window::new(TreeVertex::origin(&k), radius);
            let m = mirror(&g, &window)?;
            let r = radius as i64;
            let mut report = Report::new(format!("tree mirror {kind} {x} --window {radius}"), Value::Null).columns(&[
                "j",
                "fixed",
                "predicted",
            ]);
            let mut apartment = Vec::new();
            for j in -r..=r {
                let lj = TreeVertex::standard(&k, j);
                let fixed = m.contains(&lj);
                let predicted = match v {
                    None => true,
                    Some(v) if lower => j <= v,
                    Some(v) => j >= -v,
                };
                if fixed != predicted {
                    report.fail(EXIT_MISMATCH, format!("Λ_{j}: fixed {fixed}, predicted {predicted}"));
                }
                apartment.push(json!({ "j": j, "fixed": fixed, "predicted": predicted }));
            }
            if !m.is_connected() {
                report.fail(EXIT_MISMATCH, "fixed vertices do not span a subtree");
            }
            let levels: Vec<i64> =
                apartment.iter().filter(|a| a["fixed"] == true).map(|a| a["j"].as_i64().expect("j")).collect();
            rows_from(&mut report, &apartment, &["j", "fixed", "predicted"]);
            match (levels.first(), levels.last()) {
                (Some(lo), Some(hi)) => report.note(format!("apartment levels in the mirror: {lo} ≤ j ≤ {hi}")),
                _ => report.note("no apartment vertex in the mirror"),
            }
            report.note(format!("{} fixed vertices in the window, {} leaving it", m.len(), m.ends.len()));
            report.payload = json!({
                "element": format!("{kind}({x})"),
                "valuation": v,
                "q": q,
                "radius": radius,
                "apartment": apartment,
                "mirror": m.to_json(),
            });
            Ok(report)
        }
        TreeCmd::Distance { level1, center1, level2, center2 } => {
            let a = TreeVertex::new(*level1, &k.parse(center1)?)?;
            let b = TreeVertex::new(*level2, &k.parse(center2)?)?;
            let d = distance(&a, &b)?;
            let path = geodesic(&a, &b);
            let payload = json!({
                "from": a.to_string(),
                "to": b.to_string(),
                "distance": d,
                "geodesic": path.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            let mut report = Report::new(format!("tree distance {level1} {center1} {level2} {center2}"), payload)
                .fields(&["from", "to", "distance"]);
            if path.len() as u64 != d + 1 {
                report.fail(EXIT_MISMATCH, format!("geodesic has {} vertices", path.len()));
            }
            Ok(report)
        }
        TreeCmd::Median { x, y, z } => {
            let (px, py, pz) = (point(&k, x)?, point(&k, y)?, point(&k, z)?);
            let m = median(&px, &py, &pz)?;
            let payload =
                json!({ "points": [px.to_string(), py.to_string(), pz.to_string()], "median": m.to_string() });
            let mut report = Report::new(format!("tree median {x} {y} {z}"), payload).fields(&["points", "median"]);
            for (a, b, c) in [(&py, &pz, &px), (&pz, &px, &py), (&py, &px, &pz)] {
                if median(a, b, c)? != m {
                    report.fail(EXIT_MISMATCH, "median depends on the order of the points");
                    break;
                }
            }
            Ok(report)
        }
        TreeCmd::Valency => {
            let o = TreeVertex::origin(&k);
            let nbrs = o.neighbors();
            let mut distinct = nbrs.clone();
            distinct.sort_by_key(|v| v.to_string());
            distinct.dedup();
            let adjacent = nbrs.iter().map(|v| distance(&o, v)).collect::<Result<Vec<_>>>()?;
            let payload = json!({
                "q": q,
                "vertex": o.to_string(),
                "valency": distinct.len(),
                "neighbors": nbrs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            let mut report = Report::new("tree valency", payload).fields(&["q", "vertex", "valency"]);
            if distinct.len() as u64 != q as u64 + 1 || adjacent.iter().any(|&d| d != 1) {
                report.fail(EXIT_MISMATCH, format!("expected q + 1 = {} neighbors at distance 1", q + 1));
            }
            Ok(report)
        }
    }
}

fn discrete_asm(p: u32, t: u32, shift_val: i64, max_length: usize, precision: i64) -> Result<Report> {
    let d = asm_construction(p, t, shift_val, max_length, precision)?;
    let free_to = d.words.as_ref().filter(|w| w.is_free()).map(|w| w.max_length);
    let payload = json!({
        "disjoint": d.free_product.disjoint,
        "witnesses": d.free_product.witness.iter().collect::<Vec<_>>(),
        "freenessTo": free_to,
        "generators": d.generators,
        "expectedRank": d.expected_rank,
        "wordsChecked": d.words.as_ref().map(|w| w.words_checked),
        "detail": to_value(&d),
    });
    let mut report = scalar_fields(Report::new(format!("discrete asm {p} {t} {shift_val} {max_length}"), payload));
    if d.generators as u64 != d.expected_rank {
        report.fail(EXIT_MISMATCH, format!("{} generators, rank {} expected", d.generators, d.expected_rank));
    }
    if let Some(w) = &d.words {
        if !w.violations.is_empty() {
            report.fail(EXIT_MISMATCH, format!("relations despite disjoint circles: {}", w.violations.join(", ")));
        }
        if !w.indeterminate.is_empty() {
            report.fail(
                EXIT_INDETERMINATE,
                format!("undecided at precision {precision}: {}", w.indeterminate.join(", ")),
            );
        }
    }
    if let Some(c) = &d.free_product.conjugator {
        report.note(format!("conjugated by {c}"));
    }
    if !d.free_product.disjoint {
        report.note("isometric circles meet, word check skipped");
    }
    Ok(report)
}
