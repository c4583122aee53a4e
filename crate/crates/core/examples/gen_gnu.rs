//! Recomputes `data/gnu_counts.json` for the orders between F(g) and 12(g−1)
//! with g = 5..=8.
//!
//! cargo run --release -p mumford-core --example gen_gnu > crates/core/data/gnu_counts.json

use mumford::hurwitz_bounds::{exceptional_genera, exceptional_orders};
use mumford::smallgroups::GroupCountTable;

fn main() {
    let orders: Vec<u64> = exceptional_genera(10_000).into_iter().flat_map(exceptional_orders).collect();
    let table = GroupCountTable::generate(&orders).expect("orders below 256");
    println!("{}", table.to_json());
}
