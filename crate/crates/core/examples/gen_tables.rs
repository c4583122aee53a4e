//! Rewrites the regenerated fields of `data/golden_tables.json`, keeping the
//! printed entries.
//!
//! cargo run --release -p mumford-core --example gen_tables > /tmp/t.json

use mumford::tables::Golden;

fn main() {
    let fresh = Golden::bundled().regenerate().expect("tables regenerate");
    println!("{}", fresh.to_json());
}
