//! Many discrete Gaussian counting queries, as in a census release.

use fdp::census::{census_compose, AllocationTable};

const TABLE: &str = "level,query,sigma
nation,total,10
state,total,20
state,age,20
county,total,40
county,age,40
tract,total,80
";

fn main() -> fdp::error::Result<()> {
    let table = AllocationTable::from_reader(TABLE.as_bytes())?;
    let mixed = census_compose(&table, 1e-10, 1e-4)?.summary;
    println!("{} queries, mixed scales: eps in [{:.6}, {:.6}]", mixed.m, mixed.eps_lower, mixed.eps_upper);

    let equal = census_compose(&AllocationTable::uniform(72, 25.0)?, 1e-11, 1e-4)?.summary;
    println!("72 queries at sigma 25: eps in [{:.10}, {:.10}], cell {:.3e}", equal.eps_lower, equal.eps_upper, equal.cell);
    Ok(())
}
