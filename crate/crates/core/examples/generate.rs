// Seeded generators: the same seed always gives the same file.

use std::fmt::Write;

use quasi_dst::generators::{random_quasi_bipartite, random_set_cover, from_set_cover, RandomParams};
use quasi_dst::{serialize_instance, validate, Rational};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let params = RandomParams::new(3, 4, Rational::new(1, 4), (1, 9));
    let first = serialize_instance(&random_quasi_bipartite(&params, 17)?);
    let again = serialize_instance(&random_quasi_bipartite(&params, 17)?);
    assert_eq!(first, again);

    let cover = from_set_cover(&random_set_cover(5, 4, 17)?)?;
    let mut out = String::new();
    writeln!(out, "random instance (seed 17):\n{first}")?;
    writeln!(out, "set cover reduction: {} nodes, {} arcs, valid: {}", cover.node_count(), cover.arc_count(), validate(&cover).ok())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
