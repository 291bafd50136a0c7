// Parse an instance, solve it and read off the guarantee.
//
// ```text
// cargo run --example solve_instance
// ```

use std::fmt::Write;

use quasi_dst::{parse_instance, solve};

const INSTANCE: &str = "\
# a root, two terminals and a Steiner hub that serves both
Nodes 4
A 1 4 4
A 4 2 1
A 4 3 1
A 1 2 3
A 1 3 3
Root 1
T 2
T 3
";

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    let result = solve(&inst)?;
    let mut out = String::new();
    writeln!(out, "cost       {}", result.total_cost)?;
    writeln!(out, "lower bnd  {}", result.dual_lower_bound)?;
    writeln!(out, "guarantee  {}", result.harmonic_bound)?;
    for phase in &result.phases {
        writeln!(
            out,
            "phase: ell={} delta={} tight arc {} added {}",
            phase.ell(),
            phase.delta(),
            phase.outcome.tight_arc,
            &phase.cost_after - &phase.cost_before
        )?;
    }
    for a in &result.solution_arcs {
        let arc = inst.arc(*a);
        writeln!(out, "uses {} -> {} ({})", arc.tail, arc.head, arc.cost)?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
