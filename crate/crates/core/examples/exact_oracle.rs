// Exact optima on small instances: the terminal-subset DP against
// exhaustive search, alongside the approximation.

use std::fmt::Write;

use quasi_dst::generators::tiny_instance;
use quasi_dst::oracle::{brute_force_opt, exact_opt};
use quasi_dst::solve;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let mut out = String::new();
    writeln!(out, "seed  m  k  dp  brute  solver  lb")?;
    for seed in 0..8 {
        let inst = tiny_instance(seed, 16);
        let dp = exact_opt(&inst, 12)?;
        let bf = brute_force_opt(&inst, 16)?;
        let res = solve(&inst)?;
        writeln!(
            out,
            "{seed:>4} {:>2} {:>2} {:>3} {:>6} {:>7} {:>3}",
            inst.arc_count(),
            inst.terminals().len(),
            dp.opt_cost,
            bf.opt_cost,
            res.total_cost,
            res.dual_lower_bound
        )?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
