// Set cover as a two-layer Steiner instance.
//
// Builds the `greedy_hard` family, reduces it and compares the solver,
// the exact optimum and a direct set-cover search.

use std::fmt::Write;

use quasi_dst::generators::{from_set_cover, greedy_hard};
use quasi_dst::oracle::exact_opt;
use quasi_dst::{harmonic, solve};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let mut out = String::new();
    writeln!(out, "{:>3} {:>8} {:>8} {:>8} {:>8}", "n", "cover", "dst opt", "solver", "2 H_n")?;
    for n in 2..=8 {
        let system = greedy_hard(n)?;
        let (cover_opt, _) = system.brute_force_opt()?;
        let inst = from_set_cover(&system)?;
        let opt = exact_opt(&inst, 12)?.opt_cost;
        assert_eq!(opt, cover_opt);
        let got = solve(&inst)?.total_cost;
        writeln!(out, "{n:>3} {cover_opt:>8} {opt:>8} {got:>8} {:>8}", &harmonic(n) * 2)?;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
