// Export a dual certificate, read it back and check it without the solver.
// A small perturbation is then caught by the verifier.

use std::fmt::Write;

use quasi_dst::certificate::{verify_certificate, DualCertificate};
use quasi_dst::generators::desk_instance;
use quasi_dst::{solve, Rational};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let inst = desk_instance(3);
    let json = solve(&inst)?.certificate.to_json();

    let cert = DualCertificate::from_json(&json)?;
    let report = verify_certificate(&inst, &cert);
    let mut out = String::new();
    write!(out, "{report}")?;
    writeln!(out, "lower bound {} / claimed {} / bound {}", report.lower_bound, cert.claimed_cost, report.bound)?;

    let mut forged = cert.clone();
    forged.phases[0].delta = &forged.phases[0].delta + &Rational::new(1, 1000);
    let report = verify_certificate(&inst, &forged);
    writeln!(out, "after nudging the first delta: failed checks {:?}", report.failed())?;
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
