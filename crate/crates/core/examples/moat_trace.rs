// One phase of dual growth, step by step: moats, entry times, arc loads
// and the augmentation that follows.

use std::fmt::Write;

use quasi_dst::augment::{build_augmented_tree, build_plan};
use quasi_dst::moat::{edge_dual_load, run_phase, PhaseOptions};
use quasi_dst::partial_tree::{init_partial_tree, tree_cost, zero_cost_closure};
use quasi_dst::parse_instance;

const INSTANCE: &str = "\
Nodes 6
A 1 2 3
A 1 3 1
A 1 4 1
A 2 5 0
A 2 6 0
A 3 5 0
A 4 6 0
Root 1
T 5
T 6
";

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    let mut tree = init_partial_tree(&inst);
    let mut out = String::new();
    let mut phase = 1;
    while {
        tree = zero_cost_closure(&inst, &tree);
        tree.ell() > 0
    } {
        let outcome = run_phase(&inst, &tree, PhaseOptions { checked: true })?;
        writeln!(out, "phase {phase}: {} moats, stop at {}", outcome.ell, outcome.stop_time)?;
        for moat in &outcome.state.moats {
            let members: Vec<String> = moat.entry.iter().map(|(v, e)| format!("{v}@{e}")).collect();
            writeln!(out, "  moat of {}: {}", moat.head, members.join(" "))?;
        }
        for a in inst.arc_ids() {
            let load = edge_dual_load(&inst, &outcome, a);
            if load.is_positive() {
                writeln!(out, "  arc {a} carries {load} of {}", inst.cost(a))?;
            }
        }
        let plan = build_plan(&inst, &tree, &outcome)?;
        writeln!(
            out,
            "  tight arc {}, body {}, absorbs {:?}",
            plan.tight_arc, plan.body_index, outcome.absorbing_set
        )?;
        tree = build_augmented_tree(&inst, &tree, &plan, &outcome)?;
        writeln!(out, "  tree cost now {}", tree_cost(&inst, &tree))?;
        phase += 1;
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
