//! Equal traces are forced for optimal paving: any unequal split leaves one
//! block whose compression norm already exceeds 2 sqrt(n - 1) / n.

use lfree::constructions::sharpness_experiment;
use lfree::rmt::{RngSpec, Trace};

fn main() {
    let n = 3;
    let d = 300;
    let spec = RngSpec::new(5, 0);

    let equal = vec![Trace::new(1, 3); 3];
    let unequal = vec![Trace::new(1, 2), Trace::new(1, 4), Trace::new(1, 4)];

    for traces in [equal, unequal] {
        let outcome = sharpness_experiment(n, &traces, d, &spec).unwrap();
        println!(
            "traces {:?}: paving norm {:.4} vs equal-trace bound {:.4}",
            traces.iter().map(|t| format!("{t}")).collect::<Vec<_>>(),
            outcome.paving_norm,
            outcome.equal_trace_bound
        );
        for block in &outcome.blocks {
            // 2 sqrt(tau (1 - tau)) is the free-model norm of one block.
            println!(
                "  block trace {}: |p v p| = {:.4}, free value {:.4}",
                block.trace, block.norm, block.predicted
            );
        }
    }
}
