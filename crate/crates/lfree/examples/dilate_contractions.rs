//! Dilates a tuple of random contractions to block unitaries and checks the
//! norm bound on their sum.

use faer::c64;
use lfree::constructions::{dilate, dilation_sum_bound_check};
use lfree::rmt::{sample_contraction, DenseOperator, RngSpec};

fn main() {
    let n = 3;
    let d = 40;
    let spec = RngSpec::new(7, 0);
    let xs: Vec<DenseOperator> =
        (0..n).map(|i| sample_contraction(d, &spec.substream(100 + i as u64))).collect();

    let dilation = dilate(&xs, &spec).unwrap();
    println!(
        "dilated {n} contractions of dimension {d} into unitaries of dimension {}",
        dilation.dilated_dim()
    );
    println!("unitarity residual {:.3e}", dilation.unitarity_residual());
    for i in 0..n {
        // The input sits bit for bit in the upper-left corner.
        assert!(dilation.corner(i).exactly_equals(dilation.input(i)));
        println!(
            "  U_{i}: corner recovered exactly, defect norms {:.4} / {:.4}",
            dilation.column_defect(i).op_norm().unwrap(),
            dilation.row_defect(i).op_norm().unwrap()
        );
    }

    // Sums of the dilated unitaries obey the Leinert-set bound, and weighted
    // sums obey the coefficient bound. The bounds are limit statements, so
    // give the small dimension some slack.
    let alphas = vec![c64::new(0.5, 0.0), c64::new(0.0, 0.5), c64::new(-0.5, 0.0)];
    let report = dilation_sum_bound_check(&dilation, &alphas, 0.25).unwrap();
    println!(
        "|sum U_i| = {:.4} <= {:.4} = 2 sqrt(n - 1): {}",
        report.sum_unitary_norm,
        report.sum_target.unwrap(),
        report.sum_within_target.unwrap()
    );
    println!(
        "|sum alpha_i U_i| = {:.4} <= {:.4} = coefficient bound: {}",
        report.weighted_unitary_norm,
        report.weighted_target.unwrap(),
        report.weighted_within_target.unwrap()
    );
    println!(
        "compressions never exceed the dilated sums: {}",
        report.compression_consistent
    );
}
