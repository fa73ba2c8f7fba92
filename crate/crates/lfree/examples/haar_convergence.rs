//! Norms of sums of independent Haar unitaries converge to 2 sqrt(n - 1) as
//! the dimension grows, and their trace-word defects shrink.

use lfree::closedform::leinert_norm;
use lfree::rmt::{lfree_defect, sample_haar_unitary, DefectOptions, DenseOperator, RngSpec};

fn main() {
    let n = 4;
    let target = leinert_norm(n).unwrap().value;
    println!("n = {n} independent Haar unitaries, target norm {target:.6}");
    println!("{:>5} {:>10} {:>10} {:>10}", "d", "|sum V_i|", "gap", "defect");

    let spec = RngSpec::new(2024, 0);
    for d in [50usize, 100, 200, 400] {
        let vs: Vec<DenseOperator> =
            (0..n).map(|i| sample_haar_unitary(d, &spec.substream(i as u64))).collect();
        let mut sum = DenseOperator::zeros(d);
        for v in &vs {
            sum = sum.add(v).unwrap();
        }
        let norm = sum.op_norm().unwrap();

        // Largest |tau(w)| over alternating words in the V_i and their
        // adjoints; zero in the free limit.
        let defect = lfree_defect(&vs, 4, &DefectOptions::default()).unwrap();
        println!(
            "{d:>5} {norm:>10.4} {:>10.4} {:>10.4}",
            (norm - target).abs(),
            defect.max_abs_trace
        );
    }
}
