//! Paves a random contraction by Haar-positioned projections and compares
//! the compression norm with 2 sqrt(n - 1) / n.

use lfree::closedform::paving_norm_bound;
use lfree::constructions::{build_paving, orbit_lfree_check, paving_norms};
use lfree::rmt::{sample_contraction, RngSpec};

fn main() {
    let n = 4;
    let d = 200;
    let bound = paving_norm_bound(n).unwrap().bound;
    let spec = RngSpec::new(11, 0);

    let x = sample_contraction(d, &spec.substream(10));
    let instance = build_paving(n, &x, &spec.substream(0)).unwrap();
    println!("paving a contraction of dimension {d} into {n} blocks");
    println!("free-position bound 2 sqrt(n - 1) / n = {bound:.6}");

    // The compressed sum and its rotation-averaged form are the same
    // operator written two ways; both norms are computed as a cross-check.
    let norms = paving_norms(&instance).unwrap();
    println!(
        "|sum p_j x p_j| = {:.6} (averaged route {:.6})",
        norms.compressed, norms.averaged
    );

    // How close the conjugation orbit is to free position: the largest
    // alternating trace word over the orbit of x under the block rotation.
    let defect = orbit_lfree_check(&instance, 4).unwrap();
    println!("orbit defect {:.4} over words up to length 4", defect.max_abs_trace);

    // Fresh targets under the same projections.
    for t in 1..=3u64 {
        let y = sample_contraction(d, &spec.substream(10 + t));
        let retargeted = instance.retarget(&y).unwrap();
        let norm = paving_norms(&retargeted).unwrap().compressed;
        println!("  target {t}: paving norm {norm:.6} (gap {:+.4})", norm - bound);
    }
}
