//! Prints the closed-form norm values and the paving block-count bracketing.

use faer::c64;
use lfree::closedform::{
    coefficient_bound, kesten_norm, leinert_norm, paving_norm_bound, paving_size, qpq_norm,
    qvq_norm,
};

fn main() {
    println!("walk-operator norms 2 sqrt(2k - 1):");
    for k in 1..=5 {
        println!("  k = {k}: {:.6}", kesten_norm(k).unwrap());
    }

    println!("Leinert sum norms 2 sqrt(n - 1):");
    for n in 2..=6 {
        println!("  n = {n}: {:.6}", leinert_norm(n).unwrap().value);
    }

    // Weighted version; unit coefficient vectors give 2 sqrt(1 - 1/n).
    let alphas = [c64::new(0.6, 0.0), c64::new(0.0, 0.8)];
    println!(
        "coefficient bound for (0.6, 0.8i) over a pair: {:.6}",
        coefficient_bound(2, &alphas).unwrap()
    );

    println!("compression norms for free projections:");
    for den in 2..=6u32 {
        let tq = 1.0 / den as f64;
        println!(
            "  |qpq| at tau_p = 1/2, tau_q = 1/{den}: {:.6}   |qvq| at tau = 1/{den}: {:.6}",
            qpq_norm(0.5, tq).unwrap(),
            qvq_norm(tq).unwrap()
        );
    }

    println!("paving bounds 2 sqrt(n - 1) / n and the size bracketing:");
    for n in 2..=6 {
        println!("  n = {n}: bound {:.6}", paving_norm_bound(n).unwrap().bound);
    }
    for eps in [1.0, 0.5, 0.25, 0.1] {
        let s = paving_size(eps).unwrap();
        println!(
            "  target {eps}: n = {} blocks ({:.4} <= {eps} < {:.4})",
            s.n, s.sufficient, s.necessary
        );
    }
}
