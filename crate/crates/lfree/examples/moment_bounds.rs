//! Exact trace moments of convolution operators and the norm lower bounds
//! they certify.

use lfree::closedform::kesten_norm;
use lfree::moments::{
    kesten_laplacian, kesten_lower_bound, kesten_moment, parse_gauss_rational, Convolver,
};
use lfree::words::GroupPresentation;

fn main() {
    // Walk operator on the free group of rank 2. tau((L*L)^m) counts closed
    // walks on the 4-regular tree, and the 2m-th root climbs to the norm.
    let conv = kesten_laplacian(2);
    let target = kesten_norm(2).unwrap();
    println!("L = a + a^-1 + b + b^-1 on F_2, norm {target:.6}");
    println!("{:>3} {:>22} {:>12}", "m", "tau((L*L)^m)", "bound");
    for record in conv.moments_up_to(5, 1 << 20).unwrap() {
        println!(
            "{:>3} {:>22} {:>12.6}",
            record.m,
            record.value.display_string(),
            record.lower_bound
        );
    }
    // Word-by-word convolution grows with the ball in the group; the radial
    // walk recursion reaches the same counts in O(m^2) and keeps going.
    for m in [10u32, 20, 30] {
        println!(
            "{:>3} {:>22} {:>12.6}",
            m,
            kesten_moment(2, m).to_string(),
            kesten_lower_bound(2, m)
        );
    }

    // Weighted sums work the same way; coefficients are exact Gaussian
    // rationals, so the moments stay exact.
    let pres = GroupPresentation::parse("Z,Z").unwrap();
    let a = pres.generator(0).unwrap();
    let b = pres.generator(1).unwrap();
    let ab = pres.multiply(&a, &b);
    let conv = Convolver::new(
        pres,
        [
            (a, parse_gauss_rational("1/2").unwrap()),
            (b, parse_gauss_rational("i").unwrap()),
            (ab, parse_gauss_rational("1-1/3i").unwrap()),
        ],
    )
    .unwrap();
    println!("\nL = (1/2)a + ib + (1-i/3)ab");
    for record in conv.moments_up_to(6, 1 << 20).unwrap() {
        println!(
            "{:>3} {:>22} {:>12.6}",
            record.m,
            record.value.display_string(),
            record.lower_bound
        );
    }
}
