//! Decides the Leinert property for a few word sets, once by graph folding
//! and once by bounded witness search.

use lfree::words::{
    leinert_bounded, leinert_exact, GroupPresentation, LeinertStatus, ReducedWord,
};

fn main() {
    let f2 = GroupPresentation::parse("Z,Z").unwrap();
    let a = f2.generator(0).unwrap();
    let b = f2.generator(1).unwrap();
    let a_inv = f2.inverse(&a);
    let b_inv = f2.inverse(&b);

    // Generators and their inverses form a Leinert set in a free group.
    let gens = vec![a.clone(), a_inv.clone(), b.clone(), b_inv.clone()];
    report("{a, a^-1, b, b^-1} in F_2", leinert_exact(&gens, &f2).unwrap());

    // Powers of one generator are as far from Leinert as it gets.
    let f1 = GroupPresentation::parse("Z").unwrap();
    let g = f1.generator(0).unwrap();
    let g2 = f1.multiply(&g, &g);
    let powers = vec![ReducedWord::identity(), g.clone(), g2];
    report("{e, a, a^2} in F_1", leinert_exact(&powers, &f1).unwrap());

    // The bounded search cannot certify a positive answer, only report that
    // no short witness exists.
    let mixed = vec![a.clone(), f2.multiply(&a, &b), f2.multiply(&b, &a)];
    report("{a, ab, ba} in F_2 (bounded)", leinert_bounded(&mixed, &f2, 6).unwrap());
    report("{a, ab, ba} in F_2 (exact)", leinert_exact(&mixed, &f2).unwrap());

    // Finite-order factors are out of reach of the folding route but the
    // search still finds witnesses: with a of order 3 the set {a, a^2}
    // produces a * (a^2)^-1 * a * (a^2)^-1 * a * (a^2)^-1 = (a^-1)^3 = e.
    let z3 = GroupPresentation::parse("C3").unwrap();
    let t = z3.generator(0).unwrap();
    let t2 = z3.multiply(&t, &t);
    report("{a, a^2} in Z/3 (bounded)", leinert_bounded(&[t, t2], &z3, 6).unwrap());
}

fn report(label: &str, verdict: lfree::words::LeinertVerdict) {
    print!("{label}: {:?}", verdict.status);
    if let Some(witness) = &verdict.witness {
        let rendered: Vec<String> = witness
            .iter()
            .map(|(i, j)| format!("(g{} g{}^-1)", i + 1, j + 1))
            .collect();
        print!(", witness {}", rendered.join(" "));
    }
    if verdict.status == LeinertStatus::Undecided {
        print!(" [{}]", verdict.note.as_deref().unwrap_or(""));
    }
    println!();
}
