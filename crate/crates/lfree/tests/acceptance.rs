//! Acceptance gate: the fixed criteria this crate is shipped against, with
//! seeds and tolerances pinned. Criteria 1 to 5 are exact or certified
//! statements; criteria 6 to 11 are finite-dimensional convergence checks
//! whose tolerances match the calibrated defaults. A failure here means the
//! released contract is broken, not that one random draw was unlucky.
//!
//! The whole gate runs in roughly eight minutes on one core.

use std::time::Instant;

use faer::c64;
use lfree::calibration::embedded_default;
use lfree::closedform::{paving_norm_bound, paving_size, qpq_norm};
use lfree::constructions::{
    build_paving, dilate, orbit_lfree_check, paving_norm, sharpness_experiment,
};
use lfree::moments::{
    kesten_laplacian, kesten_lower_bound, kesten_moment, parse_gauss_rational, Convolver,
    GaussRational, MomentValue, DEFAULT_SUPPORT_CAP,
};
use lfree::rmt::{
    lfree_defect, sample_contraction, sample_haar_unitary, sample_projection, DefectOptions,
    DenseOperator, RngSpec, Trace,
};
use lfree::words::{
    leinert_bounded, leinert_exact, verify_witness, GroupPresentation, LeinertStatus, ReducedWord,
    WordError,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Base seed for every sampled criterion; each test works in its own stream.
const SEED: u64 = 0x1f2e_3d4c;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

// --- An independent word oracle ---------------------------------------------
//
// Criterion 1 compares the convolution engine against a brute-force sum over
// all index tuples. The oracle keeps its own group elements: syllable lists
// `(factor, exponent)` with hand-rolled reduction, so a defect in the
// production word types cannot cancel out of the comparison. Factor orders
// are written next to each term table (0 marks an infinite-order factor).

type OWord = Vec<(usize, i64)>;

fn opush(word: &mut OWord, orders: &[u32], factor: usize, exp: i64) {
    let mut exp = exp;
    if let Some(&(f, e)) = word.last() {
        if f == factor {
            word.pop();
            exp += e;
        }
    }
    let reduced = match orders[factor] {
        0 => exp,
        k => exp.rem_euclid(k as i64),
    };
    if reduced != 0 {
        word.push((factor, reduced));
    }
}

fn omul(a: &OWord, b: &OWord, orders: &[u32]) -> OWord {
    let mut out = a.clone();
    for &(f, e) in b {
        opush(&mut out, orders, f, e);
    }
    out
}

fn oinv(a: &OWord, orders: &[u32]) -> OWord {
    let mut out = OWord::new();
    for &(f, e) in a.iter().rev() {
        opush(&mut out, orders, f, -e);
    }
    out
}

/// Geodesic letter count; a torsion syllable can be spelled through either
/// rotation direction, so it costs `min(e, k - e)` letters.
fn oletters(word: &OWord, orders: &[u32]) -> i64 {
    word.iter()
        .map(|&(f, e)| match orders[f] {
            0 => e.abs(),
            k => {
                let r = e.rem_euclid(k as i64);
                r.min(k as i64 - r)
            }
        })
        .sum()
}

fn oparse(text: &str, orders: &[u32]) -> OWord {
    let mut out = OWord::new();
    if text == "1" {
        return out;
    }
    for ch in text.chars() {
        let (idx, exp) = if ch.is_ascii_lowercase() {
            ((ch as u8 - b'a') as usize, 1)
        } else {
            ((ch.to_ascii_lowercase() as u8 - b'a') as usize, -1)
        };
        opush(&mut out, orders, idx, exp);
    }
    out
}

struct BruteTerm {
    forward: OWord,
    backward: OWord,
    coeff: GaussRational,
    conj: GaussRational,
}

/// Per-position bound on how many geodesic letters the remaining factors can
/// still cancel. A prefix longer than the remaining budget cannot fold back
/// to the identity, so skipping it drops only zero terms; the sum stays the
/// full brute-force sum.
fn remaining_budget(terms: &[BruteTerm], orders: &[u32], total: usize) -> Vec<i64> {
    let max_fwd = terms.iter().map(|t| oletters(&t.forward, orders)).max().unwrap();
    let max_bwd = terms.iter().map(|t| oletters(&t.backward, orders)).max().unwrap();
    let mut budget = vec![0i64; total + 1];
    for pos in (0..total).rev() {
        budget[pos] = budget[pos + 1] + if pos % 2 == 0 { max_bwd } else { max_fwd };
    }
    budget
}

#[allow(clippy::too_many_arguments)]
fn brute_walk(
    terms: &[BruteTerm],
    orders: &[u32],
    budget: &[i64],
    pos: usize,
    total: usize,
    prefix: &OWord,
    coeff: &GaussRational,
    acc: &mut GaussRational,
) {
    if pos == total {
        if prefix.is_empty() {
            *acc = acc.clone() + coeff.clone();
        }
        return;
    }
    if oletters(prefix, orders) > budget[pos] {
        return;
    }
    for t in terms {
        let (g, c) = if pos % 2 == 0 { (&t.backward, &t.conj) } else { (&t.forward, &t.coeff) };
        let next = omul(prefix, g, orders);
        let scaled = coeff.clone() * c.clone();
        brute_walk(terms, orders, budget, pos + 1, total, &next, &scaled, acc);
    }
}

/// `tau((L*L)^m)` as the full sum over `support^(2m)` index tuples: even
/// positions contribute an inverse element with a conjugated coefficient,
/// odd positions a forward element, and a tuple counts iff its product
/// reduces to the identity.
fn brute_moment(terms: &[BruteTerm], orders: &[u32], m: u32) -> GaussRational {
    let total = 2 * m as usize;
    let budget = remaining_budget(terms, orders, total);
    let mut acc = GaussRational::new(BigRational::zero(), BigRational::zero());
    let one = GaussRational::new(BigRational::from_integer(BigInt::from(1)), BigRational::zero());
    brute_walk(terms, orders, &budget, 0, total, &OWord::new(), &one, &mut acc);
    acc
}

fn count_walk(
    words: &[(OWord, OWord)],
    orders: &[u32],
    budget: &[i64],
    pos: usize,
    total: usize,
    prefix: &OWord,
    acc: &mut u64,
) {
    if pos == total {
        if prefix.is_empty() {
            *acc += 1;
        }
        return;
    }
    if oletters(prefix, orders) > budget[pos] {
        return;
    }
    for (forward, backward) in words {
        let g = if pos % 2 == 0 { backward } else { forward };
        let next = omul(prefix, g, orders);
        count_walk(words, orders, budget, pos + 1, total, &next, acc);
    }
}

/// The unit-coefficient specialization of [`brute_moment`]: the moment is
/// the number of identity-reducing tuples.
fn brute_count(terms: &[BruteTerm], orders: &[u32], m: u32) -> u64 {
    let total = 2 * m as usize;
    let budget = remaining_budget(terms, orders, total);
    let words: Vec<(OWord, OWord)> =
        terms.iter().map(|t| (t.forward.clone(), t.backward.clone())).collect();
    let mut acc = 0u64;
    count_walk(&words, orders, budget.as_slice(), 0, total, &OWord::new(), &mut acc);
    acc
}

/// Largest `m` with `support^(2m) <= 1e7`, the enumeration ceiling.
fn oracle_max_m(support: usize) -> u32 {
    let mut m = 0u32;
    while (support as u128).pow(2 * (m + 1)) <= 10_000_000 {
        m += 1;
    }
    m
}

#[test]
fn criterion_01_moment_engine_matches_brute_force() {
    let started = Instant::now();
    // (group spec, factor orders for the oracle, weighted terms)
    let cases: &[(&str, &[u32], &[(&str, &str)])] = &[
        ("Z", &[0], &[("a", "1"), ("A", "1")]),
        ("Z,Z", &[0, 0], &[("a", "1"), ("A", "1"), ("b", "1"), ("B", "1")]),
        ("Z,C3", &[0, 3], &[("a", "1"), ("A", "1"), ("b", "1"), ("B", "1")]),
        ("C5", &[5], &[("a", "1"), ("A", "1")]),
        ("Z,Z", &[0, 0], &[("1", "1"), ("a", "1/2"), ("B", "i"), ("ab", "1/3+1/3i")]),
        (
            "Z,C2",
            &[0, 2],
            &[("1", "1/2"), ("a", "1"), ("A", "-1"), ("b", "i"), ("ab", "1-i"), ("ba", "-1/3")],
        ),
    ];

    for &(spec, orders, table) in cases {
        let pres = GroupPresentation::parse(spec).unwrap();
        let lib_terms: Vec<(ReducedWord, GaussRational)> = table
            .iter()
            .map(|&(w, c)| {
                (pres.parse_word_token(w).unwrap(), parse_gauss_rational(c).unwrap())
            })
            .collect();
        let conv = Convolver::new(pres, lib_terms).unwrap();
        let support = conv.support_size();
        assert!(support <= 6);
        let max_m = oracle_max_m(support);

        let terms: Vec<BruteTerm> = table
            .iter()
            .map(|&(w, c)| {
                let forward = oparse(w, orders);
                let backward = oinv(&forward, orders);
                let coeff = parse_gauss_rational(c).unwrap();
                let conj = coeff.conj();
                BruteTerm { forward, backward, coeff, conj }
            })
            .collect();
        let unweighted = table.iter().all(|&(_, c)| c == "1");

        let records = conv.moments_up_to(max_m, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(records.len(), max_m as usize);
        for record in &records {
            let expected = if unweighted {
                BigRational::from_integer(BigInt::from(brute_count(&terms, orders, record.m)))
            } else {
                let value = brute_moment(&terms, orders, record.m);
                assert!(value.im.is_zero(), "{spec} m={} has complex moment", record.m);
                value.re
            };
            match &record.value {
                MomentValue::Exact(r) => assert_eq!(
                    r, &expected,
                    "{spec} support {support} m {} disagrees with enumeration",
                    record.m
                ),
                MomentValue::Approx(_) => panic!("exact convolver produced a float moment"),
            }
        }
    }
    assert!(started.elapsed().as_secs_f64() < 60.0, "oracle comparison exceeded 60 s");
}

#[test]
fn criterion_02_kesten_walk_moments_and_bound() {
    let started = Instant::now();
    assert_eq!(kesten_moment(2, 1), BigUint::from(4u32));
    assert_eq!(kesten_moment(2, 2), BigUint::from(28u32));

    // Same two numbers out of the generic engine, exercising the engine and
    // the radial recursion as separate routes.
    let records = kesten_laplacian(2).moments_up_to(2, DEFAULT_SUPPORT_CAP).unwrap();
    for (record, expected) in records.iter().zip([4u32, 28]) {
        match &record.value {
            MomentValue::Exact(r) => {
                assert_eq!(r, &BigRational::from_integer(BigInt::from(expected)));
            }
            MomentValue::Approx(_) => panic!("walk moments must be exact"),
        }
    }

    let target = 2.0 * 3.0_f64.sqrt();
    let bound = kesten_lower_bound(2, 30);
    assert!(
        bound >= 0.88 * target && bound <= target,
        "m=30 bound {bound} outside [0.88, 1.0] x {target}"
    );
    assert!(started.elapsed().as_secs_f64() < 120.0);
}

#[test]
fn criterion_03_leinert_checkers() {
    // Generators plus inverses form a Leinert set in every free rank up to 4.
    for k in 1..=4 {
        let pres = GroupPresentation::free(k);
        let mut words = Vec::new();
        for i in 0..k {
            let g = pres.generator(i).unwrap();
            words.push(pres.inverse(&g));
            words.push(g);
        }
        let verdict = leinert_exact(&words, &pres).unwrap();
        assert_eq!(verdict.status, LeinertStatus::Leinert, "rank {k}");
    }

    // {e, a, a^2} fails, and the reported witness must multiply out.
    let pres = GroupPresentation::free(1);
    let a = pres.generator(0).unwrap();
    let words = vec![ReducedWord::identity(), a.clone(), pres.multiply(&a, &a)];
    let verdict = leinert_exact(&words, &pres).unwrap();
    assert_eq!(verdict.status, LeinertStatus::NotLeinert);
    let witness = verdict.witness.expect("failing set carries a witness");
    assert!(verify_witness(&words, &pres, &witness));

    // Exact and bounded runs over 200 random subsets. Bounded search is
    // one-sided: a found witness is definite, silence is not. Agreement
    // therefore means no contradictions; completeness of the depth-6 search
    // is measured separately because a few sets have shortest witnesses
    // deeper than 6 pairs.
    let pres = GroupPresentation::parse("Z,Z").unwrap();
    let letters = ['a', 'A', 'b', 'B'];
    let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 3);
    let mut not_leinert = 0usize;
    let mut found_by_bounded = 0usize;
    let mut witness_too_deep = 0usize;
    for _ in 0..200 {
        let size = rng.gen_range(3..=5usize);
        let mut words: Vec<ReducedWord> = Vec::new();
        while words.len() < size {
            let len = rng.gen_range(1..=4usize);
            let text: String = (0..len).map(|_| letters[rng.gen_range(0..4)]).collect();
            let word = pres.parse_word(&text).unwrap();
            let reduced_len = pres.geodesic_len(&word);
            if reduced_len == 0 || reduced_len > 4 || words.contains(&word) {
                continue;
            }
            words.push(word);
        }
        let bounded = leinert_bounded(&words, &pres, 6).unwrap();
        match leinert_exact(&words, &pres) {
            Ok(exact) => match exact.status {
                LeinertStatus::Leinert => {
                    assert_eq!(bounded.status, LeinertStatus::Undecided);
                }
                LeinertStatus::NotLeinert => {
                    not_leinert += 1;
                    assert!(verify_witness(&words, &pres, &exact.witness.clone().unwrap()));
                    match bounded.status {
                        LeinertStatus::NotLeinert => {
                            found_by_bounded += 1;
                            assert!(verify_witness(
                                &words,
                                &pres,
                                &bounded.witness.clone().unwrap()
                            ));
                        }
                        LeinertStatus::Undecided => {}
                        LeinertStatus::Leinert => panic!("bounded search cannot certify"),
                    }
                }
                LeinertStatus::Undecided => panic!("exact mode must decide"),
            },
            // Folding decided the set fails, but its shortest certificate
            // does not fit under the extraction cap and the checker refuses
            // to assert the verdict without one. The depth-6 search must
            // then be silent too, and such sets have to stay rare.
            Err(WordError::WitnessSearchExhausted { .. }) => {
                witness_too_deep += 1;
                assert_eq!(bounded.status, LeinertStatus::Undecided);
            }
            Err(other) => panic!("exact checker failed: {other}"),
        }
    }
    assert!(not_leinert >= 80, "corpus produced only {not_leinert} failing sets");
    assert!(witness_too_deep <= 10, "{witness_too_deep}/200 sets outran witness extraction");
    // 91 of 103 on this corpus; the misses are sets whose shortest witness
    // needs more than 6 pairs, so the floor guards the search, not the
    // corpus mix.
    let completeness = found_by_bounded as f64 / not_leinert as f64;
    assert!(
        completeness >= 0.85,
        "depth-6 search found only {found_by_bounded}/{not_leinert} witnesses"
    );
}

#[test]
fn criterion_04_closed_form_identities() {
    for n in 2..=10usize {
        let expected = 0.5 + ((n - 1) as f64).sqrt() / n as f64;
        let got = qpq_norm(0.5, 1.0 / n as f64).unwrap();
        assert!((got - expected).abs() <= 1e-12, "qpq_norm(1/2, 1/{n})");
    }
    for k in 1..=1000u32 {
        let eps = k as f64 / 500.0;
        let size = paving_size(eps).unwrap();
        assert!(size.sufficient <= eps, "eps {eps}: 2/sqrt(n) > eps");
        assert!(eps < size.necessary, "eps {eps}: eps >= 2/sqrt(n-1)");
        assert!((size.n as f64) < 4.0 / (eps * eps) + 1.0, "eps {eps}: n too large");
    }
}

#[test]
fn criterion_05_dilation_structure_and_averaging_identity() {
    let started = Instant::now();
    let base = RngSpec::new(SEED, 5000);
    let dims = [2usize, 3, 5, 7, 11, 16, 23, 31, 40, 52, 64, 77, 89, 100];
    for t in 0..50u64 {
        let spec = base.substream(t);
        let n = 1 + (t as usize) % 4;
        let d = dims[(t as usize) % dims.len()];
        let xs: Vec<DenseOperator> =
            (0..n).map(|i| sample_contraction(d, &spec.substream(i as u64))).collect();
        let dil = dilate(&xs, &spec.substream(8)).unwrap();
        assert!(dil.unitarity_residual() < 1e-8, "trial {t}: residual too large");
        for i in 0..n {
            assert!(dil.corner(i).exactly_equals(dil.input(i)), "trial {t}: corner not exact");
            // A sampled contraction is only rescaled when rounding pushed its
            // norm a hair over 1, so the corner stays within float noise of
            // the raw input.
            assert!(dil.corner(i).sub(&xs[i]).unwrap().max_abs() < 1e-12);
        }

        // sum_j p_j x p_j = (1/n) sum_i u^(i-1) x u^(1-i), assembled from the
        // instance's parts rather than taken from paving_norms.
        let np = 2 + (t as usize) % 3;
        let dp = np * (2 + (t as usize * 5) % 24);
        let x = sample_contraction(dp, &spec.substream(9));
        let inst = build_paving(np, &x, &spec.substream(10)).unwrap();
        let mut compressed = DenseOperator::zeros(dp);
        for p in inst.projections() {
            compressed = compressed.add(&p.mul(&x).unwrap().mul(p).unwrap()).unwrap();
        }
        let mut averaged = DenseOperator::zeros(dp);
        let mut power = DenseOperator::identity(dp);
        for i in 0..np {
            if i > 0 {
                power = power.mul(inst.u()).unwrap();
            }
            averaged =
                averaged.add(&power.mul(&x).unwrap().mul(&power.adjoint()).unwrap()).unwrap();
        }
        let gap = compressed
            .sub(&averaged.scale(c64::new(1.0 / np as f64, 0.0)))
            .unwrap()
            .max_abs();
        assert!(gap <= 1e-8, "trial {t}: averaging identity off by {gap}");
    }
    assert!(started.elapsed().as_secs_f64() < 120.0);
}

#[test]
fn criterion_06_unitary_plus_adjoint_sum_norm() {
    // Tolerance comes from the shipped calibration fixture; the pin keeps a
    // fixture edit from silently loosening this gate.
    let band = embedded_default().unitary_sum;
    assert_eq!((band.tolerance, band.min_pass_fraction), (0.25, 0.9), "shipped band moved");
    let base = RngSpec::new(SEED, 6000);
    let target = 2.0 * 3.0_f64.sqrt();
    let mut passes = 0;
    for t in 0..20u64 {
        let spec = base.substream(t);
        let u1 = sample_haar_unitary(500, &spec.substream(0));
        let u2 = sample_haar_unitary(500, &spec.substream(1));
        let sum = u1.add(&u1.adjoint()).unwrap().add(&u2).unwrap().add(&u2.adjoint()).unwrap();
        let norm = sum.op_norm().unwrap();
        if (norm - target).abs() <= band.tolerance {
            passes += 1;
        }
    }
    assert!(passes >= 18, "only {passes}/20 trials within 0.25 of 2 sqrt(3)");
}

#[test]
fn criterion_07_haar_sum_norm() {
    // Same >= 90% pass-rate convention as the neighboring sampled criteria.
    let band = embedded_default().unitary_sum;
    assert_eq!((band.tolerance, band.min_pass_fraction), (0.25, 0.9), "shipped band moved");
    let base = RngSpec::new(SEED, 7000);
    let target = 2.0 * 3.0_f64.sqrt();
    let mut passes = 0;
    for t in 0..20u64 {
        let spec = base.substream(t);
        let mut sum = DenseOperator::zeros(400);
        for i in 0..4 {
            sum = sum.add(&sample_haar_unitary(400, &spec.substream(i))).unwrap();
        }
        let norm = sum.op_norm().unwrap();
        if (norm - target).abs() <= band.tolerance {
            passes += 1;
        }
    }
    assert!(passes >= 18, "only {passes}/20 trials within 0.25 of 2 sqrt(3)");
}

#[test]
fn criterion_08_compressed_projection_norm() {
    let band = embedded_default().qpq;
    assert_eq!((band.tolerance, band.min_pass_fraction), (0.05, 0.9), "shipped band moved");
    let base = RngSpec::new(SEED, 8000);
    let target = qpq_norm(0.5, 1.0 / 3.0).unwrap();
    let mut passes = 0;
    for t in 0..20u64 {
        let spec = base.substream(t);
        let p = sample_projection(Trace::new(1, 2), 600, &spec.substream(0)).unwrap();
        let q = sample_projection(Trace::new(1, 3), 600, &spec.substream(1)).unwrap();
        let norm = q.mul(&p).unwrap().mul(&q).unwrap().op_norm().unwrap();
        if (norm - target).abs() <= band.tolerance {
            passes += 1;
        }
    }
    assert!(passes >= 18, "only {passes}/20 trials within 0.05 of {target}");
}

#[test]
fn criterion_09_simultaneous_paving_meets_bound() {
    let band = embedded_default().paving;
    assert_eq!((band.tolerance, band.min_pass_fraction), (0.1, 0.9), "shipped band moved");
    for n in [3usize, 4, 5, 6] {
        let base = RngSpec::new(SEED, 9000 + n as u64);
        let bound = paving_norm_bound(n).unwrap().bound;
        let mut passes = 0;
        for t in 0..20u64 {
            let spec = base.substream(t);
            let targets: Vec<DenseOperator> =
                (0..5).map(|j| sample_contraction(420, &spec.substream(j))).collect();
            let instance = build_paving(n, &targets[0], &spec.substream(9)).unwrap();
            let mut worst: f64 = 0.0;
            for x in &targets {
                let norm = paving_norm(&instance.retarget(x).unwrap()).unwrap();
                worst = worst.max(norm);
            }
            if worst <= bound + band.tolerance {
                passes += 1;
            }
        }
        assert!(passes >= 18, "n={n}: only {passes}/20 trials under 2 sqrt(n-1)/n + 0.1");
    }
}

#[test]
fn criterion_10_equal_traces_are_sharp() {
    // The block-count clause has no pinned trial count; the median of five
    // seeded runs stands in for the d = 600 value.
    let band = embedded_default().sharpness;
    assert_eq!((band.equal_tolerance, band.unequal_margin), (0.05, 0.03), "shipped band moved");
    let base = RngSpec::new(SEED, 10_000);
    let bound = 2.0 * 2.0_f64.sqrt() / 3.0;
    let equal = [Trace::new(1, 3); 3];
    let unequal = [Trace::new(1, 2), Trace::new(1, 4), Trace::new(1, 4)];

    let mut equal_norms = Vec::new();
    let mut unequal_norms = Vec::new();
    for t in 0..5u64 {
        let spec = base.substream(t);
        equal_norms
            .push(sharpness_experiment(3, &equal, 600, &spec.substream(0)).unwrap().paving_norm);
        unequal_norms.push(
            sharpness_experiment(3, &unequal, 600, &spec.substream(1)).unwrap().paving_norm,
        );
    }
    let equal_med = median(&mut equal_norms);
    let unequal_med = median(&mut unequal_norms);
    assert!(
        (equal_med - bound).abs() <= band.equal_tolerance,
        "equal traces: median {equal_med} vs 2 sqrt(2)/3 = {bound}"
    );
    assert!(
        unequal_med >= bound + band.unequal_margin,
        "unequal traces: median {unequal_med} not above {bound} + 0.03"
    );
}

#[test]
fn criterion_11_defects_shrink_as_dimension_doubles() {
    let base = RngSpec::new(SEED, 11_000);
    let mut dilation_medians = Vec::new();
    let mut orbit_medians = Vec::new();
    for (slot, d) in [150usize, 300, 600].into_iter().enumerate() {
        let mut dilation_defects = Vec::new();
        let mut orbit_defects = Vec::new();
        for t in 0..20u64 {
            let spec = base.substream(slot as u64 * 100 + t);
            // One joint dilation: the Haar filler blocks that make the
            // family mix live on the off-core diagonal, so separate
            // single-contraction dilations would share none and their
            // cross words keep an O(1) trace from the defect operators.
            let xs = [
                sample_contraction(d, &spec.substream(0)),
                sample_contraction(d, &spec.substream(1)),
            ];
            let dilation = dilate(&xs, &spec.substream(2)).unwrap();
            let defect = lfree_defect(dilation.unitaries(), 4, &DefectOptions::default()).unwrap();
            dilation_defects.push(defect.max_abs_trace);

            let x = sample_contraction(d, &spec.substream(4));
            let instance = build_paving(3, &x, &spec.substream(5)).unwrap();
            orbit_defects.push(orbit_lfree_check(&instance, 4).unwrap().max_abs_trace);
        }
        dilation_medians.push(median(&mut dilation_defects));
        orbit_medians.push(median(&mut orbit_defects));
    }
    eprintln!("dilation medians {dilation_medians:?} orbit medians {orbit_medians:?}");
    assert!(
        dilation_medians[0] > dilation_medians[1] && dilation_medians[1] > dilation_medians[2],
        "dilation defect medians not strictly decreasing: {dilation_medians:?}"
    );
    assert!(
        orbit_medians[0] > orbit_medians[1] && orbit_medians[1] > orbit_medians[2],
        "orbit defect medians not strictly decreasing: {orbit_medians:?}"
    );
}
