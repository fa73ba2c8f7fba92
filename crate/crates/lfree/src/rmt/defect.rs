//! How far a finite family sits from L-freeness, measured through traces of
//! alternating words.
//!
//! For operators `x_1..x_n` the admissible words are
//! `x_{i1} x_{j1}* x_{i2} x_{j2}* ...` and the starred-first mirror family,
//! with consecutive indices distinct. An L-free family makes every such
//! trace vanish; the defect reports the worst offender up to a length bound.

use faer::{c64, Mat};
use serde::Serialize;

use super::{DenseOperator, RmtError};

/// Tuning knobs for [`lfree_defect`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DefectOptions {
    /// Accept entrywise-equal operators. Off by default since a repeated
    /// element inflates the defect trivially; orbit checks opt in because
    /// orbits of commuting pairs legitimately collapse.
    pub allow_duplicates: bool,
}

/// An alternating word, recorded by its star pattern and index sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordPattern {
    /// Whether position 0 carries the adjoint; stars alternate from there.
    pub starred_first: bool,
    /// Operator index at each position; adjacent entries differ.
    pub indices: Vec<usize>,
}

/// Result of a defect scan.
#[derive(Debug, Clone, Serialize)]
pub struct LFreeDefect {
    /// Largest `|tau(word)|` over admissible words up to `max_length`.
    pub max_abs_trace: f64,
    /// A maximizer. The adjoint of any admissible word is an admissible word
    /// of the other family with the same `|tau|`, so the maximum is attained
    /// in both families at once and the reported pattern is decided by
    /// enumeration order and float rounding. `None` when no admissible word
    /// exists, i.e. for a single operator.
    pub worst_word: Option<WordPattern>,
    /// Even bound on inspected word lengths.
    pub max_length: usize,
}

/// All half-word products of one length and star phase, grown one
/// multiplication per branch from the previous level.
struct SegmentLevel {
    seqs: Vec<Vec<usize>>,
    mats: Vec<Mat<c64>>,
}

fn first_level(mats: &[Mat<c64>], adjs: &[Mat<c64>], first_starred: bool) -> SegmentLevel {
    let pool = if first_starred { adjs } else { mats };
    SegmentLevel {
        seqs: (0..pool.len()).map(|i| vec![i]).collect(),
        mats: pool.iter().cloned().collect(),
    }
}

fn extend_level(
    mats: &[Mat<c64>],
    adjs: &[Mat<c64>],
    first_starred: bool,
    prev: &SegmentLevel,
    position: usize,
) -> SegmentLevel {
    let starred = if position % 2 == 0 { first_starred } else { !first_starred };
    let pool = if starred { adjs } else { mats };
    let n = pool.len();
    let mut seqs = Vec::with_capacity(prev.seqs.len() * (n - 1));
    let mut out = Vec::with_capacity(prev.seqs.len() * (n - 1));
    for (seq, mat) in prev.seqs.iter().zip(&prev.mats) {
        let last = *seq.last().unwrap();
        for i in 0..n {
            if i == last {
                continue;
            }
            let mut extended = seq.clone();
            extended.push(i);
            seqs.push(extended);
            out.push(mat * &pool[i]);
        }
    }
    SegmentLevel { seqs, mats: out }
}

/// `tr(A B)` without forming the product.
fn trace_pair(a: &Mat<c64>, b: &Mat<c64>) -> c64 {
    let d = a.nrows();
    let mut sum = c64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            sum += a[(r, c)] * b[(c, r)];
        }
    }
    sum
}

/// Scans every admissible alternating word of even length up to `max_len`
/// and reports the largest trace modulus.
///
/// Words are evaluated by pairing cached half-word products, so the matrix
/// multiplication count grows with the number of half words rather than the
/// number of words. Enumeration order is deterministic and the first
/// maximizer wins ties, so results are reproducible across runs.
pub fn lfree_defect(
    ops: &[DenseOperator],
    max_len: usize,
    options: &DefectOptions,
) -> Result<LFreeDefect, RmtError> {
    if ops.is_empty() {
        return Err(RmtError::EmptySet);
    }
    let d = ops[0].dim();
    for op in ops {
        if op.dim() != d {
            return Err(RmtError::DimMismatch { a: d, b: op.dim() });
        }
    }
    if max_len < 2 || max_len % 2 != 0 {
        return Err(RmtError::BadMaxLen { max_len });
    }
    if !options.allow_duplicates {
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                if ops[i].exactly_equals(&ops[j]) {
                    return Err(RmtError::DuplicateElements { i, j });
                }
            }
        }
    }
    let n = ops.len();
    if n == 1 {
        // Adjacent indices must differ, so no word of length >= 2 exists.
        return Ok(LFreeDefect { max_abs_trace: 0.0, worst_word: None, max_length: max_len });
    }

    let mats: Vec<Mat<c64>> = ops.iter().map(|o| o.mat().clone()).collect();
    let adjs: Vec<Mat<c64>> = ops.iter().map(|o| o.mat().adjoint().to_owned()).collect();

    let mut best = 0.0f64;
    let mut best_word: Option<WordPattern> = None;
    let h_max = max_len / 2;
    let mut levels: Option<[SegmentLevel; 2]> = None;

    for h in 1..=h_max {
        let current = match levels.take() {
            None => [first_level(&mats, &adjs, false), first_level(&mats, &adjs, true)],
            Some([lo, hi]) => [
                extend_level(&mats, &adjs, false, &lo, h - 1),
                extend_level(&mats, &adjs, true, &hi, h - 1),
            ],
        };
        for first_starred in [false, true] {
            let prefix = &current[first_starred as usize];
            // Position h flips parity relative to position 0 when h is odd.
            let suffix_starred = first_starred ^ (h % 2 == 1);
            let suffix = &current[suffix_starred as usize];
            for (pseq, pmat) in prefix.seqs.iter().zip(&prefix.mats) {
                let boundary = *pseq.last().unwrap();
                for (sseq, smat) in suffix.seqs.iter().zip(&suffix.mats) {
                    if sseq[0] == boundary {
                        continue;
                    }
                    let value = trace_pair(pmat, smat).norm() / d as f64;
                    if value > best {
                        best = value;
                        best_word = Some(WordPattern {
                            starred_first: first_starred,
                            indices: pseq.iter().chain(sseq.iter()).copied().collect(),
                        });
                    }
                }
            }
        }
        levels = Some(current);
    }

    Ok(LFreeDefect { max_abs_trace: best, worst_word: best_word, max_length: max_len })
}
