//! Operator-norm computations around Leinert sets: exact word-level norm
//! bounds, unitary dilation of contraction tuples, and random-matrix paving
//! experiments.
//!
//! The library splits into:
//!
//! * [`words`]: reduced words in free products of cyclic groups and two
//!   Leinert-set checkers (exact graph folding, bounded witness search);
//! * [`moments`]: exact trace moments of convolution operators and the
//!   operator-norm lower bounds they certify;
//! * [`closedform`]: the known closed-form norm values these computations
//!   converge to;
//! * [`rmt`]: dense complex matrices, seeded Haar-distributed samples, and
//!   trace-condition defects measuring how close a tuple is to the
//!   free-model covariance structure;
//! * [`constructions`]: the block unitary dilation of contraction tuples and
//!   projective pavings of a contraction, with their norm experiments;
//! * [`report`] and [`calibration`]: reproducible experiment records and the
//!   pinned statistical thresholds they are judged against;
//! * [`cli`]: the command layer behind the `lfree` binary.
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --example leinert_check
//! cargo run --example moment_bounds
//! cargo run --example closed_forms
//! cargo run --example haar_convergence
//! cargo run --example dilate_contractions
//! cargo run --example pave_contraction
//! cargo run --example paving_sharpness
//! ```

pub mod calibration;
pub mod cli;
pub mod closedform;
pub mod constructions;
pub mod moments;
pub mod report;
pub mod rmt;
pub mod words;
