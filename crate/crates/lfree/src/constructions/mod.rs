//! Operator constructions: unitary dilation of contraction families,
//! projection pavings driven by a root-of-unity unitary, and the sharpness
//! experiment for unequal block traces.

use faer::{c64, Mat};
use thiserror::Error;

use crate::closedform::{self, ClosedFormError};
use crate::rmt::{
    lfree_defect, projection_from_columns, sample_haar_unitary, sample_symmetry, DefectOptions,
    DenseOperator, LFreeDefect, RmtError, RngSpec, Trace,
};

/// `max_abs` tolerance under which inputs count as self-adjoint.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;
/// Eigenvalues below this are a positivity violation, not rounding.
pub const PSD_EIGEN_TOL: f64 = -1e-6;
/// Operator norms may exceed 1 by at most this before rejection.
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Frobenius residual allowed on constructed unitaries, per unit of base
/// dimension. Inputs with singular values at 1 make the defect square roots
/// noisy at sqrt(machine epsilon) scale and the noise grows with dimension
/// (measured about `2e-9 * d^0.8` for Haar unitary inputs); construction
/// bugs sit many orders above `d` times this.
pub const UNITARITY_TOL: f64 = 1e-8;
/// `max_abs` residual allowed on a projection partition of the identity.
pub const PARTITION_TOL: f64 = 1e-12;
/// Compressing and averaging compute the same operator; disagreement past
/// this tolerance means a broken construction.
pub const AVERAGING_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("input operator list is empty")]
    EmptyInput,
    #[error(transparent)]
    Rmt(#[from] RmtError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("operator {index} has norm {norm}, beyond the contraction tolerance")]
    NotContraction { index: usize, norm: f64 },
    #[error("matrix is not self-adjoint: residual {residual}")]
    NotSelfAdjoint { residual: f64 },
    #[error("matrix has eigenvalue {min}, below the positivity tolerance")]
    NotPositive { min: f64 },
    #[error("dilation unitary {index} failed its unitarity check: residual {residual}")]
    UnitarityFailure { index: usize, residual: f64 },
    #[error("paving needs at least 2 blocks, got {n}")]
    BlockCountTooSmall { n: usize },
    #[error("dimension {d} does not split into {n} equal blocks")]
    NotDivisible { d: usize, n: usize },
    #[error("projections do not sum to the identity: residual {residual}")]
    PartitionBroken { residual: f64 },
    #[error("compressed and averaged norms disagree: {compressed} vs {averaged}")]
    AveragingIdentityBroken { compressed: f64, averaged: f64 },
    #[error("need exactly {n} traces, got {got}")]
    TraceCountMismatch { n: usize, got: usize },
    #[error("block traces must sum to 1, got {got}")]
    TraceSumNotOne { got: String },
    #[error("trace {index} = {trace} lies outside (0, 1/2]")]
    TraceOutOfRange { index: usize, trace: String },
    #[error("need exactly {n} coefficients, got {got}")]
    CoefficientCountMismatch { n: usize, got: usize },
}

/// Square root of a positive semidefinite matrix by spectral decomposition.
/// Rejects inputs that are not self-adjoint or have eigenvalues below
/// [`PSD_EIGEN_TOL`]; smaller negative eigenvalues are rounding noise and
/// get clipped to zero.
pub fn psd_sqrt(x: &DenseOperator) -> Result<DenseOperator, ConstructionError> {
    let residual = x.self_adjointness_residual();
    if residual > SELF_ADJOINT_TOL {
        return Err(ConstructionError::NotSelfAdjoint { residual });
    }
    let (values, basis) = x.self_adjoint_eigen()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < PSD_EIGEN_TOL {
        return Err(ConstructionError::NotPositive { min });
    }
    let d = x.dim();
    let roots: Vec<c64> = values.iter().map(|&v| c64::new(v.max(0.0).sqrt(), 0.0)).collect();
    let scaled = Mat::from_fn(d, d, |i, j| basis[(i, j)] * roots[j]);
    Ok(DenseOperator::from_mat(scaled * basis.adjoint()))
}

/// Unitaries dilating a family of contractions, block by block.
#[derive(Debug, Clone)]
pub struct DilationResult {
    n: usize,
    base_dim: usize,
    unitaries: Vec<DenseOperator>,
    corners: Vec<DenseOperator>,
    column_defects: Vec<DenseOperator>,
    row_defects: Vec<DenseOperator>,
    unitarity_residual: f64,
}

impl DilationResult {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn dilated_dim(&self) -> usize {
        (self.n + 1) * self.base_dim
    }

    pub fn unitaries(&self) -> &[DenseOperator] {
        &self.unitaries
    }

    /// Worst Frobenius distance of any `U_i` from unitarity.
    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    /// The contraction that was dilated into slot `i`, after any rescale.
    pub fn input(&self, i: usize) -> &DenseOperator {
        &self.corners[i]
    }

    /// Defect operator `(1 - x x*)^(1/2)` stored in the top block row.
    pub fn column_defect(&self, i: usize) -> &DenseOperator {
        &self.column_defects[i]
    }

    /// Defect operator `-(1 - x* x)^(1/2)` stored in the left block column.
    pub fn row_defect(&self, i: usize) -> &DenseOperator {
        &self.row_defects[i]
    }

    /// Block `(bi, bj)` of `U_i`, each block `base_dim` square.
    pub fn block(&self, i: usize, bi: usize, bj: usize) -> DenseOperator {
        let d = self.base_dim;
        let mat = self.unitaries[i].mat();
        DenseOperator::from_fn(d, |r, c| mat[(bi * d + r, bj * d + c)])
    }

    /// The `(0, 0)` corner of `U_i`, which recovers the input contraction
    /// exactly (bitwise, since assembly copies entries).
    pub fn corner(&self, i: usize) -> DenseOperator {
        self.block(i, 0, 0)
    }
}

/// Dilates contractions `x_1..x_n` on a `d`-dimensional space to unitaries
/// on `(n+1) d` dimensions with `x_i` sitting in the top-left corner of
/// `U_i`. Off-corner diagonal blocks are filled with independent Haar
/// unitaries so the family mixes like a free one.
///
/// Norms up to `1 + 1e-10` are accepted and rescaled to exact contractions;
/// anything larger is rejected.
pub fn dilate(xs: &[DenseOperator], spec: &RngSpec) -> Result<DilationResult, ConstructionError> {
    let n = xs.len();
    if n == 0 {
        return Err(ConstructionError::EmptyInput);
    }
    let d = xs[0].dim();
    for x in xs {
        if x.dim() != d {
            return Err(RmtError::DimMismatch { a: d, b: x.dim() }.into());
        }
    }

    let mut corners = Vec::with_capacity(n);
    for (index, x) in xs.iter().enumerate() {
        let norm = x.op_norm()?;
        if norm > 1.0 + CONTRACTION_TOL {
            return Err(ConstructionError::NotContraction { index, norm });
        }
        corners.push(if norm > 1.0 { x.scale(c64::new(1.0 / norm, 0.0)) } else { x.clone() });
    }

    let identity = DenseOperator::identity(d);
    let mut column_defects = Vec::with_capacity(n);
    let mut row_defects = Vec::with_capacity(n);
    for x in &corners {
        let gram_right = x.mul(&x.adjoint()).expect("same dimension");
        let gram_left = x.adjoint().mul(x).expect("same dimension");
        column_defects.push(psd_sqrt(&identity.sub(&gram_right)?)?);
        row_defects.push(psd_sqrt(&identity.sub(&gram_left)?)?.scale(c64::new(-1.0, 0.0)));
    }

    let dilated = (n + 1) * d;
    let mut unitaries = Vec::with_capacity(n);
    let mut worst_residual = 0.0f64;
    for i in 0..n {
        let mut mat = Mat::<c64>::zeros(dilated, dilated);
        let offset = (i + 1) * d;
        let x = corners[i].mat();
        let xadj = corners[i].adjoint();
        let c = column_defects[i].mat();
        let dneg = row_defects[i].mat();
        for r in 0..d {
            for s in 0..d {
                mat[(r, s)] = x[(r, s)];
                mat[(offset + r, offset + s)] = xadj.mat()[(r, s)];
                mat[(r, offset + s)] = c[(r, s)];
                mat[(offset + r, s)] = dneg[(r, s)];
            }
        }
        let mut fillers = Vec::new();
        for j in 0..n {
            if j == i {
                continue;
            }
            let filler = sample_haar_unitary(d, &spec.substream((i * n + j) as u64));
            let block = (j + 1) * d;
            for r in 0..d {
                for s in 0..d {
                    mat[(block + r, block + s)] = filler.mat()[(r, s)];
                }
            }
            fillers.push(filler);
        }

        // U_i is permutation-similar to core (+) diag(fillers) with
        // core = [[x, c], [dneg, x*]], so its unitarity residual splits
        // exactly into per-summand Frobenius residuals.
        let core = Mat::<c64>::from_fn(2 * d, 2 * d, |r, s| {
            let a = if r < d { if s < d { x } else { c } } else if s < d { dneg } else { xadj.mat() };
            a[(r % d, s % d)]
        });
        let mut residual_sq = unitary_residual_sq(&core);
        for filler in &fillers {
            residual_sq += unitary_residual_sq(filler.mat());
        }
        let residual = residual_sq.sqrt();
        if residual > UNITARITY_TOL * d as f64 {
            return Err(ConstructionError::UnitarityFailure { index: i, residual });
        }
        worst_residual = worst_residual.max(residual);
        unitaries.push(DenseOperator::from_mat(mat));
    }

    Ok(DilationResult {
        n,
        base_dim: d,
        unitaries,
        corners,
        column_defects,
        row_defects,
        unitarity_residual: worst_residual,
    })
}

/// `||A A* - I||_F^2 + ||A* A - I||_F^2`.
fn unitary_residual_sq(a: &Mat<c64>) -> f64 {
    let d = a.nrows();
    let eye = Mat::<c64>::from_fn(d, d, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let right = a * a.adjoint() - &eye;
    let left = a.adjoint() * a - &eye;
    let r = right.norm_l2();
    let l = left.norm_l2();
    r * r + l * l
}

/// Norm comparisons for sums over a dilation: the corner contractions
/// against their dilating unitaries, plain and coefficient-weighted.
#[derive(Debug, Clone)]
pub struct DilationBoundReport {
    pub n: usize,
    pub sum_corner_norm: f64,
    pub sum_unitary_norm: f64,
    /// `2 sqrt(n - 1)`; `None` when `n = 1` leaves the bound vacuous.
    pub sum_target: Option<f64>,
    pub weighted_corner_norm: f64,
    pub weighted_unitary_norm: f64,
    /// `2 sqrt(1 - 1/n) (sum |alpha|^2)^(1/2)`; `None` when `n = 1`.
    pub weighted_target: Option<f64>,
    /// Corners are compressions of the unitaries, so corner sums can never
    /// exceed unitary sums beyond rounding.
    pub compression_consistent: bool,
    pub sum_within_target: Option<bool>,
    pub weighted_within_target: Option<bool>,
    pub pass: bool,
}

/// Checks the sum-norm bounds on a dilation at tolerance `tol`: unitary sums
/// against `2 sqrt(n - 1)`, weighted sums against the coefficient bound, and
/// internal consistency of the compressions.
pub fn dilation_sum_bound_check(
    dilation: &DilationResult,
    alphas: &[c64],
    tol: f64,
) -> Result<DilationBoundReport, ConstructionError> {
    let n = dilation.n();
    if alphas.len() != n {
        return Err(ConstructionError::CoefficientCountMismatch { n, got: alphas.len() });
    }

    let d = dilation.base_dim();
    let mut sum_corner = DenseOperator::zeros(d);
    let mut weighted_corner = DenseOperator::zeros(d);
    let mut sum_unitary = DenseOperator::zeros(dilation.dilated_dim());
    let mut weighted_unitary = DenseOperator::zeros(dilation.dilated_dim());
    for i in 0..n {
        let x = dilation.input(i);
        let u = &dilation.unitaries()[i];
        sum_corner = sum_corner.add(x)?;
        weighted_corner = weighted_corner.add(&x.scale(alphas[i]))?;
        sum_unitary = sum_unitary.add(u)?;
        weighted_unitary = weighted_unitary.add(&u.scale(alphas[i]))?;
    }

    let sum_corner_norm = sum_corner.op_norm()?;
    let weighted_corner_norm = weighted_corner.op_norm()?;
    let sum_unitary_norm = sum_unitary.op_norm()?;
    let weighted_unitary_norm = weighted_unitary.op_norm()?;

    let (sum_target, weighted_target) = if n >= 2 {
        (
            Some(closedform::leinert_norm(n)?.value),
            Some(closedform::coefficient_bound(n, alphas)?),
        )
    } else {
        (None, None)
    };

    let compression_consistent = sum_corner_norm <= sum_unitary_norm + UNITARITY_TOL
        && weighted_corner_norm <= weighted_unitary_norm + UNITARITY_TOL;
    let sum_within_target = sum_target.map(|t| sum_unitary_norm <= t + tol);
    let weighted_within_target = weighted_target.map(|t| weighted_unitary_norm <= t + tol);
    let pass = compression_consistent
        && sum_within_target.unwrap_or(true)
        && weighted_within_target.unwrap_or(true);

    Ok(DilationBoundReport {
        n,
        sum_corner_norm,
        sum_unitary_norm,
        sum_target,
        weighted_corner_norm,
        weighted_unitary_norm,
        weighted_target,
        compression_consistent,
        sum_within_target,
        weighted_within_target,
        pass,
    })
}

/// A paving setup: `n` Haar-rotated rank-`d/n` projections summing to the
/// identity, the associated root-of-unity unitary, and a target contraction.
#[derive(Debug, Clone)]
pub struct PavingInstance {
    n: usize,
    dim: usize,
    x: DenseOperator,
    projections: Vec<DenseOperator>,
    u: DenseOperator,
}

impl PavingInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self) -> &DenseOperator {
        &self.x
    }

    pub fn projections(&self) -> &[DenseOperator] {
        &self.projections
    }

    /// `u = sum_j lambda^j p_j` for `lambda = exp(2 pi i / n)`; satisfies
    /// `u^n = 1` and `tau(u^k) = 0` for `0 < k < n`.
    pub fn u(&self) -> &DenseOperator {
        &self.u
    }

    /// The same projections aimed at a different target contraction.
    pub fn retarget(&self, x: &DenseOperator) -> Result<PavingInstance, ConstructionError> {
        validate_paving_target(x, self.dim)?;
        Ok(PavingInstance {
            n: self.n,
            dim: self.dim,
            x: x.clone(),
            projections: self.projections.clone(),
            u: self.u.clone(),
        })
    }
}

fn validate_paving_target(x: &DenseOperator, dim: usize) -> Result<(), ConstructionError> {
    if x.dim() != dim {
        return Err(RmtError::DimMismatch { a: dim, b: x.dim() }.into());
    }
    let norm = x.op_norm()?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(ConstructionError::NotContraction { index: 0, norm });
    }
    Ok(())
}

/// Builds a paving of `x` into `n` equal-trace blocks in Haar-random
/// position, validating that the projections partition the identity.
pub fn build_paving(
    n: usize,
    x: &DenseOperator,
    spec: &RngSpec,
) -> Result<PavingInstance, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BlockCountTooSmall { n });
    }
    let d = x.dim();
    if d % n != 0 {
        return Err(ConstructionError::NotDivisible { d, n });
    }
    validate_paving_target(x, d)?;

    let w = sample_haar_unitary(d, spec);
    let block = d / n;
    let projections: Vec<DenseOperator> =
        (0..n).map(|j| projection_from_columns(&w, j * block, block)).collect();

    let mut partition = DenseOperator::zeros(d);
    for p in &projections {
        partition = partition.add(p)?;
    }
    let residual = partition.sub(&DenseOperator::identity(d))?.max_abs();
    if residual > PARTITION_TOL {
        return Err(ConstructionError::PartitionBroken { residual });
    }

    let mut u = DenseOperator::zeros(d);
    for (j, p) in projections.iter().enumerate() {
        let angle = std::f64::consts::TAU * j as f64 / n as f64;
        u = u.add(&p.scale(c64::new(angle.cos(), angle.sin())))?;
    }

    Ok(PavingInstance { n, dim: d, x: x.clone(), projections, u })
}

/// The paving norm computed by its two equal definitions.
#[derive(Debug, Clone, Copy)]
pub struct PavingNorms {
    /// `||sum_j p_j x p_j||`.
    pub compressed: f64,
    /// `(1/n) ||sum_i u^i x u^(-i)||`, an exact rewriting of the compressed
    /// sum through the averaging identity.
    pub averaged: f64,
}

/// Computes the paving norm both ways and confirms they agree; disagreement
/// beyond [`AVERAGING_TOL`] is an internal error, not a measurement.
pub fn paving_norms(instance: &PavingInstance) -> Result<PavingNorms, ConstructionError> {
    let d = instance.dim();
    let n = instance.n();
    let mut compressed_sum = DenseOperator::zeros(d);
    for p in instance.projections() {
        compressed_sum = compressed_sum.add(&p.mul(instance.x())?.mul(p)?)?;
    }
    let compressed = compressed_sum.op_norm()?;

    let mut averaged_sum = DenseOperator::zeros(d);
    let mut power = DenseOperator::identity(d);
    for i in 0..n {
        if i > 0 {
            power = power.mul(instance.u())?;
        }
        averaged_sum =
            averaged_sum.add(&power.mul(instance.x())?.mul(&power.adjoint())?)?;
    }
    let averaged = averaged_sum.op_norm()? / n as f64;

    if (compressed - averaged).abs() > AVERAGING_TOL {
        return Err(ConstructionError::AveragingIdentityBroken { compressed, averaged });
    }
    Ok(PavingNorms { compressed, averaged })
}

/// `||sum_j p_j x p_j||` for the instance's projections and target.
pub fn paving_norm(instance: &PavingInstance) -> Result<f64, ConstructionError> {
    Ok(paving_norms(instance)?.compressed)
}

/// Defect scan over the conjugation orbit `{u^i x u^(-i)}`. Duplicates are
/// allowed because a target commuting with `u` collapses the orbit.
pub fn orbit_lfree_check(
    instance: &PavingInstance,
    max_len: usize,
) -> Result<LFreeDefect, ConstructionError> {
    let mut orbit = Vec::with_capacity(instance.n());
    let mut power = DenseOperator::identity(instance.dim());
    for i in 0..instance.n() {
        if i > 0 {
            power = power.mul(instance.u())?;
        }
        orbit.push(power.mul(instance.x())?.mul(&power.adjoint())?);
    }
    Ok(lfree_defect(&orbit, max_len, &DefectOptions { allow_duplicates: true })?)
}

/// One block of a sharpness experiment.
#[derive(Debug, Clone)]
pub struct SharpnessBlock {
    pub trace: Trace,
    /// `||p_i v p_i||` measured in the model.
    pub norm: f64,
    /// `2 sqrt(tau (1 - tau))`, the free-model value of that norm.
    pub predicted: f64,
}

/// Outcome of paving a trace-zero symmetry by projections of chosen traces.
#[derive(Debug, Clone)]
pub struct SharpnessOutcome {
    pub n: usize,
    pub dim: usize,
    pub equal_traces: bool,
    /// `||sum_i p_i v p_i||`.
    pub paving_norm: f64,
    /// `2 sqrt(n - 1) / n`, the best value achievable with equal traces.
    pub equal_trace_bound: f64,
    pub blocks: Vec<SharpnessBlock>,
}

/// Paves a Haar-rotated trace-zero symmetry by projections with the given
/// traces and reports per-block and total norms. With equal traces the
/// paving norm approaches `2 sqrt(n - 1) / n`; with unequal traces the
/// widest block already exceeds it, showing equal traces are forced for
/// optimal paving.
pub fn sharpness_experiment(
    n: usize,
    traces: &[Trace],
    d: usize,
    spec: &RngSpec,
) -> Result<SharpnessOutcome, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BlockCountTooSmall { n });
    }
    if traces.len() != n {
        return Err(ConstructionError::TraceCountMismatch { n, got: traces.len() });
    }
    let total: Trace = traces.iter().copied().sum();
    if total != Trace::from_integer(1) {
        return Err(ConstructionError::TraceSumNotOne { got: total.to_string() });
    }
    let half = Trace::new(1, 2);
    let mut ranks = Vec::with_capacity(n);
    for (index, &t) in traces.iter().enumerate() {
        if t > half {
            return Err(ConstructionError::TraceOutOfRange { index, trace: t.to_string() });
        }
        ranks.push(crate::rmt::exact_rank(t, d)?);
    }

    let v = sample_symmetry(d, &spec.substream(0))?;
    let w = sample_haar_unitary(d, &spec.substream(1));

    let mut blocks = Vec::with_capacity(n);
    let mut paving_sum = DenseOperator::zeros(d);
    let mut offset = 0;
    for (&trace, &rank) in traces.iter().zip(&ranks) {
        let p = projection_from_columns(&w, offset, rank);
        offset += rank;
        let pvp = p.mul(&v)?.mul(&p)?;
        paving_sum = paving_sum.add(&pvp)?;
        blocks.push(SharpnessBlock {
            trace,
            norm: pvp.op_norm()?,
            predicted: closedform::qvq_norm(ratio_to_f64(trace))?,
        });
    }
    debug_assert_eq!(offset, d);

    Ok(SharpnessOutcome {
        n,
        dim: d,
        equal_traces: traces.iter().all(|&t| t == traces[0]),
        paving_norm: paving_sum.op_norm()?,
        equal_trace_bound: closedform::paving_norm_bound(n)?.bound,
        blocks,
    })
}

pub(crate) fn ratio_to_f64(r: Trace) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
