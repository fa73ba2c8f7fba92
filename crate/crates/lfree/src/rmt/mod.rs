//! Dense complex matrices as a finite-dimensional model of a tracial von
//! Neumann algebra.
//!
//! The normalized trace `tau(X) = tr(X)/d` plays the role of the tracial
//! state, independent Haar rotations model free position, and growing the
//! dimension models the von Neumann limit. Sampling is driven by an explicit
//! [`RngSpec`] so every object is reproducible bit for bit; substreams keep
//! parallel trials independent of scheduling.

use faer::{c64, Mat, Side};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod defect;

pub use defect::{lfree_defect, DefectOptions, LFreeDefect, WordPattern};

/// Rational trace value, e.g. `Ratio::new(1, 3)` for a third.
pub type Trace = Ratio<u64>;

/// Largest dimension accepted by dense spectral routines.
pub const DEFAULT_DIM_CAP: usize = 2000;

#[derive(Debug, Error)]
pub enum RmtError {
    #[error("dimension {dim} exceeds the dense spectral cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },
    #[error("operator dimensions differ: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("trace {num}/{den} times dimension {d} is not an integer rank")]
    NonIntegralRank { num: u64, den: u64, d: usize },
    #[error("rank {rank} out of range 1..{max} for dimension {d}", max = d - 1)]
    RankOutOfRange { rank: usize, d: usize },
    #[error("dimension {dim} must be even")]
    OddDimension { dim: usize },
    #[error("operator list is empty")]
    EmptySet,
    #[error("operators {i} and {j} are entrywise equal; duplicates make alternating words vacuous (set allow_duplicates to accept)")]
    DuplicateElements { i: usize, j: usize },
    #[error("max_len must be an even integer >= 2, got {max_len}")]
    BadMaxLen { max_len: usize },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("bad matrix bytes: {0}")]
    BadBytes(String),
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed plus stream index selecting one reproducible randomness stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    /// A derived stream for sub-object `slot`. The map
    /// `(stream, slot) -> splitmix(stream ^ splitmix(slot))` is injective in
    /// `slot` for fixed `stream` (splitmix64's finalizer is a bijection), so
    /// sub-objects of one parent never share a stream.
    pub fn substream(&self, slot: u64) -> RngSpec {
        RngSpec { seed: self.seed, stream: splitmix(self.stream ^ splitmix(slot)) }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A square complex matrix carrying the normalized trace.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    mat: Mat<c64>,
}

impl DenseOperator {
    pub fn from_mat(mat: Mat<c64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        assert!(mat.nrows() >= 1, "operators have dimension at least 1");
        DenseOperator { mat }
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> c64) -> Self {
        Self::from_mat(Mat::from_fn(d, d, f))
    }

    pub fn zeros(d: usize) -> Self {
        Self::from_mat(Mat::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
    }

    pub fn from_diag(entries: &[c64]) -> Self {
        let d = entries.len();
        Self::from_fn(d, |i, j| if i == j { entries[i] } else { c64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<c64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    /// Normalized trace `tr(X)/d`.
    pub fn tau(&self) -> c64 {
        let d = self.dim();
        let mut sum = c64::new(0.0, 0.0);
        for i in 0..d {
            sum += self.mat[(i, i)];
        }
        sum / c64::new(d as f64, 0.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, RmtError> {
        self.check_dim(other)?;
        Ok(Self::from_mat(&self.mat + &other.mat))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RmtError> {
        self.check_dim(other)?;
        Ok(Self::from_mat(&self.mat - &other.mat))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RmtError> {
        self.check_dim(other)?;
        Ok(Self::from_mat(&self.mat * &other.mat))
    }

    pub fn scale(&self, z: c64) -> Self {
        Self::from_fn(self.dim(), |i, j| self.mat[(i, j)] * z)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_mat(self.mat.adjoint().to_owned())
    }

    /// Entrywise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.mat[(i, j)].conj())
    }

    fn check_dim(&self, other: &Self) -> Result<(), RmtError> {
        if self.dim() != other.dim() {
            return Err(RmtError::DimMismatch { a: self.dim(), b: other.dim() });
        }
        Ok(())
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.mat.norm_max()
    }

    /// `max_abs` of `X - X*`; zero for self-adjoint operators.
    pub fn self_adjointness_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let delta = self.mat[(i, j)] - self.mat[(j, i)].conj();
                worst = worst.max(delta.norm());
            }
        }
        worst
    }

    pub fn exactly_equals(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if self.mat[(i, j)] != other.mat[(i, j)] {
                    return false;
                }
            }
        }
        true
    }

    /// Eigenvalues of a self-adjoint operator, ascending.
    pub(crate) fn self_adjoint_eigen(&self) -> Result<(Vec<f64>, Mat<c64>), RmtError> {
        let evd = self
            .mat
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| RmtError::Eigen(format!("{e:?}")))?;
        let s = evd.S();
        let col = s.column_vector();
        let values: Vec<f64> = (0..self.dim()).map(|i| col[i].re).collect();
        Ok((values, evd.U().to_owned()))
    }

    /// Operator norm (largest singular value) by dense spectral
    /// decomposition of `X* X`, at the default dimension cap.
    pub fn op_norm(&self) -> Result<f64, RmtError> {
        self.op_norm_with_cap(DEFAULT_DIM_CAP)
    }

    pub fn op_norm_with_cap(&self, cap: usize) -> Result<f64, RmtError> {
        if self.dim() > cap {
            return Err(RmtError::DimCapExceeded { dim: self.dim(), cap });
        }
        let gram = Self::from_mat(self.mat.adjoint() * &self.mat);
        let (values, _) = gram.self_adjoint_eigen()?;
        let lambda_max = values.iter().fold(0.0f64, |a, &b| a.max(b));
        Ok(lambda_max.sqrt())
    }

    /// Kronecker product, row-major block convention: entry
    /// `((i1*db+i2),(j1*db+j2)) = a[i1,j1] * b[i2,j2]`.
    pub fn kron(&self, other: &Self) -> Self {
        let da = self.dim();
        let db = other.dim();
        Self::from_fn(da * db, |i, j| {
            self.mat[(i / db, j / db)] * other.mat[(i % db, j % db)]
        })
    }

    /// Serializes as `u64` little-endian dimension followed by row-major
    /// `(re, im)` little-endian doubles.
    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.dim();
        let mut out = Vec::with_capacity(8 + 16 * d * d);
        out.extend_from_slice(&(d as u64).to_le_bytes());
        for i in 0..d {
            for j in 0..d {
                let z = self.mat[(i, j)];
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RmtError> {
        if bytes.len() < 8 {
            return Err(RmtError::BadBytes("missing dimension header".into()));
        }
        let d = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        let expected = 8 + 16 * d * d;
        if d == 0 || bytes.len() != expected {
            return Err(RmtError::BadBytes(format!(
                "expected {expected} bytes for dimension {d}, got {}",
                bytes.len()
            )));
        }
        let mut mat = Mat::zeros(d, d);
        let mut offset = 8;
        for i in 0..d {
            for j in 0..d {
                let re = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
                let im = f64::from_le_bytes(bytes[offset + 8..offset + 16].try_into().unwrap());
                mat[(i, j)] = c64::new(re, im);
                offset += 16;
            }
        }
        Ok(Self::from_mat(mat))
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// QR of an i.i.d. complex Gaussian matrix with the R-diagonal phase folded
/// back in, which corrects the orthonormalization bias and gives exact Haar
/// distribution.
fn haar_from_rng(d: usize, rng: &mut ChaCha8Rng) -> DenseOperator {
    assert!(d >= 1);
    let mut g = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let u = Mat::from_fn(d, d, |i, j| {
        let rjj = r[(j, j)];
        let scale = rjj.norm();
        let phase = if scale == 0.0 { c64::new(1.0, 0.0) } else { rjj / c64::new(scale, 0.0) };
        q[(i, j)] * phase
    });
    DenseOperator::from_mat(u)
}

/// A Haar-distributed `d x d` unitary.
pub fn sample_haar_unitary(d: usize, spec: &RngSpec) -> DenseOperator {
    haar_from_rng(d, &mut spec.rng())
}

/// A rank-`tau * d` projection in Haar-random position: `W E W*` for the
/// diagonal projection `E` onto the first `tau * d` coordinates.
pub fn sample_projection(tau: Trace, d: usize, spec: &RngSpec) -> Result<DenseOperator, RmtError> {
    let rank = exact_rank(tau, d)?;
    let w = sample_haar_unitary(d, spec);
    Ok(projection_from_columns(&w, 0, rank))
}

/// `tau * d` as an exact integer rank in `1..d`.
pub fn exact_rank(tau: Trace, d: usize) -> Result<usize, RmtError> {
    let scaled = tau * Trace::from_integer(d as u64);
    if !scaled.is_integer() {
        return Err(RmtError::NonIntegralRank { num: *tau.numer(), den: *tau.denom(), d });
    }
    let rank = scaled.to_integer() as usize;
    if rank < 1 || rank > d - 1 {
        return Err(RmtError::RankOutOfRange { rank, d });
    }
    Ok(rank)
}

/// The projection onto the span of columns `start..start+count` of `w`.
pub(crate) fn projection_from_columns(
    w: &DenseOperator,
    start: usize,
    count: usize,
) -> DenseOperator {
    let cols = w.mat().as_ref().submatrix(0, start, w.dim(), count);
    DenseOperator::from_mat(cols * cols.adjoint())
}

/// A Haar-rotated diagonal contraction: diagonal entries uniform in the
/// closed unit disk, then conjugated by a Haar unitary. Always satisfies
/// `||X|| <= 1` up to rounding.
pub fn sample_contraction(d: usize, spec: &RngSpec) -> DenseOperator {
    let mut rng = spec.rng();
    let entries: Vec<c64> = (0..d)
        .map(|_| {
            let radius = rng.gen::<f64>().sqrt();
            let angle = rng.gen::<f64>() * std::f64::consts::TAU;
            c64::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();
    let w = haar_from_rng(d, &mut rng);
    let diag = DenseOperator::from_diag(&entries);
    let rotated = w.mat() * diag.mat() * w.mat().adjoint();
    DenseOperator::from_mat(rotated)
}

/// A Haar-rotated trace-zero symmetry: `W diag(1,..,1,-1,..,-1) W*` with
/// equally many signs, requiring even dimension.
pub fn sample_symmetry(d: usize, spec: &RngSpec) -> Result<DenseOperator, RmtError> {
    if d % 2 != 0 {
        return Err(RmtError::OddDimension { dim: d });
    }
    let entries: Vec<c64> = (0..d)
        .map(|i| if i < d / 2 { c64::new(1.0, 0.0) } else { c64::new(-1.0, 0.0) })
        .collect();
    let w = sample_haar_unitary(d, spec);
    let diag = DenseOperator::from_diag(&entries);
    let rotated = w.mat() * diag.mat() * w.mat().adjoint();
    Ok(DenseOperator::from_mat(rotated))
}
