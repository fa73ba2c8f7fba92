//! Trace moments of convolution operators and the norm bounds they imply.
//!
//! A [`Convolver`] is a finitely supported function `L = sum c_g g` acting on
//! `l^2` of a free product by left convolution. Its operator norm satisfies
//!
//! ```text
//! tau((L* L)^m)^(1/(2m)) <= ||L||   for every m >= 1,
//! ```
//!
//! with the left side increasing to `||L||` as `m` grows; `tau` reads off the
//! coefficient of the identity. Moments are computed by alternately
//! convolving with `L` and `L*` starting from the point mass at the identity,
//! in exact Gaussian-rational arithmetic when the scalar type permits, so the
//! reported lower bounds are true bounds rather than floating estimates.

use crate::words::{GroupPresentation, ReducedWord, WordError};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Exact complex scalar with rational real and imaginary parts.
pub type GaussRational = num_complex::Complex<BigRational>;

/// Words tracked per state before a computation aborts.
pub const DEFAULT_SUPPORT_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("moment order must be at least 1")]
    InvalidOrder,
    #[error("convolver has empty support")]
    EmptySupport,
    #[error("state support reached {support} words, over the cap of {cap}")]
    SupportCapExceeded { support: usize, cap: usize },
    #[error("cannot parse `{text}` as a Gaussian rational")]
    BadScalar { text: String },
    #[error("moment tau((L*L)^m) must be real nonnegative; got a violation ({detail})")]
    NotPositive { detail: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Scalar types a [`Convolver`] can carry.
pub trait Coefficient: Clone + PartialEq + Send + Sync + 'static {
    /// Whether arithmetic in this type is exact.
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_in(&mut self, other: &Self);
    fn mul_with(&self, other: &Self) -> Self;
    fn conjugate(&self) -> Self;
    fn approx(&self) -> Complex64;
    /// `(re, im)` as exact rationals, `None` for inexact scalars.
    fn as_exact(&self) -> Option<(BigRational, BigRational)>;
}

impl Coefficient for GaussRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        GaussRational::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_in(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }
    fn mul_with(&self, other: &Self) -> Self {
        self * other
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn approx(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn as_exact(&self) -> Option<(BigRational, BigRational)> {
        Some((self.re.clone(), self.im.clone()))
    }
}

impl Coefficient for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_in(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_with(&self, other: &Self) -> Self {
        self * other
    }
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn approx(&self) -> Complex64 {
        *self
    }
    fn as_exact(&self) -> Option<(BigRational, BigRational)> {
        None
    }
}

/// Parses a Gaussian rational written like `3`, `-1/2`, `i`, `2/3i`, or
/// `1/2+2i`. At most one real and one imaginary term, each an integer or
/// `p/q` fraction, imaginary terms marked by a trailing `i`.
pub fn parse_gauss_rational(text: &str) -> Result<GaussRational, MomentError> {
    let s: String = text.chars().filter(|c| !c.is_ascii_whitespace()).collect();
    if s.is_empty() {
        return Err(MomentError::BadScalar { text: text.to_string() });
    }
    // A sign after the end of a term ('digit' or 'i') separates the real and
    // imaginary terms; a leading sign belongs to its term.
    let mut split_at = None;
    for (idx, ch) in s.char_indices().skip(1) {
        if ch == '+' || ch == '-' {
            let prev = s.as_bytes()[idx - 1];
            if prev.is_ascii_digit() || prev == b'i' {
                split_at = Some(idx);
                break;
            }
        }
    }
    return match split_at {
        Some(i) => combine(&s[..i], &s[i..], text),
        None => combine(&s, "", text),
    };

    fn parse_rational(term: &str, original: &str) -> Result<BigRational, MomentError> {
        let bad = || MomentError::BadScalar { text: original.to_string() };
        let (num, den) = match term.split_once('/') {
            Some((n, d)) => (n, d),
            None => (term, "1"),
        };
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    }

    fn parse_term(term: &str, original: &str) -> Result<(BigRational, bool), MomentError> {
        let bad = || MomentError::BadScalar { text: original.to_string() };
        if let Some(body) = term.strip_suffix('i') {
            let value = match body {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rational(body, original)?,
            };
            Ok((value, true))
        } else {
            if term.is_empty() || term == "+" || term == "-" {
                return Err(bad());
            }
            Ok((parse_rational(term, original)?, false))
        }
    }

    fn combine(first: &str, second: &str, original: &str) -> Result<GaussRational, MomentError> {
        let bad = || MomentError::BadScalar { text: original.to_string() };
        let mut re: Option<BigRational> = None;
        let mut im: Option<BigRational> = None;
        for term in [first, second] {
            if term.is_empty() {
                continue;
            }
            let (value, imaginary) = parse_term(term, original)?;
            let slot = if imaginary { &mut im } else { &mut re };
            if slot.is_some() {
                return Err(bad());
            }
            *slot = Some(value);
        }
        if re.is_none() && im.is_none() {
            return Err(bad());
        }
        Ok(GaussRational::new(
            re.unwrap_or_else(BigRational::zero),
            im.unwrap_or_else(BigRational::zero),
        ))
    }
}

/// Renders a Gaussian rational in the syntax [`parse_gauss_rational`] reads.
pub fn render_gauss_rational(value: &GaussRational) -> String {
    let re = &value.re;
    let im = &value.im;
    if im.is_zero() {
        return re.to_string();
    }
    let im_part = if im == &BigRational::one() {
        "i".to_string()
    } else if im == &(-BigRational::one()) {
        "-i".to_string()
    } else {
        format!("{im}i")
    };
    if re.is_zero() {
        im_part
    } else if im.is_positive() {
        format!("{re}+{im_part}")
    } else {
        format!("{re}{im_part}")
    }
}

/// The value of one trace moment.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    /// Exact nonnegative rational, from Gaussian-rational arithmetic.
    Exact(BigRational),
    /// Floating value, from `Complex64` arithmetic.
    Approx(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => rational_to_f64(r),
            MomentValue::Approx(x) => *x,
        }
    }

    /// Exact fraction string for exact values, decimal for approximations.
    pub fn display_string(&self) -> String {
        match self {
            MomentValue::Exact(r) => r.to_string(),
            MomentValue::Approx(x) => format!("{x}"),
        }
    }
}

impl Serialize for MomentValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MomentValue::Exact(r) => serializer.serialize_str(&r.to_string()),
            MomentValue::Approx(x) => serializer.serialize_f64(*x),
        }
    }
}

/// One row of a moment computation: `tau((L*L)^m)` and the norm bound it
/// certifies.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRecord {
    pub m: u32,
    pub value: MomentValue,
    /// `value^(1/(2m))`, a lower bound for the operator norm.
    pub lower_bound: f64,
}

/// A finitely supported convolution operator over a fixed presentation.
#[derive(Debug, Clone)]
pub struct Convolver<S: Coefficient> {
    presentation: GroupPresentation,
    /// Sorted by word, zero coefficients dropped.
    terms: Vec<(ReducedWord, S)>,
}

impl<S: Coefficient> Convolver<S> {
    /// Builds a convolver, merging duplicate words and dropping zeros.
    pub fn new(
        presentation: GroupPresentation,
        terms: impl IntoIterator<Item = (ReducedWord, S)>,
    ) -> Result<Self, MomentError> {
        let mut map: BTreeMap<ReducedWord, S> = BTreeMap::new();
        for (word, coeff) in terms {
            presentation.validate(&word)?;
            match map.get_mut(&word) {
                Some(existing) => existing.add_in(&coeff),
                None => {
                    map.insert(word, coeff);
                }
            }
        }
        let terms: Vec<(ReducedWord, S)> =
            map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Err(MomentError::EmptySupport);
        }
        Ok(Convolver { presentation, terms })
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn terms(&self) -> &[(ReducedWord, S)] {
        &self.terms
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    /// The adjoint `L* = sum conj(c_g) g^-1`.
    pub fn adjoint(&self) -> Self {
        let pres = &self.presentation;
        let mut terms: Vec<(ReducedWord, S)> = self
            .terms
            .iter()
            .map(|(w, c)| (pres.inverse(w), c.conjugate()))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Convolver { presentation: self.presentation.clone(), terms }
    }

    /// One convolution step: `(L xi)(w) = sum_g c_g xi(g^-1 w)`.
    ///
    /// States are word-indexed maps; iteration order is the word order, so
    /// floating accumulation is deterministic.
    pub fn apply(
        &self,
        state: &BTreeMap<ReducedWord, S>,
    ) -> Result<BTreeMap<ReducedWord, S>, MomentError> {
        self.apply_capped(state, DEFAULT_SUPPORT_CAP)
    }

    fn apply_capped(
        &self,
        state: &BTreeMap<ReducedWord, S>,
        cap: usize,
    ) -> Result<BTreeMap<ReducedWord, S>, MomentError> {
        let mut next: BTreeMap<ReducedWord, S> = BTreeMap::new();
        for (v, amp) in state {
            for (g, c) in &self.terms {
                let w = self.presentation.multiply(g, v);
                let contribution = c.mul_with(amp);
                match next.get_mut(&w) {
                    Some(existing) => existing.add_in(&contribution),
                    None => {
                        if next.len() == cap {
                            return Err(MomentError::SupportCapExceeded {
                                support: cap + 1,
                                cap,
                            });
                        }
                        next.insert(w, contribution);
                    }
                }
            }
        }
        Ok(next)
    }

    /// `tau((L* L)^m)` for `m = 1..=max_m`, sharing one state evolution.
    pub fn moments_up_to(&self, max_m: u32, cap: usize) -> Result<Vec<MomentRecord>, MomentError> {
        if max_m == 0 {
            return Err(MomentError::InvalidOrder);
        }
        let adjoint = self.adjoint();
        let identity = ReducedWord::identity();
        let mut state: BTreeMap<ReducedWord, S> = BTreeMap::new();
        state.insert(identity.clone(), S::one());
        let mut records = Vec::with_capacity(max_m as usize);
        for m in 1..=max_m {
            state = self.apply_capped(&state, cap)?;
            state = adjoint.apply_capped(&state, cap)?;
            let raw = state.get(&identity).cloned().unwrap_or_else(S::zero);
            records.push(finish_moment(m, raw)?);
        }
        Ok(records)
    }

    /// `tau((L* L)^m)` and the certified lower bound at a single order.
    pub fn moment(&self, m: u32) -> Result<MomentRecord, MomentError> {
        Ok(self.moments_up_to(m, DEFAULT_SUPPORT_CAP)?.pop().expect("m >= 1"))
    }

    /// Best certified lower bound over `m = 1..=max_m`.
    ///
    /// The per-order bounds need not be monotone order by order, so this
    /// takes the running maximum.
    pub fn norm_lower_bound(&self, max_m: u32) -> Result<f64, MomentError> {
        let records = self.moments_up_to(max_m, DEFAULT_SUPPORT_CAP)?;
        Ok(records.iter().map(|r| r.lower_bound).fold(0.0, f64::max))
    }
}

fn finish_moment<S: Coefficient>(m: u32, raw: S) -> Result<MomentRecord, MomentError> {
    // (L*L)^m is positive, so its trace must come out real and nonnegative;
    // anything else is a corrupted computation, not a value to round away.
    let value = match raw.as_exact() {
        Some((re, im)) => {
            if !im.is_zero() {
                return Err(MomentError::NotPositive { detail: format!("imaginary part {im}") });
            }
            if re.is_negative() {
                return Err(MomentError::NotPositive { detail: format!("real part {re}") });
            }
            MomentValue::Exact(re)
        }
        None => {
            let z = raw.approx();
            if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) || z.re < -1e-9 {
                return Err(MomentError::NotPositive { detail: format!("value {z}") });
            }
            MomentValue::Approx(z.re.max(0.0))
        }
    };
    let lower_bound = match &value {
        MomentValue::Exact(r) => rational_root(r, 2 * m),
        MomentValue::Approx(x) => x.powf(1.0 / f64::from(2 * m)),
    };
    Ok(MomentRecord { m, value, lower_bound })
}

/// `log` of a positive big integer, exact to f64 rounding.
fn log_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("small biguint fits f64").ln();
    }
    let shift = bits - 53;
    let top: BigUint = x >> shift;
    let mantissa = top.to_f64().expect("53-bit value fits f64");
    mantissa.ln() + (shift as f64) * std::f64::consts::LN_2
}

fn log_bigint_abs(x: &BigInt) -> f64 {
    log_biguint(x.magnitude())
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (log_bigint_abs(r.numer()) - log_bigint_abs(r.denom())).exp()
}

/// `r^(1/n)` for nonnegative rationals, stable for values far outside f64
/// range: computed as `exp((log num - log den) / n)`.
pub fn rational_root(r: &BigRational, n: u32) -> f64 {
    assert!(n >= 1);
    assert!(!r.is_negative(), "roots only for nonnegative rationals");
    if r.is_zero() {
        return 0.0;
    }
    ((log_bigint_abs(r.numer()) - log_bigint_abs(r.denom())) / f64::from(n)).exp()
}

/// The walk operator `sum_i (g_i + g_i^-1)` on the free group of rank `k`.
pub fn kesten_laplacian(k: usize) -> Convolver<GaussRational> {
    assert!(k >= 1, "rank must be at least 1");
    let pres = GroupPresentation::free(k);
    let mut terms = Vec::with_capacity(2 * k);
    for i in 0..k {
        let g = pres.generator(i).expect("index in range");
        terms.push((pres.inverse(&g), Coefficient::one()));
        terms.push((g, Coefficient::one()));
    }
    Convolver::new(pres, terms).expect("nonempty support")
}

/// `tau((L* L)^m)` for the rank-`k` walk operator: the number of closed
/// walks of length `2m` at the root of the `2k`-regular tree.
///
/// Walk counts split by distance from the root: a step from distance `r > 0`
/// moves to `r - 1` along the unique root-ward edge or to `r + 1` along any
/// of the other `2k - 1` edges, and from the root every one of the `2k`
/// edges moves outward. Tracking counts per distance costs `O(m^2)` big-int
/// operations instead of enumerating the exponentially large ball, and the
/// generic engine cross-checks it at small `m`.
pub fn kesten_moment(k: usize, m: u32) -> BigUint {
    assert!(k >= 1, "rank must be at least 1");
    let steps = 2 * m as usize;
    let degree = BigUint::from(2 * k);
    let back_choices = BigUint::from(2 * k - 1);
    // counts[r] = number of length-t walks from the root ending at distance r.
    let mut counts: Vec<BigUint> = vec![BigUint::zero(); steps + 2];
    counts[0] = BigUint::one();
    for _ in 0..steps {
        let mut next: Vec<BigUint> = vec![BigUint::zero(); steps + 2];
        next[0] = counts[1].clone();
        for r in 1..=steps {
            let mut v = &counts[r - 1] * if r == 1 { &degree } else { &back_choices };
            v += &counts[r + 1];
            next[r] = v;
        }
        counts = next;
    }
    counts[0].clone()
}

/// Norm lower bound `kesten_moment(k, m)^(1/(2m))` from the radial walk
/// count.
pub fn kesten_lower_bound(k: usize, m: u32) -> f64 {
    assert!(m >= 1);
    let count = kesten_moment(k, m);
    let r = BigRational::from(BigInt::from(count));
    rational_root(&r, 2 * m)
}
