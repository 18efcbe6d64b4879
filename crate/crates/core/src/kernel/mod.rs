//! Kernels on the real line and their sums over integer shifts.
//!
//! A [`Kernel`] couples pointwise evaluation with decay metadata that is
//! strong enough to bound the truncation error of lattice sums
//! `Σ φ(t - n)`. Three decay classes are supported:
//!
//! * [`Decay::CompactSupport`]: every lattice sum is a finite sum.
//! * [`Decay::AbsolutelySummable`]: a uniform tail bound on `[0, 1]`,
//!   optionally refined by [`MonotoneTail`] integral brackets for kernels
//!   whose tails decay only algebraically.
//! * [`Decay::AlternatingEnvelope`]: conditionally convergent kernels such
//!   as sinc, whose lattice tails alternate in sign. Full lattice sums of
//!   these kernels are taken in the symmetric (principal value) sense.
//!
//! Kernels that are finite combinations of integer shifts of a base kernel
//! (cardinal functions, see [`Kernel::shift_combination`]) have their lattice
//! sums computed from the base kernel's sums instead of term by term.

mod bspline;
mod lattice;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

pub use bspline::MAX_ORDER as MAX_BSPLINE_ORDER;
pub use lattice::{
    full_lattice_sum, one_sided_sum_lower, one_sided_sum_upper, partition_of_unity_defect,
    unit_grid,
};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TailFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Rigorous,
    Heuristic,
}

impl BoundKind {
    fn and(self, other: BoundKind) -> BoundKind {
        if self == BoundKind::Rigorous && other == BoundKind::Rigorous {
            BoundKind::Rigorous
        } else {
            BoundKind::Heuristic
        }
    }
}

/// Tail shape used to sum algebraically decaying kernels.
///
/// Contract: for `|x| >= from` the kernel is nonnegative, nonincreasing in
/// `|x|` and convex. `right_integral(a)` is `∫_a^∞ φ` and `left_integral(a)`
/// is `∫_{-∞}^{-a} φ`, both for `a >= from`.
#[derive(Clone)]
pub struct MonotoneTail {
    pub from: f64,
    pub right_integral: RealFn,
    pub left_integral: RealFn,
}

#[derive(Clone)]
pub enum Decay {
    /// `φ(x) = 0` for `|x| > radius`.
    CompactSupport { radius: f64 },
    /// `tail_bound(R)` bounds `Σ_{|n|>R} |φ(t - n)|` uniformly for `t ∈ [0, 1]`.
    AbsolutelySummable {
        tail_bound: TailFn,
        kind: BoundKind,
        monotone_tail: Option<MonotoneTail>,
    },
    /// `|φ(x)| <= envelope(|x|)`. For `|x| >= regular_from` consecutive
    /// lattice terms alternate in sign with magnitudes decreasing and convex
    /// in the distance from the origin.
    AlternatingEnvelope { envelope: RealFn, regular_from: f64 },
}

impl fmt::Debug for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decay::CompactSupport { radius } => {
                f.debug_struct("CompactSupport").field("radius", radius).finish()
            }
            Decay::AbsolutelySummable {
                kind,
                monotone_tail,
                ..
            } => f
                .debug_struct("AbsolutelySummable")
                .field("kind", kind)
                .field("monotone_tail", &monotone_tail.as_ref().map(|m| m.from))
                .finish(),
            Decay::AlternatingEnvelope { regular_from, .. } => f
                .debug_struct("AlternatingEnvelope")
                .field("regular_from", regular_from)
                .finish(),
        }
    }
}

/// Accuracy target and work limit for a single lattice sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    target_abs_error: f64,
    max_radius: usize,
}

impl TruncationPolicy {
    pub const DEFAULT_TARGET: f64 = 1e-10;
    pub const DEFAULT_MAX_RADIUS: usize = 1_000_000;

    pub fn new(target_abs_error: f64, max_radius: usize) -> Result<Self> {
        if !(target_abs_error > 0.0 && target_abs_error.is_finite()) {
            return Err(Error::InvalidPolicy(format!(
                "target_abs_error must be positive and finite, got {target_abs_error}"
            )));
        }
        if max_radius < 1 {
            return Err(Error::InvalidPolicy("max_radius must be at least 1".into()));
        }
        Ok(Self {
            target_abs_error,
            max_radius,
        })
    }

    pub fn target_abs_error(&self) -> f64 {
        self.target_abs_error
    }

    pub fn max_radius(&self) -> usize {
        self.max_radius
    }

    /// Same radius limit with a different target.
    pub(crate) fn with_target(&self, target_abs_error: f64) -> Self {
        Self {
            target_abs_error,
            max_radius: self.max_radius,
        }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            target_abs_error: Self::DEFAULT_TARGET,
            max_radius: Self::DEFAULT_MAX_RADIUS,
        }
    }
}

/// A truncated (or exact) lattice sum with its truncation error bound.
/// Bounds ignore floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSumResult {
    pub value: f64,
    pub error_bound: f64,
    pub terms_used: usize,
    pub bound_kind: BoundKind,
}

impl LatticeSumResult {
    pub fn exact(value: f64, terms_used: usize) -> Self {
        Self {
            value,
            error_bound: 0.0,
            terms_used,
            bound_kind: BoundKind::Rigorous,
        }
    }

    /// `a * self`.
    pub fn scaled(self, a: f64) -> Self {
        Self {
            value: a * self.value,
            error_bound: a.abs() * self.error_bound,
            ..self
        }
    }

    /// `self + other`, with bounds added.
    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_bound: self.error_bound + other.error_bound,
            terms_used: self.terms_used + other.terms_used,
            bound_kind: self.bound_kind.and(other.bound_kind),
        }
    }

    /// `self - other`, with bounds added.
    pub fn minus(self, other: Self) -> Self {
        self.plus(other.scaled(-1.0))
    }
}

/// `Σ_i coefficients[i] · base(x - (first_index + i))`.
#[derive(Debug)]
pub struct ShiftCombination {
    base: Kernel,
    first_index: i64,
    coefficients: Vec<f64>,
    abs_sum: f64,
    sum: f64,
}

impl ShiftCombination {
    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn last_index(&self) -> i64 {
        self.first_index + self.coefficients.len() as i64 - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `Σ |c_n|`.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// `Σ c_n`.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    fn evaluate(&self, x: f64) -> f64 {
        let (lo, hi) = match self.base.support_radius() {
            Some(r) => (
                ((x - r).ceil() as i64).max(self.first_index),
                ((x + r).floor() as i64).min(self.last_index()),
            ),
            None => (self.first_index, self.last_index()),
        };
        let mut acc = 0.0;
        for n in lo..=hi {
            let c = self.coefficients[(n - self.first_index) as usize];
            acc += c * self.base.evaluate(x - n as f64);
        }
        acc
    }

    /// Bound on `Σ_{|j|>r} |φ(t - j)|` for `t ∈ [0, 1]`, from the base
    /// kernel's shift tail and the coefficient magnitudes.
    fn tail_bound(&self, r: usize) -> f64 {
        let base_all = self.base.peak().unwrap_or(f64::INFINITY)
            + self.base.lattice_tail_bound(0).unwrap_or(f64::INFINITY);
        let mut acc = 0.0;
        for (i, c) in self.coefficients.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let n = (self.first_index + i as i64).unsigned_abs() as usize;
            let b = if r > n {
                self.base.lattice_tail_bound(r - n).unwrap_or(f64::INFINITY)
            } else {
                base_all
            };
            acc += c.abs() * b;
        }
        acc
    }
}

struct KernelInner {
    name: String,
    even: bool,
    decay: Decay,
    peak: Option<f64>,
    eval: RealFn,
    combination: Option<Arc<ShiftCombination>>,
}

/// An evaluatable real kernel with symmetry and decay metadata.
///
/// Cloning is cheap; kernels are immutable and `Send + Sync`.
#[derive(Clone)]
pub struct Kernel {
    inner: Arc<KernelInner>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.inner.name)
            .field("even", &self.inner.even)
            .field("decay", &self.inner.decay)
            .field("peak", &self.inner.peak)
            .finish()
    }
}

impl Kernel {
    pub fn new(
        name: impl Into<String>,
        even: bool,
        decay: Decay,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            inner: Arc::new(KernelInner {
                name: name.into(),
                even,
                decay,
                peak: None,
                eval: Arc::new(eval),
                combination: None,
            }),
        }
    }

    /// Attach `sup |φ|`, needed when the kernel is used as a shift
    /// combination base or as a cardinal generator.
    pub fn with_peak(self, peak: f64) -> Self {
        let inner = &self.inner;
        Self {
            inner: Arc::new(KernelInner {
                name: inner.name.clone(),
                even: inner.even,
                decay: inner.decay.clone(),
                peak: Some(peak),
                eval: inner.eval.clone(),
                combination: inner.combination.clone(),
            }),
        }
    }

    /// The kernel `x ↦ Σ_i coefficients[i] · base(x - first_index - i)`.
    ///
    /// The result is compactly supported when the base is, and otherwise
    /// absolutely summable with a tail bound derived from the base kernel.
    /// Its lattice sums are evaluated from the base kernel's lattice sums.
    pub fn shift_combination(
        name: impl Into<String>,
        base: Kernel,
        first_index: i64,
        coefficients: Vec<f64>,
        even: bool,
    ) -> Result<Self> {
        let name = name.into();
        let base_kind = match base.decay() {
            Decay::CompactSupport { .. } => BoundKind::Rigorous,
            Decay::AbsolutelySummable { kind, .. } => *kind,
            Decay::AlternatingEnvelope { .. } => {
                return Err(Error::Unsupported {
                    kernel: base.name().to_string(),
                    what: "use as a shift-combination base".into(),
                })
            }
        };
        let base_peak = base.peak().ok_or_else(|| {
            Error::InvalidConfig(format!("base kernel `{}` has no peak bound", base.name()))
        })?;
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig(
                "shift combination needs a nonempty finite coefficient list".into(),
            ));
        }
        let abs_sum: f64 = coefficients.iter().map(|c| c.abs()).sum();
        let reach = coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, _)| (first_index + i as i64).unsigned_abs())
            .max()
            .unwrap_or(0);
        let sum: f64 = coefficients.iter().sum();
        let comb = Arc::new(ShiftCombination {
            base,
            first_index,
            coefficients,
            abs_sum,
            sum,
        });
        let eval_comb = comb.clone();
        let tail_comb = comb.clone();
        Ok(Self {
            inner: Arc::new(KernelInner {
                name,
                even,
                decay: match comb.base.support_radius() {
                    Some(radius) => Decay::CompactSupport {
                        radius: radius + reach as f64,
                    },
                    None => Decay::AbsolutelySummable {
                        tail_bound: Arc::new(move |r| tail_comb.tail_bound(r)),
                        kind: base_kind,
                        monotone_tail: None,
                    },
                },
                peak: Some(abs_sum * base_peak),
                eval: Arc::new(move |x| eval_comb.evaluate(x)),
                combination: Some(comb),
            }),
        })
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    #[inline]
    pub fn evaluate(&self, x: f64) -> f64 {
        (self.inner.eval)(x)
    }

    pub fn is_even(&self) -> bool {
        self.inner.even
    }

    pub fn decay(&self) -> &Decay {
        &self.inner.decay
    }

    /// `sup |φ|`, when known.
    pub fn peak(&self) -> Option<f64> {
        self.inner.peak
    }

    pub fn combination(&self) -> Option<&ShiftCombination> {
        self.inner.combination.as_deref()
    }

    pub fn support_radius(&self) -> Option<f64> {
        match self.inner.decay {
            Decay::CompactSupport { radius } => Some(radius),
            _ => None,
        }
    }

    /// Bound on `Σ_{|n|>r} |φ(t - n)|` uniformly for `t ∈ [0, 1]`.
    ///
    /// `None` for conditionally convergent kernels, and for compactly
    /// supported kernels without a peak bound.
    pub fn lattice_tail_bound(&self, r: usize) -> Option<f64> {
        match &self.inner.decay {
            Decay::CompactSupport { radius } => {
                if r as f64 >= radius + 1.0 {
                    Some(0.0)
                } else {
                    // at most 2·ceil(radius) + 3 shifts meet the support
                    self.peak()
                        .map(|p| (2.0 * radius.ceil() + 3.0) * p)
                }
            }
            Decay::AbsolutelySummable { tail_bound, .. } => Some(tail_bound(r)),
            Decay::AlternatingEnvelope { .. } => None,
        }
    }
}

/// `sin(πx)` with exact argument reduction, so integer `x` gives exactly 0.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x - 2.0 * (x / 2.0).round();
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// `sinc(x) = sin(πx)/(πx)`, `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// The cardinal sine kernel.
///
/// Its lattice sums converge only conditionally; one-sided sums use the
/// alternating structure `sin(π(t - n)) = (-1)^n sin(πt)` and full sums are
/// symmetric limits.
pub fn make_sinc() -> Kernel {
    Kernel::new(
        "sinc",
        true,
        Decay::AlternatingEnvelope {
            envelope: Arc::new(|r| 1.0 / (PI * r)),
            regular_from: 1.0,
        },
        sinc,
    )
    .with_peak(1.0)
}

/// Centered B-spline `M_n` of order `n`, supported on `[-n/2, n/2]`.
pub fn make_bspline(order: i64) -> Result<Kernel> {
    if order < 1 || order as usize > bspline::MAX_ORDER {
        return Err(Error::InvalidOrder {
            order,
            max: bspline::MAX_ORDER,
        });
    }
    let n = order as usize;
    let peak = bspline::centered_bspline(n, 0.0);
    Ok(Kernel::new(
        format!("bspline:{n}"),
        true,
        Decay::CompactSupport {
            radius: n as f64 / 2.0,
        },
        move |x| bspline::centered_bspline(n, x),
    )
    .with_peak(peak))
}

/// `scale / (x² + c²)`.
fn scaled_inverse_multiquadric(name: String, c: f64, scale: f64) -> Result<Kernel> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "inverse multiquadric shape parameter must be positive, got {c}"
        )));
    }
    let c2 = c * c;
    let psi = move |x: f64| scale / (x * x + c2);
    // ∫_a^∞ scale/(x²+c²) dx = scale·atan(c/a)/c
    let integral: RealFn = Arc::new(move |a: f64| scale * (c / a).atan() / c);
    let tail_integral = integral.clone();
    Ok(Kernel::new(
        name,
        true,
        Decay::AbsolutelySummable {
            // Σ_{|n|>R}|ψ(t-n)| <= 2 Σ_{k>=R} ψ(k) <= 2(ψ(R) + ∫_R^∞ ψ)
            tail_bound: Arc::new(move |r| {
                let r = r.max(1) as f64;
                2.0 * (psi(r) + tail_integral(r))
            }),
            kind: BoundKind::Rigorous,
            monotone_tail: Some(MonotoneTail {
                from: c / 3f64.sqrt(),
                right_integral: integral.clone(),
                left_integral: integral,
            }),
        },
        psi,
    )
    .with_peak(scale / c2))
}

/// Inverse multiquadric `(x² + c²)^{-1}`.
pub fn make_inverse_multiquadric(c: f64) -> Result<Kernel> {
    scaled_inverse_multiquadric(format!("invmq:{c}"), c, 1.0)
}

/// Poisson kernel `1 / (π (x² + 1))`.
pub fn make_poisson() -> Kernel {
    scaled_inverse_multiquadric("poisson".into(), 1.0, 1.0 / PI)
        .expect("unit shape parameter is valid")
}

/// Gaussian `exp(-(x/α)²)`.
pub fn make_gaussian(alpha: f64) -> Result<Kernel> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "gaussian width must be positive, got {alpha}"
        )));
    }
    let inv = 1.0 / alpha;
    let g = move |x: f64| {
        let y = x * inv;
        (-y * y).exp()
    };
    Ok(Kernel::new(
        format!("gaussian:{alpha}"),
        true,
        Decay::AbsolutelySummable {
            // 2(g(R) + ∫_R^∞ g), with ∫_R^∞ g <= α²/(2R)·g(R)
            tail_bound: Arc::new(move |r| {
                let r = r.max(1) as f64;
                2.0 * g(r) * (1.0 + alpha * alpha / (2.0 * r))
            }),
            kind: BoundKind::Rigorous,
            monotone_tail: None,
        },
        g,
    )
    .with_peak(1.0))
}
