//! Generalized sampling series `S_W[f](t) = Σ_n f(n/W) φ(Wt - n)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{csv, g17};
use crate::gibbs::gibbs_value;
use crate::kernel::{
    one_sided_sum_lower, one_sided_sum_upper, Decay, Kernel, LatticeSumResult, RealFn,
    TruncationPolicy,
};

/// What is known about a signal's discontinuities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalShape {
    /// No structure assumed.
    General,
    /// Only discontinuity at 0, `f(0) = f(0+)`.
    JumpAtZero { left: f64, right: f64 },
    /// `right` on `[0, ∞)`, `left` on `(-∞, 0)`. Constants have `left == right`.
    Step { left: f64, right: f64 },
}

/// A bounded signal. `sup_bound` is declared by the caller, not inferred.
#[derive(Clone)]
pub struct SampledSignal {
    description: String,
    sup_bound: f64,
    shape: SignalShape,
    eval: RealFn,
}

impl fmt::Debug for SampledSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledSignal")
            .field("description", &self.description)
            .field("sup_bound", &self.sup_bound)
            .field("shape", &self.shape)
            .finish()
    }
}

impl SampledSignal {
    pub fn new(
        description: impl Into<String>,
        sup_bound: f64,
        shape: SignalShape,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(sup_bound >= 0.0 && sup_bound.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sup_bound must be finite and nonnegative, got {sup_bound}"
            )));
        }
        Ok(Self {
            description: description.into(),
            sup_bound,
            shape,
            eval: Arc::new(eval),
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::step(c, c)
    }

    /// `right` for `t >= 0`, `left` for `t < 0`.
    pub fn step(left: f64, right: f64) -> Self {
        Self {
            description: format!("step:{left},{right}"),
            sup_bound: left.abs().max(right.abs()),
            shape: SignalShape::Step { left, right },
            eval: Arc::new(move |t| if t >= 0.0 { right } else { left }),
        }
    }

    /// `sgn` with `sgn(0) = 1`.
    pub fn sign() -> Self {
        Self {
            description: "sign".into(),
            ..Self::step(-1.0, 1.0)
        }
    }

    pub fn cosine() -> Self {
        Self {
            description: "cosine".into(),
            sup_bound: 1.0,
            shape: SignalShape::General,
            eval: Arc::new(f64::cos),
        }
    }

    /// `sgn(t)·(1 + min(|t|, 2))`, jump from -1 to 1 at the origin.
    pub fn ramp_step() -> Self {
        Self {
            description: "ramp-step".into(),
            sup_bound: 3.0,
            shape: SignalShape::JumpAtZero {
                left: -1.0,
                right: 1.0,
            },
            eval: Arc::new(|t| {
                let m = 1.0 + t.abs().min(2.0);
                if t >= 0.0 {
                    m
                } else {
                    -m
                }
            }),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn shape(&self) -> SignalShape {
        self.shape
    }

    #[inline]
    pub fn evaluate(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// `(f(0-), f(0+))` when the signal is declared to jump only at 0.
    pub fn jump_limits(&self) -> Option<(f64, f64)> {
        match self.shape {
            SignalShape::JumpAtZero { left, right } | SignalShape::Step { left, right } => {
                Some((left, right))
            }
            SignalShape::General => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvalConfig {
    pub sum_policy: TruncationPolicy,
    w: f64,
}

impl SeriesEvalConfig {
    pub fn new(w: f64, sum_policy: TruncationPolicy) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sampling rate must be positive, got {w}"
            )));
        }
        Ok(Self { sum_policy, w })
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

/// `Σ_n f(n/w) φ(x - n)`, summed in order of ascending `|n|`, negative
/// first on ties.
pub fn weighted_series(
    kernel: &Kernel,
    f: &SampledSignal,
    w: f64,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    if let SignalShape::Step { left, right } = f.shape {
        let lower = one_sided_sum_lower(kernel, x, policy)?;
        let upper = one_sided_sum_upper(kernel, x, policy)?;
        return Ok(lower.scaled(right).plus(upper.scaled(left)));
    }
    let (lo, hi, bound, kind) = match kernel.decay() {
        Decay::CompactSupport { radius } => (
            (x - radius).ceil() as i64,
            (x + radius).floor() as i64,
            0.0,
            crate::kernel::BoundKind::Rigorous,
        ),
        Decay::AbsolutelySummable { kind, .. } => {
            let r = window_radius(kernel, f.sup_bound, policy)?;
            let m0 = x.floor() as i64;
            let bound = f.sup_bound * kernel.lattice_tail_bound(r).unwrap_or(f64::INFINITY);
            (m0 - r as i64, m0 + r as i64, bound, *kind)
        }
        Decay::AlternatingEnvelope { .. } => {
            return Err(Error::Unsupported {
                kernel: kernel.name().to_string(),
                what: "sampling series of general signals".into(),
            })
        }
    };
    let mut ns: Vec<i64> = (lo..=hi).collect();
    ns.sort_by_key(|n| (n.unsigned_abs(), *n));
    let mut acc = 0.0;
    for &n in &ns {
        acc += f.evaluate(n as f64 / w) * kernel.evaluate(x - n as f64);
    }
    Ok(LatticeSumResult {
        value: acc,
        error_bound: bound,
        terms_used: ns.len(),
        bound_kind: kind,
    })
}

/// Smallest `R` with `sup_bound · tail_bound(R) <= target`.
fn window_radius(kernel: &Kernel, sup_bound: f64, policy: &TruncationPolicy) -> Result<usize> {
    let target = policy.target_abs_error();
    let max_radius = policy.max_radius();
    let tail = |r: usize| sup_bound * kernel.lattice_tail_bound(r).unwrap_or(f64::INFINITY);
    if tail(1) <= target {
        return Ok(1);
    }
    let mut hi = 2usize;
    while tail(hi) > target {
        if hi >= max_radius {
            return Err(Error::TruncationBudget {
                kernel: kernel.name().to_string(),
                target,
                max_radius,
                best_bound: tail(max_radius),
            });
        }
        hi = (hi * 2).min(max_radius);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if tail(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `S_W[f](t)`.
pub fn sampling_series(
    kernel: &Kernel,
    f: &SampledSignal,
    config: &SeriesEvalConfig,
    t: f64,
) -> Result<f64> {
    Ok(weighted_series(kernel, f, config.w, config.w * t, &config.sum_policy)?.value)
}

/// `Σ_n f(n/N) φ(ξ - n)`, which equals `S_N[f](ξ/N)`.
pub fn rescaled_series(
    kernel: &Kernel,
    f: &SampledSignal,
    n: usize,
    xi: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("N must be positive".into()));
    }
    Ok(weighted_series(kernel, f, n as f64, xi, policy)?.value)
}

/// `linspace(-4, 4, 129)` without the origin.
pub fn default_xi_grid() -> Vec<f64> {
    (-64..=64)
        .filter(|&i| i != 0)
        .map(|i| i as f64 / 16.0)
        .collect()
}

/// `(N, sup_ξ |rescaled_series(N, ξ) - G[f](ξ)|)` for each `N`.
pub fn convergence_probe(
    kernel: &Kernel,
    f: &SampledSignal,
    n_list: &[usize],
    xi_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<Vec<(usize, f64)>> {
    let (left, right) = f.jump_limits().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "signal `{}` is not declared to jump only at the origin",
            f.description
        ))
    })?;
    let limit: Vec<f64> = xi_grid
        .par_iter()
        .map(|&xi| Ok(gibbs_value(kernel, left, right, xi, policy)?.value))
        .collect::<Result<_>>()?;
    n_list
        .iter()
        .map(|&n| {
            let errs: Vec<f64> = xi_grid
                .par_iter()
                .zip(limit.par_iter())
                .map(|(&xi, &g)| Ok((rescaled_series(kernel, f, n, xi, policy)? - g).abs()))
                .collect::<Result<_>>()?;
            Ok((n, errs.into_iter().fold(0.0, f64::max)))
        })
        .collect()
}

/// `(W, |S_W[f](t) - f(t)|)` for each `W`; `t` should be a continuity point.
pub fn continuity_convergence_check(
    kernel: &Kernel,
    f: &SampledSignal,
    t: f64,
    w_list: &[f64],
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, f64)>> {
    let target = f.evaluate(t);
    w_list
        .iter()
        .map(|&w| {
            let config = SeriesEvalConfig::new(w, *policy)?;
            Ok((w, (sampling_series(kernel, f, &config, t)? - target).abs()))
        })
        .collect()
}

pub fn probe_csv(rows: &[(usize, f64)]) -> String {
    csv(
        &["N", "sup_error"],
        rows.iter().map(|(n, e)| vec![n.to_string(), g17(*e)]),
    )
}

pub fn continuity_csv(rows: &[(f64, f64)]) -> String {
    csv(
        &["W", "abs_error"],
        rows.iter().map(|(w, e)| vec![g17(*w), g17(*e)]),
    )
}
