//! Gibbs functions of sampling kernels and overshoot detection.
//!
//! For a jump at the origin with limits `f(0-)`, `f(0+)` (and `f(0) = f(0+)`)
//! the Gibbs function is
//!
//! ```text
//! G[f](t) = f(0+) Σ_{n>=0} φ(t-n) + f(0-) Σ_{n<0} φ(t-n)
//! ```
//!
//! and the reduced form for the sign function is `G(t) = lower(t) - upper(t)`.
//! A kernel overshoots on the left when some `y < 0` has `lower(y) < 0` and
//! on the right when some `x > 0` has `upper(x) < 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{
    full_lattice_sum, one_sided_sum_lower, one_sided_sum_upper, partition_of_unity_defect,
    unit_grid, Kernel, LatticeSumResult, TruncationPolicy,
};
use crate::quadrature;

/// Jump at the origin; `f(0)` is taken to be the right limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpSpec {
    left_limit: f64,
    right_limit: f64,
}

impl JumpSpec {
    pub fn new(left_limit: f64, right_limit: f64) -> Result<Self> {
        if !left_limit.is_finite() {
            return Err(Error::NonFinite(left_limit));
        }
        if !right_limit.is_finite() {
            return Err(Error::NonFinite(right_limit));
        }
        if left_limit == right_limit {
            return Err(Error::DegenerateJump(left_limit));
        }
        Ok(Self {
            left_limit,
            right_limit,
        })
    }

    pub fn left_limit(&self) -> f64 {
        self.left_limit
    }

    pub fn right_limit(&self) -> f64 {
        self.right_limit
    }
}

/// `right·lower(t) + left·upper(t)` with its error bound.
pub fn gibbs_value(
    kernel: &Kernel,
    left: f64,
    right: f64,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    let lower = one_sided_sum_lower(kernel, t, policy)?;
    let upper = one_sided_sum_upper(kernel, t, policy)?;
    Ok(lower.scaled(right).plus(upper.scaled(left)))
}

/// `G[f](t)` for a jump with the given limits.
pub fn gibbs_function(
    kernel: &Kernel,
    jump: &JumpSpec,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    Ok(gibbs_value(kernel, jump.left_limit, jump.right_limit, t, policy)?.value)
}

/// `G[c](t) = c Σ φ(t-n)` for a constant signal.
pub fn constant_gibbs(kernel: &Kernel, c: f64, t: f64, policy: &TruncationPolicy) -> Result<f64> {
    Ok(full_lattice_sum(kernel, t, policy)?.scaled(c).value)
}

/// `G(t) = lower(t) - upper(t)` with its error bound.
pub fn reduced_gibbs_bounded(
    kernel: &Kernel,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    gibbs_value(kernel, -1.0, 1.0, t, policy)
}

pub fn reduced_gibbs(kernel: &Kernel, t: f64, policy: &TruncationPolicy) -> Result<f64> {
    Ok(reduced_gibbs_bounded(kernel, t, policy)?.value)
}

/// `(d, c)` with `d(left + c) = -1` and `d(right + c) = 1`.
pub fn normalize_jump(left: f64, right: f64) -> Result<(f64, f64)> {
    let jump = JumpSpec::new(left, right)?;
    let d = 2.0 / (jump.right_limit - jump.left_limit);
    let c = -(jump.left_limit + jump.right_limit) / 2.0;
    Ok((d, c))
}

/// Search parameters for [`detect_overshoot`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Right witnesses are sought in `(0, scan_radius]`, left ones in
    /// `[-scan_radius, 0)`.
    pub scan_radius: f64,
    pub grid_step: f64,
    pub refine_tolerance: f64,
    pub sum_policy: TruncationPolicy,
    /// Largest partition-of-unity defect accepted before scanning.
    pub pou_tolerance: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            scan_radius: 8.0,
            grid_step: 1.0 / 64.0,
            refine_tolerance: 1e-9,
            sum_policy: TruncationPolicy::default(),
            pou_tolerance: 1e-6,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.scan_radius) || !positive(self.grid_step) {
            return Err(Error::InvalidConfig(
                "scan_radius and grid_step must be positive".into(),
            ));
        }
        if self.grid_step >= self.scan_radius {
            return Err(Error::InvalidConfig(
                "grid_step must be smaller than scan_radius".into(),
            ));
        }
        if !positive(self.refine_tolerance) || !positive(self.pou_tolerance) {
            return Err(Error::InvalidConfig(
                "refine_tolerance and pou_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// No witness inside the scanned range.
    NoneFound,
    /// Compact kernel whose exact one-sided sums rule out any witness.
    NoneExact,
    Left,
    Right,
    Strong,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::NoneFound => "none-found",
            Classification::NoneExact => "none-exact",
            Classification::Left => "left",
            Classification::Right => "right",
            Classification::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvershootReport {
    pub classification: Classification,
    pub left_witness: Option<f64>,
    /// `Σ_{n>=0} φ(y-n)` at the left witness.
    pub left_sum_value: Option<f64>,
    pub right_witness: Option<f64>,
    /// `Σ_{n<0} φ(x-n)` at the right witness.
    pub right_sum_value: Option<f64>,
    /// Max of `G` over the scanned `x > 0`.
    pub max_gibbs_value: f64,
    /// Min of `G` over the scanned `y < 0`.
    pub min_gibbs_value: f64,
    #[serde(skip)]
    pub left_sum_bound: Option<f64>,
    #[serde(skip)]
    pub right_sum_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Witness {
    at: f64,
    sum: LatticeSumResult,
}

impl Witness {
    fn better_than(&self, other: &Witness) -> bool {
        self.sum.value < other.sum.value
            || (self.sum.value == other.sum.value && self.at.abs() < other.at.abs())
    }
}

/// Golden-section minimization of a one-sided sum on `[a, b]`.
fn golden_min(
    f: &(impl Fn(f64) -> Result<LatticeSumResult> + Sync),
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<Witness> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc.value <= fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc.value <= fd.value {
        Witness { at: c, sum: fc }
    } else {
        Witness { at: d, sum: fd }
    })
}

/// Most negative refined minimum of `values` over `points`, if it beats its
/// own error bound.
fn search_side(
    points: &[f64],
    values: &[LatticeSumResult],
    sum: &(impl Fn(f64) -> Result<LatticeSumResult> + Sync),
    step: f64,
    tol: f64,
) -> Result<Option<Witness>> {
    let n = points.len();
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = values[i].value;
            let left_ok = i == 0 || v < values[i - 1].value;
            let right_ok = i + 1 == n || v <= values[i + 1].value;
            left_ok && right_ok && v < 0.0
        })
        .collect();
    if let Some(lowest) = (0..n).min_by(|&i, &j| {
        values[i]
            .value
            .total_cmp(&values[j].value)
            .then(points[i].abs().total_cmp(&points[j].abs()))
    }) {
        if !candidates.contains(&lowest) {
            candidates.push(lowest);
        }
    }
    let refined: Vec<Witness> = candidates
        .par_iter()
        .map(|&i| {
            let grid = Witness {
                at: points[i],
                sum: values[i],
            };
            // bracket stays strictly on the scanned side of the origin
            let (lo, hi) = bracket(points, i, step);
            let w = golden_min(sum, lo, hi, tol)?;
            Ok(if w.better_than(&grid) { w } else { grid })
        })
        .collect::<Result<_>>()?;
    let mut best: Option<Witness> = None;
    for w in refined {
        if best.as_ref().is_none_or(|b| w.better_than(b)) {
            best = Some(w);
        }
    }
    Ok(best.filter(|w| w.sum.value < -w.sum.error_bound))
}

fn bracket(points: &[f64], i: usize, step: f64) -> (f64, f64) {
    let p = points[i];
    let (a, b) = if p > 0.0 {
        let lo = if i == 0 { p / 2.0 } else { points[i - 1] };
        let hi = points.get(i + 1).copied().unwrap_or(p);
        (lo, hi)
    } else {
        let hi = if i == 0 { p / 2.0 } else { points[i - 1] };
        let lo = points.get(i + 1).copied().unwrap_or(p);
        (lo, hi)
    };
    debug_assert!(b - a <= 2.0 * step + 1e-12);
    (a, b)
}

struct ScanOutcome {
    left: Option<Witness>,
    right: Option<Witness>,
    max_gibbs_value: f64,
    min_gibbs_value: f64,
}

fn scan_range(kernel: &Kernel, config: &ScanConfig, radius: f64) -> Result<ScanOutcome> {
    let policy = &config.sum_policy;
    let count = (radius / config.grid_step).floor() as usize;
    let right: Vec<f64> = (1..=count).map(|i| i as f64 * config.grid_step).collect();
    let left: Vec<f64> = right.iter().map(|x| -x).collect();

    let lower = |t: f64| one_sided_sum_lower(kernel, t, policy);
    let upper = |t: f64| one_sided_sum_upper(kernel, t, policy);
    let both = |t: f64| -> Result<(LatticeSumResult, LatticeSumResult)> {
        Ok((lower(t)?, upper(t)?))
    };
    let right_sums: Vec<_> = right.par_iter().map(|&x| both(x)).collect::<Result<_>>()?;
    let left_sums: Vec<_> = left.par_iter().map(|&y| both(y)).collect::<Result<_>>()?;

    let max_gibbs_value = right_sums
        .iter()
        .map(|(l, u)| l.value - u.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_gibbs_value = left_sums
        .iter()
        .map(|(l, u)| l.value - u.value)
        .fold(f64::INFINITY, f64::min);

    let right_values: Vec<_> = right_sums.iter().map(|(_, u)| *u).collect();
    let left_values: Vec<_> = left_sums.iter().map(|(l, _)| *l).collect();
    let tol = config.refine_tolerance;
    Ok(ScanOutcome {
        right: search_side(&right, &right_values, &upper, config.grid_step, tol)?,
        left: search_side(&left, &left_values, &lower, config.grid_step, tol)?,
        max_gibbs_value,
        min_gibbs_value,
    })
}

/// Search for overshoot witnesses on both sides of the origin.
///
/// The kernel must be a partition of unity to within
/// `config.pou_tolerance`. One-sided sums are sampled on the grid, each
/// negative local minimum (and the overall minimum) is refined by golden
/// section, and a point counts as a witness only when its sum is below minus
/// its truncation bound. For even kernels a witness on one side is reflected
/// through `x ↦ -x-1` and checked on the other side.
///
/// `NoneFound` only means the scanned range holds no witness. When a side
/// lacks a witness, compactly supported kernels are rescanned out to their
/// support radius plus one, past which both one-sided sums are constant, and
/// report `NoneExact` instead.
pub fn detect_overshoot(kernel: &Kernel, config: &ScanConfig) -> Result<OvershootReport> {
    config.validate()?;
    let policy = &config.sum_policy;
    let defect = partition_of_unity_defect(kernel, &unit_grid(64), policy)?;
    if defect.is_nan() || defect > config.pou_tolerance {
        return Err(Error::PartitionOfUnity {
            kernel: kernel.name().to_string(),
            defect,
            tolerance: config.pou_tolerance,
        });
    }
    let lower = |t: f64| one_sided_sum_lower(kernel, t, policy);
    let upper = |t: f64| one_sided_sum_upper(kernel, t, policy);
    let mut scan = scan_range(kernel, config, config.scan_radius)?;
    if scan.left.is_none() || scan.right.is_none() {
        if let Some(r) = kernel.support_radius() {
            if r + 1.0 > config.scan_radius {
                scan = scan_range(kernel, config, r + 1.0)?;
            }
        }
    }
    let ScanOutcome {
        left: mut left_w,
        right: mut right_w,
        max_gibbs_value,
        min_gibbs_value,
    } = scan;

    if kernel.is_even() {
        if let (Some(r), None) = (right_w, left_w) {
            let y = even_reflection_witness(r.at)?;
            let s = lower(y)?;
            if s.value < -s.error_bound {
                left_w = Some(Witness { at: y, sum: s });
            }
        }
        if let (None, Some(l)) = (right_w, left_w) {
            // y = -x-1 < -1 reflects to x = -y-1 > 0
            let x = -l.at - 1.0;
            if x > 0.0 {
                let s = upper(x)?;
                if s.value < -s.error_bound {
                    right_w = Some(Witness { at: x, sum: s });
                }
            }
        }
    }

    let classification = match (left_w.is_some(), right_w.is_some()) {
        (true, true) => Classification::Strong,
        (true, false) => Classification::Left,
        (false, true) => Classification::Right,
        (false, false) if kernel.support_radius().is_some() => Classification::NoneExact,
        (false, false) => Classification::NoneFound,
    };
    Ok(OvershootReport {
        classification,
        left_witness: left_w.map(|w| w.at),
        left_sum_value: left_w.map(|w| w.sum.value),
        right_witness: right_w.map(|w| w.at),
        right_sum_value: right_w.map(|w| w.sum.value),
        max_gibbs_value,
        min_gibbs_value,
        left_sum_bound: left_w.map(|w| w.sum.error_bound),
        right_sum_bound: right_w.map(|w| w.sum.error_bound),
    })
}

/// `-x-1`, the left witness matching a right witness `x` of an even kernel.
pub fn even_reflection_witness(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("reflection needs x > 0, got {x}")));
    }
    Ok(-x - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPointCheck {
    /// `G(1/2)`.
    pub lhs: f64,
    /// `2 φ(1/2)`.
    pub rhs: f64,
    pub error_bound: f64,
}

/// Compare `G(1/2)` with `2 φ(1/2)` for an even kernel.
pub fn half_point_identity_check(
    kernel: &Kernel,
    policy: &TruncationPolicy,
) -> Result<HalfPointCheck> {
    if !kernel.is_even() {
        return Err(Error::NotEven(kernel.name().to_string()));
    }
    let g = reduced_gibbs_bounded(kernel, 0.5, policy)?;
    Ok(HalfPointCheck {
        lhs: g.value,
        rhs: 2.0 * kernel.evaluate(0.5),
        error_bound: g.error_bound,
    })
}

/// `(t, G(t))` on `t = i·grid_step`, `|t| <= scan_radius`.
pub fn scan_gibbs_grid(kernel: &Kernel, config: &ScanConfig) -> Result<Vec<(f64, f64)>> {
    config.validate()?;
    let count = (config.scan_radius / config.grid_step).floor() as i64;
    (-count..=count)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * config.grid_step;
            Ok((t, reduced_gibbs(kernel, t, &config.sum_policy)?))
        })
        .collect()
}

/// `2 ∫_0^ξ sinc`, the limit profile of Fourier partial sums of a unit
/// square wave near its jump.
pub fn fourier_gibbs_constant(xi: f64) -> f64 {
    2.0 * quadrature::integrate(crate::kernel::sinc, 0.0, xi, 1e-12)
}
