use super::{BoundKind, Decay, Kernel, LatticeSumResult, ShiftCombination, TruncationPolicy};
use crate::error::{Error, Result};

/// `Σ_{k >= k0} φ(t + s·k)` with `s = ±1`.
fn ray_sum(
    kernel: &Kernel,
    t: f64,
    s: f64,
    k0: i64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    let target = policy.target_abs_error();
    let max_radius = policy.max_radius();
    match kernel.decay() {
        Decay::CompactSupport { radius } => {
            // |t + s k| <= radius
            let (lo, hi) = if s > 0.0 {
                ((-radius - t).ceil(), (radius - t).floor())
            } else {
                ((t - radius).ceil(), (t + radius).floor())
            };
            let lo = (lo as i64).max(k0);
            let hi = hi as i64;
            let mut acc = 0.0;
            let mut terms = 0;
            for k in lo..=hi {
                acc += kernel.evaluate(t + s * k as f64);
                terms += 1;
            }
            Ok(LatticeSumResult::exact(acc, terms))
        }
        Decay::AbsolutelySummable {
            tail_bound,
            kind,
            monotone_tail,
        } => {
            if let Some(mt) = monotone_tail {
                return monotone_ray(kernel, mt, t, s, k0, target, max_radius, *kind);
            }
            let mut r = 1usize;
            while tail_bound(r) > target {
                if r >= max_radius {
                    return Err(Error::TruncationBudget {
                        kernel: kernel.name().to_string(),
                        target,
                        max_radius,
                        best_bound: tail_bound(max_radius),
                    });
                }
                r = (r * 2).min(max_radius);
            }
            // shrink to the smallest sufficient radius
            let (mut lo_r, mut hi_r) = (r / 2, r);
            while hi_r - lo_r > 1 {
                let mid = (lo_r + hi_r) / 2;
                if tail_bound(mid) <= target {
                    hi_r = mid;
                } else {
                    lo_r = mid;
                }
            }
            let r = if tail_bound(lo_r.max(1)) <= target { lo_r.max(1) } else { hi_r };
            let m0 = t.floor();
            let rf = r as f64;
            let (lo, hi) = if s > 0.0 {
                (-rf - m0, rf - m0)
            } else {
                (m0 - rf, m0 + rf)
            };
            let lo = (lo as i64).max(k0);
            let hi = hi as i64;
            let mut acc = 0.0;
            let mut terms = 0;
            for k in lo..=hi {
                acc += kernel.evaluate(t + s * k as f64);
                terms += 1;
            }
            Ok(LatticeSumResult {
                value: acc,
                error_bound: tail_bound(r),
                terms_used: terms,
                bound_kind: *kind,
            })
        }
        Decay::AlternatingEnvelope {
            envelope,
            regular_from,
        } => {
            let mut d = regular_from.max(8.0);
            while envelope(d) / (4.0 * d) > target && d < max_radius as f64 {
                d *= 2.0;
            }
            let mut acc = 0.0;
            let mut k = k0;
            let mut best = f64::INFINITY;
            loop {
                let kk = ((d - s * t).ceil() as i64).max(k0);
                while k < kk {
                    acc += kernel.evaluate(t + s * k as f64);
                    k += 1;
                }
                let x = t + s * kk as f64;
                let (v0, v1) = (kernel.evaluate(x), kernel.evaluate(x + s));
                if v0 * v1 > 0.0 {
                    return Err(Error::Unsupported {
                        kernel: kernel.name().to_string(),
                        what: "alternating tail summation (tail terms do not alternate)".into(),
                    });
                }
                let (a0, a1) = (v0.abs(), v1.abs());
                let dn = a0 - a1;
                if dn >= 0.0 {
                    let bound = dn / 4.0;
                    best = best.min(bound);
                    if bound <= target {
                        let tail = v0.signum() * (a0 / 2.0 + dn / 4.0);
                        let tail = if v0 == 0.0 { 0.0 } else { tail };
                        return Ok(LatticeSumResult {
                            value: acc + tail,
                            error_bound: bound,
                            terms_used: (kk - k0).max(0) as usize + 2,
                            bound_kind: BoundKind::Rigorous,
                        });
                    }
                }
                if d >= max_radius as f64 {
                    return Err(Error::TruncationBudget {
                        kernel: kernel.name().to_string(),
                        target,
                        max_radius,
                        best_bound: best,
                    });
                }
                d = (d * 2.0).min(max_radius as f64);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn monotone_ray(
    kernel: &Kernel,
    mt: &super::MonotoneTail,
    t: f64,
    s: f64,
    k0: i64,
    target: f64,
    max_radius: usize,
    kind: BoundKind,
) -> Result<LatticeSumResult> {
    let integral = if s > 0.0 {
        &mt.right_integral
    } else {
        &mt.left_integral
    };
    let mut d = (mt.from + 0.5).max(4.0);
    let mut acc = 0.0;
    let mut k = k0;
    let mut best = f64::INFINITY;
    loop {
        let kk = ((d - s * t).ceil() as i64).max(k0);
        while k < kk {
            acc += kernel.evaluate(t + s * k as f64);
            k += 1;
        }
        let a = s * t + kk as f64;
        let g_a = kernel.evaluate(s * a);
        // Σ_{j>=0} g(a+j) ∈ [I(a) + g(a)/2, I(a - 1/2)]
        let lo = integral(a) + g_a / 2.0;
        let hi = integral(a - 0.5);
        let half = (hi - lo).max(0.0) / 2.0;
        best = best.min(half);
        if half <= target {
            return Ok(LatticeSumResult {
                value: acc + (lo + hi) / 2.0,
                error_bound: half,
                terms_used: (kk - k0).max(0) as usize + 1,
                bound_kind: kind,
            });
        }
        if d >= max_radius as f64 {
            return Err(Error::TruncationBudget {
                kernel: kernel.name().to_string(),
                target,
                max_radius,
                best_bound: best,
            });
        }
        d = (d * 2.0).min(max_radius as f64);
    }
}

enum Side {
    Lower,
    Upper,
}

fn combination_sum(
    comb: &ShiftCombination,
    t: f64,
    side: Side,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    let base = comb.base();
    let sub = policy.with_target(policy.target_abs_error() / comb.abs_sum().max(1.0));
    let base_sum = match side {
        Side::Lower => one_sided_sum_lower(base, t, &sub)?,
        Side::Upper => one_sided_sum_upper(base, t, &sub)?,
    };
    let first = comb.first_index();
    let last = comb.last_index();
    // cum_pos[j] = Σ_{m=0}^{j-1} ψ(t - m); cum_neg[j] = Σ_{m=-j}^{-1} ψ(t - m)
    let npos = last.max(0) as usize;
    let nneg = (-first).max(0) as usize;
    let mut cum_pos = Vec::with_capacity(npos + 1);
    cum_pos.push(0.0);
    for j in 0..npos {
        let v = cum_pos[j] + base.evaluate(t - j as f64);
        cum_pos.push(v);
    }
    let mut cum_neg = Vec::with_capacity(nneg + 1);
    cum_neg.push(0.0);
    for j in 0..nneg {
        let v = cum_neg[j] + base.evaluate(t + (j + 1) as f64);
        cum_neg.push(v);
    }
    let sign = match side {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    let mut acc = 0.0;
    for (i, c) in comb.coefficients().iter().enumerate() {
        let n = first + i as i64;
        let p = if n > 0 {
            cum_pos[n as usize]
        } else if n < 0 {
            -cum_neg[(-n) as usize]
        } else {
            0.0
        };
        acc += c * (base_sum.value + sign * p);
    }
    Ok(LatticeSumResult {
        value: acc,
        error_bound: comb.abs_sum() * base_sum.error_bound,
        terms_used: base_sum.terms_used + npos + nneg,
        bound_kind: base_sum.bound_kind,
    })
}

/// `Σ_{n >= 0} φ(t - n)`.
pub fn one_sided_sum_lower(
    kernel: &Kernel,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    if let Some(c) = kernel.combination() {
        return combination_sum(c, t, Side::Lower, policy);
    }
    ray_sum(kernel, t, -1.0, 0, policy)
}

/// `Σ_{n < 0} φ(t - n)`.
pub fn one_sided_sum_upper(
    kernel: &Kernel,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    if let Some(c) = kernel.combination() {
        return combination_sum(c, t, Side::Upper, policy);
    }
    ray_sum(kernel, t, 1.0, 1, policy)
}

/// `Σ_n φ(t - n)`; a symmetric limit for alternating kernels.
pub fn full_lattice_sum(
    kernel: &Kernel,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<LatticeSumResult> {
    if let Some(c) = kernel.combination() {
        let sub = policy.with_target(policy.target_abs_error() / c.sum().abs().max(1.0));
        return Ok(full_lattice_sum(c.base(), t, &sub)?.scaled(c.sum()));
    }
    let half = match kernel.decay() {
        Decay::CompactSupport { .. } => *policy,
        _ => policy.with_target(policy.target_abs_error() / 2.0),
    };
    Ok(one_sided_sum_lower(kernel, t, &half)?.plus(one_sided_sum_upper(kernel, t, &half)?))
}

/// `{ j/n : 0 <= j < n }`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// `max_t |Σ_n φ(t - n) - 1|` over `grid`.
pub fn partition_of_unity_defect(
    kernel: &Kernel,
    grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let mut worst: f64 = 0.0;
    for &t in grid {
        let s = full_lattice_sum(kernel, t, policy)?;
        worst = worst.max((s.value - 1.0).abs());
    }
    Ok(worst)
}
