/// Largest supported B-spline order.
pub const MAX_ORDER: usize = 64;

/// Centered cardinal B-spline `M_n(x)`, the `n`-fold convolution of the
/// indicator of `[-1/2, 1/2)`.
///
/// Evaluated through the knot recurrence
/// `M_n(x) = [(n/2 + x) M_{n-1}(x + 1/2) + (n/2 - x) M_{n-1}(x - 1/2)] / (n - 1)`,
/// unrolled bottom-up so one evaluation costs `O(n^2)` flops. `M_1` uses the
/// half-open convention: 1 at `-1/2`, 0 at `+1/2`.
pub(crate) fn centered_bspline(order: usize, x: f64) -> f64 {
    debug_assert!((1..=MAX_ORDER).contains(&order));
    // Shift to the uncentered spline N_n(u) supported on [0, n).
    let u = x + order as f64 / 2.0;
    if !(u >= 0.0 && u < order as f64) {
        return 0.0;
    }
    let cell = u.floor() as usize;
    // vals[i] holds N_k(u - i); only i in (cell - k, cell] is nonzero.
    let mut vals = [0.0_f64; MAX_ORDER];
    vals[cell] = 1.0;
    for k in 1..order {
        let lo = cell.saturating_sub(k);
        let kf = k as f64;
        for i in lo..=cell {
            let v = u - i as f64;
            let right = if i + 1 < order { vals[i + 1] } else { 0.0 };
            vals[i] = (v * vals[i] + (kf + 1.0 - v) * right) / kf;
        }
    }
    vals[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_function() {
        assert_eq!(centered_bspline(2, 0.0), 1.0);
        assert_eq!(centered_bspline(2, 1.0), 0.0);
        assert_eq!(centered_bspline(2, -1.0), 0.0);
        assert!((centered_bspline(2, 0.5) - 0.5).abs() < 1e-15);
        assert!((centered_bspline(2, -0.25) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn box_is_half_open() {
        assert_eq!(centered_bspline(1, -0.5), 1.0);
        assert_eq!(centered_bspline(1, 0.5), 0.0);
        assert_eq!(centered_bspline(1, 0.0), 1.0);
    }

    #[test]
    fn cubic_integer_samples() {
        assert!((centered_bspline(4, 0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((centered_bspline(4, 1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((centered_bspline(4, -1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(centered_bspline(4, 2.0), 0.0);
    }

    #[test]
    fn quadratic_closed_form() {
        // M_3(x) = 3/4 - x^2 on |x| <= 1/2, (3/2 - |x|)^2 / 2 on 1/2 <= |x| <= 3/2
        for i in -40..=40 {
            let x = i as f64 * 0.04;
            let expected = if x.abs() <= 0.5 {
                0.75 - x * x
            } else if x.abs() <= 1.5 {
                0.5 * (1.5 - x.abs()).powi(2)
            } else {
                0.0
            };
            assert!((centered_bspline(3, x) - expected).abs() < 1e-15, "x={x}");
        }
    }
}
