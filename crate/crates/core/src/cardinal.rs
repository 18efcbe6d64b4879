//! Cardinal functions `L = Σ_n c_n ψ(· - n)` with `L(k) = δ_{0k}`.
//!
//! The coefficients invert the discrete symbol `σ(ξ) = Σ_k ψ(k) e^{-2πikξ}`
//! on a length-`P` DFT grid: `c = IDFT(1 / DFT(ψ(k)))`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{csv, g17};
use crate::gibbs::{detect_overshoot, ScanConfig};
use crate::kernel::{
    make_bspline, make_gaussian, make_inverse_multiquadric, make_poisson,
    partition_of_unity_defect, unit_grid, Decay, Kernel, TruncationPolicy,
};
use crate::sampling::SampledSignal;

/// A generating function `ψ` for the cardinal construction.
#[derive(Debug, Clone)]
pub struct Generator {
    kernel: Kernel,
}

impl Generator {
    /// Wrap a kernel; it needs a peak bound and an absolutely summable or
    /// compact decay class.
    pub fn from_kernel(kernel: Kernel) -> Result<Self> {
        if matches!(kernel.decay(), Decay::AlternatingEnvelope { .. }) {
            return Err(Error::Unsupported {
                kernel: kernel.name().to_string(),
                what: "use as a cardinal generator".into(),
            });
        }
        if kernel.peak().is_none() {
            return Err(Error::InvalidConfig(format!(
                "generator `{}` has no peak bound",
                kernel.name()
            )));
        }
        Ok(Self { kernel })
    }

    pub fn bspline(order: i64) -> Result<Self> {
        Self::from_kernel(make_bspline(order)?)
    }

    pub fn inverse_multiquadric(c: f64) -> Result<Self> {
        Self::from_kernel(make_inverse_multiquadric(c)?)
    }

    pub fn poisson() -> Self {
        Self::from_kernel(make_poisson()).expect("poisson kernel is a valid generator")
    }

    pub fn gaussian(alpha: f64) -> Result<Self> {
        Self::from_kernel(make_gaussian(alpha)?)
    }

    pub fn name(&self) -> &str {
        self.kernel.name()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.kernel.evaluate(x)
    }

    pub fn is_even(&self) -> bool {
        self.kernel.is_even()
    }

    /// Bound on `Σ_{|k|>r} |ψ(k)|`.
    pub fn integer_samples_decay(&self, r: usize) -> f64 {
        self.spatial_decay(r)
    }

    /// Bound on `Σ_{|n|>r} |ψ(t - n)|` for `t ∈ [0, 1]`.
    pub fn spatial_decay(&self, r: usize) -> f64 {
        self.kernel.lattice_tail_bound(r).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolData {
    pub period: usize,
    /// `Σ_{|k|<=sample_radius} ψ(k) e^{-2πikj/P}` for `j = 0..P`.
    pub dft_values: Vec<Complex64>,
    pub min_modulus: f64,
    pub sample_radius: usize,
    /// Bound on the omitted `Σ_{|k|>sample_radius} |ψ(k)|`.
    pub sample_tail: f64,
}

pub const DEFAULT_SYMBOL_FLOOR: f64 = 1e-8;

/// Discrete symbol of the integer samples with the default floor.
pub fn compute_symbol(
    generator: &Generator,
    period: usize,
    policy: &TruncationPolicy,
) -> Result<SymbolData> {
    compute_symbol_with_floor(generator, period, policy, DEFAULT_SYMBOL_FLOOR)
}

/// Samples are taken out to the radius where their tail meets the policy
/// target, but never past `P/2 - 1`, so no sample wraps around the period.
pub fn compute_symbol_with_floor(
    generator: &Generator,
    period: usize,
    policy: &TruncationPolicy,
    floor: f64,
) -> Result<SymbolData> {
    if period < 64 || !period.is_power_of_two() {
        return Err(Error::InvalidConfig(format!(
            "period must be a power of two >= 64, got {period}"
        )));
    }
    let cap = (period / 2 - 1).min(policy.max_radius());
    let mut k = 1usize;
    while k < cap && generator.integer_samples_decay(k) > policy.target_abs_error() {
        k = (k * 2).min(cap);
    }
    let sample_radius = k;
    let mut buf = vec![Complex64::new(0.0, 0.0); period];
    buf[0].re = generator.evaluate(0.0);
    for j in 1..=sample_radius {
        buf[j].re = generator.evaluate(j as f64);
        buf[period - j].re = generator.evaluate(-(j as f64));
    }
    FftPlanner::new().plan_fft_forward(period).process(&mut buf);
    let min_modulus = buf.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus.is_nan() || min_modulus < floor {
        return Err(Error::SymbolNotInvertible { min_modulus, floor });
    }
    Ok(SymbolData {
        period,
        dft_values: buf,
        min_modulus,
        sample_radius,
        sample_tail: generator.integer_samples_decay(sample_radius),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardinalConfig {
    pub period: usize,
    pub eval_radius: usize,
    pub defect_tolerance: f64,
    pub symbol_floor: f64,
    pub policy: TruncationPolicy,
}

impl Default for CardinalConfig {
    fn default() -> Self {
        Self {
            period: 4096,
            eval_radius: 512,
            defect_tolerance: 1e-8,
            symbol_floor: DEFAULT_SYMBOL_FLOOR,
            policy: TruncationPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub interpolation_defect: f64,
    pub pou_defect: f64,
    pub symbol_min: f64,
}

#[derive(Debug, Clone)]
pub struct CardinalFunction {
    generator: Generator,
    period: usize,
    coefficients: Vec<f64>,
    eval_radius: usize,
    defect_tolerance: f64,
    diagnostics: Diagnostics,
    kernel: Kernel,
}

impl CardinalFunction {
    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn eval_radius(&self) -> usize {
        self.eval_radius
    }

    /// `c_n` for `n ∈ [-P/2, P/2)`, in that order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `c_n`, zero outside `[-P/2, P/2)`.
    pub fn coefficient(&self, n: i64) -> f64 {
        let idx = n + (self.period / 2) as i64;
        if idx < 0 || idx >= self.period as i64 {
            0.0
        } else {
            self.coefficients[idx as usize]
        }
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Half-width of the region where coefficients and truncation are
    /// both trusted: `min(P/4, R/2)`.
    pub fn accuracy_radius(&self) -> f64 {
        (self.period / 4).min(self.eval_radius / 2) as f64
    }
}

fn invert_symbol(symbol: &SymbolData, even: bool) -> Vec<f64> {
    let p = symbol.period;
    let mut buf: Vec<Complex64> = symbol.dft_values.iter().map(|z| z.inv()).collect();
    FftPlanner::new().plan_fft_inverse(p).process(&mut buf);
    let scale = 1.0 / p as f64;
    let half = p / 2;
    // reorder from DFT index to n = -P/2 .. P/2-1
    let mut c: Vec<f64> = (0..p)
        .map(|i| buf[(i + half) % p].re * scale)
        .collect();
    if even {
        for n in 1..half {
            let avg = 0.5 * (c[half + n] + c[half - n]);
            c[half + n] = avg;
            c[half - n] = avg;
        }
    }
    c
}

fn build(generator: &Generator, config: &CardinalConfig, period: usize) -> Result<CardinalFunction> {
    let r = config.eval_radius;
    if r < 1 || r > period / 2 - 1 {
        return Err(Error::InvalidConfig(format!(
            "eval_radius must be in 1..{}, got {r}",
            period / 2
        )));
    }
    let symbol = compute_symbol_with_floor(generator, period, &config.policy, config.symbol_floor)?;
    let coefficients = invert_symbol(&symbol, generator.is_even());
    let half = period / 2;
    let kept = coefficients[half - r..=half + r].to_vec();
    let kernel = Kernel::shift_combination(
        format!("cardinal:{}", generator.name()),
        generator.kernel().clone(),
        -(r as i64),
        kept,
        generator.is_even(),
    )?;
    let check = (period / 4).min(r / 2) as i64;
    let interpolation_defect = (-check..=check)
        .into_par_iter()
        .map(|k| {
            let delta = if k == 0 { 1.0 } else { 0.0 };
            (kernel.evaluate(k as f64) - delta).abs()
        })
        .reduce(|| 0.0, f64::max);
    let pou_defect = partition_of_unity_defect(&kernel, &unit_grid(64), &config.policy)?;
    Ok(CardinalFunction {
        generator: generator.clone(),
        period,
        coefficients,
        eval_radius: r,
        defect_tolerance: config.defect_tolerance,
        diagnostics: Diagnostics {
            interpolation_defect,
            pou_defect,
            symbol_min: symbol.min_modulus,
        },
        kernel,
    })
}

/// Construct `L_ψ`, doubling the period once when the interpolation defect
/// misses `config.defect_tolerance`.
pub fn cardinal_from_generator(
    generator: &Generator,
    config: &CardinalConfig,
) -> Result<CardinalFunction> {
    if config.defect_tolerance.is_nan() || config.defect_tolerance <= 0.0 {
        return Err(Error::InvalidConfig("defect_tolerance must be positive".into()));
    }
    let first = build(generator, config, config.period)?;
    if first.diagnostics.interpolation_defect <= config.defect_tolerance {
        return Ok(first);
    }
    let second = build(generator, config, config.period * 2)?;
    if second.diagnostics.interpolation_defect <= config.defect_tolerance {
        return Ok(second);
    }
    Err(Error::Accuracy {
        defect: second.diagnostics.interpolation_defect,
        tolerance: config.defect_tolerance,
        period: second.period,
        radius: second.eval_radius,
    })
}

/// `Σ_{|n|<=R} c_n ψ(t - n)` for `|t|` within the accuracy radius.
pub fn eval_cardinal(l: &CardinalFunction, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    if t.abs() > l.accuracy_radius() {
        return Err(Error::Domain(format!(
            "|t| = {} exceeds the accuracy radius {}",
            t.abs(),
            l.accuracy_radius()
        )));
    }
    Ok(l.kernel.evaluate(t))
}

/// The cardinal function as a kernel for the gibbs and sampling modules.
pub fn as_kernel(l: &CardinalFunction) -> Result<Kernel> {
    if l.diagnostics.interpolation_defect.is_nan() || l.diagnostics.interpolation_defect > l.defect_tolerance {
        return Err(Error::Accuracy {
            defect: l.diagnostics.interpolation_defect,
            tolerance: l.defect_tolerance,
            period: l.period,
            radius: l.eval_radius,
        });
    }
    Ok(l.kernel.clone())
}

/// `a_n = Σ_{|k|<=R} c_k f((n-k)/W)` for `n` in `n_range`, so that
/// `Σ a_n ψ(Wt - n) = Σ f(n/W) L(Wt - n)`.
pub fn generator_coefficients(
    f: &SampledSignal,
    w: f64,
    l: &CardinalFunction,
    n_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<f64>> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "sampling rate must be positive, got {w}"
        )));
    }
    let r = l.eval_radius as i64;
    Ok(n_range
        .map(|n| {
            let mut acc = 0.0;
            for k in -r..=r {
                acc += l.coefficient(k) * f.evaluate((n - k) as f64 / w);
            }
            acc
        })
        .collect())
}

/// `n,c_n` rows for `n ∈ [-P/2, P/2)`.
pub fn coefficients_csv(l: &CardinalFunction) -> String {
    let half = (l.period / 2) as i64;
    csv(
        &["n", "c_n"],
        l.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| vec![(i as i64 - half).to_string(), g17(*c)]),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub l_half: f64,
    pub gap_to_sinc: f64,
    /// A classification tag, or `error:<kind>` when the row failed.
    pub classification: String,
    pub max_gibbs_value: f64,
}

fn sweep_row(parameter: f64, generator: &Generator, card: &CardinalConfig, scan: &ScanConfig) -> SweepRow {
    let mut row = SweepRow {
        parameter,
        l_half: f64::NAN,
        gap_to_sinc: f64::NAN,
        classification: String::new(),
        max_gibbs_value: f64::NAN,
    };
    let result = (|| -> Result<()> {
        if !generator.is_even() {
            return Err(Error::NotEven(generator.name().to_string()));
        }
        let l = cardinal_from_generator(generator, card)?;
        row.l_half = eval_cardinal(&l, 0.5)?;
        row.gap_to_sinc = (row.l_half - 2.0 / PI).abs();
        let report = detect_overshoot(&as_kernel(&l)?, scan)?;
        row.classification = report.classification.as_str().to_string();
        row.max_gibbs_value = report.max_gibbs_value;
        Ok(())
    })();
    if let Err(e) = result {
        row.classification = format!("error:{}", e.kind());
    }
    row
}

/// One row per family member, in input order; failures are recorded in the
/// row and do not stop the sweep.
pub fn family_sweep(
    family: &[(f64, Generator)],
    card: &CardinalConfig,
    scan: &ScanConfig,
) -> Vec<SweepRow> {
    family
        .par_iter()
        .map(|(p, g)| sweep_row(*p, g, card, scan))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv(
        &[
            "parameter",
            "L_half",
            "gap_to_sinc",
            "classification",
            "max_gibbs_value",
        ],
        rows.iter().map(|r| {
            vec![
                g17(r.parameter),
                g17(r.l_half),
                g17(r.gap_to_sinc),
                r.classification.clone(),
                g17(r.max_gibbs_value),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn hat_symbol_is_one() {
        let s = compute_symbol(&Generator::bspline(2).unwrap(), 64, &pol()).unwrap();
        for z in &s.dft_values {
            assert!((z.re - 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
        }
        assert_eq!(s.min_modulus, 1.0);
    }

    #[test]
    fn cubic_symbol_at_nyquist() {
        let s = compute_symbol(&Generator::bspline(4).unwrap(), 128, &pol()).unwrap();
        assert!((s.dft_values[64].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.dft_values[0].re - 1.0).abs() < 1e-15);
        assert!((s.min_modulus - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_period() {
        let g = Generator::bspline(4).unwrap();
        assert!(compute_symbol(&g, 100, &pol()).is_err());
        assert!(compute_symbol(&g, 32, &pol()).is_err());
    }

    #[test]
    fn hat_is_its_own_cardinal() {
        let l = cardinal_from_generator(&Generator::bspline(2).unwrap(), &CardinalConfig::default())
            .unwrap();
        for n in -2048..2048 {
            let expected = if n == 0 { 1.0 } else { 0.0 };
            assert!((l.coefficient(n) - expected).abs() < 1e-12);
        }
        assert!((eval_cardinal(&l, 0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(eval_cardinal(&l, 300.0).is_err());
    }

    #[test]
    fn cubic_cardinal_center_coefficient() {
        let l = cardinal_from_generator(&Generator::bspline(4).unwrap(), &CardinalConfig::default())
            .unwrap();
        assert!((l.coefficient(0) - 3f64.sqrt()).abs() < 1e-12);
        assert!(l.diagnostics().interpolation_defect < 1e-12);
        assert!(l.diagnostics().pou_defect < 1e-12);
        assert!((eval_cardinal(&l, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_coefficients_are_symmetric() {
        let l = cardinal_from_generator(&Generator::bspline(7).unwrap(), &CardinalConfig::default())
            .unwrap();
        for n in 1..2048 {
            assert_eq!(l.coefficient(n), l.coefficient(-n));
        }
    }

    #[test]
    fn steep_invmq_symbol_is_rejected() {
        let g = Generator::inverse_multiquadric(8.0).unwrap();
        assert!(matches!(
            cardinal_from_generator(&g, &CardinalConfig::default()),
            Err(Error::SymbolNotInvertible { .. })
        ));
    }

    #[test]
    fn csv_headers() {
        let l = cardinal_from_generator(&Generator::bspline(2).unwrap(), &CardinalConfig::default())
            .unwrap();
        let s = coefficients_csv(&l);
        assert!(s.starts_with("n,c_n\n-2048,"));
        assert_eq!(s.lines().count(), 4097);
        let rows = vec![SweepRow {
            parameter: 3.0,
            l_half: 0.5,
            gap_to_sinc: 0.25,
            classification: "strong".into(),
            max_gibbs_value: 1.0,
        }];
        assert_eq!(
            sweep_csv(&rows),
            "parameter,L_half,gap_to_sinc,classification,max_gibbs_value\n3,0.5,0.25,strong,1\n"
        );
    }

    #[test]
    fn sinc_is_not_a_generator() {
        assert!(Generator::from_kernel(crate::kernel::make_sinc()).is_err());
    }
}
