//! Test functions `phi(u, lambda)` as finite sums of separable products
//! `scale * w(u) * psi(lambda)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::SmoothingKernel;
use crate::numeric::{sampled_variation, QuadRule};
use crate::process::{CoefficientCurve, CurveSpec};
use crate::whittle::SpectralFamily;

/// Fine periodic grid used for the smooth model-component parts.
const COMPONENT_GRID: usize = 4097;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum TimeWeightSpec {
    Constant { value: f64 },
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    PiecewiseLinear { breakpoints: Vec<f64>, values: Vec<f64> },
    Polynomial { coefficients: Vec<f64> },
    Kernel { kernel: SmoothingKernel, center: f64, bandwidth: f64 },
}

/// Time part `w(u)` of a separable term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TimeWeightSpec", into = "TimeWeightSpec")]
pub enum TimeWeight {
    Curve(CoefficientCurve),
    /// `(1/b) K((u - c)/b)` with support inside `[0, 1]`.
    Kernel { kernel: SmoothingKernel, center: f64, bandwidth: f64 },
}

impl Default for TimeWeight {
    fn default() -> Self {
        TimeWeight::Curve(CoefficientCurve::constant(1.0))
    }
}

impl TryFrom<TimeWeightSpec> for TimeWeight {
    type Error = Error;
    fn try_from(spec: TimeWeightSpec) -> Result<Self> {
        let curve = |s: CurveSpec| CoefficientCurve::new(s).map(TimeWeight::Curve);
        match spec {
            TimeWeightSpec::Constant { value } => curve(CurveSpec::Constant { value }),
            TimeWeightSpec::PiecewiseConstant { breakpoints, values } => {
                curve(CurveSpec::PiecewiseConstant { breakpoints, values })
            }
            TimeWeightSpec::PiecewiseLinear { breakpoints, values } => {
                curve(CurveSpec::PiecewiseLinear { breakpoints, values })
            }
            TimeWeightSpec::Polynomial { coefficients } => curve(CurveSpec::Polynomial { coefficients }),
            TimeWeightSpec::Kernel { kernel, center, bandwidth } => TimeWeight::kernel(kernel, center, bandwidth),
        }
    }
}

impl From<TimeWeight> for TimeWeightSpec {
    fn from(w: TimeWeight) -> Self {
        match w {
            TimeWeight::Curve(c) => match CurveSpec::from(c) {
                CurveSpec::Constant { value } => TimeWeightSpec::Constant { value },
                CurveSpec::PiecewiseConstant { breakpoints, values } => {
                    TimeWeightSpec::PiecewiseConstant { breakpoints, values }
                }
                CurveSpec::PiecewiseLinear { breakpoints, values } => {
                    TimeWeightSpec::PiecewiseLinear { breakpoints, values }
                }
                CurveSpec::Polynomial { coefficients } => TimeWeightSpec::Polynomial { coefficients },
            },
            TimeWeight::Kernel { kernel, center, bandwidth } => TimeWeightSpec::Kernel { kernel, center, bandwidth },
        }
    }
}

impl TimeWeight {
    pub fn kernel(kernel: SmoothingKernel, center: f64, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && center - 0.5 * bandwidth >= -1e-12 && center + 0.5 * bandwidth <= 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "time kernel support [{}, {}] must lie inside [0, 1]",
                center - 0.5 * bandwidth,
                center + 0.5 * bandwidth
            )));
        }
        Ok(TimeWeight::Kernel { kernel, center, bandwidth })
    }

    /// `w(u)` on `[0, 1]`, zero elsewhere.
    pub fn eval(&self, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        match self {
            TimeWeight::Curve(c) => c.eval(u),
            TimeWeight::Kernel { kernel, center, bandwidth } => kernel.eval((u - center) / bandwidth) / bandwidth,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TimeWeight::Curve(c) => c.breakpoints(),
            TimeWeight::Kernel { kernel, center, bandwidth } => {
                kernel.kinks().iter().map(|x| center + bandwidth * x).collect()
            }
        }
    }

    pub fn variation(&self) -> f64 {
        match self {
            TimeWeight::Curve(c) => c.total_variation(),
            TimeWeight::Kernel { kernel, bandwidth, .. } => kernel.variation() / bandwidth,
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            TimeWeight::Curve(c) => c.sup_abs(),
            TimeWeight::Kernel { kernel, bandwidth, .. } => kernel.peak() / bandwidth,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeWeight::Curve(c) if c.is_constant())
    }
}

/// `d f_theta^{-1}(lambda) / d theta_component` for a parametric family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelComponent {
    pub family: SpectralFamily,
    pub theta: Vec<f64>,
    pub component: usize,
}

impl ModelComponent {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.family.grad_inv_density(&self.theta, lambda)[self.component]
    }

    fn samples(&self) -> Vec<f64> {
        QuadRule::periodic_trapezoid(COMPONENT_GRID).nodes.iter().map(|&l| self.eval(l)).collect()
    }
}

/// Frequency part `psi(lambda)` of a separable term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrequencyPart {
    Cosine { lag: i64 },
    Sine { lag: i64 },
    /// Indicator of `[lo, hi]`.
    Indicator { lo: f64, hi: f64 },
    /// `(1/b) K((lambda - c)/b)` with support inside `[-pi, pi]`.
    Kernel { kernel: SmoothingKernel, center: f64, bandwidth: f64 },
    /// Linear interpolation through the samples, zero outside the node hull.
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
    ModelComponent(ModelComponent),
}

fn in_band(lambda: f64) -> bool {
    (-PI..=PI).contains(&lambda)
}

/// `int_0^1 e^{z s} ds` and `int_0^1 s e^{z s} ds`.
fn exp_moments(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let (mut e1, mut e2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut zpow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for m in 0..24 {
            e1 += zpow / (fact * (m as f64 + 1.0));
            e2 += zpow / (fact * (m as f64 + 2.0));
            zpow *= z;
            fact *= m as f64 + 1.0;
        }
        (e1, e2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    }
}

impl FrequencyPart {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self {
            FrequencyPart::Cosine { .. } | FrequencyPart::Sine { .. } => Ok(()),
            FrequencyPart::Indicator { lo, hi } => {
                if !(*lo >= -PI && lo < hi && *hi <= PI) {
                    return bad(format!("indicator [{lo}, {hi}] must satisfy -pi <= lo < hi <= pi"));
                }
                Ok(())
            }
            FrequencyPart::Kernel { center, bandwidth, .. } => {
                let (a, b) = (center - 0.5 * bandwidth, center + 0.5 * bandwidth);
                if !(*bandwidth > 0.0 && a >= -PI - 1e-12 && b <= PI + 1e-12) {
                    return bad(format!("frequency kernel support [{a}, {b}] must lie inside [-pi, pi]"));
                }
                Ok(())
            }
            FrequencyPart::Sampled { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return bad("sampled frequency part needs >= 2 nodes and one value per node".into());
                }
                if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] < -PI || nodes[nodes.len() - 1] > PI {
                    return bad("sampled nodes must be strictly increasing inside [-pi, pi]".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("sampled values must be finite".into());
                }
                Ok(())
            }
            FrequencyPart::ModelComponent(mc) => {
                mc.family.check(&mc.theta)?;
                if mc.component >= mc.family.dim() {
                    return bad(format!("component {} out of range for dimension {}", mc.component, mc.family.dim()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if !in_band(lambda) {
            return 0.0;
        }
        match self {
            FrequencyPart::Cosine { lag } => (lambda * *lag as f64).cos(),
            FrequencyPart::Sine { lag } => (lambda * *lag as f64).sin(),
            FrequencyPart::Indicator { lo, hi } => f64::from(u8::from(lambda >= *lo && lambda <= *hi)),
            FrequencyPart::Kernel { kernel, center, bandwidth } => kernel.eval((lambda - center) / bandwidth) / bandwidth,
            FrequencyPart::Sampled { nodes, values } => {
                if lambda < nodes[0] || lambda > nodes[nodes.len() - 1] {
                    return 0.0;
                }
                let i = nodes.partition_point(|&x| x <= lambda).clamp(1, nodes.len() - 1);
                let (x0, x1) = (nodes[i - 1], nodes[i]);
                values[i - 1] + (values[i] - values[i - 1]) * (lambda - x0) / (x1 - x0)
            }
            FrequencyPart::ModelComponent(mc) => mc.eval(lambda),
        }
    }

    /// Smooth and `2 pi`-periodic: integrated with the periodic trapezoid rule.
    pub fn is_periodic_smooth(&self) -> bool {
        matches!(
            self,
            FrequencyPart::Cosine { .. } | FrequencyPart::Sine { .. } | FrequencyPart::ModelComponent(_)
        )
    }

    /// Interval outside of which `psi` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            FrequencyPart::Indicator { lo, hi } => (*lo, *hi),
            FrequencyPart::Kernel { center, bandwidth, .. } => {
                ((center - 0.5 * bandwidth).max(-PI), (center + 0.5 * bandwidth).min(PI))
            }
            FrequencyPart::Sampled { nodes, .. } => (nodes[0], nodes[nodes.len() - 1]),
            _ => (-PI, PI),
        }
    }

    /// Points in `[-pi, pi]` where `psi` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            FrequencyPart::Indicator { lo, hi } => vec![*lo, *hi],
            FrequencyPart::Kernel { kernel, center, bandwidth } => {
                kernel.kinks().iter().map(|x| center + bandwidth * x).collect()
            }
            FrequencyPart::Sampled { nodes, .. } => nodes.clone(),
            _ => vec![],
        }
    }

    /// Nonzero Fourier coefficients are confined to these lags.
    pub fn lag_support(&self) -> Option<Vec<i64>> {
        match self {
            FrequencyPart::Cosine { lag } | FrequencyPart::Sine { lag } => {
                let k = lag.abs();
                Some(if k == 0 { vec![0] } else { vec![-k, k] })
            }
            _ => None,
        }
    }

    /// `int psi(lambda) e^{i lambda k} d lambda`.
    pub fn fourier(&self, k: i64) -> Complex64 {
        self.fourier_many(&[k])[0]
    }

    pub fn fourier_many(&self, ks: &[i64]) -> Vec<Complex64> {
        match self {
            FrequencyPart::ModelComponent(mc) => {
                let rule = QuadRule::periodic_trapezoid(COMPONENT_GRID);
                let samples = mc.samples();
                ks.iter()
                    .map(|&k| {
                        let terms: Vec<Complex64> = rule
                            .nodes
                            .iter()
                            .zip(&rule.weights)
                            .zip(&samples)
                            .map(|((&l, &w), &s)| Complex64::from_polar(w * s, l * k as f64))
                            .collect();
                        crate::numeric::pairwise_sum_complex(&terms)
                    })
                    .collect()
            }
            _ => ks.iter().map(|&k| self.fourier_closed(k)).collect(),
        }
    }

    fn fourier_closed(&self, k: i64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let kf = k as f64;
        match self {
            FrequencyPart::Cosine { lag } => {
                if *lag == 0 {
                    if k == 0 {
                        Complex64::new(2.0 * PI, 0.0)
                    } else {
                        zero
                    }
                } else if k.abs() == lag.abs() {
                    Complex64::new(PI, 0.0)
                } else {
                    zero
                }
            }
            FrequencyPart::Sine { lag } => {
                if *lag == 0 || k.abs() != lag.abs() {
                    zero
                } else {
                    // sin(l x) e^{ikx} integrates to i pi sign(l k)
                    Complex64::new(0.0, PI * (lag.signum() * k.signum()) as f64)
                }
            }
            FrequencyPart::Indicator { lo, hi } => {
                if k == 0 {
                    Complex64::new(hi - lo, 0.0)
                } else {
                    let i_k = Complex64::new(0.0, kf);
                    (Complex64::from_polar(1.0, kf * hi) - Complex64::from_polar(1.0, kf * lo)) / i_k
                }
            }
            FrequencyPart::Kernel { kernel, center, bandwidth } => {
                Complex64::from_polar(kernel.fourier(kf * bandwidth), kf * center)
            }
            FrequencyPart::Sampled { nodes, values } => {
                let mut acc = zero;
                for i in 1..nodes.len() {
                    let (x0, x1) = (nodes[i - 1], nodes[i]);
                    let (y0, y1) = (values[i - 1], values[i]);
                    let len = x1 - x0;
                    let (e1, e2) = exp_moments(Complex64::new(0.0, kf * len));
                    acc += Complex64::from_polar(len, kf * x0) * (e1 * y0 + e2 * (y1 - y0));
                }
                acc
            }
            FrequencyPart::ModelComponent(_) => unreachable!("handled by fourier_many"),
        }
    }

    /// Total variation over `[-pi, pi]`.
    pub fn variation(&self) -> f64 {
        match self {
            FrequencyPart::Cosine { lag } | FrequencyPart::Sine { lag } => 4.0 * lag.abs() as f64,
            FrequencyPart::Indicator { lo, hi } => f64::from(u8::from(*lo > -PI) + u8::from(*hi < PI)),
            FrequencyPart::Kernel { kernel, bandwidth, .. } => kernel.variation() / bandwidth,
            FrequencyPart::Sampled { nodes, values } => {
                let mut v = sampled_variation(values);
                if nodes[0] > -PI {
                    v += values[0].abs();
                }
                if nodes[nodes.len() - 1] < PI {
                    v += values[values.len() - 1].abs();
                }
                v
            }
            FrequencyPart::ModelComponent(mc) => sampled_variation(&mc.samples()),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        match self {
            FrequencyPart::Cosine { .. } => 1.0,
            FrequencyPart::Sine { lag } => f64::from(u8::from(*lag != 0)),
            FrequencyPart::Indicator { .. } => 1.0,
            FrequencyPart::Kernel { kernel, bandwidth, .. } => kernel.peak() / bandwidth,
            FrequencyPart::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
            FrequencyPart::ModelComponent(mc) => mc.samples().iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Exactness-grade rule for `int psi(lambda) g(lambda) d lambda` when `g`
    /// is a trigonometric polynomial of degree below `grid_m - 1`.
    pub(crate) fn frequency_rule(&self, grid: &super::FrequencyGrid) -> QuadRule {
        if self.is_periodic_smooth() {
            return grid.rule().clone();
        }
        let (a, b) = self.support();
        QuadRule::gauss_adaptive(a, b, &self.breakpoints(), grid.m() as f64 / 4.0, 24)
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalTerm {
    #[serde(default)]
    pub time: TimeWeight,
    pub freq: FrequencyPart,
    #[serde(default = "one")]
    pub scale: f64,
}

impl FunctionalTerm {
    pub fn new(time: TimeWeight, freq: FrequencyPart) -> Self {
        FunctionalTerm { time, freq, scale: 1.0 }
    }

    pub fn eval(&self, u: f64, lambda: f64) -> f64 {
        self.scale * self.time.eval(u) * self.freq.eval(lambda)
    }
}

/// `phi(u, lambda) = sum_i scale_i w_i(u) psi_i(lambda)` on `[0,1] x [-pi,pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFunctional {
    pub terms: Vec<FunctionalTerm>,
}

impl SpectralFunctional {
    pub fn new(terms: Vec<FunctionalTerm>) -> Result<Self> {
        let phi = SpectralFunctional { terms };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidArgument("functional needs at least one term".into()));
        }
        for term in &self.terms {
            if !term.scale.is_finite() {
                return Err(Error::InvalidArgument("term scale must be finite".into()));
            }
            term.freq.validate()?;
        }
        Ok(())
    }

    pub fn separable(time: TimeWeight, freq: FrequencyPart) -> Self {
        SpectralFunctional { terms: vec![FunctionalTerm::new(time, freq)] }
    }

    pub fn of_frequency(freq: FrequencyPart) -> Self {
        SpectralFunctional::separable(TimeWeight::default(), freq)
    }

    /// `phi == 1`.
    pub fn one() -> Self {
        SpectralFunctional::of_frequency(FrequencyPart::Cosine { lag: 0 })
    }

    pub fn cosine(lag: i64) -> Self {
        SpectralFunctional::of_frequency(FrequencyPart::Cosine { lag })
    }

    pub fn indicator(lo: f64, hi: f64) -> Self {
        SpectralFunctional::of_frequency(FrequencyPart::Indicator { lo, hi })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.scale *= a;
        }
        out
    }

    pub fn plus(&self, other: &SpectralFunctional) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SpectralFunctional { terms }
    }

    pub fn eval(&self, u: f64, lambda: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) || !in_band(lambda) {
            return 0.0;
        }
        self.terms.iter().map(|t| t.eval(u, lambda)).sum()
    }

    /// `phi_hat(u, k) = int phi(u, lambda) e^{i lambda k} d lambda`.
    pub fn fourier_coefficients(&self, u: f64, ks: &[i64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); ks.len()];
        for term in &self.terms {
            let w = term.scale * term.time.eval(u);
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(term.freq.fourier_many(ks)) {
                *o += c * w;
            }
        }
        out
    }

    pub fn time_breakpoints(&self) -> Vec<f64> {
        self.terms.iter().flat_map(|t| t.time.breakpoints()).collect()
    }

    pub fn freq_breakpoints(&self) -> Vec<f64> {
        self.terms.iter().flat_map(|t| t.freq.breakpoints()).collect()
    }

    /// Every term is a cosine or sine: coefficients have finite lag support.
    pub fn is_trigonometric(&self) -> bool {
        self.terms.iter().all(|t| t.freq.lag_support().is_some())
    }

    /// Largest lag in a trigonometric functional.
    pub fn max_lag(&self) -> Option<usize> {
        self.terms
            .iter()
            .map(|t| t.freq.lag_support().map(|ks| ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)))
            .try_fold(0, |m, l| l.map(|l| m.max(l)))
    }
}

/// Built-in closed-form functionals used by the dual-evaluation checks.
pub fn menu() -> Vec<(&'static str, SpectralFunctional)> {
    use crate::whittle::FamilyKind;
    let ep = SmoothingKernel::Epanechnikov;
    let step = TimeWeight::Curve(
        CoefficientCurve::piecewise_constant(vec![0.4], vec![1.0, -0.5]).expect("valid step"),
    );
    let ramp = TimeWeight::Curve(CoefficientCurve::polynomial(vec![0.5, 1.0]).expect("valid polynomial"));
    vec![
        ("one", SpectralFunctional::one()),
        ("cos1", SpectralFunctional::cosine(1)),
        ("cos3-ramp", SpectralFunctional::separable(ramp.clone(), FrequencyPart::Cosine { lag: 3 })),
        ("sin2", SpectralFunctional::of_frequency(FrequencyPart::Sine { lag: 2 })),
        ("indicator-0-halfpi", SpectralFunctional::indicator(0.0, PI / 2.0)),
        (
            "indicator-step",
            SpectralFunctional::separable(step, FrequencyPart::Indicator { lo: -1.0, hi: 2.2 }),
        ),
        (
            "kernel-freq",
            SpectralFunctional::of_frequency(FrequencyPart::Kernel { kernel: ep, center: 1.0, bandwidth: 0.8 }),
        ),
        (
            "local-kernel-cos",
            SpectralFunctional::separable(
                TimeWeight::kernel(ep, 0.5, 0.4).expect("valid"),
                FrequencyPart::Cosine { lag: 1 },
            ),
        ),
        (
            "sampled",
            SpectralFunctional::of_frequency(FrequencyPart::Sampled {
                nodes: vec![-2.0, -0.5, 0.3, 1.9],
                values: vec![0.2, 1.0, -0.4, 0.7],
            }),
        ),
        (
            "ar1-score",
            SpectralFunctional::separable(
                TimeWeight::kernel(SmoothingKernel::Triangular, 0.6, 0.5).expect("valid"),
                FrequencyPart::ModelComponent(ModelComponent {
                    family: SpectralFamily::of(FamilyKind::Ar { p: 1 }),
                    theta: vec![-0.5, 1.0],
                    component: 0,
                }),
            )
            .plus(&SpectralFunctional::cosine(2).scaled(0.3)),
        ),
    ]
}
