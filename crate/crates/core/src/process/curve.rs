use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{horner, poly_real_roots_in};

/// Serialized form of a coefficient curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Constant {
        value: f64,
    },
    /// Right-continuous step function: `values[i]` holds on
    /// `[breakpoints[i-1], breakpoints[i])`, so `values.len() == breakpoints.len() + 1`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Linear interpolation through `(breakpoints[i], values[i])`, held
    /// constant outside the first and last knot.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// `sum_i coefficients[i] u^i`.
    Polynomial {
        coefficients: Vec<f64>,
    },
}

/// A bounded-variation function on `[0, 1]`.
///
/// Evaluation is defined on the whole real line: arguments below 0 are mapped
/// to 0 and arguments above 1 to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec", into = "CurveSpec")]
pub struct CoefficientCurve {
    spec: CurveSpec,
}

impl CoefficientCurve {
    pub fn new(spec: CurveSpec) -> Result<Self> {
        validate(&spec)?;
        Ok(CoefficientCurve { spec })
    }

    pub fn constant(value: f64) -> Self {
        CoefficientCurve::new(CurveSpec::Constant { value }).expect("finite constant")
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        CoefficientCurve::new(CurveSpec::PiecewiseConstant { breakpoints, values })
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        CoefficientCurve::new(CurveSpec::PiecewiseLinear { breakpoints, values })
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        CoefficientCurve::new(CurveSpec::Polynomial { coefficients })
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn is_constant(&self) -> bool {
        match &self.spec {
            CurveSpec::Constant { .. } => true,
            CurveSpec::PiecewiseConstant { values, .. } | CurveSpec::PiecewiseLinear { values, .. } => {
                values.windows(2).all(|w| w[0] == w[1])
            }
            CurveSpec::Polynomial { coefficients } => coefficients[1..].iter().all(|&c| c == 0.0),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match &self.spec {
            CurveSpec::Constant { value } => *value,
            CurveSpec::PiecewiseConstant { breakpoints, values } => {
                let idx = breakpoints.partition_point(|&b| b <= u);
                values[idx]
            }
            CurveSpec::PiecewiseLinear { breakpoints, values } => {
                let idx = breakpoints.partition_point(|&b| b <= u);
                if idx == 0 {
                    values[0]
                } else if idx == breakpoints.len() {
                    values[values.len() - 1]
                } else {
                    let (x0, x1) = (breakpoints[idx - 1], breakpoints[idx]);
                    let (y0, y1) = (values[idx - 1], values[idx]);
                    y0 + (y1 - y0) * (u - x0) / (x1 - x0)
                }
            }
            CurveSpec::Polynomial { coefficients } => horner(coefficients, u),
        }
    }

    /// Points in `[0, 1]` where the curve jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.spec {
            CurveSpec::PiecewiseConstant { breakpoints, .. }
            | CurveSpec::PiecewiseLinear { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// Values at a set of points that contains every extremum over `[0, 1]`,
    /// together with the ordered sequence needed for exact total variation.
    fn extremal_path(&self) -> Vec<f64> {
        match &self.spec {
            CurveSpec::Constant { value } => vec![*value],
            CurveSpec::PiecewiseConstant { breakpoints, values } => {
                // values[0] is only reachable when the first breakpoint is > 0
                let start = usize::from(breakpoints.first() == Some(&0.0));
                values[start..].to_vec()
            }
            CurveSpec::PiecewiseLinear { values, .. } => values.clone(),
            CurveSpec::Polynomial { coefficients } => {
                let deriv: Vec<f64> = coefficients
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| i as f64 * c)
                    .collect();
                let mut pts = vec![0.0];
                if deriv.len() > 1 {
                    pts.extend(poly_real_roots_in(&deriv, 0.0, 1.0));
                }
                pts.push(1.0);
                pts.into_iter().map(|u| horner(coefficients, u)).collect()
            }
        }
    }

    /// Exact total variation on `[0, 1]`.
    pub fn total_variation(&self) -> f64 {
        self.extremal_path().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.extremal_path().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn inf(&self) -> f64 {
        self.extremal_path().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.extremal_path().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl TryFrom<CurveSpec> for CoefficientCurve {
    type Error = Error;

    fn try_from(spec: CurveSpec) -> Result<Self> {
        CoefficientCurve::new(spec)
    }
}

impl From<CoefficientCurve> for CurveSpec {
    fn from(curve: CoefficientCurve) -> Self {
        curve.spec
    }
}

fn validate(spec: &CurveSpec) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidCurve(msg));
    let check_finite = |xs: &[f64], what: &str| -> Result<()> {
        if xs.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidCurve(format!("{what} must be finite")))
        }
    };
    let check_breaks = |bps: &[f64]| -> Result<()> {
        check_finite(bps, "breakpoints")?;
        if bps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve("breakpoints must be strictly increasing".into()));
        }
        if bps.first().is_some_and(|&b| b < 0.0) || bps.last().is_some_and(|&b| b > 1.0) {
            return Err(Error::InvalidCurve("breakpoints must lie in [0, 1]".into()));
        }
        Ok(())
    };
    match spec {
        CurveSpec::Constant { value } => check_finite(&[*value], "constant value"),
        CurveSpec::PiecewiseConstant { breakpoints, values } => {
            check_breaks(breakpoints)?;
            check_finite(values, "values")?;
            if values.len() != breakpoints.len() + 1 {
                return bad(format!(
                    "piecewise-constant curve needs {} values for {} breakpoints, got {}",
                    breakpoints.len() + 1,
                    breakpoints.len(),
                    values.len()
                ));
            }
            Ok(())
        }
        CurveSpec::PiecewiseLinear { breakpoints, values } => {
            check_breaks(breakpoints)?;
            check_finite(values, "values")?;
            if breakpoints.is_empty() || values.len() != breakpoints.len() {
                return bad("piecewise-linear curve needs one value per knot and at least one knot".into());
            }
            Ok(())
        }
        CurveSpec::Polynomial { coefficients } => {
            check_finite(coefficients, "coefficients")?;
            if coefficients.is_empty() {
                return bad("polynomial needs at least one coefficient".into());
            }
            Ok(())
        }
    }
}
