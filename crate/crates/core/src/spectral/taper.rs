use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaperSpec {
    #[default]
    None,
    /// Split cosine bell: `sin^2` ramps over the first and last `fraction / 2`
    /// of the rescaled time axis.
    Cosine { fraction: f64 },
    /// Indicator of `[start, end]`.
    Segment { start: f64, end: f64 },
    /// Explicit values `h(t/n)`, `t = 1..n`.
    Custom { values: Vec<f64> },
}

impl TaperSpec {
    /// Continuous-time taper `h(u)` on `(0, 1]`, used by the population
    /// functionals. A custom taper is read as a step function.
    pub fn eval(&self, u: f64) -> f64 {
        if !(u > 0.0 && u <= 1.0) {
            return 0.0;
        }
        match self {
            TaperSpec::None => 1.0,
            TaperSpec::Cosine { fraction } => {
                let half = 0.5 * fraction;
                if half <= 0.0 {
                    1.0
                } else if u < half {
                    (PI * u / fraction).sin().powi(2)
                } else if u > 1.0 - half {
                    (PI * (1.0 - u) / fraction).sin().powi(2)
                } else {
                    1.0
                }
            }
            TaperSpec::Segment { start, end } => {
                if u >= *start && u <= *end {
                    1.0
                } else {
                    0.0
                }
            }
            TaperSpec::Custom { values } => {
                let n = values.len();
                let idx = ((u * n as f64).ceil() as usize).clamp(1, n);
                values[idx - 1]
            }
        }
    }

    /// Points where `h` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TaperSpec::None => vec![],
            TaperSpec::Cosine { fraction } => vec![0.5 * fraction, 1.0 - 0.5 * fraction],
            TaperSpec::Segment { start, end } => vec![*start, *end],
            TaperSpec::Custom { values } => {
                let n = values.len() as f64;
                (1..values.len()).map(|t| t as f64 / n).collect()
            }
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, TaperSpec::None)
    }
}

/// Data taper sampled at `t/n`, `t = 1..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taper {
    spec: TaperSpec,
    values: Vec<f64>,
}

impl Taper {
    pub fn none(n: usize) -> Self {
        Taper { spec: TaperSpec::None, values: vec![1.0; n] }
    }

    pub fn new(spec: TaperSpec, n: usize) -> Result<Self> {
        match &spec {
            TaperSpec::None => {}
            TaperSpec::Cosine { fraction } => {
                if !(*fraction >= 0.0 && *fraction <= 1.0) {
                    return Err(Error::InvalidArgument(format!("cosine taper fraction must be in [0, 1], got {fraction}")));
                }
            }
            TaperSpec::Segment { start, end } => {
                if !(*start >= 0.0 && start < end && *end <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "segment taper needs 0 <= start < end <= 1, got [{start}, {end}]"
                    )));
                }
            }
            TaperSpec::Custom { values } => {
                if values.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "custom taper has {} values but the sample has {n}",
                        values.len()
                    )));
                }
            }
        }
        let values: Vec<f64> = (1..=n).map(|t| spec.eval(t as f64 / n as f64)).collect();
        check_values(&values)?;
        Ok(Taper { spec, values })
    }

    pub fn spec(&self) -> &TaperSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_variation(&self) -> f64 {
        crate::numeric::sampled_variation(&self.values)
    }

    /// `h(t/n) X_t`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "taper length {} does not match sample length {}",
                self.values.len(),
                x.len()
            )));
        }
        Ok(x.iter().zip(&self.values).map(|(a, h)| a * h).collect())
    }
}

/// Nonnegativity, finiteness and discrete log-concavity (which includes a
/// contiguous support).
fn check_values(h: &[f64]) -> Result<()> {
    if let Some(v) = h.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidArgument(format!("taper values must be finite and nonnegative, found {v}")));
    }
    let first = h.iter().position(|&v| v > 0.0);
    let last = h.iter().rposition(|&v| v > 0.0);
    if let (Some(a), Some(b)) = (first, last) {
        if h[a..=b].contains(&0.0) {
            return Err(Error::InvalidArgument("taper support must be contiguous (log-concavity)".into()));
        }
    }
    for (t, w) in h.windows(3).enumerate() {
        if w.iter().all(|&v| v > 0.0) && w[0] * w[2] > w[1] * w[1] * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "taper is not log-concave at t = {}: h(t-1) h(t+1) > h(t)^2",
                t + 2
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_taper_is_valid_and_flat_in_the_middle() {
        let t = Taper::new(TaperSpec::Cosine { fraction: 0.2 }, 100).unwrap();
        assert_eq!(t.values()[49], 1.0);
        assert!(t.values()[0] < 0.1);
        assert!(t.total_variation() <= 2.0 + 1e-12);
    }

    #[test]
    fn segment_taper_selects_indices() {
        let t = Taper::new(TaperSpec::Segment { start: 0.25, end: 0.5 }, 8).unwrap();
        assert_eq!(t.values(), &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_custom_tapers() {
        let bumpy = TaperSpec::Custom { values: vec![1.0, 0.5, 1.0] };
        assert!(Taper::new(bumpy, 3).is_err());
        let gap = TaperSpec::Custom { values: vec![1.0, 0.0, 1.0] };
        assert!(Taper::new(gap, 3).is_err());
        let neg = TaperSpec::Custom { values: vec![1.0, -0.1, 1.0] };
        assert!(Taper::new(neg, 3).is_err());
        let ok = TaperSpec::Custom { values: vec![0.0, 0.5, 1.0, 1.0, 0.5] };
        assert!(Taper::new(ok, 5).is_ok());
        assert!(Taper::new(TaperSpec::Custom { values: vec![1.0] }, 2).is_err());
    }
}
