use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::poly_on_circle;

/// Stationary parametric spectral family and its box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyKind {
    WhiteNoise,
    Ar { p: usize },
    Ma { q: usize },
    Arma { p: usize, q: usize },
}

impl FamilyKind {
    pub fn orders(self) -> (usize, usize) {
        match self {
            FamilyKind::WhiteNoise => (0, 0),
            FamilyKind::Ar { p } => (p, 0),
            FamilyKind::Ma { q } => (0, q),
            FamilyKind::Arma { p, q } => (p, q),
        }
    }

    pub fn tag(self) -> String {
        match self {
            FamilyKind::WhiteNoise => "white-noise".into(),
            FamilyKind::Ar { p } => format!("ar({p})"),
            FamilyKind::Ma { q } => format!("ma({q})"),
            FamilyKind::Arma { p, q } => format!("arma({p},{q})"),
        }
    }
}

impl FamilySpec {
    pub fn new(family: FamilyKind) -> Self {
        FamilySpec { family, lower: None, upper: None }
    }
}

/// `f_theta(lambda) = s2 |1 + sum_k b_k e^{i k lambda}|^2 / (2 pi |1 + sum_j a_j e^{i j lambda}|^2)`
/// with `theta = (a_1..a_p, b_1..b_q, s2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpec", into = "FamilySpec")]
pub struct SpectralFamily {
    kind: FamilyKind,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Largest absolute coefficient of a polynomial `prod (1 - r_i z)` with `|r_i| <= 0.99`.
fn coefficient_bound(order: usize, j: usize) -> f64 {
    let mut binom = 1.0;
    for i in 0..j {
        binom *= (order - i) as f64 / (i + 1) as f64;
    }
    binom * 0.99f64.powi(j as i32)
}

impl SpectralFamily {
    pub fn new(spec: &FamilySpec) -> Result<Self> {
        let (p, q) = spec.family.orders();
        let d = p + q + 1;
        let mut lower: Vec<f64> = (1..=p).map(|j| -coefficient_bound(p, j)).collect();
        lower.extend((1..=q).map(|k| -coefficient_bound(q, k)));
        lower.push(1e-8);
        let mut upper: Vec<f64> = lower.iter().map(|v| -v).collect();
        upper[d - 1] = 1e8;
        if let Some(l) = &spec.lower {
            lower = l.clone();
        }
        if let Some(u) = &spec.upper {
            upper = u.clone();
        }
        if lower.len() != d || upper.len() != d {
            return Err(Error::InvalidArgument(format!(
                "family {} has dimension {d} but the box has {} / {} bounds",
                spec.family.tag(),
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return Err(Error::InvalidArgument("box bounds must be finite with lower < upper".into()));
        }
        if lower[d - 1] <= 0.0 {
            return Err(Error::InvalidArgument("the innovation variance bound must be positive".into()));
        }
        Ok(SpectralFamily { kind: spec.family, lower, upper })
    }

    pub fn of(kind: FamilyKind) -> Self {
        SpectralFamily::new(&FamilySpec::new(kind)).expect("default box is valid")
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        let (p, q) = self.kind.orders();
        p + q + 1
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta.iter().zip(self.lower.iter().zip(&self.upper)).all(|(t, (l, u))| *t >= *l && *t <= *u)
    }

    pub(crate) fn check(&self, theta: &[f64]) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::OutsideBox { theta: theta.to_vec() })
        }
    }

    pub fn project(&self, theta: &mut [f64]) {
        for (t, (l, u)) in theta.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *t = t.clamp(*l, *u);
        }
    }

    fn split<'a>(&self, theta: &'a [f64]) -> (&'a [f64], &'a [f64], f64) {
        let (p, q) = self.kind.orders();
        (&theta[..p], &theta[p..p + q], theta[p + q])
    }

    pub fn density(&self, theta: &[f64], lambda: f64) -> f64 {
        let (a, b, s2) = self.split(theta);
        s2 * poly_on_circle(b, lambda).norm_sqr() / (2.0 * PI * poly_on_circle(a, lambda).norm_sqr())
    }

    /// Gradient of `log f_theta(lambda)`.
    pub fn grad_log_density(&self, theta: &[f64], lambda: f64) -> Vec<f64> {
        self.log_derivatives(theta, lambda, false).0
    }

    /// Gradient and Hessian of `log f_theta(lambda)`.
    pub fn log_derivatives(&self, theta: &[f64], lambda: f64, hessian: bool) -> (Vec<f64>, Vec<f64>) {
        let (a, b, s2) = self.split(theta);
        let (p, q) = (a.len(), b.len());
        let d = self.dim();
        let av = poly_on_circle(a, lambda);
        let bv = poly_on_circle(b, lambda);
        let a2 = av.norm_sqr();
        let b2 = bv.norm_sqr();
        // d|A|^2 / d a_j = 2 Re(e^{i j lambda} conj(A))
        let ga: Vec<f64> = (1..=p)
            .map(|j| 2.0 * (Complex64::from_polar(1.0, lambda * j as f64) * av.conj()).re)
            .collect();
        let gb: Vec<f64> = (1..=q)
            .map(|k| 2.0 * (Complex64::from_polar(1.0, lambda * k as f64) * bv.conj()).re)
            .collect();
        let mut grad = Vec::with_capacity(d);
        grad.extend(ga.iter().map(|g| -g / a2));
        grad.extend(gb.iter().map(|g| g / b2));
        grad.push(1.0 / s2);
        let mut hess = Vec::new();
        if hessian {
            hess = vec![0.0; d * d];
            for i in 0..p {
                for j in 0..p {
                    let c = 2.0 * (lambda * (i as f64 - j as f64)).cos();
                    hess[i * d + j] = -(c / a2 - ga[i] * ga[j] / (a2 * a2));
                }
            }
            for i in 0..q {
                for j in 0..q {
                    let c = 2.0 * (lambda * (i as f64 - j as f64)).cos();
                    hess[(p + i) * d + p + j] = c / b2 - gb[i] * gb[j] / (b2 * b2);
                }
            }
            hess[d * d - 1] = -1.0 / (s2 * s2);
        }
        (grad, hess)
    }

    /// `grad f_theta^{-1}(lambda) = -f^{-1} grad log f`.
    pub fn grad_inv_density(&self, theta: &[f64], lambda: f64) -> Vec<f64> {
        let inv = 1.0 / self.density(theta, lambda);
        self.grad_log_density(theta, lambda).into_iter().map(|g| -inv * g).collect()
    }

    /// Row-major `hess f_theta^{-1} = f^{-1} (grad log f grad log f' - hess log f)`.
    pub fn hess_inv_density(&self, theta: &[f64], lambda: f64) -> Vec<f64> {
        let inv = 1.0 / self.density(theta, lambda);
        let (g, h) = self.log_derivatives(theta, lambda, true);
        let d = g.len();
        (0..d * d).map(|idx| inv * (g[idx / d] * g[idx % d] - h[idx])).collect()
    }

    /// Interior starting point for optimization: zero ARMA coefficients and
    /// the given variance, projected into the box.
    pub fn default_start(&self, variance: f64) -> Vec<f64> {
        let mut theta = vec![0.0; self.dim()];
        theta[self.dim() - 1] = variance;
        self.project(&mut theta);
        theta
    }
}

impl TryFrom<FamilySpec> for SpectralFamily {
    type Error = Error;
    fn try_from(spec: FamilySpec) -> Result<Self> {
        SpectralFamily::new(&spec)
    }
}

impl From<SpectralFamily> for FamilySpec {
    fn from(f: SpectralFamily) -> Self {
        FamilySpec { family: f.kind, lower: Some(f.lower), upper: Some(f.upper) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd<F: Fn(&[f64]) -> f64>(f: F, theta: &[f64], i: usize) -> f64 {
        let h = 1e-5 * theta[i].abs().max(1e-2);
        let mut tp = theta.to_vec();
        let mut tm = theta.to_vec();
        tp[i] += h;
        tm[i] -= h;
        (f(&tp) - f(&tm)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fam = SpectralFamily::of(FamilyKind::Arma { p: 2, q: 1 });
        let theta = [-0.4, 0.2, 0.3, 1.7];
        for &lam in &[-2.9, -0.4, 0.0, 1.3, 3.0] {
            let g = fam.grad_inv_density(&theta, lam);
            let h = fam.hess_inv_density(&theta, lam);
            for i in 0..4 {
                let num = fd(|t| 1.0 / fam.density(t, lam), &theta, i);
                assert_relative_eq!(g[i], num, max_relative = 1e-7, epsilon = 1e-9);
                for j in 0..4 {
                    let num = fd(|t| fam.grad_inv_density(t, lam)[j], &theta, i);
                    assert_relative_eq!(h[i * 4 + j], num, max_relative = 1e-6, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn default_box_covers_causal_ar2() {
        let fam = SpectralFamily::of(FamilyKind::Ar { p: 2 });
        assert!(fam.contains(&[-1.6, 0.64, 1.0]));
        assert!(!fam.contains(&[-2.0, 0.64, 1.0]));
    }

    #[test]
    fn rejects_bad_box() {
        let spec = FamilySpec { family: FamilyKind::WhiteNoise, lower: Some(vec![0.0]), upper: Some(vec![1.0]) };
        assert!(SpectralFamily::new(&spec).is_err());
        let spec = FamilySpec { family: FamilyKind::Ar { p: 1 }, lower: Some(vec![0.0]), upper: None };
        assert!(SpectralFamily::new(&spec).is_err());
    }
}
