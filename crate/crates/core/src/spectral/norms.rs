use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::functional::SpectralFunctional;
use super::mean::{functional_lag, smooth_frequency_rule, QuadConfig};
use super::taper::TaperSpec;
use crate::error::Result;
use crate::numeric::{pairwise_sum, QuadRule};

const U_GRID: usize = 1001;
const L_GRID: usize = 2001;

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn opt_finite_or_inf<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => finite_or_inf(x, s),
        None => s.serialize_none(),
    }
}

/// Size and variation norms of a test function. Norms that are not finite
/// for the given functional are reported as `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Norms {
    pub rho2: f64,
    #[serde(serialize_with = "opt_finite_or_inf")]
    pub rho2_n: Option<f64>,
    #[serde(serialize_with = "opt_finite_or_inf")]
    pub rho2_n_tapered: Option<f64>,
    #[serde(serialize_with = "finite_or_inf")]
    pub rho_inf: f64,
    #[serde(serialize_with = "finite_or_inf")]
    pub v_sigma: f64,
    /// `sup_u V(phi(u, .))`.
    pub sup_u_var_lambda: f64,
    /// `sup_lambda V(phi(., lambda))`.
    pub var_u_sup_lambda: f64,
    /// Two-dimensional variation.
    pub var_var: f64,
    pub sup_sup: f64,
}

fn int_phi_sq(phi: &SpectralFunctional, u: f64, lrule: &QuadRule) -> f64 {
    lrule.integrate(|l| phi.eval(u, l).powi(2))
}

/// Sorted grid with every breakpoint and a point just below it, so jumps are seen.
fn grid_with_breaks(lo: f64, hi: f64, count: usize, breaks: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    for &b in breaks {
        if b > lo && b <= hi {
            g.push(b);
            g.push(b - 1e-9 * (hi - lo));
        }
        if b >= lo && b < hi {
            g.push(b + 1e-9 * (hi - lo));
        }
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

pub fn norms(phi: &SpectralFunctional, n: Option<usize>, taper: Option<&TaperSpec>, quad: QuadConfig) -> Result<Norms> {
    phi.validate()?;
    let lrule = smooth_frequency_rule(&phi.freq_breakpoints(), 2 * functional_lag(phi), quad.freq_degree);
    let urule = QuadRule::midpoint_pieces(0.0, 1.0, &phi.time_breakpoints(), quad.u_points);
    let rho2 = urule.integrate(|u| int_phi_sq(phi, u, &lrule)).sqrt();

    let riemann = |weight: &dyn Fn(f64) -> f64, n: usize| {
        let terms: Vec<f64> = (1..=n)
            .map(|t| {
                let u = t as f64 / n as f64;
                weight(u) * int_phi_sq(phi, u, &lrule)
            })
            .collect();
        (pairwise_sum(&terms) / n as f64).sqrt()
    };
    let rho2_n = n.map(|n| riemann(&|_| 1.0, n));
    let rho2_n_tapered = n.map(|n| match taper {
        Some(tp) => riemann(&|u| tp.eval(u).powi(4), n),
        None => riemann(&|_| 1.0, n),
    });

    let (rho_inf, v_sigma) = coefficient_norms(phi);

    let (a, b, c, d) = if phi.terms.len() == 1 {
        let t = &phi.terms[0];
        let s = t.scale.abs();
        let (sw, vw) = (t.time.sup_abs(), t.time.variation());
        let (sp, vp) = (t.freq.sup_abs(), t.freq.variation());
        (s * sw * vp, s * vw * sp, s * vw * vp, s * sw * sp)
    } else {
        grid_variation_norms(phi)
    };
    Ok(Norms {
        rho2,
        rho2_n,
        rho2_n_tapered,
        rho_inf,
        v_sigma,
        sup_u_var_lambda: a,
        var_u_sup_lambda: b,
        var_var: c,
        sup_sup: d,
    })
}

/// `rho_inf = sum_j sup_u |phi_hat(u, j)|` and `v_sigma = sum_j V(phi_hat(., j))`
/// for trigonometric functionals.
fn coefficient_norms(phi: &SpectralFunctional) -> (f64, f64) {
    if !phi.is_trigonometric() {
        return (f64::INFINITY, f64::INFINITY);
    }
    // lag -> [(term index, coefficient)]
    let mut by_lag: BTreeMap<i64, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (i, term) in phi.terms.iter().enumerate() {
        for k in term.freq.lag_support().unwrap_or_default() {
            let c = term.freq.fourier(k) * term.scale;
            if c.norm() > 0.0 {
                by_lag.entry(k).or_default().push((i, c));
            }
        }
    }
    let ugrid = grid_with_breaks(0.0, 1.0, U_GRID, &phi.time_breakpoints());
    let (mut rho, mut vs) = (0.0, 0.0);
    for entries in by_lag.values() {
        if let [(i, c)] = entries.as_slice() {
            let w = &phi.terms[*i].time;
            rho += c.norm() * w.sup_abs();
            vs += c.norm() * w.variation();
        } else {
            let vals: Vec<Complex64> = ugrid
                .iter()
                .map(|&u| entries.iter().map(|(i, c)| c * phi.terms[*i].time.eval(u)).sum())
                .collect();
            rho += vals.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
            vs += vals.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>();
        }
    }
    (rho, vs)
}

fn grid_variation_norms(phi: &SpectralFunctional) -> (f64, f64, f64, f64) {
    let ug = grid_with_breaks(0.0, 1.0, U_GRID, &phi.time_breakpoints());
    let lg = grid_with_breaks(-PI, PI, L_GRID, &phi.freq_breakpoints());
    let vals: Vec<Vec<f64>> = ug.iter().map(|&u| lg.iter().map(|&l| phi.eval(u, l)).collect()).collect();
    let nl = lg.len();
    let sup_u_var_l = vals
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let var_u_sup_l = (0..nl)
        .map(|j| vals.windows(2).map(|r| (r[1][j] - r[0][j]).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut vv = 0.0;
    for r in vals.windows(2) {
        for j in 0..nl - 1 {
            vv += (r[1][j + 1] - r[1][j] - r[0][j + 1] + r[0][j]).abs();
        }
    }
    let sup = vals.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()));
    (sup_u_var_l, var_u_sup_l, vv, sup)
}
