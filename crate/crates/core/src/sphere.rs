//! Fourier transform of the surface measure on `S^{d-1}`, its `L^q`
//! integrability threshold `q > 2d/(d-1)` and the growth of its derivative norms.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{f_deriv_stable, f_eval, f_orders, CoeffTable};
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::quad::{fit_linear, integrate_radial_range, sphere_area, sphere_rule};

/// Radius beyond which derivative norms use the closed-form asymptotic tail.
const NORM_CUTOFF: f64 = 2048.0;

/// Bessel order `(d-2)/2` of the sphere's transform.
pub fn profile_order(d: usize) -> f64 {
    (d as f64 - 2.0) / 2.0
}

/// `2 π^{d/2}`, the constant in front of the Bessel quotient in the closed form.
pub fn paper_constant(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0)
}

/// Constant that `∫_{S^{d-1}} e^{-ix·ξ} dσ(x)` actually carries in front of
/// `f_{(d-2)/2}(|ξ|)`: `(2π)^{d/2}`.
pub fn exact_constant(d: usize) -> f64 {
    (2.0 * PI).powf(d as f64 / 2.0)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::UnsupportedDimension(d))
    } else {
        Ok(())
    }
}

/// `2 π^{d/2} J_{(d-2)/2}(ρ) / ρ^{(d-2)/2}`, continuous at `ρ = 0`.
pub fn sigma_hat(d: usize, rho: f64) -> Result<f64> {
    check_dim(d)?;
    Ok(paper_constant(d) * f_eval(profile_order(d), rho)?)
}

/// Direct quadrature of `∫_{S^{d-1}} e^{-ix·ξ} dσ(x)` for `d ∈ {2, 3}`.
pub fn sigma_hat_quadrature(xi: &[f64], resolution: usize) -> Result<Complex64> {
    let rule = sphere_rule(xi.len(), resolution)?;
    Ok(rule.integrate(|x| {
        let dot: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, -dot)
    }))
}

/// One term `coefficient · ξ^β · f_{m+shift}(|ξ|)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coefficient: i64,
    pub beta: MultiIndex,
    pub shift: u32,
}

/// `D^α` of `f_m(|ξ|)` written as `Σ c ξ^β f_{m+ℓ}(|ξ|)`, built by repeatedly
/// applying `∂_i f_m(|ξ|) = -ξ_i f_{m+1}(|ξ|)`.
pub fn radial_derivative_terms(alpha: &MultiIndex) -> Vec<RadialTerm> {
    let d = alpha.dim();
    let mut terms: BTreeMap<(Vec<u32>, u32), i64> = BTreeMap::new();
    terms.insert((vec![0; d], 0), 1);
    for (i, &count) in alpha.entries().iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<(Vec<u32>, u32), i64> = BTreeMap::new();
            for ((beta, shift), c) in terms {
                if beta[i] > 0 {
                    let mut lower = beta.clone();
                    lower[i] -= 1;
                    *next.entry((lower, shift)).or_insert(0) += c * beta[i] as i64;
                }
                let mut upper = beta;
                upper[i] += 1;
                *next.entry((upper, shift + 1)).or_insert(0) -= c;
            }
            next.retain(|_, c| *c != 0);
            terms = next;
        }
    }
    terms
        .into_iter()
        .map(|((beta, shift), coefficient)| RadialTerm {
            coefficient,
            beta: MultiIndex::new(beta).expect("nonempty"),
            shift,
        })
        .collect()
}

/// Evaluates `Σ c ξ^β f_{m+ℓ}(|ξ|)`.
pub fn eval_radial_terms(m: f64, terms: &[RadialTerm], xi: &[f64]) -> f64 {
    let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let top = terms.iter().map(|t| t.shift).max().unwrap_or(0) as usize;
    let fs = f_orders(m, top + 1, r);
    terms
        .iter()
        .map(|t| t.coefficient as f64 * t.beta.monomial(xi) * fs[t.shift as usize])
        .sum()
}

/// `D^α σ̂(ξ)` with the closed form's constant `2π^{d/2}`.
pub fn sigma_hat_derivative(alpha: &MultiIndex, xi: &[f64]) -> Result<f64> {
    let d = xi.len();
    check_dim(d)?;
    if alpha.dim() != d {
        return Err(Error::domain(format!(
            "multi-index {alpha} does not match dimension {d}"
        )));
    }
    let terms = radial_derivative_terms(alpha);
    Ok(paper_constant(d) * eval_radial_terms(profile_order(d), &terms, xi))
}

/// Quadrature of `∫ (-ix)^α e^{-ix·ξ} dσ(x)`, the transform of `(-ix)^α dσ`.
pub fn moment_transform_quadrature(
    alpha: &MultiIndex,
    xi: &[f64],
    resolution: usize,
) -> Result<Complex64> {
    let rule = sphere_rule(xi.len(), resolution)?;
    let phase = Complex64::new(0.0, -1.0).powu(alpha.order());
    Ok(phase
        * rule.integrate(|x| {
            let dot: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
            Complex64::from_polar(alpha.monomial(x), -dot)
        }))
}

/// Ratio of quadrature to the closed form, sampled at random frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantMeasurement {
    pub d: usize,
    /// Median of quadrature / `f_{(d-2)/2}(|ξ|)`.
    pub constant: f64,
    /// Largest relative deviation of an individual ratio from `constant`.
    pub relative_spread: f64,
    pub paper_constant: f64,
    pub samples: usize,
}

/// Measures the global constant relating quadrature and the Bessel quotient
/// from `samples` random `ξ` with `|ξ| <= radius`.
pub fn measure_constant(
    d: usize,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<ConstantMeasurement> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if samples == 0 || !(radius > 0.0) {
        return Err(Error::domain("need at least one sample and a positive radius"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let resolution = (radius as usize + 40).max(64);
    let m = profile_order(d);
    let mut ratios = Vec::with_capacity(samples);
    while ratios.len() < samples {
        let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: f64 = rand::Rng::random(&mut rng);
        let rho = radius * u;
        let f = f_eval(m, rho)?;
        // Ratios near zeros of the Bessel quotient carry no information.
        if f.abs() < 1e-3 * f_eval(m, 0.0)? {
            continue;
        }
        let xi: Vec<f64> = dir.iter().map(|v| v / norm * rho).collect();
        let q = sigma_hat_quadrature(&xi, resolution)?;
        ratios.push(q.re / f);
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let constant = sorted[sorted.len() / 2];
    let relative_spread = ratios
        .iter()
        .map(|r| (r - constant).abs() / constant.abs())
        .fold(0.0, f64::max);
    Ok(ConstantMeasurement {
        d,
        constant,
        relative_spread,
        paper_constant: paper_constant(d),
        samples,
    })
}

/// A radial function on `R^d`.
#[derive(Clone)]
pub struct RadialProfile {
    pub d: usize,
    pub label: String,
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("d", &self.d)
            .field("label", &self.label)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        d: usize,
        label: impl Into<String>,
        evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        check_dim(d)?;
        Ok(RadialProfile {
            d,
            label: label.into(),
            evaluator: Arc::new(evaluator),
        })
    }

    /// The transform of the surface measure on `S^{d-1}`.
    pub fn sphere(d: usize) -> Result<Self> {
        check_dim(d)?;
        let c = paper_constant(d);
        let m = profile_order(d);
        RadialProfile::new(d, format!("sigma_hat_d{d}"), move |r| {
            c * f_eval(m, r).unwrap_or(f64::NAN)
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.evaluator)(r)
    }
}

/// Outcome of a truncated-integral convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LqClass {
    Convergent,
    Divergent,
    Undecided,
}

impl fmt::Display for LqClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LqClass::Convergent => "CONVERGENT",
            LqClass::Divergent => "DIVERGENT",
            LqClass::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqScanRow {
    pub q: f64,
    pub classification: LqClass,
    /// Fitted exponent `e` in `I(R_{i+1}) - I(R_i) ~ R_i^e`.
    pub growth_exponent: f64,
    /// `(d-1)(1 - q/2) + 1`, the exponent of one annulus contribution.
    pub predicted_exponent: f64,
    pub r_squared: f64,
    /// Truncated integrals `∫_{|x| < R} |f|^q` at each `R` of the grid.
    pub integrals: Vec<f64>,
    /// Geometric-tail extrapolations of the full integral, when convergent.
    pub limit_estimates: Vec<f64>,
}

/// Slopes closer to zero than this are read as non-decaying shell contributions.
const DECAY_MARGIN: f64 = 0.05;
const CAUCHY_RTOL: f64 = 1e-3;
const MIN_R_SQUARED: f64 = 0.9;

/// Classifies `∫ |f|^q` over `R^d` as convergent or divergent from the
/// increments of truncated integrals on a geometric radius grid.
///
/// A convergent integral must show increments decaying like a negative power
/// of `R`; the geometric tail then gives limit estimates that have to agree to
/// `1e-3`. Increments that do not decay mean divergence (a flat sequence is
/// the logarithmic, critical case).
pub fn lq_threshold_scan_profile(
    profile: &RadialProfile,
    q_grid: &[f64],
    r_max_grid: &[f64],
) -> Result<Vec<LqScanRow>> {
    if r_max_grid.len() < 3 {
        return Err(Error::domain("r_max_grid needs at least three radii"));
    }
    if r_max_grid.windows(2).any(|w| !(w[1] > w[0])) || !(r_max_grid[0] > 0.0) {
        return Err(Error::domain("r_max_grid must be positive and increasing"));
    }
    let d = profile.d;
    q_grid
        .iter()
        .map(|&q| {
            if !(q >= 1.0) {
                return Err(Error::domain(format!("exponent q = {q} must be >= 1")));
            }
            let f = |r: f64| profile.eval(r);
            let mut integrals = Vec::with_capacity(r_max_grid.len());
            let mut running = integrate_radial_range(f, d, q, 0.0, r_max_grid[0])?;
            integrals.push(running);
            let mut increments = Vec::with_capacity(r_max_grid.len() - 1);
            for w in r_max_grid.windows(2) {
                let inc = integrate_radial_range(f, d, q, w[0], w[1])?;
                running += inc;
                integrals.push(running);
                increments.push(inc);
            }
            let predicted = (d as f64 - 1.0) * (1.0 - q / 2.0) + 1.0;
            let lx: Vec<f64> = r_max_grid[..increments.len()].iter().map(|r| r.ln()).collect();
            let ly: Vec<f64> = increments.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
            let fit = fit_linear(&lx, &ly, 0..lx.len())?;
            let e = fit.slope;
            let mut limit_estimates = Vec::new();
            let classification = if fit.r_squared < MIN_R_SQUARED && e.abs() > 2.0 * DECAY_MARGIN {
                LqClass::Undecided
            } else if e < -DECAY_MARGIN {
                for (i, inc) in increments.iter().enumerate() {
                    let ratio = (r_max_grid[i + 1] / r_max_grid[i]).powf(e);
                    limit_estimates.push(integrals[i + 1] + inc * ratio / (1.0 - ratio));
                }
                let n = limit_estimates.len();
                let last = limit_estimates[n - 1];
                let prev = limit_estimates[n - 2];
                if (last - prev).abs() <= CAUCHY_RTOL * last.abs() {
                    LqClass::Convergent
                } else {
                    LqClass::Undecided
                }
            } else if increments.iter().all(|&v| v > 0.0) {
                LqClass::Divergent
            } else {
                LqClass::Undecided
            };
            Ok(LqScanRow {
                q,
                classification,
                growth_exponent: e,
                predicted_exponent: predicted,
                r_squared: fit.r_squared,
                integrals,
                limit_estimates,
            })
        })
        .collect()
}

/// [`lq_threshold_scan_profile`] for the sphere's transform in dimension `d`.
pub fn lq_threshold_scan(d: usize, q_grid: &[f64], r_max_grid: &[f64]) -> Result<Vec<LqScanRow>> {
    lq_threshold_scan_profile(&RadialProfile::sphere(d)?, q_grid, r_max_grid)
}

/// Default truncation radii `2^6, …, 2^12`.
pub fn default_r_max_grid() -> Vec<f64> {
    (6..=12).map(|k| 2f64.powi(k)).collect()
}

/// `2d/(d-1)`.
pub fn lq_threshold(d: usize) -> f64 {
    2.0 * d as f64 / (d as f64 - 1.0)
}

/// Fit of `ln norm_k = ln C + k ln A + s k ln k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyFit {
    pub q: f64,
    pub norms: Vec<f64>,
    pub c: f64,
    pub a: f64,
    pub s: f64,
    /// Residuals of the fit in log space, one per fitted `k`.
    pub residuals: Vec<f64>,
    /// `(norm_k / k^k)^{1/k}` for `k >= 1`.
    pub ratios: Vec<f64>,
    pub k_min: usize,
}

/// Least-squares Gevrey fit over `k >= k_min` with `s` constrained to be
/// nonnegative: when the free fit gives `s < 0`, it is refitted with `s = 0`.
pub fn fit_gevrey(q: f64, norms: &[f64], k_min: usize) -> Result<GevreyFit> {
    if norms.len() < k_min + 3 {
        return Err(Error::domain(format!(
            "Gevrey fit needs at least three norms from k = {k_min}, got {}",
            norms.len()
        )));
    }
    if let Some((i, &v)) = norms.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositive { index: i, value: v });
    }
    let ks: Vec<usize> = (k_min..norms.len()).collect();
    let y = DVector::from_iterator(ks.len(), ks.iter().map(|&k| norms[k].ln()));
    let solve = |with_s: bool| -> Result<DVector<f64>> {
        let cols = if with_s { 3 } else { 2 };
        let x = DMatrix::from_fn(ks.len(), cols, |i, j| {
            let k = ks[i] as f64;
            match j {
                0 => 1.0,
                1 => k,
                _ => k * k.ln(),
            }
        });
        x.svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::domain(format!("Gevrey least squares failed: {e}")))
    };
    let mut beta = solve(true)?;
    if beta[2] < 0.0 {
        let b = solve(false)?;
        beta = DVector::from_vec(vec![b[0], b[1], 0.0]);
    }
    let residuals = ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            norms[k].ln() - (beta[0] + beta[1] * kf + beta[2] * kf * kf.ln())
        })
        .collect();
    let ratios = (1..norms.len())
        .map(|k| {
            let kf = k as f64;
            (norms[k].ln() / kf - kf.ln()).exp()
        })
        .collect();
    Ok(GevreyFit {
        q,
        norms: norms.to_vec(),
        c: beta[0].exp(),
        a: beta[1].exp(),
        s: beta[2],
        residuals,
        ratios,
        k_min,
    })
}

/// `‖f^{(k)}_{(d-2)/2}(|·|)‖_{L^q(R^d)}` for `k = 0..=k_max`, fitted with
/// [`fit_gevrey`] over `k >= 3`.
///
/// The radial integral runs to a fixed cutoff; beyond it the profile is
/// replaced by its leading asymptotic amplitude averaged over a period, which
/// integrates in closed form.
pub fn gevrey_norm_sequence(d: usize, q: f64, k_max: usize, table: &CoeffTable) -> Result<GevreyFit> {
    check_dim(d)?;
    let threshold = lq_threshold(d);
    if !(q > threshold) {
        return Err(Error::BelowThreshold { q, threshold });
    }
    if k_max > 12 {
        return Err(Error::domain(format!("k_max = {k_max} exceeds 12")));
    }
    if k_max > table.max_derivative() {
        return Err(Error::capacity(format!(
            "derivative order {k_max} exceeds the table's {}",
            table.max_derivative()
        )));
    }
    let m = profile_order(d);
    let tail = lq_tail(d, q, NORM_CUTOFF);
    let norms: Vec<f64> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let body = integrate_radial_range(
                |r| f_deriv_stable(m, k, r, table).unwrap_or(f64::NAN),
                d,
                q,
                0.0,
                NORM_CUTOFF,
            )?;
            Ok((body + tail).powf(1.0 / q))
        })
        .collect::<Result<_>>()?;
    fit_gevrey(q, &norms, 3)
}

/// `|S^{d-1}| ∫_R^∞ ((2/(πr))^{1/2} r^{-m} |cos|)^q r^{d-1} dr` with `|cos|^q`
/// replaced by its mean `Γ((q+1)/2) / (√π Γ(q/2 + 1))`.
fn lq_tail(d: usize, q: f64, r: f64) -> f64 {
    use statrs::function::gamma::gamma;
    let mean_cos = gamma((q + 1.0) / 2.0) / (PI.sqrt() * gamma(q / 2.0 + 1.0));
    let power = (d as f64 - 1.0) - q * (d as f64 - 1.0) / 2.0 + 1.0;
    sphere_area(d) * mean_cos * (2.0 / PI).powf(q / 2.0) * r.powf(power) / -power
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::coeff_tables;

    #[test]
    fn three_dimensional_profile_is_sinc() {
        let r0 = 1.3;
        for &r in &[0.2, 2.0, 7.0, 40.0, 300.0] {
            let got = sigma_hat(3, r).unwrap() / sigma_hat(3, r0).unwrap();
            let want = (r.sin() / r) / (r0.sin() / r0);
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn quadrature_at_origin() {
        let q3 = sigma_hat_quadrature(&[0.0, 0.0, 0.0], 16).unwrap();
        assert!((q3.re - 4.0 * PI).abs() < 1e-10);
        let q2 = sigma_hat_quadrature(&[0.0, 0.0], 16).unwrap();
        assert!((q2.re - 2.0 * PI).abs() < 1e-10);
        // Same normalisation as the closed form's value at the origin.
        assert!((q2.re - sigma_hat(2, 0.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn paper_constant_differs_from_quadrature_in_three_dimensions() {
        let m = measure_constant(3, 20, 20.0, 7).unwrap();
        assert!(m.relative_spread < 1e-6);
        assert!((m.constant - exact_constant(3)).abs() < 1e-6 * exact_constant(3));
        assert!((m.constant / m.paper_constant - 2f64.sqrt()).abs() < 1e-6);
        let m2 = measure_constant(2, 20, 20.0, 7).unwrap();
        assert!((m2.constant / m2.paper_constant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn moment_derivatives_match_quadrature() {
        for d in [2usize, 3] {
            let ratio = exact_constant(d) / paper_constant(d);
            for alpha in MultiIndex::up_to(d, 3) {
                for xi in [vec![0.3; d], vec![4.0; d], {
                    let mut v = vec![0.0; d];
                    v[d - 1] = 11.0;
                    v
                }] {
                    let formula = sigma_hat_derivative(&alpha, &xi).unwrap() * ratio;
                    let quad = moment_transform_quadrature(&alpha, &xi, 48).unwrap();
                    assert!(quad.im.abs() < 1e-10);
                    assert!(
                        (formula - quad.re).abs() < 1e-9,
                        "d={d} alpha={alpha} xi={xi:?}: {formula} vs {}",
                        quad.re
                    );
                }
            }
        }
    }

    #[test]
    fn first_derivative_terms() {
        let t = radial_derivative_terms(&MultiIndex::axis(2, 0, 2));
        // ∂_1² f_m = -f_{m+1} + ξ_1² f_{m+2}
        assert_eq!(t.len(), 2);
        assert!(t.contains(&RadialTerm {
            coefficient: -1,
            beta: MultiIndex::zero(2),
            shift: 1
        }));
        assert!(t.contains(&RadialTerm {
            coefficient: 1,
            beta: MultiIndex::axis(2, 0, 2),
            shift: 2
        }));
    }

    #[test]
    fn scan_rejects_short_grids() {
        assert!(lq_threshold_scan(2, &[5.0], &[10.0, 20.0]).is_err());
        assert!(lq_threshold_scan(2, &[5.0], &[10.0, 5.0, 20.0]).is_err());
    }

    #[test]
    fn gevrey_fit_recovers_synthetic_parameters() {
        let norms: Vec<f64> = (0..12)
            .map(|k| {
                let kf = k as f64;
                2.0 * 1.5f64.powf(kf) * if k == 0 { 1.0 } else { kf.powf(0.7 * kf) }
            })
            .collect();
        let fit = fit_gevrey(2.0, &norms, 3).unwrap();
        assert!((fit.s - 0.7).abs() < 1e-9);
        assert!((fit.a - 1.5).abs() < 1e-8);
        assert!((fit.c - 2.0).abs() < 1e-7);
        let decaying: Vec<f64> = (1..10)
            .map(|k| 0.5f64.powi(k) * (k as f64).powf(-0.3 * k as f64))
            .collect();
        assert_eq!(fit_gevrey(2.0, &decaying, 3).unwrap().s, 0.0);
    }

    #[test]
    fn gevrey_requires_supercritical_q() {
        let t = coeff_tables(6).unwrap();
        assert_eq!(
            gevrey_norm_sequence(2, 4.0, 4, &t).unwrap_err(),
            Error::BelowThreshold {
                q: 4.0,
                threshold: 4.0
            }
        );
    }

    #[test]
    fn zeroth_norm_is_the_radial_integral() {
        let t = coeff_tables(6).unwrap();
        let fit = gevrey_norm_sequence(2, 5.0, 3, &t);
        // k_max = 3 leaves fewer than three fitted points.
        assert!(fit.is_err());
        let fit = gevrey_norm_sequence(2, 5.0, 5, &t).unwrap();
        let direct = integrate_radial_range(|r| f_eval(0.0, r).unwrap(), 2, 5.0, 0.0, NORM_CUTOFF)
            .unwrap()
            + lq_tail(2, 5.0, NORM_CUTOFF);
        assert!((fit.norms[0] - direct.powf(0.2)).abs() < 1e-12);
    }
}
