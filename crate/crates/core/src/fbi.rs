//! FBI transform with the Gaussian phase `e^{i(x-y)·ξ - ⟨ξ⟩|x-y|^2}` and
//! the form factor `α(x, ξ)`, weight sequences and their associated function.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decay::SampledFunction;
use crate::error::{Error, Result};
use crate::index::MultiIndex;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `⟨ξ⟩ = sqrt(1 + ξ·ξ)`.
pub fn japanese_bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Increasing weight sequences `M_j`, `M'_j` with `j! <= min(M_j, M'_j)`,
/// stored as logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    ln_m: Vec<f64>,
    ln_m_prime: Vec<f64>,
}

fn ln_factorial(j: usize) -> f64 {
    (1..=j).map(|k| (k as f64).ln()).sum()
}

fn validate(ln_m: &[f64], name: &str) -> Result<()> {
    if ln_m.is_empty() {
        return Err(Error::Spec(format!("{name} is empty")));
    }
    for (j, &v) in ln_m.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Spec(format!("{name}_{j} is not finite")));
        }
        if v < ln_factorial(j) - 1e-12 * (1.0 + v.abs()) {
            return Err(Error::Spec(format!("{name}_{j} = e^{v} is below {j}!")));
        }
        if j > 0 && v < ln_m[j - 1] {
            return Err(Error::Spec(format!("{name} decreases at index {j}")));
        }
    }
    Ok(())
}

impl WeightSequence {
    pub fn from_logs(ln_m: Vec<f64>, ln_m_prime: Vec<f64>) -> Result<Self> {
        validate(&ln_m, "M")?;
        validate(&ln_m_prime, "M'")?;
        Ok(WeightSequence { ln_m, ln_m_prime })
    }

    /// `M = M'` given by its values.
    pub fn from_values(m: &[f64]) -> Result<Self> {
        if let Some((j, &v)) = m.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonPositive { index: j, value: v });
        }
        let ln: Vec<f64> = m.iter().map(|v| v.ln()).collect();
        Self::from_logs(ln.clone(), ln)
    }

    /// `M_j = (j!)^s`, `s >= 1`.
    pub fn gevrey(s: f64, len: usize) -> Result<Self> {
        let ln: Vec<f64> = (0..len).map(|j| s * ln_factorial(j)).collect();
        Self::from_logs(ln.clone(), ln)
    }

    /// `M_j = j^j` with `0^0 = 1`.
    pub fn power(len: usize) -> Result<Self> {
        let ln: Vec<f64> = (0..len)
            .map(|j| if j == 0 { 0.0 } else { j as f64 * (j as f64).ln() })
            .collect();
        Self::from_logs(ln.clone(), ln)
    }

    pub fn len(&self) -> usize {
        self.ln_m.len().min(self.ln_m_prime.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ln_m(&self, j: usize) -> f64 {
        self.ln_m[j]
    }

    pub fn ln_m_prime(&self, j: usize) -> f64 {
        self.ln_m_prime[j]
    }

    pub fn m(&self) -> Vec<f64> {
        self.ln_m.iter().map(|v| v.exp()).collect()
    }

    pub fn m_prime(&self) -> Vec<f64> {
        self.ln_m_prime.iter().map(|v| v.exp()).collect()
    }
}

/// `M(t) = sup_{1 <= p <= p_max} (p ln t - ln M_p)` and the maximizing `p`.
pub fn associated_function(weights: &WeightSequence, t: f64, p_max: usize) -> Result<(f64, usize)> {
    if !(t > 0.0) {
        return Err(Error::NonPositive { index: 0, value: t });
    }
    if p_max < 2 || p_max >= weights.ln_m.len() {
        return Err(Error::capacity(format!(
            "p_max = {p_max} needs 2 <= p_max < {}",
            weights.ln_m.len()
        )));
    }
    let lt = t.ln();
    let (best, arg) = (1..=p_max)
        .map(|p| (p as f64 * lt - weights.ln_m[p], p))
        .fold((f64::NEG_INFINITY, 0), |acc, v| if v.0 > acc.0 { v } else { acc });
    if arg == p_max {
        return Err(Error::capacity(format!(
            "the supremum at t = {t} is attained at p_max = {p_max}; raise p_max"
        )));
    }
    Ok((best, arg))
}

/// `∫_R e^{i y a - b y^2} y^power dy` for `power ∈ {0, 1}`.
pub fn gaussian_moment_integral(a: f64, b: f64, power: u32) -> Result<Complex64> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("Gaussian width b = {b} must be positive")));
    }
    let g = (PI / b).sqrt() * (-a * a / (4.0 * b)).exp();
    match power {
        0 => Ok(Complex64::new(g, 0.0)),
        1 => Ok(I * (a / (2.0 * b)) * g),
        _ => Err(Error::domain(format!("moment power {power} is not 0 or 1"))),
    }
}

/// Coefficients `c_β` with `α(x, ξ) = Σ_β c_β x^β (ξ/⟨ξ⟩)^β`, `β ∈ {0,1}^d`,
/// from expanding `det(I + i x (ξ/⟨ξ⟩)^T)`: the rank-one update kills every
/// term with `|β| >= 2`.
pub fn alpha_coefficients(d: usize) -> Vec<(MultiIndex, Complex64)> {
    (0..1u32 << d)
        .map(|mask| {
            let beta = MultiIndex::new((0..d).map(|k| (mask >> k) & 1).collect()).expect("d >= 1");
            let c = match beta.order() {
                0 => Complex64::new(1.0, 0.0),
                1 => I,
                _ => Complex64::new(0.0, 0.0),
            };
            (beta, c)
        })
        .collect()
}

/// `α(x, ξ) = det(I + i x (ξ/⟨ξ⟩)^T)`, the density of
/// `dx ∧ d(ξ_1 + i x_1⟨ξ⟩) ∧ ... ∧ d(ξ_d + i x_d⟨ξ⟩)`.
pub fn alpha_form(x: &[f64], xi: &[f64]) -> Result<Complex64> {
    let d = x.len();
    if d == 0 || xi.len() != d {
        return Err(Error::Spec("x and ξ must share a positive dimension".into()));
    }
    let b = japanese_bracket(xi);
    let m = DMatrix::from_fn(d, d, |r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) + I * x[r] * xi[c] / b
    });
    Ok(m.determinant())
}

/// Sign of the change of variables `y ↦ x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionSign {
    /// Lebesgue measure is reflection invariant: no sign.
    Measure,
    /// Orientation-reversing factor `(-1)^d`, as an oriented integral would give.
    Oriented,
}

/// FBI transform of the constant distribution `1`, assembled per coordinate
/// from Gaussian moments about `x`: it carries the phase `e^{i x·ξ}` and the
/// shift `x` explicitly, which must cancel.
pub fn fbi_constant(x: &[f64], xi: &[f64]) -> Result<Complex64> {
    fbi_constant_signed(x, xi, ReflectionSign::Measure)
}

pub fn fbi_constant_signed(x: &[f64], xi: &[f64], sign: ReflectionSign) -> Result<Complex64> {
    let d = x.len();
    if d == 0 || xi.len() != d {
        return Err(Error::Spec("x and ξ must share a positive dimension".into()));
    }
    let b = japanese_bracket(xi);
    // Per coordinate, with y = x_k - t:
    //   I0 = ∫ e^{i(x_k - y)ξ_k - b(x_k - y)^2} dy
    //   I1 = ∫ e^{i(x_k - y)ξ_k - b(x_k - y)^2} (x_k - y) dy
    // expanded through moments of y about the Gaussian centre x_k:
    //   ∫ e^{-i y ξ_k - b (y - x_k)^2} y^p dy = e^{-i x_k ξ_k} ∫ e^{-i t ξ_k - b t^2} (x_k + t)^p dt.
    let mut i0 = Vec::with_capacity(d);
    let mut i1 = Vec::with_capacity(d);
    for k in 0..d {
        let (xk, a) = (x[k], xi[k]);
        let outer = Complex64::from_polar(1.0, xk * a);
        let shift = Complex64::from_polar(1.0, -xk * a);
        let g0 = gaussian_moment_integral(-a, b, 0)?;
        let g1 = gaussian_moment_integral(-a, b, 1)?;
        let y0 = shift * g0;
        let y1 = shift * (g0 * xk + g1);
        i0.push(outer * y0);
        i1.push(outer * (y0 * xk - y1));
    }
    let bracket = japanese_bracket(xi);
    let mut total = Complex64::new(0.0, 0.0);
    for (beta, c) in alpha_coefficients(d) {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut term = c;
        for k in 0..d {
            if beta.entries()[k] == 1 {
                term *= i1[k] * (xi[k] / bracket);
            } else {
                term *= i0[k];
            }
        }
        total += term;
    }
    Ok(match sign {
        ReflectionSign::Measure => total,
        ReflectionSign::Oriented if d % 2 == 1 => -total,
        ReflectionSign::Oriented => total,
    })
}

/// `π^{d/2} ⟨ξ⟩^{-d/2} e^{-|ξ|^2/(4⟨ξ⟩)} (1 - |ξ|^2 / (2⟨ξ⟩^2))`: the value of
/// [`fbi_constant`] with the Gaussian integrals done once and for all.
pub fn fbi_constant_reduced(xi: &[f64]) -> f64 {
    let d = xi.len() as f64;
    let b = japanese_bracket(xi);
    let s2: f64 = xi.iter().map(|v| v * v).sum();
    (PI / b).powf(d / 2.0) * (-s2 / (4.0 * b)).exp() * (1.0 - s2 / (2.0 * b * b))
}

/// Relative size at which the Gaussian tail outside the window is negligible.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// `⟨f, e^{i(x-·)·ξ - ⟨ξ⟩|x-·|^2} α(x-·, ξ)⟩` by the grid sum over the
/// samples within `radius` of `x` (sup-norm ball).
pub fn fbi_numeric(f: &SampledFunction, x: &[f64], xi: &[f64], radius: f64) -> Result<Complex64> {
    let d = f.dim();
    if x.len() != d || xi.len() != d {
        return Err(Error::Spec(format!("point dimensions differ from the grid dimension {d}")));
    }
    let b = japanese_bracket(xi);
    let fmax = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    // The α factor grows at most linearly; bound the tail integrand at the window edge.
    let tail = fmax * (-b * radius * radius).exp() * (1.0 + radius) * (2.0 * radius).powi(d as i32);
    if tail > TRUNCATION_TOLERANCE {
        return Err(Error::capacity(format!(
            "window radius {radius} leaves a Gaussian tail of {tail:.2e}"
        )));
    }
    let first = f.point(0);
    let last = f.point(f.len() - 1);
    for k in 0..d {
        if x[k] - radius < first[k] - 1e-12 || x[k] + radius > last[k] + 1e-12 {
            return Err(Error::capacity(format!(
                "window of radius {radius} around x_{k} = {} leaves the grid [{}, {}]",
                x[k], first[k], last[k]
            )));
        }
    }
    let cell = f.step().powi(d as i32);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut u = vec![0.0; d];
    for (j, v) in f.values().iter().enumerate() {
        let y = f.point(j);
        if (0..d).any(|k| (x[k] - y[k]).abs() > radius) {
            continue;
        }
        for k in 0..d {
            u[k] = x[k] - y[k];
        }
        let phase: f64 = u.iter().zip(xi).map(|(a, c)| a * c).sum();
        let r2: f64 = u.iter().map(|a| a * a).sum();
        let alpha = Complex64::new(1.0, 0.0) + I * phase / b;
        acc += v * Complex64::from_polar((-b * r2).exp(), phase) * alpha;
    }
    Ok(acc * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_examples() {
        assert!((gaussian_moment_integral(0.0, 1.0, 0).unwrap().re - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gaussian_moment_integral(0.0, 2.0, 1).unwrap(), Complex64::new(0.0, 0.0));
        let v = gaussian_moment_integral(2.0, 1.0, 1).unwrap();
        assert!((v - I * PI.sqrt() * (-1.0f64).exp()).norm() < 1e-15);
        assert!(gaussian_moment_integral(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn alpha_form_trivial_points() {
        assert!((alpha_form(&[0.0, 0.0], &[1.0, 2.0]).unwrap() - 1.0).norm() < 1e-15);
        assert!((alpha_form(&[3.0, -1.0], &[0.0, 0.0]).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn weight_validation() {
        assert!(WeightSequence::from_values(&[1.0, 1.0, 1.0]).is_err());
        assert!(WeightSequence::from_values(&[1.0, 1.0, 2.0, 6.0]).is_ok());
        assert!(WeightSequence::gevrey(0.5, 6).is_err());
        assert!(WeightSequence::power(10).is_ok());
    }

    #[test]
    fn associated_function_examples() {
        let fact = WeightSequence::gevrey(1.0, 30).unwrap();
        let (v, p) = associated_function(&fact, 1.0, 20).unwrap();
        assert_eq!((v, p), (0.0, 1));
        let pow = WeightSequence::power(30).unwrap();
        let (v, p) = associated_function(&pow, 2f64.exp(), 20).unwrap();
        assert_eq!(p, 3);
        assert!((v - 3.0 * (2.0 - 3f64.ln())).abs() < 1e-12);
        assert!(associated_function(&pow, 1e9, 5).is_err());
    }

    #[test]
    fn oriented_sign_in_one_dimension() {
        let v = fbi_constant_signed(&[0.3], &[0.0], ReflectionSign::Oriented).unwrap();
        assert!((v.re + PI.sqrt()).abs() < 1e-14 && v.im.abs() < 1e-14);
        let w = fbi_constant(&[0.3], &[0.0]).unwrap();
        assert!((w.re - PI.sqrt()).abs() < 1e-14);
    }
}
