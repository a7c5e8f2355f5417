//! Quadrature, sphere rules, finite differences and power-law fitting.
//!
//! Everything here is deliberately independent of the Bessel and measure code
//! so it can serve as the reference side of cross-checks.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Gauss-Legendre order used on every radial panel.
const PANEL_ORDER: usize = 16;
/// Relative tolerance at which panel doubling stops.
const RADIAL_RTOL: f64 = 1e-9;
const MAX_DOUBLINGS: usize = 10;

/// Nodes and positive weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Spec(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.len() < 2 {
            return Err(Error::Spec("a grid needs at least two nodes".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spec("grid nodes must be strictly increasing".into()));
        }
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
            return Err(Error::NonPositive { index: i, value: w });
        }
        Ok(Grid1D { nodes, weights })
    }

    /// Gauss-Legendre rule with `order` nodes on `[a, b]`.
    pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::domain(format!("empty interval [{a}, {b}]")));
        }
        let (x, w) = gauss_legendre(order.max(2));
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Grid1D::new(
            x.iter().map(|t| mid + half * t).collect(),
            w.iter().map(|v| half * v).collect(),
        )
    }

    /// Composite Gauss-Legendre rule on equal panels.
    pub fn composite(panels: usize, order: usize, a: f64, b: f64) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return Err(Error::domain("composite rule needs panels > 0 and b > a"));
        }
        let (x, w) = gauss_legendre(order.max(2));
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * x.len());
        let mut weights = Vec::with_capacity(panels * x.len());
        for p in 0..panels {
            let lo = a + p as f64 * width;
            for (t, v) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * width * (t + 1.0));
                weights.push(0.5 * width * v);
            }
        }
        Grid1D::new(nodes, weights)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Surface area of the unit sphere in `R^d`; `2` for `d = 1` (two points).
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// `|S^{d-1}| * ∫_a^b |f(r)|^q r^{d-1} dr` by composite Gauss-Legendre panels,
/// doubling the panel count until successive estimates agree to `1e-9`.
pub fn integrate_radial_range(
    f: impl Fn(f64) -> f64 + Sync,
    d: usize,
    q: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(q >= 1.0) {
        return Err(Error::domain(format!("exponent q = {q} must be >= 1")));
    }
    if !(b > a) || a < 0.0 {
        return Err(Error::domain(format!("invalid radial range [{a}, {b}]")));
    }
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let dm1 = (d - 1) as i32;
    let eval = |panels: usize| -> Result<f64> {
        let width = (b - a) / panels as f64;
        use rayon::prelude::*;
        (0..panels)
            .into_par_iter()
            .map(|p| {
                let lo = a + p as f64 * width;
                let mut s = 0.0;
                for (t, v) in x.iter().zip(&w) {
                    let r = lo + 0.5 * width * (t + 1.0);
                    let val = f(r);
                    if !val.is_finite() {
                        return Err(Error::NonFinite { radius: r });
                    }
                    s += v * val.abs().powf(q) * r.powi(dm1);
                }
                Ok(0.5 * width * s)
            })
            .try_reduce(|| 0.0, |u, v| Ok(u + v))
    };
    let mut panels = ((b - a) / 2.0).ceil().max(4.0) as usize;
    let mut prev = eval(panels)?;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let cur = eval(panels)?;
        let done = (cur - prev).abs() <= RADIAL_RTOL * cur.abs().max(f64::MIN_POSITIVE);
        prev = cur;
        if done {
            break;
        }
    }
    Ok(sphere_area(d) * prev)
}

/// Truncated `L^q` integral of a radial profile over the ball of radius `r_max`.
pub fn integrate_radial(
    f: impl Fn(f64) -> f64 + Sync,
    d: usize,
    q: f64,
    r_max: f64,
) -> Result<f64> {
    if !(r_max > 0.0) {
        return Err(Error::domain(format!("r_max = {r_max} must be positive")));
    }
    integrate_radial_range(f, d, q, 0.0, r_max)
}

/// A quadrature rule on the unit sphere `S^{d-1}`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<T>(&self, f: impl Fn(&[f64]) -> T) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(y, &w)| f(y) * w)
            .sum()
    }
}

/// Sphere rule for `d ∈ {2, 3}`: trapezoid on the circle, or Gauss-Legendre
/// in `cos θ` times a trapezoid in `φ` on `S^2`.
pub fn sphere_rule(d: usize, resolution: usize) -> Result<SphereQuadrature> {
    if resolution < 8 {
        return Err(Error::domain(format!(
            "sphere resolution {resolution} is below the minimum of 8"
        )));
    }
    match d {
        2 => {
            let h = 2.0 * PI / resolution as f64;
            let points = (0..resolution)
                .map(|i| {
                    let t = i as f64 * h;
                    vec![t.cos(), t.sin()]
                })
                .collect();
            Ok(SphereQuadrature {
                dim: 2,
                points,
                weights: vec![h; resolution],
            })
        }
        3 => {
            let (x, w) = gauss_legendre(resolution);
            let nphi = 2 * resolution;
            let h = 2.0 * PI / nphi as f64;
            let mut points = Vec::with_capacity(resolution * nphi);
            let mut weights = Vec::with_capacity(resolution * nphi);
            for (&c, &wc) in x.iter().zip(&w) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for j in 0..nphi {
                    let phi = j as f64 * h;
                    points.push(vec![s * phi.cos(), s * phi.sin(), c]);
                    weights.push(wc * h);
                }
            }
            Ok(SphereQuadrature {
                dim: 3,
                points,
                weights,
            })
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn central_difference(f: &impl Fn(f64) -> f64, n: usize, r: f64, h: f64) -> f64 {
    let half = n as f64 / 2.0;
    let mut s = 0.0;
    for i in 0..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binomial(n, i) * f(r + (half - i as f64) * h);
    }
    s / h.powi(n as i32)
}

/// Central-difference estimate of `f^{(n)}(r)` starting from step `h`.
///
/// The basic stencil is second order; a Ridders tableau (step ratio 1.4)
/// extrapolates it and keeps the entry with the smallest error estimate.
/// `domain` bounds where `f` may be evaluated.
pub fn finite_diff(
    f: impl Fn(f64) -> f64,
    n: usize,
    r: f64,
    h: f64,
    domain: Option<(f64, f64)>,
) -> Result<f64> {
    if n > 10 {
        return Err(Error::domain(format!("derivative order {n} exceeds 10")));
    }
    if !(h > 0.0) {
        return Err(Error::domain(format!("step {h} must be positive")));
    }
    let reach = n as f64 * h / 2.0;
    if let Some((lo, hi)) = domain {
        if r - reach < lo || r + reach > hi {
            return Err(Error::domain(format!(
                "stencil [{}, {}] leaves the domain [{lo}, {hi}]",
                r - reach,
                r + reach
            )));
        }
    }
    if n == 0 {
        return Ok(f(r));
    }
    const CON: f64 = 1.4;
    const NTAB: usize = 10;
    let con2 = CON * CON;
    let mut tab = [[0.0f64; NTAB]; NTAB];
    let mut step = h;
    tab[0][0] = central_difference(&f, n, r, step);
    let mut best = tab[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        step /= CON;
        tab[0][i] = central_difference(&f, n, r, step);
        let mut fac = con2;
        for j in 1..=i {
            tab[j][i] = (tab[j - 1][i] * fac - tab[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let e = (tab[j][i] - tab[j - 1][i])
                .abs()
                .max((tab[j][i] - tab[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = tab[j][i];
            }
        }
        if (tab[i][i] - tab[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Ok(best)
}

/// Least-squares line with coefficient of determination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: Range<usize>,
}

/// Ordinary least squares of `ys` on `xs` over `window`.
pub fn fit_linear(xs: &[f64], ys: &[f64], window: Range<usize>) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Spec(format!(
            "length mismatch: {} x values, {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if window.end > xs.len() || window.len() < 2 {
        return Err(Error::Spec(format!(
            "window {window:?} invalid for {} points",
            xs.len()
        )));
    }
    let x = &xs[window.clone()];
    let y = &ys[window.clone()];
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Spec("x values in the window are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    // A flat series is explained exactly by a zero slope.
    let scale = y.iter().map(|v| v * v).sum::<f64>().max(1.0);
    let r_squared = if ss_tot <= 1e-24 * scale {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        window,
    })
}

/// Power-law fit: least squares of `ln y` on `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], window: Range<usize>) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Spec(format!(
            "length mismatch: {} x values, {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if window.len() < 3 || window.end > xs.len() {
        return Err(Error::Spec(format!(
            "log-log window {window:?} needs at least 3 of {} points",
            xs.len()
        )));
    }
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0) {
            return Err(Error::NonPositive { index: i, value: x });
        }
        if !(y > 0.0) {
            return Err(Error::NonPositive { index: i, value: y });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_linear(&lx, &ly, window)
}

/// Sup of `|g|` over the dyadic annulus `2^k <= r < 2^{k+1}`, from at least
/// `samples` equispaced radii.
pub fn annulus_sup(g: impl Fn(f64) -> f64, k: i32, samples: usize) -> f64 {
    let lo = 2f64.powi(k);
    let n = samples.max(64);
    let h = lo / n as f64;
    (0..n)
        .map(|i| g(lo + (i as f64 + 0.5) * h).abs())
        .fold(0.0, f64::max)
}

/// Dyadic-annulus envelope of `|g|` for `k ∈ ks` and its log-log fit against `2^k`.
pub fn envelope_fit(
    g: impl Fn(f64) -> f64 + Sync,
    ks: Range<i32>,
    per_unit: f64,
) -> Result<(Vec<f64>, FitResult)> {
    use rayon::prelude::*;
    let ks: Vec<i32> = ks.collect();
    let sups: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            let samples = (2f64.powi(k) * per_unit).ceil() as usize;
            annulus_sup(&g, k, samples)
        })
        .collect();
    let xs: Vec<f64> = ks.iter().map(|&k| 2f64.powi(k)).collect();
    let fit = fit_loglog(&xs, &sups, 0..xs.len())?;
    Ok((sups, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "degree {p}: {got} vs {exact}");
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid1D::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Grid1D::new(vec![0.0], vec![1.0]).is_err());
        assert!(Grid1D::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(matches!(
            Grid1D::new(vec![0.0, 1.0], vec![1.0, 0.0]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        let g = Grid1D::composite(4, 5, 0.0, 2.0).unwrap();
        assert!((g.integrate(|x| x * x) - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn radial_integral_of_constant_is_disk_area() {
        let v = integrate_radial(|_| 1.0, 2, 1.0, 1.0).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn radial_integral_of_gaussian_in_one_dimension() {
        let v = integrate_radial(|r| (-r * r).exp(), 1, 1.0, 8.0).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn radial_integral_reports_non_finite_radius() {
        let err = integrate_radial(|r| if r > 0.5 { f64::NAN } else { 1.0 }, 2, 1.0, 1.0)
            .unwrap_err();
        match err {
            Error::NonFinite { radius } => assert!(radius > 0.5 && radius <= 1.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(integrate_radial(|_| 1.0, 2, 1.0, 0.0).is_err());
        assert!(integrate_radial(|_| 1.0, 2, 0.5, 1.0).is_err());
    }

    #[test]
    fn sphere_area_values() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn sphere_rule_weights_and_second_moment() {
        for res in [8, 13, 32] {
            let c = sphere_rule(2, res).unwrap();
            let s: f64 = c.weights().iter().sum();
            assert!((s - 2.0 * PI).abs() < 1e-10);
            let s3 = sphere_rule(3, res).unwrap();
            let total: f64 = s3.weights().iter().sum();
            assert!((total - 4.0 * PI).abs() < 1e-8);
            for p in s3.points() {
                let n: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
            assert!(s3.weights().iter().all(|&w| w > 0.0));
        }
        let s3 = sphere_rule(3, 16).unwrap();
        let m2 = s3.integrate(|y| y[0] * y[0]);
        assert!((m2 - 4.0 * PI / 3.0).abs() < 1e-6);
        assert_eq!(
            sphere_rule(4, 16).unwrap_err(),
            Error::UnsupportedDimension(4)
        );
        assert!(sphere_rule(2, 4).is_err());
    }

    #[test]
    fn finite_diff_examples() {
        let v = finite_diff(|r| r.powi(3), 2, 1.0, 0.5, None).unwrap();
        assert!((v - 6.0).abs() < 1e-6);
        let v = finite_diff(f64::sin, 3, 0.0, 0.5, None).unwrap();
        assert!((v + 1.0).abs() < 1e-5);
        let err = finite_diff(f64::sqrt, 2, 0.1, 0.5, Some((0.0, f64::INFINITY)));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn loglog_fit_recovers_exact_power_laws() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64 * 1.7).collect();
        for e in [-2.0, -1.0, -0.5, 0.0, 0.5] {
            let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(e)).collect();
            let f = fit_loglog(&xs, &ys, 0..xs.len()).unwrap();
            assert!((f.slope - e).abs() < 1e-10);
            assert!((f.r_squared - 1.0).abs() < 1e-10);
        }
        let ys: Vec<f64> = xs.iter().map(|x| 0.25 * x * x).collect();
        assert!((fit_loglog(&xs, &ys, 2..10).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn loglog_fit_rejects_nonpositive_values() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, -2.0, 3.0, 4.0];
        assert_eq!(
            fit_loglog(&xs, &ys, 0..4).unwrap_err(),
            Error::NonPositive {
                index: 1,
                value: -2.0
            }
        );
        assert!(fit_loglog(&xs, &[1.0; 4], 0..2).is_err());
    }
}
