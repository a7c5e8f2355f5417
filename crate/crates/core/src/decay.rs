//! Pairings `⟨x^β D^α T, φ⟩` of concrete tempered distributions with
//! cone-localized test functions, directional decay fits, an empirical
//! wavefront set, and Gevrey membership of smooth profiles.
//!
//! `D^α` is the plain partial derivative `∂^α`. The Fourier transform is
//! `T̂(ξ) = ∫ e^{-i x·ξ} T(x) dx`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::coeff_tables;
use crate::cantor::{build_cantor, CantorSpec, DiscreteMeasure};
use crate::dyadic::cutoff;
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::jet::{Jet, JetLayout};
use crate::quad::{fit_loglog, sphere_rule, FitResult, Grid1D, SphereQuadrature};
use crate::sphere::{fit_gevrey, gevrey_norm_sequence, GevreyFit};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Index sets are truncated at this total order `|α| + |β|`.
pub const MAX_TOTAL_ORDER: u32 = 8;

/// Samples of a function on a regular grid, row-major with the last axis
/// fastest. Treated as its band-limited interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    origin: Vec<f64>,
    step: f64,
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(origin: Vec<f64>, step: f64, shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if origin.is_empty() || origin.len() != shape.len() {
            return Err(Error::Spec("origin and shape must have the same nonzero length".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::NonPositive { index: 0, value: step });
        }
        if shape.iter().any(|&n| n < 4) {
            return Err(Error::Spec("every grid axis needs at least 4 samples".into()));
        }
        if shape.iter().product::<usize>() != values.len() {
            return Err(Error::Spec(format!(
                "{} values do not fill a grid of shape {shape:?}",
                values.len()
            )));
        }
        Ok(SampledFunction {
            origin,
            step,
            shape,
            values,
        })
    }

    /// `n^d` samples of `f` on the grid centred at the origin with spacing `step`.
    pub fn from_fn(d: usize, n: usize, step: f64, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        if d == 0 {
            return Err(Error::UnsupportedDimension(d));
        }
        let half = step * (n as f64 - 1.0) / 2.0;
        let origin = vec![-half; d];
        let shape = vec![n; d];
        let total = n.pow(d as u32);
        let mut values = Vec::with_capacity(total);
        let mut x = vec![0.0; d];
        for flat in 0..total {
            let mut rest = flat;
            for axis in (0..d).rev() {
                x[axis] = -half + (rest % n) as f64 * step;
                rest /= n;
            }
            values.push(f(&x));
        }
        Self::new(origin, step, shape, values)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let d = self.dim();
        let mut x = vec![0.0; d];
        let mut rest = flat;
        for axis in (0..d).rev() {
            x[axis] = self.origin[axis] + (rest % self.shape[axis]) as f64 * self.step;
            rest /= self.shape[axis];
        }
        x
    }

    /// `∂^α` of the trigonometric interpolant, at the grid points.
    pub fn spectral_derivative(&self, alpha: &MultiIndex) -> Vec<Complex64> {
        let mut data = self.values.clone();
        for (axis, &a) in alpha.entries().iter().enumerate() {
            if a == 0 {
                continue;
            }
            let n = self.shape[axis];
            let stride: usize = self.shape[axis + 1..].iter().product();
            let twiddle: Vec<Complex64> = (0..n)
                .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
                .collect();
            let mult: Vec<Complex64> = (0..n)
                .map(|k| {
                    if n.is_multiple_of(2) && k == n / 2 {
                        return ZERO;
                    }
                    let kk = if k <= (n - 1) / 2 { k as f64 } else { k as f64 - n as f64 };
                    let kappa = 2.0 * PI * kk / (n as f64 * self.step);
                    Complex64::new(0.0, kappa).powu(a)
                })
                .collect();
            let outer = data.len() / (n * stride);
            let mut line = vec![ZERO; n];
            let mut spec = vec![ZERO; n];
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * n * stride + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    for (k, s) in spec.iter_mut().enumerate() {
                        let mut acc = ZERO;
                        for (j, v) in line.iter().enumerate() {
                            acc += v * twiddle[(j * k) % n];
                        }
                        *s = acc * mult[k];
                    }
                    for j in 0..n {
                        let mut acc = ZERO;
                        for (k, s) in spec.iter().enumerate() {
                            acc += s * twiddle[(n - (j * k) % n) % n];
                        }
                        data[base + j * stride] = acc / n as f64;
                    }
                }
            }
        }
        data
    }
}

/// A concrete tempered distribution.
#[derive(Debug, Clone)]
pub enum DistributionRep {
    SampledFunction(SampledFunction),
    /// Surface measure of the unit sphere, carried by a quadrature rule.
    SurfaceMeasure(SphereQuadrature),
    /// `scale · ∂^γ δ_{location}`.
    PointMassDerivative {
        location: Vec<f64>,
        gamma: MultiIndex,
        scale: Complex64,
    },
    CantorMeasure(DiscreteMeasure),
    ConstantOne { d: usize },
    /// `x^γ`.
    Monomial { gamma: MultiIndex },
    /// The Fourier transform of a finite measure, a sampled function or a point
    /// mass derivative, viewed as a smooth function of `ξ`.
    Spectrum(Box<DistributionRep>),
}

impl DistributionRep {
    pub fn dim(&self) -> usize {
        match self {
            DistributionRep::SampledFunction(f) => f.dim(),
            DistributionRep::SurfaceMeasure(rule) => rule.dim(),
            DistributionRep::PointMassDerivative { location, .. } => location.len(),
            DistributionRep::CantorMeasure(_) => 1,
            DistributionRep::ConstantOne { d } => *d,
            DistributionRep::Monomial { gamma } => gamma.dim(),
            DistributionRep::Spectrum(inner) => inner.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionRep::SampledFunction(_) => "SampledFunction",
            DistributionRep::SurfaceMeasure(_) => "SurfaceMeasure",
            DistributionRep::PointMassDerivative { .. } => "PointMassDerivative",
            DistributionRep::CantorMeasure(_) => "CantorMeasure",
            DistributionRep::ConstantOne { .. } => "ConstantOne",
            DistributionRep::Monomial { .. } => "Monomial",
            DistributionRep::Spectrum(_) => "Spectrum",
        }
    }

    /// Multiplies the distribution by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Ok(match self {
            DistributionRep::SampledFunction(f) => DistributionRep::SampledFunction(SampledFunction {
                values: f.values.iter().map(|v| v * c).collect(),
                ..f.clone()
            }),
            DistributionRep::PointMassDerivative { location, gamma, scale } => {
                DistributionRep::PointMassDerivative {
                    location: location.clone(),
                    gamma: gamma.clone(),
                    scale: scale * c,
                }
            }
            DistributionRep::CantorMeasure(mu) if c.im == 0.0 => {
                DistributionRep::CantorMeasure(DiscreteMeasure {
                    masses: mu.masses.iter().map(|m| m * c.re).collect(),
                    ..mu.clone()
                })
            }
            DistributionRep::Spectrum(inner) => DistributionRep::Spectrum(Box::new(inner.scaled(c)?)),
            other => {
                return Err(Error::Spec(format!("{} cannot be rescaled in place", other.name())));
            }
        })
    }
}

/// `T̂`: exact for the constant, monomials, and everything else as a spectrum.
pub fn fourier_transform(t: &DistributionRep) -> Result<DistributionRep> {
    let d = t.dim();
    let volume = (2.0 * PI).powi(d as i32);
    Ok(match t {
        DistributionRep::ConstantOne { d } => DistributionRep::PointMassDerivative {
            location: vec![0.0; *d],
            gamma: MultiIndex::zero(*d),
            scale: Complex64::new(volume, 0.0),
        },
        // x^γ ↦ (2π)^d (i∂)^γ δ_0
        DistributionRep::Monomial { gamma } => DistributionRep::PointMassDerivative {
            location: vec![0.0; d],
            gamma: gamma.clone(),
            scale: Complex64::new(0.0, 1.0).powu(gamma.order()) * volume,
        },
        DistributionRep::Spectrum(_) => {
            return Err(Error::Spec("the transform of a spectrum is not represented".into()));
        }
        other => DistributionRep::Spectrum(Box::new(other.clone())),
    })
}

/// Serializable description of a distribution, as taken by the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// `exp(-|x|^2 / (2 width^2))` sampled on `n^d` points.
    SampledGaussian { d: usize, n: usize, step: f64, width: f64 },
    SurfaceMeasure { d: usize, resolution: usize },
    PointMassDerivative {
        location: Vec<f64>,
        gamma: Vec<u32>,
        scale: [f64; 2],
    },
    CantorMeasure { spec: CantorSpec },
    ConstantOne { d: usize },
    Monomial { gamma: Vec<u32> },
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DistributionRep> {
        Ok(match self {
            DistributionSpec::SampledGaussian { d, n, step, width } => {
                if !(*width > 0.0) {
                    return Err(Error::NonPositive { index: 0, value: *width });
                }
                let w2 = 2.0 * width * width;
                DistributionRep::SampledFunction(SampledFunction::from_fn(*d, *n, *step, |x| {
                    Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / w2).exp(), 0.0)
                })?)
            }
            DistributionSpec::SurfaceMeasure { d, resolution } => {
                DistributionRep::SurfaceMeasure(sphere_rule(*d, *resolution)?)
            }
            DistributionSpec::PointMassDerivative { location, gamma, scale } => {
                if location.len() != gamma.len() {
                    return Err(Error::Spec("location and gamma differ in dimension".into()));
                }
                DistributionRep::PointMassDerivative {
                    location: location.clone(),
                    gamma: MultiIndex::new(gamma.clone())?,
                    scale: Complex64::new(scale[0], scale[1]),
                }
            }
            DistributionSpec::CantorMeasure { spec } => DistributionRep::CantorMeasure(build_cantor(spec)?),
            DistributionSpec::ConstantOne { d } => {
                if *d == 0 {
                    return Err(Error::UnsupportedDimension(0));
                }
                DistributionRep::ConstantOne { d: *d }
            }
            DistributionSpec::Monomial { gamma } => DistributionRep::Monomial {
                gamma: MultiIndex::new(gamma.clone())?,
            },
        })
    }
}

/// Integration region of a test function: `r_min <= |x| <= r_max`, optionally
/// within the angle `half_angle` of `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub r_min: f64,
    pub r_max: f64,
    pub cap: Option<(Vec<f64>, f64)>,
}

impl Support {
    pub fn contains(&self, x: &[f64]) -> bool {
        let r = norm(x);
        if r < self.r_min || r > self.r_max {
            return false;
        }
        match &self.cap {
            None => true,
            Some((dir, half)) => r > 0.0 && dot(x, dir) / r >= half.cos() - 1e-12,
        }
    }
}

/// A smooth, rapidly decaying test function with derivatives on demand.
pub trait TestFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Complex64;
    /// Taylor jet at `x` of the layout's order.
    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet>;
    fn support(&self) -> Support;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `exp(1 - 1/(1 - s))` for `s < 1`, zero beyond; smooth in `s` at `s = 1`.
fn bump_of(s: f64) -> f64 {
    if s < 1.0 {
        (1.0 - 1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

/// Jet version of [`bump_of`]; `None` when the value is zero to all orders.
fn bump_jet(s: &Jet) -> Option<Jet> {
    if s.value().re >= 1.0 {
        return None;
    }
    let one = Jet::constant(s.layout(), real(1.0));
    let inner = (&one - s).recip();
    Some((&one - &inner).exp())
}

fn squared_norm_jet(coords: &[Jet]) -> Jet {
    let mut acc = Jet::zero(coords[0].layout());
    for c in coords {
        acc = &acc + &(c * c);
    }
    acc
}

fn modulation_jet(coords: &[Jet], eta: &[f64]) -> Jet {
    let mut phase = Jet::zero(coords[0].layout());
    for (c, &e) in coords.iter().zip(eta) {
        if e != 0.0 {
            phase = &phase + &c.scale(real(e));
        }
    }
    phase.scale(Complex64::new(0.0, 1.0)).exp()
}

/// `exp(-a |x|^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTest {
    pub d: usize,
    pub a: f64,
}

impl TestFunction for GaussianTest {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> Complex64 {
        real((-self.a * dot(x, x)).exp())
    }

    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet> {
        let coords = Jet::coordinates(layout, x);
        Ok(squared_norm_jet(&coords).scale(real(-self.a)).exp())
    }

    fn support(&self) -> Support {
        Support {
            r_min: 0.0,
            r_max: (46.0 / self.a).sqrt(),
            cap: None,
        }
    }
}

/// `ψ(|x| / radius)` with `ψ = 1` on `[0, 1]` and `0` on `[2, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauBump {
    pub d: usize,
    pub radius: f64,
}

fn transition_jet(s: &Jet) -> Jet {
    s.recip().scale(real(-1.0)).exp()
}

impl TestFunction for PlateauBump {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> Complex64 {
        real(cutoff(norm(x) / self.radius))
    }

    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet> {
        let t = norm(x) / self.radius;
        if t <= 1.0 {
            return Ok(Jet::constant(layout, real(1.0)));
        }
        if t >= 2.0 {
            return Ok(Jet::zero(layout));
        }
        let coords = Jet::coordinates(layout, x);
        let t = squared_norm_jet(&coords).sqrt().scale(real(1.0 / self.radius));
        let two = Jet::constant(layout, real(2.0));
        let one = Jet::constant(layout, real(1.0));
        let a = transition_jet(&(&two - &t));
        let b = transition_jet(&(&t - &one));
        Ok(&a * &(&a + &b).recip())
    }

    fn support(&self) -> Support {
        Support {
            r_min: 0.0,
            r_max: 2.0 * self.radius,
            cap: None,
        }
    }
}

/// Where a test family is localized: a direction cone, or the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTarget {
    Direction(Vec<f64>),
    Zero,
}

impl fmt::Display for FamilyTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTarget::Zero => write!(f, "ZERO"),
            FamilyTarget::Direction(u) => {
                let parts: Vec<String> = u.iter().map(|v| format!("{v:.4}")).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

/// One member `φ(x) = Φ(σ x)` of a test family, with
/// `Φ(u) = R(|u|) A(u/|u|) e^{i u·η}` for a cone (radial bump on `[1, 2]`,
/// angular bump homogeneous of degree 0) or `Φ(u) = B(|u|) e^{i u·η}` on the
/// unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub target: FamilyTarget,
    pub half_angle: f64,
    pub sigma: f64,
    pub eta: Vec<f64>,
}

impl FamilyMember {
    fn d(&self) -> usize {
        self.eta.len()
    }

    /// `(1 - cos∠(u, dir)) / (1 - cos half_angle)`.
    fn angular_variable(&self, u: &[f64], dir: &[f64]) -> f64 {
        (1.0 - dot(u, dir) / norm(u)) / (1.0 - self.half_angle.cos())
    }

    fn base_value(&self, u: &[f64]) -> Complex64 {
        let envelope = match &self.target {
            FamilyTarget::Zero => bump_of(dot(u, u)),
            FamilyTarget::Direction(dir) => {
                let t = norm(u);
                if !(t > 1.0 && t < 2.0) {
                    return ZERO;
                }
                let s = self.angular_variable(u, dir);
                let z = 2.0 * t - 3.0;
                bump_of(z * z) * bump_of(s * s)
            }
        };
        if envelope == 0.0 {
            return ZERO;
        }
        Complex64::from_polar(envelope, dot(u, &self.eta))
    }

    fn base_jet(&self, u: &[f64], layout: &Arc<JetLayout>) -> Jet {
        if self.base_value(u) == ZERO {
            return Jet::zero(layout);
        }
        let coords = Jet::coordinates(layout, u);
        let r2 = squared_norm_jet(&coords);
        let envelope = match &self.target {
            FamilyTarget::Zero => bump_jet(&r2),
            FamilyTarget::Direction(dir) => {
                let t = r2.sqrt();
                let z = &t.scale(real(2.0)) - &Jet::constant(layout, real(3.0));
                let radial = bump_jet(&(&z * &z));
                let mut proj = Jet::zero(layout);
                for (c, &v) in coords.iter().zip(dir) {
                    proj = &proj + &c.scale(real(v));
                }
                let cosine = &proj * &t.recip();
                let one = Jet::constant(layout, real(1.0));
                let s = (&one - &cosine).scale(real(1.0 / (1.0 - self.half_angle.cos())));
                let angular = bump_jet(&(&s * &s));
                match (radial, angular) {
                    (Some(r), Some(a)) => Some(&r * &a),
                    _ => None,
                }
            }
        };
        match envelope {
            None => Jet::zero(layout),
            Some(e) => &e * &modulation_jet(&coords, &self.eta),
        }
    }
}

impl TestFunction for FamilyMember {
    fn dim(&self) -> usize {
        self.d()
    }

    fn value(&self, x: &[f64]) -> Complex64 {
        let u: Vec<f64> = x.iter().map(|v| v * self.sigma).collect();
        self.base_value(&u)
    }

    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet> {
        let u: Vec<f64> = x.iter().map(|v| v * self.sigma).collect();
        Ok(self.base_jet(&u, layout).rescale_arguments(self.sigma))
    }

    fn support(&self) -> Support {
        match &self.target {
            FamilyTarget::Zero => Support {
                r_min: 0.0,
                r_max: 1.0 / self.sigma,
                cap: None,
            },
            FamilyTarget::Direction(dir) => Support {
                r_min: 1.0 / self.sigma,
                r_max: 2.0 / self.sigma,
                cap: Some((dir.clone(), self.half_angle)),
            },
        }
    }
}

/// `∂^α φ`.
#[derive(Clone)]
pub struct Derivative {
    pub inner: Arc<dyn TestFunction>,
    pub alpha: MultiIndex,
}

impl TestFunction for Derivative {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Complex64 {
        let layout = JetLayout::new(self.dim(), 0);
        self.jet(x, &layout).map_or(ZERO, |j| j.value())
    }

    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet> {
        let wide = JetLayout::new(self.dim(), layout.order() + self.alpha.order());
        let full = self.inner.jet(x, &wide)?;
        Ok(Jet::from_fn(layout, |beta| {
            let sum: Vec<u32> = beta
                .entries()
                .iter()
                .zip(self.alpha.entries())
                .map(|(b, a)| a + b)
                .collect();
            let shifted = MultiIndex::new(sum).expect("nonempty");
            full.coefficient(&shifted) * (shifted.factorial() / beta.factorial())
        }))
    }

    fn support(&self) -> Support {
        self.inner.support()
    }
}

/// `Σ c_i φ_i`.
#[derive(Clone)]
pub struct Combination {
    pub terms: Vec<(Complex64, Arc<dyn TestFunction>)>,
}

impl TestFunction for Combination {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn value(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.value(x)).sum()
    }

    fn jet(&self, x: &[f64], layout: &Arc<JetLayout>) -> Result<Jet> {
        let mut acc = Jet::zero(layout);
        for (c, f) in &self.terms {
            acc = &acc + &f.jet(x, layout)?.scale(*c);
        }
        Ok(acc)
    }

    fn support(&self) -> Support {
        let r_min = self.terms.iter().map(|(_, f)| f.support().r_min).fold(f64::INFINITY, f64::min);
        let r_max = self.terms.iter().map(|(_, f)| f.support().r_max).fold(0.0, f64::max);
        Support { r_min, r_max, cap: None }
    }
}

/// Resolution of the polar quadrature over a test function's support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub radial_panels: usize,
    pub order: usize,
    pub angular: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            radial_panels: 4,
            order: 16,
            angular: 48,
        }
    }
}

fn orthonormal_frame(dir: &[f64]) -> Vec<Vec<f64>> {
    let d = dir.len();
    let mut frame = vec![dir.to_vec()];
    for i in 0..d {
        if frame.len() == d {
            break;
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for f in &frame {
            let p = dot(&v, f);
            for (a, b) in v.iter_mut().zip(f) {
                *a -= p * b;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            frame.push(v.iter().map(|x| x / n).collect());
        }
    }
    frame
}

/// Nodes and weights for `∫ f dx` over the support region.
pub fn support_nodes(support: &Support, d: usize, settings: &QuadratureSettings) -> Result<Vec<(Vec<f64>, f64)>> {
    let radial = Grid1D::composite(settings.radial_panels, settings.order, support.r_min, support.r_max)?;
    let (dir, half) = match &support.cap {
        Some((dir, half)) => {
            let n = norm(dir);
            (dir.iter().map(|v| v / n).collect::<Vec<f64>>(), *half)
        }
        None => {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            (e, PI)
        }
    };
    let mut out = Vec::new();
    match d {
        1 => {
            for (&r, &w) in radial.nodes().iter().zip(radial.weights()) {
                out.push((vec![r * dir[0]], w));
                if half >= PI / 2.0 {
                    out.push((vec![-r * dir[0]], w));
                }
            }
        }
        2 => {
            let theta0 = dir[1].atan2(dir[0]);
            let angles: Vec<(f64, f64)> = if half >= PI {
                let h = 2.0 * PI / settings.angular as f64;
                (0..settings.angular).map(|i| (i as f64 * h, h)).collect()
            } else {
                let g = Grid1D::composite(2, settings.angular / 2, theta0 - half, theta0 + half)?;
                g.nodes().iter().copied().zip(g.weights().iter().copied()).collect()
            };
            for (&r, &w) in radial.nodes().iter().zip(radial.weights()) {
                for &(t, wt) in &angles {
                    out.push((vec![r * t.cos(), r * t.sin()], w * wt * r));
                }
            }
        }
        3 => {
            let frame = orthonormal_frame(&dir);
            let polar = Grid1D::composite(2, settings.angular / 2, 0.0, half.min(PI))?;
            let naz = 2 * settings.angular;
            let h = 2.0 * PI / naz as f64;
            for (&r, &w) in radial.nodes().iter().zip(radial.weights()) {
                for (&t, &wt) in polar.nodes().iter().zip(polar.weights()) {
                    let (s, c) = t.sin_cos();
                    for j in 0..naz {
                        let p = j as f64 * h;
                        let x: Vec<f64> = (0..3)
                            .map(|i| r * (c * frame[0][i] + s * (p.cos() * frame[1][i] + p.sin() * frame[2][i])))
                            .collect();
                        out.push((x, w * wt * h * s * r * r));
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    }
    Ok(out)
}

fn max_order(pairs: &[(MultiIndex, MultiIndex)], f: impl Fn(&MultiIndex, &MultiIndex) -> u32) -> u32 {
    pairs.iter().map(|(a, b)| f(a, b)).max().unwrap_or(0)
}

fn sign(order: u32) -> f64 {
    if order.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn add_indices(a: &MultiIndex, b: &MultiIndex) -> MultiIndex {
    MultiIndex::new(a.entries().iter().zip(b.entries()).map(|(x, y)| x + y).collect()).expect("nonempty")
}

/// `(-1)^{|α|} ∂^α (x^β φ)(x)` from the jet of `φ` at `x`.
fn transferred(phi: &Jet, x: &[f64], alpha: &MultiIndex, beta: &MultiIndex) -> Complex64 {
    let layout = phi.layout();
    let coords = Jet::coordinates(layout, x);
    let mut prod = phi.clone();
    for (c, &b) in coords.iter().zip(beta.entries()) {
        for _ in 0..b {
            prod = &prod * c;
        }
    }
    prod.derivative(alpha) * sign(alpha.order())
}

/// Integrates per-node contributions in node order.
fn ordered_sum(parts: Vec<Vec<Complex64>>, len: usize) -> Vec<Complex64> {
    let mut acc = vec![ZERO; len];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc
}

/// `⟨x^β D^α T, φ⟩`.
pub fn pair(t: &DistributionRep, alpha: &MultiIndex, beta: &MultiIndex, phi: &dyn TestFunction) -> Result<Complex64> {
    Ok(pair_many(t, &[(alpha.clone(), beta.clone())], phi, &QuadratureSettings::default())?[0])
}

/// `⟨x^β D^α T, φ⟩` for several `(α, β)` at once.
pub fn pair_many(
    t: &DistributionRep,
    pairs: &[(MultiIndex, MultiIndex)],
    phi: &dyn TestFunction,
    settings: &QuadratureSettings,
) -> Result<Vec<Complex64>> {
    let d = t.dim();
    if phi.dim() != d {
        return Err(Error::Spec(format!(
            "test function in dimension {} paired with a distribution in dimension {d}",
            phi.dim()
        )));
    }
    if let Some((a, b)) = pairs.iter().find(|(a, b)| a.dim() != d || b.dim() != d) {
        return Err(Error::Spec(format!("index pair {a}, {b} does not live in dimension {d}")));
    }
    let n = pairs.len();
    match t {
        DistributionRep::PointMassDerivative { location, gamma, scale } => {
            let order = max_order(pairs, |a, _| a.order()) + gamma.order();
            let layout = JetLayout::new(d, order);
            let jet = phi.jet(location, &layout)?;
            Ok(pairs
                .iter()
                .map(|(a, b)| {
                    let total = add_indices(a, gamma);
                    // c (-1)^{|α|+|γ|} ∂^{α+γ}(x^β φ)(x_0)
                    scale * transferred(&jet, location, &total, b)
                })
                .collect())
        }
        DistributionRep::SurfaceMeasure(rule) => {
            let points: Vec<(Vec<f64>, f64)> = rule.points().iter().cloned().zip(rule.weights().iter().copied()).collect();
            jet_measure_pairing(&points, pairs, phi)
        }
        DistributionRep::CantorMeasure(mu) => {
            let points: Vec<(Vec<f64>, f64)> = mu.atoms.iter().map(|&a| vec![a]).zip(mu.masses.iter().copied()).collect();
            jet_measure_pairing(&points, pairs, phi)
        }
        DistributionRep::SampledFunction(f) => {
            let support = phi.support();
            let cell = f.step.powi(d as i32);
            let mut derivs: HashMap<&MultiIndex, Vec<Complex64>> = HashMap::new();
            for (a, _) in pairs {
                derivs.entry(a).or_insert_with(|| f.spectral_derivative(a));
            }
            let mut acc = vec![ZERO; n];
            for j in 0..f.len() {
                let x = f.point(j);
                if !support.contains(&x) {
                    continue;
                }
                let v = phi.value(&x);
                if v == ZERO {
                    continue;
                }
                for (slot, (a, b)) in acc.iter_mut().zip(pairs) {
                    *slot += derivs[a][j] * b.monomial(&x) * v * cell;
                }
            }
            Ok(acc)
        }
        DistributionRep::ConstantOne { .. } | DistributionRep::Monomial { .. } => {
            let nodes = support_nodes(&phi.support(), d, settings)?;
            let parts: Vec<Vec<Complex64>> = nodes
                .par_iter()
                .map(|(x, w)| {
                    let v = phi.value(x) * w;
                    pairs
                        .iter()
                        .map(|(a, b)| v * b.monomial(x) * polynomial_derivative(t, a, x))
                        .collect()
                })
                .collect();
            Ok(ordered_sum(parts, n))
        }
        DistributionRep::Spectrum(inner) => spectrum_pairing(inner, pairs, phi, settings),
    }
}

/// `∂^α` of the constant or of `x^γ`, at `x`.
fn polynomial_derivative(t: &DistributionRep, alpha: &MultiIndex, x: &[f64]) -> f64 {
    match t {
        DistributionRep::ConstantOne { .. } => {
            if alpha.order() == 0 {
                1.0
            } else {
                0.0
            }
        }
        DistributionRep::Monomial { gamma } => {
            let mut c = 1.0;
            let mut rest = Vec::with_capacity(gamma.dim());
            for (&g, &a) in gamma.entries().iter().zip(alpha.entries()) {
                if a > g {
                    return 0.0;
                }
                c *= ((g - a + 1)..=g).map(f64::from).product::<f64>();
                rest.push(g - a);
            }
            c * MultiIndex::new(rest).expect("nonempty").monomial(x)
        }
        _ => unreachable!("only polynomial distributions"),
    }
}

fn jet_measure_pairing(
    points: &[(Vec<f64>, f64)],
    pairs: &[(MultiIndex, MultiIndex)],
    phi: &dyn TestFunction,
) -> Result<Vec<Complex64>> {
    let d = phi.dim();
    let layout = JetLayout::new(d, max_order(pairs, |a, _| a.order()));
    let support = phi.support();
    let parts: Result<Vec<Vec<Complex64>>> = points
        .par_iter()
        .map(|(x, w)| {
            if !support.contains(x) {
                return Ok(vec![ZERO; pairs.len()]);
            }
            let jet = phi.jet(x, &layout)?;
            Ok(pairs.iter().map(|(a, b)| transferred(&jet, x, a, b) * *w).collect())
        })
        .collect();
    Ok(ordered_sum(parts?, pairs.len()))
}

/// Nodes `x_j`, weights `w_j` of a measure `Σ w_j δ_{x_j}` whose transform is
/// `Σ w_j e^{-i x_j·ξ}`, plus the box outside which the transform is zero.
fn spectral_nodes(inner: &DistributionRep) -> Result<(Vec<Vec<f64>>, Vec<Complex64>, Option<f64>)> {
    Ok(match inner {
        DistributionRep::SampledFunction(f) => {
            let cell = f.step.powi(f.dim() as i32);
            (
                (0..f.len()).map(|j| f.point(j)).collect(),
                f.values.iter().map(|v| v * cell).collect(),
                Some(PI / f.step),
            )
        }
        DistributionRep::SurfaceMeasure(rule) => (
            rule.points().to_vec(),
            rule.weights().iter().map(|&w| real(w)).collect(),
            None,
        ),
        DistributionRep::CantorMeasure(mu) => (
            mu.atoms.iter().map(|&a| vec![a]).collect(),
            mu.masses.iter().map(|&m| real(m)).collect(),
            None,
        ),
        other => {
            return Err(Error::Spec(format!("{} has no spectral node form", other.name())));
        }
    })
}

fn spectrum_pairing(
    inner: &DistributionRep,
    pairs: &[(MultiIndex, MultiIndex)],
    phi: &dyn TestFunction,
    settings: &QuadratureSettings,
) -> Result<Vec<Complex64>> {
    let d = phi.dim();
    let nodes = support_nodes(&phi.support(), d, settings)?;
    let alphas: Vec<MultiIndex> = {
        let mut seen = HashSet::new();
        pairs.iter().filter(|(a, _)| seen.insert(a.clone())).map(|(a, _)| a.clone()).collect()
    };
    let slot: Vec<usize> = pairs
        .iter()
        .map(|(a, _)| alphas.iter().position(|x| x == a).expect("collected"))
        .collect();
    // D^α g(ξ) for every needed α at one node.
    let derivs: Box<dyn Fn(&[f64]) -> Result<Vec<Complex64>> + Sync> = match inner {
        DistributionRep::PointMassDerivative { location, gamma, scale } => {
            let layout = JetLayout::new(d, alphas.iter().map(MultiIndex::order).max().unwrap_or(0));
            let (location, gamma, scale) = (location.clone(), gamma.clone(), *scale);
            Box::new(move |xi: &[f64]| {
                // c (iξ)^γ e^{-i x_0·ξ}
                let coords = Jet::coordinates(&layout, xi);
                let mut g = modulation_jet(&coords, &location.iter().map(|v| -v).collect::<Vec<_>>()).scale(scale);
                for (c, &k) in coords.iter().zip(gamma.entries()) {
                    let ic = c.scale(Complex64::new(0.0, 1.0));
                    for _ in 0..k {
                        g = &g * &ic;
                    }
                }
                Ok(alphas.iter().map(|a| g.derivative(a)).collect())
            })
        }
        other => {
            let (xs, ws, band) = spectral_nodes(other)?;
            let moments: Vec<Vec<Complex64>> = xs
                .iter()
                .map(|x| {
                    alphas
                        .iter()
                        .map(|a| {
                            let mono = a.monomial(x);
                            Complex64::new(0.0, -1.0).powu(a.order()) * mono
                        })
                        .collect()
                })
                .collect();
            let alphas_len = alphas.len();
            Box::new(move |xi: &[f64]| {
                if let Some(b) = band {
                    if xi.iter().any(|v| v.abs() > b) {
                        return Ok(vec![ZERO; alphas_len]);
                    }
                }
                let mut out = vec![ZERO; alphas_len];
                for ((x, w), m) in xs.iter().zip(&ws).zip(&moments) {
                    let e = w * Complex64::from_polar(1.0, -dot(x, xi));
                    for (o, mk) in out.iter_mut().zip(m) {
                        *o += e * mk;
                    }
                }
                Ok(out)
            })
        }
    };
    let parts: Result<Vec<Vec<Complex64>>> = nodes
        .par_iter()
        .map(|(xi, w)| {
            let v = phi.value(xi);
            if v == ZERO {
                return Ok(vec![ZERO; pairs.len()]);
            }
            let g = derivs(xi)?;
            Ok(pairs
                .iter()
                .zip(&slot)
                .map(|((_, b), &s)| g[s] * b.monomial(xi) * v * *w)
                .collect())
        })
        .collect();
    Ok(ordered_sum(parts?, pairs.len()))
}

/// One element `(α, β)` of a parameter set, with its growth constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterEntry {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub growth: f64,
}

/// A finite parameter set with a common exponent `q ∈ [1, ∞]` and its growth
/// constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPair {
    pub q: f64,
    pub entries: Vec<ParameterEntry>,
    pub downward_closed: bool,
}

fn below(a: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::zero(a.dim())];
    for (i, &k) in a.entries().iter().enumerate() {
        let mut next = Vec::new();
        for base in &out {
            for v in 0..=k {
                let mut e = base.entries().to_vec();
                e[i] = v;
                next.push(MultiIndex::new(e).expect("nonempty"));
            }
        }
        out = next;
    }
    out
}

impl ParameterPair {
    pub fn new(q: f64, entries: Vec<ParameterEntry>) -> Result<Self> {
        if !(q >= 1.0) {
            return Err(Error::domain(format!("exponent q = {q} must lie in [1, ∞]")));
        }
        let first = entries.first().ok_or_else(|| Error::Spec("empty parameter set".into()))?;
        let d = first.alpha.dim();
        for (i, e) in entries.iter().enumerate() {
            if e.alpha.dim() != d || e.beta.dim() != d {
                return Err(Error::Spec("mixed dimensions in parameter set".into()));
            }
            if !(e.growth > 0.0 && e.growth.is_finite()) {
                return Err(Error::NonPositive { index: i, value: e.growth });
            }
            if e.alpha.order() + e.beta.order() > MAX_TOTAL_ORDER {
                return Err(Error::capacity(format!(
                    "index ({}, {}) exceeds the truncation |α| + |β| <= {MAX_TOTAL_ORDER}",
                    e.alpha, e.beta
                )));
            }
        }
        let present: HashSet<(MultiIndex, MultiIndex)> =
            entries.iter().map(|e| (e.alpha.clone(), e.beta.clone())).collect();
        let downward_closed = entries.iter().all(|e| {
            below(&e.alpha)
                .iter()
                .all(|a| below(&e.beta).iter().all(|b| present.contains(&(a.clone(), b.clone()))))
        });
        Ok(ParameterPair {
            q,
            entries,
            downward_closed,
        })
    }

    /// All `(α, β)` with `|α| + |β| <= n` and growth constants
    /// `A^{|α|+|β|} M_{|α|} M'_{|β|}`.
    pub fn canonical(d: usize, n: u32, q: f64, a: f64, m: &[f64], m_prime: &[f64]) -> Result<Self> {
        if (m.len() as u32) <= n || (m_prime.len() as u32) <= n {
            return Err(Error::Spec(format!("weight sequences must reach index {n}")));
        }
        let mut entries = Vec::new();
        for alpha in MultiIndex::up_to(d, n) {
            for beta in MultiIndex::up_to(d, n - alpha.order()) {
                let growth = a.powi((alpha.order() + beta.order()) as i32)
                    * m[alpha.order() as usize]
                    * m_prime[beta.order() as usize];
                entries.push(ParameterEntry {
                    alpha: alpha.clone(),
                    beta,
                    growth,
                });
            }
        }
        Self::new(q, entries)
    }

    /// All `(α, β)` with `|α| + |β| <= n` and unit growth constants.
    pub fn total_order(d: usize, n: u32, q: f64) -> Result<Self> {
        let ones = vec![1.0; n as usize + 1];
        Self::canonical(d, n, q, 1.0, &ones, &ones)
    }

    pub fn dim(&self) -> usize {
        self.entries[0].alpha.dim()
    }
}

/// `1/p + 1/q = 1`.
pub fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

/// The dual set `{(β, α, p)}` with the conjugate exponent.
pub fn dual_parameter_set(p: &ParameterPair) -> Result<ParameterPair> {
    if !(p.q > 1.0 && p.q.is_finite()) {
        return Err(Error::domain(format!(
            "the dual parameter set needs 1 < q < ∞, got q = {}",
            p.q
        )));
    }
    let entries = p
        .entries
        .iter()
        .map(|e| ParameterEntry {
            alpha: e.beta.clone(),
            beta: e.alpha.clone(),
            growth: e.growth,
        })
        .collect();
    ParameterPair::new(conjugate_exponent(p.q), entries)
}

/// Cone-localized (or ball-localized) test functions under a dilation ladder.
///
/// Cone members are `Φ(ξ/λ)`, moving out along the cone; ball members are
/// `Φ(λ ξ)`, shrinking into the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFamily {
    pub d: usize,
    pub target: FamilyTarget,
    /// Full opening angle of the cone in radians.
    pub aperture: f64,
    pub ladder: Vec<f64>,
    pub modulations: Vec<Vec<f64>>,
}

impl TestFamily {
    pub fn new(d: usize, target: FamilyTarget, aperture: f64, ladder: Vec<f64>, modulations: Vec<Vec<f64>>) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if let FamilyTarget::Direction(u) = &target {
            if u.len() != d || (norm(u) - 1.0).abs() > 1e-9 {
                return Err(Error::Spec(format!("direction {target} is not a unit vector in R^{d}")));
            }
        }
        if !(aperture > 0.0 && aperture < PI) {
            return Err(Error::domain(format!("aperture {aperture} must lie in (0, π)")));
        }
        if ladder.is_empty() || ladder.iter().any(|&l| !(l > 0.0)) || ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spec("dilation ladder must be positive and increasing".into()));
        }
        if modulations.is_empty() || modulations.iter().any(|m| m.len() != d) {
            return Err(Error::Spec("modulations must be nonempty vectors in R^d".into()));
        }
        Ok(TestFamily {
            d,
            target,
            aperture,
            ladder,
            modulations,
        })
    }

    /// Ladder `λ = 2^0, ..., 2^10` and modulations `η ∈ {0, e_1, ..., e_d}`.
    pub fn standard(d: usize, target: FamilyTarget, aperture: f64) -> Result<Self> {
        let ladder = (0..=10).map(|j| 2f64.powi(j)).collect();
        let mut modulations = vec![vec![0.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            modulations.push(e);
        }
        Self::new(d, target, aperture, ladder, modulations)
    }

    fn sigma(&self, lambda: f64) -> f64 {
        match self.target {
            FamilyTarget::Zero => lambda,
            FamilyTarget::Direction(_) => 1.0 / lambda,
        }
    }

    pub fn member(&self, lambda: f64, eta: &[f64]) -> FamilyMember {
        FamilyMember {
            target: self.target.clone(),
            half_angle: self.aperture / 2.0,
            sigma: self.sigma(lambda),
            eta: eta.to_vec(),
        }
    }

    /// `‖Φ‖_{L^p}` of the undilated profile; modulations do not change it.
    pub fn base_norm(&self, p: f64, settings: &QuadratureSettings) -> Result<f64> {
        if p.is_infinite() {
            return Ok(1.0);
        }
        let base = self.member(1.0, &vec![0.0; self.d]);
        let nodes = support_nodes(&base.support(), self.d, settings)?;
        let s: f64 = nodes.iter().map(|(x, w)| base.value(x).norm().powf(p) * w).sum();
        Ok(s.powf(1.0 / p))
    }

    /// `‖φ_λ‖_{L^p} = σ^{-d/p} ‖Φ‖_{L^p}`.
    pub fn member_norm(&self, lambda: f64, base_norm: f64, p: f64) -> f64 {
        if p.is_infinite() {
            return base_norm;
        }
        self.sigma(lambda).powf(-(self.d as f64) / p) * base_norm
    }

    /// Checks on `samples` points per member that nothing leaks out of the cone
    /// (or the unit ball).
    pub fn check_support(&self, samples: usize) -> Result<()> {
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for &lambda in &self.ladder {
            let member = self.member(lambda, &self.modulations[0]);
            let support = member.support();
            let outer = 3.0 * support.r_max;
            for _ in 0..samples {
                let x: Vec<f64> = (0..self.d).map(|_| outer * next()).collect();
                let inside = match &self.target {
                    FamilyTarget::Zero => norm(&x) < 1.0,
                    FamilyTarget::Direction(u) => {
                        let r = norm(&x);
                        r > 0.0 && dot(&x, u) / r > (self.aperture / 2.0).cos()
                    }
                };
                if !inside && member.value(&x) != ZERO {
                    return Err(Error::Spec(format!(
                        "member λ = {lambda} is nonzero at {x:?}, outside its cone"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "BOUNDED",
            Verdict::Unbounded => "UNBOUNDED",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

/// Ratios of one index pair across the ladder, sup over modulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRatios {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub growth: f64,
    pub ratios: Vec<f64>,
    /// Power-law fit of the positive ratios against `λ`.
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub target: FamilyTarget,
    pub ladder: Vec<f64>,
    /// Exponent of the test-function norm in the denominator.
    pub norm_exponent: f64,
    /// Exponent of the sequence norm over index pairs.
    pub summability_exponent: f64,
    pub per_index: Vec<IndexRatios>,
    /// `ℓ^r` norm over index pairs of the ratios, per ladder rung.
    pub aggregate: Vec<f64>,
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
    pub monotone: bool,
    pub verdict: Verdict,
}

/// Slope above which, with enough decades and a good fit, ratios count as
/// unbounded.
pub const UNBOUNDED_SLOPE: f64 = 0.2;
pub const BOUNDED_SLOPE: f64 = 0.1;
pub const MIN_R_SQUARED: f64 = 0.95;
pub const MIN_DECADES: f64 = 3.0;

fn positive_fit(ladder: &[f64], values: &[f64]) -> Option<FitResult> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > 1e-300 && v.is_finite())
        .map(|(&x, &v)| (x, v))
        .unzip();
    if xs.len() < 3 {
        return None;
    }
    fit_loglog(&xs, &ys, 0..xs.len()).ok()
}

/// Verdict for a ratio sequence along the ladder.
pub fn classify(ladder: &[f64], values: &[f64]) -> (Verdict, Option<FitResult>, bool) {
    let monotone = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9) && w[1] > 0.0);
    if values.iter().all(|&v| v == 0.0) {
        return (Verdict::Bounded, None, monotone);
    }
    let fit = positive_fit(ladder, values);
    let verdict = match &fit {
        None => {
            if values.windows(2).all(|w| w[1] <= w[0]) {
                Verdict::Bounded
            } else {
                Verdict::Undecided
            }
        }
        Some(f) => {
            let decades = (ladder[ladder.len() - 1] / ladder[0]).log10();
            if monotone && decades >= MIN_DECADES && f.slope > UNBOUNDED_SLOPE && f.r_squared > MIN_R_SQUARED {
                Verdict::Unbounded
            } else if f.slope <= BOUNDED_SLOPE {
                Verdict::Bounded
            } else {
                Verdict::Undecided
            }
        }
    };
    (verdict, fit, monotone)
}

fn sequence_norm(values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        values.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

fn decay_fit_with(
    t: &DistributionRep,
    entries: &[ParameterEntry],
    norm_exponent: f64,
    summability_exponent: f64,
    family: &TestFamily,
    settings: &QuadratureSettings,
) -> Result<DecayFit> {
    if family.d != t.dim() {
        return Err(Error::Spec(format!(
            "family in dimension {} for a distribution in dimension {}",
            family.d,
            t.dim()
        )));
    }
    let pairs: Vec<(MultiIndex, MultiIndex)> = entries.iter().map(|e| (e.alpha.clone(), e.beta.clone())).collect();
    let base = family.base_norm(norm_exponent, settings)?;
    let jobs: Vec<(usize, usize)> = (0..family.ladder.len())
        .flat_map(|i| (0..family.modulations.len()).map(move |m| (i, m)))
        .collect();
    let values: Result<Vec<Vec<Complex64>>> = jobs
        .par_iter()
        .map(|&(i, m)| {
            let lambda = family.ladder[i];
            let eta = &family.modulations[m];
            pair_many(t, &pairs, &family.member(lambda, eta), settings)
                .map_err(|e| e.context(format!("family member {} λ = {lambda}, η = {eta:?}", family.target)))
        })
        .collect();
    let values = values?;
    let mut ratios = vec![vec![0.0; family.ladder.len()]; entries.len()];
    for (&(i, _), vals) in jobs.iter().zip(&values) {
        let denom = family.member_norm(family.ladder[i], base, norm_exponent);
        for (k, v) in vals.iter().enumerate() {
            let r = v.norm() / (entries[k].growth * denom);
            if r > ratios[k][i] {
                ratios[k][i] = r;
            }
        }
    }
    let aggregate: Vec<f64> = (0..family.ladder.len())
        .map(|i| sequence_norm(&ratios.iter().map(|r| r[i]).collect::<Vec<_>>(), summability_exponent))
        .collect();
    let per_index = entries
        .iter()
        .zip(ratios)
        .map(|(e, r)| IndexRatios {
            alpha: e.alpha.clone(),
            beta: e.beta.clone(),
            growth: e.growth,
            fit: positive_fit(&family.ladder, &r),
            ratios: r,
        })
        .collect();
    let (verdict, fit, monotone) = classify(&family.ladder, &aggregate);
    Ok(DecayFit {
        target: family.target.clone(),
        ladder: family.ladder.clone(),
        norm_exponent,
        summability_exponent,
        per_index,
        aggregate,
        slope: fit.as_ref().map(|f| f.slope),
        r_squared: fit.as_ref().map(|f| f.r_squared),
        monotone,
        verdict,
    })
}

/// Ratios `|⟨x^β D^α T, φ⟩| / (c ‖φ‖_{L^p})` over the family, `1/p + 1/q = 1`,
/// summed in `ℓ^q` over the parameter set.
pub fn directional_decay_fit(t: &DistributionRep, p: &ParameterPair, family: &TestFamily) -> Result<DecayFit> {
    decay_fit_with(
        t,
        &p.entries,
        conjugate_exponent(p.q),
        p.q,
        family,
        &QuadratureSettings::default(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Full cone aperture in radians.
    pub aperture: f64,
    pub ladder: Vec<f64>,
    /// Test the decay of `T̂` against the dual parameter set (Fourier
    /// microglobal regularity) instead of the decay of `T` itself.
    pub fourier: bool,
    pub settings: QuadratureSettings,
}

impl ScanConfig {
    pub fn new(aperture_degrees: f64, fourier: bool) -> Self {
        ScanConfig {
            aperture: aperture_degrees.to_radians(),
            ladder: (0..=10).map(|j| 2f64.powi(j)).collect(),
            fourier,
            settings: QuadratureSettings {
                radial_panels: 2,
                order: 16,
                angular: 32,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefrontSet {
    pub flagged: Vec<FamilyTarget>,
    pub undecided: Vec<FamilyTarget>,
    pub fits: Vec<DecayFit>,
}

/// `n` equispaced unit directions on the circle, followed by `ZERO`.
pub fn circle_directions(n: usize) -> Vec<FamilyTarget> {
    let mut out: Vec<FamilyTarget> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            FamilyTarget::Direction(vec![t.cos(), t.sin()])
        })
        .collect();
    out.push(FamilyTarget::Zero);
    out
}

/// Directions whose family yields UNBOUNDED ratios.
///
/// With `fourier` set, pairings are `⟨ξ^α D^β T̂, φ⟩` normalized by
/// `‖φ‖_{L^q}` and summed in `ℓ^p`: the dual parameter set applied to `T̂`,
/// written so that `q = 1` needs no conjugation.
pub fn wavefront_scan(
    t: &DistributionRep,
    p: &ParameterPair,
    directions: &[FamilyTarget],
    config: &ScanConfig,
) -> Result<WavefrontSet> {
    if directions.is_empty() {
        return Err(Error::Spec("wavefront scan needs at least one direction".into()));
    }
    let d = t.dim();
    let (target, entries, norm_exponent, summability) = if config.fourier {
        let swapped: Vec<ParameterEntry> = p
            .entries
            .iter()
            .map(|e| ParameterEntry {
                alpha: e.beta.clone(),
                beta: e.alpha.clone(),
                growth: e.growth,
            })
            .collect();
        (fourier_transform(t)?, swapped, p.q, conjugate_exponent(p.q))
    } else {
        (t.clone(), p.entries.clone(), conjugate_exponent(p.q), p.q)
    };
    let modulations = {
        let mut m = vec![vec![0.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            m.push(e);
        }
        m
    };
    let fits: Result<Vec<DecayFit>> = directions
        .par_iter()
        .map(|dir| {
            let family = TestFamily::new(d, dir.clone(), config.aperture, config.ladder.clone(), modulations.clone())?;
            decay_fit_with(&target, &entries, norm_exponent, summability, &family, &config.settings)
        })
        .collect();
    let fits = fits?;
    let pick = |v: Verdict| -> Vec<FamilyTarget> {
        fits.iter().filter(|f| f.verdict == v).map(|f| f.target.clone()).collect()
    };
    Ok(WavefrontSet {
        flagged: pick(Verdict::Unbounded),
        undecided: pick(Verdict::Undecided),
        fits,
    })
}

/// Smooth profiles with derivatives in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum SmoothProfile {
    /// `exp(-a x^2)` on `R`.
    Gaussian { a: f64 },
    /// `1 / (1 + x^2)` on `R`.
    Lorentzian,
    /// `f_{(d-2)/2}(|ξ|)` on `R^d`, the radial profile of the sphere transform.
    SphereProfile { d: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Membership {
    Member,
    NonMember { diverging_index: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyMembership {
    pub profile: SmoothProfile,
    pub q: f64,
    pub s: f64,
    pub norms: Vec<f64>,
    pub fit: Option<GevreyFit>,
    pub membership: Membership,
}

/// Relative slack on the fitted Gevrey exponent.
pub const MEMBERSHIP_SLACK: f64 = 0.1;

fn profile_norms(profile: &SmoothProfile, q: f64, k_max: usize) -> Result<Vec<f64>> {
    match *profile {
        SmoothProfile::Gaussian { a } => {
            if !(a > 0.0) {
                return Err(Error::NonPositive { index: 0, value: a });
            }
            let ra = a.sqrt();
            let grid = Grid1D::composite(96, 16, 0.0, 9.0 / ra)?;
            Ok((0..=k_max)
                .map(|k| {
                    // f^{(k)}(x) = (-√a)^k H_k(√a x) e^{-a x^2}
                    let s = grid.integrate(|x| {
                        let y = ra * x;
                        let (mut h0, mut h1) = (1.0, 2.0 * y);
                        let hk = if k == 0 {
                            h0
                        } else {
                            for j in 1..k {
                                let h2 = 2.0 * y * h1 - 2.0 * j as f64 * h0;
                                h0 = h1;
                                h1 = h2;
                            }
                            h1
                        };
                        (ra.powi(k as i32) * hk * (-y * y).exp()).abs().powf(q)
                    });
                    (2.0 * s).powf(1.0 / q)
                })
                .collect())
        }
        SmoothProfile::Lorentzian => {
            // x = tan θ: (x - i)^{-1} = i e^{-iθ} cos θ and f^{(k)} = (-1)^k k! Im (x - i)^{-k-1}.
            let grid = Grid1D::composite(64, 16, 0.0, PI / 2.0)?;
            Ok((0..=k_max)
                .map(|k| {
                    let fact: f64 = (1..=k).map(|j| j as f64).product();
                    let s = grid.integrate(|theta| {
                        let c = theta.cos();
                        if c <= 0.0 {
                            return 0.0;
                        }
                        let z = (Complex64::new(0.0, 1.0) * Complex64::from_polar(c, -theta)).powu(k as u32 + 1);
                        (fact * z.im).abs().powf(q) / (c * c)
                    });
                    (2.0 * s).powf(1.0 / q)
                })
                .collect())
        }
        SmoothProfile::SphereProfile { d } => {
            let table = coeff_tables(k_max.max(8))?;
            Ok(gevrey_norm_sequence(d, q, k_max, &table)?.norms)
        }
    }
}

/// Whether `‖f^{(k)}‖_{L^q} <= C A^k k^{ks}` fits, from the norm sequence up to
/// `k_max` and the fitted `s` with a 10% allowance.
pub fn gevrey_membership(profile: &SmoothProfile, q: f64, s: f64, k_max: usize) -> Result<GevreyMembership> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("Gevrey order s = {s} must be nonnegative")));
    }
    if !(q >= 1.0) {
        return Err(Error::domain(format!("exponent q = {q} must be >= 1")));
    }
    let norms = match profile_norms(profile, q, k_max) {
        Ok(n) => n,
        Err(Error::BelowThreshold { .. }) => {
            return Ok(GevreyMembership {
                profile: profile.clone(),
                q,
                s,
                norms: vec![f64::INFINITY],
                fit: None,
                membership: Membership::NonMember {
                    diverging_index: Some(0),
                },
            });
        }
        Err(e) => return Err(e),
    };
    if let Some(k) = norms.iter().position(|v| !v.is_finite()) {
        return Ok(GevreyMembership {
            profile: profile.clone(),
            q,
            s,
            norms,
            fit: None,
            membership: Membership::NonMember {
                diverging_index: Some(k),
            },
        });
    }
    let fit = fit_gevrey(q, &norms, 3)?;
    let membership = if fit.s <= s * (1.0 + MEMBERSHIP_SLACK) {
        Membership::Member
    } else {
        Membership::NonMember { diverging_index: None }
    };
    Ok(GevreyMembership {
        profile: profile.clone(),
        q,
        s,
        norms,
        fit: Some(fit),
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn odd_point_mass_against_even_gaussian() {
        let t = DistributionRep::PointMassDerivative {
            location: vec![0.0, 0.0],
            gamma: idx(&[1, 0]),
            scale: Complex64::new(0.0, 1.0),
        };
        let phi = GaussianTest { d: 2, a: 1.0 };
        let v = pair(&t, &idx(&[0, 0]), &idx(&[0, 0]), &phi).unwrap();
        assert!(v.norm() < 1e-15);
        // ⟨ξ_1 ∂_1 δ, φ⟩ = -∂_1(ξ_1 φ)(0) = -1 times i.
        let w = pair(&t, &idx(&[0, 0]), &idx(&[1, 0]), &phi).unwrap();
        assert!((w - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn circle_measure_against_plateau() {
        let t = DistributionRep::SurfaceMeasure(sphere_rule(2, 64).unwrap());
        let phi = PlateauBump { d: 2, radius: 2.0 };
        let v = pair(&t, &MultiIndex::zero(2), &MultiIndex::zero(2), &phi).unwrap();
        assert!((v - real(2.0 * PI)).norm() < 1e-8);
    }

    #[test]
    fn constant_against_gaussian() {
        let t = DistributionRep::ConstantOne { d: 1 };
        let phi = GaussianTest { d: 1, a: 1.0 };
        let v = pair(&t, &MultiIndex::zero(1), &MultiIndex::zero(1), &phi).unwrap();
        assert!((v - real(PI.sqrt())).norm() < 1e-12);
        let dv = pair(&t, &idx(&[1]), &MultiIndex::zero(1), &phi).unwrap();
        assert_eq!(dv, ZERO);
    }

    #[test]
    fn plateau_jet_matches_cutoff() {
        let phi = PlateauBump { d: 2, radius: 1.0 };
        let layout = JetLayout::new(2, 1);
        let x = [1.1, 0.6];
        let j = phi.jet(&x, &layout).unwrap();
        assert!((j.value().re - cutoff(norm(&x))).abs() < 1e-14);
        let h = 1e-6;
        let fd = (cutoff(norm(&[x[0] + h, x[1]])) - cutoff(norm(&[x[0] - h, x[1]]))) / (2.0 * h);
        assert!((j.derivative(&idx(&[1, 0])).re - fd).abs() < 1e-7);
    }

    #[test]
    fn family_member_jet_matches_value() {
        let fam = TestFamily::standard(2, FamilyTarget::Direction(vec![0.6, 0.8]), 0.5).unwrap();
        let m = fam.member(4.0, &[1.0, 0.0]);
        let layout = JetLayout::new(2, 1);
        let x = [0.6 * 6.0 + 0.1, 0.8 * 6.0 - 0.05];
        let j = m.jet(&x, &layout).unwrap();
        assert!((j.value() - m.value(&x)).norm() < 1e-14);
        let h = 1e-5;
        let fd = (m.value(&[x[0], x[1] + h]) - m.value(&[x[0], x[1] - h])) / (2.0 * h);
        assert!((j.derivative(&idx(&[0, 1])) - fd).norm() < 1e-8);
        fam.check_support(2000).unwrap();
        TestFamily::standard(2, FamilyTarget::Zero, 0.5).unwrap().check_support(2000).unwrap();
    }

    #[test]
    fn dual_set_swaps_and_conjugates() {
        let p = ParameterPair::total_order(2, 2, 4.0).unwrap();
        assert!(p.downward_closed);
        let dual = dual_parameter_set(&p).unwrap();
        assert!((dual.q - 4.0 / 3.0).abs() < 1e-15);
        assert!(dual.downward_closed);
        let back = dual_parameter_set(&dual).unwrap();
        assert!((back.q - 4.0).abs() < 1e-12);
        assert_eq!(back.entries, p.entries);
        assert!(dual_parameter_set(&ParameterPair::total_order(2, 1, 1.0).unwrap()).is_err());
        let gap = ParameterPair::new(
            2.0,
            vec![ParameterEntry {
                alpha: idx(&[1, 0]),
                beta: idx(&[0, 0]),
                growth: 1.0,
            }],
        )
        .unwrap();
        assert!(!gap.downward_closed);
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let f = SampledFunction::from_fn(1, 64, 0.25, |x| real((-x[0] * x[0]).exp())).unwrap();
        let d1 = f.spectral_derivative(&idx(&[1]));
        for j in [10, 30, 40] {
            let x = f.point(j)[0];
            assert!((d1[j].re + 2.0 * x * (-x * x).exp()).abs() < 1e-9, "j = {j}");
        }
    }

    #[test]
    fn classify_power_laws() {
        let ladder: Vec<f64> = (0..=10).map(|j| 2f64.powi(j)).collect();
        let grow: Vec<f64> = ladder.iter().map(|l| l * l).collect();
        assert_eq!(classify(&ladder, &grow).0, Verdict::Unbounded);
        let flat = vec![1.0; ladder.len()];
        assert_eq!(classify(&ladder, &flat).0, Verdict::Bounded);
        let zero = vec![0.0; ladder.len()];
        assert_eq!(classify(&ladder, &zero).0, Verdict::Bounded);
    }
}
