//! Dyadic decomposition of `D^α σ̂`, the per-scale operator bounds that feed
//! the restriction argument, interpolation exponents and threshold formulas,
//! plus an empirical restriction ratio over trial functions in the plane.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::f_eval;
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::quad::{gauss_legendre, sphere_rule};
use crate::sphere::{eval_radial_terms, paper_constant, profile_order, radial_derivative_terms};

/// Largest scale a partition is built for.
pub const MAX_PARTITION_K: usize = 14;

fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth radial cutoff: `1` on `r <= 1`, `0` on `r >= 2`.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = transition(2.0 - r);
        a / (a + transition(r - 1.0))
    }
}

/// `φ_0 = ψ`, `φ_k(x) = ψ(x/2^k) - ψ(x/2^{k-1}) = φ(x/2^k)` with `φ = ψ - ψ(2·)`,
/// so `Σ_{k <= K} φ_k = ψ(·/2^K)` telescopes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    pub d: usize,
    pub k_max: usize,
}

pub fn build_partition(d: usize, k_max: usize) -> Result<DyadicPartition> {
    if d == 0 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(2..=MAX_PARTITION_K).contains(&k_max) {
        return Err(Error::domain(format!(
            "k_max = {k_max} must lie in 2..={MAX_PARTITION_K}"
        )));
    }
    Ok(DyadicPartition { d, k_max })
}

impl DyadicPartition {
    /// The annular bump `φ(r) = ψ(r) - ψ(2r)`, supported in `[1/2, 2]`.
    pub fn base(r: f64) -> f64 {
        cutoff(r) - cutoff(2.0 * r)
    }

    /// `φ_k` at radius `r`.
    pub fn member(&self, k: usize, r: f64) -> f64 {
        if k == 0 {
            cutoff(r)
        } else {
            Self::base(r / 2f64.powi(k as i32))
        }
    }

    pub fn member_at(&self, k: usize, x: &[f64]) -> f64 {
        self.member(k, x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `Σ_{k <= k_max} φ_k(r)`.
    pub fn sum(&self, r: f64) -> f64 {
        (0..=self.k_max).map(|k| self.member(k, r)).sum()
    }

    /// Radial support `[lo, hi]` of `φ_k`.
    pub fn support(k: usize) -> (f64, f64) {
        if k == 0 {
            (0.0, 2.0)
        } else {
            (2f64.powi(k as i32 - 1), 2f64.powi(k as i32 + 1))
        }
    }
}

/// Samples of `φ_k · D^α σ̂` on a polar grid over the support of `φ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicKernel {
    pub d: usize,
    pub alpha: MultiIndex,
    pub k: usize,
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    /// Row-major: `values[i * directions.len() + j]` at `radii[i] * directions[j]`.
    pub values: Vec<f64>,
}

/// Sampling of a [`DyadicKernel`]. Radii beyond `r_max` are not sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub radial_step: f64,
    pub r_max: f64,
}

impl Default for KernelGrid {
    fn default() -> Self {
        KernelGrid {
            radial_step: 0.3,
            r_max: f64::INFINITY,
        }
    }
}

fn kernel_directions(d: usize, alpha: &MultiIndex) -> Result<Vec<Vec<f64>>> {
    if alpha.order() == 0 {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        return Ok(vec![e]);
    }
    match d {
        2 => Ok((0..32)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 32.0;
                vec![t.cos(), t.sin()]
            })
            .collect()),
        3 => Ok(sphere_rule(3, 8)?.points().to_vec()),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

pub fn build_kernel(
    partition: &DyadicPartition,
    alpha: &MultiIndex,
    k: usize,
    grid: KernelGrid,
) -> Result<DyadicKernel> {
    let d = partition.d;
    if alpha.dim() != d {
        return Err(Error::domain(format!(
            "multi-index {alpha} does not match dimension {d}"
        )));
    }
    if k > partition.k_max {
        return Err(Error::domain(format!(
            "scale {k} exceeds the partition's k_max = {}",
            partition.k_max
        )));
    }
    if !(grid.radial_step > 0.0) {
        return Err(Error::domain("radial step must be positive"));
    }
    let (lo, hi) = DyadicPartition::support(k);
    let hi = hi.min(grid.r_max);
    let radii: Vec<f64> = if hi <= lo {
        Vec::new()
    } else {
        let n = ((hi - lo) / grid.radial_step).ceil() as usize;
        (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    };
    let directions = kernel_directions(d, alpha)?;
    let terms = radial_derivative_terms(alpha);
    let m = profile_order(d);
    let c = paper_constant(d);
    let values = radii
        .par_iter()
        .flat_map_iter(|&r| {
            let weight = partition.member(k, r);
            let terms = &terms;
            directions.iter().map(move |u| {
                if weight == 0.0 {
                    return 0.0;
                }
                let xi: Vec<f64> = u.iter().map(|v| v * r).collect();
                weight * c * eval_radial_terms(m, terms, &xi)
            })
        })
        .collect();
    Ok(DyadicKernel {
        d,
        alpha: alpha.clone(),
        k,
        radii,
        directions,
        values,
    })
}

/// Sup norm of the kernel samples; bounds `‖T_k‖_{L^1 → L^∞}`.
pub fn op_norm_1_inf(kernel: &DyadicKernel) -> f64 {
    kernel.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Tabulated radial transform of the cutoff `ψ` on `[0, T]`.
#[derive(Debug, Clone)]
pub struct CutoffTransform {
    d: usize,
    step: f64,
    values: Vec<f64>,
}

const TRANSFORM_REACH: f64 = 64.0;
const TRANSFORM_STEP: f64 = 1.0 / 256.0;

impl CutoffTransform {
    /// `ψ̂(ρ) = (2π)^{d/2} ∫_0^2 ψ(r) r^{d-1} f_{(d-2)/2}(ρ r) dr`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        let (x, w) = gauss_legendre(16);
        let panels = 24;
        let width = 2.0 / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 16);
        for p in 0..panels {
            for (t, v) in x.iter().zip(&w) {
                let r = (p as f64 + 0.5 * (t + 1.0)) * width;
                nodes.push((r, 0.5 * width * v * cutoff(r) * r.powi(d as i32 - 1)));
            }
        }
        let m = profile_order(d);
        let c = (2.0 * PI).powf(d as f64 / 2.0);
        let n = (TRANSFORM_REACH / TRANSFORM_STEP) as usize + 1;
        let values = (0..=n)
            .into_par_iter()
            .map(|i| {
                let rho = i as f64 * TRANSFORM_STEP;
                c * nodes
                    .iter()
                    .map(|&(r, wt)| wt * f_eval(m, rho * r).unwrap_or(f64::NAN))
                    .sum::<f64>()
            })
            .collect();
        Ok(CutoffTransform {
            d,
            step: TRANSFORM_STEP,
            values,
        })
    }

    /// Shared table for `d`, built on first use.
    pub fn cached(d: usize) -> Result<Arc<Self>> {
        static D2: OnceLock<Arc<CutoffTransform>> = OnceLock::new();
        static D3: OnceLock<Arc<CutoffTransform>> = OnceLock::new();
        let cell = match d {
            2 => &D2,
            3 => &D3,
            _ => return Ok(Arc::new(Self::new(d)?)),
        };
        if let Some(t) = cell.get() {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::new(d)?);
        Ok(cell.get_or_init(|| t).clone())
    }

    /// `ψ̂(ρ)` by linear interpolation; zero beyond the tabulated reach.
    pub fn eval(&self, rho: f64) -> f64 {
        let t = rho / self.step;
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 0.0;
        }
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// `φ̂_k(x)` at `|x| = rho`.
    pub fn member(&self, k: usize, rho: f64) -> f64 {
        if k == 0 {
            return self.eval(rho);
        }
        let d = self.d as i32;
        let t = rho * 2f64.powi(k as i32);
        2f64.powi(k as i32 * d) * (self.eval(t) - 2f64.powi(-d) * self.eval(t / 2.0))
    }
}

/// Sup of `|φ̂_k * (y^α dσ)|` with the point where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpNorm22 {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// `||argmax| - 1|`.
    pub distance_to_sphere: f64,
}

/// `φ̂_k` is negligible beyond this many multiples of `2^{-k}`.
const LOCAL_WINDOW: f64 = 64.0;
const RADIAL_SEARCH: f64 = 16.0;
const RADIAL_SEARCH_POINTS: usize = 65;

/// `sup_x |∫ φ̂_k(x - y) y^α dσ(y)|`, bounding `‖T_k‖_{L^2 → L^2}`.
///
/// `resolution` is the number of Gauss nodes per length `2^{-k}` along the
/// sphere; `x` is searched on radial lines `|x| ∈ 1 ± 16·2^{-k}`.
pub fn op_norm_2_2(d: usize, alpha: &MultiIndex, k: usize, resolution: usize) -> Result<OpNorm22> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if alpha.dim() != d {
        return Err(Error::domain(format!(
            "multi-index {alpha} does not match dimension {d}"
        )));
    }
    if resolution < 4 {
        return Err(Error::capacity(format!(
            "resolution {resolution} cannot resolve scale 2^-{k}; need at least 4 nodes per 2^-k"
        )));
    }
    if k > MAX_PARTITION_K {
        return Err(Error::domain(format!("scale {k} exceeds {MAX_PARTITION_K}")));
    }
    let table = CutoffTransform::cached(d)?;
    let scale = 2f64.powi(-(k as i32));
    let window = (LOCAL_WINDOW * scale).min(PI);
    let (gx, gw) = gauss_legendre(resolution);
    // Angular nodes relative to the direction of x.
    let panels = ((if d == 2 { 2.0 } else { 1.0 }) * window / scale).ceil() as usize;
    let (lo, hi) = if d == 2 { (-window, window) } else { (0.0, window) };
    let width = (hi - lo) / panels as f64;
    let mut thetas = Vec::with_capacity(panels * resolution);
    for p in 0..panels {
        for (t, w) in gx.iter().zip(&gw) {
            let th = lo + (p as f64 + 0.5 * (t + 1.0)) * width;
            let jac = if d == 2 { 1.0 } else { th.sin() };
            thetas.push((th, 0.5 * width * w * jac));
        }
    }
    let nphi = 2 * alpha.order() as usize + 8;
    let directions: Vec<Vec<f64>> = if alpha.order() == 0 {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        vec![e]
    } else if d == 2 {
        (0..16)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 16.0;
                vec![t.cos(), t.sin()]
            })
            .collect()
    } else {
        sphere_rule(3, 8)?.points().to_vec()
    };
    let radii: Vec<f64> = (0..RADIAL_SEARCH_POINTS)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (RADIAL_SEARCH_POINTS - 1) as f64;
            (1.0 + t * RADIAL_SEARCH * scale).max(0.0)
        })
        .collect();

    let candidates: Vec<(f64, Vec<f64>)> = directions
        .par_iter()
        .flat_map_iter(|e| {
            let frame = orthonormal_frame(e);
            let thetas = &thetas;
            let table = &table;
            radii.iter().map(move |&s| {
                let mut acc = 0.0;
                for &(th, wt) in thetas {
                    let (sn, cs) = th.sin_cos();
                    // |x - y|^2 with x = s e and y at angle θ from e.
                    let dist = (s * s + 1.0 - 2.0 * s * cs).max(0.0).sqrt();
                    let kernel = table.member(k, dist);
                    if kernel == 0.0 {
                        continue;
                    }
                    let moment = if alpha.order() == 0 {
                        if d == 2 {
                            1.0
                        } else {
                            2.0 * PI
                        }
                    } else if d == 2 {
                        let y: Vec<f64> = (0..2)
                            .map(|i| cs * frame[0][i] + sn * frame[1][i])
                            .collect();
                        alpha.monomial(&y)
                    } else {
                        let h = 2.0 * PI / nphi as f64;
                        (0..nphi)
                            .map(|j| {
                                let (sp, cp) = (j as f64 * h).sin_cos();
                                let y: Vec<f64> = (0..3)
                                    .map(|i| {
                                        cs * frame[0][i] + sn * (cp * frame[1][i] + sp * frame[2][i])
                                    })
                                    .collect();
                                h * alpha.monomial(&y)
                            })
                            .sum()
                    };
                    acc += wt * kernel * moment;
                }
                (acc.abs(), e.iter().map(|v| v * s).collect())
            })
        })
        .collect();
    let (value, argmax) = candidates
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |best, cand| {
            if cand.0 > best.0 {
                cand
            } else {
                best
            }
        });
    let norm = argmax.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(OpNorm22 {
        value,
        distance_to_sphere: (norm - 1.0).abs(),
        argmax,
    })
}

/// `e` followed by unit vectors completing an orthonormal basis.
fn orthonormal_frame(e: &[f64]) -> Vec<Vec<f64>> {
    match e.len() {
        2 => vec![e.to_vec(), vec![-e[1], e[0]]],
        _ => {
            let helper = if e[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let dot: f64 = helper.iter().zip(e).map(|(a, b)| a * b).sum();
            let mut u: Vec<f64> = helper.iter().zip(e).map(|(a, b)| a - dot * b).collect();
            let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            u.iter_mut().for_each(|v| *v /= n);
            let v = vec![
                e[1] * u[2] - e[2] * u[1],
                e[2] * u[0] - e[0] * u[2],
                e[0] * u[1] - e[1] * u[0],
            ];
            vec![e.to_vec(), u, v]
        }
    }
}

/// `∫_{S^{d-1}} (1 + 2^k |e_1 - y|)^{-N} dσ(y)`, which is `O(2^{-k(d-1)})`.
///
/// Integrated in the polar angle from `e_1` with panels graded toward the pole.
pub fn annulus_integral(d: usize, k: u32, n: u32) -> Result<f64> {
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if (n as usize) < d {
        return Err(Error::domain(format!("decay power N = {n} must be >= d = {d}")));
    }
    let scale = 2f64.powi(-(k as i32));
    let mut breaks = vec![0.0];
    let mut b = scale / 16.0;
    while b < PI {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(PI);
    let (x, w) = gauss_legendre(20);
    let mut total = 0.0;
    for win in breaks.windows(2) {
        let half = 0.5 * (win[1] - win[0]);
        let mid = 0.5 * (win[1] + win[0]);
        for (t, v) in x.iter().zip(&w) {
            let th = mid + half * t;
            let chord = 2.0 * (th / 2.0).sin();
            let g = (1.0 + chord / scale).powi(-(n as i32));
            let jac = if d == 2 { 2.0 } else { 2.0 * PI * th.sin() };
            total += half * v * g * jac;
        }
    }
    Ok(total)
}

/// Per-scale exponent `e(p)`: the `k`-th dyadic piece is bounded by `2^{-k e(p)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationVariant {
    /// `(2(d+1) - p(d+3)) / p`.
    Paper,
    /// Riesz-Thorin between `2^{-k(d-1)/2}` at `p = 1` and `2^k` at `p = 2`
    /// with `θ = 2 - 2/p`: `(2(d+1) - p(d+3)) / (2p)`.
    Direct,
}

pub fn interpolation_exponent(d: usize, p: f64, variant: InterpolationVariant) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::domain(format!("p = {p} must lie in [1, 2]")));
    }
    let d = d as f64;
    let numer = 2.0 * (d + 1.0) - p * (d + 3.0);
    Ok(match variant {
        InterpolationVariant::Paper => numer / p,
        InterpolationVariant::Direct => numer / (2.0 * p),
    })
}

/// Zero of `e(p)` on `[1, 2]` by bisection.
pub fn interpolation_zero(d: usize, variant: InterpolationVariant) -> Result<f64> {
    let e = |p: f64| interpolation_exponent(d, p, variant);
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    if e(lo)? <= 0.0 || e(hi)? >= 0.0 {
        return Err(Error::domain(format!("no sign change of e(p) on [1, 2] for d = {d}")));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if e(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Σ_{k=0}^{K} 2^{-k e}`.
pub fn dyadic_partial_sum(e: f64, k_max: u32) -> f64 {
    (0..=k_max).map(|k| 2f64.powf(-(k as f64) * e)).sum()
}

/// `2(d+1)/(d+3)`, the upper end of the sphere's range `1 <= p < …`.
pub fn restriction_threshold(d: usize) -> Result<f64> {
    let r = restriction_threshold_exact(d)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

pub fn restriction_threshold_exact(d: usize) -> Result<Ratio<i64>> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as i64;
    Ok(Ratio::new(2 * (d + 1), d + 3))
}

/// `2(d+2)/(d+3)`, the range quoted in the abstract; kept only for comparison
/// with [`restriction_threshold`].
pub fn abstract_restriction_threshold(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as f64;
    Ok(2.0 * (d + 2.0) / (d + 3.0))
}

/// `2(2 - 2α + β) / (4(1 - α) + β)` for `α ∈ (0, 1)`, `β ∈ (0, 2α]`.
pub fn salem_threshold(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta <= 2.0 * alpha) {
        return Err(Error::domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) outside alpha in (0,1), beta in (0, 2 alpha]"
        )));
    }
    Ok(2.0 * (2.0 - 2.0 * alpha + beta) / (4.0 * (1.0 - alpha) + beta))
}

pub fn salem_threshold_exact(alpha: Ratio<i64>, beta: Ratio<i64>) -> Result<Ratio<i64>> {
    let zero = Ratio::from_integer(0);
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    if !(alpha > zero && alpha < one) || !(beta > zero && beta <= two * alpha) {
        return Err(Error::domain(format!(
            "(alpha, beta) = ({alpha}, {beta}) outside alpha in (0,1), beta in (0, 2 alpha]"
        )));
    }
    Ok(two * (two - two * alpha + beta) / (Ratio::from_integer(4) * (one - alpha) + beta))
}

/// Trial functions on `R^2` for the empirical restriction ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialFunction {
    /// `exp(-|x|^2 / (2 w^2))`.
    Gaussian { width: f64 },
    /// `e^{i x·η} exp(-|x|^2 / (2 w^2))`.
    ModulatedGaussian { width: f64, freq: [f64; 2] },
    /// `e^{i x_1} exp(-(δ^2 x_1)^2 / 2 - (δ x_2)^2 / 2)`: its transform sits on
    /// a `δ^2 × δ` box tangent to the circle at `e_1`.
    Knapp { delta: f64 },
}

impl TrialFunction {
    pub fn label(&self) -> String {
        match self {
            TrialFunction::Gaussian { width } => format!("gaussian(w={width})"),
            TrialFunction::ModulatedGaussian { width, freq } => {
                format!("modulated_gaussian(w={width},eta=({},{}))", freq[0], freq[1])
            }
            TrialFunction::Knapp { delta } => format!("knapp(delta={delta})"),
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        match *self {
            TrialFunction::Gaussian { width } => {
                Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / (2.0 * width * width)).exp(), 0.0)
            }
            TrialFunction::ModulatedGaussian { width, freq } => Complex64::from_polar(
                (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * width * width)).exp(),
                freq[0] * x[0] + freq[1] * x[1],
            ),
            TrialFunction::Knapp { delta } => {
                let a = delta * delta * x[0];
                let b = delta * x[1];
                Complex64::from_polar((-(a * a + b * b) / 2.0).exp(), x[0])
            }
        }
    }

    /// Half-widths of the sampling box.
    fn extent(&self) -> [f64; 2] {
        match *self {
            TrialFunction::Gaussian { width } | TrialFunction::ModulatedGaussian { width, .. } => {
                [8.0 * width, 8.0 * width]
            }
            TrialFunction::Knapp { delta } => [5.0 / (delta * delta), 5.0 / delta],
        }
    }

    /// Shortest length the grid must resolve.
    fn feature(&self) -> f64 {
        match *self {
            TrialFunction::Gaussian { width } => width,
            TrialFunction::ModulatedGaussian { width, freq } => {
                let f = freq[0].hypot(freq[1]);
                if f > 0.0 {
                    width.min(2.0 * PI / f)
                } else {
                    width
                }
            }
            TrialFunction::Knapp { delta } => (2.0 * PI).min(1.0 / delta),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TrialFunction::Gaussian { width } => width > 0.0 && width.is_finite(),
            TrialFunction::ModulatedGaussian { width, freq } => {
                width > 0.0 && width.is_finite() && freq.iter().all(|v| v.is_finite())
            }
            TrialFunction::Knapp { delta } => delta > 0.0 && delta <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid trial function {}", self.label())))
        }
    }
}

/// `δ_j = 0.6 · 2^{-j/2}`, `j = 0..=refinements`.
pub fn knapp_family(refinements: usize) -> Vec<TrialFunction> {
    (0..=refinements)
        .map(|j| TrialFunction::Knapp {
            delta: 0.6 * 2f64.powf(-(j as f64) / 2.0),
        })
        .collect()
}

/// Tensor grid with `n` points per axis and `circle_nodes` trapezoid nodes on `S^1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub circle_nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 512,
            circle_nodes: 512,
        }
    }
}

/// Points per resolved feature length below which a grid is rejected.
const MIN_POINTS_PER_FEATURE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRatio {
    pub label: String,
    pub ratio: f64,
    pub lp_norm: f64,
    pub restricted_l2_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionEstimate {
    pub p: f64,
    pub ratio_max: f64,
    pub argmax: String,
    pub trials: Vec<TrialRatio>,
}

struct SampledTrial {
    label: String,
    cell: f64,
    moduli: Vec<f64>,
    restricted_l2: f64,
}

fn sample_trial(trial: &TrialFunction, grid: GridSpec) -> Result<SampledTrial> {
    trial.validate()?;
    if grid.n < 16 || grid.circle_nodes < 8 {
        return Err(Error::capacity("grid needs n >= 16 and at least 8 circle nodes"));
    }
    let [ex, ey] = trial.extent();
    let hx = 2.0 * ex / grid.n as f64;
    let hy = 2.0 * ey / grid.n as f64;
    let feature = trial.feature();
    if hx.max(hy) * MIN_POINTS_PER_FEATURE > feature {
        return Err(Error::capacity(format!(
            "grid spacing {:.3e} cannot resolve {} (feature length {feature:.3e})",
            hx.max(hy),
            trial.label()
        )));
    }
    let xs: Vec<f64> = (0..grid.n).map(|i| -ex + (i as f64 + 0.5) * hx).collect();
    let ys: Vec<f64> = (0..grid.n).map(|i| -ey + (i as f64 + 0.5) * hy).collect();
    let samples: Vec<Complex64> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| trial.eval([x, y])))
        .collect();
    let cell = hx * hy;
    let moduli: Vec<f64> = samples.iter().map(|v| v.norm()).collect();

    let nodes = grid.circle_nodes;
    let restricted: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|m| {
            let t = 2.0 * PI * m as f64 / nodes as f64;
            let (s, c) = t.sin_cos();
            let ex_phase = phases(&xs, c);
            let ey_phase = phases(&ys, s);
            let mut total = Complex64::new(0.0, 0.0);
            for (i, px) in ex_phase.iter().enumerate() {
                let row = &samples[i * grid.n..(i + 1) * grid.n];
                let inner: Complex64 = row.iter().zip(&ey_phase).map(|(a, b)| a * b).sum();
                total += px * inner;
            }
            (total * cell).norm_sqr()
        })
        .collect();
    let restricted_l2 = (restricted.iter().sum::<f64>() * 2.0 * PI / nodes as f64).sqrt();
    Ok(SampledTrial {
        label: trial.label(),
        cell,
        moduli,
        restricted_l2,
    })
}

/// `e^{-i x_j ξ}` along a uniform grid by a stable phase recurrence.
fn phases(xs: &[f64], xi: f64) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, -(xs[1] - xs[0]) * xi);
    let mut cur = Complex64::from_polar(1.0, -xs[0] * xi);
    let mut out = Vec::with_capacity(xs.len());
    for (j, &x) in xs.iter().enumerate() {
        // Re-anchor periodically so rounding in the recurrence cannot drift.
        if j % 64 == 0 {
            cur = Complex64::from_polar(1.0, -x * xi);
        }
        out.push(cur);
        cur *= step;
    }
    out
}

/// Empirical restriction ratios `‖f̂‖_{L^2(dσ)} / ‖f‖_{L^p}` for several `p`,
/// sharing one transform per trial.
pub fn restriction_scan(
    ps: &[f64],
    trials: &[TrialFunction],
    grid: GridSpec,
) -> Result<Vec<RestrictionEstimate>> {
    if trials.is_empty() {
        return Err(Error::domain("restriction estimate needs at least one trial"));
    }
    if let Some(p) = ps.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
        return Err(Error::domain(format!("p = {p} must be finite and >= 1")));
    }
    let sampled: Vec<SampledTrial> = trials
        .iter()
        .map(|t| sample_trial(t, grid))
        .collect::<Result<_>>()?;
    Ok(ps
        .iter()
        .map(|&p| {
            let rows: Vec<TrialRatio> = sampled
                .iter()
                .map(|s| {
                    let lp = (s.moduli.iter().map(|v| v.powf(p)).sum::<f64>() * s.cell).powf(1.0 / p);
                    TrialRatio {
                        label: s.label.clone(),
                        ratio: s.restricted_l2 / lp,
                        lp_norm: lp,
                        restricted_l2_norm: s.restricted_l2,
                    }
                })
                .collect();
            let best = rows
                .iter()
                .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
                .expect("nonempty");
            RestrictionEstimate {
                p,
                ratio_max: best.ratio,
                argmax: best.label.clone(),
                trials: rows.clone(),
            }
        })
        .collect())
}

/// Largest ratio `‖f̂‖_{L^2(dσ)} / ‖f‖_{L^p}` over the trials: a lower bound
/// for the restriction constant at `p`.
pub fn restriction_empirical(
    p: f64,
    trials: &[TrialFunction],
    grid: GridSpec,
) -> Result<RestrictionEstimate> {
    Ok(restriction_scan(&[p], trials, grid)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::fit_linear;

    #[test]
    fn partition_telescopes() {
        let p = build_partition(2, 8).unwrap();
        for i in 0..1000 {
            let r = 128.0 * i as f64 / 1000.0;
            assert!((p.sum(r) - 1.0).abs() < 1e-10, "r = {r}");
        }
        assert_eq!(p.member(5, 100.0), 0.0);
        for &r in &[5.0, 9.0, 13.7] {
            assert_eq!(p.member(3, r), DyadicPartition::base(r / 8.0));
        }
        assert!(build_partition(2, 1).is_err());
        assert!(build_partition(2, 15).is_err());
    }

    #[test]
    fn empty_kernel_has_zero_norm() {
        let p = build_partition(2, 10).unwrap();
        let grid = KernelGrid {
            radial_step: 0.3,
            r_max: 10.0,
        };
        let k = build_kernel(&p, &MultiIndex::zero(2), 8, grid).unwrap();
        assert!(k.radii.is_empty());
        assert_eq!(op_norm_1_inf(&k), 0.0);
    }

    #[test]
    fn annulus_integral_small_cases() {
        assert!(annulus_integral(2, 0, 2).unwrap() <= 2.0 * PI);
        let r = annulus_integral(3, 8, 3).unwrap() / annulus_integral(3, 9, 3).unwrap();
        assert!((r - 4.0).abs() < 0.6, "ratio {r}");
        assert!(annulus_integral(3, 4, 2).is_err());
        let ks: Vec<f64> = (4..=12).map(f64::from).collect();
        let vals: Vec<f64> = (4..=12).map(|k| annulus_integral(2, k, 2).unwrap().log2()).collect();
        let fit = fit_linear(&ks, &vals, 0..ks.len()).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn exponents_and_thresholds() {
        use InterpolationVariant::*;
        assert!((interpolation_exponent(2, 1.2, Paper).unwrap()).abs() < 1e-12);
        assert!((interpolation_exponent(2, 1.2, Direct).unwrap()).abs() < 1e-12);
        assert_eq!(interpolation_exponent(2, 1.0, Paper).unwrap(), 1.0);
        assert_eq!(interpolation_exponent(2, 1.0, Direct).unwrap(), 0.5);
        assert!(interpolation_exponent(2, 2.0, Paper).unwrap() < 0.0);
        assert!(interpolation_exponent(2, 2.5, Paper).is_err());
        assert_eq!(restriction_threshold_exact(2).unwrap(), Ratio::new(6, 5));
        assert_eq!(restriction_threshold_exact(3).unwrap(), Ratio::new(4, 3));
        assert_eq!(
            salem_threshold_exact(Ratio::new(1, 2), Ratio::new(1, 2)).unwrap(),
            Ratio::new(6, 5)
        );
        assert!((salem_threshold(0.999999, 0.999999).unwrap() - 2.0).abs() < 1e-5);
        assert!(salem_threshold(0.5, 1.5).is_err());
        assert!(salem_threshold(1.0, 0.5).is_err());
    }

    #[test]
    fn gaussian_ratio_matches_closed_form() {
        let est = restriction_empirical(1.0, &[TrialFunction::Gaussian { width: 1.0 }], GridSpec {
            n: 256,
            circle_nodes: 64,
        })
        .unwrap();
        let exact = (-0.5f64).exp() * (2.0 * PI).sqrt();
        assert!((est.ratio_max - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let err = restriction_empirical(1.1, &knapp_family(4), GridSpec {
            n: 64,
            circle_nodes: 64,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn op_norm_2_2_rejects_low_resolution() {
        assert!(matches!(
            op_norm_2_2(2, &MultiIndex::zero(2), 4, 2),
            Err(Error::Capacity(_))
        ));
        assert!(op_norm_2_2(4, &MultiIndex::zero(4), 4, 8).is_err());
    }

    #[test]
    fn op_norm_2_2_at_unit_scale_is_comparable_to_mass() {
        let v = op_norm_2_2(2, &MultiIndex::zero(2), 0, 8).unwrap();
        assert!(v.value > 0.1 * 2.0 * PI && v.value < 10.0 * 2.0 * PI, "{}", v.value);
    }
}
