//! Cantor-type measures on `[0, 1]`, their Fourier transforms, fitted decay
//! exponents `β̂` in `|μ̂(ξ)| ≲ |ξ|^{-β̂/2}`, and moment measures `x^j dμ`.

use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{fit_linear, FitResult};

/// Spacing of the dense annulus search, in units of `ξ`.
const SUP_SPACING: f64 = 0.5;
const SUP_MIN_SAMPLES: usize = 64;
const SUP_REFINE_CANDIDATES: usize = 4;
const SUP_REFINE_POINTS: usize = 41;
/// Fits only use annuli with `2^k <= VALIDITY · ρ^{-depth}`.
const VALIDITY: f64 = 0.1;
const MAX_MOMENT: u32 = 8;

/// Placement of the `N` children inside each parent interval, as fractions of
/// the parent's length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Offsets {
    /// The same offsets at every interval of every level.
    Fixed { offsets: Vec<f64> },
    /// Independent offsets per interval: the free length `1 - Nρ` is split by
    /// uniform random spacings between the children.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub branching: usize,
    pub contraction: f64,
    pub offsets: Offsets,
    pub depth: u32,
    pub seed: u64,
}

impl CantorSpec {
    pub fn middle_thirds(depth: u32) -> Self {
        CantorSpec {
            branching: 2,
            contraction: 1.0 / 3.0,
            offsets: Offsets::Fixed {
                offsets: vec![0.0, 2.0 / 3.0],
            },
            depth,
            seed: 0,
        }
    }

    /// Dyadic halving, whose limit is Lebesgue measure on `[0, 1]`.
    pub fn uniform(depth: u32) -> Self {
        CantorSpec {
            branching: 2,
            contraction: 0.5,
            offsets: Offsets::Fixed {
                offsets: vec![0.0, 0.5],
            },
            depth,
            seed: 0,
        }
    }

    /// Random offsets with `N = 16`, `ρ = 1/256`, so `α = 1/2`.
    pub fn random_half(depth: u32, seed: u64) -> Self {
        CantorSpec {
            branching: 16,
            contraction: 1.0 / 256.0,
            offsets: Offsets::Random,
            depth,
            seed,
        }
    }

    /// `α = log N / log(1/ρ)`.
    pub fn dimension(&self) -> f64 {
        (self.branching as f64).ln() / (1.0 / self.contraction).ln()
    }

    /// Largest `k` with `2^k <= 0.1 ρ^{-depth}`.
    pub fn max_valid_k(&self) -> i32 {
        (VALIDITY.log2() - self.depth as f64 * self.contraction.log2()).floor() as i32
    }

    fn validate(&self) -> Result<()> {
        if self.branching < 2 {
            return Err(Error::Spec(format!("branching {} must be >= 2", self.branching)));
        }
        let n = self.branching as f64;
        if !(self.contraction > 0.0 && self.contraction * n <= 1.0 + 1e-12) {
            return Err(Error::Spec(format!(
                "contraction {} must lie in (0, 1/N]",
                self.contraction
            )));
        }
        if self.depth > 40 || n.powi(self.depth as i32) > 2e7 {
            return Err(Error::capacity(format!(
                "{}^{} atoms is beyond the supported size",
                self.branching, self.depth
            )));
        }
        if let Offsets::Fixed { offsets } = &self.offsets {
            check_offsets(offsets, self.branching, self.contraction)?;
        }
        Ok(())
    }
}

fn check_offsets(offsets: &[f64], n: usize, rho: f64) -> Result<()> {
    if offsets.len() != n {
        return Err(Error::Spec(format!("{} offsets for branching {n}", offsets.len())));
    }
    for (i, &o) in offsets.iter().enumerate() {
        if !(o >= -1e-12 && o + rho <= 1.0 + 1e-12) {
            return Err(Error::Spec(format!("offset {o} leaves [0, 1 - rho]")));
        }
        if i > 0 && o < offsets[i - 1] + rho - 1e-12 {
            return Err(Error::Spec(format!(
                "child intervals at offsets {} and {o} overlap",
                offsets[i - 1]
            )));
        }
    }
    Ok(())
}

/// Finite signed measure `Σ masses_i δ_{atoms_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<f64>,
    pub masses: Vec<f64>,
    pub spec: Option<CantorSpec>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() || atoms.is_empty() {
            return Err(Error::Spec("atoms and masses must be nonempty and of equal length".into()));
        }
        if atoms.iter().chain(&masses).any(|v| !v.is_finite()) {
            return Err(Error::Spec("atoms and masses must be finite".into()));
        }
        Ok(DiscreteMeasure {
            atoms,
            masses,
            spec: None,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `Σ |masses|`, which bounds `|μ̂|`.
    pub fn total_variation(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Equal-mass atoms at the midpoints of the level-`depth` intervals.
pub fn build_cantor(spec: &CantorSpec) -> Result<DiscreteMeasure> {
    spec.validate()?;
    let n = spec.branching;
    let rho = spec.contraction;
    let mut lefts = vec![0.0f64];
    let mut length = 1.0f64;
    for level in 0..spec.depth {
        let mut next = Vec::with_capacity(lefts.len() * n);
        match &spec.offsets {
            Offsets::Fixed { offsets } => {
                for &l in &lefts {
                    next.extend(offsets.iter().map(|o| l + length * o));
                }
            }
            Offsets::Random => {
                let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
                rng.set_stream(level as u64);
                let free = (1.0 - n as f64 * rho).max(0.0);
                let mut gaps = vec![0.0; n + 1];
                let mut offs = vec![0.0; n];
                for &l in &lefts {
                    for g in gaps.iter_mut() {
                        *g = Exp1.sample(&mut rng);
                    }
                    let total: f64 = gaps.iter().sum();
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += gaps[i] / total * free;
                        offs[i] = acc + i as f64 * rho;
                    }
                    check_offsets(&offs, n, rho)?;
                    next.extend(offs.iter().map(|o| l + length * o));
                }
            }
        }
        lefts = next;
        length *= rho;
    }
    let mass = 1.0 / lefts.len() as f64;
    let atoms: Vec<f64> = lefts.iter().map(|l| l + length / 2.0).collect();
    let masses = vec![mass; atoms.len()];
    Ok(DiscreteMeasure {
        atoms,
        masses,
        spec: Some(spec.clone()),
    })
}

/// `μ̂(ξ) = Σ m_i e^{-i x_i ξ}` at each `ξ`.
pub fn fourier_transform(mu: &DiscreteMeasure, xi_grid: &[f64]) -> Vec<Complex64> {
    xi_grid
        .par_iter()
        .map(|&xi| {
            mu.atoms
                .iter()
                .zip(&mu.masses)
                .map(|(&x, &m)| Complex64::from_polar(m, -x * xi))
                .sum()
        })
        .collect()
}

/// `|μ̂|` at `start + i·step`, `i < count`, via per-atom phase recurrences.
fn transform_moduli(mu: &DiscreteMeasure, start: f64, step: f64, count: usize) -> Vec<f64> {
    const BLOCK: usize = 256;
    let blocks = count.div_ceil(BLOCK);
    let mut out: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let lo = b * BLOCK;
            let len = BLOCK.min(count - lo);
            let xi0 = start + lo as f64 * step;
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for (&x, &m) in mu.atoms.iter().zip(&mu.masses) {
                let mut p = Complex64::from_polar(m, -x * xi0);
                let s = Complex64::from_polar(1.0, -x * step);
                for a in acc.iter_mut() {
                    *a += p;
                    p *= s;
                }
            }
            acc.into_iter().map(|v| v.norm())
        })
        .collect();
    out.truncate(count);
    out
}

/// Sup of `|μ̂|` over `2^k <= ξ < 2^{k+1}`: a dense search at spacing `0.5`
/// followed by local refinement around the largest samples.
pub fn annulus_sup(mu: &DiscreteMeasure, k: i32) -> f64 {
    let lo = 2f64.powi(k);
    let count = ((lo / SUP_SPACING).ceil() as usize).max(SUP_MIN_SAMPLES);
    let step = lo / count as f64;
    let vals = transform_moduli(mu, lo, step, count);
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = vals[order[0]];
    for &i in order.iter().take(SUP_REFINE_CANDIDATES) {
        let centre = lo + i as f64 * step;
        let fine = 2.0 * step / (SUP_REFINE_POINTS - 1) as f64;
        let local = transform_moduli(mu, centre - step, fine, SUP_REFINE_POINTS);
        best = local.into_iter().fold(best, f64::max);
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `β̂ = -2 × slope` of `ln sup|μ̂|` against `ln 2^k`.
    pub beta_hat: f64,
    /// Standard error of `β̂` from the regression residuals.
    pub beta_stderr: f64,
    pub ks: Vec<i32>,
    pub sups: Vec<f64>,
    pub fit: FitResult,
}

/// Fits annulus sups over `ks`, restricted to the measure's validity window.
pub fn decay_exponent_fit(mu: &DiscreteMeasure, ks: Range<i32>) -> Result<DecayFit> {
    let top = mu
        .spec
        .as_ref()
        .map_or(ks.end - 1, |s| s.max_valid_k().min(ks.end - 1));
    let ks: Vec<i32> = (ks.start..=top).collect();
    if ks.len() < 3 {
        return Err(Error::capacity(format!(
            "validity window ends at k = {top}; fewer than three annuli remain"
        )));
    }
    let sups: Vec<f64> = ks.iter().map(|&k| annulus_sup(mu, k)).collect();
    if let Some((i, &v)) = sups.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::NonPositive { index: i, value: v });
    }
    let lx: Vec<f64> = ks.iter().map(|&k| k as f64 * std::f64::consts::LN_2).collect();
    let ly: Vec<f64> = sups.iter().map(|v| v.ln()).collect();
    let fit = fit_linear(&lx, &ly, 0..lx.len())?;
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - fit.intercept - fit.slope * x).powi(2))
        .sum();
    let beta_stderr = 2.0 * (ss_res / (n - 2.0).max(1.0) / sxx).sqrt();
    Ok(DecayFit {
        beta_hat: -2.0 * fit.slope,
        beta_stderr,
        ks,
        sups,
        fit,
    })
}

/// `x^j dμ`, whose transform is `i^j D^j μ̂`.
pub fn moment_measure(mu: &DiscreteMeasure, j: u32) -> Result<DiscreteMeasure> {
    if j > MAX_MOMENT {
        return Err(Error::domain(format!("moment order {j} exceeds {MAX_MOMENT}")));
    }
    Ok(DiscreteMeasure {
        atoms: mu.atoms.clone(),
        masses: mu
            .atoms
            .iter()
            .zip(&mu.masses)
            .map(|(x, m)| m * x.powi(j as i32))
            .collect(),
        spec: mu.spec.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDecayRow {
    pub j: u32,
    pub beta_hat: f64,
    pub beta_stderr: f64,
    /// Largest `|D^j μ̂|` seen over the fitted annuli and at `ξ = 0`.
    pub sup_norm: f64,
}

pub fn moment_decay_check(
    mu: &DiscreteMeasure,
    js: Range<u32>,
    ks: Range<i32>,
) -> Result<Vec<MomentDecayRow>> {
    js.map(|j| {
        let mj = moment_measure(mu, j)?;
        let fit = decay_exponent_fit(&mj, ks.clone())?;
        let at_zero = mj.total_mass().abs();
        Ok(MomentDecayRow {
            j,
            beta_hat: fit.beta_hat,
            beta_stderr: fit.beta_stderr,
            sup_norm: fit.sups.iter().copied().fold(at_zero, f64::max),
        })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn depth_zero_is_one_midpoint_atom() {
        let mu = build_cantor(&CantorSpec::middle_thirds(0)).unwrap();
        assert_eq!(mu.atoms, vec![0.5]);
        assert_eq!(mu.masses, vec![1.0]);
        let v = fourier_transform(&mu, &[2.0 * PI])[0];
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn middle_thirds_dimension_and_mass() {
        let spec = CantorSpec::middle_thirds(10);
        assert!((spec.dimension() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        let mu = build_cantor(&spec).unwrap();
        assert_eq!(mu.len(), 1024);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(mu.atoms.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert!((fourier_transform(&mu, &[0.0])[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn middle_thirds_does_not_decay_along_powers_of_three() {
        let mu = build_cantor(&CantorSpec::middle_thirds(12)).unwrap();
        let xs: Vec<f64> = (1..8).map(|m| 2.0 * PI * 3f64.powi(m)).collect();
        // Product formula: |μ̂(2π 3^m)| = Π_{n} |cos(π 3^{m-n})|, bounded below.
        for v in fourier_transform(&mu, &xs) {
            assert!(v.norm() > 0.1, "{}", v.norm());
        }
    }

    #[test]
    fn random_measures_are_reproducible_and_disjoint() {
        let a = build_cantor(&CantorSpec::random_half(2, 9)).unwrap();
        let b = build_cantor(&CantorSpec::random_half(2, 9)).unwrap();
        let c = build_cantor(&CantorSpec::random_half(2, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let gap = 1.0 / 65536.0;
        assert!(a.atoms.windows(2).all(|w| w[1] - w[0] >= gap * (1.0 - 1e-9)));
        assert!((CantorSpec::random_half(1, 0).dimension() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn overlapping_children_are_rejected() {
        let mut spec = CantorSpec::middle_thirds(3);
        spec.offsets = Offsets::Fixed {
            offsets: vec![0.0, 0.2],
        };
        assert!(matches!(build_cantor(&spec), Err(Error::Spec(_))));
        spec.contraction = 0.6;
        assert!(build_cantor(&spec).is_err());
    }

    #[test]
    fn moment_measure_of_single_atom() {
        let mu = DiscreteMeasure::new(vec![0.3], vec![1.0]).unwrap();
        let m3 = moment_measure(&mu, 3).unwrap();
        let xi = 7.0;
        let got = fourier_transform(&m3, &[xi])[0];
        let want = Complex64::from_polar(0.3f64.powi(3), -0.3 * xi);
        assert!((got - want).norm() < 1e-15);
        assert_eq!(moment_measure(&mu, 0).unwrap(), mu);
        assert!(moment_measure(&mu, 9).is_err());
    }

    #[test]
    fn recurrence_matches_direct_transform() {
        let mu = build_cantor(&CantorSpec::middle_thirds(8)).unwrap();
        let fast = transform_moduli(&mu, 100.0, 0.37, 600);
        let xs: Vec<f64> = (0..600).map(|i| 100.0 + 0.37 * i as f64).collect();
        for (a, b) in fast.iter().zip(fourier_transform(&mu, &xs)) {
            assert!((a - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn validity_window_is_enforced() {
        let mu = build_cantor(&CantorSpec::middle_thirds(3)).unwrap();
        // 0.1 · 27 < 2^2, so no annulus from k = 3 is valid.
        assert!(matches!(decay_exponent_fit(&mu, 3..12), Err(Error::Capacity(_))));
    }
}
