//! Truncated multivariate Taylor series with complex coefficients.
//!
//! A jet of order `n` at a point stores `∂^α f / α!` for `|α| <= n`; products
//! and compositions with smooth scalar functions are exact up to that order.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::index::MultiIndex;

/// Multi-index bookkeeping shared by all jets of one `(d, n)`.
#[derive(Debug)]
pub struct JetLayout {
    d: usize,
    order: u32,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(i, j, k)` with `indices[i] + indices[j] = indices[k]`.
    products: Vec<(usize, usize, usize)>,
}

impl JetLayout {
    pub fn new(d: usize, order: u32) -> Arc<Self> {
        let indices = MultiIndex::up_to(d, order);
        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if a.order() + b.order() <= order {
                    let sum: Vec<u32> = a.entries().iter().zip(b.entries()).map(|(x, y)| x + y).collect();
                    let k = lookup[&MultiIndex::new(sum).expect("nonempty")];
                    products.push((i, j, k));
                }
            }
        }
        Arc::new(JetLayout {
            d,
            order,
            indices,
            lookup,
            products,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    layout: Arc<JetLayout>,
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(layout: &Arc<JetLayout>, value: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); layout.len()];
        coeffs[0] = value;
        Jet {
            layout: layout.clone(),
            coeffs,
        }
    }

    pub fn zero(layout: &Arc<JetLayout>) -> Self {
        Self::constant(layout, Complex64::new(0.0, 0.0))
    }

    /// Jet with Taylor coefficients `coeff(α)`.
    pub fn from_fn(layout: &Arc<JetLayout>, coeff: impl Fn(&MultiIndex) -> Complex64) -> Self {
        Jet {
            layout: layout.clone(),
            coeffs: layout.indices.iter().map(coeff).collect(),
        }
    }

    /// The coordinate `x_i` expanded at `x_i = value`.
    pub fn variable(layout: &Arc<JetLayout>, i: usize, value: f64) -> Self {
        let mut jet = Self::constant(layout, Complex64::new(value, 0.0));
        if layout.order >= 1 {
            let pos = layout
                .position(&MultiIndex::axis(layout.d, i, 1))
                .expect("first-order index present");
            jet.coeffs[pos] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    /// All coordinates expanded at `point`.
    pub fn coordinates(layout: &Arc<JetLayout>, point: &[f64]) -> Vec<Self> {
        (0..layout.d).map(|i| Self::variable(layout, i, point[i])).collect()
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Taylor coefficient `∂^α f / α!`; zero beyond the stored order.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.layout
            .position(alpha)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: &MultiIndex) -> Complex64 {
        self.coefficient(alpha) * alpha.factorial()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Jet of `x ↦ f(s x)` from the jet of `f` at `s x`.
    pub fn rescale_arguments(&self, s: f64) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.layout.indices)
                .map(|(c, a)| c * s.powi(a.order() as i32))
                .collect(),
        }
    }

    /// `Σ_k g_k (f - f(x_0))^k` given the Taylor coefficients `g_k` of a scalar
    /// function at `f(x_0)`.
    pub fn compose(&self, taylor: &[Complex64]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = Complex64::new(0.0, 0.0);
        let n = (self.layout.order as usize).min(taylor.len().saturating_sub(1));
        let mut acc = Jet::constant(&self.layout, taylor[n]);
        for k in (0..n).rev() {
            acc = &acc * &delta;
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let a = self.value().exp();
        let mut t = Vec::with_capacity(self.layout.order as usize + 1);
        let mut fact = 1.0;
        for k in 0..=self.layout.order {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(a / fact);
        }
        self.compose(&t)
    }

    /// `1 / f`; the value must be nonzero.
    pub fn recip(&self) -> Self {
        let a = self.value();
        let inv = 1.0 / a;
        let t: Vec<Complex64> = (0..=self.layout.order)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                inv.powu(k + 1) * sign
            })
            .collect();
        self.compose(&t)
    }

    /// Principal square root; the value must be off the negative real axis.
    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let root = a.sqrt();
        let mut t = Vec::with_capacity(self.layout.order as usize + 1);
        let mut binom = 1.0;
        for k in 0..=self.layout.order {
            if k > 0 {
                binom *= (0.5 - (k - 1) as f64) / k as f64;
            }
            t.push(root * binom / a.powu(k));
        }
        self.compose(&t)
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        if rhs.coeffs.len() == 1 || self.coeffs.len() == 1 {
            coeffs[0] = self.coeffs[0] * rhs.coeffs[0];
            return Jet {
                layout: self.layout.clone(),
                coeffs,
            };
        }
        for &(i, j, k) in &self.layout.products {
            coeffs[k] += self.coeffs[i] * rhs.coeffs[j];
        }
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_rule_for_monomials() {
        let layout = JetLayout::new(2, 4);
        let [x, y]: [Jet; 2] = Jet::coordinates(&layout, &[2.0, 3.0]).try_into().unwrap();
        let f = &(&x * &x) * &y; // x^2 y
        assert_eq!(f.value(), c(12.0));
        assert_eq!(f.derivative(&MultiIndex::new(vec![1, 0]).unwrap()), c(12.0));
        assert_eq!(f.derivative(&MultiIndex::new(vec![2, 1]).unwrap()), c(2.0));
        assert_eq!(f.derivative(&MultiIndex::new(vec![3, 0]).unwrap()), c(0.0));
    }

    #[test]
    fn exp_recip_sqrt_derivatives() {
        let layout = JetLayout::new(1, 6);
        let x = Jet::variable(&layout, 0, 0.7);
        let e = x.exp();
        for k in 0..=6 {
            let got = e.derivative(&MultiIndex::new(vec![k]).unwrap());
            assert!((got - c(0.7f64.exp())).norm() < 1e-12);
        }
        let r = x.recip();
        // d^3/dx^3 x^{-1} = -6 x^{-4}
        let d3 = r.derivative(&MultiIndex::new(vec![3]).unwrap());
        assert!((d3 - c(-6.0 / 0.7f64.powi(4))).norm() < 1e-10);
        let s = x.sqrt();
        // d^2/dx^2 x^{1/2} = -1/4 x^{-3/2}
        let d2 = s.derivative(&MultiIndex::new(vec![2]).unwrap());
        assert!((d2 - c(-0.25 * 0.7f64.powf(-1.5))).norm() < 1e-12);
    }

    #[test]
    fn complex_exponential_derivatives() {
        let layout = JetLayout::new(2, 3);
        let [x, _y]: [Jet; 2] = Jet::coordinates(&layout, &[0.0, 0.0]).try_into().unwrap();
        let f = x.scale(Complex64::new(0.0, 5.0)).exp(); // e^{5ix}
        let d1 = f.derivative(&MultiIndex::new(vec![1, 0]).unwrap());
        assert!((d1 - Complex64::new(0.0, 5.0)).norm() < 1e-12);
        let d3 = f.derivative(&MultiIndex::new(vec![3, 0]).unwrap());
        assert!((d3 - Complex64::new(0.0, -125.0)).norm() < 1e-10);
    }

    #[test]
    fn rescaling_matches_chain_rule() {
        let layout = JetLayout::new(1, 4);
        let s = 3.0;
        let at = Jet::variable(&layout, 0, 0.2 * s).exp();
        let direct = Jet::variable(&layout, 0, 0.2).scale(c(s)).exp();
        let scaled = at.rescale_arguments(s);
        for k in 0..=4 {
            let a = MultiIndex::new(vec![k]).unwrap();
            assert!((scaled.coefficient(&a) - direct.coefficient(&a)).norm() < 1e-12);
        }
    }
}
