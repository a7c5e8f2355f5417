//! Bessel functions `J_m` of real order, the quotients `f_m(r) = J_m(r) / r^m`
//! and the exact integer tables that express every derivative of `f_m` as a
//! finite combination of higher-order quotients:
//!
//! ```text
//! f_m^{(2k)}(r)   = Σ_j (-1)^{j+k}   a_{jk} r^{2j}   f_{m+k+j}(r)
//! f_m^{(2k+1)}(r) = Σ_j (-1)^{j+k+1} b_{jk} r^{2j+1} f_{m+k+j+1}(r)
//! ```

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{fit_linear, FitResult};

/// Largest table the recurrences are built for.
pub const MAX_TABLE_K: usize = 60;

/// Beyond this argument the plain power series is hopeless in double precision.
const SERIES_LIMIT: f64 = 40.0;
const MILLER_LIMIT: f64 = 50.0;

/// Nonnegative real order of a Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(m: f64) -> Result<Self> {
        if m >= 0.0 && m.is_finite() {
            Ok(BesselOrder(m))
        } else {
            Err(Error::domain(format!("Bessel order {m} must be finite and >= 0")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Ascending series for `f_m(r) = J_m(r) / r^m`, with the division by `r^m`
/// carried out term by term.
fn f_series(m: f64, r: f64) -> f64 {
    let q = -(r * r) / 4.0;
    let mut term = if m < 150.0 {
        1.0 / (2f64.powf(m) * gamma_exact(m + 1.0))
    } else {
        (-m * std::f64::consts::LN_2 - ln_gamma(m + 1.0)).exp()
    };
    let mut acc = CompensatedSum::default();
    acc.add(term);
    for j in 1..500 {
        let jf = j as f64;
        term *= q / (jf * (jf + m));
        acc.add(term);
        if term.abs() <= 1e-17 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

/// `Γ(x)` that is exact at small integers, where statrs is off by an ulp.
fn gamma_exact(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        (2..x as u32).fold(1.0, |acc, i| acc * i as f64)
    } else {
        gamma(x)
    }
}

fn j_series(m: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if m == 0.0 { 1.0 } else { 0.0 };
    }
    f_series(m, r) * (m * r.ln()).exp()
}

/// Power-series evaluation of `J_m(r)`. Only trustworthy for moderate `r`.
pub fn bessel_j_series(order: BesselOrder, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("argument {r} must be >= 0")));
    }
    if r > SERIES_LIMIT {
        return Err(Error::domain(format!(
            "series for J at r = {r} cancels catastrophically; use bessel_j or bessel_j_asymptotic"
        )));
    }
    Ok(j_series(order.value(), r))
}

fn series_is_accurate(nu: f64, x: f64) -> bool {
    x <= 8.0 || x * x / 4.0 < nu + 1.0
}

/// Hankel asymptotic expansion, accurate to rounding for `x > 50` and small orders.
fn j_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= last && k > 2 {
            break;
        }
        last = next.abs();
        term = next;
        // term is a_k / x^k; P collects even k, Q odd k, both with alternating signs.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (nu / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller backward recurrence for `J_{ν0 + i}(x)`, `i = 0..=top`, normalised by
/// `(x/2)^{ν0} = Σ_k (ν0 + 2k) Γ(ν0 + k) / k! · J_{ν0 + 2k}(x)`.
fn j_miller(nu0: f64, top: usize, x: f64) -> Vec<f64> {
    let reach = (top as f64 + nu0).max(x);
    let mut start = (reach + 30.0 + (40.0 * reach).sqrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    // Normalisation weights for the even indices.
    let half = start / 2;
    let mut weights = vec![0.0; half + 1];
    weights[0] = gamma_exact(nu0 + 1.0);
    let mut g = weights[0];
    for k in 1..=half {
        if k > 1 {
            g *= (nu0 + k as f64 - 1.0) / k as f64;
        }
        weights[k] = (nu0 + 2.0 * k as f64) * g;
    }

    let mut out = vec![0.0; top + 1];
    let mut upper = 0.0f64;
    let mut cur = 1e-30f64;
    let mut norm = 0.0f64;
    for i in (0..=start).rev() {
        if i <= top {
            out[i] = cur;
        }
        if i % 2 == 0 {
            norm += weights[i / 2] * cur;
        }
        if i == 0 {
            break;
        }
        let lower = 2.0 * (nu0 + i as f64) / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            upper *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut().skip(i.saturating_sub(1)) {
                *v *= 1e-250;
            }
        }
    }
    let scale = (x / 2.0).powf(nu0) / norm;
    out.iter().map(|v| v * scale).collect()
}

/// `J_{ν}, J_{ν+1}, …, J_{ν+count-1}` at `x >= 0`.
pub fn bessel_j_orders(nu: f64, count: usize, x: f64) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    if x == 0.0 {
        return (0..count)
            .map(|i| if nu + i as f64 == 0.0 { 1.0 } else { 0.0 })
            .collect();
    }
    let top_order = nu + (count - 1) as f64;
    if series_is_accurate(nu, x) {
        return (0..count).map(|i| j_series(nu + i as f64, x)).collect();
    }
    let base = nu.floor();
    let nu0 = nu - base;
    let offset = base as usize;
    if x > MILLER_LIMIT && top_order < x {
        let mut vals = Vec::with_capacity(offset + count);
        let mut prev = j_hankel(nu0, x);
        let mut cur = j_hankel(nu0 + 1.0, x);
        vals.push(prev);
        vals.push(cur);
        for i in 1..(offset + count).saturating_sub(1) {
            let next = 2.0 * (nu0 + i as f64) / x * cur - prev;
            prev = cur;
            cur = next;
            vals.push(cur);
        }
        return vals[offset..offset + count].to_vec();
    }
    let all = j_miller(nu0, offset + count - 1, x);
    all[offset..offset + count].to_vec()
}

/// `J_m(r)` for real order `m >= 0` and `r >= 0`.
pub fn bessel_j(order: BesselOrder, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("argument {r} must be finite and >= 0")));
    }
    Ok(bessel_j_orders(order.value(), 1, r)[0])
}

/// Leading large-argument term `(2/(πr))^{1/2} cos(r − πm/2 − π/4)`.
pub fn bessel_j_asymptotic(order: BesselOrder, r: f64) -> f64 {
    let m = order.value();
    (2.0 / (PI * r)).sqrt() * (r - PI * m / 2.0 - PI / 4.0).cos()
}

/// `f_m(r) = J_m(r) / r^m`, including the removable point `r = 0`.
pub fn f_eval(m: f64, r: f64) -> Result<f64> {
    let order = BesselOrder::new(m)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("argument {r} must be finite and >= 0")));
    }
    Ok(f_orders(order.value(), 1, r)[0])
}

/// `f_m, f_{m+1}, …, f_{m+count-1}` at `r >= 0`.
pub fn f_orders(m: f64, count: usize, r: f64) -> Vec<f64> {
    if r < 1e-3 || series_is_accurate(m, r) {
        return (0..count).map(|i| f_series(m + i as f64, r)).collect();
    }
    let lr = r.ln();
    bessel_j_orders(m, count, r)
        .into_iter()
        .enumerate()
        .map(|(i, j)| j * (-(m + i as f64) * lr).exp())
        .collect()
}

/// Exact triangular tables `a[j][k]`, `b[j][k]`, `0 <= j <= k <= k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    k_max: usize,
    // Row k holds entries j = 0..=k.
    a: Vec<Vec<BigUint>>,
    b: Vec<Vec<BigUint>>,
}

/// Builds the derivative tables from `f_m' = -r f_{m+1}` by the two recurrences
/// `b_{jk} = 2(j+1) a_{j+1,k} + a_{jk}` and `a_{jk} = (2j+1) b_{j,k-1} + b_{j-1,k-1}`.
pub fn coeff_tables(k_max: usize) -> Result<CoeffTable> {
    if k_max > MAX_TABLE_K {
        return Err(Error::domain(format!(
            "k_max = {k_max} exceeds the supported maximum {MAX_TABLE_K}"
        )));
    }
    let mut a: Vec<Vec<BigUint>> = Vec::with_capacity(k_max + 1);
    let mut b: Vec<Vec<BigUint>> = Vec::with_capacity(k_max + 1);
    a.push(vec![BigUint::one()]);
    b.push(vec![BigUint::one()]);
    for k in 1..=k_max {
        let prev = &b[k - 1];
        let mut row = Vec::with_capacity(k + 1);
        row.push(prev[0].clone());
        for j in 1..k {
            row.push(&prev[j] * BigUint::from(2 * j + 1) + &prev[j - 1]);
        }
        row.push(BigUint::one());

        let mut brow = Vec::with_capacity(k + 1);
        for j in 0..k {
            brow.push(&row[j + 1] * BigUint::from(2 * (j + 1)) + &row[j]);
        }
        brow.push(BigUint::one());
        a.push(row);
        b.push(brow);
    }
    Ok(CoeffTable { k_max, a, b })
}

impl CoeffTable {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `a_{jk}`; panics if `j > k` or `k > k_max`.
    pub fn a(&self, j: usize, k: usize) -> &BigUint {
        &self.a[k][j]
    }

    pub fn b(&self, j: usize, k: usize) -> &BigUint {
        &self.b[k][j]
    }

    /// Largest derivative order the table can expand.
    pub fn max_derivative(&self) -> usize {
        2 * self.k_max + 1
    }

    /// JSON with square arrays `a[j][k]`, `b[j][k]` of decimal strings; entries
    /// with `j > k` are `"0"`.
    pub fn to_json(&self) -> serde_json::Value {
        let square = |t: &Vec<Vec<BigUint>>| -> Vec<Vec<String>> {
            (0..=self.k_max)
                .map(|j| {
                    (0..=self.k_max)
                        .map(|k| if j <= k { t[k][j].to_str_radix(10) } else { "0".into() })
                        .collect()
                })
                .collect()
        };
        serde_json::json!({
            "k_max": self.k_max,
            "a": square(&self.a),
            "b": square(&self.b),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            k_max: usize,
            a: Vec<Vec<String>>,
            b: Vec<Vec<String>>,
        }
        let raw: Raw = serde_json::from_value(value.clone())
            .map_err(|e| Error::Spec(format!("coefficient table JSON: {e}")))?;
        let n = raw.k_max + 1;
        let parse = |square: Vec<Vec<String>>| -> Result<Vec<Vec<BigUint>>> {
            if square.len() != n || square.iter().any(|row| row.len() != n) {
                return Err(Error::Spec(format!("table must be {n} x {n}")));
            }
            let cells: Vec<Vec<BigUint>> = square
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| {
                            BigUint::parse_bytes(s.as_bytes(), 10)
                                .ok_or_else(|| Error::Spec(format!("bad integer {s:?}")))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            Ok((0..n).map(|k| (0..=k).map(|j| cells[j][k].clone()).collect()).collect())
        };
        Ok(CoeffTable {
            k_max: raw.k_max,
            a: parse(raw.a)?,
            b: parse(raw.b)?,
        })
    }
}

/// One term `sign · coefficient · r^power · f_{m + shift}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivTerm {
    pub sign: i8,
    pub coefficient: BigUint,
    pub power: u32,
    pub order_shift: u32,
}

/// The finite expansion of `f_m^{(n)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivExpansion {
    pub order: usize,
    pub terms: Vec<DerivTerm>,
}

pub fn deriv_expansion(n: usize, table: &CoeffTable) -> Result<DerivExpansion> {
    if n > table.max_derivative() {
        return Err(Error::capacity(format!(
            "derivative order {n} needs k_max >= {}, table has {}",
            n / 2,
            table.k_max
        )));
    }
    let k = n / 2;
    let terms = (0..=k)
        .map(|j| {
            let odd = n % 2 == 1;
            let exponent = j + k + usize::from(odd);
            DerivTerm {
                sign: if exponent.is_multiple_of(2) { 1 } else { -1 },
                coefficient: if odd {
                    table.b(j, k).clone()
                } else {
                    table.a(j, k).clone()
                },
                power: (2 * j + usize::from(odd)) as u32,
                order_shift: (k + j + usize::from(odd)) as u32,
            }
        })
        .collect();
    Ok(DerivExpansion { order: n, terms })
}

/// `f_m^{(n)}(r)` evaluated through the exact expansion.
pub fn f_deriv(m: f64, n: usize, r: f64, table: &CoeffTable) -> Result<f64> {
    BesselOrder::new(m)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("argument {r} must be finite and >= 0")));
    }
    let expansion = deriv_expansion(n, table)?;
    let first = expansion.terms[0].order_shift;
    let fs = f_orders(m + first as f64, expansion.terms.len(), r);
    let mut acc = CompensatedSum::default();
    for (term, f) in expansion.terms.iter().zip(fs) {
        let c = term.coefficient.to_f64().unwrap_or(f64::INFINITY);
        acc.add(term.sign as f64 * c * r.powi(term.power as i32) * f);
    }
    Ok(acc.value())
}

/// Above this radius derivatives come from the differentiated Hankel expansion;
/// the exact expansion cancels roughly like `r^{n/2}` there.
pub const STABLE_SWITCH: f64 = 20.0;

/// `f_m^{(n)}(r)` for `r >= 20`, by differentiating
/// `f_m(r) = Re[e^{i(r - φ)} (2/π)^{1/2} Σ_k i^k a_k(m) r^{-m-1/2-k}]` term by term.
pub fn f_deriv_asymptotic(m: f64, n: usize, r: f64) -> Result<f64> {
    BesselOrder::new(m)?;
    if !(r >= STABLE_SWITCH) || !r.is_finite() {
        return Err(Error::domain(format!(
            "asymptotic derivative needs r >= {STABLE_SWITCH}, got {r}"
        )));
    }
    use num_complex::Complex64;
    let mu = 4.0 * m * m;
    let phase = r - (m / 2.0 + 0.25) * PI;
    // i^{n-l} C(n, l) (-s)_l r^{-l} for the current s, summed over l.
    let deriv_factor = |s: f64| -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        let mut falling = 1.0;
        let mut binom = 1.0;
        for l in 0..=n {
            if l > 0 {
                falling *= (-s - (l - 1) as f64) / r;
                binom *= (n - l + 1) as f64 / l as f64;
            }
            total += Complex64::i().powu((n - l) as u32) * (binom * falling);
        }
        total
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ak = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 0..200usize {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            let next = ak * (mu - odd * odd) / (k as f64 * 8.0 * r);
            if next.abs() >= last && k > 2 {
                break;
            }
            last = next.abs();
            ak = next;
        }
        let s = m + 0.5 + k as f64;
        acc += Complex64::i().powu(k as u32) * ak * deriv_factor(s);
        if ak == 0.0 || ak.abs() < 1e-17 {
            break;
        }
    }
    let value = Complex64::from_polar(1.0, phase) * acc;
    Ok((2.0 / PI).sqrt() * r.powf(-m - 0.5) * value.re)
}

/// `f_m^{(n)}(r)` using the exact expansion below [`STABLE_SWITCH`] and the
/// asymptotic form above it.
pub fn f_deriv_stable(m: f64, n: usize, r: f64, table: &CoeffTable) -> Result<f64> {
    if r >= STABLE_SWITCH {
        deriv_expansion(n, table)?;
        f_deriv_asymptotic(m, n, r)
    } else {
        f_deriv(m, n, r, table)
    }
}

/// Coefficient growth profile: `max_j a_{jk} / k!` per row.
pub fn coeff_growth_ratios(table: &CoeffTable) -> Vec<f64> {
    (0..=table.k_max)
        .map(|k| {
            let max = table.a[k].iter().max().cloned().unwrap_or_default();
            let lnmax = max.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
            (lnmax - ln_gamma(k as f64 + 1.0)).exp()
        })
        .collect()
}

/// Fits `ln(max_j a_{jk} / k!)` against `k` over `8 <= k <= k_max`; the slope
/// estimates `ln A` in a `C A^k k!` bound.
pub fn coeff_growth_check(table: &CoeffTable) -> Result<FitResult> {
    if table.k_max < 8 {
        return Err(Error::domain(format!(
            "growth fit needs k_max >= 8, table has {}",
            table.k_max
        )));
    }
    let ratios = coeff_growth_ratios(table);
    let ks: Vec<f64> = (0..=table.k_max).map(|k| k as f64).collect();
    let logs: Vec<f64> = ratios.iter().map(|v| v.ln()).collect();
    fit_linear(&ks, &logs, 8..table.k_max + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(m: f64) -> BesselOrder {
        BesselOrder::new(m).unwrap()
    }

    #[test]
    fn j0_at_origin_and_first_zero() {
        assert_eq!(bessel_j(order(0.0), 0.0).unwrap(), 1.0);
        assert!(bessel_j(order(0.0), 2.404825557695773).unwrap().abs() < 1e-9);
    }

    #[test]
    fn half_integer_closed_form() {
        for &r in &[0.3, 1.0, PI, 7.5, 12.0, 33.0, 49.0, 75.0, 400.0] {
            let exact = (2.0 / (PI * r)).sqrt() * r.sin();
            let got = bessel_j(order(0.5), r).unwrap();
            assert!((got - exact).abs() < 1e-12, "r = {r}: {got} vs {exact}");
            let exact32 = (2.0 / (PI * r)).sqrt() * (r.sin() / r - r.cos());
            let got32 = bessel_j(order(1.5), r).unwrap();
            assert!((got32 - exact32).abs() < 1e-12, "r = {r}: {got32} vs {exact32}");
        }
        assert!(bessel_j(order(0.5), PI).unwrap().abs() < 1e-12);
    }

    #[test]
    fn branches_agree_across_switch_points() {
        // The series and Miller overlap for moderate arguments; Miller and
        // Hankel overlap just past the Miller limit.
        for &m in &[0.0, 0.5, 1.0, 2.5, 7.0] {
            for &r in &[5.0, 9.0, 12.0] {
                let s = j_series(m, r);
                let b = j_miller(m - m.floor(), m.floor() as usize, r)[m.floor() as usize];
                assert!((s - b).abs() < 1e-11, "m={m} r={r}: {s} vs {b}");
            }
            for &r in &[55.0, 80.0] {
                let h = bessel_j_orders(m, 1, r)[0];
                let b = j_miller(m - m.floor(), m.floor() as usize, r)[m.floor() as usize];
                assert!((h - b).abs() < 1e-13, "m={m} r={r}: {h} vs {b}");
            }
        }
    }

    #[test]
    fn orders_match_individual_evaluation() {
        for &r in &[0.0005, 3.0, 20.0, 60.0, 1000.0] {
            let seq = bessel_j_orders(0.5, 6, r);
            for (i, v) in seq.iter().enumerate() {
                let single = bessel_j(order(0.5 + i as f64), r).unwrap();
                assert!((v - single).abs() < 1e-13 * (1.0 + single.abs()));
            }
        }
    }

    #[test]
    fn series_refuses_large_arguments() {
        assert!(bessel_j_series(order(0.0), 1000.0).is_err());
        assert!((bessel_j_series(order(0.0), 1.0).unwrap() - 0.7651976865579666).abs() < 1e-15);
        assert!(BesselOrder::new(-1.0).is_err());
        assert!(bessel_j(order(0.0), -1.0).is_err());
    }

    #[test]
    fn f_at_origin() {
        assert_eq!(f_eval(0.0, 0.0).unwrap(), 1.0);
        assert!((f_eval(1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((f_eval(1.0, 1e-9).unwrap() - 0.5).abs() < 1e-10);
        let expect = 1.0 / (2f64.powf(0.5) * gamma(1.5));
        assert!((f_eval(0.5, 0.0).unwrap() - expect).abs() < 1e-15);
        assert!(f_eval(0.5, PI).unwrap().abs() < 1e-12);
    }

    #[test]
    fn small_tables_by_hand() {
        let t = coeff_tables(3).unwrap();
        assert_eq!(t.b(0, 0), &BigUint::from(1u32));
        assert_eq!(t.a(0, 1), &BigUint::from(1u32));
        assert_eq!(t.a(1, 1), &BigUint::from(1u32));
        assert_eq!(t.b(0, 1), &BigUint::from(3u32));
        assert_eq!(t.a(0, 2), &BigUint::from(3u32));
        assert_eq!(t.a(1, 2), &BigUint::from(6u32));
        assert_eq!(t.a(2, 2), &BigUint::from(1u32));
        assert!(coeff_tables(61).is_err());
    }

    #[test]
    fn table_invariants_hold_exactly() {
        let t = coeff_tables(MAX_TABLE_K).unwrap();
        for k in 0..=t.k_max() {
            assert!(t.a(k, k).is_one() && t.b(k, k).is_one());
            if k >= 1 {
                assert_eq!(t.a(0, k), t.b(0, k - 1));
            }
            for j in 0..=k {
                assert!(t.a(j, k) > &BigUint::default());
                assert!(t.b(j, k) > &BigUint::default());
            }
        }
    }

    #[test]
    fn table_json_round_trips() {
        let t = coeff_tables(10).unwrap();
        let v = t.to_json();
        assert_eq!(v["a"][0][2], "3");
        assert_eq!(v["a"][2][0], "0");
        assert_eq!(CoeffTable::from_json(&v).unwrap(), t);
        assert!(CoeffTable::from_json(&serde_json::json!({"k_max": 1, "a": [["1"]], "b": [["1"]]}))
            .is_err());
    }

    #[test]
    fn expansion_shape() {
        let t = coeff_tables(5).unwrap();
        for n in 0..=11 {
            let e = deriv_expansion(n, &t).unwrap();
            assert_eq!(e.terms.len(), n / 2 + 1);
            for w in e.terms.windows(2) {
                assert_eq!(w[0].sign, -w[1].sign);
            }
        }
        assert!(matches!(deriv_expansion(12, &t), Err(Error::Capacity(_))));
    }

    #[test]
    fn derivative_identities() {
        let t = coeff_tables(4).unwrap();
        let d1 = f_deriv(0.0, 1, 2.0, &t).unwrap();
        assert!((d1 + 2.0 * f_eval(1.0, 2.0).unwrap()).abs() < 1e-15);
        assert_eq!(f_deriv(0.0, 0, 5.0, &t).unwrap(), f_eval(0.0, 5.0).unwrap());
        let d2 = f_deriv(1.0, 2, 3.0, &t).unwrap();
        let by_hand = 9.0 * f_eval(3.0, 3.0).unwrap() - f_eval(2.0, 3.0).unwrap();
        assert!((d2 - by_hand).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_derivatives_match_expansion_at_moderate_r() {
        let t = coeff_tables(6).unwrap();
        for &m in &[0.0, 0.5, 1.0] {
            for n in 0..=12 {
                for &r in &[20.0, 26.0, 35.0] {
                    let exact = f_deriv(m, n, r, &t).unwrap();
                    let asym = f_deriv_asymptotic(m, n, r).unwrap();
                    let scale = r.powf(-m - 0.5);
                    assert!(
                        (exact - asym).abs() < 1e-8 * scale,
                        "m={m} n={n} r={r}: {exact} vs {asym}"
                    );
                }
            }
        }
        assert!(f_deriv_asymptotic(0.0, 1, 5.0).is_err());
    }

    #[test]
    fn growth_check_requires_depth() {
        assert!(coeff_growth_check(&coeff_tables(5).unwrap()).is_err());
        let ratios = coeff_growth_ratios(&coeff_tables(12).unwrap());
        assert!((ratios[0] - 1.0).abs() < 1e-14);
    }
}
