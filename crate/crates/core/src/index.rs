//! Multi-indices `α ∈ N^d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("a multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d.max(1)])
    }

    /// `k e_i` in dimension `d`.
    pub fn axis(d: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; d.max(1)];
        v[i] = k;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `x^α`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &v)| v.powi(a as i32))
            .product()
    }

    /// `α!`.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// All multi-indices in dimension `d` with `|α| <= n`, in graded
    /// lexicographic order.
    pub fn up_to(d: usize, n: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=n {
            let mut cur = vec![0u32; d];
            compositions(total, 0, &mut cur, &mut out);
        }
        out
    }
}

fn compositions(rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        compositions(rest - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        // Number of α in N^d with |α| <= n is C(n + d, d).
        assert_eq!(MultiIndex::up_to(2, 3).len(), 10);
        assert_eq!(MultiIndex::up_to(3, 2).len(), 10);
        let all = MultiIndex::up_to(2, 2);
        assert_eq!(all[0], MultiIndex::zero(2));
        assert!(all.windows(2).all(|w| w[0].order() <= w[1].order()));
        assert!(MultiIndex::new(vec![]).is_err());
    }

    #[test]
    fn monomial_and_factorial() {
        let a = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(a.order(), 3);
        assert_eq!(a.monomial(&[3.0, 2.0]), 18.0);
        assert_eq!(a.factorial(), 2.0);
        assert_eq!(a.to_string(), "(2,1)");
    }
}
