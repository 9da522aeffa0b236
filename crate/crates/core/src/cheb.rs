//! Polynomials in Chebyshev form on an interval `[a, b]`.
//!
//! Dimensions follow the `P_n` convention: a polynomial in `P_n` has degree
//! at most `n - 1`, i.e. `n` coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebPoly {
    pub interval: [f64; 2],
    pub coeffs: Vec<f64>,
}

impl ChebPoly {
    pub fn new(interval: [f64; 2], coeffs: Vec<f64>) -> Result<Self> {
        if !(interval[1] > interval[0]) || !interval.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("degenerate interval {interval:?}")));
        }
        Ok(ChebPoly { interval, coeffs })
    }

    /// The zero polynomial on `[-1, 1]`.
    pub fn zero() -> Self {
        ChebPoly {
            interval: [-1.0, 1.0],
            coeffs: vec![0.0],
        }
    }

    /// `T_k` on `[-1, 1]`.
    pub fn chebyshev_t(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        ChebPoly {
            interval: [-1.0, 1.0],
            coeffs,
        }
    }

    /// Interpolates `f` at the `m` Chebyshev points of the first kind on
    /// `interval`; exact for polynomials of degree `< m`.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, interval: [f64; 2], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("interpolation needs at least one node".into()));
        }
        let [a, b] = interval;
        let values: Vec<f64> = (0..m)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                f(0.5 * (a + b) + 0.5 * (b - a) * t.cos())
            })
            .collect();
        let mut coeffs = vec![0.0; m];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, v) in values.iter().enumerate() {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                s += v * (j as f64 * t).cos();
            }
            *c = 2.0 * s / m as f64;
        }
        coeffs[0] *= 0.5;
        ChebPoly::new(interval, coeffs)
    }

    /// Number of coefficients (the `n` of `P_n`).
    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    /// Degree after trimming exact zeros.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    #[inline]
    fn to_reference(&self, x: f64) -> f64 {
        let [a, b] = self.interval;
        (2.0 * x - a - b) / (b - a)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.to_reference(x);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + u * b1 - b2
    }

    /// Exact derivative in coefficient space, scaled for the interval.
    pub fn derivative(&self) -> ChebPoly {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebPoly {
                interval: self.interval,
                coeffs: vec![0.0],
            };
        }
        let mut d = vec![0.0; n - 1];
        // c'_{k-1} = c'_{k+1} + 2k c_k
        for k in (1..n).rev() {
            let next = if k + 1 < n - 1 { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.interval[1] - self.interval[0]);
        for c in &mut d {
            *c *= scale;
        }
        ChebPoly {
            interval: self.interval,
            coeffs: d,
        }
    }

    pub fn nth_derivative(&self, order: usize) -> ChebPoly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// The same polynomial expressed on another interval.
    pub fn on_interval(&self, interval: [f64; 2]) -> Result<ChebPoly> {
        if interval == self.interval {
            return Ok(self.clone());
        }
        ChebPoly::interpolate(|x| self.eval(x), interval, self.coeffs.len().max(1))
    }

    /// `self - other` on `self`'s interval.
    pub fn sub(&self, other: &ChebPoly) -> Result<ChebPoly> {
        let other = other.on_interval(self.interval)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) - other.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        ChebPoly::new(self.interval, coeffs)
    }

    pub fn scaled(&self, s: f64) -> ChebPoly {
        ChebPoly {
            interval: self.interval,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// Degree-`(r-1)` Taylor section of `p` at `z`: the unique `q ∈ P_r` with
/// `q^{(ν)}(z) = p^{(ν)}(z)` for `0 ≤ ν ≤ r - 1`.
pub fn taylor_at(p: &ChebPoly, z: f64, r: usize) -> Result<ChebPoly> {
    if r == 0 {
        return Err(Error::InvalidParameter("Taylor section needs r ≥ 1".into()));
    }
    let mut derivs = Vec::with_capacity(r);
    let mut d = p.clone();
    let mut fact = 1.0;
    for nu in 0..r {
        if nu > 0 {
            d = d.derivative();
            fact *= nu as f64;
        }
        derivs.push(d.eval(z) / fact);
    }
    let taylor = move |x: f64| {
        let t = x - z;
        derivs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    };
    ChebPoly::interpolate(taylor, p.interval, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_trig_definition() {
        let t5 = ChebPoly::chebyshev_t(5);
        for &x in &[-1.0, -0.3, 0.0, 0.42, 1.0] {
            let exact = (5.0 * f64::acos(x)).cos();
            assert!((t5.eval(x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_monomial_on_shifted_interval() {
        let p = ChebPoly::interpolate(|x| x * x * x, [0.0, 2.0], 4).unwrap();
        let d = p.derivative();
        assert_eq!(d.dimension(), 3);
        for &x in &[0.0, 0.5, 1.7] {
            assert!((d.eval(x) - 3.0 * x * x).abs() < 1e-12);
        }
        let d2 = p.nth_derivative(2);
        assert!((d2.eval(1.1) - 6.6).abs() < 1e-12);
        assert!(p.nth_derivative(4).eval(0.3).abs() < 1e-12);
    }

    #[test]
    fn taylor_examples() {
        let sq = ChebPoly::interpolate(|x| x * x, [-1.0, 1.0], 3).unwrap();
        let q = taylor_at(&sq, 0.0, 2).unwrap();
        for &x in &[-0.7, 0.2, 1.0] {
            assert!(q.eval(x).abs() < 1e-14);
        }
        let cube = ChebPoly::interpolate(|x| x * x * x, [-1.0, 1.0], 4).unwrap();
        let q = taylor_at(&cube, 1.0, 3).unwrap();
        assert!((q.eval(0.9) - 0.73).abs() < 1e-13);
        assert!((cube.eval(0.9) - 0.729).abs() < 1e-13);
        // p ∈ P_r is its own section
        let p = ChebPoly::new([-1.0, 1.0], vec![0.3, -1.2, 0.5]).unwrap();
        let q = taylor_at(&p, 0.4, 3).unwrap();
        for (a, b) in p.coeffs.iter().zip(&q.coeffs) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_degenerate_interval() {
        assert!(ChebPoly::new([1.0, 1.0], vec![1.0]).is_err());
    }
}
