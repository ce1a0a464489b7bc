//! Generic biconfluent-Heun series engine.
//!
//! The equation handled here is
//!
//! ```text
//! z H'' + (1 + a - b z - 2 z^2) H' + [(c - a - 2) z - (d + b(1 + a))/2] H = 0
//! ```
//!
//! with the regular Frobenius branch `H(0) = 1`. Writing `η* = (1 + a)/2` and
//! `g = d/2`, the coefficients of `H(z) = Σ A_j z^j` obey
//!
//! ```text
//! A_1 = (b η* + g) / (2 η*)
//! A_{k+1} = { [b(k + η*) + g] A_k + [2(k-1) - (c - a - 2)] A_{k-1} }
//!           / [(k+1)(k + 2η*)]        for k >= 1.
//! ```
//!
//! `H` truncates to a degree-`n` polynomial exactly when `c - a - 2 = 2n` and
//! `A_{n+1} = 0`: the recurrence then kills `A_{n+2}` as well (the `A_{k-1}`
//! weight `2(k-1) - 2n` vanishes at `k - 1 = n`), and two consecutive zeros
//! annihilate the rest. The same vanishing condition is encoded by the
//! continuant of an (n+1)-dimensional tridiagonal matrix, see [`continuant`].

use thiserror::Error;

use crate::params::ReducedProblem;

/// Relative threshold below which a coefficient counts as zero when
/// detecting truncation. Coefficients grow factorially in generic
/// non-truncating cases, so the scale is the largest coefficient magnitude.
pub const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum HeunError {
    #[error("biconfluent Heun parameters require finite values and 1 + a > 0, got a = {a}")]
    InvalidParams { a: f64 },
    #[error("coefficient count must be at least 2, got {0}")]
    InvalidCount(usize),
    #[error("series evaluation did not converge at z = {z}: tail estimate {tail:.3e} above tolerance {tol:.3e} after {terms} terms")]
    NotConverged { z: f64, tail: f64, tol: f64, terms: usize },
}

/// The four parameters `(a, b, c, d)` of the biconfluent Heun equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl HeunParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Indicial exponent `η* = (1 + a)/2` of the regular branch.
    pub fn eta_star(&self) -> f64 {
        0.5 * (1.0 + self.a)
    }

    /// The constant `g = d/2` entering the recurrence.
    pub fn g(&self) -> f64 {
        0.5 * self.d
    }

    fn validate(&self) -> Result<(), HeunError> {
        let finite =
            self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite();
        if !finite || 1.0 + self.a <= 0.0 {
            return Err(HeunError::InvalidParams { a: self.a });
        }
        Ok(())
    }
}

impl From<&ReducedProblem> for HeunParams {
    fn from(red: &ReducedProblem) -> Self {
        Self { a: red.a_heun, b: red.b_heun, c: red.c_heun, d: red.d_heun }
    }
}

/// Frobenius coefficients `A_0 .. A_{count-1}` with truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunSeries {
    coeffs: Vec<f64>,
    params: HeunParams,
    truncated_at: Option<usize>,
}

impl HeunSeries {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn params(&self) -> HeunParams {
        self.params
    }

    /// Least `n` such that every coefficient beyond index `n` vanishes
    /// (relative to the largest coefficient), i.e. the polynomial degree.
    pub fn truncated_at(&self) -> Option<usize> {
        self.truncated_at
    }

    /// Evaluates `Σ A_j z^j`.
    ///
    /// Truncated series are summed exactly. Otherwise terms are added until a
    /// geometric tail estimate drops below `tol`; if the available
    /// coefficients run out first the evaluation reports `NotConverged`.
    /// Terms are inspected in pairs so that even/odd-only series (b = d = 0)
    /// converge correctly.
    pub fn evaluate(&self, z: f64, tol: f64) -> Result<f64, HeunError> {
        assert!(z >= 0.0, "series argument must be nonnegative");
        assert!(tol > 0.0, "tolerance must be positive");
        if let Some(n) = self.truncated_at {
            let mut acc = 0.0;
            for &coeff in self.coeffs[..=n].iter().rev() {
                acc = acc * z + coeff;
            }
            return Ok(acc);
        }

        let mut sum = 0.0;
        let mut z_pow = 1.0;
        let mut prev_pair = f64::INFINITY;
        let mut index = 0;
        while index < self.coeffs.len() {
            let t0 = self.coeffs[index] * z_pow;
            z_pow *= z;
            sum += t0;
            let t1 = if index + 1 < self.coeffs.len() {
                let t = self.coeffs[index + 1] * z_pow;
                z_pow *= z;
                sum += t;
                t
            } else {
                0.0
            };
            let pair = t0.abs() + t1.abs();
            if index >= 4 {
                if pair == 0.0 && prev_pair == 0.0 {
                    return Ok(sum);
                }
                let ratio = pair / prev_pair;
                if ratio < 0.75 && pair * ratio / (1.0 - ratio) <= tol {
                    return Ok(sum);
                }
            }
            prev_pair = pair.max(f64::MIN_POSITIVE);
            index += 2;
        }
        Err(HeunError::NotConverged {
            z,
            tail: prev_pair,
            tol,
            terms: self.coeffs.len(),
        })
    }
}

/// Computes the first `count` Frobenius coefficients, `A_0 = 1`.
pub fn series_coefficients(params: HeunParams, count: usize) -> Result<HeunSeries, HeunError> {
    params.validate()?;
    if count < 2 {
        return Err(HeunError::InvalidCount(count));
    }
    let eta = params.eta_star();
    let g = params.g();
    let degree_term = params.c - params.a - 2.0;

    let mut coeffs = vec![0.0; count];
    coeffs[0] = 1.0;
    coeffs[1] = (params.b * eta + g) / (2.0 * eta);
    for k in 1..count - 1 {
        let kf = k as f64;
        let numer = (params.b * (kf + eta) + g) * coeffs[k]
            + (2.0 * (kf - 1.0) - degree_term) * coeffs[k - 1];
        coeffs[k + 1] = numer / ((kf + 1.0) * (kf + 2.0 * eta));
    }

    let truncated_at = detect_truncation(&coeffs);
    Ok(HeunSeries { coeffs, params, truncated_at })
}

/// Least `n` with the whole tail `A_{n+1}, A_{n+2}, ...` below `ZERO_TOL`
/// relative to the largest coefficient; requires at least two tail entries.
fn detect_truncation(coeffs: &[f64]) -> Option<usize> {
    let max = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if max == 0.0 {
        return None;
    }
    let threshold = ZERO_TOL * max;
    let mut tail_start = coeffs.len();
    while tail_start > 1 && coeffs[tail_start - 1].abs() <= threshold {
        tail_start -= 1;
    }
    // need to see A_{n+1} and A_{n+2} inside the computed range
    if coeffs.len() - tail_start >= 2 {
        Some(tail_start - 1)
    } else {
        None
    }
}

/// Returns the residual pair of the two truncation conditions at degree `n`:
/// `(A_{n+1}, c - a - 2 - 2n)`. Both vanish iff the series truncates to a
/// degree-`n` polynomial.
pub fn truncation_residual(params: HeunParams, n: usize) -> Result<(f64, f64), HeunError> {
    let series = series_coefficients(params, n + 2)?;
    let degree_residual = params.c - params.a - 2.0 - 2.0 * n as f64;
    Ok((series.coeffs[n + 1], degree_residual))
}

/// Continuant `D_{n+1}` of the (n+1)-dimensional tridiagonal matrix encoding
/// `A_{n+1} = 0` under the degree condition `c - a - 2 = 2n`:
/// diagonal `Π_j = -b(η* + j) - g`, super-diagonal `1`, sub-diagonal
/// `Σ_j = 2(j+1)(j + 2η*)(n - j)`. The three-term recurrence is
/// `D_0 = 1`, `D_1 = -(bη* + g)`, `D_{j+1} = Π_j D_j - Σ_{j-1} D_{j-1}`.
///
/// `D_{n+1}` and `A_{n+1}` are proportional up to the sign `(-1)^{n+1}` and a
/// positive factorial factor, so their zero sets in `b` coincide.
pub fn continuant(params: HeunParams, n: usize) -> Result<f64, HeunError> {
    params.validate()?;
    let eta = params.eta_star();
    let g = params.g();
    let nf = n as f64;

    let mut d_prev = 1.0;
    let mut d_cur = -(params.b * eta + g);
    for j in 1..=n {
        let jf = j as f64;
        let diag = -(params.b * (eta + jf) + g);
        let sub = 2.0 * jf * (jf - 1.0 + 2.0 * eta) * (nf - (jf - 1.0));
        let d_next = diag * d_cur - sub * d_prev;
        d_prev = d_cur;
        d_cur = d_next;
    }
    Ok(d_cur)
}
