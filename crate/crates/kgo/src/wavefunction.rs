//! Radial wave-function assembly, normalization and node counting.
//!
//! The radial solution in raw coordinates is
//!
//! ```text
//! psi(x) = (sqrt(freq) x)^exponent * exp(-(b_heun sqrt(freq) x + freq x^2)/2) * H(sqrt(freq) x)
//! ```
//!
//! with `H` the biconfluent-Heun factor of the bound state's reduction
//! snapshot. The snapshot carries everything the formula needs, including any
//! parameter a joint solve adjusted. Normalization uses the flat half-line
//! L2 measure: the metric determinant is -1, so no volume factor appears;
//! quadrature is composite Simpson with the implicit `psi(0) = 0` node.

use thiserror::Error;

use crate::heun::{self, HeunError, HeunParams, HeunSeries};
use crate::spectrum::BoundState;

/// Default number of stored samples on `(0, x_max]`.
pub const DEFAULT_SAMPLES: usize = 4001;

/// Values below this fraction of the peak are ignored by the node counter.
const NODE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WaveError {
    #[error("at least 16 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("x_max must be positive and finite, got {0}")]
    InvalidXMax(f64),
    #[error("Heun factor evaluation failed at x = {x}: {source}")]
    EvalError { x: f64, source: HeunError },
    #[error("wave function norm underflowed")]
    ZeroNorm,
}

/// Sampled radial wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTable {
    xs: Vec<f64>,
    psi: Vec<f64>,
    norm: f64,
    nodes: usize,
    x_max: f64,
    bound_state: BoundState,
}

impl WaveTable {
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// L2 norm measured before the most recent scaling.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn bound_state(&self) -> &BoundState {
        &self.bound_state
    }
}

/// Default grid extent: three times the classical turning point of the
/// reduced problem, never less than `5/sqrt(freq)`, so the Gaussian tail is
/// far below resolution at the boundary.
pub fn default_x_max(red: &crate::params::ReducedProblem) -> f64 {
    let r_turn_sq = red.beta0.abs() / red.freq + red.c_heun.abs();
    let x_turn = (r_turn_sq / red.freq).sqrt();
    (3.0 * x_turn).max(5.0 / red.freq.sqrt())
}

/// Builds the Heun factor series for a bound state: a short series when it
/// truncates to the expected polynomial, otherwise a long one for tail-checked
/// summation.
fn heun_factor(bs: &BoundState) -> Result<HeunSeries, WaveError> {
    let params = HeunParams::from(&bs.reduced);
    let n = bs.n as usize;
    let short = heun::series_coefficients(params, (2 * n + 4).max(8))
        .map_err(|source| WaveError::EvalError { x: 0.0, source })?;
    if short.truncated_at().is_some_and(|t| t <= n) {
        return Ok(short);
    }
    heun::series_coefficients(params, 768)
        .map_err(|source| WaveError::EvalError { x: 0.0, source })
}

/// Samples `psi` at the given positive abscissas (used by the oracle to
/// compare against finite-difference eigenvectors on its own grid).
pub fn sample_psi(bs: &BoundState, xs: &[f64]) -> Result<Vec<f64>, WaveError> {
    let series = heun_factor(bs)?;
    let red = &bs.reduced;
    let sqrt_freq = red.freq.sqrt();
    xs.iter()
        .map(|&x| {
            let r = sqrt_freq * x;
            let h = series
                .evaluate(r, 1e-10)
                .map_err(|source| WaveError::EvalError { x, source })?;
            Ok(r.powf(red.exponent) * (-0.5 * (red.b_heun * r + r * r)).exp() * h)
        })
        .collect()
}

/// Assembles the (unnormalized) wave table on a uniform grid over
/// `(0, x_max]`. The snapshot inside `bs` fully determines the profile.
pub fn assemble(bs: &BoundState, x_max: f64, samples: usize) -> Result<WaveTable, WaveError> {
    if samples < 16 {
        return Err(WaveError::TooFewSamples(samples));
    }
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(WaveError::InvalidXMax(x_max));
    }
    let dx = x_max / samples as f64;
    let xs: Vec<f64> = (1..=samples).map(|i| dx * i as f64).collect();
    let psi = sample_psi(bs, &xs)?;
    let norm = l2_norm(&psi, dx);
    let nodes = count_sign_changes(&psi);
    Ok(WaveTable { xs, psi, norm, nodes, x_max, bound_state: *bs })
}

/// Assembles with the default extent and sample count.
pub fn assemble_default(bs: &BoundState) -> Result<WaveTable, WaveError> {
    assemble(bs, default_x_max(&bs.reduced), DEFAULT_SAMPLES)
}

/// Rescales so that the composite-Simpson integral of `psi^2` over
/// `[0, x_max]` is one. Idempotent and scale-invariant.
pub fn normalize(mut table: WaveTable) -> Result<WaveTable, WaveError> {
    let dx = table.x_max / table.psi.len() as f64;
    let norm = l2_norm(&table.psi, dx);
    if !norm.is_finite() || norm <= 1e-300 {
        return Err(WaveError::ZeroNorm);
    }
    for v in &mut table.psi {
        *v /= norm;
    }
    table.norm = norm;
    Ok(table)
}

/// Number of strict sign changes of the sampled wave function, ignoring
/// values below `1e-12` of the peak magnitude.
pub fn count_nodes(table: &WaveTable) -> usize {
    count_sign_changes(&table.psi)
}

fn count_sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let floor = NODE_TOL * peak;
    let mut changes = 0;
    let mut sign = 0i8;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if sign != 0 && s != sign {
            changes += 1;
        }
        sign = s;
    }
    changes
}

/// sqrt of the composite-Simpson integral of `f^2` over `[0, x_max]` where
/// `values` holds `f` at `dx, 2dx, ..`, and `f(0) = 0` implicitly. An odd
/// interval count is handled with a 3/8 closing rule.
fn l2_norm(values: &[f64], dx: f64) -> f64 {
    let mut nodes = Vec::with_capacity(values.len() + 1);
    nodes.push(0.0);
    nodes.extend(values.iter().map(|v| v * v));
    simpson(&nodes, dx).max(0.0).sqrt()
}

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1; // number of intervals
    assert!(n >= 4);
    let (even_end, mut total) = if n % 2 == 0 {
        (n, 0.0)
    } else {
        // 3/8 rule on the last three intervals
        let tail = 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
        (n - 3, tail)
    };
    let mut acc = f[0] + f[even_end];
    let mut i = 1;
    while i < even_end {
        acc += 4.0 * f[i];
        if i + 1 < even_end {
            acc += 2.0 * f[i + 1];
        }
        i += 2;
    }
    total += h / 3.0 * acc;
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{
        CornellPotential, LinearPotential, ParamSelector, ParticleParams, PdmParams,
        QuantumNumbers, Scenario, SpacetimeParams,
    };
    use crate::spectrum::{solve_energy, solve_joint, SolveConfig};
    use statrs::function::gamma::gamma;

    fn cornell(alpha: f64, m: f64, om: f64, a: f64, b: f64, l: f64, k: f64, n: u32) -> Scenario {
        Scenario::cornell(
            SpacetimeParams::new(alpha).unwrap(),
            ParticleParams::new(m, om).unwrap(),
            CornellPotential::new(a, b).unwrap(),
            QuantumNumbers::new(n, l, k).unwrap(),
        )
        .unwrap()
    }

    fn pdm(alpha: f64, m0: f64, om: f64, xi: f64, kc: f64, l: f64, k: f64, n: u32) -> Scenario {
        Scenario::pdm_linear(
            SpacetimeParams::new(alpha).unwrap(),
            ParticleParams::new(m0, om).unwrap(),
            LinearPotential::new(xi).unwrap(),
            PdmParams::new(kc).unwrap(),
            QuantumNumbers::new(n, l, k).unwrap(),
        )
        .unwrap()
    }

    fn ground_state() -> crate::spectrum::BoundState {
        let sc = cornell(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0);
        let cfg = SolveConfig::for_scenario(&sc);
        solve_energy(&sc, &cfg).unwrap().pop().unwrap()
    }

    #[test]
    fn gaussian_peak_at_closed_form_position() {
        // n = 0, l = 0: psi = (sqrt(w) x)^eta exp(-w x^2 / 2), peak at
        // x* = sqrt(eta / w).
        let bs = ground_state();
        let table = assemble_default(&bs).unwrap();
        let red = &bs.reduced;
        let x_star = (red.exponent / red.freq).sqrt();
        let peak_idx = table
            .psi()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        let dx = table.x_max() / table.psi().len() as f64;
        assert!((table.xs()[peak_idx] - x_star).abs() <= dx);
    }

    #[test]
    fn vanishes_toward_origin_and_boundary() {
        let bs = ground_state();
        let table = assemble_default(&bs).unwrap();
        let peak = table.psi().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        // power-law prefactor: decreasing toward the origin
        assert!(table.psi()[0].abs() < 0.02 * peak);
        assert!(table.psi()[0].abs() < table.psi()[1].abs());
        assert!(table.psi()[1].abs() < table.psi()[2].abs());
        assert!(table.psi().last().unwrap().abs() <= 1e-6 * peak);
        assert!(table.psi().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn norm_matches_gamma_integral() {
        // integral of (w x^2)^eta exp(-w x^2) dx over the half line is
        // Gamma(eta + 1/2) / (2 sqrt(w)).
        let bs = ground_state();
        let table = assemble_default(&bs).unwrap();
        let red = &bs.reduced;
        let analytic = (gamma(red.exponent + 0.5) / (2.0 * red.freq.sqrt())).sqrt();
        assert!(
            (table.norm() - analytic).abs() <= 1e-8 * analytic,
            "{} vs {analytic}",
            table.norm()
        );
    }

    #[test]
    fn normalize_is_idempotent_and_scale_invariant() {
        let bs = ground_state();
        let table = assemble_default(&bs).unwrap();
        let normalized = normalize(table.clone()).unwrap();
        let twice = normalize(normalized.clone()).unwrap();
        assert!((twice.norm() - 1.0).abs() < 1e-12);
        for (a, b) in normalized.psi().iter().zip(twice.psi()) {
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }

        let mut scaled = table.clone();
        for v in &mut scaled.psi {
            *v *= 7.0;
        }
        let renorm = normalize(scaled).unwrap();
        for (a, b) in normalized.psi().iter().zip(renorm.psi()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn normalized_integral_is_one() {
        let bs = ground_state();
        let table = normalize(assemble_default(&bs).unwrap()).unwrap();
        let dx = table.x_max() / table.psi().len() as f64;
        let total: f64 = table.psi().iter().map(|v| v * v * dx).sum();
        assert!((total - 1.0).abs() < 1e-4, "trapezoid mass {total}");
    }

    #[test]
    fn jointly_solved_first_level_has_one_node() {
        let sc = pdm(1.0, 1.0, 2.0, 1.0, 0.1, -2.0, 0.0, 1);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_joint(&sc, ParamSelector::OmegaOsc, &cfg, (5.9, 2.0)).unwrap();
        let table = assemble_default(&bs).unwrap();
        assert_eq!(count_nodes(&table), 1);
        assert_eq!(table.nodes(), 1);
    }

    /// The branch whose Heun polynomial has all roots positive carries the
    /// full node count; here the third level.
    #[test]
    fn jointly_solved_third_level_has_three_nodes() {
        let sc = pdm(1.0, 1.0, 3.6, 1.0, 0.1, -6.0, 0.0, 3);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_joint(&sc, ParamSelector::OmegaOsc, &cfg, (10.5, 3.6)).unwrap();
        assert!(bs.residual_coeff.abs() <= 1e-10);
        let table = assemble_default(&bs).unwrap();
        assert_eq!(count_nodes(&table), 3);
    }

    #[test]
    fn super_exponential_decay_beyond_turning_point() {
        let bs = ground_state();
        let table = assemble_default(&bs).unwrap();
        let red = &bs.reduced;
        let x_turn = (red.beta0.abs() / red.freq / red.freq).sqrt();
        let cut = 2.0 * x_turn;
        let reference = table
            .xs()
            .iter()
            .zip(table.psi())
            .find(|(x, _)| **x >= cut)
            .map(|(x, v)| (*x, v.abs()))
            .unwrap();
        let envelope = 2.0 * reference.1 * (red.freq * reference.0 * reference.0 / 4.0).exp();
        for (x, v) in table.xs().iter().zip(table.psi()) {
            if *x < cut {
                continue;
            }
            assert!(
                v.abs() <= envelope * (-red.freq * x * x / 4.0).exp(),
                "decay bound violated at x = {x}"
            );
        }
    }

    #[test]
    fn count_nodes_ignores_subthreshold_noise() {
        let bs = ground_state();
        let mut table = assemble_default(&bs).unwrap();
        // constant-sign table, then add tiny alternating noise
        let peak = table.psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (i, v) in table.psi.iter_mut().enumerate() {
            *v = v.abs().max(1e-16 * peak) * if i % 2 == 0 { 1.0 } else { 1.0 };
        }
        assert_eq!(count_nodes(&table), 0);
        for (i, v) in table.psi.iter_mut().enumerate() {
            if i % 7 == 0 {
                *v = -1e-15 * peak;
            }
        }
        assert_eq!(count_nodes(&table), 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let bs = ground_state();
        assert!(matches!(
            assemble(&bs, 5.0, 3),
            Err(WaveError::TooFewSamples(3))
        ));
        assert!(matches!(
            assemble(&bs, -1.0, 64),
            Err(WaveError::InvalidXMax(_))
        ));
    }

    #[test]
    fn simpson_quadrature_is_exact_for_cubics() {
        // f(x) = x^3 on [0, 1]: both the even and the 3/8-closed branches
        let h = 1.0 / 16.0;
        let nodes: Vec<f64> = (0..=16).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&nodes, h) - 0.25).abs() < 1e-15);
        let h = 1.0 / 15.0;
        let nodes: Vec<f64> = (0..=15).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&nodes, h) - 0.25).abs() < 1e-15);
    }
}
