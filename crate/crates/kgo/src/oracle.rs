//! Independent finite-difference verification of analytic bound states.
//!
//! The radial equation `psi'' - V_E(x) psi = beta0(E) psi` is discretized on
//! a uniform half-line grid with Dirichlet ends; the operator
//! `-D^2 + diag(V_E)` is symmetric tridiagonal and its eigenvalue `lambda_j`
//! must equal `-beta0(E)` at a bound state. The solver never touches the
//! Heun reduction: it discretizes the raw potential from the params module,
//! so agreement with the spectrum module is a genuine cross-check.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a partially pivoted tridiagonal solve; both are exact-index
//! methods, so only the handful of low-lying states ever needed are computed.

use rayon::prelude::*;
use thiserror::Error;

use crate::params::{ParamError, Scenario};
use crate::spectrum::BoundState;
use crate::wavefunction;

/// Number of energy samples used to bracket self-consistent roots.
const ENERGY_SCAN_STEPS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OracleError {
    #[error("grid requires finite 0 < x_min < x_max, got [{x_min}, {x_max}]")]
    InvalidGrid { x_min: f64, x_max: f64 },
    #[error("grid requires at least 100 points, got {0}")]
    TooFewPoints(usize),
    #[error("requested {count} eigenvalues but the grid supports at most points/10 = {max}")]
    TooManyEigenvalues { count: usize, max: usize },
    #[error("potential is non-finite at grid node x = {x}")]
    DiscretizationError { x: f64 },
    #[error("no self-consistent energy found in [{lo}, {hi}]")]
    NoRootFound { lo: f64, hi: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Uniform interior grid on `[x_min, x_max]` with Dirichlet end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 20_000;

    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self, OracleError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min > 0.0 && x_min < x_max) {
            return Err(OracleError::InvalidGrid { x_min, x_max });
        }
        if points < 100 {
            return Err(OracleError::TooFewPoints(points));
        }
        Ok(Self { x_min, x_max, points })
    }

    /// Grid adapted to a reduction snapshot: `x_min = 1e-4/sqrt(freq)` keeps
    /// the inverse-square terms finite, `x_max` matches the wave-function
    /// default extent (with margin) so the Gaussian tail is resolved.
    pub fn default_for(red: &crate::params::ReducedProblem) -> Self {
        let x_min = 1e-4 / red.freq.sqrt();
        let x_max = 1.2 * wavefunction::default_x_max(red);
        Self { x_min, x_max, points: Self::DEFAULT_POINTS }
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points + 1) as f64
    }

    /// Interior nodes (end points carry the Dirichlet condition).
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.points).map(|i| self.x_min + h * i as f64).collect()
    }
}

/// Agreement report between one finite-difference eigenpair and an analytic
/// bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub energy: f64,
    /// Index (= node count) of the matched eigenvalue.
    pub eig_index: usize,
    /// `|lambda_j + beta0(E)|`: the eigenvalue equation is
    /// `lambda_j = -beta0` once the sign convention of the radial equation
    /// is unfolded.
    pub mismatch: f64,
    /// Normalized inner product with the analytic wave function; NaN when the
    /// analytic series cannot be evaluated on the grid.
    pub overlap: f64,
    pub grid: GridSpec,
}

impl OracleResult {
    /// Mismatch relative to the magnitude of `beta0`.
    pub fn relative_mismatch(&self, beta0: f64) -> f64 {
        self.mismatch / beta0.abs().max(f64::MIN_POSITIVE)
    }
}

/// Lowest `count` eigenvalues (ascending) of `-D^2 + diag(V)` on the grid.
pub fn fd_eigs<F>(potential: F, grid: &GridSpec, count: usize) -> Result<Vec<f64>, OracleError>
where
    F: Fn(f64) -> f64,
{
    GridSpec::new(grid.x_min, grid.x_max, grid.points)?;
    let max = grid.points / 10;
    if count > max {
        return Err(OracleError::TooManyEigenvalues { count, max });
    }
    let (diag, off) = discretize(&potential, grid)?;
    Ok(lowest_eigenvalues(&diag, off, count))
}

fn discretize<F>(potential: &F, grid: &GridSpec) -> Result<(Vec<f64>, f64), OracleError>
where
    F: Fn(f64) -> f64,
{
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(grid.points);
    for x in grid.nodes() {
        let v = potential(x);
        if !v.is_finite() {
            return Err(OracleError::DiscretizationError { x });
        }
        diag.push(2.0 * inv_h2 + v);
    }
    Ok((diag, -inv_h2))
}

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x`, via the Sturm sequence of the shifted LDL^T factorization. The
/// off-diagonal is constant, so only its square enters.
fn sturm_count(diag: &[f64], off_sq: f64, x: f64) -> usize {
    let pivmin = (off_sq * f64::MIN_POSITIVE / f64::EPSILON).max(1e-300);
    let mut count = 0;
    let mut q = diag[0] - x;
    // a pivot at exactly zero counts as negative and is clamped before the
    // next division, matching the LAPACK bisection convention
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q <= 0.0 {
        count += 1;
    }
    for &d in &diag[1..] {
        q = d - x - off_sq / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q <= 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(diag: &[f64], off: f64) -> (f64, f64) {
    let radius = 2.0 * off.abs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &d in diag {
        lo = lo.min(d - radius);
        hi = hi.max(d + radius);
    }
    (lo, hi)
}

/// Eigenvalue of index `j` (0-based, ascending) by bisection on the Sturm
/// count.
fn eigenvalue_by_index(diag: &[f64], off: f64, j: usize, mut lo: f64, mut hi: f64) -> f64 {
    let off_sq = off * off;
    let scale = lo.abs().max(hi.abs()).max(1.0);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(diag, off_sq, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn lowest_eigenvalues(diag: &[f64], off: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = gershgorin_bounds(diag, off);
    (0..count)
        .map(|j| eigenvalue_by_index(diag, off, j, lo, hi))
        .collect()
}

/// Inverse iteration for the eigenvector of an isolated eigenvalue. The 1-D
/// Dirichlet spectrum is simple, so a few iterations from a fixed
/// deterministic start converge; the factorization is reused across them.
fn eigenvector(diag: &[f64], off: f64, lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let shift = lambda * (1.0 + 8.0 * f64::EPSILON) + 1e-300;
    let factored = PivotedTridiag::factor(diag, off, shift);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (0.7 * i as f64).sin()).collect();
    normalize_vec(&mut v);
    for _ in 0..3 {
        let mut w = factored.solve(&v);
        normalize_vec(&mut w);
        v = w;
    }
    v
}

fn normalize_vec(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// LU factorization of `T - shift I` (tridiagonal, constant off-diagonal)
/// with partial pivoting; row swaps introduce a second superdiagonal.
struct PivotedTridiag {
    /// Multipliers of the elimination step.
    mult: Vec<f64>,
    diag: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiag {
    fn factor(matrix_diag: &[f64], off: f64, shift: f64) -> Self {
        let n = matrix_diag.len();
        let mut diag: Vec<f64> = matrix_diag.iter().map(|d| d - shift).collect();
        let mut upper1 = vec![0.0; n];
        let mut upper2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        for v in upper1.iter_mut().take(n - 1) {
            *v = off;
        }
        for i in 0..n - 1 {
            let sub = off; // entry (i+1, i) before elimination
            if diag[i].abs() >= sub.abs() {
                let pivot = guard_pivot(diag[i]);
                let m = sub / pivot;
                mult[i] = m;
                diag[i + 1] -= m * upper1[i];
                // upper2[i] stays zero
            } else {
                // interchange rows i and i+1
                let m = diag[i] / sub;
                mult[i] = m;
                swapped[i] = true;
                diag[i] = sub;
                let old_next_diag = diag[i + 1];
                diag[i + 1] = upper1[i] - m * old_next_diag;
                upper2[i] = upper1[i + 1];
                upper1[i] = old_next_diag;
                upper1[i + 1] = -m * upper2[i];
            }
        }
        Self { mult, diag, upper1, upper2, swapped }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut r = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                r.swap(i, i + 1);
            }
            let correction = self.mult[i] * r[i];
            r[i + 1] -= correction;
        }
        let mut w = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = r[i];
            if i + 1 < n {
                acc -= self.upper1[i] * w[i + 1];
            }
            if i + 2 < n {
                acc -= self.upper2[i] * w[i + 2];
            }
            w[i] = acc / guard_pivot(self.diag[i]);
        }
        w
    }
}

fn guard_pivot(p: f64) -> f64 {
    if p.abs() < 1e-300 {
        if p < 0.0 {
            -1e-300
        } else {
            1e-300
        }
    } else {
        p
    }
}

/// Overlap between a finite-difference eigenvector and the analytic wave
/// function sampled on the same nodes; NaN when the analytic Heun factor
/// cannot be summed on this grid.
fn analytic_overlap(bs: &BoundState, nodes: &[f64], eigvec: &[f64]) -> f64 {
    let Ok(psi) = wavefunction::sample_psi(bs, nodes) else {
        return f64::NAN;
    };
    let dot: f64 = psi.iter().zip(eigvec).map(|(a, b)| a * b).sum();
    let n_psi: f64 = psi.iter().map(|a| a * a).sum::<f64>().sqrt();
    let n_vec: f64 = eigvec.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n_psi == 0.0 || n_vec == 0.0 {
        return f64::NAN;
    }
    (dot / (n_psi * n_vec)).abs()
}

/// Self-consistently solves `lambda_j(-D^2 + V_E) = -beta0(E)` for indices
/// `j` in a window around `n`, scanning the energy range and bisecting each
/// sign change. Returns one result per root found, ordered by energy, with
/// the eigenfunction overlap against the analytic wave function at that
/// energy.
pub fn self_consistent_energy(
    sc: &Scenario,
    n: u32,
    e_range: (f64, f64),
    grid: &GridSpec,
) -> Result<Vec<OracleResult>, OracleError> {
    GridSpec::new(grid.x_min, grid.x_max, grid.points)?;
    let (lo, hi) = e_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(OracleError::NoRootFound { lo, hi });
    }
    let j_lo = (n as usize).saturating_sub(1);
    let j_hi = n as usize + 1;
    let count = j_hi + 1;
    let max = grid.points / 10;
    if count > max {
        return Err(OracleError::TooManyEigenvalues { count, max });
    }

    // g_j(E) = lambda_j(E) + beta0(E); roots are self-consistent energies.
    let sample = |e: f64| -> Option<Vec<f64>> {
        let potential = |x: f64| sc.effective_potential(e, x).unwrap_or(f64::NAN);
        let (diag, off) = discretize(&potential, grid).ok()?;
        let beta0 = sc.beta0(e);
        Some(
            lowest_eigenvalues(&diag, off, count)
                .into_iter()
                .map(|lambda| lambda + beta0)
                .collect(),
        )
    };

    let energies: Vec<f64> = (0..=ENERGY_SCAN_STEPS)
        .map(|i| lo + (hi - lo) * i as f64 / ENERGY_SCAN_STEPS as f64)
        .collect();
    let samples: Vec<Option<Vec<f64>>> =
        energies.par_iter().map(|&e| sample(e)).collect();

    let mut results = Vec::new();
    for j in j_lo..=j_hi {
        for i in 0..ENERGY_SCAN_STEPS {
            let (Some(ga), Some(gb)) = (&samples[i], &samples[i + 1]) else {
                continue;
            };
            let (mut ea, mut eb, mut fa) = (energies[i], energies[i + 1], ga[j]);
            if fa * gb[j] >= 0.0 && fa != 0.0 {
                continue;
            }
            for _ in 0..64 {
                let mid = 0.5 * (ea + eb);
                if mid == ea || mid == eb {
                    break;
                }
                let Some(gm) = sample(mid) else { break };
                if fa * gm[j] <= 0.0 {
                    eb = mid;
                } else {
                    ea = mid;
                    fa = gm[j];
                }
            }
            let e_root = 0.5 * (ea + eb);
            if let Some(result) = evaluate_at(sc, n, e_root, j, grid, count) {
                results.push(result);
            }
        }
    }
    results.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    results.dedup_by(|a, b| a.eig_index == b.eig_index && (a.energy - b.energy).abs() < 1e-9);
    if results.is_empty() {
        return Err(OracleError::NoRootFound { lo, hi });
    }
    Ok(results)
}

fn evaluate_at(
    sc: &Scenario,
    n: u32,
    energy: f64,
    j: usize,
    grid: &GridSpec,
    count: usize,
) -> Option<OracleResult> {
    let potential = |x: f64| sc.effective_potential(energy, x).unwrap_or(f64::NAN);
    let (diag, off) = discretize(&potential, grid).ok()?;
    let eigs = lowest_eigenvalues(&diag, off, count);
    let beta0 = sc.beta0(energy);
    let mismatch = (eigs[j] + beta0).abs();
    let vec = eigenvector(&diag, off, eigs[j]);
    let red = sc.reduce(energy).ok()?;
    let pseudo = BoundState {
        energy,
        free_param: None,
        n,
        residual_energy: red.freq * (red.c_heun - red.a_heun - 2.0 - 2.0 * n as f64),
        residual_coeff: crate::spectrum::coefficient_residual(&red, n).ok()?,
        reduced: red,
    };
    let overlap = analytic_overlap(&pseudo, &grid.nodes(), &vec);
    Some(OracleResult { energy, eig_index: j, mismatch, overlap, grid: *grid })
}

/// Evaluates the finite-difference spectrum at a solved bound state's energy
/// and reports how well the nearest eigenvalue and its eigenvector agree with
/// the analytic solution. Poor agreement is reported, never raised.
pub fn verify(bs: &BoundState, sc: &Scenario, grid: &GridSpec) -> Result<OracleResult, OracleError> {
    GridSpec::new(grid.x_min, grid.x_max, grid.points)?;
    let sc = match bs.free_param {
        Some((selector, value)) => sc.with_param(selector, value)?,
        None => *sc,
    };
    let count = (bs.n as usize + 4).min(grid.points / 10).max(1);
    let potential = |x: f64| sc.effective_potential(bs.energy, x).unwrap_or(f64::NAN);
    let (diag, off) = discretize(&potential, grid)?;
    let eigs = lowest_eigenvalues(&diag, off, count);
    let target = -bs.reduced.beta0;
    let (j, lambda) = eigs
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .expect("count >= 1");
    let vec = eigenvector(&diag, off, lambda);
    let overlap = analytic_overlap(bs, &grid.nodes(), &vec);
    Ok(OracleResult {
        energy: bs.energy,
        eig_index: j,
        mismatch: (lambda - target).abs(),
        overlap,
        grid: *grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{
        CornellPotential, LinearPotential, ParamSelector, ParticleParams, PdmParams,
        QuantumNumbers, SpacetimeParams,
    };
    use crate::spectrum::{solve_energy, solve_joint, SolveConfig};

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

    #[test]
    fn half_line_oscillator_levels() {
        // Dirichlet at the origin keeps the odd full-line states: 3, 7, 11.
        let grid = GridSpec::new(1e-4, 12.0, 4000).unwrap();
        let eigs = fd_eigs(|x| x * x, &grid, 3).unwrap();
        for (lambda, expected) in eigs.iter().zip([3.0, 7.0, 11.0]) {
            assert!(
                (lambda - expected).abs() < 1e-3,
                "{lambda} vs {expected}"
            );
        }
        assert!(eigs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn particle_in_a_box() {
        let grid = GridSpec::new(1e-6, 1.0, 4000).unwrap();
        let eigs = fd_eigs(|_| 0.0, &grid, 1).unwrap();
        let expected = std::f64::consts::PI.powi(2);
        assert!((eigs[0] - expected).abs() < 1e-2 * expected);
    }

    #[test]
    fn constant_shift_moves_spectrum_exactly() {
        let grid = GridSpec::new(1e-4, 12.0, 2000).unwrap();
        let base = fd_eigs(|x| x * x, &grid, 3).unwrap();
        let shifted = fd_eigs(|x| x * x + 5.0, &grid, 3).unwrap();
        for (a, b) in base.iter().zip(&shifted) {
            assert!((b - a - 5.0).abs() < 1e-8);
        }
    }

    #[test]
    fn second_order_richardson_convergence() {
        // x_min much smaller than the h^2 error: a Dirichlet wall at x_min
        // shifts the eigenvalue by |psi'(0)|^2 x_min, which would otherwise
        // mask the convergence order. Interval counts double exactly.
        let exact = 3.0;
        let mut errors = Vec::new();
        for points in [2499usize, 4999, 9999] {
            let grid = GridSpec::new(1e-8, 12.0, points).unwrap();
            let eigs = fd_eigs(|x| x * x, &grid, 1).unwrap();
            errors.push((eigs[0] - exact).abs());
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "Richardson ratio {ratio} out of range ({errors:?})"
            );
        }
    }

    #[test]
    fn rejects_bad_grids_and_counts() {
        assert!(matches!(
            GridSpec::new(0.0, 1.0, 1000),
            Err(OracleError::InvalidGrid { .. })
        ));
        assert!(matches!(
            GridSpec::new(1e-4, 1.0, 50),
            Err(OracleError::TooFewPoints(50))
        ));
        let grid = GridSpec::new(1e-4, 10.0, 200).unwrap();
        assert!(matches!(
            fd_eigs(|x| x, &grid, 40),
            Err(OracleError::TooManyEigenvalues { .. })
        ));
        assert!(matches!(
            fd_eigs(|x| (x - 5.0).ln(), &grid, 1),
            Err(OracleError::DiscretizationError { .. })
        ));
    }

    #[test]
    fn self_consistent_flat_cornell_ground_state() {
        let sc = cornell(0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0);
        let red = sc.reduce(5.0_f64.sqrt()).unwrap();
        let grid = GridSpec { points: 4000, ..GridSpec::default_for(&red) };
        let results = self_consistent_energy(&sc, 0, (0.5, 4.0), &grid).unwrap();
        let expected = 5.0_f64.sqrt();
        let hit = results
            .iter()
            .find(|r| (r.energy - expected).abs() / expected < 1e-3)
            .expect("closed-form root reproduced");
        assert_eq!(hit.eig_index, 0);
        assert!(hit.overlap > 0.999);
    }

    #[test]
    fn self_consistent_worked_root() {
        let sc = cornell(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0);
        let expected = ((13.0 + 189.0_f64.sqrt()) / 2.0).sqrt();
        let red = sc.reduce(expected).unwrap();
        let grid = GridSpec { points: 4000, ..GridSpec::default_for(&red) };
        let results = self_consistent_energy(&sc, 0, (2.0, 6.0), &grid).unwrap();
        assert!(results
            .iter()
            .any(|r| (r.energy - expected).abs() / expected < 1e-3));
    }

    #[test]
    fn self_consistent_flat_pdm_index_one() {
        // j = 1 of the kc = 0 linear coupling sits at E = 3 (n = 2 in the
        // closed form E^2 = 1 + (2n + 4)).
        let sc = pdm(0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 2);
        let red = sc.reduce(3.0).unwrap();
        let grid = GridSpec { points: 4000, ..GridSpec::default_for(&red) };
        let results = self_consistent_energy(&sc, 2, (2.0, 4.0), &grid).unwrap();
        let hit = results
            .iter()
            .find(|r| (r.energy - 3.0).abs() < 3e-3)
            .expect("E = 3 reproduced");
        assert_eq!(hit.eig_index, 1);
        assert!(hit.overlap > 0.999);
    }

    #[test]
    fn verify_confirms_ground_state_and_detects_detuning() {
        let sc = cornell(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_energy(&sc, &cfg).unwrap().pop().unwrap();
        let grid = GridSpec { points: 4000, ..GridSpec::default_for(&bs.reduced) };
        let good = verify(&bs, &sc, &grid).unwrap();
        assert!(good.relative_mismatch(bs.reduced.beta0) < 1e-3);
        assert!(good.overlap > 0.999);

        let mut detuned = bs;
        detuned.energy += 0.1;
        detuned.reduced = sc.reduce(detuned.energy).unwrap();
        let bad = verify(&detuned, &sc, &grid).unwrap();
        assert!(
            bad.mismatch > 100.0 * good.mismatch,
            "detuning not detected: {} vs {}",
            bad.mismatch,
            good.mismatch
        );
    }

    #[test]
    fn verify_reports_non_truncating_state_without_asserting() {
        // First-condition-only root with kc > 0: residual_coeff != 0 and the
        // analytic factor is an infinite series; the call still reports.
        let sc = pdm(0.0, 1.0, 1.0, 1.0, 0.5, 0.0, 0.0, 0);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_energy(&sc, &cfg).unwrap().pop().unwrap();
        assert!(bs.residual_coeff.abs() > 1e-6);
        let grid = GridSpec { points: 2000, ..GridSpec::default_for(&bs.reduced) };
        let report = verify(&bs, &sc, &grid).unwrap();
        assert!(report.mismatch.is_finite());
    }

    #[test]
    fn verify_uses_adjusted_parameter_from_joint_solve() {
        let sc = pdm(1.0, 1.0, 2.0, 1.0, 0.1, -2.0, 0.0, 1);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_joint(&sc, ParamSelector::OmegaOsc, &cfg, (5.9, 2.0)).unwrap();
        let grid = GridSpec { points: 6000, ..GridSpec::default_for(&bs.reduced) };
        let report = verify(&bs, &sc, &grid).unwrap();
        assert!(report.relative_mismatch(bs.reduced.beta0) < 1e-3);
        assert!(report.overlap > 0.999);
        assert_eq!(report.eig_index, 1);
    }

    /// Positive-slope joint branch (l > 0 forces the oscillator frequency
    /// far up); the resulting nodeless state is the discrete ground state.
    #[test]
    fn verify_confirms_positive_slope_joint_state() {
        let sc = pdm(1.0, 1.0, 45.0, 1.0, 0.1, 1.0, 0.0, 1);
        let cfg = SolveConfig::for_scenario(&sc);
        let bs = solve_joint(&sc, ParamSelector::OmegaOsc, &cfg, (17.9, 50.0)).unwrap();
        assert!(bs.residual_energy.abs() / bs.reduced.freq <= 1e-10);
        assert!(bs.residual_coeff.abs() <= 1e-10);
        let grid = GridSpec { points: 8000, ..GridSpec::default_for(&bs.reduced) };
        let report = verify(&bs, &sc, &grid).unwrap();
        assert!(report.relative_mismatch(bs.reduced.beta0) < 1e-3);
        assert!(report.overlap > 0.999);
        assert_eq!(report.eig_index, 0);
    }
}
