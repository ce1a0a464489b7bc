//! Quantization conditions and energy solvers.
//!
//! A bound state of degree `n` satisfies two conditions: the degree condition
//! `c - a - 2 = 2n` on the reduced problem (an implicit equation for the
//! energy) and the vanishing of the Frobenius coefficient `A_{n+1}`.
//!
//! [`solve_energy`] enforces the first condition only — that is what the
//! closed-form spectra print — and reports the second as a diagnostic.
//! [`solve_joint`] enforces both, using one user-selected physical parameter
//! as the extra unknown; by default the oscillator frequency is the natural
//! choice, mirroring how quasi-exactly-solvable spectra quantize the
//! frequency per level.

use rayon::prelude::*;
use thiserror::Error;

use crate::heun::{self, HeunError, HeunParams};
use crate::params::{
    LinearPotential, ParamError, ParamSelector, ParticleParams, PdmParams, QuantumNumbers,
    ReducedProblem, Scenario,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Heun(#[from] HeunError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("no energy root found in [{e_min}, {e_max}]")]
    NoRootFound { e_min: f64, e_max: f64 },
    #[error("joint solve did not converge after {iterations} iterations: best residuals (energy {best_energy_residual:.3e}, coefficient {best_coeff_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        best_energy_residual: f64,
        best_coeff_residual: f64,
    },
    #[error("closed-form energy discriminant is negative: {0}")]
    NegativeDiscriminant(f64),
}

/// Root-search bracket and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub grid_points: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl SolveConfig {
    /// Generous default bracket covering the low-lying levels:
    /// `|E| <= 10 (m + m Omega (coeffs + 1) + |l| + |k| + 1)`.
    pub fn for_scenario(sc: &Scenario) -> Self {
        let p = sc.particle();
        let qn = sc.quantum_numbers();
        let coeff_sum = match sc {
            Scenario::Cornell { potential, .. } => {
                potential.a_lin().abs() + potential.b_coul().abs()
            }
            Scenario::PdmLinear { potential, .. } => potential.xi(),
        };
        let bound = 10.0
            * (p.mass()
                + p.mass() * p.omega_osc() * (coeff_sum + 1.0)
                + qn.l().abs()
                + qn.k().abs()
                + 1.0);
        Self {
            e_min: -bound,
            e_max: bound,
            grid_points: 2000,
            tol: 1e-12,
            max_iter: 200,
        }
    }

    pub fn with_bracket(mut self, e_min: f64, e_max: f64) -> Self {
        self.e_min = e_min;
        self.e_max = e_max;
        self
    }

    fn validate(&self) -> Result<(), SpectrumError> {
        if !(self.e_min.is_finite() && self.e_max.is_finite() && self.e_min < self.e_max) {
            return Err(SpectrumError::InvalidConfig(format!(
                "bracket [{}, {}] must be finite with e_min < e_max",
                self.e_min, self.e_max
            )));
        }
        if self.grid_points < 100 {
            return Err(SpectrumError::InvalidConfig(format!(
                "grid_points must be at least 100, got {}",
                self.grid_points
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(SpectrumError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(SpectrumError::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// One solved level: the energy root, both condition residuals and the
/// reduction snapshot the wave function is assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    /// Set when [`solve_joint`] adjusted a parameter to satisfy the
    /// coefficient condition.
    pub free_param: Option<(ParamSelector, f64)>,
    pub n: u32,
    /// Degree-condition residual `freq * (c - a - 2 - 2n)` at `energy`.
    pub residual_energy: f64,
    /// Coefficient-condition residual `A_{n+1}` scaled by the largest
    /// polynomial coefficient `max_{j<=n} |A_j|`.
    pub residual_coeff: f64,
    pub reduced: ReducedProblem,
}

/// Signed residual of the degree condition; bound-state energies are zeros.
pub fn energy_residual(sc: &Scenario, energy: f64) -> Result<f64, ParamError> {
    let red = sc.reduce(energy)?;
    let n = sc.level() as f64;
    Ok(red.freq * (red.c_heun - red.a_heun - 2.0 - 2.0 * n))
}

/// Scaled coefficient-condition residual `A_{n+1} / max_{j<=n} |A_j|`.
pub fn coefficient_residual(red: &ReducedProblem, n: u32) -> Result<f64, HeunError> {
    let series = heun::series_coefficients(HeunParams::from(red), n as usize + 2)?;
    let scale = series.coeffs()[..=n as usize]
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.abs()))
        .max(f64::MIN_POSITIVE);
    Ok(series.coeffs()[n as usize + 1] / scale)
}

fn bound_state_at(
    sc: &Scenario,
    energy: f64,
    free_param: Option<(ParamSelector, f64)>,
) -> Result<BoundState, SpectrumError> {
    let red = sc.reduce(energy)?;
    let n = sc.level();
    let residual_energy = red.freq * (red.c_heun - red.a_heun - 2.0 - 2.0 * n as f64);
    let residual_coeff = coefficient_residual(&red, n)?;
    Ok(BoundState {
        energy,
        free_param,
        n,
        residual_energy,
        residual_coeff,
        reduced: red,
    })
}

/// Bisection on a bracket with a confirmed sign change. Stops once the
/// interval is below `tol` and the residual is small, or at the ULP floor.
fn bisect_root<F>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, cfg: &SolveConfig) -> Option<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let mut best = (lo, f_lo.abs());
    for _ in 0..cfg.max_iter.max(120) {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid.abs() < best.1 {
            best = (mid, f_mid.abs());
        }
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if hi - lo <= cfg.tol && f_mid.abs() <= 2.0 * cfg.tol {
            break;
        }
    }
    Some(best.0)
}

/// Finds every zero of the degree-condition residual inside the bracket.
///
/// The residual is sampled on a uniform grid, each sign change is refined by
/// bisection (safe across the `ω(E)` kink at `E = 0` when the coupling
/// vanishes), and both energy signs are reported. Grid points where the
/// reduction fails (e.g. `ZeroFrequency` at `E = 0`) break brackets but do
/// not abort the search.
pub fn solve_energy(sc: &Scenario, cfg: &SolveConfig) -> Result<Vec<BoundState>, SpectrumError> {
    cfg.validate()?;
    let f = |e: f64| energy_residual(sc, e).ok();
    let step = (cfg.e_max - cfg.e_min) / cfg.grid_points as f64;

    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=cfg.grid_points {
        let e = cfg.e_min + step * i as f64;
        let Some(v) = f(e) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            roots.push(e);
            prev = Some((e, v));
            continue;
        }
        if let Some((pe, pv)) = prev {
            if pv * v < 0.0 {
                if let Some(root) = bisect_root(&f, pe, e, pv, cfg) {
                    roots.push(root);
                }
            }
        }
        prev = Some((e, v));
    }

    roots.dedup_by(|a, b| (*a - *b).abs() <= cfg.tol.max(1e-14 * a.abs()));
    let states = roots
        .into_iter()
        .map(|e| bound_state_at(sc, e, None))
        .collect::<Result<Vec<_>, _>>()?;
    if states.is_empty() {
        return Err(SpectrumError::NoRootFound { e_min: cfg.e_min, e_max: cfg.e_max });
    }
    Ok(states)
}

/// Scaled residual pair of the joint system: the degree condition divided by
/// `freq` and the scaled coefficient residual. Both are dimensionless and of
/// comparable magnitude near a solution.
fn joint_residuals(
    sc: &Scenario,
    free: ParamSelector,
    e: f64,
    p: f64,
) -> Result<(f64, f64), SpectrumError> {
    let sc2 = sc.with_param(free, p)?;
    let red = sc2.reduce(e)?;
    let n = sc.level();
    let f1 = red.c_heun - red.a_heun - 2.0 - 2.0 * n as f64;
    let f2 = coefficient_residual(&red, n)?;
    Ok((f1, f2))
}

enum NewtonOutcome {
    Converged(f64, f64),
    SingularJacobian,
    Stalled { best: (f64, f64) },
}

fn newton_iterate(
    sc: &Scenario,
    free: ParamSelector,
    cfg: &SolveConfig,
    mut e: f64,
    mut p: f64,
) -> NewtonOutcome {
    let eval = |e: f64, p: f64| joint_residuals(sc, free, e, p).ok();
    let Some(mut cur) = eval(e, p) else {
        return NewtonOutcome::Stalled { best: (f64::INFINITY, f64::INFINITY) };
    };
    let mut best = (cur.0.abs(), cur.1.abs());

    for _ in 0..cfg.max_iter {
        let norm = cur.0.abs().max(cur.1.abs());
        if cur.0.abs().max(cur.1.abs()) <= cfg.tol {
            return NewtonOutcome::Converged(e, p);
        }
        if cur.0.abs().max(cur.1.abs()) < best.0.max(best.1) {
            best = (cur.0.abs(), cur.1.abs());
        }

        let he = 1e-6 * (1.0 + e.abs());
        let hp = 1e-6 * (1.0 + p.abs());
        let de = match one_sided(&eval, e, p, he, true, cur) {
            Some(d) => d,
            None => return NewtonOutcome::Stalled { best },
        };
        let dp = match one_sided(&eval, e, p, hp, false, cur) {
            Some(d) => d,
            None => return NewtonOutcome::Stalled { best },
        };
        let det = de.0 * dp.1 - dp.0 * de.1;
        if !det.is_finite() || det.abs() <= 1e-14 * (de.0.abs() * dp.1.abs() + dp.0.abs() * de.1.abs()).max(f64::MIN_POSITIVE) {
            return NewtonOutcome::SingularJacobian;
        }
        let step_e = (cur.0 * dp.1 - cur.1 * dp.0) / det;
        let step_p = (de.0 * cur.1 - de.1 * cur.0) / det;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..16 {
            let (et, pt) = (e - lambda * step_e, p - lambda * step_p);
            if let Some(next) = eval(et, pt) {
                if next.0.abs().max(next.1.abs()) < norm {
                    e = et;
                    p = pt;
                    cur = next;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return NewtonOutcome::Stalled { best };
        }
    }
    if cur.0.abs().max(cur.1.abs()) <= cfg.tol {
        NewtonOutcome::Converged(e, p)
    } else {
        NewtonOutcome::Stalled { best }
    }
}

/// One-sided finite-difference column of the Jacobian; tries the forward
/// point first and falls back to the backward one near domain boundaries.
fn one_sided(
    eval: &impl Fn(f64, f64) -> Option<(f64, f64)>,
    e: f64,
    p: f64,
    h: f64,
    in_e: bool,
    cur: (f64, f64),
) -> Option<(f64, f64)> {
    let shift = |s: f64| if in_e { (e + s, p) } else { (e, p + s) };
    let (ef, pf) = shift(h);
    if let Some(fwd) = eval(ef, pf) {
        return Some(((fwd.0 - cur.0) / h, (fwd.1 - cur.1) / h));
    }
    let (eb, pb) = shift(-h);
    let bwd = eval(eb, pb)?;
    Some(((cur.0 - bwd.0) / h, (cur.1 - bwd.1) / h))
}

/// Nested-scan fallback: walk the free parameter over a grid around the
/// guess, follow the energy-root branch nearest the previous point, and
/// bisect the parameter where the coefficient residual changes sign.
fn scan_fallback(
    sc: &Scenario,
    free: ParamSelector,
    cfg: &SolveConfig,
    guess: (f64, f64),
) -> Option<(f64, f64)> {
    const GRID: usize = 160;
    let (e0, p0) = guess;
    let span = 4.0 * (1.0 + p0.abs());

    let root_near = |p: f64, e_ref: f64| -> Option<(f64, f64)> {
        let sc2 = sc.with_param(free, p).ok()?;
        let states = solve_energy(&sc2, cfg).ok()?;
        states
            .iter()
            .min_by(|a, b| {
                (a.energy - e_ref).abs().total_cmp(&(b.energy - e_ref).abs())
            })
            .map(|bs| (bs.energy, bs.residual_coeff))
    };

    let mut samples: Vec<Option<(f64, f64, f64)>> = Vec::with_capacity(GRID + 1);
    let mut e_ref = e0;
    for i in 0..=GRID {
        let p = p0 - span + 2.0 * span * i as f64 / GRID as f64;
        match root_near(p, e_ref) {
            Some((e, f2)) => {
                e_ref = e;
                samples.push(Some((p, e, f2)));
            }
            None => samples.push(None),
        }
    }

    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for pair in samples.windows(2) {
        let (Some((pa, ea, fa)), Some((pb, eb, fb))) = (pair[0], pair[1]) else {
            continue;
        };
        // reject brackets that jump between energy branches
        if (ea - eb).abs() > 0.5 * (1.0 + ea.abs()) {
            continue;
        }
        if fa == 0.0 {
            candidates.push((ea, pa));
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut f_lo, mut e_near) = (pa, pb, fa, ea);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let Some((em, fm)) = root_near(mid, e_near) else { break };
            e_near = em;
            if fm == 0.0 {
                break;
            }
            if f_lo * fm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = fm;
            }
        }
        let p_star = 0.5 * (lo + hi);
        if let Some((e_star, _)) = root_near(p_star, e_near) {
            candidates.push((e_star, p_star));
        }
    }

    candidates.into_iter().min_by(|a, b| {
        let da = (a.0 - e0).abs() / (1.0 + e0.abs()) + (a.1 - p0).abs() / (1.0 + p0.abs());
        let db = (b.0 - e0).abs() / (1.0 + e0.abs()) + (b.1 - p0).abs() / (1.0 + p0.abs());
        da.total_cmp(&db)
    })
}

/// Solves the joint system (degree condition, coefficient condition) for the
/// energy and one free physical parameter.
///
/// Damped Newton with a finite-difference Jacobian runs first; if the
/// Jacobian degenerates because the coefficient residual vanishes
/// identically (e.g. `l = 0` with zero slope), the energy root nearest the
/// guess already satisfies both conditions and is returned with the free
/// parameter untouched. Otherwise a nested parameter scan brackets the
/// coefficient condition along the energy-root branch.
pub fn solve_joint(
    sc: &Scenario,
    free: ParamSelector,
    cfg: &SolveConfig,
    guess: (f64, f64),
) -> Result<BoundState, SpectrumError> {
    cfg.validate()?;
    let (e0, p0) = guess;
    if !e0.is_finite() || !p0.is_finite() {
        return Err(SpectrumError::InvalidConfig(format!(
            "joint guess must be finite, got ({e0}, {p0})"
        )));
    }
    // selector compatibility and guess validity
    sc.with_param(free, p0)?;

    let finish = |e: f64, p: f64| -> Result<BoundState, SpectrumError> {
        let sc2 = sc.with_param(free, p)?;
        bound_state_at(&sc2, e, Some((free, p)))
    };

    let mut best = (f64::INFINITY, f64::INFINITY);
    match newton_iterate(sc, free, cfg, e0, p0) {
        NewtonOutcome::Converged(e, p) => return finish(e, p),
        NewtonOutcome::SingularJacobian => {
            // coefficient residual is flat; check whether it is already zero
            // at the nearest energy root and keep the parameter fixed.
            let sc2 = sc.with_param(free, p0)?;
            if let Ok(states) = solve_energy(&sc2, cfg) {
                if let Some(bs) = states.iter().min_by(|a, b| {
                    (a.energy - e0).abs().total_cmp(&(b.energy - e0).abs())
                }) {
                    if bs.residual_coeff.abs() <= cfg.tol {
                        return finish(bs.energy, p0);
                    }
                    best = (bs.residual_energy.abs(), bs.residual_coeff.abs());
                }
            }
        }
        NewtonOutcome::Stalled { best: b } => best = b,
    }

    if let Some((e, p)) = scan_fallback(sc, free, cfg, guess) {
        // polish the bisection result down to the Newton tolerance
        match newton_iterate(sc, free, cfg, e, p) {
            NewtonOutcome::Converged(e, p) => return finish(e, p),
            _ => {
                let state = finish(e, p)?;
                if state.residual_energy.abs() <= 10.0 * cfg.tol * state.reduced.freq.max(1.0)
                    && state.residual_coeff.abs() <= 1e3 * cfg.tol
                {
                    return Ok(state);
                }
                best = (
                    best.0.min(state.residual_energy.abs()),
                    best.1.min(state.residual_coeff.abs()),
                );
            }
        }
    }

    Err(SpectrumError::NoConvergence {
        iterations: cfg.max_iter,
        best_energy_residual: best.0,
        best_coeff_residual: best.1,
    })
}

/// Closed-form flat-background energies of the PDM/linear coupling:
/// `E^2 = m0^2 + l^2 + k^2 + m0 Omega Xi (2n + 3 + sqrt(1 + 4 m0^2 kc^2))`.
///
/// Returns `(negative branch, positive branch)`. Only the degree condition
/// enters this formula; the coefficient condition is not imposed.
pub fn minkowski_energy(
    particle: ParticleParams,
    lin: LinearPotential,
    pdm: PdmParams,
    qn: QuantumNumbers,
) -> Result<(f64, f64), SpectrumError> {
    let m0 = particle.mass();
    let zeta = (1.0 + 4.0 * m0 * m0 * pdm.kc() * pdm.kc()).sqrt();
    let rhs = m0 * m0
        + qn.l() * qn.l()
        + qn.k() * qn.k()
        + m0 * particle.omega_osc() * lin.xi() * (2.0 * qn.n() as f64 + 3.0 + zeta);
    if rhs < 0.0 {
        return Err(SpectrumError::NegativeDiscriminant(rhs));
    }
    let e = rhs.sqrt();
    Ok((-e, e))
}

/// One root of a sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRoot {
    pub energy: f64,
    pub residual_coeff: f64,
}

/// One (parameter value, level) cell of a sweep; failures are recorded, not
/// raised, so a sweep always completes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub value: f64,
    pub n: u32,
    pub outcome: Result<Vec<ScanRoot>, SpectrumError>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

/// Sweeps one physical parameter over `values` for each level in `levels`,
/// solving the degree condition per cell. Rows appear in sweep order
/// (value-major); cells are evaluated in parallel. With `cfg = None` each
/// row uses [`SolveConfig::for_scenario`] of its own modified scenario.
pub fn scan(
    template: &Scenario,
    param: ParamSelector,
    values: &[f64],
    levels: &[u32],
    cfg: Option<&SolveConfig>,
) -> ScanTable {
    let jobs: Vec<(f64, u32)> = values
        .iter()
        .flat_map(|&v| levels.iter().map(move |&n| (v, n)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(value, n)| {
            let outcome = template
                .with_param(param, value)
                .map_err(SpectrumError::from)
                .and_then(|sc| {
                    let sc = sc.with_level(n);
                    let row_cfg = match cfg {
                        Some(c) => *c,
                        None => SolveConfig::for_scenario(&sc),
                    };
                    solve_energy(&sc, &row_cfg)
                })
                .map(|states| {
                    states
                        .iter()
                        .map(|bs| ScanRoot {
                            energy: bs.energy,
                            residual_coeff: bs.residual_coeff,
                        })
                        .collect()
                });
            ScanRow { value, n, outcome }
        })
        .collect();
    ScanTable { rows }
}
