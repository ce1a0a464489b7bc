//! Scenario and solver configuration assembled from an optional key=value
//! file plus command-line flags; flags win.

use std::collections::BTreeMap;
use std::path::Path;

use kgo::params::{
    CornellPotential, LinearPotential, ParamSelector, ParticleParams, PdmParams, QuantumNumbers,
    Scenario, SpacetimeParams,
};
use kgo::spectrum::SolveConfig;

use crate::CliError;

/// Flat configuration; every field optional until [`Settings::build_scenario`].
#[derive(Debug, Default, Clone)]
pub struct Settings {
    pub kind: Option<String>,
    pub alpha: Option<f64>,
    pub mass: Option<f64>,
    pub omega_osc: Option<f64>,
    pub a_lin: Option<f64>,
    pub b_coul: Option<f64>,
    pub xi: Option<f64>,
    pub kc: Option<f64>,
    pub l: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<u32>,
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub fd_points: Option<usize>,
    pub x_max: Option<f64>,
    pub samples: Option<usize>,
    pub format: Option<String>,
    pub out: Option<String>,
}

impl Settings {
    /// Parses a plain-text `key=value` file; `#` starts a comment, blank
    /// lines are skipped, unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
        let mut pairs = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "config line {}: expected key=value, got {raw_line:?}",
                    lineno + 1
                )));
            };
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut settings = Settings::default();
        for (key, value) in pairs {
            settings.set_key(&key, &value)?;
        }
        Ok(settings)
    }

    fn set_key(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num(key: &str, value: &str) -> Result<f64, CliError> {
            value.parse().map_err(|_| {
                CliError::config(format!("config key {key}: invalid number {value:?}"))
            })
        }
        fn int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value.parse().map_err(|_| {
                CliError::config(format!("config key {key}: invalid integer {value:?}"))
            })
        }
        match key {
            "kind" => self.kind = Some(value.to_string()),
            "alpha" => self.alpha = Some(num(key, value)?),
            "mass" => self.mass = Some(num(key, value)?),
            "omega_osc" => self.omega_osc = Some(num(key, value)?),
            "A" => self.a_lin = Some(num(key, value)?),
            "B" => self.b_coul = Some(num(key, value)?),
            "xi" => self.xi = Some(num(key, value)?),
            "kc" => self.kc = Some(num(key, value)?),
            "l" => self.l = Some(num(key, value)?),
            "k" => self.k = Some(num(key, value)?),
            "n" => self.n = Some(int(key, value)?),
            "e_min" => self.e_min = Some(num(key, value)?),
            "e_max" => self.e_max = Some(num(key, value)?),
            "grid_points" => self.grid_points = Some(int(key, value)?),
            "tol" => self.tol = Some(num(key, value)?),
            "max_iter" => self.max_iter = Some(int(key, value)?),
            "fd_points" => self.fd_points = Some(int(key, value)?),
            "x_max" => self.x_max = Some(num(key, value)?),
            "samples" => self.samples = Some(int(key, value)?),
            "format" => self.format = Some(value.to_string()),
            "out" => self.out = Some(value.to_string()),
            other => {
                return Err(CliError::config(format!("unknown config key: {other}")));
            }
        }
        Ok(())
    }

    /// Overlays `flags` on top of `self` (flags win where present).
    pub fn overridden_by(mut self, flags: Settings) -> Settings {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        take!(
            kind, alpha, mass, omega_osc, a_lin, b_coul, xi, kc, l, k, n, e_min, e_max,
            grid_points, tol, max_iter, fd_points, x_max, samples, format, out
        );
        self
    }

    pub fn build_scenario(&self) -> Result<Scenario, CliError> {
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| CliError::config("missing required key: kind (cornell | pdm)"))?;
        let mass = self
            .mass
            .ok_or_else(|| CliError::config("missing required key: mass"))?;
        let omega = self
            .omega_osc
            .ok_or_else(|| CliError::config("missing required key: omega_osc"))?;

        let st = SpacetimeParams::new(self.alpha.unwrap_or(0.0)).map_err(CliError::param)?;
        let particle = ParticleParams::new(mass, omega).map_err(CliError::param)?;
        let qn = QuantumNumbers::new(
            self.n.unwrap_or(0),
            self.l.unwrap_or(0.0),
            self.k.unwrap_or(0.0),
        )
        .map_err(CliError::param)?;

        match kind {
            "cornell" => {
                let pot =
                    CornellPotential::new(self.a_lin.unwrap_or(0.0), self.b_coul.unwrap_or(0.0))
                        .map_err(CliError::param)?;
                Scenario::cornell(st, particle, pot, qn).map_err(CliError::param)
            }
            "pdm" => {
                let xi = self
                    .xi
                    .ok_or_else(|| CliError::config("missing required key: xi"))?;
                let pot = LinearPotential::new(xi).map_err(CliError::param)?;
                let pdm = PdmParams::new(self.kc.unwrap_or(0.0)).map_err(CliError::param)?;
                Scenario::pdm_linear(st, particle, pot, pdm, qn).map_err(CliError::param)
            }
            other => Err(CliError::config(format!(
                "kind must be cornell or pdm, got {other:?}"
            ))),
        }
    }

    pub fn build_solve_config(&self, sc: &Scenario) -> Result<SolveConfig, CliError> {
        let mut cfg = SolveConfig::for_scenario(sc);
        if let Some(e_min) = self.e_min {
            cfg.e_min = e_min;
        }
        if let Some(e_max) = self.e_max {
            cfg.e_max = e_max;
        }
        if let Some(grid_points) = self.grid_points {
            cfg.grid_points = grid_points;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(max_iter) = self.max_iter {
            cfg.max_iter = max_iter;
        }
        Ok(cfg)
    }
}

pub fn parse_selector(name: &str) -> Result<ParamSelector, CliError> {
    match name {
        "omega-osc" => Ok(ParamSelector::OmegaOsc),
        "alpha" => Ok(ParamSelector::Alpha),
        "a-lin" => Ok(ParamSelector::CornellLinear),
        "b-coul" => Ok(ParamSelector::CornellCoulomb),
        "xi" => Ok(ParamSelector::Xi),
        "kc" => Ok(ParamSelector::Kc),
        other => Err(CliError::config(format!(
            "unknown parameter selector {other:?} (omega-osc | alpha | a-lin | b-coul | xi | kc)"
        ))),
    }
}

pub fn selector_name(selector: ParamSelector) -> &'static str {
    match selector {
        ParamSelector::OmegaOsc => "omega-osc",
        ParamSelector::Alpha => "alpha",
        ParamSelector::CornellLinear => "a-lin",
        ParamSelector::CornellCoulomb => "b-coul",
        ParamSelector::Xi => "xi",
        ParamSelector::Kc => "kc",
    }
}

/// Current value of a selectable parameter, used as the default joint-solve
/// starting point.
pub fn selector_value(sc: &Scenario, selector: ParamSelector) -> Result<f64, CliError> {
    let value = match (sc, selector) {
        (_, ParamSelector::Alpha) => sc.spacetime().alpha(),
        (_, ParamSelector::OmegaOsc) => sc.particle().omega_osc(),
        (Scenario::Cornell { potential, .. }, ParamSelector::CornellLinear) => potential.a_lin(),
        (Scenario::Cornell { potential, .. }, ParamSelector::CornellCoulomb) => potential.b_coul(),
        (Scenario::PdmLinear { potential, .. }, ParamSelector::Xi) => potential.xi(),
        (Scenario::PdmLinear { pdm, .. }, ParamSelector::Kc) => pdm.kc(),
        _ => {
            return Err(CliError::config(format!(
                "parameter {} does not apply to a {} scenario",
                selector_name(selector),
                sc.kind_name()
            )));
        }
    };
    Ok(value)
}

/// Rough positive-branch energy estimate used as the default joint guess:
/// the flat-background level of the same scenario.
pub fn default_energy_guess(sc: &Scenario) -> f64 {
    let p = sc.particle();
    let qn = sc.quantum_numbers();
    let coeff = match sc {
        Scenario::Cornell { potential, .. } => potential.a_lin().abs(),
        Scenario::PdmLinear { potential, .. } => potential.xi(),
    };
    (p.mass() * p.mass()
        + qn.l() * qn.l()
        + qn.k() * qn.k()
        + (2.0 * qn.n() as f64 + 4.0) * p.mass() * p.omega_osc() * coeff)
        .abs()
        .sqrt()
        .max(1.0)
}
