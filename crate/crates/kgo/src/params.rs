//! Physical parameter sets and the reduction of a radial problem to the
//! dimensionless biconfluent-Heun form.
//!
//! Natural units `ħ = c = 1` throughout; every field is a plain `f64`.
//! The two reductions ([`cornell_reduce`], [`pdm_reduce`]) map a scenario and
//! a trial energy to a [`ReducedProblem`] holding the Heun parameters
//! `(a, b, c, d)` together with the frequency `ω`, the separation constant
//! `β₀` and the indicial exponent. [`Scenario::effective_potential`] exposes
//! the same radial equation in raw form for the finite-difference oracle.

use thiserror::Error;

/// Indicial root below this value is treated as the degenerate (logarithmic)
/// Frobenius branch and rejected.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamError {
    #[error("alpha must be nonnegative and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("oscillator frequency must be nonnegative and finite, got {0}")]
    InvalidOmega(f64),
    #[error("Cornell coefficient must be finite, got {0}")]
    InvalidCornellCoefficient(f64),
    #[error("linear potential coefficient must be positive and finite, got {0}")]
    InvalidXi(f64),
    #[error("kc must be nonnegative and finite, got {0}")]
    InvalidKc(f64),
    #[error("momentum component must be finite, got {0}")]
    InvalidMomentum(f64),
    #[error("trivial coupling: omega_osc > 0 with a_lin = b_coul = 0")]
    TrivialCoupling,
    #[error("degenerate indicial exponent at m*Omega*B = 1/2: the second Frobenius solution is logarithmic and unsupported")]
    DegenerateIndicial,
    #[error("zero reduced frequency at E = {energy}: alpha*E and m*Omega*coeff both vanish")]
    ZeroFrequency { energy: f64 },
    #[error("effective potential requires finite x > 0, got {0}")]
    DomainError(f64),
    #[error("energy must be finite, got {0}")]
    InvalidEnergy(f64),
    #[error("parameter {0:?} does not apply to a {1} scenario")]
    SelectorMismatch(ParamSelector, &'static str),
}

/// Rotation parameter of the background; `alpha = 0` is the flat limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeParams {
    alpha: f64,
}

impl SpacetimeParams {
    pub fn new(alpha: f64) -> Result<Self, ParamError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(ParamError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    /// The `alpha = 0` flat background.
    pub fn minkowski() -> Self {
        Self { alpha: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Rest mass and oscillator frequency of the particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    mass: f64,
    omega_osc: f64,
}

impl ParticleParams {
    pub fn new(mass: f64, omega_osc: f64) -> Result<Self, ParamError> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(ParamError::InvalidMass(mass));
        }
        if !omega_osc.is_finite() || omega_osc < 0.0 {
            return Err(ParamError::InvalidOmega(omega_osc));
        }
        Ok(Self { mass, omega_osc })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega_osc(&self) -> f64 {
        self.omega_osc
    }
}

/// Coupling profile `f(x) = a_lin * x + b_coul / x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornellPotential {
    a_lin: f64,
    b_coul: f64,
}

impl CornellPotential {
    pub fn new(a_lin: f64, b_coul: f64) -> Result<Self, ParamError> {
        if !a_lin.is_finite() {
            return Err(ParamError::InvalidCornellCoefficient(a_lin));
        }
        if !b_coul.is_finite() {
            return Err(ParamError::InvalidCornellCoefficient(b_coul));
        }
        Ok(Self { a_lin, b_coul })
    }

    pub fn a_lin(&self) -> f64 {
        self.a_lin
    }

    pub fn b_coul(&self) -> f64 {
        self.b_coul
    }
}

/// Coupling profile `f(x) = xi * x` with `xi > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPotential {
    xi: f64,
}

impl LinearPotential {
    pub fn new(xi: f64) -> Result<Self, ParamError> {
        if !xi.is_finite() || xi <= 0.0 {
            return Err(ParamError::InvalidXi(xi));
        }
        Ok(Self { xi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Position-dependent-mass strength. Only the product of the Compton-like
/// wavelength and the dimensionless constant enters any formula, so a single
/// field `kc >= 0` stores it; `kc = 0` recovers constant mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdmParams {
    kc: f64,
}

impl PdmParams {
    pub fn new(kc: f64) -> Result<Self, ParamError> {
        if !kc.is_finite() || kc < 0.0 {
            return Err(ParamError::InvalidKc(kc));
        }
        Ok(Self { kc })
    }

    /// Constant-mass limit.
    pub fn constant_mass() -> Self {
        Self { kc: 0.0 }
    }

    pub fn kc(&self) -> f64 {
        self.kc
    }
}

/// Separation constants of the plane-wave ansatz plus the polynomial degree.
///
/// `l` is kept continuous: the translation coordinate it conjugates to is
/// unbounded, so nothing forces integer values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNumbers {
    n: u32,
    l: f64,
    k: f64,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: f64, k: f64) -> Result<Self, ParamError> {
        if !l.is_finite() {
            return Err(ParamError::InvalidMomentum(l));
        }
        if !k.is_finite() {
            return Err(ParamError::InvalidMomentum(k));
        }
        Ok(Self { n, l, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn with_level(self, n: u32) -> Self {
        Self { n, ..self }
    }
}

/// Selects the physical parameter a joint solve or a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSelector {
    OmegaOsc,
    Alpha,
    /// Cornell linear coefficient `A`.
    CornellLinear,
    /// Cornell Coulomb coefficient `B`.
    CornellCoulomb,
    Xi,
    Kc,
}

/// Dimensionless problem produced by a reduction: the biconfluent-Heun
/// parameters plus the auxiliary quantities the wave function needs.
///
/// Invariants hold by construction: `a_heun = 2*exponent - 1 = root_index`
/// and `d_heun >= 0` (zero for the Cornell coupling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedProblem {
    /// Reduced frequency `ω` (Cornell) or `ω̃` (PDM); always `> 0`.
    pub freq: f64,
    /// Separation constant `β₀ = m² + l² + k² − E² + mΩ·coeff`.
    pub beta0: f64,
    /// Heun parameter `b`: the linear-term slope in units of `√freq`.
    pub b_heun: f64,
    /// Indicial exponent of the regular solution at the origin.
    pub exponent: f64,
    /// Indicial root `ξ` or `ζ`; equals `a_heun` exactly.
    pub root_index: f64,
    /// Heun parameter `c`.
    pub c_heun: f64,
    /// Heun parameter `d`; `0` for Cornell, `4 m₀² kc / √freq` for PDM.
    pub d_heun: f64,
    /// Heun parameter `a = 2*exponent − 1`.
    pub a_heun: f64,
}

/// Reduces the Cornell-coupling radial problem at trial energy `energy`.
///
/// The indicial discriminant `1 + 4(m²Ω²B² − mΩB)` is the exact square
/// `(2mΩB − 1)²`, and the root is computed from that factorization; the
/// expanded form loses every significant digit as `mΩB` approaches `1/2`.
pub fn cornell_reduce(
    st: SpacetimeParams,
    particle: ParticleParams,
    pot: CornellPotential,
    qn: QuantumNumbers,
    energy: f64,
) -> Result<ReducedProblem, ParamError> {
    if !energy.is_finite() {
        return Err(ParamError::InvalidEnergy(energy));
    }
    let (m, omega_osc) = (particle.mass, particle.omega_osc);
    if omega_osc > 0.0 && pot.a_lin == 0.0 && pot.b_coul == 0.0 {
        return Err(ParamError::TrivialCoupling);
    }

    let m_om_b = m * omega_osc * pot.b_coul;
    let root_index = (2.0 * m_om_b - 1.0).abs();
    if root_index <= DEGENERATE_TOL {
        return Err(ParamError::DegenerateIndicial);
    }

    let freq_sq = st.alpha * st.alpha * energy * energy
        + m * m * omega_osc * omega_osc * pot.a_lin * pot.a_lin;
    if freq_sq <= 0.0 {
        return Err(ParamError::ZeroFrequency { energy });
    }
    let freq = freq_sq.sqrt();

    let beta0 =
        m * m + qn.l * qn.l + qn.k * qn.k - energy * energy + m * omega_osc * pot.a_lin;
    let b_heun = 2.0 * st.alpha * energy * qn.l / freq.powf(1.5);
    let exponent = 0.5 * (1.0 + root_index);
    let coupling_const = 2.0 * pot.a_lin * pot.b_coul * m * m * omega_osc * omega_osc;
    let c_heun = 0.25 * b_heun * b_heun - (coupling_const + beta0) / freq;

    Ok(ReducedProblem {
        freq,
        beta0,
        b_heun,
        exponent,
        root_index,
        c_heun,
        d_heun: 0.0,
        a_heun: root_index,
    })
}

/// Reduces the position-dependent-mass / linear-coupling radial problem.
pub fn pdm_reduce(
    st: SpacetimeParams,
    particle: ParticleParams,
    lin: LinearPotential,
    pdm: PdmParams,
    qn: QuantumNumbers,
    energy: f64,
) -> Result<ReducedProblem, ParamError> {
    if !energy.is_finite() {
        return Err(ParamError::InvalidEnergy(energy));
    }
    let (m0, omega_osc) = (particle.mass, particle.omega_osc);
    let xi = lin.xi;
    let kc = pdm.kc;

    let freq_sq = st.alpha * st.alpha * energy * energy
        + m0 * m0 * omega_osc * omega_osc * xi * xi;
    if freq_sq <= 0.0 {
        return Err(ParamError::ZeroFrequency { energy });
    }
    let freq = freq_sq.sqrt();

    let beta0 = m0 * m0 + qn.l * qn.l + qn.k * qn.k - energy * energy + m0 * omega_osc * xi;
    let slope = st.alpha * energy * qn.l + kc * m0 * m0 * omega_osc * omega_osc * xi * xi;
    let b_heun = 2.0 * slope / freq.powf(1.5);
    let root_index = (1.0 + 4.0 * m0 * m0 * kc * kc).sqrt();
    let exponent = 0.5 * (1.0 + root_index);
    let pdm_const = m0 * m0 * kc * kc * xi * xi * omega_osc * omega_osc;
    let c_heun = 0.25 * b_heun * b_heun - (pdm_const + beta0) / freq;
    let d_heun = 4.0 * m0 * m0 * kc / freq.sqrt();

    Ok(ReducedProblem {
        freq,
        beta0,
        b_heun,
        exponent,
        root_index,
        c_heun,
        d_heun,
        a_heun: root_index,
    })
}

/// One complete radial problem: background, particle, coupling and quantum
/// numbers. The payload is kind-consistent by construction when built through
/// [`Scenario::cornell`] / [`Scenario::pdm_linear`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Cornell {
        st: SpacetimeParams,
        particle: ParticleParams,
        potential: CornellPotential,
        qn: QuantumNumbers,
    },
    PdmLinear {
        st: SpacetimeParams,
        particle: ParticleParams,
        potential: LinearPotential,
        pdm: PdmParams,
        qn: QuantumNumbers,
    },
}

impl Scenario {
    pub fn cornell(
        st: SpacetimeParams,
        particle: ParticleParams,
        potential: CornellPotential,
        qn: QuantumNumbers,
    ) -> Result<Self, ParamError> {
        if particle.omega_osc > 0.0 && potential.a_lin == 0.0 && potential.b_coul == 0.0 {
            return Err(ParamError::TrivialCoupling);
        }
        Ok(Self::Cornell { st, particle, potential, qn })
    }

    pub fn pdm_linear(
        st: SpacetimeParams,
        particle: ParticleParams,
        potential: LinearPotential,
        pdm: PdmParams,
        qn: QuantumNumbers,
    ) -> Result<Self, ParamError> {
        Ok(Self::PdmLinear { st, particle, potential, pdm, qn })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Cornell { .. } => "cornell",
            Self::PdmLinear { .. } => "pdm",
        }
    }

    pub fn spacetime(&self) -> SpacetimeParams {
        match self {
            Self::Cornell { st, .. } | Self::PdmLinear { st, .. } => *st,
        }
    }

    pub fn particle(&self) -> ParticleParams {
        match self {
            Self::Cornell { particle, .. } | Self::PdmLinear { particle, .. } => *particle,
        }
    }

    pub fn quantum_numbers(&self) -> QuantumNumbers {
        match self {
            Self::Cornell { qn, .. } | Self::PdmLinear { qn, .. } => *qn,
        }
    }

    pub fn level(&self) -> u32 {
        self.quantum_numbers().n
    }

    pub fn with_level(mut self, n: u32) -> Self {
        match &mut self {
            Self::Cornell { qn, .. } | Self::PdmLinear { qn, .. } => *qn = qn.with_level(n),
        }
        self
    }

    /// Replaces the selected physical parameter, revalidating it.
    pub fn with_param(mut self, selector: ParamSelector, value: f64) -> Result<Self, ParamError> {
        match (&mut self, selector) {
            (Self::Cornell { st, .. } | Self::PdmLinear { st, .. }, ParamSelector::Alpha) => {
                *st = SpacetimeParams::new(value)?;
            }
            (
                Self::Cornell { particle, .. } | Self::PdmLinear { particle, .. },
                ParamSelector::OmegaOsc,
            ) => {
                *particle = ParticleParams::new(particle.mass, value)?;
            }
            (Self::Cornell { potential, .. }, ParamSelector::CornellLinear) => {
                *potential = CornellPotential::new(value, potential.b_coul)?;
            }
            (Self::Cornell { potential, .. }, ParamSelector::CornellCoulomb) => {
                *potential = CornellPotential::new(potential.a_lin, value)?;
            }
            (Self::PdmLinear { potential, .. }, ParamSelector::Xi) => {
                *potential = LinearPotential::new(value)?;
            }
            (Self::PdmLinear { pdm, .. }, ParamSelector::Kc) => {
                *pdm = PdmParams::new(value)?;
            }
            (sc, selector) => {
                return Err(ParamError::SelectorMismatch(selector, sc.kind_name()));
            }
        }
        Ok(self)
    }

    /// Reduces this scenario at trial energy `energy`.
    pub fn reduce(&self, energy: f64) -> Result<ReducedProblem, ParamError> {
        match self {
            Self::Cornell { st, particle, potential, qn } => {
                cornell_reduce(*st, *particle, *potential, *qn, energy)
            }
            Self::PdmLinear { st, particle, potential, pdm, qn } => {
                pdm_reduce(*st, *particle, *potential, *pdm, *qn, energy)
            }
        }
    }

    /// Separation constant `β₀(E)` of the radial equation.
    pub fn beta0(&self, energy: f64) -> f64 {
        let p = self.particle();
        let qn = self.quantum_numbers();
        let coeff = match self {
            Self::Cornell { potential, .. } => potential.a_lin,
            Self::PdmLinear { potential, .. } => potential.xi,
        };
        p.mass * p.mass + qn.l * qn.l + qn.k * qn.k - energy * energy
            + p.mass * p.omega_osc * coeff
    }

    /// Potential `V_E(x)` of the radial equation `ψ'' − V_E ψ = β₀ ψ`,
    /// in raw (unscaled) coordinates. This is the form the finite-difference
    /// oracle discretizes.
    pub fn effective_potential(&self, energy: f64, x: f64) -> Result<f64, ParamError> {
        if !x.is_finite() || x <= 0.0 {
            return Err(ParamError::DomainError(x));
        }
        if !energy.is_finite() {
            return Err(ParamError::InvalidEnergy(energy));
        }
        let alpha = self.spacetime().alpha;
        let p = self.particle();
        let l = self.quantum_numbers().l;
        match self {
            Self::Cornell { potential, .. } => {
                let m_om = p.mass * p.omega_osc;
                let freq_sq = alpha * alpha * energy * energy
                    + m_om * m_om * potential.a_lin * potential.a_lin;
                let inv_sq = m_om * m_om * potential.b_coul * potential.b_coul
                    - m_om * potential.b_coul;
                Ok(freq_sq * x * x
                    + 2.0 * alpha * energy * l * x
                    + 2.0 * potential.a_lin * potential.b_coul * m_om * m_om
                    + inv_sq / (x * x))
            }
            Self::PdmLinear { potential, pdm, .. } => {
                let m0 = p.mass;
                let m_om_xi = m0 * p.omega_osc * potential.xi;
                let kc = pdm.kc;
                let freq_sq = alpha * alpha * energy * energy + m_om_xi * m_om_xi;
                Ok(freq_sq * x * x
                    + 2.0 * (alpha * energy * l + kc * m0 * m_om_xi * p.omega_osc * potential.xi)
                        * x
                    + kc * kc * m_om_xi * m_om_xi
                    + 2.0 * m0 * m0 * kc / x
                    + m0 * m0 * kc * kc / (x * x))
            }
        }
    }
}
