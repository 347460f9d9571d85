//! Wigner-function reconstruction from qubit populations.
//!
//! The motional state is displaced by `-alpha`, the ion is driven on a
//! Jaynes-Cummings resonance, and the ground-state population
//! `P_g(t) = (1 + sum_k Q_k cos(eta Omega sqrt(k) t)) / 2` is fitted for the
//! displaced number populations `Q_k`. Their alternating sum gives `W(alpha)`.

use std::f64::consts::FRAC_2_PI;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::LeastSquaresSvd;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{DephasingFrame, DephasingModel, LindbladSolver, TimeGrid};
use crate::hilbert::{
    cat_normalization, cat_state, coherent_state, displacement, ground, lift_qubit, number_state, qubit_ops,
    FockSpace, Operator, Space, StateVector,
};
use crate::models::{build, build_r_transform, HamiltonianKind, ModelParams};

/// Design matrices with a condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// Weak drive on the red sideband, `delta = nu`, `Omega = 0.05 nu`.
    Slow,
    /// Strong resonant drive `Omega = nu`, simulated in the rotated frame.
    Fast,
}

impl Regime {
    pub const BOTH: [Regime; 2] = [Regime::Slow, Regime::Fast];

    pub fn kind(&self) -> HamiltonianKind {
        match self {
            Regime::Slow => HamiltonianKind::Rsb,
            Regime::Fast => HamiltonianKind::JcmR,
        }
    }

    pub fn params(&self, eta: f64, cutoff: usize) -> ModelParams {
        let (omega, delta) = match self {
            Regime::Slow => (0.05, 1.0),
            Regime::Fast => (1.0, 0.0),
        };
        ModelParams::new(omega, delta).with_eta(eta).with_cutoff(cutoff)
    }

    pub fn dephasing_frame(&self) -> DephasingFrame {
        match self {
            Regime::Slow => DephasingFrame::Lab,
            Regime::Fast => DephasingFrame::Jcm,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Slow => "slow",
            Regime::Fast => "fast",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "slow" => Ok(Regime::Slow),
            "fast" => Ok(Regime::Fast),
            _ => Err(Error::InvalidParameter(format!("unknown regime '{s}'"))),
        }
    }
}

/// Numerical settings shared by both regimes. Sampling is fixed in units of
/// `Omega t`, so the two regimes see the same number of fit periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyConfig {
    pub eta: f64,
    pub cutoff: usize,
    /// Highest Fock level in the fit.
    pub k_max: usize,
    /// Total drive time in units of `1/Omega`.
    pub omega_t_max: f64,
    pub samples: usize,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self { eta: 0.05, cutoff: 50, k_max: 49, omega_t_max: 800.0, samples: 1600 }
    }
}

impl TomographyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_max >= self.cutoff {
            return Err(Error::OutOfRange(format!(
                "k_max = {} must be below the cutoff {}",
                self.k_max, self.cutoff
            )));
        }
        if self.samples < self.k_max + 2 {
            return Err(Error::InvalidParameter(format!(
                "{} samples cannot determine {} coefficients",
                self.samples,
                self.k_max + 1
            )));
        }
        FockSpace::new(self.cutoff)?;
        Regime::Slow.params(self.eta, self.cutoff).validate()
    }

    pub fn fock(&self) -> Result<FockSpace> {
        FockSpace::new(self.cutoff)
    }

    /// Grid in units of `1/nu` for `regime`.
    pub fn grid(&self, regime: Regime) -> Result<TimeGrid> {
        let omega = regime.params(self.eta, self.cutoff).omega;
        TimeGrid::new(self.omega_t_max / omega, self.samples)
    }
}

/// `|g> ⊗ D(-alpha)|phi>`: the prepared state in the frame the regime is
/// simulated in.
pub fn prepare_initial(phi: &StateVector, alpha: C64, _regime: Regime) -> Result<StateVector> {
    let fock = match phi.space() {
        Space::Fock(f) => f,
        other => {
            return Err(Error::SpaceMismatch { left: other.to_string(), right: "motional Fock space".into() })
        }
    };
    let shifted = displacement(-alpha, fock)?.apply(phi)?;
    StateVector::tensor(&ground(), &shifted)
}

/// The prepared state in the lab frame. For the fast regime this is
/// `R† (|g> ⊗ D(-alpha)|phi>) = -|-> ⊗ D(-alpha)|phi>`.
pub fn prepare_initial_lab(phi: &StateVector, alpha: C64, regime: Regime) -> Result<StateVector> {
    let framed = prepare_initial(phi, alpha, regime)?;
    match regime {
        Regime::Slow => Ok(framed),
        Regime::Fast => {
            let Space::Composite(f) = framed.space() else { unreachable!() };
            build_r_transform(f).dagger().apply(&framed)
        }
    }
}

/// Ground-state population sampled over a regime's drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySeries {
    pub regime: Regime,
    pub alpha: C64,
    pub gamma: f64,
    pub params: ModelParams,
    /// Times in units of `1/nu`.
    pub times: Vec<f64>,
    pub p_ground: Vec<f64>,
}

fn ground_projector(fock: FockSpace) -> Operator {
    lift_qubit(&qubit_ops().proj_g, fock).expect("qubit ⊗ Fock")
}

fn regime_solver(regime: Regime, gamma: f64, config: &TomographyConfig) -> Result<(ModelParams, LindbladSolver)> {
    config.validate()?;
    let p = regime.params(config.eta, config.cutoff);
    let h = build(regime.kind(), &p)?;
    let deph = DephasingModel::new(gamma, regime.dephasing_frame())?;
    Ok((p, LindbladSolver::new(&h, &deph)?))
}

/// `P_g(t)` for one phase-space point, simulated in the regime's frame.
pub fn simulate_probability(
    phi: &StateVector,
    alpha: C64,
    regime: Regime,
    gamma: f64,
    config: &TomographyConfig,
) -> Result<ProbabilitySeries> {
    simulate_batch(phi, &[alpha], regime, gamma, config)?.remove(0)
}

/// `P_g(t)` for many phase-space points sharing one Heisenberg-picture
/// propagation. Points failing preparation carry their own error.
pub fn simulate_batch(
    phi: &StateVector,
    alphas: &[C64],
    regime: Regime,
    gamma: f64,
    config: &TomographyConfig,
) -> Result<Vec<Result<ProbabilitySeries>>> {
    let (p, solver) = regime_solver(regime, gamma, config)?;
    let grid = config.grid(regime)?;
    let prepared: Vec<Result<StateVector>> = alphas.iter().map(|&a| prepare_initial(phi, a, regime)).collect();
    let good: Vec<StateVector> = prepared.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let values = solver.expectations(&ground_projector(p.fock()), &good, &grid)?;
    let times = grid.times();

    let mut row = 0;
    Ok(alphas
        .iter()
        .zip(prepared)
        .map(|(&alpha, prep)| {
            prep.map(|_| {
                let p_ground = values.row(row).to_vec();
                row += 1;
                ProbabilitySeries { regime, alpha, gamma, params: p, times: times.clone(), p_ground }
            })
        })
        .collect())
}

/// The same measurement carried out in the lab frame: Hamiltonian, jump
/// operator, state and projector all conjugated back by the regime's qubit
/// rotation. Agrees with [`simulate_probability`] up to round-off.
pub fn simulate_probability_lab(
    phi: &StateVector,
    alpha: C64,
    regime: Regime,
    gamma: f64,
    config: &TomographyConfig,
) -> Result<ProbabilitySeries> {
    config.validate()?;
    let p = regime.params(config.eta, config.cutoff);
    let fock = p.fock();
    let frame = match regime {
        Regime::Slow => Operator::identity(p.space()),
        Regime::Fast => build_r_transform(fock),
    };
    let back = frame.dagger();
    let h_lab = build(regime.kind(), &p)?.conjugate_by(&back)?;
    let jump_lab = DephasingModel::new(gamma, regime.dephasing_frame())?.jump_operator(p.space())?.conjugate_by(&back)?;
    let measure_lab = ground_projector(fock).conjugate_by(&back)?;
    let solver = LindbladSolver::with_jump(&h_lab, &jump_lab, gamma)?;
    let psi = prepare_initial_lab(phi, alpha, regime)?;
    let grid = config.grid(regime)?;
    let values = solver.expectations(&measure_lab, std::slice::from_ref(&psi), &grid)?;
    Ok(ProbabilitySeries { regime, alpha, gamma, params: p, times: grid.times(), p_ground: values.row(0).to_vec() })
}

/// Displaced number populations at one phase-space point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QCoefficients {
    pub alpha: C64,
    /// `q[k]` for `k = 0..=k_max`.
    pub q: Vec<f64>,
    /// RMS of the fit residual on `2 P_g - 1`; zero for exact values.
    pub residual: f64,
}

impl QCoefficients {
    pub fn k_max(&self) -> usize {
        self.q.len() - 1
    }

    pub fn total(&self) -> f64 {
        self.q.iter().sum()
    }
}

/// Linear least squares of `2 P_g(t) - 1` on `cos(eta Omega sqrt(k) t)`.
pub fn fit_q(series: &ProbabilitySeries, k_max: usize) -> Result<QCoefficients> {
    let m = series.times.len();
    if m < k_max + 2 {
        return Err(Error::InvalidParameter(format!("{m} samples cannot determine {} coefficients", k_max + 1)));
    }
    let rate = series.params.eta * series.params.omega;
    let mut design = Array2::<f64>::zeros((m, k_max + 1).f());
    for (i, &t) in series.times.iter().enumerate() {
        for k in 0..=k_max {
            design[[i, k]] = (rate * (k as f64).sqrt() * t).cos();
        }
    }
    let mut target = Array1::<f64>::zeros(m);
    for (i, &p) in series.p_ground.iter().enumerate() {
        target[i] = 2.0 * p - 1.0;
    }

    let fit = design.least_squares(&target)?;
    let sv = &fit.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit { condition });
    }
    let q = fit.solution.to_vec();
    let resid = design.dot(&fit.solution) - &target;
    let residual = (resid.iter().map(|r| r * r).sum::<f64>() / m as f64).sqrt();
    Ok(QCoefficients { alpha: series.alpha, q, residual })
}

/// `Q_k = |<k| D(-alpha) |phi>|²` directly.
pub fn q_exact(phi: &StateVector, alpha: C64, k_max: usize) -> Result<QCoefficients> {
    let Space::Fock(fock) = phi.space() else {
        return Err(Error::SpaceMismatch { left: phi.space().to_string(), right: "motional Fock space".into() });
    };
    if k_max >= fock.cutoff() {
        return Err(Error::OutOfRange(format!("k_max = {k_max} must be below the cutoff {}", fock.cutoff())));
    }
    let shifted = displacement(-alpha, fock)?.apply(phi)?;
    let q = shifted.amplitudes().iter().take(k_max + 1).map(|z| z.norm_sqr()).collect();
    Ok(QCoefficients { alpha, q, residual: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerSample {
    pub alpha: C64,
    pub w: f64,
}

/// `W(alpha) = (2/pi) sum_k (-1)^k Q_k`.
pub fn wigner_point(q: &QCoefficients) -> WignerSample {
    let sum: f64 = q.q.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x } else { -x }).sum();
    WignerSample { alpha: q.alpha, w: FRAC_2_PI * sum }
}

/// Motional states with closed-form Wigner functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MotionalState {
    Coherent(C64),
    Number(usize),
    /// Even cat `N(|a> + |-a>)`.
    Cat(C64),
}

impl MotionalState {
    pub fn state(&self, fock: FockSpace) -> Result<StateVector> {
        match *self {
            MotionalState::Coherent(b) => coherent_state(b, fock),
            MotionalState::Number(n) => number_state(n, fock),
            MotionalState::Cat(a) => cat_state(a, fock),
        }
    }

    pub fn analytic_wigner(&self, alpha: C64) -> f64 {
        match *self {
            MotionalState::Coherent(b) => FRAC_2_PI * (-2.0 * (alpha - b).norm_sqr()).exp(),
            MotionalState::Number(n) => {
                let r2 = alpha.norm_sqr();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                FRAC_2_PI * sign * (-2.0 * r2).exp() * laguerre(n, 4.0 * r2)
            }
            MotionalState::Cat(a) => {
                let n2 = cat_normalization(a).powi(2);
                let lobes = (-2.0 * (alpha - a).norm_sqr()).exp() + (-2.0 * (alpha + a).norm_sqr()).exp();
                let fringe = 2.0 * (-2.0 * alpha.norm_sqr()).exp() * (4.0 * (alpha * a.conj()).im).cos();
                FRAC_2_PI * n2 * (lobes + fringe)
            }
        }
    }
}

impl fmt::Display for MotionalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotionalState::Coherent(b) => write!(f, "coherent:{}", fmt_complex(*b)),
            MotionalState::Number(n) => write!(f, "number:{n}"),
            MotionalState::Cat(a) => write!(f, "cat:{}", fmt_complex(*a)),
        }
    }
}

fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{z}")
    }
}

/// Parses `kind:param`, e.g. `cat:2`, `number:1`, `coherent:1+0.5i`.
impl FromStr for MotionalState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| Error::UnsupportedState(format!("expected kind:param, got '{s}'")))?;
        let complex = || {
            param
                .trim()
                .parse::<C64>()
                .map_err(|_| Error::UnsupportedState(format!("bad amplitude '{param}' in '{s}'")))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(MotionalState::Coherent(complex()?)),
            "cat" => Ok(MotionalState::Cat(complex()?)),
            "number" | "fock" => param
                .trim()
                .parse()
                .map(MotionalState::Number)
                .map_err(|_| Error::UnsupportedState(format!("bad Fock level '{param}' in '{s}'"))),
            other => Err(Error::UnsupportedState(format!("unknown state kind '{other}'"))),
        }
    }
}

pub fn analytic_wigner(state: &MotionalState, alpha: C64) -> f64 {
    state.analytic_wigner(alpha)
}

/// Laguerre polynomial `L_n(x)` by upward recurrence.
fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur - k as f64 * prev;
        prev = cur;
        cur = next / (k + 1) as f64;
    }
    cur
}

/// Phase-space line through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slice {
    /// The real axis, `Im alpha = 0`; the coordinate is `Re alpha`.
    Real,
    /// The imaginary axis, `Re alpha = 0`; the coordinate is `Im alpha`.
    Imag,
}

impl Slice {
    pub const BOTH: [Slice; 2] = [Slice::Real, Slice::Imag];

    pub fn point(&self, coord: f64) -> C64 {
        match self {
            Slice::Real => C64::new(coord, 0.0),
            Slice::Imag => C64::new(0.0, coord),
        }
    }

    /// `count` evenly spaced points on `[lo, hi]`.
    pub fn points(&self, lo: f64, hi: f64, count: usize) -> Vec<(f64, C64)> {
        let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
        (0..count)
            .map(|i| {
                let c = if i + 1 == count && count > 1 { hi } else { lo + i as f64 * step };
                (c, self.point(c))
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Slice::Real => "re",
            Slice::Imag => "im",
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Slice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re" | "real" => Ok(Slice::Real),
            "im" | "imag" => Ok(Slice::Imag),
            _ => Err(Error::InvalidParameter(format!("unknown slice '{s}'"))),
        }
    }
}

/// One reconstructed phase-space point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub sample: WignerSample,
    pub fit: QCoefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub alpha: C64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    /// Successful points in input order.
    pub points: Vec<ScanPoint>,
    pub failures: Vec<PointFailure>,
}

/// Runs the whole reconstruction at every point. A failing point is recorded
/// in `failures` and does not stop the scan.
pub fn scan(
    phi: &MotionalState,
    points: &[C64],
    regime: Regime,
    gamma: f64,
    config: &TomographyConfig,
) -> Result<ScanResult> {
    let motion = phi.state(config.fock()?)?;
    let series = simulate_batch(&motion, points, regime, gamma, config)?;
    let mut out = ScanResult::default();
    for (&alpha, s) in points.iter().zip(series) {
        match s.and_then(|s| fit_q(&s, config.k_max)) {
            Ok(fit) => out.points.push(ScanPoint { sample: wigner_point(&fit), fit }),
            Err(e) => out.failures.push(PointFailure { alpha, reason: e.to_string() }),
        }
    }
    Ok(out)
}

/// Closed-form ground population `(1 + sum_k Q_k cos(eta Omega sqrt(k) t)) / 2`
/// for coherent evolution.
pub fn coherent_ground_population(q: &QCoefficients, p: &ModelParams, t: f64) -> f64 {
    let rate = p.eta * p.omega;
    let sum: f64 = q.q.iter().enumerate().map(|(k, &x)| x * (rate * (k as f64).sqrt() * t).cos()).sum();
    0.5 * (1.0 + sum)
}

/// `2/pi`, the largest magnitude a Wigner function can take.
pub const WIGNER_BOUND: f64 = FRAC_2_PI;
