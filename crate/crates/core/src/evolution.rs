//! Time propagation: closed-system Schrödinger evolution, dephasing master
//! equations, and fidelity between full and effective dynamics.
//!
//! All Hamiltonians here are time independent, so each propagation starts
//! from one eigendecomposition and works in the energy basis.

use std::f64::consts::TAU;

use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{lift_qubit, qubit_ops, DensityMatrix, Operator, Space, StateVector};
use crate::linalg::{self, Matrix, Vector};
use crate::models::{build, build_full, frame_chain, HamiltonianKind, ModelParams};

/// Uniform sampling `t_k = k * t_max / (samples - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_max: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, samples: usize) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidParameter(format!("a time grid needs at least 2 samples, got {samples}")));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidParameter(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { t_max, samples })
    }

    /// Grid over `[0, t_max]` with at least `per_period` samples per period
    /// of the fastest frequency `omega_max`.
    pub fn resolving(t_max: f64, omega_max: f64, per_period: usize) -> Result<Self> {
        if !(omega_max > 0.0) {
            return Err(Error::InvalidParameter("resolved frequency must be positive".into()));
        }
        let dt = TAU / omega_max / per_period as f64;
        Self::new(t_max, (t_max / dt).ceil() as usize + 1)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.samples {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DephasingFrame {
    /// Jump operator `σz`.
    Lab,
    /// Jump operator `σx`, the lab-frame `σz` seen through the qubit rotation.
    Jcm,
}

/// Pure dephasing `(gamma/2)(L rho L - rho)` with `L² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingModel {
    gamma: f64,
    frame: DephasingFrame,
}

impl DephasingModel {
    pub fn new(gamma: f64, frame: DephasingFrame) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("dephasing rate must be non-negative, got {gamma}")));
        }
        Ok(Self { gamma, frame })
    }

    pub fn none() -> Self {
        Self { gamma: 0.0, frame: DephasingFrame::Lab }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn frame(&self) -> DephasingFrame {
        self.frame
    }

    /// The jump operator on `space`: the bare Pauli matrix on a qubit, lifted
    /// onto the motion otherwise.
    pub fn jump_operator(&self, space: Space) -> Result<Operator> {
        let q = qubit_ops();
        let pauli = match self.frame {
            DephasingFrame::Lab => q.sz,
            DephasingFrame::Jcm => q.sx,
        };
        match space {
            Space::Qubit => Ok(pauli),
            Space::Composite(f) => lift_qubit(&pauli, f),
            Space::Fock(_) => Err(Error::SpaceMismatch {
                left: space.to_string(),
                right: "qubit or composite space".into(),
            }),
        }
    }
}

fn check_hermitian(h: &Operator) -> Result<()> {
    let dev = h.hermiticity_error();
    let scale = linalg::max_abs(h.matrix()).max(1.0);
    if dev > 1e-10 * scale {
        return Err(Error::NonHermitianInput { deviation: dev });
    }
    Ok(())
}

/// `exp(-i H t)` through a single eigendecomposition of `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: Space,
    energies: Array1<f64>,
    basis: Matrix,
}

impl Propagator {
    pub fn new(h: &Operator) -> Result<Self> {
        check_hermitian(h)?;
        let (energies, basis) = linalg::hermitian_eigen(h.matrix())?;
        Ok(Self { space: h.space(), energies, basis })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    /// Columns are the energy eigenvectors.
    pub fn eigenbasis(&self) -> &Matrix {
        &self.basis
    }

    /// Components in the energy basis.
    fn to_energy_basis(&self, v: &Vector) -> Vector {
        linalg::dagger(&self.basis).dot(v)
    }

    fn phased(&self, c: &Vector, t: f64) -> Vector {
        Array1::from_shape_fn(c.len(), |i| c[i] * C64::from_polar(1.0, -self.energies[i] * t))
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.space.ensure_same(&psi.space())?;
        let c = self.to_energy_basis(psi.amplitudes());
        Ok(StateVector::from_parts(self.space, self.basis.dot(&self.phased(&c, t))))
    }

    pub fn trajectory(&self, psi: &StateVector, grid: &TimeGrid) -> Result<Vec<StateVector>> {
        self.space.ensure_same(&psi.space())?;
        let c = self.to_energy_basis(psi.amplitudes());
        Ok(grid
            .times()
            .into_iter()
            .map(|t| StateVector::from_parts(self.space, self.basis.dot(&self.phased(&c, t))))
            .collect())
    }

    pub fn unitary(&self, t: f64) -> Operator {
        let phases = self.energies.mapv(|e| C64::from_polar(1.0, -e * t));
        let scaled = &self.basis * &phases.insert_axis(Axis(0));
        Operator::from_parts(self.space, scaled.dot(&linalg::dagger(&self.basis)))
    }
}

/// `psi(t_k) = exp(-i H t_k) psi0` on every grid point.
pub fn evolve_unitary(h: &Operator, psi0: &StateVector, grid: &TimeGrid) -> Result<Vec<StateVector>> {
    Propagator::new(h)?.trajectory(psi0, grid)
}

/// Substeps are bounded by `STEP_SCALE / ||[H, L]||_2`, the rate at which the
/// coherent and dissipative parts fail to commute.
pub const STEP_SCALE: f64 = 0.25;

/// Dephasing master equation `d rho/dt = -i[H, rho] + (gamma/2)(L rho L - rho)`.
///
/// Integrated by symmetric splitting in the energy basis: the coherent
/// half-steps are exact phase factors and the dissipative step is the exact
/// channel `rho -> (1 - p) rho + p L rho L`, `p = (1 - e^{-gamma h})/2`, so every
/// substep is completely positive and trace preserving. With `gamma = 0` the
/// result is exact.
#[derive(Debug, Clone)]
pub struct LindbladSolver {
    prop: Propagator,
    jump: Matrix,
    gamma: f64,
    max_step: f64,
}

impl LindbladSolver {
    pub fn new(h: &Operator, deph: &DephasingModel) -> Result<Self> {
        Self::with_jump(h, &deph.jump_operator(h.space())?, deph.gamma())
    }

    /// Dephasing through an arbitrary Hermitian jump operator with `L² = 1`.
    pub fn with_jump(h: &Operator, l: &Operator, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("dephasing rate must be non-negative, got {gamma}")));
        }
        check_hermitian(l)?;
        let square = l.mul(l)?;
        if square.max_abs_diff(&Operator::identity(l.space()))? > 1e-10 {
            return Err(Error::InvalidParameter("jump operator must square to the identity".into()));
        }
        let prop = Propagator::new(h)?;
        // i[H, L] is Hermitian; its spectral radius is the frame-independent
        // size of the commutator.
        let comm_h = h.commutator(l)?.matrix().mapv(|z| z * linalg::I);
        let (vals, _) = linalg::hermitian_eigen(&comm_h)?;
        let comm = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let max_step = if comm > 0.0 { STEP_SCALE / comm } else { f64::INFINITY };
        let v = prop.eigenbasis();
        let jump = linalg::dagger(v).dot(l.matrix()).dot(v);
        Ok(Self { prop, jump, gamma, max_step })
    }

    /// Overrides the substep bound.
    pub fn with_max_step(mut self, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::InvalidParameter(format!("max step must be positive, got {max_step}")));
        }
        self.max_step = max_step;
        Ok(self)
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn space(&self) -> Space {
        self.prop.space()
    }

    /// Number of substeps per grid interval.
    pub fn substeps(&self, grid: &TimeGrid) -> usize {
        if self.gamma == 0.0 {
            1
        } else {
            (grid.dt() / self.max_step).ceil().max(1.0) as usize
        }
    }

    /// Phase factors `exp(-/+ i (E_i - E_j) tau)`.
    fn phase_matrix(&self, tau: f64, heisenberg: bool) -> Matrix {
        let e = self.prop.energies();
        let sign = if heisenberg { 1.0 } else { -1.0 };
        Array2::from_shape_fn((e.len(), e.len()), |(i, j)| C64::from_polar(1.0, sign * (e[i] - e[j]) * tau))
    }

    fn dephase(&self, a: &mut Matrix, h: f64) {
        let p = -(-self.gamma * h).exp_m1() / 2.0;
        let lal = self.jump.dot(&*a).dot(&self.jump);
        a.zip_mut_with(&lal, |x, y| *x = *x * (1.0 - p) + *y * p);
    }

    /// Advances `a` (in the energy basis) by one grid interval.
    fn advance(&self, a: &mut Matrix, half: &Matrix, full: &Matrix, substeps: usize, h: f64) {
        if self.gamma == 0.0 {
            *a *= full;
            return;
        }
        *a *= half;
        for s in 0..substeps {
            self.dephase(a, h);
            *a *= if s + 1 == substeps { half } else { full };
        }
    }

    /// Runs the propagation in the energy basis and hands each grid point's
    /// matrix to `visit`. `heisenberg` evolves an observable instead of a state.
    fn run<F>(&self, start: Matrix, grid: &TimeGrid, heisenberg: bool, mut visit: F)
    where
        F: FnMut(usize, &Matrix),
    {
        let substeps = self.substeps(grid);
        let h = grid.dt() / substeps as f64;
        let (half, full) = if self.gamma == 0.0 {
            let full = self.phase_matrix(grid.dt(), heisenberg);
            (full.clone(), full)
        } else {
            (self.phase_matrix(h / 2.0, heisenberg), self.phase_matrix(h, heisenberg))
        };
        let mut a = start;
        visit(0, &a);
        for k in 1..grid.samples() {
            self.advance(&mut a, &half, &full, substeps, h);
            visit(k, &a);
        }
    }

    fn to_energy_basis(&self, m: &Matrix) -> Matrix {
        let v = self.prop.eigenbasis();
        linalg::dagger(v).dot(m).dot(v)
    }

    fn to_product_basis(&self, m: &Matrix) -> Matrix {
        linalg::conjugate(self.prop.eigenbasis(), m)
    }

    /// Calls `visit(k, t_k, rho(t_k))` on every grid point without storing the
    /// trajectory.
    pub fn for_each_state<F>(&self, rho0: &DensityMatrix, grid: &TimeGrid, mut visit: F) -> Result<()>
    where
        F: FnMut(usize, f64, DensityMatrix),
    {
        self.space().ensure_same(&rho0.space())?;
        let start = self.to_energy_basis(rho0.matrix());
        self.run(start, grid, false, |k, a| {
            let rho = DensityMatrix::from_parts(self.space(), self.to_product_basis(a));
            visit(k, grid.time(k), rho)
        });
        Ok(())
    }

    pub fn trajectory(&self, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Vec<DensityMatrix>> {
        let mut out = Vec::with_capacity(grid.samples());
        self.for_each_state(rho0, grid, |_, _, rho| out.push(rho))?;
        Ok(out)
    }

    /// `<psi_s| A(t_k) |psi_s>` for every state and grid point, evolving the
    /// observable once in the Heisenberg picture. Rows index states.
    pub fn expectations(&self, observable: &Operator, states: &[StateVector], grid: &TimeGrid) -> Result<Array2<f64>> {
        self.space().ensure_same(&observable.space())?;
        check_hermitian(observable)?;
        let dim = self.space().dim();
        let mut coeffs = Array2::<C64>::zeros((dim, states.len()));
        for (s, psi) in states.iter().enumerate() {
            self.space().ensure_same(&psi.space())?;
            coeffs.column_mut(s).assign(&self.prop.to_energy_basis(psi.amplitudes()));
        }
        let conj = coeffs.mapv(|z| z.conj());
        let start = self.to_energy_basis(observable.matrix());
        let mut out = Array2::zeros((states.len(), grid.samples()));
        self.run(start, grid, true, |k, a| {
            let ac = a.dot(&coeffs);
            for s in 0..states.len() {
                let v: C64 = conj.column(s).iter().zip(ac.column(s).iter()).map(|(x, y)| x * y).sum();
                out[[s, k]] = v.re;
            }
        });
        Ok(out)
    }
}

pub fn evolve_lindblad(
    h: &Operator,
    deph: &DephasingModel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Vec<DensityMatrix>> {
    LindbladSolver::new(h, deph)?.trajectory(rho0, grid)
}

/// Average over one coarse-graining window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMean {
    pub midpoint: f64,
    pub value: f64,
}

/// Overlap between full and effective dynamics over a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySeries {
    pub kind: HamiltonianKind,
    pub times: Vec<f64>,
    pub raw: Vec<f64>,
    /// Window length used for `coarse`, if coarse-grained.
    pub window: Option<f64>,
    pub coarse: Vec<WindowMean>,
}

impl FidelitySeries {
    pub fn min_coarse(&self) -> Option<f64> {
        self.coarse.iter().map(|w| w.value).reduce(f64::min)
    }

    pub fn mean_coarse(&self) -> Option<f64> {
        if self.coarse.is_empty() {
            return None;
        }
        Some(self.coarse.iter().map(|w| w.value).sum::<f64>() / self.coarse.len() as f64)
    }

    pub fn final_coarse(&self) -> Option<f64> {
        self.coarse.last().map(|w| w.value)
    }

    /// Coarse value in effect at sample time `t`, if `t` lies inside a window.
    pub fn coarse_at(&self, t: f64) -> Option<f64> {
        let w = self.window?;
        let idx = (t / w).floor();
        if idx < 0.0 {
            return None;
        }
        self.coarse.get(idx as usize).map(|m| m.value)
    }
}

/// `F(t) = |<psi_eff(t)|psi_full(t)>|²` in the lab frame, where the effective
/// state is carried into the model's frame by its frame chain `G`, evolved
/// there, and brought back with `G†`.
pub fn fidelity_vs_full(
    kind: HamiltonianKind,
    p: &ModelParams,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<FidelitySeries> {
    p.space().ensure_same(&psi0.space())?;
    let full = Propagator::new(&build_full(p)?)?;
    let eff = Propagator::new(&build(kind, p)?)?;
    let g = frame_chain(kind, p)?;

    // <psi_eff(t)|psi_full(t)> = c_e† e^{iE_e t} (V_e† G V_f) e^{-iE_f t} c_f
    let bridge = linalg::dagger(eff.eigenbasis()).dot(g.matrix()).dot(full.eigenbasis());
    let c_full = full.to_energy_basis(psi0.amplitudes());
    let c_eff = eff.to_energy_basis(&g.matrix().dot(psi0.amplitudes()));

    let times = grid.times();
    let raw = times
        .iter()
        .map(|&t| {
            let moved = bridge.dot(&full.phased(&c_full, t));
            let eff_t = eff.phased(&c_eff, t);
            linalg::inner(&eff_t, &moved).norm_sqr()
        })
        .collect();
    Ok(FidelitySeries { kind, times, raw, window: None, coarse: Vec::new() })
}

/// Means of the piecewise-linear interpolant of `values` over consecutive
/// windows `[t0 + w W, t0 + (w + 1) W]`. A trailing partial window is dropped.
pub fn window_means(times: &[f64], values: &[f64], window: f64) -> Result<Vec<WindowMean>> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("coarse-graining needs matching series of length >= 2".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sample times must increase strictly".into()));
    }
    let t0 = times[0];
    let span = times[times.len() - 1] - t0;
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::WindowTooLarge { window, span });
    }
    // tolerate round-off when the span is an exact multiple of the window
    let count = (span / window * (1.0 + 1e-12)).floor() as usize;
    if count == 0 {
        return Err(Error::WindowTooLarge { window, span });
    }

    let value_at = |seg: usize, t: f64| {
        let (ta, tb) = (times[seg], times[seg + 1]);
        let f = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        values[seg] + f * (values[seg + 1] - values[seg])
    };

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for w in 0..count {
        let a = t0 + w as f64 * window;
        let b = (t0 + (w + 1) as f64 * window).min(times[times.len() - 1]);
        while seg + 2 < times.len() && times[seg + 1] <= a {
            seg += 1;
        }
        let mut area = 0.0;
        let mut s = seg;
        loop {
            let lo = times[s].max(a);
            let hi = times[s + 1].min(b);
            if hi > lo {
                area += (hi - lo) * (value_at(s, lo) + value_at(s, hi)) / 2.0;
            }
            if times[s + 1] >= b || s + 2 >= times.len() {
                break;
            }
            s += 1;
        }
        out.push(WindowMean { midpoint: (a + b) / 2.0, value: area / (b - a) });
    }
    Ok(out)
}

/// Coarse-grains over windows of one drive period `2 pi / Omega`.
pub fn coarse_grain(series: &FidelitySeries, p: &ModelParams) -> Result<FidelitySeries> {
    let window = TAU / p.omega;
    let coarse = window_means(&series.times, &series.raw, window)?;
    Ok(FidelitySeries { window: Some(window), coarse, ..series.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{excited, number_operator, number_state, FockSpace, EXCITED};
    use crate::linalg::real;
    use crate::models::build_rsb;

    #[test]
    fn grid_basics() {
        let g = TimeGrid::new(10.0, 11).unwrap();
        assert_eq!(g.dt(), 1.0);
        assert_eq!(g.times().last().copied(), Some(10.0));
        assert!(TimeGrid::new(10.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 5).is_err());
        let r = TimeGrid::resolving(800.0, 1.0, 20).unwrap();
        assert!(r.dt() <= TAU / 20.0);
    }

    #[test]
    fn number_state_only_picks_up_phase() {
        let f = FockSpace::new(8).unwrap();
        let h = number_operator(f);
        let psi = number_state(3, f).unwrap();
        let grid = TimeGrid::new(5.0, 6).unwrap();
        for (t, s) in grid.times().iter().zip(evolve_unitary(&h, &psi, &grid).unwrap()) {
            let a = s.amplitudes();
            assert!((a[3] - C64::from_polar(1.0, -3.0 * t)).norm() < 1e-12);
            assert!(a.iter().enumerate().all(|(i, z)| i == 3 || z.norm() < 1e-14));
        }
    }

    #[test]
    fn sideband_rabi_oscillation() {
        let p = ModelParams::new(1.0, 1.0).with_cutoff(10);
        let h = build_rsb(&p).unwrap();
        let psi = StateVector::tensor(&excited(), &number_state(0, p.fock()).unwrap()).unwrap();
        let grid = TimeGrid::new(200.0, 101).unwrap();
        let traj = evolve_unitary(&h, &psi, &grid).unwrap();
        let e0 = h.expectation(&psi).unwrap().re;
        for (t, s) in grid.times().iter().zip(&traj) {
            let pe = s.amplitudes()[EXCITED * p.cutoff].norm_sqr();
            assert!((pe - (p.eta * p.omega * t / 2.0).cos().powi(2)).abs() < 1e-8);
            assert!((s.norm() - 1.0).abs() < 1e-9);
            assert!((h.expectation(s).unwrap().re - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let f = FockSpace::new(4).unwrap();
        let a = crate::hilbert::annihilation(f);
        assert!(matches!(Propagator::new(&a), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn qubit_pure_dephasing() {
        let gamma = 0.3;
        let deph = DephasingModel::new(gamma, DephasingFrame::Lab).unwrap();
        let h = Operator::zeros(Space::Qubit);
        let plus = StateVector::new(Space::Qubit, ndarray::arr1(&[real(1.0), real(1.0)])).unwrap();
        let grid = TimeGrid::new(10.0, 21).unwrap();
        let traj = evolve_lindblad(&h, &deph, &DensityMatrix::from_pure(&plus), &grid).unwrap();
        for (t, rho) in grid.times().iter().zip(&traj) {
            assert!((rho.matrix()[[0, 1]].re - 0.5 * (-gamma * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_system_limit() {
        let p = ModelParams::new(1.0, 0.0).with_cutoff(12);
        let h = crate::models::build_jcm_r(&p).unwrap();
        let psi = StateVector::tensor(&excited(), &crate::hilbert::coherent_state(real(1.0), p.fock()).unwrap()).unwrap();
        let grid = TimeGrid::new(50.0, 26).unwrap();
        let deph = DephasingModel::new(0.0, DephasingFrame::Jcm).unwrap();
        let mixed = evolve_lindblad(&h, &deph, &DensityMatrix::from_pure(&psi), &grid).unwrap();
        let pure = evolve_unitary(&h, &psi, &grid).unwrap();
        for (r, s) in mixed.iter().zip(&pure) {
            assert!(linalg::max_abs_diff(r.matrix(), &s.projector()) < 1e-10);
        }
    }

    #[test]
    fn heisenberg_matches_schrodinger() {
        let p = ModelParams::new(1.0, 0.0).with_cutoff(10);
        let h = crate::models::build_jcm_r(&p).unwrap();
        let deph = DephasingModel::new(0.05, DephasingFrame::Jcm).unwrap();
        let solver = LindbladSolver::new(&h, &deph).unwrap();
        let obs = lift_qubit(&qubit_ops().proj_g, p.fock()).unwrap();
        let psi = StateVector::tensor(&excited(), &number_state(2, p.fock()).unwrap()).unwrap();
        let grid = TimeGrid::new(20.0, 11).unwrap();
        let batch = solver.expectations(&obs, std::slice::from_ref(&psi), &grid).unwrap();
        let traj = solver.trajectory(&DensityMatrix::from_pure(&psi), &grid).unwrap();
        for (k, rho) in traj.iter().enumerate() {
            let direct = rho.expectation(&obs).unwrap().re;
            assert!((direct - batch[[0, k]]).abs() < 1e-12);
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_model_has_unit_fidelity() {
        let p = ModelParams::new(1.0, 0.3).with_cutoff(20);
        let psi = StateVector::tensor(&excited(), &number_state(1, p.fock()).unwrap()).unwrap();
        let grid = TimeGrid::new(50.0, 101).unwrap();
        let s = fidelity_vs_full(HamiltonianKind::Full, &p, &psi, &grid).unwrap();
        assert!(s.raw.iter().all(|f| (f - 1.0).abs() < 1e-10));
    }

    #[test]
    fn window_means_of_constant_and_cosine() {
        let grid = TimeGrid::new(10.0 * TAU, 401).unwrap();
        let t = grid.times();
        let ones = vec![0.7; t.len()];
        let m = window_means(&t, &ones, TAU).unwrap();
        assert_eq!(m.len(), 10);
        assert!(m.iter().all(|w| (w.value - 0.7).abs() < 1e-14));
        assert!((m[0].midpoint - TAU / 2.0).abs() < 1e-12);
        let cos: Vec<f64> = t.iter().map(|x| x.cos()).collect();
        assert!(window_means(&t, &cos, TAU).unwrap().iter().all(|w| w.value.abs() < 0.01));
        // trailing partial window is dropped
        assert_eq!(window_means(&t, &ones, 3.0 * TAU).unwrap().len(), 3);
        assert!(matches!(window_means(&t, &ones, 11.0 * TAU), Err(Error::WindowTooLarge { .. })));
    }

    #[test]
    fn coarse_window_count() {
        let p = ModelParams::new(0.1, 1.0).with_cutoff(4);
        let grid = TimeGrid::new(800.0, 1601).unwrap();
        let series = FidelitySeries {
            kind: HamiltonianKind::Rsb,
            times: grid.times(),
            raw: vec![1.0; 1601],
            window: None,
            coarse: vec![],
        };
        let c = coarse_grain(&series, &p).unwrap();
        assert_eq!(c.coarse.len(), (800.0 * 0.1 / TAU).floor() as usize);
        let zero = ModelParams { omega: 0.0, ..p };
        assert!(matches!(coarse_grain(&series, &zero), Err(Error::WindowTooLarge { .. })));
    }
}
