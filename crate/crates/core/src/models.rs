//! Trapped-ion Hamiltonians and the unitary frame changes that relate them.
//!
//! Every frequency is measured in units of the trap frequency `nu` unless a
//! caller overrides it. Operators act on `qubit ⊗ Fock(cutoff)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, displacement, lift_motion, lift_qubit, number_operator, qubit_ops, tensor,
    FockSpace, Operator, Space,
};
use crate::linalg::{real, I};

/// Physical parameters of a single driven ion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Trap frequency.
    pub nu: f64,
    /// Detuning `omega_0 - omega_L`.
    pub delta: f64,
    /// Rabi frequency.
    pub omega: f64,
    /// Lamb-Dicke parameter.
    pub eta: f64,
    /// Fock cutoff.
    pub cutoff: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { nu: 1.0, delta: 0.0, omega: 1.0, eta: 0.05, cutoff: 50 }
    }
}

impl ModelParams {
    /// Parameters with the given Rabi frequency and detuning and default
    /// `nu = 1`, `eta = 0.05`, `cutoff = 50`.
    pub fn new(omega: f64, delta: f64) -> Self {
        Self { omega, delta, ..Self::default() }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nu, self.delta, self.omega, self.eta].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        if self.nu <= 0.0 {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {}", self.nu)));
        }
        if self.eta < 0.0 {
            return Err(Error::InvalidParameter(format!("eta must be non-negative, got {}", self.eta)));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be non-negative, got {}",
                self.omega
            )));
        }
        if self.cutoff < 2 {
            return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {}", self.cutoff)));
        }
        Ok(())
    }

    pub fn fock(&self) -> FockSpace {
        FockSpace::new(self.cutoff).expect("validated cutoff")
    }

    pub fn space(&self) -> Space {
        Space::Composite(self.fock())
    }

    pub fn omega_tilde(&self) -> OmegaTilde {
        OmegaTilde::new(self.omega, self.delta)
    }
}

/// Dressed qubit splitting `sqrt(omega^2 + delta^2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OmegaTilde(f64);

impl OmegaTilde {
    pub fn new(omega: f64, delta: f64) -> Self {
        OmegaTilde(omega.hypot(delta))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The frame an effective Hamiltonian is written in, relative to the lab.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    Lab,
    /// Rotated by the qubit-only transform `R`.
    R,
    /// Rotated by the displacement-entangling transform `T(i eta / 2)`.
    T,
    /// `U T`, with `U` diagonalizing the dressed qubit.
    UT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HamiltonianKind {
    Full,
    LambDicke,
    Rsb,
    JcmR,
    Mc,
    Tsrwa,
}

impl HamiltonianKind {
    pub const ALL: [HamiltonianKind; 6] = [
        HamiltonianKind::Full,
        HamiltonianKind::LambDicke,
        HamiltonianKind::Rsb,
        HamiltonianKind::JcmR,
        HamiltonianKind::Mc,
        HamiltonianKind::Tsrwa,
    ];

    pub fn frame(&self) -> Frame {
        match self {
            HamiltonianKind::Full | HamiltonianKind::LambDicke | HamiltonianKind::Rsb => Frame::Lab,
            HamiltonianKind::JcmR => Frame::R,
            HamiltonianKind::Mc => Frame::T,
            HamiltonianKind::Tsrwa => Frame::UT,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::Full => "full",
            HamiltonianKind::LambDicke => "lamb_dicke",
            HamiltonianKind::Rsb => "rsb",
            HamiltonianKind::JcmR => "jcm_r",
            HamiltonianKind::Mc => "mc",
            HamiltonianKind::Tsrwa => "tsrwa",
        }
    }
}

impl fmt::Display for HamiltonianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HamiltonianKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown Hamiltonian kind '{s}'")))
    }
}

/// Frequently used lifted operators on the composite space.
struct Ops {
    num: Operator,
    sz: Operator,
    sx: Operator,
    /// `σ+ a - σ- a†`
    jc: Operator,
    /// `σ- a - σ+ a†`
    anti_jc: Operator,
    /// `a - a†`
    a_minus_ad: Operator,
    /// `a + a†`
    a_plus_ad: Operator,
    sp_minus_sm: Operator,
}

impl Ops {
    fn new(fock: FockSpace) -> Self {
        let q = qubit_ops();
        let a = annihilation(fock);
        let ad = a.dagger();
        let sp_a = tensor(&q.sp, &a).unwrap();
        let sm_ad = tensor(&q.sm, &ad).unwrap();
        let sm_a = tensor(&q.sm, &a).unwrap();
        let sp_ad = tensor(&q.sp, &ad).unwrap();
        Ops {
            num: lift_motion(&number_operator(fock)).unwrap(),
            sz: lift_qubit(&q.sz, fock).unwrap(),
            sx: lift_qubit(&q.sx, fock).unwrap(),
            jc: sp_a.sub(&sm_ad).unwrap(),
            anti_jc: sm_a.sub(&sp_ad).unwrap(),
            a_minus_ad: lift_motion(&a.sub(&ad).unwrap()).unwrap(),
            a_plus_ad: lift_motion(&a.add(&ad).unwrap()).unwrap(),
            sp_minus_sm: lift_qubit(&q.sp.sub(&q.sm).unwrap(), fock).unwrap(),
        }
    }
}

/// Weighted sum of same-space operators.
fn combine(terms: &[(C64, &Operator)]) -> Operator {
    let mut acc = Operator::zeros(terms[0].1.space());
    for (c, op) in terms {
        acc = acc.add(&op.scale(*c)).expect("same space");
    }
    acc
}

/// `nu a†a + (s/2) σz`
fn free_part(ops: &Ops, nu: f64, qubit_splitting: f64) -> Operator {
    combine(&[(real(nu), &ops.num), (real(qubit_splitting / 2.0), &ops.sz)])
}

/// Complete ion-laser Hamiltonian
/// `nu a†a + (delta/2) σz + (Omega/2)(σ+ D(i eta) + σ- D†(i eta))`.
pub fn build_full(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let fock = p.fock();
    let q = qubit_ops();
    let ops = Ops::new(fock);
    let d = displacement(C64::new(0.0, p.eta), fock)?;
    let coupling = tensor(&q.sp, &d)?.add(&tensor(&q.sm, &d.dagger())?)?;
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, p.delta)),
        (real(p.omega / 2.0), &coupling),
    ]))
}

/// First order in `eta`:
/// `nu a†a + (delta/2) σz + (Omega/2) σx + (i eta Omega/2)(σ+ - σ-)(a + a†)`.
pub fn build_lamb_dicke(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    let side = ops.sp_minus_sm.mul(&ops.a_plus_ad)?;
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, p.delta)),
        (real(p.omega / 2.0), &ops.sx),
        (I * (p.eta * p.omega / 2.0), &side),
    ]))
}

/// First red sideband: `nu a†a + (delta/2) σz + (i eta Omega/2)(σ+ a - σ- a†)`.
pub fn build_rsb(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, p.delta)),
        (I * (p.eta * p.omega / 2.0), &ops.jc),
    ]))
}

/// Resonant strong-drive JCM in the `R` frame:
/// `nu a†a + (Omega/2) σz + (i eta Omega/2)(σ+ a - σ- a†)`.
///
/// Intended for `Omega = nu`, `delta = 0`; not enforced.
pub fn build_jcm_r(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, p.omega)),
        (I * (p.eta * p.omega / 2.0), &ops.jc),
    ]))
}

/// JCM in the `T` frame after a RWA at `Omega = nu`:
/// `nu a†a + (Omega/2) σz + (i eta nu/2)(σ+ a - σ- a†)`.
pub fn build_mc(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, p.omega)),
        (I * (p.eta * p.nu / 2.0), &ops.jc),
    ]))
}

/// JCM in the `UT` frame after diagonalizing the dressed qubit and a RWA at
/// `omega_tilde = nu`:
/// `nu a†a + (ω̃/2) σz + (i Omega eta nu / (2 ω̃))(σ+ a - σ- a†)`.
pub fn build_tsrwa(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let wt = nondegenerate_omega_tilde(p)?;
    let ops = Ops::new(p.fock());
    Ok(combine(&[
        (real(1.0), &free_part(&ops, p.nu, wt)),
        (I * (p.omega * p.eta * p.nu / (2.0 * wt)), &ops.jc),
    ]))
}

pub fn build(kind: HamiltonianKind, p: &ModelParams) -> Result<Operator> {
    match kind {
        HamiltonianKind::Full => build_full(p),
        HamiltonianKind::LambDicke => build_lamb_dicke(p),
        HamiltonianKind::Rsb => build_rsb(p),
        HamiltonianKind::JcmR => build_jcm_r(p),
        HamiltonianKind::Mc => build_mc(p),
        HamiltonianKind::Tsrwa => build_tsrwa(p),
    }
}

fn nondegenerate_omega_tilde(p: &ModelParams) -> Result<f64> {
    let wt = p.omega_tilde().value();
    if !(wt > 0.0) {
        return Err(Error::DegenerateParams("omega = delta = 0 leaves the dressed qubit undefined".into()));
    }
    Ok(wt)
}

/// Qubit-only `R = (1/√2)[[1, 1], [-1, 1]]`.
pub fn r_qubit() -> Operator {
    let s = real(std::f64::consts::FRAC_1_SQRT_2);
    Operator::new(Space::Qubit, ndarray::arr2(&[[s, s], [-s, s]])).expect("2x2")
}

/// `R ⊗ I_N`.
pub fn build_r_transform(fock: FockSpace) -> Operator {
    lift_qubit(&r_qubit(), fock).expect("qubit ⊗ Fock")
}

/// `T(beta) = (1/√2)[[D†(beta), D(beta)], [-D†(beta), D(beta)]]` with
/// `beta = i eta / 2`, in qubit-block form.
pub fn build_t_transform(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let fock = p.fock();
    let q = qubit_ops();
    let d = displacement(C64::new(0.0, p.eta / 2.0), fock)?;
    let dd = d.dagger();
    let h = real(std::f64::consts::FRAC_1_SQRT_2);
    // |e><e| D† + |e><g| D - |g><e| D† + |g><g| D
    let blocks = [
        (h, tensor(&q.proj_e, &dd)?),
        (h, tensor(&q.sp, &d)?),
        (-h, tensor(&q.sm, &dd)?),
        (h, tensor(&q.proj_g, &d)?),
    ];
    let refs: Vec<(C64, &Operator)> = blocks.iter().map(|(c, o)| (*c, o)).collect();
    Ok(combine(&refs))
}

/// Qubit rotation taking `(Omega/2) σz - (delta/2) σx` to `(ω̃/2) σz`.
pub fn u_qubit(p: &ModelParams) -> Result<Operator> {
    let wt = nondegenerate_omega_tilde(p)?;
    let plus = (wt + p.omega).sqrt();
    // the off-diagonal sign follows delta so negative detunings diagonalize too
    let minus = (wt - p.omega).max(0.0).sqrt() * if p.delta < 0.0 { -1.0 } else { 1.0 };
    let s = 1.0 / (2.0 * wt).sqrt();
    Operator::new(
        Space::Qubit,
        ndarray::arr2(&[[real(s * plus), real(-s * minus)], [real(s * minus), real(s * plus)]]),
    )
}

/// `U ⊗ I_N`.
pub fn build_u_transform(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    lift_qubit(&u_qubit(p)?, p.fock())
}

/// The unitary `G` taking lab-frame states into the frame of `kind`, so that
/// the effective Hamiltonian approximates `G H_full G†`.
pub fn frame_chain(kind: HamiltonianKind, p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    match kind.frame() {
        Frame::Lab => Ok(Operator::identity(p.space())),
        Frame::R => Ok(build_r_transform(p.fock())),
        Frame::T => build_t_transform(p),
        Frame::UT => build_u_transform(p)?.mul(&build_t_transform(p)?),
    }
}

/// `sqrt(nu^2 - delta^2)`: the Rabi frequency that puts `ω̃` on resonance
/// with the trap.
pub fn resonant_omega(delta: f64, nu: f64) -> Result<f64> {
    if !(delta.abs() < nu) {
        return Err(Error::OutOfRange(format!("|delta| = {} must be below nu = {nu}", delta.abs())));
    }
    Ok((nu * nu - delta * delta).sqrt())
}

/// Constant energy `nu |beta|^2 = nu eta^2 / 4` picked up by `nu a†a` under
/// `T(i eta / 2)`. It only contributes a global phase.
pub fn t_frame_energy_shift(p: &ModelParams) -> f64 {
    p.nu * p.eta * p.eta / 4.0
}

/// `R H_LD R†` written out:
/// `nu a†a + (Omega/2) σz - (delta/2) σx + (i eta Omega/2)(σ+ - σ-)(a + a†)`.
/// At `delta = 0` this is the rotated Lamb-Dicke Hamiltonian before the RWA.
pub fn lamb_dicke_r_frame(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    let side = ops.sp_minus_sm.mul(&ops.a_plus_ad)?;
    Ok(combine(&[
        (real(p.nu), &ops.num),
        (real(p.omega / 2.0), &ops.sz),
        (real(-p.delta / 2.0), &ops.sx),
        (I * (p.eta * p.omega / 2.0), &side),
    ]))
}

/// `T H_full T†` written out:
/// `nu a†a + (Omega/2) σz - (delta/2) σx + (i eta nu/2) σx (a - a†) + nu eta^2/4`.
pub fn full_t_frame(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let ops = Ops::new(p.fock());
    let coupling = ops.sx.mul(&ops.a_minus_ad)?;
    let shift = Operator::identity(p.space());
    Ok(combine(&[
        (real(p.nu), &ops.num),
        (real(p.omega / 2.0), &ops.sz),
        (real(-p.delta / 2.0), &ops.sx),
        (I * (p.eta * p.nu / 2.0), &coupling),
        (real(t_frame_energy_shift(p)), &shift),
    ]))
}

/// `U T H_full T† U†` written out:
/// `nu a†a + (ω̃/2) σz - (i delta eta nu/(2ω̃)) σz (a - a†)
///  + (i Omega eta nu/(2ω̃)) σx (a - a†) + nu eta^2/4`.
pub fn full_ut_frame(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    let wt = nondegenerate_omega_tilde(p)?;
    let ops = Ops::new(p.fock());
    let z_coupling = ops.sz.mul(&ops.a_minus_ad)?;
    let x_coupling = ops.sx.mul(&ops.a_minus_ad)?;
    let shift = Operator::identity(p.space());
    Ok(combine(&[
        (real(p.nu), &ops.num),
        (real(wt / 2.0), &ops.sz),
        (I * (-p.delta * p.eta * p.nu / (2.0 * wt)), &z_coupling),
        (I * (p.omega * p.eta * p.nu / (2.0 * wt)), &x_coupling),
        (real(t_frame_energy_shift(p)), &shift),
    ]))
}

/// The two operators discarded when passing from the `UT`-frame Hamiltonian
/// to [`build_tsrwa`].
#[derive(Debug, Clone)]
pub struct NeglectedTerms {
    /// `-(i delta eta nu/(2ω̃)) σz (a - a†)`
    pub dispersive: Operator,
    /// `(i Omega eta nu/(2ω̃)) (σ- a - σ+ a†)`
    pub counter_rotating: Operator,
}

impl NeglectedTerms {
    pub fn sum(&self) -> Operator {
        self.dispersive.add(&self.counter_rotating).expect("same space")
    }
}

pub fn neglected_terms(p: &ModelParams) -> Result<NeglectedTerms> {
    p.validate()?;
    let wt = nondegenerate_omega_tilde(p)?;
    let ops = Ops::new(p.fock());
    let z_coupling = ops.sz.mul(&ops.a_minus_ad)?;
    Ok(NeglectedTerms {
        dispersive: z_coupling.scale(I * (-p.delta * p.eta * p.nu / (2.0 * wt))),
        counter_rotating: ops.anti_jc.scale(I * (p.omega * p.eta * p.nu / (2.0 * wt))),
    })
}

/// The conserved excitation number `a†a + σz/2` of the JCM-type models.
pub fn excitation_number(fock: FockSpace) -> Operator {
    let ops = Ops::new(fock);
    combine(&[(real(1.0), &ops.num), (real(0.5), &ops.sz)])
}
