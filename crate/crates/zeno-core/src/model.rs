//! Hamiltonians and decoherence-free-subspace machinery: the non-Hermitian
//! conditional Hamiltonian, laser driving, the DFS basis and its Zeno
//! effective Hamiltonian, jump channels, and the V-configuration analogue.

use alloc::vec::Vec;

use crate::hilbert::{
    annihilation_operator, atomic_transition, number_operator, projector_from_states, BasisLabel,
    Operator, SpaceConfig, StateVector,
};
use crate::{dynamics, linalg, Error, Result, C64};

/// Physical rates in units of the atom–cavity coupling `g` (so `g = 1` by
/// convention; keeping it explicit lets regime ratios read naturally).
///
/// Decay terms enter the conditional Hamiltonian as amplitude rates, exactly
/// as `−iκ b†b` and `−iΓ_cav Σᵢ|2⟩ᵢ⟨2|`: populations decay at `2κ` and
/// `2Γ_cav`. The literature is split between this and the `Γ/2` convention,
/// so all tests and outputs of this crate assume the amplitude-rate form.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SystemParams {
    /// Atom–cavity coupling (both atoms share the same `g`).
    pub g: f64,
    /// Cavity field decay rate `κ`.
    pub kappa: f64,
    /// In-cavity spontaneous emission amplitude rate `Γ_cav`.
    pub gamma_cav: f64,
}

impl SystemParams {
    pub fn new(g: f64, kappa: f64, gamma_cav: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::InvalidParameter("g must be positive and finite"));
        }
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(Error::InvalidParameter("kappa must be nonnegative"));
        }
        if !gamma_cav.is_finite() || gamma_cav < 0.0 {
            return Err(Error::InvalidParameter("gamma_cav must be nonnegative"));
        }
        Ok(SystemParams {
            g,
            kappa,
            gamma_cav,
        })
    }
}

/// Complex Rabi frequencies `Ω_j^(i)` for the `j–2` transition of atom `i`,
/// plus the pulse duration.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LaserPulse {
    omega: [[C64; 2]; 2],
    pub duration: f64,
}

impl LaserPulse {
    /// `omega[j][i-1]` is `Ω_j^(i)`, `j ∈ {0, 1}`, `i ∈ {1, 2}`.
    pub fn new(omega: [[C64; 2]; 2], duration: f64) -> Result<Self> {
        for row in &omega {
            for z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::InvalidParameter("Rabi frequency must be finite"));
                }
            }
        }
        if !duration.is_finite() || duration < 0.0 {
            return Err(Error::InvalidParameter("pulse duration must be nonnegative"));
        }
        Ok(LaserPulse { omega, duration })
    }

    /// `Ω_j^(i)` for transition `j ∈ {0, 1}` of atom `i ∈ {1, 2}`.
    pub fn omega(&self, j: usize, atom: usize) -> C64 {
        self.omega[j][atom - 1]
    }

    /// Largest Rabi magnitude, the frequency scale of the drive.
    pub fn max_rabi(&self) -> f64 {
        self.omega
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Parameters of the three-level V-configuration reference system: a weak
/// drive `Ω_w` on the ground–metastable transition and a strong drive `Ω_s`
/// on the ground–fast transition, whose upper level decays at `Γ_s`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct VSystemParams {
    pub omega_w: C64,
    pub omega_s: C64,
    pub gamma_s: f64,
}

impl VSystemParams {
    pub fn new(omega_w: C64, omega_s: C64, gamma_s: f64) -> Result<Self> {
        if !gamma_s.is_finite() || gamma_s <= 0.0 {
            return Err(Error::InvalidParameter("gamma_s must be positive"));
        }
        if omega_w.norm() >= omega_s.norm() {
            return Err(Error::InvalidParameter(
                "dark-period regime requires |omega_w| < |omega_s|",
            ));
        }
        Ok(VSystemParams {
            omega_w,
            omega_s,
            gamma_s,
        })
    }
}

/// V-system basis indices: ground, metastable, fast-decaying.
pub const V_GROUND: usize = 0;
pub const V_METASTABLE: usize = 1;
pub const V_FAST: usize = 2;

/// A decay channel with its rate folded into the operator, `c = √(2·rate)·σ`,
/// so that `H_cond = H_herm − (i/2) Σ c†c` reproduces the anti-Hermitian part
/// of the conditional Hamiltonian exactly.
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub operator: Operator,
    /// Confirms the rate normalization above; always true for channels built
    /// by this crate.
    pub rate_absorbed: bool,
}

/// Conditional Hamiltonian (`ħ = 1`):
///
/// ```text
/// H = i g Σᵢ (b|2⟩ᵢ⟨1| − h.c.) − i Γ_cav Σᵢ |2⟩ᵢ⟨2| − i κ b†b
/// ```
///
/// The coupling part is Hermitian; the decay part is anti-Hermitian and
/// encodes every photon-emission channel.
pub fn conditional_hamiltonian(params: SystemParams, space: SpaceConfig) -> Operator {
    let b = annihilation_operator(space);
    let dim = space.dim();
    let mut h = Operator::zeros(dim);
    let ig = C64::new(0.0, params.g);
    for atom in [1, 2] {
        let raise = atomic_transition(atom, 2, 1, space).expect("valid atom index and levels");
        let coupling = b.matmul(&raise);
        h = h.add(&coupling.sub(&coupling.adjoint()).scaled(ig));
        if params.gamma_cav != 0.0 {
            let excited = atomic_transition(atom, 2, 2, space).expect("valid atom index");
            h = h.add(&excited.scaled(C64::new(0.0, -params.gamma_cav)));
        }
    }
    h.add(&number_operator(space).scaled(C64::new(0.0, -params.kappa)))
}

/// Laser Hamiltonian `H = (1/2) Σᵢ Σⱼ (Ω_j^(i) |j⟩ᵢ⟨2| + h.c.)`, identity on
/// the cavity factor. Hermitian for any complex Rabi frequencies.
pub fn laser_hamiltonian(pulse: &LaserPulse, space: SpaceConfig) -> Operator {
    let mut h = Operator::zeros(space.dim());
    let half = C64::new(0.5, 0.0);
    for atom in [1, 2] {
        for j in [0u8, 1u8] {
            let om = pulse.omega(j as usize, atom);
            if om.norm_sqr() == 0.0 {
                continue;
            }
            let lower = atomic_transition(atom, j, 2, space).expect("valid atom index and levels");
            h = h.add(&lower.scaled(half * om));
            h = h.add(&lower.adjoint().scaled(half * om.conj()));
        }
    }
    h
}

/// Collective lowering operator `J₋ = Σᵢ |1⟩ᵢᵢ⟨2|`; a zero-photon state is
/// decoherence-free (for `Γ_cav = 0`) iff `J₋` annihilates its atomic part.
pub fn collective_lowering(space: SpaceConfig) -> Operator {
    let s1 = atomic_transition(1, 1, 2, space).expect("valid");
    let s2 = atomic_transition(2, 1, 2, space).expect("valid");
    s1.add(&s2)
}

/// The trapped two-atom state `|0, a⟩` with `|a⟩ = (|12⟩ − |21⟩)/√2`, a
/// maximally entangled state annihilated by `J₋`.
pub fn trapped_state(space: SpaceConfig) -> StateVector {
    let inv_sqrt2 = C64::new(1.0 / libm::sqrt(2.0), 0.0);
    let plus = StateVector::basis_state(space, BasisLabel::new(0, 1, 2)).expect("n_max >= 1");
    let minus = StateVector::basis_state(space, BasisLabel::new(0, 2, 1)).expect("n_max >= 1");
    plus.sub(&minus).scaled(inv_sqrt2)
}

/// The five-state decoherence-free basis for `Γ_cav = 0`:
/// `{|000⟩, |001⟩, |010⟩, |011⟩, |0a⟩}` in that order.
///
/// Every member has zero photons and is annihilated by `J₋`. The basis is
/// fixed analytically (stable phase conventions); the numerical kernel of the
/// stacked `(b†b, J₋)` constraints reproduces its span.
pub fn dfs_basis(space: SpaceConfig) -> Vec<StateVector> {
    let mut out = Vec::with_capacity(5);
    for (j1, j2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        out.push(
            StateVector::basis_state(space, BasisLabel::new(0, j1, j2)).expect("ground labels"),
        );
    }
    out.push(trapped_state(space));
    out
}

/// Dynamic DFS membership check: true iff the no-emission probability stays
/// at least `1 − tol` over `[0, horizon]` under conditional evolution.
///
/// The check samples the conditionally evolved norm on a uniform grid fine
/// enough that no decay channel can act unseen between samples.
pub fn is_decoherence_free(
    psi: &StateVector,
    params: SystemParams,
    space: SpaceConfig,
    horizon: f64,
    tol: f64,
) -> Result<bool> {
    let norm_sq = psi.norm_sq();
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sq });
    }
    if psi.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            actual: psi.dim(),
        });
    }
    let h = conditional_hamiltonian(params, space);
    let checkpoints = 64usize;
    let dt = horizon / checkpoints as f64;
    let step = linalg::expm(&h.scaled(C64::new(0.0, -dt)));
    let mut state = psi.clone();
    for _ in 0..checkpoints {
        state = step.apply(&state);
        let p0 = dynamics::no_emission_probability(&state)?;
        if p0 < 1.0 - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Zeno effective Hamiltonian `P H P` expressed in a given orthonormal basis
/// of the projected subspace, together with that basis for re-embedding.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    reduced: Operator,
    basis: Vec<StateVector>,
}

impl EffectiveHamiltonian {
    /// The `k×k` matrix `⟨e_r| H |e_c⟩`.
    pub fn reduced(&self) -> &Operator {
        &self.reduced
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// The same operator written back in the full space, `Σ M_rc |e_r⟩⟨e_c|`.
    pub fn embedded(&self) -> Operator {
        let dim = self.basis[0].dim();
        let k = self.basis.len();
        let mut out = Operator::zeros(dim);
        for r in 0..k {
            for c in 0..k {
                let m = self.reduced.get(r, c);
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                for row in 0..dim {
                    let ar = self.basis[r].amp(row);
                    if ar.norm_sqr() == 0.0 {
                        continue;
                    }
                    for col in 0..dim {
                        out.add_assign_at(row, col, m * ar * self.basis[c].amp(col).conj());
                    }
                }
            }
        }
        out
    }
}

/// Project `h_total` onto the span of `dfs` (Zeno dynamics): returns the
/// matrix of `P H P` in that basis. Hermitian whenever the anti-Hermitian
/// part of `h_total` annihilates the subspace.
pub fn effective_hamiltonian(
    h_total: &Operator,
    dfs: &[StateVector],
) -> Result<EffectiveHamiltonian> {
    // Reuse the projector's orthonormality validation.
    projector_from_states(dfs)?;
    if dfs[0].dim() != h_total.dim() {
        return Err(Error::DimensionMismatch {
            expected: h_total.dim(),
            actual: dfs[0].dim(),
        });
    }
    let k = dfs.len();
    let mut reduced = Operator::zeros(k);
    for (c, ec) in dfs.iter().enumerate() {
        let h_ec = h_total.apply(ec);
        for (r, er) in dfs.iter().enumerate() {
            reduced.set(r, c, crate::hilbert::inner_product(er, &h_ec)?);
        }
    }
    Ok(EffectiveHamiltonian {
        reduced,
        basis: dfs.to_vec(),
    })
}

/// Jump channels consistent with the conditional Hamiltonian:
/// `√(2κ)·b` for the cavity, and for each atom the spontaneous channels
/// `√(2βΓ_cav)|1⟩ᵢ⟨2|` and `√(2(1−β)Γ_cav)|0⟩ᵢ⟨2|`.
///
/// `branching` is the probability β that a spontaneous decay from `|2⟩` lands
/// on `|1⟩` (the cavity-coupled level). Channels with zero rate are omitted.
/// Channel order: cavity, then atom 1 (β then 1−β), then atom 2.
pub fn jump_channels(
    params: SystemParams,
    branching: f64,
    space: SpaceConfig,
) -> Result<Vec<JumpChannel>> {
    if !(0.0..=1.0).contains(&branching) {
        return Err(Error::InvalidParameter("branching ratio must lie in [0, 1]"));
    }
    let mut channels = Vec::new();
    if params.kappa > 0.0 {
        channels.push(JumpChannel {
            operator: annihilation_operator(space)
                .scaled(C64::new(libm::sqrt(2.0 * params.kappa), 0.0)),
            rate_absorbed: true,
        });
    }
    if params.gamma_cav > 0.0 {
        for atom in [1, 2] {
            for (level, weight) in [(1u8, branching), (0u8, 1.0 - branching)] {
                if weight == 0.0 {
                    continue;
                }
                let rate = 2.0 * weight * params.gamma_cav;
                channels.push(JumpChannel {
                    operator: atomic_transition(atom, level, 2, space)
                        .expect("valid levels")
                        .scaled(C64::new(libm::sqrt(rate), 0.0)),
                    rate_absorbed: true,
                });
            }
        }
    }
    Ok(channels)
}

/// Reconstruct `−(i/2) Σ c†c` from a channel list; by construction this must
/// equal the anti-Hermitian part of the conditional Hamiltonian.
pub fn dissipator_from_channels(channels: &[JumpChannel], dim: usize) -> Operator {
    let mut sum = Operator::zeros(dim);
    for ch in channels {
        sum = sum.add(&ch.operator.adjoint().matmul(&ch.operator));
    }
    sum.scaled(C64::new(0.0, -0.5))
}

/// Conditional Hamiltonian of the V-configuration atom on the basis
/// `{ground, metastable, fast}`:
///
/// ```text
/// H = (1/2)(Ω_w |g⟩⟨m| + Ω_s |g⟩⟨s| + h.c.) − i Γ_s |s⟩⟨s|
/// ```
///
/// The decay term uses the same amplitude-rate convention as
/// [`conditional_hamiltonian`] (no factor 1/2 on `Γ_s`).
pub fn v_system_hamiltonian(p: VSystemParams) -> Operator {
    let mut h = Operator::zeros(3);
    let half = C64::new(0.5, 0.0);
    h.set(V_GROUND, V_METASTABLE, half * p.omega_w);
    h.set(V_METASTABLE, V_GROUND, half * p.omega_w.conj());
    h.set(V_GROUND, V_FAST, half * p.omega_s);
    h.set(V_FAST, V_GROUND, half * p.omega_s.conj());
    h.set(V_FAST, V_FAST, C64::new(0.0, -p.gamma_s));
    h
}

/// The single jump channel of the V system, `√(2Γ_s)|g⟩⟨s|`.
pub fn v_system_jump_channel(p: VSystemParams) -> JumpChannel {
    let mut op = Operator::zeros(3);
    op.set(V_GROUND, V_FAST, C64::new(libm::sqrt(2.0 * p.gamma_s), 0.0));
    JumpChannel {
        operator: op,
        rate_absorbed: true,
    }
}
