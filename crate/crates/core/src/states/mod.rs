//! Supercoherent states: eigenstates `Â|Z⟩ = z0|Z⟩` of the SAO.
//!
//! Closed-form states are stored as short lists of coherent terms per
//! component. The lower component holds the coefficients `c_{m+1}` of the
//! bosonic state `|m⟩`, so a lower-component coherent term `w|β⟩` stands for
//! `c_{m+1} = w β^m / √(m!)`.
//!
//! All constructors evaluate at `z = z0·e^{-iωt}`: a state at time `t` is the
//! state at time zero with the eigenvalue rotated. Normalization follows the
//! unnormalized convention `⟨β|β⟩ = e^{|β|²}`.
//!
//! Change of basis in the generic region (for `k1 ≠ 0`): reading off the
//! free parameters `a0` (upper `|0⟩`) and `c1` (lower `|0⟩`),
//! `Z_A ↔ (a0, c1) = (k1, 0)`, `Z_C ↔ (0, k1 z)` and
//! `Z± ↔ (k2 χ±, (χ± - k1) z)`, hence
//! `Z± = (k2 χ± / k1)·Z_A + ((χ± - k1) / k1)·Z_C`.

mod fock;

pub use fock::{
    apply_sao, fock_solve, fock_solve_seeded, to_fock, to_fock_fixed, to_fock_with_cap, FockExpansion, FockSeed,
    DEFAULT_FOCK_CAP,
};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SusyError};
use crate::sao::{eigen_decompose, KMatrix, Region, Spectrum};

/// `w|β⟩`, or `w|β′⟩ = w·a⁺|β⟩` when `derivative` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherentTerm {
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub weight: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub beta: C64,
    pub derivative: bool,
}

impl CoherentTerm {
    pub fn coherent(weight: C64, beta: C64) -> Self {
        Self {
            weight,
            beta,
            derivative: false,
        }
    }

    pub fn derivative(weight: C64, beta: C64) -> Self {
        Self {
            weight,
            beta,
            derivative: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StateLabel {
    ZA,
    ZC,
    Zplus,
    Zminus,
    ZAd,
    ZCd,
    ZMUSd,
    Zs,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperState {
    pub upper: Vec<CoherentTerm>,
    pub lower: Vec<CoherentTerm>,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub z0: C64,
    pub t: f64,
    pub omega: f64,
    pub k: KMatrix,
    pub label: StateLabel,
}

/// `z0·e^{-iωt}`.
pub fn evolve(z0: C64, t: f64, omega: f64) -> C64 {
    z0 * C64::from_polar(1.0, -omega * t)
}

impl SuperState {
    /// Eigenvalue at the state's time, `z = z0·e^{-iωt}`.
    pub fn z(&self) -> C64 {
        evolve(self.z0, self.t, self.omega)
    }

    pub fn components(&self) -> [&[CoherentTerm]; 2] {
        [&self.upper, &self.lower]
    }

    /// Largest `|β|` over all terms.
    pub fn max_beta(&self) -> f64 {
        self.upper
            .iter()
            .chain(&self.lower)
            .map(|t| t.beta.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> SuperState {
        let scale = |ts: &[CoherentTerm]| {
            ts.iter()
                .map(|t| CoherentTerm {
                    weight: t.weight * s,
                    ..*t
                })
                .collect()
        };
        SuperState {
            upper: scale(&self.upper),
            lower: scale(&self.lower),
            ..self.clone()
        }
    }

    /// `a·self + b·other`. Both states must be eigenstates of the same
    /// operator with the same evaluated eigenvalue.
    pub fn combine(&self, a: C64, other: &SuperState, b: C64) -> Result<SuperState> {
        if self.k != other.k || (self.z() - other.z()).norm() > 1e-12 * (1.0 + self.z().norm()) {
            return Err(SusyError::InvalidParameter(
                "superposition needs a shared operator and eigenvalue".into(),
            ));
        }
        let merge = |x: &[CoherentTerm], y: &[CoherentTerm]| {
            let mut out: Vec<CoherentTerm> = x
                .iter()
                .map(|t| CoherentTerm {
                    weight: t.weight * a,
                    ..*t
                })
                .collect();
            for t in y {
                let w = t.weight * b;
                match out
                    .iter_mut()
                    .find(|o| o.beta == t.beta && o.derivative == t.derivative)
                {
                    Some(o) => o.weight += w,
                    None => out.push(CoherentTerm { weight: w, ..*t }),
                }
            }
            out
        };
        Ok(SuperState {
            upper: merge(&self.upper, &other.upper),
            lower: merge(&self.lower, &other.lower),
            label: StateLabel::Mixed,
            ..self.clone()
        })
    }
}

fn wrong_region(expected: &'static str, sp: &Spectrum) -> SusyError {
    SusyError::WrongRegion {
        expected,
        found: sp.region.region,
    }
}

fn generic_spectrum(k: &KMatrix) -> Result<Spectrum> {
    let sp = eigen_decompose(k);
    if !sp.region.region.is_generic() {
        return Err(wrong_region("Generic", &sp));
    }
    Ok(sp)
}

fn state(
    k: &KMatrix,
    z0: C64,
    t: f64,
    label: StateLabel,
    upper: Vec<CoherentTerm>,
    lower: Vec<CoherentTerm>,
) -> SuperState {
    SuperState {
        upper,
        lower,
        z0,
        t,
        omega: k.omega(),
        k: *k,
        label,
    }
}

/// Basis `{Z_A, Z_C}` of the generic supercoherent space,
/// `Z_{A,C} = G_{A,C}·(|β+⟩, |β-⟩)ᵀ / (χ+ - χ-)` with `β± = z/χ±`.
pub fn generic_basis(k: &KMatrix, z0: C64, t: f64) -> Result<(SuperState, SuperState)> {
    let sp = generic_spectrum(k)?;
    let (cp, cm) = (sp.chi_plus, sp.chi_minus);
    let (k1, k2, k3, k4) = (k.k1(), k.k2(), k.k3(), k.k4());
    let z = evolve(z0, t, k.omega());
    let (bp, bm) = (z / cp, z / cm);
    let inv_gap = (cp - cm).inv();
    let coh = CoherentTerm::coherent;

    let za = state(
        k,
        z0,
        t,
        StateLabel::ZA,
        vec![coh(cp * (cp - k4) * inv_gap, bp), coh(-cm * (cm - k4) * inv_gap, bm)],
        vec![coh(k3 * z * inv_gap, bp), coh(-k3 * z * inv_gap, bm)],
    );
    let c0 = k1 * k1 + k2 * k3;
    let zc = state(
        k,
        z0,
        t,
        StateLabel::ZC,
        vec![coh(cp * cm * k2 * inv_gap, bp), coh(-cm * cp * k2 * inv_gap, bm)],
        vec![
            coh(z * (cp * k1 - c0) * inv_gap, bp),
            coh(-z * (cm * k1 - c0) * inv_gap, bm),
        ],
    );
    Ok((za, zc))
}

/// Canonical supercoherent state for the eigenvalue `chi` of `K`:
/// `(u|β⟩, w·β|β⟩)` where `(u, w)` is an eigenvector of `K` scaled by `χ`.
/// The `(k2, χ - k1)` eigenvector is used unless `k2` vanishes, in which case
/// the larger of it and `(χ - k4, k3)` is taken.
fn canonical_for(k: &KMatrix, chi: C64, z: C64, tol: f64) -> (C64, C64) {
    let (k1, k2, k3, k4) = (k.k1(), k.k2(), k.k3(), k.k4());
    let paper = (k2 * chi, (chi - k1) * z);
    if k2.norm() > tol * k.norm() {
        return paper;
    }
    let alt = (chi * (chi - k4), k3 * z);
    let n_paper = k2.norm_sqr() + (chi - k1).norm_sqr();
    let n_alt = (chi - k4).norm_sqr() + k3.norm_sqr();
    if n_alt > n_paper {
        alt
    } else {
        paper
    }
}

/// The two canonical supercoherent states spanning the generic space,
/// `Z± = (k2 χ± |β±⟩, (χ± - k1) z |β±⟩)`.
pub fn generic_mus_basis(k: &KMatrix, z0: C64, t: f64) -> Result<(SuperState, SuperState)> {
    let sp = generic_spectrum(k)?;
    let z = evolve(z0, t, k.omega());
    let tol = sp.region.classify_tol;
    let build = |chi: C64, label| {
        let beta = z / chi;
        let (u, v) = canonical_for(k, chi, z, tol);
        state(
            k,
            z0,
            t,
            label,
            vec![CoherentTerm::coherent(u, beta)],
            vec![CoherentTerm::coherent(v, beta)],
        )
    };
    Ok((
        build(sp.chi_plus, StateLabel::Zplus),
        build(sp.chi_minus, StateLabel::Zminus),
    ))
}

fn degenerate_spectrum(k: &KMatrix) -> Result<(Spectrum, C64)> {
    let sp = eigen_decompose(k);
    match sp.region.region {
        Region::Degenerate => Ok((sp, sp.chi_mean())),
        Region::Singular if sp.region.is_nilpotent() => Err(SusyError::Nilpotent),
        _ => Err(wrong_region("Degenerate", &sp)),
    }
}

/// Limit of `[g(χ+)|z/χ+⟩ - g(χ-)|z/χ-⟩] / (χ+ - χ-)` as `χ± → χ`:
/// `g′(χ)|β⟩ - g(χ) χ⁻¹ β |β′⟩`.
fn limit_terms(g: C64, g_prime: C64, chi: C64, beta: C64) -> Vec<CoherentTerm> {
    let mut out = Vec::with_capacity(2);
    if g_prime != C64::new(0.0, 0.0) {
        out.push(CoherentTerm::coherent(g_prime, beta));
    }
    if g != C64::new(0.0, 0.0) {
        out.push(CoherentTerm::derivative(-g * beta / chi, beta));
    }
    out
}

/// Basis `{Z_A^d, Z_C^d}` of the degenerate supercoherent space, obtained as
/// the coalescence limit of the generic basis. Components mix `|β⟩` and
/// `|β′⟩` with `β = z/χ`.
pub fn degenerate_basis(k: &KMatrix, z0: C64, t: f64) -> Result<(SuperState, SuperState)> {
    let (_, chi) = degenerate_spectrum(k)?;
    let (k1, k2, k3, k4) = (k.k1(), k.k2(), k.k3(), k.k4());
    let z = evolve(z0, t, k.omega());
    let beta = z / chi;
    let zero = C64::new(0.0, 0.0);

    // g_ij(x) and g_ij'(x) at x = χ
    let g_a1 = (chi * chi - k4 * chi, 2.0 * chi - k4);
    let g_a2 = (k3 * z, zero);
    let g_c1 = (chi * chi * k2, zero);
    let g_c2 = (z * (chi * k1 - (k1 * k1 + k2 * k3)), z * k1);

    let za = state(
        k,
        z0,
        t,
        StateLabel::ZAd,
        limit_terms(g_a1.0, g_a1.1, chi, beta),
        limit_terms(g_a2.0, g_a2.1, chi, beta),
    );
    let zc = state(
        k,
        z0,
        t,
        StateLabel::ZCd,
        limit_terms(g_c1.0, g_c1.1, chi, beta),
        limit_terms(g_c2.0, g_c2.1, chi, beta),
    );
    Ok((za, zc))
}

/// The canonical supercoherent state of the degenerate region,
/// `(-k1 k2 χ |β⟩, k1 (k1² - k4²)/4 · β |β⟩)`.
///
/// That form vanishes identically at `k1 = 0`; there the equivalent
/// `(k2 χ |β⟩, (χ - k1) z |β⟩)` is returned instead.
pub fn degenerate_mus(k: &KMatrix, z0: C64, t: f64) -> Result<SuperState> {
    let (sp, chi) = degenerate_spectrum(k)?;
    let (k1, k2, k4) = (k.k1(), k.k2(), k.k4());
    let z = evolve(z0, t, k.omega());
    let beta = z / chi;
    let (u, v) = if k1.norm() > sp.region.classify_tol * k.norm() {
        (-k1 * k2 * chi, k1 * (k1 * k1 - k4 * k4) / 4.0 * beta)
    } else {
        canonical_for(k, chi, z, sp.region.classify_tol)
    };
    Ok(state(
        k,
        z0,
        t,
        StateLabel::ZMUSd,
        vec![CoherentTerm::coherent(u, beta)],
        vec![CoherentTerm::coherent(v, beta)],
    ))
}

/// The single supercoherent ray of the singular region,
/// `Z_s = (k2 |β⟩, k4 β |β⟩)` with `β = z/(k1 + k4)`; falls back to the
/// proportional `(k1 |β⟩, k3 β |β⟩)` when `k2 = k4 = 0`.
pub fn singular_state(k: &KMatrix, z0: C64, t: f64) -> Result<SuperState> {
    let sp = eigen_decompose(k);
    if sp.region.region != Region::Singular {
        return Err(wrong_region("Singular", &sp));
    }
    if sp.region.is_nilpotent() {
        return Err(SusyError::Nilpotent);
    }
    let (k1, k2, k3, k4) = (k.k1(), k.k2(), k.k3(), k.k4());
    let z = evolve(z0, t, k.omega());
    let beta = z / k.trace();
    let right = k2.norm_sqr() + k4.norm_sqr();
    let left = k1.norm_sqr() + k3.norm_sqr();
    let (u, w) = if right.sqrt() > sp.region.classify_tol * k.norm() || right >= left {
        (k2, k4)
    } else {
        (k1, k3)
    };
    Ok(state(
        k,
        z0,
        t,
        StateLabel::Zs,
        vec![CoherentTerm::coherent(u, beta)],
        vec![CoherentTerm::coherent(w * beta, beta)],
    ))
}

/// `cos η · Z+ + e^{iλ} sin η · Z-` in the generic region.
pub fn mixed_state(k: &KMatrix, z0: C64, t: f64, eta: f64, lambda: f64) -> Result<SuperState> {
    let (zp, zm) = generic_mus_basis(k, z0, t)?;
    let a = C64::new(eta.cos(), 0.0);
    let b = C64::from_polar(eta.sin(), lambda);
    let weighted = |t: &CoherentTerm, c: C64| CoherentTerm {
        weight: t.weight * c,
        ..*t
    };
    // kept as four terms even when cos η or sin η vanishes
    let upper = vec![weighted(&zp.upper[0], a), weighted(&zm.upper[0], b)];
    let lower = vec![weighted(&zp.lower[0], a), weighted(&zm.lower[0], b)];
    Ok(state(k, z0, t, StateLabel::Mixed, upper, lower))
}

#[cfg(test)]
mod tests;
