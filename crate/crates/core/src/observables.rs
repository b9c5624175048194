//! Position/momentum statistics of supercoherent states.
//!
//! `ξ = (a⁺ + a)/√2` and `μ = i(a⁺ - a)/√2` act identically on both
//! components. Every matrix element reduces to coherent-state brakets
//! `⟨α1|O|α2⟩ = P(ᾱ1, α2)·exp(ᾱ1 α2)` with a polynomial prefactor `P`.
//! State-level sums are evaluated with every exponent shifted by the largest
//! `|β|²` of the state, so the ratio `⟨Z|O|Z⟩/⟨Z|Z⟩` stays finite for large
//! `|z|`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SusyError};
use crate::sao::{eigen_decompose, KMatrix, Region};
use crate::states::{mixed_state, SuperState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MomentKind {
    Overlap,
    Xi,
    Xi2,
    Mu,
    Mu2,
}

impl MomentKind {
    pub const ALL: [MomentKind; 5] = [
        MomentKind::Overlap,
        MomentKind::Xi,
        MomentKind::Xi2,
        MomentKind::Mu,
        MomentKind::Mu2,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moment {
    pub kind: MomentKind,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub value: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub mean_xi: f64,
    pub mean_xi2: f64,
    pub mean_mu: f64,
    pub mean_mu2: f64,
    /// σξ²
    pub var_xi: f64,
    /// σμ²
    pub var_mu: f64,
    /// σξ² σμ²
    pub product: f64,
    /// ⟨Z|Z⟩ in the unnormalized convention; may overflow to infinity.
    pub norm: f64,
    /// ln ⟨Z|Z⟩, always finite for a nonzero state.
    pub ln_norm: f64,
}

/// `⟨α1|α2⟩ = exp(ᾱ1 α2)` for unnormalized coherent states.
pub fn coherent_overlap(alpha1: C64, alpha2: C64) -> C64 {
    (alpha1.conj() * alpha2).exp()
}

fn moment_prefactor(alpha1: C64, alpha2: C64, kind: MomentKind) -> C64 {
    let sum = alpha2 + alpha1.conj();
    let diff = alpha2 - alpha1.conj();
    match kind {
        MomentKind::Overlap => C64::new(1.0, 0.0),
        MomentKind::Xi => sum * FRAC_1_SQRT_2,
        MomentKind::Xi2 => (sum * sum + 1.0) * 0.5,
        MomentKind::Mu => C64::new(0.0, -FRAC_1_SQRT_2) * diff,
        MomentKind::Mu2 => (-(diff * diff) + 1.0) * 0.5,
    }
}

/// `⟨α1|O|α2⟩` for `O` one of `1, ξ, ξ², μ, μ²`.
pub fn coherent_moment(alpha1: C64, alpha2: C64, kind: MomentKind) -> C64 {
    moment_prefactor(alpha1, alpha2, kind) * coherent_overlap(alpha1, alpha2)
}

// Ladder words: `true` is a⁺, `false` is a.
type Word = Vec<bool>;

fn operator_words(kind: MomentKind) -> Vec<(C64, Word)> {
    let h = C64::new(0.5, 0.0);
    let r = C64::new(FRAC_1_SQRT_2, 0.0);
    let ir = C64::new(0.0, FRAC_1_SQRT_2);
    match kind {
        MomentKind::Overlap => vec![(C64::new(1.0, 0.0), vec![])],
        MomentKind::Xi => vec![(r, vec![true]), (r, vec![false])],
        MomentKind::Xi2 => vec![
            (h, vec![true, true]),
            (h, vec![true, false]),
            (h, vec![false, true]),
            (h, vec![false, false]),
        ],
        MomentKind::Mu => vec![(ir, vec![true]), (-ir, vec![false])],
        MomentKind::Mu2 => vec![
            (-h, vec![true, true]),
            (h, vec![true, false]),
            (h, vec![false, true]),
            (-h, vec![false, false]),
        ],
    }
}

/// `⟨α1| w |α2⟩ / ⟨α1|α2⟩` by normal ordering with `a a⁺ = a⁺ a + 1`.
/// Letters are `(creator, displaced)`; displaced letters stand for `a - γ`
/// and `a⁺ - γ̄`.
fn word_prefactor(word: &[(bool, bool)], a1bar: C64, a2: C64, gamma: C64) -> C64 {
    if let Some(i) = word.windows(2).position(|p| !p[0].0 && p[1].0) {
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        let mut contracted = word.to_vec();
        contracted.drain(i..i + 2);
        return word_prefactor(&swapped, a1bar, a2, gamma) + word_prefactor(&contracted, a1bar, a2, gamma);
    }
    word.iter()
        .map(|&(creator, displaced)| match (creator, displaced) {
            (true, false) => a1bar,
            (true, true) => a1bar - gamma.conj(),
            (false, false) => a2,
            (false, true) => a2 - gamma,
        })
        .product()
}

/// Prefactor of `⟨α1|O(a - γ, a⁺ - γ̄)|α2⟩`, with the derivative letters
/// left undisplaced.
fn braket_prefactor(alpha1: C64, alpha2: C64, d1: bool, d2: bool, kind: MomentKind, gamma: C64) -> C64 {
    if !d1 && !d2 {
        return moment_prefactor(alpha1 - gamma, alpha2 - gamma, kind);
    }
    // ⟨α1′| = ⟨α1| a and |α2′⟩ = a⁺ |α2⟩
    operator_words(kind)
        .into_iter()
        .map(|(coef, w)| {
            let mut word = Vec::with_capacity(w.len() + 2);
            if d1 {
                word.push((false, false));
            }
            word.extend(w.into_iter().map(|c| (c, true)));
            if d2 {
                word.push((true, false));
            }
            coef * word_prefactor(&word, alpha1.conj(), alpha2, gamma)
        })
        .sum()
}

/// Matrix element between coherent states or their derivatives
/// `|α′⟩ = a⁺|α⟩`, selected by `d1`/`d2`.
pub fn braket_derivative(alpha1: C64, alpha2: C64, d1: bool, d2: bool, kind: MomentKind) -> C64 {
    braket_prefactor(alpha1, alpha2, d1, d2, kind, C64::new(0.0, 0.0)) * coherent_overlap(alpha1, alpha2)
}

/// State brakets `⟨Z|O|Z⟩·e^{-shift}` for the requested kinds, with
/// `shift = max |β|²` and the ladder operators displaced by `gamma`.
fn shifted_brakets(s: &SuperState, kinds: &[MomentKind], gamma: C64) -> ([C64; 5], f64) {
    let shift = s.max_beta().powi(2);
    let mut out = [C64::new(0.0, 0.0); 5];
    for terms in s.components() {
        for ti in terms {
            for tj in terms {
                let w = ti.weight.conj() * tj.weight;
                if w.norm() == 0.0 {
                    continue;
                }
                let e = w * (ti.beta.conj() * tj.beta - shift).exp();
                for &kind in kinds {
                    out[kind.index()] +=
                        e * braket_prefactor(ti.beta, tj.beta, ti.derivative, tj.derivative, kind, gamma);
                }
            }
        }
    }
    (out, shift)
}

fn checked_norm(b: &[C64; 5]) -> Result<f64> {
    let norm = b[0].re;
    if norm > 0.0 && norm.is_finite() {
        Ok(norm)
    } else {
        Err(SusyError::ZeroNorm)
    }
}

/// Normalized `⟨Z|O|Z⟩/⟨Z|Z⟩` for every kind, left complex so the reality of
/// Hermitian expectation values can be checked.
pub fn state_moments(s: &SuperState) -> Result<Vec<Moment>> {
    let (b, _) = shifted_brakets(s, &MomentKind::ALL, C64::new(0.0, 0.0));
    let norm = checked_norm(&b)?;
    Ok(MomentKind::ALL
        .iter()
        .map(|&kind| Moment {
            kind,
            value: b[kind.index()] / norm,
        })
        .collect())
}

/// `⟨c⟩ = ⟨Z|c Z⟩ / ⟨Z|Z⟩`, summed over all ordered pairs of coherent terms
/// in each component.
pub fn expectation(s: &SuperState, kind: MomentKind) -> Result<f64> {
    let m = state_moments(s)?;
    Ok(m[kind.index()].value.re)
}

/// Means first, then the variances as second moments about the mean, taken
/// with the ladder operators displaced by `⟨a⟩ = (⟨ξ⟩ + i⟨μ⟩)/√2`. This avoids
/// the cancellation in `⟨ξ²⟩ - ⟨ξ⟩²` when `|z|` is large.
pub fn uncertainty(s: &SuperState) -> Result<UncertaintyReport> {
    let zero = C64::new(0.0, 0.0);
    let (b, shift) = shifted_brakets(s, &[MomentKind::Overlap, MomentKind::Xi, MomentKind::Mu], zero);
    let norm = checked_norm(&b)?;
    let (mean_xi, mean_mu) = (b[1].re / norm, b[3].re / norm);
    let gamma = C64::new(mean_xi, mean_mu) * FRAC_1_SQRT_2;
    let (d, _) = shifted_brakets(s, &[MomentKind::Xi2, MomentKind::Mu2], gamma);
    let (var_xi, var_mu) = (d[2].re / norm, d[4].re / norm);
    let ln_norm = norm.ln() + shift;
    Ok(UncertaintyReport {
        mean_xi,
        mean_xi2: var_xi + mean_xi * mean_xi,
        mean_mu,
        mean_mu2: var_mu + mean_mu * mean_mu,
        var_xi,
        var_mu,
        product: var_xi * var_mu,
        norm: ln_norm.exp(),
        ln_norm,
    })
}

/// Mixing weights `Γ+, Γ-, Γ+-` of `cos η · Z+ + e^{iλ} sin η · Z-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaWeights {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_cross: C64,
    pub beta_plus: C64,
    pub beta_minus: C64,
}

impl GammaWeights {
    pub fn of_mixed(k: &KMatrix, z0: C64, t: f64, eta: f64, lambda: f64) -> Result<Self> {
        let s = mixed_state(k, z0, t, eta, lambda)?;
        let (u, l) = (&s.upper, &s.lower);
        Ok(Self {
            gamma_plus: u[0].weight.norm_sqr() + l[0].weight.norm_sqr(),
            gamma_minus: u[1].weight.norm_sqr() + l[1].weight.norm_sqr(),
            gamma_cross: u[0].weight.conj() * u[1].weight + l[0].weight.conj() * l[1].weight,
            beta_plus: u[0].beta,
            beta_minus: u[1].beta,
        })
    }

    /// `Γ+⟨β+|cβ+⟩ + Γ-⟨β-|cβ-⟩ + 2 Re(Γ+-⟨β+|cβ-⟩)`, shifted by `e^{-shift}`.
    fn braket(&self, kind: MomentKind, shift: f64) -> f64 {
        let (bp, bm) = (self.beta_plus, self.beta_minus);
        let el = |a: C64, b: C64| moment_prefactor(a, b, kind) * (a.conj() * b - shift).exp();
        self.gamma_plus * el(bp, bp).re + self.gamma_minus * el(bm, bm).re + 2.0 * (self.gamma_cross * el(bp, bm)).re
    }
}

/// Expectation value of a mixed generic state from its `Γ` weights; an
/// independent route to [`expectation`] for that family.
pub fn mixed_expectation_gamma(k: &KMatrix, z0: C64, t: f64, eta: f64, lambda: f64, kind: MomentKind) -> Result<f64> {
    let g = GammaWeights::of_mixed(k, z0, t, eta, lambda)?;
    let shift = g.beta_plus.norm_sqr().max(g.beta_minus.norm_sqr());
    let norm = g.braket(MomentKind::Overlap, shift);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(SusyError::ZeroNorm);
    }
    Ok(g.braket(kind, shift) / norm)
}

/// Large-|z| parametrization of a mixed state when `|χ+| = |χ-|`:
/// `χ± = χ e^{iφ±}`, `β± = β0 e^{i(-ωt - φ±)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticParams {
    pub chi_mag: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub beta0: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl AsymptoticParams {
    /// Parameters of `mixed_state(k, z0, ·, eta, lambda)`. The phase of `z0`
    /// is folded into `φ±` so that `t` alone carries the time dependence.
    pub fn from_mixed(k: &KMatrix, z0: C64, eta: f64, lambda: f64) -> Result<Self> {
        let sp = eigen_decompose(k);
        if sp.region.region != Region::GenericUnbounded {
            return Err(SusyError::WrongRegion {
                expected: "GenericUnbounded",
                found: sp.region.region,
            });
        }
        let g = GammaWeights::of_mixed(k, z0, 0.0, eta, lambda)?;
        let chi_mag = 0.5 * (sp.chi_plus.norm() + sp.chi_minus.norm());
        Ok(Self {
            chi_mag,
            phi_plus: sp.chi_plus.arg() - z0.arg(),
            phi_minus: sp.chi_minus.arg() - z0.arg(),
            beta0: z0.norm() / chi_mag,
            gamma_plus: g.gamma_plus,
            gamma_minus: g.gamma_minus,
        })
    }
}

/// Asymptotic `(σξ², σμ²)`: the cross exponential `e^{β+* β-}` is dropped,
/// leaving two equal-norm coherent populations.
pub fn asymptotic_variances(p: &AsymptoticParams, t: f64, omega: f64) -> (f64, f64) {
    let (gp, gm) = (p.gamma_plus, p.gamma_minus);
    let spread = ((p.phi_plus - p.phi_minus) / 2.0).sin().powi(2);
    let amp = gp * gm / (gp + gm).powi(2) * 8.0 * p.beta0 * p.beta0 * spread;
    let phase = omega * t + (p.phi_plus + p.phi_minus) / 2.0;
    (0.5 + amp * phase.sin().powi(2), 0.5 + amp * phase.cos().powi(2))
}
