//! Truncated energy-eigenbasis representation of superstates.
//!
//! A superstate is `(Σ_{n=0}^N a_n |n⟩, Σ_{n=1}^N c_n |n-1⟩)`; `c[m]` holds
//! `c_{m+1}`, the coefficient of the bosonic `|m⟩` in the lower component.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{CoherentTerm, SuperState};
use crate::error::{Result, SusyError};
use crate::sao::{classify, KMatrix, Region, DEFAULT_CLASSIFY_TOL};

/// Hard cap on the truncation order chosen by [`to_fock`].
pub const DEFAULT_FOCK_CAP: usize = 200;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockExpansion {
    /// `a_0 ..= a_N`.
    #[serde(serialize_with = "crate::serde_c64::serialize_vec")]
    pub a: Vec<C64>,
    /// `c_1 ..= c_N`.
    #[serde(serialize_with = "crate::serde_c64::serialize_vec")]
    pub c: Vec<C64>,
    /// Truncation order `N`.
    pub n: usize,
    /// Bound (closed forms) or estimate (recursion) of the discarded squared
    /// norm relative to the retained squared norm.
    pub trunc_err: f64,
    /// Set when a singular-`K` solve replaced the supplied `c1` by the value
    /// the one-dimensional solution space forces.
    pub c1_overridden: bool,
}

impl FockExpansion {
    fn zeros(n: usize) -> Self {
        Self {
            a: vec![ZERO; n + 1],
            c: vec![ZERO; n],
            n,
            trunc_err: 0.0,
            c1_overridden: false,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().chain(&self.c).map(|x| x.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Copy cut down to order `n <= self.n`.
    pub fn truncated(&self, n: usize) -> FockExpansion {
        let n = n.min(self.n);
        FockExpansion {
            a: self.a[..=n].to_vec(),
            c: self.c[..n].to_vec(),
            n,
            ..self.clone()
        }
    }

    pub fn scaled(&self, s: C64) -> FockExpansion {
        FockExpansion {
            a: self.a.iter().map(|x| x * s).collect(),
            c: self.c.iter().map(|x| x * s).collect(),
            ..self.clone()
        }
    }

    /// Upper coefficients followed by lower coefficients.
    pub fn flatten(&self) -> Vec<C64> {
        self.a.iter().chain(&self.c).copied().collect()
    }

    /// `‖self - other‖ / ‖other‖` over orders `0..=n` (both must reach `n`).
    pub fn relative_distance(&self, other: &FockExpansion, n: usize) -> f64 {
        let (x, y) = (self.truncated(n), other.truncated(n));
        let diff: f64 = x
            .flatten()
            .iter()
            .zip(y.flatten())
            .map(|(p, q)| (p - q).norm_sqr())
            .sum();
        let base = y.norm_sqr();
        if base == 0.0 {
            diff.sqrt()
        } else {
            (diff / base).sqrt()
        }
    }

    /// Distance from `self` to the ray through `other`, relative to `‖self‖`,
    /// over orders `0..=n`.
    pub fn ray_distance(&self, other: &FockExpansion, n: usize) -> f64 {
        let (x, y) = (self.truncated(n).flatten(), other.truncated(n).flatten());
        let yy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        let xx: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        if yy == 0.0 || xx == 0.0 {
            return if xx == yy { 0.0 } else { 1.0 };
        }
        let proj: C64 = y.iter().zip(&x).map(|(p, q)| p.conj() * q).sum::<C64>() / yy;
        let resid: f64 = x.iter().zip(&y).map(|(p, q)| (p - proj * q).norm_sqr()).sum();
        (resid / xx).sqrt()
    }

    /// `‖Â f - z f‖ / ‖f‖` on the orders `apply_sao` can resolve.
    pub fn eigen_residual(&self, k: &KMatrix, z: C64) -> Result<f64> {
        let af = apply_sao(k, self)?;
        let f = self.truncated(af.n);
        let diff: f64 = af
            .flatten()
            .iter()
            .zip(f.flatten())
            .map(|(p, q)| (p - z * q).norm_sqr())
            .sum();
        let base = self.norm_sqr();
        Ok(if base == 0.0 { diff.sqrt() } else { (diff / base).sqrt() })
    }
}

/// Free parameters of the recursion. `a1` is only consulted when `k1 = 0`,
/// where the `n = 0` row no longer fixes `a_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockSeed {
    pub a0: C64,
    pub c1: C64,
    pub a1: Option<C64>,
}

/// Solves `Â|Z⟩ = z0|Z⟩` order by order in the energy eigenbasis, starting
/// from the free parameters `a0` and `c1`, then applies the time evolution
/// `a_n, c_n → e^{-inωt}·(a_n, c_n)`. Independent of the closed forms.
pub fn fock_solve(k: &KMatrix, z0: C64, a0: C64, c1: C64, t: f64, n: usize) -> Result<FockExpansion> {
    fock_solve_seeded(k, z0, FockSeed { a0, c1, a1: None }, t, n)
}

pub fn fock_solve_seeded(k: &KMatrix, z0: C64, seed: FockSeed, t: f64, n: usize) -> Result<FockExpansion> {
    if n < 2 {
        return Err(SusyError::TruncationTooSmall(n));
    }
    let rc = classify(k, DEFAULT_CLASSIFY_TOL)?;
    let mut f = FockExpansion::zeros(n);
    f.a[0] = seed.a0;

    if z0.norm() == 0.0 {
        // only the n = 0 row couples anything; every higher order vanishes
        f.c[0] = seed.c1;
        f.a[1] = first_row(k, z0, seed)?;
    } else if rc.region == Region::Singular {
        if rc.is_nilpotent() {
            return Err(SusyError::NoEigenstate { residual: z0.norm() });
        }
        solve_rank_one(k, z0, seed, &mut f)?;
    } else {
        f.c[0] = seed.c1;
        f.a[1] = first_row(k, z0, seed)?;
        for m in 1..n {
            let (an, cn) = (f.a[m], f.c[m - 1]);
            let (sn, sn1) = ((m as f64).sqrt(), ((m + 1) as f64).sqrt());
            // [[k1√(n+1), k2], [k3√n√(n+1), k4√n]] (a_{n+1}, c_{n+1}) = z0 (a_n, c_n)
            let (m11, m12, m21, m22) = (k.k1() * sn1, k.k2(), k.k3() * sn * sn1, k.k4() * sn);
            let (r1, r2) = (z0 * an, z0 * cn);
            let det = m11 * m22 - m12 * m21;
            f.a[m + 1] = (r1 * m22 - m12 * r2) / det;
            f.c[m] = (m11 * r2 - m21 * r1) / det;
        }
    }

    f.trunc_err = recursion_tail_estimate(k, z0, &f);
    apply_time(&mut f, t, k.omega());
    Ok(f)
}

/// `n = 0` row: `k1 a_1 + k2 c_1 = z0 a_0`.
fn first_row(k: &KMatrix, z0: C64, seed: FockSeed) -> Result<C64> {
    let tiny = 1e-12 * k.norm();
    let rhs = z0 * seed.a0 - k.k2() * seed.c1;
    if k.k1().norm() > tiny {
        return Ok(rhs / k.k1());
    }
    let scale = (z0 * seed.a0).norm() + (k.k2() * seed.c1).norm();
    if rhs.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(SusyError::NoEigenstate { residual: rhs.norm() });
    }
    Ok(seed.a1.unwrap_or(ZERO))
}

/// Recursion for rank-one `K = u·(p, q)`: every row reduces to
/// `z0 (a_n, c_n) = (u1, √n u2)·L_n` with `L_n = p√(n+1) a_{n+1} + q c_{n+1}`,
/// and consistency at the next order forces `u2 √(n+1) a_{n+1} = u1 c_{n+1}`.
fn solve_rank_one(k: &KMatrix, z0: C64, seed: FockSeed, f: &mut FockExpansion) -> Result<()> {
    let col1 = [k.k1(), k.k3()];
    let col2 = [k.k2(), k.k4()];
    let n1 = col1[0].norm_sqr() + col1[1].norm_sqr();
    let n2 = col2[0].norm_sqr() + col2[1].norm_sqr();
    let (u, p, q) = if n1 >= n2 {
        (
            col1,
            C64::new(1.0, 0.0),
            (col1[0].conj() * col2[0] + col1[1].conj() * col2[1]) / n1,
        )
    } else {
        (
            col2,
            (col2[0].conj() * col1[0] + col2[1].conj() * col1[1]) / n2,
            C64::new(1.0, 0.0),
        )
    };
    let tr = p * u[0] + q * u[1];
    let tiny = 1e-12 * k.norm();

    // n = 0
    if u[0].norm() > tiny {
        let l0 = z0 * seed.a0 / u[0];
        f.a[1] = l0 * u[0] / tr;
        f.c[0] = u[1] * l0 / tr;
        let scale = f.c[0].norm() + seed.c1.norm();
        f.c1_overridden = (f.c[0] - seed.c1).norm() > 1e-12 * scale;
    } else {
        // upper row of Â vanishes: z0 a_0 = 0 is forced
        if seed.a0.norm() > 0.0 {
            return Err(SusyError::NoEigenstate {
                residual: (z0 * seed.a0).norm(),
            });
        }
        f.a[1] = ZERO;
        f.c[0] = seed.c1;
    }

    for m in 1..f.n {
        let (an, cn) = (f.a[m], f.c[m - 1]);
        let sn = (m as f64).sqrt();
        let sn1 = ((m + 1) as f64).sqrt();
        let v = [u[0], u[1] * sn];
        let vv = v[0].norm_sqr() + v[1].norm_sqr();
        let l = z0 * (v[0].conj() * an + v[1].conj() * cn) / vv;
        let resid = ((z0 * an - v[0] * l).norm_sqr() + (z0 * cn - v[1] * l).norm_sqr()).sqrt();
        let scale = z0.norm() * (an.norm() + cn.norm());
        if resid > 1e-8 * scale + 1e-300 {
            return Err(SusyError::NoEigenstate {
                residual: resid / scale.max(f64::MIN_POSITIVE),
            });
        }
        f.a[m + 1] = l * u[0] / (sn1 * tr);
        f.c[m] = u[1] * l / tr;
    }
    Ok(())
}

fn apply_time(f: &mut FockExpansion, t: f64, omega: f64) {
    if t == 0.0 {
        return;
    }
    for (n, a) in f.a.iter_mut().enumerate() {
        *a *= C64::from_polar(1.0, -(n as f64) * omega * t);
    }
    for (m, c) in f.c.iter_mut().enumerate() {
        *c *= C64::from_polar(1.0, -((m + 1) as f64) * omega * t);
    }
}

/// Geometric tail estimate from the last retained order, using the largest
/// `|β|` the spectrum allows.
fn recursion_tail_estimate(k: &KMatrix, z0: C64, f: &FockExpansion) -> f64 {
    let norm = f.norm_sqr();
    if norm == 0.0 || z0.norm() == 0.0 {
        return 0.0;
    }
    let sp = crate::sao::eigen_decompose(k);
    let chi_min = if sp.region.region == Region::Singular {
        sp.trace.norm()
    } else {
        sp.chi_plus.norm().min(sp.chi_minus.norm())
    };
    let beta = z0.norm() / chi_min;
    let n = f.n as f64;
    let ratio = beta * beta * (n + 2.0) / ((n + 1.0) * (n + 1.0));
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let last = f.a[f.n].norm_sqr() + f.c[f.n - 1].norm_sqr();
    last * ratio / (1.0 - ratio) / norm
}

/// Coefficients of `|β⟩` (`β^n/√n!`) or `|β′⟩` (`n β^{n-1}/√n!`) for `n = 0..len`.
fn basis_coefficients(term: &CoherentTerm, len: usize) -> Vec<C64> {
    let mut coh = Vec::with_capacity(len);
    let mut x = C64::new(1.0, 0.0);
    for n in 0..len {
        if n > 0 {
            x = x * term.beta / (n as f64).sqrt();
        }
        coh.push(x);
    }
    if !term.derivative {
        return coh;
    }
    // n β^{n-1}/√n! = √n · β^{n-1}/√(n-1)!
    (0..len)
        .map(|n| if n == 0 { ZERO } else { coh[n - 1] * (n as f64).sqrt() })
        .collect()
}

/// Suffix sums `tail[n] = Σ_{j>n} |x_j|²`.
fn tails(x: &[C64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut acc = 0.0;
    for j in (0..x.len()).rev() {
        out[j] = acc;
        acc += x[j].norm_sqr();
    }
    out
}

struct ComponentSeries {
    coeffs: Vec<C64>,
    /// per-term `|w_i|` and squared tail beyond each order
    tails: Vec<(f64, Vec<f64>)>,
}

fn component_series(terms: &[CoherentTerm], len: usize, keep: usize) -> ComponentSeries {
    let mut coeffs = vec![ZERO; keep];
    let mut term_tails = Vec::with_capacity(terms.len());
    for t in terms {
        let b = basis_coefficients(t, len);
        for (c, v) in coeffs.iter_mut().zip(&b) {
            *c += t.weight * v;
        }
        term_tails.push((t.weight.norm(), tails(&b)));
    }
    ComponentSeries {
        coeffs,
        tails: term_tails,
    }
}

impl ComponentSeries {
    /// Bound on the squared norm discarded beyond index `last`.
    fn tail_bound(&self, last: usize) -> f64 {
        let s: f64 = self.tails.iter().map(|(w, t)| w * t[last].sqrt()).sum();
        s * s
    }
}

/// Expands `s` in the energy eigenbasis with the smallest `N` whose relative
/// tail bound is at most `tol`. The cap defaults to [`DEFAULT_FOCK_CAP`].
pub fn to_fock(s: &SuperState, tol: f64) -> Result<FockExpansion> {
    to_fock_with_cap(s, tol, DEFAULT_FOCK_CAP)
}

pub fn to_fock_with_cap(s: &SuperState, tol: f64, cap: usize) -> Result<FockExpansion> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SusyError::InvalidParameter(format!(
            "truncation tolerance must be positive, got {tol}"
        )));
    }
    if cap < 2 {
        return Err(SusyError::TruncationTooSmall(cap));
    }
    let b2 = s.max_beta().powi(2);
    // beyond |β|² ≈ 700 the series terms overflow and N would exceed any sane cap
    if b2 > 700.0 || b2 > cap as f64 {
        return Err(SusyError::TruncationOverflow { cap });
    }
    let len = cap + 1 + (b2 + 20.0 * b2.sqrt() + 60.0).ceil() as usize;
    let upper = component_series(&s.upper, len, cap + 1);
    let lower = component_series(&s.lower, len, cap + 1);

    let mut norm = upper.coeffs[0].norm_sqr();
    for n in 1..=cap {
        norm += upper.coeffs[n].norm_sqr() + lower.coeffs[n - 1].norm_sqr();
        if n < 2 {
            continue;
        }
        let tail = upper.tail_bound(n) + lower.tail_bound(n - 1);
        let err = if norm > 0.0 { tail / norm } else { tail };
        if err <= tol {
            return Ok(FockExpansion {
                a: upper.coeffs[..=n].to_vec(),
                c: lower.coeffs[..n].to_vec(),
                n,
                trunc_err: err,
                c1_overridden: false,
            });
        }
    }
    Err(SusyError::TruncationOverflow { cap })
}

/// Expansion at a fixed order `n`, with the tail bound reported but not enforced.
pub fn to_fock_fixed(s: &SuperState, n: usize) -> Result<FockExpansion> {
    if n < 2 {
        return Err(SusyError::TruncationTooSmall(n));
    }
    let b2 = s.max_beta().powi(2);
    if b2 > 700.0 {
        return Err(SusyError::TruncationOverflow { cap: n });
    }
    let len = n + 1 + (b2 + 20.0 * b2.sqrt() + 60.0).ceil() as usize;
    let upper = component_series(&s.upper, len, n + 1);
    let lower = component_series(&s.lower, len, n + 1);
    let a = upper.coeffs[..=n].to_vec();
    let c = lower.coeffs[..n].to_vec();
    let norm: f64 = a.iter().chain(&c).map(|x| x.norm_sqr()).sum();
    let tail = upper.tail_bound(n) + lower.tail_bound(n - 1);
    let trunc_err = if norm > 0.0 { tail / norm } else { tail };
    Ok(FockExpansion {
        a,
        c,
        n,
        trunc_err,
        c1_overridden: false,
    })
}

/// Applies `Â = [[k1 a, k2], [k3 a², k4 a]]` exactly; the result is
/// truncated at order `N - 2`.
pub fn apply_sao(k: &KMatrix, f: &FockExpansion) -> Result<FockExpansion> {
    if f.n < 2 || f.a.len() != f.n + 1 || f.c.len() != f.n {
        return Err(SusyError::TruncationTooSmall(f.n));
    }
    let out_n = f.n - 2;
    let mut g = FockExpansion::zeros(out_n);
    g.trunc_err = f.trunc_err;
    for n in 0..=out_n {
        let sn1 = ((n + 1) as f64).sqrt();
        // upper: k1 √(n+1) a_{n+1} + k2 c_{n+1}
        g.a[n] = k.k1() * sn1 * f.a[n + 1] + k.k2() * f.c[n];
        if n >= 1 {
            // lower, coefficient c'_n of |n-1⟩: k3 √n √(n+1) a_{n+1} + k4 √n c_{n+1}
            let sn = (n as f64).sqrt();
            g.c[n - 1] = k.k3() * sn * sn1 * f.a[n + 1] + k.k4() * sn * f.c[n];
        }
    }
    Ok(g)
}
