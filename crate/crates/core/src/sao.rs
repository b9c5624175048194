//! The generalized supersymmetric annihilation operator
//! `Â = [[k1 a, k2], [k3 a², k4 a]]`, represented by its coefficient matrix
//! `K`, together with the 2×2 spectral data every state constructor needs.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Result, SusyError};

/// Default relative tolerance for region classification.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Coefficient matrix `K = [[k1, k2], [k3, k4]]` of the SAO, plus the
/// oscillator frequency used for time evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KMatrix {
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    k1: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    k2: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    k3: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    k4: C64,
    omega: f64,
}

impl KMatrix {
    /// Builds `K` with unit frequency. Fails on non-finite entries and on
    /// the null operator.
    pub fn new(k1: C64, k2: C64, k3: C64, k4: C64) -> Result<Self> {
        Self::with_omega(k1, k2, k3, k4, 1.0)
    }

    pub fn with_omega(k1: C64, k2: C64, k3: C64, k4: C64, omega: f64) -> Result<Self> {
        if ![k1, k2, k3, k4].iter().all(|k| k.is_finite()) {
            return Err(SusyError::InvalidParameter("K entries must be finite".into()));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(SusyError::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if [k1, k2, k3, k4].iter().all(|k| k.norm_sqr() == 0.0) {
            return Err(SusyError::NullOperator);
        }
        Ok(Self { k1, k2, k3, k4, omega })
    }

    /// Real-entry convenience constructor.
    pub fn real(k1: f64, k2: f64, k3: f64, k4: f64) -> Result<Self> {
        Self::new(k1.into(), k2.into(), k3.into(), k4.into())
    }

    pub fn k1(&self) -> C64 {
        self.k1
    }

    pub fn k2(&self) -> C64 {
        self.k2
    }

    pub fn k3(&self) -> C64 {
        self.k3
    }

    pub fn k4(&self) -> C64 {
        self.k4
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }

    pub fn trace(&self) -> C64 {
        self.k1 + self.k4
    }

    pub fn det(&self) -> C64 {
        self.k1 * self.k4 - self.k2 * self.k3
    }

    /// `(k1 - k4)² + 4 k2 k3`; vanishes exactly when the eigenvalues coincide.
    pub fn discriminant(&self) -> C64 {
        let d = self.k1 - self.k4;
        d * d + 4.0 * self.k2 * self.k3
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|k| k.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `s·K`, same frequency. `s` must be nonzero.
    pub fn scaled(&self, s: C64) -> Result<Self> {
        Self::with_omega(s * self.k1, s * self.k2, s * self.k3, s * self.k4, self.omega)
    }

    pub fn as_two_by_two(&self) -> TwoByTwo {
        TwoByTwo::new(self.k1, self.k2, self.k3, self.k4)
    }
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.k1, self.k2, self.k3, self.k4)
    }
}

/// Plain complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoByTwo {
    #[serde(serialize_with = "crate::serde_c64::serialize_vec")]
    pub m: [C64; 4],
}

impl TwoByTwo {
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Self {
            m: [m11, m12, m21, m22],
        }
    }

    pub fn det(&self) -> C64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Self::new(self.m[3] / d, -self.m[1] / d, -self.m[2] / d, self.m[0] / d))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.m[0] * v[0] + self.m[1] * v[1], self.m[2] * v[0] + self.m[3] * v[1]]
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Self::new(d1, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// Repeated eigenvalue `χ+ = χ-`.
    Degenerate,
    /// `det K = 0`; one-dimensional supercoherent space.
    Singular,
    /// Distinct nonzero eigenvalues with `|χ+| ≠ |χ-|`.
    GenericBounded,
    /// Distinct nonzero eigenvalues with `|χ+| = |χ-|`.
    GenericUnbounded,
}

impl Region {
    pub fn is_generic(self) -> bool {
        matches!(self, Region::GenericBounded | Region::GenericUnbounded)
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Degenerate => "Degenerate",
            Region::Singular => "Singular",
            Region::GenericBounded => "GenericBounded",
            Region::GenericUnbounded => "GenericUnbounded",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionClass {
    pub region: Region,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub discriminant: C64,
    pub classify_tol: f64,
    /// Set when the repeated-eigenvalue test also passes. Together with
    /// `Singular` this marks a nilpotent `K` (`χ+ = χ- = 0`).
    pub degenerate: bool,
}

impl RegionClass {
    pub fn is_nilpotent(&self) -> bool {
        self.region == Region::Singular && self.degenerate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub chi_plus: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub chi_minus: C64,
    /// `S = [[χ+ - k4, χ- - k4], [k3, k3]]`; invertible only in the generic region.
    pub s_matrix: TwoByTwo,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub trace: C64,
    #[serde(serialize_with = "crate::serde_c64::serialize")]
    pub det: C64,
    pub region: RegionClass,
}

impl Spectrum {
    /// Mean eigenvalue `tr(K)/2`, the repeated root in the degenerate region.
    pub fn chi_mean(&self) -> C64 {
        self.trace * 0.5
    }
}

/// Roots of `χ² - tr χ + det`, principal square root, ordered by real part
/// then imaginary part (descending).
fn ordered_roots(trace: C64, det: C64, scale: f64) -> (C64, C64) {
    let half = trace * 0.5;
    let s = (half * half - det).sqrt();
    // larger-magnitude root first, the other from the product to avoid cancellation
    let r1 = if (half + s).norm() >= (half - s).norm() {
        half + s
    } else {
        half - s
    };
    let r2 = if r1.norm() > 0.0 { det / r1 } else { half - s };
    let tie = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let swap = if (r1.re - r2.re).abs() <= tie {
        r2.im > r1.im
    } else {
        r2.re > r1.re
    };
    if swap {
        (r2, r1)
    } else {
        (r1, r2)
    }
}

/// Eigenvalues `χ±`, similarity matrix `S` and region of `K`, using the
/// default classification tolerance.
pub fn eigen_decompose(k: &KMatrix) -> Spectrum {
    eigen_decompose_with_tol(k, DEFAULT_CLASSIFY_TOL)
}

pub fn eigen_decompose_with_tol(k: &KMatrix, tol: f64) -> Spectrum {
    let (trace, det) = (k.trace(), k.det());
    let (chi_plus, chi_minus) = ordered_roots(trace, det, k.norm());
    let s_matrix = TwoByTwo::new(chi_plus - k.k4, chi_minus - k.k4, k.k3, k.k3);
    let region = classify_roots(k, tol, chi_plus, chi_minus);
    Spectrum {
        chi_plus,
        chi_minus,
        s_matrix,
        trace,
        det,
        region,
    }
}

/// Assigns `K` to its region. Singular takes precedence over degenerate;
/// the `degenerate` flag records when both tests pass.
pub fn classify(k: &KMatrix, tol: f64) -> Result<RegionClass> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SusyError::InvalidParameter(format!(
            "classification tolerance must be positive, got {tol}"
        )));
    }
    if k.norm() == 0.0 {
        return Err(SusyError::NullOperator);
    }
    let (cp, cm) = ordered_roots(k.trace(), k.det(), k.norm());
    Ok(classify_roots(k, tol, cp, cm))
}

fn classify_roots(k: &KMatrix, tol: f64, chi_plus: C64, chi_minus: C64) -> RegionClass {
    let norm = k.norm();
    let norm2 = norm * norm;
    let discriminant = k.discriminant();
    let degenerate = discriminant.norm() <= tol * norm2;
    let singular = k.det().norm() <= tol * norm2;
    let region = if singular {
        Region::Singular
    } else if degenerate {
        Region::Degenerate
    } else if (chi_plus.norm() - chi_minus.norm()).abs() <= tol * norm {
        Region::GenericUnbounded
    } else {
        Region::GenericBounded
    };
    RegionClass {
        region,
        discriminant,
        classify_tol: tol,
        degenerate,
    }
}

/// One-parameter family `K(θ) = [[1, cos θ], [sin θ, 1]]`; `θ = 0` gives the
/// operator `[[a, 1], [0, a]]`.
pub fn theta_operator(theta: f64) -> KMatrix {
    let one = C64::new(1.0, 0.0);
    KMatrix {
        k1: one,
        k2: C64::new(theta.cos(), 0.0),
        k3: C64::new(theta.sin(), 0.0),
        k4: one,
        omega: 1.0,
    }
}

/// Divides `K` by its largest-magnitude entry (first one on ties) and returns
/// that entry as the scale. `state(K, z0)` and `state(K/s, z0/s)` are the same
/// ray.
pub fn gauge_normalize(k: &KMatrix) -> (KMatrix, C64) {
    let entries = k.entries();
    let mut scale = entries[0];
    for e in &entries[1..] {
        if e.norm() > scale.norm() {
            scale = *e;
        }
    }
    let inv = scale.inv();
    let normalized = KMatrix {
        k1: entries[0] * inv,
        k2: entries[1] * inv,
        k3: entries[2] * inv,
        k4: entries[3] * inv,
        omega: k.omega,
    };
    (normalized, scale)
}
