//! Parameter sweeps over the θ-family, power-law fits of the divergent
//! uncertainty, maximum search, canonical-state detection and the
//! `(k2, k3, k4)` classification grid with `k1 = 1`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SusyError};
use crate::observables::uncertainty;
use crate::sao::{classify, theta_operator, KMatrix, Region, DEFAULT_CLASSIFY_TOL};
use crate::states::{mixed_state, to_fock_fixed, SuperState};

/// `count` points from `start` to `stop`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(SusyError::InvalidParameter(format!("non-finite range {start}:{stop}")));
        }
        if count < 2 {
            return Err(SusyError::InvalidParameter(format!(
                "range needs at least 2 points, got {count}"
            )));
        }
        Ok(Self { start, stop, count })
    }

    /// Endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }

    /// Cell centres: `count` points offset by half a step from both ends.
    pub fn midpoints(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / self.count as f64;
        (0..self.count).map(|i| self.start + step * (i as f64 + 0.5)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    /// Sampled at cell centres so the degenerate angles `nπ/2` at the ends
    /// are never hit.
    pub theta_range: GridRange,
    pub zmag_range: GridRange,
    pub zarg: f64,
    pub eta: f64,
    pub lambda: f64,
    pub t: f64,
}

impl SweepSpec {
    /// The Figure-1 family: equal-weight mixture with `η = λ = π/4`.
    pub fn figure1(theta_range: GridRange, zmag_range: GridRange, zarg: f64) -> Self {
        use std::f64::consts::FRAC_PI_4;
        Self {
            theta_range,
            zmag_range,
            zarg,
            eta: FRAC_PI_4,
            lambda: FRAC_PI_4,
            t: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        GridRange::new(self.theta_range.start, self.theta_range.stop, self.theta_range.count)?;
        GridRange::new(self.zmag_range.start, self.zmag_range.stop, self.zmag_range.count)?;
        if self.zmag_range.start < 0.0 || self.zmag_range.stop < 0.0 {
            return Err(SusyError::InvalidParameter("|z| range must be non-negative".into()));
        }
        for (name, v) in [
            ("zarg", self.zarg),
            ("eta", self.eta),
            ("lambda", self.lambda),
            ("t", self.t),
        ] {
            if !v.is_finite() {
                return Err(SusyError::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub zmag: f64,
    pub zarg: f64,
    pub var_xi: f64,
    pub var_mu: f64,
    pub product: f64,
    /// Set when the point could not be evaluated; the numeric fields are NaN.
    pub error: Option<String>,
}

/// Uncertainty of the θ-family mixture at one point.
pub fn theta_point(theta: f64, zmag: f64, zarg: f64, eta: f64, lambda: f64, t: f64) -> Result<(f64, f64, f64)> {
    let k = theta_operator(theta);
    let s = mixed_state(&k, C64::from_polar(zmag, zarg), t, eta, lambda)?;
    let r = uncertainty(&s)?;
    Ok((r.var_xi, r.var_mu, r.product))
}

/// Rows in θ-major order, independent of scheduling.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let thetas = spec.theta_range.midpoints();
    let zmags = spec.zmag_range.points();
    let nz = zmags.len();
    Ok((0..thetas.len() * nz)
        .into_par_iter()
        .map(|idx| {
            let (theta, zmag) = (thetas[idx / nz], zmags[idx % nz]);
            let row = |v: (f64, f64, f64), error| SweepRow {
                theta,
                zmag,
                zarg: spec.zarg,
                var_xi: v.0,
                var_mu: v.1,
                product: v.2,
                error,
            };
            match theta_point(theta, zmag, spec.zarg, spec.eta, spec.lambda, spec.t) {
                Ok(v) => row(v, None),
                Err(e) => row((f64::NAN, f64::NAN, f64::NAN), Some(e.to_string())),
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceFit {
    pub theta: f64,
    pub zarg: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub zmag_window: (f64, f64),
    pub points: usize,
}

/// Least-squares slope of `ln(σξ²σμ²)` against `ln|z|` over log-spaced `|z|`.
pub fn fit_divergence(
    theta: f64,
    zarg: f64,
    zmag_window: (f64, f64),
    points: usize,
    eta: f64,
    lambda: f64,
) -> Result<DivergenceFit> {
    let (lo, hi) = zmag_window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(SusyError::InvalidParameter(format!("bad |z| window ({lo}, {hi})")));
    }
    if points < 5 {
        return Err(SusyError::InvalidParameter(format!(
            "a fit needs at least 5 points, got {points}"
        )));
    }
    let region = classify(&theta_operator(theta), DEFAULT_CLASSIFY_TOL)?.region;
    if region != Region::GenericUnbounded {
        return Err(SusyError::NoDivergence(region));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    let samples = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = lo.ln() + step * i as f64;
            let (_, _, p) = theta_point(theta, x.exp(), zarg, eta, lambda, 0.0)?;
            Ok((x, p.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept, r_squared) = linear_fit(&samples);
    Ok(DivergenceFit {
        theta,
        zarg,
        slope,
        intercept,
        r_squared,
        zmag_window,
        points,
    })
}

fn linear_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxSearch {
    pub theta: f64,
    pub zmag: f64,
    pub zarg: f64,
    pub product: f64,
    /// Best value on the coarse grid before refinement.
    pub coarse_max: f64,
    /// Some sampled θ lies in the unbounded region.
    pub unbounded_warning: bool,
}

const COARSE_THETA: usize = 48;
const COARSE_ZMAG: usize = 61;

/// Coarse grid over the θ window (cell centres) and `|z| ∈ [0, zmag_max]`,
/// then compass refinement that only accepts improvements.
pub fn find_max_uncertainty(
    theta_window: (f64, f64),
    zmag_max: f64,
    zarg: f64,
    eta: f64,
    lambda: f64,
) -> Result<MaxSearch> {
    let (ta, tb) = theta_window;
    if !(ta.is_finite() && tb.is_finite() && tb >= ta) || !(zmag_max >= 0.0 && zmag_max.is_finite()) {
        return Err(SusyError::InvalidParameter(format!(
            "bad search window ({ta}, {tb}) x [0, {zmag_max}]"
        )));
    }
    let thetas = if tb > ta {
        GridRange::new(ta, tb, COARSE_THETA)?.midpoints()
    } else {
        vec![ta]
    };
    let zmags = if zmag_max > 0.0 {
        GridRange::new(0.0, zmag_max, COARSE_ZMAG)?.points()
    } else {
        vec![0.0]
    };
    let eval = |theta: f64, zmag: f64| -> f64 {
        theta_point(theta, zmag, zarg, eta, lambda, 0.0)
            .map(|v| v.2)
            .unwrap_or(f64::NAN)
    };
    let unbounded = |theta: f64| {
        classify(&theta_operator(theta), DEFAULT_CLASSIFY_TOL).is_ok_and(|c| c.region == Region::GenericUnbounded)
    };
    let nz = zmags.len();
    let coarse: Vec<f64> = (0..thetas.len() * nz)
        .into_par_iter()
        .map(|i| eval(thetas[i / nz], zmags[i % nz]))
        .collect();
    let best = coarse
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |acc: Option<(usize, f64)>, (i, &v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((i, v)),
        })
        .ok_or_else(|| SusyError::InvalidParameter("no evaluable point in the search window".into()))?;
    let coarse_max = best.1;
    let (mut theta, mut zmag, mut value) = (thetas[best.0 / nz], zmags[best.0 % nz], coarse_max);
    let mut warn = thetas.iter().any(|&t| unbounded(t));

    let mut dt = if thetas.len() > 1 { thetas[1] - thetas[0] } else { 0.0 };
    let mut dz = if nz > 1 { zmags[1] - zmags[0] } else { 0.0 };
    for _ in 0..200 {
        if dt < 1e-9 && dz < 1e-9 {
            break;
        }
        let mut moved = false;
        for (st, sz) in [(dt, 0.0), (-dt, 0.0), (0.0, dz), (0.0, -dz)] {
            let (nt, nzm) = ((theta + st).clamp(ta, tb), (zmag + sz).clamp(0.0, zmag_max));
            if (nt, nzm) == (theta, zmag) {
                continue;
            }
            let v = eval(nt, nzm);
            if v > value {
                (theta, zmag, value) = (nt, nzm, v);
                moved = true;
            }
        }
        if !moved {
            dt *= 0.5;
            dz *= 0.5;
        }
    }
    warn |= unbounded(theta);
    Ok(MaxSearch {
        theta,
        zmag,
        zarg,
        product: value,
        coarse_max,
        unbounded_warning: warn,
    })
}

const CANONICAL_ORDERS: usize = 30;

/// Whether both components are multiples of one common coherent state
/// `Σ αⁿ/√n! |n⟩`. Fits a shared `α` to `√n x_n = α x_{n-1}` over both
/// components, then requires every order to satisfy it within `tol`
/// relative to the size of that order, so a small admixture of a second
/// coherent state is caught however large `|β|` is.
pub fn canonical_scs_check(s: &SuperState, tol: f64) -> bool {
    let Ok(f) = to_fock_fixed(s, CANONICAL_ORDERS) else {
        return false;
    };
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for x in [&f.a, &f.c] {
        for m in 1..x.len() {
            num += x[m - 1].conj() * x[m] * (m as f64).sqrt();
            den += x[m - 1].norm_sqr();
        }
    }
    let alpha = if den > 0.0 { num / den } else { C64::new(0.0, 0.0) };
    [&f.a, &f.c].iter().all(|x| {
        (1..x.len()).all(|m| {
            let lhs = x[m] * (m as f64).sqrt();
            let rhs = alpha * x[m - 1];
            (lhs - rhs).norm() <= tol * (lhs.norm() + rhs.norm())
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Voxel {
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub region: Region,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamGrid {
    pub voxels: Vec<Voxel>,
    /// `(k2, k3, k4)` on `(1 - k4)² + 4 k2 k3 = 0` inside the ranges.
    pub degenerate_surface: Vec<[f64; 3]>,
    /// `(k2, k3, k4)` on `k4 = k2 k3` inside the ranges.
    pub singular_surface: Vec<[f64; 3]>,
}

fn region_of(k2: f64, k3: f64, k4: f64) -> Region {
    match KMatrix::real(1.0, k2, k3, k4).and_then(|k| classify(&k, DEFAULT_CLASSIFY_TOL)) {
        Ok(c) => c.region,
        // k1 = 1 keeps K nonzero, so classification cannot fail
        Err(_) => unreachable!(),
    }
}

/// Classifies every grid point of `K = [[1, k2], [k3, k4]]` and solves both
/// surfaces for `k3` over the `(k2, k4)` grid.
pub fn param_grid_classify(k2: &GridRange, k3: &GridRange, k4: &GridRange) -> Result<ParamGrid> {
    let (g2, g3, g4) = (k2.points(), k3.points(), k4.points());
    let (n3, n4) = (g3.len(), g4.len());
    let voxels = (0..g2.len() * n3 * n4)
        .into_par_iter()
        .map(|i| {
            let (a, b, c) = (g2[i / (n3 * n4)], g3[(i / n4) % n3], g4[i % n4]);
            Voxel {
                k2: a,
                k3: b,
                k4: c,
                region: region_of(a, b, c),
            }
        })
        .collect();
    let (lo3, hi3) = (k3.start.min(k3.stop), k3.start.max(k3.stop));
    let mut degenerate_surface = Vec::new();
    let mut singular_surface = Vec::new();
    for &a in &g2 {
        if a == 0.0 {
            continue;
        }
        for &c in &g4 {
            let kd = -(1.0 - c).powi(2) / (4.0 * a);
            if (lo3..=hi3).contains(&kd) {
                degenerate_surface.push([a, kd, c]);
            }
            let ks = c / a;
            if (lo3..=hi3).contains(&ks) {
                singular_surface.push([a, ks, c]);
            }
        }
    }
    Ok(ParamGrid {
        voxels,
        degenerate_surface,
        singular_surface,
    })
}
