//! Random operators per region, random states, and a dense truncated-Fock
//! evaluation of ⟨ξ⟩, ⟨ξ²⟩, ⟨μ⟩, ⟨μ²⟩ used as an oracle.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::Rng;
use susy_coherent::observables::MomentKind;
use susy_coherent::{
    classify, degenerate_basis, degenerate_mus, eigen_decompose, generic_basis, generic_mus_basis, mixed_state,
    singular_state, to_fock_fixed, KMatrix, Region, SuperState, DEFAULT_CLASSIFY_TOL,
};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Uniform in the disc of radius `r`.
pub fn rand_c(rng: &mut StdRng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Generic,
    Degenerate,
    Singular,
}

pub const FAMILIES: [Family; 3] = [Family::Generic, Family::Degenerate, Family::Singular];

fn well_separated(k: &KMatrix) -> bool {
    let sp = eigen_decompose(k);
    let n = k.norm();
    sp.chi_plus.norm().min(sp.chi_minus.norm()) >= 0.25 * n && k.k1().norm() >= 0.1 * n
}

/// Unit-norm generic `K` with both eigenvalues of size comparable to `‖K‖` and well
/// apart from each other.
pub fn generic_k(rng: &mut StdRng) -> KMatrix {
    loop {
        let k = KMatrix::new(rand_c(rng, 1.0), rand_c(rng, 1.0), rand_c(rng, 1.0), rand_c(rng, 1.0)).unwrap();
        let sp = eigen_decompose(&k);
        if sp.region.region.is_generic() && well_separated(&k) && (sp.chi_plus - sp.chi_minus).norm() >= 0.1 * k.norm()
        {
            return unit(k);
        }
    }
}

/// `k3 = -(k1 - k4)² / (4 k2)`.
pub fn degenerate_k(rng: &mut StdRng) -> KMatrix {
    loop {
        let (k1, k2, k4) = (rand_c(rng, 1.0), rand_c(rng, 1.0), rand_c(rng, 1.0));
        if k2.norm() < 0.2 {
            continue;
        }
        let k3 = -(k1 - k4) * (k1 - k4) / (4.0 * k2);
        let k = KMatrix::new(k1, k2, k3, k4).unwrap();
        if eigen_decompose(&k).region.region == Region::Degenerate && well_separated(&k) {
            return unit(k);
        }
    }
}

/// Rank one `u vᵀ` with a trace comparable to `‖K‖`.
pub fn singular_k(rng: &mut StdRng) -> KMatrix {
    loop {
        let (u1, u2, v1, v2) = (rand_c(rng, 1.0), rand_c(rng, 1.0), rand_c(rng, 1.0), rand_c(rng, 1.0));
        let k = KMatrix::new(u1 * v1, u1 * v2, u2 * v1, u2 * v2).unwrap();
        let ok = classify(&k, DEFAULT_CLASSIFY_TOL).map(|c| c.region == Region::Singular && !c.degenerate);
        if ok == Ok(true) && k.trace().norm() >= 0.25 * k.norm() && k.k1().norm() >= 0.1 * k.norm() {
            return unit(k);
        }
    }
}

pub fn k_of(family: Family, rng: &mut StdRng) -> KMatrix {
    match family {
        Family::Generic => generic_k(rng),
        Family::Degenerate => degenerate_k(rng),
        Family::Singular => singular_k(rng),
    }
}

fn unit(k: KMatrix) -> KMatrix {
    k.scaled(C64::new(1.0 / k.norm(), 0.0)).unwrap()
}

/// `|z0| ≤ zmax`, further limited so every `|β| = |z0/χ|` stays below `bmax`.
pub fn z0_for(k: &KMatrix, rng: &mut StdRng, zmax: f64, bmax: f64) -> C64 {
    let sp = eigen_decompose(k);
    let chi = match sp.region.region {
        Region::Singular => sp.trace.norm(),
        _ => sp.chi_plus.norm().min(sp.chi_minus.norm()),
    };
    rand_c(rng, zmax.min(bmax * chi))
}

/// Every closed-form state the family offers at `(k, z0, t)`.
pub fn family_states(family: Family, k: &KMatrix, z0: C64, t: f64) -> Vec<SuperState> {
    match family {
        Family::Generic => {
            let (za, zc) = generic_basis(k, z0, t).unwrap();
            let (zp, zm) = generic_mus_basis(k, z0, t).unwrap();
            vec![za, zc, zp, zm, mixed_state(k, z0, t, 0.6, 1.3).unwrap()]
        }
        Family::Degenerate => {
            let (za, zc) = degenerate_basis(k, z0, t).unwrap();
            vec![za, zc, degenerate_mus(k, z0, t).unwrap()]
        }
        Family::Singular => vec![singular_state(k, z0, t).unwrap()],
    }
}

/// Random superposition within the eigenspace of one family.
pub fn random_state(family: Family, k: &KMatrix, z0: C64, t: f64, rng: &mut StdRng) -> SuperState {
    let states = family_states(family, k, z0, t);
    let mut s = states[0].scaled(rand_c(rng, 1.0) + 0.1);
    if family != Family::Singular {
        let (a, b) = match family {
            Family::Generic => (&states[2], &states[3]),
            _ => (&states[0], &states[1]),
        };
        s = a.combine(rand_c(rng, 1.0), b, rand_c(rng, 1.0)).unwrap();
    }
    s
}

/// Dense `⟨O⟩` from truncated Fock vectors and ladder matrices.
pub fn dense_expectation(s: &SuperState, kind: MomentKind, n: usize) -> f64 {
    let f = to_fock_fixed(s, n).unwrap();
    let mut num = c(0.0, 0.0);
    let mut den = 0.0;
    for v in [&f.a, &f.c] {
        let w = apply_dense(kind, v);
        num += v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum::<C64>();
        den += v.iter().map(|x| x.norm_sqr()).sum::<f64>();
    }
    num.re / den
}

fn apply_dense(kind: MomentKind, v: &[C64]) -> Vec<C64> {
    let n = v.len() + 2;
    let mut x: Vec<C64> = v.to_vec();
    x.resize(n, c(0.0, 0.0));
    let lower = |x: &[C64]| -> Vec<C64> {
        (0..n)
            .map(|j| {
                if j + 1 < n {
                    x[j + 1] * ((j + 1) as f64).sqrt()
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect()
    };
    let raise = |x: &[C64]| -> Vec<C64> {
        (0..n)
            .map(|j| {
                if j > 0 {
                    x[j - 1] * (j as f64).sqrt()
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect()
    };
    let xi = |x: &[C64]| -> Vec<C64> {
        raise(x)
            .iter()
            .zip(lower(x))
            .map(|(p, q)| (p + q) * FRAC_1_SQRT_2)
            .collect()
    };
    let mu = |x: &[C64]| -> Vec<C64> {
        raise(x)
            .iter()
            .zip(lower(x))
            .map(|(p, q)| (p - q) * c(0.0, FRAC_1_SQRT_2))
            .collect()
    };
    let out = match kind {
        MomentKind::Overlap => x,
        MomentKind::Xi => xi(&x),
        MomentKind::Xi2 => xi(&xi(&x)),
        MomentKind::Mu => mu(&x),
        MomentKind::Mu2 => mu(&mu(&x)),
    };
    out[..v.len()].to_vec()
}
