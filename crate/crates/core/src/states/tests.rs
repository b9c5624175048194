use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{rngs::StdRng, Rng, SeedableRng};

use super::*;
use crate::sao::theta_operator;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn kr(k1: f64, k2: f64, k3: f64, k4: f64) -> KMatrix {
    KMatrix::real(k1, k2, k3, k4).unwrap()
}

fn factorial_sqrt(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product::<f64>().sqrt()
}

fn rand_c(rng: &mut StdRng, r: f64) -> C64 {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Residuals of both recursion rows at every order `n < N`, evaluated at the
/// rotated eigenvalue.
fn recursion_rows_residual(k: &KMatrix, z: C64, f: &FockExpansion) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..f.n {
        let sn = (n as f64).sqrt();
        let sn1 = ((n + 1) as f64).sqrt();
        let row1 = k.k1() * sn1 * f.a[n + 1] + k.k2() * f.c[n] - z * f.a[n];
        let scale1 = (k.k1() * sn1 * f.a[n + 1]).norm() + (k.k2() * f.c[n]).norm() + (z * f.a[n]).norm();
        worst = worst.max(row1.norm() / scale1.max(1e-300));
        if n >= 1 {
            let row2 = k.k3() * sn * sn1 * f.a[n + 1] + k.k4() * sn * f.c[n] - z * f.c[n - 1];
            let scale2 =
                (k.k3() * sn * sn1 * f.a[n + 1]).norm() + (k.k4() * sn * f.c[n]).norm() + (z * f.c[n - 1]).norm();
            worst = worst.max(row2.norm() / scale2.max(1e-300));
        }
    }
    worst
}

#[test]
fn fock_solve_identity_gives_coherent_state() {
    let alpha = c(0.8, -0.3);
    let f = fock_solve(&kr(1.0, 0.0, 0.0, 1.0), alpha, c(1.0, 0.0), c(0.0, 0.0), 0.0, 25).unwrap();
    for n in 0..=25 {
        let expected = alpha.powu(n as u32) / factorial_sqrt(n);
        assert!((f.a[n] - expected).norm() < 1e-15, "n = {n}");
    }
    assert!(f.c.iter().all(|x| x.norm() == 0.0));
}

#[test]
fn fock_solve_first_row_aragone() {
    let f = fock_solve(&kr(1.0, 1.0, 0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 10).unwrap();
    assert!((f.a[1] - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn fock_solve_singular_reduction() {
    // β = z/(k1 + k4) = 1; c_{n+1} = (k4 β / k2) a_n = a_n, a_n = 1/√n!
    let f = fock_solve(&kr(1.0, 1.0, 1.0, 1.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 20).unwrap();
    assert!(f.c1_overridden);
    for n in 0..20 {
        assert!((f.c[n] - f.a[n]).norm() < 1e-14);
        assert!((f.a[n] - c(1.0 / factorial_sqrt(n), 0.0)).norm() < 1e-14);
    }
}

#[test]
fn fock_solve_singular_is_one_dimensional() {
    let k = kr(1.0, 2.0, 0.5, 1.0);
    let z0 = c(0.7, 0.4);
    let f1 = fock_solve(&k, z0, c(1.0, 0.0), c(0.0, 0.0), 0.0, 30).unwrap();
    let f2 = fock_solve(&k, z0, c(-0.3, 2.0), c(5.0, -1.0), 0.0, 30).unwrap();
    assert!(f1.ray_distance(&f2, 30) < 1e-13);
}

#[test]
fn fock_solve_satisfies_recursion_rows() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let k = KMatrix::new(
            rand_c(&mut rng, 1.0),
            rand_c(&mut rng, 1.0),
            rand_c(&mut rng, 1.0),
            rand_c(&mut rng, 1.0),
        )
        .unwrap();
        let sp = eigen_decompose(&k);
        if sp.chi_plus.norm().min(sp.chi_minus.norm()) < 0.3 {
            continue;
        }
        let z0 = rand_c(&mut rng, 1.0);
        let t = rng.gen_range(0.0..3.0);
        let f = fock_solve(&k, z0, rand_c(&mut rng, 1.0), rand_c(&mut rng, 1.0), t, 30).unwrap();
        assert!(recursion_rows_residual(&k, evolve(z0, t, 1.0), &f) < 1e-12);
    }
}

#[test]
fn fock_solve_rejects_inconsistent_seed_when_k1_vanishes() {
    let k = kr(0.0, 1.0, 1.0, 0.5);
    let err = fock_solve(&k, c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 10).unwrap_err();
    assert!(matches!(err, SusyError::NoEigenstate { .. }));
    // k2 c1 = z0 a0 is consistent; a1 comes from the seed
    let seed = FockSeed {
        a0: c(1.0, 0.0),
        c1: c(1.0, 0.0),
        a1: Some(c(0.2, 0.0)),
    };
    let f = fock_solve_seeded(&k, c(1.0, 0.0), seed, 0.0, 10).unwrap();
    assert!(recursion_rows_residual(&k, c(1.0, 0.0), &f) < 1e-13);
}

#[test]
fn fock_solve_nilpotent_has_no_coherent_eigenstate() {
    let k = kr(0.0, 1.0, 0.0, 0.0);
    assert!(fock_solve(&k, c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 10).is_err());
    let f = fock_solve(&k, c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 10).unwrap();
    assert!(f.eigen_residual(&k, c(0.0, 0.0)).unwrap() < 1e-15);
}

#[test]
fn fock_solve_needs_two_orders() {
    assert_eq!(
        fock_solve(&kr(1.0, 0.0, 0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 1),
        Err(SusyError::TruncationTooSmall(1))
    );
}

#[test]
fn generic_basis_diagonal_k() {
    // Â = diag(2a, a): upper eigenfunction |z/2⟩, lower |z⟩
    let k = kr(2.0, 0.0, 0.0, 1.0);
    let (za, zc) = generic_basis(&k, c(1.0, 0.0), 0.0).unwrap();
    assert_eq!(za.upper[0].beta, c(0.5, 0.0));
    assert_eq!(za.upper[1].beta, c(1.0, 0.0));
    assert!((za.upper[0].weight - c(2.0, 0.0)).norm() < 1e-15);
    assert!(za.upper[1].weight.norm() < 1e-15);
    assert!(za.lower.iter().all(|t| t.weight.norm() < 1e-15));
    assert!(zc.upper.iter().all(|t| t.weight.norm() < 1e-15));
    assert!(zc.lower[0].weight.norm() < 1e-15);
    assert!((zc.lower[1].weight - c(2.0, 0.0)).norm() < 1e-15);

    for s in [&za, &zc] {
        let f = to_fock(s, 1e-15).unwrap();
        let oracle = fock_solve(&k, c(1.0, 0.0), f.a[0], f.c[0], 0.0, f.n).unwrap();
        assert!(f.relative_distance(&oracle, f.n) < 1e-13);
    }
}

#[test]
fn generic_basis_at_zero_eigenvalue() {
    let (za, zc) = generic_basis(&theta_operator(0.4), c(0.0, 0.0), 0.0).unwrap();
    for t in za.upper.iter().chain(&za.lower).chain(&zc.upper).chain(&zc.lower) {
        assert_eq!(t.beta, c(0.0, 0.0));
    }
}

#[test]
fn generic_basis_matches_recursion_for_theta_quarter() {
    let k = theta_operator(PI / 4.0);
    let (za, zc) = generic_basis(&k, c(1.0, 0.0), 0.0).unwrap();
    let z = za.combine(c(0.4, -0.2), &zc, c(1.1, 0.3)).unwrap();
    let f = to_fock(&z, 1e-15).unwrap();
    let oracle = fock_solve(&k, c(1.0, 0.0), f.a[0], f.c[0], 0.0, f.n).unwrap();
    assert!(f.relative_distance(&oracle, f.n) < 1e-10);
}

#[test]
fn generic_basis_rejects_other_regions() {
    assert!(matches!(
        generic_basis(&kr(1.0, 1.0, 0.0, 1.0), c(1.0, 0.0), 0.0),
        Err(SusyError::WrongRegion {
            found: Region::Degenerate,
            ..
        })
    ));
    assert!(matches!(
        generic_basis(&kr(1.0, 1.0, 1.0, 1.0), c(1.0, 0.0), 0.0),
        Err(SusyError::WrongRegion {
            found: Region::Singular,
            ..
        })
    ));
}

#[test]
fn mus_basis_theta_quarter() {
    let k = theta_operator(PI / 4.0);
    let (zp, zm) = generic_mus_basis(&k, c(1.0, 0.0), 0.0).unwrap();
    let chi = 1.0 + 0.5f64.sqrt();
    assert!((zp.upper[0].weight - c(FRAC_1_SQRT_2 * chi, 0.0)).norm() < 1e-14);
    assert!((zp.lower[0].weight - c(chi - 1.0, 0.0)).norm() < 1e-14);
    assert!((zp.upper[0].beta - c(1.0 / chi, 0.0)).norm() < 1e-14);
    for s in [&zp, &zm] {
        let f = to_fock(s, 1e-15).unwrap();
        assert!(f.eigen_residual(&k, c(1.0, 0.0)).unwrap() < 1e-13);
    }
}

#[test]
fn mus_basis_at_zero_is_upper_only() {
    let (zp, zm) = generic_mus_basis(&theta_operator(1.0), c(0.0, 0.0), 0.0).unwrap();
    for s in [zp, zm] {
        assert_eq!(s.lower[0].weight, c(0.0, 0.0));
        assert!(s.upper[0].weight.norm() > 0.0);
    }
}

#[test]
fn mus_basis_rejects_degenerate() {
    assert!(generic_mus_basis(&kr(1.0, 1.0, 0.0, 1.0), c(1.0, 0.0), 0.0).is_err());
}

#[test]
fn mus_basis_without_k2_uses_other_eigenvector() {
    let k = kr(2.0, 0.0, 0.7, 1.0);
    let (zp, zm) = generic_mus_basis(&k, c(0.9, 0.2), 0.0).unwrap();
    for s in [&zp, &zm] {
        let f = to_fock(s, 1e-15).unwrap();
        assert!(f.norm() > 0.1);
        assert!(f.eigen_residual(&k, c(0.9, 0.2)).unwrap() < 1e-13);
    }
}

#[test]
fn mus_basis_from_generic_basis() {
    let k = KMatrix::new(c(0.8, 0.1), c(0.5, -0.4), c(-0.6, 0.2), c(0.3, 0.9)).unwrap();
    let z0 = c(0.6, -0.5);
    let sp = eigen_decompose(&k);
    let (za, zc) = generic_basis(&k, z0, 0.0).unwrap();
    let (zp, zm) = generic_mus_basis(&k, z0, 0.0).unwrap();
    for (chi, target) in [(sp.chi_plus, &zp), (sp.chi_minus, &zm)] {
        let built = za.combine(k.k2() * chi / k.k1(), &zc, (chi - k.k1()) / k.k1()).unwrap();
        let (f, g) = (to_fock(&built, 1e-15).unwrap(), to_fock(target, 1e-15).unwrap());
        let n = f.n.min(g.n);
        assert!(f.relative_distance(&g, n) < 1e-12);
    }
}

#[test]
fn degenerate_basis_aragone() {
    let k = kr(1.0, 1.0, 0.0, 1.0);
    let (za, zc) = degenerate_basis(&k, c(1.0, 0.0), 0.0).unwrap();
    // g′_A1(χ) = 2χ - k4 = 1, g_A1(χ) = χ² - k4 χ = 0
    assert_eq!(za.upper, vec![CoherentTerm::coherent(c(1.0, 0.0), c(1.0, 0.0))]);
    // g_A2 = k3 z = 0 and g′_A2 = 0
    assert!(za.lower.is_empty());
    // no |β⟩ part in Z_C^d upper since g′_C1 = 0
    assert!(zc.upper.iter().all(|t| t.derivative));
    for s in [&za, &zc] {
        let f = to_fock(s, 1e-15).unwrap();
        assert!(f.eigen_residual(&k, c(1.0, 0.0)).unwrap() < 1e-13);
        let oracle = fock_solve(&k, c(1.0, 0.0), f.a[0], f.c[0], 0.0, f.n).unwrap();
        assert!(f.relative_distance(&oracle, f.n) < 1e-12);
    }
}

#[test]
fn degenerate_basis_printed_entries() {
    // away from the Aragone point, the limit formula reproduces the printed
    // G^d entries, with the upper-left entry equal to 2χ - k4 = k1
    let (k1, k2, k4) = (c(0.7, 0.2), c(1.3, -0.4), c(-0.2, 0.5));
    let k3 = -(k1 - k4) * (k1 - k4) / (4.0 * k2);
    let k = KMatrix::new(k1, k2, k3, k4).unwrap();
    let z0 = c(0.4, 0.3);
    let chi = (k1 + k4) / 2.0;
    let beta = z0 / chi;
    let (za, zc) = degenerate_basis(&k, z0, 0.0).unwrap();
    let close = |a: C64, b: C64| (a - b).norm() < 1e-14;
    assert!(close(za.upper[0].weight, k1) && !za.upper[0].derivative);
    assert!(close(za.upper[1].weight, -(chi - k4) * beta));
    assert!(close(za.lower[0].weight, -k3 * beta * beta) && za.lower[0].derivative);
    assert!(close(zc.upper[0].weight, -k2 * chi * beta));
    assert!(close(zc.lower[0].weight, k1 * chi * beta) && !zc.lower[0].derivative);
    assert!(close(zc.lower[1].weight, -(k4 * k4 - k1 * k1) / 4.0 * beta * beta));
}

#[test]
fn degenerate_basis_is_limit_of_generic() {
    let (k1, k2, k4) = (c(0.9, -0.1), c(0.6, 0.3), c(0.2, 0.4));
    let k3 = -(k1 - k4) * (k1 - k4) / (4.0 * k2);
    let k = KMatrix::new(k1, k2, k3, k4).unwrap();
    let kp = KMatrix::new(k1, k2, k3 + 1e-6, k4).unwrap();
    let z0 = c(0.8, 0.5);
    let (da, dc) = degenerate_basis(&k, z0, 0.0).unwrap();
    let (ga, gc) = generic_basis(&kp, z0, 0.0).unwrap();
    for (d, g) in [(&da, &ga), (&dc, &gc)] {
        let fd = to_fock(d, 1e-15).unwrap();
        let fg = to_fock_fixed(g, fd.n).unwrap();
        assert!(fg.relative_distance(&fd, fd.n) < 1e-4);
    }
}

#[test]
fn degenerate_rejects_nilpotent_and_other_regions() {
    assert_eq!(
        degenerate_basis(&kr(0.0, 1.0, 0.0, 0.0), c(1.0, 0.0), 0.0),
        Err(SusyError::Nilpotent)
    );
    assert!(matches!(
        degenerate_mus(&theta_operator(0.3), c(1.0, 0.0), 0.0),
        Err(SusyError::WrongRegion { .. })
    ));
}

#[test]
fn degenerate_at_zero_is_finite() {
    let (za, zc) = degenerate_basis(&kr(1.0, 1.0, 0.0, 1.0), c(0.0, 0.0), 0.0).unwrap();
    for s in [za, zc] {
        let f = to_fock(&s, 1e-15).unwrap();
        assert!(f.a.iter().skip(2).chain(f.c.iter().skip(1)).all(|x| x.norm() == 0.0));
    }
}

#[test]
fn degenerate_mus_aragone() {
    let s = degenerate_mus(&kr(1.0, 1.0, 0.0, 1.0), c(1.0, 0.0), 0.0).unwrap();
    assert_eq!(s.upper[0].weight, c(-1.0, 0.0));
    assert_eq!(s.lower[0].weight, c(0.0, 0.0));
    assert_eq!(s.upper[0].beta, c(1.0, 0.0));
}

#[test]
fn degenerate_mus_equal_diagonal_has_no_lower_weight() {
    let s = degenerate_mus(&kr(1.5, 0.0, 2.0, 1.5), c(0.3, 0.1), 0.0).unwrap();
    assert_eq!(s.lower[0].weight, c(0.0, 0.0));
}

#[test]
fn degenerate_mus_with_vanishing_k1() {
    // k4² + 4 k2 k3 = 0 with k1 = 0
    let k = kr(0.0, 1.0, -0.25, 1.0);
    let s = degenerate_mus(&k, c(0.7, 0.2), 0.0).unwrap();
    let f = to_fock(&s, 1e-15).unwrap();
    assert!(f.norm() > 0.1);
    assert!(f.eigen_residual(&k, c(0.7, 0.2)).unwrap() < 1e-13);
}

#[test]
fn singular_state_example() {
    let k = kr(1.0, 1.0, 1.0, 1.0);
    let s = singular_state(&k, c(2.0, 0.0), 0.0).unwrap();
    assert_eq!(s.upper[0], CoherentTerm::coherent(c(1.0, 0.0), c(1.0, 0.0)));
    assert_eq!(s.lower[0], CoherentTerm::coherent(c(1.0, 0.0), c(1.0, 0.0)));
    let f = to_fock(&s, 1e-15).unwrap();
    let oracle = fock_solve(&k, c(2.0, 0.0), f.a[0], f.c[0], 0.0, f.n).unwrap();
    assert!(f.relative_distance(&oracle, f.n) < 1e-13);
}

#[test]
fn singular_state_forms_agree() {
    // (k2|β⟩, k4β|β⟩) = (k2/k1)·(k1|β⟩, k3β|β⟩)
    let (k1, k2, k3) = (c(0.5, 0.2), c(1.0, -0.3), c(0.4, 0.4));
    let k4 = k2 * k3 / k1;
    let k = KMatrix::new(k1, k2, k3, k4).unwrap();
    let s = singular_state(&k, c(0.9, -0.4), 0.0).unwrap();
    let beta = s.upper[0].beta;
    let ratio = k2 / k1;
    assert!((s.upper[0].weight - ratio * k1).norm() < 1e-14);
    assert!((s.lower[0].weight - ratio * k3 * beta).norm() < 1e-14);
}

#[test]
fn singular_state_at_zero() {
    let s = singular_state(&kr(1.0, 2.0, 0.5, 1.0), c(0.0, 0.0), 0.0).unwrap();
    assert_eq!(s.upper[0].weight, c(2.0, 0.0));
    assert_eq!(s.lower[0].weight, c(0.0, 0.0));
}

#[test]
fn singular_state_rejects_nilpotent() {
    assert_eq!(
        singular_state(&kr(1.0, 1.0, -1.0, -1.0), c(1.0, 0.0), 0.0),
        Err(SusyError::Nilpotent)
    );
}

#[test]
fn singular_state_without_right_column() {
    let k = kr(1.0, 0.0, 2.0, 0.0);
    let s = singular_state(&k, c(0.5, 0.5), 0.0).unwrap();
    let f = to_fock(&s, 1e-15).unwrap();
    assert!(f.norm() > 0.5);
    assert!(f.eigen_residual(&k, c(0.5, 0.5)).unwrap() < 1e-13);
}

#[test]
fn mixed_state_limits() {
    let k = theta_operator(0.6);
    let z0 = c(0.7, 0.3);
    let (zp, zm) = generic_mus_basis(&k, z0, 0.0).unwrap();
    let fp = to_fock(&zp, 1e-15).unwrap();
    let fm = to_fock(&zm, 1e-15).unwrap();
    let m0 = to_fock_fixed(&mixed_state(&k, z0, 0.0, 0.0, 1.3).unwrap(), fp.n).unwrap();
    assert!(m0.relative_distance(&fp, fp.n) < 1e-15);
    let m1 = to_fock_fixed(&mixed_state(&k, z0, 0.0, PI / 2.0, 0.0).unwrap(), fm.n).unwrap();
    assert!(m1.relative_distance(&fm, fm.n) < 1e-15);
}

#[test]
fn mixed_state_figure_one_state() {
    let k = theta_operator(PI / 4.0);
    let z0 = C64::from_polar(0.5, PI / 4.0);
    let m = mixed_state(&k, z0, 0.0, PI / 4.0, PI / 4.0).unwrap();
    let (zp, zm) = generic_mus_basis(&k, z0, 0.0).unwrap();
    let half = c(FRAC_1_SQRT_2, 0.0);
    let expected = zp.combine(half, &zm, C64::from_polar(FRAC_1_SQRT_2, PI / 4.0)).unwrap();
    let (f, g) = (to_fock(&m, 1e-15).unwrap(), to_fock(&expected, 1e-15).unwrap());
    assert!(f.relative_distance(&g, f.n.min(g.n)) < 1e-15);
    // weights: γ1± = k2 χ± (cos η, e^{iλ} sin η), γ2± carry the factor z
    let sp = eigen_decompose(&k);
    assert!((m.upper[1].weight - k.k2() * sp.chi_minus * C64::from_polar(FRAC_1_SQRT_2, PI / 4.0)).norm() < 1e-15);
    assert!((m.lower[0].weight - (sp.chi_plus - k.k1()) * z0 * FRAC_1_SQRT_2).norm() < 1e-15);
}

#[test]
fn mixed_state_requires_generic() {
    assert!(mixed_state(&kr(1.0, 1.0, 1.0, 1.0), c(1.0, 0.0), 0.0, 0.3, 0.0).is_err());
}

#[test]
fn to_fock_simple_terms() {
    let k = kr(1.0, 0.0, 0.0, 1.0);
    let mut s = singular_state(&kr(1.0, 1.0, 1.0, 1.0), c(0.0, 0.0), 0.0).unwrap();
    s.upper = vec![CoherentTerm::coherent(c(0.5, 0.5), c(0.0, 0.0))];
    s.lower = vec![];
    s.k = k;
    let f = to_fock(&s, 1e-12).unwrap();
    assert_eq!(f.a[0], c(0.5, 0.5));
    assert!(f.a.iter().skip(1).chain(&f.c).all(|x| x.norm() == 0.0));

    s.upper = vec![CoherentTerm::derivative(c(1.0, 0.0), c(0.0, 0.0))];
    let f = to_fock(&s, 1e-12).unwrap();
    for (n, x) in f.a.iter().enumerate() {
        assert_eq!(x.norm() > 0.0, n == 1);
    }
}

#[test]
fn to_fock_reports_overflow() {
    let s = generic_mus_basis(&theta_operator(PI / 4.0), c(40.0, 0.0), 0.0)
        .unwrap()
        .0;
    assert!(matches!(to_fock(&s, 1e-14), Err(SusyError::TruncationOverflow { .. })));
    assert!(to_fock_with_cap(&s, 1e-14, 2000).is_ok());
}

#[test]
fn to_fock_tail_within_tolerance() {
    let s = mixed_state(&theta_operator(0.9), c(2.0, 1.0), 0.0, 0.4, 0.2).unwrap();
    let f = to_fock(&s, 1e-14).unwrap();
    assert!(f.trunc_err <= 1e-14);
    let longer = to_fock_fixed(&s, f.n + 40).unwrap();
    let dropped: f64 = longer.flatten().iter().map(|x| x.norm_sqr()).sum::<f64>() - f.norm_sqr();
    assert!(dropped / f.norm_sqr() <= 1e-14);
}

#[test]
fn apply_sao_examples() {
    let alpha = c(0.3, 0.9);
    let identity = kr(1.0, 0.0, 0.0, 1.0);
    let f = fock_solve(&identity, alpha, c(1.0, 0.0), c(0.0, 0.0), 0.0, 30).unwrap();
    assert!(f.eigen_residual(&identity, alpha).unwrap() < 1e-15);

    let mut ground = fock_solve(&identity, c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), 0.0, 5).unwrap();
    ground.a[1] = c(0.0, 0.0);
    let g = apply_sao(&kr(1.0, 1.0, 0.0, 1.0), &ground).unwrap();
    assert_eq!(g.n, 3);
    assert!(g.norm() == 0.0);

    let k = theta_operator(0.5);
    let z0 = c(1.2, -0.4);
    let f = fock_solve(&k, z0, c(0.3, 0.2), c(-0.5, 1.0), 0.0, 60).unwrap();
    assert!(f.eigen_residual(&k, z0).unwrap() < 1e-10);

    let mut short = f.truncated(1);
    short.n = 1;
    assert!(apply_sao(&k, &short).is_err());
}

#[test]
fn time_evolution_rotates_eigenvalue() {
    let k = KMatrix::with_omega(c(1.0, 0.2), c(0.5, 0.0), c(0.3, -0.1), c(0.4, 0.0), 1.7).unwrap();
    let (z0, t) = (c(0.9, 0.3), 0.37);
    let z = evolve(z0, t, 1.7);
    let later = generic_basis(&k, z0, t).unwrap().0;
    let rotated = generic_basis(&k, z, 0.0).unwrap().0;
    let (f, g) = (to_fock(&later, 1e-15).unwrap(), to_fock(&rotated, 1e-15).unwrap());
    assert!(f.relative_distance(&g, f.n) < 1e-14);

    let fs = fock_solve(&k, z0, c(1.0, 0.0), c(0.5, 0.0), t, 30).unwrap();
    let fr = fock_solve(
        &k,
        z,
        c(1.0, 0.0),
        c(0.5, 0.0) * C64::from_polar(1.0, -1.7 * t),
        0.0,
        30,
    )
    .unwrap();
    assert!(fs.relative_distance(&fr, 30) < 1e-13);
}
