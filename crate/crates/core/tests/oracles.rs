//! Solver output against closed-form transforms.

use num_complex::Complex64;
use stieltjes_core::{
    cdf_from_density, invert_density, solve_product, solve_product_chain, solve_product_grid, solve_sum,
    solve_sum_grid, solve_theorem1, CdmaScenario, ChainOptions, Family, HalfPlanePoint, JointChannelMeasure,
    SolverConfig, SpectralMeasure, TransmitterSpec, DEFAULT_SINR_EPSILON,
};
use stieltjes_oracles as oracle;

fn z(re: f64, im: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(re, im).unwrap()
}

fn pm(a: f64) -> SpectralMeasure {
    SpectralMeasure::point_mass(a).unwrap()
}

/// 20 points with `Im z` from 0.1 to 2 and `Re z` sweeping across [-1, 8].
fn point_mass_grid() -> Vec<HalfPlanePoint> {
    (0..20).map(|k| z(-1.0 + 9.0 * k as f64 / 19.0, 0.1 + 1.9 * k as f64 / 19.0)).collect()
}

#[test]
fn point_masses_add_and_multiply_exactly() {
    let cfg = SolverConfig::default();
    let grid = point_mass_grid();
    for (zz, r) in grid.iter().zip(solve_sum_grid(&[pm(2.0), pm(3.0)], &grid, &cfg)) {
        let s = r.unwrap();
        assert!((s.g - oracle::point_mass_transform(5.0, zz.value())).norm() < 1e-10);
        assert!(s.residual < 1e-10);
    }
    for (zz, r) in grid.iter().zip(solve_product_grid(&pm(2.0), &pm(3.0), &grid, &cfg)) {
        let s = r.unwrap();
        assert!((s.g - oracle::point_mass_transform(6.0, zz.value())).norm() < 1e-10);
        assert!(s.residual < 1e-10);
    }
}

fn semicircle(atoms: usize) -> SpectralMeasure {
    SpectralMeasure::discretize(&Family::Semicircle { variance: 1.0 }, atoms).unwrap()
}

#[test]
fn semicircles_add_their_variances() {
    let sc = semicircle(4096);
    let grid: Vec<HalfPlanePoint> = (0..20).map(|k| z(-3.0 + 6.0 * k as f64 / 19.0, 0.1)).collect();
    let cfg = SolverConfig::default();
    let worst = grid
        .iter()
        .zip(solve_sum_grid(&[sc.clone(), sc], &grid, &cfg))
        .map(|(zz, r)| (r.unwrap().g - oracle::semicircle_transform(2.0, zz.value())).norm())
        .fold(0.0, f64::max);
    assert!(worst < 2e-3, "{worst}");
}

#[test]
fn inverted_semicircle_sum_recovers_its_cdf() {
    let sc = semicircle(2048);
    let ms = [sc.clone(), sc];
    let cfg = SolverConfig::default();
    let grid: Vec<f64> = (0..801).map(|k| -3.5 + 7.0 * k as f64 / 800.0).collect();
    let density = invert_density(|zz| solve_sum(&ms, zz, &cfg).map(|s| s.g), &grid, 0.01).unwrap();
    let cdf = cdf_from_density(&density).unwrap();
    let gap = oracle::kolmogorov_to(&cdf, |x| oracle::semicircle_cdf(2.0, x));
    assert!(gap < 5e-3, "{gap}");
}

#[test]
fn symmetric_bernoullis_give_the_arcsine_law() {
    let b = SpectralMeasure::from_atoms([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let cfg = SolverConfig::default();
    let s = solve_sum(&[b.clone(), b.clone()], z(0.0, 1.0), &cfg).unwrap();
    assert!((s.g - oracle::arcsine_transform(Complex64::new(0.0, 1.0))).norm() < 1e-6);
    for re in [-2.5, -1.0, 0.3, 1.9] {
        let s = solve_sum(&[b.clone(), b.clone()], z(re, 0.5), &cfg).unwrap();
        assert!((s.g - oracle::arcsine_transform(Complex64::new(re, 0.5))).norm() < 1e-8);
    }
}

#[test]
fn product_with_identity_keeps_the_law() {
    let b = SpectralMeasure::from_atoms([(0.0, 0.5), (1.0, 0.5)]).unwrap();
    let zz = z(-0.25, 0.05);
    let s = solve_product(&b, &pm(1.0), zz, &SolverConfig::default()).unwrap();
    let direct = 0.5 * (oracle::point_mass_transform(0.0, zz.value()) + oracle::point_mass_transform(1.0, zz.value()));
    assert!((s.g - direct).norm() < 1e-10);
}

fn single_iid(alpha: f64, p: f64, s2: f64) -> CdmaScenario {
    CdmaScenario::new(
        vec![TransmitterSpec::iid(alpha, pm(p)).unwrap()],
        JointChannelMeasure::point_mass(&[1.0]).unwrap(),
        s2,
    )
    .unwrap()
}

#[test]
fn tse_hanly_grid() {
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for alpha in [0.25, 1.0, 2.0] {
        for p in [0.5, 1.0, 4.0] {
            for s2 in [0.01, 0.1, 1.0] {
                let sc = single_iid(alpha, p, s2);
                let s = solve_theorem1(&sc, z(-s2, DEFAULT_SINR_EPSILON), &cfg).unwrap();
                worst = worst.max((s.rho[0].re - oracle::tse_hanly_rho(alpha, p, s2)).abs());
            }
        }
    }
    assert!(worst < 1e-8, "{worst}");
    let s = solve_theorem1(&single_iid(1.0, 1.0, 0.1), z(-0.1, DEFAULT_SINR_EPSILON), &cfg).unwrap();
    let sinr = s.rho[0].re;
    assert!((sinr - (41f64.sqrt() - 1.0) / 2.0).abs() < 1e-8);
    assert!((oracle::to_db(sinr) - 4.317).abs() < 1e-3);
}

#[test]
fn single_iid_class_follows_marchenko_pastur() {
    let cfg = SolverConfig::default();
    for alpha in [0.3, 1.0, 1.7] {
        let sc = single_iid(alpha, 1.0, 0.0);
        for (re, im) in [(0.5, 0.2), (2.0, 0.05), (-1.0, 1.0)] {
            let s = solve_theorem1(&sc, z(re, im), &cfg).unwrap();
            let want = oracle::marchenko_pastur_transform(alpha, Complex64::new(re, im));
            assert!((s.g - want).norm() < 1e-8, "alpha {alpha}, z {re}+{im}i: {} vs {want}", s.g);
        }
    }
}

#[test]
fn single_precision_sum_tracks_double() {
    let b = SpectralMeasure::<f32>::from_atoms([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let zz = HalfPlanePoint::<f32>::new(0.3, 0.5).unwrap();
    let s = solve_sum(&[b.clone(), b], zz, &SolverConfig::default()).unwrap();
    let want = oracle::arcsine_transform(Complex64::new(0.3, 0.5));
    assert!((s.g.re as f64 - want.re).abs() < 1e-4 && (s.g.im as f64 - want.im).abs() < 1e-4);
}

#[test]
fn product_chain_multiplies_means() {
    let u = SpectralMeasure::discretize(&Family::Uniform { a: 1.0, b: 2.0 }, 64).unwrap();
    let grid = [z(3.0, 0.5), z(5.0, 0.2)];
    let cfg = SolverConfig::default();
    let opts = ChainOptions { grid_points: 2001, atoms: 256, ..ChainOptions::default() };
    let (law, states) = solve_product_chain(&[u.clone(), u.clone(), u], &grid, &opts, &cfg).unwrap();
    assert_eq!(states.len(), 2);
    assert!((law.mean() - 3.375).abs() < 2e-2, "{}", law.mean());
    assert!(law.min_location() >= 0.0);
    assert!(states.iter().all(|s| s.g.im > 0.0 && s.residual <= cfg.tolerance));
}
