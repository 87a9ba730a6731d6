//! iid and isometric transmitters side by side.

use stieltjes_core::{
    sinr, solve_theorem1, CdmaScenario, Family, HalfPlanePoint, JointChannelMeasure, SignatureKind, SolverConfig,
    SpectralMeasure, TransmitterSpec, DEFAULT_SINR_EPSILON,
};

fn exponential(atoms: usize) -> SpectralMeasure {
    SpectralMeasure::discretize(&Family::Exponential { mean: 1.0 }, atoms).unwrap()
}

fn mixed(noise: f64) -> CdmaScenario {
    CdmaScenario::new(
        vec![
            TransmitterSpec::iid(0.8, exponential(16)).unwrap(),
            TransmitterSpec::isometric(0.6, SpectralMeasure::point_mass(1.0).unwrap()).unwrap(),
        ],
        JointChannelMeasure::independent(&[exponential(16), exponential(16)]).unwrap(),
        noise,
    )
    .unwrap()
}

#[test]
fn mixed_kinds_converge_tightly() {
    let sc = mixed(0.1);
    let cfg = SolverConfig::default();
    for (re, im) in [(-0.1, DEFAULT_SINR_EPSILON), (0.5, 0.5), (2.0, 0.05), (-1.0, 2.0)] {
        let s = solve_theorem1(&sc, HalfPlanePoint::new(re, im).unwrap(), &cfg).unwrap();
        assert!(s.residual < 1e-10, "{re}+{im}i: {}", s.residual);
        assert!(s.g.im > 0.0 && s.rho.iter().all(|r| r.im > 0.0));
    }
}

fn single(kind: SignatureKind, alpha: f64) -> CdmaScenario {
    CdmaScenario::new(
        vec![TransmitterSpec::new(alpha, kind, exponential(32)).unwrap()],
        JointChannelMeasure::independent(&[exponential(32)]).unwrap(),
        0.2,
    )
    .unwrap()
}

#[test]
fn kinds_agree_at_vanishing_load() {
    let cfg = SolverConfig::default();
    let z = HalfPlanePoint::new(-0.2, DEFAULT_SINR_EPSILON).unwrap();
    let iid = solve_theorem1(&single(SignatureKind::Iid, 1e-6), z, &cfg).unwrap();
    let iso = solve_theorem1(&single(SignatureKind::Isometric, 1e-6), z, &cfg).unwrap();
    assert!((iid.rho[0] - iso.rho[0]).norm() < 1e-4);
}

#[test]
fn isometric_signatures_beat_iid_at_load() {
    let cfg = SolverConfig::default();
    let iid = sinr(&single(SignatureKind::Iid, 0.9), 1.0, 0, DEFAULT_SINR_EPSILON, &cfg).unwrap();
    let iso = sinr(&single(SignatureKind::Isometric, 0.9), 1.0, 0, DEFAULT_SINR_EPSILON, &cfg).unwrap();
    assert!(iso > iid, "{iso} vs {iid}");
}
