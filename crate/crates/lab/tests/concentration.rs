//! Quadratic forms in columns independent of a fixed matrix concentrate at
//! rate N^{-1/2}.

use stieltjes_core::{Family, SpectralMeasure};
use stieltjes_lab::{concentration_check, concentration_check_iid, RngStream};

fn spectrum() -> SpectralMeasure {
    SpectralMeasure::discretize(&Family::Uniform { a: 0.0, b: 2.0 }, 64).unwrap()
}

#[test]
fn iid_columns_concentrate() {
    let m = spectrum();
    let small = concentration_check_iid(&m, 128, 200, &mut RngStream::new(4, 0).rng()).unwrap();
    let large = concentration_check_iid(&m, 512, 200, &mut RngStream::new(4, 1).rng()).unwrap();
    let ratio = small.mean / large.mean;
    assert!((1.4..=3.0).contains(&ratio), "{ratio}");
}

#[test]
fn isometric_columns_concentrate() {
    let m = spectrum();
    let small = concentration_check(&m, 128, 64, 200, &mut RngStream::new(5, 0).rng()).unwrap();
    let large = concentration_check(&m, 512, 256, 200, &mut RngStream::new(5, 1).rng()).unwrap();
    let ratio = small.mean / large.mean;
    assert!((1.4..=3.0).contains(&ratio), "{ratio}");
}
