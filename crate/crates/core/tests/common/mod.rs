#![allow(dead_code)]

use std::f64::consts::PI;

use ptbench::PTMediumParams;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random medium strictly inside the unbroken phase, `|sin alpha| <= 0.95`.
pub fn unbroken_medium(rng: &mut StdRng) -> PTMediumParams {
    let eta2 = rng.random_range(0.1..10.0);
    let phi1 = rng.random_range(0.0..2.0 * PI);
    let phi2 = rng.random_range(0.0..2.0 * PI);
    let cap = (0.95 * eta2 / phi1.sin().abs()).min(5.0 * eta2);
    let eta1 = rng.random_range(0.0..cap);
    PTMediumParams::new(eta1, phi1, eta2, phi2).unwrap()
}

/// Random unbroken medium with `|sin(phi1)| >= 0.05` and `eta1 > 0`.
pub fn non_hermitian_medium(rng: &mut StdRng) -> PTMediumParams {
    loop {
        let m = unbroken_medium(rng);
        if m.phi1.sin().abs() >= 0.05 && m.eta1 * m.phi1.sin().abs() / m.eta2 > 1e-3 {
            return m;
        }
    }
}

/// Random medium in the broken phase, `eta2 < eta1 |sin phi1|`.
pub fn broken_medium(rng: &mut StdRng) -> PTMediumParams {
    let eta2 = rng.random_range(0.1..10.0);
    let phi1 = loop {
        let p = rng.random_range(0.0..2.0 * PI);
        if p.sin().abs() >= 0.1 {
            break p;
        }
    };
    let eta1 = eta2 / phi1.sin().abs() * rng.random_range(1.05..3.0);
    let phi2 = rng.random_range(0.0..2.0 * PI);
    PTMediumParams::new(eta1, phi1, eta2, phi2).unwrap()
}
