//! Shared generators and oracles for the integration suites.
#![allow(dead_code)]

use bimor::linalg::{c64, kron, to_complex, CMat, RMat, C64};
use bimor::system::{
    FirstOrderMatrices, Role, SecondOrderMatrices, StructuredBilinearSystem, TimeDelayMatrices,
};
use bimor::Template;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMat {
    to_complex(&RMat::from_fn(rows, cols, |_, _| scale * rng.random_range(-1.0..1.0)))
}

fn eye(n: usize, shift: f64) -> CMat {
    CMat::identity(n, n) * c64(shift, 0.0)
}

/// Random real system of the given template with `K(s)` comfortably
/// regular near the unit disc.
pub fn random_system(template: Template, rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize) -> StructuredBilinearSystem {
    let unit = 1.0 / (n as f64).sqrt();
    match template {
        Template::FirstOrder => StructuredBilinearSystem::first_order(FirstOrderMatrices {
            e: eye(n, 1.0) + rand_real(rng, n, n, 0.2 * unit),
            a: rand_real(rng, n, n, unit) - eye(n, 3.0),
            n: (0..m).map(|_| rand_real(rng, n, n, unit)).collect(),
            b: rand_real(rng, n, m, 1.0),
            c: rand_real(rng, p, n, 1.0),
        })
        .unwrap(),
        Template::SecondOrder => StructuredBilinearSystem::second_order(SecondOrderMatrices {
            m: eye(n, 1.0) + rand_real(rng, n, n, 0.2 * unit),
            d: eye(n, 1.0) + rand_real(rng, n, n, 0.3 * unit),
            k: eye(n, 4.0) + rand_real(rng, n, n, unit),
            np: (0..m).map(|_| rand_real(rng, n, n, unit)).collect(),
            nv: (0..m).map(|_| rand_real(rng, n, n, 0.3 * unit)).collect(),
            bu: rand_real(rng, n, m, 1.0),
            cp: rand_real(rng, p, n, 1.0),
            cv: rand_real(rng, p, n, 0.3),
        })
        .unwrap(),
        Template::TimeDelay => StructuredBilinearSystem::time_delay(TimeDelayMatrices {
            e: eye(n, 1.0) + rand_real(rng, n, n, 0.2 * unit),
            a: rand_real(rng, n, n, unit) - eye(n, 3.0),
            ad: rand_real(rng, n, n, 0.5 * unit),
            tau: rng.random_range(0.2..1.5),
            n: (0..m).map(|_| rand_real(rng, n, n, unit)).collect(),
            b: rand_real(rng, n, m, 1.0),
            c: rand_real(rng, p, n, 1.0),
        })
        .unwrap(),
        Template::Generic => panic!("no random generic systems"),
    }
}

/// Random point in the box `[-0.5, 0.5] x [-2, 2]i`.
pub fn random_point(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.random_range(-0.5..0.5), rng.random_range(-2.0..2.0))
}

pub fn random_points(rng: &mut ChaCha8Rng, k: usize) -> Vec<C64> {
    (0..k).map(|_| random_point(rng)).collect()
}

pub fn rel_err(a: &CMat, b: &CMat) -> f64 {
    bimor::linalg::spectral_norm(&(a - b)) / bimor::linalg::spectral_norm(a)
}

/// `G_k` with every Kronecker factor formed explicitly.
pub fn naive_transfer(sys: &StructuredBilinearSystem, s: &[C64]) -> CMat {
    let k = s.len();
    let m = sys.m();
    let id = |d: usize| CMat::identity(d, d);
    let kinv = |x: C64| sys.eval(Role::StiffK, x, 0).unwrap().try_inverse().unwrap();
    let naggr = |x: C64| sys.eval_n_aggregate(x, bimor::system::NLayout::RowConcat, 0).unwrap();
    let mut g = sys.eval(Role::OutputC, s[k - 1], 0).unwrap() * kinv(s[k - 1]);
    for j in 1..k {
        let sj = s[k - 1 - j];
        g = g * kron(&id(m.pow(j as u32 - 1)), &naggr(sj)) * kron(&id(m.pow(j as u32)), &kinv(sj));
    }
    g * kron(&id(m.pow(k as u32 - 1)), &sys.eval(Role::InputB, s[0], 0).unwrap())
}
