//! Generators for the damped mass-spring chain and the delayed heated rod.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{to_complex, RMat};
use crate::simulation::InputSignal;
use crate::system::{SecondOrderMatrices, StructuredBilinearSystem, TimeDelayMatrices};

/// Linear chain parameters. Every mass is also tied to ground.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MsdParams {
    pub mass: f64,
    pub spring: f64,
    pub damper: f64,
    pub ground_spring: f64,
    pub ground_damper: f64,
}

impl Default for MsdParams {
    fn default() -> Self {
        MsdParams { mass: 1.0, spring: 2.0, damper: 1.0, ground_spring: 2.0, ground_damper: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodParams {
    pub tau: f64,
    pub bilinear_scale: f64,
}

impl Default for RodParams {
    fn default() -> Self {
        RodParams { tau: 1.0, bilinear_scale: 1.0 }
    }
}

/// `n` equally spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![b],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn tridiag(n: usize, lower: f64, diag: f64, upper: f64) -> RMat {
    RMat::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if i == j + 1 {
            lower
        } else if j == i + 1 {
            upper
        } else {
            0.0
        }
    })
}

fn unit(n: usize, i: usize) -> RMat {
    RMat::from_fn(n, 1, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// `diag(s) K diag(s)`.
fn congruence(k: &RMat, s: &[f64]) -> RMat {
    RMat::from_fn(k.nrows(), k.ncols(), |i, j| s[i] * k[(i, j)] * s[j])
}

/// Mass-spring-damper chain with force-dependent stiffness.
///
/// SISO: `Bu = e_1`, `Cp = e_2ᵀ`, `Np = -S K S` with `S = diag(linspace(0.2, 0, n))`.
/// MIMO: `Bu = [e_1, -e_n]`, `Cp = [e_2, e_5]ᵀ`, `Np_1 = -S_1 K S_1`,
/// `Np_2 = S_2 K S_2` with `S_2 = diag(linspace(0, 0.2, n))`.
pub fn make_msd(n: usize, mimo: bool, params: MsdParams) -> Result<StructuredBilinearSystem> {
    if n < 5 {
        return Err(Error::InvalidSize(format!("mass-spring chain needs n >= 5, got {n}")));
    }
    let p = params;
    if [p.mass, p.spring, p.damper, p.ground_spring, p.ground_damper].iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidSize("mass-spring parameters must be positive".into()));
    }
    let eye = RMat::identity(n, n);
    let m = &eye * p.mass;
    let k = tridiag(n, -1.0, 2.0, -1.0) * p.spring + &eye * p.ground_spring;
    let d = tridiag(n, -1.0, 2.0, -1.0) * p.damper + &eye * p.ground_damper;
    let s1 = linspace(0.2, 0.0, n);
    let np1 = -congruence(&k, &s1);
    let (np, bu, cp) = if mimo {
        let s2 = linspace(0.0, 0.2, n);
        let np2 = congruence(&k, &s2);
        let mut bu = RMat::zeros(n, 2);
        bu[(0, 0)] = 1.0;
        bu[(n - 1, 1)] = -1.0;
        let mut cp = RMat::zeros(2, n);
        cp[(0, 1)] = 1.0;
        cp[(1, 4)] = 1.0;
        (vec![np1, np2], bu, cp)
    } else {
        (vec![np1], unit(n, 0), unit(n, 1).transpose())
    };
    let inputs = bu.ncols();
    let outputs = cp.nrows();
    StructuredBilinearSystem::second_order(SecondOrderMatrices {
        m: to_complex(&m),
        d: to_complex(&d),
        k: to_complex(&k),
        np: np.iter().map(to_complex).collect(),
        nv: vec![to_complex(&RMat::zeros(n, n)); inputs],
        bu: to_complex(&bu),
        cp: to_complex(&cp),
        cv: to_complex(&RMat::zeros(outputs, n)),
    })
}

/// Central-difference discretization of the delayed heated rod on `(0, π)`
/// with `n` interior nodes, distributed input and mean-value output.
pub fn make_heated_rod(n: usize, params: RodParams) -> Result<StructuredBilinearSystem> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("heated rod needs n >= 3, got {n}")));
    }
    let h = PI / (n + 1) as f64;
    let sines: Vec<f64> = (1..=n).map(|i| (i as f64 * h).sin()).collect();
    let diag = |scale: f64| RMat::from_fn(n, n, |i, j| if i == j { scale * sines[i] } else { 0.0 });
    let a = tridiag(n, 1.0, -2.0, 1.0) / (h * h) - diag(2.0);
    StructuredBilinearSystem::time_delay(TimeDelayMatrices {
        e: to_complex(&RMat::identity(n, n)),
        a: to_complex(&a),
        ad: to_complex(&diag(2.0)),
        tau: params.tau,
        n: vec![to_complex(&diag(params.bilinear_scale))],
        b: to_complex(&RMat::from_element(n, 1, 1.0)),
        c: to_complex(&RMat::from_element(1, n, 1.0 / n as f64)),
    })
}

/// Excitation used in the experiments: `msd_siso`, `msd_mimo` or `rod`.
pub fn standard_input(name: &str) -> Result<InputSignal> {
    match name {
        "msd_siso" => Ok(InputSignal::new(1, "sin(200t) + 200", |t| vec![(200.0 * t).sin() + 200.0])),
        "msd_mimo" => Ok(InputSignal::new(2, "[sin(200t) + 200, -cos(200t) - 200]", |t| {
            vec![(200.0 * t).sin() + 200.0, -(200.0 * t).cos() - 200.0]
        })),
        "rod" => Ok(InputSignal::new(1, "cos(10t)/20 + cos(5t)/20", |t| {
            vec![(10.0 * t).cos() / 20.0 + (5.0 * t).cos() / 20.0]
        })),
        other => Err(Error::UnknownName(format!("no standard input named {other:?}"))),
    }
}
