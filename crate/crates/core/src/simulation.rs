//! Fixed-step time integration with a linearly implicit midpoint rule.
//!
//! The bilinear coefficient is frozen at `u(t + dt/2)`, so each step costs
//! one linear solve. Second-order systems are advanced in companion form
//! `x = [q; q']`; the step is reduced to an `n x n` solve in the velocity.
//! Delay terms are taken from a history buffer at lag `tau / dt` steps and
//! treated explicitly.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{CMat, LuFactor, C64, DEFAULT_RANK_TOL};
use crate::system::{StructuredBilinearSystem, SystemData};
use crate::transfer::max_and_median;

/// Time-dependent input `u: t -> R^m`.
#[derive(Clone)]
pub struct InputSignal {
    m: usize,
    description: String,
    f: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl fmt::Debug for InputSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InputSignal")
            .field("m", &self.m)
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

impl InputSignal {
    pub fn new(m: usize, description: impl Into<String>, f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        InputSignal { m, description: description.into(), f: Arc::new(f) }
    }

    /// `u(t) = value` on every channel.
    pub fn constant(m: usize, value: f64) -> Self {
        Self::new(m, format!("constant {value}"), move |_| vec![value; m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (self.f)(t)
    }
}

/// Sampled simulation result on the grid `t_i = i dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `outputs[i]` is `y(t_i)`; real part for complex-valued models.
    pub outputs: Vec<Vec<f64>>,
    pub states: Option<Vec<Vec<C64>>>,
}

impl Trajectory {
    pub fn p(&self) -> usize {
        self.outputs.first().map_or(0, Vec::len)
    }

    pub fn max_abs_output(&self) -> f64 {
        self.outputs.iter().flatten().fold(0.0, |a, &y| a.max(y.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 1..=self.p() {
            let _ = write!(out, ",y{j}");
        }
        out.push('\n');
        for (t, y) in self.times.iter().zip(&self.outputs) {
            let _ = write!(out, "{t:.16e}");
            for v in y {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Scalar field the integrator runs in: `f64` for real models, `C64` otherwise.
trait Field: ComplexField<RealField = f64> + Copy {
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
}

impl Field for f64 {
    fn from_c64(z: C64) -> Self {
        z.re
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl Field for C64 {
    fn from_c64(z: C64) -> Self {
        z
    }
    fn to_c64(self) -> C64 {
        self
    }
}

fn cast<T: Field>(m: &CMat) -> DMatrix<T> {
    m.map(T::from_c64)
}

fn real<T: Field>(x: f64) -> T {
    T::from_real(x)
}

/// `base + Σ_j u_j mats_j`.
fn affine<T: Field>(base: &DMatrix<T>, mats: &[DMatrix<T>], u: &[f64], sign: f64) -> DMatrix<T> {
    let mut out = base.clone();
    for (mj, &uj) in mats.iter().zip(u) {
        if uj != 0.0 {
            out += mj * real::<T>(sign * uj);
        }
    }
    out
}

fn to_vec<T: Field>(u: &[f64]) -> DVector<T> {
    DVector::from_iterator(u.len(), u.iter().map(|&x| real(x)))
}

fn output<T: Field>(y: &DVector<T>) -> Vec<f64> {
    y.iter().map(|z| z.to_c64().re).collect()
}

fn step_count(tf: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) || !(tf >= 0.0 && tf.is_finite()) {
        return Err(Error::InvalidSize(format!("need dt > 0 and t_f >= 0, got dt={dt}, t_f={tf}")));
    }
    let steps = (tf / dt).round();
    if (steps * dt - tf).abs() > 1e-9 * tf.max(dt) {
        return Err(Error::InvalidSize(format!("t_f = {tf} is not a multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

/// Delay lag in steps: `tau / dt`, required to be a positive integer.
fn delay_lag(tau: f64, dt: f64) -> Result<usize> {
    let ratio = tau / dt;
    let lag = ratio.round();
    if lag < 1.0 || (ratio - lag).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::NonIntegerDelayRatio { tau, dt });
    }
    Ok(lag as usize)
}

/// Integrates `sys` from zero state (and zero delay history) to `tf`.
pub fn simulate(sys: &StructuredBilinearSystem, u: &InputSignal, tf: f64, dt: f64) -> Result<Trajectory> {
    simulate_full(sys, u, tf, dt, false)
}

/// As [`simulate`], optionally recording the state at every sample.
pub fn simulate_full(
    sys: &StructuredBilinearSystem,
    u: &InputSignal,
    tf: f64,
    dt: f64,
    keep_states: bool,
) -> Result<Trajectory> {
    if u.m() != sys.m() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} channels, system has m = {}",
            u.m(),
            sys.m()
        )));
    }
    let steps = step_count(tf, dt)?;
    if sys.is_real() {
        run::<f64>(sys, u, steps, dt, keep_states)
    } else {
        run::<C64>(sys, u, steps, dt, keep_states)
    }
}

fn run<T: Field>(sys: &StructuredBilinearSystem, u: &InputSignal, steps: usize, dt: f64, keep: bool) -> Result<Trajectory> {
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    match sys.data() {
        SystemData::FirstOrder(f) => {
            let zero = DMatrix::<T>::zeros(sys.n(), sys.n());
            first_order::<T>(&FirstOrderCore {
                e: cast(&f.e),
                a: cast(&f.a),
                ad: zero,
                lag: None,
                n: f.n.iter().map(cast).collect(),
                b: cast(&f.b),
                c: cast(&f.c),
            }, u, times, dt, keep)
        }
        SystemData::TimeDelay(t) => {
            // A zero delay is an undelayed system with A + Ad.
            let (a, ad, lag) = if t.tau == 0.0 {
                (cast(&(&t.a + &t.ad)), DMatrix::<T>::zeros(sys.n(), sys.n()), None)
            } else {
                (cast(&t.a), cast(&t.ad), Some(delay_lag(t.tau, dt)?))
            };
            first_order::<T>(&FirstOrderCore {
                e: cast(&t.e),
                a,
                ad,
                lag,
                n: t.n.iter().map(cast).collect(),
                b: cast(&t.b),
                c: cast(&t.c),
            }, u, times, dt, keep)
        }
        SystemData::SecondOrder(_) => second_order::<T>(sys, u, times, dt, keep),
        SystemData::Generic(_) => Err(Error::Unsupported("time simulation of Generic systems".into())),
    }
}

struct FirstOrderCore<T: Field> {
    e: DMatrix<T>,
    a: DMatrix<T>,
    ad: DMatrix<T>,
    lag: Option<usize>,
    n: Vec<DMatrix<T>>,
    b: DMatrix<T>,
    c: DMatrix<T>,
}

fn first_order<T: Field>(
    sys: &FirstOrderCore<T>,
    u: &InputSignal,
    times: Vec<f64>,
    dt: f64,
    keep: bool,
) -> Result<Trajectory> {
    let n = sys.e.nrows();
    let half = real::<T>(dt / 2.0);
    let mut history: Vec<DVector<T>> = Vec::new();
    let mut x = DVector::<T>::zeros(n);
    let mut outputs = Vec::with_capacity(times.len());
    let mut states = keep.then(Vec::new);
    let record = |x: &DVector<T>, outputs: &mut Vec<Vec<f64>>, states: &mut Option<Vec<Vec<C64>>>| {
        outputs.push(output(&(&sys.c * x)));
        if let Some(s) = states {
            s.push(x.iter().map(|z| z.to_c64()).collect());
        }
    };
    record(&x, &mut outputs, &mut states);
    if sys.lag.is_some() {
        history.push(x.clone());
    }
    for step in 0..times.len().saturating_sub(1) {
        let um = u.eval(times[step] + dt / 2.0);
        let au = affine(&sys.a, &sys.n, &um, 1.0);
        let lhs = &sys.e - &au * half;
        let mut rhs = &sys.e * &x + &au * &x * half + &sys.b * to_vec::<T>(&um) * real::<T>(dt);
        if let Some(lag) = sys.lag {
            // x(t - tau) averaged over the step; zero history before t = 0.
            let at = |i: isize| -> Option<&DVector<T>> { (i >= 0).then(|| &history[i as usize]) };
            let i0 = step as isize - lag as isize;
            let mut delayed = DVector::<T>::zeros(n);
            for xi in [at(i0), at(i0 + 1)].into_iter().flatten() {
                delayed += xi;
            }
            rhs += &sys.ad * delayed * half;
        }
        let lu = LuFactor::new(&lhs, DEFAULT_RANK_TOL).map_err(|_| Error::StepFailure { step })?;
        x = lu.solve(&DMatrix::from_column_slice(n, 1, rhs.as_slice())).column(0).into_owned();
        record(&x, &mut outputs, &mut states);
        if sys.lag.is_some() {
            history.push(x.clone());
        }
    }
    Ok(Trajectory { times, outputs, states })
}

/// Companion-form midpoint step reduced to the velocity:
/// `S v_1 = (2M − S) v_0 − dt K̃ q_0 + dt B u`, `q_1 = q_0 + dt/2 (v_0 + v_1)`,
/// with `S = M + dt/2 D̃ + dt²/4 K̃`, `K̃ = K − Σ u_j Np_j`, `D̃ = D − Σ u_j Nv_j`.
fn second_order<T: Field>(
    sys: &StructuredBilinearSystem,
    u: &InputSignal,
    times: Vec<f64>,
    dt: f64,
    keep: bool,
) -> Result<Trajectory> {
    let SystemData::SecondOrder(so) = sys.data() else { unreachable!("dispatch checked template") };
    let n = sys.n();
    let (m, d, k) = (cast::<T>(&so.m), cast::<T>(&so.d), cast::<T>(&so.k));
    let np: Vec<DMatrix<T>> = so.np.iter().map(cast).collect();
    let nv: Vec<DMatrix<T>> = so.nv.iter().map(cast).collect();
    let (bu, cp, cv) = (cast::<T>(&so.bu), cast::<T>(&so.cp), cast::<T>(&so.cv));
    let nv_zero = so.nv.iter().all(|x| x.iter().all(|z| *z == C64::new(0.0, 0.0)));
    let mut q = DVector::<T>::zeros(n);
    let mut v = DVector::<T>::zeros(n);
    let mut outputs = Vec::with_capacity(times.len());
    let mut states = keep.then(Vec::new);
    let record = |q: &DVector<T>, v: &DVector<T>, outputs: &mut Vec<Vec<f64>>, states: &mut Option<Vec<Vec<C64>>>| {
        outputs.push(output(&(&cp * q + &cv * v)));
        if let Some(s) = states {
            s.push(q.iter().chain(v.iter()).map(|z| z.to_c64()).collect());
        }
    };
    record(&q, &v, &mut outputs, &mut states);
    let (h, half, quarter) = (real::<T>(dt), real::<T>(dt / 2.0), real::<T>(dt * dt / 4.0));
    for step in 0..times.len().saturating_sub(1) {
        let um = u.eval(times[step] + dt / 2.0);
        let kt = affine(&k, &np, &um, -1.0);
        let dtl = if nv_zero { d.clone() } else { affine(&d, &nv, &um, -1.0) };
        let s = &m + &dtl * half + &kt * quarter;
        let rhs = (&m * real::<T>(2.0) - &s) * &v - &kt * &q * h + &bu * to_vec::<T>(&um) * h;
        let lu = LuFactor::new(&s, DEFAULT_RANK_TOL).map_err(|_| Error::StepFailure { step })?;
        let v1: DVector<T> = lu.solve(&DMatrix::from_column_slice(n, 1, rhs.as_slice())).column(0).into_owned();
        q += (&v + &v1) * half;
        v = v1;
        record(&q, &v, &mut outputs, &mut states);
    }
    Ok(Trajectory { times, outputs, states })
}

/// Per-sample relative output error `‖y − ŷ‖_2 / ‖y‖_2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// `NaN` where `‖y‖ = 0`.
    pub errors: Vec<f64>,
    /// Samples excluded because the reference output vanished.
    pub flagged: Vec<usize>,
}

impl ErrorSeries {
    pub fn max_and_median(&self) -> Option<(f64, f64)> {
        max_and_median(&self.errors)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,relerr\n");
        for (t, e) in self.times.iter().zip(&self.errors) {
            let _ = writeln!(out, "{t:.16e},{e:.16e}");
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn output_error(fom: &Trajectory, rom: &Trajectory) -> Result<ErrorSeries> {
    if fom.times.len() != rom.times.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples vs {} samples",
            fom.times.len(),
            rom.times.len()
        )));
    }
    if fom.p() != rom.p() {
        return Err(Error::GridMismatch(format!("{} outputs vs {} outputs", fom.p(), rom.p())));
    }
    if let Some(i) = fom
        .times
        .iter()
        .zip(&rom.times)
        .position(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
    {
        return Err(Error::GridMismatch(format!("sample {i} is at different times")));
    }
    let mut errors = Vec::with_capacity(fom.times.len());
    let mut flagged = Vec::new();
    for (i, (y, yr)) in fom.outputs.iter().zip(&rom.outputs).enumerate() {
        let den = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        let num = y.iter().zip(yr).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if den == 0.0 {
            errors.push(f64::NAN);
            flagged.push(i);
        } else {
            errors.push(num / den);
        }
    }
    Ok(ErrorSeries { times: fom.times.clone(), errors, flagged })
}
