//! Structured bilinear systems as evaluable matrix-function quadruples
//! `(C(s), K(s), N_1(s)..N_m(s), B(s))`.
//!
//! Closed-form templates (first-order, second-order, time-delay) provide
//! analytic `s`-derivatives of any order; the generic template carries
//! user-supplied evaluators up to a declared order.

mod json;

pub use json::{Entry, MatrixJson, SystemFile};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, hstack, is_real, vstack, LuFactor, CMat, C64, DEFAULT_RANK_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Template {
    FirstOrder,
    SecondOrder,
    TimeDelay,
    Generic,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Template::FirstOrder => "FirstOrder",
            Template::SecondOrder => "SecondOrder",
            Template::TimeDelay => "TimeDelay",
            Template::Generic => "Generic",
        };
        f.write_str(s)
    }
}

/// Selects one member of the matrix-function quadruple. `BilinN(j)` uses a
/// zero-based input index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    OutputC,
    StiffK,
    BilinN(usize),
    InputB,
}

/// How the bilinear terms are concatenated: `RowConcat` is
/// `[N_1(s) ... N_m(s)]` (n x mn), `ColStack` stacks them vertically (mn x n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NLayout {
    RowConcat,
    ColStack,
}

/// `E x' = A x + sum_j N_j x u_j + B u`, `y = C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderMatrices {
    pub e: CMat,
    pub a: CMat,
    pub n: Vec<CMat>,
    pub b: CMat,
    pub c: CMat,
}

/// `M q'' + D q' + K q = sum_j (Np_j q + Nv_j q') u_j + Bu u`, `y = Cp q + Cv q'`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderMatrices {
    pub m: CMat,
    pub d: CMat,
    pub k: CMat,
    pub np: Vec<CMat>,
    pub nv: Vec<CMat>,
    pub bu: CMat,
    pub cp: CMat,
    pub cv: CMat,
}

/// `E x' = A x + Ad x(t - tau) + sum_j N_j x u_j + B u`, `y = C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeDelayMatrices {
    pub e: CMat,
    pub a: CMat,
    pub ad: CMat,
    pub tau: f64,
    pub n: Vec<CMat>,
    pub b: CMat,
    pub c: CMat,
}

/// Evaluates `d^order/ds^order` of the selected matrix function at `s`.
pub type Evaluator = Arc<dyn Fn(Role, C64, usize) -> CMat + Send + Sync>;

#[derive(Clone)]
pub struct GenericFunctions {
    pub eval: Evaluator,
    pub max_order: usize,
}

impl fmt::Debug for GenericFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericFunctions")
            .field("max_order", &self.max_order)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum SystemData {
    FirstOrder(FirstOrderMatrices),
    SecondOrder(SecondOrderMatrices),
    TimeDelay(TimeDelayMatrices),
    Generic(GenericFunctions),
}

/// A structured bilinear system with `n` states, `m` inputs and `p` outputs.
/// Immutable once built.
#[derive(Clone, Debug)]
pub struct StructuredBilinearSystem {
    n: usize,
    m: usize,
    p: usize,
    data: SystemData,
}

fn check_shape(name: &str, mat: &CMat, rows: usize, cols: usize) -> Result<()> {
    if mat.nrows() != rows || mat.ncols() != cols {
        return Err(Error::InvalidSystem(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    if !all_finite(mat) {
        return Err(Error::InvalidSystem(format!("{name} has non-finite entries")));
    }
    Ok(())
}

fn check_list(name: &str, mats: &[CMat], count: usize, n: usize) -> Result<()> {
    if mats.len() != count {
        return Err(Error::InvalidSystem(format!(
            "{name} has {} matrices, expected {count}",
            mats.len()
        )));
    }
    for (j, mat) in mats.iter().enumerate() {
        check_shape(&format!("{name}[{j}]"), mat, n, n)?;
    }
    Ok(())
}

fn check_dims(n: usize, m: usize, p: usize) -> Result<()> {
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::InvalidSystem(format!(
            "dimensions must be positive, got n={n}, m={m}, p={p}"
        )));
    }
    Ok(())
}

fn zeros_like(mat: &CMat) -> CMat {
    CMat::zeros(mat.nrows(), mat.ncols())
}

impl StructuredBilinearSystem {
    pub fn first_order(mats: FirstOrderMatrices) -> Result<Self> {
        let n = mats.a.nrows();
        let m = mats.b.ncols();
        let p = mats.c.nrows();
        check_dims(n, m, p)?;
        check_shape("E", &mats.e, n, n)?;
        check_shape("A", &mats.a, n, n)?;
        check_list("N", &mats.n, m, n)?;
        check_shape("B", &mats.b, n, m)?;
        check_shape("C", &mats.c, p, n)?;
        Ok(Self { n, m, p, data: SystemData::FirstOrder(mats) })
    }

    pub fn second_order(mats: SecondOrderMatrices) -> Result<Self> {
        let n = mats.k.nrows();
        let m = mats.bu.ncols();
        let p = mats.cp.nrows();
        check_dims(n, m, p)?;
        check_shape("M", &mats.m, n, n)?;
        check_shape("D", &mats.d, n, n)?;
        check_shape("K", &mats.k, n, n)?;
        check_list("Np", &mats.np, m, n)?;
        check_list("Nv", &mats.nv, m, n)?;
        check_shape("Bu", &mats.bu, n, m)?;
        check_shape("Cp", &mats.cp, p, n)?;
        check_shape("Cv", &mats.cv, p, n)?;
        Ok(Self { n, m, p, data: SystemData::SecondOrder(mats) })
    }

    pub fn time_delay(mats: TimeDelayMatrices) -> Result<Self> {
        let n = mats.a.nrows();
        let m = mats.b.ncols();
        let p = mats.c.nrows();
        check_dims(n, m, p)?;
        if !(mats.tau >= 0.0 && mats.tau.is_finite()) {
            return Err(Error::InvalidSystem(format!("delay must be finite and >= 0, got {}", mats.tau)));
        }
        check_shape("E", &mats.e, n, n)?;
        check_shape("A", &mats.a, n, n)?;
        check_shape("Ad", &mats.ad, n, n)?;
        check_list("N", &mats.n, m, n)?;
        check_shape("B", &mats.b, n, m)?;
        check_shape("C", &mats.c, p, n)?;
        Ok(Self { n, m, p, data: SystemData::TimeDelay(mats) })
    }

    /// Wraps user evaluators. `eval(role, s, q)` must return the `q`-th
    /// derivative for every `q <= max_order`.
    pub fn generic(n: usize, m: usize, p: usize, max_order: usize, eval: Evaluator) -> Result<Self> {
        check_dims(n, m, p)?;
        Ok(Self {
            n,
            m,
            p,
            data: SystemData::Generic(GenericFunctions { eval, max_order }),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn data(&self) -> &SystemData {
        &self.data
    }

    pub fn template(&self) -> Template {
        match self.data {
            SystemData::FirstOrder(_) => Template::FirstOrder,
            SystemData::SecondOrder(_) => Template::SecondOrder,
            SystemData::TimeDelay(_) => Template::TimeDelay,
            SystemData::Generic(_) => Template::Generic,
        }
    }

    /// Highest derivative order that can be evaluated (`None` = unbounded).
    pub fn max_derivative_order(&self) -> Option<usize> {
        match &self.data {
            SystemData::Generic(g) => Some(g.max_order),
            _ => None,
        }
    }

    /// The delay of a time-delay system.
    pub fn tau(&self) -> Option<f64> {
        match &self.data {
            SystemData::TimeDelay(td) => Some(td.tau),
            _ => None,
        }
    }

    /// True when all stored matrices are real. Generic systems report false.
    pub fn is_real(&self) -> bool {
        match &self.data {
            SystemData::FirstOrder(f) => {
                [&f.e, &f.a, &f.b, &f.c].iter().all(|x| is_real(x)) && f.n.iter().all(is_real)
            }
            SystemData::SecondOrder(s) => {
                [&s.m, &s.d, &s.k, &s.bu, &s.cp, &s.cv].iter().all(|x| is_real(x))
                    && s.np.iter().all(is_real)
                    && s.nv.iter().all(is_real)
            }
            SystemData::TimeDelay(t) => {
                [&t.e, &t.a, &t.ad, &t.b, &t.c].iter().all(|x| is_real(x)) && t.n.iter().all(is_real)
            }
            SystemData::Generic(_) => false,
        }
    }

    /// `order`-th `s`-derivative of the selected matrix function at `s`.
    pub fn eval(&self, role: Role, s: C64, order: usize) -> Result<CMat> {
        if let Role::BilinN(j) = role {
            if j >= self.m {
                return Err(Error::DimensionMismatch(format!(
                    "bilinear index {j} out of range for m = {}",
                    self.m
                )));
            }
        }
        let out = match &self.data {
            SystemData::FirstOrder(f) => match role {
                Role::StiffK => match order {
                    0 => &f.e * s - &f.a,
                    1 => f.e.clone(),
                    _ => zeros_like(&f.e),
                },
                Role::OutputC => constant(&f.c, order),
                Role::InputB => constant(&f.b, order),
                Role::BilinN(j) => constant(&f.n[j], order),
            },
            SystemData::SecondOrder(so) => match role {
                Role::StiffK => match order {
                    0 => &so.m * (s * s) + &so.d * s + &so.k,
                    1 => &so.m * (s * 2.0) + &so.d,
                    2 => &so.m * C64::new(2.0, 0.0),
                    _ => zeros_like(&so.m),
                },
                Role::OutputC => linear_in_s(&so.cp, &so.cv, s, order),
                Role::BilinN(j) => linear_in_s(&so.np[j], &so.nv[j], s, order),
                Role::InputB => constant(&so.bu, order),
            },
            SystemData::TimeDelay(td) => match role {
                Role::StiffK => {
                    let decay = (-s * td.tau).exp();
                    if order == 0 {
                        &td.e * s - &td.a - &td.ad * decay
                    } else {
                        // d^q/ds^q e^{-s tau} = (-tau)^q e^{-s tau}
                        let factor = C64::new((-td.tau).powi(order as i32), 0.0) * decay;
                        let lead = if order == 1 { td.e.clone() } else { zeros_like(&td.e) };
                        lead - &td.ad * factor
                    }
                }
                Role::OutputC => constant(&td.c, order),
                Role::InputB => constant(&td.b, order),
                Role::BilinN(j) => constant(&td.n[j], order),
            },
            SystemData::Generic(g) => {
                if order > g.max_order {
                    return Err(Error::UnsupportedDerivative {
                        requested: order,
                        declared: g.max_order,
                    });
                }
                let out = (g.eval)(role, s, order);
                let (r, c) = self.role_shape(role);
                if out.nrows() != r || out.ncols() != c {
                    return Err(Error::DimensionMismatch(format!(
                        "generic evaluator returned {}x{} for {role:?}, expected {r}x{c}",
                        out.nrows(),
                        out.ncols()
                    )));
                }
                out
            }
        };
        Ok(out)
    }

    /// Shape of the matrix returned for `role`.
    pub fn role_shape(&self, role: Role) -> (usize, usize) {
        match role {
            Role::OutputC => (self.p, self.n),
            Role::StiffK | Role::BilinN(_) => (self.n, self.n),
            Role::InputB => (self.n, self.m),
        }
    }

    /// All bilinear terms at `s`, concatenated per `layout`.
    pub fn eval_n_aggregate(&self, s: C64, layout: NLayout, order: usize) -> Result<CMat> {
        let blocks = self.eval_n_all(s, order)?;
        Ok(match layout {
            NLayout::RowConcat => hstack(&blocks),
            NLayout::ColStack => vstack(&blocks),
        })
    }

    /// `[N_1(s), ..., N_m(s)]` as separate matrices.
    pub fn eval_n_all(&self, s: C64, order: usize) -> Result<Vec<CMat>> {
        (0..self.m).map(|j| self.eval(Role::BilinN(j), s, order)).collect()
    }

    /// LU factorization of `K(s)`.
    pub fn factor_k(&self, s: C64) -> Result<LuFactor<C64>> {
        LuFactor::new(&self.eval(Role::StiffK, s, 0)?, DEFAULT_RANK_TOL)
    }

    /// First-order companion realization with `x = [q; q']` and `J = I`.
    pub fn companion_first_order(&self) -> Result<Self> {
        let SystemData::SecondOrder(so) = &self.data else {
            return Err(Error::InvalidSystem(format!(
                "companion form needs a SecondOrder system, got {}",
                self.template()
            )));
        };
        let n = self.n;
        let eye = CMat::identity(n, n);
        let zero = CMat::zeros(n, n);
        let e = block2(&eye, &zero, &zero, &so.m);
        let a = block2(&zero, &eye, &(-&so.k), &(-&so.d));
        let nn = so
            .np
            .iter()
            .zip(&so.nv)
            .map(|(np, nv)| block2(&zero, &zero, np, nv))
            .collect();
        let b = vstack(&[CMat::zeros(n, self.m), so.bu.clone()]);
        let c = hstack(&[so.cp.clone(), so.cv.clone()]);
        Self::first_order(FirstOrderMatrices { e, a, n: nn, b, c })
    }
}

fn constant(mat: &CMat, order: usize) -> CMat {
    if order == 0 {
        mat.clone()
    } else {
        zeros_like(mat)
    }
}

fn linear_in_s(base: &CMat, slope: &CMat, s: C64, order: usize) -> CMat {
    match order {
        0 => base + slope * s,
        1 => slope.clone(),
        _ => zeros_like(base),
    }
}

fn block2(a11: &CMat, a12: &CMat, a21: &CMat, a22: &CMat) -> CMat {
    vstack(&[hstack(&[a11.clone(), a12.clone()]), hstack(&[a21.clone(), a22.clone()])])
}
