//! Regular subsystem transfer functions `G_k(s_1, ..., s_k)` and their
//! partial derivatives.
//!
//! `G_k` is `p x m^k`. Columns enumerate bilinear-term combinations with the
//! index of the term applied last varying slowest, matching the Kronecker
//! form `C K^{-1}(s_k) N(s_{k-1}) (I_m ⊗ K^{-1}(s_{k-1})) ... (I ⊗ B(s_1))`.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{binomial, hstack, spectral_norm, CMat, C64};
use crate::system::{Role, StructuredBilinearSystem};

/// Highest total derivative order accepted by [`eval_transfer_partial`].
pub const MAX_PARTIAL_ORDER: usize = 4;

fn at_point<T>(index: usize, point: C64, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularAtPoint { index, point },
        other => other,
    })
}

/// `[N_1(s) X, ..., N_m(s) X]`.
pub(crate) fn apply_n_blocks(sys: &StructuredBilinearSystem, s: C64, x: &CMat) -> Result<CMat> {
    let blocks = sys
        .eval_n_all(s, 0)?
        .iter()
        .map(|nj| nj * x)
        .collect::<Vec<_>>();
    Ok(hstack(&blocks))
}

/// State-side chain `K(s_k)^{-1} N(s_{k-1}) ... K(s_1)^{-1} B(s_1)`, n x m^k.
pub fn state_chain(sys: &StructuredBilinearSystem, points: &[C64]) -> Result<CMat> {
    let (&first, rest) = points
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("transfer function needs at least one point".into()))?;
    let lu = at_point(0, first, sys.factor_k(first))?;
    let mut x = lu.solve(&sys.eval(Role::InputB, first, 0)?);
    let mut prev = first;
    for (i, &s) in rest.iter().enumerate() {
        let y = apply_n_blocks(sys, prev, &x)?;
        let lu = at_point(i + 1, s, sys.factor_k(s))?;
        x = lu.solve(&y);
        prev = s;
    }
    Ok(x)
}

/// `G_k(s_1, ..., s_k)` with `k = points.len()`.
pub fn eval_transfer(sys: &StructuredBilinearSystem, points: &[C64]) -> Result<CMat> {
    let x = state_chain(sys, points)?;
    let last = *points.last().expect("state_chain checked non-empty");
    Ok(sys.eval(Role::OutputC, last, 0)? * x)
}

/// `∂^{j_1}_{s_1} ... ∂^{j_k}_{s_k} G_k` by iterated central differences with
/// one Richardson extrapolation step. A zero multi-index evaluates exactly.
pub fn eval_transfer_partial(
    sys: &StructuredBilinearSystem,
    points: &[C64],
    multi_index: &[usize],
) -> Result<CMat> {
    if multi_index.len() != points.len() {
        return Err(Error::DimensionMismatch(format!(
            "multi-index has {} entries for {} points",
            multi_index.len(),
            points.len()
        )));
    }
    let total: usize = multi_index.iter().sum();
    if total == 0 {
        return eval_transfer(sys, points);
    }
    if total > MAX_PARTIAL_ORDER {
        return Err(Error::UnsupportedDerivative {
            requested: total,
            declared: MAX_PARTIAL_ORDER,
        });
    }
    let base = fd_step(total);
    let steps: Vec<f64> = points.iter().map(|s| base * s.norm().max(1.0)).collect();
    let coarse = central_stencil(sys, points, multi_index, &steps)?;
    let half: Vec<f64> = steps.iter().map(|h| h / 2.0).collect();
    let fine = central_stencil(sys, points, multi_index, &half)?;
    Ok((fine * C64::new(4.0, 0.0) - coarse) / C64::new(3.0, 0.0))
}

/// Relative base step by total derivative order; chosen to balance
/// truncation against roundoff amplification `eps / h^q`.
fn fd_step(total_order: usize) -> f64 {
    match total_order {
        1 => 1e-5,
        2 => 1e-3,
        3 => 4e-3,
        _ => 1e-2,
    }
}

/// Tensor product of one-dimensional central stencils
/// `h^{-q} Σ_k (-1)^k binom(q,k) f(s + (q/2 - k) h)`.
fn central_stencil(
    sys: &StructuredBilinearSystem,
    points: &[C64],
    multi_index: &[usize],
    steps: &[f64],
) -> Result<CMat> {
    let vars: Vec<usize> = (0..points.len()).filter(|&i| multi_index[i] > 0).collect();
    let mut counters = vec![0usize; vars.len()];
    let mut acc: Option<CMat> = None;
    loop {
        let mut shifted = points.to_vec();
        let mut weight = 1.0;
        for (slot, &i) in vars.iter().enumerate() {
            let q = multi_index[i];
            let k = counters[slot];
            let offset = q as f64 / 2.0 - k as f64;
            shifted[i] += C64::new(offset * steps[i], 0.0);
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            weight *= sign * binomial(q, k) / steps[i].powi(q as i32);
        }
        let term = eval_transfer(sys, &shifted)? * C64::new(weight, 0.0);
        acc = Some(match acc {
            Some(a) => a + term,
            None => term,
        });
        let mut slot = 0;
        loop {
            if slot == vars.len() {
                return Ok(acc.expect("stencil has at least one term"));
            }
            counters[slot] += 1;
            if counters[slot] <= multi_index[vars[slot]] {
                break;
            }
            counters[slot] = 0;
            slot += 1;
        }
    }
}

/// Point-wise relative errors of `G_1` or `G_2` on the imaginary axis.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorGrid {
    pub level: usize,
    /// One entry per grid point: `[ω]` or `[ω_1, ω_2]`.
    pub points: Vec<Vec<f64>>,
    /// Relative error per point; `NaN` where skipped.
    pub errors: Vec<f64>,
    /// Indices of points where the full-model value vanished.
    pub skipped: Vec<usize>,
}

/// Maximum and median of the finite entries.
pub fn max_and_median(values: &[f64]) -> Option<(f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) };
    Some((v[v.len() - 1], median))
}

impl ErrorGrid {
    pub fn max_and_median(&self) -> Option<(f64, f64)> {
        max_and_median(&self.errors)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.level == 1 {
            out.push_str("omega1,relative_error\n");
        } else {
            out.push_str("omega1,omega2,relative_error\n");
        }
        for (pt, err) in self.points.iter().zip(&self.errors) {
            for w in pt {
                let _ = write!(out, "{w:.16e},");
            }
            let _ = writeln!(out, "{err:.16e}");
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Output-side factor `C(s) K(s)^{-1}` (p x n).
fn output_factor(sys: &StructuredBilinearSystem, s: C64, index: usize) -> Result<CMat> {
    let lu = at_point(index, s, sys.factor_k(s))?;
    let c = sys.eval(Role::OutputC, s, 0)?;
    Ok(lu.solve_adjoint(&c.adjoint()).adjoint())
}

/// Input-side factor for level `level`: `B(s)` or `N(s) (I ⊗ K(s)^{-1} B(s))`.
fn input_factor(sys: &StructuredBilinearSystem, s: C64, level: usize, index: usize) -> Result<CMat> {
    let b = sys.eval(Role::InputB, s, 0)?;
    if level == 1 {
        return Ok(b);
    }
    let lu = at_point(index, s, sys.factor_k(s))?;
    apply_n_blocks(sys, s, &lu.solve(&b))
}

struct Factors {
    fom_out: CMat,
    fom_in: CMat,
    rom_out: CMat,
    rom_in: CMat,
}

/// Relative errors `‖G_k(iω) − Ĝ_k(iω)‖_2 / ‖G_k(iω)‖_2` for `k = level`.
/// Level 2 covers the full tensor grid with `ω_1` varying slowest.
pub fn relative_error_grid(
    fom: &StructuredBilinearSystem,
    rom: &StructuredBilinearSystem,
    level: usize,
    grid: &[f64],
) -> Result<ErrorGrid> {
    if fom.m() != rom.m() || fom.p() != rom.p() {
        return Err(Error::DimensionMismatch(format!(
            "full model has (m, p) = ({}, {}), reduced has ({}, {})",
            fom.m(),
            fom.p(),
            rom.m(),
            rom.p()
        )));
    }
    if level != 1 && level != 2 {
        return Err(Error::InvalidSpec(format!("error level must be 1 or 2, got {level}")));
    }
    let factors: Vec<Factors> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let s = C64::new(0.0, w);
            Ok(Factors {
                fom_out: output_factor(fom, s, i)?,
                fom_in: input_factor(fom, s, level, i)?,
                rom_out: output_factor(rom, s, i)?,
                rom_in: input_factor(rom, s, level, i)?,
            })
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> = if level == 1 {
        (0..grid.len()).map(|i| (i, i)).collect()
    } else {
        (0..grid.len())
            .flat_map(|i| (0..grid.len()).map(move |j| (i, j)))
            .collect()
    };
    // (ω_1, ω_2) = (grid[i], grid[j]): the input side is evaluated at s_1.
    let values: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let g = &factors[j].fom_out * &factors[i].fom_in;
            let gr = &factors[j].rom_out * &factors[i].rom_in;
            let denom = spectral_norm(&g);
            if denom == 0.0 {
                None
            } else {
                Some(spectral_norm(&(g - gr)) / denom)
            }
        })
        .collect();

    let mut grid_out = ErrorGrid {
        level,
        points: Vec::with_capacity(pairs.len()),
        errors: Vec::with_capacity(pairs.len()),
        skipped: Vec::new(),
    };
    for (idx, (&(i, j), val)) in pairs.iter().zip(values).enumerate() {
        grid_out.points.push(if level == 1 { vec![grid[i]] } else { vec![grid[i], grid[j]] });
        match val {
            Some(e) => grid_out.errors.push(e),
            None => {
                grid_out.errors.push(f64::NAN);
                grid_out.skipped.push(idx);
            }
        }
    }
    Ok(grid_out)
}

/// `n` points logarithmically spaced from `10^a` to `10^b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(a)],
        _ => (0..n)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}
