//! Projection basis blocks that enforce interpolation of `G_k` and its
//! partial derivatives.
//!
//! V blocks propagate the input chain `K^{-1} N ... K^{-1} B` forward through
//! the points; W blocks propagate `C K^{-1} N K^{-1} ...` backward from the
//! last point and are stored conjugate-transposed. Derivatives follow from
//! the Leibniz rule applied to `K · (K^{-1} X) = X` with exact matrix-function
//! derivatives.

mod conditions;
mod spec;

pub use conditions::{check_conditions, implied_conditions, Condition, ConditionCheck, ConditionKind};
pub use spec::{InterpolationSpec, PointTuple, Side};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{binomial, hstack, orthonormalize_columns, vstack, CMat, LuFactor, C64};
use crate::system::{Role, StructuredBilinearSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockSide {
    V,
    W,
}

/// Origin of a block: the point tuple and derivative multi-index of the
/// one-sided condition it enforces.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub side: BlockSide,
    pub level: usize,
    pub points: Vec<C64>,
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisBlock {
    pub matrix: CMat,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BasisBlocks {
    pub blocks: Vec<BasisBlock>,
}

impl BasisBlocks {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn total_columns(&self) -> usize {
        self.blocks.iter().map(|b| b.matrix.ncols()).sum()
    }

    pub fn extend(&mut self, other: BasisBlocks) {
        self.blocks.extend(other.blocks);
    }

    pub fn matrices(&self) -> Vec<CMat> {
        self.blocks.iter().map(|b| b.matrix.clone()).collect()
    }
}

fn factor_at(sys: &StructuredBilinearSystem, s: C64, index: usize) -> Result<LuFactor<C64>> {
    sys.factor_k(s).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularAtPoint { index, point: s },
        other => other,
    })
}

fn check_tuple(points: &[C64], orders: &[usize]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidSpec("point tuple is empty".into()));
    }
    if points.len() != orders.len() {
        return Err(Error::InvalidSpec(format!(
            "{} points but {} derivative orders",
            points.len(),
            orders.len()
        )));
    }
    Ok(())
}

fn k_derivatives(sys: &StructuredBilinearSystem, s: C64, max: usize) -> Result<Vec<CMat>> {
    (0..=max).map(|i| sys.eval(Role::StiffK, s, i)).collect()
}

/// V blocks `V_1 = K(σ_1)^{-1} B(σ_1)`, `V_j = K(σ_j)^{-1} N(σ_{j-1}) (I_m ⊗ V_{j-1})`.
pub fn build_v_blocks(sys: &StructuredBilinearSystem, points: &[C64]) -> Result<BasisBlocks> {
    build_v_hermite_blocks(sys, points, &vec![0; points.len()])
}

/// W blocks `W_1 = K(ς_θ)^{-H} C(ς_θ)^H`,
/// `W_i = K(ς_{θ-i+1})^{-H} Ñ(ς_{θ-i+1})^H (I_m ⊗ W_{i-1})`.
pub fn build_w_blocks(sys: &StructuredBilinearSystem, points: &[C64]) -> Result<BasisBlocks> {
    build_w_hermite_blocks(sys, points, &vec![0; points.len()])
}

/// Hermite V blocks: level `q` emits `∂^j K^{-1}(σ_q) Z_q` for `j = 0..=ℓ_q`,
/// where `Z_1 = B` (differentiated along) and
/// `Z_{q+1} = ∂^{ℓ_q} (N K^{-1} Z_q)(σ_q)`.
pub fn build_v_hermite_blocks(
    sys: &StructuredBilinearSystem,
    points: &[C64],
    orders: &[usize],
) -> Result<BasisBlocks> {
    check_tuple(points, orders)?;
    let mut out = BasisBlocks::default();
    let mut chain: Option<CMat> = None;
    for (q, (&s, &l)) in points.iter().zip(orders).enumerate() {
        let lu = factor_at(sys, s, q)?;
        let kd = k_derivatives(sys, s, l)?;
        let mut ys: Vec<CMat> = Vec::with_capacity(l + 1);
        for j in 0..=l {
            let mut rhs = match &chain {
                None => sys.eval(Role::InputB, s, j)?,
                Some(z) if j == 0 => z.clone(),
                Some(z) => CMat::zeros(z.nrows(), z.ncols()),
            };
            for i in 1..=j {
                rhs -= &kd[i] * &ys[j - i] * C64::new(binomial(j, i), 0.0);
            }
            ys.push(lu.solve(&rhs));
        }
        for (j, y) in ys.iter().enumerate() {
            let mut idx = orders[..q].to_vec();
            idx.push(j);
            out.blocks.push(BasisBlock {
                matrix: y.clone(),
                provenance: Provenance {
                    side: BlockSide::V,
                    level: q + 1,
                    points: points[..=q].to_vec(),
                    orders: idx,
                },
            });
        }
        if q + 1 < points.len() {
            let mut z: Option<CMat> = None;
            for (i, y) in ys.iter().enumerate() {
                let nd = sys.eval_n_all(s, l - i)?;
                let term = hstack(&nd.iter().map(|nj| nj * y).collect::<Vec<_>>()) * C64::new(binomial(l, i), 0.0);
                z = Some(match z {
                    Some(acc) => acc + term,
                    None => term,
                });
            }
            chain = z;
        }
    }
    Ok(out)
}

/// `X K^{-1}` via the adjoint solve.
fn right_solve(lu: &LuFactor<C64>, x: &CMat) -> CMat {
    lu.solve_adjoint(&x.adjoint()).adjoint()
}

/// Hermite W blocks, consuming points from the last one backward. Level `i`
/// emits `[∂^j (L F K^{-1})(ς)]^H` for `j = 0..=ν`, with `F = C` at level 1
/// and `F = Ñ`, `L` the previous level's full-order row chain, afterwards.
pub fn build_w_hermite_blocks(
    sys: &StructuredBilinearSystem,
    points: &[C64],
    orders: &[usize],
) -> Result<BasisBlocks> {
    check_tuple(points, orders)?;
    let theta = points.len();
    let mut out = BasisBlocks::default();
    let mut chain: Option<CMat> = None;
    for level in 0..theta {
        let idx = theta - 1 - level;
        let (s, nu) = (points[idx], orders[idx]);
        let lu = factor_at(sys, s, idx)?;
        let kd = k_derivatives(sys, s, nu)?;
        let mut us: Vec<CMat> = Vec::with_capacity(nu + 1);
        for i in 0..=nu {
            let mut rhs = match &chain {
                None => sys.eval(Role::OutputC, s, i)?,
                Some(l) => vstack(&sys.eval_n_all(s, i)?.iter().map(|nj| l * nj).collect::<Vec<_>>()),
            };
            for a in 1..=i {
                rhs -= &us[i - a] * &kd[a] * C64::new(binomial(i, a), 0.0);
            }
            us.push(right_solve(&lu, &rhs));
        }
        for (i, u) in us.iter().enumerate() {
            let mut multi = vec![i];
            multi.extend_from_slice(&orders[idx + 1..]);
            out.blocks.push(BasisBlock {
                matrix: u.adjoint(),
                provenance: Provenance {
                    side: BlockSide::W,
                    level: level + 1,
                    points: points[idx..].to_vec(),
                    orders: multi,
                },
            });
        }
        chain = us.pop();
    }
    Ok(out)
}

/// Blocks for a list of tuples on one side, concatenated in tuple order.
pub fn build_blocks_for_tuples(
    sys: &StructuredBilinearSystem,
    side: BlockSide,
    tuples: &[PointTuple],
) -> Result<BasisBlocks> {
    let per_tuple: Vec<BasisBlocks> = tuples
        .par_iter()
        .map(|t| {
            let orders = t.orders_or_zero();
            match side {
                BlockSide::V => build_v_hermite_blocks(sys, &t.points, &orders),
                BlockSide::W => build_w_hermite_blocks(sys, &t.points, &orders),
            }
        })
        .collect::<Result<_>>()?;
    let mut out = BasisBlocks::default();
    for b in per_tuple {
        out.extend(b);
    }
    Ok(out)
}

fn is_conjugate_of(a: &Provenance, b: &Provenance) -> bool {
    a.side == b.side
        && a.level == b.level
        && a.orders == b.orders
        && a.points.len() == b.points.len()
        && a.points.iter().zip(&b.points).all(|(x, y)| *x == y.conj())
}

/// Replaces conjugate block pairs by their real and imaginary parts. Blocks
/// at all-real points are assumed real (real system) and keep their real
/// part. Valid only for systems with real matrices.
pub fn realify_blocks(blocks: &BasisBlocks) -> Result<Vec<CMat>> {
    let mut used = vec![false; blocks.len()];
    let mut out = Vec::new();
    for (i, blk) in blocks.blocks.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let prov = &blk.provenance;
        let real = |m: &CMat| m.map(|z| C64::new(z.re, 0.0));
        if prov.points.iter().all(|z| z.im == 0.0) {
            out.push(real(&blk.matrix));
            continue;
        }
        let partner = (0..blocks.len()).find(|&j| !used[j] && is_conjugate_of(&blocks.blocks[j].provenance, prov));
        let Some(j) = partner else {
            return Err(Error::RealifyImpossible(format!(
                "{:?} block at level {} with points {:?} has no conjugate partner",
                prov.side, prov.level, prov.points
            )));
        };
        used[j] = true;
        out.push(real(&blk.matrix));
        out.push(blk.matrix.map(|z| C64::new(z.im, 0.0)));
    }
    Ok(out)
}

/// Concatenates the blocks (optionally realified), scales every column to
/// unit norm and orthonormalizes with relative tolerance `tol`.
pub fn assemble_basis(blocks: &BasisBlocks, realify: bool, tol: f64) -> Result<CMat> {
    if blocks.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let mats = if realify { realify_blocks(blocks)? } else { blocks.matrices() };
    let mut m = hstack(&mats);
    for mut col in m.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 && nrm.is_finite() {
            col.unscale_mut(nrm);
        }
    }
    orthonormalize_columns(&m, tol)
}
