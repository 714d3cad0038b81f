//! Petrov-Galerkin projection onto interpolatory bases.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::{assemble_basis, build_blocks_for_tuples, BlockSide, InterpolationSpec, Side};
use crate::linalg::{orthonormalize_columns, CMat, LuFactor, RMat, C64, DEFAULT_RANK_TOL};
use crate::system::{
    Evaluator, FirstOrderMatrices, MatrixJson, Role, SecondOrderMatrices, StructuredBilinearSystem,
    SystemData, SystemFile, TimeDelayMatrices,
};

/// Seed of the arbitrary complement basis used by one-sided specs.
pub const COMPLEMENT_SEED: u64 = 0x5eed_b11e;

#[derive(Clone, Debug)]
pub struct ReducedModel {
    pub system: StructuredBilinearSystem,
    pub v: CMat,
    pub w: CMat,
    pub spec: InterpolationSpec,
    /// Non-fatal diagnostics, e.g. a singular reduced pencil at a probe point.
    pub warnings: Vec<String>,
}

fn check_basis(name: &str, basis: &CMat, n: usize) -> Result<()> {
    if basis.nrows() != n || basis.ncols() == 0 || basis.ncols() > n {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {n} rows and 1..={n} columns",
            basis.nrows(),
            basis.ncols()
        )));
    }
    let rank = orthonormalize_columns(basis, DEFAULT_RANK_TOL).map(|q| q.ncols()).unwrap_or(0);
    if rank < basis.ncols() {
        return Err(Error::RankDeficientBasis { rank, expected: basis.ncols() });
    }
    Ok(())
}

/// `Ŵᴴ (·) V` applied to every constant matrix of the template; generic
/// systems get composed evaluators.
pub fn petrov_galerkin_project(sys: &StructuredBilinearSystem, v: &CMat, w: &CMat) -> Result<StructuredBilinearSystem> {
    check_basis("V", v, sys.n())?;
    check_basis("W", w, sys.n())?;
    if v.ncols() != w.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "V has {} columns, W has {}",
            v.ncols(),
            w.ncols()
        )));
    }
    let wh = w.adjoint();
    let two = |x: &CMat| &wh * x * v;
    let left = |x: &CMat| &wh * x;
    let right = |x: &CMat| x * v;
    match sys.data() {
        SystemData::FirstOrder(f) => StructuredBilinearSystem::first_order(FirstOrderMatrices {
            e: two(&f.e),
            a: two(&f.a),
            n: f.n.iter().map(two).collect(),
            b: left(&f.b),
            c: right(&f.c),
        }),
        SystemData::SecondOrder(s) => StructuredBilinearSystem::second_order(SecondOrderMatrices {
            m: two(&s.m),
            d: two(&s.d),
            k: two(&s.k),
            np: s.np.iter().map(two).collect(),
            nv: s.nv.iter().map(two).collect(),
            bu: left(&s.bu),
            cp: right(&s.cp),
            cv: right(&s.cv),
        }),
        SystemData::TimeDelay(t) => StructuredBilinearSystem::time_delay(TimeDelayMatrices {
            e: two(&t.e),
            a: two(&t.a),
            ad: two(&t.ad),
            tau: t.tau,
            n: t.n.iter().map(two).collect(),
            b: left(&t.b),
            c: right(&t.c),
        }),
        SystemData::Generic(g) => {
            let inner = g.eval.clone();
            let r = v.ncols();
            let (v, wh) = (v.clone(), wh.clone());
            let eval: Evaluator = Arc::new(move |role, s, q| {
                let x = inner(role, s, q);
                match role {
                    Role::OutputC => x * &v,
                    Role::InputB => &wh * x,
                    Role::StiffK | Role::BilinN(_) => &wh * x * &v,
                }
            });
            StructuredBilinearSystem::generic(r, sys.m(), sys.p(), g.max_order, eval)
        }
    }
}

/// Real orthonormal `n x r` basis drawn from a fixed seed.
pub fn random_orthonormal(n: usize, r: usize, seed: u64) -> Result<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = RMat::from_fn(n, r, |_, _| rng.random_range(-1.0..1.0));
    orthonormalize_columns(&crate::linalg::to_complex(&m), DEFAULT_RANK_TOL)
}

fn validate_against(sys: &StructuredBilinearSystem, spec: &InterpolationSpec) -> Result<()> {
    spec.validate()?;
    if spec.realify && !sys.is_real() {
        return Err(Error::RealifyImpossible("system matrices are not real".into()));
    }
    if let Some(max) = sys.max_derivative_order() {
        let worst = spec
            .v_tuple_list()
            .iter()
            .chain(spec.w_tuple_list().iter())
            .flat_map(|t| t.orders.clone())
            .max()
            .unwrap_or(0);
        // K is differentiated up to the largest order; value blocks need none.
        if worst > max {
            return Err(Error::UnsupportedDerivative { requested: worst, declared: max });
        }
    }
    Ok(())
}

/// Builds the bases per `spec` and projects. One-sided V or W specs pair the
/// interpolatory basis with a seeded random orthonormal complement.
pub fn reduce(sys: &StructuredBilinearSystem, spec: &InterpolationSpec) -> Result<ReducedModel> {
    reduce_inner(sys, spec, None)
}

/// As [`reduce`], but one-sided specs use `complement` as the arbitrary basis.
pub fn reduce_with_complement(
    sys: &StructuredBilinearSystem,
    spec: &InterpolationSpec,
    complement: &CMat,
) -> Result<ReducedModel> {
    reduce_inner(sys, spec, Some(complement))
}

fn reduce_inner(sys: &StructuredBilinearSystem, spec: &InterpolationSpec, complement: Option<&CMat>) -> Result<ReducedModel> {
    validate_against(sys, spec)?;
    let basis = |side: BlockSide| -> Result<CMat> {
        let tuples = match side {
            BlockSide::V => spec.v_tuple_list(),
            BlockSide::W => spec.w_tuple_list(),
        };
        let blocks = build_blocks_for_tuples(sys, side, &tuples)?;
        assemble_basis(&blocks, spec.realify, spec.tol)
    };
    let other = |r: usize| -> Result<CMat> {
        match complement {
            Some(c) if c.ncols() == r => Ok(c.clone()),
            Some(c) => Err(Error::DimensionMismatch(format!(
                "complement basis has {} columns, interpolatory basis has {r}",
                c.ncols()
            ))),
            None => random_orthonormal(sys.n(), r, COMPLEMENT_SEED),
        }
    };
    let (v, w) = match spec.side {
        Side::VOnly => {
            let v = basis(BlockSide::V)?;
            let w = other(v.ncols())?;
            (v, w)
        }
        Side::WOnly => {
            let w = basis(BlockSide::W)?;
            let v = other(w.ncols())?;
            (v, w)
        }
        Side::TwoSided => {
            let v = basis(BlockSide::V)?;
            let w = basis(BlockSide::W)?;
            if v.ncols() != w.ncols() {
                return Err(Error::RankDeficientBasis {
                    rank: v.ncols().min(w.ncols()),
                    expected: v.ncols().max(w.ncols()),
                });
            }
            (v, w)
        }
        Side::OneSidedWEqualsV => {
            let v = basis(BlockSide::V)?;
            (v.clone(), v)
        }
    };
    let system = petrov_galerkin_project(sys, &v, &w)?;
    let warnings = probe_regularity(&system, spec);
    Ok(ReducedModel { system, v, w, spec: spec.clone(), warnings })
}

/// Checks `Ŵᴴ K(s) V` at every spec point and one seeded random point.
fn probe_regularity(rom: &StructuredBilinearSystem, spec: &InterpolationSpec) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(COMPLEMENT_SEED);
    let mut points: Vec<C64> = spec
        .v_tuple_list()
        .into_iter()
        .chain(spec.w_tuple_list())
        .flat_map(|t| t.points)
        .collect();
    points.push(C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut warnings = Vec::new();
    for s in points {
        let singular = rom
            .eval(Role::StiffK, s, 0)
            .and_then(|k| LuFactor::new(&k, DEFAULT_RANK_TOL))
            .is_err();
        let note = format!("reduced K(s) is singular at s = {s}");
        if singular && !warnings.contains(&note) {
            warnings.push(note);
        }
    }
    warnings
}

#[derive(Serialize, Deserialize)]
struct ReducedModelFile {
    #[serde(flatten)]
    system: SystemFile,
    #[serde(rename = "V")]
    v: MatrixJson,
    #[serde(rename = "W")]
    w: MatrixJson,
    spec: InterpolationSpec,
}

impl ReducedModel {
    pub fn r(&self) -> usize {
        self.system.n()
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = ReducedModelFile {
            system: SystemFile::from_system(&self.system)?,
            v: MatrixJson::from_cmat(&self.v),
            w: MatrixJson::from_cmat(&self.w),
            spec: self.spec.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ReducedModelFile = serde_json::from_str(text)?;
        let system = file.system.to_system()?;
        let v = file.v.to_cmat_any("V")?;
        let w = file.w.to_cmat_any("W")?;
        if v.ncols() != system.n() || w.ncols() != system.n() || v.nrows() != w.nrows() {
            return Err(Error::InvalidSystem("V and W must be N x r with r the reduced order".into()));
        }
        Ok(ReducedModel { system, v, w, spec: file.spec, warnings: Vec::new() })
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Reads either a reduced-model file or a plain system file.
pub fn load_system_or_rom(path: impl AsRef<Path>) -> Result<StructuredBilinearSystem> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("V").is_some() {
        Ok(ReducedModel::from_json_str(&text)?.system)
    } else {
        StructuredBilinearSystem::from_json_str(&text)
    }
}
