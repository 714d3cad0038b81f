//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bimor::benchmarks::{make_heated_rod, make_msd, standard_input, MsdParams, RodParams};
use bimor::interpolation::{
    assemble_basis, build_blocks_for_tuples, check_conditions, implied_conditions, realify_blocks, BlockSide,
    Condition, ConditionKind,
};
use bimor::linalg::{c64, orthonormalize_columns, real_part, spectral_norm, to_complex, CMat, RMat, C64};
use bimor::reduction::{petrov_galerkin_project, random_orthonormal, reduce_with_complement};
use bimor::simulation::{output_error, simulate, InputSignal};
use bimor::system::{FirstOrderMatrices, Role, StructuredBilinearSystem, SystemData, TimeDelayMatrices};
use bimor::transfer::{eval_transfer, logspace};
use bimor::{reduce, InterpolationSpec, PointTuple, Side, Template};
use common::{random_points, random_system, rel_err, rng};

const TEMPLATES: [Template; 3] = [Template::FirstOrder, Template::SecondOrder, Template::TimeDelay];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Worst value and derivative errors over a set of conditions.
#[derive(Default)]
struct Tally {
    count: usize,
    worst_value: f64,
    worst_deriv: f64,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.count += other.count;
        self.worst_value = self.worst_value.max(other.worst_value);
        self.worst_deriv = self.worst_deriv.max(other.worst_deriv);
    }

    fn summary(&self) -> String {
        if self.worst_deriv > 0.0 {
            format!("{} conditions, worst value {:.2e}, worst derivative {:.2e}", self.count, self.worst_value, self.worst_deriv)
        } else {
            format!("{} conditions, worst {:.2e}", self.count, self.worst_value)
        }
    }
}

fn check(
    fom: &StructuredBilinearSystem,
    rom: &StructuredBilinearSystem,
    conds: &[Condition],
    tol: f64,
    deriv_tol: f64,
    label: &str,
) -> Result<Tally, String> {
    let checks = check_conditions(fom, rom, conds, tol, deriv_tol).map_err(|e| format!("{label}: {e}"))?;
    let mut tally = Tally { count: checks.len(), ..Tally::default() };
    for c in &checks {
        if c.condition.is_derivative() {
            tally.worst_deriv = tally.worst_deriv.max(c.rel_error);
        } else {
            tally.worst_value = tally.worst_value.max(c.rel_error);
        }
        if !c.passed {
            return Err(format!(
                "{label}: {} condition at orders {:?} has error {:.3e} > {:.0e}",
                c.condition.kind.label(),
                c.condition.orders,
                c.rel_error,
                c.tol
            ));
        }
    }
    Ok(tally)
}

/// Reduces with a random orthonormal complement seeded by `seed` and checks
/// every implied condition.
fn reduce_and_check(
    fom: &StructuredBilinearSystem,
    spec: &InterpolationSpec,
    seed: u64,
    tol: f64,
    deriv_tol: f64,
    label: &str,
) -> Result<Tally, String> {
    let rom = match spec.side {
        Side::VOnly | Side::WOnly => {
            let tuples = if spec.side == Side::VOnly { spec.v_tuple_list() } else { spec.w_tuple_list() };
            let side = if spec.side == Side::VOnly { BlockSide::V } else { BlockSide::W };
            let blocks = build_blocks_for_tuples(fom, side, &tuples).map_err(|e| format!("{label}: {e}"))?;
            let r = assemble_basis(&blocks, spec.realify, spec.tol).map_err(|e| format!("{label}: {e}"))?.ncols();
            let complement = random_orthonormal(fom.n(), r, seed).map_err(|e| format!("{label}: {e}"))?;
            reduce_with_complement(fom, spec, &complement)
        }
        Side::TwoSided => return padded_two_sided(fom, spec, seed, tol, deriv_tol, label),
        Side::OneSidedWEqualsV => reduce(fom, spec),
    }
    .map_err(|e| format!("{label}: {e}"))?;
    check(fom, &rom.system, &implied_conditions(spec), tol, deriv_tol, label)
}

/// Two-sided reduction where the smaller basis is padded with random
/// orthogonal directions, so Hermite specs with unequal V and W column
/// counts can still be projected.
fn padded_two_sided(
    fom: &StructuredBilinearSystem,
    spec: &InterpolationSpec,
    seed: u64,
    tol: f64,
    deriv_tol: f64,
    label: &str,
) -> Result<Tally, String> {
    let err = |e: bimor::Error| format!("{label}: {e}");
    let basis = |side, tuples: Vec<PointTuple>| -> Result<CMat, String> {
        let blocks = build_blocks_for_tuples(fom, side, &tuples).map_err(err)?;
        assemble_basis(&blocks, spec.realify, spec.tol).map_err(err)
    };
    let mut v = basis(BlockSide::V, spec.v_tuple_list())?;
    let mut w = basis(BlockSide::W, spec.w_tuple_list())?;
    let r = v.ncols().max(w.ncols());
    for b in [&mut v, &mut w] {
        if b.ncols() < r {
            let extra = random_orthonormal(fom.n(), r - b.ncols(), seed).map_err(err)?;
            *b = orthonormalize_columns(&bimor::linalg::hstack(&[b.clone(), extra]), 1e-10).map_err(err)?;
        }
    }
    let rom = petrov_galerkin_project(fom, &v, &w).map_err(err)?;
    check(fom, &rom, &implied_conditions(spec), tol, deriv_tol, label)
}

fn random_suite(side: Side, seed_base: u64) -> Outcome {
    let mut tally = Tally::default();
    for (ti, &template) in TEMPLATES.iter().enumerate() {
        for i in 0..20u64 {
            let seed = seed_base + 100 * ti as u64 + i;
            let mut g = rng(seed);
            let fom = random_system(template, &mut g, 30, 1, 1);
            let pts = random_points(&mut g, 3);
            let spec = match side {
                Side::VOnly => InterpolationSpec::v(Side::VOnly, pts),
                _ => InterpolationSpec::new(Side::WOnly).with_w(PointTuple::new(pts)),
            };
            let t = reduce_and_check(&fom, &spec, seed ^ 0xabcd, 1e-8, 1e-8, &format!("{template} #{i}"))?;
            if t.count != 3 {
                return Err(format!("{template} #{i}: expected 3 conditions, got {}", t.count));
            }
            tally.absorb(t);
        }
    }
    Ok(tally.summary())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let s = random_suite(Side::VOnly, 1_000)?;
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(30) {
        return Err(format!("suite took {elapsed:.1?}, limit 30 s"));
    }
    Ok(format!("60 systems, {s}"))
}

fn criterion_2() -> Outcome {
    Ok(format!("60 systems, {}", random_suite(Side::WOnly, 2_000)?))
}

fn criterion_3() -> Outcome {
    let mut tally = Tally::default();
    let mut mixed_levels = Vec::new();
    for (ti, &template) in TEMPLATES.iter().enumerate() {
        for i in 0..5u64 {
            let mut g = rng(3_000 + 100 * ti as u64 + i);
            let fom = random_system(template, &mut g, 30, 1, 1);
            let spec = InterpolationSpec::v(Side::TwoSided, random_points(&mut g, 2))
                .with_w(PointTuple::new(random_points(&mut g, 2)));
            let conds = implied_conditions(&spec);
            if conds.len() != 8 {
                return Err(format!("expected 2 + 2 + 4 = 8 conditions, got {}", conds.len()));
            }
            mixed_levels = conds.iter().filter(|c| c.kind == ConditionKind::Mixed).map(|c| c.level()).collect();
            tally.absorb(reduce_and_check(&fom, &spec, 0, 1e-8, 1e-8, &format!("{template} #{i}"))?);
        }
    }
    mixed_levels.sort_unstable();
    if mixed_levels != [2, 3, 3, 4] {
        return Err(format!("mixed condition levels {mixed_levels:?}"));
    }
    Ok(format!("15 systems, {}", tally.summary()))
}

fn hermite_specs(g: &mut rand_chacha::ChaCha8Rng) -> Vec<(&'static str, InterpolationSpec)> {
    let p1 = random_points(g, 1);
    let p2 = random_points(g, 2);
    let q1 = random_points(g, 1);
    let q2 = random_points(g, 2);
    let shared = random_points(g, 2);
    vec![
        ("V k=1 l=2", InterpolationSpec::new(Side::VOnly).with_v(PointTuple::with_orders(p1.clone(), vec![2]))),
        ("V k=2 l=(1,1)", InterpolationSpec::new(Side::VOnly).with_v(PointTuple::with_orders(p2.clone(), vec![1, 1]))),
        ("W t=1 v=1", InterpolationSpec::new(Side::WOnly).with_w(PointTuple::with_orders(q1.clone(), vec![1]))),
        ("W t=2 v=(1,1)", InterpolationSpec::new(Side::WOnly).with_w(PointTuple::with_orders(q2.clone(), vec![1, 1]))),
        (
            "two-sided l=2 v=1",
            InterpolationSpec::new(Side::TwoSided)
                .with_v(PointTuple::with_orders(p1, vec![2]))
                .with_w(PointTuple::with_orders(q1, vec![1])),
        ),
        (
            "identical points",
            InterpolationSpec::v(Side::TwoSided, shared.clone()).with_w(PointTuple::new(shared.clone())),
        ),
        (
            "identical points and orders",
            InterpolationSpec::new(Side::TwoSided)
                .with_v(PointTuple::with_orders(shared.clone(), vec![1, 0]))
                .with_w(PointTuple::with_orders(shared, vec![1, 0])),
        ),
    ]
}

fn criterion_4() -> Outcome {
    // The worked example: values of ∂^{(j,i)} G_2(σ, ς) for j ≤ 2, i ≤ 1.
    let (s, t) = (c64(0.1, 0.7), c64(-0.05, 1.3));
    let example = InterpolationSpec::new(Side::TwoSided)
        .with_v(PointTuple::with_orders(vec![s], vec![2]))
        .with_w(PointTuple::with_orders(vec![t], vec![1]));
    let mixed: Vec<Condition> =
        implied_conditions(&example).into_iter().filter(|c| c.kind == ConditionKind::Mixed).collect();
    let listed: Vec<Vec<usize>> = mixed.iter().map(|c| c.orders.clone()).collect();
    let expected = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1]];
    if listed != expected || mixed.iter().any(|c| c.points != vec![s, t]) {
        return Err(format!("worked example enumerates {listed:?}"));
    }
    let mut tally = Tally::default();
    for (ti, &template) in TEMPLATES.iter().enumerate() {
        for i in 0..3u64 {
            let mut g = rng(4_000 + 100 * ti as u64 + i);
            let fom = random_system(template, &mut g, 20, 1, 1);
            let t = padded_two_sided(&fom, &example, 4_400 + i, 1e-8, 1e-5, "worked example")?;
            if t.count != 11 {
                return Err(format!("worked example checked {} conditions", t.count));
            }
            tally.absorb(t);
            for (name, spec) in hermite_specs(&mut g) {
                let label = format!("{template} #{i} {name}");
                let t = reduce_and_check(&fom, &spec, 4_500 + i, 1e-8, 1e-5, &label)?;
                if name.starts_with("identical") {
                    let jac = implied_conditions(&spec).iter().filter(|c| c.kind == ConditionKind::Jacobian).count();
                    if jac != 2 {
                        return Err(format!("{label}: {jac} gradient conditions"));
                    }
                }
                tally.absorb(t);
            }
        }
    }
    Ok(format!("9 systems, {}", tally.summary()))
}

fn criterion_5() -> Outcome {
    let mut tally = Tally::default();
    for (ti, &template) in TEMPLATES.iter().enumerate() {
        for i in 0..3u64 {
            let mut g = rng(5_000 + 100 * ti as u64 + i);
            let fom = random_system(template, &mut g, 20, 2, 2);
            let shared = random_points(&mut g, 1);
            let specs = [
                ("V k=2", InterpolationSpec::v(Side::VOnly, random_points(&mut g, 2))),
                ("W t=2", InterpolationSpec::new(Side::WOnly).with_w(PointTuple::new(random_points(&mut g, 2)))),
                (
                    "two-sided k=t=2",
                    InterpolationSpec::v(Side::TwoSided, random_points(&mut g, 2))
                        .with_w(PointTuple::new(random_points(&mut g, 2))),
                ),
                (
                    "Hermite l=1 v=1",
                    InterpolationSpec::new(Side::TwoSided)
                        .with_v(PointTuple::with_orders(random_points(&mut g, 1), vec![1]))
                        .with_w(PointTuple::with_orders(random_points(&mut g, 1), vec![1])),
                ),
                (
                    "identical points and orders",
                    InterpolationSpec::new(Side::TwoSided)
                        .with_v(PointTuple::with_orders(shared.clone(), vec![1]))
                        .with_w(PointTuple::with_orders(shared, vec![1])),
                ),
            ];
            for (name, spec) in specs {
                tally.absorb(reduce_and_check(&fom, &spec, 5_500 + i, 1e-8, 1e-5, &format!("{template} #{i} {name}"))?);
            }
        }
    }
    Ok(format!("9 systems, {}", tally.summary()))
}

fn criterion_6() -> Outcome {
    let mut g = rng(6_000);
    let so = random_system(Template::SecondOrder, &mut g, 5, 2, 2);
    let fo = so.companion_first_order().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        for _ in 0..10 {
            let pts = random_points(&mut g, k);
            let a = eval_transfer(&so, &pts).map_err(|e| e.to_string())?;
            let b = eval_transfer(&fo, &pts).map_err(|e| e.to_string())?;
            let e = rel_err(&b, &a);
            if e > 1e-10 {
                return Err(format!("G_{k} differs by {e:.3e}"));
            }
            worst = worst.max(e);
        }
    }
    Ok(format!("30 tuples, worst {worst:.2e}"))
}

fn imaginary_pm(values: &[f64]) -> Vec<C64> {
    values.iter().flat_map(|&w| [c64(0.0, w), c64(0.0, -w)]).collect()
}

fn second_order_parts(sys: &StructuredBilinearSystem) -> Result<[RMat; 3], String> {
    match sys.data() {
        SystemData::SecondOrder(x) => Ok([real_part(&x.m), real_part(&x.d), real_part(&x.k)]),
        _ => Err("reduced model lost its second-order structure".into()),
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let fom = make_msd(100, false, MsdParams::default()).map_err(|e| e.to_string())?;
    let sigma = imaginary_pm(&logspace(-4.0, 4.0, 3));
    let mut spec = InterpolationSpec::new(Side::OneSidedWEqualsV).with_realify(true).with_tol(1e-14);
    for &s in &sigma {
        spec = spec.with_v(PointTuple::new(vec![s, s]));
    }
    let rom = reduce(&fom, &spec).map_err(|e| e.to_string())?;
    if rom.r() != 12 {
        return Err(format!("reduced order {} instead of 12", rom.r()));
    }
    let mut worst_g1: f64 = 0.0;
    for &s in &sigma {
        let g = eval_transfer(&fom, &[s]).map_err(|e| e.to_string())?;
        let gr = eval_transfer(&rom.system, &[s]).map_err(|e| e.to_string())?;
        worst_g1 = worst_g1.max(rel_err(&g, &gr));
    }
    if worst_g1 > 1e-8 {
        return Err(format!("(a) G_1 error {worst_g1:.3e}"));
    }
    let names = ["M", "D", "K"];
    for (name, mat) in names.iter().zip(second_order_parts(&rom.system)?) {
        let asym = (&mat - mat.transpose()).norm() / mat.norm();
        if asym > 1e-12 {
            return Err(format!("(b) reduced {name} asymmetric by {asym:.2e}"));
        }
        let low = mat.clone().symmetric_eigen().eigenvalues.min();
        if *name != "D" && low <= 0.0 {
            return Err(format!("(b) reduced {name} has eigenvalue {low:.3e}"));
        }
    }
    let u = standard_input("msd_siso").map_err(|e| e.to_string())?;
    let y = simulate(&fom, &u, 100.0, 1e-3).map_err(|e| e.to_string())?;
    let yr = simulate(&rom.system, &u, 100.0, 1e-3).map_err(|e| e.to_string())?;
    let (fom_max, rom_max) = (y.max_abs_output(), yr.max_abs_output());
    if !rom_max.is_finite() || rom_max > 10.0 * fom_max {
        return Err(format!("(c) reduced output peaks at {rom_max:.3e}, full model at {fom_max:.3e}"));
    }
    let (max_err, median) = output_error(&y, &yr).map_err(|e| e.to_string())?.max_and_median().ok_or("no samples")?;
    if median > 1e-2 {
        return Err(format!("(c) median output error {median:.3e} > 1e-2 (max {max_err:.3e})"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:.1?}, limit 300 s"));
    }
    Ok(format!(
        "r=12, G_1 worst {worst_g1:.2e}, output error median {median:.2e} max {max_err:.2e}, peak ratio {:.3}",
        rom_max / fom_max
    ))
}

fn criterion_8() -> Outcome {
    let fom = make_heated_rod(200, RodParams::default()).map_err(|e| e.to_string())?;
    let sigma = imaginary_pm(&logspace(-4.0, 4.0, 2));
    let sigma2 = imaginary_pm(&logspace(-2.0, 2.0, 2));
    let mut spec = InterpolationSpec::new(Side::TwoSided).with_realify(true);
    for (&a, &b) in sigma.iter().zip(&sigma2) {
        spec = spec.with_v(PointTuple::new(vec![a, b])).with_w(PointTuple::new(vec![b, a]));
    }
    let rom = reduce(&fom, &spec).map_err(|e| e.to_string())?;
    if rom.r() != 8 {
        return Err(format!("reduced order {} instead of 8", rom.r()));
    }
    if rom.system.tau().map(f64::to_bits) != Some(1.0f64.to_bits()) {
        return Err(format!("reduced delay {:?}", rom.system.tau()));
    }
    let conds = implied_conditions(&spec);
    let mixed = conds.iter().filter(|c| c.kind == ConditionKind::Mixed).count();
    if mixed == 0 {
        return Err("no mixed conditions enumerated".into());
    }
    let t = check(&fom, &rom.system, &conds, 1e-6, 1e-6, "rod")?;
    Ok(format!("r=8, tau=1, {mixed} mixed, {}", t.summary()))
}

fn criterion_9() -> Outcome {
    let fom = make_msd(100, true, MsdParams::default()).map_err(|e| e.to_string())?;
    let sigma = imaginary_pm(&logspace(-4.0, 4.0, 3));
    let sigma2 = imaginary_pm(&logspace(-3.0, 3.0, 3));
    let mut spec = InterpolationSpec::new(Side::OneSidedWEqualsV).with_realify(true);
    for (&a, &b) in sigma.iter().zip(&sigma2) {
        spec = spec.with_v(PointTuple::new(vec![a, b]));
    }
    let blocks = build_blocks_for_tuples(&fom, BlockSide::V, &spec.v_tuple_list()).map_err(|e| e.to_string())?;
    if blocks.total_columns() != 36 {
        return Err(format!("{} basis columns before truncation", blocks.total_columns()));
    }
    let rom = reduce(&fom, &spec).map_err(|e| e.to_string())?;
    let level1: Vec<Condition> = implied_conditions(&spec).into_iter().filter(|c| c.level() == 1).collect();
    if level1.len() != 6 {
        return Err(format!("{} level-1 conditions", level1.len()));
    }
    let t = check(&fom, &rom.system, &level1, 1e-8, 1e-8, "mimo msd")?;
    Ok(format!("36 columns, r={}, {}", rom.r(), t.summary()))
}

fn scalar_fo(e: f64, a: f64, n: f64, b: f64, c: f64) -> StructuredBilinearSystem {
    let one = |x: f64| to_complex(&RMat::from_element(1, 1, x));
    StructuredBilinearSystem::first_order(FirstOrderMatrices { e: one(e), a: one(a), n: vec![one(n)], b: one(b), c: one(c) })
        .unwrap()
}

fn worst_against(sys: &StructuredBilinearSystem, u: &InputSignal, tf: f64, exact: impl Fn(f64) -> f64) -> Result<f64, String> {
    let y = simulate(sys, u, tf, 1e-3).map_err(|e| e.to_string())?;
    Ok(y.times.iter().zip(&y.outputs).map(|(&t, v)| (v[0] - exact(t)).abs()).fold(0.0, f64::max))
}

fn criterion_10() -> Outcome {
    let mut g = rng(10_000);
    let fom = random_system(Template::SecondOrder, &mut g, 20, 1, 1);
    let spec = InterpolationSpec::v(Side::TwoSided, random_points(&mut g, 2))
        .with_w(PointTuple::new(random_points(&mut g, 2)));
    let rom = reduce(&fom, &spec).map_err(|e| e.to_string())?;

    // Oblique projector at an arbitrary point.
    let s0 = random_points(&mut g, 1)[0];
    let k = fom.eval(Role::StiffK, s0, 0).map_err(|e| e.to_string())?;
    let wh = rom.w.adjoint();
    let kr = (&wh * &k * &rom.v).try_inverse().ok_or("reduced pencil singular")?;
    let p = &rom.v * kr * &wh * &k;
    let idem = spectral_norm(&(&p * &p - &p)) / spectral_norm(&p);
    if idem > 1e-12 {
        return Err(format!("projector idempotence {idem:.3e}"));
    }

    // Conjugate symmetry of a real system.
    let mut conj_worst: f64 = 0.0;
    for kk in 1..=3 {
        let pts = random_points(&mut g, kk);
        let conj: Vec<C64> = pts.iter().map(|z| z.conj()).collect();
        let a = eval_transfer(&fom, &pts).map_err(|e| e.to_string())?;
        let b = eval_transfer(&fom, &conj).map_err(|e| e.to_string())?;
        conj_worst = conj_worst.max(rel_err(&a.map(|z| z.conj()), &b));
    }
    if conj_worst > 1e-13 {
        return Err(format!("conjugate symmetry {conj_worst:.3e}"));
    }

    // Realified basis contains the complex one.
    let pts = random_points(&mut g, 2);
    let mut tuples = vec![PointTuple::new(pts.clone())];
    tuples.push(PointTuple::new(pts.iter().map(|z| z.conj()).collect()));
    let blocks = build_blocks_for_tuples(&fom, BlockSide::V, &tuples).map_err(|e| e.to_string())?;
    let complex = orthonormalize_columns(&bimor::linalg::hstack(&blocks.matrices()), 1e-10).map_err(|e| e.to_string())?;
    let real = orthonormalize_columns(&bimor::linalg::hstack(&realify_blocks(&blocks).map_err(|e| e.to_string())?), 1e-10)
        .map_err(|e| e.to_string())?;
    let residual = &complex - &real * (real.adjoint() * &complex);
    let span = spectral_norm(&residual);
    if span > 1e-10 || real.ncols() != complex.ncols() || !bimor::linalg::is_real(&real) {
        return Err(format!("realified span residual {span:.3e}"));
    }

    // Ĝ_k is invariant under W -> W T.
    let t = common::rand_real(&mut g, rom.r(), rom.r(), 1.0) + CMat::identity(rom.r(), rom.r()) * c64(2.0, 0.5);
    let scaled = petrov_galerkin_project(&fom, &rom.v, &(&rom.w * t)).map_err(|e| e.to_string())?;
    let mut scale_worst: f64 = 0.0;
    for kk in 1..=3 {
        let pts = random_points(&mut g, kk);
        let a = eval_transfer(&rom.system, &pts).map_err(|e| e.to_string())?;
        let b = eval_transfer(&scaled, &pts).map_err(|e| e.to_string())?;
        scale_worst = scale_worst.max(rel_err(&a, &b));
    }
    if scale_worst > 1e-10 {
        return Err(format!("W scaling changes the reduced model by {scale_worst:.3e}"));
    }

    // Integrator against closed forms.
    let lin = worst_against(&scalar_fo(1.0, -1.0, 0.0, 1.0, 1.0), &InputSignal::constant(1, 1.0), 5.0, |t| 1.0 - (-t).exp())?;
    // x' = -x + 0.5 x u + u with u = 1: x = 2(1 - e^{-t/2}).
    let bil = worst_against(&scalar_fo(1.0, -1.0, 0.5, 1.0, 1.0), &InputSignal::constant(1, 1.0), 5.0, |t| {
        2.0 * (1.0 - (-0.5 * t).exp())
    })?;
    // x' = -x(t - 1) + 1 from rest: x = t on [0, 1], t - (t - 1)²/2 on [1, 2].
    let one = |x: f64| to_complex(&RMat::from_element(1, 1, x));
    let delay = StructuredBilinearSystem::time_delay(TimeDelayMatrices {
        e: one(1.0),
        a: one(0.0),
        ad: one(-1.0),
        tau: 1.0,
        n: vec![one(0.0)],
        b: one(1.0),
        c: one(1.0),
    })
    .map_err(|e| e.to_string())?;
    let dde = worst_against(&delay, &InputSignal::constant(1, 1.0), 2.0, |t| {
        if t <= 1.0 {
            t
        } else {
            t - (t - 1.0) * (t - 1.0) / 2.0
        }
    })?;
    let integ = lin.max(bil).max(dde);
    if integ > 1e-4 {
        return Err(format!("integrator errors linear {lin:.2e}, bilinear {bil:.2e}, delay {dde:.2e}"));
    }
    Ok(format!(
        "projector {idem:.1e}, conjugate {conj_worst:.1e}, span {span:.1e}, W scaling {scale_worst:.1e}, integrator {integ:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("nested V interpolation", criterion_1),
        ("nested W interpolation", criterion_2),
        ("two-sided interpolation", criterion_3),
        ("Hermite interpolation", criterion_4),
        ("MIMO interpolation", criterion_5),
        ("companion form oracle", criterion_6),
        ("mass-spring-damper SISO", criterion_7),
        ("delayed heated rod", criterion_8),
        ("mass-spring-damper MIMO", criterion_9),
        ("projector and property checks", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
