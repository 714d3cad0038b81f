use std::collections::BTreeMap;
use std::fmt::Write;

use bimor::benchmarks::{make_heated_rod, make_msd, standard_input, MsdParams, RodParams};
use bimor::interpolation::{check_conditions, implied_conditions, ConditionCheck, ConditionKind};
use bimor::linalg::C64;
use bimor::reduction::load_system_or_rom;
use bimor::simulation::{simulate as integrate, InputSignal};
use bimor::transfer::relative_error_grid;
use bimor::{InterpolationSpec, PointTuple, ReducedModel, Side};

use crate::{parse, CliError, FreqerrArgs, ModelArgs, ModelName, ReduceArgs, SideArg, SimulateArgs, SpecArgs, VerifyArgs};

pub fn model_make(a: &ModelArgs) -> Result<(), CliError> {
    let sys = match a.name {
        ModelName::Msd => make_msd(a.n, a.mimo, MsdParams::default())?,
        ModelName::Rod => {
            if a.mimo {
                return Err(CliError::usage("the rod model has a single input"));
            }
            make_heated_rod(a.n, RodParams { tau: a.tau, bilinear_scale: a.bilinear_scale })?
        }
    };
    sys.save_json(&a.out)?;
    println!("wrote {} model: n = {}, m = {}, p = {}", sys.template(), sys.n(), sys.m(), sys.p());
    Ok(())
}

/// Tuples `(l_1[i], l_2[i], ...)` from equally long point lists.
fn zip_tuples(lists: &[String], imaginary: bool) -> Result<Vec<PointTuple>, CliError> {
    let cols: Vec<Vec<C64>> = lists.iter().map(|l| parse::points(l, imaginary)).collect::<Result<_, _>>()?;
    let Some(len) = cols.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if cols.iter().any(|c| c.len() != len) {
        return Err(CliError::usage("zipped point lists must have equal length"));
    }
    Ok((0..len).map(|i| PointTuple::new(cols.iter().map(|c| c[i]).collect())).collect())
}

pub fn spec_make(a: &SpecArgs) -> Result<(), CliError> {
    let side = match a.side {
        SideArg::V => Side::VOnly,
        SideArg::W => Side::WOnly,
        SideArg::Two => Side::TwoSided,
        SideArg::WEqualsV => Side::OneSidedWEqualsV,
    };
    let mut spec = InterpolationSpec::new(side).with_realify(a.realify).with_tol(a.tol);
    let tuple = |pts: &Option<String>, ords: &Option<String>| -> Result<Option<PointTuple>, CliError> {
        let Some(pts) = pts else {
            return if ords.is_some() { Err(CliError::usage("orders given without points")) } else { Ok(None) };
        };
        let points = parse::points(pts, a.imaginary)?;
        Ok(Some(match ords {
            Some(o) => PointTuple::with_orders(points, parse::orders(o)?),
            None => PointTuple::new(points),
        }))
    };
    if let Some(t) = tuple(&a.v_points, &a.v_orders)? {
        spec = spec.with_v(t);
    }
    if let Some(t) = tuple(&a.w_points, &a.w_orders)? {
        spec = spec.with_w(t);
    }
    for t in zip_tuples(&a.v_zip, a.imaginary)? {
        spec = spec.with_v(t);
    }
    for t in zip_tuples(&a.w_zip, a.imaginary)? {
        spec = spec.with_w(t);
    }
    spec.validate()?;
    spec.save_json(&a.out)?;
    println!(
        "wrote spec: {} V tuple(s), {} W tuple(s), {} implied conditions",
        spec.v_tuple_list().len(),
        spec.w_tuple_list().len(),
        implied_conditions(&spec).len()
    );
    Ok(())
}

pub fn reduce(a: &ReduceArgs) -> Result<(), CliError> {
    let sys = load_system_or_rom(&a.system)?;
    let spec = InterpolationSpec::load_json(&a.spec)?;
    let rom = bimor::reduce(&sys, &spec)?;
    rom.save_json(&a.out)?;
    for w in &rom.warnings {
        eprintln!("warning: {w}");
    }
    println!("reduced {} model from n = {} to r = {}", sys.template(), sys.n(), rom.r());
    Ok(())
}

fn input_signal(name: &str, m: usize) -> Result<InputSignal, CliError> {
    if let Some(v) = name.strip_prefix("constant:") {
        let value: f64 = v.parse().map_err(|_| CliError::usage(format!("bad constant input {v:?}")))?;
        return Ok(InputSignal::constant(m, value));
    }
    Ok(standard_input(name)?)
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let sys = load_system_or_rom(&a.system)?;
    let u = input_signal(&a.input, sys.m())?;
    let traj = integrate(&sys, &u, a.tf, a.dt)?;
    traj.write_csv(&a.out)?;
    println!("{} samples, max |y| = {:.6e}", traj.times.len(), traj.max_abs_output());
    Ok(())
}

pub fn freqerr(a: &FreqerrArgs) -> Result<(), CliError> {
    let fom = load_system_or_rom(&a.fom)?;
    let rom = load_system_or_rom(&a.rom)?;
    let grid = parse::grid(&a.grid)?;
    let errors = relative_error_grid(&fom, &rom, a.level as usize, &grid)?;
    errors.write_csv(&a.out)?;
    match errors.max_and_median() {
        Some((max, median)) => println!("level {}: {} points, max {max:.3e}, median {median:.3e}", a.level, errors.errors.len()),
        None => println!("level {}: every grid point was skipped", a.level),
    }
    if !errors.skipped.is_empty() {
        eprintln!("warning: {} grid points skipped (vanishing reference)", errors.skipped.len());
    }
    Ok(())
}

/// Fixed-width PASS/FAIL table followed by per-kind counts.
pub fn condition_table(checks: &[ConditionCheck]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:<9} {:>5}  {:<14} {:>12} {:>8}  status  points", "#", "kind", "level", "orders", "rel_error", "tol");
    for (i, c) in checks.iter().enumerate() {
        let orders = c.condition.orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            out,
            "{:>4}  {:<9} {:>5}  {:<14} {:>12.3e} {:>8.0e}  {}    {}",
            i + 1,
            c.condition.kind.label(),
            c.condition.level(),
            format!("({orders})"),
            c.rel_error,
            c.tol,
            if c.passed { "PASS" } else { "FAIL" },
            c.condition.points.iter().map(|z| format!("{:.3e}{:+.3e}i", z.re, z.im)).collect::<Vec<_>>().join(" ")
        );
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for kind in [ConditionKind::V, ConditionKind::W, ConditionKind::Mixed, ConditionKind::Jacobian] {
        let of_kind: Vec<_> = checks.iter().filter(|c| c.condition.kind == kind).collect();
        if !of_kind.is_empty() {
            counts.insert(kind.label(), (of_kind.iter().filter(|c| c.passed).count(), of_kind.len()));
        }
    }
    for (kind, (passed, total)) in counts {
        let _ = writeln!(out, "{kind}: {passed}/{total} passed");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "total: {passed}/{} passed", checks.len());
    out
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let fom = load_system_or_rom(&a.fom)?;
    let (rom, spec) = match &a.spec {
        Some(path) => (load_system_or_rom(&a.rom)?, InterpolationSpec::load_json(path)?),
        None => {
            let model = ReducedModel::load_json(&a.rom)?;
            (model.system, model.spec)
        }
    };
    spec.validate()?;
    let checks = check_conditions(&fom, &rom, &implied_conditions(&spec), a.tol, a.deriv_tol)?;
    print!("{}", condition_table(&checks));
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} interpolation conditions failed", checks.len())));
    }
    Ok(())
}
