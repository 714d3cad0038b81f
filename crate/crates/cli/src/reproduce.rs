//! Benchmark pipelines: model, reduction, frequency grids, time simulation.

use std::fs;
use std::path::Path;

use bimor::benchmarks::{make_heated_rod, make_msd, standard_input, MsdParams, RodParams};
use bimor::interpolation::{build_blocks_for_tuples, check_conditions, implied_conditions, BlockSide};
use bimor::linalg::{c64, C64};
use bimor::simulation::{output_error, simulate};
use bimor::transfer::{logspace, max_and_median, relative_error_grid, ErrorGrid};
use bimor::{InterpolationSpec, PointTuple, Side, StructuredBilinearSystem};
use serde::Serialize;

use crate::{CliError, Experiment, ReproduceArgs};

/// Near machine-precision truncation for the chain experiments, whose
/// high-frequency blocks are nearly collinear.
const CHAIN_TOL: f64 = 1e-14;

#[derive(Serialize)]
struct Stats {
    count: usize,
    max: f64,
    median: f64,
}

impl Stats {
    fn of(values: &[f64]) -> Option<Stats> {
        let count = values.iter().filter(|x| x.is_finite()).count();
        max_and_median(values).map(|(max, median)| Stats { count, max, median })
    }
}

#[derive(Serialize)]
struct TimeSummary {
    tf: f64,
    dt: f64,
    fom_peak: f64,
    rom_peak: f64,
    error: Option<Stats>,
}

#[derive(Serialize)]
struct Summary {
    experiment: &'static str,
    n: usize,
    r: usize,
    basis_columns: usize,
    rank_tol: f64,
    conditions_passed: usize,
    conditions: Option<Stats>,
    interpolation_points: Option<Stats>,
    grid_level1: Option<Stats>,
    grid_level2: Option<Stats>,
    time: TimeSummary,
    warnings: Vec<String>,
}

fn imaginary_pm(values: &[f64]) -> Vec<C64> {
    values.iter().flat_map(|&w| [c64(0.0, w), c64(0.0, -w)]).collect()
}

fn setup(e: Experiment, n: usize) -> Result<(&'static str, StructuredBilinearSystem, InterpolationSpec, &'static str), CliError> {
    Ok(match e {
        Experiment::MsdSiso => {
            let mut spec = InterpolationSpec::new(Side::OneSidedWEqualsV).with_realify(true).with_tol(CHAIN_TOL);
            for s in imaginary_pm(&logspace(-4.0, 4.0, 3)) {
                spec = spec.with_v(PointTuple::new(vec![s, s]));
            }
            ("msd-siso", make_msd(n, false, MsdParams::default())?, spec, "msd_siso")
        }
        Experiment::MsdMimo => {
            let mut spec = InterpolationSpec::new(Side::OneSidedWEqualsV).with_realify(true).with_tol(CHAIN_TOL);
            let level2 = imaginary_pm(&logspace(-3.0, 3.0, 3));
            for (s, t) in imaginary_pm(&logspace(-4.0, 4.0, 3)).into_iter().zip(level2) {
                spec = spec.with_v(PointTuple::new(vec![s, t]));
            }
            ("msd-mimo", make_msd(n, true, MsdParams::default())?, spec, "msd_mimo")
        }
        Experiment::Rod => {
            let mut spec = InterpolationSpec::new(Side::TwoSided).with_realify(true);
            let level2 = imaginary_pm(&logspace(-2.0, 2.0, 2));
            for (s, t) in imaginary_pm(&logspace(-4.0, 4.0, 2)).into_iter().zip(level2) {
                spec = spec.with_v(PointTuple::new(vec![s, t])).with_w(PointTuple::new(vec![t, s]));
            }
            ("rod", make_heated_rod(n, RodParams::default())?, spec, "rod")
        }
    })
}

fn write(path: &Path, text: String) -> Result<(), CliError> {
    fs::write(path, text).map_err(bimor::Error::from)?;
    Ok(())
}

fn grid_stats(g: &ErrorGrid) -> Option<Stats> {
    Stats::of(&g.errors)
}

pub fn run(a: &ReproduceArgs) -> Result<(), CliError> {
    if a.grid_points == 0 {
        return Err(CliError::usage("--grid-points must be positive"));
    }
    let (name, fom, spec, input) = setup(a.experiment, a.n)?;
    fs::create_dir_all(&a.outdir).map_err(bimor::Error::from)?;
    let dir = a.outdir.as_path();

    let basis_columns = build_blocks_for_tuples(&fom, BlockSide::V, &spec.v_tuple_list())?.total_columns();
    let rom = bimor::reduce(&fom, &spec)?;
    fom.save_json(dir.join("fom.json"))?;
    spec.save_json(dir.join("spec.json"))?;
    rom.save_json(dir.join("rom.json"))?;

    let checks = check_conditions(&fom, &rom.system, &implied_conditions(&spec), 1e-8, 1e-5)?;
    write(&dir.join("conditions.txt"), crate::commands::condition_table(&checks))?;
    let cond_errors: Vec<f64> = checks.iter().map(|c| c.rel_error).collect();
    let level1: Vec<f64> = checks.iter().filter(|c| c.condition.level() == 1).map(|c| c.rel_error).collect();

    let grid = logspace(-4.0, 4.0, a.grid_points);
    let g1 = relative_error_grid(&fom, &rom.system, 1, &grid)?;
    let g2 = relative_error_grid(&fom, &rom.system, 2, &grid)?;
    g1.write_csv(dir.join("freq_level1.csv"))?;
    g2.write_csv(dir.join("freq_level2.csv"))?;

    let tf = a.tf.unwrap_or(match a.experiment {
        Experiment::Rod => 20.0,
        _ => 100.0,
    });
    let u = standard_input(input)?;
    let y = simulate(&fom, &u, tf, a.dt)?;
    let yr = simulate(&rom.system, &u, tf, a.dt)?;
    y.write_csv(dir.join("time_fom.csv"))?;
    yr.write_csv(dir.join("time_rom.csv"))?;
    let err = output_error(&y, &yr)?;
    err.write_csv(dir.join("time_error.csv"))?;

    let summary = Summary {
        experiment: name,
        n: a.n,
        r: rom.r(),
        basis_columns,
        rank_tol: spec.tol,
        conditions_passed: checks.iter().filter(|c| c.passed).count(),
        conditions: Stats::of(&cond_errors),
        interpolation_points: Stats::of(&level1),
        grid_level1: grid_stats(&g1),
        grid_level2: grid_stats(&g2),
        time: TimeSummary {
            tf,
            dt: a.dt,
            fom_peak: y.max_abs_output(),
            rom_peak: yr.max_abs_output(),
            error: Stats::of(&err.errors),
        },
        warnings: rom.warnings.clone(),
    };
    let text = serde_json::to_string_pretty(&summary).map_err(bimor::Error::from)?;
    write(&dir.join("summary.json"), text + "\n")?;
    println!(
        "{name}: n = {}, r = {} ({basis_columns} basis columns), {}/{} conditions passed",
        a.n,
        rom.r(),
        summary.conditions_passed,
        checks.len()
    );
    Ok(())
}
