use rffb_core::downstream::{
    gaussian_blobs, krr_gap_check, sample_ball, smooth_regression, svm_gap_check, Dataset,
    KrrGapCheck, SvmGapCheck,
};
use rffb_core::lab::{run_indexed, Executor};
use rffb_core::rff::FrequencyBasis;
use rffb_core::rng::{derive_seed, Stream};

use super::analytic::fill_verdicts;
use super::cell_seed;
use crate::config;
use crate::report::{Check, Table, Value};

/// Datasets are keyed off this index of the master seed, so every cell of a
/// sweep sees the same data for a given seed number.
const DATA_INDEX: u64 = u64::MAX;

/// Largest relative residual accepted from the exact ridge solve.
pub const KRR_RESIDUAL_TOL: f64 = 1e-10;

fn data_seed(master: u64, s: usize) -> u64 {
    derive_seed(derive_seed(master, DATA_INDEX), s as u64)
}

fn probes(seed: u64, count: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    sample_ball(count, dim, radius, &mut Stream::new(seed, 1))
}

fn detail_columns(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

pub fn krr_gap<E: Executor + Sync>(
    p: &config::KrrGap,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "n",
        "d",
        "lambda",
        "D",
        "seeds",
        "max_u",
        "max_gap",
        "max_ratio",
        "failures",
        "skipped",
        "max_residual",
        "verdict",
    ]);
    let mut detail = Vec::new();
    let mut index = 0;
    for &lambda in &p.lambda {
        for &features in &p.features {
            let cell = cell_seed(master, index);
            index += 1;
            let results: Vec<rffb_core::Result<KrrGapCheck>> = run_indexed(exec, p.seeds, |s| {
                let seed = data_seed(master, s);
                let data = smooth_regression(p.n, p.d, p.radius, p.noise, seed)?;
                let basis = FrequencyBasis::sample_stream(p.d, features, cell, s as u64)?;
                let probes = probes(seed, p.probes, p.d, p.radius);
                krr_gap_check(&data, lambda, &basis, &probes)
            });
            let (mut max_u, mut max_gap, mut max_ratio, mut max_res) =
                (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let (mut failures, mut skipped) = (0u64, 0u64);
            for (s, r) in results.into_iter().enumerate() {
                let c = r?;
                max_u = max_u.max(c.u);
                max_gap = max_gap.max(c.gap);
                max_res = max_res.max(c.residual_exact);
                let ratio = c.bound.map(|b| if b > 0.0 { c.gap / b } else { 0.0 });
                match c.holds {
                    Some(true) => {}
                    Some(false) => failures += 1,
                    None => skipped += 1,
                }
                if let Some(x) = ratio {
                    max_ratio = max_ratio.max(x);
                }
                detail.push(vec![
                    Value::num(lambda),
                    Value::int(features),
                    Value::int(s),
                    Value::num(c.u),
                    Value::num(c.m),
                    Value::num(c.gap),
                    Value::opt(c.bound),
                    Value::opt(ratio),
                    Value::num(c.residual_exact),
                    Value::num(c.residual_rff),
                    c.holds.map_or(Value::Null, Value::Bool),
                ]);
            }
            table.push(
                vec![
                    Value::int(p.n),
                    Value::int(p.d),
                    Value::num(lambda),
                    Value::int(features),
                    Value::int(p.seeds),
                    Value::num(max_u),
                    Value::num(max_gap),
                    Value::num(max_ratio),
                    Value::int(failures),
                    Value::int(skipped),
                    Value::num(max_res),
                    Value::Null,
                ],
                vec![
                    Check::at_most("seeds_violating_bound", failures as f64, 0.0, 0.0),
                    Check::at_most("exact_solver_residual", max_res, KRR_RESIDUAL_TOL, 0.0),
                ],
            );
        }
    }
    fill_verdicts(&mut table);
    table.detail = Some((
        detail_columns(&[
            "lambda",
            "D",
            "seed_index",
            "u",
            "m",
            "gap",
            "bound",
            "ratio",
            "residual_exact",
            "residual_rff",
            "holds",
        ]),
        detail,
    ));
    Ok(table)
}

pub fn svm_gap<E: Executor + Sync>(
    p: &config::SvmGap,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "n",
        "d",
        "C0",
        "D",
        "seeds",
        "max_u",
        "max_gap",
        "max_ratio",
        "failures",
        "max_solver_gap",
        "verdict",
    ]);
    let mut detail = Vec::new();
    let mut index = 0;
    for &c0 in &p.c0 {
        for &features in &p.features {
            let cell = cell_seed(master, index);
            index += 1;
            let results: Vec<rffb_core::Result<SvmGapCheck>> = run_indexed(exec, p.seeds, |s| {
                let seed = data_seed(master, s);
                let data: Dataset = gaussian_blobs(p.n, p.d, p.separation, p.spread, seed)?;
                let basis = FrequencyBasis::sample_stream(p.d, features, cell, s as u64)?;
                let probes = probes(seed, p.probes, p.d, p.probe_radius);
                svm_gap_check(&data, c0, &basis, &probes, p.tol)
            });
            let (mut max_u, mut max_gap, mut max_ratio, mut max_solver) =
                (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let mut failures = 0u64;
            for (s, r) in results.into_iter().enumerate() {
                let c = r?;
                max_u = max_u.max(c.u);
                max_gap = max_gap.max(c.gap);
                let solver = c.solver_gap_exact.max(c.solver_gap_rff);
                max_solver = max_solver.max(solver);
                let ratio = if c.bound > 0.0 { c.gap / c.bound } else { 0.0 };
                max_ratio = max_ratio.max(ratio);
                if !c.holds {
                    failures += 1;
                }
                detail.push(vec![
                    Value::num(c0),
                    Value::int(features),
                    Value::int(s),
                    Value::num(c.u),
                    Value::num(c.gap),
                    Value::num(c.propagation),
                    Value::num(c.slack),
                    Value::num(c.bound),
                    Value::num(ratio),
                    Value::num(c.solver_gap_exact),
                    Value::num(c.solver_gap_rff),
                    Value::Bool(c.holds),
                ]);
            }
            table.push(
                vec![
                    Value::int(p.n),
                    Value::int(p.d),
                    Value::num(c0),
                    Value::int(features),
                    Value::int(p.seeds),
                    Value::num(max_u),
                    Value::num(max_gap),
                    Value::num(max_ratio),
                    Value::int(failures),
                    Value::num(max_solver),
                    Value::Null,
                ],
                vec![
                    Check::at_most("seeds_violating_bound", failures as f64, 0.0, 0.0),
                    Check::at_most("solver_gap", max_solver, p.tol, 0.0),
                ],
            );
        }
    }
    fill_verdicts(&mut table);
    table.detail = Some((
        detail_columns(&[
            "C0",
            "D",
            "seed_index",
            "u",
            "gap",
            "propagation",
            "slack",
            "bound",
            "ratio",
            "solver_gap_exact",
            "solver_gap_rff",
            "holds",
        ]),
        detail,
    ));
    table
        .notes
        .push("bound = propagation(C0, n, u) + certified solver slack".into());
    Ok(table)
}
