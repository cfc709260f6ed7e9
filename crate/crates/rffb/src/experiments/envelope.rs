use rffb_core::bounds::{expected_sup_bound, invert_bound_for_epsilon, thm1_value};
use rffb_core::lab::{
    check_lipschitz_variance, estimate_error_probability, estimate_expected_sup, Executor,
};

use super::analytic::fill_verdicts;
use super::cell_seed;
use crate::config::{self, Anchor};
use crate::report::{Check, Table, Value};

pub fn probability_envelope<E: Executor + Sync>(
    p: &config::ProbabilityEnvelope,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut cells: Vec<Anchor> = Vec::new();
    for &r in &p.r {
        for &features in &p.features {
            if let Some(eps) = &p.epsilon {
                cells.extend(eps.iter().map(|&epsilon| Anchor {
                    r,
                    features,
                    epsilon,
                }));
            }
            if let Some(target) = p.target_bound {
                let epsilon = invert_bound_for_epsilon(r, features as u64, target)?;
                cells.push(Anchor {
                    r,
                    features,
                    epsilon,
                });
            }
        }
    }
    cells.extend(p.anchors.iter().copied());

    let mut table = Table::new(&[
        "R", "D", "epsilon", "trials", "failures", "p_hat", "ci_low", "ci_high", "bound", "verdict",
    ]);
    let mut detail = Vec::new();
    for (index, cell) in cells.iter().enumerate() {
        let seed = cell_seed(master, index);
        let run =
            estimate_error_probability(cell.r, cell.features, cell.epsilon, p.trials, seed, exec)?;
        let est = run.estimate;
        let bound = thm1_value(cell.r, cell.features as f64, cell.epsilon);
        table.push(
            vec![
                Value::num(cell.r),
                Value::int(cell.features),
                Value::num(cell.epsilon),
                Value::int(est.trials),
                Value::int(est.failures),
                Value::num(est.p_hat),
                Value::num(est.ci_low),
                Value::num(est.ci_high),
                Value::num(bound),
                Value::Null,
            ],
            vec![Check::at_most(
                "wilson_low_below_bound",
                est.ci_low,
                bound,
                0.0,
            )],
        );
        if p.write_trials {
            for rec in &run.records {
                detail.push(vec![
                    Value::int(index),
                    Value::num(cell.r),
                    Value::int(cell.features),
                    Value::num(cell.epsilon),
                    Value::int(rec.trial_index),
                    Value::text(rec.seed.to_string()),
                    Value::num(rec.sup_lower),
                    Value::num(rec.sup_upper),
                    Value::Bool(rec.exceeded),
                ]);
            }
        }
    }
    fill_verdicts(&mut table);
    if p.write_trials {
        let cols = [
            "cell",
            "R",
            "D",
            "epsilon",
            "trial",
            "seed",
            "sup_lower",
            "sup_upper",
            "exceeded",
        ];
        table.detail = Some((cols.iter().map(|c| c.to_string()).collect(), detail));
    }
    table
        .notes
        .push("a trial fails when the certified sup error over [0, R] reaches epsilon".into());
    Ok(table)
}

pub fn expected_sup<E: Executor + Sync>(
    p: &config::ExpectedSup,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "R", "D", "trials", "mean", "stderr", "max", "bound", "verdict",
    ]);
    let mut index = 0;
    for &r in &p.r {
        for &features in &p.features {
            let e = estimate_expected_sup(r, features, p.trials, cell_seed(master, index), exec)?;
            index += 1;
            let bound = expected_sup_bound(r, features as u64);
            table.push(
                vec![
                    Value::num(r),
                    Value::int(features),
                    Value::int(e.trials),
                    Value::num(e.mean),
                    Value::num(e.stderr),
                    Value::num(e.max),
                    Value::num(bound),
                    Value::Null,
                ],
                vec![Check::at_most(
                    "mean_below_bound",
                    e.mean,
                    bound,
                    3.0 * e.stderr,
                )],
            );
        }
    }
    fill_verdicts(&mut table);
    Ok(table)
}

pub fn lipschitz<E: Executor + Sync>(
    p: &config::Lipschitz,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "D",
        "R",
        "r_grid",
        "trials",
        "max_variance",
        "argmax_r",
        "stderr",
        "cap",
        "ratio",
        "verdict",
    ]);
    for (index, &features) in p.features.iter().enumerate() {
        let v = check_lipschitz_variance(
            features,
            p.r,
            p.r_grid,
            p.trials,
            cell_seed(master, index),
            exec,
        )?;
        table.push(
            vec![
                Value::int(features),
                Value::num(p.r),
                Value::int(p.r_grid),
                Value::int(p.trials),
                Value::num(v.max_variance),
                Value::num(v.argmax_r),
                Value::num(v.stderr_at_max),
                Value::num(v.cap),
                Value::num(v.max_variance / v.cap),
                Value::Null,
            ],
            vec![Check::at_most(
                "max_variance_below_cap",
                v.max_variance,
                v.cap,
                p.relative_slack * v.cap,
            )],
        );
    }
    fill_verdicts(&mut table);
    Ok(table)
}

pub fn parameter_identity<E: Executor + Sync>(
    p: &config::ParameterIdentity,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "r",
        "D",
        "trials",
        "pre_root_mean",
        "pre_root_target",
        "stderr",
        "estimate",
        "target",
        "verdict",
    ]);
    let mut index = 0;
    let slack = 4.0 / (p.trials as f64).sqrt();
    for &r in &p.r {
        for &features in &p.features {
            let v = rffb_core::lab::parameter_identity(
                r,
                features,
                p.trials,
                cell_seed(master, index),
                exec,
            )?;
            index += 1;
            table.push(
                vec![
                    Value::num(r),
                    Value::int(features),
                    Value::int(p.trials),
                    Value::num(v.pre_root_mean),
                    Value::num(v.pre_root_target),
                    Value::num(v.pre_root_stderr),
                    Value::opt(v.estimate),
                    Value::num(v.target),
                    Value::Null,
                ],
                vec![Check::within(
                    "pre_root_mean_matches",
                    v.pre_root_mean,
                    v.pre_root_target,
                    slack,
                )],
            );
        }
    }
    fill_verdicts(&mut table);
    table
        .notes
        .push("the check is on the mean before the 1/D root; it allows 4/sqrt(trials)".into());
    Ok(table)
}
