use rffb_core::lab::{
    affinity_mc, lecam_floor_experiment, neyman_pearson_error, Executor, TwoPointPair,
};
use rffb_core::rng::derive_seed;

use super::analytic::fill_verdicts;
use super::cell_seed;
use crate::config;
use crate::report::{Check, Table, Value};

pub fn lecam<E: Executor + Sync>(
    p: &config::Lecam,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "R",
        "D",
        "trials",
        "floor",
        "intermediate",
        "kl_form",
        "empirical",
        "stderr",
        "verdict",
    ]);
    let mut index = 0;
    for &r in &p.r {
        for &features in &p.features {
            let f = lecam_floor_experiment(r, features, p.trials, cell_seed(master, index), exec)?;
            index += 1;
            table.push(
                vec![
                    Value::num(r),
                    Value::int(features),
                    Value::int(p.trials),
                    Value::num(f.floor),
                    Value::num(f.intermediate),
                    Value::num(f.kl_form),
                    Value::num(f.empirical.value),
                    Value::num(f.empirical.stderr),
                    Value::Null,
                ],
                vec![
                    Check::at_least(
                        "empirical_above_floor",
                        f.empirical.value,
                        f.floor,
                        3.0 * f.empirical.stderr,
                    ),
                    Check::at_least("intermediate_above_floor", f.intermediate, f.floor, 0.0),
                    Check::at_most("intermediate_below_one", f.intermediate, 1.0, 0.0),
                ],
            );
        }
    }
    fill_verdicts(&mut table);
    table.notes.push(
        "empirical is the sampled mean |s - k| at the outer point of the two-point pair".into(),
    );
    Ok(table)
}

pub fn affinity<E: Executor + Sync>(
    p: &config::Affinity,
    master: u64,
    exec: &E,
) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "rho",
        "D",
        "samples",
        "kl",
        "kl_floor",
        "closed",
        "mc",
        "mc_stderr",
        "np",
        "np_stderr",
        "verdict",
    ]);
    let mut index = 0;
    for rho in &p.rho {
        let rho = rho.value();
        for &features in &p.features {
            let seed = cell_seed(master, index);
            index += 1;
            let pair = TwoPointPair::new(rho, 1.0, features)?;
            let mc = affinity_mc(rho, 1.0, features, p.samples, derive_seed(seed, 0), exec)?;
            let np =
                neyman_pearson_error(rho, 1.0, features, p.samples, derive_seed(seed, 1), exec)?;
            let kl_floor = 0.5 * (-pair.kl).exp();
            table.push(
                vec![
                    Value::num(rho),
                    Value::int(features),
                    Value::int(p.samples),
                    Value::num(pair.kl),
                    Value::num(kl_floor),
                    Value::num(pair.affinity),
                    Value::num(mc.value),
                    Value::num(mc.stderr),
                    Value::num(np.value),
                    Value::num(np.stderr),
                    Value::Null,
                ],
                vec![
                    Check::within(
                        "sampled_affinity_matches",
                        mc.value,
                        pair.affinity,
                        p.tolerance,
                    ),
                    Check::within("test_error_matches", np.value, pair.affinity, p.tolerance),
                    Check::at_least("closed_above_kl_floor", pair.affinity, kl_floor, 0.0),
                ],
            );
        }
    }
    fill_verdicts(&mut table);
    Ok(table)
}
