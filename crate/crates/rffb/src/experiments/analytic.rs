use rffb_core::bounds::{
    compare_bounds, epsilon_at_confidence_sriperumbudur, epsilon_at_confidence_thm1,
    thm1_is_tightest, thm1_value, BoundQuery, BoundRow, LOWER_EXPECTED, LOWER_PROB, RAHIMI,
    SRIPERUMBUDUR, SUTHERLAND, THM1, TIGHTNESS_FLOOR_LOG,
};

use crate::config::{BoundsTable, CompareInversions};
use crate::report::{Check, Table, Value};

pub const BOUNDS_COLUMNS: [&str; 11] = [
    "d",
    "R",
    "D",
    "epsilon",
    "thm1",
    "rahimi",
    "sutherland",
    "sriperumbudur_log",
    "lower_expected",
    "lower_prob",
    "verdict",
];

fn find<'a>(rows: &'a [BoundRow], name: &str) -> Option<&'a BoundRow> {
    rows.iter().find(|r| r.name == name)
}

pub fn bounds_table(p: &BoundsTable) -> anyhow::Result<Table> {
    let mut table = Table::new(&BOUNDS_COLUMNS);
    for &d in &p.d {
        for &r in &p.r {
            for &features in &p.features {
                for &eps in &p.epsilon {
                    let q = BoundQuery::new(r, features, d, eps)?;
                    let rows = compare_bounds(&q)?;
                    let get = |name| find(&rows, name).map(|b| b.value);
                    let thm1 = find(&rows, THM1).expect("always present");
                    let srip = find(&rows, SRIPERUMBUDUR).expect("always present");
                    let lower_prob = get(LOWER_PROB);
                    let mut checks = Vec::new();
                    if thm1.log_value >= TIGHTNESS_FLOOR_LOG {
                        checks.push(Check::at_least(
                            "sriperumbudur_log_above_thm1_log",
                            srip.log_value,
                            thm1.log_value,
                            0.0,
                        ));
                    }
                    if let Some(lp) = lower_prob.filter(|_| thm1.value <= 1.0) {
                        checks.push(Check::at_most("lower_prob_below_thm1", lp, thm1.value, 0.0));
                    }
                    let verdict = if thm1_is_tightest(&rows) {
                        "thm1 tightest"
                    } else {
                        "thm1 not tightest"
                    };
                    table.push(
                        vec![
                            Value::int(d),
                            Value::num(r),
                            Value::int(features),
                            Value::num(eps),
                            Value::num(thm1.value),
                            Value::opt(get(RAHIMI)),
                            Value::opt(get(SUTHERLAND)),
                            Value::num(srip.log_value),
                            Value::opt(get(LOWER_EXPECTED)),
                            Value::opt(lower_prob),
                            Value::text(verdict),
                        ],
                        checks,
                    );
                }
            }
        }
    }
    table
        .notes
        .push("bounds are unclipped; sriperumbudur is reported as a natural log".into());
    table
        .notes
        .push("the sriperumbudur comparison is asserted only where thm1 >= 1e-100".into());
    Ok(table)
}

pub fn compare_inversions(p: &CompareInversions) -> anyhow::Result<Table> {
    let mut table = Table::new(&[
        "d",
        "R",
        "D",
        "tau",
        "eps_ours",
        "eps_sriperumbudur",
        "d_eps2",
        "thm1_at_eps_ours",
        "exp_neg_tau",
        "verdict",
    ]);
    let mut skipped = 0;
    for &d in &p.d {
        for &r in &p.r {
            for &features in &p.features {
                for &tau in &p.tau {
                    let eps_sri = epsilon_at_confidence_sriperumbudur(
                        r,
                        features,
                        d,
                        f64::from(d).sqrt(),
                        tau,
                    )?;
                    let ours = epsilon_at_confidence_thm1(r, features, tau).ok();
                    let target = (-tau).exp();
                    let mut checks = Vec::new();
                    let (d_eps2, at) = match ours {
                        Some(e) => {
                            let d_eps2 = features as f64 * e * e;
                            let at = thm1_value(r, features as f64, e);
                            if d_eps2 >= p.min_d_eps2 {
                                checks.push(Check::at_most(
                                    "thm1_at_eps_ours_below_exp_neg_tau",
                                    at,
                                    target,
                                    0.0,
                                ));
                            }
                            if r >= 1.0 {
                                checks.push(Check::at_most(
                                    "eps_ours_below_sriperumbudur",
                                    e,
                                    eps_sri,
                                    0.0,
                                ));
                            }
                            (Some(d_eps2), Some(at))
                        }
                        None => {
                            skipped += 1;
                            (None, None)
                        }
                    };
                    let mut values = vec![
                        Value::int(d),
                        Value::num(r),
                        Value::int(features),
                        Value::num(tau),
                        Value::opt(ours),
                        Value::num(eps_sri),
                        Value::opt(d_eps2),
                        Value::opt(at),
                        Value::num(target),
                    ];
                    let row_checks = checks;
                    values.push(Value::Null);
                    table.push(values, row_checks);
                }
            }
        }
    }
    fill_verdicts(&mut table);
    if skipped > 0 {
        table.notes.push(format!(
            "{skipped} rows have no closed-form epsilon (R too small for the square root)"
        ));
    }
    Ok(table)
}

/// Writes each row's verdict into its last column.
pub(crate) fn fill_verdicts(table: &mut Table) {
    for row in &mut table.rows {
        let v = row.verdict();
        if let Some(last) = row.values.last_mut() {
            *last = Value::text(v);
        }
    }
}
