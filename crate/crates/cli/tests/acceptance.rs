//! The eleven acceptance checks at full scale, one PASS/FAIL line each.

mod common;

use std::io::Write;
use std::time::Instant;

use zspecial::field_create;
use zspecial::grid::{
    digit_lemma_check, dirichlet_check, equivalence_sweep, invariance_check, ones_degree_check,
    prime_power, sheats_check, twist_check, witness_check, CheckOutcome, TupleGrid,
};
use zspecial::polyring::DEFAULT_ENUMERATION_BUDGET;

const GRID_QS: [u64; 4] = [2, 3, 4, 5];
const WIDE_QS: [u64; 6] = [2, 3, 4, 5, 8, 9];
const BUDGET: u64 = DEFAULT_ENUMERATION_BUDGET;
const SEED: u64 = 20240601;
const INVARIANCE_WORK: u128 = 50_000_000;
const TWIST_DIRECT_WORK: u128 = 200_000_000;

fn ctx(q: u64) -> std::sync::Arc<zspecial::FieldCtx> {
    let (p, e) = prime_power(q).unwrap();
    field_create(p, e).unwrap()
}

#[test]
fn acceptance() {
    let mut outs: Vec<CheckOutcome> = [
        "1 oracle equivalence",
        "2 exact degree",
        "3 trivial zeros",
        "4 single-exponent degree",
        "5 digit lemmas",
        "6 permutation invariance",
        "7 frobenius twist",
        "8 witness specialization",
        "9 polynomiality",
        "10 dirichlet zeros",
        "11 cli golden files",
    ]
    .iter()
    .map(|n| CheckOutcome::new(n))
    .collect();
    let grid = TupleGrid {
        max_s: 4,
        max_beta: 6,
        budget: BUDGET,
    };
    let mut notes = Vec::new();

    for q in GRID_QS {
        let f = ctx(q);
        let t = Instant::now();
        let sweep = equivalence_sweep(&f, &grid);
        let t_sweep = t.elapsed();
        outs[0].merge(sweep.oracle);
        outs[1].merge(sweep.degree);
        outs[1].merge(ones_degree_check(&f, 12));
        outs[2].merge(sweep.zeros);
        outs[8].merge(sweep.polynomiality);
        let t = Instant::now();
        let (twist, direct_rhs) = twist_check(&sweep.table, BUDGET, TWIST_DIRECT_WORK);
        outs[6].merge(twist);
        let t_twist = t.elapsed();
        let t = Instant::now();
        outs[7].merge(witness_check(&sweep.table, BUDGET));
        notes.push(format!(
            "q={q}: {} direct tables in {t_sweep:.1?}, twist {t_twist:.1?} ({direct_rhs} direct right-hand sides), witness {:.1?}",
            sweep.table.polys.len(),
            t.elapsed()
        ));
    }

    for q in WIDE_QS {
        let f = ctx(q);
        outs[3].merge(sheats_check(&f, 200, BUDGET));
        outs[4].merge(digit_lemma_check(&f, 200, SEED));
        let (inv, computed) = invariance_check(&f, 1000, SEED, BUDGET, INVARIANCE_WORK);
        outs[5].merge(inv);
        notes.push(format!("q={q}: invariance with computed degrees in {computed} of 1000 cases"));
    }

    for q in [3, 4, 5] {
        outs[9].merge(dirichlet_check(&ctx(q), 2, 2, 4, BUDGET));
    }

    let bad = common::check_golden();
    outs[10].cases = common::GOLDEN.len() as u64;
    outs[10].failures = bad.iter().map(|s| format!("golden mismatch: {s}")).collect();

    let mut err = std::io::stderr().lock();
    for n in &notes {
        writeln!(err, "  {n}").unwrap();
    }
    for o in &outs {
        writeln!(err, "{o}").unwrap();
        for f in o.failures.iter().take(10) {
            writeln!(err, "    {f}").unwrap();
        }
    }
    let failed: Vec<&str> = outs.iter().filter(|o| !o.passed()).map(|o| o.name.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
