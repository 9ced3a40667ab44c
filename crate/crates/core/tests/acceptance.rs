//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criterion 2 fails on its first interval: the published bag for interval 1
//! holds a D3 where the job chains place a D4 (the published bags also
//! disagree with the chains on the schedule-wide D3 and D4 totals). That line
//! is expected to stay red. The process exits non-zero only when some other
//! criterion fails.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use jitbal::balance::{count_vector, proximity, CountVector};
use jitbal::fixtures;
use jitbal::improve::{
    improvement_loop, mckp_exact, mckp_greedy, BudgetedMckp, Correction, CorrectionGroup,
    CorrectionVariant, ImproveConfig, RepairContext, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP,
};
use jitbal::instance::Loaded;
use jitbal::jit::{schedule_windows, WindowInstance};
use jitbal::model::{interval_bags, makespan};
use jitbal::report::compare_tables;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: &[u32] = &[2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cv(v: &[u32]) -> CountVector {
    CountVector::from_counts(v)
}

fn e0() -> CountVector {
    cv(&[2, 3, 2, 1, 1, 0])
}

fn c1_proximity() -> Outcome {
    let printed = [
        cv(&[2, 4, 1, 0, 1, 1]),
        cv(&[2, 2, 1, 2, 2, 0]),
        cv(&[3, 3, 1, 0, 1, 1]),
        cv(&[0, 1, 1, 3, 3, 1]),
    ];
    let t = Instant::now();
    let d: Vec<f64> = printed
        .iter()
        .map(|e| proximity(&e0(), e).unwrap())
        .collect();
    let elapsed = t.elapsed();
    // Known deviation: the published value for interval 2 is 3.
    let ok = d == [3.0, 4.0, 4.0, 15.0] && elapsed < Duration::from_millis(1);
    check(
        ok,
        format!("deltas {d:?} (interval 2 published as 3, computed 4), {elapsed:?}"),
    )
}

fn c2_pipeline() -> Outcome {
    let Loaded::Modular { instance, .. } = fixtures::modular_3x4().validate().unwrap() else {
        unreachable!()
    };
    let printed: [&[&str]; 4] = [
        &["D1", "D1", "D2", "D2", "D2", "D2", "D3", "D5", "D6"],
        &["D1", "D1", "D2", "D2", "D3", "D4", "D4", "D5", "D5"],
        &["D1", "D1", "D1", "D2", "D2", "D2", "D3", "D5", "D6"],
        &["D2", "D3", "D4", "D4", "D4", "D5", "D5", "D5", "D6"],
    ];
    let counts: [[u64; 6]; 4] = [
        [2, 4, 1, 0, 1, 1],
        [2, 2, 1, 2, 2, 0],
        [3, 3, 1, 0, 1, 1],
        [0, 1, 1, 3, 3, 1],
    ];
    let bags = interval_bags(&instance).unwrap();
    let mut bad = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let names = bag.names(&instance.universe);
        let c = count_vector(bag, 6).unwrap().to_counts();
        if names != printed[i] || c != counts[i] {
            bad.push(format!("interval {} got {:?}", i + 1, c));
        }
    }
    let l = makespan(&instance);
    if l != 4 {
        bad.push(format!("makespan {l}"));
    }
    if bad.is_empty() {
        check(true, "4 bags and makespan 4 match")
    } else {
        check(false, format!("mismatch: {}", bad.join("; ")))
    }
}

fn c3_windows() -> Outcome {
    let run = |name: &str| {
        let Loaded::Windows { instance, .. } = fixtures::load(name).unwrap().validate().unwrap()
        else {
            unreachable!()
        };
        instance
    };
    let close = |s: &jitbal::jit::WindowSchedule, m: u32, want: &[f64]| {
        let got: Vec<f64> = s
            .jobs
            .iter()
            .filter(|j| j.machine == m)
            .map(|j| j.completion)
            .collect();
        got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-9)
    };
    let single = run("windows-single");
    let s5 = schedule_windows(&single);
    let s6 = schedule_windows(&run("windows-three"));
    let mut jobs: Vec<_> = single.jobs().cloned().collect();
    jobs[3].processing_time = 1.2;
    let p = schedule_windows(&WindowInstance::new(jobs).unwrap());
    let late = p.first_late().map(|j| (j.id.clone(), j.completion));
    let ok = s5.feasible
        && close(&s5, 1, &[0.5, 1.2, 1.8, 2.7, 3.4, 4.3, 5.0])
        && s6.feasible
        && close(&s6, 1, &[1.2, 2.5, 3.7, 4.8])
        && close(&s6, 2, &[0.7, 2.3, 3.2, 4.9])
        && close(&s6, 3, &[1.2, 2.5, 3.8, 5.0])
        && !p.feasible
        && matches!(&late, Some((id, c)) if id == "a4" && (c - 3.0).abs() <= 1e-9);
    check(
        ok,
        format!("single/three feasible, perturbed first late {late:?}"),
    )
}

fn brute(p: &BudgetedMckp) -> f64 {
    fn go(groups: &[CorrectionGroup], left: f64) -> f64 {
        let Some((g, rest)) = groups.split_first() else {
            return 0.0;
        };
        let mut best = go(rest, left);
        for v in &g.variants {
            if v.cost <= left + 1e-9 {
                best = best.max(v.profit + go(rest, left - v.cost));
            }
        }
        best
    }
    go(p.groups(), p.budget())
}

fn c4_mckp() -> Outcome {
    let groups = fixtures::kope_1982()
        .homebuilding
        .unwrap()
        .correction_groups
        .unwrap();
    let combos: usize = groups.iter().map(|g| g.variants.len()).product();
    let p = BudgetedMckp::new(groups, 3.0).unwrap();
    let g = mckp_greedy(&p);
    let e = mckp_exact(&p, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP).unwrap();
    let want = vec![(2, 3), (3, 3)];
    let table_ok = g.taken().collect::<Vec<_>>() == want
        && e.taken().collect::<Vec<_>>() == want
        && (g.profit - 5.0).abs() < 1e-9
        && (g.cost - 3.0).abs() < 1e-9
        && (brute(&p) - 5.0).abs() < 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(0x6d636b70);
    let mut worst = Duration::ZERO;
    let mut failures = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=6);
        let groups = (1..=n)
            .map(|index| CorrectionGroup {
                index,
                targets: vec![],
                variants: (0..rng.random_range(1..=5))
                    .map(|_| CorrectionVariant {
                        correction: Correction::None,
                        profit: f64::from(rng.random_range(0..100u32)) / 10.0,
                        cost: f64::from(rng.random_range(0..60u32)) / 10.0,
                    })
                    .collect(),
            })
            .collect();
        let p = BudgetedMckp::new(groups, f64::from(rng.random_range(0..150u32)) / 10.0).unwrap();
        let t = Instant::now();
        let e = mckp_exact(&p, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP).unwrap();
        worst = worst.max(t.elapsed());
        let g = mckp_greedy(&p);
        if g.profit > e.profit + 1e-9
            || (e.profit - brute(&p)).abs() > 1e-9
            || e.cost > p.budget() + 1e-9
            || g.cost > p.budget() + 1e-9
        {
            failures += 1;
        }
    }
    check(
        table_ok && failures == 0 && worst < Duration::from_millis(50),
        format!(
            "fixture groups {combos} combinations, selection V2_4+V3_4 = {table_ok}; \
             500 random: {failures} failures, slowest exact {worst:?}"
        ),
    )
}

fn c5_calibration() -> Outcome {
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let row = |m: usize, sec: &str| {
        let p = h
            .catalog
            .monthly_floor_requirements(&h.schedule, m)
            .unwrap();
        let i = h
            .catalog
            .section_types
            .iter()
            .position(|s| s.id == sec)
            .unwrap();
        p.rows[i].clone()
    };
    let cells = [
        (row(1, "g1")[1], 2.00, 0.01),
        (row(1, "g1")[3], 0.11, 0.01),
        (row(2, "g1")[3], 4.22, 0.01),
        (row(9, "g2")[1], 2.71, 0.02),
        (row(9, "g2")[2], 5.42, 0.02),
    ];
    let ok = cells
        .iter()
        .all(|(got, want, tol)| (got - want).abs() <= *tol);
    let shown: Vec<String> = cells.iter().map(|c| format!("{:.3}", c.0)).collect();
    check(ok, format!("cells {}", shown.join(", ")))
}

fn c6_aggregation() -> Outcome {
    // Month 1: only a1 active, laying one r2 floor per section plus part of r4.
    // d2 occurs on r2 only: 2 g1 x 28 + g2 28 + g5 30 + 3 w1 x 2 + 4 w3 x 1.
    let by_hand = 2.0 * 28.0 + 28.0 + 30.0 + 3.0 * 2.0 + 4.0;
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let t = h
        .catalog
        .horizon_requirement_table(&h.schedule, h.horizon_months)
        .unwrap();
    let d2 = t.rows[0][1];
    let cells = compare_tables(&t, &h.reference_table().unwrap());
    let c = cells
        .iter()
        .find(|c| c.month == 1 && c.detail == "d2")
        .unwrap();
    let rel = c.relative.unwrap();
    let ok = (d2 - by_hand).abs() <= 1.0 && rel <= 0.03 && cells.len() == 19 * 8;
    check(
        ok,
        format!(
            "month-1 d2 {d2:.2} (by hand {by_hand}), vs published {:.0}: {:.1}%, {} cells",
            c.reference,
            rel * 100.0,
            cells.len()
        ),
    )
}

/// Fewest adjacent unit moves turning `from` into `to`.
fn bfs_moves(from: &[u32], to: &[u32]) -> u32 {
    let mut seen = HashSet::from([from.to_vec()]);
    let mut queue = VecDeque::from([(from.to_vec(), 0)]);
    while let Some((v, d)) = queue.pop_front() {
        if v == to {
            return d;
        }
        for i in 0..v.len() {
            if v[i] == 0 {
                continue;
            }
            for j in [i.wrapping_sub(1), i + 1] {
                if j < v.len() {
                    let mut w = v.clone();
                    w[i] -= 1;
                    w[j] += 1;
                    if seen.insert(w.clone()) {
                        queue.push_back((w, d + 1));
                    }
                }
            }
        }
    }
    unreachable!("equal totals are always connected")
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

fn c7_metric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x64656c7461);
    let mut axiom_failures = 0;
    for _ in 0..1000 {
        let len = rng.random_range(2..=8);
        let total = rng.random_range(0..=30);
        let mut draw = || {
            let mut v = vec![0u32; len];
            for _ in 0..total {
                v[rng.random_range(0..len)] += 1;
            }
            cv(&v)
        };
        let (a, b, c) = (draw(), draw(), draw());
        let ab = proximity(&a, &b).unwrap();
        let ba = proximity(&b, &a).unwrap();
        let ac = proximity(&a, &c).unwrap();
        let bc = proximity(&b, &c).unwrap();
        if ab < 0.0
            || ab != ba
            || (ab == 0.0) != (a == b)
            || proximity(&a, &a).unwrap() != 0.0
            || ac > ab + bc + 1e-9
        {
            axiom_failures += 1;
        }
    }
    let mut cache: HashMap<(Vec<u32>, Vec<u32>), u32> = HashMap::new();
    let mut pairs = 0;
    let mut oracle_failures = 0;
    for parts in 1..=4 {
        for total in 0..=8 {
            let all = compositions(total, parts);
            for x in &all {
                for y in &all {
                    let want = *cache
                        .entry((x.clone(), y.clone()))
                        .or_insert_with(|| bfs_moves(x, y));
                    pairs += 1;
                    if proximity(&cv(x), &cv(y)).unwrap() != f64::from(want) {
                        oracle_failures += 1;
                    }
                }
            }
        }
    }
    check(
        axiom_failures == 0 && oracle_failures == 0,
        format!("1000 triples: {axiom_failures} axiom failures; {pairs} BFS pairs: {oracle_failures} mismatches"),
    )
}

fn c8_loop() -> Outcome {
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let cap = h.capacity_vector().unwrap();
    let cfg = ImproveConfig {
        budget: 5.0,
        ..ImproveConfig::default()
    };
    let ctx = RepairContext {
        catalog: &h.catalog,
        capacity: &cap,
        horizon: h.horizon_months,
        config: &cfg,
    };
    let t = Instant::now();
    let res = improvement_loop(&ctx, &h.schedule).unwrap();
    let elapsed = t.elapsed();
    let mut measures = vec![res.initial_measure];
    measures.extend(res.trace.iter().map(|r| r.measure_after));
    let monotone = measures.windows(2).all(|w| w[1] <= w[0]);
    let initial_peak = ctx.table(&h.schedule).unwrap().peak(0).1;
    let peak = ctx.table(&res.schedule).unwrap().peak(0).1;
    let valid = res
        .schedule
        .validate(&h.catalog, Some(h.horizon_months as f64))
        .is_ok();
    check(
        elapsed < Duration::from_secs(10) && monotone && peak < 1562.0 && valid,
        format!(
            "{:?} after {} iterations in {elapsed:?}; d1 peak {initial_peak:.1} -> {peak:.1}; measure {:.4} -> {:.4}",
            res.outcome,
            res.trace.len(),
            res.initial_measure,
            res.final_measure
        ),
    )
}

fn c9_determinism() -> Outcome {
    use clap::Parser;
    use jitbal::cli::{run, Cli};
    let dir = tempfile::tempdir().unwrap();
    let mut paths = BTreeMap::new();
    for name in fixtures::names() {
        let p = dir.path().join(format!("{name}.json"));
        std::fs::write(&p, fixtures::text(name).unwrap()).unwrap();
        paths.insert(name, p.to_str().unwrap().to_string());
    }
    let k = paths["kope-1982"].as_str();
    let mut commands: Vec<Vec<String>> = Vec::new();
    for p in paths.values() {
        for c in ["validate", "evaluate", "balance"] {
            commands.push(vec![c.into(), p.clone()]);
        }
    }
    for extra in [
        vec!["improve", k],
        vec!["improve", k, "--budget", "0"],
        vec!["improve", k, "--explicit-groups", "--budget", "3"],
        vec!["report", k, "--detail", "d1", "--gantt"],
        vec![
            "report",
            k,
            "--detail",
            "d1",
            "--capacity",
            "1480",
            "--reference",
        ],
        vec!["fixtures", "list"],
        vec!["fixtures", "emit", "kope-1982"],
    ] {
        commands.push(extra.into_iter().map(String::from).collect());
    }
    let once = |args: &[String]| {
        let cli =
            Cli::try_parse_from(std::iter::once("jitbal".to_string()).chain(args.iter().cloned()))
                .unwrap();
        let mut out = Vec::new();
        run(cli, &mut out).unwrap();
        out
    };
    let diverged: Vec<String> = commands
        .iter()
        .filter(|c| once(c) != once(c))
        .map(|c| c.join(" "))
        .collect();
    check(
        diverged.is_empty(),
        format!(
            "{} commands run twice, {} differ",
            commands.len(),
            diverged.len()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "proximity reproduction", c1_proximity),
        (2, "interval pipeline", c2_pipeline),
        (3, "window feasibility", c3_windows),
        (4, "multiple-choice knapsack", c4_mckp),
        (5, "home-building calibration", c5_calibration),
        (6, "aggregation oracle", c6_aggregation),
        (7, "metric properties", c7_metric),
        (8, "improvement loop", c8_loop),
        (9, "determinism", c9_determinism),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_RED.contains(&n) {
            " [known]"
        } else {
            ""
        };
        println!("{tag} {n} {name}: {}{note}", o.detail);
        if !o.pass && !KNOWN_RED.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
