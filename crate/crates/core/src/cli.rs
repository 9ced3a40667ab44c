//! Command-line surface. `run` writes everything to the given writer so the
//! commands can be exercised in-process.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::balance::{balance_verdict, count_vector, proximity, CountVector};
use crate::fixtures;
use crate::homebuilding::{HomeError, RequirementTable};
use crate::improve::{
    apply_selection, improvement_loop, mckp_exact, mckp_greedy, BudgetedMckp, RepairContext,
    DEFAULT_COST_SCALE, DEFAULT_STATE_CAP,
};
use crate::instance::{load_instance, save_instance, HomebuildingSection, IoError, Loaded};
use crate::jit::{penalty_max, penalty_sum, schedule_windows};
use crate::model::{interval_bags, makespan};
use crate::report::{
    balance_curve_csv, compare_tables, comparison_csv, render_gantt, requirements_csv,
    violation_rows,
};

#[derive(Debug, Parser)]
#[command(
    name = "jitbal",
    version,
    about = "Balanced just-in-time scheduling toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file against the schema and model rules.
    Validate { file: PathBuf },
    /// Makespan and interval bags, window completions and penalties, or the
    /// monthly requirement table, depending on the instance mode.
    Evaluate { file: PathBuf },
    /// Balance verdict against the reference profile or capacity.
    Balance { file: PathBuf },
    /// Repair a home-building schedule.
    Improve {
        file: PathBuf,
        /// Cost budget per iteration.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Write the instance with the repaired schedule here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Select once among the correction groups stored in the file.
        #[arg(long)]
        explicit_groups: bool,
    },
    /// Per-month required vs capacity for one detail type.
    Report {
        file: PathBuf,
        #[arg(long)]
        detail: String,
        /// Overrides the file's capacity for this detail.
        #[arg(long)]
        capacity: Option<f64>,
        /// Write the curve here instead of printing it.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Use the stored reference requirements instead of computing them.
        #[arg(long)]
        reference: bool,
        /// Also write the full month x detail table.
        #[arg(long)]
        table_csv: Option<PathBuf>,
        /// Also write a computed vs reference comparison.
        #[arg(long)]
        compare_csv: Option<PathBuf>,
        /// Print the team chart after the curve.
        #[arg(long)]
        gantt: bool,
    },
    /// Bundled instance files.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixtureAction {
    List,
    /// Print a fixture, or write it with --out.
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error("{0}")]
    Usage(String),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// 2 for I/O failures, 1 for invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(e) if e.is_io() => 2,
            CliError::Output(_) => 2,
            _ => 1,
        }
    }
}

impl From<HomeError> for CliError {
    fn from(e: HomeError) -> Self {
        CliError::Input(e.into())
    }
}

fn num(v: f64) -> String {
    format!("{v:.2}")
}

fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

fn homebuilding<'a>(
    loaded: &Loaded<'a>,
    command: &str,
) -> Result<&'a HomebuildingSection, CliError> {
    match loaded {
        Loaded::Homebuilding(h) => Ok(h),
        _ => Err(CliError::Usage(format!(
            "{command} needs a homebuilding instance"
        ))),
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    let mut s = String::new();
    match cli.command {
        Command::Validate { file } => {
            let f = load_instance(&file)?;
            let loaded = f.validate()?;
            let summary = match &loaded {
                Loaded::Modular { instance, .. } => format!(
                    "{} job templates, {} processors, {} intervals",
                    instance.jobs.len(),
                    instance.processors(),
                    instance.grid.intervals
                ),
                Loaded::Homebuilding(h) => format!(
                    "{} buildings, {} teams, {} months",
                    h.catalog.buildings.len(),
                    h.schedule.teams.len(),
                    h.horizon_months
                ),
                Loaded::Windows { instance, .. } => format!(
                    "{} jobs, {} machines",
                    instance.jobs().count(),
                    instance.machines().len()
                ),
            };
            writeln!(s, "ok: {} ({summary})", f.name).unwrap();
        }
        Command::Evaluate { file } => {
            let f = load_instance(&file)?;
            evaluate(&f.validate()?, &mut s)?;
        }
        Command::Balance { file } => {
            let f = load_instance(&file)?;
            balance(&f.validate()?, &mut s)?;
        }
        Command::Improve {
            file,
            budget,
            max_iters,
            out: target,
            explicit_groups,
        } => {
            let mut f = load_instance(&file)?;
            let loaded = f.validate()?;
            let h = homebuilding(&loaded, "improve")?;
            let mut config = h.improve.clone();
            if let Some(b) = budget {
                config.budget = b;
            }
            if let Some(n) = max_iters {
                config.max_iterations = n;
            }
            let schedule = if explicit_groups {
                improve_explicit(h, config.budget, &mut s)?
            } else {
                improve_loop(h, &config, &mut s)?
            };
            writeln!(
                s,
                "\n{}",
                render_gantt(&h.catalog, &schedule, h.horizon_months)?
            )
            .unwrap();
            if let Some(path) = target {
                f.homebuilding.as_mut().expect("homebuilding").schedule = schedule;
                save_instance(&f, &path)?;
                writeln!(s, "wrote {}", path.display()).unwrap();
            }
        }
        Command::Report {
            file,
            detail,
            capacity,
            csv,
            reference,
            table_csv,
            compare_csv,
            gantt,
        } => {
            let f = load_instance(&file)?;
            let loaded = f.validate()?;
            let h = homebuilding(&loaded, "report")?;
            let computed = h
                .catalog
                .horizon_requirement_table(&h.schedule, h.horizon_months)?;
            let table = if reference {
                h.reference_table()
                    .ok_or_else(|| CliError::Usage("file has no reference_requirements".into()))?
            } else {
                computed.clone()
            };
            let mut cap = h.capacity.clone();
            if let Some(c) = capacity {
                cap[table.detail_index(&detail)?] = c;
            }
            let cap = CountVector::new(cap).map_err(IoError::from)?;
            let curve = balance_curve_csv(&table, &cap, &detail)?;
            match csv {
                Some(p) => {
                    write_text(&p, &curve)?;
                    writeln!(s, "wrote {}", p.display()).unwrap();
                }
                None => s.push_str(&curve),
            }
            if let Some(p) = table_csv {
                write_text(&p, &requirements_csv(&table))?;
                writeln!(s, "wrote {}", p.display()).unwrap();
            }
            if let Some(p) = compare_csv {
                let r = h
                    .reference_table()
                    .ok_or_else(|| CliError::Usage("file has no reference_requirements".into()))?;
                write_text(&p, &comparison_csv(&compare_tables(&computed, &r)))?;
                writeln!(s, "wrote {}", p.display()).unwrap();
            }
            if gantt {
                s.push('\n');
                s.push_str(&render_gantt(&h.catalog, &h.schedule, h.horizon_months)?);
            }
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                for n in fixtures::names() {
                    writeln!(s, "{n}").unwrap();
                }
            }
            FixtureAction::Emit { name, out: target } => {
                let text = fixtures::text(&name)
                    .ok_or_else(|| CliError::Usage(format!("unknown fixture {name}")))?;
                match target {
                    Some(p) => {
                        write_text(&p, text)?;
                        writeln!(s, "wrote {}", p.display()).unwrap();
                    }
                    None => s.push_str(text),
                }
            }
        },
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| {
        CliError::Input(IoError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn evaluate(loaded: &Loaded, s: &mut String) -> Result<(), CliError> {
    match loaded {
        Loaded::Modular {
            instance,
            reference,
            ..
        } => {
            writeln!(s, "makespan: {}", makespan(instance)).unwrap();
            let bags = interval_bags(instance).map_err(IoError::from)?;
            for bag in &bags {
                let e = count_vector(bag, instance.universe.len()).map_err(IoError::from)?;
                let d = proximity(reference, &e).map_err(IoError::from)?;
                writeln!(
                    s,
                    "interval {}: {{{}}} counts {:?} proximity {d}",
                    bag.interval,
                    bag.names(&instance.universe).join(","),
                    e.to_counts()
                )
                .unwrap();
            }
        }
        Loaded::Windows { instance, weights } => {
            let sched = schedule_windows(instance);
            for j in &sched.jobs {
                writeln!(
                    s,
                    "{} machine {} start {:.3} completion {:.3}{}",
                    j.id,
                    j.machine,
                    j.start,
                    j.completion,
                    if j.on_time { "" } else { " LATE" }
                )
                .unwrap();
            }
            let jobs: Vec<_> = instance.jobs().cloned().collect();
            let c = sched.completions();
            let fs = penalty_sum(&jobs, &c, *weights).map_err(IoError::from)?;
            let fm = penalty_max(&jobs, &c, *weights).map_err(IoError::from)?;
            writeln!(s, "feasible: {}", sched.feasible).unwrap();
            writeln!(s, "penalty sum: {fs:.3}\npenalty max: {fm:.3}").unwrap();
        }
        Loaded::Homebuilding(h) => {
            let t = h
                .catalog
                .horizon_requirement_table(&h.schedule, h.horizon_months)?;
            write_table(h, &t, s);
            let peaks: Vec<String> = t
                .detail_types
                .iter()
                .enumerate()
                .map(|(d, id)| {
                    let (m, v) = t.peak(d);
                    format!("{id} {} in {}", num(v), h.month_label(m))
                })
                .collect();
            writeln!(s, "peaks: {}", peaks.join(", ")).unwrap();
        }
    }
    Ok(())
}

fn write_table(h: &HomebuildingSection, t: &RequirementTable, s: &mut String) {
    writeln!(s, "month {}", t.detail_types.join(" ")).unwrap();
    for (i, r) in t.rows.iter().enumerate() {
        writeln!(s, "{} {}", h.month_label(i + 1), row(r)).unwrap();
    }
}

fn balance(loaded: &Loaded, s: &mut String) -> Result<(), CliError> {
    match loaded {
        Loaded::Modular {
            instance,
            reference,
            threshold,
        } => {
            let v = balance_verdict(instance, reference, *threshold).map_err(IoError::from)?;
            writeln!(s, "proximities: {:?}", v.deltas).unwrap();
            writeln!(s, "balance index: {}", v.balance_index()).unwrap();
            writeln!(s, "threshold: {}", v.threshold).unwrap();
            writeln!(s, "satisfied: {}", v.satisfied).unwrap();
            writeln!(s, "violating intervals: {:?}", v.violating).unwrap();
        }
        Loaded::Windows { instance, .. } => {
            let sched = schedule_windows(instance);
            writeln!(s, "feasible: {}", sched.feasible).unwrap();
            if let Some(j) = sched.first_late() {
                writeln!(
                    s,
                    "first late job: {} (completion {:.3})",
                    j.id, j.completion
                )
                .unwrap();
            }
        }
        Loaded::Homebuilding(h) => {
            let t = h
                .catalog
                .horizon_requirement_table(&h.schedule, h.horizon_months)?;
            let cap = h.capacity_vector().map_err(IoError::from)?;
            let rows = violation_rows(&t, &cap);
            writeln!(s, "capacity: {}", row(cap.as_slice())).unwrap();
            writeln!(
                s,
                "violated months: {:?}",
                rows.iter().map(|(m, _)| *m).collect::<Vec<_>>()
            )
            .unwrap();
            for (m, v) in &rows {
                let parts: Vec<String> = v
                    .as_slice()
                    .iter()
                    .zip(&t.detail_types)
                    .filter(|(x, _)| **x > 0.0)
                    .map(|(x, d)| format!("{d} +{}", num(*x)))
                    .collect();
                writeln!(
                    s,
                    "  {:>2} ({}): {}",
                    m,
                    h.month_label(*m),
                    parts.join(", ")
                )
                .unwrap();
            }
            writeln!(s, "balanced: {}", rows.is_empty()).unwrap();
        }
    }
    Ok(())
}

fn improve_loop(
    h: &HomebuildingSection,
    config: &crate::improve::ImproveConfig,
    s: &mut String,
) -> Result<crate::homebuilding::TeamSchedule, CliError> {
    let cap = h.capacity_vector().map_err(IoError::from)?;
    let ctx = RepairContext {
        catalog: &h.catalog,
        capacity: &cap,
        horizon: h.horizon_months,
        config,
    };
    let res = improvement_loop(&ctx, &h.schedule).map_err(IoError::from)?;
    writeln!(s, "initial measure: {:.4}", res.initial_measure).unwrap();
    for r in &res.trace {
        let moves: Vec<String> = r.applied.iter().map(ToString::to_string).collect();
        writeln!(
            s,
            "iteration {}: measure {:.4} -> {:.4}, max excess {}, groups {}, cost {:.1}, moves [{}]",
            r.iteration,
            r.measure_before,
            r.measure_after,
            num(r.max_violation),
            r.groups,
            r.cost,
            moves.join("; ")
        )
        .unwrap();
    }
    let t = ctx.table(&res.schedule)?;
    let peaks: Vec<String> = (0..t.detail_types.len())
        .map(|d| num(t.peak(d).1))
        .collect();
    writeln!(s, "outcome: {:?}", res.outcome).unwrap();
    writeln!(s, "final measure: {:.4}", res.final_measure).unwrap();
    writeln!(s, "final peaks: {}", peaks.join(" ")).unwrap();
    Ok(res.schedule)
}

fn improve_explicit(
    h: &HomebuildingSection,
    budget: f64,
    s: &mut String,
) -> Result<crate::homebuilding::TeamSchedule, CliError> {
    let groups = h
        .correction_groups
        .clone()
        .ok_or_else(|| CliError::Usage("file has no correction_groups".into()))?;
    let problem = BudgetedMckp::new(groups, budget).map_err(IoError::from)?;
    let greedy = mckp_greedy(&problem);
    let exact =
        mckp_exact(&problem, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP).map_err(IoError::from)?;
    for (label, sel) in [("greedy", &greedy), ("exact", &exact)] {
        let picked: BTreeMap<usize, String> = sel
            .taken()
            .map(|(g, v)| {
                let c = &problem.variant(g, v).expect("taken").correction;
                (g, format!("V{g}_{} ({c})", v + 1))
            })
            .collect();
        writeln!(
            s,
            "{label}: profit {:.2} cost {:.2} [{}]",
            sel.profit,
            sel.cost,
            picked.into_values().collect::<Vec<_>>().join(", ")
        )
        .unwrap();
    }
    let next = apply_selection(&h.catalog, &h.schedule, &problem, &greedy, h.horizon_months)
        .map_err(IoError::from)?;
    for a in next.assignments() {
        if h.schedule.locate(&a.building) != next.locate(&a.building) {
            writeln!(s, "{} now starts at {:.4}", a.building, a.start).unwrap();
        }
    }
    Ok(next)
}
