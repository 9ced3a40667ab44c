//! CSV exports, computed-vs-reference comparison and a text Gantt chart.
//! All output is a pure function of the input, so byte-identical per run.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::balance::{violation, CountVector};
use crate::homebuilding::{Catalog, HomeError, RequirementTable, TeamSchedule};
use crate::instance::IoError;

/// `month,<detail ids...>` with one row per month, two decimals.
pub fn requirements_csv(table: &RequirementTable) -> String {
    let mut out = String::from("month");
    for d in &table.detail_types {
        out.push(',');
        out.push_str(d);
    }
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        write!(out, "{}", i + 1).unwrap();
        for v in row {
            write!(out, ",{v:.2}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Required vs capacity of one detail type, month by month.
pub fn balance_curve_csv(
    table: &RequirementTable,
    capacity: &CountVector,
    detail: &str,
) -> Result<String, HomeError> {
    let d = table.detail_index(detail)?;
    let cap = capacity[d];
    let mut out = String::from("month,required,capacity,violation\n");
    for (i, req) in table.column(d).enumerate() {
        writeln!(
            out,
            "{},{req:.2},{cap:.2},{:.2}",
            i + 1,
            (req - cap).max(0.0)
        )
        .unwrap();
    }
    Ok(out)
}

/// Months with any detail above capacity, with the per-detail excess.
pub fn violation_rows(
    table: &RequirementTable,
    capacity: &CountVector,
) -> Vec<(usize, CountVector)> {
    (1..=table.months())
        .filter_map(|m| {
            let v = violation(&table.month(m), capacity).expect("lengths agree");
            (v.total() > 0.0).then_some((m, v))
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn export_requirements_csv(
    table: &RequirementTable,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    write_file(path.as_ref(), &requirements_csv(table))
}

pub fn export_balance_curve(
    table: &RequirementTable,
    capacity: &CountVector,
    detail: &str,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    write_file(path.as_ref(), &balance_curve_csv(table, capacity, detail)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellComparison {
    pub month: usize,
    pub detail: String,
    pub computed: f64,
    pub reference: f64,
    /// `|computed - reference| / reference`; absent when the reference is 0.
    pub relative: Option<f64>,
}

/// Cell-by-cell comparison over the months and details both tables share.
pub fn compare_tables(
    computed: &RequirementTable,
    reference: &RequirementTable,
) -> Vec<CellComparison> {
    let mut out = Vec::new();
    for (m, (c_row, r_row)) in computed.rows.iter().zip(&reference.rows).enumerate() {
        for ((d, c), r) in computed.detail_types.iter().zip(c_row).zip(r_row) {
            out.push(CellComparison {
                month: m + 1,
                detail: d.clone(),
                computed: *c,
                reference: *r,
                relative: (*r != 0.0).then(|| (c - r).abs() / r.abs()),
            });
        }
    }
    out
}

pub fn comparison_csv(cells: &[CellComparison]) -> String {
    let mut out = String::from("month,detail,computed,reference,relative_deviation\n");
    for c in cells {
        let rel = c.relative.map_or(String::new(), |r| format!("{r:.4}"));
        writeln!(
            out,
            "{},{},{:.2},{:.2},{rel}",
            c.month, c.detail, c.computed, c.reference
        )
        .unwrap();
    }
    out
}

/// One line per team, one cell per month. A month is occupied by a building
/// when the month's midpoint falls inside `[start, start + duration)`, so
/// consecutive buildings of a team never claim the same cell.
pub fn render_gantt(
    catalog: &Catalog,
    schedule: &TeamSchedule,
    months: usize,
) -> Result<String, HomeError> {
    let team_w = schedule
        .teams
        .iter()
        .map(|t| t.id.len())
        .max()
        .unwrap_or(0)
        .max(4);
    let cell_w = schedule
        .assignments()
        .map(|a| a.building.len())
        .max()
        .unwrap_or(0)
        .max(months.to_string().len())
        .max(2)
        + 1;

    let mut out = format!("{:<team_w$}", "team");
    for m in 1..=months {
        write!(out, "{m:>cell_w$}").unwrap();
    }
    out.push('\n');
    for team in &schedule.teams {
        let mut cells = vec!["."; months];
        for a in &team.assignments {
            let end = a.start + catalog.building(&a.building)?.assembly_duration;
            for (i, cell) in cells.iter_mut().enumerate() {
                let mid = i as f64 + 0.5;
                if a.start <= mid && mid < end {
                    *cell = &a.building;
                }
            }
        }
        write!(out, "{:<team_w$}", team.id).unwrap();
        for c in cells {
            write!(out, "{c:>cell_w$}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
