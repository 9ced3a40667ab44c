//! CSV exports: requirement table, balance curve, published-vs-computed.
use jitbal::fixtures;
use jitbal::report::{balance_curve_csv, compare_tables, comparison_csv, export_requirements_csv};

fn main() {
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let table = h
        .catalog
        .horizon_requirement_table(&h.schedule, h.horizon_months)
        .unwrap();
    let cap = h.capacity_vector().unwrap();

    print!("{}", balance_curve_csv(&table, &cap, "d1").unwrap());

    let published = h.reference_table().unwrap();
    let cells = compare_tables(&table, &published);
    let worst = cells
        .iter()
        .filter(|c| c.reference >= 50.0)
        .max_by(|a, b| a.relative.partial_cmp(&b.relative).unwrap())
        .unwrap();
    println!(
        "{} cells compared; worst (reference >= 50): month {} {} {:.0} vs {:.0}",
        cells.len(),
        worst.month,
        worst.detail,
        worst.computed,
        worst.reference
    );

    let dir = std::env::temp_dir();
    export_requirements_csv(&table, dir.join("requirements.csv")).unwrap();
    std::fs::write(dir.join("comparison.csv"), comparison_csv(&cells)).unwrap();
    println!(
        "wrote requirements.csv and comparison.csv to {}",
        dir.display()
    );
}
