//! Monthly detail requirements of the bundled building programme.
use jitbal::fixtures;
use jitbal::homebuilding::RateBasis;

fn main() {
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let table = h
        .catalog
        .horizon_requirement_table(&h.schedule, h.horizon_months)
        .unwrap();

    println!("month  {}", table.detail_types.join("       "));
    for (i, row) in table.rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:8.1}")).collect();
        println!("{:>7}{}", h.month_label(i + 1), cells.join(""));
    }
    let (m, v) = table.peak(0);
    println!("d1 peaks at {v:.1} in {}", h.month_label(m));

    let shares: Vec<String> = table
        .shares(12)
        .unwrap()
        .iter()
        .map(|s| format!("{s:.1}%"))
        .collect();
    println!("month 12 shares: {}", shares.join(" "));

    // The other progress basis climbs the last floor too.
    let mut all = h.catalog.clone();
    all.rate_basis = RateBasis::AllFloors;
    let t = all
        .horizon_requirement_table(&h.schedule, h.horizon_months)
        .unwrap();
    println!("d1 peak with all floors: {:.1}", t.peak(0).1);
}
