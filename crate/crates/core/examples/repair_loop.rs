//! Shift and swap buildings until monthly d1 demand fits the plant.
use jitbal::fixtures;
use jitbal::improve::{improvement_loop, ImproveConfig, RepairContext};
use jitbal::report::render_gantt;

fn main() {
    let h = fixtures::kope_1982().homebuilding.unwrap();
    let capacity = h.capacity_vector().unwrap();
    let config = ImproveConfig {
        budget: 5.0,
        ..ImproveConfig::default()
    };
    let ctx = RepairContext {
        catalog: &h.catalog,
        capacity: &capacity,
        horizon: h.horizon_months,
        config: &config,
    };

    print!(
        "{}",
        render_gantt(&h.catalog, &h.schedule, h.horizon_months).unwrap()
    );
    let res = improvement_loop(&ctx, &h.schedule).unwrap();
    for r in &res.trace {
        let moves: Vec<String> = r.applied.iter().map(|c| c.to_string()).collect();
        println!(
            "#{} measure {:.3} -> {:.3}, d1 peak {:.0}: {}",
            r.iteration,
            r.measure_before,
            r.measure_after,
            r.peaks[0],
            moves.join("; ")
        );
    }
    let peak = ctx.table(&res.schedule).unwrap().peak(0).1;
    println!("{:?}, final d1 peak {peak:.0}", res.outcome);
    print!(
        "{}",
        render_gantt(&h.catalog, &res.schedule, h.horizon_months).unwrap()
    );
}
