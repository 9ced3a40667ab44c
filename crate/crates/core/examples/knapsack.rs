//! Pick at most one correction per group within a cost budget.
use jitbal::fixtures;
use jitbal::improve::{
    mckp_exact, mckp_greedy, BudgetedMckp, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP,
};

fn main() {
    let groups = fixtures::kope_1982()
        .homebuilding
        .unwrap()
        .correction_groups
        .unwrap();
    for budget in [0.0, 3.0, 5.0, 10.0] {
        let p = BudgetedMckp::new(groups.clone(), budget).unwrap();
        let g = mckp_greedy(&p);
        let e = mckp_exact(&p, DEFAULT_COST_SCALE, DEFAULT_STATE_CAP).unwrap();
        let show = |s: &jitbal::improve::Selection| {
            s.taken()
                .map(|(g, v)| format!("{}", p.variant(g, v).unwrap().correction))
                .collect::<Vec<_>>()
                .join(", ")
        };
        println!(
            "B={budget}: greedy {:.1} [{}] | exact {:.1} [{}]",
            g.profit,
            show(&g),
            e.profit,
            show(&e)
        );
    }
}
