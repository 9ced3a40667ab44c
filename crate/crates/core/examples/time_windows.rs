//! Earliest-start dispatch into time windows, with earliness/tardiness penalties.
use jitbal::fixtures;
use jitbal::instance::Loaded;
use jitbal::jit::{penalty_max, penalty_sum, schedule_windows, PenaltyWeights, WindowInstance};

fn main() {
    for name in ["windows-single", "windows-three"] {
        let file = fixtures::load(name).unwrap();
        let Loaded::Windows { instance, .. } = file.validate().unwrap() else {
            unreachable!()
        };
        let s = schedule_windows(&instance);
        println!("{name}: feasible {}", s.feasible);
        for j in &s.jobs {
            println!(
                "  m{} {:>3} [{:.1}, {:.1}]",
                j.machine, j.id, j.start, j.completion
            );
        }
    }

    // Stretch a4 past its window and price the lateness.
    let Loaded::Windows { instance, .. } = fixtures::windows_single().validate().unwrap() else {
        unreachable!()
    };
    let mut jobs: Vec<_> = instance.jobs().cloned().collect();
    jobs[3].processing_time = 1.2;
    let s = schedule_windows(&WindowInstance::new(jobs.clone()).unwrap());
    let w = PenaltyWeights::new(1.0, 2.0).unwrap();
    let c = s.completions();
    println!(
        "first late {:?}, penalty sum {:.2}, max {:.2}",
        s.first_late().map(|j| &j.id),
        penalty_sum(&jobs, &c, w).unwrap(),
        penalty_max(&jobs, &c, w).unwrap()
    );
}
