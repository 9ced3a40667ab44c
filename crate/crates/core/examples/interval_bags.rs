//! Slot schedule of composite jobs -> per-interval bags -> balance verdict.
use jitbal::balance::{balance_verdict, count_vector};
use jitbal::fixtures;
use jitbal::instance::Loaded;
use jitbal::model::{interval_bags, makespan};

fn main() {
    let file = fixtures::modular_3x4();
    let Loaded::Modular {
        instance,
        reference,
        threshold,
    } = file.validate().unwrap()
    else {
        unreachable!()
    };

    println!("makespan {}", makespan(&instance));
    for bag in interval_bags(&instance).unwrap() {
        let e = count_vector(&bag, instance.universe.len()).unwrap();
        println!(
            "interval {}: {:?} {:?}",
            bag.interval,
            bag.names(&instance.universe),
            e.to_counts()
        );
    }

    for t in [threshold, 4.0] {
        let v = balance_verdict(&instance, &reference, t).unwrap();
        println!(
            "threshold {t}: satisfied {} violating {:?} deltas {:?}",
            v.satisfied, v.violating, v.deltas
        );
    }
}
