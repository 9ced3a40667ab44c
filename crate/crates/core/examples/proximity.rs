//! Distance between interval compositions and a reference profile.
use jitbal::balance::{dominance_leq, proximity, violation, CountVector};

fn main() {
    let reference = CountVector::from_counts(&[2, 3, 2, 1, 1, 0]);
    for counts in [[2, 4, 1, 0, 1, 1], [2, 2, 1, 2, 2, 0], [0, 1, 1, 3, 3, 1]] {
        let e = CountVector::from_counts(&counts);
        println!("{counts:?} -> {}", proximity(&reference, &e).unwrap());
    }

    // Totals must agree.
    let short = CountVector::from_counts(&[1, 1, 1, 1, 1, 0]);
    println!("{}", proximity(&reference, &short).unwrap_err());

    let need = CountVector::new(vec![1562.0, 231.0, 2385.0]).unwrap();
    let cap = CountVector::new(vec![1480.0, 400.0, 2600.0]).unwrap();
    println!(
        "within capacity: {}, excess {:?}",
        dominance_leq(&need, &cap).unwrap(),
        violation(&need, &cap).unwrap().as_slice()
    );
}
