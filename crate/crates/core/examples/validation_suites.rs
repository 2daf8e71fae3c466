// The property suites run by `lcdo validate`, and a broken kernel they catch.

use lcdo::energy::frank_density_raw;
use lcdo::validate::{evenness_suite, flipped_saddle_splay, frame_indifference_suite, one_constant_suite, oracle_suite, table};

pub fn run_example() -> lcdo::Result<()> {
    let pristine = [
        oracle_suite(frank_density_raw),
        frame_indifference_suite(frank_density_raw, 1000, 0),
        evenness_suite(frank_density_raw, 1000, 0),
        one_constant_suite(frank_density_raw, 1000, 0),
    ];
    print!("pristine kernel\n{}", table(&pristine));
    assert!(pristine.iter().all(|r| r.passed));

    let mutant = [one_constant_suite(flipped_saddle_splay, 1000, 0), oracle_suite(flipped_saddle_splay)];
    print!("saddle-splay sign flipped\n{}", table(&mutant));
    assert!(!mutant[0].passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lcdo::Result<()> {
    run_example()
}
