//! Generate the four synthetic benchmarks and inspect their analytic class
//! probabilities.
//!
//! Run with: cargo run --release --example simulate_data

use wsvm::data::gen_example;

fn main() -> wsvm::Result<()> {
    for example in 1..=4u8 {
        let (dataset, oracle) = gen_example(example, 2000, 7)?;
        println!(
            "example {example}: n={}, p={}, K={}, class sizes {:?}",
            dataset.n(),
            dataset.dim(),
            dataset.num_classes(),
            dataset.class_sizes()
        );
        let x = dataset.features().row(0);
        let p = oracle.probs(x);
        let sum: f64 = p.iter().sum();
        println!(
            "  truth at first point ({:6.3}, {:6.3}): {:?} (sum {:.12})",
            x[0],
            x[1],
            p.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            sum
        );
    }
    Ok(())
}
