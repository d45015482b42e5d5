//! Baseline vs pipeline MARD over 16 seeds of the synthetic generator.
//!
//! `cargo run --release -p glucose --example seed_sweep -- [noise_sd] [drift_amp] [drift_period]`

use glucose::cli::{evaluate_model, train_model};
use glucose_core::synth::{generate_synthetic_dataset, SynthConfig};
use glucose_core::{ForestParams, SplitConfig, TestTransform};

fn arg(i: usize, default: f64) -> f64 {
    std::env::args()
        .nth(i)
        .map_or(default, |s| s.parse().expect("numeric argument"))
}

fn main() -> Result<(), glucose::Error> {
    let d = SynthConfig::default();
    let noise_sd = arg(1, d.noise_sd);
    let drift_amp = arg(2, d.drift_amp);
    let drift_period = arg(3, d.drift_period);
    let seeds = 16u64;
    let (mut wins, mut sum_b, mut sum_p) = (0, 0.0, 0.0);
    for seed in 0..seeds {
        let cfg = SynthConfig {
            seed,
            noise_sd,
            drift_amp,
            drift_period,
            ..SynthConfig::default()
        };
        let data = generate_synthetic_dataset(&cfg)?;
        let split = SplitConfig {
            train_fraction: 0.75,
            seed,
        };
        let model = train_model(
            &data,
            &split,
            5,
            &ForestParams {
                seed,
                ..Default::default()
            },
        )?;
        let report = evaluate_model(&model, &data, TestTransform::History)?;
        let b = report.method("baseline").map_or(f64::NAN, |m| m.mard);
        let p = report.method("pipeline").map_or(f64::NAN, |m| m.mard);
        wins += usize::from(p <= b);
        sum_b += b;
        sum_p += p;
        println!("seed {seed:>2}: baseline {b:.2}%  pipeline {p:.2}%");
    }
    let n = seeds as f64;
    println!(
        "pipeline <= baseline on {wins}/{seeds}; mean {:.3}% vs {:.3}%",
        sum_p / n,
        sum_b / n
    );
    Ok(())
}
