//! Evaluates the dark-line RGB rule on synthetic lighting scenarios and
//! prints the per-scenario table.
//!
//! ```bash
//! cargo run -p linefollow --example rgb_rule_table -- "R+G+B<250;G-B<30;R-B>-30"
//! ```

use linefollow::segmentation::{scenario_eval, ThresholdRule};
use linefollow::sim::{generate_samples, DEFAULT_SAMPLE_NOISE, DEFAULT_SCENARIOS};

fn main() -> linefollow::Result<()> {
    let rule: ThresholdRule = match std::env::args().nth(1) {
        Some(text) => text.parse()?,
        None => ThresholdRule::default(),
    };
    println!("rule {rule}\n");

    let samples = generate_samples(&DEFAULT_SCENARIOS, 50, DEFAULT_SAMPLE_NOISE, 0);
    let report = scenario_eval(&samples, &rule)?;
    println!("{report}");

    // darker and brighter lighting than the default sweep
    let wide = generate_samples(&[0.4, 0.6, 1.4, 1.6], 200, DEFAULT_SAMPLE_NOISE, 0);
    let report = scenario_eval(&wide, &rule)?;
    print!("{}", report.records());
    Ok(())
}
