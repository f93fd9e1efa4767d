//! Prints the LEFT / FORWARD / RIGHT bands for a few image widths and the
//! command chosen for some line positions.
//!
//! ```bash
//! cargo run -p linefollow --example decision_law
//! ```

use linefollow::control::{decide, DecisionConfig};

fn main() {
    let cfg = DecisionConfig::default();
    for width in [160, 320, 400, 640] {
        let (l, r) = cfg.limits(width);
        println!("width {width:>3}: LEFT 0..={l}  FORWARD {}..={r}  RIGHT {}..{width}", l + 1, r + 1);
    }
    println!();
    for x in [None, Some(0), Some(130), Some(131), Some(150), Some(170), Some(171), Some(399)] {
        let label = x.map_or("absent".to_string(), |x| x.to_string());
        println!("x = {label:>6} at width 400 -> {}", decide(x, 400, &cfg));
    }
}
