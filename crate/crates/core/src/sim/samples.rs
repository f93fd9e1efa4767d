use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::segmentation::{LabeledSample, PixelClass};

pub const BLACK_ANCHOR: f64 = 30.0;
pub const WHITE_ANCHOR: f64 = 230.0;
pub const DEFAULT_SAMPLE_NOISE: f64 = 12.0;
/// Darkest first.
pub const DEFAULT_SCENARIOS: [f64; 3] = [0.8, 1.0, 1.2];

/// Labeled gray-ish samples per lighting scenario.
///
/// For scenario `i` (1-based) with brightness `b`, draws `n_per_class`
/// black samples around `30 b` and as many white ones around `230 b`, each
/// channel perturbed independently by gaussian noise and clamped.
pub fn generate_samples(scenarios: &[f64], n_per_class: usize, noise_stddev: f64, seed: u64) -> Vec<LabeledSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = (noise_stddev > 0.0).then(|| Normal::new(0.0, noise_stddev).expect("finite stddev"));
    let mut out = Vec::with_capacity(scenarios.len() * n_per_class * 2);
    for (i, &brightness) in scenarios.iter().enumerate() {
        for (class, anchor) in [(PixelClass::Black, BLACK_ANCHOR), (PixelClass::White, WHITE_ANCHOR)] {
            for _ in 0..n_per_class {
                let rgb = [(); 3].map(|_| {
                    let noise = normal.as_ref().map_or(0.0, |n| n.sample(&mut rng));
                    (anchor * brightness + noise).round().clamp(0.0, 255.0) as u8
                });
                out.push(LabeledSample { rgb, scenario: i + 1, class });
            }
        }
    }
    out
}
