//! Learns a color signature from a patch of a rendered red line, prints its
//! class matrices, and tracks regions in a frame with two colored blobs.
//!
//! ```bash
//! cargo run -p linefollow --example hsv_tracking
//! ```

use linefollow::colortrack::{
    build_class_matrix, learn_signature, track_frame, Rect, TrackerConfig, DEFAULT_Q_LEVELS,
};
use linefollow::imagecore::PixelBuffer;
use linefollow::sim::{render_view, CameraModel, TrackSpec, RED, WHITE};

fn bits(v: Vec<bool>) -> String {
    v.into_iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn main() -> linefollow::Result<()> {
    let mut track = TrackSpec::arc(0.2, 0.5, 90.0)?.with_colors(RED, WHITE);
    track.noise_stddev = 6.0;
    let cam = CameraModel::default();
    let frame = render_view(&track, &track.start_pose(), &cam, 0);

    let sig = learn_signature(&frame, Rect { x: 136, y: 130, width: 30, height: 30 }, 1, DEFAULT_Q_LEVELS)?;
    let m = build_class_matrix(&sig);
    println!("signature {sig}");
    println!("HClass {}", bits(m.hclass()));
    println!("SClass {}", bits(m.sclass()));

    println!("\nline regions (sig xc yc w h count):");
    for r in track_frame(&frame, &[sig], TrackerConfig::default())? {
        println!("  {r}");
    }

    // a big blob, a small one, and speckle the noise filter removes
    let blobs = PixelBuffer::from_rgb_fn(120, 80, |x, y| {
        let big = (10..50).contains(&x) && (10..40).contains(&y);
        let small = (80..90).contains(&x) && (50..60).contains(&y);
        let speckle = (x * 7 + y * 13) % 97 == 0;
        if big || small || speckle {
            [210, 25, 20]
        } else {
            WHITE
        }
    })?;
    println!("\nblob frame:");
    for r in track_frame(&blobs, &[sig], TrackerConfig::default())? {
        println!("  {r}  box at ({}, {})", r.left, r.top);
    }
    Ok(())
}
