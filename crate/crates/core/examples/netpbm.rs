//! Writes an RGB frame, its gray conversion and a binary mask as netpbm
//! files, then reads them back.
//!
//! ```bash
//! cargo run -p linefollow --example netpbm
//! ```

use linefollow::imagecore::{load_image, rgb_to_gray, save_image, PixelBuffer};
use linefollow::segmentation::apply_threshold;

fn main() -> linefollow::Result<()> {
    let dir = std::env::temp_dir().join("linefollow-netpbm");
    std::fs::create_dir_all(&dir)?;

    let rgb = PixelBuffer::from_rgb_fn(64, 48, |x, y| [(x * 4) as u8, (y * 5) as u8, 128])?;
    let gray = rgb_to_gray(&rgb)?;
    let mask = apply_threshold(&gray, 100, 0, 1)?;

    for (name, buf) in [("frame.ppm", &rgb), ("frame.pgm", &gray), ("mask.pgm", &mask)] {
        let path = dir.join(name);
        save_image(buf, &path)?;
        let back = load_image(&path)?;
        println!(
            "{:<40} {:?} {}x{} round trip {}",
            path.display(),
            back.format(),
            back.width(),
            back.height(),
            if &back == buf { "exact" } else { "DIFFERS" }
        );
    }
    Ok(())
}
