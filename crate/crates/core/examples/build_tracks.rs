//! Writes the bundled track files: a straight line, a smooth arc and a sharp
//! corner, each as a black line and as a red line on white.
//!
//! ```bash
//! cargo run -p linefollow --example build_tracks -- crates/core/tracks
//! ```

use std::fs;
use std::path::PathBuf;

use linefollow::sim::{TrackSpec, RED, WHITE};

fn main() -> linefollow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "tracks".into()));
    fs::create_dir_all(&dir)?;
    let tracks = [
        ("straight", TrackSpec::straight(1.0)?),
        ("arc", TrackSpec::arc(0.2, 0.5, 90.0)?),
        ("corner", TrackSpec::corner(0.5, 90.0)?),
    ];
    for (name, black) in tracks {
        let red = black.clone().with_colors(RED, WHITE);
        for (suffix, track) in [("black", black), ("red", red)] {
            let path = dir.join(format!("{name}_{suffix}.txt"));
            fs::write(&path, track.to_text())?;
            println!("{} ({:.3} m, {} waypoints)", path.display(), track.length(), track.waypoints.len());
        }
    }
    Ok(())
}
