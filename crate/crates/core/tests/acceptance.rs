//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any hard criterion fails.
//!
//! ```bash
//! cargo test -p linefollow --test acceptance
//! ```

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linefollow::cli;
use linefollow::colortrack::{
    build_class_matrix, membership, track_frame, ColorSignature, RegionReport, TrackerConfig, DEFAULT_Q_LEVELS,
};
use linefollow::control::{decide, DecisionConfig, StepCommand};
use linefollow::gait::{apply_step, step_sequence, GaitParams, RobotPose};
use linefollow::imagecore::PixelBuffer;
use linefollow::segmentation::{otsu_threshold, scenario_eval, Histogram, PixelClass, ThresholdRule, LEVELS};
use linefollow::sim::{
    calibrate_signature, cross_track_error, generate_samples, run_episode, CameraModel, EpisodeSettings, Method,
    Outcome, TrackSpec, DEFAULT_SAMPLE_NOISE, DEFAULT_SCENARIOS, RED, WHITE,
};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Kind, fn() -> Check);

enum Kind {
    Hard,
    Soft,
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("otsu matches brute-force argmax", Kind::Hard, otsu_oracle),
        ("class matrix equals four comparisons", Kind::Hard, class_matrix),
        ("streaming tracker equals two-pass labeling", Kind::Hard, tracker_oracle),
        ("decision law at width 400", Kind::Hard, decision_law),
        ("rgb rule scenario evaluation", Kind::Hard, scenario_rates),
        ("closed-loop completion", Kind::Hard, closed_loop),
        ("straight-track fidelity", Kind::Hard, straight_fidelity),
        ("gait invariants", Kind::Hard, gait_invariants),
        ("tracking throughput (soft)", Kind::Soft, throughput),
        ("simulate determinism", Kind::Hard, determinism),
    ];
    let mut failed = 0;
    for (i, (name, kind, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match (result, kind) {
            (Ok(detail), _) => println!("PASS {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            (Err(detail), Kind::Soft) => println!("SOFT {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            (Err(detail), Kind::Hard) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Brute force over every k with exact rational comparison of
// (N s1 - n1 S)^2 / (n1 n2); the common 1/N^2 factor is dropped.
fn brute_force_otsu(counts: &[u64; LEVELS]) -> u8 {
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    let sum: u128 = counts.iter().enumerate().map(|(i, &c)| i as u128 * c as u128).sum();
    let mut best: Option<(usize, u128, u128)> = None;
    for k in 0..LEVELS {
        let n1: u128 = counts[..=k].iter().map(|&c| c as u128).sum();
        let s1: u128 = counts[..=k].iter().enumerate().map(|(i, &c)| i as u128 * c as u128).sum();
        let n2 = total - n1;
        if n1 == 0 || n2 == 0 {
            continue;
        }
        let d = (total * s1).abs_diff(n1 * sum);
        let (num, den) = (d * d, n1 * n2);
        match best {
            Some((_, bn, bd)) if num * bd <= bn * den => {}
            _ => best = Some((k, num, den)),
        }
    }
    best.map_or(0, |(k, _, _)| k as u8)
}

fn random_histogram(rng: &mut ChaCha8Rng) -> [u64; LEVELS] {
    let mut counts = [0u64; LEVELS];
    match rng.random_range(0..3) {
        // dense
        0 => counts.iter_mut().for_each(|c| *c = rng.random_range(0..1000)),
        // a few spikes, often tied
        1 => {
            for _ in 0..rng.random_range(2..6) {
                counts[rng.random_range(0..LEVELS)] += rng.random_range(1..4) * 50;
            }
        }
        // sparse
        _ => counts.iter_mut().for_each(|c| {
            if rng.random_bool(0.1) {
                *c = rng.random_range(1..200);
            }
        }),
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        counts[0] += 1;
        counts[255] += 1;
    }
    counts
}

fn otsu_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for i in 0..1000 {
        let counts = random_histogram(&mut rng);
        let got = otsu_threshold(&Histogram::from_counts(counts)).map_err(|e| e.to_string())?;
        let want = brute_force_otsu(&counts);
        ensure(got.threshold == want, || format!("histogram {i}: got {} want {want}", got.threshold))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("1000/1000 exact in {secs:.3} s"))
}

fn class_matrix() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let q = DEFAULT_Q_LEVELS;
    for _ in 0..200 {
        let h = (rng.random_range(0..q), rng.random_range(0..q));
        let (s0, s1) = (rng.random_range(0..q), rng.random_range(0..q));
        let sig = ColorSignature::new(rng.random_range(1..=7), h, (s0.min(s1), s0.max(s1)), q)
            .map_err(|e| e.to_string())?;
        let m = build_class_matrix(&sig);
        for hl in 0..q {
            for sl in 0..q {
                let hue_ok = if h.0 <= h.1 { h.0 <= hl && hl <= h.1 } else { hl >= h.0 || hl <= h.1 };
                let direct = hue_ok && sig.lower_sat <= sl && sl <= sig.upper_sat;
                ensure(membership(&m, hl, sl) == direct, || format!("{sig} at ({hl},{sl})"))?;
            }
        }
    }
    let sig = ColorSignature::new(1, (1, 9), (7, 9), 10).map_err(|e| e.to_string())?;
    let m = build_class_matrix(&sig);
    let bits = |v: Vec<bool>| v.into_iter().map(u8::from).collect::<Vec<_>>();
    ensure(bits(m.hclass()) == [0, 1, 1, 1, 1, 1, 1, 1, 1, 1], || format!("hclass {:?}", m.hclass()))?;
    ensure(bits(m.sclass()) == [0, 0, 0, 0, 0, 0, 0, 1, 1, 1], || format!("sclass {:?}", m.sclass()))?;
    ensure(membership(&m, 1, 8) && !membership(&m, 0, 8), || "worked pixel".into())?;
    Ok("200 signatures x 100 cells agree; HClass[1] AND SClass[8] = 1".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Blob {
    count: usize,
    left: usize,
    top: usize,
    width: usize,
    height: usize,
    x_center: usize,
    y_center: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

// Classic two-pass labeling: provisional labels from the left and upper
// neighbours with an equivalence table, then a resolve pass.
fn two_pass_labeling(mask: &[bool], w: usize, h: usize) -> Vec<Blob> {
    let mut labels = vec![0usize; w * h];
    let mut parent = vec![0usize];
    for y in 0..h {
        for x in 0..w {
            if !mask[y * w + x] {
                continue;
            }
            let left = if x > 0 { labels[y * w + x - 1] } else { 0 };
            let up = if y > 0 { labels[(y - 1) * w + x] } else { 0 };
            labels[y * w + x] = match (left, up) {
                (0, 0) => {
                    parent.push(parent.len());
                    parent.len() - 1
                }
                (l, 0) | (0, l) => l,
                (l, u) => {
                    let (a, b) = (find(&mut parent, l), find(&mut parent, u));
                    parent[a.max(b)] = a.min(b);
                    l
                }
            };
        }
    }
    // count, sum x, sum y, min x, min y, max x, max y
    let mut acc: BTreeMap<usize, [usize; 7]> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == 0 {
                continue;
            }
            let root = find(&mut parent, l);
            let e = acc.entry(root).or_insert([0, 0, 0, x, y, x, y]);
            e[0] += 1;
            e[1] += x;
            e[2] += y;
            e[3] = e[3].min(x);
            e[4] = e[4].min(y);
            e[5] = e[5].max(x);
            e[6] = e[6].max(y);
        }
    }
    acc.values()
        .map(|&[n, sx, sy, x0, y0, x1, y1]| Blob {
            count: n,
            left: x0,
            top: y0,
            width: x1 - x0 + 1,
            height: y1 - y0 + 1,
            x_center: sx / n,
            y_center: sy / n,
        })
        .collect()
}

fn blob(r: &RegionReport) -> Blob {
    Blob {
        count: r.pixel_count,
        left: r.left,
        top: r.top,
        width: r.width,
        height: r.height,
        x_center: r.x_center,
        y_center: r.y_center,
    }
}

fn tracker_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sig = ColorSignature::new(1, (0, 0), (5, 9), 10).map_err(|e| e.to_string())?;
    let mut total_regions = 0;
    for i in 0..500 {
        let (w, h) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let density = rng.random_range(0.05..0.7);
        let mask: Vec<bool> = (0..w * h).map(|_| rng.random_bool(density)).collect();
        let image = PixelBuffer::from_rgb_fn(w, h, |x, y| if mask[y * w + x] { [220, 20, 20] } else { WHITE })
            .map_err(|e| e.to_string())?;
        let regions = track_frame(&image, &[sig], TrackerConfig::unfiltered()).map_err(|e| e.to_string())?;
        let mut got: Vec<Blob> = regions.iter().map(blob).collect();
        let mut want = two_pass_labeling(&mask, w, h);
        got.sort();
        want.sort();
        total_regions += want.len();
        ensure(got == want, || format!("mask {i} ({w}x{h}): {} vs {} regions", got.len(), want.len()))?;
    }
    Ok(format!("500 masks, {total_regions} regions identical"))
}

fn decision_law() -> Check {
    let cfg = DecisionConfig::default();
    let cases = [
        (Some(130), StepCommand::Left),
        (Some(131), StepCommand::Forward),
        (Some(170), StepCommand::Forward),
        (Some(171), StepCommand::Right),
        (None, StepCommand::Stop),
    ];
    for (x, want) in cases {
        let got = decide(x, 400, &cfg);
        ensure(got == want, || format!("{x:?} -> {got}, want {want}"))?;
    }
    Ok("130 LEFT, 131 FORWARD, 170 FORWARD, 171 RIGHT, absent STOP".into())
}

fn scenario_rates() -> Check {
    let samples = generate_samples(&DEFAULT_SCENARIOS, 50, DEFAULT_SAMPLE_NOISE, 0);
    let report = scenario_eval(&samples, &ThresholdRule::default()).map_err(|e| e.to_string())?;
    let overall = report.overall_rate();
    ensure(overall >= 95.0, || format!("overall {overall:.2}%"))?;
    for s in 1..=DEFAULT_SCENARIOS.len() {
        let white = report.cell(s, PixelClass::White).ok_or("missing white cell")?;
        ensure(white.rate() == 100.0, || format!("scenario {s} white {:.2}%", white.rate()))?;
    }
    Ok(format!("overall {overall:.2}%, white 100% in every scenario"))
}

fn acceptance_tracks() -> linefollow::Result<Vec<(&'static str, TrackSpec)>> {
    Ok(vec![
        ("straight", TrackSpec::straight(1.0)?),
        ("arc", TrackSpec::arc(0.2, 0.5, 90.0)?),
        ("corner", TrackSpec::corner(0.5, 90.0)?),
    ])
}

fn episode(track: &TrackSpec, method: &Method) -> linefollow::Result<linefollow::sim::EpisodeLog> {
    run_episode(
        track,
        &CameraModel::default(),
        method,
        &DecisionConfig::default(),
        &GaitParams::default(),
        EpisodeSettings::default(),
    )
}

fn closed_loop() -> Check {
    let cam = CameraModel::default();
    let mut summary = Vec::new();
    for (name, black) in acceptance_tracks().map_err(|e| e.to_string())? {
        let red = black.clone().with_colors(RED, WHITE);
        let sig = calibrate_signature(&red, &cam, 1, DEFAULT_Q_LEVELS).map_err(|e| e.to_string())?;
        let runs = [
            ("rgb-rule", &black, Method::RgbRule(ThresholdRule::default())),
            ("hsv-track", &red, Method::HsvTrack { signatures: vec![sig], config: TrackerConfig::default() }),
        ];
        for (method_name, track, method) in runs {
            let start = Instant::now();
            let log = episode(track, &method).map_err(|e| e.to_string())?;
            let secs = start.elapsed().as_secs_f64();
            ensure(log.outcome == Outcome::Completed, || format!("{name}/{method_name}: {}", log.outcome))?;
            ensure(secs < 10.0, || format!("{name}/{method_name}: {secs:.2} s"))?;
            summary.push(format!("{name}/{method_name} {} steps {secs:.1}s", log.steps.len()));
        }
    }
    Ok(summary.join(", "))
}

fn straight_fidelity() -> Check {
    let track = TrackSpec::straight(1.0).map_err(|e| e.to_string())?;
    let log = episode(&track, &Method::RgbRule(ThresholdRule::default())).map_err(|e| e.to_string())?;
    ensure(log.outcome == Outcome::Completed, || format!("outcome {}", log.outcome))?;
    let forward = log.steps.iter().filter(|s| s.command == StepCommand::Forward).count();
    ensure(forward == log.steps.len(), || format!("{forward}/{} FORWARD", log.steps.len()))?;
    let xte = cross_track_error(&track, &log.final_pose);
    ensure(xte < 0.002, || format!("final cross-track error {:.3} mm", xte * 1000.0))?;
    Ok(format!("{forward}/{forward} FORWARD, final cross-track error {:.3} mm", xte * 1000.0))
}

fn gait_invariants() -> Check {
    let p = GaitParams::default();
    let start = RobotPose::new(0.1, -0.2, 0.3);
    let pose = (0..24).fold(start, |pose, _| apply_step(pose, StepCommand::Left, &p));
    let drift = (pose.heading - start.heading).abs();
    ensure(drift < 1e-9, || format!("heading drift {drift:e} rad"))?;

    let moved = apply_step(start, StepCommand::Forward, &p);
    let d = (moved.x - start.x).hypot(moved.y - start.y);
    ensure((d - p.step_length_m).abs() < 1e-12, || format!("forward moved {d}"))?;
    ensure(moved.heading == start.heading, || "forward changed heading".into())?;

    for cmd in [StepCommand::Forward, StepCommand::Left, StepCommand::Right] {
        let ms: u32 = step_sequence(cmd, &p).iter().map(|ph| ph.duration_ms).sum();
        ensure(ms == 400, || format!("{cmd} sequence lasts {ms} ms"))?;
    }
    Ok(format!("24 LEFT drift {drift:.1e} rad, forward {d} m, 400 ms cycles"))
}

fn throughput() -> Check {
    let ms = cli::bench_tracking(50).map_err(|e| e.to_string())?;
    ensure(ms < 20.0, || format!("{ms:.3} ms/frame exceeds 20 ms"))?;
    Ok(format!("{ms:.3} ms per 400x300 frame"))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut track = TrackSpec::arc(0.2, 0.5, 90.0).map_err(|e| e.to_string())?.with_colors(RED, WHITE);
    track.noise_stddev = 8.0;
    let track_path = dir.path().join("arc.txt");
    std::fs::write(&track_path, track.to_text()).map_err(|e| e.to_string())?;
    let mut logs = Vec::new();
    for i in 0..2 {
        let log_path = dir.path().join(format!("run{i}.log"));
        let args = [
            "linefollow",
            "simulate",
            "--track",
            track_path.to_str().unwrap(),
            "--method",
            "hsv-track",
            "--seed",
            "42",
            "--log",
            log_path.to_str().unwrap(),
        ];
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(args, &mut out, &mut err);
        ensure(code == cli::EXIT_OK, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
        logs.push(std::fs::read(&log_path).map_err(|e| e.to_string())?);
    }
    ensure(logs[0] == logs[1], || "logs differ".into())?;
    Ok(format!("two runs, {} identical bytes", logs[0].len()))
}
