//! Prints the servo phases for each step command and walks a short command
//! sequence with dead reckoning.
//!
//! ```bash
//! cargo run -p linefollow --example gait_trace
//! ```

use linefollow::control::StepCommand;
use linefollow::gait::{apply_step, servo_trace, step_sequence, GaitParams, RobotPose};

fn main() {
    let p = GaitParams::default();
    for cmd in [StepCommand::Forward, StepCommand::Left, StepCommand::Right] {
        println!("{cmd} (ms, then shoulder/elbow deltas for quadrants I..IV)");
        print!("{}", servo_trace(&step_sequence(cmd, &p)));
    }

    println!("\nwalk:");
    let plan = [StepCommand::Forward; 5]
        .into_iter()
        .chain([StepCommand::Left; 6])
        .chain([StepCommand::Forward; 5])
        .chain([StepCommand::Stop])
        .chain([StepCommand::Right; 6]);
    let mut pose = RobotPose::default();
    for (i, cmd) in plan.enumerate() {
        pose = apply_step(pose, cmd, &p);
        println!("{i:>2} {cmd:<7} x={:.4} y={:.4} heading={:>6.1}", pose.x, pose.y, pose.heading.to_degrees());
    }
}
