//! Servo phase sequences for each step and the dead-reckoned pose update.
//!
//! Servo slots are indexed `2 * quadrant + joint`, with quadrants I..IV as
//! 0..3 and joint 0 the shoulder, 1 the elbow. The camera looks along +x,
//! so quadrants I and II are the left legs and III, IV the right legs.

use std::f64::consts::PI;
use std::fmt;

use crate::control::StepCommand;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitParams {
    pub shoulder_contract_ms: u32,
    pub extend_lift_ms: u32,
    pub place_ms: u32,
    /// Shoulder sweep for a forward step, degrees.
    pub translate_deg: f64,
    /// Shoulder sweep for a turning step, degrees; also the heading change.
    pub rotate_deg: f64,
    pub step_length_m: f64,
    /// Control-loop cadence: one sense/decide/step cycle.
    pub step_period_ms: u32,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            shoulder_contract_ms: 200,
            extend_lift_ms: 100,
            place_ms: 100,
            translate_deg: 10.0,
            rotate_deg: 15.0,
            step_length_m: 0.006,
            step_period_ms: 200,
        }
    }
}

pub const SERVOS: usize = 8;

pub fn servo_index(quadrant: usize, elbow: bool) -> usize {
    2 * quadrant + usize::from(elbow)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoPhase {
    pub duration_ms: u32,
    /// Signed angle deltas; zero holds position.
    pub targets: [f64; SERVOS],
}

impl fmt::Display for ServoPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.duration_ms)?;
        for d in &self.targets {
            write!(f, " {d}")?;
        }
        Ok(())
    }
}

/// The three-phase leg cycle for `cmd`: shoulder contract, extend while
/// the elbow lifts, then place while the shoulder finishes extending.
///
/// Shoulders of I, II move against III, IV for a forward step and all in
/// the same sense for a turn; elbows of the diagonal pair I, III lift
/// together while II, IV stay planted. `Stop` yields no phases.
pub fn step_sequence(cmd: StepCommand, p: &GaitParams) -> Vec<ServoPhase> {
    let (amp, shoulder_sign): (f64, [f64; 4]) = match cmd {
        StepCommand::Stop => return Vec::new(),
        StepCommand::Forward => (p.translate_deg, [1.0, 1.0, -1.0, -1.0]),
        StepCommand::Left => (p.rotate_deg, [1.0; 4]),
        StepCommand::Right => (p.rotate_deg, [-1.0; 4]),
    };
    let lifted = [true, false, true, false];

    let phase = |duration_ms, shoulder: f64, elbow: f64| {
        let mut targets = [0.0; SERVOS];
        for q in 0..4 {
            targets[servo_index(q, false)] = shoulder_sign[q] * shoulder;
            if lifted[q] {
                targets[servo_index(q, true)] = elbow;
            }
        }
        ServoPhase { duration_ms, targets }
    };
    vec![
        phase(p.shoulder_contract_ms, amp, 0.0),
        phase(p.extend_lift_ms, -amp / 2.0, amp),
        phase(p.place_ms, -amp / 2.0, -amp),
    ]
}

/// Servo trace lines, one `duration_ms d1..d8` per phase.
pub fn servo_trace(phases: &[ServoPhase]) -> String {
    phases.iter().map(|p| format!("{p}\n")).collect()
}

/// Position in meters and heading in radians (counterclockwise, in `(-pi, pi]`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RobotPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl RobotPose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: normalize_angle(heading) }
    }
}

pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Turns (for `Left`/`Right`) then advances one step along the new heading.
pub fn apply_step(pose: RobotPose, cmd: StepCommand, p: &GaitParams) -> RobotPose {
    let turn = p.rotate_deg.to_radians();
    let heading = match cmd {
        StepCommand::Stop => return pose,
        StepCommand::Forward => pose.heading,
        StepCommand::Left => normalize_angle(pose.heading + turn),
        StepCommand::Right => normalize_angle(pose.heading - turn),
    };
    RobotPose {
        x: pose.x + p.step_length_m * heading.cos(),
        y: pose.y + p.step_length_m * heading.sin(),
        heading,
    }
}
