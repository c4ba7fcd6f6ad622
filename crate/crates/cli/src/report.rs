//! Run reports and table rendering.

use std::fmt::Write;
use std::time::Instant;

use secgame_core::{FiniteDistribution, MultiStageGame, Player};
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub struct Output {
    pub json: bool,
    pub timings: bool,
}

#[derive(Serialize)]
pub struct StageDigest {
    pub states: Vec<String>,
    pub actions1: Vec<String>,
    pub actions2: Vec<String>,
}

#[derive(Serialize)]
pub struct GameDigest {
    pub source: String,
    pub horizon: usize,
    pub defender_types: Vec<String>,
    pub user_types: Vec<String>,
    pub prior_about_defender: Vec<f64>,
    pub prior_about_user: Vec<f64>,
    pub initial_state: String,
    pub stages: Vec<StageDigest>,
}

impl GameDigest {
    pub fn of(source: &str, g: &MultiStageGame) -> Self {
        GameDigest {
            source: source.to_string(),
            horizon: g.horizon(),
            defender_types: g.types(Player::Defender).labels().to_vec(),
            user_types: g.types(Player::User).labels().to_vec(),
            prior_about_defender: g.raw_prior_about(Player::Defender).to_vec(),
            prior_about_user: g.raw_prior_about(Player::User).to_vec(),
            initial_state: g.stage(0).states()[g.initial_state()].clone(),
            stages: g
                .stages()
                .iter()
                .map(|s| StageDigest {
                    states: s.states().to_vec(),
                    actions1: s.actions(Player::Defender).to_vec(),
                    actions2: s.actions(Player::User).to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct Timing {
    pub phase: String,
    pub ms: f64,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub game: Option<GameDigest>,
    pub seed: Option<u64>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

/// Phase timer; only reported with `--timings`.
pub struct Clock {
    start: Instant,
    phases: Vec<Timing>,
}

impl Clock {
    pub fn start() -> Self {
        Clock { start: Instant::now(), phases: Vec::new() }
    }

    pub fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.phases.push(Timing {
            phase: phase.to_string(),
            ms: (now - self.start).as_secs_f64() * 1e3,
        });
        self.start = now;
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::failure(format!("serialization: {e}")))
}

impl Output {
    /// Prints the JSON report or the human rendering.
    pub fn emit(
        &self,
        game: Option<GameDigest>,
        seed: Option<u64>,
        result: Value,
        clock: Clock,
        human: String,
    ) -> Result<(), CliError> {
        if self.json {
            let report = RunReport {
                command: std::iter::once("secgame".to_string()).chain(std::env::args().skip(1)).collect(),
                game,
                seed,
                result,
                timings: self.timings.then_some(clock.phases),
            };
            let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::failure(e.to_string()))?;
            write_out(&format!("{text}\n"))
        } else {
            let mut text = human;
            if self.timings {
                for t in &clock.phases {
                    text.push_str(&format!("time {:<12} {:.1} ms\n", t.phase, t.ms));
                }
            }
            write_out(&text)
        }
    }
}

/// Writes to stdout; a closed pipe on the reading side is not an error.
pub fn write_out(text: &str) -> Result<(), CliError> {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::failure(e.to_string())),
        _ => Ok(()),
    }
}

pub fn f4(x: f64) -> String {
    format!("{x:.4}")
}

/// `label p` pairs, four decimals.
pub fn dist(labels: &[String], d: &FiniteDistribution) -> String {
    let mut s = String::new();
    for (l, p) in labels.iter().zip(d.iter()) {
        if !s.is_empty() {
            s.push_str("  ");
        }
        let _ = write!(s, "{l} {}", f4(p));
    }
    s
}

pub fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| f4(x)).collect::<Vec<_>>().join("  ")
}
