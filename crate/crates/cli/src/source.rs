//! Where a game comes from: a built-in scenario or a JSON file.

use std::fs;
use std::path::Path;

use secgame_core::scenarios::{
    build_apt_game, build_exercise_qb, build_privilege_escalation, build_static_baseline,
    build_static_bayesian_with_prior, AptParameters,
};
use secgame_core::schema::load_game;
use secgame_core::{Information, MultiStageGame, StageGame, TypeSpace};
use serde::Deserialize;

use crate::CliError;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static str,
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "exercise-qb",
        summary: "2x2 static game with a type known to P1 or to nobody (--info)",
        params: "none",
    },
    ScenarioInfo {
        name: "static-baseline",
        summary: "complete-information permit/restrict game",
        params: "r1 r2 r3 r4 (default 1)",
    },
    ScenarioInfo {
        name: "static-bayesian",
        summary: "permit/restrict game against a bad or good user",
        params: "r0 r1 r2 (default 1), prior_bad (default 0.5)",
    },
    ScenarioInfo {
        name: "privilege-escalation",
        summary: "permit/restrict game with low/high defender and bad/good user",
        params: "r1 r2 r3 r4 (default 2 4 3 6)",
    },
    ScenarioInfo {
        name: "apt",
        summary: "three-stage APT game: phishing, privilege escalation, sensor access",
        params: "any AptParameters field, e.g. {\"c_k\": 1.5, \"literal_avatar_cost\": true}",
    },
];

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Baseline {
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
}

impl Default for Baseline {
    fn default() -> Self {
        Baseline { r1: 1.0, r2: 1.0, r3: 1.0, r4: 1.0 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Bayesian {
    r0: f64,
    r1: f64,
    r2: f64,
    prior_bad: f64,
}

impl Default for Bayesian {
    fn default() -> Self {
        Bayesian { r0: 1.0, r1: 1.0, r2: 1.0, prior_bad: 0.5 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Escalation {
    r1: f64,
    r2: f64,
    r3: f64,
    r4: f64,
}

impl Default for Escalation {
    fn default() -> Self {
        Escalation { r1: 2.0, r2: 4.0, r3: 3.0, r4: 6.0 }
    }
}

fn params<T: for<'de> Deserialize<'de> + Default>(raw: Option<&str>) -> Result<T, CliError> {
    match raw {
        None => Ok(T::default()),
        Some(text) => serde_json::from_str(text).map_err(|e| CliError::invalid(format!("scenario parameters: {e}"))),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

/// A loaded game plus the information structure a static solve should use
/// unless `--info` overrides it.
pub struct Loaded {
    pub label: String,
    pub game: MultiStageGame,
    pub default_info: Information,
}

pub fn load(
    scenario: Option<&str>,
    game: Option<&Path>,
    params_file: Option<&Path>,
) -> Result<Loaded, CliError> {
    let raw = params_file.map(read).transpose()?;
    let raw = raw.as_deref();
    match (scenario, game) {
        (Some(_), Some(_)) => Err(CliError::invalid("give either --scenario or --game, not both")),
        (None, None) => Err(CliError::invalid("a game is required: --scenario NAME or --game FILE")),
        (None, Some(path)) => {
            if raw.is_some() {
                return Err(CliError::invalid("--params only applies to built-in scenarios"));
            }
            let game = load_game(&read(path)?)?;
            Ok(Loaded {
                label: path.display().to_string(),
                game,
                default_info: Information::Private,
            })
        }
        (Some(name), None) => {
            let (game, info) = match name {
                "exercise-qb" => {
                    if raw.is_some() {
                        return Err(CliError::invalid("exercise-qb takes no parameters"));
                    }
                    (build_exercise_qb(Information::Private).to_multistage(), Information::Private)
                }
                "static-baseline" => {
                    let p: Baseline = params(raw)?;
                    let m = build_static_baseline(p.r1, p.r2, p.r3, p.r4)?;
                    let stage = StageGame::new(["s"], ["Permit", "Restrict"], ["NOP", "Escalate"], 1, 1)
                        .with_payoffs(|_, a1, a2, _, _| {
                            (m.payoff(secgame_core::Player::Defender, a1, a2), m.payoff(secgame_core::Player::User, a1, a2))
                        });
                    let g = MultiStageGame::new(TypeSpace::singleton(), TypeSpace::singleton(), vec![1.0], vec![1.0], vec![stage], 0)?;
                    (g, Information::Private)
                }
                "static-bayesian" => {
                    let p: Bayesian = params(raw)?;
                    let g = build_static_bayesian_with_prior(p.r0, p.r1, p.r2, p.prior_bad)?;
                    (g.to_multistage(), Information::Private)
                }
                "privilege-escalation" => {
                    let p: Escalation = params(raw)?;
                    (build_privilege_escalation(p.r1, p.r2, p.r3, p.r4)?.to_multistage(), Information::Private)
                }
                "apt" => {
                    let p: AptParameters = params(raw)?;
                    (build_apt_game(&p)?, Information::Private)
                }
                other => {
                    let names: Vec<&str> = SCENARIOS.iter().map(|s| s.name).collect();
                    return Err(CliError::invalid(format!("unknown scenario {other:?}; known: {}", names.join(", "))));
                }
            };
            game.ensure_valid()?;
            Ok(Loaded {
                label: name.to_string(),
                game,
                default_info: info,
            })
        }
    }
}
