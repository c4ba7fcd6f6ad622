use std::fmt::Write;
use std::fs;
use std::path::Path;

use secgame_core::multistage::{
    cumulative_utility, forward_pass, solve_pbne as run_pbne, verify_epsilon, BeliefSystem, EpsilonReport,
    PbneOutcome, SolverOptions,
};
use secgame_core::schema::game_to_json;
use secgame_core::signaling::{solve_mixed_pbne, solve_pure_pbne, verify_pbne, SignalingGame, SignalingPbne, PBNE_GAP_TOL};
use secgame_core::simulate::{monte_carlo_value, sample_playout, Noise};
use secgame_core::{
    mixed_ne, pure_ne, solve_bne as run_bne, BimatrixGame, EquilibriumResult, Information, MultiStageGame, Player,
    StaticBayesianGame, StrategyProfile,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{dist, f4, list, to_value, Clock, GameDigest, Output};
use crate::source::{self, Loaded, SCENARIOS};
use crate::{CliError, GameArgs, InfoArg, SimulateArgs, SolverArgs, VerifyArgs};

fn load(args: &GameArgs) -> Result<Loaded, CliError> {
    source::load(args.scenario.as_deref(), args.game.as_deref(), args.params.as_deref())
}

fn options(s: &SolverArgs) -> Result<SolverOptions, CliError> {
    if !(s.tol.is_finite() && s.tol > 0.0) {
        return Err(CliError::invalid("--tol must be positive"));
    }
    if s.max_iter == 0 || s.restarts == 0 {
        return Err(CliError::invalid("--max-iter and --restarts must be at least 1"));
    }
    Ok(SolverOptions { tol: s.tol, max_iter: s.max_iter, restarts: s.restarts, seed: s.seed })
}

fn labels(g: &MultiStageGame, p: Player) -> &[String] {
    g.types(p).labels()
}

#[derive(Serialize)]
struct PurePoint {
    defender: String,
    user: String,
    values: [f64; 2],
}

#[derive(Serialize)]
struct TypePairNe {
    defender_type: String,
    user_type: String,
    pure: Vec<PurePoint>,
    mixed: Vec<EquilibriumResult>,
}

pub fn solve_ne(out: &Output, args: &GameArgs) -> Result<(), CliError> {
    let mut clock = Clock::start();
    let loaded = load(args)?;
    let g = &loaded.game;
    if g.horizon() != 0 {
        return Err(CliError::invalid("`solve ne` needs a single-stage game"));
    }
    let stage = g.stage(0);
    let a1 = stage.actions(Player::Defender);
    let a2 = stage.actions(Player::User);
    let mut results = Vec::new();
    let mut human = String::new();
    for t1 in 0..g.num_types(Player::Defender) {
        for t2 in 0..g.num_types(Player::User) {
            let m = BimatrixGame::from_stage(stage, g.initial_state(), t1, t2);
            let pure = pure_ne(&m)
                .into_iter()
                .map(|(i, j)| PurePoint {
                    defender: a1[i].clone(),
                    user: a2[j].clone(),
                    values: [m.payoff(Player::Defender, i, j), m.payoff(Player::User, i, j)],
                })
                .collect::<Vec<_>>();
            let mut mixed = mixed_ne(&m)?;
            for eq in &mut mixed {
                eq.gap = m.gap(&eq.defender[0], &eq.user[0]);
            }
            let (l1, l2) = (&labels(g, Player::Defender)[t1], &labels(g, Player::User)[t2]);
            let _ = writeln!(human, "types ({l1}, {l2})");
            for p in &pure {
                let _ = writeln!(human, "  pure  ({}, {})  values {}", p.defender, p.user, list(&p.values));
            }
            for eq in &mixed {
                let _ = writeln!(
                    human,
                    "  mixed defender [{}]  user [{}]  values {}  gap {}",
                    dist(a1, &eq.defender[0]),
                    dist(a2, &eq.user[0]),
                    list(&eq.ex_ante),
                    f4(eq.gap)
                );
            }
            results.push(TypePairNe { defender_type: l1.clone(), user_type: l2.clone(), pure, mixed });
        }
    }
    clock.lap("solve");
    out.emit(Some(GameDigest::of(&loaded.label, g)), None, json!({ "type_pairs": to_value(&results)? }), clock, human)
}

fn bayesian_table(g: &StaticBayesianGame, eq: &EquilibriumResult) -> String {
    let stage = g.stage();
    let mut s = String::new();
    for (t, d) in eq.defender.iter().enumerate() {
        let _ = writeln!(
            s,
            "  defender {:<10} {}  value {}",
            g.types(Player::Defender).labels()[t],
            dist(stage.actions(Player::Defender), d),
            f4(eq.defender_values[t])
        );
    }
    for (t, d) in eq.user.iter().enumerate() {
        let _ = writeln!(
            s,
            "  user     {:<10} {}  value {}",
            g.types(Player::User).labels()[t],
            dist(stage.actions(Player::User), d),
            f4(eq.user_values[t])
        );
    }
    let _ = writeln!(s, "  ex-ante values {}  gap {}", list(&eq.ex_ante), f4(eq.gap));
    s
}

pub fn solve_bne(out: &Output, args: &GameArgs, info: Option<InfoArg>) -> Result<(), CliError> {
    let mut clock = Clock::start();
    let loaded = load(args)?;
    let information = match info {
        Some(InfoArg::Private) => Information::Private,
        Some(InfoArg::Uninformed) => Information::Uninformed,
        None => loaded.default_info,
    };
    let g = StaticBayesianGame::from_multistage(&loaded.game, information)?;
    let found = run_bne(&g)?;
    clock.lap("solve");
    let mut checked = Vec::with_capacity(found.len());
    for eq in found {
        checked.push(g.evaluate(eq.defender, eq.user)?);
    }
    clock.lap("verify");
    let mut human = format!("{} Bayesian Nash equilibria ({information:?} information)\n", checked.len());
    for (i, eq) in checked.iter().enumerate() {
        let _ = writeln!(human, "equilibrium {i}");
        human.push_str(&bayesian_table(&g, eq));
    }
    let result = json!({ "information": to_value(&information)?, "equilibria": to_value(&checked)? });
    out.emit(Some(GameDigest::of(&loaded.label, &loaded.game)), None, result, clock, human)
}

#[derive(Serialize)]
struct CheckedSignaling {
    #[serde(flatten)]
    eq: SignalingPbne,
    receiver_gap: f64,
    sender_gap: f64,
    consistency_error: f64,
    verified: bool,
}

fn check_signaling(g: &SignalingGame, found: Vec<SignalingPbne>) -> Result<Vec<CheckedSignaling>, CliError> {
    found
        .into_iter()
        .map(|mut eq| {
            let c = verify_pbne(g, &eq.sender, &eq.receiver, &eq.beliefs)?;
            eq.gap = c.gap();
            Ok(CheckedSignaling {
                eq,
                receiver_gap: c.receiver_gap,
                sender_gap: c.sender_gap,
                consistency_error: c.consistency_error,
                verified: c.passes(PBNE_GAP_TOL),
            })
        })
        .collect()
}

fn signaling_table(g: &SignalingGame, list_: &[CheckedSignaling]) -> String {
    let mut s = String::new();
    for (i, c) in list_.iter().enumerate() {
        let _ = writeln!(s, "  equilibrium {i} ({})  gap {}", c.eq.class, f4(c.eq.gap));
        for (t, d) in c.eq.sender.iter().enumerate() {
            let _ = writeln!(s, "    sender {:<10} {}", g.types().labels()[t], dist(g.messages(), d));
        }
        for (m, r) in c.eq.receiver.iter().enumerate() {
            let path = if c.eq.on_path[m] { "on" } else { "off" };
            let _ = writeln!(
                s,
                "    after {:<10} {}  belief [{}] ({path} path)",
                g.messages()[m],
                dist(g.actions(), r),
                dist(g.types().labels(), &c.eq.beliefs[m])
            );
        }
    }
    s
}

pub fn solve_signaling(out: &Output, args: &GameArgs, grid: usize) -> Result<(), CliError> {
    if grid < 2 {
        return Err(CliError::invalid("--offpath-grid must be at least 2"));
    }
    let mut clock = Clock::start();
    let loaded = load(args)?;
    let sg = StaticBayesianGame::from_multistage(&loaded.game, Information::Private)?;
    let g = SignalingGame::from_static(&sg)?;
    let pure = solve_pure_pbne(&g, grid)?;
    let mixed = solve_mixed_pbne(&g)?;
    clock.lap("solve");
    let pure = check_signaling(&g, pure)?;
    let mixed = check_signaling(&g, mixed)?;
    clock.lap("verify");
    let human = format!(
        "pure PBNE: {}\n{}mixed PBNE: {}\n{}",
        pure.len(),
        signaling_table(&g, &pure),
        mixed.len(),
        signaling_table(&g, &mixed)
    );
    let result = json!({ "offpath_grid": grid, "pure": to_value(&pure)?, "mixed": to_value(&mixed)? });
    out.emit(Some(GameDigest::of(&loaded.label, &loaded.game)), None, result, clock, human)
}

fn profile_table(g: &MultiStageGame, profile: &StrategyProfile) -> String {
    let mut s = String::new();
    for (k, stage) in g.stages().iter().enumerate() {
        for (x, state) in stage.states().iter().enumerate() {
            let _ = writeln!(s, "stage {k} state {state}");
            for p in [Player::Defender, Player::User] {
                let name = if p == Player::Defender { "defender" } else { "user    " };
                for (t, l) in labels(g, p).iter().enumerate() {
                    let _ = writeln!(s, "  {name} {l:<10} {}", dist(stage.actions(p), profile.get(p, k, x, t)));
                }
            }
        }
    }
    s
}

fn epsilon_table(g: &MultiStageGame, e: &EpsilonReport) -> String {
    let mut s = String::new();
    for p in [Player::Defender, Player::User] {
        let (root, seq, got, best) = match p {
            Player::Defender => (&e.defender, &e.defender_sequential, &e.defender_achieved, &e.defender_best),
            Player::User => (&e.user, &e.user_sequential, &e.user_achieved, &e.user_best),
        };
        for (t, l) in labels(g, p).iter().enumerate() {
            let _ = writeln!(
                s,
                "  {:<8} {l:<10} utility {}  best {}  eps {}  sequential eps {}",
                if p == Player::Defender { "defender" } else { "user" },
                f4(got[t]),
                f4(best[t]),
                f4(root[t]),
                f4(seq[t])
            );
        }
    }
    let c = &e.consistency;
    let _ = writeln!(
        s,
        "  max eps {}  beliefs {} (max error {:.2e}, {} violations)",
        f4(e.max),
        if c.consistent { "consistent" } else { "INCONSISTENT" },
        c.max_error,
        c.violations
    );
    s
}

fn trace_table(o: &PbneOutcome) -> String {
    let c = o.convergence();
    let mut s = String::from("iteration  strategy-residual  belief-residual  worst-stage-gap\n");
    for r in &c.trace {
        let sr = r.strategy_residual.map_or("-".to_string(), |v| format!("{v:.3e}"));
        let _ = writeln!(s, "{:>9}  {:>17}  {:>15.3e}  {:>15.3e}", r.iteration, sr, r.belief_residual, r.worst_stage_gap);
    }
    s
}

pub fn solve_pbne(out: &Output, args: &GameArgs, solver: &SolverArgs) -> Result<(), CliError> {
    let opts = options(solver)?;
    let mut clock = Clock::start();
    let loaded = load(args)?;
    let g = &loaded.game;
    let mut outcome = run_pbne(g, &opts)?;
    clock.lap("solve");
    let digest = Some(GameDigest::of(&loaded.label, g));
    let mut human = trace_table(&outcome);
    match &mut outcome {
        PbneOutcome::Converged(sol) => {
            sol.epsilon = verify_epsilon(g, &sol.profile, &sol.beliefs)?;
            clock.lap("verify");
            let _ = writeln!(human, "converged after {} iterations", sol.convergence.iterations);
            human.push_str(&profile_table(g, &sol.profile));
            let _ = writeln!(human, "certificate");
            human.push_str(&epsilon_table(g, &sol.epsilon));
            let _ = writeln!(human, "belief disagreement across histories {}", f4(sol.beliefs.disagreement));
            out.emit(digest, Some(opts.seed), to_value(&outcome)?, clock, human)
        }
        PbneOutcome::NotConverged(n) => {
            let _ = writeln!(human, "no convergence within {} iterations", n.convergence.iterations);
            out.emit(digest, Some(opts.seed), to_value(&outcome)?, clock, human)?;
            Err(CliError { code: 3, message: String::new() })
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// The object itself, or the `key` field of a report's `result`.
fn extract<T: serde::de::DeserializeOwned>(v: Value, key: &str) -> Result<Option<T>, CliError> {
    let inner = match v.get("result").and_then(|r| r.get(key)) {
        Some(x) => x.clone(),
        None => match v.get(key) {
            Some(x) if v.get("defender").is_none() => x.clone(),
            _ if v.get("result").is_some() => return Ok(None),
            _ => v,
        },
    };
    serde_json::from_value(inner).map(Some).map_err(|e| CliError::invalid(format!("{key}: {e}")))
}

fn load_profile(g: &MultiStageGame, path: &Path) -> Result<(StrategyProfile, Option<BeliefSystem>), CliError> {
    let v = read_json(path)?;
    let profile: StrategyProfile =
        extract(v.clone(), "profile")?.ok_or_else(|| CliError::invalid("report carries no profile"))?;
    profile.check(g)?;
    let beliefs = if v.get("result").is_some() { extract(v, "beliefs")? } else { None };
    Ok((profile, beliefs))
}

pub fn verify(out: &Output, args: &VerifyArgs) -> Result<(), CliError> {
    let mut clock = Clock::start();
    let loaded = load(&args.game)?;
    let g = &loaded.game;
    let (profile, stored) = load_profile(g, &args.profile)?;
    let (beliefs, source) = match &args.beliefs {
        Some(path) => {
            let b: BeliefSystem = extract(read_json(path)?, "beliefs")?
                .ok_or_else(|| CliError::invalid("report carries no beliefs"))?;
            (b, "file")
        }
        None => match stored {
            Some(b) => (b, "report"),
            None => (forward_pass(g, &profile)?, "bayes"),
        },
    };
    let eps = verify_epsilon(g, &profile, &beliefs)?;
    clock.lap("verify");
    let human = format!("beliefs from {source}\n{}", epsilon_table(g, &eps));
    let result = json!({ "beliefs_source": source, "epsilon": to_value(&eps)? });
    out.emit(Some(GameDigest::of(&loaded.label, g)), None, result, clock, human)
}

#[derive(Serialize)]
struct Comparison {
    player: &'static str,
    own_type: String,
    count: u64,
    monte_carlo: f64,
    stderr: f64,
    exact: f64,
    /// Absent with fewer than two samples in the cell.
    within_three_stderr: Option<bool>,
}

pub fn simulate(out: &Output, args: &SimulateArgs) -> Result<(), CliError> {
    if args.samples < 1 {
        return Err(CliError::invalid("-n must be at least 1"));
    }
    let noise: Noise = args.noise.parse()?;
    let mut clock = Clock::start();
    let loaded = load(&args.game)?;
    let g = &loaded.game;
    let profile = match &args.profile {
        Some(path) => load_profile(g, path)?.0,
        None => match run_pbne(g, &options(&args.solver)?)? {
            PbneOutcome::Converged(s) => s.profile,
            PbneOutcome::NotConverged(_) => {
                return Err(CliError { code: 3, message: "no converged profile to simulate".into() })
            }
        },
    };
    clock.lap("profile");
    let seed = args.solver.seed;
    let mut human = String::new();
    let mut result = serde_json::Map::new();
    result.insert("noise".into(), to_value(&noise)?);
    if args.samples == 1 {
        let tr = sample_playout(g, &profile, seed, noise)?;
        let _ = writeln!(
            human,
            "types ({}, {})",
            labels(g, Player::Defender)[tr.types[0]],
            labels(g, Player::User)[tr.types[1]]
        );
        let _ = writeln!(human, "stage  state        defender     user         payoffs          noisy payoffs");
        for s in &tr.steps {
            let st = g.stage(s.stage);
            let _ = writeln!(
                human,
                "{:>5}  {:<12} {:<12} {:<12} {:<16} {}",
                s.stage,
                st.states()[s.state],
                st.actions(Player::Defender)[s.a1],
                st.actions(Player::User)[s.a2],
                list(&s.payoffs),
                list(&s.noisy_payoffs)
            );
        }
        result.insert("trajectory".into(), to_value(&tr)?);
    }
    let mc = monte_carlo_value(g, &profile, args.samples, seed, noise)?;
    clock.lap("simulate");
    let beliefs = forward_pass(g, &profile)?;
    let mut rows = Vec::new();
    for p in [Player::Defender, Player::User] {
        for (t, cell) in mc.of(p).iter().enumerate() {
            let (t1, t2) = if p == Player::Defender { (t, 0) } else { (0, t) };
            let (u1, u2) = cumulative_utility(g, &profile, &beliefs, t1, t2, 0)?;
            let exact = if p == Player::Defender { u1 } else { u2 };
            rows.push(Comparison {
                player: if p == Player::Defender { "defender" } else { "user" },
                own_type: labels(g, p)[t].clone(),
                count: cell.count,
                monte_carlo: cell.mean,
                stderr: cell.stderr,
                exact,
                within_three_stderr: (cell.count >= 2).then(|| (cell.mean - exact).abs() <= 3.0 * cell.stderr + 1e-9),
            });
        }
    }
    clock.lap("exact");
    let _ = writeln!(human, "{} samples, seed {seed}, noise {noise}", args.samples);
    let _ = writeln!(human, "player    type         count    mean       stderr     exact      within 3 se");
    for r in &rows {
        let _ = writeln!(
            human,
            "{:<9} {:<12} {:>6}  {:>9}  {:>9}  {:>9}  {}",
            r.player,
            r.own_type,
            r.count,
            f4(r.monte_carlo),
            f4(r.stderr),
            f4(r.exact),
            match r.within_three_stderr {
                Some(true) => "yes",
                Some(false) => "no",
                None => "-",
            }
        );
    }
    result.insert("monte_carlo".into(), to_value(&mc)?);
    result.insert("comparison".into(), to_value(&rows)?);
    out.emit(Some(GameDigest::of(&loaded.label, g)), Some(seed), Value::Object(result), clock, human)
}

pub fn scenario_list(out: &Output) -> Result<(), CliError> {
    let mut human = String::new();
    for s in SCENARIOS {
        let _ = writeln!(human, "{:<22} {}\n{:<22} params: {}", s.name, s.summary, "", s.params);
    }
    let result = json!(SCENARIOS
        .iter()
        .map(|s| json!({ "name": s.name, "summary": s.summary, "params": s.params }))
        .collect::<Vec<_>>());
    out.emit(None, None, result, Clock::start(), human)
}

pub fn scenario_show(name: &str, params: Option<&Path>) -> Result<(), CliError> {
    let loaded = source::load(Some(name), None, params)?;
    crate::report::write_out(&format!("{}\n", game_to_json(&loaded.game)))?;
    Ok(())
}
