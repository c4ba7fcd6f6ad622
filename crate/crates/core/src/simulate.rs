//! Monte Carlo play-outs of a multistage game under a Markov profile.
//!
//! Trajectory `i` draws from ChaCha8 streams derived from `(seed, i)`:
//! one for types and actions and one for payoff noise, so the noise model
//! never changes which actions or states are sampled, and results do not
//! depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::FiniteDistribution;
use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player};
use crate::profile::StrategyProfile;

/// Zero-mean additive noise on recorded stage payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Noise {
    #[default]
    None,
    Gaussian { sigma: f64 },
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

impl Noise {
    fn check(self) -> Result<()> {
        match self {
            Noise::None => Ok(()),
            Noise::Gaussian { sigma: s } | Noise::Uniform { half_width: s } if s.is_finite() && s >= 0.0 => Ok(()),
            _ => Err(GameError::malformed(format!("invalid noise scale in {self}"))),
        }
    }

    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Noise::None => 0.0,
            Noise::Gaussian { sigma } if sigma > 0.0 => Normal::new(0.0, sigma).expect("checked").sample(rng),
            Noise::Uniform { half_width } if half_width > 0.0 => {
                Uniform::new_inclusive(-half_width, half_width).expect("checked").sample(rng)
            }
            _ => 0.0,
        }
    }
}

impl fmt::Display for Noise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Noise::None => write!(f, "none"),
            Noise::Gaussian { sigma } => write!(f, "gaussian:{sigma}"),
            Noise::Uniform { half_width } => write!(f, "uniform:{half_width}"),
        }
    }
}

/// Parses `none`, `gaussian:<sigma>` or `uniform:<half-width>`.
impl FromStr for Noise {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let scale = || {
            arg.parse::<f64>()
                .map_err(|_| GameError::malformed(format!("bad noise scale {arg:?}")))
        };
        let noise = match kind {
            "none" if arg.is_empty() => Noise::None,
            "gaussian" => Noise::Gaussian { sigma: scale()? },
            "uniform" => Noise::Uniform { half_width: scale()? },
            _ => return Err(GameError::malformed(format!("unknown noise model {s:?}"))),
        };
        noise.check()?;
        Ok(noise)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub stage: usize,
    pub state: usize,
    pub a1: usize,
    pub a2: usize,
    pub payoffs: [f64; 2],
    pub noisy_payoffs: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub index: u64,
    pub types: [usize; 2],
    pub steps: Vec<Step>,
    /// State at the final stage.
    pub terminal_state: usize,
}

impl Trajectory {
    pub fn total(&self, player: Player) -> f64 {
        self.steps.iter().map(|s| s.payoffs[player.index()]).sum()
    }

    pub fn noisy_total(&self, player: Player) -> f64 {
        self.steps.iter().map(|s| s.noisy_payoffs[player.index()]).sum()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(d: &FiniteDistribution, rng: &mut ChaCha8Rng) -> usize {
    if let Some(i) = d.is_pure(0.0) {
        return i;
    }
    WeightedIndex::new(d.weights()).expect("valid distribution").sample(rng)
}

/// Trajectory number `index` of the sequence determined by `seed`.
pub fn sample_playout_indexed(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    seed: u64,
    index: u64,
    noise: Noise,
) -> Trajectory {
    let mut play = stream_rng(seed, 2 * index);
    let mut jitter = stream_rng(seed, 2 * index + 1);
    let t1 = draw(&g.prior_about(Player::Defender), &mut play);
    let t2 = draw(&g.prior_about(Player::User), &mut play);
    let mut x = g.initial_state();
    let mut steps = Vec::with_capacity(g.stages().len());
    for (k, stage) in g.stages().iter().enumerate() {
        let a1 = draw(profile.get(Player::Defender, k, x, t1), &mut play);
        let a2 = draw(profile.get(Player::User, k, x, t2), &mut play);
        let payoffs = [
            stage.payoff(Player::Defender, x, a1, a2, t1, t2),
            stage.payoff(Player::User, x, a1, a2, t1, t2),
        ];
        let noisy_payoffs = [payoffs[0] + noise.sample(&mut jitter), payoffs[1] + noise.sample(&mut jitter)];
        steps.push(Step {
            stage: k,
            state: x,
            a1,
            a2,
            payoffs,
            noisy_payoffs,
        });
        if k < g.horizon() {
            x = stage.transition(x, a1, a2).expect("validated game");
        }
    }
    Trajectory {
        index,
        types: [t1, t2],
        steps,
        terminal_state: x,
    }
}

/// The first trajectory of the sequence determined by `seed`.
pub fn sample_playout(g: &MultiStageGame, profile: &StrategyProfile, seed: u64, noise: Noise) -> Result<Trajectory> {
    g.ensure_valid()?;
    profile.check(g)?;
    noise.check()?;
    Ok(sample_playout_indexed(g, profile, seed, 0, noise))
}

/// Sample statistics of one player's cumulative payoff given its own type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub count: u64,
    /// Mean of the recorded (noisy) totals.
    pub mean: f64,
    pub stderr: f64,
    pub noiseless_mean: f64,
    pub noiseless_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub seed: u64,
    pub noise: Noise,
    /// Per own type.
    pub defender: Vec<CellStats>,
    pub user: Vec<CellStats>,
}

impl MonteCarloReport {
    pub fn of(&self, player: Player) -> &[CellStats] {
        match player {
            Player::Defender => &self.defender,
            Player::User => &self.user,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
    clean: f64,
    clean_sq: f64,
}

impl Moments {
    fn push(&mut self, noisy: f64, clean: f64) {
        self.n += 1;
        self.sum += noisy;
        self.sum_sq += noisy * noisy;
        self.clean += clean;
        self.clean_sq += clean * clean;
    }

    fn merge(mut self, o: Moments) -> Moments {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.clean += o.clean;
        self.clean_sq += o.clean_sq;
        self
    }

    fn stats(self) -> CellStats {
        let n = self.n as f64;
        let se = |s: f64, sq: f64| {
            if self.n < 2 {
                return 0.0;
            }
            let mean = s / n;
            let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        };
        let mean = |s: f64| if self.n == 0 { 0.0 } else { s / n };
        CellStats {
            count: self.n,
            mean: mean(self.sum),
            stderr: se(self.sum, self.sum_sq),
            noiseless_mean: mean(self.clean),
            noiseless_stderr: se(self.clean, self.clean_sq),
        }
    }
}

const CHUNK: u64 = 4096;

/// Means and standard errors of cumulative payoffs over `n` trajectories,
/// split by the player's own sampled type.
///
/// Trajectories are processed in fixed chunks whose partial sums are merged
/// in index order, so the result is identical for any thread count.
pub fn monte_carlo_value(
    g: &MultiStageGame,
    profile: &StrategyProfile,
    n: u64,
    seed: u64,
    noise: Noise,
) -> Result<MonteCarloReport> {
    if n < 1 {
        return Err(GameError::malformed("at least one sample is required"));
    }
    g.ensure_valid()?;
    profile.check(g)?;
    noise.check()?;
    let (m1, m2) = (g.num_types(Player::Defender), g.num_types(Player::User));
    let chunks: Vec<(Vec<Moments>, Vec<Moments>)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut d = vec![Moments::default(); m1];
            let mut u = vec![Moments::default(); m2];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let tr = sample_playout_indexed(g, profile, seed, i, noise);
                d[tr.types[0]].push(tr.noisy_total(Player::Defender), tr.total(Player::Defender));
                u[tr.types[1]].push(tr.noisy_total(Player::User), tr.total(Player::User));
            }
            (d, u)
        })
        .collect();
    let mut d = vec![Moments::default(); m1];
    let mut u = vec![Moments::default(); m2];
    for (cd, cu) in chunks {
        for (a, b) in d.iter_mut().zip(cd) {
            *a = a.merge(b);
        }
        for (a, b) in u.iter_mut().zip(cu) {
            *a = a.merge(b);
        }
    }
    Ok(MonteCarloReport {
        samples: n,
        seed,
        noise,
        defender: d.into_iter().map(Moments::stats).collect(),
        user: u.into_iter().map(Moments::stats).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{StageGame, TypeSpace};

    fn chain() -> MultiStageGame {
        let stage = |last: bool| {
            let s = StageGame::new(["s"], ["A"], ["a"], 1, 1).with_payoffs(|_, _, _, _, _| (5.0, 5.0));
            if last {
                s
            } else {
                s.with_transition(|_, _, _| 0)
            }
        };
        MultiStageGame::new(
            TypeSpace::singleton(),
            TypeSpace::singleton(),
            vec![1.0],
            vec![1.0],
            vec![stage(false), stage(false), stage(true)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn forced_chain_sums_exactly() {
        let g = chain();
        let p = StrategyProfile::uniform(&g);
        let r = monte_carlo_value(&g, &p, 100, 3, Noise::None).unwrap();
        assert_eq!(r.defender[0].mean, 15.0);
        assert_eq!(r.defender[0].stderr, 0.0);
        assert_eq!(r.user[0].count, 100);
    }

    #[test]
    fn noise_parsing() {
        assert_eq!("none".parse::<Noise>().unwrap(), Noise::None);
        assert_eq!("gaussian:1.5".parse::<Noise>().unwrap(), Noise::Gaussian { sigma: 1.5 });
        assert_eq!("uniform:2".parse::<Noise>().unwrap(), Noise::Uniform { half_width: 2.0 });
        assert!("gaussian:-1".parse::<Noise>().is_err());
        assert!("laplace:1".parse::<Noise>().is_err());
    }

    #[test]
    fn zero_samples_rejected() {
        let g = chain();
        assert!(monte_carlo_value(&g, &StrategyProfile::uniform(&g), 0, 0, Noise::None).is_err());
    }
}
