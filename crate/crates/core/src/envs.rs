//! Benchmark environments and the encoders turning their states into
//! rotation angles.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Discrete(usize),
    Continuous(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    Discrete { count: usize },
    Continuous { dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub observation: Observation,
    pub reward: f64,
    /// Terminal state or horizon reached.
    pub done: bool,
}

pub trait Environment: Send {
    fn state_space(&self) -> StateSpace;
    fn num_actions(&self) -> usize;
    /// Maximum episode length.
    fn horizon(&self) -> usize;
    fn reset(&mut self, rng: &mut dyn RngCore) -> Observation;
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step>;
}

fn check_action(action: usize, num_actions: usize) -> Result<()> {
    if action >= num_actions {
        return Err(Error::InvalidAction { action, num_actions });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Contextual bandits

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewardScheme {
    /// +1 optimal, -1 otherwise.
    PlusMinusOne,
    /// 1 optimal, 0 otherwise; expected reward is then the accuracy.
    Accuracy01,
}

impl RewardScheme {
    fn value(self, optimal: bool) -> f64 {
        match (self, optimal) {
            (_, true) => 1.0,
            (RewardScheme::PlusMinusOne, false) => -1.0,
            (RewardScheme::Accuracy01, false) => 0.0,
        }
    }
}

impl fmt::Display for RewardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RewardScheme::PlusMinusOne => "plus-minus-one",
            RewardScheme::Accuracy01 => "accuracy01",
        })
    }
}

impl FromStr for RewardScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus-minus-one" | "plusminusone" | "pm1" => Ok(RewardScheme::PlusMinusOne),
            "accuracy01" | "accuracy" | "01" => Ok(RewardScheme::Accuracy01),
            other => Err(Error::Parse(format!("unknown reward scheme `{other}`"))),
        }
    }
}

/// Every step draws a state uniformly; one action per state is optimal.
#[derive(Clone, Debug)]
pub struct ContextualBandit {
    optimal: Vec<usize>,
    num_actions: usize,
    scheme: RewardScheme,
    state: Option<usize>,
}

impl ContextualBandit {
    pub fn new(optimal_map: Vec<usize>, num_actions: usize, scheme: RewardScheme) -> Result<Self> {
        if optimal_map.is_empty() {
            return Err(Error::InvalidEnvironment("bandit needs at least one state".into()));
        }
        if num_actions == 0 {
            return Err(Error::InvalidEnvironment("bandit needs at least one action".into()));
        }
        if let Some(&a) = optimal_map.iter().find(|&&a| a >= num_actions) {
            return Err(Error::InvalidEnvironment(format!(
                "optimal action {a} out of range for {num_actions} actions"
            )));
        }
        Ok(Self {
            optimal: optimal_map,
            num_actions,
            scheme,
            state: None,
        })
    }

    /// State `s` has optimal action `s / (S/M)`: contiguous equal blocks.
    pub fn blocks(num_states: usize, num_actions: usize, scheme: RewardScheme) -> Result<Self> {
        if num_actions == 0 || !num_states.is_multiple_of(num_actions) {
            return Err(Error::InvalidEnvironment(format!(
                "{num_states} states do not split evenly over {num_actions} actions"
            )));
        }
        let per = num_states / num_actions;
        Self::new((0..num_states).map(|s| s / per).collect(), num_actions, scheme)
    }

    /// A random assignment with equal-size preimages.
    pub fn random_uniform<R: Rng + ?Sized>(
        num_states: usize,
        num_actions: usize,
        scheme: RewardScheme,
        rng: &mut R,
    ) -> Result<Self> {
        let mut env = Self::blocks(num_states, num_actions, scheme)?;
        env.optimal.shuffle(rng);
        Ok(env)
    }

    pub fn num_states(&self) -> usize {
        self.optimal.len()
    }

    pub fn optimal_map(&self) -> &[usize] {
        &self.optimal
    }

    pub fn scheme(&self) -> RewardScheme {
        self.scheme
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.scheme.value(self.optimal[state] == action)
    }

    /// Every action is optimal for the same number of states.
    pub fn is_uniform(&self) -> bool {
        let mut sizes = vec![0usize; self.num_actions];
        for &a in &self.optimal {
            sizes[a] += 1;
        }
        sizes.iter().all(|&c| c == sizes[0] && c > 0)
    }

    /// Expected one-step reward of the policy `probs(state)` under the uniform state law.
    pub fn expected_reward<F>(&self, mut probs: F) -> Result<f64>
    where
        F: FnMut(usize) -> Result<Vec<f64>>,
    {
        let mut total = 0.0;
        for s in 0..self.num_states() {
            let p = probs(s)?;
            total += p.iter().enumerate().map(|(a, pa)| pa * self.reward(s, a)).sum::<f64>();
        }
        Ok(total / self.num_states() as f64)
    }

    /// Probability of choosing the optimal action under the uniform state law.
    pub fn accuracy<F>(&self, mut probs: F) -> Result<f64>
    where
        F: FnMut(usize) -> Result<Vec<f64>>,
    {
        let mut total = 0.0;
        for (s, &a) in self.optimal.iter().enumerate() {
            total += probs(s)?[a];
        }
        Ok(total / self.num_states() as f64)
    }
}

impl Environment for ContextualBandit {
    fn state_space(&self) -> StateSpace {
        StateSpace::Discrete { count: self.num_states() }
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn horizon(&self) -> usize {
        1
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> Observation {
        let s = rng.gen_range(0..self.num_states());
        self.state = Some(s);
        Observation::Discrete(s)
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step> {
        check_action(action, self.num_actions)?;
        let s = self
            .state
            .take()
            .ok_or_else(|| Error::InvalidEnvironment("step called before reset".into()))?;
        let reward = self.reward(s, action);
        let next = rng.gen_range(0..self.num_states());
        Ok(Step {
            observation: Observation::Discrete(next),
            reward,
            done: true,
        })
    }
}

// ---------------------------------------------------------------------------
// FrozenLake

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tile {
    Start,
    Frozen,
    Hole,
    Goal,
}

pub const STANDARD_4X4: &str = "SFFF\nFHFH\nFFFH\nHFFG";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LakeRewards {
    pub step_penalty: f64,
    pub hole_penalty: f64,
    pub goal_reward: f64,
}

impl Default for LakeRewards {
    fn default() -> Self {
        Self {
            step_penalty: -1.0,
            hole_penalty: -100.0,
            goal_reward: 100.0,
        }
    }
}

/// Grid world. Actions: 0 left, 1 down, 2 right, 3 up.
#[derive(Clone, Debug)]
pub struct FrozenLake {
    tiles: Vec<Tile>,
    rows: usize,
    cols: usize,
    start: usize,
    slippery: bool,
    rewards: LakeRewards,
    horizon: usize,
    position: usize,
    steps: usize,
}

impl FrozenLake {
    pub const DEFAULT_HORIZON: usize = 100;

    pub fn new(map: &str, slippery: bool, rewards: LakeRewards, horizon: usize) -> Result<Self> {
        let rows: Vec<&str> = map.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if rows.is_empty() {
            return Err(Error::InvalidEnvironment("empty map".into()));
        }
        let cols = rows[0].chars().count();
        let mut tiles = Vec::with_capacity(rows.len() * cols);
        for (r, line) in rows.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(Error::InvalidEnvironment(format!("row {r} has a different width")));
            }
            for c in line.chars() {
                tiles.push(match c {
                    'S' => Tile::Start,
                    'F' => Tile::Frozen,
                    'H' => Tile::Hole,
                    'G' => Tile::Goal,
                    other => return Err(Error::InvalidEnvironment(format!("unknown tile `{other}`"))),
                });
            }
        }
        let starts: Vec<usize> = (0..tiles.len()).filter(|&i| tiles[i] == Tile::Start).collect();
        let goals = tiles.iter().filter(|&&t| t == Tile::Goal).count();
        if starts.len() != 1 || goals != 1 {
            return Err(Error::InvalidEnvironment(format!(
                "map needs exactly one start and one goal, found {} and {goals}",
                starts.len()
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidEnvironment("horizon must be positive".into()));
        }
        Ok(Self {
            tiles,
            rows: rows.len(),
            cols,
            start: starts[0],
            slippery,
            rewards,
            horizon,
            position: starts[0],
            steps: 0,
        })
    }

    pub fn standard() -> Self {
        Self::new(STANDARD_4X4, false, LakeRewards::default(), Self::DEFAULT_HORIZON).unwrap()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tile(&self, state: usize) -> Tile {
        self.tiles[state]
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn rewards(&self) -> LakeRewards {
        self.rewards
    }

    /// Cell reached from `state` by `action`; moves off the grid stay put.
    pub fn target(&self, state: usize, action: usize) -> usize {
        let (r, c) = (state / self.cols, state % self.cols);
        let (r, c) = match action {
            0 => (r, c.saturating_sub(1)),
            1 => ((r + 1).min(self.rows - 1), c),
            2 => (r, (c + 1).min(self.cols - 1)),
            _ => (r.saturating_sub(1), c),
        };
        r * self.cols + c
    }

    /// Breadth-first shortest action sequence from the start to the goal
    /// avoiding holes, if one exists.
    pub fn shortest_path(&self) -> Option<Vec<usize>> {
        let n = self.tiles.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(s) = queue.pop_front() {
            if self.tiles[s] == Tile::Goal {
                let mut actions = Vec::new();
                let mut cur = s;
                while let Some((p, a)) = prev[cur] {
                    actions.push(a);
                    cur = p;
                }
                actions.reverse();
                return Some(actions);
            }
            if self.tiles[s] == Tile::Hole {
                continue;
            }
            for a in 0..4 {
                let t = self.target(s, a);
                if !seen[t] {
                    seen[t] = true;
                    prev[t] = Some((s, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

impl Environment for FrozenLake {
    fn state_space(&self) -> StateSpace {
        StateSpace::Discrete { count: self.tiles.len() }
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Observation {
        self.position = self.start;
        self.steps = 0;
        Observation::Discrete(self.position)
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step> {
        check_action(action, 4)?;
        let moved = if self.slippery {
            // intended direction or one of its two perpendiculars, equally likely
            
            (action + 3 + rng.gen_range(0..3)) % 4
        } else {
            action
        };
        self.position = self.target(self.position, moved);
        self.steps += 1;
        let (reward, terminal) = match self.tiles[self.position] {
            Tile::Hole => (self.rewards.hole_penalty, true),
            Tile::Goal => (self.rewards.goal_reward, true),
            _ => (self.rewards.step_penalty, false),
        };
        Ok(Step {
            observation: Observation::Discrete(self.position),
            reward,
            done: terminal || self.steps >= self.horizon,
        })
    }
}

// ---------------------------------------------------------------------------
// CartPole

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartPoleVersion {
    V0,
    V1,
}

impl CartPoleVersion {
    pub fn horizon(self) -> usize {
        match self {
            CartPoleVersion::V0 => 200,
            CartPoleVersion::V1 => 500,
        }
    }
}

impl fmt::Display for CartPoleVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CartPoleVersion::V0 => "v0",
            CartPoleVersion::V1 => "v1",
        })
    }
}

impl FromStr for CartPoleVersion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v0" | "cartpole-v0" => Ok(CartPoleVersion::V0),
            "v1" | "cartpole-v1" => Ok(CartPoleVersion::V1),
            other => Err(Error::Parse(format!("unknown CartPole version `{other}`"))),
        }
    }
}

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const HALF_LENGTH: f64 = 0.5;
const FORCE: f64 = 10.0;
const TAU: f64 = 0.02;
pub const X_LIMIT: f64 = 2.4;
pub const ANGLE_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;

/// Classic cart-pole. State `(x, ẋ, φ, φ̇)`; action 0 pushes left, 1 right.
#[derive(Clone, Debug)]
pub struct CartPole {
    version: CartPoleVersion,
    state: [f64; 4],
    steps: usize,
}

impl CartPole {
    pub fn new(version: CartPoleVersion) -> Self {
        Self {
            version,
            state: [0.0; 4],
            steps: 0,
        }
    }

    pub fn state(&self) -> [f64; 4] {
        self.state
    }

    /// Starts an episode from a chosen state.
    pub fn reset_to(&mut self, state: [f64; 4]) -> Observation {
        self.state = state;
        self.steps = 0;
        Observation::Continuous(state.to_vec())
    }

    /// One explicit Euler step of the dynamics.
    pub fn dynamics(state: [f64; 4], action: usize) -> [f64; 4] {
        let [x, x_dot, theta, theta_dot] = state;
        let force = if action == 1 { FORCE } else { -FORCE };
        let total_mass = CART_MASS + POLE_MASS;
        let pole_moment = POLE_MASS * HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();
        let temp = (force + pole_moment * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc = (GRAVITY * sin - cos * temp) / (HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
        let x_acc = temp - pole_moment * theta_acc * cos / total_mass;
        [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ]
    }

    pub fn failed(state: [f64; 4]) -> bool {
        state[0].abs() > X_LIMIT || state[2].abs() > ANGLE_LIMIT
    }
}

impl Environment for CartPole {
    fn state_space(&self) -> StateSpace {
        StateSpace::Continuous { dim: 4 }
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        self.version.horizon()
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> Observation {
        let s = [(); 4].map(|_| rng.gen_range(-0.05..=0.05));
        self.reset_to(s)
    }

    fn step(&mut self, action: usize, _rng: &mut dyn RngCore) -> Result<Step> {
        check_action(action, 2)?;
        self.state = Self::dynamics(self.state, action);
        self.steps += 1;
        Ok(Step {
            observation: Observation::Continuous(self.state.to_vec()),
            reward: 1.0,
            done: Self::failed(self.state) || self.steps >= self.horizon(),
        })
    }
}

// ---------------------------------------------------------------------------
// Feature encoding

/// Largest double below 1.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Default continuous bounds for CartPole: position, velocity, angle, angular velocity.
pub const CARTPOLE_BOUNDS: [f64; 4] = [X_LIMIT, 2.5, ANGLE_LIMIT, 2.5];

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureEncoder {
    /// `clip(v_i / B_i, -1, 1⁻)`.
    Continuous { bounds: Vec<f64> },
    /// Bit `k` of the state index becomes angle `bit·π` on qubit `k`.
    BinaryDiscrete { n_qubits: usize },
}

impl FeatureEncoder {
    pub fn cartpole() -> Self {
        FeatureEncoder::Continuous {
            bounds: CARTPOLE_BOUNDS.to_vec(),
        }
    }

    /// Encoder for `space` with `n_qubits` features.
    pub fn for_space(space: StateSpace, n_qubits: usize) -> Result<Self> {
        match space {
            StateSpace::Discrete { count } => {
                if n_qubits >= usize::BITS as usize || count > 1usize << n_qubits {
                    return Err(Error::InvalidEnvironment(format!(
                        "{count} states do not fit in {n_qubits} bits"
                    )));
                }
                Ok(FeatureEncoder::BinaryDiscrete { n_qubits })
            }
            StateSpace::Continuous { dim } => {
                if dim != n_qubits {
                    return Err(Error::Dimension {
                        what: "continuous state vs qubits",
                        expected: n_qubits,
                        got: dim,
                    });
                }
                if dim == 4 {
                    Ok(Self::cartpole())
                } else {
                    Ok(FeatureEncoder::Continuous { bounds: vec![1.0; dim] })
                }
            }
        }
    }

    pub fn num_features(&self) -> usize {
        match self {
            FeatureEncoder::Continuous { bounds } => bounds.len(),
            FeatureEncoder::BinaryDiscrete { n_qubits } => *n_qubits,
        }
    }

    pub fn encode(&self, observation: &Observation) -> Result<Vec<f64>> {
        match (self, observation) {
            (FeatureEncoder::BinaryDiscrete { n_qubits }, Observation::Discrete(s)) => {
                if *n_qubits < usize::BITS as usize && *s >> n_qubits != 0 {
                    return Err(Error::StateOutOfRange(format!("state {s} needs more than {n_qubits} bits")));
                }
                Ok((0..*n_qubits)
                    .map(|k| if (s >> k) & 1 == 1 { std::f64::consts::PI } else { 0.0 })
                    .collect())
            }
            (FeatureEncoder::Continuous { bounds }, Observation::Continuous(v)) => {
                if v.len() != bounds.len() {
                    return Err(Error::Dimension {
                        what: "continuous observation",
                        expected: bounds.len(),
                        got: v.len(),
                    });
                }
                v.iter()
                    .zip(bounds)
                    .map(|(&x, &b)| {
                        if !x.is_finite() {
                            return Err(Error::StateOutOfRange(format!("non-finite state value {x}")));
                        }
                        Ok((x / b).clamp(-1.0, BELOW_ONE))
                    })
                    .collect()
            }
            _ => Err(Error::InvalidEnvironment("encoder does not match the observation kind".into())),
        }
    }
}
