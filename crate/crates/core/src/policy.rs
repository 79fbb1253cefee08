//! Policy network that tunes the vertex sampling distribution.
//!
//! The state is a probability vector over vertices. An action flips a coin
//! per vertex: bit 0 raises that vertex's probability by the tuning rate,
//! bit 1 lowers it, then the vector is floored and renormalized. The policy
//! is a two-layer perceptron with sigmoid outputs, trained by REINFORCE
//! against a moving-average reward baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::don::TrainingExample;
use crate::error::{ensure, Error, Result};
use crate::graph::Graph;
use crate::locality::{Similarity, WindowSize};
use crate::nn::{relu_backward, relu_in_place, sigmoid, Dense, DenseGrad, RmsProp};

/// Default probability floor for `n` vertices.
pub fn default_floor(n: usize) -> f64 {
    1e-6 / n.max(1) as f64
}

/// Normalized sampling probabilities with a per-entry floor.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDistribution {
    p: Vec<f64>,
    floor: f64,
}

impl SamplingDistribution {
    pub fn uniform(n: usize) -> Self {
        SamplingDistribution {
            p: vec![1.0 / n as f64; n],
            floor: default_floor(n),
        }
    }

    /// Clamps non-negative `weights` at `floor` and normalizes so that every
    /// entry stays at or above the floor.
    pub fn from_weights(weights: &[f64], floor: f64) -> Result<Self> {
        let n = weights.len();
        ensure!(n > 0, "sampling distribution over zero vertices");
        ensure!(
            floor > 0.0 && floor * n as f64 <= 1.0,
            "floor {floor} infeasible for {n} vertices"
        );
        ensure!(
            weights.iter().all(|w| w.is_finite()),
            "non-finite sampling weight"
        );
        let mut p: Vec<f64> = weights.iter().map(|&w| w.max(floor)).collect();
        normalize_with_floor(&mut p, floor);
        Ok(SamplingDistribution { p, floor })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Checks the sum and floor invariants.
    pub fn is_valid(&self) -> bool {
        let sum: f64 = self.p.iter().sum();
        (sum - 1.0).abs() <= 1e-9 && self.p.iter().all(|&x| x >= self.floor)
    }
}

/// L1-normalizes `p` (all entries already `>= floor`), then pins any entry
/// that fell below the floor and rescales the rest until none does.
fn normalize_with_floor(p: &mut [f64], floor: f64) {
    let mut pinned = vec![false; p.len()];
    loop {
        let pinned_mass = pinned.iter().filter(|&&b| b).count() as f64 * floor;
        let free_sum: f64 = p
            .iter()
            .zip(&pinned)
            .filter(|(_, &b)| !b)
            .map(|(x, _)| x)
            .sum();
        let scale = (1.0 - pinned_mass) / free_sum;
        let mut changed = false;
        for (x, b) in p.iter_mut().zip(pinned.iter_mut()) {
            if *b {
                *x = floor;
            } else {
                *x *= scale;
                if *x < floor {
                    *x = floor;
                    *b = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Degree-proportional distribution, uniform when the graph has no arcs.
pub fn initial_prob(g: &Graph) -> SamplingDistribution {
    initial_prob_with_floor(g, default_floor(g.n()))
}

pub fn initial_prob_with_floor(g: &Graph, floor: f64) -> SamplingDistribution {
    let n = g.n();
    if g.arc_count() == 0 {
        let mut u = SamplingDistribution::uniform(n);
        u.floor = floor;
        return u;
    }
    let degrees: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    SamplingDistribution::from_weights(&degrees, floor).expect("degrees are finite")
}

/// Adds `lambda` where the action bit is 0, subtracts it where the bit is 1,
/// clamps at the floor and renormalizes.
pub fn apply_action(s: &SamplingDistribution, action: &[u8], lambda: f64) -> Result<SamplingDistribution> {
    ensure!(action.len() == s.len(), "action length {} != state length {}", action.len(), s.len());
    ensure!(lambda > 0.0 && lambda.is_finite(), "tuning rate must be positive, got {lambda}");
    let raw: Vec<f64> = s
        .p
        .iter()
        .zip(action)
        .map(|(&x, &a)| if a == 0 { x + lambda } else { x - lambda })
        .collect();
    SamplingDistribution::from_weights(&raw, s.floor)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyModel {
    pub seed: u64,
    pub hidden: Dense,
    pub out: Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyGrads {
    pub hidden: DenseGrad,
    pub out: DenseGrad,
}

impl PolicyGrads {
    pub fn flat(&self) -> [&[f64]; 4] {
        [
            &self.hidden.weight,
            &self.hidden.bias,
            &self.out.weight,
            &self.out.bias,
        ]
    }

    fn add_scaled(&mut self, other: &PolicyGrads, s: f64) {
        for (a, b) in self
            .hidden
            .weight
            .iter_mut()
            .chain(self.hidden.bias.iter_mut())
            .chain(self.out.weight.iter_mut())
            .chain(self.out.bias.iter_mut())
            .zip(
                other
                    .hidden
                    .weight
                    .iter()
                    .chain(&other.hidden.bias)
                    .chain(&other.out.weight)
                    .chain(&other.out.bias),
            )
        {
            *a += s * b;
        }
    }

    fn is_finite(&self) -> bool {
        self.hidden.is_finite() && self.out.is_finite()
    }
}

pub fn init_policy(n: usize, hidden: usize, seed: u64) -> Result<PolicyModel> {
    ensure!(n > 0 && hidden > 0, "policy sizes must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(PolicyModel {
        seed,
        hidden: Dense::glorot(n, hidden, &mut rng),
        out: Dense::glorot(hidden, n, &mut rng),
    })
}

impl PolicyModel {
    pub fn n(&self) -> usize {
        self.hidden.inputs
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden.outputs
    }

    fn pre_activations(&self, state: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut pre = vec![0.0; self.hidden.outputs];
        self.hidden.forward(state, &mut pre);
        let mut act = pre.clone();
        relu_in_place(&mut act);
        let mut z = vec![0.0; self.out.outputs];
        self.out.forward(&act, &mut z);
        (pre, act, z)
    }

    /// Gradient of the Bernoulli log-likelihood of `action` under the policy
    /// at `state`, plus the log-likelihood itself.
    pub fn log_prob_grad(&self, state: &[f64], action: &[u8]) -> (f64, PolicyGrads) {
        let (pre, act, z) = self.pre_activations(state);
        let mut logp = 0.0;
        let mut dz = vec![0.0; z.len()];
        for ((d, &zi), &a) in dz.iter_mut().zip(&z).zip(action) {
            let q = sigmoid(zi);
            let a = a as f64;
            // log sigmoid(z) = -softplus(-z), log(1 - sigmoid(z)) = -softplus(z)
            logp += if a == 1.0 { -softplus(-zi) } else { -softplus(zi) };
            *d = a - q;
        }
        let mut grads = PolicyGrads {
            hidden: self.hidden.zero_grad(),
            out: self.out.zero_grad(),
        };
        let mut d_act = vec![0.0; act.len()];
        self.out.backward(&act, &dz, &mut grads.out, Some(&mut d_act));
        relu_backward(&pre, &mut d_act);
        self.hidden.backward(state, &d_act, &mut grads.hidden, None);
        (logp, grads)
    }

    pub fn log_prob(&self, state: &[f64], action: &[u8]) -> f64 {
        let (_, _, z) = self.pre_activations(state);
        z.iter()
            .zip(action)
            .map(|(&zi, &a)| if a == 1 { -softplus(-zi) } else { -softplus(zi) })
            .sum()
    }

    pub fn params_mut(&mut self) -> [&mut [f64]; 4] {
        [
            &mut self.hidden.weight,
            &mut self.hidden.bias,
            &mut self.out.weight,
            &mut self.out.bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.hidden.is_finite() && self.out.is_finite()
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Per-vertex probability of action bit 1 ("decrease").
pub fn policy_forward(m: &PolicyModel, s: &SamplingDistribution) -> Vec<f64> {
    let (_, _, z) = m.pre_activations(s.as_slice());
    z.into_iter().map(sigmoid).collect()
}

/// Independent Bernoulli draw per vertex; bit `i` is 1 with probability `q[i]`.
pub fn sample_action<R: Rng + ?Sized>(q: &[f64], rng: &mut R) -> Vec<u8> {
    q.iter().map(|&qi| (rng.random::<f64>() < qi) as u8).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStep {
    pub state: SamplingDistribution,
    pub action: Vec<u8>,
    pub action_prob: Vec<f64>,
    pub reward: f64,
}

/// Exponential moving average of observed rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct MovingBaseline {
    pub decay: f64,
    value: Option<f64>,
}

impl Default for MovingBaseline {
    fn default() -> Self {
        MovingBaseline {
            decay: 0.9,
            value: None,
        }
    }
}

impl MovingBaseline {
    pub fn observe(&mut self, reward: f64) {
        self.value = Some(match self.value {
            None => reward,
            Some(b) => self.decay * b + (1.0 - self.decay) * reward,
        });
    }

    pub fn value(&self) -> Option<f64> {
        self.value
    }
}

/// Discounted returns `R_t = r_t + gamma * R_{t+1}`.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReinforceStats {
    pub returns: Vec<f64>,
    pub advantages: Vec<f64>,
    /// Baseline used for the advantages.
    pub baseline: f64,
}

/// One REINFORCE update from a single trajectory.
///
/// Advantages use the baseline as it stood before this trajectory; the
/// trajectory's rewards are folded into the baseline afterwards. An empty
/// baseline is seeded with the trajectory's first reward.
pub fn reinforce_update(
    m: &mut PolicyModel,
    opt: &mut RmsProp,
    traj: &[TrajectoryStep],
    gamma: f64,
    alpha: f64,
    baseline: &mut MovingBaseline,
) -> Result<ReinforceStats> {
    ensure!(!traj.is_empty(), "empty trajectory");
    ensure!((0.0..=1.0).contains(&gamma), "discount {gamma} outside [0, 1]");
    let rewards: Vec<f64> = traj.iter().map(|s| s.reward).collect();
    ensure!(rewards.iter().all(|r| r.is_finite()), "non-finite reward in trajectory");
    if baseline.value().is_none() {
        baseline.observe(rewards[0]);
    }
    let b = baseline.value().expect("seeded above");
    let returns = discounted_returns(&rewards, gamma);
    let advantages: Vec<f64> = returns.iter().map(|r| r - b).collect();

    let mut total: Option<PolicyGrads> = None;
    for (step, &adv) in traj.iter().zip(&advantages) {
        let (_, g) = m.log_prob_grad(step.state.as_slice(), &step.action);
        match total.as_mut() {
            None => {
                let mut g = g;
                g.hidden.scale(adv);
                g.out.scale(adv);
                total = Some(g);
            }
            Some(t) => t.add_scaled(&g, adv),
        }
    }
    let mut grad = total.expect("non-empty trajectory");
    if !grad.is_finite() {
        return Err(Error::NonFinite("policy gradient".into()));
    }
    // Ascent on the objective: minimize its negation.
    grad.hidden.scale(-1.0);
    grad.out.scale(-1.0);
    opt.step(alpha, &mut m.params_mut(), &grad.flat());
    if !m.is_finite() {
        return Err(Error::NonFinite("policy parameters after update".into()));
    }
    for r in &rewards {
        baseline.observe(*r);
    }
    Ok(ReinforceStats {
        returns,
        advantages,
        baseline: b,
    })
}

/// Evaluation set built with the best-neighbour heuristic.
///
/// Each example starts from a vertex drawn from `start_prob` and greedily
/// adds the vertex with the largest similarity sum to the current set
/// (smallest id on ties) until it holds `w - 1` vertices; the target is that
/// set's soft label.
pub fn build_eval_set<S: Similarity + ?Sized, R: Rng + ?Sized>(
    s: &S,
    start_prob: &SamplingDistribution,
    w: WindowSize,
    size: usize,
    rng: &mut R,
) -> Result<Vec<TrainingExample>> {
    let n = s.vertex_count();
    ensure!(size >= 1, "evaluation set size must be at least 1");
    ensure!(start_prob.len() == n, "start distribution length differs from n");
    let target = w.get().saturating_sub(1);
    ensure!(target >= 1 && target < n, "window {} unusable for n = {n}", w.get());
    let mut out = Vec::with_capacity(size);
    for _ in 0..size {
        let start = crate::don::sample_without_replacement(start_prob.as_slice(), 1, rng)[0];
        let set = grow_best_neighbor(s, start, target);
        let soft_label = crate::don::soft_label(s, &set, n);
        out.push(TrainingExample {
            input_set: crate::don::PartialSolution::new(set, n)?,
            soft_label,
        });
    }
    Ok(out)
}

/// Grows a set from `start` by repeatedly adding the best-connected vertex.
pub fn grow_best_neighbor<S: Similarity + ?Sized>(s: &S, start: usize, size: usize) -> Vec<usize> {
    let n = s.vertex_count();
    let mut chosen = vec![false; n];
    let mut gain = vec![0u64; n];
    let mut set = vec![start];
    chosen[start] = true;
    while set.len() < size {
        let last = *set.last().expect("non-empty");
        for v in 0..n {
            if !chosen[v] {
                gain[v] += s.sim(last, v);
            }
        }
        let next = (0..n)
            .filter(|&v| !chosen[v])
            .max_by_key(|&v| (gain[v], std::cmp::Reverse(v)))
            .expect("size < n");
        chosen[next] = true;
        set.push(next);
    }
    set
}

/// Negated RMSE of the model on the evaluation set.
pub fn reward_from_eval(m: &crate::don::DonModel, eval_set: &[TrainingExample]) -> Result<f64> {
    crate::don::rmse_eval(m, eval_set).map(|e| -e)
}
