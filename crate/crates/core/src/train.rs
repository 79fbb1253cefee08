//! Training drivers: a bare DON run on a fixed sampling distribution, and
//! the interleaved DON + policy-network loop.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::don::{self, init_don, sample_training_batch, train_step, DonModel, TrainingExample};
use crate::error::Result;
use crate::graph::Graph;
use crate::locality::{SimilarityIndex, WindowSize};
use crate::nn::{Adam, RmsProp};
use crate::policy::{
    apply_action, build_eval_set, default_floor, init_policy, initial_prob_with_floor, policy_forward,
    reinforce_update, reward_from_eval, sample_action, MovingBaseline, PolicyModel, SamplingDistribution,
    TrajectoryStep,
};

/// Stream offsets so each random consumer gets its own generator.
const STREAM_POLICY_INIT: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SAMPLING: u64 = 0xC2B2_AE3D_27D4_EB4F;
const STREAM_EVAL: u64 = 0x1656_67B1_9E37_79F9;

#[derive(Clone, Debug, PartialEq)]
pub struct DonMetric {
    pub step: usize,
    pub loss: f64,
    /// Present on steps followed by an evaluation.
    pub rmse: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RlMetric {
    pub rl_step: usize,
    pub t: usize,
    pub reward: f64,
    pub baseline: f64,
    pub mean_action_prob: f64,
    pub discounted_return: f64,
}

/// One rolled-out trajectory, kept for auditing.
#[derive(Clone, Debug, PartialEq)]
pub struct LoggedTrajectory {
    pub steps: Vec<TrajectoryStep>,
    /// State reached after the last action.
    pub final_state: SamplingDistribution,
    pub returns: Vec<f64>,
    pub baseline_before: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub don: DonModel,
    pub policy: Option<PolicyModel>,
    pub don_metrics: Vec<DonMetric>,
    pub rl_metrics: Vec<RlMetric>,
    pub trajectories: Vec<LoggedTrajectory>,
    pub eval_set: Vec<TrainingExample>,
    pub don_updates: usize,
}

struct DonTrainer<'a> {
    sim: &'a SimilarityIndex<'a>,
    w: WindowSize,
    batch: usize,
    lr: f64,
    model: DonModel,
    opt: Adam,
    rng: ChaCha8Rng,
    metrics: Vec<DonMetric>,
    started: Instant,
}

impl DonTrainer<'_> {
    fn run(&mut self, prob: &SamplingDistribution, steps: usize) -> Result<()> {
        for _ in 0..steps {
            let batch = sample_training_batch(self.sim, prob, self.w, self.batch, &mut self.rng)?;
            let loss = train_step(&mut self.model, &mut self.opt, &batch, self.lr)?;
            self.metrics.push(DonMetric {
                step: self.metrics.len() + 1,
                loss,
                rmse: None,
                wall_ms: self.started.elapsed().as_secs_f64() * 1e3,
            });
        }
        Ok(())
    }

    fn evaluate(&mut self, eval_set: &[TrainingExample]) -> Result<f64> {
        let reward = reward_from_eval(&self.model, eval_set)?;
        if let Some(last) = self.metrics.last_mut() {
            last.rmse = Some(-reward);
        }
        Ok(reward)
    }
}

fn setup<'g>(g: &'g Graph, cfg: &Config) -> Result<(SimilarityIndex<'g>, WindowSize, f64)> {
    cfg.validate()?;
    let w = WindowSize::new(cfg.w)?;
    let floor = cfg.epsilon_floor.unwrap_or_else(|| default_floor(g.n()));
    Ok((SimilarityIndex::for_graph(g, cfg.dense_cap), w, floor))
}

/// Trains DON alone on the degree distribution for `global_steps` updates,
/// evaluating every `eval_every` steps and at the end.
pub fn train_don(g: &Graph, cfg: &Config, eval_every: usize) -> Result<TrainOutcome> {
    let (sim, w, floor) = setup(g, cfg)?;
    let prob = initial_prob_with_floor(g, floor);
    let eval_set = build_eval_set(
        &sim,
        &prob,
        w,
        cfg.eval_size,
        &mut ChaCha8Rng::seed_from_u64(cfg.seed ^ STREAM_EVAL),
    )?;
    let mut trainer = DonTrainer {
        sim: &sim,
        w,
        batch: cfg.batch_size,
        lr: cfg.learning_rate,
        model: init_don(g.n(), cfg.hidden_phi, cfg.embed, cfg.hidden_rho, cfg.seed)?,
        opt: Adam::default(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ STREAM_SAMPLING),
        metrics: Vec::new(),
        started: Instant::now(),
    };
    let every = eval_every.max(1);
    let mut done = 0;
    while done < cfg.global_steps {
        let chunk = every.min(cfg.global_steps - done);
        trainer.run(&prob, chunk)?;
        trainer.evaluate(&eval_set)?;
        done += chunk;
    }
    let don_updates = trainer.metrics.len();
    Ok(TrainOutcome {
        don: trainer.model,
        policy: None,
        don_metrics: trainer.metrics,
        rl_metrics: Vec::new(),
        trajectories: Vec::new(),
        eval_set,
        don_updates,
    })
}

/// Interleaved training of DON and the sampling policy.
///
/// After `warmup_steps` DON updates on the degree distribution (evaluated
/// every `don_steps_per_t` steps to seed the reward baseline), each RL step
/// restarts from the degree distribution and rolls a trajectory of
/// `trajectory_len` actions. Every action moves the distribution, DON trains
/// `don_steps_per_t` steps on batches drawn from the new distribution, and
/// the negated evaluation RMSE is the reward. The policy is then updated
/// once from the trajectory.
pub fn train_don_rl(g: &Graph, cfg: &Config) -> Result<TrainOutcome> {
    let (sim, w, floor) = setup(g, cfg)?;
    let n = g.n();
    let prob0 = initial_prob_with_floor(g, floor);
    let eval_set = build_eval_set(
        &sim,
        &prob0,
        w,
        cfg.eval_size,
        &mut ChaCha8Rng::seed_from_u64(cfg.seed ^ STREAM_EVAL),
    )?;
    let mut trainer = DonTrainer {
        sim: &sim,
        w,
        batch: cfg.batch_size,
        lr: cfg.learning_rate,
        model: init_don(n, cfg.hidden_phi, cfg.embed, cfg.hidden_rho, cfg.seed)?,
        opt: Adam::default(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ STREAM_SAMPLING),
        metrics: Vec::new(),
        started: Instant::now(),
    };
    let mut policy = init_policy(n, cfg.policy_hidden, cfg.seed ^ STREAM_POLICY_INIT)?;
    let mut policy_opt = RmsProp::default();
    let mut baseline = MovingBaseline::default();
    let per_t = cfg.don_steps_per_t();
    let lambda = cfg.lambda(n);

    let mut warm = 0;
    while warm < cfg.warmup_steps {
        let chunk = per_t.min(cfg.warmup_steps - warm);
        trainer.run(&prob0, chunk)?;
        baseline.observe(trainer.evaluate(&eval_set)?);
        warm += chunk;
    }

    let mut rl_metrics = Vec::with_capacity(cfg.rl_steps * cfg.trajectory_len);
    let mut trajectories = Vec::with_capacity(cfg.rl_steps);
    for rl_step in 0..cfg.rl_steps {
        let mut state = prob0.clone();
        let mut steps = Vec::with_capacity(cfg.trajectory_len);
        for _ in 0..cfg.trajectory_len {
            let q = policy_forward(&policy, &state);
            let action = sample_action(&q, &mut trainer.rng);
            let next = apply_action(&state, &action, lambda)?;
            trainer.run(&next, per_t)?;
            let reward = trainer.evaluate(&eval_set)?;
            steps.push(TrajectoryStep {
                state: std::mem::replace(&mut state, next),
                action,
                action_prob: q,
                reward,
            });
        }
        let stats = reinforce_update(
            &mut policy,
            &mut policy_opt,
            &steps,
            cfg.gamma,
            cfg.policy_learning_rate,
            &mut baseline,
        )?;
        for (t, step) in steps.iter().enumerate() {
            rl_metrics.push(RlMetric {
                rl_step,
                t,
                reward: step.reward,
                baseline: stats.baseline,
                mean_action_prob: step.action_prob.iter().sum::<f64>() / n as f64,
                discounted_return: stats.returns[t],
            });
        }
        trajectories.push(LoggedTrajectory {
            steps,
            final_state: state,
            returns: stats.returns,
            baseline_before: stats.baseline,
        });
    }

    let don_updates = trainer.metrics.len();
    Ok(TrainOutcome {
        don: trainer.model,
        policy: Some(policy),
        don_metrics: trainer.metrics,
        rl_metrics,
        trajectories,
        eval_set,
        don_updates,
    })
}

/// `step,loss,rmse[,wall_ms]`. Wall time is opt-in so the default output is
/// reproducible byte for byte.
pub fn don_metrics_csv(metrics: &[DonMetric], with_wall_time: bool) -> String {
    let mut out = String::from(if with_wall_time {
        "step,loss,rmse,wall_ms\n"
    } else {
        "step,loss,rmse\n"
    });
    for m in metrics {
        let rmse = m.rmse.map(|r| format!("{r:.12e}")).unwrap_or_default();
        let _ = write!(out, "{},{:.12e},{}", m.step, m.loss, rmse);
        if with_wall_time {
            let _ = write!(out, ",{:.3}", m.wall_ms);
        }
        out.push('\n');
    }
    out
}

pub fn rl_metrics_csv(metrics: &[RlMetric]) -> String {
    let mut out = String::from("rl_step,t,reward,baseline,mean_action_prob,return\n");
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
            m.rl_step, m.t, m.reward, m.baseline, m.mean_action_prob, m.discounted_return
        );
    }
    out
}

/// Convenience wrapper: decode with the trained model from the graph's
/// highest-degree vertex.
pub fn decode(g: &Graph, outcome: &TrainOutcome, w: WindowSize) -> Result<crate::locality::Permutation> {
    don::don_order_graph(g, &outcome.don, w)
}
