//! Deep Order Network: a permutation-invariant set scorer.
//!
//! A set of placed vertices is embedded as `rho(sum_i phi(onehot(x_i)))`, and
//! the output is a softmax over all `n` vertices giving the likelihood of each
//! one extending the set. `phi` and `rho` are two-layer perceptrons with a
//! ReLU hidden layer; the one-hot input of `phi` is a row lookup.
//!
//! Training targets are the normalized window scores of every one-vertex
//! extension of a sampled set, fitted with cross entropy and Adam.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Error, Result};
use crate::graph::Graph;
use crate::locality::{pairwise_sum, Permutation, Similarity, WindowSize};
use crate::nn::{relu_backward, relu_in_place, softmax_in_place, Adam, Dense, DenseGrad};
use crate::policy::SamplingDistribution;

/// Floor applied to predictions inside the logarithm of the loss.
pub const LOG_FLOOR: f64 = 1e-12;

/// An unordered set of distinct vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSolution(Vec<usize>);

impl PartialSolution {
    pub fn new(members: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &v in &members {
            ensure!(v < n, "vertex {v} out of range for n = {n}");
            ensure!(!seen[v], "vertex {v} appears twice in a partial solution");
            seen[v] = true;
        }
        Ok(PartialSolution(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingExample {
    pub input_set: PartialSolution,
    pub soft_label: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DonShape {
    pub n: usize,
    pub hidden_phi: usize,
    pub embed: usize,
    pub hidden_rho: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DonModel {
    pub shape: DonShape,
    pub seed: u64,
    pub phi_hidden: Dense,
    pub phi_out: Dense,
    pub rho_hidden: Dense,
    pub rho_out: Dense,
}

/// Per-layer gradients, same layout as [`DonModel`].
#[derive(Clone, Debug, PartialEq)]
pub struct DonGrads {
    pub phi_hidden: DenseGrad,
    pub phi_out: DenseGrad,
    pub rho_hidden: DenseGrad,
    pub rho_out: DenseGrad,
}

pub fn init_don(
    n: usize,
    hidden_phi: usize,
    embed: usize,
    hidden_rho: usize,
    seed: u64,
) -> Result<DonModel> {
    ensure!(
        n > 0 && hidden_phi > 0 && embed > 0 && hidden_rho > 0,
        "model sizes must be positive (n={n}, hidden_phi={hidden_phi}, embed={embed}, hidden_rho={hidden_rho})"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DonModel {
        shape: DonShape {
            n,
            hidden_phi,
            embed,
            hidden_rho,
        },
        seed,
        phi_hidden: Dense::glorot(n, hidden_phi, &mut rng),
        phi_out: Dense::glorot(hidden_phi, embed, &mut rng),
        rho_hidden: Dense::glorot(embed, hidden_rho, &mut rng),
        rho_out: Dense::glorot(hidden_rho, n, &mut rng),
    })
}

/// Activations kept for the backward pass.
struct Trace {
    member_pre: Vec<Vec<f64>>,
    member_hidden: Vec<Vec<f64>>,
    pooled: Vec<f64>,
    rho_pre: Vec<f64>,
    rho_act: Vec<f64>,
    probs: Vec<f64>,
}

impl DonModel {
    pub fn n(&self) -> usize {
        self.shape.n
    }

    fn layers(&self) -> [&Dense; 4] {
        [&self.phi_hidden, &self.phi_out, &self.rho_hidden, &self.rho_out]
    }

    pub fn is_finite(&self) -> bool {
        self.layers().iter().all(|l| l.is_finite())
    }

    /// Sum-pooled element embeddings of `set`.
    fn pool(&self, set: &[usize], trace: Option<(&mut Vec<Vec<f64>>, &mut Vec<Vec<f64>>)>) -> Vec<f64> {
        let s = self.shape;
        let mut pooled = vec![0.0; s.embed];
        let mut pre = vec![0.0; s.hidden_phi];
        let mut emb = vec![0.0; s.embed];
        let mut record = trace;
        for &x in set {
            self.phi_hidden.forward_one_hot(x, &mut pre);
            let mut act = pre.clone();
            relu_in_place(&mut act);
            self.phi_out.forward(&act, &mut emb);
            for (p, e) in pooled.iter_mut().zip(&emb) {
                *p += e;
            }
            if let Some((pres, acts)) = record.as_mut() {
                pres.push(pre.clone());
                acts.push(act);
            }
        }
        pooled
    }

    /// Unnormalized output scores for `set`.
    pub fn logits(&self, set: &[usize]) -> Vec<f64> {
        let pooled = self.pool(set, None);
        let mut hidden = vec![0.0; self.shape.hidden_rho];
        self.rho_hidden.forward(&pooled, &mut hidden);
        relu_in_place(&mut hidden);
        let mut out = vec![0.0; self.shape.n];
        self.rho_out.forward(&hidden, &mut out);
        out
    }

    /// Probability of each vertex extending `set`. Members are not masked.
    pub fn forward(&self, set: &[usize]) -> Result<Vec<f64>> {
        ensure!(!set.is_empty(), "forward needs a non-empty set");
        ensure!(
            set.iter().all(|&v| v < self.shape.n),
            "set member out of range for n = {}",
            self.shape.n
        );
        let mut p = self.logits(set);
        softmax_in_place(&mut p);
        Ok(p)
    }

    fn trace(&self, set: &[usize]) -> Trace {
        let mut member_pre = Vec::with_capacity(set.len());
        let mut member_hidden = Vec::with_capacity(set.len());
        let pooled = self.pool(set, Some((&mut member_pre, &mut member_hidden)));
        let mut rho_pre = vec![0.0; self.shape.hidden_rho];
        self.rho_hidden.forward(&pooled, &mut rho_pre);
        let mut rho_act = rho_pre.clone();
        relu_in_place(&mut rho_act);
        let mut probs = vec![0.0; self.shape.n];
        self.rho_out.forward(&rho_act, &mut probs);
        softmax_in_place(&mut probs);
        Trace {
            member_pre,
            member_hidden,
            pooled,
            rho_pre,
            rho_act,
            probs,
        }
    }

    pub fn zero_grads(&self) -> DonGrads {
        DonGrads {
            phi_hidden: self.phi_hidden.zero_grad(),
            phi_out: self.phi_out.zero_grad(),
            rho_hidden: self.rho_hidden.zero_grad(),
            rho_out: self.rho_out.zero_grad(),
        }
    }

    /// Mean cross entropy over `batch` and its gradient.
    pub fn loss_and_grads(&self, batch: &[TrainingExample]) -> Result<(f64, DonGrads)> {
        ensure!(!batch.is_empty(), "empty training batch");
        let s = self.shape;
        let mut grads = self.zero_grads();
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        let mut d_hidden = vec![0.0; s.hidden_rho];
        let mut d_pooled = vec![0.0; s.embed];
        let mut d_member = vec![0.0; s.hidden_phi];
        for ex in batch {
            ensure!(ex.soft_label.len() == s.n, "label length differs from n");
            let set = ex.input_set.members();
            ensure!(!set.is_empty(), "training example with an empty set");
            let t = self.trace(set);
            loss += cross_entropy(&t.probs, &ex.soft_label);

            // softmax + cross entropy: d logits = p_hat - p for normalized p
            let d_logits: Vec<f64> = t
                .probs
                .iter()
                .zip(&ex.soft_label)
                .map(|(q, p)| (q - p) * scale)
                .collect();
            self.rho_out
                .backward(&t.rho_act, &d_logits, &mut grads.rho_out, Some(&mut d_hidden));
            relu_backward(&t.rho_pre, &mut d_hidden);
            self.rho_hidden
                .backward(&t.pooled, &d_hidden, &mut grads.rho_hidden, Some(&mut d_pooled));
            for (k, &x) in set.iter().enumerate() {
                self.phi_out.backward(
                    &t.member_hidden[k],
                    &d_pooled,
                    &mut grads.phi_out,
                    Some(&mut d_member),
                );
                relu_backward(&t.member_pre[k], &mut d_member);
                self.phi_hidden.backward_one_hot(x, &d_member, &mut grads.phi_hidden);
            }
        }
        Ok((loss * scale, grads))
    }

    /// Flat views of all parameters, in a fixed order.
    pub fn params_mut(&mut self) -> [&mut [f64]; 8] {
        let DonModel {
            phi_hidden,
            phi_out,
            rho_hidden,
            rho_out,
            ..
        } = self;
        [
            &mut phi_hidden.weight,
            &mut phi_hidden.bias,
            &mut phi_out.weight,
            &mut phi_out.bias,
            &mut rho_hidden.weight,
            &mut rho_hidden.bias,
            &mut rho_out.weight,
            &mut rho_out.bias,
        ]
    }

    pub(crate) fn layer_list(&self) -> [&Dense; 4] {
        self.layers()
    }
}

impl DonGrads {
    pub fn flat(&self) -> [&[f64]; 8] {
        [
            &self.phi_hidden.weight,
            &self.phi_hidden.bias,
            &self.phi_out.weight,
            &self.phi_out.bias,
            &self.rho_hidden.weight,
            &self.rho_hidden.bias,
            &self.rho_out.weight,
            &self.rho_out.bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.phi_hidden.is_finite()
            && self.phi_out.is_finite()
            && self.rho_hidden.is_finite()
            && self.rho_out.is_finite()
    }
}

/// `-sum_i p_i ln(max(q_i, LOG_FLOOR))`.
pub fn cross_entropy(prediction: &[f64], label: &[f64]) -> f64 {
    prediction
        .iter()
        .zip(label)
        .filter(|(_, &p)| p != 0.0)
        .map(|(&q, &p)| -p * q.max(LOG_FLOOR).ln())
        .sum()
}

/// Normalized window score of every one-vertex extension of `set`.
///
/// Entry `v` is proportional to the pairwise similarity sum of `set ∪ {v}`;
/// members of `set` get zero. If every extension scores zero the label is
/// uniform over non-members.
pub fn soft_label<S: Similarity + ?Sized>(s: &S, set: &[usize], n: usize) -> Vec<f64> {
    let mut member = vec![false; n];
    for &u in set {
        member[u] = true;
    }
    let base = pairwise_sum(s, set) as f64;
    let mut raw = vec![0.0; n];
    let mut total = 0.0;
    for v in 0..n {
        if member[v] {
            continue;
        }
        let k: u64 = set.iter().map(|&u| s.sim(u, v)).sum();
        raw[v] = base + k as f64;
        total += raw[v];
    }
    if total > 0.0 {
        for r in &mut raw {
            *r /= total;
        }
    } else {
        let free = n - set.len();
        for (r, &m) in raw.iter_mut().zip(&member) {
            *r = if m { 0.0 } else { 1.0 / free as f64 };
        }
    }
    raw
}

/// Draws `k` distinct vertices, each with probability proportional to its
/// weight among those not yet drawn.
pub fn sample_without_replacement<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let mut w = weights.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = w.iter().sum();
        let x = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &wi) in w.iter().enumerate() {
            if wi <= 0.0 {
                continue;
            }
            acc += wi;
            pick = Some(i);
            if x < acc {
                break;
            }
        }
        let i = pick.expect("positive weight remains");
        w[i] = 0.0;
        out.push(i);
    }
    out
}

/// Samples `batch` sets of `w - 1` vertices from `prob` and labels them.
pub fn sample_training_batch<S: Similarity + ?Sized, R: Rng + ?Sized>(
    s: &S,
    prob: &SamplingDistribution,
    w: WindowSize,
    batch: usize,
    rng: &mut R,
) -> Result<Vec<TrainingExample>> {
    let n = s.vertex_count();
    ensure!(batch >= 1, "batch size must be at least 1");
    ensure!(prob.len() == n, "distribution covers {} vertices, graph has {n}", prob.len());
    let size = w.get().saturating_sub(1);
    ensure!(size >= 1, "window size {} leaves no room for a partial solution", w.get());
    ensure!(size < n, "cannot draw {size} distinct vertices and still extend them with n = {n}");
    (0..batch)
        .map(|_| {
            let set = sample_without_replacement(prob.as_slice(), size, rng);
            let soft_label = soft_label(s, &set, n);
            Ok(TrainingExample {
                input_set: PartialSolution(set),
                soft_label,
            })
        })
        .collect()
}

/// One Adam step on `batch`; returns the mean loss before the update.
pub fn train_step(model: &mut DonModel, opt: &mut Adam, batch: &[TrainingExample], lr: f64) -> Result<f64> {
    let (loss, grads) = model.loss_and_grads(batch)?;
    if !loss.is_finite() || !grads.is_finite() {
        return Err(Error::NonFinite(format!(
            "training loss {loss} at step {}",
            opt.steps() + 1
        )));
    }
    opt.step(lr, &mut model.params_mut(), &grads.flat());
    Ok(loss)
}

/// Root mean squared error between predictions and labels over all entries.
pub fn rmse_eval(model: &DonModel, eval_set: &[TrainingExample]) -> Result<f64> {
    ensure!(!eval_set.is_empty(), "empty evaluation set");
    let mut sq = 0.0;
    let mut count = 0usize;
    for ex in eval_set {
        let p = model.forward(ex.input_set.members())?;
        sq += p
            .iter()
            .zip(&ex.soft_label)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        count += p.len();
    }
    Ok((sq / count as f64).sqrt())
}

/// Highest-degree vertex, smallest id on ties.
pub fn default_start(g: &Graph) -> usize {
    (0..g.n())
        .max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)))
        .unwrap_or(0)
}

/// Greedy decode with the model as the scoring function.
///
/// Each step feeds the last `min(placed, w - 1)` placed vertices (at least
/// one), masks everything already placed, and appends the highest-scoring
/// vertex, smallest id on ties.
pub fn don_order(model: &DonModel, w: WindowSize, start: usize) -> Result<Permutation> {
    let n = model.n();
    ensure!(start < n, "start vertex {start} out of range for n = {n}");
    let ctx = w.get().saturating_sub(1).max(1);
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    placed[start] = true;
    order.push(start);
    while order.len() < n {
        let recent = &order[order.len().saturating_sub(ctx)..];
        let logits = model.logits(recent);
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for (v, &z) in logits.iter().enumerate() {
            if placed[v] {
                continue;
            }
            if best == usize::MAX || z > best_score {
                best = v;
                best_score = z;
            }
        }
        placed[best] = true;
        order.push(best);
    }
    Permutation::new(order)
}

/// [`don_order`] on `g`, starting from its highest-degree vertex.
pub fn don_order_graph(g: &Graph, model: &DonModel, w: WindowSize) -> Result<Permutation> {
    ensure!(
        model.n() == g.n(),
        "model was built for {} vertices, graph has {}",
        model.n(),
        g.n()
    );
    if g.n() == 0 {
        return Ok(Permutation::identity(0));
    }
    don_order(model, w, default_start(g))
}
