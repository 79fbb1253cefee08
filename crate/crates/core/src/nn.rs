//! Minimal dense layers and first-order optimizers over `f64` buffers.

use rand::Rng;

/// Fully connected layer, `y = x W + b`, with `W` stored row-major as
/// `inputs x outputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseGrad {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    /// Uniform in `±sqrt(6 / (inputs + outputs))`, zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weight = (0..inputs * outputs)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        Dense {
            inputs,
            outputs,
            weight,
            bias: vec![0.0; outputs],
        }
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weight: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn zero_grad(&self) -> DenseGrad {
        DenseGrad {
            weight: vec![0.0; self.weight.len()],
            bias: vec![0.0; self.bias.len()],
        }
    }

    pub fn forward(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.inputs);
        out.copy_from_slice(&self.bias);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.weight[i * self.outputs..(i + 1) * self.outputs];
            for (o, &wij) in out.iter_mut().zip(row) {
                *o += xi * wij;
            }
        }
    }

    /// Forward pass for a one-hot input: row `index` of `W` plus the bias.
    pub fn forward_one_hot(&self, index: usize, out: &mut [f64]) {
        let row = &self.weight[index * self.outputs..(index + 1) * self.outputs];
        for ((o, &wij), &b) in out.iter_mut().zip(row).zip(&self.bias) {
            *o = wij + b;
        }
    }

    /// Accumulates parameter gradients for input `x` and upstream `dout`,
    /// and writes `dx` when requested.
    pub fn backward(&self, x: &[f64], dout: &[f64], grad: &mut DenseGrad, dx: Option<&mut [f64]>) {
        for (g, &d) in grad.bias.iter_mut().zip(dout) {
            *g += d;
        }
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &mut grad.weight[i * self.outputs..(i + 1) * self.outputs];
            for (g, &d) in row.iter_mut().zip(dout) {
                *g += xi * d;
            }
        }
        if let Some(dx) = dx {
            for (i, dxi) in dx.iter_mut().enumerate() {
                let row = &self.weight[i * self.outputs..(i + 1) * self.outputs];
                *dxi = row.iter().zip(dout).map(|(w, d)| w * d).sum();
            }
        }
    }

    /// Backward pass for a one-hot input at `index`.
    pub fn backward_one_hot(&self, index: usize, dout: &[f64], grad: &mut DenseGrad) {
        let row = &mut grad.weight[index * self.outputs..(index + 1) * self.outputs];
        for ((g, gb), &d) in row.iter_mut().zip(grad.bias.iter_mut()).zip(dout) {
            *g += d;
            *gb += d;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weight.iter().chain(&self.bias).all(|x| x.is_finite())
    }
}

impl DenseGrad {
    pub fn scale(&mut self, s: f64) {
        for g in self.weight.iter_mut().chain(self.bias.iter_mut()) {
            *g *= s;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weight.iter().chain(&self.bias).all(|x| x.is_finite())
    }
}

#[inline]
pub fn relu_in_place(x: &mut [f64]) {
    for v in x {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Zeroes `grad` wherever the pre-activation was not positive.
#[inline]
pub fn relu_backward(pre: &[f64], grad: &mut [f64]) {
    for (g, &p) in grad.iter_mut().zip(pre) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

pub fn softmax_in_place(x: &mut [f64]) {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in x.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in x.iter_mut() {
        *v /= sum;
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Adam with bias correction. Minimizes.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Default for Adam {
    fn default() -> Self {
        Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }
}

impl Adam {
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, lr: f64, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        assert_eq!(params.len(), grads.len());
        if self.m.is_empty() {
            self.m = grads.iter().map(|g| vec![0.0; g.len()]).collect();
            self.v = self.m.clone();
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for i in 0..g.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p[i] -= lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

/// RMSProp. Minimizes; pass a negated gradient to ascend.
#[derive(Clone, Debug, PartialEq)]
pub struct RmsProp {
    pub decay: f64,
    pub eps: f64,
    cache: Vec<Vec<f64>>,
}

impl Default for RmsProp {
    fn default() -> Self {
        RmsProp {
            decay: 0.9,
            eps: 1e-8,
            cache: Vec::new(),
        }
    }
}

impl RmsProp {
    pub fn step(&mut self, lr: f64, params: &mut [&mut [f64]], grads: &[&[f64]]) {
        assert_eq!(params.len(), grads.len());
        if self.cache.is_empty() {
            self.cache = grads.iter().map(|g| vec![0.0; g.len()]).collect();
        }
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let c = &mut self.cache[k];
            for i in 0..g.len() {
                c[i] = self.decay * c[i] + (1.0 - self.decay) * g[i] * g[i];
                p[i] -= lr * g[i] / (c[i].sqrt() + self.eps);
            }
        }
    }
}
