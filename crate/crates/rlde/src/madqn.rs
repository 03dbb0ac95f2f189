//! Multi-head double deep Q-network: one value head per design object, an
//! epsilon-greedy policy over the six-component action tuple, the experience
//! replay buffer, and the squared-TD update applied through Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::de::{
    cr_value, f_value, DEConfig, CROSSOVER_STRATEGIES, CR_GRID_LEN, F_GRID_LEN,
    MUTATION_STRATEGIES, NP_MULTIPLIERS,
};
use crate::error::{Error, Result};
use crate::rng::DetRng;
use crate::sampling::{InitStrategy, INIT_STRATEGIES};

/// Width of the state vector (the landscape fingerprint).
pub const STATE_DIM: usize = crate::ela::FEATURE_COUNT;

/// Output widths of the six heads, in action order:
/// init, mutation, crossover, NP multiplier, F, Cr.
pub const HEAD_WIDTHS: [usize; 6] = [5, 10, 2, 5, F_GRID_LEN, CR_GRID_LEN];

/// One index per design object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTuple {
    pub init: usize,
    pub mutation: usize,
    pub crossover: usize,
    pub np: usize,
    pub f: usize,
    pub cr: usize,
}

impl ActionTuple {
    pub fn as_array(&self) -> [usize; 6] {
        [self.init, self.mutation, self.crossover, self.np, self.f, self.cr]
    }

    pub fn from_array(indices: [usize; 6]) -> ActionTuple {
        ActionTuple {
            init: indices[0],
            mutation: indices[1],
            crossover: indices[2],
            np: indices[3],
            f: indices[4],
            cr: indices[5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, (idx, width)) in self.as_array().iter().zip(HEAD_WIDTHS).enumerate() {
            if *idx >= width {
                return Err(Error::config(format!("head {i} index {idx} exceeds width {width}")));
            }
        }
        Ok(())
    }

    /// The design-space point this action selects.
    pub fn decode(&self) -> DEConfig {
        DEConfig {
            init: INIT_STRATEGIES[self.init],
            mutation: MUTATION_STRATEGIES[self.mutation],
            crossover: CROSSOVER_STRATEGIES[self.crossover],
            np_mult: NP_MULTIPLIERS[self.np],
            f: f_value(self.f),
            cr: cr_value(self.cr),
        }
    }

    /// Inverse of [`ActionTuple::decode`] for on-grid configurations.
    pub fn encode(config: &DEConfig) -> Result<ActionTuple> {
        config.validate()?;
        let position = |hay: &[InitStrategy], needle: InitStrategy| {
            hay.iter().position(|s| *s == needle).expect("strategy list is exhaustive")
        };
        let mutation = MUTATION_STRATEGIES
            .iter()
            .position(|s| *s == config.mutation)
            .expect("mutation list is exhaustive");
        let crossover = CROSSOVER_STRATEGIES
            .iter()
            .position(|s| *s == config.crossover)
            .expect("crossover list is exhaustive");
        let np = NP_MULTIPLIERS
            .iter()
            .position(|m| *m == config.np_mult)
            .ok_or_else(|| Error::config("np_mult off grid".to_string()))?;
        Ok(ActionTuple {
            init: position(&INIT_STRATEGIES, config.init),
            mutation,
            crossover,
            np,
            f: (config.f / 0.05).round() as usize,
            cr: (config.cr / 0.1).round() as usize,
        })
    }
}

/// How the TD error enters the loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LossForm {
    /// Mean squared TD error (the default).
    #[default]
    #[serde(rename = "squared-td")]
    SquaredTd,
    /// Mean signed TD error, kept for fidelity experiments.
    #[serde(rename = "signed-td")]
    SignedTd,
}

/// Agent hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the meta steps over which epsilon decays linearly.
    pub epsilon_decay_fraction: f64,
    pub batch_size: usize,
    /// Target network refresh period, counted in updates.
    pub target_sync_period: usize,
    pub learning_rate: f64,
    pub buffer_capacity: usize,
    pub hidden: Vec<usize>,
    #[serde(default)]
    pub loss_form: LossForm,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.9,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_fraction: 0.5,
            batch_size: 64,
            target_sync_period: 100,
            learning_rate: 1e-3,
            buffer_capacity: 10_000,
            hidden: vec![128, 128, 128],
            loss_form: LossForm::SquaredTd,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        for eps in [self.epsilon_start, self.epsilon_end] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::config(format!("epsilon {eps} outside [0, 1]")));
            }
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be positive".to_string()));
        }
        if self.target_sync_period == 0 {
            return Err(Error::config("target sync period must be positive".to_string()));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::config("buffer capacity must be positive".to_string()));
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::config("hidden widths must be positive".to_string()));
        }
        Ok(())
    }

    /// Linear decay from start to end over the first `decay_fraction` of
    /// `total` steps.
    pub fn epsilon_at(&self, step: usize, total: usize) -> f64 {
        let horizon = (self.epsilon_decay_fraction * total as f64).max(1.0);
        let progress = (step as f64 / horizon).min(1.0);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * progress
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Dense {
    weights: Vec<f64>, // row-major (out, in)
    bias: Vec<f64>,
    inp: usize,
    out: usize,
}

impl Dense {
    fn new(inp: usize, out: usize, rng: &mut DetRng) -> Dense {
        // uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero
        let limit = (6.0 / (inp + out) as f64).sqrt();
        let weights =
            (0..inp * out).map(|_| rng.random::<f64>() * 2.0 * limit - limit).collect();
        Dense { weights, bias: vec![0.0; out], inp, out }
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for (o, slot) in out.iter_mut().enumerate() {
            let row = &self.weights[o * self.inp..(o + 1) * self.inp];
            *slot += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
        out
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// The multi-head value approximator: a fully connected trunk with
/// rectified-linear activations feeding six linear heads.
#[derive(Clone, Debug, PartialEq)]
pub struct QNetwork {
    trunk: Vec<Dense>,
    heads: Vec<Dense>,
    input_dim: usize,
}

/// Cached activations of one forward pass, for backpropagation.
struct ForwardCache {
    /// activations entering each trunk layer (first entry is the state)
    inputs: Vec<Vec<f64>>,
    /// post-ReLU activations of each trunk layer
    activations: Vec<Vec<f64>>,
    /// head outputs
    outputs: Vec<Vec<f64>>,
}

impl QNetwork {
    /// Builds a randomly initialized network. Layer draws happen trunk-first
    /// then heads, each layer row-major.
    pub fn new(input_dim: usize, hidden: &[usize], rng: &mut DetRng) -> QNetwork {
        let mut trunk = Vec::with_capacity(hidden.len());
        let mut prev = input_dim;
        for width in hidden {
            trunk.push(Dense::new(prev, *width, rng));
            prev = *width;
        }
        let heads = HEAD_WIDTHS.iter().map(|w| Dense::new(prev, *w, rng)).collect();
        QNetwork { trunk, heads, input_dim }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.trunk.iter().map(|l| l.out).collect()
    }

    fn forward_cache(&self, state: &[f64]) -> ForwardCache {
        let mut inputs = Vec::with_capacity(self.trunk.len());
        let mut activations = Vec::with_capacity(self.trunk.len());
        let mut current = state.to_vec();
        for layer in &self.trunk {
            inputs.push(current.clone());
            let mut z = layer.forward(&current);
            for v in z.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            activations.push(z.clone());
            current = z;
        }
        let outputs = self.heads.iter().map(|h| h.forward(&current)).collect();
        ForwardCache { inputs, activations, outputs }
    }

    /// The six Q-value vectors for a state.
    pub fn forward(&self, state: &[f64]) -> Result<Vec<Vec<f64>>> {
        if state.len() != self.input_dim {
            return Err(Error::invalid(format!(
                "state has length {}, expected {}",
                state.len(),
                self.input_dim
            )));
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("state has a non-finite component".to_string()));
        }
        Ok(self.forward_cache(state).outputs)
    }

    pub fn param_count(&self) -> usize {
        self.trunk.iter().chain(&self.heads).map(Dense::param_count).sum()
    }

    /// All parameters, trunk layers then heads, each as weights row-major
    /// followed by biases. This is the checkpoint weight-block order.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in self.trunk.iter().chain(&self.heads) {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.bias);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::invalid(format!(
                "parameter block has {} entries, expected {}",
                params.len(),
                self.param_count()
            )));
        }
        let mut offset = 0;
        for layer in self.trunk.iter_mut().chain(self.heads.iter_mut()) {
            let w_len = layer.weights.len();
            layer.weights.copy_from_slice(&params[offset..offset + w_len]);
            offset += w_len;
            let b_len = layer.bias.len();
            layer.bias.copy_from_slice(&params[offset..offset + b_len]);
            offset += b_len;
        }
        Ok(())
    }
}

/// Copies the policy parameters into the target network. The copy is deep:
/// later policy updates do not alias the target.
pub fn sync_target(policy: &QNetwork, target: &mut QNetwork) {
    target.clone_from(policy);
}

/// Lowest index of the maximal entry.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy action: one coin decides between a fully random tuple and
/// the per-head greedy choice (ties to the lowest index). With eps = 0 no
/// random draw is consumed.
pub fn act(net: &QNetwork, state: &[f64], epsilon: f64, rng: &mut DetRng) -> ActionTuple {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        let indices: Vec<usize> = HEAD_WIDTHS.iter().map(|w| rng.random_range(0..*w)).collect();
        return ActionTuple::from_array(indices.try_into().expect("six heads"));
    }
    let q = net.forward_cache(state).outputs;
    ActionTuple::from_array([
        argmax(&q[0]),
        argmax(&q[1]),
        argmax(&q[2]),
        argmax(&q[3]),
        argmax(&q[4]),
        argmax(&q[5]),
    ])
}

/// One stored transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Experience {
    pub state: Vec<f64>,
    pub action: ActionTuple,
    pub reward: f64,
    pub next_state: Vec<f64>,
}

/// FIFO ring buffer with uniform without-replacement sampling.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    data: Vec<Experience>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> ReplayBuffer {
        ReplayBuffer { data: Vec::with_capacity(capacity.min(1 << 20)), capacity, cursor: 0 }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn store(&mut self, record: Experience) {
        if self.data.len() < self.capacity {
            self.data.push(record);
        } else {
            self.data[self.cursor] = record;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// `None` until the buffer holds at least `t` records.
    pub fn sample(&self, t: usize, rng: &mut DetRng) -> Option<Vec<Experience>> {
        if self.data.len() < t {
            return None;
        }
        let mut indices: Vec<usize> = (0..self.data.len()).collect();
        for k in 0..t {
            let j = k + rng.random_range(0..indices.len() - k);
            indices.swap(k, j);
        }
        Some(indices[..t].iter().map(|i| self.data[*i].clone()).collect())
    }
}

/// Adam state over the flat parameter vector.
#[derive(Clone, Debug)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub learning_rate: f64,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    pub fn new(param_count: usize, learning_rate: f64) -> Adam {
        Adam { m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0, learning_rate }
    }

    /// One step over the network's flat parameters.
    pub fn step(&mut self, net: &mut QNetwork, grads: &[f64]) {
        self.t += 1;
        let mut params = net.params_flat();
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
        net.set_params_flat(&params).expect("same shape");
    }
}

/// Double-Q targets: the action comes from the policy's argmax on the next
/// state and is evaluated by the target network.
pub fn td_targets(
    policy: &QNetwork,
    target: &QNetwork,
    batch: &[Experience],
    gamma: f64,
) -> Vec<[f64; 6]> {
    batch
        .iter()
        .map(|record| {
            let next_policy = policy.forward_cache(&record.next_state).outputs;
            let next_target = target.forward_cache(&record.next_state).outputs;
            let mut ys = [0.0; 6];
            for h in 0..6 {
                let chosen = argmax(&next_policy[h]);
                ys[h] = record.reward + gamma * next_target[h][chosen];
            }
            ys
        })
        .collect()
}

/// Loss and flat gradient for fixed TD targets.
///
/// Squared form: mean over batch and heads of (y - Q(s, a))^2.
/// Signed form: mean over batch and heads of (y - Q(s, a)), kept behind the
/// configuration flag for fidelity experiments.
pub fn loss_and_grads(
    policy: &QNetwork,
    batch: &[Experience],
    targets: &[[f64; 6]],
    loss_form: LossForm,
) -> (f64, Vec<f64>) {
    let denom = (batch.len() * 6) as f64;
    let mut grads = vec![0.0; policy.param_count()];
    let mut loss = 0.0;

    // flat offsets of each layer, trunk then heads
    let mut offsets = Vec::new();
    {
        let mut off = 0;
        for layer in policy.trunk.iter().chain(&policy.heads) {
            offsets.push(off);
            off += layer.param_count();
        }
    }
    let n_trunk = policy.trunk.len();

    for (record, ys) in batch.iter().zip(targets) {
        let cache = policy.forward_cache(&record.state);
        let top = cache.activations.last().expect("trunk is non-empty");
        let mut d_top = vec![0.0; top.len()];

        for h in 0..6 {
            let a = record.action.as_array()[h];
            let q = cache.outputs[h][a];
            let err = ys[h] - q;
            let (term, d_q) = match loss_form {
                LossForm::SquaredTd => (err * err, -2.0 * err / denom),
                LossForm::SignedTd => (err, -1.0 / denom),
            };
            loss += term / denom;

            let head = &policy.heads[h];
            let base = offsets[n_trunk + h];
            // d w[a][k] = d_q * top[k]; d b[a] = d_q
            for (k, t) in top.iter().enumerate() {
                grads[base + a * head.inp + k] += d_q * t;
            }
            grads[base + head.weights.len() + a] += d_q;
            let row = &head.weights[a * head.inp..(a + 1) * head.inp];
            for (k, w) in row.iter().enumerate() {
                d_top[k] += d_q * w;
            }
        }

        // back through the trunk
        let mut delta = d_top;
        for l in (0..n_trunk).rev() {
            let layer = &policy.trunk[l];
            // ReLU gate: activation 0 blocks the gradient
            for (d, act) in delta.iter_mut().zip(&cache.activations[l]) {
                if *act <= 0.0 {
                    *d = 0.0;
                }
            }
            let input = &cache.inputs[l];
            let base = offsets[l];
            for o in 0..layer.out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let row_base = base + o * layer.inp;
                for (k, inp) in input.iter().enumerate() {
                    grads[row_base + k] += d * inp;
                }
                grads[base + layer.weights.len() + o] += d;
            }
            if l > 0 {
                let mut next_delta = vec![0.0; layer.inp];
                for o in 0..layer.out {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.weights[o * layer.inp..(o + 1) * layer.inp];
                    for (k, w) in row.iter().enumerate() {
                        next_delta[k] += d * w;
                    }
                }
                delta = next_delta;
            }
        }
    }
    (loss, grads)
}

/// One training update: double-Q targets, loss, gradients, one Adam step.
/// Returns the scalar loss.
pub fn update(
    policy: &mut QNetwork,
    target: &QNetwork,
    adam: &mut Adam,
    batch: &[Experience],
    gamma: f64,
    loss_form: LossForm,
) -> f64 {
    let targets = td_targets(policy, target, batch, gamma);
    let (loss, grads) = loss_and_grads(policy, batch, &targets, loss_form);
    adam.step(policy, &grads);
    loss
}
