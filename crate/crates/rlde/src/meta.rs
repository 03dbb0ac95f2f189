//! The offline learning episode and the using episode: trains the agent over
//! the training suite and designs a configuration for an unseen problem.
//!
//! Per meta step: sample a training problem, read its cached fingerprint,
//! pick an action epsilon-greedily, decode it, run the configured DE for the
//! base budget, convert the final optimality gap into the reward
//! `exp(-gap)`, and store the transition whose next state is the next
//! sampled problem's fingerprint. Updates start once the buffer holds more
//! than one batch; the target network refreshes on a fixed update period.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bbob::{gap, make_instance, ProblemInstance, SuiteSplit};
use crate::de::{run_de, DEConfig, RunResult};
use crate::ela::{assemble_state, FeatureVector, NormStats, FEATURE_COUNT};
use crate::error::{Error, Result};
use crate::madqn::{
    act, sync_target, update, ActionTuple, Adam, AgentConfig, Experience, QNetwork, ReplayBuffer,
    HEAD_WIDTHS,
};
use crate::rng::{derived_rng, DetRng};

/// One row of the training log.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingStep {
    pub step: usize,
    pub function_id: u8,
    pub instance_seed: u64,
    pub action: ActionTuple,
    pub reward: f64,
    pub loss: Option<f64>,
    pub epsilon: f64,
}

/// Full record of one training campaign.
#[derive(Clone, Debug, Default)]
pub struct TrainingLog {
    pub steps: Vec<TrainingStep>,
    pub wall_time: f64,
}

impl TrainingLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "step,function_id,instance_seed,init,mutation,crossover,np,f,cr,reward,loss,epsilon\n",
        );
        for s in &self.steps {
            let a = s.action.as_array();
            let loss = s.loss.map(|l| l.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.step,
                s.function_id,
                s.instance_seed,
                a[0],
                a[1],
                a[2],
                a[3],
                a[4],
                a[5],
                s.reward,
                loss,
                s.epsilon
            ));
        }
        out
    }
}

/// A trained agent: network plus the feature statistics it expects.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedAgent {
    pub net: QNetwork,
    pub norm: NormStats,
    pub config: AgentConfig,
    pub seed: u64,
}

/// Reward of a finished run: `exp(-max(0, gap))`, always in (0, 1].
pub fn reward_of(result: &RunResult, instance: &ProblemInstance) -> f64 {
    (-gap(instance, result.best_f).max(0.0)).exp()
}

/// One cached training problem.
struct TrainingProblem {
    instance: ProblemInstance,
    features: FeatureVector,
}

/// Trains an agent over the suite's training functions at one dimension.
///
/// Fingerprints are computed once per problem (fixed sample seed per
/// instance) before the loop; their statistics freeze the normalization.
pub fn train(
    agent_config: &AgentConfig,
    suite: &SuiteSplit,
    dimension: usize,
    meta_steps: usize,
    base_max_fes: usize,
    seed: u64,
) -> Result<(TrainedAgent, TrainingLog)> {
    agent_config.validate()?;
    if suite.train_ids.is_empty() {
        return Err(Error::config("training suite is empty".to_string()));
    }
    let started = Instant::now();

    let mut problems = Vec::new();
    for &fid in &suite.train_ids {
        let instance = make_instance(fid, dimension, u64::from(fid))?;
        let mut ela_rng = derived_rng(&[seed, u64::from(fid)], "ela");
        let features = assemble_state(&instance, &mut ela_rng);
        problems.push(TrainingProblem { instance, features });
    }
    let norm = NormStats::from_features(
        &problems.iter().map(|p| p.features.clone()).collect::<Vec<_>>(),
    );
    let states: Vec<Vec<f64>> = problems.iter().map(|p| norm.normalize(&p.features)).collect();

    let mut net_rng = derived_rng(&[seed], "net_init");
    let mut policy = QNetwork::new(FEATURE_COUNT, &agent_config.hidden, &mut net_rng);
    let mut target = policy.clone();
    let mut adam = Adam::new(policy.param_count(), agent_config.learning_rate);
    let mut buffer = ReplayBuffer::new(agent_config.buffer_capacity);
    let mut loop_rng = derived_rng(&[seed], "meta_loop");

    let mut log = TrainingLog::default();
    let mut updates = 0usize;
    let mut current = loop_rng.random_range(0..problems.len());
    for step in 0..meta_steps {
        let epsilon = agent_config.epsilon_at(step, meta_steps);
        let action = act(&policy, &states[current], epsilon, &mut loop_rng);
        let config = action.decode();
        let mut run_rng = derived_rng(&[seed, step as u64], "de_run");
        let result = run_de(&config, &problems[current].instance, base_max_fes, &[], &mut run_rng)?;
        let reward = reward_of(&result, &problems[current].instance);

        let next = loop_rng.random_range(0..problems.len());
        buffer.store(Experience {
            state: states[current].clone(),
            action,
            reward,
            next_state: states[next].clone(),
        });

        let mut loss = None;
        if buffer.len() > agent_config.batch_size {
            let batch = buffer
                .sample(agent_config.batch_size, &mut loop_rng)
                .expect("buffer holds more than a batch");
            loss = Some(update(
                &mut policy,
                &target,
                &mut adam,
                &batch,
                agent_config.gamma,
                agent_config.loss_form,
            ));
            updates += 1;
            if updates % agent_config.target_sync_period == 0 {
                sync_target(&policy, &mut target);
            }
        }

        log.steps.push(TrainingStep {
            step,
            function_id: problems[current].instance.function_id,
            instance_seed: problems[current].instance.instance_seed,
            action,
            reward,
            loss,
            epsilon,
        });
        current = next;
    }
    log.wall_time = started.elapsed().as_secs_f64();

    Ok((
        TrainedAgent { net: policy, norm, config: agent_config.clone(), seed },
        log,
    ))
}

/// Greedy design for an unseen problem: fingerprint, normalize, argmax.
pub fn design_for(agent: &TrainedAgent, instance: &ProblemInstance, rng: &mut DetRng) -> DEConfig {
    let features = assemble_state(instance, rng);
    let state = agent.norm.normalize(&features);
    act(&agent.net, &state, 0.0, rng).decode()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    input_dim: usize,
    hidden: Vec<usize>,
    head_widths: Vec<usize>,
    norm: NormStats,
    agent_config: AgentConfig,
    seed: u64,
    weight_count: u64,
}

/// File layout: an 8-byte little-endian header length, the JSON header, an
/// 8-byte little-endian weight count, then the weights as little-endian
/// 64-bit reals in [`QNetwork::params_flat`] order.
pub fn save_checkpoint(agent: &TrainedAgent, path: &Path) -> Result<()> {
    let params = agent.net.params_flat();
    let header = CheckpointHeader {
        input_dim: agent.net.input_dim(),
        hidden: agent.net.hidden_widths(),
        head_widths: HEAD_WIDTHS.to_vec(),
        norm: agent.norm.clone(),
        agent_config: agent.config.clone(),
        seed: agent.seed,
        weight_count: params.len() as u64,
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| Error::parse("checkpoint header", e.to_string()))?;

    let mut bytes =
        Vec::with_capacity(16 + header_bytes.len() + params.len() * std::mem::size_of::<f64>());
    bytes.extend_from_slice(&(header_bytes.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&header_bytes);
    bytes.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for p in &params {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Loads a checkpoint; forward outputs reproduce the saved agent bit-exactly.
pub fn load_checkpoint(path: &Path) -> Result<TrainedAgent> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;

    let take = |bytes: &[u8], at: usize| -> Result<u64> {
        let slice = bytes
            .get(at..at + 8)
            .ok_or_else(|| Error::parse("checkpoint framing", "file truncated".to_string()))?;
        Ok(u64::from_le_bytes(slice.try_into().expect("eight bytes")))
    };
    let header_len = take(&bytes, 0)? as usize;
    let header_bytes = bytes
        .get(8..8 + header_len)
        .ok_or_else(|| Error::parse("checkpoint header", "file truncated".to_string()))?;
    let header: CheckpointHeader = serde_json::from_slice(header_bytes)
        .map_err(|e| Error::parse("checkpoint header", e.to_string()))?;
    if header.head_widths != HEAD_WIDTHS.to_vec() {
        return Err(Error::parse(
            "checkpoint header",
            format!("head widths {:?} do not match this build", header.head_widths),
        ));
    }
    if header.norm.mean.len() != FEATURE_COUNT || header.norm.std.len() != FEATURE_COUNT {
        return Err(Error::parse(
            "checkpoint header",
            "normalization statistics have the wrong width".to_string(),
        ));
    }

    let weights_at = 8 + header_len;
    let weight_count = take(&bytes, weights_at)? as usize;
    if weight_count as u64 != header.weight_count {
        return Err(Error::parse(
            "checkpoint weights",
            format!(
                "weight block declares {weight_count} entries, header expects {}",
                header.weight_count
            ),
        ));
    }
    let data = bytes.get(weights_at + 8..).ok_or_else(|| {
        Error::parse("checkpoint weights", "file truncated".to_string())
    })?;
    if data.len() != weight_count * 8 {
        return Err(Error::parse(
            "checkpoint weights",
            format!("weight block holds {} bytes, expected {}", data.len(), weight_count * 8),
        ));
    }
    let params: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
        .collect();

    let mut net_rng = derived_rng(&[header.seed], "net_init");
    let mut net = QNetwork::new(header.input_dim, &header.hidden, &mut net_rng);
    if net.param_count() != weight_count {
        return Err(Error::parse(
            "checkpoint weights",
            format!(
                "layer sizes imply {} parameters, weight block holds {weight_count}",
                net.param_count()
            ),
        ));
    }
    net.set_params_flat(&params)?;
    Ok(TrainedAgent {
        net,
        norm: header.norm,
        config: header.agent_config,
        seed: header.seed,
    })
}

/// FNV-1a hex digest of a checkpoint file, recorded as run provenance.
pub fn checkpoint_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    Ok(format!("{h:016x}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbob::suite_split;
    use crate::rng::seed_rng;

    fn quick_agent_config() -> AgentConfig {
        AgentConfig {
            hidden: vec![16, 16],
            batch_size: 8,
            buffer_capacity: 64,
            ..AgentConfig::default()
        }
    }

    #[test]
    fn reward_examples() {
        let instance = make_instance(1, 2, 1).unwrap();
        let zero_gap = RunResult {
            best_f: instance.f_opt,
            best_x: instance.x_opt.clone(),
            trajectory: vec![],
            fes_used: 0,
            wall_time: 0.0,
        };
        assert_eq!(reward_of(&zero_gap, &instance), 1.0);

        // gap = ln 2 halves the reward (direct evaluation of the formula)
        let ln2 = RunResult { best_f: instance.f_opt + 2.0_f64.ln(), ..zero_gap.clone() };
        assert!((reward_of(&ln2, &instance) - 0.5).abs() < 1e-12);

        let huge = RunResult { best_f: instance.f_opt + 1000.0, ..zero_gap };
        let r = reward_of(&huge, &instance);
        assert!(r >= 0.0 && r < 1e-300);
    }

    #[test]
    fn zero_steps_returns_initialized_network() {
        let (agent, log) = train(&quick_agent_config(), &suite_split(), 2, 0, 100, 7).unwrap();
        assert!(log.steps.is_empty());
        let mut rng = derived_rng(&[7u64], "net_init");
        let fresh = QNetwork::new(FEATURE_COUNT, &quick_agent_config().hidden, &mut rng);
        assert_eq!(agent.net.params_flat(), fresh.params_flat());
    }

    #[test]
    fn training_is_deterministic_and_guards_warmup() {
        let cfg = quick_agent_config();
        let suite = suite_split();
        let (_, log_a) = train(&cfg, &suite, 2, 12, 60, 3).unwrap();
        let (_, log_b) = train(&cfg, &suite, 2, 12, 60, 3).unwrap();
        assert_eq!(log_a.steps, log_b.steps);

        // no update until the buffer holds more than one batch
        let first_loss = log_a.steps.iter().position(|s| s.loss.is_some());
        assert_eq!(first_loss, Some(cfg.batch_size), "warmup of batch_size + 1 steps");
        // epsilon never increases
        for w in log_a.steps.windows(2) {
            assert!(w[1].epsilon <= w[0].epsilon);
        }
    }

    #[test]
    fn design_is_deterministic_per_seed() {
        let (agent, _) = train(&quick_agent_config(), &suite_split(), 2, 10, 60, 5).unwrap();
        let unseen = make_instance(1, 2, 1).unwrap();
        let a = design_for(&agent, &unseen, &mut seed_rng(11));
        let b = design_for(&agent, &unseen, &mut seed_rng(11));
        assert_eq!(a, b);
    }

    #[test]
    fn all_zero_network_designs_lowest_indices() {
        let (mut agent, _) = train(&quick_agent_config(), &suite_split(), 2, 0, 60, 5).unwrap();
        agent.net.set_params_flat(&vec![0.0; agent.net.param_count()]).unwrap();
        let unseen = make_instance(6, 2, 1).unwrap();
        let config = design_for(&agent, &unseen, &mut seed_rng(1));
        let action = ActionTuple::encode(&config).unwrap();
        assert_eq!(action.as_array(), [0; 6]);
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.ckpt");
        let (agent, _) = train(&quick_agent_config(), &suite_split(), 2, 5, 60, 9).unwrap();
        save_checkpoint(&agent, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.net.params_flat(), agent.net.params_flat());
        assert_eq!(loaded.norm, agent.norm);

        let mut rng = seed_rng(2);
        for _ in 0..100 {
            let state: Vec<f64> =
                (0..FEATURE_COUNT).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect();
            let a = agent.net.forward(&state).unwrap();
            let b = loaded.net.forward(&state).unwrap();
            for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn truncated_checkpoint_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.ckpt");
        let (agent, _) = train(&quick_agent_config(), &suite_split(), 2, 2, 60, 9).unwrap();
        save_checkpoint(&agent, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        let cut = path.with_extension("cut");
        fs::write(&cut, &bytes[..bytes.len() - 16]).unwrap();
        match load_checkpoint(&cut) {
            Err(Error::Parse { section, .. }) => assert_eq!(section, "checkpoint weights"),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_weight_count_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.ckpt");
        let (agent, _) = train(&quick_agent_config(), &suite_split(), 2, 2, 60, 9).unwrap();
        save_checkpoint(&agent, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        // corrupt the declared weight count
        let header_len = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
        let at = 8 + header_len;
        bytes[at..at + 8].copy_from_slice(&999u64.to_le_bytes());
        let bad = path.with_extension("bad");
        fs::write(&bad, &bytes).unwrap();
        match load_checkpoint(&bad) {
            Err(Error::Parse { section, detail }) => {
                assert_eq!(section, "checkpoint weights");
                assert!(detail.contains("999"), "{detail}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn training_log_csv_has_one_row_per_step() {
        let (_, log) = train(&quick_agent_config(), &suite_split(), 2, 6, 60, 3).unwrap();
        let csv = log.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("step,function_id"));
    }
}
