//! Brute-force reference implementations used as test oracles.
//!
//! Everything here trades speed for obviousness: the stepper advances one
//! cycle at a time and tracks token counts only, the energy oracle sums
//! instantaneous power cycle by cycle, and the capacity oracle integrates the
//! Gamma density numerically.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use crate::library::{IpConfigKey, IpPowerRecord, Params};
use crate::sim::{ActivityTrace, ChannelDesc, Endpoint, InstanceDesc, SystemModel, Topology};

/// Per-cycle activity flags of every instance over `[0, t_sim)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleActivity {
    pub t_sim: u64,
    pub active: BTreeMap<String, Vec<bool>>,
}

impl CycleActivity {
    pub fn active_cycles(&self, id: &str) -> u64 {
        self.active[id].iter().filter(|&&a| a).count() as u64
    }
}

/// Expands a trace into per-cycle flags.
pub fn expand_trace(trace: &ActivityTrace) -> CycleActivity {
    let active = trace
        .instances
        .iter()
        .map(|(id, intervals)| {
            let mut flags = vec![false; trace.t_sim_cycles as usize];
            for iv in intervals {
                for c in iv.start..iv.end {
                    flags[c as usize] = true;
                }
            }
            (id.clone(), flags)
        })
        .collect();
    CycleActivity {
        t_sim: trace.t_sim_cycles,
        active,
    }
}

/// Average power of the instances in `records`: each cycle adds `p_active`
/// or `p_idle` depending on its flag, and the sum is divided by the cycle count.
pub fn energy_oracle(activity: &CycleActivity, records: &BTreeMap<String, IpPowerRecord>) -> f64 {
    let mut energy = 0.0;
    for c in 0..activity.t_sim as usize {
        for (id, r) in records {
            energy += if activity.active[id][c] {
                r.p_active_mw
            } else {
                r.p_idle_mw
            };
        }
    }
    energy / activity.t_sim as f64
}

struct StepState {
    remaining: Option<u64>,
    next_allowed: u64,
    busy_until: Vec<u64>,
}

/// Cycle-by-cycle execution of a system made of the generic `source`,
/// `relay` and `sink` blocks, run for exactly `cycles` cycles.
pub fn step_activity(system: &SystemModel, cycles: u64) -> CycleActivity {
    let n = system.instances.len();
    let mut inputs = vec![Vec::new(); n];
    let mut outputs = vec![Vec::new(); n];
    for (c, ch) in system.channels.iter().enumerate() {
        outputs[ch.src.0].push((ch.src.1, c));
        inputs[ch.dst.0].push((ch.dst.1, c));
    }
    for v in inputs.iter_mut().chain(outputs.iter_mut()) {
        v.sort();
    }
    let mut queue = vec![0usize; system.channels.len()];
    let mut in_flight = vec![0usize; system.channels.len()];
    // (due cycle, instance) in firing order.
    let mut pending: VecDeque<(u64, usize)> = VecDeque::new();
    let mut states: Vec<StepState> = system
        .instances
        .iter()
        .map(|inst| {
            assert!(
                matches!(inst.block_type.as_str(), "source" | "relay" | "sink"),
                "the stepper models generic blocks only"
            );
            StepState {
                remaining: (inst.block_type == "source")
                    .then(|| inst.parameters.get("tokens").and_then(|v| v.as_int()))
                    .flatten()
                    .map(|t| t.max(0) as u64),
                next_allowed: 0,
                busy_until: Vec::new(),
            }
        })
        .collect();
    let mut active: Vec<Vec<bool>> = vec![vec![false; cycles as usize]; n];

    for t in 0..cycles {
        let mut k = 0;
        let mut due: Vec<(u64, usize)> = Vec::new();
        while k < pending.len() {
            if pending[k].0 == t {
                due.push(pending.remove(k).expect("index in range"));
            } else {
                k += 1;
            }
        }
        for (_, i) in due {
            for &(_, c) in &outputs[i] {
                in_flight[c] -= 1;
                queue[c] += 1;
            }
        }
        loop {
            let mut any = false;
            for i in 0..n {
                let st = &states[i];
                let ready = t >= st.next_allowed
                    && st.remaining != Some(0)
                    && inputs[i].iter().all(|&(_, c)| queue[c] > 0)
                    && outputs[i]
                        .iter()
                        .all(|&(_, c)| queue[c] + in_flight[c] < system.channels[c].capacity);
                if !ready {
                    continue;
                }
                any = true;
                let inst = &system.instances[i];
                for &(_, c) in &inputs[i] {
                    queue[c] -= 1;
                }
                let st = &mut states[i];
                if let Some(r) = st.remaining.as_mut() {
                    *r -= 1;
                }
                st.next_allowed = t + inst.initiation_interval_cycles;
                st.busy_until.push(t + inst.latency_cycles);
                if inst.latency_cycles == 0 {
                    for &(_, c) in &outputs[i] {
                        queue[c] += 1;
                    }
                } else {
                    for &(_, c) in &outputs[i] {
                        in_flight[c] += 1;
                    }
                    pending.push_back((t + inst.latency_cycles, i));
                }
            }
            if !any {
                break;
            }
        }
        for (i, st) in states.iter_mut().enumerate() {
            st.busy_until.retain(|&end| end > t);
            active[i][t as usize] = !st.busy_until.is_empty();
        }
    }
    CycleActivity {
        t_sim: cycles,
        active: system
            .instances
            .iter()
            .zip(active)
            .map(|(inst, flags)| (inst.instance_id.clone(), flags))
            .collect(),
    }
}

/// A random acyclic system of generic blocks with power records for its relays.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub topology: Topology,
    pub records: BTreeMap<String, IpPowerRecord>,
    pub cycles: u64,
}

/// Draws a system with 1..=`max_ips` relays fed by one source, with random
/// fan-out, joins, latencies, intervals, capacities and a random token budget.
pub fn random_system<R: Rng>(rng: &mut R, max_ips: usize, max_cycles: u64) -> RandomSystem {
    let n_ips = rng.random_range(1..=max_ips.max(1));
    // Parents of each relay, as node indices: 0 is the source, i + 1 relay i.
    let mut parents: Vec<Vec<usize>> = Vec::with_capacity(n_ips);
    for i in 0..n_ips {
        let first = rng.random_range(0..=i);
        let mut ps = vec![first];
        if i > 0 && rng.random_bool(0.25) {
            let second = rng.random_range(0..=i);
            if second != first {
                ps.push(second);
            }
        }
        parents.push(ps);
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_ips + 1];
    for (i, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(i + 1);
        }
    }
    let name = |node: usize| {
        if node == 0 {
            "src".to_string()
        } else {
            format!("ip{}", node - 1)
        }
    };

    let tokens: i64 = rng.random_range(0..200);
    let mut instances = vec![InstanceDesc {
        instance_id: "src".into(),
        block_type: "source".into(),
        parameters: Params::new()
            .with("tokens", tokens)
            .with("outputs", children[0].len().max(1) as i64),
        latency_cycles: rng.random_range(0..3),
        initiation_interval_cycles: rng.random_range(1..20),
    }];
    let mut records = BTreeMap::new();
    for (i, ps) in parents.iter().enumerate() {
        let id = name(i + 1);
        instances.push(InstanceDesc {
            instance_id: id.clone(),
            block_type: "relay".into(),
            parameters: Params::new()
                .with("inputs", ps.len() as i64)
                .with("outputs", children[i + 1].len().max(1) as i64),
            latency_cycles: rng.random_range(0..60),
            initiation_interval_cycles: rng.random_range(1..40),
        });
        let a: f64 = rng.random_range(0.0..400.0);
        let b: f64 = rng.random_range(0.0..400.0);
        records.insert(
            id,
            IpPowerRecord::new(IpConfigKey::new("relay", Params::new()), a.max(b), a.min(b), "random"),
        );
    }

    let mut channels = Vec::new();
    let mut in_port = vec![0usize; n_ips + 1];
    let mut sink_count = 0;
    for (node, kids) in children.iter().enumerate() {
        if kids.is_empty() {
            let sink = format!("sink{sink_count}");
            sink_count += 1;
            instances.push(InstanceDesc {
                instance_id: sink.clone(),
                block_type: "sink".into(),
                parameters: Params::new(),
                latency_cycles: rng.random_range(0..30),
                initiation_interval_cycles: rng.random_range(1..30),
            });
            channels.push(ChannelDesc {
                src: Endpoint::new(name(node), 0),
                dst: Endpoint::new(sink, 0),
                capacity: rng.random_range(1..5),
            });
        } else {
            for (port, &child) in kids.iter().enumerate() {
                channels.push(ChannelDesc {
                    src: Endpoint::new(name(node), port),
                    dst: Endpoint::new(name(child), in_port[child]),
                    capacity: rng.random_range(1..5),
                });
                in_port[child] += 1;
            }
        }
    }
    RandomSystem {
        topology: Topology {
            clock_mhz: 100.0,
            instances,
            channels,
        },
        records,
        cycles: rng.random_range(1..=max_cycles.max(1)),
    }
}

/// `E[log2(1 + γX)]` for `X ~ Gamma(k, 1)`, by composite Simpson over `[0, 60]`.
pub fn gamma_log2_expectation(k: u32, gamma: f64) -> f64 {
    assert!(k >= 1);
    let gamma_k: f64 = (1..k).map(f64::from).product();
    let f = |x: f64| (gamma * x).ln_1p() / std::f64::consts::LN_2 * x.powi(k as i32 - 1) * (-x).exp() / gamma_k;
    let (a, b, n) = (0.0, 60.0, 600_000usize);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_known_values() {
        // Gamma(1) mean 1: E[X] via γ→0 limit, log2(1+γx) ≈ γx/ln2.
        let g = 1e-6;
        let v = gamma_log2_expectation(2, g);
        assert!((v - 2.0 * g / std::f64::consts::LN_2).abs() / v < 1e-5);
        // Exponential case closed form: E[ln(1+X)] = e·E1(1) = 0.596347362...
        let v = gamma_log2_expectation(1, 1.0) * std::f64::consts::LN_2;
        assert!((v - 0.596_347_362_323_194).abs() < 1e-9, "{v}");
    }
}
