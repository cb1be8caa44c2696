//! Event-driven execution of a [`SystemModel`].
//!
//! Firing rule: an instance fires at cycle `t` when it is willing to, its
//! initiation interval has elapsed, every input channel holds a token, and
//! every output channel has room for the most tokens the block may emit
//! (counting tokens already in flight). A firing consumes one token per input
//! at `t`, marks the instance active over `[t, t + latency)`, and delivers its
//! outputs at `t + latency`.
//!
//! Within one cycle, deliveries due at that cycle happen first, in firing
//! order. Instances are then scanned in declaration order, repeatedly, until a
//! full pass fires nothing. Zero-latency outputs are delivered immediately and
//! are visible to later scans of the same cycle. Between cycles at which
//! something can change, time jumps directly to the next delivery or the next
//! expiring initiation interval.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::block::{Behavior, Payload};
use super::model::SystemModel;
use super::trace::{push_merged, ActivityTrace, Interval};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCondition {
    /// Run exactly this many cycles.
    Cycles(u64),
    /// Run until every sink has consumed this many tokens and finished
    /// processing the last one. Sinks stop consuming once they reach it.
    Outputs(u64),
}

/// Token totals of one channel at the end of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelCount {
    pub src: String,
    pub dst: String,
    pub produced: u64,
    pub consumed: u64,
    pub occupancy: u64,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub trace: ActivityTrace,
    /// Tokens consumed by each sink, in arrival order.
    pub outputs: BTreeMap<String, Vec<Payload>>,
    pub token_counts: Vec<ChannelCount>,
    /// Number of firings per instance, declaration order.
    pub firings: Vec<(String, u64)>,
    pub wall_time_s: f64,
}

impl SimulationResult {
    /// Equality of everything except wall-clock time.
    pub fn same_outcome(&self, other: &SimulationResult) -> bool {
        self.trace == other.trace
            && self.outputs == other.outputs
            && self.token_counts == other.token_counts
            && self.firings == other.firings
    }
}

struct Delivery {
    time: u64,
    seq: u64,
    instance: usize,
    outputs: Vec<Vec<Payload>>,
}

impl PartialEq for Delivery {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl Eq for Delivery {}

impl PartialOrd for Delivery {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delivery {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

#[derive(Default)]
struct ChannelState {
    queue: VecDeque<Payload>,
    in_flight: usize,
    produced: u64,
    consumed: u64,
}

struct InstanceState {
    behavior: Box<dyn Behavior>,
    next_allowed: u64,
    fired: u64,
    intervals: Vec<Interval>,
    quota_done_at: Option<u64>,
}

struct Kernel<'a> {
    system: &'a SystemModel,
    channels: Vec<ChannelState>,
    states: Vec<InstanceState>,
    pending: BinaryHeap<Reverse<Delivery>>,
    seq: u64,
    quota: Option<u64>,
    outputs: BTreeMap<String, Vec<Payload>>,
}

impl<'a> Kernel<'a> {
    fn new(system: &'a SystemModel, quota: Option<u64>) -> Result<Self, SimError> {
        let states = system
            .instances
            .iter()
            .map(|inst| {
                Ok(InstanceState {
                    behavior: inst.kind.instantiate(&inst.parameters)?,
                    next_allowed: 0,
                    fired: 0,
                    intervals: Vec::new(),
                    quota_done_at: None,
                })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        let outputs = system
            .instances
            .iter()
            .enumerate()
            .filter(|(i, _)| system.is_sink(*i))
            .map(|(_, inst)| (inst.instance_id.clone(), Vec::new()))
            .collect();
        Ok(Self {
            system,
            channels: system.channels.iter().map(|_| ChannelState::default()).collect(),
            states,
            pending: BinaryHeap::new(),
            seq: 0,
            quota,
            outputs,
        })
    }

    fn is_quota_sink(&self, i: usize) -> bool {
        self.quota.is_some() && self.system.is_sink(i)
    }

    fn can_fire(&self, i: usize, t: u64) -> bool {
        let st = &self.states[i];
        if t < st.next_allowed || !st.behavior.wants_to_fire() {
            return false;
        }
        if self.is_quota_sink(i) && Some(st.fired) >= self.quota {
            return false;
        }
        if self.system.inputs[i].iter().any(|&c| self.channels[c].queue.is_empty()) {
            return false;
        }
        self.system.outputs[i].iter().enumerate().all(|(port, &c)| {
            let ch = &self.channels[c];
            let used = ch.queue.len() + ch.in_flight;
            let cap = self.system.channels[c].capacity;
            used <= cap && cap - used >= st.behavior.max_emit(port)
        })
    }

    fn fire(&mut self, i: usize, t: u64) -> Result<(), SimError> {
        let inst = &self.system.instances[i];
        let inputs: Vec<Payload> = self.system.inputs[i]
            .iter()
            .map(|&c| {
                let ch = &mut self.channels[c];
                ch.consumed += 1;
                ch.queue.pop_front().expect("checked non-empty")
            })
            .collect();
        if self.system.is_sink(i) {
            self.outputs
                .get_mut(&inst.instance_id)
                .expect("sink registered")
                .extend(inputs.iter().cloned());
        }

        let st = &mut self.states[i];
        let firing = st.behavior.fire(inputs).map_err(|e| match e {
            SimError::Block { .. } => e,
            other => SimError::Block {
                instance: inst.instance_id.clone(),
                reason: other.to_string(),
            },
        })?;
        if firing.outputs.len() != inst.ports.outputs {
            return Err(SimError::BlockContract {
                instance: inst.instance_id.clone(),
                reason: format!(
                    "emitted on {} ports, block has {}",
                    firing.outputs.len(),
                    inst.ports.outputs
                ),
            });
        }
        for (port, tokens) in firing.outputs.iter().enumerate() {
            if tokens.len() > st.behavior.max_emit(port) {
                return Err(SimError::BlockContract {
                    instance: inst.instance_id.clone(),
                    reason: format!(
                        "emitted {} tokens on port {port}, declared at most {}",
                        tokens.len(),
                        st.behavior.max_emit(port)
                    ),
                });
            }
        }
        let (latency, interval) = match firing.timing {
            Some(timing) => (timing.latency, timing.interval),
            None => (inst.latency_cycles, inst.initiation_interval_cycles),
        };
        if interval == 0 {
            return Err(SimError::BlockContract {
                instance: inst.instance_id.clone(),
                reason: "zero initiation interval".into(),
            });
        }

        st.fired += 1;
        st.next_allowed = t + interval;
        push_merged(&mut st.intervals, t, t + latency);
        if self.quota.is_some() && self.system.is_sink(i) && Some(st.fired) == self.quota {
            st.quota_done_at = Some(t + latency);
        }

        if latency == 0 {
            self.deliver(i, firing.outputs);
        } else {
            for (port, tokens) in firing.outputs.iter().enumerate() {
                self.channels[self.system.outputs[i][port]].in_flight += tokens.len();
            }
            self.seq += 1;
            self.pending.push(Reverse(Delivery {
                time: t + latency,
                seq: self.seq,
                instance: i,
                outputs: firing.outputs,
            }));
        }
        Ok(())
    }

    fn deliver(&mut self, i: usize, outputs: Vec<Vec<Payload>>) {
        for (port, tokens) in outputs.into_iter().enumerate() {
            let ch = &mut self.channels[self.system.outputs[i][port]];
            ch.produced += tokens.len() as u64;
            ch.queue.extend(tokens);
        }
    }

    fn deliver_due(&mut self, t: u64) {
        while self.pending.peek().is_some_and(|Reverse(d)| d.time <= t) {
            let Reverse(d) = self.pending.pop().expect("peeked");
            for (port, tokens) in d.outputs.iter().enumerate() {
                self.channels[self.system.outputs[d.instance][port]].in_flight -= tokens.len();
            }
            self.deliver(d.instance, d.outputs);
        }
    }

    fn settle(&mut self, t: u64) -> Result<(), SimError> {
        loop {
            let mut fired = false;
            for i in 0..self.states.len() {
                if self.can_fire(i, t) {
                    self.fire(i, t)?;
                    fired = true;
                }
            }
            if !fired {
                return Ok(());
            }
        }
    }

    fn next_time(&self, t: u64) -> Option<u64> {
        let delivery = self.pending.peek().map(|Reverse(d)| d.time);
        let wake = self
            .states
            .iter()
            .map(|s| s.next_allowed)
            .filter(|&n| n > t)
            .min();
        match (delivery, wake) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Completion cycle once every sink met the quota.
    fn quota_end(&self) -> Option<u64> {
        self.quota?;
        let mut end = 0;
        for (i, st) in self.states.iter().enumerate() {
            if self.system.is_sink(i) {
                end = end.max(st.quota_done_at?);
            }
        }
        Some(end)
    }

    fn blocked_instances(&self) -> Vec<String> {
        self.system
            .instances
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let waiting = self.system.inputs[*i]
                    .iter()
                    .any(|&c| !self.channels[c].queue.is_empty());
                let unmet = self.is_quota_sink(*i) && self.states[*i].quota_done_at.is_none();
                waiting || unmet
            })
            .map(|(_, inst)| inst.instance_id.clone())
            .collect()
    }

    fn run(mut self, stop: StopCondition) -> Result<SimulationResult, SimError> {
        let started = Instant::now();
        let mut t = 0u64;
        let mut end: Option<u64> = match stop {
            StopCondition::Cycles(n) => Some(n),
            StopCondition::Outputs(_) => None,
        };
        loop {
            if end.is_some_and(|e| t >= e) {
                break;
            }
            self.deliver_due(t);
            self.settle(t)?;
            if end.is_none() {
                end = self.quota_end();
            }
            match self.next_time(t) {
                Some(next) => t = next,
                None => match end {
                    Some(_) => break,
                    None => {
                        return Err(SimError::Deadlock {
                            cycle: t,
                            blocked: self.blocked_instances(),
                        })
                    }
                },
            }
        }
        let t_sim = end.expect("loop exits with a known end");
        Ok(self.finish(t_sim, started))
    }

    fn finish(self, t_sim: u64, started: Instant) -> SimulationResult {
        let system = self.system;
        let mut instances = Vec::with_capacity(self.states.len());
        let mut firings = Vec::with_capacity(self.states.len());
        for (inst, st) in system.instances.iter().zip(self.states) {
            let clipped = st
                .intervals
                .into_iter()
                .filter(|iv| iv.start < t_sim)
                .map(|iv| Interval {
                    start: iv.start,
                    end: iv.end.min(t_sim),
                })
                .collect();
            instances.push((inst.instance_id.clone(), clipped));
            firings.push((inst.instance_id.clone(), st.fired));
        }
        let token_counts = system
            .channels
            .iter()
            .zip(&self.channels)
            .map(|(c, s)| ChannelCount {
                src: format!("{}[{}]", system.instances[c.src.0].instance_id, c.src.1),
                dst: format!("{}[{}]", system.instances[c.dst.0].instance_id, c.dst.1),
                produced: s.produced,
                consumed: s.consumed,
                occupancy: s.queue.len() as u64,
            })
            .collect();
        SimulationResult {
            trace: ActivityTrace {
                instances,
                t_sim_cycles: t_sim,
            },
            outputs: self.outputs,
            token_counts,
            firings,
            wall_time_s: started.elapsed().as_secs_f64(),
        }
    }
}

/// Runs the system until `stop` is met.
pub fn simulate(system: &SystemModel, stop: StopCondition) -> Result<SimulationResult, SimError> {
    let quota = match stop {
        StopCondition::Outputs(n) => {
            if !(0..system.instances.len()).any(|i| system.is_sink(i)) {
                return Err(SimError::Topology("output quota needs at least one sink".into()));
            }
            Some(n)
        }
        StopCondition::Cycles(_) => None,
    };
    Kernel::new(system, quota)?.run(stop)
}
